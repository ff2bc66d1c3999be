//! BN transliteration, a Buckwalter-style ASCII encoding of Arabic script.
//!
//! Every other module works on BN strings. The codec table lives in
//! `data/bn_codec.txt` and maps each Arabic codepoint to exactly one ASCII
//! character. ASCII whitespace and punctuation pass through unchanged in both
//! directions; anything else outside the table is rejected.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

/// The diacritics of the BN alphabet: short vowels, silent `o`, tanwin and shadda.
pub const DIACRITICS: [char; 8] = ['a', 'u', 'i', 'o', 'F', 'N', 'K', 'G'];

/// The basic letters of the BN alphabet, hamza allographs first.
pub const BASIC_LETTERS: [char; 36] = [
    'e', 'c', 'C', 'W', 'I', 'O', 'A', 'b', 'p', 't', 'v', 'j', 'H', 'x', 'd', 'J', 'r', 'z', 's', 'M', 'S', 'D', 'T', 'Z', 'E',
    'g', 'f', 'q', 'k', 'l', 'm', 'n', 'h', 'w', 'Y', 'y',
];

/// Seats of the glottal stop.
pub const HAMZA_ALLOGRAPHS: [char; 6] = ['O', 'I', 'C', 'W', 'e', 'c'];

const BUILTIN_TABLE: &str = include_str!("../data/bn_codec.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslitError {
    #[error("unmapped codepoint U+{codepoint:04X} at position {position}")]
    UnmappedCodepoint { position: usize, codepoint: u32 },
    #[error("invalid BN character {ch:?} at position {position}")]
    InvalidBnChar { position: usize, ch: char },
    #[error("codec table line {line}: {message}")]
    BadTable { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharClass {
    BasicLetter,
    Diacritic,
}

/// Classifies a BN character; `None` for characters outside the alphabet.
pub fn classify(c: char) -> Option<CharClass> {
    if DIACRITICS.contains(&c) {
        Some(CharClass::Diacritic)
    } else if BASIC_LETTERS.contains(&c) {
        Some(CharClass::BasicLetter)
    } else {
        None
    }
}

pub fn is_diacritic(c: char) -> bool {
    DIACRITICS.contains(&c)
}

pub fn is_basic(c: char) -> bool {
    BASIC_LETTERS.contains(&c)
}

pub fn is_bn(c: char) -> bool {
    classify(c).is_some()
}

pub fn is_hamza(c: char) -> bool {
    HAMZA_ALLOGRAPHS.contains(&c)
}

fn is_passthrough(c: char) -> bool {
    c.is_ascii_whitespace() || c.is_ascii_punctuation() || c.is_ascii_digit()
}

/// A string made only of BN characters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BnString(String);

impl BnString {
    pub fn new(s: impl Into<String>) -> Result<Self, TranslitError> {
        let s = s.into();
        if let Some((position, ch)) = s.chars().enumerate().find(|(_, c)| !is_bn(*c)) {
            return Err(TranslitError::InvalidBnChar { position, ch });
        }
        Ok(BnString(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    /// Removes every diacritic, leaving the basic-letter skeleton.
    pub fn strip_diacritics(&self) -> BnString {
        BnString(strip_diacritics(&self.0))
    }
}

impl fmt::Display for BnString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for BnString {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

pub fn strip_diacritics(s: &str) -> String {
    s.chars().filter(|c| !is_diacritic(*c)).collect()
}

/// A bijective codec between Arabic codepoints and BN characters.
#[derive(Debug, Clone)]
pub struct Codec {
    to_bn: HashMap<char, char>,
    to_ar: HashMap<char, char>,
}

impl Codec {
    /// Parses a table of `<hex-codepoint> <bn-char>` lines; `#` starts a comment.
    pub fn from_table(text: &str) -> Result<Self, TranslitError> {
        let mut to_bn = HashMap::new();
        let mut to_ar = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: &str| TranslitError::BadTable { line: idx + 1, message: message.to_string() };
            let mut parts = line.split_whitespace();
            let (Some(hex), Some(bn), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(bad("expected two fields"));
            };
            let cp = u32::from_str_radix(hex, 16).map_err(|_| bad("bad hex codepoint"))?;
            let ar = char::from_u32(cp).ok_or_else(|| bad("codepoint out of range"))?;
            let mut bn_chars = bn.chars();
            let (Some(b), None) = (bn_chars.next(), bn_chars.next()) else {
                return Err(bad("BN side must be one character"));
            };
            if !is_bn(b) {
                return Err(bad("BN side is not in the alphabet"));
            }
            if to_bn.insert(ar, b).is_some() || to_ar.insert(b, ar).is_some() {
                return Err(bad("duplicate mapping"));
            }
        }
        Ok(Codec { to_bn, to_ar })
    }

    /// The checked-in table.
    pub fn builtin() -> &'static Codec {
        static CODEC: OnceLock<Codec> = OnceLock::new();
        CODEC.get_or_init(|| Codec::from_table(BUILTIN_TABLE).expect("builtin codec table is valid"))
    }

    pub fn to_bn(&self, s: &str) -> Result<String, TranslitError> {
        s.chars()
            .enumerate()
            .map(|(position, c)| match self.to_bn.get(&c) {
                Some(b) => Ok(*b),
                None if is_passthrough(c) => Ok(c),
                None => Err(TranslitError::UnmappedCodepoint { position, codepoint: c as u32 }),
            })
            .collect()
    }

    pub fn to_arabic(&self, s: &str) -> Result<String, TranslitError> {
        s.chars()
            .enumerate()
            .map(|(position, c)| match self.to_ar.get(&c) {
                Some(a) => Ok(*a),
                None if is_passthrough(c) => Ok(c),
                None => Err(TranslitError::InvalidBnChar { position, ch: c }),
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.to_bn.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_bn.is_empty()
    }
}

/// Arabic script to BN with the builtin table.
pub fn to_bn(s: &str) -> Result<String, TranslitError> {
    Codec::builtin().to_bn(s)
}

/// BN to Arabic script with the builtin table.
pub fn to_arabic(s: &str) -> Result<String, TranslitError> {
    Codec::builtin().to_arabic(s)
}

/// True when the string contains at least one Arabic-block codepoint.
pub fn looks_arabic(s: &str) -> bool {
    s.chars().any(|c| ('\u{0600}'..='\u{06FF}').contains(&c))
}

/// Accepts either script and returns BN.
pub fn normalize_to_bn(s: &str) -> Result<String, TranslitError> {
    if looks_arabic(s) {
        to_bn(s)
    } else {
        Ok(s.to_string())
    }
}

/// Checks the full-diacritization convention: every basic letter except the
/// last carries exactly one diacritic, optionally preceded by `G`. `C` already
/// contains its vowel and may stand bare. Returns the offending char index.
pub fn check_full_diacritization(s: &str) -> Result<(), usize> {
    let chars: Vec<char> = s.chars().collect();
    let last_basic = chars.iter().rposition(|c| is_basic(*c));
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if !is_basic(c) {
            return Err(i);
        }
        let mut j = i + 1;
        if chars.get(j) == Some(&'G') {
            j += 1;
        }
        let vowel = chars.get(j).copied().filter(|d| is_diacritic(*d) && *d != 'G');
        if vowel.is_some() {
            j += 1;
        }
        if Some(i) == last_basic {
            return if j == chars.len() { Ok(()) } else { Err(j) };
        }
        if vowel.is_none() && !(c == 'C' && j == i + 1) {
            return Err(i);
        }
        i = j;
    }
    Ok(())
}
