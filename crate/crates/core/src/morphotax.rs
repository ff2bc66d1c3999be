//! Inflectional codes and surface roots.
//!
//! A code such as `$N3ap-f-FvEvL-FuEaL-123` carries a class tag, a gender
//! flag, a singular-pattern code, a broken-plural label and a root code. The
//! singular-pattern code is matched against the lemma to extract the surface
//! root, and the root code maps that root onto the plural root.

use std::fmt;

use thiserror::Error;

use crate::classes::{self, TagInfo};
use crate::translit::{self, is_basic, is_hamza};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphError {
    #[error("malformed code {0:?}")]
    MalformedCode(String),
    #[error("unknown broken-plural label {0:?}")]
    UnknownBpLabel(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("ambiguous pattern match for {lemma:?} against {code}: {candidates}")]
    AmbiguousPatternMatch { lemma: String, code: String, candidates: String },
    #[error("lemma {lemma:?} is not fully diacritized at position {position}")]
    NotFullyDiacritized { lemma: String, position: usize },
    #[error("lemma {lemma:?} does not end with suffix {suffix:?} required by tag {tag}")]
    SuffixMismatch { lemma: String, suffix: String, tag: String },
    #[error("root code index {index} out of range for root of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
}

/// A root letter. The glottal stop is kept abstract until rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Radical {
    Letter(char),
    Glottal,
}

impl Radical {
    pub fn from_letter(c: char) -> Radical {
        if is_hamza(c) {
            Radical::Glottal
        } else {
            Radical::Letter(c)
        }
    }
}

impl fmt::Display for Radical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radical::Letter(c) => write!(f, "{c}"),
            Radical::Glottal => f.write_str("ʔ"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SurfaceRoot {
    pub radicals: Vec<Radical>,
    /// Per radical: realized doubled by the pattern.
    pub geminate: Vec<bool>,
}

impl SurfaceRoot {
    pub fn new(radicals: Vec<Radical>) -> SurfaceRoot {
        let geminate = vec![false; radicals.len()];
        SurfaceRoot { radicals, geminate }
    }

    /// Builds a root from BN letters; hamza seats become the abstract glottal stop.
    pub fn from_letters(s: &str) -> SurfaceRoot {
        SurfaceRoot::new(s.chars().map(Radical::from_letter).collect())
    }

    pub fn len(&self) -> usize {
        self.radicals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radicals.is_empty()
    }
}

impl fmt::Display for SurfaceRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (r, g) in self.radicals.iter().zip(&self.geminate) {
            write!(f, "{r}")?;
            if *g {
                f.write_str("G")?;
            }
        }
        Ok(())
    }
}

const SLOT_LETTERS: [char; 6] = ['F', 'E', 'L', 'B', 'D', 'D'];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternToken {
    Slot { rank: u8, doubled: bool },
    ShortV,
    LongV,
}

/// Singular-pattern code: slot positions, pattern-owned long vowels and geminations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SingularPatternCode {
    text: String,
    slots: Vec<bool>,
    long_gaps: Vec<usize>,
}

impl SingularPatternCode {
    pub fn parse(raw: &str) -> Result<Self, MorphError> {
        let text: String = raw
            .chars()
            .map(|c| match c {
                'V' => 'v',
                'l' => 'L',
                'b' => 'B',
                'd' => 'D',
                other => other,
            })
            .collect();
        let bad = || MorphError::MalformedCode(raw.to_string());
        let chars: Vec<char> = text.chars().collect();
        let mut slots: Vec<bool> = Vec::new();
        let mut long_gaps = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c == 'v' {
                let mut n = 0;
                while i < chars.len() && chars[i] == 'v' {
                    n += 1;
                    i += 1;
                }
                if slots.is_empty() || n > 2 || i == chars.len() {
                    return Err(bad());
                }
                if n == 2 {
                    long_gaps.push(slots.len());
                }
                continue;
            }
            let rank = slots.len();
            if rank >= SLOT_LETTERS.len() || c != SLOT_LETTERS[rank] {
                return Err(bad());
            }
            let doubled = chars.get(i + 1) == Some(&c);
            slots.push(doubled);
            i += if doubled { 2 } else { 1 };
        }
        if slots.len() < 2 {
            return Err(bad());
        }
        Ok(SingularPatternCode { text, slots, long_gaps })
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    /// Whether slot `k` (0-based) is geminated by the pattern.
    pub fn doubled(&self, k: usize) -> bool {
        self.slots[k]
    }

    /// Gaps holding a pattern long vowel; gap `k` lies after slot `k` (1-based).
    pub fn long_gaps(&self) -> &[usize] {
        &self.long_gaps
    }

    pub fn tokens(&self) -> Vec<PatternToken> {
        let mut out = Vec::new();
        for (k, d) in self.slots.iter().enumerate() {
            if k > 0 {
                out.push(if self.long_gaps.contains(&k) { PatternToken::LongV } else { PatternToken::ShortV });
            }
            out.push(PatternToken::Slot { rank: k as u8 + 1, doubled: *d });
        }
        out
    }
}

impl fmt::Display for SingularPatternCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

pub const ROOT_LITERALS: [char; 6] = ['w', 'y', 'A', 'Y', 'h', 'm'];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RootToken {
    Copy(usize),
    Literal(char),
    GeminateFinal,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RootCode {
    text: String,
    tokens: Vec<RootToken>,
}

impl RootCode {
    pub fn parse(raw: &str) -> Result<Self, MorphError> {
        let text: String = raw.chars().map(|c| if c == 'I' || c == 'l' { '1' } else { c }).collect();
        let bad = || MorphError::MalformedCode(raw.to_string());
        let mut tokens = Vec::new();
        let chars: Vec<char> = text.chars().collect();
        for (i, c) in chars.iter().enumerate() {
            let tok = match c {
                '1'..='9' => RootToken::Copy(c.to_digit(10).unwrap() as usize),
                'G' if i == chars.len() - 1 && i > 0 => RootToken::GeminateFinal,
                c if ROOT_LITERALS.contains(c) => RootToken::Literal(*c),
                _ => return Err(bad()),
            };
            tokens.push(tok);
        }
        if tokens.len() < 2 {
            return Err(bad());
        }
        Ok(RootCode { text, tokens })
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn tokens(&self) -> &[RootToken] {
        &self.tokens
    }

    /// Number of output radicals.
    pub fn output_arity(&self) -> usize {
        self.tokens.iter().filter(|t| **t != RootToken::GeminateFinal).count()
    }

    pub fn max_copy(&self) -> usize {
        self.tokens.iter().filter_map(|t| if let RootToken::Copy(k) = t { Some(*k) } else { None }).max().unwrap_or(0)
    }

    pub fn identity(n: usize) -> RootCode {
        let text: String = (1..=n).map(|k| char::from_digit(k as u32, 10).unwrap()).collect();
        RootCode::parse(&text).expect("identity code is valid")
    }
}

impl fmt::Display for RootCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenderFlag {
    Masculine,
    Feminine,
    Inflecting,
}

impl GenderFlag {
    pub fn letter(self) -> char {
        match self {
            GenderFlag::Masculine => 'm',
            GenderFlag::Feminine => 'f',
            GenderFlag::Inflecting => 'g',
        }
    }
}

/// Class tag such as `N3ap`: arity digit plus the singular suffix key.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassTag {
    pub arity: usize,
    pub key: String,
}

impl ClassTag {
    pub fn parse(raw: &str) -> Result<Self, MorphError> {
        let bad = || MorphError::MalformedCode(raw.to_string());
        let rest = raw.strip_prefix('N').ok_or_else(bad)?;
        let mut chars = rest.chars();
        let arity = chars.next().and_then(|c| c.to_digit(10)).ok_or_else(bad)? as usize;
        let key = chars.as_str().to_string();
        if classes::tag_info(&key).is_none() {
            return Err(bad());
        }
        Ok(ClassTag { arity, key })
    }

    pub fn info(&self) -> &'static TagInfo {
        classes::tag_info(&self.key).expect("tag validated at parse time")
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N{}{}", self.arity, self.key)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InflectionalCode {
    pub class_tag: ClassTag,
    pub gender: GenderFlag,
    pub sg_code: SingularPatternCode,
    pub bp_label: String,
    pub root_code: RootCode,
    pub human: bool,
}

impl InflectionalCode {
    /// Registry key `sg-bp-root`.
    pub fn class_key(&self) -> String {
        format!("{}-{}-{}", self.sg_code, self.bp_label, self.root_code)
    }
}

impl fmt::Display for InflectionalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "${}-{}-{}-{}-{}{}",
            self.class_tag,
            self.gender.letter(),
            self.sg_code,
            self.bp_label,
            self.root_code,
            if self.human { "+Hum" } else { "" }
        )
    }
}

pub fn parse_code(text: &str) -> Result<InflectionalCode, MorphError> {
    let trimmed = text.trim();
    let body = trimmed.strip_prefix('$').unwrap_or(trimmed);
    let (body, human) = match body.strip_suffix("+Hum") {
        Some(b) => (b, true),
        None => (body, false),
    };
    let parts: Vec<&str> = body.split('-').collect();
    let [tag, gender, sg, bp, root] = parts.as_slice() else {
        return Err(MorphError::MalformedCode(text.to_string()));
    };
    let class_tag = ClassTag::parse(tag)?;
    let gender = match *gender {
        "m" => GenderFlag::Masculine,
        "f" => GenderFlag::Feminine,
        "g" => GenderFlag::Inflecting,
        _ => return Err(MorphError::MalformedCode(text.to_string())),
    };
    let sg_code = SingularPatternCode::parse(sg)?;
    let bp_label = classes::canonical_label(bp).ok_or_else(|| MorphError::UnknownBpLabel(bp.to_string()))?;
    let root_code = RootCode::parse(root)?;
    if class_tag.arity != sg_code.slot_count() {
        return Err(MorphError::ArityMismatch(format!(
            "tag {class_tag} declares {} radicals but {sg_code} has {} slots",
            class_tag.arity,
            sg_code.slot_count()
        )));
    }
    if root_code.max_copy() > sg_code.slot_count() {
        return Err(MorphError::ArityMismatch(format!(
            "root code {root_code} copies radical {} of a {}-radical singular",
            root_code.max_copy(),
            sg_code.slot_count()
        )));
    }
    Ok(InflectionalCode { class_tag, gender, sg_code, bp_label: bp_label.to_string(), root_code, human })
}

/// Result of matching a singular-pattern code against a lemma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternMatch {
    pub root: SurfaceRoot,
    /// Char index in the lemma of the letter filling each slot.
    pub positions: Vec<usize>,
    /// The long vowels dropped did not sit exactly where the code puts `vv`.
    pub lenient: bool,
}

#[derive(Debug, Clone, Copy)]
struct Unit {
    letter: char,
    gem: bool,
    vowel: Option<char>,
    pos: usize,
}

#[derive(Debug, Clone, Copy)]
struct Position {
    letter: char,
    gem: bool,
    prev_vowel: Option<char>,
    vowel: Option<char>,
    pos: usize,
}

impl Position {
    fn long_vowel_candidate(&self) -> bool {
        let silent = matches!(self.vowel, None | Some('o'));
        match self.letter {
            'A' => true,
            'y' => !self.gem && silent && self.prev_vowel == Some('i'),
            'w' => !self.gem && silent && self.prev_vowel == Some('u'),
            _ => false,
        }
    }
}

fn units(stem: &str) -> Vec<Unit> {
    let mut out: Vec<Unit> = Vec::new();
    for (pos, c) in stem.chars().enumerate() {
        if is_basic(c) {
            out.push(Unit { letter: c, gem: false, vowel: None, pos });
        } else if let Some(u) = out.last_mut() {
            if c == 'G' {
                u.gem = true;
            } else {
                u.vowel = Some(c);
            }
        }
    }
    out
}

fn expansions(units: &[Unit]) -> Vec<Vec<Position>> {
    let gem_idx: Vec<usize> = (0..units.len()).filter(|i| units[*i].gem).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << gem_idx.len()) {
        let mut seq: Vec<Position> = Vec::new();
        for (i, u) in units.iter().enumerate() {
            let prev_vowel = seq.last().and_then(|p| p.vowel);
            let split = gem_idx.iter().position(|g| *g == i).is_some_and(|b| mask & (1 << b) != 0);
            if split {
                seq.push(Position { letter: u.letter, gem: false, prev_vowel, vowel: Some('o'), pos: u.pos });
                seq.push(Position { letter: u.letter, gem: false, prev_vowel: Some('o'), vowel: u.vowel, pos: u.pos });
            } else {
                seq.push(Position { letter: u.letter, gem: u.gem, prev_vowel, vowel: u.vowel, pos: u.pos });
            }
        }
        out.push(seq);
    }
    out
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, first) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, *first);
            out.push(rest);
        }
    }
    out
}

/// Strips the tag's suffix and checks the full-diacritization convention.
pub fn singular_stem<'a>(lemma: &'a str, tag: &ClassTag) -> Result<&'a str, MorphError> {
    if let Err(position) = translit::check_full_diacritization(lemma) {
        return Err(MorphError::NotFullyDiacritized { lemma: lemma.to_string(), position });
    }
    let info = tag.info();
    lemma.strip_suffix(info.strip.as_str()).filter(|s| !s.is_empty()).ok_or_else(|| MorphError::SuffixMismatch {
        lemma: lemma.to_string(),
        suffix: info.strip.clone(),
        tag: tag.to_string(),
    })
}

/// Matches the singular-pattern code against the lemma.
pub fn match_pattern(lemma: &str, sg_code: &SingularPatternCode, tag: &ClassTag) -> Result<PatternMatch, MorphError> {
    let stem = singular_stem(lemma, tag)?;
    let n_slots = sg_code.slot_count();
    let mut strict: Vec<PatternMatch> = Vec::new();
    let mut lenient: Vec<PatternMatch> = Vec::new();
    for seq in expansions(&units(stem)) {
        if seq.len() < n_slots {
            continue;
        }
        let candidates: Vec<usize> = (1..seq.len()).filter(|i| seq[*i].long_vowel_candidate()).collect();
        for discard in combinations(&candidates, seq.len() - n_slots) {
            let kept: Vec<&Position> = seq.iter().enumerate().filter(|(i, _)| !discard.contains(i)).map(|(_, p)| p).collect();
            if kept.iter().enumerate().any(|(k, p)| p.gem != sg_code.doubled(k)) {
                continue;
            }
            let mut gaps: Vec<usize> = discard.iter().map(|d| (0..*d).filter(|i| !discard.contains(i)).count()).collect();
            gaps.sort_unstable();
            let m = PatternMatch {
                root: SurfaceRoot {
                    radicals: kept.iter().map(|p| Radical::from_letter(p.letter)).collect(),
                    geminate: kept.iter().map(|p| p.gem).collect(),
                },
                positions: kept.iter().map(|p| p.pos).collect(),
                lenient: gaps != sg_code.long_gaps(),
            };
            let bucket = if m.lenient { &mut lenient } else { &mut strict };
            if !bucket.iter().any(|b| b.root == m.root) {
                bucket.push(m);
            }
        }
    }
    let pool = if strict.is_empty() { lenient } else { strict };
    match pool.len() {
        1 => Ok(pool.into_iter().next().unwrap()),
        0 => Err(MorphError::ArityMismatch(format!("{lemma:?} cannot fill the {n_slots} slots of {sg_code}"))),
        _ => Err(MorphError::AmbiguousPatternMatch {
            lemma: lemma.to_string(),
            code: sg_code.to_string(),
            candidates: pool.iter().map(|m| m.root.to_string()).collect::<Vec<_>>().join(", "),
        }),
    }
}

pub fn extract_root(lemma: &str, sg_code: &SingularPatternCode, tag: &ClassTag) -> Result<SurfaceRoot, MorphError> {
    match_pattern(lemma, sg_code, tag).map(|m| m.root)
}

pub fn apply_root_code(root: &SurfaceRoot, code: &RootCode) -> Result<SurfaceRoot, MorphError> {
    let mut out = SurfaceRoot::new(Vec::new());
    for tok in code.tokens() {
        match *tok {
            RootToken::Copy(k) => {
                let r = *root.radicals.get(k.wrapping_sub(1)).ok_or(MorphError::IndexOutOfRange { index: k, len: root.len() })?;
                out.radicals.push(r);
                out.geminate.push(false);
            }
            RootToken::Literal('h') => {
                out.radicals.push(Radical::Glottal);
                out.geminate.push(false);
            }
            RootToken::Literal(c) => {
                out.radicals.push(Radical::Letter(c));
                out.geminate.push(false);
            }
            RootToken::GeminateFinal => {
                if let Some(g) = out.geminate.last_mut() {
                    *g = true;
                }
            }
        }
    }
    Ok(out)
}
