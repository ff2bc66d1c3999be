//! Lexicon files: one entry per line, `<lemma>,$<code>[+Hum] / <gloss> @<refs>`.
//!
//! Parsing never stops at the first bad line. Every problem becomes a
//! [`Diagnostic`] and the valid entries are still returned.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::classes::{ClassError, Registry};
use crate::generator;
use crate::morphotax::{self, InflectionalCode, MorphError, PatternMatch};
use crate::translit::{self, is_basic};

pub const SEED_LEXICON: &str = include_str!("../data/seed_lexicon.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagCode {
    Syntax,
    Translit,
    MalformedCode,
    UnknownLabel,
    Arity,
    NotDiacritized,
    Suffix,
    Ambiguous,
    UnknownClass,
    Render,
    Duplicate,
    RadicalPosition,
    LenientDiscard,
    LongVowelInRoot,
}

impl DiagCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagCode::Syntax => "SYNTAX",
            DiagCode::Translit => "TRANSLIT",
            DiagCode::MalformedCode => "MALFORMED_CODE",
            DiagCode::UnknownLabel => "UNKNOWN_LABEL",
            DiagCode::Arity => "ARITY",
            DiagCode::NotDiacritized => "NOT_DIACRITIZED",
            DiagCode::Suffix => "SUFFIX",
            DiagCode::Ambiguous => "AMBIGUOUS",
            DiagCode::UnknownClass => "UNKNOWN_CLASS",
            DiagCode::Render => "RENDER",
            DiagCode::Duplicate => "DUPLICATE",
            DiagCode::RadicalPosition => "RADICAL_POSITION",
            DiagCode::LenientDiscard => "LENIENT_DISCARD",
            DiagCode::LongVowelInRoot => "LONG_VOWEL_IN_ROOT",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            DiagCode::RadicalPosition | DiagCode::LenientDiscard | DiagCode::LongVowelInRoot => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

/// A located problem, printed as `line:col CODE message`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub code: DiagCode,
    pub message: String,
}

impl Diagnostic {
    pub fn is_error(&self) -> bool {
        self.code.severity() == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{} {} {}", self.line, self.col, self.code.as_str(), self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexicalEntry {
    pub lemma: String,
    pub code: InflectionalCode,
    pub gloss: String,
    pub source_ref: String,
    /// 1-based line in the source file; 0 for entries built in code.
    pub line: usize,
    /// Character column of the code field.
    pub code_col: usize,
}

impl LexicalEntry {
    pub fn new(lemma: &str, code: &str) -> Result<LexicalEntry, MorphError> {
        Ok(LexicalEntry {
            lemma: lemma.to_string(),
            code: morphotax::parse_code(code)?,
            gloss: String::new(),
            source_ref: String::new(),
            line: 0,
            code_col: 0,
        })
    }

    /// `lemma,$code` as used on the command line and in dictionary payloads.
    pub fn spec(&self) -> String {
        format!("{},{}", self.lemma, self.code)
    }

    pub fn refs(&self) -> impl Iterator<Item = &str> {
        self.source_ref.split(',').filter(|r| !r.is_empty())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LexiconFile {
    pub entries: Vec<LexicalEntry>,
}

fn morph_diag(e: &MorphError) -> DiagCode {
    match e {
        MorphError::MalformedCode(_) => DiagCode::MalformedCode,
        MorphError::UnknownBpLabel(_) => DiagCode::UnknownLabel,
        MorphError::ArityMismatch(_) | MorphError::IndexOutOfRange { .. } => DiagCode::Arity,
        MorphError::AmbiguousPatternMatch { .. } => DiagCode::Ambiguous,
        MorphError::NotFullyDiacritized { .. } => DiagCode::NotDiacritized,
        MorphError::SuffixMismatch { .. } => DiagCode::Suffix,
    }
}

/// Parses a lexicon, returning the well-formed entries and every diagnostic.
pub fn parse_lexicon(text: &str) -> (LexiconFile, Vec<Diagnostic>) {
    let mut entries = Vec::new();
    let mut diags = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let diag = |col: usize, code: DiagCode, message: String| Diagnostic { line, col, code, message };
        let Some((lemma_raw, rest)) = raw.split_once(',') else {
            diags.push(diag(1, DiagCode::Syntax, "expected `<lemma>,$<code>`".into()));
            continue;
        };
        let code_col = lemma_raw.chars().count() + 2;
        let (rest, source_ref) = match rest.rsplit_once(" @") {
            Some((r, s)) => (r, s.trim().to_string()),
            None => (rest, String::new()),
        };
        let (code_text, gloss) = match rest.split_once(" / ") {
            Some((c, g)) => (c.trim(), g.trim().to_string()),
            None => (rest.trim(), String::new()),
        };
        let lemma = match translit::normalize_to_bn(lemma_raw.trim()) {
            Ok(l) => l,
            Err(e) => {
                diags.push(diag(1, DiagCode::Translit, e.to_string()));
                continue;
            }
        };
        if lemma.is_empty() || !lemma.chars().all(translit::is_bn) {
            diags.push(diag(1, DiagCode::Syntax, format!("lemma {lemma:?} is not a BN word")));
            continue;
        }
        let code = match morphotax::parse_code(code_text) {
            Ok(c) => c,
            Err(e) => {
                diags.push(diag(code_col, morph_diag(&e), e.to_string()));
                continue;
            }
        };
        if !seen.insert((lemma.clone(), code.to_string())) {
            diags.push(diag(1, DiagCode::Duplicate, format!("duplicate entry {lemma},{code}")));
            continue;
        }
        entries.push(LexicalEntry { lemma, code, gloss, source_ref, line, code_col });
    }
    (LexiconFile { entries }, diags)
}

pub fn serialize_lexicon(file: &LexiconFile) -> String {
    let mut out = String::new();
    for e in &file.entries {
        out.push_str(&e.spec());
        if !e.gloss.is_empty() {
            out.push_str(" / ");
            out.push_str(&e.gloss);
        }
        if !e.source_ref.is_empty() {
            out.push_str(" @");
            out.push_str(&e.source_ref);
        }
        out.push('\n');
    }
    out
}

/// Positions (1-based) shifted so every radical should land on an odd index:
/// `G` carries no vowel of its own and a bare `C` carries two sounds.
fn virtual_index(lemma: &[char], pos: usize) -> usize {
    let shadda = lemma[..pos].iter().filter(|c| **c == 'G').count();
    let bare_madda = (0..pos).filter(|i| lemma[*i] == 'C' && lemma.get(i + 1).is_some_and(|n| is_basic(*n))).count();
    pos + 1 + bare_madda - shadda
}

/// Checks one entry against the registry.
pub fn validate_entry_with(e: &LexicalEntry, registry: &Registry) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let d = |col: usize, code: DiagCode, message: String| Diagnostic { line: e.line, col, code, message };
    let m: PatternMatch = match morphotax::match_pattern(&e.lemma, &e.code.sg_code, &e.code.class_tag) {
        Ok(m) => m,
        Err(err) => {
            let col = match &err {
                MorphError::NotFullyDiacritized { position, .. } => position + 1,
                _ => 1,
            };
            out.push(d(col, morph_diag(&err), err.to_string()));
            return out;
        }
    };
    if let Err(err) = registry.resolve_class(&e.code) {
        let code = match err {
            ClassError::UnknownClass { .. } => DiagCode::UnknownClass,
            _ => DiagCode::Render,
        };
        out.push(d(e.code_col, code, err.to_string()));
        return out;
    }
    if let Err(err) = generator::bp_stem_with(&e.lemma, &e.code, registry) {
        out.push(d(e.code_col, DiagCode::Render, err.to_string()));
        return out;
    }
    let chars: Vec<char> = e.lemma.chars().collect();
    for (k, pos) in m.positions.iter().enumerate() {
        if virtual_index(&chars, *pos).is_multiple_of(2) {
            out.push(d(pos + 1, DiagCode::RadicalPosition, format!("radical {} sits at an even position", k + 1)));
        }
    }
    if m.lenient {
        out.push(d(
            e.code_col,
            DiagCode::LenientDiscard,
            format!("long vowels dropped outside the vv positions of {}; consider an explicit vv code", e.code.sg_code),
        ));
    }
    for (k, r) in m.root.radicals.iter().enumerate().take(3) {
        if k > 0 && *r == morphotax::Radical::Letter('A') {
            out.push(d(
                m.positions[k] + 1,
                DiagCode::LongVowelInRoot,
                format!(
                    "long vowel A taken as radical {}; long vowels among the first three consonants belong to the pattern",
                    k + 1
                ),
            ));
        }
    }
    out
}

pub fn validate_entry(e: &LexicalEntry) -> Vec<Diagnostic> {
    validate_entry_with(e, Registry::builtin())
}

/// Parse diagnostics followed by per-entry validation, sorted by position.
pub fn validate_lexicon(text: &str) -> (LexiconFile, Vec<Diagnostic>) {
    let (file, mut diags) = parse_lexicon(text);
    for e in &file.entries {
        diags.extend(validate_entry(e));
    }
    diags.sort();
    (file, diags)
}

/// Keeps only entries without validation errors.
pub fn valid_entries(file: &LexiconFile) -> (Vec<LexicalEntry>, Vec<Diagnostic>) {
    let mut keep = Vec::new();
    let mut errors = Vec::new();
    for e in &file.entries {
        let diags: Vec<Diagnostic> = validate_entry(e).into_iter().filter(Diagnostic::is_error).collect();
        if diags.is_empty() {
            keep.push(e.clone());
        } else {
            errors.extend(diags);
        }
    }
    (keep, errors)
}

pub fn seed() -> LexiconFile {
    parse_lexicon(SEED_LEXICON).0
}

/// Entry counts per plural label and per singular-pattern code.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LexiconStats {
    pub entries: usize,
    pub per_label: BTreeMap<String, usize>,
    pub per_sg_code: BTreeMap<String, usize>,
    pub cells: BTreeMap<(String, String), usize>,
}

impl LexiconStats {
    pub fn most_populated_label(&self) -> Option<(&str, usize)> {
        self.per_label.iter().max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0))).map(|(k, v)| (k.as_str(), *v))
    }
}

impl fmt::Display for LexiconStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "entries\t{}", self.entries)?;
        let mut labels: Vec<_> = self.per_label.iter().collect();
        labels.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
        for (label, n) in labels {
            writeln!(f, "{label}\t{n}")?;
            for ((l, sg), m) in &self.cells {
                if l == label {
                    writeln!(f, "  {sg}\t{m}")?;
                }
            }
        }
        Ok(())
    }
}

pub fn lexicon_stats(file: &LexiconFile) -> LexiconStats {
    let mut s = LexiconStats { entries: file.entries.len(), ..Default::default() };
    for e in &file.entries {
        let label = e.code.bp_label.clone();
        let sg = e.code.sg_code.to_string();
        *s.per_label.entry(label.clone()).or_default() += 1;
        *s.per_sg_code.entry(sg.clone()).or_default() += 1;
        *s.cells.entry((label, sg)).or_default() += 1;
    }
    s
}
