//! Clitic segmentation, plural agreement, concordance and text coverage.
//!
//! A token is read as `CONJC? PREP? (DET | ε) N PRO?`. The noun must be a
//! dictionary form; the clitics come from a closed inventory. Definite
//! dictionary forms carry their article, so a DET segment is looked up
//! together with the noun that follows it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::formdict::{diacritic_subsequence, Analysis, FormDictionary, LookupMode};
use crate::generator::{Case, Definiteness, FeatureBundle, Gender, Number};
use crate::translit::{is_bn, is_diacritic};

pub const CLITICS: &str = include_str!("../data/clitics.tsv");
pub const AGREEMENT_EXCEPTIONS: &str = include_str!("../data/agreement_exceptions.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SegmentError {
    #[error("line {line}: {message}")]
    BadInventory { line: usize, message: String },
    #[error("bad feature mask '{0}'")]
    BadMask(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SegTag {
    Conjc,
    Prep,
    Det,
    N,
    ProGen,
}

impl fmt::Display for SegTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SegTag::Conjc => "CONJC",
            SegTag::Prep => "PREP",
            SegTag::Det => "DET",
            SegTag::N => "N",
            SegTag::ProGen => "PRO+Gen",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliticInventory {
    pub conjunctions: Vec<String>,
    pub prepositions: Vec<String>,
    pub determiner: String,
    pub pronouns: Vec<String>,
}

impl CliticInventory {
    pub fn parse(text: &str) -> Result<CliticInventory, SegmentError> {
        let mut inv = CliticInventory { conjunctions: vec![], prepositions: vec![], determiner: String::new(), pronouns: vec![] };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |message: &str| SegmentError::BadInventory { line: i + 1, message: message.to_string() };
            let (tag, form) = line.split_once('\t').ok_or_else(|| bad("expected 'TAG<TAB>form'"))?;
            let form = form.trim().to_string();
            if form.is_empty() || !form.chars().all(is_bn) {
                return Err(bad("clitic form must be non-empty BN"));
            }
            match tag {
                "CONJC" => inv.conjunctions.push(form),
                "PREP" => inv.prepositions.push(form),
                "DET" if inv.determiner.is_empty() => inv.determiner = form,
                "DET" => return Err(bad("only one determiner is supported")),
                "PRO" => inv.pronouns.push(form),
                other => return Err(bad(&format!("unknown tag {other}"))),
            }
        }
        if inv.determiner.is_empty() {
            return Err(SegmentError::BadInventory { line: 0, message: "no determiner".into() });
        }
        Ok(inv)
    }

    pub fn builtin() -> CliticInventory {
        CliticInventory::parse(CLITICS).expect("bundled clitic inventory parses")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    pub surface: String,
    pub tag: SegTag,
    /// Present on the noun segment only.
    pub analysis: Option<Analysis>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Reading {
    pub segments: Vec<Segment>,
}

impl Reading {
    pub fn noun(&self) -> &Analysis {
        self.segments.iter().find_map(|s| s.analysis.as_ref()).expect("every reading has a noun")
    }

    pub fn has(&self, tag: SegTag) -> bool {
        self.segments.iter().any(|s| s.tag == tag)
    }

    pub fn surface(&self) -> String {
        self.segments.iter().map(|s| s.surface.as_str()).collect()
    }

    /// `seg/TAG+seg/TAG...`
    pub fn segmentation(&self) -> String {
        self.segments.iter().map(|s| format!("{}/{}", s.surface, s.tag)).collect::<Vec<_>>().join("+")
    }

    /// Checks the morpheme-combination constraints on this reading alone.
    pub fn satisfies_constraints(&self) -> bool {
        let f = self.noun().features;
        let det = self.has(SegTag::Det);
        let pro = self.has(SegTag::ProGen);
        (!self.has(SegTag::Prep) || f.case == Case::Genitive)
            && (pro == f.pro)
            && (!pro || f.definiteness == Definiteness::Construct)
            && (det == (f.definiteness == Definiteness::Definite))
            && !(det && pro)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SegmentLattice {
    pub token: String,
    pub readings: Vec<Reading>,
}

impl SegmentLattice {
    pub fn is_empty(&self) -> bool {
        self.readings.is_empty()
    }

    /// Analysis lines: `token TAB segmentation TAB lemma,code TAB features`.
    pub fn lines(&self) -> Vec<String> {
        self.readings
            .iter()
            .map(|r| {
                let a = r.noun();
                format!("{}\t{}\t{},{}\t{}", self.token, r.segmentation(), a.lemma, a.code, a.features)
            })
            .collect()
    }
}

/// Token prefix lengths that can realize `clitic`.
fn clitic_prefixes(token: &[u8], clitic: &str, mode: LookupMode) -> Vec<usize> {
    let c = clitic.as_bytes();
    match mode {
        LookupMode::Strict => token.starts_with(c).then_some(c.len()).into_iter().collect(),
        LookupMode::Optional => (1..=c.len().min(token.len())).filter(|l| diacritic_subsequence(&token[..*l], c)).collect(),
    }
}

/// Token suffix lengths that can realize `clitic`.
fn clitic_suffixes(token: &[u8], clitic: &str, mode: LookupMode) -> Vec<usize> {
    let c = clitic.as_bytes();
    match mode {
        LookupMode::Strict => token.ends_with(c).then_some(c.len()).into_iter().collect(),
        LookupMode::Optional => {
            (1..=c.len().min(token.len())).filter(|l| diacritic_subsequence(&token[token.len() - l..], c)).collect()
        }
    }
}

pub struct Segmenter<'d> {
    dict: &'d FormDictionary,
    clitics: CliticInventory,
    mode: LookupMode,
}

impl<'d> Segmenter<'d> {
    pub fn new(dict: &'d FormDictionary, mode: LookupMode) -> Segmenter<'d> {
        Segmenter::with_clitics(dict, CliticInventory::builtin(), mode)
    }

    pub fn with_clitics(dict: &'d FormDictionary, clitics: CliticInventory, mode: LookupMode) -> Segmenter<'d> {
        Segmenter { dict, clitics, mode }
    }

    pub fn mode(&self) -> LookupMode {
        self.mode
    }

    pub fn dict(&self) -> &FormDictionary {
        self.dict
    }

    /// Options for an optional prefix clitic: `(length, form)` with `(0, None)` for absence.
    fn prefix_options<'a>(&self, rest: &[u8], forms: &'a [String]) -> Vec<(usize, Option<&'a str>)> {
        let mut out = vec![(0, None)];
        for f in forms {
            out.extend(clitic_prefixes(rest, f, self.mode).into_iter().map(|l| (l, Some(f.as_str()))));
        }
        out
    }

    pub fn segment(&self, token: &str) -> SegmentLattice {
        let t = token.as_bytes();
        let mut readings = BTreeSet::new();
        let det = std::slice::from_ref(&self.clitics.determiner);
        for (c_len, conj) in self.prefix_options(t, &self.clitics.conjunctions) {
            let after_c = &t[c_len..];
            for (p_len, prep) in self.prefix_options(after_c, &self.clitics.prepositions) {
                let after_p = &after_c[p_len..];
                for (d_len, article) in self.prefix_options(after_p, det) {
                    let start = c_len + p_len;
                    let mut pro_options = vec![(0usize, false)];
                    for f in &self.clitics.pronouns {
                        pro_options.extend(clitic_suffixes(&after_p[d_len..], f, self.mode).into_iter().map(|l| (l, true)));
                    }
                    for (r_len, pro) in pro_options {
                        let end = t.len() - r_len;
                        if end <= start + d_len {
                            continue;
                        }
                        // the article is part of the dictionary form
                        let Ok(query) = std::str::from_utf8(&t[start..end]) else { continue };
                        for a in self.dict.lookup(query, self.mode) {
                            let mut segs = Vec::new();
                            let mut push = |from: usize, to: usize, tag: SegTag, analysis: Option<Analysis>| {
                                segs.push(Segment { surface: token[from..to].to_string(), tag, analysis });
                            };
                            if conj.is_some() {
                                push(0, c_len, SegTag::Conjc, None);
                            }
                            if prep.is_some() {
                                push(c_len, start, SegTag::Prep, None);
                            }
                            if article.is_some() {
                                push(start, start + d_len, SegTag::Det, None);
                            }
                            push(start + d_len, end, SegTag::N, Some(a));
                            if pro {
                                push(end, t.len(), SegTag::ProGen, None);
                            }
                            let reading = Reading { segments: segs };
                            let article_matches =
                                article.is_none() || reading.noun().surface.starts_with(self.clitics.determiner.as_str());
                            if article_matches && reading.satisfies_constraints() {
                                readings.insert(reading);
                            }
                        }
                    }
                }
            }
        }
        SegmentLattice { token: token.to_string(), readings: readings.into_iter().collect() }
    }
}

/// Splits text into maximal runs of BN characters, with byte offsets.
pub fn tokenize(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (is_bn(c), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, &text[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &text[s..]));
    }
    out
}

// ---------------------------------------------------------------- agreement

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Adjectival,
    /// A verb following its subject.
    VerbalPostSubject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgreementHead {
    pub features: FeatureBundle,
    pub human: bool,
    /// Listed as a non-human noun whose broken plural accepts plural agreement.
    pub plural_exception: bool,
}

/// Lemmas from the exception list, one per line.
pub fn parse_exceptions(text: &str) -> BTreeSet<String> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(str::to_string).collect()
}

pub fn builtin_exceptions() -> BTreeSet<String> {
    parse_exceptions(AGREEMENT_EXCEPTIONS)
}

fn is_plural(n: Number) -> bool {
    matches!(n, Number::Plural | Number::BrokenPlural)
}

fn gender_matches(head: Gender, dep: Gender) -> bool {
    head == dep || head == Gender::None || dep == Gender::None
}

/// Whether a dependent adjective, participle or verb may agree with a noun head.
///
/// Only gender and number take part. Verbs after their subject follow the
/// same table as adjectives.
pub fn check_agreement(head: &AgreementHead, dep: &FeatureBundle, relation: Relation) -> bool {
    let _ = relation;
    let h = &head.features;
    let fs = dep.gender == Gender::Feminine && dep.number == Number::Singular;
    match (h.number, head.human) {
        (Number::BrokenPlural, true) => fs || is_plural(dep.number),
        (Number::Plural, true) => is_plural(dep.number) && gender_matches(h.gender, dep.gender),
        (Number::BrokenPlural, false) => fs || (head.plural_exception && is_plural(dep.number)),
        (Number::Plural, false) => fs || (is_plural(dep.number) && gender_matches(h.gender, dep.gender)),
        (Number::Singular | Number::Dual, _) => dep.number == h.number && gender_matches(h.gender, dep.gender),
    }
}

// ---------------------------------------------------------------- concordance

/// A lexical mask such as `N:q` or `N:ms:fs`: the noun category followed by
/// alternatives, each a set of feature letters that must all be present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureMask {
    alternatives: Vec<(BTreeSet<char>, bool)>,
}

impl FeatureMask {
    pub fn parse(text: &str) -> Result<FeatureMask, SegmentError> {
        let bad = || SegmentError::BadMask(text.to_string());
        let inner = text.trim().trim_start_matches('<').trim_end_matches('>');
        let mut parts = inner.split(':');
        if parts.next() != Some("N") {
            return Err(bad());
        }
        let mut alternatives = Vec::new();
        for alt in parts {
            let (letters, pro) = match alt.strip_suffix("+pro") {
                Some(l) => (l, true),
                None => (alt, false),
            };
            if letters.is_empty() && !pro {
                return Err(bad());
            }
            let set: BTreeSet<char> = letters.chars().collect();
            if !set.iter().all(|c| "mfsdpqDiaNAG".contains(*c)) {
                return Err(bad());
            }
            alternatives.push((set, pro));
        }
        Ok(FeatureMask { alternatives })
    }

    pub fn matches(&self, f: &FeatureBundle) -> bool {
        if self.alternatives.is_empty() {
            return true;
        }
        let mut letters: BTreeSet<char> = [f.number.letter(), f.definiteness.letter(), f.case.letter()].into_iter().collect();
        letters.extend(f.gender.letter());
        self.alternatives.iter().any(|(need, pro)| need.is_subset(&letters) && (!pro || f.pro))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcordanceLine {
    pub offset: usize,
    pub left: String,
    pub matched: String,
    pub right: String,
}

pub const CONTEXT_WIDTH: usize = 30;

impl fmt::Display for ConcordanceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:>w$}  {}  {}", self.left, self.matched, self.right, w = CONTEXT_WIDTH)
    }
}

fn flatten(s: &str) -> String {
    s.chars().map(|c| if c.is_whitespace() { ' ' } else { c }).collect()
}

pub fn concordance(text: &str, segmenter: &Segmenter<'_>, mask: &FeatureMask) -> Vec<ConcordanceLine> {
    let mut out = Vec::new();
    for (offset, token) in tokenize(text) {
        let lattice = segmenter.segment(token);
        if !lattice.readings.iter().any(|r| mask.matches(&r.noun().features)) {
            continue;
        }
        let before = flatten(&text[..offset]).trim_end().to_string();
        let after = flatten(&text[offset + token.len()..]).trim_start().to_string();
        let left: String = {
            let chars: Vec<char> = before.chars().collect();
            chars[chars.len().saturating_sub(CONTEXT_WIDTH)..].iter().collect()
        };
        let right: String = after.chars().take(CONTEXT_WIDTH).collect::<String>().trim_end().to_string();
        out.push(ConcordanceLine { offset, left, matched: token.to_string(), right });
    }
    out
}

// ---------------------------------------------------------------- coverage

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Coverage {
    pub tokens: usize,
    pub covered_tokens: usize,
    /// Distinct lemmas recognized in the text.
    pub lemmas: BTreeSet<String>,
    /// Unrecognized word types with their token counts.
    pub uncovered: BTreeMap<String, usize>,
}

impl Coverage {
    pub fn token_ratio(&self) -> f64 {
        if self.tokens == 0 {
            0.0
        } else {
            self.covered_tokens as f64 / self.tokens as f64
        }
    }

    /// Each unknown word type counts as one unknown lemma.
    pub fn lemma_counts(&self) -> (usize, usize) {
        (self.lemmas.len(), self.lemmas.len() + self.uncovered.len())
    }

    pub fn lemma_ratio(&self) -> f64 {
        let (k, n) = self.lemma_counts();
        if n == 0 {
            0.0
        } else {
            k as f64 / n as f64
        }
    }
}

impl fmt::Display for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (k, n) = self.lemma_counts();
        writeln!(f, "tokens covered\t{}/{}\t{:.1}%", self.covered_tokens, self.tokens, 100.0 * self.token_ratio())?;
        writeln!(
            f,
            "tokens uncovered\t{}/{}\t{:.1}%",
            self.tokens - self.covered_tokens,
            self.tokens,
            100.0 * (1.0 - self.token_ratio())
        )?;
        writeln!(f, "lemmas covered\t{k}/{n}\t{:.1}%", 100.0 * self.lemma_ratio())?;
        writeln!(f, "lemmas uncovered\t{}/{n}\t{:.1}%", n - k, if n == 0 { 0.0 } else { 100.0 * (n - k) as f64 / n as f64 })?;
        for (w, c) in &self.uncovered {
            writeln!(f, "uncovered\t{w}\t{c}")?;
        }
        Ok(())
    }
}

pub fn coverage(text: &str, segmenter: &Segmenter<'_>) -> Coverage {
    let mut cov = Coverage::default();
    for (_, token) in tokenize(text) {
        if token.chars().all(is_diacritic) {
            continue;
        }
        cov.tokens += 1;
        let lattice = segmenter.segment(token);
        if lattice.is_empty() {
            *cov.uncovered.entry(token.to_string()).or_default() += 1;
        } else {
            cov.covered_tokens += 1;
            cov.lemmas.extend(lattice.readings.iter().map(|r| r.noun().lemma.clone()));
        }
    }
    cov
}
