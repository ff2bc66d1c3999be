//! Paradigm generation.
//!
//! An entry yields singular, dual and broken-plural stems, each crossed with
//! three definiteness values and three cases. Gender-inflecting entries get a
//! feminine singular and dual built on `stem + ap`. Every construct cell also
//! has a pro-compatible variant, the spelling used before an attached pronoun.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::classes::{self, ClassError, InflectionClass, Paradigm, Registry, RenderedStem};
use crate::morphotax::{self, GenderFlag, InflectionalCode, MorphError, SurfaceRoot};
use crate::translit::{is_basic, is_hamza};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error(transparent)]
    Morph(#[from] MorphError),
    #[error(transparent)]
    Class(#[from] ClassError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gender {
    Masculine,
    Feminine,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Number {
    Singular,
    Dual,
    /// Suffixal plural.
    Plural,
    /// Broken plural.
    BrokenPlural,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Definiteness {
    Definite,
    Indefinite,
    Construct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Case {
    Nominative,
    Accusative,
    Genitive,
}

impl Gender {
    pub fn letter(self) -> Option<char> {
        match self {
            Gender::Masculine => Some('m'),
            Gender::Feminine => Some('f'),
            Gender::None => None,
        }
    }
}

impl Number {
    pub fn letter(self) -> char {
        match self {
            Number::Singular => 's',
            Number::Dual => 'd',
            Number::Plural => 'p',
            Number::BrokenPlural => 'q',
        }
    }
}

impl Definiteness {
    pub const ALL: [Definiteness; 3] = [Definiteness::Definite, Definiteness::Indefinite, Definiteness::Construct];

    pub fn letter(self) -> char {
        match self {
            Definiteness::Definite => 'D',
            Definiteness::Indefinite => 'i',
            Definiteness::Construct => 'a',
        }
    }
}

impl Case {
    pub const ALL: [Case; 3] = [Case::Nominative, Case::Accusative, Case::Genitive];

    pub fn letter(self) -> char {
        match self {
            Case::Nominative => 'N',
            Case::Accusative => 'A',
            Case::Genitive => 'G',
        }
    }

    fn vowel(self) -> char {
        match self {
            Case::Nominative => 'u',
            Case::Accusative => 'a',
            Case::Genitive => 'i',
        }
    }
}

/// Morpho-syntactic features of one form, written like `fs:DG` or `q:aN+pro`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureBundle {
    pub gender: Gender,
    pub number: Number,
    pub definiteness: Definiteness,
    pub case: Case,
    pub pro: bool,
}

impl FeatureBundle {
    /// Broken plurals are genderless and only construct forms take pronouns.
    pub fn is_valid(&self) -> bool {
        (self.number != Number::BrokenPlural || self.gender == Gender::None)
            && (!self.pro || self.definiteness == Definiteness::Construct)
    }
}

impl fmt::Display for FeatureBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(g) = self.gender.letter() {
            write!(f, "{g}")?;
        }
        write!(f, "{}:{}{}", self.number.letter(), self.definiteness.letter(), self.case.letter())?;
        if self.pro {
            f.write_str("+pro")?;
        }
        Ok(())
    }
}

impl FromStr for FeatureBundle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("bad feature bundle {s:?}");
        let (head, pro) = match s.strip_suffix("+pro") {
            Some(h) => (h, true),
            None => (s, false),
        };
        let (gn, dc) = head.split_once(':').ok_or_else(bad)?;
        let gn: Vec<char> = gn.chars().collect();
        let (gender, number) = match gn.as_slice() {
            [n] => (Gender::None, *n),
            ['m', n] => (Gender::Masculine, *n),
            ['f', n] => (Gender::Feminine, *n),
            _ => return Err(bad()),
        };
        let number = match number {
            's' => Number::Singular,
            'd' => Number::Dual,
            'p' => Number::Plural,
            'q' => Number::BrokenPlural,
            _ => return Err(bad()),
        };
        let dc: Vec<char> = dc.chars().collect();
        let [d, c] = dc.as_slice() else { return Err(bad()) };
        let definiteness = Definiteness::ALL.into_iter().find(|x| x.letter() == *d).ok_or_else(bad)?;
        let case = Case::ALL.into_iter().find(|x| x.letter() == *c).ok_or_else(bad)?;
        let fb = FeatureBundle { gender, number, definiteness, case, pro };
        if fb.is_valid() {
            Ok(fb)
        } else {
            Err(bad())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InflectedForm {
    pub surface: String,
    pub features: FeatureBundle,
}

/// Surface of one cell of a suffix paradigm. `stem` is the stem to inflect and
/// `tail_len` the number of trailing characters dropped by defective cells.
pub fn suffix_cell(stem: &str, tail_len: usize, paradigm: Paradigm, def: Definiteness, case: Case) -> String {
    let body = cell_body(stem, tail_len, paradigm, def, case);
    if def == Definiteness::Definite {
        format!("Al{body}")
    } else {
        body
    }
}

fn drop_chars(s: &str, n: usize) -> &str {
    let keep = s.chars().count().saturating_sub(n);
    let end = s.char_indices().nth(keep).map_or(s.len(), |(b, _)| b);
    &s[..end]
}

fn cell_body(stem: &str, tail_len: usize, paradigm: Paradigm, def: Definiteness, case: Case) -> String {
    use Case::*;
    let indefinite = def == Definiteness::Indefinite;
    match paradigm {
        Paradigm::InvariableAy => stem.to_string(),
        Paradigm::Triptote | Paradigm::ApFinal => {
            if !indefinite {
                return format!("{stem}{}", case.vowel());
            }
            match case {
                Nominative => format!("{stem}N"),
                Genitive => format!("{stem}K"),
                Accusative if stem.ends_with('p') || stem.ends_with("aAoc") => format!("{stem}F"),
                Accusative => format!("{stem}FA"),
            }
        }
        Paradigm::Diptote => match (indefinite, case) {
            (true, Genitive) => format!("{stem}a"),
            _ => format!("{stem}{}", case.vowel()),
        },
        Paradigm::DefectiveIy => match (indefinite, case) {
            (true, Accusative) => format!("{stem}FA"),
            (true, _) => format!("{}K", drop_chars(stem, 2)),
            (false, Accusative) => format!("{stem}a"),
            (false, _) => stem.to_string(),
        },
        Paradigm::DefectiveIyDiptote => match (indefinite, case) {
            (true, Accusative) => format!("{stem}a"),
            (true, _) => format!("{}K", drop_chars(stem, tail_len)),
            (false, Accusative) => format!("{stem}a"),
            (false, _) => stem.to_string(),
        },
    }
}

/// Dual stem: `p` becomes `t`, `Y` becomes `y`.
pub fn dual_stem(stem: &str) -> String {
    if let Some(s) = stem.strip_suffix('p') {
        format!("{s}t")
    } else if let Some(s) = stem.strip_suffix('Y') {
        format!("{s}y")
    } else {
        stem.to_string()
    }
}

/// Dual cell: `aAoni` in the nominative, `ayoni` otherwise; construct drops `ni`.
/// A stem-final hamza is re-seated before the suffix.
pub fn dual_cell(stem: &str, def: Definiteness, case: Case) -> String {
    let base = dual_stem(stem);
    let suffix = match (def, case) {
        (Definiteness::Construct, Case::Nominative) => "aA",
        (Definiteness::Construct, _) => "ayo",
        (_, Case::Nominative) => "aAoni",
        _ => "ayoni",
    };
    let prefix = if def == Definiteness::Definite { "Al" } else { "" };
    let mut chars: Vec<char> = format!("{prefix}{base}{suffix}").chars().collect();
    // a stem-final hamza is now word-internal
    let last = prefix.len() + base.chars().count() - 1;
    if base.chars().last().is_some_and(is_hamza) {
        chars[last] = classes::seat_hamza(&chars, last);
    }
    classes::substitute_madda(&chars.iter().collect::<String>())
}

/// Spelling of a construct form before an attached pronoun: final `p` becomes
/// `t`, final `Y` becomes `A`, and a word-final hamza is re-seated as medial.
pub fn pro_variant(construct: &str) -> String {
    let mut chars: Vec<char> = construct.chars().collect();
    let n = chars.len();
    // final p or Y followed by at most the case vowel
    for back in [1usize, 2] {
        if n >= back {
            let i = n - back;
            let after_ok = chars[i + 1..].iter().all(|c| matches!(c, 'u' | 'a' | 'i'));
            if after_ok && chars[i] == 'p' {
                chars[i] = 't';
            } else if after_ok && chars[i] == 'Y' && back == 1 {
                chars[i] = 'A';
            }
        }
    }
    if let Some(i) = chars.iter().rposition(|c| is_basic(*c)) {
        if is_hamza(chars[i]) && i + 1 < n {
            chars[i] = classes::seat_hamza(&chars, i);
        }
    }
    classes::substitute_madda(&chars.iter().collect::<String>())
}

/// Singular suffix paradigm of an entry.
pub fn singular_paradigm(code: &InflectionalCode, class: &InflectionClass) -> Paradigm {
    class.sg_paradigm.unwrap_or(code.class_tag.info().sg_paradigm)
}

/// Singular root extracted from the lemma.
pub fn singular_root(lemma: &str, code: &InflectionalCode) -> Result<SurfaceRoot, GenError> {
    Ok(morphotax::extract_root(lemma, &code.sg_code, &code.class_tag)?)
}

/// Extract, map and render: the broken-plural stem of an entry.
pub fn bp_stem_with(lemma: &str, code: &InflectionalCode, registry: &Registry) -> Result<RenderedStem, GenError> {
    let class = registry.resolve_class(code)?;
    let root = singular_root(lemma, code)?;
    let bp_root = morphotax::apply_root_code(&root, &code.root_code)?;
    Ok(classes::render_stem(&bp_root, &class.bp_template)?)
}

pub fn bp_stem(lemma: &str, code: &InflectionalCode) -> Result<String, GenError> {
    bp_stem_with(lemma, code, Registry::builtin()).map(|r| r.text)
}

/// Base forms: 27 for fixed gender, 45 for gender-inflecting entries.
pub fn form_count(code: &InflectionalCode) -> usize {
    let sg_groups = if code.gender == GenderFlag::Inflecting { 2 } else { 1 };
    (2 * sg_groups + 1) * 9
}

/// Base forms plus one pro-compatible variant per construct cell.
pub fn extended_count(code: &InflectionalCode) -> usize {
    let groups = if code.gender == GenderFlag::Inflecting { 5 } else { 3 };
    form_count(code) + groups * 3
}

pub fn inflect_with(lemma: &str, code: &InflectionalCode, registry: &Registry) -> Result<Vec<InflectedForm>, GenError> {
    let class = registry.resolve_class(code)?;
    let bp = bp_stem_with(lemma, code, registry)?;
    let sg_paradigm = singular_paradigm(code, class);
    let sg_tail = if sg_paradigm == Paradigm::DefectiveIy { 2 } else { 0 };
    let mut sg_stems: Vec<(Gender, String, usize, Paradigm)> = Vec::new();
    match code.gender {
        GenderFlag::Masculine => sg_stems.push((Gender::Masculine, lemma.to_string(), sg_tail, sg_paradigm)),
        GenderFlag::Feminine => sg_stems.push((Gender::Feminine, lemma.to_string(), sg_tail, sg_paradigm)),
        GenderFlag::Inflecting => {
            sg_stems.push((Gender::Masculine, lemma.to_string(), sg_tail, sg_paradigm));
            sg_stems.push((Gender::Feminine, format!("{lemma}ap"), 0, Paradigm::ApFinal));
        }
    }
    let mut out = Vec::with_capacity(extended_count(code));
    let mut push = |surface: String, gender, number, def: Definiteness, case| {
        let features = FeatureBundle { gender, number, definiteness: def, case, pro: false };
        if def == Definiteness::Construct {
            let variant = pro_variant(&surface);
            out.push(InflectedForm { surface, features });
            out.push(InflectedForm { surface: variant, features: FeatureBundle { pro: true, ..features } });
        } else {
            out.push(InflectedForm { surface, features });
        }
    };
    for (gender, stem, tail, paradigm) in &sg_stems {
        for def in Definiteness::ALL {
            for case in Case::ALL {
                push(suffix_cell(stem, *tail, *paradigm, def, case), *gender, Number::Singular, def, case);
            }
        }
    }
    for (gender, stem, _, _) in &sg_stems {
        for def in Definiteness::ALL {
            for case in Case::ALL {
                push(dual_cell(stem, def, case), *gender, Number::Dual, def, case);
            }
        }
    }
    for def in Definiteness::ALL {
        for case in Case::ALL {
            push(suffix_cell(&bp.text, bp.tail_len, class.bp_paradigm, def, case), Gender::None, Number::BrokenPlural, def, case);
        }
    }
    Ok(out)
}

/// All forms of an entry, base cells and pro-compatible variants.
pub fn inflect(lemma: &str, code: &InflectionalCode) -> Result<Vec<InflectedForm>, GenError> {
    inflect_with(lemma, code, Registry::builtin())
}
