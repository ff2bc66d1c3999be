//! The inflection-class registry.
//!
//! Each row of `data/registry.tsv` maps a `(singular pattern, plural label,
//! root code)` key to a plural stem template and two suffix paradigms.
//! Rendering fills the template with plural radicals and seats every glottal
//! stop according to its vocalic context.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use crate::morphotax::{InflectionalCode, MorphError, Radical, RootCode, SingularPatternCode, SurfaceRoot};
use crate::translit::{is_basic, is_bn};

const BUILTIN_REGISTRY: &str = include_str!("../data/registry.tsv");
const BUILTIN_TAGS: &str = include_str!("../data/class_tags.tsv");

/// Broken-plural pattern labels known to the registry.
pub const BP_LABELS: [&str; 18] = [
    "FuEaL",
    "FiEaL",
    "FuEuL",
    "FuEuuL",
    "FuEuuLap",
    "FiEaaL",
    "FiEoLap",
    "FuEoLap",
    "FaEoLap",
    "FaEaLap",
    "FuEoLaan",
    "FuEEaL",
    "OaFoEaaL",
    "OaFoEiLap",
    "FuEaLaac",
    "FaEaaLiB",
    "FaEaaLiBap",
    "FaEaaLiiB",
];

pub const QUADRILATERAL_LABELS: [&str; 3] = ["FaEaaLiB", "FaEaaLiBap", "FaEaaLiiB"];

const LABEL_ALIASES: [(&str, &str); 1] = [("FaEaLiB", "FaEaaLiB")];

/// Returns the canonical spelling of a plural label, if known.
pub fn canonical_label(raw: &str) -> Option<&'static str> {
    let name = LABEL_ALIASES.iter().find(|(from, _)| *from == raw).map_or(raw, |(_, to)| *to);
    BP_LABELS.iter().copied().find(|l| *l == name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Paradigm {
    Triptote,
    Diptote,
    ApFinal,
    DefectiveIy,
    DefectiveIyDiptote,
    InvariableAy,
}

impl Paradigm {
    pub const ALL: [Paradigm; 6] = [
        Paradigm::Triptote,
        Paradigm::Diptote,
        Paradigm::ApFinal,
        Paradigm::DefectiveIy,
        Paradigm::DefectiveIyDiptote,
        Paradigm::InvariableAy,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Paradigm::Triptote => "triptote",
            Paradigm::Diptote => "diptote",
            Paradigm::ApFinal => "ap-final",
            Paradigm::DefectiveIy => "defective-iy",
            Paradigm::DefectiveIyDiptote => "defective-iy-diptote",
            Paradigm::InvariableAy => "invariable-aY",
        }
    }
}

impl FromStr for Paradigm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Paradigm::ALL.into_iter().find(|p| p.id() == s).ok_or_else(|| format!("unknown paradigm {s:?}"))
    }
}

impl fmt::Display for Paradigm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// What a class tag key implies for the singular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagInfo {
    pub key: String,
    pub strip: String,
    pub sg_paradigm: Paradigm,
}

fn tag_table() -> &'static BTreeMap<String, TagInfo> {
    static TAGS: OnceLock<BTreeMap<String, TagInfo>> = OnceLock::new();
    TAGS.get_or_init(|| {
        let mut out = BTreeMap::new();
        for line in BUILTIN_TAGS.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')) {
            let f: Vec<&str> = line.split('\t').collect();
            let strip = if f[1] == "-" { String::new() } else { f[1].to_string() };
            let sg_paradigm = f[2].parse().expect("builtin tag table is valid");
            out.insert(f[0].to_string(), TagInfo { key: f[0].to_string(), strip, sg_paradigm });
        }
        out
    })
}

pub fn tag_info(key: &str) -> Option<&'static TagInfo> {
    tag_table().get(key)
}

pub fn tag_keys() -> impl Iterator<Item = &'static str> {
    tag_table().keys().map(|k| k.as_str())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemplateItem {
    Lit(char),
    Rad(usize),
    /// Radical that must be the glottal stop.
    HamzaSlot(usize),
    /// Radical written only as a shadda on the preceding consonant.
    Shadda(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StemTemplate {
    text: String,
    pub items: Vec<TemplateItem>,
    /// Index of the first item of the detachable tail.
    pub tail_start: Option<usize>,
}

impl StemTemplate {
    pub fn parse(text: &str) -> Result<StemTemplate, String> {
        let chars: Vec<char> = text.chars().collect();
        let mut items = Vec::new();
        let mut tail_start = None;
        let mut i = 0;
        while i < chars.len() {
            match chars[i] {
                '%' => {
                    let (kind, at) = match chars.get(i + 1) {
                        Some('h') => (1, i + 2),
                        Some('=') => (2, i + 2),
                        _ => (0, i + 1),
                    };
                    let k = chars
                        .get(at)
                        .and_then(|c| c.to_digit(10))
                        .filter(|k| (1..=6).contains(k))
                        .ok_or_else(|| format!("bad radical reference in {text:?}"))? as usize;
                    items.push(match kind {
                        1 => TemplateItem::HamzaSlot(k),
                        2 => TemplateItem::Shadda(k),
                        _ => TemplateItem::Rad(k),
                    });
                    i = at + 1;
                }
                '|' => {
                    if tail_start.is_some() {
                        return Err(format!("two tail markers in {text:?}"));
                    }
                    tail_start = Some(items.len());
                    i += 1;
                }
                c if is_bn(c) => {
                    items.push(TemplateItem::Lit(c));
                    i += 1;
                }
                c => return Err(format!("invalid character {c:?} in template {text:?}")),
            }
        }
        let mut refs: Vec<usize> = items
            .iter()
            .filter_map(|it| match it {
                TemplateItem::Rad(k) | TemplateItem::HamzaSlot(k) | TemplateItem::Shadda(k) => Some(*k),
                TemplateItem::Lit(_) => None,
            })
            .collect();
        refs.sort_unstable();
        if refs.iter().enumerate().any(|(i, k)| *k != i + 1) {
            return Err(format!("template {text:?} must reference radicals 1..n exactly once"));
        }
        Ok(StemTemplate { text: text.to_string(), items, tail_start })
    }

    pub fn arity(&self) -> usize {
        self.items.iter().filter(|it| !matches!(it, TemplateItem::Lit(_))).count()
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

impl fmt::Display for StemTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InflectionClass {
    pub key: String,
    pub sg_code: SingularPatternCode,
    pub bp_label: &'static str,
    pub root_code: RootCode,
    pub bp_template: StemTemplate,
    /// `None` defers to the class tag.
    pub sg_paradigm: Option<Paradigm>,
    pub bp_paradigm: Paradigm,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("unknown class {key}; nearest: {}", nearest.join(", "))]
    UnknownClass { key: String, nearest: Vec<String> },
    #[error("registry line {line}: {message}")]
    BadRow { line: usize, message: String },
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
}

#[derive(Debug, Clone, Default)]
pub struct Registry {
    rows: BTreeMap<String, InflectionClass>,
}

impl Registry {
    pub fn parse(text: &str) -> Result<Registry, ClassError> {
        let mut rows = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let bad = |message: String| ClassError::BadRow { line: idx + 1, message };
            let f: Vec<&str> = line.split('\t').collect();
            let [key, template, sg, bp] = f.as_slice() else {
                return Err(bad(format!("expected 4 tab-separated fields, found {}", f.len())));
            };
            let parts: Vec<&str> = key.split('-').collect();
            let [sg_raw, label_raw, root_raw] = parts.as_slice() else {
                return Err(bad(format!("key {key:?} is not sg-bp-root")));
            };
            let sg_code = SingularPatternCode::parse(sg_raw).map_err(|e| bad(e.to_string()))?;
            let bp_label = canonical_label(label_raw).ok_or_else(|| bad(format!("unknown label {label_raw:?}")))?;
            let root_code = RootCode::parse(root_raw).map_err(|e| bad(e.to_string()))?;
            let bp_template = StemTemplate::parse(template).map_err(bad)?;
            if bp_template.arity() != root_code.output_arity() {
                return Err(bad(format!(
                    "template {template} has arity {} but root code {root_code} yields {}",
                    bp_template.arity(),
                    root_code.output_arity()
                )));
            }
            if root_code.max_copy() > sg_code.slot_count() {
                return Err(bad(format!("root code {root_code} exceeds singular arity")));
            }
            let sg_paradigm = match *sg {
                "auto" => None,
                other => Some(other.parse().map_err(bad)?),
            };
            let bp_paradigm = bp.parse().map_err(bad)?;
            let canonical = format!("{sg_code}-{bp_label}-{root_code}");
            let class =
                InflectionClass { key: canonical.clone(), sg_code, bp_label, root_code, bp_template, sg_paradigm, bp_paradigm };
            if rows.insert(canonical.clone(), class).is_some() {
                return Err(bad(format!("duplicate key {canonical}")));
            }
        }
        Ok(Registry { rows })
    }

    pub fn builtin() -> &'static Registry {
        static REG: OnceLock<Registry> = OnceLock::new();
        REG.get_or_init(|| Registry::parse(BUILTIN_REGISTRY).expect("builtin registry is valid"))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn classes(&self) -> impl Iterator<Item = &InflectionClass> {
        self.rows.values()
    }

    pub fn resolve_key(&self, key: &str) -> Result<&InflectionClass, ClassError> {
        self.rows.get(key).ok_or_else(|| {
            let mut scored: Vec<(usize, &String)> = self.rows.keys().map(|k| (strsim::levenshtein(k, key), k)).collect();
            scored.sort();
            ClassError::UnknownClass {
                key: key.to_string(),
                nearest: scored.into_iter().take(3).map(|(_, k)| k.clone()).collect(),
            }
        })
    }

    pub fn resolve_class(&self, code: &InflectionalCode) -> Result<&InflectionClass, ClassError> {
        self.resolve_key(&code.class_key())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VowelContext {
    Short(char),
    Long,
    Silent,
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamzaPosition {
    Initial,
    Medial,
    Final,
}

/// Chooses the seat of a glottal stop from its neighbours.
pub fn resolve_hamza(left: VowelContext, right: VowelContext, position: HamzaPosition) -> char {
    use VowelContext::*;
    match position {
        HamzaPosition::Initial => match right {
            Short('i') => 'I',
            _ => 'O',
        },
        HamzaPosition::Final => match left {
            Short('a') => 'O',
            Short('u') => 'W',
            Short('i') => 'e',
            _ => 'c',
        },
        HamzaPosition::Medial => {
            if left == Long {
                return match right {
                    Short('i') => 'e',
                    Short('u') => 'W',
                    _ => 'c',
                };
            }
            let vowels = [left, right];
            let has = |v: char| vowels.contains(&Short(v));
            if has('i') {
                'e'
            } else if has('u') {
                'W'
            } else if has('a') {
                'O'
            } else {
                'c'
            }
        }
    }
}

/// Left context of the character at `i`.
pub fn left_context(chars: &[char], i: usize) -> VowelContext {
    let Some(&prev) = i.checked_sub(1).and_then(|j| chars.get(j)) else {
        return VowelContext::Boundary;
    };
    match prev {
        'a' | 'u' | 'i' => VowelContext::Short(prev),
        'o' if i >= 3 => match (chars[i - 3], chars[i - 2]) {
            ('a', 'A') | ('i', 'y') | ('u', 'w') => VowelContext::Long,
            _ => VowelContext::Silent,
        },
        _ => VowelContext::Silent,
    }
}

/// Right context of the character at `i`; `None` at the end of the word.
pub fn right_context(chars: &[char], i: usize) -> Option<VowelContext> {
    let mut j = i + 1;
    if chars.get(j) == Some(&'G') {
        j += 1;
    }
    chars.get(j).map(|c| match c {
        'a' | 'u' | 'i' => VowelContext::Short(*c),
        _ => VowelContext::Silent,
    })
}

/// Replaces the hamza+long-a sequences by `C`.
pub fn substitute_madda(s: &str) -> String {
    let s = s.replace("OaAo", "C").replace("OaOo", "C");
    // a final A carries no sukun
    match s.strip_suffix("OaA") {
        Some(head) => format!("{head}C"),
        None => s,
    }
}

/// A rendered stem with the length of its detachable tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedStem {
    pub text: String,
    pub tail_len: usize,
}

impl RenderedStem {
    pub fn without_tail(&self) -> &str {
        let n = self.text.chars().count() - self.tail_len;
        let end = self.text.char_indices().nth(n).map_or(self.text.len(), |(b, _)| b);
        &self.text[..end]
    }
}

const HAMZA_MARK: char = '\u{0}';

pub fn render_stem(root: &SurfaceRoot, template: &StemTemplate) -> Result<RenderedStem, ClassError> {
    if root.len() != template.arity() {
        return Err(ClassError::ArityMismatch(format!(
            "root {root} has {} radicals, template {template} needs {}",
            root.len(),
            template.arity()
        )));
    }
    let mut chars: Vec<char> = Vec::new();
    let mut tail_from = None;
    for (idx, item) in template.items.iter().enumerate() {
        if template.tail_start == Some(idx) {
            tail_from = Some(chars.len());
        }
        match *item {
            TemplateItem::Lit(c) => chars.push(c),
            TemplateItem::Shadda(_) => chars.push('G'),
            TemplateItem::Rad(k) | TemplateItem::HamzaSlot(k) => {
                let r = root.radicals[k - 1];
                if matches!(item, TemplateItem::HamzaSlot(_)) && r != Radical::Glottal {
                    return Err(ClassError::ArityMismatch(format!("radical {k} of {root} is not a glottal stop")));
                }
                chars.push(match r {
                    Radical::Letter(c) => c,
                    Radical::Glottal => HAMZA_MARK,
                });
                if root.geminate[k - 1] {
                    chars.push('G');
                }
            }
        }
    }
    if template.tail_start == Some(template.items.len()) {
        tail_from = Some(chars.len());
    }
    let tail_len = tail_from.map_or(0, |t| chars.len() - t);
    for i in 0..chars.len() {
        if chars[i] == HAMZA_MARK {
            chars[i] = seat_hamza(&chars, i);
        }
    }
    let text = substitute_madda(&chars.iter().collect::<String>());
    Ok(RenderedStem { text, tail_len })
}

/// Seat for a glottal stop at `i`, judged from the surrounding characters.
pub fn seat_hamza(chars: &[char], i: usize) -> char {
    let left = left_context(chars, i);
    match (left, right_context(chars, i)) {
        (VowelContext::Boundary, r) => resolve_hamza(left, r.unwrap_or(VowelContext::Boundary), HamzaPosition::Initial),
        (_, None) => resolve_hamza(left, VowelContext::Boundary, HamzaPosition::Final),
        (_, Some(r)) => resolve_hamza(left, r, HamzaPosition::Medial),
    }
}

pub fn render_bp_stem(root: &SurfaceRoot, class: &InflectionClass) -> Result<String, ClassError> {
    render_stem(root, &class.bp_template).map(|r| r.text)
}

/// True when no basic letter in `s` is a bare glottal-stop placeholder.
pub fn is_rendered(s: &str) -> bool {
    s.chars().all(|c| c != HAMZA_MARK && (is_basic(c) || is_bn(c)))
}

impl From<MorphError> for ClassError {
    fn from(e: MorphError) -> Self {
        ClassError::ArityMismatch(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::translit::check_full_diacritization;
    use proptest::prelude::*;

    fn class(key: &str) -> &'static InflectionClass {
        Registry::builtin().resolve_key(key).unwrap()
    }

    fn render(root: &str, key: &str) -> String {
        render_bp_stem(&SurfaceRoot::from_letters(root), class(key)).unwrap()
    }

    #[test]
    fn resolves_classes() {
        assert_eq!(class("FvEvL-FuEaL-123").bp_template.as_str(), "%1u%2a%3");
        let cave = class("FvEvL-OaFoEiLap-12y");
        assert_eq!(cave.bp_template.as_str(), "Oa%1o%2i%3ap");
        assert_eq!(cave.bp_paradigm, Paradigm::ApFinal);
        match Registry::builtin().resolve_key("FvEvL-FuEaL-129") {
            Err(ClassError::UnknownClass { nearest, .. }) => assert!(nearest.contains(&"FvEvL-FuEaL-123".to_string())),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn renders_stems() {
        assert_eq!(render("Eqd", "FvEvL-FuEaL-123"), "Euqad");
        assert_eq!(render("qby", "FvEvL-OaFoEiLap-12y"), "Oaqobiyap");
        let mut mhm = SurfaceRoot::from_letters("mhm");
        mhm.geminate[2] = true;
        assert_eq!(render_bp_stem(&mhm, class("FvEvLvB-FaEaaLiB-123G")).unwrap(), "mahaAomG");
        assert_eq!(render("lyly", "FvEvL-FaEaaLiB-123y"), "layaAoliy");
        assert_eq!(render("Obrq", "FvEvLvvB-FaEaaLiiB-h234"), "OabaAoriyoq");
        assert_eq!(render("HblY", "FvEvL-FaEaaLiB-123Y"), "HabaAolaY");
        assert_eq!(render("EwOd", "FvvEvL-FaEaaLiB-1wh3"), "EawaAoeid");
        assert_eq!(render("EDO", "FvEvL-OaFoEaaL-12h"), "OaEoDaAoc");
        assert_eq!(render("Ofq", "FvEvL-OaFoEaaL-h23"), "CfaAoq");
        assert_eq!(render("ObO", "FvE-OaFoEaaL-h2h"), "CbaAoc");
        assert_eq!(render("lOlO", "FvEvLvB-FaEaaLiB-1h3h"), "laClie");
    }

    #[test]
    fn tail_is_reported() {
        let r = render_stem(&SurfaceRoot::from_letters("lyly"), &class("FvEvL-FaEaaLiB-123y").bp_template).unwrap();
        assert_eq!(r.tail_len, 2);
        assert_eq!(r.without_tail(), "layaAol");
    }

    #[test]
    fn hamza_seats() {
        use VowelContext::*;
        assert_eq!(resolve_hamza(Boundary, Short('a'), HamzaPosition::Initial), 'O');
        assert_eq!(resolve_hamza(Boundary, Short('u'), HamzaPosition::Initial), 'O');
        assert_eq!(resolve_hamza(Boundary, Short('i'), HamzaPosition::Initial), 'I');
        assert_eq!(resolve_hamza(Long, Short('i'), HamzaPosition::Medial), 'e');
        assert_eq!(resolve_hamza(Long, Short('u'), HamzaPosition::Medial), 'W');
        assert_eq!(resolve_hamza(Long, Short('a'), HamzaPosition::Medial), 'c');
        assert_eq!(resolve_hamza(Short('a'), Short('i'), HamzaPosition::Medial), 'e');
        assert_eq!(resolve_hamza(Short('u'), Short('a'), HamzaPosition::Medial), 'W');
        assert_eq!(resolve_hamza(Short('a'), Silent, HamzaPosition::Medial), 'O');
        assert_eq!(resolve_hamza(Long, Boundary, HamzaPosition::Final), 'c');
        assert_eq!(resolve_hamza(Silent, Boundary, HamzaPosition::Final), 'c');
        assert_eq!(resolve_hamza(Short('a'), Boundary, HamzaPosition::Final), 'O');
        assert_eq!(resolve_hamza(Short('u'), Boundary, HamzaPosition::Final), 'W');
        assert_eq!(resolve_hamza(Short('i'), Boundary, HamzaPosition::Final), 'e');
        assert_eq!(substitute_madda("OaAobaAoc"), "CbaAoc");
    }

    #[test]
    fn registry_shape() {
        let reg = Registry::builtin();
        let labels: std::collections::BTreeSet<_> = reg.classes().map(|c| c.bp_label).collect();
        let pairs: std::collections::BTreeSet<_> = reg.classes().map(|c| (c.sg_code.to_string(), c.bp_label)).collect();
        assert!(labels.len() <= 25, "{} labels", labels.len());
        assert!(pairs.len() <= 75, "{} pairs", pairs.len());
        for c in reg.classes() {
            assert_eq!(c.bp_template.arity(), c.root_code.output_arity(), "{}", c.key);
            if c.bp_template.arity() >= 4 {
                assert!(QUADRILATERAL_LABELS.contains(&c.bp_label), "{}", c.key);
            }
            if matches!(c.bp_label, "FaEaaLiB" | "FaEaaLiiB") {
                assert!(
                    matches!(c.bp_paradigm, Paradigm::Diptote | Paradigm::DefectiveIyDiptote | Paradigm::InvariableAy),
                    "{}",
                    c.key
                );
            }
        }
    }

    #[test]
    fn registry_rejects_bad_rows() {
        assert!(Registry::parse("FvEvL-FuEaL-123\t%1u%2a\tauto\ttriptote").is_err());
        assert!(Registry::parse("FvEvL-FuEaL-123\t%1u%2a%3\tauto\tweird").is_err());
        assert!(Registry::parse("FvEvL-Nope-123\t%1u%2a%3\tauto\ttriptote").is_err());
        assert!(Registry::parse("# only a comment\n\n").unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn rendered_stems_are_well_formed(
            idx in 0usize..1000,
            letters in proptest::collection::vec(proptest::sample::select(vec!['b','t','d','r','s','k','l','m','n','O','q']), 6)
        ) {
            let reg = Registry::builtin();
            let classes: Vec<_> = reg.classes().collect();
            let c = classes[idx % classes.len()];
            let n = c.bp_template.arity();
            let mut root = SurfaceRoot::from_letters(&letters[..n].iter().collect::<String>());
            for (k, item) in c.bp_template.items.iter().enumerate() {
                let _ = k;
                if let TemplateItem::HamzaSlot(j) = item {
                    root.radicals[j - 1] = Radical::Glottal;
                }
            }
            if c.root_code.tokens().last() == Some(&crate::morphotax::RootToken::GeminateFinal) {
                root.geminate[n - 1] = true;
            }
            let s = render_bp_stem(&root, c).unwrap();
            prop_assert!(!s.contains("OaAo") && !s.contains("OaOo"), "{}", s);
            prop_assert_eq!(check_full_diacritization(&s), Ok(()), "{} from {}", s, c.key);
        }
    }
}
