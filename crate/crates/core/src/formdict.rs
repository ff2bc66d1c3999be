//! The compiled full-form dictionary.
//!
//! Surfaces are stored in a minimized acyclic automaton over BN bytes. Each
//! state knows how many words its right language holds, so a path also yields
//! the word's rank in lexicographic order; the rank indexes the payload table.
//! Keeping analyses out of the states lets states with equal right languages
//! merge no matter which entries the words came from.
//!
//! # Binary layout (`.primdict`, version 1)
//!
//! All integers are unsigned LEB128 varints unless noted.
//!
//! ```text
//! magic      8 bytes  "PRIMDICT"
//! version    u16 LE   1
//! entries    n, then n x (lemma: len + utf8, code: len + utf8)
//! states     n, then per state in topological order (root first):
//!              (transition_count << 1 | final), then per transition
//!              label: 1 byte, target: zigzag(target - state_index)
//! payloads   word_count, then per word in rank order:
//!              k, then k x ((entry << 9) | packed features)
//! ```
//!
//! Packed features: gender (2 bits), number (2), definiteness (2), case (2),
//! pro flag (1), low bits first.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::generator::{self, Case, Definiteness, FeatureBundle, GenError, Gender, Number};
use crate::lexicon::LexicalEntry;
use crate::morphotax;
use crate::translit::is_diacritic;

const MAGIC: &[u8; 8] = b"PRIMDICT";
const VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum DictError {
    #[error("not a dictionary file (bad magic bytes)")]
    BadMagic,
    #[error("unsupported dictionary version {0}")]
    UnsupportedVersion(u16),
    #[error("dictionary file is truncated")]
    Truncated,
    #[error("corrupt dictionary: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LookupMode {
    Strict,
    /// Dictionary diacritics may be skipped; query diacritics must match.
    Optional,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DictEntry {
    pub lemma: String,
    pub code: String,
    pub human: bool,
}

impl DictEntry {
    pub fn new(lemma: &str, code: &str) -> DictEntry {
        let human = morphotax::parse_code(code).map(|c| c.human).unwrap_or(false);
        DictEntry { lemma: lemma.to_string(), code: code.to_string(), human }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Payload {
    pub entry: u32,
    pub features: FeatureBundle,
}

/// One reading of a surface.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Analysis {
    /// The dictionary form matched, which may carry more diacritics than the query.
    pub surface: String,
    pub entry_id: u32,
    pub lemma: String,
    pub code: String,
    pub features: FeatureBundle,
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{},{}\t{}", self.surface, self.lemma, self.code, self.features)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct State {
    is_final: bool,
    trans: Vec<(u8, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormDictionary {
    entries: Vec<DictEntry>,
    states: Vec<State>,
    /// Words accepted from each state.
    counts: Vec<u32>,
    payloads: Vec<Vec<Payload>>,
}

/// An entry that could not be inflected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompileFailure {
    pub line: usize,
    pub entry: String,
    pub error: GenError,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DictStats {
    pub entries: usize,
    pub forms: usize,
    pub surfaces: usize,
    pub states: usize,
    pub transitions: usize,
    pub serialized_bytes: usize,
    pub listing_bytes: usize,
}

impl fmt::Display for DictStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "entries\t{}", self.entries)?;
        writeln!(f, "forms\t{}", self.forms)?;
        writeln!(f, "surfaces\t{}", self.surfaces)?;
        writeln!(f, "states\t{}", self.states)?;
        writeln!(f, "transitions\t{}", self.transitions)?;
        writeln!(f, "serialized bytes\t{}", self.serialized_bytes)?;
        writeln!(f, "listing bytes\t{}", self.listing_bytes)?;
        if self.listing_bytes > 0 {
            writeln!(f, "ratio\t{:.3}", self.serialized_bytes as f64 / self.listing_bytes as f64)?;
        }
        Ok(())
    }
}

fn pack(f: &FeatureBundle) -> u32 {
    let g = match f.gender {
        Gender::Masculine => 0,
        Gender::Feminine => 1,
        Gender::None => 2,
    };
    let n = match f.number {
        Number::Singular => 0,
        Number::Dual => 1,
        Number::Plural => 2,
        Number::BrokenPlural => 3,
    };
    let d = match f.definiteness {
        Definiteness::Definite => 0,
        Definiteness::Indefinite => 1,
        Definiteness::Construct => 2,
    };
    let c = match f.case {
        Case::Nominative => 0,
        Case::Accusative => 1,
        Case::Genitive => 2,
    };
    g | n << 2 | d << 4 | c << 6 | u32::from(f.pro) << 8
}

fn unpack(v: u32) -> Option<FeatureBundle> {
    let gender = [Gender::Masculine, Gender::Feminine, Gender::None].get((v & 3) as usize).copied()?;
    let number = [Number::Singular, Number::Dual, Number::Plural, Number::BrokenPlural][(v >> 2 & 3) as usize];
    let definiteness = Definiteness::ALL.get((v >> 4 & 3) as usize).copied()?;
    let case = Case::ALL.get((v >> 6 & 3) as usize).copied()?;
    Some(FeatureBundle { gender, number, definiteness, case, pro: v >> 8 & 1 == 1 })
}

fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn byte(&mut self) -> Result<u8, DictError> {
        let b = *self.buf.get(self.pos).ok_or(DictError::Truncated)?;
        self.pos += 1;
        Ok(b)
    }

    fn varint(&mut self) -> Result<u64, DictError> {
        let mut v = 0u64;
        for shift in (0..64).step_by(7) {
            let b = self.byte()?;
            v |= u64::from(b & 0x7f) << shift;
            if b & 0x80 == 0 {
                return Ok(v);
            }
        }
        Err(DictError::Corrupt("varint too long".into()))
    }

    fn usize(&mut self) -> Result<usize, DictError> {
        usize::try_from(self.varint()?).map_err(|_| DictError::Corrupt("count overflow".into()))
    }

    fn string(&mut self) -> Result<String, DictError> {
        let n = self.usize()?;
        let end = self.pos.checked_add(n).filter(|e| *e <= self.buf.len()).ok_or(DictError::Truncated)?;
        let s = std::str::from_utf8(&self.buf[self.pos..end]).map_err(|e| DictError::Corrupt(e.to_string()))?;
        self.pos = end;
        Ok(s.to_string())
    }
}

fn zigzag(v: i64) -> u64 {
    ((v << 1) ^ (v >> 63)) as u64
}

fn unzigzag(v: u64) -> i64 {
    (v >> 1) as i64 ^ -((v & 1) as i64)
}

impl FormDictionary {
    /// Builds the automaton from `(surface, payload)` pairs.
    pub fn from_forms(entries: Vec<DictEntry>, forms: impl IntoIterator<Item = (String, Payload)>) -> FormDictionary {
        let mut words: BTreeMap<Vec<u8>, Vec<Payload>> = BTreeMap::new();
        for (surface, p) in forms {
            words.entry(surface.into_bytes()).or_default().push(p);
        }
        for list in words.values_mut() {
            list.sort();
            list.dedup();
        }
        // trie
        let mut trie: Vec<(bool, BTreeMap<u8, usize>)> = vec![(false, BTreeMap::new())];
        for w in words.keys() {
            let mut s = 0;
            for &b in w {
                s = match trie[s].1.get(&b) {
                    Some(&t) => t,
                    None => {
                        trie.push((false, BTreeMap::new()));
                        let t = trie.len() - 1;
                        trie[s].1.insert(b, t);
                        t
                    }
                };
            }
            trie[s].0 = true;
        }
        // register of canonical states, children before parents
        let mut canon = vec![usize::MAX; trie.len()];
        let mut register: HashMap<(bool, Vec<(u8, usize)>), usize> = HashMap::new();
        let mut classes: Vec<(bool, Vec<(u8, usize)>)> = Vec::new();
        let mut stack = vec![(0usize, false)];
        while let Some((s, expanded)) = stack.pop() {
            if expanded {
                let sig = (trie[s].0, trie[s].1.iter().map(|(b, t)| (*b, canon[*t])).collect::<Vec<_>>());
                let id = *register.entry(sig.clone()).or_insert_with(|| {
                    classes.push(sig);
                    classes.len() - 1
                });
                canon[s] = id;
            } else {
                stack.push((s, true));
                for t in trie[s].1.values() {
                    stack.push((*t, false));
                }
            }
        }
        // renumber in reverse postorder so every target follows its source
        let mut post = Vec::with_capacity(classes.len());
        let mut seen = vec![false; classes.len()];
        let mut stack = vec![(canon[0], 0usize)];
        seen[canon[0]] = true;
        while let Some((c, i)) = stack.pop() {
            if let Some((_, t)) = classes[c].1.get(i) {
                stack.push((c, i + 1));
                if !seen[*t] {
                    seen[*t] = true;
                    stack.push((*t, 0));
                }
            } else {
                post.push(c);
            }
        }
        let preorder: Vec<usize> = post.into_iter().rev().collect();
        let mut order = vec![u32::MAX; classes.len()];
        for (i, c) in preorder.iter().enumerate() {
            order[*c] = i as u32;
        }
        let states: Vec<State> = preorder
            .iter()
            .map(|c| State { is_final: classes[*c].0, trans: classes[*c].1.iter().map(|(b, t)| (*b, order[*t])).collect() })
            .collect();
        let counts = compute_counts(&states);
        FormDictionary { entries, states, counts, payloads: words.into_values().collect() }
    }

    /// Inflects every entry and compiles the forms. Entries that fail are skipped and reported.
    pub fn compile(entries: &[LexicalEntry]) -> (FormDictionary, Vec<CompileFailure>) {
        let mut table = Vec::with_capacity(entries.len());
        let mut forms = Vec::new();
        let mut failures = Vec::new();
        for e in entries {
            match generator::inflect(&e.lemma, &e.code) {
                Ok(fs) => {
                    let id = table.len() as u32;
                    table.push(DictEntry { lemma: e.lemma.clone(), code: e.code.to_string(), human: e.code.human });
                    forms.extend(fs.into_iter().map(|f| (f.surface, Payload { entry: id, features: f.features })));
                }
                Err(error) => failures.push(CompileFailure { line: e.line, entry: e.spec(), error }),
            }
        }
        (FormDictionary::from_forms(table, forms), failures)
    }

    pub fn entries(&self) -> &[DictEntry] {
        &self.entries
    }

    pub fn entry(&self, id: u32) -> &DictEntry {
        &self.entries[id as usize]
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn transition_count(&self) -> usize {
        self.states.iter().map(|s| s.trans.len()).sum()
    }

    pub fn surface_count(&self) -> usize {
        self.payloads.len()
    }

    pub fn form_count(&self) -> usize {
        self.payloads.iter().map(Vec::len).sum()
    }

    fn analyses(&self, surface: &[u8], rank: usize, out: &mut Vec<Analysis>) {
        let surface = String::from_utf8_lossy(surface).into_owned();
        for p in &self.payloads[rank] {
            let e = &self.entries[p.entry as usize];
            out.push(Analysis {
                surface: surface.clone(),
                entry_id: p.entry,
                lemma: e.lemma.clone(),
                code: e.code.clone(),
                features: p.features,
            });
        }
    }

    /// Rank offset gained by taking transition `i` out of state `s`.
    fn skip_before(&self, s: usize, i: usize) -> usize {
        let st = &self.states[s];
        usize::from(st.is_final) + st.trans[..i].iter().map(|(_, t)| self.counts[*t as usize] as usize).sum::<usize>()
    }

    pub fn lookup(&self, query: &str, mode: LookupMode) -> Vec<Analysis> {
        let q = query.as_bytes();
        let mut out = Vec::new();
        match mode {
            LookupMode::Strict => {
                let (mut s, mut rank) = (0usize, 0usize);
                for &b in q {
                    let Some(i) = self.states[s].trans.iter().position(|(l, _)| *l == b) else {
                        return out;
                    };
                    rank += self.skip_before(s, i);
                    s = self.states[s].trans[i].1 as usize;
                }
                if self.states[s].is_final {
                    self.analyses(q, rank, &mut out);
                }
            }
            LookupMode::Optional => {
                let mut path = Vec::new();
                self.walk_optional(q, 0, 0, 0, &mut path, &mut out);
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn walk_optional(&self, q: &[u8], s: usize, pos: usize, rank: usize, path: &mut Vec<u8>, out: &mut Vec<Analysis>) {
        let st = &self.states[s];
        if pos == q.len() && st.is_final {
            self.analyses(path, rank, out);
        }
        for (i, (label, t)) in st.trans.iter().enumerate() {
            let consumes = q.get(pos) == Some(label);
            let skips = is_diacritic(char::from(*label));
            if !consumes && !skips {
                continue;
            }
            let r = rank + self.skip_before(s, i);
            path.push(*label);
            if consumes {
                self.walk_optional(q, *t as usize, pos + 1, r, path, out);
            }
            if skips {
                self.walk_optional(q, *t as usize, pos, r, path, out);
            }
            path.pop();
        }
    }

    /// Every stored form in rank order.
    pub fn forms(&self) -> Vec<(String, Payload)> {
        let mut out = Vec::with_capacity(self.form_count());
        let mut words = Vec::with_capacity(self.payloads.len());
        let mut path = Vec::new();
        self.collect_words(0, &mut path, &mut words);
        for (rank, w) in words.into_iter().enumerate() {
            for p in &self.payloads[rank] {
                out.push((w.clone(), *p));
            }
        }
        out
    }

    fn collect_words(&self, s: usize, path: &mut Vec<u8>, out: &mut Vec<String>) {
        if self.states[s].is_final {
            out.push(String::from_utf8_lossy(path).into_owned());
        }
        for (b, t) in &self.states[s].trans {
            path.push(*b);
            self.collect_words(*t as usize, path, out);
            path.pop();
        }
    }

    /// Plain-text listing, one `surface TAB lemma TAB code TAB features` line per form.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (surface, p) in self.forms() {
            let e = &self.entries[p.entry as usize];
            out.push_str(&format!("{surface}\t{}\t{}\t{}\n", e.lemma, e.code, p.features));
        }
        out
    }

    /// True when no two states have the same right language.
    pub fn is_minimal(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.states.iter().all(|s| seen.insert((s.is_final, s.trans.clone())))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        put_varint(&mut out, self.entries.len() as u64);
        for e in &self.entries {
            for s in [&e.lemma, &e.code] {
                put_varint(&mut out, s.len() as u64);
                out.extend_from_slice(s.as_bytes());
            }
        }
        put_varint(&mut out, self.states.len() as u64);
        for (i, s) in self.states.iter().enumerate() {
            put_varint(&mut out, (s.trans.len() as u64) << 1 | u64::from(s.is_final));
            for (b, t) in &s.trans {
                out.push(*b);
                put_varint(&mut out, zigzag(i64::from(*t) - i as i64));
            }
        }
        put_varint(&mut out, self.payloads.len() as u64);
        for list in &self.payloads {
            put_varint(&mut out, list.len() as u64);
            for p in list {
                put_varint(&mut out, u64::from(p.entry) << 9 | u64::from(pack(&p.features)));
            }
        }
        out
    }

    pub fn from_bytes(buf: &[u8]) -> Result<FormDictionary, DictError> {
        if buf.len() < 10 {
            return Err(if buf.starts_with(&MAGIC[..buf.len().min(8)]) { DictError::Truncated } else { DictError::BadMagic });
        }
        if &buf[..8] != MAGIC {
            return Err(DictError::BadMagic);
        }
        let version = u16::from_le_bytes([buf[8], buf[9]]);
        if version != VERSION {
            return Err(DictError::UnsupportedVersion(version));
        }
        let mut r = Reader { buf, pos: 10 };
        let n_entries = r.usize()?;
        let mut entries = Vec::with_capacity(n_entries.min(buf.len()));
        for _ in 0..n_entries {
            let lemma = r.string()?;
            let code = r.string()?;
            entries.push(DictEntry::new(&lemma, &code));
        }
        let n_states = r.usize()?;
        if n_states == 0 {
            return Err(DictError::Corrupt("no root state".into()));
        }
        let mut states = Vec::with_capacity(n_states.min(buf.len()));
        for i in 0..n_states {
            let head = r.varint()?;
            let mut trans = Vec::new();
            for _ in 0..head >> 1 {
                let b = r.byte()?;
                let t = i as i64 + unzigzag(r.varint()?);
                if t <= i as i64 || t >= n_states as i64 {
                    return Err(DictError::Corrupt(format!("state {i} has a bad target {t}")));
                }
                trans.push((b, t as u32));
            }
            states.push(State { is_final: head & 1 == 1, trans });
        }
        let n_words = r.usize()?;
        let mut payloads = Vec::with_capacity(n_words.min(buf.len()));
        for _ in 0..n_words {
            let k = r.usize()?;
            let mut list = Vec::with_capacity(k.min(buf.len()));
            for _ in 0..k {
                let v = r.varint()?;
                let entry = u32::try_from(v >> 9).ok().filter(|e| (*e as usize) < entries.len());
                let features = unpack((v & 0x1ff) as u32);
                let (Some(entry), Some(features)) = (entry, features) else {
                    return Err(DictError::Corrupt("bad payload".into()));
                };
                list.push(Payload { entry, features });
            }
            payloads.push(list);
        }
        if r.pos != buf.len() {
            return Err(DictError::Corrupt("trailing bytes".into()));
        }
        let counts = compute_counts(&states);
        if counts[0] as usize != payloads.len() {
            return Err(DictError::Corrupt("word count does not match payload table".into()));
        }
        Ok(FormDictionary { entries, states, counts, payloads })
    }

    pub fn save(&self, path: &Path) -> Result<(), DictError> {
        Ok(std::fs::write(path, self.to_bytes())?)
    }

    pub fn load(path: &Path) -> Result<FormDictionary, DictError> {
        FormDictionary::from_bytes(&std::fs::read(path)?)
    }

    pub fn stats(&self) -> DictStats {
        DictStats {
            entries: self.entries.len(),
            forms: self.form_count(),
            surfaces: self.surface_count(),
            states: self.state_count(),
            transitions: self.transition_count(),
            serialized_bytes: self.to_bytes().len(),
            listing_bytes: self.dump().len(),
        }
    }
}

/// Word counts per state. Targets always follow their source,
/// so a reverse sweep sees every child first.
fn compute_counts(states: &[State]) -> Vec<u32> {
    let mut counts = vec![0u32; states.len()];
    for i in (0..states.len()).rev() {
        let s = &states[i];
        counts[i] = u32::from(s.is_final) + s.trans.iter().map(|(_, t)| counts[*t as usize]).sum::<u32>();
    }
    counts
}

/// Linear-scan reference used to check the automaton.
pub fn naive_lookup(forms: &[(String, Payload)], entries: &[DictEntry], query: &str, mode: LookupMode) -> Vec<Analysis> {
    let mut out: Vec<Analysis> = forms
        .iter()
        .filter(|(s, _)| match mode {
            LookupMode::Strict => s == query,
            LookupMode::Optional => diacritic_subsequence(query.as_bytes(), s.as_bytes()),
        })
        .map(|(s, p)| {
            let e = &entries[p.entry as usize];
            Analysis { surface: s.clone(), entry_id: p.entry, lemma: e.lemma.clone(), code: e.code.clone(), features: p.features }
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// True when `query` is `form` with some diacritics deleted.
pub fn diacritic_subsequence(query: &[u8], form: &[u8]) -> bool {
    // reachable[j]: query[..j] matches the form prefix read so far
    let mut reachable = vec![false; query.len() + 1];
    reachable[0] = true;
    for &c in form {
        let skippable = is_diacritic(char::from(c));
        let mut next = vec![false; query.len() + 1];
        for j in 0..=query.len() {
            if !reachable[j] {
                continue;
            }
            if skippable {
                next[j] = true;
            }
            if j < query.len() && query[j] == c {
                next[j + 1] = true;
            }
        }
        reachable = next;
    }
    reachable[query.len()]
}
