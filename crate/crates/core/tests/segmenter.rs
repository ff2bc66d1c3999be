use std::collections::BTreeSet;

use prim::formdict::{diacritic_subsequence, naive_lookup, DictEntry, FormDictionary, LookupMode, Payload};
use prim::generator::{self, Case, Definiteness};
use prim::lexicon;
use prim::segmenter::{SegTag, Segmenter};
use prim::translit::is_diacritic;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

const CONJ: [&str; 2] = ["wa", "fa"];
const PREP: [&str; 3] = ["bi", "li", "ka"];
const PRO: [&str; 12] = ["hu", "haA", "humaA", "hum", "hunGa", "ka", "ki", "kumaA", "kum", "kunGa", "naA", "ya"];

struct World {
    dict: FormDictionary,
    forms: Vec<(String, Payload)>,
    table: Vec<DictEntry>,
}

fn world() -> World {
    let entries = lexicon::seed().entries;
    let dict = FormDictionary::compile(&entries).0;
    let mut forms = Vec::new();
    let mut table = Vec::new();
    for (id, e) in entries.iter().enumerate() {
        table.push(DictEntry::new(&e.lemma, &e.code.to_string()));
        for f in generator::inflect(&e.lemma, &e.code).unwrap() {
            forms.push((f.surface, Payload { entry: id as u32, features: f.features }));
        }
    }
    World { dict, forms, table }
}

fn clitic_ok(piece: &str, set: &[&str], mode: LookupMode) -> bool {
    set.iter().any(|c| match mode {
        LookupMode::Strict => piece == *c,
        LookupMode::Optional => !piece.is_empty() && diacritic_subsequence(piece.as_bytes(), c.as_bytes()),
    })
}

/// Every split of the token into at most five pieces, tagged by the template.
fn brute_force(w: &World, token: &str, mode: LookupMode) -> BTreeSet<String> {
    let n = token.len();
    let mut out = BTreeSet::new();
    for a in 0..=n {
        for b in a..=n {
            for c in b..=n {
                for d in c + 1..=n {
                    let (conj, prep, det, noun, pro) = (&token[..a], &token[a..b], &token[b..c], &token[c..d], &token[d..]);
                    if (!conj.is_empty() && !clitic_ok(conj, &CONJ, mode))
                        || (!prep.is_empty() && !clitic_ok(prep, &PREP, mode))
                        || (!det.is_empty() && det != "Al")
                        || (!pro.is_empty() && !clitic_ok(pro, &PRO, mode))
                    {
                        continue;
                    }
                    let query = format!("{det}{noun}");
                    for an in naive_lookup(&w.forms, &w.table, &query, mode) {
                        let f = an.features;
                        if !prep.is_empty() && f.case != Case::Genitive {
                            continue;
                        }
                        if !pro.is_empty() && !(f.pro && f.definiteness == Definiteness::Construct) {
                            continue;
                        }
                        if pro.is_empty() && f.pro {
                            continue;
                        }
                        if det.is_empty() == (f.definiteness == Definiteness::Definite) {
                            continue;
                        }
                        if !det.is_empty() && !an.surface.starts_with("Al") {
                            continue;
                        }
                        let mut segs = Vec::new();
                        for (s, tag) in [(conj, "CONJC"), (prep, "PREP"), (det, "DET"), (noun, "N"), (pro, "PRO+Gen")] {
                            if !s.is_empty() {
                                segs.push(format!("{s}/{tag}"));
                            }
                        }
                        out.insert(format!("{}\t{},{}\t{}\t{}", segs.join("+"), an.lemma, an.code, an.features, an.surface));
                    }
                }
            }
        }
    }
    out
}

fn lattice_set(s: &Segmenter<'_>, token: &str) -> BTreeSet<String> {
    s.segment(token)
        .readings
        .iter()
        .map(|r| {
            let a = r.noun();
            format!("{}\t{},{}\t{}\t{}", r.segmentation(), a.lemma, a.code, a.features, a.surface)
        })
        .collect()
}

fn random_tokens(w: &World, n: usize, seed: u64) -> Vec<String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let (surface, p) = w.forms.choose(&mut rng).unwrap();
        let mut t = String::new();
        if rng.gen_bool(0.3) {
            t.push_str(CONJ.choose(&mut rng).unwrap());
        }
        if rng.gen_bool(0.3) {
            t.push_str(PREP.choose(&mut rng).unwrap());
        }
        t.push_str(surface);
        if p.features.pro || rng.gen_bool(0.2) {
            t.push_str(PRO.choose(&mut rng).unwrap());
        }
        if t.len() <= 20 {
            out.push(t);
        }
    }
    out
}

#[test]
fn lattice_equals_brute_force_strict() {
    let w = world();
    let s = Segmenter::new(&w.dict, LookupMode::Strict);
    for t in random_tokens(&w, 60, 11) {
        assert_eq!(lattice_set(&s, &t), brute_force(&w, &t, LookupMode::Strict), "{t}");
    }
}

#[test]
fn lattice_equals_brute_force_optional() {
    let w = world();
    let s = Segmenter::new(&w.dict, LookupMode::Optional);
    let mut rng = StdRng::seed_from_u64(3);
    for t in random_tokens(&w, 25, 5) {
        let stripped: String = t.chars().filter(|c| !is_diacritic(*c) || rng.gen_bool(0.5)).collect();
        assert_eq!(lattice_set(&s, &stripped), brute_force(&w, &stripped, LookupMode::Optional), "{stripped}");
    }
}

#[test]
fn readings_conserve_surface_and_satisfy_constraints() {
    let w = world();
    for mode in [LookupMode::Strict, LookupMode::Optional] {
        let s = Segmenter::new(&w.dict, mode);
        for t in random_tokens(&w, 80, 21) {
            for r in s.segment(&t).readings {
                assert_eq!(r.surface(), t);
                assert!(r.satisfies_constraints(), "{t} {}", r.segmentation());
                let f = r.noun().features;
                assert!(!r.has(SegTag::Prep) || f.case == Case::Genitive);
                assert!(!(r.has(SegTag::Det) && r.has(SegTag::ProGen)));
            }
        }
    }
}

#[test]
fn generated_tokens_are_recovered() {
    let w = world();
    let s = Segmenter::new(&w.dict, LookupMode::Strict);
    for (surface, p) in w.forms.iter().step_by(17) {
        let token = if p.features.pro { format!("wa{surface}hu") } else { format!("wa{surface}") };
        let lattice = s.segment(&token);
        assert!(lattice.readings.iter().any(|r| r.noun().entry_id == p.entry && r.noun().features == p.features), "{token}");
    }
}
