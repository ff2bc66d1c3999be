//! Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use prim::cli;
use prim::formdict::{Analysis, FormDictionary, LookupMode, Payload};
use prim::generator::{self, bp_stem, FeatureBundle, Gender};
use prim::lexicon::{self, LexicalEntry};
use prim::morphotax::{parse_code, GenderFlag};
use prim::segmenter::{check_agreement, AgreementHead, Relation, Segmenter};
use prim::translit::{is_diacritic, strip_diacritics, to_bn};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

const GOLDEN: &str = include_str!("../data/seed_golden.tsv");
const COVERAGE_FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/coverage.txt");

const GOLDEN_MIN_ROWS: usize = 140;
const GOLDEN_MAX_TIME: Duration = Duration::from_secs(1);
const FIXED_GENDER_FORMS: usize = 27;
const VARIABLE_GENDER_FORMS: usize = 45;
const RANDOM_QUERIES: usize = 1000;
const MAX_SIZE_RATIO: f64 = 0.30;
const MAX_COMPILE_TIME: Duration = Duration::from_secs(5);
const MAX_MEAN_LOOKUP: Duration = Duration::from_micros(500);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

struct World {
    entries: Vec<LexicalEntry>,
    dict: FormDictionary,
    compile_time: Duration,
}

fn world() -> World {
    let start = Instant::now();
    let (file, _) = lexicon::validate_lexicon(lexicon::SEED_LEXICON);
    let (entries, _) = lexicon::valid_entries(&file);
    let (dict, _) = FormDictionary::compile(&entries);
    World { entries, dict, compile_time: start.elapsed() }
}

fn generated(w: &World) -> Vec<(String, Payload)> {
    let mut out = Vec::new();
    for (id, e) in w.entries.iter().enumerate() {
        for f in generator::inflect(&e.lemma, &e.code).expect("seed entries inflect") {
            out.push((f.surface, Payload { entry: id as u32, features: f.features }));
        }
    }
    out
}

// 1
fn golden_fidelity() -> Outcome {
    let start = Instant::now();
    let (mut rows, mut disputed, mut failures) = (0, 0, Vec::new());
    for line in GOLDEN.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let f: Vec<&str> = line.split('\t').collect();
        let (reference, lemma, code, plural, status) = (f[0], f[1], f[2], f[3], f[4]);
        rows += 1;
        let got = parse_code(code).map_err(|e| e.to_string()).and_then(|c| bp_stem(lemma, &c).map_err(|e| e.to_string()));
        let ok = match (status, &got) {
            ("disputed", Ok(g)) => {
                disputed += 1;
                let arabic = f.get(5).and_then(|a| to_bn(a).ok()).unwrap_or_default();
                strip_diacritics(g) == strip_diacritics(&arabic)
            }
            (_, Ok(g)) => g == plural,
            (_, Err(_)) => false,
        };
        if !ok {
            failures.push(format!("{reference}:{got:?}"));
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && rows >= GOLDEN_MIN_ROWS && elapsed < GOLDEN_MAX_TIME;
    outcome(pass, format!("{}/{rows} rows ({disputed} disputed) in {elapsed:.2?} {}", rows - failures.len(), failures.join(" ")))
}

// 2
fn paradigm_counts(w: &World) -> Outcome {
    let mut bad = Vec::new();
    for e in &w.entries {
        let base = generator::inflect(&e.lemma, &e.code).unwrap().iter().filter(|f| !f.features.pro).count();
        let want = if e.code.gender == GenderFlag::Inflecting { VARIABLE_GENDER_FORMS } else { FIXED_GENDER_FORMS };
        if base != want {
            bad.push(format!("{}={base}", e.spec()));
        }
    }
    outcome(bad.is_empty(), format!("{}/{} entries exact {}", w.entries.len() - bad.len(), w.entries.len(), bad.join(" ")))
}

// 3
fn segmentation_examples(w: &World) -> Outcome {
    let expected = [
        ("liEuquwdK", "li/PREP+EuquwdK/N", "Eaqod", "q:iG"),
        ("AlminoTaqapi", "Al/DET+minoTaqapi/N", "minoTaqap", "fs:DG"),
        ("OasmaAkihaA", "OasmaAki/N+haA/PRO+Gen", "samak", "q:aG+pro"),
        ("OanoMiTatihaA", "OanoMiTati/N+haA/PRO+Gen", "naMaAoT", "q:aG+pro"),
    ];
    let seg = Segmenter::new(&w.dict, LookupMode::Optional);
    let mut bad = Vec::new();
    for (token, segs, lemma, features) in expected {
        let got: Vec<(String, String, String)> = seg
            .segment(token)
            .readings
            .iter()
            .map(|r| (r.segmentation(), r.noun().lemma.clone(), r.noun().features.to_string()))
            .collect();
        if got != [(segs.to_string(), lemma.to_string(), features.to_string())] {
            bad.push(format!("{token}:{got:?}"));
        }
    }
    outcome(bad.is_empty(), format!("{}/{} tokens {}", expected.len() - bad.len(), expected.len(), bad.join(" ")))
}

/// Seat of a hamza followed by `vowel` once a suffix makes it word-internal.
fn medial_seat(before: &[char], vowel: char) -> char {
    let long = matches!(
        before,
        [.., 'A'] | [.., 'A', 'o'] | [.., 'u', 'w', 'o'] | [.., 'i', 'y', 'o'] | [.., 'u', 'w'] | [.., 'i', 'y']
    );
    if long {
        return match vowel {
            'i' => 'e',
            'u' => 'W',
            _ => 'c',
        };
    }
    let prev = match before.last() {
        Some(c @ ('a' | 'u' | 'i')) => *c,
        _ => 'a',
    };
    let strongest = ['i', 'u', 'a'].into_iter().find(|v| *v == vowel || (*v == prev && before.last() != Some(&'o'))).unwrap();
    match strongest {
        'i' => 'e',
        'u' => 'W',
        _ => 'O',
    }
}

// 4
fn orthographic_adjustment(w: &World) -> Outcome {
    let forms = generated(w);
    let (mut ap, mut hamza, mut bad) = (0, 0, Vec::new());
    for (surface, p) in &forms {
        if !p.features.pro {
            continue;
        }
        let base_features = FeatureBundle { pro: false, ..p.features };
        let base = &forms.iter().find(|(_, q)| q.entry == p.entry && q.features == base_features).expect("pro form has a base").0;
        let chars: Vec<char> = base.chars().collect();
        let n = chars.len();
        let want = if base.ends_with(['a', 'u', 'i']) && n >= 3 && chars[n - 2] == 'p' {
            ap += 1;
            format!("{}t{}", &base[..base.len() - 2], chars[n - 1])
        } else if n >= 2 && matches!(chars[n - 2], 'c' | 'O' | 'W' | 'e' | 'I') && matches!(chars[n - 1], 'a' | 'u' | 'i') {
            hamza += 1;
            let seat = medial_seat(&chars[..n - 2], chars[n - 1]);
            format!("{}{seat}{}", chars[..n - 2].iter().collect::<String>(), chars[n - 1])
        } else {
            continue;
        };
        if &want != surface {
            bad.push(format!("{base}->{surface}!={want}"));
        }
    }
    let pair = forms.iter().any(|(s, p)| s == "ruWasaAoei" && p.features.to_string() == "q:aG+pro")
        && forms.iter().any(|(s, p)| s == "ruWasaAoci" && p.features.to_string() == "q:aG");
    let pass = bad.is_empty() && pair && ap > 0 && hamza > 0;
    outcome(pass, format!("{ap} -ap cells, {hamza} hamza cells, ruWasaAoci/ruWasaAoei {pair} {}", bad.join(" ")))
}

// 5
fn hamza_invariant(w: &World) -> Outcome {
    let forms = w.dict.forms();
    let bad: Vec<&String> = forms.iter().map(|(s, _)| s).filter(|s| s.contains("OaAo") || s.contains("OaOo")).collect();
    outcome(bad.is_empty(), format!("{} forms scanned, {} violations {bad:?}", forms.len(), bad.len()))
}

/// True when `query` is `form` minus some diacritics; greedy is exact here
/// because only diacritics may be skipped.
fn greedy_match(query: &str, form: &str) -> bool {
    let mut q = query.chars().peekable();
    for c in form.chars() {
        if q.peek() == Some(&c) {
            q.next();
        } else if !is_diacritic(c) {
            return false;
        }
    }
    q.peek().is_none()
}

fn scan(w: &World, forms: &[(String, Payload)], query: &str, mode: LookupMode) -> BTreeSet<(String, u32, FeatureBundle)> {
    let _ = w;
    forms
        .iter()
        .filter(|(s, _)| match mode {
            LookupMode::Strict => s == query,
            LookupMode::Optional => greedy_match(query, s),
        })
        .map(|(s, p)| (s.clone(), p.entry, p.features))
        .collect()
}

fn keys(a: &[Analysis]) -> BTreeSet<(String, u32, FeatureBundle)> {
    a.iter().map(|a| (a.surface.clone(), a.entry_id, a.features)).collect()
}

// 6
fn dictionary_round_trip(w: &World) -> Outcome {
    let forms = generated(w);
    let own = forms
        .iter()
        .filter(|(s, p)| w.dict.lookup(s, LookupMode::Strict).iter().any(|a| a.entry_id == p.entry && a.features == p.features))
        .count();
    let mut rng = StdRng::seed_from_u64(2024);
    let mut agree = 0;
    for i in 0..RANDOM_QUERIES {
        let base = &forms.choose(&mut rng).unwrap().0;
        let query: String = match i % 4 {
            0 => base.clone(),
            1 => base.chars().filter(|c| !is_diacritic(*c) || rng.gen_bool(0.5)).collect(),
            2 => base.chars().filter(|c| !is_diacritic(*c)).collect(),
            _ => {
                let mut v: Vec<char> = base.chars().collect();
                let k = rng.gen_range(0..v.len());
                v[k] = *['a', 'b', 'u', 'k', 'A'].choose(&mut rng).unwrap();
                v.into_iter().collect()
            }
        };
        let mode = if i % 2 == 0 { LookupMode::Strict } else { LookupMode::Optional };
        for m in [mode, LookupMode::Optional] {
            if keys(&w.dict.lookup(&query, m)) == scan(w, &forms, &query, m) {
                agree += 1;
            }
        }
    }
    let stripped = forms
        .iter()
        .filter(|(s, p)| {
            let bare: String = s.chars().filter(|c| !is_diacritic(*c)).collect();
            w.dict.lookup(&bare, LookupMode::Optional).iter().any(|a| a.entry_id == p.entry && a.features == p.features)
        })
        .count();
    let pass = own == forms.len() && agree == 2 * RANDOM_QUERIES && stripped == forms.len();
    outcome(pass, format!("self {own}/{n}, oracle {agree}/{q}, stripped {stripped}/{n}", n = forms.len(), q = 2 * RANDOM_QUERIES))
}

// 7
fn compression(w: &World) -> Outcome {
    let s = w.dict.stats();
    let ratio = s.serialized_bytes as f64 / s.listing_bytes as f64;
    outcome(
        ratio < MAX_SIZE_RATIO,
        format!("{} / {} bytes = {ratio:.3} (limit {MAX_SIZE_RATIO})", s.serialized_bytes, s.listing_bytes),
    )
}

fn head_from_dict(w: &World, surface: &str) -> AgreementHead {
    let a =
        w.dict.lookup(surface, LookupMode::Strict).into_iter().next().unwrap_or_else(|| panic!("{surface} not in dictionary"));
    AgreementHead { features: a.features, human: w.dict.entry(a.entry_id).human, plural_exception: false }
}

fn fb(s: &str) -> FeatureBundle {
    s.parse().unwrap()
}

// 8
fn agreement(w: &World) -> Outcome {
    let scholars = head_from_dict(w, "AlEulamaAocu");
    let men = head_from_dict(w, "AlrijaAolu");
    let judges = head_from_dict(w, "AlquDaAopu");
    let mattocks = head_from_dict(w, "AlmaEaAowilu");
    let observers = AgreementHead { features: fb("mp:DN"), human: true, plural_exception: false };
    let rings = AgreementHead { features: fb("fp:DN"), human: false, plural_exception: false };
    let (adj, verb) = (Relation::Adjectival, Relation::VerbalPostSubject);
    let judgments = [
        (&scholars, "q:DN", adj, true),
        (&scholars, "mp:DN", adj, true),
        (&observers, "q:DN", adj, true),
        (&observers, "mp:DN", adj, true),
        (&scholars, "fs:DN", adj, true),
        (&observers, "fs:DN", adj, false),
        (&men, "fs:iN", adj, true),
        (&judges, "fs:DN", verb, true),
        (&judges, "mp:DN", verb, true),
        (&judges, "fp:DN", verb, true),
        (&observers, "fs:DN", verb, false),
        (&observers, "mp:DN", verb, true),
        (&observers, "fp:DN", verb, false),
        (&mattocks, "fp:iN", adj, false),
        (&rings, "fp:iN", adj, true),
        (&mattocks, "fs:iN", adj, true),
        (&rings, "fs:iN", adj, true),
    ];
    let human_flags = scholars.human && men.human && judges.human && !mattocks.human;
    let q_genderless = [&scholars, &men, &judges, &mattocks].iter().all(|h| h.features.gender == Gender::None);
    let bad: Vec<usize> = judgments
        .iter()
        .enumerate()
        .filter(|(_, (h, d, r, want))| check_agreement(h, &fb(d), *r) != *want)
        .map(|(i, _)| i)
        .collect();
    let pass = bad.is_empty() && human_flags && q_genderless;
    outcome(
        pass,
        format!(
            "{}/{} judgments, +Hum flags {human_flags}, genderless q {q_genderless} {bad:?}",
            judgments.len() - bad.len(),
            judgments.len()
        ),
    )
}

// 9
fn performance(w: &World) -> Outcome {
    let surfaces: Vec<String> = w.dict.forms().into_iter().map(|(s, _)| s).collect();
    let start = Instant::now();
    let mut hits = 0;
    for s in &surfaces {
        hits += usize::from(!w.dict.lookup(s, LookupMode::Strict).is_empty());
    }
    let mean = start.elapsed() / surfaces.len().max(1) as u32;
    let pass = w.compile_time < MAX_COMPILE_TIME && mean <= MAX_MEAN_LOOKUP && hits == surfaces.len();
    outcome(
        pass,
        format!(
            "compile {:.2?} (limit {MAX_COMPILE_TIME:?}), mean strict lookup {mean:.2?} over {} tokens",
            w.compile_time,
            surfaces.len()
        ),
    )
}

// 10
fn coverage_workflow() -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(["prim", "stats", COVERAGE_FIXTURE], &mut out, &mut err);
    let text = String::from_utf8_lossy(&out);
    let line = text.lines().find(|l| l.starts_with("lemmas covered")).unwrap_or("").to_string();
    let listed = text.lines().filter(|l| l.starts_with("uncovered\t")).count();
    let pass = code == 0 && line.split('\t').nth(1) == Some("30/35") && listed == 5;
    outcome(pass, format!("{} ({listed} uncovered listed)", line.replace('\t', " ")))
}

fn main() {
    let w = world();
    let results = [
        ("generation fidelity", golden_fidelity()),
        ("paradigm counts", paradigm_counts(&w)),
        ("segmentation examples", segmentation_examples(&w)),
        ("orthographic adjustment", orthographic_adjustment(&w)),
        ("hamza invariant", hamza_invariant(&w)),
        ("dictionary round trip", dictionary_round_trip(&w)),
        ("compression", compression(&w)),
        ("agreement", agreement(&w)),
        ("performance", performance(&w)),
        ("coverage workflow", coverage_workflow()),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        println!("criterion {:>2} {:<24} {}  {}", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail.trim_end());
        failed += usize::from(!o.pass);
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
