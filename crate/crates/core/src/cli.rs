//! The `prim` command line.
//!
//! Exit status is 0 on success, 1 when validation finds errors and 2 for
//! usage or I/O problems.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use crate::formdict::{FormDictionary, LookupMode};
use crate::generator;
use crate::lexicon::{self, Diagnostic, LexiconFile};
use crate::segmenter::{self, FeatureMask, Segmenter};
use crate::translit;

#[derive(Debug, Parser)]
#[command(name = "prim", version, about = "Arabic broken-plural generation, compilation and analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Strict,
    Optional,
}

impl From<Mode> for LookupMode {
    fn from(m: Mode) -> LookupMode {
        match m {
            Mode::Strict => LookupMode::Strict,
            Mode::Optional => LookupMode::Optional,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct DictSource {
    /// Compiled dictionary to load.
    #[arg(long, conflicts_with = "lexicon")]
    pub dict: Option<PathBuf>,
    /// Lexicon to compile in memory instead. Defaults to the bundled seed lexicon.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "strict")]
    pub mode: Mode,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a lexicon into a `.primdict` file.
    Compile {
        lexicon: PathBuf,
        /// Defaults to the lexicon path with a `.primdict` extension.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the paradigm of one `lemma,$code` entry.
    Gen {
        spec: String,
        /// Also list the variants that take a pronoun suffix.
        #[arg(long)]
        pro: bool,
        #[arg(long)]
        arabic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Segment and tag every token of a text.
    Analyze {
        text: PathBuf,
        #[command(flatten)]
        source: DictSource,
        #[arg(long)]
        arabic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a lexicon and print its diagnostics.
    Validate { lexicon: PathBuf },
    /// Lexicon and dictionary statistics, plus coverage of a text if given.
    Stats {
        text: Option<PathBuf>,
        #[command(flatten)]
        source: DictSource,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Concordance of the tokens matching a lexical mask such as `N:q`.
    Concord {
        text: PathBuf,
        #[arg(long, default_value = "N:q")]
        mask: String,
        #[command(flatten)]
        source: DictSource,
        #[arg(long)]
        arabic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn arabic(s: &str, on: bool) -> String {
    if on {
        translit::to_arabic(s).unwrap_or_else(|_| s.to_string())
    } else {
        s.to_string()
    }
}

fn lexicon_text(path: Option<&Path>) -> Result<String> {
    path.map_or_else(|| Ok(lexicon::SEED_LEXICON.to_string()), read)
}

fn load_dict(src: &DictSource) -> Result<FormDictionary> {
    if let Some(p) = &src.dict {
        return FormDictionary::load(p).with_context(|| format!("cannot load {}", p.display()));
    }
    let text = lexicon_text(src.lexicon.as_deref())?;
    let (file, _) = lexicon::parse_lexicon(&text);
    let (entries, _) = lexicon::valid_entries(&file);
    Ok(FormDictionary::compile(&entries).0)
}

fn text_as_bn(path: &Path) -> Result<String> {
    let raw = read(path)?;
    translit::normalize_to_bn(&raw).with_context(|| format!("cannot transliterate {}", path.display()))
}

fn print_diags(diags: &[Diagnostic], stderr: &mut dyn Write) -> Result<()> {
    for d in diags {
        writeln!(stderr, "{d}")?;
    }
    Ok(())
}

/// Runs one command; returns the exit status.
fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Compile { lexicon: path, out } => {
            let (file, diags) = lexicon::validate_lexicon(&read(&path)?);
            let errors: Vec<Diagnostic> = diags.into_iter().filter(Diagnostic::is_error).collect();
            print_diags(&errors, stderr)?;
            let (entries, _) = lexicon::valid_entries(&file);
            let (dict, failures) = FormDictionary::compile(&entries);
            for f in &failures {
                writeln!(stderr, "{}:1 RENDER {}: {}", f.line, f.entry, f.error)?;
            }
            let out = out.unwrap_or_else(|| path.with_extension("primdict"));
            dict.save(&out).with_context(|| format!("cannot write {}", out.display()))?;
            write!(stdout, "{}", dict.stats())?;
            if !errors.is_empty() || !failures.is_empty() {
                writeln!(stderr, "{} entries rejected", errors.len() + failures.len())?;
                return Ok(1);
            }
            Ok(0)
        }
        Command::Gen { spec, pro, arabic: ar, out } => {
            let (file, mut diags) = lexicon::parse_lexicon(&spec);
            if let Some(e) = file.entries.first() {
                diags.extend(lexicon::validate_entry(e));
            } else if diags.is_empty() {
                writeln!(stderr, "expected 'lemma,$code'")?;
                return Ok(1);
            }
            print_diags(&diags, stderr)?;
            if diags.iter().any(Diagnostic::is_error) {
                return Ok(1);
            }
            let e = &file.entries[0];
            let forms = match generator::inflect(&e.lemma, &e.code) {
                Ok(f) => f,
                Err(err) => {
                    writeln!(stderr, "{err}")?;
                    return Ok(1);
                }
            };
            let text: String = forms
                .iter()
                .filter(|f| pro || !f.features.pro)
                .map(|f| format!("{}\t{}\n", arabic(&f.surface, ar), f.features))
                .collect();
            emit(out.as_deref(), &text, stdout)?;
            Ok(0)
        }
        Command::Analyze { text, source, arabic: ar, out } => {
            let bn = text_as_bn(&text)?;
            let dict = load_dict(&source)?;
            let seg = Segmenter::new(&dict, source.mode.into());
            let mut listing = String::new();
            for (_, token) in segmenter::tokenize(&bn) {
                let lattice = seg.segment(token);
                if lattice.is_empty() {
                    listing.push_str(&format!("{}\tUNK\n", arabic(token, ar)));
                    continue;
                }
                for r in &lattice.readings {
                    let a = r.noun();
                    let segs: Vec<String> = r.segments.iter().map(|s| format!("{}/{}", arabic(&s.surface, ar), s.tag)).collect();
                    listing.push_str(&format!(
                        "{}\t{}\t{},{}\t{}\n",
                        arabic(token, ar),
                        segs.join("+"),
                        arabic(&a.lemma, ar),
                        a.code,
                        a.features
                    ));
                }
            }
            emit(out.as_deref(), &listing, stdout)?;
            Ok(0)
        }
        Command::Validate { lexicon: path } => {
            let (file, diags) = lexicon::validate_lexicon(&read(&path)?);
            print_diags(&diags, stdout)?;
            let errors = diags.iter().filter(|d| d.is_error()).count();
            writeln!(stdout, "{} entries, {} errors, {} warnings", file.entries.len(), errors, diags.len() - errors)?;
            Ok(i32::from(errors > 0))
        }
        Command::Stats { text, source, out } => {
            let mut report = String::new();
            if source.dict.is_none() {
                let (file, _): (LexiconFile, _) = lexicon::parse_lexicon(&lexicon_text(source.lexicon.as_deref())?);
                report.push_str("# lexicon\n");
                report.push_str(&lexicon::lexicon_stats(&file).to_string());
            }
            let dict = load_dict(&source)?;
            report.push_str("# dictionary\n");
            report.push_str(&dict.stats().to_string());
            if let Some(t) = text {
                let bn = text_as_bn(&t)?;
                let seg = Segmenter::new(&dict, source.mode.into());
                report.push_str("# coverage\n");
                report.push_str(&segmenter::coverage(&bn, &seg).to_string());
            }
            emit(out.as_deref(), &report, stdout)?;
            Ok(0)
        }
        Command::Concord { text, mask, source, arabic: ar, out } => {
            let mask = FeatureMask::parse(&mask)?;
            let bn = text_as_bn(&text)?;
            let dict = load_dict(&source)?;
            let seg = Segmenter::new(&dict, source.mode.into());
            let mut listing = String::new();
            for mut line in segmenter::concordance(&bn, &seg, &mask) {
                if ar {
                    line.left = arabic(&line.left, true);
                    line.matched = arabic(&line.matched, true);
                    line.right = arabic(&line.right, true);
                }
                listing.push_str(&format!("{line}\n"));
            }
            emit(out.as_deref(), &listing, stdout)?;
            Ok(0)
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = if e.use_stderr() { write!(stderr, "{}", e.render()) } else { write!(stdout, "{}", e.render()) };
            return e.exit_code();
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            2
        }
    }
}
