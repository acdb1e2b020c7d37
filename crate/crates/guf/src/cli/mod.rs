//! Command-line front end.
//!
//! Subcommands: `classify`, `check`, `normalize`, `sat`, `bisim`,
//! `amalgam`, `distinguish`, `gen`, `verify-cert`. Every subcommand can
//! emit a machine-readable JSON report (`--json`); with `--no-timings` the
//! report is byte-identical across runs of the same configuration and
//! seed. Exit codes: `sat` returns 0 for satisfiable, 1 for
//! no-witness-up-to-bound, 2 for unknown; `verify-cert` returns 1 for a
//! certificate that fails re-verification; I/O errors exit 3, parse errors
//! 4, validation errors 5.

mod report;

pub use report::Report;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::bisim::{bisimilar, distinguishing_formula, maximal_bisimulation};
use crate::gen::{random_formula, random_structure, rng};
use crate::normform::to_normal_form;
use crate::sat::{
    build_model, decide_sat, verify_certificate, Certificate, SatVerdict, TypeSetStrategy,
};
use crate::structures::{evaluate, Assignment, Elem, Structure, StructureFile};
use crate::syntax::{classify, parse, parse_lenient, print, Formula, Var, Vocabulary};

#[derive(Debug, Parser)]
#[command(name = "guf", version, about = "Toolkit for uniform guarded fragments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Omit timings from reports, making them byte-identical across runs.
    #[arg(long, global = true)]
    pub no_timings: bool,
    /// Worker threads for independent work items; 1 is deterministic.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a formula: guarded, one-dimensional, uniform.
    Classify(FormulaInput),
    /// Evaluate a formula in a structure.
    Check {
        /// Structure file (JSON).
        structure: PathBuf,
        #[command(flatten)]
        formula: FormulaInput,
        /// Variable assignment, e.g. `x=a,y=b`.
        #[arg(long)]
        assign: Option<String>,
    },
    /// Transform a sentence into normal form, exploring all guesses.
    Normalize {
        #[command(flatten)]
        formula: FormulaInput,
        /// Show only this branch (0-based).
        #[arg(long, conflicts_with = "all")]
        branch: Option<usize>,
        /// Show every branch (the default).
        #[arg(long)]
        all: bool,
    },
    /// Decide bounded witness satisfiability.
    Sat {
        #[command(flatten)]
        formula: FormulaInput,
        /// Maximum witness model size.
        #[arg(long, default_value_t = 3)]
        witness_bound: usize,
        /// Size bound for the brute-force model oracle (0 disables it).
        #[arg(long, default_value_t = 0)]
        model_bound: usize,
        /// Write the certificate to this file when satisfiable.
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Build a model from the certificate, unfolded to this depth.
        #[arg(long)]
        depth: Option<usize>,
        /// Candidate type-set strategy.
        #[arg(long, default_value = "elimination")]
        strategy: TypeSetStrategy,
    },
    /// Compute the maximal bisimulation between two structures.
    Bisim {
        a: PathBuf,
        b: PathBuf,
        /// Shared vocabulary, e.g. `R,P`.
        #[arg(long)]
        sigma: String,
        /// Pointed tuples, e.g. `a,b=c,d`.
        #[arg(long)]
        tuple: Option<String>,
        /// Also search for a distinguishing formula when not bisimilar.
        #[arg(long)]
        distinguish: bool,
        /// Block-depth bound for the distinguishing search.
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Build the amalgam of two bisimilar structures.
    Amalgam {
        a: PathBuf,
        b: PathBuf,
        /// Left vocabulary, e.g. `G,R`.
        #[arg(long)]
        sigma: String,
        /// Right vocabulary, e.g. `R,A`.
        #[arg(long)]
        tau: String,
        /// Write the amalgam structure to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a formula distinguishing two pointed structures.
    Distinguish {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        tuple: Option<String>,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Generate seeded random structures or formulas.
    Gen {
        /// Generate structures.
        #[arg(long, conflicts_with = "formulas")]
        structures: bool,
        /// Generate formulas.
        #[arg(long)]
        formulas: bool,
        /// Domain size (structures) in elements.
        #[arg(long, default_value_t = 3)]
        size: usize,
        /// Block-depth bound (formulas).
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Vocabulary, e.g. `P:1,R:2`.
        #[arg(long, default_value = "P:1,R:2")]
        vocab: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Tuple density for structures.
        #[arg(long, default_value_t = 0.4)]
        density: f64,
    },
    /// Re-verify a certificate produced by `sat`.
    VerifyCert {
        certificate: PathBuf,
        #[command(flatten)]
        formula: FormulaInput,
    },
}

#[derive(Debug, Args)]
pub struct FormulaInput {
    /// Formula file (UTF-8, one formula).
    pub file: Option<PathBuf>,
    /// Formula text given directly.
    #[arg(long)]
    pub inline: Option<String>,
}

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Parse(String),
    Invalid(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 3,
            CliError::Parse(_) => 4,
            CliError::Invalid(_) => 5,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::Parse(m) | CliError::Invalid(m) => m,
        }
    }
}

impl FormulaInput {
    fn text(&self) -> Result<String, CliError> {
        match (&self.file, &self.inline) {
            (_, Some(text)) => Ok(text.clone()),
            (Some(path), None) => std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
            (None, None) => Err(CliError::Invalid(
                "a formula file or --inline text is required".to_string(),
            )),
        }
    }

    fn parse_strict(&self) -> Result<Formula, CliError> {
        parse(self.text()?.trim()).map_err(|e| CliError::Parse(e.to_string()))
    }

    fn parse_lenient(&self) -> Result<Formula, CliError> {
        parse_lenient(self.text()?.trim()).map_err(|e| CliError::Parse(e.to_string()))
    }

    fn echo(&self) -> String {
        match (&self.file, &self.inline) {
            (_, Some(t)) => format!("inline:{t}"),
            (Some(p), None) => p.display().to_string(),
            (None, None) => String::new(),
        }
    }
}

fn load_structure(path: &PathBuf) -> Result<Structure, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Structure::from_json(&text).map_err(CliError::Parse)
}

/// Resolves a comma-separated relation list against the structures that
/// must interpret it. Unknown names are load-time errors.
fn parse_vocab_names(
    list: &str,
    sources: &[&Structure],
) -> Result<Vocabulary, CliError> {
    let mut vocab = Vocabulary::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let arity = sources
            .iter()
            .find_map(|s| s.vocabulary().arity(name))
            .ok_or_else(|| {
                CliError::Invalid(format!("unknown relation name {name}"))
            })?;
        vocab
            .insert(name, arity)
            .map_err(|e| CliError::Invalid(e.to_string()))?;
    }
    if vocab.is_empty() {
        return Err(CliError::Invalid("empty vocabulary list".to_string()));
    }
    Ok(vocab)
}

fn parse_vocab_spec(spec: &str) -> Result<Vocabulary, CliError> {
    let mut vocab = Vocabulary::new();
    for entry in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, arity) = entry
            .split_once(':')
            .ok_or_else(|| CliError::Invalid(format!("bad vocabulary entry {entry}")))?;
        let arity: usize = arity
            .parse()
            .map_err(|_| CliError::Invalid(format!("bad arity in {entry}")))?;
        vocab
            .insert(name.trim(), arity)
            .map_err(|e| CliError::Invalid(e.to_string()))?;
    }
    if vocab.is_empty() {
        return Err(CliError::Invalid("empty vocabulary spec".to_string()));
    }
    Ok(vocab)
}

/// Parses `a,b=c,d` into a pair of element tuples.
fn parse_tuple_pair(spec: &str) -> Result<(Vec<Elem>, Vec<Elem>), CliError> {
    let (lhs, rhs) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Invalid("tuple must have the form a,b=c,d".to_string()))?;
    let split = |side: &str| -> Vec<Elem> {
        side.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(Elem::new)
            .collect()
    };
    Ok((split(lhs), split(rhs)))
}

fn parse_assignment(spec: &str) -> Result<Assignment, CliError> {
    let mut asg = Assignment::new();
    for entry in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (var, elem) = entry
            .split_once('=')
            .ok_or_else(|| CliError::Invalid(format!("bad assignment entry {entry}")))?;
        asg.insert(Var::new(var.trim()), Elem::new(elem.trim()));
    }
    Ok(asg)
}

struct Timings {
    enabled: bool,
    entries: BTreeMap<String, f64>,
}

impl Timings {
    fn time<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            self.entries
                .insert(label.to_string(), start.elapsed().as_secs_f64() * 1e3);
        }
        out
    }
}

/// Runs a parsed command line and returns the report together with the
/// process exit code.
pub fn run(cli: &Cli) -> Result<(Report, i32), CliError> {
    let mut timings = Timings { enabled: !cli.no_timings, entries: BTreeMap::new() };
    let mut report = Report::new(command_name(&cli.command));
    let mut exit = 0i32;
    match &cli.command {
        Command::Classify(input) => {
            let f = input.parse_lenient()?;
            report.config_str("formula", input.echo());
            let fragment = timings.time("classify", || classify(&f));
            report.text(format!(
                "guarded: {}\none-dimensional: {}\nuniform: {}",
                fragment.guarded, fragment.one_dimensional, fragment.uniform
            ));
            for (sub, rule) in &fragment.offending {
                report.text(format!("offending ({rule:?}): {sub}"));
            }
            report.results(serde_json::json!({
                "guarded": fragment.guarded,
                "one_dimensional": fragment.one_dimensional,
                "uniform": fragment.uniform,
                "in_guf1": fragment.in_guf1(),
                "in_ugf": fragment.in_ugf(),
                "offending": fragment.offending,
                "formula": print(&f),
            }));
        }
        Command::Check { structure, formula, assign } => {
            let s = load_structure(structure)?;
            let f = formula.parse_strict()?;
            let asg = match assign {
                Some(spec) => parse_assignment(spec)?,
                None => Assignment::new(),
            };
            report.config_str("structure", structure.display().to_string());
            report.config_str("formula", formula.echo());
            let holds = timings
                .time("evaluate", || evaluate(&s, &f, &asg))
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            report.text(format!("holds: {holds}"));
            report.results(serde_json::json!({ "holds": holds }));
        }
        Command::Normalize { formula, branch, all: _ } => {
            let f = formula.parse_strict()?;
            report.config_str("formula", formula.echo());
            let branches = timings
                .time("normalize", || to_normal_form(&f))
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            let mut shown = Vec::new();
            for (i, b) in branches.iter().enumerate() {
                if let Some(k) = branch {
                    if *k != i {
                        continue;
                    }
                }
                let sentence = b.result.as_sentence();
                report.text(format!("branch {i}: {}", print(&sentence)));
                report.text(format!(
                    "  seeds: {}, existential: {}, universal: {}, fresh: {}",
                    b.result.seeds.len(),
                    b.result.existential.len(),
                    b.result.universal.len(),
                    b.fresh_symbols
                        .iter()
                        .map(|s| s.name.clone())
                        .collect::<Vec<_>>()
                        .join(",")
                ));
                shown.push(serde_json::json!({
                    "index": i,
                    "sentence": print(&sentence),
                    "guesses": b.guesses.iter()
                        .map(|(g, v)| serde_json::json!({"subformula": print(g), "value": v}))
                        .collect::<Vec<_>>(),
                    "seeds": b.result.seeds.len(),
                    "existential": b.result.existential.len(),
                    "universal": b.result.universal.len(),
                    "fresh_symbols": b.fresh_symbols.iter()
                        .map(|s| format!("{}:{}", s.name, s.arity))
                        .collect::<Vec<_>>(),
                }));
            }
            if let Some(k) = branch {
                if *k >= branches.len() {
                    return Err(CliError::Invalid(format!(
                        "branch {k} out of range ({} branches)",
                        branches.len()
                    )));
                }
            }
            report.results(serde_json::json!({
                "branch_count": branches.len(),
                "branches": shown,
            }));
        }
        Command::Sat {
            formula,
            witness_bound,
            model_bound,
            certificate,
            depth,
            strategy,
        } => {
            let f = formula.parse_strict()?;
            report.config_str("formula", formula.echo());
            report.config_str("witness_bound", witness_bound.to_string());
            report.config_str("model_bound", model_bound.to_string());
            report.config_str("strategy", format!("{strategy:?}"));
            let fragment = classify(&f);
            if !fragment.uniform {
                report.text("note: input is not uniform; verdicts are certificate-relative".to_string());
            }
            let outcome = timings
                .time("decide", || decide_sat(&f, *witness_bound, *strategy, cli.jobs))
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            exit = outcome.verdict.exit_code();
            let mut results = serde_json::json!({
                "verdict": outcome.verdict.label(),
                "branch_count": outcome.branch_count,
                "witness_bound": witness_bound,
                "uniform": fragment.uniform,
            });
            match &outcome.verdict {
                SatVerdict::Satisfiable(cert) => {
                    report.text(format!(
                        "satisfiable: branch {}, {} types, witnesses of size <= {}",
                        cert.branch_index,
                        cert.types.len(),
                        cert.witnesses.values().map(|w| w.model.size()).max().unwrap_or(0)
                    ));
                    results["branch"] = serde_json::json!(cert.branch_index);
                    results["types"] = serde_json::json!(cert.types.len());
                    if let Some(path) = certificate {
                        let file = cert.to_file();
                        std::fs::write(
                            path,
                            serde_json::to_string_pretty(&file)
                                .expect("certificates serialize"),
                        )
                        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                        report.text(format!("certificate written to {}", path.display()));
                    }
                    if let Some(d) = depth {
                        let branches = to_normal_form(&f)
                            .map_err(|e| CliError::Invalid(e.to_string()))?;
                        let nf = &branches[cert.branch_index].result;
                        let built = build_model(&cert.types, &cert.witnesses, nf, *d)
                            .map_err(|e| CliError::Invalid(e.to_string()))?;
                        report.text(format!(
                            "built model at depth {d}: {} elements",
                            built.structure.size()
                        ));
                        results["built_model"] = serde_json::to_value(
                            StructureFile::from_structure(&built.structure),
                        )
                        .expect("structures serialize");
                    }
                }
                SatVerdict::NoWitnessUpToBound(bound) => {
                    report.text(format!("no witness up to bound {bound}"));
                }
                SatVerdict::Unknown(reason) => {
                    report.text(format!("unknown: {reason}"));
                    results["reason"] = serde_json::json!(reason);
                }
            }
            if *model_bound > 0 {
                let oracle = timings
                    .time("oracle", || crate::structures::brute_force_sat(&f, *model_bound))
                    .map_err(CliError::Invalid)?;
                match &oracle {
                    Some(model) => {
                        report.text(format!("oracle: model of size {}", model.size()));
                        results["oracle"] = serde_json::json!({
                            "model_size": model.size(),
                        });
                    }
                    None => {
                        report.text(format!("oracle: no model up to size {model_bound}"));
                        results["oracle"] = serde_json::json!({
                            "none_up_to": model_bound,
                        });
                    }
                }
            }
            report.results(results);
        }
        Command::Bisim { a, b, sigma, tuple, distinguish, depth } => {
            let sa = load_structure(a)?;
            let sb = load_structure(b)?;
            let vocab = parse_vocab_names(sigma, &[&sa, &sb])?;
            report.config_str("a", a.display().to_string());
            report.config_str("b", b.display().to_string());
            report.config_str("sigma", sigma.clone());
            let (ca, cb) = match tuple {
                Some(spec) => parse_tuple_pair(spec)?,
                None => (Vec::new(), Vec::new()),
            };
            let verdict = timings
                .time("bisimilar", || bisimilar(&sa, &ca, &sb, &cb, &vocab))
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            let fixpoint = maximal_bisimulation(&sa, &sb, &vocab, None)
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            report.text(format!("bisimilar: {verdict}"));
            report.text(format!("maximal bisimulation: {} maps", fixpoint.len()));
            let mut results = serde_json::json!({
                "bisimilar": verdict,
                "map_count": fixpoint.len(),
            });
            if *distinguish && !verdict {
                let found = timings
                    .time("distinguish", || {
                        distinguishing_formula(&sa, &ca, &sb, &cb, &vocab, *depth)
                    })
                    .map_err(|e| CliError::Invalid(e.to_string()))?;
                match found {
                    Some(f) => {
                        report.text(format!("distinguishing formula: {}", print(&f)));
                        results["distinguishing"] = serde_json::json!(print(&f));
                    }
                    None => {
                        report.text(format!("no distinguishing formula up to depth {depth}"));
                        results["distinguishing"] = serde_json::Value::Null;
                    }
                }
            }
            report.results(results);
        }
        Command::Amalgam { a, b, sigma, tau, out } => {
            let sa = load_structure(a)?;
            let sb = load_structure(b)?;
            let sigma_v = parse_vocab_names(sigma, &[&sa])?;
            let tau_v = parse_vocab_names(tau, &[&sb])?;
            report.config_str("a", a.display().to_string());
            report.config_str("b", b.display().to_string());
            report.config_str("sigma", sigma.clone());
            report.config_str("tau", tau.clone());
            let shared = sigma_v.intersection(&tau_v);
            let z = timings
                .time("bisimulation", || {
                    maximal_bisimulation(&sa, &sb, &shared, None)
                })
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            let am = timings
                .time("amalgam", || {
                    crate::amalgam::build_amalgam(&sa, &sb, &z, &sigma_v, &tau_v)
                })
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            let (z1, z2) = crate::amalgam::projection_maps(&am, &sigma_v, &tau_v)
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            let lemma2 =
                crate::amalgam::check_lemma2(&am, &sa, &sb, &z1, &z2, &sigma_v, &tau_v)
                    .map_err(|e| CliError::Invalid(e.to_string()))?;
            let lemma3 =
                crate::amalgam::check_lemma3(&am, &sa, &sb, &z1, &z2, &sigma_v, &tau_v)
                    .map_err(|e| CliError::Invalid(e.to_string()))?;
            report.text(format!(
                "amalgam: {} elements, projection check: {}, closure check: {}",
                am.structure.size(),
                if lemma2.passed() { "pass" } else { "fail" },
                if lemma3.passed() { "pass" } else { "fail" },
            ));
            for v in lemma2.violations.iter().chain(&lemma3.violations).take(10) {
                report.text(format!("violation: {v}"));
            }
            let structure_json = StructureFile::from_structure(&am.structure);
            if let Some(path) = out {
                std::fs::write(
                    path,
                    serde_json::to_string_pretty(&structure_json)
                        .expect("structures serialize"),
                )
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                report.text(format!("amalgam written to {}", path.display()));
            }
            report.results(serde_json::json!({
                "size": am.structure.size(),
                "projection_check": lemma2.passed(),
                "closure_check": lemma3.passed(),
                "violations": lemma2.violations.iter().chain(&lemma3.violations)
                    .cloned().collect::<Vec<_>>(),
                "structure": structure_json,
            }));
            if !lemma2.passed() || !lemma3.passed() {
                exit = 1;
            }
        }
        Command::Distinguish { a, b, sigma, tuple, depth } => {
            let sa = load_structure(a)?;
            let sb = load_structure(b)?;
            let vocab = parse_vocab_names(sigma, &[&sa, &sb])?;
            let (ca, cb) = match tuple {
                Some(spec) => parse_tuple_pair(spec)?,
                None => (Vec::new(), Vec::new()),
            };
            report.config_str("a", a.display().to_string());
            report.config_str("b", b.display().to_string());
            report.config_str("sigma", sigma.clone());
            let found = timings
                .time("distinguish", || {
                    distinguishing_formula(&sa, &ca, &sb, &cb, &vocab, *depth)
                })
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            match &found {
                Some(f) => report.text(format!("distinguishing formula: {}", print(f))),
                None => report.text(format!("no distinguishing formula up to depth {depth}")),
            }
            report.results(serde_json::json!({
                "distinguishing": found.as_ref().map(print),
                "depth": depth,
            }));
        }
        Command::Gen { structures, formulas, size, depth, vocab, seed, count, density } => {
            let vocabulary = parse_vocab_spec(vocab)?;
            report.config_str("vocab", vocab.clone());
            report.seed(*seed);
            let mut generator = rng(*seed);
            let mut items = Vec::new();
            if *formulas && !structures {
                for _ in 0..*count {
                    let f = random_formula(&vocabulary, &[], *depth, &mut generator);
                    report.text(print(&f));
                    items.push(serde_json::json!(print(&f)));
                }
            } else {
                for _ in 0..*count {
                    let s = random_structure(&vocabulary, *size, *density, &mut generator);
                    let file = StructureFile::from_structure(&s);
                    report.text(
                        serde_json::to_string(&file).expect("structures serialize"),
                    );
                    items.push(serde_json::to_value(file).expect("structures serialize"));
                }
            }
            report.results(serde_json::json!({ "items": items }));
        }
        Command::VerifyCert { certificate, formula } => {
            let f = formula.parse_strict()?;
            let text = std::fs::read_to_string(certificate)
                .map_err(|e| CliError::Io(format!("{}: {e}", certificate.display())))?;
            let file: crate::sat::CertificateFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Parse(format!("certificate: {e}")))?;
            let cert = Certificate::from_file(file)
                .map_err(|e| CliError::Parse(e.to_string()))?;
            let ok = timings
                .time("verify", || verify_certificate(&f, &cert))
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            report.text(format!("certificate verifies: {ok}"));
            report.results(serde_json::json!({ "verifies": ok }));
            if !ok {
                exit = 1;
            }
        }
    }
    if timings.enabled {
        report.timings(timings.entries);
    }
    Ok((report, exit))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Classify(_) => "classify",
        Command::Check { .. } => "check",
        Command::Normalize { .. } => "normalize",
        Command::Sat { .. } => "sat",
        Command::Bisim { .. } => "bisim",
        Command::Amalgam { .. } => "amalgam",
        Command::Distinguish { .. } => "distinguish",
        Command::Gen { .. } => "gen",
        Command::VerifyCert { .. } => "verify-cert",
    }
}

/// Entry point for the binary: parse, run, print, exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, code)) => {
            if cli.json {
                println!("{}", report.to_json());
            } else {
                for line in report.lines() {
                    println!("{line}");
                }
            }
            code
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

