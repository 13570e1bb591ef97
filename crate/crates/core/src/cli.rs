//! Batch command-line front end.
//!
//! Every command is a pure function of its input document and flags. The
//! result is a [`CliOutput`] so tests can drive the tool without a process.
//! Exit codes: 0 success, 1 semantic failure, 2 input error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::algebra::{
    check_axioms, decompose, is_simple, measurability_report, verify_partition, AlgebraError, CosetRelationAlgebra,
    DEFAULT_SAMPLE_SEED,
};
use crate::document::{parse_group_expr, DocumentError, FrameSpecDocument, GroupKind, GroupSpec, RefutationDocument};
use crate::frame::{check_coset_conditions, check_semi_frame, GroupTriple, ValidationReport};
use crate::nonrep::{build_pentagon_over, refute, NonrepError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "coset-ra", version, about = "Coset relation algebras from group triples")]
pub struct Args {
    /// Worker threads for the parallel checks (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Include the elapsed time in the report (it always goes to stderr).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableOp {
    Otimes,
    Compose,
    Converse,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Semi-frame and coset conditions.
    Validate { spec: PathBuf },
    /// Build the algebra and check that the atoms partition every block.
    Build { spec: PathBuf },
    /// Atom listing as TSV.
    Atoms {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Operation table as TSV.
    Table {
        spec: PathBuf,
        #[arg(long, value_enum)]
        op: TableOp,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relation-algebra axioms at the atom level.
    Axioms {
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_SEED)]
        seed: u64,
    },
    /// Measures of the subidentity atoms.
    Measure { spec: PathBuf },
    /// Components and the direct-product correspondence.
    Decompose { spec: PathBuf },
    /// Generate the pentagon frame spec over `base^3`.
    Pentagon {
        #[arg(long, default_value = "Z2")]
        base: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scaffold enumeration and chase; writes the certificates.
    Refute {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace every coset by the identity coset first.
        #[arg(long)]
        identity_cosets: bool,
    },
    /// Replay a certificate file.
    Recheck { certificate: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub name: String,
    pub checked: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Count {
    pub name: String,
    pub value: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub name: String,
    pub instance: Vec<String>,
    pub detail: String,
}

/// What a command found. Field order is fixed; `timing_ms` only appears
/// with `--timing`, so reports are otherwise byte-stable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub passed: bool,
    pub outcomes: Vec<Outcome>,
    pub counts: Vec<Count>,
    pub failures: Vec<Failure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl RunReport {
    fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            passed: true,
            outcomes: Vec::new(),
            counts: Vec::new(),
            failures: Vec::new(),
            timing_ms: None,
        }
    }

    fn outcome(&mut self, name: impl Into<String>, checked: usize, failed: usize) {
        self.passed &= failed == 0;
        self.outcomes.push(Outcome { name: name.into(), checked, failed });
    }

    fn count(&mut self, name: &str, value: usize) {
        self.counts.push(Count { name: name.to_string(), value });
    }

    fn fail(&mut self, name: impl Into<String>, instance: Vec<String>, detail: impl Into<String>) {
        self.passed = false;
        self.failures.push(Failure { name: name.into(), instance, detail: detail.into() });
    }

    fn add_validation(&mut self, r: &ValidationReport) {
        if let Some(p) = &r.precondition {
            self.fail("precondition", Vec::new(), p.clone());
        }
        for (c, ok, bad) in r.summary() {
            self.outcome(c.to_string(), ok + bad, bad);
        }
        for e in r.failures() {
            let detail = e.witness.as_ref().map(|w| w.note.clone()).unwrap_or_default();
            self.failures.push(Failure { name: e.condition.to_string(), instance: e.instance.clone(), detail });
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Machine => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut s = String::new();
                let verdict = if self.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(s, "{}: {verdict}", self.command);
                for o in &self.outcomes {
                    let tag = if o.failed == 0 { "ok  " } else { "FAIL" };
                    let _ = writeln!(s, "{tag} {} ({} checked, {} failed)", o.name, o.checked, o.failed);
                }
                for c in &self.counts {
                    let _ = writeln!(s, "{}: {}", c.name, c.value);
                }
                for f in &self.failures {
                    if f.instance.is_empty() {
                        let _ = writeln!(s, "failure: {}: {}", f.name, f.detail);
                    } else {
                        let _ = writeln!(s, "failure: {} at ({}): {}", f.name, f.instance.join(", "), f.detail);
                    }
                }
                if let Some(ms) = self.timing_ms {
                    let _ = writeln!(s, "elapsed: {ms} ms");
                }
                s
            }
        }
    }
}

/// Errors that stop a command before it produces a report.
#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Nonrep(#[from] NonrepError),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Io(..) | CliError::Document(_) => EXIT_INPUT,
            CliError::Nonrep(NonrepError::NonAbelianBase | NonrepError::TrivialBase) => EXIT_INPUT,
            CliError::Algebra(_) | CliError::Nonrep(_) => EXIT_FAIL,
        }
    }
}

/// Output of one command: the report, or raw text such as TSV tables.
enum Body {
    Report(RunReport),
    Raw { text: String, passed: bool },
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                CliOutput { code, stdout: text, stderr: String::new() }
            } else {
                CliOutput { code, stdout: String::new(), stderr: text }
            };
        }
    };
    run_args(&args)
}

pub fn run_args(args: &Args) -> CliOutput {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(args.jobs).build() {
        Ok(p) => p,
        Err(e) => return CliOutput { code: EXIT_INPUT, stdout: String::new(), stderr: format!("error: {e}\n") },
    };
    let start = Instant::now();
    let result = pool.install(|| dispatch(&args.command));
    let elapsed = start.elapsed().as_millis() as u64;
    let mut stderr = String::new();
    let (code, stdout) = match result {
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            (e.code(), String::new())
        }
        Ok(Body::Raw { text, passed }) => (if passed { EXIT_OK } else { EXIT_FAIL }, text),
        Ok(Body::Report(mut r)) => {
            if args.timing {
                r.timing_ms = Some(elapsed);
            }
            (if r.passed { EXIT_OK } else { EXIT_FAIL }, r.render(args.format))
        }
    };
    let _ = writeln!(stderr, "elapsed: {elapsed} ms");
    CliOutput { code, stdout, stderr }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn load(path: &Path) -> Result<GroupTriple, CliError> {
    Ok(FrameSpecDocument::from_json(&read(path)?)?.to_triple()?)
}

fn algebra(path: &Path) -> Result<CosetRelationAlgebra, CliError> {
    Ok(CosetRelationAlgebra::build(&load(path)?)?)
}

/// Writes to `out` if given, otherwise returns the text for stdout.
fn emit(out: &Option<PathBuf>, text: String) -> Result<String, CliError> {
    match out {
        Some(p) => {
            write(p, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn dispatch(cmd: &Command) -> Result<Body, CliError> {
    match cmd {
        Command::Validate { spec } => {
            let t = load(spec)?;
            let mut r = RunReport::new("validate");
            r.add_validation(&check_semi_frame(&t));
            let mut cosets = check_coset_conditions(&t);
            // The semi-frame families are already listed above.
            cosets.precondition = None;
            r.add_validation(&cosets);
            r.count("indices", t.len());
            Ok(Body::Report(r))
        }
        Command::Build { spec } => {
            let t = load(spec)?;
            let mut r = RunReport::new("build");
            let alg = match CosetRelationAlgebra::build(&t) {
                Ok(a) => a,
                Err(e) => {
                    r.fail("build", Vec::new(), e.to_string());
                    return Ok(Body::Report(r));
                }
            };
            let parts = verify_partition(&alg);
            let bad: Vec<_> = parts.iter().filter(|p| !p.ok()).collect();
            r.outcome("block partition", parts.len(), bad.len());
            for p in bad {
                r.failures.push(Failure {
                    name: "block partition".into(),
                    instance: vec![p.x.clone(), p.y.clone()],
                    detail: format!("nonempty {}, disjoint {}, covers {}", p.nonempty, p.disjoint, p.covers_block),
                });
            }
            r.count("indices", t.len());
            r.count("blocks", parts.len());
            r.count("atoms", alg.atom_count());
            Ok(Body::Report(r))
        }
        Command::Atoms { spec, out } => {
            let alg = algebra(spec)?;
            let text = atoms_tsv(&alg);
            Ok(Body::Raw { text: emit(out, text)?, passed: true })
        }
        Command::Table { spec, op, out } => {
            let alg = algebra(spec)?;
            let text = table_tsv(&alg, *op);
            Ok(Body::Raw { text: emit(out, text)?, passed: true })
        }
        Command::Axioms { spec, seed } => {
            let alg = algebra(spec)?;
            let rep = check_axioms(&alg, *seed);
            let mut r = RunReport::new("axioms");
            for o in &rep.outcomes {
                r.outcome(o.axiom.to_string(), o.checked, o.failed);
                for f in &o.failures {
                    r.failures.push(Failure {
                        name: o.axiom.to_string(),
                        instance: f.witness.clone(),
                        detail: f.detail.clone(),
                    });
                }
            }
            r.count("atoms", alg.atom_count());
            r.count("seed", rep.sample_seed as usize);
            Ok(Body::Report(r))
        }
        Command::Measure { spec } => {
            let alg = algebra(spec)?;
            let rep = measurability_report(&alg);
            let mut r = RunReport::new("measure");
            for e in &rep.entries {
                r.outcome(format!("measure of {}", e.index), 1, (!e.ok()) as usize);
                r.count(&format!("measure {}", e.index), e.measure);
                if !e.ok() {
                    r.failures.push(Failure {
                        name: "measurability".into(),
                        instance: vec![e.index.clone()],
                        detail: format!(
                            "measure {} of order {}, full {}, disjoint {}, bijective {}, functional {}",
                            e.measure, e.group_order, e.square_is_full, e.disjoint, e.bijective, e.functional
                        ),
                    });
                }
            }
            r.count("subidentity atoms", rep.entries.len());
            Ok(Body::Report(r))
        }
        Command::Decompose { spec } => {
            let alg = algebra(spec)?;
            let d = decompose(&alg)?;
            let mut r = RunReport::new("decompose");
            r.outcome("product correspondence", 1, (!d.verified()) as usize);
            for m in &d.mismatches {
                r.fail("product correspondence", Vec::new(), m.clone());
            }
            r.count("components", d.factors.len());
            r.count("simple", is_simple(&alg) as usize);
            for (i, f) in d.factors.iter().enumerate() {
                r.count(&format!("component {i} indices"), f.triple().len());
                r.count(&format!("component {i} atoms"), f.atom_count());
            }
            Ok(Body::Report(r))
        }
        Command::Pentagon { base, out } => {
            let g = parse_group_expr(base)?;
            let build = build_pentagon_over(&g)?;
            let doc = pentagon_document(base, &build.triple)?;
            let text = doc.to_json();
            match out {
                Some(p) => {
                    write(p, &text)?;
                    let mut r = RunReport::new("pentagon");
                    r.add_validation(&build.report);
                    r.count("labelings tried", build.labelings_tried);
                    r.count("twist", build.twist);
                    Ok(Body::Report(r))
                }
                None => Ok(Body::Raw { text, passed: true }),
            }
        }
        Command::Refute { spec, out, identity_cosets } => {
            let mut t = load(spec)?;
            if *identity_cosets {
                t = GroupTriple::identity_cosets(t.pair().clone());
            }
            let alg = CosetRelationAlgebra::build(&t)?;
            let summary = refute(&alg)?;
            let mut r = RunReport::new("refute");
            r.outcome("refuted", summary.chase_scaffolds, summary.chase_scaffolds - summary.refuted);
            r.outcome(
                "scaffold properties",
                summary.chase_scaffolds,
                summary.chase_scaffolds - summary.properties_hold,
            );
            r.count("full scaffolds", summary.full_scaffolds);
            r.count("chase scaffolds", summary.chase_scaffolds);
            r.count("refuted", summary.refuted);
            r.count("all refuted", summary.all_refuted as usize);
            if !summary.all_refuted {
                r.fail("refutation", Vec::new(), "some scaffold survives the chase");
            }
            if let Some(p) = out {
                let doc = RefutationDocument { frame: FrameSpecDocument::from_triple(&t), summary };
                write(p, &doc.to_json())?;
            }
            Ok(Body::Report(r))
        }
        Command::Recheck { certificate } => {
            let doc = RefutationDocument::from_json(&read(certificate)?)?;
            let mut r = RunReport::new("recheck");
            let s = &doc.summary;
            match doc.recheck() {
                Ok(()) => r.outcome("certificates", s.certificates.len(), 0),
                Err(e) => {
                    r.outcome("certificates", s.certificates.len(), 1);
                    r.fail("recheck", Vec::new(), e.to_string());
                }
            }
            r.count("chase scaffolds", s.chase_scaffolds);
            r.count("refuted", s.refuted);
            r.count("all refuted", s.all_refuted as usize);
            if !s.all_refuted {
                r.fail("refutation", Vec::new(), "the summary does not refute every scaffold");
            }
            Ok(Body::Report(r))
        }
    }
}

/// Product groups over the base when that reproduces the built tables,
/// Cayley tables otherwise.
fn pentagon_document(base: &str, t: &GroupTriple) -> Result<FrameSpecDocument, CliError> {
    let parts: Vec<String> = base.split(['x', '*']).map(|s| s.trim().to_string()).collect();
    let factors: Vec<String> = (0..3).flat_map(|_| parts.iter().cloned()).collect();
    let groups = (0..t.len())
        .map(|x| GroupSpec { name: t.name(x).to_string(), kind: GroupKind::Product { factors: factors.clone() } })
        .collect();
    let doc = FrameSpecDocument::with_groups(t, groups);
    let back = doc.to_triple()?;
    let same = (0..t.len()).all(|x| back.group(x).rows() == t.group(x).rows());
    Ok(if same { doc } else { FrameSpecDocument::from_triple(t) })
}

pub fn atoms_tsv(alg: &CosetRelationAlgebra) -> String {
    let t = alg.triple();
    let mut s = String::from("index\tx\ty\talpha\tpairs\n");
    for (i, a) in alg.atoms().iter().enumerate() {
        let _ = writeln!(s, "{i}\t{}\t{}\t{}\t{}", t.name(a.x), t.name(a.y), a.alpha, alg.atom_relation(i).count());
    }
    s
}

fn join(it: impl Iterator<Item = usize>) -> String {
    it.map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

/// `converse`: one row per atom. `otimes` and `compose`: one row per ordered
/// atom pair, the result as comma-separated atom indices. A composition that
/// is not a union of atoms is written `not-in-A`.
pub fn table_tsv(alg: &CosetRelationAlgebra, op: TableOp) -> String {
    let n = alg.atom_count();
    let mut s = String::new();
    match op {
        TableOp::Converse => {
            s.push_str("atom\tconverse\n");
            for i in 0..n {
                let _ = writeln!(s, "{i}\t{}", alg.atom_converse(i));
            }
        }
        TableOp::Otimes => {
            s.push_str("left\tright\totimes\n");
            for i in 0..n {
                for j in 0..n {
                    let _ = writeln!(s, "{i}\t{j}\t{}", join(alg.atom_otimes(i, j).ones()));
                }
            }
        }
        TableOp::Compose => {
            s.push_str("left\tright\tcompose\n");
            for i in 0..n {
                for j in 0..n {
                    let c = alg.atom_compose_relational(i, j);
                    let cell = match &c.element {
                        Some(e) => join(e.atoms()),
                        None => "not-in-A".to_string(),
                    };
                    let _ = writeln!(s, "{i}\t{j}\t{cell}");
                }
            }
        }
    }
    s
}
