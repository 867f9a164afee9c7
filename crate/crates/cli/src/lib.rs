//! Command-line front end: reads law documents, runs the analyses of
//! `fitzlaw` and renders JSON reports.
//!
//! Exit codes: 0 success, 2 parse error, 3 invariant violation, 4 requested
//! order beyond the certified one, 5 internal error.

pub mod input;
pub mod output;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use fitzlaw::bipotential::{self, AxiomReport, Bipotential, Fitzpatrick, Sampler, Separable};
use fitzlaw::coaxial::{self, CoaxialLaw, SymTensor3};
use fitzlaw::fitzpatrick::{self, build_kernels, QuadraticPotential};
use fitzlaw::monotone::{self, OrderOptions};
use fitzlaw::{oracle, Definiteness, LinearLaw, MaxOrder, Order, SeqIndex};
use nalgebra::DVector;
use serde::Serialize;

pub use input::{parse_law, read_law, Law, LawDoc};
use output::{rows, to_json, vec, Ext};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    Parse(String),
    Invariant(String),
    OrderExceeded(String),
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Invariant(_) => 3,
            Failure::OrderExceeded(_) => 4,
            Failure::Internal(_) => 5,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Parse(m)
            | Failure::Invariant(m)
            | Failure::OrderExceeded(m)
            | Failure::Internal(m) => m,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.message())
    }
}

impl From<fitzlaw::Error> for Failure {
    fn from(e: fitzlaw::Error) -> Self {
        use fitzlaw::Error as E;
        let msg = e.to_string();
        match e {
            E::KernelFailed { .. }
            | E::OrderExceeded { .. }
            | E::NotStrictlyMonotone
            | E::NotMonotone
            | E::NotCyclic => Failure::OrderExceeded(msg),
            E::DimensionMismatch { .. } | E::InvalidOrder(_) => Failure::Parse(msg),
            E::NonSymmetric { .. }
            | E::NotPsd { .. }
            | E::NotPd { .. }
            | E::NotApplicable(_)
            | E::InvalidInput(_)
            | E::LimitExceeded { .. } => Failure::Invariant(msg),
            E::SingularSystem => Failure::Internal(msg),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fitzlaw",
    version,
    about = "Monotonicity order and Fitzpatrick bipotentials of linear laws"
)]
pub struct Cli {
    /// Print a human-readable summary to stderr.
    #[arg(long, global = true)]
    pub verbose: bool,
    /// Also report angles in degrees.
    #[arg(long, global = true)]
    pub degrees: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decomposition, definiteness and maximal monotonicity order of a law.
    Analyze(AnalyzeArgs),
    /// Maximal monotonicity order only.
    Order(AnalyzeArgs),
    /// Evaluate F_{A,n}(x, y).
    Fitz(FitzArgs),
    /// Cauchy–Schwarz bipotentials and axiom validation.
    Bipotential(BipotentialArgs),
    /// Randomized search for a violating n-cycle.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Law document (JSON).
    pub file: PathBuf,
    /// Seed for any oracle search; echoed in the report.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random cycles per oracle query.
    #[arg(long, default_value_t = 20_000)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct FitzArgs {
    pub file: PathBuf,
    /// Order n ≥ 2, or `inf` for symmetric laws.
    #[arg(long)]
    pub n: SeqIndex,
    #[arg(long, required = true, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Vec<f64>,
    #[arg(long, required = true, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
    pub y: Vec<f64>,
    /// Cross-check against the direct stationarity solve.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("mode").required(true).args(["cs", "validate"])))]
pub struct BipotentialArgs {
    /// Evaluate the Cauchy–Schwarz bipotential b_n(x, y).
    #[arg(long, requires_all = ["n", "x", "y"])]
    pub cs: bool,
    /// Sample the bipotential axioms for the law in FILE.
    #[arg(long, value_name = "FILE", requires = "seed")]
    pub validate: Option<PathBuf>,
    /// Order n ≥ 2 or `inf`. With --validate, selects F_{A,n}; without it the
    /// separable bipotential of a symmetric law is used.
    #[arg(long)]
    pub n: Option<SeqIndex>,
    #[arg(long, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Vec<f64>,
    #[arg(long, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
    pub y: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 20_000)]
    pub trials: usize,
    /// With --y, also bound F_{A,n}(x, y) from below by sampling and compare
    /// with the direct solve.
    #[arg(long, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true, requires = "y")]
    pub x: Vec<f64>,
    #[arg(long, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true, requires = "x")]
    pub y: Vec<f64>,
}

/// Rendered result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
}

struct Display {
    verbose: bool,
    degrees: bool,
    summary: String,
}

impl Display {
    fn angle(&self, theta: f64) -> String {
        if self.degrees {
            format!("{:.10} deg", theta.to_degrees())
        } else {
            format!("{theta:.10} rad")
        }
    }

    fn line(&mut self, text: impl AsRef<str>) {
        if self.verbose {
            self.summary.push_str(text.as_ref());
            self.summary.push('\n');
        }
    }
}

pub fn run(cli: &Cli) -> Result<Output, Failure> {
    let mut disp = Display {
        verbose: cli.verbose,
        degrees: cli.degrees,
        summary: String::new(),
    };
    let stdout = match &cli.command {
        Command::Analyze(a) => analyze(a, &mut disp)?,
        Command::Order(a) => order(a, &mut disp)?,
        Command::Fitz(a) => fitz(a, &mut disp)?,
        Command::Bipotential(a) => bipotential_cmd(a, &mut disp)?,
        Command::Oracle(a) => oracle_cmd(a, &mut disp)?,
    };
    Ok(Output {
        stdout,
        stderr: disp.summary,
    })
}

fn load(path: &std::path::Path) -> Result<(LawDoc, Law), Failure> {
    let doc = read_law(path)?;
    let law = doc.build()?;
    Ok((doc.canonical()?, law))
}

fn dvec(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

#[derive(Serialize)]
#[serde(untagged)]
enum IndexJson {
    Finite(usize),
    Infinite(&'static str),
}

fn index_json(n: SeqIndex) -> IndexJson {
    match n {
        SeqIndex::Finite(n) => IndexJson::Finite(n),
        SeqIndex::Infinite => IndexJson::Infinite("inf"),
    }
}

#[derive(Serialize)]
struct OrderReport {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<usize>,
    certified_by: &'static str,
    boundary: bool,
    theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta_degrees: Option<f64>,
    witness: Option<Vec<Vec<f64>>>,
    witness_cycle_sum: Option<f64>,
}

fn order_report(law: &LinearLaw, m: &MaxOrder, degrees: bool) -> OrderReport {
    let (kind, value) = match m.order {
        Order::Finite(n) => ("finite", Some(n)),
        Order::Cyclic => ("cyclic", None),
        Order::NotMonotone => ("not-monotone", None),
        Order::AtLeast(n) => ("at-least", Some(n)),
    };
    let witness_cycle_sum = m
        .witness
        .as_ref()
        .and_then(|w| monotone::cycle_sum(law, w).ok());
    OrderReport {
        kind,
        value,
        certified_by: m.certified_by.as_str(),
        boundary: m.boundary,
        theta: m.theta,
        theta_degrees: m.theta.filter(|_| degrees).map(f64::to_degrees),
        witness: m.witness.as_ref().map(|w| w.iter().map(vec).collect()),
        witness_cycle_sum,
    }
}

fn describe_order(m: &MaxOrder) -> String {
    match m.order {
        Order::Finite(n) => format!("{n}-monotone, not {}-monotone", n + 1),
        Order::Cyclic => "cyclically monotone".into(),
        Order::NotMonotone => "not monotone".into(),
        Order::AtLeast(n) => format!("at least {n}-monotone"),
    }
}

#[derive(Serialize)]
struct Decomposition {
    symmetric: Vec<Vec<f64>>,
    skew: Vec<Vec<f64>>,
    skew_norm: f64,
    symmetric_law: bool,
}

#[derive(Serialize)]
struct CoaxialReport {
    lambda: f64,
    mu: f64,
    h: [f64; 6],
    h_norm: f64,
    three_lambda_plus_two_mu: f64,
    hooke: bool,
    monotone: bool,
    theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta_degrees: Option<f64>,
    coordinates: &'static str,
}

const MANDEL: &str = "x11, x22, x33, sqrt2*x12, sqrt2*x13, sqrt2*x23";

#[derive(Serialize)]
struct AnalyzeReport {
    command: &'static str,
    version: &'static str,
    seed: u64,
    trials: usize,
    law: LawDoc,
    dim: usize,
    decomposition: Decomposition,
    definiteness: Definiteness,
    monotone: bool,
    max_order: OrderReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    coaxial: Option<CoaxialReport>,
}

fn coaxial_order(c: &CoaxialLaw, lin: &LinearLaw, opts: &OrderOptions) -> MaxOrder {
    // non-monotone coaxial laws: the generic path supplies the 2-cycle witness
    coaxial::max_order_coaxial(c).unwrap_or_else(|_| monotone::max_order(lin, opts))
}

fn order_of(law: &Law, lin: &LinearLaw, opts: &OrderOptions) -> MaxOrder {
    match law {
        Law::Matrix(l) => monotone::max_order(l, opts),
        Law::Coaxial(c) => coaxial_order(c, lin, opts),
    }
}

fn analyze(a: &AnalyzeArgs, disp: &mut Display) -> Result<String, Failure> {
    let (doc, law) = load(&a.file)?;
    let lin = law.linear();
    let opts = OrderOptions {
        seed: a.seed,
        trials: a.trials,
        ..OrderOptions::default()
    };
    let m = order_of(&law, &lin, &opts);
    let def = lin.definiteness();
    let coax = match &law {
        Law::Coaxial(c) => {
            let check = c.monotone_check();
            Some(CoaxialReport {
                lambda: c.lambda(),
                mu: c.mu(),
                h: c.h().entries(),
                h_norm: c.h_norm(),
                three_lambda_plus_two_mu: c.bulk(),
                hooke: c.is_hooke(),
                monotone: check.monotone,
                theta: check.theta,
                theta_degrees: check.theta.filter(|_| disp.degrees).map(f64::to_degrees),
                coordinates: MANDEL,
            })
        }
        Law::Matrix(_) => None,
    };
    let report = AnalyzeReport {
        command: "analyze",
        version: VERSION,
        seed: a.seed,
        trials: a.trials,
        law: doc.clone(),
        dim: lin.dim(),
        decomposition: Decomposition {
            symmetric: rows(lin.sym().matrix()),
            skew: rows(lin.skew()),
            skew_norm: lin.skew_norm(),
            symmetric_law: lin.is_symmetric(),
        },
        definiteness: def,
        monotone: def.is_psd(),
        max_order: order_report(&lin, &m, disp.degrees),
        coaxial: coax,
    };
    disp.line(format!("law: {}", doc.name().unwrap_or("(unnamed)")));
    disp.line(format!(
        "symmetric part: {:?}, eigenvalues in [{:.6e}, {:.6e}]",
        def.class, def.min_eigenvalue, def.max_eigenvalue
    ));
    disp.line(format!(
        "order: {} ({})",
        describe_order(&m),
        m.certified_by.as_str()
    ));
    if let Some(t) = m.theta {
        let angle = disp.angle(t);
        disp.line(format!("theta: {angle}"));
    }
    if let Law::Coaxial(c) = &law {
        disp.line(format!("hooke: {}", c.is_hooke()));
    }
    Ok(to_json(&report))
}

#[derive(Serialize)]
struct OrderOnly {
    command: &'static str,
    version: &'static str,
    seed: u64,
    trials: usize,
    law: LawDoc,
    max_order: OrderReport,
}

fn order(a: &AnalyzeArgs, disp: &mut Display) -> Result<String, Failure> {
    let (doc, law) = load(&a.file)?;
    let lin = law.linear();
    let opts = OrderOptions {
        seed: a.seed,
        trials: a.trials,
        ..OrderOptions::default()
    };
    let m = order_of(&law, &lin, &opts);
    disp.line(format!(
        "order: {} ({})",
        describe_order(&m),
        m.certified_by.as_str()
    ));
    Ok(to_json(&OrderOnly {
        command: "order",
        version: VERSION,
        seed: a.seed,
        trials: a.trials,
        law: doc,
        max_order: order_report(&lin, &m, disp.degrees),
    }))
}

#[derive(Serialize)]
struct KernelReport {
    index: usize,
    status: &'static str,
    matrix: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct OracleCheck {
    direct: Option<f64>,
    relative_discrepancy: Option<f64>,
    error: Option<String>,
}

#[derive(Serialize)]
struct CoaxialPath {
    value: Ext,
    relative_discrepancy: f64,
    coordinates: &'static str,
}

#[derive(Serialize)]
struct FitzReport {
    command: &'static str,
    version: &'static str,
    law: LawDoc,
    n: IndexJson,
    x: Vec<f64>,
    y: Vec<f64>,
    value: Ext,
    duality: f64,
    kernel: Option<KernelReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coaxial: Option<CoaxialPath>,
}

fn rel_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(1.0)
    }
}

fn check_len(flag: &str, v: &[f64], dim: usize) -> Result<(), Failure> {
    if v.len() != dim {
        return Err(Failure::Parse(format!(
            "--{flag}: expected {dim} components, got {}",
            v.len()
        )));
    }
    Ok(())
}

/// Coaxial laws take tensors as their six entries `(11, 22, 33, 12, 13, 23)`.
fn law_vectors(law: &Law, x: &[f64], y: &[f64]) -> Result<(DVector<f64>, DVector<f64>), Failure> {
    let dim = law.linear().dim();
    check_len("x", x, dim)?;
    check_len("y", y, dim)?;
    Ok(match law {
        Law::Matrix(_) => (dvec(x), dvec(y)),
        Law::Coaxial(_) => (tensor(x).to_vec6(), tensor(y).to_vec6()),
    })
}

fn tensor(v: &[f64]) -> SymTensor3 {
    SymTensor3(std::array::from_fn(|i| v[i]))
}

fn fitz(a: &FitzArgs, disp: &mut Display) -> Result<String, Failure> {
    let (doc, law) = load(&a.file)?;
    let lin = law.linear();
    let (x, y) = law_vectors(&law, &a.x, &a.y)?;
    let (value, kernel, n_fin) = match a.n {
        SeqIndex::Infinite => {
            if !lin.is_symmetric() {
                return Err(fitzlaw::Error::NotCyclic.into());
            }
            let v = fitzpatrick::eval_f_symmetric(lin.sym(), SeqIndex::Infinite, &x, &y)?;
            (v, None, None)
        }
        SeqIndex::Finite(n) => {
            if n < 2 {
                return Err(Failure::Parse(format!(
                    "--n: order must be at least 2, got {n}"
                )));
            }
            let k = build_kernels(&lin, n)?;
            let v = k.eval(n, &x, &y)?;
            let h = k.h(n).expect("evaluable kernel");
            let report = KernelReport {
                index: n,
                status: k.status(n).as_str(),
                matrix: rows(h.matrix()),
            };
            (v, Some(report), Some(n))
        }
    };
    let oracle = match (a.oracle, n_fin) {
        (true, Some(n)) => Some(match oracle::direct_f(&lin, n, &x, &y) {
            Ok(d) => OracleCheck {
                direct: Some(d),
                relative_discrepancy: Some(rel_gap(value, d)),
                error: None,
            },
            Err(e) => OracleCheck {
                direct: None,
                relative_discrepancy: None,
                error: Some(e.to_string()),
            },
        }),
        (true, None) => Some(OracleCheck {
            direct: None,
            relative_discrepancy: None,
            error: Some("no direct solve for n = inf".into()),
        }),
        _ => None,
    };
    let coax = match (&law, n_fin) {
        (Law::Coaxial(c), Some(n)) => {
            let k = coaxial::coaxial_kernels(c, n)?;
            let v = k.eval(n, &tensor(&a.x), &tensor(&a.y))?;
            Some(CoaxialPath {
                value: Ext(v),
                relative_discrepancy: rel_gap(value, v),
                coordinates: "tensor entries 11, 22, 33, 12, 13, 23",
            })
        }
        _ => None,
    };
    disp.line(format!("F_{{A,{}}}(x, y) = {value:.17e}", a.n));
    if let Some(o) = &oracle {
        match (o.direct, o.relative_discrepancy) {
            (Some(d), Some(g)) => disp.line(format!(
                "direct solve: {d:.17e} (relative discrepancy {g:.3e})"
            )),
            _ => disp.line(format!(
                "direct solve: {}",
                o.error.as_deref().unwrap_or("unavailable")
            )),
        }
    }
    if let Some(c) = &coax {
        disp.line(format!(
            "coaxial path: {:.17e} (relative discrepancy {:.3e})",
            c.value.0, c.relative_discrepancy
        ));
    }
    Ok(to_json(&FitzReport {
        command: "fitz",
        version: VERSION,
        law: doc,
        n: index_json(a.n),
        x: a.x.clone(),
        y: a.y.clone(),
        value: Ext(value),
        duality: x.dot(&y),
        kernel,
        oracle,
        coaxial: coax,
    }))
}

#[derive(Serialize)]
struct CsReport {
    command: &'static str,
    version: &'static str,
    mode: &'static str,
    n: IndexJson,
    x: Vec<f64>,
    y: Vec<f64>,
    value: f64,
    duality: f64,
}

#[derive(Serialize)]
struct ValidateReport {
    command: &'static str,
    version: &'static str,
    mode: &'static str,
    law: LawDoc,
    bipotential: &'static str,
    n: Option<IndexJson>,
    sampler: Sampler,
    passed: bool,
    verdict: String,
    axioms: AxiomReport,
}

fn bipotential_cmd(a: &BipotentialArgs, disp: &mut Display) -> Result<String, Failure> {
    if a.cs {
        let n = a.n.expect("clap enforces --n with --cs");
        if a.x.len() != a.y.len() {
            return Err(Failure::Parse(format!(
                "--x and --y differ in length ({} vs {})",
                a.x.len(),
                a.y.len()
            )));
        }
        let (x, y) = (dvec(&a.x), dvec(&a.y));
        let value = bipotential::eval_cs(n, &x, &y)?;
        disp.line(format!("b_{n}(x, y) = {value:.17e}"));
        return Ok(to_json(&CsReport {
            command: "bipotential",
            version: VERSION,
            mode: "cauchy-schwarz",
            n: index_json(n),
            x: a.x.clone(),
            y: a.y.clone(),
            value,
            duality: x.dot(&y),
        }));
    }
    let path = a.validate.as_ref().expect("clap enforces a mode");
    let seed = a.seed.expect("clap enforces --seed with --validate");
    let (doc, law) = load(path)?;
    let lin = law.linear();
    let sampler = Sampler::default();
    let (name, report) = match a.n {
        None | Some(SeqIndex::Infinite) => {
            if !lin.is_symmetric() {
                return Err(Failure::Invariant(
                    "the separable bipotential needs a symmetric law; pass --n for F_{A,n}".into(),
                ));
            }
            let phi = QuadraticPotential::new(lin.sym().clone())?;
            let b = Separable(phi);
            ("separable", validate(&b, &sampler, a.samples, seed)?)
        }
        Some(SeqIndex::Finite(n)) => {
            let kernel = build_kernels(&lin, n)?;
            if kernel.max_evaluable() < n {
                return Err(Failure::OrderExceeded(format!(
                    "order {n} exceeds the strict order: kernel stops at index {}",
                    kernel.stop_index().unwrap_or(n)
                )));
            }
            let b = Fitzpatrick { kernel, order: n };
            ("fitzpatrick", validate(&b, &sampler, a.samples, seed)?)
        }
    };
    let passed = report.passed();
    let verdict = if passed {
        format!("no counterexample found among {} samples", a.samples)
    } else {
        "counterexample found".to_string()
    };
    disp.line(format!("{name}: {verdict}"));
    Ok(to_json(&ValidateReport {
        command: "bipotential",
        version: VERSION,
        mode: "validate",
        law: doc,
        bipotential: name,
        n: a.n.map(index_json),
        sampler,
        passed,
        verdict,
        axioms: report,
    }))
}

fn validate(
    b: &dyn Bipotential,
    sampler: &Sampler,
    count: usize,
    seed: u64,
) -> Result<AxiomReport, Failure> {
    Ok(bipotential::validate_axioms(b, sampler, count, seed)?)
}

#[derive(Serialize)]
struct WitnessReport {
    cycle: Vec<Vec<f64>>,
    cycle_sum: f64,
    scale: f64,
}

#[derive(Serialize)]
struct SupremumReport {
    x: Vec<f64>,
    y: Vec<f64>,
    sampled_lower_bound: f64,
    direct: Option<f64>,
    direct_error: Option<String>,
}

#[derive(Serialize)]
struct OracleReport {
    command: &'static str,
    version: &'static str,
    law: LawDoc,
    n: usize,
    seed: u64,
    trials: usize,
    verdict: String,
    witness: Option<WitnessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    supremum: Option<SupremumReport>,
}

fn oracle_cmd(a: &OracleArgs, disp: &mut Display) -> Result<String, Failure> {
    let (doc, law) = load(&a.file)?;
    let lin = law.linear();
    let found = oracle::falsify_n_monotone(&lin, a.n, a.trials, a.seed)?;
    let verdict = match &found {
        Some(_) => format!("not {}-monotone: violating cycle found", a.n),
        None => format!("no violating {}-cycle found among {} trials", a.n, a.trials),
    };
    let supremum = if a.x.is_empty() {
        None
    } else {
        let (x, y) = law_vectors(&law, &a.x, &a.y)?;
        let lower = oracle::sup_sample_f(&lin, a.n, &x, &y, a.trials, a.seed)?;
        let (direct, direct_error) = match oracle::direct_f(&lin, a.n, &x, &y) {
            Ok(d) => (Some(d), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Some(SupremumReport {
            x: a.x.clone(),
            y: a.y.clone(),
            sampled_lower_bound: lower,
            direct,
            direct_error,
        })
    };
    disp.line(&verdict);
    if let Some(s) = &supremum {
        let mut line = format!("sampled lower bound: {:.17e}", s.sampled_lower_bound);
        if let Some(d) = s.direct {
            let _ = write!(line, ", direct solve: {d:.17e}");
        }
        disp.line(line);
    }
    Ok(to_json(&OracleReport {
        command: "oracle",
        version: VERSION,
        law: doc,
        n: a.n,
        seed: a.seed,
        trials: a.trials,
        verdict,
        witness: found.map(|w| WitnessReport {
            cycle: w.cycle.iter().map(vec).collect(),
            cycle_sum: w.cycle_sum,
            scale: w.scale,
        }),
        supremum,
    }))
}
