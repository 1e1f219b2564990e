//! The `sgo` command line.
//!
//! Exit codes: 0 success or suite pass, 1 property violation, 2 usage or
//! input error, 3 precision exhausted.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::ColoredDivisor;
use crate::error::{Error, Result};
use crate::io::{parse_json, parse_matrix, parse_point_or_matrix, versioned};
use crate::laurent::{with_precision_retry, DEFAULT_PRECISION};
use crate::loopmat::d_matrix;
use crate::orbits::{classify, semi_infinite_weight, OrbitPoint};
use crate::superroots::{
    composite_roots, is_hw_dominant, is_relevant, leq, orbit_weights, pairing, rho_circ, simple_roots, CompositeCoeffs, Parity, SuperWeight,
};
use crate::verify::{run_suite, SuiteParams};
use crate::zastava::{cor813_classify, intersection_dim_bound, Cor813};

#[derive(Parser, Debug)]
#[command(name = "sgo", version, about = "Orbit and root combinatorics for gl(M|N) loop groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Rank {
    #[arg(long = "M")]
    pub m: usize,
    #[arg(long = "N")]
    pub n: usize,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Component {
    #[value(name = "grM")]
    GrM,
    #[value(name = "grN")]
    GrN,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simple roots with parities and the composite GL roots.
    Roots {
        #[command(flatten)]
        rank: Rank,
        #[command(flatten)]
        out: Output,
    },
    /// Orbit indices in the box with relevance flags and orbit dimensions.
    Enumerate {
        #[command(flatten)]
        rank: Rank,
        #[arg(long = "box", default_value_t = 1)]
        box_bound: i64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        out: Output,
    },
    /// The orbit index of a Gr_N point given as a matrix file.
    Classify {
        #[arg(long)]
        matrix: PathBuf,
        #[command(flatten)]
        rank: Rank,
        #[arg(long, env = "SGO_PRECISION", default_value_t = DEFAULT_PRECISION)]
        prec: i64,
        #[command(flatten)]
        out: Output,
    },
    /// The semi-infinite orbit through a point of Gr_M × Gr_N.
    SemiInfinite {
        /// A `{"grM", "grN"}` point file, or a single matrix.
        #[arg(long)]
        matrix: PathBuf,
        #[command(flatten)]
        rank: Rank,
        /// Which component a single-matrix file holds; the other is the
        /// base point (identity on Gr_M, 𝔇 on Gr_N).
        #[arg(long, value_enum, default_value_t = Component::GrN)]
        component: Component,
        #[command(flatten)]
        out: Output,
    },
    /// Hasse diagram of the closure order on relevant weights, as DOT.
    Closure {
        #[command(flatten)]
        rank: Rank,
        #[arg(long = "box", default_value_t = 1)]
        box_bound: i64,
        #[command(flatten)]
        out: Output,
    },
    /// Intersection dimension bound and the parity dichotomy for w_S ≤ w_O.
    ZastavaBound {
        #[arg(long = "wO")]
        w_o: PathBuf,
        #[arg(long = "wS")]
        w_s: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Line-bundle exponents of a colored divisor.
    ConfigExponents {
        #[arg(long)]
        divisor: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// roundtrip | prop81 | closure | relevance | config
    pub suite: String,
    #[command(flatten)]
    pub rank: Rank,
    #[arg(long = "box", default_value_t = 2)]
    pub box_bound: i64,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "SGO_PRECISION", default_value_t = DEFAULT_PRECISION)]
    pub prec: i64,
    #[arg(long, default_value_t = 2)]
    pub pole_bound: i64,
    #[arg(long, default_value_t = 20)]
    pub failure_cap: usize,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// The validated settings shared by the subcommands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliConfig {
    pub m: usize,
    pub n: usize,
    pub box_bound: i64,
    pub samples: usize,
    pub seed: u64,
    pub precision: i64,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl CliConfig {
    pub fn new(rank: &Rank) -> Self {
        CliConfig { m: rank.m, n: rank.n, box_bound: 0, samples: 0, seed: 0, precision: DEFAULT_PRECISION, output: None, format: Format::Json }
    }

    pub fn validate(self) -> Result<Self> {
        crate::superroots::check_rank(self.m, self.n)?;
        if self.box_bound < 0 {
            return Err(Error::Parse("--box must be nonnegative".into()));
        }
        if self.precision < 8 {
            return Err(Error::Parse("precision must be at least 8".into()));
        }
        Ok(self)
    }
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| Error::Parse(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(body: T) -> String {
    serde_json::to_string_pretty(&versioned(body)).expect("output serializes")
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InsufficientPrecision => 3,
        _ => 2,
    }
}

#[derive(Serialize)]
struct RootEntry {
    index: usize,
    vector: Vec<i64>,
    parity: Parity,
}

#[derive(Serialize)]
struct RootsDoc {
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    simple_roots: Vec<RootEntry>,
    composite_gl_m: Vec<Vec<i64>>,
    composite_gl_n: Vec<Vec<i64>>,
}

pub fn cmd_roots(cfg: &CliConfig) -> Result<String> {
    let simple = simple_roots(cfg.m, cfg.n)?.into_iter().map(|r| RootEntry { index: r.index, vector: r.vector, parity: r.parity }).collect();
    let (gm, gn) = composite_roots(cfg.m, cfg.n)?;
    Ok(to_json(RootsDoc {
        m: cfg.m,
        n: cfg.n,
        simple_roots: simple,
        composite_gl_m: gm.into_iter().map(|r| r.coeffs).collect(),
        composite_gl_n: gn.into_iter().map(|r| r.coeffs).collect(),
    }))
}

#[derive(Serialize)]
pub struct EnumEntry {
    pub weight: SuperWeight,
    pub relevant: bool,
    pub hw_dominant: bool,
    pub dimension: i64,
}

#[derive(Serialize)]
struct EnumDoc {
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "box")]
    box_bound: i64,
    count: usize,
    relevant_count: usize,
    weights: Vec<EnumEntry>,
}

/// Orbit indices in the box, lexicographic in (λ, θ, θ′), with flags and
/// the orbit dimension ⟨2ρ°, w⟩.
pub fn enumerate(cfg: &CliConfig) -> Result<Vec<EnumEntry>> {
    let rho = rho_circ(cfg.m, cfg.n)?;
    orbit_weights(cfg.m, cfg.n, cfg.box_bound)?
        .into_iter()
        .map(|w| {
            Ok(EnumEntry { relevant: is_relevant(&w), hw_dominant: is_hw_dominant(&w), dimension: pairing(&rho, &w)?, weight: w })
        })
        .collect()
}

pub fn cmd_enumerate(cfg: &CliConfig) -> Result<String> {
    let weights = enumerate(cfg)?;
    let relevant_count = weights.iter().filter(|e| e.relevant).count();
    if cfg.format == Format::Text {
        let mut s = String::new();
        for e in &weights {
            let w = &e.weight;
            let _ = writeln!(s, "{:?} {:?} {:?}\trelevant={} hw={} dim={}", w.lambda, w.theta, w.theta_prime, e.relevant, e.hw_dominant, e.dimension);
        }
        let _ = write!(s, "# {} orbit indices, {} relevant", weights.len(), relevant_count);
        return Ok(s);
    }
    Ok(to_json(EnumDoc { m: cfg.m, n: cfg.n, box_bound: cfg.box_bound, count: weights.len(), relevant_count, weights }))
}

pub fn cmd_classify(cfg: &CliConfig, matrix: &str) -> Result<String> {
    let a = parse_matrix(matrix)?;
    let w = with_precision_retry(cfg.precision, |p| classify(&a.truncate(p), cfg.m, cfg.n))?;
    Ok(to_json(w))
}

pub fn cmd_semi_infinite(cfg: &CliConfig, text: &str, component: Component) -> Result<String> {
    let p = match parse_point_or_matrix(text)? {
        Ok(p) => p,
        Err(a) => match component {
            Component::GrN => OrbitPoint { gr_m: None, gr_n: a },
            Component::GrM => OrbitPoint { gr_m: Some(a), gr_n: d_matrix(cfg.m, cfg.n) },
        },
    };
    Ok(to_json(semi_infinite_weight(&p, cfg.m, cfg.n)?))
}

/// Covering pairs `(i, j)` with `ws[i] < ws[j]` in the root order.
pub fn hasse_edges(ws: &[SuperWeight]) -> Result<Vec<(usize, usize)>> {
    let k = ws.len();
    let mut lt = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..k {
            lt[i][j] = i != j && leq(&ws[i], &ws[j])?;
        }
    }
    let mut edges = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if lt[i][j] && !(0..k).any(|c| lt[i][c] && lt[c][j]) {
                edges.push((i, j));
            }
        }
    }
    Ok(edges)
}

fn label(w: &SuperWeight) -> String {
    let j = |v: &[i64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    format!("({}|{}|{})", j(&w.lambda), j(&w.theta), j(&w.theta_prime))
}

pub fn cmd_closure(cfg: &CliConfig) -> Result<String> {
    let ws: Vec<SuperWeight> = orbit_weights(cfg.m, cfg.n, cfg.box_bound)?.into_iter().filter(is_relevant).collect();
    let edges = hasse_edges(&ws)?;
    let mut s = String::from("digraph closure {\n  rankdir=BT;\n");
    for (i, w) in ws.iter().enumerate() {
        let _ = writeln!(s, "  n{i} [label=\"{}\"];", label(w));
    }
    for (i, j) in edges {
        let _ = writeln!(s, "  n{i} -> n{j};");
    }
    s.push('}');
    Ok(s)
}

#[derive(Serialize)]
struct ZastavaDoc {
    zastava_dim: i64,
    bound: i64,
    witnesses: Vec<SuperWeight>,
    dichotomy: &'static str,
    /// 1-based index of the odd simple root, for the off-by-one case.
    odd_root: Option<usize>,
    composite: Option<CompositeCoeffs>,
}

pub fn cmd_zastava_bound(w_o: &str, w_s: &str) -> Result<String> {
    let (wo, ws): (SuperWeight, SuperWeight) = (parse_json(w_o)?, parse_json(w_s)?);
    let rep = intersection_dim_bound(&wo, &ws)?;
    let (dichotomy, odd_root, composite) = match cor813_classify(&wo, &ws)? {
        Cor813::Even(c) => ("even", None, Some(c)),
        Cor813::OddPlusAlpha(i, c) => ("odd_plus_alpha", Some(i), Some(c)),
        Cor813::Neither => ("neither", None, None),
    };
    Ok(to_json(ZastavaDoc { zastava_dim: rep.zastava_dim, bound: rep.bound, witnesses: rep.witnesses, dichotomy, odd_root, composite }))
}

#[derive(Serialize)]
struct ExponentsDoc {
    exponents: std::collections::BTreeMap<String, i64>,
    degree: SuperWeight,
    open_stratum: bool,
}

pub fn cmd_config_exponents(divisor: &str) -> Result<String> {
    let d = ColoredDivisor::from_json(parse_json(divisor)?)?;
    Ok(to_json(ExponentsDoc { exponents: d.line_bundle_exponents(), degree: d.degree(), open_stratum: d.is_open_stratum() }))
}

/// Runs a suite; returns the report text and its exit code.
pub fn cmd_verify(args: &VerifyArgs) -> Result<(String, i32)> {
    let cfg = CliConfig { box_bound: args.box_bound, samples: args.samples, seed: args.seed, precision: args.prec, ..CliConfig::new(&args.rank) }.validate()?;
    if args.pole_bound > 4 {
        eprintln!("warning: pole bound {} above 4 needs much higher precision", args.pole_bound);
    }
    let params = SuiteParams {
        m: cfg.m,
        n: cfg.n,
        box_bound: cfg.box_bound,
        samples: cfg.samples,
        seed: cfg.seed,
        precision: cfg.precision,
        pole_bound: args.pole_bound,
        failure_cap: args.failure_cap,
    };
    let report = run_suite(&args.suite, &params)?;
    eprintln!(
        "{}: {} trials, {} violations, {} precision failures, {:.2}s",
        report.suite,
        report.trials,
        report.violations,
        report.precision_failures,
        report.elapsed.as_secs_f64()
    );
    Ok((serde_json::to_string_pretty(&report).expect("reports serialize"), report.exit_code()))
}

fn dispatch(cli: Cli) -> Result<i32> {
    use Command::*;
    let (text, out, code) = match cli.command {
        Roots { rank, out } => (cmd_roots(&CliConfig::new(&rank).validate()?)?, out.output, 0),
        Enumerate { rank, box_bound, format, out } => {
            let cfg = CliConfig { box_bound, format, ..CliConfig::new(&rank) }.validate()?;
            (cmd_enumerate(&cfg)?, out.output, 0)
        }
        Classify { matrix, rank, prec, out } => {
            let cfg = CliConfig { precision: prec, ..CliConfig::new(&rank) }.validate()?;
            (cmd_classify(&cfg, &read(&matrix)?)?, out.output, 0)
        }
        SemiInfinite { matrix, rank, component, out } => {
            let cfg = CliConfig::new(&rank).validate()?;
            (cmd_semi_infinite(&cfg, &read(&matrix)?, component)?, out.output, 0)
        }
        Closure { rank, box_bound, out } => {
            let cfg = CliConfig { box_bound, ..CliConfig::new(&rank) }.validate()?;
            (cmd_closure(&cfg)?, out.output, 0)
        }
        ZastavaBound { w_o, w_s, out } => (cmd_zastava_bound(&read(&w_o)?, &read(&w_s)?)?, out.output, 0),
        ConfigExponents { divisor, out } => (cmd_config_exponents(&read(&divisor)?)?, out.output, 0),
        Verify(args) => {
            let (text, code) = cmd_verify(&args)?;
            (text, args.json.clone(), code)
        }
    };
    emit(&out, &text)?;
    Ok(code)
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
