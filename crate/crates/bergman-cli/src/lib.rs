//! Command-line front end: domain tables, numerical checks, the atomic
//! decomposition experiment and the acceptance suite.

pub mod config;
pub mod output;
pub mod suite;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use bergman::analysis::{forelli_rudin, schur_probe, FR_BOUNDARY_RADII};
use bergman::atoms::{build_lattice, default_fibers, reconstruct, FrameModel};
use bergman::cayley::isometry_check;
use bergman::domain::{coifman_rochberg_p_range, make_domain, DomainParams, Q};
use bergman::geometry::identity_residuals;
use bergman::holo::CoeffFunction;
use bergman::rep::{normalize_psi, wavelet, wavelet_su11, GroupGrid};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use config::ExperimentConfig;
use output::{emit, object, Format, Report, Table};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Lib(bergman::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<bergman::Error> for CliError {
    fn from(e: bergman::Error) -> Self {
        CliError::Lib(e)
    }
}

/// Exit codes: 0 success, 1 usage or runtime error, 2 acceptance failure.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_ACCEPTANCE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "bergman", version, about = "Wavelet transforms and atomic decompositions on weighted Bergman spaces")]
pub struct Cli {
    /// Experiment configuration (TOML key = value file); flags override it
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output format
    #[arg(long = "out", global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report to this file (atomically) instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Seed for every random choice
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Domain constants and parameter windows
    Domain {
        #[command(subcommand)]
        cmd: DomainCmd,
    },
    /// Group identity residuals
    Geom {
        #[command(subcommand)]
        cmd: GeomCmd,
    },
    /// Wavelet transform samples
    Rep {
        #[command(subcommand)]
        cmd: RepCmd,
    },
    /// Forelli-Rudin integrals and the Schur probe
    Analysis {
        #[command(subcommand)]
        cmd: AnalysisCmd,
    },
    /// Atomic decomposition on a lattice
    Atoms {
        #[command(subcommand)]
        cmd: AtomsCmd,
    },
    /// Transfer to the upper half-plane
    Cayley {
        #[command(subcommand)]
        cmd: CayleyCmd,
    },
    /// Acceptance criteria
    Suite {
        #[command(subcommand)]
        cmd: SuiteCmd,
    },
}

#[derive(Debug, Subcommand)]
pub enum DomainCmd {
    /// (n, n1, r, a, g), the Coifman-Rochberg p-range and optionally the windows
    Info {
        /// disc, ball:n or type1:p,q
        #[arg(long, default_value = "disc")]
        kind: String,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GeomCmd {
    /// Identity residuals on random group elements
    Check {
        /// complex dimension; 0 runs n = 1 and n = 2
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum RepCmd {
    /// Samples of W_ψ f on a group grid, one row per node
    Wavelet(WaveletArgs),
}

#[derive(Debug, Args)]
pub struct WaveletArgs {
    #[arg(long)]
    pub gamma: Option<f64>,
    /// const, poly:c0,c1,... or file:PATH
    #[arg(long)]
    pub psi: Option<String>,
    /// f as CoeffFunction JSON; a seeded random polynomial otherwise
    #[arg(long, value_name = "FILE")]
    pub f: Option<PathBuf>,
    /// section:RxA or group:RxAxT (radial, angular and θ orders)
    #[arg(long, default_value = "section:16x32")]
    pub grid: String,
    /// complex dimension
    #[arg(long, default_value_t = 1)]
    pub n: usize,
}

#[derive(Debug, Subcommand)]
pub enum AnalysisCmd {
    /// J_{b,c}(t e1) towards the boundary, with the boundedness verdict
    Fr {
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value = "disc")]
        domain: String,
    },
    /// Schur-test bank for T on L^p_α
    Schur {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value = "disc")]
        domain: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum AtomsCmd {
    /// Build the lattice, run the Neumann reconstruction and report errors
    Run(AtomsArgs),
}

#[derive(Debug, Args)]
pub struct AtomsArgs {
    #[arg(long)]
    pub domain: Option<String>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub psi: Option<String>,
    #[arg(long = "eps")]
    pub epsilon: Option<f64>,
    /// truncation degree N
    #[arg(long = "trunc")]
    pub truncation: Option<usize>,
    /// Neumann terms K
    #[arg(long)]
    pub neumann: Option<usize>,
    #[arg(long = "boundary")]
    pub boundary_radius: Option<f64>,
    /// K-fibers; 0 picks automatically
    #[arg(long)]
    pub fibers: Option<usize>,
    #[arg(long)]
    pub node_order: Option<usize>,
    /// f as CoeffFunction JSON; a seeded random polynomial otherwise
    #[arg(long, value_name = "FILE")]
    pub f: Option<PathBuf>,
    /// Also write the lattice as JSON rows
    #[arg(long, value_name = "PATH")]
    pub lattice_out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CayleyCmd {
    /// U-side L^p integral against the disc integral over the same region
    Check {
        #[arg(long, default_value_t = 3.0)]
        gamma: f64,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 0.995)]
        radius: f64,
        #[arg(long, value_name = "FILE")]
        f: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SuiteCmd {
    /// Run criteria 1-7 and print one line each
    Acceptance,
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return EXIT_ERROR;
    }
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

/// `BERGMAN_THREADS` sizes the global rayon pool.
fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("BERGMAN_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| CliError::Config(format!("BERGMAN_THREADS = '{v}'")))?;
    // a pool already built by an earlier call in this process is kept
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Defaults, then the config file, then global flags.
fn base_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut c = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        c.seed = s;
    }
    if let Some(f) = cli.format {
        c.format = f;
    }
    if let Some(o) = &cli.output {
        c.output = Some(o.clone());
    }
    Ok(c)
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let mut cfg = base_config(&cli)?;
    let report = match cli.command {
        Command::Domain { cmd: DomainCmd::Info { kind, gamma, p, alpha } } => domain_info(&kind, gamma, p, alpha)?,
        Command::Geom { cmd: GeomCmd::Check { n, samples } } => geom_check(n, samples, cfg.seed)?,
        Command::Rep { cmd: RepCmd::Wavelet(a) } => {
            if let Some(g) = a.gamma {
                cfg.gamma = g;
            }
            if let Some(p) = &a.psi {
                cfg.psi = p.clone();
            }
            rep_wavelet(&cfg, &a)?
        }
        Command::Analysis { cmd } => analysis(cmd)?,
        Command::Atoms { cmd: AtomsCmd::Run(a) } => {
            apply_atoms_args(&mut cfg, &a);
            cfg.validate()?;
            atoms_run(&cfg, a.f.as_deref(), a.lattice_out.as_deref())?
        }
        Command::Cayley { cmd: CayleyCmd::Check { gamma, alpha, p, radius, f } } => {
            cayley_check(gamma, alpha, p, radius, f.as_deref(), cfg.seed)?
        }
        Command::Suite { cmd: SuiteCmd::Acceptance } => return acceptance(&cfg),
    };
    emit(&report, cfg.format, cfg.output.as_deref())?;
    Ok(EXIT_OK)
}

fn apply_atoms_args(c: &mut ExperimentConfig, a: &AtomsArgs) {
    macro_rules! set {
        ($($field:ident),*) => {
            $(if let Some(v) = &a.$field { c.$field = v.clone(); })*
        };
    }
    set!(domain, gamma, p, alpha, psi, epsilon, truncation, neumann, boundary_radius, fibers, node_order);
}

fn parse_domain(kind: &str) -> Result<DomainParams, CliError> {
    Ok(make_domain(kind.parse()?)?)
}

fn rational(v: Q) -> Value {
    json!({ "exact": v.to_string(), "value": *v.numer() as f64 / *v.denom() as f64 })
}

fn domain_info(kind: &str, gamma: Option<f64>, p: Option<f64>, alpha: Option<f64>) -> Result<Report, CliError> {
    let k: bergman::domain::DomainKind = kind.parse()?;
    let d = make_domain(k)?;
    let cr = coifman_rochberg_p_range(&d).map_or(json!("inf"), rational);
    let mut data = object(vec![
        ("kind", json!(k.to_string())),
        ("n", json!(d.n)),
        ("n1", json!(d.n1)),
        ("r", json!(d.r)),
        ("a", rational(d.a)),
        ("g", rational(d.g)),
        ("coifman_rochberg_p_max", cr),
    ]);
    if let Some(gamma) = gamma {
        let c = ExperimentConfig {
            domain: k.to_string(),
            gamma,
            p: p.unwrap_or(2.0),
            alpha: alpha.unwrap_or(f64::NAN),
            ..Default::default()
        };
        let w = c.windows()?;
        data["p"] = json!(c.p);
        data["gamma"] = json!(gamma);
        data["wavelet_window"] = json!(w.wavelet);
        data["atom_window"] = json!(w.atom);
        if alpha.is_some() {
            data["alpha"] = json!(c.alpha);
            data["in_wavelet_window"] = json!(w.in_wavelet_window);
            data["in_atom_window"] = json!(w.in_atom_window);
        }
    }
    Ok(Report::new("domain info", data))
}

fn geom_check(n: usize, samples: usize, seed: u64) -> Result<Report, CliError> {
    let dims = if n == 0 { vec![1, 2] } else { vec![n] };
    let reports: Vec<Value> = dims
        .iter()
        .map(|&n| serde_json::to_value(identity_residuals(n, samples, seed + n as u64)).expect("report serializes"))
        .collect();
    Ok(Report::new("geom check", json!({ "seed": seed, "reports": reports })))
}

fn load_f(path: Option<&Path>, n: usize, degree: usize, gamma: f64, seed: u64) -> Result<CoeffFunction, CliError> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            let f = CoeffFunction::from_json(&text)?;
            if f.n != n || (f.gamma - gamma).abs() > 1e-12 {
                return Err(CliError::Config(format!(
                    "{}: f has n = {}, gamma = {} but the run uses n = {n}, gamma = {gamma}",
                    p.display(),
                    f.n,
                    f.gamma
                )));
            }
            Ok(f.with_degree(degree))
        }
        None => Ok(CoeffFunction::random(n, degree, 4, gamma, &mut bergman::rng(seed))),
    }
}

/// `section:RxA` or `group:RxAxT`.
fn parse_grid(spec: &str, n: usize, beta: f64) -> Result<GroupGrid, CliError> {
    let bad = || CliError::Config(format!("grid '{spec}': expected section:RxA or group:RxAxT"));
    let (kind, dims) = spec.split_once(':').ok_or_else(bad)?;
    let dims: Vec<usize> = dims.split('x').map(|s| s.trim().parse()).collect::<Result<_, _>>().map_err(|_| bad())?;
    Ok(match (kind, dims.as_slice()) {
        ("section", [r, a]) => GroupGrid::section(n, beta, *r, *a)?,
        ("group", [r, a, t]) => GroupGrid::new(n, beta, *r, *a, *t)?,
        _ => return Err(bad()),
    })
}

fn rep_wavelet(cfg: &ExperimentConfig, a: &WaveletArgs) -> Result<Report, CliError> {
    let n = a.n;
    let psi = normalize_psi(&cfg.psi_spec()?.build(n, 4, cfg.gamma)?)?;
    let f = load_f(a.f.as_deref(), n, 8, cfg.gamma, cfg.seed)?;
    let grid = parse_grid(&a.grid, n, cfg.gamma - (n as f64 + 1.0))?;
    let sampled = grid.sample(|pt| {
        if n == 1 {
            wavelet_su11(&f, &psi, &pt.su11()).expect("interior grid point")
        } else {
            wavelet(&f, &psi, &pt.element()).expect("interior grid point")
        }
    });
    let header = ["w_re", "w_im", "theta", "value_re", "value_im", "haar_weight"].map(String::from).to_vec();
    let rows = sampled.rows().into_iter().map(|r| vec![json!(r.0), json!(r.1), json!(r.2), json!(r.3), json!(r.4), json!(r.5)]).collect();
    let data = json!({
        "n": n,
        "gamma": cfg.gamma,
        "psi": cfg.psi,
        "grid": a.grid,
        "points": sampled.len(),
        "l2_norm": sampled.lp_norm(2.0, 0.0),
        "f_norm": f.norm(),
    });
    Ok(Report::new("rep wavelet", data).with_table(Table { header, rows }))
}

fn analysis(cmd: AnalysisCmd) -> Result<Report, CliError> {
    match cmd {
        AnalysisCmd::Fr { b, c, domain } => {
            let r = forelli_rudin(b, c, &FR_BOUNDARY_RADII, &parse_domain(&domain)?)?;
            let rows = r.samples.iter().map(|(t, j)| vec![json!(t), json!(j)]).collect();
            let table = Table { header: vec!["t".into(), "J".into()], rows };
            let mut rep = Report::new("analysis fr", serde_json::to_value(&r).expect("report serializes")).with_table(table);
            if r.saturated {
                rep.warn("the largest radius is not resolved by the quadrature");
            }
            Ok(rep)
        }
        AnalysisCmd::Schur { p, alpha, gamma, domain } => {
            let r = schur_probe(p, alpha, gamma, &parse_domain(&domain)?)?;
            let rows = r.exponents.iter().zip(&r.ratios).map(|(s, q)| vec![json!(s), json!(q)]).collect();
            let table = Table { header: vec!["s".into(), "ratio".into()], rows };
            let mut rep = Report::new("analysis schur", serde_json::to_value(&r).expect("report serializes")).with_table(table);
            if !r.in_window {
                rep.warn(format!("alpha = {alpha} is outside the Schur window"));
            }
            Ok(rep)
        }
    }
}

/// 1 when ψ is a single monomial c·z^m (the section lattice suffices),
/// the default fiber count otherwise.
fn auto_fibers(psi: &CoeffFunction, epsilon: f64) -> usize {
    let nonzero = psi.coeffs.iter().filter(|c| c.norm() > 0.0).count();
    if nonzero <= 1 {
        1
    } else {
        default_fibers(epsilon)
    }
}

fn atoms_run(cfg: &ExperimentConfig, f_path: Option<&Path>, lattice_out: Option<&Path>) -> Result<Report, CliError> {
    let d = cfg.domain_params()?;
    let psi = normalize_psi(&cfg.psi_spec()?.build(1, cfg.truncation, cfg.gamma)?)?;
    let fibers = if cfg.fibers == 0 { auto_fibers(&psi, cfg.epsilon) } else { cfg.fibers };
    let lattice = build_lattice(cfg.epsilon, cfg.boundary_radius, fibers, &d)?;
    if let Some(p) = lattice_out {
        output::write_atomic(p, &lattice.to_json())?;
    }
    let f = load_f(f_path, 1, cfg.truncation, cfg.gamma, cfg.seed)?;
    let model = FrameModel::new(&lattice, &psi, cfg.truncation, cfg.node_order)?;
    let r = reconstruct(&model, &lattice, &f, cfg.p, cfg.alpha, cfg.neumann, &d)?;
    let windows = cfg.windows()?;
    let data = json!({
        "lattice_size": lattice.len(),
        "fibers": fibers,
        "outer_radius": lattice.outer_radius,
        "rho_hat": r.rho_hat,
        "rel_error": r.rel_error,
        "oracle_error": r.oracle_error,
        "errors_by_terms": r.errors_by_terms,
        "lambda_norm": r.lambda_norm,
        "f_norm": r.f_norm,
        "dropped_mass": r.dropped_mass,
        "windows": windows,
    });
    let mut rep = Report::new("atoms run", data).with_config(cfg);
    if !windows.in_wavelet_window {
        rep.warn(format!("alpha = {} is outside the wavelet window {:?}", cfg.alpha, windows.wavelet));
    }
    if !windows.in_atom_window {
        rep.warn(format!("alpha = {} is outside the atom window {:?}", cfg.alpha, windows.atom));
    }
    Ok(rep)
}

fn cayley_check(gamma: f64, alpha: f64, p: f64, radius: f64, f: Option<&Path>, seed: u64) -> Result<Report, CliError> {
    let f = load_f(f, 1, 4, gamma, seed)?;
    let r = isometry_check(&f, alpha, p, radius, 64, 128)?;
    let mut rep = Report::new("cayley check", serde_json::to_value(&r).expect("report serializes"));
    if r.truncation_warning {
        rep.warn(format!("the region |w| <= {radius} misses {:.2}% of the disc mass", 100.0 * r.truncation_mass));
    }
    Ok(rep)
}

fn acceptance(cfg: &ExperimentConfig) -> Result<i32, CliError> {
    let criteria = suite::acceptance(cfg.seed);
    for c in &criteria {
        println!("{}", c.line());
    }
    if let Some(path) = &cfg.output {
        let data = json!({ "criteria": criteria, "passed": criteria.iter().all(|c| c.passed) });
        output::write_atomic(path, &Report::new("suite acceptance", data).render(Format::Json)?)?;
    }
    Ok(if criteria.iter().all(|c| c.passed) { EXIT_OK } else { EXIT_ACCEPTANCE })
}
