//! The `btk` command line: JSON configs in, CSV/JSON (and optional gnuplot `.dat`) out.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::atlas::{build_atlas, verify_atlas, Atlas, Coords, ExpectedPortrait, Family, SliceSpec, VerifyOptions};
use crate::chua::{
    bt_condition, check_scenario, chua_to_unfolding, region_scenarios, scenario_options, BtCheck, ChuaModel, ChuaParams, ChuaScenario,
    Expectation, ScenarioCheck,
};
use crate::error::Error;
use crate::feedback::{ControllableGains, CubicPlant, CubicSystem, UncontrollableGains};
use crate::normal_form::{NfConstants, UnfoldingPoint};
use crate::roots::brent;
use crate::sets::{SetResidual, DEFAULT_SET_TOL};
use crate::sim::{
    classify_portrait, fmt17, integrate, period_blowup_threshold, write_json, write_trajectory_csv, write_trajectory_gnuplot,
    IntegratorConfig, Model, NormalFormField, PortraitOptions, PortraitSummary, Trajectory,
};
use crate::verify::{Suite, SuiteReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "btk", version, about = "Controller sets, atlases and simulation checks for Z2-symmetric Bogdanov-Takens systems")]
pub struct Cli {
    /// Treat undefined residuals and other domain errors as fatal (exit 3).
    #[arg(long, global = true)]
    pub strict: bool,
    /// Output directory; commands that print tables write to stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write whitespace-separated `.dat` files for gnuplot.
    #[arg(long, global = true)]
    pub gnuplot: bool,
    /// Override the on-set tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate set residuals at a list of points.
    Sets { config: PathBuf },
    /// Partition a two-dimensional slice into sign-vector regions.
    Atlas { config: PathBuf },
    /// Integrate trajectories and classify the phase portrait.
    Sim { config: PathBuf },
    /// Run check suites (all when none is named).
    Verify {
        #[arg(long = "suite")]
        suites: Vec<String>,
    },
    /// Print the normal-form image of Chua feedback gains.
    ChuaMap {
        config: Option<PathBuf>,
        /// `nu0,nu1,nu2,nu3`
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        gains: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.8)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
    },
}

/// Which command reaches which library operation.
pub const REGISTRY: &[(&str, &str, &str)] = &[
    ("nf-core", "vector_field / jacobian / equilibria", "sim"),
    ("nf-core", "equilibrium classification", "sim"),
    ("controller-sets", "normal_form_sets", "sets"),
    ("controller-sets", "bautin_classify", "verify"),
    ("controller-sets", "homoclinic_gamma_target", "verify"),
    ("controller-sets", "primary_cycle_estimates", "verify"),
    ("sim-engine", "integrate", "sim"),
    ("sim-engine", "classify_portrait", "sim"),
    ("sim-engine", "scan_cycles", "verify"),
    ("sim-engine", "locate_homoclinic_mu2", "verify"),
    ("feedback-design", "controllable_sets", "sets"),
    ("feedback-design", "uncontrollable_sets", "sets"),
    ("feedback-design", "CubicSystem", "sim"),
    ("chua", "chua_to_unfolding", "chua-map"),
    ("chua", "bt_condition", "chua-map"),
    ("chua", "chua_sets_specialized", "sets"),
    ("chua", "chua_general_sets", "sets"),
    ("chua", "region scenarios", "sim"),
    ("region-atlas", "build_atlas", "atlas"),
    ("region-atlas", "verify_atlas", "atlas"),
];

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn config(m: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: m.into(),
        }
    }

    fn domain(m: impl Into<String>) -> Self {
        Self {
            code: EXIT_DOMAIN,
            message: m.into(),
        }
    }

    fn assertion(m: impl Into<String>) -> Self {
        Self {
            code: EXIT_ASSERTION,
            message: m.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.to_string().contains("Broken pipe") {
            return Self {
                code: EXIT_OK,
                message: String::new(),
            };
        }
        let code = match &e {
            Error::Config(_) | Error::Io(_) | Error::NonFinite(_) | Error::InvalidConstants(_) => EXIT_CONFIG,
            e if e.is_domain() => EXIT_DOMAIN,
            _ => EXIT_ASSERTION,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        // a closed stdout (e.g. piped into `head`) is not an error
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Self {
                code: EXIT_OK,
                message: String::new(),
            };
        }
        CliError::config(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match configure_threads().and_then(|_| execute(&cli)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            if !e.message.is_empty() {
                eprintln!("btk: {}", e.message);
            }
            e.code
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("BTK_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::config(format!("BTK_THREADS must be a positive integer, got {v:?}")))?;
    // the global pool can only be set once per process
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Sets { config } => cmd_sets(cli, &read_config(config)?),
        Command::Atlas { config } => cmd_atlas(cli, &read_config(config)?),
        Command::Sim { config } => cmd_sim(cli, &read_config(config)?),
        Command::Verify { suites } => cmd_verify(cli, suites),
        Command::ChuaMap { config, gains, alpha, a } => {
            let cfg = match (config, gains) {
                (Some(p), None) => read_config(p)?,
                (None, Some(g)) if g.len() == 4 => ChuaMapConfig {
                    alpha: *alpha,
                    a: *a,
                    gains: vec![[g[0], g[1], g[2], g[3]]],
                },
                _ => return Err(CliError::config("chua-map needs either a config file or --gains nu0,nu1,nu2,nu3")),
            };
            cmd_chua_map(cli, &cfg)
        }
    }
}

pub fn read_config<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn create(dir: &Path, name: &str) -> CliResult<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

// ---------------------------------------------------------------- sets

/// Find where a residual vanishes along one coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSpec {
    pub coordinate: String,
    pub bracket: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetsConfig {
    pub family: Family,
    pub points: Vec<Coords>,
    /// Residual names to report; empty reports all.
    #[serde(default)]
    pub sets: Vec<String>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub solve: Option<SolveSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetRow {
    pub point: usize,
    pub coords: Coords,
    pub set: String,
    pub value: f64,
    pub defined: bool,
    pub on_set: bool,
    pub side_conditions: Vec<(String, bool)>,
    /// Root of the residual along the solve coordinate, when requested and bracketed.
    pub root: Option<f64>,
}

fn select(all: Vec<SetResidual>, names: &[String]) -> CliResult<Vec<SetResidual>> {
    if names.is_empty() {
        return Ok(all);
    }
    names
        .iter()
        .map(|n| {
            all.iter().find(|r| &r.name == n).cloned().ok_or_else(|| {
                let known: Vec<&str> = all.iter().map(|r| r.name.as_str()).collect();
                CliError::config(format!("unknown set {n:?} (available: {known:?})"))
            })
        })
        .collect()
}

fn solve_root(family: &Family, point: &Coords, set: &str, s: &SolveSpec) -> Option<f64> {
    let value = |v: f64| -> crate::Result<f64> {
        let mut c = point.clone();
        c.insert(s.coordinate.clone(), v);
        let r = family
            .evaluate(&c)?
            .into_iter()
            .find(|r| r.name == set)
            .ok_or_else(|| Error::Config(format!("unknown set {set}")))?;
        if r.defined {
            Ok(r.value)
        } else {
            Err(Error::domain("residual undefined inside the bracket"))
        }
    };
    let [lo, hi] = s.bracket;
    let (fa, fb) = (value(lo).ok()?, value(hi).ok()?);
    if fa.signum() == fb.signum() && fa != 0.0 && fb != 0.0 {
        return None;
    }
    brent(value, lo, hi, 1e-14 * (hi - lo).abs().max(1e-300), 200).ok()
}

/// Evaluates the configured residuals; domain failures become undefined rows unless `strict`.
pub fn evaluate_sets(cfg: &SetsConfig, tol: f64, strict: bool) -> CliResult<Vec<SetRow>> {
    let names = cfg.family.coordinate_names();
    if let Some(s) = &cfg.solve {
        if !names.contains(&s.coordinate.as_str()) {
            return Err(CliError::config(format!("unknown solve coordinate {}", s.coordinate)));
        }
    }
    let mut rows = Vec::new();
    for (i, p) in cfg.points.iter().enumerate() {
        if let Some(k) = p.keys().find(|k| !names.contains(&k.as_str())) {
            return Err(CliError::config(format!("point {i}: unknown coordinate {k} (expected {names:?})")));
        }
        let coords: Coords = names.iter().map(|n| (n.to_string(), p.get(*n).copied().unwrap_or(0.0))).collect();
        let residuals = match cfg.family.evaluate(&coords) {
            Ok(all) => select(all, &cfg.sets)?,
            Err(e) if e.is_domain() && !strict => vec![SetResidual::undefined("*", e.to_string())],
            Err(e) => return Err(e.into()),
        };
        for r in residuals {
            if strict && !r.defined {
                return Err(CliError::domain(format!("point {i}: {} undefined", r.name)));
            }
            let root = match &cfg.solve {
                Some(s) if r.name != "*" => solve_root(&cfg.family, &coords, &r.name, s),
                _ => None,
            };
            rows.push(SetRow {
                point: i,
                coords: coords.clone(),
                on_set: r.on_set(tol),
                set: r.name,
                value: r.value,
                defined: r.defined,
                side_conditions: r.side_conditions.into_iter().map(|c| (c.name, c.holds)).collect(),
                root,
            });
        }
    }
    Ok(rows)
}

pub fn write_sets_csv<W: Write>(w: &mut W, names: &[&str], rows: &[SetRow]) -> CliResult<()> {
    writeln!(w, "point,{},set,value,defined,on_set,side_conditions,root", names.join(","))?;
    for r in rows {
        let coords: Vec<String> = names.iter().map(|n| fmt17(r.coords[*n])).collect();
        let sides: Vec<String> = r.side_conditions.iter().map(|(n, h)| format!("{n}={h}")).collect();
        writeln!(
            w,
            "{},{},{},{},{},{},\"{}\",{}",
            r.point,
            coords.join(","),
            r.set,
            fmt17(r.value),
            r.defined,
            r.on_set,
            sides.join(";"),
            r.root.map(fmt17).unwrap_or_default()
        )?;
    }
    Ok(())
}

fn cmd_sets(cli: &Cli, cfg: &SetsConfig) -> CliResult<()> {
    let tol = cli.tol.or(cfg.tolerance).unwrap_or(DEFAULT_SET_TOL);
    let rows = evaluate_sets(cfg, tol, cli.strict)?;
    let names = cfg.family.coordinate_names();
    match &cli.out {
        Some(dir) => {
            write_sets_csv(&mut create(dir, "sets.csv")?, names, &rows)?;
            write_json(&mut create(dir, "sets.json")?, &rows)?;
        }
        None => write_sets_csv(&mut std::io::stdout().lock(), names, &rows)?,
    }
    Ok(())
}

// ---------------------------------------------------------------- atlas

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlasVerify {
    #[serde(default)]
    pub options: VerifyOptions,
    #[serde(default)]
    pub expected: Vec<ExpectedPortrait>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlasConfig {
    pub slice: SliceSpec,
    #[serde(default)]
    pub verify: Option<AtlasVerify>,
}

/// `x y region` with a blank line after each grid row (gnuplot `pm3d`/`image` layout).
pub fn write_atlas_gnuplot<W: Write>(w: &mut W, a: &Atlas) -> CliResult<()> {
    writeln!(w, "# {} {} region", a.spec.x.name, a.spec.y.name)?;
    let nx = a.xs.len();
    for (j, y) in a.ys.iter().enumerate() {
        for (i, x) in a.xs.iter().enumerate() {
            writeln!(w, "{} {} {}", fmt17(*x), fmt17(*y), a.region_of[j * nx + i])?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// One block per boundary, separated by two blank lines (gnuplot `index`).
pub fn write_boundaries_gnuplot<W: Write>(w: &mut W, a: &Atlas) -> CliResult<()> {
    writeln!(w, "# {} {}", a.spec.x.name, a.spec.y.name)?;
    for (k, b) in a.boundaries.iter().enumerate() {
        if k > 0 {
            writeln!(w)?;
            writeln!(w)?;
        }
        writeln!(w, "# regions {} {}", b.regions[0], b.regions[1])?;
        for p in &b.points {
            writeln!(w, "{} {}", fmt17(p[0]), fmt17(p[1]))?;
        }
    }
    Ok(())
}

fn cmd_atlas(cli: &Cli, cfg: &AtlasConfig) -> CliResult<()> {
    let atlas = build_atlas(&cfg.slice)?;
    if cli.strict {
        if let Some(r) = atlas.regions.iter().find(|r| r.masked) {
            return Err(CliError::domain(format!("region {} has undefined residuals", r.id)));
        }
    }
    let dir = out_dir(cli);
    write_json(&mut create(&dir, "atlas.json")?, &atlas)?;
    atlas.write_csv(&mut create(&dir, "grid.csv")?)?;
    if cli.gnuplot {
        write_atlas_gnuplot(&mut create(&dir, "grid.dat")?, &atlas)?;
        write_boundaries_gnuplot(&mut create(&dir, "boundaries.dat")?, &atlas)?;
    }
    if let Some(v) = &cfg.verify {
        let rep = verify_atlas(&atlas, &v.expected, &v.options);
        write_json(&mut create(&dir, "verify.json")?, &rep)?;
        if !rep.all_matched() {
            return Err(CliError::assertion("some regions do not match their expected portraits (see verify.json)"));
        }
    }
    println!("{} regions, {} boundaries", atlas.regions.len(), atlas.boundaries.len());
    Ok(())
}

// ---------------------------------------------------------------- sim

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    /// The planar normal form.
    Nf {
        mu: [f64; 4],
        a1: f64,
        b0: f64,
        #[serde(default)]
        b1: Option<f64>,
    },
    /// A cubic plant under one of the two feedback laws.
    Cubic4 {
        plant: String,
        #[serde(default)]
        controllable: Option<[f64; 4]>,
        #[serde(default)]
        uncontrollable: Option<[f64; 3]>,
    },
    /// The controlled Chua circuit, either a named region scenario or explicit gains.
    Chua {
        #[serde(default)]
        scenario: Option<String>,
        #[serde(default)]
        gains: Option<[f64; 4]>,
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default = "default_one")]
        a: f64,
        #[serde(default)]
        local_radius: Option<f64>,
        #[serde(default)]
        expect: Option<Expectation>,
    },
}

fn default_alpha() -> f64 {
    0.8
}

fn default_one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomIcs {
    pub count: usize,
    pub low: Vec<f64>,
    pub high: Vec<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub model: ModelSpec,
    #[serde(default)]
    pub initial_conditions: Vec<Vec<f64>>,
    #[serde(default)]
    pub random_ics: Option<RandomIcs>,
    #[serde(default)]
    pub t_max: Option<f64>,
    /// Uniform output spacing; every accepted step when absent.
    #[serde(default)]
    pub sample_dt: Option<f64>,
    #[serde(default)]
    pub portrait: Option<PortraitOptions>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcFailure {
    pub ic: Vec<f64>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleDiagnostic {
    pub index: usize,
    pub period: f64,
    pub blowup_threshold: f64,
    /// Period beyond the threshold: the cycle is close to a homoclinic loop.
    pub near_homoclinic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub model: ModelSpec,
    pub initial_conditions: Vec<Vec<f64>>,
    pub trajectory_files: Vec<Option<String>>,
    pub failures: Vec<IcFailure>,
    pub portrait: Option<PortraitSummary>,
    pub portrait_error: Option<String>,
    pub cycle_diagnostics: Vec<CycleDiagnostic>,
    pub scenario_check: Option<ScenarioCheck>,
}

fn to_state<const N: usize>(v: &[f64]) -> CliResult<[f64; N]> {
    <[f64; N]>::try_from(v).map_err(|_| CliError::config(format!("initial condition {v:?} needs {N} components")))
}

fn gather_ics(cfg: &SimConfig, dim: usize, defaults: Vec<Vec<f64>>) -> CliResult<Vec<Vec<f64>>> {
    let mut ics = if cfg.initial_conditions.is_empty() && cfg.random_ics.is_none() {
        defaults
    } else {
        cfg.initial_conditions.clone()
    };
    if let Some(r) = &cfg.random_ics {
        if r.low.len() != dim || r.high.len() != dim || r.low.iter().zip(&r.high).any(|(l, h)| !(l < h)) {
            return Err(CliError::config(format!("random_ics needs {dim}-component bounds with low < high")));
        }
        let mut rng = StdRng::seed_from_u64(r.seed);
        for _ in 0..r.count {
            ics.push(r.low.iter().zip(&r.high).map(|(l, h)| rng.random_range(*l..*h)).collect());
        }
    }
    if ics.is_empty() {
        return Err(CliError::config("no initial conditions"));
    }
    Ok(ics)
}

/// Trajectory files (None where integration failed), per-IC failures and the portrait.
type SimOutput = (Vec<Option<String>>, Vec<IcFailure>, CliResult<PortraitSummary>);

struct SimRun<const N: usize, M> {
    model: M,
    ics: Vec<[f64; N]>,
    integrator: IntegratorConfig,
    portrait: PortraitOptions,
}

fn simulate<const N: usize, M: Model<N> + Copy>(
    run: &SimRun<N, M>,
    sample_dt: Option<f64>,
    dir: &Path,
    gnuplot: bool,
) -> CliResult<SimOutput> {
    let mut files = Vec::new();
    let mut failures = Vec::new();
    let mut trajs: Vec<Trajectory<N>> = Vec::new();
    for (i, ic) in run.ics.iter().enumerate() {
        match integrate(run.model, *ic, &run.integrator, sample_dt) {
            Ok(tr) => {
                let name = format!("traj_{i:03}.csv");
                write_trajectory_csv(&mut create(dir, &name)?, &tr)?;
                files.push(Some(name));
                trajs.push(tr);
            }
            Err(e) => {
                files.push(None);
                failures.push(IcFailure {
                    ic: ic.to_vec(),
                    error: e.to_string(),
                });
            }
        }
    }
    if gnuplot {
        write_trajectory_gnuplot(&mut create(dir, "trajectories.dat")?, &trajs)?;
    }
    let portrait = classify_portrait(&run.model, &run.ics, &run.portrait).map_err(CliError::from);
    Ok((files, failures, portrait))
}

fn portrait_options(cfg: &SimConfig, t_max: f64, base: PortraitOptions) -> PortraitOptions {
    cfg.portrait.unwrap_or(PortraitOptions {
        integrator: IntegratorConfig::with_horizon(t_max),
        ..base
    })
}

fn chua_params(
    scenario: &Option<String>,
    gains: &Option<[f64; 4]>,
    alpha: f64,
    a: f64,
) -> CliResult<(ChuaParams, Option<ChuaScenario>)> {
    match (scenario, gains) {
        (Some(name), None) => {
            let sc = region_scenarios()
                .into_iter()
                .find(|s| s.name == name.trim_matches(|c| c == '(' || c == ')'))
                .ok_or_else(|| CliError::config(format!("unknown Chua scenario {name:?} (expected a..h)")))?;
            Ok((sc.params, Some(sc)))
        }
        (None, Some(g)) => {
            let p = ChuaParams::bt(alpha, a, *g);
            p.validate()?;
            Ok((p, None))
        }
        _ => Err(CliError::config("chua model needs exactly one of scenario or gains")),
    }
}

fn cmd_sim(cli: &Cli, cfg: &SimConfig) -> CliResult<()> {
    let dir = out_dir(cli);
    if let Some(dt) = cfg.sample_dt {
        if !(dt > 0.0) {
            return Err(CliError::config("sample_dt must be positive"));
        }
    }
    let mut diagnostics = Vec::new();
    let mut scenario_check = None;
    let (ics, files, failures, portrait) = match &cfg.model {
        ModelSpec::Nf { mu, a1, b0, b1 } => {
            let mut k = NfConstants::new(*a1, *b0)?;
            if let Some(b) = b1 {
                k = k.with_b1(*b)?;
            }
            let mu = UnfoldingPoint::checked(mu[0], mu[1], mu[2], mu[3])?;
            let t_max = cfg.t_max.unwrap_or(2e3);
            let ics = gather_ics(cfg, 2, vec![vec![0.1, 0.0]])?;
            let run = SimRun {
                model: NormalFormField::new(mu, k),
                ics: ics.iter().map(|v| to_state::<2>(v)).collect::<CliResult<_>>()?,
                integrator: IntegratorConfig::with_horizon(t_max),
                portrait: portrait_options(cfg, t_max, PortraitOptions::default()),
            };
            let (f, fl, p) = simulate(&run, cfg.sample_dt, &dir, cli.gnuplot)?;
            if let Ok(ps) = &p {
                let th = period_blowup_threshold(&mu);
                diagnostics = ps
                    .cycles
                    .iter()
                    .enumerate()
                    .map(|(index, c)| CycleDiagnostic {
                        index,
                        period: c.period,
                        blowup_threshold: th,
                        near_homoclinic: c.period >= th,
                    })
                    .collect();
            }
            (ics, f, fl, p)
        }
        ModelSpec::Cubic4 { plant, controllable, uncontrollable } => {
            let plant = CubicPlant::preset(plant)?;
            let sys = match (controllable, uncontrollable) {
                (Some(v), None) => CubicSystem::controllable(plant, ControllableGains::new(v[0], v[1], v[2], v[3])),
                (None, Some(n)) => CubicSystem::uncontrollable(plant, UncontrollableGains::new(n[0], n[1], n[2])),
                _ => return Err(CliError::config("cubic4 needs exactly one of controllable or uncontrollable gains")),
            };
            let t_max = cfg.t_max.unwrap_or(2e3);
            let ics = gather_ics(cfg, 2, vec![vec![0.1, 0.0]])?;
            let run = SimRun {
                model: sys,
                ics: ics.iter().map(|v| to_state::<2>(v)).collect::<CliResult<_>>()?,
                integrator: IntegratorConfig::with_horizon(t_max),
                portrait: portrait_options(cfg, t_max, PortraitOptions::default()),
            };
            let (f, fl, p) = simulate(&run, cfg.sample_dt, &dir, cli.gnuplot)?;
            (ics, f, fl, p)
        }
        ModelSpec::Chua {
            scenario,
            gains,
            alpha,
            a,
            local_radius,
            expect,
        } => {
            let (params, sc) = chua_params(scenario, gains, *alpha, *a)?;
            let mut model = ChuaModel::new(params)?;
            if let Some(r) = local_radius {
                model = model.with_local_radius(*r);
            }
            let t_max = cfg.t_max.or(sc.as_ref().map(|s| s.t_max)).unwrap_or(6e3);
            let defaults = sc
                .as_ref()
                .map(|s| s.initial_conditions.iter().map(|v| v.to_vec()).collect())
                .unwrap_or_else(|| vec![vec![0.05, 0.0, -0.05]]);
            let ics = gather_ics(cfg, 3, defaults)?;
            let run = SimRun {
                model,
                ics: ics.iter().map(|v| to_state::<3>(v)).collect::<CliResult<_>>()?,
                integrator: IntegratorConfig::with_horizon(t_max),
                portrait: portrait_options(cfg, t_max, scenario_options(t_max)),
            };
            let (f, fl, p) = simulate(&run, cfg.sample_dt, &dir, cli.gnuplot)?;
            let expectation = expect.clone().or(sc.as_ref().map(|s| s.expect.clone()));
            if let (Some(e), Ok(ps)) = (expectation, &p) {
                let same_ics = sc.as_ref().is_some_and(|s| s.initial_conditions.iter().map(|v| v.to_vec()).eq(ics.iter().cloned()));
                if same_ics || e.targets.len() == ics.len() {
                    let check = ChuaScenario {
                        name: sc.as_ref().map(|s| s.name.clone()).unwrap_or_else(|| "custom".into()),
                        params,
                        initial_conditions: run.ics.clone(),
                        t_max,
                        expect: e,
                    };
                    scenario_check = Some(check_scenario(&check, ps));
                }
            }
            (ics, f, fl, p)
        }
    };
    let all_failed = failures.len() == ics.len();
    let (portrait, portrait_error) = match portrait {
        Ok(p) => (Some(p), None),
        Err(e) if e.code == EXIT_DOMAIN && cli.strict => return Err(e),
        Err(e) => (None, Some(e.message)),
    };
    let summary = SimSummary {
        model: cfg.model.clone(),
        initial_conditions: ics,
        trajectory_files: files,
        failures,
        portrait,
        portrait_error,
        cycle_diagnostics: diagnostics,
        scenario_check,
    };
    write_json(&mut create(&dir, "summary.json")?, &summary)?;
    if all_failed {
        return Err(CliError::assertion("every initial condition failed to integrate"));
    }
    Ok(())
}

// ---------------------------------------------------------------- verify

/// Runs the named suites (all when empty).
pub fn run_suites(names: &[String]) -> CliResult<Vec<SuiteReport>> {
    let suites: Vec<Suite> = if names.is_empty() || names.iter().any(|n| n == "all") {
        Suite::ALL.to_vec()
    } else {
        names.iter().map(|n| n.parse::<Suite>()).collect::<crate::Result<_>>()?
    };
    suites.into_iter().map(|s| s.run().map_err(CliError::from)).collect()
}

fn cmd_verify(cli: &Cli, names: &[String]) -> CliResult<()> {
    let reports = run_suites(names)?;
    write_json(&mut std::io::stdout().lock(), &reports)?;
    if let Some(dir) = &cli.out {
        write_json(&mut create(dir, "verify.json")?, &reports)?;
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.suite.name()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::assertion(format!("failing suites: {}", failed.join(", "))))
    }
}

// ---------------------------------------------------------------- chua-map

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChuaMapConfig {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_one")]
    pub a: f64,
    pub gains: Vec<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChuaMapRow {
    pub gains: [f64; 4],
    pub mu: Option<[f64; 4]>,
    pub a1: Option<f64>,
    pub b0: Option<f64>,
    pub bt: BtCheck,
    pub error: Option<String>,
}

pub fn chua_map_rows(cfg: &ChuaMapConfig, strict: bool) -> CliResult<Vec<ChuaMapRow>> {
    cfg.gains
        .iter()
        .map(|g| {
            let p = ChuaParams::bt(cfg.alpha, cfg.a, *g);
            p.validate()?;
            let bt = bt_condition(&p);
            Ok(match chua_to_unfolding(&p) {
                Ok((mu, k)) => ChuaMapRow {
                    gains: *g,
                    mu: Some(mu.as_array()),
                    a1: Some(k.a1),
                    b0: Some(k.b0),
                    bt,
                    error: None,
                },
                Err(e) if !strict => ChuaMapRow {
                    gains: *g,
                    mu: None,
                    a1: None,
                    b0: None,
                    bt,
                    error: Some(e.to_string()),
                },
                Err(e) => return Err(CliError::domain(e.to_string())),
            })
        })
        .collect()
}

fn cmd_chua_map(cli: &Cli, cfg: &ChuaMapConfig) -> CliResult<()> {
    let rows = chua_map_rows(cfg, cli.strict)?;
    write_json(&mut std::io::stdout().lock(), &rows)?;
    if let Some(dir) = &cli.out {
        write_json(&mut create(dir, "chua_map.json")?, &rows)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn registry_covers_modules_and_commands() {
        let cmd = Cli::command();
        let names: Vec<&str> = cmd.get_subcommands().map(|c| c.get_name()).collect();
        for want in ["sets", "atlas", "sim", "verify", "chua-map"] {
            assert!(names.contains(&want), "{want} missing from {names:?}");
            assert!(REGISTRY.iter().any(|(_, _, c)| *c == want), "{want} reaches nothing");
        }
        for (_, _, c) in REGISTRY {
            assert!(names.contains(c), "registry names unknown command {c}");
        }
        for module in ["nf-core", "controller-sets", "sim-engine", "feedback-design", "chua", "region-atlas"] {
            assert!(REGISTRY.iter().any(|(m, _, _)| *m == module), "{module} unreachable");
        }
        cmd.debug_assert();
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(Error::Config("x".into())).code, EXIT_CONFIG);
        assert_eq!(CliError::from(Error::Domain("x".into())).code, EXIT_DOMAIN);
        assert_eq!(CliError::from(Error::StepFailure { t: 1.0 }).code, EXIT_ASSERTION);
    }

    #[test]
    fn hopf_row_on_set() {
        let cfg: SetsConfig = serde_json::from_str(
            r#"{"family":{"kind":"normal-form","a1":1,"b0":1},"points":[{"mu1":0.01}],"sets":["T_H"]}"#,
        )
        .unwrap();
        let rows = evaluate_sets(&cfg, DEFAULT_SET_TOL, false).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].value, 0.0);
        assert!(rows[0].on_set);
        assert_eq!(rows[0].side_conditions, vec![("mu1>0".to_string(), true)]);
    }

    #[test]
    fn chua_hopf_root() {
        let cfg: SetsConfig = serde_json::from_str(
            r#"{"family":{"kind":"chua-specialized"},"points":[{"nu2":0.02}],"sets":["T_H"],
                "solve":{"coordinate":"nu1","bracket":[0.0,0.1]}}"#,
        )
        .unwrap();
        let rows = evaluate_sets(&cfg, DEFAULT_SET_TOL, false).unwrap();
        let root = rows[0].root.unwrap();
        assert!((root - 0.025).abs() < 1e-12, "{root}");
    }

    #[test]
    fn batch_order_is_preserved() {
        let points: Vec<Coords> = (0..100).map(|i| Coords::from([("mu1".to_string(), i as f64 * 1e-3)])).collect();
        let cfg = SetsConfig {
            family: Family::NormalForm { a1: 1.0, b0: 1.0, b1: None },
            points,
            sets: vec!["T_P".into()],
            tolerance: None,
            solve: None,
        };
        let rows = evaluate_sets(&cfg, DEFAULT_SET_TOL, false).unwrap();
        assert_eq!(rows.len(), 100);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.point, i);
            assert_eq!(r.coords["mu1"], i as f64 * 1e-3);
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = r#"{"family":{"kind":"normal-form","a1":1,"b0":1},"points":[],"extra":1}"#;
        assert!(serde_json::from_str::<SetsConfig>(bad).is_err());
        let bad = r#"{"model":{"kind":"nf","mu":[0,0,0,0],"a1":1,"b0":1,"c":2}}"#;
        assert!(serde_json::from_str::<SimConfig>(bad).is_err());
    }

    #[test]
    fn strict_turns_undefined_into_domain_error() {
        // secondary sets are undefined before the pitchfork
        let cfg: SetsConfig = serde_json::from_str(
            r#"{"family":{"kind":"normal-form","a1":1,"b0":1},"points":[{"mu1":0.01}],"sets":["T_H+"]}"#,
        )
        .unwrap();
        let lenient = evaluate_sets(&cfg, DEFAULT_SET_TOL, false).unwrap();
        assert!(!lenient[0].defined);
        assert_eq!(evaluate_sets(&cfg, DEFAULT_SET_TOL, true).unwrap_err().code, EXIT_DOMAIN);
    }

    #[test]
    fn random_ics_are_seeded() {
        let cfg: SimConfig = serde_json::from_str(
            r#"{"model":{"kind":"nf","mu":[0,0,0,0],"a1":1,"b0":1},
                "random_ics":{"count":5,"low":[-1,-1],"high":[1,1],"seed":7}}"#,
        )
        .unwrap();
        let a = gather_ics(&cfg, 2, vec![]).unwrap();
        let b = gather_ics(&cfg, 2, vec![]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
        assert!(a.iter().flatten().all(|v| (-1.0..1.0).contains(v)));
    }
}
