//! Command-line front end: `run`, `sweep`, `mms` and `mesh-info`.
//!
//! Settings resolve as flags over config file over defaults. Exit codes are
//! 0 on success, 1 when a `run` does not converge, 2 on usage or
//! configuration errors and 3 on I/O errors.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::bench::{
    complex_cavity_case, file_cavity_case, heated_cavity_case, mms_case, mms_study, sweep,
    write_csv, write_runs_csv, BenchError, BenchmarkCase, ComplexSource, RunSummary, SolverChoice,
};
use crate::solvers::{Method, SolverConfig, Status, DEFAULT_BLOWUP, DEFAULT_MAX_ITERS, DEFAULT_TOLERANCE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_CONVERGED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Io { .. } | BenchError::Csv { .. } => CliError::Io(e.to_string()),
            BenchError::Mesh(crate::mesh::MeshError::Io { .. }) => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "boussinesq", version, about = "Steady Boussinesq solver and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one case at one Rayleigh number
    Run(CommonArgs),
    /// Solve a grid of methods, depths and Rayleigh numbers
    Sweep(CommonArgs),
    /// Manufactured-solution convergence study on n/2, n and 2n
    Mms(CommonArgs),
    /// Print mesh statistics as JSON
    MeshInfo(CommonArgs),
}

#[derive(Debug, Args, Default)]
struct CommonArgs {
    /// cavity | complex | mms | file:<path> | complex:<path>
    #[arg(long)]
    case: Option<String>,
    /// Comma-separated for sweeps
    #[arg(long, value_delimiter = ',')]
    method: Option<Vec<String>>,
    /// Anderson depth; comma-separated for sweeps
    #[arg(long, value_delimiter = ',')]
    depth: Option<Vec<usize>>,
    #[arg(long, allow_negative_numbers = true)]
    ra: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    ra_list: Option<Vec<f64>>,
    /// Subdivisions per unit length
    #[arg(long)]
    n: Option<usize>,
    /// Skip barycentric refinement
    #[arg(long)]
    no_barycentric: bool,
    #[arg(long, allow_negative_numbers = true)]
    tolerance: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    blowup: Option<f64>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat JSON file with any of the above settings
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "path", rename_all = "kebab-case")]
pub enum CaseSpec {
    Cavity,
    Complex,
    Mms,
    File(PathBuf),
    ComplexFile(PathBuf),
}

impl CaseSpec {
    pub const VALID: &'static str = "cavity, complex, mms, file:<path>, complex:<path>";

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "cavity" => Some(CaseSpec::Cavity),
            "complex" => Some(CaseSpec::Complex),
            "mms" => Some(CaseSpec::Mms),
            _ => {
                if let Some(p) = s.strip_prefix("file:").filter(|p| !p.is_empty()) {
                    Some(CaseSpec::File(p.into()))
                } else {
                    s.strip_prefix("complex:")
                        .filter(|p| !p.is_empty())
                        .map(|p| CaseSpec::ComplexFile(p.into()))
                }
            }
        }
    }

    /// Builds the case; `n` is subdivisions per unit length.
    pub fn build(&self, n: usize, refine: bool) -> Result<BenchmarkCase, BenchError> {
        match self {
            CaseSpec::Cavity => heated_cavity_case(n, refine),
            CaseSpec::Complex => complex_cavity_case(ComplexSource::Builtin {
                nx: 4 * n,
                ny: (4 * n).div_ceil(7),
                refine,
            }),
            CaseSpec::Mms => mms_case(n),
            CaseSpec::File(p) => file_cavity_case(p.clone(), refine),
            CaseSpec::ComplexFile(p) => complex_cavity_case(ComplexSource::File { path: p.clone(), refine }),
        }
    }
}

/// Every setting with defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub case: CaseSpec,
    pub methods: Vec<Method>,
    pub depths: Vec<usize>,
    pub ra: f64,
    pub ra_list: Vec<f64>,
    pub n: usize,
    pub barycentric: bool,
    pub tolerance: f64,
    pub max_iters: usize,
    pub blowup: f64,
    pub jobs: usize,
    pub out: PathBuf,
}

impl Default for ResolvedConfig {
    fn default() -> Self {
        Self {
            case: CaseSpec::Cavity,
            methods: vec![Method::PicardNewton],
            depths: vec![1],
            ra: 1e4,
            ra_list: vec![1e3, 2e3, 5e3, 1e4, 2e4, 5e4, 1e5, 2e5, 5e5],
            n: 16,
            barycentric: true,
            tolerance: DEFAULT_TOLERANCE,
            max_iters: DEFAULT_MAX_ITERS,
            blowup: DEFAULT_BLOWUP,
            jobs: 1,
            out: PathBuf::from("out"),
        }
    }
}

impl ResolvedConfig {
    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            method: self.methods[0],
            depth: self.depths[0],
            tolerance: self.tolerance,
            max_iters: self.max_iters,
            blowup: self.blowup,
        }
    }

    pub fn choices(&self) -> Vec<SolverChoice> {
        SolverChoice::expand(&self.methods, &self.depths)
    }

    fn validate(&self, src: Source) -> Result<(), CliError> {
        let bad = |field: &str, msg: String| Err(CliError::Usage(format!("{}: {msg}", src.name(field))));
        if !(self.ra.is_finite() && self.ra >= 0.0) {
            return bad("ra", format!("must be a finite number >= 0, got {}", self.ra));
        }
        if self.ra_list.is_empty() {
            return bad("ra_list", "must not be empty".into());
        }
        if let Some(r) = self.ra_list.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
            return bad("ra_list", format!("entries must be finite and >= 0, got {r}"));
        }
        if self.ra_list.windows(2).any(|w| w[1] <= w[0]) {
            return bad("ra_list", "must be strictly ascending".into());
        }
        if self.n < 2 {
            return bad("n", format!("must be at least 2, got {}", self.n));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return bad("tolerance", format!("must be positive, got {}", self.tolerance));
        }
        if self.max_iters == 0 {
            return bad("max_iters", "must be at least 1".into());
        }
        if !(self.blowup > 0.0) {
            return bad("blowup", format!("must be positive, got {}", self.blowup));
        }
        if self.jobs == 0 {
            return bad("jobs", "must be at least 1".into());
        }
        if self.methods.is_empty() {
            return bad("method", "must name at least one method".into());
        }
        if self.depths.is_empty() {
            return bad("depth", "must list at least one depth".into());
        }
        Ok(())
    }
}

/// Where a value came from, for error messages.
#[derive(Clone, Copy)]
enum Source {
    Flags,
    File,
}

impl Source {
    fn name(self, field: &str) -> String {
        match self {
            Source::Flags => format!("--{}", field.replace('_', "-")),
            Source::File => format!("config /{field}"),
        }
    }
}

fn usage(pointer: &str, msg: impl fmt::Display) -> CliError {
    CliError::Usage(format!("config {pointer}: {msg}"))
}

fn methods_valid() -> String {
    Method::ALL.iter().map(|m| m.name()).collect::<Vec<_>>().join(", ")
}

fn parse_method(s: &str) -> Option<Method> {
    s.parse().ok()
}

/// Applies a flat JSON object onto `cfg`. Errors cite the JSON pointer of
/// the offending field.
pub fn apply_config_value(cfg: &mut ResolvedConfig, value: &Value) -> Result<(), CliError> {
    let obj = value
        .as_object()
        .ok_or_else(|| usage("", "top level must be a JSON object"))?;
    for (key, v) in obj {
        let ptr = format!("/{key}");
        let num = |v: &Value| v.as_f64().ok_or_else(|| usage(&ptr, "expected a number"));
        let uint = |v: &Value| {
            v.as_u64()
                .map(|u| u as usize)
                .ok_or_else(|| usage(&ptr, "expected a non-negative integer"))
        };
        let str_or_list = |v: &Value| -> Result<Vec<String>, CliError> {
            match v {
                Value::String(s) => Ok(vec![s.clone()]),
                Value::Array(a) => a
                    .iter()
                    .enumerate()
                    .map(|(i, e)| {
                        e.as_str()
                            .map(str::to_string)
                            .ok_or_else(|| usage(&format!("{ptr}/{i}"), "expected a string"))
                    })
                    .collect(),
                _ => Err(usage(&ptr, "expected a string or an array of strings")),
            }
        };
        match key.as_str() {
            "case" => {
                let s = v.as_str().ok_or_else(|| usage(&ptr, "expected a string"))?;
                cfg.case = CaseSpec::parse(s).ok_or_else(|| {
                    usage(&ptr, format!("unknown case '{s}', expected one of: {}", CaseSpec::VALID))
                })?;
            }
            "method" | "methods" => {
                let names = str_or_list(v)?;
                let mut out = Vec::new();
                for (i, name) in names.iter().enumerate() {
                    let p = if v.is_array() { format!("{ptr}/{i}") } else { ptr.clone() };
                    out.push(parse_method(name).ok_or_else(|| {
                        usage(&p, format!("unknown method '{name}', expected one of: {}", methods_valid()))
                    })?);
                }
                cfg.methods = out;
            }
            "depth" | "depths" => {
                cfg.depths = match v {
                    Value::Array(a) => a
                        .iter()
                        .enumerate()
                        .map(|(i, e)| {
                            e.as_u64()
                                .map(|u| u as usize)
                                .ok_or_else(|| usage(&format!("{ptr}/{i}"), "expected a non-negative integer"))
                        })
                        .collect::<Result<_, _>>()?,
                    other => vec![uint(other)?],
                };
            }
            "ra" => cfg.ra = num(v)?,
            "ra_list" => {
                let a = v.as_array().ok_or_else(|| usage(&ptr, "expected an array of numbers"))?;
                cfg.ra_list = a
                    .iter()
                    .enumerate()
                    .map(|(i, e)| e.as_f64().ok_or_else(|| usage(&format!("{ptr}/{i}"), "expected a number")))
                    .collect::<Result<_, _>>()?;
            }
            "n" => cfg.n = uint(v)?,
            "barycentric" => {
                cfg.barycentric = v.as_bool().ok_or_else(|| usage(&ptr, "expected true or false"))?
            }
            "tolerance" => cfg.tolerance = num(v)?,
            "max_iters" => cfg.max_iters = uint(v)?,
            "blowup" => cfg.blowup = num(v)?,
            "jobs" => cfg.jobs = uint(v)?,
            "out" => {
                cfg.out = v
                    .as_str()
                    .ok_or_else(|| usage(&ptr, "expected a string"))?
                    .into()
            }
            _ => {
                return Err(usage(
                    &ptr,
                    "unknown field, expected one of: case, method, depth, ra, ra_list, n, barycentric, \
tolerance, max_iters, blowup, jobs, out",
                ))
            }
        }
    }
    cfg.validate(Source::File)
}

/// Reads a config file and resolves it over the defaults.
pub fn load_config(path: &Path) -> Result<ResolvedConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: invalid JSON: {e}", path.display())))?;
    let mut cfg = ResolvedConfig::default();
    apply_config_value(&mut cfg, &value)?;
    Ok(cfg)
}

fn resolve(args: &CommonArgs) -> Result<ResolvedConfig, CliError> {
    let mut cfg = match &args.config {
        Some(p) => load_config(p)?,
        None => ResolvedConfig::default(),
    };
    if let Some(c) = &args.case {
        cfg.case = CaseSpec::parse(c).ok_or_else(|| {
            CliError::Usage(format!("--case: unknown case '{c}', expected one of: {}", CaseSpec::VALID))
        })?;
    }
    if let Some(ms) = &args.method {
        cfg.methods = ms
            .iter()
            .map(|m| {
                parse_method(m).ok_or_else(|| {
                    CliError::Usage(format!("--method: unknown method '{m}', expected one of: {}", methods_valid()))
                })
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(d) = &args.depth {
        cfg.depths = d.clone();
    }
    if let Some(v) = args.ra {
        cfg.ra = v;
    }
    if let Some(v) = &args.ra_list {
        cfg.ra_list = v.clone();
    }
    if let Some(v) = args.n {
        cfg.n = v;
    }
    if args.no_barycentric {
        cfg.barycentric = false;
    }
    if let Some(v) = args.tolerance {
        cfg.tolerance = v;
    }
    if let Some(v) = args.max_iters {
        cfg.max_iters = v;
    }
    if let Some(v) = args.blowup {
        cfg.blowup = v;
    }
    if let Some(v) = args.jobs {
        cfg.jobs = v;
    }
    if let Some(v) = &args.out {
        cfg.out = v.clone();
    }
    cfg.validate(Source::Flags)?;
    Ok(cfg)
}

fn case_json(case: &BenchmarkCase) -> Value {
    json!({
        "name": case.name,
        "boundary_conditions": case.note,
        "barycentric": case.recipe.refined(),
        "mesh": case.mesh().stats(),
        "coarse_mesh": case.coarse_mesh.stats(),
        "dofs": {
            "velocity": case.space().dofs().n_velocity(),
            "pressure": case.space().dofs().n_pressure(),
            "temperature": case.space().dofs().n_temperature(),
        },
        "corner_conflicts": case.space().dofs().corner_conflicts().iter().map(|c| json!({
            "node": c.node, "kept_tag": c.kept_tag, "kept_value": c.kept_value,
            "dropped_tag": c.dropped_tag, "dropped_value": c.dropped_value,
        })).collect::<Vec<_>>(),
    })
}

fn write_manifest(dir: &Path, command: &str, cfg: &ResolvedConfig, case: &Value, results: Value) -> Result<(), CliError> {
    let mut m = Map::new();
    m.insert("tool".into(), json!(env!("CARGO_PKG_NAME")));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("timestamp".into(), json!(chrono::Utc::now().to_rfc3339()));
    m.insert("command".into(), json!(command));
    m.insert("config".into(), serde_json::to_value(cfg).expect("config serializes"));
    m.insert("case".into(), case.clone());
    if !results.is_null() {
        m.insert("results".into(), results);
    }
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&Value::Object(m)).expect("manifest serializes");
    std::fs::write(&path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn cmd_run(cfg: &ResolvedConfig) -> Result<i32, CliError> {
    if cfg.methods.len() != 1 || cfg.depths.len() != 1 {
        return Err(CliError::Usage("run takes a single --method and --depth".into()));
    }
    let case = cfg.case.build(cfg.n, cfg.barycentric)?;
    let choice = SolverChoice::new(cfg.methods[0], cfg.depths[0]);
    let run = crate::bench::run_case(&case, choice, cfg.ra, &cfg.solver_config());
    ensure_dir(&cfg.out)?;
    write_runs_csv(&case.name, std::slice::from_ref(&run), &cfg.out.join("runs.csv"))?;
    let results = json!({
        "status": run.status(),
        "iterations": run.history.iterations(),
        "final_residual": run.history.final_residual(),
        "divergence_norm": run.divergence,
        "failure": run.history.records.last().and_then(|r| r.failure.clone()),
    });
    write_manifest(&cfg.out, "run", cfg, &case_json(&case), results)?;
    print_run(&case.name, &run);
    Ok(if run.status() == Status::Converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

fn print_run(case: &str, run: &RunSummary) {
    println!(
        "{case} {}[m={}] Ra={} status={} iterations={} residual={:.3e}",
        run.choice.method,
        run.choice.depth,
        run.ra,
        run.status(),
        run.history.iterations(),
        run.history.final_residual().unwrap_or(f64::NAN)
    );
}

fn cmd_sweep(cfg: &ResolvedConfig) -> Result<i32, CliError> {
    let case = cfg.case.build(cfg.n, cfg.barycentric)?;
    let result = sweep(&case, &cfg.choices(), &cfg.ra_list, &cfg.solver_config(), cfg.jobs)?;
    write_csv(&result, &cfg.out)?;
    let frontier: Vec<Value> = result
        .frontier
        .iter()
        .map(|f| json!({"method": f.choice.method, "depth": f.choice.depth, "max_ra_converged": f.max_ra_converged}))
        .collect();
    write_manifest(&cfg.out, "sweep", cfg, &case_json(&case), json!({ "frontier": frontier }))?;
    for run in &result.runs {
        print_run(&case.name, run);
    }
    for f in &result.frontier {
        println!(
            "frontier {}[m={}]: {}",
            f.choice.method,
            f.choice.depth,
            f.max_ra_converged.map_or("none".to_string(), |r| r.to_string())
        );
    }
    Ok(EXIT_OK)
}

/// Levels n/2, n, 2n.
pub fn mms_levels(n: usize) -> Vec<usize> {
    vec![(n / 2).max(2), n, 2 * n]
}

fn cmd_mms(cfg: &ResolvedConfig) -> Result<i32, CliError> {
    let levels = mms_levels(cfg.n);
    let report = mms_study(&levels, &cfg.solver_config())?;
    ensure_dir(&cfg.out)?;
    // one run per level; the depth column carries no meaning here
    let runs: Vec<RunSummary> = report
        .levels
        .iter()
        .map(|l| RunSummary {
            choice: SolverChoice::new(Method::Newton, 0),
            ra: crate::bench::mms_ra(),
            history: l.history.clone(),
            divergence: l.divergence,
        })
        .collect();
    write_runs_csv("mms", &runs, &cfg.out.join("runs.csv"))?;
    let case = mms_case(cfg.n)?;
    // record what was actually solved rather than the unused case flags
    let solved = ResolvedConfig {
        case: CaseSpec::Mms,
        methods: vec![Method::Newton],
        depths: vec![0],
        ra: crate::bench::mms_ra(),
        ..cfg.clone()
    };
    write_manifest(
        &cfg.out,
        "mms",
        &solved,
        &case_json(&case),
        serde_json::to_value(&report).expect("report serializes"),
    )?;
    for l in &report.levels {
        println!(
            "n={} h={:.4} |u-uh|_1={:.3e} |u-uh|_0={:.3e} |T-Th|_1={:.3e} |p-ph|_0={:.3e} div={:.1e}",
            l.n, l.h, l.errors.velocity_h1, l.errors.velocity_l2, l.errors.temperature_h1, l.errors.pressure_l2, l.divergence
        );
    }
    let o = report.orders;
    println!(
        "orders: velocity H1 {:.3}, velocity L2 {:.3}, temperature H1 {:.3}, temperature L2 {:.3}, pressure L2 {:.3}",
        o.velocity_h1, o.velocity_l2, o.temperature_h1, o.temperature_l2, o.pressure_l2
    );
    Ok(EXIT_OK)
}

fn cmd_mesh_info(cfg: &ResolvedConfig) -> Result<i32, CliError> {
    let case = cfg.case.build(cfg.n, cfg.barycentric)?;
    println!("{}", serde_json::to_string_pretty(&case_json(&case)).expect("stats serialize"));
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (name, common) = match &cli.command {
        Command::Run(a) => ("run", a),
        Command::Sweep(a) => ("sweep", a),
        Command::Mms(a) => ("mms", a),
        Command::MeshInfo(a) => ("mesh-info", a),
    };
    let result = resolve(common).and_then(|cfg| match name {
        "run" => cmd_run(&cfg),
        "sweep" => cmd_sweep(&cfg),
        "mms" => cmd_mms(&cfg),
        _ => cmd_mesh_info(&cfg),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg_from(text: &str) -> Result<ResolvedConfig, CliError> {
        let mut cfg = ResolvedConfig::default();
        apply_config_value(&mut cfg, &serde_json::from_str(text).unwrap())?;
        Ok(cfg)
    }

    #[test]
    fn empty_config_is_defaults() {
        assert_eq!(cfg_from("{}").unwrap(), ResolvedConfig::default());
        let d = ResolvedConfig::default();
        assert_eq!((d.tolerance, d.max_iters, d.blowup, d.n, d.barycentric), (1e-8, 200, 1e10, 16, true));
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"tolerance": 1e-10, "n": 8}"#).unwrap();
        let args = CommonArgs {
            config: Some(path.clone()),
            tolerance: Some(1e-6),
            ..Default::default()
        };
        let cfg = resolve(&args).unwrap();
        assert_eq!(cfg.tolerance, 1e-6);
        assert_eq!(cfg.n, 8);
        let cfg = resolve(&CommonArgs { config: Some(path), ..Default::default() }).unwrap();
        assert_eq!(cfg.tolerance, 1e-10);
    }

    #[test]
    fn bad_method_cites_pointer_and_choices() {
        let e = cfg_from(r#"{"method": "nwton"}"#).unwrap_err().to_string();
        assert!(e.contains("/method"), "{e}");
        for m in Method::ALL {
            assert!(e.contains(m.name()), "{e}");
        }
        let e = cfg_from(r#"{"method": ["picard", "nwton"]}"#).unwrap_err().to_string();
        assert!(e.contains("/method/1"), "{e}");
    }

    #[test]
    fn other_config_errors() {
        assert!(cfg_from(r#"{"tolerance": "small"}"#).unwrap_err().to_string().contains("/tolerance"));
        assert!(cfg_from(r#"{"bogus": 1}"#).unwrap_err().to_string().contains("/bogus"));
        assert!(cfg_from(r#"{"case": "torus"}"#).unwrap_err().to_string().contains("/case"));
        assert!(cfg_from(r#"{"ra": -3}"#).unwrap_err().to_string().contains("/ra"));
        assert!(cfg_from("[1]").is_err());
        let c = cfg_from(r#"{"case": "file:mesh.txt", "depth": [0, 1, 3], "ra_list": [1, 2]}"#).unwrap();
        assert_eq!(c.case, CaseSpec::File("mesh.txt".into()));
        assert_eq!(c.depths, vec![0, 1, 3]);
    }

    #[test]
    fn negative_ra_flag_is_a_usage_error() {
        let code = main_with_args(["boussinesq", "run", "--ra", "-5"]);
        assert_eq!(code, EXIT_USAGE);
        let e = resolve(&CommonArgs { ra: Some(-5.0), ..Default::default() }).unwrap_err();
        assert!(e.to_string().contains("--ra"));
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        assert_eq!(main_with_args(["boussinesq", "run", "--frobnicate"]), EXIT_USAGE);
        assert_eq!(main_with_args(["boussinesq"]), EXIT_USAGE);
    }

    #[test]
    fn case_spec_parsing() {
        assert_eq!(CaseSpec::parse("complex"), Some(CaseSpec::Complex));
        assert_eq!(CaseSpec::parse("complex:a.mesh"), Some(CaseSpec::ComplexFile("a.mesh".into())));
        assert_eq!(CaseSpec::parse("file:"), None);
        assert_eq!(CaseSpec::parse("square"), None);
    }

    #[test]
    fn mms_level_choice() {
        assert_eq!(mms_levels(16), vec![8, 16, 32]);
        assert_eq!(mms_levels(3), vec![2, 3, 6]);
    }
}
