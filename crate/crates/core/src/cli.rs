//! Command-line front end: `test`, `ci`, `simulate` and `null-check`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 infeasible
//! estimator.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde_json::json;

use crate::dantzig::{Tuning, default_tuning};
use crate::error::Error;
use crate::inference::{
    CiMethod, Grid, PowerDictionary, TestReport, confidence_interval, group_loading, pairwise_loading, power_dictionary, test_known_sigma,
    test_unknown_sigma,
};
use crate::numerics::DenseMatrix;
use crate::simulate::{SimConfig, SimResult, run_campaign_with_threads, threads_from_env};
use crate::synthesize::Hypothesis;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Infeasible(m) => write!(f, "infeasible estimator: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InfeasibleEstimator(_) => CliError::Infeasible(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "densetest",
    version,
    about = "Tests of linear functionals aᵀβ in high-dimensional linear models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test H0: aᵀβ = g0 on a CSV dataset.
    Test(TestArgs),
    /// Confidence interval for aᵀβ by test inversion.
    Ci(CiArgs),
    /// Run a Monte Carlo campaign from a JSON config.
    Simulate(SimulateArgs),
    /// Run a campaign at h = 0 and report the KS p-value of the null statistics.
    NullCheck(NullCheckArgs),
}

#[derive(Debug, Args)]
struct DataArgs {
    /// CSV file; optional header row; last column is the response.
    #[arg(long)]
    data: PathBuf,
    /// 1-based response column (default: last).
    #[arg(long)]
    y_col: Option<usize>,
    /// Covariance CSV (p×p). Selects the known-covariance test.
    #[arg(long)]
    sigma: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    rho0: Option<f64>,
    /// JSON report path.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(skip)]
struct LoadingArgs {
    /// Full loading vector, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, group = "loading")]
    a: Option<Vec<f64>>,
    /// 1-based pair k,j: tests β_k - β_j.
    #[arg(long, value_delimiter = ',', group = "loading")]
    a_index_pair: Option<Vec<usize>>,
    /// 1-based feature indices of a group.
    #[arg(long, value_delimiter = ',', group = "loading")]
    a_group: Option<Vec<usize>>,
    /// Conditional-mean point for a power dictionary built from the data columns.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, group = "loading")]
    a_dict_point: Option<Vec<f64>>,
    /// Weights for --a-group (default: all ones).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    group_weights: Option<Vec<f64>>,
    /// Polynomial degree for --a-dict-point.
    #[arg(long, default_value_t = 4)]
    dict_degree: usize,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("loading").required(true)))]
struct TestArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    loading: LoadingArgs,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    g0: f64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("loading").required(true)))]
struct CiArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    loading: LoadingArgs,
    #[arg(long, allow_hyphen_values = true, requires_all = ["grid_half_width", "grid_step"])]
    grid_center: Option<f64>,
    #[arg(long, requires = "grid_center")]
    grid_half_width: Option<f64>,
    #[arg(long, requires = "grid_center")]
    grid_step: Option<f64>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    /// Worker threads (default: DENSETEST_THREADS, else all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct NullCheckArgs {
    #[command(flatten)]
    sim: SimulateArgs,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Test(a) => run_test(&a, out),
        Command::Ci(a) => run_ci(&a, out),
        Command::Simulate(a) => run_simulate(&a, out),
        Command::NullCheck(a) => run_null_check(&a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

fn read_rows(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    let mut width = None;
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let line = k + 1;
        if k == 0 && record.iter().any(|c| parse_number(c).is_none()) {
            width = Some(record.len());
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(CliError::Data(format!(
                "{}: row {line} has {} fields, expected {expected}",
                path.display(),
                record.len()
            )));
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(j, c)| {
                parse_number(c)
                    .ok_or_else(|| CliError::Data(format!("{}: row {line}, column {}: non-numeric value {c:?}", path.display(), j + 1)))
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Data(format!("{}: no data rows", path.display())));
    }
    Ok(rows)
}

/// Reads a numeric CSV into `(X, y)`. A first row with any non-numeric cell
/// is treated as a header. `y_col` is 1-based and defaults to the last
/// column.
pub fn read_csv_dataset(path: &Path, y_col: Option<usize>) -> CliResult<(DenseMatrix, Vec<f64>)> {
    let rows = read_rows(path)?;
    let width = rows[0].len();
    if width < 2 {
        return Err(CliError::Data(format!(
            "{}: need at least one feature and a response column",
            path.display()
        )));
    }
    let yc = match y_col {
        Some(c) if c == 0 || c > width => {
            return Err(CliError::Usage(format!("--y-col {c} is outside 1..={width}")));
        }
        Some(c) => c - 1,
        None => width - 1,
    };
    let y = rows.iter().map(|r| r[yc]).collect();
    let data = rows
        .iter()
        .flat_map(|r| r.iter().enumerate().filter(|&(j, _)| j != yc).map(|(_, &v)| v))
        .collect();
    let x = DenseMatrix::from_row_major(rows.len(), width - 1, data)?;
    Ok((x, y))
}

/// Reads a square numeric CSV.
pub fn read_csv_matrix(path: &Path) -> CliResult<DenseMatrix> {
    let rows = read_rows(path)?;
    let m = DenseMatrix::from_rows(&rows)?;
    if m.rows() != m.cols() {
        return Err(CliError::Data(format!(
            "{}: matrix is {}×{}, expected square",
            path.display(),
            m.rows(),
            m.cols()
        )));
    }
    Ok(m)
}

struct Prepared {
    x: DenseMatrix,
    y: Vec<f64>,
    a: Vec<f64>,
    sigma: Option<DenseMatrix>,
    tuning: Tuning,
}

fn prepare(data: &DataArgs, loading: &LoadingArgs) -> CliResult<Prepared> {
    if !(data.alpha > 0.0 && data.alpha < 1.0) {
        return Err(CliError::Usage(format!("--alpha must lie in (0, 1), got {}", data.alpha)));
    }
    let (mut x, y) = read_csv_dataset(&data.data, data.y_col)?;
    let p = x.cols();
    let a = if let Some(a) = &loading.a {
        if a.len() != p {
            return Err(CliError::Data(format!(
                "loading has length {} but the data has {p} feature columns",
                a.len()
            )));
        }
        a.clone()
    } else if let Some(pair) = &loading.a_index_pair {
        let [k, j] = pair[..] else {
            return Err(CliError::Usage("--a-index-pair takes exactly two indices".into()));
        };
        pairwise_loading(k, j, p)?
    } else if let Some(group) = &loading.a_group {
        let weights = loading.group_weights.clone().unwrap_or_else(|| vec![1.0; group.len()]);
        group_loading(&weights, group, p)?
    } else if let Some(point) = &loading.a_dict_point {
        if loading.dict_degree == 0 {
            return Err(CliError::Usage("--dict-degree must be at least 1".into()));
        }
        let (features, dict): (DenseMatrix, PowerDictionary) = power_dictionary(&x, loading.dict_degree)?;
        x = features;
        dict.loading_at(point)?
    } else {
        return Err(CliError::Usage("one loading form is required".into()));
    };
    let sigma = match &data.sigma {
        Some(path) => {
            let s = read_csv_matrix(path)?;
            if s.rows() != x.cols() {
                return Err(CliError::Data(format!(
                    "covariance is {0}×{0} but the design has {1} columns",
                    s.rows(),
                    x.cols()
                )));
            }
            Some(s)
        }
        None => None,
    };
    let base = default_tuning(x.rows(), x.cols())?;
    let tuning = Tuning::new(
        data.eta.unwrap_or(base.eta),
        data.lambda.unwrap_or(base.lambda),
        data.rho0.unwrap_or(base.rho0),
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Prepared { x, y, a, sigma, tuning })
}

fn write_json(path: Option<&Path>, value: &serde_json::Value) -> CliResult<()> {
    if let Some(path) = path {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Data(e.to_string()))?;
        s.push('\n');
        std::fs::write(path, s).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn run_test(args: &TestArgs, out: &mut dyn Write) -> CliResult<()> {
    let prep = prepare(&args.data, &args.loading)?;
    let hyp = Hypothesis::new(prep.a.clone(), args.g0)?;
    let report: TestReport = match &prep.sigma {
        Some(sigma) => test_known_sigma(&prep.x, &prep.y, sigma, &hyp, args.data.alpha)?,
        None => test_unknown_sigma(&prep.x, &prep.y, &hyp, args.data.alpha, prep.tuning)?,
    };
    let method = serde_json::to_value(report.method).map_err(|e| CliError::Data(e.to_string()))?;
    let _ = writeln!(out, "method      {}", method.as_str().unwrap_or_default());
    let _ = writeln!(out, "statistic   {:.6}", report.statistic);
    let _ = writeln!(out, "p_value     {:.6}", report.p_value);
    let _ = writeln!(out, "decision    {}", if report.reject { "reject" } else { "do not reject" });
    if let Some(fit) = &report.diagnostics {
        let nz = |v: &[f64]| v.iter().filter(|x| x.abs() > 1e-10).count();
        let _ = writeln!(out, "rho_hat     {:.6}", fit.rho_hat);
        let _ = writeln!(out, "sigma_eps   {:.6}", fit.sigma_eps_hat);
        let _ = writeln!(out, "sigma_u     {:.6}", fit.sigma_u_hat);
        let _ = writeln!(out, "support     pi {} / gamma {}", nz(&fit.pi_hat), nz(&fit.gamma_hat));
    }
    let value = json!({
        "command": "test",
        "n": prep.x.rows(),
        "p": prep.x.cols(),
        "hypothesis": { "a": prep.a, "g0": args.g0 },
        "tuning": prep.sigma.is_none().then_some(prep.tuning),
        "report": report,
    });
    write_json(args.data.output.as_deref(), &value)
}

fn run_ci(args: &CiArgs, out: &mut dyn Write) -> CliResult<()> {
    let prep = prepare(&args.data, &args.loading)?;
    let grid = args.grid_center.map(|center| Grid {
        center,
        half_width: args.grid_half_width.unwrap_or_default(),
        step: args.grid_step.unwrap_or_default(),
    });
    if let Some(g) = grid {
        g.points().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let method = match &prep.sigma {
        Some(s) => CiMethod::KnownSigma(s),
        None => CiMethod::UnknownSigma(prep.tuning),
    };
    let ci = confidence_interval(&prep.x, &prep.y, &prep.a, args.data.alpha, method, grid)?;
    let _ = writeln!(out, "interval    [{:.6}, {:.6}]", ci.lower, ci.upper);
    let _ = writeln!(out, "level       {}", ci.level);
    let _ = writeln!(out, "contiguous  {}", ci.contiguous);
    if ci.undetermined > 0 {
        let _ = writeln!(out, "undetermined grid points: {}", ci.undetermined);
    }
    if ci.touches_boundary {
        let _ = writeln!(out, "warning: accepted values reach the grid boundary; widen the grid");
    }
    let value = json!({
        "command": "ci",
        "n": prep.x.rows(),
        "p": prep.x.cols(),
        "a": prep.a,
        "method": if prep.sigma.is_some() { "known_sigma" } else { "unknown_sigma" },
        "interval": ci,
    });
    write_json(args.data.output.as_deref(), &value)
}

fn load_config(path: &Path) -> CliResult<SimConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let config: SimConfig = serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    config.validate()?;
    Ok(config)
}

fn campaign(args: &SimulateArgs, config: &SimConfig) -> CliResult<SimResult> {
    if args.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let result = run_campaign_with_threads(config, args.threads.or_else(threads_from_env))?;
    if let Some(p) = &args.csv {
        std::fs::write(p, result.to_csv()).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
    }
    if let Some(p) = &args.json {
        std::fs::write(p, result.to_json()?).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
    }
    Ok(result)
}

fn run_simulate(args: &SimulateArgs, out: &mut dyn Write) -> CliResult<()> {
    let config = load_config(&args.config)?;
    let result = campaign(args, &config)?;
    let _ = write!(out, "{}", result.to_csv());
    Ok(())
}

fn run_null_check(args: &NullCheckArgs, out: &mut dyn Write) -> CliResult<()> {
    let mut config = load_config(&args.sim.config)?;
    config.h_grid = vec![0.0];
    let result = campaign(&args.sim, &config)?;
    for m in &result.results {
        let name = serde_json::to_value(m.method).map_err(|e| CliError::Data(e.to_string()))?;
        let ks = m.ks_p_value.map_or_else(|| "NA".to_string(), |p| format!("{p:.6}"));
        let _ = writeln!(
            out,
            "{} size {} ks_p_value {ks}",
            name.as_str().unwrap_or_default(),
            m.rows[0].rejection_rate
        );
    }
    Ok(())
}
