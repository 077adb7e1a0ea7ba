use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ouwedge::inference::{fit, Method, SeedEstimate};
use ouwedge::mse::{mse_limit_fixed_delta, mse_parts, Scheme};
use ouwedge::predict::{predict_with, PredictOptions, SiteList};
use ouwedge::theory::{acf_spatial_piecewise, acf_st};
use ouwedge::{Algorithm, Family, GridSpec, LevySeed, ModelParams, RngStream};

use crate::csvio;
use crate::error::{CliError, CliResult};
use crate::experiment::{run_experiment, write_experiment, ExperimentConfig};
use crate::parse;

#[derive(Debug, Parser)]
#[command(name = "ouwedge", version, about = "Simulate, fit and predict spatio-temporal OU fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a field on a grid and write it as x,t,value rows.
    Simulate(SimulateArgs),
    /// Estimate (lambda, c) and the seed law from a field file.
    Fit(FitArgs),
    /// Tabulate the theoretical autocorrelation on a lag grid.
    Acf(AcfArgs),
    /// Tabulate simulation mean squared error over spacing and truncation.
    Mse(MseArgs),
    /// Gaussian conditional mean and variance at new sites.
    Predict(PredictArgs),
    /// Run a replicated estimator study from a config file.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value = "rg")]
    pub alg: Algorithm,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value = "gaussian")]
    pub basis: Family,
    /// Seed parameters as k=v pairs, e.g. mu=0.2,tau=0.1.
    #[arg(long, default_value = "mu=0.2,tau=0.1")]
    pub basis_params: String,
    #[arg(long, default_value_t = 201)]
    pub nx: usize,
    #[arg(long, default_value_t = 201)]
    pub nt: usize,
    #[arg(long, default_value_t = 0.05)]
    pub dt: f64,
    /// Defaults to c * dt.
    #[arg(long)]
    pub dx: Option<f64>,
    #[arg(long, default_value_t = 300)]
    pub p: usize,
    #[arg(long, default_value_t = 300)]
    pub q: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, default_value = "mm")]
    pub method: Method,
    #[arg(long, default_value_t = 15)]
    pub lags: usize,
    #[arg(long, default_value = "gaussian")]
    pub basis: Family,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AcfArgs {
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub c: Option<f64>,
    /// Slope before unit temporal distance, for the two-slope spatial ACF.
    #[arg(long, requires = "c2")]
    pub c1: Option<f64>,
    /// Slope after unit temporal distance.
    #[arg(long, requires = "c1")]
    pub c2: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub dx_max: f64,
    #[arg(long, default_value_t = 0.0)]
    pub dt_max: f64,
    #[arg(long)]
    pub step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MseArgs {
    /// rg, dg, or both.
    #[arg(long, default_value = "both")]
    pub alg: String,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 0.2)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.1)]
    pub tau: f64,
    /// Spacing: a value, a list a,b,c, or start:stop:step.
    #[arg(long)]
    pub delta: String,
    /// Truncation in time units, same syntax; `inf` gives the limit.
    #[arg(long = "R")]
    pub r: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Observations as x,t,value rows.
    #[arg(long)]
    pub obs: PathBuf,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub c: f64,
    #[arg(long)]
    pub mu: f64,
    #[arg(long)]
    pub tau: f64,
    /// Target site x,t; repeatable.
    #[arg(long, required = true)]
    pub at: Vec<String>,
    /// Relative diagonal jitter tried if the correlation matrix is singular.
    #[arg(long, default_value_t = 0.0)]
    pub nugget: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Upper bound on concurrent replicates.
    #[arg(long)]
    pub jobs: Option<usize>,
}

fn sink(out: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    match out {
        Some(p) => {
            let f = fs::File::create(p).map_err(|e| CliError::io(p.display().to_string(), e))?;
            Ok(Box::new(io::BufWriter::new(f)))
        }
        None => Ok(Box::new(io::BufWriter::new(io::stdout().lock()))),
    }
}

fn io_err(out: &Option<PathBuf>) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::io(out.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "stdout".into()), e)
}

pub fn simulate(a: &SimulateArgs) -> CliResult<()> {
    let params = ModelParams::new(a.lambda, a.c)?;
    let seed = parse::basis_params(a.basis, &a.basis_params)?;
    let grid = GridSpec::new(a.dx.unwrap_or(a.c * a.dt), a.dt, a.nx, a.nt);
    let field = a.alg.simulate(&params, &seed, &grid, a.p, a.q, &mut RngStream::new(a.seed, a.stream))?;
    csvio::write_field(&field, sink(&a.out)?).map_err(io_err(&a.out))
}

pub fn fit_cmd(a: &FitArgs) -> CliResult<()> {
    let field = csvio::read_field_csv(&a.input)?;
    let e = fit(&field, a.method, a.lags, a.basis)?;
    let mut w = sink(&a.out)?;
    let names = a.basis.param_names();
    let mut header = String::from("method,lags,lambda_hat,c_hat");
    for n in names {
        header.push_str(&format!(",{n}_hat"));
    }
    header.push_str(",status");
    let mut row = format!("{},{},{},{}", e.method, e.lags_used, e.lambda_hat, e.c_hat);
    for v in e.seed_hat.param_values() {
        row.push(',');
        if let Some(v) = v {
            row.push_str(&v.to_string());
        }
    }
    row.push_str(match &e.seed_hat {
        SeedEstimate::Valid(_) => ",ok",
        SeedEstimate::Invalid { .. } => ",seed_invalid",
    });
    writeln!(w, "{header}\n{row}").and_then(|_| w.flush()).map_err(io_err(&a.out))
}

/// `0, step, 2 step, ...` up to `max`.
fn lag_axis(max: f64, step: f64) -> Vec<f64> {
    let count = (max / step + 1e-9).floor() as usize;
    (0..=count).map(|k| k as f64 * step).collect()
}

pub fn acf(a: &AcfArgs) -> CliResult<()> {
    if !(a.step > 0.0 && a.step.is_finite()) || a.dx_max < 0.0 || a.dt_max < 0.0 {
        return Err(CliError::Usage("step must be > 0 and maxima >= 0".into()));
    }
    let mut w = sink(&a.out)?;
    let mut text = String::from("dx,dt,acf\n");
    match (a.c1, a.c2) {
        (Some(c1), Some(c2)) => {
            if !(a.lambda > 0.0 && c1 > 0.0 && c2 > 0.0) {
                return Err(CliError::Usage("lambda, c1 and c2 must be positive".into()));
            }
            for dx in lag_axis(a.dx_max, a.step).into_iter().skip(1) {
                text.push_str(&format!("{dx},0,{}\n", acf_spatial_piecewise(a.lambda, c1, c2, dx)));
            }
        }
        _ => {
            let c = a.c.ok_or_else(|| CliError::Usage("--c is required unless --c1 and --c2 are given".into()))?;
            let params = ModelParams::new(a.lambda, c)?;
            for dx in lag_axis(a.dx_max, a.step) {
                for dt in lag_axis(a.dt_max, a.step) {
                    if dx == 0.0 && dt == 0.0 {
                        continue;
                    }
                    text.push_str(&format!("{dx},{dt},{}\n", acf_st(&params, dx, dt)));
                }
            }
        }
    }
    w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(io_err(&a.out))
}

pub fn mse(a: &MseArgs) -> CliResult<()> {
    let schemes = match a.alg.to_ascii_lowercase().as_str() {
        "both" => vec![Scheme::Rg, Scheme::Dg],
        s => vec![s.parse::<Scheme>().map_err(CliError::Usage)?],
    };
    let params = ModelParams::new(a.lambda, a.c)?;
    let deltas = parse::sweep(&a.delta)?;
    let rs = parse::sweep(&a.r)?;
    let mut text = String::from("alg,delta,R,bias2,variance,mse\n");
    for &scheme in &schemes {
        for &delta in &deltas {
            for &r in &rs {
                if r.is_infinite() {
                    let total = mse_limit_fixed_delta(scheme, &params, a.mu, a.tau, delta)?;
                    text.push_str(&format!("{scheme},{delta},inf,,,{total}\n"));
                } else {
                    let parts = mse_parts(scheme, &params, a.mu, a.tau, delta, r)?;
                    text.push_str(&format!(
                        "{scheme},{delta},{r},{},{},{}\n",
                        parts.bias2,
                        parts.variance,
                        parts.total()
                    ));
                }
            }
        }
    }
    let mut w = sink(&a.out)?;
    w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(io_err(&a.out))
}

pub fn predict(a: &PredictArgs) -> CliResult<()> {
    let rows = csvio::read_rows_csv(&a.obs)?;
    let obs = SiteList::new(rows.iter().map(|r| (r.0, r.1)).collect(), rows.iter().map(|r| r.2).collect())?;
    let params = ModelParams::new(a.lambda, a.c)?;
    let seed = LevySeed::gaussian(a.mu, a.tau)?;
    let opts = PredictOptions { nugget: a.nugget };
    let mut text = String::from("x,t,mean,variance,nugget\n");
    for at in &a.at {
        let target = parse::site(at)?;
        let p = predict_with(&params, &seed, &obs, target, opts)?;
        text.push_str(&format!("{},{},{},{},{}\n", target.0, target.1, p.mean, p.variance, p.nugget));
    }
    let mut w = sink(&a.out)?;
    w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(io_err(&a.out))
}

pub fn experiment(a: &ExperimentArgs) -> CliResult<()> {
    let text = fs::read_to_string(&a.config).map_err(|e| CliError::io(a.config.display().to_string(), e))?;
    let mut cfg = ExperimentConfig::from_text(&text)?;
    if a.out.is_some() {
        cfg.output = a.out.clone();
    }
    if a.jobs.is_some() {
        cfg.jobs = a.jobs;
    }
    // relative output paths resolve against the config file's directory
    if let Some(p) = &cfg.output {
        if p.is_relative() && a.out.is_none() {
            let base = a.config.parent().unwrap_or(Path::new("."));
            cfg.output = Some(base.join(p));
        }
    }
    let result = run_experiment(&cfg)?;
    write_experiment(&result, cfg.wall_time, sink(&cfg.output)?).map_err(io_err(&cfg.output))
}

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Fit(a) => fit_cmd(a),
        Command::Acf(a) => acf(a),
        Command::Mse(a) => mse(a),
        Command::Predict(a) => predict(a),
        Command::Experiment(a) => experiment(a),
    }
}
