//! Monte Carlo estimator study over independently seeded replicates.

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use ouwedge::inference::{fit, EstimationResult, Method, SeedEstimate};
use ouwedge::{Algorithm, Family, GridSpec, LevySeed, ModelParams, RngStream};
use rayon::prelude::*;

use crate::error::{reason_code, CliError, CliResult};
use crate::parse;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub replicates: usize,
    pub params: ModelParams,
    pub seed: LevySeed,
    pub grid: GridSpec,
    pub p: usize,
    pub q: usize,
    pub algorithm: Algorithm,
    pub methods: Vec<Method>,
    pub n_lags: usize,
    pub master_seed: u64,
    pub output: Option<PathBuf>,
    pub jobs: Option<usize>,
    /// Adds a per-row timing column; off by default so output is a pure
    /// function of the config.
    pub wall_time: bool,
}

const KEYS: &[&str] = &[
    "replicates",
    "lambda",
    "c",
    "basis",
    "basis_params",
    "algorithm",
    "nx",
    "nt",
    "dx",
    "dt",
    "p",
    "q",
    "methods",
    "n_lags",
    "master_seed",
    "output",
    "jobs",
    "wall_time",
];

impl ExperimentConfig {
    /// Parse a `key = value` config. Unset keys take the desk-scale defaults:
    /// 50 replicates of a 201 x 201 grid at spacing 0.05 with p = q = 300.
    pub fn from_text(text: &str) -> CliResult<Self> {
        let kv = parse::key_values(text)?;
        for (k, (line, _)) in &kv {
            if !KEYS.contains(&k.as_str()) {
                return Err(CliError::ParseError { line: *line, reason: format!("unknown key '{k}'") });
            }
        }
        fn get<T: FromStr>(
            kv: &std::collections::BTreeMap<String, (usize, String)>,
            key: &str,
            default: T,
        ) -> CliResult<T> {
            match kv.get(key) {
                None => Ok(default),
                Some((line, v)) => v.parse::<T>().map_err(|_| CliError::ParseError {
                    line: *line,
                    reason: format!("bad value '{v}' for {key}"),
                }),
            }
        }
        let lambda: f64 = get(&kv, "lambda", 1.0)?;
        let c: f64 = get(&kv, "c", 1.0)?;
        let params = ModelParams::new(lambda, c)?;
        let family: Family = match kv.get("basis") {
            None => Family::Gaussian,
            Some((line, v)) => v.parse().map_err(|e: String| CliError::ParseError { line: *line, reason: e })?,
        };
        let seed = match kv.get("basis_params") {
            Some((_, v)) => parse::basis_params(family, v)?,
            None if family == Family::Gaussian => LevySeed::gaussian(0.2, 0.1)?,
            None => return Err(CliError::Usage(format!("basis_params required for the {family} basis"))),
        };
        let algorithm: Algorithm = match kv.get("algorithm") {
            None => Algorithm::Rg,
            Some((line, v)) => v.parse().map_err(|e: String| CliError::ParseError { line: *line, reason: e })?,
        };
        let dt: f64 = get(&kv, "dt", 0.05)?;
        let dx: f64 = get(&kv, "dx", c * dt)?;
        let grid = GridSpec::new(dx, dt, get(&kv, "nx", 201)?, get(&kv, "nt", 201)?);
        let methods = match kv.get("methods") {
            None => vec![Method::Mm, Method::Ls],
            Some((line, v)) => v
                .split(',')
                .map(|m| m.trim().parse::<Method>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::ParseError { line: *line, reason: e })?,
        };
        let cfg = Self {
            replicates: get(&kv, "replicates", 50)?,
            params,
            seed,
            grid,
            p: get(&kv, "p", 300)?,
            q: get(&kv, "q", 300)?,
            algorithm,
            methods,
            n_lags: get(&kv, "n_lags", 15)?,
            master_seed: get(&kv, "master_seed", 0)?,
            output: kv.get("output").map(|(_, v)| PathBuf::from(v)),
            jobs: kv.get("jobs").map(|(l, v)| {
                v.parse().map_err(|_| CliError::ParseError { line: *l, reason: format!("bad value '{v}' for jobs") })
            }).transpose()?,
            wall_time: get(&kv, "wall_time", false)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.replicates == 0 {
            return Err(CliError::Usage("replicates must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(CliError::Usage("methods must name at least one of mm, ls".into()));
        }
        if self.n_lags == 0 {
            return Err(CliError::Usage("n_lags must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(CliError::Usage("jobs must be at least 1".into()));
        }
        ouwedge::validate_grid(&self.grid)?;
        Ok(())
    }
}

/// One estimate, or the reason there is none.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRow {
    pub replicate: usize,
    pub stream: u64,
    pub method: Method,
    pub outcome: Result<EstimationResult, &'static str>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: Method,
    pub parameter: String,
    pub median: Option<f64>,
    pub iqr: Option<f64>,
    pub valid: usize,
    pub invalid: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub family: Family,
    pub rows: Vec<ReplicateRow>,
    pub summary: Vec<SummaryRow>,
}

fn run_replicate(cfg: &ExperimentConfig, replicate: usize) -> Vec<ReplicateRow> {
    let stream = replicate as u64;
    let start = Instant::now();
    let field = cfg.algorithm.simulate(
        &cfg.params,
        &cfg.seed,
        &cfg.grid,
        cfg.p,
        cfg.q,
        &mut RngStream::new(cfg.master_seed, stream),
    );
    let sim_secs = start.elapsed().as_secs_f64();
    cfg.methods
        .iter()
        .map(|&method| {
            let start = Instant::now();
            let outcome = match &field {
                Ok(f) => fit(f, method, cfg.n_lags, cfg.seed.family()).map_err(|e| reason_code(&e)),
                Err(e) => Err(reason_code(e)),
            };
            ReplicateRow { replicate, stream, method, outcome, seconds: sim_secs + start.elapsed().as_secs_f64() }
        })
        .collect()
}

/// Median and interquartile range with linear interpolation between order
/// statistics.
pub fn median_iqr(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = p * (v.len() - 1) as f64;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        v[lo] + (h - lo as f64) * (v[hi] - v[lo])
    };
    Some((q(0.5), q(0.75) - q(0.25)))
}

fn summarise(cfg: &ExperimentConfig, rows: &[ReplicateRow]) -> Vec<SummaryRow> {
    let family = cfg.seed.family();
    let mut names = vec!["lambda", "c"];
    names.extend_from_slice(family.param_names());
    let mut out = Vec::new();
    for &method in &cfg.methods {
        let mine: Vec<&ReplicateRow> = rows.iter().filter(|r| r.method == method).collect();
        for (k, name) in names.iter().enumerate() {
            let vals: Vec<f64> = mine
                .iter()
                .filter_map(|r| r.outcome.as_ref().ok())
                .filter_map(|e| estimate_values(e).get(k).copied().flatten())
                .collect();
            let stats = median_iqr(&vals);
            out.push(SummaryRow {
                method,
                parameter: name.to_string(),
                median: stats.map(|s| s.0),
                iqr: stats.map(|s| s.1),
                valid: vals.len(),
                invalid: mine.len() - vals.len(),
            });
        }
    }
    out
}

/// `lambda, c, seed parameters...`; invalid seed parameters are `None`.
pub fn estimate_values(e: &EstimationResult) -> Vec<Option<f64>> {
    let mut v = vec![Some(e.lambda_hat), Some(e.c_hat)];
    v.extend(e.seed_hat.param_values());
    v
}

pub fn run_experiment(cfg: &ExperimentConfig) -> CliResult<ExperimentOutput> {
    cfg.validate()?;
    let work = || -> Vec<ReplicateRow> {
        (0..cfg.replicates).into_par_iter().flat_map_iter(|r| run_replicate(cfg, r)).collect()
    };
    // collect() on an indexed parallel iterator keeps replicate order
    let rows = match cfg.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {jobs} worker threads: {e}")))?
            .install(work),
        None => work(),
    };
    let summary = summarise(cfg, &rows);
    Ok(ExperimentOutput { family: cfg.seed.family(), rows, summary })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Per-replicate table, a blank line, then the summary table.
pub fn write_experiment<W: Write>(out: &ExperimentOutput, wall_time: bool, mut w: W) -> std::io::Result<()> {
    let names = out.family.param_names();
    write!(w, "replicate,stream,method,lambda_hat,c_hat")?;
    for n in names {
        write!(w, ",{n}_hat")?;
    }
    write!(w, ",status")?;
    if wall_time {
        write!(w, ",wall_time")?;
    }
    writeln!(w)?;
    for r in &out.rows {
        write!(w, "{},{},{}", r.replicate, r.stream, r.method)?;
        match &r.outcome {
            Ok(e) => {
                for v in estimate_values(e) {
                    write!(w, ",{}", opt(v))?;
                }
                let status = match &e.seed_hat {
                    SeedEstimate::Valid(_) => "ok",
                    SeedEstimate::Invalid { .. } => "seed_invalid",
                };
                write!(w, ",{status}")?;
            }
            Err(code) => {
                write!(w, "{}", ",".repeat(2 + names.len()))?;
                write!(w, ",{code}")?;
            }
        }
        if wall_time {
            write!(w, ",{:.6}", r.seconds)?;
        }
        writeln!(w)?;
    }
    writeln!(w)?;
    writeln!(w, "method,parameter,median,iqr,n_valid,n_invalid")?;
    for s in &out.summary {
        writeln!(w, "{},{},{},{},{},{}", s.method, s.parameter, opt(s.median), opt(s.iqr), s.valid, s.invalid)?;
    }
    w.flush()
}
