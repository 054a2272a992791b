//! `run`: execute every experiment of a config and write the reports.

use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use chaoslab_core::disorder::{splitmix64, SeedSpec};
use chaoslab_core::harness::{run_theorem, BoundReport, Verdict};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::output::{csv_record, plot_data, varying_axes, CSV_HEADER};
use crate::{EXIT_FAIL, EXIT_HYPOTHESIS, EXIT_OK};

pub const THREADS_ENV: &str = "CHAOSLAB_THREADS";

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentManifest {
    pub index: usize,
    pub label: String,
    pub theorem: String,
    pub seed: u64,
    pub rows: usize,
    pub wall_clock_seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config_sha256: String,
    pub master_seed: u64,
    pub threads: usize,
    pub experiments: Vec<ExperimentManifest>,
    pub total_rows: usize,
    pub wall_clock_seconds: f64,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub reports: Vec<BoundReport>,
    pub manifest: RunManifest,
    pub results_csv: PathBuf,
}

/// Seed of experiment `index`: its own `seed` key, else mixed from the master.
pub fn experiment_seed(master: u64, index: usize, explicit: Option<u64>) -> u64 {
    explicit.unwrap_or_else(|| splitmix64(master ^ splitmix64(index as u64)))
}

/// Fail rows take priority over hypothesis failures.
pub fn exit_code_for(verdicts: impl IntoIterator<Item = Verdict>) -> i32 {
    let mut code = EXIT_OK;
    for v in verdicts {
        match v {
            Verdict::Fail => return EXIT_FAIL,
            Verdict::HypothesisFailed => code = EXIT_HYPOTHESIS,
            Verdict::Pass | Verdict::Reference => {}
        }
    }
    code
}

/// Thread count from `CHAOSLAB_THREADS` (unset or 0 means rayon's default).
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => {
            let n: usize = v.trim().parse().with_context(|| format!("{THREADS_ENV}={v:?} is not a count"))?;
            Ok((n > 0).then_some(n))
        }
        _ => Ok(None),
    }
}

/// Loads `config_path` and runs it into `out_dir` (or the config's
/// `output_dir`).
pub fn run(config_path: &Path, out_dir: Option<&Path>, seed_override: Option<u64>, threads: Option<usize>) -> Result<RunOutcome> {
    let (cfg, bytes) = RunConfig::load(config_path)?;
    let out = match (out_dir, &cfg.output_dir) {
        (Some(o), _) => o.to_path_buf(),
        (None, Some(o)) => o.clone(),
        (None, None) => anyhow::bail!("no output directory: pass --out or set output_dir"),
    };
    run_config(&cfg, &bytes, &out, seed_override, threads)
}

pub fn run_config(
    cfg: &RunConfig,
    config_bytes: &[u8],
    out_dir: &Path,
    seed_override: Option<u64>,
    threads: Option<usize>,
) -> Result<RunOutcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().context("building the thread pool")?;
    let thread_count = pool.current_num_threads();
    pool.install(|| execute(cfg, config_bytes, out_dir, seed_override, thread_count))
}

fn execute(
    cfg: &RunConfig,
    config_bytes: &[u8],
    out_dir: &Path,
    seed_override: Option<u64>,
    threads: usize,
) -> Result<RunOutcome> {
    let started = Instant::now();
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let plots = out_dir.join("plots");
    let results_csv = out_dir.join("results.csv");
    let mut writer = csv::Writer::from_writer(File::create(&results_csv)?);
    writer.write_record(CSV_HEADER)?;
    writer.flush()?;

    let master = seed_override.unwrap_or(cfg.master_seed);
    let mut manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_sha256: hex::encode(Sha256::digest(config_bytes)),
        master_seed: master,
        threads,
        experiments: Vec::new(),
        total_rows: 0,
        wall_clock_seconds: 0.0,
    };
    let mut all = Vec::new();
    let mut failure = None;
    for (index, exp) in cfg.experiments.iter().enumerate() {
        let t0 = Instant::now();
        let seed = experiment_seed(master, index, if seed_override.is_some() { None } else { exp.seed });
        let label = exp.label(index);
        let mut rows = Vec::new();
        for (model, point) in exp.points() {
            let report = run_theorem(exp.theorem, &model, &point, &exp.engine, exp.n_disorder, SeedSpec::new(seed, 0));
            match report {
                Ok(r) => {
                    writer.write_record(csv_record(&r))?;
                    writer.flush()?;
                    rows.push(r);
                }
                Err(e) => {
                    failure = Some(anyhow::Error::new(e).context(format!("experiment {label}")));
                    break;
                }
            }
        }
        if !rows.is_empty() {
            write_plots(&plots, &label, &rows)?;
        }
        manifest.experiments.push(ExperimentManifest {
            index,
            label,
            theorem: exp.theorem.to_string(),
            seed,
            rows: rows.len(),
            wall_clock_seconds: t0.elapsed().as_secs_f64(),
        });
        all.extend(rows);
        if failure.is_some() {
            break;
        }
    }
    manifest.total_rows = all.len();
    manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
    let mut f = File::create(out_dir.join("manifest.json"))?;
    serde_json::to_writer_pretty(&mut f, &manifest)?;
    f.write_all(b"\n")?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(RunOutcome {
        exit_code: exit_code_for(all.iter().map(|r| r.verdict)),
        reports: all,
        manifest,
        results_csv,
    })
}

fn write_plots(dir: &Path, label: &str, rows: &[BoundReport]) -> Result<()> {
    let axes = varying_axes(rows);
    if axes.is_empty() {
        return Ok(());
    }
    fs::create_dir_all(dir)?;
    let safe: String = label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect();
    let theorem = rows[0].theorem_id;
    for axis in axes {
        let base = format!("{safe}_{theorem}_{}", axis.name());
        fs::write(dir.join(format!("{base}.lhs.dat")), plot_data(rows, axis, |r| r.lhs))?;
        fs::write(dir.join(format!("{base}.rhs.dat")), plot_data(rows, axis, |r| r.rhs))?;
    }
    Ok(())
}
