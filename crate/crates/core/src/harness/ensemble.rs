use rayon::prelude::*;

use super::config::{ExperimentConfig, Mode};
use super::trajectory::{run_trajectory, StepRecord};
use crate::error::Result;

/// Trajectories run concurrently per batch before being folded in.
const BATCH: usize = 32;

/// One aggregated line of output: ensemble averages at a fixed `(mode, N, P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub mode: Mode,
    pub n: usize,
    pub p: usize,
    pub alpha: f64,
    pub mean_error: f64,
    pub success_fraction: f64,
    pub entropy_density: Option<f64>,
    pub gen_error: Option<f64>,
    pub mean_queries: Option<f64>,
    pub runs: usize,
}

#[derive(Debug, Clone, Default)]
struct Sums {
    error: f64,
    success: usize,
    entropy: Option<f64>,
    gen: Option<f64>,
    queries: u64,
}

fn add_opt(acc: &mut Option<f64>, v: Option<f64>) {
    if let Some(v) = v {
        *acc = Some(acc.unwrap_or(0.0) + v);
    }
}

/// Per-`P` running sums. Trajectories must be added in a fixed order for the
/// floating-point totals to be reproducible.
#[derive(Debug, Clone)]
pub struct Aggregator {
    mode: Mode,
    n: usize,
    sums: Vec<Sums>,
    runs: usize,
}

impl Aggregator {
    pub fn new(mode: Mode, n: usize, steps: usize) -> Self {
        Aggregator {
            mode,
            n,
            sums: vec![Sums::default(); steps],
            runs: 0,
        }
    }

    pub fn runs(&self) -> usize {
        self.runs
    }

    pub fn add(&mut self, records: &[StepRecord]) {
        for (s, r) in self.sums.iter_mut().zip(records) {
            s.error += r.error;
            s.success += r.success as usize;
            add_opt(&mut s.entropy, r.entropy);
            add_opt(&mut s.gen, r.gen);
            s.queries += r.queries;
        }
        self.runs += 1;
    }

    pub fn rows(&self) -> Vec<MetricsRow> {
        let runs = self.runs.max(1) as f64;
        self.sums
            .iter()
            .enumerate()
            .map(|(p, s)| MetricsRow {
                mode: self.mode,
                n: self.n,
                p,
                alpha: p as f64 / self.n as f64,
                mean_error: s.error / runs,
                success_fraction: s.success as f64 / runs,
                entropy_density: s.entropy.map(|e| e / runs),
                gen_error: s.gen.map(|g| g / runs),
                mean_queries: Some(s.queries as f64 / runs),
                runs: self.runs,
            })
            .collect()
    }
}

/// Runs every trajectory of `cfg` and averages them per `P`.
pub fn run_ensemble(cfg: &ExperimentConfig) -> Result<Vec<MetricsRow>> {
    run_ensemble_with(cfg, |_, _| {})
}

/// As [`run_ensemble`], additionally handing each trajectory to `observe` in
/// index order.
pub fn run_ensemble_with<F>(cfg: &ExperimentConfig, mut observe: F) -> Result<Vec<MetricsRow>>
where
    F: FnMut(u64, &[StepRecord]),
{
    cfg.validate()?;
    let mut agg = Aggregator::new(cfg.mode, cfg.n, cfg.p_max() + 1);
    let mut start = 0;
    while start < cfg.runs {
        let end = (start + BATCH).min(cfg.runs);
        let batch: Vec<Vec<StepRecord>> = (start..end)
            .into_par_iter()
            .map(|i| run_trajectory(cfg, i as u64))
            .collect::<Result<_>>()?;
        for (offset, records) in batch.iter().enumerate() {
            observe((start + offset) as u64, records);
            agg.add(records);
        }
        start = end;
    }
    Ok(agg.rows())
}

/// Smallest `alpha` whose success fraction reaches `threshold`.
pub fn success_onset(rows: &[MetricsRow], threshold: f64) -> Option<f64> {
    rows.iter()
        .filter(|r| r.success_fraction >= threshold)
        .map(|r| r.alpha)
        .min_by(f64::total_cmp)
}
