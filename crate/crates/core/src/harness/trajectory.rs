use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{ExperimentConfig, Mode};
use crate::deductive::DeductiveLearner;
use crate::designer::{anneal, BasicEnergy, DesignContext, OrthogonalEnergy};
use crate::error::Result;
use crate::meanfield::BeliefState;
use crate::spin::{Spin, SpinVector, TeacherOracle};
use crate::version_space::{StatsOptions, VersionSpace};

/// State of one trajectory after `p` labelled patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub p: usize,
    /// Fraction of wrongly inferred teacher weights.
    pub error: f64,
    pub success: bool,
    /// Exact modes only.
    pub entropy: Option<f64>,
    /// Exact modes only.
    pub gen: Option<f64>,
    /// Teacher queries issued so far.
    pub queries: u64,
    /// Exact modes only.
    pub vs_size: Option<usize>,
    /// Final annealing energy of the latest pattern (design modes).
    pub design_energy: Option<f64>,
    /// Label imbalance of the latest pattern over the version space before filtering.
    pub imbalance: Option<u64>,
    /// The latest pattern was already used earlier in this trajectory.
    pub duplicate: bool,
}

impl StepRecord {
    fn new(p: usize, estimate: &SpinVector, teacher: &SpinVector, queries: u64) -> Result<Self> {
        let error = estimate.hamming_error(teacher)?;
        Ok(StepRecord {
            p,
            error,
            success: error == 0.0,
            entropy: None,
            gen: None,
            queries,
            vs_size: None,
            design_energy: None,
            imbalance: None,
            duplicate: false,
        })
    }
}

/// Random stream for trajectory `index`: the master seed picks the key and
/// the index picks the stream, so trajectories never share random numbers.
pub fn trajectory_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Runs trajectory `index` of the ensemble described by `cfg`.
///
/// Returns `p_max + 1` records for `p = 0..=p_max`; record 0 is the untrained
/// student.
pub fn run_trajectory(cfg: &ExperimentConfig, index: u64) -> Result<Vec<StepRecord>> {
    cfg.validate()?;
    let mut rng = trajectory_rng(cfg.master_seed, index);
    let teacher = SpinVector::random(cfg.n, &mut rng)?;
    let mut oracle = TeacherOracle::new(teacher.clone());
    match cfg.mode {
        Mode::Passive | Mode::Design | Mode::DesignOrtho => {
            run_meanfield(cfg, &mut oracle, &teacher, &mut rng)
        }
        Mode::ExactSmall | Mode::ExactPassiveSmall => {
            run_exact(cfg, &mut oracle, &teacher, &mut rng)
        }
        Mode::Deductive => run_deductive_steps(cfg, &mut oracle, &teacher, &mut rng),
    }
}

fn run_meanfield(
    cfg: &ExperimentConfig,
    oracle: &mut TeacherOracle,
    teacher: &SpinVector,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<StepRecord>> {
    let p_max = cfg.p_max();
    let mut belief = BeliefState::new(cfg.n);
    let memory = if cfg.mode == Mode::DesignOrtho {
        cfg.memory_len()
    } else {
        0
    };
    let mut ctx = DesignContext::new(cfg.n, cfg.lambda, memory);
    let mut seen = HashSet::new();
    let mut records = Vec::with_capacity(p_max + 1);
    records.push(StepRecord::new(0, &belief.infer(), teacher, 0)?);

    for p in 1..=p_max {
        let (xi, energy) = match cfg.mode {
            Mode::Passive => (SpinVector::random(cfg.n, rng)?, None),
            Mode::Design => {
                let mut e = BasicEnergy::new(belief.means());
                let a = anneal(&mut e, &cfg.schedule, rng)?;
                (a.pattern, Some(a.final_energy))
            }
            _ => {
                ctx.mean_weights.copy_from_slice(belief.means());
                let mut e = OrthogonalEnergy::new(&ctx);
                let a = anneal(&mut e, &cfg.schedule, rng)?;
                (a.pattern, Some(a.final_energy))
            }
        };
        let label = oracle.classify(&xi)?;
        belief.update(&xi, label, &cfg.update)?;
        if memory > 0 {
            ctx.memory.push(&xi)?;
        }
        let mut rec = StepRecord::new(p, &belief.infer(), teacher, oracle.query_count())?;
        rec.design_energy = energy;
        rec.duplicate = !seen.insert(xi.words().to_vec());
        records.push(rec);
    }
    Ok(records)
}

fn run_exact(
    cfg: &ExperimentConfig,
    oracle: &mut TeacherOracle,
    teacher: &SpinVector,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<StepRecord>> {
    let p_max = cfg.p_max();
    let opts = StatsOptions {
        gen_error: cfg.gen_error,
        pair_correlations: false,
    };
    let mut vs = VersionSpace::enumerate_initial(cfg.n)?;
    let mut seen = HashSet::new();
    let mut records = Vec::with_capacity(p_max + 1);

    let snapshot = |vs: &VersionSpace, p: usize, queries: u64, rng: &mut ChaCha8Rng| {
        let stats = vs.stats(teacher, opts, rng)?;
        let estimate = SpinVector::from_spins(
            &stats
                .mean_weights
                .iter()
                .map(|&m| Spin::sign_of_f64(m))
                .collect::<Vec<_>>(),
        )?;
        let mut rec = StepRecord::new(p, &estimate, teacher, queries)?;
        rec.entropy = Some(stats.entropy_density);
        rec.gen = Some(stats.generalization_error);
        rec.vs_size = Some(vs.len());
        Ok::<_, crate::error::Error>(rec)
    };
    records.push(snapshot(&vs, 0, 0, rng)?);

    for p in 1..=p_max {
        let (xi, imbalance) = if cfg.mode == Mode::ExactSmall {
            let d = vs.bisect_design(&cfg.bisect, rng);
            (d.pattern, d.imbalance)
        } else {
            let xi = SpinVector::random(cfg.n, rng)?;
            let imbalance = vs.label_sum(&xi)?.unsigned_abs();
            (xi, imbalance)
        };
        let label = oracle.classify(&xi)?;
        vs.filter(&xi, label)?;
        let mut rec = snapshot(&vs, p, oracle.query_count(), rng)?;
        rec.imbalance = Some(imbalance);
        rec.duplicate = !seen.insert(xi.words().to_vec());
        records.push(rec);
    }
    Ok(records)
}

fn run_deductive_steps(
    cfg: &ExperimentConfig,
    oracle: &mut TeacherOracle,
    teacher: &SpinVector,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<StepRecord>> {
    let p_max = cfg.p_max();
    let mut learner = DeductiveLearner::new(SpinVector::random(cfg.n, rng)?);
    let mut records = Vec::with_capacity(p_max + 1);
    records.push(StepRecord::new(0, &learner.estimate(), teacher, 0)?);
    for p in 1..=p_max {
        // once finished the state is frozen
        if let Some(q) = learner.next_query() {
            let label = oracle.classify(&q)?;
            learner.observe(label);
        }
        records.push(StepRecord::new(
            p,
            &learner.estimate(),
            teacher,
            oracle.query_count(),
        )?);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passive_is_deterministic() {
        let cfg = ExperimentConfig::new(Mode::Passive, 21, 2.0, 1, 5);
        let a = run_trajectory(&cfg, 3).unwrap();
        let b = run_trajectory(&cfg, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 43);
        let c = run_trajectory(&cfg, 4).unwrap();
        assert_ne!(a, c);
        for r in &a {
            assert_eq!(r.queries, r.p as u64);
        }
    }

    #[test]
    fn deductive_ends_exact() {
        let cfg = ExperimentConfig::new(Mode::Deductive, 33, 1.5, 1, 11);
        for idx in 0..20 {
            let recs = run_trajectory(&cfg, idx).unwrap();
            let last = recs.last().unwrap();
            assert_eq!(last.error, 0.0);
            assert!(last.success);
            assert!(last.queries <= 33 + 6);
        }
    }

    #[test]
    fn exact_small_first_split() {
        let cfg = ExperimentConfig::new(Mode::ExactSmall, 3, 1.0, 1, 2);
        let recs = run_trajectory(&cfg, 0).unwrap();
        assert_eq!(recs[0].vs_size, Some(8));
        assert_eq!(recs[1].vs_size, Some(4));
        assert_eq!(recs[0].entropy, Some(1.0));
        for w in recs.windows(2) {
            assert!(w[1].entropy.unwrap() <= w[0].entropy.unwrap());
        }
    }

    #[test]
    fn design_modes_record_energy() {
        let mut cfg = ExperimentConfig::new(Mode::DesignOrtho, 15, 1.0, 1, 9);
        cfg.schedule.levels = 20;
        let recs = run_trajectory(&cfg, 0).unwrap();
        assert!(recs[0].design_energy.is_none());
        assert!(recs[1..].iter().all(|r| r.design_energy.is_some()));
        cfg.mode = Mode::Design;
        let recs = run_trajectory(&cfg, 0).unwrap();
        assert!(recs[1..].iter().all(|r| r.design_energy.unwrap() >= 0.0));
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = ExperimentConfig::new(Mode::ExactSmall, 27, 1.0, 1, 0);
        assert!(run_trajectory(&cfg, 0).is_err());
    }
}
