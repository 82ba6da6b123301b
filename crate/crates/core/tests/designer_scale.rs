use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use apal::designer::{anneal, energy_basic, AnnealSchedule, BasicEnergy, DesignContext};
use apal::meanfield::{BeliefState, UpdateParams};
use apal::{classify, SpinVector};

/// Beliefs after `p` random labelled patterns.
fn trained(n: usize, p: usize, rng: &mut ChaCha8Rng) -> BeliefState {
    let teacher = SpinVector::random(n, rng).unwrap();
    let mut belief = BeliefState::new(n);
    let params = UpdateParams::default();
    for _ in 0..p {
        let xi = SpinVector::random(n, rng).unwrap();
        belief
            .update(&xi, classify(&teacher, &xi).unwrap(), &params)
            .unwrap();
    }
    belief
}

#[test]
fn annealed_patterns_beat_random_ones() {
    let n = 99;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let belief = trained(n, 100, &mut rng);
    let mut ctx = DesignContext::new(n, 1.0, 0);
    ctx.mean_weights = belief.means().to_vec();

    let mut random: Vec<f64> = (0..10_000)
        .map(|_| energy_basic(&SpinVector::random(n, &mut rng).unwrap(), &ctx).unwrap())
        .collect();
    random.sort_by(f64::total_cmp);
    let first_percentile = random[100];
    let median_random = random[5000];

    let sched = AnnealSchedule::default();
    let mut annealed: Vec<f64> = (0..21)
        .map(|_| {
            let mut e = BasicEnergy::new(&ctx.mean_weights);
            let a = anneal(&mut e, &sched, &mut rng).unwrap();
            let direct = energy_basic(&a.pattern, &ctx).unwrap();
            assert!((direct - a.final_energy).abs() < 1e-9);
            direct
        })
        .collect();
    annealed.sort_by(f64::total_cmp);
    let median = annealed[10];
    assert!(
        median < first_percentile && median < 0.01 * median_random,
        "annealed median {median}, random 1% {first_percentile}, random median {median_random}"
    );
}
