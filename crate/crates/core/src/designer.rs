//! Training-pattern generation.
//!
//! Passive learners draw uniform random patterns. Active learners sample a
//! pattern whose mean overlap with the current beliefs is close to zero by
//! simulated annealing, optionally with a penalty on the squared overlaps with
//! the most recent training patterns.
//!
//! Energies are tracked incrementally: flipping entry `i` changes the mean
//! overlap by `-2 m_i ξ_i` and every stored overlap `c_μ` by `-2 ξ_i^μ ξ_i`,
//! so the orthogonality penalty only needs the field
//! `g_i = sum_μ ξ_i^μ c_μ`, which is updated from the stored-pattern
//! correlation matrix on each accepted flip.

use std::collections::VecDeque;

use rand::Rng;

use crate::error::{Error, Result};
use crate::spin::SpinVector;

/// Geometric inverse-temperature schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub beta0: f64,
    pub r_beta: f64,
    pub levels: usize,
    /// Flip proposals per level; `None` means `N`.
    pub flips_per_level: Option<usize>,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            beta0: 0.01,
            r_beta: 1.1,
            levels: 100,
            flips_per_level: None,
        }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta0 > 0.0 && self.beta0.is_finite()) {
            return Err(Error::Config(format!(
                "beta0 must be positive, got {}",
                self.beta0
            )));
        }
        if !(self.r_beta > 1.0 && self.r_beta.is_finite()) {
            return Err(Error::Config(format!(
                "rbeta must exceed 1, got {}",
                self.r_beta
            )));
        }
        if self.levels == 0 {
            return Err(Error::Config("anneal levels must be at least 1".into()));
        }
        Ok(())
    }
}

/// Uniform random Ising pattern.
pub fn random_pattern<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SpinVector> {
    SpinVector::random(n, rng)
}

/// The most recent training patterns, newest first, with their summed outer
/// product `C_ij = sum_μ ξ_i^μ ξ_j^μ`.
#[derive(Debug, Clone)]
pub struct PatternMemory {
    n: usize,
    capacity: usize,
    patterns: VecDeque<Vec<i8>>,
    correlation: Vec<i32>,
}

impl PatternMemory {
    pub fn new(n: usize, capacity: usize) -> Self {
        PatternMemory {
            n,
            capacity,
            patterns: VecDeque::with_capacity(capacity),
            correlation: vec![0; if capacity > 0 { n * n } else { 0 }],
        }
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Stored patterns, newest first.
    pub fn patterns(&self) -> impl Iterator<Item = &[i8]> {
        self.patterns.iter().map(Vec::as_slice)
    }

    fn accumulate(&mut self, x: &[i8], sign: i32) {
        let n = self.n;
        for (i, &xi) in x.iter().enumerate() {
            let row = &mut self.correlation[i * n..(i + 1) * n];
            let a = sign * xi as i32;
            for (c, &xj) in row.iter_mut().zip(x) {
                *c += a * xj as i32;
            }
        }
    }

    pub fn push(&mut self, pattern: &SpinVector) -> Result<()> {
        if pattern.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: pattern.len(),
            });
        }
        if self.capacity == 0 {
            return Ok(());
        }
        if self.patterns.len() == self.capacity {
            let old = self.patterns.pop_back().expect("full ring");
            self.accumulate(&old, -1);
        }
        let x = pattern.to_i8();
        self.accumulate(&x, 1);
        self.patterns.push_front(x);
        Ok(())
    }

    #[inline]
    fn correlation_row(&self, i: usize) -> &[i32] {
        &self.correlation[i * self.n..(i + 1) * self.n]
    }
}

/// Everything the annealer needs to score a candidate pattern.
#[derive(Debug, Clone)]
pub struct DesignContext {
    pub mean_weights: Vec<f64>,
    pub memory: PatternMemory,
    pub lambda: f64,
}

impl DesignContext {
    /// Context with an empty memory of capacity `m`.
    pub fn new(n: usize, lambda: f64, m: usize) -> Self {
        DesignContext {
            mean_weights: vec![0.0; n],
            memory: PatternMemory::new(n, m),
            lambda,
        }
    }

    pub fn n(&self) -> usize {
        self.mean_weights.len()
    }
}

fn dot_i8(a: &[i8], b: &[i8]) -> i64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x as i64) * (y as i64))
        .sum()
}

/// `|sum_i m_i ξ_i|`.
pub fn energy_basic(xi: &SpinVector, ctx: &DesignContext) -> Result<f64> {
    if xi.len() != ctx.n() {
        return Err(Error::LengthMismatch {
            expected: ctx.n(),
            found: xi.len(),
        });
    }
    Ok(xi
        .iter()
        .zip(&ctx.mean_weights)
        .map(|(s, m)| s.as_f64() * m)
        .sum::<f64>()
        .abs())
}

/// [`energy_basic`] plus `λ` times the mean squared overlap with the stored patterns.
pub fn energy_orthogonal(xi: &SpinVector, ctx: &DesignContext) -> Result<f64> {
    let basic = energy_basic(xi, ctx)?;
    if ctx.memory.is_empty() {
        return Ok(basic);
    }
    let x = xi.to_i8();
    let sum_sq: i64 = ctx.memory.patterns().map(|p| dot_i8(p, &x).pow(2)).sum();
    Ok(basic + ctx.lambda * sum_sq as f64 / ctx.memory.len() as f64)
}

/// An energy that can be evaluated incrementally under single-spin flips.
pub trait AnnealEnergy {
    fn n(&self) -> usize;
    /// Recomputes the cached state for configuration `xi`.
    fn reset(&mut self, xi: &[i8]);
    /// Energy change if entry `i` of `xi` were flipped.
    fn delta(&self, xi: &[i8], i: usize) -> f64;
    /// Updates the cache for a flip of entry `i`; `xi` is still unflipped.
    fn commit(&mut self, xi: &[i8], i: usize);
    fn energy(&self) -> f64;
}

/// Incremental form of [`energy_basic`].
#[derive(Debug)]
pub struct BasicEnergy<'a> {
    mean: &'a [f64],
    sum: f64,
}

impl<'a> BasicEnergy<'a> {
    pub fn new(mean: &'a [f64]) -> Self {
        BasicEnergy { mean, sum: 0.0 }
    }
}

impl AnnealEnergy for BasicEnergy<'_> {
    fn n(&self) -> usize {
        self.mean.len()
    }

    fn reset(&mut self, xi: &[i8]) {
        self.sum = xi.iter().zip(self.mean).map(|(&x, m)| x as f64 * m).sum();
    }

    #[inline]
    fn delta(&self, xi: &[i8], i: usize) -> f64 {
        (self.sum - 2.0 * self.mean[i] * xi[i] as f64).abs() - self.sum.abs()
    }

    #[inline]
    fn commit(&mut self, xi: &[i8], i: usize) {
        self.sum -= 2.0 * self.mean[i] * xi[i] as f64;
    }

    fn energy(&self) -> f64 {
        self.sum.abs()
    }
}

/// Incremental form of [`energy_orthogonal`].
#[derive(Debug)]
pub struct OrthogonalEnergy<'a> {
    basic: BasicEnergy<'a>,
    memory: &'a PatternMemory,
    lambda: f64,
    /// `g_i = sum_μ ξ_i^μ c_μ`
    field: Vec<i32>,
    /// `sum_μ c_μ^2`
    sum_sq: i64,
}

impl<'a> OrthogonalEnergy<'a> {
    pub fn new(ctx: &'a DesignContext) -> Self {
        OrthogonalEnergy {
            basic: BasicEnergy::new(&ctx.mean_weights),
            memory: &ctx.memory,
            lambda: ctx.lambda,
            field: vec![0; ctx.n()],
            sum_sq: 0,
        }
    }

    fn stored(&self) -> usize {
        self.memory.len()
    }
}

impl AnnealEnergy for OrthogonalEnergy<'_> {
    fn n(&self) -> usize {
        self.basic.n()
    }

    fn reset(&mut self, xi: &[i8]) {
        self.basic.reset(xi);
        self.field.iter_mut().for_each(|g| *g = 0);
        self.sum_sq = 0;
        for p in self.memory.patterns() {
            let c = dot_i8(p, xi);
            self.sum_sq += c * c;
            for (g, &pi) in self.field.iter_mut().zip(p) {
                *g += pi as i32 * c as i32;
            }
        }
    }

    #[inline]
    fn delta(&self, xi: &[i8], i: usize) -> f64 {
        let d = self.basic.delta(xi, i);
        let k = self.stored();
        if k == 0 {
            return d;
        }
        // sum_μ (c_μ - 2 ξ_i ξ_i^μ)^2 - c_μ^2 = 4k - 4 ξ_i g_i
        let d_sq = 4 * k as i64 - 4 * xi[i] as i64 * self.field[i] as i64;
        d + self.lambda * d_sq as f64 / k as f64
    }

    fn commit(&mut self, xi: &[i8], i: usize) {
        let k = self.stored();
        if k > 0 {
            self.sum_sq += 4 * k as i64 - 4 * xi[i] as i64 * self.field[i] as i64;
            let two_x = 2 * xi[i] as i32;
            for (g, &c) in self.field.iter_mut().zip(self.memory.correlation_row(i)) {
                *g -= two_x * c;
            }
        }
        self.basic.commit(xi, i);
    }

    fn energy(&self) -> f64 {
        let k = self.stored();
        if k == 0 {
            self.basic.energy()
        } else {
            self.basic.energy() + self.lambda * self.sum_sq as f64 / k as f64
        }
    }
}

/// Metropolis rule: always accept `ΔE <= 0`, otherwise with probability `exp(-β ΔE)`.
#[inline]
pub fn metropolis_accept<R: Rng + ?Sized>(delta_e: f64, beta: f64, rng: &mut R) -> bool {
    delta_e <= 0.0 || rng.random::<f64>() < (-beta * delta_e).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Annealed {
    pub pattern: SpinVector,
    /// Energy of the returned (final, not best-seen) configuration.
    pub final_energy: f64,
    pub proposals: u64,
    pub accepted: u64,
}

/// Simulated annealing from a uniform random start: `levels` rounds of
/// single-flip Metropolis proposals at randomly chosen entries, multiplying
/// `β` by `r_beta` after each round. Returns the last configuration.
pub fn anneal<E: AnnealEnergy, R: Rng + ?Sized>(
    energy: &mut E,
    sched: &AnnealSchedule,
    rng: &mut R,
) -> Result<Annealed> {
    sched.validate()?;
    let n = energy.n();
    let mut xi = SpinVector::random(n, rng)?.to_i8();
    energy.reset(&xi);
    let flips = sched.flips_per_level.unwrap_or(n);
    let mut beta = sched.beta0;
    let (mut proposals, mut accepted) = (0u64, 0u64);
    for _ in 0..sched.levels {
        for _ in 0..flips {
            let i = rng.random_range(0..n);
            let d = energy.delta(&xi, i);
            if metropolis_accept(d, beta, rng) {
                energy.commit(&xi, i);
                xi[i] = -xi[i];
                accepted += 1;
            }
            proposals += 1;
        }
        beta *= sched.r_beta;
    }
    // recompute from scratch so incremental rounding does not leak out
    energy.reset(&xi);
    Ok(Annealed {
        pattern: SpinVector::from_values(&xi)?,
        final_energy: energy.energy(),
        proposals,
        accepted,
    })
}
