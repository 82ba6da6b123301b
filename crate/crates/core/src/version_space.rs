//! Explicit version spaces for small perceptrons.
//!
//! Every weight vector is a packed `u32` (bit `i` set means `J_i = +1`), so
//! `N <= 25` fits comfortably in memory and overlaps are popcounts. Members
//! are kept sorted ascending, which gives a canonical iteration order.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::spin::{Spin, SpinVector};

/// Largest `N` accepted by [`VersionSpace::enumerate_initial`].
pub const DEFAULT_ENUMERATION_LIMIT: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VersionSpace {
    members: Vec<u32>,
    n: usize,
    samples_seen: usize,
}

#[inline]
fn mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Sign of `J · xi` for packed vectors of odd length `n`.
#[inline]
fn packed_sign(j: u32, xi: u32, n: usize) -> Spin {
    // overlap = n - 2 * disagreements > 0  <=>  disagreements <= (n - 1) / 2
    if ((j ^ xi) & mask(n)).count_ones() as usize <= n / 2 {
        Spin::Plus
    } else {
        Spin::Minus
    }
}

fn pack(xi: &SpinVector, n: usize) -> Result<u32> {
    if xi.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: xi.len(),
        });
    }
    Ok(xi.as_word().expect("n <= 25") as u32)
}

fn unpack(word: u32, n: usize) -> SpinVector {
    SpinVector::from_word(word as u64, n).expect("odd n <= 25")
}

/// How [`VersionSpace::stats`] obtains the generalization error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenErrorMethod {
    /// Exact, grouping members by their Hamming distance to the teacher.
    DistanceClasses,
    /// Exact, enumerating all `2^N` test patterns against every member.
    Enumerate,
    /// Monte Carlo over this many random (pattern, member) pairs.
    Sampled(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StatsOptions {
    pub gen_error: GenErrorMethod,
    pub pair_correlations: bool,
}

impl Default for StatsOptions {
    fn default() -> Self {
        StatsOptions {
            gen_error: GenErrorMethod::DistanceClasses,
            pair_correlations: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VsStats {
    /// `log2 |members| / N`, in bits per weight.
    pub entropy_density: f64,
    pub mean_weights: Vec<f64>,
    /// Row-major `N x N` matrix of `<J_i J_j>`.
    pub pair_correlations: Option<Vec<f64>>,
    pub generalization_error: f64,
}

/// Outcome of [`VersionSpace::bisect_design`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisectDesign {
    pub pattern: SpinVector,
    /// `|sum_J sign(pattern · J)|` over the current members.
    pub imbalance: u64,
    /// Number of candidate patterns scored.
    pub evaluated: u64,
}

/// Search budget for [`VersionSpace::bisect_design`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BisectParams {
    /// Up to this `N` every pattern is tried.
    pub exhaustive_max_n: usize,
    /// Random candidates scored before local descent.
    pub pool: usize,
    /// Single-flip descents, the first from the best pool candidate and the
    /// rest from fresh random patterns.
    pub restarts: usize,
}

impl Default for BisectParams {
    fn default() -> Self {
        BisectParams {
            exhaustive_max_n: 13,
            pool: 2000,
            restarts: 8,
        }
    }
}

impl VersionSpace {
    /// The full configuration space `{-1, +1}^N`.
    pub fn enumerate_initial(n: usize) -> Result<Self> {
        Self::enumerate_with_limit(n, DEFAULT_ENUMERATION_LIMIT)
    }

    pub fn enumerate_with_limit(n: usize, limit: usize) -> Result<Self> {
        if n.is_multiple_of(2) {
            return Err(Error::InvalidLength(n));
        }
        let limit = limit.min(31);
        if n > limit {
            return Err(Error::Capacity { n, limit });
        }
        Ok(VersionSpace {
            members: (0..=mask(n)).collect(),
            n,
            samples_seen: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn samples_seen(&self) -> usize {
        self.samples_seen
    }

    pub fn members(&self) -> impl ExactSizeIterator<Item = SpinVector> + '_ {
        self.members.iter().map(|&w| unpack(w, self.n))
    }

    pub fn contains(&self, j: &SpinVector) -> bool {
        pack(j, self.n)
            .map(|w| self.members.binary_search(&w).is_ok())
            .unwrap_or(false)
    }

    pub fn entropy_density(&self) -> f64 {
        (self.members.len() as f64).log2() / self.n as f64
    }

    /// Keeps exactly the members that label `xi` as `sigma`.
    pub fn filter(&mut self, xi: &SpinVector, sigma: Spin) -> Result<()> {
        let x = pack(xi, self.n)?;
        let n = self.n;
        let before = std::mem::take(&mut self.members);
        let kept: Vec<u32> = before
            .iter()
            .copied()
            .filter(|&j| packed_sign(j, x, n) == sigma)
            .collect();
        if kept.is_empty() {
            self.members = before;
            return Err(Error::EmptyVersionSpace);
        }
        self.members = kept;
        self.samples_seen += 1;
        Ok(())
    }

    /// `(count of J_i = +1, total)` for every coordinate.
    fn plus_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.n];
        for &j in &self.members {
            let mut bits = j;
            while bits != 0 {
                counts[bits.trailing_zeros() as usize] += 1;
                bits &= bits - 1;
            }
        }
        counts
    }

    /// Exact marginal means `<J_i>`.
    pub fn mean_weights(&self) -> Vec<f64> {
        let total = self.members.len() as f64;
        self.plus_counts()
            .into_iter()
            .map(|c| (2.0 * c as f64 - total) / total)
            .collect()
    }

    /// Exact `<J_i J_j>` matrix, row-major.
    pub fn pair_correlations(&self) -> Vec<f64> {
        let n = self.n;
        // count of agreeing pairs
        let mut agree = vec![0u64; n * n];
        for &j in &self.members {
            for a in 0..n {
                let ja = (j >> a) & 1;
                let row = &mut agree[a * n..(a + 1) * n];
                for (b, slot) in row.iter_mut().enumerate() {
                    *slot += (ja == (j >> b) & 1) as u64;
                }
            }
        }
        let total = self.members.len() as f64;
        agree
            .into_iter()
            .map(|c| (2.0 * c as f64 - total) / total)
            .collect()
    }

    pub fn stats<R: Rng + ?Sized>(
        &self,
        truth: &SpinVector,
        opts: StatsOptions,
        rng: &mut R,
    ) -> Result<VsStats> {
        let t = pack(truth, self.n)?;
        let generalization_error = match opts.gen_error {
            GenErrorMethod::DistanceClasses => self.gen_error_by_distance(t),
            GenErrorMethod::Enumerate => self.gen_error_enumerated(t),
            GenErrorMethod::Sampled(k) => self.gen_error_sampled(t, k, rng),
        };
        Ok(VsStats {
            entropy_density: self.entropy_density(),
            mean_weights: self.mean_weights(),
            pair_correlations: opts.pair_correlations.then(|| self.pair_correlations()),
            generalization_error,
        })
    }

    fn gen_error_by_distance(&self, t: u32) -> f64 {
        let table = disagreement_by_distance(self.n);
        let sum: f64 = self
            .members
            .iter()
            .map(|&j| table[(j ^ t).count_ones() as usize])
            .sum();
        sum / self.members.len() as f64
    }

    fn gen_error_enumerated(&self, t: u32) -> f64 {
        let n = self.n;
        let mut wrong = 0u64;
        for x in 0..=mask(n) {
            let label = packed_sign(t, x, n);
            wrong += self
                .members
                .iter()
                .filter(|&&j| packed_sign(j, x, n) != label)
                .count() as u64;
        }
        wrong as f64 / ((1u64 << n) as f64 * self.members.len() as f64)
    }

    fn gen_error_sampled<R: Rng + ?Sized>(&self, t: u32, samples: usize, rng: &mut R) -> f64 {
        let n = self.n;
        let samples = samples.max(1);
        let mut wrong = 0usize;
        for _ in 0..samples {
            let x = rng.random::<u32>() & mask(n);
            let j = self.members[rng.random_range(0..self.members.len())];
            wrong += (packed_sign(j, x, n) != packed_sign(t, x, n)) as usize;
        }
        wrong as f64 / samples as f64
    }

    /// Signed label sum `sum_J sign(xi · J)` over the members.
    pub fn label_sum(&self, xi: &SpinVector) -> Result<i64> {
        let x = pack(xi, self.n)?;
        Ok(self.label_sum_packed(x))
    }

    #[inline]
    fn label_sum_packed(&self, x: u32) -> i64 {
        let half = (self.n / 2) as u32;
        let negative = self
            .members
            .iter()
            .filter(|&&j| (j ^ x).count_ones() > half)
            .count() as i64;
        self.members.len() as i64 - 2 * negative
    }

    /// Searches for a pattern that splits the members as evenly as possible.
    ///
    /// The sum of `|members|` signs has the parity of `|members|`, so the
    /// search stops as soon as it reaches `|members| mod 2`.
    pub fn bisect_design<R: Rng + ?Sized>(
        &self,
        params: &BisectParams,
        rng: &mut R,
    ) -> BisectDesign {
        let n = self.n;
        let target = (self.members.len() % 2) as u64;
        let score = |x: u32| self.label_sum_packed(x).unsigned_abs();
        let mut evaluated = 0u64;

        let (best, imbalance) = if n <= params.exhaustive_max_n {
            // xi and -xi give opposite sums, so half the patterns suffice
            let half = 1u32 << (n - 1);
            let start = rng.random_range(0..half);
            let flip = if rng.random::<bool>() { mask(n) } else { 0 };
            let mut best = (start ^ flip, u64::MAX);
            for k in 0..half {
                let x = ((start + k) & (half - 1)) ^ flip;
                let s = score(x);
                evaluated += 1;
                if s < best.1 {
                    best = (x, s);
                    if s == target {
                        break;
                    }
                }
            }
            best
        } else {
            self.stochastic_bisect(target, params, rng, &mut evaluated)
        };

        BisectDesign {
            pattern: unpack(best, n),
            imbalance,
            evaluated,
        }
    }

    fn stochastic_bisect<R: Rng + ?Sized>(
        &self,
        target: u64,
        params: &BisectParams,
        rng: &mut R,
        evaluated: &mut u64,
    ) -> (u32, u64) {
        let n = self.n;
        let m = mask(n);
        let mut score = |x: u32| {
            *evaluated += 1;
            self.label_sum_packed(x).unsigned_abs()
        };

        let mut best = (0u32, u64::MAX);
        for _ in 0..params.pool.max(1) {
            let x = rng.random::<u32>() & m;
            let s = score(x);
            if s < best.1 {
                best = (x, s);
                if s == target {
                    return best;
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        for restart in 0..params.restarts {
            let mut cur = if restart == 0 {
                best
            } else {
                let x = rng.random::<u32>() & m;
                (x, score(x))
            };
            // first-improvement single-flip descent
            loop {
                order.shuffle(rng);
                let mut improved = false;
                for &i in &order {
                    let x = cur.0 ^ (1 << i);
                    let s = score(x);
                    if s < cur.1 {
                        cur = (x, s);
                        improved = true;
                        break;
                    }
                }
                if !improved || cur.1 == target {
                    break;
                }
            }
            if cur.1 < best.1 {
                best = cur;
            }
            if best.1 == target {
                break;
            }
        }
        best
    }

    /// Exact `A_i^+` and `A_i^-`: among members with `J_i = +1` (resp. `-1`),
    /// the fraction that label `xi` as `sigma`. `None` when that sub-space is empty.
    pub fn exact_conditionals(
        &self,
        xi: &SpinVector,
        sigma: Spin,
        i: usize,
    ) -> Result<(Option<f64>, Option<f64>)> {
        let x = pack(xi, self.n)?;
        if i >= self.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.n,
            });
        }
        let (mut plus, mut plus_ok, mut minus, mut minus_ok) = (0u64, 0u64, 0u64, 0u64);
        for &j in &self.members {
            let ok = (packed_sign(j, x, self.n) == sigma) as u64;
            if (j >> i) & 1 == 1 {
                plus += 1;
                plus_ok += ok;
            } else {
                minus += 1;
                minus_ok += ok;
            }
        }
        let frac = |ok: u64, tot: u64| (tot > 0).then(|| ok as f64 / tot as f64);
        Ok((frac(plus_ok, plus), frac(minus_ok, minus)))
    }

    /// Distribution of `xi · J` over the members.
    pub fn overlap_histogram(&self, xi: &SpinVector) -> Result<BTreeMap<i64, f64>> {
        let x = pack(xi, self.n)?;
        let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
        for &j in &self.members {
            let q = self.n as i64 - 2 * ((j ^ x) & mask(self.n)).count_ones() as i64;
            *counts.entry(q).or_default() += 1;
        }
        let total = self.members.len() as f64;
        Ok(counts
            .into_iter()
            .map(|(q, c)| (q, c as f64 / total))
            .collect())
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k)
        .fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
        .round()
}

/// `table[d]`: probability that a uniform random pattern gets opposite labels
/// from two weight vectors at Hamming distance `d`.
///
/// Splitting the pattern into the `N - d` agreeing and `d` disagreeing
/// coordinates with partial sums `a` and `b`, the labels are `sign(a + b)` and
/// `sign(a - b)`, which differ exactly when `|b| > |a|`.
pub fn disagreement_by_distance(n: usize) -> Vec<f64> {
    let total = 2f64.powi(n as i32);
    (0..=n)
        .map(|d| {
            let same = n - d;
            let mut count = 0.0;
            for k in 0..=same {
                let a = (2 * k as i64 - same as i64).abs();
                for l in 0..=d {
                    let b = (2 * l as i64 - d as i64).abs();
                    if b > a {
                        count += binomial(same, k) * binomial(d, l);
                    }
                }
            }
            count / total
        })
        .collect()
}
