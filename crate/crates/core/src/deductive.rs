//! Exact recovery of the teacher by deductive reasoning.
//!
//! Flipping the first `n` entries of a pattern moves its overlap with the
//! teacher in steps of two, and the full flip negates it, so somewhere along
//! `n = 0..N` the overlap passes through ±1. Bisection finds such an `n*`; at
//! that point flipping any single entry `i` changes the label exactly when
//! `xi_i(n*) T_i` has the same sign as the overlap, which reveals `T_i`.
//!
//! Query budget: `1 + ceil(log2 N)` for the bisection (the sign at `n = N` is
//! implied by the sign at `n = 0`), then `N - 1` single-flip queries. The last
//! weight follows from the known overlap value at `n*`.

use crate::error::{Error, Result};
use crate::spin::{Spin, SpinVector, TeacherOracle};

/// `ceil(log2 n)` for `n >= 1`.
pub fn ceil_log2(n: usize) -> u32 {
    assert!(n >= 1);
    usize::BITS - (n - 1).leading_zeros()
}

/// Largest number of queries [`run_deductive`] may spend on `n` weights.
pub fn query_bound(n: usize) -> u64 {
    n as u64 + ceil_log2(n) as u64
}

/// Result of the bisection phase: `|overlap(prefix_flip(base, n_star), T)| = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancePoint {
    pub n_star: usize,
    /// Sign (and, since its magnitude is one, value) of the overlap at `n_star`.
    pub q_sign: Spin,
    pub base_pattern: SpinVector,
    pub queries_used: u64,
}

impl BalancePoint {
    /// The pattern `xi(n*)` whose overlap with the teacher is `q_sign`.
    pub fn pivot(&self) -> SpinVector {
        self.base_pattern
            .prefix_flip(self.n_star)
            .expect("n_star < N by construction")
    }
}

/// Weight implied by the label of `xi(n*)` with entry `i` flipped.
#[inline]
fn weight_from_label(pivot_i: Spin, q_sign: Spin, label: Spin) -> Spin {
    if label == q_sign {
        -(pivot_i * q_sign)
    } else {
        pivot_i * q_sign
    }
}

#[derive(Debug, Clone)]
enum Phase {
    /// Waiting for the sign at `n = 0`.
    Start,
    Bisect {
        lo: usize,
        hi: usize,
        sign_lo: Spin,
        sign_hi: Spin,
        mid: usize,
    },
    Deduce {
        bp: BalancePoint,
        pivot: SpinVector,
        next: usize,
    },
    Done,
}

/// Step-wise deductive learner.
///
/// Drive it with [`next_query`](Self::next_query) / [`observe`](Self::observe);
/// queries go to the oracle in between, so the caller controls the budget.
#[derive(Debug, Clone)]
pub struct DeductiveLearner {
    base: SpinVector,
    phase: Phase,
    known: Vec<Option<Spin>>,
    queries: u64,
    balance: Option<BalancePoint>,
}

impl DeductiveLearner {
    pub fn new(base: SpinVector) -> Self {
        let n = base.len();
        DeductiveLearner {
            base,
            phase: Phase::Start,
            known: vec![None; n],
            queries: 0,
            balance: None,
        }
    }

    pub fn n(&self) -> usize {
        self.base.len()
    }

    pub fn is_done(&self) -> bool {
        matches!(self.phase, Phase::Done)
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    pub fn balance_point(&self) -> Option<&BalancePoint> {
        self.balance.as_ref()
    }

    /// True once the bisection has located `n*`.
    pub fn bisection_done(&self) -> bool {
        self.balance.is_some()
    }

    /// Pattern to submit next, or `None` once every weight is known.
    pub fn next_query(&self) -> Option<SpinVector> {
        match &self.phase {
            Phase::Start => Some(self.base.clone()),
            Phase::Bisect { mid, .. } => Some(self.base.prefix_flip(*mid).expect("mid < N")),
            Phase::Deduce { pivot, next, .. } => {
                let mut q = pivot.clone();
                q.flip(*next);
                Some(q)
            }
            Phase::Done => None,
        }
    }

    /// Feeds back the teacher's label for the pattern last returned by `next_query`.
    pub fn observe(&mut self, label: Spin) {
        self.queries += 1;
        let n = self.n();
        let phase = std::mem::replace(&mut self.phase, Phase::Done);
        self.phase = match phase {
            Phase::Start => self.bracket(0, n, label, -label),
            Phase::Bisect {
                lo,
                hi,
                sign_lo,
                sign_hi,
                mid,
            } => {
                if label == sign_lo {
                    self.bracket(mid, hi, label, sign_hi)
                } else {
                    self.bracket(lo, mid, sign_lo, label)
                }
            }
            Phase::Deduce { bp, pivot, next } => {
                self.known[next] = Some(weight_from_label(pivot.get(next), bp.q_sign, label));
                self.advance_deduction(bp, pivot, next + 1)
            }
            Phase::Done => panic!("observe called on a finished learner"),
        };
    }

    fn bracket(&mut self, lo: usize, hi: usize, sign_lo: Spin, sign_hi: Spin) -> Phase {
        debug_assert_eq!(sign_lo, -sign_hi, "bisection lost its sign change");
        if hi == lo + 1 {
            let bp = BalancePoint {
                n_star: lo,
                q_sign: sign_lo,
                base_pattern: self.base.clone(),
                queries_used: self.queries,
            };
            let pivot = bp.pivot();
            self.balance = Some(bp.clone());
            self.advance_deduction(bp, pivot, 0)
        } else {
            Phase::Bisect {
                lo,
                hi,
                sign_lo,
                sign_hi,
                mid: (lo + hi).div_ceil(2),
            }
        }
    }

    fn advance_deduction(&mut self, bp: BalancePoint, pivot: SpinVector, next: usize) -> Phase {
        let n = self.n();
        if next + 1 < n {
            return Phase::Deduce { bp, pivot, next };
        }
        // overlap(pivot, T) = q_sign fixes the last weight
        let last = n - 1;
        let partial: i64 = (0..last)
            .map(|i| pivot.get(i).value() * self.known[i].expect("deduced").value())
            .sum();
        let rest = bp.q_sign.value() - partial;
        debug_assert!(rest.abs() == 1, "overlap at n* is not ±1");
        self.known[last] = Some(pivot.get(last) * Spin::sign_of(rest));
        Phase::Done
    }

    /// Current estimate; weights not yet deduced are reported as `+1`.
    pub fn estimate(&self) -> SpinVector {
        let spins: Vec<Spin> = self.known.iter().map(|k| k.unwrap_or(Spin::Plus)).collect();
        SpinVector::from_spins(&spins).expect("length is odd")
    }
}

fn check_len(xi: &SpinVector, oracle: &TeacherOracle) -> Result<()> {
    if xi.len() == oracle.n() {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            expected: oracle.n(),
            found: xi.len(),
        })
    }
}

/// Locates `n*` with `|q(n*)| = 1` using at most `1 + ceil(log2 N)` queries.
pub fn find_balance_index(xi: &SpinVector, oracle: &mut TeacherOracle) -> Result<BalancePoint> {
    check_len(xi, oracle)?;
    let mut learner = DeductiveLearner::new(xi.clone());
    while !learner.bisection_done() {
        let q = learner.next_query().expect("bisection still running");
        let label = oracle.classify(&q)?;
        learner.observe(label);
    }
    Ok(learner.balance.expect("bisection finished"))
}

/// Recovers `T_i` with one query, given a balance point.
pub fn deduce_weight(i: usize, bp: &BalancePoint, oracle: &mut TeacherOracle) -> Result<Spin> {
    check_len(&bp.base_pattern, oracle)?;
    let n = bp.base_pattern.len();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    let mut query = bp.pivot();
    let pivot_i = query.get(i);
    query.flip(i);
    let label = oracle.classify(&query)?;
    Ok(weight_from_label(pivot_i, bp.q_sign, label))
}

/// Runs the full protocol and returns `(estimate, queries)`; the estimate
/// always equals the teacher.
pub fn run_deductive(
    oracle: &mut TeacherOracle,
    xi_init: &SpinVector,
) -> Result<(SpinVector, u64)> {
    check_len(xi_init, oracle)?;
    let start = oracle.query_count();
    let mut learner = DeductiveLearner::new(xi_init.clone());
    while let Some(q) = learner.next_query() {
        let label = oracle.classify(&q)?;
        learner.observe(label);
    }
    Ok((learner.estimate(), oracle.query_count() - start))
}
