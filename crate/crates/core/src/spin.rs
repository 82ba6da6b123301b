//! Ising vectors, the teacher's sign classifier and the elementary pattern
//! transforms shared by every learner.
//!
//! A [`SpinVector`] is stored packed, one bit per spin with `+1 <-> 1`, so
//! overlaps reduce to `N - 2 * popcount(a ^ b)`. Lengths are always odd, which
//! makes every overlap odd and the sign classifier total.

use std::fmt;
use std::ops::Neg;

use rand::Rng;

use crate::error::{Error, Result};

/// A single Ising value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Minus,
    Plus,
}

impl Spin {
    pub fn from_i64(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Spin::Plus),
            -1 => Ok(Spin::Minus),
            other => Err(Error::InvalidSpin(other)),
        }
    }

    /// Sign of a nonzero integer. Zero maps to `Plus`.
    #[inline]
    pub fn sign_of(v: i64) -> Self {
        if v >= 0 {
            Spin::Plus
        } else {
            Spin::Minus
        }
    }

    /// Sign of a real number with the `sign(0) = +1` convention.
    #[inline]
    pub fn sign_of_f64(v: f64) -> Self {
        if v >= 0.0 {
            Spin::Plus
        } else {
            Spin::Minus
        }
    }

    #[inline]
    pub fn value(self) -> i64 {
        match self {
            Spin::Plus => 1,
            Spin::Minus => -1,
        }
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.value() as f64
    }

    #[inline]
    pub fn as_i8(self) -> i8 {
        self.value() as i8
    }

    #[inline]
    fn bit(self) -> u64 {
        (self == Spin::Plus) as u64
    }
}

impl Neg for Spin {
    type Output = Spin;

    #[inline]
    fn neg(self) -> Spin {
        match self {
            Spin::Plus => Spin::Minus,
            Spin::Minus => Spin::Plus,
        }
    }
}

impl std::ops::Mul for Spin {
    type Output = Spin;

    #[inline]
    fn mul(self, rhs: Spin) -> Spin {
        if self == rhs {
            Spin::Plus
        } else {
            Spin::Minus
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::Plus => "+1",
            Spin::Minus => "-1",
        })
    }
}

/// Fixed-length sequence of ±1 entries, used for weight vectors and patterns.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SpinVector {
    words: Vec<u64>,
    len: usize,
}

fn check_len(n: usize) -> Result<()> {
    if n % 2 == 1 {
        Ok(())
    } else {
        Err(Error::InvalidLength(n))
    }
}

#[inline]
fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
fn tail_mask(n: usize) -> u64 {
    match n % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl SpinVector {
    /// All-`+1` vector of length `n`.
    pub fn ones(n: usize) -> Result<Self> {
        check_len(n)?;
        let mut words = vec![u64::MAX; word_count(n)];
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(n);
        }
        Ok(SpinVector { words, len: n })
    }

    pub fn from_spins(spins: &[Spin]) -> Result<Self> {
        check_len(spins.len())?;
        let mut words = vec![0u64; word_count(spins.len())];
        for (i, s) in spins.iter().enumerate() {
            words[i / 64] |= s.bit() << (i % 64);
        }
        Ok(SpinVector {
            words,
            len: spins.len(),
        })
    }

    /// Builds a vector from integer entries, each of which must be ±1.
    pub fn from_values<T: Copy + Into<i64>>(values: &[T]) -> Result<Self> {
        let spins = values
            .iter()
            .map(|&v| Spin::from_i64(v.into()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_spins(&spins)
    }

    /// Builds a vector of length `n <= 64` from its packed bit word.
    pub fn from_word(word: u64, n: usize) -> Result<Self> {
        check_len(n)?;
        if n > 64 {
            return Err(Error::IndexOutOfRange { index: n, len: 64 });
        }
        Ok(SpinVector {
            words: vec![word & tail_mask(n)],
            len: n,
        })
    }

    /// Uniform random Ising vector: each entry independently ±1 with probability 1/2.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_len(n)?;
        let mut words: Vec<u64> = (0..word_count(n)).map(|_| rng.random()).collect();
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(n);
        }
        Ok(SpinVector { words, len: n })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false: zero-length vectors cannot be constructed.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Packed word of a vector with `N <= 64`.
    pub fn as_word(&self) -> Option<u64> {
        (self.len <= 64).then(|| self.words[0])
    }

    #[inline]
    pub fn get(&self, i: usize) -> Spin {
        assert!(i < self.len, "spin index {i} out of range for {}", self.len);
        if (self.words[i / 64] >> (i % 64)) & 1 == 1 {
            Spin::Plus
        } else {
            Spin::Minus
        }
    }

    pub fn set(&mut self, i: usize, s: Spin) {
        assert!(i < self.len, "spin index {i} out of range for {}", self.len);
        let w = &mut self.words[i / 64];
        *w = (*w & !(1u64 << (i % 64))) | (s.bit() << (i % 64));
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "spin index {i} out of range for {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = Spin> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_i8(&self) -> Vec<i8> {
        self.iter().map(Spin::as_i8).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.iter().map(Spin::as_f64).collect()
    }

    fn check_same_len(&self, other: &SpinVector) -> Result<()> {
        if self.len == other.len {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.len,
                found: other.len,
            })
        }
    }

    /// Number of entries where the two vectors disagree.
    pub fn hamming_distance(&self, other: &SpinVector) -> Result<usize> {
        self.check_same_len(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Scalar product `sum_i a_i b_i`. Odd for odd lengths.
    pub fn overlap(&self, other: &SpinVector) -> Result<i64> {
        let d = self.hamming_distance(other)?;
        Ok(self.len as i64 - 2 * d as i64)
    }

    /// Copy with entries `0..n` negated.
    pub fn prefix_flip(&self, n: usize) -> Result<SpinVector> {
        if n > self.len {
            return Err(Error::IndexOutOfRange {
                index: n,
                len: self.len,
            });
        }
        let mut out = self.clone();
        let full = n / 64;
        for w in &mut out.words[..full] {
            *w = !*w;
        }
        if !n.is_multiple_of(64) {
            out.words[full] ^= (1u64 << (n % 64)) - 1;
        }
        if let Some(last) = out.words.last_mut() {
            *last &= tail_mask(self.len);
        }
        Ok(out)
    }

    /// Relative Hamming distance between an estimate and the truth, in `[0, 1]`.
    pub fn hamming_error(&self, truth: &SpinVector) -> Result<f64> {
        Ok(self.hamming_distance(truth)? as f64 / self.len as f64)
    }
}

impl Neg for &SpinVector {
    type Output = SpinVector;

    fn neg(self) -> SpinVector {
        self.prefix_flip(self.len).expect("full flip is in range")
    }
}

impl fmt::Debug for SpinVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpinVector(")?;
        for s in self.iter() {
            f.write_str(if s == Spin::Plus { "+" } else { "-" })?;
        }
        write!(f, ")")
    }
}

pub fn overlap(a: &SpinVector, b: &SpinVector) -> Result<i64> {
    a.overlap(b)
}

/// The perceptron output `sign(pattern · weights)`.
pub fn classify(pattern: &SpinVector, weights: &SpinVector) -> Result<Spin> {
    Ok(Spin::sign_of(pattern.overlap(weights)?))
}

pub fn prefix_flip(pattern: &SpinVector, n: usize) -> Result<SpinVector> {
    pattern.prefix_flip(n)
}

pub fn hamming_error(estimate: &SpinVector, truth: &SpinVector) -> Result<f64> {
    estimate.hamming_error(truth)
}

/// Holds the hidden weight vector and answers one-bit label queries.
///
/// Every query is counted, so learners cannot under-report their budget.
#[derive(Debug, Clone)]
pub struct TeacherOracle {
    truth: SpinVector,
    query_count: u64,
}

impl TeacherOracle {
    pub fn new(truth: SpinVector) -> Self {
        TeacherOracle {
            truth,
            query_count: 0,
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        Ok(Self::new(SpinVector::random(n, rng)?))
    }

    pub fn n(&self) -> usize {
        self.truth.len()
    }

    pub fn classify(&mut self, pattern: &SpinVector) -> Result<Spin> {
        let label = classify(pattern, &self.truth)?;
        self.query_count += 1;
        Ok(label)
    }

    pub fn query_count(&self) -> u64 {
        self.query_count
    }

    /// The hidden vector, for scoring only. Learners must not call this.
    pub fn reveal(&self) -> &SpinVector {
        &self.truth
    }
}
