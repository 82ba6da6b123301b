//! Online mean-field estimate of the version-space marginals.
//!
//! The student keeps only the means `m_i ≈ <J_i>_P`. Each labelled pattern
//! moves every mean by `σ ξ_i W(m_i) R_P`, where `R_P` measures how
//! surprising the label was under a Gaussian model of the overlap and `W`
//! is `1 - m_i^2` with a floor `W0` that lets a saturated wrong sign recover.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special::{f_of_x, normal_cdf};
use crate::spin::{Spin, SpinVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateParams {
    /// Escape weight for means saturated against the incoming evidence.
    pub w0: f64,
    /// Lower bound on the overlap variance.
    pub delta_floor: f64,
}

impl Default for UpdateParams {
    fn default() -> Self {
        UpdateParams {
            w0: 8e-3,
            delta_floor: 1e-12,
        }
    }
}

impl UpdateParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.w0 > 0.0 && self.w0.is_finite()) {
            return Err(Error::Config(format!(
                "w0 must be positive, got {}",
                self.w0
            )));
        }
        if !(self.delta_floor > 0.0 && self.delta_floor.is_finite()) {
            return Err(Error::Config(format!(
                "delta_floor must be positive, got {}",
                self.delta_floor
            )));
        }
        Ok(())
    }
}

/// The student's running posterior summary.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefState {
    mean: Vec<f64>,
    samples_seen: usize,
}

/// Gaussian estimates of the conditional probabilities `A_i^±`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianConditionals {
    /// Tail integral with the mean shifted by `+σ ξ_i`.
    pub plus: f64,
    /// Tail integral with the mean shifted by `-σ ξ_i`.
    pub minus: f64,
    /// `A`: tail mass at the unshifted mean overlap.
    pub a: f64,
    /// `δA`: Gaussian density at zero for the unshifted overlap.
    pub delta_a: f64,
    /// First-order `A + σ ξ_i (1 - m_i) δA`, clamped to `[0, 1]`.
    pub linear_plus: f64,
    /// First-order `A - σ ξ_i (1 + m_i) δA`, clamped to `[0, 1]`.
    pub linear_minus: f64,
}

impl BeliefState {
    /// Uninformed state: every mean is zero.
    pub fn new(n: usize) -> Self {
        BeliefState {
            mean: vec![0.0; n],
            samples_seen: 0,
        }
    }

    /// State with the given means, which must lie in `[-1, 1]`.
    pub fn from_means(mean: Vec<f64>) -> Result<Self> {
        if let Some(bad) = mean.iter().find(|m| !(-1.0..=1.0).contains(*m)) {
            return Err(Error::Config(format!("mean weight {bad} outside [-1, 1]")));
        }
        Ok(BeliefState {
            mean,
            samples_seen: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.mean.len()
    }

    pub fn means(&self) -> &[f64] {
        &self.mean
    }

    pub fn samples_seen(&self) -> usize {
        self.samples_seen
    }

    fn check_len(&self, xi: &SpinVector) -> Result<()> {
        if xi.len() == self.mean.len() {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.mean.len(),
                found: xi.len(),
            })
        }
    }

    /// `sum_i (1 - m_i^2)`, ignoring pair correlations, floored at `delta_floor`.
    pub fn variance_approx(&self, delta_floor: f64) -> f64 {
        let raw: f64 = self.mean.iter().map(|m| 1.0 - m * m).sum();
        raw.max(delta_floor)
    }

    /// Mean overlap `sum_i ξ_i m_i`.
    pub fn mean_overlap(&self, xi: &SpinVector) -> Result<f64> {
        self.check_len(xi)?;
        Ok(xi.iter().zip(&self.mean).map(|(s, m)| s.as_f64() * m).sum())
    }

    /// `R_P = 2/sqrt(2πΔ) · f(σ h / sqrt(2Δ))` with `h` the mean overlap.
    pub fn magnitude_factor(
        &self,
        xi: &SpinVector,
        sigma: Spin,
        params: &UpdateParams,
    ) -> Result<f64> {
        let h = self.mean_overlap(xi)?;
        let delta = self.variance_approx(params.delta_floor);
        Ok(magnitude(h, sigma, delta))
    }

    /// Absorbs one labelled pattern.
    pub fn update(&mut self, xi: &SpinVector, sigma: Spin, params: &UpdateParams) -> Result<()> {
        let r = self.magnitude_factor(xi, sigma, params)?;
        for (m, s) in self.mean.iter_mut().zip(xi.iter()) {
            let drive = (sigma * s).as_f64();
            *m = (*m + drive * weighting(*m, drive, params.w0) * r).clamp(-1.0, 1.0);
        }
        self.samples_seen += 1;
        Ok(())
    }

    /// Sign vector of the means, with `sign(0) = +1`.
    pub fn infer(&self) -> SpinVector {
        let spins: Vec<Spin> = self.mean.iter().map(|&m| Spin::sign_of_f64(m)).collect();
        SpinVector::from_spins(&spins).expect("belief length is odd")
    }

    pub fn gaussian_conditionals(
        &self,
        xi: &SpinVector,
        sigma: Spin,
        i: usize,
        params: &UpdateParams,
    ) -> Result<GaussianConditionals> {
        self.check_len(xi)?;
        if i >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.n(),
            });
        }
        let h = self.mean_overlap(xi)?;
        let delta = self.variance_approx(params.delta_floor);
        let sd = delta.sqrt();
        let s = sigma.as_f64();
        let x_i = xi.get(i).as_f64();
        let m_i = self.mean[i];
        let h_rest = h - x_i * m_i;

        let plus = normal_cdf(s * (x_i + h_rest) / sd);
        let minus = normal_cdf(s * (-x_i + h_rest) / sd);
        let a = normal_cdf(s * h / sd);
        let delta_a = (-h * h / (2.0 * delta)).exp() / (2.0 * PI * delta).sqrt();
        Ok(GaussianConditionals {
            plus,
            minus,
            a,
            delta_a,
            linear_plus: (a + s * x_i * (1.0 - m_i) * delta_a).clamp(0.0, 1.0),
            linear_minus: (a - s * x_i * (1.0 + m_i) * delta_a).clamp(0.0, 1.0),
        })
    }
}

#[inline]
fn magnitude(h: f64, sigma: Spin, delta: f64) -> f64 {
    2.0 / (2.0 * PI * delta).sqrt() * f_of_x(sigma.as_f64() * h / (2.0 * delta).sqrt())
}

/// `W(m)`: `1 - m^2`, raised to `w0` when the drive opposes a nearly saturated mean.
#[inline]
fn weighting(m: f64, drive: f64, w0: f64) -> f64 {
    let w = 1.0 - m * m;
    if w < w0 && m * drive < 0.0 {
        w0
    } else {
        w
    }
}

/// Posterior mean of `J_i` after one sample, given its prior mean and the
/// conditional probabilities of a correct label with `J_i = ±1`.
pub fn bayes_mean_update(m: f64, a_plus: f64, a_minus: f64) -> f64 {
    let p_plus = (1.0 + m) / 2.0;
    let p_minus = 1.0 - p_plus;
    (p_plus * a_plus - p_minus * a_minus) / (p_plus * a_plus + p_minus * a_minus)
}
