//! Special functions for the mean-field update.

use std::f64::consts::PI;

/// Below this, `erfc(-x)` and `exp(-x^2)` both underflow and the ratio is
/// taken from the asymptotic series of the scaled complementary error function.
const ASYMPTOTIC_BELOW: f64 = -26.0;

/// `f(x) = exp(-x^2) / (1 + erf(x))`.
///
/// Equal to one at the origin, decays like a Gaussian for `x > 0` and grows
/// like `sqrt(pi) * |x|` for `x -> -inf`.
pub fn f_of_x(x: f64) -> f64 {
    if x >= 0.0 {
        (-x * x).exp() / (1.0 + libm::erf(x))
    } else if x > ASYMPTOTIC_BELOW {
        // 1 + erf(x) = erfc(-x), no cancellation
        (-x * x).exp() / libm::erfc(-x)
    } else {
        1.0 / erfcx_asymptotic(-x)
    }
}

/// `exp(a^2) erfc(a)` for large positive `a`.
fn erfcx_asymptotic(a: f64) -> f64 {
    // exp(a^2) erfc(a) ~ 1/(a sqrt(pi)) * sum_k (-1)^k (2k-1)!! / (2a^2)^k
    let inv = 1.0 / (2.0 * a * a);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..12 {
        term *= -((2 * k - 1) as f64) * inv;
        sum += term;
        if term.abs() < 1e-17 {
            break;
        }
    }
    sum / (a * PI.sqrt())
}

/// Standard normal upper-tail mass `P(Z > -z) = Phi(z)`, stable for both signs.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert_eq!(f_of_x(0.0), 1.0);
        // high-precision quadrature values
        let cases = [
            (1.0, 0.199_641_440_747_717_37),
            (-1.0, 2.338_724_066_510_006_5),
            (-8.0, 14.288_742_233_312_695),
            (8.0, 8.019_054_452_743_189e-29),
            (-3.0, 5.586_556_250_616_818),
            (2.5, 9.654_235_086_361_187e-4),
        ];
        for (x, want) in cases {
            let got = f_of_x(x);
            assert!(
                ((got - want) / want).abs() < 1e-12,
                "f({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn asymptotic_branch_is_continuous() {
        let a = 26.0f64;
        let direct = (-a * a).exp() / libm::erfc(a);
        let series = 1.0 / erfcx_asymptotic(a);
        assert!(((direct - series) / direct).abs() < 1e-12);
        // approaches sqrt(pi) |x|
        let x = -1e6;
        assert!((f_of_x(x) / (PI.sqrt() * 1e6) - 1.0).abs() < 1e-9);
        assert!(f_of_x(-1e200).is_finite());
        assert_eq!(f_of_x(40.0), 0.0);
    }

    #[test]
    fn positive_and_decreasing() {
        let mut prev = f64::INFINITY;
        for k in 0..=1600 {
            let x = -8.0 + k as f64 * 0.01;
            let v = f_of_x(x);
            assert!(v > 0.0 && v < prev, "x = {x}");
            prev = v;
        }
    }

    #[test]
    fn normal_cdf_tails() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-15);
        assert!((normal_cdf(-10.0) - 7.619_853_024_160_527e-24).abs() < 1e-36);
    }
}
