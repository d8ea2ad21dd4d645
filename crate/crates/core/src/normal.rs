//! Standard normal distribution helpers.

use libm::erfc;

/// Standard normal CDF, accurate in both tails.
pub fn cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Natural log of the standard normal CDF, finite for all finite `x`.
pub fn ln_cdf(x: f64) -> f64 {
    if x > -30.0 {
        return cdf(x).ln();
    }
    if x == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    // Asymptotic series of the Mills ratio.
    let x2 = x * x;
    let series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
    -0.5 * x2 - (-x).ln() - 0.5 * (std::f64::consts::TAU).ln() + series.ln()
}

/// `exp(a) * Phi(x)` without overflow when `a` is large and `Phi(x)` tiny.
pub(crate) fn scaled_cdf(a: f64, x: f64) -> f64 {
    (a + ln_cdf(x)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        assert!((cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((cdf(-1.0) - 0.158_655_253_931_457_07).abs() < 1e-15, "{}", cdf(-1.0));
        assert!((cdf(1.959_963_984_540_054) - 0.975).abs() < 1e-14);
        assert_eq!(cdf(f64::NEG_INFINITY), 0.0);
        assert_eq!(cdf(f64::INFINITY), 1.0);
    }

    #[test]
    fn lower_tail_keeps_relative_accuracy() {
        // Phi(-10) = 7.619853024160527e-24
        let rel = (cdf(-10.0) / 7.619_853_024_160_47e-24 - 1.0).abs();
        assert!(rel < 1e-12);
        assert!(ln_cdf(-40.0).is_finite());
        // The series and the direct evaluation agree where both are valid.
        for x in [-30.0, -31.5, -35.0] {
            let direct = cdf(x).ln();
            let x2: f64 = x * x;
            let series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
            let asym = -0.5 * x2 - (-x).ln() - 0.5 * std::f64::consts::TAU.ln() + series.ln();
            assert!((direct - asym).abs() < 1e-12 * direct.abs());
        }
    }

    #[test]
    fn scaled_cdf_handles_extremes() {
        assert_eq!(scaled_cdf(800.0, -60.0), 0.0);
        let v = scaled_cdf(700.0, -30.0);
        assert!(v.is_finite());
        assert!((scaled_cdf(1.0, 0.0) - 0.5 * std::f64::consts::E).abs() < 1e-14);
    }
}
