//! Normal-CDF helpers for the inter-class overlap bound.

use core::f64::consts::SQRT_2;

/// Standard normal CDF via the complementary error function,
/// Phi(x) = erfc(-x / sqrt(2)) / 2. Absolute error well below 1e-10
/// (libm's erfc is the SunPro implementation, < 1 ulp of erfc).
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Lower bound on the inter-class overlap probability:
/// 1 - Phi((delta - 2*epsilon) / (2*sigma)).
///
/// Computed as the upper tail directly so extreme arguments keep full
/// relative precision instead of cancelling against 1.
pub fn overlap_bound(delta: f64, sigma: f64, epsilon: f64) -> f64 {
    let z = (delta - 2.0 * epsilon) / (2.0 * sigma);
    0.5 * libm::erfc(z / SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_at_zero_is_half() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
    }

    #[test]
    fn cdf_symmetry_identity() {
        for i in 0..100 {
            let x = (i as f64) * 0.1 - 5.0;
            assert!((std_normal_cdf(x) + std_normal_cdf(-x) - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn cdf_reference_values() {
        // published high-precision values of Phi
        assert!((std_normal_cdf(1.0) - 0.8413447460685429).abs() <= 1e-10);
        assert!((std_normal_cdf(-1.0) - 0.15865525393145707).abs() <= 1e-10);
        assert!((std_normal_cdf(2.0) - 0.9772498680518208).abs() <= 1e-10);
    }

    #[test]
    fn bound_degenerate_epsilon_is_half() {
        assert_eq!(overlap_bound(1.0, 0.5, 0.5), 0.5);
    }

    #[test]
    fn bound_reference_value() {
        assert!((overlap_bound(1.0, 0.5, 0.0) - 0.15865525393145707).abs() <= 1e-9);
    }

    #[test]
    fn bound_extreme_tail_is_tiny() {
        let b = overlap_bound(5.0, 0.1, 0.0); // z = 25
        assert!(b > 0.0 && b < 1e-100);
    }

    #[test]
    fn bound_monotonicity_grid() {
        let deltas = [0.5, 1.0, 2.0, 5.0];
        let sigmas = [0.1, 0.3, 0.5, 1.0];
        let epsilons = [0.0, 0.05, 0.1, 0.2];
        for &s in &sigmas {
            for &e in &epsilons {
                let mut prev = f64::INFINITY;
                for &d in &deltas {
                    let b = overlap_bound(d, s, e);
                    assert!(b < prev, "bound must decrease in delta");
                    prev = b;
                }
            }
        }
        for &d in &deltas {
            for &e in &epsilons {
                let mut prev = f64::NEG_INFINITY;
                for &s in &sigmas {
                    let b = overlap_bound(d, s, e);
                    assert!(b > prev, "bound must increase in sigma");
                    prev = b;
                }
            }
            for &s in &sigmas {
                let mut prev = f64::NEG_INFINITY;
                for &e in &epsilons {
                    let b = overlap_bound(d, s, e);
                    assert!(b > prev, "bound must increase in epsilon");
                    prev = b;
                }
            }
        }
    }
}
