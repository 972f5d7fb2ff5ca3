//! Exponentially rescaled hyperbolic functions.
//!
//! `sinh_scaled(x) = sinh(x)·e^{-x}` and `cosh_scaled(x) = cosh(x)·e^{-x}` stay
//! in `[0, 1]` for real `x ≥ 0` (and are bounded for complex arguments with a
//! non-negative real part), so ratios of hyperbolic polynomials can be formed
//! after pulling the common exponential out of numerator and denominator.

use num_complex::Complex64;

/// `sinh(x)·e^{-x}` for real `x ≥ 0`.
pub fn sinh_scaled(x: f64) -> f64 {
    -0.5 * (-2.0 * x).exp_m1()
}

/// `cosh(x)·e^{-x}` for real `x ≥ 0`.
pub fn cosh_scaled(x: f64) -> f64 {
    0.5 * (1.0 + (-2.0 * x).exp())
}

/// `e^w − 1` without cancellation for small `|w|`.
pub fn expm1_complex(w: Complex64) -> Complex64 {
    let half = 0.5 * w.im;
    let s = half.sin();
    let re = w.re.exp_m1() * w.im.cos() - 2.0 * s * s;
    let im = w.re.exp() * w.im.sin();
    Complex64::new(re, im)
}

/// `sinh(z)·e^{-z}`, bounded whenever `Re z ≥ 0`.
pub fn sinh_scaled_complex(z: Complex64) -> Complex64 {
    -0.5 * expm1_complex(-2.0 * z)
}

/// `cosh(z)·e^{-z}`, bounded whenever `Re z ≥ 0`.
pub fn cosh_scaled_complex(z: Complex64) -> Complex64 {
    0.5 * (Complex64::new(1.0, 0.0) + (-2.0 * z).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn real_matches_definition_in_range() {
        for &x in &[1e-12, 1e-6, 0.3, 1.0, 5.0, 20.0] {
            assert!(close(sinh_scaled(x), x.sinh() * (-x).exp(), 1e-14), "x={x}");
            assert!(close(cosh_scaled(x), x.cosh() * (-x).exp(), 1e-14), "x={x}");
        }
    }

    #[test]
    fn no_overflow_far_beyond_exp_range() {
        for &x in &[710.0, 1e4, 1e300] {
            assert_eq!(sinh_scaled(x), 0.5);
            assert_eq!(cosh_scaled(x), 0.5);
        }
        let z = Complex64::new(5e3, 17.0);
        let s = sinh_scaled_complex(z);
        let c = cosh_scaled_complex(z);
        assert!(s.is_finite() && c.is_finite());
        assert!((s - 0.5).norm() < 1e-15);
    }

    #[test]
    fn complex_matches_definition() {
        for &(re, im) in &[(1e-9, 2e-9), (0.2, 0.7), (3.0, -4.0), (0.0, 1.5)] {
            let z = Complex64::new(re, im);
            let expect_s = z.sinh() * (-z).exp();
            let expect_c = z.cosh() * (-z).exp();
            assert!(
                (sinh_scaled_complex(z) - expect_s).norm() <= 1e-14 * expect_s.norm().max(1e-9)
            );
            assert!((cosh_scaled_complex(z) - expect_c).norm() <= 1e-14 * expect_c.norm());
        }
    }

    #[test]
    fn small_argument_keeps_relative_accuracy() {
        // sinh(z)e^{-z} ≈ z for tiny z; the naive form loses every digit.
        let z = Complex64::new(1e-12, 1e-12);
        let s = sinh_scaled_complex(z);
        assert!((s - z).norm() / z.norm() < 1e-9);
    }
}
