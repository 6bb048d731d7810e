//! Analytic Bernoulli function `B(s; x) = -s zeta(1 - s, x)` and its Fourier
//! representation.
//!
//! At integer order the function lands on the classical Bernoulli
//! polynomials; for complex order it interpolates between them. The Fourier
//! route is the classical expansion `-Gamma(s+1) sum_{n != 0} e^{2 pi i n x} (2 pi i n)^{-s}`
//! with the principal branch `(2 pi i n)^s = exp(s (log(2 pi |n|) + i pi/2 sign n))`,
//! which pairs `n` and `-n` into conjugates so real inputs give real sums.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gamma;
use crate::zeta;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BernoulliRoute {
    Hurwitz,
    Fourier,
}

#[derive(Debug, Clone, Copy)]
pub struct AnalyticBernoulliValue {
    pub s: Complex64,
    pub x: f64,
    pub value: Complex64,
    pub route: BernoulliRoute,
    /// Absolute bound on the dropped Fourier tail, when applicable.
    pub tail_bound: Option<f64>,
}

/// `B(s; x)` through the Hurwitz route, with the removable singularity at
/// `s = 0` handled by its analytic limit 1.
pub fn analytic_bernoulli(s: Complex64, x: f64) -> Result<AnalyticBernoulliValue> {
    if x <= 0.0 {
        return Err(Error::Domain(format!("x = {x} must be positive")));
    }
    let value = if s.norm() < 1e-6 {
        // zeta(1-s, x) ~ 1/(-s) near s = 0, so -s zeta(1-s, x) -> 1
        Complex64::new(1.0, 0.0)
    } else {
        let z = zeta::hurwitz_zeta(Complex64::new(1.0, 0.0) - s, x)?;
        -s * z.value
    };
    Ok(AnalyticBernoulliValue {
        s,
        x,
        value,
        route: BernoulliRoute::Hurwitz,
        tail_bound: None,
    })
}

/// `B(s; x)` by the symmetric Fourier partial sum over `0 < |n| <= terms`,
/// absolutely convergent for `s > 1`.
pub fn fourier_bernoulli(s: f64, x: f64, terms: usize) -> Result<AnalyticBernoulliValue> {
    if s <= 1.0 {
        return Err(Error::Divergence(format!(
            "fourier series requires s > 1, got {s}"
        )));
    }
    if !(0.0 < x && x < 1.0) {
        return Err(Error::Domain(format!("x = {x} must lie in (0, 1)")));
    }
    if terms < 10 {
        return Err(Error::Domain("need at least 10 fourier terms".into()));
    }
    let gamma_s1 = gamma::gamma(s + 1.0);
    // paired terms: -2 Gamma(s+1) sum_n cos(2 pi n x - pi s / 2) / (2 pi n)^s
    let mut acc = 0.0;
    for n in 1..=terms {
        let nf = n as f64;
        acc += (2.0 * PI * nf * x - PI * s / 2.0).cos() / (2.0 * PI * nf).powf(s);
    }
    let value = -2.0 * gamma_s1 * acc;
    let nf = terms as f64;
    let tail = 2.0 * gamma_s1 * (2.0 * PI).powf(-s) * nf.powf(1.0 - s) / (s - 1.0);
    Ok(AnalyticBernoulliValue {
        s: Complex64::new(s, 0.0),
        x,
        value: Complex64::new(value, 0.0),
        route: BernoulliRoute::Fourier,
        tail_bound: Some(tail),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::bernoulli_polynomial;
    use approx::assert_abs_diff_eq;

    #[test]
    fn order_one_is_x_minus_half() {
        let v = analytic_bernoulli(Complex64::new(1.0, 0.0), 0.7).unwrap();
        assert_abs_diff_eq!(v.value.re, 0.2, epsilon = 1e-12);
        assert!(v.value.im.abs() < 1e-12);
    }

    #[test]
    fn removable_singularity_at_zero() {
        for x in [0.2, 0.9, 3.7] {
            let v = analytic_bernoulli(Complex64::new(1e-9, 0.0), x).unwrap();
            assert_abs_diff_eq!(v.value.re, 1.0, epsilon = 1e-9);
        }
        // approaching the limit from outside the switch radius
        let v = analytic_bernoulli(Complex64::new(1e-4, 0.0), 0.5).unwrap();
        assert_abs_diff_eq!(v.value.re, 1.0, epsilon = 1e-3);
    }

    #[test]
    fn integer_orders_recover_bernoulli_polynomials() {
        let xs = [0.07, 0.19, 0.31, 0.43, 0.55, 0.62, 0.71, 0.83, 0.9, 0.97];
        for n in 1..=10usize {
            let poly = bernoulli_polynomial(n).unwrap();
            for &x in &xs {
                let v = analytic_bernoulli(Complex64::new(n as f64, 0.0), x).unwrap();
                assert_abs_diff_eq!(v.value.re, poly.eval_f64(x), epsilon = 1e-10);
                assert!(v.value.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn difference_identity() {
        // B(s; x+1) - B(s; x) = s x^{s-1}
        for &s in &[1.5, 2.5, 3.0] {
            for &x in &[0.5, 1.0] {
                let hi = analytic_bernoulli(Complex64::new(s, 0.0), x + 1.0).unwrap();
                let lo = analytic_bernoulli(Complex64::new(s, 0.0), x).unwrap();
                let expected = s * x.powf(s - 1.0);
                assert_abs_diff_eq!(hi.value.re - lo.value.re, expected, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn fourier_route_matches_polynomial_oracle() {
        // B_2(1/4) = 1/16 - 1/4 + 1/6
        let v = fourier_bernoulli(2.0, 0.25, 10_000).unwrap();
        let exact = 0.25f64.powi(2) - 0.25 + 1.0 / 6.0;
        assert_abs_diff_eq!(v.value.re, exact, epsilon = 1e-6);
        // observed error within the reported tail bound
        let hurwitz = analytic_bernoulli(Complex64::new(2.0, 0.0), 0.25).unwrap();
        let observed = (v.value.re - hurwitz.value.re).abs();
        assert!(observed <= v.tail_bound.unwrap());
    }

    #[test]
    fn fourier_reflection_symmetry_even_order() {
        let a = fourier_bernoulli(2.0, 0.3, 4000).unwrap();
        let b = fourier_bernoulli(2.0, 0.7, 4000).unwrap();
        assert_abs_diff_eq!(a.value.re, b.value.re, epsilon = 1e-9);
    }

    #[test]
    fn fourier_odd_order_vanishes_at_midpoint() {
        let v = fourier_bernoulli(3.0, 0.5, 2000).unwrap();
        assert_abs_diff_eq!(v.value.re, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn fourier_converges_to_hurwitz() {
        let hurwitz = analytic_bernoulli(Complex64::new(2.5, 0.0), 0.35)
            .unwrap()
            .value
            .re;
        let mut previous = f64::INFINITY;
        for terms in [100, 1000, 10_000] {
            let v = fourier_bernoulli(2.5, 0.35, terms).unwrap();
            let err = (v.value.re - hurwitz).abs();
            assert!(err <= v.tail_bound.unwrap());
            assert!(err < previous || err < 1e-12);
            previous = err;
        }
    }

    #[test]
    fn fourier_preconditions() {
        assert!(matches!(
            fourier_bernoulli(0.8, 0.3, 100),
            Err(Error::Divergence(_))
        ));
        assert!(matches!(
            fourier_bernoulli(2.0, 1.3, 100),
            Err(Error::Domain(_))
        ));
    }
}
