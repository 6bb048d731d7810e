//! Finite-rank trigonometric selector kernel on `L^2[-pi, pi]` with the
//! measure `d theta / 2 pi`.
//!
//! Three published forms of the kernel circulate, and they do not agree:
//! the exponential sum `(1/J) sum_m e^{i(2m+1)(theta-phi)/2}`, its real part
//! `sin(J delta) / (2J sin(delta/2))`, and a boxed closed form
//! `sin(J delta/2) cos(delta/2) / (J sin(delta/2))`. All three are
//! implemented as variants; the exponential sum is canonical (it is Hermitian
//! and its kernel composition obeys `S o S = S / J` exactly), and the
//! mismatch between the others is reported by diagnostics instead of being
//! papered over.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, jacobi_eigen, CMat, Mat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectorVariant {
    /// `(1/J) sum_{m=0}^{J-1} e^{i(2m+1)(theta-phi)/2}` — canonical.
    ComplexSum,
    /// `sin(J(theta-phi)) / (2J sin((theta-phi)/2))`, the real part of the sum.
    RealPart,
    /// `sin(J(theta-phi)/2) cos((theta-phi)/2) / (J sin((theta-phi)/2))`.
    PaperClosedForm,
}

#[derive(Debug, Clone, Copy)]
pub struct SelectorParams {
    pub modes: u32,
    pub variant: SelectorVariant,
}

impl SelectorParams {
    pub fn new(modes: u32, variant: SelectorVariant) -> Result<Self> {
        if modes == 0 {
            return Err(Error::Domain("mode count J must be at least 1".into()));
        }
        Ok(Self { modes, variant })
    }
}

fn clamp_angle(x: f64, name: &str) -> f64 {
    if (-PI..=PI).contains(&x) {
        x
    } else {
        log::warn!("{name} = {x} outside [-pi, pi]; clamping");
        x.clamp(-PI, PI)
    }
}

/// Direct evaluation of the exponential sum; stable for every angle.
fn mode_sum(j: u32, half_delta: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..j {
        acc += Complex64::from_polar(1.0, (2 * m + 1) as f64 * half_delta);
    }
    acc / j as f64
}

/// Kernel value `S_J(theta, phi)` for the chosen variant.
///
/// All variants return exactly 1 at coincidence. Ratio forms switch to a
/// stable evaluation when `|sin(delta/2)| < 1e-8`.
pub fn selector_value(params: SelectorParams, theta: f64, phi: f64) -> Complex64 {
    let theta = clamp_angle(theta, "theta");
    let phi = clamp_angle(phi, "phi");
    let j = params.modes;
    let jf = j as f64;
    let a = 0.5 * (theta - phi);
    let sin_a = a.sin();
    match params.variant {
        SelectorVariant::ComplexSum => {
            if sin_a.abs() < 1e-8 {
                mode_sum(j, a)
            } else {
                Complex64::from_polar((jf * a).sin() / (jf * sin_a), jf * a)
            }
        }
        SelectorVariant::RealPart => {
            if sin_a.abs() < 1e-8 {
                Complex64::new(mode_sum(j, a).re, 0.0)
            } else {
                Complex64::new((2.0 * jf * a).sin() / (2.0 * jf * sin_a), 0.0)
            }
        }
        SelectorVariant::PaperClosedForm => {
            let ratio = if sin_a.abs() < 1e-8 {
                // a is within ~1e-8 of k pi; sin(J a)/(J sin a) -> (+/-)1
                let k = (a / PI).round();
                let flips = (k as i64) * (j as i64 - 1);
                if flips % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            } else {
                (jf * a).sin() / (jf * sin_a)
            };
            Complex64::new(ratio * a.cos(), 0.0)
        }
    }
}

/// Uniform periodic angles realizing `d theta / 2 pi` with weights `1/n`.
pub fn uniform_angles(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| -PI + (i as f64 + 0.5) * 2.0 * PI / n as f64)
        .collect()
}

/// Discrete trace `sum_i S(theta_i, theta_i) / n`, which realizes
/// `int S(theta, theta) d theta / 2 pi`.
pub fn selector_trace(params: SelectorParams, node_count: usize) -> f64 {
    let angles = uniform_angles(node_count);
    angles
        .iter()
        .map(|&t| selector_value(params, t, t).re)
        .sum::<f64>()
        / node_count as f64
}

/// Eigenvalues of the discretized kernel, descending by magnitude.
///
/// The complex-sum variant yields `1/J` with multiplicity `J`; the real-part
/// variant yields `1/(2J)` with multiplicity `2J`; the boxed closed form
/// splits into `1/J` (J-1 times) and `1/(2J)` (twice).
pub fn selector_spectrum(params: SelectorParams, node_count: usize) -> Result<Vec<f64>> {
    if node_count < 8 * params.modes as usize {
        return Err(Error::Resolution(format!(
            "node_count {node_count} below 8 J = {}",
            8 * params.modes
        )));
    }
    let angles = uniform_angles(node_count);
    let n = node_count;
    let w = 1.0 / n as f64;
    match params.variant {
        SelectorVariant::ComplexSum => {
            let mut h = CMat::zeros(n);
            for i in 0..n {
                for k in 0..n {
                    h[(i, k)] = selector_value(params, angles[i], angles[k]) * w;
                }
            }
            hermitian_eigenvalues(&h)
        }
        _ => {
            let mut m = Mat::zeros(n);
            for i in 0..n {
                for k in 0..n {
                    m[(i, k)] = selector_value(params, angles[i], angles[k]).re * w;
                }
            }
            m.symmetrize();
            let (eig, _) = jacobi_eigen(&m, false)?;
            Ok(eig)
        }
    }
}

/// `det(I - lambda S_J)` from the variant's exact spectrum.
pub fn selector_determinant(j: u32, lambda: f64, variant: SelectorVariant) -> f64 {
    let jf = j as f64;
    match variant {
        SelectorVariant::ComplexSum => (1.0 - lambda / jf).powi(j as i32),
        SelectorVariant::RealPart => (1.0 - lambda / (2.0 * jf)).powi(2 * j as i32),
        SelectorVariant::PaperClosedForm => {
            (1.0 - lambda / jf).powi(j as i32 - 1) * (1.0 - lambda / (2.0 * jf)).powi(2)
        }
    }
}

/// Entrywise deviations of the discrete kernel composition
/// `(S o S)(theta_i, theta_k) = sum_j S(theta_i, theta_j) S(theta_j, theta_k) / n`.
#[derive(Debug, Clone, Copy)]
pub struct CompositionReport {
    /// `max |S o S - S|`; the idempotence the normalized kernel fails.
    pub max_dev_idempotent: f64,
    /// `max |S o S - S / J|`; the identity that actually holds.
    pub max_dev_scaled: f64,
    /// `max |P o P - P|` for the unnormalized sum `P = J S`.
    pub max_dev_unnormalized: f64,
}

pub fn composition_diagnostic(j: u32, node_count: usize) -> Result<CompositionReport> {
    if node_count < 8 * j as usize {
        return Err(Error::Resolution(format!(
            "node_count {node_count} below 8 J = {}",
            8 * j
        )));
    }
    let params = SelectorParams::new(j, SelectorVariant::ComplexSum)?;
    let angles = uniform_angles(node_count);
    let n = node_count;
    let mut s = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            s[i * n + k] = selector_value(params, angles[i], angles[k]);
        }
    }
    let jf = j as f64;
    let mut max_dev_idempotent: f64 = 0.0;
    let mut max_dev_scaled: f64 = 0.0;
    let mut max_dev_unnormalized: f64 = 0.0;
    for i in 0..n {
        for k in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..n {
                acc += s[i * n + m] * s[m * n + k];
            }
            let ss = acc / n as f64;
            let sik = s[i * n + k];
            max_dev_idempotent = max_dev_idempotent.max((ss - sik).norm());
            max_dev_scaled = max_dev_scaled.max((ss - sik / jf).norm());
            // P = J S, so P o P - P = J^2 (S o S) - J S
            max_dev_unnormalized = max_dev_unnormalized.max((jf * jf * ss - jf * sik).norm());
        }
    }
    Ok(CompositionReport {
        max_dev_idempotent,
        max_dev_scaled,
        max_dev_unnormalized,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct SineRelationReport {
    /// `max | S_J^{boxed}(theta,phi) J / (2 pi cos(delta/2)) - K_sine |`.
    pub max_relation_deviation: f64,
    /// `max | (e^{i theta} - 1) - 2 i e^{i theta/2} sin(theta/2) |`.
    pub max_angle_map_deviation: f64,
}

/// Pointwise check of the algebraic relation between the boxed closed form
/// and the sine kernel `sin(J delta/2) / (2 pi sin(delta/2))`, on a grid that
/// excludes the zeros of `cos(delta/2)`.
pub fn sine_kernel_relation(j: u32, grid_points: usize) -> Result<SineRelationReport> {
    if grid_points < 2 {
        return Err(Error::Domain("need at least a 2x2 grid".into()));
    }
    let params = SelectorParams::new(j, SelectorVariant::PaperClosedForm)?;
    let jf = j as f64;
    let g = grid_points;
    let thetas: Vec<f64> = (0..g).map(|i| -2.9 + 5.8 * i as f64 / (g - 1) as f64).collect();
    let phis: Vec<f64> = (0..g)
        .map(|i| -2.95 + 5.9 * i as f64 / (g - 1) as f64)
        .collect();
    let mut max_relation_deviation: f64 = 0.0;
    for &theta in &thetas {
        for &phi in &phis {
            let a = 0.5 * (theta - phi);
            if a.cos().abs() < 0.05 || a.sin().abs() < 0.05 {
                continue;
            }
            let boxed = selector_value(params, theta, phi).re;
            let lhs = boxed * jf / (2.0 * PI * a.cos());
            let rhs = (jf * a).sin() / (2.0 * PI * a.sin());
            max_relation_deviation = max_relation_deviation.max((lhs - rhs).abs());
        }
    }
    let mut max_angle_map_deviation: f64 = 0.0;
    for &theta in &thetas {
        let lhs = Complex64::from_polar(1.0, theta) - 1.0;
        let rhs = Complex64::new(0.0, 2.0)
            * Complex64::from_polar(1.0, 0.5 * theta)
            * (0.5 * theta).sin();
        max_angle_map_deviation = max_angle_map_deviation.max((lhs - rhs).norm());
    }
    Ok(SineRelationReport {
        max_relation_deviation,
        max_angle_map_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(j: u32, v: SelectorVariant) -> SelectorParams {
        SelectorParams::new(j, v).unwrap()
    }

    #[test]
    fn j1_reduces_to_half_angle_cosine() {
        let p = params(1, SelectorVariant::ComplexSum);
        for delta in [-2.0, -0.3, 0.0, 0.7, 2.9] {
            let v = selector_value(p, delta / 2.0, -delta / 2.0);
            assert_abs_diff_eq!(v.re, (delta / 2.0).cos(), epsilon = 1e-14);
            assert_abs_diff_eq!(v.im, (delta / 2.0).sin(), epsilon = 1e-14);
        }
    }

    #[test]
    fn coincidence_is_one_for_every_variant() {
        for variant in [
            SelectorVariant::ComplexSum,
            SelectorVariant::RealPart,
            SelectorVariant::PaperClosedForm,
        ] {
            for j in [1, 2, 3, 8, 33] {
                let v = selector_value(params(j, variant), 0.4, 0.4);
                assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn j2_quarter_turn_value() {
        // (1/2)(e^{i pi/4} + e^{3 i pi/4}) = i / sqrt(2)
        let v = selector_value(params(2, SelectorVariant::ComplexSum), PI / 4.0, -PI / 4.0);
        assert_abs_diff_eq!(v.re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v.im, 1.0 / 2.0_f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn closed_form_matches_mode_sum() {
        for j in [1u32, 2, 3, 7, 16] {
            let p = params(j, SelectorVariant::ComplexSum);
            for delta in [-5.0f64, -1.1, -1e-9, 2e-10, 0.37, 2.2, 6.0] {
                let theta = (delta / 2.0).clamp(-PI, PI);
                let phi = (-delta / 2.0).clamp(-PI, PI);
                let closed = selector_value(p, theta, phi);
                let direct = mode_sum(j, 0.5 * (theta - phi));
                assert_abs_diff_eq!(closed.re, direct.re, epsilon = 1e-12);
                assert_abs_diff_eq!(closed.im, direct.im, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn hermitian_symmetry_of_complex_sum() {
        let p = params(5, SelectorVariant::ComplexSum);
        let samples = [(-2.3, 0.4), (0.0, 1.1), (2.9, -2.9), (0.5, 0.5000001)];
        for &(theta, phi) in &samples {
            let a = selector_value(p, theta, phi);
            let b = selector_value(p, phi, theta).conj();
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-13);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-13);
        }
    }

    #[test]
    fn half_integer_modes_have_period_4pi() {
        // S depends on delta only; delta -> delta + 4 pi is invisible to the
        // half-integer modes. Compare the mode sum directly.
        for j in [2u32, 5] {
            for half_delta in [-1.2, 0.3, 2.0] {
                let a = mode_sum(j, half_delta);
                let b = mode_sum(j, half_delta + 2.0 * PI);
                assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
                assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn trace_is_one_for_all_variants() {
        for variant in [
            SelectorVariant::ComplexSum,
            SelectorVariant::RealPart,
            SelectorVariant::PaperClosedForm,
        ] {
            for j in [1u32, 2, 3, 16, 64] {
                let tr = selector_trace(params(j, variant), (8 * j as usize).max(64));
                assert_abs_diff_eq!(tr, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn spectra_match_projector_structure() {
        // complex sum: 1/J with multiplicity J
        let eig = selector_spectrum(params(2, SelectorVariant::ComplexSum), 32).unwrap();
        assert_abs_diff_eq!(eig[0], 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(eig[1], 0.5, epsilon = 1e-10);
        assert!(eig[2].abs() < 1e-10);

        let eig = selector_spectrum(params(1, SelectorVariant::ComplexSum), 16).unwrap();
        assert_abs_diff_eq!(eig[0], 1.0, epsilon = 1e-10);
        assert!(eig[1].abs() < 1e-10);

        // real part: 1/(2J) with multiplicity 2J
        let eig = selector_spectrum(params(3, SelectorVariant::RealPart), 48).unwrap();
        for k in 0..6 {
            assert_abs_diff_eq!(eig[k], 1.0 / 6.0, epsilon = 1e-10);
        }
        assert!(eig[6].abs() < 1e-10);

        // boxed form: 1/J (J-1 times) then 1/(2J) twice
        let eig = selector_spectrum(params(3, SelectorVariant::PaperClosedForm), 48).unwrap();
        assert_abs_diff_eq!(eig[0], 1.0 / 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(eig[1], 1.0 / 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(eig[2], 1.0 / 6.0, epsilon = 1e-10);
        assert_abs_diff_eq!(eig[3], 1.0 / 6.0, epsilon = 1e-10);
        assert!(eig[4].abs() < 1e-10);
    }

    #[test]
    fn spectrum_sums_match_unit_trace() {
        for variant in [
            SelectorVariant::ComplexSum,
            SelectorVariant::RealPart,
            SelectorVariant::PaperClosedForm,
        ] {
            for j in [1u32, 2, 5] {
                let eig = selector_spectrum(params(j, variant), 8 * j as usize + 8).unwrap();
                let sum: f64 = eig.iter().sum();
                assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn spectrum_requires_resolution() {
        assert!(matches!(
            selector_spectrum(params(8, SelectorVariant::ComplexSum), 32),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn determinant_closed_forms() {
        assert_abs_diff_eq!(
            selector_determinant(2, 1.0, SelectorVariant::ComplexSum),
            0.25,
            epsilon = 1e-15
        );
        for j in [1u32, 3, 10] {
            assert_abs_diff_eq!(
                selector_determinant(j, 0.0, SelectorVariant::ComplexSum),
                1.0,
                epsilon = 0.0
            );
        }
        let d = selector_determinant(1000, 1.0, SelectorVariant::ComplexSum);
        assert!((d - (-1.0_f64).exp()).abs() < 2e-4);
    }

    #[test]
    fn composition_identities() {
        // J = 1: a rank-one normalized projector is idempotent
        let r = composition_diagnostic(1, 32).unwrap();
        assert!(r.max_dev_idempotent < 1e-10);

        // J = 3: S o S = S/3 holds; S o S = S fails by ~2/3 of the peak
        let r = composition_diagnostic(3, 48).unwrap();
        assert!(r.max_dev_scaled < 1e-10);
        assert!((r.max_dev_idempotent - 2.0 / 3.0).abs() < 1e-3);
        assert!(r.max_dev_unnormalized < 1e-9);
    }

    #[test]
    fn relation_to_sine_kernel() {
        let r = sine_kernel_relation(1, 40).unwrap();
        assert!(r.max_relation_deviation < 1e-14);
        let r = sine_kernel_relation(5, 100).unwrap();
        assert!(r.max_relation_deviation < 1e-12);
        assert!(r.max_angle_map_deviation < 1e-15);
    }
}
