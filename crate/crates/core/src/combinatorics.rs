//! Exact Bernoulli/Stirling combinatorics and corrected summation.
//!
//! Everything in this module is computed in exact rational arithmetic; floats
//! appear only in the corrected-summation driver, which estimates a finite sum
//! `sum_{k=1..n} f(k)` as an integral plus endpoint and Bernoulli-weighted
//! derivative corrections.
//!
//! Convention: `B_1 = -1/2`, as forced by the generating function
//! `t e^{xt} / (e^t - 1)`. Some references use `+1/2`; every identity here
//! assumes the minus convention.

use std::sync::{LazyLock, Mutex};

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::rational::{int, ratio, Rational, RationalPolynomial};

/// Default cap on Bernoulli/Stirling indices. A configuration guard against
/// accidental huge-table computations, not a hard mathematical limit.
pub const DEFAULT_INDEX_CAP: usize = 200;

// Append-only memo table; writers serialized, values cloned out.
static BERNOULLI_TABLE: LazyLock<Mutex<Vec<Rational>>> =
    LazyLock::new(|| Mutex::new(vec![Rational::one()]));

/// Exact Bernoulli number `B_n` (convention `B_1 = -1/2`).
pub fn bernoulli_number(n: usize) -> Result<Rational> {
    bernoulli_number_with_cap(n, DEFAULT_INDEX_CAP)
}

pub fn bernoulli_number_with_cap(n: usize, cap: usize) -> Result<Rational> {
    if n > cap {
        return Err(Error::CapExceeded { index: n, cap });
    }
    let mut table = BERNOULLI_TABLE.lock().expect("bernoulli table poisoned");
    while table.len() <= n {
        let m = table.len(); // computing B_m from B_0..B_{m-1}
        let mut acc = Rational::zero();
        for (k, b) in table.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let c = binomial(BigInt::from(m + 1), BigInt::from(k));
            acc += Rational::from_integer(c) * b;
        }
        let b_m = -acc / int((m + 1) as i64);
        table.push(b_m);
    }
    Ok(table[n].clone())
}

/// Exact Bernoulli polynomial `B_n(x) = sum_k C(n,k) B_k x^{n-k}`.
pub fn bernoulli_polynomial(n: usize) -> Result<RationalPolynomial> {
    bernoulli_polynomial_with_cap(n, DEFAULT_INDEX_CAP)
}

pub fn bernoulli_polynomial_with_cap(n: usize, cap: usize) -> Result<RationalPolynomial> {
    if n > cap {
        return Err(Error::CapExceeded { index: n, cap });
    }
    let mut coeffs = vec![Rational::zero(); n + 1];
    for k in 0..=n {
        let b_k = bernoulli_number_with_cap(k, cap)?;
        if b_k.is_zero() {
            continue;
        }
        let c = binomial(BigInt::from(n), BigInt::from(k));
        coeffs[n - k] = Rational::from_integer(c) * b_k;
    }
    Ok(RationalPolynomial::new(coeffs))
}

/// Generalized Bernoulli polynomial value `B_n^{(alpha)}(x)`.
///
/// Evaluated by exact power-series composition: the series of
/// `log(t/(e^t-1))` is scaled by `alpha`, `x t` is added, and the result is
/// exponentiated; the coefficient of `t^n` times `n!` is the value. This
/// keeps `alpha` fully rational and supports negative `alpha` directly.
pub fn norlund_polynomial(n: usize, alpha: &Rational, x: &Rational) -> Result<Rational> {
    norlund_polynomial_with_cap(n, alpha, x, DEFAULT_INDEX_CAP)
}

pub fn norlund_polynomial_with_cap(
    n: usize,
    alpha: &Rational,
    x: &Rational,
    cap: usize,
) -> Result<Rational> {
    if n > cap {
        return Err(Error::CapExceeded { index: n, cap });
    }
    if n == 0 {
        return Ok(Rational::one());
    }
    // g_k = B_k / k!, ordinary coefficients of t/(e^t - 1)
    let mut factorial = Rational::one();
    let mut g = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if k > 0 {
            factorial *= int(k as i64);
        }
        g.push(bernoulli_number_with_cap(k, cap)? / factorial.clone());
    }
    // l = log(g) via k l_k = k g_k - sum_{j<k} j l_j g_{k-j}
    let mut l = vec![Rational::zero(); n + 1];
    for k in 1..=n {
        let mut acc = int(k as i64) * &g[k];
        for j in 1..k {
            acc -= int(j as i64) * &l[j] * &g[k - j];
        }
        l[k] = acc / int(k as i64);
    }
    // p = alpha * l + x t, then h = exp(p) via k h_k = sum_j j p_j h_{k-j}
    let mut p: Vec<Rational> = l.iter().map(|c| c * alpha).collect();
    p[1] += x;
    let mut h = vec![Rational::zero(); n + 1];
    h[0] = Rational::one();
    for k in 1..=n {
        let mut acc = Rational::zero();
        for j in 1..=k {
            if p[j].is_zero() {
                continue;
            }
            acc += int(j as i64) * &p[j] * &h[k - j];
        }
        h[k] = acc / int(k as i64);
    }
    let mut n_factorial = Rational::one();
    for k in 2..=n {
        n_factorial *= int(k as i64);
    }
    Ok(h[n].clone() * n_factorial)
}

/// Stirling number of the second kind `S(n, k)` by the triangular recurrence.
///
/// `k > n` returns 0 by convention.
pub fn stirling2(n: usize, k: usize) -> Result<BigUint> {
    stirling2_with_cap(n, k, DEFAULT_INDEX_CAP)
}

pub fn stirling2_with_cap(n: usize, k: usize, cap: usize) -> Result<BigUint> {
    if n > cap {
        return Err(Error::CapExceeded { index: n, cap });
    }
    if k > n {
        return Ok(BigUint::zero());
    }
    if n == 0 {
        return Ok(BigUint::one());
    }
    // row-by-row triangle: S(m, j) = j S(m-1, j) + S(m-1, j-1)
    let mut row = vec![BigUint::one()]; // row for m = 0
    for m in 1..=n {
        let width = k.min(m);
        let mut next = Vec::with_capacity(width + 1);
        for j in 0..=width {
            if j == 0 {
                next.push(BigUint::zero());
                continue;
            }
            let mut v = row.get(j).cloned().unwrap_or_else(BigUint::zero) * BigUint::from(j);
            v += row.get(j - 1).cloned().unwrap_or_else(BigUint::zero);
            next.push(v);
        }
        row = next;
    }
    Ok(row.get(k).cloned().unwrap_or_else(BigUint::zero))
}

/// Stirling number via the generalized-Bernoulli route
/// `S(n,k) = C(n,k) B_{n-k}^{(-k)}(0)`, used as an independent cross-check of
/// the triangular recurrence.
pub fn stirling2_via_norlund(n: usize, k: usize) -> Result<Rational> {
    if k > n {
        return Ok(Rational::zero());
    }
    let b = norlund_polynomial(n - k, &int(-(k as i64)), &Rational::zero())?;
    let c = binomial(BigInt::from(n), BigInt::from(k));
    Ok(Rational::from_integer(c) * b)
}

/// Function handle with a derivative provider for corrected summation.
pub struct SmoothFunction {
    value: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    derivative: DerivativeProvider,
}

pub enum DerivativeProvider {
    /// `(order, x) -> f^{(order)}(x)` supplied analytically.
    Analytic(Box<dyn Fn(usize, f64) -> f64 + Send + Sync>),
    /// Central differences with the given step; flagged as inexact in results.
    CentralDifference { step: f64 },
}

impl SmoothFunction {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(usize, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Box::new(value),
            derivative: DerivativeProvider::Analytic(Box::new(derivative)),
        }
    }

    /// Derivatives by central differences with step `1e-4`.
    pub fn with_numeric_derivatives(value: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            value: Box::new(value),
            derivative: DerivativeProvider::CentralDifference { step: 1e-4 },
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    pub fn derivative(&self, order: usize, x: f64) -> f64 {
        match &self.derivative {
            DerivativeProvider::Analytic(d) => d(order, x),
            DerivativeProvider::CentralDifference { step } => {
                central_difference(&self.value, order, x, *step)
            }
        }
    }

    pub fn derivatives_numeric(&self) -> bool {
        matches!(self.derivative, DerivativeProvider::CentralDifference { .. })
    }
}

fn central_difference(f: &(dyn Fn(f64) -> f64 + Send + Sync), order: usize, x: f64, h: f64) -> f64 {
    // symmetric stencil on offsets (order/2 - j) h, j = 0..=order
    let mut acc = 0.0;
    let mut sign = 1.0;
    let mut binom = 1.0;
    for j in 0..=order {
        if j > 0 {
            binom *= (order - j + 1) as f64 / j as f64;
            sign = -sign;
        }
        let offset = order as f64 / 2.0 - j as f64;
        acc += sign * binom * f(x + offset * h);
    }
    acc / h.powi(order as i32)
}

#[derive(Debug, Clone)]
pub struct EulerMaclaurinResult {
    /// Directly summed leading terms (zero when `direct_prefix == 0`).
    pub direct_term: f64,
    pub integral_term: f64,
    pub endpoint_term: f64,
    /// One Bernoulli correction per order `m = 1..=corrections`.
    pub correction_terms: Vec<f64>,
    /// `direct + integral + endpoint + sum(corrections)`.
    pub total: f64,
    /// The plain term-by-term sum, for comparison.
    pub reference_sum: f64,
    /// True when derivatives came from the finite-difference fallback.
    pub derivatives_numeric: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct EulerMaclaurinOptions {
    /// Number of leading terms summed outright before the corrected-integral
    /// tail takes over. With 0 the tail is anchored at 0, which requires `f`
    /// to be smooth there; functions singular at 0 (like `1/x`) need a
    /// positive prefix.
    pub direct_prefix: u64,
    /// Gauss-Legendre node count for the integral term.
    pub quadrature_nodes: usize,
}

impl Default for EulerMaclaurinOptions {
    fn default() -> Self {
        Self {
            direct_prefix: 0,
            quadrature_nodes: 64,
        }
    }
}

/// Estimate `sum_{k=1..n} f(k)` by the corrected-trapezoid mechanism:
///
/// `sum_{k=p+1..n} f(k) = int_p^n f + (f(n) - f(p))/2
///    + sum_{m=1..M} B_{2m}/(2m)! (f^{(2m-1)}(n) - f^{(2m-1)}(p))`
///
/// plus the directly-summed prefix `sum_{k=1..p} f(k)`.
pub fn euler_maclaurin_sum(
    f: &SmoothFunction,
    n: u64,
    corrections: usize,
    opts: EulerMaclaurinOptions,
) -> Result<EulerMaclaurinResult> {
    if n == 0 {
        return Err(Error::Domain("summation limit must be positive".into()));
    }
    if 2 * corrections > DEFAULT_INDEX_CAP {
        return Err(Error::CapExceeded {
            index: 2 * corrections,
            cap: DEFAULT_INDEX_CAP,
        });
    }
    let reference_sum = (1..=n).map(|k| f.value(k as f64)).sum::<f64>();
    let prefix = opts.direct_prefix.min(n);
    let direct_term = (1..=prefix).map(|k| f.value(k as f64)).sum::<f64>();
    if prefix == n {
        return Ok(EulerMaclaurinResult {
            direct_term,
            integral_term: 0.0,
            endpoint_term: 0.0,
            correction_terms: vec![],
            total: direct_term,
            reference_sum,
            derivatives_numeric: f.derivatives_numeric(),
        });
    }
    let (a, b) = (prefix as f64, n as f64);
    let rule = quadrature::gauss_legendre(opts.quadrature_nodes, a, b)?;
    let integral_term = rule.integrate(|x| f.value(x));
    let endpoint_term = 0.5 * (f.value(b) - f.value(a));
    let mut correction_terms = Vec::with_capacity(corrections);
    let mut fact = 1.0;
    for m in 1..=corrections {
        fact *= (2 * m - 1) as f64 * (2 * m) as f64;
        let b2m = bernoulli_number(2 * m)?
            .to_f64()
            .ok_or_else(|| Error::Numerical("bernoulli number out of f64 range".into()))?;
        let order = 2 * m - 1;
        correction_terms.push(b2m / fact * (f.derivative(order, b) - f.derivative(order, a)));
    }
    let total = direct_term + integral_term + endpoint_term + correction_terms.iter().sum::<f64>();
    Ok(EulerMaclaurinResult {
        direct_term,
        integral_term,
        endpoint_term,
        correction_terms,
        total,
        reference_sum,
        derivatives_numeric: f.derivatives_numeric(),
    })
}

/// Exact-rational corrected summation for polynomial `f`; reproduces the
/// direct sum exactly once `corrections >= ceil(deg/2)`.
pub fn euler_maclaurin_sum_exact(
    poly: &RationalPolynomial,
    n: u64,
    corrections: usize,
) -> Result<(Rational, Rational)> {
    if n == 0 {
        return Err(Error::Domain("summation limit must be positive".into()));
    }
    let nr = int(n as i64);
    let reference = {
        let mut acc = Rational::zero();
        for k in 1..=n {
            acc += poly.eval(&int(k as i64));
        }
        acc
    };
    let antider = poly.antiderivative();
    let mut total = antider.eval(&nr) - antider.eval(&Rational::zero());
    total += ratio(1, 2) * (poly.eval(&nr) - poly.eval(&Rational::zero()));
    let mut deriv = poly.clone();
    let mut fact = Rational::one();
    for m in 1..=corrections {
        deriv = deriv.derivative(); // order 2m-1 after this and the next step
        if m > 1 {
            deriv = deriv.derivative();
        }
        // maintain (2m)! incrementally
        fact *= int((2 * m - 1) as i64) * int((2 * m) as i64);
        let b2m = bernoulli_number(2 * m)?;
        total += b2m / &fact * (deriv.eval(&nr) - deriv.eval(&Rational::zero()));
    }
    Ok((total, reference))
}
