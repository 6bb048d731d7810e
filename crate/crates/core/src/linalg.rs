//! Dense real/complex matrices with LU log-determinants and a cyclic Jacobi
//! eigensolver.
//!
//! Scale target is a few hundred rows, where Jacobi is accurate and easy to
//! make deterministic. LU accumulates the determinant in log-magnitude plus
//! sign/phase so large grids neither overflow nor underflow.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn symmetrize(&mut self) {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let avg = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = avg;
                self[(j, i)] = avg;
            }
        }
    }

    pub fn matvec(&self, v: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    /// `I + scale * A`.
    pub fn identity_plus_scaled(&self, scale: f64) -> Mat {
        let mut m = self.clone();
        for v in m.data.iter_mut() {
            *v *= scale;
        }
        for i in 0..self.n {
            m[(i, i)] += 1.0;
        }
        m
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

#[derive(Debug, Clone)]
pub struct CMat {
    n: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn max_hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            worst = worst.max(self[(i, i)].im.abs());
            for j in (i + 1)..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn matvec(&self, v: &[Complex64], out: &mut [Complex64]) {
        for i in 0..self.n {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    /// `I + scale * A`.
    pub fn identity_plus_scaled(&self, scale: f64) -> CMat {
        let mut m = self.clone();
        for v in m.data.iter_mut() {
            *v *= scale;
        }
        for i in 0..self.n {
            m[(i, i)] += 1.0;
        }
        m
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Outcome of an LU factorization run for determinant purposes.
#[derive(Debug, Clone, Copy)]
pub struct LogDet {
    pub log_abs: f64,
    /// `-1.0`, `0.0`, or `1.0` for real input; a unit phase packed into the
    /// real/imag pair for complex input.
    pub phase: Complex64,
    pub singular: bool,
}

impl LogDet {
    pub fn value(&self) -> Complex64 {
        if self.singular {
            Complex64::new(0.0, 0.0)
        } else {
            self.phase * self.log_abs.exp()
        }
    }
}

/// Log-determinant of a real matrix by partial-pivot LU.
pub fn lu_log_det(a: &Mat) -> LogDet {
    let n = a.dim();
    let mut m = a.clone();
    let mut sign = 1.0f64;
    let mut log_abs = 0.0f64;
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = m[(col, col)].abs();
        for r in (col + 1)..n {
            let v = m[(r, col)].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if pivot_val == 0.0 {
            return LogDet {
                log_abs: f64::NEG_INFINITY,
                phase: Complex64::new(0.0, 0.0),
                singular: true,
            };
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(pivot_row, j)];
                m[(pivot_row, j)] = tmp;
            }
            sign = -sign;
        }
        let pivot = m[(col, col)];
        log_abs += pivot.abs().ln();
        if pivot < 0.0 {
            sign = -sign;
        }
        for r in (col + 1)..n {
            let factor = m[(r, col)] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in (col + 1)..n {
                let v = m[(col, j)];
                m[(r, j)] -= factor * v;
            }
        }
    }
    LogDet {
        log_abs,
        phase: Complex64::new(sign, 0.0),
        singular: false,
    }
}

/// Log-determinant of a complex matrix by partial-pivot LU.
pub fn lu_log_det_complex(a: &CMat) -> LogDet {
    let n = a.dim();
    let mut m = a.clone();
    let mut phase = Complex64::new(1.0, 0.0);
    let mut log_abs = 0.0f64;
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = m[(col, col)].norm();
        for r in (col + 1)..n {
            let v = m[(r, col)].norm();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if pivot_val == 0.0 {
            return LogDet {
                log_abs: f64::NEG_INFINITY,
                phase: Complex64::new(0.0, 0.0),
                singular: true,
            };
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(pivot_row, j)];
                m[(pivot_row, j)] = tmp;
            }
            phase = -phase;
        }
        let pivot = m[(col, col)];
        log_abs += pivot.norm().ln();
        phase *= pivot / pivot.norm();
        for r in (col + 1)..n {
            let factor = m[(r, col)] / pivot;
            for j in (col + 1)..n {
                let v = m[(col, j)];
                m[(r, j)] -= factor * v;
            }
        }
    }
    LogDet {
        log_abs,
        phase,
        singular: false,
    }
}

/// Solve `A x = b` by partial-pivot LU. Errors on an exactly singular pivot.
pub fn lu_solve(a: &Mat, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.dim();
    let mut m = a.clone();
    let mut x: Vec<f64> = b.to_vec();
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = m[(col, col)].abs();
        for r in (col + 1)..n {
            let v = m[(r, col)].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if pivot_val == 0.0 {
            return Err(Error::Numerical("singular matrix in lu_solve".into()));
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(pivot_row, j)];
                m[(pivot_row, j)] = tmp;
            }
            x.swap(col, pivot_row);
        }
        let pivot = m[(col, col)];
        for r in (col + 1)..n {
            let factor = m[(r, col)] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in (col + 1)..n {
                let v = m[(col, j)];
                m[(r, j)] -= factor * v;
            }
            x[r] -= factor * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for j in (col + 1)..n {
            acc -= m[(col, j)] * x[j];
        }
        x[col] = acc / m[(col, col)];
    }
    Ok(x)
}

fn off_diagonal_norm(a: &Mat) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)] * a[(i, j)];
            }
        }
    }
    acc.sqrt()
}

/// Eigenvalues (and optionally eigenvectors) of a symmetric matrix by cyclic
/// Jacobi rotations. Sweeps run until the off-diagonal Frobenius norm falls
/// below `1e-12` times its initial value; more than 100 sweeps is an error.
pub fn jacobi_eigen(a: &Mat, want_vectors: bool) -> Result<(Vec<f64>, Option<Mat>)> {
    let n = a.dim();
    if n == 0 {
        return Ok((vec![], None));
    }
    let mut m = a.clone();
    let mut v = if want_vectors {
        Some(Mat::identity(n))
    } else {
        None
    };
    let initial = off_diagonal_norm(&m);
    if initial == 0.0 {
        let eig = (0..n).map(|i| m[(i, i)]).collect();
        return Ok((sorted_desc_by_magnitude(eig), v));
    }
    let target = initial * 1e-12;
    let mut converged = false;
    for _sweep in 0..100 {
        if off_diagonal_norm(&m) <= target {
            converged = true;
            break;
        }
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta.abs() > 1e12 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                m[(p, p)] = app - t * apq;
                m[(q, q)] = aqq + t * apq;
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for j in 0..n {
                    if j == p || j == q {
                        continue;
                    }
                    let ajp = m[(j, p)];
                    let ajq = m[(j, q)];
                    let new_p = ajp - s * (ajq + tau * ajp);
                    let new_q = ajq + s * (ajp - tau * ajq);
                    m[(j, p)] = new_p;
                    m[(p, j)] = new_p;
                    m[(j, q)] = new_q;
                    m[(q, j)] = new_q;
                }
                if let Some(vv) = v.as_mut() {
                    for j in 0..n {
                        let vjp = vv[(j, p)];
                        let vjq = vv[(j, q)];
                        vv[(j, p)] = vjp - s * (vjq + tau * vjp);
                        vv[(j, q)] = vjq + s * (vjp - tau * vjq);
                    }
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&m) > target {
        return Err(Error::Numerical(
            "jacobi sweeps did not converge within 100 iterations".into(),
        ));
    }
    let eig: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    if let Some(vv) = v.as_mut() {
        // reorder vector columns to match magnitude-sorted eigenvalues
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eig[b]
                .abs()
                .partial_cmp(&eig[a].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut sorted_vals = Vec::with_capacity(n);
        let mut sorted_vecs = Mat::zeros(n);
        for (new_col, &old_col) in order.iter().enumerate() {
            sorted_vals.push(eig[old_col]);
            for row in 0..n {
                sorted_vecs[(row, new_col)] = vv[(row, old_col)];
            }
        }
        return Ok((sorted_vals, Some(sorted_vecs)));
    }
    Ok((sorted_desc_by_magnitude(eig), None))
}

fn sorted_desc_by_magnitude(mut eig: Vec<f64>) -> Vec<f64> {
    eig.sort_by(|a, b| {
        b.abs()
            .partial_cmp(&a.abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    eig
}

/// Real eigenvalues of a Hermitian matrix via the symmetric 2n x 2n
/// embedding `[[X, -Y], [Y, X]]`, whose spectrum doubles every eigenvalue.
pub fn hermitian_eigenvalues(a: &CMat) -> Result<Vec<f64>> {
    let n = a.dim();
    let mut m = Mat::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = a[(i, j)];
            m[(i, j)] = z.re;
            m[(i + n, j + n)] = z.re;
            m[(i, j + n)] = -z.im;
            m[(i + n, j)] = z.im;
        }
    }
    m.symmetrize();
    let (doubled, _) = jacobi_eigen(&m, false)?;
    Ok(doubled.into_iter().step_by(2).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn jacobi_diagonal_matrix() {
        let mut a = Mat::zeros(3);
        a[(0, 0)] = 2.0;
        a[(1, 1)] = -5.0;
        a[(2, 2)] = 0.5;
        let (eig, _) = jacobi_eigen(&a, false).unwrap();
        assert_eq!(eig, vec![-5.0, 2.0, 0.5]);
    }

    #[test]
    fn jacobi_known_spectrum() {
        // eigenvalues of [[2,0,0],[0,3,4],[0,4,9]] are 2, 1, 11
        let mut a = Mat::zeros(3);
        a[(0, 0)] = 2.0;
        a[(1, 1)] = 3.0;
        a[(1, 2)] = 4.0;
        a[(2, 1)] = 4.0;
        a[(2, 2)] = 9.0;
        let (eig, vecs) = jacobi_eigen(&a, true).unwrap();
        assert_abs_diff_eq!(eig[0], 11.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig[1], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig[2], 1.0, epsilon = 1e-12);
        // residual || A v - lambda v ||
        let vecs = vecs.unwrap();
        for (k, &lambda) in eig.iter().enumerate() {
            let v: Vec<f64> = (0..3).map(|r| vecs[(r, k)]).collect();
            let mut av = vec![0.0; 3];
            a.matvec(&v, &mut av);
            for r in 0..3 {
                assert_abs_diff_eq!(av[r], lambda * v[r], epsilon = 1e-10);
            }
        }
        // trace consistency
        let sum: f64 = eig.iter().sum();
        assert_relative_eq!(sum, a.trace(), max_relative = 1e-12);
    }

    #[test]
    fn lu_determinant_real() {
        let mut a = Mat::zeros(3);
        let rows = [[2.0, 1.0, 1.0], [4.0, -6.0, 0.0], [-2.0, 7.0, 2.0]];
        for i in 0..3 {
            for j in 0..3 {
                a[(i, j)] = rows[i][j];
            }
        }
        // det = -16
        let d = lu_log_det(&a);
        assert!(!d.singular);
        assert_abs_diff_eq!(d.value().re, -16.0, epsilon = 1e-12);
    }

    #[test]
    fn lu_detects_singularity() {
        let mut a = Mat::zeros(2);
        a[(0, 0)] = 1.0;
        a[(0, 1)] = 2.0;
        a[(1, 0)] = 2.0;
        a[(1, 1)] = 4.0;
        let d = lu_log_det(&a);
        assert!(d.singular);
        assert_eq!(d.value(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn lu_solve_roundtrip() {
        let mut a = Mat::zeros(3);
        let rows = [[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]];
        for i in 0..3 {
            for j in 0..3 {
                a[(i, j)] = rows[i][j];
            }
        }
        let b = [1.0, -2.0, 0.5];
        let x = lu_solve(&a, &b).unwrap();
        let mut back = vec![0.0; 3];
        a.matvec(&x, &mut back);
        for i in 0..3 {
            assert_abs_diff_eq!(back[i], b[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn complex_lu_determinant() {
        let mut a = CMat::zeros(2);
        a[(0, 0)] = Complex64::new(1.0, 1.0);
        a[(0, 1)] = Complex64::new(2.0, 0.0);
        a[(1, 0)] = Complex64::new(0.0, -1.0);
        a[(1, 1)] = Complex64::new(3.0, 0.5);
        // det = (1+i)(3+0.5i) - 2(-i) = 2.5 + 5.5i
        let d = lu_log_det_complex(&a).value();
        assert_abs_diff_eq!(d.re, 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(d.im, 5.5, epsilon = 1e-12);
    }

    #[test]
    fn hermitian_embedding_spectrum() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let mut a = CMat::zeros(2);
        a[(0, 0)] = Complex64::new(2.0, 0.0);
        a[(0, 1)] = Complex64::new(0.0, 1.0);
        a[(1, 0)] = Complex64::new(0.0, -1.0);
        a[(1, 1)] = Complex64::new(2.0, 0.0);
        let eig = hermitian_eigenvalues(&a).unwrap();
        assert_abs_diff_eq!(eig[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig[1], 1.0, epsilon = 1e-12);
    }
}
