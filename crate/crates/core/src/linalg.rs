//! Dense matrix support for the regression fits: row-major storage and a
//! Householder QR least-squares solver.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Matrix {
        Matrix { n_rows, n_cols, data: vec![0.0; n_rows * n_cols] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Matrix {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            assert_eq!(row.len(), n_cols, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix { n_rows, n_cols, data }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    /// x · beta for every row.
    pub fn mul_vec(&self, beta: &[f64]) -> Vec<f64> {
        assert_eq!(beta.len(), self.n_cols);
        (0..self.n_rows)
            .map(|i| dot(self.row(i), beta))
            .collect()
    }

    /// Xᵀ v.
    pub fn transpose_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n_rows);
        let mut out = vec![0.0; self.n_cols];
        for i in 0..self.n_rows {
            let row = self.row(i);
            let vi = v[i];
            for (o, x) in out.iter_mut().zip(row) {
                *o += x * vi;
            }
        }
        out
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n_cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n_cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solution of a least-squares problem `min ||X b - y||`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    /// (XᵀX)⁻¹, assembled from the inverse of the R factor.
    pub xtx_inverse: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    /// R had a (near-)zero diagonal: the named column index is linearly
    /// dependent on earlier ones.
    Singular { column: usize },
    /// Fewer rows than columns.
    Underdetermined,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::Singular { column } => {
                write!(f, "design is rank deficient at column {column}")
            }
            LinalgError::Underdetermined => write!(f, "fewer rows than columns"),
        }
    }
}

impl core::error::Error for LinalgError {}

/// Householder QR least squares.`x` is consumed as scratch space.
///
/// Returns the coefficient vector and (XᵀX)⁻¹ = R⁻¹ R⁻ᵀ so callers can form
/// covariance matrices without a second decomposition.
pub fn qr_least_squares(mut x: Matrix, y: &[f64]) -> Result<LeastSquares, LinalgError> {
    let n = x.n_rows();
    let k = x.n_cols();
    assert_eq!(y.len(), n);
    if n < k {
        return Err(LinalgError::Underdetermined);
    }
    let mut qty: Vec<f64> = y.to_vec();

    // column scale for the singularity test
    let mut max_norm = 0.0f64;
    for j in 0..k {
        let norm = libm::sqrt((0..n).map(|i| x[(i, j)] * x[(i, j)]).sum::<f64>());
        max_norm = max_norm.max(norm);
    }
    let tol = 1e-12 * max_norm.max(1.0);

    for j in 0..k {
        // form the Householder reflector for column j below the diagonal
        let mut alpha = 0.0;
        for i in j..n {
            alpha += x[(i, j)] * x[(i, j)];
        }
        alpha = libm::sqrt(alpha);
        if alpha <= tol {
            return Err(LinalgError::Singular { column: j });
        }
        if x[(j, j)] > 0.0 {
            alpha = -alpha;
        }
        let mut v = vec![0.0; n - j];
        v[0] = x[(j, j)] - alpha;
        for i in (j + 1)..n {
            v[i - j] = x[(i, j)];
        }
        let vtv = dot(&v, &v);
        if vtv <= 0.0 {
            return Err(LinalgError::Singular { column: j });
        }
        x[(j, j)] = alpha;
        for i in (j + 1)..n {
            x[(i, j)] = 0.0;
        }
        // apply the reflector to the remaining columns and to y
        for col in (j + 1)..k {
            let mut s = 0.0;
            for i in j..n {
                s += v[i - j] * x[(i, col)];
            }
            let f = 2.0 * s / vtv;
            for i in j..n {
                x[(i, col)] -= f * v[i - j];
            }
        }
        let mut s = 0.0;
        for i in j..n {
            s += v[i - j] * qty[i];
        }
        let f = 2.0 * s / vtv;
        for i in j..n {
            qty[i] -= f * v[i - j];
        }
    }

    // back substitution: R b = Qᵀy
    let mut beta = vec![0.0; k];
    for j in (0..k).rev() {
        let mut s = qty[j];
        for col in (j + 1)..k {
            s -= x[(j, col)] * beta[col];
        }
        beta[j] = s / x[(j, j)];
    }

    // R⁻¹ by back substitution on the identity, then (XᵀX)⁻¹ = R⁻¹ R⁻ᵀ
    let mut r_inv = Matrix::zeros(k, k);
    for col in 0..k {
        for j in (0..=col).rev() {
            let mut s = if j == col { 1.0 } else { 0.0 };
            for m in (j + 1)..=col {
                s -= x[(j, m)] * r_inv[(m, col)];
            }
            r_inv[(j, col)] = s / x[(j, j)];
        }
    }
    let mut xtx_inverse = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let mut s = 0.0;
            for m in i.max(j)..k {
                s += r_inv[(i, m)] * r_inv[(j, m)];
            }
            xtx_inverse[(i, j)] = s;
        }
    }

    Ok(LeastSquares { coefficients: beta, xtx_inverse })
}

/// Inverse of a symmetric positive-definite matrix via Cholesky.
/// Used for covariance matrices from the observed information.
pub fn invert_spd(m: &Matrix) -> Result<Matrix, LinalgError> {
    let k = m.n_rows();
    assert_eq!(k, m.n_cols());
    // lower-triangular Cholesky factor
    let mut l = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..=i {
            let mut s = m[(i, j)];
            for p in 0..j {
                s -= l[(i, p)] * l[(j, p)];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(LinalgError::Singular { column: i });
                }
                l[(i, i)] = libm::sqrt(s);
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    // forward substitution: L Z = I, then Lᵀ X = Z
    let mut inv = Matrix::zeros(k, k);
    for col in 0..k {
        let mut z = vec![0.0; k];
        for i in 0..k {
            let mut s = if i == col { 1.0 } else { 0.0 };
            for p in 0..i {
                s -= l[(i, p)] * z[p];
            }
            z[i] = s / l[(i, i)];
        }
        for i in (0..k).rev() {
            let mut s = z[i];
            for p in (i + 1)..k {
                s -= l[(p, i)] * inv[(p, col)];
            }
            inv[(i, col)] = s / l[(i, i)];
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spd_inverse_matches_hand_inverse() {
        let mut m = Matrix::zeros(2, 2);
        m[(0, 0)] = 4.0;
        m[(0, 1)] = 1.0;
        m[(1, 0)] = 1.0;
        m[(1, 1)] = 3.0;
        let inv = invert_spd(&m).unwrap();
        let det = 11.0;
        assert!((inv[(0, 0)] - 3.0 / det).abs() < 1e-12);
        assert!((inv[(0, 1)] + 1.0 / det).abs() < 1e-12);
        assert!((inv[(1, 1)] - 4.0 / det).abs() < 1e-12);
    }

    #[test]
    fn solves_exact_system() {
        // y = 1 + 2 x
        let x = Matrix::from_rows(&[
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![1.0, 2.0],
            vec![1.0, 3.0],
        ]);
        let y = [1.0, 3.0, 5.0, 7.0];
        let ls = qr_least_squares(x, &y).unwrap();
        assert!((ls.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((ls.coefficients[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn xtx_inverse_matches_direct_inverse() {
        let x = Matrix::from_rows(&[
            vec![1.0, 0.5],
            vec![1.0, -1.0],
            vec![1.0, 2.0],
        ]);
        // XᵀX = [[3, 1.5], [1.5, 5.25]]
        let ls = qr_least_squares(x, &[0.0, 0.0, 0.0]).unwrap();
        let det = 3.0 * 5.25 - 1.5 * 1.5;
        let expect = [[5.25 / det, -1.5 / det], [-1.5 / det, 3.0 / det]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((ls.xtx_inverse[(i, j)] - expect[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn reports_dependent_column() {
        let x = Matrix::from_rows(&[
            vec![1.0, 2.0, 4.0],
            vec![1.0, 3.0, 6.0],
            vec![1.0, 4.0, 8.0],
            vec![1.0, 5.0, 10.0],
        ]);
        match qr_least_squares(x, &[0.0; 4]) {
            Err(LinalgError::Singular { column }) => assert_eq!(column, 2),
            other => panic!("expected singular error, got {other:?}"),
        }
    }
}
