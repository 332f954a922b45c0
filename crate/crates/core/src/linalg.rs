//! Dense real matrices and the cyclic Jacobi eigensolver.
//!
//! The solver is a plain cyclic-by-rows Jacobi iteration. It is slower than
//! tridiagonalization followed by QL, but it is deterministic, keeps the
//! accumulated eigenvector matrix orthogonal to machine precision, and has no
//! failure modes on symmetric input, which is what the verification suites
//! lean on.

use crate::error::{Error, Result};
use crate::tol;

/// Row-major dense matrix of f64.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Mat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0.0 {
                    continue;
                }
                let lhs_row = i * rhs.cols;
                let rhs_row = l * rhs.cols;
                for j in 0..rhs.cols {
                    out.data[lhs_row + j] += a * rhs.data[rhs_row + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn add_scaled(&mut self, rhs: &Mat, s: f64) {
        assert_eq!(self.data.len(), rhs.data.len());
        for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a += s * b;
        }
    }

    pub fn sub(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.rows, rhs.rows);
        assert_eq!(self.cols, rhs.cols);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a -= b;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Column `j` as an owned vector.
    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix.
///
/// Column `j` of `vectors` is the eigenvector for `values[j]`. Input is gated
/// on symmetry; the iteration runs cyclic sweeps until the off-diagonal
/// Frobenius norm falls under `tol::JACOBI_OFFDIAG` relative to the matrix
/// norm.
pub fn symmetric_eigen(m: &Mat) -> Result<(Vec<f64>, Mat)> {
    assert_eq!(m.rows(), m.cols(), "eigen input must be square");
    let asym = m.max_asymmetry();
    if asym > tol::SYMMETRY_GATE {
        return Err(Error::NotSymmetric { tol: tol::SYMMETRY_GATE, found: asym });
    }
    let n = m.rows();
    if n == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }

    let mut a = m.clone();
    // Work on the symmetrized copy; asymmetry is below the gate.
    for i in 0..n {
        for j in (i + 1)..n {
            let s = 0.5 * (a.get(i, j) + a.get(j, i));
            a.set(i, j, s);
            a.set(j, i, s);
        }
    }
    let mut v = Mat::identity(n);
    let norm = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let target = tol::JACOBI_OFFDIAG * norm;

    let off = |a: &Mat| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a.get(i, j) * a.get(i, j);
            }
        }
        s.sqrt()
    };

    const MAX_SWEEPS: usize = 64;
    let mut sweeps = 0;
    while off(&a) > target {
        if sweeps >= MAX_SWEEPS {
            return Err(Error::EigenNoConvergence { sweeps, offdiag: off(&a) });
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= target / (n as f64) * 1e-3 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = 0.5 * (aqq - app) / apq;
                // tan of the rotation angle, smaller root for stability
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for i in 0..n {
                    if i != p && i != q {
                        let aip = a.get(i, p);
                        let aiq = a.get(i, q);
                        let nip = aip - s * (aiq + tau * aip);
                        let niq = aiq + s * (aip - tau * aiq);
                        a.set(i, p, nip);
                        a.set(p, i, nip);
                        a.set(i, q, niq);
                        a.set(q, i, niq);
                    }
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip - s * (viq + tau * vip));
                    v.set(i, q, viq + s * (vip - tau * viq));
                }
            }
        }
        sweeps += 1;
    }

    let mut values: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
    values.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut vectors = Mat::zeros(n, n);
    for (new_j, &old_j) in order.iter().enumerate() {
        // canonical sign: largest-magnitude entry positive
        let colv = v.col(old_j);
        let mut lead = 0usize;
        for i in 1..n {
            if colv[i].abs() > colv[lead].abs() {
                lead = i;
            }
        }
        let sign = if colv[lead] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            vectors.set(i, new_j, sign * colv[i]);
        }
    }
    Ok((values, vectors))
}

/// Solve a small dense linear system by Gaussian elimination with partial
/// pivoting; used for the 4x4 coordinate-bound maps in lattice counting.
pub fn solve_dense(a: &Mat, rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = a.rows();
    assert_eq!(a.cols(), n);
    let m = rhs.len();
    let mut aug = Mat::zeros(n, n + m);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, a.get(i, j));
        }
        for (jm, r) in rhs.iter().enumerate() {
            aug.set(i, n + jm, r[i]);
        }
    }
    for col in 0..n {
        let mut piv = col;
        for i in (col + 1)..n {
            if aug.get(i, col).abs() > aug.get(piv, col).abs() {
                piv = i;
            }
        }
        if aug.get(piv, col).abs() < 1e-300 {
            return Err(Error::DegenerateInput("singular matrix in solve_dense"));
        }
        if piv != col {
            for j in 0..(n + m) {
                let t = aug.get(col, j);
                aug.set(col, j, aug.get(piv, j));
                aug.set(piv, j, t);
            }
        }
        let d = aug.get(col, col);
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = aug.get(i, col) / d;
            if f == 0.0 {
                continue;
            }
            for j in col..(n + m) {
                let v = aug.get(i, j) - f * aug.get(col, j);
                aug.set(i, j, v);
            }
        }
    }
    let mut out = vec![vec![0.0; n]; m];
    for (jm, o) in out.iter_mut().enumerate() {
        for i in 0..n {
            o[i] = aug.get(i, n + jm) / aug.get(i, i);
        }
    }
    Ok(out)
}
