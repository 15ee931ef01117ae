//! One-sided (Hestenes) Jacobi SVD.
//!
//! Column pairs of a tall working copy are rotated until every pair is
//! orthogonal to within `m * f64::EPSILON` relative to the product of their
//! norms. The relative test keeps small singular values accurate, which is
//! what the minimum modulus depends on. Wide inputs are handled through the
//! transpose.

use super::{dot, norm, Matrix, Vector};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Entries below this magnitude are skipped when fixing column signs.
const SIGN_EPS: f64 = 1e-12;

/// Thin singular value decomposition `T = U diag(sigma) V^T`, with
/// `k = min(rows, cols)` columns in `U` (rows x k) and `V` (cols x k).
#[derive(Debug, Clone)]
pub struct Svd {
    rows: usize,
    cols: usize,
    left: Matrix,
    singular_values: Vec<f64>,
    right: Matrix,
}

impl Svd {
    /// `U`, rows x k, orthonormal columns.
    pub fn left(&self) -> &Matrix {
        &self.left
    }

    /// `V`, cols x k, orthonormal columns.
    pub fn right(&self) -> &Matrix {
        &self.right
    }

    /// Descending, nonnegative.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn left_vector(&self, i: usize) -> Vector {
        self.left.column(i)
    }

    pub fn right_vector(&self, i: usize) -> Vector {
        self.right.column(i)
    }

    pub fn operator_norm(&self) -> f64 {
        self.singular_values[0]
    }

    /// Smallest singular value over the whole domain: zero when the map is
    /// wide and therefore has a kernel.
    pub fn min_modulus(&self) -> f64 {
        if self.cols > self.rows {
            0.0
        } else {
            *self.singular_values.last().expect("k >= 1")
        }
    }

    /// `U diag(sigma) V^T`.
    pub fn reconstruct(&self) -> Matrix {
        let mut data = vec![0.0; self.rows * self.cols];
        for (k, s) in self.singular_values.iter().enumerate() {
            for i in 0..self.rows {
                let us = self.left.get(i, k) * s;
                for j in 0..self.cols {
                    data[i * self.cols + j] += us * self.right.get(j, k);
                }
            }
        }
        Matrix::from_raw(self.rows, self.cols, data)
    }
}

pub fn svd(t: &Matrix) -> Result<Svd> {
    if t.data().iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let (m, n) = (t.rows(), t.cols());
    let (mut left, sigma, mut right) = if m >= n {
        tall_svd(t)
    } else {
        let (u, s, v) = tall_svd(&t.transpose());
        (v, s, u)
    };

    // First significant entry of each right vector is made nonnegative.
    for (u, v) in left.iter_mut().zip(right.iter_mut()) {
        if let Some(first) = v.iter().find(|x| x.abs() > SIGN_EPS) {
            if *first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
                u.iter_mut().for_each(|x| *x = -*x);
            }
        }
    }

    Ok(Svd {
        rows: m,
        cols: n,
        left: columns_to_matrix(&left, m),
        singular_values: sigma,
        right: columns_to_matrix(&right, n),
    })
}

/// Largest singular value, `sup ||Tx||` over unit `x`.
pub fn operator_norm(t: &Matrix) -> Result<f64> {
    Ok(svd(t)?.operator_norm())
}

/// `[T]`: the largest `m >= 0` with `||Tx|| >= m ||x||` for every `x`.
pub fn min_modulus(t: &Matrix) -> Result<f64> {
    Ok(svd(t)?.min_modulus())
}

/// Orthonormal basis `x_1..x_n` of the domain whose images are pairwise
/// orthogonal, ordered by ascending `||T x_i||`: the first vector attains
/// `[T]`, the last attains `||T||`.
pub fn singular_basis(t: &Matrix) -> Result<Vec<Vector>> {
    if t.cols() > t.rows() {
        return Err(Error::ShapeError(format!(
            "singular_basis needs rows >= cols, got {}x{}",
            t.rows(),
            t.cols()
        )));
    }
    let d = svd(t)?;
    let (op, min) = (d.operator_norm(), d.min_modulus());
    if min <= crate::INJECTIVE_REL_TOL * op {
        return Err(Error::NotInjective {
            min_mod: min,
            op_norm: op,
        });
    }
    Ok((0..t.cols()).rev().map(|k| d.right_vector(k)).collect())
}

type Columns = Vec<Vec<f64>>;

/// SVD of a matrix with rows >= cols, returned as column lists sorted by
/// descending singular value.
fn tall_svd(t: &Matrix) -> (Columns, Vec<f64>, Columns) {
    let (m, n) = (t.rows(), t.cols());
    debug_assert!(m >= n);
    let mut work: Columns = (0..n).map(|j| t.column(j).into_vec()).collect();
    let mut v: Columns = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();

    let tol = (m as f64) * f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&work[p], &work[p]);
                let beta = dot(&work[q], &work[q]);
                let gamma = dot(&work[p], &work[q]);
                if gamma == 0.0 || gamma.abs() <= tol * (alpha.sqrt() * beta.sqrt()) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + 1.0_f64.hypot(zeta));
                let c = 1.0 / 1.0_f64.hypot(t);
                let s = c * t;
                rotate(&mut work, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = work.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));

    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let right: Columns = order.iter().map(|&j| v[j].clone()).collect();

    // Left vectors: normalized working columns, re-orthogonalized, with
    // null directions filled in from the standard basis.
    let mut left: Columns = Vec::with_capacity(n);
    for (&j, &s) in order.iter().zip(&sigma) {
        let candidate = if s > 0.0 {
            let mut u: Vec<f64> = work[j].iter().map(|x| x / s).collect();
            orthogonalize(&mut u, &left);
            let r = norm(&u);
            (r > 0.5).then(|| u.iter().map(|x| x / r).collect())
        } else {
            None
        };
        let u = candidate.unwrap_or_else(|| complete_basis(&left, m));
        left.push(u);
    }
    (left, sigma, right)
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    let (a, b) = (&mut lo[p], &mut hi[0]);
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Two passes of modified Gram-Schmidt against `basis`.
fn orthogonalize(u: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let proj = dot(u, b);
            u.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
        }
    }
}

/// Unit vector orthogonal to `basis`, taken from the standard basis vector
/// with the largest residual.
fn complete_basis(basis: &[Vec<f64>], dim: usize) -> Vec<f64> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for k in 0..dim {
        let mut e = vec![0.0; dim];
        e[k] = 1.0;
        orthogonalize(&mut e, basis);
        let r = norm(&e);
        if best.as_ref().is_none_or(|(br, _)| r > *br) {
            best = Some((r, e));
        }
    }
    let (r, e) = best.expect("dim >= 1");
    e.into_iter().map(|x| x / r).collect()
}

fn columns_to_matrix(cols: &[Vec<f64>], rows: usize) -> Matrix {
    let k = cols.len();
    let mut data = vec![0.0; rows * k];
    for (j, c) in cols.iter().enumerate() {
        for (i, x) in c.iter().enumerate() {
            data[i * k + j] = *x;
        }
    }
    Matrix::from_raw(rows, k, data)
}
