use super::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;
const ORTHOGONALITY_TOL: f64 = 1e-15;

/// Thin singular value decomposition `m = U·diag(s)·V†`.
///
/// For an `r×c` input with `k = min(r, c)`, `u` is `r×k`, `v` is `c×k`, both
/// with orthonormal columns (left vectors belonging to zero singular values
/// are completed to an orthonormal set), and `singular_values` is descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let us = ComplexMatrix::from_fn(self.u.rows(), self.u.cols(), |i, j| {
            self.u[(i, j)] * self.singular_values[j]
        });
        us.matmul(&self.v.adjoint())
    }
}

/// One-sided (Hestenes) Jacobi SVD for complex matrices.
pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    if m.rows() >= m.cols() {
        tall_svd(m)
    } else {
        let Svd {
            u,
            singular_values,
            v,
        } = tall_svd(&m.adjoint())?;
        Ok(Svd {
            u: v,
            singular_values,
            v: u,
        })
    }
}

fn tall_svd(m: &ComplexMatrix) -> Result<Svd> {
    let (rows, cols) = m.shape();
    // Work column-major: each inner Vec is one column.
    let mut a: Vec<Vec<C64>> = (0..cols).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..cols)
        .map(|j| {
            let mut e = vec![ZERO; cols];
            e[j] = ONE;
            e
        })
        .collect();

    let scale = m.frobenius_norm();
    if scale == 0.0 {
        return Ok(Svd {
            u: complete_orthonormal(rows, vec![vec![ZERO; rows]; cols]),
            singular_values: vec![0.0; cols],
            v: columns_to_matrix(&v, cols),
        });
    }

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = norm_sqr(&a[p]);
                let beta = norm_sqr(&a[q]);
                let gamma = dot(&a[p], &a[q]);
                let g = gamma.norm();
                if g <= ORTHOGONALITY_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, p, q, phase, c, s);
                rotate(&mut v, p, q, phase, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            routine: "Jacobi SVD",
            iterations: MAX_SWEEPS,
        });
    }

    let mut order: Vec<(usize, f64)> = a.iter().map(|col| norm_sqr(col).sqrt()).enumerate().collect();
    order.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));

    let singular_values = order.iter().map(|&(_, sigma)| sigma).collect();
    let u_cols = order.iter().map(|&(j, _)| a[j].clone()).collect();
    let v_sorted: Vec<_> = order.iter().map(|&(j, _)| v[j].clone()).collect();

    Ok(Svd {
        u: complete_orthonormal(rows, u_cols),
        singular_values,
        v: columns_to_matrix(&v_sorted, cols),
    })
}

/// Applies `[x_p, x_q] ← [x_p, x_q]·diag(1, e^{-iφ})·[[c, s], [−s, c]]`.
fn rotate(cols: &mut [Vec<C64>], p: usize, q: usize, phase: C64, c: f64, s: f64) {
    let phase_conj = phase.conj();
    let (left, right) = cols.split_at_mut(q);
    let xp = &mut left[p];
    let xq = &mut right[0];
    for (zp, zq) in xp.iter_mut().zip(xq.iter_mut()) {
        let bp = *zp;
        let bq = *zq * phase_conj;
        *zp = bp * c - bq * s;
        *zq = bp * s + bq * c;
    }
}

fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn norm_sqr(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

fn columns_to_matrix(cols: &[Vec<C64>], rows: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

/// Orthonormalizes the columns in order. A column with nothing left after
/// projection (a zero singular value) is replaced by a unit vector orthogonal
/// to everything before it.
fn complete_orthonormal(rows: usize, cols: Vec<Vec<C64>>) -> ComplexMatrix {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(cols.len());
    let mut candidate = 0;
    for col in cols {
        if let Some(u) = orthonormalize(col, &basis) {
            basis.push(u);
            continue;
        }
        loop {
            assert!(candidate < rows, "ran out of completion candidates");
            let mut e = vec![ZERO; rows];
            e[candidate] = ONE;
            candidate += 1;
            if let Some(u) = orthonormalize(e, &basis) {
                basis.push(u);
                break;
            }
        }
    }
    columns_to_matrix(&basis, rows)
}

fn orthonormalize(mut x: Vec<C64>, basis: &[Vec<C64>]) -> Option<Vec<C64>> {
    let original = norm_sqr(&x).sqrt();
    if original < 1e-280 {
        return None;
    }
    for _ in 0..2 {
        for b in basis {
            let proj = dot(b, &x);
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi -= proj * bi;
            }
        }
    }
    let n = norm_sqr(&x).sqrt();
    // A unit vector that loses almost everything to projection lies in the span already.
    if n < 1e-280 || (original == 1.0 && n < 1e-6) {
        return None;
    }
    Some(x.into_iter().map(|z| z / n).collect())
}
