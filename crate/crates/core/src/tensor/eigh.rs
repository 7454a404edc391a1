use super::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const HERMITIAN_TOL: f64 = 1e-10;

/// Eigendecomposition `h = V·diag(λ)·V†` of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Eigh {
    /// `V·diag(f(λ))·V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let weights: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (0..n).map(|k| v[(i, k)] * weights[k] * v[(j, k)].conj()).sum();
            }
        }
        out
    }
}

/// Cyclic complex Jacobi eigenvalue algorithm.
pub fn eigh(h: &ComplexMatrix) -> Result<Eigh> {
    let dev = h
        .hermiticity_deviation()
        .ok_or_else(|| Error::DimensionMismatch(format!("eigh needs a square matrix, got {:?}", h.shape())))?;
    if dev > HERMITIAN_TOL * h.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let n = h.rows();
    // Symmetrize so the rotations see an exactly Hermitian matrix.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| 0.5 * (h[(i, j)] + h[(j, i)].conj()));
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    let mut converged = scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g <= 1e-18 * scale {
                    continue;
                }
                let phase = apq / g;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J restricted to (p, q) is [[c, s], [−s·e^{-iφ}, c·e^{-iφ}]].
                let j = [
                    [C64::new(c, 0.0), C64::new(s, 0.0)],
                    [-phase.conj() * s, phase.conj() * c],
                ];
                rotate_cols(&mut a, p, q, &j);
                rotate_rows_adjoint(&mut a, p, q, &j);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                rotate_cols(&mut v, p, q, &j);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            routine: "Hermitian Jacobi eigensolver",
            iterations: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    Ok(Eigh {
        eigenvalues: order.iter().map(|&k| a[(k, k)].re).collect(),
        eigenvectors: ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]),
    })
}

/// `m ← m·J` on columns p, q.
fn rotate_cols(m: &mut ComplexMatrix, p: usize, q: usize, j: &[[C64; 2]; 2]) {
    for r in 0..m.rows() {
        let xp = m[(r, p)];
        let xq = m[(r, q)];
        m[(r, p)] = xp * j[0][0] + xq * j[1][0];
        m[(r, q)] = xp * j[0][1] + xq * j[1][1];
    }
}

/// `m ← J†·m` on rows p, q.
fn rotate_rows_adjoint(m: &mut ComplexMatrix, p: usize, q: usize, j: &[[C64; 2]; 2]) {
    for c in 0..m.cols() {
        let xp = m[(p, c)];
        let xq = m[(q, c)];
        m[(p, c)] = j[0][0].conj() * xp + j[1][0].conj() * xq;
        m[(q, c)] = j[0][1].conj() * xp + j[1][1].conj() * xq;
    }
}

/// exp(−i·h) for Hermitian `h`, through its eigendecomposition.
pub fn expm_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = eigh(h)?;
    Ok(e.map_spectrum(|l| C64::new(0.0, -l).exp()))
}
