//! Local site updates.
//!
//! With every other site fixed, the overlap is linear in the free site:
//! `Re Tr[T†·U_seq] = Re Tr[E†·U]`. The Procrustes update maximizes it in
//! closed form; the Pauli-coupling update climbs it in the coordinates
//! `U = exp(−i Σ h_{j₁j₂} σ_{j₁} ⊗ τ_{j₂})`.

use serde::{Deserialize, Serialize};

use super::{environment, real_overlap, SequentialCircuit};
use crate::error::{Error, Result};
use crate::gates::{hermitian_basis, pauli};
use crate::tensor::{eigh, expm_hermitian, kron, svd, ComplexMatrix, Eigh, C64};

/// Central-difference step for coupling gradients.
pub const GRADIENT_STEP: f64 = 1e-6;

/// Unitary `U` maximizing `Re Tr[env†·U]`: `X·Y†` from `env = X·S·Y†`.
pub fn local_update_procrustes(env: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !env.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "environment must be square, got {:?}",
            env.shape()
        )));
    }
    if env.max_abs() == 0.0 {
        return Err(Error::ZeroEnvironment);
    }
    let d = svd(env)?;
    Ok(d.u.matmul(&d.v.adjoint()))
}

/// Real couplings `h[j₁][j₂]` of a site generator `Σ h σ_{j₁} ⊗ τ_{j₂}`,
/// where `τ` runs over `{𝟙} ∪ su_generators(D)`. For `D = 2` this is the
/// 4×4 Pauli coupling matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix {
    ancilla_dim: usize,
    values: Vec<f64>,
}

impl CouplingMatrix {
    pub fn zeros(ancilla_dim: usize) -> Result<Self> {
        check_pauli_dim(ancilla_dim)?;
        Ok(Self {
            ancilla_dim,
            values: vec![0.0; 4 * ancilla_dim * ancilla_dim],
        })
    }

    pub fn from_values(ancilla_dim: usize, values: Vec<f64>) -> Result<Self> {
        check_pauli_dim(ancilla_dim)?;
        if values.len() != 4 * ancilla_dim * ancilla_dim {
            return Err(Error::DimensionMismatch(format!(
                "coupling matrix for D = {ancilla_dim} has {} entries, got {}",
                4 * ancilla_dim * ancilla_dim,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("coupling entries must be finite".into()));
        }
        Ok(Self { ancilla_dim, values })
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    /// Number of ancilla basis operators (columns).
    pub fn cols(&self) -> usize {
        self.ancilla_dim * self.ancilla_dim
    }

    pub fn get(&self, j1: usize, j2: usize) -> f64 {
        self.values[j1 * self.cols() + j2]
    }

    pub fn set(&mut self, j1: usize, j2: usize, value: f64) {
        let cols = self.cols();
        self.values[j1 * cols + j2] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn check_pauli_dim(d: usize) -> Result<()> {
    if d == 2 || d == 4 {
        Ok(())
    } else {
        Err(Error::UnsupportedAncillaDim(d))
    }
}

/// The Hermitian basis `σ_{j₁} ⊗ τ_{j₂}` in row-major `(j₁, j₂)` order.
fn site_basis(ancilla_dim: usize) -> Result<Vec<ComplexMatrix>> {
    check_pauli_dim(ancilla_dim)?;
    let anc = hermitian_basis(ancilla_dim)?;
    Ok((0..4)
        .flat_map(|j1| {
            let s = pauli(j1);
            anc.iter().map(move |t| kron(&s, t)).collect::<Vec<_>>()
        })
        .collect())
}

fn generator(h: &CouplingMatrix, basis: &[ComplexMatrix]) -> ComplexMatrix {
    let n = 2 * h.ancilla_dim;
    let mut g = ComplexMatrix::zeros(n, n);
    for (&coeff, b) in h.values.iter().zip(basis) {
        if coeff != 0.0 {
            for (x, y) in g.as_mut_slice().iter_mut().zip(b.as_slice()) {
                *x += y * coeff;
            }
        }
    }
    g
}

/// `exp(−i Σ h_{j₁j₂} σ_{j₁} ⊗ τ_{j₂})`.
pub fn coupling_to_unitary(h: &CouplingMatrix) -> Result<ComplexMatrix> {
    let basis = site_basis(h.ancilla_dim)?;
    expm_hermitian(&generator(h, &basis))
}

/// Couplings `h` with `coupling_to_unitary(h) = u`, taking the principal
/// logarithm (generator eigenvalues in (−π, π]).
pub fn coupling_from_unitary(u: &ComplexMatrix, ancilla_dim: usize) -> Result<CouplingMatrix> {
    check_pauli_dim(ancilla_dim)?;
    u.ensure_square(2 * ancilla_dim, "site unitary")?;
    u.ensure_unitary(1e-8)?;
    let h_mat = hermitian_log(u)?;
    let basis = site_basis(ancilla_dim)?;
    let values = basis
        .iter()
        .map(|b| {
            let num = crate::tensor::hs_overlap(b, &h_mat).expect("same shape").re;
            num / b.frobenius_norm_sqr()
        })
        .collect();
    CouplingMatrix::from_values(ancilla_dim, values)
}

/// Hermitian `H` with `exp(−iH) = u` for unitary `u`.
///
/// The Hermitian and anti-Hermitian parts of a unitary commute; a generic
/// real combination of them has the eigenvectors of `u`.
fn hermitian_log(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let herm = (u + &u.adjoint()).scale_real(0.5);
    let anti = (u - &u.adjoint()).scale(C64::new(0.0, -0.5));
    const MIXES: [f64; 3] = [0.754_877_666_246_692_7, 1.324_717_957_244_746, -0.569_840_290_998_053_3];
    for mix in MIXES {
        let combo = &herm + &anti.scale_real(mix);
        let e = eigh(&combo)?;
        let v = &e.eigenvectors;
        let n = u.rows();
        let uv = u.matmul(v);
        let phases: Vec<f64> = (0..n)
            .map(|k| {
                let lambda: C64 = (0..n).map(|i| v[(i, k)].conj() * uv[(i, k)]).sum();
                -lambda.arg()
            })
            .collect();
        let spectral = Eigh {
            eigenvalues: phases,
            eigenvectors: e.eigenvectors,
        };
        let h = spectral.map_spectrum(|l| C64::new(l, 0.0));
        if (&expm_hermitian(&h)? - u).frobenius_norm() < 1e-9 {
            return Ok(h);
        }
    }
    Err(Error::NoConvergence {
        routine: "unitary logarithm",
        iterations: MIXES.len(),
    })
}

/// Overlap-per-dimension objective `Re Tr[env†·U(h)] / norm`.
struct CouplingObjective<'a> {
    env: &'a ComplexMatrix,
    basis: Vec<ComplexMatrix>,
    norm: f64,
}

impl CouplingObjective<'_> {
    fn value(&self, h: &CouplingMatrix) -> Result<f64> {
        let u = expm_hermitian(&generator(h, &self.basis))?;
        Ok(real_overlap(self.env, &u) / self.norm)
    }

    fn gradient(&self, h: &CouplingMatrix) -> Result<Vec<f64>> {
        let mut probe = h.clone();
        let mut grad = Vec::with_capacity(h.values.len());
        for idx in 0..h.values.len() {
            let x = h.values[idx];
            probe.values[idx] = x + GRADIENT_STEP;
            let plus = self.value(&probe)?;
            probe.values[idx] = x - GRADIENT_STEP;
            let minus = self.value(&probe)?;
            probe.values[idx] = x;
            grad.push((plus - minus) / (2.0 * GRADIENT_STEP));
        }
        Ok(grad)
    }
}

/// Central-difference gradient of `Re Tr[env†·U(h)] / norm` over the couplings.
pub fn coupling_gradient(env: &ComplexMatrix, h: &CouplingMatrix, norm: f64) -> Result<Vec<f64>> {
    let objective = CouplingObjective {
        env,
        basis: site_basis(h.ancilla_dim)?,
        norm,
    };
    objective.gradient(h)
}

/// Gradient ascent on `Re Tr[env†·U(h)] / norm` with an adaptive step.
///
/// A step is taken only when it raises the objective, so the returned
/// couplings never score below the starting ones.
pub fn pauli_gradient_ascent(
    env: &ComplexMatrix,
    h: &CouplingMatrix,
    norm: f64,
    steps: usize,
    rate: f64,
) -> Result<(ComplexMatrix, CouplingMatrix)> {
    env.ensure_square(2 * h.ancilla_dim, "environment")?;
    let objective = CouplingObjective {
        env,
        basis: site_basis(h.ancilla_dim)?,
        norm,
    };
    let mut current = h.clone();
    let mut value = objective.value(&current)?;
    let mut rate = rate;
    for _ in 0..steps {
        let grad = objective.gradient(&current)?;
        if grad.iter().all(|g| g.abs() < 1e-13) {
            break;
        }
        loop {
            let mut trial = current.clone();
            for (x, g) in trial.values.iter_mut().zip(&grad) {
                *x += rate * g;
            }
            let trial_value = objective.value(&trial)?;
            if trial_value > value {
                current = trial;
                value = trial_value;
                rate *= 1.5;
                break;
            }
            rate *= 0.5;
            if rate < 1e-12 {
                break;
            }
        }
        if rate < 1e-12 {
            break;
        }
    }
    let u = expm_hermitian(&generator(&current, &objective.basis))?;
    Ok((u, current))
}

/// Gradient-ascent update of one site in the Pauli-coupling coordinates,
/// starting from `h`. The objective is the circuit fidelity
/// `Re Tr[target†·U_seq] / (2^N·D)` with the other sites fixed.
pub fn local_update_pauli_gradient(
    c: &SequentialCircuit,
    target: &ComplexMatrix,
    site: usize,
    h: &CouplingMatrix,
    steps: usize,
    rate: f64,
) -> Result<(ComplexMatrix, CouplingMatrix)> {
    check_pauli_dim(c.ancilla_dim())?;
    if h.ancilla_dim != c.ancilla_dim() {
        return Err(Error::DimensionMismatch(format!(
            "couplings for D = {} on a D = {} circuit",
            h.ancilla_dim,
            c.ancilla_dim()
        )));
    }
    let env = environment(c, target, site)?;
    pauli_gradient_ascent(&env, h, c.global_dim() as f64, steps, rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_unitary, random_matrix, seeded_rng};
    use crate::vmpo::{seq_to_global, Schedule};

    #[test]
    fn procrustes_returns_unitary_environment() {
        let mut rng = seeded_rng(81);
        let w = haar_unitary(4, &mut rng);
        let u = local_update_procrustes(&w).unwrap();
        assert!((&u - &w).max_abs() < 1e-12);
    }

    #[test]
    fn procrustes_of_positive_diagonal_is_identity() {
        let env = ComplexMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, 1.0]).unwrap();
        let u = local_update_procrustes(&env).unwrap();
        assert!((&u - &ComplexMatrix::identity(2)).max_abs() < 1e-14);
    }

    #[test]
    fn procrustes_beats_random_unitaries() {
        let mut rng = seeded_rng(82);
        let env = random_matrix(4, 4, &mut rng);
        let u = local_update_procrustes(&env).unwrap();
        assert!(u.unitarity_deviation().unwrap() <= 1e-10);
        let best = real_overlap(&env, &u);
        let nuclear: f64 = svd(&env).unwrap().singular_values.iter().sum();
        assert!((best - nuclear).abs() < 1e-12);
        for _ in 0..10_000 {
            let trial = haar_unitary(4, &mut rng);
            assert!(real_overlap(&env, &trial) <= best + 1e-12);
        }
    }

    #[test]
    fn procrustes_rank_deficient_environment_is_still_unitary() {
        let mut rng = seeded_rng(83);
        let a = random_matrix(4, 1, &mut rng);
        let b = random_matrix(1, 4, &mut rng);
        let u = local_update_procrustes(&a.matmul(&b)).unwrap();
        assert!(u.is_unitary(1e-10));
    }

    #[test]
    fn procrustes_rejects_zero() {
        assert_eq!(
            local_update_procrustes(&ComplexMatrix::zeros(4, 4)),
            Err(Error::ZeroEnvironment)
        );
    }

    #[test]
    fn zero_coupling_is_identity() {
        for d in [2, 4] {
            let u = coupling_to_unitary(&CouplingMatrix::zeros(d).unwrap()).unwrap();
            assert_eq!(u, ComplexMatrix::identity(2 * d));
        }
    }

    #[test]
    fn unsupported_ancilla_dims() {
        assert_eq!(CouplingMatrix::zeros(3), Err(Error::UnsupportedAncillaDim(3)));
        let c = SequentialCircuit::identity(2, 3, 1, Schedule::Alternating).unwrap();
        let h = CouplingMatrix::zeros(2).unwrap();
        assert_eq!(
            local_update_pauli_gradient(&c, &ComplexMatrix::identity(12), 0, &h, 1, 0.1).unwrap_err(),
            Error::UnsupportedAncillaDim(3)
        );
    }

    #[test]
    fn coupling_roundtrip() {
        let mut rng = seeded_rng(84);
        for d in [2, 4] {
            let u = haar_unitary(2 * d, &mut rng);
            let h = coupling_from_unitary(&u, d).unwrap();
            let back = coupling_to_unitary(&h).unwrap();
            assert!((&back - &u).frobenius_norm() < 1e-9, "D = {d}");
        }
    }

    #[test]
    fn recovers_single_xx_coupling() {
        let mut h_true = CouplingMatrix::zeros(2).unwrap();
        h_true.set(1, 1, 0.3);
        let w = coupling_to_unitary(&h_true).unwrap();
        let mut c = SequentialCircuit::identity(2, 2, 1, Schedule::Alternating).unwrap();
        c.set_site(0, w).unwrap();
        let target = seq_to_global(&c);
        let start = SequentialCircuit::identity(2, 2, 1, Schedule::Alternating).unwrap();
        let (u, h) =
            local_update_pauli_gradient(&start, &target, 0, &CouplingMatrix::zeros(2).unwrap(), 400, 0.5)
                .unwrap();
        let mut done = start.clone();
        done.set_site(0, u).unwrap();
        let f = crate::vmpo::cost(&done, &target).unwrap().fidelity;
        assert!(f > 1.0 - 1e-8, "F = {f}");
        assert!((h.get(1, 1) - 0.3).abs() < 1e-3, "h11 = {}", h.get(1, 1));
    }

    #[test]
    fn ascent_never_decreases_objective() {
        let mut rng = seeded_rng(85);
        let env = random_matrix(4, 4, &mut rng);
        let h0 = coupling_from_unitary(&haar_unitary(4, &mut rng), 2).unwrap();
        let before = real_overlap(&env, &coupling_to_unitary(&h0).unwrap());
        let (u, _) = pauli_gradient_ascent(&env, &h0, 1.0, 30, 0.2).unwrap();
        assert!(real_overlap(&env, &u) >= before - 1e-12);
    }

    #[test]
    fn gradient_vanishes_at_procrustes_optimum() {
        let mut rng = seeded_rng(86);
        let env = random_matrix(4, 4, &mut rng);
        let u = local_update_procrustes(&env).unwrap();
        let h = coupling_from_unitary(&u, 2).unwrap();
        let grad = coupling_gradient(&env, &h, 1.0).unwrap();
        let worst = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        assert!(worst <= 1e-5, "‖∇‖∞ = {worst}");
    }
}
