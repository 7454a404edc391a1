//! Kraus operators of dilated unitaries, channel application, the
//! decoupling witness for two-step sequential dilations, and the Fano form
//! of system–ancilla states.
//!
//! Throughout, the last factor of a [`FactorShape`] is the ancilla and the
//! remaining factors together form the system.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::su_generators;
use crate::tensor::{eigh, kron, partial_trace, svd, ComplexMatrix, FactorShape};
use crate::vmpo::{seq_to_global, Schedule, SequentialCircuit};

const UNITARY_TOL: f64 = 1e-8;
const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausSet {
    pub operators: Vec<ComplexMatrix>,
    pub system_dim: usize,
    pub ancilla_dim: usize,
    /// Initial ancilla basis state.
    pub ancilla_in: usize,
}

impl KrausSet {
    /// `Σ_k E_k†·E_k`.
    pub fn completeness(&self) -> ComplexMatrix {
        let n = self.system_dim;
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, e| &acc + &e.adjoint().matmul(e))
    }

    /// `‖Σ_k E_k†·E_k − 𝟙‖_F`.
    pub fn completeness_error(&self) -> f64 {
        (&self.completeness() - &ComplexMatrix::identity(self.system_dim)).frobenius_norm()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.operators.iter().map(ComplexMatrix::frobenius_norm).collect()
    }
}

/// Splits a shape into (system dimension, ancilla dimension).
fn split(shape: &FactorShape) -> Result<(usize, usize)> {
    if shape.len() < 2 {
        return Err(Error::InvalidDimension(format!(
            "need at least one system factor and an ancilla, got {:?}",
            shape.dims()
        )));
    }
    let anc = *shape.dims().last().expect("nonempty");
    Ok((shape.total() / anc, anc))
}

/// `E_k = (𝟙_s ⊗ ⟨k|)·u·(𝟙_s ⊗ |ancilla_in⟩)` for every ancilla level `k`.
pub fn kraus_from_dilation(u_joint: &ComplexMatrix, shape: &FactorShape, ancilla_in: usize) -> Result<KrausSet> {
    shape.check_square(u_joint)?;
    let (sys, anc) = split(shape)?;
    if ancilla_in >= anc {
        return Err(Error::InvalidDimension(format!(
            "ancilla input state {ancilla_in} out of range for D = {anc}"
        )));
    }
    u_joint.ensure_unitary(UNITARY_TOL)?;
    let operators = (0..anc)
        .map(|k| ComplexMatrix::from_fn(sys, sys, |i, j| u_joint[(i * anc + k, j * anc + ancilla_in)]))
        .collect();
    Ok(KrausSet {
        operators,
        system_dim: sys,
        ancilla_dim: anc,
        ancilla_in,
    })
}

/// Checks that `rho` is a density matrix: Hermitian, unit trace, PSD.
fn ensure_state(rho: &ComplexMatrix) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::DimensionMismatch(format!("state must be square, got {:?}", rho.shape())));
    }
    let dev = rho.hermiticity_deviation().unwrap_or(f64::INFINITY);
    if dev > STATE_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
        return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
    }
    let lowest = eigh(rho)?.eigenvalues[0];
    if lowest < -STATE_TOL {
        return Err(Error::InvalidState(format!("negative eigenvalue {lowest:e}")));
    }
    Ok(())
}

/// `Σ_k E_k·ρ·E_k†`.
pub fn apply_channel(k: &KrausSet, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    rho.ensure_square(k.system_dim, "input state")?;
    ensure_state(rho)?;
    let n = k.system_dim;
    Ok(k.operators
        .iter()
        .fold(ComplexMatrix::zeros(n, n), |acc, e| &acc + &e.matmul(rho).matmul(&e.adjoint())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    /// `Σ_{k≥1} ‖E_k‖_F` in the aligned ancilla readout basis.
    pub witness: f64,
    /// `Σ_{k≥1} ‖E_k‖_F` in the computational readout basis.
    pub raw_witness: f64,
    /// `‖E_k‖_F` in the computational basis.
    pub natural_norms: Vec<f64>,
    /// `‖E_k‖_F` in the aligned basis, descending.
    pub aligned_norms: Vec<f64>,
    pub kraus: KrausSet,
}

/// Decoupling witness of the dilation `(U₂ₐ ⊗ 𝟙₁)·(𝟙₂ ⊗ U₁ₐ)` on
/// qubit 1 ⊗ qubit 2 ⊗ ancilla with the ancilla starting in `|0⟩`.
///
/// The readout basis is rotated so that `E_0` captures as much weight as
/// possible: the rotated operators are the singular components of the
/// `D × 16` matrix whose rows are the flattened `E_k`. The witness is the sum
/// of all but the largest singular value and vanishes exactly when the
/// ancilla ends in a fixed state regardless of the system input.
pub fn nogo_witness_report(u1a: &ComplexMatrix, u2a: &ComplexMatrix, ancilla_dim: usize) -> Result<WitnessReport> {
    if ancilla_dim < 2 {
        return Err(Error::InvalidDimension(format!("ancilla dimension must be ≥ 2, got {ancilla_dim}")));
    }
    let site = 2 * ancilla_dim;
    u1a.ensure_square(site, "U₁ₐ")?;
    u2a.ensure_square(site, "U₂ₐ")?;
    u1a.ensure_unitary(UNITARY_TOL)?;
    u2a.ensure_unitary(UNITARY_TOL)?;

    let circuit = SequentialCircuit::new(2, ancilla_dim, 1, Schedule::SameDirection, vec![u1a.clone(), u2a.clone()])?;
    let joint = seq_to_global(&circuit);
    let shape = FactorShape::new(vec![2, 2, ancilla_dim])?;
    let kraus = kraus_from_dilation(&joint, &shape, 0)?;

    let natural_norms = kraus.norms();
    let raw_witness = natural_norms[1..].iter().sum();

    let flat: Vec<_> = kraus.operators.iter().flat_map(|e| e.as_slice().iter().copied()).collect();
    let q = ComplexMatrix::from_vec(ancilla_dim, 16, flat)?;
    let aligned_norms = svd(&q)?.singular_values;
    let witness = aligned_norms[1..].iter().sum();

    Ok(WitnessReport {
        witness,
        raw_witness,
        natural_norms,
        aligned_norms,
        kraus,
    })
}

/// Aligned witness value; see [`nogo_witness_report`].
pub fn nogo_witness(u1a: &ComplexMatrix, u2a: &ComplexMatrix, ancilla_dim: usize) -> Result<f64> {
    Ok(nogo_witness_report(u1a, u2a, ancilla_dim)?.witness)
}

/// `ρ = ρ_s ⊗ ρ_a + Σ_ij γ_ij σ_i ⊗ τ_j` with `σ`, `τ` the SU generators of
/// the system and ancilla (normalized to `Tr[σ_iσ_j] = 2δ_ij`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FanoForm {
    pub rho_sys: ComplexMatrix,
    pub rho_anc: ComplexMatrix,
    /// Row-major `(d_s² − 1) × (D² − 1)`.
    pub gamma: Vec<f64>,
    pub gamma_rows: usize,
    pub gamma_cols: usize,
}

impl FanoForm {
    pub fn gamma(&self, i: usize, j: usize) -> f64 {
        self.gamma[i * self.gamma_cols + j]
    }

    pub fn max_abs_gamma(&self) -> f64 {
        self.gamma.iter().fold(0.0, |m, g| m.max(g.abs()))
    }

    pub fn reconstruct(&self) -> Result<ComplexMatrix> {
        let sigma = su_generators(self.rho_sys.rows())?.generators;
        let tau = su_generators(self.rho_anc.rows())?.generators;
        let mut rho = kron(&self.rho_sys, &self.rho_anc);
        for (i, s) in sigma.iter().enumerate() {
            for (j, t) in tau.iter().enumerate() {
                let g = self.gamma(i, j);
                if g != 0.0 {
                    rho = &rho + &kron(s, t).scale_real(g);
                }
            }
        }
        Ok(rho)
    }
}

/// Marginals and correlation coefficients of a system–ancilla state.
pub fn fano_decompose(rho: &ComplexMatrix, shape: &FactorShape) -> Result<FanoForm> {
    shape.check_square(rho)?;
    let (sys, anc) = split(shape)?;
    let dev = rho.hermiticity_deviation().unwrap_or(f64::INFINITY);
    if dev > STATE_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
        return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
    }
    let (rho_sys, rho_anc) = marginals(rho, shape)?;
    let correlated = rho - &kron(&rho_sys, &rho_anc);

    if sys < 2 {
        return Err(Error::InvalidDimension("system dimension must be ≥ 2".into()));
    }
    let sigma = su_generators(sys)?.generators;
    let tau = su_generators(anc)?.generators;
    let mut gamma = Vec::with_capacity(sigma.len() * tau.len());
    for s in &sigma {
        for t in &tau {
            let tr = kron(s, t).matmul(&correlated).trace();
            gamma.push(tr.re / 4.0);
        }
    }
    Ok(FanoForm {
        rho_sys,
        rho_anc,
        gamma,
        gamma_rows: sigma.len(),
        gamma_cols: tau.len(),
    })
}

fn marginals(rho: &ComplexMatrix, shape: &FactorShape) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let last = shape.len() - 1;
    let system: Vec<usize> = (0..last).collect();
    Ok((partial_trace(rho, shape, &system)?, partial_trace(rho, shape, &[last])?))
}

/// `‖Tr_a[U·ρ·U†] − Tr_a[U·(ρ_s ⊗ ρ_a)·U†]‖_F`: how much the initial
/// system–ancilla correlations of `rho_corr` change the system output.
pub fn correlation_sensitivity(u_joint: &ComplexMatrix, rho_corr: &ComplexMatrix, shape: &FactorShape) -> Result<f64> {
    shape.check_square(u_joint)?;
    shape.check_square(rho_corr)?;
    split(shape)?;
    u_joint.ensure_unitary(UNITARY_TOL)?;
    ensure_state(rho_corr)?;
    let (rho_sys, rho_anc) = marginals(rho_corr, shape)?;
    let product = kron(&rho_sys, &rho_anc);
    let system: Vec<usize> = (0..shape.len() - 1).collect();
    let evolve = |rho: &ComplexMatrix| -> Result<ComplexMatrix> {
        partial_trace(&u_joint.matmul(rho).matmul(&u_joint.adjoint()), shape, &system)
    };
    Ok((&evolve(rho_corr)? - &evolve(&product)?).frobenius_norm())
}
