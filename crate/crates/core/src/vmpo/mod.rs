//! Sequential ancilla-assisted circuits in matrix-product-operator form and
//! their variational optimization.
//!
//! The global space is `q₁ ⊗ q₂ ⊗ … ⊗ q_N ⊗ a` (qubit 1 slowest, ancilla
//! fastest). A site unitary is a `(2D)×(2D)` matrix on `q_k ⊗ a` with the
//! qubit as the high-order index. Sites are applied in list order, so the
//! circuit `[U₁ₐ, U₂ₐ]` realizes `(U₂ₐ ⊗ 𝟙₁)(𝟙₂ ⊗ U₁ₐ)`.
//!
//! Contracting the target with every site but one leaves the site's
//! *environment* `E`, a `(2D)×(2D)` matrix with `Tr[T†·U_seq] = Tr[E†·U_site]`.
//! The sweep optimizer replaces each site by the unitary maximizing
//! `Re Tr[E†·U]` in turn.

mod optimize;
mod update;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{ComplexMatrix, ZERO};

pub use optimize::{
    fidelity_gap, optimize, optimize_lifted, InitStrategy, OptimizationReport, OptimizerConfig,
    UpdateRule,
};
pub use update::{
    coupling_from_unitary, coupling_gradient, coupling_to_unitary, local_update_pauli_gradient,
    local_update_procrustes, pauli_gradient_ascent, CouplingMatrix,
};

/// Unitarity tolerance for stored site unitaries.
pub const SITE_UNITARY_TOL: f64 = 1e-10;

/// Qubit visiting order across rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// Odd rounds visit 1→N, even rounds N→1.
    #[default]
    Alternating,
    /// Every round visits 1→N.
    SameDirection,
}

impl Schedule {
    /// Qubit index (0-based) for each site of an `rounds × n_qubits` circuit.
    pub fn site_qubits(self, n_qubits: usize, rounds: usize) -> Vec<usize> {
        (0..rounds)
            .flat_map(|r| {
                let reverse = self == Schedule::Alternating && r % 2 == 1;
                (0..n_qubits).map(move |k| if reverse { n_qubits - 1 - k } else { k })
            })
            .collect()
    }
}

/// Ordered ancilla-qubit unitaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequentialCircuit {
    n_qubits: usize,
    ancilla_dim: usize,
    rounds: usize,
    schedule: Schedule,
    unitaries: Vec<ComplexMatrix>,
}

impl SequentialCircuit {
    pub fn new(
        n_qubits: usize,
        ancilla_dim: usize,
        rounds: usize,
        schedule: Schedule,
        unitaries: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        check_layout(n_qubits, ancilla_dim, rounds)?;
        if unitaries.len() != rounds * n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{rounds} rounds over {n_qubits} qubits need {} site unitaries, got {}",
                rounds * n_qubits,
                unitaries.len()
            )));
        }
        for u in &unitaries {
            u.ensure_square(2 * ancilla_dim, "site unitary")?;
            u.ensure_unitary(SITE_UNITARY_TOL)?;
        }
        Ok(Self {
            n_qubits,
            ancilla_dim,
            rounds,
            schedule,
            unitaries,
        })
    }

    pub fn identity(n_qubits: usize, ancilla_dim: usize, rounds: usize, schedule: Schedule) -> Result<Self> {
        check_layout(n_qubits, ancilla_dim, rounds)?;
        let unitaries = vec![ComplexMatrix::identity(2 * ancilla_dim); rounds * n_qubits];
        Self::new(n_qubits, ancilla_dim, rounds, schedule, unitaries)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn schedule(&self) -> Schedule {
        self.schedule
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    /// Dimension `2^N·D` of the joint space.
    pub fn global_dim(&self) -> usize {
        (1 << self.n_qubits) * self.ancilla_dim
    }

    pub fn site_qubits(&self) -> Vec<usize> {
        self.schedule.site_qubits(self.n_qubits, self.rounds)
    }

    pub(crate) fn layout(&self) -> Layout {
        Layout::new(self.n_qubits, self.ancilla_dim)
    }

    /// Replaces one site unitary.
    pub fn set_site(&mut self, site: usize, u: ComplexMatrix) -> Result<()> {
        self.check_site(site)?;
        u.ensure_square(2 * self.ancilla_dim, "site unitary")?;
        u.ensure_unitary(SITE_UNITARY_TOL)?;
        self.unitaries[site] = u;
        Ok(())
    }

    /// Same circuit with the site order reversed.
    pub fn reversed(&self) -> Self {
        let mut c = self.clone();
        c.unitaries.reverse();
        c
    }

    pub(crate) fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.unitaries.len() {
            return Err(Error::SiteOutOfRange {
                site,
                sites: self.unitaries.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn sites_mut(&mut self) -> &mut [ComplexMatrix] {
        &mut self.unitaries
    }
}

fn check_layout(n_qubits: usize, ancilla_dim: usize, rounds: usize) -> Result<()> {
    if n_qubits < 2 {
        return Err(Error::InvalidDimension(format!("need at least 2 qubits, got {n_qubits}")));
    }
    if n_qubits > 10 {
        return Err(Error::InvalidDimension(format!("{n_qubits} qubits is beyond dense scale")));
    }
    if ancilla_dim < 2 {
        return Err(Error::InvalidDimension(format!("ancilla dimension must be ≥ 2, got {ancilla_dim}")));
    }
    if rounds == 0 {
        return Err(Error::InvalidDimension("at least one round is required".into()));
    }
    Ok(())
}

/// Index bookkeeping for `N` qubits and one `D`-level ancilla.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Layout {
    n_qubits: usize,
    ancilla_dim: usize,
}

impl Layout {
    pub(crate) fn new(n_qubits: usize, ancilla_dim: usize) -> Self {
        Self { n_qubits, ancilla_dim }
    }

    pub(crate) fn dim(&self) -> usize {
        (1 << self.n_qubits) * self.ancilla_dim
    }

    pub(crate) fn site_dim(&self) -> usize {
        2 * self.ancilla_dim
    }

    /// Flat-index stride of qubit `k`.
    fn stride(&self, k: usize) -> usize {
        (1 << (self.n_qubits - 1 - k)) * self.ancilla_dim
    }

    /// Flat indices with qubit `k` and the ancilla both zero.
    fn bases(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        let bit = 1usize << (self.n_qubits - 1 - k);
        (0..1usize << self.n_qubits)
            .filter(move |bits| bits & bit == 0)
            .map(move |bits| bits * self.ancilla_dim)
    }

    /// Flat offset of local index `(q, a)` = `q·D + a` relative to a base.
    fn local_offsets(&self, k: usize) -> Vec<usize> {
        let stride = self.stride(k);
        (0..self.site_dim())
            .map(|l| (l / self.ancilla_dim) * stride + l % self.ancilla_dim)
            .collect()
    }

    /// `emb(u)·m` where `emb(u)` acts on qubit `k` and the ancilla.
    pub(crate) fn apply_left(&self, u: &ComplexMatrix, k: usize, m: &ComplexMatrix) -> ComplexMatrix {
        let offsets = self.local_offsets(k);
        let sd = self.site_dim();
        let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
        let mut buf = vec![ZERO; sd];
        for base in self.bases(k) {
            for c in 0..m.cols() {
                for (slot, &off) in buf.iter_mut().zip(&offsets) {
                    *slot = m[(base + off, c)];
                }
                for (i, &off) in offsets.iter().enumerate() {
                    let mut acc = ZERO;
                    for (j, &b) in buf.iter().enumerate() {
                        acc += u[(i, j)] * b;
                    }
                    out[(base + off, c)] = acc;
                }
            }
        }
        out
    }

    /// `m·emb(u)`.
    pub(crate) fn apply_right(&self, m: &ComplexMatrix, u: &ComplexMatrix, k: usize) -> ComplexMatrix {
        let offsets = self.local_offsets(k);
        let sd = self.site_dim();
        let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
        let mut buf = vec![ZERO; sd];
        for r in 0..m.rows() {
            for base in self.bases(k) {
                for (slot, &off) in buf.iter_mut().zip(&offsets) {
                    *slot = m[(r, base + off)];
                }
                for (j, &off) in offsets.iter().enumerate() {
                    let mut acc = ZERO;
                    for (i, &b) in buf.iter().enumerate() {
                        acc += b * u[(i, j)];
                    }
                    out[(r, base + off)] = acc;
                }
            }
        }
        out
    }

    #[cfg(test)]
    pub(crate) fn embed(&self, u: &ComplexMatrix, k: usize) -> ComplexMatrix {
        self.apply_left(u, k, &ComplexMatrix::identity(self.dim()))
    }

    /// Environment of a site on qubit `k` from the product `left·right`,
    /// where `Tr[left·right·emb(U)] = Tr[T†·U_seq]`: the adjoint of the
    /// partial trace of `left·right` over everything except `(q_k, a)`.
    pub(crate) fn environment_from(&self, left: &ComplexMatrix, right: &ComplexMatrix, k: usize) -> ComplexMatrix {
        let offsets = self.local_offsets(k);
        let sd = self.site_dim();
        let inner = left.cols();
        let mut traced = ComplexMatrix::zeros(sd, sd);
        for base in self.bases(k) {
            for (i, &oi) in offsets.iter().enumerate() {
                let row = &left.as_slice()[(base + oi) * inner..(base + oi + 1) * inner];
                for (j, &oj) in offsets.iter().enumerate() {
                    let col = base + oj;
                    let mut acc = ZERO;
                    for (l, &x) in row.iter().enumerate() {
                        acc += x * right[(l, col)];
                    }
                    traced[(i, j)] += acc;
                }
            }
        }
        traced.adjoint()
    }
}

/// The `2^N·D`-dimensional unitary realized by the circuit.
pub fn seq_to_global(c: &SequentialCircuit) -> ComplexMatrix {
    let layout = c.layout();
    c.unitaries
        .iter()
        .zip(c.site_qubits())
        .fold(ComplexMatrix::identity(layout.dim()), |acc, (u, k)| {
            layout.apply_left(u, k, &acc)
        })
}

/// Lifts an `N`-qubit gate to `gate ⊗ 𝟙_D`.
pub fn lift_target(gate: &ComplexMatrix, ancilla_dim: usize) -> ComplexMatrix {
    crate::tensor::kron(gate, &ComplexMatrix::identity(ancilla_dim))
}

/// Frobenius cost `C`, its normalization `C̃ = C/(2M)` and the fidelity `F = 1 − C̃`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub cost: f64,
    pub normalized_cost: f64,
    pub fidelity: f64,
}

impl CostBreakdown {
    /// From `Re Tr[T†·U_seq]` on a space of dimension `m`.
    pub fn from_overlap(real_overlap: f64, m: usize) -> Self {
        let m = m as f64;
        let fidelity = real_overlap / m;
        Self {
            cost: 2.0 * m - 2.0 * real_overlap,
            normalized_cost: 1.0 - fidelity,
            fidelity,
        }
    }
}

/// `C = ‖T − U_seq‖²_F = 2M − 2·Re Tr[T†·U_seq]` with `M = 2^N·D`.
pub fn cost(c: &SequentialCircuit, target: &ComplexMatrix) -> Result<CostBreakdown> {
    let m = c.global_dim();
    target.ensure_square(m, "target")?;
    let u = seq_to_global(c);
    let overlap = crate::tensor::hs_overlap(target, &u)?;
    Ok(CostBreakdown::from_overlap(overlap.re, m))
}

/// Environment of `site`: the `(2D)×(2D)` matrix `E` with
/// `Tr[E†·U_site] = Tr[target†·U_seq]` for the current circuit.
pub fn environment(c: &SequentialCircuit, target: &ComplexMatrix, site: usize) -> Result<ComplexMatrix> {
    c.check_site(site)?;
    let layout = c.layout();
    target.ensure_square(layout.dim(), "target")?;
    let qubits = c.site_qubits();
    // U_seq = L·emb(U_site)·R; trace cyclicity gives Tr[(R·T†·L)·emb(U_site)].
    let right_of_site = c.unitaries[..site]
        .iter()
        .zip(&qubits)
        .fold(ComplexMatrix::identity(layout.dim()), |acc, (u, &k)| layout.apply_left(u, k, &acc));
    let mut tail = target.adjoint();
    for (u, &k) in c.unitaries[site + 1..].iter().zip(&qubits[site + 1..]).rev() {
        tail = layout.apply_right(&tail, u, k);
    }
    Ok(layout.environment_from(&right_of_site, &tail, qubits[site]))
}

pub(crate) fn real_overlap(env: &ComplexMatrix, u: &ComplexMatrix) -> f64 {
    env.as_slice()
        .iter()
        .zip(u.as_slice())
        .map(|(e, x)| (e.conj() * x).re)
        .sum()
}
