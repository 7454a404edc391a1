//! Standard gate matrices and Hermitian operator bases.
//!
//! Qubit ordering follows the crate-wide Kronecker convention: qubit 1 is the
//! most significant index. Controlled gates put their control(s) on the
//! high-order qubits and the target on the lowest one.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{kron, ComplexMatrix, C64, ONE, ZERO};

/// Phase used for CPHASE when none is given: the controlled-S gate.
pub const DEFAULT_CPHASE_PHASE: f64 = FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateName {
    Cnot,
    Cz,
    Cphase,
    Swap,
    Toffoli,
    Fredkin,
    Custom,
}

impl GateName {
    pub const TABLE: [GateName; 6] = [
        GateName::Cnot,
        GateName::Cz,
        GateName::Cphase,
        GateName::Swap,
        GateName::Toffoli,
        GateName::Fredkin,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GateName::Cnot => "CNOT",
            GateName::Cz => "CZ",
            GateName::Cphase => "CPHASE",
            GateName::Swap => "SWAP",
            GateName::Toffoli => "TOFFOLI",
            GateName::Fredkin => "FREDKIN",
            GateName::Custom => "CUSTOM",
        }
    }

    /// Qubit count of a named gate; `None` for custom matrices.
    pub fn qubits(self) -> Option<usize> {
        match self {
            GateName::Cnot | GateName::Cz | GateName::Cphase | GateName::Swap => Some(2),
            GateName::Toffoli | GateName::Fredkin => Some(3),
            GateName::Custom => None,
        }
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GateName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "CNOT" | "CX" => Ok(GateName::Cnot),
            "CZ" => Ok(GateName::Cz),
            "CPHASE" => Ok(GateName::Cphase),
            "SWAP" => Ok(GateName::Swap),
            "TOFFOLI" | "CCNOT" => Ok(GateName::Toffoli),
            "FREDKIN" | "CSWAP" => Ok(GateName::Fredkin),
            "CUSTOM" => Ok(GateName::Custom),
            _ => Err(Error::UnknownGate(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub name: GateName,
    /// Phase angle in radians; CPHASE only.
    pub phase: Option<f64>,
    pub qubits: usize,
}

impl GateSpec {
    /// Spec for a named gate. CPHASE without a phase gets [`DEFAULT_CPHASE_PHASE`].
    pub fn named(name: GateName, phase: Option<f64>) -> Result<Self> {
        let qubits = name.qubits().ok_or_else(|| Error::UnknownGate(name.to_string()))?;
        let phase = match (name, phase) {
            (GateName::Cphase, p) => Some(p.unwrap_or(DEFAULT_CPHASE_PHASE)),
            (_, None) => None,
            (other, Some(_)) => return Err(Error::UnexpectedPhase(other.to_string())),
        };
        Ok(Self { name, phase, qubits })
    }

    pub fn custom(qubits: usize) -> Self {
        Self {
            name: GateName::Custom,
            phase: None,
            qubits,
        }
    }
}

/// Computational-basis matrix of a named gate.
pub fn gate(spec: &GateSpec) -> Result<ComplexMatrix> {
    if spec.phase.is_some() && spec.name != GateName::Cphase {
        return Err(Error::UnexpectedPhase(spec.name.to_string()));
    }
    if let Some(expected) = spec.name.qubits() {
        if expected != spec.qubits {
            return Err(Error::InvalidDimension(format!(
                "{} acts on {expected} qubits, spec says {}",
                spec.name, spec.qubits
            )));
        }
    }
    let m = match spec.name {
        GateName::Cnot => permutation(&[0, 1, 3, 2]),
        GateName::Cz => diagonal(&[ONE, ONE, ONE, -ONE]),
        GateName::Cphase => {
            let phi = spec.phase.unwrap_or(DEFAULT_CPHASE_PHASE);
            diagonal(&[ONE, ONE, ONE, C64::from_polar(1.0, phi)])
        }
        GateName::Swap => permutation(&[0, 2, 1, 3]),
        GateName::Toffoli => permutation(&[0, 1, 2, 3, 4, 5, 7, 6]),
        GateName::Fredkin => permutation(&[0, 1, 2, 3, 4, 6, 5, 7]),
        GateName::Custom => return Err(Error::UnknownGate("custom gates are loaded from a matrix file".into())),
    };
    Ok(m)
}

/// Permutation matrix sending |j⟩ to |perm[j]⟩.
fn permutation(perm: &[usize]) -> ComplexMatrix {
    let n = perm.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (j, &i) in perm.iter().enumerate() {
        m[(i, j)] = ONE;
    }
    m
}

fn diagonal(d: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_diag(d)
}

/// σ₀ = 𝟙, σ₁ = X, σ₂ = Y, σ₃ = Z.
pub fn pauli(index: usize) -> ComplexMatrix {
    let i = C64::new(0.0, 1.0);
    let entries = match index {
        0 => [ONE, ZERO, ZERO, ONE],
        1 => [ZERO, ONE, ONE, ZERO],
        2 => [ZERO, -i, i, ZERO],
        3 => [ONE, ZERO, ZERO, -ONE],
        _ => panic!("Pauli index {index} out of range"),
    };
    ComplexMatrix::from_vec(2, 2, entries.to_vec()).expect("2×2 Pauli")
}

/// The 16 two-site Pauli products σ_{j₁} ⊗ σ_{j₂}, indexed `4·j₁ + j₂`.
pub fn pauli_basis_two_site() -> Vec<ComplexMatrix> {
    let singles: Vec<_> = (0..4).map(pauli).collect();
    singles
        .iter()
        .flat_map(|a| singles.iter().map(move |b| kron(a, b)))
        .collect()
}

/// Generators of SU(d) normalized to Tr[τ_i τ_j] = 2δ_ij.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorBasis {
    pub dim: usize,
    pub generators: Vec<ComplexMatrix>,
}

impl GeneratorBasis {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// Generalized Gell-Mann matrices: for each pair j < k the symmetric and
/// antisymmetric off-diagonal generators, followed by the d − 1 diagonal ones.
/// For d = 2 this yields (σ₁, σ₂, σ₃) in that order.
pub fn su_generators(d: usize) -> Result<GeneratorBasis> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("SU(d) generators need d ≥ 2, got {d}")));
    }
    let i = C64::new(0.0, 1.0);
    let mut generators = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in j + 1..d {
            let mut sym = ComplexMatrix::zeros(d, d);
            sym[(j, k)] = ONE;
            sym[(k, j)] = ONE;
            generators.push(sym);

            let mut anti = ComplexMatrix::zeros(d, d);
            anti[(j, k)] = -i;
            anti[(k, j)] = i;
            generators.push(anti);
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = ComplexMatrix::zeros(d, d);
        for m in 0..l {
            diag[(m, m)] = C64::new(norm, 0.0);
        }
        diag[(l, l)] = C64::new(-(l as f64) * norm, 0.0);
        generators.push(diag);
    }
    Ok(GeneratorBasis { dim: d, generators })
}

/// {𝟙} ∪ su_generators(d): a complete Hermitian, Hilbert-Schmidt-orthogonal
/// basis of d×d matrices (𝟙 has norm² d, the generators norm² 2).
pub fn hermitian_basis(d: usize) -> Result<Vec<ComplexMatrix>> {
    let mut basis = vec![ComplexMatrix::identity(d)];
    basis.extend(su_generators(d)?.generators);
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, seeded_rng};
    use crate::tensor::hs_overlap;

    fn spec(name: GateName) -> GateSpec {
        GateSpec::named(name, None).unwrap()
    }

    #[test]
    fn cnot_matrix() {
        let expect = ComplexMatrix::from_real(
            4,
            4,
            &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.],
        )
        .unwrap();
        assert_eq!(gate(&spec(GateName::Cnot)).unwrap(), expect);
    }

    #[test]
    fn cphase_pi_is_cz() {
        let cp = gate(&GateSpec::named(GateName::Cphase, Some(std::f64::consts::PI)).unwrap()).unwrap();
        let cz = gate(&spec(GateName::Cz)).unwrap();
        assert!((&cp - &cz).max_abs() < 1e-15);
    }

    #[test]
    fn default_cphase_is_controlled_s() {
        let cp = gate(&spec(GateName::Cphase)).unwrap();
        assert!((cp[(3, 3)] - C64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn swap_is_an_involution() {
        let s = gate(&spec(GateName::Swap)).unwrap();
        assert_eq!(&s * &s, ComplexMatrix::identity(4));
    }

    #[test]
    fn three_qubit_gates() {
        let t = gate(&spec(GateName::Toffoli)).unwrap();
        assert_eq!(t[(7, 6)], ONE);
        assert_eq!(t[(5, 5)], ONE);
        let f = gate(&spec(GateName::Fredkin)).unwrap();
        // |101⟩ ↔ |110⟩
        assert_eq!(f[(6, 5)], ONE);
        assert_eq!(f[(3, 3)], ONE);
    }

    #[test]
    fn every_named_gate_is_unitary() {
        for name in GateName::TABLE {
            let g = gate(&spec(name)).unwrap();
            assert!(g.unitarity_deviation().unwrap() <= 1e-15, "{name}");
        }
    }

    #[test]
    fn cphase_inverse() {
        for phi in [0.3, 1.7, -2.9] {
            let a = gate(&GateSpec::named(GateName::Cphase, Some(phi)).unwrap()).unwrap();
            let b = gate(&GateSpec::named(GateName::Cphase, Some(-phi)).unwrap()).unwrap();
            assert!((&(&a * &b) - &ComplexMatrix::identity(4)).max_abs() < 1e-15);
        }
    }

    #[test]
    fn spec_errors() {
        assert!(matches!("bogus".parse::<GateName>(), Err(Error::UnknownGate(_))));
        assert!(matches!(
            GateSpec::named(GateName::Cnot, Some(1.0)),
            Err(Error::UnexpectedPhase(_))
        ));
        let bad = GateSpec {
            name: GateName::Swap,
            phase: Some(0.5),
            qubits: 2,
        };
        assert!(matches!(gate(&bad), Err(Error::UnexpectedPhase(_))));
        assert!(gate(&GateSpec::custom(2)).is_err());
        assert_eq!("toffoli".parse::<GateName>().unwrap(), GateName::Toffoli);
    }

    #[test]
    fn su2_is_pauli() {
        let b = su_generators(2).unwrap();
        assert_eq!(b.generators, vec![pauli(1), pauli(2), pauli(3)]);
    }

    #[test]
    fn su3_count_and_traceless() {
        let b = su_generators(3).unwrap();
        assert_eq!(b.len(), 8);
        for g in &b.generators {
            assert!(g.trace().norm() <= 1e-15);
            assert!(g.is_hermitian(0.0));
        }
    }

    #[test]
    fn generator_gram_matrix() {
        for d in 2..=5 {
            let b = su_generators(d).unwrap();
            assert_eq!(b.len(), d * d - 1);
            let total_trace: C64 = b.generators.iter().map(|g| g.trace()).sum();
            assert!(total_trace.norm() <= 1e-15);
            for (i, gi) in b.generators.iter().enumerate() {
                for (j, gj) in b.generators.iter().enumerate() {
                    let expect = if i == j { 2.0 } else { 0.0 };
                    let tr = hs_overlap(gi, gj).unwrap();
                    assert!((tr - C64::new(expect, 0.0)).norm() <= 1e-12, "d={d} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn su_generators_rejects_small_d() {
        assert!(su_generators(1).is_err());
    }

    #[test]
    fn pauli_basis_properties() {
        let basis = pauli_basis_two_site();
        assert_eq!(basis.len(), 16);
        assert_eq!(basis[0], ComplexMatrix::identity(4));
        for (i, a) in basis.iter().enumerate() {
            assert!(a.is_hermitian(0.0));
            for (j, b) in basis.iter().enumerate() {
                let expect = if i == j { 4.0 } else { 0.0 };
                assert!((hs_overlap(a, b).unwrap() - C64::new(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn pauli_basis_spans_hermitian_matrices() {
        let mut rng = seeded_rng(41);
        let h = random_hermitian(4, &mut rng);
        let basis = pauli_basis_two_site();
        let mut rebuilt = ComplexMatrix::zeros(4, 4);
        for b in &basis {
            let coeff = hs_overlap(b, &h).unwrap() / 4.0;
            assert!(coeff.im.abs() < 1e-14);
            rebuilt = &rebuilt + &b.scale(coeff);
        }
        assert!((&rebuilt - &h).max_abs() <= 1e-12);
    }
}
