//! Operator-Schmidt decomposition of bipartite operators.
//!
//! An operator `u` on `A ⊗ B` is written as `Σ_i s_i A_i ⊗ B_i` with
//! Hilbert-Schmidt-orthonormal `{A_i}`, `{B_i}` and descending `s_i ≥ 0`,
//! obtained from the SVD of the realigned matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{kron, reshuffle, svd, ComplexMatrix};

/// Default relative cutoff for counting a coefficient as nonzero.
pub const DEFAULT_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct OperatorSchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left_ops: Vec<ComplexMatrix>,
    pub right_ops: Vec<ComplexMatrix>,
    pub schmidt_number: usize,
    /// Relative to the largest coefficient.
    pub threshold: f64,
}

impl OperatorSchmidtDecomposition {
    /// Σ_i s_i A_i ⊗ B_i over all stored terms.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut terms = self
            .coefficients
            .iter()
            .zip(&self.left_ops)
            .zip(&self.right_ops)
            .map(|((&s, a), b)| kron(a, b).scale_real(s));
        let first = terms.next().expect("at least one Schmidt term");
        terms.fold(first, |acc, t| &acc + &t)
    }

    /// Coefficients above the threshold.
    pub fn nonzero_coefficients(&self) -> &[f64] {
        &self.coefficients[..self.schmidt_number]
    }

    /// Normalized weights p_i = s_i² / Σ_j s_j².
    pub fn weights(&self) -> Result<Vec<f64>> {
        let total: f64 = self.coefficients.iter().map(|s| s * s).sum();
        if total == 0.0 {
            return Err(Error::ZeroOperator);
        }
        Ok(self.coefficients.iter().map(|s| s * s / total).collect())
    }
}

/// Serializable summary used by reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtSummary {
    pub dim_a: usize,
    pub dim_b: usize,
    pub coefficients: Vec<f64>,
    pub schmidt_number: usize,
    pub schmidt_strength: f64,
    pub schmidt_entropy_bits: f64,
    pub entangling: bool,
}

pub fn operator_schmidt(
    u: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    threshold: f64,
) -> Result<OperatorSchmidtDecomposition> {
    let realigned = reshuffle(u, dim_a, dim_b)?;
    let d = svd(&realigned)?;
    let rank = d.singular_values.len();
    let left_ops = (0..rank)
        .map(|k| ComplexMatrix::from_fn(dim_a, dim_a, |i, j| d.u[(i * dim_a + j, k)]))
        .collect();
    let right_ops = (0..rank)
        .map(|k| ComplexMatrix::from_fn(dim_b, dim_b, |i, j| d.v[(i * dim_b + j, k)].conj()))
        .collect();
    let largest = d.singular_values.first().copied().unwrap_or(0.0);
    let schmidt_number = d
        .singular_values
        .iter()
        .filter(|&&s| largest > 0.0 && s > threshold * largest)
        .count();
    Ok(OperatorSchmidtDecomposition {
        coefficients: d.singular_values,
        left_ops,
        right_ops,
        schmidt_number,
        threshold,
    })
}

/// Linear entropy 1 − Σ p_i² of the normalized squared Schmidt coefficients.
///
/// Equals 0 for product operators, 1/2 for CNOT and 3/4 for SWAP.
pub fn schmidt_strength(d: &OperatorSchmidtDecomposition) -> Result<f64> {
    let p = d.weights()?;
    Ok(1.0 - p.iter().map(|x| x * x).sum::<f64>())
}

/// Shannon entropy (bits) of the same weights; 1 for CNOT, 2 for SWAP.
pub fn schmidt_entropy(d: &OperatorSchmidtDecomposition) -> Result<f64> {
    let p = d.weights()?;
    Ok(-p.iter().filter(|&&x| x > 0.0).map(|x| x * x.log2()).sum::<f64>())
}

/// Whether `u` has Schmidt number greater than one across the `A|B` cut.
pub fn is_entangling(u: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<bool> {
    Ok(operator_schmidt(u, dim_a, dim_b, DEFAULT_THRESHOLD)?.schmidt_number > 1)
}

pub fn summarize(u: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<SchmidtSummary> {
    let d = operator_schmidt(u, dim_a, dim_b, DEFAULT_THRESHOLD)?;
    Ok(SchmidtSummary {
        dim_a,
        dim_b,
        schmidt_strength: schmidt_strength(&d)?,
        schmidt_entropy_bits: schmidt_entropy(&d)?,
        entangling: d.schmidt_number > 1,
        schmidt_number: d.schmidt_number,
        coefficients: d.coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{gate, GateName, GateSpec};
    use crate::random::{haar_unitary, seeded_rng};
    use crate::tensor::hs_overlap;

    fn named(name: GateName, phase: Option<f64>) -> ComplexMatrix {
        gate(&GateSpec::named(name, phase).unwrap()).unwrap()
    }

    fn assert_orthonormal(ops: &[ComplexMatrix]) {
        for (i, a) in ops.iter().enumerate() {
            for (j, b) in ops.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                let ov = hs_overlap(a, b).unwrap();
                assert!((ov.re - expect).abs() < 1e-10 && ov.im.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn product_operator_has_schmidt_number_one() {
        let mut rng = seeded_rng(51);
        let v = haar_unitary(2, &mut rng);
        let w = haar_unitary(3, &mut rng);
        let d = operator_schmidt(&kron(&v, &w), 2, 3, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(d.schmidt_number, 1);
        let expect = v.frobenius_norm() * w.frobenius_norm();
        assert!((d.coefficients[0] - expect).abs() < 1e-12);
        assert!(schmidt_strength(&d).unwrap().abs() < 1e-12);
    }

    #[test]
    fn cnot_coefficients() {
        let d = operator_schmidt(&named(GateName::Cnot, None), 2, 2, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(d.schmidt_number, 2);
        let r2 = std::f64::consts::SQRT_2;
        assert!((d.coefficients[0] - r2).abs() < 1e-12);
        assert!((d.coefficients[1] - r2).abs() < 1e-12);
        assert!((schmidt_strength(&d).unwrap() - 0.5).abs() < 1e-12);
        assert!((schmidt_entropy(&d).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn swap_coefficients() {
        let d = operator_schmidt(&named(GateName::Swap, None), 2, 2, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(d.schmidt_number, 4);
        for s in &d.coefficients {
            assert!((s - 1.0).abs() < 1e-12);
        }
        assert!((schmidt_strength(&d).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_and_parseval() {
        let mut rng = seeded_rng(52);
        for dim_b in [2, 3, 4] {
            let u = haar_unitary(2 * dim_b, &mut rng);
            let d = operator_schmidt(&u, 2, dim_b, DEFAULT_THRESHOLD).unwrap();
            assert!((&d.reconstruct() - &u).frobenius_norm() < 1e-10);
            let parseval: f64 = d.coefficients.iter().map(|s| s * s).sum();
            assert!((parseval - u.frobenius_norm_sqr()).abs() < 1e-10);
            assert_orthonormal(&d.left_ops);
            assert_orthonormal(&d.right_ops);
            assert!(d.schmidt_number <= 4.min(dim_b * dim_b));
        }
    }

    #[test]
    fn entangling_classification() {
        let mut rng = seeded_rng(53);
        assert!(is_entangling(&named(GateName::Cnot, None), 2, 2).unwrap());
        let local = kron(&haar_unitary(2, &mut rng), &haar_unitary(2, &mut rng));
        assert!(!is_entangling(&local, 2, 2).unwrap());
        assert!(!is_entangling(&named(GateName::Cphase, Some(0.0)), 2, 2).unwrap());
    }

    #[test]
    fn zero_operator_has_no_strength() {
        let d = operator_schmidt(&ComplexMatrix::zeros(4, 4), 2, 2, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(d.schmidt_number, 0);
        assert_eq!(schmidt_strength(&d), Err(Error::ZeroOperator));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(operator_schmidt(&ComplexMatrix::identity(4), 2, 3, DEFAULT_THRESHOLD).is_err());
    }
}
