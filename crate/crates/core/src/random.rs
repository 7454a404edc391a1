//! Random matrices and states for tests, restarts and property checks.
//!
//! All generators take an explicit RNG; [`seeded_rng`] and [`stream_rng`]
//! build the reproducible ChaCha generators used across the crate.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::tensor::{kron, ComplexMatrix, C64, ZERO};

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex normal: real and imaginary parts are N(0, 1/2).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    C64::new(
        rng.sample::<f64, _>(StandardNormal) * scale,
        rng.sample::<f64, _>(StandardNormal) * scale,
    )
}

/// Matrix of i.i.d. standard complex normal entries.
pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_matrix(n, n, rng);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of R's diagonal absorbed into Q.
///
/// Modified Gram-Schmidt (two passes) produces R with a positive real
/// diagonal directly, which is exactly the phase-fixed factorization.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let z = random_matrix(n, n, rng);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
        let mut degenerate = false;
        for j in 0..n {
            let mut x = z.column(j);
            for _ in 0..2 {
                for b in &cols {
                    let proj: C64 = b.iter().zip(&x).map(|(bi, xi)| bi.conj() * xi).sum();
                    for (xi, bi) in x.iter_mut().zip(b) {
                        *xi -= proj * bi;
                    }
                }
            }
            let norm = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                degenerate = true;
                break;
            }
            cols.push(x.into_iter().map(|c| c / norm).collect());
        }
        if !degenerate {
            return ComplexMatrix::from_fn(n, n, |i, j| cols[j][i]);
        }
    }
}

/// Random normalized pure state.
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| complex_normal(rng)).collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / norm).collect()
}

/// Full-rank random density matrix A·A†/Tr[A·A†] with Gaussian A.
pub fn wishart_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let a = random_matrix(n, n, rng);
    let w = a.matmul(&a.adjoint());
    let tr = w.trace().re;
    w.scale_real(1.0 / tr)
}

/// Correlated mixed state on a space of dimension `n`: a random pure state
/// mixed with the maximally mixed state at the given weight.
pub fn noisy_pure_state<R: Rng + ?Sized>(n: usize, noise_weight: f64, rng: &mut R) -> ComplexMatrix {
    let psi = random_state(n, rng);
    let pure = ComplexMatrix::outer(&psi, &psi);
    let white = ComplexMatrix::identity(n).scale_real(1.0 / n as f64);
    &pure.scale_real(1.0 - noise_weight) + &white.scale_real(noise_weight)
}

/// Haar-random local unitary `V ⊗ W` on `dim_a ⊗ dim_b`.
pub fn random_local_unitary<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, rng: &mut R) -> ComplexMatrix {
    kron(&haar_unitary(dim_a, rng), &haar_unitary(dim_b, rng))
}

/// Column vector |k⟩ of dimension `n`.
pub fn basis_vector(n: usize, k: usize) -> Vec<C64> {
    let mut v = vec![ZERO; n];
    v[k] = C64::new(1.0, 0.0);
    v
}
