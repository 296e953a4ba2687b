//! Seeded random states and unitaries.
//!
//! Every generator takes an explicit RNG; [`stream_rng`] derives independent
//! reproducible streams from a `(seed, stream)` pair.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::{orthonormalize_columns, ComplexMatrix, C64};
use crate::state::{DensityMatrix, PureState};

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

/// Haar-random unitary (Gram–Schmidt of a Ginibre matrix).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        if let Ok(q) = orthonormalize_columns(&ginibre(n, n, rng)) {
            return q;
        }
    }
}

pub fn random_pure_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<PureState> {
    let n = dims.iter().product();
    let amps = (0..n).map(|_| gaussian_complex(rng)).collect();
    PureState::normalized(dims.to_vec(), amps)
}

/// Random density matrix of the given rank, `X X† / tr(X X†)` for Ginibre `X`.
pub fn random_density<R: Rng + ?Sized>(dims: &[usize], rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    let n: usize = dims.iter().product();
    let x = ginibre(n, rank.clamp(1, n), rng);
    let m = x.matmul(&x.adjoint())?;
    let tr = m.trace().re;
    let mut m = m.scale_real(1.0 / tr);
    // exact Hermitian symmetry
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    DensityMatrix::new(dims.to_vec(), m)
}
