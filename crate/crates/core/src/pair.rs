//! Closed-form bipartite measures: Wootters concurrence, two-qubit
//! entanglement of formation, pure-state entanglement and mutual information.

use crate::error::{contract, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, C64};
use crate::state::{partial_trace, von_neumann_entropy, DensityMatrix, PureState, RANK_CUTOFF};

/// Spin-flip roots are clamped to zero when they are at most this negative.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairMeasures {
    pub concurrence: f64,
    /// Entanglement of formation in bits.
    pub eof: f64,
    /// `x = ½(1 + √(1 − C²))`, in `[½, 1]`.
    pub x_parameter: f64,
    pub mutual_information: f64,
}

impl PairMeasures {
    pub fn of(rho: &DensityMatrix) -> Result<Self> {
        let concurrence = concurrence_two_qubit(rho)?;
        Ok(Self {
            concurrence,
            eof: eof_from_concurrence(concurrence)?,
            x_parameter: x_parameter(concurrence)?,
            mutual_information: mutual_information(rho, &[0])?,
        })
    }
}

fn require_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if !rho.is_bipartite_with(2, 2) {
        return contract(format!("expected a two-qubit state, got dims {:?}", rho.dims()));
    }
    Ok(())
}

/// Descending roots `λ₁ ≥ … ≥ λ₄` of the spectrum of `ρ(σy⊗σy)ρ*(σy⊗σy)`.
///
/// Computed as the singular values of `τ_ij = ⟨v_i|σy⊗σy|v_j*⟩` over the
/// subnormalized eigenvectors `v_i = √μ_i e_i` with `μ_i` above the rank
/// cutoff; this avoids taking square roots of roundoff-level eigenvalues of
/// the non-Hermitian product.
pub fn wootters_lambdas(rho: &DensityMatrix) -> Result<[f64; 4]> {
    require_two_qubit(rho)?;
    let spec = hermitian_eig(rho.matrix())?;
    let vecs: Vec<[C64; 4]> = spec
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &mu)| mu > RANK_CUTOFF)
        .map(|(k, &mu)| {
            let w = mu.sqrt();
            std::array::from_fn(|i| spec.eigenvectors[(i, k)] * w)
        })
        .collect();
    let r = vecs.len();
    // (σy⊗σy)|v*⟩ = (−v₃*, v₂*, v₁*, −v₀*)
    let flipped: Vec<[C64; 4]> = vecs
        .iter()
        .map(|v| [-v[3].conj(), v[2].conj(), v[1].conj(), -v[0].conj()])
        .collect();
    let tau = ComplexMatrix::from_fn(r, r, |i, j| {
        (0..4).map(|k| vecs[i][k].conj() * flipped[j][k]).sum::<C64>()
    });
    // a direct SVD keeps small roots accurate to roundoff of the largest
    let mut out = [0.0; 4];
    if r > 0 {
        for (slot, sv) in out.iter_mut().zip(tau.to_nalgebra().singular_values().iter()) {
            *slot = *sv;
        }
    }
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// `C = max{0, λ₁ − λ₂ − λ₃ − λ₄}`.
pub fn concurrence_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    let l = wootters_lambdas(rho)?;
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

pub fn x_parameter(c: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) {
        return contract(format!("concurrence {c} outside [0, 1]"));
    }
    Ok(0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt()))
}

/// `E = h(x)` with `x = ½(1 + √(1 − C²))`.
pub fn eof_from_concurrence(c: f64) -> Result<f64> {
    let x = x_parameter(c)?;
    Ok(crate::state::binary_entropy(x))
}

pub fn eof_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    eof_from_concurrence(concurrence_two_qubit(rho)?)
}

/// Entropy of the marginal on `side` (either marginal gives the same value).
pub fn entropy_entanglement(psi: &PureState, side: &[usize]) -> Result<f64> {
    Ok(von_neumann_entropy(&psi.reduced(side)?))
}

/// Entanglement entropy of a bipartite pure state given by its coefficient
/// matrix `c[a·d_b + b]`, using the smaller marginal.
pub(crate) fn entanglement_of_amplitudes(amps: &[C64], d_a: usize, d_b: usize) -> f64 {
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    if norm <= 0.0 {
        return 0.0;
    }
    let red = if d_b <= d_a {
        ComplexMatrix::from_fn(d_b, d_b, |i, j| {
            (0..d_a).map(|a| amps[a * d_b + i] * amps[a * d_b + j].conj()).sum::<C64>() / norm
        })
    } else {
        ComplexMatrix::from_fn(d_a, d_a, |i, j| {
            (0..d_b).map(|b| amps[i * d_b + b] * amps[j * d_b + b].conj()).sum::<C64>() / norm
        })
    };
    crate::state::entropy_of_matrix(&red)
}

/// `I = S(ρ_X) + S(ρ_Y) − S(ρ_XY)` for the split `side | rest`.
pub fn mutual_information(rho: &DensityMatrix, side: &[usize]) -> Result<f64> {
    let n = rho.dims().len();
    let rest: Vec<usize> = (0..n).filter(|k| !side.contains(k)).collect();
    let s_x = von_neumann_entropy(&partial_trace(rho, side)?);
    let s_y = von_neumann_entropy(&partial_trace(rho, &rest)?);
    let s_xy = von_neumann_entropy(rho);
    Ok((s_x + s_y - s_xy).max(0.0))
}

/// `σy ⊗ σy`, exposed for tests and the verification suite.
pub fn spin_flip_operator() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 3)] = C64::new(-1.0, 0.0);
    m[(1, 2)] = C64::new(1.0, 0.0);
    m[(2, 1)] = C64::new(1.0, 0.0);
    m[(3, 0)] = C64::new(-1.0, 0.0);
    m
}
