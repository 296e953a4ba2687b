//! Density matrices, pure states and purifications on composite systems.
//!
//! Subsystems are ordered as listed in `dims` and flattened row-major, so the
//! last subsystem varies fastest.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::linalg::{
    hermitian_eig, hermitian_eig_unchecked, hermitian_eigenvalues, kron_vec, norm_sqr, ComplexMatrix,
    Spectrum, C64, HERMITIAN_TOL, ZERO,
};

/// Largest total dimension handled.
pub const MAX_DIM: usize = 64;
/// Eigenvalues at or below this are treated as zero for rank and entropy.
pub const RANK_CUTOFF: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-12;

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return contract(format!("subsystem dimensions must be positive, got {dims:?}"));
    }
    let total: usize = dims.iter().product();
    if total > MAX_DIM {
        return contract(format!("total dimension {total} exceeds the supported maximum {MAX_DIM}"));
    }
    Ok(total)
}

/// Old flat index → new flat index when subsystems are reordered so that new
/// subsystem `k` is old subsystem `order[k]`.
fn permutation_map(dims: &[usize], order: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = dims.len();
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&k| k >= n || std::mem::replace(&mut seen[k], true)) {
        return contract(format!("{order:?} is not a permutation of {n} subsystems"));
    }
    let new_dims: Vec<usize> = order.iter().map(|&k| dims[k]).collect();
    let mut new_strides = vec![1; n];
    for k in (0..n.saturating_sub(1)).rev() {
        new_strides[k] = new_strides[k + 1] * new_dims[k + 1];
    }
    // position of old subsystem k in the new ordering
    let mut pos = vec![0; n];
    for (new_k, &old_k) in order.iter().enumerate() {
        pos[old_k] = new_k;
    }
    let total: usize = dims.iter().product();
    let mut map = vec![0; total];
    let mut digits = vec![0usize; n];
    for (old, slot) in map.iter_mut().enumerate() {
        let mut rem = old;
        for k in (0..n).rev() {
            digits[k] = rem % dims[k];
            rem /= dims[k];
        }
        *slot = (0..n).map(|k| digits[k] * new_strides[pos[k]]).sum();
    }
    Ok((map, new_dims))
}

/// Kronecker product in the row-major convention; dims concatenate.
pub trait Tensor {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for ComplexMatrix {
    fn tensor(&self, other: &Self) -> Self {
        self.kron(other)
    }
}

/// Normalized state vector on a composite system.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        let total = check_dims(&dims)?;
        if amplitudes.len() != total {
            return contract(format!("{} amplitudes for total dimension {total}", amplitudes.len()));
        }
        let n2 = norm_sqr(&amplitudes);
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {n2} differs from 1")));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Rescales to unit norm; fails only for the zero vector.
    pub fn normalized(dims: Vec<usize>, mut amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm_sqr(&amplitudes).sqrt();
        if n < 1e-300 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        for a in amplitudes.iter_mut() {
            *a /= n;
        }
        Self::new(dims, amplitudes)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let total = check_dims(&dims)?;
        if index >= total {
            return contract(format!("basis index {index} out of range {total}"));
        }
        let mut amps = vec![ZERO; total];
        amps[index] = C64::new(1.0, 0.0);
        Self::new(dims, amps)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            dims: self.dims.clone(),
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let (map, new_dims) = permutation_map(&self.dims, order)?;
        let mut amps = vec![ZERO; self.amplitudes.len()];
        for (old, &new) in map.iter().enumerate() {
            amps[new] = self.amplitudes[old];
        }
        Ok(Self {
            dims: new_dims,
            amplitudes: amps,
        })
    }

    /// Marginal on the `keep` subsystems.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let (perm, dk, dr) = split_order(&self.dims, keep)?;
        let psi = self.permute(&perm)?;
        let kept_dims = keep.iter().map(|&k| self.dims[k]).collect();
        let a = &psi.amplitudes;
        let m = ComplexMatrix::from_fn(dk, dk, |i, j| {
            (0..dr).map(|t| a[i * dr + t] * a[j * dr + t].conj()).sum()
        });
        Ok(DensityMatrix {
            dims: kept_dims,
            matrix: m,
        })
    }
}

impl Tensor for PureState {
    fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureState {
            dims,
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }
}

/// Returns (permutation putting `keep` first, kept dimension, traced dimension).
fn split_order(dims: &[usize], keep: &[usize]) -> Result<(Vec<usize>, usize, usize)> {
    let n = dims.len();
    let mut seen = vec![false; n];
    if keep.is_empty() || keep.len() >= n {
        return contract(format!("keep set {keep:?} must be a nonempty proper subset of {n} subsystems"));
    }
    for &k in keep {
        if k >= n || std::mem::replace(&mut seen[k], true) {
            return contract(format!("keep set {keep:?} is not a set of subsystem indices below {n}"));
        }
    }
    let mut perm: Vec<usize> = keep.to_vec();
    perm.extend((0..n).filter(|k| !seen[*k]));
    let dk = keep.iter().map(|&k| dims[k]).product();
    let dr = dims.iter().product::<usize>() / dk;
    Ok((perm, dk, dr))
}

/// Hermitian, positive semidefinite, unit-trace operator with recorded
/// subsystem dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates every density-matrix invariant.
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        let total = check_dims(&dims)?;
        if matrix.rows() != total || matrix.cols() != total {
            return contract(format!(
                "matrix is {}x{} but dims {dims:?} require {total}x{total}",
                matrix.rows(),
                matrix.cols()
            ));
        }
        let herm = matrix.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian: max |M - M†| = {herm:.3e} exceeds {HERMITIAN_TOL:e}"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace {:.12} differs from 1 by more than {TRACE_TOL:e}",
                tr.re
            )));
        }
        let min_eig = hermitian_eigenvalues(&matrix).last().copied().unwrap_or(0.0);
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite: smallest eigenvalue {min_eig:.3e} below -{PSD_TOL:e}"
            )));
        }
        Ok(Self { dims, matrix })
    }

    /// Builds `Σ p_k |ψ_k⟩⟨ψ_k|`.
    pub fn from_ensemble(probabilities: &[f64], states: &[PureState]) -> Result<Self> {
        let first = states.first().ok_or_else(|| Error::Contract("empty ensemble".into()))?;
        let n = first.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for (&p, s) in probabilities.iter().zip(states) {
            if s.dims() != first.dims() {
                return contract("ensemble members have different dims");
            }
            m = &m + &ComplexMatrix::outer(s.amplitudes(), s.amplitudes()).scale_real(p);
        }
        Self::new(first.dims().to_vec(), m)
    }

    /// Maximally mixed state on `dims`.
    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let n = check_dims(&dims)?;
        Self::new(dims, ComplexMatrix::identity(n).scale_real(1.0 / n as f64))
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.rows());
        Self { dims, matrix }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Same matrix with a different subsystem split (the product must agree).
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        let total = check_dims(&dims)?;
        if total != self.dim() {
            return contract(format!("dims {dims:?} do not multiply to {}", self.dim()));
        }
        Ok(Self {
            dims,
            matrix: self.matrix.clone(),
        })
    }

    pub fn spectrum(&self) -> Spectrum {
        hermitian_eig_unchecked(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn rank(&self, cutoff: f64) -> usize {
        self.eigenvalues().iter().filter(|&&l| l > cutoff).count()
    }

    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let (map, new_dims) = permutation_map(&self.dims, order)?;
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(map[i], map[j])] = self.matrix[(i, j)];
            }
        }
        Ok(Self {
            dims: new_dims,
            matrix: m,
        })
    }

    /// Exchanges the two parties of a bipartite state.
    pub fn swap_parties(&self) -> Result<Self> {
        if self.dims.len() != 2 {
            return contract(format!("swap needs a bipartite state, dims are {:?}", self.dims));
        }
        self.permute(&[1, 0])
    }

    /// Conjugation by a unitary on the full space.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        let m = u.matmul(&self.matrix)?.matmul(&u.adjoint())?;
        Ok(Self {
            dims: self.dims.clone(),
            matrix: m,
        })
    }

    pub fn is_bipartite_with(&self, d_a: usize, d_b: usize) -> bool {
        self.dims == [d_a, d_b]
    }

    pub fn to_state_file(&self) -> StateFile {
        StateFile {
            dims: self.dims.clone(),
            re: self.matrix.data().iter().map(|z| z.re).collect(),
            im: self.matrix.data().iter().map(|z| z.im).collect(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(s).map_err(|e| Error::StateFile(e.to_string()))?;
        file.into_density()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_state_file()).expect("state file serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::StateFile(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string() + "\n")
            .map_err(|e| Error::StateFile(format!("{}: {e}", path.display())))
    }
}

impl Tensor for DensityMatrix {
    fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            dims,
            matrix: self.matrix.kron(&other.matrix),
        }
    }
}

/// On-disk state format: `{"dims": [...], "re": [...], "im": [...]}` with
/// row-major entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl StateFile {
    pub fn into_density(self) -> Result<DensityMatrix> {
        let total = check_dims(&self.dims).map_err(|e| Error::StateFile(e.to_string()))?;
        if self.re.len() != total * total || self.im.len() != total * total {
            return Err(Error::StateFile(format!(
                "dims {:?} need {} entries in both re and im, got {} and {}",
                self.dims,
                total * total,
                self.re.len(),
                self.im.len()
            )));
        }
        let data = self.re.iter().zip(&self.im).map(|(&r, &i)| C64::new(r, i)).collect();
        DensityMatrix::new(self.dims, ComplexMatrix::new(total, total, data)?)
    }
}

/// Marginal of `rho` on the subsystems in `keep` (in the order given).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let (perm, dk, dr) = split_order(&rho.dims, keep)?;
    let p = rho.permute(&perm)?;
    let kept_dims = keep.iter().map(|&k| rho.dims[k]).collect();
    let m = ComplexMatrix::from_fn(dk, dk, |i, j| {
        (0..dr).map(|t| p.matrix[(i * dr + t, j * dr + t)]).sum()
    });
    Ok(DensityMatrix::from_parts_unchecked(kept_dims, m))
}

/// `−Σ λ log₂ λ` over the entries above the rank cutoff.
pub fn shannon_bits(probabilities: &[f64]) -> f64 {
    probabilities
        .iter()
        .filter(|&&p| p > RANK_CUTOFF)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Binary entropy `h(x)` in bits.
pub fn binary_entropy(x: f64) -> f64 {
    shannon_bits(&[x, 1.0 - x])
}

/// Von Neumann entropy in bits, clamped to `[0, log₂ dim]`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_matrix(&rho.matrix)
}

pub(crate) fn entropy_of_matrix(m: &ComplexMatrix) -> f64 {
    let s = shannon_bits(&hermitian_eigenvalues(m));
    s.clamp(0.0, (m.rows() as f64).log2())
}

/// A pure state whose marginal on the source subsystems is the source state;
/// the ancilla is the last subsystem.
#[derive(Clone, Debug)]
pub struct Purification {
    pub state: PureState,
    pub source_rank: usize,
}

impl Purification {
    pub fn ancilla_dim(&self) -> usize {
        self.source_rank
    }

    /// Marginal on the listed subsystems of the purified state.
    pub fn marginal(&self, keep: &[usize]) -> Result<DensityMatrix> {
        self.state.reduced(keep)
    }
}

pub fn purify(rho: &DensityMatrix) -> Result<Purification> {
    purify_with_cutoff(rho, RANK_CUTOFF)
}

/// `|Ψ⟩ = Σ_i √λ_i |v_i⟩|i⟩` over the eigenvalues above `cutoff`.
pub fn purify_with_cutoff(rho: &DensityMatrix, cutoff: f64) -> Result<Purification> {
    let spec = hermitian_eig(&rho.matrix)?;
    let rank = spec.eigenvalues.iter().filter(|&&l| l > cutoff).count();
    if rank == 0 {
        return contract("state has rank 0 at the given cutoff");
    }
    let n = rho.dim();
    let mut amps = vec![ZERO; n * rank];
    for c in 0..rank {
        let w = spec.eigenvalues[c].sqrt();
        for x in 0..n {
            amps[x * rank + c] = spec.eigenvectors[(x, c)] * w;
        }
    }
    let mut dims = rho.dims.clone();
    dims.push(rank);
    check_dims(&dims)?;
    let state = PureState::normalized(dims, amps)?;
    Ok(Purification {
        state,
        source_rank: rank,
    })
}
