//! Measurements on one party of a bipartite state, the ensembles of
//! relative states they induce, and the conditional-entropy objective.

use crate::error::{contract, Error, Result};
use crate::linalg::{hermitian_eigenvalues, norm_sqr, ComplexMatrix, C64, ZERO};
use crate::state::{shannon_bits, DensityMatrix, PureState};

const ORTHONORMAL_TOL: f64 = 1e-10;
const COMPLETENESS_TOL: f64 = 1e-8;
const ENSEMBLE_PROB_TOL: f64 = 1e-10;

/// Orthonormal basis `{|k⟩}` of the measured subsystem; `Π_k = |k⟩⟨k|`.
#[derive(Clone, Debug)]
pub struct ProjectiveMeasurement {
    pub subsystem: usize,
    /// Column `k` is `|k⟩`.
    basis: ComplexMatrix,
}

impl ProjectiveMeasurement {
    pub fn new(subsystem: usize, basis: ComplexMatrix) -> Result<Self> {
        if !basis.is_square() {
            return contract("a projective basis must be square");
        }
        let err = basis.isometry_error();
        if err > ORTHONORMAL_TOL {
            return contract(format!("basis is not orthonormal (Gram error {err:.3e})"));
        }
        Ok(Self { subsystem, basis })
    }

    pub fn computational(subsystem: usize, d: usize) -> Self {
        Self {
            subsystem,
            basis: ComplexMatrix::identity(d),
        }
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn projectors(&self) -> Vec<ComplexMatrix> {
        (0..self.dim())
            .map(|k| {
                let v = self.basis.column(k);
                ComplexMatrix::outer(&v, &v)
            })
            .collect()
    }

    /// Bra coefficients `⟨k|` for each outcome.
    pub fn bras(&self) -> Vec<Vec<C64>> {
        (0..self.dim())
            .map(|k| self.basis.column(k).iter().map(|z| z.conj()).collect())
            .collect()
    }
}

/// Rank-one POVM `{|v_k⟩⟨v_k|}` with `Σ_k |v_k⟩⟨v_k| = I`.
#[derive(Clone, Debug)]
pub struct RankOnePovm {
    pub subsystem: usize,
    elements: Vec<Vec<C64>>,
}

impl RankOnePovm {
    pub fn new(subsystem: usize, elements: Vec<Vec<C64>>) -> Result<Self> {
        let d = elements.first().map_or(0, Vec::len);
        if d == 0 || elements.iter().any(|v| v.len() != d) {
            return contract("POVM vectors must be nonempty and of equal length");
        }
        if elements.len() < d {
            return contract(format!("a complete rank-one POVM on dimension {d} needs at least {d} elements"));
        }
        let mut sum = ComplexMatrix::zeros(d, d);
        for v in &elements {
            sum = &sum + &ComplexMatrix::outer(v, v);
        }
        let err = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if err > COMPLETENESS_TOL {
            return contract(format!("POVM is not complete (max |Σ E_k − I| = {err:.3e})"));
        }
        Ok(Self { subsystem, elements })
    }

    /// Elements from the rows of an isometry `W` (`W†W = I`): `⟨v_k| = W[k, ·]`.
    pub fn from_isometry_rows(subsystem: usize, w: &ComplexMatrix) -> Result<Self> {
        let elements = (0..w.rows()).map(|k| w.row(k).iter().map(|z| z.conj()).collect()).collect();
        Self::new(subsystem, elements)
    }

    pub fn elements(&self) -> &[Vec<C64>] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].len()
    }

    pub fn bras(&self) -> Vec<Vec<C64>> {
        self.elements
            .iter()
            .map(|v| v.iter().map(|z| z.conj()).collect())
            .collect()
    }
}

/// Probabilities and pure states realizing a density matrix.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub probabilities: Vec<f64>,
    pub states: Vec<PureState>,
}

impl Ensemble {
    pub fn new(probabilities: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        if probabilities.len() != states.len() || states.is_empty() {
            return contract("ensemble needs one probability per state and at least one member");
        }
        if probabilities.iter().any(|&p| p < 0.0) {
            return contract("negative ensemble probability");
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > ENSEMBLE_PROB_TOL {
            return Err(Error::InvalidState(format!("ensemble probabilities sum to {total}")));
        }
        Ok(Self { probabilities, states })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `Σ p_k |ψ_k⟩⟨ψ_k|`, without validation.
    pub fn mixture(&self) -> ComplexMatrix {
        let n = self.states[0].dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for (p, s) in self.probabilities.iter().zip(&self.states) {
            m = &m + &ComplexMatrix::outer(s.amplitudes(), s.amplitudes()).scale_real(*p);
        }
        m
    }

    /// Max entrywise deviation of the mixture from `target`.
    pub fn reconstruction_error(&self, target: &DensityMatrix) -> f64 {
        self.mixture().max_abs_diff(target.matrix())
    }

    /// `Σ p_k E(|ψ_k⟩)` with the entanglement taken across `side | rest`.
    pub fn average_entanglement(&self, side: &[usize]) -> Result<f64> {
        let mut acc = 0.0;
        for (p, s) in self.probabilities.iter().zip(&self.states) {
            acc += p * crate::pair::entropy_entanglement(s, side)?;
        }
        Ok(acc)
    }
}

/// Bipartite state with the measured party first, flattened for the hot
/// conditional-entropy loop.
#[derive(Clone, Debug)]
pub(crate) struct Conditioned {
    pub d_measured: usize,
    pub d_rest: usize,
    rho: ComplexMatrix,
}

impl Conditioned {
    /// `measured` indexes the party of a bipartite `rho` that is measured.
    pub fn new(rho: &DensityMatrix, measured: usize) -> Result<Self> {
        if rho.dims().len() != 2 {
            return contract(format!("expected a bipartite state, got dims {:?}", rho.dims()));
        }
        let oriented = match measured {
            0 => rho.clone(),
            1 => rho.swap_parties()?,
            _ => return contract(format!("measured party must be 0 or 1, got {measured}")),
        };
        Ok(Self {
            d_measured: oriented.dims()[0],
            d_rest: oriented.dims()[1],
            rho: oriented.matrix().clone(),
        })
    }

    /// Unnormalized post-measurement state of the rest,
    /// `(⟨w|⊗I) ρ (|w⟩⊗I)` with `bra = ⟨w|`.
    pub fn relative_operator(&self, bra: &[C64]) -> ComplexMatrix {
        let (d, e) = (self.d_measured, self.d_rest);
        let mut out = ComplexMatrix::zeros(e, e);
        for a in 0..d {
            let ba = bra[a];
            if ba == ZERO {
                continue;
            }
            for (a2, &b2) in bra.iter().enumerate().take(d) {
                let w = ba * b2.conj();
                if w == ZERO {
                    continue;
                }
                for b in 0..e {
                    for b2 in 0..e {
                        out[(b, b2)] += w * self.rho[(a * e + b, a2 * e + b2)];
                    }
                }
            }
        }
        out
    }

    /// `Σ_k p_k S(ρ_rest^k)` for the given outcome bras.
    pub fn average_entropy<'a>(&self, bras: impl IntoIterator<Item = &'a [C64]>) -> f64 {
        let mut acc = 0.0;
        for bra in bras {
            let m = self.relative_operator(bra);
            let p = m.trace().re;
            if p <= 1e-15 {
                continue;
            }
            let evs: Vec<f64> = hermitian_eigenvalues(&m).iter().map(|l| l / p).collect();
            acc += p * shannon_bits(&evs).max(0.0);
        }
        acc
    }
}

/// `S(rest | measurement)` for an arbitrary set of outcome bras.
pub fn conditional_entropy_for(rho: &DensityMatrix, measured: usize, bras: &[Vec<C64>]) -> Result<f64> {
    let c = Conditioned::new(rho, measured)?;
    if bras.iter().any(|b| b.len() != c.d_measured) {
        return contract("measurement dimension does not match the measured party");
    }
    Ok(c.average_entropy(bras.iter().map(Vec::as_slice)))
}

/// Relative states of the unmeasured subsystems of a pure state when its
/// first subsystem is measured with the given bras. Zero-probability
/// outcomes are dropped.
pub fn relative_state_ensemble(psi: &PureState, bras: &[Vec<C64>]) -> Result<Ensemble> {
    let d = psi.dims()[0];
    let rest_dims: Vec<usize> = psi.dims()[1..].to_vec();
    let e: usize = rest_dims.iter().product();
    let amps = psi.amplitudes();
    let mut probs = Vec::new();
    let mut states = Vec::new();
    for bra in bras {
        if bra.len() != d {
            return contract("measurement dimension does not match the measured subsystem");
        }
        let v: Vec<C64> = (0..e).map(|x| (0..d).map(|a| bra[a] * amps[a * e + x]).sum()).collect();
        let p = norm_sqr(&v);
        if p <= 1e-15 {
            continue;
        }
        probs.push(p);
        states.push(PureState::normalized(rest_dims.clone(), v)?);
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ensemble::new(probs, states)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn computational_measurement_of_classical_state_has_zero_entropy() {
        let rho = DensityMatrix::new(
            vec![2, 2],
            ComplexMatrix::from_real_diagonal(&[0.3, 0.0, 0.0, 0.7]),
        )
        .unwrap();
        let m = ProjectiveMeasurement::computational(0, 2);
        assert_eq!(conditional_entropy_for(&rho, 0, &m.bras()).unwrap(), 0.0);
    }

    #[test]
    fn incomplete_povm_rejected() {
        let v = vec![vec![C64::new(1.0, 0.0), ZERO], vec![ZERO, C64::new(0.5, 0.0)]];
        assert!(RankOnePovm::new(0, v).is_err());
    }

    #[test]
    fn projective_basis_must_be_orthonormal() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(ProjectiveMeasurement::new(0, m).is_err());
    }

    #[test]
    fn ensemble_probabilities_must_sum_to_one() {
        let s = PureState::basis(vec![2], 0).unwrap();
        assert!(Ensemble::new(vec![0.5], vec![s]).is_err());
    }
}
