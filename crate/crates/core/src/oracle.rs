//! Brute-force searches over measurements and ensemble decompositions.
//!
//! These never use the purification duality, so they serve as independent
//! upper bounds on every exact value computed elsewhere in the crate.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{contract, Result};
use crate::linalg::{
    exp_i_hermitian, hermitian_eig, hermitian_from_params, orthonormalize_columns, ComplexMatrix, C64, ZERO,
};
use crate::measurement::{relative_state_ensemble, Conditioned, Ensemble, ProjectiveMeasurement, RankOnePovm};
use crate::optim::{multistart, polished_nelder_mead, MultiStartOptions, NelderMeadOptions};
use crate::par::{map_indexed, Execution};
use crate::pair::entanglement_of_amplitudes;
use crate::state::{DensityMatrix, PureState, Purification, RANK_CUTOFF};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConfig {
    pub seed: u64,
    pub restarts: usize,
    /// Per local Nelder–Mead run.
    pub max_iterations: usize,
    pub objective_tolerance: f64,
    /// Rank-one POVM size; `None` means `d²` for a `d`-dimensional party.
    pub povm_elements: Option<usize>,
    pub execution: Execution,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 64,
            max_iterations: 2000,
            objective_tolerance: 1e-8,
            povm_elements: None,
            execution: Execution::Parallel,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return contract("restarts must be at least 1");
        }
        if self.max_iterations == 0 {
            return contract("max_iterations must be at least 1");
        }
        if self.objective_tolerance.is_nan() || self.objective_tolerance <= 0.0 {
            return contract("objective tolerance must be positive");
        }
        Ok(())
    }

    fn multistart(&self) -> MultiStartOptions {
        MultiStartOptions {
            seed: self.seed,
            restarts: self.restarts,
            local: NelderMeadOptions {
                max_iterations: self.max_iterations,
                f_tolerance: self.objective_tolerance,
                initial_step: 0.5,
            },
            polish_rounds: 4,
            execution: self.execution,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Argmin {
    Projective(ProjectiveMeasurement),
    Povm(RankOnePovm),
    Ensemble(Ensemble),
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub value: f64,
    pub argmin: Argmin,
    pub converged: bool,
    /// Best-vs-worst restart gap.
    pub spread: f64,
}

fn gaussian_start(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Basis of a qubit from Bloch angles: `|0'⟩ = (cos θ/2, e^{iφ} sin θ/2)`.
pub fn qubit_basis(theta: f64, phi: f64) -> ComplexMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = C64::from_polar(1.0, phi);
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 0)] = C64::new(c, 0.0);
    m[(1, 0)] = e * s;
    m[(0, 1)] = -e.conj() * s;
    m[(1, 1)] = C64::new(c, 0.0);
    m
}

/// Orthonormal basis from `d²` generator coordinates (`d = 2` uses the two
/// Bloch angles instead).
fn basis_from_params(d: usize, x: &[f64]) -> ComplexMatrix {
    match d {
        1 => ComplexMatrix::identity(1),
        2 => qubit_basis(x[0], x[1]),
        _ => {
            let h = hermitian_from_params(d, x).expect("parameter count");
            exp_i_hermitian(&h).expect("generator is Hermitian")
        }
    }
}

fn projective_param_count(d: usize) -> usize {
    match d {
        1 => 0,
        2 => 2,
        _ => d * d,
    }
}

fn basis_bras(basis: &ComplexMatrix) -> Vec<Vec<C64>> {
    (0..basis.cols())
        .map(|k| basis.column(k).iter().map(|z| z.conj()).collect())
        .collect()
}

/// Minimizes the average conditional entropy of the unmeasured party over
/// orthonormal bases of the measured one.
pub fn projective_search(rho: &DensityMatrix, measured: usize, cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let cond = Conditioned::new(rho, measured)?;
    let d = cond.d_measured;
    let objective = |x: &[f64]| {
        let bras = basis_bras(&basis_from_params(d, x));
        cond.average_entropy(bras.iter().map(Vec::as_slice))
    };
    let n = projective_param_count(d);
    let (x, value, converged, spread) = if d == 2 {
        qubit_angle_search(&objective, cfg)
    } else {
        let r = multistart(
            &objective,
            &|_, rng: &mut ChaCha8Rng| (0..n).map(|_| rng.random_range(-PI..PI)).collect(),
            &cfg.multistart(),
        );
        (r.best.x, r.best.value, r.best.converged, r.spread)
    };
    let basis = basis_from_params(d, &x);
    Ok(SearchResult {
        value,
        argmin: Argmin::Projective(ProjectiveMeasurement::new(measured, basis)?),
        converged,
        spread,
    })
}

/// Bloch-sphere search: a fixed angle grid seeds up to `restarts` local
/// refinements from the best grid cells.
fn qubit_angle_search<F>(objective: &F, cfg: &SearchConfig) -> (Vec<f64>, f64, bool, f64)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    const THETA_STEPS: usize = 13;
    const PHI_STEPS: usize = 24;
    let mut grid: Vec<(f64, [f64; 2])> = Vec::with_capacity(THETA_STEPS * PHI_STEPS);
    for i in 0..THETA_STEPS {
        let theta = PI * i as f64 / (THETA_STEPS - 1) as f64;
        for j in 0..PHI_STEPS {
            let phi = 2.0 * PI * j as f64 / PHI_STEPS as f64;
            grid.push((objective(&[theta, phi]), [theta, phi]));
            if i == 0 || i == THETA_STEPS - 1 {
                break; // poles: φ is irrelevant
            }
        }
    }
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));
    let starts = cfg.restarts.clamp(1, 8).min(grid.len());
    let local = NelderMeadOptions {
        max_iterations: cfg.max_iterations,
        f_tolerance: cfg.objective_tolerance.min(1e-12),
        initial_step: 0.2,
    };
    let runs = map_indexed(starts, cfg.execution, |k| polished_nelder_mead(objective, &grid[k].1, &local, 4));
    let best = (0..runs.len())
        .min_by(|&a, &b| runs[a].value.total_cmp(&runs[b].value).then(a.cmp(&b)))
        .unwrap();
    let worst = runs.iter().map(|m| m.value).fold(f64::NEG_INFINITY, f64::max);
    let m = &runs[best];
    (m.x.clone(), m.value, m.converged, worst - m.value)
}

fn complex_block(rows: usize, cols: usize, x: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |i, j| {
        let k = 2 * (i * cols + j);
        C64::new(x[k], x[k + 1])
    })
}

/// Minimizes the conditional entropy over rank-one POVMs with
/// `cfg.povm_elements` (default `d²`) elements. The elements are the rows of
/// an isometry obtained by Gram–Schmidt on an unconstrained complex block.
pub fn povm_search(rho: &DensityMatrix, measured: usize, cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let cond = Conditioned::new(rho, measured)?;
    let d = cond.d_measured;
    let n = cfg.povm_elements.unwrap_or(d * d);
    if n < d {
        return contract(format!("{n} POVM elements cannot be complete in dimension {d}"));
    }
    let isometry = |x: &[f64]| orthonormalize_columns(&complex_block(n, d, x)).ok();
    let objective = |x: &[f64]| match isometry(x) {
        Some(w) => cond.average_entropy((0..n).map(|k| w.row(k))),
        None => f64::INFINITY,
    };
    let r = multistart(&objective, &|_, rng: &mut ChaCha8Rng| gaussian_start(2 * n * d, rng), &cfg.multistart());
    let w = isometry(&r.best.x).ok_or_else(|| crate::Error::Contract("degenerate POVM optimum".into()))?;
    Ok(SearchResult {
        value: r.best.value,
        argmin: Argmin::Povm(RankOnePovm::from_isometry_rows(measured, &w)?),
        converged: r.best.converged,
        spread: r.spread,
    })
}

/// Minimal average entanglement (across the bipartition of `rho`) over
/// `components`-member pure-state decompositions. Members are
/// `|ψ̃_k⟩ = Σ_j V_kj √λ_j |e_j⟩` for an isometry `V` acting on the
/// eigen-ensemble.
pub fn ensemble_eof_search(rho: &DensityMatrix, components: usize, cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    if rho.dims().len() != 2 {
        return contract(format!("expected a bipartite state, got dims {:?}", rho.dims()));
    }
    let (d_a, d_b) = (rho.dims()[0], rho.dims()[1]);
    let spec = hermitian_eig(rho.matrix())?;
    let r = spec.eigenvalues.iter().filter(|&&l| l > RANK_CUTOFF).count();
    if components < r {
        return contract(format!("{components} components cannot realize a rank-{r} state"));
    }
    let dim = rho.dim();
    // columns √λ_j e_j
    let weighted: Vec<Vec<C64>> = (0..r)
        .map(|j| {
            let w = spec.eigenvalues[j].sqrt();
            spec.eigenvectors.column(j).iter().map(|z| z * w).collect()
        })
        .collect();
    let members = |v: &ComplexMatrix| -> Vec<Vec<C64>> {
        (0..components)
            .map(|k| {
                let mut psi = vec![ZERO; dim];
                for (j, col) in weighted.iter().enumerate() {
                    let c = v[(k, j)];
                    for (p, x) in psi.iter_mut().zip(col) {
                        *p += c * x;
                    }
                }
                psi
            })
            .collect()
    };
    let isometry = |x: &[f64]| orthonormalize_columns(&complex_block(components, r, x)).ok();
    let objective = |x: &[f64]| match isometry(x) {
        Some(v) => members(&v)
            .iter()
            .map(|psi| {
                let p: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
                if p <= 1e-15 {
                    0.0
                } else {
                    p * entanglement_of_amplitudes(psi, d_a, d_b)
                }
            })
            .sum(),
        None => f64::INFINITY,
    };
    let res = multistart(
        &objective,
        &|_, rng: &mut ChaCha8Rng| gaussian_start(2 * components * r, rng),
        &cfg.multistart(),
    );
    let v = isometry(&res.best.x).ok_or_else(|| crate::Error::Contract("degenerate ensemble optimum".into()))?;
    let mut probs = Vec::new();
    let mut states = Vec::new();
    for psi in members(&v) {
        let p: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if p > 1e-15 {
            probs.push(p);
            states.push(PureState::normalized(rho.dims().to_vec(), psi)?);
        }
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(SearchResult {
        value: res.best.value,
        argmin: Argmin::Ensemble(Ensemble::new(probs, states)?),
        converged: res.best.converged,
        spread: res.spread,
    })
}

fn check_dilation(unitary_ae: &ComplexMatrix, d_a: usize, ancilla_dim: usize) -> Result<()> {
    let n = d_a * ancilla_dim;
    if unitary_ae.rows() != n || unitary_ae.cols() != n {
        return contract(format!(
            "unitary on A⊗E must be {n}x{n}, got {}x{}",
            unitary_ae.rows(),
            unitary_ae.cols()
        ));
    }
    let err = unitary_ae.isometry_error();
    if err > 1e-10 {
        return contract(format!("A⊗E operator is not unitary (Gram error {err:.3e})"));
    }
    Ok(())
}

/// Ensemble of relative states obtained by appending an ancilla `E` in
/// `|0⟩`, applying `U` on `A⊗E` (A is the purification's first subsystem,
/// row-major with E last) and measuring both in the computational basis.
pub fn dilated_ensemble(purification: &Purification, unitary_ae: &ComplexMatrix, ancilla_dim: usize) -> Result<Ensemble> {
    let d_a = purification.state.dims()[0];
    check_dilation(unitary_ae, d_a, ancilla_dim)?;
    // outcome (a', e') has bra ⟨a' e'|U|· , 0_E⟩ on A
    let bras: Vec<Vec<C64>> = (0..d_a * ancilla_dim)
        .map(|row| (0..d_a).map(|a| unitary_ae[(row, a * ancilla_dim)]).collect())
        .collect();
    relative_state_ensemble(&purification.state, &bras)
}

/// Kraus operators `𝒜_k = ⟨k_E| U |0_E⟩` on A of the POVM induced by the
/// dilation.
pub fn dilation_kraus(unitary_ae: &ComplexMatrix, d_a: usize, ancilla_dim: usize) -> Result<Vec<ComplexMatrix>> {
    check_dilation(unitary_ae, d_a, ancilla_dim)?;
    Ok((0..ancilla_dim)
        .map(|k| ComplexMatrix::from_fn(d_a, d_a, |a2, a| unitary_ae[(a2 * ancilla_dim + k, a * ancilla_dim)]))
        .collect())
}

/// Ensemble produced by the refined POVM `{|k'⟩⟨k'| 𝒜_k}` acting on the
/// purification's first subsystem.
pub fn partitioned_povm_ensemble(purification: &Purification, kraus: &[ComplexMatrix]) -> Result<Ensemble> {
    let d_a = purification.state.dims()[0];
    let mut bras = Vec::with_capacity(d_a * kraus.len());
    // keep the (a', k) ordering of the dilated measurement
    for a2 in 0..d_a {
        for op in kraus {
            if op.rows() != d_a || op.cols() != d_a {
                return contract("Kraus operator does not act on the measured subsystem");
            }
            bras.push(op.row(a2).to_vec());
        }
    }
    relative_state_ensemble(&purification.state, &bras)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::purify;

    fn quick() -> SearchConfig {
        SearchConfig {
            restarts: 8,
            ..SearchConfig::default()
        }
    }

    #[test]
    fn classical_state_projective_minimum_is_zero() {
        let rho = DensityMatrix::new(vec![2, 2], ComplexMatrix::from_real_diagonal(&[0.3, 0.0, 0.0, 0.7])).unwrap();
        let r = projective_search(&rho, 0, &quick()).unwrap();
        assert!(r.value.abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn pure_state_povm_minimum_is_zero() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState::new(vec![2, 2], vec![C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)]).unwrap();
        let r = povm_search(&psi.density(), 0, &quick()).unwrap();
        assert!(r.value.abs() < 1e-9);
    }

    #[test]
    fn identity_dilation_reproduces_eigen_ensemble() {
        let rho = DensityMatrix::new(
            vec![2, 2],
            ComplexMatrix::from_real_rows(&[
                &[0.5, 0.0, 0.0, 0.2],
                &[0.0, 0.0, 0.0, 0.0],
                &[0.0, 0.0, 0.0, 0.0],
                &[0.2, 0.0, 0.0, 0.5],
            ])
            .unwrap(),
        )
        .unwrap();
        let p = purify(&rho).unwrap();
        let ens = dilated_ensemble(&p, &ComplexMatrix::identity(2), 1).unwrap();
        let bc = p.marginal(&[1, 2]).unwrap();
        assert!(ens.reconstruction_error(&bc) < 1e-12);
        assert_eq!(ens.len(), 2);
    }

    #[test]
    fn non_unitary_dilation_rejected() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        let p = purify(&rho).unwrap();
        let bad = ComplexMatrix::identity(4).scale_real(0.9);
        assert!(dilated_ensemble(&p, &bad, 2).is_err());
    }

    #[test]
    fn ensemble_search_needs_enough_components() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        assert!(ensemble_eof_search(&rho, 3, &quick()).is_err());
    }
}
