//! Conditional entropy, both discord variants, the d-component EoF and the
//! purification-duality routing.
//!
//! For a bipartite `ρ_AB` measured on `A`, purify to `|Ψ_ABC⟩`. Measuring
//! `A` in a basis yields an ensemble of `ρ_BC`, so the projective minimum
//! `S_I(B|A)` is the `d_A`-component EoF of `ρ_BC`; allowing POVMs reaches
//! every pure-state ensemble, so `S_II(B|A) = E(ρ_BC)`. Whenever `ρ_BC` is
//! a two-qubit state (`d_B = 2`, rank `ρ_AB ≤ 2`) that value is exact via
//! the Wootters formula and no search is needed.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{contract, Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::measurement::{conditional_entropy_for, ProjectiveMeasurement};
use crate::optim::golden_section;
use crate::oracle::{
    ensemble_eof_search, povm_search, projective_search, qubit_basis, SearchConfig, SearchResult,
};
use crate::pair::{eof_two_qubit, entropy_entanglement};
use crate::state::{partial_trace, purify, von_neumann_entropy, DensityMatrix, RANK_CUTOFF};

pub use crate::measurement::{Ensemble, RankOnePovm};

/// How a value was obtained, ordered from most to least exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    /// Closed form.
    Analytic,
    /// Purification duality reduced to a closed form (or a one/two-angle
    /// qubit minimization).
    Duality,
    /// Numeric search; the value is an upper bound.
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Analytic => "analytic",
            Method::Duality => "duality",
            Method::Oracle => "oracle",
        })
    }
}

/// Discord variant: projective (I) or POVM (II) conditional entropy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Projective,
    Povm,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Projective => "I",
            Variant::Povm => "II",
        })
    }
}

/// Which evaluation routes `discord` may use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Route {
    /// Exact routes where available, searches elsewhere.
    #[default]
    Auto,
    /// Exact routes only; anything else is `Error::Unsupported`.
    Analytic,
    /// Searches everywhere, even where an exact route exists.
    Oracle,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DiscordOptions {
    pub route: Route,
    pub search: SearchConfig,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionalEntropy {
    pub value: f64,
    pub method: Method,
    /// False when a search hit its iteration cap; the value is still an
    /// upper bound.
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct ProjectiveOutcome {
    pub value: f64,
    pub measurement: ProjectiveMeasurement,
    pub converged: bool,
    pub spread: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationReport {
    pub variant: Variant,
    /// Index of the measured party in the input state.
    pub measured: usize,
    pub s_a: f64,
    pub s_b: f64,
    pub s_ab: f64,
    pub mutual_information: f64,
    /// `S(ρ_B) − S(ρ_B|A)` for the report's variant.
    pub classical_j: f64,
    pub conditional_entropy_i: f64,
    pub conditional_entropy_ii: f64,
    pub discord_i: f64,
    pub discord_ii: f64,
    /// `E(ρ_AB)`.
    pub eof_ab: f64,
    /// `E(ρ_BC)` of the purification, equal to `S_II(B|A)`.
    pub eof_bc: f64,
    /// `E^[d](ρ_BC)` with `d = d_A`, equal to `S_I(B|A)`.
    pub eof_d_component: f64,
    pub duality_residual: Option<f64>,
    pub method: Method,
    pub converged: bool,
}

impl CorrelationReport {
    pub fn discord(&self) -> f64 {
        match self.variant {
            Variant::Projective => self.discord_i,
            Variant::Povm => self.discord_ii,
        }
    }

    /// Lists every violated report invariant at tolerance `tol`.
    pub fn invariant_violations(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        let j_i = self.s_b - self.conditional_entropy_i;
        let j_ii = self.s_b - self.conditional_entropy_ii;
        if (self.mutual_information - j_i - self.discord_i).abs() > tol {
            out.push("I != J + Q (variant I)".to_string());
        }
        if (self.mutual_information - j_ii - self.discord_ii).abs() > tol {
            out.push("I != J + Q (variant II)".to_string());
        }
        if (self.mutual_information - self.classical_j - self.discord()).abs() > tol {
            out.push("I != J + Q (reported variant)".to_string());
        }
        if self.discord_ii > self.discord_i + tol {
            out.push(format!("Q^II = {} exceeds Q^I = {}", self.discord_ii, self.discord_i));
        }
        if self.eof_d_component < self.eof_bc - tol {
            out.push(format!(
                "E^[d] = {} below E(rho_BC) = {}",
                self.eof_d_component, self.eof_bc
            ));
        }
        out
    }
}

/// `ρ` reordered so that the measured party comes first.
fn oriented(rho: &DensityMatrix, measured: usize) -> Result<DensityMatrix> {
    if rho.dims().len() != 2 {
        return contract(format!("expected a bipartite state, got dims {:?}", rho.dims()));
    }
    match measured {
        0 => Ok(rho.clone()),
        1 => rho.swap_parties(),
        _ => contract(format!("measured party must be 0 or 1, got {measured}")),
    }
}

/// `E(ρ_BC)` through purification and the Wootters formula, when `ρ_BC` fits
/// in two qubits. Input is oriented with the measured party first.
fn duality_eof_bc(rho: &DensityMatrix) -> Result<Option<f64>> {
    let d_b = rho.dims()[1];
    let rank = rho.rank(RANK_CUTOFF);
    if d_b != 2 || rank > 2 {
        return Ok(None);
    }
    let p = purify(rho)?;
    if p.ancilla_dim() == 1 {
        // C is trivial: every relative state is a product state
        return Ok(Some(0.0));
    }
    let bc = p.marginal(&[1, 2])?;
    Ok(Some(eof_two_qubit(&bc)?))
}

/// Minimum over orthonormal bases of `Σ_k p_k S(ρ_B^k)`, by search.
pub fn conditional_entropy_projective(rho: &DensityMatrix, measured: usize, cfg: &SearchConfig) -> Result<ProjectiveOutcome> {
    let r = projective_search(rho, measured, cfg)?;
    let measurement = match r.argmin {
        crate::oracle::Argmin::Projective(m) => m,
        _ => unreachable!("projective search returns a basis"),
    };
    Ok(ProjectiveOutcome {
        value: r.value,
        measurement,
        converged: r.converged,
        spread: r.spread,
    })
}

/// `S_II(B|A)`: exact through the duality when the unmeasured party is a
/// qubit and the rank is at most two, otherwise a POVM search.
pub fn conditional_entropy_povm(rho: &DensityMatrix, measured: usize, cfg: &SearchConfig) -> Result<ConditionalEntropy> {
    let rho = oriented(rho, measured)?;
    if let Some(value) = duality_eof_bc(&rho)? {
        return Ok(ConditionalEntropy {
            value,
            method: Method::Duality,
            converged: true,
        });
    }
    let r = povm_search(&rho, 0, cfg)?;
    Ok(ConditionalEntropy {
        value: r.value,
        method: Method::Oracle,
        converged: r.converged,
    })
}

/// `E(ρ)` for a bipartite state: entanglement entropy when pure, Wootters
/// for two qubits, the conditional-entropy route when the purification's
/// complementary pair is two-qubit, and an ensemble search otherwise.
pub fn entanglement_of_formation(rho: &DensityMatrix, route: Route, cfg: &SearchConfig) -> Result<(f64, Method)> {
    if rho.dims().len() != 2 {
        return contract(format!("expected a bipartite state, got dims {:?}", rho.dims()));
    }
    let rank = rho.rank(RANK_CUTOFF);
    if route != Route::Oracle {
        if rank == 1 {
            let p = purify(rho)?;
            let psi = crate::state::PureState::new(rho.dims().to_vec(), p.state.amplitudes().to_vec())?;
            return Ok((entropy_entanglement(&psi, &[0])?, Method::Analytic));
        }
        if rho.is_bipartite_with(2, 2) {
            return Ok((eof_two_qubit(rho)?, Method::Analytic));
        }
        if rank <= 2 && (rho.dims()[1] == 2 || rho.dims()[0] == 2) {
            let r = if rho.dims()[1] == 2 { rho.clone() } else { rho.swap_parties()? };
            return Ok((eof_via_conditional_entropy(&r)?, Method::Duality));
        }
        if route == Route::Analytic {
            return Err(Error::Unsupported(format!(
                "no exact entanglement-of-formation route for dims {:?} at rank {rank}",
                rho.dims()
            )));
        }
    }
    let components = (rank * rank).clamp(4, 16).max(rank);
    let r = ensemble_eof_search(rho, components, cfg)?;
    Ok((r.value, Method::Oracle))
}

/// Full correlation report for `rho` measured on party `measured`.
pub fn discord(rho: &DensityMatrix, measured: usize, variant: Variant, opts: &DiscordOptions) -> Result<CorrelationReport> {
    let oriented = oriented(rho, measured)?;
    let d_a = oriented.dims()[0];
    let s_a = von_neumann_entropy(&partial_trace(&oriented, &[0])?);
    let s_b = von_neumann_entropy(&partial_trace(&oriented, &[1])?);
    let s_ab = von_neumann_entropy(&oriented);
    let mutual_information = s_a + s_b - s_ab;
    let rank = oriented.rank(RANK_CUTOFF);
    let cfg = &opts.search;
    let mut converged = true;

    let exact_bc = if opts.route == Route::Oracle { None } else { duality_eof_bc(&oriented)? };

    // S_II
    let (mut cond_ii, mut method_ii) = match exact_bc {
        Some(v) => (v, Method::Duality),
        None if opts.route == Route::Analytic => {
            return Err(Error::Unsupported(format!(
                "POVM conditional entropy needs d_B = 2 and rank <= 2 for an exact route (dims {:?}, rank {rank})",
                oriented.dims()
            )))
        }
        None => {
            let r = povm_search(&oriented, 0, cfg)?;
            converged &= r.converged;
            (r.value, Method::Oracle)
        }
    };

    // S_I: pure states give pure relative states for every basis; for a
    // qubit measured party projective measurements are taken as optimal
    // among POVMs; with d_A >= 4 a basis reaches any four-member ensemble of
    // a two-qubit ρ_BC, which contains an optimal one.
    let (cond_i, method_i) = if opts.route != Route::Oracle && rank == 1 {
        (0.0, Method::Analytic)
    } else if let (Some(v), true) = (exact_bc, d_a == 2 || d_a >= 4) {
        (v, Method::Duality)
    } else if opts.route == Route::Analytic {
        return Err(Error::Unsupported(format!(
            "no exact projective conditional-entropy route for dims {:?}",
            oriented.dims()
        )));
    } else {
        let r = projective_search(&oriented, 0, cfg)?;
        converged &= r.converged;
        (r.value, Method::Oracle)
    };
    if method_ii == Method::Oracle && cond_i < cond_ii {
        // projective measurements are POVMs too
        cond_ii = cond_i;
        method_ii = method_ii.max(method_i);
    }

    let (eof_ab, method_e) = entanglement_of_formation(&oriented, opts.route, cfg)?;

    let discord_i = s_a + cond_i - s_ab;
    let discord_ii = s_a + cond_ii - s_ab;
    let cond = match variant {
        Variant::Projective => cond_i,
        Variant::Povm => cond_ii,
    };
    Ok(CorrelationReport {
        variant,
        measured,
        s_a,
        s_b,
        s_ab,
        mutual_information,
        classical_j: s_b - cond,
        conditional_entropy_i: cond_i,
        conditional_entropy_ii: cond_ii,
        discord_i,
        discord_ii,
        eof_ab,
        eof_bc: cond_ii,
        eof_d_component: cond_i,
        duality_residual: None,
        method: method_i.max(method_ii).max(method_e),
        converged,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DComponentEof {
    /// Searched minimum over `d`-member decompositions.
    pub value: f64,
    /// Wootters EoF, a lower bound.
    pub eof: f64,
    /// True when an optimal Wootters decomposition is known to fit in `d`
    /// members, so `value` should equal `eof`.
    pub certified: bool,
}

/// `E^[d](ρ)` for a two-qubit state.
pub fn d_component_eof(rho: &DensityMatrix, d: usize, cfg: &SearchConfig) -> Result<DComponentEof> {
    if !rho.is_bipartite_with(2, 2) {
        return contract(format!("expected a two-qubit state, got dims {:?}", rho.dims()));
    }
    let rank = rho.rank(RANK_CUTOFF);
    if d < rank {
        return contract(format!("{d} components cannot realize a rank-{rank} state"));
    }
    let eof = eof_two_qubit(rho)?;
    let concurrence = crate::pair::concurrence_two_qubit(rho)?;
    let certified = d >= 4 || rank == 1 || (concurrence > 0.0 && d >= rank);
    let value = if rank == 1 {
        eof
    } else {
        ensemble_eof_search(rho, d, cfg)?.value
    };
    Ok(DComponentEof { value, eof, certified })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualReport {
    pub q_ab: f64,
    pub e_ab: f64,
    pub q_ac: f64,
    pub q_ca: f64,
    /// `|(Q^II_AB − E(ρ_AB)) − (Q^II_AC − Q^II_CA)|`.
    pub residual: f64,
}

/// Checks the ordering identity `Q^II_AB − E(ρ_AB) = Q^II_AC − Q^II_CA` on
/// the purification of `ρ_AB`. The left side goes through the exact routes;
/// the two discords of `ρ_AC` come from direct POVM searches.
pub fn duality_residual(rho: &DensityMatrix, cfg: &SearchConfig) -> Result<ResidualReport> {
    if rho.dims().len() != 2 {
        return contract(format!("expected a bipartite state, got dims {:?}", rho.dims()));
    }
    let p = purify(rho)?;
    let s_a = von_neumann_entropy(&p.marginal(&[0])?);
    let s_c = von_neumann_entropy(&p.marginal(&[2])?);
    let s_ab = von_neumann_entropy(rho);
    let rho_ac = p.marginal(&[0, 2])?;
    let s_ac = von_neumann_entropy(&rho_ac);

    let cond_b_a = conditional_entropy_povm(rho, 0, cfg)?.value;
    let q_ab = s_a + cond_b_a - s_ab;
    let (e_ab, _) = entanglement_of_formation(rho, Route::Auto, cfg)?;

    let cond_c_a = povm_search(&rho_ac, 0, cfg)?.value;
    let cond_a_c = povm_search(&rho_ac, 1, cfg)?.value;
    let q_ac = s_a + cond_c_a - s_ac;
    let q_ca = s_c + cond_a_c - s_ac;
    Ok(ResidualReport {
        q_ab,
        e_ab,
        q_ac,
        q_ca,
        residual: ((q_ab - e_ab) - (q_ac - q_ca)).abs(),
    })
}

/// Minimum over qubit projective measurements of the conditional entropy of
/// the other party, to about `1e-12` in the objective.
pub fn qubit_projective_minimum(rho: &DensityMatrix, measured: usize) -> Result<SearchResult> {
    let cfg = SearchConfig {
        restarts: 8,
        max_iterations: 4000,
        objective_tolerance: 1e-14,
        ..SearchConfig::default()
    };
    let dims = rho.dims();
    if dims.len() != 2 || dims[measured.min(1)] != 2 {
        return contract(format!("measured party of {dims:?} is not a qubit"));
    }
    projective_search(rho, measured, &cfg)
}

/// `E(ρ_AB) = S(ρ_B|C)`: the entanglement of formation of `ρ_AB` as the
/// conditional entropy of `ρ_BC` with the purifying qubit `C` measured.
/// Requires `d_B = 2` and rank at most two so that `ρ_BC` is two-qubit.
pub fn eof_via_conditional_entropy(rho: &DensityMatrix) -> Result<f64> {
    let dims = rho.dims();
    if dims.len() != 2 || dims[1] != 2 {
        return Err(Error::Unsupported(format!(
            "conditional-entropy EoF route needs a qubit second party, got dims {dims:?}"
        )));
    }
    let rank = rho.rank(RANK_CUTOFF);
    if rank > 2 {
        return Err(Error::Unsupported(format!(
            "conditional-entropy EoF route needs rank <= 2, got {rank}"
        )));
    }
    let p = purify(rho)?;
    if p.ancilla_dim() == 1 {
        let psi = crate::state::PureState::new(dims.to_vec(), p.state.amplitudes().to_vec())?;
        return entropy_entanglement(&psi, &[0]);
    }
    let bc = p.marginal(&[1, 2])?;
    Ok(qubit_projective_minimum(&bc, 1)?.value)
}

/// Conditional entropy of a two-qubit X state with the given party
/// measured. A local diagonal unitary first makes the anti-diagonal real and
/// nonnegative; then a 721-point scan of the polar angle in the two azimuthal
/// planes that can carry the optimum is refined by golden section.
pub fn x_state_conditional_entropy(rho: &DensityMatrix, measured: usize) -> Result<f64> {
    if !rho.is_bipartite_with(2, 2) {
        return contract(format!("expected a two-qubit state, got dims {:?}", rho.dims()));
    }
    let m = rho.matrix();
    let off_x = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && i + j != 3)
        .map(|(i, j)| m[(i, j)].norm())
        .fold(0.0, f64::max);
    if off_x > 1e-12 {
        return contract(format!("not an X state (largest off-X entry {off_x:.3e})"));
    }
    let (arg14, arg23) = (m[(0, 3)].arg(), m[(1, 2)].arg());
    let (a, b) = (0.5 * (arg14 + arg23), 0.5 * (arg14 - arg23));
    let phase = |t: f64| C64::from_polar(1.0, t);
    let u = ComplexMatrix::from_fn(4, 4, |i, j| {
        if i != j {
            return C64::new(0.0, 0.0);
        }
        let (x, y) = (i / 2, i % 2);
        phase(x as f64 * a) * phase(y as f64 * b)
    });
    let real = rho.conjugate_by(&u)?;
    let rho = &real;
    const SCAN: usize = 721;
    let objective = |theta: f64, phi: f64| -> f64 {
        let basis = qubit_basis(theta, phi);
        let bras: Vec<Vec<C64>> = (0..2).map(|k| basis.column(k).iter().map(|z| z.conj()).collect()).collect();
        conditional_entropy_for(rho, measured, &bras).unwrap_or(f64::INFINITY)
    };
    let mut best = f64::INFINITY;
    for phi in [0.0, PI / 2.0] {
        let step = PI / (SCAN - 1) as f64;
        let (mut arg, mut val) = (0usize, f64::INFINITY);
        for i in 0..SCAN {
            let v = objective(i as f64 * step, phi);
            if v < val {
                val = v;
                arg = i;
            }
        }
        let lo = (arg as f64 - 1.0).max(0.0) * step;
        let hi = ((arg + 1) as f64 * step).min(PI);
        let (_, refined) = golden_section(|t| objective(t, phi), lo, hi, 1e-12);
        best = best.min(val).min(refined);
    }
    Ok(best)
}

/// Projective measurement given by Bloch angles, for callers that want to
/// evaluate a specific basis.
pub fn qubit_measurement(subsystem: usize, theta: f64, phi: f64) -> ProjectiveMeasurement {
    ProjectiveMeasurement::new(subsystem, qubit_basis(theta, phi)).expect("Bloch basis is orthonormal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use crate::state::PureState;

    fn quick() -> DiscordOptions {
        DiscordOptions {
            route: Route::Auto,
            search: SearchConfig {
                restarts: 8,
                ..SearchConfig::default()
            },
        }
    }

    fn bell() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(vec![2, 2], vec![C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)])
            .unwrap()
            .density()
    }

    #[test]
    fn bell_state_report() {
        let r = discord(&bell(), 0, Variant::Povm, &quick()).unwrap();
        assert!((r.discord_i - 1.0).abs() < 1e-12);
        assert!((r.discord_ii - 1.0).abs() < 1e-12);
        assert!((r.eof_ab - 1.0).abs() < 1e-12);
        assert!((r.mutual_information - 2.0).abs() < 1e-12);
        assert!(r.invariant_violations(1e-9).is_empty());
    }

    #[test]
    fn classical_mixture_has_zero_conditional_entropy() {
        let rho = DensityMatrix::new(vec![2, 2], ComplexMatrix::from_real_diagonal(&[0.4, 0.0, 0.0, 0.6])).unwrap();
        let r = conditional_entropy_projective(&rho, 0, &quick().search).unwrap();
        assert!(r.value.abs() < 1e-10);
        assert!(conditional_entropy_povm(&rho, 0, &quick().search).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn schmidt_state_conditional_entropy_is_zero() {
        let (a, b) = (0.3f64.sqrt(), 0.7f64.sqrt());
        let rho = PureState::new(vec![2, 2], vec![C64::new(a, 0.0), ZERO, ZERO, C64::new(b, 0.0)])
            .unwrap()
            .density();
        let r = conditional_entropy_projective(&rho, 0, &quick().search).unwrap();
        assert!(r.value.abs() < 1e-10);
        let ii = conditional_entropy_povm(&rho, 0, &quick().search).unwrap();
        assert_eq!(ii.value, 0.0);
        assert_eq!(ii.method, Method::Duality);
    }

    #[test]
    fn analytic_route_refuses_unsupported_shapes() {
        let mut rng = crate::random::stream_rng(5, 0);
        let rho = crate::random::random_density(&[2, 3], 3, &mut rng).unwrap();
        let opts = DiscordOptions {
            route: Route::Analytic,
            ..quick()
        };
        assert!(matches!(discord(&rho, 0, Variant::Povm, &opts), Err(Error::Unsupported(_))));
        assert!(matches!(eof_via_conditional_entropy(&rho), Err(Error::Unsupported(_))));
    }

    #[test]
    fn bell_eof_via_conditional_entropy() {
        assert!((eof_via_conditional_entropy(&bell()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn d_component_eof_of_pure_state() {
        let (a, b) = (0.3f64.sqrt(), 0.7f64.sqrt());
        let rho = PureState::new(vec![2, 2], vec![C64::new(a, 0.0), ZERO, ZERO, C64::new(b, 0.0)])
            .unwrap()
            .density();
        let r = d_component_eof(&rho, 1, &quick().search).unwrap();
        assert!((r.value - 0.881291).abs() < 1e-6);
        assert!(r.certified);
        let mixed = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        assert!(d_component_eof(&mixed, 2, &quick().search).is_err());
    }
}
