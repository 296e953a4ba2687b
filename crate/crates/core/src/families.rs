//! Closed-form state families: canonical three-qubit pure states, a rank-2
//! family on 4×2, and a two-qubit state under one-sided phase damping.

use std::f64::consts::PI;

use crate::discord::{x_state_conditional_entropy, CorrelationReport, Method, Variant};
use crate::error::{contract, Result};
use crate::linalg::{ComplexMatrix, C64, ZERO};
use crate::pair::{concurrence_two_qubit, eof_from_concurrence};
use crate::state::{binary_entropy, shannon_bits, von_neumann_entropy, DensityMatrix, PureState};

const PARAM_TOL: f64 = 1e-12;

fn require_probability(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) || x.is_nan() {
        return contract(format!("{name} = {x} is not in [0, 1]"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// three qubits

/// `λ₀|000⟩ + λ₁e^{iφ}|010⟩ + λ₂|011⟩ + λ₃|110⟩ + λ₄|111⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreeQubitParams {
    pub lambda: [f64; 5],
    pub phi: f64,
}

impl ThreeQubitParams {
    pub fn new(lambda: [f64; 5], phi: f64) -> Result<Self> {
        if lambda.iter().any(|&l| l < 0.0 || l.is_nan()) {
            return contract(format!("coefficients must be nonnegative, got {lambda:?}"));
        }
        let norm: f64 = lambda.iter().map(|l| l * l).sum();
        if (norm - 1.0).abs() > PARAM_TOL {
            return contract(format!("Σ λ² = {norm} differs from 1"));
        }
        Ok(Self { lambda, phi })
    }

    /// Rescales nonnegative coefficients to unit norm.
    pub fn normalized(lambda: [f64; 5], phi: f64) -> Result<Self> {
        let norm: f64 = lambda.iter().map(|l| l * l).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 0.0 {
            return contract("all coefficients are zero");
        }
        Self::new(lambda.map(|l| l / norm), phi)
    }
}

/// A pair of qubits out of A, B, C (0, 1, 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitPair {
    AB,
    BC,
    AC,
}

impl QubitPair {
    pub fn members(self) -> [usize; 2] {
        match self {
            QubitPair::AB => [0, 1],
            QubitPair::BC => [1, 2],
            QubitPair::AC => [0, 2],
        }
    }

    pub fn third(self) -> usize {
        3 - self.members()[0] - self.members()[1]
    }

    fn from_members(x: usize, y: usize) -> Self {
        match (x.min(y), x.max(y)) {
            (0, 1) => QubitPair::AB,
            (1, 2) => QubitPair::BC,
            _ => QubitPair::AC,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairConcurrences {
    pub ab: f64,
    pub bc: f64,
    pub ac: f64,
}

impl PairConcurrences {
    pub fn get(&self, pair: QubitPair) -> f64 {
        match pair {
            QubitPair::AB => self.ab,
            QubitPair::BC => self.bc,
            QubitPair::AC => self.ac,
        }
    }
}

pub fn three_qubit_state(params: &ThreeQubitParams) -> PureState {
    let l = params.lambda;
    let mut amps = vec![ZERO; 8];
    amps[0b000] = C64::new(l[0], 0.0);
    amps[0b010] = C64::from_polar(l[1], params.phi);
    amps[0b011] = C64::new(l[2], 0.0);
    amps[0b110] = C64::new(l[3], 0.0);
    amps[0b111] = C64::new(l[4], 0.0);
    PureState::normalized(vec![2, 2, 2], amps).expect("validated coefficients")
}

/// `C_AB = 2λ₀λ₃`, `C_BC = 2λ₀λ₂`, `C_AC = 2|λ₂λ₃ − λ₁λ₄e^{iφ}|`.
pub fn three_qubit_concurrences(params: &ThreeQubitParams) -> PairConcurrences {
    let l = params.lambda;
    let ac = C64::new(l[2] * l[3], 0.0) - C64::from_polar(l[1] * l[4], params.phi);
    PairConcurrences {
        ab: 2.0 * l[0] * l[3],
        bc: 2.0 * l[0] * l[2],
        ac: 2.0 * ac.norm(),
    }
}

/// Report for `pair` with `measured` (0 or 1) picking the measured member.
/// The third qubit purifies the pair, so the conditional entropy of the
/// unmeasured member equals the EoF of that member with the third qubit;
/// the two-member optimal decomposition makes projective measurements
/// sufficient.
pub fn three_qubit_report(params: &ThreeQubitParams, pair: QubitPair, measured: usize) -> Result<CorrelationReport> {
    if measured > 1 {
        return contract(format!("measured side must be 0 or 1, got {measured}"));
    }
    let psi = three_qubit_state(params);
    let [x, y] = pair.members();
    let (m, n) = if measured == 0 { (x, y) } else { (y, x) };
    let z = pair.third();
    let conc = three_qubit_concurrences(params);
    let s_m = von_neumann_entropy(&psi.reduced(&[m])?);
    let s_n = von_neumann_entropy(&psi.reduced(&[n])?);
    let s_mn = von_neumann_entropy(&psi.reduced(&[z])?);
    let cond = eof_from_concurrence(conc.get(QubitPair::from_members(n, z)).min(1.0))?;
    let eof = eof_from_concurrence(conc.get(pair).min(1.0))?;
    let mutual_information = s_m + s_n - s_mn;
    let q = s_m + cond - s_mn;
    Ok(CorrelationReport {
        variant: Variant::Povm,
        measured,
        s_a: s_m,
        s_b: s_n,
        s_ab: s_mn,
        mutual_information,
        classical_j: s_n - cond,
        conditional_entropy_i: cond,
        conditional_entropy_ii: cond,
        discord_i: q,
        discord_ii: q,
        eof_ab: eof,
        eof_bc: cond,
        eof_d_component: cond,
        duality_residual: None,
        method: Method::Analytic,
        converged: true,
    })
}

/// The two candidate `Δ` expressions for the `λ₂ = λ₃` subfamily.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaForm {
    /// `Δ = √(1 − λ₀²λ₂²)`.
    Unscaled,
    /// `Δ = √(1 − C²)` with `C = 2λ₀λ₂`.
    FromConcurrence,
}

/// `−Σ± (1±Δ)/2 log₂ (1±Δ)/2` for the chosen `Δ`.
pub fn symmetric_case_value(params: &ThreeQubitParams, form: DeltaForm) -> f64 {
    let (l0, l2) = (params.lambda[0], params.lambda[2]);
    let delta = match form {
        DeltaForm::Unscaled => (1.0 - l0 * l0 * l2 * l2).max(0.0).sqrt(),
        DeltaForm::FromConcurrence => (1.0 - 4.0 * l0 * l0 * l2 * l2).max(0.0).sqrt(),
    };
    binary_entropy(0.5 * (1.0 + delta))
}

// ---------------------------------------------------------------------------
// rank-2 states on 4×2

/// `p₁|ψ₁⟩⟨ψ₁| + p₂|ψ₂⟩⟨ψ₂|` with `|ψ₁⟩ = cosφ|00⟩ + sinφ|11⟩`,
/// `|ψ₂⟩ = sinφ|a₃0⟩ + cosφ|a₄1⟩`, `|a₃⟩ = cosθ₁|1⟩ + sinθ₁|2⟩`,
/// `|a₄⟩ = cosθ₂|0⟩ + sinθ₂|3⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rank2Params {
    pub p1: f64,
    pub p2: f64,
    pub phi: f64,
    pub theta1: f64,
    pub theta2: f64,
}

impl Rank2Params {
    pub fn new(p1: f64, p2: f64, phi: f64, theta1: f64, theta2: f64) -> Result<Self> {
        require_probability("p1", p1)?;
        require_probability("p2", p2)?;
        if (p1 + p2 - 1.0).abs() > PARAM_TOL {
            return contract(format!("p1 + p2 = {} differs from 1", p1 + p2));
        }
        Ok(Self {
            p1,
            p2,
            phi,
            theta1,
            theta2,
        })
    }

    /// `p₁ = p₂ = ½`, `θ₁ = 0`, `θ₂ = π/3`, parametrized by `sin²φ`.
    pub fn figure_one(sin2_phi: f64) -> Result<Self> {
        require_probability("sin^2 phi", sin2_phi)?;
        Self::new(0.5, 0.5, sin2_phi.sqrt().asin(), 0.0, PI / 3.0)
    }

    pub fn is_balanced(&self) -> bool {
        (self.p1 - 0.5).abs() <= PARAM_TOL
    }
}

fn rank2_eigenvectors(p: &Rank2Params) -> [Vec<C64>; 2] {
    let (c, s) = (p.phi.cos(), p.phi.sin());
    let idx = |a: usize, b: usize| a * 2 + b;
    let mut psi1 = vec![ZERO; 8];
    psi1[idx(0, 0)] = C64::new(c, 0.0);
    psi1[idx(1, 1)] = C64::new(s, 0.0);
    let mut psi2 = vec![ZERO; 8];
    psi2[idx(1, 0)] = C64::new(s * p.theta1.cos(), 0.0);
    psi2[idx(2, 0)] = C64::new(s * p.theta1.sin(), 0.0);
    psi2[idx(0, 1)] = C64::new(c * p.theta2.cos(), 0.0);
    psi2[idx(3, 1)] = C64::new(c * p.theta2.sin(), 0.0);
    [psi1, psi2]
}

pub fn rank2_state(params: &Rank2Params) -> DensityMatrix {
    let [psi1, psi2] = rank2_eigenvectors(params);
    let m = &ComplexMatrix::outer(&psi1, &psi1).scale_real(params.p1)
        + &ComplexMatrix::outer(&psi2, &psi2).scale_real(params.p2);
    DensityMatrix::new(vec![4, 2], m).expect("family members are valid states")
}

/// `√p₁|ψ₁⟩|0⟩ + √p₂|ψ₂⟩|1⟩` on A⊗B⊗C.
pub fn rank2_purification(params: &Rank2Params) -> PureState {
    let [psi1, psi2] = rank2_eigenvectors(params);
    let (w1, w2) = (params.p1.sqrt(), params.p2.sqrt());
    let mut amps = vec![ZERO; 16];
    for x in 0..8 {
        amps[x * 2] = psi1[x] * w1;
        amps[x * 2 + 1] = psi2[x] * w2;
    }
    PureState::normalized(vec![4, 2, 2], amps).expect("nonzero purification")
}

/// The X-shaped `ρ_BC` of the purification, written out entry by entry.
pub fn rank2_bc_xstate(params: &Rank2Params) -> DensityMatrix {
    let (c2, s2) = (params.phi.cos().powi(2), params.phi.sin().powi(2));
    let (p1, p2) = (params.p1, params.p2);
    let g = (p1 * p2).sqrt();
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = C64::new(p1 * c2, 0.0);
    m[(1, 1)] = C64::new(p2 * s2, 0.0);
    m[(2, 2)] = C64::new(p1 * s2, 0.0);
    m[(3, 3)] = C64::new(p2 * c2, 0.0);
    let r14 = C64::new(g * c2 * params.theta2.cos(), 0.0);
    let r23 = C64::new(g * s2 * params.theta1.cos(), 0.0);
    m[(0, 3)] = r14;
    m[(3, 0)] = r14;
    m[(1, 2)] = r23;
    m[(2, 1)] = r23;
    DensityMatrix::new(vec![2, 2], m).expect("X state is valid")
}

/// Closed-form spectrum of `ρ_A` (unsorted: `λ₁, λ₂, λ₃, λ₄`).
pub fn rank2_rho_a_spectrum(params: &Rank2Params) -> [f64; 4] {
    let (c2, s2) = (params.phi.cos().powi(2), params.phi.sin().powi(2));
    let pp = 4.0 * params.p1 * params.p2;
    let r1 = (1.0 - pp * params.theta1.sin().powi(2)).max(0.0).sqrt();
    let r2 = (1.0 - pp * params.theta2.sin().powi(2)).max(0.0).sqrt();
    [
        0.5 * s2 * (1.0 + r1),
        0.5 * s2 * (1.0 - r1),
        0.5 * c2 * (1.0 + r2),
        0.5 * c2 * (1.0 - r2),
    ]
}

/// Closed-form spin-flip roots of `ρ_BC` (unsorted: `λ₁ᶜ, …, λ₄ᶜ`).
pub fn rank2_wootters_lambdas(params: &Rank2Params) -> [f64; 4] {
    let (c2, s2) = (params.phi.cos().powi(2), params.phi.sin().powi(2));
    let root = (1.0 - (params.p1 - params.p2).powi(2)).max(0.0).sqrt();
    let g = 2.0 * (params.p1 * params.p2).sqrt();
    [
        0.5 * s2 * (root + g * params.theta1.cos()),
        0.5 * s2 * (root - g * params.theta1.cos()),
        0.5 * c2 * (root + g * params.theta2.cos()),
        0.5 * c2 * (root - g * params.theta2.cos()),
    ]
}

/// Correlation coefficients of the Bell-diagonal `ρ_BC` at `p₁ = p₂ = ½`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiValues {
    pub chi1: f64,
    pub chi2: f64,
    pub chi3: f64,
    /// `max |χ_i|`.
    pub chi: f64,
}

pub fn rank2_chi(params: &Rank2Params) -> ChiValues {
    let (c2, s2) = (params.phi.cos().powi(2), params.phi.sin().powi(2));
    let chi1 = -(2.0 * params.phi).cos();
    let chi2 = c2 * params.theta2.cos() + s2 * params.theta1.cos();
    let chi3 = c2 * params.theta2.cos() - s2 * params.theta1.cos();
    ChiValues {
        chi1,
        chi2,
        chi3,
        chi: chi1.abs().max(chi2.abs()).max(chi3.abs()),
    }
}

/// `E = −Σ± (1±χ)/2 log₂ (1±χ)/2`.
pub fn bell_diagonal_conditional_entropy(chi: f64) -> f64 {
    binary_entropy(0.5 * (1.0 + chi.clamp(-1.0, 1.0)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rank2Report {
    pub rho_a_spectrum: [f64; 4],
    pub wootters_lambdas: [f64; 4],
    /// Present only for `p₁ = p₂ = ½`.
    pub chi: Option<ChiValues>,
    pub concurrence_bc: f64,
    pub s_a: f64,
    pub s_ab: f64,
    pub eof_bc: f64,
    /// `Q_AB` (measured on A); both variants coincide here.
    pub discord: f64,
    /// `E(ρ_AB)`.
    pub eof: f64,
    /// `Analytic` for the balanced closed form, `Duality` for the X-state
    /// angle scan.
    pub eof_method: Method,
}

pub fn rank2_report(params: &Rank2Params) -> Result<Rank2Report> {
    let spectrum = rank2_rho_a_spectrum(params);
    let lc = rank2_wootters_lambdas(params);
    let largest = lc.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let concurrence_bc = (2.0 * largest - lc.iter().sum::<f64>()).clamp(0.0, 1.0);
    let eof_bc = eof_from_concurrence(concurrence_bc)?;
    let s_a = shannon_bits(&spectrum);
    let s_ab = binary_entropy(params.p1);
    let (chi, eof, eof_method) = if params.is_balanced() {
        let chi = rank2_chi(params);
        (Some(chi), bell_diagonal_conditional_entropy(chi.chi), Method::Analytic)
    } else {
        let bc = rank2_bc_xstate(params);
        (None, x_state_conditional_entropy(&bc, 1)?, Method::Duality)
    };
    Ok(Rank2Report {
        rho_a_spectrum: spectrum,
        wootters_lambdas: lc,
        chi,
        concurrence_bc,
        s_a,
        s_ab,
        eof_bc,
        discord: s_a + eof_bc - s_ab,
        eof,
        eof_method,
    })
}

// ---------------------------------------------------------------------------
// phase damping

/// `α|00⟩ + β|11⟩` with one qubit dephased: the coherence `e^{−γt}`
/// multiplies the off-diagonal terms. `α`, `β` are taken real and
/// nonnegative; their phases do not affect any measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseDampingParams {
    pub alpha_sq: f64,
    /// `e^{−γt}`.
    pub coherence: f64,
}

impl PhaseDampingParams {
    /// `p = 1 − e^{−γt}`.
    pub fn from_decay(alpha_sq: f64, p: f64) -> Result<Self> {
        require_probability("|alpha|^2", alpha_sq)?;
        require_probability("p", p)?;
        Ok(Self {
            alpha_sq,
            coherence: 1.0 - p,
        })
    }

    pub fn from_gamma_t(alpha_sq: f64, gamma_t: f64) -> Result<Self> {
        require_probability("|alpha|^2", alpha_sq)?;
        if gamma_t.is_nan() || gamma_t < 0.0 {
            return contract(format!("gamma*t = {gamma_t} must be nonnegative"));
        }
        Ok(Self {
            alpha_sq,
            coherence: (-gamma_t).exp(),
        })
    }

    pub fn decay(&self) -> f64 {
        1.0 - self.coherence
    }

    pub fn beta_sq(&self) -> f64 {
        1.0 - self.alpha_sq
    }

    /// `2|αβ| e^{−γt}`.
    pub fn concurrence(&self) -> f64 {
        (2.0 * (self.alpha_sq * self.beta_sq()).sqrt() * self.coherence).min(1.0)
    }

    /// `½ ± √(¼ − |αβ|²(1 − e^{−2γt}))`.
    pub fn joint_spectrum(&self) -> [f64; 2] {
        let ab = self.alpha_sq * self.beta_sq();
        let r = (0.25 - ab * (1.0 - self.coherence * self.coherence)).max(0.0).sqrt();
        [0.5 + r, 0.5 - r]
    }
}

pub fn phase_damping_state(params: &PhaseDampingParams) -> DensityMatrix {
    let a = params.alpha_sq;
    let b = params.beta_sq();
    let off = C64::new(params.coherence * (a * b).sqrt(), 0.0);
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = C64::new(a, 0.0);
    m[(3, 3)] = C64::new(b, 0.0);
    m[(0, 3)] = off;
    m[(3, 0)] = off;
    DensityMatrix::new(vec![2, 2], m).expect("dephased state is valid")
}

/// Concurrences of `ρ_BC` and `ρ_AC` of the purification of the dephased
/// state; both vanish.
pub fn phase_damping_side_concurrences(params: &PhaseDampingParams) -> Result<(f64, f64)> {
    let rho = phase_damping_state(params);
    let p = crate::state::purify(&rho)?;
    if p.ancilla_dim() == 1 {
        return Ok((0.0, 0.0));
    }
    let bc = p.marginal(&[1, 2])?;
    let ac = p.marginal(&[0, 2])?;
    Ok((concurrence_two_qubit(&bc)?, concurrence_two_qubit(&ac)?))
}

/// Closed-form report measured on A: the conditional entropy vanishes, so
/// `Q = S(ρ_A) − S(ρ_AB)`, and `E` follows from the concurrence.
pub fn phase_damping_report(params: &PhaseDampingParams) -> Result<CorrelationReport> {
    let s_a = binary_entropy(params.alpha_sq);
    let s_ab = shannon_bits(&params.joint_spectrum());
    let eof = eof_from_concurrence(params.concurrence())?;
    let q = s_a - s_ab;
    Ok(CorrelationReport {
        variant: Variant::Povm,
        measured: 0,
        s_a,
        s_b: s_a,
        s_ab,
        mutual_information: 2.0 * s_a - s_ab,
        classical_j: s_a,
        conditional_entropy_i: 0.0,
        conditional_entropy_ii: 0.0,
        discord_i: q,
        discord_ii: q,
        eof_ab: eof,
        eof_bc: 0.0,
        eof_d_component: 0.0,
        duality_residual: None,
        method: Method::Analytic,
        converged: true,
    })
}
