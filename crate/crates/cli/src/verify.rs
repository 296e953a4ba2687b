use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qcorr::discord::{discord, duality_residual, DiscordOptions, Route, Variant};
use qcorr::families::*;
use qcorr::linalg::hermitian_eig;
use qcorr::pair::{concurrence_two_qubit, entropy_entanglement};
use qcorr::par::map_indexed;
use qcorr::random::{random_density, random_pure_state, random_unitary, stream_rng};
use qcorr::state::{partial_trace, purify, von_neumann_entropy};
use qcorr::{CorrelationReport, DensityMatrix, Execution, SearchConfig};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::{Failure, Outcome};

const DIMS: [&[usize]; 6] = [&[2, 2], &[3, 2], &[2, 3], &[4, 2], &[3, 3], &[2, 2, 2]];

#[derive(Clone, Debug)]
pub struct VerifyArgs {
    pub seed: u64,
    pub samples: usize,
    /// Where offending states are written on failure.
    pub dump_dir: PathBuf,
    pub execution: Execution,
}

impl Default for VerifyArgs {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 50,
            dump_dir: PathBuf::from("verify-failures"),
            execution: Execution::default(),
        }
    }
}

struct Spec {
    name: &'static str,
    slug: &'static str,
    tolerance: f64,
}

const CHECKS: [Spec; 12] = [
    Spec { name: "purification reproduces the state", slug: "purification", tolerance: 1e-10 },
    Spec { name: "eigendecomposition reconstructs", slug: "eig", tolerance: 1e-11 },
    Spec { name: "entropy unitary invariance", slug: "entropy-unitary", tolerance: 1e-9 },
    Spec { name: "entropy within [0, log2 d]", slug: "entropy-bounds", tolerance: 1e-12 },
    Spec { name: "concurrence local-unitary invariance", slug: "concurrence-lu", tolerance: 1e-8 },
    Spec { name: "pure-state collapse Q_I = Q_II = E", slug: "pure-collapse", tolerance: 1e-6 },
    Spec { name: "report invariants, exact routes", slug: "report-exact", tolerance: 1e-9 },
    Spec { name: "report invariants, oracle routes", slug: "report-oracle", tolerance: 1e-9 },
    Spec { name: "ordering identity residual", slug: "ordering-identity", tolerance: 5e-3 },
    Spec { name: "lambda2 = lambda3 subfamily Q_AB - E_AB", slug: "symmetric-subfamily", tolerance: 1e-6 },
    Spec { name: "family closed forms vs engine", slug: "families", tolerance: 1e-8 },
    Spec { name: "three-qubit concurrences vs marginals", slug: "three-qubit", tolerance: 1e-8 },
];

/// Worst violation of one check over the samples.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub tolerance: f64,
    pub max_violation: f64,
    pub worst_sample: usize,
    worst_state: Option<DensityMatrix>,
    slug: &'static str,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.max_violation <= self.tolerance
    }
}

type Observation = (f64, DensityMatrix);

fn report_violation(r: &CorrelationReport) -> f64 {
    let j_i = r.s_b - r.conditional_entropy_i;
    let j_ii = r.s_b - r.conditional_entropy_ii;
    [
        (r.mutual_information - j_i - r.discord_i).abs(),
        (r.mutual_information - j_ii - r.discord_ii).abs(),
        (r.mutual_information - r.classical_j - r.discord()).abs(),
        (r.discord_ii - r.discord_i).max(0.0),
        (r.eof_bc - r.eof_d_component).max(0.0),
        (-r.discord_ii).max(0.0),
        (-r.mutual_information).max(0.0),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

fn sample_checks(seed: u64, i: usize) -> qcorr::Result<Vec<Observation>> {
    let mut rng: ChaCha8Rng = stream_rng(seed, i as u64);
    let dims = DIMS[i % DIMS.len()];
    let n: usize = dims.iter().product();
    let quick = SearchConfig {
        seed,
        restarts: 8,
        ..SearchConfig::default()
    };
    let mut out = Vec::with_capacity(CHECKS.len());

    // purification
    let rank = 1 + i % 4;
    let rho = random_density(dims, rank, &mut rng)?;
    let keep: Vec<usize> = (0..dims.len()).collect();
    let back = purify(&rho)?.marginal(&keep)?;
    out.push((back.matrix().max_abs_diff(rho.matrix()), rho.clone()));

    // eigendecomposition
    let full = random_density(dims, n, &mut rng)?;
    let s = hermitian_eig(full.matrix())?;
    out.push((s.reconstruct().max_abs_diff(full.matrix()), full.clone()));

    // entropy
    let u = random_unitary(n, &mut rng);
    let rotated = full.conjugate_by(&u)?;
    let s0 = von_neumann_entropy(&full);
    out.push(((s0 - von_neumann_entropy(&rotated)).abs(), full.clone()));
    let bound = (n as f64).log2();
    out.push(((-s0).max(s0 - bound).max(0.0), full.clone()));

    // concurrence
    let pair = random_density(&[2, 2], 1 + i % 4, &mut rng)?;
    let local = random_unitary(2, &mut rng).kron(&random_unitary(2, &mut rng));
    let c0 = concurrence_two_qubit(&pair)?;
    let c1 = concurrence_two_qubit(&pair.conjugate_by(&local)?)?;
    out.push(((c0 - c1).abs(), pair));

    // pure-state collapse
    let pure_dims: &[usize] = if i.is_multiple_of(2) { &[2, 2] } else { &[4, 2] };
    let psi = random_pure_state(pure_dims, &mut rng)?;
    let e = entropy_entanglement(&psi, &[0])?;
    let r = discord(&psi.density(), 0, Variant::Povm, &DiscordOptions::default())?;
    let v = [r.discord_i - e, r.discord_ii - e, r.eof_ab - e, r.s_a - e]
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    out.push((v, psi.density()));

    // exact routes
    let exact_dims: &[usize] = if i.is_multiple_of(2) { &[2, 2] } else { &[4, 2] };
    let rho2 = random_density(exact_dims, 2, &mut rng)?;
    let side = i % 2;
    let opts = DiscordOptions {
        route: Route::Auto,
        search: quick,
    };
    let r = discord(&rho2, side, Variant::Povm, &opts)?;
    out.push((report_violation(&r), rho2));

    // oracle routes
    let rho3 = random_density(&[2, 2], 3, &mut rng)?;
    let r = discord(&rho3, 0, Variant::Povm, &opts)?;
    out.push((report_violation(&r), rho3));

    // ordering identity
    let rho4 = random_density(&[2, 2], 2, &mut rng)?;
    let res = duality_residual(
        &rho4,
        &SearchConfig {
            restarts: 16,
            ..quick
        },
    )?;
    out.push((res.residual, rho4));

    // λ₂ = λ₃, computed from the state rather than the closed form
    let l: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.05..1.0));
    let params = ThreeQubitParams::normalized([l[0], l[1], l[2], l[2], l[3]], rng.random_range(0.0..2.0 * PI))?;
    let rho_ab = three_qubit_state(&params).reduced(&[0, 1])?;
    let r = discord(&rho_ab, 0, Variant::Povm, &DiscordOptions::default())?;
    out.push(((r.discord_ii - r.eof_ab).abs(), rho_ab));

    // families against the generic engine
    let p1 = rng.random_range(0.0..1.0);
    let rp = Rank2Params::new(
        p1,
        1.0 - p1,
        rng.random_range(0.0..PI),
        rng.random_range(0.0..PI),
        rng.random_range(0.0..PI),
    )?;
    let closed = rank2_report(&rp)?;
    let state = rank2_state(&rp);
    let g = discord(&state, 0, Variant::Povm, &DiscordOptions::default())?;
    let mut v = (closed.discord - g.discord_ii).abs().max((closed.eof - g.eof_ab).abs());
    let pd = PhaseDampingParams::from_decay(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0))?;
    let closed = phase_damping_report(&pd)?;
    let g = discord(&phase_damping_state(&pd), 0, Variant::Povm, &DiscordOptions::default())?;
    v = v
        .max((closed.discord_ii - g.discord_ii).abs())
        .max((closed.eof_ab - g.eof_ab).abs());
    out.push((v, state));

    // three-qubit concurrences
    let l: [f64; 5] = std::array::from_fn(|_| rng.random_range(0.0..1.0));
    let params = ThreeQubitParams::normalized(l, rng.random_range(0.0..2.0 * PI))?;
    let psi = three_qubit_state(&params);
    let conc = three_qubit_concurrences(&params);
    let mut v = 0.0f64;
    for pair in [QubitPair::AB, QubitPair::BC, QubitPair::AC] {
        let m = psi.reduced(&pair.members())?;
        v = v.max((concurrence_two_qubit(&m)? - conc.get(pair)).abs());
    }
    let rho_ab = partial_trace(&psi.density(), &[0, 1])?;
    out.push((v, rho_ab));

    Ok(out)
}

/// A state file whose matrix is Hermitian with unit trace but an eigenvalue
/// of −0.2.
pub const NON_PSD_STATE: &str = r#"{"dims":[2],"re":[1.2,0.0,0.0,-0.2],"im":[0.0,0.0,0.0,0.0]}"#;

pub fn run_checks(args: &VerifyArgs) -> Outcome<(Vec<CheckResult>, bool)> {
    if args.samples == 0 {
        return Err(Failure::Validation("samples must be at least 1".into()));
    }
    let per_sample = map_indexed(args.samples, args.execution, |i| sample_checks(args.seed, i));
    let mut results: Vec<CheckResult> = CHECKS
        .iter()
        .map(|c| CheckResult {
            name: c.name,
            slug: c.slug,
            tolerance: c.tolerance,
            max_violation: 0.0,
            worst_sample: 0,
            worst_state: None,
        })
        .collect();
    for (i, sample) in per_sample.into_iter().enumerate() {
        let sample = sample.map_err(|e| Failure::Verification(format!("sample {i} (seed {}): {e}", args.seed)))?;
        for (res, (v, state)) in results.iter_mut().zip(sample) {
            // NaN counts as a violation
            let v = if v.is_nan() { f64::INFINITY } else { v };
            if res.worst_state.is_none() || v > res.max_violation {
                res.max_violation = v;
                res.worst_sample = i;
                res.worst_state = Some(state);
            }
        }
    }
    let rejected = matches!(
        DensityMatrix::from_json_str(NON_PSD_STATE),
        Err(e) if e.to_string().contains("positive semidefinite")
    );
    Ok((results, rejected))
}

fn dump(dir: &Path, seed: u64, check: &CheckResult) -> Outcome<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("verify-seed{seed}-{}-sample{}.json", check.slug, check.worst_sample));
    if let Some(state) = &check.worst_state {
        state.save(&path)?;
    }
    Ok(path)
}

pub fn cmd_verify(args: &VerifyArgs) -> Outcome<String> {
    let (results, rejected) = run_checks(args)?;
    let mut text = String::new();
    let _ = writeln!(text, "verify seed={} samples={}", args.seed, args.samples);
    let mut failures = Vec::new();
    for r in &results {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(
            text,
            "{status}  {:<42} max_violation={:.3e}  tol={:.0e}",
            r.name, r.max_violation, r.tolerance
        );
        if !r.passed() {
            failures.push(r);
        }
    }
    let _ = writeln!(
        text,
        "{}  {:<42} {}",
        if rejected { "PASS" } else { "FAIL" },
        "non-PSD state file rejected",
        if rejected { "rejected on load" } else { "accepted" }
    );
    let passed = results.len() - failures.len() + usize::from(rejected);
    let _ = writeln!(text, "{passed}/{} checks passed", results.len() + 1);
    if failures.is_empty() && rejected {
        return Ok(text);
    }
    for f in failures {
        let path = dump(&args.dump_dir, args.seed, f)?;
        let _ = writeln!(
            text,
            "offending state for '{}': seed {} sample {} -> {}",
            f.name,
            args.seed,
            f.worst_sample,
            path.display()
        );
    }
    Err(Failure::Verification(text))
}
