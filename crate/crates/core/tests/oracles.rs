//! Library results checked against independent computations: explicit
//! index loops, closed forms for special shapes, and the generic numerical
//! engine run on the family states.

use std::f64::consts::PI;

use qcorr::discord::{
    discord, qubit_projective_minimum, x_state_conditional_entropy, DiscordOptions, Method, Variant,
};
use qcorr::families::*;
use qcorr::linalg::{ComplexMatrix, C64};
use qcorr::oracle::{ensemble_eof_search, SearchConfig};
use qcorr::pair::{concurrence_two_qubit, eof_from_concurrence, wootters_lambdas};
use qcorr::random::{random_density, random_pure_state, stream_rng};
use qcorr::state::{binary_entropy, partial_trace, purify, von_neumann_entropy, DensityMatrix};
use rand::Rng;

fn h(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}

fn eof_of(c: f64) -> f64 {
    h(0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt()))
}

/// Partial trace by brute force over multi-indices.
fn loop_partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> ComplexMatrix {
    let n: usize = dims.iter().product();
    let digits = |mut x: usize| -> Vec<usize> {
        let mut d = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            d[k] = x % dims[k];
            x /= dims[k];
        }
        d
    };
    let kept_index = |d: &[usize]| keep.iter().fold(0, |acc, &k| acc * dims[k] + d[k]);
    let kd: usize = keep.iter().map(|&k| dims[k]).product();
    let mut out = ComplexMatrix::zeros(kd, kd);
    for i in 0..n {
        let di = digits(i);
        for j in 0..n {
            let dj = digits(j);
            let traced_match = (0..dims.len()).filter(|k| !keep.contains(k)).all(|k| di[k] == dj[k]);
            if traced_match {
                out[(kept_index(&di), kept_index(&dj))] += m[(i, j)];
            }
        }
    }
    out
}

/// Concurrence of a two-qubit X state.
fn x_state_concurrence(m: &ComplexMatrix) -> f64 {
    let r = |i: usize, j: usize| m[(i, j)];
    let a = r(0, 3).norm() - (r(1, 1).re * r(2, 2).re).sqrt();
    let b = r(1, 2).norm() - (r(0, 0).re * r(3, 3).re).sqrt();
    2.0 * a.max(b).max(0.0)
}

fn random_x_state(rng: &mut impl Rng) -> DensityMatrix {
    let mut d: Vec<f64> = (0..4).map(|_| rng.random_range(0.01..1.0)).collect();
    let t: f64 = d.iter().sum();
    d.iter_mut().for_each(|x| *x /= t);
    let z14 = C64::from_polar(rng.random_range(0.0..1.0) * (d[0] * d[3]).sqrt(), rng.random_range(0.0..2.0 * PI));
    let z23 = C64::from_polar(rng.random_range(0.0..1.0) * (d[1] * d[2]).sqrt(), rng.random_range(0.0..2.0 * PI));
    let mut m = ComplexMatrix::from_real_diagonal(&d);
    m[(0, 3)] = z14;
    m[(3, 0)] = z14.conj();
    m[(1, 2)] = z23;
    m[(2, 1)] = z23.conj();
    DensityMatrix::new(vec![2, 2], m).unwrap()
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

#[test]
fn partial_trace_matches_index_loops() {
    let mut rng = stream_rng(3, 0);
    for (dims, keep) in [
        (vec![2, 3, 2], vec![0]),
        (vec![2, 3, 2], vec![1]),
        (vec![2, 3, 2], vec![0, 2]),
        (vec![3, 2], vec![1]),
        (vec![2, 2, 2], vec![1, 2]),
    ] {
        let rho = random_density(&dims, 3, &mut rng).unwrap();
        let lib = partial_trace(&rho, &keep).unwrap();
        let oracle = loop_partial_trace(rho.matrix(), &dims, &keep);
        assert!(lib.matrix().max_abs_diff(&oracle) < 1e-14, "{dims:?} keep {keep:?}");
    }
}

#[test]
fn qubit_entropy_matches_closed_form_eigenvalues() {
    let mut rng = stream_rng(4, 0);
    for _ in 0..50 {
        let rho = random_density(&[2], 2, &mut rng).unwrap();
        let m = rho.matrix();
        let a = m[(0, 0)].re;
        let r = ((a - 0.5).powi(2) + m[(0, 1)].norm_sqr()).sqrt();
        assert!((von_neumann_entropy(&rho) - h(0.5 + r)).abs() < 1e-12);
    }
}

#[test]
fn concurrence_matches_x_state_formula() {
    let mut rng = stream_rng(5, 0);
    for _ in 0..100 {
        let rho = random_x_state(&mut rng);
        let c = concurrence_two_qubit(&rho).unwrap();
        assert!((c - x_state_concurrence(rho.matrix())).abs() < 1e-10);
    }
}

#[test]
fn concurrence_of_pure_states_matches_spin_flip_overlap() {
    let mut rng = stream_rng(6, 0);
    for _ in 0..100 {
        let psi = random_pure_state(&[2, 2], &mut rng).unwrap();
        let a = psi.amplitudes();
        let oracle = 2.0 * (a[0] * a[3] - a[1] * a[2]).norm();
        let c = concurrence_two_qubit(&psi.density()).unwrap();
        assert!((c - oracle).abs() < 1e-10);
    }
}

#[test]
fn x_state_scan_agrees_with_general_qubit_search() {
    let mut rng = stream_rng(7, 0);
    for _ in 0..10 {
        let rho = random_x_state(&mut rng);
        for measured in [0, 1] {
            let scan = x_state_conditional_entropy(&rho, measured).unwrap();
            let search = qubit_projective_minimum(&rho, measured).unwrap().value;
            assert!(scan <= search + 1e-9, "scan {scan} search {search}");
            assert!((scan - search).abs() < 1e-7, "scan {scan} search {search}");
        }
    }
}

#[test]
fn three_qubit_closed_forms_match_marginals() {
    let mut rng = stream_rng(8, 0);
    let opts = DiscordOptions::default();
    for _ in 0..10 {
        let lambda: [f64; 5] = std::array::from_fn(|_| rng.random_range(0.0..1.0));
        let params = ThreeQubitParams::normalized(lambda, rng.random_range(0.0..2.0 * PI)).unwrap();
        let psi = three_qubit_state(&params);
        let conc = three_qubit_concurrences(&params);
        for pair in [QubitPair::AB, QubitPair::BC, QubitPair::AC] {
            let rho = psi.reduced(&pair.members()).unwrap();
            let c = concurrence_two_qubit(&rho).unwrap();
            assert!((c - conc.get(pair)).abs() < 1e-9, "{pair:?}: {c} vs {}", conc.get(pair));
            for measured in [0, 1] {
                let analytic = three_qubit_report(&params, pair, measured).unwrap();
                let generic = discord(&rho, measured, Variant::Povm, &opts).unwrap();
                assert!((analytic.discord_ii - generic.discord_ii).abs() < 1e-8);
                assert!((analytic.discord_i - generic.discord_i).abs() < 1e-8);
                assert!((analytic.eof_ab - generic.eof_ab).abs() < 1e-8);
                assert!((analytic.mutual_information - generic.mutual_information).abs() < 1e-10);
                assert!(analytic.invariant_violations(1e-9).is_empty());
            }
        }
    }
}

#[test]
fn three_qubit_ordering_identity_holds() {
    let mut rng = stream_rng(9, 0);
    for _ in 0..20 {
        let lambda: [f64; 5] = std::array::from_fn(|_| rng.random_range(0.0..1.0));
        let params = ThreeQubitParams::normalized(lambda, rng.random_range(0.0..2.0 * PI)).unwrap();
        let q_ab = three_qubit_report(&params, QubitPair::AB, 0).unwrap();
        let q_ac = three_qubit_report(&params, QubitPair::AC, 0).unwrap();
        let q_ca = three_qubit_report(&params, QubitPair::AC, 1).unwrap();
        let lhs = q_ab.discord_ii - q_ab.eof_ab;
        let rhs = q_ac.discord_ii - q_ca.discord_ii;
        assert!((lhs - rhs).abs() < 1e-12);
    }
}

#[test]
fn symmetric_case_concurrence_form_is_the_consistent_one() {
    let mut rng = stream_rng(10, 0);
    for _ in 0..10 {
        let (l0, l1, l2, l4) = (
            rng.random_range(0.1..1.0),
            rng.random_range(0.0..1.0),
            rng.random_range(0.1..1.0),
            rng.random_range(0.0..1.0),
        );
        let params = ThreeQubitParams::normalized([l0, l1, l2, l2, l4], rng.random_range(0.0..2.0 * PI)).unwrap();
        let r = three_qubit_report(&params, QubitPair::AB, 0).unwrap();
        assert!((r.discord_ii - r.eof_ab).abs() < 1e-12);
        let good = symmetric_case_value(&params, DeltaForm::FromConcurrence);
        let literal = symmetric_case_value(&params, DeltaForm::Unscaled);
        assert!((good - r.eof_ab).abs() < 1e-12);
        assert!((literal - r.eof_ab).abs() > 1e-6);
    }
}

fn random_rank2_params(rng: &mut impl Rng) -> Rank2Params {
    let p1 = rng.random_range(0.05..0.95);
    Rank2Params::new(
        p1,
        1.0 - p1,
        rng.random_range(0.0..PI),
        rng.random_range(0.0..PI),
        rng.random_range(0.0..PI),
    )
    .unwrap()
}

#[test]
fn rank2_closed_forms_match_numerics() {
    let mut rng = stream_rng(11, 0);
    for _ in 0..30 {
        let params = random_rank2_params(&mut rng);
        let rho = rank2_state(&params);
        let purification = rank2_purification(&params);
        assert!(purification.reduced(&[0, 1]).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-14);

        let bc = purification.reduced(&[1, 2]).unwrap();
        assert!(bc.matrix().max_abs_diff(rank2_bc_xstate(&params).matrix()) < 1e-14);

        let rho_a = partial_trace(&rho, &[0]).unwrap();
        let numeric = rho_a.eigenvalues();
        let closed = sorted(rank2_rho_a_spectrum(&params).to_vec());
        for (x, y) in numeric.iter().zip(&closed) {
            assert!((x - y).abs() < 1e-12, "{numeric:?} vs {closed:?}");
        }

        let lc_numeric = sorted(wootters_lambdas(&bc).unwrap().to_vec());
        let lc_closed = sorted(rank2_wootters_lambdas(&params).iter().map(|x| x.abs()).collect());
        for (x, y) in lc_numeric.iter().zip(&lc_closed) {
            assert!((x - y).abs() < 1e-9, "{lc_numeric:?} vs {lc_closed:?}");
        }

        let report = rank2_report(&params).unwrap();
        let generic = discord(&rho, 0, Variant::Povm, &DiscordOptions::default()).unwrap();
        assert!((report.discord - generic.discord_ii).abs() < 1e-9);
        assert!((report.eof - generic.eof_ab).abs() < 1e-8);
        assert!((report.concurrence_bc - x_state_concurrence(bc.matrix())).abs() < 1e-12);
    }
}

#[test]
fn balanced_rank2_eof_matches_ensemble_search() {
    let cfg = SearchConfig {
        restarts: 16,
        ..SearchConfig::default()
    };
    for sin2 in [0.05, 0.2, 0.45, 0.8] {
        let params = Rank2Params::figure_one(sin2).unwrap();
        let report = rank2_report(&params).unwrap();
        assert_eq!(report.eof_method, Method::Analytic);
        let search = ensemble_eof_search(&rank2_state(&params), 4, &cfg).unwrap();
        assert!((report.eof - search.value).abs() < 1e-5, "{sin2}: {} vs {}", report.eof, search.value);
    }
}

#[test]
fn phase_damping_closed_forms_match_generic_engine() {
    let opts = DiscordOptions::default();
    for alpha_sq in [0.0, 0.1, 0.5, 0.73] {
        for p in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let params = PhaseDampingParams::from_decay(alpha_sq, p).unwrap();
            let closed = phase_damping_report(&params).unwrap();
            let generic = discord(&phase_damping_state(&params), 0, Variant::Povm, &opts).unwrap();
            assert!((closed.discord_ii - generic.discord_ii).abs() < 1e-10);
            assert!((closed.eof_ab - generic.eof_ab).abs() < 1e-10);
            assert!((closed.eof_ab - eof_of(params.concurrence())).abs() < 1e-12);
            let (bc, ac) = phase_damping_side_concurrences(&params).unwrap();
            assert!(bc < 1e-9 && ac < 1e-9);
        }
    }
}

#[test]
fn eof_from_concurrence_matches_binary_entropy() {
    for k in 0..=100 {
        let c = k as f64 / 100.0;
        let x = 0.5 * (1.0 + (1.0 - c * c).sqrt());
        assert!((eof_from_concurrence(c).unwrap() - binary_entropy(x)).abs() < 1e-15);
    }
}

#[test]
fn purified_bell_mixture_has_separable_bc() {
    // p|Φ+⟩⟨Φ+| + (1−p)|Ψ+⟩⟨Ψ+|: measuring A in the X basis leaves B pure,
    // so S(B|A) = E(ρ_BC) = 0
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for p in [0.1, 0.3, 0.5, 0.8] {
        let phi = ComplexMatrix::outer(
            &[C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)],
            &[C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)],
        );
        let psi = ComplexMatrix::outer(
            &[C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(0.0, 0.0)],
            &[C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(0.0, 0.0)],
        );
        let rho = DensityMatrix::new(vec![2, 2], &phi.scale_real(p) + &psi.scale_real(1.0 - p)).unwrap();
        assert!((concurrence_two_qubit(&rho).unwrap() - (2.0 * p - 1.0).abs()).abs() < 1e-12);
        let bc = purify(&rho).unwrap().marginal(&[1, 2]).unwrap();
        let c_bc = concurrence_two_qubit(&bc).unwrap();
        assert!(c_bc < 1e-10, "p={p}: {c_bc}");
    }
}
