use std::path::Path;
use std::process::{Command, Output};

use qcorr::families::{phase_damping_state, rank2_report, rank2_state, PhaseDampingParams, Rank2Params};
use qcorr::DensityMatrix;
use qcorr_cli::compute::{report_for, ComputeArgs};
use qcorr_cli::sweep::{run_sweep, SweepSpec};
use qcorr_cli::verify::{cmd_verify, VerifyArgs};
use qcorr_cli::Failure;

fn qcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcorr")).args(args).output().unwrap()
}

fn field(stdout: &[u8], key: &str) -> f64 {
    let text = String::from_utf8_lossy(stdout);
    text.lines()
        .find_map(|l| {
            let mut it = l.split_whitespace();
            (it.next() == Some(key)).then(|| it.next().unwrap().parse().unwrap())
        })
        .unwrap_or_else(|| panic!("no field {key} in\n{text}"))
}

fn write_state(dir: &Path, name: &str, rho: &DensityMatrix) -> String {
    let path = dir.join(name);
    rho.save(&path).unwrap();
    path.to_str().unwrap().to_string()
}

const BELL: &str = r#"{"dims":[2,2],"re":[0.5,0,0,0.5,0,0,0,0,0,0,0,0,0.5,0,0,0.5],"im":[0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0]}"#;

#[test]
fn bell_state_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bell.json");
    std::fs::write(&path, BELL).unwrap();
    let out = qcorr(&["compute", "--state", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for key in ["Q_I", "Q_II", "E(AB)", "J"] {
        assert!((field(&out.stdout, key) - 1.0).abs() < 1e-9, "{key}");
    }
    assert!((field(&out.stdout, "I") - 2.0).abs() < 1e-9);
}

#[test]
fn fully_dephased_state_is_classical() {
    let dir = tempfile::tempdir().unwrap();
    let params = PhaseDampingParams::from_decay(0.3, 1.0).unwrap();
    let path = write_state(dir.path(), "dephased.json", &phase_damping_state(&params));
    let out = qcorr(&["compute", "--state", &path, "--method", "analytic"]);
    assert_eq!(out.status.code(), Some(0));
    for key in ["Q_I", "Q_II", "E(AB)"] {
        assert!(field(&out.stdout, key).abs() < 1e-12, "{key}");
    }
    assert!((field(&out.stdout, "J") - field(&out.stdout, "I")).abs() < 1e-12);
}

#[test]
fn compute_agrees_with_rank2_report() {
    let params = Rank2Params::figure_one(0.4).unwrap();
    let expected = rank2_report(&params).unwrap();
    let rho = rank2_state(&params);
    let r = report_for(&rho, &ComputeArgs::default()).unwrap();
    assert!((r.discord_ii - expected.discord).abs() < 1e-9);
    assert!((r.eof_ab - expected.eof).abs() < 1e-9);

    let dir = tempfile::tempdir().unwrap();
    let path = write_state(dir.path(), "rank2.json", &rho);
    let out = qcorr(&["compute", "--state", &path, "--measured", "A"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((field(&out.stdout, "Q_II") - expected.discord).abs() < 1e-9);
    assert!((field(&out.stdout, "E(AB)") - expected.eof).abs() < 1e-9);
}

#[test]
fn split_regroups_three_party_files() {
    let dir = tempfile::tempdir().unwrap();
    let rho = rank2_state(&Rank2Params::figure_one(0.4).unwrap())
        .with_dims(vec![2, 2, 2])
        .unwrap();
    let path = write_state(dir.path(), "three.json", &rho);
    let out = qcorr(&["compute", "--state", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--split"));
    let out = qcorr(&["compute", "--state", &path, "--split", "4x2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn invalid_files_exit_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"dims":[2],"re":[1.2,0,0,-0.2],"im":[0,0,0,0]}"#, "positive semidefinite"),
        (r#"{"dims":[2],"re":[0.5,0.3,0.0,0.5],"im":[0,0,0,0]}"#, "Hermitian"),
        (r#"{"dims":[2],"re":[0.7,0,0,0.7],"im":[0,0,0,0]}"#, "trace"),
        (r#"{"dims":[2],"re":[1,0,0],"im":[0,0,0]}"#, "entries"),
        ("not json", "state file"),
    ];
    for (k, (body, needle)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("bad{k}.json"));
        std::fs::write(&path, body).unwrap();
        let out = qcorr(&["compute", "--state", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1), "{body}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{body}: {err}");
    }
    let out = qcorr(&["compute", "--state", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analytic_route_reports_unsupported_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let rho = DensityMatrix::maximally_mixed(vec![3, 3]).unwrap();
    let path = write_state(dir.path(), "mixed.json", &rho);
    let out = qcorr(&["compute", "--state", &path, "--method", "analytic"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported"));
}

#[test]
fn bad_flags_are_rejected() {
    let out = qcorr(&["compute", "--state", "x.json", "--measured", "C"]);
    assert_eq!(out.status.code(), Some(1));
    let out = qcorr(&["sweep", "--family", "phase-damping", "--axis", "p=0:2"]);
    assert_eq!(out.status.code(), Some(1));
    let out = qcorr(&["sweep", "--family", "rank2", "--axis", "bogus=0:1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = qcorr(&["sweep", "--preset", "fig3"]);
    assert_eq!(out.status.code(), Some(1));
    let out = qcorr(&["verify", "--samples", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let out = qcorr(&["compute"]);
    assert_eq!(out.status.code(), Some(1));
    let out = qcorr(&["sweep", "--preset", "fig1", "--axis", "p=0:1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(qcorr(&["--help"]).status.code(), Some(0));
}

#[test]
fn custom_sweep_to_stdout() {
    let out = qcorr(&[
        "sweep", "--family", "rank2", "--fix", "p1=0.5", "--fix", "theta2=pi/3", "--axis", "sin2_phi=0:1", "--points", "5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.split('\n').collect();
    assert_eq!(lines[0], "sin2_phi,Q_AB,E_AB,eta");
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[6], "");
    assert!(!text.contains('\r'));
    assert!(lines[3].starts_with("0.5,"));
}

#[test]
fn fig2_pure_row_has_equal_measures() {
    let table = run_sweep(&SweepSpec::preset("fig2").unwrap(), Default::default()).unwrap();
    for row in table.rows.iter().filter(|r| r[1] == 0.0) {
        let a = row[0];
        let h = if a == 0.0 || a == 1.0 {
            0.0
        } else {
            -a * a.log2() - (1.0 - a) * (1.0 - a).log2()
        };
        assert!((row[2] - h).abs() < 1e-12 && (row[3] - h).abs() < 1e-12, "{row:?}");
    }
}

#[test]
fn verify_passes_with_small_sample() {
    let dir = tempfile::tempdir().unwrap();
    let args = VerifyArgs {
        seed: 1,
        samples: 6,
        dump_dir: dir.path().to_path_buf(),
        ..VerifyArgs::default()
    };
    let text = cmd_verify(&args).unwrap();
    assert!(text.contains("13/13 checks passed"), "{text}");
    assert!(!text.contains("FAIL"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn failures_map_to_exit_codes() {
    assert_eq!(Failure::Validation(String::new()).exit_code(), 1);
    assert_eq!(Failure::Verification(String::new()).exit_code(), 2);
}
