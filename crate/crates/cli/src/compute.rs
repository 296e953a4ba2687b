use std::fmt::Write as _;
use std::path::Path;

use qcorr::{discord, CorrelationReport, DensityMatrix, DiscordOptions, Route, SearchConfig, Variant};

use crate::{Failure, Outcome};

const INVARIANT_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct ComputeArgs {
    /// Regrouping of the file's dimensions into `d_A × d_B`.
    pub split: Option<(usize, usize)>,
    /// 0 measures A, 1 measures B.
    pub measured: usize,
    pub route: Route,
    pub search: SearchConfig,
}

impl Default for ComputeArgs {
    fn default() -> Self {
        Self {
            split: None,
            measured: 0,
            route: Route::Auto,
            search: SearchConfig::default(),
        }
    }
}

/// Parses `"4x2"` or `"4,2"`.
pub fn parse_split(s: &str) -> Outcome<(usize, usize)> {
    let parts: Vec<&str> = s.split(['x', 'X', ',']).map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => match (a.parse::<usize>(), b.parse::<usize>()) {
            (Ok(a), Ok(b)) if a >= 1 && b >= 1 => Ok((a, b)),
            _ => Err(Failure::Validation(format!("bad split {s:?}: expected two positive integers like 4x2"))),
        },
        _ => Err(Failure::Validation(format!("bad split {s:?}: expected d_A x d_B"))),
    }
}

pub fn parse_side(s: &str) -> Outcome<usize> {
    match s {
        "A" | "a" => Ok(0),
        "B" | "b" => Ok(1),
        _ => Err(Failure::Validation(format!("measured side must be A or B, got {s:?}"))),
    }
}

pub fn parse_route(s: &str) -> Outcome<Route> {
    match s {
        "auto" => Ok(Route::Auto),
        "analytic" => Ok(Route::Analytic),
        "oracle" => Ok(Route::Oracle),
        _ => Err(Failure::Validation(format!("method must be auto, analytic or oracle, got {s:?}"))),
    }
}

/// Puts the state into bipartite form.
pub fn bipartite(rho: DensityMatrix, split: Option<(usize, usize)>) -> Outcome<DensityMatrix> {
    match split {
        Some((a, b)) => {
            if a * b != rho.dim() {
                return Err(Failure::Validation(format!(
                    "split {a}x{b} does not match state dimension {}",
                    rho.dim()
                )));
            }
            Ok(rho.with_dims(vec![a, b])?)
        }
        None if rho.dims().len() == 2 => Ok(rho),
        None => Err(Failure::Validation(format!(
            "state has dims {:?}; pass --split to choose the bipartition",
            rho.dims()
        ))),
    }
}

pub fn report_for(rho: &DensityMatrix, args: &ComputeArgs) -> Outcome<CorrelationReport> {
    let opts = DiscordOptions {
        route: args.route,
        search: args.search,
    };
    opts.search.validate()?;
    discord(rho, args.measured, Variant::Povm, &opts).map_err(|e| match e {
        qcorr::Error::Unsupported(msg) => Failure::Validation(format!("unsupported: {msg}")),
        other => other.into(),
    })
}

/// Structured text rendering: one `key value` line per field.
pub fn render(rho: &DensityMatrix, args: &ComputeArgs, r: &CorrelationReport) -> String {
    let side = ["A", "B"][r.measured];
    let other = ["B", "A"][r.measured];
    let dims: Vec<String> = rho.dims().iter().map(usize::to_string).collect();
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        let _ = writeln!(out, "{k:<24} {v}");
    };
    line("dims", dims.join("x"));
    line("measured", side.to_string());
    line("route", format!("{:?}", args.route).to_lowercase());
    line("method", r.method.to_string());
    line("converged", r.converged.to_string());
    line("search_seed", args.search.seed.to_string());
    line("search_restarts", args.search.restarts.to_string());
    line(&format!("S({side})"), num(r.s_a));
    line(&format!("S({other})"), num(r.s_b));
    line("S(AB)", num(r.s_ab));
    line("I", num(r.mutual_information));
    line("J", num(r.classical_j));
    line(&format!("S_I({other}|{side})"), num(r.conditional_entropy_i));
    line(&format!("S_II({other}|{side})"), num(r.conditional_entropy_ii));
    line("Q_I", num(r.discord_i));
    line("Q_II", num(r.discord_ii));
    line("E(AB)", num(r.eof_ab));
    line("E(BC)", num(r.eof_bc));
    line("E^[d](BC)", num(r.eof_d_component));
    line(
        "duality_residual",
        r.duality_residual.map_or_else(|| "not computed".to_string(), num),
    );
    let violations = r.invariant_violations(INVARIANT_TOL);
    line(
        "invariants",
        if violations.is_empty() {
            "ok".to_string()
        } else {
            violations.join("; ")
        },
    );
    out
}

fn num(x: f64) -> String {
    // keep tiny negative rounding noise from printing as -0.000000000000
    let x = if x.abs() < 5e-13 { 0.0 } else { x };
    format!("{x:.12}")
}

/// Loads, validates and reports; a report that breaks its own invariants is
/// a verification failure.
pub fn cmd_compute(path: &Path, args: &ComputeArgs) -> Outcome<String> {
    let rho = DensityMatrix::load(path)?;
    let rho = bipartite(rho, args.split)?;
    let report = report_for(&rho, args)?;
    let text = render(&rho, args, &report);
    if !report.invariant_violations(INVARIANT_TOL).is_empty() {
        return Err(Failure::Verification(text));
    }
    Ok(text)
}
