use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use qcorr::discord::{discord, DiscordOptions, Variant};
use qcorr::families::{
    phase_damping_state, rank2_report, three_qubit_report, PhaseDampingParams, QubitPair, Rank2Params,
    ThreeQubitParams,
};
use qcorr::par::map_indexed;
use qcorr::Execution;

use crate::{Failure, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    ThreeQubit,
    Rank2,
    PhaseDamping,
}

impl Family {
    fn parameters(self) -> &'static [&'static str] {
        match self {
            Family::ThreeQubit => &["l0", "l1", "l2", "l3", "l4", "phi"],
            Family::Rank2 => &["p1", "phi", "sin2_phi", "theta1", "theta2"],
            Family::PhaseDamping => &["alpha_sq", "p", "gamma_t"],
        }
    }
}

impl FromStr for Family {
    type Err = Failure;

    fn from_str(s: &str) -> Outcome<Self> {
        match s {
            "three-qubit" => Ok(Family::ThreeQubit),
            "rank2" => Ok(Family::Rank2),
            "phase-damping" => Ok(Family::PhaseDamping),
            _ => Err(Failure::Validation(format!(
                "unknown family {s:?} (expected three-qubit, rank2 or phase-damping)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.end
                } else {
                    self.start + (self.end - self.start) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub family: Family,
    pub fixed: BTreeMap<String, f64>,
    /// The first axis varies slowest.
    pub axes: Vec<Axis>,
    /// Append `eta = E − Q`.
    pub eta_column: bool,
}

impl SweepSpec {
    /// `fig1`: rank-2 states at `p = ½`, `θ₁ = 0`, `θ₂ = π/3` against
    /// `sin²φ`. `fig2`: the dephased two-qubit state over `(|α|², p)`.
    pub fn preset(name: &str) -> Outcome<Self> {
        match name {
            "fig1" => Ok(Self {
                family: Family::Rank2,
                fixed: BTreeMap::from([
                    ("p1".to_string(), 0.5),
                    ("theta1".to_string(), 0.0),
                    ("theta2".to_string(), PI / 3.0),
                ]),
                axes: vec![axis("sin2_phi", 0.0, 1.0, 400)],
                eta_column: false,
            }),
            "fig2" => Ok(Self {
                family: Family::PhaseDamping,
                fixed: BTreeMap::new(),
                axes: vec![axis("alpha_sq", 0.0, 1.0, 101), axis("p", 0.0, 1.0, 101)],
                eta_column: true,
            }),
            _ => Err(Failure::Validation(format!("unknown preset {name:?} (expected fig1 or fig2)"))),
        }
    }

    pub fn validate(&self) -> Outcome<()> {
        if self.axes.is_empty() {
            return Err(Failure::Validation("a sweep needs at least one axis".into()));
        }
        let known = self.family.parameters();
        let mut seen = Vec::new();
        for name in self.fixed.keys().chain(self.axes.iter().map(|a| &a.name)) {
            if !known.contains(&name.as_str()) {
                return Err(Failure::Validation(format!(
                    "unknown parameter {name:?} for this family (expected one of {})",
                    known.join(", ")
                )));
            }
            if seen.contains(&name) {
                return Err(Failure::Validation(format!("parameter {name:?} given twice")));
            }
            seen.push(name);
        }
        for a in &self.axes {
            if a.points < 2 {
                return Err(Failure::Validation(format!("axis {} needs at least 2 points", a.name)));
            }
            if !a.start.is_finite() || !a.end.is_finite() {
                return Err(Failure::Validation(format!("axis {} has a non-finite bound", a.name)));
            }
        }
        // the axis corners cover the extremes of every swept range
        let corners = 1usize << self.axes.len();
        for mask in 0..corners {
            let mut point = self.fixed.clone();
            for (k, a) in self.axes.iter().enumerate() {
                point.insert(a.name.clone(), if mask >> k & 1 == 0 { a.start } else { a.end });
            }
            evaluate(self.family, &point)?;
        }
        Ok(())
    }

    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = self.axes.iter().map(|a| a.name.clone()).collect();
        h.extend(["Q_AB".to_string(), "E_AB".to_string()]);
        if self.eta_column {
            h.push("eta".into());
        }
        h
    }

    fn grid(&self) -> Vec<Vec<f64>> {
        let mut points = vec![Vec::new()];
        for a in &self.axes {
            let values = a.values();
            points = points
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        points
    }
}

fn axis(name: &str, start: f64, end: f64, points: usize) -> Axis {
    Axis {
        name: name.to_string(),
        start,
        end,
        points,
    }
}

fn get(point: &BTreeMap<String, f64>, name: &str, default: f64) -> f64 {
    point.get(name).copied().unwrap_or(default)
}

/// `(Q_AB, E_AB)` at one parameter point, measuring A.
pub fn evaluate(family: Family, point: &BTreeMap<String, f64>) -> Outcome<(f64, f64)> {
    match family {
        Family::Rank2 => {
            let phi = match (point.get("phi"), point.get("sin2_phi")) {
                (Some(_), Some(_)) => return Err(Failure::Validation("give phi or sin2_phi, not both".into())),
                (Some(&phi), None) => phi,
                (None, Some(&s)) => {
                    if !(0.0..=1.0).contains(&s) {
                        return Err(Failure::Validation(format!("sin2_phi = {s} is not in [0, 1]")));
                    }
                    s.sqrt().asin()
                }
                (None, None) => 0.0,
            };
            let p1 = get(point, "p1", 0.5);
            let params = Rank2Params::new(p1, 1.0 - p1, phi, get(point, "theta1", 0.0), get(point, "theta2", 0.0))?;
            let r = rank2_report(&params)?;
            Ok((r.discord, r.eof))
        }
        Family::PhaseDamping => {
            let a = get(point, "alpha_sq", 0.5);
            let params = match (point.get("p"), point.get("gamma_t")) {
                (Some(_), Some(_)) => return Err(Failure::Validation("give p or gamma_t, not both".into())),
                (_, Some(&gt)) => PhaseDampingParams::from_gamma_t(a, gt)?,
                (p, None) => PhaseDampingParams::from_decay(a, p.copied().unwrap_or(0.0))?,
            };
            let r = discord(&phase_damping_state(&params), 0, Variant::Povm, &DiscordOptions::default())?;
            Ok((r.discord_ii, r.eof_ab))
        }
        Family::ThreeQubit => {
            let lambda = ["l0", "l1", "l2", "l3", "l4"].map(|n| get(point, n, 0.0));
            let params = ThreeQubitParams::normalized(lambda, get(point, "phi", 0.0))?;
            let r = three_qubit_report(&params, QubitPair::AB, 0)?;
            Ok((r.discord_ii, r.eof_ab))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format_sig(x)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Points are evaluated concurrently; rows come back in axis order.
pub fn run_sweep(spec: &SweepSpec, execution: Execution) -> Outcome<Table> {
    spec.validate()?;
    let grid = spec.grid();
    let results = map_indexed(grid.len(), execution, |i| {
        let mut point = spec.fixed.clone();
        for (a, &v) in spec.axes.iter().zip(&grid[i]) {
            point.insert(a.name.clone(), v);
        }
        evaluate(spec.family, &point)
    });
    let mut rows = Vec::with_capacity(grid.len());
    for (coords, result) in grid.into_iter().zip(results) {
        let (q, e) = result?;
        let mut row = coords;
        row.extend([q, e]);
        if spec.eta_column {
            row.push(e - q);
        }
        rows.push(row);
    }
    Ok(Table {
        header: spec.header(),
        rows,
    })
}

/// Nine significant digits, shortest of fixed or exponent form, trailing
/// zeros trimmed.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        trim_zeros(format!("{:.*}", (8 - exp).max(0) as usize, x))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// A number, or a multiple of `pi` such as `pi/3`, `2pi/3`, `0.5*pi`.
pub fn parse_value(s: &str) -> Outcome<f64> {
    let bad = || Failure::Validation(format!("cannot parse {s:?} as a number"));
    let t = s.trim();
    let Some(at) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| bad());
    };
    let coeff = t[..at].trim().trim_end_matches('*').trim();
    let coeff = match coeff {
        "" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let rest = t[at + 2..].trim();
    let divisor = match rest.strip_prefix('/') {
        Some(d) => d.trim().parse::<f64>().map_err(|_| bad())?,
        None if rest.is_empty() => 1.0,
        None => return Err(bad()),
    };
    Ok(coeff * PI / divisor)
}

/// `name=value`.
pub fn parse_fix(s: &str) -> Outcome<(String, f64)> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| Failure::Validation(format!("expected name=value, got {s:?}")))?;
    Ok((name.trim().to_string(), parse_value(value)?))
}

/// `name=start:end`.
pub fn parse_axis(s: &str, points: usize) -> Outcome<Axis> {
    let (name, range) = parse_pair(s)?;
    let (start, end) = range
        .split_once(':')
        .ok_or_else(|| Failure::Validation(format!("expected name=start:end, got {s:?}")))?;
    Ok(Axis {
        name,
        start: parse_value(start)?,
        end: parse_value(end)?,
        points,
    })
}

fn parse_pair(s: &str) -> Outcome<(String, String)> {
    let (name, rest) = s
        .split_once('=')
        .ok_or_else(|| Failure::Validation(format!("expected name=start:end, got {s:?}")))?;
    Ok((name.trim().to_string(), rest.trim().to_string()))
}
