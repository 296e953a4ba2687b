//! Derivative-free local minimizers and the seeded multi-start driver used
//! by the oracle searches.

use rand_chacha::ChaCha8Rng;

use crate::par::{map_indexed, Execution};
use crate::random::stream_rng;

#[derive(Clone, Copy, Debug)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Stop when the simplex objective spread falls below this.
    pub f_tolerance: f64,
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            f_tolerance: 1e-8,
            initial_step: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder–Mead with dimension-adaptive coefficients (Gao & Han). The best
/// vertex value never increases between iterations.
pub fn nelder_mead<F>(f: &F, x0: &[f64], opts: &NelderMeadOptions) -> Minimum
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let n = x0.len();
    if n == 0 {
        return Minimum {
            x: Vec::new(),
            value: f(&[]),
            iterations: 0,
            converged: true,
        };
    }
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (best, worst, second) = (order[0], order[n], order[n - 1]);
        if (values[worst] - values[best]).abs() <= opts.f_tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &k in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[k]) {
                *c += x / nf;
            }
        }
        let point = |t: f64, out: &mut Vec<f64>| {
            for ((o, c), w) in out.iter_mut().zip(&centroid).zip(&simplex[worst]) {
                *o = c + t * (c - w);
            }
        };

        point(alpha, &mut trial);
        let fr = f(&trial);
        if fr < values[best] {
            point(alpha * beta, &mut trial2);
            let fe = f(&trial2);
            if fe < fr {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = fe;
            } else {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second] {
            simplex[worst].copy_from_slice(&trial);
            values[worst] = fr;
            continue;
        }
        let (t, reference) = if fr < values[worst] { (alpha * gamma, fr) } else { (-gamma, values[worst]) };
        point(t, &mut trial2);
        let fc = f(&trial2);
        if fc < reference {
            simplex[worst].copy_from_slice(&trial2);
            values[worst] = fc;
            continue;
        }
        // shrink toward the best vertex
        let anchor = simplex[best].clone();
        for &k in &order[1..] {
            for (x, a) in simplex[k].iter_mut().zip(&anchor) {
                *x = a + delta * (*x - a);
            }
            values[k] = f(&simplex[k]);
        }
    }
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    Minimum {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
        converged,
    }
}

/// Nelder–Mead, restarted from its own optimum with a shrinking simplex
/// until a restart no longer improves by more than the tolerance.
pub fn polished_nelder_mead<F>(f: &F, x0: &[f64], opts: &NelderMeadOptions, rounds: usize) -> Minimum
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let mut best = nelder_mead(f, x0, opts);
    let mut step = opts.initial_step;
    for _ in 0..rounds {
        step *= 0.5;
        let next = nelder_mead(
            f,
            &best.x,
            &NelderMeadOptions {
                initial_step: step,
                ..*opts
            },
        );
        let gain = best.value - next.value;
        let iterations = best.iterations + next.iterations;
        if next.value < best.value {
            best = Minimum { iterations, ..next };
        } else {
            best.iterations = iterations;
            best.converged = next.converged;
        }
        if gain <= opts.f_tolerance {
            break;
        }
    }
    best
}

/// Golden-section search for a minimum of a unimodal function on `[a, b]`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MultiStartOptions {
    pub seed: u64,
    pub restarts: usize,
    pub local: NelderMeadOptions,
    pub polish_rounds: usize,
    pub execution: Execution,
}

#[derive(Clone, Debug)]
pub struct MultiStartResult {
    pub best: Minimum,
    pub best_restart: usize,
    /// Worst restart value minus best restart value.
    pub spread: f64,
    pub restart_values: Vec<f64>,
}

/// Runs `restarts` independent local searches. Restart `k` draws its start
/// from the stream `(seed, k)`; ties on the best value go to the lowest
/// restart index, so the result does not depend on scheduling.
pub fn multistart<F, S>(objective: &F, sample_start: &S, opts: &MultiStartOptions) -> MultiStartResult
where
    F: Fn(&[f64]) -> f64 + Sync,
    S: Fn(usize, &mut ChaCha8Rng) -> Vec<f64> + Sync,
{
    let restarts = opts.restarts.max(1);
    let runs = map_indexed(restarts, opts.execution, |k| {
        let mut rng = stream_rng(opts.seed, k as u64);
        let x0 = sample_start(k, &mut rng);
        polished_nelder_mead(objective, &x0, &opts.local, opts.polish_rounds)
    });
    let best_restart = (0..runs.len())
        .min_by(|&a, &b| runs[a].value.total_cmp(&runs[b].value).then(a.cmp(&b)))
        .unwrap();
    let restart_values: Vec<f64> = runs.iter().map(|m| m.value).collect();
    let worst = restart_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let best = runs.into_iter().nth(best_restart).unwrap();
    MultiStartResult {
        spread: worst - best.value,
        best,
        best_restart,
        restart_values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn nelder_mead_finds_rosenbrock_minimum() {
        let opts = NelderMeadOptions {
            max_iterations: 5000,
            f_tolerance: 1e-14,
            initial_step: 0.5,
        };
        let m = polished_nelder_mead(&rosenbrock, &[-1.2, 1.0], &opts, 3);
        assert!(m.converged);
        assert!(m.value < 1e-10, "{m:?}");
        assert!((m.x[0] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn nelder_mead_best_value_is_monotone() {
        use std::cell::RefCell;
        let best_so_far = RefCell::new(f64::INFINITY);
        let trace = RefCell::new(Vec::new());
        let f = |x: &[f64]| {
            let v = x.iter().map(|t| (t - 0.3).powi(2)).sum::<f64>();
            let mut b = best_so_far.borrow_mut();
            *b = b.min(v);
            trace.borrow_mut().push(*b);
            v
        };
        nelder_mead(&f, &[1.0, -1.0, 2.0], &NelderMeadOptions::default());
        let t = trace.borrow();
        assert!(t.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn golden_section_on_parabola() {
        let (x, fx) = golden_section(|t| (t - 0.7).powi(2) + 1.0, 0.0, 2.0, 1e-10);
        assert!((x - 0.7).abs() < 1e-6);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn multistart_is_schedule_independent() {
        // two wells, the deeper at x = 2
        let f = |x: &[f64]| ((x[0] + 1.0).powi(2) * (x[0] - 2.0).powi(2)) - 0.1 * x[0];
        let start = |_: usize, rng: &mut ChaCha8Rng| vec![rng.random_range(-3.0..3.0)];
        let mut opts = MultiStartOptions {
            seed: 11,
            restarts: 16,
            local: NelderMeadOptions::default(),
            polish_rounds: 2,
            execution: Execution::Parallel,
        };
        let par = multistart(&f, &start, &opts);
        opts.execution = Execution::Sequential;
        let seq = multistart(&f, &start, &opts);
        assert_eq!(par.best.value.to_bits(), seq.best.value.to_bits());
        assert_eq!(par.best_restart, seq.best_restart);
        assert!((par.best.x[0] - 2.0).abs() < 0.05);
        assert!(par.spread >= 0.0);
    }
}
