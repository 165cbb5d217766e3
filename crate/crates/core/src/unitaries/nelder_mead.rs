use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

/// Stopping rules and initial simplex size.
#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Converged once every vertex lies within this distance of the best one.
    pub diameter_tol: f64,
    pub initial_step: f64,
    /// Stop as soon as a value at or below this is seen.
    pub stop_below: Option<f64>,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions { max_evals: 2000, diameter_tol: 1e-8, initial_step: 0.3, stop_below: None }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder-Mead minimization with dimension-adapted coefficients
/// (reflection 1, expansion 1 + 2/n, contraction 3/4 - 1/(2n), shrink 1 - 1/n).
///
/// NaN and `+inf` are treated as worse than any finite value. The simplex is
/// axis-aligned around `x0`. The first-found minimum wins ties.
pub fn minimize(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], opts: &NelderMeadOptions) -> Minimum {
    let n = x0.len();
    let nf = n.max(1) as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
    let budget = opts.max_evals.max(1);

    let mut evals = 0usize;
    let mut best_x = x0.to_vec();
    let mut best_v = f64::INFINITY;
    let mut stop = false;
    let mut eval = |x: &[f64], evals: &mut usize, best_x: &mut Vec<f64>, best_v: &mut f64, stop: &mut bool| -> f64 {
        *evals += 1;
        let v = f(x);
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if v < *best_v {
            *best_v = v;
            best_x.clear();
            best_x.extend_from_slice(x);
        }
        if opts.stop_below.is_some_and(|t| v <= t) {
            *stop = true;
        }
        v
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    values.push(eval(x0, &mut evals, &mut best_x, &mut best_v, &mut stop));
    for i in 0..n {
        if evals >= budget || stop {
            break;
        }
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        values.push(eval(&x, &mut evals, &mut best_x, &mut best_v, &mut stop));
        simplex.push(x);
    }
    if simplex.len() < n + 1 || n == 0 {
        return Minimum { x: best_x, value: best_v, evaluations: evals, converged: n == 0 };
    }

    let mut converged = false;
    let mut order: Vec<usize> = (0..=n).collect();
    while evals < budget && !stop {
        // Stable sort keeps earlier vertices ahead on ties.
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        let diameter = simplex
            .iter()
            .map(|v| v.iter().zip(&simplex[best]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        if diameter < opts.diameter_tol {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for &idx in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[idx]) {
                *c += x / nf;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[worst]).map(|(c, w)| c + t * (c - w)).collect()
        };

        let xr = along(alpha);
        let fr = eval(&xr, &mut evals, &mut best_x, &mut best_v, &mut stop);
        if fr < values[best] {
            if evals >= budget || stop {
                simplex[worst] = xr;
                values[worst] = fr;
                break;
            }
            let xe = along(gamma);
            let fe = eval(&xe, &mut evals, &mut best_x, &mut best_v, &mut stop);
            if fe < fr {
                simplex[worst] = xe;
                values[worst] = fe;
            } else {
                simplex[worst] = xr;
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second_worst] {
            simplex[worst] = xr;
            values[worst] = fr;
            continue;
        }
        if evals >= budget || stop {
            break;
        }
        // Outside contraction when the reflection improved on the worst vertex.
        let xc = if fr < values[worst] { along(rho * alpha) } else { along(-rho) };
        let fc = eval(&xc, &mut evals, &mut best_x, &mut best_v, &mut stop);
        if fc < values[worst].min(fr) {
            simplex[worst] = xc;
            values[worst] = fc;
            continue;
        }
        // Shrink toward the best vertex.
        let anchor = simplex[best].clone();
        for &idx in &order[1..] {
            if evals >= budget || stop {
                break;
            }
            let x: Vec<f64> = anchor.iter().zip(&simplex[idx]).map(|(a, v)| a + sigma * (v - a)).collect();
            values[idx] = eval(&x, &mut evals, &mut best_x, &mut best_v, &mut stop);
            simplex[idx] = x;
        }
    }

    Minimum { x: best_x, value: best_v, evaluations: evals, converged }
}
