//! Nelder-Mead simplex minimization with deterministic restarts.
//!
//! Derivative-free on purpose: the HND likelihood this crate maximizes is
//! only piecewise smooth in its threshold parameter (kink where the plateau
//! ends), which rules out quasi-Newton methods. After each converged round
//! the simplex is rebuilt around the incumbent best point with a shrunken,
//! sign-flipped step, which dislodges premature collapses without any
//! randomness; results are a pure function of the inputs.

const ALPHA: f64 = 1.0; // reflection
const GAMMA: f64 = 2.0; // expansion
const RHO: f64 = 0.5; // contraction
const SIGMA: f64 = 0.5; // shrink

/// Iteration budget and convergence thresholds for [`nelder_mead`].
#[derive(Debug, Clone, Copy)]
pub struct OptimizerSpec {
    pub x_tol: f64,
    pub f_tol: f64,
    pub max_iter: usize,
    pub restarts: usize,
}

impl Default for OptimizerSpec {
    fn default() -> Self {
        OptimizerSpec {
            x_tol: 1e-8,
            f_tol: 1e-10,
            max_iter: 2000,
            restarts: 4,
        }
    }
}

/// Outcome of a minimization run.
#[derive(Debug, Clone)]
pub struct MinimizeResult {
    /// Best point found across all restarts.
    pub x: Vec<f64>,
    /// Objective value at `x`.
    pub f: f64,
    /// Whether the final round met both the simplex-diameter and the
    /// value-spread thresholds before running out of iterations.
    pub converged: bool,
    /// Total objective evaluations spent.
    pub evaluations: usize,
}

/// Minimize `f` starting from `x0`.
///
/// Non-finite objective values are treated as +inf so the simplex backs away
/// from invalid regions instead of poisoning the ordering.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], spec: &OptimizerSpec) -> MinimizeResult {
    assert!(!x0.is_empty(), "nelder_mead needs at least one coordinate");
    assert!(spec.x_tol > 0.0 && spec.f_tol > 0.0 && spec.max_iter >= 1);
    let mut evals = 0usize;
    let mut eval = |x: &[f64]| {
        evals += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut best_x = x0.to_vec();
    let mut best_f = eval(&best_x);
    let mut converged = false;

    for round in 0..=spec.restarts {
        // initial step shrinks and alternates sign per restart round so each
        // rebuild probes a genuinely different simplex
        let base = 0.05 * 0.5f64.powi(round as i32);
        let step = if round % 2 == 0 { base } else { -base };
        let (x, fx, ok) = single_run(&mut eval, &best_x, step, spec);
        if fx < best_f {
            best_x = x;
            best_f = fx;
        }
        converged = ok;
    }

    MinimizeResult {
        x: best_x,
        f: best_f,
        converged,
        evaluations: evals,
    }
}

fn single_run<E: FnMut(&[f64]) -> f64>(
    eval: &mut E,
    x0: &[f64],
    step: f64,
    spec: &OptimizerSpec,
) -> (Vec<f64>, f64, bool) {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        let d = if v[i] != 0.0 { step * v[i].abs() } else { step * 0.005 };
        v[i] += d;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

    let mut converged = false;
    for _ in 0..spec.max_iter {
        // order: index 0 best, index n worst
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
        let ordered: Vec<Vec<f64>> = idx.iter().map(|&i| simplex[i].clone()).collect();
        let ordered_vals: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
        simplex = ordered;
        values = ordered_vals;

        let diameter = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max);
        let spread = values[n] - values[0];
        if diameter < spec.x_tol && spread.abs() < spec.f_tol {
            converged = true;
            break;
        }

        // centroid of all but the worst
        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, &vi) in centroid.iter_mut().zip(v) {
                *c += vi;
            }
        }
        for c in &mut centroid {
            *c /= n as f64;
        }

        let worst = values[n];
        let second_worst = values[n - 1];
        let reflected: Vec<f64> = centroid
            .iter()
            .zip(&simplex[n])
            .map(|(&c, &w)| c + ALPHA * (c - w))
            .collect();
        let fr = eval(&reflected);

        if fr < values[0] {
            let expanded: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n])
                .map(|(&c, &w)| c + GAMMA * (c - w))
                .collect();
            let fe = eval(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < second_worst {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let contracted: Vec<f64> = if fr < worst {
                // outside contraction
                centroid
                    .iter()
                    .zip(&reflected)
                    .map(|(&c, &r)| c + RHO * (r - c))
                    .collect()
            } else {
                // inside contraction
                centroid
                    .iter()
                    .zip(&simplex[n])
                    .map(|(&c, &w)| c + RHO * (w - c))
                    .collect()
            };
            let fc = eval(&contracted);
            if fc < worst.min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                // shrink toward the best vertex
                for i in 1..=n {
                    let next: Vec<f64> = simplex[0]
                        .iter()
                        .zip(&simplex[i])
                        .map(|(&b, &v)| b + SIGMA * (v - b))
                        .collect();
                    values[i] = eval(&next);
                    simplex[i] = next;
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if values[i] < values[best] {
            best = i;
        }
    }
    (simplex[best].clone(), values[best], converged)
}
