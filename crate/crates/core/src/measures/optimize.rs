//! Derivative-free local search (Nelder-Mead) with seeded multi-start.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Settings for [`nelder_mead`].
#[derive(Debug, Clone, Copy)]
pub struct LocalSearch {
    /// Initial simplex edge length.
    pub step: f64,
    /// A restart cycle that improves the best value by less than this ends the search.
    pub ftol: f64,
    /// Simplex diameter at which a single cycle stops shrinking.
    pub xtol: f64,
    /// Evaluation budget across all cycles.
    pub max_evals: usize,
    pub max_cycles: usize,
}

impl Default for LocalSearch {
    fn default() -> Self {
        Self {
            step: 0.4,
            ftol: 1e-10,
            xtol: 1e-9,
            max_evals: 20_000,
            max_cycles: 12,
        }
    }
}

/// Outcome of one local search.
#[derive(Debug, Clone)]
pub struct LocalMinimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

fn one_cycle<F>(f: &F, x0: &[f64], step: f64, xtol: f64, budget: usize) -> (Vec<f64>, f64, usize)
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        f(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let fx = eval(&x);
        simplex.push((x, fx));
    }

    // standard coefficients
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter < xtol || (worst - best).abs() < 1e-15 || evals.get() >= budget {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
            .collect();
        let toward = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let xr = toward(alpha);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = toward(gamma);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst {
            let xc = toward(rho * alpha);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = toward(-rho);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < worst.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let x_best = simplex[0].0.clone();
        for (x, fx) in simplex.iter_mut().skip(1) {
            for (xi, bi) in x.iter_mut().zip(&x_best) {
                *xi = bi + sigma * (*xi - bi);
            }
            *fx = eval(x);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    (x, v, evals.get())
}

/// Minimize `f` from `x0`, restarting the simplex around the incumbent until a
/// cycle improves by less than `opts.ftol`.
pub fn nelder_mead<F>(f: &F, x0: &[f64], opts: &LocalSearch) -> LocalMinimum
where
    F: Fn(&[f64]) -> f64,
{
    if x0.is_empty() {
        return LocalMinimum {
            x: Vec::new(),
            value: f(x0),
            evals: 1,
            converged: true,
        };
    }
    let mut x = x0.to_vec();
    let mut value = f(&x);
    let mut evals = 1;
    let mut step = opts.step;
    for _ in 0..opts.max_cycles {
        let budget = opts.max_evals.saturating_sub(evals);
        if budget == 0 {
            break;
        }
        let (nx, nv, used) = one_cycle(f, &x, step, opts.xtol, budget);
        evals += used;
        let improvement = value - nv;
        if nv < value {
            x = nx;
            value = nv;
        }
        if improvement < opts.ftol {
            return LocalMinimum {
                x,
                value,
                evals,
                converged: true,
            };
        }
        step = (step * 0.5).max(1e-3);
    }
    LocalMinimum {
        x,
        value,
        evals,
        converged: false,
    }
}

/// Best of several seeded local searches.
#[derive(Debug, Clone)]
pub struct MultiStartResult<S> {
    pub best: LocalMinimum,
    pub start: S,
    pub start_index: usize,
    pub total_evals: usize,
    pub all_converged: bool,
}

/// Runs `starts` independent searches in parallel. Start `i` draws its random
/// initial data from a ChaCha stream `i` of `seed`, so the reduction (lowest
/// value, ties broken by the lowest index) is independent of scheduling.
pub fn multi_start<S, G, F>(
    starts: usize,
    seed: u64,
    opts: &LocalSearch,
    init: G,
    objective: F,
) -> MultiStartResult<S>
where
    S: Send,
    G: Fn(&mut ChaCha8Rng) -> (S, Vec<f64>) + Sync,
    F: Fn(&S, &[f64]) -> f64 + Sync,
{
    let starts = starts.max(1);
    let runs: Vec<(S, LocalMinimum)> = (0..starts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (start, x0) = init(&mut rng);
            let f = |x: &[f64]| objective(&start, x);
            let local = nelder_mead(&f, &x0, opts);
            (start, local)
        })
        .collect();
    let total_evals = runs.iter().map(|(_, r)| r.evals).sum();
    let all_converged = runs.iter().all(|(_, r)| r.converged);
    let (start_index, _) = runs
        .iter()
        .enumerate()
        .fold(None::<(usize, f64)>, |acc, (i, (_, r))| match acc {
            Some((_, v)) if v <= r.value => acc,
            _ => Some((i, r.value)),
        })
        .expect("at least one start");
    let (start, best) = runs.into_iter().nth(start_index).expect("index in range");
    MultiStartResult {
        best,
        start,
        start_index,
        total_evals,
        all_converged,
    }
}
