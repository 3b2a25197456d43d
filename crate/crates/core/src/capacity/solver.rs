//! Max-min solver over the probability simplex with a dual certificate.
//!
//! The objective is `min_s f_s(p)` with each `f_s` concave. Every evaluation
//! also returns the divergences `d_s(i)` of each input against the current
//! mixture. They drive the Blahut–Arimoto updates, are supergradients of `f_s`
//! up to a constant shift, and feed the dual bound
//! `min_{λ, μ} max_i Σ_s λ_s d_s(i) - μ (c_i - E)`, which holds at any `p`.

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use super::StopReason;

/// Smallest prior entry kept by the multiplicative updates.
const PRIOR_FLOOR: f64 = 1e-200;

/// Stand-in for infinite divergences inside the LP.
const LP_INFINITY: f64 = 1e6;

/// Value of one state together with its per-input divergences.
#[derive(Debug, Clone)]
pub(crate) struct StateEval {
    pub value: f64,
    pub divergences: Vec<f64>,
}

pub(crate) trait MinimaxObjective {
    fn evaluate(&self, p: &[f64]) -> Vec<StateEval>;
}

/// Mean-cost constraint `Σ p_i c_i <= budget`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CostConstraint<'a> {
    pub costs: &'a [f64],
    pub budget: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Solution {
    pub p: Vec<f64>,
    pub value: f64,
    pub worst: usize,
    pub upper: f64,
    pub iterations: usize,
    pub stop: StopReason,
}

fn worst_of(evals: &[StateEval]) -> (f64, usize) {
    evals
        .iter()
        .enumerate()
        .fold((f64::INFINITY, 0), |acc, (s, e)| if e.value < acc.0 { (e.value, s) } else { acc })
}

/// Euclidean projection onto the probability simplex.
pub(crate) fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Euclidean projection onto `{p in simplex : Σ p_i c_i <= budget}`.
///
/// Bisection on the multiplier of the cost constraint.
pub(crate) fn project_capped(v: &[f64], c: CostConstraint<'_>) -> Vec<f64> {
    let cost = |p: &[f64]| p.iter().zip(c.costs).map(|(a, b)| a * b).sum::<f64>();
    let p0 = project_simplex(v);
    if cost(&p0) <= c.budget {
        return p0;
    }
    let shifted = |mu: f64| -> Vec<f64> {
        let w: Vec<f64> = v.iter().zip(c.costs).map(|(x, ci)| x - mu * ci).collect();
        project_simplex(&w)
    };
    let mut hi = 1.0;
    while cost(&shifted(hi)) > c.budget && hi < 1e12 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cost(&shifted(mid)) > c.budget {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.max(1.0) {
            break;
        }
    }
    shifted(hi)
}

fn bound_for(evals: &[StateEval], lambda: &[f64], mu: f64, cons: Option<CostConstraint<'_>>) -> f64 {
    let n = evals[0].divergences.len();
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        let mut v = 0.0;
        for (e, &l) in evals.iter().zip(lambda) {
            if l > 0.0 {
                v += l * e.divergences[i];
            }
        }
        if let Some(c) = cons {
            v -= mu * (c.costs[i] - c.budget);
        }
        best = best.max(v);
    }
    best
}

/// Certified upper bound on `max_p min_s f_s(p)` from divergences at any `p`.
pub(crate) fn dual_bound(evals: &[StateEval], cons: Option<CostConstraint<'_>>) -> f64 {
    let k = evals.len();
    let mut best = f64::INFINITY;
    for s in 0..k {
        let mut lambda = vec![0.0; k];
        lambda[s] = 1.0;
        best = best.min(bound_for(evals, &lambda, 0.0, cons));
        if let Some(c) = cons {
            if let Some(mu) = scalar_mu(&evals[s].divergences, c) {
                best = best.min(bound_for(evals, &lambda, mu, cons));
            }
        }
    }
    if k > 1 || cons.is_some() {
        if let Some((lambda, mu)) = lp_multipliers(evals, cons) {
            best = best.min(bound_for(evals, &lambda, mu, cons));
        }
    }
    best
}

/// Best `μ >= 0` for a single divergence vector, by ternary search on the convex envelope.
fn scalar_mu(d: &[f64], c: CostConstraint<'_>) -> Option<f64> {
    if d.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let f = |mu: f64| {
        d.iter()
            .zip(c.costs)
            .map(|(di, ci)| di - mu * (ci - c.budget))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let (mut lo, mut hi) = (0.0_f64, 1e3_f64);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    Some(0.5 * (lo + hi))
}

fn lp_multipliers(evals: &[StateEval], cons: Option<CostConstraint<'_>>) -> Option<(Vec<f64>, f64)> {
    let k = evals.len();
    let n = evals[0].divergences.len();
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let t = problem.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    let lambda: Vec<_> = (0..k).map(|_| problem.add_var(0.0, (0.0, 1.0))).collect();
    let mu = cons.map(|_| problem.add_var(0.0, (0.0, f64::INFINITY)));
    for i in 0..n {
        let mut row: Vec<(microlp::Variable, f64)> = vec![(t, -1.0)];
        for (s, e) in evals.iter().enumerate() {
            let d = e.divergences[i];
            row.push((lambda[s], if d.is_finite() { d.min(LP_INFINITY) } else { LP_INFINITY }));
        }
        if let (Some(mu), Some(c)) = (mu, cons) {
            row.push((mu, -(c.costs[i] - c.budget)));
        }
        problem.add_constraint(row, ComparisonOp::Le, 0.0);
    }
    problem.add_constraint(lambda.iter().map(|&v| (v, 1.0)).collect::<Vec<_>>(), ComparisonOp::Eq, 1.0);
    let microlp::SolveOutcome::Solution(sol) = problem.solve().ok()? else {
        return None;
    };
    let mut l: Vec<f64> = lambda.iter().map(|&v| sol[v].max(0.0)).collect();
    let sum: f64 = l.iter().sum();
    if !(sum > 0.0) {
        return None;
    }
    l.iter_mut().for_each(|x| *x /= sum);
    let m = mu.map(|v| sol[v].max(0.0)).unwrap_or(0.0);
    Some((l, m))
}

/// One-sided derivative of `t ↦ min_s f_s(t, 1 - t)` to the right of `t`.
fn right_derivative(evals: &[StateEval]) -> f64 {
    let (f, _) = worst_of(evals);
    evals
        .iter()
        .filter(|e| e.value <= f + 1e-13)
        .map(|e| e.divergences[0] - e.divergences[1])
        .fold(f64::INFINITY, f64::min)
}

/// Golden-section search on `p = (t, 1 - t)` for two-input objectives, polished
/// by bisection on the sign of the one-sided derivative.
pub(crate) fn maximin_binary<O: MinimaxObjective>(obj: &O, tol: f64) -> Solution {
    let phi = 0.5 * (5.0_f64.sqrt() - 1.0);
    let f = |t: f64| worst_of(&obj.evaluate(&[t, 1.0 - t])).0;
    let (mut a, mut b) = (0.0_f64, 1.0_f64);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 2;
    // the objective is flat to within rounding once b - a is near √ε
    while b - a > 1e-6 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
        iterations += 1;
    }
    // widen by one golden step so the bracket still holds the maximizer
    let (mut lo, mut hi) = ((a - (b - a)).max(0.0), (b + (b - a)).min(1.0));
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if right_derivative(&obj.evaluate(&[mid, 1.0 - mid])) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let mut best_t = 0.5 * (lo + hi);
    let mut best_evals = obj.evaluate(&[best_t, 1.0 - best_t]);
    for t in [lo, hi, 0.0, 1.0] {
        let e = obj.evaluate(&[t, 1.0 - t]);
        if worst_of(&e).0 > worst_of(&best_evals).0 {
            best_t = t;
            best_evals = e;
        }
    }
    let (value, worst) = worst_of(&best_evals);
    let mut upper = dual_bound(&best_evals, None);
    for t in [lo, hi] {
        upper = upper.min(dual_bound(&obj.evaluate(&[t, 1.0 - t]), None));
    }
    let stop = if upper - value <= tol { StopReason::Converged } else { StopReason::Stalled };
    Solution { p: vec![best_t, 1.0 - best_t], value, worst, upper, iterations, stop }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SaddleOptions {
    pub tol: f64,
    /// Budget of inner Blahut–Arimoto steps, summed over all outer rounds.
    pub max_iterations: usize,
}

/// `Σ_s λ_s d_s(i)` for every input.
fn mixed_divergences(evals: &[StateEval], lambda: &[f64]) -> Vec<f64> {
    let n = evals[0].divergences.len();
    (0..n)
        .map(|i| {
            evals
                .iter()
                .zip(lambda)
                .filter(|(_, &l)| l > 0.0)
                .map(|(e, &l)| l * e.divergences[i])
                .sum()
        })
        .collect()
}

/// Multiplicative update `p_i ∝ p_i 2^{d_i - ν c_i}` with the smallest `ν >= 0`
/// meeting the cost constraint.
fn blahut_step(p: &[f64], d: &[f64], cons: Option<CostConstraint<'_>>) -> Vec<f64> {
    let finite_max = d.iter().copied().filter(|x| x.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    let tilt = |nu: f64| -> Vec<f64> {
        let costs = cons.map(|c| c.costs);
        let logs: Vec<f64> = d
            .iter()
            .enumerate()
            .map(|(i, &di)| di.min(finite_max + 1.0) - costs.map_or(0.0, |c| nu * c[i]))
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // floored so that no input is lost for good: multiplicative updates cannot revive a zero
        let mut q: Vec<f64> = p
            .iter()
            .zip(&logs)
            .map(|(pi, l)| (pi * (l - top).max(-600.0).exp2()).max(PRIOR_FLOOR))
            .collect();
        let s: f64 = q.iter().sum();
        q.iter_mut().for_each(|x| *x /= s);
        q
    };
    let q = tilt(0.0);
    let Some(c) = cons else { return q };
    let cost = |q: &[f64]| q.iter().zip(c.costs).map(|(a, b)| a * b).sum::<f64>();
    if cost(&q) <= c.budget {
        return q;
    }
    let mut hi = 1.0;
    while cost(&tilt(hi)) > c.budget && hi < 1e6 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if cost(&tilt(mid)) > c.budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    tilt(hi)
}

/// Strictly positive, cost-feasible starting point: `start` averaged with the
/// uniform prior, then tilted by `2^{-ν c_i}` if needed.
pub(crate) fn feasible_interior(start: &[f64], cons: Option<CostConstraint<'_>>) -> Vec<f64> {
    let n = start.len() as f64;
    let mixed: Vec<f64> = start.iter().map(|x| 0.5 * x + 0.5 / n).collect();
    blahut_step(&mixed, &vec![0.0; start.len()], cons)
}

/// Upper bound on `max_p Σ_s λ_s f_s(p)` from mixed divergences.
fn mixed_bound(d: &[f64], cons: Option<CostConstraint<'_>>) -> f64 {
    let plain = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    match cons.and_then(|c| scalar_mu(d, c).map(|mu| (c, mu))) {
        Some((c, mu)) => {
            let tilted = d
                .iter()
                .zip(c.costs)
                .map(|(di, ci)| di - mu * (ci - c.budget))
                .fold(f64::NEG_INFINITY, f64::max);
            plain.min(tilted)
        }
        None => plain,
    }
}

struct InnerResult {
    p: Vec<f64>,
    values: Vec<f64>,
    upper: f64,
    iterations: usize,
}

/// Blahut–Arimoto on the state mixture with weights `λ`.
///
/// The exponent `2^{t d_i}` uses an adaptive step `t >= 1`: larger steps are
/// kept only while they improve the mixture objective, and `t = 1` is the
/// classical monotone update.
fn inner_maximize<O: MinimaxObjective>(
    obj: &O,
    lambda: &[f64],
    start: &[f64],
    cons: Option<CostConstraint<'_>>,
    tol: f64,
    budget: usize,
) -> InnerResult {
    let mixed_value = |evals: &[StateEval]| evals.iter().zip(lambda).map(|(e, l)| l * e.value).sum::<f64>();
    let mut p = start.to_vec();
    let mut evals = obj.evaluate(&p);
    let mut upper = f64::INFINITY;
    let mut iterations = 0;
    let mut step = 1.0_f64;
    loop {
        let d = mixed_divergences(&evals, lambda);
        let value = mixed_value(&evals);
        upper = upper.min(mixed_bound(&d, cons));
        if upper - value <= tol || iterations >= budget {
            return InnerResult { values: evals.iter().map(|e| e.value).collect(), p, upper, iterations };
        }
        let mut t = step;
        loop {
            let scaled: Vec<f64> = d.iter().map(|x| x * t).collect();
            let cand = blahut_step(&p, &scaled, cons);
            let cand_evals = obj.evaluate(&cand);
            iterations += 1;
            if t <= 1.0 || mixed_value(&cand_evals) >= value {
                p = cand;
                evals = cand_evals;
                break;
            }
            t = (0.5 * t).max(1.0);
        }
        step = if t == step { (2.0 * step).min(1e6) } else { t };
    }
}

/// Weights `w` on the simplex maximizing `min_s Σ_k w_k rows[k][s]` (`maximize`)
/// or minimizing `max_k Σ_s w_s rows[k][s]` (otherwise); returns the weights and the optimum.
fn cut_lp(rows: &[Vec<f64>], maximize: bool) -> Option<(Vec<f64>, f64)> {
    let states = rows[0].len();
    let (dir, n_w, n_c) = if maximize {
        (OptimizationDirection::Maximize, rows.len(), states)
    } else {
        (OptimizationDirection::Minimize, states, rows.len())
    };
    let mut problem = Problem::new(dir);
    let t = problem.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    let w: Vec<_> = (0..n_w).map(|_| problem.add_var(0.0, (0.0, 1.0))).collect();
    #[allow(clippy::needless_range_loop)]
    for j in 0..n_c {
        let mut row: Vec<(microlp::Variable, f64)> = vec![(t, -1.0)];
        for (i, &wi) in w.iter().enumerate() {
            let v = if maximize { rows[i][j] } else { rows[j][i] };
            row.push((wi, v));
        }
        let op = if maximize { ComparisonOp::Ge } else { ComparisonOp::Le };
        problem.add_constraint(row, op, 0.0);
    }
    problem.add_constraint(w.iter().map(|&v| (v, 1.0)).collect::<Vec<_>>(), ComparisonOp::Eq, 1.0);
    let microlp::SolveOutcome::Solution(sol) = problem.solve().ok()? else {
        return None;
    };
    let mut weights: Vec<f64> = w.iter().map(|&v| sol[v].max(0.0)).collect();
    let s: f64 = weights.iter().sum();
    if !(s > 0.0) {
        return None;
    }
    weights.iter_mut().for_each(|x| *x /= s);
    Some((weights, sol[t]))
}

/// Saddle-point solver for `max_p min_s f_s(p) = min_λ max_p Σ_s λ_s f_s(p)`.
///
/// The inner maximization is a Blahut–Arimoto iteration on the mixture. The
/// outer loop is a cutting-plane method on `λ`: every inner solution `p_k`
/// gives the affine minorant `λ ↦ Σ_s λ_s f_s(p_k)` of the convex dual
/// function, and the primal candidate is the best convex combination of the
/// `p_k`, which concavity keeps at least as good as the combination predicts.
pub(crate) fn maximin_saddle<O: MinimaxObjective>(
    obj: &O,
    start: &[f64],
    cons: Option<CostConstraint<'_>>,
    opts: SaddleOptions,
) -> Solution {
    let k = obj.evaluate(start).len();
    let mut lambda = vec![1.0 / k as f64; k];
    let mut p_start = start.to_vec();
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut cuts: Vec<Vec<f64>> = Vec::new();
    let mut best = (f64::NEG_INFINITY, start.to_vec(), 0usize);
    let mut upper = f64::INFINITY;
    let mut iterations = 0;
    let mut stop = StopReason::IterationCap;
    let consider = |p: Vec<f64>, best: &mut (f64, Vec<f64>, usize), upper: &mut f64| {
        let evals = obj.evaluate(&p);
        let (v, s) = worst_of(&evals);
        *upper = upper.min(dual_bound(&evals, cons));
        if v > best.0 {
            *best = (v, p, s);
        }
    };

    while iterations < opts.max_iterations {
        let inner = inner_maximize(obj, &lambda, &p_start, cons, 0.25 * opts.tol, opts.max_iterations - iterations);
        iterations += inner.iterations + 1;
        upper = upper.min(inner.upper);
        p_start.clone_from(&inner.p);
        points.push(inner.p.clone());
        cuts.push(inner.values.clone());
        consider(inner.p, &mut best, &mut upper);

        if k > 1 {
            if let Some((mu, _)) = cut_lp(&cuts, true) {
                let n = points[0].len();
                let mut p = vec![0.0; n];
                for (m, pt) in mu.iter().zip(&points) {
                    p.iter_mut().zip(pt).for_each(|(a, b)| *a += m * b);
                }
                consider(p, &mut best, &mut upper);
            }
        }
        if upper - best.0 <= opts.tol {
            stop = StopReason::Converged;
            break;
        }
        if k == 1 {
            break;
        }
        match cut_lp(&cuts, false) {
            Some((next, _)) if next.iter().zip(&lambda).any(|(a, b)| (a - b).abs() > 1e-12) => lambda = next,
            Some(_) => {
                // same weights again: tighten the inner solve instead
                let inner = inner_maximize(obj, &lambda, &p_start, cons, 0.01 * opts.tol, opts.max_iterations - iterations.min(opts.max_iterations));
                iterations += inner.iterations + 1;
                upper = upper.min(inner.upper);
                p_start.clone_from(&inner.p);
                consider(inner.p, &mut best, &mut upper);
                if upper - best.0 <= opts.tol {
                    stop = StopReason::Converged;
                }
                break;
            }
            None => {
                stop = StopReason::Stalled;
                break;
            }
        }
    }
    if stop != StopReason::Converged && upper - best.0 <= opts.tol {
        stop = StopReason::Converged;
    }
    Solution { p: best.1, value: best.0, worst: best.2, upper, iterations, stop }
}
