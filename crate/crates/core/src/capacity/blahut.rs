use super::{mutual_information, CapacityResult, Dmc, Prior, StopReason, MAX_ITERATIONS};
use crate::error::{invalid, Result};

/// Capacity of a single DMC by Blahut–Arimoto.
///
/// Stops once `max_x D(W(·|x) ‖ pW) - I(p; W) <= tol`; the left term is an
/// upper bound on the capacity, so `gap` is certified.
pub fn dmc_capacity(w: &Dmc, tol: f64) -> Result<CapacityResult> {
    if !(tol > 0.0) {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    let n = w.inputs();
    let mut p = vec![1.0 / n as f64; n];
    let mut iterations = 0;
    let mut best = (f64::NEG_INFINITY, p.clone());
    let mut upper = f64::INFINITY;
    let mut stop = StopReason::IterationCap;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let d = w.divergences(&p);
        let value = mutual_information(&Prior::normalized(p.clone()), w)?;
        if value > best.0 {
            best = (value, p.clone());
        }
        let max_d = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        upper = upper.min(max_d);
        if upper - best.0 <= tol {
            stop = StopReason::Converged;
            break;
        }
        // p(x) <- p(x) 2^{D_x} / Σ
        let mut next: Vec<f64> = p.iter().zip(&d).map(|(px, dx)| px * (dx - max_d).exp2()).collect();
        let sum: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= sum);
        p = next;
    }
    let (value, p) = best;
    Ok(CapacityResult {
        value,
        optimizer: Prior::normalized(p),
        worst_index: 0,
        iterations,
        upper_bound: upper,
        gap: upper - value,
        stop,
    })
}
