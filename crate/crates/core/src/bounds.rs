//! Truncation and tail estimates for coherent and Gaussian states.
//!
//! Every function here pairs an exactly computed quantity (a Poisson tail, a
//! Gaussian tail integral, a captured trace) with the analytic estimate it is
//! supposed to obey, so the estimates can be checked rather than trusted.
//! Exponentials are natural-base throughout this module; only capacities
//! elsewhere are reported in bits.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fock::CoherentAmplitude;
use crate::linalg::ln_factorial;

/// Apéry's constant `ζ(3)`.
pub const ZETA_3: f64 = 1.202_056_903_159_594_3;

/// Slack allowed when comparing an exact tail with its bound.
pub const TAIL_SLACK: f64 = 1e-12;

/// Poisson probability `P(K = k)` for mean `x`, evaluated in log-space.
fn poisson_pmf(x: f64, k: usize, ln_k_fact: f64) -> f64 {
    if x == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (-x + k as f64 * x.ln() - ln_k_fact).exp()
}

/// Mass of a coherent state above the first `n` number states,
/// `Σ_{k≥n} e^{-|α|²}|α|^{2k}/k!`.
pub fn coherent_tail(alpha: CoherentAmplitude, n: usize) -> f64 {
    let x = alpha.energy();
    if n == 0 {
        return 1.0;
    }
    if x == 0.0 {
        return 0.0;
    }
    if (n as f64) <= x {
        return (1.0 - poisson_head(x, n)).max(0.0);
    }
    let mut ln_fact = ln_factorial(n);
    let mut sum = 0.0;
    let mut k = n;
    loop {
        let term = poisson_pmf(x, k, ln_fact);
        sum += term;
        if term <= sum * 1e-18 || term == 0.0 {
            break;
        }
        k += 1;
        ln_fact += (k as f64).ln();
    }
    sum
}

fn poisson_head(x: f64, n: usize) -> f64 {
    let mut ln_fact = 0.0;
    let mut sum = 0.0;
    for k in 0..n {
        if k > 1 {
            ln_fact += (k as f64).ln();
        }
        sum += poisson_pmf(x, k, ln_fact);
    }
    sum
}

/// `tr(P_N |α⟩⟨α|)` for the projector `P_N` onto the first `n` number states.
pub fn coherent_capture(alpha: CoherentAmplitude, n: usize) -> f64 {
    let x = alpha.energy();
    if n == 0 {
        return 0.0;
    }
    if (n as f64) <= x {
        poisson_head(x, n)
    } else {
        1.0 - coherent_tail(alpha, n)
    }
}

/// `tr(P_N) = N`.
pub fn projector_trace(n: usize) -> usize {
    n
}

/// The estimate `1 - 2 e^{-|α|²} |α|^{2N}/N!`, claimed when `|α|² ≤ (N+1)/2`.
pub fn coherent_capture_lower_bound(alpha: CoherentAmplitude, n: usize) -> Result<f64> {
    let x = alpha.energy();
    if n == 0 {
        return invalid("N must be at least 1");
    }
    if x > (n as f64 + 1.0) / 2.0 {
        return Err(Error::Domain(format!(
            "|alpha|^2 = {x} exceeds (N+1)/2 = {}",
            (n as f64 + 1.0) / 2.0
        )));
    }
    Ok(1.0 - 2.0 * poisson_pmf(x, n, ln_factorial(n)))
}

/// Smallest `N ≥ 1` with `log₂ N ≥ 2 + log₂ E`, the truncation level beyond which the
/// Stirling estimate is claimed to give `tr(P_N|α⟩⟨α|) ≥ 1 - e^{-N}` for `|α|² ≤ E`.
pub fn stirling_threshold(energy: f64) -> Result<usize> {
    if !(energy > 0.0 && energy.is_finite()) {
        return invalid(format!("energy must be positive and finite, got {energy}"));
    }
    let target = 2.0 + energy.log2();
    let mut n = (target.exp2().ceil() as usize).max(1);
    while n > 1 && ((n - 1) as f64).log2() >= target {
        n -= 1;
    }
    while (n as f64).log2() < target {
        n += 1;
    }
    Ok(n)
}

/// Numerical check of the Stirling estimate over `N ∈ [threshold, threshold + horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StirlingReport {
    pub energy: f64,
    pub threshold: usize,
    pub holds_at_threshold: bool,
    /// Smallest scanned `N` from which `tail ≤ e^{-N}` holds for every larger scanned `N`.
    pub first_holding: Option<usize>,
    /// Scanned `N` at which the estimate fails.
    pub violations: Vec<usize>,
}

/// Capture is decreasing in `|α|²`, so the worst case over `|α|² ≤ E` is `|α|² = E`.
pub fn verify_stirling(energy: f64, horizon: usize) -> Result<StirlingReport> {
    let threshold = stirling_threshold(energy)?;
    let worst = CoherentAmplitude::real(energy.sqrt())?;
    let holds = |n: usize| coherent_tail(worst, n) <= (-(n as f64)).exp();
    let violations: Vec<usize> = (threshold..=threshold + horizon).filter(|&n| !holds(n)).collect();
    let first_holding = match violations.last() {
        None => Some(threshold),
        Some(&last) if last < threshold + horizon => Some(last + 1),
        Some(_) => None,
    };
    Ok(StirlingReport {
        energy,
        threshold,
        holds_at_threshold: holds(threshold),
        first_holding,
        violations,
    })
}

/// Exact Gaussian tail against the estimate `e^{-E'/σ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBoundReport {
    pub exact: f64,
    pub bound: f64,
    /// `exact ≤ bound + 1e-12`.
    pub satisfied: bool,
    /// `e^{-(√(E+E') - √E)²/σ}`, which bounds the tail for every `|α|² ≤ E`.
    pub shifted_bound: f64,
    pub shifted_satisfied: bool,
}

/// Mass of the complex Gaussian `(1/πσ) e^{-|z-α|²/σ}` outside the disk `|z|² ≤ E + E'`.
///
/// The integral is taken in polar coordinates centered at `α`: the radial part is
/// exact, leaving a smooth periodic integral in angle that the trapezoidal rule
/// resolves to machine precision. For `α = 0` the closed form `e^{-(E+E')/σ}` is used.
pub fn gaussian_tail(
    energy: f64,
    e_prime: f64,
    sigma: f64,
    alpha: CoherentAmplitude,
) -> Result<TailBoundReport> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return invalid(format!("sigma must be positive, got {sigma}"));
    }
    if !(e_prime > 0.0 && e_prime.is_finite()) {
        return invalid(format!("E' must be positive, got {e_prime}"));
    }
    if !(energy >= 0.0 && energy.is_finite()) {
        return invalid(format!("E must be nonnegative, got {energy}"));
    }
    if alpha.energy() > energy * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "|alpha|^2 = {} exceeds E = {energy}",
            alpha.energy()
        )));
    }
    let exact = gaussian_disk_complement(energy + e_prime, sigma, alpha);
    let bound = (-e_prime / sigma).exp();
    let shift = (energy + e_prime).sqrt() - energy.sqrt();
    let shifted_bound = (-shift * shift / sigma).exp();
    Ok(TailBoundReport {
        exact,
        bound,
        satisfied: exact <= bound + TAIL_SLACK,
        shifted_bound,
        shifted_satisfied: exact <= shifted_bound + TAIL_SLACK,
    })
}

fn gaussian_disk_complement(radius_sq: f64, sigma: f64, alpha: CoherentAmplitude) -> f64 {
    let a = alpha.value().norm();
    if a == 0.0 {
        return (-radius_sq / sigma).exp();
    }
    let c = radius_sq - a * a;
    let integrand = |phi: f64| {
        // distance from α to the circle |z|² = radius_sq along direction φ
        let u = a * phi.cos();
        let root = (u * u + c).sqrt();
        let r0 = if u > 0.0 { c / (u + root) } else { root - u };
        (-r0 * r0 / sigma).exp()
    };
    let mut nodes = 64;
    let mut prev = trapezoid_periodic(&integrand, nodes);
    loop {
        nodes *= 2;
        let cur = trapezoid_periodic(&integrand, nodes);
        if (cur - prev).abs() <= 1e-15 * cur.abs() || nodes >= 1 << 18 {
            return cur / TAU;
        }
        prev = cur;
    }
}

fn trapezoid_periodic(f: &impl Fn(f64) -> f64, nodes: usize) -> f64 {
    let h = TAU / nodes as f64;
    (0..nodes).map(|k| f(k as f64 * h)).sum::<f64>() * h
}

/// `(1 - e^{-E'/σ})(1 - e^{-N})`, the product of the Gaussian-tail and coherent-capture estimates.
pub fn combined_capture_bound(e_prime: f64, sigma: f64, n: usize) -> f64 {
    (1.0 - (-e_prime / sigma).exp()) * (1.0 - (-(n as f64)).exp())
}

/// `(1 - e^{-N})²`: the combined estimate with `E' = σN`, claimed as a lower bound on
/// `tr(P_N 𝒩_σ(α))` for all `|α|² ≤ E` when `N ≥ stirling_threshold(E + σN)`.
pub fn channel_capture_lower_bound(energy: f64, sigma: f64, n: usize) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return invalid(format!("sigma must be positive, got {sigma}"));
    }
    if !(energy > 0.0 && energy.is_finite()) {
        return invalid(format!("energy must be positive, got {energy}"));
    }
    let e_prime = sigma * n as f64;
    let needed = stirling_threshold(energy + e_prime)?;
    if n < needed {
        return Err(Error::Domain(format!(
            "N = {n} is below the Stirling threshold {needed} for E + sigma*N = {}",
            energy + e_prime
        )));
    }
    Ok(combined_capture_bound(e_prime, sigma, n))
}

/// `w(k) = d(k)² log₂(k+1)/k` with effective dimension `d(k) = c_d log₂ k`. Requires `k ≥ 2`.
pub fn scaling_w(k: u64, c_d: f64) -> f64 {
    let kf = k as f64;
    let d = c_d * kf.log2();
    d * d * (kf + 1.0).log2() / kf
}

/// Samples of [`scaling_w`] on a grid of block lengths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingProfile {
    pub c_d: f64,
    pub samples: Vec<(u64, f64)>,
}

impl ScalingProfile {
    /// Samples at `k = 2, 4, 8, …, 2^max_exp`.
    pub fn powers_of_two(c_d: f64, max_exp: u32) -> Result<Self> {
        if !(c_d > 0.0) {
            return invalid(format!("c_d must be positive, got {c_d}"));
        }
        let samples = (1..=max_exp).map(|e| (1u64 << e, scaling_w(1u64 << e, c_d))).collect();
        Ok(Self { c_d, samples })
    }

    pub fn peak(&self) -> Option<(u64, f64)> {
        self.samples
            .iter()
            .copied()
            .fold(None, |best, s| match best {
                Some((_, w)) if w >= s.1 => best,
                _ => Some(s),
            })
    }

    /// Strictly decreasing from the peak onward.
    pub fn decreasing_after_peak(&self) -> bool {
        let Some((k_peak, _)) = self.peak() else { return true };
        let tail: Vec<f64> = self.samples.iter().filter(|(k, _)| *k >= k_peak).map(|s| s.1).collect();
        tail.windows(2).all(|w| w[1] < w[0])
    }

    /// Smallest sampled `k` from which every later sample is below `delta`.
    pub fn first_below(&self, delta: f64) -> Option<u64> {
        let mut first = None;
        for &(k, w) in &self.samples {
            if w < delta {
                first.get_or_insert(k);
            } else {
                first = None;
            }
        }
        first
    }
}

/// Tail `Σ_{n≥N} n^{-3}/ζ(3)` of the normalized heavy-tailed spectrum `λₙ = n^{-3}/ζ(3)`, `n ≥ 1`.
pub fn heavy_tail_deficit(n: usize) -> f64 {
    let start = n.max(1);
    let switch = start.max(1000);
    let direct: f64 = (start..switch).map(|k| (k as f64).powi(-3)).sum();
    let m = switch as f64;
    // Euler–Maclaurin remainder for Σ_{k≥m} k^{-3}
    let em = 1.0 / (2.0 * m * m) + 1.0 / (2.0 * m.powi(3)) + 1.0 / (4.0 * m.powi(4))
        - 1.0 / (12.0 * m.powi(6));
    (direct + em) / ZETA_3
}

/// `tr(P_N ρ) = Σ_{1≤n<N} λₙ` for the heavy-tailed diagonal state.
pub fn heavy_tail_capture(n: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    1.0 - heavy_tail_deficit(n)
}

/// Mean photon number `Σ n λₙ = ζ(2)/ζ(3)` of the heavy-tailed state, which is finite.
pub fn heavy_tail_energy() -> f64 {
    PI * PI / 6.0 / ZETA_3
}
