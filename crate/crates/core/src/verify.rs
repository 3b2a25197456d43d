//! Seeded property suites comparing exact quantities with their analytic bounds.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{
    coherent_capture, coherent_capture_lower_bound, gaussian_tail, heavy_tail_deficit, verify_stirling,
    ScalingProfile, TAIL_SLACK,
};
use crate::error::Result;
use crate::fock::{gaussian_channel_output_unchecked, CoherentAmplitude, GaussianChannelParams};
use crate::kennedy::{
    compound_rate, default_offset, frobenius_limits, z_channel_capacity, Branch, DisplacementSchedule,
    ScheduleKind,
};

/// Samples drawn per randomized family.
pub const SAMPLES: usize = 200;

/// Slack for the channel-capture comparison.
pub const CAPTURE_SLACK: f64 = 1e-9;

/// Block lengths for the Frobenius limit study.
pub const LIMIT_AMPLITUDES: [f64; 4] = [25.0, 50.0, 100.0, 200.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Bounds,
    Scaling,
    Limits,
}

/// Direction of a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<")]
    Below,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub exact: f64,
    pub relation: Relation,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, exact: f64, relation: Relation, bound: f64, slack: f64) -> Self {
        let passed = match relation {
            Relation::AtMost => exact <= bound + slack,
            Relation::AtLeast => exact >= bound - slack,
            Relation::Below => exact < bound,
        };
        Self { name: name.into(), exact, relation, bound, passed }
    }

    fn flag(name: impl Into<String>, ok: bool) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        Self { name: name.into(), exact: v, relation: Relation::AtLeast, bound: 1.0, passed: ok }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<VerifyReport> {
    let checks = match suite {
        Suite::Bounds => bounds_checks(seed)?,
        Suite::Scaling => scaling_checks()?,
        Suite::Limits => limit_checks()?,
    };
    let passed = checks.iter().filter(|c| c.passed).count();
    Ok(VerifyReport { suite, seed, passed, failed: checks.len() - passed, checks })
}

/// Random `(E, E', σ, α)` with `|α|² ≤ E ≤ 4`, `σ ∈ [0.1, 2]`, `E' ∈ [0.1, 4]`.
pub fn tail_samples(seed: u64, n: usize) -> Vec<(f64, f64, f64, CoherentAmplitude)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let energy: f64 = rng.gen_range(0.0..=4.0);
            let e_prime = rng.gen_range(0.1..=4.0);
            let sigma = rng.gen_range(0.1..=2.0);
            let r = (rng.gen_range(0.0..=1.0_f64) * energy).sqrt();
            let alpha = CoherentAmplitude::polar(r, rng.gen_range(0.0..TAU)).expect("finite");
            (energy, e_prime, sigma, alpha)
        })
        .collect()
}

/// Random `(α, N)` with `N ∈ [1, 64]` and `|α|² ≤ (N+1)/2`.
pub fn capture_samples(seed: u64, n: usize) -> Vec<(CoherentAmplitude, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    (0..n)
        .map(|_| {
            let levels = rng.gen_range(1..=64usize);
            let r = (rng.gen_range(0.0..=1.0_f64) * (levels as f64 + 1.0) / 2.0).sqrt();
            (CoherentAmplitude::polar(r, rng.gen_range(0.0..TAU)).expect("finite"), levels)
        })
        .collect()
}

/// `tr(P_N 𝒩_σ(α))` against `(1 - e^{-N})²` on the fixed grid `σ ∈ {0.1, 0.5, 1}`,
/// `N ∈ {20, 40}`, `|α| ∈ {0, 0.5, 1}`.
pub fn channel_capture_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for sigma in [0.1, 0.5, 1.0] {
        let params = GaussianChannelParams::noise(sigma)?;
        for n in [20usize, 40] {
            let bound = (1.0 - (-(n as f64)).exp()).powi(2);
            for r in [0.0, 0.5, 1.0] {
                let state = gaussian_channel_output_unchecked(CoherentAmplitude::real(r)?, &params, n)?;
                out.push(Check::new(
                    format!("channel_capture sigma={sigma} N={n} |alpha|={r}"),
                    state.captured_mass(),
                    Relation::AtLeast,
                    bound,
                    CAPTURE_SLACK,
                ));
            }
        }
    }
    Ok(out)
}

fn bounds_checks(seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (i, (energy, e_prime, sigma, alpha)) in tail_samples(seed, SAMPLES).into_iter().enumerate() {
        let rep = gaussian_tail(energy, e_prime, sigma, alpha)?;
        checks.push(Check::new(
            format!("gaussian_tail[{i}] E={energy:.6} E'={e_prime:.6} sigma={sigma:.6} |alpha|^2={:.6}", alpha.energy()),
            rep.exact,
            Relation::AtMost,
            rep.bound,
            TAIL_SLACK,
        ));
    }
    for (i, (alpha, n)) in capture_samples(seed, SAMPLES).into_iter().enumerate() {
        checks.push(Check::new(
            format!("coherent_capture[{i}] N={n} |alpha|^2={:.6}", alpha.energy()),
            coherent_capture(alpha, n),
            Relation::AtLeast,
            coherent_capture_lower_bound(alpha, n)?,
            TAIL_SLACK,
        ));
    }
    checks.extend(channel_capture_checks()?);
    let st = verify_stirling(1.0, 64)?;
    checks.push(Check::new(
        format!("stirling E=1 first holding N (threshold {})", st.threshold),
        st.first_holding.map_or(f64::INFINITY, |n| n as f64),
        Relation::AtMost,
        st.threshold as f64 + 64.0,
        0.0,
    ));
    for n in [100usize, 1000, 10000] {
        let scaled = heavy_tail_deficit(n) * (n * n) as f64;
        checks.push(Check::new(format!("heavy_tail N={n} deficit*N^2 >= 0.3"), scaled, Relation::AtLeast, 0.3, 0.0));
        checks.push(Check::new(format!("heavy_tail N={n} deficit*N^2 <= 0.7"), scaled, Relation::AtMost, 0.7, 0.0));
    }
    Ok(checks)
}

fn scaling_checks() -> Result<Vec<Check>> {
    let profile = ScalingProfile::powers_of_two(1.0, 40)?;
    let mut checks = vec![Check::flag("w decreasing after its peak", profile.decreasing_after_peak())];
    let k_star = profile.first_below(0.01);
    checks.push(Check::new(
        "first k with w(k) < 0.01 thereafter",
        k_star.map_or(f64::INFINITY, |k| k as f64),
        Relation::AtMost,
        (1u64 << 30) as f64,
        0.0,
    ));
    if let Some(k_star) = k_star {
        for &(k, w) in profile.samples.iter().filter(|(k, _)| *k >= k_star) {
            checks.push(Check::new(format!("w({k})"), w, Relation::Below, 0.01, 0.0));
        }
    }
    Ok(checks)
}

fn limit_checks() -> Result<Vec<Check>> {
    let c = default_offset();
    let mut checks = Vec::new();
    for kind in [ScheduleKind::WorstCase, ScheduleKind::Balanced] {
        let schedule = DisplacementSchedule::new(c, kind)?;
        for branch in [Branch::Lossy, Branch::Lossless] {
            let rows = frobenius_limits(&schedule, branch, &LIMIT_AMPLITUDES)?;
            let label = format!("{kind:?}/{branch:?}");
            let decreasing = rows.windows(2).all(|w| w[1].ln_exact < w[0].ln_exact);
            checks.push(Check::flag(format!("{label} ln distance strictly decreasing"), decreasing));
            let last = rows.last().expect("nonempty");
            checks.push(Check::new(format!("{label} exact distance at a=200"), last.ln_exact.exp(), Relation::Below, 1e-3, 0.0));
            checks.push(Check::new(format!("{label} direct distance at a=200"), last.direct, Relation::Below, 1e-3, 0.0));
        }
    }
    let a = 200.0;
    let worst = DisplacementSchedule::new(c, ScheduleKind::WorstCase)?;
    let eps = worst.eps(a)?;
    let rate = compound_rate(a, eps, worst.displacement(a)?, 1e-9)?;
    checks.push(Check::new("worst-case compound rate at a=200", rate.value, Relation::AtMost, 0.3230, 0.0));
    let balanced = DisplacementSchedule::new(c, ScheduleKind::Balanced)?;
    let rate = compound_rate(a, eps, balanced.displacement(a)?, 1e-9)?;
    checks.push(Check::new("balanced compound rate at a=200", rate.value, Relation::AtLeast, 0.625, 0.0));
    let target = z_channel_capacity((-c * c / 4.0).exp())?;
    checks.push(Check::new(
        "balanced rate distance to limit Z-channel",
        (rate.value - target).abs(),
        Relation::Below,
        1e-3,
        0.0,
    ));
    Ok(checks)
}
