//! Classical channels induced by a Kennedy receiver on a compound pure-loss channel.
//!
//! The sender uses the binary alphabet `α_x = a(-1)^x`. The receiver displaces
//! by `b` and counts photons, so on a loss channel of transmissivity `η` the
//! probability of seeing no photon is `exp(-(b - √η α_x)²)`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::capacity::{compound_capacity, CapacityResult, CompoundSet, Dmc};
use crate::error::{invalid, Error, Result};

/// Exponents below this are treated as exact zeros.
pub const UNDERFLOW_EXPONENT: f64 = -700.0;

/// Header of the sweep CSV.
pub const SWEEP_CSV_HEADER: &str = "b,cap_eta1,cap_eps,cap_compound";

/// `√(ln 2)`: the offset for which the lossless no-click probability is `1/2`.
pub fn default_offset() -> f64 {
    std::f64::consts::LN_2.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KennedyConfig {
    a: f64,
    eta: f64,
    b: f64,
}

impl KennedyConfig {
    pub fn new(a: f64, eta: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return invalid(format!("amplitude a must be positive, got {a}"));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return invalid(format!("transmissivity must lie in (0, 1], got {eta}"));
        }
        if !b.is_finite() {
            return invalid(format!("displacement must be finite, got {b}"));
        }
        Ok(Self { a, eta, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

fn no_click(offset: f64) -> f64 {
    let e = -offset * offset;
    if e < UNDERFLOW_EXPONENT {
        0.0
    } else {
        e.exp()
    }
}

/// `W(0|x) = exp(-(b - √η a (-1)^x)²)`, `W(1|x) = 1 - W(0|x)`.
pub fn kennedy_channel(cfg: &KennedyConfig) -> Dmc {
    let amp = cfg.eta.sqrt() * cfg.a;
    let p0 = no_click(cfg.b - amp);
    let p1 = no_click(cfg.b + amp);
    Dmc::new(vec![vec![p0, 1.0 - p0], vec![p1, 1.0 - p1]]).expect("probabilities in [0, 1]")
}

/// `w_p`: `W(0|0) = p`, `W(1|0) = 1 - p`, `W(1|1) = 1`.
pub fn z_channel(p: f64) -> Result<Dmc> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("z-channel parameter must lie in [0, 1], got {p}"));
    }
    Dmc::new(vec![vec![p, 1.0 - p], vec![0.0, 1.0]])
}

/// Capacity of `w_p` in closed form: `log₂(1 + (1-f) f^{f/(1-f)})` with `f = 1 - p`.
pub fn z_channel_capacity(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("z-channel parameter must lie in [0, 1], got {p}"));
    }
    let f = 1.0 - p;
    if f == 1.0 {
        return Ok(0.0);
    }
    let tail = if f == 0.0 { 1.0 } else { (1.0 - f) * f.powf(f / (1.0 - f)) };
    Ok((1.0 + tail).log2())
}

/// `ε(a) = ((a - c)/a)²`.
pub fn eps_schedule(a: f64, c: f64) -> Result<f64> {
    if !(c > 0.0 && a > c && a.is_finite()) {
        return invalid(format!("need a > c > 0, got a = {a}, c = {c}"));
    }
    let r = (a - c) / a;
    Ok(r * r)
}

/// `√(Σ (W - V)²)` over all entries.
pub fn frobenius_distance(w: &Dmc, v: &Dmc) -> Result<f64> {
    if (w.inputs(), w.outputs()) != (v.inputs(), v.outputs()) {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            w.inputs(),
            w.outputs(),
            v.inputs(),
            v.outputs()
        )));
    }
    let mut s = 0.0;
    for x in 0..w.inputs() {
        for (a, b) in w.row(x).iter().zip(v.row(x)) {
            s += (a - b) * (a - b);
        }
    }
    Ok(s.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    /// `b(a) = √ε(a)·a = a - c`: nulls symbol 0 on the lossy channel.
    WorstCase,
    /// `b̃(a) = a - c/2`: halfway between the two nulling points.
    Balanced,
}

/// Which member of the compound pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `η = ε(a)`.
    Lossy,
    /// `η = 1`.
    Lossless,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisplacementSchedule {
    c: f64,
    kind: ScheduleKind,
}

impl DisplacementSchedule {
    pub fn new(c: f64, kind: ScheduleKind) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return invalid(format!("offset c must be positive, got {c}"));
        }
        Ok(Self { c, kind })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn eps(&self, a: f64) -> Result<f64> {
        eps_schedule(a, self.c)
    }

    pub fn displacement(&self, a: f64) -> Result<f64> {
        eps_schedule(a, self.c)?;
        Ok(match self.kind {
            ScheduleKind::WorstCase => a - self.c,
            ScheduleKind::Balanced => a - 0.5 * self.c,
        })
    }

    pub fn channel(&self, a: f64, branch: Branch) -> Result<Dmc> {
        let eta = match branch {
            Branch::Lossy => self.eps(a)?,
            Branch::Lossless => 1.0,
        };
        Ok(kennedy_channel(&KennedyConfig::new(a, eta, self.displacement(a)?)?))
    }

    /// Offsets `(b - √η a, b + √η a)` in closed form, free of cancellation.
    pub fn offsets(&self, a: f64, branch: Branch) -> Result<(f64, f64)> {
        eps_schedule(a, self.c)?;
        let c = self.c;
        Ok(match (self.kind, branch) {
            (ScheduleKind::WorstCase, Branch::Lossy) => (0.0, 2.0 * (a - c)),
            (ScheduleKind::WorstCase, Branch::Lossless) => (-c, 2.0 * a - c),
            (ScheduleKind::Balanced, Branch::Lossy) => (0.5 * c, 2.0 * a - 1.5 * c),
            (ScheduleKind::Balanced, Branch::Lossless) => (-0.5 * c, 2.0 * a - 0.5 * c),
        })
    }

    /// Parameter `p` of the Z-channel `w_p` that the branch approaches as `a → ∞`.
    pub fn limit_parameter(&self, branch: Branch) -> f64 {
        match (self.kind, branch) {
            (ScheduleKind::WorstCase, Branch::Lossy) => 1.0,
            (ScheduleKind::WorstCase, Branch::Lossless) => (-self.c * self.c).exp(),
            (ScheduleKind::Balanced, _) => (-0.25 * self.c * self.c).exp(),
        }
    }

    /// `ln ‖p_{η,b(a)} - w_p‖_F` against the limit channel, evaluated without underflow.
    pub fn ln_limit_distance(&self, a: f64, branch: Branch) -> Result<f64> {
        let (near, far) = self.offsets(a, branch)?;
        let head = (-near * near).exp() - self.limit_parameter(branch);
        // ‖·‖² = 2 head² + 2 e^{-2 far²}
        let terms = [
            if head == 0.0 { f64::NEG_INFINITY } else { std::f64::consts::LN_2 + 2.0 * head.abs().ln() },
            std::f64::consts::LN_2 - 2.0 * far * far,
        ];
        let m = terms[0].max(terms[1]);
        let sum: f64 = terms.iter().map(|t| (t - m).exp()).sum();
        Ok(0.5 * (m + sum.ln()))
    }
}

/// One row of a Frobenius limit study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitSample {
    pub a: f64,
    /// Distance computed from the double-precision channels.
    pub direct: f64,
    /// Natural log of the exact distance.
    pub ln_exact: f64,
}

/// Distances of one branch of a schedule to its limit Z-channel along `a_values`.
pub fn frobenius_limits(schedule: &DisplacementSchedule, branch: Branch, a_values: &[f64]) -> Result<Vec<LimitSample>> {
    let target = z_channel(schedule.limit_parameter(branch))?;
    a_values
        .iter()
        .map(|&a| {
            Ok(LimitSample {
                a,
                direct: frobenius_distance(&schedule.channel(a, branch)?, &target)?,
                ln_exact: schedule.ln_limit_distance(a, branch)?,
            })
        })
        .collect()
}

/// Compound capacity of `{p_{1,b}, p_{ε,b}}`.
pub fn compound_rate(a: f64, eps: f64, b: f64, tol: f64) -> Result<CapacityResult> {
    let lossless = kennedy_channel(&KennedyConfig::new(a, 1.0, b)?);
    let lossy = kennedy_channel(&KennedyConfig::new(a, eps, b)?);
    compound_capacity(&CompoundSet::new(vec![lossless, lossy])?, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub b: f64,
    pub cap_eta1: f64,
    pub cap_eps: f64,
    pub cap_compound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub a: f64,
    pub eps: f64,
    pub rows: Vec<SweepRow>,
    /// Index of the largest compound capacity (first on ties).
    pub argmax: usize,
}

impl SweepTable {
    pub fn best(&self) -> &SweepRow {
        &self.rows[self.argmax]
    }

    /// CSV with [`SWEEP_CSV_HEADER`]; floats carry 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                significant(r.b, 12),
                significant(r.cap_eta1, 12),
                significant(r.cap_eps, 12),
                significant(r.cap_compound, 12)
            );
        }
        out
    }
}

/// Rendering of `x` with `digits` significant digits, in scientific form below `1e-4`.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    if x.abs() < 1e-4 {
        return format!("{x:.*e}", digits.saturating_sub(1));
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit
    let carried = format!("{:.*}", decimals.saturating_sub(1), x);
    if s.trim_start_matches('-').replace('.', "").trim_start_matches('0').len() > digits && decimals > 0 {
        carried
    } else {
        s
    }
}

/// Single-channel and compound capacities for every displacement in `b_grid`.
pub fn displacement_sweep(a: f64, eps: f64, b_grid: &[f64], tol: f64) -> Result<SweepTable> {
    if b_grid.is_empty() {
        return invalid("displacement grid must be nonempty");
    }
    let mut rows = Vec::with_capacity(b_grid.len());
    for &b in b_grid {
        let lossless = kennedy_channel(&KennedyConfig::new(a, 1.0, b)?);
        let lossy = kennedy_channel(&KennedyConfig::new(a, eps, b)?);
        let cap_eta1 = compound_capacity(&CompoundSet::new(vec![lossless.clone()])?, tol)?.value;
        let cap_eps = compound_capacity(&CompoundSet::new(vec![lossy.clone()])?, tol)?.value;
        let cap_compound = compound_capacity(&CompoundSet::new(vec![lossless, lossy])?, tol)?.value;
        rows.push(SweepRow { b, cap_eta1, cap_eps, cap_compound });
    }
    let argmax = rows
        .iter()
        .enumerate()
        .fold(0, |best, (i, r)| if r.cap_compound > rows[best].cap_compound { i } else { best });
    Ok(SweepTable { a, eps, rows, argmax })
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo < hi) || n < 2 {
        return invalid(format!("need b_min < b_max and at least 2 steps, got [{lo}, {hi}] with {n}"));
    }
    Ok((0..n).map(|k| if k == n - 1 { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect())
}
