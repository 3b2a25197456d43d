//! Capacity functionals.
//!
//! Classical side: mutual information, Blahut–Arimoto capacity of a single
//! discrete memoryless channel, and the compound max-min solver. Quantum side:
//! the Holevo quantity, the closed-form capacities of the Gaussian compound
//! channels, and the constellation lower bound that approaches them.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{invalid, Error, Result};

mod blahut;
mod compound;
mod constellation;
mod solver;

pub use blahut::dmc_capacity;
pub use compound::compound_capacity;
pub use constellation::{
    constellation_lower_bound, holevo_quantity, Constellation, ConstellationOptions, EnergyMode,
};

/// Row-sum tolerance for transition matrices and priors.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-12;

/// Default tolerance for the classical solvers.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Iteration cap shared by the iterative solvers.
pub const MAX_ITERATIONS: usize = 100_000;

/// `g(x) = (x+1) log₂(x+1) - x log₂ x`, the entropy of a thermal state of mean photon number `x`.
pub fn g(x: f64) -> Result<f64> {
    if !(x >= 0.0 && x.is_finite()) {
        return invalid(format!("g needs x >= 0, got {x}"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok((x + 1.0) * (x + 1.0).log2() - x * x.log2())
}

/// Binary entropy in bits, `0` at the endpoints.
pub fn binary_entropy(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return invalid(format!("binary entropy needs q in [0, 1], got {q}"));
    }
    Ok(plogp(q) + plogp(1.0 - q))
}

/// `-x log₂ x` with `0 log 0 = 0`.
fn plogp(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Shannon entropy of a probability vector in bits.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().map(|&x| plogp(x)).sum()
}

/// `D(row ‖ q)` in bits; `+∞` if `row` puts mass where `q` has none.
pub(crate) fn kl_bits(row: &[f64], q: &[f64]) -> f64 {
    let mut d = 0.0;
    for (&w, &qq) in row.iter().zip(q) {
        if w > 0.0 {
            if qq <= 0.0 {
                return f64::INFINITY;
            }
            d += w * (w / qq).ln();
        }
    }
    (d / LN_2).max(0.0)
}

/// Transition matrix `W(y|x)` of a discrete memoryless channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dmc {
    inputs: usize,
    outputs: usize,
    entries: Vec<f64>,
}

impl Dmc {
    /// Each row must be a probability vector (entries in `[0,1]`, sum within `1e-12`).
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let inputs = rows.len();
        if inputs == 0 {
            return invalid("channel needs at least one input");
        }
        let outputs = rows[0].len();
        if outputs == 0 {
            return invalid("channel needs at least one output");
        }
        let mut entries = Vec::with_capacity(inputs * outputs);
        for (x, row) in rows.iter().enumerate() {
            if row.len() != outputs {
                return Err(Error::ShapeMismatch(format!(
                    "row {x} has {} entries, expected {outputs}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return invalid(format!("row {x} has entry {v} outside [0, 1]"));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOLERANCE {
                return invalid(format!("row {x} sums to {sum}, not 1"));
            }
            entries.extend_from_slice(row);
        }
        Ok(Self { inputs, outputs, entries })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect())
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.entries[x * self.outputs..(x + 1) * self.outputs]
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.entries[x * self.outputs + y]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.inputs).map(|x| self.row(x).to_vec()).collect()
    }

    /// Output distribution `Σₓ p(x) W(·|x)`.
    pub(crate) fn output_distribution(&self, p: &[f64]) -> Vec<f64> {
        let mut q = vec![0.0; self.outputs];
        for (x, &px) in p.iter().enumerate() {
            if px > 0.0 {
                for (qy, w) in q.iter_mut().zip(self.row(x)) {
                    *qy += px * w;
                }
            }
        }
        q
    }

    /// `D(W(·|x) ‖ pW)` for every input `x`.
    pub(crate) fn divergences(&self, p: &[f64]) -> Vec<f64> {
        let q = self.output_distribution(p);
        (0..self.inputs).map(|x| kl_bits(self.row(x), &q)).collect()
    }
}

/// Input distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Prior(Vec<f64>);

impl Prior {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return invalid("prior must be nonempty");
        }
        if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return invalid("prior entries must be finite and nonnegative");
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > STOCHASTIC_TOLERANCE {
            return invalid(format!("prior sums to {sum}, not 1"));
        }
        Ok(Self(p))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("prior must be nonempty");
        }
        Ok(Self(vec![1.0 / n as f64; n]))
    }

    /// Clips negatives and renormalizes; for solver output.
    pub(crate) fn normalized(mut p: Vec<f64>) -> Self {
        p.iter_mut().for_each(|x| *x = x.max(0.0));
        let sum: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= sum);
        Self(p)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A finite compound channel: DMCs over common input and output alphabets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompoundSet {
    channels: Vec<Dmc>,
}

impl CompoundSet {
    pub fn new(channels: Vec<Dmc>) -> Result<Self> {
        let Some(first) = channels.first() else {
            return invalid("compound set must contain at least one channel");
        };
        let shape = (first.inputs(), first.outputs());
        for (s, w) in channels.iter().enumerate().skip(1) {
            if (w.inputs(), w.outputs()) != shape {
                return Err(Error::ShapeMismatch(format!(
                    "channel {s} is {}x{}, channel 0 is {}x{}",
                    w.inputs(),
                    w.outputs(),
                    shape.0,
                    shape.1
                )));
            }
        }
        Ok(Self { channels })
    }

    pub fn channels(&self) -> &[Dmc] {
        &self.channels
    }

    pub fn inputs(&self) -> usize {
        self.channels[0].inputs()
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }
}

/// How an iterative solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The certified gap fell below the tolerance.
    Converged,
    IterationCap,
    /// No ascent direction left, but the certificate did not close.
    Stalled,
}

/// Capacity value with its optimizer and a certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityResult {
    /// Achieved max-min value in bits (a lower bound on the optimum).
    pub value: f64,
    pub optimizer: Prior,
    /// Channel state attaining the minimum at the optimizer.
    pub worst_index: usize,
    pub iterations: usize,
    /// Certified upper bound on the optimum.
    pub upper_bound: f64,
    /// `upper_bound - value`.
    pub gap: f64,
    pub stop: StopReason,
}

/// `I(p; W) = H(pW) - Σₓ p(x) H(W(·|x))` in bits.
pub fn mutual_information(p: &Prior, w: &Dmc) -> Result<f64> {
    if p.len() != w.inputs() {
        return Err(Error::ShapeMismatch(format!(
            "prior has {} entries, channel has {} inputs",
            p.len(),
            w.inputs()
        )));
    }
    let q = w.output_distribution(p.as_slice());
    let cond: f64 = p
        .as_slice()
        .iter()
        .enumerate()
        .map(|(x, &px)| if px > 0.0 { px * shannon_entropy(w.row(x)) } else { 0.0 })
        .sum();
    Ok((shannon_entropy(&q) - cond).max(0.0))
}

/// Unknown thermal noise `σ ∈ [A, B]` under energy `E`: `g(B + E) - g(B)`.
pub fn gaussian_compound_capacity_noise(a: f64, b: f64, energy: f64) -> Result<f64> {
    if !(0.0 <= a && a <= b && b.is_finite()) {
        return invalid(format!("need 0 <= A <= B, got A = {a}, B = {b}"));
    }
    check_energy(energy)?;
    Ok(g(b + energy)? - g(b)?)
}

/// Unknown phase at noise `σ`: `g(σ + E) - g(σ)`.
pub fn gaussian_compound_capacity_phase(sigma: f64, energy: f64) -> Result<f64> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return invalid(format!("sigma must be >= 0, got {sigma}"));
    }
    check_energy(energy)?;
    Ok(g(sigma + energy)? - g(sigma)?)
}

/// Unknown transmissivity `s ∈ [A, B] ⊂ [0, 1]` at noise `σ`: `g(σ + A·E) - g(σ)`.
pub fn gaussian_compound_capacity_attenuation(a: f64, b: f64, sigma: f64, energy: f64) -> Result<f64> {
    if !(0.0 <= a && a <= b && b <= 1.0) {
        return invalid(format!("need 0 <= A <= B <= 1, got A = {a}, B = {b}"));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return invalid(format!("sigma must be >= 0, got {sigma}"));
    }
    check_energy(energy)?;
    Ok(g(sigma + a * energy)? - g(sigma)?)
}

fn check_energy(energy: f64) -> Result<()> {
    if !(energy >= 0.0 && energy.is_finite()) {
        return invalid(format!("energy must be >= 0, got {energy}"));
    }
    Ok(())
}
