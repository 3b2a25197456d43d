use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::solver::{feasible_interior, maximin_saddle, CostConstraint, MinimaxObjective, SaddleOptions, StateEval};
use super::{CapacityResult, Prior, StopReason};
use crate::error::{invalid, Error, Result};
use crate::fock::{
    entropy_of_spectrum, gaussian_channel_output, von_neumann_entropy, CoherentAmplitude,
    GaussianChannelParams, TruncatedState, EIGEN_CLAMP,
};
use crate::linalg;

/// Slack on energy constraints.
const ENERGY_SLACK: f64 = 1e-9;

/// `χ = H(Σ pᵢ ρᵢ) - Σ pᵢ H(ρᵢ)` in bits.
pub fn holevo_quantity(prior: &Prior, states: &[TruncatedState]) -> Result<f64> {
    if prior.len() != states.len() {
        return Err(Error::ShapeMismatch(format!(
            "prior has {} entries for {} states",
            prior.len(),
            states.len()
        )));
    }
    let refs: Vec<&TruncatedState> = states.iter().collect();
    let avg = TruncatedState::mixture(prior.as_slice(), &refs)?;
    let mut chi = von_neumann_entropy(&avg)?;
    for (&p, s) in prior.as_slice().iter().zip(states) {
        if p > 0.0 {
            chi -= p * von_neumann_entropy(s)?;
        }
    }
    Ok(chi.max(0.0))
}

/// How the energy budget constrains a constellation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EnergyMode {
    /// Every point satisfies `|α|² <= E`.
    #[default]
    PerPoint,
    /// Only the prior-weighted mean energy is bounded by `E`.
    Mean,
}

/// Coherent-state input alphabet with a prior and an energy budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constellation {
    points: Vec<CoherentAmplitude>,
    prior: Prior,
    energy_budget: f64,
    mode: EnergyMode,
}

impl Constellation {
    pub fn new(points: Vec<CoherentAmplitude>, prior: Prior, energy_budget: f64, mode: EnergyMode) -> Result<Self> {
        if points.is_empty() {
            return invalid("constellation needs at least one point");
        }
        if prior.len() != points.len() {
            return Err(Error::ShapeMismatch(format!(
                "prior has {} entries for {} points",
                prior.len(),
                points.len()
            )));
        }
        if !(energy_budget >= 0.0 && energy_budget.is_finite()) {
            return invalid(format!("energy budget must be >= 0, got {energy_budget}"));
        }
        let mean: f64 = prior.as_slice().iter().zip(&points).map(|(p, a)| p * a.energy()).sum();
        if mean > energy_budget + ENERGY_SLACK {
            return invalid(format!("mean energy {mean} exceeds budget {energy_budget}"));
        }
        if mode == EnergyMode::PerPoint {
            if let Some((i, a)) = points.iter().enumerate().find(|(_, a)| a.energy() > energy_budget + ENERGY_SLACK) {
                return invalid(format!("point {i} has energy {} above budget {energy_budget}", a.energy()));
            }
        }
        Ok(Self { points, prior, energy_budget, mode })
    }

    /// Vacuum plus `rings` concentric rings of `phases` equally spaced points, uniform prior.
    ///
    /// Per-point mode spaces the rings evenly in `|α|²` up to `E`. Mean mode
    /// places them at midpoint quantiles of the exponential law with mean `E`.
    pub fn rings(energy: f64, rings: usize, phases: usize, mode: EnergyMode) -> Result<Self> {
        if rings == 0 || phases == 0 {
            return invalid("rings and phases must be positive");
        }
        if !(energy >= 0.0 && energy.is_finite()) {
            return invalid(format!("energy budget must be >= 0, got {energy}"));
        }
        let mut points = vec![CoherentAmplitude::vacuum()];
        for j in 1..=rings {
            let e = match mode {
                EnergyMode::PerPoint => energy * j as f64 / rings as f64,
                EnergyMode::Mean => -energy * (1.0 - (j as f64 - 0.5) / rings as f64).ln(),
            };
            for k in 0..phases {
                points.push(CoherentAmplitude::polar(e.sqrt(), TAU * k as f64 / phases as f64)?);
            }
        }
        let n = points.len();
        let mut prior = vec![1.0 / n as f64; n];
        let energies: Vec<f64> = points.iter().map(|a| a.energy()).collect();
        let mean: f64 = prior.iter().zip(&energies).map(|(p, e)| p * e).sum();
        if mean > energy {
            prior = super::solver::project_capped(&prior, CostConstraint { costs: &energies, budget: energy });
        }
        Self::new(points, Prior::normalized(prior), energy, mode)
    }

    pub fn points(&self) -> &[CoherentAmplitude] {
        &self.points
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    pub fn energy_budget(&self) -> f64 {
        self.energy_budget
    }

    pub fn mode(&self) -> EnergyMode {
        self.mode
    }

    pub fn energies(&self) -> Vec<f64> {
        self.points.iter().map(|a| a.energy()).collect()
    }

    pub fn mean_energy(&self) -> f64 {
        self.prior.as_slice().iter().zip(&self.points).map(|(p, a)| p * a.energy()).sum()
    }
}

/// Solver settings for [`constellation_lower_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstellationOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for ConstellationOptions {
    fn default() -> Self {
        Self { tol: 1e-4, max_iterations: 20_000 }
    }
}

struct CqObjective {
    /// `outputs[s][i]` is the output of state `s` on point `i`.
    outputs: Vec<Vec<DMatrix<Complex64>>>,
    entropies: Vec<Vec<f64>>,
}

impl MinimaxObjective for CqObjective {
    fn evaluate(&self, p: &[f64]) -> Vec<StateEval> {
        self.outputs
            .iter()
            .zip(&self.entropies)
            .map(|(rhos, hs)| {
                let dim = rhos[0].nrows();
                let mut avg = DMatrix::<Complex64>::zeros(dim, dim);
                for (&pi, rho) in p.iter().zip(rhos) {
                    if pi > 0.0 {
                        avg += rho * Complex64::new(pi, 0.0);
                    }
                }
                let (lambda, v) = linalg::hermitian_eigen(&avg);
                let mean_h: f64 = p.iter().zip(hs).map(|(pi, h)| pi * h).sum();
                let value = (entropy_of_spectrum(&lambda) - mean_h).max(0.0);
                // reference state: the average with its spectrum floored, then normalized
                let floored: Vec<f64> = lambda.iter().map(|l| l.max(EIGEN_CLAMP)).collect();
                let log_trace = floored.iter().sum::<f64>().log2();
                let mut scaled = v.clone();
                for (k, l) in floored.iter().enumerate() {
                    let w = Complex64::new(l.log2(), 0.0);
                    scaled.column_mut(k).iter_mut().for_each(|x| *x *= w);
                }
                let log_sigma = scaled * v.adjoint();
                let divergences = rhos
                    .iter()
                    .zip(hs)
                    .map(|(rho, h)| {
                        let cross: f64 = rho.iter().zip(log_sigma.iter()).map(|(a, b)| (a * b.conj()).re).sum();
                        -cross - h + log_trace
                    })
                    .collect();
                StateEval { value, divergences }
            })
            .collect()
    }
}

/// Optimizes the prior of a fixed constellation for `min_s χ(p; N_s)`.
///
/// The result's `value` is attained by its `optimizer` on the truncated
/// outputs; `upper_bound` certifies optimality over priors on this
/// constellation, up to truncation.
pub fn constellation_lower_bound(
    params_set: &[GaussianChannelParams],
    con: &Constellation,
    dim: usize,
    opts: ConstellationOptions,
) -> Result<CapacityResult> {
    if params_set.is_empty() {
        return invalid("need at least one channel state");
    }
    if dim == 0 {
        return invalid("dimension must be at least 1");
    }
    if !(opts.tol > 0.0) {
        return invalid(format!("tolerance must be positive, got {}", opts.tol));
    }
    let mut outputs = Vec::with_capacity(params_set.len());
    let mut entropies = Vec::with_capacity(params_set.len());
    for params in params_set {
        let mut rhos = Vec::with_capacity(con.points.len());
        let mut hs = Vec::with_capacity(con.points.len());
        for &alpha in &con.points {
            let rho = gaussian_channel_output(alpha, params, dim)?;
            hs.push(von_neumann_entropy(&rho)?);
            rhos.push(rho.matrix().clone());
        }
        outputs.push(rhos);
        entropies.push(hs);
    }
    let obj = CqObjective { outputs, entropies };
    let n = con.points.len();
    if n == 1 {
        let e = obj.evaluate(&[1.0]);
        let (worst, value) = e.iter().enumerate().fold((0, f64::INFINITY), |acc, (s, x)| {
            if x.value < acc.1 { (s, x.value) } else { acc }
        });
        return Ok(CapacityResult {
            value,
            optimizer: Prior::normalized(vec![1.0]),
            worst_index: worst,
            iterations: 0,
            upper_bound: value,
            gap: 0.0,
            stop: StopReason::Converged,
        });
    }
    let energies = con.energies();
    let cons = match con.mode {
        EnergyMode::PerPoint => None,
        EnergyMode::Mean => Some(CostConstraint { costs: &energies, budget: con.energy_budget }),
    };
    let start = feasible_interior(con.prior.as_slice(), cons);
    let sol = maximin_saddle(&obj, &start, cons, SaddleOptions { tol: opts.tol, max_iterations: opts.max_iterations });
    Ok(CapacityResult {
        value: sol.value,
        optimizer: Prior::normalized(sol.p),
        worst_index: sol.worst,
        iterations: sol.iterations,
        upper_bound: sol.upper.max(sol.value),
        gap: (sol.upper - sol.value).max(0.0),
        stop: sol.stop,
    })
}
