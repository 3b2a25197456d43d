//! Truncated Fock-space representation of coherent, thermal and displaced
//! thermal states.
//!
//! The Gaussian classical-quantum channels studied here map a coherent
//! amplitude `α` to the displaced thermal state
//!
//! ```text
//! N(α) = (1/σπ) ∫ exp(-|z - β|²/σ) |z⟩⟨z| d²z,     β = √s · e^{iθ} · α,
//! ```
//!
//! i.e. `D(β) τ_σ D(β)†` with `τ_σ` the thermal state of mean photon number
//! `σ`. States are stored as `N × N` matrices on the first `N` number states
//! and are never renormalized: the trace of a truncated state is the mass it
//! captures.

use std::f64::consts::{LN_2, PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg;

/// Tolerance for Hermiticity and for negative eigenvalues.
pub const STATE_TOLERANCE: f64 = 1e-10;

/// Minimum captured mass accepted from [`gaussian_channel_output`].
pub const MIN_CAPTURE: f64 = 0.999;

/// Eigenvalues below this contribute nothing to the entropy.
pub const EIGEN_CLAMP: f64 = 1e-15;

/// A coherent-state amplitude; `|α|²` is the mean photon number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherentAmplitude(Complex64);

impl CoherentAmplitude {
    pub fn new(alpha: Complex64) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return invalid(format!("coherent amplitude must be finite, got {alpha}"));
        }
        Ok(Self(alpha))
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::new(Complex64::new(x, 0.0))
    }

    pub fn polar(radius: f64, angle: f64) -> Result<Self> {
        Self::new(Complex64::from_polar(radius, angle))
    }

    pub fn vacuum() -> Self {
        Self(Complex64::new(0.0, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    /// Mean photon number `|α|²`.
    pub fn energy(&self) -> f64 {
        self.0.norm_sqr()
    }
}

/// Parameters of a Gaussian classical-quantum channel: thermal noise `sigma`,
/// transmissivity `attenuation` and phase rotation `phase`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianChannelParams {
    sigma: f64,
    attenuation: f64,
    phase: f64,
}

impl GaussianChannelParams {
    /// The phase is reduced into `[0, 2π)`.
    pub fn new(sigma: f64, attenuation: f64, phase: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return invalid(format!("sigma must be finite and >= 0, got {sigma}"));
        }
        if !(0.0..=1.0).contains(&attenuation) {
            return invalid(format!("attenuation must lie in [0, 1], got {attenuation}"));
        }
        if !phase.is_finite() {
            return invalid("phase must be finite");
        }
        let mut phase = phase.rem_euclid(TAU);
        if phase >= TAU {
            phase = 0.0;
        }
        Ok(Self { sigma, attenuation, phase })
    }

    /// Additive noise only (`s = 1`, `θ = 0`).
    pub fn noise(sigma: f64) -> Result<Self> {
        Self::new(sigma, 1.0, 0.0)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn attenuation(&self) -> f64 {
        self.attenuation
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// Displacement `β = √s · e^{iθ} · α` seen at the channel output.
    pub fn output_amplitude(&self, alpha: CoherentAmplitude) -> Complex64 {
        alpha.value() * Complex64::from_polar(self.attenuation.sqrt(), self.phase)
    }
}

/// A (possibly truncated) density matrix on the first `dim` number states.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState {
    matrix: DMatrix<Complex64>,
    captured_mass: f64,
}

impl TruncatedState {
    /// Validates Hermiticity, positivity and trace against [`STATE_TOLERANCE`].
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::ShapeMismatch(format!(
                "state matrix must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > STATE_TOLERANCE {
            return invalid(format!("matrix is not Hermitian (defect {defect:e})"));
        }
        let trace = matrix.trace().re;
        if trace > 1.0 + STATE_TOLERANCE {
            return invalid(format!("trace {trace} exceeds 1"));
        }
        let min_eig = linalg::hermitian_eigenvalues(&matrix)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -STATE_TOLERANCE {
            return invalid(format!("matrix has negative eigenvalue {min_eig:e}"));
        }
        Ok(Self { matrix, captured_mass: trace })
    }

    pub(crate) fn from_parts(matrix: DMatrix<Complex64>) -> Self {
        let captured_mass = matrix.trace().re;
        Self { matrix, captured_mass }
    }

    /// `|ψ⟩⟨ψ|` for an unnormalized vector `ψ`.
    pub fn pure(psi: &[Complex64]) -> Self {
        let n = psi.len();
        let matrix = DMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj());
        Self::from_parts(matrix)
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        if populations.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return invalid("populations must be finite and nonnegative");
        }
        let n = populations.len();
        let mut matrix = DMatrix::zeros(n, n);
        for (i, &p) in populations.iter().enumerate() {
            matrix[(i, i)] = Complex64::new(p, 0.0);
        }
        let state = Self::from_parts(matrix);
        if state.captured_mass > 1.0 + STATE_TOLERANCE {
            return invalid(format!("trace {} exceeds 1", state.captured_mass));
        }
        Ok(state)
    }

    /// Convex combination `Σ wᵢ ρᵢ` of states of equal dimension.
    pub fn mixture(weights: &[f64], states: &[&TruncatedState]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::ShapeMismatch(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        let dim = states[0].dim();
        let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
        for (&w, s) in weights.iter().zip(states) {
            if s.dim() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "state dimensions differ: {} vs {dim}",
                    s.dim()
                )));
            }
            if w != 0.0 {
                acc += &s.matrix * Complex64::new(w, 0.0);
            }
        }
        Ok(Self::from_parts(acc))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Trace of the truncated matrix, i.e. the mass held by the first `dim` levels.
    pub fn captured_mass(&self) -> f64 {
        self.captured_mass
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.matrix[(n, n)].re).collect()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    /// Trace of the projection onto the first `n` levels.
    pub fn projected_trace(&self, n: usize) -> f64 {
        (0..n.min(self.dim())).map(|k| self.matrix[(k, k)].re).sum()
    }

    /// Conjugation by the number-basis phase rotation `diag(e^{inθ})`.
    pub fn rotated(&self, theta: f64) -> Self {
        let n = self.dim();
        let phases: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(1.0, k as f64 * theta))
            .collect();
        let matrix = DMatrix::from_fn(n, n, |i, j| phases[i] * self.matrix[(i, j)] * phases[j].conj());
        Self { matrix, captured_mass: self.captured_mass }
    }

    /// Largest elementwise difference to another state of the same dimension.
    pub fn max_abs_diff(&self, other: &TruncatedState) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Number-basis coefficients `e^{-|α|²/2} αⁿ/√(n!)` for `n < dim`, evaluated in
/// log-space. The vector is not renormalized.
pub fn coherent_vector(alpha: CoherentAmplitude, dim: usize) -> Result<Vec<Complex64>> {
    if dim == 0 {
        return invalid("dimension must be at least 1");
    }
    let half_ln_fact: Vec<f64> = linalg::ln_factorials(dim).into_iter().map(|x| 0.5 * x).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    fill_coherent(alpha.value(), &half_ln_fact, &mut out);
    Ok(out)
}

pub(crate) fn fill_coherent(alpha: Complex64, half_ln_fact: &[f64], out: &mut [Complex64]) {
    let r2 = alpha.norm_sqr();
    if r2 == 0.0 {
        out.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        out[0] = Complex64::new(1.0, 0.0);
        return;
    }
    let ln_r = 0.5 * r2.ln();
    let arg = alpha.arg();
    for (n, x) in out.iter_mut().enumerate() {
        let ln_mag = -0.5 * r2 + n as f64 * ln_r - half_ln_fact[n];
        *x = Complex64::from_polar(ln_mag.exp(), n as f64 * arg);
    }
}

/// Truncated thermal state with populations `σⁿ/(σ+1)^{n+1}`.
pub fn thermal_state(sigma: f64, dim: usize) -> Result<TruncatedState> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return invalid(format!("sigma must be finite and >= 0, got {sigma}"));
    }
    if dim == 0 {
        return invalid("dimension must be at least 1");
    }
    TruncatedState::diagonal(&thermal_populations(sigma, dim))
}

fn thermal_populations(sigma: f64, len: usize) -> Vec<f64> {
    if sigma == 0.0 {
        let mut p = vec![0.0; len];
        p[0] = 1.0;
        return p;
    }
    let ratio = sigma / (sigma + 1.0);
    let mut p = Vec::with_capacity(len);
    let mut cur = 1.0 / (sigma + 1.0);
    for _ in 0..len {
        p.push(cur);
        cur *= ratio;
    }
    p
}

/// Number of levels after which a thermal state's tail mass drops below `1e-16`.
fn thermal_levels(sigma: f64) -> usize {
    if sigma == 0.0 {
        return 1;
    }
    let ratio = sigma / (sigma + 1.0);
    ((1e-16_f64).ln() / ratio.ln()).ceil() as usize
}

/// Extra levels used when building a displacement before cropping.
fn displacement_padding(beta_abs: f64, dim: usize) -> usize {
    let pad = (4.0 * beta_abs * (dim as f64).sqrt()).ceil() as usize;
    pad.max(16)
}

/// Displacement operator `D(β) = exp(β a† - β̄ a)` on the first `levels` number states.
///
/// The generator is `-i K` with `K = i(β a† - β̄ a)` Hermitian tridiagonal; the
/// diagonal unitary `U = diag((iβ/|β|)ⁿ)` maps `K` to the real tridiagonal `T`
/// with off-diagonal `|β|√(n+1)`, so `D = U exp(-iT) U†`.
pub(crate) fn displacement_matrix(beta: Complex64, levels: usize) -> DMatrix<Complex64> {
    let r = beta.norm();
    if r == 0.0 {
        return DMatrix::identity(levels, levels);
    }
    let offdiag: Vec<f64> = (0..levels - 1).map(|n| r * ((n + 1) as f64).sqrt()).collect();
    let core = linalg::expm_neg_i_tridiagonal(&offdiag);
    let unit = Complex64::i() * beta / r;
    let mut u = Vec::with_capacity(levels);
    let mut cur = Complex64::new(1.0, 0.0);
    for _ in 0..levels {
        u.push(cur);
        cur *= unit;
    }
    DMatrix::from_fn(levels, levels, |i, j| u[i] * core[(i, j)] * u[j].conj())
}

/// Output `D(β) τ_σ D(β)†` of the Gaussian channel on input `α`, truncated to `dim` levels.
///
/// For `σ = 0` this is the pure coherent state `|β⟩⟨β|`. Otherwise the
/// displacement is built on `dim + max(16, ⌈4|β|√dim⌉)` levels (more if the
/// thermal tail needs it) and cropped.
pub fn gaussian_channel_output(
    alpha: CoherentAmplitude,
    params: &GaussianChannelParams,
    dim: usize,
) -> Result<TruncatedState> {
    let state = gaussian_channel_output_unchecked(alpha, params, dim)?;
    if state.captured_mass < MIN_CAPTURE {
        return Err(Error::Accuracy { captured_mass: state.captured_mass, required: MIN_CAPTURE });
    }
    Ok(state)
}

/// Same as [`gaussian_channel_output`] without the captured-mass requirement.
pub fn gaussian_channel_output_unchecked(
    alpha: CoherentAmplitude,
    params: &GaussianChannelParams,
    dim: usize,
) -> Result<TruncatedState> {
    if dim == 0 {
        return invalid("dimension must be at least 1");
    }
    let beta = params.output_amplitude(alpha);
    if params.sigma() == 0.0 {
        let psi = coherent_vector(CoherentAmplitude::new(beta)?, dim)?;
        return Ok(TruncatedState::pure(&psi));
    }
    let levels = (dim + displacement_padding(beta.norm(), dim)).max(thermal_levels(params.sigma()));
    let d = displacement_matrix(beta, levels);
    let tau = thermal_populations(params.sigma(), levels);
    // rows < dim of D·diag(√τ)
    let mut half = d.rows(0, dim).into_owned();
    for (k, t) in tau.iter().enumerate() {
        let s = Complex64::new(t.sqrt(), 0.0);
        for x in half.column_mut(k).iter_mut() {
            *x *= s;
        }
    }
    let mut rho = &half * half.adjoint();
    symmetrize(&mut rho);
    Ok(TruncatedState::from_parts(rho))
}

fn symmetrize(m: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    for j in 0..n {
        m[(j, j)].im = 0.0;
        for i in 0..j {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// Polar quadrature grid centered at the output displacement `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarGrid {
    /// Gauss–Legendre nodes in the radial direction.
    pub radial_nodes: usize,
    /// Equally spaced (trapezoidal) nodes in angle.
    pub angular_nodes: usize,
    /// Radial extent in units of `√σ`.
    pub extent: f64,
}

impl Default for PolarGrid {
    fn default() -> Self {
        Self { radial_nodes: 200, angular_nodes: 200, extent: 6.0 }
    }
}

/// Channel output obtained by integrating the P-function
/// `(1/σπ) exp(-|z-β|²/σ)` against `|z⟩⟨z|` on a polar grid.
///
/// Independent of the displacement construction in [`gaussian_channel_output`].
pub fn gaussian_channel_output_quadrature(
    alpha: CoherentAmplitude,
    params: &GaussianChannelParams,
    dim: usize,
    grid: &PolarGrid,
) -> Result<TruncatedState> {
    let sigma = params.sigma();
    if sigma == 0.0 {
        return Err(Error::Unsupported(
            "P-function quadrature needs sigma > 0; use the coherent branch".into(),
        ));
    }
    if dim == 0 || grid.radial_nodes == 0 || grid.angular_nodes == 0 {
        return invalid("dimension and grid sizes must be positive");
    }
    if !(grid.extent >= 6.0) {
        return invalid(format!("grid extent must be at least 6 sqrt(sigma), got {}", grid.extent));
    }
    let beta = params.output_amplitude(alpha);
    let radius = grid.extent * sigma.sqrt();
    let (xs, ws) = linalg::gauss_legendre(grid.radial_nodes);
    let half_ln_fact: Vec<f64> = linalg::ln_factorials(dim).into_iter().map(|x| 0.5 * x).collect();
    let dphi = TAU / grid.angular_nodes as f64;
    let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    for (x, w) in xs.iter().zip(&ws) {
        let r = 0.5 * radius * (x + 1.0);
        let radial_weight = 0.5 * radius * w * r * (-r * r / sigma).exp() / (PI * sigma) * dphi;
        for k in 0..grid.angular_nodes {
            let z = beta + Complex64::from_polar(r, k as f64 * dphi);
            fill_coherent(z, &half_ln_fact, &mut v);
            for j in 0..dim {
                let cj = v[j].conj() * radial_weight;
                for i in 0..=j {
                    acc[(i, j)] += v[i] * cj;
                }
            }
        }
    }
    for j in 0..dim {
        acc[(j, j)].im = 0.0;
        for i in 0..j {
            acc[(j, i)] = acc[(i, j)].conj();
        }
    }
    Ok(TruncatedState::from_parts(acc))
}

/// Von Neumann entropy `-Σ λ log₂ λ` in bits; eigenvalues below [`EIGEN_CLAMP`] contribute 0.
pub fn von_neumann_entropy(rho: &TruncatedState) -> Result<f64> {
    let defect = linalg::hermiticity_defect(rho.matrix());
    if defect > STATE_TOLERANCE {
        return invalid(format!("matrix is not Hermitian (defect {defect:e})"));
    }
    Ok(entropy_of_spectrum(&rho.eigenvalues()))
}

pub(crate) fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > EIGEN_CLAMP)
        .map(|&l| -l * l.ln())
        .sum::<f64>()
        / LN_2
}

/// `Σ n ρ_nn`, the expectation of the number operator.
pub fn mean_photon_number(rho: &TruncatedState) -> f64 {
    rho.populations().iter().enumerate().map(|(n, p)| n as f64 * p).sum()
}
