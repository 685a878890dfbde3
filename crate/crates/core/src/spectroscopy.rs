//! Driven-dissipative readout of the chain.
//!
//! Every resonator decays at rate κ and the leftmost one doubles as the
//! measurement port. Coherent amplitudes obey
//!
//! ```text
//! dā/dt = −i (Δ0 + T − iκ/2) ā − iΩ
//! ```
//!
//! whose fixed point gives the steady state, and the port reflection is
//! r = 1 + iκ [(Δ0 + T − iκ/2)⁻¹]₁₁.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{open_chain_hamiltonian, ModelParams, WeylPoint};
use crate::numerics::{solve_complex, unwrap_winding, ComplexMatrix, TridiagonalSym};
use crate::openchain::{arc_interval_oracle, symmetric_interval, ArcInterval, ZERO_ENERGY_TOL};

/// Detuning step of arc-detection scans (units of J).
pub const DETUNING_STEP: f64 = 0.01;
/// A spectrum maximum closer than this to Δ0 = 0 counts as a zero-energy peak.
pub const CENTRAL_PEAK_WINDOW: f64 = 0.02;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Drive amplitudes Ω on every resonator.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveVector {
    pub amplitudes: Vec<Complex64>,
}

impl DriveVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("drive amplitudes"));
        }
        Ok(Self { amplitudes })
    }

    /// Drive of amplitude `omega` on the leftmost resonator only.
    pub fn left_edge(n: usize, omega: Complex64) -> Self {
        let mut amplitudes = vec![ZERO; n];
        if n > 0 {
            amplitudes[0] = omega;
        }
        Self { amplitudes }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            amplitudes: vec![ZERO; n],
        }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|a| a * s).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub amplitudes: Vec<Complex64>,
    /// ‖A·ā + Ω‖∞ / (‖A‖∞‖ā‖∞ + ‖Ω‖∞).
    pub residual: f64,
}

/// Complex reflection sampled along a swept parameter (θ or Δ0).
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionTrace {
    pub parameter_samples: Vec<f64>,
    pub r_values: Vec<Complex64>,
}

impl ReflectionTrace {
    pub fn new(parameter_samples: Vec<f64>, r_values: Vec<Complex64>) -> Result<Self> {
        if parameter_samples.len() != r_values.len() {
            return Err(Error::InvalidInput("trace samples and values differ in length".into()));
        }
        if parameter_samples.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("trace samples must be strictly increasing".into()));
        }
        Ok(Self {
            parameter_samples,
            r_values,
        })
    }

    pub fn len(&self) -> usize {
        self.r_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_values.is_empty()
    }

    /// R = |r|².
    pub fn reflectance(&self) -> Vec<f64> {
        self.r_values.iter().map(|r| r.norm_sqr()).collect()
    }

    /// |r − 1|², the intensity re-emitted by the port resonator
    /// (κ²|ā₁|² for unit drive).
    pub fn emission(&self) -> Vec<f64> {
        self.r_values.iter().map(|r| (r - 1.0).norm_sqr()).collect()
    }

    pub fn phases(&self) -> Vec<f64> {
        self.r_values.iter().map(|r| r.arg()).collect()
    }
}

fn ensure_drive_len(drive: &DriveVector, p: &ModelParams) -> Result<()> {
    if drive.amplitudes.len() != p.n {
        return Err(Error::InvalidInput(format!(
            "drive has {} amplitudes for a chain of {} resonators",
            drive.amplitudes.len(),
            p.n
        )));
    }
    Ok(())
}

/// Δ0 + T − iκ/2 as a dense matrix, together with T.
fn response_matrix(theta1: f64, theta2: f64, p: &ModelParams) -> Result<(TridiagonalSym, ComplexMatrix)> {
    let t = open_chain_hamiltonian(theta1, theta2, p)?;
    let a = ComplexMatrix::from_tridiagonal(&t, Complex64::new(p.delta0, -p.kappa / 2.0));
    Ok((t, a))
}

fn inf_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn steady_state(theta1: f64, theta2: f64, drive: &DriveVector, p: &ModelParams) -> Result<SteadyState> {
    p.validate()?;
    ensure_drive_len(drive, p)?;
    let (_, a) = response_matrix(theta1, theta2, p)?;
    let x = solve_complex(&a, &drive.amplitudes)?;
    let amplitudes: Vec<Complex64> = x.into_iter().map(|z| -z).collect();
    let ax = a.mul_vec(&amplitudes);
    let res: Vec<Complex64> = ax.iter().zip(&drive.amplitudes).map(|(l, r)| l + r).collect();
    let scale = a.norm_inf() * inf_norm(&amplitudes) + inf_norm(&drive.amplitudes);
    let residual = if scale > 0.0 { inf_norm(&res) / scale } else { 0.0 };
    Ok(SteadyState { amplitudes, residual })
}

/// Largest RK4 step accepted by [`transient_oracle`].
pub fn max_stable_step(p: &ModelParams) -> f64 {
    0.05 / (p.delta0.abs() + 4.0 * p.j + p.je).max(p.kappa)
}

/// Integrates the amplitude equations from rest with classical RK4.
pub fn transient_oracle(
    theta1: f64,
    theta2: f64,
    drive: &DriveVector,
    p: &ModelParams,
    t_end: f64,
    dt: f64,
) -> Result<Vec<Complex64>> {
    transient_from(&vec![ZERO; p.n], theta1, theta2, drive, p, t_end, dt)
}

/// RK4 integration of the amplitude equations from `initial`.
///
/// The step actually used is `t_end / ceil(t_end / dt)`, so the endpoint is
/// hit exactly.
pub fn transient_from(
    initial: &[Complex64],
    theta1: f64,
    theta2: f64,
    drive: &DriveVector,
    p: &ModelParams,
    t_end: f64,
    dt: f64,
) -> Result<Vec<Complex64>> {
    p.validate()?;
    ensure_drive_len(drive, p)?;
    if initial.len() != p.n {
        return Err(Error::InvalidInput(
            "initial amplitudes must match the chain length".into(),
        ));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "t_end must be finite and non-negative, got {t_end}"
        )));
    }
    let limit = max_stable_step(p);
    if !(dt > 0.0 && dt <= limit * (1.0 + 1e-12)) {
        return Err(Error::InvalidInput(format!(
            "dt = {dt} outside (0, {limit}] required for RK4 stability"
        )));
    }
    let t = open_chain_hamiltonian(theta1, theta2, p)?;
    let shift = Complex64::new(p.delta0, -p.kappa / 2.0);
    let minus_i = Complex64::new(0.0, -1.0);
    let rhs = |a: &[Complex64]| -> Vec<Complex64> {
        t.mul_complex(a)
            .into_iter()
            .zip(a)
            .zip(&drive.amplitudes)
            .map(|((ta, ai), om)| minus_i * (ta + shift * ai + om))
            .collect()
    };
    let axpy = |a: &[Complex64], k: &[Complex64], h: f64| -> Vec<Complex64> {
        a.iter().zip(k).map(|(x, y)| x + y * h).collect()
    };

    let steps = (t_end / dt).ceil() as usize;
    let mut state = initial.to_vec();
    if steps == 0 {
        return Ok(state);
    }
    let h = t_end / steps as f64;
    for _ in 0..steps {
        let k1 = rhs(&state);
        let k2 = rhs(&axpy(&state, &k1, h / 2.0));
        let k3 = rhs(&axpy(&state, &k2, h / 2.0));
        let k4 = rhs(&axpy(&state, &k3, h));
        for i in 0..state.len() {
            state[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
    }
    Ok(state)
}

/// `[(T + z)⁻¹]₁₁` by the continued fraction from the far end of the chain.
///
/// With Im z < 0 every partial denominator has imaginary part at most Im z,
/// so the recursion never divides by anything smaller than |Im z|.
fn corner_resolvent(t: &TridiagonalSym, z: Complex64) -> Complex64 {
    let (d, e) = (t.diag(), t.offdiag());
    let n = d.len();
    let mut g = (z + d[n - 1]).inv();
    for i in (0..n - 1).rev() {
        g = (z + d[i] - e[i] * e[i] * g).inv();
    }
    g
}

/// Reflection coefficient of the leftmost resonator.
pub fn reflection(theta1: f64, theta2: f64, p: &ModelParams) -> Result<Complex64> {
    p.validate()?;
    let g11 = if p.kappa > 0.0 {
        let t = open_chain_hamiltonian(theta1, theta2, p)?;
        corner_resolvent(&t, Complex64::new(p.delta0, -p.kappa / 2.0))
    } else {
        // Undamped: a dense solve reports exact resonances as singular.
        let (_, a) = response_matrix(theta1, theta2, p)?;
        let mut e1 = vec![ZERO; p.n];
        e1[0] = Complex64::new(1.0, 0.0);
        solve_complex(&a, &e1)?[0]
    };
    Ok(Complex64::new(1.0, 0.0) + Complex64::new(0.0, p.kappa) * g11)
}

fn require_dissipation(p: &ModelParams) -> Result<()> {
    if p.kappa <= 0.0 {
        return Err(Error::InvalidInput("this measurement needs kappa > 0".into()));
    }
    Ok(())
}

/// r(Δ0) over `delta0_grid` at fixed (θ1, θ2).
pub fn reflection_spectrum(theta1: f64, theta2: f64, delta0_grid: &[f64], p: &ModelParams) -> Result<ReflectionTrace> {
    p.validate()?;
    require_dissipation(p)?;
    let r = delta0_grid
        .iter()
        .map(|&d| reflection(theta1, theta2, &p.with_delta0(d)))
        .collect::<Result<Vec<_>>>()?;
    ReflectionTrace::new(delta0_grid.to_vec(), r)
}

/// Circle θ1 = θ1w + θr cos θ, θ2 = θ2w + θr sin θ traced by the readout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingLoop {
    pub theta_r: f64,
    pub samples: usize,
    /// Loop parameter of the first sample.
    pub start: f64,
}

impl Default for WindingLoop {
    fn default() -> Self {
        Self {
            theta_r: 0.25 * PI,
            samples: 128,
            start: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindingMeasurement {
    pub winding: i64,
    pub raw: f64,
    /// r along the loop, parameterized by θ.
    pub trace: ReflectionTrace,
}

/// Winding of arg r as θ runs once around the circle about a Weyl projection.
///
/// θ increases counter-clockwise in the (θ1, θ2) plane and arg r is taken in
/// (−π, π]; a counter-clockwise phase winding is positive.
pub fn winding_measurement(w: &WeylPoint, lp: &WindingLoop, p: &ModelParams) -> Result<WindingMeasurement> {
    p.validate()?;
    require_dissipation(p)?;
    if lp.samples < 64 {
        return Err(Error::InvalidInput(format!(
            "winding needs at least 64 samples, got {}",
            lp.samples
        )));
    }
    if !(lp.theta_r > 0.0 && lp.theta_r < FRAC_PI_2) {
        return Err(Error::InvalidInput(format!(
            "theta_r must lie in (0, π/2), got {}",
            lp.theta_r
        )));
    }
    let (t1w, t2w) = (w.location.theta1(), w.location.theta2());
    let thetas: Vec<f64> = (0..lp.samples)
        .map(|j| lp.start + TAU * j as f64 / lp.samples as f64)
        .collect();
    let r = thetas
        .par_iter()
        .map(|th| reflection(t1w + lp.theta_r * th.cos(), t2w + lp.theta_r * th.sin(), p))
        .collect::<Result<Vec<_>>>()?;
    let trace = ReflectionTrace::new(thetas, r)?;
    let wnd = unwrap_winding(&trace.phases())?;
    Ok(WindingMeasurement {
        winding: wnd.value,
        raw: wnd.raw,
        trace,
    })
}

/// Outcome of the spectroscopic arc scan, with the diagonalization oracle it
/// was checked against.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcDetection {
    pub endpoints: Option<(f64, f64)>,
    /// Per θ1: the emission spectrum peaks at zero detuning.
    pub inside: Vec<bool>,
    pub oracle: ArcInterval,
    /// Detected and oracle endpoints agree within two grid steps.
    pub consistent: bool,
}

/// Whether the emission spectrum has its global maximum at zero detuning.
///
/// Returns `None` when the central and off-center maxima tie.
fn central_peak(delta0: &[f64], emission: &[f64]) -> Option<bool> {
    let mut central = f64::NEG_INFINITY;
    let mut outer = f64::NEG_INFINITY;
    for (d, s) in delta0.iter().zip(emission) {
        if d.abs() < CENTRAL_PEAK_WINDOW - 1e-12 {
            central = central.max(*s);
        } else {
            outer = outer.max(*s);
        }
    }
    let top = central.max(outer);
    if (central - outer).abs() <= 1e-9 * top.abs() {
        None
    } else {
        Some(central > outer)
    }
}

fn grid_step(grid: &[f64]) -> f64 {
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

fn endpoints_agree(a: Option<(f64, f64)>, b: Option<(f64, f64)>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => (x.0 - y.0).abs() <= tol && (x.1 - y.1).abs() <= tol,
        _ => false,
    }
}

/// Maps the zero-energy arc along θ1 from reflection spectra.
///
/// For each θ1 the detuning is scanned over [−window, window] in steps of
/// [`DETUNING_STEP`]; the point is inside the arc when the re-emitted
/// intensity |r − 1|² peaks within [`CENTRAL_PEAK_WINDOW`] of zero. Ties
/// defer to the diagonalization oracle. Chains with fewer than two unit
/// cells have no distinguishable edge and report an empty arc.
pub fn detect_arc_endpoint(
    theta2: f64,
    theta1_grid: &[f64],
    delta0_window: f64,
    p: &ModelParams,
) -> Result<ArcDetection> {
    p.validate()?;
    require_dissipation(p)?;
    if !(delta0_window > CENTRAL_PEAK_WINDOW && delta0_window.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "detuning window must exceed {CENTRAL_PEAK_WINDOW}, got {delta0_window}"
        )));
    }
    let oracle = arc_interval_oracle(theta2, theta1_grid, ZERO_ENERGY_TOL, p)?;

    let inside: Vec<bool> = if p.n < 4 {
        vec![false; theta1_grid.len()]
    } else {
        let m = (delta0_window / DETUNING_STEP).round() as i64;
        let detunings: Vec<f64> = (-m..=m).map(|k| k as f64 * DETUNING_STEP).collect();
        theta1_grid
            .par_iter()
            .zip(oracle.inside.par_iter())
            .map(|(&t1, &fallback)| {
                let trace = reflection_spectrum(t1, theta2, &detunings, p)?;
                Ok(central_peak(&detunings, &trace.emission()).unwrap_or(fallback))
            })
            .collect::<Result<_>>()?
    };
    let endpoints = symmetric_interval(theta1_grid, &inside)?;
    let tol = 2.0 * grid_step(theta1_grid) * (1.0 + 1e-9);
    let consistent = endpoints_agree(endpoints, oracle.endpoints, tol);
    Ok(ArcDetection {
        endpoints,
        inside,
        oracle,
        consistent,
    })
}

/// One row of the finite-size arc table.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcTableRow {
    pub n: usize,
    pub detection: ArcDetection,
}

impl ArcTableRow {
    /// Positive arc end from the reflection scan.
    pub fn theta1c(&self) -> Option<f64> {
        self.detection.endpoints.map(|e| e.1)
    }

    /// Positive arc end from diagonalization.
    pub fn oracle_theta1c(&self) -> Option<f64> {
        self.detection.oracle.endpoints.map(|e| e.1)
    }
}

/// Arc endpoints for each lattice size.
pub fn fermi_arc_table(
    sizes: &[usize],
    theta2: f64,
    theta1_grid: &[f64],
    delta0_window: f64,
    p: &ModelParams,
) -> Result<Vec<ArcTableRow>> {
    sizes
        .iter()
        .map(|&n| {
            detect_arc_endpoint(theta2, theta1_grid, delta0_window, &p.with_n(n))
                .map(|detection| ArcTableRow { n, detection })
        })
        .collect()
}
