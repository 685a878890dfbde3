//! Open-boundary spectra of the finite chain: edge-state sheets over the
//! surface zone (θ1, θ2), their localization, and the zero-energy arc found
//! by direct diagonalization.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{open_chain_hamiltonian, ModelParams};
use crate::numerics::eigh_tridiagonal;

/// Default zero-energy window (units of J).
pub const ZERO_ENERGY_TOL: f64 = 0.02;
/// Minimum end-cell weight for a state to count as edge-localized.
pub const EDGE_WEIGHT_THRESHOLD: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Localization {
    Left,
    Right,
    Bulk,
}

impl Localization {
    pub fn is_edge(self) -> bool {
        self != Localization::Bulk
    }
}

impl fmt::Display for Localization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Localization::Left => "L",
            Localization::Right => "R",
            Localization::Bulk => "B",
        })
    }
}

/// Eigen-data of the open chain at one (θ1, θ2).
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSpectrumPoint {
    pub theta1: f64,
    pub theta2: f64,
    /// Ascending, relative to Δ0.
    pub eigenvalues: Vec<f64>,
    pub labels: Vec<Localization>,
    /// States aligned with `eigenvalues`. A quasi-degenerate zero-mode pair
    /// is rotated into its left- and right-localized combinations.
    pub states: Vec<Vec<f64>>,
}

impl EdgeSpectrumPoint {
    /// Indices of edge-labeled states with |E| < `ztol`.
    pub fn zero_edge_modes(&self, ztol: f64) -> impl Iterator<Item = usize> + '_ {
        (0..self.eigenvalues.len()).filter(move |&i| self.eigenvalues[i].abs() < ztol && self.labels[i].is_edge())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub site_densities: Vec<f64>,
}

impl DensityProfile {
    pub fn total(&self) -> f64 {
        self.site_densities.iter().sum()
    }

    /// Weight on the first two sites.
    pub fn first_cell(&self) -> f64 {
        self.site_densities.iter().take(2).sum()
    }
}

/// Weights on the first and last two sites.
fn end_weights(v: &[f64]) -> (f64, f64) {
    let n = v.len();
    let w = n.min(2);
    let left = v[..w].iter().map(|x| x * x).sum();
    let right = v[n - w..].iter().map(|x| x * x).sum();
    (left, right)
}

pub fn classify_localization(v: &[f64]) -> Localization {
    if v.is_empty() {
        return Localization::Bulk;
    }
    let (left, right) = end_weights(v);
    if left > EDGE_WEIGHT_THRESHOLD && left > right {
        Localization::Left
    } else if right > EDGE_WEIGHT_THRESHOLD && right > left {
        Localization::Right
    } else {
        Localization::Bulk
    }
}

pub fn density_profile(v: &[f64]) -> DensityProfile {
    DensityProfile {
        site_densities: v.iter().map(|x| x * x).collect(),
    }
}

/// Rotates two orthonormal vectors so the first carries the largest possible
/// weight on the first unit cell and the second the smallest.
fn split_by_left_weight(a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let w = a.len().min(2);
    let paa: f64 = a[..w].iter().map(|x| x * x).sum();
    let pbb: f64 = b[..w].iter().map(|x| x * x).sum();
    let pab: f64 = a[..w].iter().zip(&b[..w]).map(|(x, y)| x * y).sum();
    let phi = 0.5 * (2.0 * pab).atan2(paa - pbb);
    let (s, c) = phi.sin_cos();
    let u = a.iter().zip(b).map(|(x, y)| c * x + s * y).collect();
    let v = a.iter().zip(b).map(|(x, y)| -s * x + c * y).collect();
    (u, v)
}

/// Diagonalizes the open chain at (θ1, θ2) and labels every state.
///
/// States with |E| < `ztol` form the zero-mode manifold; when it holds
/// exactly two states they are rotated into end-localized combinations before
/// labeling, so labels do not depend on how the solver mixes a near-degenerate
/// pair.
pub fn solve_open_chain(theta1: f64, theta2: f64, ztol: f64, p: &ModelParams) -> Result<EdgeSpectrumPoint> {
    let h = open_chain_hamiltonian(theta1, theta2, p)?;
    let eig = eigh_tridiagonal(&h)?;
    let mut states = eig.vectors;
    let zero: Vec<usize> = (0..eig.values.len()).filter(|&i| eig.values[i].abs() < ztol).collect();
    if let [i, j] = zero[..] {
        let (u, v) = split_by_left_weight(&states[i], &states[j]);
        states[i] = u;
        states[j] = v;
    }
    let labels = states.iter().map(|v| classify_localization(v)).collect();
    Ok(EdgeSpectrumPoint {
        theta1,
        theta2,
        eigenvalues: eig.values,
        labels,
        states,
    })
}

/// Left member of the edge branch at (θ1, θ2): the two states nearest zero
/// energy, rotated to maximize first-cell weight. Unlike the labels of
/// [`solve_open_chain`] this follows the branch past the end of the arc,
/// where the pair hybridizes and both halves turn `Bulk`.
pub fn left_edge_state(theta1: f64, theta2: f64, p: &ModelParams) -> Result<Vec<f64>> {
    if p.n < 2 {
        return Err(Error::InvalidInput("edge branch needs at least two resonators".into()));
    }
    let eig = eigh_tridiagonal(&open_chain_hamiltonian(theta1, theta2, p)?)?;
    let mut order: Vec<usize> = (0..eig.values.len()).collect();
    order.sort_by(|&a, &b| eig.values[a].abs().total_cmp(&eig.values[b].abs()).then(a.cmp(&b)));
    let (u, _) = split_by_left_weight(&eig.vectors[order[0]], &eig.vectors[order[1]]);
    Ok(u)
}

/// Edge spectra over the product grid, θ1 outer and θ2 inner.
pub fn edge_spectrum(theta1_grid: &[f64], theta2_grid: &[f64], p: &ModelParams) -> Result<Vec<EdgeSpectrumPoint>> {
    p.validate()?;
    if p.n < 2 {
        return Err(Error::InvalidInput(
            "edge spectrum needs at least two resonators".into(),
        ));
    }
    let n2 = theta2_grid.len();
    (0..theta1_grid.len() * n2)
        .into_par_iter()
        .map(|idx| solve_open_chain(theta1_grid[idx / n2], theta2_grid[idx % n2], ZERO_ENERGY_TOL, p))
        .collect()
}

/// Uniform grid `k·step` for k = −m..=m with m = round(half_extent/step).
pub fn symmetric_grid(half_extent: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && half_extent >= 0.0 && step.is_finite() && half_extent.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "grid needs positive step and non-negative extent, got step {step}, extent {half_extent}"
        )));
    }
    let m = (half_extent / step).round() as i64;
    Ok((-m..=m).map(|k| k as f64 * step).collect())
}

/// Largest interval [−t, t] of a symmetric grid on which `inside` holds at
/// every grid point.
///
/// Returns `None` when the innermost point (or pair) is already outside.
pub fn symmetric_interval(grid: &[f64], inside: &[bool]) -> Result<Option<(f64, f64)>> {
    if grid.len() != inside.len() {
        return Err(Error::InvalidInput("grid and classification lengths differ".into()));
    }
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty grid".into()));
    }
    let scale = grid.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let tol = 1e-9 * (1.0 + scale);
    let find = |t: f64| grid.iter().position(|g| (g - t).abs() <= tol);

    let mut positive: Vec<f64> = grid
        .iter()
        .copied()
        .filter(|g| *g >= -tol)
        .map(|g| g.max(0.0))
        .collect();
    positive.sort_by(f64::total_cmp);
    positive.dedup_by(|a, b| (*a - *b).abs() <= tol);

    let mut last = None;
    for t in positive {
        let (Some(ip), Some(im)) = (find(t), find(-t)) else {
            return Err(Error::InvalidInput(format!(
                "grid is not symmetric about 0 (missing −{t})"
            )));
        };
        if inside[ip] && inside[im] {
            last = Some(t);
        } else {
            break;
        }
    }
    Ok(last.map(|t| (-t, t)))
}

/// Zero-energy edge modes along θ1 at fixed θ2, by diagonalization.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcInterval {
    /// (θ1c−, θ1c+), or `None` for an empty arc.
    pub endpoints: Option<(f64, f64)>,
    /// Per grid point: an edge-labeled state with |E| < ztol exists.
    pub inside: Vec<bool>,
}

pub fn arc_interval_oracle(theta2: f64, theta1_grid: &[f64], ztol: f64, p: &ModelParams) -> Result<ArcInterval> {
    p.validate()?;
    if !(ztol > 0.0) {
        return Err(Error::InvalidInput(format!("ztol must be positive, got {ztol}")));
    }
    let inside: Vec<bool> = theta1_grid
        .par_iter()
        .map(|&t1| solve_open_chain(t1, theta2, ztol, p).map(|pt| pt.zero_edge_modes(ztol).next().is_some()))
        .collect::<Result<_>>()?;
    let endpoints = symmetric_interval(theta1_grid, &inside)?;
    Ok(ArcInterval { endpoints, inside })
}
