//! Berry curvature and monopole charges of the lower Bloch band.
//!
//! Sign convention: the Berry connection is A = i⟨ψ|∇ψ⟩ and surfaces are
//! oriented outward, so the charge of a Weyl point equals the degree of the
//! map k ↦ ĥ(k) on an enclosing sphere, which is sign(det v).

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{d_vector, Axis, ModelParams, SyntheticMomentum, WeylPoint};
use crate::numerics::{dot, norm, solid_angle, Vec3};

/// Accepted distance between a raw Chern sum and the nearest integer.
pub const ROUNDING_TOLERANCE: f64 = 0.05;

const MIN_SPLITTING: f64 = 1e-6;
const MIN_OVERLAP: f64 = 1e-6;

pub type Spinor = [Complex64; 2];

/// Curvature sample of a Berry field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerryField {
    pub position: Vec3,
    pub curvature: Vec3,
}

/// A rounded Chern number with the sum it was rounded from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernResult {
    pub value: i64,
    pub raw: f64,
    pub mesh: usize,
}

/// Link-variable Chern number on the (kx, θ) torus around a Weyl point.
///
/// The full kx period encloses the node and its same-charge partner at
/// kx + π, so `raw` counts both and `value = raw / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappedChern {
    pub value: i64,
    pub raw: i64,
    pub flux: f64,
    pub grid: usize,
}

/// Monopole field `charge · q / (2|q|³)`.
pub fn berry_curvature_weyl(q: Vec3, charge: i32) -> Result<Vec3> {
    let r = norm(q);
    if r == 0.0 {
        return Err(Error::MonopoleSingularity);
    }
    let s = charge as f64 / (2.0 * r * r * r);
    Ok([s * q[0], s * q[1], s * q[2]])
}

/// Exact lower-band curvature of the linearized Hamiltonian h = Σ v_ij q_i σ_j:
/// F(q) = det(v) · q / (2|vᵀq|³).
pub fn linearized_curvature(w: &WeylPoint, q: Vec3) -> Result<Vec3> {
    let v = &w.velocity;
    let d = [
        v[0][0] * q[0] + v[1][0] * q[1] + v[2][0] * q[2],
        v[0][1] * q[0] + v[1][1] * q[1] + v[2][1] * q[2],
        v[0][2] * q[0] + v[1][2] * q[1] + v[2][2] * q[2],
    ];
    let r = norm(d);
    if r == 0.0 {
        return Err(Error::MonopoleSingularity);
    }
    let s = w.det_velocity() / (2.0 * r * r * r);
    Ok([s * q[0], s * q[1], s * q[2]])
}

fn ground_state(k: &SyntheticMomentum, p: &ModelParams) -> Result<Spinor> {
    let d = d_vector(k, p);
    let split = 2.0 * d.magnitude();
    if split < MIN_SPLITTING {
        return Err(Error::DegenerateGroundState(split));
    }
    Ok(d.ground_state().expect("non-degenerate"))
}

fn overlap(a: &Spinor, b: &Spinor) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// Phase of ⟨ψ0|ψ1⟩⟨ψ1|ψ2⟩⟨ψ2|ψ3⟩⟨ψ3|ψ0⟩ around a plaquette, in (−π, π].
///
/// Invariant under independent phase changes of the four states.
pub fn plaquette_phase(states: &[Spinor; 4]) -> Result<f64> {
    let mut prod = Complex64::new(1.0, 0.0);
    for i in 0..4 {
        let u = overlap(&states[i], &states[(i + 1) % 4]);
        if u.norm() < MIN_OVERLAP {
            return Err(Error::GapClosing);
        }
        prod *= u / u.norm();
    }
    Ok(prod.arg())
}

/// Curvature component normal to `plane` at `k`, from one step×step plaquette.
///
/// The plaquette is centered on `k`; swapping the two axes flips the sign.
pub fn berry_curvature_numeric(k: &SyntheticMomentum, plane: (Axis, Axis), step: f64, p: &ModelParams) -> Result<f64> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "plaquette step must be positive, got {step}"
        )));
    }
    if plane.0 == plane.1 {
        return Err(Error::InvalidInput("plaquette needs two distinct axes".into()));
    }
    let mut ea = [0.0; 3];
    let mut eb = [0.0; 3];
    ea[plane.0.index()] = step;
    eb[plane.1.index()] = step;
    let corner = k.offset([-(ea[0] + eb[0]) / 2.0, -(ea[1] + eb[1]) / 2.0, -(ea[2] + eb[2]) / 2.0]);
    let states = [
        ground_state(&corner, p)?,
        ground_state(&corner.offset(ea), p)?,
        ground_state(&corner.offset([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]]), p)?,
        ground_state(&corner.offset(eb), p)?,
    ];
    Ok(-plaquette_phase(&states)? / (step * step))
}

/// Full curvature vector (F_kx, F_θ1, F_θ2) from the three coordinate planes.
pub fn berry_field_numeric(k: &SyntheticMomentum, step: f64, p: &ModelParams) -> Result<BerryField> {
    let fx = berry_curvature_numeric(k, (Axis::Theta1, Axis::Theta2), step, p)?;
    let fy = berry_curvature_numeric(k, (Axis::Theta2, Axis::Kx), step, p)?;
    let fz = berry_curvature_numeric(k, (Axis::Kx, Axis::Theta1), step, p)?;
    Ok(BerryField {
        position: k.as_array(),
        curvature: [fx, fy, fz],
    })
}

fn round_checked(raw: f64, mesh: usize) -> Result<i64> {
    let value = raw.round();
    if (raw - value).abs() >= ROUNDING_TOLERANCE || !raw.is_finite() {
        return Err(Error::NonConvergence { raw, mesh });
    }
    Ok(value as i64)
}

/// Points of a latitude–longitude sphere: north pole, `mesh − 1` rings of
/// `2·mesh` points, south pole.
fn sphere_vertices(mesh: usize) -> Vec<Vec3> {
    let nphi = 2 * mesh;
    let mut pts = Vec::with_capacity(2 + (mesh - 1) * nphi);
    pts.push([0.0, 0.0, 1.0]);
    for i in 1..mesh {
        let theta = PI * i as f64 / mesh as f64;
        for j in 0..nphi {
            let phi = TAU * j as f64 / nphi as f64;
            pts.push([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]);
        }
    }
    pts.push([0.0, 0.0, -1.0]);
    pts
}

/// Outward-oriented triangles over [`sphere_vertices`].
fn sphere_triangles(mesh: usize) -> Vec<[usize; 3]> {
    let nphi = 2 * mesh;
    let ring = |i: usize, j: usize| 1 + (i - 1) * nphi + j % nphi;
    let south = 1 + (mesh - 1) * nphi;
    let mut tris = Vec::with_capacity(2 * mesh * nphi);
    for j in 0..nphi {
        tris.push([0, ring(1, j), ring(1, j + 1)]);
    }
    for i in 1..mesh - 1 {
        for j in 0..nphi {
            tris.push([ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)]);
            tris.push([ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)]);
        }
    }
    for j in 0..nphi {
        tris.push([ring(mesh - 1, j), south, ring(mesh - 1, j + 1)]);
    }
    tris
}

/// Degree of k ↦ ĥ(k) on a sphere of `radius` around the Weyl point.
pub fn chern_sphere(w: &WeylPoint, radius: f64, mesh: usize, p: &ModelParams) -> Result<ChernResult> {
    p.validate()?;
    if !(radius > 0.0 && radius < FRAC_PI_2) {
        return Err(Error::InvalidInput(format!(
            "sphere radius must lie in (0, π/2), got {radius}"
        )));
    }
    if mesh < 8 {
        return Err(Error::InvalidInput(format!(
            "sphere mesh must be at least 8, got {mesh}"
        )));
    }
    let images: Vec<Vec3> = sphere_vertices(mesh)
        .par_iter()
        .map(|n| {
            let k = w.location.offset([radius * n[0], radius * n[1], radius * n[2]]);
            let h = d_vector(&k, p).h();
            if 2.0 * norm(h) < MIN_SPLITTING {
                Err(Error::DegenerateGroundState(2.0 * norm(h)))
            } else {
                Ok(h)
            }
        })
        .collect::<Result<_>>()?;
    let solid: Vec<f64> = sphere_triangles(mesh)
        .par_iter()
        .map(|t| solid_angle(images[t[0]], images[t[1]], images[t[2]]))
        .collect();
    let raw = solid.iter().sum::<f64>() / (4.0 * PI);
    Ok(ChernResult {
        value: round_checked(raw, mesh)?,
        raw,
        mesh,
    })
}

/// Sum of plaquette phases over a periodic grid of states, divided by 2π.
///
/// `states[i][j]` is indexed by (kx, θ); plaquettes run
/// (i, j) → (i+1, j) → (i+1, j+1) → (i, j+1). The result is an integer up to
/// rounding for any gauge choice of the input states.
pub fn link_variable_chern(states: &[Vec<Spinor>]) -> Result<f64> {
    let nk = states.len();
    if nk < 2 || states.iter().any(|row| row.len() != states[0].len() || row.len() < 2) {
        return Err(Error::InvalidInput(
            "link-variable grid must be rectangular and at least 2x2".into(),
        ));
    }
    let nt = states[0].len();
    let phases: Vec<f64> = (0..nk * nt)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / nt, idx % nt);
            let (i1, j1) = ((i + 1) % nk, (j + 1) % nt);
            plaquette_phase(&[states[i][j], states[i1][j], states[i1][j1], states[i][j1]])
        })
        .collect::<Result<_>>()?;
    Ok(phases.iter().sum::<f64>() / TAU)
}

/// Lower-band states on the (kx, θ) torus with θ1 = θ1w + θr cos θ,
/// θ2 = θ2w + θr sin θ.
pub fn mapped_torus_states(w: &WeylPoint, theta_r: f64, grid: usize, p: &ModelParams) -> Result<Vec<Vec<Spinor>>> {
    let (t1w, t2w) = (w.location.theta1(), w.location.theta2());
    (0..grid)
        .into_par_iter()
        .map(|i| {
            let kx = TAU * i as f64 / grid as f64;
            (0..grid)
                .map(|j| {
                    let theta = TAU * j as f64 / grid as f64;
                    let k = SyntheticMomentum::new(kx, t1w + theta_r * theta.cos(), t2w + theta_r * theta.sin());
                    ground_state(&k, p).map_err(|_| Error::GapClosing)
                })
                .collect()
        })
        .collect()
}

/// Chern number of the lower band of h(kx, θ) by the link-variable method.
pub fn chern_mapped_torus(w: &WeylPoint, theta_r: f64, grid: usize, p: &ModelParams) -> Result<MappedChern> {
    p.validate()?;
    if !(theta_r > 0.0 && theta_r < FRAC_PI_2) {
        return Err(Error::InvalidInput(format!(
            "theta_r must lie in (0, π/2), got {theta_r}"
        )));
    }
    if grid < 20 {
        return Err(Error::InvalidInput(format!(
            "torus grid must be at least 20, got {grid}"
        )));
    }
    let states = mapped_torus_states(w, theta_r, grid, p)?;
    let flux = link_variable_chern(&states)?;
    let raw = round_checked(flux, grid)?;
    Ok(MappedChern {
        value: (raw as f64 / 2.0).round() as i64,
        raw,
        flux,
        grid,
    })
}

/// Outward flux of the numeric curvature through a sphere around `center`,
/// by midpoint quadrature on an `n_theta × 2·n_theta` grid, divided by 2π.
pub fn numeric_flux_through_sphere(
    center: &SyntheticMomentum,
    radius: f64,
    n_theta: usize,
    step: f64,
    p: &ModelParams,
) -> Result<f64> {
    let n_phi = 2 * n_theta;
    let (dth, dph) = (PI / n_theta as f64, TAU / n_phi as f64);
    let terms: Vec<f64> = (0..n_theta * n_phi)
        .into_par_iter()
        .map(|idx| {
            let th = (idx / n_phi) as f64 * dth + dth / 2.0;
            let ph = (idx % n_phi) as f64 * dph + dph / 2.0;
            let n = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
            let k = center.offset([radius * n[0], radius * n[1], radius * n[2]]);
            let f = berry_field_numeric(&k, step, p)?;
            Ok(dot(f.curvature, n) * radius * radius * th.sin() * dth * dph)
        })
        .collect::<Result<_>>()?;
    Ok(terms.iter().sum::<f64>() / TAU)
}
