//! The parametrized resonator lattice.
//!
//! Two control angles θ1 and θ2 modulate the hoppings and on-site shifts of a
//! dimerized chain; together with the lattice momentum kx they span a
//! synthetic three-dimensional Brillouin zone. All energies are in units of
//! the hopping scale `j` unless stated otherwise.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{TridiagonalSym, Vec3};

/// Experimental knobs of the chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Hopping scale J, the energy unit.
    pub j: f64,
    /// On-site modulation depth Je.
    pub je: f64,
    /// Drive detuning Δ0 = Δc − 2J − Je.
    pub delta0: f64,
    /// Resonator decay rate κ.
    pub kappa: f64,
    /// Lattice size: number of resonators (a1, b1, a2, b2, ...).
    pub n: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            j: 1.0,
            je: 1.0,
            delta0: -0.1,
            kappa: 0.1,
            n: 20,
        }
    }
}

impl ModelParams {
    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_delta0(mut self, delta0: f64) -> Self {
        self.delta0 = delta0;
        self
    }

    pub fn with_je(mut self, je: f64) -> Self {
        self.je = je;
        self
    }

    /// Number of complete two-site unit cells.
    pub fn unit_cells(&self) -> usize {
        self.n / 2
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j.is_finite() && self.je.is_finite() && self.delta0.is_finite() && self.kappa.is_finite()) {
            return Err(Error::NonFinite("model parameters"));
        }
        if self.j <= 0.0 {
            return Err(Error::InvalidInput(format!("J must be positive, got {}", self.j)));
        }
        if self.je < 0.0 {
            return Err(Error::InvalidInput(format!("Je must be non-negative, got {}", self.je)));
        }
        if self.kappa < 0.0 {
            return Err(Error::InvalidInput(format!(
                "kappa must be non-negative, got {}",
                self.kappa
            )));
        }
        if self.n == 0 {
            return Err(Error::InvalidInput("lattice size N must be at least 1".into()));
        }
        Ok(())
    }
}

/// Reduces an angle into (−π, π].
pub fn reduce_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Axes of the synthetic Brillouin zone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Kx,
    Theta1,
    Theta2,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::Kx, Axis::Theta1, Axis::Theta2];

    pub fn index(self) -> usize {
        match self {
            Axis::Kx => 0,
            Axis::Theta1 => 1,
            Axis::Theta2 => 2,
        }
    }
}

/// A point (kx, θ1, θ2) of the synthetic zone, stored reduced to (−π, π].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticMomentum {
    kx: f64,
    theta1: f64,
    theta2: f64,
}

impl SyntheticMomentum {
    pub fn new(kx: f64, theta1: f64, theta2: f64) -> Self {
        Self {
            kx: reduce_angle(kx),
            theta1: reduce_angle(theta1),
            theta2: reduce_angle(theta2),
        }
    }

    pub fn from_array(k: Vec3) -> Self {
        Self::new(k[0], k[1], k[2])
    }

    pub fn kx(&self) -> f64 {
        self.kx
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    pub fn as_array(&self) -> Vec3 {
        [self.kx, self.theta1, self.theta2]
    }

    /// Shifted point `self + q` (re-reduced).
    pub fn offset(&self, q: Vec3) -> Self {
        Self::new(self.kx + q[0], self.theta1 + q[1], self.theta2 + q[2])
    }
}

/// Bloch decomposition h(k) = Δ0 + hx σx + hy σy + hz σz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DVector {
    pub delta0: f64,
    pub hx: f64,
    pub hy: f64,
    pub hz: f64,
}

impl DVector {
    pub fn h(&self) -> Vec3 {
        [self.hx, self.hy, self.hz]
    }

    pub fn magnitude(&self) -> f64 {
        (self.hx * self.hx + self.hy * self.hy + self.hz * self.hz).sqrt()
    }

    /// The 2×2 Bloch matrix in the (a, b) basis.
    pub fn bloch_matrix(&self) -> [[Complex64; 2]; 2] {
        let c = Complex64::new;
        [
            [c(self.delta0 + self.hz, 0.0), c(self.hx, -self.hy)],
            [c(self.hx, self.hy), c(self.delta0 - self.hz, 0.0)],
        ]
    }

    /// Normalized lower-band eigenvector of the Bloch matrix.
    ///
    /// Returns `None` at a band touching. The gauge switches between two
    /// closed forms to stay away from the vanishing component.
    pub fn ground_state(&self) -> Option<[Complex64; 2]> {
        let d = self.magnitude();
        if d == 0.0 {
            return None;
        }
        // (dz + |d|) u + (dx − i dy) v = 0   or   (dx + i dy) u + (|d| − dz) v = 0
        let (u, v) = if self.hz <= 0.0 {
            (Complex64::new(d - self.hz, 0.0), -Complex64::new(self.hx, self.hy))
        } else {
            (Complex64::new(self.hx, -self.hy), Complex64::new(-(d + self.hz), 0.0))
        };
        let nrm = (u.norm_sqr() + v.norm_sqr()).sqrt();
        Some([u / nrm, v / nrm])
    }
}

/// Hopping pair (J1 intra-cell, J2 inter-cell) at control angle θ1.
pub fn coupling_profile(theta1: f64, p: &ModelParams) -> (f64, f64) {
    let c = theta1.cos();
    (p.j * (1.0 - c), p.j * (1.0 + c))
}

/// On-site shifts of the a and b resonators relative to Δ0.
pub fn onsite_profile(theta2: f64, p: &ModelParams) -> (f64, f64) {
    let s = p.je * theta2.cos();
    (s, -s)
}

/// Qubit-mediated hopping −g²/Δ in the dispersive regime.
///
/// Units follow the inputs (e.g. GHz in, GHz out).
pub fn dispersive_map(g: f64, delta: f64) -> Result<f64> {
    if !g.is_finite() || !delta.is_finite() {
        return Err(Error::NonFinite("dispersive map inputs"));
    }
    if delta == 0.0 {
        return Err(Error::Resonant);
    }
    Ok(-g * g / delta)
}

pub fn d_vector(k: &SyntheticMomentum, p: &ModelParams) -> DVector {
    let (kx, t1, t2) = (k.kx(), k.theta1(), k.theta2());
    DVector {
        delta0: p.delta0,
        hx: 2.0 * p.j * kx.cos(),
        hy: 2.0 * p.j * t1.cos() * kx.sin(),
        hz: p.je * t2.cos(),
    }
}

/// Lower and upper bulk bands at `k`.
pub fn bulk_bands(k: &SyntheticMomentum, p: &ModelParams) -> (f64, f64) {
    let d = d_vector(k, p);
    let r = d.magnitude();
    (d.delta0 - r, d.delta0 + r)
}

/// Names of the four band touchings in the reduced zone kx ∈ (0, π].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeylLabel {
    W1,
    W2,
    W3,
    W4,
}

impl WeylLabel {
    pub const ALL: [WeylLabel; 4] = [WeylLabel::W1, WeylLabel::W2, WeylLabel::W3, WeylLabel::W4];

    pub fn location(self) -> SyntheticMomentum {
        let (t1, t2) = match self {
            WeylLabel::W1 => (FRAC_PI_2, FRAC_PI_2),
            WeylLabel::W2 => (FRAC_PI_2, -FRAC_PI_2),
            WeylLabel::W3 => (-FRAC_PI_2, -FRAC_PI_2),
            WeylLabel::W4 => (-FRAC_PI_2, FRAC_PI_2),
        };
        SyntheticMomentum::new(FRAC_PI_2, t1, t2)
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "W1" => Some(WeylLabel::W1),
            "W2" => Some(WeylLabel::W2),
            "W3" => Some(WeylLabel::W3),
            "W4" => Some(WeylLabel::W4),
            _ => None,
        }
    }
}

impl fmt::Display for WeylLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            WeylLabel::W1 => "W1",
            WeylLabel::W2 => "W2",
            WeylLabel::W3 => "W3",
            WeylLabel::W4 => "W4",
        };
        f.write_str(s)
    }
}

/// A linearized band touching: h ≈ Σ v_ij q_i σ_j near `location`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylPoint {
    pub location: SyntheticMomentum,
    /// `velocity[i][j]` = ∂h_j/∂q_i with q ordered (kx, θ1, θ2).
    pub velocity: [[f64; 3]; 3],
    /// sign(det velocity).
    pub chirality: i32,
}

impl WeylPoint {
    pub fn det_velocity(&self) -> f64 {
        det3(&self.velocity)
    }
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Exact first-order expansion of h(k) at a band touching.
pub fn linearize(location: &SyntheticMomentum, p: &ModelParams) -> Result<WeylPoint> {
    p.validate()?;
    let d = d_vector(location, p);
    let scale = 2.0 * p.j + p.je;
    if d.magnitude() > 1e-12 * scale {
        return Err(Error::NotBandTouching(d.magnitude()));
    }
    let (kx, t1, t2) = (location.kx(), location.theta1(), location.theta2());
    let velocity = [
        [-2.0 * p.j * kx.sin(), 2.0 * p.j * t1.cos() * kx.cos(), 0.0],
        [0.0, -2.0 * p.j * t1.sin() * kx.sin(), 0.0],
        [0.0, 0.0, -p.je * t2.sin()],
    ];
    let det = det3(&velocity);
    if det.abs() <= 1e-12 * scale.powi(3) {
        return Err(Error::DegenerateModel(
            "velocity matrix is singular at the touching point",
        ));
    }
    Ok(WeylPoint {
        location: *location,
        velocity,
        chirality: if det > 0.0 { 1 } else { -1 },
    })
}

/// The four Weyl points W1..W4, in label order.
pub fn weyl_points(p: &ModelParams) -> Result<[WeylPoint; 4]> {
    p.validate()?;
    if p.je == 0.0 {
        return Err(Error::DegenerateModel(
            "Je = 0 makes hz vanish identically; touchings form nodal lines",
        ));
    }
    let mut out = [WeylPoint {
        location: SyntheticMomentum::new(0.0, 0.0, 0.0),
        velocity: [[0.0; 3]; 3],
        chirality: 0,
    }; 4];
    for (slot, label) in out.iter_mut().zip(WeylLabel::ALL) {
        *slot = linearize(&label.location(), p)?;
    }
    Ok(out)
}

/// Real-space Hamiltonian of the open chain of `p.n` resonators (Δ0 excluded).
///
/// Sites are ordered a1, b1, a2, b2, ...; even bonds are intra-cell (J1),
/// odd bonds inter-cell (J2).
pub fn open_chain_hamiltonian(theta1: f64, theta2: f64, p: &ModelParams) -> Result<TridiagonalSym> {
    p.validate()?;
    let (j1, j2) = coupling_profile(theta1, p);
    let (ea, eb) = onsite_profile(theta2, p);
    let diag = (0..p.n).map(|i| if i % 2 == 0 { ea } else { eb }).collect();
    let offdiag = (0..p.n.saturating_sub(1))
        .map(|i| if i % 2 == 0 { j1 } else { j2 })
        .collect();
    TridiagonalSym::new(diag, offdiag)
}
