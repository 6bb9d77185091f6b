//! Single-site Ornstein–Uhlenbeck machinery for the decoupled chain: the
//! 2×2 propagator e^{−tA_(j)} and the stationary phase-space covariance.
//!
//! For one site the drift matrix and its propagator are
//!
//! ```text
//! A_(j) = |  0      -1/m_j |        e^{-t A_(j)} = e^{-ζ_j t/2} [ cosh(ρ_j t) I + sinh(ρ_j t)/ρ_j · B_(j) ]
//!         |  M_j     ζ_j   |
//!
//! B_(j) = |  ζ_j/2   1/m_j |        ρ_j² = (ζ_j/2)² − M_j/m_j
//!         | -M_j    -ζ_j/2 |
//! ```
//!
//! with the trigonometric branch cosh(ρt) → cos(|ρ|t), sinh(ρt)/ρ → sin(|ρ|t)/|ρ|
//! when ρ² < 0, and the analytic t-limit at critical damping ρ → 0.

use crate::error::Result;
use crate::model::ChainSpec;

/// Per-site propagator ingredients; `rho_squared` keeps the sign so both the
/// overdamped and oscillatory branches are represented without complex
/// arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SitePropagatorParams {
    pub zeta: f64,
    pub rho_squared: f64,
    pub b_matrix: [[f64; 2]; 2],
}

pub fn site_propagator_params(spec: &ChainSpec, j: usize) -> SitePropagatorParams {
    let zeta = spec.bath_coupling(j);
    let half = 0.5 * zeta;
    SitePropagatorParams {
        zeta,
        rho_squared: half * half - spec.pinning_ratio(j),
        b_matrix: [[half, 1.0 / spec.mass(j)], [-spec.pinning(j), -half]],
    }
}

/// cosh(ρt) and sinh(ρt)/ρ evaluated through the branch-safe forms; the
/// series branch keeps both smooth across ρ² = 0.
fn cosh_sinhc(rho_squared: f64, t: f64, branch_scale: f64) -> (f64, f64) {
    let x = rho_squared * t * t;
    if rho_squared.abs() < 1e-12 * branch_scale {
        // x is tiny unless t is astronomically large; fourth-order series
        let c = 1.0 + x / 2.0 + x * x / 24.0;
        let s = t * (1.0 + x / 6.0 + x * x / 120.0);
        (c, s)
    } else if rho_squared > 0.0 {
        let rho = rho_squared.sqrt();
        ((rho * t).cosh(), (rho * t).sinh() / rho)
    } else {
        let omega = (-rho_squared).sqrt();
        ((omega * t).cos(), (omega * t).sin() / omega)
    }
}

/// e^{−t A_(j)} for t ≥ 0; the identity at t = 0, decaying to zero for large t.
pub fn site_propagator(spec: &ChainSpec, j: usize, t: f64) -> [[f64; 2]; 2] {
    let params = site_propagator_params(spec, j);
    let branch_scale = (0.25 * params.zeta * params.zeta).max(spec.pinning_ratio(j));
    let (c, s) = cosh_sinhc(params.rho_squared, t, branch_scale);
    let damp = (-0.5 * params.zeta * t).exp();
    let b = params.b_matrix;
    [
        [damp * (c + s * b[0][0]), damp * s * b[0][1]],
        [damp * s * b[1][0], damp * (c + s * b[1][1])],
    ]
}

/// Diagonal stationary covariance of the decoupled process:
/// ⟨q_j²⟩ = T_j/M_j, ⟨p_j²⟩ = m_j T_j, zero position–momentum cross terms.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryCovariance {
    position: Vec<f64>,
    momentum: Vec<f64>,
}

impl StationaryCovariance {
    pub fn position_variance(&self, j: usize) -> f64 {
        self.position[j]
    }

    pub fn momentum_variance(&self, j: usize) -> f64 {
        self.momentum[j]
    }

    pub fn position_variances(&self) -> &[f64] {
        &self.position
    }

    pub fn momentum_variances(&self) -> &[f64] {
        &self.momentum
    }

    pub fn n_sites(&self) -> usize {
        self.position.len()
    }
}

pub fn stationary_covariance(spec: &ChainSpec, temps: &[f64]) -> Result<StationaryCovariance> {
    spec.check_temperatures(temps)?;
    let position = temps
        .iter()
        .enumerate()
        .map(|(j, t)| t / spec.pinning(j))
        .collect();
    let momentum = temps
        .iter()
        .enumerate()
        .map(|(j, t)| t * spec.mass(j))
        .collect();
    Ok(StationaryCovariance { position, momentum })
}
