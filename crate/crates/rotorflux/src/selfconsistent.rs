//! Self-consistent temperature profiles. In the steady state every cut must
//! carry the same flux, so with the boundary temperatures pinned the interior
//! ones solve the linear system F_{α→}(T) = F_{α+1→}(T) for α = 1..N−2 over
//! the flux kernel.

use crate::analytic::{flux_kernel, FluxConvention, FluxKernel};
use crate::error::{Error, Result};
use crate::linalg::{condition_estimate, lu_factor, Matrix};
use crate::model::ChainSpec;
use crate::parallel;

/// Per-site bath temperatures with the chain ends pinned by the caller.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureProfile {
    temps: Vec<f64>,
}

impl TemperatureProfile {
    /// Strictly positive entries, at least two sites.
    pub fn new(temps: Vec<f64>) -> Result<Self> {
        if temps.len() < 2 {
            return Err(Error::invalid(
                "temperatures",
                format!("{} entries; need at least 2", temps.len()),
            ));
        }
        for (j, &t) in temps.iter().enumerate() {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::invalid(
                    "temperatures",
                    format!("site {j}: {t} must be > 0"),
                ));
            }
        }
        Ok(TemperatureProfile { temps })
    }

    /// Interior temperatures may legitimately leave the positive domain in
    /// the solved linear model; this constructor only checks the shape.
    fn from_solution(temps: Vec<f64>) -> Self {
        TemperatureProfile { temps }
    }

    pub fn temperatures(&self) -> &[f64] {
        &self.temps
    }

    pub fn n_sites(&self) -> usize {
        self.temps.len()
    }

    pub fn first(&self) -> f64 {
        self.temps[0]
    }

    pub fn last(&self) -> f64 {
        *self.temps.last().expect("profile is never empty")
    }
}

/// Options for the self-consistent solve.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Relative residual tolerance on flux uniformity.
    pub tolerance: f64,
    pub convention: FluxConvention,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-10,
            convention: FluxConvention::default(),
        }
    }
}

/// Solution of the self-consistency condition.
#[derive(Debug, Clone)]
pub struct SCSolution {
    pub profile: TemperatureProfile,
    /// Common steady-state flux (mean over cuts).
    pub flux: f64,
    /// |F_{α→} − F_{α+1→}| for consecutive cuts.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// 1-norm condition estimate of the solved system.
    pub condition: f64,
    /// Set when the linear model produced a non-positive interior
    /// temperature; the solution is outside the model's validity there.
    pub negative_temperatures: bool,
    /// Set when the residuals exceed the requested tolerance.
    pub residual_warning: bool,
}

impl SCSolution {
    pub fn residual_tolerance_for(&self, tolerance: f64) -> f64 {
        tolerance * self.flux.abs() + 1e-14
    }
}

pub fn solve_profile(spec: &ChainSpec, t_hot_left: f64, t_cold_right: f64) -> Result<SCSolution> {
    solve_profile_with(spec, t_hot_left, t_cold_right, &SolverOptions::default())
}

pub fn solve_profile_with(
    spec: &ChainSpec,
    t_left: f64,
    t_right: f64,
    options: &SolverOptions,
) -> Result<SCSolution> {
    if !(t_left > 0.0) || !(t_right > 0.0) {
        return Err(Error::invalid(
            "boundary_temperatures",
            format!("({t_left}, {t_right}) must both be > 0"),
        ));
    }
    let kernel = flux_kernel(spec, options.convention)?;
    solve_with_kernel(&kernel, t_left, t_right, options)
}

fn solve_with_kernel(
    kernel: &FluxKernel,
    t_left: f64,
    t_right: f64,
    options: &SolverOptions,
) -> Result<SCSolution> {
    let n = kernel.n_sites();
    let interior = n - 2;
    let mut temps = vec![0.0; n];
    temps[0] = t_left;
    temps[n - 1] = t_right;
    let mut condition = 1.0;
    if interior > 0 {
        // difference rows K[alpha] - K[alpha+1] over interior columns
        let mut a = Matrix::zeros(interior, interior);
        let mut rhs = vec![0.0; interior];
        for alpha in 0..interior {
            let upper = kernel.row(alpha);
            let lower = kernel.row(alpha + 1);
            for j in 0..interior {
                a.set(alpha, j, upper[j + 1] - lower[j + 1]);
            }
            rhs[alpha] = -(upper[0] - lower[0]) * t_left - (upper[n - 1] - lower[n - 1]) * t_right;
        }
        let norm = a.norm_1();
        let factors = lu_factor(a)?;
        let x = factors.solve(&rhs);
        condition = condition_estimate(norm, &factors);
        temps[1..n - 1].copy_from_slice(&x);
    }
    let fluxes = kernel.flux(&temps);
    let flux = fluxes.iter().sum::<f64>() / fluxes.len() as f64;
    let residuals: Vec<f64> = fluxes.windows(2).map(|w| (w[0] - w[1]).abs()).collect();
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(*r));
    let negative_temperatures = temps.iter().any(|&t| t <= 0.0);
    let residual_warning = max_residual > options.tolerance * flux.abs() + 1e-14;
    Ok(SCSolution {
        profile: TemperatureProfile::from_solution(temps),
        flux,
        residuals,
        max_residual,
        condition,
        negative_temperatures,
        residual_warning,
    })
}

/// Fluxes and profiles for both boundary orientations of the same chain.
#[derive(Debug, Clone)]
pub struct RectificationReport {
    /// Flux with the hot bath on the left (expected positive).
    pub flux_left: f64,
    /// Flux with the hot bath on the right (expected negative).
    pub flux_right: f64,
    pub sum: f64,
    /// |F_L + F_R| / max(|F_L|, |F_R|); zero means no rectification.
    pub asymmetry: f64,
    pub profile_left: TemperatureProfile,
    pub profile_right: TemperatureProfile,
    pub max_residual: f64,
    pub condition: f64,
    pub negative_temperatures: bool,
}

pub fn rectification(spec: &ChainSpec, t_hot: f64, t_cold: f64) -> Result<RectificationReport> {
    rectification_with(spec, t_hot, t_cold, &SolverOptions::default())
}

pub fn rectification_with(
    spec: &ChainSpec,
    t_hot: f64,
    t_cold: f64,
    options: &SolverOptions,
) -> Result<RectificationReport> {
    if !(t_hot > t_cold) {
        return Err(Error::invalid(
            "boundary_temperatures",
            format!("t_hot = {t_hot} must exceed t_cold = {t_cold}"),
        ));
    }
    let kernel = flux_kernel(spec, options.convention)?;
    let left = solve_with_kernel(&kernel, t_hot, t_cold, options)?;
    let right = solve_with_kernel(&kernel, t_cold, t_hot, options)?;
    let sum = left.flux + right.flux;
    let asymmetry = sum.abs() / left.flux.abs().max(right.flux.abs());
    Ok(RectificationReport {
        flux_left: left.flux,
        flux_right: right.flux,
        sum,
        asymmetry,
        max_residual: left.max_residual.max(right.max_residual),
        condition: left.condition.max(right.condition),
        negative_temperatures: left.negative_temperatures || right.negative_temperatures,
        profile_left: left.profile,
        profile_right: right.profile,
    })
}

/// One row of a boundary-temperature sweep; failures are carried per row so
/// the sweep keeps going.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub t_hot: f64,
    pub t_cold: f64,
    pub report: Result<RectificationReport>,
}

pub fn sweep(spec: &ChainSpec, pairs: &[(f64, f64)]) -> Vec<SweepRow> {
    sweep_with(spec, pairs, &SolverOptions::default())
}

/// Rows are evaluated in parallel (with the `parallel` feature) and emitted
/// in input order.
pub fn sweep_with(spec: &ChainSpec, pairs: &[(f64, f64)], options: &SolverOptions) -> Vec<SweepRow> {
    parallel::map_indexed(pairs.len(), |i| {
        let (t_hot, t_cold) = pairs[i];
        SweepRow {
            t_hot,
            t_cold,
            report: rectification_with(spec, t_hot, t_cold, options),
        }
    })
}

/// Sequential twin of [`sweep_with`], for the scaling comparison.
pub fn sweep_with_sequential(
    spec: &ChainSpec,
    pairs: &[(f64, f64)],
    options: &SolverOptions,
) -> Vec<SweepRow> {
    parallel::map_indexed_sequential(pairs.len(), |i| {
        let (t_hot, t_cold) = pairs[i];
        SweepRow {
            t_hot,
            t_cold,
            report: rectification_with(spec, t_hot, t_cold, options),
        }
    })
}
