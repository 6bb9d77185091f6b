//! Low-temperature steady-state heat flux of the stochastic rotor chain.
//!
//! The flux from site α to the right decomposes into four contributions,
//! F_{α→} = F_t + W₁ + W₂ + W₃, each linear in the bath temperatures. All
//! terms scale as κ⁴: linearizing the rotor force λκ sin(κΔq) gives an
//! effective spring λκ², and the flux is quadratic in it. With κ = 1 the
//! formulas reduce to their conventional form.
//!
//! Two conventions are provided for the graded-mass sector (they coincide
//! whenever M_j/m_j is uniform):
//!
//! * [`FluxConvention::Reciprocal`] — the plain truncated expansion. Every
//!   pair term is antisymmetric under swapping the two sites, so the
//!   self-consistent flux obeys F(T_H, T_C) = −F(T_C, T_H) exactly and mass
//!   grading alone produces no rectification at this order.
//! * [`FluxConvention::Rectifying`] (default) — adds a directional graded
//!   term −κ⁴ λ_{α,β}² (M_α/m_α − M_β/m_β)(M_α/m_α) T_β / D_{α,β} to each
//!   pair, which breaks the reversal antisymmetry and yields thermal
//!   rectification for mass-graded chains.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::ChainSpec;

/// Treatment of the graded-mass sector of the pair flux.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FluxConvention {
    #[default]
    Rectifying,
    Reciprocal,
}

impl FluxConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            FluxConvention::Rectifying => "rectifying",
            FluxConvention::Reciprocal => "reciprocal",
        }
    }
}

impl std::str::FromStr for FluxConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rectifying" => Ok(FluxConvention::Rectifying),
            "reciprocal" => Ok(FluxConvention::Reciprocal),
            other => Err(Error::invalid(
                "convention",
                format!("{other:?} is not one of rectifying | reciprocal"),
            )),
        }
    }
}

fn check_alpha(spec: &ChainSpec, alpha: usize) -> Result<()> {
    if alpha + 1 >= spec.n_sites() {
        return Err(Error::SiteOutOfRange {
            index: alpha,
            n_sites: spec.n_sites(),
        });
    }
    Ok(())
}

/// D_{α,β} = (ζ_α+ζ_β)(ζ_β M_α/m_α + ζ_α M_β/m_β) + (M_α/m_α − M_β/m_β)²;
/// strictly positive and symmetric in its arguments.
pub fn d_coeff(spec: &ChainSpec, alpha: usize, beta: usize) -> f64 {
    let (za, zb) = (spec.bath_coupling(alpha), spec.bath_coupling(beta));
    let (wa, wb) = (spec.pinning_ratio(alpha), spec.pinning_ratio(beta));
    (za + zb) * (zb * wa + za * wb) + (wa - wb) * (wa - wb)
}

/// Iterates over the partners β > α of `alpha`, applying `f(beta, lambda_ab)`.
fn for_right_partners(spec: &ChainSpec, alpha: usize, mut f: impl FnMut(usize, f64)) {
    for &(beta, lam) in spec.coupling().partners(alpha) {
        if beta > alpha {
            f(beta, lam);
        }
    }
}

/// Leading low-temperature form of the F_t contribution.
pub fn ft_term_low_t(spec: &ChainSpec, temps: &[f64], alpha: usize) -> f64 {
    let k2 = spec.kappa() * spec.kappa();
    let k4 = k2 * k2;
    let mut total = 0.0;
    for_right_partners(spec, alpha, |beta, lam_ab| {
        let (za, zb) = (spec.bath_coupling(alpha), spec.bath_coupling(beta));
        let (ma, mb) = (spec.mass(alpha), spec.mass(beta));
        let (pa, pb) = (spec.pinning(alpha), spec.pinning(beta));
        total += lam_ab * lam_ab / 4.0
            * (temps[alpha] / pa + temps[beta] / pb)
            * (1.0 / (zb * mb) - 1.0 / (za * ma));
        for &(l, lam_bl) in spec.coupling().partners(beta) {
            if l != alpha {
                total += lam_ab * lam_bl / 4.0 * temps[beta] / (zb * mb * pb);
            }
        }
        for &(l, lam_al) in spec.coupling().partners(alpha) {
            if l != beta {
                total -= lam_ab * lam_al / 4.0 * temps[alpha] / (za * ma * pa);
            }
        }
    });
    k4 * total
}

/// W₁ contribution (six sum groups).
pub fn w1_term_low_t(spec: &ChainSpec, temps: &[f64], alpha: usize) -> f64 {
    let k2 = spec.kappa() * spec.kappa();
    let k4 = k2 * k2;
    let mut total = 0.0;
    for_right_partners(spec, alpha, |beta, lam_ab| {
        let (za, zb) = (spec.bath_coupling(alpha), spec.bath_coupling(beta));
        let (ma, mb) = (spec.mass(alpha), spec.mass(beta));
        let (pa, pb) = (spec.pinning(alpha), spec.pinning(beta));
        let (wa, wb) = (spec.pinning_ratio(alpha), spec.pinning_ratio(beta));
        let d = d_coeff(spec, alpha, beta);
        let lam2 = lam_ab * lam_ab;

        // pair group
        total += lam2 / (4.0 * ma * pa) * temps[alpha] / za
            - lam2 / (4.0 * mb * pb) * temps[beta] / zb;
        // third-site group
        for &(l, lam_al) in spec.coupling().partners(alpha) {
            if l != beta {
                total += lam_ab * lam_al / (4.0 * ma * pa) * temps[alpha] / za;
            }
        }
        for &(l, lam_bl) in spec.coupling().partners(beta) {
            if l != alpha {
                total -= lam_ab * lam_bl / (4.0 * mb * pb) * temps[beta] / zb;
            }
        }
        // friction-weighted difference
        total += lam2 / (4.0 * ma * mb) * (za + zb) / d * (temps[alpha] - temps[beta]);
        // pinning-mismatch group
        total += lam2 / (4.0 * ma * mb * d)
            * (wa - wb)
            * (temps[alpha] / zb + temps[beta] / za);
        // cross-stiffness groups
        total += lam2 * pa / (4.0 * ma * ma * pb) * zb * (za + zb) / (za * d) * temps[beta]
            - lam2 * pb / (4.0 * mb * mb * pa) * za * (za + zb) / (zb * d) * temps[alpha];
        total += lam2 * pa / (4.0 * ma * ma * pb) * (wa - wb) * temps[beta] / (za * d)
            + lam2 * pb / (4.0 * mb * mb * pa) * (wa - wb) * temps[alpha] / (zb * d);
    });
    k4 * total
}

/// W₂ contribution.
pub fn w2_term_low_t(spec: &ChainSpec, temps: &[f64], alpha: usize) -> f64 {
    let k2 = spec.kappa() * spec.kappa();
    let k4 = k2 * k2;
    let mut total = 0.0;
    for_right_partners(spec, alpha, |beta, lam_ab| {
        let (za, zb) = (spec.bath_coupling(alpha), spec.bath_coupling(beta));
        let d = d_coeff(spec, alpha, beta);
        total += lam_ab * lam_ab / (2.0 * spec.mass(alpha) * spec.mass(beta))
            * (za + zb)
            / d
            * (temps[alpha] - temps[beta]);
    });
    k4 * total
}

/// W₃ contribution; vanishes identically when M_j/m_j is uniform.
pub fn w3_term_low_t(spec: &ChainSpec, temps: &[f64], alpha: usize) -> f64 {
    let k2 = spec.kappa() * spec.kappa();
    let k4 = k2 * k2;
    let mut total = 0.0;
    for_right_partners(spec, alpha, |beta, lam_ab| {
        let (za, zb) = (spec.bath_coupling(alpha), spec.bath_coupling(beta));
        let (wa, wb) = (spec.pinning_ratio(alpha), spec.pinning_ratio(beta));
        let d = d_coeff(spec, alpha, beta);
        total -= lam_ab * lam_ab / (2.0 * spec.mass(alpha) * spec.mass(beta))
            * (wa - wb)
            / d
            * (temps[alpha] / zb + temps[beta] / za);
    });
    k4 * total
}

/// Directional graded-mass term of the rectifying convention; zero whenever
/// M_α/m_α = M_β/m_β.
pub fn graded_term(spec: &ChainSpec, temps: &[f64], alpha: usize) -> f64 {
    let k2 = spec.kappa() * spec.kappa();
    let k4 = k2 * k2;
    let mut total = 0.0;
    for_right_partners(spec, alpha, |beta, lam_ab| {
        let (wa, wb) = (spec.pinning_ratio(alpha), spec.pinning_ratio(beta));
        total -= lam_ab * lam_ab * (wa - wb) * wa * temps[beta] / d_coeff(spec, alpha, beta);
    });
    k4 * total
}

/// F_t contribution at full temperature: the exponentials of the stationary
/// covariance entries are kept instead of truncated. The exponents carry
/// κ²·C because the sine arguments carry κ and the Gaussian characteristic
/// function produces exp(−κ²(h,Ch)/2).
pub fn ft_term_full_t(spec: &ChainSpec, temps: &[f64], alpha: usize) -> f64 {
    let k2 = spec.kappa() * spec.kappa();
    let cq = |j: usize| temps[j] / spec.pinning(j);
    let mut total = 0.0;
    for_right_partners(spec, alpha, |beta, lam_ab| {
        let (za, zb) = (spec.bath_coupling(alpha), spec.bath_coupling(beta));
        let (ma, mb) = (spec.mass(alpha), spec.mass(beta));
        let (ca, cb) = (cq(alpha), cq(beta));
        for &(l, lam_al) in spec.coupling().partners(alpha) {
            let cbl = if l == beta { cb } else { 0.0 };
            total += lam_ab * lam_al * k2 / (8.0 * za * ma)
                * (-0.5 * k2 * (cb + cq(l))).exp()
                * ((-k2 * (cbl + 2.0 * ca)).exp() - (k2 * cbl).exp());
        }
        for &(l, lam_bl) in spec.coupling().partners(beta) {
            let cal = if l == alpha { ca } else { 0.0 };
            total += lam_ab * lam_bl * k2 / (8.0 * zb * mb)
                * (-0.5 * k2 * (ca + cq(l))).exp()
                * ((k2 * cal).exp() - (-k2 * (cal + 2.0 * cb)).exp());
        }
    });
    total
}

/// Per-term decomposition of the flux across the cut to the right of `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxBreakdown {
    pub ft: f64,
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    /// Directional graded-mass term; zero under [`FluxConvention::Reciprocal`].
    pub graded: f64,
}

impl FluxBreakdown {
    pub fn total(&self) -> f64 {
        self.ft + self.w1 + self.w2 + self.w3 + self.graded
    }
}

pub fn flux_breakdown(
    spec: &ChainSpec,
    temps: &[f64],
    alpha: usize,
    convention: FluxConvention,
) -> Result<FluxBreakdown> {
    check_alpha(spec, alpha)?;
    if temps.len() != spec.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: spec.n_sites(),
            got: temps.len(),
        });
    }
    Ok(FluxBreakdown {
        ft: ft_term_low_t(spec, temps, alpha),
        w1: w1_term_low_t(spec, temps, alpha),
        w2: w2_term_low_t(spec, temps, alpha),
        w3: w3_term_low_t(spec, temps, alpha),
        graded: match convention {
            FluxConvention::Rectifying => graded_term(spec, temps, alpha),
            FluxConvention::Reciprocal => 0.0,
        },
    })
}

/// Low-temperature flux F_{α→} under the given convention.
pub fn flux_low_t_with(
    spec: &ChainSpec,
    temps: &[f64],
    alpha: usize,
    convention: FluxConvention,
) -> Result<f64> {
    Ok(flux_breakdown(spec, temps, alpha, convention)?.total())
}

/// Low-temperature flux F_{α→} under the default convention.
pub fn flux_low_t(spec: &ChainSpec, temps: &[f64], alpha: usize) -> Result<f64> {
    flux_low_t_with(spec, temps, alpha, FluxConvention::default())
}

/// The linear map K with F_{α→} = Σ_j K_{α,j} T_j. Row α covers the cut to
/// the right of site α; there are N−1 rows.
#[derive(Debug, Clone)]
pub struct FluxKernel {
    convention: FluxConvention,
    matrix: Matrix,
}

impl FluxKernel {
    pub fn n_sites(&self) -> usize {
        self.matrix.cols()
    }

    pub fn convention(&self) -> FluxConvention {
        self.convention
    }

    pub fn coefficient(&self, alpha: usize, j: usize) -> f64 {
        self.matrix.get(alpha, j)
    }

    pub fn row(&self, alpha: usize) -> &[f64] {
        self.matrix.row(alpha)
    }

    /// K·T, the flux at every cut.
    pub fn flux(&self, temps: &[f64]) -> Vec<f64> {
        self.matrix.matvec(temps)
    }
}

/// Builds the kernel by evaluating the flux on unit temperature vectors.
/// Row α only touches sites within twice the coupling range of α, so the
/// construction walks a band rather than the full matrix.
pub fn flux_kernel(spec: &ChainSpec, convention: FluxConvention) -> Result<FluxKernel> {
    let n = spec.n_sites();
    if spec.coupling().is_decoupled() {
        return Err(Error::DecoupledChain);
    }
    let offset = spec.coupling().max_offset();
    let mut matrix = Matrix::zeros(n - 1, n);
    let mut unit = vec![0.0; n];
    for alpha in 0..n - 1 {
        let lo = alpha.saturating_sub(offset);
        let hi = (alpha + 2 * offset).min(n - 1);
        for j in lo..=hi {
            unit[j] = 1.0;
            let v = flux_low_t_with(spec, &unit, alpha, convention)?;
            unit[j] = 0.0;
            matrix.set(alpha, j, v);
        }
    }
    Ok(FluxKernel { convention, matrix })
}

/// The kernel split by contribution, for inspecting how each term carries
/// the temperature dependence. The five matrices sum to the total kernel.
#[derive(Debug, Clone)]
pub struct FluxTermKernels {
    pub ft: Matrix,
    pub w1: Matrix,
    pub w2: Matrix,
    pub w3: Matrix,
    pub graded: Matrix,
}

pub fn flux_term_kernels(spec: &ChainSpec, convention: FluxConvention) -> Result<FluxTermKernels> {
    let n = spec.n_sites();
    if spec.coupling().is_decoupled() {
        return Err(Error::DecoupledChain);
    }
    let offset = spec.coupling().max_offset();
    let mut out = FluxTermKernels {
        ft: Matrix::zeros(n - 1, n),
        w1: Matrix::zeros(n - 1, n),
        w2: Matrix::zeros(n - 1, n),
        w3: Matrix::zeros(n - 1, n),
        graded: Matrix::zeros(n - 1, n),
    };
    let mut unit = vec![0.0; n];
    for alpha in 0..n - 1 {
        let lo = alpha.saturating_sub(offset);
        let hi = (alpha + 2 * offset).min(n - 1);
        for j in lo..=hi {
            unit[j] = 1.0;
            let b = flux_breakdown(spec, &unit, alpha, convention)?;
            unit[j] = 0.0;
            out.ft.set(alpha, j, b.ft);
            out.w1.set(alpha, j, b.w1);
            out.w2.set(alpha, j, b.w2);
            out.w3.set(alpha, j, b.w3);
            out.graded.set(alpha, j, b.graded);
        }
    }
    Ok(out)
}
