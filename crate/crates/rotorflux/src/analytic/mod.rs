//! Analytic steady-state machinery: Ornstein–Uhlenbeck covariances for the
//! decoupled chain, Gaussian moment identities, the low-temperature flux
//! terms, and closed-form reference cases.

mod closed_form;
mod flux;
mod gaussian;
mod ou;

pub use closed_form::{closed_form_reference, ReferenceCase};
pub use flux::{
    d_coeff, flux_breakdown, flux_kernel, flux_low_t, flux_low_t_with, flux_term_kernels,
    ft_term_full_t, ft_term_low_t, graded_term, w1_term_low_t, w2_term_low_t, w3_term_low_t,
    FluxBreakdown, FluxConvention, FluxKernel, FluxTermKernels,
};
pub use gaussian::gaussian_moment;
pub use ou::{
    site_propagator, site_propagator_params, stationary_covariance, SitePropagatorParams,
    StationaryCovariance,
};
