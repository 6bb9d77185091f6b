//! Closed-form reference values for the special chains whose flux reduces to
//! a short expression. These back the regression tests and are not part of
//! the numerical pipeline.

/// A special case with a known closed-form steady-state value.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceCase {
    /// Homogeneous NN chain: F = κ⁴λ²(T_α − T_{α+1})/(2ζmM).
    HomogeneousNnFlux {
        lambda: f64,
        zeta: f64,
        mass: f64,
        pinning: f64,
        kappa: f64,
        t_left: f64,
        t_right: f64,
    },
    /// Thermal conductivity of the homogeneous NN chain: κ⁴λ²/(2ζmM).
    HomogeneousNnConductivity {
        lambda: f64,
        zeta: f64,
        mass: f64,
        pinning: f64,
        kappa: f64,
    },
    /// NN chain with per-site bath couplings:
    /// F = κ⁴λ²(T_α − T_{α+1})/(mM(ζ_α + ζ_{α+1})).
    QuasiHomogeneousFlux {
        lambda: f64,
        mass: f64,
        pinning: f64,
        kappa: f64,
        zeta_left: f64,
        zeta_right: f64,
        t_left: f64,
        t_right: f64,
    },
    /// Aggregate flux of the same chain over its full length:
    /// F = κ⁴λ²(T₁ − T_N) / (mM Σ_j (ζ_j + ζ_{j+1})).
    QuasiHomogeneousAggregate {
        lambda: f64,
        mass: f64,
        pinning: f64,
        kappa: f64,
        zetas: Vec<f64>,
        t_first: f64,
        t_last: f64,
    },
    /// Uniform-mass NNN chain, per-cut flux:
    /// F = κ⁴[λ²(T_α−T_{α+1})/(mM(ζ_α+ζ_{α+1})) + ν²(T_α−T_{α+2})/(mM(ζ_α+ζ_{α+2}))].
    NnnFlux {
        lambda: f64,
        nu: f64,
        mass: f64,
        pinning: f64,
        kappa: f64,
        zeta_a: f64,
        zeta_a1: f64,
        zeta_a2: f64,
        t_a: f64,
        t_a1: f64,
        t_a2: f64,
    },
    /// Telescoped aggregate of the uniform NNN chain (boundary bonds
    /// neglected): F ≈ κ⁴(λ² + 2ν²)(T₁ − T_N)/(2mMζ(N−1)).
    NnnAggregate {
        lambda: f64,
        nu: f64,
        mass: f64,
        pinning: f64,
        zeta: f64,
        kappa: f64,
        n_sites: usize,
        t_first: f64,
        t_last: f64,
    },
}

pub fn closed_form_reference(case: &ReferenceCase) -> f64 {
    match case {
        ReferenceCase::HomogeneousNnFlux {
            lambda,
            zeta,
            mass,
            pinning,
            kappa,
            t_left,
            t_right,
        } => {
            kappa.powi(4) * lambda * lambda * (t_left - t_right) / (2.0 * zeta * mass * pinning)
        }
        ReferenceCase::HomogeneousNnConductivity {
            lambda,
            zeta,
            mass,
            pinning,
            kappa,
        } => kappa.powi(4) * lambda * lambda / (2.0 * zeta * mass * pinning),
        ReferenceCase::QuasiHomogeneousFlux {
            lambda,
            mass,
            pinning,
            kappa,
            zeta_left,
            zeta_right,
            t_left,
            t_right,
        } => {
            kappa.powi(4) * lambda * lambda * (t_left - t_right)
                / (mass * pinning * (zeta_left + zeta_right))
        }
        ReferenceCase::QuasiHomogeneousAggregate {
            lambda,
            mass,
            pinning,
            kappa,
            zetas,
            t_first,
            t_last,
        } => {
            let denom: f64 = zetas.windows(2).map(|w| w[0] + w[1]).sum();
            kappa.powi(4) * lambda * lambda * (t_first - t_last) / (mass * pinning * denom)
        }
        ReferenceCase::NnnFlux {
            lambda,
            nu,
            mass,
            pinning,
            kappa,
            zeta_a,
            zeta_a1,
            zeta_a2,
            t_a,
            t_a1,
            t_a2,
        } => {
            kappa.powi(4)
                * (lambda * lambda * (t_a - t_a1) / (mass * pinning * (zeta_a + zeta_a1))
                    + nu * nu * (t_a - t_a2) / (mass * pinning * (zeta_a + zeta_a2)))
        }
        ReferenceCase::NnnAggregate {
            lambda,
            nu,
            mass,
            pinning,
            zeta,
            kappa,
            n_sites,
            t_first,
            t_last,
        } => {
            kappa.powi(4) * (lambda * lambda + 2.0 * nu * nu) * (t_first - t_last)
                / (2.0 * mass * pinning * zeta * (*n_sites as f64 - 1.0))
        }
    }
}
