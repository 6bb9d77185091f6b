//! Gaussian moment identities used by the flux expansion. For a zero-mean
//! Gaussian vector φ with covariance Σ,
//!
//! ```text
//! ⟨exp(iκ(h,φ))⟩       = exp(−κ²(h,Σh)/2)
//! ⟨φ_a exp(iκ(h,φ))⟩   = iκ (Σh)_a exp(−κ²(h,Σh)/2)
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// ⟨φ_a e^{iκ(h,φ)}⟩ for `linear_index = Some(a)`, or the characteristic
/// function ⟨e^{iκ(h,φ)}⟩ for `None`.
pub fn gaussian_moment(
    covariance: &Matrix,
    kappa: f64,
    linear_index: Option<usize>,
    phase: &[f64],
) -> Result<Complex64> {
    let n = covariance.rows();
    if covariance.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: covariance.cols(),
        });
    }
    if phase.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: phase.len(),
        });
    }
    if let Some(a) = linear_index {
        if a >= n {
            return Err(Error::SiteOutOfRange { index: a, n_sites: n });
        }
    }
    let sigma_h = covariance.matvec(phase);
    let quad: f64 = phase.iter().zip(&sigma_h).map(|(h, s)| h * s).sum();
    let envelope = (-0.5 * kappa * kappa * quad).exp();
    Ok(match linear_index {
        None => Complex64::new(envelope, 0.0),
        Some(a) => Complex64::new(0.0, kappa * sigma_h[a] * envelope),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_phase_vector() {
        let mut sigma = Matrix::zeros(3, 3);
        for i in 0..3 {
            sigma.set(i, i, 0.5 + i as f64);
        }
        let h = [0.0; 3];
        // centered Gaussian: any linear moment vanishes, characteristic function is 1
        let m = gaussian_moment(&sigma, 1.0, Some(1), &h).unwrap();
        assert_eq!(m, Complex64::new(0.0, 0.0));
        let c = gaussian_moment(&sigma, 1.0, None, &h).unwrap();
        assert_eq!(c, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn scalar_characteristic_function() {
        let mut sigma = Matrix::zeros(1, 1);
        sigma.set(0, 0, 0.7);
        let kappa = 1.3;
        let c = gaussian_moment(&sigma, kappa, None, &[1.0]).unwrap();
        assert!((c.re - (-0.5 * kappa * kappa * 0.7f64).exp()).abs() < 1e-15);
        assert_eq!(c.im, 0.0);
    }

    #[test]
    fn block_diagonal_cross_moment_vanishes() {
        // diag(T/M, mT) phase-space covariance: cross block zero, so the
        // moment of a momentum entry against a position phase is purely the
        // vanishing cross covariance
        let n = 4; // two sites, phase space dim 4
        let mut sigma = Matrix::zeros(n, n);
        sigma.set(0, 0, 0.2);
        sigma.set(1, 1, 0.3);
        sigma.set(2, 2, 0.2);
        sigma.set(3, 3, 0.4);
        let mut h = vec![0.0; n];
        h[0] = 1.0; // position phase on site 0
        let m = gaussian_moment(&sigma, 1.0, Some(2), &h).unwrap();
        assert_eq!(m.re, 0.0);
        assert!(m.im.abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let sigma = Matrix::zeros(2, 2);
        assert!(gaussian_moment(&sigma, 1.0, None, &[1.0]).is_err());
        assert!(gaussian_moment(&sigma, 1.0, Some(5), &[1.0, 0.0]).is_err());
    }
}
