//! Chain definitions: site parameters, symmetric coupling matrices with the
//! nearest-neighbor (NN) and next-nearest-neighbor (NNN) presets, graded mass
//! construction, and the dimensionless rescaling that fixes the NN coupling,
//! the uniform pinning, and the first mass to one.

use crate::error::{Error, Result};

/// Symmetric interparticle coupling strengths λ_{j,l}, stored sparsely as
/// per-site partner lists. Diagonal entries are always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    n: usize,
    partners: Vec<Vec<(usize, f64)>>,
}

impl CouplingMatrix {
    /// Homogeneous NN coupling: λ_{j,l} = lambda iff |j−l| = 1.
    pub fn nn(n: usize, lambda: f64) -> Self {
        let mut pairs = Vec::new();
        for j in 0..n.saturating_sub(1) {
            pairs.push((j, j + 1, lambda));
        }
        Self::from_pairs(n, &pairs).expect("NN preset is always well formed")
    }

    /// NN coupling `lambda` plus NNN coupling `nu` at |j−l| = 2. `nu` may be
    /// negative.
    pub fn nnn(n: usize, lambda: f64, nu: f64) -> Self {
        let mut pairs = Vec::new();
        for j in 0..n.saturating_sub(1) {
            pairs.push((j, j + 1, lambda));
        }
        if nu != 0.0 {
            for j in 0..n.saturating_sub(2) {
                pairs.push((j, j + 2, nu));
            }
        }
        Self::from_pairs(n, &pairs).expect("NNN preset is always well formed")
    }

    /// General symmetric coupling from (j, l, λ) triples; each unordered pair
    /// may appear once. Zero entries are dropped.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize, f64)]) -> Result<Self> {
        let mut partners = vec![Vec::new(); n];
        for &(j, l, v) in pairs {
            if j >= n {
                return Err(Error::SiteOutOfRange { index: j, n_sites: n });
            }
            if l >= n {
                return Err(Error::SiteOutOfRange { index: l, n_sites: n });
            }
            if j == l {
                return Err(Error::invalid("coupling", format!("self-coupling at site {j}")));
            }
            if partners[j].iter().any(|&(p, _)| p == l) {
                return Err(Error::invalid(
                    "coupling",
                    format!("duplicate coupling entry for pair ({j}, {l})"),
                ));
            }
            if v != 0.0 {
                partners[j].push((l, v));
                partners[l].push((j, v));
            }
        }
        for list in &mut partners {
            list.sort_unstable_by_key(|&(p, _)| p);
        }
        Ok(CouplingMatrix { n, partners })
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    /// λ_{j,l}; zero for absent pairs and for j = l.
    pub fn get(&self, j: usize, l: usize) -> f64 {
        self.partners
            .get(j)
            .and_then(|list| list.iter().find(|&&(p, _)| p == l))
            .map_or(0.0, |&(_, v)| v)
    }

    /// Sites coupled to `j`, with strengths, ordered by site index.
    pub fn partners(&self, j: usize) -> &[(usize, f64)] {
        &self.partners[j]
    }

    pub fn is_decoupled(&self) -> bool {
        self.partners.iter().all(|list| list.is_empty())
    }

    /// Largest |j − l| over nonzero entries.
    pub fn max_offset(&self) -> usize {
        self.partners
            .iter()
            .enumerate()
            .flat_map(|(j, list)| list.iter().map(move |&(l, _)| l.abs_diff(j)))
            .max()
            .unwrap_or(0)
    }

    /// All couplings multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let partners = self
            .partners
            .iter()
            .map(|list| list.iter().map(|&(p, v)| (p, v * factor)).collect())
            .collect();
        CouplingMatrix { n: self.n, partners }
    }

    /// The uniform |j−l| = 1 coupling strength, if every adjacent pair carries
    /// the same nonzero value.
    pub fn uniform_nn_strength(&self) -> Option<f64> {
        if self.n < 2 {
            return None;
        }
        let first = self.get(0, 1);
        if first == 0.0 {
            return None;
        }
        for j in 0..self.n - 1 {
            if (self.get(j, j + 1) - first).abs() > 1e-12 * first.abs() {
                return None;
            }
        }
        Some(first)
    }
}

/// Full physical description of a chain: masses m_j, on-site pinning M_j,
/// bath couplings ζ_j, the sine-argument scale κ, and the coupling matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    masses: Vec<f64>,
    pinning: Vec<f64>,
    bath_coupling: Vec<f64>,
    kappa: f64,
    coupling: CouplingMatrix,
}

fn check_positive(name: &'static str, values: &[f64]) -> Result<()> {
    for (j, &v) in values.iter().enumerate() {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::invalid(name, format!("site {j}: {v} must be > 0")));
        }
    }
    Ok(())
}

impl ChainSpec {
    pub fn new(
        masses: Vec<f64>,
        pinning: Vec<f64>,
        bath_coupling: Vec<f64>,
        kappa: f64,
        coupling: CouplingMatrix,
    ) -> Result<Self> {
        let n = masses.len();
        if n < 2 {
            return Err(Error::invalid("n_sites", format!("{n} < 2")));
        }
        for (name, len) in [("pinning", pinning.len()), ("bath_coupling", bath_coupling.len())] {
            if len != n {
                let _ = name;
                return Err(Error::DimensionMismatch { expected: n, got: len });
            }
        }
        if coupling.n_sites() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: coupling.n_sites(),
            });
        }
        check_positive("masses", &masses)?;
        check_positive("pinning", &pinning)?;
        check_positive("bath_coupling", &bath_coupling)?;
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::invalid("kappa", format!("{kappa} must be > 0")));
        }
        Ok(ChainSpec {
            masses,
            pinning,
            bath_coupling,
            kappa,
            coupling,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.masses.len()
    }

    #[inline]
    pub fn mass(&self, j: usize) -> f64 {
        self.masses[j]
    }

    #[inline]
    pub fn pinning(&self, j: usize) -> f64 {
        self.pinning[j]
    }

    #[inline]
    pub fn bath_coupling(&self, j: usize) -> f64 {
        self.bath_coupling[j]
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn coupling(&self) -> &CouplingMatrix {
        &self.coupling
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn pinnings(&self) -> &[f64] {
        &self.pinning
    }

    pub fn bath_couplings(&self) -> &[f64] {
        &self.bath_coupling
    }

    /// M_j / m_j, the squared single-site frequency.
    #[inline]
    pub fn pinning_ratio(&self, j: usize) -> f64 {
        self.pinning[j] / self.masses[j]
    }

    /// Checks a temperature vector against this chain.
    pub fn check_temperatures(&self, temps: &[f64]) -> Result<()> {
        if temps.len() != self.n_sites() {
            return Err(Error::DimensionMismatch {
                expected: self.n_sites(),
                got: temps.len(),
            });
        }
        check_positive("temperatures", temps)
    }
}

/// Homogeneous chain with NN coupling only.
pub fn build_nn_chain(
    n: usize,
    mass: f64,
    pinning: f64,
    zeta: f64,
    lambda: f64,
    kappa: f64,
) -> Result<ChainSpec> {
    if n < 2 {
        return Err(Error::invalid("n_sites", format!("{n} < 2 for an NN chain")));
    }
    if !(lambda > 0.0) {
        return Err(Error::invalid("lambda", format!("{lambda} must be > 0")));
    }
    ChainSpec::new(
        vec![mass; n],
        vec![pinning; n],
        vec![zeta; n],
        kappa,
        CouplingMatrix::nn(n, lambda),
    )
}

/// Homogeneous chain with NN coupling `lambda` and NNN coupling `nu` (any sign).
pub fn build_nnn_chain(
    n: usize,
    mass: f64,
    pinning: f64,
    zeta: f64,
    lambda: f64,
    nu: f64,
    kappa: f64,
) -> Result<ChainSpec> {
    if nu != 0.0 && n < 3 {
        return Err(Error::invalid("n_sites", format!("{n} < 3 with nonzero NNN coupling")));
    }
    if n < 2 {
        return Err(Error::invalid("n_sites", format!("{n} < 2")));
    }
    if !(lambda > 0.0) {
        return Err(Error::invalid("lambda", format!("{lambda} must be > 0")));
    }
    if !nu.is_finite() {
        return Err(Error::invalid("nu", format!("{nu} must be finite")));
    }
    ChainSpec::new(
        vec![mass; n],
        vec![pinning; n],
        vec![zeta; n],
        kappa,
        CouplingMatrix::nnn(n, lambda, nu),
    )
}

/// Linearly graded masses, m_j = [(N−j)·m1 + (j−1)·mN] / (N−1) for j = 1..N.
pub fn graded_masses(n: usize, m1: f64, mn: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::invalid("n_sites", format!("{n} < 2")));
    }
    if !(m1 > 0.0) || !(mn > 0.0) {
        return Err(Error::invalid("masses", format!("m1 = {m1}, mN = {mn} must be > 0")));
    }
    let nm1 = (n - 1) as f64;
    Ok((1..=n)
        .map(|j| ((n - j) as f64 * m1 + (j - 1) as f64 * mn) / nm1)
        .collect())
}

/// Record of the rescaling to dimensionless units: energies by the NN
/// coupling, masses by m₁, times by the pinning frequency ω = sqrt(M/m₁).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessScaling {
    /// NN coupling strength λ (energy scale).
    pub energy: f64,
    /// First mass m₁ (mass scale).
    pub mass: f64,
    /// ω = sqrt(M/m₁) (inverse time scale).
    pub frequency: f64,
}

impl DimensionlessScaling {
    pub fn identity() -> Self {
        DimensionlessScaling {
            energy: 1.0,
            mass: 1.0,
            frequency: 1.0,
        }
    }

    /// q̂ = position_factor · q, with position_factor = sqrt(mω²/λ).
    pub fn position_factor(&self) -> f64 {
        (self.mass * self.frequency * self.frequency / self.energy).sqrt()
    }

    /// p̂ = momentum_factor · p, with momentum_factor = 1/sqrt(mλ).
    pub fn momentum_factor(&self) -> f64 {
        1.0 / (self.mass * self.energy).sqrt()
    }

    /// κ̂ = kappa_factor · κ; the inverse of the position factor, so κ̂q̂ = κq.
    pub fn kappa_factor(&self) -> f64 {
        1.0 / self.position_factor()
    }

    /// τ = time_factor · t.
    pub fn time_factor(&self) -> f64 {
        self.frequency
    }

    /// T̂ = temperature_factor · T.
    pub fn temperature_factor(&self) -> f64 {
        1.0 / self.energy
    }

    /// Heat currents carry energy per time: F̂ = F / (λω).
    pub fn flux_factor(&self) -> f64 {
        1.0 / (self.energy * self.frequency)
    }
}

/// Rescales a physical chain and its bath temperatures to dimensionless units
/// with λ̂ = 1, M̂ = 1, m̂₁ = 1. Requires uniform pinning and a uniform NN
/// coupling to define the scales.
pub fn nondimensionalize(
    spec: &ChainSpec,
    temps: &[f64],
) -> Result<(ChainSpec, Vec<f64>, DimensionlessScaling)> {
    spec.check_temperatures(temps)?;
    let pinning = spec.pinning(0);
    for j in 1..spec.n_sites() {
        if (spec.pinning(j) - pinning).abs() > 1e-12 * pinning {
            return Err(Error::NonUniformPinning { site: j });
        }
    }
    let lambda = spec.coupling().uniform_nn_strength().ok_or_else(|| {
        Error::invalid(
            "coupling",
            "a uniform nonzero |j-l| = 1 coupling is needed as the energy scale",
        )
    })?;
    if !(lambda > 0.0) {
        return Err(Error::invalid("lambda", format!("{lambda} must be > 0")));
    }
    let mass = spec.mass(0);
    let scaling = DimensionlessScaling {
        energy: lambda,
        mass,
        frequency: (pinning / mass).sqrt(),
    };
    let n = spec.n_sites();
    let scaled = ChainSpec::new(
        spec.masses().iter().map(|m| m / mass).collect(),
        vec![1.0; n],
        spec.bath_couplings()
            .iter()
            .map(|z| z / scaling.frequency)
            .collect(),
        spec.kappa() * scaling.kappa_factor(),
        spec.coupling().scaled(1.0 / lambda),
    )?;
    let scaled_temps = temps.iter().map(|t| t * scaling.temperature_factor()).collect();
    Ok((scaled, scaled_temps, scaling))
}

/// Inverse of [`nondimensionalize`].
pub fn redimensionalize(
    spec: &ChainSpec,
    temps: &[f64],
    scaling: &DimensionlessScaling,
) -> Result<(ChainSpec, Vec<f64>)> {
    spec.check_temperatures(temps)?;
    let m = scaling.mass;
    let big_m = scaling.mass * scaling.frequency * scaling.frequency;
    let restored = ChainSpec::new(
        spec.masses().iter().map(|v| v * m).collect(),
        spec.pinnings().iter().map(|v| v * big_m).collect(),
        spec.bath_couplings()
            .iter()
            .map(|v| v * scaling.frequency)
            .collect(),
        spec.kappa() / scaling.kappa_factor(),
        spec.coupling().scaled(scaling.energy),
    )?;
    let restored_temps = temps.iter().map(|t| t / scaling.temperature_factor()).collect();
    Ok((restored, restored_temps))
}
