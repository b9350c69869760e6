//! Laboratory quantities → model couplings, and the rotating-wave checks.
//!
//! All frequencies are angular (rad/s).

use crate::error::{invalid, Result};
use crate::ion_chain::ChainSpectrum;

pub const HBAR: f64 = 1.054_571_817e-34;
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Mass of ⁴⁰Ca⁺ (atomic mass minus one electron).
pub const CA40_ION_MASS: f64 = 39.962_590_863 * ATOMIC_MASS_UNIT - 9.109_383_701_5e-31;

/// Default bound for the "≪" conditions.
pub const DEFAULT_RWA_THRESHOLD: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabConfig {
    /// Ion mass in kg.
    pub mass: f64,
    pub omega_r: f64,
    pub omega_z: f64,
    /// Qubit splitting ω̃₀.
    pub qubit_splitting: f64,
    /// Magnetic dipole moment in J/T.
    pub mu: f64,
    /// Field gradient in T/m.
    pub b_gradient: f64,
    /// Model phonon detuning ω.
    pub omega_detuning: f64,
    /// Model spin detuning ω₀.
    pub omega0_detuning: f64,
}

impl LabConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mass", self.mass),
            ("omega_r", self.omega_r),
            ("omega_z", self.omega_z),
            ("qubit_splitting", self.qubit_splitting),
            ("mu", self.mu),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        for (name, v) in [
            ("b_gradient", self.b_gradient),
            ("omega_detuning", self.omega_detuning),
            ("omega0_detuning", self.omega0_detuning),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(name, format!("must be non-negative and finite, got {v}")));
            }
        }
        if self.omega_z >= self.omega_r {
            return Err(invalid(
                "omega_z",
                format!("axial frequency {} must be below the radial {}", self.omega_z, self.omega_r),
            ));
        }
        Ok(())
    }

    pub fn aspect(&self) -> f64 {
        self.omega_z / self.omega_r
    }

    /// Ground-state size of the c.m. mode, `√(ħ / 2Mω_r)`, in metres.
    pub fn q0(&self) -> f64 {
        (HBAR / (2.0 * self.mass * self.omega_r)).sqrt()
    }

    /// `ω_c.m − ω_roc = ω_r (1 − √(1 − (ω_z/ω_r)²))`
    pub fn cm_rocking_gap(&self) -> f64 {
        cm_rocking_gap(self.omega_r, self.aspect())
    }
}

pub fn cm_rocking_gap(omega_r: f64, aspect: f64) -> f64 {
    omega_r * (1.0 - (1.0 - aspect * aspect).sqrt())
}

/// `|μ| q₀ b / √2` converted to rad/s.
pub fn coupling_strength(config: &LabConfig) -> Result<f64> {
    config.validate()?;
    Ok(config.mu.abs() * config.q0() * config.b_gradient / (2f64.sqrt() * HBAR))
}

/// Blue and red sideband drives `(ω̃₀ − ω₀) ± (ω_c.m − ω)`.
pub fn drive_frequencies(config: &LabConfig) -> Result<(f64, f64)> {
    config.validate()?;
    let carrier = config.qubit_splitting - config.omega0_detuning;
    let side = config.omega_r - config.omega_detuning;
    Ok((carrier + side, carrier - side))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwaReport {
    pub lambda: f64,
    /// `max_n ω_n / ω̃₀`
    pub ratio_modes: f64,
    /// `max(λ, ω, ω₀) / (ω_c.m − ω_roc)`
    pub ratio_couplings: f64,
    pub cm_rocking_gap: f64,
    /// The same gap read off the chain spectrum.
    pub cm_rocking_gap_chain: f64,
    pub threshold: f64,
    pub pass: bool,
}

pub fn validate_rwa(config: &LabConfig, chain: &ChainSpectrum, threshold: f64) -> Result<RwaReport> {
    config.validate()?;
    if !(threshold > 0.0) {
        return Err(invalid("threshold", format!("must be positive, got {threshold}")));
    }
    let a = config.aspect();
    if chain.kappa.len() < 2 || (chain.kappa[1] - (1.0 - a * a)).abs() > 1e-6 {
        return Err(invalid("chain", "spectrum was computed for a different trap aspect ratio"));
    }
    let lambda = coupling_strength(config)?;
    let max_mode = chain
        .kappa
        .iter()
        .filter(|k| **k >= 0.0)
        .fold(0.0f64, |m, k| m.max(k.sqrt()))
        * config.omega_r;
    let gap = config.cm_rocking_gap();
    let gap_chain = config.omega_r * (chain.kappa[0].sqrt() - chain.kappa[1].max(0.0).sqrt());
    let biggest = lambda.max(config.omega_detuning).max(config.omega0_detuning);
    let ratio_couplings = if gap > 0.0 { biggest / gap } else { f64::INFINITY };
    let ratio_modes = max_mode / config.qubit_splitting;
    Ok(RwaReport {
        lambda,
        ratio_modes,
        ratio_couplings,
        cm_rocking_gap: gap,
        cm_rocking_gap_chain: gap_chain,
        threshold,
        pass: ratio_modes < threshold && ratio_couplings < threshold,
    })
}

/// Same check when λ is given directly instead of through μ and b.
pub fn coupling_ratio(lambda: f64, omega: f64, omega0: f64, gap: f64) -> f64 {
    let biggest = lambda.max(omega).max(omega0);
    if gap > 0.0 {
        biggest / gap
    } else {
        f64::INFINITY
    }
}
