use std::f64::consts::PI;

use jtd_core::ion_chain::{radial_spectrum, ChainConfig};
use jtd_core::lab_params::{
    drive_frequencies, validate_rwa, LabConfig, RwaReport, ATOMIC_MASS_UNIT, BOHR_MAGNETON, CA40_ION_MASS,
    DEFAULT_RWA_THRESHOLD,
};

use super::Outcome;
use crate::args::LabOptions;
use crate::config;
use crate::error::CliResult;
use crate::output::{Provenance, Table};

pub const COLUMNS: [&str; 10] = [
    "lambda",
    "cm_rocking_gap",
    "cm_rocking_gap_chain",
    "ratio_modes",
    "ratio_couplings",
    "nu_b",
    "nu_r",
    "threshold",
    "pass",
    "units",
];

#[derive(Debug, Clone, PartialEq)]
pub struct LabSummary {
    pub config: LabConfig,
    pub report: RwaReport,
    pub nu_b: f64,
    pub nu_r: f64,
    /// Divide angular results by this to get the input units back.
    pub unit_scale: f64,
}

pub fn evaluate(opts: &LabOptions) -> CliResult<LabSummary> {
    let unit_scale = if opts.angular.unwrap_or(false) { 1.0 } else { 2.0 * PI };
    let f = |v: Option<f64>, default: f64| v.unwrap_or(default) * unit_scale;
    let config = LabConfig {
        mass: opts.mass_amu.unwrap_or(CA40_ION_MASS / ATOMIC_MASS_UNIT) * ATOMIC_MASS_UNIT,
        omega_r: f(opts.omega_r, 2e6),
        omega_z: f(opts.omega_z, 0.4e6),
        qubit_splitting: f(opts.qubit_splitting, 20e6),
        mu: opts.mu_bohr.unwrap_or(1.0) * BOHR_MAGNETON,
        b_gradient: opts.b_gradient.unwrap_or(25.0),
        omega_detuning: f(opts.omega, 4e3),
        omega0_detuning: f(opts.omega0, 4e3),
    };
    config.validate()?;
    let chain = radial_spectrum(&ChainConfig::new(opts.n_ions.unwrap_or(10), config.aspect())?)?;
    let report = validate_rwa(&config, &chain, opts.threshold.unwrap_or(DEFAULT_RWA_THRESHOLD))?;
    let (nu_b, nu_r) = drive_frequencies(&config)?;
    Ok(LabSummary {
        config,
        report,
        nu_b,
        nu_r,
        unit_scale,
    })
}

pub fn run(opts: LabOptions) -> CliResult<Outcome> {
    let s = evaluate(&opts)?;
    let r = &s.report;
    let u = s.unit_scale;
    let units = if u == 1.0 { "rad/s" } else { "Hz" };
    let summary = format!(
        "coupling λ            {:.6e} {units}\n\
         c.m.-rocking gap      {:.6e} {units} (chain: {:.6e})\n\
         max ω_n / ω̃₀         {:.4} (< {})\n\
         max(λ,ω,ω₀) / gap     {:.4} (< {})\n\
         drives ν_b, ν_r       {:.6e}, {:.6e} {units}\n\
         rotating-wave regime  {}",
        r.lambda / u,
        r.cm_rocking_gap / u,
        r.cm_rocking_gap_chain / u,
        r.ratio_modes,
        r.threshold,
        r.ratio_couplings,
        r.threshold,
        s.nu_b / u,
        s.nu_r / u,
        if r.pass { "valid" } else { "NOT valid" },
    );
    if let Some(out) = &opts.out {
        let mut table = Table::new(&COLUMNS);
        table.push(vec![
            (r.lambda / u).into(),
            (r.cm_rocking_gap / u).into(),
            (r.cm_rocking_gap_chain / u).into(),
            r.ratio_modes.into(),
            r.ratio_couplings.into(),
            (s.nu_b / u).into(),
            (s.nu_r / u).into(),
            r.threshold.into(),
            r.pass.into(),
            units.into(),
        ]);
        let mut hashed = opts.clone();
        hashed.out = None;
        table.write(out, &Provenance::new("lab", config::fingerprint(&hashed)))?;
    }
    Ok(Outcome {
        summary,
        warnings: Vec::new(),
    })
}
