use std::str::FromStr;

use jtd_core::dynamics::{ramp_from_vacuum, RampOptions as Evolution, RampSchedule, RampShape};
use jtd_core::exact_diag::SolverOptions;
use jtd_core::mean_field::critical_coupling;
use jtd_core::ModelParams;

use super::{require, Outcome};
use crate::args::RampOptions;
use crate::config;
use crate::error::{CliError, CliResult};
use crate::output::{format_float, Provenance, Table};

pub const COLUMNS: [&str; 6] = ["t", "lambda", "norm", "energy", "fidelity_instantaneous", "gap"];

pub fn run(opts: RampOptions) -> CliResult<Outcome> {
    let n_ions = require(opts.n_ions, "n_ions")?;
    let omega = opts.omega.unwrap_or(1.0);
    let omega0 = opts.omega0.unwrap_or(1.0);
    let total = require(opts.total_time, "T")?;
    let dt = opts.dt.unwrap_or(total / 1000.0);
    let shape = RampShape::from_str(opts.shape.as_deref().unwrap_or("linear"))
        .map_err(|e| CliError::config(format!("shape: {e}")))?;
    let out = require(opts.out.clone(), "out")?;
    let params = ModelParams::new(omega, omega0, 0.0, n_ions, opts.n_max.unwrap_or(20))?;
    let scale = if opts.relative.unwrap_or(false) {
        critical_coupling(omega, omega0)
    } else {
        1.0
    };
    let start = opts.lambda_start.unwrap_or(0.0) * scale;
    let end = require(opts.lambda_end, "lambda_end")? * scale;
    let schedule = RampSchedule::new(start, end, total, shape, dt)?;
    let evolution = Evolution {
        solver: SolverOptions::default().with_seed(opts.seed.unwrap_or(0)),
        sample_every: opts.sample_every.unwrap_or(10),
        ..Evolution::default()
    };
    let result = ramp_from_vacuum(&params, &schedule, &evolution)?;

    let mut table = Table::new(&COLUMNS);
    for s in &result.samples {
        table.push(vec![
            s.t.into(),
            s.lambda.into(),
            s.norm.into(),
            s.energy.into(),
            s.fidelity_instantaneous.into(),
            s.gap.into(),
        ]);
    }
    let mut hashed = opts.clone();
    hashed.out = None;
    let prov = Provenance::new("ramp", config::fingerprint(&hashed))
        .note(format!("final fidelity = {}", format_float(result.fidelity)))
        .note(format!("minimum sampled gap = {}", format_float(result.min_gap)))
        .note(format!("norm drift = {}", format_float(result.norm_drift)));
    table.write(&out, &prov)?;
    Ok(Outcome {
        summary: format!(
            "fidelity {:.6} (diabatic error {:.3e}), min gap {:.6}, {} samples written to {}",
            result.fidelity,
            result.diabatic_error,
            result.min_gap,
            result.samples.len(),
            out.display()
        ),
        warnings: Vec::new(),
    })
}
