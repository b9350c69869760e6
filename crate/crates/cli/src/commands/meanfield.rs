use jtd_core::mean_field::{critical_coupling, order_parameters, solve, MeanFieldParams};

use super::{couplings, require, Outcome};
use crate::args::MeanFieldOptions;
use crate::config;
use crate::error::CliResult;
use crate::output::{Field, Provenance, Table};

pub const COLUMNS: [&str; 11] = [
    "lambda",
    "phase",
    "s",
    "eps1",
    "eps2",
    "eps3",
    "e_ground_per_j",
    "n_over_j",
    "coherence_over_j2",
    "x0_over_q0",
    "y0_over_q0",
];

pub fn row(omega: f64, omega0: f64, lambda: f64, phi: f64, j: f64) -> CliResult<Vec<Field>> {
    let p = MeanFieldParams::new(omega, omega0, lambda)?;
    let sol = solve(&p, phi)?;
    let obs = order_parameters(&p, phi)?;
    let (x0, y0) = obs.displacement_over_q0(j);
    Ok(vec![
        lambda.into(),
        sol.phase.label().into(),
        sol.s.into(),
        sol.epsilon[0].into(),
        sol.epsilon[1].into(),
        sol.epsilon[2].into(),
        sol.e_ground_per_j.into(),
        obs.n_over_j.into(),
        obs.coherence_over_j2.into(),
        x0.into(),
        y0.into(),
    ])
}

pub fn run(opts: MeanFieldOptions) -> CliResult<Outcome> {
    let omega = opts.omega.unwrap_or(1.0);
    let omega0 = opts.omega0.unwrap_or(1.0);
    let phi = opts.phi.unwrap_or(0.0);
    let n_ions = opts.n_ions.unwrap_or(10);
    let out = require(opts.out.clone(), "out")?;
    MeanFieldParams::new(omega, omega0, 0.0)?;
    let lc = critical_coupling(omega, omega0);
    let grid = couplings(opts.lambda, opts.lambda_sweep.as_deref(), opts.relative.unwrap_or(false), lc)?;

    let mut table = Table::new(&COLUMNS);
    for l in &grid {
        table.push(row(omega, omega0, *l, phi, n_ions as f64 / 2.0)?);
    }
    let mut hashed = opts.clone();
    hashed.out = None;
    let prov = Provenance::new("meanfield", config::fingerprint(&hashed))
        .note(format!("lambda_c = {}", crate::output::format_float(lc)))
        .note(format!("x0, y0 scaled with j = {}", n_ions as f64 / 2.0));
    table.write(&out, &prov)?;
    Ok(Outcome {
        summary: format!("{} couplings (λ_c = {lc:.6}) written to {}", grid.len(), out.display()),
        warnings: Vec::new(),
    })
}
