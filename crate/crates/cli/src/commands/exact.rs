use jtd_core::exact_diag::{
    global_ground, observables, truncation_sweep, ChargeWindow, EdgePolicy, GlobalGround, SolverOptions,
};
use jtd_core::hilbert::enumerate_sector;
use jtd_core::mean_field::critical_coupling;
use jtd_core::{Charge, ModelParams};

use super::{couplings, require, Context, Outcome};
use crate::args::ExactOptions;
use crate::config;
use crate::error::{CliError, CliResult};
use crate::output::{Field, Provenance, Table};
use crate::sweep::{map_ordered, parse_window};

pub const COLUMNS: [&str; 8] = [
    "lambda",
    "C_min",
    "E0",
    "mean_phonons_over_j",
    "jz_over_j",
    "spin_coherence_over_j2",
    "n_max",
    "converged",
];

/// Growth of the phonon cutoff in automatic mode.
pub const N_MAX_STEP: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub start: u32,
    pub auto: bool,
    pub limit: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSpec {
    pub two_j: u32,
    pub omega: f64,
    pub omega0: f64,
    pub lambda: f64,
    pub cutoff: Cutoff,
    /// `None` selects the default window for each cutoff.
    pub window: Option<(f64, f64)>,
    pub policy: EdgePolicy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactPoint {
    pub lambda: f64,
    pub charge: Charge,
    pub energy: f64,
    pub mean_phonons_over_j: f64,
    pub jz_over_j: f64,
    pub spin_coherence_over_j2: f64,
    pub n_max: u32,
    pub converged: bool,
    pub warning: Option<String>,
}

impl ExactPoint {
    pub fn fields(&self) -> Vec<Field> {
        vec![
            self.lambda.into(),
            Field::Text(self.charge.to_string()),
            self.energy.into(),
            self.mean_phonons_over_j.into(),
            self.jz_over_j.into(),
            self.spin_coherence_over_j2.into(),
            self.n_max.into(),
            self.converged.into(),
        ]
    }
}

fn window_for(spec: &PointSpec, params: &ModelParams) -> CliResult<ChargeWindow> {
    match spec.window {
        Some((lo, hi)) => Ok(ChargeWindow::new(lo, hi)?),
        None => Ok(ChargeWindow::default_for(params)),
    }
}

fn ground_at(spec: &PointSpec, n_max: u32, opts: &SolverOptions) -> CliResult<(ModelParams, GlobalGround)> {
    let params = ModelParams::new(spec.omega, spec.omega0, spec.lambda, spec.two_j, n_max)?;
    let g = global_ground(&params, window_for(spec, &params)?, spec.policy, opts)?;
    Ok((params, g))
}

/// Ground state over the charge window, with the cutoff either fixed (and
/// checked against `n_max − 4` in the winning sector) or raised until the
/// energy settles to the solver's relative tolerance.
pub fn solve_point(spec: &PointSpec, opts: &SolverOptions) -> CliResult<ExactPoint> {
    let c = spec.cutoff;
    let (params, g, converged) = if c.auto {
        if c.limit < c.start {
            return Err(CliError::config(format!(
                "n_max_limit {} is below the starting n_max {}",
                c.limit, c.start
            )));
        }
        let (mut params, mut g) = ground_at(spec, c.start, opts)?;
        let mut converged = false;
        let mut n = c.start;
        while n + N_MAX_STEP <= c.limit {
            n += N_MAX_STEP;
            let (p2, g2) = ground_at(spec, n, opts)?;
            let diff = (g2.best.energy - g.best.energy).abs();
            params = p2;
            g = g2;
            if diff <= opts.rel_tol * g.best.energy.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        (params, g, converged)
    } else {
        let (params, g) = ground_at(spec, c.start, opts)?;
        let converged = if c.start >= 2 {
            let lower = c.start.saturating_sub(4).max(1);
            truncation_sweep(&params, g.best.charge, &[lower, c.start], opts)?.converged
        } else {
            false
        };
        (params, g, converged)
    };
    let sector = enumerate_sector(&params, g.best.charge);
    let obs = observables(&g.best, &sector)?;
    let j = params.j();
    Ok(ExactPoint {
        lambda: spec.lambda,
        charge: g.best.charge,
        energy: g.best.energy,
        mean_phonons_over_j: obs.mean_phonons / j,
        jz_over_j: obs.jz / j,
        spin_coherence_over_j2: obs.spin_coherence / (j * j),
        n_max: params.n_max,
        converged,
        warning: g.edge_warning,
    })
}

pub fn run(opts: ExactOptions, ctx: &Context) -> CliResult<Outcome> {
    let n_ions = require(opts.n_ions, "n_ions")?;
    let omega = opts.omega.unwrap_or(1.0);
    let omega0 = opts.omega0.unwrap_or(1.0);
    let out = require(opts.out.clone(), "out")?;
    let start = opts.n_max.unwrap_or(16);
    let cutoff = Cutoff {
        start,
        auto: opts.auto_n_max.unwrap_or(false),
        limit: opts.n_max_limit.unwrap_or(start.max(96)),
    };
    ModelParams::new(omega, omega0, 0.0, n_ions, start)?;
    let window = opts.sector_window.as_deref().map(parse_window).transpose()?;
    let policy = if opts.strict_window.unwrap_or(false) {
        EdgePolicy::Fail
    } else {
        EdgePolicy::Warn
    };
    let solver = SolverOptions::default().with_seed(opts.seed.unwrap_or(0));
    let lc = critical_coupling(omega, omega0);
    let grid = couplings(opts.lambda, opts.lambda_sweep.as_deref(), opts.relative.unwrap_or(false), lc)?;
    let specs: Vec<PointSpec> = grid
        .iter()
        .map(|&lambda| PointSpec {
            two_j: n_ions,
            omega,
            omega0,
            lambda,
            cutoff,
            window,
            policy,
        })
        .collect();
    let points = map_ordered(ctx.jobs, &specs, |s| solve_point(s, &solver))?;

    let mut table = Table::new(&COLUMNS);
    let mut warnings = Vec::new();
    for p in &points {
        table.push(p.fields());
        if let Some(w) = &p.warning {
            warnings.push(format!("λ = {}: {w}", p.lambda));
        }
        if !p.converged {
            warnings.push(format!("λ = {}: ground energy not converged at n_max = {}", p.lambda, p.n_max));
        }
    }
    let mut hashed = opts.clone();
    hashed.out = None;
    let prov = Provenance::new("exact", config::fingerprint(&hashed))
        .note(format!("N = {n_ions}, lambda_c = {}", crate::output::format_float(lc)));
    table.write(&out, &prov)?;
    Ok(Outcome {
        summary: format!("{} couplings for N = {n_ions} written to {}", points.len(), out.display()),
        warnings,
    })
}
