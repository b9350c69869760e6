pub mod exact;
pub mod figures;
pub mod lab;
pub mod meanfield;
pub mod modes;
pub mod ramp;

use std::path::Path;

use serde::de::DeserializeOwned;

use crate::args::{Cli, Command};
use crate::config;
use crate::error::{CliError, CliResult};

/// What a finished command reports back to the terminal.
#[derive(Debug, Default)]
pub struct Outcome {
    pub summary: String,
    pub warnings: Vec<String>,
}

pub struct Context {
    pub jobs: usize,
}

impl Context {
    pub fn new(jobs: Option<usize>) -> CliResult<Self> {
        let jobs = match jobs {
            Some(0) => return Err(CliError::config("jobs: must be at least 1")),
            Some(n) => n,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        Ok(Self { jobs })
    }
}

pub trait Overlay: Sized {
    fn overlay(self, base: Self) -> Self;
}

macro_rules! impl_overlay {
    ($($t:ty),*) => {$(
        impl Overlay for $t {
            fn overlay(self, base: Self) -> Self {
                <$t>::overlay(self, base)
            }
        }
    )*};
}

impl_overlay!(
    crate::args::ModesOptions,
    crate::args::MeanFieldOptions,
    crate::args::ExactOptions,
    crate::args::RampOptions,
    crate::args::LabOptions,
    crate::args::FiguresOptions
);

/// Flags over file values.
pub fn merge<T: Overlay + DeserializeOwned + Default>(flags: T, file: Option<&Path>) -> CliResult<T> {
    let base = match file {
        Some(p) => config::load(p)?,
        None => T::default(),
    };
    Ok(flags.overlay(base))
}

pub fn run(cli: Cli) -> CliResult<Outcome> {
    let ctx = Context::new(cli.jobs)?;
    let file = cli.config.as_deref();
    match cli.command {
        Command::Modes(o) => modes::run(merge(o, file)?),
        // a coupling given on the command line replaces both coupling keys of the file
        Command::Meanfield(o) => {
            let mut base: crate::args::MeanFieldOptions = load_or_default(file)?;
            if o.lambda.is_some() || o.lambda_sweep.is_some() {
                base.lambda = None;
                base.lambda_sweep = None;
            }
            meanfield::run(o.overlay(base))
        }
        Command::Exact(o) => {
            let mut base: crate::args::ExactOptions = load_or_default(file)?;
            if o.lambda.is_some() || o.lambda_sweep.is_some() {
                base.lambda = None;
                base.lambda_sweep = None;
            }
            exact::run(o.overlay(base), &ctx)
        }
        Command::Ramp(o) => ramp::run(merge(o, file)?),
        Command::Lab(o) => lab::run(merge(o, file)?),
        Command::Figures(o) => figures::run(merge(o, file)?, &ctx),
    }
}

fn load_or_default<T: DeserializeOwned + Default>(file: Option<&Path>) -> CliResult<T> {
    file.map_or_else(|| Ok(T::default()), config::load)
}

/// The coupling grid from `--lambda` or `--lambda-sweep`, scaled by λ_c when
/// `relative`.
pub fn couplings(lambda: Option<f64>, sweep: Option<&str>, relative: bool, lambda_c: f64) -> CliResult<Vec<f64>> {
    let raw = match (lambda, sweep) {
        (Some(_), Some(_)) => return Err(CliError::config("give either lambda or lambda_sweep, not both")),
        (Some(l), None) => vec![l],
        (None, Some(s)) => crate::sweep::parse_sweep(s)?,
        (None, None) => return Err(CliError::config("missing lambda or lambda_sweep")),
    };
    let scale = if relative { lambda_c } else { 1.0 };
    let out: Vec<f64> = raw.iter().map(|l| l * scale).collect();
    if let Some(bad) = out.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
        return Err(CliError::config(format!("lambda: couplings must be non-negative, got {bad}")));
    }
    Ok(out)
}

pub fn require<T>(value: Option<T>, name: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::config(format!("missing required option `{name}`")))
}
