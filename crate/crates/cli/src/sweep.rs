//! Parameter grids and the worker pool.

use rayon::prelude::*;

use crate::error::{CliError, CliResult};

/// Parses `start:stop:points` into `points` evenly spaced values, both ends
/// included.
pub fn parse_sweep(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::config(format!(
            "lambda_sweep: expected start:stop:points, got `{spec}`"
        )));
    }
    let num = |s: &str, what: &str| -> CliResult<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::config(format!("lambda_sweep: bad {what} `{s}`")))
    };
    let start = num(parts[0], "start")?;
    let stop = num(parts[1], "stop")?;
    let points: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| CliError::config(format!("lambda_sweep: bad point count `{}`", parts[2])))?;
    linspace(start, stop, points)
}

pub fn linspace(start: f64, stop: f64, points: usize) -> CliResult<Vec<f64>> {
    if points == 0 {
        return Err(CliError::config("lambda_sweep: the sweep is empty (0 points)"));
    }
    if !(start.is_finite() && stop.is_finite()) {
        return Err(CliError::config("lambda_sweep: bounds must be finite"));
    }
    if points == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| if i + 1 == points { stop } else { start + step * i as f64 })
        .collect())
}

/// Parses `lo:hi` (charges, half-integers allowed).
pub fn parse_window(spec: &str) -> CliResult<(f64, f64)> {
    let (lo, hi) = spec
        .split_once(':')
        .ok_or_else(|| CliError::config(format!("sector_window: expected lo:hi, got `{spec}`")))?;
    let num = |s: &str| -> CliResult<f64> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| CliError::config(format!("sector_window: bad charge `{s}`")))?;
        if (2.0 * v).fract() != 0.0 {
            return Err(CliError::config(format!("sector_window: {v} is not a multiple of 1/2")));
        }
        Ok(v)
    };
    Ok((num(lo)?, num(hi)?))
}

/// Runs `f` on every item with `jobs` threads; results keep the input order.
pub fn map_ordered<T, R, F>(jobs: usize, items: &[T], f: F) -> CliResult<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> CliResult<R> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::config(format!("cannot start {jobs} workers: {e}")))?;
    pool.install(|| items.par_iter().map(&f).collect())
}
