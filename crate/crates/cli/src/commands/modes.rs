use std::path::PathBuf;

use jtd_core::ion_chain::{radial_spectrum, zigzag_critical_n, ChainConfig};

use super::{require, Outcome};
use crate::args::ModesOptions;
use crate::config;
use crate::error::CliResult;
use crate::output::{Field, Provenance, Table};

pub fn spectrum_table(n_ions: usize, aspect: f64) -> CliResult<(Table, Table)> {
    let s = radial_spectrum(&ChainConfig::new(n_ions, aspect)?)?;
    let mut spec = Table::new(&["n", "kappa_n", "omega_n_over_omega_r"]);
    for (n, k) in s.kappa.iter().enumerate() {
        spec.push(vec![(n + 1).into(), (*k).into(), s.omega_ratio(n).into()]);
    }
    let mut vecs = Table::new(&["i", "n", "b_in"]);
    for i in 0..n_ions {
        for n in 0..n_ions {
            vecs.push(vec![(i + 1).into(), (n + 1).into(), Field::Float(s.modes[(i, n)])]);
        }
    }
    Ok((spec, vecs))
}

pub fn run(opts: ModesOptions) -> CliResult<Outcome> {
    let n_ions = require(opts.n_ions, "n_ions")?;
    let aspect = require(opts.aspect, "aspect")?;
    let out = require(opts.out.clone(), "out")?;
    let vectors_out = opts.vectors_out.clone().unwrap_or_else(|| sibling(&out, "_vectors"));
    let (spec, vecs) = spectrum_table(n_ions, aspect)?;

    let mut hashed = opts.clone();
    hashed.out = None;
    hashed.vectors_out = None;
    let prov = Provenance::new("modes", config::fingerprint(&hashed));
    spec.write(&out, &prov)?;
    vecs.write(&vectors_out, &prov)?;

    let mut summary = format!(
        "N = {n_ions}, aspect = {aspect}: wrote {} and {}",
        out.display(),
        vectors_out.display()
    );
    if let Some(limit) = opts.zigzag_max {
        match zigzag_critical_n(aspect, limit)? {
            Some(n) => summary += &format!("\nzigzag instability first at N = {n}"),
            None => summary += &format!("\nlinear chain stable up to N = {limit}"),
        }
    }
    Ok(Outcome {
        summary,
        warnings: Vec::new(),
    })
}

/// `dir/name.csv` → `dir/name<suffix>.csv`
fn sibling(path: &std::path::Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map_or_else(|| "modes".into(), |s| s.to_string_lossy().into_owned());
    let ext = path.extension().map_or_else(|| "csv".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}
