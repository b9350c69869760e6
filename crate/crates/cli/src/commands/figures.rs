use std::path::{Path, PathBuf};

use jtd_core::exact_diag::{EdgePolicy, SolverOptions};
use jtd_core::ion_chain::{radial_spectrum, zigzag_critical_n, ChainConfig};
use jtd_core::mean_field::{critical_coupling, order_parameters, solve, MeanFieldParams};

use super::exact::{solve_point, Cutoff, ExactPoint, PointSpec};
use super::modes::spectrum_table;
use super::{Context, Outcome};
use crate::args::FiguresOptions;
use crate::config;
use crate::error::CliResult;
use crate::output::{Field, Provenance, Table};
use crate::sweep::{linspace, map_ordered};

/// Upper end of every coupling axis, in units of λ_c.
pub const LAMBDA_MAX_OVER_LC: f64 = 2.5;
const MEAN_FIELD_POINTS: usize = 251;
const ASPECTS: [f64; 3] = [0.2, 0.15, 0.1];

pub struct FigureSet {
    pub files: Vec<(&'static str, Table, Vec<String>)>,
}

fn fig2(big: bool) -> CliResult<Vec<(&'static str, Table, Vec<String>)>> {
    let (a, _) = spectrum_table(20, 0.1)?;
    let mut b = Table::new(&["aspect", "n_ions", "kappa_min", "omega_min_over_omega_r", "stable"]);
    let top = if big { 120 } else { 60 };
    let mut notes = Vec::new();
    for aspect in ASPECTS {
        for n in 2..=top {
            let s = radial_spectrum(&ChainConfig::new(n, aspect)?)?;
            let k = s.min_kappa();
            b.push(vec![
                aspect.into(),
                n.into(),
                k.into(),
                s.omega_ratio(n - 1).into(),
                s.is_stable().into(),
            ]);
        }
        let crit = zigzag_critical_n(aspect, top)?;
        notes.push(format!(
            "aspect {aspect}: zigzag at N = {}",
            crit.map_or_else(|| format!("> {top}"), |n| n.to_string())
        ));
    }
    Ok(vec![
        ("fig2a.csv", a, vec!["N = 20, omega_z/omega_r = 0.1".into()]),
        ("fig2b.csv", b, notes),
    ])
}

fn fig4() -> CliResult<Table> {
    let mut t = Table::new(&["lambda_over_lambda_c", "phase", "eps1", "eps2", "eps3"]);
    let lc = critical_coupling(1.0, 1.0);
    for x in linspace(0.0, LAMBDA_MAX_OVER_LC, MEAN_FIELD_POINTS)? {
        let sol = solve(&MeanFieldParams::new(1.0, 1.0, x * lc)?, 0.0)?;
        t.push(vec![
            x.into(),
            sol.phase.label().into(),
            sol.epsilon[0].into(),
            sol.epsilon[1].into(),
            sol.epsilon[2].into(),
        ]);
    }
    Ok(t)
}

/// Ion numbers of the exact curves in the phonon-number and coherence plots.
pub fn exact_sizes(big: bool) -> (Vec<u32>, Vec<u32>) {
    if big {
        (vec![6, 10, 20], vec![6, 10, 30, 40])
    } else {
        (vec![6, 10], vec![6, 10])
    }
}

fn order_tables(opts: &FiguresOptions, ctx: &Context) -> CliResult<(Table, Table)> {
    let big = opts.big.unwrap_or(false);
    let lc = critical_coupling(1.0, 1.0);
    let (n6, n7) = exact_sizes(big);
    let mut sizes: Vec<u32> = n6.iter().chain(&n7).copied().collect();
    sizes.sort_unstable();
    sizes.dedup();
    let grid = linspace(0.0, LAMBDA_MAX_OVER_LC, opts.points.unwrap_or(21))?;
    let specs: Vec<PointSpec> = sizes
        .iter()
        .flat_map(|&n| {
            grid.iter().map(move |x| PointSpec {
                two_j: n,
                omega: 1.0,
                omega0: 1.0,
                lambda: x * lc,
                cutoff: Cutoff {
                    start: 8,
                    auto: true,
                    limit: if big { 200 } else { 96 },
                },
                window: None,
                policy: EdgePolicy::Warn,
            })
        })
        .collect();
    let solver = SolverOptions::default().with_seed(opts.seed.unwrap_or(0));
    let points = map_ordered(ctx.jobs, &specs, |s| solve_point(s, &solver))?;

    let header = |value: &'static str| {
        Table::new(&["lambda_over_lambda_c", "source", "n_ions", value, "n_max", "converged"])
    };
    let mut t6 = header("n_over_j");
    let mut t7 = header("coherence_over_j2");
    for x in linspace(0.0, LAMBDA_MAX_OVER_LC, MEAN_FIELD_POINTS)? {
        let o = order_parameters(&MeanFieldParams::new(1.0, 1.0, x * lc)?, 0.0)?;
        let mf = |v: f64| vec![x.into(), "mean_field".into(), Field::Missing, v.into(), Field::Missing, Field::Missing];
        t6.push(mf(o.n_over_j));
        t7.push(mf(o.coherence_over_j2));
    }
    let row = |n: u32, x: f64, p: &ExactPoint, v: f64| {
        vec![x.into(), "exact".into(), n.into(), v.into(), p.n_max.into(), p.converged.into()]
    };
    for (k, p) in points.iter().enumerate() {
        let n = specs[k].two_j;
        let x = grid[k % grid.len()];
        if n6.contains(&n) {
            t6.push(row(n, x, p, p.mean_phonons_over_j));
        }
        if n7.contains(&n) {
            t7.push(row(n, x, p, p.spin_coherence_over_j2));
        }
    }
    Ok((t6, t7))
}

pub fn build(opts: &FiguresOptions, ctx: &Context) -> CliResult<FigureSet> {
    let mut files = fig2(opts.big.unwrap_or(false))?;
    files.push(("fig4.csv", fig4()?, vec!["omega = omega0 = 1".into()]));
    let (t6, t7) = order_tables(opts, ctx)?;
    let note = "omega = omega0 = 1; exact rows use the ground state over all charge sectors".to_string();
    files.push(("fig6.csv", t6, vec![note.clone()]));
    files.push(("fig7.csv", t7, vec![note]));
    Ok(FigureSet { files })
}

pub fn run(opts: FiguresOptions, ctx: &Context) -> CliResult<Outcome> {
    let dir: PathBuf = opts.out_dir.clone().unwrap_or_else(|| PathBuf::from("figures"));
    let set = build(&opts, ctx)?;
    let mut hashed = opts.clone();
    hashed.out_dir = None;
    let hash = config::fingerprint(&hashed);
    let mut written = Vec::new();
    for (name, table, notes) in &set.files {
        let prov = notes
            .iter()
            .fold(Provenance::new("figures", hash.clone()), |p, n| p.note(n.clone()));
        let path = Path::new(&dir).join(name);
        table.write(&path, &prov)?;
        written.push(path.display().to_string());
    }
    Ok(Outcome {
        summary: format!("wrote {}", written.join(", ")),
        warnings: Vec::new(),
    })
}
