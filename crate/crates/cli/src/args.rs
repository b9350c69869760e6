//! Command-line flags. Every subcommand's options double as the schema of
//! its config file: the same keys, all optional, flags overriding the file.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "jtd-sim", version, about = "Trapped-ion Jahn-Teller-Dicke simulations")]
pub struct Cli {
    /// Flat TOML file with defaults for the chosen subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads for parameter sweeps.
    #[arg(long, global = true, env = "JTD_SIM_JOBS")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Radial normal modes of a linear chain.
    Modes(ModesOptions),
    /// Thermodynamic-limit spectrum and order parameters.
    Meanfield(MeanFieldOptions),
    /// Charge-sector exact diagonalization of the finite model.
    Exact(ExactOptions),
    /// Time evolution under a coupling ramp.
    Ramp(RampOptions),
    /// Laboratory parameters and rotating-wave margins.
    Lab(LabOptions),
    /// Write the CSV data behind the figures.
    Figures(FiguresOptions),
}

macro_rules! options {
    ($(#[$m:meta])* $name:ident { $($(#[$fm:meta])* $field:ident : $ty:ty,)* }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Default, PartialEq, clap::Args, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $(
                $(#[$fm])*
                #[serde(default, skip_serializing_if = "Option::is_none")]
                pub $field: Option<$ty>,
            )*
        }

        impl $name {
            /// Values set here win over `base`.
            pub fn overlay(self, base: Self) -> Self {
                Self { $($field: self.$field.or(base.$field),)* }
            }
        }
    };
}

options!(ModesOptions {
    #[arg(long)]
    n_ions: usize,
    /// ω_z/ω_r.
    #[arg(long)]
    aspect: f64,
    /// Also report the zigzag threshold, scanning chains up to this length.
    #[arg(long)]
    zigzag_max: usize,
    /// Spectrum CSV (n, kappa_n, omega_n_over_omega_r).
    #[arg(long)]
    out: PathBuf,
    /// Mode-vector CSV (i, n, b_in); defaults to `<out stem>_vectors.csv`.
    #[arg(long)]
    vectors_out: PathBuf,
});

options!(MeanFieldOptions {
    #[arg(long)]
    omega: f64,
    #[arg(long)]
    omega0: f64,
    /// Single coupling.
    #[arg(long, conflicts_with = "lambda_sweep")]
    lambda: f64,
    /// `start:stop:points`, inclusive.
    #[arg(long)]
    lambda_sweep: String,
    /// Read couplings in units of λ_c.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    relative: bool,
    /// Broken-phase angle.
    #[arg(long)]
    phi: f64,
    /// Ion number used to scale the displacements x₀, y₀.
    #[arg(long)]
    n_ions: u32,
    #[arg(long)]
    out: PathBuf,
});

options!(ExactOptions {
    #[arg(long)]
    n_ions: u32,
    #[arg(long)]
    omega: f64,
    #[arg(long)]
    omega0: f64,
    #[arg(long, conflicts_with = "lambda_sweep")]
    lambda: f64,
    /// `start:stop:points`, inclusive.
    #[arg(long)]
    lambda_sweep: String,
    /// Read couplings in units of λ_c.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    relative: bool,
    /// Per-mode phonon cutoff (starting value with --auto-n-max).
    #[arg(long)]
    n_max: u32,
    /// Raise n_max in steps of 8 until the ground energy settles.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    auto_n_max: bool,
    /// Upper bound for --auto-n-max.
    #[arg(long)]
    n_max_limit: u32,
    /// Charges scanned for the ground state, `lo:hi`.
    #[arg(long)]
    sector_window: String,
    /// Fail instead of warn when the minimum sits on the window edge.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    strict_window: bool,
    /// Start-vector seed for the iterative eigensolver.
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
});

options!(RampOptions {
    #[arg(long)]
    n_ions: u32,
    #[arg(long)]
    omega: f64,
    #[arg(long)]
    omega0: f64,
    #[arg(long)]
    lambda_start: f64,
    #[arg(long)]
    lambda_end: f64,
    /// Read couplings in units of λ_c.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    relative: bool,
    /// Ramp duration in units of 1/ω.
    #[arg(long = "T")]
    #[serde(rename = "T")]
    total_time: f64,
    /// Time step; defaults to T/1000.
    #[arg(long)]
    dt: f64,
    /// linear or smoothstep.
    #[arg(long)]
    shape: String,
    #[arg(long)]
    n_max: u32,
    /// Record every this many steps.
    #[arg(long)]
    sample_every: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
});

options!(LabOptions {
    /// Ion mass in atomic mass units (default ⁴⁰Ca⁺).
    #[arg(long)]
    mass_amu: f64,
    #[arg(long)]
    omega_r: f64,
    #[arg(long)]
    omega_z: f64,
    #[arg(long)]
    qubit_splitting: f64,
    /// Magnetic moment in Bohr magnetons.
    #[arg(long)]
    mu_bohr: f64,
    /// Field gradient in T/m.
    #[arg(long)]
    b_gradient: f64,
    /// Phonon detuning ω.
    #[arg(long)]
    omega: f64,
    /// Spin detuning ω₀.
    #[arg(long)]
    omega0: f64,
    /// Frequencies are angular (rad/s) instead of Hz.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    angular: bool,
    /// Chain length used for the mode spectrum.
    #[arg(long)]
    n_ions: usize,
    /// Bound for the "much smaller than" ratios.
    #[arg(long)]
    threshold: f64,
    #[arg(long)]
    out: PathBuf,
});

options!(FiguresOptions {
    #[arg(long)]
    out_dir: PathBuf,
    /// Add the large-N exact-diagonalization curves.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    big: bool,
    /// Points on the coupling grid of the exact curves.
    #[arg(long)]
    points: usize,
    #[arg(long)]
    seed: u64,
});
