//! Equilibrium positions and radial normal modes of a linear ion chain.
//!
//! Lengths are in units of `d0 = (q² / M ω_z²)^(1/3)`, frequencies of the
//! radial spectrum in units of the radial trap frequency `ω_r`.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, JtdError, Result};
use crate::linalg::jacobi_eigen;

const NEWTON_MAX_ITER: usize = 200;
/// Default force-residual tolerance for the equilibrium solve.
pub const DEFAULT_EQUILIBRIUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    pub n_ions: usize,
    /// ω_z / ω_r
    pub aspect: f64,
    /// Axial trap frequency in rad/s, only needed for unit-bearing output.
    pub omega_z: Option<f64>,
}

impl ChainConfig {
    pub fn new(n_ions: usize, aspect: f64) -> Result<Self> {
        let cfg = Self {
            n_ions,
            aspect,
            omega_z: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_ions < 2 {
            return Err(invalid("n_ions", format!("need at least 2 ions, got {}", self.n_ions)));
        }
        if !(self.aspect > 0.0 && self.aspect < 1.0) {
            return Err(invalid("aspect", format!("ω_z/ω_r must lie in (0, 1), got {}", self.aspect)));
        }
        if let Some(wz) = self.omega_z {
            if !(wz.is_finite() && wz > 0.0) {
                return Err(invalid("omega_z", format!("must be positive, got {wz}")));
            }
        }
        Ok(())
    }

    /// Radial trap frequency in rad/s, if the axial frequency was given.
    pub fn omega_r(&self) -> Option<f64> {
        self.omega_z.map(|wz| wz / self.aspect)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpectrum {
    pub positions: Vec<f64>,
    /// Eigenvalues of the K-matrix, descending. `kappa[0]` is the c.m. mode.
    pub kappa: Vec<f64>,
    /// Column `n` holds the mode vector `b_{i,n}`.
    pub modes: DMatrix<f64>,
    pub k_matrix: DMatrix<f64>,
}

impl ChainSpectrum {
    /// `ω_n / ω_r = √κ_n`; `None` for an unstable (imaginary) mode.
    pub fn omega_ratio(&self, n: usize) -> Option<f64> {
        let k = self.kappa[n];
        (k >= 0.0).then(|| k.sqrt())
    }

    pub fn omega_ratios(&self) -> Vec<Option<f64>> {
        (0..self.kappa.len()).map(|n| self.omega_ratio(n)).collect()
    }

    pub fn min_kappa(&self) -> f64 {
        *self.kappa.last().expect("spectrum has at least two modes")
    }

    pub fn is_stable(&self) -> bool {
        self.min_kappa() >= 0.0
    }

    /// Absolute mode frequencies in rad/s (negative κ → `None`).
    pub fn omegas(&self, omega_r: f64) -> Vec<Option<f64>> {
        self.omega_ratios().into_iter().map(|r| r.map(|x| x * omega_r)).collect()
    }
}

/// Dimensionless net force on each ion: ∂V/∂z_i for
/// `V = Σ z_i²/2 + Σ_{i<j} 1/|z_i − z_j|`.
pub fn force_residual(z: &[f64]) -> Vec<f64> {
    let n = z.len();
    (0..n)
        .map(|i| {
            let mut f = z[i];
            for (j, &zj) in z.iter().enumerate() {
                if j == i {
                    continue;
                }
                let d = z[i] - zj;
                f -= d.signum() / (d * d);
            }
            f
        })
        .collect()
}

fn hessian(z: &[f64]) -> DMatrix<f64> {
    let n = z.len();
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = 1.0;
        for j in 0..n {
            if i != j {
                let c = 2.0 / (z[i] - z[j]).abs().powi(3);
                h[(i, i)] += c;
                h[(i, j)] = -c;
            }
        }
    }
    h
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Damped Newton solve of the axial force balance.
pub fn solve_equilibrium(n_ions: usize, tol: f64) -> Result<Vec<f64>> {
    if n_ions < 2 {
        return Err(invalid("n_ions", format!("need at least 2 ions, got {n_ions}")));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol", format!("must be positive, got {tol}")));
    }
    let n = n_ions as f64;
    let spacing = 2.018 / n.powf(0.559);
    let mut z: Vec<f64> = (0..n_ions).map(|i| (i as f64 + 1.0 - (n + 1.0) / 2.0) * spacing).collect();

    let mut res = force_residual(&z);
    let mut res_norm = max_abs(&res);
    let mut iter = 0;
    while res_norm >= tol {
        if iter == NEWTON_MAX_ITER {
            return Err(JtdError::NoConvergence {
                solver: "equilibrium newton",
                iterations: iter,
                residual: res_norm,
            });
        }
        iter += 1;
        let h = hessian(&z);
        let step = h
            .cholesky()
            .ok_or_else(|| JtdError::Numerical("equilibrium Hessian is not positive definite".into()))?
            .solve(&DVector::from_column_slice(&res));

        // backtrack until ordering is kept and the residual decreases
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = z.iter().zip(step.iter()).map(|(zi, si)| zi - t * si).collect();
            let ordered = trial.windows(2).all(|w| w[0] < w[1]);
            if ordered {
                let trial_res = force_residual(&trial);
                let trial_norm = max_abs(&trial_res);
                if trial_norm < res_norm || t < 1e-6 {
                    z = trial;
                    res = trial_res;
                    res_norm = trial_norm;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-10 {
                return Err(JtdError::NoConvergence {
                    solver: "equilibrium newton",
                    iterations: iter,
                    residual: res_norm,
                });
            }
        }
    }

    // symmetrize: remove round-off drift of the centre of mass and reflection
    let sym: Vec<f64> = (0..n_ions).map(|i| 0.5 * (z[i] - z[n_ions - 1 - i])).collect();
    if max_abs(&force_residual(&sym)) <= res_norm.max(tol * 0.5) {
        z = sym;
    }
    Ok(z)
}

/// Radial K-matrix for the given dimensionless positions and aspect ratio.
pub fn build_k(positions: &[f64], aspect: f64) -> Result<DMatrix<f64>> {
    if !(aspect > 0.0 && aspect < 1.0) {
        return Err(invalid("aspect", format!("ω_z/ω_r must lie in (0, 1), got {aspect}")));
    }
    let n = positions.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if positions[i] == positions[j] {
                return Err(JtdError::DegenerateGeometry { i, j });
            }
        }
    }
    if let Some(i) = (1..n).find(|&i| positions[i] < positions[i - 1]) {
        return Err(invalid("positions", format!("not increasing at index {i}")));
    }
    let a2 = aspect * aspect;
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 1.0;
        for j in 0..n {
            if i != j {
                let c = a2 / (positions[i] - positions[j]).abs().powi(3);
                k[(i, j)] = c;
                diag -= c;
            }
        }
        k[(i, i)] = diag;
    }
    Ok(k)
}

/// Makes each mode's first nonzero component positive.
fn fix_mode_signs(modes: &mut DMatrix<f64>) {
    for mut col in modes.column_iter_mut() {
        let lead = col.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(0.0);
        if lead < 0.0 {
            col.neg_mut();
        }
    }
}

pub fn radial_spectrum(config: &ChainConfig) -> Result<ChainSpectrum> {
    config.validate()?;
    let positions = solve_equilibrium(config.n_ions, DEFAULT_EQUILIBRIUM_TOL)?;
    spectrum_from_positions(positions, config.aspect)
}

pub fn spectrum_from_positions(positions: Vec<f64>, aspect: f64) -> Result<ChainSpectrum> {
    let k_matrix = build_k(&positions, aspect)?;
    let eig = jacobi_eigen(&k_matrix)?.into_descending();
    let mut modes = eig.vectors;
    fix_mode_signs(&mut modes);
    Ok(ChainSpectrum {
        positions,
        kappa: eig.values,
        modes,
        k_matrix,
    })
}

/// Smallest ion number `N ≤ n_max` whose linear chain has an unstable radial
/// mode, or `None` if the chain is stable up to `n_max`.
pub fn zigzag_critical_n(aspect: f64, n_max: usize) -> Result<Option<usize>> {
    if !(aspect > 0.0 && aspect < 1.0) {
        return Err(invalid("aspect", format!("ω_z/ω_r must lie in (0, 1), got {aspect}")));
    }
    for n in 2..=n_max {
        let spec = radial_spectrum(&ChainConfig::new(n, aspect)?)?;
        if !spec.is_stable() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}
