//! Ramps of the coupling λ(t) inside one charge sector.
//!
//! Each step applies `exp(−i H(λ_mid) dt)` through a short Lanczos (Krylov)
//! expansion, with λ frozen at the step midpoint.

use num_complex::Complex64;

use crate::error::{invalid, JtdError, Result};
use crate::exact_diag::{build_parts, lowest_levels, lowest_pairs, SolverOptions};
use crate::hilbert::{enumerate_sector, BasisState, Charge, ChargeSector, ModelParams};
use crate::linalg::tridiagonal_eigen;
use crate::sparse::Csr;

const NORM_DRIFT_MAX: f64 = 1e-8;

/// `E₁ − E₀` of the sector Hamiltonian.
pub fn gap(params: &ModelParams, sector: &ChargeSector, opts: &SolverOptions) -> Result<f64> {
    if sector.dim() < 2 {
        return Err(invalid("sector", "gap needs a sector of dimension ≥ 2"));
    }
    let levels = lowest_levels(params, sector, 2, opts)?;
    Ok(levels[1] - levels[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RampShape {
    Linear,
    Smoothstep,
}

impl std::str::FromStr for RampShape {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "linear" => Ok(Self::Linear),
            "smoothstep" => Ok(Self::Smoothstep),
            other => Err(format!("unknown ramp shape `{other}` (expected linear or smoothstep)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampSchedule {
    pub lambda_start: f64,
    pub lambda_end: f64,
    /// Total duration in units of 1/ω.
    pub total_time: f64,
    pub shape: RampShape,
    pub dt: f64,
}

impl RampSchedule {
    pub fn new(lambda_start: f64, lambda_end: f64, total_time: f64, shape: RampShape, dt: f64) -> Result<Self> {
        let s = Self {
            lambda_start,
            lambda_end,
            total_time,
            shape,
            dt,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.total_time.is_finite() && self.total_time > 0.0) {
            return Err(invalid("T", format!("must be positive, got {}", self.total_time)));
        }
        if !(self.dt > 0.0 && self.dt <= self.total_time / 100.0 * (1.0 + 1e-12)) {
            return Err(invalid("dt", format!("must lie in (0, T/100], got {}", self.dt)));
        }
        if !(self.lambda_start >= 0.0 && self.lambda_start.is_finite() && self.lambda_end.is_finite()) {
            return Err(invalid("lambda_start", "couplings must be finite and non-negative"));
        }
        if self.lambda_start > self.lambda_end {
            return Err(invalid(
                "lambda_end",
                format!("ramp must not decrease ({} > {})", self.lambda_start, self.lambda_end),
            ));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.total_time / self.dt).ceil().max(1.0) as usize
    }

    pub fn lambda_at(&self, t: f64) -> f64 {
        let x = (t / self.total_time).clamp(0.0, 1.0);
        let f = match self.shape {
            RampShape::Linear => x,
            RampShape::Smoothstep => x * x * (3.0 - 2.0 * x),
        };
        self.lambda_start + (self.lambda_end - self.lambda_start) * f
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    pub dim: usize,
    pub tol: f64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self { dim: 12, tol: 1e-10 }
    }
}

fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn cnorm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `exp(−i H t) v` for real symmetric `H`. Steps that the Krylov error
/// estimate rejects are split in halves.
pub fn expm_krylov(h: &Csr, v: &[Complex64], t: f64, opts: &KrylovOptions) -> Result<Vec<Complex64>> {
    let mut out = v.to_vec();
    let mut remaining = t;
    let mut tau = t;
    let mut splits = 0;
    while remaining > 0.0 {
        tau = tau.min(remaining);
        match krylov_step(h, &out, tau, opts)? {
            Some(next) => {
                out = next;
                remaining -= tau;
                if remaining < 1e-15 * t.abs() {
                    break;
                }
            }
            None => {
                splits += 1;
                if splits > 40 {
                    return Err(JtdError::NoConvergence {
                        solver: "krylov propagator",
                        iterations: splits,
                        residual: tau,
                    });
                }
                tau /= 2.0;
            }
        }
    }
    Ok(out)
}

fn krylov_step(h: &Csr, v: &[Complex64], tau: f64, opts: &KrylovOptions) -> Result<Option<Vec<Complex64>>> {
    let n = v.len();
    let beta0 = cnorm(v);
    if beta0 == 0.0 {
        return Ok(Some(v.to_vec()));
    }
    let m_max = opts.dim.max(1).min(n);
    let mut basis: Vec<Vec<Complex64>> = vec![v.iter().map(|x| x / beta0).collect()];
    let mut alpha = Vec::with_capacity(m_max);
    let mut beta = Vec::with_capacity(m_max);
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let tail;
    loop {
        let k = basis.len() - 1;
        w.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        h.matvec_add_complex(1.0, &basis[k], &mut w);
        alpha.push(cdot(&basis[k], &w).re);
        for _ in 0..2 {
            for q in &basis {
                let c = cdot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let b = cnorm(&w);
        if basis.len() == m_max || b <= 1e-14 * (alpha[k].abs() + b).max(1e-300) {
            tail = if basis.len() == n || b <= 1e-14 * (alpha[k].abs() + b).max(1e-300) { 0.0 } else { b };
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }

    // exp(−i T τ) e₁ via the eigendecomposition of T
    let eig = tridiagonal_eigen(&alpha, &beta, true)?;
    let m = alpha.len();
    let mut coef = vec![Complex64::new(0.0, 0.0); m];
    for (k, &theta) in eig.values.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -theta * tau) * eig.vectors[(0, k)];
        for (i, c) in coef.iter_mut().enumerate() {
            *c += phase * eig.vectors[(i, k)];
        }
    }
    let err = beta0 * tail * coef[m - 1].norm();
    if err > opts.tol {
        return Ok(None);
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (q, c) in basis.iter().zip(&coef) {
        let c = c * beta0;
        for (o, qi) in out.iter_mut().zip(q) {
            *o += c * qi;
        }
    }
    Ok(Some(out))
}

/// `|m = −j⟩ ⊗ |0, 0⟩` in its sector `C = j`.
pub fn initial_state(params: &ModelParams) -> (ChargeSector, Vec<Complex64>) {
    let sector = enumerate_sector(params, Charge::top(params.two_j));
    let k = sector
        .index_of(&BasisState {
            two_m: -(params.two_j as i32),
            n_r: 0,
            n_l: 0,
        })
        .expect("C = j always holds the spin-down vacuum");
    let mut v = vec![Complex64::new(0.0, 0.0); sector.dim()];
    v[k] = Complex64::new(1.0, 0.0);
    (sector, v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampOptions {
    pub krylov: KrylovOptions,
    pub solver: SolverOptions,
    /// Record a sample (with fidelity and gap) every this many steps; the
    /// first and last step are always sampled.
    pub sample_every: usize,
}

impl Default for RampOptions {
    fn default() -> Self {
        Self {
            krylov: KrylovOptions::default(),
            solver: SolverOptions::default(),
            sample_every: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampSample {
    pub t: f64,
    pub lambda: f64,
    pub norm: f64,
    pub energy: f64,
    /// `|⟨ψ(t)|ψ_gs(λ(t))⟩|²`
    pub fidelity_instantaneous: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RampResult {
    pub final_state: Vec<Complex64>,
    pub fidelity: f64,
    /// Smallest sector gap over the sampled times.
    pub min_gap: f64,
    pub diabatic_error: f64,
    pub norm_drift: f64,
    pub samples: Vec<RampSample>,
}

struct Snapshot {
    energy: f64,
    fidelity: f64,
    gap: f64,
}

fn snapshot(h: &Csr, psi: &[Complex64], opts: &SolverOptions) -> Result<Snapshot> {
    let count = if h.dim() >= 2 { 2 } else { 1 };
    let pairs = lowest_pairs(h, count, opts)?;
    let overlap: Complex64 = pairs[0].vector.iter().zip(psi).map(|(g, p)| p * *g).sum();
    let mut hpsi = vec![Complex64::new(0.0, 0.0); psi.len()];
    h.matvec_add_complex(1.0, psi, &mut hpsi);
    let norm2: f64 = psi.iter().map(|x| x.norm_sqr()).sum();
    Ok(Snapshot {
        energy: cdot(psi, &hpsi).re / norm2,
        fidelity: overlap.norm_sqr() / norm2,
        gap: if count == 2 { pairs[1].value - pairs[0].value } else { f64::INFINITY },
    })
}

fn combine(h0: &Csr, h1: &Csr, lambda: f64) -> Csr {
    let mut t = Vec::with_capacity(h0.nnz() + h1.nnz());
    for r in 0..h0.dim() {
        t.extend(h0.row(r).map(|(c, v)| (r, c, v)));
        t.extend(h1.row(r).map(|(c, v)| (r, c, lambda * v)));
    }
    Csr::from_triplets(h0.dim(), &t)
}

/// Evolves `initial` (a vector on `sector`) under `H(λ(t))`.
pub fn evolve(
    initial: &[Complex64],
    params: &ModelParams,
    sector: &ChargeSector,
    schedule: &RampSchedule,
    opts: &RampOptions,
) -> Result<RampResult> {
    schedule.validate()?;
    if initial.len() != sector.dim() {
        return Err(invalid("initial", "state does not match the sector dimension"));
    }
    let norm0 = cnorm(initial);
    if (norm0 - 1.0).abs() > 1e-10 {
        return Err(JtdError::NotNormalized { norm: norm0 });
    }
    let (h0, h1) = build_parts(params, sector)?;
    let (h0, h1) = (h0.to_csr(), h1.to_csr());

    let steps = schedule.steps();
    let dt = schedule.total_time / steps as f64;
    let every = opts.sample_every.max(1);
    let mut psi = initial.to_vec();
    let mut samples = Vec::new();
    let mut min_gap = f64::INFINITY;
    let mut record = |step: usize, psi: &[Complex64], samples: &mut Vec<RampSample>| -> Result<Snapshot> {
        let t = step as f64 * dt;
        let lambda = schedule.lambda_at(t);
        let snap = snapshot(&combine(&h0, &h1, lambda), psi, &opts.solver)?;
        min_gap = min_gap.min(snap.gap);
        samples.push(RampSample {
            t,
            lambda,
            norm: cnorm(psi),
            energy: snap.energy,
            fidelity_instantaneous: snap.fidelity,
            gap: snap.gap,
        });
        Ok(snap)
    };

    record(0, &psi, &mut samples)?;
    let mut last = None;
    for step in 1..=steps {
        let mid = schedule.lambda_at((step as f64 - 0.5) * dt);
        psi = expm_krylov(&combine(&h0, &h1, mid), &psi, dt, &opts.krylov)?;
        let drift = (cnorm(&psi) - 1.0).abs();
        if drift > NORM_DRIFT_MAX {
            return Err(JtdError::Numerical(format!(
                "norm drifted by {drift:.3e} at t = {:.6}; reduce dt",
                step as f64 * dt
            )));
        }
        if step % every == 0 || step == steps {
            last = Some(record(step, &psi, &mut samples)?);
        }
    }
    let fin = last.expect("at least one step");
    let norm_drift = (cnorm(&psi) - 1.0).abs();
    let fidelity = fin.fidelity.clamp(0.0, 1.0);
    Ok(RampResult {
        final_state: psi,
        fidelity,
        min_gap,
        diabatic_error: 1.0 - fidelity,
        norm_drift,
        samples,
    })
}

/// Ramp from the uncoupled initial state `|−j⟩ ⊗ |0,0⟩`.
pub fn ramp_from_vacuum(params: &ModelParams, schedule: &RampSchedule, opts: &RampOptions) -> Result<RampResult> {
    let (sector, psi) = initial_state(params);
    evolve(&psi, params, &sector, schedule, opts)
}
