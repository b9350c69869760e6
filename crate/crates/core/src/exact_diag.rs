//! Sector Hamiltonians in the chiral basis, ground states, and the finite-N
//! observables.
//!
//! `H = ω(n_r + n_l) + ω₀ J_z + λ/√(2j) [J₊(a_r† + a_l) + J₋(a_r + a_l†)]`.
//! Transitions that would push `n_r` or `n_l` above `n_max` are dropped.

use crate::error::{invalid, JtdError, Result};
use crate::hilbert::{check_normalized, enumerate_sector, feasible_charges, BasisState, Charge, ChargeSector, ModelParams};
use crate::lanczos::{lowest_eigenpairs, residual, EigenPair, LanczosOptions};
use crate::linalg::symmetric_eigen;
use crate::sparse::{Csr, SparseOperator};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Residual bound `‖Hv − Ev‖` for accepted eigenpairs.
    pub eig_tol: f64,
    /// Largest dimension for which a stalled Lanczos run is redone densely.
    pub dense_limit: usize,
    /// Relative energy change that counts as converged in `n_max`.
    pub rel_tol: f64,
    pub lanczos: LanczosOptions,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            eig_tol: 1e-10,
            dense_limit: 2000,
            rel_tol: 1e-8,
            lanczos: LanczosOptions::default(),
        }
    }
}

impl SolverOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.lanczos.seed = seed;
        self
    }
}

/// `√(j(j+1) − m(m+1))` in doubled integers.
fn j_plus_factor(two_j: u32, two_m: i32) -> f64 {
    let tj = two_j as f64;
    let tm = two_m as f64;
    ((tj * (tj + 2.0) - tm * (tm + 2.0)) / 4.0).max(0.0).sqrt()
}

/// Splits the sector Hamiltonian as `H = H₀ + λ H₁`.
pub fn build_parts(params: &ModelParams, sector: &ChargeSector) -> Result<(SparseOperator, SparseOperator)> {
    params.validate()?;
    if sector.is_empty() {
        return Err(JtdError::EmptySector {
            charge: sector.charge.value(),
        });
    }
    if sector.two_j != params.two_j || sector.n_max != params.n_max {
        return Err(invalid("sector", "sector was enumerated for different j or n_max"));
    }
    let dim = sector.dim();
    let mut h0 = SparseOperator::new(dim, true);
    let mut h1 = SparseOperator::new(dim, true);
    let g = 1.0 / (2.0 * params.j()).sqrt();
    for (col, s) in sector.states.iter().enumerate() {
        h0.push(col, col, params.omega * s.phonons() as f64 + params.omega0 * s.m());
        if s.two_m >= params.two_j as i32 {
            continue;
        }
        let jp = j_plus_factor(params.two_j, s.two_m);
        // J₊ a_r† and J₊ a_l; their transposes are J₋ a_r and J₋ a_l†
        let raised = [
            (
                BasisState {
                    two_m: s.two_m + 2,
                    n_r: s.n_r + 1,
                    n_l: s.n_l,
                },
                ((s.n_r + 1) as f64).sqrt(),
            ),
            (
                BasisState {
                    two_m: s.two_m + 2,
                    n_r: s.n_r,
                    n_l: s.n_l.wrapping_sub(1),
                },
                (s.n_l as f64).sqrt(),
            ),
        ];
        for (t, ladder) in raised {
            if t.n_r > params.n_max || t.n_l > params.n_max || ladder == 0.0 {
                continue;
            }
            debug_assert_eq!(t.charge(), sector.charge);
            let row = sector
                .index_of(&t)
                .ok_or_else(|| JtdError::Numerical(format!("coupling leaves sector C = {}", sector.charge)))?;
            let v = g * jp * ladder;
            h1.push(row, col, v);
            h1.push(col, row, v);
        }
    }
    Ok((h0, h1))
}

pub fn build_hamiltonian(params: &ModelParams, sector: &ChargeSector) -> Result<SparseOperator> {
    let (mut h0, h1) = build_parts(params, sector)?;
    h0.entries
        .extend(h1.entries.iter().map(|&(r, c, v)| (r, c, params.lambda * v)));
    Ok(h0)
}

/// Lowest `count` eigenpairs of a symmetric operator: Lanczos first, dense
/// fallback up to `dense_limit`.
pub fn lowest_pairs(op: &Csr, count: usize, opts: &SolverOptions) -> Result<Vec<EigenPair>> {
    let mut lopts = opts.lanczos;
    lopts.tol = opts.eig_tol;
    match lowest_eigenpairs(op, count, &lopts) {
        Ok(pairs) => Ok(pairs),
        Err(err) if op.dim() <= opts.dense_limit => {
            let _ = err;
            dense_lowest(op, count)
        }
        Err(err) => Err(err),
    }
}

pub(crate) fn dense_lowest(op: &Csr, count: usize) -> Result<Vec<EigenPair>> {
    let n = op.dim();
    let dense = nalgebra::DMatrix::from_fn(n, n, |i, j| op.get(i, j));
    let eig = symmetric_eigen(&dense)?;
    Ok((0..count.min(n))
        .map(|k| {
            let vector: Vec<f64> = eig.vectors.column(k).iter().copied().collect();
            let value = eig.values[k];
            EigenPair {
                residual: residual(op, value, &vector),
                value,
                vector,
            }
        })
        .collect())
}

/// Makes the largest-magnitude amplitude positive.
pub fn fix_sign(vector: &mut [f64]) {
    let lead = vector
        .iter()
        .copied()
        .fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
    if lead < 0.0 {
        vector.iter_mut().for_each(|x| *x = -*x);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundStateResult {
    pub charge: Charge,
    pub energy: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub n_max: u32,
    /// Set by a truncation sweep; `None` when convergence in `n_max` was not checked.
    pub converged: Option<bool>,
}

pub fn ground_state(params: &ModelParams, sector: &ChargeSector, opts: &SolverOptions) -> Result<GroundStateResult> {
    let h = build_hamiltonian(params, sector)?.to_csr();
    let mut pair = lowest_pairs(&h, 1, opts)?.remove(0);
    if pair.residual > opts.eig_tol {
        return Err(JtdError::NoConvergence {
            solver: "sector ground state",
            iterations: opts.lanczos.max_restarts,
            residual: pair.residual,
        });
    }
    fix_sign(&mut pair.vector);
    Ok(GroundStateResult {
        charge: sector.charge,
        energy: pair.value,
        vector: pair.vector,
        residual: pair.residual,
        n_max: params.n_max,
        converged: None,
    })
}

/// Lowest `count` sector eigenvalues, ascending.
pub fn lowest_levels(params: &ModelParams, sector: &ChargeSector, count: usize, opts: &SolverOptions) -> Result<Vec<f64>> {
    if count > sector.dim() {
        return Err(invalid(
            "count",
            format!("asked for {count} levels of a {}-dimensional sector", sector.dim()),
        ));
    }
    let h = build_hamiltonian(params, sector)?.to_csr();
    let pairs = lowest_pairs(&h, count, opts)?;
    Ok(pairs.into_iter().map(|p| p.value).collect())
}

/// Inclusive range of charges scanned for the global ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChargeWindow {
    pub lo: Charge,
    pub hi: Charge,
}

impl ChargeWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        let (lo, hi) = (Charge::from_f64(lo), Charge::from_f64(hi));
        if lo > hi {
            return Err(invalid("sector_window", format!("empty window [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// `[j − 2n_max, j + 2n_max]`, widened to include `−j` and clipped to the
    /// feasible charges.
    pub fn default_for(params: &ModelParams) -> Self {
        let tj = params.two_j as i64;
        let tn = 2 * params.n_max as i64;
        let lo = (tj - 2 * tn).min(-tj).max(-tj - tn);
        let hi = (tj + 2 * tn).min(tj + tn);
        Self {
            lo: Charge::from_twice(lo),
            hi: Charge::from_twice(hi),
        }
    }

    pub fn contains(&self, c: Charge) -> bool {
        self.lo <= c && c <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgePolicy {
    #[default]
    Warn,
    Fail,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalGround {
    pub best: GroundStateResult,
    /// Ground energy of every scanned sector.
    pub sector_energies: Vec<(Charge, f64)>,
    pub edge_warning: Option<String>,
}

pub fn global_ground(
    params: &ModelParams,
    window: ChargeWindow,
    policy: EdgePolicy,
    opts: &SolverOptions,
) -> Result<GlobalGround> {
    let top = Charge::top(params.two_j);
    if !window.contains(top) || !window.contains(top.neg()) {
        return Err(invalid(
            "sector_window",
            format!("window [{}, {}] must contain C = ±{top}", window.lo, window.hi),
        ));
    }
    let feasible = feasible_charges(params);
    let charges: Vec<Charge> = feasible.iter().copied().filter(|c| window.contains(*c)).collect();
    let mut best: Option<GroundStateResult> = None;
    let mut sector_energies = Vec::with_capacity(charges.len());
    for c in charges {
        let sector = enumerate_sector(params, c);
        let gs = ground_state(params, &sector, opts)?;
        sector_energies.push((c, gs.energy));
        if best.as_ref().map_or(true, |b| gs.energy < b.energy) {
            best = Some(gs);
        }
    }
    let best = best.expect("window contains at least C = j");
    let (f_lo, f_hi) = (feasible[0], *feasible.last().expect("non-empty"));
    let on_edge = (best.charge == window.lo && window.lo != f_lo) || (best.charge == window.hi && window.hi != f_hi);
    let edge_warning = if on_edge {
        match policy {
            EdgePolicy::Fail => {
                return Err(JtdError::WindowEdge {
                    charge: best.charge.value(),
                })
            }
            EdgePolicy::Warn => Some(format!(
                "ground-state minimum at C = {} sits on the window edge; consider widening the window",
                best.charge
            )),
        }
    } else {
        None
    };
    Ok(GlobalGround {
        best,
        sector_energies,
        edge_warning,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    /// `⟨n_x + n_y⟩`
    pub mean_phonons: f64,
    pub jz: f64,
    /// `⟨J_x² + J_y²⟩ = j(j+1) − ⟨J_z²⟩`
    pub spin_coherence: f64,
}

pub fn observables(result: &GroundStateResult, sector: &ChargeSector) -> Result<Observables> {
    if result.vector.len() != sector.dim() {
        return Err(invalid("vector", "ground-state vector does not match the sector"));
    }
    check_normalized(&result.vector)?;
    let j = sector.j();
    let (mut n, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for (s, a) in sector.states.iter().zip(&result.vector) {
        let p = a * a;
        n += p * s.phonons() as f64;
        m1 += p * s.m();
        m2 += p * s.m() * s.m();
    }
    Ok(Observables {
        mean_phonons: n,
        jz: m1,
        spin_coherence: j * (j + 1.0) - m2,
    })
}

/// `⟨Π⟩` for a sector vector; `±1` since parity is constant on a sector.
pub fn parity_expectation(sector: &ChargeSector, vector: &[f64]) -> f64 {
    sector
        .states
        .iter()
        .zip(vector)
        .map(|(s, a)| a * a * s.parity(sector.two_j) as f64)
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationReport {
    pub energies: Vec<(u32, f64)>,
    pub converged: bool,
    /// Ground state at the largest cutoff.
    pub result: GroundStateResult,
}

pub fn truncation_sweep(
    params: &ModelParams,
    charge: Charge,
    n_max_list: &[u32],
    opts: &SolverOptions,
) -> Result<TruncationReport> {
    if n_max_list.is_empty() {
        return Err(invalid("n_max_list", "need at least one cutoff"));
    }
    if n_max_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("n_max_list", "cutoffs must be strictly increasing"));
    }
    let mut energies = Vec::with_capacity(n_max_list.len());
    let mut last = None;
    for &n_max in n_max_list {
        let p = params.with_n_max(n_max);
        p.validate()?;
        let sector = enumerate_sector(&p, charge);
        let gs = ground_state(&p, &sector, opts)?;
        if let Some((prev_n, prev_e)) = energies.last().copied() {
            let slack = 1e-9 * f64::max(1.0, gs.energy.abs());
            if gs.energy > prev_e + slack {
                return Err(JtdError::Numerical(format!(
                    "ground energy rose from {prev_e} (n_max = {prev_n}) to {} (n_max = {n_max})",
                    gs.energy
                )));
            }
        }
        energies.push((n_max, gs.energy));
        last = Some(gs);
    }
    let mut result = last.expect("non-empty list");
    let converged = match energies.as_slice() {
        [.., (_, a), (_, b)] => (a - b).abs() < opts.rel_tol * b.abs(),
        _ => false,
    };
    result.converged = Some(converged);
    Ok(TruncationReport {
        energies,
        converged,
        result,
    })
}
