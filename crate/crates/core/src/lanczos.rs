//! Thick-restarted Lanczos with full reorthogonalization for the lowest
//! eigenpairs of a real symmetric operator.
//!
//! Eigenpairs are found one at a time. Each converged vector is locked and
//! projected out of every later Krylov basis, so degenerate levels are
//! recovered as separate pairs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{JtdError, Result};
use nalgebra::DMatrix;

use crate::linalg::symmetric_eigen;
use crate::sparse::Csr;

/// Anything that can apply a real symmetric matrix to a vector.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl SymmetricOperator for Csr {
    fn dim(&self) -> usize {
        Csr::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Absolute residual bound `‖A x − θ x‖` for acceptance.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            krylov_dim: 120,
            max_restarts: 60,
            tol: 1e-10,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn orthogonalize_once(w: &mut [f64], against: &[Vec<f64>]) {
    for q in against {
        let c = dot(q, w);
        axpy(-c, q, w);
    }
}

/// Residual norm of an approximate eigenpair.
pub fn residual<A: SymmetricOperator + ?Sized>(op: &A, value: f64, vector: &[f64]) -> f64 {
    let mut y = vec![0.0; vector.len()];
    op.apply(vector, &mut y);
    axpy(-value, vector, &mut y);
    norm(&y)
}

/// The `count` lowest eigenpairs, ascending.
pub fn lowest_eigenpairs<A: SymmetricOperator + ?Sized>(
    op: &A,
    count: usize,
    opts: &LanczosOptions,
) -> Result<Vec<EigenPair>> {
    let dim = op.dim();
    if count > dim {
        return Err(JtdError::Numerical(format!(
            "requested {count} eigenpairs of a {dim}-dimensional operator"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut pairs = Vec::with_capacity(count);
    let mut warm: Vec<Vec<f64>> = Vec::new();

    for _ in 0..count {
        let (pair, next_warm) = lowest_in_complement(op, &locked, &warm, &mut rng, opts)?;
        locked.push(pair.vector.clone());
        pairs.push(pair);
        warm = next_warm;
    }
    pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(pairs)
}

/// Growing orthonormal basis together with the operator images of its vectors.
struct Subspace<'a, A: ?Sized> {
    op: &'a A,
    locked: &'a [Vec<f64>],
    v: Vec<Vec<f64>>,
    av: Vec<Vec<f64>>,
}

impl<A: SymmetricOperator + ?Sized> Subspace<'_, A> {
    /// Orthogonalizes `x` against the locked vectors and the basis and adds
    /// it; returns false if nothing new is left.
    fn push(&mut self, mut x: Vec<f64>) -> bool {
        let n0 = norm(&x);
        if n0 == 0.0 {
            return false;
        }
        // both sets in every pass, so neither reintroduces the other
        for _ in 0..2 {
            orthogonalize_once(&mut x, self.locked);
            orthogonalize_once(&mut x, &self.v);
        }
        let n1 = norm(&x);
        if n1 <= 1e-10 * n0 {
            return false;
        }
        x.iter_mut().for_each(|e| *e /= n1);
        let mut ax = vec![0.0; x.len()];
        self.op.apply(&x, &mut ax);
        self.v.push(x);
        self.av.push(ax);
        true
    }

    fn combine(vectors: &[Vec<f64>], coef: impl Iterator<Item = f64>) -> Vec<f64> {
        let mut out = vec![0.0; vectors[0].len()];
        for (c, q) in coef.zip(vectors) {
            axpy(c, q, &mut out);
        }
        out
    }
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect()
}

/// Lowest eigenpair on the orthogonal complement of `locked`, by
/// Rayleigh-Ritz on a thick-restarted Krylov space. Also returns the next
/// few Ritz vectors as a warm start for the following pair.
fn lowest_in_complement<A: SymmetricOperator + ?Sized>(
    op: &A,
    locked: &[Vec<f64>],
    warm: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
    opts: &LanczosOptions,
) -> Result<(EigenPair, Vec<Vec<f64>>)> {
    let dim = op.dim();
    let available = dim - locked.len();
    let m_max = opts.krylov_dim.max(4).min(available);
    let keep = (m_max / 4).clamp(1, 20);
    let mut space = Subspace {
        op,
        locked,
        v: Vec::with_capacity(m_max),
        av: Vec::with_capacity(m_max),
    };
    for w in warm.iter().take(keep) {
        space.push(w.clone());
    }
    space.push(random_vector(rng, dim));
    let mut best_residual = f64::INFINITY;

    for _ in 0..=opts.max_restarts {
        while space.v.len() < m_max {
            let next = space.av.last().cloned().unwrap_or_else(|| random_vector(rng, dim));
            if !space.push(next) && !space.push(random_vector(rng, dim)) {
                break;
            }
        }
        let k = space.v.len();
        let mut h = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..=i {
                let x = 0.5 * (dot(&space.v[i], &space.av[j]) + dot(&space.v[j], &space.av[i]));
                h[(i, j)] = x;
                h[(j, i)] = x;
            }
        }
        let eig = symmetric_eigen(&h)?;
        let theta = eig.values[0];
        let x = Subspace::<A>::combine(&space.v, eig.vectors.column(0).iter().copied());
        let ax = Subspace::<A>::combine(&space.av, eig.vectors.column(0).iter().copied());
        let mut r = ax;
        axpy(-theta, &x, &mut r);
        let res = norm(&r);
        best_residual = best_residual.min(res);
        let complete = k == available;
        if res <= opts.tol || complete {
            let nx = norm(&x);
            let vector: Vec<f64> = x.iter().map(|e| e / nx).collect();
            let true_res = residual(op, theta, &vector);
            if true_res <= opts.tol || complete {
                let next_warm = (1..k.min(keep + 1))
                    .map(|c| Subspace::<A>::combine(&space.v, eig.vectors.column(c).iter().copied()))
                    .collect();
                return Ok((
                    EigenPair {
                        value: theta,
                        vector,
                        residual: true_res,
                    },
                    next_warm,
                ));
            }
        }

        // thick restart: lowest Ritz vectors plus the residual direction
        let ritz: Vec<Vec<f64>> = (0..k.min(keep))
            .map(|c| Subspace::<A>::combine(&space.v, eig.vectors.column(c).iter().copied()))
            .collect();
        space.v.clear();
        space.av.clear();
        for y in ritz {
            space.push(y);
        }
        space.push(r);
    }
    Err(JtdError::NoConvergence {
        solver: "lanczos",
        iterations: opts.max_restarts + 1,
        residual: best_residual,
    })
}
