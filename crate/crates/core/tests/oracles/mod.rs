//! Independent reference implementations used only by tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

// ---------------------------------------------------------------------------
// Cartesian spin-boson Hamiltonian

/// `(a_r†)^nr (a_l†)^nl |0⟩ / √(nr! nl!)` as amplitudes on `|p, q⟩`
/// (x and y occupations), indexed `p * stride + q`.
pub fn chiral_state_cartesian(n_r: u32, n_l: u32, stride: usize) -> Vec<(usize, C)> {
    let i = c(0.0, 1.0);
    let mut out: Vec<(usize, C)> = Vec::new();
    let pref = 2f64.powf(-((n_r + n_l) as f64) / 2.0) / (factorial(n_r) * factorial(n_l)).sqrt();
    for k in 0..=n_r {
        for l in 0..=n_l {
            let p = k + l;
            let q = n_r - k + n_l - l;
            let phase = i.powu(n_r - k) * (-i).powu(n_l - l);
            let amp = phase * (pref * binomial(n_r, k) * binomial(n_l, l) * (factorial(p) * factorial(q)).sqrt());
            let idx = p as usize * stride + q as usize;
            match out.iter_mut().find(|(j, _)| *j == idx) {
                Some(e) => e.1 += amp,
                None => out.push((idx, amp)),
            }
        }
    }
    out
}

/// Dense `ω(n_x+n_y) + ω₀J_z + λ/√(4j)[(J₊+J₋)(a_x+a_x†) + i(J₊−J₋)(a_y+a_y†)]`
/// with per-mode cutoff `cut`. Index `(m_idx * (cut+1) + p) * (cut+1) + q`.
pub fn cartesian_hamiltonian(omega: f64, omega0: f64, lambda: f64, two_j: u32, cut: usize) -> DMatrix<C> {
    let nb = cut + 1;
    let ns = two_j as usize + 1;
    let dim = ns * nb * nb;
    let j = two_j as f64 / 2.0;
    let g = lambda / (4.0 * j).sqrt();
    let idx = |mi: usize, p: usize, q: usize| (mi * nb + p) * nb + q;
    let mut h = DMatrix::<C>::zeros(dim, dim);
    for mi in 0..ns {
        let m = mi as f64 - j;
        for p in 0..nb {
            for q in 0..nb {
                let col = idx(mi, p, q);
                h[(col, col)] += c(omega * (p + q) as f64 + omega0 * m, 0.0);
                // J₊ |m⟩
                if mi + 1 < ns {
                    let jp = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
                    for (p2, f) in ladder(p, cut) {
                        h[(idx(mi + 1, p2, q), col)] += c(g * jp * f, 0.0);
                    }
                    for (q2, f) in ladder(q, cut) {
                        h[(idx(mi + 1, p, q2), col)] += c(0.0, g * jp * f);
                    }
                }
                // J₋ |m⟩
                if mi > 0 {
                    let jm = (j * (j + 1.0) - m * (m - 1.0)).sqrt();
                    for (p2, f) in ladder(p, cut) {
                        h[(idx(mi - 1, p2, q), col)] += c(g * jm * f, 0.0);
                    }
                    for (q2, f) in ladder(q, cut) {
                        h[(idx(mi - 1, p, q2), col)] += c(0.0, -g * jm * f);
                    }
                }
            }
        }
    }
    h
}

/// Non-zero entries of `(a + a†)|n⟩` within the cutoff.
fn ladder(n: usize, cut: usize) -> Vec<(usize, f64)> {
    let mut v = Vec::with_capacity(2);
    if n > 0 {
        v.push((n - 1, (n as f64).sqrt()));
    }
    if n < cut {
        v.push((n + 1, ((n + 1) as f64).sqrt()));
    }
    v
}

/// Spectrum of the Cartesian Hamiltonian compressed onto the span of the
/// chiral states with `n_r, n_l ≤ n_max`.
pub fn cartesian_compressed_spectrum(omega: f64, omega0: f64, lambda: f64, two_j: u32, n_max: u32) -> Vec<f64> {
    let cut = 2 * n_max as usize + 1;
    let nb = cut + 1;
    let h = cartesian_hamiltonian(omega, omega0, lambda, two_j, cut);
    let ns = two_j as usize + 1;
    let sub = ns * (n_max as usize + 1).pow(2);
    let mut v = DMatrix::<C>::zeros(h.nrows(), sub);
    let mut col = 0;
    for mi in 0..ns {
        for n_r in 0..=n_max {
            for n_l in 0..=n_max {
                for (k, a) in chiral_state_cartesian(n_r, n_l, nb) {
                    v[(mi * nb * nb + k, col)] = a;
                }
                col += 1;
            }
        }
    }
    let gram = v.adjoint() * &v;
    let id_err = (gram - DMatrix::<C>::identity(sub, sub)).iter().fold(0.0f64, |m, x| m.max(x.norm()));
    assert!(id_err < 1e-12, "chiral states not orthonormal: {id_err}");
    let hc = v.adjoint() * h * v;
    hermitian_eigenvalues(&hc)
}

pub fn hermitian_eigenvalues(m: &DMatrix<C>) -> Vec<f64> {
    let herm = (m + m.adjoint()) * c(0.5, 0.0);
    let mut e: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

// ---------------------------------------------------------------------------
// Three-mode Fock space and complex Lanczos

/// Sparse Hermitian matrix stored by columns.
pub struct Fock3 {
    pub levels: usize,
    col_ptr: Vec<usize>,
    rows: Vec<u32>,
    vals: Vec<C>,
}

/// Single-mode operator as a small dense matrix on `levels` Fock states.
pub type ModeOp = DMatrix<C>;

pub fn annihilation(levels: usize) -> ModeOp {
    let mut a = DMatrix::<C>::zeros(levels, levels);
    for n in 1..levels {
        a[(n - 1, n)] = c((n as f64).sqrt(), 0.0);
    }
    a
}

/// A sum of products of single-mode operators acting on three modes.
#[derive(Default)]
pub struct Terms {
    list: Vec<(C, Vec<(usize, ModeOp)>)>,
}

impl Terms {
    pub fn add(&mut self, coeff: C, factors: Vec<(usize, ModeOp)>) {
        self.list.push((coeff, factors));
    }

    pub fn build(&self, levels: usize) -> Fock3 {
        let n = levels;
        let dim = n * n * n;
        let sparse: Vec<(C, Vec<(usize, Vec<Vec<(usize, C)>>)>)> = self
            .list
            .iter()
            .map(|(k, fs)| {
                let fs = fs
                    .iter()
                    .map(|(mode, op)| {
                        let cols = (0..n)
                            .map(|cc| (0..n).filter(|&r| op[(r, cc)].norm() > 0.0).map(|r| (r, op[(r, cc)])).collect())
                            .collect();
                        (*mode, cols)
                    })
                    .collect();
                (*k, fs)
            })
            .collect();
        let mut col_ptr = vec![0usize];
        let mut rows = Vec::new();
        let mut vals = Vec::new();
        let mut acc = vec![c(0.0, 0.0); dim];
        let mut touched: Vec<usize> = Vec::new();
        let mut frontier: Vec<([usize; 3], C)> = Vec::new();
        let mut next = Vec::new();
        for col in 0..dim {
            let occ = [col / (n * n), (col / n) % n, col % n];
            for (k, fs) in &sparse {
                frontier.clear();
                frontier.push((occ, *k));
                for (mode, cols) in fs {
                    next.clear();
                    for (o, a) in &frontier {
                        for (r, v) in &cols[o[*mode]] {
                            let mut o2 = *o;
                            o2[*mode] = *r;
                            next.push((o2, a * v));
                        }
                    }
                    std::mem::swap(&mut frontier, &mut next);
                }
                for (o, a) in &frontier {
                    let r = (o[0] * n + o[1]) * n + o[2];
                    if acc[r] == c(0.0, 0.0) {
                        touched.push(r);
                    }
                    acc[r] += a;
                }
            }
            touched.sort_unstable();
            for &r in &touched {
                if acc[r].norm() > 1e-14 {
                    rows.push(r as u32);
                    vals.push(acc[r]);
                }
                acc[r] = c(0.0, 0.0);
            }
            touched.clear();
            col_ptr.push(rows.len());
        }
        Fock3 {
            levels,
            col_ptr,
            rows,
            vals,
        }
    }
}

impl Fock3 {
    pub fn dim(&self) -> usize {
        self.col_ptr.len() - 1
    }

    pub fn apply(&self, x: &[C], y: &mut [C]) {
        y.iter_mut().for_each(|v| *v = c(0.0, 0.0));
        for col in 0..self.dim() {
            let xc = x[col];
            for k in self.col_ptr[col]..self.col_ptr[col + 1] {
                y[self.rows[k] as usize] += self.vals[k] * xc;
            }
        }
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for col in 0..self.dim() {
            for k in self.col_ptr[col]..self.col_ptr[col + 1] {
                let r = self.rows[k] as usize;
                let back = (self.col_ptr[r]..self.col_ptr[r + 1])
                    .find(|&i| self.rows[i] as usize == col)
                    .map_or(c(0.0, 0.0), |i| self.vals[i]);
                worst = worst.max((self.vals[k] - back.conj()).norm());
            }
        }
        worst
    }
}

fn cdot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Converged low-lying Ritz values of a Hermitian operator (distinct levels
/// only; a single Krylov sequence cannot resolve multiplicities).
pub fn lanczos_levels(h: &Fock3, window: f64, max_steps: usize, seed: u64) -> Vec<f64> {
    let dim = h.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<C> = (0..dim).map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    let nrm = cdot(&v, &v).re.sqrt();
    v.iter_mut().for_each(|x| *x /= nrm);
    let mut basis: Vec<Vec<C>> = vec![v];
    let (mut alpha, mut beta) = (Vec::<f64>::new(), Vec::<f64>::new());
    let mut w = vec![c(0.0, 0.0); dim];
    let mut prev_count = usize::MAX;
    loop {
        let k = basis.len() - 1;
        h.apply(&basis[k], &mut w);
        alpha.push(cdot(&basis[k], &w).re);
        for _ in 0..2 {
            for b in &basis {
                let o = cdot(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= o * y);
            }
        }
        let b = cdot(&w, &w).re.sqrt();
        let m = alpha.len();
        if m % 10 == 0 || m == max_steps || b < 1e-12 {
            let mut t = DMatrix::<f64>::zeros(m, m);
            for i in 0..m {
                t[(i, i)] = alpha[i];
                if i + 1 < m {
                    t[(i, i + 1)] = beta[i];
                    t[(i + 1, i)] = beta[i];
                }
            }
            let eig = t.symmetric_eigen();
            let mut pairs: Vec<(f64, f64)> = (0..m)
                .map(|i| (eig.eigenvalues[i], (b * eig.eigenvectors[(m - 1, i)]).abs()))
                .collect();
            pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
            let e0 = pairs[0].0;
            let inside: Vec<&(f64, f64)> = pairs.iter().filter(|p| p.0 < e0 + window).collect();
            let settled = inside.iter().all(|p| p.1 < 1e-9) && inside.len() == prev_count;
            if settled || b < 1e-12 {
                return inside.iter().map(|p| p.0).collect();
            }
            prev_count = inside.len();
            assert!(m < max_steps, "Lanczos oracle did not converge in {max_steps} steps");
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
}

/// Eigenvalues of the symmetric tridiagonal `(a, b)` below `x`, by Sturm count.
fn sturm_count(a: &[f64], b: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0f64;
    for i in 0..a.len() {
        let off = if i == 0 { 0.0 } else { b[i - 1] * b[i - 1] };
        d = a[i] - x - if i == 0 { 0.0 } else { off / d };
        if d == 0.0 {
            d = -f64::EPSILON * (a[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// The k-th smallest eigenvalue (from 0) of a symmetric tridiagonal, by bisection.
fn tridiagonal_eigenvalue(a: &[f64], b: &[f64], k: usize, lo: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(a, b, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn tridiagonal_below(a: &[f64], b: &[f64], hi: f64, bound: f64) -> Vec<f64> {
    (0..sturm_count(a, b, hi))
        .map(|k| tridiagonal_eigenvalue(a, b, k, -bound, hi))
        .collect()
}

/// Distinct low-lying levels from Lanczos without reorthogonalization.
///
/// Ghost copies of converged values are merged and spurious Ritz values are
/// dropped by the Cullum–Willoughby test: a simple eigenvalue of `T_m` that is
/// also an eigenvalue of `T_m` with its first row and column removed. The
/// list is accepted once three checks in a row agree.
pub fn lanczos_levels_cw(h: &Fock3, window: f64, max_steps: usize, seed: u64) -> Vec<f64> {
    const CHECK: usize = 100;
    let dim = h.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<C> = (0..dim).map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    let nrm = cdot(&v, &v).re.sqrt();
    v.iter_mut().for_each(|x| *x /= nrm);
    let mut prev = vec![c(0.0, 0.0); dim];
    let mut w = vec![c(0.0, 0.0); dim];
    let (mut alpha, mut beta) = (Vec::<f64>::new(), Vec::<f64>::new());
    let mut history: Vec<Vec<f64>> = Vec::new();
    loop {
        h.apply(&v, &mut w);
        let a = cdot(&v, &w).re;
        let b_prev = beta.last().copied().unwrap_or(0.0);
        w.iter_mut().zip(&v).zip(&prev).for_each(|((x, vi), pi)| *x -= vi * a + pi * b_prev);
        alpha.push(a);
        let b = cdot(&w, &w).re.sqrt();
        let m = alpha.len();
        if m % CHECK == 0 || m == max_steps {
            let bound = alpha
                .iter()
                .enumerate()
                .map(|(i, x)| x.abs() + if i > 0 { beta[i - 1] } else { 0.0 } + beta.get(i).copied().unwrap_or(0.0))
                .fold(0.0f64, f64::max)
                + 1.0;
            let tol = 1e-11 * bound;
            let offs = &beta[..m - 1];
            let e0 = tridiagonal_eigenvalue(&alpha, offs, 0, -bound, bound);
            let top = e0 + window;
            let ritz = tridiagonal_below(&alpha, offs, top, bound);
            let reduced = tridiagonal_below(&alpha[1..], &offs[1.min(offs.len())..], top + tol, bound);
            let mut good = Vec::new();
            let mut i = 0;
            while i < ritz.len() {
                let mut j = i + 1;
                while j < ritz.len() && ritz[j] - ritz[j - 1] < tol {
                    j += 1;
                }
                let theta = ritz[i];
                let spurious = j == i + 1 && reduced.iter().any(|mu| (mu - theta).abs() < tol);
                if !spurious {
                    good.push(theta);
                }
                i = j;
            }
            history.push(good);
            let n = history.len();
            if n >= 3 {
                let agree = |x: &Vec<f64>, y: &Vec<f64>| {
                    x.len() == y.len() && x.iter().zip(y).all(|(p, q)| (p - q).abs() < 1e-9)
                };
                if agree(&history[n - 1], &history[n - 2]) && agree(&history[n - 2], &history[n - 3]) {
                    return history.pop().unwrap();
                }
            }
            assert!(m < max_steps, "Lanczos oracle did not settle in {max_steps} steps");
        }
        assert!(b > 1e-14, "Krylov space exhausted after {m} steps");
        beta.push(b);
        std::mem::swap(&mut prev, &mut v);
        v.iter_mut().zip(&w).for_each(|(x, y)| *x = y / b);
    }
}

/// `X = a + a†`, `P = i(a† − a)`.
fn x_op(levels: usize) -> ModeOp {
    let a = annihilation(levels);
    &a + a.adjoint()
}

fn p_op(levels: usize) -> ModeOp {
    let a = annihilation(levels);
    (a.adjoint() - a) * c(0.0, 1.0)
}

fn n_op(levels: usize) -> ModeOp {
    let a = annihilation(levels);
    a.adjoint() * a
}

/// Normal-phase quadratic Hamiltonian on modes (x, y, b):
/// `ω(N_x + N_y) + ω₀N_b + (λ/√2)(X_x X_b + X_y P_b)`.
pub fn fock_normal(omega: f64, omega0: f64, lambda: f64, n_max: usize) -> Fock3 {
    let n = n_max + 1;
    let g = lambda / 2f64.sqrt();
    let mut t = Terms::default();
    t.add(c(omega, 0.0), vec![(0, n_op(n))]);
    t.add(c(omega, 0.0), vec![(1, n_op(n))]);
    t.add(c(omega0, 0.0), vec![(2, n_op(n))]);
    t.add(c(g, 0.0), vec![(0, x_op(n)), (2, x_op(n))]);
    t.add(c(g, 0.0), vec![(1, x_op(n)), (2, p_op(n))]);
    t.build(n)
}

/// Coefficients of the broken-phase quadratic Hamiltonian
/// `ω(N_x+N_y) + ω̃N_b + g₁X_xX_b + g₂X_yP_b + g₃X_b²`.
pub struct BrokenCoefficients {
    pub omega: f64,
    pub omega_b: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

pub fn broken_coefficients(omega: f64, omega0: f64, lambda: f64) -> BrokenCoefficients {
    let s = omega * omega0 / (2.0 * lambda * lambda);
    BrokenCoefficients {
        omega,
        omega_b: omega0 * (1.0 + s) / (2.0 * s),
        g1: lambda * s / (1.0 + s).sqrt(),
        g2: lambda / 2.0 * (1.0 + s).sqrt(),
        g3: lambda * lambda / (4.0 * omega) * (1.0 - s) * (3.0 + s) / (1.0 + s),
    }
}

/// `H = ½ rᵀ Q r` in `r = (x_x, x_y, x_b, p_x, p_y, p_b)` with `a = (x + ip)/√2`
/// (zero-point constant dropped).
pub fn broken_quadratic_form(k: &BrokenCoefficients) -> DMatrix<f64> {
    let mut q = DMatrix::<f64>::zeros(6, 6);
    for (i, f) in [(0, k.omega), (1, k.omega), (2, k.omega_b)] {
        q[(i, i)] += f;
        q[(i + 3, i + 3)] += f;
    }
    q[(0, 2)] += 2.0 * k.g1;
    q[(2, 0)] += 2.0 * k.g1;
    q[(1, 5)] += 2.0 * k.g2;
    q[(5, 1)] += 2.0 * k.g2;
    q[(2, 2)] += 4.0 * k.g3;
    q
}

/// Symplectic frequencies of `½ rᵀ Q r`, ascending (a free mode shows up as
/// a near-zero entry).
pub fn symplectic_frequencies(q: &DMatrix<f64>) -> Vec<f64> {
    let n = q.nrows() / 2;
    let mut jm = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        jm[(i, i + n)] = 1.0;
        jm[(i + n, i)] = -1.0;
    }
    let mut e: Vec<f64> = (&jm * q).complex_eigenvalues().iter().map(|z| z.norm()).collect();
    e.sort_by(f64::total_cmp);
    e.into_iter().step_by(2).collect()
}

/// Pins the free (Goldstone) coordinate of the broken-phase quadratic form:
/// returns `(q, k)` such that adding `(k/2)(qᵀr)²` turns the free particle
/// into an oscillator of frequency `omega_pin` and leaves the others alone.
pub fn goldstone_pin(q: &DMatrix<f64>, omega_pin: f64) -> (DVector<f64>, f64) {
    let eig = q.clone().symmetric_eigen();
    let (i0, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("6x6");
    let null = eig.eigenvectors.column(i0).into_owned();
    let mut jm = DMatrix::<f64>::zeros(6, 6);
    for i in 0..3 {
        jm[(i, i + 3)] = 1.0;
        jm[(i + 3, i)] = -1.0;
    }
    let cvec = -(&jm * null);
    let pinv = q.clone().pseudo_inverse(1e-10).expect("pseudo-inverse");
    let mass = (cvec.transpose() * &pinv * &cvec)[(0, 0)];
    let qvec = &jm * &pinv * &cvec / mass;
    (qvec, omega_pin * omega_pin * mass)
}

/// Broken-phase Fock Hamiltonian plus the Goldstone pin.
pub fn fock_broken_pinned(omega: f64, omega0: f64, lambda: f64, n_max: usize, omega_pin: f64) -> Fock3 {
    let n = n_max + 1;
    let k = broken_coefficients(omega, omega0, lambda);
    let (qv, stiff) = goldstone_pin(&broken_quadratic_form(&k), omega_pin);
    let mut t = Terms::default();
    t.add(c(k.omega, 0.0), vec![(0, n_op(n))]);
    t.add(c(k.omega, 0.0), vec![(1, n_op(n))]);
    t.add(c(k.omega_b, 0.0), vec![(2, n_op(n))]);
    t.add(c(k.g1, 0.0), vec![(0, x_op(n)), (2, x_op(n))]);
    t.add(c(k.g2, 0.0), vec![(1, x_op(n)), (2, p_op(n))]);
    t.add(c(k.g3, 0.0), vec![(2, &x_op(n) * x_op(n))]);
    // r_i = X/√2 or P/√2 on mode i mod 3
    let r = |i: usize| -> (usize, ModeOp) {
        let op = if i < 3 { x_op(n) } else { p_op(n) };
        (i % 3, op / c(2f64.sqrt(), 0.0))
    };
    for i in 0..6 {
        for jj in 0..6 {
            let coeff = 0.5 * stiff * qv[i] * qv[jj];
            if coeff.abs() < 1e-15 {
                continue;
            }
            let (mi, oi) = r(i);
            let (mj, oj) = r(jj);
            if mi == mj {
                t.add(c(coeff, 0.0), vec![(mi, oi * oj)]);
            } else {
                t.add(c(coeff, 0.0), vec![(mj, oj), (mi, oi)]);
            }
        }
    }
    t.build(n)
}

/// Distinct excitation energies `Σ n_i ε_i` (ε = 0 entries skipped) up to `window`.
pub fn harmonic_levels(eps: &[f64], window: f64) -> Vec<f64> {
    let eps: Vec<f64> = eps.iter().copied().filter(|e| *e > 1e-9).collect();
    let mut out = vec![0.0];
    let mut frontier = vec![0.0];
    while let Some(e) = frontier.pop() {
        for x in &eps {
            let v = e + x;
            if v < window && !out.iter().any(|o: &f64| (o - v).abs() < 1e-9) {
                out.push(v);
                frontier.push(v);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Midpoint between the harmonic levels that bracket `target`, so that a
/// window edge never sits on a level.
pub fn safe_window(eps: &[f64], target: f64) -> f64 {
    let levels = harmonic_levels(eps, 2.0 * target + 1.0);
    let above = levels.iter().position(|l| *l > target).expect("levels above target");
    (levels[above] + levels[above - 1]) / 2.0
}

/// Worst distance between two level lists in either direction.
pub fn level_mismatch(a: &[f64], b: &[f64]) -> f64 {
    let near = |x: f64, set: &[f64]| set.iter().fold(f64::INFINITY, |m, y| m.min((x - y).abs()));
    a.iter().map(|x| near(*x, b)).chain(b.iter().map(|x| near(*x, a))).fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Ion chain

/// Equilibrium positions by plain Newton on the Coulomb force balance,
/// started from an evenly spaced chain.
pub fn chain_positions(n: usize) -> Vec<f64> {
    let mut z: Vec<f64> = (0..n).map(|i| (i as f64 - (n as f64 - 1.0) / 2.0) * 2.0 / (n as f64).powf(0.56)).collect();
    for _ in 0..200 {
        let mut f = DVector::<f64>::zeros(n);
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            f[i] = z[i];
            jac[(i, i)] = 1.0;
            for k in 0..n {
                if k == i {
                    continue;
                }
                let d = z[i] - z[k];
                f[i] -= d.signum() / (d * d);
                let h = 2.0 / d.abs().powi(3);
                jac[(i, i)] += h;
                jac[(i, k)] -= h;
            }
        }
        let step = jac.lu().solve(&f).expect("non-singular Jacobian");
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = z.iter().zip(step.iter()).map(|(a, s)| a - t * s).collect();
            if trial.windows(2).all(|w| w[0] < w[1]) {
                z = trial;
                break;
            }
            t /= 2.0;
        }
        if step.amax() < 1e-14 {
            break;
        }
    }
    z
}

/// Sorted (descending) radial stiffness eigenvalues in units of ω_r².
pub fn radial_kappa(z: &[f64], aspect: f64) -> Vec<f64> {
    let n = z.len();
    let a2 = aspect * aspect;
    let mut k = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = 1.0;
        for l in 0..n {
            if l != i {
                let w = a2 / (z[i] - z[l]).abs().powi(3);
                k[(i, i)] -= w;
                k[(i, l)] = w;
            }
        }
    }
    let mut e: Vec<f64> = k.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(|a, b| b.total_cmp(a));
    e
}

/// Smallest N whose lowest radial eigenvalue is negative.
pub fn zigzag_scan(aspect: f64, n_max: usize) -> Option<usize> {
    (2..=n_max).find(|&n| radial_kappa(&chain_positions(n), aspect).last().copied().unwrap_or(1.0) < 0.0)
}
