//! Thermodynamic-limit (j → ∞) solution of the JTD model.
//!
//! The normal phase (λ ≤ λ_c) is diagonalized through B′, the symmetry-broken
//! phase (λ ≥ λ_c) through B″. Excitation energies are square roots of their
//! eigenvalues.

use crate::error::{invalid, JtdError, Result};

pub type Mat3 = [[f64; 3]; 3];

pub fn critical_coupling(omega: f64, omega0: f64) -> f64 {
    (omega * omega0 / 2.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldParams {
    pub omega: f64,
    pub omega0: f64,
    pub lambda: f64,
}

impl MeanFieldParams {
    pub fn new(omega: f64, omega0: f64, lambda: f64) -> Result<Self> {
        let p = Self { omega, omega0, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(invalid("omega", format!("must be positive and finite, got {}", self.omega)));
        }
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(invalid("omega0", format!("must be positive and finite, got {}", self.omega0)));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(invalid("lambda", format!("must be non-negative and finite, got {}", self.lambda)));
        }
        Ok(())
    }

    pub fn lambda_c(&self) -> f64 {
        critical_coupling(self.omega, self.omega0)
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self { lambda, ..*self }
    }

    /// `s = λ_c² / λ²`
    pub fn s(&self) -> f64 {
        self.lambda_c().powi(2) / (self.lambda * self.lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Normal,
    Broken,
}

impl Phase {
    pub fn label(&self) -> &'static str {
        match self {
            Phase::Normal => "normal",
            Phase::Broken => "broken",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldSolution {
    pub phase: Phase,
    /// `λ_c²/λ²`, broken phase only.
    pub s: Option<f64>,
    pub phi: f64,
    pub alpha_x_per_j: f64,
    pub alpha_y_per_j: f64,
    pub gamma_per_j: f64,
    /// Excitation energies, ascending.
    pub epsilon: [f64; 3],
    /// Coefficient of `j` in the ground energy.
    pub e_ground_per_j: f64,
    /// j-independent remainder of the ground energy.
    pub e_ground_const: f64,
    /// `(m₊, m₋)` in the normal phase, `(M₊, M₋)` in the broken phase.
    pub masses: (f64, f64),
}

impl MeanFieldSolution {
    pub fn ground_energy(&self, j: f64) -> f64 {
        self.e_ground_per_j * j + self.e_ground_const
    }
}

/// Inverse normal-phase masses `1/m± = 1 ± λ√(2/ω₀ω)`.
fn inverse_masses(p: &MeanFieldParams) -> (f64, f64) {
    let r = p.lambda * (2.0 / (p.omega0 * p.omega)).sqrt();
    (1.0 + r, 1.0 - r)
}

/// Stiffness part of B′: `B′ = D K D` with `D = diag(1, 1/√m₊, 1/√m₋)`.
fn normal_stiffness(p: &MeanFieldParams) -> Mat3 {
    let (w, w0, l) = (p.omega, p.omega0, p.lambda);
    let c = l * (w0 * w).sqrt();
    let d = (w * w + w0 * w0) / 2.0;
    let o = (w * w - w0 * w0) / 2.0;
    [[w * w, -c, c], [-c, d, o], [c, o, d]]
}

/// The normal-phase matrix B′. Only defined for λ ≤ λ_c.
pub fn b_prime(p: &MeanFieldParams) -> Result<Mat3> {
    p.validate()?;
    let (ip, im) = inverse_masses(p);
    if p.lambda > p.lambda_c() {
        return Err(JtdError::PhaseDomain {
            phase: "normal",
            lambda: p.lambda,
            lambda_c: p.lambda_c(),
        });
    }
    debug_assert!(ip > 0.0 && im >= -1e-12);
    Ok(b_prime_continued(p))
}

/// B′ built with `|1/m±|`, which keeps it real symmetric past λ_c. It is
/// congruent to the stiffness matrix, whose determinant
/// `ω³ω₀(ωω₀ − 2λ²)` turns negative at λ_c, so one eigenvalue goes negative
/// there. Equals `b_prime` for λ ≤ λ_c.
pub fn b_prime_continued(p: &MeanFieldParams) -> Mat3 {
    let (ip, im) = inverse_masses(p);
    let d = [1.0, ip.abs().sqrt(), im.abs().sqrt()];
    let k = normal_stiffness(p);
    let mut b = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = d[i] * d[j] * k[i][j];
        }
    }
    b
}

/// The broken-phase matrix B″. Only defined for λ ≥ λ_c.
pub fn b_double_prime(p: &MeanFieldParams) -> Result<Mat3> {
    p.validate()?;
    let lc = p.lambda_c();
    if p.lambda < lc {
        return Err(JtdError::PhaseDomain {
            phase: "broken",
            lambda: p.lambda,
            lambda_c: lc,
        });
    }
    let (w, w0, l) = (p.omega, p.omega0, p.lambda);
    let s = p.s().min(1.0);
    let xi2 = w * w / 2.0 + w0 * w0 / (2.0 * s * s);
    let nu = xi2 - w0 * w0 / (s * s);
    let (mp, mm) = (1.0 + s, 1.0 - s);
    let l2 = l * l;
    let b12 = l2 * (2.0 * mm).sqrt();
    let b13 = nu * (mp * mm).sqrt();
    let b23 = -l2 * (2.0 * mp).sqrt();
    Ok([[xi2 * mm, b12, b13], [b12, w * w, b23], [b13, b23, xi2 * mp]])
}

fn det3(a: &Mat3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Eigenvalues of a real symmetric 3×3 matrix, ascending: trigonometric
/// closed form followed by Newton polishing on the characteristic polynomial.
pub fn sym3_eigenvalues(a: &Mat3) -> [f64; 3] {
    let p1 = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
    let mut ev = if p1 == 0.0 {
        [a[0][0], a[1][1], a[2][2]]
    } else {
        let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
        let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        let mut b = *a;
        for (i, row) in b.iter_mut().enumerate() {
            row[i] -= q;
            row.iter_mut().for_each(|x| *x /= p);
        }
        let r = (det3(&b) / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let hi = q + 2.0 * p * phi.cos();
        let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
        [lo, 3.0 * q - hi - lo, hi]
    };

    // det(A − xI) = −x³ + c2 x² − c1 x + c0
    let c2 = a[0][0] + a[1][1] + a[2][2];
    let c1 = a[0][0] * a[1][1] + a[0][0] * a[2][2] + a[1][1] * a[2][2] - a[0][1].powi(2) - a[0][2].powi(2) - a[1][2].powi(2);
    let c0 = det3(a);
    let f = |x: f64| ((-x + c2) * x - c1) * x + c0;
    let df = |x: f64| (-3.0 * x + 2.0 * c2) * x - c1;
    for x in ev.iter_mut() {
        for _ in 0..4 {
            let d = df(*x);
            if d == 0.0 {
                break;
            }
            let next = *x - f(*x) / d;
            if !next.is_finite() || f(next).abs() >= f(*x).abs() {
                break;
            }
            *x = next;
        }
    }
    ev.sort_by(f64::total_cmp);
    ev
}

fn max_abs(a: &Mat3) -> f64 {
    a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn normal_spectrum(p: &MeanFieldParams) -> Result<MeanFieldSolution> {
    let b = b_prime(p)?;
    let ev = sym3_eigenvalues(&b);
    let floor = -1e-9 * max_abs(&b).max(1.0);
    if ev[0] < floor {
        return Err(JtdError::Numerical(format!("B′ has a negative eigenvalue {}", ev[0])));
    }
    let epsilon = ev.map(|x| x.max(0.0).sqrt());
    let (ip, im) = inverse_masses(p);
    Ok(MeanFieldSolution {
        phase: Phase::Normal,
        s: None,
        phi: 0.0,
        alpha_x_per_j: 0.0,
        alpha_y_per_j: 0.0,
        gamma_per_j: 0.0,
        epsilon,
        e_ground_per_j: -p.omega0,
        e_ground_const: epsilon.iter().sum::<f64>() / 2.0 - p.omega0 / 2.0 - p.omega,
        masses: (1.0 / ip, 1.0 / im),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Displacement {
    pub s: f64,
    pub alpha_x: f64,
    pub alpha_y: f64,
    pub gamma: f64,
    pub alpha_x_per_j: f64,
    pub alpha_y_per_j: f64,
    pub gamma_per_j: f64,
}

/// Broken-phase displacements for spin length `j` and angle `phi`.
pub fn displacement_params(p: &MeanFieldParams, j: f64, phi: f64) -> Result<Displacement> {
    p.validate()?;
    if !(j.is_finite() && j > 0.0) {
        return Err(invalid("j", format!("must be positive, got {j}")));
    }
    let lc = p.lambda_c();
    if p.lambda < lc {
        return Err(JtdError::PhaseDomain {
            phase: "broken",
            lambda: p.lambda,
            lambda_c: lc,
        });
    }
    let s = p.s().min(1.0);
    let amp = (p.lambda / p.omega) * (j * (1.0 - s * s)).sqrt();
    let sqrt_ax = amp * phi.cos();
    let sqrt_ay = amp * phi.sin();
    let sqrt_g = (j * (1.0 - s)).sqrt();
    let (alpha_x, alpha_y, gamma) = (sqrt_ax * sqrt_ax, sqrt_ay * sqrt_ay, sqrt_g * sqrt_g);
    Ok(Displacement {
        s,
        alpha_x,
        alpha_y,
        gamma,
        alpha_x_per_j: alpha_x / j,
        alpha_y_per_j: alpha_y / j,
        gamma_per_j: gamma / j,
    })
}

pub fn broken_spectrum(p: &MeanFieldParams, phi: f64) -> Result<MeanFieldSolution> {
    let b = b_double_prime(p)?;
    let ev = sym3_eigenvalues(&b);
    let zero = 1e-9 * max_abs(&b);
    if ev[0] < -zero {
        return Err(JtdError::Numerical(format!("B″ has a negative eigenvalue {}", ev[0])));
    }
    if ev[0].abs() >= zero || ev[1].abs() < zero {
        return Err(JtdError::Numerical(format!(
            "B″ should have exactly one zero eigenvalue, got {ev:?}"
        )));
    }
    let epsilon = [0.0, ev[1].sqrt(), ev[2].sqrt()];
    let d = displacement_params(p, 1.0, phi)?;
    let s = d.s;
    let (w, w0, l) = (p.omega, p.omega0, p.lambda);
    Ok(MeanFieldSolution {
        phase: Phase::Broken,
        s: Some(s),
        phi,
        alpha_x_per_j: d.alpha_x_per_j,
        alpha_y_per_j: d.alpha_y_per_j,
        gamma_per_j: d.gamma_per_j,
        epsilon,
        e_ground_per_j: -(l * l / w + w0 * w0 * w / (4.0 * l * l)),
        e_ground_const: (epsilon[1] + epsilon[2]) / 2.0 - w - (w0 / (4.0 * s)) * (1.0 + s) - (l * l / (2.0 * w)) * (1.0 - s),
        masses: (1.0 + s, 1.0 - s),
    })
}

/// Normal branch below λ_c, broken branch at and above it.
pub fn solve(p: &MeanFieldParams, phi: f64) -> Result<MeanFieldSolution> {
    if p.lambda < p.lambda_c() {
        normal_spectrum(p)
    } else {
        broken_spectrum(p, phi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldObservables {
    pub n_over_j: f64,
    pub jz_over_j: f64,
    pub coherence_over_j2: f64,
    pub jx2_over_j2: f64,
    pub jy2_over_j2: f64,
    /// `√(α_x/j)`, `√(α_y/j)`: multiply by `√j` for `x₀/q₀`, `y₀/q₀`.
    pub x0_over_q0_sqrt_j: f64,
    pub y0_over_q0_sqrt_j: f64,
}

impl MeanFieldObservables {
    /// Radial displacement `(x₀, y₀)` in units of q₀ for spin length `j`.
    pub fn displacement_over_q0(&self, j: f64) -> (f64, f64) {
        (self.x0_over_q0_sqrt_j * j.sqrt(), self.y0_over_q0_sqrt_j * j.sqrt())
    }
}

pub fn order_parameters(p: &MeanFieldParams, phi: f64) -> Result<MeanFieldObservables> {
    p.validate()?;
    if p.lambda < p.lambda_c() {
        return Ok(MeanFieldObservables {
            n_over_j: 0.0,
            jz_over_j: -1.0,
            coherence_over_j2: 0.0,
            jx2_over_j2: 0.0,
            jy2_over_j2: 0.0,
            x0_over_q0_sqrt_j: 0.0,
            y0_over_q0_sqrt_j: 0.0,
        });
    }
    let d = displacement_params(p, 1.0, phi)?;
    let s = d.s;
    let coherence = 1.0 - s * s;
    Ok(MeanFieldObservables {
        n_over_j: d.alpha_x_per_j + d.alpha_y_per_j,
        jz_over_j: d.gamma_per_j - 1.0,
        coherence_over_j2: coherence,
        jx2_over_j2: coherence * phi.cos().powi(2),
        jy2_over_j2: coherence * phi.sin().powi(2),
        x0_over_q0_sqrt_j: d.alpha_x_per_j.sqrt(),
        y0_over_q0_sqrt_j: d.alpha_y_per_j.sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub lambda: f64,
    pub phase: Phase,
    pub epsilon: [f64; 3],
}

/// Relative offset used for the one-sided limits at λ_c.
pub const CONTINUITY_OFFSET: f64 = 1e-6;

/// Largest mismatch between the sorted one-sided spectra at λ_c.
pub fn continuity_mismatch(omega: f64, omega0: f64) -> Result<f64> {
    let lc = critical_coupling(omega, omega0);
    let below = normal_spectrum(&MeanFieldParams::new(omega, omega0, lc * (1.0 - CONTINUITY_OFFSET))?)?;
    let above = broken_spectrum(&MeanFieldParams::new(omega, omega0, lc * (1.0 + CONTINUITY_OFFSET))?, 0.0)?;
    Ok(below
        .epsilon
        .iter()
        .zip(&above.epsilon)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
}

/// ε(λ) across a grid straddling λ_c, with a continuity check at λ_c.
pub fn spectrum_branch(omega: f64, omega0: f64, lambdas: &[f64]) -> Result<Vec<BranchPoint>> {
    let lc = critical_coupling(omega, omega0);
    let lo = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo <= lc && hi >= lc) {
        return Err(invalid("lambda grid", format!("grid [{lo}, {hi}] does not straddle λ_c = {lc}")));
    }
    let gap = continuity_mismatch(omega, omega0)?;
    if gap > 1e-3 * omega {
        return Err(JtdError::Numerical(format!(
            "spectrum jumps by {gap} across λ_c"
        )));
    }
    lambdas
        .iter()
        .map(|&lambda| {
            let sol = solve(&MeanFieldParams::new(omega, omega0, lambda)?, 0.0)?;
            Ok(BranchPoint {
                lambda,
                phase: sol.phase,
                epsilon: sol.epsilon,
            })
        })
        .collect()
}
