//! Truncated JTD Hilbert space `{|j,m⟩ ⊗ |n_r,n_l⟩}` blocked by the U(1)
//! charge `C = n_r − n_l − m`.
//!
//! Spin projections and charges can be half-integers, so they are stored
//! doubled (`two_m`, `two_c`).

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{invalid, JtdError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub omega: f64,
    pub omega0: f64,
    pub lambda: f64,
    /// `2j`, i.e. the number of ions.
    pub two_j: u32,
    /// Per-mode cutoff applied to `n_r` and `n_l` separately.
    pub n_max: u32,
}

impl ModelParams {
    pub fn new(omega: f64, omega0: f64, lambda: f64, two_j: u32, n_max: u32) -> Result<Self> {
        let p = Self {
            omega,
            omega0,
            lambda,
            two_j,
            n_max,
        };
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
        if self.two_j < 1 {
            return Err(invalid("j", "need at least one spin (2j ≥ 1)"));
        }
        if self.n_max < 1 {
            return Err(invalid("n_max", "Fock cutoff must be at least 1"));
        }
        Ok(())
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self { lambda, ..*self }
    }

    pub fn with_n_max(&self, n_max: u32) -> Self {
        Self { n_max, ..*self }
    }

    /// Dimension of the full truncated space `(2j+1)(n_max+1)²`.
    pub fn full_dim(&self) -> usize {
        (self.two_j as usize + 1) * (self.n_max as usize + 1).pow(2)
    }
}

/// A U(1) charge value, stored doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Charge {
    pub twice: i64,
}

impl Charge {
    pub fn from_twice(twice: i64) -> Self {
        Self { twice }
    }

    /// Nearest representable charge to `value` (rounded to a multiple of ½).
    pub fn from_f64(value: f64) -> Self {
        Self {
            twice: (2.0 * value).round() as i64,
        }
    }

    pub fn value(&self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// The charge `C = j` that holds `|m = −j⟩ ⊗ |0,0⟩`.
    pub fn top(two_j: u32) -> Self {
        Self { twice: two_j as i64 }
    }

    pub fn neg(&self) -> Self {
        Self { twice: -self.twice }
    }

    /// Whether `C − j` is an integer.
    pub fn compatible(&self, two_j: u32) -> bool {
        (self.twice - two_j as i64).rem_euclid(2) == 0
    }
}

impl fmt::Display for Charge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    pub two_m: i32,
    pub n_r: u32,
    pub n_l: u32,
}

impl BasisState {
    pub fn m(&self) -> f64 {
        self.two_m as f64 / 2.0
    }

    pub fn charge(&self) -> Charge {
        Charge::from_twice(2 * (self.n_r as i64 - self.n_l as i64) - self.two_m as i64)
    }

    pub fn phonons(&self) -> u32 {
        self.n_r + self.n_l
    }

    /// `(−1)^{n_r + n_l + m + j}`
    pub fn parity(&self, two_j: u32) -> i32 {
        let twice = 2 * (self.n_r + self.n_l) as i64 + self.two_m as i64 + two_j as i64;
        debug_assert!(twice % 2 == 0);
        if (twice / 2).rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChargeSector {
    pub charge: Charge,
    pub two_j: u32,
    pub n_max: u32,
    pub states: Vec<BasisState>,
    index: HashMap<BasisState, usize>,
}

impl ChargeSector {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, state: &BasisState) -> Option<usize> {
        self.index.get(state).copied()
    }

    /// Common parity of the sector, `None` when empty.
    pub fn parity(&self) -> Option<i32> {
        self.states.first().map(|s| s.parity(self.two_j))
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }
}

/// All states with `n_r − n_l − m = C`, ordered lexicographically in `(m, n_l)`.
pub fn enumerate_sector(params: &ModelParams, charge: Charge) -> ChargeSector {
    let two_j = params.two_j as i64;
    let n_max = params.n_max as i64;
    let mut states = Vec::new();
    if charge.compatible(params.two_j) {
        for two_m in (-two_j..=two_j).step_by(2) {
            // n_r = C + m + n_l; C + m is an integer here
            let shift = (charge.twice + two_m) / 2;
            for n_l in 0..=n_max {
                let n_r = shift + n_l;
                if (0..=n_max).contains(&n_r) {
                    states.push(BasisState {
                        two_m: two_m as i32,
                        n_r: n_r as u32,
                        n_l: n_l as u32,
                    });
                }
            }
        }
    }
    let index = states.iter().enumerate().map(|(k, s)| (*s, k)).collect();
    ChargeSector {
        charge,
        two_j: params.two_j,
        n_max: params.n_max,
        states,
        index,
    }
}

/// Every charge with a non-empty sector: `C ∈ [−j − n_max, j + n_max]`.
pub fn feasible_charges(params: &ModelParams) -> Vec<Charge> {
    let lo = -(params.two_j as i64) - 2 * params.n_max as i64;
    let hi = params.two_j as i64 + 2 * params.n_max as i64;
    (lo..=hi).step_by(2).map(Charge::from_twice).collect()
}

/// Amplitude types accepted by the expectation-value helpers.
pub trait Amplitude: Copy {
    fn norm_sqr(&self) -> f64;
}

impl Amplitude for f64 {
    fn norm_sqr(&self) -> f64 {
        self * self
    }
}

impl Amplitude for Complex64 {
    fn norm_sqr(&self) -> f64 {
        Complex64::norm_sqr(self)
    }
}

pub const NORM_TOL: f64 = 1e-10;

pub(crate) fn check_normalized<T: Amplitude>(vector: &[T]) -> Result<f64> {
    let norm2: f64 = vector.iter().map(Amplitude::norm_sqr).sum();
    if (norm2.sqrt() - 1.0).abs() > NORM_TOL {
        return Err(JtdError::NotNormalized { norm: norm2.sqrt() });
    }
    Ok(norm2)
}

/// `⟨n_x + n_y⟩` of a sector state. The chiral rotation preserves the total
/// occupation, so this is `Σ |ψ_s|² (n_r + n_l)`.
pub fn chiral_to_cartesian_occupations<T: Amplitude>(sector: &ChargeSector, vector: &[T]) -> Result<f64> {
    if vector.len() != sector.dim() {
        return Err(invalid(
            "vector",
            format!("length {} does not match sector dimension {}", vector.len(), sector.dim()),
        ));
    }
    check_normalized(vector)?;
    Ok(sector
        .states
        .iter()
        .zip(vector)
        .map(|(s, a)| a.norm_sqr() * s.phonons() as f64)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(two_j: u32, n_max: u32) -> ModelParams {
        ModelParams::new(1.0, 1.0, 0.0, two_j, n_max).unwrap()
    }

    fn brute_force(p: &ModelParams, c: Charge) -> Vec<BasisState> {
        let mut out = Vec::new();
        for two_m in (-(p.two_j as i32)..=p.two_j as i32).step_by(2) {
            for n_r in 0..=p.n_max {
                for n_l in 0..=p.n_max {
                    let s = BasisState { two_m, n_r, n_l };
                    if s.charge() == c {
                        out.push(s);
                    }
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn spin_half_single_excitation_sector() {
        let p = params(1, 1);
        let sec = enumerate_sector(&p, Charge::from_twice(1));
        let mut got = sec.states.clone();
        got.sort();
        assert_eq!(got, brute_force(&p, Charge::from_twice(1)));
        let expect = [
            BasisState { two_m: -1, n_r: 0, n_l: 0 },
            BasisState { two_m: -1, n_r: 1, n_l: 1 },
            BasisState { two_m: 1, n_r: 1, n_l: 0 },
        ];
        assert_eq!(sec.states, expect);
    }

    #[test]
    fn forced_single_state() {
        let p = ModelParams {
            omega: 1.0,
            omega0: 1.0,
            lambda: 0.0,
            two_j: 2,
            n_max: 0,
        };
        let sec = enumerate_sector(&p, Charge::from_twice(-2));
        assert_eq!(sec.states, vec![BasisState { two_m: 2, n_r: 0, n_l: 0 }]);
    }

    #[test]
    fn incompatible_charge_is_empty() {
        let sec = enumerate_sector(&params(2, 3), Charge::from_twice(1));
        assert!(sec.is_empty());
        assert_eq!(sec.parity(), None);
    }

    #[test]
    fn exhaustive_partition_and_parity() {
        for two_j in 1..=4 {
            for n_max in 1..=3 {
                let p = params(two_j, n_max);
                let mut total = 0;
                for c in feasible_charges(&p) {
                    let sec = enumerate_sector(&p, c);
                    assert!(!sec.is_empty(), "2j={two_j} n_max={n_max} C={c}");
                    let mut got = sec.states.clone();
                    got.sort();
                    assert_eq!(got, brute_force(&p, c));
                    let par = sec.parity().unwrap();
                    assert!(sec.states.iter().all(|s| s.parity(two_j) == par));
                    for (k, s) in sec.states.iter().enumerate() {
                        assert_eq!(sec.index_of(s), Some(k));
                    }
                    assert!(sec.states.windows(2).all(|w| (w[0].two_m, w[0].n_l) < (w[1].two_m, w[1].n_l)));
                    total += sec.dim();
                }
                assert_eq!(total, p.full_dim());
            }
        }
    }

    #[test]
    fn mirrored_sectors_have_equal_dimension() {
        for two_j in 1..=5 {
            for n_max in 1..=4 {
                let p = params(two_j, n_max);
                for c in feasible_charges(&p) {
                    assert_eq!(enumerate_sector(&p, c).dim(), enumerate_sector(&p, c.neg()).dim());
                }
            }
        }
    }

    #[test]
    fn occupations() {
        let p = params(1, 2);
        let sec = enumerate_sector(&p, Charge::from_twice(1));
        let vac = sec.index_of(&BasisState { two_m: -1, n_r: 0, n_l: 0 }).unwrap();
        let mut v = vec![0.0; sec.dim()];
        v[vac] = 1.0;
        assert_eq!(chiral_to_cartesian_occupations(&sec, &v).unwrap(), 0.0);

        let k = sec.index_of(&BasisState { two_m: 1, n_r: 2, n_l: 1 }).unwrap();
        let mut v = vec![Complex64::new(0.0, 0.0); sec.dim()];
        v[k] = Complex64::new(0.0, 1.0);
        assert_eq!(chiral_to_cartesian_occupations(&sec, &v).unwrap(), 3.0);

        v[k] = Complex64::new(0.0, 2.0);
        assert!(matches!(
            chiral_to_cartesian_occupations(&sec, &v),
            Err(JtdError::NotNormalized { .. })
        ));
    }

    #[test]
    fn charge_display_and_parse() {
        assert_eq!(Charge::from_f64(1.5).to_string(), "3/2");
        assert_eq!(Charge::from_f64(-2.0).to_string(), "-2");
        assert_eq!(Charge::top(5).value(), 2.5);
        assert!(ModelParams::new(1.0, 1.0, -0.1, 2, 3).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.1, 0, 3).is_err());
    }
}
