use std::f64::consts::PI;

use jtd_core::ion_chain::{radial_spectrum, ChainConfig};
use jtd_core::lab_params::{
    cm_rocking_gap, coupling_ratio, drive_frequencies, validate_rwa, LabConfig, BOHR_MAGNETON, CA40_ION_MASS,
};
use proptest::prelude::*;

fn config(omega_r: f64, aspect: f64, b: f64) -> LabConfig {
    LabConfig {
        mass: CA40_ION_MASS,
        omega_r,
        omega_z: aspect * omega_r,
        qubit_splitting: 10.0 * omega_r,
        mu: BOHR_MAGNETON,
        b_gradient: b,
        omega_detuning: 2.0 * PI * 4e3,
        omega0_detuning: 2.0 * PI * 4e3,
    }
}

#[test]
fn reference_trap_gap_and_margin() {
    let gap = cm_rocking_gap(2e6, 0.2);
    assert!((gap - 40.4e3).abs() < 0.01 * 40.4e3, "{gap}");
    let r = coupling_ratio(5e3, 4e3, 4e3, 40e3);
    assert!((r - 0.125).abs() < 1e-12 && r < 0.2);
    assert!(coupling_ratio(5e3, 4e3, 4e3, cm_rocking_gap(2e6, 1e-4)) > 1.0);
}

proptest! {
    #[test]
    fn gap_formula_matches_chain_spectrum(n in 2usize..=30, aspect in 0.02f64..0.35, omega_r in 1e5f64..1e8) {
        let chain = radial_spectrum(&ChainConfig::new(n, aspect).unwrap()).unwrap();
        let c = config(omega_r, aspect, 20.0);
        let rep = validate_rwa(&c, &chain, 0.2).unwrap();
        prop_assert!((rep.cm_rocking_gap - rep.cm_rocking_gap_chain).abs() < 1e-9 * omega_r);
        prop_assert_eq!(rep.pass, rep.ratio_modes < 0.2 && rep.ratio_couplings < 0.2);
    }

    #[test]
    fn sidebands_are_split_by_twice_the_detuned_trap(omega_r in 1e5f64..1e8, aspect in 0.02f64..0.35) {
        let c = config(omega_r, aspect, 20.0);
        let (b, r) = drive_frequencies(&c).unwrap();
        prop_assert!((b - r - 2.0 * (c.omega_r - c.omega_detuning)).abs() < 1e-9 * c.qubit_splitting);
        prop_assert!(((b + r) / 2.0 - (c.qubit_splitting - c.omega0_detuning)).abs() < 1e-9 * c.qubit_splitting);
    }
}
