//! Lineshape features of the single-photon response.

use fanowave_core::{
    effective_resonance,
    smatrix::{s1_jc, s1_tle},
    JcParams, PteParams, TleParams,
};
use proptest::prelude::*;

fn v_rows() -> [PteParams; 3] {
    [
        PteParams::none(),
        PteParams::balanced(),
        PteParams::blocking(),
    ]
}

#[test]
fn emitter_without_pte_is_a_perfect_mirror_on_resonance() {
    let p = TleParams::lossless(0.3, 1.0).unwrap();
    let (t, r) = s1_tle(0.3, &p, &PteParams::none()).unwrap();
    assert!(t.norm() < 1e-15);
    assert!((r.norm() - 1.0).abs() < 1e-15);
}

#[test]
fn balanced_pte_gives_a_fano_lineshape() {
    let p = TleParams::lossless(0.0, 1.0).unwrap();
    let pte = PteParams::balanced();
    let w = effective_resonance(0.0, 1.0, &pte).unwrap();
    // (2 + √2)/8 either side of the shifted resonance.
    let d = (2.0 + 2f64.sqrt()) / 8.0;
    let lo = s1_tle(w - d, &p, &pte).unwrap().0.norm_sqr();
    let hi = s1_tle(w + d, &p, &pte).unwrap().0.norm_sqr();
    let (zero, one) = if lo < hi { (lo, hi) } else { (hi, lo) };
    assert!(zero < 1e-12, "{zero}");
    assert!((one - 1.0).abs() < 1e-12, "{one}");
}

#[test]
fn transmission_minus_reflection_symmetry_about_the_shifted_resonance() {
    let p = TleParams::lossless(0.0, 1.0).unwrap();
    for (row, pte) in v_rows().iter().enumerate() {
        let w = effective_resonance(0.0, 1.0, pte).unwrap();
        for d in [0.05, 0.3, 0.9, 2.5] {
            let diff = |k: f64| {
                let (t, r) = s1_tle(k, &p, pte).unwrap();
                t.norm_sqr() - r.norm_sqr()
            };
            let (a, b) = (diff(w + d), diff(w - d));
            // Balanced: antisymmetric. Otherwise symmetric.
            let err = if row == 1 { a + b } else { a - b };
            assert!(err.abs() < 1e-12, "row {row} d {d}: {a} {b}");
        }
    }
}

#[test]
fn blocking_pte_reflects_far_detuned_light_and_passes_resonant_light() {
    let p = TleParams::lossless(0.0, 1.0).unwrap();
    let pte = PteParams::blocking();
    let w = effective_resonance(0.0, 1.0, &pte).unwrap();
    assert!((s1_tle(w, &p, &pte).unwrap().0.norm_sqr() - 1.0).abs() < 1e-12);
    assert!(s1_tle(w + 50.0, &p, &pte).unwrap().1.norm_sqr() > 0.999);
}

#[test]
fn jc_vacuum_rabi_zeros() {
    for g in [0.5, 1.0, 2.0] {
        let p = JcParams::lossless(0.0, 0.0, g, 1.0).unwrap();
        for k in [-g, g] {
            let t = s1_jc(k, &p, &PteParams::none()).unwrap().0;
            assert!(t.norm_sqr() < 1e-24, "g {g} k {k}");
        }
        // Between the zeros the bare emitter decouples the cavity.
        let t0 = s1_jc(0.0, &p, &PteParams::none()).unwrap().0;
        assert!((t0.norm_sqr() - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn lossy_systems_never_create_flux(
        k in -6.0f64..6.0,
        v in 0.0f64..2.0,
        g in 0.0f64..2.0,
        gc in 0.0f64..0.5,
        ge in 0.0f64..0.5,
    ) {
        let pte = PteParams::new(v).unwrap();
        let tle = TleParams::new(0.0, 1.0, gc).unwrap();
        let (t, r) = s1_tle(k, &tle, &pte).unwrap();
        prop_assert!(t.norm_sqr() + r.norm_sqr() <= 1.0 + 1e-12);
        let jc = JcParams::new(0.1, -0.1, g, 1.0, gc, ge).unwrap();
        let (t, r) = s1_jc(k, &jc, &pte).unwrap();
        prop_assert!(t.norm_sqr() + r.norm_sqr() <= 1.0 + 1e-12);
    }

    #[test]
    fn mirror_pair_of_detunings_for_balanced_pte(d in 0.0f64..10.0) {
        let p = TleParams::lossless(0.0, 1.0).unwrap();
        let pte = PteParams::balanced();
        let w = effective_resonance(0.0, 1.0, &pte).unwrap();
        let a = s1_tle(w + d, &p, &pte).unwrap().0.norm_sqr();
        let b = s1_tle(w - d, &p, &pte).unwrap().0.norm_sqr();
        prop_assert!((a + b - 1.0).abs() < 1e-12);
    }
}
