//! End-to-end invariants of the spectral-average verification: the bound
//! chain (main-term floor, dominance, tail estimates) must hold numerically
//! on real admissible instances, and the verdicts must be internally
//! consistent and deterministic.

use klooster::bessel::bessel_j;
use klooster::kloosterman::{certify_lower_bound, eval_multiplicative, Verdict};
use klooster::petersson::{
    find_admissible, h0, thm12_bound, thm13_bound, thresholds, verify, Mode, TraceInstance,
    VerifyVerdict,
};

const PI: f64 = std::f64::consts::PI;

#[test]
fn band_instances_chain_main_term_through_certificate() {
    let adm = find_admissible(15, 238, Mode::Thm12, 0.999).unwrap();
    assert_eq!(adm.len(), 85);
    for &n in adm.iter().take(4) {
        let inst = TraceInstance::new(1, n, 15, 238).unwrap();
        let v = verify(&inst, Mode::Thm12).unwrap();
        assert_eq!(v.verdict, VerifyVerdict::Verified, "n = {n}");
        assert!(v.series_value.abs() - v.series_error >= v.theorem_bound);

        // |S(1, n; 15)| is certified below by the squarefree norm argument
        let cert = certify_lower_bound(1, n as i64, 15).unwrap();
        assert_eq!(cert.verdict, Verdict::BoundedBelow);
        let s = eval_multiplicative(1, n as i64, 15);
        assert!(s.value.abs() >= cert.theorem_bound - 1e-6);

        // main term >= 2 pi |S|/N J(x) >= 2 pi (certified floor) J-lower
        let tb = thm12_bound(&inst).unwrap();
        let floor = tb.main_term_floor.unwrap();
        assert!(
            v.main_term >= 2.0 * PI * floor * (1.0 - 1e-9),
            "n = {n}: main {} under 2 pi floor {}",
            v.main_term,
            2.0 * PI * floor
        );

        // assembly: the series sits within the main term +- everything else
        assert!(v.series_value.abs() <= v.main_term + v.tail_numeric_bound + v.series_error);
        assert!(v.series_value.abs() >= v.main_term - v.tail_numeric_bound - v.series_error);
        assert!(v.tail_numeric_bound <= v.tail_paper_bound * (1.0 + 1e-9));
    }
}

#[test]
fn dominance_thresholds_are_minimal() {
    for level in [1u64, 3, 5, 15, 45, 105] {
        let th = thresholds(level, 0.999, None).unwrap();
        let holds = |k: u64| {
            let nu = (k - 1) as f64;
            7.0 * (h0() * nu).exp() <= th.hn * 0.999f64.powf(nu)
        };
        assert!(holds(th.k0), "dominance fails at k0({level}) = {}", th.k0);
        assert!(
            !holds(th.k0 - 2),
            "dominance already holds below k0({level}) = {}",
            th.k0
        );

        let k1 = th.k1.unwrap();
        let margin = 0.327 * th.hn - 0.3 * 0.327 * th.hn;
        let tail_ok = |k: u64| 1.632 * (h0() * (k - 1) as f64).exp() <= margin;
        assert!(tail_ok(k1), "tail margin fails at k1({level}) = {k1}");
        assert!(!tail_ok(k1 - 2), "tail margin already holds below k1({level}) = {k1}");
    }
}

#[test]
fn transition_instances_verify_with_consistent_magnitudes() {
    let adm = find_admissible(1, 180, Mode::Thm13, 0.999).unwrap();
    assert_eq!(adm.len(), 13);
    let nu = 179f64;
    for &n in adm.iter().take(3) {
        let inst = TraceInstance::new(1, n, 1, 180).unwrap();
        let v = verify(&inst, Mode::Thm13).unwrap();
        assert_eq!(v.verdict, VerifyVerdict::Verified, "n = {n}");

        let tb = thm13_bound(&inst).unwrap();
        let bound = tb.bound.unwrap();
        assert!(bound < 2.0 * PI * tb.transition_floor.unwrap());
        // |S(1,n;1)| = 1, so the main term is exactly 2 pi |J_179(x)| and
        // must stay under the window maximum ~0.675/nu^(1/3)
        assert!(v.main_term <= 2.0 * PI * 0.68 / nu.cbrt());
        assert!(v.main_term >= 2.0 * PI * tb.transition_floor.unwrap() * (1.0 - 1e-9));
        assert!(v.tail_numeric_bound <= v.tail_paper_bound * (1.0 + 1e-9));
    }

    // on-diagonal ceiling that the transition tail estimate rests on
    let diag = bessel_j(179, nu).unwrap();
    assert!(diag.value + diag.abs_error <= 0.543 / nu.cbrt());
}

#[test]
fn admissible_lists_satisfy_their_own_filters() {
    for (level, k, mode) in [
        (15u64, 238u64, Mode::Thm12),
        (45, 238, Mode::Thm12),
        (1, 180, Mode::Thm13),
        (3, 180, Mode::Thm13),
    ] {
        let adm = find_admissible(level, k, mode, 0.999).unwrap();
        let nu = (k - 1) as f64;
        for &n in &adm {
            assert_eq!(num_integer::gcd(n, level), 1);
            let inst = TraceInstance::new(1, n, level, k).unwrap();
            let x = inst.leading_argument().unwrap();
            let (lo, hi) = match mode {
                Mode::Thm12 => (0.999 * nu, nu),
                Mode::Thm13 => (nu, nu + nu.cbrt()),
            };
            assert!(
                x >= lo * (1.0 - 1e-12) && x <= hi * (1.0 + 1e-12),
                "N={level} k={k} n={n}: x = {x} outside [{lo}, {hi}]"
            );
        }
        // full checklist (involves a Bessel evaluation) on a sample only
        for &n in adm.iter().step_by(adm.len() / 4 + 1) {
            let inst = TraceInstance::new(1, n, level, k).unwrap();
            let tb = match mode {
                Mode::Thm12 => thm12_bound(&inst).unwrap(),
                Mode::Thm13 => thm13_bound(&inst).unwrap(),
            };
            for h in &tb.hypotheses {
                if h.name == "ratio_in_band" || h.name == "qr_mod_powerful" {
                    assert!(h.passed, "N={level} k={k} n={n}: {} failed", h.name);
                }
            }
        }
    }
}

#[test]
fn verification_is_deterministic() {
    let inst = TraceInstance::new(1, 79874, 15, 238).unwrap();
    let a = verify(&inst, Mode::Thm12).unwrap();
    let b = verify(&inst, Mode::Thm12).unwrap();
    assert_eq!(a.series_value.to_bits(), b.series_value.to_bits());
    assert_eq!(a.series_error.to_bits(), b.series_error.to_bits());
    assert_eq!(a.theorem_bound.to_bits(), b.theorem_bound.to_bits());
    assert_eq!(a.b_max, b.b_max);
    assert_eq!(a.verdict, b.verdict);
}

#[test]
fn default_e0_matches_thresholds() {
    for level in [1u64, 15, 105] {
        let inst = TraceInstance::new(1, 1, level, 238).unwrap();
        let th = thresholds(level, 0.999, None).unwrap();
        assert!((inst.e0 - 0.3 * 0.327 * th.hn).abs() <= 1e-18);
        assert!(inst.e0 < 0.327 * th.hn);
    }
}

#[test]
fn tail_bound_dominates_numeric_tail_across_band() {
    // sweep the band edge cases: smallest and largest admissible n
    let adm = find_admissible(15, 238, Mode::Thm12, 0.999).unwrap();
    for &n in [adm[0], *adm.last().unwrap()].iter() {
        let inst = TraceInstance::new(1, n, 15, 238).unwrap();
        let v = verify(&inst, Mode::Thm12).unwrap();
        assert!(v.tail_numeric_bound <= v.tail_paper_bound);
        assert!(v.tail_paper_bound <= v.theorem_bound * 0.76);
    }
}
