mod common;

use hc::basis::{build_integral_basis, phi_minus, PhiMinusTable};
use hc::cli::{run, Command, JobSpec};
use hc::curve::{ord_at_infinity, CoeffSpec, CurveSpec};
use hc::padic::ZqElem;
use hc::selftest::random_curves;
use hc::zeta::{compute_zeta, counts_from_zeta};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kernel_is_closed_under_combinations(seed in any::<u64>(), w in proptest::collection::vec(-50i64..50, 6)) {
        let c = &random_curves(seed, 3, 1, 3, 1)[0];
        let ctx = c.context();
        let b = build_integral_basis(c).unwrap();
        let v: Vec<ZqElem> = (0..6)
            .map(|r| (0..6).fold(ZqElem::zero(ctx), |acc, k| &acc + &(&b.entry_in(ctx, r, k) * &ZqElem::from_int(ctx, w[k]))))
            .collect();
        prop_assert!(phi_minus(c, &v).unwrap().is_zero());
        // and back: the combination is recovered from its coordinates
        let x = b.solve(&v).unwrap();
        for k in 0..6 {
            let d = &x[k] - &ZqElem::from_int(ctx, w[k]);
            prop_assert!(d.valuation().map_or(true, |v| v + b.det_valuation(3) >= ctx.precision()));
        }
    }

    #[test]
    fn zeta_depends_only_on_the_reduction(seed in any::<u64>(), shift in proptest::collection::vec(-2i64..3, 5)) {
        let c = &random_curves(seed, 5, 1, 2, 1)[0];
        let mut spec = c.spec();
        for (k, s) in shift.iter().enumerate() {
            if let CoeffSpec::Int(v) = spec.coeffs[k] {
                spec.coeffs[k] = CoeffSpec::Int(v + 5 * s);
            }
        }
        let other = spec.validate().unwrap();
        prop_assert_eq!(compute_zeta(c).unwrap().numerator, compute_zeta(&other).unwrap().numerator);
    }

    #[test]
    fn zeta_is_stable_under_more_precision(seed in any::<u64>()) {
        let c = &random_curves(seed, 3, 2, 1, 1)[0];
        let a = compute_zeta(c).unwrap().numerator;
        let b = compute_zeta(&c.with_precision(c.context().precision() + 2).unwrap()).unwrap().numerator;
        prop_assert_eq!(&a, &b);
        let t = counts_from_zeta(&a, 3).unwrap();
        prop_assert!(t.counts.iter().all(|&n| n > 0));
    }
}

#[test]
fn residues_respect_pole_orders() {
    for c in random_curves(3, 3, 1, 5, 3) {
        let g = c.genus();
        let t = PhiMinusTable::new(&c).unwrap();
        for j in 0..2 * g {
            let ord = ord_at_infinity(g, j).unwrap();
            for lambda in 1..=g {
                // t^(-2 lambda) can only occur at or above the order of the form
                if -2 * (lambda as i64) < ord {
                    assert!(t.entry(j, lambda).map_or(true, |e| e.is_zero()), "{} j = {j}", c.spec());
                }
            }
        }
    }
}

#[test]
fn zeta_matches_extension_degree_two_model() {
    // the same curve read over F_9 counts the F_9 points of the F_3 curve
    let base: CurveSpec = "p=3 n=1 g=1 N=6 Q=[1,1,0,1]".parse().unwrap();
    let over9 = CurveSpec { n: 2, ..base.clone() };
    let z3 = compute_zeta(&base.validate().unwrap()).unwrap().numerator;
    let z9 = compute_zeta(&over9.validate().unwrap()).unwrap().numerator;
    let t3 = counts_from_zeta(&z3, 4).unwrap();
    let t9 = counts_from_zeta(&z9, 2).unwrap();
    assert_eq!(t9.count(1), t3.count(2));
    assert_eq!(t9.count(2), t3.count(4));
}

#[test]
fn low_precision_is_reported() {
    let c: CurveSpec = "p=3 n=1 g=2 N=2 Q=[1,2,0,1,1,1]".parse().unwrap();
    let err = compute_zeta(&c.validate().unwrap()).unwrap_err();
    assert!(matches!(err, hc::Error::InsufficientPrecision { .. }), "{err:?}");
    let job = JobSpec {
        command: Command::Zeta,
        curve: Some(c.to_string()),
        precision: None,
        seed: 1,
        out: None,
        echo: false,
        json: false,
    };
    assert_eq!(run(&job).code, 1);
}

#[test]
fn selftest_table_shape() {
    let job = JobSpec { command: Command::Selftest, curve: None, precision: None, seed: 1, out: None, echo: false, json: false };
    let out = run(&job);
    assert_eq!(out.code, 0, "{}", out.text);
    assert!(out.text.lines().any(|l| l.starts_with("family[p=3,n=1,g=2] = curves=3 ") && l.ends_with("integral=yes pass=yes")));
    assert!(out.text.ends_with("verdict = pass\n"));
}
