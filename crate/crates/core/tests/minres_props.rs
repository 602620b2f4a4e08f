mod common;

use common::*;
use proptest::prelude::*;
use ukrylov_core::oracle::{krylov_least_squares, minres_qp, nullspace_basis, pinv_solve, project_onto, NULL_TOL};
use ukrylov_core::*;

fn cfg(strategy: ScalingStrategy) -> KrylovConfig {
    KrylovConfig {
        keep_history: true,
        strategy,
        ..Default::default()
    }
}

#[test]
fn iterates_match_least_squares_and_qp() {
    let mut rng = rng(51);
    for fam in ALL_FAMILIES {
        let inst = instance(&mut rng, fam, 9);
        let rep = solve_minres(&inst.h, &inst.c, &cfg(ScalingStrategy::YNorm)).unwrap();
        let r = rep.krylov.r;
        for k in 0..r {
            let ls = krylov_least_squares(&inst.h, &inst.c, k).unwrap();
            let qp = minres_qp(&rep.krylov.history, k).unwrap();
            assert!(rel_diff(&rep.iterates[k], &ls, 1.0) <= 1e-8, "{fam:?} k={k}");
            assert!(rel_diff(&rep.iterates[k], &qp.x, 1.0) <= 1e-8, "{fam:?} k={k}");
        }
    }
}

#[test]
fn incompatible_gives_minimum_norm_solution() {
    let mut rng = rng(52);
    for fam in [Family::SingularIncompatible, Family::SemidefiniteIncompatible, Family::PairedIncompatible] {
        for n in [3usize, 8, 13] {
            let inst = instance(&mut rng, fam, n);
            let rep = solve_minres(&inst.h, &inst.c, &cfg(ScalingStrategy::YNorm)).unwrap();
            assert_eq!(rep.krylov.verdict, Some(Verdict::Incompatible));
            let ed = inst.eig();
            let pinv = pinv_solve(&ed, &inst.c);
            assert!(rel_diff(&rep.x_mr, &pinv, 1e-300) <= 1e-6, "{fam:?} n={n}");
            let z = nullspace_basis(&ed, NULL_TOL);
            assert!(norm(&project_onto(&z, &rep.x_mr)) <= 1e-6 * norm(&rep.x_mr));
            let best = norm(&residual(&inst.h, &pinv, &inst.c));
            assert!((rep.residual_norm() - best).abs() <= 1e-8 * best);
            let prev = &rep.iterates[rep.krylov.r - 1];
            assert!(norm(&rep.x_mr) <= norm(prev) * (1.0 + 1e-12));
        }
    }
}

#[test]
fn stagnation_exactly_at_zero_deltas() {
    let mut rng = rng(53);
    for fam in [Family::Paired, Family::PairedIncompatible] {
        let inst = instance(&mut rng, fam, 11);
        let c = cfg(ScalingStrategy::YNorm);
        let rep = solve_minres(&inst.h, &inst.c, &c).unwrap();
        let r = rep.krylov.r;
        let deltas = &rep.krylov.trace.deltas;
        let scale = norm(&rep.x_mr);
        for k in 1..r {
            let same = rel_diff(&rep.iterates[k], &rep.iterates[k - 1], scale) <= 1e-12;
            assert_eq!(same, deltas[k].abs() <= c.delta_tol, "{fam:?} k={k}");
        }
    }
}

#[test]
fn compatible_reports_both_solutions() {
    let mut rng = rng(54);
    let inst = instance(&mut rng, Family::SingularCompatible, 10);
    let rep = solve_minres(&inst.h, &inst.c, &cfg(ScalingStrategy::YNorm)).unwrap();
    assert_eq!(rep.krylov.verdict, Some(Verdict::Compatible));
    let x = rep.krylov.x.as_ref().unwrap();
    assert!(rel_diff(&rep.x_mr, x, 1.0) <= 1e-8);
    assert!(rep.x_discrepancy.unwrap() <= 1e-8 * norm(x));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn residuals_never_increase(seed in any::<u64>(), n in 2usize..20, fam in 0usize..8) {
        let mut rng = rng(seed);
        let inst = instance(&mut rng, ALL_FAMILIES[fam], n);
        let rep = solve_minres(&inst.h, &inst.c, &cfg(ScalingStrategy::YNorm)).unwrap();
        for w in rep.residual_history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-10);
        }
    }

    // On semidefinite incompatible systems the late least-squares problems are
    // flat along the approaching null vector: residuals agree, iterates need not.
    #[test]
    fn iterates_independent_of_scaling(seed in any::<u64>(), n in 2usize..16, fam in 0usize..8) {
        let mut rng = rng(seed);
        let family = ALL_FAMILIES[fam];
        let inst = instance(&mut rng, family, n);
        let r = solve_krylov(&inst.h, &inst.c, &KrylovConfig::default()).unwrap().r;
        let a = minres_iterates(&inst.h, &inst.c, ScalingStrategy::YNorm, r);
        for s in [ScalingStrategy::QNorm, ScalingStrategy::Unit] {
            let rep = solve_minres(&inst.h, &inst.c, &cfg(s)).unwrap();
            prop_assert_eq!(rep.krylov.r, r);
            let b = minres_iterates(&inst.h, &inst.c, s, r);
            for (xa, xb) in a.iter().zip(&b) {
                let (ga, gb) = (norm(&residual(&inst.h, xa, &inst.c)), norm(&residual(&inst.h, xb, &inst.c)));
                prop_assert!((ga - gb).abs() <= 1e-10 * norm(&inst.c));
                if family != Family::SemidefiniteIncompatible {
                    prop_assert!(rel_diff(xb, xa, 1.0) <= 1e-8);
                }
            }
        }
    }

    #[test]
    fn final_answer_independent_of_scaling(seed in any::<u64>(), n in 2usize..30, fam in 0usize..8) {
        let mut rng = rng(seed);
        let inst = instance(&mut rng, ALL_FAMILIES[fam], n);
        let base = solve_minres(&inst.h, &inst.c, &cfg(ScalingStrategy::YNorm)).unwrap();
        for s in [ScalingStrategy::QNorm, ScalingStrategy::Unit] {
            let rep = solve_minres(&inst.h, &inst.c, &cfg(s)).unwrap();
            prop_assert_eq!(rep.krylov.r, base.krylov.r);
            prop_assert_eq!(rep.krylov.verdict, base.krylov.verdict);
            prop_assert!(rel_diff(&rep.x_mr, &base.x_mr, 1e-300) <= 1e-6);
        }
    }
}
