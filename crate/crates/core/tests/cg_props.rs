mod common;

use common::*;
use ukrylov_core::cg::{cg_step, solve_cg, CgState};
use ukrylov_core::lanczos::LanczosProcess;
use ukrylov_core::oracle::dense_solve;
use ukrylov_core::*;

#[test]
fn iterates_match_normalized_recurrence() {
    let mut rng = rng(61);
    for n in [3usize, 8, 12, 20] {
        let inst = instance(&mut rng, Family::PositiveDefinite, n);
        let mut lanczos = LanczosProcess::new(&inst.h, &inst.c, ScalingStrategy::YNorm).unwrap();
        let mut normalized = LanczosProcess::new(&inst.h, &inst.c, ScalingStrategy::Normalized).unwrap();
        let mut state = CgState::new(&inst.c);
        let cn = norm(&inst.c);
        while norm(&state.g) > 1e-6 * cn {
            let (next, theta) = cg_step(&inst.h, &state).unwrap();
            lanczos.step().unwrap();
            normalized.step().unwrap();
            let t = lanczos.current();
            let x_lanczos: Vec<f64> = t.y.iter().map(|v| v / t.delta).collect();
            assert!(rel_diff(&next.x, &x_lanczos, 1e-300) <= 1e-8, "n={n} k={}", state.k);
            let u = normalized.current();
            assert!((u.delta - 1.0).abs() <= 1e-12);
            if norm(&next.g) > 1e-6 * cn {
                assert!(rel_diff(&next.g, &u.q, 1e-300) <= 1e-8, "n={n} k={}", state.k);
            }
            // step length against the unit-normalized pivot
            let nc = normalized.trace();
            let k = state.k;
            let pivot = nc.alphas[k] + if k > 0 { nc.betas[k - 1] } else { 0.0 };
            assert!((theta - 1.0 / pivot).abs() <= 1e-9 * theta.abs(), "n={n} k={k}");
            state = next;
        }
    }
}

#[test]
fn trace_pivots_match_step_lengths() {
    let mut rng = rng(62);
    let inst = instance(&mut rng, Family::PositiveDefinite, 12);
    let rep = solve_cg(&inst.h, &inst.c, &KrylovConfig::default()).unwrap();
    let tr = &rep.trace;
    for k in 0..tr.steps() {
        let pivot = tr.alphas[k] + if k > 0 { tr.betas[k - 1] } else { 0.0 };
        assert!((tr.thetas[k] * pivot - 1.0).abs() <= 1e-9);
    }
    let minus_c: Vec<f64> = inst.c.iter().map(|v| -v).collect();
    let x = dense_solve(&inst.h, &minus_c).unwrap();
    assert!(rel_diff(rep.x.as_ref().unwrap(), &x, 1e-300) <= 1e-8);
}

#[test]
fn second_difference_matrix() {
    let n: usize = 20;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i.abs_diff(j) {
                    0 => 2.0,
                    1 => -1.0,
                    _ => 0.0,
                })
                .collect()
        })
        .collect();
    let h = DenseSymmetric::from_rows(&rows).unwrap();
    let mut rng = rng(63);
    let c = gaussian_vec(&mut rng, n);
    let rep = solve_cg(&h, &c, &KrylovConfig::default()).unwrap();
    let minus_c: Vec<f64> = c.iter().map(|v| -v).collect();
    let x = dense_solve(&h, &minus_c).unwrap();
    assert!(rel_diff(rep.x.as_ref().unwrap(), &x, 1e-300) <= 1e-8);
}

#[test]
fn indefinite_operator_is_rejected() {
    let mut rng = rng(64);
    let inst = instance(&mut rng, Family::Nonsingular, 10);
    let err = solve_cg(&inst.h, &inst.c, &KrylovConfig::default());
    match err {
        Err(Error::NonpositiveCurvature { direction, curvature, .. }) => {
            assert!(curvature <= 0.0);
            let hp = SymmetricOperator::apply(&inst.h, &direction);
            assert!((dot(&direction, &hp) - curvature).abs() <= 1e-10 * (1.0 + curvature.abs()));
        }
        // an indefinite H can still be positive along every CG direction
        Ok(rep) => assert_eq!(rep.verdict, Some(Verdict::Compatible)),
        Err(e) => panic!("unexpected {e}"),
    }
}
