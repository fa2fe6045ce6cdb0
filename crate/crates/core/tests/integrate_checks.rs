//! Integrator checks against closed-form and matrix-exponential references,
//! and the linear-exactness property of the Carleman extraction.

use crd_core::carleman::{assemble, embed, CarlemanRepr, CarlemanSystem};
use crd_core::integrate::{error_metrics, solve_linear, solve_nonlinear, SolverConfig};
use crd_core::models::{fig2_initial_condition, gm_system, GMParams};
use crd_core::sparse::CooMatrix;
use crd_core::spatial::SpatialGrid;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn linear_solver_tracks_matrix_exponential() {
    // RK4 against the dense exponential oracle: global error O(dt⁴).
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let dim = 5;
    let dense = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
    let mut coo = CooMatrix::new(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            coo.push(r, c, dense[(r, c)]);
        }
    }
    let system = CarlemanSystem::from_raw_parts(coo.to_csr(), vec![0.0; dim]);
    let z0: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let t = 1.0;
    let oracle = (&dense * t).exp() * DVector::from_vec(z0.clone());
    let mut errors = Vec::new();
    for dt in [0.05, 0.025, 0.0125] {
        let cfg = SolverConfig::new(dt, t, (t / dt) as usize).unwrap();
        let traj = solve_linear(&system, &z0, &cfg).unwrap();
        let last = traj.states.last().unwrap();
        let err: f64 = last
            .iter()
            .zip(oracle.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        errors.push(err);
    }
    for pair in errors.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!((8.0..=32.0).contains(&ratio), "order ratio {ratio}, errors {errors:?}");
    }
}

#[test]
fn one_by_one_decay_single_step() {
    let mut coo = CooMatrix::new(1, 1);
    coo.push(0, 0, -1.0);
    let system = CarlemanSystem::from_raw_parts(coo.to_csr(), vec![0.0]);
    let cfg = SolverConfig::new(0.1, 0.1, 1).unwrap();
    let traj = solve_linear(&system, &[1.0], &cfg).unwrap();
    assert!((traj.states.last().unwrap()[0] - 0.9048375).abs() < 1e-15);
}

#[test]
fn linear_gm_is_exactly_represented_at_every_order() {
    // c1 = 0 makes the GM linear; the extracted Carleman solution must agree
    // with the direct linear solve to near machine precision at every order
    // because block 1 decouples.
    let params = GMParams {
        c1: 0.0,
        ..GMParams::fig2()
    };
    let grid = SpatialGrid::new(12, 1).unwrap();
    let system = gm_system(&params, &grid).unwrap();
    let y0 = fig2_initial_condition(&grid);
    let cfg = SolverConfig::new(1e-3, 0.3, 30).unwrap();
    let direct = solve_nonlinear(&system, &y0, &cfg).unwrap();
    for k in 1..=3 {
        let carleman = assemble(&system, k, CarlemanRepr::Grouped).unwrap();
        let z0 = embed(&y0, 2, grid.total_nodes(), k, CarlemanRepr::Grouped).unwrap();
        let traj = solve_linear(&carleman, &z0, &cfg).unwrap();
        for (idx, state) in traj.states.iter().enumerate() {
            let extracted = carleman.extract(state).unwrap();
            for (a, b) in extracted.iter().zip(&direct.states[idx]) {
                assert!(
                    (a - b).abs() <= 1e-10 * b.abs().max(1.0),
                    "k={k}, t index {idx}"
                );
            }
        }
    }
}

#[test]
fn gm_fig2_regime_stays_bounded() {
    let params = GMParams::fig2();
    let grid = SpatialGrid::new(50, 1).unwrap();
    let system = gm_system(&params, &grid).unwrap();
    let y0 = fig2_initial_condition(&grid);
    let cfg = SolverConfig::new(1e-3, 0.2, 50).unwrap();
    let traj = solve_nonlinear(&system, &y0, &cfg).unwrap();
    assert!(!traj.blew_up);
    let max = traj
        .states
        .iter()
        .flat_map(|s| s.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(max < 10.0, "stable regime should stay O(1), got {max}");
}

#[test]
fn carleman_error_drops_from_k2_to_k3_in_fig2_regime() {
    // Smaller grid version of the convergence experiment: the k = 3 error
    // curve sits below the k = 2 curve for both species after the start.
    let params = GMParams::fig2();
    let grid = SpatialGrid::new(16, 1).unwrap();
    let system = gm_system(&params, &grid).unwrap();
    let y0 = fig2_initial_condition(&grid);
    let cfg = SolverConfig::new(1e-3, 0.5, 25).unwrap();
    let comparison =
        crd_core::models::compare_carleman(&system, &y0, &cfg, &[2, 3], CarlemanRepr::Grouped)
            .unwrap();
    let m2 = &comparison.metrics[0].1;
    let m3 = &comparison.metrics[1].1;
    assert_eq!(comparison.metrics[0].0, 2);
    for t_idx in 1..m2.times.len() {
        for s in 0..2 {
            assert!(
                m3.per_time[t_idx][s].abs_inf < m2.per_time[t_idx][s].abs_inf,
                "k=3 error should undercut k=2 at t index {t_idx}, species {s}"
            );
        }
    }
    // And the comparison metrics match a direct recomputation.
    let direct = error_metrics(&comparison.carleman[1].1, &comparison.reference).unwrap();
    assert_eq!(direct.averaged_rel, m3.averaged_rel);
}
