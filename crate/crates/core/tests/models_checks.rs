//! Model-level behavior on realistic grids: the decay-rate slice of the
//! truncation-error landscape and the stoichiometric facts the resource
//! estimator derives from the network.

use crd_core::models::{
    gm_reaction_network, rescaled_gm, run_sweep, GMParams, SweepAxis, SweepSpec,
};

#[test]
fn larger_decay_rate_suppresses_activator_error() {
    // Rescaled model, fixed b2 = 0.01 and D1 = 1e-4 (D2 = D1/2): the
    // activator's averaged truncation error decreases as mu1 grows.
    let base = rescaled_gm(1.0, 0.01, 1e-4, 5e-5);
    let spec = SweepSpec {
        axes: vec![SweepAxis {
            param: "mu1".into(),
            values: vec![2.0, 5.0, 10.0, 50.0],
        }],
        base,
        k: 3,
        n: 50,
        dt: 1e-3,
        t_final: 2.0,
        record_every: 20,
        tie_d2_to_half_d1: false,
    };
    let rows = run_sweep(&spec).unwrap();
    let y1_errors: Vec<f64> = rows
        .iter()
        .filter(|r| r.species == 1)
        .map(|r| r.mean_rel_err)
        .collect();
    assert_eq!(y1_errors.len(), 4);
    for pair in y1_errors.windows(2) {
        assert!(
            pair[1] < pair[0],
            "activator error should decrease along the mu1 slice: {y1_errors:?}"
        );
    }
}

#[test]
fn gm_rate_tensor_stoichiometric_change_sum_is_two() {
    // The cubic step 2y1 + y2 -> 3y1 changes each species by one unit, so
    // the change sum entering the rate-tensor encoding constant is 2.
    let network = gm_reaction_network(&GMParams::fig2()).unwrap();
    let sum: u64 = network
        .reactions()
        .iter()
        .filter(|r| r.order() >= 2)
        .map(|r| r.total_change())
        .sum();
    assert_eq!(sum, 2);
}

#[test]
fn zero_linear_system_stays_constant() {
    // M = 0, b = 0: the trajectory is frozen.
    let matrix = crd_core::sparse::CsrMatrix::zeros(3, 3);
    let system = crd_core::carleman::CarlemanSystem::from_raw_parts(matrix, vec![0.0; 3]);
    let cfg = crd_core::integrate::SolverConfig::new(0.1, 1.0, 1).unwrap();
    let traj = crd_core::integrate::solve_linear(&system, &[1.0, -2.0, 0.5], &cfg).unwrap();
    for state in &traj.states {
        assert_eq!(state, &vec![1.0, -2.0, 0.5]);
    }
}
