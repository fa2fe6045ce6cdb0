//! Property tests for the mass-action tensor machinery: random networks are
//! checked against a direct monomial-evaluation oracle, and the norm chain
//! must hold for every generated tensor.

use crd_core::reaction::{
    build_tensor, tensor_power, CoefficientTensors, Reaction, ReactionNetwork,
};
use proptest::prelude::*;

/// Direct mass-action oracle: `Σ_r (β_{r,i} - α_{r,i}) c_r Π_j y_j^{α_{r,j}}`.
fn rate_oracle(reactions: &[Reaction], y: &[f64]) -> Vec<f64> {
    let species = y.len();
    let mut out = vec![0.0; species];
    for r in reactions {
        let mut monomial = r.rate();
        for (j, &a) in r.alpha().iter().enumerate() {
            for _ in 0..a {
                monomial *= y[j];
            }
        }
        for i in 0..species {
            out[i] += (f64::from(r.beta()[i]) - f64::from(r.alpha()[i])) * monomial;
        }
    }
    out
}

fn reaction_strategy(species: usize) -> impl Strategy<Value = Reaction> {
    let alpha = prop::collection::vec(0u32..=2, species)
        .prop_filter("at least one reactant, order <= 3", |a| {
            let order: u32 = a.iter().sum();
            (1..=3).contains(&order)
        });
    let beta = prop::collection::vec(0u32..=3, species);
    (alpha, beta, 0.05f64..4.0)
        .prop_map(|(a, b, rate)| Reaction::new(a, b, rate).expect("valid by construction"))
}

fn network_strategy() -> impl Strategy<Value = ReactionNetwork> {
    (1usize..=4).prop_flat_map(|species| {
        prop::collection::vec(reaction_strategy(species), 0..6)
            .prop_map(move |rs| ReactionNetwork::new(species, rs).expect("lengths match"))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tensors_reproduce_mass_action(network in network_strategy(), seed in 0u64..1000) {
        let tensors = CoefficientTensors::from_network(&network).unwrap();
        let s = network.species();
        // Deterministic pseudo-random states from the seed.
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 3.0 - 0.5
        };
        for _ in 0..5 {
            let y: Vec<f64> = (0..s).map(|_| next()).collect();
            let got = tensors.rhs_eval(&y).unwrap();
            let want = rate_oracle(network.reactions(), &y);
            for i in 0..s {
                let scale = want[i].abs().max(1.0);
                prop_assert!((got[i] - want[i]).abs() <= 1e-12 * scale,
                    "species {i}: got {} want {}", got[i], want[i]);
            }
        }
    }

    #[test]
    fn norm_chain_holds(network in network_strategy()) {
        for order in 1..=network.max_order() {
            let tensor = build_tensor(&network, order).unwrap();
            let norms = tensor.norms().unwrap();
            let middle = (norms.inf_norm * norms.one_norm).sqrt();
            prop_assert!(norms.two_norm <= middle + 1e-9 * middle.max(1.0));
            prop_assert!(middle <= norms.two_bound + 1e-9 * norms.two_bound.max(1.0));
            // Sparsity bound: at most one entry per (reaction, changed species).
            let changed: usize = network
                .reactions()
                .iter()
                .filter(|r| r.order() == order)
                .map(|r| {
                    r.alpha().iter().zip(r.beta()).filter(|(a, b)| a != b).count()
                })
                .sum();
            prop_assert!(tensor.nnz() <= changed);
        }
    }

    #[test]
    fn tensor_power_splits_multiplicatively(
        y in prop::collection::vec(-2.0f64..2.0, 1..=3),
        a in 0usize..=2,
        b in 0usize..=2,
    ) {
        let combined = tensor_power(&y, a + b);
        let left = tensor_power(&y, a);
        let right = tensor_power(&y, b);
        let mut kron = Vec::with_capacity(left.len() * right.len());
        for &x in &left {
            for &z in &right {
                kron.push(x * z);
            }
        }
        prop_assert_eq!(combined.len(), kron.len());
        for (c, k) in combined.iter().zip(&kron) {
            prop_assert!((c - k).abs() <= 1e-12 * k.abs().max(1.0));
        }
    }
}
