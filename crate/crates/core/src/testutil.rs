//! Shared helpers for unit tests: small random instances.

use rand::rngs::StdRng;
use rand::Rng;

use crate::cost::{rat, rat_int, Rat};
use crate::instance::{InstanceBuilder, StapInstance, Variant};

/// Random edge-weighted instance: random tree on `n_term` terminals,
/// `n_steiner` extra nodes, ~2x vertices many random links with integer
/// costs in 0..=9.
pub fn random_edge_instance(rng: &mut StdRng, n_term: usize, n_steiner: usize) -> StapInstance {
    random_edge_instance_with(rng, n_term, n_steiner, 2.0, 9)
}

pub fn random_edge_instance_with(
    rng: &mut StdRng,
    n_term: usize,
    n_steiner: usize,
    density: f64,
    max_cost: i64,
) -> StapInstance {
    let mut b = InstanceBuilder::new(Variant::EdgeWeighted);
    for i in 0..n_term {
        b = b.terminal(&format!("t{i}"));
    }
    for i in 0..n_steiner {
        b = b.steiner(&format!("s{i}"), None);
    }
    let mut tree_pairs = std::collections::HashSet::new();
    for i in 1..n_term {
        let p = rng.gen_range(0..i);
        tree_pairs.insert((p.min(i), p.max(i)));
        b = b.tree(&format!("t{p}"), &format!("t{i}"));
    }
    let name = |i: usize| {
        if i < n_term {
            format!("t{i}")
        } else {
            format!("s{}", i - n_term)
        }
    };
    let total = n_term + n_steiner;
    let attempts = ((total as f64) * density) as usize;
    let mut seen = std::collections::HashSet::new();
    for _ in 0..attempts {
        let i = rng.gen_range(0..total);
        let j = rng.gen_range(0..total);
        let key = (i.min(j), i.max(j));
        if i == j || tree_pairs.contains(&key) || !seen.insert(key) {
            continue;
        }
        b = b.link(&name(i), &name(j), rat_int(rng.gen_range(0..=max_cost)));
    }
    b.build().unwrap()
}

/// Random node-weighted instance, links cost 0, Steiner costs in 0..=9.
pub fn random_node_instance(rng: &mut StdRng, n_term: usize, n_steiner: usize) -> StapInstance {
    let mut b = InstanceBuilder::new(Variant::NodeWeighted);
    for i in 0..n_term {
        b = b.terminal(&format!("t{i}"));
    }
    for i in 0..n_steiner {
        b = b.steiner(&format!("s{i}"), Some(rat_int(rng.gen_range(0..=9))));
    }
    let mut tree_pairs = std::collections::HashSet::new();
    for i in 1..n_term {
        let p = rng.gen_range(0..i);
        tree_pairs.insert((p.min(i), p.max(i)));
        b = b.tree(&format!("t{p}"), &format!("t{i}"));
    }
    let name = |i: usize| {
        if i < n_term {
            format!("t{i}")
        } else {
            format!("s{}", i - n_term)
        }
    };
    let total = n_term + n_steiner;
    let mut seen = std::collections::HashSet::new();
    for _ in 0..(total * 3) {
        let i = rng.gen_range(0..total);
        let j = rng.gen_range(0..total);
        let key = (i.min(j), i.max(j));
        if i == j || tree_pairs.contains(&key) || !seen.insert(key) {
            continue;
        }
        b = b.link(&name(i), &name(j), Rat::from_integer(0.into()));
    }
    b.build().unwrap()
}

/// Random cost with small numerator/denominator, occasionally fractional.
pub fn random_cost(rng: &mut StdRng) -> Rat {
    if rng.gen_bool(0.25) {
        rat(rng.gen_range(0..=20), rng.gen_range(1..=4))
    } else {
        rat_int(rng.gen_range(0..=9))
    }
}
