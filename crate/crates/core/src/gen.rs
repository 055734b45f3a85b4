//! Seeded instance generators for tests and benchmarks. A spec plus a seed
//! determines the instance byte-for-byte.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cost::{rat, rat_int, Rat};
use crate::error::{Result, StapError};
use crate::instance::{validate, InstanceBuilder, StapInstance, Variant};
use crate::oracle::check_feasible_stap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    RandomTree,
    Star,
    Caterpillar,
    Path,
}

impl Family {
    pub fn parse(s: &str) -> Option<Family> {
        match s {
            "random-tree" => Some(Family::RandomTree),
            "star" => Some(Family::Star),
            "caterpillar" => Some(Family::Caterpillar),
            "path" => Some(Family::Path),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::RandomTree => "random-tree",
            Family::Star => "star",
            Family::Caterpillar => "caterpillar",
            Family::Path => "path",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum CostDist {
    /// Integers in lo..=hi.
    UniformInt { lo: i64, hi: i64 },
    /// p/q with p in lo..=hi and q in 1..=max_den.
    UniformRational { lo: i64, hi: i64, max_den: i64 },
}

impl CostDist {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Rat {
        match *self {
            CostDist::UniformInt { lo, hi } => rat_int(rng.gen_range(lo..=hi)),
            CostDist::UniformRational { lo, hi, max_den } => {
                rat(rng.gen_range(lo..=hi), rng.gen_range(1..=max_den))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenSpec {
    pub family: Family,
    pub variant: Variant,
    pub n_terminals: usize,
    pub n_steiner: usize,
    /// Target link count as a multiple of the vertex count.
    pub link_density: f64,
    pub cost_dist: CostDist,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(family: Family, n_terminals: usize, seed: u64) -> Self {
        GenSpec {
            family,
            variant: Variant::EdgeWeighted,
            n_terminals,
            n_steiner: 2,
            link_density: 2.0,
            cost_dist: CostDist::UniformInt { lo: 0, hi: 9 },
            seed,
        }
    }
}

const MAX_RETRIES: u32 = 64;

/// Deterministic instance for (spec, seed); links are redrawn (bounded) until
/// every tree edge is coverable.
pub fn generate(spec: &GenSpec) -> Result<StapInstance> {
    if spec.n_terminals < 2 {
        return Err(StapError::InvalidInstance(
            "generator needs at least two terminals".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let tree = tree_edges(spec, &mut rng);
    for _ in 0..MAX_RETRIES {
        let inst = build_with_links(spec, &tree, &mut rng)?;
        let all: Vec<usize> = (0..inst.links().len()).collect();
        if check_feasible_stap(&inst, &all) {
            debug_assert!(validate(&inst).ok);
            return Ok(inst);
        }
    }
    Err(StapError::InvalidInstance(format!(
        "could not generate a feasible instance for seed {} after {MAX_RETRIES} retries; raise the link density",
        spec.seed
    )))
}

fn tree_edges(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let n = spec.n_terminals;
    match spec.family {
        Family::Path => (1..n).map(|i| (i - 1, i)).collect(),
        Family::Star => (1..n).map(|i| (0, i)).collect(),
        Family::Caterpillar => {
            // spine of ceil(n/2) vertices, remaining terminals hang off it
            let spine = n.div_ceil(2);
            let mut edges: Vec<(usize, usize)> = (1..spine).map(|i| (i - 1, i)).collect();
            for i in spine..n {
                edges.push((i - spine, i));
            }
            edges
        }
        Family::RandomTree => (1..n).map(|i| (rng.gen_range(0..i), i)).collect(),
    }
}

fn build_with_links(
    spec: &GenSpec,
    tree: &[(usize, usize)],
    rng: &mut ChaCha8Rng,
) -> Result<StapInstance> {
    let mut b = InstanceBuilder::new(spec.variant);
    for i in 0..spec.n_terminals {
        b = b.terminal(&format!("t{i}"));
    }
    for i in 0..spec.n_steiner {
        let cost = match spec.variant {
            Variant::EdgeWeighted => None,
            Variant::NodeWeighted => Some(spec.cost_dist.sample(rng)),
        };
        b = b.steiner(&format!("s{i}"), cost);
    }
    let name = |i: usize| {
        if i < spec.n_terminals {
            format!("t{i}")
        } else {
            format!("s{}", i - spec.n_terminals)
        }
    };
    let mut tree_pairs = std::collections::HashSet::new();
    for &(a, c) in tree {
        tree_pairs.insert((a.min(c), a.max(c)));
        b = b.tree(&name(a), &name(c));
    }
    let total = spec.n_terminals + spec.n_steiner;
    let target = ((total as f64) * spec.link_density).round() as usize;
    let mut seen = std::collections::HashSet::new();
    let mut placed = 0;
    let mut attempts = 0;
    while placed < target && attempts < target * 20 {
        attempts += 1;
        let i = rng.gen_range(0..total);
        let j = rng.gen_range(0..total);
        let key = (i.min(j), i.max(j));
        if i == j || tree_pairs.contains(&key) || !seen.insert(key) {
            continue;
        }
        let cost = match spec.variant {
            Variant::EdgeWeighted => spec.cost_dist.sample(rng),
            Variant::NodeWeighted => Rat::from_integer(0.into()),
        };
        b = b.link(&name(i), &name(j), cost);
        placed += 1;
    }
    b.build()
}
