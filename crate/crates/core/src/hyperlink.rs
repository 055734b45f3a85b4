//! Hyper-links: terminal subsets priced by their cheapest full component.
//! A hyper-link covers the minimal subtree spanning its terminals; the
//! gamma-restricted collection of all such hyper-links is the covering
//! instance the local greedy works on.

use std::collections::HashMap;

use crate::cost::{format_cost, Rat};
use crate::edgeset::EdgeSet;
use crate::error::{Result, StapError};
use crate::instance::{LinkId, StapInstance, Variant, VertexId};
use crate::rooted::RootedTree;
use crate::steiner::{dreyfus_wagner, SteinerGraph};

/// A full component: the tree of links realizing a hyper-link. Its leaves
/// are exactly the hyper-link's terminals; internal nodes are Steiner nodes.
#[derive(Debug, Clone)]
pub struct FullComponent {
    pub steiner_nodes: Vec<VertexId>,
    pub links: Vec<LinkId>,
}

#[derive(Debug, Clone)]
pub struct HyperLink {
    pub id: usize,
    /// Joined terminals, sorted, size >= 2.
    pub terminals: Vec<VertexId>,
    pub cost: Rat,
    pub realization: FullComponent,
    /// Cached coverage T_l.
    pub coverage: EdgeSet,
}

impl HyperLink {
    /// Tree vertices touched by the coverage (endpoints of covered edges).
    pub fn touched_vertices(&self, rt: &RootedTree) -> Vec<VertexId> {
        touched_vertices(rt, &self.coverage)
    }
}

#[derive(Debug, Clone)]
pub struct HyperTapInstance {
    pub tree: RootedTree,
    pub hyperlinks: Vec<HyperLink>,
    pub gamma: usize,
}

/// Least common ancestor of all joined terminals.
pub fn apex(rt: &RootedTree, terminals: &[VertexId]) -> Result<VertexId> {
    let mut it = terminals.iter();
    let first = *it
        .next()
        .ok_or_else(|| StapError::Internal("apex of empty terminal set".into()))?;
    let mut acc = first;
    for &t in it {
        acc = rt.lca(acc, t)?;
    }
    Ok(acc)
}

/// Edge set of the minimal subtree spanning the given terminals: the union
/// of the paths from each terminal to the apex.
pub fn coverage(rt: &RootedTree, terminals: &[VertexId]) -> Result<EdgeSet> {
    let top = apex(rt, terminals)?;
    let mut cov = EdgeSet::empty(rt.n_edges());
    for &t in terminals {
        for e in rt.path_to_ancestor(t, top) {
            cov.insert(e);
        }
    }
    Ok(cov)
}

pub fn touched_vertices(rt: &RootedTree, cov: &EdgeSet) -> Vec<VertexId> {
    let mut vs: Vec<VertexId> = cov
        .iter()
        .flat_map(|e| {
            let (a, b) = rt.edge_endpoints(e);
            [a, b]
        })
        .collect();
    vs.sort_unstable();
    vs.dedup();
    vs
}

/// True iff every tree vertex is touched by at most `k` of the coverage sets.
pub fn is_k_thin<'a, I>(rt: &RootedTree, coverages: I, k: usize) -> bool
where
    I: IntoIterator<Item = &'a EdgeSet>,
{
    let mut counts: HashMap<VertexId, usize> = HashMap::new();
    for cov in coverages {
        for v in touched_vertices(rt, cov) {
            let c = counts.entry(v).or_insert(0);
            *c += 1;
            if *c > k {
                return false;
            }
        }
    }
    true
}

/// Number of terminal subsets of size 2..=gamma.
pub fn subset_count(n_terminals: usize, gamma: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1; // C(n, 0)
    for i in 1..=gamma.min(n_terminals) {
        binom = binom * (n_terminals - i + 1) as u128 / i as u128;
        if i >= 2 {
            total = total.saturating_add(binom);
        }
    }
    total
}

fn for_each_subset<F: FnMut(&[usize])>(n: usize, size: usize, f: &mut F) {
    fn rec<F: FnMut(&[usize])>(n: usize, size: usize, start: usize, cur: &mut Vec<usize>, f: &mut F) {
        if cur.len() == size {
            f(cur);
            return;
        }
        let remaining = size - cur.len();
        for i in start..=n.saturating_sub(remaining) {
            cur.push(i);
            rec(n, size, i + 1, cur, f);
            cur.pop();
        }
    }
    let mut cur = Vec::with_capacity(size);
    rec(n, size, 0, &mut cur, f);
}

/// Build the gamma-restricted Hyper-TAP instance of a completed edge-weighted
/// instance: one hyper-link per terminal subset that admits a proper full
/// component, priced by Dreyfus-Wagner on the link graph with all other
/// terminals removed.
pub fn build_gamma_restricted(
    inst: &StapInstance,
    rt: &RootedTree,
    gamma: usize,
    max_subsets: usize,
) -> Result<HyperTapInstance> {
    if inst.variant() != Variant::EdgeWeighted {
        return Err(StapError::WrongVariant {
            expected: "edge-weighted",
            actual: inst.variant().keyword(),
        });
    }
    if gamma < 2 {
        return Err(StapError::InvalidInstance(format!(
            "gamma must be at least 2, got {gamma}"
        )));
    }
    let n = inst.n_terminals();
    let count = subset_count(n, gamma);
    if count > max_subsets as u128 {
        return Err(StapError::ResourceLimit(format!(
            "gamma {gamma} yields {count} terminal subsets (cap {max_subsets}); rerun with a smaller --gamma"
        )));
    }

    let terminals: Vec<VertexId> = inst.terminals().to_vec();
    let mut hyperlinks = Vec::new();
    for size in 2..=gamma.min(n) {
        for_each_subset(n, size, &mut |idxs| {
            let subset: Vec<VertexId> = idxs.iter().map(|&i| terminals[i]).collect();
            if let Some(link) = price_subset(inst, rt, &subset, hyperlinks.len()) {
                hyperlinks.push(link);
            }
        });
    }
    Ok(HyperTapInstance {
        tree: rt.clone(),
        hyperlinks,
        gamma,
    })
}

/// Cheapest full component joining `subset`, or `None` when no proper one
/// exists. Terminals outside the subset are removed from the graph: a full
/// component cannot pass through them.
fn price_subset(
    inst: &StapInstance,
    rt: &RootedTree,
    subset: &[VertexId],
    id: usize,
) -> Option<HyperLink> {
    let in_subset = |v: VertexId| subset.contains(&v);
    let graph = SteinerGraph::from_instance(inst, |v| !inst.is_terminal(v) || in_subset(v));
    let tree = dreyfus_wagner(&graph, subset).ok()??;

    // Proper full component: every subset terminal is a leaf. (Leaves outside
    // the subset are impossible: other terminals are not in the graph and
    // Steiner leaves were pruned.)
    let mut degree: HashMap<VertexId, usize> = HashMap::new();
    for &l in &tree.links {
        let link = inst.link(l);
        *degree.entry(link.u).or_insert(0) += 1;
        *degree.entry(link.v).or_insert(0) += 1;
    }
    if subset.iter().any(|t| degree.get(t) != Some(&1)) {
        return None;
    }

    let steiner_nodes: Vec<VertexId> = tree
        .vertices
        .iter()
        .copied()
        .filter(|&v| !inst.is_terminal(v))
        .collect();
    let cov = coverage(rt, subset).ok()?;
    Some(HyperLink {
        id,
        terminals: {
            let mut s = subset.to_vec();
            s.sort_unstable();
            s
        },
        cost: tree.cost,
        realization: FullComponent {
            steiner_nodes,
            links: tree.links,
        },
        coverage: cov,
    })
}

/// Debug dump of a Hyper-TAP instance; replayable by the oracle module.
pub fn dump_hypertap(ht: &HyperTapInstance, inst: &StapInstance) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    for l in &ht.hyperlinks {
        let _ = write!(out, "hyperlink {}", format_cost(&l.cost));
        for &t in &l.terminals {
            let _ = write!(out, " {}", inst.name(t));
        }
        let _ = writeln!(out);
        for &link in &l.realization.links {
            let e = inst.link(link);
            let _ = writeln!(
                out,
                "realization {} {} {}",
                inst.name(e.u),
                inst.name(e.v),
                format_cost(&e.cost)
            );
        }
    }
    out
}

/// Parse a hyper-link dump back against an instance and rooted tree.
/// Realization lines are consumed but only terminals and costs are needed
/// for covering computations.
pub fn parse_hypertap_dump(
    text: &str,
    inst: &StapInstance,
    rt: &RootedTree,
    gamma: usize,
) -> Result<HyperTapInstance> {
    let mut hyperlinks = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let toks: Vec<&str> = raw.split_whitespace().collect();
        match toks.first() {
            None => continue,
            Some(&"realization") => continue,
            Some(&"hyperlink") => {
                let err = |msg: String| StapError::Parse {
                    line: lineno + 1,
                    msg,
                };
                if toks.len() < 4 {
                    return Err(err("hyperlink needs a cost and >= 2 terminals".into()));
                }
                let cost = crate::cost::parse_cost(toks[1])
                    .ok_or_else(|| err(format!("bad cost `{}`", toks[1])))?;
                let mut terminals = Vec::new();
                for t in &toks[2..] {
                    let v = inst
                        .vertex(t)
                        .ok_or_else(|| StapError::UnknownVertex(t.to_string()))?;
                    terminals.push(v);
                }
                terminals.sort_unstable();
                let cov = coverage(rt, &terminals)?;
                hyperlinks.push(HyperLink {
                    id: hyperlinks.len(),
                    terminals,
                    cost,
                    realization: FullComponent {
                        steiner_nodes: Vec::new(),
                        links: Vec::new(),
                    },
                    coverage: cov,
                });
            }
            Some(other) => {
                return Err(StapError::Parse {
                    line: lineno + 1,
                    msg: format!("unknown directive `{other}`"),
                })
            }
        }
    }
    Ok(HyperTapInstance {
        tree: rt.clone(),
        hyperlinks,
        gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complete::complete;
    use crate::cost::rat_int;
    use crate::instance::{InstanceBuilder, Variant};
    use crate::rooted::root_tree;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn star() -> (StapInstance, RootedTree) {
        let inst = InstanceBuilder::new(Variant::EdgeWeighted)
            .terminal("s")
            .terminal("x")
            .terminal("y")
            .terminal("z")
            .tree("s", "x")
            .tree("s", "y")
            .tree("s", "z")
            .link("x", "y", rat_int(1))
            .link("y", "z", rat_int(1))
            .build()
            .unwrap();
        let rt = root_tree(&inst, inst.vertex("s").unwrap()).unwrap();
        (inst, rt)
    }

    #[test]
    fn apex_on_star_and_path() {
        let (inst, rt) = star();
        let (x, y) = (inst.vertex("x").unwrap(), inst.vertex("y").unwrap());
        assert_eq!(apex(&rt, &[x, y]).unwrap(), inst.vertex("s").unwrap());

        let path = InstanceBuilder::new(Variant::EdgeWeighted)
            .terminal("a")
            .terminal("b")
            .terminal("c")
            .tree("a", "b")
            .tree("b", "c")
            .link("a", "c", rat_int(1))
            .build()
            .unwrap();
        let prt = root_tree(&path, path.vertex("a").unwrap()).unwrap();
        assert_eq!(
            apex(&prt, &[path.vertex("b").unwrap(), path.vertex("c").unwrap()]).unwrap(),
            path.vertex("b").unwrap()
        );
    }

    #[test]
    fn coverage_simple_cases() {
        let path = InstanceBuilder::new(Variant::EdgeWeighted)
            .terminal("a")
            .terminal("b")
            .terminal("c")
            .tree("a", "b")
            .tree("b", "c")
            .link("a", "c", rat_int(1))
            .build()
            .unwrap();
        let rt = root_tree(&path, path.vertex("a").unwrap()).unwrap();
        let (a, b, c) = (
            path.vertex("a").unwrap(),
            path.vertex("b").unwrap(),
            path.vertex("c").unwrap(),
        );
        assert_eq!(coverage(&rt, &[a, b]).unwrap().iter().collect::<Vec<_>>(), vec![0]);
        assert_eq!(
            coverage(&rt, &[a, c]).unwrap().iter().collect::<Vec<_>>(),
            vec![0, 1]
        );
    }

    /// Oracle: repeatedly delete degree-1 tree vertices not in the set.
    fn prune_oracle(inst: &StapInstance, set: &[VertexId]) -> Vec<usize> {
        let mut alive: Vec<bool> = vec![true; inst.n_tree_edges()];
        loop {
            let mut degree: HashMap<VertexId, Vec<usize>> = HashMap::new();
            for (e, &(u, v)) in inst.tree_edges().iter().enumerate() {
                if alive[e] {
                    degree.entry(u).or_default().push(e);
                    degree.entry(v).or_default().push(e);
                }
            }
            let mut removed = false;
            for (v, edges) in &degree {
                if edges.len() == 1 && !set.contains(v) {
                    alive[edges[0]] = false;
                    removed = true;
                }
            }
            if !removed {
                break;
            }
        }
        (0..inst.n_tree_edges()).filter(|&e| alive[e]).collect()
    }

    #[test]
    fn coverage_matches_leaf_pruning_oracle() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..50 {
            let inst = crate::testutil::random_edge_instance(&mut rng, 7, 0);
            let rt = root_tree(&inst, inst.terminals()[0]).unwrap();
            let k = rng.gen_range(2..=4);
            let mut set: Vec<VertexId> = inst.terminals().to_vec();
            while set.len() > k {
                set.remove(rng.gen_range(0..set.len()));
            }
            let cov = coverage(&rt, &set).unwrap();
            assert_eq!(cov.iter().collect::<Vec<_>>(), prune_oracle(&inst, &set));
        }
    }

    #[test]
    fn k_thin_trivial_and_conflicting() {
        let (inst, rt) = star();
        assert!(is_k_thin(&rt, [], 1));
        let (x, y, z) = (
            inst.vertex("x").unwrap(),
            inst.vertex("y").unwrap(),
            inst.vertex("z").unwrap(),
        );
        let c1 = coverage(&rt, &[x, y]).unwrap();
        let c2 = coverage(&rt, &[x, z]).unwrap();
        // both touch x and s
        assert!(!is_k_thin(&rt, [&c1, &c2], 1));
        assert!(is_k_thin(&rt, [&c1, &c2], 2));
    }

    #[test]
    fn k_thin_matches_direct_count() {
        let mut rng = StdRng::seed_from_u64(37);
        for _ in 0..40 {
            let inst = crate::testutil::random_edge_instance(&mut rng, 6, 0);
            let rt = root_tree(&inst, inst.terminals()[0]).unwrap();
            let mut covs = Vec::new();
            for _ in 0..rng.gen_range(0..5) {
                let k = rng.gen_range(2..=4).min(inst.n_terminals());
                let mut set: Vec<VertexId> = inst.terminals().to_vec();
                while set.len() > k {
                    set.remove(rng.gen_range(0..set.len()));
                }
                covs.push(coverage(&rt, &set).unwrap());
            }
            let k = rng.gen_range(1..=3);
            let mut counts: HashMap<VertexId, usize> = HashMap::new();
            for c in &covs {
                for v in touched_vertices(&rt, c) {
                    *counts.entry(v).or_insert(0) += 1;
                }
            }
            let expected = counts.values().all(|&c| c <= k);
            assert_eq!(is_k_thin(&rt, covs.iter(), k), expected);
        }
    }

    #[test]
    fn gamma_two_matches_completed_pairs() {
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..20 {
            let inst = crate::testutil::random_edge_instance(&mut rng, 5, 2);
            let rt = root_tree(&inst, inst.terminals()[0]).unwrap();
            let completed = complete(&inst, &rt).unwrap();
            let ht = build_gamma_restricted(&completed, &rt, 2, 100_000).unwrap();
            // every hyper-link is a terminal pair with the pair's cheapest link cost
            let pair_costs: HashMap<(VertexId, VertexId), Rat> = completed
                .links()
                .iter()
                .filter(|l| completed.is_terminal(l.u) && completed.is_terminal(l.v))
                .map(|l| (l.key(), l.cost.clone()))
                .collect();
            for hl in &ht.hyperlinks {
                assert_eq!(hl.terminals.len(), 2);
                let key = (hl.terminals[0], hl.terminals[1]);
                assert_eq!(pair_costs.get(&key), Some(&hl.cost));
            }
            // and every linked pair appears
            let linked_pairs = pair_costs.len();
            assert_eq!(ht.hyperlinks.len(), linked_pairs);
        }
    }

    #[test]
    fn star_join_through_single_steiner() {
        let inst = InstanceBuilder::new(Variant::EdgeWeighted)
            .terminal("a")
            .terminal("b")
            .terminal("c")
            .steiner("h", None)
            .tree("a", "b")
            .tree("b", "c")
            .link("a", "h", rat_int(2))
            .link("b", "h", rat_int(3))
            .link("c", "h", rat_int(4))
            .build()
            .unwrap();
        let rt = root_tree(&inst, inst.vertex("a").unwrap()).unwrap();
        let completed = complete(&inst, &rt).unwrap();
        let ht = build_gamma_restricted(&completed, &rt, 3, 100_000).unwrap();
        let triple = ht
            .hyperlinks
            .iter()
            .find(|l| l.terminals.len() == 3)
            .expect("triple hyper-link exists");
        assert_eq!(triple.cost, rat_int(9));
        assert_eq!(triple.realization.links.len(), 3);
        assert_eq!(triple.coverage.count(), 2);
    }

    #[test]
    fn coverage_is_monotone_and_contains_apex() {
        let mut rng = StdRng::seed_from_u64(43);
        for _ in 0..30 {
            let inst = crate::testutil::random_edge_instance(&mut rng, 6, 1);
            let rt = root_tree(&inst, inst.terminals()[0]).unwrap();
            let mut small: Vec<VertexId> = inst.terminals().to_vec();
            while small.len() > 2 {
                small.remove(rng.gen_range(0..small.len()));
            }
            let mut big = small.clone();
            for &t in inst.terminals() {
                if !big.contains(&t) && rng.gen_bool(0.5) {
                    big.push(t);
                }
            }
            let cs = coverage(&rt, &small).unwrap();
            let cb = coverage(&rt, &big).unwrap();
            assert!(cs.is_subset_of(&cb));
            if !cs.is_empty() {
                let a = apex(&rt, &small).unwrap();
                assert!(touched_vertices(&rt, &cs).contains(&a));
            }
        }
    }

    #[test]
    fn subset_cap_is_enforced() {
        let mut rng = StdRng::seed_from_u64(47);
        let inst = crate::testutil::random_edge_instance(&mut rng, 8, 0);
        let rt = root_tree(&inst, inst.terminals()[0]).unwrap();
        match build_gamma_restricted(&inst, &rt, 8, 10) {
            Err(StapError::ResourceLimit(msg)) => assert!(msg.contains("gamma")),
            other => panic!("expected resource limit, got {other:?}"),
        }
    }

    #[test]
    fn dump_round_trips_terminals_and_costs() {
        let (inst, rt) = star();
        let completed = complete(&inst, &rt).unwrap();
        let ht = build_gamma_restricted(&completed, &rt, 3, 100_000).unwrap();
        let dump = dump_hypertap(&ht, &completed);
        let parsed = parse_hypertap_dump(&dump, &completed, &rt, 3).unwrap();
        assert_eq!(parsed.hyperlinks.len(), ht.hyperlinks.len());
        for (a, b) in parsed.hyperlinks.iter().zip(&ht.hyperlinks) {
            assert_eq!(a.terminals, b.terminals);
            assert_eq!(a.cost, b.cost);
            assert!(a.coverage == b.coverage);
        }
    }
}
