//! Metric and shadow completion of edge-weighted instances.
//!
//! Metric completion gives every terminal pair a direct link priced at the
//! shortest-path distance over the link graph. Shadow completion projects
//! every terminal-terminal link onto all vertex pairs of its tree path.
//! Both keep the minimum when a cheaper link already exists, and both record
//! provenance so solutions expand back to input links at equal cost.
//!
//! A single metric-then-shadow round is not a fixpoint: shadows can connect
//! vertices the link graph could not, enabling shorter metric paths in the
//! next round. `complete` iterates both passes until the link set stabilizes,
//! which makes the composite idempotent.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::cost::Rat;
use crate::error::{Result, StapError};
use crate::instance::{Link, LinkId, LinkOrigin, StapInstance, Variant, VertexId};
use crate::rooted::RootedTree;

fn require_edge_weighted(inst: &StapInstance) -> Result<()> {
    if inst.variant() != Variant::EdgeWeighted {
        return Err(StapError::WrongVariant {
            expected: "edge-weighted",
            actual: inst.variant().keyword(),
        });
    }
    Ok(())
}

/// Shortest-path distances and predecessor links from `source` over the
/// current link set. Deterministic: ties pop the smaller vertex id and only
/// strict improvements update predecessors.
fn dijkstra(inst: &StapInstance, source: VertexId) -> (Vec<Option<Rat>>, Vec<Option<LinkId>>) {
    let n = inst.n_vertices();
    let adj = inst.link_adjacency();
    let mut dist: Vec<Option<Rat>> = vec![None; n];
    let mut pred: Vec<Option<LinkId>> = vec![None; n];
    let mut heap: BinaryHeap<Reverse<(Rat, VertexId)>> = BinaryHeap::new();
    dist[source as usize] = Some(Rat::from_integer(0.into()));
    heap.push(Reverse((Rat::from_integer(0.into()), source)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if dist[v as usize].as_ref() != Some(&d) {
            continue;
        }
        for &(w, link) in &adj[v as usize] {
            let cand = d.clone() + &inst.link(link).cost;
            let better = match &dist[w as usize] {
                None => true,
                Some(cur) => cand < *cur,
            };
            if better {
                dist[w as usize] = Some(cand.clone());
                pred[w as usize] = Some(link);
                heap.push(Reverse((cand, w)));
            }
        }
    }
    (dist, pred)
}

/// One metric-completion pass: for every terminal pair at finite link-graph
/// distance, ensure a direct link of that cost exists, recording the
/// realizing path.
pub fn metric_completion(inst: &StapInstance) -> Result<StapInstance> {
    require_edge_weighted(inst)?;
    let mut out = inst.clone();
    let terminals: Vec<VertexId> = inst.terminals().to_vec();
    let mut pair_index = out.link_pair_index();
    for &s in &terminals {
        let (dist, pred) = dijkstra(&out, s);
        for &t in &terminals {
            if t <= s {
                continue;
            }
            let d = match &dist[t as usize] {
                Some(d) => d.clone(),
                None => continue,
            };
            let key = if s <= t { (s, t) } else { (t, s) };
            let existing = pair_index.get(&key).copied();
            let improves = match existing {
                Some(id) => d < out.link(id).cost,
                None => true,
            };
            if !improves {
                continue;
            }
            let mut path = Vec::new();
            let mut cur = t;
            while cur != s {
                let l = pred[cur as usize].expect("reachable vertex has predecessor");
                path.push(l);
                cur = out.link(l).other(cur);
            }
            path.reverse();
            let inputs: Vec<LinkId> = path.iter().flat_map(|&l| out.expand_link(l)).collect();
            debug_assert_eq!(out.link_multiset_cost(&inputs), d);
            let origin = LinkOrigin::Metric { path, inputs };
            match existing {
                Some(id) => out.set_link_cost(id, d, origin),
                None => {
                    let id = out.push_link(Link {
                        u: s,
                        v: t,
                        cost: d,
                        origin,
                    });
                    pair_index.insert(key, id);
                }
            }
        }
    }
    Ok(out)
}

/// One shadow-completion pass: every terminal-terminal link is projected to
/// all vertex pairs of its tree path, keeping minima. A single pass reaches
/// the shadow fixpoint because a lowered link's path pairs are a subset of
/// the lowering parent's path pairs.
pub fn shadow_completion(inst: &StapInstance, rt: &RootedTree) -> Result<StapInstance> {
    require_edge_weighted(inst)?;
    let mut out = inst.clone();
    let mut pair_index = out.link_pair_index();
    let snapshot = out.links().len();
    for parent in 0..snapshot {
        let (u, v) = (out.link(parent).u, out.link(parent).v);
        if !rt.contains(u) || !rt.contains(v) || u == v {
            continue;
        }
        let cost = out.link(parent).cost.clone();
        let vertices = rt.tree_path_vertices(u, v)?;
        let inputs = out.expand_link(parent);
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                let (a, b) = (vertices[i], vertices[j]);
                let key = if a <= b { (a, b) } else { (b, a) };
                match pair_index.get(&key).copied() {
                    Some(id) => {
                        if cost < out.link(id).cost {
                            out.set_link_cost(
                                id,
                                cost.clone(),
                                LinkOrigin::Shadow {
                                    parent,
                                    inputs: inputs.clone(),
                                },
                            );
                        }
                    }
                    None => {
                        let id = out.push_link(Link {
                            u: a,
                            v: b,
                            cost: cost.clone(),
                            origin: LinkOrigin::Shadow {
                                parent,
                                inputs: inputs.clone(),
                            },
                        });
                        pair_index.insert(key, id);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn link_signature(inst: &StapInstance) -> HashMap<(VertexId, VertexId), Rat> {
    inst.links()
        .iter()
        .map(|l| (l.key(), l.cost.clone()))
        .collect()
}

/// Metric + shadow completion iterated to a fixpoint. This is the
/// preprocessing every solver assumes; applying it twice changes nothing.
pub fn complete(inst: &StapInstance, rt: &RootedTree) -> Result<StapInstance> {
    let mut cur = inst.clone();
    let mut sig = link_signature(&cur);
    loop {
        let next = shadow_completion(&metric_completion(&cur)?, rt)?;
        let next_sig = link_signature(&next);
        let stable = next_sig == sig;
        cur = next;
        sig = next_sig;
        if stable {
            return Ok(cur);
        }
    }
}
