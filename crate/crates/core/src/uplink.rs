//! The structured 2-approximate starting solution: an optimal cover of the
//! tree by up-links (ancestor-descendant links), then shortened so that every
//! tree edge is covered exactly once.

use std::collections::HashMap;

use num::traits::Zero;

use crate::cost::Rat;
use crate::edgeset::EdgeSet;
use crate::error::{Result, StapError};
use crate::instance::{LinkId, StapInstance, VertexId};
use crate::rooted::RootedTree;

/// A link whose endpoints are in ancestor-descendant relation; covers the
/// vertical path between them.
#[derive(Debug, Clone)]
pub struct UpLink {
    pub bottom: VertexId,
    pub top: VertexId,
    pub cost: Rat,
    /// The instance link realizing this up-link.
    pub link: LinkId,
    /// P_u: the covered tree edges.
    pub path: EdgeSet,
}

#[derive(Debug, Clone)]
pub struct UpLinkSolution {
    pub uplinks: Vec<UpLink>,
    pub total_cost: Rat,
}

impl UpLinkSolution {
    pub fn coverage_multiplicity(&self, n_edges: usize) -> Vec<usize> {
        let mut mult = vec![0; n_edges];
        for u in &self.uplinks {
            for e in u.path.iter() {
                mult[e] += 1;
            }
        }
        mult
    }

    pub fn covers_all(&self, n_edges: usize) -> bool {
        self.coverage_multiplicity(n_edges).iter().all(|&m| m >= 1)
    }
}

/// All up-links of the instance, cheapest per (bottom, top) pair, sorted.
pub fn enumerate_uplinks(inst: &StapInstance, rt: &RootedTree) -> Vec<UpLink> {
    let mut best: HashMap<(VertexId, VertexId), (Rat, LinkId)> = HashMap::new();
    for (id, l) in inst.links().iter().enumerate() {
        if !rt.contains(l.u) || !rt.contains(l.v) || l.u == l.v {
            continue;
        }
        let (bottom, top) = if rt.depth(l.u) > rt.depth(l.v) {
            (l.u, l.v)
        } else {
            (l.v, l.u)
        };
        if !rt.is_ancestor(top, bottom) {
            continue;
        }
        best.entry((bottom, top))
            .and_modify(|(c, lid)| {
                if l.cost < *c {
                    *c = l.cost.clone();
                    *lid = id;
                }
            })
            .or_insert((l.cost.clone(), id));
    }
    let mut keys: Vec<(VertexId, VertexId)> = best.keys().copied().collect();
    keys.sort_unstable();
    keys.into_iter()
        .map(|(bottom, top)| {
            let (cost, link) = best[&(bottom, top)].clone();
            let path = EdgeSet::from_iter(rt.n_edges(), rt.path_to_ancestor(bottom, top));
            UpLink {
                bottom,
                top,
                cost,
                link,
                path,
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug)]
enum Choice {
    /// No upward obligation beyond v (state depth == depth(v)).
    SubtreeOnly,
    /// Pay for the up-link with this index; children end at v.
    OwnLink(usize),
    /// Child with this index carries the obligation.
    Delegate(usize),
}

/// Exact minimum-cost subset of up-links covering every tree edge.
///
/// Vertical-path covering dynamic program: `f(v, d)` is the cheapest way to
/// cover the subtree below `v` plus the path from `v` up to its ancestor at
/// depth `d`, using up-links with bottom inside the subtree. The obligation
/// at `v` is met either by an up-link starting at `v` reaching depth <= d
/// (overshoot allowed) or delegated to exactly one child.
pub fn optimal_uplink_solution(
    inst: &StapInstance,
    uplinks: &[UpLink],
    rt: &RootedTree,
) -> Result<UpLinkSolution> {
    let n = inst.n_vertices();

    // Up-links keyed by bottom vertex, with suffix minima over top depth:
    // cheapest_from[v][d] = cheapest up-link from v reaching depth <= d.
    let mut at_bottom: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, u) in uplinks.iter().enumerate() {
        at_bottom[u.bottom as usize].push(i);
    }
    let cheapest_from = |v: VertexId, d: usize| -> Option<(Rat, usize)> {
        let mut best: Option<(Rat, usize)> = None;
        for &i in &at_bottom[v as usize] {
            let u = &uplinks[i];
            if rt.depth(u.top) <= d && best.as_ref().map_or(true, |(c, _)| u.cost < *c) {
                best = Some((u.cost.clone(), i));
            }
        }
        best
    };

    // f[v] has depth(v)+1 entries: f[v][d] for d in 0..=depth(v).
    let mut f: Vec<Vec<Option<Rat>>> = vec![Vec::new(); n];
    let mut choice: Vec<Vec<Option<Choice>>> = vec![Vec::new(); n];

    for &v in rt.preorder().iter().rev() {
        let dv = rt.depth(v);
        let children = rt.children(v);
        let mut base: Option<Rat> = Some(Rat::zero());
        for &c in children {
            base = match (base, &f[c as usize][dv]) {
                (Some(b), Some(fc)) => Some(b + fc),
                _ => None,
            };
        }
        let mut fv: Vec<Option<Rat>> = vec![None; dv + 1];
        let mut cv: Vec<Option<Choice>> = vec![None; dv + 1];
        fv[dv] = base.clone();
        cv[dv] = Some(Choice::SubtreeOnly);
        for d in 0..dv {
            let mut best: Option<(Rat, Choice)> = None;
            if let Some(b) = &base {
                if let Some((lc, li)) = cheapest_from(v, d) {
                    best = Some((b.clone() + lc, Choice::OwnLink(li)));
                }
            }
            for (j, &c) in children.iter().enumerate() {
                if let (Some(b), Some(fcd), Some(fcv)) =
                    (&base, &f[c as usize][d], &f[c as usize][dv])
                {
                    let cand = b.clone() + fcd - fcv;
                    if best.as_ref().map_or(true, |(bc, _)| cand < *bc) {
                        best = Some((cand, Choice::Delegate(j)));
                    }
                }
            }
            if let Some((cost, ch)) = best {
                fv[d] = Some(cost);
                cv[d] = Some(ch);
            }
        }
        f[v as usize] = fv;
        choice[v as usize] = cv;
    }

    let root = rt.root();
    if f[root as usize][0].is_none() {
        return Err(StapError::UncoverableEdge(first_uncoverable_edge(
            inst, uplinks, rt,
        )));
    }
    let total = f[root as usize][0].clone().unwrap();

    // Reconstruct.
    let mut picked: Vec<usize> = Vec::new();
    let mut stack = vec![(root, 0usize)];
    while let Some((v, d)) = stack.pop() {
        let dv = rt.depth(v);
        match choice[v as usize][d].expect("feasible state has a choice") {
            Choice::SubtreeOnly => {
                for &c in rt.children(v) {
                    stack.push((c, dv));
                }
            }
            Choice::OwnLink(i) => {
                picked.push(i);
                for &c in rt.children(v) {
                    stack.push((c, dv));
                }
            }
            Choice::Delegate(j) => {
                for (i, &c) in rt.children(v).iter().enumerate() {
                    stack.push((c, if i == j { d } else { dv }));
                }
            }
        }
    }
    picked.sort_unstable();
    picked.dedup();
    let chosen: Vec<UpLink> = picked.into_iter().map(|i| uplinks[i].clone()).collect();
    let check: Rat = chosen.iter().fold(Rat::zero(), |acc, u| acc + &u.cost);
    debug_assert_eq!(check, total);
    let sol = UpLinkSolution {
        uplinks: chosen,
        total_cost: total,
    };
    debug_assert!(sol.covers_all(rt.n_edges()));
    Ok(sol)
}

fn first_uncoverable_edge(inst: &StapInstance, uplinks: &[UpLink], rt: &RootedTree) -> String {
    for e in 0..rt.n_edges() {
        if !uplinks.iter().any(|u| u.path.contains(e)) {
            let (a, b) = rt.edge_endpoints(e);
            return format!("{}-{}", inst.name(a), inst.name(b));
        }
    }
    "unknown".to_string()
}

/// Shorten a feasible up-link solution so that every tree edge is covered
/// exactly once, never increasing the cost. Requires a shadow-complete link
/// set so that truncated up-links exist.
///
/// Sweep edges root-to-leaf. At an over-covered edge, at most one covering
/// up-link extends above it (edges above are already exactly-once); that one
/// is kept and the others are truncated to end just below the edge.
pub fn shorten_exact_cover(
    sol: &UpLinkSolution,
    inst: &StapInstance,
    rt: &RootedTree,
) -> Result<UpLinkSolution> {
    let pair_index = inst.link_pair_index();
    let mut current: Vec<Option<UpLink>> = sol.uplinks.iter().cloned().map(Some).collect();

    let mut edges: Vec<usize> = (0..rt.n_edges()).collect();
    edges.sort_by_key(|&e| (rt.depth(rt.edge_child(e)), e));

    for e in edges {
        let x = rt.edge_child(e);
        let y = rt.parent(x).expect("edge child has a parent");
        let covering: Vec<usize> = current
            .iter()
            .enumerate()
            .filter_map(|(i, u)| u.as_ref().filter(|u| u.path.contains(e)).map(|_| i))
            .collect();
        if covering.len() <= 1 {
            continue;
        }
        // The keeper is the unique coverer extending above y, if any.
        let keeper = covering
            .iter()
            .copied()
            .find(|&i| {
                let u = current[i].as_ref().unwrap();
                rt.depth(u.top) < rt.depth(y)
            })
            .unwrap_or(covering[0]);
        for &i in &covering {
            if i == keeper {
                continue;
            }
            let u = current[i].take().unwrap();
            debug_assert!(u.top == y || i == covering[0]);
            if u.bottom == x {
                continue; // truncated to nothing
            }
            let key = if u.bottom <= x { (u.bottom, x) } else { (x, u.bottom) };
            let link = *pair_index.get(&key).ok_or_else(|| {
                StapError::Internal(format!(
                    "missing shadow link {}-{}; instance not shadow-complete",
                    inst.name(u.bottom),
                    inst.name(x)
                ))
            })?;
            let cost = inst.link(link).cost.clone();
            if cost > u.cost {
                return Err(StapError::Internal(
                    "shadow link costs more than its parent".into(),
                ));
            }
            let path = EdgeSet::from_iter(rt.n_edges(), rt.path_to_ancestor(u.bottom, x));
            current[i] = Some(UpLink {
                bottom: u.bottom,
                top: x,
                cost,
                link,
                path,
            });
        }
    }

    let uplinks: Vec<UpLink> = current.into_iter().flatten().collect();
    let total_cost = uplinks.iter().fold(Rat::zero(), |acc, u| acc + &u.cost);
    let out = UpLinkSolution {
        uplinks,
        total_cost,
    };
    debug_assert!(out
        .coverage_multiplicity(rt.n_edges())
        .iter()
        .all(|&m| m == 1));
    Ok(out)
}

/// Convenience: enumerate, solve optimally, then shorten.
pub fn shortened_optimal_uplinks(
    inst: &StapInstance,
    rt: &RootedTree,
) -> Result<UpLinkSolution> {
    let ups = enumerate_uplinks(inst, rt);
    let opt = optimal_uplink_solution(inst, &ups, rt)?;
    shorten_exact_cover(&opt, inst, rt)
}
