//! Exact minimum Steiner trees on the link graph via the Dreyfus-Wagner
//! dynamic program, used to price full components.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num::traits::Zero;

use crate::cost::Rat;
use crate::error::{Result, StapError};
use crate::instance::{LinkId, StapInstance, VertexId};

/// A restricted view of the link graph: only `vertices` exist, edges are the
/// instance links between them.
pub struct SteinerGraph {
    /// Instance-level ids of the active vertices.
    vertices: Vec<VertexId>,
    local: Vec<Option<usize>>,
    adj: Vec<Vec<(usize, Rat, LinkId)>>,
}

impl SteinerGraph {
    pub fn from_instance<F: Fn(VertexId) -> bool>(inst: &StapInstance, allowed: F) -> Self {
        let mut vertices = Vec::new();
        let mut local = vec![None; inst.n_vertices()];
        for v in 0..inst.n_vertices() as VertexId {
            if allowed(v) {
                local[v as usize] = Some(vertices.len());
                vertices.push(v);
            }
        }
        let mut adj = vec![Vec::new(); vertices.len()];
        for (id, l) in inst.links().iter().enumerate() {
            if let (Some(a), Some(b)) = (local[l.u as usize], local[l.v as usize]) {
                adj[a].push((b, l.cost.clone(), id));
                adj[b].push((a, l.cost.clone(), id));
            }
        }
        SteinerGraph {
            vertices,
            local,
            adj,
        }
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        (v as usize) < self.local.len() && self.local[v as usize].is_some()
    }

    pub fn vertex_at(&self, local: usize) -> VertexId {
        self.vertices[local]
    }

    fn dijkstra(&self, source: usize) -> (Vec<Option<Rat>>, Vec<Option<(usize, LinkId)>>) {
        let n = self.n();
        let mut dist: Vec<Option<Rat>> = vec![None; n];
        let mut pred: Vec<Option<(usize, LinkId)>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        dist[source] = Some(Rat::zero());
        heap.push(Reverse((Rat::zero(), source)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if dist[v].as_ref() != Some(&d) {
                continue;
            }
            for (w, cost, link) in &self.adj[v] {
                let cand = d.clone() + cost;
                if dist[*w].as_ref().map_or(true, |cur| cand < *cur) {
                    dist[*w] = Some(cand.clone());
                    pred[*w] = Some((v, *link));
                    heap.push(Reverse((cand, *w)));
                }
            }
        }
        (dist, pred)
    }
}

#[derive(Debug, Clone)]
pub struct SteinerTree {
    pub cost: Rat,
    /// Links of the tree, deduplicated and sorted.
    pub links: Vec<LinkId>,
    /// Vertices of the tree (instance ids).
    pub vertices: Vec<VertexId>,
}

/// Minimum-cost tree connecting `terminals` inside `graph`, or `None` when
/// they cannot be connected. Exact for any terminal count; exponential in
/// `terminals.len()` only.
pub fn dreyfus_wagner(
    graph: &SteinerGraph,
    terminals: &[VertexId],
) -> Result<Option<SteinerTree>> {
    let p = terminals.len();
    if p < 2 {
        return Err(StapError::Internal(
            "dreyfus_wagner needs at least two terminals".into(),
        ));
    }
    for &t in terminals {
        if !graph.contains(t) {
            return Err(StapError::UnknownVertex(format!("#{t}")));
        }
    }
    let n = graph.n();
    let term_local: Vec<usize> = terminals
        .iter()
        .map(|&t| graph.local[t as usize].unwrap())
        .collect();

    // All-pairs shortest paths from every vertex (n is small here).
    let mut dist = Vec::with_capacity(n);
    let mut pred = Vec::with_capacity(n);
    for s in 0..n {
        let (d, pr) = graph.dijkstra(s);
        dist.push(d);
        pred.push(pr);
    }

    let full: usize = (1 << p) - 1;
    // dp[mask][v] = cheapest tree spanning {terminals in mask} + v.
    let mut dp: Vec<Vec<Option<Rat>>> = vec![vec![None; n]; full + 1];
    // Backtrack: (relay vertex u, merge submask or None for base).
    let mut back: Vec<Vec<Option<(usize, Option<usize>)>>> = vec![vec![None; n]; full + 1];

    for mask in 1..=full {
        // Merge step at each vertex.
        let mut merged: Vec<Option<(Rat, Option<usize>)>> = vec![None; n];
        if mask.count_ones() == 1 {
            let i = mask.trailing_zeros() as usize;
            merged[term_local[i]] = Some((Rat::zero(), None));
        } else {
            for v in 0..n {
                let mut best: Option<(Rat, Option<usize>)> = None;
                let mut sub = (mask - 1) & mask;
                while sub > 0 {
                    let other = mask ^ sub;
                    // Each split is seen twice (sub/other swapped); harmless.
                    if let (Some(a), Some(b)) = (&dp[sub][v], &dp[other][v]) {
                        let cand = a.clone() + b;
                        if best.as_ref().map_or(true, |(c, _)| cand < *c) {
                            best = Some((cand, Some(sub)));
                        }
                    }
                    sub = (sub - 1) & mask;
                }
                merged[v] = best;
            }
        }
        // Relax: connect the merge point to v by a shortest path.
        for v in 0..n {
            let mut best: Option<(Rat, usize, Option<usize>)> = None;
            for (u, entry) in merged.iter().enumerate() {
                if let Some((mcost, msub)) = entry {
                    if let Some(d) = &dist[u][v] {
                        let cand = mcost.clone() + d;
                        if best.as_ref().map_or(true, |(c, _, _)| cand < *c) {
                            best = Some((cand, u, *msub));
                        }
                    }
                }
            }
            if let Some((cost, u, msub)) = best {
                dp[mask][v] = Some(cost);
                back[mask][v] = Some((u, msub));
            }
        }
    }

    let answer_at = term_local[0];
    let total = match &dp[full][answer_at] {
        Some(c) => c.clone(),
        None => return Ok(None),
    };

    // Reconstruct the link multiset by walking the backtable.
    let mut links = Vec::new();
    let mut stack = vec![(full, answer_at)];
    while let Some((mask, v)) = stack.pop() {
        let (u, msub) = back[mask][v].expect("reachable state has backpointer");
        // shortest path u -> v
        let mut cur = v;
        while cur != u {
            let (prev, link) = pred[u][cur].expect("path step exists");
            links.push(link);
            cur = prev;
        }
        match msub {
            None => {} // base case: single terminal at u
            Some(sub) => {
                stack.push((sub, u));
                stack.push((mask ^ sub, u));
            }
        }
    }
    links.sort_unstable();
    links.dedup();

    // Prune leaves that are not terminals (possible with zero-cost links).
    let tree = prune_to_terminals(graph, links, terminals);
    debug_assert_eq!(tree_cost(graph, &tree), total);
    let mut vertices: Vec<VertexId> = tree
        .iter()
        .flat_map(|&l| {
            let link = link_endpoints(graph, l);
            [link.0, link.1]
        })
        .collect();
    if tree.is_empty() {
        // p >= 2 with zero edges can only mean duplicate terminal ids.
        vertices = terminals.to_vec();
    }
    vertices.sort_unstable();
    vertices.dedup();
    Ok(Some(SteinerTree {
        cost: total,
        links: tree,
        vertices,
    }))
}

fn link_endpoints(graph: &SteinerGraph, link: LinkId) -> (VertexId, VertexId) {
    for (a, row) in graph.adj.iter().enumerate() {
        for (b, _, l) in row {
            if *l == link {
                return (graph.vertices[a], graph.vertices[*b]);
            }
        }
    }
    unreachable!("link not in graph");
}

#[allow(dead_code)]
fn tree_cost(graph: &SteinerGraph, links: &[LinkId]) -> Rat {
    let mut total = Rat::zero();
    let mut seen = std::collections::HashSet::new();
    for row in &graph.adj {
        for (_, cost, l) in row {
            if links.contains(l) && seen.insert(*l) {
                total += cost;
            }
        }
    }
    total
}

fn prune_to_terminals(
    graph: &SteinerGraph,
    mut links: Vec<LinkId>,
    terminals: &[VertexId],
) -> Vec<LinkId> {
    loop {
        let mut degree: std::collections::HashMap<VertexId, usize> = std::collections::HashMap::new();
        let mut endpoints = Vec::new();
        for &l in &links {
            let (a, b) = link_endpoints(graph, l);
            *degree.entry(a).or_insert(0) += 1;
            *degree.entry(b).or_insert(0) += 1;
            endpoints.push((l, a, b));
        }
        let removable: Vec<LinkId> = endpoints
            .iter()
            .filter(|(_, a, b)| {
                (degree[a] == 1 && !terminals.contains(a))
                    || (degree[b] == 1 && !terminals.contains(b))
            })
            .map(|(l, _, _)| *l)
            .collect();
        if removable.is_empty() {
            return links;
        }
        links.retain(|l| !removable.contains(l));
    }
}
