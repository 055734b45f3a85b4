//! Independent exact solvers and feasibility checks at desk scale. Every
//! approximation claim in this crate is tested against these.

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use num::traits::Zero;

use crate::cost::Rat;
use crate::edgeset::EdgeSet;
use crate::error::{Result, StapError};
use crate::hyperlink::{touched_vertices, HyperTapInstance};
use crate::instance::{EdgeId, LinkId, StapInstance, VertexId};
use crate::nw::{build_spider, node_weighted_sssp, PseudoSpider};
use crate::rooted::RootedTree;
use crate::uplink::UpLink;

#[derive(Debug, Clone)]
pub struct OracleBudget {
    /// Steiner-node bound for exact_nwstap; terminal bound for the spider oracle.
    pub max_vertices: usize,
    /// Link bound for exact_stap.
    pub max_links: usize,
    /// Hyper-link bound for exact_hypertap and exact_kthin_maximizer.
    pub max_subsets: usize,
    pub time_cap: Duration,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_vertices: 15,
            max_links: 20,
            max_subsets: 14,
            time_cap: Duration::from_secs(60),
        }
    }
}

struct Deadline {
    end: Instant,
    counter: u32,
}

impl Deadline {
    fn new(cap: Duration) -> Self {
        Deadline {
            end: Instant::now() + cap,
            counter: 0,
        }
    }

    fn check(&mut self, what: &str) -> Result<()> {
        self.counter = self.counter.wrapping_add(1);
        if self.counter % 512 == 0 && Instant::now() > self.end {
            return Err(StapError::OracleBudget(format!("{what}: time cap exceeded")));
        }
        Ok(())
    }
}

/// Feasibility per the covering characterization: for every tree edge, the
/// two sides of the tree stay connected when the edge is removed, using the
/// remaining tree edges plus the given links.
pub fn check_feasible_stap(inst: &StapInstance, links: &[LinkId]) -> bool {
    let n = inst.n_vertices();
    for skip in 0..inst.n_tree_edges() {
        let mut dsu = Dsu::new(n);
        for (e, &(a, b)) in inst.tree_edges().iter().enumerate() {
            if e != skip {
                dsu.union(a as usize, b as usize);
            }
        }
        for &l in links {
            let link = inst.link(l);
            dsu.union(link.u as usize, link.v as usize);
        }
        let (a, b) = inst.tree_edges()[skip];
        if dsu.find(a as usize) != dsu.find(b as usize) {
            return false;
        }
    }
    true
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Bridges of the multigraph on `vertices` with the given edge list, by
/// index. Textbook DFS lowpoint; parallel edges handled via edge indices.
pub fn bridges(vertices: &[VertexId], edges: &[(VertexId, VertexId)]) -> Vec<usize> {
    let index: HashMap<VertexId, usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let n = vertices.len();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (ei, &(a, b)) in edges.iter().enumerate() {
        let (ia, ib) = match (index.get(&a), index.get(&b)) {
            (Some(&ia), Some(&ib)) => (ia, ib),
            _ => continue,
        };
        adj[ia].push((ib, ei));
        adj[ib].push((ia, ei));
    }
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![usize::MAX; n];
    let mut out = Vec::new();
    let mut timer = 0usize;
    for start in 0..n {
        if disc[start] != usize::MAX {
            continue;
        }
        // stack entries: (vertex, entering edge id, next adjacency position)
        let mut stack: Vec<(usize, usize, usize)> = vec![(start, usize::MAX, 0)];
        disc[start] = timer;
        low[start] = timer;
        timer += 1;
        while let Some(&mut (v, enter, ref mut pos)) = stack.last_mut() {
            if *pos < adj[v].len() {
                let (w, ei) = adj[v][*pos];
                *pos += 1;
                if ei == enter {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, ei, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&mut (p, _, _)) = stack.last_mut() {
                    low[p] = low[p].min(low[v]);
                    if low[v] > disc[p] {
                        out.push(enter);
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Tree edges that are bridges in (V, E(T) + links): exactly the uncovered
/// tree edges. Cross-validates `check_feasible_stap`.
pub fn tree_edge_bridges(inst: &StapInstance, links: &[LinkId]) -> Vec<EdgeId> {
    let vertices: Vec<VertexId> = (0..inst.n_vertices() as VertexId).collect();
    let mut edges: Vec<(VertexId, VertexId)> = inst.tree_edges().to_vec();
    for &l in links {
        let link = inst.link(l);
        edges.push((link.u, link.v));
    }
    bridges(&vertices, &edges)
        .into_iter()
        .filter(|&ei| ei < inst.n_tree_edges())
        .collect()
}

/// Connected with no bridges. Single vertices count as 2-edge-connected.
pub fn is_two_edge_connected(vertices: &[VertexId], edges: &[(VertexId, VertexId)]) -> bool {
    if vertices.len() <= 1 {
        return true;
    }
    let index: HashMap<VertexId, usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for &(a, b) in edges {
        if let (Some(&ia), Some(&ib)) = (index.get(&a), index.get(&b)) {
            adj[ia].push(ib);
            adj[ib].push(ia);
        }
    }
    let mut seen = vec![false; vertices.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == vertices.len() && bridges(vertices, edges).is_empty()
}

/// Exact minimum-cost link set: subset enumeration in cost order with
/// branch-and-bound. `Ok(None)` means infeasible.
pub fn exact_stap(
    inst: &StapInstance,
    budget: &OracleBudget,
) -> Result<Option<(Rat, Vec<LinkId>)>> {
    let n = inst.links().len();
    if n > budget.max_links {
        return Err(StapError::OracleBudget(format!(
            "exact_stap: {n} links exceeds budget {}",
            budget.max_links
        )));
    }
    let mut order: Vec<LinkId> = (0..n).collect();
    order.sort_by(|&a, &b| {
        inst.link(a)
            .cost
            .cmp(&inst.link(b).cost)
            .then(a.cmp(&b))
    });
    if !check_feasible_stap(inst, &order) {
        return Ok(None);
    }
    let mut deadline = Deadline::new(budget.time_cap);
    let mut best: Option<(Rat, Vec<LinkId>)> = None;
    let mut chosen: Vec<LinkId> = Vec::new();

    fn dfs(
        inst: &StapInstance,
        order: &[LinkId],
        idx: usize,
        chosen: &mut Vec<LinkId>,
        cost: Rat,
        best: &mut Option<(Rat, Vec<LinkId>)>,
        deadline: &mut Deadline,
    ) -> Result<()> {
        deadline.check("exact_stap")?;
        if let Some((bc, _)) = best {
            if cost >= *bc {
                return Ok(());
            }
        }
        if check_feasible_stap(inst, chosen) {
            *best = Some((cost, chosen.clone()));
            return Ok(());
        }
        if idx == order.len() {
            return Ok(());
        }
        // can the remainder still cover?
        let mut with_rest = chosen.clone();
        with_rest.extend_from_slice(&order[idx..]);
        if !check_feasible_stap(inst, &with_rest) {
            return Ok(());
        }
        let link_cost = inst.link(order[idx]).cost.clone();
        chosen.push(order[idx]);
        dfs(inst, order, idx + 1, chosen, cost.clone() + link_cost, best, deadline)?;
        chosen.pop();
        dfs(inst, order, idx + 1, chosen, cost, best, deadline)
    }

    dfs(
        inst,
        &order,
        0,
        &mut chosen,
        Rat::zero(),
        &mut best,
        &mut deadline,
    )?;
    Ok(best.map(|(c, mut set)| {
        set.sort_unstable();
        (c, set)
    }))
}

#[derive(Debug, Clone)]
pub struct NwExact {
    pub cost: Rat,
    pub steiner_nodes: Vec<VertexId>,
    /// Costed links bought directly (pre-subdivision instances).
    pub links: Vec<LinkId>,
}

/// Exact minimum-cost node-weighted augmentation. Items are the Steiner
/// nodes plus any costed links (equivalent to their subdivision nodes).
pub fn exact_nwstap(inst: &StapInstance, budget: &OracleBudget) -> Result<Option<NwExact>> {
    let steiner: Vec<VertexId> = inst.steiner_nodes().collect();
    if steiner.len() > budget.max_vertices {
        return Err(StapError::OracleBudget(format!(
            "exact_nwstap: {} Steiner nodes exceeds budget {}",
            steiner.len(),
            budget.max_vertices
        )));
    }
    #[derive(Clone, Copy)]
    enum Item {
        Node(VertexId),
        Link(LinkId),
    }
    let mut items: Vec<(Item, Rat)> = steiner
        .iter()
        .map(|&v| (Item::Node(v), inst.node_cost(v).cloned().unwrap_or_else(Rat::zero)))
        .collect();
    let costed: Vec<LinkId> = (0..inst.links().len())
        .filter(|&l| !inst.link(l).cost.is_zero())
        .collect();
    if costed.len() > budget.max_links {
        return Err(StapError::OracleBudget(format!(
            "exact_nwstap: {} costed links exceeds budget {}",
            costed.len(),
            budget.max_links
        )));
    }
    items.extend(costed.iter().map(|&l| (Item::Link(l), inst.link(l).cost.clone())));
    items.sort_by(|a, b| a.1.cmp(&b.1));

    let feasible = |taken: &[bool]| -> bool {
        let mut nodes: HashSet<VertexId> = inst.terminals().iter().copied().collect();
        let mut extra_links: Vec<LinkId> = Vec::new();
        for (i, (item, _)) in items.iter().enumerate() {
            if taken[i] {
                match item {
                    Item::Node(v) => {
                        nodes.insert(*v);
                    }
                    Item::Link(l) => extra_links.push(*l),
                }
            }
        }
        // graph: tree edges + zero-cost links induced + chosen costed links induced
        let n = inst.n_vertices();
        for skip in 0..inst.n_tree_edges() {
            let mut dsu = Dsu::new(n);
            for (e, &(a, b)) in inst.tree_edges().iter().enumerate() {
                if e != skip {
                    dsu.union(a as usize, b as usize);
                }
            }
            for (l, link) in inst.links().iter().enumerate() {
                let bought = link.cost.is_zero() || extra_links.contains(&l);
                if bought && nodes.contains(&link.u) && nodes.contains(&link.v) {
                    dsu.union(link.u as usize, link.v as usize);
                }
            }
            let (a, b) = inst.tree_edges()[skip];
            if dsu.find(a as usize) != dsu.find(b as usize) {
                return false;
            }
        }
        true
    };

    let m = items.len();
    let all = vec![true; m];
    if !feasible(&all) {
        return Ok(None);
    }
    let mut deadline = Deadline::new(budget.time_cap);
    let mut best: Option<(Rat, Vec<bool>)> = None;
    let mut taken = vec![false; m];

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        idx: usize,
        m: usize,
        cost: Rat,
        taken: &mut Vec<bool>,
        items_cost: &[Rat],
        feasible: &dyn Fn(&[bool]) -> bool,
        best: &mut Option<(Rat, Vec<bool>)>,
        deadline: &mut Deadline,
    ) -> Result<()> {
        deadline.check("exact_nwstap")?;
        if let Some((bc, _)) = best {
            if cost >= *bc {
                return Ok(());
            }
        }
        if feasible(taken) {
            *best = Some((cost, taken.clone()));
            return Ok(());
        }
        if idx == m {
            return Ok(());
        }
        let mut with_rest = taken.clone();
        for slot in with_rest.iter_mut().skip(idx) {
            *slot = true;
        }
        if !feasible(&with_rest) {
            return Ok(());
        }
        taken[idx] = true;
        dfs(
            idx + 1,
            m,
            cost.clone() + &items_cost[idx],
            taken,
            items_cost,
            feasible,
            best,
            deadline,
        )?;
        taken[idx] = false;
        dfs(idx + 1, m, cost, taken, items_cost, feasible, best, deadline)
    }

    let items_cost: Vec<Rat> = items.iter().map(|(_, c)| c.clone()).collect();
    dfs(
        0,
        m,
        Rat::zero(),
        &mut taken,
        &items_cost,
        &feasible,
        &mut best,
        &mut deadline,
    )?;
    Ok(best.map(|(cost, taken)| {
        let mut steiner_nodes = Vec::new();
        let mut links = Vec::new();
        for (i, (item, _)) in items.iter().enumerate() {
            if taken[i] {
                match item {
                    Item::Node(v) => steiner_nodes.push(*v),
                    Item::Link(l) => links.push(*l),
                }
            }
        }
        steiner_nodes.sort_unstable();
        links.sort_unstable();
        NwExact {
            cost,
            steiner_nodes,
            links,
        }
    }))
}

/// Exact minimum-cost hyper-link cover by branch-and-bound enumeration.
pub fn exact_hypertap(
    ht: &HyperTapInstance,
    budget: &OracleBudget,
) -> Result<Option<(Rat, Vec<usize>)>> {
    let n = ht.hyperlinks.len();
    if n > budget.max_subsets.max(20) {
        return Err(StapError::OracleBudget(format!(
            "exact_hypertap: {n} hyper-links exceeds budget"
        )));
    }
    let n_edges = ht.tree.n_edges();
    if n_edges == 0 {
        return Ok(Some((Rat::zero(), Vec::new())));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        ht.hyperlinks[a]
            .cost
            .cmp(&ht.hyperlinks[b].cost)
            .then(a.cmp(&b))
    });
    // suffix coverage for reachability pruning
    let mut suffix: Vec<EdgeSet> = vec![EdgeSet::empty(n_edges); n + 1];
    for i in (0..n).rev() {
        let mut s = suffix[i + 1].clone();
        s.union_with(&ht.hyperlinks[order[i]].coverage);
        suffix[i] = s;
    }
    let full = EdgeSet::full(n_edges);
    if !full.is_subset_of(&suffix[0]) {
        return Ok(None);
    }
    let mut deadline = Deadline::new(budget.time_cap);
    let mut best: Option<(Rat, Vec<usize>)> = None;

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        ht: &HyperTapInstance,
        order: &[usize],
        suffix: &[EdgeSet],
        idx: usize,
        covered: EdgeSet,
        chosen: &mut Vec<usize>,
        cost: Rat,
        best: &mut Option<(Rat, Vec<usize>)>,
        deadline: &mut Deadline,
    ) -> Result<()> {
        deadline.check("exact_hypertap")?;
        if let Some((bc, _)) = best {
            if cost >= *bc {
                return Ok(());
            }
        }
        if covered.count() == covered.universe() {
            *best = Some((cost, chosen.clone()));
            return Ok(());
        }
        if idx == order.len() {
            return Ok(());
        }
        let mut need = EdgeSet::full(covered.universe());
        need.difference_with(&covered);
        if !need.is_subset_of(&suffix[idx]) {
            return Ok(());
        }
        let l = order[idx];
        let mut with = covered.clone();
        with.union_with(&ht.hyperlinks[l].coverage);
        chosen.push(l);
        dfs(
            ht,
            order,
            suffix,
            idx + 1,
            with,
            chosen,
            cost.clone() + &ht.hyperlinks[l].cost,
            best,
            deadline,
        )?;
        chosen.pop();
        dfs(ht, order, suffix, idx + 1, covered, chosen, cost, best, deadline)
    }

    dfs(
        ht,
        &order,
        &suffix,
        0,
        EdgeSet::empty(n_edges),
        &mut Vec::new(),
        Rat::zero(),
        &mut best,
        &mut deadline,
    )?;
    Ok(best.map(|(c, mut set)| {
        set.sort_unstable();
        (c, set)
    }))
}

/// True maximizer of slack_rho over k-thin subsets, by filtered enumeration.
pub fn exact_kthin_maximizer(
    rho: &Rat,
    ht: &HyperTapInstance,
    uplinks: &[UpLink],
    k: usize,
    budget: &OracleBudget,
) -> Result<(Vec<usize>, Rat)> {
    let n = ht.hyperlinks.len();
    if n > budget.max_subsets {
        return Err(StapError::OracleBudget(format!(
            "exact_kthin_maximizer: {n} hyper-links exceeds budget {}",
            budget.max_subsets
        )));
    }
    let rt = &ht.tree;
    let touched: Vec<Vec<VertexId>> = ht
        .hyperlinks
        .iter()
        .map(|l| touched_vertices(rt, &l.coverage))
        .collect();
    let mut best_set = Vec::new();
    let mut best = Rat::zero(); // empty set is k-thin with slack 0
    let mut deadline = Deadline::new(budget.time_cap);
    for mask in 0u64..(1 << n) {
        deadline.check("exact_kthin_maximizer")?;
        let mut counts: HashMap<VertexId, usize> = HashMap::new();
        let mut thin = true;
        let mut cov = EdgeSet::empty(rt.n_edges());
        let mut zcost = Rat::zero();
        for (i, tv) in touched.iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            for &v in tv {
                let c = counts.entry(v).or_insert(0);
                *c += 1;
                if *c > k {
                    thin = false;
                    break;
                }
            }
            if !thin {
                break;
            }
            cov.union_with(&ht.hyperlinks[i].coverage);
            zcost += &ht.hyperlinks[i].cost;
        }
        if !thin {
            continue;
        }
        let mut dropped = Rat::zero();
        for u in uplinks {
            if u.path.is_subset_of(&cov) {
                dropped += &u.cost;
            }
        }
        let slack = rho.clone() * dropped - zcost;
        if slack > best {
            best = slack;
            best_set = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        }
    }
    Ok((best_set, best))
}

/// Exact minimum-ratio pseudo-spider by enumerating every head and every
/// feet subset, with legs as exact node-weighted shortest paths.
pub fn exact_min_ratio_pseudo_spider(
    inst: &StapInstance,
    rt: &RootedTree,
    prices: &[Rat],
    uncovered: &EdgeSet,
    budget: &OracleBudget,
) -> Result<Option<(PseudoSpider, Rat)>> {
    if inst.n_terminals() > budget.max_vertices {
        return Err(StapError::OracleBudget(format!(
            "exact_min_ratio_pseudo_spider: {} terminals exceeds budget {}",
            inst.n_terminals(),
            budget.max_vertices
        )));
    }
    let mut deadline = Deadline::new(budget.time_cap);
    let mut best: Option<(PseudoSpider, Rat)> = None;
    for head in inst.steiner_nodes() {
        let nd = node_weighted_sssp(inst, head, prices)?;
        let reachable: Vec<VertexId> = inst
            .terminals()
            .iter()
            .copied()
            .filter(|&t| nd.dist[t as usize].is_some())
            .collect();
        let m = reachable.len();
        for mask in 1u64..(1 << m) {
            deadline.check("exact_min_ratio_pseudo_spider")?;
            let feet: Vec<VertexId> = (0..m)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| reachable[i])
                .collect();
            let spider = build_spider(inst, rt, prices, &nd, &feet)?
                .expect("reachable feet build a spider");
            let mut newly = spider.covered.clone();
            newly.intersect_with(uncovered);
            let count = newly.count();
            if count == 0 {
                continue;
            }
            let ratio = spider.cost.clone() / Rat::from_integer((count as i64).into());
            let better = match &best {
                None => true,
                Some((b, br)) => {
                    ratio < *br
                        || (ratio == *br
                            && (spider.cost < b.cost
                                || (spider.cost == b.cost && spider.head < b.head)))
                }
            };
            if better {
                best = Some((spider, ratio));
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::rat_int;
    use crate::instance::{InstanceBuilder, Variant};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn two_terminal_feasibility() {
        let inst = InstanceBuilder::new(Variant::EdgeWeighted)
            .terminal("a")
            .terminal("b")
            .tree("a", "b")
            .link("a", "b", rat_int(1))
            .build()
            .unwrap();
        assert!(!check_feasible_stap(&inst, &[]));
        assert!(check_feasible_stap(&inst, &[0]));
    }

    #[test]
    fn feasibility_agrees_with_bridge_finding() {
        let mut rng = StdRng::seed_from_u64(61);
        for _ in 0..200 {
            let inst = crate::testutil::random_edge_instance(&mut rng, 6, 2);
            let n = inst.links().len();
            let subset: Vec<LinkId> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            let uncovered = tree_edge_bridges(&inst, &subset);
            assert_eq!(
                check_feasible_stap(&inst, &subset),
                uncovered.is_empty(),
                "disagreement on {subset:?}"
            );
        }
    }

    #[test]
    fn exact_stap_trivial_cases() {
        let inst = InstanceBuilder::new(Variant::EdgeWeighted)
            .terminal("a")
            .terminal("b")
            .tree("a", "b")
            .link("a", "b", rat_int(7))
            .build()
            .unwrap();
        let (cost, set) = exact_stap(&inst, &OracleBudget::default()).unwrap().unwrap();
        assert_eq!(cost, rat_int(7));
        assert_eq!(set, vec![0]);

        let infeasible = InstanceBuilder::new(Variant::EdgeWeighted)
            .terminal("a")
            .terminal("b")
            .tree("a", "b")
            .build()
            .unwrap();
        assert!(exact_stap(&infeasible, &OracleBudget::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn exact_stap_beats_or_matches_any_feasible_subset() {
        let mut rng = StdRng::seed_from_u64(67);
        for _ in 0..30 {
            let inst = crate::testutil::random_edge_instance(&mut rng, 5, 2);
            if inst.links().len() > 16 {
                continue;
            }
            let opt = exact_stap(&inst, &OracleBudget::default()).unwrap();
            // brute force cross-check over all subsets
            let n = inst.links().len();
            let mut brute: Option<Rat> = None;
            for mask in 0u32..(1 << n) {
                let set: Vec<LinkId> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
                if check_feasible_stap(&inst, &set) {
                    let c = inst.link_set_cost(&set);
                    if brute.as_ref().map_or(true, |b| c < *b) {
                        brute = Some(c);
                    }
                }
            }
            assert_eq!(opt.map(|(c, _)| c), brute);
        }
    }

    #[test]
    fn exact_nwstap_hub_example() {
        let inst = InstanceBuilder::new(Variant::NodeWeighted)
            .terminal("a")
            .terminal("b")
            .steiner("h", Some(rat_int(4)))
            .tree("a", "b")
            .link("a", "h", Rat::zero())
            .link("h", "b", Rat::zero())
            .build()
            .unwrap();
        let res = exact_nwstap(&inst, &OracleBudget::default()).unwrap().unwrap();
        assert_eq!(res.cost, rat_int(4));
        assert_eq!(res.steiner_nodes.len(), 1);

        // R already 2-edge-connected through a zero-cost link
        let free = InstanceBuilder::new(Variant::NodeWeighted)
            .terminal("a")
            .terminal("b")
            .tree("a", "b")
            .link("a", "b", Rat::zero())
            .build()
            .unwrap();
        let res = exact_nwstap(&free, &OracleBudget::default()).unwrap().unwrap();
        assert_eq!(res.cost, Rat::zero());
        assert!(res.steiner_nodes.is_empty());
    }

    #[test]
    fn hypertap_oracle_trivial_cases() {
        let inst = InstanceBuilder::new(Variant::EdgeWeighted)
            .terminal("a")
            .terminal("b")
            .tree("a", "b")
            .link("a", "b", rat_int(2))
            .build()
            .unwrap();
        let rt = crate::rooted::root_tree(&inst, inst.vertex("a").unwrap()).unwrap();
        let ht = crate::hyperlink::build_gamma_restricted(&inst, &rt, 2, 1000).unwrap();
        let (cost, set) = exact_hypertap(&ht, &OracleBudget::default()).unwrap().unwrap();
        assert_eq!(cost, rat_int(2));
        assert_eq!(set.len(), 1);
    }
}
