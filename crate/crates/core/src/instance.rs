//! Problem instances: the shared representation for the edge-weighted and
//! node-weighted solvers, the line-oriented text format, validation and the
//! link-subdivision transform.

use std::collections::HashMap;
use std::fmt::Write as _;

use num::traits::Zero;

use crate::cost::{format_cost, parse_cost, Rat};
use crate::error::{Result, StapError};

pub type VertexId = u32;
pub type EdgeId = usize;
pub type LinkId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    EdgeWeighted,
    NodeWeighted,
}

impl Variant {
    pub fn keyword(self) -> &'static str {
        match self {
            Variant::EdgeWeighted => "edge",
            Variant::NodeWeighted => "node",
        }
    }
}

/// Where a link's cost comes from, so completed solutions can be expanded
/// back onto the original link set at equal cost. `inputs` is the realizing
/// multiset of input links, frozen when the cost was recorded; input costs
/// never change, so the cost of a link always equals the cost of `inputs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinkOrigin {
    /// Present in the input.
    Input,
    /// Added by metric completion; realized by the path `path`.
    Metric { path: Vec<LinkId>, inputs: Vec<LinkId> },
    /// Added by shadow completion; stands in for `parent`.
    Shadow { parent: LinkId, inputs: Vec<LinkId> },
}

#[derive(Debug, Clone)]
pub struct Link {
    pub u: VertexId,
    pub v: VertexId,
    pub cost: Rat,
    pub origin: LinkOrigin,
}

impl Link {
    pub fn key(&self) -> (VertexId, VertexId) {
        if self.u <= self.v {
            (self.u, self.v)
        } else {
            (self.v, self.u)
        }
    }

    pub fn other(&self, x: VertexId) -> VertexId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone)]
pub struct StapInstance {
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    is_terminal: Vec<bool>,
    /// Terminal ids sorted by name.
    terminals: Vec<VertexId>,
    tree_edges: Vec<(VertexId, VertexId)>,
    links: Vec<Link>,
    variant: Variant,
    /// Node costs, `Some` exactly for Steiner nodes of node-weighted instances.
    node_costs: Vec<Option<Rat>>,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

/// Result of subdividing costed links of a node-weighted instance.
#[derive(Debug, Clone)]
pub struct SubdividedInstance {
    pub instance: StapInstance,
    /// New subdivision node -> the original link it replaced.
    pub node_to_link: HashMap<VertexId, LinkId>,
}

pub struct InstanceBuilder {
    variant: Variant,
    vertices: Vec<(String, bool, Option<Rat>)>,
    tree: Vec<(String, String)>,
    links: Vec<(String, String, Rat)>,
}

impl InstanceBuilder {
    pub fn new(variant: Variant) -> Self {
        InstanceBuilder {
            variant,
            vertices: Vec::new(),
            tree: Vec::new(),
            links: Vec::new(),
        }
    }

    pub fn terminal(mut self, name: &str) -> Self {
        self.vertices.push((name.to_string(), true, None));
        self
    }

    pub fn steiner(mut self, name: &str, cost: Option<Rat>) -> Self {
        self.vertices.push((name.to_string(), false, cost));
        self
    }

    pub fn tree(mut self, a: &str, b: &str) -> Self {
        self.tree.push((a.to_string(), b.to_string()));
        self
    }

    pub fn link(mut self, a: &str, b: &str, cost: Rat) -> Self {
        self.links.push((a.to_string(), b.to_string(), cost));
        self
    }

    pub fn build(self) -> Result<StapInstance> {
        let mut names = Vec::new();
        let mut index = HashMap::new();
        let mut is_terminal = Vec::new();
        let mut node_costs = Vec::new();
        for (name, term, cost) in self.vertices {
            if index.contains_key(&name) {
                return Err(StapError::InvalidInstance(format!(
                    "vertex `{name}` declared twice"
                )));
            }
            let id = names.len() as VertexId;
            index.insert(name.clone(), id);
            names.push(name);
            is_terminal.push(term);
            node_costs.push(if term { None } else { cost });
        }
        let resolve = |n: &str| -> Result<VertexId> {
            index
                .get(n)
                .copied()
                .ok_or_else(|| StapError::UnknownVertex(n.to_string()))
        };
        let mut tree_edges = Vec::new();
        for (a, b) in &self.tree {
            tree_edges.push((resolve(a)?, resolve(b)?));
        }
        // Duplicate links between the same endpoint pair collapse to the
        // minimum cost.
        let mut by_pair: HashMap<(VertexId, VertexId), Rat> = HashMap::new();
        let mut pair_order = Vec::new();
        for (a, b, cost) in &self.links {
            let (u, v) = (resolve(a)?, resolve(b)?);
            let key = if u <= v { (u, v) } else { (v, u) };
            match by_pair.get_mut(&key) {
                Some(c) => {
                    if *cost < *c {
                        *c = cost.clone();
                    }
                }
                None => {
                    by_pair.insert(key, cost.clone());
                    pair_order.push(key);
                }
            }
        }
        let links = pair_order
            .into_iter()
            .map(|(u, v)| Link {
                u,
                v,
                cost: by_pair[&(u, v)].clone(),
                origin: LinkOrigin::Input,
            })
            .collect();

        let mut terminals: Vec<VertexId> = (0..names.len() as VertexId)
            .filter(|&v| is_terminal[v as usize])
            .collect();
        terminals.sort_by(|&a, &b| names[a as usize].cmp(&names[b as usize]));

        Ok(StapInstance {
            names,
            index,
            is_terminal,
            terminals,
            tree_edges,
            links,
            variant: self.variant,
            node_costs,
        })
    }
}

impl StapInstance {
    pub fn builder(variant: Variant) -> InstanceBuilder {
        InstanceBuilder::new(variant)
    }

    pub fn n_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v as usize]
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.index.get(name).copied()
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.is_terminal[v as usize]
    }

    /// Terminal ids, sorted by vertex name.
    pub fn terminals(&self) -> &[VertexId] {
        &self.terminals
    }

    pub fn n_terminals(&self) -> usize {
        self.terminals.len()
    }

    pub fn steiner_nodes(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.n_vertices() as VertexId).filter(|&v| !self.is_terminal(v))
    }

    pub fn tree_edges(&self) -> &[(VertexId, VertexId)] {
        &self.tree_edges
    }

    pub fn n_tree_edges(&self) -> usize {
        self.tree_edges.len()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id]
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn node_cost(&self, v: VertexId) -> Option<&Rat> {
        self.node_costs[v as usize].as_ref()
    }

    pub fn total_node_cost(&self) -> Rat {
        self.node_costs
            .iter()
            .flatten()
            .fold(Rat::zero(), |acc, c| acc + c)
    }

    /// Adjacency over links: per vertex, the incident `(other endpoint, link id)`.
    pub fn link_adjacency(&self) -> Vec<Vec<(VertexId, LinkId)>> {
        let mut adj = vec![Vec::new(); self.n_vertices()];
        for (id, l) in self.links.iter().enumerate() {
            adj[l.u as usize].push((l.v, id));
            adj[l.v as usize].push((l.u, id));
        }
        adj
    }

    /// Cheapest link per unordered endpoint pair.
    pub fn link_pair_index(&self) -> HashMap<(VertexId, VertexId), LinkId> {
        let mut best: HashMap<(VertexId, VertexId), LinkId> = HashMap::new();
        for (id, l) in self.links.iter().enumerate() {
            best.entry(l.key())
                .and_modify(|cur| {
                    if l.cost < self.links[*cur].cost {
                        *cur = id;
                    }
                })
                .or_insert(id);
        }
        best
    }

    pub(crate) fn push_link(&mut self, link: Link) -> LinkId {
        self.links.push(link);
        self.links.len() - 1
    }

    pub(crate) fn set_link_cost(&mut self, id: LinkId, cost: Rat, origin: LinkOrigin) {
        self.links[id].cost = cost;
        self.links[id].origin = origin;
    }

    pub(crate) fn add_steiner_vertex(&mut self, base_name: &str, cost: Option<Rat>) -> VertexId {
        let mut name = base_name.to_string();
        let mut salt = 0usize;
        while self.index.contains_key(&name) {
            salt += 1;
            name = format!("{base_name}.{salt}");
        }
        let id = self.names.len() as VertexId;
        self.index.insert(name.clone(), id);
        self.names.push(name);
        self.is_terminal.push(false);
        self.node_costs.push(cost);
        id
    }

    /// Expand a link of a completed instance into the multiset of input links
    /// realizing it, at exactly equal total cost.
    pub fn expand_link(&self, id: LinkId) -> Vec<LinkId> {
        match &self.links[id].origin {
            LinkOrigin::Input => vec![id],
            LinkOrigin::Shadow { inputs, .. } | LinkOrigin::Metric { inputs, .. } => {
                inputs.clone()
            }
        }
    }

    /// Total cost of a multiset of links (repeats counted).
    pub fn link_multiset_cost(&self, links: &[LinkId]) -> Rat {
        links
            .iter()
            .fold(Rat::zero(), |acc, &l| acc + &self.links[l].cost)
    }

    /// Expand a solution of a completed instance to a set of input links.
    pub fn expand_solution(&self, solution: &[LinkId]) -> Vec<LinkId> {
        let mut out: Vec<LinkId> = solution
            .iter()
            .flat_map(|&l| self.expand_link(l))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn link_set_cost(&self, set: &[LinkId]) -> Rat {
        let mut seen = std::collections::HashSet::new();
        let mut total = Rat::zero();
        for &l in set {
            if seen.insert(l) {
                total += &self.links[l].cost;
            }
        }
        total
    }
}

/// Check every `StapInstance` invariant and report all findings.
pub fn validate(inst: &StapInstance) -> ValidationReport {
    let mut violations = Vec::new();
    let n_terminals = inst.n_terminals();

    for &(a, b) in inst.tree_edges() {
        if !inst.is_terminal(a) || !inst.is_terminal(b) {
            violations.push(format!(
                "tree edge {}-{} has a non-terminal endpoint",
                inst.name(a),
                inst.name(b)
            ));
        }
        if a == b {
            violations.push(format!("tree edge {}-{} is a self-loop", inst.name(a), inst.name(b)));
        }
    }

    if inst.n_tree_edges() != n_terminals.saturating_sub(1) {
        violations.push(format!(
            "|E(T)| = {} but |R| - 1 = {}",
            inst.n_tree_edges(),
            n_terminals.saturating_sub(1)
        ));
    }

    // Cycle / connectivity of (R, E(T)) via union-find.
    let mut parent: Vec<usize> = (0..inst.n_vertices()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    let mut acyclic = true;
    for &(a, b) in inst.tree_edges() {
        let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
        if ra == rb {
            acyclic = false;
        } else {
            parent[ra] = rb;
        }
    }
    if !acyclic {
        violations.push("tree_edges not acyclic".to_string());
    }
    if n_terminals > 0 {
        let root = find(&mut parent, inst.terminals()[0] as usize);
        if inst
            .terminals()
            .iter()
            .any(|&t| find(&mut parent, t as usize) != root)
        {
            violations.push("tree_edges do not connect all terminals".to_string());
        }
    }

    let tree_pairs: std::collections::HashSet<(VertexId, VertexId)> = inst
        .tree_edges()
        .iter()
        .map(|&(a, b)| if a <= b { (a, b) } else { (b, a) })
        .collect();
    for l in inst.links() {
        if l.cost < Rat::zero() {
            violations.push(format!(
                "negative link cost on {}-{}",
                inst.name(l.u),
                inst.name(l.v)
            ));
        }
        if l.u == l.v {
            violations.push(format!("self-loop link at {}", inst.name(l.u)));
        }
        if tree_pairs.contains(&l.key()) {
            violations.push(format!(
                "link {}-{} duplicates a tree edge",
                inst.name(l.u),
                inst.name(l.v)
            ));
        }
    }

    for v in 0..inst.n_vertices() as VertexId {
        match (inst.variant(), inst.is_terminal(v), inst.node_cost(v)) {
            (Variant::NodeWeighted, false, None) => violations.push(format!(
                "steiner node {} has no cost in node-weighted instance",
                inst.name(v)
            )),
            (Variant::NodeWeighted, false, Some(c)) if *c < Rat::zero() => {
                violations.push(format!("negative node cost on {}", inst.name(v)))
            }
            (Variant::EdgeWeighted, _, Some(_)) => violations.push(format!(
                "node cost on {} in edge-weighted instance",
                inst.name(v)
            )),
            _ => {}
        }
    }

    ValidationReport {
        ok: violations.is_empty(),
        violations,
    }
}

pub fn ensure_valid(inst: &StapInstance) -> Result<()> {
    let report = validate(inst);
    if report.ok {
        Ok(())
    } else {
        Err(StapError::InvalidInstance(report.violations.join("; ")))
    }
}

/// Replace every costed link of a node-weighted instance by a two-link path
/// through a fresh Steiner node carrying the link's cost.
pub fn subdivide_links(inst: &StapInstance) -> Result<SubdividedInstance> {
    if inst.variant() != Variant::NodeWeighted {
        return Err(StapError::WrongVariant {
            expected: "node-weighted",
            actual: inst.variant().keyword(),
        });
    }
    let mut out = inst.clone();
    let mut node_to_link = HashMap::new();
    let mut new_links = Vec::new();
    for (id, l) in inst.links().iter().enumerate() {
        if l.cost.is_zero() {
            new_links.push(l.clone());
        } else {
            let m = out.add_steiner_vertex(
                &format!("_m.{}.{}", inst.name(l.u), inst.name(l.v)),
                Some(l.cost.clone()),
            );
            node_to_link.insert(m, id);
            new_links.push(Link {
                u: l.u,
                v: m,
                cost: Rat::zero(),
                origin: LinkOrigin::Input,
            });
            new_links.push(Link {
                u: m,
                v: l.v,
                cost: Rat::zero(),
                origin: LinkOrigin::Input,
            });
        }
    }
    out.links = new_links;
    Ok(SubdividedInstance {
        instance: out,
        node_to_link,
    })
}

/// Parse the line-oriented instance format.
pub fn parse_instance(text: &str) -> Result<StapInstance> {
    let mut variant = None;
    let mut builder: Option<InstanceBuilder> = None;
    let mut links_without_cost: Vec<(String, String)> = Vec::new();
    let mut header_seen = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.split_once('#') {
            Some((before, _)) => before,
            None => raw,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let err = |msg: String| StapError::Parse {
            line: lineno + 1,
            msg,
        };
        if !header_seen {
            if toks[0] != "stap" {
                return Err(err(format!("expected `stap` header, found `{}`", toks[0])));
            }
            if toks.len() != 3 {
                return Err(err("header must be `stap <version> <edge|node>`".into()));
            }
            if toks[1] != "1" {
                return Err(err(format!("unsupported version `{}`", toks[1])));
            }
            let var = match toks[2] {
                "edge" => Variant::EdgeWeighted,
                "node" => Variant::NodeWeighted,
                other => return Err(err(format!("unknown variant `{other}`"))),
            };
            variant = Some(var);
            builder = Some(InstanceBuilder::new(var));
            header_seen = true;
            continue;
        }
        let variant = variant.unwrap();
        let b = builder.take().unwrap();
        let b = match toks[0] {
            "terminal" => {
                if toks.len() != 2 {
                    return Err(err("terminal takes exactly one id".into()));
                }
                b.terminal(toks[1])
            }
            "steiner" => match (variant, toks.len()) {
                (Variant::EdgeWeighted, 2) => b.steiner(toks[1], None),
                (Variant::EdgeWeighted, _) => {
                    return Err(err("steiner takes no cost in edge-weighted instances".into()))
                }
                (Variant::NodeWeighted, 3) => {
                    let cost = parse_cost(toks[2])
                        .ok_or_else(|| err(format!("bad cost `{}`", toks[2])))?;
                    b.steiner(toks[1], Some(cost))
                }
                (Variant::NodeWeighted, _) => {
                    return Err(err("steiner requires a cost in node-weighted instances".into()))
                }
            },
            "tree" => {
                if toks.len() != 3 {
                    return Err(err("tree takes exactly two ids".into()));
                }
                b.tree(toks[1], toks[2])
            }
            "link" => match (variant, toks.len()) {
                (Variant::EdgeWeighted, 4) => {
                    let cost = parse_cost(toks[3])
                        .ok_or_else(|| err(format!("bad cost `{}`", toks[3])))?;
                    b.link(toks[1], toks[2], cost)
                }
                (Variant::EdgeWeighted, _) => {
                    return Err(err("link requires a cost in edge-weighted instances".into()))
                }
                (Variant::NodeWeighted, 3) => {
                    links_without_cost.push((toks[1].to_string(), toks[2].to_string()));
                    b
                }
                (Variant::NodeWeighted, 4) => {
                    let cost = parse_cost(toks[3])
                        .ok_or_else(|| err(format!("bad cost `{}`", toks[3])))?;
                    b.link(toks[1], toks[2], cost)
                }
                _ => return Err(err("link takes two ids and an optional cost".into())),
            },
            other => return Err(err(format!("unknown directive `{other}`"))),
        };
        builder = Some(b);
    }

    let mut builder = builder.ok_or(StapError::Parse {
        line: 0,
        msg: "empty input, expected `stap` header".into(),
    })?;
    for (a, b) in links_without_cost {
        builder = builder.link(&a, &b, Rat::zero());
    }
    builder.build().map_err(|e| match e {
        StapError::UnknownVertex(v) => StapError::Parse {
            line: 0,
            msg: format!("undeclared vertex `{v}`"),
        },
        other => other,
    })
}

/// Write an instance in the text format; parses back to an identical instance.
pub fn write_instance(inst: &StapInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "stap 1 {}", inst.variant().keyword());
    for &t in inst.terminals() {
        let _ = writeln!(out, "terminal {}", inst.name(t));
    }
    for v in inst.steiner_nodes() {
        match inst.node_cost(v) {
            Some(c) => {
                let _ = writeln!(out, "steiner {} {}", inst.name(v), format_cost(c));
            }
            None => {
                let _ = writeln!(out, "steiner {}", inst.name(v));
            }
        }
    }
    for &(a, b) in inst.tree_edges() {
        let _ = writeln!(out, "tree {} {}", inst.name(a), inst.name(b));
    }
    for l in inst.links() {
        match inst.variant() {
            Variant::EdgeWeighted => {
                let _ = writeln!(
                    out,
                    "link {} {} {}",
                    inst.name(l.u),
                    inst.name(l.v),
                    format_cost(&l.cost)
                );
            }
            Variant::NodeWeighted => {
                if l.cost.is_zero() {
                    let _ = writeln!(out, "link {} {}", inst.name(l.u), inst.name(l.v));
                } else {
                    let _ = writeln!(
                        out,
                        "link {} {} {}",
                        inst.name(l.u),
                        inst.name(l.v),
                        format_cost(&l.cost)
                    );
                }
            }
        }
    }
    out
}
