//! Rooted view of the tree to augment: parents, depths, binary-lifting LCA,
//! tree paths and the tree-edge index everything downstream shares.

use std::collections::HashMap;

use crate::error::{Result, StapError};
use crate::instance::{EdgeId, StapInstance, VertexId};

#[derive(Debug, Clone)]
pub struct RootedTree {
    root: VertexId,
    /// parent[v] is None exactly for the root and for vertices outside the tree.
    parent: Vec<Option<VertexId>>,
    depth: Vec<usize>,
    in_tree: Vec<bool>,
    /// Binary lifting: up[j][v] = 2^j-th ancestor of v.
    up: Vec<Vec<Option<VertexId>>>,
    children: Vec<Vec<VertexId>>,
    /// Edge id of (v, parent(v)), indexed by the child vertex.
    parent_edge: Vec<Option<EdgeId>>,
    edge_endpoints: Vec<(VertexId, VertexId)>,
    /// Vertices in root-first order (parents before children).
    preorder: Vec<VertexId>,
}

/// Root the instance tree at terminal `r`.
pub fn root_tree(inst: &StapInstance, r: VertexId) -> Result<RootedTree> {
    if r as usize >= inst.n_vertices() {
        return Err(StapError::UnknownVertex(format!("#{r}")));
    }
    if !inst.is_terminal(r) {
        return Err(StapError::NotATerminal(inst.name(r).to_string()));
    }
    let n = inst.n_vertices();
    let mut adj: Vec<Vec<(VertexId, EdgeId)>> = vec![Vec::new(); n];
    let mut edge_index: HashMap<(VertexId, VertexId), EdgeId> = HashMap::new();
    for (id, &(a, b)) in inst.tree_edges().iter().enumerate() {
        adj[a as usize].push((b, id));
        adj[b as usize].push((a, id));
        let key = if a <= b { (a, b) } else { (b, a) };
        edge_index.insert(key, id);
    }

    let mut parent = vec![None; n];
    let mut parent_edge = vec![None; n];
    let mut depth = vec![0usize; n];
    let mut in_tree = vec![false; n];
    let mut children = vec![Vec::new(); n];
    let mut preorder = Vec::with_capacity(inst.n_terminals());
    let mut stack = vec![r];
    in_tree[r as usize] = true;
    while let Some(v) = stack.pop() {
        preorder.push(v);
        for &(w, e) in &adj[v as usize] {
            if !in_tree[w as usize] {
                in_tree[w as usize] = true;
                parent[w as usize] = Some(v);
                parent_edge[w as usize] = Some(e);
                depth[w as usize] = depth[v as usize] + 1;
                children[v as usize].push(w);
                stack.push(w);
            }
        }
    }
    for ch in &mut children {
        ch.sort_unstable();
    }

    let max_depth = depth.iter().copied().max().unwrap_or(0);
    let levels = usize::BITS as usize - max_depth.leading_zeros() as usize + 1;
    let mut up: Vec<Vec<Option<VertexId>>> = Vec::with_capacity(levels);
    up.push(parent.clone());
    for j in 1..levels.max(1) {
        let prev = &up[j - 1];
        let next: Vec<Option<VertexId>> = (0..n)
            .map(|v| prev[v].and_then(|m| prev[m as usize]))
            .collect();
        up.push(next);
    }

    Ok(RootedTree {
        root: r,
        parent,
        depth,
        in_tree,
        up,
        children,
        parent_edge,
        edge_endpoints: inst.tree_edges().to_vec(),
        preorder,
    })
}

impl RootedTree {
    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn n_edges(&self) -> usize {
        self.edge_endpoints.len()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        (v as usize) < self.in_tree.len() && self.in_tree[v as usize]
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v as usize]
    }

    pub fn depth(&self, v: VertexId) -> usize {
        self.depth[v as usize]
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v as usize]
    }

    /// Tree vertices, parents before children.
    pub fn preorder(&self) -> &[VertexId] {
        &self.preorder
    }

    /// Edge id of the edge between `v` and its parent.
    pub fn parent_edge(&self, v: VertexId) -> Option<EdgeId> {
        self.parent_edge[v as usize]
    }

    pub fn edge_endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edge_endpoints[e]
    }

    /// Child-side endpoint of edge `e` (the deeper one).
    pub fn edge_child(&self, e: EdgeId) -> VertexId {
        let (a, b) = self.edge_endpoints[e];
        if self.depth(a) > self.depth(b) {
            a
        } else {
            b
        }
    }

    fn check_vertex(&self, v: VertexId) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(StapError::UnknownVertex(format!("#{v}")))
        }
    }

    /// Ancestor of `v` that is `steps` levels up.
    pub fn ancestor_at(&self, v: VertexId, steps: usize) -> Option<VertexId> {
        let mut v = v;
        let mut steps = steps;
        let mut j = 0;
        while steps > 0 {
            if steps & 1 == 1 {
                v = self.up.get(j)?.get(v as usize).copied().flatten()?;
            }
            steps >>= 1;
            j += 1;
        }
        Some(v)
    }

    pub fn lca(&self, a: VertexId, b: VertexId) -> Result<VertexId> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        let (mut x, mut y) = (a, b);
        if self.depth(x) < self.depth(y) {
            std::mem::swap(&mut x, &mut y);
        }
        x = self
            .ancestor_at(x, self.depth(x) - self.depth(y))
            .expect("depth-aligned ancestor exists");
        if x == y {
            return Ok(x);
        }
        for j in (0..self.up.len()).rev() {
            let ux = self.up[j][x as usize];
            let uy = self.up[j][y as usize];
            if ux != uy {
                x = ux.expect("below lca, ancestor exists");
                y = uy.expect("below lca, ancestor exists");
            }
        }
        Ok(self.parent(x).expect("lca is parent of distinct children"))
    }

    /// True when `anc` is an ancestor of `v` (or `v` itself).
    pub fn is_ancestor(&self, anc: VertexId, v: VertexId) -> bool {
        if !self.contains(anc) || !self.contains(v) {
            return false;
        }
        self.depth(anc) <= self.depth(v)
            && self.ancestor_at(v, self.depth(v) - self.depth(anc)) == Some(anc)
    }

    /// Edge ids from `v` up to ancestor `top`, in bottom-to-top order.
    pub fn path_to_ancestor(&self, v: VertexId, top: VertexId) -> Vec<EdgeId> {
        debug_assert!(self.is_ancestor(top, v));
        let mut edges = Vec::with_capacity(self.depth(v) - self.depth(top));
        let mut cur = v;
        while cur != top {
            edges.push(self.parent_edge(cur).expect("non-root on path"));
            cur = self.parent(cur).expect("non-root on path");
        }
        edges
    }

    /// Ordered edge ids of the unique a-b tree path; empty iff a = b.
    pub fn tree_path(&self, a: VertexId, b: VertexId) -> Result<Vec<EdgeId>> {
        let m = self.lca(a, b)?;
        let mut edges = self.path_to_ancestor(a, m);
        let mut down = self.path_to_ancestor(b, m);
        down.reverse();
        edges.extend(down);
        Ok(edges)
    }

    /// Vertices on the a-b tree path, inclusive, in order.
    pub fn tree_path_vertices(&self, a: VertexId, b: VertexId) -> Result<Vec<VertexId>> {
        let m = self.lca(a, b)?;
        let mut out = Vec::new();
        let mut cur = a;
        while cur != m {
            out.push(cur);
            cur = self.parent(cur).unwrap();
        }
        out.push(m);
        let mut tail = Vec::new();
        let mut cur = b;
        while cur != m {
            tail.push(cur);
            cur = self.parent(cur).unwrap();
        }
        tail.reverse();
        out.extend(tail);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::rat_int;
    use crate::instance::{InstanceBuilder, Variant};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn path_abc() -> StapInstance {
        InstanceBuilder::new(Variant::EdgeWeighted)
            .terminal("a")
            .terminal("b")
            .terminal("c")
            .tree("a", "b")
            .tree("b", "c")
            .link("a", "c", rat_int(1))
            .build()
            .unwrap()
    }

    #[test]
    fn path_depths() {
        let inst = path_abc();
        let rt = root_tree(&inst, inst.vertex("a").unwrap()).unwrap();
        assert_eq!(rt.depth(inst.vertex("a").unwrap()), 0);
        assert_eq!(rt.depth(inst.vertex("c").unwrap()), 2);
    }

    #[test]
    fn star_leaves_have_depth_one() {
        let mut b = InstanceBuilder::new(Variant::EdgeWeighted).terminal("s");
        for name in ["x", "y", "z"] {
            b = b.terminal(name).tree("s", name);
        }
        let inst = b.link("x", "y", rat_int(1)).build().unwrap();
        let rt = root_tree(&inst, inst.vertex("s").unwrap()).unwrap();
        for name in ["x", "y", "z"] {
            assert_eq!(rt.depth(inst.vertex(name).unwrap()), 1);
        }
    }

    #[test]
    fn rooting_rejects_non_terminals() {
        let inst = InstanceBuilder::new(Variant::EdgeWeighted)
            .terminal("a")
            .terminal("b")
            .steiner("s", None)
            .tree("a", "b")
            .link("a", "s", rat_int(1))
            .build()
            .unwrap();
        assert!(root_tree(&inst, inst.vertex("s").unwrap()).is_err());
    }

    #[test]
    fn lca_identity_and_path_cases() {
        let inst = path_abc();
        let (a, b, c) = (
            inst.vertex("a").unwrap(),
            inst.vertex("b").unwrap(),
            inst.vertex("c").unwrap(),
        );
        let rt = root_tree(&inst, a).unwrap();
        assert_eq!(rt.lca(b, b).unwrap(), b);
        assert_eq!(rt.lca(b, c).unwrap(), b);
        assert_eq!(rt.tree_path(a, a).unwrap(), Vec::<EdgeId>::new());
        assert_eq!(rt.tree_path(a, c).unwrap(), vec![0, 1]);
    }

    /// Build a random tree on `n` terminals named t0..t{n-1}.
    pub(crate) fn random_tree_instance(rng: &mut StdRng, n: usize) -> StapInstance {
        let mut b = InstanceBuilder::new(Variant::EdgeWeighted);
        for i in 0..n {
            b = b.terminal(&format!("t{i}"));
        }
        for i in 1..n {
            let p = rng.gen_range(0..i);
            b = b.tree(&format!("t{p}"), &format!("t{i}"));
        }
        b = b.link("t0", &format!("t{}", n - 1), rat_int(1));
        b.build().unwrap()
    }

    fn naive_lca(rt: &RootedTree, a: VertexId, b: VertexId) -> VertexId {
        let mut seen = std::collections::HashSet::new();
        let mut cur = Some(a);
        while let Some(v) = cur {
            seen.insert(v);
            cur = rt.parent(v);
        }
        let mut cur = b;
        loop {
            if seen.contains(&cur) {
                return cur;
            }
            cur = rt.parent(cur).unwrap();
        }
    }

    #[test]
    fn random_trees_match_naive_oracles() {
        let mut rng = StdRng::seed_from_u64(7);
        for trial in 0..60 {
            let n = 2 + (trial % 12);
            let inst = random_tree_instance(&mut rng, n);
            let root = inst.terminals()[rng.gen_range(0..n)];
            let rt = root_tree(&inst, root).unwrap();

            // parent relation reconstructs E(T) exactly
            let mut rebuilt: Vec<(VertexId, VertexId)> = (0..inst.n_vertices() as VertexId)
                .filter_map(|v| rt.parent(v).map(|p| if v <= p { (v, p) } else { (p, v) }))
                .collect();
            rebuilt.sort_unstable();
            let mut expected: Vec<(VertexId, VertexId)> = inst
                .tree_edges()
                .iter()
                .map(|&(a, b)| if a <= b { (a, b) } else { (b, a) })
                .collect();
            expected.sort_unstable();
            assert_eq!(rebuilt, expected);

            for _ in 0..20 {
                let a = inst.terminals()[rng.gen_range(0..n)];
                let b = inst.terminals()[rng.gen_range(0..n)];
                let m = rt.lca(a, b).unwrap();
                assert_eq!(m, naive_lca(&rt, a, b));
                let path = rt.tree_path(a, b).unwrap();
                assert_eq!(
                    path.len(),
                    rt.depth(a) + rt.depth(b) - 2 * rt.depth(m),
                    "path length mismatch"
                );
                // reversal property
                let mut back = rt.tree_path(b, a).unwrap();
                back.reverse();
                assert_eq!(path, back);
            }
        }
    }
}
