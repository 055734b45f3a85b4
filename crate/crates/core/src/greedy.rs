//! Local greedy for edge-weighted instances: start from the exactly-once
//! up-link cover and repeatedly add the minimum-ratio k-thin set of
//! hyper-links, removing the up-links it supersedes.

use std::collections::{BTreeSet, HashMap};

use num::bigint::BigUint;
use num::traits::{One, Signed, ToPrimitive, Zero};

use crate::complete::complete;
use crate::cost::{ln2_bounds, Rat};
use crate::edgeset::EdgeSet;
use crate::error::{Result, StapError};
use crate::hyperlink::{build_gamma_restricted, HyperLink, HyperTapInstance};
use crate::instance::{ensure_valid, LinkId, StapInstance, Variant, VertexId};
use crate::oracle::check_feasible_stap;
use crate::rooted::{root_tree, RootedTree};
use crate::uplink::{shortened_optimal_uplinks, UpLink};

#[derive(Debug, Clone)]
pub struct GreedyCaps {
    pub gamma_max: Option<usize>,
    pub k_max: Option<usize>,
    pub max_subsets: usize,
}

impl Default for GreedyCaps {
    fn default() -> Self {
        GreedyCaps {
            gamma_max: Some(4),
            k_max: Some(3),
            max_subsets: 200_000,
        }
    }
}

impl GreedyCaps {
    /// Lift all caps (theory-faithful parameters).
    pub fn theory() -> Self {
        GreedyCaps {
            gamma_max: None,
            k_max: None,
            max_subsets: 200_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GreedyParams {
    pub epsilon: Rat,
    /// eps' = (eps/2) / (1 + ln 2 + eps/2), evaluated with the lower ln 2 bound.
    pub epsilon_prime: Rat,
    /// 2^ceil(1/eps').
    pub gamma_theory: BigUint,
    /// ceil(4/eps).
    pub k_theory: BigUint,
    pub gamma: usize,
    pub k: usize,
    pub gamma_capped: bool,
    pub k_capped: bool,
    pub rho_tolerance: Rat,
}

/// Evaluate the parameter formulas for a given epsilon, applying caps.
pub fn epsilon_to_params(epsilon: &Rat, caps: &GreedyCaps) -> Result<GreedyParams> {
    if !epsilon.is_positive() {
        return Err(StapError::InvalidInstance(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let (ln2_lo, ln2_hi) = ln2_bounds();
    let half = epsilon / Rat::from_integer(2.into());
    let eps_prime = half.clone() / (Rat::one() + &ln2_lo + &half);

    // 1/eps' = 2(1 + ln 2)/eps + 1. ln 2 is irrational, so the ceiling is
    // unambiguous whenever the bracketed values agree.
    let inv_lo = Rat::from_integer(2.into()) * (Rat::one() + ln2_lo) / epsilon + Rat::one();
    let inv_hi = Rat::from_integer(2.into()) * (Rat::one() + ln2_hi) / epsilon + Rat::one();
    let ceil_lo = inv_lo.ceil().to_integer();
    let ceil_hi = inv_hi.ceil().to_integer();
    if ceil_lo != ceil_hi {
        return Err(StapError::Internal(format!(
            "ln 2 precision insufficient to resolve ceil(1/eps') for epsilon {epsilon}"
        )));
    }
    let exponent = ceil_lo
        .to_usize()
        .ok_or_else(|| StapError::ResourceLimit("1/eps' exponent out of range".into()))?;
    if exponent > 1 << 20 {
        return Err(StapError::ResourceLimit(format!(
            "gamma = 2^{exponent} is unrepresentable; use a larger epsilon"
        )));
    }
    let gamma_theory = BigUint::one() << exponent;
    let k_theory = (Rat::from_integer(4.into()) / epsilon)
        .ceil()
        .to_integer()
        .to_biguint()
        .expect("positive");

    let clamp = |theory: &BigUint, cap: Option<usize>| -> (usize, bool) {
        let t = theory.to_usize();
        match (t, cap) {
            (Some(t), Some(c)) if t > c => (c, true),
            (Some(t), _) => (t, false),
            (None, Some(c)) => (c, true),
            (None, None) => (usize::MAX, true),
        }
    };
    let (gamma, gamma_capped) = clamp(&gamma_theory, caps.gamma_max);
    let (k, k_capped) = clamp(&k_theory, caps.k_max);

    Ok(GreedyParams {
        epsilon: epsilon.clone(),
        epsilon_prime: eps_prime,
        gamma_theory,
        k_theory,
        gamma,
        k,
        gamma_capped,
        k_capped,
        rho_tolerance: Rat::new(1.into(), 1_000_000_000.into()),
    })
}

/// Union of the coverage sets of the given hyper-links.
pub fn combined_coverage(n_edges: usize, links: &[&HyperLink]) -> EdgeSet {
    let mut cov = EdgeSet::empty(n_edges);
    for l in links {
        cov.union_with(&l.coverage);
    }
    cov
}

/// Indices of up-links whose entire vertical path lies inside `cov`.
pub fn drop_set_by_coverage(uplinks: &[UpLink], cov: &EdgeSet) -> Vec<usize> {
    uplinks
        .iter()
        .enumerate()
        .filter(|(_, u)| u.path.is_subset_of(cov))
        .map(|(i, _)| i)
        .collect()
}

/// drop_U(Z): the up-links covered entirely by Z's combined coverage.
pub fn drop_set(uplinks: &[UpLink], z: &[&HyperLink], n_edges: usize) -> Vec<usize> {
    drop_set_by_coverage(uplinks, &combined_coverage(n_edges, z))
}

pub fn drop_cost(uplinks: &[UpLink], indices: &[usize]) -> Rat {
    indices
        .iter()
        .fold(Rat::zero(), |acc, &i| acc + &uplinks[i].cost)
}

/// slack_rho(Z) = rho * c(drop_U(Z)) - c(Z).
pub fn slack(rho: &Rat, z: &[&HyperLink], uplinks: &[UpLink], n_edges: usize) -> Rat {
    let dropped = drop_set(uplinks, z, n_edges);
    let zcost = z.iter().fold(Rat::zero(), |acc, l| acc + &l.cost);
    rho.clone() * drop_cost(uplinks, &dropped) - zcost
}

/// Precomputed machinery to maximize slack over k-thin subsets for many
/// values of rho and shrinking up-link sets.
pub struct KthinSolver<'a> {
    ht: &'a HyperTapInstance,
    k: usize,
    n_edges: usize,
    /// Used when k makes thinness vacuous (k >= |E(T)|): exact min-cost
    /// cover per covered-edge mask, with reconstruction.
    cover_dp: Option<CoverDp>,
    /// Per-vertex candidate lists for the boundary-set table DP.
    table_ctx: Option<TableCtx>,
}

struct CoverDp {
    /// mincost[mask] = cheapest Z whose coverage includes mask.
    mincost: Vec<Option<Rat>>,
    /// chosen link at this mask (trace back via mask \ T_l).
    choice: Vec<Option<usize>>,
}

struct TableCtx {
    /// Per tree vertex: hyper-links crossing its parent edge.
    delta: HashMap<VertexId, Vec<usize>>,
    /// Per tree vertex: hyper-links whose coverage apex is this vertex.
    apexed: HashMap<VertexId, Vec<usize>>,
}

const COVER_DP_MAX_EDGES: usize = 24;
const TABLE_DP_MAX_STATES: u128 = 2_000_000;

impl<'a> KthinSolver<'a> {
    pub fn new(ht: &'a HyperTapInstance, k: usize) -> Result<Self> {
        let n_edges = ht.tree.n_edges();
        // Thinness is vacuous when k >= |E(T)| (a minimal cover never uses
        // more than |E(T)| hyper-links) or k >= the number of hyper-links;
        // then the exact covered-subset DP applies.
        let vacuous = k >= n_edges || k >= ht.hyperlinks.len();
        if vacuous && n_edges <= COVER_DP_MAX_EDGES {
            return Ok(KthinSolver {
                ht,
                k,
                n_edges,
                cover_dp: Some(build_cover_dp(ht, n_edges)),
                table_ctx: None,
            });
        }
        let ctx = build_table_ctx(ht);
        // Rough state-count guard.
        let mut states: u128 = 0;
        for v in ht.tree.preorder() {
            let d = ctx.delta.get(v).map_or(0, |l| l.len());
            states = states.saturating_add(subsets_up_to(d, k));
        }
        if states > TABLE_DP_MAX_STATES {
            return Err(StapError::ResourceLimit(format!(
                "k-thin table would need ~{states} states; use a smaller k or gamma"
            )));
        }
        Ok(KthinSolver {
            ht,
            k,
            n_edges,
            cover_dp: None,
            table_ctx: Some(ctx),
        })
    }

    /// Per-up-link-state context: cost of the droppable up-links per mask
    /// (cover-DP engine only).
    pub fn uplink_context(&self, uplinks: &[UpLink]) -> UplinkCtx {
        let mut drop_cost_by_mask = Vec::new();
        if self.cover_dp.is_some() {
            drop_cost_by_mask = vec![Rat::zero(); 1 << self.n_edges];
            for (mask, slot) in drop_cost_by_mask.iter_mut().enumerate() {
                let mut total = Rat::zero();
                for u in uplinks {
                    let pm = u.path.as_mask().expect("cover dp requires <= 64 edges");
                    if pm & !(mask as u64) == 0 {
                        total += &u.cost;
                    }
                }
                *slot = total;
            }
        }
        UplinkCtx { drop_cost_by_mask }
    }

    /// Maximize slack_rho over k-thin subsets; exact. Returns the maximizer
    /// and its slack.
    pub fn best_for_rho(
        &self,
        rho: &Rat,
        uplinks: &[UpLink],
        ctx: &UplinkCtx,
    ) -> Result<(Vec<usize>, Rat)> {
        if self.ht.hyperlinks.is_empty() {
            return Ok((Vec::new(), Rat::zero()));
        }
        if let Some(dp) = &self.cover_dp {
            Ok(self.best_by_cover_dp(dp, rho, ctx))
        } else {
            self.best_by_table_dp(rho, uplinks)
        }
    }

    fn best_by_cover_dp(&self, dp: &CoverDp, rho: &Rat, ctx: &UplinkCtx) -> (Vec<usize>, Rat) {
        let mut best_mask = 0usize;
        let mut best_value = Rat::zero(); // empty set
        for mask in 0..dp.mincost.len() {
            if let Some(cost) = &dp.mincost[mask] {
                let value = rho.clone() * &ctx.drop_cost_by_mask[mask] - cost;
                if value > best_value {
                    best_value = value;
                    best_mask = mask;
                }
            }
        }
        let mut chosen = Vec::new();
        let mut mask = best_mask;
        while mask != 0 {
            let l = dp.choice[mask].expect("nonzero mask has a choice");
            chosen.push(l);
            let cov = self.ht.hyperlinks[l]
                .coverage
                .as_mask()
                .expect("small universe") as usize;
            mask &= !cov;
        }
        chosen.sort_unstable();
        (chosen, best_value)
    }

    fn best_by_table_dp(&self, rho: &Rat, uplinks: &[UpLink]) -> Result<(Vec<usize>, Rat)> {
        table_dp(self.ht, self.table_ctx.as_ref().unwrap(), self.k, rho, uplinks)
    }
}

pub struct UplinkCtx {
    drop_cost_by_mask: Vec<Rat>,
}

fn subsets_up_to(n: usize, k: usize) -> u128 {
    let mut total: u128 = 1;
    let mut binom: u128 = 1;
    for i in 1..=k.min(n) {
        binom = binom.saturating_mul((n - i + 1) as u128) / i as u128;
        total = total.saturating_add(binom);
    }
    total
}

fn build_cover_dp(ht: &HyperTapInstance, n_edges: usize) -> CoverDp {
    let full = 1usize << n_edges;
    let masks: Vec<u64> = ht
        .hyperlinks
        .iter()
        .map(|l| l.coverage.as_mask().expect("small universe"))
        .collect();
    let mut mincost: Vec<Option<Rat>> = vec![None; full];
    let mut choice: Vec<Option<usize>> = vec![None; full];
    mincost[0] = Some(Rat::zero());
    for mask in 1..full {
        let mut best: Option<(Rat, usize)> = None;
        for (l, lm) in masks.iter().enumerate() {
            if mask as u64 & lm == 0 {
                continue;
            }
            let rest = mask & !(*lm as usize);
            if let Some(sub) = &mincost[rest] {
                let cand = sub.clone() + &ht.hyperlinks[l].cost;
                if best.as_ref().map_or(true, |(c, _)| cand < *c) {
                    best = Some((cand, l));
                }
            }
        }
        if let Some((cost, l)) = best {
            mincost[mask] = Some(cost);
            choice[mask] = Some(l);
        }
    }
    CoverDp { mincost, choice }
}

fn build_table_ctx(ht: &HyperTapInstance) -> TableCtx {
    let rt = &ht.tree;
    let mut delta: HashMap<VertexId, Vec<usize>> = HashMap::new();
    let mut apexed: HashMap<VertexId, Vec<usize>> = HashMap::new();
    for (i, l) in ht.hyperlinks.iter().enumerate() {
        let touched = l.touched_vertices(rt);
        if touched.is_empty() {
            continue;
        }
        let apex = touched
            .iter()
            .copied()
            .min_by_key(|&v| rt.depth(v))
            .unwrap();
        apexed.entry(apex).or_default().push(i);
        for &v in &touched {
            if let Some(pe) = rt.parent_edge(v) {
                if l.coverage.contains(pe) {
                    delta.entry(v).or_default().push(i);
                }
            }
        }
    }
    TableCtx { delta, apexed }
}

/// Boundary-set table dynamic program over (vertex, Y, flag) states.
///
/// The state value is the best slack contribution from the subtree: the best
/// choice of hyper-links entirely inside it, given that exactly the links in
/// `Y` cross its parent edge, counting rho-credit for every up-link whose
/// top lies inside the subtree and whose path is fully covered. The `+` flag
/// additionally requires the below-vertex part of the unique crossing
/// up-link's path to be covered.
fn table_dp(
    ht: &HyperTapInstance,
    ctx: &TableCtx,
    k: usize,
    rho: &Rat,
    uplinks: &[UpLink],
) -> Result<(Vec<usize>, Rat)> {
    let rt = &ht.tree;
    type Key = Vec<usize>; // sorted hyper-link ids crossing the parent edge

    // Up-link crossing each vertex's parent edge (at most one by disjointness).
    let mut cross_up: HashMap<VertexId, usize> = HashMap::new();
    for v in rt.preorder() {
        if let Some(pe) = rt.parent_edge(*v) {
            let mut found = None;
            for (i, u) in uplinks.iter().enumerate() {
                if u.path.contains(pe) {
                    if found.is_some() {
                        return Err(StapError::Internal(
                            "up-link paths are not pairwise disjoint".into(),
                        ));
                    }
                    found = Some(i);
                }
            }
            if let Some(i) = found {
                cross_up.insert(*v, i);
            }
        }
    }

    // tables[v][(Y, plus)] = StateValue
    let mut tables: HashMap<VertexId, HashMap<(Key, bool), StateValue>> = HashMap::new();

    let empty: Vec<usize> = Vec::new();
    for &v in rt.preorder().iter().rev() {
        let delta_v = ctx.delta.get(&v).unwrap_or(&empty);
        let apexed_v = ctx.apexed.get(&v).unwrap_or(&empty);
        let children = rt.children(v);
        let vu = cross_up.get(&v).copied();

        let mut table: HashMap<(Key, bool), StateValue> = HashMap::new();
        let mut y_subsets: Vec<Key> = Vec::new();
        enumerate_subsets(delta_v, k, &mut y_subsets);
        for y in y_subsets {
            for plus in [false, true] {
                if plus && vu.is_none() {
                    continue;
                }
                let out = solve_state(
                    ht, rt, k, rho, uplinks, &tables, &cross_up, v, &y, plus, apexed_v, children,
                )?;
                table.insert((y.clone(), plus), out);
            }
        }
        tables.insert(v, table);
    }

    let root_out = tables[&rt.root()]
        .get(&(Vec::new(), false))
        .cloned()
        .unwrap_or_default();
    // The empty set is always available at slack zero.
    let best = root_out.value.clone().unwrap_or_else(Rat::zero).max(Rat::zero());

    // Reconstruct.
    let mut chosen: BTreeSet<usize> = BTreeSet::new();
    let mut stack: Vec<(VertexId, Key, bool)> = vec![(rt.root(), Vec::new(), false)];
    while let Some((v, y, plus)) = stack.pop() {
        if let Some(out) = tables[&v].get(&(y, plus)) {
            if out.value.is_none() {
                continue;
            }
            chosen.extend(out.z_here.iter().copied());
            for (c, yi, p) in &out.children {
                stack.push((*c, yi.clone(), *p));
            }
        }
    }
    let chosen: Vec<usize> = chosen.into_iter().collect();
    let refs: Vec<&HyperLink> = chosen.iter().map(|&i| &ht.hyperlinks[i]).collect();
    let actual = slack(rho, &refs, uplinks, rt.n_edges());
    if actual >= best {
        Ok((chosen, actual))
    } else {
        Err(StapError::Internal(format!(
            "k-thin DP reconstruction mismatch: table {best}, actual {actual}"
        )))
    }
}

#[derive(Clone, Default)]
struct StateValue {
    value: Option<Rat>,
    /// Hyper-links with apex at this vertex chosen into Z.
    z_here: Vec<usize>,
    /// Per child: (child, boundary set handed down, plus flag).
    children: Vec<(VertexId, Vec<usize>, bool)>,
}

#[allow(clippy::too_many_arguments)]
fn solve_state(
    ht: &HyperTapInstance,
    rt: &RootedTree,
    k: usize,
    rho: &Rat,
    uplinks: &[UpLink],
    tables: &HashMap<VertexId, HashMap<(Vec<usize>, bool), StateValue>>,
    cross_up: &HashMap<VertexId, usize>,
    v: VertexId,
    y: &[usize],
    plus: bool,
    apexed_v: &[usize],
    children: &[VertexId],
) -> Result<StateValue> {
    let mut best = StateValue::default();
    let mut z_subsets: Vec<Vec<usize>> = Vec::new();
    enumerate_subsets(apexed_v, k.saturating_sub(y.len()), &mut z_subsets);

    'combos: for z_here in &z_subsets {
        // All of y and z_here touch v; thinness at v.
        if y.len() + z_here.len() > k {
            continue;
        }
        let mut total = -z_here
            .iter()
            .fold(Rat::zero(), |acc, &l| acc + &ht.hyperlinks[l].cost);
        let mut picks: Vec<(VertexId, Vec<usize>, bool)> = Vec::new();
        let ybar: Vec<usize> = {
            let mut s: Vec<usize> = y.iter().chain(z_here.iter()).copied().collect();
            s.sort_unstable();
            s
        };
        for &c in children {
            let pe = rt.parent_edge(c).expect("child has parent edge");
            let yi: Vec<usize> = ybar
                .iter()
                .copied()
                .filter(|&l| ht.hyperlinks[l].coverage.contains(pe))
                .collect();
            if yi.len() > k {
                continue 'combos;
            }
            let child_u = cross_up.get(&c).copied();
            let child_table = &tables[&c];
            let contribution = match child_u {
                None => child_table
                    .get(&(yi.clone(), false))
                    .and_then(|s| s.value.clone())
                    .map(|val| (val, false)),
                Some(ui) => {
                    let u = &uplinks[ui];
                    if u.top == v {
                        // Resolved here: dropping u needs the child's plus
                        // promise and the edge (c, v) covered, i.e. yi nonempty.
                        let minus = child_table
                            .get(&(yi.clone(), false))
                            .and_then(|s| s.value.clone())
                            .map(|val| (val, false));
                        let plus_opt = if yi.is_empty() {
                            None
                        } else {
                            child_table
                                .get(&(yi.clone(), true))
                                .and_then(|s| s.value.clone())
                                .map(|val| (val + rho.clone() * &u.cost, true))
                        };
                        match (minus, plus_opt) {
                            (Some(a), Some(b)) => Some(if b.0 >= a.0 { b } else { a }),
                            (a, None) => a,
                            (None, b) => b,
                        }
                    } else {
                        // u crosses v as well; the v-level flag dictates.
                        if plus && cross_up.get(&v) == Some(&ui) {
                            if yi.is_empty() {
                                None // edge (c,v) of P_u cannot be covered
                            } else {
                                child_table
                                    .get(&(yi.clone(), true))
                                    .and_then(|s| s.value.clone())
                                    .map(|val| (val, true))
                            }
                        } else {
                            child_table
                                .get(&(yi.clone(), false))
                                .and_then(|s| s.value.clone())
                                .map(|val| (val, false))
                        }
                    }
                }
            };
            match contribution {
                Some((val, flag)) => {
                    total += val;
                    picks.push((c, yi, flag));
                }
                None => continue 'combos,
            }
        }
        // The plus requirement at v itself: if the crossing up-link's bottom
        // is v, its below-v part is empty and any combo qualifies. If its
        // bottom is deeper, the child on its path carries the plus flag,
        // which the loop above enforced.
        if best.value.as_ref().map_or(true, |b| total > *b) {
            best = StateValue {
                value: Some(total),
                z_here: z_here.clone(),
                children: picks,
            };
        }
    }
    Ok(best)
}

fn enumerate_subsets(items: &[usize], max_size: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(items: &[usize], max_size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        if cur.len() == max_size {
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, max_size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut cur = Vec::new();
    rec(items, max_size, 0, &mut cur, out);
}

/// Spec-level convenience around `KthinSolver` for a single evaluation.
pub fn best_kthin_for_rho(
    rho: &Rat,
    ht: &HyperTapInstance,
    uplinks: &[UpLink],
    k: usize,
) -> Result<(Vec<usize>, Rat)> {
    let solver = KthinSolver::new(ht, k)?;
    let ctx = solver.uplink_context(uplinks);
    solver.best_for_rho(rho, uplinks, &ctx)
}

/// Minimum-ratio k-thin subset with nonempty drop, within `tolerance` of the
/// true minimum ratio. Binary search on rho driven by the sign of the
/// maximal slack.
pub fn min_ratio_kthin(
    ht: &HyperTapInstance,
    uplinks: &[UpLink],
    k: usize,
    tolerance: &Rat,
) -> Result<(Vec<usize>, Rat)> {
    let solver = KthinSolver::new(ht, k)?;
    let ctx = solver.uplink_context(uplinks);
    min_ratio_kthin_with(&solver, &ctx, uplinks, tolerance)
}

pub fn min_ratio_kthin_with(
    solver: &KthinSolver<'_>,
    ctx: &UplinkCtx,
    uplinks: &[UpLink],
    tolerance: &Rat,
) -> Result<(Vec<usize>, Rat)> {
    let ht = solver.ht;
    let n_edges = solver.n_edges;

    let ratio_of = |z: &[usize]| -> Option<(Rat, Rat, Rat)> {
        let refs: Vec<&HyperLink> = z.iter().map(|&i| &ht.hyperlinks[i]).collect();
        let dropped = drop_set(uplinks, &refs, n_edges);
        if dropped.is_empty() {
            return None;
        }
        let dcost = drop_cost(uplinks, &dropped);
        let zcost = refs.iter().fold(Rat::zero(), |acc, l| acc + &l.cost);
        if dcost.is_zero() {
            if zcost.is_zero() {
                Some((Rat::zero(), zcost, dcost)) // free improvement
            } else {
                None // ratio +infinity
            }
        } else {
            Some((zcost.clone() / &dcost, zcost, dcost))
        }
    };

    // Free improvements and the singleton fallback. For every remaining
    // up-link the 2-element hyper-link on its endpoints exists with at most
    // its cost, so a candidate with ratio <= 1 and nonempty drop always does.
    let mut best: Option<(Vec<usize>, Rat, Rat)> = None; // (set, ratio, zcost)
    let consider = |z: Vec<usize>, best: &mut Option<(Vec<usize>, Rat, Rat)>| {
        if let Some((r, zc, _)) = ratio_of(&z) {
            let better = match best.as_ref() {
                None => true,
                Some((bz, br, bzc)) => {
                    r < *br || (r == *br && (zc < *bzc || (zc == *bzc && z < *bz)))
                }
            };
            if better {
                *best = Some((z, r, zc));
            }
        }
    };
    let mut pair_lookup: HashMap<(VertexId, VertexId), usize> = HashMap::new();
    for (i, l) in ht.hyperlinks.iter().enumerate() {
        if l.terminals.len() == 2 {
            let key = (l.terminals[0], l.terminals[1]);
            let e = pair_lookup.entry(key).or_insert(i);
            if ht.hyperlinks[*e].cost > l.cost {
                *e = i;
            }
        }
    }
    for u in uplinks {
        let key = if u.bottom <= u.top {
            (u.bottom, u.top)
        } else {
            (u.top, u.bottom)
        };
        if let Some(&i) = pair_lookup.get(&key) {
            consider(vec![i], &mut best);
        }
    }
    // Zero-cost hyper-links dropping anything are free improvements.
    for (i, l) in ht.hyperlinks.iter().enumerate() {
        if l.cost.is_zero() {
            consider(vec![i], &mut best);
        }
    }
    if let Some((z, r, _)) = &best {
        if r.is_zero() {
            return Ok((z.clone(), Rat::zero()));
        }
    }

    // Binary search over [0, 1].
    let mut lo = Rat::zero();
    let mut hi = Rat::one();
    let evaluate = |rho: &Rat| -> Result<Option<Vec<usize>>> {
        let (z, sl) = solver.best_for_rho(rho, uplinks, ctx)?;
        if sl.is_positive() {
            return Ok(Some(z));
        }
        if sl.is_zero() && !z.is_empty() {
            let refs: Vec<&HyperLink> = z.iter().map(|&i| &ht.hyperlinks[i]).collect();
            if !drop_set(uplinks, &refs, n_edges).is_empty() {
                return Ok(Some(z));
            }
        }
        Ok(None)
    };
    if let Some(z) = evaluate(&hi)? {
        consider(z, &mut best);
    }
    while hi.clone() - &lo > *tolerance {
        let mid = (lo.clone() + &hi) / Rat::from_integer(2.into());
        match evaluate(&mid)? {
            Some(z) => {
                consider(z, &mut best);
                hi = mid;
            }
            None => lo = mid,
        }
    }

    match best {
        Some((z, r, _)) => Ok((z, r)),
        None => Err(StapError::Internal(
            "no k-thin candidate with nonempty drop; singleton fallback failed".into(),
        )),
    }
}

#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub chosen: Vec<usize>,
    pub chosen_cost: Rat,
    pub ratio: Rat,
    pub dropped_cost: Rat,
    pub dropped_count: usize,
    pub remaining_uplinks: usize,
}

#[derive(Debug, Clone)]
pub struct StapSolution {
    pub params: GreedyParams,
    pub root: VertexId,
    pub initial_uplink_cost: Rat,
    pub initial_uplink_count: usize,
    pub iterations: Vec<IterationRecord>,
    /// Accepted hyper-links (ids into the hyper-tap instance), with details.
    pub hyperlinks: Vec<AcceptedHyperLink>,
    /// Union of realization links, expanded to input links.
    pub links: Vec<LinkId>,
    /// Sum of accepted hyper-link costs (the quantity the analysis bounds).
    pub hyperlink_cost: Rat,
    /// Cost of the deduplicated input link set.
    pub solution_cost: Rat,
}

#[derive(Debug, Clone)]
pub struct AcceptedHyperLink {
    pub terminals: Vec<VertexId>,
    pub cost: Rat,
    pub steiner_nodes: Vec<VertexId>,
    pub links: Vec<LinkId>,
}

/// Algorithm: local greedy for the edge-weighted problem.
pub fn local_greedy(
    inst: &StapInstance,
    epsilon: &Rat,
    caps: &GreedyCaps,
    root: Option<VertexId>,
) -> Result<StapSolution> {
    ensure_valid(inst)?;
    if inst.variant() != Variant::EdgeWeighted {
        return Err(StapError::WrongVariant {
            expected: "edge-weighted",
            actual: inst.variant().keyword(),
        });
    }
    let params = epsilon_to_params(epsilon, caps)?;
    let root = root.unwrap_or_else(|| inst.terminals()[0]);
    let rt = root_tree(inst, root)?;
    let completed = complete(inst, &rt)?;

    let initial = shortened_optimal_uplinks(&completed, &rt).map_err(|e| match e {
        StapError::UncoverableEdge(edge) => {
            StapError::Infeasible(format!("tree edge {edge} cannot be covered"))
        }
        other => other,
    })?;

    let gamma_run = params.gamma.min(inst.n_terminals().max(2));
    let ht = build_gamma_restricted(&completed, &rt, gamma_run, caps.max_subsets)?;
    let solver = KthinSolver::new(&ht, params.k)?;

    let mut remaining: Vec<UpLink> = initial.uplinks.clone();
    let mut accepted: BTreeSet<usize> = BTreeSet::new();
    let mut iterations = Vec::new();
    let bound = remaining.len();
    while !remaining.is_empty() {
        if iterations.len() > bound {
            return Err(StapError::Internal(
                "greedy exceeded its iteration bound".into(),
            ));
        }
        let ctx = solver.uplink_context(&remaining);
        let (z, ratio) =
            min_ratio_kthin_with(&solver, &ctx, &remaining, &params.rho_tolerance)?;
        let refs: Vec<&HyperLink> = z.iter().map(|&i| &ht.hyperlinks[i]).collect();
        let dropped = drop_set(&remaining, &refs, rt.n_edges());
        if dropped.is_empty() {
            return Err(StapError::Internal(
                "greedy selected a set with empty drop".into(),
            ));
        }
        let dropped_cost = drop_cost(&remaining, &dropped);
        let chosen_cost = refs.iter().fold(Rat::zero(), |acc, l| acc + &l.cost);
        let dropped_idx: std::collections::HashSet<usize> = dropped.iter().copied().collect();
        let mut kept = Vec::with_capacity(remaining.len() - dropped.len());
        for (i, u) in remaining.into_iter().enumerate() {
            if !dropped_idx.contains(&i) {
                kept.push(u);
            }
        }
        remaining = kept;
        accepted.extend(z.iter().copied());
        iterations.push(IterationRecord {
            chosen: z,
            chosen_cost,
            ratio,
            dropped_cost,
            dropped_count: dropped.len(),
            remaining_uplinks: remaining.len(),
        });

        #[cfg(debug_assertions)]
        {
            let mut cov = combined_coverage(
                rt.n_edges(),
                &accepted
                    .iter()
                    .map(|&i| &ht.hyperlinks[i])
                    .collect::<Vec<_>>(),
            );
            for u in &remaining {
                cov.union_with(&u.path);
            }
            debug_assert_eq!(cov.count(), rt.n_edges(), "joint feasibility lost");
        }
    }

    let hyperlink_cost = accepted
        .iter()
        .fold(Rat::zero(), |acc, &i| acc + &ht.hyperlinks[i].cost);
    debug_assert!(hyperlink_cost <= initial.total_cost);

    let mut completed_links: Vec<LinkId> = accepted
        .iter()
        .flat_map(|&i| ht.hyperlinks[i].realization.links.iter().copied())
        .collect();
    completed_links.sort_unstable();
    completed_links.dedup();
    let links = completed.expand_solution(&completed_links);
    let solution_cost = inst.link_set_cost(&links);

    if !check_feasible_stap(inst, &links) {
        return Err(StapError::Internal(
            "greedy produced an infeasible expanded solution".into(),
        ));
    }

    let hyperlinks = accepted
        .iter()
        .map(|&i| {
            let l = &ht.hyperlinks[i];
            AcceptedHyperLink {
                terminals: l.terminals.clone(),
                cost: l.cost.clone(),
                steiner_nodes: l.realization.steiner_nodes.clone(),
                links: completed.expand_solution(&l.realization.links),
            }
        })
        .collect();

    Ok(StapSolution {
        params,
        root,
        initial_uplink_cost: initial.total_cost,
        initial_uplink_count: initial.uplinks.len(),
        iterations,
        hyperlinks,
        links,
        hyperlink_cost,
        solution_cost,
    })
}
