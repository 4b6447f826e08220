//! Welfare maximization: utilitarian welfare for any sharing bound by one
//! maximum weight matching, egalitarian welfare for simple sharings by a
//! bipartite matching per threshold, and an exact search for egalitarian
//! welfare with larger bounds.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matching::{max_cardinality_bipartite_matching, max_weight_matching, solve_wbmm, WeightedGraph};
use crate::model::{AgentId, Evaluator, Instance, Rational, ResourceId, Sharing, Transfer, ValueScale};

/// `scaled / den >= k`, exactly.
pub(crate) fn scaled_at_least(scaled: i128, den: i128, k: Rational) -> bool {
    scaled * k.denom() >= k.numer() * den
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UwsaSolution {
    pub yes: bool,
    pub optimum: Rational,
    /// A sharing reaching `optimum`.
    pub witness: Sharing,
}

/// Maximum utilitarian welfare over b-bounded 2-sharings.
///
/// Every agent gets one vertex per owned resource (padded with zero-value
/// resources up to `b`) plus `|bundle| - b` dummy vertices that soak up all
/// but `b` of its resource vertices. A cross edge between vertices of
/// neighbouring agents carries the larger welfare gain of sharing either
/// endpoint's resource with the other agent.
pub fn solve_uwsa(instance: &Instance, b: usize, k: Rational) -> Result<UwsaSolution> {
    if b == 0 {
        return Err(Error::precondition("sharing bound must be at least 1"));
    }
    let ext = instance.extension();
    if !ext.budget.is_unbounded() && !ext.edge_costs.is_empty() {
        return Err(Error::Unsupported("utilitarian welfare under a sharing budget".into()));
    }
    let scale = instance.scale();
    let n = instance.agent_count();

    // Resource vertices: `None` marks a padding resource.
    let mut slots: Vec<(AgentId, Option<ResourceId>)> = Vec::new();
    let mut first_slot = vec![0; n + 1];
    for a in 0..n {
        first_slot[a] = slots.len();
        let bundle = instance.bundle(a);
        slots.extend(bundle.iter().map(|&r| (a, Some(r))));
        for _ in bundle.len()..b {
            slots.push((a, None));
        }
    }
    first_slot[n] = slots.len();

    let gain = |donor: AgentId, recipient: AgentId, r: Option<ResourceId>| -> i128 {
        r.map_or(0, |r| scale.received(instance.utility(recipient, r)) - scale.donor_loss(instance.utility(donor, r)))
    };

    let mut cross = Vec::new();
    for &(p, q) in instance.sharing_edges() {
        for x in first_slot[p]..first_slot[p + 1] {
            for y in first_slot[q]..first_slot[q + 1] {
                let w = gain(p, q, slots[x].1).max(gain(q, p, slots[y].1));
                if w > 0 {
                    cross.push((x, y, w));
                }
            }
        }
    }
    let heaviest = cross.iter().map(|e| e.2).max().unwrap_or(0);

    let mut g = WeightedGraph::new(0);
    let mut dummies: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut vertex_count = slots.len();
    for (a, d) in dummies.iter_mut().enumerate() {
        let size = first_slot[a + 1] - first_slot[a];
        for _ in b..size {
            d.push(vertex_count);
            vertex_count += 1;
        }
    }
    if heaviest > 0 {
        g = WeightedGraph::new(vertex_count);
        for &(x, y, w) in &cross {
            g.add_edge(x, y, w)?;
        }
        for a in 0..n {
            for &d in &dummies[a] {
                for x in first_slot[a]..first_slot[a + 1] {
                    g.add_edge(x, d, heaviest)?;
                }
            }
        }
    }
    let matching = max_weight_matching(&g);

    // Keep only cross edges, then drop the lightest ones of any agent that
    // still uses more than `b` of its vertices.
    let mut chosen: Vec<(usize, usize, i128)> = matching
        .edges
        .iter()
        .filter(|&&(x, y)| x < slots.len() && y < slots.len())
        .map(|&(x, y)| {
            let w = gain(slots[x].0, slots[y].0, slots[x].1).max(gain(slots[y].0, slots[x].0, slots[y].1));
            (x, y, w)
        })
        .collect();
    chosen.sort_by_key(|e| std::cmp::Reverse(e.2));
    let mut load = vec![0usize; n];
    chosen.retain(|&(x, y, _)| {
        let (p, q) = (slots[x].0, slots[y].0);
        if load[p] < b && load[q] < b {
            load[p] += 1;
            load[q] += 1;
            true
        } else {
            false
        }
    });

    let mut transfers = Vec::new();
    let mut total_gain = 0;
    for (x, y, w) in chosen {
        let (p, rp) = slots[x];
        let (q, rq) = slots[y];
        total_gain += w;
        if gain(p, q, rp) >= gain(q, p, rq) {
            transfers.push(Transfer { donor: p, recipient: q, resource: rp.expect("positive gain") });
        } else {
            transfers.push(Transfer { donor: q, recipient: p, resource: rq.expect("positive gain") });
        }
    }
    let ev = Evaluator::new(instance);
    let (base, _) = ev.welfare(&[]);
    let value = base + total_gain;
    debug_assert_eq!(ev.welfare(&transfers).0, value);
    let optimum = scale.to_rational(value);
    Ok(UwsaSolution { yes: optimum >= k, optimum, witness: Sharing::from_transfers(b, transfers) })
}

/// For every donor/recipient pair that can lift the recipient to `k`
/// while the donor stays at `k`, the lowest such resource.
fn ewsa_edges(
    instance: &Instance,
    ev: &Evaluator,
    k: Rational,
) -> (Vec<AgentId>, Vec<AgentId>, BTreeMap<(usize, usize), ResourceId>) {
    let scale = ev.scale();
    let n = instance.agent_count();
    let own: Vec<i128> = (0..n).map(|a| ev.base(a, a)).collect();
    let (rich, poor): (Vec<AgentId>, Vec<AgentId>) = (0..n).partition(|&a| scaled_at_least(own[a], scale.den, k));
    let rich_pos: BTreeMap<AgentId, usize> = rich.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let mut edges = BTreeMap::new();
    for (pj, &j) in poor.iter().enumerate() {
        for &i in instance.sharing_neighbors(j) {
            let Some(&pi) = rich_pos.get(&i) else { continue };
            let r = instance.bundle(i).iter().copied().find(|&r| {
                scaled_at_least(own[j] + scale.received(instance.utility(j, r)), scale.den, k)
                    && scaled_at_least(own[i] - scale.donor_loss(instance.utility(i, r)), scale.den, k)
            });
            if let Some(r) = r {
                edges.insert((pi, pj), r);
            }
        }
    }
    (rich, poor, edges)
}

/// Is there a simple 2-sharing within the budget whose egalitarian welfare
/// is at least `k`? Returns a witness when there is.
pub fn solve_ewsa_simple(instance: &Instance, k: Rational) -> Result<Option<Sharing>> {
    let ev = Evaluator::new(instance);
    Ok(ewsa_simple_with(instance, &ev, k))
}

fn ewsa_simple_with(instance: &Instance, ev: &Evaluator, k: Rational) -> Option<Sharing> {
    let (rich, poor, edges) = ewsa_edges(instance, ev, k);
    if poor.is_empty() {
        return Some(Sharing::empty(1));
    }
    let budget = instance.extension().budget;
    let pairs: Vec<(usize, usize)> = match budget {
        crate::model::Budget::Limited(limit) if !instance.extension().edge_costs.is_empty() => {
            // Bipartite sides as one vertex set: rich first, then poor.
            let offset = rich.len();
            let mut g = WeightedGraph::new(rich.len() + poor.len());
            for &(pi, pj) in edges.keys() {
                let c = instance.edge_cost(rich[pi], poor[pj]);
                g.add_edge(pi, offset + pj, c as i128).expect("valid bipartite edge");
            }
            let m = solve_wbmm(&g, limit as i128, poor.len())?;
            m.edges.iter().map(|&(u, v)| (u, v - offset)).collect()
        }
        _ => {
            let list: Vec<_> = edges.keys().copied().collect();
            let m = max_cardinality_bipartite_matching(rich.len(), poor.len(), &list).expect("valid bipartite edges");
            if m.cardinality() < poor.len() {
                return None;
            }
            m.edges
        }
    };
    let transfers =
        pairs.into_iter().map(|(pi, pj)| Transfer { donor: rich[pi], recipient: poor[pj], resource: edges[&(pi, pj)] });
    Some(Sharing::from_transfers(1, transfers))
}

/// Every value an agent can end up with under a simple 2-sharing, scaled.
fn final_value_candidates(instance: &Instance, ev: &Evaluator) -> Vec<i128> {
    let scale = ev.scale();
    let mut out = Vec::new();
    for a in 0..instance.agent_count() {
        let own = ev.base(a, a);
        out.push(own);
        for &r in instance.bundle(a) {
            out.push(own - scale.donor_loss(instance.utility(a, r)));
        }
        for &c in instance.sharing_neighbors(a) {
            for &r in instance.bundle(c) {
                out.push(own + scale.received(instance.utility(a, r)));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Maximum egalitarian welfare over simple 2-sharings within the budget.
pub fn maximize_ewsa_simple(instance: &Instance) -> Result<(Rational, Sharing)> {
    let ev = Evaluator::new(instance);
    let scale = ev.scale();
    let cands = final_value_candidates(instance, &ev);
    // Decisions are downward closed in k; the smallest candidate is the
    // minimum initial value, which the empty sharing always reaches.
    let (mut lo, mut hi) = (0, cands.len() - 1);
    let mut best = ewsa_simple_with(instance, &ev, scale.to_rational(cands[0]))
        .expect("the empty sharing reaches the minimum initial value");
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        match ewsa_simple_with(instance, &ev, scale.to_rational(cands[mid])) {
            Some(w) => {
                lo = mid;
                best = w;
            }
            None => hi = mid - 1,
        }
    }
    Ok((scale.to_rational(cands[lo]), best))
}

struct Search<'a> {
    instance: &'a Instance,
    scale: ValueScale,
    bound: usize,
    target: Rational,
    order: Vec<ResourceId>,
    own: Vec<i128>,
    /// Best additional value each agent could still receive.
    potential: Vec<i128>,
    load: Vec<usize>,
    edge_use: BTreeMap<(AgentId, AgentId), usize>,
    cost: u64,
    transfers: Vec<Transfer>,
    nodes: u64,
    cap: u64,
}

impl Search<'_> {
    fn reaches(&self, v: i128) -> bool {
        scaled_at_least(v, self.scale.den, self.target)
    }

    fn hopeless(&self) -> bool {
        (0..self.own.len()).any(|a| {
            let best = if self.load[a] < self.bound { self.own[a] + self.potential[a] } else { self.own[a] };
            !self.reaches(best)
        })
    }

    fn done(&self) -> bool {
        self.own.iter().all(|&v| self.reaches(v))
    }

    fn dfs(&mut self, idx: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::TooLarge(format!("exact egalitarian search exceeded {} nodes", self.cap)));
        }
        if self.done() {
            return Ok(true);
        }
        if idx == self.order.len() || self.hopeless() {
            return Ok(false);
        }
        let inst = self.instance;
        let r = self.order[idx];
        let donor = inst.owner(r);
        for &c in inst.sharing_neighbors(donor) {
            self.potential[c] -= self.scale.received(inst.utility(c, r));
        }
        let mut recipients: Vec<AgentId> =
            inst.sharing_neighbors(donor).iter().copied().filter(|&c| inst.utility(c, r) > 0).collect();
        recipients.sort_by_key(|&c| (self.own[c], c));
        let mut found = false;
        if self.load[donor] < self.bound {
            for c in recipients {
                if self.load[c] >= self.bound {
                    continue;
                }
                let e = crate::model::edge_key(donor, c);
                let fresh = self.edge_use.get(&e).copied().unwrap_or(0) == 0;
                let extra = if fresh { inst.edge_cost(donor, c) } else { 0 };
                if !inst.extension().budget.allows(self.cost + extra) {
                    continue;
                }
                let loss = self.scale.donor_loss(inst.utility(donor, r));
                let gain = self.scale.received(inst.utility(c, r));
                self.own[donor] -= loss;
                self.own[c] += gain;
                self.load[donor] += 1;
                self.load[c] += 1;
                *self.edge_use.entry(e).or_default() += 1;
                self.cost += extra;
                self.transfers.push(Transfer { donor, recipient: c, resource: r });
                found = self.dfs(idx + 1)?;
                if found {
                    break;
                }
                self.transfers.pop();
                self.cost -= extra;
                *self.edge_use.get_mut(&e).expect("present") -= 1;
                self.load[c] -= 1;
                self.load[donor] -= 1;
                self.own[c] -= gain;
                self.own[donor] += loss;
            }
        }
        if !found {
            found = self.dfs(idx + 1)?;
        }
        if !found {
            for &c in inst.sharing_neighbors(donor) {
                self.potential[c] += self.scale.received(inst.utility(c, r));
            }
        }
        Ok(found)
    }
}

/// Exact egalitarian welfare decision for b-bounded 2-sharings by
/// branch and bound over resources. Refuses to explore more than
/// [`crate::node_cap`] search nodes.
pub fn solve_ewsa_bounded_exact(instance: &Instance, b: usize, k: Rational) -> Result<Option<Sharing>> {
    if b == 0 {
        return Err(Error::precondition("sharing bound must be at least 1"));
    }
    let scale = instance.scale();
    let n = instance.agent_count();
    let ev = Evaluator::new(instance);
    let own: Vec<i128> = (0..n).map(|a| ev.base(a, a)).collect();
    let mut potential = vec![0i128; n];
    for r in 0..instance.resource_count() {
        for &c in instance.sharing_neighbors(instance.owner(r)) {
            potential[c] += scale.received(instance.utility(c, r));
        }
    }
    // Resources that can help the poorest agents first.
    let mut order: Vec<ResourceId> = (0..instance.resource_count())
        .filter(|&r| instance.sharing_neighbors(instance.owner(r)).iter().any(|&c| instance.utility(c, r) > 0))
        .collect();
    let neediest = |r: ResourceId| {
        instance
            .sharing_neighbors(instance.owner(r))
            .iter()
            .filter(|&&c| instance.utility(c, r) > 0)
            .map(|&c| own[c])
            .min()
            .unwrap_or(i128::MAX)
    };
    order.sort_by_key(|&r| (neediest(r), r));
    let mut search = Search {
        instance,
        scale,
        bound: b,
        target: k,
        order,
        own,
        potential,
        load: vec![0; n],
        edge_use: BTreeMap::new(),
        cost: 0,
        transfers: Vec::new(),
        nodes: 0,
        cap: crate::node_cap(),
    };
    if search.dfs(0)? {
        Ok(Some(Sharing::from_transfers(b, search.transfers)))
    } else {
        Ok(None)
    }
}
