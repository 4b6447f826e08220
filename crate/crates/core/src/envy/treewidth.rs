//! Dynamic programming over a nice tree decomposition of the sharing graph.
//!
//! Each table entry fixes the state of every bag agent (idle, or the
//! resource and partner of its single share), the set `S` of bag agents
//! already known to envy someone introduced so far, and the cost spent.
//! The value is the least number of envious agents among the forgotten
//! agents and `S`. A bag agent's state is final, so envy between two bag
//! agents is settled when the second one is introduced; this lets entries
//! above a cap be dropped early, and the minimum is found by raising the
//! cap from `k`.

use std::collections::BTreeMap;

use super::decomposition::{NiceTreeDecomposition, NodeKind};
use super::EnvyAnswer;
use crate::error::{Error, Result};
use crate::model::{AgentId, Evaluator, Instance, ResourceId, Sharing, Transfer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AgentState {
    Idle,
    Receives { resource: ResourceId, donor: AgentId },
    Donates { resource: ResourceId, recipient: AgentId },
}

impl AgentState {
    fn partner(self) -> Option<AgentId> {
        match self {
            AgentState::Idle => None,
            AgentState::Receives { donor, .. } => Some(donor),
            AgentState::Donates { recipient, .. } => Some(recipient),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Key {
    states: Vec<u32>,
    envious: u64,
    cost: u64,
}

#[derive(Debug, Clone)]
enum Back {
    Leaf,
    One(Key),
    Two(Key, Key),
}

type Table = BTreeMap<Key, (usize, Back)>;

struct Dp<'a> {
    inst: &'a Instance,
    ev: Evaluator<'a>,
    states: Vec<Vec<AgentState>>,
}

impl Dp<'_> {
    fn own(&self, v: AgentId, s: AgentState) -> i128 {
        self.seen(v, v, s)
    }

    fn seen(&self, viewer: AgentId, agent: AgentId, s: AgentState) -> i128 {
        let scale = self.ev.scale();
        let base = self.ev.base(viewer, agent);
        match s {
            AgentState::Idle => base,
            AgentState::Receives { resource, .. } => base + scale.received(self.inst.utility(viewer, resource)),
            AgentState::Donates { resource, .. } => base - scale.donor_loss(self.inst.utility(viewer, resource)),
        }
    }

    fn compatible(&self, v: AgentId, sv: AgentState, w: AgentId, sw: AgentState) -> bool {
        if sv.partner() != Some(w) && sw.partner() != Some(v) {
            return true;
        }
        match (sv, sw) {
            (AgentState::Receives { resource: a, donor }, AgentState::Donates { resource: b, recipient }) => {
                a == b && donor == w && recipient == v
            }
            (AgentState::Donates { resource: a, recipient }, AgentState::Receives { resource: b, donor }) => {
                a == b && donor == v && recipient == w
            }
            _ => false,
        }
    }

    fn state(&self, v: AgentId, idx: u32) -> AgentState {
        self.states[v][idx as usize]
    }
}

/// Resources of a bundle with pairwise distinct utility columns; the others
/// are interchangeable with an earlier one.
fn distinct_columns(inst: &Instance, bundle: &[ResourceId]) -> Vec<ResourceId> {
    let n = inst.agent_count();
    let mut out: Vec<ResourceId> = Vec::new();
    for &r in bundle {
        if !out.iter().any(|&q| (0..n).all(|a| inst.utility(a, q) == inst.utility(a, r))) {
            out.push(r);
        }
    }
    out
}

fn agent_states(inst: &Instance, v: AgentId) -> Vec<AgentState> {
    let mut out = vec![AgentState::Idle];
    let own = distinct_columns(inst, inst.bundle(v));
    for &w in inst.sharing_neighbors(v) {
        for r in distinct_columns(inst, inst.bundle(w)) {
            out.push(AgentState::Receives { resource: r, donor: w });
        }
        for &r in &own {
            out.push(AgentState::Donates { resource: r, recipient: w });
        }
    }
    out
}

fn insert(table: &mut Table, key: Key, f: usize, back: Back) {
    match table.get(&key) {
        Some(&(g, _)) if g <= f => {}
        _ => {
            table.insert(key, (f, back));
        }
    }
}

fn too_large(limit: u64) -> Error {
    Error::TooLarge(format!("treewidth tables exceed {limit} entries"))
}

fn remove_bit(bits: u64, pos: usize) -> u64 {
    let low = bits & ((1u64 << pos) - 1);
    let high = (bits >> (pos + 1)) << pos;
    low | high
}

fn insert_bit(bits: u64, pos: usize) -> u64 {
    let low = bits & ((1u64 << pos) - 1);
    let high = (bits >> pos) << (pos + 1);
    low | high
}

/// Minimum envy over simple 2-sharings within the budget, computed on the
/// given decomposition of the sharing graph. Requires the attention arcs to
/// run along sharing edges in both directions.
pub fn solve_ersa_treewidth(
    instance: &Instance,
    decomposition: &NiceTreeDecomposition,
    k: usize,
) -> Result<EnvyAnswer> {
    if !instance.attention_matches_sharing() {
        return Err(Error::precondition("the attention graph must have the sharing graph as its underlying graph"));
    }
    let n = instance.agent_count();
    let nodes = decomposition.nodes();
    if nodes.iter().any(|x| x.bag.iter().any(|&v| v >= n)) {
        return Err(Error::precondition("decomposition mentions unknown agents"));
    }
    let mut forgets = vec![0; n];
    for x in nodes {
        if let NodeKind::Forget(v) = x.kind {
            forgets[v] += 1;
        }
    }
    if forgets.iter().any(|&c| c != 1) || !nodes[decomposition.root()].bag.is_empty() {
        return Err(Error::precondition("every agent must be forgotten exactly once below an empty root"));
    }
    for &(u, v) in instance.sharing_edges() {
        if !nodes.iter().any(|x| x.bag.contains(&u) && x.bag.contains(&v)) {
            return Err(Error::precondition(format!("sharing edge ({u},{v}) is in no bag")));
        }
    }
    if decomposition.width() >= 64 {
        return Err(Error::TooLarge("bags above 64 agents".into()));
    }

    let mut cap = k;
    loop {
        if let Some((min_envy, witness)) = run(instance, decomposition, cap)? {
            return Ok(EnvyAnswer { yes: min_envy <= k, min_envy, witness });
        }
        cap = (2 * cap + 1).min(n);
    }
}

/// The DP keeping only entries with at most `cap` envious agents; `None`
/// when no sharing meets the cap. With `cap >= n` nothing is dropped.
fn run(instance: &Instance, decomposition: &NiceTreeDecomposition, cap: usize) -> Result<Option<(usize, Sharing)>> {
    let n = instance.agent_count();
    let nodes = decomposition.nodes();
    let dp = Dp {
        inst: instance,
        ev: Evaluator::new(instance),
        states: (0..n).map(|v| agent_states(instance, v)).collect(),
    };
    let budget = instance.extension().budget;

    let limit = crate::node_cap();
    let mut entries = 0u64;
    let mut below: Vec<Vec<bool>> = Vec::with_capacity(nodes.len());
    let mut tables: Vec<Table> = Vec::with_capacity(nodes.len());
    for node in nodes {
        let mut fb = vec![false; n];
        for &c in &node.children {
            for v in 0..n {
                fb[v] |= below[c][v];
            }
        }
        let mut table = Table::new();
        match node.kind {
            NodeKind::Leaf => {
                table.insert(Key { states: vec![], envious: 0, cost: 0 }, (0, Back::Leaf));
            }
            NodeKind::Introduce(v) => {
                let child = &tables[node.children[0]];
                let pos = node.bag.binary_search(&v).expect("introduced agent is in the bag");
                for (key, &(f, _)) in child {
                    if entries + table.len() as u64 > limit {
                        return Err(too_large(limit));
                    }
                    'state: for (si, &s) in dp.states[v].iter().enumerate() {
                        if let Some(p) = s.partner() {
                            if !node.bag.contains(&p) && fb[p] {
                                continue;
                            }
                        }
                        let own_v = dp.own(v, s);
                        let mut envious = insert_bit(key.envious, pos);
                        let mut f = f;
                        for (i, &w) in node.bag.iter().filter(|&&w| w != v).enumerate() {
                            let sw = dp.state(w, key.states[i]);
                            if !dp.compatible(v, s, w, sw) {
                                continue 'state;
                            }
                            let bit = if i < pos { i } else { i + 1 };
                            if envious >> pos & 1 == 0
                                && instance.attention_out(v).contains(&w)
                                && own_v < dp.seen(v, w, sw)
                            {
                                envious |= 1 << pos;
                                f += 1;
                            }
                            if envious >> bit & 1 == 0
                                && instance.attention_out(w).contains(&v)
                                && dp.own(w, sw) < dp.seen(w, v, s)
                            {
                                envious |= 1 << bit;
                                f += 1;
                            }
                        }
                        if f > cap {
                            continue;
                        }
                        let mut states = key.states.clone();
                        states.insert(pos, si as u32);
                        let nk = Key { states, envious, cost: key.cost };
                        insert(&mut table, nk, f, Back::One(key.clone()));
                    }
                }
            }
            NodeKind::Forget(v) => {
                let cb = &nodes[node.children[0]].bag;
                let pos = cb.binary_search(&v).expect("forgotten agent was in the child bag");
                for (key, &(f, _)) in &tables[node.children[0]] {
                    let sv = dp.state(v, key.states[pos]);
                    let mut cost = key.cost;
                    if let Some(p) = sv.partner() {
                        if !node.bag.contains(&p) && !fb[p] {
                            continue;
                        }
                        if let AgentState::Donates { recipient, .. } = sv {
                            cost += instance.edge_cost(v, recipient);
                            if !budget.allows(cost) {
                                continue;
                            }
                        }
                    }
                    let mut states = key.states.clone();
                    states.remove(pos);
                    let nk = Key { states, envious: remove_bit(key.envious, pos), cost };
                    insert(&mut table, nk, f, Back::One(key.clone()));
                }
                fb[v] = true;
            }
            NodeKind::Join => {
                let (a, b) = (&tables[node.children[0]], &tables[node.children[1]]);
                let mut by_states: BTreeMap<&[u32], Vec<(&Key, usize)>> = BTreeMap::new();
                for (key, &(f, _)) in b {
                    by_states.entry(&key.states).or_default().push((key, f));
                }
                for (k1, &(f1, _)) in a {
                    if entries + table.len() as u64 > limit {
                        return Err(too_large(limit));
                    }
                    let Some(partners) = by_states.get(k1.states.as_slice()) else { continue };
                    for &(k2, f2) in partners {
                        let cost = k1.cost + k2.cost;
                        if !budget.allows(cost) {
                            continue;
                        }
                        let envious = k1.envious | k2.envious;
                        let f = f1 + f2 - (k1.envious & k2.envious).count_ones() as usize;
                        if f > cap {
                            continue;
                        }
                        let nk = Key { states: k1.states.clone(), envious, cost };
                        insert(&mut table, nk, f, Back::Two(k1.clone(), k2.clone()));
                    }
                }
            }
        }
        entries += table.len() as u64;
        if entries > limit {
            return Err(too_large(limit));
        }
        below.push(fb);
        tables.push(table);
    }

    let root = decomposition.root();
    let Some((root_key, &(min_envy, _))) = tables[root].iter().min_by_key(|(key, (f, _))| (*f, key.cost)) else {
        return Ok(None);
    };

    let mut transfers = Vec::new();
    let mut stack = vec![(root, root_key.clone())];
    while let Some((t, key)) = stack.pop() {
        let node = &nodes[t];
        let (_, back) = &tables[t][&key];
        match back {
            Back::Leaf => {}
            Back::One(child_key) => {
                if let NodeKind::Forget(v) = node.kind {
                    let pos = nodes[node.children[0]].bag.binary_search(&v).expect("in bag");
                    if let AgentState::Donates { resource, recipient } = dp.state(v, child_key.states[pos]) {
                        transfers.push(Transfer { donor: v, recipient, resource });
                    }
                }
                stack.push((node.children[0], child_key.clone()));
            }
            Back::Two(k1, k2) => {
                stack.push((node.children[0], k1.clone()));
                stack.push((node.children[1], k2.clone()));
            }
        }
    }
    Ok(Some((min_envy, Sharing::from_transfers(1, transfers))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envy::decomposition::{decompose, TreeDecomposition};
    use crate::model::{envious_agents, Budget, ExtensionParams, Rational};
    use crate::oracle::min_envy_bruteforce;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn nice(inst: &Instance) -> NiceTreeDecomposition {
        let td = decompose(inst.agent_count(), inst.sharing_edges());
        NiceTreeDecomposition::from_tree_decomposition(&td, inst.agent_count(), inst.sharing_edges()).unwrap()
    }

    #[test]
    fn path_shares_to_the_middle() {
        let inst = Instance::builder(3, 2)
            .identical_utilities(vec![1, 1])
            .allocation(vec![vec![0], vec![], vec![1]])
            .sharing_edges([(0, 1), (1, 2)])
            .attention_from_sharing()
            .build()
            .unwrap();
        let ans = solve_ersa_treewidth(&inst, &nice(&inst), 0).unwrap();
        assert!(ans.yes);
        assert_eq!(ans.min_envy, 0);
        assert_eq!(envious_agents(&inst, &ans.witness).unwrap().count(), 0);
    }

    #[test]
    fn single_agent() {
        let inst = Instance::builder(1, 1).allocation(vec![vec![0]]).build().unwrap();
        let d = NiceTreeDecomposition::from_tree_decomposition(&TreeDecomposition::default(), 1, &[]).unwrap();
        assert_eq!(solve_ersa_treewidth(&inst, &d, 0).unwrap().min_envy, 0);
    }

    #[test]
    fn rejects_mismatched_attention() {
        let inst = Instance::builder(2, 1).allocation(vec![vec![0], vec![]]).sharing_edges([(0, 1)]).build().unwrap();
        assert!(solve_ersa_treewidth(&inst, &nice(&inst), 0).is_err());
    }

    #[test]
    fn rejects_decomposition_of_another_graph() {
        let inst = Instance::builder(3, 1)
            .allocation(vec![vec![0], vec![], vec![]])
            .sharing_edges([(0, 1), (1, 2)])
            .attention_from_sharing()
            .build()
            .unwrap();
        let d = NiceTreeDecomposition::from_tree_decomposition(&decompose(3, &[(0, 1)]), 3, &[(0, 1)]).unwrap();
        assert!(solve_ersa_treewidth(&inst, &d, 0).is_err());
    }

    fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
        let n = rng.random_range(1..=7);
        let m = rng.random_range(0..=6);
        let mut edges = Vec::new();
        for v in 1..n {
            if rng.random_bool(0.3) && v >= 2 {
                let u = rng.random_range(0..v - 1);
                edges.push((u, v));
            }
            edges.push((rng.random_range(0..v), v));
        }
        edges.sort_unstable();
        edges.dedup();
        let mut alloc = vec![Vec::new(); n];
        for r in 0..m {
            alloc[rng.random_range(0..n)].push(r);
        }
        let utilities = (0..n).map(|_| (0..m).map(|_| rng.random_range(0..5)).collect()).collect();
        let mut ext = ExtensionParams::default();
        if rng.random_bool(0.3) {
            ext.alpha = Rational::new(rng.random_range(0..=2), 2);
            ext.beta = Rational::new(rng.random_range(0..=3), 3);
        }
        if rng.random_bool(0.3) {
            for &e in &edges {
                ext.edge_costs.insert(e, rng.random_range(0..3));
            }
            ext.budget = Budget::Limited(rng.random_range(0..4));
        }
        Instance::builder(n, m)
            .utilities(utilities)
            .allocation(alloc)
            .sharing_edges(edges)
            .attention_from_sharing()
            .extension(ext)
            .build()
            .unwrap()
    }

    #[test]
    fn matches_bruteforce_on_sparse_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let inst = random_instance(&mut rng);
            let ans = solve_ersa_treewidth(&inst, &nice(&inst), 0).unwrap();
            let (expect, _) = min_envy_bruteforce(&inst, 1).unwrap();
            assert_eq!(ans.min_envy, expect);
            let w = &ans.witness;
            crate::model::validate_sharing(&inst, w).unwrap();
            assert_eq!(envious_agents(&inst, w).unwrap().count(), expect);
            assert!(inst.extension().budget.allows(crate::model::sharing_cost(&inst, w).unwrap()));
            let k = rng.random_range(0..=inst.agent_count());
            let capped = solve_ersa_treewidth(&inst, &nice(&inst), k).unwrap();
            assert_eq!((capped.yes, capped.min_envy), (expect <= k, expect));
        }
    }
}
