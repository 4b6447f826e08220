//! Tree decompositions of the sharing graph and their nice form.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::AgentId;

/// Bags joined by tree edges (indices into `bags`).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<AgentId>>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(0).saturating_sub(1)
    }

    /// Checks the tree shape, vertex and edge coverage, and that the bags
    /// holding any vertex form a subtree. Vertices without edges may be
    /// missing.
    pub fn validate(&self, n: usize, graph: &[(AgentId, AgentId)]) -> Result<()> {
        let t = self.bags.len();
        let bad = |msg: String| Err(Error::precondition(format!("tree decomposition: {msg}")));
        if t == 0 {
            if graph.is_empty() {
                return Ok(());
            }
            return bad("no bags".into());
        }
        if self.edges.len() != t - 1 {
            return bad(format!("{} bags need {} tree edges", t, t - 1));
        }
        let mut adj = vec![Vec::new(); t];
        for &(a, b) in &self.edges {
            if a >= t || b >= t || a == b {
                return bad(format!("bad tree edge ({a},{b})"));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        if components(t, &adj, |_| true) != 1 {
            return bad("bags are not connected".into());
        }
        let sets: Vec<BTreeSet<AgentId>> = self.bags.iter().map(|b| b.iter().copied().collect()).collect();
        for (i, bag) in self.bags.iter().enumerate() {
            if let Some(&v) = bag.iter().find(|&&v| v >= n) {
                return bad(format!("bag {i} holds unknown agent {v}"));
            }
            if sets[i].len() != bag.len() {
                return bad(format!("bag {i} repeats an agent"));
            }
        }
        for &(u, v) in graph {
            if !sets.iter().any(|s| s.contains(&u) && s.contains(&v)) {
                return bad(format!("edge ({u},{v}) is in no bag"));
            }
        }
        for v in 0..n {
            let holding = |b: usize| sets[b].contains(&v);
            let c = components(t, &adj, holding);
            if c > 1 {
                return bad(format!("bags holding agent {v} are not connected"));
            }
        }
        Ok(())
    }
}

fn components(t: usize, adj: &[Vec<usize>], keep: impl Fn(usize) -> bool) -> usize {
    let mut seen = vec![false; t];
    let mut count = 0;
    for s in 0..t {
        if seen[s] || !keep(s) {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] && keep(y) {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Leaf,
    Introduce(AgentId),
    Forget(AgentId),
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NodeKind,
    /// Sorted.
    pub bag: Vec<AgentId>,
    pub children: Vec<usize>,
}

/// A rooted decomposition with empty leaf and root bags where every node
/// introduces one agent, forgets one agent, or joins two identical bags.
/// Children always precede their parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    nodes: Vec<NiceNode>,
}

impl NiceTreeDecomposition {
    /// Builds the nice form of a validated decomposition. Agents without
    /// sharing edges that no bag mentions get bags of their own.
    pub fn from_tree_decomposition(td: &TreeDecomposition, n: usize, graph: &[(AgentId, AgentId)]) -> Result<Self> {
        td.validate(n, graph)?;
        let mut bags: Vec<Vec<AgentId>> = td.bags.clone();
        let mut edges = td.edges.clone();
        let mut covered = vec![false; n];
        for b in &bags {
            for &v in b {
                covered[v] = true;
            }
        }
        for v in (0..n).filter(|&v| !covered[v]) {
            bags.push(vec![v]);
            if bags.len() > 1 {
                edges.push((0, bags.len() - 1));
            }
        }
        for b in &mut bags {
            b.sort_unstable();
        }
        let t = bags.len();
        let mut adj = vec![Vec::new(); t];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }

        // Rooted order: parents before children.
        let mut parent = vec![usize::MAX; t];
        let mut order = vec![0];
        let mut seen = vec![false; t];
        seen[0] = true;
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            i += 1;
            let mut next: Vec<usize> = adj[x].iter().copied().filter(|&y| !seen[y]).collect();
            next.sort_unstable();
            for y in next {
                seen[y] = true;
                parent[y] = x;
                order.push(y);
            }
        }

        let mut out = NiceTreeDecomposition { nodes: Vec::new() };
        let mut top = vec![usize::MAX; t];
        for &x in order.iter().rev() {
            let kids: Vec<usize> = order.iter().copied().filter(|&y| parent[y] == x).collect();
            let mut heads = Vec::new();
            if kids.is_empty() {
                let leaf = out.push(NodeKind::Leaf, Vec::new(), Vec::new());
                heads.push(out.morph(leaf, &bags[x]));
            }
            for c in kids {
                heads.push(out.morph(top[c], &bags[x]));
            }
            let mut acc = heads[0];
            for &h in &heads[1..] {
                acc = out.push(NodeKind::Join, bags[x].clone(), vec![acc, h]);
            }
            top[x] = acc;
        }
        if t > 0 {
            out.morph(top[0], &[]);
        } else {
            out.push(NodeKind::Leaf, Vec::new(), Vec::new());
        }
        Ok(out)
    }

    fn push(&mut self, kind: NodeKind, bag: Vec<AgentId>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    /// Forgets and then introduces agents until the bag of `from` equals
    /// `target`.
    fn morph(&mut self, from: usize, target: &[AgentId]) -> usize {
        let mut cur = from;
        let mut bag = self.nodes[from].bag.clone();
        let drop: Vec<_> = bag.iter().copied().filter(|v| !target.contains(v)).collect();
        for v in drop {
            bag.retain(|&x| x != v);
            cur = self.push(NodeKind::Forget(v), bag.clone(), vec![cur]);
        }
        for &v in target {
            if !bag.contains(&v) {
                bag.push(v);
                bag.sort_unstable();
                cur = self.push(NodeKind::Introduce(v), bag.clone(), vec![cur]);
            }
        }
        cur
    }

    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    /// The root is the last node.
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> usize {
        self.nodes.iter().map(|x| x.bag.len()).max().unwrap_or(0).saturating_sub(1)
    }
}

/// Decomposition from an elimination order: each vertex's bag is itself
/// plus its later neighbours in the fill-in graph.
pub fn elimination_decomposition(n: usize, graph: &[(AgentId, AgentId)], order: &[AgentId]) -> TreeDecomposition {
    let mut adj: Vec<BTreeSet<AgentId>> = vec![BTreeSet::new(); n];
    for &(u, v) in graph {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut bags = Vec::with_capacity(n);
    let mut later = Vec::with_capacity(n);
    for &v in order {
        let nb: Vec<AgentId> = adj[v].iter().copied().collect();
        for &a in &nb {
            adj[a].remove(&v);
            for &b in &nb {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        let mut bag = nb.clone();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        later.push(nb);
    }
    let mut edges = Vec::new();
    let mut roots = Vec::new();
    for (i, nb) in later.iter().enumerate() {
        match nb.iter().min_by_key(|&&a| pos[a]) {
            Some(&p) => edges.push((i, pos[p])),
            None => roots.push(i),
        }
    }
    // Separate components share no agents, so chaining their roots keeps
    // every agent's bags connected.
    for w in roots.windows(2) {
        edges.push((w[0], w[1]));
    }
    TreeDecomposition { bags, edges }
}

/// Greedy min-fill elimination order; ties go to smaller degree, then the
/// smaller index.
pub fn min_fill_order(n: usize, graph: &[(AgentId, AgentId)]) -> Vec<AgentId> {
    let mut adj: Vec<BTreeSet<AgentId>> = vec![BTreeSet::new(); n];
    for &(u, v) in graph {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| {
                let nb: Vec<_> = adj[v].iter().copied().collect();
                let mut fill = 0;
                for (i, &a) in nb.iter().enumerate() {
                    for &b in &nb[i + 1..] {
                        if !adj[a].contains(&b) {
                            fill += 1;
                        }
                    }
                }
                (fill, nb.len(), v)
            })
            .expect("vertices remain");
        let nb: Vec<_> = adj[v].iter().copied().collect();
        for &a in &nb {
            adj[a].remove(&v);
            for &b in &nb {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        adj[v].clear();
        alive[v] = false;
        order.push(v);
    }
    order
}

/// Largest graph handled by the exact subset dynamic program.
pub const EXACT_TREEWIDTH_LIMIT: usize = 12;

/// Optimal elimination order by dynamic programming over vertex subsets.
/// `TW(S)` is the best width for eliminating `S` first; eliminating `v`
/// last within `S` costs the number of vertices outside `S` reachable from
/// `v` through `S \ {v}`.
pub fn exact_order(n: usize, graph: &[(AgentId, AgentId)]) -> Vec<AgentId> {
    assert!(n <= EXACT_TREEWIDTH_LIMIT);
    let mut adj = vec![0u32; n];
    for &(u, v) in graph {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    let full: u32 = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let q = |s: u32, v: usize| -> u32 {
        let mut reach = 0u32;
        let mut frontier = 1u32 << v;
        let mut visited = frontier;
        while frontier != 0 {
            let x = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let nb = adj[x] & !visited;
            visited |= nb;
            reach |= nb & !s;
            frontier |= nb & s;
        }
        (reach & !(1 << v)).count_ones()
    };
    let size = 1usize << n;
    let mut tw = vec![u32::MAX; size];
    let mut last = vec![0u8; size];
    tw[0] = 0;
    for s in 1..size as u32 {
        let mut m = s;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            let rest = s & !(1 << v);
            let w = tw[rest as usize].max(q(rest, v));
            if w < tw[s as usize] {
                tw[s as usize] = w;
                last[s as usize] = v as u8;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = last[s as usize] as usize;
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    order
}

/// A decomposition of the graph: optimal width on small graphs, min-fill
/// otherwise.
pub fn decompose(n: usize, graph: &[(AgentId, AgentId)]) -> TreeDecomposition {
    let order = if n <= EXACT_TREEWIDTH_LIMIT { exact_order(n, graph) } else { min_fill_order(n, graph) };
    elimination_decomposition(n, graph, &order)
}
