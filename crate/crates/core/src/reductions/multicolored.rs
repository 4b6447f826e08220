//! Multicolored clique to envy reduction with a sharing graph of small
//! pathwidth.
//!
//! Layout for `l` colors of `n` vertices each: color `i` has selector
//! `3i`, provider `3i+1` and dummy `3i+2`; then two certification agents per
//! forbidden pair, pairs ordered by color pair and then by vertex. Color
//! `i` owns resources `(n+4)i ..`: its vertex resources in vertex order, the
//! selector's two resources, the dummy's two. Each certification agent owns
//! one resource after those.

use std::collections::BTreeSet;

use super::{ErsaGadget, Graph};
use crate::error::{Error, Result};
use crate::model::{edge_key, Instance, Sharing, Transfer};

struct Layout {
    classes: Vec<Vec<usize>>,
    /// `(color i, color j, vertex of i, vertex of j)` per forbidden pair.
    forbidden: Vec<(usize, usize, usize, usize)>,
    n: usize,
}

impl Layout {
    fn selector(&self, i: usize) -> usize {
        3 * i
    }
    fn provider(&self, i: usize) -> usize {
        3 * i + 1
    }
    fn dummy(&self, i: usize) -> usize {
        3 * i + 2
    }
    fn certifier(&self, e: usize, second: bool) -> usize {
        3 * self.classes.len() + 2 * e + second as usize
    }
    fn vertex_resource(&self, i: usize, pos: usize) -> usize {
        (self.n + 4) * i + pos
    }
    fn selector_resource(&self, i: usize, t: usize) -> usize {
        (self.n + 4) * i + self.n + t
    }
    fn dummy_resource(&self, i: usize, t: usize) -> usize {
        (self.n + 4) * i + self.n + 2 + t
    }
    fn certifier_resource(&self, e: usize, second: bool) -> usize {
        (self.n + 4) * self.classes.len() + 2 * e + second as usize
    }
}

fn layout(graph: &Graph, coloring: &[usize], l: usize) -> Result<Layout> {
    if coloring.len() != graph.vertex_count() {
        return Err(Error::precondition("one color per vertex is required"));
    }
    if l == 0 {
        return Err(Error::precondition("at least one color is required"));
    }
    let mut classes = vec![Vec::new(); l];
    for (v, &c) in coloring.iter().enumerate() {
        if c >= l {
            return Err(Error::precondition(format!("vertex {v} has color {c} of {l}")));
        }
        classes[c].push(v);
    }
    let n = classes[0].len();
    if n == 0 || classes.iter().any(|c| c.len() != n) {
        return Err(Error::precondition("color classes must be nonempty and of equal size"));
    }
    if let Some((u, v)) = graph.edges().find(|&(u, v)| coloring[u] == coloring[v]) {
        return Err(Error::precondition(format!("edge ({u},{v}) joins two vertices of one color")));
    }
    let mut forbidden = Vec::new();
    for i in 0..l {
        for j in i + 1..l {
            for &v in &classes[i] {
                for &w in &classes[j] {
                    if !graph.adjacent(v, w) {
                        forbidden.push((i, j, v, w));
                    }
                }
            }
        }
    }
    Ok(Layout { classes, forbidden, n })
}

pub fn gen_multicolored_clique_ersa(graph: &Graph, coloring: &[usize], l: usize) -> Result<ErsaGadget> {
    let lay = layout(graph, coloring, l)?;
    let f = lay.forbidden.len();
    let agents = 3 * l + 2 * f;
    let resources = (lay.n + 4) * l + 2 * f;
    let mut u = vec![vec![0u64; resources]; agents];
    let mut alloc = vec![Vec::new(); agents];
    let mut arcs = Vec::new();
    for i in 0..l {
        let s = lay.selector(i);
        for h in 0..l {
            for pos in 0..lay.n {
                u[s][lay.vertex_resource(h, pos)] = 2;
            }
            for t in 0..2 {
                u[s][lay.dummy_resource(h, t)] = 1;
            }
        }
        alloc[lay.provider(i)] = (0..lay.n).map(|p| lay.vertex_resource(i, p)).collect();
        alloc[s] = (0..2).map(|t| lay.selector_resource(i, t)).collect();
        alloc[lay.dummy(i)] = (0..2).map(|t| lay.dummy_resource(i, t)).collect();
        arcs.push((lay.provider(i), s));
        arcs.push((s, lay.dummy(i)));
    }
    for (e, &(ci, cj, v, w)) in lay.forbidden.iter().enumerate() {
        for (second, color, endpoint) in [(false, ci, v), (true, cj, w)] {
            let c = lay.certifier(e, second);
            for h in 0..l {
                for (pos, &x) in lay.classes[h].iter().enumerate() {
                    u[c][lay.vertex_resource(h, pos)] = if x == endpoint { 2 } else { 1 };
                }
                for t in 0..2 {
                    u[c][lay.selector_resource(h, t)] = 1;
                }
            }
            u[c][lay.certifier_resource(e, !second)] = 3;
            alloc[c] = vec![lay.certifier_resource(e, second)];
            arcs.push((c, lay.selector(color)));
        }
        arcs.push((lay.certifier(e, true), lay.certifier(e, false)));
    }
    let edges: BTreeSet<_> = arcs.iter().map(|&(a, b)| edge_key(a, b)).collect();
    let instance = Instance::builder(agents, resources)
        .utilities(u)
        .allocation(alloc)
        .sharing_edges(edges)
        .attention_arcs(arcs)
        .build()?;
    Ok(ErsaGadget { instance, k: f })
}

/// The sharing from a multicolored clique given as one vertex per color.
pub fn multicolored_clique_witness(graph: &Graph, coloring: &[usize], l: usize, clique: &[usize]) -> Result<Sharing> {
    let lay = layout(graph, coloring, l)?;
    if clique.len() != l || clique.iter().enumerate().any(|(i, &v)| v >= coloring.len() || coloring[v] != i) {
        return Err(Error::precondition("need one vertex of each color, in color order"));
    }
    for (i, &a) in clique.iter().enumerate() {
        if clique[i + 1..].iter().any(|&b| !graph.adjacent(a, b)) {
            return Err(Error::precondition("vertices do not form a clique"));
        }
    }
    let mut t = Vec::new();
    for (i, &v) in clique.iter().enumerate() {
        let pos = lay.classes[i].iter().position(|&x| x == v).expect("colored vertex");
        t.push(Transfer { donor: lay.provider(i), recipient: lay.selector(i), resource: lay.vertex_resource(i, pos) });
    }
    for (e, &(ci, _, v, _)) in lay.forbidden.iter().enumerate() {
        let first_chosen = clique[ci] == v;
        let (donor, recipient) = (lay.certifier(e, !first_chosen), lay.certifier(e, first_chosen));
        t.push(Transfer { donor, recipient, resource: lay.certifier_resource(e, !first_chosen) });
    }
    Ok(Sharing::from_transfers(1, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{envious_agents, validate_sharing};

    #[test]
    fn two_colors() {
        let g = Graph::new(4, [(0, 2)]).unwrap();
        let coloring = [0, 0, 1, 1];
        let gadget = gen_multicolored_clique_ersa(&g, &coloring, 2).unwrap();
        let inst = &gadget.instance;
        assert_eq!(gadget.k, 3);
        assert_eq!(inst.agent_count(), 6 + 6);
        assert!(inst.attention_matches_sharing());
        let initial = envious_agents(inst, &Sharing::empty(1)).unwrap().envious.into_iter().collect::<Vec<_>>();
        assert_eq!(initial, vec![0, 3, 6, 7, 8, 9, 10, 11]);
        let w = multicolored_clique_witness(&g, &coloring, 2, &[0, 2]).unwrap();
        validate_sharing(inst, &w).unwrap();
        assert_eq!(envious_agents(inst, &w).unwrap().count(), gadget.k);
        assert!(multicolored_clique_witness(&g, &coloring, 2, &[1, 2]).is_err());
    }

    #[test]
    fn bad_colorings() {
        let g = Graph::new(3, [(0, 1)]).unwrap();
        assert!(gen_multicolored_clique_ersa(&g, &[0, 0, 1], 2).is_err());
        let g = Graph::new(4, [(0, 1)]).unwrap();
        assert!(gen_multicolored_clique_ersa(&g, &[0, 0, 1, 1], 2).is_err());
    }
}
