//! Clique to envy reduction with unit resources, identical utilities and a
//! complete sharing graph.
//!
//! Layout for a graph with `n` vertices, `m` edges and `t = l(l-1)/2`:
//! vertex agents `0..n`, edge agents `n..n+m` in sorted edge order, dummies
//! `n+m..n+3m`, happy agents `n+3m..n+3m+t`. Happy agent `j` owns resource
//! `j`.

use super::{binomial2, ErsaGadget, Graph};
use crate::error::{Error, Result};
use crate::model::{Instance, Sharing, Transfer};

pub fn gen_clique_ersa(graph: &Graph, l: usize) -> Result<ErsaGadget> {
    let n = graph.vertex_count();
    let m = graph.edge_count();
    let t = binomial2(l);
    if l < 4 || l >= n {
        return Err(Error::precondition(format!("need 4 <= l < {n}, got {l}")));
    }
    if t > m {
        return Err(Error::precondition(format!("a clique of size {l} needs {t} edges, the graph has {m}")));
    }
    let agents = n + 3 * m + t;
    let happy = n + 3 * m;
    let mut arcs = Vec::new();
    for (e, (u, v)) in graph.edges().enumerate() {
        arcs.extend((happy..agents).map(|h| (n + e, h)));
        arcs.push((u, n + e));
        arcs.push((v, n + e));
    }
    for d in n + m..happy {
        arcs.extend((0..n).map(|v| (d, v)));
    }
    let mut alloc = vec![Vec::new(); agents];
    for j in 0..t {
        alloc[happy + j] = vec![j];
    }
    let instance = Instance::builder(agents, t)
        .identical_utilities(vec![1; t])
        .allocation(alloc)
        .sharing_clique()
        .attention_arcs(arcs)
        .build()?;
    Ok(ErsaGadget { instance, k: m - t + l })
}

/// Happy agents share with the edge agents of a clique of size `l`.
pub fn clique_witness(graph: &Graph, l: usize, clique: &[usize]) -> Result<Sharing> {
    let n = graph.vertex_count();
    let m = graph.edge_count();
    if clique.len() != l || clique.iter().any(|&v| v >= n) {
        return Err(Error::precondition(format!("need {l} vertices")));
    }
    for (i, &a) in clique.iter().enumerate() {
        if clique[i + 1..].iter().any(|&b| a == b || !graph.adjacent(a, b)) {
            return Err(Error::precondition("vertices do not form a clique"));
        }
    }
    let inside: Vec<usize> = graph
        .edges()
        .enumerate()
        .filter(|(_, (u, v))| clique.contains(u) && clique.contains(v))
        .map(|(e, _)| e)
        .collect();
    let happy = n + 3 * m;
    Ok(Sharing::from_transfers(
        1,
        inside.iter().enumerate().map(|(j, &e)| Transfer { donor: happy + j, recipient: n + e, resource: j }),
    ))
}
