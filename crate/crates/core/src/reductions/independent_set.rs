//! Independent set to envy reduction on cliques.
//!
//! Layout for `n` vertices and target size `l`: agents `0..n` are vertex
//! agents, `n..n+l-1` providers, `n+l-1` the special provider. Vertex agent
//! `i` owns resources `2i` and `2i+1`, provider `j` owns `2n+j`, and the
//! special provider owns `2n+l-1`.

use super::{ErsaGadget, Graph};
use crate::error::{Error, Result};
use crate::model::{Instance, Sharing, Transfer};

pub fn gen_independent_set_ersa(graph: &Graph, l: usize) -> Result<ErsaGadget> {
    let n = graph.vertex_count();
    if l < 1 || l > n {
        return Err(Error::precondition(format!("need 1 <= l <= {n}, got {l}")));
    }
    let agents = n + l;
    let resources = 2 * n + l;
    let special = n + l - 1;
    let mut u = vec![vec![0u64; resources]; agents];
    for i in 0..n {
        for j in 0..n {
            u[i][2 * j] = graph.adjacent(i, j) as u64;
        }
        for r in 2 * n..resources {
            u[i][r] = 3;
        }
    }
    for row in u.iter_mut().take(special).skip(n) {
        for (r, x) in row.iter_mut().enumerate() {
            *x = if r < 2 * n { 1 } else { 3 };
        }
    }
    u[special][resources - 1] = 3;
    let mut alloc: Vec<Vec<usize>> = (0..n).map(|i| vec![2 * i, 2 * i + 1]).collect();
    alloc.extend((0..l).map(|j| vec![2 * n + j]));
    let instance = Instance::builder(agents, resources)
        .utilities(u)
        .allocation(alloc)
        .sharing_clique()
        .attention_clique()
        .build()?;
    Ok(ErsaGadget { instance, k: n - 1 })
}

/// Each of the first `l` vertices of an independent set receives one
/// provider's resource.
pub fn independent_set_witness(graph: &Graph, l: usize, set: &[usize]) -> Result<Sharing> {
    let n = graph.vertex_count();
    if set.len() < l || set.iter().any(|&v| v >= n) {
        return Err(Error::precondition(format!("need {l} vertices")));
    }
    let chosen = &set[..l];
    for (x, &a) in chosen.iter().enumerate() {
        for &b in &chosen[x + 1..] {
            if a == b || graph.adjacent(a, b) {
                return Err(Error::precondition("vertices are not independent"));
            }
        }
    }
    Ok(Sharing::from_transfers(
        1,
        chosen.iter().enumerate().map(|(j, &v)| Transfer { donor: n + j, recipient: v, resource: 2 * n + j }),
    ))
}
