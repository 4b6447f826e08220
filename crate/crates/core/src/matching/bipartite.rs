use std::collections::VecDeque;

const FREE: usize = usize::MAX;

/// Hopcroft-Karp. Returns `(left, right)` pairs of a maximum matching.
pub(crate) fn hopcroft_karp(left: usize, right: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut adj = vec![Vec::new(); left];
    for &(l, r) in edges {
        adj[l].push(r);
    }
    adj.iter_mut().for_each(|a| {
        a.sort_unstable();
        a.dedup();
    });
    let mut match_l = vec![FREE; left];
    let mut match_r = vec![FREE; right];
    let mut dist = vec![0usize; left];

    loop {
        let mut queue = VecDeque::new();
        for l in 0..left {
            if match_l[l] == FREE {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let m = match_r[r];
                if m == FREE {
                    found = true;
                } else if dist[m] == usize::MAX {
                    dist[m] = dist[l] + 1;
                    queue.push_back(m);
                }
            }
        }
        if !found {
            break;
        }
        let mut progress = false;
        for l in 0..left {
            if match_l[l] == FREE && augment(l, &adj, &mut match_l, &mut match_r, &mut dist) {
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    match_l.iter().enumerate().filter(|(_, &r)| r != FREE).map(|(l, &r)| (l, r)).collect()
}

fn augment(l: usize, adj: &[Vec<usize>], match_l: &mut [usize], match_r: &mut [usize], dist: &mut [usize]) -> bool {
    for &r in &adj[l] {
        let m = match_r[r];
        if m == FREE || (dist[m] == dist[l] + 1 && augment(m, adj, match_l, match_r, dist)) {
            match_l[l] = r;
            match_r[r] = l;
            return true;
        }
    }
    dist[l] = usize::MAX;
    false
}
