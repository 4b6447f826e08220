//! Numerical three-dimensional matching to egalitarian welfare with
//! 2-bounded sharing.
//!
//! Layout for `m` triples: agents `0..m` hold the large resources, `m..2m`
//! the middle ones, `2m..3m` the small ones; agent `i` owns resource `i`.

use super::EwsaGadget;
use crate::error::{Error, Result};
use crate::model::{Instance, Rational, Sharing, Transfer};

fn check(x: &[u64], y: &[u64], z: &[u64], t: u64) -> Result<()> {
    let m = x.len();
    if m == 0 || y.len() != m || z.len() != m {
        return Err(Error::precondition("the three multisets must have the same positive size"));
    }
    if x.iter().chain(y).chain(z).any(|&e| e == 0 || e >= t) {
        return Err(Error::precondition(format!("elements must lie in 1..{t}")));
    }
    let sum: u64 = x.iter().chain(y).chain(z).sum();
    if sum != m as u64 * t {
        return Err(Error::precondition(format!("elements sum to {sum}, expected {}", m as u64 * t)));
    }
    Ok(())
}

pub fn gen_n3dm_ewsa(x: &[u64], y: &[u64], z: &[u64], t: u64) -> Result<EwsaGadget> {
    check(x, y, z, t)?;
    let m = x.len();
    let big = m as u64 * t;
    let k = (big * big + big + 1) * t;
    let n = 3 * m;
    let mut u = vec![vec![0u64; n]; n];
    for a in 0..n {
        for r in 0..m {
            u[a][r] = if a == r { k } else { big * big * t + x[r] };
            u[a][m + r] = if a == m + r { k } else { big * t + y[r] };
        }
        if a >= 2 * m {
            u[a][a] = z[a - 2 * m];
        }
    }
    let instance =
        Instance::builder(n, n).utilities(u).allocation((0..n).map(|a| vec![a]).collect()).sharing_clique().build()?;
    Ok(EwsaGadget { instance, b: 2, k: Rational::from_integer(k as i128) })
}

/// Triples `(i, j, l)` with `x[i] + y[j] + z[l] = t`: the owners of the
/// large and middle resources share them with small-resource agent `l`.
pub fn n3dm_witness(x: &[u64], y: &[u64], z: &[u64], t: u64, triples: &[(usize, usize, usize)]) -> Result<Sharing> {
    check(x, y, z, t)?;
    let m = x.len();
    let mut seen = [vec![false; m], vec![false; m], vec![false; m]];
    let mut out = Vec::new();
    for &(i, j, l) in triples {
        if i >= m || j >= m || l >= m || x[i] + y[j] + z[l] != t {
            return Err(Error::precondition(format!("({i},{j},{l}) is not a triple summing to {t}")));
        }
        for (s, idx) in seen.iter_mut().zip([i, j, l]) {
            if std::mem::replace(&mut s[idx], true) {
                return Err(Error::precondition("triples overlap"));
            }
        }
        out.push(Transfer { donor: i, recipient: 2 * m + l, resource: i });
        out.push(Transfer { donor: m + j, recipient: 2 * m + l, resource: m + j });
    }
    if out.len() != 2 * m {
        return Err(Error::precondition("triples must cover every element"));
    }
    Ok(Sharing::from_transfers(2, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_bundles, own_utility, validate_sharing};

    #[test]
    fn single_triple() {
        let g = gen_n3dm_ewsa(&[1], &[1], &[1], 3).unwrap();
        assert_eq!(g.k, Rational::from_integer(39));
        let inst = &g.instance;
        for a in 0..2 {
            assert_eq!(inst.initial_value(a, a), 39);
        }
        let w = n3dm_witness(&[1], &[1], &[1], 3, &[(0, 0, 0)]).unwrap();
        validate_sharing(inst, &w).unwrap();
        let bundles = derive_bundles(inst, &w).unwrap();
        assert!((0..3).all(|a| own_utility(inst, &bundles, a) >= g.k));
    }

    #[test]
    fn preconditions() {
        assert!(gen_n3dm_ewsa(&[2], &[2], &[2], 3).is_err());
        assert!(gen_n3dm_ewsa(&[1], &[1], &[2], 3).is_err());
        assert!(gen_n3dm_ewsa(&[], &[], &[], 3).is_err());
    }
}
