//! Subgroup lattices of finite cyclic groups.
//!
//! A subgroup of `C_n` is named by its order, a divisor of `n`. Containment
//! is divisibility and intersection is the gcd; conjugation is trivial.

use crate::error::{Error, Result};
use num_integer::Integer;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SubgroupLattice {
    group_order: u64,
    subgroups: Vec<u64>,
}

impl SubgroupLattice {
    pub fn group_order(&self) -> u64 {
        self.group_order
    }

    /// Divisors of `n` ascending; one subgroup per divisor.
    pub fn subgroups(&self) -> &[u64] {
        &self.subgroups
    }

    pub fn contains_subgroup(&self, d: u64) -> bool {
        self.subgroups.binary_search(&d).is_ok()
    }

    pub fn check_subgroup(&self, d: u64) -> Result<()> {
        if self.contains_subgroup(d) {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "{d} is not a divisor of {}",
                self.group_order
            )))
        }
    }

    /// `K <= H`, i.e. order(K) divides order(H).
    pub fn leq(&self, k: u64, h: u64) -> bool {
        h % k == 0
    }

    pub fn index(&self, k: u64, h: u64) -> u64 {
        debug_assert!(self.leq(k, h));
        h / k
    }

    /// Order of the Weyl group `W_G(H) = G/H` (abelian case).
    pub fn weyl_order(&self, h: u64) -> u64 {
        self.group_order / h
    }

    /// Comparable ordered pairs `(K, H)` with `K` a proper subgroup of `H`.
    pub fn proper_pairs(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for &k in &self.subgroups {
            for &h in &self.subgroups {
                if k < h && self.leq(k, h) {
                    out.push((k, h));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Subgroup generated by `K` and `H` (join): lcm of the orders.
    pub fn join(&self, k: u64, h: u64) -> u64 {
        k.lcm(&h)
    }
}

pub fn cyclic_lattice(n: u64) -> Result<SubgroupLattice> {
    if n == 0 {
        return Err(Error::InvalidInput("group order must be positive".into()));
    }
    let mut subgroups: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    subgroups.sort_unstable();
    Ok(SubgroupLattice {
        group_order: n,
        subgroups,
    })
}

/// Intersection of the subgroups of orders `k` and `h`: the subgroup of
/// order gcd(k, h).
pub fn intersect(lat: &SubgroupLattice, k: u64, h: u64) -> Result<u64> {
    lat.check_subgroup(k)?;
    lat.check_subgroup(h)?;
    Ok(k.gcd(&h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisor_lattices() {
        assert_eq!(cyclic_lattice(4).unwrap().subgroups(), &[1, 2, 4]);
        assert_eq!(cyclic_lattice(12).unwrap().subgroups().len(), 6);
        assert_eq!(cyclic_lattice(12).unwrap().subgroups(), &[1, 2, 3, 4, 6, 12]);
        // C_6 = C_pq with p=2, q=3: the square lattice.
        assert_eq!(cyclic_lattice(6).unwrap().subgroups(), &[1, 2, 3, 6]);
        assert!(cyclic_lattice(0).is_err());
    }

    #[test]
    fn intersections_are_gcds() {
        let l6 = cyclic_lattice(6).unwrap();
        assert_eq!(intersect(&l6, 2, 3).unwrap(), 1);
        let l4 = cyclic_lattice(4).unwrap();
        assert_eq!(intersect(&l4, 2, 4).unwrap(), 2);
        let l12 = cyclic_lattice(12).unwrap();
        assert_eq!(intersect(&l12, 4, 6).unwrap(), 2);
        assert!(intersect(&l12, 5, 6).is_err());
    }

    #[test]
    fn intersect_is_the_meet() {
        let lat = cyclic_lattice(12).unwrap();
        for &k in lat.subgroups() {
            for &h in lat.subgroups() {
                let m = intersect(&lat, k, h).unwrap();
                assert!(lat.leq(m, k) && lat.leq(m, h));
                for &l in lat.subgroups() {
                    if lat.leq(l, k) && lat.leq(l, h) {
                        assert!(lat.leq(l, m));
                    }
                }
            }
        }
    }

    #[test]
    fn prime_power_is_chain() {
        let lat = cyclic_lattice(8).unwrap();
        assert_eq!(lat.subgroups(), &[1, 2, 4, 8]);
        for w in lat.subgroups().windows(2) {
            assert!(lat.leq(w[0], w[1]));
        }
    }
}
