//! Transfer systems on cyclic subgroup lattices: validation, exhaustive
//! enumeration, saturation and hulls, compatible pairs, path components.
//!
//! A transfer system is a set of ordered pairs `(K, H)` of subgroup orders
//! with `K | H`, containing all reflexive pairs, transitively closed and
//! closed under restriction (intersection with subgroups of the target).
//! Conjugation closure is vacuous for abelian groups.

use crate::error::{Error, Result};
use crate::lattice::SubgroupLattice;
use num_integer::Integer;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TransferSystem {
    lattice: SubgroupLattice,
    /// Non-reflexive admissible pairs `(K, H)`, `K` proper in `H`.
    pairs: BTreeSet<(u64, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A pair `(K, H)` where `K` does not divide `H` or is not a subgroup.
    NotNested((u64, u64)),
    /// `(K, H)` and `(H, L)` present but `(K, L)` missing.
    Transitivity((u64, u64), (u64, u64)),
    /// `(K, H)` present and `L <= H`, but `(K ∩ L, L)` missing.
    Restriction { pair: (u64, u64), l: u64, forced: (u64, u64) },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotNested(p) => write!(f, "pair {p:?} is not a nested pair of subgroups"),
            Violation::Transitivity(a, b) => {
                write!(f, "transitivity fails on {a:?}, {b:?}")
            }
            Violation::Restriction { pair, l, forced } => write!(
                f,
                "restriction fails: {pair:?} with L={l} forces {forced:?}"
            ),
        }
    }
}

/// Check the transfer-system axioms on a candidate pair set (reflexive pairs
/// are adjoined implicitly). Returns the offending axiom and a witness.
pub fn validate_transfer_system(
    lat: &SubgroupLattice,
    candidate: &BTreeSet<(u64, u64)>,
) -> std::result::Result<(), Violation> {
    for &(k, h) in candidate {
        if !lat.contains_subgroup(k) || !lat.contains_subgroup(h) || !lat.leq(k, h) {
            return Err(Violation::NotNested((k, h)));
        }
    }
    let has = |k: u64, h: u64| k == h || candidate.contains(&(k, h));
    for &(k, h) in candidate {
        for &(h2, l) in candidate {
            if h2 == h && !has(k, l) {
                return Err(Violation::Transitivity((k, h), (h2, l)));
            }
        }
        for &l in lat.subgroups() {
            if lat.leq(l, h) {
                let m = k.gcd(&l);
                if !has(m, l) {
                    return Err(Violation::Restriction {
                        pair: (k, h),
                        l,
                        forced: (m, l),
                    });
                }
            }
        }
    }
    Ok(())
}

impl TransferSystem {
    pub fn new(lat: &SubgroupLattice, pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let set: BTreeSet<(u64, u64)> = pairs.into_iter().filter(|(k, h)| k != h).collect();
        validate_transfer_system(lat, &set)
            .map_err(|v| Error::InvalidInput(format!("not a transfer system: {v}")))?;
        Ok(TransferSystem {
            lattice: lat.clone(),
            pairs: set,
        })
    }

    pub fn trivial(lat: &SubgroupLattice) -> Self {
        TransferSystem {
            lattice: lat.clone(),
            pairs: BTreeSet::new(),
        }
    }

    pub fn complete(lat: &SubgroupLattice) -> Self {
        TransferSystem {
            lattice: lat.clone(),
            pairs: lat.proper_pairs().into_iter().collect(),
        }
    }

    pub fn lattice(&self) -> &SubgroupLattice {
        &self.lattice
    }

    /// Non-reflexive pairs, sorted.
    pub fn pairs(&self) -> &BTreeSet<(u64, u64)> {
        &self.pairs
    }

    /// Admissibility including reflexive pairs.
    pub fn admits(&self, k: u64, h: u64) -> bool {
        k == h || self.pairs.contains(&(k, h))
    }

    pub fn is_subsystem_of(&self, other: &TransferSystem) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    pub fn is_trivial(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.pairs.len() == self.lattice.proper_pairs().len()
    }

    /// Two-out-of-three property on composable triples.
    pub fn is_saturated(&self) -> bool {
        let subs = self.lattice.subgroups();
        for &a in subs {
            for &b in subs {
                if !(self.lattice.leq(a, b) && a != b) {
                    continue;
                }
                for &c in subs {
                    if !(self.lattice.leq(b, c) && b != c) {
                        continue;
                    }
                    let ab = self.admits(a, b);
                    let bc = self.admits(b, c);
                    let ac = self.admits(a, c);
                    if (ab as u8) + (bc as u8) + (ac as u8) == 2 {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Smallest saturated transfer system containing this one: close under
    /// two-out-of-three, then re-close the axioms, to a fixpoint.
    pub fn saturated_hull(&self) -> TransferSystem {
        let subs = self.lattice.subgroups().to_vec();
        let mut pairs = self.pairs.clone();
        loop {
            let mut grew = false;
            let has = |pairs: &BTreeSet<(u64, u64)>, k: u64, h: u64| k == h || pairs.contains(&(k, h));
            // two-out-of-three
            let mut added = Vec::new();
            for &a in &subs {
                for &b in &subs {
                    if !(self.lattice.leq(a, b)) {
                        continue;
                    }
                    for &c in &subs {
                        if !(self.lattice.leq(b, c)) {
                            continue;
                        }
                        let ab = has(&pairs, a, b);
                        let bc = has(&pairs, b, c);
                        let ac = has(&pairs, a, c);
                        if ab && bc && !ac {
                            added.push((a, c));
                        } else if ab && ac && !bc {
                            added.push((b, c));
                        } else if bc && ac && !ab {
                            added.push((a, b));
                        }
                    }
                }
            }
            for p in added {
                if p.0 != p.1 {
                    grew |= pairs.insert(p);
                }
            }
            // transitivity + restriction closure
            loop {
                let mut closure = Vec::new();
                for &(k, h) in &pairs {
                    for &(h2, l) in &pairs {
                        if h2 == h && k != l && !pairs.contains(&(k, l)) {
                            closure.push((k, l));
                        }
                    }
                    for &l in &subs {
                        if self.lattice.leq(l, h) {
                            let m = k.gcd(&l);
                            if m != l && !pairs.contains(&(m, l)) {
                                closure.push((m, l));
                            }
                        }
                    }
                }
                if closure.is_empty() {
                    break;
                }
                for p in closure {
                    grew |= pairs.insert(p);
                }
            }
            if !grew {
                break;
            }
        }
        let ts = TransferSystem {
            lattice: self.lattice.clone(),
            pairs,
        };
        debug_assert!(ts.is_saturated());
        ts
    }

    /// Partition of the subgroups into path components of the underlying
    /// undirected graph of non-reflexive pairs, each with its minimal member.
    pub fn path_components(&self) -> Vec<Component> {
        let subs = self.lattice.subgroups();
        let mut parent: BTreeMap<u64, u64> = subs.iter().map(|&s| (s, s)).collect();
        fn find(parent: &mut BTreeMap<u64, u64>, x: u64) -> u64 {
            let p = parent[&x];
            if p == x {
                x
            } else {
                let r = find(parent, p);
                parent.insert(x, r);
                r
            }
        }
        for &(k, h) in &self.pairs {
            let (rk, rh) = (find(&mut parent, k), find(&mut parent, h));
            if rk != rh {
                parent.insert(rk, rh);
            }
        }
        let mut groups: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
        for &s in subs {
            let r = find(&mut parent, s);
            groups.entry(r).or_default().insert(s);
        }
        let mut out: Vec<Component> = groups
            .into_values()
            .map(|members| {
                let minimal: Vec<u64> = members
                    .iter()
                    .copied()
                    .filter(|&m| members.iter().all(|&o| o == m || !self.lattice.leq(o, m)))
                    .collect();
                Component {
                    minimum: if minimal.len() == 1 { Some(minimal[0]) } else { None },
                    members,
                }
            })
            .collect();
        out.sort_by_key(|c| *c.members.iter().next().unwrap());
        out
    }

    /// Restriction of the pair set to a subset of the subgroups. The result
    /// is generally only a transfer system on the sub-poset, so it is
    /// returned as a raw pair set.
    pub fn restricted_pairs(&self, members: &BTreeSet<u64>) -> BTreeSet<(u64, u64)> {
        self.pairs
            .iter()
            .copied()
            .filter(|(k, h)| members.contains(k) && members.contains(h))
            .collect()
    }
}

/// A path component of a transfer system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    pub members: BTreeSet<u64>,
    /// The unique minimal member when it exists (always, for saturated
    /// systems); `None` flags a diagnostic run on a non-saturated system.
    pub minimum: Option<u64>,
}

impl fmt::Display for TransferSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, h)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({k},{h})")?;
        }
        write!(f, "}}")
    }
}

/// All transfer systems on the lattice, ordered lexicographically by the
/// bitmask over the sorted candidate pair list (bit i set = pair i present).
pub fn enumerate_transfer_systems(lat: &SubgroupLattice) -> Vec<TransferSystem> {
    let candidates = lat.proper_pairs();
    let m = candidates.len();
    assert!(m < 30, "enumeration is exhaustive over 2^pairs");
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << m) {
        let set: BTreeSet<(u64, u64)> = candidates
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        if validate_transfer_system(lat, &set).is_ok() {
            out.push(TransferSystem {
                lattice: lat.clone(),
                pairs: set,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompatiblePair {
    pub mult: TransferSystem,
    pub add: TransferSystem,
}

/// A triple witnessing failure of the compatibility axiom: `(B, A)` is an
/// admissible norm and `(B ∩ C, B)` an admissible transfer, but `(C, A)` is
/// not an admissible transfer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityViolation {
    pub b: u64,
    pub c: u64,
    pub a: u64,
}

pub fn is_compatible_pair(
    om: &TransferSystem,
    oa: &TransferSystem,
) -> std::result::Result<(), CompatibilityViolation> {
    let lat = om.lattice();
    for &a in lat.subgroups() {
        for &b in lat.subgroups() {
            if !lat.leq(b, a) || !om.admits(b, a) {
                continue;
            }
            for &c in lat.subgroups() {
                if !lat.leq(c, a) {
                    continue;
                }
                let m = b.gcd(&c);
                if oa.admits(m, b) && !oa.admits(c, a) {
                    return Err(CompatibilityViolation { b, c, a });
                }
            }
        }
    }
    Ok(())
}

impl CompatiblePair {
    pub fn new(mult: TransferSystem, add: TransferSystem) -> Result<Self> {
        is_compatible_pair(&mult, &add).map_err(|v| {
            Error::InvalidInput(format!(
                "not a compatible pair: norm ({},{}) and transfer ({},{}) force transfer ({},{})",
                v.b,
                v.a,
                v.b.gcd(&v.c),
                v.b,
                v.c,
                v.a
            ))
        })?;
        Ok(CompatiblePair { mult, add })
    }

    pub fn lattice(&self) -> &SubgroupLattice {
        self.mult.lattice()
    }

    pub fn is_self_compatible(&self) -> bool {
        self.mult == self.add
    }
}

/// All compatible pairs `(O_m, O_a)`, ordered by the enumeration indices of
/// the two transfer systems.
pub fn enumerate_compatible_pairs(lat: &SubgroupLattice) -> Vec<CompatiblePair> {
    let systems = enumerate_transfer_systems(lat);
    let mut out = Vec::new();
    for om in &systems {
        for oa in &systems {
            if is_compatible_pair(om, oa).is_ok() {
                out.push(CompatiblePair {
                    mult: om.clone(),
                    add: oa.clone(),
                });
            }
        }
    }
    out
}

/// Name a transfer system in the notation used for `C_{p^2}` lattices
/// (`Otriv`, `O1`, `O2`, `O3`, `Ocomp`); falls back to the pair list.
pub fn system_name(ts: &TransferSystem) -> String {
    if ts.is_trivial() {
        return "Otriv".into();
    }
    if ts.is_complete() {
        return "Ocomp".into();
    }
    let subs = ts.lattice().subgroups();
    if subs.len() == 3 {
        let (e, p, p2) = (subs[0], subs[1], subs[2]);
        let o1: BTreeSet<_> = [(e, p)].into();
        let o2: BTreeSet<_> = [(p, p2)].into();
        let o3: BTreeSet<_> = [(e, p), (e, p2)].into();
        if ts.pairs == o1 {
            return "O1".into();
        }
        if ts.pairs == o2 {
            return "O2".into();
        }
        if ts.pairs == o3 {
            return "O3".into();
        }
    }
    ts.to_string()
}

/// Resolve a transfer-system name or raw pair list against a lattice.
/// Accepts `Otriv`/`O1`/`O2`/`O3`/`Ocomp` and raw lists like `(1,2)(1,4)`.
pub fn parse_system(lat: &SubgroupLattice, text: &str) -> Result<TransferSystem> {
    let t = text.trim();
    let named = match t.to_ascii_lowercase().as_str() {
        "otriv" | "triv" => Some(TransferSystem::trivial(lat)),
        "ocomp" | "comp" => Some(TransferSystem::complete(lat)),
        _ => None,
    };
    if let Some(ts) = named {
        return Ok(ts);
    }
    if lat.subgroups().len() == 3 {
        let subs = lat.subgroups();
        let (e, p, p2) = (subs[0], subs[1], subs[2]);
        let pairs: Option<Vec<(u64, u64)>> = match t.to_ascii_lowercase().as_str() {
            "o1" => Some(vec![(e, p)]),
            "o2" => Some(vec![(p, p2)]),
            "o3" => Some(vec![(e, p), (e, p2)]),
            _ => None,
        };
        if let Some(pairs) = pairs {
            return TransferSystem::new(lat, pairs);
        }
    }
    // raw list: (k,h)(k,h)...
    let mut pairs = Vec::new();
    let body = t.replace(['{', '}'], "");
    for chunk in body.split(')').filter(|c| !c.trim().is_empty()) {
        let chunk = chunk.trim().trim_start_matches('(');
        let mut it = chunk.split(',').map(str::trim);
        let (Some(k), Some(h), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::InvalidInput(format!("cannot parse pair list `{text}`")));
        };
        let k: u64 = k
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad subgroup order `{k}`")))?;
        let h: u64 = h
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad subgroup order `{h}`")))?;
        pairs.push((k, h));
    }
    TransferSystem::new(lat, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::cyclic_lattice;

    fn lat(n: u64) -> SubgroupLattice {
        cyclic_lattice(n).unwrap()
    }

    /// Independent axiom check by direct quantifier loops, for use as an
    /// enumeration oracle.
    fn axioms_hold_oracle(lat: &SubgroupLattice, set: &BTreeSet<(u64, u64)>) -> bool {
        let admits = |k: u64, h: u64| k == h || set.contains(&(k, h));
        for &(k, h) in set {
            if h % k == 0 && k != h && lat.contains_subgroup(k) && lat.contains_subgroup(h) {
            } else {
                return false;
            }
        }
        for &x in lat.subgroups() {
            for &y in lat.subgroups() {
                for &z in lat.subgroups() {
                    if admits(x, y) && admits(y, z) && !admits(x, z) {
                        return false;
                    }
                }
            }
        }
        for &(k, h) in set {
            for &l in lat.subgroups() {
                if h % l == 0 && !admits(k.gcd(&l), l) {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn validate_named_examples() {
        let l4 = lat(4);
        // O3 on C_{p^2} is a valid transfer system.
        assert!(validate_transfer_system(&l4, &[(1, 2), (1, 4)].into()).is_ok());
        // {(1, p^2)} alone violates restriction: L = C_p forces (1, p).
        let v = validate_transfer_system(&l4, &[(1, 4)].into()).unwrap_err();
        assert_eq!(
            v,
            Violation::Restriction {
                pair: (1, 4),
                l: 2,
                forced: (1, 2)
            }
        );
        // complete transfer system on C_p
        let l2 = lat(2);
        assert!(validate_transfer_system(&l2, &[(1, 2)].into()).is_ok());
    }

    #[test]
    fn enumeration_counts_with_oracle() {
        // Frozen counts cross-checked against the independent brute-force
        // oracle: 2 / 5 / 14 for C_p / C_{p^2} / C_{p^3}.
        for (n, expect) in [(2u64, 2usize), (4, 5), (8, 14), (9, 5), (6, 10)] {
            let l = lat(n);
            let got = enumerate_transfer_systems(&l);
            assert_eq!(got.len(), expect, "count for C_{n}");
            let candidates = l.proper_pairs();
            let mut oracle = 0usize;
            for mask in 0u64..(1 << candidates.len()) {
                let set: BTreeSet<(u64, u64)> = candidates
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &p)| p)
                    .collect();
                if axioms_hold_oracle(&l, &set) {
                    oracle += 1;
                }
            }
            assert_eq!(got.len(), oracle);
        }
    }

    #[test]
    fn enumeration_is_bitmask_ordered() {
        let systems = enumerate_transfer_systems(&lat(4));
        let candidates = lat(4).proper_pairs();
        let mask_of = |ts: &TransferSystem| -> u64 {
            candidates
                .iter()
                .enumerate()
                .filter(|(_, p)| ts.pairs().contains(p))
                .map(|(i, _)| 1u64 << i)
                .sum()
        };
        let masks: Vec<u64> = systems.iter().map(mask_of).collect();
        let mut sorted = masks.clone();
        sorted.sort_unstable();
        assert_eq!(masks, sorted);
    }

    #[test]
    fn hull_examples() {
        let l4 = lat(4);
        let o3 = TransferSystem::new(&l4, [(1, 2), (1, 4)]).unwrap();
        assert!(!o3.is_saturated());
        assert_eq!(o3.saturated_hull(), TransferSystem::complete(&l4));

        let triv = TransferSystem::trivial(&l4);
        assert_eq!(triv.saturated_hull(), triv);

        // O1 = {(e, C_p)} is already saturated: no chain through C_p exists
        // with two of three present.
        let o1 = TransferSystem::new(&l4, [(1, 2)]).unwrap();
        assert!(o1.is_saturated());
        assert_eq!(o1.saturated_hull(), o1);
    }

    #[test]
    fn hull_is_idempotent_monotone_and_least() {
        for n in [4u64, 8] {
            let l = lat(n);
            let systems = enumerate_transfer_systems(&l);
            let saturated: Vec<&TransferSystem> =
                systems.iter().filter(|s| s.is_saturated()).collect();
            for ts in &systems {
                let hull = ts.saturated_hull();
                assert!(ts.is_subsystem_of(&hull));
                assert_eq!(hull.saturated_hull(), hull);
                // hull equals the intersection of saturated systems above ts
                let mut meet: Option<BTreeSet<(u64, u64)>> = None;
                for s in &saturated {
                    if ts.is_subsystem_of(s) {
                        meet = Some(match meet {
                            None => s.pairs().clone(),
                            Some(acc) => acc.intersection(s.pairs()).copied().collect(),
                        });
                    }
                }
                assert_eq!(hull.pairs(), &meet.unwrap());
            }
            for a in &systems {
                for b in &systems {
                    if a.is_subsystem_of(b) {
                        assert!(a.saturated_hull().is_subsystem_of(&b.saturated_hull()));
                    }
                }
            }
        }
    }

    #[test]
    fn compatible_pair_examples() {
        let l4 = lat(4);
        let systems = enumerate_transfer_systems(&l4);
        let comp = TransferSystem::complete(&l4);
        let triv = TransferSystem::trivial(&l4);
        for s in &systems {
            assert!(is_compatible_pair(&triv, s).is_ok());
            assert!(is_compatible_pair(s, &comp).is_ok());
        }
        let o1 = TransferSystem::new(&l4, [(1, 2)]).unwrap();
        let o2 = TransferSystem::new(&l4, [(2, 4)]).unwrap();
        let v = is_compatible_pair(&o1, &o2).unwrap_err();
        assert_eq!((v.b, v.c, v.a), (1, 1, 2));
    }

    #[test]
    fn compatible_pair_counts() {
        assert_eq!(enumerate_compatible_pairs(&lat(2)).len(), 3);
        assert_eq!(enumerate_compatible_pairs(&lat(4)).len(), 12);
        assert_eq!(enumerate_compatible_pairs(&lat(9)).len(), 12);
        // 1/(2n+3) * C(3n+3, n+1) at n = 3: 495 / 9 = 55.
        assert_eq!(enumerate_compatible_pairs(&lat(8)).len(), 55);
    }

    #[test]
    fn hull_containment_and_saturation_iff_self_compatible() {
        for n in [4u64, 8] {
            let l = lat(n);
            for pair in enumerate_compatible_pairs(&l) {
                assert!(pair.mult.is_subsystem_of(&pair.add));
                assert!(pair.mult.saturated_hull().is_subsystem_of(&pair.add));
            }
            for ts in enumerate_transfer_systems(&l) {
                assert_eq!(ts.is_saturated(), is_compatible_pair(&ts, &ts).is_ok());
            }
        }
    }

    #[test]
    fn path_component_examples() {
        let l4 = lat(4);
        let o1 = TransferSystem::new(&l4, [(1, 2)]).unwrap();
        let comps = o1.path_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].members, [1, 2].into());
        assert_eq!(comps[0].minimum, Some(1));
        assert_eq!(comps[1].members, [4].into());

        let triv = TransferSystem::trivial(&l4);
        assert_eq!(triv.path_components().len(), 3);

        let l6 = lat(6);
        let o = TransferSystem::new(&l6, [(1, 2), (1, 3)]).unwrap();
        let comps = o.path_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].members, [1, 2, 3].into());
        assert_eq!(comps[0].minimum, Some(1));
        assert_eq!(comps[1].members, [6].into());
    }

    #[test]
    fn components_of_saturated_systems_look_complete() {
        for n in [4u64, 8, 6] {
            let l = lat(n);
            for ts in enumerate_transfer_systems(&l) {
                if !ts.is_saturated() {
                    continue;
                }
                for comp in ts.path_components() {
                    assert!(comp.minimum.is_some());
                    for &a in &comp.members {
                        for &b in &comp.members {
                            if a != b && l.leq(a, b) {
                                assert!(ts.admits(a, b));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn parse_and_name_roundtrip() {
        let l4 = lat(4);
        for text in ["Otriv", "O1", "O2", "O3", "Ocomp"] {
            let ts = parse_system(&l4, text).unwrap();
            assert_eq!(system_name(&ts), text);
        }
        let l6 = lat(6);
        let ts = parse_system(&l6, "(1,2)(1,3)").unwrap();
        assert_eq!(ts.pairs().len(), 2);
        assert!(parse_system(&l6, "(1,4)").is_err());
    }
}
