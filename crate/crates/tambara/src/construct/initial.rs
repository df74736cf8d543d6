//! The initial bi-incomplete Burnside functor for a compatible pair: the
//! level at `H` is the subring of `A(H)` spanned by the orbits `H/K` with
//! `(K, H)` an admissible transfer, with structure maps inherited from the
//! ambient Burnside diagram.

use crate::construct::burnside::{burnside_level_algebra, burnside_norm, burnside_restriction, burnside_transfer, check_burnside_group};
use crate::diagram::{LewisDiagram, Norm};
use crate::error::{Error, Result};
use crate::lattice::cyclic_lattice;
use crate::matrix::{identity, Row};
use crate::transfer::CompatiblePair;
use crate::zalg::{AdditiveMap, AlgebraRef, Element, FiniteRankAlgebra, Marks};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Indices (in the ambient orbit basis of `A(C_h)`) of the admissible
/// orbits, and the subalgebra they span.
fn admissible_subalgebra(
    pair: &CompatiblePair,
    h: u64,
    ambient: &AlgebraRef,
) -> (Vec<usize>, AlgebraRef) {
    let divs: Vec<u64> = (1..=h).filter(|d| h % d == 0).collect();
    let stabs: Vec<u64> = divs.iter().rev().copied().collect();
    let keep: Vec<usize> = stabs
        .iter()
        .enumerate()
        .filter(|(_, &k)| pair.add.admits(k, h))
        .map(|(i, _)| i)
        .collect();
    let names: Vec<String> = keep.iter().map(|&i| ambient.basis_names[i].clone()).collect();
    let project = |row: &Row| -> Vec<_> {
        // products of admissible orbits stay admissible (restriction +
        // transitivity); anything else is an internal error
        for (i, c) in row.iter().enumerate() {
            if !c.is_zero() && !keep.contains(&i) {
                panic!("inherited structure leaves the admissible span");
            }
        }
        keep.iter().map(|&i| row[i].clone()).collect()
    };
    let mult: Vec<Vec<Row>> = keep
        .iter()
        .map(|&i| {
            keep.iter()
                .map(|&j| project(&ambient.mult_table[i][j]))
                .collect()
        })
        .collect();
    let unit = project(&ambient.unit);
    let ambient_marks = ambient.marks.as_ref().expect("burnside marks");
    let marks = Marks {
        subgroup_orders: ambient_marks.subgroup_orders.clone(),
        table: keep.iter().map(|&i| ambient_marks.table[i].clone()).collect(),
    };
    let alg = Arc::new(FiniteRankAlgebra {
        basis_names: names,
        mult_table: mult,
        unit,
        moduli: vec![None; keep.len()],
        marks: Some(marks),
    });
    (keep, alg)
}

fn restrict_map(map: &AdditiveMap, from_keep: &[usize], to_keep: &[usize]) -> AdditiveMap {
    let rows: Vec<Row> = from_keep
        .iter()
        .map(|&i| {
            let row = &map.rows[i];
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() && !to_keep.contains(&j) {
                    panic!("inherited map leaves the admissible span");
                }
            }
            to_keep.iter().map(|&j| row[j].clone()).collect()
        })
        .collect();
    AdditiveMap::new(rows)
}

pub fn initial_burnside_diagram(n: u64, pair: &CompatiblePair) -> Result<LewisDiagram> {
    check_burnside_group(n)?;
    let lattice = cyclic_lattice(n)?;
    if pair.lattice() != &lattice {
        return Err(Error::InvalidInput(
            "compatible pair lives on a different lattice".into(),
        ));
    }
    let mut keeps = BTreeMap::new();
    let mut levels = BTreeMap::new();
    let mut weyl = BTreeMap::new();
    for &h in lattice.subgroups() {
        let ambient = burnside_level_algebra(h, n);
        let (keep, alg) = admissible_subalgebra(pair, h, &ambient);
        weyl.insert(h, identity(alg.rank()));
        keeps.insert(h, keep);
        levels.insert(h, alg);
    }
    let mut res = BTreeMap::new();
    let mut tr = BTreeMap::new();
    let mut nm = BTreeMap::new();
    for &(k, h) in &lattice.proper_pairs() {
        res.insert(
            (k, h),
            restrict_map(&burnside_restriction(h, k), &keeps[&h], &keeps[&k]),
        );
    }
    for &(k, h) in pair.add.pairs() {
        tr.insert(
            (k, h),
            restrict_map(&burnside_transfer(k, h), &keeps[&k], &keeps[&h]),
        );
    }
    for &(k, h) in pair.mult.pairs() {
        let ambient_from = burnside_level_algebra(k, n);
        let ambient_to = burnside_level_algebra(h, n);
        let ambient_norm = burnside_norm(&ambient_from, &ambient_to, k, h);
        let from_keep = keeps[&k].clone();
        let to_keep = keeps[&h].clone();
        let from_alg = levels[&k].clone();
        let to_alg = levels[&h].clone();
        let _ = &from_alg;
        nm.insert(
            (k, h),
            Norm::new(format!("initial-burnside[{k},{h}]"), move |x: &Element| {
                // evaluate in the ambient orbit basis, then project back
                let mut ambient_x = vec![num_bigint::BigInt::zero(); ambient_from.rank()];
                for (pos, &i) in from_keep.iter().enumerate() {
                    ambient_x[i] = x.coeffs[pos].clone();
                }
                let img = ambient_norm.apply(&Element::new(ambient_x));
                for (j, c) in img.coeffs.iter().enumerate() {
                    if !c.is_zero() && !to_keep.contains(&j) {
                        panic!("norm leaves the admissible span");
                    }
                }
                let _ = &to_alg;
                Element::new(to_keep.iter().map(|&j| img.coeffs[j].clone()).collect())
            }),
        );
    }
    Ok(LewisDiagram {
        name: format!("initialBurnside(C_{n})"),
        kind: "initial".into(),
        lattice,
        levels,
        weyl,
        om: pair.mult.pairs().clone(),
        oa: pair.add.pairs().clone(),
        res,
        tr,
        nm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::TransferSystem;

    #[test]
    fn cpq_example_levels() {
        // O_m = O_a = {(e, C_p), (C_q, C_pq)} at p = 2, q = 3: the top level
        // is Z[x_p]/(x_p^2 - p x_p) spanned by 1 and [G/C_q], the C_q level
        // collapses to Z, and the C_p level is all of A(C_p).
        let lat = cyclic_lattice(6).unwrap();
        let o = TransferSystem::new(&lat, [(1, 2), (3, 6)]).unwrap();
        let pair = CompatiblePair::new(o.clone(), o).unwrap();
        let d = initial_burnside_diagram(6, &pair).unwrap();
        assert_eq!(d.level(6).unwrap().basis_names, vec!["1", "x2"]);
        assert_eq!(d.level(3).unwrap().basis_names, vec!["1"]);
        assert_eq!(d.level(2).unwrap().basis_names, vec!["1", "x2"]);
        assert_eq!(d.level(1).unwrap().basis_names, vec!["1"]);
        // x2^2 = 2 x2 at the top
        let top = d.level(6).unwrap();
        let x = Element::from_i64(&[0, 1]);
        assert_eq!(top.mul(&x, &x).coeffs, Element::from_i64(&[0, 2]).coeffs);
    }

    #[test]
    fn complete_pair_recovers_full_burnside() {
        let lat = cyclic_lattice(4).unwrap();
        let comp = TransferSystem::complete(&lat);
        let pair = CompatiblePair::new(comp.clone(), comp).unwrap();
        let d = initial_burnside_diagram(4, &pair).unwrap();
        assert_eq!(d.level(4).unwrap().basis_names, vec!["1", "t", "u"]);
    }

    #[test]
    fn trivial_pair_gives_rank_one_levels() {
        let lat = cyclic_lattice(4).unwrap();
        let triv = TransferSystem::trivial(&lat);
        let pair = CompatiblePair::new(triv.clone(), triv).unwrap();
        let d = initial_burnside_diagram(4, &pair).unwrap();
        for &h in lat.subgroups() {
            assert_eq!(d.level(h).unwrap().rank(), 1);
        }
    }
}
