//! The constant fixed-point functor: `Z` at every level with trivial action,
//! restriction the identity, transfer multiplication by the index, and norm
//! the index-th power map.

use crate::diagram::{LewisDiagram, Norm};
use crate::error::Result;
use crate::lattice::cyclic_lattice;
use crate::matrix::{identity, int};
use crate::transfer::TransferSystem;
use crate::zalg::{AdditiveMap, Element, FiniteRankAlgebra};
use std::collections::BTreeMap;
use std::sync::Arc;

pub fn constant_z_diagram(n: u64) -> Result<LewisDiagram> {
    let lattice = cyclic_lattice(n)?;
    let z = Arc::new(FiniteRankAlgebra::integers());
    let mut levels = BTreeMap::new();
    let mut weyl = BTreeMap::new();
    for &h in lattice.subgroups() {
        levels.insert(h, z.clone());
        weyl.insert(h, identity(1));
    }
    let complete = TransferSystem::complete(&lattice);
    let mut res = BTreeMap::new();
    let mut tr = BTreeMap::new();
    let mut nm = BTreeMap::new();
    for &(k, h) in complete.pairs() {
        let index = h / k;
        res.insert((k, h), AdditiveMap::identity(1));
        tr.insert((k, h), AdditiveMap::new(vec![vec![int(index as i64)]]));
        let alg = z.clone();
        nm.insert(
            (k, h),
            Norm::new(format!("power[{index}]"), move |x: &Element| {
                alg.pow(x, index)
            }),
        );
    }
    Ok(LewisDiagram {
        name: format!("constantZ(C_{n})"),
        kind: "constantZ".into(),
        lattice,
        levels,
        weyl,
        om: complete.pairs().clone(),
        oa: complete.pairs().clone(),
        res,
        tr,
        nm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Int;

    #[test]
    fn maps_match_fixed_point_formulas() {
        let d = constant_z_diagram(9).unwrap();
        // tr_1^p(k) = pk
        assert_eq!(d.transfer(1, 3).unwrap().rows, vec![vec![int(3)]]);
        // nm_1^p(2) = 2^3 = 8 at p = 3
        let nm = d.norm(1, 3).unwrap();
        assert_eq!(nm.apply(&Element::from_i64(&[2])).coeffs, vec![Int::from(8)]);
        // nm_1^{p^2}(k) = k^{p^2}
        let nm2 = d.norm(1, 9).unwrap();
        assert_eq!(
            nm2.apply(&Element::from_i64(&[2])).coeffs,
            vec![Int::from(512)]
        );
    }
}
