//! Geometric fixed points and the ghost of a two-level diagram.
//!
//! For a diagram with levels `K < H`, the geometric fixed points are the top
//! ring modulo the image of the transfer (an ideal by Frobenius
//! reciprocity), presented through Smith normal form with torsion moduli.
//! The ghost replaces the top level by `R^W x Phi` with restriction the
//! projection, transfer the orbit sum into the first factor, and norm the
//! orbit product paired with the norm modulo transfers. The ghost map is the
//! identity at the bottom and `(res, quotient)` on top.

use crate::diagram::{random_element, LewisDiagram, Norm};
use crate::error::{Error, Result};
use crate::matrix::{identity, left_kernel, mat_pow, smith_diagonal, zero_row, Int, Row};
use crate::zalg::{AdditiveMap, AlgebraRef, Element, FiniteRankAlgebra, Submodule};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

/// The two level orders of a two-level diagram, `(bottom, top)`.
pub fn two_levels(diagram: &LewisDiagram) -> Result<(u64, u64)> {
    let orders = diagram.level_orders();
    if orders.len() != 2 {
        return Err(Error::Unsupported(format!(
            "expected a two-level diagram, got levels {orders:?}"
        )));
    }
    Ok((orders[0], orders[1]))
}

/// Quotient of `alg` by the span of `relations`: canonical presentation via
/// Smith normal form, unit-moduli coordinates dropped, torsion recorded per
/// coordinate. Returns the quotient algebra, the quotient map, and a
/// section lifting quotient basis vectors.
pub fn quotient_algebra(
    alg: &AlgebraRef,
    relations: &[Row],
) -> Result<(AlgebraRef, AdditiveMap, AdditiveMap)> {
    let r = alg.rank();
    let mut rel: Vec<Row> = relations.to_vec();
    rel.extend(alg.moduli_rows());
    let (d, t, t_inv) = smith_diagonal(&rel, r);
    let kept: Vec<usize> = (0..r).filter(|&i| !d[i].is_one()).collect();
    let quot_rows: Vec<Row> = (0..r)
        .map(|i| kept.iter().map(|&j| t[i][j].clone()).collect())
        .collect();
    let quotient = AdditiveMap::new(quot_rows);
    let lift_rows: Vec<Row> = kept.iter().map(|&j| t_inv[j].clone()).collect();
    let lift = AdditiveMap::new(lift_rows);
    let moduli: Vec<Option<Int>> = kept
        .iter()
        .map(|&i| if d[i].is_zero() { None } else { Some(d[i].clone()) })
        .collect();
    let unit = quotient.apply(&alg.unit_element());
    let names: Vec<String> = if kept.len() == 1 && unit.coeffs[0].is_one() {
        vec!["1".into()]
    } else {
        (0..kept.len()).map(|i| format!("e{i}")).collect()
    };
    let reduce = |mut v: Row| -> Row {
        for (x, m) in v.iter_mut().zip(moduli.iter()) {
            if let Some(m) = m {
                *x = num_integer::Integer::mod_floor(&*x, m);
            }
        }
        v
    };
    let mut mult = vec![vec![zero_row(kept.len()); kept.len()]; kept.len()];
    for (a, mult_row) in mult.iter_mut().enumerate() {
        for (b, entry) in mult_row.iter_mut().enumerate() {
            let la = Element::new(lift.rows[a].clone());
            let lb = Element::new(lift.rows[b].clone());
            let prod = alg.mul(&la, &lb);
            *entry = reduce(quotient.apply(&prod).coeffs);
        }
    }
    let quo = Arc::new(FiniteRankAlgebra {
        basis_names: names,
        mult_table: mult,
        unit: reduce(unit.coeffs),
        moduli,
        marks: None,
    });
    quo.check_ring_axioms()?;
    Ok((quo, quotient, lift))
}

/// Geometric fixed points of a two-level diagram: the top ring modulo the
/// image of the transfer. Returns `(Phi, quotient map, transfer image)`.
pub fn geometric_fixed_points(
    diagram: &LewisDiagram,
) -> Result<(AlgebraRef, AdditiveMap, Submodule)> {
    let (bottom, top) = two_levels(diagram)?;
    let top_alg = diagram.level(top)?.clone();
    let tr = diagram.transfer(bottom, top)?;
    let tau = tr.image(&top_alg);
    if !tau.is_absorbing() {
        return Err(Error::Internal(
            "transfer image is not an ideal (Frobenius violated)".into(),
        ));
    }
    let (phi, quotient, _lift) = quotient_algebra(&top_alg, &tau.hnf_basis)?;
    Ok((phi, quotient, tau))
}

/// The fixed subring of `alg` under the cyclic action generated by `weyl`:
/// its basis is an HNF basis of the fixed lattice. Marks are inherited when
/// the action is trivial.
pub fn fixed_subring(alg: &AlgebraRef, weyl: &[Row]) -> Result<(AlgebraRef, AdditiveMap)> {
    let r = alg.rank();
    if crate::matrix::mat_eq_identity(weyl) {
        return Ok((alg.clone(), AdditiveMap::identity(r)));
    }
    if !alg.is_free() {
        return Err(Error::Unsupported(
            "fixed subring of a torsion algebra with nontrivial action".into(),
        ));
    }
    let mut w_minus_id: Vec<Row> = weyl.to_vec();
    for (i, row) in w_minus_id.iter_mut().enumerate() {
        row[i] -= Int::one();
    }
    let basis = left_kernel(&w_minus_id, r);
    let inclusion = AdditiveMap::new(basis.clone());
    let width = r;
    let express = |v: &Element| -> Result<Element> {
        crate::matrix::express_in_rows(&basis, width, &v.coeffs)
            .map(Element::new)
            .ok_or_else(|| Error::Internal("element is not in the fixed subring".into()))
    };
    let rank_f = basis.len();
    let mut mult = vec![vec![zero_row(rank_f); rank_f]; rank_f];
    for a in 0..rank_f {
        for b in 0..rank_f {
            let prod = alg.mul(
                &Element::new(basis[a].clone()),
                &Element::new(basis[b].clone()),
            );
            mult[a][b] = express(&prod)?.coeffs;
        }
    }
    let unit = express(&alg.unit_element())?;
    let fixed = Arc::new(FiniteRankAlgebra {
        basis_names: (0..rank_f).map(|i| format!("f{i}")).collect(),
        mult_table: mult,
        unit: unit.coeffs,
        moduli: vec![None; rank_f],
        marks: None,
    });
    fixed.check_ring_axioms()?;
    Ok((fixed, inclusion))
}

/// Product of two algebras, blockwise.
pub fn product_algebra(a: &AlgebraRef, b: &AlgebraRef) -> AlgebraRef {
    let ra = a.rank();
    let rb = b.rank();
    let rank = ra + rb;
    let embed_a = |row: &Row| -> Row {
        let mut v = zero_row(rank);
        v[..ra].clone_from_slice(row);
        v
    };
    let embed_b = |row: &Row| -> Row {
        let mut v = zero_row(rank);
        v[ra..].clone_from_slice(row);
        v
    };
    let mut mult = vec![vec![zero_row(rank); rank]; rank];
    for i in 0..ra {
        for j in 0..ra {
            mult[i][j] = embed_a(&a.mult_table[i][j]);
        }
    }
    for i in 0..rb {
        for j in 0..rb {
            mult[ra + i][ra + j] = embed_b(&b.mult_table[i][j]);
        }
    }
    let mut unit = embed_a(&a.unit);
    unit[ra..].clone_from_slice(&b.unit);
    let names = a
        .basis_names
        .iter()
        .cloned()
        .chain(b.basis_names.iter().map(|n| format!("{n}~")))
        .collect();
    let moduli = a.moduli.iter().cloned().chain(b.moduli.iter().cloned()).collect();
    Arc::new(FiniteRankAlgebra {
        basis_names: names,
        mult_table: mult,
        unit,
        moduli,
        marks: None,
    })
}

/// Block-diagonal lattice rows `(a_rows x b_rows)` inside a product algebra.
pub fn product_lattice_rows(rank_a: usize, rank_b: usize, a_rows: &[Row], b_rows: &[Row]) -> Vec<Row> {
    let rank = rank_a + rank_b;
    let mut rows = Vec::new();
    for r in a_rows {
        let mut v = zero_row(rank);
        v[..rank_a].clone_from_slice(r);
        rows.push(v);
    }
    for r in b_rows {
        let mut v = zero_row(rank);
        v[rank_a..].clone_from_slice(r);
        rows.push(v);
    }
    rows
}

#[derive(Debug, Clone)]
pub struct GhostDiagram {
    pub base: LewisDiagram,
    pub ghost: LewisDiagram,
    pub bottom: u64,
    pub top: u64,
    pub fixed_algebra: AlgebraRef,
    pub phi_algebra: AlgebraRef,
    /// Inclusion of the fixed subring into the bottom level.
    pub fixed_inclusion: AdditiveMap,
    /// Quotient map from the base top level onto the geometric fixed points.
    pub phi_quotient: AdditiveMap,
    pub transfer_image: Submodule,
    /// Top component of the ghost map `(res, quotient)`.
    pub ghost_map_top: AdditiveMap,
    /// The ring map `R -> Phi` induced by the norm (additive modulo the
    /// transfer image by Tambara reciprocity).
    pub norm_ring_map: AdditiveMap,
}

/// Build the ghost of a two-level diagram with complete structure maps.
pub fn ghost(diagram: &LewisDiagram) -> Result<GhostDiagram> {
    let (bottom, top) = two_levels(diagram)?;
    let r_alg = diagram.level(bottom)?.clone();
    let weyl = diagram.weyl[&bottom].clone();
    let weyl_order = diagram.weyl_order(bottom);
    let (fixed_alg, fixed_inc) = fixed_subring(&r_alg, &weyl)?;
    let (phi_alg, phi_quot, tau) = geometric_fixed_points(diagram)?;
    let base_nm = diagram.norm(bottom, top)?;
    let base_res = diagram.restriction(bottom, top)?;

    let rank_f = fixed_alg.rank();
    let rank_phi = phi_alg.rank();
    let ghost_top = product_algebra(&fixed_alg, &phi_alg);

    let express_fixed = {
        let basis = fixed_inc.rows.clone();
        let width = r_alg.rank();
        move |v: &Element| -> Result<Row> {
            crate::matrix::express_in_rows(&basis, width, &v.coeffs)
                .ok_or_else(|| Error::Internal("value is not Weyl-fixed".into()))
        }
    };

    // res: projection onto the fixed subring, included into R.
    let mut res_rows: Vec<Row> = fixed_inc.rows.clone();
    res_rows.extend(vec![zero_row(r_alg.rank()); rank_phi]);
    let ghost_res = AdditiveMap::new(res_rows);

    // tr: orbit sum into the fixed factor.
    let mut orbit_sum = vec![zero_row(r_alg.rank()); r_alg.rank()];
    for e in 0..weyl_order {
        let pw = mat_pow(&weyl, e);
        for (i, row) in pw.iter().enumerate() {
            crate::matrix::row_add(&mut orbit_sum[i], row, &Int::one());
        }
    }
    let mut tr_rows = Vec::new();
    for row in &orbit_sum {
        let coeffs = express_fixed(&Element::new(row.clone()))?;
        let mut v = zero_row(rank_f + rank_phi);
        v[..rank_f].clone_from_slice(&coeffs);
        tr_rows.push(v);
    }
    let ghost_tr = AdditiveMap::new(tr_rows);

    // nm: orbit product in the fixed factor, norm mod tau in Phi.
    let ghost_nm = {
        let r_alg = r_alg.clone();
        let weyl = weyl.clone();
        let base_nm = base_nm.clone();
        let phi_quot = phi_quot.clone();
        let fixed_basis = fixed_inc.rows.clone();
        let width = r_alg.rank();
        let ghost_top = ghost_top.clone();
        Norm::new("ghost-norm", move |x: &Element| {
            let mut prod = r_alg.unit_element();
            for e in 0..weyl_order {
                let pw = AdditiveMap::new(mat_pow(&weyl, e));
                prod = r_alg.mul(&prod, &pw.apply(x));
            }
            let fixed_coeffs = crate::matrix::express_in_rows(&fixed_basis, width, &prod.coeffs)
                .expect("orbit product is Weyl-fixed");
            let phi_part = phi_quot.apply(&base_nm.apply(x));
            let mut v = fixed_coeffs;
            v.extend(phi_part.coeffs);
            Element::new(ghost_top.reduce(v))
        })
    };

    // ghost map on top: (res, quotient).
    let mut gm_rows = Vec::new();
    for i in 0..diagram.level(top)?.rank() {
        let b = diagram.level(top)?.basis_element(i);
        let restricted = base_res.apply(&b);
        let coeffs = express_fixed(&restricted)?;
        let mut v = zero_row(rank_f + rank_phi);
        v[..rank_f].clone_from_slice(&coeffs);
        v[rank_f..].clone_from_slice(&phi_quot.apply(&b).coeffs);
        gm_rows.push(v);
    }
    let ghost_map_top = AdditiveMap::new(gm_rows);

    // The ring map R -> Phi induced by the norm; audit additivity mod tau.
    let norm_ring_rows: Vec<Row> = (0..r_alg.rank())
        .map(|i| phi_quot.apply(&base_nm.apply(&r_alg.basis_element(i))).coeffs)
        .map(|v| phi_alg.reduce(v))
        .collect();
    let norm_ring_map = AdditiveMap::new(norm_ring_rows);
    let mut rng = ChaCha8Rng::seed_from_u64(0x9c);
    for _ in 0..64 {
        let x = random_element(&r_alg, &mut rng, 5);
        let y = random_element(&r_alg, &mut rng, 5);
        let lhs = phi_quot.apply(&base_nm.apply(&r_alg.add(&x, &y)));
        let rhs = phi_alg.add(
            &phi_quot.apply(&base_nm.apply(&x)),
            &phi_quot.apply(&base_nm.apply(&y)),
        );
        if !phi_alg.equal_elements(&lhs, &rhs) {
            return Err(Error::Internal(
                "norm is not additive modulo the transfer image".into(),
            ));
        }
    }

    let mut levels = BTreeMap::new();
    levels.insert(bottom, r_alg.clone());
    levels.insert(top, ghost_top.clone());
    let mut weyl_map = BTreeMap::new();
    weyl_map.insert(bottom, weyl.clone());
    weyl_map.insert(top, identity(ghost_top.rank()));
    let mut res = BTreeMap::new();
    res.insert((bottom, top), ghost_res);
    let mut tr = BTreeMap::new();
    tr.insert((bottom, top), ghost_tr);
    let mut nm = BTreeMap::new();
    nm.insert((bottom, top), ghost_nm);
    let ghost_diagram = LewisDiagram {
        name: format!("ghost({})", diagram.name),
        kind: "ghost".into(),
        lattice: diagram.lattice.clone(),
        levels,
        weyl: weyl_map,
        om: [(bottom, top)].into(),
        oa: [(bottom, top)].into(),
        res,
        tr,
        nm,
    };
    Ok(GhostDiagram {
        base: diagram.clone(),
        ghost: ghost_diagram,
        bottom,
        top,
        fixed_algebra: fixed_alg,
        phi_algebra: phi_alg,
        fixed_inclusion: fixed_inc,
        phi_quotient: phi_quot,
        transfer_image: tau,
        ghost_map_top,
        norm_ring_map,
    })
}

impl GhostDiagram {
    /// The ghost map is a map of Tambara functors: it intertwines res and tr
    /// exactly (matrix identities) and nm on seeded samples.
    pub fn check_ghost_map(&self, samples: usize, seed: u64) -> Result<()> {
        let base_res = self.base.restriction(self.bottom, self.top)?;
        let ghost_res = self.ghost.restriction(self.bottom, self.top)?;
        if self.ghost_map_top.compose(&ghost_res).rows != base_res.rows {
            return Err(Error::Internal("ghost map does not intertwine res".into()));
        }
        let base_tr = self.base.transfer(self.bottom, self.top)?;
        let ghost_tr = self.ghost.transfer(self.bottom, self.top)?;
        if base_tr.compose(&self.ghost_map_top).rows != ghost_tr.rows {
            return Err(Error::Internal("ghost map does not intertwine tr".into()));
        }
        let base_nm = self.base.norm(self.bottom, self.top)?;
        let ghost_nm = self.ghost.norm(self.bottom, self.top)?;
        let r_alg = self.base.level(self.bottom)?;
        let top_alg = self.ghost.level(self.top)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let x = random_element(r_alg, &mut rng, 5);
            let lhs = self.ghost_map_top.apply(&base_nm.apply(&x));
            let rhs = ghost_nm.apply(&x);
            if !top_alg.equal_elements(&lhs, &rhs) {
                return Err(Error::Internal(format!(
                    "ghost map does not intertwine nm at x = {}",
                    r_alg.display_element(&x)
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::burnside::burnside_diagram;
    use crate::construct::constant_z::constant_z_diagram;
    use crate::matrix::int;

    #[test]
    fn phi_of_burnside_cp_is_z() {
        let d = burnside_diagram(2).unwrap();
        let (phi, quot, _) = geometric_fixed_points(&d).unwrap();
        assert_eq!(phi.rank(), 1);
        assert!(phi.moduli[0].is_none());
        // t maps to 0, 1 maps to 1
        assert_eq!(quot.rows[0], vec![int(1)]);
        assert_eq!(quot.rows[1], vec![int(0)]);
    }

    #[test]
    fn phi_of_constant_z_cp_is_z_mod_p() {
        let d = constant_z_diagram(3).unwrap();
        let two_level = d
            .restrict_component(&crate::transfer::Component {
                members: [1u64, 3].into(),
                minimum: Some(1),
            })
            .unwrap();
        let (phi, _, _) = geometric_fixed_points(&two_level).unwrap();
        assert_eq!(phi.rank(), 1);
        assert_eq!(phi.moduli[0], Some(int(3)));
    }

    #[test]
    fn ghost_of_burnside_cp_has_z_times_z_top() {
        let d = burnside_diagram(2).unwrap();
        let g = ghost(&d).unwrap();
        assert_eq!(g.ghost.level(2).unwrap().rank(), 2);
        g.check_ghost_map(100, 1).unwrap();
        // ghost top component of t: (res(t), t mod tau) = (2, 0)
        let img = g.ghost_map_top.apply(&Element::from_i64(&[0, 1]));
        assert_eq!(img.coeffs, vec![int(2), int(0)]);
        g.ghost.axiom_suite(60, 5).unwrap();
    }
}
