//! Finite-rank integer algebras and the HNF submodule calculus.
//!
//! Every level ring in scope is a commutative ring whose additive group is
//! `Z^r` (possibly with torsion moduli on some coordinates) and whose
//! multiplication is given by integer structure constants. Ideals are
//! represented as additive subgroups closed under multiplication by the
//! basis, stored as canonical Hermite normal forms, which makes membership,
//! sum, intersection, equality and preimages of additive maps decidable
//! exactly.

use crate::error::{Error, Result};
use crate::matrix::{self, apply, hnf, hnf_member, int, left_kernel, zero_row, Int, Row};
use num_traits::{One, Zero};
use serde::Serialize;
use std::fmt;
use std::sync::Arc;

/// A commutative ring of finite rank over the integers, given by structure
/// constants. A coordinate with a modulus `m` is a `Z/m` summand; `None`
/// marks a free coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteRankAlgebra {
    pub basis_names: Vec<String>,
    /// `mult_table[i][j]` = coordinates of `b_i * b_j`.
    pub mult_table: Vec<Vec<Row>>,
    /// Coordinates of the multiplicative unit.
    pub unit: Row,
    pub moduli: Vec<Option<Int>>,
    /// Mark homomorphisms (one column per subgroup of the level, ascending),
    /// present on Burnside-type level rings; used by the Dress leaf catalog
    /// and the closed-form norm maps.
    pub marks: Option<Marks>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Marks {
    /// Subgroup orders labelling the columns, ascending.
    pub subgroup_orders: Vec<u64>,
    /// `table[i][j]` = mark of basis element `i` at subgroup `j`.
    pub table: Vec<Row>,
}

pub type AlgebraRef = Arc<FiniteRankAlgebra>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Element {
    pub coeffs: Row,
}

impl Element {
    pub fn new(coeffs: Row) -> Self {
        Element { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Element {
            coeffs: coeffs.iter().map(|&c| int(c)).collect(),
        }
    }

    pub fn zero(rank: usize) -> Self {
        Element {
            coeffs: zero_row(rank),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl FiniteRankAlgebra {
    pub fn rank(&self) -> usize {
        self.basis_names.len()
    }

    pub fn new_free(basis_names: Vec<String>, mult_table: Vec<Vec<Row>>, unit: Row) -> Self {
        let rank = basis_names.len();
        FiniteRankAlgebra {
            basis_names,
            mult_table,
            unit,
            moduli: vec![None; rank],
            marks: None,
        }
    }

    /// The integers as a rank-1 algebra.
    pub fn integers() -> Self {
        FiniteRankAlgebra {
            basis_names: vec!["1".into()],
            mult_table: vec![vec![vec![Int::one()]]],
            unit: vec![Int::one()],
            moduli: vec![None],
            marks: Some(Marks {
                subgroup_orders: vec![1],
                table: vec![vec![Int::one()]],
            }),
        }
    }

    pub fn with_marks(mut self, subgroup_orders: Vec<u64>, table: Vec<Row>) -> Self {
        self.marks = Some(Marks {
            subgroup_orders,
            table,
        });
        self
    }

    /// Reduce a coordinate vector modulo the torsion moduli.
    pub fn reduce(&self, mut v: Row) -> Row {
        for (x, m) in v.iter_mut().zip(self.moduli.iter()) {
            if let Some(m) = m {
                *x = num_integer::Integer::mod_floor(&*x, m);
            }
        }
        v
    }

    pub fn unit_element(&self) -> Element {
        Element::new(self.unit.clone())
    }

    pub fn basis_element(&self, i: usize) -> Element {
        let mut v = zero_row(self.rank());
        v[i] = Int::one();
        Element::new(v)
    }

    pub fn add(&self, x: &Element, y: &Element) -> Element {
        let mut v = x.coeffs.clone();
        matrix::row_add(&mut v, &y.coeffs, &Int::one());
        Element::new(self.reduce(v))
    }

    pub fn sub(&self, x: &Element, y: &Element) -> Element {
        let mut v = x.coeffs.clone();
        matrix::row_add(&mut v, &y.coeffs, &Int::from(-1));
        Element::new(self.reduce(v))
    }

    pub fn scale(&self, c: &Int, x: &Element) -> Element {
        Element::new(self.reduce(x.coeffs.iter().map(|a| a * c).collect()))
    }

    pub fn mul(&self, x: &Element, y: &Element) -> Element {
        let mut out = zero_row(self.rank());
        for (i, xi) in x.coeffs.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.coeffs.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi * yj;
                matrix::row_add(&mut out, &self.mult_table[i][j], &c);
            }
        }
        Element::new(self.reduce(out))
    }

    pub fn pow(&self, x: &Element, e: u64) -> Element {
        let mut acc = self.unit_element();
        for _ in 0..e {
            acc = self.mul(&acc, x);
        }
        acc
    }

    pub fn equal_elements(&self, x: &Element, y: &Element) -> bool {
        self.reduce(x.coeffs.clone()) == self.reduce(y.coeffs.clone())
    }

    /// Structure-constant sanity: commutative, associative, unital. Checked
    /// exactly on all basis triples.
    pub fn check_ring_axioms(&self) -> Result<()> {
        let r = self.rank();
        for i in 0..r {
            for j in 0..r {
                let bi = self.basis_element(i);
                let bj = self.basis_element(j);
                if !self.equal_elements(&self.mul(&bi, &bj), &self.mul(&bj, &bi)) {
                    return Err(Error::Internal(format!(
                        "multiplication not commutative at basis ({i},{j})"
                    )));
                }
                for k in 0..r {
                    let bk = self.basis_element(k);
                    let left = self.mul(&self.mul(&bi, &bj), &bk);
                    let right = self.mul(&bi, &self.mul(&bj, &bk));
                    if !self.equal_elements(&left, &right) {
                        return Err(Error::Internal(format!(
                            "multiplication not associative at basis ({i},{j},{k})"
                        )));
                    }
                }
            }
            let b = self.basis_element(i);
            if !self.equal_elements(&self.mul(&self.unit_element(), &b), &b) {
                return Err(Error::Internal(format!("unit fails on basis {i}")));
            }
        }
        Ok(())
    }

    /// Rows spanning the torsion relations (`m_i * e_i` for each modulus).
    pub fn moduli_rows(&self) -> Vec<Row> {
        let mut rows = Vec::new();
        for (i, m) in self.moduli.iter().enumerate() {
            if let Some(m) = m {
                let mut r = zero_row(self.rank());
                r[i] = m.clone();
                rows.push(r);
            }
        }
        rows
    }

    pub fn is_free(&self) -> bool {
        self.moduli.iter().all(|m| m.is_none())
    }

    pub fn mark_column(&self, subgroup: u64) -> Option<Row> {
        let marks = self.marks.as_ref()?;
        let j = marks.subgroup_orders.iter().position(|&s| s == subgroup)?;
        Some(marks.table.iter().map(|row| row[j].clone()).collect())
    }

    pub fn display_element(&self, x: &Element) -> String {
        let mut terms = Vec::new();
        for (c, name) in x.coeffs.iter().zip(self.basis_names.iter()) {
            if c.is_zero() {
                continue;
            }
            let t = if name == "1" {
                c.to_string()
            } else if c.is_one() {
                name.clone()
            } else if (-c).is_one() {
                format!("-{name}")
            } else {
                format!("{c}{name}")
            };
            terms.push(t);
        }
        if terms.is_empty() {
            return "0".into();
        }
        let mut out = terms[0].clone();
        for t in &terms[1..] {
            if let Some(s) = t.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(s);
            } else {
                out.push_str(" + ");
                out.push_str(t);
            }
        }
        out
    }
}

/// An additive subgroup of an algebra, in canonical HNF. For torsion
/// algebras the moduli relations are always part of the span, so equality of
/// submodules is literal equality of the matrices.
#[derive(Debug, Clone, Serialize)]
pub struct Submodule {
    #[serde(skip)]
    pub algebra: AlgebraRef,
    pub hnf_basis: Vec<Row>,
}

impl PartialEq for Submodule {
    fn eq(&self, other: &Self) -> bool {
        self.hnf_basis == other.hnf_basis
    }
}
impl Eq for Submodule {}

impl fmt::Display for Submodule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "<0>");
        }
        write!(f, "<")?;
        for (i, row) in self.hnf_basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(
                f,
                "{}",
                self.algebra.display_element(&Element::new(row.clone()))
            )?;
        }
        write!(f, ">")
    }
}

impl Submodule {
    /// Additive span of the given rows (plus the torsion relations).
    pub fn from_rows(algebra: &AlgebraRef, rows: impl IntoIterator<Item = Row>) -> Self {
        let mut all: Vec<Row> = rows.into_iter().collect();
        all.extend(algebra.moduli_rows());
        Submodule {
            algebra: algebra.clone(),
            hnf_basis: hnf(&all, algebra.rank()),
        }
    }

    pub fn zero(algebra: &AlgebraRef) -> Self {
        Self::from_rows(algebra, Vec::<Row>::new())
    }

    pub fn full(algebra: &AlgebraRef) -> Self {
        Self::from_rows(algebra, matrix::identity(algebra.rank()))
    }

    pub fn is_zero(&self) -> bool {
        // For torsion algebras the zero submodule still carries the moduli rows.
        self.hnf_basis == hnf(&self.algebra.moduli_rows(), self.algebra.rank())
    }

    pub fn member(&self, v: &Element) -> bool {
        hnf_member(&self.hnf_basis, &self.algebra.reduce(v.coeffs.clone()))
    }

    fn check_same_ambient(&self, other: &Submodule) -> Result<()> {
        if self.algebra == other.algebra {
            Ok(())
        } else {
            Err(Error::MismatchedAmbient)
        }
    }

    pub fn sum(&self, other: &Submodule) -> Result<Submodule> {
        self.check_same_ambient(other)?;
        let rows: Vec<Row> = self
            .hnf_basis
            .iter()
            .chain(other.hnf_basis.iter())
            .cloned()
            .collect();
        Ok(Submodule::from_rows(&self.algebra, rows))
    }

    /// Intersection via the kernel of the stacked-basis relation.
    pub fn intersect(&self, other: &Submodule) -> Result<Submodule> {
        self.check_same_ambient(other)?;
        let a = &self.hnf_basis;
        let b = &other.hnf_basis;
        let mut stacked: Vec<Row> = a.clone();
        for row in b {
            stacked.push(row.iter().map(|x| -x).collect());
        }
        let ker = left_kernel(&stacked, self.algebra.rank());
        let rows: Vec<Row> = ker.iter().map(|k| apply(&k[..a.len()], a)).collect();
        Ok(Submodule::from_rows(&self.algebra, rows))
    }

    pub fn equal(&self, other: &Submodule) -> Result<bool> {
        self.check_same_ambient(other)?;
        Ok(self.hnf_basis == other.hnf_basis)
    }

    pub fn contains(&self, other: &Submodule) -> Result<bool> {
        self.check_same_ambient(other)?;
        Ok(other
            .hnf_basis
            .iter()
            .all(|row| hnf_member(&self.hnf_basis, row)))
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.member(&self.algebra.unit_element())
    }

    /// Is the span closed under multiplication by every basis element?
    pub fn is_absorbing(&self) -> bool {
        for row in &self.hnf_basis {
            for j in 0..self.algebra.rank() {
                let prod = self
                    .algebra
                    .mul(&Element::new(row.clone()), &self.algebra.basis_element(j));
                if !self.member(&prod) {
                    return false;
                }
            }
        }
        true
    }
}

/// The ideal generated by `gens`: the additive span of all products
/// `g * b_j`, iterated to closure. The algebra being module-finite over the
/// integers makes this a finite computation.
pub fn ideal_from_generators(algebra: &AlgebraRef, gens: &[Element]) -> Submodule {
    let mut current = Submodule::from_rows(algebra, gens.iter().map(|g| g.coeffs.clone()));
    loop {
        let mut rows = current.hnf_basis.clone();
        let mut grew = false;
        for row in &current.hnf_basis {
            for j in 0..algebra.rank() {
                let prod = algebra.mul(&Element::new(row.clone()), &algebra.basis_element(j));
                if !current.member(&prod) {
                    rows.push(prod.coeffs);
                    grew = true;
                }
            }
        }
        if !grew {
            return current;
        }
        current = Submodule::from_rows(algebra, rows);
    }
}

/// An additive map between algebras, as a matrix acting on coordinate rows:
/// `f(v) = v * rows`, with `rows[i]` the image of the `i`-th basis element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdditiveMap {
    pub rows: Vec<Row>,
}

impl AdditiveMap {
    pub fn new(rows: Vec<Row>) -> Self {
        AdditiveMap { rows }
    }

    pub fn identity(rank: usize) -> Self {
        AdditiveMap {
            rows: matrix::identity(rank),
        }
    }

    pub fn apply(&self, v: &Element) -> Element {
        Element::new(apply(&v.coeffs, &self.rows))
    }

    pub fn compose(&self, then: &AdditiveMap) -> AdditiveMap {
        AdditiveMap {
            rows: matrix::mat_mul(&self.rows, &then.rows),
        }
    }

    pub fn domain_rank(&self) -> usize {
        self.rows.len()
    }

    /// Image of a submodule: span of the images of its HNF basis.
    pub fn image_of(&self, codomain: &AlgebraRef, s: &Submodule) -> Submodule {
        Submodule::from_rows(codomain, s.hnf_basis.iter().map(|r| apply(r, &self.rows)))
    }

    /// Image of the whole domain.
    pub fn image(&self, codomain: &AlgebraRef) -> Submodule {
        Submodule::from_rows(codomain, self.rows.clone())
    }
}

/// `{ v : f(v) in s }`, computed by an exact integer kernel computation.
/// Only additive maps qualify; norm maps must not be passed here.
pub fn preimage(domain: &AlgebraRef, f: &AdditiveMap, s: &Submodule) -> Submodule {
    let dr = f.domain_rank();
    assert_eq!(dr, domain.rank(), "preimage: domain rank mismatch");
    let cod_rank = s.algebra.rank();
    // Solve v*M = w*B: kernel of [M; -B] stacked, projected to v.
    let mut stacked: Vec<Row> = f.rows.clone();
    let mut basis = s.hnf_basis.clone();
    basis.extend(s.algebra.moduli_rows());
    for row in &basis {
        stacked.push(row.iter().map(|x| -x).collect());
    }
    let ker = left_kernel(&stacked, cod_rank);
    let rows: Vec<Row> = ker.iter().map(|k| k[..dr].to_vec()).collect();
    Submodule::from_rows(domain, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Z[t]/(t^2 - p t): the Burnside ring of C_p in basis (1, t).
    pub fn burnside_cp_ring(p: i64) -> AlgebraRef {
        let one = vec![int(1), int(0)];
        let t = vec![int(0), int(1)];
        let t2 = vec![int(0), int(p)];
        Arc::new(FiniteRankAlgebra::new_free(
            vec!["1".into(), "t".into()],
            vec![vec![one.clone(), t.clone()], vec![t, t2]],
            one,
        ))
    }

    fn elem(v: &[i64]) -> Element {
        Element::from_i64(v)
    }

    #[test]
    fn ring_axioms_hold() {
        burnside_cp_ring(2).check_ring_axioms().unwrap();
    }

    #[test]
    fn ideal_generated_by_t_is_its_span() {
        let a = burnside_cp_ring(2);
        let i = ideal_from_generators(&a, &[elem(&[0, 1])]);
        // t*t = 2t stays in the span of t.
        assert_eq!(i.hnf_basis, vec![vec![int(0), int(1)]]);
    }

    #[test]
    fn ideal_q_t_additive_span() {
        let a = burnside_cp_ring(2);
        let i = ideal_from_generators(&a, &[elem(&[2, 0]), elem(&[0, 1])]);
        assert!(i.member(&elem(&[2, 0])));
        assert!(i.member(&elem(&[0, 1])));
        assert!(i.member(&elem(&[-2, 1]))); // t - 2 = t + (-1)*2
        assert!(!i.member(&elem(&[1, 0])));
        assert!(!i.is_unit_ideal());
    }

    #[test]
    fn intersect_principal_ideals_of_z() {
        let z = Arc::new(FiniteRankAlgebra::integers());
        let two = Submodule::from_rows(&z, vec![vec![int(2)]]);
        let three = Submodule::from_rows(&z, vec![vec![int(3)]]);
        let six = two.intersect(&three).unwrap();
        assert_eq!(six.hnf_basis, vec![vec![int(6)]]);
    }

    #[test]
    fn lemma_identification_p_t_equals_p_t_minus_p() {
        let a = burnside_cp_ring(2);
        let l = ideal_from_generators(&a, &[elem(&[2, 0]), elem(&[0, 1])]);
        let r = ideal_from_generators(&a, &[elem(&[2, 0]), elem(&[-2, 1])]);
        assert!(l.equal(&r).unwrap());
    }

    #[test]
    fn mismatched_ambient_rejected() {
        let a = burnside_cp_ring(2);
        let b = burnside_cp_ring(3);
        let i = Submodule::full(&a);
        let j = Submodule::full(&b);
        assert!(matches!(i.intersect(&j), Err(Error::MismatchedAmbient)));
    }

    #[test]
    fn preimage_of_restriction() {
        // res: A(C_p) -> Z, 1 -> 1, t -> p, with p = 2; S = <3>.
        let a = burnside_cp_ring(2);
        let z = Arc::new(FiniteRankAlgebra::integers());
        let res = AdditiveMap::new(vec![vec![int(1)], vec![int(2)]]);
        let s = Submodule::from_rows(&z, vec![vec![int(3)]]);
        let pre = preimage(&a, &res, &s);
        // Expected <3, t-2>: every a + 2b = 0 mod 3. Oracle: brute force.
        for x in -6i64..=6 {
            for y in -6i64..=6 {
                let inside = (x + 2 * y).rem_euclid(3) == 0;
                assert_eq!(pre.member(&elem(&[x, y])), inside, "({x},{y})");
            }
        }
        // Whole ring pulls back to the whole ring.
        let whole = preimage(&a, &res, &Submodule::full(&z));
        assert!(whole.equal(&Submodule::full(&a)).unwrap());
    }

    #[test]
    fn torsion_quotient_membership() {
        // Z/4: submodules contain the modulus row automatically.
        let zmod4 = Arc::new(FiniteRankAlgebra {
            basis_names: vec!["1".into()],
            mult_table: vec![vec![vec![int(1)]]],
            unit: vec![int(1)],
            moduli: vec![Some(int(4))],
            marks: None,
        });
        let zero = Submodule::zero(&zmod4);
        assert!(zero.member(&elem(&[4])));
        assert!(zero.member(&elem(&[-8])));
        assert!(!zero.member(&elem(&[2])));
        let two = Submodule::from_rows(&zmod4, vec![vec![int(2)]]);
        assert!(two.member(&elem(&[6])));
        assert!(!two.is_unit_ideal());
    }
}
