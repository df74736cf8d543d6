//! Burnside rings of cyclic groups and their Lewis diagrams.
//!
//! The level ring at `C_h` is the Burnside ring `A(C_h)` with basis the
//! orbits `[C_h/C_k]` for `k | h`, ordered by orbit size. Products,
//! restrictions and transfers follow orbit combinatorics; norms are
//! evaluated through the mark homomorphisms, where they diagonalize to
//! power maps. On `A(C_{p^2})` this reproduces the Mazur sum formula.

use crate::diagram::{LewisDiagram, Norm};
use crate::error::{Error, Result};
use crate::lattice::cyclic_lattice;
use crate::matrix::{identity, int, zero_row, Int, Row};
use crate::transfer::TransferSystem;
use crate::zalg::{AdditiveMap, AlgebraRef, Element, FiniteRankAlgebra};
use num_integer::Integer;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::sync::Arc;

fn divisors(h: u64) -> Vec<u64> {
    (1..=h).filter(|d| h % d == 0).collect()
}

fn orbit_name(ambient_is_prime_power: bool, size: u64) -> String {
    if size == 1 {
        return "1".into();
    }
    if ambient_is_prime_power {
        // chain naming: t, u, v for sizes p, p^2, p^3
        let mut s = size;
        let p = (2..).find(|&d| size % d == 0).unwrap();
        let mut e = 0;
        while s > 1 {
            s /= p;
            e += 1;
        }
        match e {
            1 => "t".into(),
            2 => "u".into(),
            3 => "v".into(),
            _ => format!("t{e}"),
        }
    } else {
        format!("x{size}")
    }
}

fn is_prime_power(mut n: u64) -> bool {
    let p = (2..).find(|&d| n % d == 0).unwrap_or(n);
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

/// The Burnside ring `A(C_h)` with marks, basis ordered by orbit size
/// ascending (so the unit `[C_h/C_h]` comes first).
pub fn burnside_level_algebra(h: u64, ambient: u64) -> AlgebraRef {
    let divs = divisors(h);
    // basis indexed by stabilizer order k, descending (orbit size ascending)
    let stabs: Vec<u64> = divs.iter().rev().copied().collect();
    let rank = stabs.len();
    let idx: BTreeMap<u64, usize> = stabs.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let names: Vec<String> = stabs
        .iter()
        .map(|&k| orbit_name(is_prime_power(ambient), h / k))
        .collect();
    let mut mult = vec![vec![zero_row(rank); rank]; rank];
    for (i, &k) in stabs.iter().enumerate() {
        for (j, &l) in stabs.iter().enumerate() {
            // [H/K][H/L] = (h / lcm(k, l)) * [H/(K ∩ L)]
            let m = k.gcd(&l);
            let count = h / k.lcm(&l);
            let mut row = zero_row(rank);
            row[idx[&m]] = int(count as i64);
            mult[i][j] = row;
        }
    }
    let mut unit = zero_row(rank);
    unit[idx[&h]] = int(1);
    // marks: columns = subgroups of C_h ascending; phi_L([H/K]) = h/k if l | k
    let marks_table: Vec<Row> = stabs
        .iter()
        .map(|&k| {
            divs.iter()
                .map(|&l| if k % l == 0 { int((h / k) as i64) } else { Int::zero() })
                .collect()
        })
        .collect();
    Arc::new(
        FiniteRankAlgebra::new_free(names, mult, unit).with_marks(divs.clone(), marks_table),
    )
}

/// Basis index of the orbit with stabilizer of order `k`.
fn orbit_index(h: u64, k: u64) -> usize {
    let divs = divisors(h);
    divs.iter().rev().position(|&d| d == k).unwrap()
}

/// Restriction `A(C_h) -> A(C_{h'})` for `h' | h`.
pub fn burnside_restriction(h_from: u64, h_to: u64) -> AdditiveMap {
    let divs_from = divisors(h_from);
    let rank_to = divisors(h_to).len();
    let rows: Vec<Row> = divs_from
        .iter()
        .rev()
        .map(|&k| {
            // [H/K] restricts to (h * gcd(k, h') / (k * h')) copies of [H'/(K ∩ H')]
            let m = k.gcd(&h_to);
            let count = h_from * m / (k * h_to);
            let mut row = zero_row(rank_to);
            row[orbit_index(h_to, m)] = int(count as i64);
            row
        })
        .collect();
    AdditiveMap::new(rows)
}

/// Transfer (induction) `A(C_{h'}) -> A(C_h)`: `[H'/K] -> [H/K]`.
pub fn burnside_transfer(h_from: u64, h_to: u64) -> AdditiveMap {
    let divs_from = divisors(h_from);
    let rank_to = divisors(h_to).len();
    let rows: Vec<Row> = divs_from
        .iter()
        .rev()
        .map(|&k| {
            let mut row = zero_row(rank_to);
            row[orbit_index(h_to, k)] = int(1);
            row
        })
        .collect();
    AdditiveMap::new(rows)
}

/// Solve the mark equations `x * M = marks` in a marks-carrying algebra.
/// The marks matrix is triangular over the divisor order, so this is exact
/// forward substitution; non-integral solutions are an internal error.
pub fn solve_marks(alg: &AlgebraRef, target: &[Int]) -> Result<Element> {
    let marks = alg
        .marks
        .as_ref()
        .ok_or_else(|| Error::Internal("algebra carries no marks".into()))?;
    let orders = &marks.subgroup_orders;
    let rank = alg.rank();
    assert_eq!(target.len(), orders.len());
    // Basis i has stabilizer order orders[rank-1-i] (orbit size ascending):
    // recover the stabilizer order of basis i as the largest L with nonzero mark.
    let stab_of = |i: usize| -> u64 {
        orders
            .iter()
            .enumerate()
            .rev()
            .find(|(j, _)| !marks.table[i][*j].is_zero())
            .map(|(_, &l)| l)
            .unwrap()
    };
    let mut x = zero_row(rank);
    // Solve in descending stabilizer order.
    let mut order_ix: Vec<usize> = (0..rank).collect();
    order_ix.sort_by_key(|&i| std::cmp::Reverse(stab_of(i)));
    for &i in &order_ix {
        let k = stab_of(i);
        let col = orders.iter().position(|&l| l == k).unwrap();
        let mut rhs = target[col].clone();
        for j in 0..rank {
            if j != i && !x[j].is_zero() && !marks.table[j][col].is_zero() {
                rhs -= &x[j] * &marks.table[j][col];
            }
        }
        let (q, r) = rhs.div_rem(&marks.table[i][col]);
        if !r.is_zero() {
            return Err(Error::Internal(format!(
                "mark system has no integral solution at subgroup {k}"
            )));
        }
        x[i] = q;
    }
    Ok(Element::new(x))
}

pub fn marks_of(alg: &AlgebraRef, x: &Element) -> Vec<Int> {
    let marks = alg.marks.as_ref().expect("marks");
    (0..marks.subgroup_orders.len())
        .map(|j| {
            x.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * &marks.table[i][j])
                .sum()
        })
        .collect()
}

fn big_pow(base: &Int, exp: u64) -> Int {
    let mut acc = Int::from(1);
    let mut e = exp;
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    acc
}

/// Norm `A(C_{h'}) -> A(C_h)` through marks:
/// `phi_L(nm(x)) = phi_{H' ∩ L}(x)^{[H : H'L]}`.
pub fn burnside_norm(from: &AlgebraRef, to: &AlgebraRef, h_from: u64, h_to: u64) -> Norm {
    let from = from.clone();
    let to = to.clone();
    Norm::new(format!("burnside-marks[{h_from},{h_to}]"), move |x| {
        let src_marks = marks_of(&from, x);
        let src_orders = &from.marks.as_ref().unwrap().subgroup_orders;
        let to_orders = to.marks.as_ref().unwrap().subgroup_orders.clone();
        let target: Vec<Int> = to_orders
            .iter()
            .map(|&l| {
                let m = h_from.gcd(&l);
                let col = src_orders.iter().position(|&s| s == m).unwrap();
                let exp = h_to / h_from.lcm(&l);
                big_pow(&src_marks[col], exp)
            })
            .collect();
        solve_marks(&to, &target).expect("burnside norm is integral")
    })
}

/// The complete Burnside Lewis diagram over `C_n` (all transfers and norms).
pub fn burnside_diagram(n: u64) -> Result<LewisDiagram> {
    let lattice = cyclic_lattice(n)?;
    let mut levels = BTreeMap::new();
    let mut weyl = BTreeMap::new();
    for &h in lattice.subgroups() {
        let alg = burnside_level_algebra(h, n);
        weyl.insert(h, identity(alg.rank()));
        levels.insert(h, alg);
    }
    let complete = TransferSystem::complete(&lattice);
    let mut res = BTreeMap::new();
    let mut tr = BTreeMap::new();
    let mut nm = BTreeMap::new();
    for &(k, h) in complete.pairs() {
        res.insert((k, h), burnside_restriction(h, k));
        tr.insert((k, h), burnside_transfer(k, h));
        nm.insert((k, h), burnside_norm(&levels[&k], &levels[&h], k, h));
    }
    Ok(LewisDiagram {
        name: format!("burnside(C_{n})"),
        kind: "burnside".into(),
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

pub fn check_burnside_group(n: u64) -> Result<()> {
    let lat = cyclic_lattice(n)?;
    let primes: Vec<u64> = {
        let mut m = n;
        let mut ps = Vec::new();
        let mut d = 2;
        while d * d <= m {
            if m % d == 0 {
                ps.push(d);
                while m % d == 0 {
                    m /= d;
                }
            }
            d += 1;
        }
        if m > 1 {
            ps.push(m);
        }
        ps
    };
    let ok = matches!(
        (primes.len(), lat.subgroups().len()),
        (1, 2) | (1, 3) | (2, 4)
    );
    if !ok {
        return Err(Error::Unsupported(format!(
            "burnside diagrams are built for C_p, C_p^2 and C_pq; got C_{n}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::int;

    #[test]
    fn cp_level_ring_is_z_t_mod_t2_minus_pt() {
        let a = burnside_level_algebra(2, 2);
        assert_eq!(a.basis_names, vec!["1", "t"]);
        // t * t = 2t
        assert_eq!(a.mult_table[1][1], vec![int(0), int(2)]);
    }

    #[test]
    fn cp2_level_ring_relations() {
        let a = burnside_level_algebra(4, 4);
        assert_eq!(a.basis_names, vec!["1", "t", "u"]);
        let t = 1;
        let u = 2;
        assert_eq!(a.mult_table[t][t], vec![int(0), int(2), int(0)]); // t^2 = pt
        assert_eq!(a.mult_table[u][u], vec![int(0), int(0), int(4)]); // u^2 = p^2 u
        assert_eq!(a.mult_table[t][u], vec![int(0), int(0), int(2)]); // tu = pu
    }

    #[test]
    fn restriction_formulas() {
        // res_p^{p^2}: t -> p, u -> pt  (p = 2)
        let res = burnside_restriction(4, 2);
        assert_eq!(res.rows[1], vec![int(2), int(0)]);
        assert_eq!(res.rows[2], vec![int(0), int(2)]);
        // res_1^{p^2}: marks at e: t -> 2, u -> 4
        let res = burnside_restriction(4, 1);
        assert_eq!(res.rows[1], vec![int(2)]);
        assert_eq!(res.rows[2], vec![int(4)]);
    }

    #[test]
    fn transfer_formulas() {
        // tr_p^{p^2}: 1 -> t, t -> u
        let tr = burnside_transfer(2, 4);
        assert_eq!(tr.rows[0], vec![int(0), int(1), int(0)]);
        assert_eq!(tr.rows[1], vec![int(0), int(0), int(1)]);
    }

    #[test]
    fn norm_of_integers_matches_fraction_formula() {
        // nm_1^p(k) = k + (k^p - k)/p * t at p = 2: nm(3) = 3 + 3t.
        let z = Arc::new(FiniteRankAlgebra::integers());
        let acp = burnside_level_algebra(2, 2);
        let nm = burnside_norm(&z, &acp, 1, 2);
        assert_eq!(nm.apply(&Element::from_i64(&[3])).coeffs, vec![int(3), int(3)]);
        // p = 3: nm(2) = 2 + 2t
        let acp3 = burnside_level_algebra(3, 3);
        let nm3 = burnside_norm(&z, &acp3, 1, 3);
        assert_eq!(nm3.apply(&Element::from_i64(&[2])).coeffs, vec![int(2), int(2)]);
    }

    #[test]
    fn norm_p_to_p2_matches_paper_diagram() {
        // nm_p^{p^2}(t) = p^{p-2} u: at p = 2 this is u, at p = 3 it is 3u.
        let acp = burnside_level_algebra(2, 4);
        let acp2 = burnside_level_algebra(4, 4);
        let nm = burnside_norm(&acp, &acp2, 2, 4);
        assert_eq!(
            nm.apply(&Element::from_i64(&[0, 1])).coeffs,
            vec![int(0), int(0), int(1)]
        );
        let bcp = burnside_level_algebra(3, 9);
        let bcp2 = burnside_level_algebra(9, 9);
        let nm3 = burnside_norm(&bcp, &bcp2, 3, 9);
        assert_eq!(
            nm3.apply(&Element::from_i64(&[0, 1])).coeffs,
            vec![int(0), int(0), int(3)]
        );
    }

    #[test]
    fn norm_agrees_with_mazur_sum_formula() {
        // nm_p^{p^2}(a + bt) = nm(a) + nm(b) p^{p-2} u + sum_{i+j=p, i,j>0} tr(a^i b^j t^j)
        // with nm(c) = c + (c^p - c)/p * t for integers c.
        for p in [2i64, 3] {
            let h = (p * p) as u64;
            let acp = burnside_level_algebra(p as u64, h);
            let acp2 = burnside_level_algebra(h, h);
            let nm = burnside_norm(&acp, &acp2, p as u64, h);
            let tr = burnside_transfer(p as u64, h);
            for a in -3i64..=3 {
                for b in -3i64..=3 {
                    let int_norm = |c: i64| -> Element {
                        let t_coeff = (c.pow(p as u32) - c) / p;
                        Element::from_i64(&[c, t_coeff, 0])
                    };
                    let mut expect = int_norm(a);
                    let pw = p.pow((p - 2) as u32);
                    let nmb = int_norm(b);
                    let scaled = acp2.scale(&int(pw), &acp2.mul(&nmb, &Element::from_i64(&[0, 0, 1])));
                    expect = acp2.add(&expect, &scaled);
                    for i in 1..p {
                        let j = p - i;
                        // a^i b^j t^j at the C_p level
                        let mut term = acp.unit_element();
                        term = acp.scale(&int(a.pow(i as u32) * b.pow(j as u32)), &term);
                        let t = Element::from_i64(&[0, 1]);
                        for _ in 0..j {
                            term = acp.mul(&term, &t);
                        }
                        expect = acp2.add(&expect, &tr.apply(&term));
                    }
                    let got = nm.apply(&Element::from_i64(&[a, b]));
                    assert_eq!(got.coeffs, expect.coeffs, "p={p}, a={a}, b={b}");
                }
            }
        }
    }

    #[test]
    fn cpq_top_level_names_and_products() {
        let a = burnside_level_algebra(6, 6);
        assert_eq!(a.basis_names, vec!["1", "x2", "x3", "x6"]);
        // x2 * x3 = x6 (free product of coprime-index orbits)
        assert_eq!(
            a.mult_table[1][2],
            vec![int(0), int(0), int(0), int(1)]
        );
    }
}
