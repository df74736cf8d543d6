//! Generalized products, the Q-condition and bounded primality refutation.
//!
//! A generalized product of `x` at level `H1` and `y` at level `H2` is a
//! product of multiplicative translates `nm ∘ conj ∘ res` of the two
//! elements landing at a common level admitting both norms. An ideal is
//! prime when membership of all generalized products of a pair forces
//! membership of one of the elements; a bounded search over coefficient
//! boxes can refute primality but never prove it.

use crate::diagram::{grid_elements, LewisDiagram};
use crate::error::{Error, Result};
use crate::spectra::ideal::TambaraIdeal;
use crate::zalg::{AdditiveMap, Element};
use std::collections::BTreeMap;

/// All multiplicative translates of `x` (at level `h`), grouped by target
/// level: `nm^L_K(conj^w(res^h_K(x)))` over present `K <= h`, Weyl powers
/// `w`, and levels `L` with `(K, L)` an admissible norm.
pub fn multiplicative_translates(
    diagram: &LewisDiagram,
    h: u64,
    x: &Element,
) -> Result<BTreeMap<u64, Vec<Element>>> {
    let mut out: BTreeMap<u64, Vec<Element>> = BTreeMap::new();
    for k in diagram.sublevels(h) {
        let res = diagram.restriction(k, h)?;
        let restricted = res.apply(x);
        let weyl_range = if diagram.weyl_is_trivial(k) {
            1
        } else {
            diagram.weyl_order(k)
        };
        for l in diagram.level_orders() {
            if !diagram.admits_norm(k, l) {
                continue;
            }
            let nm = diagram.norm(k, l)?;
            for w in 0..weyl_range {
                let conj = AdditiveMap::new(diagram.weyl_power(k, w));
                out.entry(l).or_default().push(nm.apply(&conj.apply(&restricted)));
            }
        }
    }
    Ok(out)
}

/// The generalized products of `(x at h1)` and `(y at h2)`, in a
/// deterministic order: `(level, product)` pairs.
pub fn generalized_products(
    diagram: &LewisDiagram,
    h1: u64,
    x: &Element,
    h2: u64,
    y: &Element,
) -> Result<Vec<(u64, Element)>> {
    let tx = multiplicative_translates(diagram, h1, x)?;
    let ty = multiplicative_translates(diagram, h2, y)?;
    let mut out = Vec::new();
    for (l, xs) in &tx {
        let Some(ys) = ty.get(l) else { continue };
        let alg = diagram.level(*l)?;
        for a in xs {
            for b in ys {
                out.push((*l, alg.mul(a, b)));
            }
        }
    }
    Ok(out)
}

/// The proposition `Q(I, x, y)`: every generalized product is a member of
/// the ideal at its level.
pub fn q_condition(
    diagram: &LewisDiagram,
    ideal: &TambaraIdeal,
    h1: u64,
    x: &Element,
    h2: u64,
    y: &Element,
) -> Result<bool> {
    let tx = multiplicative_translates(diagram, h1, x)?;
    let ty = multiplicative_translates(diagram, h2, y)?;
    for (l, xs) in &tx {
        let Some(ys) = ty.get(l) else { continue };
        let alg = diagram.level(*l)?;
        let s = ideal.level(*l);
        for a in xs {
            for b in ys {
                if !s.member(&alg.mul(a, b)) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// A primality refutation witness: both elements outside the ideal, yet all
/// generalized products inside.
#[derive(Debug, Clone)]
pub struct RefutationWitness {
    pub level_x: u64,
    pub x: Element,
    pub level_y: u64,
    pub y: Element,
}

/// Exhaustive search over coefficient boxes `[-bound, bound]` at all level
/// pairs. Returns the first witness in a deterministic order; `None` means
/// no witness at this bound, which is evidence (never proof) of primality.
pub fn refute_primality(
    diagram: &LewisDiagram,
    ideal: &TambaraIdeal,
    bound: i64,
) -> Result<Option<RefutationWitness>> {
    if !ideal.is_proper() {
        return Err(Error::InvalidInput(
            "refutation requires a proper ideal".into(),
        ));
    }
    let levels = diagram.level_orders();
    // Precompute candidates and their translates per level.
    let mut candidates: BTreeMap<u64, Vec<(Element, BTreeMap<u64, Vec<Element>>)>> =
        BTreeMap::new();
    for &h in &levels {
        let alg = diagram.level(h)?;
        let s = ideal.level(h);
        let mut list = Vec::new();
        for coeffs in grid_elements(alg.rank(), bound) {
            let x = Element::from_i64(&coeffs);
            if s.member(&x) {
                continue;
            }
            let tx = multiplicative_translates(diagram, h, &x)?;
            list.push((x, tx));
        }
        candidates.insert(h, list);
    }
    for &h1 in &levels {
        for &h2 in &levels {
            if h2 < h1 {
                continue;
            }
            for (x, tx) in &candidates[&h1] {
                for (y, ty) in &candidates[&h2] {
                    let mut all_in = true;
                    'outer: for (l, xs) in tx {
                        let Some(ys) = ty.get(l) else { continue };
                        let alg = diagram.level(*l)?;
                        let s = ideal.level(*l);
                        for a in xs {
                            for b in ys {
                                if !s.member(&alg.mul(a, b)) {
                                    all_in = false;
                                    break 'outer;
                                }
                            }
                        }
                    }
                    if all_in {
                        return Ok(Some(RefutationWitness {
                            level_x: h1,
                            x: x.clone(),
                            level_y: h2,
                            y: y.clone(),
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}
