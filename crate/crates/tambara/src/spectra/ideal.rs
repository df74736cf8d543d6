//! Ideals of bi-incomplete Tambara functors: levelwise submodules closed
//! under restriction, admissible transfers, conjugation, and admissible
//! norms.
//!
//! Closure under the additive maps is decided exactly on HNF basis vectors.
//! Norms are not additive; for an ideal already closed under restriction,
//! transfer and conjugation for a compatible pair, norm closure is decided
//! on the HNF module generators (Tambara reciprocity expands the norm of a
//! sum into norms of summands plus admissible transfers of absorbed mixed
//! products), backed by a seeded sampled audit.

use crate::diagram::{random_element, LewisDiagram};
use crate::error::{Error, Result};
use crate::matrix::Int;
use crate::zalg::{Element, Submodule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TambaraIdeal {
    pub levels: BTreeMap<u64, Submodule>,
}

impl TambaraIdeal {
    pub fn new(levels: BTreeMap<u64, Submodule>) -> Self {
        TambaraIdeal { levels }
    }

    pub fn level(&self, h: u64) -> &Submodule {
        &self.levels[&h]
    }

    pub fn zero(diagram: &LewisDiagram) -> Self {
        TambaraIdeal {
            levels: diagram
                .levels
                .iter()
                .map(|(&h, alg)| (h, Submodule::zero(alg)))
                .collect(),
        }
    }

    pub fn unit(diagram: &LewisDiagram) -> Self {
        TambaraIdeal {
            levels: diagram
                .levels
                .iter()
                .map(|(&h, alg)| (h, Submodule::full(alg)))
                .collect(),
        }
    }

    pub fn is_proper(&self) -> bool {
        self.levels.values().any(|s| !s.is_unit_ideal())
    }

    pub fn is_zero(&self) -> bool {
        self.levels.values().all(|s| s.is_zero())
    }

    /// Levelwise containment `self ⊆ other`.
    pub fn contained_in(&self, other: &TambaraIdeal) -> Result<bool> {
        if self.levels.len() != other.levels.len() {
            return Err(Error::InvalidInput("ideals on different level sets".into()));
        }
        for (h, s) in &self.levels {
            let o = other
                .levels
                .get(h)
                .ok_or_else(|| Error::InvalidInput(format!("missing level {h}")))?;
            if !o.contains(s)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for TambaraIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        write!(f, "[")?;
        for (h, s) in &self.levels {
            if !first {
                write!(f, "; ")?;
            }
            first = false;
            if s.is_unit_ideal() {
                write!(f, "{h}: <1>")?;
            } else {
                write!(f, "{h}: {s}")?;
            }
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone)]
pub struct IdealViolation {
    pub map: &'static str,
    pub pair: (u64, u64),
    pub witness: String,
}

impl fmt::Display for IdealViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "not closed under {} at {:?}: {}",
            self.map, self.pair, self.witness
        )
    }
}

/// Check that `ideal` is an ideal of `diagram` for the diagram's pair.
pub fn is_ideal(
    diagram: &LewisDiagram,
    ideal: &TambaraIdeal,
    norm_samples: usize,
    seed: u64,
) -> std::result::Result<(), IdealViolation> {
    for (&h, alg) in &diagram.levels {
        let Some(s) = ideal.levels.get(&h) else {
            return Err(IdealViolation {
                map: "levels",
                pair: (h, h),
                witness: "missing level".into(),
            });
        };
        if !s.is_absorbing() {
            return Err(IdealViolation {
                map: "multiplication",
                pair: (h, h),
                witness: format!("{s} is not absorbing"),
            });
        }
        // conjugation closure
        let act = crate::zalg::AdditiveMap::new(diagram.weyl[&h].clone());
        for row in &s.hnf_basis {
            let img = act.apply(&Element::new(row.clone()));
            if !s.member(&img) {
                return Err(IdealViolation {
                    map: "conjugation",
                    pair: (h, h),
                    witness: alg.display_element(&img),
                });
            }
        }
    }
    // restriction closure, on all nested pairs of present levels
    for (&(k, h), map) in &diagram.res {
        let src = ideal.level(h);
        let dst = ideal.level(k);
        for row in &src.hnf_basis {
            let img = map.apply(&Element::new(row.clone()));
            if !dst.member(&img) {
                return Err(IdealViolation {
                    map: "restriction",
                    pair: (k, h),
                    witness: diagram.levels[&k].display_element(&img),
                });
            }
        }
    }
    // transfer closure
    for (&(k, h), map) in &diagram.tr {
        let src = ideal.level(k);
        let dst = ideal.level(h);
        for row in &src.hnf_basis {
            let img = map.apply(&Element::new(row.clone()));
            if !dst.member(&img) {
                return Err(IdealViolation {
                    map: "transfer",
                    pair: (k, h),
                    witness: diagram.levels[&h].display_element(&img),
                });
            }
        }
    }
    // norm closure: generator criterion plus sampled audit
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (&(k, h), nm) in &diagram.nm {
        let src = ideal.level(k);
        let dst = ideal.level(h);
        for row in &src.hnf_basis {
            let img = nm.apply(&Element::new(row.clone()));
            if !dst.member(&img) {
                return Err(IdealViolation {
                    map: "norm",
                    pair: (k, h),
                    witness: format!(
                        "nm({}) = {}",
                        diagram.levels[&k].display_element(&Element::new(row.clone())),
                        diagram.levels[&h].display_element(&img)
                    ),
                });
            }
        }
        if src.hnf_basis.is_empty() {
            continue;
        }
        for _ in 0..norm_samples {
            // random small combination of the HNF basis
            let coeffs: Vec<Int> = (0..src.hnf_basis.len())
                .map(|_| Int::from(rng.gen_range(-3i64..=3)))
                .collect();
            let v = crate::matrix::apply(&coeffs, &src.hnf_basis);
            let img = nm.apply(&Element::new(v.clone()));
            if !dst.member(&img) {
                return Err(IdealViolation {
                    map: "norm (sampled)",
                    pair: (k, h),
                    witness: format!(
                        "nm({}) = {}",
                        diagram.levels[&k].display_element(&Element::new(v)),
                        diagram.levels[&h].display_element(&img)
                    ),
                });
            }
        }
    }
    Ok(())
}

/// Bounded search for a non-radical witness: an element outside a level
/// with square or cube inside. Primes must return `Ok`.
pub fn radical_audit(
    diagram: &LewisDiagram,
    ideal: &TambaraIdeal,
    bound: i64,
) -> std::result::Result<(), (u64, String)> {
    for (&h, alg) in &diagram.levels {
        let s = ideal.level(h);
        if s.is_unit_ideal() {
            continue;
        }
        for coeffs in crate::diagram::grid_elements(alg.rank(), bound) {
            let x = Element::from_i64(&coeffs);
            if s.member(&x) {
                continue;
            }
            let x2 = alg.mul(&x, &x);
            let x3 = alg.mul(&x2, &x);
            if s.member(&x2) || s.member(&x3) {
                return Err((h, alg.display_element(&x)));
            }
        }
    }
    Ok(())
}

/// `true` iff `x * (g^k y)` lies in the ideal for every power of the cyclic
/// action generator; primality of a G-invariant ideal fails when this holds
/// for some pair with both elements outside.
pub fn is_g_prime_witness(
    alg: &crate::zalg::AlgebraRef,
    action: &[crate::matrix::Row],
    order: u64,
    ideal: &Submodule,
    x: &Element,
    y: &Element,
) -> bool {
    for e in 0..order.max(1) {
        let g = crate::zalg::AdditiveMap::new(crate::matrix::mat_pow(action, e));
        if !ideal.member(&alg.mul(x, &g.apply(y))) {
            return false;
        }
    }
    true
}

/// Bounded search for a G-primality violation of a level ideal: a pair with
/// all twisted products inside but both elements outside.
pub fn g_prime_violation(
    alg: &crate::zalg::AlgebraRef,
    action: &[crate::matrix::Row],
    order: u64,
    ideal: &Submodule,
    bound: i64,
) -> Option<(Element, Element)> {
    let grid = crate::diagram::grid_elements(alg.rank(), bound);
    let outside: Vec<Element> = grid
        .iter()
        .map(|c| Element::from_i64(c))
        .filter(|e| !ideal.member(e))
        .collect();
    for x in &outside {
        for y in &outside {
            if is_g_prime_witness(alg, action, order, ideal, x, y) {
                return Some((x.clone(), y.clone()));
            }
        }
    }
    None
}

/// Seeded sampled audit used by the pipelines on bottom levels.
pub fn g_prime_sampled_ok(
    alg: &crate::zalg::AlgebraRef,
    action: &[crate::matrix::Row],
    order: u64,
    ideal: &Submodule,
    samples: usize,
    seed: u64,
) -> bool {
    if ideal.is_unit_ideal() {
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x = random_element(alg, &mut rng, 4);
        let y = random_element(alg, &mut rng, 4);
        if ideal.member(&x) || ideal.member(&y) {
            continue;
        }
        if is_g_prime_witness(alg, action, order, ideal, &x, &y) {
            return false;
        }
    }
    true
}
