//! Lewis diagrams of bi-incomplete Tambara functors: one commutative ring
//! per subgroup, restriction/transfer matrices, evaluable norm maps, Weyl
//! actions, and the axiom checkers (Frobenius reciprocity, Tambara
//! reciprocity, double coset formula, cohomological predicates).
//!
//! Restrictions and transfers are additive and stored as integer matrices.
//! Norms are multiplicative but not additive, so they are stored as named
//! evaluable functions on elements; built-in constructions supply closed
//! forms and the checkers audit them on seeded samples.

use crate::error::{Error, Result};
use crate::lattice::SubgroupLattice;
use crate::matrix::{mat_eq_identity, mat_pow, Int, Row};
use crate::transfer::{is_compatible_pair, Component, TransferSystem};
use crate::zalg::{AdditiveMap, AlgebraRef, Element, Submodule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

pub const DEFAULT_SEED: u64 = 0x7a;
pub const SAMPLE_COEFF_BOUND: i64 = 10;

/// A norm map: multiplicative, not additive, stored as an evaluable closure
/// with a display name. User-supplied norms round-trip through serialization
/// as opaque references; built-ins carry stable names.
#[derive(Clone)]
pub struct Norm {
    pub name: String,
    eval: Arc<dyn Fn(&Element) -> Element + Send + Sync>,
}

impl Norm {
    pub fn new(name: impl Into<String>, eval: impl Fn(&Element) -> Element + Send + Sync + 'static) -> Self {
        Norm {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn apply(&self, x: &Element) -> Element {
        (self.eval)(x)
    }
}

impl fmt::Debug for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Norm({})", self.name)
    }
}

#[derive(Debug, Clone)]
pub struct LewisDiagram {
    pub name: String,
    /// Construction tag (`burnside`, `constantZ`, `initial`, `ghost`,
    /// `restricted`, ...), consulted by leaf-catalog matching.
    pub kind: String,
    pub lattice: SubgroupLattice,
    pub levels: BTreeMap<u64, AlgebraRef>,
    /// Generator of the Weyl action per level (the ambient group generator
    /// acting on the level ring); identity when trivial.
    pub weyl: BTreeMap<u64, Vec<Row>>,
    /// Non-reflexive admissible norm pairs.
    pub om: BTreeSet<(u64, u64)>,
    /// Non-reflexive admissible transfer pairs.
    pub oa: BTreeSet<(u64, u64)>,
    /// Restrictions for every nested pair of present levels `(K, H)`, K < H.
    pub res: BTreeMap<(u64, u64), AdditiveMap>,
    pub tr: BTreeMap<(u64, u64), AdditiveMap>,
    pub nm: BTreeMap<(u64, u64), Norm>,
}

#[derive(Debug, Clone)]
pub struct Counterexample {
    pub law: &'static str,
    pub pair: (u64, u64),
    pub detail: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at {:?}: {}", self.law, self.pair, self.detail)
    }
}

pub type CheckResult = std::result::Result<(), Counterexample>;

pub fn random_element(alg: &AlgebraRef, rng: &mut ChaCha8Rng, bound: i64) -> Element {
    Element::new(
        (0..alg.rank())
            .map(|_| Int::from(rng.gen_range(-bound..=bound)))
            .collect(),
    )
}

impl LewisDiagram {
    pub fn level(&self, h: u64) -> Result<&AlgebraRef> {
        self.levels
            .get(&h)
            .ok_or_else(|| Error::InvalidInput(format!("no level {h} in diagram `{}`", self.name)))
    }

    pub fn level_orders(&self) -> Vec<u64> {
        self.levels.keys().copied().collect()
    }

    /// Present subgroups below `h`, including `h` itself.
    pub fn sublevels(&self, h: u64) -> Vec<u64> {
        self.level_orders()
            .into_iter()
            .filter(|&k| self.lattice.leq(k, h))
            .collect()
    }

    pub fn admits_norm(&self, k: u64, h: u64) -> bool {
        k == h || self.om.contains(&(k, h))
    }

    pub fn admits_transfer(&self, k: u64, h: u64) -> bool {
        k == h || self.oa.contains(&(k, h))
    }

    /// Restriction map, identity on a reflexive pair.
    pub fn restriction(&self, k: u64, h: u64) -> Result<AdditiveMap> {
        if k == h {
            return Ok(AdditiveMap::identity(self.level(h)?.rank()));
        }
        self.res
            .get(&(k, h))
            .cloned()
            .ok_or_else(|| Error::InvalidInput(format!("no restriction ({k},{h})")))
    }

    pub fn transfer(&self, k: u64, h: u64) -> Result<AdditiveMap> {
        if k == h {
            return Ok(AdditiveMap::identity(self.level(h)?.rank()));
        }
        self.tr
            .get(&(k, h))
            .cloned()
            .ok_or_else(|| Error::InvalidInput(format!("no transfer ({k},{h})")))
    }

    pub fn norm(&self, k: u64, h: u64) -> Result<Norm> {
        if k == h {
            return Ok(Norm::new("id", |x| x.clone()));
        }
        self.nm
            .get(&(k, h))
            .cloned()
            .ok_or_else(|| Error::InvalidInput(format!("no norm ({k},{h})")))
    }

    /// Weyl action of the `e`-th power of the ambient generator on level `h`.
    pub fn weyl_power(&self, h: u64, e: u64) -> Vec<Row> {
        let w = &self.weyl[&h];
        mat_pow(w, e)
    }

    pub fn weyl_order(&self, h: u64) -> u64 {
        self.lattice.weyl_order(h)
    }

    pub fn weyl_is_trivial(&self, h: u64) -> bool {
        mat_eq_identity(&self.weyl[&h])
    }

    /// The prime divisors of the ambient group order; these index the
    /// special strata of `q`-parameterized prime families.
    pub fn special_primes(&self) -> Vec<u64> {
        let mut n = self.lattice.group_order();
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                out.push(d);
                while n % d == 0 {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }

    /// Structural well-formedness: ring axioms per level, restrictions are
    /// unital ring maps (exact on basis pairs), Weyl actions are ring
    /// automorphisms of order dividing the Weyl order, norms are unital and
    /// multiplicative on seeded samples.
    pub fn check_structure(&self, samples: usize, seed: u64) -> CheckResult {
        for (h, alg) in &self.levels {
            alg.check_ring_axioms().map_err(|e| Counterexample {
                law: "ring axioms",
                pair: (*h, *h),
                detail: e.to_string(),
            })?;
        }
        for (&(k, h), map) in &self.res {
            let src = &self.levels[&h];
            let dst = &self.levels[&k];
            let unit_img = map.apply(&src.unit_element());
            if !dst.equal_elements(&unit_img, &dst.unit_element()) {
                return Err(Counterexample {
                    law: "restriction unital",
                    pair: (k, h),
                    detail: format!("res(1) = {}", dst.display_element(&unit_img)),
                });
            }
            for i in 0..src.rank() {
                for j in 0..src.rank() {
                    let lhs = map.apply(&src.mul(&src.basis_element(i), &src.basis_element(j)));
                    let rhs = dst.mul(
                        &map.apply(&src.basis_element(i)),
                        &map.apply(&src.basis_element(j)),
                    );
                    if !dst.equal_elements(&lhs, &rhs) {
                        return Err(Counterexample {
                            law: "restriction multiplicative",
                            pair: (k, h),
                            detail: format!("on basis ({i},{j})"),
                        });
                    }
                }
            }
        }
        for (&h, w) in &self.weyl {
            let alg = &self.levels[&h];
            let order = self.weyl_order(h);
            if !mat_eq_identity(&mat_pow(w, order)) {
                return Err(Counterexample {
                    law: "weyl action order",
                    pair: (h, h),
                    detail: format!("generator action^{order} != id"),
                });
            }
            let act = AdditiveMap::new(w.clone());
            for i in 0..alg.rank() {
                for j in 0..alg.rank() {
                    let lhs = act.apply(&alg.mul(&alg.basis_element(i), &alg.basis_element(j)));
                    let rhs = alg.mul(&act.apply(&alg.basis_element(i)), &act.apply(&alg.basis_element(j)));
                    if !alg.equal_elements(&lhs, &rhs) {
                        return Err(Counterexample {
                            law: "weyl action multiplicative",
                            pair: (h, h),
                            detail: format!("on basis ({i},{j})"),
                        });
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (&(k, h), nm) in &self.nm {
            let src = &self.levels[&k];
            let dst = &self.levels[&h];
            let unit_img = nm.apply(&src.unit_element());
            if !dst.equal_elements(&unit_img, &dst.unit_element()) {
                return Err(Counterexample {
                    law: "norm unital",
                    pair: (k, h),
                    detail: format!("nm(1) = {}", dst.display_element(&unit_img)),
                });
            }
            for _ in 0..samples {
                let x = random_element(src, &mut rng, SAMPLE_COEFF_BOUND);
                let y = random_element(src, &mut rng, SAMPLE_COEFF_BOUND);
                let lhs = nm.apply(&src.mul(&x, &y));
                let rhs = dst.mul(&nm.apply(&x), &nm.apply(&y));
                if !dst.equal_elements(&lhs, &rhs) {
                    return Err(Counterexample {
                        law: "norm multiplicative",
                        pair: (k, h),
                        detail: format!(
                            "x = {}, y = {}",
                            src.display_element(&x),
                            src.display_element(&y)
                        ),
                    });
                }
            }
        }
        self.check_functoriality(samples.min(32), seed ^ 0x5f)?;
        Ok(())
    }

    /// Restrictions compose along chains; transfers and norms compose along
    /// admissible chains (exactly for the additive maps, on samples for
    /// norms).
    pub fn check_functoriality(&self, samples: usize, seed: u64) -> CheckResult {
        let orders = self.level_orders();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for &a in &orders {
            for &b in &orders {
                if !(self.lattice.leq(a, b) && a != b) {
                    continue;
                }
                for &c in &orders {
                    if !(self.lattice.leq(b, c) && b != c) {
                        continue;
                    }
                    let direct = self.restriction(a, c).unwrap();
                    let composed = self.restriction(b, c).unwrap().compose(&self.restriction(a, b).unwrap());
                    if direct.rows != composed.rows {
                        return Err(Counterexample {
                            law: "restriction functoriality",
                            pair: (a, c),
                            detail: format!("via {b}"),
                        });
                    }
                    if self.admits_transfer(a, b) && self.admits_transfer(b, c) && self.admits_transfer(a, c) {
                        let direct = self.transfer(a, c).unwrap();
                        let composed = self.transfer(a, b).unwrap().compose(&self.transfer(b, c).unwrap());
                        if direct.rows != composed.rows {
                            return Err(Counterexample {
                                law: "transfer functoriality",
                                pair: (a, c),
                                detail: format!("via {b}"),
                            });
                        }
                    }
                    if self.admits_norm(a, b) && self.admits_norm(b, c) && self.admits_norm(a, c) {
                        let n_ab = self.norm(a, b).unwrap();
                        let n_bc = self.norm(b, c).unwrap();
                        let n_ac = self.norm(a, c).unwrap();
                        let alg_a = &self.levels[&a];
                        let alg_c = &self.levels[&c];
                        for _ in 0..samples {
                            let x = random_element(alg_a, &mut rng, SAMPLE_COEFF_BOUND);
                            let lhs = n_ac.apply(&x);
                            let rhs = n_bc.apply(&n_ab.apply(&x));
                            if !alg_c.equal_elements(&lhs, &rhs) {
                                return Err(Counterexample {
                                    law: "norm functoriality",
                                    pair: (a, c),
                                    detail: format!("via {b} at x = {}", alg_a.display_element(&x)),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Frobenius reciprocity: `tr(x) * y = tr(x * res(y))` for every
    /// admissible transfer, on seeded samples.
    pub fn check_frobenius(&self, samples: usize, seed: u64) -> CheckResult {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for &(k, h) in &self.oa {
            let low = &self.levels[&k];
            let high = &self.levels[&h];
            let tr = self.transfer(k, h).unwrap();
            let res = self.restriction(k, h).unwrap();
            for _ in 0..samples {
                let x = random_element(low, &mut rng, SAMPLE_COEFF_BOUND);
                let y = random_element(high, &mut rng, SAMPLE_COEFF_BOUND);
                let lhs = high.mul(&tr.apply(&x), &y);
                let rhs = tr.apply(&low.mul(&x, &res.apply(&y)));
                if !high.equal_elements(&lhs, &rhs) {
                    return Err(Counterexample {
                        law: "Frobenius reciprocity",
                        pair: (k, h),
                        detail: format!(
                            "x = {}, y = {}",
                            low.display_element(&x),
                            high.display_element(&y)
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    /// Tambara reciprocity: `nm(x+y) - nm(x) - nm(y)` lies in the sum of the
    /// images of the admissible transfers into the target level.
    pub fn check_tambara_reciprocity(&self, samples: usize, seed: u64) -> CheckResult {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for &(k, h) in &self.om {
            let low = &self.levels[&k];
            let high = &self.levels[&h];
            let nm = self.norm(k, h).unwrap();
            let mut tau = Submodule::zero(high);
            for &(l, h2) in &self.oa {
                if h2 == h {
                    let img = self.transfer(l, h).unwrap().image(high);
                    tau = tau.sum(&img).unwrap();
                }
            }
            for _ in 0..samples {
                let x = random_element(low, &mut rng, SAMPLE_COEFF_BOUND);
                let y = random_element(low, &mut rng, SAMPLE_COEFF_BOUND);
                let diff = high.sub(
                    &high.sub(&nm.apply(&low.add(&x, &y)), &nm.apply(&x)),
                    &nm.apply(&y),
                );
                if !tau.member(&diff) {
                    return Err(Counterexample {
                        law: "Tambara reciprocity",
                        pair: (k, h),
                        detail: format!(
                            "x = {}, y = {}, residue {}",
                            low.display_element(&x),
                            low.display_element(&y),
                            high.display_element(&diff)
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    /// Double coset formula in the abelian cyclic case: for `(K,H)` and a
    /// present level `L <= H`, with `M = K ∩ L` and `[H : LK]` summands
    /// twisted by Weyl representatives,
    /// `res^H_L tr^H_K = sum_g tr^L_M res^K_M conj_g` and multiplicatively
    /// for norms.
    pub fn check_double_coset(&self, samples: usize, seed: u64) -> CheckResult {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let orders = self.level_orders();
        let n = self.lattice.group_order();
        for (kind, pairs) in [("transfer", &self.oa), ("norm", &self.om)] {
            for &(k, h) in pairs {
                let low = &self.levels[&k];
                for &l in &orders {
                    if !self.lattice.leq(l, h) || l == h {
                        continue;
                    }
                    let target = &self.levels[&l];
                    let m = num_integer::Integer::gcd(&k, &l);
                    if !self.levels.contains_key(&m) {
                        continue;
                    }
                    let lk = self.lattice.join(l, k);
                    let count = h / lk;
                    let res_km = self.restriction(m, k).unwrap();
                    let gen_power = n / h; // the generator of H inside G
                    if kind == "transfer" && m != l && !self.admits_transfer(m, l) {
                        continue;
                    }
                    if kind == "norm" && m != l && !self.admits_norm(m, l) {
                        continue;
                    }
                    for _ in 0..samples {
                        let x = random_element(low, &mut rng, SAMPLE_COEFF_BOUND);
                        if kind == "transfer" {
                            let lhs = self
                                .restriction(l, h)
                                .unwrap()
                                .apply(&self.transfer(k, h).unwrap().apply(&x));
                            let tr_ml = self.transfer(m, l).unwrap();
                            let mut rhs = Element::zero(target.rank());
                            for i in 0..count {
                                let conj = AdditiveMap::new(self.weyl_power(k, gen_power * i));
                                let term = tr_ml.apply(&res_km.apply(&conj.apply(&x)));
                                rhs = target.add(&rhs, &term);
                            }
                            if !target.equal_elements(&lhs, &rhs) {
                                return Err(Counterexample {
                                    law: "double coset (transfer)",
                                    pair: (k, h),
                                    detail: format!("restricted to {l}, x = {}", low.display_element(&x)),
                                });
                            }
                        } else {
                            let lhs = self
                                .restriction(l, h)
                                .unwrap()
                                .apply(&self.norm(k, h).unwrap().apply(&x));
                            let nm_ml = self.norm(m, l).unwrap();
                            let mut rhs = target.unit_element();
                            for i in 0..count {
                                let conj = AdditiveMap::new(self.weyl_power(k, gen_power * i));
                                let term = nm_ml.apply(&res_km.apply(&conj.apply(&x)));
                                rhs = target.mul(&rhs, &term);
                            }
                            if !target.equal_elements(&lhs, &rhs) {
                                return Err(Counterexample {
                                    law: "double coset (norm)",
                                    pair: (k, h),
                                    detail: format!("restricted to {l}, x = {}", low.display_element(&x)),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The full sampled axiom suite.
    pub fn axiom_suite(&self, samples: usize, seed: u64) -> CheckResult {
        self.check_structure(samples, seed)?;
        self.check_frobenius(samples, seed ^ 0x01)?;
        self.check_tambara_reciprocity(samples, seed ^ 0x02)?;
        self.check_double_coset(samples, seed ^ 0x03)?;
        Ok(())
    }

    /// Cohomological predicates: `tr(res(x)) = [H:K] x` checked exactly on
    /// basis elements, `nm(res(x)) = x^{[H:K]}` on basis elements and a
    /// small coefficient grid. Returns the first witness per predicate.
    pub fn cohomological(&self) -> CohomologicalReport {
        let mut additive = None;
        let mut multiplicative = None;
        for (&(k, h), tr) in &self.tr {
            let high = &self.levels[&h];
            let res = self.restriction(k, h).unwrap();
            let index = Int::from(self.lattice.index(k, h));
            for i in 0..high.rank() {
                let x = high.basis_element(i);
                let lhs = tr.apply(&res.apply(&x));
                let rhs = high.scale(&index, &x);
                if !high.equal_elements(&lhs, &rhs) && additive.is_none() {
                    additive = Some(CohomologicalWitness {
                        pair: (k, h),
                        x: high.display_element(&x),
                        lhs: high.display_element(&lhs),
                        rhs: high.display_element(&rhs),
                    });
                }
            }
        }
        for (&(k, h), nm) in &self.nm {
            let high = &self.levels[&h];
            let res = self.restriction(k, h).unwrap();
            let index = self.lattice.index(k, h);
            let mut candidates: Vec<Element> =
                (0..high.rank()).map(|i| high.basis_element(i)).collect();
            for grid in grid_elements(high.rank(), 2) {
                candidates.push(Element::from_i64(&grid));
            }
            for x in candidates {
                let lhs = nm.apply(&res.apply(&x));
                let rhs = high.pow(&x, index);
                if !high.equal_elements(&lhs, &rhs) && multiplicative.is_none() {
                    multiplicative = Some(CohomologicalWitness {
                        pair: (k, h),
                        x: high.display_element(&x),
                        lhs: high.display_element(&lhs),
                        rhs: high.display_element(&rhs),
                    });
                }
            }
        }
        CohomologicalReport {
            additive,
            multiplicative,
        }
    }

    /// Forget structure down to a compatible sub-pair: same levels, maps
    /// filtered to the sub-pair.
    pub fn forget_pair(&self, om: &TransferSystem, oa: &TransferSystem) -> Result<LewisDiagram> {
        if !om.pairs().iter().all(|p| self.om.contains(p))
            || !oa.pairs().iter().all(|p| self.oa.contains(p))
        {
            return Err(Error::IncompatibleSubPair(
                format!("{om}"),
                format!("{oa}"),
            ));
        }
        is_compatible_pair(om, oa)
            .map_err(|_| Error::IncompatibleSubPair(format!("{om}"), format!("{oa}")))?;
        let mut out = self.clone();
        out.om = om.pairs().clone();
        out.oa = oa.pairs().clone();
        out.tr.retain(|pair, _| out.oa.contains(pair));
        out.nm.retain(|pair, _| out.om.contains(pair));
        Ok(out)
    }

    /// Restriction to a path component of a self-compatible pair: levels
    /// limited to the component, ambient Weyl actions retained, all maps
    /// among the retained levels kept.
    pub fn restrict_component(&self, component: &Component) -> Result<LewisDiagram> {
        if self.om != self.oa {
            return Err(Error::NotSelfCompatible);
        }
        let members = &component.members;
        for m in members {
            self.level(*m)?;
        }
        let keep_pair = |p: &(u64, u64)| members.contains(&p.0) && members.contains(&p.1);
        let mut out = self.clone();
        out.name = format!("{}|{:?}", self.name, members.iter().collect::<Vec<_>>());
        out.kind = "restricted".into();
        out.levels.retain(|h, _| members.contains(h));
        out.weyl.retain(|h, _| members.contains(h));
        out.om.retain(keep_pair);
        out.oa.retain(keep_pair);
        out.res.retain(|p, _| keep_pair(p));
        out.tr.retain(|p, _| keep_pair(p));
        out.nm.retain(|p, _| keep_pair(p));
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct CohomologicalWitness {
    pub pair: (u64, u64),
    pub x: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone)]
pub struct CohomologicalReport {
    pub additive: Option<CohomologicalWitness>,
    pub multiplicative: Option<CohomologicalWitness>,
}

impl CohomologicalReport {
    pub fn is_additively_cohomological(&self) -> bool {
        self.additive.is_none()
    }
    pub fn is_multiplicatively_cohomological(&self) -> bool {
        self.multiplicative.is_none()
    }
}

/// All coefficient vectors in `[-bound, bound]^rank`, deterministic order.
pub fn grid_elements(rank: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..rank {
        let mut next = Vec::new();
        for prefix in &out {
            for c in -bound..=bound {
                let mut v = prefix.clone();
                v.push(c);
                next.push(v);
            }
        }
        out = next;
    }
    out
}
