//! Leaf catalogs: spectra of restricted diagrams, served from a registry.
//!
//! The path-component decomposition reduces every spectrum computation to
//! the spectra of restricted diagrams (the leaves). Each catalog knows which
//! restricted diagrams it can handle; the registry picks the first match:
//!
//! * single levels with mark data (Dress' description of `Spec A(C_h)`),
//! * two-level complete chains through the ghost construction,
//! * the V-shaped `C_pq` component through the fiber product with its
//!   excluded diagonal,
//! * constant rank-one chains,
//! * the complete Burnside `C_{p^2}` table, published and refutation-audited.

use crate::construct::ghost::{ghost, product_lattice_rows, GhostDiagram};
use crate::diagram::LewisDiagram;
use crate::error::{Error, Result};
use crate::matrix::{identity, int, Int};
use crate::spectra::families::{
    burnside_cp2_templates, EvaluatedFamily, Provenance, StrataSet,
};
use crate::spectra::ideal::TambaraIdeal;
use crate::spectra::qcond::q_condition;
use crate::zalg::{preimage, AdditiveMap, Element, FiniteRankAlgebra, Submodule};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::sync::Arc;

pub trait LeafCatalog: Send + Sync {
    fn name(&self) -> &'static str;
    fn matches(&self, restricted: &LewisDiagram) -> bool;
    fn families(
        &self,
        restricted: &LewisDiagram,
        strata: &StrataSet,
    ) -> Result<Vec<EvaluatedFamily>>;
}

pub struct CatalogRegistry {
    catalogs: Vec<Box<dyn LeafCatalog>>,
}

impl Default for CatalogRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl CatalogRegistry {
    pub fn builtin() -> Self {
        CatalogRegistry {
            catalogs: vec![
                Box::new(SingletonMarks),
                Box::new(GhostTwoLevel),
                Box::new(CpqComponent),
                Box::new(RankOneChain),
                Box::new(BurnsideCp2Complete),
            ],
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.catalogs.iter().map(|c| c.name()).collect()
    }

    pub fn resolve(&self, restricted: &LewisDiagram) -> Result<&dyn LeafCatalog> {
        self.catalogs
            .iter()
            .find(|c| c.matches(restricted))
            .map(|c| c.as_ref())
            .ok_or_else(|| {
                Error::MissingCatalog(restricted.level_orders(), restricted.name.clone())
            })
    }

    pub fn families_for(
        &self,
        restricted: &LewisDiagram,
        strata: &StrataSet,
    ) -> Result<Vec<EvaluatedFamily>> {
        self.resolve(restricted)?.families(restricted, strata)
    }
}

fn principal_q(z_like: &Arc<FiniteRankAlgebra>, q: i64) -> Submodule {
    Submodule::from_rows(z_like, vec![vec![int(q)]])
}

/// Dress catalog for a single level with trivial Weyl action: one family per
/// mark homomorphism, the preimage of `<q>`.
struct SingletonMarks;

impl LeafCatalog for SingletonMarks {
    fn name(&self) -> &'static str {
        "singleton-marks"
    }

    fn matches(&self, d: &LewisDiagram) -> bool {
        let orders = d.level_orders();
        orders.len() == 1
            && d.weyl_is_trivial(orders[0])
            && d.levels[&orders[0]].marks.is_some()
            && d.levels[&orders[0]].is_free()
    }

    fn families(&self, d: &LewisDiagram, strata: &StrataSet) -> Result<Vec<EvaluatedFamily>> {
        let h = d.level_orders()[0];
        let alg = d.level(h)?.clone();
        let z = Arc::new(FiniteRankAlgebra::integers());
        let marks = alg.marks.as_ref().unwrap().clone();
        let mut out = Vec::new();
        for &sub in &marks.subgroup_orders {
            let col = alg.mark_column(sub).unwrap();
            let map = AdditiveMap::new(col.iter().map(|c| vec![c.clone()]).collect());
            let mut evals = BTreeMap::new();
            for qv in strata.samples() {
                let s = preimage(&alg, &map, &principal_q(&z, qv));
                evals.insert(qv, TambaraIdeal::new([(h, s)].into()));
            }
            out.push(EvaluatedFamily {
                name: format!("P{sub}"),
                evals,
                provenance: Provenance::Marks { subgroup: sub },
            });
        }
        // distinct mark columns can give literally equal families
        dedupe_families(&mut out);
        Ok(out)
    }
}

fn dedupe_families(families: &mut Vec<EvaluatedFamily>) {
    let mut seen: Vec<BTreeMap<i64, TambaraIdeal>> = Vec::new();
    families.retain(|f| {
        if seen.contains(&f.evals) {
            false
        } else {
            seen.push(f.evals.clone());
            true
        }
    });
}

/// Spectrum families of a rank-one quotient ring `Z` or `Z/m`: `<q>` for the
/// free case, constant families `<r>` for each prime `r | m` otherwise.
fn rank_one_spectrum(
    alg: &Arc<FiniteRankAlgebra>,
    strata: &StrataSet,
) -> Result<Vec<(String, BTreeMap<i64, Submodule>)>> {
    if alg.rank() != 1 {
        return Err(Error::Unsupported(format!(
            "no built-in catalog for rank-{} quotient rings",
            alg.rank()
        )));
    }
    match &alg.moduli[0] {
        None => {
            let mut evals = BTreeMap::new();
            for qv in strata.samples() {
                evals.insert(qv, Submodule::from_rows(alg, vec![vec![int(qv)]]));
            }
            Ok(vec![("q".into(), evals)])
        }
        Some(m) => {
            let mut out = Vec::new();
            let mut m_left = m.clone();
            let mut r = Int::from(2);
            while &r * &r <= m_left {
                if (&m_left % &r).is_zero() {
                    out.push(r.clone());
                    while (&m_left % &r).is_zero() {
                        m_left = &m_left / &r;
                    }
                }
                r += 1;
            }
            if m_left > Int::from(1) {
                out.push(m_left);
            }
            Ok(out
                .into_iter()
                .map(|r| {
                    let s = Submodule::from_rows(alg, vec![vec![r.clone()]]);
                    let evals = strata.samples().into_iter().map(|qv| (qv, s.clone())).collect();
                    (format!("const{r}"), evals)
                })
                .collect())
        }
    }
}

/// Prime families of the base of a ghost construction, pulled back along
/// the ghost map (both ghost-prime shapes).
pub fn ghost_spectrum(
    gd: &GhostDiagram,
    strata: &StrataSet,
) -> Result<Vec<EvaluatedFamily>> {
    let bottom_alg = gd.base.level(gd.bottom)?.clone();
    let top_alg = gd.base.level(gd.top)?.clone();
    if !gd.base.weyl_is_trivial(gd.bottom) {
        return Err(Error::Unsupported(
            "ghost catalogs need a trivial Weyl action on the underlying level".into(),
        ));
    }
    let marks = bottom_alg
        .marks
        .as_ref()
        .ok_or_else(|| Error::Unsupported("ghost catalog needs marks on the underlying level".into()))?
        .clone();
    let z = Arc::new(FiniteRankAlgebra::integers());
    let rank_f = gd.fixed_algebra.rank();
    let rank_phi = gd.phi_algebra.rank();
    let ghost_top_alg = gd.ghost.level(gd.top)?.clone();
    let phi_full: Vec<Vec<Int>> = identity(rank_phi);

    let pull_top = |bottom_ideal: &Submodule, phi_rows: &[Vec<Int>]| -> Submodule {
        // trivial action: the fixed subring is the whole bottom level
        let rows = product_lattice_rows(rank_f, rank_phi, &bottom_ideal.hnf_basis, phi_rows);
        let target = Submodule::from_rows(&ghost_top_alg, rows);
        preimage(&top_alg, &gd.ghost_map_top, &target)
    };

    let mut out = Vec::new();
    // (a ; Phi): a ranges over the mark preimages of the underlying ring.
    for &sub in &marks.subgroup_orders {
        let col = bottom_alg.mark_column(sub).unwrap();
        let map = AdditiveMap::new(col.iter().map(|c| vec![c.clone()]).collect());
        let mut evals = BTreeMap::new();
        for qv in strata.samples() {
            let a = preimage(&bottom_alg, &map, &principal_q(&z, qv));
            let top = pull_top(&a, &phi_full);
            evals.insert(
                qv,
                TambaraIdeal::new([(gd.bottom, a), (gd.top, top)].into()),
            );
        }
        out.push(EvaluatedFamily {
            name: format!("G{sub}"),
            evals,
            provenance: Provenance::Ghost,
        });
    }
    // (nm^{-1}(b) ; b): b ranges over the primes of Phi.
    for (bname, bevals) in rank_one_spectrum(&gd.phi_algebra, strata)? {
        let mut evals = BTreeMap::new();
        for (qv, b) in bevals {
            let a = preimage(&bottom_alg, &gd.norm_ring_map, &b);
            let top = pull_top(&a, &b.hnf_basis);
            evals.insert(
                qv,
                TambaraIdeal::new([(gd.bottom, a), (gd.top, top)].into()),
            );
        }
        out.push(EvaluatedFamily {
            name: format!("K{}", if bname == "q" { String::new() } else { bname.clone() }),
            evals,
            provenance: Provenance::Ghost,
        });
    }
    // Constant families (from torsion Phi) usually coincide with a special
    // value of another family; drop those duplicated points.
    drop_duplicated_partial_points(&mut out);
    dedupe_families(&mut out);
    Ok(out)
}

/// Drop a family when every one of its evaluations equals some other
/// family's evaluation at the same sample and the other family is strictly
/// larger (sample-set-wise). Keeps genuine point families.
pub fn drop_duplicated_partial_points(families: &mut Vec<EvaluatedFamily>) {
    let snapshot = families.clone();
    families.retain(|f| {
        let duplicated = f.evals.iter().all(|(qv, ideal)| {
            snapshot.iter().any(|g| {
                g.name != f.name
                    && g.evals.len() > f.evals.len()
                    && g.evals.get(qv) == Some(ideal)
            })
        });
        !duplicated
    });
}

/// Two-level complete chains, via the ghost construction.
struct GhostTwoLevel;

impl LeafCatalog for GhostTwoLevel {
    fn name(&self) -> &'static str {
        "ghost-two-level"
    }

    fn matches(&self, d: &LewisDiagram) -> bool {
        let orders = d.level_orders();
        if orders.len() != 2 {
            return false;
        }
        let pair = (orders[0], orders[1]);
        d.om.contains(&pair)
            && d.oa.contains(&pair)
            && d.weyl_is_trivial(orders[0])
            && d.levels[&orders[0]].marks.is_some()
            && ghost(d).is_ok()
    }

    fn families(&self, d: &LewisDiagram, strata: &StrataSet) -> Result<Vec<EvaluatedFamily>> {
        let gd = ghost(d)?;
        gd.check_ghost_map(64, 0x6d)
            .map_err(|e| Error::Internal(format!("ghost map audit failed: {e}")))?;
        ghost_spectrum(&gd, strata)
    }
}

/// The V-shaped `C_pq` component `{e, C_p, C_q}`: the fiber product of the
/// two prime-order chains over `Spec(Z)`, minus the excluded diagonal, which
/// is refuted by the generalized-product witness `(x_p - p, x_q - q)`.
struct CpqComponent;

fn cpq_shape(d: &LewisDiagram) -> Option<(u64, u64)> {
    let orders = d.level_orders();
    if orders.len() != 3 || orders[0] != 1 {
        return None;
    }
    let (r, s) = (orders[1], orders[2]);
    if !crate::construct::is_prime(r) || !crate::construct::is_prime(s) || r == s {
        return None;
    }
    let expected: std::collections::BTreeSet<(u64, u64)> = [(1, r), (1, s)].into();
    (d.om == expected && d.oa == expected).then_some((r, s))
}

fn chain_subdiagram(d: &LewisDiagram, keep: &[u64]) -> LewisDiagram {
    let mut out = d.clone();
    out.name = format!("{}|chain{:?}", d.name, keep);
    out.levels.retain(|h, _| keep.contains(h));
    out.weyl.retain(|h, _| keep.contains(h));
    let keep_pair = |p: &(u64, u64)| keep.contains(&p.0) && keep.contains(&p.1);
    out.om.retain(keep_pair);
    out.oa.retain(keep_pair);
    out.res.retain(|p, _| keep_pair(p));
    out.tr.retain(|p, _| keep_pair(p));
    out.nm.retain(|p, _| keep_pair(p));
    out
}

impl LeafCatalog for CpqComponent {
    fn name(&self) -> &'static str {
        "cpq-fiber-product"
    }

    fn matches(&self, d: &LewisDiagram) -> bool {
        cpq_shape(d).is_some()
    }

    fn families(&self, d: &LewisDiagram, strata: &StrataSet) -> Result<Vec<EvaluatedFamily>> {
        let (r, s) = cpq_shape(d).unwrap();
        let chain_r = chain_subdiagram(d, &[1, r]);
        let chain_s = chain_subdiagram(d, &[1, s]);
        let fam_r = GhostTwoLevel.families(&chain_r, strata)?;
        let fam_s = GhostTwoLevel.families(&chain_s, strata)?;
        let rename = |n: &str| -> String {
            // ghost names: G1 is the mark-preimage family (B2-type), K the
            // geometric one (C-type)
            match n {
                "G1" => "B2".into(),
                "K" => "C".into(),
                other => other.into(),
            }
        };
        let mut out = Vec::new();
        for fr in &fam_r {
            for fs in &fam_s {
                let name = format!("{}x{}", rename(&fr.name), rename(&fs.name));
                let is_diagonal = rename(&fr.name) == "C" && rename(&fs.name) == "C";
                let mut evals = BTreeMap::new();
                for qv in strata.samples() {
                    let (Some(ir), Some(is)) = (fr.evals.get(&qv), fs.evals.get(&qv)) else {
                        continue;
                    };
                    if ir.level(1) != is.level(1) {
                        continue; // must agree on the underlying level
                    }
                    let ideal = TambaraIdeal::new(
                        [
                            (1, ir.level(1).clone()),
                            (r, ir.level(r).clone()),
                            (s, is.level(s).clone()),
                        ]
                        .into(),
                    );
                    if is_diagonal {
                        // the excluded diagonal: refute with the witness
                        // (x_p - p, x_q - q) wherever it applies
                        let x = Element::from_i64(&[-(r as i64), 1]);
                        let y = Element::from_i64(&[-(s as i64), 1]);
                        let q_holds = q_condition(d, &ideal, r, &x, s, &y)?;
                        let outside =
                            !ideal.level(r).member(&x) && !ideal.level(s).member(&y);
                        if q_holds && outside {
                            continue; // refuted at this sample
                        }
                    }
                    evals.insert(qv, ideal);
                }
                if evals.is_empty() {
                    continue;
                }
                out.push(EvaluatedFamily {
                    name,
                    evals,
                    provenance: Provenance::PaperAsserted,
                });
            }
        }
        drop_duplicated_partial_points(&mut out);
        dedupe_families(&mut out);
        Ok(out)
    }
}

/// Complete chains of rank-one levels with identity restrictions (constant
/// functors): the single all-`<q>` family.
struct RankOneChain;

impl LeafCatalog for RankOneChain {
    fn name(&self) -> &'static str {
        "constant-rank-one-chain"
    }

    fn matches(&self, d: &LewisDiagram) -> bool {
        let orders = d.level_orders();
        if orders.is_empty() {
            return false;
        }
        let chain = orders.windows(2).all(|w| w[1] % w[0] == 0);
        let complete = orders
            .iter()
            .enumerate()
            .all(|(i, &k)| orders[i + 1..].iter().all(|&h| d.om.contains(&(k, h)) && d.oa.contains(&(k, h))));
        chain
            && complete
            && d.levels.values().all(|a| a.rank() == 1 && a.is_free())
            && d.res.values().all(|m| m.rows == identity(1))
    }

    fn families(&self, d: &LewisDiagram, strata: &StrataSet) -> Result<Vec<EvaluatedFamily>> {
        let mut evals = BTreeMap::new();
        for qv in strata.samples() {
            let levels = d
                .levels
                .iter()
                .map(|(&h, alg)| (h, Submodule::from_rows(alg, vec![vec![int(qv)]])))
                .collect();
            evals.insert(qv, TambaraIdeal::new(levels));
        }
        Ok(vec![EvaluatedFamily {
            name: "A".into(),
            evals,
            provenance: Provenance::PaperAsserted,
        }])
    }
}

/// The complete Burnside table over `C_{p^2}`: families C3, D, G with their
/// special column, published and audited downstream by refutation search.
struct BurnsideCp2Complete;

fn is_burnside_cp2_complete(d: &LewisDiagram) -> Option<u64> {
    let orders = d.level_orders();
    if orders.len() != 3 {
        return None;
    }
    let p = orders[1];
    if !crate::construct::is_prime(p) || orders != vec![1, p, p * p] {
        return None;
    }
    let complete: std::collections::BTreeSet<(u64, u64)> =
        [(1, p), (1, p * p), (p, p * p)].into();
    if d.om != complete || d.oa != complete {
        return None;
    }
    for &h in &orders {
        let expect = crate::construct::burnside::burnside_level_algebra(h, p * p);
        if d.levels[&h] != expect {
            return None;
        }
    }
    for &(k, h) in &complete {
        if d.restriction(k, h).ok()?.rows
            != crate::construct::burnside::burnside_restriction(h, k).rows
            || d.transfer(k, h).ok()?.rows
                != crate::construct::burnside::burnside_transfer(k, h).rows
        {
            return None;
        }
    }
    Some(p)
}

impl LeafCatalog for BurnsideCp2Complete {
    fn name(&self) -> &'static str {
        "burnside-cp2-complete"
    }

    fn matches(&self, d: &LewisDiagram) -> bool {
        is_burnside_cp2_complete(d).is_some()
    }

    fn families(&self, d: &LewisDiagram, strata: &StrataSet) -> Result<Vec<EvaluatedFamily>> {
        let p = is_burnside_cp2_complete(d).unwrap();
        let templates = burnside_cp2_templates(p as i64, &d.level_orders());
        let mut out = Vec::new();
        for name in ["C3", "D", "G"] {
            let t = templates.iter().find(|t| t.name == name).unwrap();
            let mut evals = BTreeMap::new();
            for qv in strata.samples() {
                evals.insert(qv, t.eval(d, strata, qv)?);
            }
            out.push(EvaluatedFamily {
                name: name.into(),
                evals,
                provenance: Provenance::PaperAsserted,
            });
        }
        Ok(out)
    }
}
