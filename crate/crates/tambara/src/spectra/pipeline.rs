//! Spectrum pipelines: path-component assembly over self-compatible pairs,
//! transfer enlargement, hull transport for multiplicatively cohomological
//! functors, and the ad-hoc bounded-candidate route for the non-saturated
//! non-cohomological case.

use crate::diagram::LewisDiagram;
use crate::error::{Error, Result};
use crate::spectra::catalogs::CatalogRegistry;
use crate::spectra::families::{
    compute_relations, rename_with_templates, templates_for, EvaluatedFamily, Provenance,
    SpectrumTable, StrataSet, Stratum,
};
use crate::spectra::ideal::{is_ideal, TambaraIdeal};
use crate::spectra::qcond::refute_primality;
use crate::transfer::{system_name, CompatiblePair, TransferSystem};
use crate::zalg::{ideal_from_generators, preimage, Element, Submodule};
use std::collections::{BTreeMap, BTreeSet};

pub const NORM_AUDIT_SAMPLES: usize = 24;
pub const IDEAL_AUDIT_SEED: u64 = 0x1d;
/// Refutation bound used to settle candidates inside the ad-hoc route.
pub const ADHOC_REFUTE_BOUND: i64 = 2;

/// Extend a restricted prime over a path component to a full ideal: the leaf
/// values on the component, the intersection of restriction preimages where
/// a component subgroup sits below, and the unit ideal elsewhere.
pub fn extend_component_prime(
    diagram: &LewisDiagram,
    component: &BTreeSet<u64>,
    leaf: &TambaraIdeal,
) -> Result<TambaraIdeal> {
    let mut levels = BTreeMap::new();
    for (&k, alg) in &diagram.levels {
        if component.contains(&k) {
            levels.insert(k, leaf.level(k).clone());
            continue;
        }
        let mut acc: Option<Submodule> = None;
        for &l in component {
            if !diagram.lattice.leq(l, k) {
                continue;
            }
            let res = diagram.restriction(l, k)?;
            let pre = preimage(alg, &res, leaf.level(l));
            acc = Some(match acc {
                None => pre,
                Some(a) => a.intersect(&pre)?,
            });
        }
        levels.insert(k, acc.unwrap_or_else(|| Submodule::full(alg)));
    }
    Ok(TambaraIdeal::new(levels))
}

fn audit_family(
    diagram: &LewisDiagram,
    fam: &EvaluatedFamily,
) -> Result<()> {
    for (qv, ideal) in &fam.evals {
        if let Err(v) = is_ideal(diagram, ideal, NORM_AUDIT_SAMPLES, IDEAL_AUDIT_SEED) {
            return Err(Error::Internal(format!(
                "family {} at q={qv} is not an ideal: {v}",
                fam.name
            )));
        }
    }
    Ok(())
}

fn assemble_table(
    diagram: &LewisDiagram,
    om_name: String,
    oa_name: String,
    strata: StrataSet,
    mut families: Vec<EvaluatedFamily>,
    mut notes: Vec<String>,
) -> Result<SpectrumTable> {
    for fam in &families {
        audit_family(diagram, fam)?;
    }
    rename_with_templates(diagram, &strata, &mut families)?;
    let (identifications, inclusions, rel_notes) = compute_relations(&strata, &families)?;
    notes.extend(rel_notes);
    Ok(SpectrumTable {
        diagram_name: diagram.name.clone(),
        om_name,
        oa_name,
        strata,
        families,
        identifications,
        inclusions,
        notes,
    })
}

/// Spectrum of a self-compatible pair via the path-component decomposition.
pub fn spectrum_self_compatible(
    diagram: &LewisDiagram,
    o: &TransferSystem,
    registry: &CatalogRegistry,
) -> Result<SpectrumTable> {
    if crate::transfer::is_compatible_pair(o, o).is_err() {
        return Err(Error::NotSelfCompatible);
    }
    let target = diagram.forget_pair(o, o)?;
    let strata = StrataSet::for_diagram(&target);
    let components = o.path_components();
    let mut families = Vec::new();
    for comp in &components {
        let restricted = target.restrict_component(comp)?;
        let leaves = registry.families_for(&restricted, &strata)?;
        for leaf in leaves {
            let mut evals = BTreeMap::new();
            for (qv, ideal) in &leaf.evals {
                evals.insert(*qv, extend_component_prime(&target, &comp.members, ideal)?);
            }
            let name = if components.len() > 1 {
                format!("{}@{}", leaf.name, comp.minimum.unwrap_or(*comp.members.iter().next().unwrap()))
            } else {
                leaf.name.clone()
            };
            families.push(EvaluatedFamily {
                name,
                evals,
                provenance: Provenance::PathComponent {
                    component: comp.members.iter().copied().collect(),
                    leaf: format!("{} ({})", leaf.name, leaf.provenance),
                },
            });
        }
    }
    let name = system_name(o);
    assemble_table(&target, name.clone(), name, strata, families, Vec::new())
}

/// Enlarge the additive part: retain exactly the evaluations that stay
/// closed under the new transfers; partially surviving families become
/// point families, dropped when every remaining point duplicates another
/// retained family.
pub fn add_transfers(
    diagram: &LewisDiagram,
    base: &SpectrumTable,
    om: &TransferSystem,
    oa: &TransferSystem,
) -> Result<SpectrumTable> {
    let target = diagram.forget_pair(om, oa)?;
    let strata = base.strata.clone();
    let mut families = Vec::new();
    for fam in &base.families {
        let mut evals = BTreeMap::new();
        for (qv, ideal) in &fam.evals {
            if is_ideal(&target, ideal, NORM_AUDIT_SAMPLES, IDEAL_AUDIT_SEED).is_ok() {
                evals.insert(*qv, ideal.clone());
            }
        }
        if evals.is_empty() {
            continue;
        }
        // generic samples must survive uniformly
        let generic = strata.samples_of(Stratum::Generic);
        let surviving = generic.iter().filter(|q| evals.contains_key(q)).count();
        if surviving != 0 && surviving != generic.len() {
            return Err(Error::Internal(format!(
                "family {} survives at some generic characteristics only",
                fam.name
            )));
        }
        families.push(EvaluatedFamily {
            name: fam.name.clone(),
            evals,
            provenance: Provenance::TransferEnlargement {
                base: format!("({}, {})", base.om_name, base.oa_name),
            },
        });
    }
    crate::spectra::catalogs::drop_duplicated_partial_points(&mut families);
    assemble_table(
        &target,
        system_name(om),
        system_name(oa),
        strata,
        families,
        Vec::new(),
    )
}

/// Hull transport: for a multiplicatively cohomological functor the
/// spectrum only depends on the saturated hull of the multiplicative part.
/// Refuses when the predicate fails.
pub fn hull_transport(
    diagram: &LewisDiagram,
    om: &TransferSystem,
    oa: &TransferSystem,
    registry: &CatalogRegistry,
) -> Result<SpectrumTable> {
    let coh = diagram.cohomological();
    if let Some(w) = &coh.multiplicative {
        return Err(Error::NotCohomological(diagram.name.clone(), w.pair.1));
    }
    let hull = om.saturated_hull();
    let mut table = spectrum(diagram, &hull, oa, registry)?;
    let hull_name = system_name(&hull);
    table.om_name = system_name(om);
    table.notes.push(format!(
        "computed for (Hull = {hull_name}, {}) and transported along the saturated hull",
        table.oa_name
    ));
    for fam in &mut table.families {
        fam.provenance = Provenance::HullTransport {
            from: format!("({hull_name}, {})", table.oa_name),
        };
    }
    Ok(table)
}

/// The ad-hoc route for a non-saturated multiplicative part on a three-level
/// chain (the `(O_3, O_comp)` Burnside case): candidate primes restrict to
/// certified primes on the prime-order part; their top levels are bounded
/// between the forced closure and the restriction-preimage cap, widened by
/// the universal zero-product witnesses; candidates are settled by
/// refutation search.
pub fn spectrum_adhoc_nonsaturated(
    diagram: &LewisDiagram,
    om: &TransferSystem,
    oa: &TransferSystem,
    registry: &CatalogRegistry,
) -> Result<SpectrumTable> {
    let orders = diagram.level_orders();
    let ok_shape = orders.len() == 3
        && oa.is_complete()
        && om.pairs().clone() == BTreeSet::from([(orders[0], orders[1]), (orders[0], orders[2])]);
    if !ok_shape {
        return Err(Error::Unsupported(format!(
            "ad-hoc route only covers the non-saturated pair ({}, {}) on a three-level chain",
            system_name(om),
            system_name(oa)
        )));
    }
    let (e, p, p2) = (orders[0], orders[1], orders[2]);
    let pval = p as i64;
    let target = diagram.forget_pair(om, oa)?;
    let strata = StrataSet::for_diagram(&target);

    // Leaves: the complete Tambara primes of the prime-order part.
    let sub = diagram.restrict_component(&crate::transfer::Component {
        members: [e, p].into(),
        minimum: Some(e),
    })?;
    let leaves = registry.families_for(&sub, &strata)?;

    let top_alg = target.level(p2)?.clone();
    // Universal witnesses: all generalized products of (pt - u, p - t)
    // vanish, so every prime contains one of them at the top.
    let w1 = Element::from_i64(&[pval, -1, 0]); // p - t
    let w2 = Element::from_i64(&[0, pval, -1]); // pt - u
    let norm_sample_bound = (p * p + 1) as i64;

    let mut survivors: BTreeMap<i64, Vec<TambaraIdeal>> = BTreeMap::new();
    for leaf in &leaves {
        for (&qv, j) in &leaf.evals {
            // cap: restriction preimages of the leaf levels
            let mut cap: Option<Submodule> = None;
            for &l in &[e, p] {
                let pre = preimage(&top_alg, &target.restriction(l, p2)?, j.level(l));
                cap = Some(match cap {
                    None => pre,
                    Some(c) => c.intersect(&pre)?,
                });
            }
            let cap = cap.unwrap();
            // forced closure: transfers of the leaf levels and norm values
            // on a polynomial-degree-covering sample of the norm source
            let mut gens: Vec<Element> = Vec::new();
            for &l in &[e, p] {
                if target.admits_transfer(l, p2) {
                    let tr = target.transfer(l, p2)?;
                    for row in &j.level(l).hnf_basis {
                        gens.push(tr.apply(&Element::new(row.clone())));
                    }
                }
                if l != p2 && target.admits_norm(l, p2) {
                    let nm = target.norm(l, p2)?;
                    let basis = &j.level(l).hnf_basis;
                    if basis.is_empty() {
                        continue;
                    }
                    for coeffs in crate::diagram::grid_elements(basis.len(), norm_sample_bound) {
                        let c: Vec<crate::matrix::Int> =
                            coeffs.iter().map(|&x| crate::matrix::Int::from(x)).collect();
                        let v = crate::matrix::apply(&c, basis);
                        gens.push(nm.apply(&Element::new(v)));
                    }
                }
            }
            let forced = ideal_from_generators(&top_alg, &gens);
            let mut candidates = vec![forced.clone()];
            for w in [&w1, &w2] {
                let mut g: Vec<Element> = forced
                    .hnf_basis
                    .iter()
                    .map(|r| Element::new(r.clone()))
                    .collect();
                g.push(w.clone());
                candidates.push(ideal_from_generators(&top_alg, &g));
            }
            candidates.push(cap.clone());
            candidates.retain(|c| cap.contains(c).unwrap_or(false));
            let mut seen: Vec<Submodule> = Vec::new();
            for cand in candidates {
                if seen.contains(&cand) {
                    continue;
                }
                seen.push(cand.clone());
                let full = TambaraIdeal::new(
                    [
                        (e, j.level(e).clone()),
                        (p, j.level(p).clone()),
                        (p2, cand),
                    ]
                    .into(),
                );
                if is_ideal(&target, &full, NORM_AUDIT_SAMPLES, IDEAL_AUDIT_SEED).is_err() {
                    continue;
                }
                if !full.is_proper() {
                    continue;
                }
                if refute_primality(&target, &full, ADHOC_REFUTE_BOUND)?.is_some() {
                    continue;
                }
                let slot = survivors.entry(qv).or_default();
                if !slot.contains(&full) {
                    slot.push(full);
                }
            }
        }
    }

    // Group the surviving ideals into families by the published templates;
    // anything unmatched becomes a synthesized one-point family.
    let templates = templates_for(diagram);
    let mut families: Vec<EvaluatedFamily> = Vec::new();
    let mut used: BTreeMap<i64, Vec<bool>> = survivors
        .iter()
        .map(|(q, v)| (*q, vec![false; v.len()]))
        .collect();
    for t in &templates {
        let mut evals = BTreeMap::new();
        for (&qv, ideals) in &survivors {
            let expected = t.eval(&target, &strata, qv)?;
            if let Some(pos) = ideals.iter().position(|i| *i == expected) {
                evals.insert(qv, ideals[pos].clone());
                used.get_mut(&qv).unwrap()[pos] = true;
            }
        }
        if !evals.is_empty() {
            families.push(EvaluatedFamily {
                name: t.name.clone(),
                evals,
                provenance: Provenance::AdHoc,
            });
        }
    }
    let mut notes = vec![format!(
        "candidates bounded between forced closure and restriction cap, settled by refutation search at bound {ADHOC_REFUTE_BOUND}"
    )];
    for (&qv, ideals) in &survivors {
        for (pos, ideal) in ideals.iter().enumerate() {
            if !used[&qv][pos] {
                families.push(EvaluatedFamily {
                    name: format!("X{}@q={qv}", pos),
                    evals: [(qv, ideal.clone())].into(),
                    provenance: Provenance::AdHoc,
                });
                notes.push(format!("unmatched survivor at q={qv}"));
            }
        }
    }
    crate::spectra::catalogs::drop_duplicated_partial_points(&mut families);
    assemble_table(
        &target,
        system_name(om),
        system_name(oa),
        strata,
        families,
        notes,
    )
}

/// Compute the spectrum of `diagram` for the pair `(om, oa)`, choosing the
/// applicable route: path components for self-compatible pairs, transfer
/// enlargement after a saturated multiplicative part, hull transport for
/// multiplicatively cohomological functors, and the ad-hoc bounded search
/// otherwise.
pub fn spectrum(
    diagram: &LewisDiagram,
    om: &TransferSystem,
    oa: &TransferSystem,
    registry: &CatalogRegistry,
) -> Result<SpectrumTable> {
    CompatiblePair::new(om.clone(), oa.clone())?;
    if om == oa {
        return spectrum_self_compatible(diagram, om, registry);
    }
    if om.is_saturated() {
        let base = spectrum_self_compatible(diagram, om, registry)?;
        return add_transfers(diagram, &base, om, oa);
    }
    if diagram.cohomological().is_multiplicatively_cohomological() {
        return hull_transport(diagram, om, oa, registry);
    }
    spectrum_adhoc_nonsaturated(diagram, om, oa, registry)
}
