//! Stratified q-parameterized prime families and spectrum tables.
//!
//! A family is stored through its evaluations at a fixed sample of residue
//! characteristics: q = 0, the special primes dividing the group order, and
//! the three smallest other primes. All equality, identification and
//! inclusion decisions happen on these evaluations; the family generators
//! in scope are affine in q, so the strata capture the full behavior. Known
//! families carry display templates matching the published tables.

use crate::diagram::LewisDiagram;
use crate::error::{Error, Result};
use crate::matrix::Int;
use crate::qpoly::QPoly;
use crate::spectra::ideal::TambaraIdeal;
use crate::zalg::{ideal_from_generators, Element};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Stratum {
    Zero,
    Special(u64),
    Generic,
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stratum::Zero => write!(f, "q=0"),
            Stratum::Special(p) => write!(f, "q={p}"),
            Stratum::Generic => write!(f, "q generic"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrataSet {
    pub specials: Vec<u64>,
    pub generics: Vec<u64>,
}

impl StrataSet {
    pub fn for_diagram(diagram: &LewisDiagram) -> Self {
        let specials = diagram.special_primes();
        let mut generics = Vec::new();
        let mut c = 2u64;
        while generics.len() < 3 {
            if crate::construct::is_prime(c) && !specials.contains(&c) {
                generics.push(c);
            }
            c += 1;
        }
        StrataSet { specials, generics }
    }

    /// All sampled q values: 0, the special primes, then the generic primes.
    pub fn samples(&self) -> Vec<i64> {
        let mut out = vec![0i64];
        out.extend(self.specials.iter().map(|&p| p as i64));
        out.extend(self.generics.iter().map(|&p| p as i64));
        out
    }

    pub fn stratum_of(&self, q: i64) -> Stratum {
        if q == 0 {
            Stratum::Zero
        } else if self.specials.contains(&(q as u64)) {
            Stratum::Special(q as u64)
        } else {
            Stratum::Generic
        }
    }

    pub fn samples_of(&self, s: Stratum) -> Vec<i64> {
        match s {
            Stratum::Zero => vec![0],
            Stratum::Special(p) => vec![p as i64],
            Stratum::Generic => self.generics.iter().map(|&p| p as i64).collect(),
        }
    }

    pub fn strata(&self) -> Vec<Stratum> {
        let mut out = vec![Stratum::Zero];
        out.extend(self.specials.iter().map(|&p| Stratum::Special(p)));
        out.push(Stratum::Generic);
        out
    }
}

/// Where a family's primality certificate comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Provenance {
    /// Leaf prime extended over a path component of a self-compatible pair.
    PathComponent { component: Vec<u64>, leaf: String },
    /// Survived a transfer enlargement of a certified spectrum.
    TransferEnlargement { base: String },
    /// Transported along the saturated hull of the multiplicative part.
    HullTransport { from: String },
    /// Pulled back along a ghost map.
    Ghost,
    /// Mark-preimage prime of a level ring (commutative-ring spectrum).
    Marks { subgroup: u64 },
    /// Published table, audited by refutation search.
    PaperAsserted,
    /// Ad-hoc non-saturated route: bounded candidates settled by refutation.
    AdHoc,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::PathComponent { component, leaf } => {
                write!(f, "path-component {component:?} leaf {leaf}")
            }
            Provenance::TransferEnlargement { base } => write!(f, "transfer-enlargement of {base}"),
            Provenance::HullTransport { from } => write!(f, "hull-transport from {from}"),
            Provenance::Ghost => write!(f, "ghost pullback"),
            Provenance::Marks { subgroup } => write!(f, "mark preimage at subgroup {subgroup}"),
            Provenance::PaperAsserted => write!(f, "published table (refutation-audited)"),
            Provenance::AdHoc => write!(f, "ad-hoc candidate search"),
        }
    }
}

/// A prime family given by its evaluations at the sampled q values. A full
/// family is present at every sample; a point family (an ideal that is only
/// prime on one stratum) carries only those samples.
#[derive(Debug, Clone)]
pub struct EvaluatedFamily {
    pub name: String,
    pub evals: BTreeMap<i64, TambaraIdeal>,
    pub provenance: Provenance,
}

impl EvaluatedFamily {
    pub fn present_at(&self, strata: &StrataSet, s: Stratum) -> bool {
        strata.samples_of(s).iter().all(|q| self.evals.contains_key(q))
    }

    pub fn present_strata(&self, strata: &StrataSet) -> Vec<Stratum> {
        strata
            .strata()
            .into_iter()
            .filter(|&s| self.present_at(strata, s))
            .collect()
    }

    pub fn is_full(&self, strata: &StrataSet) -> bool {
        strata.samples().iter().all(|q| self.evals.contains_key(q))
    }
}

/// A named family template: ideal generators per level with coordinates
/// polynomial in q, plus an optional override at the special prime (the
/// published tables list those separately where the generic generators
/// degenerate).
#[derive(Debug, Clone)]
pub struct FamilyTemplate {
    pub name: String,
    pub generic: BTreeMap<u64, Vec<Vec<QPoly>>>,
    pub at_special: Option<BTreeMap<u64, Vec<Vec<i64>>>>,
}

impl FamilyTemplate {
    pub fn eval(&self, diagram: &LewisDiagram, strata: &StrataSet, q: i64) -> Result<TambaraIdeal> {
        let special = q != 0 && strata.specials.contains(&(q as u64));
        let mut levels = BTreeMap::new();
        for (&h, alg) in &diagram.levels {
            let gens: Vec<Element> = if special && self.at_special.is_some() {
                let spec_gens = &self.at_special.as_ref().unwrap()[&h];
                spec_gens.iter().map(|v| Element::from_i64(v)).collect()
            } else {
                let tmpl = self.generic.get(&h).ok_or_else(|| {
                    Error::Internal(format!("template {} missing level {h}", self.name))
                })?;
                tmpl.iter()
                    .map(|gen| {
                        Element::new(gen.iter().map(|c| c.eval(&Int::from(q))).collect())
                    })
                    .collect()
            };
            levels.insert(h, ideal_from_generators(alg, &gens));
        }
        Ok(TambaraIdeal::new(levels))
    }

    /// Readable generator strings per level (ascending), e.g. `<q, t-p>`.
    pub fn display_levels(&self, diagram: &LewisDiagram) -> Vec<String> {
        self.generic
            .iter()
            .map(|(h, gens)| {
                let alg = &diagram.levels[h];
                if gens.is_empty() {
                    return "<0>".to_string();
                }
                let body: Vec<String> = gens
                    .iter()
                    .map(|gen| {
                        let mut terms = Vec::new();
                        for (c, name) in gen.iter().zip(alg.basis_names.iter()) {
                            if c.is_zero() {
                                continue;
                            }
                            let cs = c.to_string();
                            let t = if name == "1" {
                                cs
                            } else if cs == "1" {
                                name.clone()
                            } else if cs == "-1" {
                                format!("-{name}")
                            } else if cs.contains(['+', '-']) && !cs.starts_with('-') {
                                format!("({cs}){name}")
                            } else {
                                format!("{cs}{name}")
                            };
                            terms.push(t);
                        }
                        if terms.is_empty() {
                            "0".to_string()
                        } else {
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
                    })
                    .collect();
                format!("<{}>", body.join(", "))
            })
            .collect()
    }
}

fn c(v: i64) -> QPoly {
    QPoly::from_i64(v)
}
fn q() -> QPoly {
    QPoly::q()
}

/// Generators `<q>` in a rank-r level: the single generator `q * 1`.
fn gen_q(rank: usize) -> Vec<Vec<QPoly>> {
    let mut g = vec![c(0); rank];
    g[0] = q();
    vec![g]
}

fn gen_unit(rank: usize) -> Vec<Vec<QPoly>> {
    let mut g = vec![c(0); rank];
    g[0] = c(1);
    vec![g]
}

/// Family templates for the Burnside diagram over `C_p` (levels 1, p).
pub fn burnside_cp_templates(p: i64, levels: &[u64]) -> Vec<FamilyTemplate> {
    let (e, cp) = (levels[0], levels[1]);
    // A(C_p) basis (1, t)
    let t_minus_p = vec![c(-p), c(1)];
    let t = vec![c(0), c(1)];
    let q_top = {
        let mut g = vec![c(0), c(0)];
        g[0] = q();
        g
    };
    let mk = |name: &str, bottom: Vec<Vec<QPoly>>, top: Vec<Vec<QPoly>>, at_special: Option<(Vec<Vec<i64>>, Vec<Vec<i64>>)>| FamilyTemplate {
        name: name.into(),
        generic: [(e, bottom), (cp, top)].into(),
        at_special: at_special.map(|(b, t)| [(e, b), (cp, t)].into()),
    };
    vec![
        mk("A", gen_unit(1), vec![q_top.clone(), t.clone()], None),
        mk("B1", gen_unit(1), vec![q_top.clone(), t_minus_p.clone()], None),
        mk("B2", gen_q(1), vec![q_top.clone(), t_minus_p.clone()], None),
        mk(
            "C",
            gen_q(1),
            vec![q_top],
            Some((vec![vec![p]], vec![vec![p, 0], vec![0, 1]])),
        ),
    ]
}

/// Family templates for the Burnside diagram over `C_{p^2}`
/// (levels 1, p, p^2), following the published table, with the special
/// column at q = p.
pub fn burnside_cp2_templates(p: i64, levels: &[u64]) -> Vec<FamilyTemplate> {
    let (e, cp, cp2) = (levels[0], levels[1], levels[2]);
    // bases: (1) / (1, t) / (1, t, u)
    let q2 = |rank: usize| gen_q(rank);
    let v3 = |a: i64, b: i64, d: i64| vec![c(a), c(b), c(d)];
    let q3 = {
        let mut g = vec![c(0), c(0), c(0)];
        g[0] = q();
        g
    };
    let qt = {
        let mut g = vec![c(0), c(0)];
        g[0] = q();
        g
    };
    let top = |extra: Vec<Vec<QPoly>>| {
        let mut gens = vec![q3.clone()];
        gens.extend(extra);
        gens
    };
    let mid = |extra: Vec<Vec<QPoly>>| {
        let mut gens = vec![qt.clone()];
        gens.extend(extra);
        gens
    };
    let t = vec![c(0), c(1)];
    let t_p = vec![c(-p), c(1)];
    let t3 = v3(0, 1, 0);
    let u3 = v3(0, 0, 1);
    let t3_p = v3(-p, 1, 0);
    let u3_p2 = v3(-p * p, 0, 1);
    let u3_pt = v3(0, -p, 1);
    // special column at q = p: <p,t,u> on top, <p,t> in the middle, <p> below
    let sp_top = vec![vec![p, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
    let sp_mid = vec![vec![p, 0], vec![0, 1]];
    let sp_bot = vec![vec![p]];
    let sp_unit = vec![vec![1]];
    let mk = |name: &str,
              bottom: Vec<Vec<QPoly>>,
              middle: Vec<Vec<QPoly>>,
              topg: Vec<Vec<QPoly>>,
              at_special: Option<(Vec<Vec<i64>>, Vec<Vec<i64>>, Vec<Vec<i64>>)>| FamilyTemplate {
        name: name.into(),
        generic: [(e, bottom), (cp, middle), (cp2, topg)].into(),
        at_special: at_special.map(|(b, m, t)| [(e, b), (cp, m), (cp2, t)].into()),
    };
    vec![
        mk("A", gen_unit(1), gen_unit(2), top(vec![t3.clone(), u3.clone()]), None),
        mk("B1", gen_unit(1), gen_unit(2), top(vec![t3_p.clone(), u3.clone()]), None),
        mk("B2", gen_unit(1), mid(vec![t.clone()]), top(vec![t3_p.clone(), u3.clone()]), None),
        mk("C1", gen_unit(1), gen_unit(2), top(vec![t3_p.clone(), u3_p2.clone()]), None),
        mk("C2", gen_unit(1), mid(vec![t_p.clone()]), top(vec![t3_p.clone(), u3_p2.clone()]), None),
        mk("C3", q2(1), mid(vec![t_p.clone()]), top(vec![t3_p.clone(), u3_p2.clone()]), None),
        mk(
            "D",
            q2(1),
            q2(2),
            top(vec![t3_p.clone()]),
            Some((sp_bot.clone(), sp_mid.clone(), sp_top.clone())),
        ),
        mk(
            "E",
            gen_unit(1),
            mid(vec![t.clone()]),
            top(vec![u3.clone()]),
            Some((sp_unit.clone(), sp_mid.clone(), sp_top.clone())),
        ),
        mk(
            "F",
            q2(1),
            mid(vec![t_p.clone()]),
            top(vec![u3_pt.clone()]),
            Some((sp_bot.clone(), sp_mid.clone(), sp_top.clone())),
        ),
        mk(
            "G",
            q2(1),
            q2(2),
            q2(3),
            Some((sp_bot, sp_mid, sp_top)),
        ),
    ]
}

/// Cut templates for a constant chain: `<1>` below the cut, `<q>` from the
/// cut up; names A, B, C, ... with A the all-q family.
pub fn constant_chain_templates(levels: &[u64]) -> Vec<FamilyTemplate> {
    let names = ["A", "B", "C", "D", "E"];
    (0..levels.len())
        .map(|cut| {
            let generic: BTreeMap<u64, Vec<Vec<QPoly>>> = levels
                .iter()
                .enumerate()
                .map(|(i, &h)| (h, if i < cut { gen_unit(1) } else { gen_q(1) }))
                .collect();
            FamilyTemplate {
                name: names[cut].into(),
                generic,
                at_special: None,
            }
        })
        .collect()
}

/// The published-table templates applicable to a diagram, if any.
pub fn templates_for(diagram: &LewisDiagram) -> Vec<FamilyTemplate> {
    let levels = diagram.level_orders();
    let specials = diagram.special_primes();
    match diagram.kind.as_str() {
        "burnside" if levels.len() == 2 && specials.len() == 1 => {
            burnside_cp_templates(specials[0] as i64, &levels)
        }
        "burnside" if levels.len() == 3 && specials.len() == 1 => {
            burnside_cp2_templates(specials[0] as i64, &levels)
        }
        "constantZ" => constant_chain_templates(&levels),
        _ => Vec::new(),
    }
}

/// Rename pipeline families to published names where their evaluations
/// match a template at every present sample; order families by the table
/// order, synthesized names last.
pub fn rename_with_templates(
    diagram: &LewisDiagram,
    strata: &StrataSet,
    families: &mut Vec<EvaluatedFamily>,
) -> Result<()> {
    let templates = templates_for(diagram);
    if templates.is_empty() {
        return Ok(());
    }
    let mut evals_cache: BTreeMap<(usize, i64), TambaraIdeal> = BTreeMap::new();
    for (ti, t) in templates.iter().enumerate() {
        for &qv in &strata.samples() {
            evals_cache.insert((ti, qv), t.eval(diagram, strata, qv)?);
        }
    }
    for fam in families.iter_mut() {
        let mut matched = None;
        for (ti, t) in templates.iter().enumerate() {
            let ok = fam
                .evals
                .iter()
                .all(|(qv, ideal)| evals_cache[&(ti, *qv)] == *ideal);
            if ok {
                matched = Some(t.name.clone());
                break;
            }
        }
        if let Some(name) = matched {
            fam.name = name;
        }
    }
    let order_of = |name: &str| {
        templates
            .iter()
            .position(|t| t.name == name)
            .unwrap_or(usize::MAX)
    };
    families.sort_by(|a, b| {
        (order_of(&a.name), &a.name).cmp(&(order_of(&b.name), &b.name))
    });
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct InclusionEdge {
    pub from: (String, Stratum),
    pub to: (String, Stratum),
}

#[derive(Debug, Clone, Serialize)]
pub struct Identification {
    pub a: String,
    pub b: String,
    pub stratum: Stratum,
}

#[derive(Debug, Clone)]
pub struct SpectrumTable {
    pub diagram_name: String,
    pub om_name: String,
    pub oa_name: String,
    pub strata: StrataSet,
    pub families: Vec<EvaluatedFamily>,
    pub identifications: Vec<Identification>,
    pub inclusions: Vec<InclusionEdge>,
    pub notes: Vec<String>,
}

impl SpectrumTable {
    pub fn family(&self, name: &str) -> Option<&EvaluatedFamily> {
        self.families.iter().find(|f| f.name == name)
    }

    pub fn family_names(&self) -> Vec<&str> {
        self.families.iter().map(|f| f.name.as_str()).collect()
    }

    pub fn has_identification(&self, a: &str, b: &str, stratum: Stratum) -> bool {
        self.identifications.iter().any(|i| {
            i.stratum == stratum && ((i.a == a && i.b == b) || (i.a == b && i.b == a))
        })
    }
}

/// Compute identifications (same-stratum equalities between distinct
/// families) and inclusion edges (same- and cross-stratum, with generic
/// strata required to agree at every generic sample).
pub fn compute_relations(
    strata: &StrataSet,
    families: &[EvaluatedFamily],
) -> Result<(Vec<Identification>, Vec<InclusionEdge>, Vec<String>)> {
    let mut ids = Vec::new();
    let mut edges = Vec::new();
    let mut notes = Vec::new();
    let strata_list = strata.strata();
    for (i, f) in families.iter().enumerate() {
        for (j, g) in families.iter().enumerate() {
            if i == j {
                continue;
            }
            // identifications (unordered; record once)
            if i < j {
                for &s in &strata_list {
                    if !f.present_at(strata, s) || !g.present_at(strata, s) {
                        continue;
                    }
                    let equal = strata
                        .samples_of(s)
                        .iter()
                        .all(|qv| f.evals[qv] == g.evals[qv]);
                    if equal {
                        ids.push(Identification {
                            a: f.name.clone(),
                            b: g.name.clone(),
                            stratum: s,
                        });
                    }
                }
            }
            // inclusion edges f ⊆ g per stratum pair
            for &s1 in &strata_list {
                if !f.present_at(strata, s1) {
                    continue;
                }
                for &s2 in &strata_list {
                    if !g.present_at(strata, s2) {
                        continue;
                    }
                    let contained = if s1 == Stratum::Generic && s2 == Stratum::Generic {
                        strata
                            .samples_of(s1)
                            .iter()
                            .all(|qv| f.evals[qv].contained_in(&g.evals[qv]).unwrap_or(false))
                    } else {
                        let mut ok = true;
                        for q1 in strata.samples_of(s1) {
                            for q2 in strata.samples_of(s2) {
                                ok &= f.evals[&q1].contained_in(&g.evals[&q2]).unwrap_or(false);
                            }
                        }
                        ok
                    };
                    if contained {
                        if s1 == s2 && {
                            // skip edges that are equalities
                            strata
                                .samples_of(s1)
                                .iter()
                                .all(|qv| f.evals[qv] == g.evals[qv])
                        } {
                            continue;
                        }
                        edges.push(InclusionEdge {
                            from: (f.name.clone(), s1),
                            to: (g.name.clone(), s2),
                        });
                    }
                }
            }
            // different generic samples must never be related (shape-graph
            // adequacy assumption; flagged when violated)
            if f.present_at(strata, Stratum::Generic) && g.present_at(strata, Stratum::Generic) {
                for q1 in strata.samples_of(Stratum::Generic) {
                    for q2 in strata.samples_of(Stratum::Generic) {
                        if q1 != q2 && f.evals[&q1].contained_in(&g.evals[&q2]).unwrap_or(false) {
                            notes.push(format!(
                                "cross-characteristic inclusion {}@{q1} ⊆ {}@{q2}; stratified shape graph may be inadequate",
                                f.name, g.name
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok((ids, edges, notes))
}
