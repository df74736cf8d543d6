//! Built-in Tambara functor constructions behind a name-addressable
//! registry. Each construction implements the [`Construction`] trait and is
//! selected at runtime from a spec string like `burnside:p=2,n=2`,
//! `constantZ:n=4`, `burnside:pq=2,3` or `initial:pq=2,3`.

pub mod burnside;
pub mod constant_z;
pub mod ghost;
pub mod initial;

pub use ghost::{geometric_fixed_points, ghost, GhostDiagram};

use crate::diagram::LewisDiagram;
use crate::error::{Error, Result};
use crate::lattice::cyclic_lattice;
use crate::transfer::CompatiblePair;
use std::collections::BTreeMap;

/// Parsed arguments of a construction spec: the text after `name:` split on
/// commas, as key=value pairs (`pq=2,3` keeps both primes).
#[derive(Debug, Clone, Default)]
pub struct ConstructionArgs {
    pub params: BTreeMap<String, Vec<u64>>,
}

impl ConstructionArgs {
    pub fn parse(text: &str) -> Result<Self> {
        let mut params: BTreeMap<String, Vec<u64>> = BTreeMap::new();
        let mut key: Option<String> = None;
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if let Some((k, v)) = part.split_once('=') {
                let k = k.trim().to_string();
                let v: u64 = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad parameter value `{v}`")))?;
                params.entry(k.clone()).or_default().push(v);
                key = Some(k);
            } else if let Some(k) = &key {
                // continuation of a list value, as in pq=2,3
                let v: u64 = part
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad parameter value `{part}`")))?;
                params.get_mut(k).unwrap().push(v);
            } else {
                return Err(Error::InvalidInput(format!("bad parameter `{part}`")));
            }
        }
        Ok(ConstructionArgs { params })
    }

    /// The cyclic group order selected by the arguments: `p=2`, `p=2,n=2`
    /// (meaning `C_{p^n}`), `pq=2,3`, or a plain `n=12`.
    pub fn group_order(&self) -> Result<u64> {
        if let Some(pq) = self.params.get("pq") {
            let [p, q] = pq.as_slice() else {
                return Err(Error::InvalidInput("pq expects two primes".into()));
            };
            if !is_prime(*p) || !is_prime(*q) || p == q {
                return Err(Error::InvalidInput(format!(
                    "pq expects two distinct primes, got {p},{q}"
                )));
            }
            return Ok(p * q);
        }
        if let Some(p) = self.params.get("p") {
            let [p] = p.as_slice() else {
                return Err(Error::InvalidInput("p expects one prime".into()));
            };
            if !is_prime(*p) {
                return Err(Error::InvalidInput(format!("{p} is not prime")));
            }
            let e = match self.params.get("n") {
                None => 1u32,
                Some(n) if n.len() == 1 => n[0] as u32,
                _ => return Err(Error::InvalidInput("n expects one exponent".into())),
            };
            return Ok(p.pow(e));
        }
        if let Some(n) = self.params.get("n") {
            let [n] = n.as_slice() else {
                return Err(Error::InvalidInput("n expects one order".into()));
            };
            return Ok(*n);
        }
        Err(Error::InvalidInput(
            "selector needs p=, p=..,n=.., pq=..,.. or n=..".into(),
        ))
    }
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// A named diagram builder. Constructions producing complete Tambara
/// functors ignore `pair`; the initial bi-incomplete functor requires it.
pub trait Construction: Send + Sync {
    fn name(&self) -> &'static str;
    fn build(&self, args: &ConstructionArgs, pair: Option<&CompatiblePair>) -> Result<LewisDiagram>;
}

struct Burnside;
impl Construction for Burnside {
    fn name(&self) -> &'static str {
        "burnside"
    }
    fn build(&self, args: &ConstructionArgs, _pair: Option<&CompatiblePair>) -> Result<LewisDiagram> {
        let n = args.group_order()?;
        burnside::check_burnside_group(n)?;
        burnside::burnside_diagram(n)
    }
}

struct ConstantZ;
impl Construction for ConstantZ {
    fn name(&self) -> &'static str {
        "constantZ"
    }
    fn build(&self, args: &ConstructionArgs, _pair: Option<&CompatiblePair>) -> Result<LewisDiagram> {
        constant_z::constant_z_diagram(args.group_order()?)
    }
}

struct InitialBurnside;
impl Construction for InitialBurnside {
    fn name(&self) -> &'static str {
        "initial"
    }
    fn build(&self, args: &ConstructionArgs, pair: Option<&CompatiblePair>) -> Result<LewisDiagram> {
        let pair = pair.ok_or_else(|| {
            Error::InvalidInput("initial:... requires a compatible pair (--pair)".into())
        })?;
        initial::initial_burnside_diagram(args.group_order()?, pair)
    }
}

pub struct ConstructionRegistry {
    builders: Vec<Box<dyn Construction>>,
}

impl Default for ConstructionRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl ConstructionRegistry {
    pub fn builtin() -> Self {
        ConstructionRegistry {
            builders: vec![Box::new(Burnside), Box::new(ConstantZ), Box::new(InitialBurnside)],
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.builders.iter().map(|b| b.name()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&dyn Construction> {
        self.builders
            .iter()
            .find(|b| b.name().eq_ignore_ascii_case(name))
            .map(|b| b.as_ref())
    }

    /// Build from a spec string `name:params`, e.g. `burnside:p=2,n=2`.
    pub fn build_spec(&self, spec: &str, pair: Option<&CompatiblePair>) -> Result<LewisDiagram> {
        let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let builder = self.get(name).ok_or_else(|| {
            Error::InvalidInput(format!(
                "unknown construction `{name}` (available: {})",
                self.names().join(", ")
            ))
        })?;
        builder.build(&ConstructionArgs::parse(rest)?, pair)
    }

    /// Resolve the lattice a spec string lives on without building it.
    pub fn lattice_of_spec(&self, spec: &str) -> Result<crate::lattice::SubgroupLattice> {
        let (_, rest) = spec.split_once(':').unwrap_or((spec, ""));
        cyclic_lattice(ConstructionArgs::parse(rest)?.group_order()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::TransferSystem;

    #[test]
    fn spec_strings_resolve() {
        let reg = ConstructionRegistry::builtin();
        assert_eq!(reg.build_spec("burnside:p=2", None).unwrap().lattice.group_order(), 2);
        assert_eq!(
            reg.build_spec("burnside:p=2,n=2", None).unwrap().lattice.group_order(),
            4
        );
        assert_eq!(
            reg.build_spec("burnside:pq=2,3", None).unwrap().lattice.group_order(),
            6
        );
        assert_eq!(
            reg.build_spec("constantZ:p=3,n=2", None).unwrap().lattice.group_order(),
            9
        );
        assert!(reg.build_spec("burnside:p=4", None).is_err());
        assert!(reg.build_spec("nope:p=2", None).is_err());
        assert!(reg.build_spec("initial:pq=2,3", None).is_err());
        let lat = cyclic_lattice(6).unwrap();
        let o = TransferSystem::new(&lat, [(1, 2), (3, 6)]).unwrap();
        let pair = CompatiblePair::new(o.clone(), o).unwrap();
        assert!(reg.build_spec("initial:pq=2,3", Some(&pair)).is_ok());
    }
}
