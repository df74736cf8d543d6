//! Ideals, the Q-condition, prime families, spectrum pipelines, and
//! specialization shape graphs.

pub mod catalogs;
pub mod families;
pub mod ideal;
pub mod pipeline;
pub mod qcond;
pub mod shape;

pub use catalogs::{ghost_spectrum, CatalogRegistry, LeafCatalog};
pub use families::{
    EvaluatedFamily, FamilyTemplate, Identification, InclusionEdge, Provenance, SpectrumTable,
    StrataSet, Stratum,
};
pub use ideal::{
    g_prime_sampled_ok, g_prime_violation, is_g_prime_witness, is_ideal, radical_audit,
    IdealViolation, TambaraIdeal,
};
pub use pipeline::{
    add_transfers, extend_component_prime, hull_transport, spectrum, spectrum_adhoc_nonsaturated,
    spectrum_self_compatible,
};
pub use qcond::{
    generalized_products, multiplicative_translates, q_condition, refute_primality,
    RefutationWitness,
};
pub use shape::{homeomorphic, shape_graph, to_dot, ShapeGraph};
