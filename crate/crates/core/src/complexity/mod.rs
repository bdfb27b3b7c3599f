//! Family complexity: exact search, explicit constructions and the counting
//! identities behind the lower bounds.

pub mod additive;
pub mod condition;
pub mod construct;
pub mod family;
pub mod t2;

pub use additive::{condition34_check, green_ruzsa_verify};
pub use condition::{theorem1_condition, theorem1_crossover};
pub use construct::{theorem4_construct, theorem4_sweep, Branch, Theorem4Trace};
pub use family::{
    complexity_exact, complexity_exact_with_budget, find_witness, k3_upper_clamp, ComplexityReport, Family, FamilyKind, PartitionInstance,
    WitnessCertificate,
};
pub use t2::{t2_character_identity_check, t2_count};
