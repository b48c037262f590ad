//! Exact realizations: order polytopes, polarity, admissible tubings and stellar subdivisions.

mod admissible;
mod finite;
mod pipeline;
mod polytope;

use alloc::string::String;

pub use admissible::{admissible_dim, admissible_tubings, AdmissiblePoset, BasePolytope, TubeSystem};
pub use finite::{order_polytope, realize_poset_associahedron, AssociahedronRealization, FiniteSystem};
pub use pipeline::{certify_stage, face_cut, realize, stellar_subdivide, MeltRecord, RealizeOptions, Realization, StellarStep};
pub use polytope::{hyperplane_through, Chart, FaceTag, Facet, RationalPolytope};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("polytope has the wrong dimension")]
    Degenerate,
    #[error("origin is not interior to the polytope")]
    OriginNotInterior,
    #[error("no admissible epsilon for the stellar subdivision")]
    EpsilonInfeasible,
    #[error("vertex set does not span a face")]
    NotAFace,
    #[error("realization disagrees with the combinatorial lattice: {0}")]
    Mismatch(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("coordinates need {bits} bits, above the cap of {cap}")]
    BitLimit { bits: u64, cap: u64 },
}
