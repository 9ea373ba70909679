//! Combinatorics of genus-one logarithmic stable maps to products of
//! projective spaces: radially aligned tropical curves, contraction radii,
//! elliptic singularity types, tropical well-spacedness, divisor-completion
//! lifts and the dimension bookkeeping of moduli strata.

pub mod contact;
pub mod curve;
pub mod dimension;
pub mod forms;
pub mod tropmap;
pub mod wellspaced;

pub use contact::ContactMatrix;
pub use curve::{
    alignment_chambers, circuit_of, contract_circle, contraction_radius_for_m, destabilize_at,
    lambda_of, Circuit, CurveBuilder, CurveError, Edge, EdgeId, Leg, LegId, Radius,
    SingularityDescriptor, SingularityKind, TropicalCurve, Vertex, VertexId,
};
pub use dimension::{
    degree_genus_p1p1, equidimensional_pairs, expected_dim, expected_dim_relative,
    fictitious_forgetful, stratum_dim, Contribution, DimError, StratumGraph, StratumVertex,
};
pub use forms::{
    Chamber, Constraint, FormError, FormOrdering, LinearForm, MonoidForm, ParamNames, Relation,
};
pub use tropmap::{
    check_balancing, check_positions, complete_divisor, complete_to_toric, expand, forget_divisor,
    is_transverse, map_contraction_radius, Divisor, Expansion, FactorSelector, Subdivision,
    TargetModel, TropMapError, TropicalMap,
};
pub use wellspaced::{
    circuit_block, enumerate_strata, integer_kernel, is_wellspaced, test_covectors,
    toric_wellspaced, EnumerationRequest, StratumType, WsError, WsReason, WsVerdict,
    DEFAULT_ENUMERATION_GUARD, DEFAULT_THRESHOLD,
};
