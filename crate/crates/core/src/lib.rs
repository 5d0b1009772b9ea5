//! Numerical birational geometry of surfaces presented by combinatorial
//! resolution models: exact intersection theory with residue-field degrees,
//! Mumford pullback, discrepancies and singularity classes, cones of curves,
//! the minimal model program, dlt blowups, adjunction and connectedness.

pub mod adjunction;
pub mod cone;
pub mod discrepancy;
pub mod document;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod mmp;
pub mod rational;
pub mod report;
pub mod riemann_roch;
pub mod simplex;

pub use discrepancy::{
    classify_pair, crepant_coefficients, multiplier_divisor, negativity_check, numerical_pullback,
    Classification, CrepantData, Model, NegativityVerdict, NumClass, Pair, SingularityClass,
};
pub use error::{Error, Result};
pub use lattice::{
    blowup_at_node, degree_on_curve, intersect, is_negative_definite, validate_configuration,
    Configuration, Curve, CurveDivisor, Divisor, IncidencePoint,
};
pub use rational::Q;
