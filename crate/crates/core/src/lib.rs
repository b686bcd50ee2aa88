//! Exact computation in the classical and quantum cohomology rings of
//! projectivized split bundles `P(O(m_1) + ... + O(m_r))` over `P^n`.
//!
//! The crate is organised bottom-up:
//!
//! - [`poly`]: sparse big-integer polynomials in `xi`, `h`, `q1`, `q2`;
//! - [`bundle`]: validated bundle data and its numerical invariants;
//! - [`rewrite`]: classical and quantum presentations as rewrite systems;
//! - [`pairing`]: Poincare pairing and dual basis;
//! - [`gw`]: Gromov-Witten vanishing and normalization rules;
//! - [`verify`]: the identity and property suite, per instance or scanned.

pub mod bundle;
pub mod error;
pub mod gw;
mod linalg;
pub mod pairing;
pub mod poly;
pub mod rewrite;
pub mod verify;

pub use bundle::{
    anticanonical, chern, grading, intersect_curve, qin_ruan_condition, validate_spec, virtual_dimension, BundleSpec,
    ChernData, CurveClass, DivisorClass, SpecFlags,
};
pub use error::{Error, Result};
pub use poly::{Grading, Monomial, Polynomial, TermRecord, Var, WeightedDegree};
pub use rewrite::{
    build_presentation, chern_leray_product, enumerate_basis, reduce_mod, QVar, Reduction, RewriteRule, RingKind,
    RingPresentation, DEFAULT_MAX_STEPS,
};
