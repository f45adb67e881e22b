//! Geometry kernel for ruled developable surfaces attached to a framed
//! space curve, with exact derivatives carried by truncated Taylor jets.
//!
//! The crate is organised bottom-up:
//!
//! * [`jets`] — truncated Taylor series (`Jet`, `VecJet`) and the arithmetic
//!   that propagates derivatives through every later computation,
//! * [`curvelang`] — a small expression language for parametric curves and
//!   surfaces, evaluated directly or over jets,
//! * [`frames`] — orthonormal moving frames along a curve, either extracted
//!   from a surface along its `v = 0` locus or supplied explicitly,
//! * [`developables`] — the two developable surfaces spanned by a framed
//!   curve, their rulings, striction curve and singularity identifier,
//! * [`classify`] — cylinder/cone/generic classification and the
//!   cuspidal-edge/swallowtail tests at singular points,
//! * [`glue`] — two frames sharing a curve and tangent line, the rotation
//!   angle between them, and classification transported across the angle,
//! * [`oracle`] — finite-difference cross-checks kept deliberately
//!   independent of the jet pipeline.

pub mod classify;
pub mod curvelang;
pub mod developables;
pub mod frames;
pub mod glue;
pub mod jets;
pub mod oracle;

pub use classify::{FrontCheck, SingularPointLabel, SingularityLabel, SurfaceClass, SurfaceShape};
pub use curvelang::{parse_expr, parse_map, Arity, Expr, ParametricMap, Var};
pub use developables::{DevelopableSurface, RulingKind, StrictionPoint, SurfaceSample};
pub use frames::{FrameInvariants, FramedCurve, SingularParam};
pub use glue::{
    quarter_turn_ruling_residual, GlueClassification, GlueScene, SlotOutcome, SpecialAngle,
    SurfaceSlot,
};
pub use jets::{Jet, VecJet};
pub use oracle::{
    fd_derivative, lambda_direct, striction_search, write_comparison_csv, ComparisonRecord,
    FdConfig, Scheme,
};
