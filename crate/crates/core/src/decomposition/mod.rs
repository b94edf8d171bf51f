//! Cut systems on the genus-2 surface, restriction of cocycles to pieces,
//! bending flows and the numerical certificates built on them.

mod cut;
mod flow;
mod verify;

pub use cut::{build_cut_system, CutCurve, CutKind, CutSystem, Piece};
pub use flow::{bending_cocycle, bending_flow, BendingParameter, BendingRule, INVARIANCE_TOL};
pub use verify::{
    exactness_report, moment_check, normalize_on_piece, restrict_cocycle, restricted_rep,
    verify_decomposition, DecompositionReport, ExactnessReport, MomentOptions, MomentReport,
    MOMENT_SIGN,
};
