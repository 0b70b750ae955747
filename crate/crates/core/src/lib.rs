//! Exact construction and analysis of Jacobian pairs over prime fields.
//!
//! The crate is organised bottom-up: [`field`] arithmetic, sparse
//! polynomials in [`poly`], binary forms in [`forms`], endomorphism chains in
//! [`morph`], pair-level checks in [`analyze`], generators and searches in
//! [`families`], and batch reporting in [`report`].

pub mod analyze;
pub mod families;
pub mod field;
pub mod forms;
mod linalg;
pub mod morph;
pub mod poly;
pub mod report;
pub mod sample;

pub use field::{FieldCtx, FieldError, FpElem};
pub use poly::{ExponentVector, HomogComponent, MultiPoly, PolyError};
