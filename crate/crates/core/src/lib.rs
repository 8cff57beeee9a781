//! Constrained maximal output Schatten-2 norms `υ₂` of completely positive maps:
//! closed forms, a certifying optimizer over `F_d(B)`, and a numerical check suite.

pub mod channel;
pub mod cli;
pub mod closed_form;
pub mod error;
pub mod feasible;
pub mod optimize;
pub mod rng;
pub mod tensor;
pub mod verify;
