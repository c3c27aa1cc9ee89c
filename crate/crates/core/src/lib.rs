//! Quasistatic delamination of adhesive contacts in two dimensions.
//!
//! Two interface models share one finite-element discretization of a
//! Kelvin-Voigt bulk:
//!
//! * a brittle interface whose fracture energy depends on the mode mixity of
//!   the current jump, stepped with a viscous displacement problem followed by
//!   an explicit damage update ([`lebim`]);
//! * an associative interface-plasticity model with kinematic hardening and a
//!   gradient-regularized tangential slip, stepped by a joint displacement and
//!   slip minimization followed by the same damage update ([`aprim`]).
//!
//! Every incremental minimization is a convex quadratic program solved by the
//! active-set engine in [`qp`].

pub mod aprim;
pub mod config;
pub mod energetics;
pub mod error;
pub mod fem;
pub mod laws;
pub mod lebim;
pub mod mesh;
pub mod model;
pub mod output;
pub mod qp;
pub mod run;
pub mod scenarios;
pub mod stepping;

pub use error::{Error, Result};
