//! Perfect state transfer between real pure states in continuous-time
//! quantum walks on weighted graphs.
//!
//! The walk generated by a real symmetric Hamiltonian `M` is
//! `U(t) = exp(itM)`. Perfect state transfer (PST) from `x` to `y` at time
//! `tau` means `U(tau) x = gamma y` for a unit complex `gamma`.
//! [`pst::pst_decide`] decides PST exactly from the spectral data, and
//! [`pst::verify_pst_numeric`] checks a verdict by direct evolution.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod constructions;
pub mod error;
pub mod extremal;
pub mod families;
pub mod graph;
pub mod io;
pub mod par;
pub mod periodicity;
pub mod pst;
pub mod sensitivity;
pub mod spectral;
pub mod state;
pub mod symbolic;
pub mod synthesis;

pub use error::{PstError, Result};
pub use graph::{Graph, Hamiltonian, HamiltonianKind};
pub use pst::{pst_decide, Decision, PstVerdict};
pub use spectral::{decompose, SpectralDecomposition, ToleranceConfig};
pub use state::PureState;
