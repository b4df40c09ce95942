//! Wigner-function witnesses of quantum non-Gaussianity.
//!
//! A single-mode state that is a convex mixture of Gaussian states obeys
//! `W(0) ≥ (2/π) exp{−2n̄(1+n̄)}`, where `n̄` is its mean photon number. A
//! state that violates this bound, possibly after a Gaussian map, cannot be
//! such a mixture. This crate evaluates that witness for states in a
//! truncated Fock basis and for the Fock, photon-added coherent and
//! photon-subtracted squeezed families sent through a pure-loss channel.

pub mod channels;
pub mod error;
pub mod exemplars;
pub mod fock;
pub mod gaussian;
pub mod optimize;
pub mod oracle;
pub mod quadrature;
pub mod sweep;
pub mod witness;

pub use channels::{apply_gaussian_map, apply_loss, compose_loss, GaussianMap, LossParam};
pub use error::{Error, Result};
pub use exemplars::{PacParams, PhasePoint, PssParams, StateSpec};
pub use fock::{FockOperator, FockVector, Tolerances};
pub use gaussian::{GaussianMixture, PureGaussianParams};
pub use witness::{bound_min, delta1, delta2, eps_max, Criterion, EpsMaxResult, EpsSearch, LossyFamily, MapFamily, Verdict, WitnessReport};


pub use num_complex::Complex64;
