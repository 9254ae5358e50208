//! Operator-ideal norms on finite-dimensional `ℓ_p` spaces.
//!
//! Every estimate is returned as a [`NormEstimate`] tagged exact, lower, upper or
//! Monte Carlo, so that callers can only combine values in sound directions.

pub mod banach;
pub mod enumerate;
pub mod error;
pub mod estimate;
pub mod exponent;
pub mod grothendieck;
pub mod ideals;
pub mod io;
pub mod linalg;
pub mod opnorm;
pub mod sampling;
pub mod randsums;
pub mod seq;
pub mod space;
pub mod suite;
pub mod witness;

pub use error::{Error, Result};
pub use estimate::{EstimateKind, NormEstimate};
pub use exponent::Exponent;
pub use sampling::RandomPlan;
pub use space::{Operator, SpaceSpec};
