//! Analytic machinery for the Erlang(n) dual risk model: the surplus
//! `U(t) = u - c t + S(t)` drains at a constant expense rate and jumps upward
//! at renewal-process gain epochs. The crate computes, in closed form,
//!
//! * the Laplace transform of the ruin time and the ultimate ruin probability,
//! * discounted moments of single and aggregate dividends under a constant
//!   reflecting barrier,
//! * the distribution of a single dividend amount and the probability of
//!   getting a dividend at all,
//! * the distribution of the number of gains down to ruin and of the number
//!   of gains needed to reach an upper target.
//!
//! Everything is carried by an exact exponential-polynomial algebra
//! (sums of `coeff * u^j * exp(-r u)` terms), which is closed under the
//! differential, convolution and transform operators the model needs.

pub mod counts;
pub mod dividends;
pub mod divdist;
pub mod error;
pub mod exppoly;
pub mod lundberg;
pub mod model;
pub mod poly;
pub mod ruin;

pub use error::{CoreError, Result};
pub use exppoly::{ExpoPolynomial, RationalFunction};
pub use lundberg::{LundbergRootSet, RootClass};
pub use model::{GainComponent, GainDistribution, IncomeCondition, ModelSpec};

pub(crate) type C64 = num_complex::Complex64;
