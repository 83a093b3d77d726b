//! Arithmetic with infinitesimals: an exact tier of truncated Laurent
//! series in a canonical infinitesimal `eps`, a sequence tier of rational
//! streams, and the calculus built on top of them.

pub mod calculus;
pub mod coeff;
pub mod config;
pub mod delta;
pub mod error;
pub mod exact_value;
pub mod expr;
pub mod rational;
pub mod real;
pub mod roots;
pub mod stream_value;
pub mod verdict;

pub use coeff::{Coefficient, Kind};
pub use config::Config;
pub use error::{Error, Result};
pub use exact_value::{Classification, HyperSeries};
pub use expr::{EvalContext, Expr, UnaryFn};
pub use stream_value::{HyperNat, HyperStream};
pub use verdict::{Estimate, Evidence, Outcome, Property, Verdict};
