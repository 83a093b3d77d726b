//! Engine configuration shared by every module.

use crate::error::{Error, Result};
use crate::exact_value::DEFAULT_WINDOW;
use crate::expr::EvalContext;
use crate::rational::{q2, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    /// Series window W.
    pub window: usize,
    /// Decimal digits P for transcendental coefficients.
    pub precision: u32,
    /// Sampling horizon for stream order and standard-part queries.
    pub horizon: u64,
    /// Horizon for the limit battery and the convergence probe. Sequences
    /// converging like 1/n need far more than `horizon` to settle within
    /// `tol`, and the battery indices are cheap to evaluate that far.
    pub limit_horizon: u64,
    pub tol: Q,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            window: DEFAULT_WINDOW,
            precision: 50,
            horizon: 10_000,
            limit_horizon: 1_000_000_000_000,
            tol: q2(1, 100_000_000),
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::InvalidArgument(format!("window must be at least 2, got {}", self.window)));
        }
        if self.precision < 10 {
            return Err(Error::InvalidArgument(format!("precision must be at least 10, got {}", self.precision)));
        }
        if self.horizon < 16 || self.limit_horizon < 16 {
            return Err(Error::InvalidArgument("horizons must be at least 16".into()));
        }
        if self.tol <= Q::from_integer(0.into()) {
            return Err(Error::InvalidArgument("tol must be positive".into()));
        }
        Ok(())
    }

    pub fn eval_context(&self) -> EvalContext {
        EvalContext::new(self.window, self.precision)
    }
}
