//! The pricers.
//!
//! Two families share all of their control flow:
//!
//! * backward induction ([`price_rlsm`], [`price_rrlsm`], [`price_lsm`]) —
//!   one readout per date, trained backwards, with the continuation estimate
//!   used only for the exercise decision;
//! * fitted Q-iteration ([`price_rfqi`], [`price_fqi`]) — a single
//!   time-aware readout refit on all dates at once until the weights settle,
//!   with the continuation estimate used for the decision and the value.
//!
//! Common to both: `2m` simulated paths split in half, the first `m` fitting
//! the weights and the second `m` pricing, so the exercise rule never peeks
//! at the paths it is evaluated on.

use std::time::Duration;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::regress::Theta;
use crate::sim::TimeGrid;

mod backward;
mod fitted_q;

pub use backward::{price_lsm, price_rlsm, price_rrlsm};
pub use fitted_q::{price_fqi, price_rfqi};

/// Per-step discount factor `alpha` in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscountFactor<R: Real>(R);

impl<R: Real> DiscountFactor<R> {
    pub fn new(alpha: R) -> Result<Self> {
        if !alpha.is_finite() || !(alpha > R::zero()) || alpha > R::one() {
            return Err(Error::config(format!(
                "discount factor must lie in (0, 1], got {alpha:?}"
            )));
        }
        Ok(DiscountFactor(alpha))
    }

    /// `alpha = exp(-r dt)` for an equidistant grid.
    pub fn from_rate(rate: R, grid: &TimeGrid<R>) -> Result<Self> {
        if !rate.is_finite() || rate < R::zero() {
            return Err(Error::config(format!(
                "per-step discounting needs a non-negative finite rate, got {rate:?}"
            )));
        }
        if !grid.is_equidistant() {
            return Err(Error::config(
                "a single per-step discount factor requires an equidistant grid",
            ));
        }
        Self::new((-rate * grid.step()).exp())
    }

    pub fn alpha(&self) -> R {
        self.0
    }
}

/// Trained readout weights of one pricing run: per-date for the backward
/// family, a single vector for Q-iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum ThetaSchedule<R: Real> {
    /// One readout per date `1..=N-1`, indexed by `date - 1`.
    PerDate(Vec<Theta<R>>),
    Global(Theta<R>),
}

impl<R: Real> ThetaSchedule<R> {
    /// Total number of trained parameters.
    pub fn num_parameters(&self) -> usize {
        match self {
            ThetaSchedule::PerDate(thetas) => thetas.iter().map(Theta::len).sum(),
            ThetaSchedule::Global(theta) => theta.len(),
        }
    }
}

/// Non-fatal observations made during a pricing run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PricerWarning {
    /// Fewer regression rows than features; the minimum-norm solution is
    /// well defined but prone to overfitting.
    UnderdeterminedRegression { rows: usize, cols: usize },
    /// Q-iteration hit its iteration cap before the weights settled.
    NotConverged { iterations: usize },
    /// Polynomial basis size grows quadratically in the dimension.
    CostlyPolynomialBasis { dim: usize },
}

impl std::fmt::Display for PricerWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PricerWarning::UnderdeterminedRegression { rows, cols } => write!(
                f,
                "regression under-determined: {rows} rows for {cols} features"
            ),
            PricerWarning::NotConverged { iterations } => {
                write!(f, "weights did not settle within {iterations} iterations")
            }
            PricerWarning::CostlyPolynomialBasis { dim } => write!(
                f,
                "degree-2 basis over {dim} inputs is large; expect long regressions"
            ),
        }
    }
}

/// Result of one pricing run.
#[derive(Debug, Clone)]
pub struct PriceEstimate<R: Real> {
    /// Price at time 0, never below the immediate payoff.
    pub price: R,
    /// Fraction of paths exercising at each decision date `1..=N-1`.
    pub exercise_fraction_per_date: Vec<R>,
    /// Trained readout weights.
    pub theta: ThetaSchedule<R>,
    /// Pathwise value at the first exercise date, one entry per simulated
    /// path. For the backward family this is `alpha^(tau-1) g(x_tau)` of the
    /// realized stopping date `tau`; for Q-iteration the fitted value
    /// `max(g, c)`.
    pub date1_values: Vec<R>,
    /// Wall-clock time of the pricing computation (simulation excluded).
    pub duration: Duration,
    /// Seed of the path set priced.
    pub seed: u64,
    /// Number of Q-iterations performed, if the algorithm iterates.
    pub iterations: Option<usize>,
    pub warnings: Vec<PricerWarning>,
}

/// Knobs shared by every pricer's regression step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions<R: Real> {
    /// Restrict regression rows (and exercise) to in-the-money states,
    /// the classical Longstaff-Schwartz refinement. Off by default.
    pub itm_only: bool,
    /// Ridge penalty; zero (plain least squares) by default.
    pub ridge: R,
}

impl<R: Real> Default for FitOptions<R> {
    fn default() -> Self {
        FitOptions {
            itm_only: false,
            ridge: R::zero(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discount_factor_bounds() {
        assert!(DiscountFactor::new(0.5).is_ok());
        assert!(DiscountFactor::new(1.0).is_ok());
        assert!(DiscountFactor::new(0.0).is_err());
        assert!(DiscountFactor::new(1.01).is_err());
    }

    #[test]
    fn discount_factor_from_rate_matches_the_step() {
        let grid = TimeGrid::equidistant(1.0, 10).unwrap();
        let alpha = DiscountFactor::from_rate(0.02, &grid).unwrap().alpha();
        assert!((alpha - (-0.002_f64).exp()).abs() < 1e-15);
        assert!(DiscountFactor::from_rate(-0.01, &grid).is_err());
    }

    #[test]
    fn parameter_counts() {
        let per_date = ThetaSchedule::PerDate(vec![Theta::<f64>::zeros(21); 9]);
        assert_eq!(per_date.num_parameters(), 9 * 21);
        let global = ThetaSchedule::Global(Theta::<f64>::zeros(21));
        assert_eq!(global.num_parameters(), 21);
    }
}
