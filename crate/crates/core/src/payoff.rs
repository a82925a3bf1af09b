//! Exercise payoffs evaluated on undiscounted state vectors.
//!
//! Discounting lives entirely in the stopping algorithms; a payoff only maps
//! a state `x` to the cash received on exercise.

use crate::error::{Error, Result};
use crate::real::Real;

/// Payoff family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayoffKind {
    /// `(max_i x_i - K)+`
    MaxCall,
    /// `(K - (prod_i x_i)^{1/d})+`, requires strictly positive states.
    GeometricPut,
    /// `(mean_i x_i - K)+`
    BasketCall,
    /// `x_1` for one-dimensional problems; may be negative.
    Identity,
    /// `max_i x_i`
    Max,
    /// `mean_i x_i`
    Mean,
}

impl std::fmt::Display for PayoffKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PayoffKind::MaxCall => "max_call",
            PayoffKind::GeometricPut => "geometric_put",
            PayoffKind::BasketCall => "basket_call",
            PayoffKind::Identity => "identity",
            PayoffKind::Max => "max",
            PayoffKind::Mean => "mean",
        };
        f.write_str(s)
    }
}

/// A payoff kind plus its strike where one applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Payoff<R: Real> {
    kind: PayoffKind,
    strike: Option<R>,
}

impl<R: Real> Payoff<R> {
    pub fn max_call(strike: R) -> Result<Self> {
        Self::with_strike(PayoffKind::MaxCall, strike)
    }

    pub fn geometric_put(strike: R) -> Result<Self> {
        Self::with_strike(PayoffKind::GeometricPut, strike)
    }

    pub fn basket_call(strike: R) -> Result<Self> {
        Self::with_strike(PayoffKind::BasketCall, strike)
    }

    pub fn identity() -> Self {
        Payoff {
            kind: PayoffKind::Identity,
            strike: None,
        }
    }

    pub fn max() -> Self {
        Payoff {
            kind: PayoffKind::Max,
            strike: None,
        }
    }

    pub fn mean() -> Self {
        Payoff {
            kind: PayoffKind::Mean,
            strike: None,
        }
    }

    fn with_strike(kind: PayoffKind, strike: R) -> Result<Self> {
        if !strike.is_finite() || !(strike > R::zero()) {
            return Err(Error::config(format!(
                "strike must be positive and finite, got {strike:?}"
            )));
        }
        Ok(Payoff {
            kind,
            strike: Some(strike),
        })
    }

    pub fn kind(&self) -> PayoffKind {
        self.kind
    }

    pub fn strike(&self) -> Option<R> {
        self.strike
    }
}

/// Exercise payoff as seen by the pricers.
///
/// Implemented by [`Payoff`]; kept as a trait so tests can substitute
/// synthetic payoffs (constants, scaled variants).
pub trait PayoffFn<R: Real>: Sync {
    /// Checks compatibility with the state dimension once, up front.
    fn validate_dim(&self, dim: usize) -> Result<()>;

    /// Payoff of the state `x`; `x` is assumed finite.
    fn evaluate(&self, x: &[R]) -> Result<R>;
}

impl<R: Real> PayoffFn<R> for Payoff<R> {
    fn validate_dim(&self, dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(Error::shape("empty state vector"));
        }
        if self.kind == PayoffKind::Identity && dim != 1 {
            return Err(Error::config(format!(
                "identity payoff is defined for d = 1 only, got d = {dim}"
            )));
        }
        Ok(())
    }

    fn evaluate(&self, x: &[R]) -> Result<R> {
        self.validate_dim(x.len())?;
        let d = x.len();
        let value = match self.kind {
            PayoffKind::MaxCall => {
                (max_of(x) - self.strike.unwrap()).max(R::zero())
            }
            PayoffKind::GeometricPut => {
                // geometric mean via the log domain to stay stable in high d
                let mut log_sum = R::zero();
                for &xi in x {
                    if !(xi > R::zero()) {
                        return Err(Error::domain(format!(
                            "geometric put requires strictly positive states, got {xi:?}"
                        )));
                    }
                    log_sum += xi.ln();
                }
                let geo_mean = (log_sum / R::from_count(d)).exp();
                (self.strike.unwrap() - geo_mean).max(R::zero())
            }
            PayoffKind::BasketCall => {
                let mean = x.iter().copied().sum::<R>() / R::from_count(d);
                (mean - self.strike.unwrap()).max(R::zero())
            }
            PayoffKind::Identity => x[0],
            PayoffKind::Max => max_of(x),
            PayoffKind::Mean => x.iter().copied().sum::<R>() / R::from_count(d),
        };
        Ok(value)
    }
}

fn max_of<R: Real>(x: &[R]) -> R {
    x.iter().copied().fold(x[0], |a, b| a.max(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn direct_formulas() {
        let max_call = Payoff::max_call(100.0).unwrap();
        assert_eq!(max_call.evaluate(&[110.0, 90.0]).unwrap(), 10.0);

        let geo_put = Payoff::geometric_put(100.0).unwrap();
        let v = geo_put.evaluate(&[64.0, 100.0]).unwrap();
        assert!((v - 20.0).abs() < 1e-12, "geometric mean 80 -> payoff 20, got {v}");

        let basket = Payoff::basket_call(100.0).unwrap();
        assert_eq!(basket.evaluate(&[95.0, 99.0]).unwrap(), 0.0);

        let id = Payoff::identity();
        assert_eq!(id.evaluate(&[-0.3]).unwrap(), -0.3);
    }

    #[test]
    fn identity_rejects_multivariate_states() {
        let id = Payoff::<f64>::identity();
        assert!(matches!(id.evaluate(&[1.0, 2.0]), Err(Error::Config(_))));
    }

    #[test]
    fn geometric_put_rejects_non_positive_states() {
        let geo = Payoff::geometric_put(100.0).unwrap();
        assert!(matches!(geo.evaluate(&[50.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(geo.evaluate(&[50.0, -1.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn strikes_must_be_positive() {
        assert!(Payoff::max_call(0.0).is_err());
        assert!(Payoff::basket_call(-5.0).is_err());
        assert!(Payoff::geometric_put(f64::INFINITY).is_err());
    }

    #[test]
    fn option_payoffs_are_non_negative() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let payoffs = [
            Payoff::max_call(100.0).unwrap(),
            Payoff::geometric_put(100.0).unwrap(),
            Payoff::basket_call(100.0).unwrap(),
        ];
        for _ in 0..500 {
            let d = rng.random_range(1..6);
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(1.0..250.0)).collect();
            for p in &payoffs {
                assert!(p.evaluate(&x).unwrap() >= 0.0);
            }
        }
    }

    #[test]
    fn calls_are_positively_homogeneous_in_state_and_strike() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let d = rng.random_range(1..6);
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(1.0..250.0)).collect();
            let lambda: f64 = rng.random_range(0.1..10.0);
            let scaled: Vec<f64> = x.iter().map(|v| lambda * v).collect();
            for make in [Payoff::max_call, Payoff::basket_call] {
                let base = make(100.0).unwrap().evaluate(&x).unwrap();
                let big = make(lambda * 100.0).unwrap().evaluate(&scaled).unwrap();
                assert!((big - lambda * base).abs() <= 1e-9 * (1.0 + big.abs()));
            }
        }
    }

    #[test]
    fn payoffs_are_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let payoffs = [
            Payoff::max_call(100.0).unwrap(),
            Payoff::geometric_put(100.0).unwrap(),
            Payoff::basket_call(100.0).unwrap(),
            Payoff::max(),
            Payoff::mean(),
        ];
        for _ in 0..200 {
            let d = rng.random_range(2..6);
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(1.0..250.0)).collect();
            let mut perm = x.clone();
            // rotate by a random offset, then swap a random pair
            let offset = rng.random_range(0..d);
            perm.rotate_left(offset);
            let (i, j) = (rng.random_range(0..d), rng.random_range(0..d));
            perm.swap(i, j);
            for p in &payoffs {
                let a = p.evaluate(&x).unwrap();
                let b = p.evaluate(&perm).unwrap();
                assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }
    }
}
