//! Geometric Brownian motion with independent coordinates.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::real::Real;

use super::{ensure_finite, path_rng, validate_path_count, ModelTag, PathSet, TimeGrid};

/// Black-Scholes dynamics `dX = r X dt + sigma X dW` per coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbmConfig<R: Real> {
    pub dim: usize,
    /// Initial price, shared by all coordinates.
    pub x0: R,
    /// Risk-neutral drift per year.
    pub rate: R,
    /// Volatility per year.
    pub sigma: R,
}

impl<R: Real> GbmConfig<R> {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::config("dimension must be at least 1"));
        }
        if !self.x0.is_finite() || !(self.x0 > R::zero()) {
            return Err(Error::config("initial price must be positive and finite"));
        }
        if !self.rate.is_finite() {
            return Err(Error::config("drift rate must be finite"));
        }
        if !self.sigma.is_finite() || self.sigma < R::zero() {
            return Err(Error::config("volatility must be non-negative and finite"));
        }
        Ok(())
    }
}

/// Samples the exact log-normal transition on every grid step, so the
/// marginal law at each date is free of discretization bias.
pub fn simulate_gbm<R: Real>(
    cfg: &GbmConfig<R>,
    grid: &TimeGrid<R>,
    num_paths: usize,
    seed: u64,
) -> Result<PathSet<R>> {
    cfg.validate()?;
    validate_path_count(num_paths)?;

    let n_dates = grid.num_dates();
    let d = cfg.dim;
    let stride = (n_dates + 1) * d;
    let half_var = cfg.sigma * cfg.sigma / R::lit(2.0);
    // per-step drift and diffusion scales
    let steps: Vec<(R, R)> = (0..n_dates)
        .map(|n| {
            let dt = grid.dt(n);
            ((cfg.rate - half_var) * dt, cfg.sigma * dt.sqrt())
        })
        .collect();

    let mut values = vec![R::zero(); num_paths * stride];
    values
        .par_chunks_mut(stride)
        .enumerate()
        .for_each(|(path, chunk)| {
            let mut rng = path_rng(seed, path);
            for k in 0..d {
                chunk[k] = cfg.x0;
            }
            for (n, &(drift, vol)) in steps.iter().enumerate() {
                for k in 0..d {
                    let z = R::std_normal(&mut rng);
                    chunk[(n + 1) * d + k] = chunk[n * d + k] * (drift + vol * z).exp();
                }
            }
        });

    ensure_finite(&values, "GBM simulation")?;
    PathSet::from_values(values, d, grid.clone(), ModelTag::Gbm, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid() -> TimeGrid<f64> {
        TimeGrid::equidistant(1.0, 10).unwrap()
    }

    #[test]
    fn zero_volatility_is_the_deterministic_exponential() {
        let cfg = GbmConfig {
            dim: 2,
            x0: 100.0,
            rate: 0.02,
            sigma: 0.0,
        };
        let paths = simulate_gbm(&cfg, &grid(), 4, 7).unwrap();
        for i in 0..4 {
            for (n, &t) in paths.grid().dates().iter().enumerate() {
                for k in 0..2 {
                    assert_relative_eq!(
                        paths.state(i, n)[k],
                        100.0 * (0.02 * t).exp(),
                        max_relative = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn zero_rate_zero_vol_is_constant() {
        let cfg = GbmConfig {
            dim: 1,
            x0: 50.0,
            rate: 0.0,
            sigma: 0.0,
        };
        let paths = simulate_gbm(&cfg, &grid(), 2, 0).unwrap();
        assert!(paths.raw_values().iter().all(|&v| v == 50.0));
    }

    #[test]
    fn terminal_mean_matches_the_closed_form_first_moment() {
        let cfg = GbmConfig {
            dim: 1,
            x0: 100.0,
            rate: 0.02,
            sigma: 0.2,
        };
        let m = 20_000;
        let paths = simulate_gbm(&cfg, &grid(), m, 42).unwrap();
        let terminal: Vec<f64> = (0..m).map(|i| paths.state(i, 10)[0]).collect();
        let mean = terminal.iter().sum::<f64>() / m as f64;
        let var = terminal.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m as f64 - 1.0);
        let se = (var / m as f64).sqrt();
        let expected = 100.0 * (0.02_f64).exp();
        assert!(
            (mean - expected).abs() <= 3.0 * se,
            "mean {mean} vs {expected} (3se = {})",
            3.0 * se
        );
    }

    #[test]
    fn same_seed_gives_bit_identical_paths() {
        let cfg = GbmConfig {
            dim: 3,
            x0: 100.0,
            rate: 0.02,
            sigma: 0.2,
        };
        let a = simulate_gbm(&cfg, &grid(), 64, 9).unwrap();
        let b = simulate_gbm(&cfg, &grid(), 64, 9).unwrap();
        assert_eq!(a.raw_values(), b.raw_values());
        let c = simulate_gbm(&cfg, &grid(), 64, 10).unwrap();
        assert_ne!(a.raw_values(), c.raw_values());
    }

    #[test]
    fn odd_path_count_is_a_config_error() {
        let cfg = GbmConfig {
            dim: 1,
            x0: 100.0,
            rate: 0.02,
            sigma: 0.2,
        };
        assert!(simulate_gbm(&cfg, &grid(), 3, 0).is_err());
        let bad = GbmConfig {
            sigma: f64::NAN,
            ..cfg
        };
        assert!(simulate_gbm(&bad, &grid(), 4, 0).is_err());
    }
}
