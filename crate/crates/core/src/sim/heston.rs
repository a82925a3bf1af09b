//! Heston stochastic volatility, full-truncation Euler scheme.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::real::Real;

use super::{ensure_finite, path_rng, validate_path_count, ModelTag, PathSet, TimeGrid};

/// Heston dynamics per coordinate:
/// `dX = r X dt + sqrt(v) X dW`, `dv = -kappa (v - v_inf) dt + sigma_vol sqrt(v) dB`,
/// with `corr(W_k, B_k) = rho` inside each coordinate pair and independent
/// coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HestonConfig<R: Real> {
    pub dim: usize,
    pub x0: R,
    pub rate: R,
    /// Volatility of volatility.
    pub sigma_vol: R,
    /// Long-term variance.
    pub v_inf: R,
    /// Mean-reversion speed.
    pub kappa: R,
    /// Correlation between the price and variance drivers, in `[-1, 1]`.
    pub rho: R,
    /// Initial variance.
    pub v0: R,
}

impl<R: Real> HestonConfig<R> {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::config("dimension must be at least 1"));
        }
        let finite = self.x0.is_finite()
            && self.rate.is_finite()
            && self.sigma_vol.is_finite()
            && self.v_inf.is_finite()
            && self.kappa.is_finite()
            && self.rho.is_finite()
            && self.v0.is_finite();
        if !finite {
            return Err(Error::config("Heston parameters must be finite"));
        }
        if !(self.x0 > R::zero()) {
            return Err(Error::config("initial price must be positive"));
        }
        if self.sigma_vol < R::zero() {
            return Err(Error::config("vol-of-vol must be non-negative"));
        }
        if self.v_inf < R::zero() || self.kappa < R::zero() || self.v0 < R::zero() {
            return Err(Error::config(
                "v_inf, kappa and v0 must be non-negative",
            ));
        }
        if self.rho.abs() > R::one() {
            return Err(Error::config("correlation must lie in [-1, 1]"));
        }
        Ok(())
    }
}

/// Price paths together with the variance paths that drove them.
#[derive(Debug, Clone)]
pub struct HestonPaths<R: Real> {
    pub prices: PathSet<R>,
    pub variances: PathSet<R>,
}

/// Simulates price paths only; see [`simulate_heston_paths`] for the
/// variance trajectories as well.
pub fn simulate_heston<R: Real>(
    cfg: &HestonConfig<R>,
    grid: &TimeGrid<R>,
    num_paths: usize,
    seed: u64,
) -> Result<PathSet<R>> {
    Ok(simulate_heston_paths(cfg, grid, num_paths, seed)?.prices)
}

/// Full-truncation Euler on the variance (the drift sees `max(v, 0)`, both
/// diffusions see `sqrt(max(v, 0))`, and the stored variance is clipped at
/// zero) combined with a log-Euler step for the price, which keeps prices
/// positive and the discounted price an exact martingale.
pub fn simulate_heston_paths<R: Real>(
    cfg: &HestonConfig<R>,
    grid: &TimeGrid<R>,
    num_paths: usize,
    seed: u64,
) -> Result<HestonPaths<R>> {
    cfg.validate()?;
    validate_path_count(num_paths)?;

    let n_dates = grid.num_dates();
    let d = cfg.dim;
    let stride = (n_dates + 1) * d;
    let dts: Vec<(R, R)> = (0..n_dates)
        .map(|n| (grid.dt(n), grid.dt(n).sqrt()))
        .collect();
    let rho_bar = (R::one() - cfg.rho * cfg.rho).sqrt();
    let half = R::lit(0.5);

    let mut prices = vec![R::zero(); num_paths * stride];
    let mut variances = vec![R::zero(); num_paths * stride];
    prices
        .par_chunks_mut(stride)
        .zip(variances.par_chunks_mut(stride))
        .enumerate()
        .for_each(|(path, (px, vx))| {
            let mut rng = path_rng(seed, path);
            for k in 0..d {
                px[k] = cfg.x0;
                vx[k] = cfg.v0;
            }
            for (n, &(dt, sqrt_dt)) in dts.iter().enumerate() {
                for k in 0..d {
                    let z1 = R::std_normal(&mut rng);
                    let z2 = R::std_normal(&mut rng);
                    let dw = z1;
                    let db = cfg.rho * z1 + rho_bar * z2;

                    let v = vx[n * d + k];
                    let v_plus = v.max(R::zero());
                    let vol = v_plus.sqrt();

                    px[(n + 1) * d + k] = px[n * d + k]
                        * ((cfg.rate - half * v_plus) * dt + vol * sqrt_dt * dw).exp();
                    let v_next = v - cfg.kappa * (v_plus - cfg.v_inf) * dt
                        + cfg.sigma_vol * vol * sqrt_dt * db;
                    vx[(n + 1) * d + k] = v_next.max(R::zero());
                }
            }
        });

    ensure_finite(&prices, "Heston simulation")?;
    let prices = PathSet::from_values(prices, d, grid.clone(), ModelTag::Heston, seed)?;
    let variances =
        PathSet::from_values(variances, d, grid.clone(), ModelTag::HestonVariance, seed)?;
    Ok(HestonPaths { prices, variances })
}
