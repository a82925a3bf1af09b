//! Monte Carlo path simulation under the pricing measure.
//!
//! All simulators share the same reproducibility contract: path `i` is
//! generated from its own ChaCha8 substream (`stream = i` of the run seed),
//! so a path set is bit-identical for a given `(config, grid, num_paths,
//! seed)` regardless of how many threads generate it.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::real::Real;

mod fbm;
mod gbm;
mod heston;

pub use fbm::{simulate_fbm, FbmConfig};
pub use gbm::{simulate_gbm, GbmConfig};
pub use heston::{simulate_heston, simulate_heston_paths, HestonConfig, HestonPaths};

/// Exercise-date grid `t_0 = 0 < t_1 < ... < t_N = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid<R: Real> {
    maturity: R,
    num_dates: usize,
    dates: Vec<R>,
}

impl<R: Real> TimeGrid<R> {
    /// Equidistant grid with `num_dates` steps on `[0, maturity]`.
    pub fn equidistant(maturity: R, num_dates: usize) -> Result<Self> {
        if num_dates == 0 {
            return Err(Error::config("time grid needs at least one date"));
        }
        if !(maturity > R::zero()) || !maturity.is_finite() {
            return Err(Error::config(format!(
                "maturity must be positive and finite, got {maturity:?}"
            )));
        }
        let n = R::from_count(num_dates);
        let dates = (0..=num_dates)
            .map(|k| maturity * (R::from_count(k) / n))
            .collect();
        Ok(TimeGrid {
            maturity,
            num_dates,
            dates,
        })
    }

    /// Grid from explicit dates; must start at 0, end at the maturity and
    /// be strictly increasing.
    pub fn from_dates(dates: Vec<R>) -> Result<Self> {
        if dates.len() < 2 {
            return Err(Error::config("time grid needs at least two instants"));
        }
        if dates[0] != R::zero() {
            return Err(Error::config("time grid must start at t = 0"));
        }
        for w in dates.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::config("time grid must be strictly increasing and finite"));
            }
        }
        let maturity = *dates.last().unwrap();
        Ok(TimeGrid {
            maturity,
            num_dates: dates.len() - 1,
            dates,
        })
    }

    pub fn maturity(&self) -> R {
        self.maturity
    }

    /// Number of steps `N`; the grid holds `N + 1` instants.
    pub fn num_dates(&self) -> usize {
        self.num_dates
    }

    pub fn dates(&self) -> &[R] {
        &self.dates
    }

    /// Step `t_{n+1} - t_n`.
    pub fn dt(&self, n: usize) -> R {
        self.dates[n + 1] - self.dates[n]
    }

    /// Nominal step `T / N`.
    pub fn step(&self) -> R {
        self.maturity / R::from_count(self.num_dates)
    }

    pub fn is_equidistant(&self) -> bool {
        let step = self.step();
        let tol = R::lit(1e-12) * self.maturity;
        (0..self.num_dates).all(|n| (self.dt(n) - step).abs() <= tol)
    }
}

/// Which model produced a path set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelTag {
    Gbm,
    Heston,
    /// Auxiliary variance paths of a Heston simulation.
    HestonVariance,
    Fbm,
    /// Hand-built paths (tests, external data).
    Custom,
}

impl std::fmt::Display for ModelTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ModelTag::Gbm => "gbm",
            ModelTag::Heston => "heston",
            ModelTag::HestonVariance => "heston-variance",
            ModelTag::Fbm => "fbm",
            ModelTag::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// Dense tensor of simulated trajectories, `num_paths x (N+1) x dim`,
/// immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet<R: Real> {
    values: Vec<R>,
    num_paths: usize,
    dim: usize,
    grid: TimeGrid<R>,
    model: ModelTag,
    seed: u64,
}

impl<R: Real> PathSet<R> {
    /// Wraps raw values laid out as `[path][date][coordinate]`.
    ///
    /// Validates the layout, finiteness, an even path count and that every
    /// path starts from the same initial state.
    pub fn from_values(
        values: Vec<R>,
        dim: usize,
        grid: TimeGrid<R>,
        model: ModelTag,
        seed: u64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("path dimension must be at least 1"));
        }
        let stride = (grid.num_dates() + 1) * dim;
        if stride == 0 || values.len() % stride != 0 {
            return Err(Error::shape(format!(
                "value buffer of length {} does not tile into paths of {} entries",
                values.len(),
                stride
            )));
        }
        let num_paths = values.len() / stride;
        if num_paths < 2 || num_paths % 2 != 0 {
            return Err(Error::config(format!(
                "path count must be even and at least 2, got {num_paths}"
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::numerical("path values contain non-finite entries"));
        }
        let x0 = &values[..dim];
        for p in 1..num_paths {
            if &values[p * stride..p * stride + dim] != x0 {
                return Err(Error::config(
                    "all paths must share the same initial state x0",
                ));
            }
        }
        Ok(PathSet {
            values,
            num_paths,
            dim,
            grid,
            model,
            seed,
        })
    }

    pub fn num_paths(&self) -> usize {
        self.num_paths
    }

    /// Training half size `m` of the `2m` simulated paths.
    pub fn half(&self) -> usize {
        self.num_paths / 2
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self) -> &TimeGrid<R> {
        &self.grid
    }

    pub fn model(&self) -> ModelTag {
        self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// State of path `i` at date index `n`.
    pub fn state(&self, path: usize, date: usize) -> &[R] {
        let start = (path * (self.grid.num_dates() + 1) + date) * self.dim;
        &self.values[start..start + self.dim]
    }

    /// The common initial state.
    pub fn x0(&self) -> &[R] {
        self.state(0, 0)
    }

    /// All states at one date as a `num_paths x dim` matrix.
    pub fn date_states(&self, date: usize) -> DMatrix<R> {
        DMatrix::from_fn(self.num_paths, self.dim, |i, k| self.state(i, date)[k])
    }

    /// Raw value buffer; used by bit-exactness tests.
    pub fn raw_values(&self) -> &[R] {
        &self.values
    }
}

/// Independent ChaCha8 substream for one path of a run.
pub(crate) fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

/// Basis construction uses a substream disjoint from all path streams.
pub(crate) fn basis_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    rng
}

pub(crate) fn validate_path_count(num_paths: usize) -> Result<()> {
    if num_paths < 2 || num_paths % 2 != 0 {
        return Err(Error::config(format!(
            "number of paths must be even and at least 2 (train/eval split), got {num_paths}"
        )));
    }
    Ok(())
}

pub(crate) fn ensure_finite<R: Real>(values: &[R], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::numerical(format!("{what} produced non-finite values")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equidistant_grid_endpoints() {
        let g = TimeGrid::<f64>::equidistant(1.0, 10).unwrap();
        assert_eq!(g.dates().len(), 11);
        assert_eq!(g.dates()[0], 0.0);
        assert_eq!(g.dates()[10], 1.0);
        assert!(g.is_equidistant());
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(TimeGrid::<f64>::equidistant(0.0, 10).is_err());
        assert!(TimeGrid::<f64>::equidistant(1.0, 0).is_err());
        assert!(TimeGrid::from_dates(vec![0.0, 0.5, 0.5]).is_err());
        assert!(TimeGrid::from_dates(vec![0.1, 0.5]).is_err());
    }

    #[test]
    fn path_set_validates_initial_state() {
        let grid = TimeGrid::equidistant(1.0, 1).unwrap();
        // two paths, two dates, one coordinate; second path starts elsewhere
        let bad = PathSet::from_values(vec![1.0, 2.0, 1.5, 2.0], 1, grid.clone(), ModelTag::Custom, 0);
        assert!(bad.is_err());
        let good =
            PathSet::from_values(vec![1.0, 2.0, 1.0, 3.0], 1, grid, ModelTag::Custom, 0).unwrap();
        assert_eq!(good.x0(), &[1.0]);
        assert_eq!(good.state(1, 1), &[3.0]);
    }

    #[test]
    fn path_set_rejects_odd_counts_and_nonfinite() {
        let grid = TimeGrid::equidistant(1.0, 1).unwrap();
        assert!(PathSet::from_values(vec![1.0, 2.0], 1, grid.clone(), ModelTag::Custom, 0).is_err());
        assert!(PathSet::from_values(
            vec![1.0, f64::NAN, 1.0, 2.0],
            1,
            grid,
            ModelTag::Custom,
            0
        )
        .is_err());
    }
}
