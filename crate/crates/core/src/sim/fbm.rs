//! Exact sampling of fractional Brownian motion on a fixed grid.
//!
//! The Gaussian vector `(W_{t_1}, ..., W_{t_N})` is drawn by factorizing the
//! exact covariance matrix, so the discrete marginals carry no scheme bias.
//! The dense factorization bounds the grid at `N <= 2048`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::real::Real;

use super::{ensure_finite, path_rng, validate_path_count, ModelTag, PathSet, TimeGrid};

/// Upper bound on grid size for the dense covariance factorization.
pub const MAX_FBM_DATES: usize = 2048;

/// Fractional Brownian motion with Hurst parameter `H` in `(0, 1)`;
/// coordinates are independent copies started at `x0` (default 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FbmConfig<R: Real> {
    pub dim: usize,
    pub hurst: R,
    pub x0: R,
}

impl<R: Real> FbmConfig<R> {
    pub fn new(dim: usize, hurst: R) -> Self {
        FbmConfig {
            dim,
            hurst,
            x0: R::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::config("dimension must be at least 1"));
        }
        if !self.hurst.is_finite() || !(self.hurst > R::zero()) || !(self.hurst < R::one()) {
            return Err(Error::config(format!(
                "Hurst parameter must lie in (0, 1), got {:?}",
                self.hurst
            )));
        }
        if !self.x0.is_finite() {
            return Err(Error::config("initial value must be finite"));
        }
        Ok(())
    }
}

/// Covariance `cov(W_{t_a}, W_{t_b}) = (t_a^{2H} + t_b^{2H} - |t_a - t_b|^{2H}) / 2`
/// over the non-zero grid dates.
pub(crate) fn fbm_covariance<R: Real>(grid: &TimeGrid<R>, hurst: R) -> DMatrix<R> {
    let two_h = hurst * R::lit(2.0);
    let ts = &grid.dates()[1..];
    let half = R::lit(0.5);
    DMatrix::from_fn(ts.len(), ts.len(), |a, b| {
        half * (ts[a].powf(two_h) + ts[b].powf(two_h) - (ts[a] - ts[b]).abs().powf(two_h))
    })
}

/// Lower-triangular Cholesky factor with escalating diagonal jitter.
///
/// Starts at `1e-12 * max(diag)` and escalates by a factor of 10 at most
/// three times before giving up with diagnostics.
pub(crate) fn cholesky_with_jitter<R: Real>(matrix: &DMatrix<R>) -> Result<DMatrix<R>> {
    if let Some(chol) = nalgebra::Cholesky::new(matrix.clone()) {
        return Ok(chol.unpack());
    }
    let max_diag = matrix
        .diagonal()
        .iter()
        .fold(R::zero(), |acc, &v| acc.max(v.abs()));
    let mut jitter = R::lit(1e-12) * max_diag;
    for _ in 0..4 {
        let mut jittered = matrix.clone();
        for i in 0..matrix.nrows() {
            jittered[(i, i)] += jitter;
        }
        if let Some(chol) = nalgebra::Cholesky::new(jittered) {
            return Ok(chol.unpack());
        }
        jitter *= R::lit(10.0);
    }
    Err(Error::numerical(format!(
        "covariance factorization failed for a {}x{} matrix (max diagonal {:?}, final jitter {:?})",
        matrix.nrows(),
        matrix.ncols(),
        max_diag,
        jitter
    )))
}

/// Draws exact fBM trajectories: `W = x0 + L z` with `L` the covariance
/// factor and `z` i.i.d. standard normals, independently per coordinate.
pub fn simulate_fbm<R: Real>(
    cfg: &FbmConfig<R>,
    grid: &TimeGrid<R>,
    num_paths: usize,
    seed: u64,
) -> Result<PathSet<R>> {
    cfg.validate()?;
    validate_path_count(num_paths)?;
    let n_dates = grid.num_dates();
    if n_dates > MAX_FBM_DATES {
        return Err(Error::config(format!(
            "fBM grid limited to {MAX_FBM_DATES} dates, got {n_dates}"
        )));
    }

    let factor = cholesky_with_jitter(&fbm_covariance(grid, cfg.hurst))?;
    let d = cfg.dim;
    let stride = (n_dates + 1) * d;

    let mut values = vec![R::zero(); num_paths * stride];
    values
        .par_chunks_mut(stride)
        .enumerate()
        .for_each(|(path, chunk)| {
            let mut rng = path_rng(seed, path);
            let mut z = DVector::<R>::zeros(n_dates);
            for k in 0..d {
                chunk[k] = cfg.x0;
                for zi in z.iter_mut() {
                    *zi = R::std_normal(&mut rng);
                }
                let w = &factor * &z;
                for n in 1..=n_dates {
                    chunk[n * d + k] = cfg.x0 + w[n - 1];
                }
            }
        });

    ensure_finite(&values, "fBM simulation")?;
    PathSet::from_values(values, d, grid.clone(), ModelTag::Fbm, seed)
}
