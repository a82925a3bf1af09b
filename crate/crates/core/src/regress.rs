//! Ordinary least squares for the trained readout weights.
//!
//! The solver must never abort on linearly dependent columns: random feature
//! maps at small sample sizes routinely produce rank-deficient designs, and
//! any minimizer yields the same fitted values. We therefore solve through an
//! SVD with a relative singular-value cutoff, returning the minimum-norm
//! minimizer, instead of inverting the Gram matrix.
//!
//! For tall systems the design is first compressed by a Householder QR; the
//! SVD of the triangular factor has the same singular values, so the cutoff
//! and the minimum-norm property are unchanged while repeated solves against
//! the same design (Q-iteration) become cheap.

use nalgebra::{DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::real::Real;

/// Relative singular-value cutoff: directions below `1e-10 * sigma_max` are
/// treated as null space.
const SV_CUTOFF: f64 = 1e-10;

/// One regression problem: feature rows `X` and targets `y`.
#[derive(Debug, Clone)]
pub struct Design<R: Real> {
    x: DMatrix<R>,
    y: DVector<R>,
}

impl<R: Real> Design<R> {
    pub fn new(x: DMatrix<R>, y: DVector<R>) -> Result<Self> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::config("design matrix must be non-empty"));
        }
        if x.nrows() != y.len() {
            return Err(Error::shape(format!(
                "{} design rows vs {} targets",
                x.nrows(),
                y.len()
            )));
        }
        if !x.iter().all(|v| v.is_finite()) || !y.iter().all(|v| v.is_finite()) {
            return Err(Error::numerical("design contains non-finite entries"));
        }
        Ok(Design { x, y })
    }

    pub fn x(&self) -> &DMatrix<R> {
        &self.x
    }

    pub fn y(&self) -> &DVector<R> {
        &self.y
    }
}

/// Trained readout weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Theta<R: Real> {
    weights: DVector<R>,
}

impl<R: Real> Theta<R> {
    pub fn new(weights: DVector<R>) -> Self {
        Theta { weights }
    }

    pub fn zeros(len: usize) -> Self {
        Theta {
            weights: DVector::zeros(len),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.len() == 0
    }

    pub fn weights(&self) -> &DVector<R> {
        &self.weights
    }
}

/// Factorization of one design matrix, reusable across target vectors.
pub struct LsSolver<R: Real> {
    /// Householder QR of the (possibly ridge-augmented) design, when tall.
    qr: Option<nalgebra::linalg::QR<R, Dyn, Dyn>>,
    /// SVD of the triangular factor (tall) or of the design itself (wide).
    svd: nalgebra::linalg::SVD<R, Dyn, Dyn>,
    cutoff: R,
    cols: usize,
    data_rows: usize,
    ridge_rows: usize,
}

impl<R: Real> LsSolver<R> {
    pub fn new(x: DMatrix<R>) -> Result<Self> {
        Self::with_ridge(x, R::zero())
    }

    /// Ridge penalty `lambda >= 0` applied through row augmentation with
    /// `sqrt(lambda) * I`; `lambda = 0` is plain least squares.
    pub fn with_ridge(x: DMatrix<R>, ridge: R) -> Result<Self> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::config("design matrix must be non-empty"));
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::numerical("design contains non-finite entries"));
        }
        if !ridge.is_finite() || ridge < R::zero() {
            return Err(Error::config(format!(
                "ridge penalty must be non-negative and finite, got {ridge:?}"
            )));
        }

        let cols = x.ncols();
        let data_rows = x.nrows();
        let (augmented, ridge_rows) = if ridge > R::zero() {
            let scale = ridge.sqrt();
            let mut aug = x.insert_rows(data_rows, cols, R::zero());
            for j in 0..cols {
                aug[(data_rows + j, j)] = scale;
            }
            (aug, cols)
        } else {
            (x, 0)
        };

        let (qr, small) = if augmented.nrows() >= cols {
            let qr = augmented.qr();
            let r = qr.r();
            (Some(qr), r)
        } else {
            (None, augmented)
        };

        let svd = small
            .try_svd(true, true, R::machine_epsilon(), 0)
            .ok_or_else(|| Error::numerical("SVD failed to converge"))?;
        let sigma_max = svd
            .singular_values
            .iter()
            .fold(R::zero(), |acc, &s| acc.max(s));
        let cutoff = R::lit(SV_CUTOFF) * sigma_max;

        Ok(LsSolver {
            qr,
            svd,
            cutoff,
            cols,
            data_rows,
            ridge_rows,
        })
    }

    pub fn num_rows(&self) -> usize {
        self.data_rows
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    /// Minimum-norm minimizer of `|X theta - y|^2` for one target vector.
    pub fn solve(&self, y: &DVector<R>) -> Result<Theta<R>> {
        if y.len() != self.data_rows {
            return Err(Error::shape(format!(
                "{} targets vs {} design rows",
                y.len(),
                self.data_rows
            )));
        }
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::numerical("targets contain non-finite entries"));
        }
        let weights = match &self.qr {
            Some(qr) => {
                let mut z = if self.ridge_rows > 0 {
                    let mut z = DVector::zeros(self.data_rows + self.ridge_rows);
                    z.rows_mut(0, self.data_rows).copy_from(y);
                    z
                } else {
                    y.clone()
                };
                qr.q_tr_mul(&mut z);
                let head = z.rows(0, self.cols).into_owned();
                self.svd
                    .solve(&head, self.cutoff)
                    .map_err(Error::numerical)?
            }
            None => self.svd.solve(y, self.cutoff).map_err(Error::numerical)?,
        };
        let weights = DVector::from_column_slice(weights.as_slice());
        if !weights.iter().all(|v| v.is_finite()) {
            return Err(Error::numerical("least squares produced non-finite weights"));
        }
        Ok(Theta::new(weights))
    }
}

/// Convenience wrapper: factorize and solve one design.
pub fn solve_ls<R: Real>(design: &Design<R>) -> Result<Theta<R>> {
    LsSolver::new(design.x.clone())?.solve(&design.y)
}

/// Least squares with a ridge penalty.
pub fn solve_ls_ridge<R: Real>(design: &Design<R>, ridge: R) -> Result<Theta<R>> {
    LsSolver::with_ridge(design.x.clone(), ridge)?.solve(&design.y)
}
