//! Frozen random hidden layers and the polynomial baseline basis.
//!
//! A basis is sampled once from seeded Gaussians and never mutated again;
//! only the linear readout on top of it is ever trained. Feature vectors
//! always end with a constant 1 so the readout carries its own intercept.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::real::Real;
use crate::sim::TimeGrid;
use crate::util::Fnv64;

/// Hidden-layer activation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation<R: Real> {
    /// `x` for `x >= 0`, `slope * x` otherwise; `slope` in `(0, 1)`.
    LeakyRelu { slope: R },
    Tanh,
}

impl<R: Real> Activation<R> {
    /// Leaky ReLU with the conventional slope 0.01.
    pub fn leaky_relu_default() -> Self {
        Activation::LeakyRelu {
            slope: R::lit(0.01),
        }
    }

    pub fn leaky_relu(slope: R) -> Result<Self> {
        if !slope.is_finite() || !(slope > R::zero()) || !(slope < R::one()) {
            return Err(Error::config(format!(
                "leaky ReLU slope must lie in (0, 1), got {slope:?}"
            )));
        }
        Ok(Activation::LeakyRelu { slope })
    }

    #[inline]
    pub fn apply(&self, x: R) -> R {
        match *self {
            Activation::LeakyRelu { slope } => {
                if x >= R::zero() {
                    x
                } else {
                    slope * x
                }
            }
            Activation::Tanh => x.tanh(),
        }
    }

    fn apply_in_place(&self, m: &mut DMatrix<R>) {
        for v in m.iter_mut() {
            *v = self.apply(*v);
        }
    }

    fn tag(&self) -> u64 {
        match self {
            Activation::LeakyRelu { .. } => 1,
            Activation::Tanh => 2,
        }
    }
}

fn validate_std<R: Real>(value: R, what: &str) -> Result<()> {
    if !value.is_finite() || value < R::zero() {
        return Err(Error::config(format!(
            "{what} must be non-negative and finite, got {value:?}"
        )));
    }
    Ok(())
}

fn gaussian_matrix<R: Real>(
    rows: usize,
    cols: usize,
    std: R,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> DMatrix<R> {
    let mut m = DMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m[(r, c)] = std * R::std_normal(rng);
        }
    }
    m
}

fn hash_matrix<R: Real>(h: &mut Fnv64, m: &DMatrix<R>) {
    h.write_u64(m.nrows() as u64);
    h.write_u64(m.ncols() as u64);
    for v in m.iter() {
        h.write_u64(v.to_f64().expect("finite").to_bits());
    }
}

/// Feedforward random layer: feature map `x -> (sigma(A x + b), 1)` of
/// length `K` with `A`, `b` frozen after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomBasis<R: Real> {
    a: DMatrix<R>,
    b: DVector<R>,
    activation: Activation<R>,
}

impl<R: Real> RandomBasis<R> {
    /// Samples `A` as `(K-1) x in_dim` and `b` as `K-1` independent
    /// `N(0, std^2)` draws; `num_features` counts the appended constant.
    pub fn sample(
        in_dim: usize,
        num_features: usize,
        weight_std: R,
        bias_std: R,
        activation: Activation<R>,
        seed: u64,
    ) -> Result<Self> {
        if in_dim == 0 {
            return Err(Error::config("input dimension must be at least 1"));
        }
        if num_features < 2 {
            return Err(Error::config(format!(
                "need at least 2 features (one hidden node plus the constant), got {num_features}"
            )));
        }
        validate_std(weight_std, "weight standard deviation")?;
        validate_std(bias_std, "bias standard deviation")?;
        let hidden = num_features - 1;
        let mut rng = crate::sim::basis_rng(seed);
        let a = gaussian_matrix(hidden, in_dim, weight_std, &mut rng);
        let b = gaussian_matrix(hidden, 1, bias_std, &mut rng).column(0).into_owned();
        Ok(RandomBasis { a, b, activation })
    }

    /// Wraps explicit layer parameters (tests, serialization).
    pub fn from_parts(a: DMatrix<R>, b: DVector<R>, activation: Activation<R>) -> Result<Self> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::config("hidden layer must be non-empty"));
        }
        if a.nrows() != b.len() {
            return Err(Error::shape(format!(
                "bias length {} does not match {} hidden rows",
                b.len(),
                a.nrows()
            )));
        }
        if !a.iter().all(|v| v.is_finite()) || !b.iter().all(|v| v.is_finite()) {
            return Err(Error::config("layer parameters must be finite"));
        }
        Ok(RandomBasis { a, b, activation })
    }

    pub fn in_dim(&self) -> usize {
        self.a.ncols()
    }

    /// Feature count `K`, including the constant.
    pub fn num_features(&self) -> usize {
        self.a.nrows() + 1
    }

    pub fn activation(&self) -> Activation<R> {
        self.activation
    }

    /// `(sigma(A x + b), 1)` for a single state.
    pub fn evaluate(&self, x: &[R]) -> Result<DVector<R>> {
        if x.len() != self.in_dim() {
            return Err(Error::shape(format!(
                "state of length {} fed into a basis over {} inputs",
                x.len(),
                self.in_dim()
            )));
        }
        let hidden = self.a.nrows();
        let mut out = DVector::zeros(hidden + 1);
        for r in 0..hidden {
            let mut acc = self.b[r];
            for c in 0..self.in_dim() {
                acc += self.a[(r, c)] * x[c];
            }
            out[r] = self.activation.apply(acc);
        }
        out[hidden] = R::one();
        Ok(out)
    }

    /// Feature matrix for many states at once: `states` is `paths x in_dim`,
    /// the result `paths x K`.
    pub fn evaluate_batch(&self, states: &DMatrix<R>) -> Result<DMatrix<R>> {
        if states.ncols() != self.in_dim() {
            return Err(Error::shape(format!(
                "batch of width {} fed into a basis over {} inputs",
                states.ncols(),
                self.in_dim()
            )));
        }
        let mut z = states * self.a.transpose();
        for (j, mut col) in z.column_iter_mut().enumerate() {
            let bj = self.b[j];
            for v in col.iter_mut() {
                *v += bj;
            }
        }
        self.activation.apply_in_place(&mut z);
        Ok(z.resize_horizontally(self.num_features(), R::one()))
    }

    /// Features of the time-augmented state `(n, N - n, x)`.
    pub fn evaluate_time_augmented(&self, date: usize, num_dates: usize, x: &[R]) -> Result<DVector<R>> {
        if date > num_dates {
            return Err(Error::config(format!(
                "date index {date} beyond the {num_dates}-date grid"
            )));
        }
        let mut augmented = Vec::with_capacity(x.len() + 2);
        augmented.push(R::from_count(date));
        augmented.push(R::from_count(num_dates - date));
        augmented.extend_from_slice(x);
        self.evaluate(&augmented)
    }

    /// Batch version of [`Self::evaluate_time_augmented`].
    pub fn evaluate_time_augmented_batch(
        &self,
        date: usize,
        num_dates: usize,
        states: &DMatrix<R>,
    ) -> Result<DMatrix<R>> {
        if date > num_dates {
            return Err(Error::config(format!(
                "date index {date} beyond the {num_dates}-date grid"
            )));
        }
        let augmented = augment_with(states, R::from_count(date), R::from_count(num_dates - date));
        self.evaluate_batch(&augmented)
    }

    /// Stable digest of the frozen parameters; unchanged by any pricing run.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv64::new();
        h.write_u64(self.activation.tag());
        hash_matrix(&mut h, &self.a);
        for v in self.b.iter() {
            h.write_u64(v.to_f64().expect("finite").to_bits());
        }
        h.finish()
    }
}

/// Prepends two columns (`first`, `second`) to a state batch.
fn augment_with<R: Real>(states: &DMatrix<R>, first: R, second: R) -> DMatrix<R> {
    let (rows, cols) = states.shape();
    DMatrix::from_fn(rows, cols + 2, |i, j| match j {
        0 => first,
        1 => second,
        _ => states[(i, j - 2)],
    })
}

/// Recurrent random layer: `h_n = sigma(A_x x_n + A_h h_{n-1} + b)` with all
/// three parameter blocks frozen; the regression features are `(h_n, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrentBasis<R: Real> {
    a_x: DMatrix<R>,
    a_h: DMatrix<R>,
    b: DVector<R>,
    activation: Activation<R>,
}

impl<R: Real> RecurrentBasis<R> {
    /// Samples the reservoir. The input and hidden scales differ by design;
    /// the bias scale may be zero, which drops the bias entirely.
    pub fn sample(
        in_dim: usize,
        num_features: usize,
        input_std: R,
        hidden_std: R,
        bias_std: R,
        activation: Activation<R>,
        seed: u64,
    ) -> Result<Self> {
        if in_dim == 0 {
            return Err(Error::config("input dimension must be at least 1"));
        }
        if num_features < 2 {
            return Err(Error::config(format!(
                "need at least 2 features (one hidden node plus the constant), got {num_features}"
            )));
        }
        validate_std(input_std, "input standard deviation")?;
        validate_std(hidden_std, "hidden standard deviation")?;
        validate_std(bias_std, "bias standard deviation")?;
        let hidden = num_features - 1;
        let mut rng = crate::sim::basis_rng(seed);
        let a_x = gaussian_matrix(hidden, in_dim, input_std, &mut rng);
        let a_h = gaussian_matrix(hidden, hidden, hidden_std, &mut rng);
        let b = gaussian_matrix(hidden, 1, bias_std, &mut rng).column(0).into_owned();
        Ok(RecurrentBasis {
            a_x,
            a_h,
            b,
            activation,
        })
    }

    pub fn from_parts(
        a_x: DMatrix<R>,
        a_h: DMatrix<R>,
        b: DVector<R>,
        activation: Activation<R>,
    ) -> Result<Self> {
        if a_x.nrows() == 0 || a_x.ncols() == 0 {
            return Err(Error::config("hidden layer must be non-empty"));
        }
        if a_h.nrows() != a_x.nrows() || a_h.ncols() != a_x.nrows() || b.len() != a_x.nrows() {
            return Err(Error::shape(
                "recurrent parameter blocks have inconsistent shapes".to_string(),
            ));
        }
        let finite = a_x.iter().all(|v| v.is_finite())
            && a_h.iter().all(|v| v.is_finite())
            && b.iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::config("layer parameters must be finite"));
        }
        Ok(RecurrentBasis {
            a_x,
            a_h,
            b,
            activation,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.a_x.ncols()
    }

    /// Hidden-state dimension `K - 1`.
    pub fn hidden_dim(&self) -> usize {
        self.a_x.nrows()
    }

    /// Feature count `K`, including the constant.
    pub fn num_features(&self) -> usize {
        self.hidden_dim() + 1
    }

    /// Input weights; exposed so a degenerate reservoir (`A_h = 0`) can be
    /// compared against its feedforward counterpart.
    pub fn input_weights(&self) -> (&DMatrix<R>, &DVector<R>) {
        (&self.a_x, &self.b)
    }

    /// One recurrence step for a single path; pass `h_prev = 0` at the first
    /// date.
    pub fn step(&self, x: &[R], h_prev: &DVector<R>) -> Result<DVector<R>> {
        if x.len() != self.in_dim() {
            return Err(Error::shape(format!(
                "state of length {} fed into a reservoir over {} inputs",
                x.len(),
                self.in_dim()
            )));
        }
        if h_prev.len() != self.hidden_dim() {
            return Err(Error::shape(format!(
                "hidden state of length {} fed into a {}-unit reservoir",
                h_prev.len(),
                self.hidden_dim()
            )));
        }
        let hidden = self.hidden_dim();
        let mut out = DVector::zeros(hidden);
        for r in 0..hidden {
            let mut acc = self.b[r];
            for c in 0..self.in_dim() {
                acc += self.a_x[(r, c)] * x[c];
            }
            for c in 0..hidden {
                acc += self.a_h[(r, c)] * h_prev[c];
            }
            out[r] = self.activation.apply(acc);
        }
        Ok(out)
    }

    /// One recurrence step for all paths: `states` is `paths x in_dim`,
    /// `h_prev` is `paths x hidden`.
    pub fn step_batch(&self, states: &DMatrix<R>, h_prev: &DMatrix<R>) -> Result<DMatrix<R>> {
        if states.ncols() != self.in_dim() {
            return Err(Error::shape(format!(
                "batch of width {} fed into a reservoir over {} inputs",
                states.ncols(),
                self.in_dim()
            )));
        }
        if h_prev.ncols() != self.hidden_dim() || h_prev.nrows() != states.nrows() {
            return Err(Error::shape(
                "hidden-state batch has inconsistent shape".to_string(),
            ));
        }
        let mut z = states * self.a_x.transpose();
        z += h_prev * self.a_h.transpose();
        for (j, mut col) in z.column_iter_mut().enumerate() {
            let bj = self.b[j];
            for v in col.iter_mut() {
                *v += bj;
            }
        }
        self.activation.apply_in_place(&mut z);
        Ok(z)
    }

    /// Stable digest of the frozen parameters.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv64::new();
        h.write_u64(self.activation.tag());
        hash_matrix(&mut h, &self.a_x);
        hash_matrix(&mut h, &self.a_h);
        for v in self.b.iter() {
            h.write_u64(v.to_f64().expect("finite").to_bits());
        }
        h.finish()
    }
}

/// Grid-aware time augmentation used by the polynomial Q-iteration
/// baseline: appends the relative date `t/T` and `1 - t/T` to the state.
pub fn append_relative_date<R: Real>(
    states: &DMatrix<R>,
    date: usize,
    grid: &TimeGrid<R>,
) -> DMatrix<R> {
    let frac = grid.dates()[date] / grid.maturity();
    let (rows, cols) = states.shape();
    DMatrix::from_fn(rows, cols + 2, |i, j| {
        if j < cols {
            states[(i, j)]
        } else if j == cols {
            frac
        } else {
            R::one() - frac
        }
    })
}

/// Polynomial basis of total degree two:
/// `[1, x_1..x_d, x_1^2..x_d^2, x_i x_j for i < j]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolyBasis {
    dim: usize,
}

impl PolyBasis {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("input dimension must be at least 1"));
        }
        Ok(PolyBasis { dim })
    }

    pub fn in_dim(&self) -> usize {
        self.dim
    }

    /// `1 + 2d + d(d-1)/2` basis functions.
    pub fn size(&self) -> usize {
        1 + 2 * self.dim + self.dim * (self.dim - 1) / 2
    }

    pub fn evaluate<R: Real>(&self, x: &[R]) -> Result<DVector<R>> {
        if x.len() != self.dim {
            return Err(Error::shape(format!(
                "state of length {} fed into a degree-2 basis over {} inputs",
                x.len(),
                self.dim
            )));
        }
        let mut out = DVector::zeros(self.size());
        let mut idx = 0;
        out[idx] = R::one();
        idx += 1;
        for &xi in x {
            out[idx] = xi;
            idx += 1;
        }
        for &xi in x {
            out[idx] = xi * xi;
            idx += 1;
        }
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                out[idx] = x[i] * x[j];
                idx += 1;
            }
        }
        Ok(out)
    }

    pub fn evaluate_batch<R: Real>(&self, states: &DMatrix<R>) -> Result<DMatrix<R>> {
        if states.ncols() != self.dim {
            return Err(Error::shape(format!(
                "batch of width {} fed into a degree-2 basis over {} inputs",
                states.ncols(),
                self.dim
            )));
        }
        let rows = states.nrows();
        let mut out = DMatrix::zeros(rows, self.size());
        for r in 0..rows {
            let mut idx = 0;
            out[(r, idx)] = R::one();
            idx += 1;
            for c in 0..self.dim {
                out[(r, idx)] = states[(r, c)];
                idx += 1;
            }
            for c in 0..self.dim {
                out[(r, idx)] = states[(r, c)] * states[(r, c)];
                idx += 1;
            }
            for i in 0..self.dim {
                for j in (i + 1)..self.dim {
                    out[(r, idx)] = states[(r, i)] * states[(r, j)];
                    idx += 1;
                }
            }
        }
        Ok(out)
    }
}
