//! Independent pricing ground truth for tests and manual cross-checks:
//! closed-form European prices under Black-Scholes and a Cox-Ross-Rubinstein
//! binomial tree for one-dimensional Bermudan/American exercise.
//!
//! Deliberately `f64`-only; these routines sit on the verification side of
//! every comparison and gain nothing from genericity.

use crate::error::{Error, Result};

/// Call or put.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptionKind {
    Call,
    Put,
}

fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

fn intrinsic(kind: OptionKind, spot: f64, strike: f64) -> f64 {
    match kind {
        OptionKind::Call => (spot - strike).max(0.0),
        OptionKind::Put => (strike - spot).max(0.0),
    }
}

/// Closed-form European price under geometric Brownian motion.
///
/// `sigma = 0` and `t = 0` fall back to the deterministic limits.
pub fn bs_european(kind: OptionKind, x0: f64, strike: f64, rate: f64, sigma: f64, t: f64) -> f64 {
    debug_assert!(x0 > 0.0 && strike > 0.0 && t >= 0.0 && sigma >= 0.0);
    let df = (-rate * t).exp();
    if sigma == 0.0 || t == 0.0 {
        return match kind {
            OptionKind::Call => (x0 - strike * df).max(0.0),
            OptionKind::Put => (strike * df - x0).max(0.0),
        };
    }
    let sig_sqrt_t = sigma * t.sqrt();
    let d1 = ((x0 / strike).ln() + (rate + 0.5 * sigma * sigma) * t) / sig_sqrt_t;
    let d2 = d1 - sig_sqrt_t;
    match kind {
        OptionKind::Call => x0 * norm_cdf(d1) - strike * df * norm_cdf(d2),
        OptionKind::Put => strike * df * norm_cdf(-d2) - x0 * norm_cdf(-d1),
    }
}

/// Recombining binomial tree with exercise restricted to a subset of levels.
#[derive(Debug, Clone)]
pub struct TreeSpec {
    pub steps: usize,
    pub x0: f64,
    pub strike: f64,
    pub rate: f64,
    pub sigma: f64,
    pub maturity: f64,
    /// Tree levels at which early exercise is allowed; the terminal payoff
    /// is always taken at level `steps`.
    pub exercise_levels: Vec<usize>,
}

impl TreeSpec {
    fn base(steps: usize, x0: f64, strike: f64, rate: f64, sigma: f64, maturity: f64) -> Self {
        TreeSpec {
            steps,
            x0,
            strike,
            rate,
            sigma,
            maturity,
            exercise_levels: Vec::new(),
        }
    }

    /// American exercise: every level.
    pub fn american(steps: usize, x0: f64, strike: f64, rate: f64, sigma: f64, maturity: f64) -> Self {
        let mut spec = Self::base(steps, x0, strike, rate, sigma, maturity);
        spec.exercise_levels = (0..=steps).collect();
        spec
    }

    /// European exercise: maturity only.
    pub fn european(steps: usize, x0: f64, strike: f64, rate: f64, sigma: f64, maturity: f64) -> Self {
        let mut spec = Self::base(steps, x0, strike, rate, sigma, maturity);
        spec.exercise_levels = vec![steps];
        spec
    }

    /// Bermudan exercise on `num_dates` equidistant dates (plus the initial
    /// date, mirroring the pricers' comparison against immediate exercise).
    /// Uses `steps_per_date` tree steps between consecutive dates so every
    /// exercise date lands exactly on a tree level.
    pub fn bermudan(
        num_dates: usize,
        steps_per_date: usize,
        x0: f64,
        strike: f64,
        rate: f64,
        sigma: f64,
        maturity: f64,
    ) -> Self {
        let steps = num_dates * steps_per_date;
        let mut spec = Self::base(steps, x0, strike, rate, sigma, maturity);
        spec.exercise_levels = (0..=num_dates).map(|j| j * steps_per_date).collect();
        spec
    }

    fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::config("tree needs at least one step"));
        }
        let ok = self.x0 > 0.0
            && self.strike > 0.0
            && self.maturity > 0.0
            && self.sigma >= 0.0
            && self.x0.is_finite()
            && self.strike.is_finite()
            && self.rate.is_finite()
            && self.sigma.is_finite()
            && self.maturity.is_finite();
        if !ok {
            return Err(Error::config("invalid tree parameters"));
        }
        if self.exercise_levels.iter().any(|&l| l > self.steps) {
            return Err(Error::config("exercise level beyond the last tree step"));
        }
        Ok(())
    }
}

/// Backward induction on the CRR tree; `max(payoff, continuation)` is taken
/// only on levels listed in `exercise_levels`.
pub fn tree_price(spec: &TreeSpec, kind: OptionKind) -> Result<f64> {
    spec.validate()?;
    let dt = spec.maturity / spec.steps as f64;
    let disc = (-spec.rate * dt).exp();
    let exercisable: Vec<bool> = {
        let mut mask = vec![false; spec.steps + 1];
        for &l in &spec.exercise_levels {
            mask[l] = true;
        }
        mask
    };

    if spec.sigma == 0.0 {
        // degenerate tree: the single risk-neutral path grows at the rate
        let mut value = intrinsic(kind, spec.x0 * (spec.rate * spec.maturity).exp(), spec.strike);
        for level in (0..spec.steps).rev() {
            value *= disc;
            if exercisable[level] {
                let spot = spec.x0 * (spec.rate * dt * level as f64).exp();
                value = value.max(intrinsic(kind, spot, spec.strike));
            }
        }
        return Ok(value);
    }

    let up = (spec.sigma * dt.sqrt()).exp();
    let down = 1.0 / up;
    let growth = (spec.rate * dt).exp();
    let q = (growth - down) / (up - down);
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::numerical(format!(
            "risk-neutral probability {q} outside [0, 1]; increase the step count"
        )));
    }

    // values at maturity, node j = j up-moves
    let mut values: Vec<f64> = (0..=spec.steps)
        .map(|j| {
            let spot = spec.x0 * up.powi(j as i32) * down.powi((spec.steps - j) as i32);
            intrinsic(kind, spot, spec.strike)
        })
        .collect();

    for level in (0..spec.steps).rev() {
        for j in 0..=level {
            let mut v = disc * (q * values[j + 1] + (1.0 - q) * values[j]);
            if exercisable[level] {
                let spot = spec.x0 * up.powi(j as i32) * down.powi((level - j) as i32);
                v = v.max(intrinsic(kind, spot, spec.strike));
            }
            values[j] = v;
        }
        values.truncate(level + 1);
    }
    Ok(values[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_volatility_call_is_the_deterministic_limit() {
        let price = bs_european(OptionKind::Call, 110.0, 100.0, 0.05, 0.0, 2.0);
        assert_relative_eq!(
            price,
            110.0 - 100.0 * (-0.1_f64).exp(),
            max_relative = 1e-12
        );
        assert_eq!(bs_european(OptionKind::Call, 50.0, 100.0, 0.0, 0.0, 1.0), 0.0);
    }

    #[test]
    fn put_call_parity_holds_to_high_precision() {
        for &(x0, k, r, sigma, t) in &[
            (100.0, 100.0, 0.02, 0.2, 1.0),
            (90.0, 110.0, 0.05, 0.4, 0.5),
            (120.0, 80.0, 0.0, 0.1, 3.0),
        ] {
            let call = bs_european(OptionKind::Call, x0, k, r, sigma, t);
            let put = bs_european(OptionKind::Put, x0, k, r, sigma, t);
            let forward = x0 - k * (-r * t as f64).exp();
            assert!((call - put - forward).abs() < 1e-10);
        }
    }

    #[test]
    fn closed_form_matches_a_monte_carlo_estimate() {
        use crate::payoff::{Payoff, PayoffFn};
        use crate::sim::{simulate_gbm, GbmConfig, TimeGrid};

        let grid = TimeGrid::equidistant(1.0, 1).unwrap();
        let cfg = GbmConfig {
            dim: 1,
            x0: 100.0,
            rate: 0.02,
            sigma: 0.2,
        };
        let m = 200_000;
        let paths = simulate_gbm(&cfg, &grid, m, 99).unwrap();
        let payoff = Payoff::max_call(100.0).unwrap();
        let df = (-0.02_f64).exp();
        let samples: Vec<f64> = (0..m)
            .map(|i| df * payoff.evaluate(paths.state(i, 1)).unwrap())
            .collect();
        let mean = samples.iter().sum::<f64>() / m as f64;
        let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m as f64 - 1.0);
        let se = (var / m as f64).sqrt();
        let bs = bs_european(OptionKind::Call, 100.0, 100.0, 0.02, 0.2, 1.0);
        assert!((mean - bs).abs() <= 3.0 * se, "MC {mean} vs BS {bs}");
    }

    #[test]
    fn one_step_tree_is_the_discounted_expectation() {
        let spec = TreeSpec::european(1, 100.0, 100.0, 0.05, 0.2, 1.0);
        // hand arithmetic: u = e^0.2, d = 1/u, q = (e^0.05 - d)/(u - d),
        // price = e^-0.05 (1 - q)(100 - 100 d)
        assert_relative_eq!(
            tree_price(&spec, OptionKind::Put).unwrap(),
            7.285227414695337,
            max_relative = 1e-12
        );
    }

    #[test]
    fn zero_volatility_put_with_immediate_exercise() {
        let mut spec = TreeSpec::american(10, 90.0, 100.0, 0.05, 0.0, 1.0);
        assert_relative_eq!(
            tree_price(&spec, OptionKind::Put).unwrap(),
            10.0,
            max_relative = 1e-12
        );
        // without the initial exercise level the deterministic put decays
        spec.exercise_levels = vec![10];
        let deferred = tree_price(&spec, OptionKind::Put).unwrap();
        assert!(deferred < 10.0);
    }

    #[test]
    fn european_tree_converges_to_black_scholes() {
        let bs = bs_european(OptionKind::Call, 100.0, 100.0, 0.02, 0.2, 1.0);
        let spec = TreeSpec::european(2000, 100.0, 100.0, 0.02, 0.2, 1.0);
        let tree = tree_price(&spec, OptionKind::Call).unwrap();
        assert!(
            (tree - bs).abs() / bs < 1e-3,
            "tree {tree} vs closed form {bs}"
        );
    }

    #[test]
    fn error_roughly_halves_when_steps_double() {
        let bs = bs_european(OptionKind::Put, 100.0, 100.0, 0.02, 0.2, 1.0);
        let err = |steps: usize| {
            let spec = TreeSpec::european(steps, 100.0, 100.0, 0.02, 0.2, 1.0);
            (tree_price(&spec, OptionKind::Put).unwrap() - bs).abs()
        };
        // desk-scale first-order convergence: allow generous slack on the ratio
        let (e1, e2) = (err(400), err(800));
        assert!(e2 < 0.75 * e1, "errors {e1} -> {e2}");
    }

    #[test]
    fn richer_exercise_sets_never_reduce_the_price() {
        let base = TreeSpec::bermudan(5, 40, 95.0, 100.0, 0.03, 0.25, 1.0);
        let berm = tree_price(&base, OptionKind::Put).unwrap();

        let mut european = base.clone();
        european.exercise_levels = vec![200];
        let euro = tree_price(&european, OptionKind::Put).unwrap();

        let american = TreeSpec::american(200, 95.0, 100.0, 0.03, 0.25, 1.0);
        let amer = tree_price(&american, OptionKind::Put).unwrap();

        assert!(euro <= berm + 1e-12);
        assert!(berm <= amer + 1e-12);
        assert!(amer > euro);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut spec = TreeSpec::american(0, 100.0, 100.0, 0.02, 0.2, 1.0);
        assert!(tree_price(&spec, OptionKind::Put).is_err());
        spec = TreeSpec::american(10, 100.0, 100.0, 0.02, 0.2, 1.0);
        spec.exercise_levels = vec![11];
        assert!(tree_price(&spec, OptionKind::Put).is_err());
    }
}
