//! Problem instances: Erlang(n) inter-arrival times, a gain-amount law with
//! rational Laplace transform (finite signed mixture of Erlang components),
//! expense rate, interest force and an optional dividend barrier.

use crate::error::{CoreError, Result};
use crate::exppoly::{factorial, ExpoPolynomial, RationalFunction};
use crate::poly::Poly;
use crate::C64;
use serde::{Deserialize, Serialize};

/// One mixture component: weight * Erlang(shape, rate) density.
/// Weights may be negative (combinations of exponentials) as long as the
/// mixture integrates to one and stays nonnegative.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct GainComponent {
    pub weight: f64,
    pub rate: f64,
    pub shape: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(try_from = "Vec<GainComponent>", into = "Vec<GainComponent>")]
pub struct GainDistribution {
    components: Vec<GainComponent>,
}

impl TryFrom<Vec<GainComponent>> for GainDistribution {
    type Error = CoreError;
    fn try_from(components: Vec<GainComponent>) -> Result<Self> {
        GainDistribution::from_components(components)
    }
}

impl From<GainDistribution> for Vec<GainComponent> {
    fn from(g: GainDistribution) -> Self {
        g.components
    }
}

impl GainDistribution {
    pub fn new(components: Vec<(f64, f64, u32)>) -> Result<Self> {
        Self::from_components(
            components
                .into_iter()
                .map(|(weight, rate, shape)| GainComponent { weight, rate, shape })
                .collect(),
        )
    }

    pub fn from_components(components: Vec<GainComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(CoreError::InvalidModel("gain distribution has no components".into()));
        }
        for c in &components {
            if !(c.rate > 0.0) || !c.rate.is_finite() {
                return Err(CoreError::InvalidModel(format!("component rate {} must be > 0", c.rate)));
            }
            if c.shape == 0 {
                return Err(CoreError::InvalidModel("component shape must be >= 1".into()));
            }
            if !c.weight.is_finite() {
                return Err(CoreError::InvalidModel("component weight must be finite".into()));
            }
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(CoreError::InvalidModel(format!(
                "component weights sum to {total}, expected 1"
            )));
        }
        let dist = GainDistribution { components };
        dist.check_density_nonnegative()?;
        Ok(dist)
    }

    /// Exponential gains with the given rate.
    pub fn exponential(rate: f64) -> Result<Self> {
        Self::new(vec![(1.0, rate, 1)])
    }

    /// Erlang(shape, rate) gains.
    pub fn erlang(shape: u32, rate: f64) -> Result<Self> {
        Self::new(vec![(1.0, rate, shape)])
    }

    pub fn components(&self) -> &[GainComponent] {
        &self.components
    }

    fn min_rate(&self) -> f64 {
        self.components.iter().map(|c| c.rate).fold(f64::INFINITY, f64::min)
    }

    /// Signed mixtures can dip negative; reject those on a geometric grid.
    fn check_density_nonnegative(&self) -> Result<()> {
        let hi = 20.0 / self.min_rate();
        let mut x = 1e-9 * hi;
        let mut worst = 0.0f64;
        while x <= hi {
            let v = self.pdf(x);
            worst = worst.min(v);
            x *= 1.05;
        }
        // also the left edge
        worst = worst.min(self.pdf(0.0));
        if worst < -1e-12 {
            return Err(CoreError::InvalidModel(format!(
                "signed mixture density dips to {worst:.3e} (< -1e-12)"
            )));
        }
        Ok(())
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.components
            .iter()
            .map(|c| {
                c.weight * c.rate.powi(c.shape as i32) * x.powi(c.shape as i32 - 1)
                    * (-c.rate * x).exp()
                    / factorial(c.shape - 1)
            })
            .sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        // Erlang cdf = 1 - e^{-rx} sum_{i<shape} (rx)^i/i!
        self.components
            .iter()
            .map(|c| {
                let rx = c.rate * x;
                let tail: f64 = (0..c.shape).map(|i| rx.powi(i as i32) / factorial(i)).sum();
                c.weight * (1.0 - (-rx).exp() * tail)
            })
            .sum()
    }

    /// Density as an exponential polynomial in x.
    pub fn density(&self) -> ExpoPolynomial {
        let mut acc = ExpoPolynomial::zero();
        for c in &self.components {
            acc = acc.add(&ExpoPolynomial::term_real(
                c.weight * c.rate.powi(c.shape as i32) / factorial(c.shape - 1),
                c.shape - 1,
                c.rate,
            ));
        }
        acc
    }

    /// Survival function as an exponential polynomial.
    pub fn survival(&self) -> ExpoPolynomial {
        self.density()
            .antiderivative_tail()
            .expect("gain rates are positive")
    }

    /// Laplace transform p_hat(s) as a reduced rational function with a shared
    /// denominator over distinct rates; p_hat(0) = 1.
    pub fn lt(&self) -> RationalFunction {
        let groups = self.rate_groups();
        let mut den = Poly::one();
        for &(rate, shape) in &groups {
            den = den.mul(&Poly::linear(C64::new(rate, 0.0)).pow(shape));
        }
        let mut num = Poly::zero();
        for c in &self.components {
            // w * rate^shape / (s+rate)^shape over the common denominator
            let mut cof = Poly::one();
            for &(rate, shape) in &groups {
                let k = if rate == c.rate { shape - c.shape } else { shape };
                cof = cof.mul(&Poly::linear(C64::new(rate, 0.0)).pow(k));
            }
            num = num.add(&cof.scale(C64::new(c.weight * c.rate.powi(c.shape as i32), 0.0)));
        }
        RationalFunction::new(num, den)
    }

    /// Distinct rates with the maximum shape per rate.
    fn rate_groups(&self) -> Vec<(f64, u32)> {
        let mut groups: Vec<(f64, u32)> = Vec::new();
        for c in &self.components {
            match groups.iter_mut().find(|(r, _)| *r == c.rate) {
                Some((_, m)) => *m = (*m).max(c.shape),
                None => groups.push((c.rate, c.shape)),
            }
        }
        groups
    }

    /// Degree of the transform denominator (the m in the n+m root count).
    pub fn lt_denominator_degree(&self) -> usize {
        self.rate_groups().iter().map(|&(_, s)| s as usize).sum()
    }

    /// j-th derivative of p_hat at complex s, in closed form.
    pub fn lt_derivative(&self, j: u32, s: C64) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for c in &self.components {
            let base = s + C64::new(c.rate, 0.0);
            if base.norm() <= 1e-12 * (1.0 + s.norm()) {
                return Err(CoreError::PoleCollision { at: format!("{s}") });
            }
            // d^j/ds^j (s+r)^{-k} = (-1)^j k(k+1)...(k+j-1) (s+r)^{-(k+j)};
            // the rising factorial is folded into the power as a running
            // ratio so large j cannot overflow on the way to a finite value
            let mut val = C64::new(1.0, 0.0) / base.powi(c.shape as i32);
            for i in 0..j {
                val *= -C64::new((c.shape + i) as f64, 0.0) / base;
            }
            acc += C64::new(c.weight * c.rate.powi(c.shape as i32), 0.0) * val;
        }
        Ok(acc)
    }

    /// k-th raw moment E[X^k]; k = 0 gives 1.
    pub fn moment(&self, k: u32) -> f64 {
        self.components
            .iter()
            .map(|c| {
                // E[X^k] for Erlang(shape, rate) = (shape)_k / rate^k
                let mut rising = 1.0f64;
                for i in 0..k {
                    rising *= (c.shape + i) as f64;
                }
                c.weight * rising / c.rate.powi(k as i32)
            })
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    /// Laplace transform of the tail moment H_k, over the same denominator as
    /// [`GainDistribution::lt`]; equals p_k (1 - p_hat_k(s)) / s with p_hat_k
    /// the k-th equilibrium transform.
    pub fn tail_moment_lt(&self, k: u32) -> RationalFunction {
        let groups = self.rate_groups();
        let mut den = Poly::one();
        for &(rate, shape) in &groups {
            den = den.mul(&Poly::linear(C64::new(rate, 0.0)).pow(shape));
        }
        let mut num = Poly::zero();
        for c in &self.components {
            let norm = c.weight * c.rate.powi(c.shape as i32) / factorial(c.shape - 1);
            for j in 0..c.shape {
                // z^{shape-1-j} e^{-rate z} piece of H_k transforms to
                // (shape-1-j)! / (s+rate)^{shape-j}
                let coeff = norm
                    * crate::exppoly::binom(c.shape - 1, j)
                    * factorial(k + j)
                    / c.rate.powi((k + j + 1) as i32)
                    * factorial(c.shape - 1 - j);
                let mut cof = Poly::one();
                for &(rate, shape) in &groups {
                    let pow = if rate == c.rate { shape - (c.shape - j) } else { shape };
                    cof = cof.mul(&Poly::linear(C64::new(rate, 0.0)).pow(pow));
                }
                num = num.add(&cof.scale(C64::new(coeff, 0.0)));
            }
        }
        RationalFunction::new(num, den)
    }

    /// Tail moment H_k(z) = integral_z^inf (y-z)^k p(y) dy as an exponential
    /// polynomial in z; H_0 is the survival function and H_k(0) = E[X^k].
    pub fn tail_moment(&self, k: u32) -> ExpoPolynomial {
        let mut out = ExpoPolynomial::zero();
        for c in &self.components {
            let norm = c.weight * c.rate.powi(c.shape as i32) / factorial(c.shape - 1);
            // integral_0^inf x^k (z+x)^{shape-1} e^{-rate (z+x)} dx
            for j in 0..c.shape {
                let coeff = norm
                    * crate::exppoly::binom(c.shape - 1, j)
                    * factorial(k + j)
                    / c.rate.powi((k + j + 1) as i32);
                out = out.add(&ExpoPolynomial::term_real(coeff, c.shape - 1 - j, c.rate));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IncomeCondition {
    /// c E(W) < E(X): ruin is not certain.
    Satisfied,
    /// c E(W) > E(X): ruin is certain.
    Violated,
    /// c E(W) = E(X) within relative tolerance 1e-12.
    Boundary,
}

/// A full problem instance of the dual risk model.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModelSpec {
    /// Erlang shape of the inter-arrival time W.
    pub n: u32,
    /// Erlang rate of W (per unit time); E(W) = n / lambda.
    pub lambda: f64,
    /// Expense rate (currency per unit time).
    pub c: f64,
    /// Interest force used for discounting.
    #[serde(default)]
    pub delta: f64,
    /// Constant reflecting dividend barrier, when one is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barrier: Option<f64>,
    pub gains: GainDistribution,
}

impl ModelSpec {
    pub fn new(
        n: u32,
        lambda: f64,
        c: f64,
        gains: GainDistribution,
        delta: f64,
        barrier: Option<f64>,
    ) -> Result<Self> {
        let spec = ModelSpec { n, lambda, c, delta, barrier, gains };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(CoreError::InvalidModel("n must be >= 1".into()));
        }
        if !(self.lambda > 0.0) {
            return Err(CoreError::InvalidModel("lambda must be > 0".into()));
        }
        if !(self.c > 0.0) {
            return Err(CoreError::InvalidModel("c must be > 0".into()));
        }
        if self.delta < 0.0 {
            return Err(CoreError::InvalidModel("delta must be >= 0".into()));
        }
        if let Some(b) = self.barrier {
            if !(b >= 0.0) {
                return Err(CoreError::InvalidModel("barrier must be >= 0".into()));
            }
        }
        if self.gains.mean() <= 0.0 {
            return Err(CoreError::InvalidModel("gain mean must be positive".into()));
        }
        Ok(())
    }

    /// a = lambda / c, the Erlang rate after measuring time in surplus units.
    pub fn a(&self) -> f64 {
        self.lambda / self.c
    }

    pub fn mean_interarrival(&self) -> f64 {
        self.n as f64 / self.lambda
    }

    pub fn income_condition(&self) -> IncomeCondition {
        let lhs = self.c * self.mean_interarrival();
        let mu = self.gains.mean();
        let scale = lhs.abs().max(mu.abs());
        if (lhs - mu).abs() <= 1e-12 * scale {
            IncomeCondition::Boundary
        } else if lhs < mu {
            IncomeCondition::Satisfied
        } else {
            IncomeCondition::Violated
        }
    }

    pub fn barrier_or_err(&self) -> Result<f64> {
        self.barrier
            .ok_or_else(|| CoreError::InvalidArgument("this quantity needs a dividend barrier".into()))
    }

    pub fn with_barrier(&self, b: f64) -> ModelSpec {
        ModelSpec { barrier: Some(b), ..self.clone() }
    }

    pub fn with_delta(&self, delta: f64) -> ModelSpec {
        ModelSpec { delta, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c64(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn erlang_spec(c: f64) -> ModelSpec {
        ModelSpec::new(2, 2.0, c, GainDistribution::erlang(2, 1.0).unwrap(), 0.02, None).unwrap()
    }

    pub(crate) fn comb_exp() -> GainDistribution {
        // p(x) = 3 e^{-3x/2} - 3 e^{-3x}
        GainDistribution::new(vec![(2.0, 1.5, 1), (-1.0, 3.0, 1)]).unwrap()
    }

    #[test]
    fn income_condition_classification() {
        assert_eq!(erlang_spec(0.75).income_condition(), IncomeCondition::Satisfied);
        assert_eq!(erlang_spec(2.1).income_condition(), IncomeCondition::Violated);
        assert_eq!(erlang_spec(2.0).income_condition(), IncomeCondition::Boundary);
    }

    #[test]
    fn income_condition_scale_invariant() {
        for kappa in [0.25, 3.0, 17.5] {
            let base = erlang_spec(0.75);
            let scaled = ModelSpec::new(
                base.n,
                base.lambda * kappa,
                base.c * kappa,
                base.gains.clone(),
                base.delta,
                None,
            )
            .unwrap();
            assert_eq!(scaled.income_condition(), base.income_condition());
        }
    }

    #[test]
    fn gain_lt_erlang() {
        // Erlang(2,1): 1/(1+s)^2
        let g = GainDistribution::erlang(2, 1.0).unwrap();
        let lt = g.lt();
        for s in [0.0f64, 0.7, 2.0] {
            let want = 1.0 / (1.0 + s).powi(2);
            assert!((lt.eval(c64(s)) - c64(want)).norm() < 1e-14);
        }
        assert!((lt.eval(c64(0.0)) - c64(1.0)).norm() < 1e-14);
    }

    #[test]
    fn gain_lt_combination() {
        // 3 e^{-1.5x} - 3 e^{-3x}: p_hat = 4.5/((s+1.5)(s+3))
        let g = comb_exp();
        let lt = g.lt();
        for s in [0.0, 1.0, 2.5] {
            let want = 4.5 / ((s + 1.5) * (s + 3.0));
            assert!((lt.eval(c64(s)) - c64(want)).norm() < 1e-13);
        }
    }

    #[test]
    fn moments() {
        let g = GainDistribution::erlang(2, 1.0).unwrap();
        assert!((g.moment(1) - 2.0).abs() < 1e-14);
        assert!((g.moment(2) - 6.0).abs() < 1e-14);
        assert!((comb_exp().moment(1) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn moment_matches_lt_derivative() {
        for g in [GainDistribution::erlang(3, 0.8).unwrap(), comb_exp()] {
            for k in 1..=3u32 {
                let d = g.lt_derivative(k, c64(0.0)).unwrap();
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                assert!((sign * d.re - g.moment(k)).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn bad_mixtures_rejected() {
        // weights not summing to one
        assert!(GainDistribution::new(vec![(0.7, 1.0, 1)]).is_err());
        // density negative near zero: e.g. 2*Exp(3) - 1*Exp(1) style flip
        assert!(GainDistribution::new(vec![(2.0, 3.0, 1), (-1.0, 1.5, 1)]).is_err());
    }

    #[test]
    fn tail_moment_consistency() {
        let g = comb_exp();
        // H_0 = survival, H_k(0) = E[X^k]
        let h0 = g.tail_moment(0);
        for x in [0.0, 0.5, 2.0] {
            assert!((h0.evaluate(x).unwrap() - g.survival().evaluate(x).unwrap()).abs() < 1e-12);
        }
        for k in 0..4u32 {
            assert!((g.tail_moment(k).evaluate(0.0).unwrap() - g.moment(k)).abs() < 1e-11);
        }
    }

    #[test]
    fn tail_moment_lt_matches_expopoly_transform() {
        for g in [GainDistribution::erlang(2, 1.0).unwrap(), comb_exp()] {
            for k in 0..3u32 {
                let direct = g.tail_moment(k).laplace();
                let shared = g.tail_moment_lt(k);
                for s in [0.3, 1.0, 2.7] {
                    let s = c64(s);
                    assert!((direct.eval(s) - shared.eval(s)).norm() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = erlang_spec(0.75).with_barrier(1.5);
        let json = serde_json::to_string(&spec).unwrap();
        let back: ModelSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);
    }
}
