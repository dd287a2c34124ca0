//! Laplace transform of the ruin time and the ultimate ruin probability for
//! the barrier-free dual model.
//!
//! With distinct positive-real-part Lundberg roots rho_1..rho_n,
//!
//! ```text
//! psi(u, delta) = sum_k [ prod_{i != k} (rho_i - delta/c)/(rho_i - rho_k) ] e^{-rho_k u}
//! ```
//!
//! and the delta -> 0 limit uses the fundamental roots directly (the income
//! condition decides whether ruin is certain).

use crate::error::{CoreError, Result};
use crate::exppoly::{ExpoPolynomial, ExpoTerm};
use crate::lundberg::{self, LundbergRootSet};
use crate::model::{IncomeCondition, ModelSpec};
use crate::C64;

/// Relative distinctness tolerance for the product formula.
const DISTINCT_EPS: f64 = 1e-7;

/// The ruin-time transform for one (spec, delta) pair.
#[derive(Debug, Clone)]
pub struct RuinTransform {
    pub delta: f64,
    pub representation: ExpoPolynomial,
    pub roots_used: LundbergRootSet,
}

impl RuinTransform {
    /// Build the exponential-sum representation from the n positive roots.
    pub fn new(spec: &ModelSpec, delta: f64) -> Result<Self> {
        if delta <= 0.0 {
            return Err(CoreError::InvalidArgument(
                "delta must be > 0 here; the delta = 0 limit has its own path".into(),
            ));
        }
        let set = lundberg::solve(spec, delta)?;
        let rep = exponential_sum(&set.positive_roots(), delta / spec.c, spec.n as usize)?;
        Ok(RuinTransform { delta, representation: rep, roots_used: set })
    }

    pub fn value(&self, u: f64) -> Result<f64> {
        self.representation.evaluate(u)
    }
}

fn exponential_sum(rhos: &[C64], delta_over_c: f64, n: usize) -> Result<ExpoPolynomial> {
    if rhos.len() != n {
        return Err(CoreError::Numerical(format!(
            "expected {n} positive-real-part roots, found {}",
            rhos.len()
        )));
    }
    let scale = 1.0 + rhos.iter().map(|r| r.norm()).fold(0.0, f64::max);
    for i in 0..n {
        for j in (i + 1)..n {
            if (rhos[i] - rhos[j]).norm() <= DISTINCT_EPS * scale {
                return Err(CoreError::RepeatedRoots);
            }
        }
    }
    let doc = C64::new(delta_over_c, 0.0);
    let mut terms = Vec::with_capacity(n);
    for k in 0..n {
        let mut coef = C64::new(1.0, 0.0);
        for i in 0..n {
            if i != k {
                coef *= (rhos[i] - doc) / (rhos[i] - rhos[k]);
            }
        }
        terms.push(ExpoTerm { coeff: coef, power: 0, rate: rhos[k] });
    }
    Ok(ExpoPolynomial::from_terms(terms))
}

/// psi(u, delta) for delta > 0.
pub fn psi(spec: &ModelSpec, delta: f64, u: f64) -> Result<f64> {
    RuinTransform::new(spec, delta)?.value(u)
}

/// Ultimate ruin probability psi(u) = lim_{delta -> 0} psi(u, delta).
pub fn psi_ultimate(spec: &ModelSpec, u: f64) -> Result<f64> {
    match spec.income_condition() {
        IncomeCondition::Violated | IncomeCondition::Boundary => Ok(1.0),
        IncomeCondition::Satisfied => {
            let set = lundberg::solve(spec, 0.0)?;
            let rep = exponential_sum(&set.positive_roots(), 0.0, spec.n as usize)?;
            rep.evaluate(u)
        }
    }
}

/// Representation of psi(., delta) (or the ultimate limit when delta = 0) as
/// an exponential polynomial, for residual checks and batch evaluation.
pub fn psi_representation(spec: &ModelSpec, delta: f64) -> Result<ExpoPolynomial> {
    if delta > 0.0 {
        Ok(RuinTransform::new(spec, delta)?.representation)
    } else {
        match spec.income_condition() {
            IncomeCondition::Satisfied => {
                let set = lundberg::solve(spec, 0.0)?;
                exponential_sum(&set.positive_roots(), 0.0, spec.n as usize)
            }
            _ => Ok(ExpoPolynomial::constant(1.0)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GainDistribution;

    fn spec(c: f64) -> ModelSpec {
        ModelSpec::new(2, 2.0, c, GainDistribution::erlang(2, 1.0).unwrap(), 0.0, None).unwrap()
    }

    #[test]
    fn starts_at_one() {
        for c in [0.75, 1.0, 2.1] {
            assert!((psi(&spec(c), 0.02, 0.0).unwrap() - 1.0).abs() < 1e-10);
        }
        assert!((psi_ultimate(&spec(0.75), 0.0).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn boundary_derivatives() {
        // i-th derivative at 0 is (-delta/c)^i for i < n
        let s = spec(1.0);
        let delta = 0.02;
        let rep = psi_representation(&s, delta).unwrap();
        let d1 = rep.derivative_at(1, 0.0).unwrap();
        assert!((d1 + delta / s.c).abs() < 1e-9, "psi'(0) = {d1}");
    }

    #[test]
    fn violated_income_means_certain_ruin() {
        let s = spec(2.1);
        for u in [0.0, 1.0, 5.0] {
            assert_eq!(psi_ultimate(&s, u).unwrap(), 1.0);
        }
        assert_eq!(psi_ultimate(&spec(2.0), 3.0).unwrap(), 1.0);
    }

    #[test]
    fn monotone_in_u_and_delta_and_bounded() {
        let s = spec(1.0);
        let mut last = 1.0;
        for k in 0..=20 {
            let u = 0.4 * k as f64;
            let v = psi(&s, 0.02, u).unwrap();
            assert!(v <= last + 1e-12 && (0.0..=1.0).contains(&v));
            last = v;
        }
        for u in [0.5, 2.0] {
            let lo = psi(&s, 0.05, u).unwrap();
            let hi = psi(&s, 0.01, u).unwrap();
            assert!(lo <= hi);
        }
    }

    #[test]
    fn satisfies_integro_differential_equation() {
        let s = spec(1.0);
        let delta = 0.02;
        let rep = psi_representation(&s, delta).unwrap();
        let lhs = rep.erlang_operator(s.n, s.lambda, delta, s.c);
        let rhs = rep.convolve_tail(&s.gains).unwrap();
        let grid: Vec<f64> = (1..=20).map(|k| 0.3 * k as f64).collect();
        assert!(lhs.max_abs_diff_on(&rhs, &grid).unwrap() < 1e-8);
    }

    #[test]
    fn ultimate_ruin_decays() {
        let s = spec(0.75);
        let v1 = psi_ultimate(&s, 1.0).unwrap();
        let v5 = psi_ultimate(&s, 5.0).unwrap();
        assert!(v1 < 1.0 && v5 < v1 && v5 > 0.0);
    }
}
