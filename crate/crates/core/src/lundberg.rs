//! The generalized Lundberg equation and its root structure.
//!
//! For Erlang(n, lambda) inter-arrivals the equation k_hat(delta - c s) *
//! p_hat(s) = 1 reduces to the polynomial
//!
//! ```text
//! (lambda + delta - c s)^n q_den(s) - lambda^n q_num(s) = 0
//! ```
//!
//! where p_hat = q_num / q_den. All n + m roots (m = deg q_den), their
//! multiplicities and their real-part signs drive every solver downstream:
//! with delta = 0 there is always a null root, which doubles exactly when
//! c E(W) = E(X).

use crate::error::{CoreError, Result};
use crate::model::{IncomeCondition, ModelSpec};
use crate::poly::Poly;
use crate::C64;

/// Allowed residual |characteristic(root)| relative to the coefficient scale.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Null-root snapping radius (delta = 0 only), relative to the root scale.
const NULL_SNAP_EPS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootClass {
    PositiveRealPart,
    NegativeRealPart,
    Null,
}

#[derive(Debug, Clone)]
pub struct LundbergRootSet {
    /// Roots with multiplicities, ascending real part.
    pub roots: Vec<(C64, usize)>,
    pub positive_count: usize,
    pub negative_count: usize,
    /// Total multiplicity at zero (0, 1 or 2 in this model family).
    pub null_multiplicity: usize,
    pub delta: f64,
    /// max |characteristic(root)| over the returned roots.
    pub residual: f64,
}

impl LundbergRootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.1).sum()
    }

    /// Roots with positive real part, each repeated per multiplicity.
    pub fn positive_roots(&self) -> Vec<C64> {
        let mut out = Vec::new();
        for &(r, m) in &self.roots {
            if r.re > 0.0 {
                for _ in 0..m {
                    out.push(r);
                }
            }
        }
        out
    }

    pub fn classify(&self, root: C64) -> RootClass {
        if root.norm() == 0.0 {
            RootClass::Null
        } else if root.re > 0.0 {
            RootClass::PositiveRealPart
        } else {
            RootClass::NegativeRealPart
        }
    }
}

/// The characteristic polynomial (lambda + delta - c s)^n q_den - lambda^n q_num.
pub fn characteristic(spec: &ModelSpec, delta: f64) -> Poly {
    let lt = spec.gains.lt();
    let lin = Poly::new(vec![
        C64::new(spec.lambda + delta, 0.0),
        C64::new(-spec.c, 0.0),
    ]);
    let left = lin.pow(spec.n).mul(&lt.den);
    let right = lt.num.scale(C64::new(spec.lambda.powi(spec.n as i32), 0.0));
    left.sub(&right)
}

/// Solve the generalized Lundberg equation at the given delta.
pub fn solve(spec: &ModelSpec, delta: f64) -> Result<LundbergRootSet> {
    let m = spec.gains.lt_denominator_degree();
    let expected = spec.n as usize + m;
    let poly = characteristic(spec, delta);
    if poly.degree() != expected {
        return Err(CoreError::Numerical(format!(
            "characteristic degree {} != n + m = {}",
            poly.degree(),
            expected
        )));
    }
    let mut roots = poly.roots()?;

    // With delta = 0 the null root is analytic; snap it (and its double at
    // the boundary income case) to exactly zero.
    if delta == 0.0 {
        let scale = 1.0 + roots.iter().map(|r| r.0.norm()).fold(0.0, f64::max);
        let expected_null = match spec.income_condition() {
            IncomeCondition::Boundary => 2usize,
            _ => 1usize,
        };
        let mut near_null: Vec<usize> = (0..roots.len())
            .filter(|&i| roots[i].0.norm() <= NULL_SNAP_EPS * scale * 10.0)
            .collect();
        near_null.sort_by(|&a, &b| {
            roots[a].0.norm().partial_cmp(&roots[b].0.norm()).unwrap()
        });
        let mut absorbed = 0usize;
        let mut remove = Vec::new();
        for &i in &near_null {
            if absorbed >= expected_null {
                break;
            }
            absorbed += roots[i].1;
            remove.push(i);
        }
        if absorbed > 0 {
            remove.sort_unstable_by(|a, b| b.cmp(a));
            for i in remove {
                roots.remove(i);
            }
            roots.push((C64::new(0.0, 0.0), absorbed));
        }
    }

    roots.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut positive = 0usize;
    let mut negative = 0usize;
    let mut null = 0usize;
    for &(r, mult) in &roots {
        if r.norm() == 0.0 {
            null += mult;
        } else if r.re > 0.0 {
            positive += mult;
        } else {
            negative += mult;
        }
    }

    let residual = poly.residual(&roots);
    let coeff_scale = poly.max_coeff();
    if residual > RESIDUAL_TOL * coeff_scale {
        return Err(CoreError::RootFinding(format!(
            "residual {residual:.3e} exceeds {:.1e} * scale {coeff_scale:.3e}",
            RESIDUAL_TOL
        )));
    }

    Ok(LundbergRootSet {
        roots,
        positive_count: positive,
        negative_count: negative,
        null_multiplicity: null,
        delta,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GainDistribution;

    fn spec(c: f64) -> ModelSpec {
        ModelSpec::new(2, 2.0, c, GainDistribution::erlang(2, 1.0).unwrap(), 0.0, None).unwrap()
    }

    #[test]
    fn characteristic_vanishes_at_zero_when_delta_zero() {
        let s = spec(1.0);
        let p = characteristic(&s, 0.0);
        assert!(p.eval(C64::new(0.0, 0.0)).norm() < 1e-10 * p.max_coeff());
        // and not when delta > 0
        let p = characteristic(&s, 0.02);
        assert!(p.eval(C64::new(0.0, 0.0)).norm() > 1e-6);
    }

    #[test]
    fn quartic_roots_for_unit_cost() {
        // (2 - s)^2 (1 + s)^2 - 4: roots {0, 1, (1 +- sqrt(17))/2}
        let set = solve(&spec(1.0), 0.0).unwrap();
        assert_eq!(set.total_multiplicity(), 4);
        let mut vals: Vec<f64> = set.roots.iter().map(|r| r.0.re).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let s17 = 17.0f64.sqrt();
        let want = [(1.0 - s17) / 2.0, 0.0, 1.0, (1.0 + s17) / 2.0];
        for (got, want) in vals.iter().zip(want) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
        assert_eq!(
            (set.positive_count, set.negative_count, set.null_multiplicity),
            (2, 1, 1)
        );
    }

    #[test]
    fn classification_tracks_income_condition() {
        // satisfied: n positive, m-1 negative, one null
        let set = solve(&spec(0.75), 0.0).unwrap();
        assert_eq!(
            (set.positive_count, set.negative_count, set.null_multiplicity),
            (2, 1, 1)
        );
        // violated: n-1 positive, m negative, one null
        let set = solve(&spec(2.1), 0.0).unwrap();
        assert_eq!(
            (set.positive_count, set.negative_count, set.null_multiplicity),
            (1, 2, 1)
        );
        // boundary: n-1 positive, m-1 negative, double null
        let set = solve(&spec(2.0), 0.0).unwrap();
        assert_eq!(
            (set.positive_count, set.negative_count, set.null_multiplicity),
            (1, 1, 2)
        );
    }

    #[test]
    fn boundary_double_null_is_exact() {
        let set = solve(&spec(2.0), 0.0).unwrap();
        let null = set.roots.iter().find(|r| r.0.norm() == 0.0).unwrap();
        assert_eq!(null.1, 2);
        // remaining roots are +-sqrt(2)
        let mut other: Vec<f64> = set
            .roots
            .iter()
            .filter(|r| r.0.norm() > 0.0)
            .map(|r| r.0.re)
            .collect();
        other.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((other[0] + 2.0f64.sqrt()).abs() < 1e-9);
        assert!((other[1] - 2.0f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn positive_root_count_with_discounting() {
        // delta > 0: always n roots with positive real part
        for c in [0.75, 1.0, 2.0, 2.1] {
            let set = solve(&spec(c), 0.02).unwrap();
            assert_eq!(set.positive_count, 2, "c={c}");
            assert_eq!(set.null_multiplicity, 0);
        }
    }

    #[test]
    fn residuals_are_tiny() {
        for c in [0.75, 1.0, 2.0, 2.1] {
            let set = solve(&spec(c), 0.02).unwrap();
            let p = characteristic(&spec(c), 0.02);
            assert!(set.residual <= 1e-9 * p.max_coeff());
        }
    }

    #[test]
    fn roots_move_continuously_in_delta() {
        let base = solve(&spec(1.0), 0.02).unwrap();
        let bumped = solve(&spec(1.0), 0.0201).unwrap();
        for &(r, _) in &base.roots {
            let nearest = bumped
                .roots
                .iter()
                .map(|&(q, _)| (q - r).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 0.01, "root {r} moved {nearest}");
        }
    }
}
