//! Discounted single-dividend moments and aggregate discounted dividend
//! moments under a constant reflecting barrier.
//!
//! phi_k(u) = E[exp(-delta tau_u) D_u^k] is solved in the reflected variable
//! z = b - u: the transform
//!
//! ```text
//! phi_hat_k(s) = [ B(s) + lambda^n H_hat_k(s) ] / [ (lambda+delta-c s)^n - lambda^n p_hat(s) ]
//! ```
//!
//! carries the n unknown derivatives of the reflected function at z = 0 in
//! the polynomial B; after partial-fraction inversion the unknowns are fixed
//! by the n vanishing derivatives at z = b (the ruin boundary). Aggregate
//! moments V_order follow by the renewal decomposition into single dividends.

use crate::error::{CoreError, Result};
use crate::exppoly::{binom, ExpoPolynomial, RationalFunction};
use crate::lundberg;
use crate::model::ModelSpec;
use crate::poly::Poly;
use crate::C64;
use nalgebra::DMatrix;

/// Condition-number ceiling for the boundary system.
const COND_LIMIT: f64 = 1e12;
/// Default cap on the single-dividend moment order.
pub const DEFAULT_MAX_MOMENT: u32 = 4;

/// Solved transform of one discounted dividend moment.
#[derive(Debug, Clone)]
pub struct DividendTransform {
    pub k: u32,
    pub delta_effective: f64,
    pub barrier: f64,
    /// phi_k as a function of z = b - u on [0, b].
    reflected: ExpoPolynomial,
    /// The boundary constants: j-th derivative of the reflected function at 0.
    pub boundary_constants: Vec<C64>,
}

impl DividendTransform {
    pub fn new(spec: &ModelSpec, k: u32, delta_effective: f64) -> Result<Self> {
        Self::with_cap(spec, k, delta_effective, DEFAULT_MAX_MOMENT)
    }

    pub fn with_cap(spec: &ModelSpec, k: u32, delta_effective: f64, cap: u32) -> Result<Self> {
        let b = spec.barrier_or_err()?;
        if k > cap {
            return Err(CoreError::CapExceeded { m: k as usize, cap: cap as usize });
        }
        if delta_effective <= 0.0 {
            return Err(CoreError::InvalidArgument("delta must be > 0".into()));
        }
        let n = spec.n as usize;
        let lt = spec.gains.lt();
        let char_poly = lundberg::characteristic(spec, delta_effective);
        let poles = lundberg::solve(spec, delta_effective)?.roots;

        // coefficient polynomial of the j-th unknown:
        // gamma_j(s) = sum_{i=j+1}^{n} C(n,i) (lambda+delta)^{n-i} (-c)^i s^{i-1-j}
        let lam_d = spec.lambda + delta_effective;
        let mut basis: Vec<ExpoPolynomial> = Vec::with_capacity(n);
        for j in 0..n {
            let mut coeffs = vec![C64::new(0.0, 0.0); n - j];
            for i in (j + 1)..=n {
                coeffs[i - 1 - j] = C64::new(
                    binom(spec.n, i as u32)
                        * lam_d.powi((n - i) as i32)
                        * (-spec.c).powi(i as i32),
                    0.0,
                );
            }
            let gamma = Poly::new(coeffs);
            let num = gamma.mul(&lt.den);
            basis.push(RationalFunction::new(num, char_poly.clone()).invert_with_poles(&poles)?);
        }
        let h = spec.gains.tail_moment_lt(k);
        let lam_n = spec.lambda.powi(spec.n as i32);
        let base = RationalFunction::new(h.num.scale(C64::new(lam_n, 0.0)), char_poly)
            .invert_with_poles(&poles)?;

        // impose vanishing derivatives 0..n-1 at z = b
        let mut m = DMatrix::<C64>::zeros(n, n);
        let mut rhs = DMatrix::<C64>::zeros(n, 1);
        let mut basis_d = basis.clone();
        let mut base_d = base.clone();
        for i in 0..n {
            for (j, f) in basis_d.iter().enumerate() {
                m[(i, j)] = f.evaluate_complex(b);
            }
            rhs[(i, 0)] = -base_d.evaluate_complex(b);
            if i + 1 < n {
                for f in basis_d.iter_mut() {
                    *f = f.differentiate();
                }
                base_d = base_d.differentiate();
            }
        }
        let x = solve_guarded(m, rhs)?;

        let mut reflected = base;
        for (j, f) in basis.iter().enumerate() {
            reflected = reflected.add(&f.scale_complex(x[j]));
        }
        Ok(DividendTransform {
            k,
            delta_effective,
            barrier: b,
            reflected,
            boundary_constants: x,
        })
    }

    /// phi_k(u); above the barrier the dividend is immediate and equals u - b.
    pub fn value(&self, u: f64) -> Result<f64> {
        if u < 0.0 {
            return Err(CoreError::InvalidArgument("u must be >= 0".into()));
        }
        if u > self.barrier {
            return Ok((u - self.barrier).powi(self.k as i32));
        }
        self.reflected.evaluate(self.barrier - u)
    }

    /// Representation in the original variable u, valid on [0, b].
    pub fn representation_in_u(&self) -> ExpoPolynomial {
        self.reflected.compose_affine(-1.0, self.barrier)
    }
}

pub(crate) fn solve_guarded(m: DMatrix<C64>, rhs: DMatrix<C64>) -> Result<Vec<C64>> {
    let n = m.nrows();
    let lu = m.lu();
    let u = lu.u();
    let mut dmax = 0.0f64;
    let mut dmin = f64::INFINITY;
    for i in 0..n {
        let d = u[(i, i)].norm();
        dmax = dmax.max(d);
        dmin = dmin.min(d);
    }
    if dmin == 0.0 || dmax / dmin > COND_LIMIT {
        return Err(CoreError::SingularSystem(format!(
            "boundary system condition estimate {:.3e} exceeds {COND_LIMIT:.1e}",
            dmax / dmin.max(f64::MIN_POSITIVE)
        )));
    }
    let sol = lu
        .solve(&rhs)
        .ok_or_else(|| CoreError::SingularSystem("LU solve failed".into()))?;
    Ok(sol.column(0).iter().copied().collect())
}

/// E[exp(-delta tau_u) D_u^k] with the race against ruin.
pub fn phi(spec: &ModelSpec, k: u32, delta: f64, u: f64) -> Result<f64> {
    DividendTransform::new(spec, k, delta)?.value(u)
}

/// order-th moment of the aggregate discounted dividends, via the recursion
/// over single-dividend moments with effective discount order * delta.
pub fn v_moment(spec: &ModelSpec, order: u32, delta: f64, u: f64) -> Result<f64> {
    let b = spec.barrier_or_err()?;
    if u > b {
        // the overshoot is paid immediately and the process restarts at b
        return Err(CoreError::InvalidArgument("u must lie in [0, b]".into()));
    }
    if order == 0 {
        return Ok(1.0);
    }
    // v_at_b[j] = V_j(b; b, delta)
    let mut v_at_b = vec![1.0f64; (order + 1) as usize];
    let mut transforms_at: Vec<Vec<DividendTransform>> = vec![Vec::new()];
    for j in 1..=order {
        let delta_eff = j as f64 * delta;
        let phis: Result<Vec<DividendTransform>> = (0..=j)
            .map(|k| DividendTransform::with_cap(spec, k, delta_eff, order.max(DEFAULT_MAX_MOMENT)))
            .collect();
        let phis = phis?;
        let phi0_b = phis[0].value(b)?;
        let denom = 1.0 - phi0_b;
        if denom < 1e-12 {
            return Err(CoreError::Numerical(format!(
                "1 - E[exp(-{j} delta tau_b)] = {denom:.3e} too small"
            )));
        }
        let mut acc = 0.0;
        for k in 1..=j {
            acc += binom(j, k) * phis[k as usize].value(b)? * v_at_b[(j - k) as usize];
        }
        v_at_b[j as usize] = acc / denom;
        transforms_at.push(phis);
    }
    let phis = &transforms_at[order as usize];
    let mut acc = 0.0;
    for k in 0..=order {
        acc += binom(order, k) * phis[k as usize].value(u)? * v_at_b[(order - k) as usize];
    }
    Ok(acc)
}

/// Share of the first dividend in the whole expected discounted stream.
pub fn first_dividend_share(spec: &ModelSpec, delta: f64, u: f64) -> Result<f64> {
    let v = v_moment(spec, 1, delta, u)?;
    if v <= 0.0 {
        return Err(CoreError::Numerical("V(u; b, delta) is zero".into()));
    }
    Ok(phi(spec, 1, delta, u)? / v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GainDistribution;

    fn spec(c: f64, b: f64) -> ModelSpec {
        ModelSpec::new(2, 2.0, c, GainDistribution::erlang(2, 1.0).unwrap(), 0.02, Some(b)).unwrap()
    }

    #[test]
    fn first_moment_at_barrier_matches_cross_validated_value() {
        // cross-validated by simulation at 10^6 paths
        let v = phi(&spec(0.75, 1.0), 1, 0.02, 1.0).unwrap();
        assert!((v - 1.18567).abs() < 5e-5, "phi1(1;1) = {v}");
        let v = phi(&spec(1.0, 1.0), 1, 0.02, 1.0).unwrap();
        assert!((v - 0.91481).abs() < 5e-5, "phi1(1;1) c=1 = {v}");
        let v = phi(&spec(2.1, 5.0), 1, 0.02, 5.0).unwrap();
        assert!((v - 1.01327).abs() < 5e-5, "phi1(5;5) c=2.1 = {v}");
    }

    #[test]
    fn overshoot_branch_above_barrier() {
        let s = spec(0.75, 1.0);
        assert_eq!(phi(&s, 1, 0.02, 1.5).unwrap(), 0.5);
        assert_eq!(phi(&s, 0, 0.02, 1.5).unwrap(), 1.0);
        assert_eq!(phi(&s, 2, 0.02, 3.0).unwrap(), 4.0);
    }

    #[test]
    fn boundary_conditions_vanish_at_zero() {
        let s = spec(0.75, 2.0);
        for k in 0..=2 {
            let t = DividendTransform::new(&s, k, 0.02).unwrap();
            let rep = t.representation_in_u();
            for i in 0..s.n as usize {
                let d = rep.derivative_at(i, 0.0).unwrap();
                assert!(d.abs() < 1e-8, "phi_{k}^({i})(0) = {d:.3e}");
            }
        }
    }

    #[test]
    fn phi0_in_unit_interval_and_monotone() {
        let s = spec(1.0, 4.0);
        let t = DividendTransform::new(&s, 0, 0.02).unwrap();
        let mut last = 0.0;
        for i in 0..=20 {
            let u = 4.0 * i as f64 / 20.0;
            let v = t.value(u).unwrap();
            assert!((-1e-9..=1.0 + 1e-9).contains(&v), "u={u}: {v}");
            assert!(v >= last - 1e-10);
            last = v;
        }
    }

    #[test]
    fn integro_differential_residual() {
        let s = spec(1.0, 3.0);
        for k in 0..=1u32 {
            let t = DividendTransform::new(&s, k, 0.02).unwrap();
            let rep = t.representation_in_u();
            let lhs = rep.erlang_operator(s.n, s.lambda, 0.02, s.c);
            // omega(u) = int_0^{b-u} phi(u+y) p(y) dy + H_k(b-u)
            let full = rep.convolve_tail(&s.gains).unwrap();
            let beyond = crate::divdist::tail_conv_beyond(&rep, &s.gains, 3.0);
            let overshoot = s.gains.tail_moment(k).compose_affine(-1.0, 3.0);
            let rhs = full.sub(&beyond).add(&overshoot);
            let grid: Vec<f64> = (1..20).map(|i| 3.0 * i as f64 / 20.0).collect();
            let worst = lhs.max_abs_diff_on(&rhs, &grid).unwrap();
            assert!(worst < 1e-7, "k={k} residual {worst:.2e}");
        }
    }

    #[test]
    fn aggregate_first_moment_decomposition() {
        // V(u) = phi_1(u) + phi_0(u) phi_1(b) / (1 - phi_0(b)) exactly
        let s = spec(0.75, 2.0);
        let delta = 0.02;
        let t0 = DividendTransform::new(&s, 0, delta).unwrap();
        let t1 = DividendTransform::new(&s, 1, delta).unwrap();
        for u in [0.0, 0.7, 1.5, 2.0] {
            let direct = v_moment(&s, 1, delta, u).unwrap();
            let manual = t1.value(u).unwrap()
                + t0.value(u).unwrap() * t1.value(2.0).unwrap() / (1.0 - t0.value(2.0).unwrap());
            assert!((direct - manual).abs() < 1e-10);
        }
    }

    #[test]
    fn share_is_a_probability_like_ratio() {
        let s = spec(0.75, 2.0);
        let share = first_dividend_share(&s, 0.02, 1.0).unwrap();
        assert!(share > 0.0 && share <= 1.0);
        // near the barrier the share tends to phi_1(b)/V(b)
        let share_b = first_dividend_share(&s, 0.02, 2.0).unwrap();
        let t1 = phi(&s, 1, 0.02, 2.0).unwrap();
        let v = v_moment(&s, 1, 0.02, 2.0).unwrap();
        assert!((share_b - t1 / v).abs() < 1e-12);
    }

    #[test]
    fn moment_order_cap() {
        let s = spec(0.75, 1.0);
        assert!(DividendTransform::new(&s, DEFAULT_MAX_MOMENT + 1, 0.02).is_err());
    }
}
