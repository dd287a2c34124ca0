//! Gain-count distributions: q(u, m), the probability of exactly m gains
//! before ruin in the barrier-free model, and r(u, b, m), the probability
//! that the m-th gain is the first to carry the surplus above b (ruin
//! ignored; a function of v = b - u only).
//!
//! Both chains run symbolically in the exponential-polynomial algebra:
//! q's recursion alternates a tail convolution with solving
//! (I + D/a)^n q = omega under n vanishing derivatives at zero, and r's
//! recursion alternates a finite convolution with the Erlang(n, a) smoothing
//! operator.

use crate::error::{CoreError, Result};
use crate::exppoly::{factorial, ExpoPolynomial};
use crate::model::{GainDistribution, IncomeCondition, ModelSpec};
use crate::C64;

/// Default cap on the count index m.
pub const DEFAULT_CAP: usize = 50;

/// Lazily extended chain of q(., m) representations for one spec.
pub struct GainCountChain {
    spec: ModelSpec,
    reps: Vec<ExpoPolynomial>,
    cap: usize,
}

impl GainCountChain {
    pub fn new(spec: &ModelSpec) -> Self {
        GainCountChain { spec: spec.clone(), reps: vec![q_zero(spec)], cap: DEFAULT_CAP }
    }

    pub fn with_cap(spec: &ModelSpec, cap: usize) -> Self {
        GainCountChain { cap, ..Self::new(spec) }
    }

    pub fn representation(&mut self, m: usize) -> Result<&ExpoPolynomial> {
        if m > self.cap {
            return Err(CoreError::CapExceeded { m, cap: self.cap });
        }
        while self.reps.len() <= m {
            let prev = self.reps.last().unwrap();
            let omega = prev.convolve_tail(&self.spec.gains)?;
            let next = solve_erlang_ode(&omega, self.spec.n, self.spec.a());
            self.reps.push(next);
        }
        Ok(&self.reps[m])
    }

    pub fn value(&mut self, u: f64, m: usize) -> Result<f64> {
        if u == 0.0 {
            // ruin is immediate from zero surplus
            return Ok(if m == 0 { 1.0 } else { 0.0 });
        }
        self.representation(m)?.evaluate(u)
    }

    /// omega_q(., m) = tail convolution of q(., m) against the gains.
    pub fn omega_representation(&mut self, m: usize) -> Result<ExpoPolynomial> {
        let rep = self.representation(m)?.clone();
        rep.convolve_tail(&self.spec.gains)
    }
}

/// q(u, 0) = survival of the Erlang(n, a) law at u (no gain before ruin).
fn q_zero(spec: &ModelSpec) -> ExpoPolynomial {
    let a = spec.a();
    let mut acc = ExpoPolynomial::zero();
    for i in 0..spec.n {
        acc = acc.add(&ExpoPolynomial::term_real(
            a.powi(i as i32) / factorial(i),
            i,
            a,
        ));
    }
    acc
}

/// Solve (I + D/a)^n f = omega with f^{(i)}(0) = 0 for i < n: writing
/// f = e^{-a u} F reduces to F^{(n)} = a^n e^{a u} omega with zero initial
/// conditions, i.e. an n-fold Cauchy integral done as a finite convolution
/// with u^{n-1}/(n-1)!.
fn solve_erlang_ode(omega: &ExpoPolynomial, n: u32, a: f64) -> ExpoPolynomial {
    let a_c = C64::new(a, 0.0);
    let forcing = omega
        .shift_rate(-a_c)
        .scale(a.powi(n as i32));
    let kernel = ExpoPolynomial::term_real(1.0 / factorial(n - 1), n - 1, 0.0);
    let integrated = kernel.convolve_finite(&forcing);
    integrated.shift_rate(a_c)
}

/// q(u, m) through the generic pipeline.
pub fn q(spec: &ModelSpec, u: f64, m: usize) -> Result<f64> {
    GainCountChain::new(spec).value(u, m)
}

/// Closed form q(u, 1) = sum_j B_j u^{n+j} e^{-a u}.
pub fn q1_closed_form(spec: &ModelSpec, u: f64) -> Result<f64> {
    q1_representation(spec)?.evaluate(u)
}

pub fn q1_representation(spec: &ModelSpec) -> Result<ExpoPolynomial> {
    let a = spec.a();
    let n = spec.n;
    let mut acc = ExpoPolynomial::zero();
    for j in 0..n {
        // B_j = a^{n+j}/(n+j)! sum_{i=0}^{n-1-j} (-1)^i a^i/i! phat^(i)(a)
        let mut inner = 0.0;
        for i in 0..=(n - 1 - j) {
            let d = spec.gains.lt_derivative(i, C64::new(a, 0.0))?;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            inner += sign * a.powi(i as i32) / factorial(i) * d.re;
        }
        let bj = a.powi((n + j) as i32) / factorial(n + j) * inner;
        acc = acc.add(&ExpoPolynomial::term_real(bj, n + j, a));
    }
    Ok(acc)
}

/// Closed form omega_q(u, 0): the tail convolution of q(., 0), evaluated via
/// transform derivatives at a.
pub fn omega_q0(spec: &ModelSpec, u: f64) -> Result<f64> {
    omega_q0_representation(spec)?.evaluate(u)
}

pub fn omega_q0_representation(spec: &ModelSpec) -> Result<ExpoPolynomial> {
    let a = spec.a();
    let n = spec.n;
    let mut acc = ExpoPolynomial::zero();
    for i in 0..n {
        let mut inner = 0.0;
        for j in 0..=(n - i - 1) {
            let d = spec.gains.lt_derivative(j, C64::new(a, 0.0))?;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            inner += sign * a.powi(j as i32) / factorial(j) * d.re;
        }
        acc = acc.add(&ExpoPolynomial::term_real(
            a.powi(i as i32) / factorial(i) * inner,
            i,
            a,
        ));
    }
    Ok(acc)
}

/// Transform of omega_q(., 0) at s.
pub fn omega_q0_lt(spec: &ModelSpec, s: C64) -> Result<C64> {
    let a = spec.a();
    if s.re <= -a {
        return Err(CoreError::InvalidArgument("transform needs Re(s) > -a".into()));
    }
    let rep = omega_q0_representation(spec)?;
    Ok(rep.laplace().eval(s))
}

/// Transform of q(., m): m = 0 gives (1 - (a/(a+s))^n)/s, m >= 1 divides the
/// omega transform by (1 + s/a)^n.
pub fn q_lt(spec: &ModelSpec, s: C64, m: usize) -> Result<C64> {
    let a = C64::new(spec.a(), 0.0);
    if s.re <= -spec.a() {
        return Err(CoreError::InvalidArgument("transform needs Re(s) > -a".into()));
    }
    if m == 0 {
        let k_hat = (a / (a + s)).powi(spec.n as i32);
        return Ok((C64::new(1.0, 0.0) - k_hat) / s);
    }
    let mut chain = GainCountChain::new(spec);
    let omega = chain.omega_representation(m - 1)?;
    let k_hat = (a / (a + s)).powi(spec.n as i32);
    Ok(omega.laplace().eval(s) * k_hat)
}

/// Lazily extended chain of r(0, ., m) representations (functions of v).
pub struct TargetCountChain {
    spec: ModelSpec,
    erlang_na: GainDistribution,
    reps: Vec<ExpoPolynomial>,
    cap: usize,
}

impl TargetCountChain {
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        let erlang_na = GainDistribution::erlang(spec.n, spec.a())?;
        let r1 = spec.gains.survival().convolve_tail(&erlang_na)?;
        Ok(TargetCountChain {
            spec: spec.clone(),
            erlang_na,
            reps: vec![r1],
            cap: DEFAULT_CAP,
        })
    }

    pub fn with_cap(spec: &ModelSpec, cap: usize) -> Result<Self> {
        Ok(TargetCountChain { cap, ..Self::new(spec)? })
    }

    /// Representation of v -> r(0, v, m); m >= 1.
    pub fn representation(&mut self, m: usize) -> Result<&ExpoPolynomial> {
        if m == 0 {
            return Err(CoreError::InvalidArgument("r is defined for m >= 1".into()));
        }
        if m > self.cap {
            return Err(CoreError::CapExceeded { m, cap: self.cap });
        }
        while self.reps.len() < m {
            let prev = self.reps.last().unwrap();
            let conv = self.spec.gains.density().convolve_finite(prev);
            let next = conv.convolve_tail(&self.erlang_na)?;
            self.reps.push(next);
        }
        Ok(&self.reps[m - 1])
    }

    pub fn value(&mut self, u: f64, b: f64, m: usize) -> Result<f64> {
        if b < u {
            return Err(CoreError::InvalidArgument("need b >= u".into()));
        }
        let v = b - u;
        self.representation(m)?.evaluate(v)
    }
}

/// r(u, b, m) through the generic pipeline.
pub fn r(spec: &ModelSpec, u: f64, b: f64, m: usize) -> Result<f64> {
    TargetCountChain::new(spec)?.value(u, b, m)
}

/// r(0, 0, m) for m >= 2 via derivatives of s p_hat(s) r_hat(0, s, m-1) at a.
pub fn r00_recursive(spec: &ModelSpec, m: usize) -> Result<f64> {
    if m < 2 {
        return Err(CoreError::InvalidArgument("recursive form needs m >= 2".into()));
    }
    let a = spec.a();
    let ac = C64::new(a, 0.0);
    let order = spec.n as usize - 1;
    let mut chain = TargetCountChain::new(spec)?;
    let prev = chain.representation(m - 1)?.clone();
    // Taylor series at a of s, p_hat(s) and r_hat(s), multiplied out; the
    // term-by-term series route avoids the cancellation a shared-denominator
    // rational form would suffer at high m.
    let t_s: Vec<C64> = (0..=order)
        .map(|j| match j {
            0 => ac,
            1 => C64::new(1.0, 0.0),
            _ => C64::new(0.0, 0.0),
        })
        .collect();
    let mut t_p = Vec::with_capacity(order + 1);
    let mut fact = 1.0f64;
    for j in 0..=order {
        if j > 0 {
            fact *= j as f64;
        }
        t_p.push(spec.gains.lt_derivative(j as u32, ac)? / fact);
    }
    let t_r = prev.laplace_taylor_at(ac, order)?;
    let mut prod = vec![C64::new(0.0, 0.0); order + 1];
    for i in 0..=order {
        for j in 0..=(order - i) {
            for k in 0..=(order - i - j) {
                prod[i + j + k] += t_s[i] * t_p[j] * t_r[k];
            }
        }
    }
    // sum_k ((-a)^k / k!) f^{(k)}(a) = sum_k (-a)^k * taylor_k
    let mut acc = C64::new(0.0, 0.0);
    let mut apow = 1.0f64;
    for (k, t) in prod.iter().enumerate() {
        if k > 0 {
            apow *= -a;
        }
        acc += *t * apow;
    }
    Ok(acc.re)
}

/// Tail probability of needing more than M gains to reach the target. Under
/// a satisfied (or boundary) income condition the total mass is one; under a
/// violated condition the defective mass must be supplied externally (e.g.
/// estimated by simulation) via [`r_tail_with_mass`].
pub fn r_tail(spec: &ModelSpec, u: f64, b: f64, max_m: usize) -> Result<f64> {
    match spec.income_condition() {
        IncomeCondition::Violated => Err(CoreError::IncomeViolated(
            "total reach probability is defective; supply it via r_tail_with_mass".into(),
        )),
        _ => r_tail_with_mass(spec, u, b, max_m, 1.0),
    }
}

pub fn r_tail_with_mass(spec: &ModelSpec, u: f64, b: f64, max_m: usize, mass: f64) -> Result<f64> {
    let mut chain = TargetCountChain::new(spec)?;
    let mut acc = 0.0;
    for m in 1..=max_m {
        acc += chain.value(u, b, m)?;
    }
    let tail = mass - acc;
    if tail < -1e-9 {
        return Err(CoreError::Numerical(format!(
            "negative tail {tail:.3e}: partial sums exceed the supplied mass"
        )));
    }
    Ok(tail.max(0.0))
}
