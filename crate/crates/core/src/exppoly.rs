//! Exponential-polynomial algebra: finite sums of `coeff * u^j * exp(-rate*u)`
//! with complex coefficients and rates.
//!
//! The family is closed under differentiation, tail integration, Laplace
//! transform, partial-fraction inversion, finite convolution and tail
//! convolution against the model's gain densities, which is why every
//! analytic quantity in the crate lives here.

use crate::error::{CoreError, Result};
use crate::model::GainDistribution;
use crate::poly::Poly;
use crate::C64;

/// Coefficients at or below this absolute size are dropped. Relative-to-max
/// pruning is deliberately avoided: in the gain-count chains the top-degree
/// coefficients are many orders below the largest one yet still carry real
/// mass once multiplied by u^power, and pruning them compounds into a visible
/// probability leak over the recursion.
const PRUNE_ABS: f64 = 1e-290;
/// Relative radius within which two rates are merged into one.
const RATE_MERGE_EPS: f64 = 1e-8;
/// Relative tolerance for the real-representability check at evaluation.
const REAL_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpoTerm {
    pub coeff: C64,
    pub power: u32,
    pub rate: C64,
}

/// Canonical sum of `coeff * u^power * exp(-rate*u)` terms: sorted by
/// (rate, power), one term per (rate, power) pair, tiny coefficients pruned.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpoPolynomial {
    terms: Vec<ExpoTerm>,
}

impl ExpoPolynomial {
    pub fn zero() -> Self {
        ExpoPolynomial { terms: vec![] }
    }

    pub fn constant(c: f64) -> Self {
        ExpoPolynomial::from_terms(vec![ExpoTerm {
            coeff: C64::new(c, 0.0),
            power: 0,
            rate: C64::new(0.0, 0.0),
        }])
    }

    /// coeff * u^power * exp(-rate*u)
    pub fn term(coeff: C64, power: u32, rate: C64) -> Self {
        ExpoPolynomial::from_terms(vec![ExpoTerm { coeff, power, rate }])
    }

    pub fn term_real(coeff: f64, power: u32, rate: f64) -> Self {
        Self::term(C64::new(coeff, 0.0), power, C64::new(rate, 0.0))
    }

    pub fn from_terms(terms: Vec<ExpoTerm>) -> Self {
        let mut p = ExpoPolynomial { terms };
        p.canonicalize();
        p
    }

    pub fn terms(&self) -> &[ExpoTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).fold(0.0, f64::max)
    }

    fn canonicalize(&mut self) {
        if self.terms.is_empty() {
            return;
        }
        // merge nearly identical rates to a shared representative
        let scale = 1.0 + self.terms.iter().map(|t| t.rate.norm()).fold(0.0, f64::max);
        let tol = RATE_MERGE_EPS * scale;
        let mut reps: Vec<C64> = Vec::new();
        for t in self.terms.iter() {
            if !reps.iter().any(|r| (*r - t.rate).norm() <= tol) {
                reps.push(t.rate);
            }
        }
        for t in self.terms.iter_mut() {
            if let Some(r) = reps.iter().find(|r| (**r - t.rate).norm() <= tol) {
                t.rate = *r;
            }
        }
        self.terms.sort_by(|a, b| {
            (a.rate.re, a.rate.im, a.power)
                .partial_cmp(&(b.rate.re, b.rate.im, b.power))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut merged: Vec<ExpoTerm> = Vec::with_capacity(self.terms.len());
        for &t in self.terms.iter() {
            match merged.last_mut() {
                Some(last) if last.rate == t.rate && last.power == t.power => {
                    last.coeff += t.coeff;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff.norm() > PRUNE_ABS);
        self.terms = merged;
    }

    /// Complex evaluation without the real-representability gate.
    pub fn evaluate_complex(&self, u: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for t in &self.terms {
            acc += t.coeff * u.powi(t.power as i32) * (-t.rate * u).exp();
        }
        acc
    }

    /// Evaluate at real `u >= 0`, asserting the imaginary residue is noise.
    pub fn evaluate(&self, u: f64) -> Result<f64> {
        let v = self.evaluate_complex(u);
        if v.im.abs() > REAL_EPS * (1.0 + v.re.abs()) {
            return Err(CoreError::NotReal { imag: v.im, u });
        }
        Ok(v.re)
    }

    pub fn add(&self, other: &ExpoPolynomial) -> ExpoPolynomial {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        ExpoPolynomial::from_terms(terms)
    }

    pub fn sub(&self, other: &ExpoPolynomial) -> ExpoPolynomial {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, k: f64) -> ExpoPolynomial {
        self.scale_complex(C64::new(k, 0.0))
    }

    pub fn scale_complex(&self, k: C64) -> ExpoPolynomial {
        ExpoPolynomial::from_terms(
            self.terms
                .iter()
                .map(|t| ExpoTerm { coeff: t.coeff * k, ..*t })
                .collect(),
        )
    }

    /// Multiply by exp(-delta*u): shifts every rate by `delta`.
    pub fn shift_rate(&self, delta: C64) -> ExpoPolynomial {
        ExpoPolynomial::from_terms(
            self.terms
                .iter()
                .map(|t| ExpoTerm { rate: t.rate + delta, ..*t })
                .collect(),
        )
    }

    /// f(sign*u + shift) as a function of u; `sign` is +1 or -1.
    pub fn compose_affine(&self, sign: f64, shift: f64) -> ExpoPolynomial {
        let mut out = Vec::new();
        for t in &self.terms {
            // (sign*u + shift)^p expanded binomially
            let base = t.coeff * (-t.rate * shift).exp();
            for j in 0..=t.power {
                let bin = binom(t.power, j);
                let c = base * bin * shift.powi((t.power - j) as i32) * sign.powi(j as i32);
                out.push(ExpoTerm {
                    coeff: c,
                    power: j,
                    rate: t.rate * sign,
                });
            }
        }
        ExpoPolynomial::from_terms(out)
    }

    pub fn differentiate(&self) -> ExpoPolynomial {
        let mut out = Vec::new();
        for t in &self.terms {
            if t.power > 0 {
                out.push(ExpoTerm {
                    coeff: t.coeff * t.power as f64,
                    power: t.power - 1,
                    rate: t.rate,
                });
            }
            out.push(ExpoTerm {
                coeff: -t.coeff * t.rate,
                power: t.power,
                rate: t.rate,
            });
        }
        ExpoPolynomial::from_terms(out)
    }

    pub fn derivative_at(&self, order: usize, u: f64) -> Result<f64> {
        let mut f = self.clone();
        for _ in 0..order {
            f = f.differentiate();
        }
        f.evaluate(u)
    }

    /// u -> integral_u^inf f(t) dt. Every rate must have positive real part.
    pub fn antiderivative_tail(&self) -> Result<ExpoPolynomial> {
        let mut out = Vec::new();
        for t in &self.terms {
            if t.rate.re <= 0.0 {
                return Err(CoreError::NonintegrableTail {
                    rate: format!("{}", t.rate),
                });
            }
            // int_u^inf t^p e^{-rt} dt = e^{-ru} sum_{j=0..p} p!/(p-j)! u^{p-j} / r^{j+1}
            let p = t.power;
            let mut fall = 1.0f64;
            for j in 0..=p {
                if j > 0 {
                    fall *= (p - j + 1) as f64;
                }
                out.push(ExpoTerm {
                    coeff: t.coeff * fall / t.rate.powi(j as i32 + 1),
                    power: p - j,
                    rate: t.rate,
                });
            }
        }
        Ok(ExpoPolynomial::from_terms(out))
    }

    /// u -> integral_0^inf f(u + x) p(x) dx, exactly, using derivatives of the
    /// gain transform at each term rate. The result keeps f's rate set.
    pub fn convolve_tail(&self, gains: &GainDistribution) -> Result<ExpoPolynomial> {
        let mut out = Vec::new();
        for t in &self.terms {
            // f term: c (u+x)^p e^{-r(u+x)} -> c e^{-ru} sum_j C(p,j) u^{p-j} (-1)^j phat^{(j)}(r)
            let p = t.power;
            for j in 0..=p {
                let d = gains.lt_derivative(j, t.rate)?;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                out.push(ExpoTerm {
                    coeff: t.coeff * binom(p, j) * sign * d,
                    power: p - j,
                    rate: t.rate,
                });
            }
        }
        Ok(ExpoPolynomial::from_terms(out))
    }

    /// Dickson-Hipp shift transform: T_s f(x) = integral_0^inf e^{-st} f(t+x) dt.
    pub fn dickson_hipp(&self, s: C64, x: f64) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for t in &self.terms {
            let q = s + t.rate;
            if q.re <= 0.0 {
                return Err(CoreError::NonintegrableTail { rate: format!("{q}") });
            }
            // c (t+x)^p e^{-r(t+x)}: expand (t+x)^p
            let mut fact = 1.0f64;
            for j in 0..=t.power {
                if j > 0 {
                    fact *= j as f64;
                }
                acc += t.coeff
                    * (-t.rate * x).exp()
                    * binom(t.power, j)
                    * x.powi((t.power - j) as i32)
                    * fact
                    / q.powi(j as i32 + 1);
            }
        }
        Ok(acc)
    }

    /// Laplace transform as a reduced rational function:
    /// u^j e^{-ru} -> j!/(s+r)^{j+1}.
    pub fn laplace(&self) -> RationalFunction {
        // distinct rates with their max powers form the common denominator
        let mut groups: Vec<(C64, u32)> = Vec::new();
        for t in &self.terms {
            match groups.iter_mut().find(|(r, _)| *r == t.rate) {
                Some((_, m)) => *m = (*m).max(t.power),
                None => groups.push((t.rate, t.power)),
            }
        }
        let mut den = Poly::one();
        for &(r, m) in &groups {
            den = den.mul(&Poly::linear(r).pow(m + 1));
        }
        let mut num = Poly::zero();
        for t in &self.terms {
            // cofactor = den / (s + r)^{power+1}
            let mut cof = Poly::one();
            for &(r, m) in &groups {
                let k = if r == t.rate { m - t.power } else { m + 1 };
                cof = cof.mul(&Poly::linear(r).pow(k));
            }
            num = num.add(&cof.scale(t.coeff * factorial(t.power)));
        }
        RationalFunction { num, den }
    }

    /// Taylor coefficients at s0 of the Laplace transform, term by term:
    /// the j-th coefficient of c k!/(s+r)^{k+1} is
    /// c k! (-1)^j C(k+j, j) / (s0+r)^{k+1+j}, accumulated as a running
    /// product so large powers stay finite.
    pub fn laplace_taylor_at(&self, s0: C64, order: usize) -> Result<Vec<C64>> {
        let mut out = vec![C64::new(0.0, 0.0); order + 1];
        for t in &self.terms {
            let base = s0 + t.rate;
            if base.norm() <= 1e-12 * (1.0 + s0.norm()) {
                return Err(CoreError::PoleCollision { at: format!("{s0}") });
            }
            // factorial(k) / base^{k+1} as a running ratio
            let mut head = C64::new(1.0, 0.0) / base;
            for i in 1..=t.power {
                head *= C64::new(i as f64, 0.0) / base;
            }
            let mut cur = t.coeff * head;
            for (j, slot) in out.iter_mut().enumerate() {
                *slot += cur;
                // next: multiply by -(k+j+1)/((j+1) base)
                cur *= -C64::new((t.power as usize + j + 1) as f64, 0.0)
                    / (C64::new((j + 1) as f64, 0.0) * base);
            }
        }
        Ok(out)
    }

    /// Finite convolution (f * g)(w) = integral_0^w f(x) g(w - x) dx.
    pub fn convolve_finite(&self, other: &ExpoPolynomial) -> ExpoPolynomial {
        let mut acc = ExpoPolynomial::zero();
        for a in &self.terms {
            for b in &other.terms {
                let piece = conv_monomials(a.power, a.rate, b.power, b.rate)
                    .scale_complex(a.coeff * b.coeff);
                acc = acc.add(&piece);
            }
        }
        acc
    }

    /// Apply ((1 + delta/lambda) I + (c/lambda) D)^n.
    pub fn erlang_operator(&self, n: u32, lambda: f64, delta: f64, c: f64) -> ExpoPolynomial {
        let a = 1.0 + delta / lambda;
        let b = c / lambda;
        let mut cur = self.clone();
        for _ in 0..n {
            cur = cur.scale(a).add(&cur.differentiate().scale(b));
        }
        cur
    }

    /// Largest |f(u) - g(u)| over a grid, for tests and residual checks.
    pub fn max_abs_diff_on(&self, other: &ExpoPolynomial, grid: &[f64]) -> Result<f64> {
        let mut worst = 0.0f64;
        for &u in grid {
            let d = (self.evaluate_complex(u) - other.evaluate_complex(u)).norm();
            worst = worst.max(d);
        }
        Ok(worst)
    }
}

/// Convolution of u^p e^{-r1 u} with u^q e^{-r2 u} in closed form via the
/// partial fractions of p! q! / ((s+r1)^{p+1} (s+r2)^{q+1}).
fn conv_monomials(p: u32, r1: C64, q: u32, r2: C64) -> ExpoPolynomial {
    let scale = 1.0 + r1.norm().max(r2.norm());
    if (r1 - r2).norm() <= RATE_MERGE_EPS * scale {
        // equal rates: B(p+1, q+1) w^{p+q+1} e^{-rw}; the beta factor is
        // computed as 1/((p+q+1) C(p+q, p)) so large powers cannot overflow
        let r = (r1 + r2) / C64::new(2.0, 0.0);
        let coeff = 1.0 / ((p + q + 1) as f64 * binom(p + q, p.min(q)));
        return ExpoPolynomial::term(C64::new(coeff, 0.0), p + q + 1, r);
    }
    let mut out = Vec::new();
    let full = C64::new(factorial(p) * factorial(q), 0.0);
    // poles at -r1 (mult p+1) and -r2 (mult q+1)
    for (&ra, pa, &rb, qb) in [(&r1, p, &r2, q), (&r2, q, &r1, p)] {
        // expansion of (s+rb)^{-(qb+1)} around s = -ra
        let d = rb - ra;
        let mut rising = 1.0f64; // (qb+1)_t
        for t in 0..=pa {
            if t > 0 {
                rising *= (qb + t) as f64;
            }
            let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
            let coef = full * sign * rising / factorial(t) / d.powi((qb + 1 + t) as i32);
            // coefficient of (s+ra)^{-(pa+1-t)} inverts to u^{pa-t} e^{-ra u}/(pa-t)!
            out.push(ExpoTerm {
                coeff: coef / factorial(pa - t),
                power: pa - t,
                rate: ra,
            });
        }
    }
    ExpoPolynomial::from_terms(out)
}

/// Rational function: numerator / denominator, complex dense coefficients.
#[derive(Debug, Clone)]
pub struct RationalFunction {
    pub num: Poly,
    pub den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Self {
        RationalFunction { num, den }
    }

    pub fn eval(&self, s: C64) -> C64 {
        self.num.eval(s) / self.den.eval(s)
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        RationalFunction {
            num: self.num.mul(&other.num),
            den: self.den.mul(&other.den),
        }
    }

    /// Taylor coefficients of num/den around s0 up to order k (series division).
    pub fn taylor_at(&self, s0: C64, k: usize) -> Result<Vec<C64>> {
        let n = self.num.taylor_at(s0, k);
        let d = self.den.taylor_at(s0, k);
        if d[0].norm() == 0.0 {
            return Err(CoreError::Numerical(format!("pole at expansion point {s0}")));
        }
        let mut out = vec![C64::new(0.0, 0.0); k + 1];
        for i in 0..=k {
            let mut acc = n[i];
            for j in 0..i {
                acc -= out[j] * d[i - j];
            }
            out[i] = acc / d[0];
        }
        Ok(out)
    }

    /// Derivative of order `k` evaluated at `s0`.
    pub fn derivative_at(&self, k: usize, s0: C64) -> Result<C64> {
        let t = self.taylor_at(s0, k)?;
        Ok(t[k] * C64::new(factorial(k as u32), 0.0))
    }

    /// Partial-fraction inversion with the denominator's roots found here.
    pub fn invert(&self) -> Result<ExpoPolynomial> {
        let poles = self.den.roots()?;
        self.invert_with_poles(&poles)
    }

    /// Partial-fraction inversion at known (clustered) poles. A pole at s0
    /// with multiplicity k contributes u^0..u^{k-1} times e^{s0 u}, i.e.
    /// terms with rate -s0. Requires a strictly proper function.
    ///
    /// Coefficients are found by collocation: num/den is evaluated on a
    /// circle enclosing all poles (where both polynomials are
    /// well-conditioned) and the linear system in the basis 1/(s-s0)^j is
    /// solved directly. This avoids the error amplification that deflation at
    /// slightly-off cluster centers feeds into nearly coincident poles.
    pub fn invert_with_poles(&self, poles: &[(C64, usize)]) -> Result<ExpoPolynomial> {
        use nalgebra::DMatrix;
        if self.num.is_zero() {
            return Ok(ExpoPolynomial::zero());
        }
        if self.num.degree() >= self.den.degree() {
            return Err(CoreError::ImproperRational {
                num: self.num.degree(),
                den: self.den.degree(),
            });
        }
        let total: usize = poles.iter().map(|p| p.1).sum();
        if total != self.den.degree() {
            return Err(CoreError::Numerical(format!(
                "pole multiplicities sum to {total}, denominator degree is {}",
                self.den.degree()
            )));
        }
        let centroid = poles
            .iter()
            .fold(C64::new(0.0, 0.0), |acc, &(p, m)| acc + p * C64::new(m as f64, 0.0))
            / C64::new(total as f64, 0.0);
        let spread = poles
            .iter()
            .map(|&(p, _)| (p - centroid).norm())
            .fold(0.0, f64::max);
        let radius = 2.0 * (1.0 + spread);

        let mut m = DMatrix::<C64>::zeros(total, total);
        let mut rhs = DMatrix::<C64>::zeros(total, 1);
        for t in 0..total {
            let ang = 2.0 * std::f64::consts::PI * (t as f64 + 0.5) / total as f64;
            let s = centroid + C64::new(radius * ang.cos(), radius * ang.sin());
            let mut col = 0usize;
            for &(pole, mult) in poles {
                let base = C64::new(1.0, 0.0) / (s - pole);
                let mut cur = base;
                for _ in 0..mult {
                    m[(t, col)] = cur;
                    cur *= base;
                    col += 1;
                }
            }
            rhs[(t, 0)] = self.num.eval(s) / self.den.eval(s);
        }
        let sol = m
            .lu()
            .solve(&rhs)
            .ok_or_else(|| CoreError::SingularSystem("partial-fraction collocation".into()))?;

        let mut out = Vec::new();
        let mut col = 0usize;
        for &(pole, mult) in poles {
            for j in 1..=mult {
                // A/(s-pole)^j inverts to A u^{j-1} e^{pole u}/(j-1)!
                out.push(ExpoTerm {
                    coeff: sol[(col, 0)] / factorial(j as u32 - 1),
                    power: j as u32 - 1,
                    rate: -pole,
                });
                col += 1;
            }
        }
        Ok(ExpoPolynomial::from_terms(out))
    }
}

pub(crate) fn binom(n: u32, k: u32) -> f64 {
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GainDistribution;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn erlang21() -> GainDistribution {
        GainDistribution::new(vec![(1.0, 1.0, 2)]).unwrap()
    }

    #[test]
    fn evaluate_basics() {
        assert_eq!(ExpoPolynomial::constant(1.0).evaluate(7.0).unwrap(), 1.0);
        let f = ExpoPolynomial::term_real(1.0, 0, 2.0);
        assert_eq!(f.evaluate(0.0).unwrap(), 1.0);
    }

    #[test]
    fn derivative_of_u_exp() {
        // d/du [u e^{-2u}] = (1 - 2u) e^{-2u}
        let f = ExpoPolynomial::term_real(1.0, 1, 2.0);
        let d = f.differentiate();
        for u in [0.0f64, 0.5, 1.3] {
            let want = (1.0 - 2.0 * u) * (-2.0 * u).exp();
            assert!((d.evaluate(u).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn tail_integral() {
        // int_u^inf e^{-2t} dt = e^{-2u}/2
        let f = ExpoPolynomial::term_real(1.0, 0, 2.0);
        let tail = f.antiderivative_tail().unwrap();
        for u in [0.0, 1.0, 2.5] {
            assert!((tail.evaluate(u).unwrap() - 0.5 * (-2.0 * u).exp()).abs() < 1e-14);
        }
        // derivative of the tail gives back -f
        let back = tail.differentiate();
        assert!(back.add(&f).max_coeff() < 1e-12);
        // constants are not integrable
        assert!(ExpoPolynomial::constant(1.0).antiderivative_tail().is_err());
    }

    #[test]
    fn convolve_tail_against_known_values() {
        let gains = erlang21();
        // f = 1 -> 1
        let one = ExpoPolynomial::constant(1.0);
        let g = one.convolve_tail(&gains).unwrap();
        assert!((g.evaluate(3.0).unwrap() - 1.0).abs() < 1e-12);
        // f = e^{-2u} -> phat(2) e^{-2u} = (1/9) e^{-2u}
        let f = ExpoPolynomial::term_real(1.0, 0, 2.0);
        let g = f.convolve_tail(&gains).unwrap();
        assert!((g.evaluate(0.0).unwrap() - 1.0 / 9.0).abs() < 1e-12);
        assert!((g.evaluate(1.0).unwrap() - (1.0 / 9.0) * (-2.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn dickson_hipp_values() {
        // f = e^{-bt}: T_s f(x) = e^{-bx}/(s+b)
        let f = ExpoPolynomial::term_real(1.0, 0, 3.0);
        let v = f.dickson_hipp(c(1.0), 0.0).unwrap();
        assert!((v - c(0.25)).norm() < 1e-14);
        let v = f.dickson_hipp(c(1.0), 1.0).unwrap();
        assert!((v - c((-3.0f64).exp() / 4.0)).norm() < 1e-14);
        // survival function of the gains: T_s Pbar(0) = (1 - phat(s))/s
        let pbar = erlang21().survival();
        let s = c(1.7);
        let got = pbar.dickson_hipp(s, 0.0).unwrap();
        let phat = erlang21().lt().eval(s);
        assert!((got - (c(1.0) - phat) / s).norm() < 1e-12);
    }

    #[test]
    fn laplace_known_transforms() {
        // 1 -> 1/s
        let f = ExpoPolynomial::constant(1.0);
        let r = f.laplace();
        assert!((r.eval(c(2.0)) - c(0.5)).norm() < 1e-14);
        // u e^{-au} -> 1/(s+a)^2
        let f = ExpoPolynomial::term_real(1.0, 1, 1.5);
        let r = f.laplace();
        let s = c(0.7);
        assert!((r.eval(s) - c(1.0) / (s + c(1.5)).powi(2)).norm() < 1e-14);
    }

    #[test]
    fn invert_simple_rationals() {
        // 1/(s+2) -> e^{-2u}
        let r = RationalFunction::new(Poly::one(), Poly::linear(c(2.0)));
        let f = r.invert().unwrap();
        assert!((f.evaluate(1.0).unwrap() - (-2.0f64).exp()).abs() < 1e-12);
        // 1/(s+2)^2 -> u e^{-2u}
        let r = RationalFunction::new(Poly::one(), Poly::linear(c(2.0)).pow(2));
        let f = r.invert().unwrap();
        assert!((f.evaluate(1.5).unwrap() - 1.5 * (-3.0f64).exp()).abs() < 1e-12);
        // 1/((s+1)(s+2)) -> e^{-u} - e^{-2u}
        let r = RationalFunction::new(
            Poly::one(),
            Poly::linear(c(1.0)).mul(&Poly::linear(c(2.0))),
        );
        let f = r.invert().unwrap();
        for u in [0.0f64, 0.4, 2.0] {
            let want = (-u).exp() - (-2.0 * u).exp();
            assert!((f.evaluate(u).unwrap() - want).abs() < 1e-12);
        }
        // improper input is rejected
        let bad = RationalFunction::new(Poly::linear(c(0.0)), Poly::linear(c(1.0)));
        assert!(bad.invert().is_err());
    }

    #[test]
    fn laplace_invert_round_trip() {
        let f = ExpoPolynomial::term_real(0.7, 2, 1.0)
            .add(&ExpoPolynomial::term_real(-0.3, 0, 2.5))
            .add(&ExpoPolynomial::term_real(1.1, 1, 0.4));
        let back = f.laplace().invert().unwrap();
        let grid: Vec<f64> = (0..20).map(|k| 0.3 * k as f64).collect();
        assert!(f.max_abs_diff_on(&back, &grid).unwrap() < 1e-9);
    }

    #[test]
    fn finite_convolution_matches_quadrature() {
        let f = ExpoPolynomial::term_real(1.0, 1, 1.0);
        let g = ExpoPolynomial::term_real(2.0, 0, 3.0);
        let conv = f.convolve_finite(&g);
        for w in [0.5, 1.0, 2.0] {
            // trapezoid oracle
            let n = 20_000;
            let h = w / n as f64;
            let mut acc = 0.0;
            for i in 0..=n {
                let x = i as f64 * h;
                let v = f.evaluate(x).unwrap() * g.evaluate(w - x).unwrap();
                acc += if i == 0 || i == n { 0.5 * v } else { v };
            }
            acc *= h;
            assert!((conv.evaluate(w).unwrap() - acc).abs() < 1e-6);
        }
        // resonant case: e^{-u} * e^{-u} = w e^{-w}
        let e = ExpoPolynomial::term_real(1.0, 0, 1.0);
        let r = e.convolve_finite(&e);
        assert!((r.evaluate(2.0).unwrap() - 2.0 * (-2.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn compose_affine_reflects() {
        let f = ExpoPolynomial::term_real(1.0, 2, 1.5);
        let g = f.compose_affine(-1.0, 4.0); // f(4 - u)
        for u in [0.0f64, 1.0, 3.9] {
            let w = 4.0 - u;
            let want = w * w * (-1.5 * w).exp();
            assert!((g.evaluate(u).unwrap() - want).abs() < 1e-12);
        }
    }
}
