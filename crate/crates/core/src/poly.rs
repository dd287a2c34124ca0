//! Dense complex polynomials and root extraction.
//!
//! Coefficients are stored in ascending degree order. Roots come from the
//! eigenvalues of the companion matrix, polished with Newton steps and then
//! clustered into multiple roots.

use crate::error::{CoreError, Result};
use crate::C64;
use nalgebra::DMatrix;

/// Relative threshold below which trailing coefficients are treated as zero.
const TRIM_EPS: f64 = 1e-13;
/// Relative clustering radius for multiple-root detection.
pub const ROOT_CLUSTER_EPS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    /// coeffs[k] multiplies s^k
    pub coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![C64::new(1.0, 0.0)] }
    }

    pub fn constant(c: C64) -> Self {
        Poly::new(vec![c])
    }

    /// (s + a)
    pub fn linear(a: C64) -> Self {
        Poly { coeffs: vec![a, C64::new(1.0, 0.0)] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn trim(&mut self) {
        let scale = self.max_coeff();
        if scale == 0.0 {
            self.coeffs.clear();
            return;
        }
        while let Some(last) = self.coeffs.last() {
            if last.norm() <= TRIM_EPS * scale && self.coeffs.len() > 1 {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        if self.coeffs.len() == 1 && self.coeffs[0].norm() <= TRIM_EPS * scale.max(1.0) * 1e-2 {
            // a lone near-zero constant is zero
            if self.coeffs[0].norm() == 0.0 {
                self.coeffs.clear();
            }
        }
    }

    pub fn eval(&self, s: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * s + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * C64::new(k as f64, 0.0))
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[k] += c;
        }
        for (k, &c) in other.coeffs.iter().enumerate() {
            out[k] += c;
        }
        Poly::new(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, k: C64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Synthetic division by (s - root). Returns the quotient, discarding the
    /// remainder (callers divide at known roots).
    pub fn deflate(&self, root: C64) -> Poly {
        let n = self.coeffs.len();
        if n <= 1 {
            return Poly::zero();
        }
        let mut q = vec![C64::new(0.0, 0.0); n - 1];
        let mut acc = self.coeffs[n - 1];
        for k in (1..n).rev() {
            q[k - 1] = acc;
            acc = self.coeffs[k - 1] + acc * root;
        }
        Poly::new(q)
    }

    /// Taylor coefficients of the polynomial around `s0`, up to order `k`
    /// inclusive (repeated synthetic division).
    pub fn taylor_at(&self, s0: C64, k: usize) -> Vec<C64> {
        let mut cur = self.clone();
        let mut out = Vec::with_capacity(k + 1);
        for _ in 0..=k {
            out.push(cur.eval(s0));
            cur = cur.deflate(s0);
            if cur.is_zero() {
                while out.len() <= k {
                    out.push(C64::new(0.0, 0.0));
                }
                break;
            }
        }
        while out.len() <= k {
            out.push(C64::new(0.0, 0.0));
        }
        out
    }

    /// All roots with multiplicities. Companion-matrix eigenvalues, Newton
    /// polishing, then clustering at relative radius [`ROOT_CLUSTER_EPS`].
    pub fn roots(&self) -> Result<Vec<(C64, usize)>> {
        let deg = self.degree();
        if self.is_zero() {
            return Err(CoreError::RootFinding("zero polynomial".into()));
        }
        if deg == 0 {
            return Ok(vec![]);
        }
        let lead = self.coeffs[deg];
        let monic: Vec<C64> = self.coeffs.iter().map(|&c| c / lead).collect();

        let mut raw = if deg == 1 {
            vec![-monic[0]]
        } else if deg == 2 {
            // quadratic formula keeps tests exact on tiny cases
            let b = monic[1];
            let c = monic[0];
            let disc = (b * b - C64::new(4.0, 0.0) * c).sqrt();
            vec![(-b + disc) / C64::new(2.0, 0.0), (-b - disc) / C64::new(2.0, 0.0)]
        } else {
            companion_eigenvalues(&monic, deg)?
        };

        // Polish with Newton applied to p/p', which converges quadratically
        // to multiple roots as well.
        let dp = self.derivative();
        let ddp = dp.derivative();
        for r in raw.iter_mut() {
            let mut z = *r;
            for _ in 0..40 {
                let f = self.eval(z);
                let d = dp.eval(z);
                let dd = ddp.eval(z);
                let denom = d * d - f * dd;
                let step = if denom.norm() > 1e-300 {
                    f * d / denom
                } else if d.norm() > 1e-300 {
                    f / d
                } else {
                    break;
                };
                z -= step;
                if step.norm() <= 1e-15 * (1.0 + z.norm()) {
                    break;
                }
            }
            if self.eval(z).norm() <= self.eval(*r).norm() {
                *r = z;
            }
        }

        Ok(self.cluster_roots(&raw))
    }

    /// max |p(root)| over the supplied roots, a residual diagnostic.
    pub fn residual(&self, roots: &[(C64, usize)]) -> f64 {
        roots.iter().map(|&(r, _)| self.eval(r).norm()).fold(0.0, f64::max)
    }
}

fn companion_eigenvalues(monic: &[C64], deg: usize) -> Result<Vec<C64>> {
    // Real-coefficient polynomials get a real companion matrix and the real
    // Schur path, which is what the model always produces. The iteration
    // count must be bounded: the QR sweep can cycle on companion matrices
    // with tightly clustered eigenvalues, in which case the simultaneous
    // Durand-Kerner iteration takes over.
    let all_real = monic.iter().all(|c| c.im.abs() <= 1e-14 * (1.0 + c.re.abs()));
    if all_real {
        let mut m = DMatrix::<f64>::zeros(deg, deg);
        for i in 1..deg {
            m[(i, i - 1)] = 1.0;
        }
        for i in 0..deg {
            m[(i, deg - 1)] = -monic[i].re;
        }
        if let Some(schur) = nalgebra::linalg::Schur::try_new(m, 1e-14, 200 * deg) {
            let eig = schur.complex_eigenvalues();
            return Ok(eig.iter().map(|e| C64::new(e.re, e.im)).collect());
        }
    }
    durand_kerner(monic, deg)
}

fn durand_kerner(monic: &[C64], deg: usize) -> Result<Vec<C64>> {
    let eval = |z: C64| -> C64 {
        let mut acc = C64::new(1.0, 0.0);
        for k in (0..deg).rev() {
            acc = acc * z + monic[k];
        }
        acc
    };
    let radius = 1.0
        + monic
            .iter()
            .take(deg)
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let mut zs: Vec<C64> = (0..deg)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64;
            C64::new(radius * 0.7 * ang.cos(), radius * 0.7 * ang.sin())
        })
        .collect();
    for _ in 0..200 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let mut denom = C64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    denom *= zs[i] - zs[j];
                }
            }
            if denom.norm() == 0.0 {
                continue;
            }
            let step = eval(zs[i]) / denom;
            zs[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-14 * radius {
            break;
        }
    }
    Ok(zs)
}

impl Poly {
    /// Agglomerative clustering of polished eigenvalues into multiple roots.
    ///
    /// Two clusters merge only when their combined center passes a
    /// backward-error test: p, p', ..., p^(m-1) all vanish at the center
    /// within floating-point noise of their own evaluation magnitudes.
    /// Eigenvalues of an m-fold root scatter like eps^(1/m), so a fixed
    /// radius cannot decide multiplicity; the derivative test can.
    fn cluster_roots(&self, raw: &[C64]) -> Vec<(C64, usize)> {
        let scale = 1.0 + raw.iter().map(|r| r.norm()).fold(0.0, f64::max);
        let mut sorted: Vec<C64> = raw.to_vec();
        sorted.sort_by(|a, b| {
            (a.re, a.im)
                .partial_cmp(&(b.re, b.im))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut clusters: Vec<(C64, usize)> = sorted.iter().map(|&r| (r, 1usize)).collect();

        let mut derivs: Vec<Poly> = vec![self.clone()];
        loop {
            let mut merged = false;
            'search: for i in 0..clusters.len() {
                for j in (i + 1)..clusters.len() {
                    let (ci, mi) = clusters[i];
                    let (cj, mj) = clusters[j];
                    let m = mi + mj;
                    // candidates must at least be near each other
                    if (ci - cj).norm() > ROOT_CLUSTER_EPS.max(1e-2) * scale {
                        continue;
                    }
                    while derivs.len() < m {
                        let next = derivs.last().unwrap().derivative();
                        derivs.push(next);
                    }
                    if let Some(z) = multiple_root_test(&derivs, ci, mi, cj, mj) {
                        clusters[i] = (z, m);
                        clusters.remove(j);
                        merged = true;
                        break 'search;
                    }
                }
            }
            if !merged {
                // also snap plain near-duplicates from the eigensolver
                let tol = ROOT_CLUSTER_EPS * scale;
                let mut i = 0;
                let mut snapped = false;
                'dup: while i < clusters.len() {
                    for j in (i + 1)..clusters.len() {
                        if (clusters[i].0 - clusters[j].0).norm() <= tol {
                            let (ci, mi) = clusters[i];
                            let (cj, mj) = clusters[j];
                            let m = mi + mj;
                            clusters[i] = (
                                (ci * C64::new(mi as f64, 0.0) + cj * C64::new(mj as f64, 0.0))
                                    / C64::new(m as f64, 0.0),
                                m,
                            );
                            clusters.remove(j);
                            snapped = true;
                            continue 'dup;
                        }
                    }
                    i += 1;
                }
                if !snapped {
                    break;
                }
            }
        }
        clusters
    }
}

/// Refine the combined center on p^(m-1) (where an m-fold root is simple)
/// and accept the merge only when (a) the refined root stays within the
/// m-fold eigenvalue-scatter radius of BOTH constituent clusters, so a
/// nearby unrelated root cannot be swallowed, and (b) every derivative below
/// order m vanishes there within evaluation noise.
fn multiple_root_test(derivs: &[Poly], ci: C64, mi: usize, cj: C64, mj: usize) -> Option<C64> {
    let m = mi + mj;
    let center =
        (ci * C64::new(mi as f64, 0.0) + cj * C64::new(mj as f64, 0.0)) / C64::new(m as f64, 0.0);
    let g = &derivs[m - 1];
    let gp = g.derivative();
    let mut z = center;
    for _ in 0..30 {
        let f = g.eval(z);
        let d = gp.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let step = f / d;
        z -= step;
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    // the refined root must stay in the pair's own neighborhood, otherwise
    // Newton has wandered to some unrelated multiple root
    if (z - center).norm() > 3.0 * (ci - cj).norm() + 1e-6 * (1.0 + z.norm()) {
        return None;
    }
    // true m-fold roots leave residuals at evaluation-noise level (~1e-14
    // relative); pairs separated by more than ~1e-4 do not
    for dj in derivs.iter().take(m) {
        let bound: f64 = dj
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.norm() * z.norm().max(1.0).powi(i as i32))
            .sum();
        if dj.eval(z).norm() > 1e-10 * bound + 1e-280 {
            return None;
        }
    }
    Some(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn eval_and_derivative() {
        let p = Poly::from_real(&[1.0, -2.0, 3.0]); // 1 - 2s + 3s^2
        assert_eq!(p.eval(c(2.0)), c(9.0));
        assert_eq!(p.derivative().coeffs, vec![c(-2.0), c(6.0)]);
    }

    #[test]
    fn deflation_recovers_quotient() {
        // (s-1)(s-2)(s-3) = -6 + 11s - 6s^2 + s^3
        let p = Poly::from_real(&[-6.0, 11.0, -6.0, 1.0]);
        let q = p.deflate(c(1.0));
        assert_eq!(q.degree(), 2);
        assert!((q.eval(c(2.0))).norm() < 1e-12);
        assert!((q.eval(c(3.0))).norm() < 1e-12);
    }

    #[test]
    fn roots_of_cubic() {
        let p = Poly::from_real(&[-6.0, 11.0, -6.0, 1.0]);
        let mut roots = p.roots().unwrap();
        roots.sort_by(|a, b| a.0.re.partial_cmp(&b.0.re).unwrap());
        let vals: Vec<f64> = roots.iter().map(|r| r.0.re).collect();
        for (got, want) in vals.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn multiple_root_clustering() {
        // (s+2)^3 (s-1)
        let p = Poly::linear(c(2.0)).pow(3).mul(&Poly::linear(c(-1.0)));
        let roots = p.roots().unwrap();
        let triple = roots.iter().find(|(r, _)| (r.re + 2.0).abs() < 1e-3).unwrap();
        assert_eq!(triple.1, 3);
    }

    #[test]
    fn taylor_expansion() {
        // p(s) = (s-2)^2 + 5(s-2) + 7 expanded at 2
        let p = Poly::linear(c(-2.0))
            .pow(2)
            .add(&Poly::linear(c(-2.0)).scale(c(5.0)))
            .add(&Poly::constant(c(7.0)));
        let t = p.taylor_at(c(2.0), 2);
        assert!((t[0] - c(7.0)).norm() < 1e-12);
        assert!((t[1] - c(5.0)).norm() < 1e-12);
        assert!((t[2] - c(1.0)).norm() < 1e-12);
    }
}
