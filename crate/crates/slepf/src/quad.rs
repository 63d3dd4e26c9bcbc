//! Gauss-Legendre quadrature and composite rules for integrands with
//! algebraic endpoint singularities `(u - a)^-pa (b - u)^-pb`.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// A discrete rule `sum_k w_k f(x_k)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push_panel(&mut self, gl: &(Vec<f64>, Vec<f64>), lo: f64, hi: f64, weight: impl Fn(f64) -> f64) {
        let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for (t, w) in gl.0.iter().zip(&gl.1) {
            let x = c + r * t;
            self.nodes.push(x);
            self.weights.push(r * w * weight(x));
        }
    }

    // Panel [a, a + len] carrying the singular factor (x - a)^-p, mapped by
    // x = a + len s^q with q = m/(1 - p) for the smallest integer m that makes
    // q >= 6. The transformed weight is the polynomial s^(m-1) and the rest of
    // the integrand becomes a smooth enough function of s. `other` multiplies
    // the remaining weight.
    fn push_singular_panel(&mut self, gl: &(Vec<f64>, Vec<f64>), a: f64, len: f64, p: f64, other: impl Fn(f64) -> f64) {
        let m = (6.0 * (1.0 - p)).ceil().max(1.0);
        let q = m / (1.0 - p);
        let scale = len.abs().powf(1.0 - p) * q;
        for (t, w) in gl.0.iter().zip(&gl.1) {
            let s = 0.5 * (t + 1.0);
            let x = a + len * s.powf(q);
            self.nodes.push(x);
            self.weights.push(0.5 * w * scale * s.powf(m - 1.0) * other(x));
        }
    }
}

/// Composite rule for `int_a^b (x - a)^-pa (b - x)^-pb f(x) dx` with `f`
/// smooth on `[a, b]` apart from singularities outside the interval at
/// distance `near_a` beyond `a` and `near_b` beyond `b`.
///
/// Each half of the interval is covered by panels that double in length
/// away from its endpoint, starting at half the distance to the nearest
/// outside singularity; the panel touching the endpoint absorbs the
/// algebraic weight through a power substitution. `n` is the number of
/// Gauss-Legendre nodes per panel.
pub fn endpoint_rule(a: f64, b: f64, pa: f64, pb: f64, near_a: f64, near_b: f64, n: usize) -> Result<Rule> {
    if !(a < b) || !(pa < 1.0) || !(pb < 1.0) {
        return Err(Error::Domain(format!("endpoint rule needs a < b and exponents below 1 (a={a}, b={b}, pa={pa}, pb={pb})")));
    }
    let gl = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mut rule = Rule::default();
    for (end, dir, p, p_other, near) in [(a, 1.0, pa, pb, near_a), (b, -1.0, pb, pa, near_b)] {
        let far = end + dir * 2.0 * half;
        let other = |x: f64| (dir * (far - x)).powf(-p_other);
        let first = (0.5 * near).min(half);
        rule.push_singular_panel(&gl, end, dir * first, p, other);
        let mut lo = first;
        while lo < half {
            let hi = (2.0 * lo).min(half);
            let (x0, x1) = (end + dir * lo, end + dir * hi);
            let (l, h) = if dir > 0.0 { (x0, x1) } else { (x1, x0) };
            rule.push_panel(&gl, l, h, |x| (dir * (x - end)).powf(-p) * other(x));
            lo = hi;
        }
    }
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::beta_fn;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        for n in [1, 2, 5, 8, 17] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for deg in 0..2 * n {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn beta_integrals() {
        for (pa, pb) in [(0.5, 0.5), (0.8, 0.3), (-0.4, 0.9), (0.0, 0.0)] {
            let r = endpoint_rule(2.0, 5.0, pa, pb, f64::INFINITY, f64::INFINITY, 24).unwrap();
            let want = 3f64.powf(1.0 - pa - pb) * beta_fn(1.0 - pa, 1.0 - pb).unwrap();
            assert!((r.integrate(|_| 1.0) - want).abs() < 1e-12 * want, "{pa} {pb}");
        }
    }

    #[test]
    fn nearby_outside_singularity() {
        // int_0^1 x^-1/2 (x + d)^-1 dx = 2 atan(1/sqrt d)/sqrt d.
        let d = 1e-6;
        let r = endpoint_rule(0.0, 1.0, 0.5, 0.0, d, f64::INFINITY, 20).unwrap();
        let want = 2.0 * (1.0 / d.sqrt()).atan() / d.sqrt();
        assert!((r.integrate(|x| 1.0 / (x + d)) - want).abs() < 1e-11 * want);
    }
}
