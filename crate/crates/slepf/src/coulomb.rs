//! Coulomb-gas (screening integral) evaluation of pure partition functions
//! with one or two links, for `4 < kappa < 8`.
//!
//! In that range the screening exponent `-4/kappa` exceeds `-1`, so every
//! screening charge can be integrated along a real interval between two
//! adjacent marked points, with the integrand made real by absolute values.
//! For two links the interval integrals are not the pure partition
//! functions themselves: putting the charges on the intervals of the pattern
//! `beta` gives
//!
//! ```text
//! G_beta = Z_beta + Z_beta' / n,    n = -2 cos(4 pi / kappa),
//! ```
//!
//! where `beta'` is the other planar pattern on four points (one loop less in
//! the meander of `beta` with `beta'`). `coulomb_n2` inverts this 2x2 system.
//! It is singular at `kappa = 6` (`n = 1`), where the value is obtained by
//! polynomial interpolation in `kappa` from both sides.

use crate::cft_params::KappaParams;
use crate::error::{Error, Result};
use crate::exact_pf::{check_ordered, z_four, z_pair, Mobius};
use crate::linkpat::LinkPattern;
use crate::quad::endpoint_rule;
use crate::specfun::{gamma_fn, rgamma};
use serde::Serialize;
use std::f64::consts::PI;

/// Half-width of the window around `kappa = 6` handled by interpolation.
pub const KAPPA_SIX_WINDOW: f64 = 0.1;
const KAPPA_SIX_NODES: [f64; 6] = [-0.2, -0.15, -0.1, 0.1, 0.15, 0.2];
const NODE_COUNTS: [usize; 5] = [12, 16, 24, 32, 48];

fn check_range(kappa: f64) -> Result<KappaParams> {
    let p = KappaParams::new(kappa)?;
    if !(kappa > 4.0 && kappa < 8.0) {
        return Err(Error::Unsupported(format!(
            "real screening contours need 4 < kappa < 8, got {kappa}"
        )));
    }
    Ok(p)
}

/// Normalization `Gamma(2 - 8/kappa) / Gamma(1 - 4/kappa)^2` per screening charge.
pub fn screening_normalization(kappa: f64) -> Result<f64> {
    check_range(kappa)?;
    let g = gamma_fn(1.0 - 4.0 / kappa)?;
    Ok(gamma_fn(2.0 - 8.0 / kappa)? / (g * g))
}

/// Loop weight `n = -2 cos(4 pi / kappa)` of the meander pairing.
pub fn loop_weight(kappa: f64) -> f64 {
    -2.0 * (4.0 * PI / kappa).cos()
}

/// One-link screening integral
/// `K (x2 - x1)^(2/kappa) int_{x1}^{x2} (w - x1)^(-4/kappa) (x2 - w)^(-4/kappa) dw`.
pub fn coulomb_n1(kappa: f64, x1: f64, x2: f64) -> Result<f64> {
    check_range(kappa)?;
    check_ordered(&[x1, x2])?;
    let p = 4.0 / kappa;
    let rule = endpoint_rule(x1, x2, p, p, f64::INFINITY, f64::INFINITY, 32)?;
    Ok(screening_normalization(kappa)? * (x2 - x1).powf(2.0 / kappa) * rule.integrate(|_| 1.0))
}

/// Normalized two-charge integral with the charges on `(y1, y2)` and
/// `(y3, y4)`, using `n` Gauss nodes per panel.
fn interval_integral(kappa: f64, y: &[f64], n: usize) -> Result<f64> {
    let p = 4.0 / kappa;
    let gap = y[2] - y[1];
    let r1 = endpoint_rule(y[0], y[1], p, p, f64::INFINITY, gap, n)?;
    let r2 = endpoint_rule(y[2], y[3], p, p, gap, f64::INFINITY, n)?;
    let a1: Vec<f64> = r1
        .nodes
        .iter()
        .zip(&r1.weights)
        .map(|(&w, &wt)| wt * (-p * ((y[2] - w).ln() + (y[3] - w).ln())).exp())
        .collect();
    let a2: Vec<f64> = r2
        .nodes
        .iter()
        .zip(&r2.weights)
        .map(|(&w, &wt)| wt * (-p * ((w - y[0]).ln() + (w - y[1]).ln())).exp())
        .collect();
    let e = 8.0 / kappa;
    let mut sum = 0.0;
    for (w1, c1) in r1.nodes.iter().zip(&a1) {
        let inner: f64 = r2.nodes.iter().zip(&a2).map(|(w2, c2)| c2 * (w2 - w1).powf(e)).sum();
        sum += c1 * inner;
    }
    let mut log_pre = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            log_pre += (y[j] - y[i]).ln();
        }
    }
    let k = screening_normalization(kappa)?;
    Ok(k * k * (2.0 / kappa * log_pre).exp() * sum)
}

/// Interval integral refined until two successive node counts agree to
/// `rel_tol`; returns the value and the last difference.
fn converged_integral(kappa: f64, y: &[f64], rel_tol: f64) -> Result<(f64, f64)> {
    let mut prev = interval_integral(kappa, y, NODE_COUNTS[0])?;
    for &n in &NODE_COUNTS[1..] {
        let cur = interval_integral(kappa, y, n)?;
        let err = (cur - prev).abs();
        if err <= rel_tol * cur.abs() {
            return Ok((cur, err));
        }
        prev = cur;
    }
    Err(Error::Tolerance(format!(
        "screening integral at kappa = {kappa} did not converge to {rel_tol:e}"
    )))
}

/// The interval integrals `(G_{{1,2},{3,4}}, G_{{1,4},{2,3}})` at `pts`,
/// with error estimates. The second is the first evaluated at the cyclically
/// rotated configuration, transported back by Mobius covariance.
pub fn interval_integrals(kappa: f64, pts: &[f64], rel_tol: f64) -> Result<([f64; 2], [f64; 2])> {
    let h = check_range(kappa)?.h;
    check_ordered(pts)?;
    let (g12, e12) = converged_integral(kappa, pts, rel_tol)?;
    // x -> -1/(x - pole) with the pole between x1 and x2 sends
    // (x2, x3, x4, x1) to an increasing quadruple.
    let pole = 0.5 * (pts[0] + pts[1]);
    let f = Mobius::new(0.0, -1.0, 1.0, -pole)?;
    let y = [f.apply(pts[1]), f.apply(pts[2]), f.apply(pts[3]), f.apply(pts[0])];
    check_ordered(&y)?;
    let jac: f64 = pts.iter().map(|&x| f.deriv(x).powf(h)).product();
    let (g, e) = converged_integral(kappa, &y, rel_tol)?;
    Ok(([g12, jac * g], [e12, jac * e]))
}

// Both pure partition functions by inverting the loop-weight system.
fn invert_direct(kappa: f64, pts: &[f64], rel_tol: f64) -> Result<([f64; 2], f64)> {
    let ([g12, g14], [e12, e14]) = interval_integrals(kappa, pts, rel_tol)?;
    let c = 1.0 / loop_weight(kappa);
    let det = 1.0 - c * c;
    let z12 = (g12 - c * g14) / det;
    let z14 = (g14 - c * g12) / det;
    Ok(([z12, z14], (e12 + c.abs() * e14) / det.abs()))
}

fn lagrange_at(nodes: &[f64], values: &[f64], x: f64) -> f64 {
    let mut s = 0.0;
    for (i, (&xi, &vi)) in nodes.iter().zip(values).enumerate() {
        let mut w = 1.0;
        for (j, &xj) in nodes.iter().enumerate() {
            if i != j {
                w *= (x - xj) / (xi - xj);
            }
        }
        s += w * vi;
    }
    s
}

/// Result of a two-link screening evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScreeningIntegral {
    pub kappa: f64,
    pub alpha: LinkPattern,
    pub pts: Vec<f64>,
    pub tol: f64,
    pub value: f64,
    /// Propagated quadrature error estimate.
    pub error: f64,
    /// Whether the value was interpolated across `kappa = 6`.
    pub interpolated: bool,
}

/// Two-link pure partition function from screening integrals, with the
/// quadrature driven to relative accuracy `tol`.
pub fn coulomb_n2_detailed(kappa: f64, alpha: &LinkPattern, pts: &[f64], tol: f64) -> Result<ScreeningIntegral> {
    check_range(kappa)?;
    check_ordered(pts)?;
    if pts.len() != 4 {
        return Err(Error::Domain(format!("two links need 4 points, got {}", pts.len())));
    }
    let slot = match alpha.links() {
        [(1, 2), (3, 4)] => 0,
        [(1, 4), (2, 3)] => 1,
        _ => return Err(Error::Domain(format!("'{alpha}' is not a four-point pattern"))),
    };
    // Quadrature noise is amplified by the inversion (by at most ~10 outside
    // the kappa = 6 window and by the interpolation weights inside it).
    let rel_tol = 1e-3 * tol;
    let (value, error, interpolated) = if (kappa - 6.0).abs() < KAPPA_SIX_WINDOW {
        let nodes: Vec<f64> = KAPPA_SIX_NODES.iter().map(|d| 6.0 + d).collect();
        let mut vals = Vec::with_capacity(nodes.len());
        let mut err: f64 = 0.0;
        for &k in &nodes {
            let (z, e) = invert_direct(k, pts, rel_tol)?;
            vals.push(z[slot]);
            err = err.max(e);
        }
        (lagrange_at(&nodes, &vals, kappa), 10.0 * err, true)
    } else {
        let (z, e) = invert_direct(kappa, pts, rel_tol)?;
        (z[slot], e, false)
    };
    Ok(ScreeningIntegral { kappa, alpha: alpha.clone(), pts: pts.to_vec(), tol, value, error, interpolated })
}

/// Two-link pure partition function from screening integrals.
pub fn coulomb_n2(kappa: f64, alpha: &LinkPattern, pts: &[f64], tol: f64) -> Result<f64> {
    Ok(coulomb_n2_detailed(kappa, alpha, pts, tol)?.value)
}

/// Outcome of comparing the screening evaluators with the closed forms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoulombReport {
    pub kappas: Vec<f64>,
    pub n1_max_relative_error: f64,
    pub n2_max_relative_error: f64,
    pub n1_cases: usize,
    pub n2_cases: usize,
    pub pass: bool,
}

/// Configurations used by [`oracle_suite`]: a deterministic spread of
/// cross-ratios and scales.
pub fn oracle_configurations() -> Vec<[f64; 4]> {
    let mut out = Vec::new();
    for (i, g) in [0.15, 0.4, 1.0, 2.5, 6.0].iter().enumerate() {
        for (j, s) in [0.5, 1.0, 1.7, 3.0].iter().enumerate() {
            let x1 = -0.3 * i as f64 + 0.2 * j as f64;
            let x2 = x1 + s;
            let x3 = x2 + g * s;
            let x4 = x3 + s * (1.0 + 0.6 * j as f64);
            out.push([x1, x2, x3, x4]);
        }
    }
    out
}

/// Compare `coulomb_n1` with `z_pair` and `coulomb_n2` with `z_four` for both
/// patterns on [`oracle_configurations`], for each `kappa`.
pub fn oracle_suite(kappas: &[f64], tol_n1: f64, tol_n2: f64) -> Result<CoulombReport> {
    let pats: [LinkPattern; 2] = ["1-2,3-4".parse()?, "1-4,2-3".parse()?];
    let configs = oracle_configurations();
    let (mut e1, mut e2, mut c1, mut c2) = (0.0f64, 0.0f64, 0, 0);
    for &k in kappas {
        for x in &configs {
            let want = z_pair(k, x[0], x[1])?;
            e1 = e1.max((coulomb_n1(k, x[0], x[1])? - want).abs() / want);
            c1 += 1;
            for a in &pats {
                let want = z_four(k, a, x)?;
                e2 = e2.max((coulomb_n2(k, a, x, tol_n2)? - want).abs() / want);
                c2 += 1;
            }
        }
    }
    Ok(CoulombReport {
        kappas: kappas.to_vec(),
        n1_max_relative_error: e1,
        n2_max_relative_error: e2,
        n1_cases: c1,
        n2_cases: c2,
        pass: e1 < tol_n1 && e2 < tol_n2,
    })
}

/// One-link value from the Beta-function identity
/// `B(a, a) = Gamma(a)^2 / Gamma(2a)` with `a = 1 - 4/kappa`.
pub fn n1_closed_form(kappa: f64, x1: f64, x2: f64) -> Result<f64> {
    check_range(kappa)?;
    let a = 1.0 - 4.0 / kappa;
    let beta = gamma_fn(a)? * gamma_fn(a)? * rgamma(2.0 * a);
    Ok(screening_normalization(kappa)? * beta * (x2 - x1).powf(2.0 / kappa + 2.0 * a - 1.0))
}
