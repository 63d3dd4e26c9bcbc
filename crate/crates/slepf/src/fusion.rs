//! Fusion of two boundary points: q-combinatorics, structure constants of
//! the recursive asymptotics, the fused four-point function and numerical
//! checks of the higher-order PDEs it solves.

use crate::cft_params::KappaParams;
use crate::error::{Error, Result};
use crate::exact_pf::{c_kappa, check_ordered, z_four, z_pair};
use crate::linkpat::LinkPattern;
use crate::pde_verify::{extrapolate_constant, richardson3, Evaluator};
use crate::specfun::{gamma_fn, rgamma};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

const RESONANCE_EPS: f64 = 1e-9;

/// `[m]_q = (q^m - q^-m)/(q - q^-1)` with `q = exp(4 pi i / kappa)`.
///
/// Evaluated as the Chebyshev polynomial `U_{m-1}(cos(4 pi / kappa))`, which
/// equals the sine ratio away from `sin(4 pi / kappa) = 0` and is its
/// continuous extension there.
pub fn q_integer(m: u32, kappa: f64) -> Result<f64> {
    KappaParams::new(kappa)?;
    let x = (4.0 * PI / kappa).cos();
    let (mut prev, mut cur) = (0.0, 1.0); // U_{-1}, U_0
    if m == 0 {
        return Ok(0.0);
    }
    for _ in 1..m {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `[m]_q! = [1]_q [2]_q ... [m]_q`, with `[0]_q! = 1`.
pub fn q_factorial(m: u32, kappa: f64) -> Result<f64> {
    (1..=m).try_fold(1.0, |acc, k| Ok(acc * q_integer(k, kappa)?))
}

fn fusion_depth(s1: u32, s2: u32, s: u32) -> Result<u32> {
    if s1 == 0 || s2 == 0 || s == 0 {
        return Err(Error::Domain("valences must be positive".into()));
    }
    let total = i64::from(s1) + i64::from(s2) - i64::from(s) - 1;
    if total < 0 || total % 2 != 0 {
        return Err(Error::Domain(format!("s1 + s2 - s - 1 = {total} must be even and non-negative")));
    }
    let m = (total / 2) as u32;
    if m >= s1.min(s2) {
        return Err(Error::Domain(format!("m = {m} exceeds min(s1, s2) - 1")));
    }
    Ok(m)
}

fn checked_gamma(x: f64) -> Result<f64> {
    if x <= 0.0 && (x - x.round()).abs() < RESONANCE_EPS {
        return Err(Error::Resonance(format!("Gamma pole at {x}")));
    }
    gamma_fn(x)
}

/// The Gamma-product constant `B^{s1,s2}_s` of the recursive asymptotics.
pub fn b_const(s1: u32, s2: u32, s: u32, kappa: f64) -> Result<f64> {
    KappaParams::new(kappa)?;
    let m = fusion_depth(s1, s2, s)?;
    let r = 4.0 / kappa;
    let mut prod = 1.0;
    for u in 1..=m {
        let (u, a, b, mm) = (f64::from(u), f64::from(s1), f64::from(s2), f64::from(m));
        let den_arg = 2.0 - r * (a + b - mm - u);
        if den_arg <= 0.0 && (den_arg - den_arg.round()).abs() < RESONANCE_EPS {
            return Err(Error::Resonance(format!("B constant vanishes at kappa = {kappa}")));
        }
        prod *= checked_gamma(1.0 - r * (a - u))? * checked_gamma(1.0 - r * (b - u))? * checked_gamma(1.0 + r * u)?
            * rgamma(1.0 + r)
            * rgamma(den_arg);
        prod /= u;
    }
    Ok(prod)
}

/// The q-factorial constant `nu^s_{s1,s2}` of the recursive asymptotics.
///
/// Common q-factorial factors of numerator and denominator are cancelled
/// before evaluation, so only genuine zeros of the remaining denominator
/// are reported as resonances.
pub fn nu_const(s1: u32, s2: u32, s: u32, kappa: f64) -> Result<f64> {
    let m = fusion_depth(s1, s2, s)?;
    let range_prod = |lo: u32, hi: u32| (lo..=hi).try_fold(1.0, |acc, k| Ok::<f64, Error>(acc * q_integer(k, kappa)?));
    // [s1-1]!/[s1-1-m]!, [s2-1]!/[s2-1-m]! and [s1+s2-m-1]!/[s1+s2-2m-1]!.
    let num = q_integer(2, kappa)?.powi(m as i32) * range_prod(s1 - m, s1 - 1)? * range_prod(s2 - m, s2 - 1)?;
    let den = range_prod(s1 + s2 - 2 * m, s1 + s2 - m - 1)?;
    if den.abs() < RESONANCE_EPS {
        return Err(Error::Resonance(format!("q-factorial vanishes at kappa = {kappa}")));
    }
    Ok(num / den)
}

/// Structure constants of one fusion channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FusionConstants {
    pub kappa: f64,
    #[serde(skip)]
    pub q: Complex64,
    pub s1: u32,
    pub s2: u32,
    pub s: u32,
    pub b: f64,
    pub nu: f64,
}

impl FusionConstants {
    pub fn new(s1: u32, s2: u32, s: u32, kappa: f64) -> Result<Self> {
        Ok(Self {
            kappa,
            q: Complex64::from_polar(1.0, 4.0 * PI / kappa),
            s1,
            s2,
            s,
            b: b_const(s1, s2, s, kappa)?,
            nu: nu_const(s1, s2, s, kappa)?,
        })
    }

    /// Prefactor `nu B / (B^{2,2}_1)^m` multiplying the fused function.
    pub fn prefactor(&self) -> Result<f64> {
        let m = fusion_depth(self.s1, self.s2, self.s)?;
        Ok(self.nu * self.b / b_const(2, 2, 1, self.kappa)?.powi(m as i32))
    }
}

/// Limit of `Z_{{1,4},{2,3}}(x1, x2, x3, x4) / (x2 - x1)^(2/kappa)` as
/// `x1, x2 -> xi`: `C(kappa) (x4 - xi)^-h13 (x3 - xi)^-h13 (x4 - x3)^(2/kappa)`.
pub fn fused_z4(kappa: f64, xi: f64, x3: f64, x4: f64) -> Result<f64> {
    let p = KappaParams::new(kappa)?;
    check_ordered(&[xi, x3, x4])?;
    let h13 = p.h13();
    Ok(c_kappa(kappa)? * (x4 - xi).powf(-h13) * (x3 - xi).powf(-h13) * (x4 - x3).powf(2.0 / kappa))
}

/// Residual of one fused PDE relative to its largest term.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FusedResidual {
    /// `"xi"` for the third-order equation, otherwise the variable index.
    pub variable: String,
    pub order: u32,
    pub absolute: f64,
    pub scale: f64,
    pub relative: f64,
}

fn shift(pts: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut v = pts.to_vec();
    for &(i, d) in moves {
        v[i] += d;
    }
    v
}

// Terms of the PDEs of a function of (xi, x_3, ..., x_n) with weights
// (h13, h, ..., h). `eq = 0` is the third-order equation in xi.
fn fused_terms(f: Evaluator, kappa: f64, eq: usize, pts: &[f64], s: f64) -> Result<Vec<f64>> {
    let p = KappaParams::new(kappa)?;
    let (h, h13) = (p.h, p.h13());
    let f0 = f(pts)?;
    let d1 = |i: usize| -> Result<f64> { Ok((f(&shift(pts, &[(i, s)]))? - f(&shift(pts, &[(i, -s)]))?) / (2.0 * s)) };
    let mut terms = Vec::new();
    if eq == 0 {
        let third = (f(&shift(pts, &[(0, 2.0 * s)]))? - 2.0 * f(&shift(pts, &[(0, s)]))? + 2.0 * f(&shift(pts, &[(0, -s)]))?
            - f(&shift(pts, &[(0, -2.0 * s)]))?)
            / (2.0 * s * s * s);
        terms.push(third);
        let dxi = d1(0)?;
        let c2 = -16.0 / kappa;
        let c3 = 8.0 * (8.0 - kappa) / (kappa * kappa);
        for i in 1..pts.len() {
            let d = pts[i] - pts[0];
            let mixed = (f(&shift(pts, &[(i, s), (0, s)]))? - f(&shift(pts, &[(i, s), (0, -s)]))?
                - f(&shift(pts, &[(i, -s), (0, s)]))?
                + f(&shift(pts, &[(i, -s), (0, -s)]))?)
                / (4.0 * s * s);
            terms.push(c2 * h / (d * d) * dxi);
            terms.push(-c2 / d * mixed);
            terms.push(c3 * 2.0 * h / (d * d * d) * f0);
            terms.push(-c3 / (d * d) * d1(i)?);
        }
    } else {
        let j = eq;
        let second = (f(&shift(pts, &[(j, s)]))? - 2.0 * f0 + f(&shift(pts, &[(j, -s)]))?) / (s * s);
        terms.push(second);
        let c = -4.0 / kappa;
        for i in 0..pts.len() {
            if i == j {
                continue;
            }
            let d = pts[i] - pts[j];
            let w = if i == 0 { h13 } else { h };
            terms.push(c * w / (d * d) * f0);
            terms.push(-c / d * d1(i)?);
        }
    }
    Ok(terms)
}

/// Residuals of the fused PDE system for `f(xi, x_3, ..., x_n)`: the
/// third-order equation in `xi` and the second-order equations in the other
/// variables, Richardson-extrapolated from steps `step`, `step/2`, `step/4`.
pub fn fused_residuals(f: Evaluator, kappa: f64, pts: &[f64], step: f64) -> Result<Vec<FusedResidual>> {
    check_ordered(pts)?;
    let gap = pts.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if gap < 10.0 * 2.0 * step {
        return Err(Error::Refinement(format!("step {step} too large for separation {gap}")));
    }
    (0..pts.len())
        .map(|eq| {
            let t1 = fused_terms(f, kappa, eq, pts, step)?;
            let t2 = fused_terms(f, kappa, eq, pts, step / 2.0)?;
            let t4 = fused_terms(f, kappa, eq, pts, step / 4.0)?;
            let ext: Vec<f64> = (0..t1.len()).map(|k| richardson3(t1[k], t2[k], t4[k])).collect();
            let absolute: f64 = ext.iter().sum();
            let scale = ext.iter().fold(0.0f64, |m, t| m.max(t.abs()));
            Ok(FusedResidual {
                variable: if eq == 0 { "xi".into() } else { format!("x{}", eq + 2) },
                order: if eq == 0 { 3 } else { 2 },
                absolute,
                scale,
                relative: absolute.abs() / scale,
            })
        })
        .collect()
}

/// Fused PDE residuals of [`fused_z4`].
pub fn fused_pde_residual(kappa: f64, xi: f64, x3: f64, x4: f64, step: f64) -> Result<Vec<FusedResidual>> {
    let f = move |x: &[f64]| fused_z4(kappa, x[0], x[1], x[2]);
    fused_residuals(&f, kappa, &[xi, x3, x4], step)
}

/// Numerically extrapolated fusion limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FusionLimit {
    pub value: f64,
    /// Extrapolation with the largest separation dropped.
    pub refined: f64,
}

/// Separations used by [`numeric_fusion_limit`] by default.
pub fn default_separations(scale: f64) -> Vec<f64> {
    (0..6).map(|k| 1e-2 * scale * 0.5f64.powi(k)).collect()
}

/// Extrapolate `Z_{{1,4},{2,3}}(xi - d/2, xi + d/2, x3, x4) / d^(2/kappa)` to
/// `d = 0`. The corrections are integer powers of `d`.
pub fn numeric_fusion_limit(kappa: f64, xi: f64, x3: f64, x4: f64, deltas: &[f64]) -> Result<FusionLimit> {
    let alpha: LinkPattern = LinkPattern::new(vec![(1, 4), (2, 3)])?;
    let exps = [0.0, 1.0, 2.0, 3.0];
    if deltas.len() < exps.len() + 1 {
        return Err(Error::Domain(format!("need at least {} separations", exps.len() + 1)));
    }
    let ratios = deltas
        .iter()
        .map(|&d| Ok(z_four(kappa, &alpha, &[xi - 0.5 * d, xi + 0.5 * d, x3, x4])? * d.powf(-2.0 / kappa)))
        .collect::<Result<Vec<f64>>>()?;
    let n = exps.len();
    let k = deltas.len();
    Ok(FusionLimit {
        value: extrapolate_constant(&deltas[k - n..], &ratios[k - n..], &exps)?,
        refined: extrapolate_constant(&deltas[k - n - 1..k - 1], &ratios[k - n - 1..k - 1], &exps)?,
    })
}

/// Leading and subleading behaviour of `Z_{{1,2},{3,4}}` as `x1, x2` merge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpeReport {
    pub leading_exponent: f64,
    pub expected_leading_exponent: f64,
    pub leading_coefficient: f64,
    pub expected_leading_coefficient: f64,
    pub subleading_exponent: f64,
    pub expected_subleading_exponent: f64,
    pub pass: bool,
}

fn loglog_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Recover the two channel exponents `-2h` and `2/kappa` of the
/// `x2 - x1 = d -> 0` expansion of `Z_{{1,2},{3,4}}` by log-log regression.
///
/// The leading fit uses `d` in `[1e-8, 1e-6]` (times the `x4 - x3` scale),
/// where the other channel is invisible. The subleading fit regresses
/// `Z d^(2h) - Z_pair(x3, x4)` over `d` in `[3e-7, 1e-5]`, close enough to
/// the merge that the integer-power descendants of the identity channel
/// are negligible.
pub fn ope_check(kappa: f64, x3: f64, x4: f64, tolerance: f64) -> Result<OpeReport> {
    let p = KappaParams::new(kappa)?;
    check_ordered(&[0.0, x3, x4])?;
    let alpha = LinkPattern::new(vec![(1, 2), (3, 4)])?;
    let scale = x4 - x3;
    let z = |d: f64| z_four(kappa, &alpha, &[-0.5 * d, 0.5 * d, x3, x4]);
    let lead_d: Vec<f64> = [1e-8, 3e-8, 1e-7, 3e-7, 1e-6].iter().map(|d| d * scale).collect();
    let lead_v = lead_d.iter().map(|&d| z(d)).collect::<Result<Vec<_>>>()?;
    let (leading_exponent, intercept) = loglog_fit(&lead_d, &lead_v);
    let zp = z_pair(kappa, x3, x4)?;
    let sub_d: Vec<f64> = [3e-7, 1e-6, 3e-6, 1e-5].iter().map(|d| d * scale).collect();
    let sub_v = sub_d.iter().map(|&d| Ok(z(d)? * d.powf(2.0 * p.h) - zp)).collect::<Result<Vec<_>>>()?;
    let (rel_slope, _) = loglog_fit(&sub_d, &sub_v);
    let leading_coefficient = intercept.exp();
    let expected_subleading_exponent = 2.0 / kappa;
    let subleading_exponent = rel_slope - 2.0 * p.h;
    let pass = (leading_exponent + 2.0 * p.h).abs() < tolerance
        && (subleading_exponent - expected_subleading_exponent).abs() < tolerance
        && (leading_coefficient - zp).abs() < 1e-3 * zp;
    Ok(OpeReport {
        leading_exponent,
        expected_leading_exponent: -2.0 * p.h,
        leading_coefficient,
        expected_leading_coefficient: zp,
        subleading_exponent,
        expected_subleading_exponent,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_integers() {
        for k in [2.3, 3.0, 5.5, 7.1] {
            assert_eq!(q_integer(1, k).unwrap(), 1.0);
            let t = 4.0 * PI / k;
            for m in 2..7 {
                let want = (m as f64 * t).sin() / t.sin();
                assert!((q_integer(m, k).unwrap() - want).abs() < 1e-12);
            }
        }
        assert!((q_integer(2, 4.0).unwrap() + 2.0).abs() < 1e-15);
        assert!(q_integer(2, 8.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn constants_of_the_two_channels() {
        for k in [2.7, 3.3, 5.1, 6.0] {
            assert_eq!(nu_const(2, 2, 1, k).unwrap(), 1.0);
            assert_eq!(nu_const(2, 2, 3, k).unwrap(), 1.0);
            assert_eq!(b_const(2, 2, 3, k).unwrap(), 1.0);
        }
        let b = b_const(2, 2, 1, 6.0).unwrap();
        let want = gamma_fn(1.0 / 3.0).unwrap().powi(2) / gamma_fn(2.0 / 3.0).unwrap();
        assert!((b - want).abs() < 1e-12 && (b - 5.2999).abs() < 1e-3);
        assert!((FusionConstants::new(2, 2, 1, 3.3).unwrap().prefactor().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn parity_and_range_errors() {
        assert!(matches!(b_const(2, 2, 2, 3.0), Err(Error::Domain(_))));
        assert!(matches!(nu_const(2, 3, 7, 3.0), Err(Error::Domain(_))));
        assert!(matches!(nu_const(1, 1, 3, 3.0), Err(Error::Domain(_))));
    }

    #[test]
    fn resonances_are_reported() {
        // [3]_q vanishes at kappa = 6 and sits in the denominator of nu^2_{2,3}.
        assert!(matches!(nu_const(2, 3, 2, 6.0), Err(Error::Resonance(_))));
        assert!(matches!(b_const(2, 2, 1, 4.0), Err(Error::Resonance(_))));
    }

    #[test]
    fn fused_function_at_kappa_four() {
        let v = fused_z4(4.0, 0.0, 1.0, 3.0).unwrap();
        assert!((v - 2f64.sqrt() / 3.0).abs() < 1e-12);
        assert!(matches!(fused_z4(3.0, 1.0, 0.5, 2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn fused_pdes() {
        for (k, pts) in [(3.0, [0.0, 1.0, 2.0]), (5.0, [0.0, 1.0, 3.0])] {
            for r in fused_pde_residual(k, pts[0], pts[1], pts[2], 1e-3).unwrap() {
                assert!(r.relative < 1e-4, "{k}: {r:?}");
            }
        }
    }

    #[test]
    fn numeric_limit_matches_closed_form() {
        let lim = numeric_fusion_limit(3.0, 0.0, 1.0, 2.5, &default_separations(1.0)).unwrap();
        let want = fused_z4(3.0, 0.0, 1.0, 2.5).unwrap();
        assert!((lim.value - want).abs() < 1e-4 * want, "{lim:?} vs {want}");
    }

    #[test]
    fn ope_exponents() {
        for k in [3.0, 5.0] {
            let r = ope_check(k, 2.0, 3.0, 1e-2).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }
}
