//! Loewner chain engine.
//!
//! The driving function is treated as piecewise constant and every substep
//! applies the exact vertical-slit map
//!
//! ```text
//! g -> W + sign(g - W) * sqrt((g - W)^2 + 4 dt),
//! ```
//!
//! which solves `dg/dt = 2/(g - W)` exactly for constant `W`. A full step is
//! a half slit at the old driving value, a jump of the driving function, and
//! a half slit at the new value.
//!
//! Boundary points are tracked through `g_t(x)` and `ln g_t'(x)`. Interior
//! points and traces use complex arithmetic.

use crate::error::{Error, Result};
use crate::linkpat::Side;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

/// Gap below which a tracked point counts as swallowed. It is relative to
/// the point's initial distance from the driving function.
pub const DEFAULT_SWALLOW_EPS: f64 = 1e-12;

/// Reproducible RNG for sample `stream` of a run seeded with `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Samples `W_0, ..., W_M` of a driving function on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrivingFunction {
    pub dt: f64,
    pub kappa: f64,
    pub w: Vec<f64>,
}

impl DrivingFunction {
    /// Constant driving function `W = w0` on `steps` steps.
    pub fn constant(w0: f64, dt: f64, steps: usize) -> Self {
        Self { dt, kappa: 0.0, w: vec![w0; steps + 1] }
    }

    pub fn steps(&self) -> usize {
        self.w.len() - 1
    }

    pub fn final_time(&self) -> f64 {
        self.dt * self.steps() as f64
    }
}

/// Brownian driving function `W_t = W_0 + sqrt(kappa) B_t` on `[0, T]`.
pub fn sample_driving(kappa: f64, t_final: f64, dt: f64, w0: f64, rng: &mut impl rand::Rng) -> Result<DrivingFunction> {
    if !(kappa >= 0.0) || !(dt > 0.0) || !(t_final > 0.0) {
        return Err(Error::Domain(format!(
            "need kappa >= 0, dt > 0, T > 0 (got {kappa}, {dt}, {t_final})"
        )));
    }
    let steps = (t_final / dt).round().max(1.0) as usize;
    let sd = (kappa * dt).sqrt();
    let mut w = Vec::with_capacity(steps + 1);
    let mut cur = w0;
    w.push(cur);
    for _ in 0..steps {
        let n: f64 = StandardNormal.sample(rng);
        cur += sd * n;
        w.push(cur);
    }
    Ok(DrivingFunction { dt, kappa, w })
}

/// Driving function of an SLE from `x_a` aimed at `x_b`, from the SDE
/// `dW = sqrt(kappa) dB + (kappa - 6)/(W - V) dt`, `dV = 2/(V - W) dt`
/// (Euler-Maruyama). Returns the driving samples and the target samples.
pub fn sample_driving_toward(
    kappa: f64,
    x_a: f64,
    x_b: f64,
    t_final: f64,
    dt: f64,
    rng: &mut impl rand::Rng,
) -> Result<(DrivingFunction, Vec<f64>)> {
    if x_a == x_b {
        return Err(Error::Domain("start and target must differ".into()));
    }
    let steps = (t_final / dt).round().max(1.0) as usize;
    let sd = (kappa * dt).sqrt();
    let (mut w, mut v) = (x_a, x_b);
    let mut ws = vec![w];
    let mut vs = vec![v];
    for _ in 0..steps {
        let n: f64 = StandardNormal.sample(rng);
        let dw = sd * n + (kappa - 6.0) / (w - v) * dt;
        v += 2.0 / (v - w) * dt;
        w += dw;
        if (v - w).signum() != (x_b - x_a).signum() {
            return Err(Error::Refinement("driving function overtook its target".into()));
        }
        ws.push(w);
        vs.push(v);
    }
    Ok((DrivingFunction { dt, kappa, w: ws }, vs))
}

/// Boundary point followed through the chain.
///
/// The state is stored relative to the driving function, `z = g_t(x) - W_t`,
/// so that points very close to the tip keep full relative precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrackedPoint {
    pub x0: f64,
    /// `g_t(x0) - W_t`.
    pub z: f64,
    /// `ln g_t'(x0)`.
    pub log_dg: f64,
    /// Capacity time at which the point was swallowed, if it was.
    pub swallowed_at: Option<f64>,
    scale: f64,
}

/// Loewner chain state for a finite set of boundary points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoewnerChain {
    pub t: f64,
    pub w: f64,
    pub steps: u64,
    pub points: Vec<TrackedPoint>,
    swallow_eps: f64,
}

impl LoewnerChain {
    /// Start at `g_0 = id` with driving value `w0`.
    pub fn new(w0: f64, xs: &[f64]) -> Result<Self> {
        let mut points = Vec::with_capacity(xs.len());
        for &x in xs {
            if x == w0 || !x.is_finite() {
                return Err(Error::Domain(format!("tracked point {x} coincides with the start")));
            }
            points.push(TrackedPoint { x0: x, z: x - w0, log_dg: 0.0, swallowed_at: None, scale: (x - w0).abs() });
        }
        Ok(Self { t: 0.0, w: w0, steps: 0, points, swallow_eps: DEFAULT_SWALLOW_EPS })
    }

    /// Set the relative gap below which points count as swallowed.
    pub fn with_swallow_eps(mut self, eps: f64) -> Self {
        self.swallow_eps = eps;
        self
    }

    /// `g_t(x)` of tracked point `i`.
    pub fn g(&self, i: usize) -> f64 {
        self.w + self.points[i].z
    }

    /// Vertical slit of capacity `2 dt` at the current driving value.
    pub fn slit(&mut self, dt: f64) {
        let four_dt = 4.0 * dt;
        for p in self.points.iter_mut().filter(|p| p.swallowed_at.is_none()) {
            let z = p.z;
            if z.abs() <= self.swallow_eps * p.scale {
                p.swallowed_at = Some(self.t);
                continue;
            }
            let r = (z * z + four_dt).sqrt();
            p.z = z.signum() * r;
            p.log_dg += (z.abs() / r).ln();
        }
        self.t += dt;
    }

    /// Move the driving function by `dw`. A tracked point that the jump
    /// reaches or passes over is swallowed.
    pub fn move_driving(&mut self, dw: f64) {
        for p in self.points.iter_mut().filter(|p| p.swallowed_at.is_none()) {
            let z = p.z - dw;
            if z == 0.0 || z.signum() != p.z.signum() {
                p.swallowed_at = Some(self.t);
            }
            p.z = z;
        }
        self.w += dw;
    }

    /// One full step: half slit, jump by `dw`, half slit.
    pub fn step(&mut self, dt: f64, dw: f64) {
        self.slit(0.5 * dt);
        self.move_driving(dw);
        self.slit(0.5 * dt);
        self.steps += 1;
    }

    /// Follow a sampled driving function from the current state up to
    /// capacity time `t_final` (or the end of the samples).
    pub fn evolve(&mut self, driving: &DrivingFunction, t_final: f64) -> Result<()> {
        if !(driving.dt > 0.0) {
            return Err(Error::Refinement("driving function step must be positive".into()));
        }
        let start = (self.t / driving.dt).round() as usize;
        let end = ((t_final / driving.dt).round() as usize).min(driving.steps());
        for k in start..end {
            self.w = driving.w[k];
            self.step(driving.dt, driving.w[k + 1] - driving.w[k]);
            if self.points.iter().any(|p| !p.z.is_finite() || !p.log_dg.is_finite()) {
                return Err(Error::Refinement(format!("non-finite state at step {k}")));
            }
        }
        Ok(())
    }

    /// Brownian driving with adaptive steps `min(dt_max, rho * gap^2)` up to
    /// capacity `t_final`, where `gap` is the smallest distance from an
    /// unswallowed point to the driving function. Near-approaches are
    /// resolved geometrically instead of being mistaken for swallowing.
    pub fn evolve_adaptive(
        &mut self,
        kappa: f64,
        t_final: f64,
        dt_max: f64,
        rho: f64,
        rng: &mut impl rand::Rng,
    ) -> Result<()> {
        let sd = kappa.sqrt();
        // The step is split in two half slits, so a remainder of a few ulps
        // would no longer move `t`; treat it as arrival.
        let arrived = 8.0 * f64::EPSILON * t_final.abs();
        while t_final - self.t > arrived {
            let gap = self.min_gap();
            let dt = (rho * gap * gap).min(dt_max).min(t_final - self.t);
            if !(dt > 0.0) {
                break;
            }
            let n: f64 = StandardNormal.sample(rng);
            self.step(dt, sd * dt.sqrt() * n);
            if self.points.iter().any(|p| !p.z.is_finite() || !p.log_dg.is_finite()) {
                return Err(Error::Refinement(format!("non-finite state at t = {}", self.t)));
            }
        }
        Ok(())
    }

    pub fn active(&self) -> impl Iterator<Item = &TrackedPoint> {
        self.points.iter().filter(|p| p.swallowed_at.is_none())
    }

    /// Smallest `|g_t(x) - W_t|` over unswallowed points.
    pub fn min_gap(&self) -> f64 {
        self.active().map(|p| p.z.abs()).fold(f64::INFINITY, f64::min)
    }

    pub fn any_swallowed(&self) -> bool {
        self.points.iter().any(|p| p.swallowed_at.is_some())
    }
}

/// Fraction of `runs` SLE paths from 0 to infinity, followed up to capacity
/// `t_final` with adaptive steps, that swallow at least one of `pts`.
pub fn swallow_fraction(kappa: f64, pts: &[f64], t_final: f64, runs: u64, seed: u64) -> Result<f64> {
    let hits: Vec<Result<bool>> = (0..runs)
        .into_par_iter()
        .map(|k| {
            let mut chain = LoewnerChain::new(0.0, pts)?;
            chain.evolve_adaptive(kappa, t_final, 1e-3, 4e-3, &mut rng_for(seed, k))?;
            Ok(chain.any_swallowed())
        })
        .collect();
    let mut count = 0u64;
    for h in hits {
        count += u64::from(h?);
    }
    Ok(count as f64 / runs as f64)
}

/// Ratio of boundary Poisson kernels after removing the hull,
/// `g'(x) g'(y) (y - x)^2 / (g(y) - g(x))^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonRatio {
    pub value: f64,
    /// Capacity time at which the ratio was taken.
    pub t: f64,
}

/// Poisson-kernel ratio for tracked points `i` and `j` of `chain`.
pub fn poisson_ratio(chain: &LoewnerChain, i: usize, j: usize) -> Result<PoissonRatio> {
    let (p, q) = (&chain.points[i], &chain.points[j]);
    if p.swallowed_at.is_some() || q.swallowed_at.is_some() {
        return Err(Error::Domain("Poisson ratio of a swallowed point".into()));
    }
    if p.z.signum() != q.z.signum() {
        return Err(Error::Domain("points lie on different sides of the curve".into()));
    }
    let d0 = q.x0 - p.x0;
    let d = q.z - p.z;
    Ok(PoissonRatio { value: (p.log_dg + q.log_dg).exp() * (d0 * d0) / (d * d), t: chain.t })
}

fn slit_complex(z: Complex64, w: f64, dt: f64) -> Complex64 {
    let u = z - w;
    let mut r = (u * u + 4.0 * dt).sqrt();
    if r.im < 0.0 || (r.im == 0.0 && r.re * u.re < 0.0) {
        r = -r;
    }
    w + r
}

fn unslit_complex(z: Complex64, w: f64, dt: f64) -> Complex64 {
    let u = z - w;
    let mut r = (u * u - 4.0 * dt).sqrt();
    if r.im < 0.0 {
        r = -r;
    }
    w + r
}

/// Image `g_T(z)` of an interior point under the chain of `driving`.
pub fn evolve_complex(z0: Complex64, driving: &DrivingFunction, t_final: f64) -> Complex64 {
    let end = ((t_final / driving.dt).round() as usize).min(driving.steps());
    let mut z = z0;
    let h = 0.5 * driving.dt;
    for k in 0..end {
        z = slit_complex(z, driving.w[k], h);
        z = slit_complex(z, driving.w[k + 1], h);
    }
    z
}

/// Trace points `gamma(t_n)` for `n = 0, ..., M`, computed by running the
/// inverse slit maps backwards from the tip (zipper evaluation).
pub fn zipper_trace(driving: &DrivingFunction) -> Vec<Complex64> {
    let h = 0.5 * driving.dt;
    let mut out = Vec::with_capacity(driving.w.len());
    out.push(Complex64::new(driving.w[0], 0.0));
    for n in 1..driving.w.len() {
        let mut z = Complex64::new(driving.w[n], 0.0);
        for k in (0..n).rev() {
            z = unslit_complex(z, driving.w[k + 1], h);
            z = unslit_complex(z, driving.w[k], h);
        }
        out.push(z);
    }
    out
}

/// Parameters of a chordal run between two boundary points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChordalConfig {
    pub kappa: f64,
    /// Relative step: each substep has capacity `rho * min_gap^2`.
    pub rho: f64,
    /// Stop once every side's point cloud is this small relative to its
    /// distance from the tip image.
    pub stop_eps: f64,
    pub max_steps: u64,
}

impl ChordalConfig {
    pub fn new(kappa: f64) -> Self {
        Self { kappa, rho: 4e-3, stop_eps: 3e-3, max_steps: 5_000_000 }
    }
}

/// State of the tracked points at the stopping time of a chordal run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChordalOutcome {
    /// Side of the curve: `Right` for points between the endpoints.
    pub sides: Vec<Side>,
    /// `g_t(y) - W_t` in the frame where the curve runs from 0 to infinity.
    pub z: Vec<f64>,
    /// `ln` of the full derivative (conjugating Mobius map included).
    pub log_dg: Vec<f64>,
    /// Tracked points grouped by side, with the gaps between their images.
    pub groups: Vec<SideGroup>,
    pub w: f64,
    pub t: f64,
    pub steps: u64,
    /// Final value of the stopping statistic.
    pub chi: f64,
}

/// Tracked points on one side of the curve, ordered by image.
///
/// `gaps[k]` is the distance between the images of `members[k]` and
/// `members[k + 1]`. It is carried as its own product of slit factors, so it
/// stays accurate when the images themselves agree to all printed digits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideGroup {
    pub side: Side,
    /// Positions in the tracked list.
    pub members: Vec<usize>,
    pub gaps: Vec<f64>,
}

/// A point closer to the tip than this fraction of every other distance to
/// the tip has its excursion replaced by a single draw.
const DEEP: f64 = 1e-6;

// In the clock ds = dt / z^2, u = ln|z| of the point nearest the tip is a
// Brownian motion with drift 2 - kappa/2 and variance kappa, and its ln g'
// decreases at rate 2. For kappa near 4 the drift vanishes and resolving an
// excursion step by step has a heavy-tailed cost. While |z| stays below DEEP
// times the other distances, the rest of the configuration moves by a
// relative amount of order DEEP, so the excursion is replaced by its exact
// first passage time S back to that level and ln g' drops by 2 S.
fn skip_excursion(chain: &mut LoewnerChain, groups: &mut [SideGroup], kappa: f64, rng: &mut impl rand::Rng) -> bool {
    let (mut i0, mut z1, mut z2) = (0, f64::INFINITY, f64::INFINITY);
    for (i, p) in chain.points.iter().enumerate() {
        let a = p.z.abs();
        if a < z1 {
            (i0, z2, z1) = (i, z1, a);
        } else if a < z2 {
            z2 = a;
        }
    }
    let level = DEEP * z2;
    if z1 >= level {
        return false;
    }
    let s = first_passage(((level / z1).ln(), 2.0 - 0.5 * kappa, kappa), rng);
    let old = chain.points[i0].z;
    let new = old.signum() * level;
    chain.points[i0].z = new;
    chain.points[i0].log_dg -= 2.0 * s;
    chain.steps += 1;
    for g in groups.iter_mut() {
        if let Some(k) = g.members.iter().position(|&m| m == i0) {
            if k > 0 {
                g.gaps[k - 1] += new - old;
            }
            if k + 1 < g.members.len() {
                g.gaps[k] -= new - old;
            }
        }
    }
    true
}

/// First passage time to level `dist > 0` of a Brownian motion with drift
/// `mu >= 0` and variance `var` per unit time: inverse Gaussian with mean
/// `dist/mu` and shape `dist^2/var`, Levy when `mu = 0`. Written in terms of
/// `1/mean` so the vanishing-drift limit stays free of cancellation.
fn first_passage((dist, mu, var): (f64, f64, f64), rng: &mut impl rand::Rng) -> f64 {
    let inv_mean = mu / dist;
    let shape = dist * dist / var;
    let xi: f64 = StandardNormal.sample(rng);
    let y = xi * xi;
    let x = 1.0 / (inv_mean + y / (2.0 * shape) + (y * inv_mean / shape + (y / (2.0 * shape)).powi(2)).sqrt());
    if rng.random::<f64>() * (1.0 + x * inv_mean) <= 1.0 {
        x
    } else {
        1.0 / (inv_mean * inv_mean * x)
    }
}

/// Chordal SLE in the half-plane between two of the boundary points
/// `x_0 < x_1 < ... < x_n`, given through the consecutive gaps
/// `gaps[k] = x_{k+1} - x_k`. The curve runs from `x_a` to `x_b` (`a < b`)
/// and every other point is tracked, in increasing order of index.
///
/// The run conjugates an SLE from 0 to infinity by the Mobius map
/// `phi(x) = (x - x_a)/(x_b - x)`. All differences are formed as sums of
/// gaps, so clusters much tighter than the size of the configuration are
/// resolved. The run stops when, on each side of the curve that carries at
/// least two tracked points, the spread of their images divided by their
/// distance to the driving function falls below `stop_eps`.
pub fn chordal_between(
    cfg: &ChordalConfig,
    gaps: &[f64],
    a: usize,
    b: usize,
    rng: &mut impl rand::Rng,
) -> Result<ChordalOutcome> {
    let n = gaps.len() + 1;
    if !(a < b && b < n) {
        return Err(Error::Domain(format!("chordal endpoints {a} and {b} must be ordered indices below {n}")));
    }
    if let Some(g) = gaps.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
        return Err(Error::Domain(format!("boundary gaps must be positive and finite, got {g}")));
    }
    // Signed x_j - x_i as a sum of gaps of one sign.
    let diff = |i: usize, j: usize| -> f64 {
        if i <= j {
            gaps[i..j].iter().sum()
        } else {
            -gaps[j..i].iter().sum::<f64>()
        }
    };
    let span = diff(a, b);
    let tracked: Vec<usize> = (0..n).filter(|&k| k != a && k != b).collect();
    let mut imgs = Vec::with_capacity(tracked.len());
    let mut log_phi = Vec::with_capacity(tracked.len());
    let mut sides = Vec::with_capacity(tracked.len());
    for &k in &tracked {
        let to_b = diff(k, b);
        imgs.push(diff(a, k) / to_b);
        log_phi.push((span / (to_b * to_b)).ln());
        sides.push(if k > a && k < b { Side::Right } else { Side::Left });
    }

    // Image order: the right side in index order; on the left, the points
    // past `x_b` come first, then those before `x_a`.
    let pos = |k: usize| tracked.iter().position(|&t| t == k).expect("tracked index");
    let right: Vec<usize> = (a + 1..b).map(pos).collect();
    let left: Vec<usize> = (b + 1..n).chain(0..a).map(pos).collect();
    let mut groups: Vec<SideGroup> = [(Side::Left, left), (Side::Right, right)]
        .into_iter()
        .filter(|(_, m)| !m.is_empty())
        .map(|(side, members)| {
            let gaps = members
                .windows(2)
                .map(|w| {
                    let (i, j) = (tracked[w[0]], tracked[w[1]]);
                    span * diff(i, j) / (diff(i, b) * diff(j, b))
                })
                .collect();
            SideGroup { side, members, gaps }
        })
        .collect();

    let mut chain = LoewnerChain::new(0.0, &imgs)?.with_swallow_eps(0.0);
    let sd = cfg.kappa.sqrt();
    let chi_of = |chain: &LoewnerChain, groups: &[SideGroup]| -> f64 {
        let mut chi: f64 = 0.0;
        for g in groups.iter().filter(|g| g.members.len() >= 2) {
            let near = g.members.iter().map(|&m| chain.points[m].z.abs()).fold(f64::INFINITY, f64::min);
            chi = chi.max(g.gaps.iter().sum::<f64>() / near);
        }
        chi
    };
    // Each half slit sends z to sign(z) sqrt(z^2 + 4 dt), so a gap between
    // two images of one sign is multiplied by (z_i + z_j)/(z'_i + z'_j).
    let half_slit = |chain: &mut LoewnerChain, groups: &mut [SideGroup], dt: f64| {
        let before: Vec<f64> = chain.points.iter().map(|p| p.z).collect();
        chain.slit(dt);
        for g in groups.iter_mut() {
            for (k, gap) in g.gaps.iter_mut().enumerate() {
                let (i, j) = (g.members[k], g.members[k + 1]);
                *gap *= (before[i] + before[j]) / (chain.points[i].z + chain.points[j].z);
            }
        }
    };
    let mut chi = chi_of(&chain, &groups);
    while chi >= cfg.stop_eps {
        if chain.steps >= cfg.max_steps {
            return Err(Error::Truncation {
                sample: 0,
                steps: chain.steps,
                reason: format!("stopping statistic still {chi:.3e}"),
            });
        }
        if skip_excursion(&mut chain, &mut groups, cfg.kappa, rng) {
            chi = chi_of(&chain, &groups);
            continue;
        }
        let gap = chain.min_gap();
        let dt = cfg.rho * gap * gap;
        let xi: f64 = StandardNormal.sample(rng);
        half_slit(&mut chain, &mut groups, 0.5 * dt);
        chain.move_driving(sd * dt.sqrt() * xi);
        half_slit(&mut chain, &mut groups, 0.5 * dt);
        chain.steps += 1;
        if chain.any_swallowed() {
            return Err(Error::Refinement(format!(
                "driving jump reached a tracked point at step {} (relative step {} too large)",
                chain.steps, cfg.rho
            )));
        }
        chi = chi_of(&chain, &groups);
    }
    Ok(ChordalOutcome {
        sides,
        z: chain.points.iter().map(|p| p.z).collect(),
        log_dg: chain.points.iter().zip(&log_phi).map(|(p, lp)| p.log_dg + lp).collect(),
        groups,
        w: chain.w,
        t: chain.t,
        steps: chain.steps,
        chi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slit_map_closed_form() {
        let drv = DrivingFunction::constant(0.0, 1e-3, 1000);
        let mut c = LoewnerChain::new(0.0, &[3.0, -2.0]).unwrap();
        c.evolve(&drv, 1.0).unwrap();
        assert!((c.t - 1.0).abs() < 1e-12);
        assert!((c.g(0) - 13f64.sqrt()).abs() < 1e-12);
        assert!((c.points[0].log_dg.exp() - 3.0 / 13f64.sqrt()).abs() < 1e-12);
        assert!((c.g(1) + 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn slit_poisson_ratio() {
        let drv = DrivingFunction::constant(0.0, 1e-2, 100);
        let mut c = LoewnerChain::new(0.0, &[1.0, 2.0]).unwrap();
        assert_eq!(poisson_ratio(&c, 0, 1).unwrap().value, 1.0);
        c.evolve(&drv, 1.0).unwrap();
        let (s5, s8) = (5f64.sqrt(), 8f64.sqrt());
        let expect = (1.0 / s5) * (2.0 / s8) / (s8 - s5).powi(2);
        let r = poisson_ratio(&c, 0, 1).unwrap().value;
        assert!((r - expect).abs() < 1e-12);
        assert!((r - 0.9012).abs() < 1e-4);
    }

    #[test]
    fn interior_slit_and_trace() {
        let drv = DrivingFunction::constant(0.0, 1e-3, 1000);
        let z = Complex64::new(0.3, 0.7);
        let g = evolve_complex(z, &drv, 1.0);
        let expect = (z * z + 4.0).sqrt();
        assert!((g - expect).norm() < 1e-12);
        let tr = zipper_trace(&drv);
        assert!((tr[1000] - Complex64::new(0.0, 2.0)).norm() < 1e-9);
        assert!((tr[250] - Complex64::new(0.0, 1.0)).norm() < 1e-9);
    }

    #[test]
    fn half_plane_capacity() {
        let mut rng = rng_for(7, 0);
        let drv = sample_driving(3.0, 1.0, 1e-4, 0.0, &mut rng).unwrap();
        let z = Complex64::new(0.0, 1e4);
        let g = evolve_complex(z, &drv, 1.0);
        let hcap = ((g - z) * z).re;
        assert!((hcap - 2.0).abs() < 0.02, "hcap {hcap}");
    }

    #[test]
    fn driving_is_reproducible() {
        let a = sample_driving(3.0, 0.1, 1e-3, 0.0, &mut rng_for(1, 4)).unwrap();
        let b = sample_driving(3.0, 0.1, 1e-3, 0.0, &mut rng_for(1, 4)).unwrap();
        let c = sample_driving(3.0, 0.1, 1e-3, 0.0, &mut rng_for(1, 5)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let z = sample_driving(0.0, 0.1, 1e-3, 0.5, &mut rng_for(1, 4)).unwrap();
        assert!(z.w.iter().all(|&w| w == 0.5));
    }

    #[test]
    fn swallowing_by_jump() {
        let mut c = LoewnerChain::new(0.0, &[0.5]).unwrap();
        c.step(1e-4, 1.0);
        assert!(c.any_swallowed());
        let mut d = LoewnerChain::new(0.0, &[0.5]).unwrap();
        d.step(1e-4, -1.0);
        assert!(!d.any_swallowed());
    }

    #[test]
    fn first_passage_law() {
        let mut rng = rng_for(4, 0);
        let n = 200_000;
        // Drift 1, variance 2, level 3: inverse Gaussian with mean 3 and shape 4.5.
        let xs: Vec<f64> = (0..n).map(|_| first_passage((3.0, 1.0, 2.0), &mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((mean - 3.0).abs() < 0.02, "{mean}");
        assert!((var - 6.0).abs() < 0.2, "{var}");
        // No drift: P(S <= s) = 2 P(N > level / sqrt(var s)); at s = level^2/var it is 0.3173.
        let below = (0..n).filter(|_| first_passage((3.0, 0.0, 2.0), &mut rng) <= 4.5).count();
        assert!((below as f64 / n as f64 - 0.3173).abs() < 0.004);
    }

    #[test]
    fn chordal_kappa_zero_is_deterministic() {
        let cfg = ChordalConfig { kappa: 0.0, ..ChordalConfig::new(0.0) };
        let out = chordal_between(&cfg, &[1.0, 1.0, 2.0], 0, 1, &mut rng_for(3, 0)).unwrap();
        let again = chordal_between(&cfg, &[1.0, 1.0, 2.0], 0, 1, &mut rng_for(9, 9)).unwrap();
        assert_eq!(out, again);
        assert!(out.sides.iter().all(|&s| s == Side::Left));
        let g = &out.groups[0];
        assert_eq!(g.members, vec![0, 1]);
        let direct = out.z[1] - out.z[0];
        assert!((g.gaps[0] - direct).abs() < 1e-12 * direct);
        assert!(out.chi < cfg.stop_eps);
    }
}
