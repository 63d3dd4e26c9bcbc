//! Monte-Carlo cascade estimator of pure partition functions.
//!
//! For a link `{a, b}` of `alpha`,
//!
//! ```text
//! Z_alpha(x) = |x_b - x_a|^(-2h) E[ prod_D Z_{alpha_D}(D; x_D) ],
//! ```
//!
//! where the expectation is over a chordal SLE from `x_a` to `x_b`, `D` runs
//! over the two sides of the curve and `alpha_D` is the part of `alpha` left
//! in `D` after removing `{a, b}`. A sample is zero if a remaining link has
//! its endpoints on different sides. Each factor is brought back to the
//! half-plane by the Loewner map at the stopping time, and sub-patterns with
//! two or more links are evaluated by one nested sample of the same
//! construction.
//!
//! The curve is simple for `kappa <= 4`, so the side of every point is fixed
//! by whether it lies between `x_a` and `x_b`.

use crate::cft_params::KappaParams;
use crate::error::{Error, Result};
use crate::exact_pf::{check_ordered, z_pair, Method, PartitionFnEstimate};
use crate::linkpat::{side_split, LinkPattern, Side, SideSplit};
use crate::loewner::{chordal_between, rng_for, ChordalConfig};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Which link of the pattern the first curve follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkChoice {
    First,
    Fixed(usize, usize),
    Random,
}

/// Configuration of a cascade estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeConfig {
    pub kappa: f64,
    pub alpha: LinkPattern,
    pub pts: Vec<f64>,
    pub link_choice: LinkChoice,
    pub samples: u64,
    /// Relative Loewner step (see [`ChordalConfig::rho`]).
    pub dt: f64,
    pub stop_eps: f64,
    pub seed: u64,
    pub max_steps: u64,
}

impl CascadeConfig {
    pub fn new(kappa: f64, alpha: LinkPattern, pts: Vec<f64>) -> Self {
        let base = ChordalConfig::new(kappa);
        Self {
            kappa,
            alpha,
            pts,
            link_choice: LinkChoice::First,
            samples: 10_000,
            dt: base.rho,
            stop_eps: base.stop_eps,
            seed: 0,
            max_steps: base.max_steps,
        }
    }

    fn validate(&self) -> Result<()> {
        KappaParams::new(self.kappa)?;
        if self.kappa > 4.0 {
            return Err(Error::Unsupported(format!(
                "the cascade estimator needs kappa <= 4 (simple curves), got {}",
                self.kappa
            )));
        }
        if self.pts.len() != self.alpha.n_points() {
            return Err(Error::Domain(format!(
                "pattern '{}' needs {} points, got {}",
                self.alpha,
                self.alpha.n_points(),
                self.pts.len()
            )));
        }
        check_ordered(&self.pts)?;
        if let LinkChoice::Fixed(a, b) = self.link_choice {
            if !self.alpha.contains(a, b) {
                return Err(Error::Precondition(format!("{{{a},{b}}} is not a link of '{}'", self.alpha)));
            }
        }
        if !(self.dt > 0.0 && self.dt < 0.1) {
            return Err(Error::Domain(format!("relative step must lie in (0, 0.1), got {}", self.dt)));
        }
        if !(self.stop_eps > 0.0 && self.stop_eps < 1.0) {
            return Err(Error::Domain(format!("stop_eps must lie in (0, 1), got {}", self.stop_eps)));
        }
        Ok(())
    }

    fn chordal(&self) -> ChordalConfig {
        ChordalConfig { kappa: self.kappa, rho: self.dt, stop_eps: self.stop_eps, max_steps: self.max_steps }
    }
}

/// Averages reported with an estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McDiagnostics {
    pub mean_steps: f64,
    pub max_steps: u64,
    /// Fraction of samples that were zero because a link crossed the curve.
    pub zero_fraction: f64,
    pub warnings: Vec<String>,
}

/// Estimate with its standard error and diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub se: f64,
    #[serde(rename = "M")]
    pub samples: u64,
    pub diagnostics: McDiagnostics,
}

impl McEstimate {
    pub fn as_partition_estimate(&self) -> PartitionFnEstimate {
        PartitionFnEstimate { value: self.mean, abs_error: self.se, method: Method::Mc }
    }
}

struct Sample {
    value: f64,
    steps: u64,
    zero: bool,
}

/// One unbiased sample of `Z_alpha` at the points with consecutive gaps
/// `gaps`. Nested samples only ever see gaps, which keeps points that the
/// first curve squeezes together distinct.
fn sample_z(
    cfg: &ChordalConfig,
    h: f64,
    alpha: &LinkPattern,
    gaps: &[f64],
    choice: LinkChoice,
    rng: &mut impl Rng,
) -> Result<Sample> {
    match alpha.n_links() {
        0 => return Ok(Sample { value: 1.0, steps: 0, zero: false }),
        1 => return Ok(Sample { value: z_pair(cfg.kappa, 0.0, gaps[0])?, steps: 0, zero: false }),
        _ => {}
    }
    let (a, b) = match choice {
        LinkChoice::First => alpha.links()[0],
        LinkChoice::Fixed(a, b) => (a.min(b), a.max(b)),
        LinkChoice::Random => alpha.links()[rng.random_range(0..alpha.n_links())],
    };
    let prefactor = gaps[a - 1..b - 1].iter().sum::<f64>().powf(-2.0 * h);

    // Remaining indices in increasing order, and their sides.
    let rest: Vec<usize> = (1..=alpha.n_points()).filter(|&i| i != a && i != b).collect();
    let reduced = alpha.induced(&rest)?;
    let side_of: Vec<Side> = rest.iter().map(|&i| if i > a && i < b { Side::Right } else { Side::Left }).collect();
    if let SideSplit::Crossing = side_split(&reduced, &side_of)? {
        return Ok(Sample { value: 0.0, steps: 0, zero: true });
    }

    let out = chordal_between(cfg, gaps, a - 1, b - 1, rng)?;
    let mut value = prefactor;
    let mut steps = out.steps;
    for group in &out.groups {
        let original: Vec<usize> = group.members.iter().map(|&p| rest[p]).collect();
        let sub_alpha = alpha.induced(&original)?;
        let jac: f64 = group.members.iter().map(|&p| out.log_dg[p]).sum::<f64>();
        let inner = sample_z(cfg, h, &sub_alpha, &group.gaps, LinkChoice::First, rng)?;
        steps += inner.steps;
        value *= (h * jac).exp() * inner.value;
    }
    Ok(Sample { value, steps, zero: false })
}

/// Cascade estimate of `Z_alpha` with its standard error.
///
/// Sample `i` uses the RNG stream `i` of `seed`, and partial sums are
/// combined in a fixed order, so the result does not depend on the thread
/// count.
pub fn estimate_z(config: &CascadeConfig) -> Result<McEstimate> {
    config.validate()?;
    let h = KappaParams::new(config.kappa)?.h;
    let cfg = config.chordal();
    let gaps: Vec<f64> = config.pts.windows(2).map(|w| w[1] - w[0]).collect();
    let mut warnings = Vec::new();
    if config.samples < 100 {
        warnings.push(format!("only {} samples; error bars are unreliable", config.samples));
    }
    let results: Vec<Result<Sample>> = (0..config.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(config.seed, i);
            sample_z(&cfg, h, &config.alpha, &gaps, config.link_choice, &mut rng).map_err(|e| match e {
                Error::Truncation { steps, reason, .. } => Error::Truncation { sample: i, steps, reason },
                other => other,
            })
        })
        .collect();
    let mut values = Vec::with_capacity(results.len());
    let (mut steps_total, mut steps_max, mut zeros) = (0u64, 0u64, 0u64);
    for r in results {
        let s = r?;
        steps_total += s.steps;
        steps_max = steps_max.max(s.steps);
        zeros += u64::from(s.zero);
        values.push(s.value);
    }
    let m = values.len() as f64;
    let mean = pairwise_sum(&values) / m;
    let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = if values.len() > 1 { pairwise_sum(&dev) / (m - 1.0) } else { 0.0 };
    Ok(McEstimate {
        mean,
        se: (var / m).sqrt(),
        samples: config.samples,
        diagnostics: McDiagnostics {
            mean_steps: steps_total as f64 / m,
            max_steps: steps_max,
            zero_fraction: zeros as f64 / m,
            warnings,
        },
    })
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// Estimates of the same `Z_alpha` started from two different links.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub first: McEstimate,
    pub second: McEstimate,
    /// Difference in units of the pooled standard error.
    pub z_score: f64,
    pub pass: bool,
}

/// Compare cascade estimates built on `link1` and on `link2`. The two runs
/// use different seeds so they are independent.
pub fn symmetry_check(config: &CascadeConfig, link1: (usize, usize), link2: (usize, usize)) -> Result<SymmetryReport> {
    let mut c1 = config.clone();
    c1.link_choice = LinkChoice::Fixed(link1.0, link1.1);
    let mut c2 = config.clone();
    c2.link_choice = LinkChoice::Fixed(link2.0, link2.1);
    c2.seed = config.seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let first = estimate_z(&c1)?;
    let second = estimate_z(&c2)?;
    let pooled = (first.se * first.se + second.se * second.se).sqrt();
    let diff = first.mean - second.mean;
    let z_score = if pooled > 0.0 { diff / pooled } else if diff == 0.0 { 0.0 } else { f64::INFINITY };
    Ok(SymmetryReport { pass: z_score.abs() <= 3.0, first, second, z_score })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_pf::z_four;

    fn lp(s: &str) -> LinkPattern {
        s.parse().unwrap()
    }

    #[test]
    fn single_link_has_no_variance() {
        let mut c = CascadeConfig::new(3.0, lp("1-2"), vec![0.0, 2.0]);
        c.samples = 50;
        let e = estimate_z(&c).unwrap();
        assert_eq!(e.se, 0.0);
        assert!((e.mean - 0.5).abs() < 1e-15);
        assert!(!e.diagnostics.warnings.is_empty());
        let s = symmetry_check(&c, (1, 2), (1, 2)).unwrap();
        assert_eq!(s.z_score, 0.0);
    }

    #[test]
    fn rejects_bad_configs() {
        let c = CascadeConfig::new(5.0, lp("1-2"), vec![0.0, 2.0]);
        assert!(matches!(estimate_z(&c), Err(Error::Unsupported(_))));
        let mut c = CascadeConfig::new(3.0, lp("1-2,3-4"), vec![0.0, 2.0, 3.0, 4.0]);
        c.link_choice = LinkChoice::Fixed(1, 4);
        assert!(matches!(estimate_z(&c), Err(Error::Precondition(_))));
    }

    #[test]
    fn samples_respect_the_product_bound_and_are_reproducible() {
        let alpha = lp("1-4,2-3");
        let pts = vec![0.0, 1.0, 2.0, 4.0];
        let mut c = CascadeConfig::new(3.0, alpha.clone(), pts.clone());
        c.samples = 400;
        c.seed = 11;
        let cfg = c.chordal();
        let bound = crate::exact_pf::bound_b(3.0, &alpha, &pts).unwrap();
        let gaps = [1.0, 1.0, 2.0];
        for i in 0..200 {
            let s = sample_z(&cfg, 0.5, &alpha, &gaps, LinkChoice::First, &mut rng_for(5, i)).unwrap();
            assert!(s.value >= 0.0 && s.value <= bound * (1.0 + 1e-12));
        }
        let a = estimate_z(&c).unwrap();
        let b = estimate_z(&c).unwrap();
        assert_eq!(a, b);
        let exact = z_four(3.0, &alpha, &pts).unwrap();
        assert!((a.mean - exact).abs() < 5.0 * a.se, "{} vs {exact} (se {})", a.mean, a.se);
    }
}
