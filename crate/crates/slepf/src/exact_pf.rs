//! Closed-form pure partition functions for one and two curves, the fusion
//! constant `C(kappa)`, totals, the Ising Pfaffian and polygon transport.

use crate::cft_params::KappaParams;
use crate::error::{Error, Result};
use crate::linkpat::{self, LinkPattern};
use crate::specfun::{gauss_2f1, gauss_at_one, gamma_fn, pfaffian, rgamma};
use serde::Serialize;

/// Strictly increasing boundary points `x_1 < ... < x_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoints(Vec<f64>);

impl BoundaryPoints {
    pub fn new(xs: impl Into<Vec<f64>>) -> Result<Self> {
        let xs = xs.into();
        check_ordered(&xs)?;
        Ok(Self(xs))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Fail unless the points are finite and strictly increasing.
pub fn check_ordered(xs: &[f64]) -> Result<()> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("boundary points must be finite".into()));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(format!("boundary points must be strictly increasing: {xs:?}")));
    }
    Ok(())
}

/// How a partition-function value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Mc,
    Coulomb,
}

/// A partition-function value with an error bar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionFnEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub method: Method,
}

/// The empty pattern has partition function 1.
pub fn z_empty() -> f64 {
    1.0
}

/// `(x2 - x1)^((kappa - 6)/kappa)`.
pub fn z_pair(kappa: f64, x1: f64, x2: f64) -> Result<f64> {
    KappaParams::new(kappa)?;
    check_ordered(&[x1, x2])?;
    Ok((x2 - x1).powf((kappa - 6.0) / kappa))
}

fn check_kappa_below_eight(kappa: f64) -> Result<KappaParams> {
    let p = KappaParams::new(kappa)?;
    if kappa >= 8.0 {
        return Err(Error::Unsupported(format!(
            "four-point functions need kappa < 8, got {kappa}"
        )));
    }
    Ok(p)
}

// z^(2/kappa) 2F1(4/k, 1-4/k; 8/k; z) / 2F1(...; 1)
fn hyper_factor(kappa: f64, z: f64) -> Result<f64> {
    let (a, b, c) = (4.0 / kappa, 1.0 - 4.0 / kappa, 8.0 / kappa);
    Ok(z.powf(2.0 / kappa) * gauss_2f1(a, b, c, z)? / gauss_at_one(a, b, c)?)
}

/// Pure partition functions of the two planar patterns on four points.
pub fn z_four(kappa: f64, alpha: &LinkPattern, pts: &[f64]) -> Result<f64> {
    let p = check_kappa_below_eight(kappa)?;
    if pts.len() != 4 {
        return Err(Error::Domain(format!("z_four needs 4 points, got {}", pts.len())));
    }
    check_ordered(pts)?;
    let [x1, x2, x3, x4] = [pts[0], pts[1], pts[2], pts[3]];
    let two_h = 2.0 * p.h;
    match alpha.links() {
        [(1, 2), (3, 4)] => {
            let z = (x4 - x1) * (x3 - x2) / ((x4 - x2) * (x3 - x1));
            Ok((x2 - x1).powf(-two_h) * (x4 - x3).powf(-two_h) * hyper_factor(kappa, z)?)
        }
        [(1, 4), (2, 3)] => {
            let z = (x2 - x1) * (x4 - x3) / ((x4 - x2) * (x3 - x1));
            Ok((x4 - x1).powf(-two_h) * (x3 - x2).powf(-two_h) * hyper_factor(kappa, z)?)
        }
        _ => Err(Error::Domain(format!("'{alpha}' is not a four-point pattern"))),
    }
}

/// `Z_alpha` for `N <= 2` links.
pub fn z_alpha(kappa: f64, alpha: &LinkPattern, pts: &[f64]) -> Result<f64> {
    if pts.len() != alpha.n_points() {
        return Err(Error::Domain(format!(
            "pattern '{alpha}' needs {} points, got {}",
            alpha.n_points(),
            pts.len()
        )));
    }
    match alpha.n_links() {
        0 => Ok(z_empty()),
        1 => z_pair(kappa, pts[0], pts[1]),
        2 => z_four(kappa, alpha, pts),
        n => Err(Error::Unsupported(format!(
            "no closed form for {n} links; use the Monte-Carlo or Coulomb evaluators"
        ))),
    }
}

/// `C(kappa) = Gamma(4/k) Gamma(12/k - 1) / (Gamma(8/k) Gamma(8/k - 1))`,
/// the reciprocal of `2F1(4/k, 1-4/k; 8/k; 1)`. Vanishes at `kappa = 8`.
pub fn c_kappa(kappa: f64) -> Result<f64> {
    KappaParams::new(kappa)?;
    if kappa > 8.0 {
        return Err(Error::Unsupported(format!("C(kappa) needs kappa <= 8, got {kappa}")));
    }
    Ok(gamma_fn(4.0 / kappa)? * gamma_fn(12.0 / kappa - 1.0)? * rgamma(8.0 / kappa) * rgamma(8.0 / kappa - 1.0))
}

/// Sum of `Z_alpha` over all planar patterns. Exact for `N <= 2`; for more
/// links each term is a cascade estimate with the default configuration
/// (seed 0), which needs `kappa <= 4`.
pub fn z_total(kappa: f64, pts: &[f64]) -> Result<f64> {
    if pts.len() % 2 == 1 {
        return Err(Error::Domain("an even number of points is required".into()));
    }
    let n = pts.len() / 2;
    if n <= 2 {
        return linkpat::enumerate(n)?.iter().map(|a| z_alpha(kappa, a, pts)).sum();
    }
    let mut total = 0.0;
    for alpha in linkpat::enumerate(n)? {
        total += crate::mc_pf::estimate_z(&crate::mc_pf::CascadeConfig::new(kappa, alpha, pts.to_vec()))?.mean;
    }
    Ok(total)
}

/// Pfaffian of the matrix with entries `1/|x_j - x_i|` (the kappa = 3 total).
pub fn pfaffian_form(pts: &[f64]) -> Result<f64> {
    check_ordered(pts)?;
    let n = pts.len();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            a[i][j] = 1.0 / (pts[j] - pts[i]);
            a[j][i] = -a[i][j];
        }
    }
    pfaffian(&a)
}

/// Right side of the product bound: `prod over links |x_b - x_a|^(-2h)`.
pub fn bound_b(kappa: f64, alpha: &LinkPattern, pts: &[f64]) -> Result<f64> {
    let p = KappaParams::new(kappa)?;
    Ok(alpha
        .links()
        .iter()
        .map(|&(a, b)| (pts[b - 1] - pts[a - 1]).abs().powf(-2.0 * p.h))
        .product())
}

/// Right side of the nearest-neighbour power-law bound:
/// `prod_i (min_{j != i} |x_i - x_j|)^(-h)`.
pub fn malek_bound(kappa: f64, pts: &[f64]) -> Result<f64> {
    let p = KappaParams::new(kappa)?;
    Ok((0..pts.len())
        .map(|i| {
            let d = (0..pts.len())
                .filter(|&j| j != i)
                .map(|j| (pts[i] - pts[j]).abs())
                .fold(f64::INFINITY, f64::min);
            d.powf(-p.h)
        })
        .product())
}

/// Smallest relative margins `1 - Z/bound` seen by [`bounds_suite`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub kappa: f64,
    pub configurations: usize,
    pub min_margin_product: f64,
    pub min_margin_nearest: f64,
    pub pass: bool,
}

/// Check both bounds for every two-link pattern on the grid
/// `x = (0, g1, g1 + g2, g1 + g2 + g3)` with each gap running over
/// `per_axis` log-spaced values in `[1e-2, 1e2]`.
pub fn bounds_suite(kappa: f64, per_axis: usize) -> Result<BoundsReport> {
    if per_axis < 2 {
        return Err(Error::Domain("the bounds grid needs at least two values per axis".into()));
    }
    let gaps: Vec<f64> = (0..per_axis).map(|k| 10f64.powf(-2.0 + 4.0 * k as f64 / (per_axis - 1) as f64)).collect();
    let patterns = linkpat::enumerate(2)?;
    let (mut m_b, mut m_n) = (f64::INFINITY, f64::INFINITY);
    for &g1 in &gaps {
        for &g2 in &gaps {
            for &g3 in &gaps {
                let pts = [0.0, g1, g1 + g2, g1 + g2 + g3];
                let nearest = malek_bound(kappa, &pts)?;
                for a in &patterns {
                    let z = z_four(kappa, a, &pts)?;
                    m_b = m_b.min(1.0 - z / bound_b(kappa, a, &pts)?);
                    m_n = m_n.min(1.0 - z / nearest);
                }
            }
        }
    }
    Ok(BoundsReport {
        kappa,
        configurations: per_axis.pow(3),
        min_margin_product: m_b,
        min_margin_nearest: m_n,
        pass: m_b > 0.0 && m_n > 0.0,
    })
}

/// A real Mobius map `x -> (a x + b)/(c x + d)` with `a d - b c = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mobius {
    pub const IDENTITY: Self = Self { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    /// Validate the unit-determinant normalization.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if (det - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("Mobius determinant is {det}, expected 1")));
        }
        Ok(Self { a, b, c, d })
    }

    /// Affine map `x -> lambda x + shift` with `lambda > 0`.
    pub fn affine(lambda: f64, shift: f64) -> Self {
        let s = lambda.sqrt();
        Self { a: s, b: shift / s, c: 0.0, d: 1.0 / s }
    }

    pub fn apply(&self, x: f64) -> f64 {
        (self.a * x + self.b) / (self.c * x + self.d)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let q = self.c * x + self.d;
        1.0 / (q * q)
    }

    /// Image of ordered points, failing if the pole separates them.
    pub fn map_ordered(&self, pts: &[f64]) -> Result<Vec<f64>> {
        let imgs: Vec<f64> = pts.iter().map(|&x| self.apply(x)).collect();
        check_ordered(&imgs).map_err(|_| Error::Domain("Mobius map does not preserve the order of the points".into()))?;
        Ok(imgs)
    }
}

/// Result of transporting a half-plane partition function to a polygon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolygonValue {
    /// `Z_alpha / Z_total` at the corner images (covariance factors cancel).
    pub ratio: f64,
    /// Full value `prod |f'(x_i)|^h Z_alpha(f(x))`, if derivatives were given.
    pub value: Option<f64>,
}

/// Evaluate `Z_alpha` of a polygon through the half-plane images of its
/// marked points and, optionally, the moduli of the conformal map derivative
/// there.
pub fn transport_polygon(
    kappa: f64,
    alpha: &LinkPattern,
    corner_images: &[f64],
    derivative_factors: Option<&[f64]>,
) -> Result<PolygonValue> {
    check_ordered(corner_images)?;
    let z = z_alpha(kappa, alpha, corner_images)?;
    let total = z_total(kappa, corner_images)?;
    let value = match derivative_factors {
        None => None,
        Some(d) => {
            if d.len() != corner_images.len() {
                return Err(Error::Domain("one derivative factor per marked point is needed".into()));
            }
            let h = KappaParams::new(kappa)?.h;
            Some(d.iter().map(|f| f.abs().powf(h)).product::<f64>() * z)
        }
    };
    Ok(PolygonValue { ratio: z / total, value })
}
