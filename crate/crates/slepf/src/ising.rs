//! Critical Ising model on a rectangle of the square lattice with
//! alternating boundary conditions, domain-wall tracing and connectivity
//! statistics of the interfaces.
//!
//! The `width x height` interior spins sit at grid sites `1..=width` by
//! `1..=height` of a `(width + 2) x (height + 2)` grid whose outer ring holds
//! the frozen boundary spins. Ring sites are numbered counterclockwise from
//! the bottom-left corner; ring edge `k` joins ring sites `k` and `k + 1`.
//! Marked points are ring edges at which the boundary sign flips. Spins are
//! `+` on the ring sites after marks `1, 3, 5, ...` up to the next mark and
//! `-` elsewhere.

use crate::error::{Error, Result};
use crate::exact_pf::{check_ordered, z_alpha, Mobius};
use crate::linkpat::{enumerate, LinkPattern};
use crate::loewner::rng_for;
use crate::specfun::{ellip_k_from_complement, jacobi_elliptic, rect_corner_images};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Critical inverse temperature `ln(1 + sqrt 2) / 2` of the square lattice.
pub fn beta_critical() -> f64 {
    0.5 * std::f64::consts::SQRT_2.ln_1p()
}

/// Markov chain used to sample spin configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Dynamics {
    /// Single-site heat-bath sweeps in lexicographic order.
    HeatBath,
    /// Swendsen-Wang cluster updates; clusters attached to the boundary
    /// ring are frozen.
    SwendsenWang,
}

/// Parameters of an Ising simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsingConfig {
    pub width: usize,
    pub height: usize,
    pub beta: f64,
    /// Ring-edge indices of the marked points, increasing.
    pub marks: Vec<usize>,
    /// Updates between retained samples.
    pub sweeps: usize,
    /// Updates discarded at the start of every chain.
    pub burn_in: usize,
    pub samples: usize,
    /// Independent chains the samples are split over.
    pub chains: usize,
    pub seed: u64,
    pub dynamics: Dynamics,
}

impl IsingConfig {
    /// Critical model on a `width x height` rectangle marked at its four
    /// corners (bottom-left, bottom-right, top-right, top-left).
    pub fn corners(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            beta: beta_critical(),
            marks: corner_marks(width, height).to_vec(),
            sweeps: 4,
            burn_in: 200,
            samples: 1000,
            chains: 8,
            seed: 0,
            dynamics: Dynamics::SwendsenWang,
        }
    }

    pub fn ring_len(&self) -> usize {
        2 * (self.width + 1) + 2 * (self.height + 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width < 2 || self.height < 2 {
            return Err(Error::Domain("lattice must be at least 2 x 2".into()));
        }
        if self.marks.is_empty() || self.marks.len() % 2 == 1 {
            return Err(Error::Domain(format!("need an even positive number of marks, got {}", self.marks.len())));
        }
        if self.marks.windows(2).any(|w| w[1] <= w[0]) || *self.marks.last().unwrap() >= self.ring_len() {
            return Err(Error::Domain(format!("marks must increase within 0..{}", self.ring_len())));
        }
        if !(self.beta >= 0.0) || self.chains == 0 {
            return Err(Error::Domain("beta must be non-negative and chains positive".into()));
        }
        Ok(())
    }

    /// Boundary sign of every ring site.
    pub fn ring_signs(&self) -> Vec<i8> {
        let len = self.ring_len();
        let mut signs = vec![-1i8; len];
        for pair in self.marks.chunks(2) {
            let mut k = (pair[0] + 1) % len;
            loop {
                signs[k] = 1;
                if k == pair[1] {
                    break;
                }
                k = (k + 1) % len;
            }
        }
        signs
    }
}

/// Ring edges leaving the four corners counterclockwise.
pub fn corner_marks(width: usize, height: usize) -> [usize; 4] {
    [0, width + 1, width + height + 2, 2 * width + height + 3]
}

/// Grid coordinates of ring site `k`.
fn ring_site(width: usize, height: usize, k: usize) -> (usize, usize) {
    let (w1, h1) = (width + 1, height + 1);
    if k <= w1 {
        (k, 0)
    } else if k <= w1 + h1 {
        (w1, k - w1)
    } else if k <= 2 * w1 + h1 {
        (2 * w1 + h1 - k, h1)
    } else {
        (0, 2 * w1 + 2 * h1 - k)
    }
}

/// Spin configuration including the frozen ring.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinField {
    pub width: usize,
    pub height: usize,
    spins: Vec<i8>,
}

impl SpinField {
    /// Boundary ring from `config`, interior filled with `interior`.
    pub fn new(config: &IsingConfig, interior: i8) -> Self {
        let stride = config.width + 2;
        let mut spins = vec![interior; stride * (config.height + 2)];
        for (k, s) in config.ring_signs().into_iter().enumerate() {
            let (i, j) = ring_site(config.width, config.height, k);
            spins[j * stride + i] = s;
        }
        Self { width: config.width, height: config.height, spins }
    }

    fn stride(&self) -> usize {
        self.width + 2
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.spins[j * self.stride() + i]
    }

    pub fn set(&mut self, i: usize, j: usize, s: i8) {
        let st = self.stride();
        self.spins[j * st + i] = s;
    }

    fn is_interior(&self, i: usize, j: usize) -> bool {
        (1..=self.width).contains(&i) && (1..=self.height).contains(&j)
    }

    /// Mean interior spin.
    pub fn magnetization(&self) -> f64 {
        let mut s = 0i64;
        for j in 1..=self.height {
            for i in 1..=self.width {
                s += i64::from(self.get(i, j));
            }
        }
        s as f64 / (self.width * self.height) as f64
    }

    /// Mean of `s_x s_y` over lattice edges with at least one interior end.
    pub fn energy_per_edge(&self) -> f64 {
        let (mut s, mut n) = (0i64, 0i64);
        for j in 0..=self.height + 1 {
            for i in 0..=self.width + 1 {
                for (di, dj) in [(1, 0), (0, 1)] {
                    let (a, b) = (i + di, j + dj);
                    if a > self.width + 1 || b > self.height + 1 {
                        continue;
                    }
                    if self.is_interior(i, j) || self.is_interior(a, b) {
                        s += i64::from(self.get(i, j) * self.get(a, b));
                        n += 1;
                    }
                }
            }
        }
        s as f64 / n as f64
    }

    /// One heat-bath sweep over the interior.
    pub fn heat_bath_sweep(&mut self, beta: f64, rng: &mut impl Rng) {
        let st = self.stride();
        for j in 1..=self.height {
            for i in 1..=self.width {
                let x = j * st + i;
                let field = i32::from(self.spins[x - 1] + self.spins[x + 1]) + i32::from(self.spins[x - st] + self.spins[x + st]);
                let p_plus = 1.0 / (1.0 + (-2.0 * beta * f64::from(field)).exp());
                self.spins[x] = if rng.random::<f64>() < p_plus { 1 } else { -1 };
            }
        }
    }

    /// One Swendsen-Wang update. Bonds join equal neighbours with
    /// probability `1 - exp(-2 beta)`; clusters containing a ring site keep
    /// their sign, all others are flipped with probability 1/2.
    pub fn swendsen_wang(&mut self, beta: f64, rng: &mut impl Rng) {
        let st = self.stride();
        let n = self.spins.len();
        let p_bond = -(-2.0 * beta).exp_m1();
        let mut uf = UnionFind::new(n);
        for j in 0..=self.height + 1 {
            for i in 0..=self.width + 1 {
                let x = j * st + i;
                for (y, ok) in [(x + 1, i <= self.width), (x + st, j <= self.height)] {
                    if ok
                        && (self.is_interior(i, j) || self.is_interior(y % st, y / st))
                        && self.spins[x] == self.spins[y]
                        && rng.random::<f64>() < p_bond
                    {
                        uf.union(x, y);
                    }
                }
            }
        }
        // 0 = undecided, 1 = keep, 2 = flip.
        let mut action = vec![0u8; n];
        for j in 0..=self.height + 1 {
            for i in 0..=self.width + 1 {
                if !self.is_interior(i, j) {
                    let r = uf.find(j * st + i);
                    action[r] = 1;
                }
            }
        }
        for j in 1..=self.height {
            for i in 1..=self.width {
                let x = j * st + i;
                let r = uf.find(x);
                if action[r] == 0 {
                    action[r] = if rng.random_bool(0.5) { 2 } else { 1 };
                }
                if action[r] == 2 {
                    self.spins[x] = -self.spins[x];
                }
            }
        }
    }

    /// One sweep or cluster update of the chosen dynamics.
    pub fn update(&mut self, dynamics: Dynamics, beta: f64, rng: &mut impl Rng) {
        match dynamics {
            Dynamics::HeatBath => self.heat_bath_sweep(beta, rng),
            Dynamics::SwendsenWang => self.swendsen_wang(beta, rng),
        }
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo as u32;
        }
    }
}

/// Equilibrate with `config.burn_in` updates and return the state after a
/// further `config.sweeps` updates.
pub fn sample_spins(config: &IsingConfig) -> Result<SpinField> {
    config.validate()?;
    let mut rng = rng_for(config.seed, 0);
    let mut field = SpinField::new(config, 1);
    for _ in 0..config.burn_in + config.sweeps {
        field.update(config.dynamics, config.beta, &mut rng);
    }
    Ok(field)
}

// Directions E, N, W, S as grid offsets.
const DIRS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

/// Pairing of the marked points by the domain walls of `spins`.
///
/// Each wall is followed across plaquettes (dual vertices) from a mark
/// where the boundary turns from `-` to `+` (odd label), with `-` on its
/// left, turning left whenever all four sides of a plaquette are walls,
/// until it leaves through another mark.
pub fn trace_interfaces(spins: &SpinField, config: &IsingConfig) -> Result<LinkPattern> {
    let (w, h) = (config.width, config.height);
    let ring_len = config.ring_len();
    let mut label_of_edge = vec![0usize; ring_len];
    for (idx, &m) in config.marks.iter().enumerate() {
        label_of_edge[m] = idx + 1;
    }
    let n_plaq = (w + 1) * (h + 1);
    let mut visited = vec![false; 4 * n_plaq];
    let mut links = Vec::with_capacity(config.marks.len() / 2);
    for (idx, &m) in config.marks.iter().enumerate().step_by(2) {
        let (mut p, mut dir) = entry_of_ring_edge(w, h, m);
        let exit = loop {
            let (pi, pj) = p;
            // Sides of the plaquette as (direction, site a, site b) with a on
            // the left when crossing the side in that direction.
            let side_sites = |d: usize| -> ((usize, usize), (usize, usize)) {
                match d {
                    0 => ((pi + 1, pj + 1), (pi + 1, pj)),
                    1 => ((pi, pj + 1), (pi + 1, pj + 1)),
                    2 => ((pi, pj), (pi, pj + 1)),
                    _ => ((pi + 1, pj), (pi, pj)),
                }
            };
            let is_wall = |d: usize| {
                let (a, b) = side_sites(d);
                spins.get(a.0, a.1) != spins.get(b.0, b.1)
            };
            let back = (dir + 2) % 4;
            let next = [(dir + 1) % 4, dir, (dir + 3) % 4]
                .into_iter()
                .find(|&d| d != back && is_wall(d) && {
                    let (a, _) = side_sites(d);
                    spins.get(a.0, a.1) < 0
                })
                .ok_or_else(|| Error::Consistency(format!("domain wall ends inside plaquette {p:?}")))?;
            let slot = 4 * (pj * (w + 1) + pi) + next;
            if visited[slot] {
                return Err(Error::Consistency(format!("domain wall revisits plaquette {p:?}")));
            }
            visited[slot] = true;
            let (di, dj) = DIRS[next];
            let (ni, nj) = (pi as i64 + di, pj as i64 + dj);
            if ni < 0 || nj < 0 || ni > w as i64 || nj > h as i64 {
                let (a, b) = side_sites(next);
                break ring_edge_between(w, h, a, b)
                    .ok_or_else(|| Error::Consistency(format!("wall leaves through a non-ring side at {p:?}")))?;
            }
            p = (ni as usize, nj as usize);
            dir = next;
        };
        let label = label_of_edge[exit];
        if label == 0 || label % 2 == 1 {
            return Err(Error::Consistency(format!("wall from mark {} exits at ring edge {exit}", idx + 1)));
        }
        links.push((idx + 1, label));
    }
    LinkPattern::new(links).map_err(|e| Error::Consistency(format!("interfaces do not form a planar pairing: {e}")))
}

// Plaquette just inside ring edge `k` and the inward direction.
fn entry_of_ring_edge(w: usize, h: usize, k: usize) -> ((usize, usize), usize) {
    let a = ring_site(w, h, k);
    let b = ring_site(w, h, (k + 1) % (2 * (w + 1) + 2 * (h + 1)));
    let (i, j) = (a.0.min(b.0), a.1.min(b.1));
    if a.1 == b.1 {
        // Horizontal edge: bottom row moves north, top row moves south.
        if a.1 == 0 {
            ((i, 0), 1)
        } else {
            ((i, h), 3)
        }
    } else if a.0 == 0 {
        ((0, j), 0)
    } else {
        ((w, j), 2)
    }
}

fn ring_edge_between(w: usize, h: usize, a: (usize, usize), b: (usize, usize)) -> Option<usize> {
    let len = 2 * (w + 1) + 2 * (h + 1);
    (0..len).find(|&k| {
        let (x, y) = (ring_site(w, h, k), ring_site(w, h, (k + 1) % len));
        (x == a && y == b) || (x == b && y == a)
    })
}

/// Half-plane images of the marked points, in increasing order.
///
/// Marks sit at midpoints of ring edges on the rectangle
/// `[0, width + 1] x [0, height + 1]`, which is mapped to the half-plane by
/// the Schwarz-Christoffel map `sn`; a final Mobius map sends a boundary point
/// between the last and the first mark to infinity.
pub fn marked_point_images(config: &IsingConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let (wf, hf) = ((config.width + 1) as f64, (config.height + 1) as f64);
    let corners = rect_corner_images(hf / wf)?;
    let k = corners.k;
    let kp = ((1.0 - k) * (1.0 + k)).sqrt();
    let big_k = ellip_k_from_complement(kp);
    let big_kp = ellip_k_from_complement(k);
    let len = config.ring_len();
    let midpoint = |pos: f64| -> (f64, f64) {
        let k0 = pos.floor() as usize % len;
        let (a, b) = (ring_site(config.width, config.height, k0), ring_site(config.width, config.height, (k0 + 1) % len));
        let t = pos - pos.floor();
        (a.0 as f64 + t * (b.0 as f64 - a.0 as f64), a.1 as f64 + t * (b.1 as f64 - a.1 as f64))
    };
    let image = |(x, y): (f64, f64)| -> Result<f64> {
        let u = 2.0 * big_k * x / wf - big_k;
        let v = big_kp * y / hf;
        Ok(if y == 0.0 {
            jacobi_elliptic(u, k)?.0
        } else if y == hf {
            1.0 / (k * jacobi_elliptic(u, k)?.0)
        } else if x == wf {
            1.0 / jacobi_elliptic(v, kp)?.2
        } else {
            -1.0 / jacobi_elliptic(v, kp)?.2
        })
    };
    let first = config.marks[0] as f64 + 0.5;
    let last = *config.marks.last().unwrap() as f64 + 0.5;
    let gap = (first + len as f64 - last).rem_euclid(len as f64);
    let pole = image(midpoint((last + 0.5 * gap).rem_euclid(len as f64)))?;
    let imgs = config.marks.iter().map(|&m| image(midpoint(m as f64 + 0.5))).collect::<Result<Vec<_>>>()?;
    let out: Vec<f64> = if pole.is_finite() {
        let f = Mobius::new(0.0, -1.0, 1.0, -pole)?;
        imgs.iter().map(|&x| f.apply(x)).collect()
    } else {
        imgs
    };
    check_ordered(&out).map_err(|_| Error::Consistency("marked point images are not ordered".into()))?;
    Ok(out)
}

/// Connectivity probabilities `Z_alpha / sum_beta Z_beta` at `kappa = 3` for
/// `N <= 2` marks; the Mobius derivative factors cancel in the ratio.
pub fn predicted_probabilities(config: &IsingConfig) -> Result<BTreeMap<LinkPattern, f64>> {
    let n = config.marks.len() / 2;
    if n > 2 {
        return Err(Error::Unsupported(format!("no closed-form prediction for {n} interfaces")));
    }
    let pts = marked_point_images(config)?;
    let pats = enumerate(n)?;
    let vals = pats.iter().map(|a| z_alpha(3.0, a, &pts)).collect::<Result<Vec<_>>>()?;
    let total: f64 = vals.iter().sum();
    Ok(pats.into_iter().zip(vals).map(|(a, v)| (a, v / total)).collect())
}

/// One connectivity class of a crossing experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingRow {
    pub alpha: LinkPattern,
    pub count: u64,
    pub empirical: f64,
    /// Binomial standard error, valid for independent samples.
    pub stderr: f64,
    /// Batch-means standard error, which also reflects residual
    /// autocorrelation along each chain.
    pub stderr_batch: f64,
    pub predicted: Option<f64>,
}

/// Empirical versus predicted connectivity distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingResult {
    pub config: IsingConfig,
    pub rows: Vec<CrossingRow>,
    pub samples: u64,
}

impl CrossingResult {
    /// Largest `|empirical - predicted|` over the patterns.
    pub fn max_gap(&self) -> Option<f64> {
        self.rows.iter().map(|r| r.predicted.map(|p| (r.empirical - p).abs())).try_fold(0.0f64, |m, g| Some(m.max(g?)))
    }
}

/// Consecutive samples per batch in [`CrossingRow::stderr_batch`].
pub const BATCH_LEN: usize = 25;

fn batch_stderr(chains: &[Vec<LinkPattern>], alpha: &LinkPattern, len: usize) -> f64 {
    let means: Vec<f64> = chains
        .iter()
        .flat_map(|c| c.chunks_exact(len))
        .map(|b| b.iter().filter(|a| *a == alpha).count() as f64 / len as f64)
        .collect();
    let k = means.len() as f64;
    if means.len() < 2 {
        return f64::NAN;
    }
    let mean = means.iter().sum::<f64>() / k;
    let var = means.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0);
    (var / k).sqrt()
}

/// Sample interface connectivities from `config.chains` independent chains
/// and compare with the prediction.
pub fn crossing_experiment(config: &IsingConfig) -> Result<CrossingResult> {
    config.validate()?;
    let chains = config.chains.min(config.samples.max(1));
    let per_chain: Vec<usize> = (0..chains).map(|c| config.samples / chains + usize::from(c < config.samples % chains)).collect();
    let results: Vec<Result<Vec<LinkPattern>>> = per_chain
        .par_iter()
        .enumerate()
        .map(|(c, &count)| {
            let mut rng = rng_for(config.seed, c as u64);
            let mut field = SpinField::new(config, 1);
            for _ in 0..config.burn_in {
                field.update(config.dynamics, config.beta, &mut rng);
            }
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                for _ in 0..config.sweeps {
                    field.update(config.dynamics, config.beta, &mut rng);
                }
                out.push(trace_interfaces(&field, config)?);
            }
            Ok(out)
        })
        .collect();
    let chain_samples = results.into_iter().collect::<Result<Vec<_>>>()?;
    let mut counts: BTreeMap<LinkPattern, u64> = enumerate(config.marks.len() / 2)?.into_iter().map(|a| (a, 0)).collect();
    for a in chain_samples.iter().flatten() {
        *counts.entry(a.clone()).or_insert(0) += 1;
    }
    let predicted = match predicted_probabilities(config) {
        Ok(p) => Some(p),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    let m = config.samples as f64;
    let rows = counts
        .into_iter()
        .map(|(alpha, count)| {
            let p = count as f64 / m;
            CrossingRow {
                predicted: predicted.as_ref().map(|t| t[&alpha]),
                stderr_batch: batch_stderr(&chain_samples, &alpha, BATCH_LEN),
                alpha,
                count,
                empirical: p,
                stderr: (p * (1.0 - p) / m).sqrt(),
            }
        })
        .collect();
    Ok(CrossingResult { config: config.clone(), rows, samples: config.samples as u64 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_point() {
        let b = beta_critical();
        assert!(((2.0 * b).sinh() - 1.0).abs() < 1e-15);
        assert!((b - 0.4406868).abs() < 1e-7);
    }

    #[test]
    fn ring_geometry() {
        let c = IsingConfig::corners(3, 2);
        assert_eq!(c.ring_len(), 14);
        assert_eq!(corner_marks(3, 2), [0, 4, 7, 11]);
        assert_eq!(ring_site(3, 2, 0), (0, 0));
        assert_eq!(ring_site(3, 2, 4), (4, 0));
        assert_eq!(ring_site(3, 2, 7), (4, 3));
        assert_eq!(ring_site(3, 2, 11), (0, 3));
        assert_eq!(ring_site(3, 2, 13), (0, 1));
        let s = c.ring_signs();
        assert_eq!(s, vec![-1, 1, 1, 1, 1, -1, -1, -1, 1, 1, 1, 1, -1, -1]);
    }

    #[test]
    fn all_plus_interior_gives_nested_pattern() {
        let c = IsingConfig::corners(6, 5);
        let f = SpinField::new(&c, 1);
        assert_eq!(trace_interfaces(&f, &c).unwrap().to_string(), "1-4,2-3");
        let g = SpinField::new(&c, -1);
        assert_eq!(trace_interfaces(&g, &c).unwrap().to_string(), "1-2,3-4");
    }

    #[test]
    fn dobrushin_always_pairs() {
        let mut c = IsingConfig::corners(12, 12);
        c.marks = vec![3, 30];
        let mut rng = rng_for(1, 0);
        let mut f = SpinField::new(&c, 1);
        for _ in 0..30 {
            f.heat_bath_sweep(c.beta, &mut rng);
            assert_eq!(trace_interfaces(&f, &c).unwrap().to_string(), "1-2");
        }
    }

    #[test]
    fn square_images_are_symmetric() {
        let c = IsingConfig::corners(20, 20);
        let p = predicted_probabilities(&c).unwrap();
        for v in p.values() {
            assert!((v - 0.5).abs() < 1e-9, "{p:?}");
        }
    }

    #[test]
    fn infinite_temperature_is_uniform() {
        let mut c = IsingConfig::corners(10, 10);
        c.beta = 0.0;
        let mut rng = rng_for(4, 0);
        let mut f = SpinField::new(&c, 1);
        let mut plus = 0usize;
        let sweeps = 200;
        for _ in 0..sweeps {
            f.swendsen_wang(0.0, &mut rng);
            plus += (1..=10).flat_map(|j| (1..=10).map(move |i| (i, j))).filter(|&(i, j)| f.get(i, j) > 0).count();
        }
        let n = (sweeps * 100) as f64;
        assert!(((plus as f64) / n - 0.5).abs() < 4.0 * (0.25 / n).sqrt());
    }

    #[test]
    fn half_rectangle_prediction() {
        // Height/width = 1/2: corners map to (-sqrt2, -1, 1, sqrt2) starting
        // from the top-left corner, so bottom-left is label 2 there.
        let c = IsingConfig::corners(199, 99);
        let p = predicted_probabilities(&c).unwrap();
        let y = [-std::f64::consts::SQRT_2, -1.0, 1.0, std::f64::consts::SQRT_2];
        let a: LinkPattern = "1-2,3-4".parse().unwrap();
        let b: LinkPattern = "1-4,2-3".parse().unwrap();
        let (za, zb) = (crate::exact_pf::z_four(3.0, &a, &y).unwrap(), crate::exact_pf::z_four(3.0, &b, &y).unwrap());
        // Our {1,2},{3,4} joins bottom-left to bottom-right: {2,3} in the y labels.
        assert!((p[&a] - zb / (za + zb)).abs() < 1e-4, "{p:?}");
        // Joining the two bottom corners spans the long side, so it is the rarer pattern.
        assert!(p[&a] < 0.5);
    }
}
