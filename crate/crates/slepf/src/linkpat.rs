//! Planar link patterns and valenced link patterns.
//!
//! Indices are 1-based throughout, matching the usual labelling of marked
//! boundary points `x_1 < ... < x_{2N}`.

use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

/// Largest `N` accepted by [`enumerate`].
pub const MAX_ENUMERATE: usize = 10;

/// A planar pair partition of `{1, ..., 2N}`.
///
/// Links are stored as `(a, b)` with `a < b`, sorted lexicographically, so
/// derived equality and hashing are canonical.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LinkPattern {
    links: Vec<(usize, usize)>,
}

impl LinkPattern {
    /// The pattern with no links.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Build a pattern from unordered pairs, validating matching and planarity.
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut links: Vec<(usize, usize)> = pairs
            .into_iter()
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        links.sort_unstable();
        let n = 2 * links.len();
        let mut seen = vec![false; n + 1];
        for &(a, b) in &links {
            if a == b {
                return Err(Error::Domain(format!("link {{{a},{b}}} joins an index to itself")));
            }
            for i in [a, b] {
                if i == 0 || i > n {
                    return Err(Error::Domain(format!("index {i} outside 1..={n}")));
                }
                if seen[i] {
                    return Err(Error::Domain(format!("index {i} used twice")));
                }
                seen[i] = true;
            }
        }
        let p = Self { links };
        if let Some((l1, l2)) = p.first_crossing() {
            return Err(Error::Domain(format!("links {l1:?} and {l2:?} cross")));
        }
        Ok(p)
    }

    /// Number of links `N`.
    pub fn n_links(&self) -> usize {
        self.links.len()
    }

    /// Number of endpoints `2N`.
    pub fn n_points(&self) -> usize {
        2 * self.links.len()
    }

    pub fn links(&self) -> &[(usize, usize)] {
        &self.links
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// The index paired with `i`.
    pub fn partner(&self, i: usize) -> Option<usize> {
        self.links.iter().find_map(|&(a, b)| {
            if a == i {
                Some(b)
            } else if b == i {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        let key = if a < b { (a, b) } else { (b, a) };
        self.links.binary_search(&key).is_ok()
    }

    fn first_crossing(&self) -> Option<((usize, usize), (usize, usize))> {
        for (i, &(a, b)) in self.links.iter().enumerate() {
            for &(c, d) in &self.links[i + 1..] {
                if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                    return Some(((a, b), (c, d)));
                }
            }
        }
        None
    }

    /// Remove the link `{j, j+1}` and relabel the remaining indices in order.
    pub fn remove_link(&self, j: usize) -> Result<Self> {
        if !self.contains(j, j + 1) {
            return Err(Error::Precondition(format!("{{{j},{}}} is not a link of {self}", j + 1)));
        }
        let relabel = |i: usize| if i > j + 1 { i - 2 } else { i };
        let links = self
            .links
            .iter()
            .filter(|&&l| l != (j, j + 1))
            .map(|&(a, b)| (relabel(a), relabel(b)))
            .collect();
        Ok(Self { links })
    }

    /// Inverse of [`remove_link`](Self::remove_link): open a new link `{j, j+1}`.
    pub fn insert_link(&self, j: usize) -> Result<Self> {
        if j == 0 || j > self.n_points() + 1 {
            return Err(Error::Domain(format!("insert position {j} out of range")));
        }
        let relabel = |i: usize| if i >= j { i + 2 } else { i };
        Self::new(
            self.links
                .iter()
                .map(|&(a, b)| (relabel(a), relabel(b)))
                .chain(std::iter::once((j, j + 1))),
        )
    }

    /// Restrict to the indices in `order` (which must be closed under the
    /// pairing) and relabel them `1, 2, ...` following `order`.
    ///
    /// `order` may be any cyclic rotation of an increasing sequence; the
    /// result is validated for planarity.
    pub fn induced(&self, order: &[usize]) -> Result<Self> {
        let mut pos = vec![0usize; self.n_points() + 1];
        for (k, &i) in order.iter().enumerate() {
            if i == 0 || i > self.n_points() || pos[i] != 0 {
                return Err(Error::Domain(format!("bad index {i} in restriction")));
            }
            pos[i] = k + 1;
        }
        let mut pairs = Vec::with_capacity(order.len() / 2);
        for &(a, b) in &self.links {
            match (pos[a], pos[b]) {
                (0, 0) => {}
                (pa, pb) if pa != 0 && pb != 0 => pairs.push((pa, pb)),
                _ => {
                    return Err(Error::Precondition(format!(
                        "restriction splits link {{{a},{b}}}"
                    )))
                }
            }
        }
        Self::new(pairs)
    }

    /// Relabel by the cyclic shift `i -> i - shift (mod 2N)`, so that index
    /// `shift + 1` becomes index 1.
    pub fn rotate(&self, shift: usize) -> Self {
        let n = self.n_points();
        if n == 0 {
            return self.clone();
        }
        let f = |i: usize| (i - 1 + n - shift % n) % n + 1;
        Self::new(self.links.iter().map(|&(a, b)| (f(a), f(b)))).expect("rotation keeps planarity")
    }

    /// Mirror image `i -> 2N + 1 - i`.
    pub fn reflect(&self) -> Self {
        let n = self.n_points();
        Self::new(self.links.iter().map(|&(a, b)| (n + 1 - b, n + 1 - a)))
            .expect("reflection keeps planarity")
    }
}

impl fmt::Display for LinkPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.links.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl serde::Serialize for LinkPattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for LinkPattern {
    type Err = Error;

    /// Parse `"1-2,3-4"`; the empty string is the empty pattern.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::empty());
        }
        let mut pairs = Vec::new();
        for part in s.split(',') {
            let (a, b) = part
                .split_once('-')
                .ok_or_else(|| Error::Domain(format!("expected a-b, got '{part}'")))?;
            let parse = |t: &str| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Domain(format!("bad index '{t}' in '{part}'")))
            };
            pairs.push((parse(a)?, parse(b)?));
        }
        Self::new(pairs)
    }
}

/// Catalan number `C_N`.
pub fn catalan(n: usize) -> u64 {
    let mut c: u64 = 1;
    for k in 0..n as u64 {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    c
}

/// All planar pair partitions of `{1..2N}`, sorted lexicographically by
/// their link lists.
pub fn enumerate(n: usize) -> Result<Vec<LinkPattern>> {
    if n > MAX_ENUMERATE {
        return Err(Error::Capacity(format!(
            "enumerate({n}) exceeds the limit N <= {MAX_ENUMERATE}"
        )));
    }
    let mut pats: Vec<LinkPattern> = matchings(1, 2 * n)
        .into_iter()
        .map(|mut links| {
            links.sort_unstable();
            LinkPattern { links }
        })
        .collect();
    pats.sort();
    Ok(pats)
}

// Point `lo` pairs with some `m`; the stretches strictly inside and to the
// right of that link are then matched independently.
fn matchings(lo: usize, hi: usize) -> Vec<Vec<(usize, usize)>> {
    if lo > hi {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for m in (lo + 1..=hi).step_by(2) {
        let outer = matchings(m + 1, hi);
        for inner in matchings(lo + 1, m - 1) {
            for rest in &outer {
                let mut v = Vec::with_capacity(inner.len() + rest.len() + 1);
                v.push((lo, m));
                v.extend_from_slice(&inner);
                v.extend_from_slice(rest);
                out.push(v);
            }
        }
    }
    out
}

/// Which side of a curve a boundary point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Outcome of splitting a pattern by sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SideSplit {
    /// Some link joins the two sides.
    Crossing,
    /// Per-side sub-patterns with the original indices they came from.
    Split {
        left: LinkPattern,
        left_indices: Vec<usize>,
        right: LinkPattern,
        right_indices: Vec<usize>,
    },
}

/// Split `alpha` into sub-patterns according to `side_of[i - 1]`.
pub fn side_split(alpha: &LinkPattern, side_of: &[Side]) -> Result<SideSplit> {
    if side_of.len() != alpha.n_points() {
        return Err(Error::Domain(format!(
            "side map has {} entries for {} points",
            side_of.len(),
            alpha.n_points()
        )));
    }
    if alpha.links.iter().any(|&(a, b)| side_of[a - 1] != side_of[b - 1]) {
        return Ok(SideSplit::Crossing);
    }
    let pick = |s: Side| -> Vec<usize> { (1..=alpha.n_points()).filter(|&i| side_of[i - 1] == s).collect() };
    let left_indices = pick(Side::Left);
    let right_indices = pick(Side::Right);
    Ok(SideSplit::Split {
        left: alpha.induced(&left_indices)?,
        right: alpha.induced(&right_indices)?,
        left_indices,
        right_indices,
    })
}

/// Planar link pattern whose endpoints carry valences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValencedLinkPattern {
    valences: Vec<u32>,
    // (a, b, multiplicity) with a < b, sorted.
    links: Vec<(usize, usize, u32)>,
}

impl ValencedLinkPattern {
    /// Validate valences and a multiset of links `(a, b, multiplicity)`.
    pub fn new(valences: Vec<u32>, links: impl IntoIterator<Item = (usize, usize, u32)>) -> Result<Self> {
        let n = valences.len();
        if valences.contains(&0) {
            return Err(Error::Domain("valences must be positive".into()));
        }
        let mut merged: Vec<(usize, usize, u32)> = Vec::new();
        for (a, b, m) in links {
            if a == b {
                return Err(Error::Domain(format!("link joins endpoint {a} to itself")));
            }
            if a == 0 || b == 0 || a > n || b > n {
                return Err(Error::Domain(format!("endpoint out of range in ({a},{b})")));
            }
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            if m == 0 {
                continue;
            }
            match merged.iter_mut().find(|l| l.0 == a && l.1 == b) {
                Some(l) => l.2 += m,
                None => merged.push((a, b, m)),
            }
        }
        merged.sort_unstable();
        let mut ends = vec![0u32; n];
        for &(a, b, m) in &merged {
            ends[a - 1] += m;
            ends[b - 1] += m;
        }
        if ends != valences {
            return Err(Error::Domain(format!(
                "link ends per endpoint {ends:?} do not match valences {valences:?}"
            )));
        }
        for (i, &(a, b, _)) in merged.iter().enumerate() {
            for &(c, d, _) in &merged[i + 1..] {
                if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                    return Err(Error::Domain(format!("links ({a},{b}) and ({c},{d}) cross")));
                }
            }
        }
        Ok(Self { valences, links: merged })
    }

    pub fn valences(&self) -> &[u32] {
        &self.valences
    }

    /// Multiplicity of the link between endpoints `a` and `b`.
    pub fn multiplicity(&self, a: usize, b: usize) -> u32 {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.links.iter().find(|l| l.0 == a && l.1 == b).map_or(0, |l| l.2)
    }
}

/// Split each endpoint `j` into `valence_j` unit points and connect them
/// without crossings.
pub fn collapse_map(omega: &ValencedLinkPattern) -> LinkPattern {
    let n = omega.valences.len();
    let mut first = vec![1usize; n + 1];
    for j in 1..n {
        first[j] = first[j - 1] + omega.valences[j - 1] as usize;
    }
    // At each endpoint the link ends leave in the order: leftward links
    // (nearest target first), then rightward links (farthest target first).
    let mut slot_start = vec![Vec::new(); n];
    for (j, slots) in slot_start.iter_mut().enumerate() {
        let mut targets: Vec<(usize, u32)> = omega
            .links
            .iter()
            .filter_map(|&(a, b, m)| {
                if a == j + 1 {
                    Some((b, m))
                } else if b == j + 1 {
                    Some((a, m))
                } else {
                    None
                }
            })
            .collect();
        targets.sort_by_key(|t| std::cmp::Reverse(t.0));
        let (left, right): (Vec<_>, Vec<_>) = targets.into_iter().partition(|&(t, _)| t < j + 1);
        let mut p = first[j];
        for (t, m) in left.into_iter().chain(right) {
            slots.push((t, p));
            p += m as usize;
        }
    }
    let start = |j: usize, t: usize| -> usize {
        slot_start[j - 1].iter().find(|s| s.0 == t).map(|s| s.1).expect("slot exists")
    };
    let mut pairs = Vec::new();
    for &(a, b, m) in &omega.links {
        let pa = start(a, b);
        let pb = start(b, a);
        for i in 0..m as usize {
            pairs.push((pa + i, pb + m as usize - 1 - i));
        }
    }
    LinkPattern::new(pairs).expect("collapse of a planar valenced pattern is planar")
}

/// The valenced pattern obtained from `alpha` by merging consecutive unit
/// points into blocks of the given sizes. Fails if a link lies inside a block.
pub fn merge_blocks(alpha: &LinkPattern, sizes: &[u32]) -> Result<ValencedLinkPattern> {
    let total: u32 = sizes.iter().sum();
    if total as usize != alpha.n_points() {
        return Err(Error::Domain("block sizes do not cover the pattern".into()));
    }
    let mut block_of = Vec::with_capacity(total as usize + 1);
    block_of.push(0);
    for (j, &s) in sizes.iter().enumerate() {
        block_of.extend(std::iter::repeat_n(j + 1, s as usize));
    }
    let mut links = Vec::new();
    for &(a, b) in &alpha.links {
        let (ba, bb) = (block_of[a], block_of[b]);
        if ba == bb {
            return Err(Error::Domain(format!("link {{{a},{b}}} lies inside block {ba}")));
        }
        links.push((ba, bb, 1));
    }
    ValencedLinkPattern::new(sizes.to_vec(), links)
}
