//! Sampling partitions, their overlap structure and the coarsening used to
//! bound the eigenvalues of the quadratic form.

use alloc::vec::Vec;
use core::ops::Range;

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::rng::{stream, Stream};
use crate::Result;

/// Breakpoints `0 = t_0 < t_1 < ... < t_N = T`; interval `k` is `(t_k, t_{k+1}]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Partition {
    points: Vec<f64>,
}

impl TryFrom<Vec<f64>> for Partition {
    type Error = crate::Error;
    fn try_from(points: Vec<f64>) -> Result<Self> {
        Partition::new(points)
    }
}

impl From<Partition> for Vec<f64> {
    fn from(p: Partition) -> Self {
        p.points
    }
}

impl Partition {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid!("a partition needs at least two breakpoints"));
        }
        if points[0] != 0.0 {
            return Err(invalid!("a partition must start at 0, got {}", points[0]));
        }
        let last = points[points.len() - 1];
        if !last.is_finite() {
            return Err(invalid!("partition end point must be finite"));
        }
        if let Some(w) = points.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(invalid!(
                "breakpoints must be strictly increasing, got {} then {}",
                w[0],
                w[1]
            ));
        }
        Ok(Self { points })
    }

    /// `n` equal intervals of `[0, horizon]`.
    pub fn uniform(n: usize, horizon: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid!("a uniform partition needs at least one interval"));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid!(
                "horizon must be positive and finite, got {horizon}"
            ));
        }
        let mut points: Vec<f64> = (0..n).map(|k| horizon * k as f64 / n as f64).collect();
        points.push(horizon);
        Ok(Self { points })
    }

    /// Jump times of a homogeneous Poisson process of the given rate on
    /// `(0, horizon)`, plus the end points.
    pub fn poisson<R: Rng + ?Sized>(rate: f64, horizon: f64, rng: &mut R) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(invalid!(
                "Poisson rate must be positive and finite, got {rate}"
            ));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid!(
                "horizon must be positive and finite, got {horizon}"
            ));
        }
        let mut points = Vec::with_capacity((rate * horizon * 1.1) as usize + 8);
        points.push(0.0);
        let mut t = 0.0;
        loop {
            let e: f64 = rng.sample(Exp1);
            t += e / rate;
            if t >= horizon {
                break;
            }
            // an arrival can round onto the previous one at extreme rates
            if t > points[points.len() - 1] {
                points.push(t);
            }
        }
        points.push(horizon);
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of intervals.
    pub fn len(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn horizon(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    #[inline]
    pub fn interval(&self, k: usize) -> (f64, f64) {
        (self.points[k], self.points[k + 1])
    }

    pub fn intervals(&self) -> impl ExactSizeIterator<Item = (f64, f64)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn max_len(&self) -> f64 {
        self.intervals().fold(0.0, |m, (a, b)| m.max(b - a))
    }

    /// Indices of the intervals of `self` meeting `(a, b]`.
    pub fn overlapping(&self, a: f64, b: f64) -> Range<usize> {
        let n = self.len();
        let lo = self.points[1..].partition_point(|&d| d <= a);
        let hi = self.points[..n].partition_point(|&c| c < b);
        lo..hi.max(lo)
    }
}

/// A pair of partitions of the same `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SchemeDef", into = "SchemeDef")]
pub struct SamplingScheme {
    pi1: Partition,
    pi2: Partition,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeDef {
    pi1: Partition,
    pi2: Partition,
}

impl TryFrom<SchemeDef> for SamplingScheme {
    type Error = crate::Error;
    fn try_from(d: SchemeDef) -> Result<Self> {
        SamplingScheme::new(d.pi1, d.pi2)
    }
}

impl From<SamplingScheme> for SchemeDef {
    fn from(s: SamplingScheme) -> Self {
        SchemeDef {
            pi1: s.pi1,
            pi2: s.pi2,
        }
    }
}

impl SamplingScheme {
    pub fn new(pi1: Partition, pi2: Partition) -> Result<Self> {
        if pi1.horizon() != pi2.horizon() {
            return Err(invalid!(
                "partitions end at different times: {} vs {}",
                pi1.horizon(),
                pi2.horizon()
            ));
        }
        Ok(Self { pi1, pi2 })
    }

    /// Both series observed on the same partition.
    pub fn synchronous(pi: Partition) -> Self {
        Self {
            pi1: pi.clone(),
            pi2: pi,
        }
    }

    /// Independent Poisson arrivals with intensities `n p1` and `n p2`.
    pub fn poisson(n: u64, p1: f64, p2: f64, horizon: f64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(invalid!("the rate multiplier n must be at least 1"));
        }
        let pi1 = Partition::poisson(n as f64 * p1, horizon, &mut stream(seed, Stream::FirstGrid))?;
        let pi2 = Partition::poisson(
            n as f64 * p2,
            horizon,
            &mut stream(seed, Stream::SecondGrid),
        )?;
        Ok(Self { pi1, pi2 })
    }

    pub fn pi1(&self) -> &Partition {
        &self.pi1
    }
    pub fn pi2(&self) -> &Partition {
        &self.pi2
    }
    pub fn horizon(&self) -> f64 {
        self.pi1.horizon()
    }

    /// Largest interval length over both partitions.
    pub fn mesh(&self) -> f64 {
        self.pi1.max_len().max(self.pi2.max_len())
    }

    pub fn overlaps(&self) -> OverlapIndex {
        OverlapIndex::new(self)
    }

    pub fn swapped(&self) -> Self {
        Self {
            pi1: self.pi2.clone(),
            pi2: self.pi1.clone(),
        }
    }

    /// Merges runs of consecutive intervals of one partition that lie inside a
    /// single interval of the other (each side judged against the original
    /// scheme). Afterwards no interval of either partition meets more than
    /// three intervals of the other, the mesh is unchanged and the estimator
    /// takes the same value.
    pub fn refine(&self) -> Self {
        let idx = self.overlaps();
        let pi1 = coarsen(&self.pi1, |i| idx.j_range(i));
        let pi2 = coarsen(&self.pi2, |j| idx.i_range(j));
        Self { pi1, pi2 }
    }

    /// Union of both breakpoint sets, with each partition's positions in it.
    pub fn merged_grid(&self) -> MergedGrid {
        MergedGrid::new(self)
    }
}

fn coarsen(p: &Partition, partners: impl Fn(usize) -> Range<usize>) -> Partition {
    let pts = p.points();
    let mut out = Vec::with_capacity(pts.len());
    out.push(pts[0]);
    for (k, &t) in pts.iter().enumerate().take(p.len()).skip(1) {
        let left = partners(k - 1);
        let right = partners(k);
        let inside_same = left.len() == 1 && left == right;
        if !inside_same {
            out.push(t);
        }
    }
    out.push(pts[pts.len() - 1]);
    Partition { points: out }
}

/// For each interval of one partition, the contiguous range of intervals of
/// the other partition it meets (half-open intervals, `(a,b]` meets `(c,d]`
/// iff `a < d` and `c < b`).
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapIndex {
    j_lo: Vec<u32>,
    j_hi: Vec<u32>,
    i_lo: Vec<u32>,
    i_hi: Vec<u32>,
    count: usize,
}

impl OverlapIndex {
    pub fn new(scheme: &SamplingScheme) -> Self {
        let (p1, p2) = (&scheme.pi1, &scheme.pi2);
        let mut j_lo = Vec::with_capacity(p1.len());
        let mut j_hi = Vec::with_capacity(p1.len());
        let mut count = 0;
        for (a, b) in p1.intervals() {
            let r = p2.overlapping(a, b);
            count += r.len();
            j_lo.push(r.start as u32);
            j_hi.push(r.end as u32);
        }
        let mut i_lo = Vec::with_capacity(p2.len());
        let mut i_hi = Vec::with_capacity(p2.len());
        for (c, d) in p2.intervals() {
            let r = p1.overlapping(c, d);
            i_lo.push(r.start as u32);
            i_hi.push(r.end as u32);
        }
        Self {
            j_lo,
            j_hi,
            i_lo,
            i_hi,
            count,
        }
    }

    pub fn n1(&self) -> usize {
        self.j_lo.len()
    }
    pub fn n2(&self) -> usize {
        self.i_lo.len()
    }

    /// Intervals `J` meeting `I^i`.
    #[inline]
    pub fn j_range(&self, i: usize) -> Range<usize> {
        self.j_lo[i] as usize..self.j_hi[i] as usize
    }

    /// Intervals `I` meeting `J^j`.
    #[inline]
    pub fn i_range(&self, j: usize) -> Range<usize> {
        self.i_lo[j] as usize..self.i_hi[j] as usize
    }

    /// `K(i, j) = 1(I^i meets J^j)`.
    #[inline]
    pub fn k(&self, i: usize, j: usize) -> bool {
        self.j_range(i).contains(&j)
    }

    /// Number of overlapping pairs.
    pub fn count(&self) -> usize {
        self.count
    }

    /// `max_J sum_I K` and `max_I sum_J K`.
    pub fn max_fanout(&self) -> (usize, usize) {
        let over_i = (0..self.n1())
            .map(|i| self.j_range(i).len())
            .max()
            .unwrap_or(0);
        let over_j = (0..self.n2())
            .map(|j| self.i_range(j).len())
            .max()
            .unwrap_or(0);
        (over_j, over_i)
    }

    /// Iterates all overlapping pairs `(i, j)` ordered by `i` then `j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n1()).flat_map(move |i| self.j_range(i).map(move |j| (i, j)))
    }
}

/// Sorted union of the breakpoints of both partitions.
#[derive(Debug, Clone, PartialEq)]
pub struct MergedGrid {
    points: Vec<f64>,
    pos1: Vec<usize>,
    pos2: Vec<usize>,
}

impl MergedGrid {
    fn new(scheme: &SamplingScheme) -> Self {
        let a = scheme.pi1.points();
        let b = scheme.pi2.points();
        let mut points = Vec::with_capacity(a.len() + b.len());
        let mut pos1 = Vec::with_capacity(a.len());
        let mut pos2 = Vec::with_capacity(b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) => x.min(y),
                (Some(&x), None) => x,
                (None, Some(&y)) => y,
                (None, None) => unreachable!(),
            };
            let k = points.len();
            points.push(next);
            if a.get(i) == Some(&next) {
                pos1.push(k);
                i += 1;
            }
            if b.get(j) == Some(&next) {
                pos2.push(k);
                j += 1;
            }
        }
        Self { points, pos1, pos2 }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of merged cells.
    pub fn cells(&self) -> usize {
        self.points.len() - 1
    }

    /// Positions of the first partition's breakpoints in the merged grid.
    pub fn positions1(&self) -> &[usize] {
        &self.pos1
    }

    pub fn positions2(&self) -> &[usize] {
        &self.pos2
    }
}
