use alloc::vec::Vec;

use crate::error::invalid;
use crate::model::{Integrand, ModelSpec};
use crate::sampling::{OverlapIndex, SamplingScheme};
use crate::Result;

/// The integrated quantities every cumulant engine consumes: `v`, `v1` on the
/// intervals of the first partition, `v`, `v2` on the second, and `v(I ∩ J)`
/// for each overlapping pair (ordered as [`OverlapIndex::pairs`]).
#[derive(Debug, Clone)]
pub struct IntervalMoments {
    pub index: OverlapIndex,
    pub v_i: Vec<f64>,
    pub v1_i: Vec<f64>,
    pub v_j: Vec<f64>,
    pub v2_j: Vec<f64>,
    cross: Vec<f64>,
    offsets: Vec<usize>,
}

impl IntervalMoments {
    pub fn new(model: &ModelSpec, scheme: &SamplingScheme) -> Result<Self> {
        if scheme.horizon() != model.horizon() {
            return Err(invalid!(
                "scheme ends at {} but the model horizon is {}",
                scheme.horizon(),
                model.horizon()
            ));
        }
        let index = scheme.overlaps();
        let (p1, p2) = (scheme.pi1(), scheme.pi2());
        let mut v_i = Vec::with_capacity(p1.len());
        let mut v1_i = Vec::with_capacity(p1.len());
        for (a, b) in p1.intervals() {
            v_i.push(model.integral(Integrand::Cross, a, b));
            v1_i.push(model.integral(Integrand::Var1, a, b));
        }
        let mut v_j = Vec::with_capacity(p2.len());
        let mut v2_j = Vec::with_capacity(p2.len());
        for (c, d) in p2.intervals() {
            v_j.push(model.integral(Integrand::Cross, c, d));
            v2_j.push(model.integral(Integrand::Var2, c, d));
        }
        let mut cross = Vec::with_capacity(index.count());
        let mut offsets = Vec::with_capacity(p1.len() + 1);
        for i in 0..p1.len() {
            offsets.push(cross.len());
            let (a, b) = p1.interval(i);
            for j in index.j_range(i) {
                let (c, d) = p2.interval(j);
                cross.push(model.integral(Integrand::Cross, a.max(c), b.min(d)));
            }
        }
        offsets.push(cross.len());
        Ok(Self {
            index,
            v_i,
            v1_i,
            v_j,
            v2_j,
            cross,
            offsets,
        })
    }

    pub fn n1(&self) -> usize {
        self.v_i.len()
    }

    pub fn n2(&self) -> usize {
        self.v_j.len()
    }

    /// `v(I^i ∩ J^j)`, zero when the intervals do not meet.
    #[inline]
    pub fn cross(&self, i: usize, j: usize) -> f64 {
        let r = self.index.j_range(i);
        if r.contains(&j) {
            self.cross[self.offsets[i] + (j - r.start)]
        } else {
            0.0
        }
    }

    /// `v(I^i ∩ J^j)` for the `j` meeting `I^i`, in increasing `j`.
    #[inline]
    pub fn cross_row(&self, i: usize) -> &[f64] {
        &self.cross[self.offsets[i]..self.offsets[i + 1]]
    }
}
