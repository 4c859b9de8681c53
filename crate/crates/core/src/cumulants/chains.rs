//! `mu_2` and `mu_3` as sums over cyclic chains of overlapping intervals
//! `I^{i_1} ~ J^{j_1} ~ I^{i_2} ~ ... ~ J^{j_k} ~ I^{i_1}`.

use core::ops::Range;

use super::IntervalMoments;
use crate::estimator::CompensatedSum;

fn intersect(a: Range<usize>, b: Range<usize>) -> Range<usize> {
    a.start.max(b.start)..a.end.min(b.end)
}

pub fn mu2_chains(m: &IntervalMoments) -> f64 {
    let idx = &m.index;
    let mut pure = CompensatedSum::default();
    let mut single = CompensatedSum::default();
    for i1 in 0..m.n1() {
        let closing = idx.j_range(i1);
        for j1 in idx.j_range(i1) {
            single.add(m.v1_i[i1] * m.v2_j[j1]);
            let c11 = m.cross(i1, j1);
            for i2 in idx.i_range(j1) {
                for j2 in intersect(idx.j_range(i2), closing.clone()) {
                    pure.add(c11 * m.cross(i2, j2));
                }
            }
        }
    }
    0.5 * (pure.value() + single.value())
}

pub fn mu3_chains(m: &IntervalMoments) -> f64 {
    let idx = &m.index;
    let mut pure = CompensatedSum::default();
    let mut mixed = CompensatedSum::default();
    for i1 in 0..m.n1() {
        let closing = idx.j_range(i1);
        for j1 in idx.j_range(i1) {
            let c11 = m.cross(i1, j1);
            let w = m.v1_i[i1] * m.v2_j[j1];
            for i2 in idx.i_range(j1) {
                for j2 in idx.j_range(i2) {
                    let c22 = m.cross(i2, j2);
                    if closing.contains(&j2) {
                        mixed.add(w * c22);
                    }
                    let c = c11 * c22;
                    for i3 in idx.i_range(j2) {
                        for j3 in intersect(idx.j_range(i3), closing.clone()) {
                            pure.add(c * m.cross(i3, j3));
                        }
                    }
                }
            }
        }
    }
    0.25 * pure.value() + 0.75 * mixed.value()
}
