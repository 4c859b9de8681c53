//! `mu_2` and `mu_3` as sums over single intervals and overlapping pairs.

use super::IntervalMoments;
use crate::estimator::CompensatedSum;

pub fn mu2_intervals(m: &IntervalMoments) -> f64 {
    let mut s = CompensatedSum::default();
    for i in 0..m.n1() {
        s.add(m.v_i[i] * m.v_i[i]);
        for (j, &c) in m.index.j_range(i).zip(m.cross_row(i)) {
            s.add(m.v1_i[i] * m.v2_j[j]);
            s.add(-c * c);
        }
    }
    for &v in &m.v_j {
        s.add(v * v);
    }
    0.5 * s.value()
}

pub fn mu3_intervals(m: &IntervalMoments) -> f64 {
    let mut s = CompensatedSum::default();
    for i in 0..m.n1() {
        let vi = m.v_i[i];
        s.add(vi * vi * vi);
        for (j, &c) in m.index.j_range(i).zip(m.cross_row(i)) {
            let vj = m.v_j[j];
            let union = vi + vj - c;
            s.add(2.0 * c * c * c);
            s.add(3.0 * m.v1_i[i] * m.v2_j[j] * union);
            s.add(-3.0 * (c * c * (vi + vj) - c * vi * vj));
        }
    }
    for &v in &m.v_j {
        s.add(v * v * v);
    }
    0.25 * s.value()
}
