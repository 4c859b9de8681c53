use alloc::vec::Vec;

use super::IntervalMoments;
use crate::linalg::{symmetric_eigen, Matrix};
use crate::{Error, Result};

/// Largest `N1 + N2` the dense representation accepts.
pub const MAX_DENSE_DIM: usize = 4000;

/// `theta_hat = xi' A xi` with `xi ~ N(0, Sigma)`, where `xi` stacks the
/// increments of the first series over `I^1..I^N1` and then those of the
/// second series over `J^1..J^N2`.
#[derive(Debug, Clone)]
pub struct GaussianQuadForm {
    pub a: Matrix,
    pub sigma: Matrix,
    pub n1: usize,
    pub n2: usize,
}

impl GaussianQuadForm {
    pub fn new(m: &IntervalMoments) -> Result<Self> {
        let (n1, n2) = (m.n1(), m.n2());
        let n = n1 + n2;
        if n > MAX_DENSE_DIM {
            return Err(Error::Unsupported(alloc::format!(
                "dense quadratic form of dimension {n} exceeds {MAX_DENSE_DIM}"
            )));
        }
        let mut a = Matrix::zeros(n);
        let mut sigma = Matrix::zeros(n);
        for i in 0..n1 {
            sigma[(i, i)] = m.v1_i[i];
            for (j, &c) in m.index.j_range(i).zip(m.cross_row(i)) {
                a[(i, n1 + j)] = 0.5;
                a[(n1 + j, i)] = 0.5;
                sigma[(i, n1 + j)] = c;
                sigma[(n1 + j, i)] = c;
            }
        }
        for j in 0..n2 {
            sigma[(n1 + j, n1 + j)] = m.v2_j[j];
        }
        Ok(Self { a, sigma, n1, n2 })
    }

    pub fn dim(&self) -> usize {
        self.n1 + self.n2
    }

    /// `tr[(Sigma A)^k]`: direct products for `k <= 4`, eigenvalues beyond.
    pub fn mu_k_trace(&self, k: u32) -> Result<f64> {
        let m = self.sigma.mul(&self.a);
        match k {
            0 => Err(Error::Domain("the trace power k must be at least 1".into())),
            1 => Ok(m.trace()),
            2 => Ok(m.trace_of_product(&m)),
            3 => Ok(m.mul(&m).trace_of_product(&m)),
            4 => {
                let m2 = m.mul(&m);
                Ok(m2.trace_of_product(&m2))
            }
            _ => Ok(self.eigenvalues()?.iter().map(|&l| super::ipow(l, k)).sum()),
        }
    }

    /// Eigenvalues of `Sigma^{1/2} A Sigma^{1/2}` (those of `Sigma A`), ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let eig = symmetric_eigen(&self.sigma, true)?;
        let v = eig.vectors.expect("vectors requested");
        let mut root = Matrix::zeros(n);
        // Sigma^{1/2} = V diag(sqrt(max(d, 0))) V'
        let scaled: Vec<f64> = eig.values.iter().map(|&d| libm::sqrt(d.max(0.0))).collect();
        for r in 0..n {
            for c in 0..=r {
                let s: f64 = (0..n).map(|k| v[(r, k)] * scaled[k] * v[(c, k)]).sum();
                root[(r, c)] = s;
                root[(c, r)] = s;
            }
        }
        let mut b = root.mul(&self.a).mul(&root);
        // symmetrize rounding noise
        for r in 0..n {
            for c in 0..r {
                let s = 0.5 * (b[(r, c)] + b[(c, r)]);
                b[(r, c)] = s;
                b[(c, r)] = s;
            }
        }
        Ok(symmetric_eigen(&b, false)?.values)
    }
}
