//! Dense symmetric eigenvalues by cyclic Jacobi rotations.

use crate::error::{Error, Result};

pub const EIGEN_TOLERANCE: f64 = 1e-10;
pub const MAX_SWEEPS: usize = 100;

/// Row-major dense symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    a: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix { n, a: vec![0.0; n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
        self.a[j * self.n + i] = v;
    }

    pub fn add_diag(&mut self, i: usize, v: f64) {
        self.a[i * self.n + i] += v;
    }

    fn off_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                let x = self.a[i * self.n + j];
                s += x * x;
            }
        }
        (2.0 * s).sqrt()
    }

    /// Eigenvalues in ascending order. `name` labels the matrix in the
    /// non-convergence error.
    pub fn eigenvalues(&self, name: &'static str) -> Result<Vec<f64>> {
        jacobi_eigenvalues(self.clone(), name, EIGEN_TOLERANCE, MAX_SWEEPS)
    }
}

pub fn jacobi_eigenvalues(
    mut m: SymMatrix,
    name: &'static str,
    tol: f64,
    max_sweeps: usize,
) -> Result<Vec<f64>> {
    let n = m.n;
    let mut sweeps = 0;
    while m.off_norm() >= tol {
        if sweeps == max_sweeps {
            return Err(Error::NoConvergence { matrix: name, sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m.a[p * n + p];
                let aqq = m.a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                m.a[p * n + p] = app - t * apq;
                m.a[q * n + q] = aqq + t * apq;
                m.a[p * n + q] = 0.0;
                m.a[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = m.a[r * n + p];
                    let arq = m.a[r * n + q];
                    let np = c * arp - s * arq;
                    let nq = s * arp + c * arq;
                    m.a[r * n + p] = np;
                    m.a[p * n + r] = np;
                    m.a[r * n + q] = nq;
                    m.a[q * n + r] = nq;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m.a[i * n + i]).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}
