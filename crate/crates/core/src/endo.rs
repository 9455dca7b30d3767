//! Symmetric endomorphisms of a 4-dimensional inner-product space.
//!
//! Entries are expressed in an orthonormal frame, so the endomorphism and its
//! matrix coincide. The eigensolver is a cyclic Jacobi sweep, which is exact
//! enough at this fixed size to serve as the definiteness test for the cone
//! algebra.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Off-diagonal convergence threshold for the Jacobi sweep, relative to the
/// Frobenius norm of the input.
pub const JACOBI_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymEndo4 {
    entries: [[f64; 4]; 4],
}

impl SymEndo4 {
    /// Builds an endomorphism from a full array, rejecting asymmetric input.
    pub fn new(entries: [[f64; 4]; 4]) -> Result<Self> {
        for i in 0..4 {
            for j in (i + 1)..4 {
                if entries[i][j] != entries[j][i] {
                    return Err(Error::InvalidInput(format!(
                        "entries[{i}][{j}] = {} differs from entries[{j}][{i}] = {}",
                        entries[i][j], entries[j][i]
                    )));
                }
            }
        }
        Ok(Self { entries })
    }

    /// Symmetrizes an arbitrary array as ½(M + Mᵀ).
    pub fn symmetrized(m: [[f64; 4]; 4]) -> Self {
        let mut entries = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                entries[i][j] = 0.5 * (m[i][j] + m[j][i]);
            }
        }
        Self { entries }
    }

    pub fn from_diag(d: [f64; 4]) -> Self {
        let mut entries = [[0.0; 4]; 4];
        for (i, v) in d.into_iter().enumerate() {
            entries[i][i] = v;
        }
        Self { entries }
    }

    pub fn identity() -> Self {
        Self::from_diag([1.0; 4])
    }

    pub fn zero() -> Self {
        Self {
            entries: [[0.0; 4]; 4],
        }
    }

    pub fn scalar(c: f64) -> Self {
        Self::from_diag([c; 4])
    }

    pub fn entries(&self) -> &[[f64; 4]; 4] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    pub fn diag(&self) -> [f64; 4] {
        std::array::from_fn(|i| self.entries[i][i])
    }

    pub fn trace(&self) -> f64 {
        self.entries[0][0] + self.entries[1][1] + self.entries[2][2] + self.entries[3][3]
    }

    /// tr(A²) = Σᵢⱼ Aᵢⱼ², the squared Frobenius norm for symmetric A.
    pub fn trace_of_square(&self) -> f64 {
        self.entries.iter().flatten().map(|x| x * x).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.trace_of_square().sqrt()
    }

    /// Part of A orthogonal to the identity.
    pub fn trace_free(&self) -> Self {
        *self - Self::scalar(0.25 * self.trace())
    }

    /// Qᵀ A Q for an arbitrary 4×4 matrix Q (orthogonal Q gives a change of frame).
    pub fn conjugate(&self, q: &[[f64; 4]; 4]) -> Self {
        let mut aq = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                aq[i][j] = (0..4).map(|k| self.entries[i][k] * q[k][j]).sum();
            }
        }
        let mut out = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = (0..4).map(|k| q[k][i] * aq[k][j]).sum();
            }
        }
        Self::symmetrized(out)
    }

    /// Eigenvalues in nondecreasing order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut a = self.entries;
        let scale = self.frobenius_norm();
        if scale == 0.0 {
            return [0.0; 4];
        }
        let threshold = JACOBI_TOL * scale;
        for _ in 0..JACOBI_MAX_SWEEPS {
            let off: f64 = (0..4)
                .flat_map(|i| ((i + 1)..4).map(move |j| (i, j)))
                .map(|(i, j)| a[i][j] * a[i][j])
                .sum::<f64>()
                .sqrt();
            if off <= threshold {
                break;
            }
            for p in 0..3 {
                for q in (p + 1)..4 {
                    jacobi_rotate(&mut a, p, q);
                }
            }
        }
        let mut eig = [a[0][0], a[1][1], a[2][2], a[3][3]];
        eig.sort_by(f64::total_cmp);
        eig
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.min_eigenvalue() > 0.0
    }
}

fn jacobi_rotate(a: &mut [[f64; 4]; 4], p: usize, q: usize) {
    let apq = a[p][q];
    if apq == 0.0 {
        return;
    }
    let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    for k in 0..4 {
        let akp = a[k][p];
        let akq = a[k][q];
        a[k][p] = c * akp - s * akq;
        a[k][q] = s * akp + c * akq;
    }
    for k in 0..4 {
        let apk = a[p][k];
        let aqk = a[q][k];
        a[p][k] = c * apk - s * aqk;
        a[q][k] = s * apk + c * aqk;
    }
    a[p][q] = 0.0;
    a[q][p] = 0.0;
}

impl Add for SymEndo4 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self.entries;
        for (row, r) in out.iter_mut().zip(rhs.entries.iter()) {
            for (x, y) in row.iter_mut().zip(r.iter()) {
                *x += y;
            }
        }
        Self { entries: out }
    }
}

impl Sub for SymEndo4 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for SymEndo4 {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Mul<f64> for SymEndo4 {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        let mut out = self.entries;
        out.iter_mut().flatten().for_each(|x| *x *= c);
        Self { entries: out }
    }
}

impl Mul<SymEndo4> for f64 {
    type Output = SymEndo4;
    fn mul(self, a: SymEndo4) -> SymEndo4 {
        a * self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric() {
        let mut m = [[0.0; 4]; 4];
        m[0][1] = 1.0;
        assert!(SymEndo4::new(m).is_err());
        m[1][0] = 1.0;
        assert!(SymEndo4::new(m).is_ok());
    }

    #[test]
    fn diagonal_eigenvalues_are_sorted() {
        let a = SymEndo4::from_diag([3.0, -1.0, 2.0, 0.5]);
        assert_eq!(a.eigenvalues(), [-1.0, 0.5, 2.0, 3.0]);
    }

    #[test]
    fn dense_eigenvalues_match_trace_and_frobenius() {
        let a = SymEndo4::new([
            [4.0, 1.0, -2.0, 2.0],
            [1.0, 2.0, 0.0, 1.0],
            [-2.0, 0.0, 3.0, -2.0],
            [2.0, 1.0, -2.0, -1.0],
        ])
        .unwrap();
        let e = a.eigenvalues();
        let sum: f64 = e.iter().sum();
        let sq: f64 = e.iter().map(|x| x * x).sum();
        assert!((sum - a.trace()).abs() < 1e-12);
        assert!((sq - a.trace_of_square()).abs() < 1e-10);
        assert!(e.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rank_one_has_single_nonzero_eigenvalue() {
        let v = [1.0, 2.0, -1.0, 0.5];
        let mut m = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = v[i] * v[j];
            }
        }
        let e = SymEndo4::new(m).unwrap().eigenvalues();
        let norm2: f64 = v.iter().map(|x| x * x).sum();
        assert!((e[3] - norm2).abs() < 1e-12);
        for x in &e[..3] {
            assert!(x.abs() < 1e-12);
        }
    }
}
