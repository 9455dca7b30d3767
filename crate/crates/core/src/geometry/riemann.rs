//! Full curvature tensors in an orthonormal frame and the Weyl part of the
//! standard four-dimensional decomposition Rm = W + A¹ ⊙ g.

use crate::endo::SymEndo4;

/// Riemann tensor R_{ijkl} with the sign convention R_{1212} = sectional curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannTensor {
    r: [[[[f64; 4]; 4]; 4]; 4],
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

impl RiemannTensor {
    pub fn flat() -> Self {
        Self {
            r: [[[[0.0; 4]; 4]; 4]; 4],
        }
    }

    /// Adds a constant-curvature factor spanning the given frame indices.
    pub fn with_block(mut self, indices: &[usize], curvature: f64) -> Self {
        for &i in indices {
            for &j in indices {
                for &k in indices {
                    for &l in indices {
                        self.r[i][j][k][l] +=
                            curvature * (delta(i, k) * delta(j, l) - delta(i, l) * delta(j, k));
                    }
                }
            }
        }
        self
    }

    pub fn component(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.r[i][j][k][l]
    }

    /// Ric_{jl} = Σᵢ R_{ijil}.
    pub fn ricci(&self) -> SymEndo4 {
        let mut m = [[0.0; 4]; 4];
        for j in 0..4 {
            for l in 0..4 {
                m[j][l] = (0..4).map(|i| self.r[i][j][i][l]).sum();
            }
        }
        SymEndo4::symmetrized(m)
    }

    pub fn scalar(&self) -> f64 {
        self.ricci().trace()
    }

    /// W = Rm − A¹ ⊙ g, with ⊙ the Kulkarni–Nomizu product.
    pub fn weyl(&self) -> [[[[f64; 4]; 4]; 4]; 4] {
        let ric = self.ricci();
        let a = (ric - SymEndo4::scalar(ric.trace() / 6.0)) * 0.5;
        let mut w = self.r;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let kn = a.get(i, k) * delta(j, l) + a.get(j, l) * delta(i, k)
                            - a.get(i, l) * delta(j, k)
                            - a.get(j, k) * delta(i, l);
                        w[i][j][k][l] -= kn;
                    }
                }
            }
        }
        w
    }

    /// Pointwise |W|² normalized as ¼ Σ W_{ijkl}², the normalization under
    /// which 8π²χ = ∫|W|² + ∫(−½|Ric|² + R²/6).
    pub fn weyl_norm_sq(&self) -> f64 {
        let w = self.weyl();
        0.25 * w.iter().flatten().flatten().flatten().map(|x| x * x).sum::<f64>()
    }
}
