//! Seeded random inputs for property suites.

use std::f64::consts::PI;

use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cone::{sigma1, sigma2_of_eigenvalues};
use crate::endo::SymEndo4;
use crate::error::Result;
use crate::geometry::ReducedField;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Symmetric matrix with independent N(0, scale²) entries on and above the diagonal.
pub fn random_symmetric(rng: &mut impl Rng, scale: f64) -> SymEndo4 {
    let mut m = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            let x = scale * normal(rng);
            m[i][j] = x;
            m[j][i] = x;
        }
    }
    SymEndo4::symmetrized(m)
}

/// Haar-ish orthogonal matrix from the QR factor of a Gaussian matrix.
pub fn random_orthogonal(rng: &mut impl Rng) -> [[f64; 4]; 4] {
    let g = Matrix4::from_fn(|_, _| normal(rng));
    let q = g.qr().q();
    std::array::from_fn(|i| std::array::from_fn(|j| q[(i, j)]))
}

/// Eigenvalues in Γ₂⁺ by rejection from N(1, 1), possibly with negative entries.
pub fn random_cone_eigenvalues(rng: &mut impl Rng) -> [f64; 4] {
    loop {
        let l: [f64; 4] = std::array::from_fn(|_| 1.0 + normal(rng));
        let s1: f64 = l.iter().sum();
        if s1 > 1e-3 && sigma2_of_eigenvalues(&l) > 1e-3 {
            return l;
        }
    }
}

/// A random element of Γ₂⁺ in a random orthonormal frame.
pub fn random_cone_element(rng: &mut impl Rng) -> SymEndo4 {
    let q = random_orthogonal(rng);
    SymEndo4::from_diag(random_cone_eigenvalues(rng)).conjugate(&q)
}

/// Random element with σ₁ scaled to 1, for tests insensitive to overall size.
pub fn random_normalized_cone_element(rng: &mut impl Rng) -> SymEndo4 {
    let a = random_cone_element(rng);
    a * (1.0 / sigma1(&a))
}

/// Σ_{k=1}^{modes} (a_k cos(2πkθ/L) + b_k sin(2πkθ/L)) with a_k, b_k ~ N(0, (amplitude/k²)²),
/// plus a constant offset.
pub fn random_band_limited(
    rng: &mut impl Rng,
    n: usize,
    period: f64,
    modes: usize,
    amplitude: f64,
    offset: f64,
) -> Result<ReducedField> {
    let coeffs: Vec<(f64, f64)> = (1..=modes)
        .map(|k| {
            let s = amplitude / (k * k) as f64;
            (s * normal(rng), s * normal(rng))
        })
        .collect();
    ReducedField::from_fn(n, period, |x| {
        offset
            + coeffs
                .iter()
                .enumerate()
                .map(|(k, (a, b))| {
                    let arg = 2.0 * PI * (k + 1) as f64 * x / period;
                    a * arg.cos() + b * arg.sin()
                })
                .sum::<f64>()
    })
}
