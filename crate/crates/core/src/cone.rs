//! Elementary symmetric functions of symmetric 4×4 endomorphisms and the
//! positive cone Γ₂⁺ = {σ₁ > 0, σ₂ > 0}.
//!
//! σ₂ is evaluated from traces, ½(σ₁² − tr A²), so cone membership never
//! depends on eigensolver noise. Eigenvalues are only used where positive
//! definiteness is asserted.

use serde::{Deserialize, Serialize};

use crate::endo::SymEndo4;
use crate::error::{Error, Result};

/// Cone membership verdict; `margin = min(σ₁, σ₂)` gauges distance to the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeVerdict {
    pub sigma1: f64,
    pub sigma2: f64,
    pub in_gamma2_plus: bool,
    pub margin: f64,
}

impl ConeVerdict {
    /// Verdict for an endomorphism known only through (σ₁, σ₂).
    pub fn from_sigmas(sigma1: f64, sigma2: f64) -> Self {
        Self {
            sigma1,
            sigma2,
            in_gamma2_plus: sigma1 > 0.0 && sigma2 > 0.0,
            margin: sigma1.min(sigma2),
        }
    }
}

pub fn sigma1(a: &SymEndo4) -> f64 {
    a.trace()
}

pub fn sigma2(a: &SymEndo4) -> f64 {
    let s1 = a.trace();
    0.5 * (s1 * s1 - a.trace_of_square())
}

/// σ₂ of an eigenvalue quadruple as the explicit sum over pairs.
pub fn sigma2_of_eigenvalues(lambda: &[f64; 4]) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            s += lambda[i] * lambda[j];
        }
    }
    s
}

pub fn cone_check(a: &SymEndo4) -> ConeVerdict {
    ConeVerdict::from_sigmas(sigma1(a), sigma2(a))
}

/// First Newton transformation T₁(A) = σ₁(A)·I − A.
pub fn newton_transform(a: &SymEndo4) -> SymEndo4 {
    SymEndo4::scalar(sigma1(a)) - *a
}

/// Lᵗ(A) = T₁(A) + ((1−t)/2)·σ₁(T₁(A))·I, the principal coefficient of the
/// linearized σ₂ equation.
pub fn l_operator(a: &SymEndo4, t: f64) -> SymEndo4 {
    let t1 = newton_transform(a);
    t1 + SymEndo4::scalar(0.5 * (1.0 - t) * t1.trace())
}

/// Keeps the pure-trace part of A and flips its trace-free part.
pub fn hat_reflection(a: &SymEndo4) -> SymEndo4 {
    let pure = SymEndo4::scalar(0.25 * sigma1(a));
    -(*a - pure) + pure
}

/// Aᵗ = A¹ + ((1−t)/2)·σ₁(A¹)·I.
pub fn t_shift(a1: &SymEndo4, t: f64) -> SymEndo4 {
    *a1 + SymEndo4::scalar(0.5 * (1.0 - t) * sigma1(a1))
}

/// Right-hand side of the shift identity σ₂(Aᵗ) = σ₂(A¹) + (3/2)(1−t)(2−t)σ₁(A¹)².
pub fn shifted_sigma2(a1: &SymEndo4, t: f64) -> f64 {
    let s1 = sigma1(a1);
    sigma2(a1) + 1.5 * (1.0 - t) * (2.0 - t) * s1 * s1
}

/// Gårding gap σ₂((1−s)A + sB)^{1/2} − (1−s)σ₂(A)^{1/2} − sσ₂(B)^{1/2}.
///
/// Only defined for A, B ∈ Γ₂⁺ and s ∈ [0, 1]; the result is nonnegative up
/// to rounding.
pub fn concavity_gap(a: &SymEndo4, b: &SymEndo4, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidInput(format!("s = {s} outside [0, 1]")));
    }
    for (name, m) in [("A", a), ("B", b)] {
        let v = cone_check(m);
        if !v.in_gamma2_plus {
            return Err(Error::InvalidInput(format!(
                "{name} is outside the cone (sigma1 = {}, sigma2 = {})",
                v.sigma1, v.sigma2
            )));
        }
    }
    let mix = *a * (1.0 - s) + *b * s;
    Ok(sigma2(&mix).sqrt() - (1.0 - s) * sigma2(a).sqrt() - s * sigma2(b).sqrt())
}

/// The two Ricci-pinching tensors of Aᵗ: T₁(Aᵗ) = −Aᵗ + σ₁I and Aᵗ + ½σ₁I.
/// Both are positive definite whenever Aᵗ ∈ Γ₂⁺.
pub fn pinching_tensors(a: &SymEndo4) -> (SymEndo4, SymEndo4) {
    let s1 = sigma1(a);
    (newton_transform(a), *a + SymEndo4::scalar(0.5 * s1))
}
