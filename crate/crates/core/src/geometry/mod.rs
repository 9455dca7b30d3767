//! Closed-form curvature of the homogeneous model manifolds and the conformal
//! transformation laws for the modified Schouten tensors.
//!
//! Frames are orthonormal for the background metric. On S¹×S³ the first frame
//! vector is ∂θ and the remaining three span the sphere factor; on a product
//! of surfaces the first two vectors belong to the first factor.

pub mod reduced;
pub mod riemann;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cone::{sigma1, sigma2};
use crate::endo::SymEndo4;
use crate::error::{Error, Result};
use crate::ledger::TopologyRecord;

pub use reduced::{
    DerivativeScheme, DiffOps, ReducedCalculus, ReducedEndoField, ReducedField,
};
pub use riemann::RiemannTensor;

/// Relative tolerance for the Chern–Gauss–Bonnet identity on constants-only records.
pub const CGB_TOL: f64 = 1e-9;

/// S¹(L) × S³(r) with the product metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct S1xS3 {
    pub circumference: f64,
    pub sphere_radius: f64,
}

impl S1xS3 {
    pub fn new(circumference: f64, sphere_radius: f64) -> Result<Self> {
        let bg = Self {
            circumference,
            sphere_radius,
        };
        bg.validate()?;
        Ok(bg)
    }

    /// Unit sphere factor, circumference 2π.
    pub fn standard() -> Self {
        Self {
            circumference: 2.0 * PI,
            sphere_radius: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.circumference > 0.0 && self.circumference.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "circumference must be positive, got {}",
                self.circumference
            )));
        }
        if !(self.sphere_radius > 0.0 && self.sphere_radius.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "sphere radius must be positive, got {}",
                self.sphere_radius
            )));
        }
        Ok(())
    }

    /// The homothetic background with unit sphere radius, and the constant c
    /// such that the original metric is e^{-2c} times the returned one.
    pub fn unit_sphere_form(&self) -> (Self, f64) {
        let unit = Self {
            circumference: self.circumference / self.sphere_radius,
            sphere_radius: 1.0,
        };
        (unit, -self.sphere_radius.ln())
    }

    /// Volume of the S³ factor.
    pub fn sphere_volume(&self) -> f64 {
        2.0 * PI * PI * self.sphere_radius.powi(3)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Background {
    RoundS4 {
        radius: f64,
    },
    S1xS3(S1xS3),
    /// Product of two constant-curvature surfaces; areas must be Gauss–Bonnet
    /// consistent with the curvatures.
    ProductSurfaces {
        kappa1: f64,
        kappa2: f64,
        area1: f64,
        area2: f64,
    },
    /// A manifold known only through (χ, ∫|W|², Y, ∫Q).
    ConstantsOnly(TopologyRecord),
}

impl Background {
    pub fn round_s4(radius: f64) -> Self {
        Self::RoundS4 { radius }
    }

    pub fn s1xs3(circumference: f64, sphere_radius: f64) -> Self {
        Self::S1xS3(S1xS3 {
            circumference,
            sphere_radius,
        })
    }

    pub fn product_surfaces(kappa1: f64, kappa2: f64, area1: f64, area2: f64) -> Self {
        Self::ProductSurfaces {
            kappa1,
            kappa2,
            area1,
            area2,
        }
    }

    /// Σ_γ × Σ_γ with the hyperbolic metric of curvature −1 on each factor.
    pub fn hyperbolic_product(genus: u32) -> Result<Self> {
        if genus < 2 {
            return Err(Error::InvalidInput(format!(
                "hyperbolic surfaces need genus >= 2, got {genus}"
            )));
        }
        let area = 4.0 * PI * (genus as f64 - 1.0);
        Ok(Self::product_surfaces(-1.0, -1.0, area, area))
    }

    pub fn name(&self) -> String {
        match self {
            Self::RoundS4 { .. } => "S4".into(),
            Self::S1xS3(_) => "S1xS3".into(),
            Self::ProductSurfaces { kappa1, kappa2, .. } => {
                if *kappa1 > 0.0 && *kappa2 > 0.0 {
                    "S2xS2".into()
                } else if *kappa1 < 0.0 && *kappa2 < 0.0 {
                    "SigmaxSigma_hyperbolic".into()
                } else {
                    "ProductSurfaces".into()
                }
            }
            Self::ConstantsOnly(rec) => rec.name.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::RoundS4 { radius } => positive("radius", *radius),
            Self::S1xS3(bg) => bg.validate(),
            Self::ProductSurfaces {
                kappa1,
                kappa2,
                area1,
                area2,
            } => {
                positive("area1", *area1)?;
                positive("area2", *area2)?;
                surface_euler(*kappa1, *area1)?;
                surface_euler(*kappa2, *area2)?;
                Ok(())
            }
            Self::ConstantsOnly(rec) => rec.validate(),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive, got {v}")))
    }
}

/// Euler characteristic of a closed constant-curvature surface from Gauss–Bonnet.
pub fn surface_euler(kappa: f64, area: f64) -> Result<i64> {
    if kappa == 0.0 {
        return Ok(0);
    }
    let chi = kappa * area / (2.0 * PI);
    let rounded = chi.round();
    if (chi - rounded).abs() > 1e-9 * chi.abs().max(1.0) || rounded > 2.0 {
        return Err(Error::InvalidInput(format!(
            "area {area} is not Gauss-Bonnet consistent with curvature {kappa} (chi = {chi})"
        )));
    }
    Ok(rounded as i64)
}

/// Curvature data of a homogeneous background in an adapted orthonormal frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvaturePackage {
    /// g⁻¹Ric.
    pub ric: SymEndo4,
    pub scalar: f64,
    /// A¹ = ½(Ric − (R/6)g).
    pub schouten1: SymEndo4,
    pub volume: f64,
    /// ∫|W|² dvol.
    pub weyl_l2: f64,
    pub euler: i64,
}

impl CurvaturePackage {
    fn assemble(ric: SymEndo4, volume: f64, weyl_pointwise: f64, euler: i64) -> Self {
        let scalar = sigma1(&ric);
        Self {
            ric,
            scalar,
            schouten1: (ric - SymEndo4::scalar(scalar / 6.0)) * 0.5,
            volume,
            weyl_l2: weyl_pointwise * volume,
            euler,
        }
    }

    /// Package of the homothetic metric e^{-2c}g.
    pub fn constant_shift(&self, c: f64) -> Self {
        let k = (2.0 * c).exp();
        Self {
            ric: self.ric * k,
            scalar: self.scalar * k,
            schouten1: self.schouten1 * k,
            volume: self.volume * (-4.0 * c).exp(),
            weyl_l2: self.weyl_l2,
            euler: self.euler,
        }
    }

    /// ∫σ₂(g⁻¹A¹) dvol.
    pub fn total_sigma2(&self) -> f64 {
        sigma2(&self.schouten1) * self.volume
    }

    /// ∫R² dvol.
    pub fn total_scalar_sq(&self) -> f64 {
        self.scalar * self.scalar * self.volume
    }
}

/// Full Riemann tensor of a frame-level background.
pub fn riemann_of(bg: &Background) -> Result<RiemannTensor> {
    bg.validate()?;
    match bg {
        Background::RoundS4 { radius } => {
            Ok(RiemannTensor::flat().with_block(&[0, 1, 2, 3], radius.powi(-2)))
        }
        Background::S1xS3(s) => {
            Ok(RiemannTensor::flat().with_block(&[1, 2, 3], s.sphere_radius.powi(-2)))
        }
        Background::ProductSurfaces { kappa1, kappa2, .. } => Ok(RiemannTensor::flat()
            .with_block(&[0, 1], *kappa1)
            .with_block(&[2, 3], *kappa2)),
        Background::ConstantsOnly(rec) => Err(Error::UnsupportedBackground(format!(
            "{} carries no frame-level curvature",
            rec.name
        ))),
    }
}

pub fn curvature_of(bg: &Background) -> Result<CurvaturePackage> {
    let weyl = riemann_of(bg)?.weyl_norm_sq();
    let pkg = match bg {
        Background::RoundS4 { radius } => {
            let k = radius.powi(-2);
            CurvaturePackage::assemble(
                SymEndo4::scalar(3.0 * k),
                8.0 * PI * PI / 3.0 * radius.powi(4),
                weyl,
                2,
            )
        }
        Background::S1xS3(s) => {
            let k = s.sphere_radius.powi(-2);
            CurvaturePackage::assemble(
                SymEndo4::from_diag([0.0, 2.0 * k, 2.0 * k, 2.0 * k]),
                s.circumference * s.sphere_volume(),
                weyl,
                0,
            )
        }
        Background::ProductSurfaces {
            kappa1,
            kappa2,
            area1,
            area2,
        } => CurvaturePackage::assemble(
            SymEndo4::from_diag([*kappa1, *kappa1, *kappa2, *kappa2]),
            area1 * area2,
            weyl,
            surface_euler(*kappa1, *area1)? * surface_euler(*kappa2, *area2)?,
        ),
        Background::ConstantsOnly(_) => unreachable!("rejected by riemann_of"),
    };
    Ok(pkg)
}

/// Aᵗ = ½(Ric − (t/6)R g).
pub fn schouten_t(pkg: &CurvaturePackage, t: f64) -> SymEndo4 {
    (pkg.ric - SymEndo4::scalar(t * pkg.scalar / 6.0)) * 0.5
}

/// Inverts A¹ = ½(Ric − (R/6)g): returns (Ric, R).
pub fn ricci_from_schouten(a1: &SymEndo4) -> (SymEndo4, f64) {
    let s1 = sigma1(a1);
    (*a1 * 2.0 + SymEndo4::scalar(s1), 6.0 * s1)
}

/// Q = −(1/12)ΔR + 2σ₂(A¹) for a background with constant curvature data.
pub fn q_curvature_homogeneous(pkg: &CurvaturePackage) -> f64 {
    2.0 * sigma2(&pkg.schouten1)
}

/// g⁻¹Aᵗ_u for the conformal metric e^{-2u}g at one point, from the
/// background Aᵗ_g and the jet of u (Hessian and gradient in the frame).
pub fn conformal_schouten_pointwise(
    a_t_background: &SymEndo4,
    hessian: &SymEndo4,
    gradient: &[f64; 4],
    t: f64,
) -> SymEndo4 {
    let grad_sq: f64 = gradient.iter().map(|x| x * x).sum();
    let mut du_du = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            du_du[i][j] = gradient[i] * gradient[j];
        }
    }
    *a_t_background
        + *hessian
        + SymEndo4::scalar(0.5 * (1.0 - t) * hessian.trace() - 0.5 * (2.0 - t) * grad_sq)
        + SymEndo4::symmetrized(du_du)
}
