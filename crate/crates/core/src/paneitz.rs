//! The Paneitz operator P = Δ² + δ((2/3)R g − 2Ric)d on model backgrounds.
//!
//! Conventions: Δ is the trace of ∇², so Laplace spectra are listed as λ ≥ 0
//! with Δψ = −λψ, and δd = −Δ on functions. With these,
//!
//!   ⟨Pφ, φ⟩ = ∫(Δφ)² + (2/3)R|∇φ|² − 2Ric(∇φ, ∇φ)
//!           = (4/3)∫|∇̊²φ|² + (2/3)∫(Rg − Ric)(∇φ, ∇φ)
//!
//! where ∇̊² is the trace-free Hessian. The second line is the Bochner split.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::endo::SymEndo4;
use crate::error::{Error, Result};
use crate::geometry::{
    curvature_of, q_curvature_homogeneous, Background, DerivativeScheme, DiffOps, ReducedCalculus,
    ReducedField, S1xS3,
};

/// Values within this distance of zero count as kernel in spectrum summaries.
pub const KERNEL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductSpectrumInput {
    pub kappa1: f64,
    pub kappa2: f64,
    pub eigs1: Vec<f64>,
    pub eigs2: Vec<f64>,
}

impl ProductSpectrumInput {
    pub fn validate(&self) -> Result<()> {
        for (name, eigs) in [("eigs1", &self.eigs1), ("eigs2", &self.eigs2)] {
            if eigs.is_empty() {
                return Err(Error::InvalidInput(format!("{name} is empty")));
            }
            if eigs.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(Error::InvalidInput(format!("{name} must hold finite nonnegative values")));
            }
            if eigs.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::InvalidInput(format!("{name} must be sorted ascending")));
            }
            if eigs[0] != 0.0 {
                return Err(Error::InvalidInput(format!("{name} must contain 0 (the constants)")));
            }
        }
        if !(self.kappa1.is_finite() && self.kappa2.is_finite()) {
            return Err(Error::InvalidInput("curvatures must be finite".into()));
        }
        Ok(())
    }

    /// bᵢ = (2/3)R − 2κᵢ with R = 2κ₁ + 2κ₂.
    pub fn coefficients(&self) -> (f64, f64) {
        product_coefficients(self.kappa1, self.kappa2)
    }
}

pub fn product_coefficients(kappa1: f64, kappa2: f64) -> (f64, f64) {
    // (2/3)(2κ₁ + 2κ₂) − 2κ₁ = (4κ₂ − 2κ₁)/3
    ((4.0 * kappa2 - 2.0 * kappa1) / 3.0, (4.0 * kappa1 - 2.0 * kappa2) / 3.0)
}

/// P eigenvalue of ψ₁ψ₂ with Δψ₁ = −λψ₁ on the first factor and Δψ₂ = −μψ₂ on the second.
pub fn product_eigenvalue(kappa1: f64, kappa2: f64, lambda: f64, mu: f64) -> f64 {
    let (b1, b2) = product_coefficients(kappa1, kappa2);
    (lambda + mu).powi(2) + b1 * lambda + b2 * mu
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub lambda: f64,
    pub mu: f64,
    pub paneitz_eigenvalue: f64,
}

/// All products of the two lists, sorted by eigenvalue (ties by λ, then μ).
pub fn product_paneitz_entries(inp: &ProductSpectrumInput) -> Result<Vec<SpectrumEntry>> {
    inp.validate()?;
    let mut out = Vec::with_capacity(inp.eigs1.len() * inp.eigs2.len());
    for &lambda in &inp.eigs1 {
        for &mu in &inp.eigs2 {
            out.push(SpectrumEntry {
                lambda,
                mu,
                paneitz_eigenvalue: product_eigenvalue(inp.kappa1, inp.kappa2, lambda, mu),
            });
        }
    }
    sort_entries(&mut out);
    Ok(out)
}

fn sort_entries(v: &mut [SpectrumEntry]) {
    v.sort_by(|a, b| {
        a.paneitz_eigenvalue
            .total_cmp(&b.paneitz_eigenvalue)
            .then(a.lambda.total_cmp(&b.lambda))
            .then(a.mu.total_cmp(&b.mu))
    });
}

/// S¹-invariant spectrum on S¹(L)×S³(ρ) through circle mode `modes`: λ = (2πk/L)²
/// with μ = 0 and P eigenvalue λ² + (4/ρ²)λ. Each k ≥ 1 appears twice (cos and sin).
pub fn reduced_spectrum(bg: &S1xS3, modes: usize) -> Result<Vec<SpectrumEntry>> {
    bg.validate()?;
    let mut out = vec![SpectrumEntry {
        lambda: 0.0,
        mu: 0.0,
        paneitz_eigenvalue: 0.0,
    }];
    let rho2 = bg.sphere_radius * bg.sphere_radius;
    for k in 1..=modes {
        let lambda = (2.0 * PI * k as f64 / bg.circumference).powi(2);
        let e = SpectrumEntry {
            lambda,
            mu: 0.0,
            paneitz_eigenvalue: lambda * lambda + 4.0 * lambda / rho2,
        };
        out.push(e);
        out.push(e);
    }
    sort_entries(&mut out);
    Ok(out)
}

pub fn product_paneitz_spectrum(inp: &ProductSpectrumInput) -> Result<Vec<f64>> {
    Ok(product_paneitz_entries(inp)?
        .into_iter()
        .map(|e| e.paneitz_eigenvalue)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub count: usize,
    pub count_negative: usize,
    pub min: f64,
    pub argmin: (f64, f64),
    /// Number of values with |value| ≤ [`KERNEL_TOL`].
    pub kernel_dim: usize,
    /// inf over x = λ + μ ≥ 0 of x² + b·x when b₁ = b₂ = b; a bound, not
    /// necessarily attained on the supplied lists.
    pub continuous_lower_bound: Option<f64>,
}

pub fn summarize_spectrum(inp: &ProductSpectrumInput) -> Result<SpectrumSummary> {
    let entries = product_paneitz_entries(inp)?;
    let (b1, b2) = inp.coefficients();
    let mut s = summarize_entries(&entries)?;
    s.continuous_lower_bound = (b1 == b2).then(|| if b1 < 0.0 { -b1 * b1 / 4.0 } else { 0.0 });
    Ok(s)
}

/// Summary of an already sorted list; `continuous_lower_bound` is left empty.
pub fn summarize_entries(entries: &[SpectrumEntry]) -> Result<SpectrumSummary> {
    let first = entries
        .first()
        .ok_or_else(|| Error::InvalidInput("empty spectrum".into()))?;
    Ok(SpectrumSummary {
        count: entries.len(),
        count_negative: entries.iter().filter(|e| e.paneitz_eigenvalue < 0.0).count(),
        min: first.paneitz_eigenvalue,
        argmin: (first.lambda, first.mu),
        kernel_dim: entries.iter().filter(|e| e.paneitz_eigenvalue.abs() <= KERNEL_TOL).count(),
        continuous_lower_bound: None,
    })
}

/// Test functions for the quadratic form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TestFunction {
    /// S¹-invariant function on S¹×S³.
    Reduced(ReducedField),
    /// ψ₁ψ₂ on a product of surfaces, L²-normalized.
    ProductMode { lambda: f64, mu: f64 },
    /// Laplace eigenfunction on the round S⁴, L²-normalized.
    Eigenmode { lambda: f64 },
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFormReport {
    /// ⟨Pφ, φ⟩.
    pub form_value: f64,
    /// (4/3)∫|∇̊²φ|².
    pub hessian_term: f64,
    /// (2/3)∫(Rg − Ric)(∇φ, ∇φ).
    pub curvature_term: f64,
    pub decomposition_residual: f64,
    /// ∫φ² dvol.
    pub norm_sq: f64,
}

impl QuadraticFormReport {
    fn new(form_value: f64, hessian_term: f64, curvature_term: f64, norm_sq: f64) -> Self {
        Self {
            form_value,
            hessian_term,
            curvature_term,
            decomposition_residual: (form_value - hessian_term - curvature_term).abs(),
            norm_sq,
        }
    }
}

/// ⟨Pφ, φ⟩ and its Bochner split on S¹(L)×S³(ρ) for S¹-invariant φ.
///
/// Pφ = φ⁗ − (4/ρ²)φ″, |∇̊²φ|² = (3/4)(φ″)², (Rg − Ric)(∂θ, ∂θ) = 6/ρ².
/// The form is evaluated as ∫φ·Pφ and the split from pointwise squares, so
/// the residual measures the discrete integration by parts.
pub fn reduced_quadratic_form(bg: &S1xS3, phi: &ReducedField, scheme: DerivativeScheme) -> Result<QuadraticFormReport> {
    bg.validate()?;
    if (phi.period() - bg.circumference).abs() > 1e-12 * bg.circumference {
        return Err(Error::Config(format!(
            "field period {} does not match circumference {}",
            phi.period(),
            bg.circumference
        )));
    }
    let ops = DiffOps::for_field(phi, scheme)?;
    let s = phi.samples();
    let rho2 = bg.sphere_radius * bg.sphere_radius;
    let d1 = ops.d1(s);
    let d2 = ops.d2(s);
    let d4 = ops.d4(s);
    let w = phi.spacing() * bg.sphere_volume();
    let form: f64 = s.iter().zip(d4.iter().zip(&d2)).map(|(p, (a, b))| p * (a - 4.0 / rho2 * b)).sum::<f64>() * w;
    let hessian = (4.0 / 3.0) * 0.75 * d2.iter().map(|x| x * x).sum::<f64>() * w;
    let curvature = (2.0 / 3.0) * (6.0 / rho2) * d1.iter().map(|x| x * x).sum::<f64>() * w;
    let norm_sq = s.iter().map(|x| x * x).sum::<f64>() * w;
    Ok(QuadraticFormReport::new(form, hessian, curvature, norm_sq))
}

/// Quadratic form report for a test function on a frame-level background.
pub fn quadratic_form(bg: &Background, phi: &TestFunction) -> Result<QuadraticFormReport> {
    if let TestFunction::Constant(c) = phi {
        let pkg = curvature_of(bg)?;
        return Ok(QuadraticFormReport::new(0.0, 0.0, 0.0, c * c * pkg.volume));
    }
    match (bg, phi) {
        (Background::S1xS3(s), TestFunction::Reduced(f)) => reduced_quadratic_form(s, f, DerivativeScheme::Spectral),
        (Background::ProductSurfaces { kappa1, kappa2, .. }, TestFunction::ProductMode { lambda, mu }) => {
            check_eigenvalue(*lambda)?;
            check_eigenvalue(*mu)?;
            let (k1, k2, l, m) = (*kappa1, *kappa2, *lambda, *mu);
            let r = 2.0 * (k1 + k2);
            let form = product_eigenvalue(k1, k2, l, m);
            // ∫|∇²φ|² from the surface identity ∫|∇²ψ|² = λ² − κλ plus the mixed
            // block ∇ψ₁ ⊗ ∇ψ₂, which contributes 2λμ.
            let full_hessian = (l * l - k1 * l) + (m * m - k2 * m) + 2.0 * l * m;
            let hessian = (4.0 / 3.0) * (full_hessian - 0.25 * (l + m).powi(2));
            let curvature = (2.0 / 3.0) * (r * (l + m) - k1 * l - k2 * m);
            Ok(QuadraticFormReport::new(form, hessian, curvature, 1.0))
        }
        (Background::RoundS4 { radius }, TestFunction::Eigenmode { lambda }) => {
            check_eigenvalue(*lambda)?;
            let k = radius.powi(-2);
            let l = *lambda;
            let form = l * l + (2.0 / 3.0) * 12.0 * k * l - 2.0 * 3.0 * k * l;
            let full_hessian = l * l - 3.0 * k * l;
            let hessian = (4.0 / 3.0) * (full_hessian - 0.25 * l * l);
            let curvature = (2.0 / 3.0) * (12.0 * k - 3.0 * k) * l;
            Ok(QuadraticFormReport::new(form, hessian, curvature, 1.0))
        }
        (bg, phi) => Err(Error::UnsupportedBackground(format!(
            "test function {} is not defined on {}",
            match phi {
                TestFunction::Reduced(_) => "Reduced",
                TestFunction::ProductMode { .. } => "ProductMode",
                TestFunction::Eigenmode { .. } => "Eigenmode",
                TestFunction::Constant(_) => "Constant",
            },
            bg.name()
        ))),
    }
}

fn check_eigenvalue(x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("Laplace eigenvalue must be finite and >= 0, got {x}")))
    }
}

/// ⟨Pφ, ψ⟩ for S¹-invariant fields on S¹×S³ with a unit sphere.
pub fn reduced_pairing(calc: &ReducedCalculus, phi: &ReducedField, psi: &ReducedField) -> Result<f64> {
    let p = calc.paneitz_apply(phi)?;
    Ok(calc.integrate_product(&p, psi.samples()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub lambda: f64,
    pub mu: f64,
    /// Form value of the L²-normalized witness.
    pub form_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityCertificate {
    /// True only when the curvature condition certifies P ≥ 0.
    pub positive_semidefinite: bool,
    /// Reported from the rigidity argument when certified; not re-verified.
    pub kernel_is_constants: bool,
    /// Smallest eigenvalue of Rg − λ·Ric.
    pub condition_margin: f64,
    pub lambda: f64,
    pub witness: Option<Witness>,
}

/// Checks Rg − λRic ≥ 0 (λ ∈ [1, 3]; λ = 1 is Ric ≤ Rg). When the condition
/// fails on a product of surfaces and spectra are supplied, searches the exact
/// product spectrum for a negative mode.
pub fn positivity_certificate(
    bg: &Background,
    lambda: f64,
    spectra: Option<(&[f64], &[f64])>,
) -> Result<PositivityCertificate> {
    if !(1.0..=3.0).contains(&lambda) {
        return Err(Error::InvalidInput(format!("lambda = {lambda} outside [1, 3]")));
    }
    let pkg = curvature_of(bg)?;
    let cond = SymEndo4::scalar(pkg.scalar) - pkg.ric * lambda;
    let margin = cond.min_eigenvalue();
    if margin >= 0.0 {
        return Ok(PositivityCertificate {
            positive_semidefinite: true,
            kernel_is_constants: true,
            condition_margin: margin,
            lambda,
            witness: None,
        });
    }
    let mut witness = None;
    if let (Background::ProductSurfaces { kappa1, kappa2, .. }, Some((e1, e2))) = (bg, spectra) {
        let inp = ProductSpectrumInput {
            kappa1: *kappa1,
            kappa2: *kappa2,
            eigs1: e1.to_vec(),
            eigs2: e2.to_vec(),
        };
        let first = product_paneitz_entries(&inp)?[0];
        if first.paneitz_eigenvalue < 0.0 {
            witness = Some(Witness {
                lambda: first.lambda,
                mu: first.mu,
                form_value: first.paneitz_eigenvalue,
            });
        }
    }
    Ok(PositivityCertificate {
        positive_semidefinite: false,
        kernel_is_constants: false,
        condition_margin: margin,
        lambda,
        witness,
    })
}

/// F[φ] = ⟨Pφ, φ⟩ − 4∫Qφ − (∫Q)·log∫e^{−4φ}, all integrals against dvol_g.
///
/// Q is the (constant) Q-curvature of the homogeneous background.
pub fn evaluate_f(bg: &Background, phi: &TestFunction) -> Result<f64> {
    let pkg = curvature_of(bg)?;
    let q = q_curvature_homogeneous(&pkg);
    let q_total = q * pkg.volume;
    let (form, mean_term, exp_integral) = match (bg, phi) {
        (_, TestFunction::Constant(c)) => (0.0, c * q_total, (-4.0 * c).exp() * pkg.volume),
        (Background::S1xS3(s), TestFunction::Reduced(f)) => {
            let rep = reduced_quadratic_form(s, f, DerivativeScheme::Spectral)?;
            let w = f.spacing() * s.sphere_volume();
            let integral: f64 = f.samples().iter().sum::<f64>() * w;
            let exp_integral: f64 = f.samples().iter().map(|x| (-4.0 * x).exp()).sum::<f64>() * w;
            (rep.form_value, q * integral, exp_integral)
        }
        _ => {
            return Err(Error::UnsupportedBackground(format!(
                "F needs pointwise values of the test function on {}",
                bg.name()
            )))
        }
    };
    if !(exp_integral.is_finite() && exp_integral > 0.0) {
        return Err(Error::Quadrature(format!("integral of exp(-4 phi) is {exp_integral}")));
    }
    Ok(form - 4.0 * mean_term - q_total * exp_integral.ln())
}

/// Smallest nonzero eigenvalue of the reduced operator on S¹(L)×S³(1): k⁴ + 4k² at k = 2π/L.
pub fn reduced_first_eigenvalue(circumference: f64) -> f64 {
    let k = 2.0 * PI / circumference;
    k.powi(4) + 4.0 * k * k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_spectrum_matches_first_eigenvalue() {
        let e = reduced_spectrum(&S1xS3::standard(), 4).unwrap();
        assert_eq!(e.len(), 9);
        assert_eq!(e[1].paneitz_eigenvalue, reduced_first_eigenvalue(L));
        let s = summarize_entries(&e).unwrap();
        assert_eq!((s.kernel_dim, s.count_negative), (1, 0));
    }

    const L: f64 = 2.0 * PI;

    fn hyperbolic(eigs1: Vec<f64>, eigs2: Vec<f64>) -> ProductSpectrumInput {
        ProductSpectrumInput {
            kappa1: -1.0,
            kappa2: -1.0,
            eigs1,
            eigs2,
        }
    }

    #[test]
    fn hyperbolic_negative_mode() {
        let inp = hyperbolic(vec![0.0, 0.1], vec![0.0]);
        assert_eq!(inp.coefficients(), (-2.0 / 3.0, -2.0 / 3.0));
        let spec = product_paneitz_spectrum(&inp).unwrap();
        assert!((spec[0] - (-17.0 / 300.0)).abs() < 1e-15);
        assert_eq!(spec[1], 0.0);
    }

    #[test]
    fn hyperbolic_grid_spectrum() {
        let e = vec![0.0, 0.1, 1.0];
        let s = summarize_spectrum(&hyperbolic(e.clone(), e)).unwrap();
        assert_eq!(s.count, 9);
        // λ + μ = 0.2 is the attainable point closest to the vertex 1/3
        assert!((s.min - (-7.0 / 75.0)).abs() < 1e-15);
        assert_eq!(s.argmin, (0.1, 0.1));
        assert_eq!(s.count_negative, 3);
        assert!((s.continuous_lower_bound.unwrap() + 1.0 / 9.0).abs() < 1e-15);
        assert!(s.min >= s.continuous_lower_bound.unwrap());
    }

    #[test]
    fn s2xs2_spectrum_is_nonnegative() {
        let e = vec![0.0, 2.0, 6.0, 12.0];
        let inp = ProductSpectrumInput {
            kappa1: 1.0,
            kappa2: 1.0,
            eigs1: e.clone(),
            eigs2: e,
        };
        assert_eq!(inp.coefficients(), (2.0 / 3.0, 2.0 / 3.0));
        let s = summarize_spectrum(&inp).unwrap();
        assert_eq!(s.count_negative, 0);
        assert_eq!(s.min, 0.0);
        assert_eq!(s.kernel_dim, 1);
        assert_eq!(s.argmin, (0.0, 0.0));
    }

    #[test]
    fn spectrum_input_validation() {
        assert!(product_paneitz_spectrum(&hyperbolic(vec![], vec![0.0])).is_err());
        assert!(product_paneitz_spectrum(&hyperbolic(vec![0.1], vec![0.0])).is_err());
        assert!(product_paneitz_spectrum(&hyperbolic(vec![0.0, 1.0, 0.5], vec![0.0])).is_err());
        assert!(product_paneitz_spectrum(&hyperbolic(vec![0.0, -1.0], vec![0.0])).is_err());
    }

    #[test]
    fn reduced_form_of_cosine() {
        let phi = ReducedField::from_fn(64, L, |x| x.cos()).unwrap();
        let rep = quadratic_form(&Background::S1xS3(S1xS3::standard()), &TestFunction::Reduced(phi)).unwrap();
        assert!((rep.form_value - 10.0 * PI.powi(3)).abs() < 1e-10);
        assert!(rep.decomposition_residual < 1e-10);
        assert!((rep.norm_sq - 2.0 * PI.powi(3)).abs() < 1e-10);
        assert!(rep.form_value >= rep.hessian_term);
        assert_eq!(reduced_first_eigenvalue(L), 5.0);
    }

    #[test]
    fn reduced_symbol_matches_form() {
        let bg = Background::S1xS3(S1xS3::standard());
        for k in 1..8 {
            let kf = k as f64;
            let phi = ReducedField::from_fn(64, L, |x| (kf * x).cos()).unwrap();
            let rep = quadratic_form(&bg, &TestFunction::Reduced(phi)).unwrap();
            let expect = (kf.powi(4) + 4.0 * kf * kf) * rep.norm_sq;
            assert!((rep.form_value - expect).abs() < 1e-9 * expect);
        }
    }

    #[test]
    fn constants_give_zero_terms() {
        for bg in [
            Background::round_s4(1.0),
            Background::S1xS3(S1xS3::standard()),
            Background::product_surfaces(1.0, 1.0, 4.0 * PI, 4.0 * PI),
        ] {
            let rep = quadratic_form(&bg, &TestFunction::Constant(2.0)).unwrap();
            assert_eq!((rep.form_value, rep.hessian_term, rep.curvature_term), (0.0, 0.0, 0.0));
        }
        let c = ReducedField::constant(32, L, 1.5).unwrap();
        let rep = quadratic_form(&Background::S1xS3(S1xS3::standard()), &TestFunction::Reduced(c)).unwrap();
        assert!(rep.form_value.abs() < 1e-12);
    }

    #[test]
    fn product_and_sphere_modes_split_exactly() {
        let hyp = Background::hyperbolic_product(2).unwrap();
        let rep = quadratic_form(&hyp, &TestFunction::ProductMode { lambda: 0.1, mu: 0.0 }).unwrap();
        assert!((rep.form_value + 17.0 / 300.0).abs() < 1e-15);
        assert!(rep.decomposition_residual < 1e-15);
        let s4 = Background::round_s4(1.0);
        for l in [4.0, 10.0, 18.0] {
            let rep = quadratic_form(&s4, &TestFunction::Eigenmode { lambda: l }).unwrap();
            assert!((rep.form_value - (l * l + 2.0 * l)).abs() < 1e-12);
            assert!((rep.hessian_term - (l * l - 4.0 * l)).abs() < 1e-12);
            assert!((rep.curvature_term - 6.0 * l).abs() < 1e-12);
            assert!(rep.decomposition_residual < 1e-12);
        }
        assert!(quadratic_form(&s4, &TestFunction::ProductMode { lambda: 1.0, mu: 0.0 }).is_err());
    }

    #[test]
    fn certificates() {
        let cyl = positivity_certificate(&Background::S1xS3(S1xS3::standard()), 1.0, None).unwrap();
        assert!(cyl.positive_semidefinite && cyl.kernel_is_constants);
        assert_eq!(cyl.condition_margin, 4.0);
        let s4 = positivity_certificate(&Background::round_s4(1.0), 1.0, None).unwrap();
        assert!(s4.positive_semidefinite);
        assert_eq!(s4.condition_margin, 9.0);
        let e1 = [0.0, 0.1];
        let e2 = [0.0];
        let hyp = positivity_certificate(&Background::hyperbolic_product(2).unwrap(), 1.0, Some((&e1, &e2))).unwrap();
        assert!(!hyp.positive_semidefinite);
        let w = hyp.witness.unwrap();
        assert_eq!((w.lambda, w.mu), (0.1, 0.0));
        assert!((w.form_value + 17.0 / 300.0).abs() < 1e-15);
        // Rg − 3Ric on S⁴ is 12 − 9 = 3 > 0; on S¹×S³ it is 6 − 6 = 0
        assert!(positivity_certificate(&Background::round_s4(1.0), 3.0, None).unwrap().positive_semidefinite);
        let edge = positivity_certificate(&Background::S1xS3(S1xS3::standard()), 3.0, None).unwrap();
        assert_eq!(edge.condition_margin, 0.0);
        assert!(positivity_certificate(&Background::round_s4(1.0), 0.5, None).is_err());
    }

    #[test]
    fn functional_on_constants() {
        let cyl = Background::S1xS3(S1xS3::standard());
        for c in [-1.0, 0.0, 2.5] {
            assert_eq!(evaluate_f(&cyl, &TestFunction::Constant(c)).unwrap(), 0.0);
        }
        let s4 = Background::round_s4(1.0);
        let vol: f64 = 8.0 * PI * PI / 3.0;
        for c in [-0.7, 0.0, 1.3] {
            let f = evaluate_f(&s4, &TestFunction::Constant(c)).unwrap();
            assert!((f + 8.0 * PI * PI * vol.ln()).abs() < 1e-10, "c = {c}: {f}");
        }
        let phi = ReducedField::from_fn(32, L, |x| 0.3 * x.sin()).unwrap();
        let f = evaluate_f(&cyl, &TestFunction::Reduced(phi.clone())).unwrap();
        let rep = quadratic_form(&cyl, &TestFunction::Reduced(phi)).unwrap();
        assert!((f - rep.form_value).abs() < 1e-12);
    }

    #[test]
    fn form_is_invariant_under_homothety() {
        let phi_samples: Vec<f64> = (0..64).map(|j| (j as f64 * 0.098).sin() * 0.4 + (j as f64 * 0.196).cos()).collect();
        let bg = S1xS3::new(5.0, 1.3).unwrap();
        let base = reduced_quadratic_form(&bg, &ReducedField::new(phi_samples.clone(), 5.0).unwrap(), DerivativeScheme::Spectral).unwrap();
        for c in [-0.8, 0.4, 1.5] {
            let s = f64::exp(-c);
            let scaled = S1xS3::new(5.0 * s, 1.3 * s).unwrap();
            let field = ReducedField::new(phi_samples.clone(), 5.0 * s).unwrap();
            let rep = reduced_quadratic_form(&scaled, &field, DerivativeScheme::Spectral).unwrap();
            assert!((rep.form_value - base.form_value).abs() < 1e-10 * base.form_value.abs());
        }
    }
}
