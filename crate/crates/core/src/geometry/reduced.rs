//! S¹-symmetric conformal factors u(θ) on S¹ × S³.
//!
//! With the product metric g = dθ² + g_{S³} (unit sphere) and u depending on
//! θ only, ∇²u = u″dθ², Δu = u″ and |∇u|² = (u′)², so g⁻¹Aᵗ_u is diagonal with
//! one eigenvalue along ∂θ and a triple eigenvalue on the sphere directions.
//!
//! Derivatives are circulant operators on the uniform periodic grid. Both the
//! field-level derivatives and the dense matrices used in Jacobians come from
//! the same Fourier symbol, so residuals and their linearizations agree to
//! rounding.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::S1xS3;

pub const MIN_GRID: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DerivativeScheme {
    /// Fourier differentiation, exact below the Nyquist mode.
    #[default]
    Spectral,
    /// Fourth-order central differences.
    Fd4,
}

/// Samples of a periodic function on θ_k = k·L/N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedField {
    samples: Vec<f64>,
    period: f64,
}

fn check_grid(n: usize, period: f64) -> Result<()> {
    if n < MIN_GRID || !n.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "grid size must be even and >= {MIN_GRID}, got {n}"
        )));
    }
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidInput(format!("period must be positive, got {period}")));
    }
    Ok(())
}

impl ReducedField {
    pub fn new(samples: Vec<f64>, period: f64) -> Result<Self> {
        check_grid(samples.len(), period)?;
        Ok(Self { samples, period })
    }

    pub fn from_fn(n: usize, period: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_grid(n, period)?;
        let h = period / n as f64;
        Ok(Self {
            samples: (0..n).map(|k| f(k as f64 * h)).collect(),
            period,
        })
    }

    pub fn constant(n: usize, period: f64, c: f64) -> Result<Self> {
        Self::from_fn(n, period, |_| c)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn grid_n(&self) -> usize {
        self.samples.len()
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.samples.len() as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.samples.len()).map(|k| k as f64 * h).collect()
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Same grid, new samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != self.samples.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} samples, got {}",
                self.samples.len(),
                samples.len()
            )));
        }
        Ok(Self {
            samples,
            period: self.period,
        })
    }
}

/// Circulant derivative operators of orders 1 through 4 on a fixed grid.
#[derive(Clone)]
pub struct DiffOps {
    n: usize,
    period: f64,
    scheme: DerivativeScheme,
    symbols: [Vec<Complex64>; 4],
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for DiffOps {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiffOps")
            .field("n", &self.n)
            .field("period", &self.period)
            .field("scheme", &self.scheme)
            .finish()
    }
}

// Stencils (offset, weight) for h = 1; order-m weights are divided by h^m.
const FD4_STENCILS: [&[(i64, f64)]; 4] = [
    &[(-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)],
    &[
        (-2, -1.0 / 12.0),
        (-1, 16.0 / 12.0),
        (0, -30.0 / 12.0),
        (1, 16.0 / 12.0),
        (2, -1.0 / 12.0),
    ],
    &[
        (-3, 1.0 / 8.0),
        (-2, -1.0),
        (-1, 13.0 / 8.0),
        (1, -13.0 / 8.0),
        (2, 1.0),
        (3, -1.0 / 8.0),
    ],
    &[
        (-3, -1.0 / 6.0),
        (-2, 2.0),
        (-1, -6.5),
        (0, 28.0 / 3.0),
        (1, -6.5),
        (2, 2.0),
        (3, -1.0 / 6.0),
    ],
];

impl DiffOps {
    pub fn new(n: usize, period: f64, scheme: DerivativeScheme) -> Result<Self> {
        check_grid(n, period)?;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let symbols = std::array::from_fn(|i| symbol(n, period, scheme, i + 1));
        Ok(Self {
            n,
            period,
            scheme,
            symbols,
            forward,
            inverse,
        })
    }

    pub fn for_field(u: &ReducedField, scheme: DerivativeScheme) -> Result<Self> {
        Self::new(u.grid_n(), u.period(), scheme)
    }

    pub fn grid_n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn scheme(&self) -> DerivativeScheme {
        self.scheme
    }

    /// Fourier symbol of the order-m derivative (FFT ordering of modes).
    pub fn symbol(&self, order: usize) -> &[Complex64] {
        &self.symbols[order - 1]
    }

    /// Applies the order-m derivative, m ∈ 1..=4.
    pub fn apply(&self, order: usize, values: &[f64]) -> Vec<f64> {
        assert!((1..=4).contains(&order), "derivative order {order} not in 1..=4");
        assert_eq!(values.len(), self.n, "grid size mismatch");
        let mut buf: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward.process(&mut buf);
        for (b, s) in buf.iter_mut().zip(self.symbols[order - 1].iter()) {
            *b *= s;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    pub fn d1(&self, values: &[f64]) -> Vec<f64> {
        self.apply(1, values)
    }

    pub fn d2(&self, values: &[f64]) -> Vec<f64> {
        self.apply(2, values)
    }

    pub fn d3(&self, values: &[f64]) -> Vec<f64> {
        self.apply(3, values)
    }

    pub fn d4(&self, values: &[f64]) -> Vec<f64> {
        self.apply(4, values)
    }

    /// Dense N×N matrix of the order-m derivative.
    pub fn matrix(&self, order: usize) -> DMatrix<f64> {
        let mut e0 = vec![0.0; self.n];
        e0[0] = 1.0;
        let col = self.apply(order, &e0);
        let n = self.n;
        DMatrix::from_fn(n, n, |i, j| col[(i + n - j) % n])
    }
}

fn symbol(n: usize, period: f64, scheme: DerivativeScheme, order: usize) -> Vec<Complex64> {
    let i_unit = Complex64::new(0.0, 1.0);
    match scheme {
        DerivativeScheme::Spectral => (0..n)
            .map(|k| {
                let mode = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
                if k == n / 2 && order % 2 == 1 {
                    return Complex64::new(0.0, 0.0);
                }
                let wave = 2.0 * PI * mode / period;
                (i_unit * wave).powu(order as u32)
            })
            .collect(),
        DerivativeScheme::Fd4 => {
            let h = period / n as f64;
            let scale = h.powi(-(order as i32));
            (0..n)
                .map(|k| {
                    let theta = 2.0 * PI * k as f64 / n as f64;
                    FD4_STENCILS[order - 1]
                        .iter()
                        .map(|&(m, w)| Complex64::from_polar(w * scale, theta * m as f64))
                        .sum()
                })
                .collect()
        }
    }
}

/// Pointwise eigenvalues of g⁻¹Aᵗ_u on S¹ × S³: `lambda_theta` along ∂θ and
/// `lambda_sphere` with multiplicity three.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedEndoField {
    pub lambda_theta: Vec<f64>,
    pub lambda_sphere: Vec<f64>,
}

impl ReducedEndoField {
    pub fn len(&self) -> usize {
        self.lambda_theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda_theta.is_empty()
    }

    pub fn sigma1(&self, i: usize) -> f64 {
        self.lambda_theta[i] + 3.0 * self.lambda_sphere[i]
    }

    pub fn sigma2(&self, i: usize) -> f64 {
        let (a, b) = (self.lambda_theta[i], self.lambda_sphere[i]);
        3.0 * a * b + 3.0 * b * b
    }

    pub fn endo(&self, i: usize) -> crate::endo::SymEndo4 {
        let b = self.lambda_sphere[i];
        crate::endo::SymEndo4::from_diag([self.lambda_theta[i], b, b, b])
    }

    /// Multiplies the eigenvalues at each point by the given factor.
    pub fn scaled(&self, factors: &[f64]) -> Self {
        Self {
            lambda_theta: self.lambda_theta.iter().zip(factors).map(|(x, f)| x * f).collect(),
            lambda_sphere: self.lambda_sphere.iter().zip(factors).map(|(x, f)| x * f).collect(),
        }
    }
}

/// Eigenvalues (λ_θ, λ_sphere) of g⁻¹Aᵗ_u from u′ and u″ at one point.
pub fn schouten_eigenvalues(t: f64, du: f64, d2u: f64) -> (f64, f64) {
    let g = du * du;
    (
        -0.5 * t + 0.5 * (3.0 - t) * d2u + 0.5 * t * g,
        0.5 * (2.0 - t) + 0.5 * (1.0 - t) * d2u - 0.5 * (2.0 - t) * g,
    )
}

/// Reduced operators on S¹ × S³ bound to one grid and derivative scheme.
#[derive(Debug, Clone)]
pub struct ReducedCalculus {
    bg: S1xS3,
    ops: DiffOps,
}

impl ReducedCalculus {
    pub fn new(bg: S1xS3, n: usize, scheme: DerivativeScheme) -> Result<Self> {
        bg.validate()?;
        if bg.sphere_radius != 1.0 {
            return Err(Error::UnsupportedBackground(format!(
                "reduced formulas assume a unit sphere factor (radius {}); rescale with unit_sphere_form",
                bg.sphere_radius
            )));
        }
        Ok(Self {
            bg,
            ops: DiffOps::new(n, bg.circumference, scheme)?,
        })
    }

    pub fn background(&self) -> &S1xS3 {
        &self.bg
    }

    pub fn ops(&self) -> &DiffOps {
        &self.ops
    }

    fn check(&self, u: &ReducedField) -> Result<()> {
        if (u.period() - self.bg.circumference).abs() > 1e-12 * self.bg.circumference {
            return Err(Error::Config(format!(
                "field period {} does not match circumference {}",
                u.period(),
                self.bg.circumference
            )));
        }
        if u.grid_n() != self.ops.grid_n() {
            return Err(Error::Config(format!(
                "field has {} samples, operators expect {}",
                u.grid_n(),
                self.ops.grid_n()
            )));
        }
        Ok(())
    }

    pub fn conformal_schouten(&self, u: &ReducedField, t: f64) -> Result<ReducedEndoField> {
        self.check(u)?;
        let du = self.ops.d1(u.samples());
        let d2u = self.ops.d2(u.samples());
        let (lambda_theta, lambda_sphere) = du
            .iter()
            .zip(&d2u)
            .map(|(&a, &b)| schouten_eigenvalues(t, a, b))
            .unzip();
        Ok(ReducedEndoField {
            lambda_theta,
            lambda_sphere,
        })
    }

    /// Q-curvature of e^{-2u}g at the grid points.
    pub fn q_curvature(&self, u: &ReducedField) -> Result<Vec<f64>> {
        let a1 = self.conformal_schouten(u, 1.0)?;
        let us = u.samples();
        let r_tilde: Vec<f64> = (0..us.len())
            .map(|i| 6.0 * (2.0 * us[i]).exp() * a1.sigma1(i))
            .collect();
        let dr = self.ops.d1(&r_tilde);
        let d2r = self.ops.d2(&r_tilde);
        let du = self.ops.d1(us);
        Ok((0..us.len())
            .map(|i| {
                let lap_r = (2.0 * us[i]).exp() * (d2r[i] - 2.0 * du[i] * dr[i]);
                -lap_r / 12.0 + 2.0 * (4.0 * us[i]).exp() * a1.sigma2(i)
            })
            .collect())
    }

    /// Pφ = φ⁗ − 4φ″.
    pub fn paneitz_apply(&self, phi: &ReducedField) -> Result<Vec<f64>> {
        self.check(phi)?;
        let d4 = self.ops.d4(phi.samples());
        let d2 = self.ops.d2(phi.samples());
        Ok(d4.iter().zip(&d2).map(|(a, b)| a - 4.0 * b).collect())
    }

    /// sup |−P u + 2Q_g − 2Q_{e^{-2u}g} e^{-4u}| over the grid.
    pub fn q_transform_residual(&self, u: &ReducedField) -> Result<f64> {
        let zero = u.with_samples(vec![0.0; u.grid_n()])?;
        let q_bg = self.q_curvature(&zero)?;
        let q_new = self.q_curvature(u)?;
        let pu = self.paneitz_apply(u)?;
        Ok((0..u.grid_n())
            .map(|i| (-pu[i] + 2.0 * q_bg[i] - 2.0 * q_new[i] * (-4.0 * u.samples()[i]).exp()).abs())
            .fold(0.0, f64::max))
    }

    /// ∫ a·b dvol for S¹-invariant functions.
    pub fn integrate_product(&self, a: &[f64], b: &[f64]) -> f64 {
        let h = self.bg.circumference / a.len() as f64;
        a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * h * self.bg.sphere_volume()
    }

    pub fn integrate(&self, a: &[f64]) -> f64 {
        let h = self.bg.circumference / a.len() as f64;
        a.iter().sum::<f64>() * h * self.bg.sphere_volume()
    }
}

pub fn conformal_schouten_reduced(bg: &S1xS3, u: &ReducedField, t: f64) -> Result<ReducedEndoField> {
    ReducedCalculus::new(*bg, u.grid_n(), DerivativeScheme::Spectral)?.conformal_schouten(u, t)
}

pub fn q_curvature_reduced(bg: &S1xS3, u: &ReducedField) -> Result<Vec<f64>> {
    ReducedCalculus::new(*bg, u.grid_n(), DerivativeScheme::Spectral)?.q_curvature(u)
}

pub fn q_transform_residual(bg: &S1xS3, u: &ReducedField) -> Result<f64> {
    ReducedCalculus::new(*bg, u.grid_n(), DerivativeScheme::Spectral)?.q_transform_residual(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::sigma2;
    use crate::endo::SymEndo4;
    use crate::geometry::conformal_schouten_pointwise;

    const L: f64 = 2.0 * PI;

    fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn grid_invariants() {
        assert!(ReducedField::constant(15, L, 0.0).is_err());
        assert!(ReducedField::constant(17, L, 0.0).is_err());
        assert!(ReducedField::constant(8, L, 0.0).is_err());
        assert!(ReducedField::constant(16, -1.0, 0.0).is_err());
        assert!(ReducedField::constant(16, L, 0.0).is_ok());
    }

    #[test]
    fn derivatives_annihilate_constants() {
        for scheme in [DerivativeScheme::Spectral, DerivativeScheme::Fd4] {
            let ops = DiffOps::new(64, 3.7, scheme).unwrap();
            let c = vec![2.5; 64];
            for order in 1..=4 {
                let d = ops.apply(order, &c);
                let tol = 1e-13 * (64.0f64 / 3.7).powi(order as i32);
                assert!(d.iter().all(|x| x.abs() < tol), "{scheme:?} order {order}");
            }
        }
    }

    #[test]
    fn spectral_derivatives_of_trig_polynomials() {
        let period = 5.0;
        let w = 2.0 * PI / period;
        let f = ReducedField::from_fn(64, period, |x| (3.0 * w * x).sin() + 0.5 * (7.0 * w * x).cos()).unwrap();
        let ops = DiffOps::for_field(&f, DerivativeScheme::Spectral).unwrap();
        let nodes = f.nodes();
        let exact: [Vec<f64>; 4] = [
            nodes.iter().map(|&x| 3.0 * w * (3.0 * w * x).cos() - 3.5 * w * (7.0 * w * x).sin()).collect(),
            nodes.iter().map(|&x| -9.0 * w * w * (3.0 * w * x).sin() - 24.5 * w * w * (7.0 * w * x).cos()).collect(),
            nodes.iter().map(|&x| -27.0 * w.powi(3) * (3.0 * w * x).cos() + 171.5 * w.powi(3) * (7.0 * w * x).sin()).collect(),
            nodes.iter().map(|&x| 81.0 * w.powi(4) * (3.0 * w * x).sin() + 1200.5 * w.powi(4) * (7.0 * w * x).cos()).collect(),
        ];
        for order in 1..=4 {
            let err = sup_diff(&ops.apply(order, f.samples()), &exact[order - 1]);
            assert!(err < 1e-8, "order {order}: {err}");
        }
    }

    #[test]
    fn fd4_converges_at_fourth_order() {
        let mut errs = Vec::new();
        for n in [32, 64, 128] {
            let f = ReducedField::from_fn(n, L, |x| x.sin()).unwrap();
            let ops = DiffOps::for_field(&f, DerivativeScheme::Fd4).unwrap();
            let exact: Vec<f64> = f.nodes().iter().map(|x| x.sin()).collect();
            errs.push(sup_diff(&ops.d4(f.samples()), &exact));
        }
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order > 3.8 && order < 4.2, "observed order {order}");
        }
    }

    #[test]
    fn matrix_matches_apply() {
        for scheme in [DerivativeScheme::Spectral, DerivativeScheme::Fd4] {
            let f = ReducedField::from_fn(32, L, |x| (x.sin() + 0.3 * (2.0 * x).cos()).exp()).unwrap();
            let ops = DiffOps::for_field(&f, scheme).unwrap();
            for order in 1..=4 {
                let m = ops.matrix(order);
                let v = nalgebra::DVector::from_column_slice(f.samples());
                let via_matrix = m * v;
                let direct = ops.apply(order, f.samples());
                assert!(sup_diff(via_matrix.as_slice(), &direct) < 1e-9);
            }
        }
    }

    #[test]
    fn schouten_of_zero_field() {
        let bg = S1xS3::standard();
        let u = ReducedField::constant(32, L, 0.0).unwrap();
        let a = conformal_schouten_reduced(&bg, &u, -1.0).unwrap();
        for i in 0..a.len() {
            assert_eq!((a.lambda_theta[i], a.lambda_sphere[i]), (0.5, 1.5));
            assert_eq!(a.sigma2(i), 9.0);
        }
        // constants have zero derivatives
        let c = ReducedField::constant(32, L, -0.7).unwrap();
        for t in [-1.0, 0.0, 0.6] {
            let a0 = conformal_schouten_reduced(&bg, &u, t).unwrap();
            let ac = conformal_schouten_reduced(&bg, &c, t).unwrap();
            assert!(sup_diff(&a0.lambda_theta, &ac.lambda_theta) < 1e-13);
            assert!(sup_diff(&a0.lambda_sphere, &ac.lambda_sphere) < 1e-13);
        }
    }

    #[test]
    fn schouten_matches_symbolic_substitution() {
        let bg = S1xS3::new(3.0, 1.0).unwrap();
        let eps = 0.2;
        let w = 2.0 * PI / bg.circumference;
        let u = ReducedField::from_fn(64, bg.circumference, |x| eps * (w * x).sin()).unwrap();
        for t in [-2.0, -0.5, 0.0, 0.7, 1.0] {
            let red = conformal_schouten_reduced(&bg, &u, t).unwrap();
            // background Aᵗ_g = diag(−t/2, (2−t)/2, ...), Hessian u″dθ², gradient u′dθ
            let a_bg = SymEndo4::from_diag([-t / 2.0, 1.0 - t / 2.0, 1.0 - t / 2.0, 1.0 - t / 2.0]);
            for (i, x) in u.nodes().into_iter().enumerate() {
                let du = eps * w * (w * x).cos();
                let d2u = -eps * w * w * (w * x).sin();
                let full = conformal_schouten_pointwise(
                    &a_bg,
                    &SymEndo4::from_diag([d2u, 0.0, 0.0, 0.0]),
                    &[du, 0.0, 0.0, 0.0],
                    t,
                );
                let eig = full.diag();
                assert!((red.lambda_theta[i] - eig[0]).abs() < 1e-8);
                assert!((red.lambda_sphere[i] - eig[1]).abs() < 1e-8);
                assert!((red.sigma2(i) - sigma2(&full)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn period_mismatch_is_configuration_error() {
        let bg = S1xS3::standard();
        let u = ReducedField::constant(32, 1.0, 0.0).unwrap();
        assert!(matches!(conformal_schouten_reduced(&bg, &u, 0.0), Err(Error::Config(_))));
    }

    #[test]
    fn non_unit_sphere_rejected() {
        let bg = S1xS3::new(L, 2.0).unwrap();
        assert!(matches!(
            ReducedCalculus::new(bg, 32, DerivativeScheme::Spectral),
            Err(Error::UnsupportedBackground(_))
        ));
        let (unit, c) = bg.unit_sphere_form();
        assert_eq!(unit.sphere_radius, 1.0);
        assert!((unit.circumference - PI).abs() < 1e-15);
        assert!((c + 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn q_vanishes_for_constants() {
        let bg = S1xS3::standard();
        for c in [0.0, 0.4, -1.1] {
            let u = ReducedField::constant(32, L, c).unwrap();
            let q = q_curvature_reduced(&bg, &u).unwrap();
            assert!(q.iter().all(|x| x.abs() < 1e-12), "c = {c}");
            assert!(q_transform_residual(&bg, &u).unwrap() < 1e-12);
        }
    }

    #[test]
    fn q_transform_law_spectral() {
        let bg = S1xS3::standard();
        let u = ReducedField::from_fn(256, L, |x| 0.1 * x.sin()).unwrap();
        let r = q_transform_residual(&bg, &u).unwrap();
        assert!(r < 1e-6, "residual {r}");
    }

    #[test]
    fn flipped_b_tensor_breaks_q_law() {
        // mutation: P' = φ⁗ + 4φ″ must violate the transformation law
        let calc = ReducedCalculus::new(S1xS3::standard(), 128, DerivativeScheme::Spectral).unwrap();
        let u = ReducedField::from_fn(128, L, |x| 0.1 * x.sin()).unwrap();
        let q = calc.q_curvature(&u).unwrap();
        let d4 = calc.ops().d4(u.samples());
        let d2 = calc.ops().d2(u.samples());
        let worst = (0..128)
            .map(|i| (-(d4[i] + 4.0 * d2[i]) - 2.0 * q[i] * (-4.0 * u.samples()[i]).exp()).abs())
            .fold(0.0, f64::max);
        assert!(worst > 0.1, "mutated residual {worst}");
    }

    #[test]
    fn paneitz_on_cosines() {
        let calc = ReducedCalculus::new(S1xS3::standard(), 64, DerivativeScheme::Spectral).unwrap();
        let one = ReducedField::constant(64, L, 3.0).unwrap();
        assert!(calc.paneitz_apply(&one).unwrap().iter().all(|x| x.abs() < 1e-12));
        for k in 1..6 {
            let kf = k as f64;
            let phi = ReducedField::from_fn(64, L, |x| (kf * x).cos()).unwrap();
            let p = calc.paneitz_apply(&phi).unwrap();
            let lam = kf.powi(4) + 4.0 * kf * kf;
            for (pi, x) in p.iter().zip(phi.samples()) {
                assert!((pi - lam * x).abs() < 1e-9 * lam, "k = {k}: {pi} vs {}", lam * x);
            }
        }
    }
}
