//! Continuity method for σ₂^{1/2}(g⁻¹Aᵗ_u) = f·e^{2u} on S¹×S³ with
//! S¹-invariant conformal factors.
//!
//! The path starts at t = δ < 0 with u ≡ 0, which is an exact solution when
//! f = σ₂^{1/2}(A^δ_g), and marches t towards the target. Each step is a
//! damped Newton iteration on the σ₂ form
//!
//!   F(u) = e^{4w}σ₂(g⁻¹Aᵗ_{u+w}) − f²e^{4u},
//!
//! where w is an optional fixed warp of the background (g_w = e^{−2w}g). With
//! w = 0 the data are homogeneous and the solutions are constants. A nonzero
//! warp gives a non-constant f and non-constant solutions, which is what the
//! gradient and Harnack monitors are for.
//!
//! Convergence is judged on the square-root residual e^{2w}σ₂^{1/2} − f·e^{2u}.

pub mod monitors;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cone::pinching_tensors;
use crate::endo::SymEndo4;
use crate::error::{Error, Result};
use crate::geometry::{
    ricci_from_schouten, DerivativeScheme, ReducedCalculus, ReducedEndoField, ReducedField, S1xS3,
};

/// Step halvings allowed per Newton update before a cone exit is reported.
pub const MAX_HALVINGS: usize = 10;
/// Successful steps before the continuation step is doubled.
pub const SUCCESSES_BEFORE_GROWTH: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub delta: f64,
    pub t_target: f64,
    pub grid_n: usize,
    pub t_step_init: f64,
    pub t_step_min: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub cone_margin_min: f64,
    pub scheme: DerivativeScheme,
    /// Cosine amplitudes a_k of the warp w(θ) = Σ a_k cos(2πkθ/L), k ≥ 1.
    pub warp: Vec<f64>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            delta: -1.0,
            t_target: 0.0,
            grid_n: 128,
            t_step_init: 0.25,
            t_step_min: 1e-6,
            newton_tol: 1e-10,
            newton_max_iter: 40,
            cone_margin_min: 0.0,
            scheme: DerivativeScheme::Spectral,
            warp: Vec::new(),
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.delta < 0.0) {
            return bad(format!("delta must be negative, got {}", self.delta));
        }
        if !(self.delta < self.t_target && self.t_target <= 1.0) {
            return bad(format!(
                "need delta < t_target <= 1, got delta = {}, t_target = {}",
                self.delta, self.t_target
            ));
        }
        if !(self.t_step_init > 0.0 && self.t_step_min > 0.0 && self.t_step_min <= self.t_step_init) {
            return bad(format!(
                "need 0 < t_step_min <= t_step_init, got {} and {}",
                self.t_step_min, self.t_step_init
            ));
        }
        if !(self.newton_tol > 0.0) {
            return bad(format!("newton_tol must be positive, got {}", self.newton_tol));
        }
        if self.newton_max_iter == 0 {
            return bad("newton_max_iter must be at least 1".into());
        }
        if !(self.cone_margin_min >= 0.0) {
            return bad(format!("cone_margin_min must be >= 0, got {}", self.cone_margin_min));
        }
        if self.warp.iter().any(|a| !a.is_finite()) {
            return bad("warp amplitudes must be finite".into());
        }
        Ok(())
    }

    pub fn is_homogeneous(&self) -> bool {
        self.warp.iter().all(|&a| a == 0.0)
    }
}

/// Per-step diagnostics of an accepted state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub grad_max: f64,
    /// u_max − u_min.
    pub harnack_gap: f64,
    pub residual_sup: f64,
    pub cone_margin: f64,
    pub newton_iters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathState {
    pub t: f64,
    pub u: ReducedField,
    pub f_squared: Vec<f64>,
    /// min over the grid of min(σ₁, σ₂) of g⁻¹Aᵗ_{u+w}.
    pub cone_margin: f64,
    pub diagnostics: DiagnosticsRecord,
    pub converged: bool,
    /// Smallest cone margin over every Newton iterate that produced this state.
    pub iterate_margin_min: f64,
    /// Square-root residual sup norm after each Newton iterate (index 0 is the start).
    pub residual_history: Vec<f64>,
    pub background: S1xS3,
    pub scheme: DerivativeScheme,
    pub warp: Vec<f64>,
}

/// f² = σ₂(g⁻¹A^δ_g) = (3/2)(2−δ)(1−δ) on S¹×S³ with a unit sphere.
pub fn choose_f(delta: f64) -> Result<f64> {
    if !(delta < 0.0) {
        return Err(Error::InvalidInput(format!(
            "path start delta = {delta} must be negative for A^delta to be positive definite"
        )));
    }
    Ok((1.5 * (2.0 - delta) * (1.0 - delta)).sqrt())
}

/// σ₂(g⁻¹Aᵗ_g) on S¹×S³ with a unit sphere.
pub fn background_sigma2(t: f64) -> f64 {
    1.5 * (2.0 - t) * (1.0 - t)
}

/// The constant solution ¼ln(σ₂(Aᵗ_g)/f²) for homogeneous data.
pub fn homogeneous_solution(delta: f64, t: f64) -> Result<f64> {
    let f = choose_f(delta)?;
    Ok(0.25 * (background_sigma2(t) / (f * f)).ln())
}

pub fn warp_samples(amplitudes: &[f64], n: usize, period: f64) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let theta = j as f64 * period / n as f64;
            amplitudes
                .iter()
                .enumerate()
                .map(|(k, a)| a * (2.0 * PI * (k + 1) as f64 * theta / period).cos())
                .sum()
        })
        .collect()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// The discretized problem on one grid: background, warp and right-hand side.
#[derive(Debug, Clone)]
pub struct ContinuityProblem {
    calc: ReducedCalculus,
    delta: f64,
    warp: Vec<f64>,
    warp_amplitudes: Vec<f64>,
    f_squared: Vec<f64>,
    d1: DMatrix<f64>,
    d2: DMatrix<f64>,
}

/// Jacobian of u ↦ F(u) as a(θ)∂² + b(θ)∂ + c(θ).
#[derive(Debug, Clone)]
pub struct Linearization {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    matrix: DMatrix<f64>,
}

impl Linearization {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, phi: &[f64]) -> Vec<f64> {
        let v = nalgebra::DVector::from_column_slice(phi);
        (&self.matrix * v).iter().copied().collect()
    }

    pub fn min_singular_value(&self) -> f64 {
        self.matrix
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

impl ContinuityProblem {
    pub fn new(bg: S1xS3, cfg: &SolveConfig) -> Result<Self> {
        cfg.validate()?;
        let calc = ReducedCalculus::new(bg, cfg.grid_n, cfg.scheme)?;
        let n = cfg.grid_n;
        let warp = warp_samples(&cfg.warp, n, bg.circumference);
        let d1 = calc.ops().matrix(1);
        let d2 = calc.ops().matrix(2);
        let mut problem = Self {
            calc,
            delta: cfg.delta,
            warp,
            warp_amplitudes: cfg.warp.clone(),
            f_squared: Vec::new(),
            d1,
            d2,
        };
        choose_f(cfg.delta)?;
        let zero = vec![0.0; n];
        let a_delta = problem.schouten(&zero, cfg.delta);
        let mut f_squared = Vec::with_capacity(n);
        for i in 0..n {
            let s1 = a_delta.sigma1(i);
            let s2 = a_delta.sigma2(i);
            if !(s1 > 0.0 && s2 > 0.0 && a_delta.lambda_theta[i] > 0.0 && a_delta.lambda_sphere[i] > 0.0) {
                return Err(Error::Hypothesis(format!(
                    "A^delta of the warped background is not positive definite at index {i}"
                )));
            }
            f_squared.push((4.0 * problem.warp[i]).exp() * s2);
        }
        problem.f_squared = f_squared;
        Ok(problem)
    }

    pub fn calculus(&self) -> &ReducedCalculus {
        &self.calc
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn warp(&self) -> &[f64] {
        &self.warp
    }

    pub fn f_squared(&self) -> &[f64] {
        &self.f_squared
    }

    pub fn grid_n(&self) -> usize {
        self.f_squared.len().max(self.warp.len())
    }

    fn field(&self, samples: Vec<f64>) -> Result<ReducedField> {
        ReducedField::new(samples, self.calc.background().circumference)
    }

    /// Eigenvalues of g⁻¹Aᵗ_{u+w}.
    fn schouten(&self, u: &[f64], t: f64) -> ReducedEndoField {
        let v: Vec<f64> = u.iter().zip(&self.warp).map(|(a, b)| a + b).collect();
        let ops = self.calc.ops();
        let dv = ops.d1(&v);
        let d2v = ops.d2(&v);
        let (lambda_theta, lambda_sphere) = dv
            .iter()
            .zip(&d2v)
            .map(|(&a, &b)| crate::geometry::reduced::schouten_eigenvalues(t, a, b))
            .unzip();
        ReducedEndoField {
            lambda_theta,
            lambda_sphere,
        }
    }

    /// Cone margin, or the first grid index outside Γ₂⁺.
    fn cone_scan(&self, a: &ReducedEndoField, t: f64) -> Result<f64> {
        let mut margin = f64::INFINITY;
        for i in 0..a.len() {
            let (s1, s2) = (a.sigma1(i), a.sigma2(i));
            if !(s1 > 0.0 && s2 > 0.0) {
                return Err(Error::ConeViolation {
                    index: i,
                    t,
                    sigma1: s1,
                    sigma2: s2,
                });
            }
            margin = margin.min(s1.min(s2));
        }
        Ok(margin)
    }

    pub fn cone_margin(&self, u: &[f64], t: f64) -> Result<f64> {
        self.cone_scan(&self.schouten(u, t), t)
    }

    /// e^{2w}σ₂^{1/2}(g⁻¹Aᵗ_{u+w}) − f·e^{2u}; errors on a cone exit.
    pub fn residual(&self, u: &[f64], t: f64) -> Result<Vec<f64>> {
        let a = self.schouten(u, t);
        self.cone_scan(&a, t)?;
        Ok((0..u.len())
            .map(|i| {
                (2.0 * self.warp[i]).exp() * a.sigma2(i).sqrt() - self.f_squared[i].sqrt() * (2.0 * u[i]).exp()
            })
            .collect())
    }

    /// e^{4w}σ₂(g⁻¹Aᵗ_{u+w}) − f²e^{4u}, defined everywhere.
    pub fn residual_sigma2(&self, u: &[f64], t: f64) -> Vec<f64> {
        let a = self.schouten(u, t);
        (0..u.len())
            .map(|i| (4.0 * self.warp[i]).exp() * a.sigma2(i) - self.f_squared[i] * (4.0 * u[i]).exp())
            .collect()
    }

    /// Exact Jacobian of [`Self::residual_sigma2`].
    ///
    /// With σ₂ = 3λ_θλ_s + 3λ_s², ∂σ₂/∂λ_θ = 3λ_s and ∂σ₂/∂λ_s = 3(λ_θ + 2λ_s).
    /// The second-order coefficient equals the θθ entry of Lᵗ(Aᵗ).
    pub fn linearization(&self, u: &[f64], t: f64) -> Result<Linearization> {
        let a_field = self.schouten(u, t);
        self.cone_scan(&a_field, t)?;
        let v: Vec<f64> = u.iter().zip(&self.warp).map(|(a, b)| a + b).collect();
        let dv = self.calc.ops().d1(&v);
        let n = u.len();
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            let (lt, ls) = (a_field.lambda_theta[i], a_field.lambda_sphere[i]);
            let d_theta = 3.0 * ls;
            let d_sphere = 3.0 * (lt + 2.0 * ls);
            let e4w = (4.0 * self.warp[i]).exp();
            a.push(e4w * (d_theta * 0.5 * (3.0 - t) + d_sphere * 0.5 * (1.0 - t)));
            b.push(e4w * (d_theta * t * dv[i] - d_sphere * (2.0 - t) * dv[i]));
            c.push(-4.0 * self.f_squared[i] * (4.0 * u[i]).exp());
        }
        let mut matrix = DMatrix::from_fn(n, n, |i, j| a[i] * self.d2[(i, j)] + b[i] * self.d1[(i, j)]);
        for i in 0..n {
            matrix[(i, i)] += c[i];
        }
        Ok(Linearization { a, b, c, matrix })
    }

    fn diagnostics(&self, u: &[f64], t: f64, residual_sup: f64, cone_margin: f64, iters: usize) -> DiagnosticsRecord {
        let grad = self.calc.ops().d1(u);
        let u_max = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let u_min = u.iter().copied().fold(f64::INFINITY, f64::min);
        DiagnosticsRecord {
            t,
            u_min,
            u_max,
            grad_max: sup(&grad),
            harnack_gap: u_max - u_min,
            residual_sup,
            cone_margin,
            newton_iters: iters,
        }
    }

    /// Wraps samples at parameter t as a state; `converged` reflects the tolerance.
    pub fn state_at(&self, u: Vec<f64>, t: f64, newton_tol: f64) -> Result<PathState> {
        let res = sup(&self.residual(&u, t)?);
        let margin = self.cone_margin(&u, t)?;
        let diagnostics = self.diagnostics(&u, t, res, margin, 0);
        Ok(PathState {
            t,
            f_squared: self.f_squared.clone(),
            cone_margin: margin,
            diagnostics,
            converged: res < newton_tol,
            iterate_margin_min: margin,
            residual_history: vec![res],
            background: *self.calc.background(),
            scheme: self.calc.ops().scheme(),
            warp: self.warp_amplitudes.clone(),
            u: self.field(u)?,
        })
    }

    /// u ≡ 0 at t = δ.
    pub fn initial_state(&self, newton_tol: f64) -> Result<PathState> {
        self.state_at(vec![0.0; self.f_squared.len()], self.delta, newton_tol)
    }

    /// Damped Newton iteration at parameter t starting from `state.u`.
    ///
    /// Each update is halved (at most [`MAX_HALVINGS`] times) until the iterate
    /// is inside the cone with a smaller residual; if no halving stays in the
    /// cone the cone violation is returned.
    pub fn newton_solve(&self, state: &PathState, t: f64, cfg: &SolveConfig) -> Result<PathState> {
        if t > 1.0 {
            return Err(Error::InvalidInput(format!("t = {t} exceeds 1")));
        }
        let mut u = state.u.samples().to_vec();
        if u.len() != self.f_squared.len() {
            return Err(Error::Config(format!(
                "state has {} samples, problem expects {}",
                u.len(),
                self.f_squared.len()
            )));
        }
        let mut margin = self.cone_margin(&u, t)?;
        if !(margin > cfg.cone_margin_min) {
            return Err(Error::InvalidInput(format!(
                "cone margin {margin} at t = {t} does not exceed cone_margin_min = {}",
                cfg.cone_margin_min
            )));
        }
        let mut margin_min = margin;
        let mut res = sup(&self.residual(&u, t)?);
        let mut history = vec![res];
        let mut iters = 0;
        while res >= cfg.newton_tol {
            if iters == cfg.newton_max_iter {
                return Err(Error::NonConvergence {
                    iterations: iters,
                    residual: res,
                });
            }
            let jac = self.linearization(&u, t)?;
            let rhs = nalgebra::DVector::from_vec(self.residual_sigma2(&u, t));
            let step = jac
                .matrix
                .clone()
                .lu()
                .solve(&rhs)
                .ok_or(Error::NonConvergence {
                    iterations: iters,
                    residual: res,
                })?;
            let mut alpha = 1.0;
            let mut accepted: Option<(Vec<f64>, f64, f64)> = None;
            let mut fallback: Option<(Vec<f64>, f64, f64)> = None;
            let mut last_violation = None;
            for _ in 0..=MAX_HALVINGS {
                let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(x, s)| x - alpha * s).collect();
                match self.residual(&trial, t) {
                    Ok(r) => {
                        let trial_res = sup(&r);
                        let trial_margin = self.cone_margin(&trial, t)?;
                        if trial_res < res {
                            accepted = Some((trial, trial_res, trial_margin));
                            break;
                        }
                        if fallback.is_none() {
                            fallback = Some((trial, trial_res, trial_margin));
                        }
                    }
                    Err(e @ Error::ConeViolation { .. }) => last_violation = Some(e),
                    Err(e) => return Err(e),
                }
                alpha *= 0.5;
            }
            let (next, next_res, next_margin) = match accepted.or(fallback) {
                Some(x) => x,
                None => return Err(last_violation.expect("no trial evaluated")),
            };
            iters += 1;
            u = next;
            res = next_res;
            margin = next_margin;
            margin_min = margin_min.min(margin);
            history.push(res);
        }
        let diagnostics = self.diagnostics(&u, t, res, margin, iters);
        Ok(PathState {
            t,
            f_squared: self.f_squared.clone(),
            cone_margin: margin,
            diagnostics,
            converged: true,
            iterate_margin_min: margin_min,
            residual_history: history,
            background: *self.calc.background(),
            scheme: self.calc.ops().scheme(),
            warp: self.warp_amplitudes.clone(),
            u: self.field(u)?,
        })
    }

    /// Marches t from δ to the target. On failure the error carries the trace
    /// of accepted states.
    pub fn continue_path(&self, cfg: &SolveConfig) -> Result<(PathState, Vec<DiagnosticsRecord>)> {
        let mut state = self.newton_solve(&self.initial_state(cfg.newton_tol)?, self.delta, cfg)?;
        let mut trace = vec![state.diagnostics];
        let mut h = cfg.t_step_init;
        let mut successes = 0;
        while state.t < cfg.t_target {
            let t_next = if cfg.t_target - state.t <= h { cfg.t_target } else { state.t + h };
            match self.newton_solve(&state, t_next, cfg) {
                Ok(next) => {
                    state = next;
                    trace.push(state.diagnostics);
                    successes += 1;
                    if successes >= SUCCESSES_BEFORE_GROWTH {
                        h = (2.0 * h).min(cfg.t_step_init);
                        successes = 0;
                    }
                }
                Err(e) => {
                    successes = 0;
                    if h <= cfg.t_step_min {
                        return Err(Error::PathFailure {
                            t_reached: state.t,
                            t_target: cfg.t_target,
                            reason: format!("step reached t_step_min = {}: {e}", cfg.t_step_min),
                            trace,
                        });
                    }
                    h = (0.5 * h).max(cfg.t_step_min);
                }
            }
        }
        Ok((state, trace))
    }
}

pub fn continue_path(bg: S1xS3, cfg: &SolveConfig) -> Result<(PathState, Vec<DiagnosticsRecord>)> {
    ContinuityProblem::new(bg, cfg)?.continue_path(cfg)
}

/// Pinching verdict (t₀−1)R̃g̃ < 2Ric̃ < (2−t₀)R̃g̃ for g̃ = e^{−2(u+w)}g.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicciVerdict {
    pub lower_ok: bool,
    pub upper_ok: bool,
    /// min over the grid of the smallest eigenvalue of 2Ric̃ − (t₀−1)R̃g̃.
    pub lower_margin: f64,
    /// min over the grid of the smallest eigenvalue of (2−t₀)R̃g̃ − 2Ric̃.
    pub upper_margin: f64,
    /// Same verdicts via A^{t₀} + ½σ₁I ≻ 0 and T₁(A^{t₀}) ≻ 0.
    pub schouten_lower_ok: bool,
    pub schouten_upper_ok: bool,
}

impl RicciVerdict {
    pub fn both(&self) -> bool {
        self.lower_ok && self.upper_ok
    }
}

pub fn ricci_verdict(state: &PathState, t0: f64) -> Result<RicciVerdict> {
    if !state.converged {
        return Err(Error::StaleState(format!(
            "state at t = {} is not converged (residual {:e})",
            state.t, state.diagnostics.residual_sup
        )));
    }
    if (state.t - t0).abs() > 1e-12 {
        return Err(Error::StaleState(format!(
            "state is at t = {}, verdict requested at t0 = {t0}",
            state.t
        )));
    }
    let cfg = SolveConfig {
        delta: -1.0,
        t_target: 1.0,
        grid_n: state.u.grid_n(),
        scheme: state.scheme,
        warp: state.warp.clone(),
        ..SolveConfig::default()
    };
    let calc = ReducedCalculus::new(state.background, cfg.grid_n, cfg.scheme)?;
    let w = warp_samples(&state.warp, cfg.grid_n, state.background.circumference);
    let v: Vec<f64> = state.u.samples().iter().zip(&w).map(|(a, b)| a + b).collect();
    let vf = state.u.with_samples(v.clone())?;
    let a_t = calc.conformal_schouten(&vf, t0)?;
    for i in 0..a_t.len() {
        let (s1, s2) = (a_t.sigma1(i), a_t.sigma2(i));
        if !(s1 > 0.0 && s2 > 0.0) {
            return Err(Error::ConeViolation {
                index: i,
                t: t0,
                sigma1: s1,
                sigma2: s2,
            });
        }
    }
    let a1 = calc.conformal_schouten(&vf, 1.0)?;
    let mut lower_margin = f64::INFINITY;
    let mut upper_margin = f64::INFINITY;
    let mut pin_lower = f64::INFINITY;
    let mut pin_upper = f64::INFINITY;
    for i in 0..a1.len() {
        let scale = (2.0 * v[i]).exp();
        let (ric, r) = ricci_from_schouten(&(a1.endo(i) * scale));
        let lower = ric * 2.0 - SymEndo4::scalar((t0 - 1.0) * r);
        let upper = SymEndo4::scalar((2.0 - t0) * r) - ric * 2.0;
        lower_margin = lower_margin.min(diag_min(&lower));
        upper_margin = upper_margin.min(diag_min(&upper));
        let (t1, half) = pinching_tensors(&(a_t.endo(i) * scale));
        pin_upper = pin_upper.min(diag_min(&t1));
        pin_lower = pin_lower.min(diag_min(&half));
    }
    Ok(RicciVerdict {
        lower_ok: lower_margin > 0.0,
        upper_ok: upper_margin > 0.0,
        lower_margin,
        upper_margin,
        schouten_lower_ok: pin_lower > 0.0,
        schouten_upper_ok: pin_upper > 0.0,
    })
}

// The reduced endomorphisms are diagonal in the adapted frame.
fn diag_min(a: &SymEndo4) -> f64 {
    a.diag().into_iter().fold(f64::INFINITY, f64::min)
}
