//! Randomized and closed-form property suites, runnable from the CLI.
//!
//! Every suite is deterministic given the seed. A [`Mutation`] deliberately
//! breaks one operator so that the suite guarding it can be seen to fail.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cone::{
    concavity_gap, cone_check, hat_reflection, l_operator, newton_transform, pinching_tensors, shifted_sigma2, sigma1,
    sigma2, t_shift,
};
use crate::error::Result;
use crate::geometry::{
    curvature_of, Background, DerivativeScheme, ReducedCalculus, ReducedField, S1xS3,
};
use crate::ledger::{self, builtin};
use crate::paneitz::{
    positivity_certificate, quadratic_form, reduced_pairing, reduced_quadratic_form, summarize_spectrum,
    ProductSpectrumInput, TestFunction,
};
use crate::sampling;
use crate::solver::{self, monitors, ContinuityProblem, SolveConfig};

pub const RANDOM_TRIALS: usize = 1000;
pub const SHIFT_TOL: f64 = 1e-10;
pub const CONCAVITY_TOL: f64 = 1e-10;
pub const HAT_TOL: f64 = 1e-12;
pub const JACOBIAN_TOL: f64 = 1e-6;
pub const JACOBIAN_STATES: usize = 20;
pub const Q_LAW_TOL: f64 = 1e-6;
pub const BOCHNER_TOL: f64 = 1e-8;
pub const BOCHNER_FIELDS: usize = 50;
pub const SELF_ADJOINT_TOL: f64 = 1e-9;
pub const GRADIENT_SPREAD_TOL: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    #[default]
    None,
    /// Uses P′φ = φ⁗ + 4φ″ in the Q transformation law.
    FlipPaneitzB,
    /// Flips the sign of the (1−t)/2 shift of Lᵗ in the principal coefficient.
    WrongLShift,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub trials: usize,
    pub failures: usize,
    pub tolerance: f64,
    /// Worst observed value of the quantity compared against the tolerance.
    pub worst: f64,
}

impl SuiteResult {
    fn from_trials(name: &str, tolerance: f64, outcomes: impl IntoIterator<Item = (bool, f64)>, worst_is_max: bool) -> Self {
        let mut trials = 0;
        let mut failures = 0;
        let mut worst = if worst_is_max { f64::NEG_INFINITY } else { f64::INFINITY };
        for (ok, value) in outcomes {
            trials += 1;
            if !ok {
                failures += 1;
            }
            worst = if worst_is_max { worst.max(value) } else { worst.min(value) };
        }
        Self {
            name: name.into(),
            passed: failures == 0 && trials > 0,
            trials,
            failures,
            tolerance,
            worst,
        }
    }

    fn from_error(name: &str, tolerance: f64, err: crate::error::Error) -> Self {
        eprintln!("suite {name} aborted: {err}");
        Self {
            name: name.into(),
            passed: false,
            trials: 0,
            failures: 1,
            tolerance,
            worst: f64::NAN,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

pub fn cgb_identity() -> SuiteResult {
    let mut recs: Vec<_> = [Background::round_s4(1.0), Background::s1xs3(2.0 * PI, 1.0)]
        .into_iter()
        .chain([
            Background::product_surfaces(1.0, 1.0, 4.0 * PI, 4.0 * PI),
            Background::hyperbolic_product(2).expect("genus 2"),
        ])
        .map(|bg| {
            let pkg = curvature_of(&bg).expect("frame-level background");
            ledger::TopologyRecord::from_package(&bg.name(), &pkg, 1.0, "")
        })
        .collect();
    recs.extend(builtin::all());
    SuiteResult::from_trials(
        "cgb_identity",
        crate::geometry::CGB_TOL,
        recs.iter().map(|r| (r.cgb_residual() < crate::geometry::CGB_TOL, r.cgb_residual())),
        true,
    )
}

pub fn f2_agreement() -> SuiteResult {
    let bgs = [
        Background::round_s4(1.0),
        Background::round_s4(0.6),
        Background::s1xs3(2.0 * PI, 1.0),
        Background::s1xs3(3.0, 1.7),
        Background::product_surfaces(1.0, 1.0, 4.0 * PI, 4.0 * PI),
        Background::product_surfaces(1.0, -1.0, 4.0 * PI, 4.0 * PI),
        Background::hyperbolic_product(3).expect("genus 3"),
    ];
    SuiteResult::from_trials(
        "f2_two_formulas",
        ledger::F2_AGREEMENT_TOL,
        bgs.iter().map(|bg| {
            let pkg = curvature_of(bg).expect("frame-level background");
            let (a, b) = ledger::f2_invariant_pair(&pkg);
            let q_total = crate::geometry::q_curvature_homogeneous(&pkg) * pkg.volume;
            let err = (a - b).abs() / a.abs().max(1.0);
            let q_err = (q_total - 0.5 * a).abs() / a.abs().max(1.0);
            (err < ledger::F2_AGREEMENT_TOL && q_err < ledger::F2_AGREEMENT_TOL, err.max(q_err))
        }),
        true,
    )
}

pub fn cross_normalization() -> SuiteResult {
    let mut recs = builtin::all();
    let mut edge = builtin::s4();
    edge.q_total = -edge.yamabe * edge.yamabe / 6.0;
    recs.push(edge);
    SuiteResult::from_trials(
        "assumption_cross_normalization",
        0.0,
        recs.iter().filter(|r| r.yamabe > 0.0).map(|r| {
            let main = ledger::check_assumption_main(r, 0.0).map(|x| x.1).ok();
            let pan = ledger::check_assumption_paneitz(r).ok();
            (main.is_some() && main == pan, 0.0)
        }),
        true,
    )
}

pub fn shift_identity(seed: u64) -> SuiteResult {
    let mut rng = sampling::rng(seed);
    let mut outcomes = Vec::with_capacity(RANDOM_TRIALS + 2);
    for _ in 0..RANDOM_TRIALS {
        let a1 = sampling::random_symmetric(&mut rng, 1.0);
        let t = rng.random_range(-3.0..=1.0);
        let lhs = sigma2(&t_shift(&a1, t));
        let rhs = shifted_sigma2(&a1, t);
        let err = (lhs - rhs).abs() / rhs.abs().max(lhs.abs()).max(1.0);
        outcomes.push((err < SHIFT_TOL, err));
    }
    for bg in [Background::round_s4(1.0), Background::s1xs3(2.0 * PI, 1.0)] {
        let pkg = curvature_of(&bg).expect("frame-level background");
        for t in [-1.0, 0.0, 0.5] {
            let lhs = sigma2(&crate::geometry::schouten_t(&pkg, t));
            let rhs = shifted_sigma2(&pkg.schouten1, t);
            let err = (lhs - rhs).abs() / rhs.abs().max(1.0);
            outcomes.push((err < SHIFT_TOL, err));
        }
    }
    SuiteResult::from_trials("shift_identity", SHIFT_TOL, outcomes, true)
}

pub fn cone_convexity(seed: u64) -> SuiteResult {
    let mut rng = sampling::rng(seed);
    SuiteResult::from_trials(
        "cone_convexity",
        0.0,
        (0..RANDOM_TRIALS).map(|_| {
            let a = sampling::random_normalized_cone_element(&mut rng);
            let b = sampling::random_normalized_cone_element(&mut rng);
            let s: f64 = rng.random();
            let v = cone_check(&(a * (1.0 - s) + b * s));
            (v.in_gamma2_plus, v.margin)
        }),
        false,
    )
}

pub fn newton_and_l_positivity(seed: u64) -> SuiteResult {
    let mut rng = sampling::rng(seed);
    SuiteResult::from_trials(
        "newton_and_l_positivity",
        0.0,
        (0..RANDOM_TRIALS).map(|_| {
            let a = sampling::random_normalized_cone_element(&mut rng);
            let t = rng.random_range(-3.0..=1.0);
            let t1 = newton_transform(&a).min_eigenvalue();
            let l = l_operator(&a, t).min_eigenvalue();
            (t1 > 0.0 && l > 0.0, t1.min(l))
        }),
        false,
    )
}

pub fn concavity(seed: u64) -> SuiteResult {
    let mut rng = sampling::rng(seed);
    SuiteResult::from_trials(
        "garding_concavity",
        CONCAVITY_TOL,
        (0..RANDOM_TRIALS).map(|_| {
            let a = sampling::random_cone_element(&mut rng);
            let b = sampling::random_cone_element(&mut rng);
            let s: f64 = rng.random();
            let gap = concavity_gap(&a, &b, s).expect("cone inputs");
            (gap >= -CONCAVITY_TOL, gap)
        }),
        false,
    )
}

pub fn hat_reflection_invariance(seed: u64) -> SuiteResult {
    let mut rng = sampling::rng(seed);
    SuiteResult::from_trials(
        "hat_reflection",
        HAT_TOL,
        (0..RANDOM_TRIALS).map(|_| {
            let a = sampling::random_symmetric(&mut rng, 1.0);
            let h = hat_reflection(&a);
            let scale = a.frobenius_norm().powi(2).max(1.0);
            let e1 = (sigma1(&h) - sigma1(&a)).abs() / scale.sqrt();
            let e2 = (sigma2(&h) - sigma2(&a)).abs() / scale;
            (e1 < HAT_TOL && e2 < HAT_TOL, e1.max(e2))
        }),
        true,
    )
}

pub fn pinching_positivity(seed: u64) -> SuiteResult {
    let mut rng = sampling::rng(seed);
    SuiteResult::from_trials(
        "pinching_tensors",
        0.0,
        (0..RANDOM_TRIALS).map(|_| {
            let a = sampling::random_normalized_cone_element(&mut rng);
            let (t1, half) = pinching_tensors(&a);
            let m = t1.min_eigenvalue().min(half.min_eigenvalue());
            (m > 0.0, m)
        }),
        false,
    )
}

/// σ₂^{1/2} of the reduced Aᵗ is concave in u″ for fixed (t, u′) inside the cone.
pub fn operator_concavity(seed: u64) -> SuiteResult {
    use crate::geometry::reduced::schouten_eigenvalues;
    let mut rng = sampling::rng(seed);
    let root = |t: f64, du: f64, d2u: f64| {
        let (lt, ls) = schouten_eigenvalues(t, du, d2u);
        let (s1, s2) = (lt + 3.0 * ls, 3.0 * lt * ls + 3.0 * ls * ls);
        (s1 > 0.0 && s2 > 0.0).then(|| s2.sqrt())
    };
    let mut outcomes = Vec::with_capacity(RANDOM_TRIALS);
    while outcomes.len() < RANDOM_TRIALS {
        let t = rng.random_range(-2.0..=1.0);
        let du = rng.random_range(-0.5..=0.5);
        let (h1, h2) = (rng.random_range(-1.0..=3.0), rng.random_range(-1.0..=3.0));
        if let (Some(a), Some(b)) = (root(t, du, h1), root(t, du, h2)) {
            let mid = root(t, du, 0.5 * (h1 + h2)).unwrap_or(f64::NEG_INFINITY);
            let gap = mid - 0.5 * (a + b);
            outcomes.push((gap >= -CONCAVITY_TOL, gap));
        }
    }
    SuiteResult::from_trials("operator_concavity", CONCAVITY_TOL, outcomes, false)
}

/// Central-difference Jacobian of the σ₂-form residual.
pub fn finite_difference_jacobian(problem: &ContinuityProblem, u: &[f64], t: f64) -> DMatrix<f64> {
    let n = u.len();
    let mut jac = DMatrix::zeros(n, n);
    let mut work = u.to_vec();
    for j in 0..n {
        let h = 1e-6 * u[j].abs().max(1.0);
        work[j] = u[j] + h;
        let plus = problem.residual_sigma2(&work, t);
        work[j] = u[j] - h;
        let minus = problem.residual_sigma2(&work, t);
        work[j] = u[j];
        for i in 0..n {
            jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    jac
}

/// Random (u, t) with Aᵗ_u in the cone: a constant plus small band-limited modes.
pub fn random_cone_state(rng: &mut impl Rng, problem: &ContinuityProblem, n: usize) -> (Vec<f64>, f64) {
    loop {
        let t = rng.random_range(-1.0..=0.9);
        let c = rng.random_range(-1.0..=0.5);
        let u = sampling::random_band_limited(rng, n, 2.0 * PI, 4, 0.08, c).expect("valid grid");
        let u = u.into_samples();
        if problem.cone_margin(&u, t).is_ok() {
            return (u, t);
        }
    }
}

pub fn jacobian_consistency(seed: u64, mutation: Mutation) -> SuiteResult {
    const NAME: &str = "jacobian_consistency";
    let n = 32;
    let cfg = SolveConfig {
        grid_n: n,
        ..SolveConfig::default()
    };
    let problem = match ContinuityProblem::new(S1xS3::standard(), &cfg) {
        Ok(p) => p,
        Err(e) => return SuiteResult::from_error(NAME, JACOBIAN_TOL, e),
    };
    let d2 = problem.calculus().ops().matrix(2);
    let mut rng = sampling::rng(seed);
    let mut outcomes = Vec::with_capacity(JACOBIAN_STATES);
    for _ in 0..JACOBIAN_STATES {
        let (u, t) = random_cone_state(&mut rng, &problem, n);
        let lin = match problem.linearization(&u, t) {
            Ok(l) => l,
            Err(e) => return SuiteResult::from_error(NAME, JACOBIAN_TOL, e),
        };
        let mut analytic = lin.matrix().clone();
        if mutation == Mutation::WrongLShift {
            // principal coefficient rebuilt from Lᵗ with the shift sign flipped
            let a_field = problem
                .calculus()
                .conformal_schouten(&ReducedField::new(u.clone(), 2.0 * PI).expect("grid"), t)
                .expect("grid");
            for i in 0..n {
                let wrong = l_operator(&a_field.endo(i), 2.0 - t).get(0, 0);
                for j in 0..n {
                    analytic[(i, j)] += (wrong - lin.a[i]) * d2[(i, j)];
                }
            }
        }
        let fd = finite_difference_jacobian(&problem, &u, t);
        let scale = fd.amax().max(1e-300);
        let err = (&analytic - &fd).amax() / scale;
        outcomes.push((err < JACOBIAN_TOL, err));
    }
    SuiteResult::from_trials(NAME, JACOBIAN_TOL, outcomes, true)
}

/// sup |−P u + 2Q_g − 2Q̃e^{−4u}| for u = 0.1 sin θ on S¹×S³.
pub fn q_law_residual(n: usize, scheme: DerivativeScheme, mutation: Mutation) -> Result<f64> {
    let calc = ReducedCalculus::new(S1xS3::standard(), n, scheme)?;
    let u = ReducedField::from_fn(n, 2.0 * PI, |x| 0.1 * x.sin())?;
    if mutation != Mutation::FlipPaneitzB {
        return calc.q_transform_residual(&u);
    }
    let zero = u.with_samples(vec![0.0; n])?;
    let q_bg = calc.q_curvature(&zero)?;
    let q_new = calc.q_curvature(&u)?;
    let d4 = calc.ops().d4(u.samples());
    let d2 = calc.ops().d2(u.samples());
    Ok((0..n)
        .map(|i| {
            let pu = d4[i] + 4.0 * d2[i];
            (-pu + 2.0 * q_bg[i] - 2.0 * q_new[i] * (-4.0 * u.samples()[i]).exp()).abs()
        })
        .fold(0.0, f64::max))
}

pub fn q_transform_law(mutation: Mutation) -> SuiteResult {
    match q_law_residual(256, DerivativeScheme::Spectral, mutation) {
        Ok(r) => SuiteResult::from_trials("q_transform_law", Q_LAW_TOL, [(r < Q_LAW_TOL, r)], true),
        Err(e) => SuiteResult::from_error("q_transform_law", Q_LAW_TOL, e),
    }
}

pub fn paneitz_self_adjoint(seed: u64) -> SuiteResult {
    let n = 64;
    let calc = ReducedCalculus::new(S1xS3::standard(), n, DerivativeScheme::Spectral).expect("grid");
    let mut rng = sampling::rng(seed);
    SuiteResult::from_trials(
        "paneitz_self_adjoint",
        SELF_ADJOINT_TOL,
        (0..50).map(|_| {
            let phi = sampling::random_band_limited(&mut rng, n, 2.0 * PI, 8, 1.0, 0.0).expect("grid");
            let psi = sampling::random_band_limited(&mut rng, n, 2.0 * PI, 8, 1.0, 0.0).expect("grid");
            let a = reduced_pairing(&calc, &phi, &psi).expect("grid");
            let b = reduced_pairing(&calc, &psi, &phi).expect("grid");
            let scale = reduced_pairing(&calc, &phi, &phi).expect("grid").abs()
                + reduced_pairing(&calc, &psi, &psi).expect("grid").abs();
            let err = (a - b).abs() / scale.max(1e-300);
            (err < SELF_ADJOINT_TOL, err)
        }),
        true,
    )
}

pub fn bochner_split(seed: u64) -> SuiteResult {
    let n = 128;
    let bg = Background::S1xS3(S1xS3::standard());
    let mut rng = sampling::rng(seed);
    SuiteResult::from_trials(
        "bochner_split",
        BOCHNER_TOL,
        (0..BOCHNER_FIELDS).map(|_| {
            let phi = sampling::random_band_limited(&mut rng, n, 2.0 * PI, 10, 1.0, 0.3).expect("grid");
            let rep = quadratic_form(&bg, &TestFunction::Reduced(phi)).expect("reduced field");
            let res = rep.decomposition_residual / rep.norm_sq;
            let lower = (rep.hessian_term - rep.form_value) / rep.norm_sq;
            (res < BOCHNER_TOL && lower < BOCHNER_TOL, res.max(lower))
        }),
        true,
    )
}

pub fn homothety_invariance(seed: u64) -> SuiteResult {
    let mut rng = sampling::rng(seed);
    SuiteResult::from_trials(
        "form_homothety_invariance",
        1e-10,
        (0..50).map(|_| {
            let (l, rho) = (rng.random_range(2.0..8.0), rng.random_range(0.5..2.0));
            let c: f64 = rng.random_range(-1.5..1.5);
            let phi = sampling::random_band_limited(&mut rng, 64, l, 6, 1.0, 0.0).expect("grid");
            let base = reduced_quadratic_form(&S1xS3 { circumference: l, sphere_radius: rho }, &phi, DerivativeScheme::Spectral)
                .expect("valid");
            let s = (-c).exp();
            let moved = ReducedField::new(phi.samples().to_vec(), l * s).expect("grid");
            let rep = reduced_quadratic_form(
                &S1xS3 {
                    circumference: l * s,
                    sphere_radius: rho * s,
                },
                &moved,
                DerivativeScheme::Spectral,
            )
            .expect("valid");
            let err = rel(rep.form_value, base.form_value);
            (err < 1e-10, err)
        }),
        true,
    )
}

/// Product spectra are nonnegative exactly when the certificate holds (S²×S² vs hyperbolic).
pub fn product_sign_consistency() -> SuiteResult {
    let cases = [(1.0, 4.0 * PI, vec![0.0, 2.0, 6.0, 12.0]), (-1.0, 4.0 * PI, vec![0.0, 0.1, 1.0, 2.5])];
    SuiteResult::from_trials(
        "product_spectrum_vs_certificate",
        0.0,
        cases.iter().map(|(k, area, eigs)| {
            let inp = ProductSpectrumInput {
                kappa1: *k,
                kappa2: *k,
                eigs1: eigs.clone(),
                eigs2: eigs.clone(),
            };
            let s = summarize_spectrum(&inp).expect("valid input");
            let cert = positivity_certificate(
                &Background::product_surfaces(*k, *k, *area, *area),
                1.0,
                Some((eigs, eigs)),
            )
            .expect("frame-level");
            let nonneg = s.count_negative == 0;
            (nonneg == cert.positive_semidefinite && nonneg == cert.witness.is_none(), s.min)
        }),
        false,
    )
}

/// Upper, δ̄, Harnack and lower-bound monitors along the default homogeneous path.
pub fn path_monitors() -> SuiteResult {
    const NAME: &str = "path_monitors";
    let cfg = SolveConfig::default();
    let (_, trace) = match solver::continue_path(S1xS3::standard(), &cfg) {
        Ok(x) => x,
        Err(e) => return SuiteResult::from_error(NAME, monitors::UPPER_BOUND_SLACK, e),
    };
    let rec = builtin::s1xs3();
    let upper = monitors::upper_bound_violations(&cfg, &trace).map(|v| v.is_empty()).unwrap_or(false);
    let dbar = monitors::delta_bar_holds(&cfg, &trace).unwrap_or(false);
    let lower = monitors::lower_bound_report(&trace, rec.f2(), rec.yamabe)
        .map(|r| r.c_empirical.is_finite())
        .unwrap_or(false);
    SuiteResult::from_trials(
        NAME,
        monitors::UPPER_BOUND_SLACK,
        trace
            .iter()
            .map(|d| (upper && dbar && lower && monitors::harnack_holds(d, 2.0 * PI), d.u_max)),
        true,
    )
}

pub fn gradient_stability() -> SuiteResult {
    let cfg = SolveConfig {
        warp: vec![0.08, 0.02],
        ..SolveConfig::default()
    };
    match monitors::gradient_stability(S1xS3::standard(), &cfg, &[64, 128, 256]) {
        Ok(g) => SuiteResult::from_trials(
            "gradient_stability",
            GRADIENT_SPREAD_TOL,
            [(g.relative_spread < GRADIENT_SPREAD_TOL, g.relative_spread)],
            true,
        ),
        Err(e) => SuiteResult::from_error("gradient_stability", GRADIENT_SPREAD_TOL, e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

/// Runs every suite; sub-seeds are derived from `seed` so suites stay independent.
pub fn run_all(seed: u64, mutation: Mutation) -> SelftestReport {
    let sub = |k: u64| seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k);
    let suites = vec![
        cgb_identity(),
        f2_agreement(),
        cross_normalization(),
        shift_identity(sub(1)),
        cone_convexity(sub(2)),
        newton_and_l_positivity(sub(3)),
        concavity(sub(4)),
        hat_reflection_invariance(sub(5)),
        pinching_positivity(sub(6)),
        operator_concavity(sub(7)),
        jacobian_consistency(sub(8), mutation),
        q_transform_law(mutation),
        paneitz_self_adjoint(sub(9)),
        bochner_split(sub(10)),
        homothety_invariance(sub(11)),
        product_sign_consistency(),
        path_monitors(),
        gradient_stability(),
    ];
    SelftestReport {
        seed,
        passed: suites.iter().all(|s| s.passed),
        suites,
    }
}
