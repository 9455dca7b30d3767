//! Conformal invariants (χ, ∫|W|², Y, ∫Q) of model manifolds and the
//! connected-sum arithmetic built on them.
//!
//! Yamabe invariants are never computed here; every record carries them as
//! constants together with a provenance string. All hypothesis checks use
//! strict inequalities, and values within [`BOUNDARY_TOL`] of the threshold
//! are reported as boundary cases and rejected.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cone::sigma2;
use crate::error::{Error, Result};
use crate::geometry::{CurvaturePackage, CGB_TOL};

/// Relative width of the band around a strict threshold that counts as equality.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Relative agreement required between the two F₂ formulas.
pub const F2_AGREEMENT_TOL: f64 = 1e-10;

/// Largest admissible number of S¹×S³ summands.
pub const MAX_S1XS3_SUMMANDS: i64 = 7;
/// Largest admissible number of ℝP⁴ summands.
pub const MAX_RP4_SUMMANDS: i64 = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyRecord {
    pub name: String,
    pub chi: i64,
    pub weyl_l2: f64,
    pub yamabe: f64,
    pub q_total: f64,
    #[serde(default)]
    pub provenance: String,
}

impl TopologyRecord {
    /// Record for a frame-level background: ∫Q = ½F₂ and ∫|W|² come from the package.
    pub fn from_package(name: &str, pkg: &CurvaturePackage, yamabe: f64, provenance: &str) -> Self {
        Self {
            name: name.into(),
            chi: pkg.euler,
            weyl_l2: pkg.weyl_l2,
            yamabe,
            q_total: 0.5 * f2_invariant(pkg),
            provenance: provenance.into(),
        }
    }

    /// Relative Chern–Gauss–Bonnet residual |8π²χ − (∫|W|² + 2∫Q)| / 8π².
    pub fn cgb_residual(&self) -> f64 {
        let euler_term = 8.0 * PI * PI * self.chi as f64;
        (euler_term - (self.weyl_l2 + 2.0 * self.q_total)).abs() / (8.0 * PI * PI)
    }

    /// F₂ = 2∫Q.
    pub fn f2(&self) -> f64 {
        2.0 * self.q_total
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.weyl_l2 >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "{}: weyl_l2 must be nonnegative, got {}",
                self.name, self.weyl_l2
            )));
        }
        let scale = (self.chi.unsigned_abs() as f64).max(1.0);
        if self.cgb_residual() > CGB_TOL * scale {
            return Err(Error::InvalidInput(format!(
                "{}: Chern-Gauss-Bonnet identity fails (relative residual {:e})",
                self.name,
                self.cgb_residual()
            )));
        }
        Ok(())
    }
}

pub fn load_records(path: &Path) -> Result<Vec<TopologyRecord>> {
    let text = std::fs::read_to_string(path)?;
    let records: Vec<TopologyRecord> = serde_json::from_str(&text)?;
    for r in &records {
        r.validate()?;
    }
    Ok(records)
}

pub fn save_records(path: &Path, records: &[TopologyRecord]) -> Result<()> {
    let mut text = serde_json::to_string_pretty(records)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// F₂ from the Ricci form ∫(−½|Ric|² + R²/6) and from 4∫σ₂(A¹).
pub fn f2_invariant_pair(pkg: &CurvaturePackage) -> (f64, f64) {
    let ricci_form = (-0.5 * pkg.ric.trace_of_square() + pkg.scalar * pkg.scalar / 6.0) * pkg.volume;
    let schouten_form = 4.0 * sigma2(&pkg.schouten1) * pkg.volume;
    (ricci_form, schouten_form)
}

pub fn f2_invariant(pkg: &CurvaturePackage) -> f64 {
    let (ricci_form, schouten_form) = f2_invariant_pair(pkg);
    debug_assert!(
        (ricci_form - schouten_form).abs() <= F2_AGREEMENT_TOL * ricci_form.abs().max(1.0),
        "F2 formulas disagree: {ricci_form} vs {schouten_form}"
    );
    ricci_form
}

/// `value > 0` with a relative boundary band; `scale` sets the band width.
fn strictly_positive(value: f64, scale: f64) -> (bool, bool) {
    let boundary = value.abs() <= BOUNDARY_TOL * scale.abs().max(f64::MIN_POSITIVE);
    (value > 0.0 && !boundary, boundary)
}

fn require_positive_yamabe(rec: &TopologyRecord) -> Result<()> {
    if rec.yamabe > 0.0 {
        Ok(())
    } else {
        Err(Error::Hypothesis(format!(
            "{}: positive scalar curvature required (Y = {})",
            rec.name, rec.yamabe
        )))
    }
}

/// λ_{t₀} = F₂ + (1/6)(1−t₀)(2−t₀)Y² and whether it is positive.
pub fn check_assumption_main(rec: &TopologyRecord, t0: f64) -> Result<(f64, bool)> {
    if !(t0 <= 1.0) {
        return Err(Error::InvalidInput(format!("t0 = {t0} exceeds 1")));
    }
    require_positive_yamabe(rec)?;
    let y_term = rec.yamabe * rec.yamabe / 6.0;
    let lambda = 2.0 * rec.q_total + (1.0 - t0) * (2.0 - t0) * y_term;
    let scale = (2.0 * rec.q_total).abs().max((1.0 - t0) * (2.0 - t0) * y_term);
    Ok((lambda, strictly_positive(lambda, scale).0))
}

/// ∫Q + (1/6)Y² > 0.
pub fn check_assumption_paneitz(rec: &TopologyRecord) -> Result<bool> {
    require_positive_yamabe(rec)?;
    let y_term = rec.yamabe * rec.yamabe / 6.0;
    let value = rec.q_total + y_term;
    let holds = strictly_positive(value, rec.q_total.abs().max(y_term)).0;
    let (_, main) = check_assumption_main(rec, 0.0)?;
    debug_assert_eq!(holds, main, "normalizations disagree for {}", rec.name);
    Ok(holds)
}

/// ∫R² dvol ≥ Y² for a background of constant positive scalar curvature.
pub fn yamabe_lower_diagnostic(pkg: &CurvaturePackage, y_supplied: f64) -> Result<bool> {
    if !(pkg.scalar > 0.0) {
        return Err(Error::Hypothesis(format!(
            "constant positive scalar curvature required (R = {})",
            pkg.scalar
        )));
    }
    let lhs = pkg.total_scalar_sq();
    let rhs = y_supplied * y_supplied;
    Ok(lhs >= rhs * (1.0 - BOUNDARY_TOL))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurgeryVerdict {
    pub admissible: bool,
    /// χ of the connected sum.
    pub chi: i64,
    /// Smallest (Y² − threshold²)/3 over the applied rules.
    pub margin: f64,
    pub detail: String,
}

/// Admissibility of M # k(S¹×S³) # l(ℝP⁴) for the constant-Q hypothesis.
pub fn surgery_check(base: &TopologyRecord, k_s1s3: i64, l_rp4: i64) -> Result<SurgeryVerdict> {
    if k_s1s3 < 0 || l_rp4 < 0 {
        return Err(Error::InvalidInput(format!(
            "summand counts must be nonnegative (k = {k_s1s3}, l = {l_rp4})"
        )));
    }
    if base.q_total < 0.0 {
        return Err(Error::Hypothesis(format!(
            "{}: requires integral of Q >= 0, got {}",
            base.name, base.q_total
        )));
    }
    let y2 = base.yamabe * base.yamabe;
    let mut admissible = base.yamabe > 0.0;
    let mut margin = f64::INFINITY;
    let mut notes = Vec::new();
    if base.yamabe <= 0.0 {
        notes.push(format!("hypothesis fails: Y = {} <= 0", base.yamabe));
    }

    if k_s1s3 > 0 {
        let threshold2 = 48.0 * k_s1s3 as f64 * PI * PI;
        let m = (y2 - threshold2) / 3.0;
        let (ok, boundary) = strictly_positive(y2 - threshold2, threshold2);
        let yamabe_bound = y2 / (48.0 * PI * PI);
        if boundary {
            notes.push(format!("boundary: Y = 4 sqrt(3k) pi at k = {k_s1s3}"));
        } else if !ok {
            notes.push(format!("Y <= 4 sqrt(3k) pi for k = {k_s1s3}"));
        }
        if k_s1s3 > MAX_S1XS3_SUMMANDS {
            notes.push(format!("k = {k_s1s3} violates the theorem bound k < 8"));
        }
        notes.push(format!(
            "S1xS3 rule: theorem bound k < 8, Yamabe bound k < {yamabe_bound:.6}"
        ));
        admissible &= ok && k_s1s3 <= MAX_S1XS3_SUMMANDS;
        margin = margin.min(m);
    }

    if l_rp4 > 0 {
        let threshold2 = 192.0 * PI * PI;
        let m = (y2 - threshold2) / 3.0;
        let (ok, boundary) = strictly_positive(y2 - threshold2, threshold2);
        if boundary {
            notes.push("boundary: Y = 8 sqrt(3) pi".into());
        } else if !ok {
            notes.push("Y <= 8 sqrt(3) pi".into());
        }
        if l_rp4 > MAX_RP4_SUMMANDS {
            notes.push(format!("l = {l_rp4} violates the bound l < 9"));
        }
        admissible &= ok && l_rp4 <= MAX_RP4_SUMMANDS;
        margin = margin.min(m);
    }

    let chi = base.chi - 2 * k_s1s3 - l_rp4;
    if k_s1s3 == 0 && l_rp4 == 0 {
        notes.push("no summands".into());
        margin = 0.0;
    }
    Ok(SurgeryVerdict {
        admissible,
        chi,
        margin,
        detail: notes.join("; "),
    })
}

/// k(S¹×S³) # l(ℝP⁴) with Y ≈ 8√3π: 8π²(2 − 2k − l) + (1/3)(8√3π)² > 0.
pub fn lcf_sum_check(k: i64, l: i64) -> Result<bool> {
    if k < 0 || l < 0 || (k == 0 && l == 0) {
        return Err(Error::InvalidInput(format!(
            "need k, l >= 0 and not both zero (k = {k}, l = {l})"
        )));
    }
    let y = 8.0 * 3f64.sqrt() * PI;
    let euler_term = 8.0 * PI * PI * (2 - 2 * k - l) as f64;
    let y_term = y * y / 3.0;
    Ok(strictly_positive(euler_term + y_term, y_term).0)
}

/// Both summands satisfy ∫Q ≥ 0 and Y > 4√3π.
pub fn pair_sum_check(a: &TopologyRecord, b: &TopologyRecord) -> Result<bool> {
    for r in [a, b] {
        if r.q_total < 0.0 {
            return Err(Error::Hypothesis(format!(
                "{}: requires integral of Q >= 0, got {}",
                r.name, r.q_total
            )));
        }
    }
    let threshold = 4.0 * 3f64.sqrt() * PI;
    let ok = |r: &TopologyRecord| strictly_positive(r.yamabe - threshold, threshold).0;
    Ok(ok(a) && ok(b))
}

/// One row of the connected-sum examples table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleRow {
    pub family: String,
    pub base: String,
    pub k_s1s3: i64,
    pub l_rp4: i64,
    pub chi: i64,
    pub admissible: bool,
    pub margin: f64,
    pub detail: String,
}

fn surgery_row(family: &str, base: &TopologyRecord, k: i64, l: i64) -> Result<ExampleRow> {
    let v = surgery_check(base, k, l)?;
    Ok(ExampleRow {
        family: family.into(),
        base: base.name.clone(),
        k_s1s3: k,
        l_rp4: l,
        chi: v.chi,
        admissible: v.admissible,
        margin: v.margin,
        detail: v.detail,
    })
}

/// The connected-sum families, each scanned one step past its last admissible member.
pub fn examples_table() -> Result<Vec<ExampleRow>> {
    let mut rows = Vec::new();
    let s2s2 = builtin::s2xs2();
    let cp2 = builtin::cp2();
    for k in 1..=6 {
        rows.push(surgery_row("S2xS2#k(S1xS3)", &s2s2, k, 0)?);
    }
    for k in 1..=6 {
        rows.push(surgery_row("CP2#k(S1xS3)", &cp2, k, 0)?);
    }
    for l in 1..=9 {
        rows.push(surgery_row("CP2#l(RP4)", &cp2, 0, l)?);
    }
    for l in 3..=8 {
        rows.push(surgery_row("CP2#lCP2bar#(S1xS3)", &builtin::del_pezzo(l as u32)?, 1, 0)?);
    }
    let y = 8.0 * 3f64.sqrt() * PI;
    for k in 0..=5i64 {
        for l in 0..=10i64 {
            if k == 0 && l == 0 {
                continue;
            }
            let admissible = lcf_sum_check(k, l)?;
            let chi = 2 - 2 * k - l;
            rows.push(ExampleRow {
                family: "k(S1xS3)#l(RP4)".into(),
                base: "S4".into(),
                k_s1s3: k,
                l_rp4: l,
                chi,
                admissible,
                margin: 8.0 * PI * PI * chi as f64 + y * y / 3.0,
                detail: if admissible { String::new() } else { format!("2k + l = {} >= 10", 2 * k + l) },
            });
        }
    }
    Ok(rows)
}

/// Built-in records. Frame-level ones are derived from closed-form curvature;
/// the rest use the Einstein relation ∫Q = Y²/48 and the CGB identity.
pub mod builtin {
    use super::*;
    use crate::geometry::{curvature_of, Background};

    pub const Y_S4: f64 = 8.0 * 2.449_489_742_783_178 * PI;

    fn einstein_record(name: &str, chi: i64, yamabe: f64, provenance: &str) -> TopologyRecord {
        let q_total = yamabe * yamabe / 48.0;
        TopologyRecord {
            name: name.into(),
            chi,
            weyl_l2: 8.0 * PI * PI * chi as f64 - 2.0 * q_total,
            yamabe,
            q_total,
            provenance: provenance.into(),
        }
    }

    pub fn s4() -> TopologyRecord {
        let pkg = curvature_of(&Background::round_s4(1.0)).expect("round S4");
        TopologyRecord::from_package("S4", &pkg, 8.0 * 6f64.sqrt() * PI, "Y = 8 sqrt(6) pi (round metric attains)")
    }

    /// The product metric is not the Yamabe minimizer at circumference 2π, so Y
    /// is a supplied bound below σ(S⁴).
    pub fn s1xs3() -> TopologyRecord {
        let pkg = curvature_of(&Background::s1xs3(2.0 * PI, 1.0)).expect("S1xS3");
        TopologyRecord::from_package(
            "S1xS3",
            &pkg,
            0.9 * 8.0 * 6f64.sqrt() * PI,
            "user-supplied bound Y = 0.9 * 8 sqrt(6) pi",
        )
    }

    pub fn s2xs2() -> TopologyRecord {
        let pkg = curvature_of(&Background::product_surfaces(1.0, 1.0, 4.0 * PI, 4.0 * PI)).expect("S2xS2");
        TopologyRecord::from_package("S2xS2", &pkg, 16.0 * PI, "Y = 16 pi (product Einstein metric)")
    }

    pub fn hyperbolic_product(genus: u32) -> TopologyRecord {
        let bg = Background::hyperbolic_product(genus).expect("genus >= 2");
        let pkg = curvature_of(&bg).expect("hyperbolic product");
        let yamabe = pkg.scalar * pkg.volume.sqrt();
        TopologyRecord::from_package(
            "SigmaxSigma_hyperbolic",
            &pkg,
            yamabe,
            "Y = R Vol^(1/2) of the constant negative scalar curvature metric",
        )
    }

    pub fn cp2() -> TopologyRecord {
        einstein_record(
            "CP2",
            3,
            12.0 * 2f64.sqrt() * PI,
            "Y = 12 sqrt(2) pi (Fubini-Study); weyl_l2 identity-derived from CGB",
        )
    }

    pub fn rp4() -> TopologyRecord {
        einstein_record("RP4", 1, 8.0 * 3f64.sqrt() * PI, "Y = 8 sqrt(3) pi (round metric); weyl_l2 identity-derived")
    }

    /// ℂP² # l·(−ℂP²) with its Kähler–Einstein metric, 3 ≤ l ≤ 8.
    pub fn del_pezzo(l: u32) -> Result<TopologyRecord> {
        if !(3..=8).contains(&l) {
            return Err(Error::InvalidInput(format!("del Pezzo blow-up count must be in 3..=8, got {l}")));
        }
        Ok(einstein_record(
            &format!("CP2#{l}CP2bar"),
            3 + l as i64,
            4.0 * PI * (2.0 * (9.0 - l as f64)).sqrt(),
            "Y = 4 pi sqrt(2(9-l)) (Kahler-Einstein); weyl_l2 identity-derived",
        ))
    }

    pub fn all() -> Vec<TopologyRecord> {
        let mut v = vec![s4(), s1xs3(), s2xs2(), cp2(), rp4(), hyperbolic_product(2)];
        v.extend((3..=8).map(|l| del_pezzo(l).expect("valid range")));
        v
    }
}
