//! Drivers that certify the structural claims about the families' exponent
//! sets: isolated integers plus perturbation-born intervals for
//! `A_{n,k,ε}`, δ-intervals around even integers for `|C_{n,ε}|`, and the
//! unperturbed baseline patterns.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{default_x, FamilySpec, Param};
use crate::matrix::Alpha;
use crate::oracle::DEFAULT_DIGITS;
use crate::scan::{AuditSummary, Evaluator, ScanConfig, Witness, DEFAULT_GRID_STEP};
use crate::spectra::PsdClass;

/// ε values tried in order when none is forced.
///
/// The first nine are the customary `1e-4 … 1e-12`; the tail exists because
/// for `n = 6` with `x_i = 1/(i+1)` the witnesses between consecutive
/// intervals only appear once ε drops below `|λ_min(A_n^∘(n-2.5))| ≈ 1e-13`.
pub const EPS_LADDER: [&str; 17] = [
    "1e-4", "1e-5", "1e-6", "1e-7", "1e-8", "1e-9", "1e-10", "1e-11", "1e-12", "1e-13", "1e-14", "1e-15", "1e-16",
    "1e-17", "1e-18", "1e-19", "1e-20",
];
/// Interior probes per δ certification (the two endpoints come on top).
pub const DELTA_PROBES: usize = 33;
const MAX_DELTA: f64 = 0.5;
const DELTA_BISECTIONS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub digits: usize,
    /// Starting half-width of δ discovery.
    pub grid_step: f64,
    /// Forces one ε instead of walking the ladder.
    pub eps: Option<Param>,
    /// Overrides `x_i = 1/(i+1)`.
    pub x: Option<Vec<Param>>,
    /// Smallest acceptable certified δ.
    pub min_delta: f64,
    /// Cross-check every working-precision verdict against the referee.
    pub audit: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { digits: DEFAULT_DIGITS, grid_step: DEFAULT_GRID_STEP, eps: None, x: None, min_delta: 0.0, audit: false }
    }
}

impl VerifyOptions {
    fn ladder(&self) -> Vec<Param> {
        match &self.eps {
            Some(e) => vec![e.clone()],
            None => EPS_LADDER.iter().map(|t| Param::parse(t).expect("ladder literal")).collect(),
        }
    }

    fn scan_config(&self, use_abs: bool) -> ScanConfig {
        let mut cfg = ScanConfig::new(0.0, 1.0).with_abs(use_abs).with_digits(self.digits).with_step(self.grid_step);
        cfg.audit = self.audit;
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Certified `[center - delta, center + delta]` of PSD verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaInterval {
    pub center: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub driver: String,
    pub family: FamilySpec,
    pub use_abs: bool,
    pub passed: bool,
    /// ε of the final attempt.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    pub eps_tried: Vec<f64>,
    pub clauses: Vec<Clause>,
    pub intervals: Vec<DeltaInterval>,
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditSummary>,
}

impl VerificationRecord {
    fn new(driver: &str, family: FamilySpec, use_abs: bool) -> Self {
        VerificationRecord {
            driver: driver.into(),
            eps: family.eps.as_ref().map(Param::value),
            family,
            use_abs,
            passed: true,
            eps_tried: Vec::new(),
            clauses: Vec::new(),
            intervals: Vec::new(),
            witnesses: Vec::new(),
            audit: None,
        }
    }

    /// Records a clause; returns whether it passed.
    fn clause(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> bool {
        self.passed &= passed;
        self.clauses.push(Clause { name: name.into(), passed, detail: detail.into() });
        passed
    }

    pub fn first_failure(&self) -> Option<&Clause> {
        self.clauses.iter().find(|c| !c.passed)
    }

    pub fn min_delta(&self) -> Option<f64> {
        self.intervals.iter().map(|d| d.delta).min_by(f64::total_cmp)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }
}

fn classify(ev: &Evaluator, alpha: f64) -> Result<(PsdClass, f64)> {
    let v = ev.classify(Alpha::new(alpha)?)?;
    Ok((v.class, v.lambda_min_estimate))
}

/// All `2 + DELTA_PROBES` points of `[c - δ, c + δ]` PSD, endpoints tried first.
fn certify_delta(ev: &Evaluator, center: f64, delta: f64) -> Result<bool> {
    let steps = DELTA_PROBES + 1;
    let order = [0, steps].into_iter().chain(1..steps);
    for i in order {
        let alpha = center - delta + 2.0 * delta * i as f64 / steps as f64;
        if alpha < 0.0 || classify(ev, alpha)?.0 != PsdClass::Psd {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest certified half-width found by doubling/halving from `start` and
/// then bisecting between the last good and first bad width.
fn discover_delta(ev: &Evaluator, center: f64, start: f64) -> Result<Option<f64>> {
    let (mut good, mut bad);
    if certify_delta(ev, center, start)? {
        good = start;
        bad = start * 2.0;
        while bad <= MAX_DELTA && certify_delta(ev, center, bad)? {
            good = bad;
            bad *= 2.0;
        }
        if bad > MAX_DELTA {
            return Ok(Some(good));
        }
    } else {
        bad = start;
        loop {
            let d = bad / 2.0;
            if d < center.max(1.0) * f64::EPSILON * 4.0 {
                return Ok(None);
            }
            if certify_delta(ev, center, d)? {
                good = d;
                break;
            }
            bad = d;
        }
    }
    for _ in 0..DELTA_BISECTIONS {
        let mid = 0.5 * (good + bad);
        if certify_delta(ev, center, mid)? {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(Some(good))
}

/// Golden-section descent on λ_min over `(lo, hi)`, stopping at the first
/// NOT_PSD verdict.
fn find_witness(ev: &Evaluator, lo: f64, hi: f64) -> Result<Option<Witness>> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let probe = |x: f64| -> Result<(PsdClass, f64)> { classify(ev, x) };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (probe(c)?, probe(d)?);
    for _ in 0..80 {
        for (x, f) in [(c, fc), (d, fd)] {
            if f.0 == PsdClass::NotPsd {
                return Ok(Some(Witness { alpha: x, lambda_min: f.1 }));
            }
        }
        if b - a < 1e-9 {
            break;
        }
        if fc.1 < fd.1 {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = probe(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = probe(d)?;
        }
    }
    Ok(None)
}

fn fmt_classes(hits: &[(f64, PsdClass)]) -> String {
    hits.iter().map(|(a, c)| format!("{a}:{}", c.as_str())).collect::<Vec<_>>().join(", ")
}

/// Certifies, for `A_{n,k,ε}`, that
/// * non-integers of `[0, n-k-2]` are NOT_PSD and its integers are members,
/// * `[n-2, n]` is inside the ray,
/// * each `ℓ ∈ {n-k-1, …, n-3}` carries a PSD interval of half-width `δ_ℓ > 0`
///   (at least `min_delta`) and a NOT_PSD witness in `(ℓ, ℓ+1)`.
///
/// Walks [`EPS_LADDER`] unless ε is forced; a forced ε returns its record
/// even when it fails.
pub fn verify_thm1(n: usize, k: usize, opts: &VerifyOptions) -> Result<VerificationRecord> {
    if n < 4 {
        return Err(Error::BadParameters(format!("n = {n}: need n >= 4")));
    }
    if k < 2 || k > n - 2 {
        return Err(Error::BadParameters(format!("k = {k}: need 2 <= k <= n-2 = {}", n - 2)));
    }
    let x = opts.x.clone().unwrap_or_else(|| default_x(n));
    let mut tried = Vec::new();
    let mut last = None;
    for eps in opts.ladder() {
        tried.push(eps.value());
        let spec = FamilySpec::perturbed_poly_gram(x.clone(), k, eps);
        let mut rec = check_thm1(&spec, n, k, opts)?;
        rec.eps_tried = tried.clone();
        if rec.passed || opts.eps.is_some() {
            return Ok(rec);
        }
        last = Some(rec);
    }
    Err(Error::EpsilonLadderExhausted { last: Box::new(last.expect("ladder is non-empty")) })
}

fn check_thm1(spec: &FamilySpec, n: usize, k: usize, opts: &VerifyOptions) -> Result<VerificationRecord> {
    let cfg = opts.scan_config(false);
    let ev = Evaluator::for_family(spec, &cfg)?;
    let mut rec = VerificationRecord::new("thm1", spec.clone(), false);
    let low = (n - k - 2) as f64;

    let finish = |mut rec: VerificationRecord, ev: &Evaluator| {
        rec.audit = ev.audit_summary();
        Ok(rec)
    };

    // ten non-integer probes j·low/11 of [0, n-k-2]
    if low > 0.0 {
        let mut bad = Vec::new();
        for j in 1..=10 {
            let alpha = j as f64 * low / 11.0;
            let (class, _) = classify(&ev, alpha)?;
            if class != PsdClass::NotPsd {
                bad.push((alpha, class));
            }
        }
        if !rec.clause("low_non_integers", bad.is_empty(), fmt_classes(&bad)) {
            return finish(rec, &ev);
        }
    }
    let mut bad = Vec::new();
    for i in 0..=(n - k - 2) {
        let (class, _) = classify(&ev, i as f64)?;
        if !class.is_member() {
            bad.push((i as f64, class));
        }
    }
    if !rec.clause("low_integers", bad.is_empty(), fmt_classes(&bad)) {
        return finish(rec, &ev);
    }

    let top = (n - 2) as f64;
    let mut bad = Vec::new();
    for off in [0.0, 0.25, 0.5, 1.0, 1.5, 2.0] {
        let (class, _) = classify(&ev, top + off)?;
        if !class.is_member() {
            bad.push((top + off, class));
        }
    }
    if !rec.clause("ray", bad.is_empty(), fmt_classes(&bad)) {
        return finish(rec, &ev);
    }

    for l in (n - k - 1)..=(n - 3) {
        let lf = l as f64;
        let (class, lambda) = classify(&ev, lf)?;
        if !rec.clause(format!("psd_at_{l}"), class == PsdClass::Psd, format!("{}: lambda_min {lambda:e}", class.as_str())) {
            return finish(rec, &ev);
        }
        match find_witness(&ev, lf + 0.01, lf + 0.99)? {
            Some(w) => {
                rec.clause(format!("witness_{l}"), true, format!("alpha {} lambda_min {:e}", w.alpha, w.lambda_min));
                rec.witnesses.push(w);
            }
            None => {
                rec.clause(format!("witness_{l}"), false, format!("no NOT_PSD verdict found in ({}, {})", lf, lf + 1.0));
                return finish(rec, &ev);
            }
        }
        match discover_delta(&ev, lf, opts.grid_step)? {
            Some(delta) => {
                let ok = delta >= opts.min_delta;
                rec.clause(format!("delta_{l}"), ok, format!("delta {delta:e} (required >= {:e})", opts.min_delta));
                rec.intervals.push(DeltaInterval { center: lf, delta });
                if !ok {
                    return finish(rec, &ev);
                }
            }
            None => {
                rec.clause(format!("delta_{l}"), false, "no certified interval");
                return finish(rec, &ev);
            }
        }
    }
    finish(rec, &ev)
}

/// The even integers around which `|C_{n,ε}|` gains interval components.
pub fn thm2_ks(n: usize) -> Vec<usize> {
    if n % 2 == 0 {
        (2..=n - 2).step_by(2).collect()
    } else {
        let mut ks: Vec<usize> = (2..=n.saturating_sub(5)).step_by(2).collect();
        ks.push(n - 3);
        ks.dedup();
        ks
    }
}

/// Certifies for `|C_{n,ε}|^∘α` a PSD interval around each `k` of
/// [`thm2_ks`] and NOT_PSD at each `k - 1`.
pub fn verify_thm2(n: usize, opts: &VerifyOptions) -> Result<VerificationRecord> {
    if n < 4 {
        return Err(Error::BadParameters(format!("n = {n}: need n >= 4")));
    }
    let mut tried = Vec::new();
    let mut last = None;
    for eps in opts.ladder() {
        tried.push(eps.value());
        let spec = FamilySpec::perturbed_cos_toeplitz(n, eps);
        let cfg = opts.scan_config(true);
        let ev = Evaluator::for_family(&spec, &cfg)?;
        let mut rec = VerificationRecord::new("thm2", spec, true);
        rec.eps_tried = tried.clone();
        for k in thm2_ks(n) {
            let kf = k as f64;
            let (class, lambda) = classify(&ev, kf - 1.0)?;
            if class == PsdClass::NotPsd {
                rec.clause(format!("not_psd_at_{}", k - 1), true, format!("lambda_min {lambda:e}"));
                rec.witnesses.push(Witness { alpha: kf - 1.0, lambda_min: lambda });
            } else {
                rec.clause(format!("not_psd_at_{}", k - 1), false, format!("{}: lambda_min {lambda:e}", class.as_str()));
                break;
            }
            match discover_delta(&ev, kf, opts.grid_step)? {
                Some(delta) if delta >= opts.min_delta => {
                    rec.clause(format!("delta_{k}"), true, format!("delta {delta:e}"));
                    rec.intervals.push(DeltaInterval { center: kf, delta });
                }
                found => {
                    rec.clause(format!("delta_{k}"), false, format!("certified delta {found:?}, required >= {:e}", opts.min_delta));
                    break;
                }
            }
        }
        rec.audit = ev.audit_summary();
        if rec.passed || opts.eps.is_some() {
            return Ok(rec);
        }
        last = Some(rec);
    }
    Err(Error::EpsilonLadderExhausted { last: Box::new(last.expect("ladder is non-empty")) })
}

/// Which baseline matrix [`verify_baseline`] checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    /// `A_n` with `x_i = 1/(i+1)`: `{0, 1, …, n-3} ∪ [n-2, ∞)`.
    PolyGram,
    /// `|C_n|`: `{0, 2, …, n-4} ∪ [n-2, ∞)` for even `n`, `{0, 2, …, n-5} ∪ [n-3, ∞)` for odd.
    Cos,
}

impl Baseline {
    /// Closed-form membership of α in the exponent set.
    pub fn expects_member(self, n: usize, alpha: f64) -> bool {
        let integer = alpha.fract() == 0.0;
        match self {
            Baseline::PolyGram => alpha >= (n - 2) as f64 || integer,
            Baseline::Cos => {
                let ray = if n % 2 == 0 { n - 2 } else { n - 3 };
                alpha >= ray as f64 || (integer && (alpha as usize) % 2 == 0)
            }
        }
    }
}

/// Checks the closed-form pattern at every integer and half-integer of `[0, n]`.
///
/// Fails with [`Error::BaselineMismatch`] at the first offending α.
pub fn verify_baseline(which: Baseline, n: usize, opts: &VerifyOptions) -> Result<VerificationRecord> {
    let (spec, use_abs) = match which {
        Baseline::PolyGram if n >= 3 => (FamilySpec::poly_gram(opts.x.clone().unwrap_or_else(|| default_x(n))), false),
        Baseline::Cos if n >= 4 => (FamilySpec::cos_toeplitz(n), true),
        _ => return Err(Error::BadParameters(format!("baseline {which:?} needs a larger n than {n}"))),
    };
    let ev = Evaluator::for_family(&spec, &opts.scan_config(use_abs))?;
    let mut rec = VerificationRecord::new("baselines", spec, use_abs);
    for half in 0..=2 * n {
        let alpha = half as f64 / 2.0;
        let (class, lambda) = classify(&ev, alpha)?;
        let expected = which.expects_member(n, alpha);
        if class.is_member() != expected {
            return Err(Error::BaselineMismatch {
                alpha,
                expected: if expected { "PSD or BOUNDARY" } else { "NOT_PSD" },
                got: class.as_str(),
            });
        }
        rec.clause(format!("alpha_{alpha}"), true, format!("{}: lambda_min {lambda:e}", class.as_str()));
        if class == PsdClass::NotPsd {
            rec.witnesses.push(Witness { alpha, lambda_min: lambda });
        }
    }
    rec.audit = ev.audit_summary();
    Ok(rec)
}

/// `A_3 … A_8` and `|C_4| … |C_9|`.
pub fn verify_all_baselines(opts: &VerifyOptions) -> Result<Vec<VerificationRecord>> {
    let poly = (3..=8).map(|n| verify_baseline(Baseline::PolyGram, n, opts));
    let cos = (4..=9).map(|n| verify_baseline(Baseline::Cos, n, opts));
    poly.chain(cos).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thm2_index_sets() {
        assert_eq!(thm2_ks(4), [2]);
        assert_eq!(thm2_ks(5), [2]);
        assert_eq!(thm2_ks(6), [2, 4]);
        assert_eq!(thm2_ks(7), [2, 4]);
        assert_eq!(thm2_ks(8), [2, 4, 6]);
        assert_eq!(thm2_ks(9), [2, 4, 6]);
    }

    #[test]
    fn baseline_membership() {
        assert!(Baseline::PolyGram.expects_member(5, 2.0));
        assert!(!Baseline::PolyGram.expects_member(5, 2.5));
        assert!(Baseline::PolyGram.expects_member(5, 3.5));
        assert!(!Baseline::Cos.expects_member(6, 3.0));
        assert!(Baseline::Cos.expects_member(6, 4.0));
        assert!(Baseline::Cos.expects_member(7, 4.5));
        assert!(!Baseline::Cos.expects_member(7, 3.0));
    }

    #[test]
    fn parameter_ranges() {
        let o = VerifyOptions::default();
        assert!(matches!(verify_thm1(6, 1, &o), Err(Error::BadParameters(_))));
        assert!(matches!(verify_thm1(6, 5, &o), Err(Error::BadParameters(_))));
        assert!(matches!(verify_thm2(3, &o), Err(Error::BadParameters(_))));
        assert!(matches!(verify_baseline(Baseline::Cos, 3, &o), Err(Error::BadParameters(_))));
    }

    #[test]
    fn baselines_a5_and_c6() {
        let o = VerifyOptions::default();
        let r = verify_baseline(Baseline::PolyGram, 5, &o).unwrap();
        assert!(r.passed);
        assert_eq!(r.witnesses.iter().map(|w| w.alpha).collect::<Vec<_>>(), [0.5, 1.5, 2.5]);
        let r = verify_baseline(Baseline::Cos, 6, &o).unwrap();
        assert!(r.witnesses.iter().any(|w| w.alpha == 1.0) && r.witnesses.iter().any(|w| w.alpha == 3.0));
    }

    #[test]
    fn unperturbed_thm1_fails() {
        let o = VerifyOptions { eps: Some(Param::parse("0").unwrap()), ..VerifyOptions::default() };
        let r = verify_thm1(5, 2, &o).unwrap();
        assert!(!r.passed);
        assert_eq!(r.first_failure().unwrap().name, "psd_at_2");
    }

    #[test]
    fn thm1_smallest_case() {
        let r = verify_thm1(4, 2, &VerifyOptions::default()).unwrap();
        assert!(r.passed, "{}", r.to_json());
        assert_eq!(r.intervals.len(), 1);
        assert!(r.witnesses[0].alpha > 1.0 && r.witnesses[0].alpha < 2.0);
    }

    #[test]
    fn thm2_n5() {
        let r = verify_thm2(5, &VerifyOptions::default()).unwrap();
        assert!(r.passed, "{}", r.to_json());
        assert_eq!(r.eps, Some(1e-4));
    }
}
