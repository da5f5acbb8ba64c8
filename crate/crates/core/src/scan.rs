//! Sampling α ↦ λ_min(A^∘α) and assembling the exponent set into components.

use std::io::{self, Write};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{FamilyKind, FamilySpec};
use crate::matrix::{Alpha, SymMatrix};
use crate::oracle::{hp_det, FamilyPoint, HpSign, PromotedMatrix, DEFAULT_DIGITS};
use crate::spectra::{classify_psd_with, determinant, min_eigenvalue, working_tolerance, PsdClass, PsdVerdict, Precision, Referee};

pub const DEFAULT_GRID_STEP: f64 = 1e-2;
/// Target bracket width for component endpoints.
pub const ROOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub grid_step: f64,
    pub use_abs: bool,
    pub digits: usize,
    /// With the referee off, the tolerance band is reported as BOUNDARY.
    pub oracle: bool,
    /// Also referee every verdict decided at working precision.
    #[serde(default)]
    pub audit: bool,
}

impl ScanConfig {
    pub fn new(alpha_min: f64, alpha_max: f64) -> ScanConfig {
        ScanConfig { alpha_min, alpha_max, grid_step: DEFAULT_GRID_STEP, use_abs: false, digits: DEFAULT_DIGITS, oracle: true, audit: false }
    }

    pub fn with_abs(mut self, use_abs: bool) -> ScanConfig {
        self.use_abs = use_abs;
        self
    }

    pub fn with_step(mut self, step: f64) -> ScanConfig {
        self.grid_step = step;
        self
    }

    pub fn with_digits(mut self, digits: usize) -> ScanConfig {
        self.digits = digits;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_min >= 0.0) || !self.alpha_min.is_finite() {
            return Err(Error::BadWindow(format!("alpha_min {} must be a finite value >= 0", self.alpha_min)));
        }
        if !(self.alpha_max > self.alpha_min) || !self.alpha_max.is_finite() {
            return Err(Error::BadWindow(format!("alpha_max {} must exceed alpha_min {}", self.alpha_max, self.alpha_min)));
        }
        if !(self.grid_step > 0.0) {
            return Err(Error::BadWindow(format!("grid step {} must be positive", self.grid_step)));
        }
        Ok(())
    }

    /// Grid points `alpha_min + i·step`, snapped to integers when within
    /// rounding of one, with every integer of the window included.
    pub fn grid(&self) -> Result<Vec<Alpha>> {
        self.validate()?;
        let count = ((self.alpha_max - self.alpha_min) / self.grid_step + 1e-9).floor() as usize;
        let mut points: Vec<f64> = (0..=count)
            .map(|i| {
                let a = self.alpha_min + self.grid_step * i as f64;
                if (a - a.round()).abs() < 1e-9 { a.round() } else { a }
            })
            .collect();
        let first = self.alpha_min.ceil() as u64;
        let last = self.alpha_max.floor() as u64;
        points.extend((first..=last).map(|i| i as f64));
        points.push(self.alpha_max);
        points.sort_by(f64::total_cmp);
        points.dedup();
        points.into_iter().map(Alpha::new).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub alpha: f64,
    /// Best available estimate: the referee's when it was consulted.
    pub lambda_min: f64,
    /// Working-precision determinant.
    pub det: f64,
    pub verdict: PsdClass,
    pub precision: Precision,
}

/// Working-precision verdicts that the referee contradicted.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub checked: usize,
    pub disagreements: Vec<f64>,
}

/// Classifies `A^∘α` for one matrix source, escalating to the referee.
pub struct Evaluator {
    spec: Option<FamilySpec>,
    base: SymMatrix,
    use_abs: bool,
    digits: usize,
    oracle: bool,
    audit: Option<Mutex<AuditSummary>>,
}

impl Evaluator {
    pub fn for_family(spec: &FamilySpec, cfg: &ScanConfig) -> Result<Evaluator> {
        let base = spec.build()?;
        Ok(Evaluator { spec: Some(spec.clone()), ..Evaluator::for_matrix(&base, cfg) })
    }

    /// For a matrix that exists only in binary64; the referee sees its powers at face value.
    pub fn for_matrix(m: &SymMatrix, cfg: &ScanConfig) -> Evaluator {
        Evaluator {
            spec: None,
            base: m.clone(),
            use_abs: cfg.use_abs,
            digits: cfg.digits,
            oracle: cfg.oracle,
            audit: cfg.audit.then(Mutex::default),
        }
    }

    pub fn audit_summary(&self) -> Option<AuditSummary> {
        self.audit.as_ref().map(|a| a.lock().expect("audit lock").clone())
    }

    pub fn order(&self) -> usize {
        self.base.order()
    }

    pub fn spec(&self) -> Option<&FamilySpec> {
        self.spec.as_ref()
    }

    pub fn use_abs(&self) -> bool {
        self.use_abs
    }

    pub fn power(&self, alpha: Alpha) -> Result<SymMatrix> {
        self.base.power(alpha, self.use_abs)
    }

    pub fn classify(&self, alpha: Alpha) -> Result<PsdVerdict> {
        let m = self.power(alpha)?;
        self.classify_power(&m, alpha)
    }

    fn classify_power(&self, m: &SymMatrix, alpha: Alpha) -> Result<PsdVerdict> {
        if !self.oracle {
            let lambda = min_eigenvalue(m)?;
            let tol = working_tolerance(m);
            let class = if lambda < -tol {
                PsdClass::NotPsd
            } else if lambda > tol {
                PsdClass::Psd
            } else {
                PsdClass::Boundary
            };
            return Ok(PsdVerdict { class, lambda_min_estimate: lambda, tolerance_used: tol, precision: Precision::Working });
        }
        let promoted = PromotedMatrix::new(m, self.digits);
        let family;
        let referee: &dyn Referee = match &self.spec {
            Some(spec) if spec.kind != FamilyKind::File => {
                family = FamilyPoint { spec, use_abs: self.use_abs, alpha, digits: self.digits };
                &family
            }
            _ => &promoted,
        };
        let v = classify_psd_with(m, referee)?;
        if let (Some(log), Precision::Working) = (&self.audit, v.precision) {
            let hp = referee.min_eigenvalue()?;
            let agrees = matches!((v.class, hp.sign), (PsdClass::Psd, HpSign::Positive) | (PsdClass::NotPsd, HpSign::Negative));
            let mut log = log.lock().expect("audit lock");
            log.checked += 1;
            if !agrees {
                log.disagreements.push(alpha.value());
            }
        }
        Ok(v)
    }

    pub fn sample(&self, alpha: Alpha) -> Result<CurveSample> {
        let m = self.power(alpha)?;
        let v = self.classify_power(&m, alpha)?;
        Ok(CurveSample {
            alpha: alpha.value(),
            lambda_min: v.lambda_min_estimate,
            det: determinant(&m),
            verdict: v.class,
            precision: v.precision,
        })
    }

    /// Samples in input order; evaluation runs in parallel.
    pub fn curve(&self, alphas: &[Alpha]) -> Result<Vec<CurveSample>> {
        alphas.par_iter().map(|&a| self.sample(a)).collect()
    }
}

/// λ_min, determinant and verdict of the family's power at each α.
pub fn lambda_curve(spec: &FamilySpec, alphas: &[Alpha], cfg: &ScanConfig) -> Result<Vec<CurveSample>> {
    if alphas.is_empty() {
        return Err(Error::BadWindow("no alpha values".into()));
    }
    Evaluator::for_family(spec, cfg)?.curve(alphas)
}

/// Bracket `[lo, hi]` around a PSD/NOT_PSD transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub class_lo: PsdClass,
    pub class_hi: PsdClass,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// The end whose verdict is PSD.
    pub fn psd_end(&self) -> f64 {
        if self.class_lo == PsdClass::Psd {
            self.lo
        } else {
            self.hi
        }
    }
}

/// Bisects between strictly opposite certified verdicts (PSD vs NOT_PSD)
/// down to width `tol`. Midpoints landing on BOUNDARY are nudged off-centre.
pub fn isolate_root_with(ev: &Evaluator, a: Alpha, b: Alpha, tol: f64) -> Result<Bracket> {
    let (mut lo, mut hi) = (a.value().min(b.value()), a.value().max(b.value()));
    let class_lo = ev.classify(Alpha::new(lo)?)?.class;
    let class_hi = ev.classify(Alpha::new(hi)?)?.class;
    let opposite = matches!((class_lo, class_hi), (PsdClass::Psd, PsdClass::NotPsd) | (PsdClass::NotPsd, PsdClass::Psd));
    if !opposite {
        return Err(Error::SameSign { lo: format!("{lo} ({})", class_lo.as_str()), hi: format!("{hi} ({})", class_hi.as_str()) });
    }
    'bisect: while hi - lo > tol {
        for frac in [0.5, 0.25, 0.75, 0.375, 0.625] {
            let mid = lo + (hi - lo) * frac;
            if mid <= lo || mid >= hi {
                break 'bisect;
            }
            let class = ev.classify(Alpha::new(mid)?)?.class;
            if class == PsdClass::Boundary {
                continue;
            }
            if class == class_lo {
                lo = mid;
            } else {
                hi = mid;
            }
            continue 'bisect;
        }
        // a run of exact touchings; keep what we have
        break;
    }
    Ok(Bracket { lo, hi, class_lo, class_hi })
}

pub fn isolate_root(spec: &FamilySpec, a: Alpha, b: Alpha, cfg: &ScanConfig) -> Result<Bracket> {
    isolate_root_with(&Evaluator::for_family(spec, cfg)?, a, b, ROOT_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ComponentKind {
    Point,
    Interval,
    Ray,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EndpointCertainty {
    /// Endpoints are touching integers, window edges at 0, or refined brackets.
    Certified,
    GridResolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaComponent {
    pub kind: ComponentKind,
    pub lo: f64,
    /// `None` for a ray.
    pub hi: Option<f64>,
    pub endpoint_certainty: EndpointCertainty,
}

impl AlphaComponent {
    pub fn contains(&self, alpha: f64) -> bool {
        alpha >= self.lo && self.hi.is_none_or(|hi| alpha <= hi)
    }

    /// Bounded with positive length.
    pub fn is_interval(&self) -> bool {
        self.kind == ComponentKind::Interval
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub alpha: f64,
    pub lambda_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsetReport {
    /// Absent when the scanned matrix was supplied in memory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    pub use_abs: bool,
    pub window: [f64; 2],
    pub grid_step: f64,
    pub components: Vec<AlphaComponent>,
    pub witnesses: Vec<Witness>,
    pub warnings: Vec<String>,
}

impl SsetReport {
    pub fn component_containing(&self, alpha: f64) -> Option<&AlphaComponent> {
        self.components.iter().find(|c| c.contains(alpha))
    }

    pub fn ray(&self) -> Option<&AlphaComponent> {
        self.components.iter().find(|c| c.kind == ComponentKind::Ray)
    }

    pub fn count(&self, kind: ComponentKind) -> usize {
        self.components.iter().filter(|c| c.kind == kind).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Samples the window and assembles the exponent set of the family.
pub fn scan(spec: &FamilySpec, cfg: &ScanConfig) -> Result<(SsetReport, Vec<CurveSample>)> {
    let ev = Evaluator::for_family(spec, cfg)?;
    scan_with(&ev, cfg)
}

/// As [`scan`] for an in-memory matrix.
pub fn scan_matrix(m: &SymMatrix, cfg: &ScanConfig) -> Result<(SsetReport, Vec<CurveSample>)> {
    scan_with(&Evaluator::for_matrix(m, cfg), cfg)
}

pub fn scan_with(ev: &Evaluator, cfg: &ScanConfig) -> Result<(SsetReport, Vec<CurveSample>)> {
    let alphas = cfg.grid()?;
    let samples = ev.curve(&alphas)?;
    let report = assemble_components(ev, cfg, &samples)?;
    Ok((report, samples))
}

/// Merges member runs (PSD/BOUNDARY) of sorted samples into components and
/// refines their ends with [`isolate_root_with`].
pub fn assemble_components(ev: &Evaluator, cfg: &ScanConfig, samples: &[CurveSample]) -> Result<SsetReport> {
    let n = ev.order();
    let mut components = Vec::new();
    let mut witnesses = Vec::new();
    let mut warnings = Vec::new();
    let critical = n.saturating_sub(2) as f64;

    let mut i = 0;
    while i < samples.len() {
        let member = samples[i].verdict.is_member();
        let mut j = i;
        while j + 1 < samples.len() && samples[j + 1].verdict.is_member() == member {
            j += 1;
        }
        if !member {
            let w = samples[i..=j].iter().min_by(|a, b| a.lambda_min.total_cmp(&b.lambda_min)).expect("non-empty run");
            witnesses.push(Witness { alpha: w.alpha, lambda_min: w.lambda_min });
            i = j + 1;
            continue;
        }

        let (first, last) = (&samples[i], &samples[j]);
        let at_top = j + 1 == samples.len();
        let at_bottom = i == 0;

        if i == j && first.verdict == PsdClass::Boundary && !(at_top && at_bottom) {
            let alpha = first.alpha;
            let certainty = if Alpha::new(alpha)?.is_integer() {
                EndpointCertainty::Certified
            } else {
                warnings.push(format!("BOUNDARY verdict at non-integer alpha {alpha} reported as a point"));
                EndpointCertainty::GridResolution
            };
            components.push(AlphaComponent { kind: ComponentKind::Point, lo: alpha, hi: Some(alpha), endpoint_certainty: certainty });
            i = j + 1;
            continue;
        }

        let mut certain = true;
        let lo = if at_bottom {
            if first.alpha > 0.0 {
                warnings.push(format!("component truncated at window start {}", first.alpha));
                certain = false;
            }
            first.alpha
        } else {
            refine_end(ev, samples[i - 1].alpha, first, &mut certain, &mut warnings)?
        };
        let (kind, hi) = if at_top && (cfg.alpha_max >= critical || (at_bottom && first.alpha == 0.0)) {
            (ComponentKind::Ray, None)
        } else if at_top {
            warnings.push(format!("component truncated at window end {}", last.alpha));
            certain = false;
            (ComponentKind::Interval, Some(last.alpha))
        } else {
            (ComponentKind::Interval, Some(refine_end(ev, samples[j + 1].alpha, last, &mut certain, &mut warnings)?))
        };
        let certainty = if certain { EndpointCertainty::Certified } else { EndpointCertainty::GridResolution };
        components.push(AlphaComponent { kind, lo, hi, endpoint_certainty: certainty });
        i = j + 1;
    }

    for s in samples.iter().filter(|s| s.verdict == PsdClass::NotPsd) {
        if let Some(c) = components.iter().find(|c| s.alpha > c.lo && c.hi.is_none_or(|hi| s.alpha < hi)) {
            return Err(Error::InconsistentSamples { alpha: s.alpha, lo: c.lo, hi: c.hi.unwrap_or(f64::INFINITY) });
        }
    }

    Ok(SsetReport {
        family: ev.spec().cloned(),
        use_abs: ev.use_abs(),
        window: [cfg.alpha_min, cfg.alpha_max],
        grid_step: cfg.grid_step,
        components,
        witnesses,
        warnings,
    })
}

/// Endpoint of a member run next to the NOT_PSD sample at `outside`.
fn refine_end(
    ev: &Evaluator,
    outside: f64,
    edge: &CurveSample,
    certain: &mut bool,
    warnings: &mut Vec<String>,
) -> Result<f64> {
    if edge.verdict == PsdClass::Boundary {
        // touching point: exact at integers, grid-limited elsewhere
        if !Alpha::new(edge.alpha)?.is_integer() {
            warnings.push(format!("BOUNDARY endpoint at non-integer alpha {}", edge.alpha));
            *certain = false;
        }
        return Ok(edge.alpha);
    }
    let mut tol = ROOT_TOL;
    loop {
        let b = isolate_root_with(ev, Alpha::new(outside)?, Alpha::new(edge.alpha)?, tol)?;
        let end = b.psd_end();
        // features narrower than the tolerance: keep halving until the end detaches
        if end != edge.alpha || tol < 1e-15 * edge.alpha.max(1.0) {
            return Ok(end);
        }
        tol /= 1e3;
    }
}

/// Pairs `α, β` of member points with `α + β` in the window whose sum is
/// certified NOT_PSD. Non-empty output means a bug, not mathematics.
pub fn monoid_check(ev: &Evaluator, report: &SsetReport, trials: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let top = report.window[1];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |rng: &mut ChaCha8Rng| -> f64 {
        let c = &report.components[rng.random_range(0..report.components.len())];
        let hi = c.hi.unwrap_or(top).min(top);
        if hi > c.lo { rng.random_range(c.lo..=hi) } else { c.lo }
    };
    let mut counterexamples = Vec::new();
    if report.components.is_empty() {
        return Ok(counterexamples);
    }
    for _ in 0..trials {
        let (a, b) = (pick(&mut rng), pick(&mut rng));
        if a + b > top {
            continue;
        }
        let member = |x: f64| -> Result<bool> { Ok(ev.classify(Alpha::new(x)?)?.class.is_member()) };
        if member(a)? && member(b)? && ev.classify(Alpha::new(a + b)?)?.class == PsdClass::NotPsd {
            counterexamples.push((a, b));
        }
    }
    Ok(counterexamples)
}

/// One row of the determinant curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetSample {
    pub alpha: f64,
    /// Extended-precision value when the referee is on (exactly 0 inside its
    /// zero band), working precision otherwise.
    pub det: f64,
    pub lambda_min: f64,
    pub verdict: PsdClass,
}

/// `det(A^∘α)` on `points` equally spaced values of `[alpha_min, alpha_max]`.
pub fn detcurve(spec: &FamilySpec, cfg: &ScanConfig, points: usize) -> Result<Vec<DetSample>> {
    cfg.validate()?;
    if points < 2 {
        return Err(Error::BadWindow(format!("grid needs at least 2 points, got {points}")));
    }
    let ev = Evaluator::for_family(spec, cfg)?;
    let use_hp = cfg.oracle && spec.kind != FamilyKind::File;
    let span = cfg.alpha_max - cfg.alpha_min;
    let alphas: Vec<Alpha> =
        (0..points).map(|i| Alpha::new(cfg.alpha_min + span * i as f64 / (points - 1) as f64)).collect::<Result<_>>()?;
    alphas
        .par_iter()
        .map(|&a| {
            let s = ev.sample(a)?;
            let det = if use_hp {
                let hp = hp_det(spec, cfg.use_abs, a, cfg.digits)?;
                if hp.sign == HpSign::ZeroBand { 0.0 } else { hp.value_estimate }
            } else {
                s.det
            };
            Ok(DetSample { alpha: s.alpha, det, lambda_min: s.lambda_min, verdict: s.verdict })
        })
        .collect()
}

/// `{:.16e}`: 17 significant digits, stable across runs.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_curve_csv(samples: &[CurveSample], mut w: impl Write) -> io::Result<()> {
    writeln!(w, "alpha,lambda_min,det,verdict")?;
    for s in samples {
        writeln!(w, "{},{},{},{}", fmt_float(s.alpha), fmt_float(s.lambda_min), fmt_float(s.det), s.verdict.as_str())?;
    }
    Ok(())
}

pub fn write_detcurve_csv(samples: &[DetSample], mut w: impl Write) -> io::Result<()> {
    writeln!(w, "alpha,det,lambda_min,verdict")?;
    for s in samples {
        writeln!(w, "{},{},{},{}", fmt_float(s.alpha), fmt_float(s.det), fmt_float(s.lambda_min), s.verdict.as_str())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{default_x, Param};

    fn a(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    fn kinds(r: &SsetReport) -> Vec<(ComponentKind, f64, Option<f64>)> {
        r.components.iter().map(|c| (c.kind, c.lo, c.hi)).collect()
    }

    #[test]
    fn grid_contains_integers_exactly() {
        let g = ScanConfig::new(0.0, 3.0).with_step(0.3).grid().unwrap();
        let v: Vec<f64> = g.iter().map(|a| a.value()).collect();
        for i in 0..=3 {
            assert!(v.contains(&(i as f64)), "{v:?}");
        }
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(ScanConfig::new(0.0, 1.0).grid().unwrap().len(), 101);
        assert!(ScanConfig::new(1.0, 1.0).grid().is_err());
    }

    #[test]
    fn baseline_a4_curve_examples() {
        let spec = FamilySpec::poly_gram(default_x(4));
        let cfg = ScanConfig::new(0.0, 4.0);
        let s = lambda_curve(&spec, &[a(0.0), a(1.0), a(2.0), a(1.5)], &cfg).unwrap();
        let v: Vec<PsdClass> = s.iter().map(|s| s.verdict).collect();
        assert_eq!(v, [PsdClass::Boundary, PsdClass::Boundary, PsdClass::Boundary, PsdClass::NotPsd]);
    }

    #[test]
    fn baseline_a4_components() {
        let spec = FamilySpec::poly_gram(default_x(4));
        let (r, _) = scan(&spec, &ScanConfig::new(0.0, 4.0)).unwrap();
        assert_eq!(
            kinds(&r),
            [
                (ComponentKind::Point, 0.0, Some(0.0)),
                (ComponentKind::Point, 1.0, Some(1.0)),
                (ComponentKind::Ray, 2.0, None)
            ]
        );
        assert!(r.components.iter().all(|c| c.endpoint_certainty == EndpointCertainty::Certified));
        assert!(r.warnings.is_empty(), "{:?}", r.warnings);
        assert_eq!(r.witnesses.len(), 2);
        assert!(r.witnesses.iter().all(|w| w.lambda_min < 0.0 && r.component_containing(w.alpha).is_none()));
    }

    #[test]
    fn all_ones_is_one_ray() {
        let cfg = ScanConfig::new(0.0, 0.5);
        let (r, _) = scan_matrix(&SymMatrix::ones(3).unwrap(), &cfg).unwrap();
        assert_eq!(kinds(&r), [(ComponentKind::Ray, 0.0, None)]);
    }

    #[test]
    fn isolate_through_touching_point() {
        // λ_min(A_4^∘α) < 0 on (1, 2), = 0 at 2, > 0 beyond
        let spec = FamilySpec::poly_gram(default_x(4));
        let cfg = ScanConfig::new(0.0, 4.0);
        let b = isolate_root(&spec, a(1.5), a(2.5), &cfg).unwrap();
        assert!(b.width() <= ROOT_TOL && b.lo <= 2.0 && b.hi >= 2.0, "{b:?}");
        assert!(matches!(isolate_root(&spec, a(1.2), a(1.5), &cfg), Err(Error::SameSign { .. })));
    }

    #[test]
    fn isolate_cosine_crossing() {
        let spec = FamilySpec::perturbed_cos_toeplitz(6, Param::parse("1e-4").unwrap());
        let cfg = ScanConfig::new(0.0, 6.0).with_abs(true);
        let b = isolate_root(&spec, a(1.0), a(2.0), &cfg).unwrap();
        assert!(b.width() <= ROOT_TOL && b.lo > 1.0 && b.hi < 2.0, "{b:?}");
        assert_eq!((b.class_lo, b.class_hi), (PsdClass::NotPsd, PsdClass::Psd));
    }

    #[test]
    fn csv_headers() {
        let s = CurveSample { alpha: 0.5, lambda_min: -1e-3, det: 2.0, verdict: PsdClass::NotPsd, precision: Precision::Working };
        let mut out = Vec::new();
        write_curve_csv(&[s], &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "alpha,lambda_min,det,verdict\n5.0000000000000000e-1,-1.0000000000000000e-3,2.0000000000000000e0,NOT_PSD\n"
        );
        let d = DetSample { alpha: 1.0, det: 3.0, lambda_min: 0.5, verdict: PsdClass::Psd };
        let mut out = Vec::new();
        write_detcurve_csv(&[d], &mut out).unwrap();
        assert!(String::from_utf8(out).unwrap().starts_with("alpha,det,lambda_min,verdict\n1.0000000000000000e0,3.0"));
    }

    #[test]
    fn monoid_on_baseline() {
        let spec = FamilySpec::poly_gram(default_x(4));
        let cfg = ScanConfig::new(0.0, 4.0);
        let ev = Evaluator::for_family(&spec, &cfg).unwrap();
        let (r, _) = scan_with(&ev, &cfg).unwrap();
        assert!(monoid_check(&ev, &r, 40, 7).unwrap().is_empty());
    }
}
