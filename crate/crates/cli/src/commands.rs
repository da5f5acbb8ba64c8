use std::fmt;
use std::fs;
use std::io::{self, Write};

use hadapow_core::exppoly::{expand_minor, expand_minor_positive_alpha};
use hadapow_core::families::{default_x, random_psd_nonneg};
use hadapow_core::scan::{detcurve, fmt_float, scan, scan_matrix, write_curve_csv, write_detcurve_csv, DEFAULT_GRID_STEP};
use hadapow_core::verify::{
    verify_all_baselines, verify_baseline, verify_thm1, verify_thm2, Baseline, VerificationRecord, VerifyOptions,
};
use hadapow_core::{Error, FamilySpec, Param, ScanConfig, SymMatrix};
use serde_json::json;

use crate::args::{BaselineFamily, Driver, FamilyArgs, FamilyName, Format, OutputArgs, PrecisionArgs, VerifyArgs, WindowArgs};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InconsistentSamples { .. } | Error::NoConvergence { .. } => EXIT_INCONSISTENT,
            Error::EpsilonLadderExhausted { .. } | Error::BaselineMismatch { .. } => EXIT_VERIFICATION,
            _ => EXIT_USAGE,
        };
        let hint = if matches!(e, Error::NegativeEntry { .. }) { " (pass --use-abs)" } else { "" };
        Failure { code, message: format!("{e}{hint}") }
    }
}

type Outcome = Result<(), Failure>;

fn emit(out: &OutputArgs, bytes: &[u8]) -> Outcome {
    match &out.out {
        Some(path) => fs::write(path, bytes).map_err(|e| Failure::usage(format!("{}: {e}", path.display()))),
        None => io::stdout().write_all(bytes).map_err(|e| Failure::usage(e.to_string())),
    }
}

enum Source {
    Spec(FamilySpec),
    Matrix(SymMatrix),
}

impl Source {
    fn matrix(&self) -> Result<SymMatrix, Failure> {
        match self {
            Source::Spec(spec) => Ok(spec.build()?),
            Source::Matrix(m) => Ok(m.clone()),
        }
    }

    fn order(&self) -> usize {
        match self {
            Source::Spec(spec) => spec.n,
            Source::Matrix(m) => m.order(),
        }
    }
}

/// Defaults for flags the user left out.
#[derive(Default)]
struct Defaults {
    family: Option<FamilyName>,
    n: Option<usize>,
    k: Option<usize>,
    eps: Option<&'static str>,
}

const DETCURVE_DEFAULTS: Defaults =
    Defaults { family: Some(FamilyName::PerturbedPolyGram), n: Some(4), k: Some(1), eps: Some("1e-7") };

fn parse_params(texts: &[String]) -> Result<Vec<Param>, Failure> {
    texts.iter().map(|t| Param::parse(t.trim()).map_err(Failure::from)).collect()
}

fn source(f: &FamilyArgs, d: &Defaults) -> Result<Source, Failure> {
    let given = [f.family.is_some(), f.file.is_some(), f.spec.is_some(), f.random.is_some()];
    match given.iter().filter(|&&g| g).count() {
        0 if d.family.is_none() => return Err(Failure::usage("specify one of --family, --file, --spec or --random")),
        0 | 1 => {}
        _ => return Err(Failure::usage("--family, --file, --spec and --random are mutually exclusive")),
    }
    if let Some(path) = &f.file {
        return Ok(Source::Spec(FamilySpec::file(path)?));
    }
    if let Some(text) = &f.spec {
        return Ok(Source::Spec(FamilySpec::from_json(text)?));
    }
    if let Some(n) = f.random {
        return Ok(Source::Matrix(random_psd_nonneg(n, f.seed)?));
    }
    let family = f.family.or(d.family).expect("checked above");
    let x = f.x.as_deref().map(parse_params).transpose()?;
    let n = f.n.or(x.as_ref().map(Vec::len)).or(d.n).ok_or_else(|| Failure::usage("--n is required"))?;
    let eps = match f.eps.as_deref().or(d.eps) {
        Some(t) => Some(Param::parse(t)?),
        None => None,
    };
    let k = f.k.or(d.k);
    let gram = matches!(family, FamilyName::PolyGram | FamilyName::PerturbedPolyGram);
    if !gram && f.x.is_some() {
        return Err(Failure::usage("--x applies only to the poly-gram families"));
    }
    if family != FamilyName::PerturbedPolyGram && f.k.is_some() {
        return Err(Failure::usage("--k applies only to perturbed-poly-gram"));
    }
    if matches!(family, FamilyName::PolyGram | FamilyName::Cos) && f.eps.is_some() {
        return Err(Failure::usage("--eps applies only to the perturbed families"));
    }
    let x = x.unwrap_or_else(|| default_x(n));
    if gram && x.len() != n {
        return Err(Failure::usage(format!("--x has {} values but --n is {n}", x.len())));
    }
    let need_eps = || eps.clone().ok_or_else(|| Failure::usage("--eps is required"));
    let spec = match family {
        FamilyName::PolyGram => FamilySpec::poly_gram(x),
        FamilyName::PerturbedPolyGram => {
            let k = k.ok_or_else(|| Failure::usage("--k is required"))?;
            FamilySpec::perturbed_poly_gram(x, k, need_eps()?)
        }
        FamilyName::Cos => FamilySpec::cos_toeplitz(n),
        FamilyName::PerturbedCos => FamilySpec::perturbed_cos_toeplitz(n, need_eps()?),
    };
    spec.validate()?;
    Ok(Source::Spec(spec))
}

fn scan_config(w: &WindowArgs, p: &PrecisionArgs, use_abs: bool, lo: f64, hi: f64) -> Result<ScanConfig, Failure> {
    let (lo, hi) = (w.alpha_min.unwrap_or(lo), w.alpha_max.unwrap_or(hi));
    let mut cfg = ScanConfig::new(lo, hi).with_abs(use_abs).with_digits(p.digits);
    cfg.oracle = !p.no_oracle;
    if let Some(points) = w.grid {
        if points < 2 {
            return Err(Failure::usage("--grid must be at least 2"));
        }
        cfg = cfg.with_step((hi - lo) / (points - 1) as f64);
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn matrix(family: &FamilyArgs, output: &OutputArgs) -> Outcome {
    let m = source(family, &Defaults::default())?.matrix()?;
    emit(output, m.to_text().as_bytes())
}

pub fn scan_cmd(family: &FamilyArgs, window: &WindowArgs, precision: &PrecisionArgs, use_abs: bool, output: &OutputArgs) -> Outcome {
    let src = source(family, &Defaults::default())?;
    let mut cfg = scan_config(window, precision, use_abs, 0.0, src.order() as f64)?;
    if window.grid.is_none() {
        cfg = cfg.with_step(DEFAULT_GRID_STEP);
    }
    let (report, samples) = match &src {
        Source::Spec(spec) => scan(spec, &cfg)?,
        Source::Matrix(m) => scan_matrix(m, &cfg)?,
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    match output.format.unwrap_or(Format::Json) {
        Format::Json => emit(output, format!("{}\n", report.to_json()).as_bytes()),
        Format::Csv => {
            let mut buf = Vec::new();
            write_curve_csv(&samples, &mut buf).expect("write to memory");
            emit(output, &buf)
        }
    }
}

pub fn detcurve_cmd(family: &FamilyArgs, window: &WindowArgs, precision: &PrecisionArgs, use_abs: bool, output: &OutputArgs) -> Outcome {
    let Source::Spec(spec) = source(family, &DETCURVE_DEFAULTS)? else {
        return Err(Failure::usage("detcurve needs a family, --file or --spec"));
    };
    let points = window.grid.unwrap_or(151);
    let cfg = scan_config(&WindowArgs { grid: Some(points), ..*window }, precision, use_abs, 1.0, 2.5)?;
    let curve = detcurve(&spec, &cfg, points)?;
    match output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_detcurve_csv(&curve, &mut buf).expect("write to memory");
            emit(output, &buf)
        }
        Format::Json => {
            let text = serde_json::to_string_pretty(&curve).expect("curve serializes");
            emit(output, format!("{text}\n").as_bytes())
        }
    }
}

fn verify_options(a: &VerifyArgs) -> Result<VerifyOptions, Failure> {
    Ok(VerifyOptions {
        digits: a.digits,
        eps: a.eps.as_deref().map(Param::parse).transpose()?,
        x: a.x.as_deref().map(parse_params).transpose()?,
        min_delta: a.min_delta,
        audit: a.audit,
        ..VerifyOptions::default()
    })
}

fn finish_record(result: Result<VerificationRecord, Error>, output: &OutputArgs) -> Outcome {
    let rec = match result {
        Ok(rec) => rec,
        Err(Error::EpsilonLadderExhausted { last }) => *last,
        Err(e) => return Err(e.into()),
    };
    emit(output, format!("{}\n", rec.to_json()).as_bytes())?;
    match rec.first_failure() {
        None if rec.passed => Ok(()),
        Some(c) => Err(Failure { code: EXIT_VERIFICATION, message: format!("clause {} failed: {}", c.name, c.detail) }),
        None => Err(Failure { code: EXIT_VERIFICATION, message: "verification failed".into() }),
    }
}

pub fn verify(driver: &Driver) -> Outcome {
    match driver {
        Driver::Thm1 { n, k, opts } => finish_record(verify_thm1(*n, *k, &verify_options(opts)?), &opts.output),
        Driver::Thm2 { n, opts } => finish_record(verify_thm2(*n, &verify_options(opts)?), &opts.output),
        Driver::Baselines { n, family, digits, output } => {
            let opts = VerifyOptions { digits: *digits, ..VerifyOptions::default() };
            let records = match (n, family) {
                (None, None) => verify_all_baselines(&opts)?,
                (n, family) => {
                    let which: Vec<Baseline> = match family {
                        Some(BaselineFamily::PolyGram) => vec![Baseline::PolyGram],
                        Some(BaselineFamily::Cos) => vec![Baseline::Cos],
                        None => vec![Baseline::PolyGram, Baseline::Cos],
                    };
                    let mut records = Vec::new();
                    for b in which {
                        let orders = match (n, b) {
                            (Some(n), _) => *n..=*n,
                            (None, Baseline::PolyGram) => 3..=8,
                            (None, Baseline::Cos) => 4..=9,
                        };
                        for n in orders {
                            records.push(verify_baseline(b, n, &opts)?);
                        }
                    }
                    records
                }
            };
            let text = serde_json::to_string_pretty(&records).expect("records serialize");
            emit(output, format!("{text}\n").as_bytes())?;
            match records.iter().find(|r| !r.passed) {
                Some(r) => Err(Failure { code: EXIT_VERIFICATION, message: format!("{} failed", r.family.label()) }),
                None => Ok(()),
            }
        }
    }
}

pub fn exppoly(family: &FamilyArgs, indices: Option<&[usize]>, positive_alpha: bool, output: &OutputArgs) -> Outcome {
    let m = source(family, &Defaults::default())?.matrix()?;
    let all: Vec<usize> = (0..m.order()).collect();
    let idx = indices.unwrap_or(&all);
    let p = if positive_alpha { expand_minor_positive_alpha(&m, idx)? } else { expand_minor(&m, idx)? };
    let summary = json!({
        "m": idx.len(),
        "terms": p.len(),
        "sign_changes": p.sign_changes(),
        "zero_bound": p.zero_count_bound(),
    });
    let text = match output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("rate,coefficient\n");
            for &(rate, c) in p.terms() {
                s.push_str(&format!("{},{}\n", fmt_float(rate), fmt_float(c)));
            }
            format!("{s}{summary}\n")
        }
        Format::Json => {
            let mut v = summary;
            v["rates"] = json!(p.terms().iter().map(|t| t.0).collect::<Vec<_>>());
            v["coefficients"] = json!(p.terms().iter().map(|t| t.1).collect::<Vec<_>>());
            format!("{}\n", serde_json::to_string_pretty(&v).expect("summary serializes"))
        }
    };
    emit(output, text.as_bytes())
}
