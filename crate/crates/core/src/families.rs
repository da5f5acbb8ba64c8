//! Constructors for the matrix families and seeded random PSD inputs.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

/// A real parameter that remembers how it was written.
///
/// `1/3` or `1e-7` keep their exact decimal/rational text so the
/// extended-precision referee can rebuild the intended value instead of its
/// binary64 rounding.
#[derive(Debug, Clone)]
pub struct Param {
    value: f64,
    text: String,
}

impl Param {
    pub fn parse(text: &str) -> Result<Param> {
        let text = text.trim();
        let value = match text.split_once('/') {
            Some((num, den)) => {
                let num: f64 = num.trim().parse().map_err(|_| Error::BadNumber(text.into()))?;
                let den: f64 = den.trim().parse().map_err(|_| Error::BadNumber(text.into()))?;
                num / den
            }
            None => text.parse().map_err(|_| Error::BadNumber(text.into()))?,
        };
        if !value.is_finite() {
            return Err(Error::BadNumber(text.into()));
        }
        Ok(Param { value, text: text.replace(' ', "") })
    }

    /// Wraps a binary64 value; its shortest round-trip decimal is taken as exact.
    pub fn from_f64(value: f64) -> Param {
        Param { value, text: value.to_string() }
    }

    pub fn ratio(num: u64, den: u64) -> Param {
        Param { value: num as f64 / den as f64, text: format!("{num}/{den}") }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Either `p/q` or a decimal literal.
    pub fn text(&self) -> &str {
        &self.text
    }
}

/// Decimal spellings of one value are equal; a fraction only equals itself.
impl PartialEq for Param {
    fn eq(&self, other: &Param) -> bool {
        let fraction = self.text.contains('/') || other.text.contains('/');
        self.value == other.value && (!fraction || self.text == other.text)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.text.contains('/') {
            s.serialize_str(&self.text)
        } else {
            s.serialize_f64(self.value)
        }
    }
}

impl<'de> Deserialize<'de> for Param {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Param, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Param::from_f64(v)),
            Raw::Text(t) => Param::parse(&t).map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FamilyKind {
    /// `[1 + x_i x_j]`
    PolyGram,
    /// `[1 + x_i x_j] + ε·diag(0, …, 0, 1, …, 1)` with `k` trailing ones.
    PerturbedPolyGram,
    /// `[cos((i - j)π/n)]`
    CosToeplitz,
    /// `[cos((i - j)π/n)] + ε·I`
    PerturbedCosToeplitz,
    File,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::PolyGram => "POLY_GRAM",
            FamilyKind::PerturbedPolyGram => "PERTURBED_POLY_GRAM",
            FamilyKind::CosToeplitz => "COS_TOEPLITZ",
            FamilyKind::PerturbedCosToeplitz => "PERTURBED_COS_TOEPLITZ",
            FamilyKind::File => "FILE",
        }
    }
}

/// Declarative description of a matrix to build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub x: Vec<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

/// `x_i = 1/(i+1)` for `i = 1..=n`.
pub fn default_x(n: usize) -> Vec<Param> {
    (1..=n as u64).map(|i| Param::ratio(1, i + 1)).collect()
}

impl FamilySpec {
    pub fn poly_gram(x: Vec<Param>) -> FamilySpec {
        FamilySpec { kind: FamilyKind::PolyGram, n: x.len(), x, k: None, eps: None, path: None }
    }

    pub fn perturbed_poly_gram(x: Vec<Param>, k: usize, eps: Param) -> FamilySpec {
        FamilySpec { kind: FamilyKind::PerturbedPolyGram, n: x.len(), x, k: Some(k), eps: Some(eps), path: None }
    }

    pub fn cos_toeplitz(n: usize) -> FamilySpec {
        FamilySpec { kind: FamilyKind::CosToeplitz, n, x: Vec::new(), k: None, eps: None, path: None }
    }

    pub fn perturbed_cos_toeplitz(n: usize, eps: Param) -> FamilySpec {
        FamilySpec { kind: FamilyKind::PerturbedCosToeplitz, n, x: Vec::new(), k: None, eps: Some(eps), path: None }
    }

    /// A file-backed spec; `n` is read from the file.
    pub fn file(path: impl AsRef<Path>) -> Result<FamilySpec> {
        let m = SymMatrix::read_file(path.as_ref())?;
        Ok(FamilySpec { kind: FamilyKind::File, n: m.order(), x: Vec::new(), k: None, eps: None, path: Some(path.as_ref().into()) })
    }

    pub fn from_json(text: &str) -> Result<FamilySpec> {
        let mut spec: FamilySpec = serde_json::from_str(text)?;
        if matches!(spec.kind, FamilyKind::PolyGram | FamilyKind::PerturbedPolyGram) && spec.x.is_empty() {
            spec.x = default_x(spec.n);
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn eps_value(&self) -> f64 {
        self.eps.as_ref().map_or(0.0, Param::value)
    }

    pub fn x_values(&self) -> Vec<f64> {
        self.x.iter().map(Param::value).collect()
    }

    /// Whether the family has negative entries, i.e. needs `|A|^∘α`.
    pub fn is_signed(&self) -> bool {
        matches!(self.kind, FamilyKind::CosToeplitz | FamilyKind::PerturbedCosToeplitz | FamilyKind::File)
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            FamilyKind::PolyGram | FamilyKind::PerturbedPolyGram => {
                if self.x.len() != self.n {
                    return Err(Error::IncompleteSpec("x must have exactly n entries"));
                }
                validate_x(&self.x_values())?;
                if self.kind == FamilyKind::PerturbedPolyGram {
                    let k = self.k.ok_or(Error::IncompleteSpec("perturbed family needs k"))?;
                    if k == 0 || k > self.n {
                        return Err(Error::BadK { n: self.n, k });
                    }
                    validate_eps(self.eps.as_ref())?;
                }
            }
            FamilyKind::CosToeplitz | FamilyKind::PerturbedCosToeplitz => {
                if self.n < 2 {
                    return Err(Error::BadOrder(self.n));
                }
                if self.kind == FamilyKind::PerturbedCosToeplitz {
                    validate_eps(self.eps.as_ref())?;
                }
            }
            FamilyKind::File => {
                if self.path.is_none() {
                    return Err(Error::IncompleteSpec("file family needs a path"));
                }
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<SymMatrix> {
        self.validate()?;
        match self.kind {
            FamilyKind::PolyGram => build_poly_gram(&self.x_values()),
            FamilyKind::PerturbedPolyGram => {
                build_perturbed_poly_gram(&self.x_values(), self.k.unwrap_or(0), self.eps_value())
            }
            FamilyKind::CosToeplitz => build_cos_toeplitz(self.n),
            FamilyKind::PerturbedCosToeplitz => build_perturbed_cos_toeplitz(self.n, self.eps_value()),
            FamilyKind::File => {
                let m = SymMatrix::read_file(self.path.as_ref().expect("validated"))?;
                if m.order() != self.n {
                    return Err(Error::BadOrder(m.order()));
                }
                Ok(m)
            }
        }
    }

    /// Short human label, e.g. `PERTURBED_POLY_GRAM(n=4,k=1,eps=1e-7)`.
    pub fn label(&self) -> String {
        let mut parts = vec![format!("n={}", self.n)];
        if let Some(k) = self.k {
            parts.push(format!("k={k}"));
        }
        if let Some(eps) = &self.eps {
            parts.push(format!("eps={eps}"));
        }
        if let Some(p) = &self.path {
            parts.push(format!("path={}", p.display()));
        }
        format!("{}({})", self.kind.name(), parts.join(","))
    }
}

fn validate_x(x: &[f64]) -> Result<()> {
    for (i, &v) in x.iter().enumerate() {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositiveX { index: i, value: v });
        }
        if let Some(j) = x[..i].iter().position(|&u| u == v) {
            return Err(Error::DuplicateX(j, i));
        }
    }
    Ok(())
}

fn validate_eps(eps: Option<&Param>) -> Result<()> {
    let eps = eps.ok_or(Error::IncompleteSpec("perturbed family needs eps"))?;
    if eps.value().is_finite() && eps.value() >= 0.0 {
        Ok(())
    } else {
        Err(Error::BadEpsilon(eps.value()))
    }
}

/// `[1 + x_i x_j]` for distinct positive `x`.
pub fn build_poly_gram(x: &[f64]) -> Result<SymMatrix> {
    validate_x(x)?;
    SymMatrix::from_upper_fn(x.len(), |i, j| 1.0 + x[i] * x[j])
}

/// `[1 + x_i x_j]` with `eps` added to the last `k` diagonal entries.
pub fn build_perturbed_poly_gram(x: &[f64], k: usize, eps: f64) -> Result<SymMatrix> {
    let n = x.len();
    if k == 0 || k > n {
        return Err(Error::BadK { n, k });
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::BadEpsilon(eps));
    }
    validate_x(x)?;
    SymMatrix::from_upper_fn(n, |i, j| {
        let base = 1.0 + x[i] * x[j];
        if i == j && i >= n - k {
            base + eps
        } else {
            base
        }
    })
}

/// `cos(dπ/n)` with exact zero at `2d = n` and odd symmetry about `n/2`.
pub(crate) fn cos_entry(n: usize, d: usize) -> f64 {
    if 2 * d == n {
        0.0
    } else if 2 * d > n {
        -(((n - d) as f64) * PI / n as f64).cos()
    } else {
        ((d as f64) * PI / n as f64).cos()
    }
}

/// `[cos((i - j)π/n)]_{0 ≤ i, j < n}`.
pub fn build_cos_toeplitz(n: usize) -> Result<SymMatrix> {
    if n < 2 {
        return Err(Error::BadOrder(n));
    }
    SymMatrix::from_upper_fn(n, |i, j| cos_entry(n, j - i))
}

/// `C_n + eps·I`.
pub fn build_perturbed_cos_toeplitz(n: usize, eps: f64) -> Result<SymMatrix> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::BadEpsilon(eps));
    }
    Ok(build_cos_toeplitz(n)?.shift_diagonal(eps))
}

/// `VᵀV` with `V` uniform on `[0, 1)`, seeded with ChaCha8.
pub fn random_psd_nonneg(n: usize, seed: u64) -> Result<SymMatrix> {
    if n == 0 {
        return Err(Error::BadOrder(0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<f64> = (0..n * n).map(|_| rng.random::<f64>()).collect();
    SymMatrix::from_upper_fn(n, |i, j| (0..n).map(|r| v[r * n + i] * v[r * n + j]).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Alpha;
    use crate::oracle::FamilyPoint;
    use crate::spectra::{classify_psd, classify_psd_with, eigenvalues, min_eigenvalue, PsdClass};
    use approx::assert_relative_eq;

    fn xs(n: usize) -> Vec<f64> {
        (1..=n).map(|i| 1.0 / (i + 1) as f64).collect()
    }

    #[test]
    fn poly_gram_entries() {
        let m = build_poly_gram(&xs(2)).unwrap();
        assert_relative_eq!(m.get(0, 1), 1.0 + 1.0 / 6.0, max_relative = 1e-15);
        let m = build_poly_gram(&xs(4)).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m.get(i, i)).collect();
        let want = [1.25, 1.0 + 1.0 / 9.0, 1.0625, 1.04];
        for (d, w) in diag.iter().zip(want) {
            assert_relative_eq!(*d, w, max_relative = 1e-15);
        }
        assert_eq!(m.max_abs_entry(), 1.25);
    }

    #[test]
    fn poly_gram_rejects_bad_x() {
        assert!(matches!(build_poly_gram(&[0.5, 0.5]), Err(Error::DuplicateX(0, 1))));
        assert!(matches!(build_poly_gram(&[0.5, 0.0]), Err(Error::NonPositiveX { index: 1, .. })));
        assert!(matches!(build_poly_gram(&[-1.0]), Err(Error::NonPositiveX { index: 0, .. })));
    }

    #[test]
    fn poly_gram_is_rank_two() {
        for n in 3..=8 {
            let m = build_poly_gram(&xs(n)).unwrap();
            let s = eigenvalues(&m).unwrap();
            let zeros = s.eigenvalues.iter().filter(|v| v.abs() < 1e-13).count();
            assert!(zeros >= n - 2, "n={n}: {:?}", s.eigenvalues);
            let spec = FamilySpec::poly_gram(default_x(n));
            let referee = FamilyPoint { spec: &spec, use_abs: false, alpha: Alpha::ONE, digits: 50 };
            assert_eq!(classify_psd_with(&m, &referee).unwrap().class, PsdClass::Boundary);
        }
    }

    #[test]
    fn perturbation_touches_only_trailing_diagonal() {
        let x = xs(4);
        assert_eq!(build_perturbed_poly_gram(&x, 2, 0.0).unwrap(), build_poly_gram(&x).unwrap());
        let base = build_poly_gram(&x).unwrap();
        let pert = build_perturbed_poly_gram(&x, 1, 1e-7).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let diff = pert.get(i, j) - base.get(i, j);
                if (i, j) == (3, 3) {
                    assert_relative_eq!(diff, 1e-7, max_relative = 1e-8);
                } else {
                    assert_eq!(diff, 0.0);
                }
            }
        }
        let x6 = xs(6);
        for k in 1..=6 {
            let p = build_perturbed_poly_gram(&x6, k, 1e-3).unwrap();
            let lead = p.leading_block(6 - k).ok();
            if let Some(lead) = lead {
                assert_eq!(lead, build_poly_gram(&x6[..6 - k]).unwrap());
            }
            let nonzero = (0..6).filter(|&i| p.get(i, i) != base_diag(&x6, i)).count();
            assert_eq!(nonzero, k);
        }
        assert!(matches!(build_perturbed_poly_gram(&x, 0, 1e-3), Err(Error::BadK { .. })));
        assert!(matches!(build_perturbed_poly_gram(&x, 5, 1e-3), Err(Error::BadK { .. })));
        assert!(matches!(build_perturbed_poly_gram(&x, 1, -1e-3), Err(Error::BadEpsilon(_))));
    }

    fn base_diag(x: &[f64], i: usize) -> f64 {
        1.0 + x[i] * x[i]
    }

    #[test]
    fn cosine_first_row() {
        let c = build_cos_toeplitz(4).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(c.get(0, 0), 1.0);
        assert_relative_eq!(c.get(0, 1), h, max_relative = 1e-15);
        assert_eq!(c.get(0, 2), 0.0);
        assert_relative_eq!(c.get(0, 3), -h, max_relative = 1e-15);
        for n in 3..10 {
            let c = build_cos_toeplitz(n).unwrap();
            assert!(c.get(0, n - 1) < 0.0);
            for i in 0..n {
                assert_eq!(c.get(i, i), 1.0);
                for j in 0..n {
                    assert_eq!(c.get(i, j), c.get(0, i.abs_diff(j)));
                }
            }
            assert!(min_eigenvalue(&c).unwrap() > -1e-14, "n={n}");
        }
        assert!(matches!(build_cos_toeplitz(1), Err(Error::BadOrder(1))));
    }

    #[test]
    fn cosine_is_gram_of_unit_vectors() {
        for n in 2..10 {
            let c = build_cos_toeplitz(n).unwrap();
            let t = |i: usize| i as f64 * PI / n as f64;
            for i in 0..n {
                for j in 0..n {
                    let g = t(i).cos() * t(j).cos() + t(i).sin() * t(j).sin();
                    assert!((c.get(i, j) - g).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn perturbed_cosine_shifts_spectrum() {
        for n in [4, 5, 8] {
            assert_eq!(build_perturbed_cos_toeplitz(n, 0.0).unwrap(), build_cos_toeplitz(n).unwrap());
            let base = min_eigenvalue(&build_cos_toeplitz(n).unwrap()).unwrap();
            let pert = build_perturbed_cos_toeplitz(n, 1e-3).unwrap();
            assert!((min_eigenvalue(&pert).unwrap() - base - 1e-3).abs() < 1e-12);
            assert!(pert.abs_power(crate::Alpha::ONE).as_slice().iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn random_generator_is_deterministic_psd() {
        let a = random_psd_nonneg(5, 42).unwrap();
        let b = random_psd_nonneg(5, 42).unwrap();
        assert_eq!(a.as_slice(), b.as_slice());
        assert_ne!(a, random_psd_nonneg(5, 43).unwrap());
        assert!(a.as_slice().iter().all(|v| *v >= 0.0));
        assert!(classify_psd(&a).unwrap().class.is_member());
    }

    #[test]
    fn constructors_are_bitwise_deterministic() {
        let s = FamilySpec::perturbed_poly_gram(default_x(5), 2, Param::parse("1e-7").unwrap());
        assert_eq!(s.build().unwrap().as_slice(), s.build().unwrap().as_slice());
    }

    #[test]
    fn param_parsing() {
        let p = Param::parse("1/3").unwrap();
        assert_eq!(p.value(), 1.0 / 3.0);
        assert_eq!(p.text(), "1/3");
        assert_eq!(Param::parse("1e-7").unwrap().value(), 1e-7);
        assert_eq!(Param::from_f64(0.25).text(), "0.25");
        assert!(Param::parse("abc").is_err());
        assert!(Param::parse("1/0").is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let s = FamilySpec::perturbed_poly_gram(default_x(4), 1, Param::parse("1e-7").unwrap());
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"kind\":\"PERTURBED_POLY_GRAM\""), "{text}");
        assert!(text.contains("\"1/2\""), "{text}");
        assert_eq!(FamilySpec::from_json(&text).unwrap(), s);

        let s = FamilySpec::from_json(r#"{"kind":"POLY_GRAM","n":3}"#).unwrap();
        assert_eq!(s.x, default_x(3));
        let s = FamilySpec::from_json(r#"{"kind":"PERTURBED_POLY_GRAM","n":2,"x":[0.5,2],"k":1,"eps":0.001}"#).unwrap();
        assert_eq!(s.x_values(), vec![0.5, 2.0]);
        assert!(FamilySpec::from_json(r#"{"kind":"PERTURBED_POLY_GRAM","n":2,"k":3,"eps":0.1}"#).is_err());
        assert!(FamilySpec::from_json(r#"{"kind":"COS_TOEPLITZ","n":1}"#).is_err());
    }
}
