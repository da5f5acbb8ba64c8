//! Dense symmetric matrices and entrywise power calculus.

use std::fmt;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Relative asymmetry below which input is silently symmetrized.
const SYMMETRY_TOLERANCE: f64 = 1e-13;

/// A non-negative exponent.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Alpha(f64);

impl Alpha {
    pub const ZERO: Alpha = Alpha(0.0);
    pub const ONE: Alpha = Alpha(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(Alpha(value))
        } else {
            Err(Error::BadAlpha(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0.fract() == 0.0
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Alpha::new(value)
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Dense real symmetric matrix stored in full row-major form.
///
/// Symmetry is exact: every constructor either mirrors the upper triangle or
/// symmetrizes input whose asymmetry is pure roundoff.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    a: Vec<f64>,
}

impl SymMatrix {
    /// Builds a matrix from row-major entries.
    ///
    /// Pairs whose difference is at most `1e-13 * max_abs_entry` are replaced
    /// by their mean; larger asymmetry is rejected.
    pub fn new(n: usize, mut entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.len() != n * n {
            return Err(Error::ShapeMismatch { order: n, expected: n * n, got: entries.len() });
        }
        if let Some(pos) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { i: pos / n, j: pos % n });
        }
        let scale = entries.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let limit = SYMMETRY_TOLERANCE * scale;
        for i in 0..n {
            for j in (i + 1)..n {
                let (u, l) = (entries[i * n + j], entries[j * n + i]);
                if u == l {
                    continue;
                }
                let gap = (u - l).abs();
                if gap > limit {
                    return Err(Error::Asymmetric { i, j, gap });
                }
                let mean = 0.5 * (u + l);
                entries[i * n + j] = mean;
                entries[j * n + i] = mean;
            }
        }
        Ok(SymMatrix { n, a: entries })
    }

    /// Builds a matrix by evaluating `f(i, j)` on the upper triangle (`i <= j`).
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                if !v.is_finite() {
                    return Err(Error::NonFinite { i, j });
                }
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        Ok(SymMatrix { n, a })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_upper_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn ones(n: usize) -> Result<Self> {
        Self::from_upper_fn(n, |_, _| 1.0)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    /// Row-major view of all `n²` entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `max |a_ij|`; zero only for the zero matrix.
    pub fn max_abs_entry(&self) -> f64 {
        self.a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.a.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `A + c·I`.
    pub fn shift_diagonal(&self, c: f64) -> SymMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            out.a[i * self.n + i] += c;
        }
        out
    }

    /// Entrywise (Schur) product.
    pub fn hadamard_product(&self, other: &SymMatrix) -> Result<SymMatrix> {
        if self.n != other.n {
            return Err(Error::ShapeMismatch { order: self.n, expected: self.n * self.n, got: other.a.len() });
        }
        let a = self.a.iter().zip(&other.a).map(|(x, y)| x * y).collect();
        Ok(SymMatrix { n: self.n, a })
    }

    /// `[a_ij^α]` for a matrix with non-negative entries, with `0^0 = 1`.
    pub fn hadamard_power(&self, alpha: Alpha) -> Result<SymMatrix> {
        if let Some(pos) = self.a.iter().position(|&v| v < 0.0) {
            let (i, j) = (pos / self.n, pos % self.n);
            return Err(Error::NegativeEntry { i, j, value: self.get(i, j) });
        }
        Ok(self.map_entries(|v| entry_power(v, alpha.0)))
    }

    /// `[|a_ij|^α]`, defined for any real symmetric matrix.
    pub fn abs_power(&self, alpha: Alpha) -> SymMatrix {
        self.map_entries(|v| entry_power(v.abs(), alpha.0))
    }

    /// Dispatches to [`abs_power`](Self::abs_power) or
    /// [`hadamard_power`](Self::hadamard_power).
    pub fn power(&self, alpha: Alpha, use_abs: bool) -> Result<SymMatrix> {
        if use_abs {
            Ok(self.abs_power(alpha))
        } else {
            self.hadamard_power(alpha)
        }
    }

    /// Restriction to the rows and columns in `indices` (strictly increasing).
    pub fn principal_submatrix(&self, indices: &[usize]) -> Result<SymMatrix> {
        let valid = !indices.is_empty()
            && indices.windows(2).all(|w| w[0] < w[1])
            && indices.last().is_some_and(|&last| last < self.n);
        if !valid {
            return Err(Error::IndexOutOfRange { indices: indices.to_vec(), order: self.n });
        }
        let m = indices.len();
        let mut a = Vec::with_capacity(m * m);
        for &i in indices {
            a.extend(indices.iter().map(|&j| self.get(i, j)));
        }
        Ok(SymMatrix { n: m, a })
    }

    /// Top-left `m × m` block.
    pub fn leading_block(&self, m: usize) -> Result<SymMatrix> {
        self.principal_submatrix(&(0..m).collect::<Vec<_>>())
    }

    fn map_entries(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        SymMatrix { n: self.n, a: self.a.iter().map(|&v| f(v)).collect() }
    }

    /// Parses the text format: the order on the first line, then `n` rows of
    /// `n` whitespace-separated decimals.
    pub fn parse(text: &str) -> Result<SymMatrix> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::Parse(format!("bad order line {header:?}")))?;
        let mut entries = Vec::with_capacity(n * n);
        for row in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("expected {n} rows, found {row}")))?;
            let before = entries.len();
            for tok in line.split_whitespace() {
                let v: f64 = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number {tok:?} in row {}", row + 1)))?;
                entries.push(v);
            }
            if entries.len() - before != n {
                return Err(Error::Parse(format!(
                    "row {} has {} entries, expected {n}",
                    row + 1,
                    entries.len() - before
                )));
            }
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing content after the last row".into()));
        }
        SymMatrix::new(n, entries)
    }

    /// Renders the text format; shortest round-trip decimals, so parsing the
    /// output reproduces the matrix bit for bit.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<SymMatrix> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        SymMatrix::parse(&text)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|source| Error::Io { path: path.into(), source })
    }
}

impl fmt::Display for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// `v^α` for `v ≥ 0` with the `0^0 = 1` convention.
#[inline]
pub(crate) fn entry_power(v: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else if v == 0.0 {
        0.0
    } else {
        // powf is exp(α·ln v) evaluated without the intermediate rounding.
        v.powf(alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn a(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    fn m2(a00: f64, a01: f64, a11: f64) -> SymMatrix {
        SymMatrix::new(2, vec![a00, a01, a01, a11]).unwrap()
    }

    #[test]
    fn alpha_rejects_negative_and_nan() {
        assert!(Alpha::new(-1e-300).is_err());
        assert!(Alpha::new(f64::NAN).is_err());
        assert!(Alpha::new(f64::INFINITY).is_err());
        assert!(Alpha::new(0.0).is_ok());
    }

    #[test]
    fn power_zero_is_all_ones() {
        let m = SymMatrix::new(3, vec![0.0, 2.0, 0.0, 2.0, 1.0, 3.0, 0.0, 3.0, 5.0]).unwrap();
        assert_eq!(m.hadamard_power(Alpha::ZERO).unwrap(), SymMatrix::ones(3).unwrap());
        let signed = m2(1.0, -0.5, 0.0);
        assert_eq!(signed.abs_power(Alpha::ZERO), SymMatrix::ones(2).unwrap());
    }

    #[test]
    fn power_one_is_identity_map() {
        let m = m2(1.25, 1.0 + 1.0 / 6.0, 1.0 + 1.0 / 9.0);
        assert_eq!(m.hadamard_power(Alpha::ONE).unwrap(), m);
    }

    #[test]
    fn square_root_power() {
        let r = m2(4.0, 2.0, 4.0).hadamard_power(a(0.5)).unwrap();
        assert_eq!(r.get(0, 0), 2.0);
        assert_relative_eq!(r.get(0, 1), 2.0_f64.sqrt(), max_relative = 1e-15);
        assert_eq!(r.get(1, 0), r.get(0, 1));
    }

    #[test]
    fn zero_entry_with_positive_alpha_is_zero() {
        let r = m2(1.0, 0.0, 1.0).hadamard_power(a(0.3)).unwrap();
        assert_eq!(r.get(0, 1), 0.0);
    }

    #[test]
    fn negative_entry_needs_abs_power() {
        let m = m2(1.0, -1.0, 1.0);
        assert!(matches!(m.hadamard_power(Alpha::ONE), Err(Error::NegativeEntry { i: 0, j: 1, .. })));
        assert_eq!(m.abs_power(Alpha::ONE), SymMatrix::ones(2).unwrap());
    }

    #[test]
    fn abs_power_of_cosine_squares() {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let m = SymMatrix::from_upper_fn(4, |i, j| [1.0, c, 0.0, -c][j - i]).unwrap();
        let sq = m.abs_power(a(2.0));
        for i in 0..4 {
            for j in 0..4 {
                assert_relative_eq!(sq.get(i, j), m.get(i, j).powi(2), max_relative = 1e-15);
            }
        }
    }

    #[test]
    fn symmetrizes_roundoff_and_rejects_real_asymmetry() {
        let m = SymMatrix::new(2, vec![1.0, 0.5, 0.5 + 1e-17, 1.0]).unwrap();
        assert_eq!(m.get(0, 1), m.get(1, 0));
        assert!(matches!(
            SymMatrix::new(2, vec![1.0, 0.5, 0.6, 1.0]),
            Err(Error::Asymmetric { i: 0, j: 1, .. })
        ));
        assert!(SymMatrix::new(0, vec![]).is_err());
        assert!(SymMatrix::new(2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn principal_submatrix_cases() {
        let m = SymMatrix::from_upper_fn(4, |i, j| (i * 4 + j) as f64 + 1.0).unwrap();
        assert_eq!(m.principal_submatrix(&[0, 1, 2, 3]).unwrap(), m);
        assert_eq!(m.principal_submatrix(&[0]).unwrap().as_slice(), &[m.get(0, 0)]);
        let s = m.principal_submatrix(&[1, 3]).unwrap();
        assert_eq!(s.as_slice(), &[m.get(1, 1), m.get(1, 3), m.get(3, 1), m.get(3, 3)]);
        for bad in [&[][..], &[4][..], &[2, 1][..], &[1, 1][..]] {
            assert!(matches!(m.principal_submatrix(bad), Err(Error::IndexOutOfRange { .. })));
        }
    }

    #[test]
    fn max_abs_entry_cases() {
        assert_eq!(SymMatrix::identity(3).unwrap().max_abs_entry(), 1.0);
        assert_eq!(SymMatrix::ones(5).unwrap().max_abs_entry(), 1.0);
        assert_eq!(m2(0.0, -3.0, 1.0).max_abs_entry(), 3.0);
        assert_eq!(m2(0.0, 0.0, 0.0).max_abs_entry(), 0.0);
    }

    #[test]
    fn text_format_round_trips_bitwise() {
        let m = SymMatrix::from_upper_fn(3, |i, j| 1.0 + 1.0 / ((i + 2) * (j + 2)) as f64 + 1e-7).unwrap();
        let text = m.to_text();
        assert!(text.starts_with("3\n"));
        let back = SymMatrix::parse(&text).unwrap();
        assert_eq!(back.as_slice(), m.as_slice());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(SymMatrix::parse(""), Err(Error::Parse(_))));
        assert!(matches!(SymMatrix::parse("2\n1 0\n"), Err(Error::Parse(_))));
        assert!(matches!(SymMatrix::parse("2\n1 0\n0\n"), Err(Error::Parse(_))));
        assert!(matches!(SymMatrix::parse("2\n1 x\n0 1\n"), Err(Error::Parse(_))));
        assert!(matches!(SymMatrix::parse("1\n1\n2\n"), Err(Error::Parse(_))));
        assert!(matches!(SymMatrix::parse("2\n1 0\n2 1\n"), Err(Error::Asymmetric { .. })));
    }

    fn positive_matrix(n: usize) -> impl Strategy<Value = SymMatrix> {
        proptest::collection::vec(0.05f64..5.0, n * n)
            .prop_map(move |v| SymMatrix::from_upper_fn(n, |i, j| v[i * n + j]).unwrap())
    }

    proptest! {
        #[test]
        fn power_is_additive_in_the_exponent(m in positive_matrix(4), x in 0.0f64..4.0, y in 0.0f64..4.0) {
            let lhs = m.hadamard_power(a(x + y)).unwrap();
            let rhs = m.hadamard_power(a(x)).unwrap().hadamard_product(&m.hadamard_power(a(y)).unwrap()).unwrap();
            for (u, v) in lhs.as_slice().iter().zip(rhs.as_slice()) {
                prop_assert!((u - v).abs() <= 1e-12 * u.abs());
            }
        }

        #[test]
        fn power_composes_multiplicatively(m in positive_matrix(3), x in 0.0f64..3.0, y in 0.0f64..3.0) {
            let lhs = m.hadamard_power(a(x)).unwrap().hadamard_power(a(y)).unwrap();
            let rhs = m.hadamard_power(a(x * y)).unwrap();
            for (u, v) in lhs.as_slice().iter().zip(rhs.as_slice()) {
                prop_assert!((u - v).abs() <= 1e-12 * v.abs().max(f64::MIN_POSITIVE));
            }
        }

        #[test]
        fn abs_power_matches_power_of_abs(v in proptest::collection::vec(-3.0f64..3.0, 9), x in 0.0f64..5.0) {
            let m = SymMatrix::from_upper_fn(3, |i, j| v[i * 3 + j]).unwrap();
            let abs = SymMatrix::from_upper_fn(3, |i, j| m.get(i, j).abs()).unwrap();
            prop_assert_eq!(m.abs_power(a(x)), abs.hadamard_power(a(x)).unwrap());
        }

        #[test]
        fn nested_restriction_is_consistent(m in positive_matrix(5)) {
            let outer = m.principal_submatrix(&[0, 2, 3, 4]).unwrap();
            // positions 1 and 3 inside `outer` are original rows 2 and 4
            let nested = outer.principal_submatrix(&[1, 3]).unwrap();
            prop_assert_eq!(nested, m.principal_submatrix(&[2, 4]).unwrap());
            prop_assert_eq!(outer.principal_submatrix(&[0, 1, 2, 3]).unwrap(), outer);
        }
    }
}
