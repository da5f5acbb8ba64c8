//! Principal minors of `A^∘α` as exponential polynomials `Σ c_k e^{μ_k α}`.
//!
//! Every permutation `σ` of an `m × m` block contributes `sign(σ) e^{α Σ log a_{iσ(i)}}`,
//! so the minor has at most `m!` terms and, by the generalized Descartes
//! rule, at most as many real zeros as its coefficient sequence has sign
//! changes.

use astro_float::{BigFloat, Consts, RoundingMode};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::oracle::big_to_f64;

/// Largest block [`expand_minor`] accepts; `7! = 5040` terms.
pub const MAX_ORDER: usize = 7;
/// Rates closer than this (relative, floored at 1) are merged.
pub const MERGE_TOL: f64 = 1e-12;
/// Working bits for rates and for [`ExpPoly::eval`]'s cancellation fallback.
const PREC: usize = 192;
const RM: RoundingMode = RoundingMode::ToEven;
/// [`ExpPoly::eval`] trusts the binary64 sum when its error bound is below this fraction.
const FAST_PATH_REL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpPoly {
    /// `(rate, coefficient)`, strictly ascending in rate, no zero coefficients.
    terms: Vec<(f64, f64)>,
    /// Low-order parts of the rates, `rate = terms[k].0 + rate_lo[k]`; empty means zero.
    #[serde(skip)]
    rate_lo: Vec<f64>,
}

impl ExpPoly {
    /// Sorts, merges near-equal rates and drops cancelled terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (f64, f64)>) -> ExpPoly {
        ExpPoly::from_parts(terms.into_iter().map(|(rate, c)| (rate, 0.0, c)))
    }

    /// As [`ExpPoly::from_terms`] with rates split into `hi + lo`.
    fn from_parts(terms: impl IntoIterator<Item = (f64, f64, f64)>) -> ExpPoly {
        let mut raw: Vec<(f64, f64, f64)> = terms.into_iter().filter(|t| t.2 != 0.0).collect();
        raw.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut merged: Vec<(f64, f64, f64)> = Vec::with_capacity(raw.len());
        for (hi, lo, c) in raw {
            match merged.last_mut() {
                Some(last) if hi - last.0 <= MERGE_TOL * last.0.abs().max(1.0) => last.2 += c,
                _ => merged.push((hi, lo, c)),
            }
        }
        merged.retain(|t| t.2 != 0.0);
        ExpPoly { terms: merged.iter().map(|t| (t.0, t.2)).collect(), rate_lo: merged.iter().map(|t| t.1).collect() }
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn rate_lo(&self, k: usize) -> f64 {
        self.rate_lo.get(k).copied().unwrap_or(0.0)
    }

    /// Binary64 value and a bound on its error.
    ///
    /// Terms are summed largest magnitude first with Neumaier compensation;
    /// each rounded term contributes about `u (2 + |μα|)` of its size.
    fn eval_fast(&self, alpha: f64) -> (f64, f64) {
        let mut parts: Vec<f64> = self.terms.iter().map(|&(mu, c)| c * (mu * alpha).exp()).collect();
        let size: f64 = parts.iter().map(|v| v.abs()).sum();
        let spread = self.terms.iter().map(|t| (t.0 * alpha).abs()).fold(0.0, f64::max);
        parts.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for v in parts {
            let t = sum + v;
            comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
            sum = t;
        }
        let u = f64::EPSILON / 2.0;
        (sum + comp, 2.0 * u * (2.0 + spread) * size)
    }

    /// `Σ c_k e^{μ_k α}`.
    ///
    /// Compensated binary64 summation, redone at 192 bits when cancellation
    /// leaves fewer than about 12 trustworthy digits.
    pub fn eval(&self, alpha: f64) -> f64 {
        let (v, err) = self.eval_fast(alpha);
        if err <= FAST_PATH_REL * v.abs() {
            return v;
        }
        let mut cc = Consts::new().expect("constants cache");
        let a = BigFloat::from_f64(alpha, PREC);
        let mut sum = BigFloat::from_u8(0, PREC);
        for (k, &(hi, c)) in self.terms.iter().enumerate() {
            let rate = BigFloat::from_f64(hi, PREC).add(&BigFloat::from_f64(self.rate_lo(k), PREC), PREC, RM);
            let term = rate.mul(&a, PREC, RM).exp(PREC, RM, &mut cc).mul(&BigFloat::from_f64(c, PREC), PREC, RM);
            sum = sum.add(&term, PREC, RM);
        }
        big_to_f64(&sum)
    }

    /// `Σ |c_k| e^{μ_k α}`, the size rounding errors in a binary64 sum scale with.
    pub fn magnitude(&self, alpha: f64) -> f64 {
        self.terms.iter().map(|&(mu, c)| c.abs() * (mu * alpha).exp()).sum()
    }

    /// Strict sign alternations of the coefficients in rate order.
    pub fn sign_changes(&self) -> usize {
        self.terms.windows(2).filter(|w| (w[0].1 > 0.0) != (w[1].1 > 0.0)).count()
    }

    /// Upper bound on the number of real zeros (with multiplicity).
    pub fn zero_count_bound(&self) -> usize {
        self.sign_changes()
    }

    /// Zeros seen by sampling on `[lo, hi]` at `step`.
    ///
    /// Samples whose binary64 value is within its error bound carry no sign;
    /// a run of them counts as one zero, as does a direct sign flip between
    /// neighbouring samples.
    pub fn grid_zero_count(&self, lo: f64, hi: f64, step: f64) -> usize {
        let count = ((hi - lo) / step).round() as usize;
        let mut zeros = 0;
        let mut prev: Option<bool> = None;
        let mut in_run = false;
        for i in 0..=count {
            let (v, err) = self.eval_fast(lo + step * i as f64);
            if v.abs() <= err {
                if !in_run {
                    zeros += 1;
                    in_run = true;
                }
                prev = None;
                continue;
            }
            let positive = v > 0.0;
            if prev.is_some_and(|p| p != positive) {
                zeros += 1;
            }
            prev = Some(positive);
            in_run = false;
        }
        zeros
    }
}

/// Leibniz expansion of `det(A[I,I]^∘α)` over all `m!` permutations.
pub fn expand_minor(a: &SymMatrix, indices: &[usize]) -> Result<ExpPoly> {
    let block = checked_block(a, indices)?;
    let m = block.order();
    for i in 0..m {
        for j in i..m {
            if block.get(i, j) <= 0.0 {
                let (i, j) = (indices[i], indices[j]);
                return Err(Error::ZeroEntry { i, j });
            }
        }
    }
    Ok(leibniz(&block))
}

/// Like [`expand_minor`] but admits zero entries; only valid for `α > 0`.
///
/// Permutations through a zero entry vanish for every positive α and are
/// dropped, so a diagonal block expands to its single identity term.
/// At `α = 0` the true minor (`0^0 = 1`) is generally different.
pub fn expand_minor_positive_alpha(a: &SymMatrix, indices: &[usize]) -> Result<ExpPoly> {
    let block = checked_block(a, indices)?;
    let m = block.order();
    for i in 0..m {
        for j in i..m {
            if block.get(i, j) < 0.0 {
                let (i, j) = (indices[i], indices[j]);
                return Err(Error::NegativeEntry { i, j, value: block.get(i, j) });
            }
        }
    }
    Ok(leibniz(&block))
}

fn checked_block(a: &SymMatrix, indices: &[usize]) -> Result<SymMatrix> {
    if indices.len() > MAX_ORDER {
        return Err(Error::OrderTooLarge(indices.len()));
    }
    a.principal_submatrix(indices)
}

/// Rates are summed from 192-bit logarithms and stored as `hi + lo`, so
/// σ and σ⁻¹ (equal rates for a symmetric block) merge exactly and `eval`
/// can resolve heavy cancellation.
fn leibniz(block: &SymMatrix) -> ExpPoly {
    let m = block.order();
    let mut cc = Consts::new().expect("constants cache");
    let logs: Vec<Option<BigFloat>> = block
        .as_slice()
        .iter()
        .map(|&v| (v > 0.0).then(|| BigFloat::from_f64(v, PREC).ln(PREC, RM, &mut cc)))
        .collect();
    let mut terms = Vec::new();
    let mut perm: Vec<usize> = (0..m).collect();
    permute(&mut perm, 0, 1.0, &mut |p, sign| {
        let mut rate = BigFloat::from_u8(0, PREC);
        for (i, &j) in p.iter().enumerate() {
            match &logs[i * m + j] {
                Some(l) => rate = rate.add(l, PREC, RM),
                None => return,
            }
        }
        let hi = big_to_f64(&rate);
        let lo = big_to_f64(&rate.sub(&BigFloat::from_f64(hi, PREC), PREC, RM));
        terms.push((hi, lo, sign));
    });
    ExpPoly::from_parts(terms)
}

/// Visits every permutation of `p[k..]` with its sign relative to the input.
fn permute(p: &mut [usize], k: usize, sign: f64, visit: &mut impl FnMut(&[usize], f64)) {
    if k == p.len() {
        visit(p, sign);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, if i == k { sign } else { -sign }, visit);
        p.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_poly_gram, default_x, random_psd_nonneg};
    use crate::matrix::Alpha;
    use crate::spectra::determinant;

    #[test]
    fn two_by_two_terms() {
        let (a, b, c) = (3.0f64, 2.0f64, 5.0f64);
        let m = SymMatrix::new(2, vec![a, b, b, c]).unwrap();
        let p = expand_minor(&m, &[0, 1]).unwrap();
        assert_eq!(p.len(), 2);
        let t = p.terms();
        assert!((t[0].0 - (b * b).ln()).abs() < 1e-15 && t[0].1 == -1.0);
        assert!((t[1].0 - (a * c).ln()).abs() < 1e-15 && t[1].1 == 1.0);
        assert_eq!(p.sign_changes(), 1);
    }

    #[test]
    fn a2_minor_vanishes_only_at_zero() {
        let x: Vec<f64> = default_x(2).iter().map(|p| p.value()).collect();
        let a2 = build_poly_gram(&x).unwrap();
        let p = expand_minor(&a2, &[0, 1]).unwrap();
        assert_eq!((p.len(), p.zero_count_bound()), (2, 1));
        assert_eq!(p.eval(0.0), 0.0);
        let (t0, t1) = (p.terms()[0], p.terms()[1]);
        // c₁e^{μ₁α} = -c₂e^{μ₂α}  ⇒  α = ln|c₁/c₂| / (μ₂ - μ₁) = 0
        assert_eq!((t0.1 / t1.1).abs().ln() / (t1.0 - t0.0), 0.0);
        assert_eq!(p.grid_zero_count(0.0, 10.0, 1e-3), 1);
    }

    #[test]
    fn diagonal_block() {
        let d = SymMatrix::new(2, vec![2.0, 0.0, 0.0, 3.0]).unwrap();
        assert!(matches!(expand_minor(&d, &[0, 1]), Err(Error::ZeroEntry { i: 0, j: 1 })));
        let p = expand_minor_positive_alpha(&d, &[0, 1]).unwrap();
        assert_eq!(p.terms(), &[(6f64.ln(), 1.0)]);
        assert_eq!(p.zero_count_bound(), 0);
        assert!((p.eval(2.0) - 36.0).abs() < 1e-12);
    }

    #[test]
    fn sign_change_counts() {
        assert_eq!(ExpPoly::from_terms([(0.0, 1.0)]).sign_changes(), 0);
        assert_eq!(ExpPoly::from_terms([(2.0, 1.0), (1.0, -1.0)]).sign_changes(), 1);
        assert_eq!(ExpPoly::from_terms([(0.0, 1.0), (1.0, -2.0), (2.0, 1.0)]).sign_changes(), 2);
    }

    #[test]
    fn merge_and_cancel() {
        let p = ExpPoly::from_terms([(1.0, 1.0), (1.0 + 1e-14, 1.0), (2.0, 1.0), (2.0, -1.0)]);
        assert_eq!(p.terms(), &[(1.0, 2.0)]);
        assert!(ExpPoly::from_terms([(0.5, 0.0)]).is_empty());
    }

    #[test]
    fn eval_basics() {
        let p = ExpPoly::from_terms([(0.3, 2.0), (-1.0, -0.5), (1.7, 1.25)]);
        assert!((p.eval(0.0) - 2.75).abs() < 1e-15);
        let single = ExpPoly::from_terms([(0.7, -3.0)]);
        assert!((single.eval(2.0) + 3.0 * 1.4f64.exp()).abs() < 1e-13);
    }

    #[test]
    fn agrees_with_ldl_on_a4() {
        let x: Vec<f64> = default_x(4).iter().map(|p| p.value()).collect();
        let a4 = build_poly_gram(&x).unwrap();
        for idx in [vec![0, 1], vec![0, 2, 3], vec![0, 1, 2, 3]] {
            let p = expand_minor(&a4, &idx).unwrap();
            assert!(p.sign_changes() < (1..=idx.len()).product::<usize>());
            for alpha in [0.5, 1.5, 2.5] {
                let sub = a4.principal_submatrix(&idx).unwrap();
                let det = determinant(&sub.hadamard_power(Alpha::new(alpha).unwrap()).unwrap());
                let e = p.eval(alpha);
                // the full block is singular at α = 1 and nearly so elsewhere;
                // there the binary64 LDL reference is only good normwise
                let tol = if idx.len() < 4 { 1e-10 * det.abs() } else { 1e-14 * p.magnitude(alpha) };
                assert!((e - det).abs() <= tol, "{idx:?} {alpha}: {e} vs {det}");
            }
        }
    }

    #[test]
    fn order_guard() {
        let m = random_psd_nonneg(8, 1).unwrap();
        assert!(matches!(expand_minor(&m, &[0, 1, 2, 3, 4, 5, 6, 7]), Err(Error::OrderTooLarge(8))));
        assert!(expand_minor(&m, &[0, 1, 2, 3, 4, 5, 6]).is_ok());
    }
}
