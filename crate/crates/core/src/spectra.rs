//! Eigenvalues, determinants and PSD classification for small dense
//! symmetric matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::oracle::{HpSign, HpVerdict, PromotedMatrix, DEFAULT_DIGITS};

const JACOBI_MAX_SWEEPS: usize = 30;
const JACOBI_RELATIVE_RESIDUAL: f64 = 1e-14;
/// Growth bound for Bunch–Parlett complete pivoting, `(1 + √17) / 8`.
const BUNCH_PARLETT_ALPHA: f64 = 0.640_388_203_202_208_4;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub sweeps_used: usize,
    /// Off-diagonal Frobenius norm left after the last sweep.
    pub off_diagonal_residual: f64,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// All eigenvalues by cyclic-by-row Jacobi rotations.
///
/// Stops once the off-diagonal Frobenius norm drops to `1e-14 · ‖A‖_F`.
pub fn eigenvalues(m: &SymMatrix) -> Result<Spectrum> {
    let n = m.order();
    let mut a = m.as_slice().to_vec();
    let threshold = JACOBI_RELATIVE_RESIDUAL * m.frobenius_norm();
    let off_norm = |a: &[f64]| {
        let mut s = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                s += 2.0 * a[p * n + q] * a[p * n + q];
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    let mut residual = off_norm(&a);
    while residual > threshold {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, residual });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                let tau = s / (1.0 + c);
                a[p * n + p] -= t * apq;
                a[q * n + q] += t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let g = a[r * n + p];
                    let h = a[r * n + q];
                    let gp = g - s * (h + g * tau);
                    let hq = h + s * (g - h * tau);
                    a[r * n + p] = gp;
                    a[p * n + r] = gp;
                    a[r * n + q] = hq;
                    a[q * n + r] = hq;
                }
            }
        }
        residual = off_norm(&a);
    }

    let mut eigenvalues: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eigenvalues.sort_by(f64::total_cmp);
    Ok(Spectrum { eigenvalues, sweeps_used: sweeps, off_diagonal_residual: residual })
}

pub fn min_eigenvalue(m: &SymMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?.min())
}

/// Arithmetic needed by the pivoted LDLᵀ factorization, so one routine serves
/// binary64 and the extended-precision referee.
pub trait LdlScalar: Clone {
    fn zero_like(&self) -> Self;
    fn from_f64_like(&self, v: f64) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Self;
    fn abs(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn gt(&self, rhs: &Self) -> bool;
}

impl LdlScalar for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn from_f64_like(&self, v: f64) -> Self {
        v
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
    fn gt(&self, rhs: &Self) -> bool {
        self > rhs
    }
}

/// Determinant and inertia from a symmetric-pivoted LDLᵀ factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct LdlSummary<T> {
    pub determinant: T,
    pub positive: usize,
    pub zero: usize,
    pub negative: usize,
}

/// Bunch–Parlett LDLᵀ with 1×1 and 2×2 pivots on a row-major `n × n` matrix.
///
/// Symmetric permutations leave the determinant unchanged, so the pivot
/// determinants multiply directly. A remaining block that is exactly zero
/// contributes zero eigenvalues.
pub fn ldl_factor<T: LdlScalar>(n: usize, mut a: Vec<T>) -> LdlSummary<T> {
    assert_eq!(a.len(), n * n, "ldl_factor: shape mismatch");
    assert!(n > 0, "ldl_factor: empty matrix");
    let zero = a[0].zero_like();
    let one = a[0].from_f64_like(1.0);
    let growth = a[0].from_f64_like(BUNCH_PARLETT_ALPHA);
    let mut det = one;
    let (mut pos, mut neg) = (0, 0);
    let mut active: Vec<usize> = (0..n).collect();

    while !active.is_empty() {
        let mut diag_best: Option<(usize, T)> = None;
        let mut off_best: Option<(usize, usize, T)> = None;
        for (ai, &i) in active.iter().enumerate() {
            let d = a[i * n + i].abs();
            if diag_best.as_ref().is_none_or(|(_, b)| d.gt(b)) {
                diag_best = Some((ai, d));
            }
            for (aj, &j) in active.iter().enumerate().skip(ai + 1) {
                let o = a[i * n + j].abs();
                if off_best.as_ref().is_none_or(|(_, _, b)| o.gt(b)) {
                    off_best = Some((ai, aj, o));
                }
            }
        }
        let (di, dmax) = diag_best.expect("active set is non-empty");
        let omax = off_best.as_ref().map_or_else(|| zero.clone(), |(_, _, o)| o.clone());

        if dmax.is_zero() && omax.is_zero() {
            // the rest of the matrix vanished: remaining eigenvalues are zero
            return LdlSummary { determinant: zero, positive: pos, zero: active.len(), negative: neg };
        }

        if !growth.mul(&omax).gt(&dmax) {
            let p = active.remove(di);
            let d = a[p * n + p].clone();
            if d.is_negative() {
                neg += 1;
            } else {
                pos += 1;
            }
            det = det.mul(&d);
            for &i in &active {
                let lip = a[i * n + p].div(&d);
                for &j in &active {
                    let v = a[i * n + j].sub(&lip.mul(&a[p * n + j]));
                    a[i * n + j] = v;
                }
            }
        } else {
            let (ri, si, _) = off_best.expect("off-diagonal pivot exists");
            let r = active[ri];
            let s = active[si];
            active.retain(|&k| k != r && k != s);
            let (e11, e12, e22) = (a[r * n + r].clone(), a[r * n + s].clone(), a[s * n + s].clone());
            let e_det = e11.mul(&e22).sub(&e12.mul(&e12));
            // |e12| dominates both diagonal entries, so e_det < 0: one eigenvalue of each sign
            pos += 1;
            neg += 1;
            det = det.mul(&e_det);
            for &i in &active {
                let (cir, cis) = (a[i * n + r].clone(), a[i * n + s].clone());
                // row i of C·E⁻¹
                let w1 = cir.mul(&e22).sub(&cis.mul(&e12)).div(&e_det);
                let w2 = cis.mul(&e11).sub(&cir.mul(&e12)).div(&e_det);
                for &j in &active {
                    let v = a[i * n + j].sub(&w1.mul(&a[r * n + j]).add(&w2.mul(&a[s * n + j])));
                    a[i * n + j] = v;
                }
            }
        }
    }
    LdlSummary { determinant: det, positive: pos, zero: 0, negative: neg }
}

/// Determinant via pivoted LDLᵀ.
pub fn determinant(m: &SymMatrix) -> f64 {
    ldl_factor(m.order(), m.as_slice().to_vec()).determinant
}

/// Determinants of the top-left `m × m` blocks, `m = 1..=n`.
pub fn leading_principal_minors(m: &SymMatrix) -> Vec<f64> {
    (1..=m.order())
        .map(|k| determinant(&m.leading_block(k).expect("block within bounds")))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PsdClass {
    Psd,
    NotPsd,
    /// λ_min indistinguishable from zero even at extended precision.
    Boundary,
}

impl PsdClass {
    /// PSD and BOUNDARY both count as members of the exponent set.
    pub fn is_member(self) -> bool {
        !matches!(self, PsdClass::NotPsd)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PsdClass::Psd => "PSD",
            PsdClass::NotPsd => "NOT_PSD",
            PsdClass::Boundary => "BOUNDARY",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Precision {
    Working,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdVerdict {
    pub class: PsdClass,
    pub lambda_min_estimate: f64,
    pub tolerance_used: f64,
    pub precision: Precision,
}

/// Source of an extended-precision opinion about λ_min, consulted only when
/// binary64 cannot decide.
pub trait Referee {
    fn min_eigenvalue(&self) -> Result<HpVerdict>;
}

/// Referee that refuses to run.
pub struct NoReferee;

impl Referee for NoReferee {
    fn min_eigenvalue(&self) -> Result<HpVerdict> {
        Err(Error::OracleUnavailable)
    }
}

/// `1024 · u · n · max_abs_entry`, the band in which binary64 does not decide.
pub fn working_tolerance(m: &SymMatrix) -> f64 {
    1024.0 * (f64::EPSILON / 2.0) * m.order() as f64 * m.max_abs_entry()
}

/// Classifies `m` using its own binary64 entries for any escalation.
pub fn classify_psd(m: &SymMatrix) -> Result<PsdVerdict> {
    classify_psd_with(m, &PromotedMatrix::new(m, DEFAULT_DIGITS))
}

/// Classifies `m`, escalating to `referee` inside the working tolerance band.
pub fn classify_psd_with(m: &SymMatrix, referee: &dyn Referee) -> Result<PsdVerdict> {
    let lambda = min_eigenvalue(m)?;
    let tol = working_tolerance(m);
    if lambda < -tol {
        return Ok(PsdVerdict { class: PsdClass::NotPsd, lambda_min_estimate: lambda, tolerance_used: tol, precision: Precision::Working });
    }
    if lambda > tol {
        return Ok(PsdVerdict { class: PsdClass::Psd, lambda_min_estimate: lambda, tolerance_used: tol, precision: Precision::Working });
    }
    let hp = referee.min_eigenvalue()?;
    let class = match hp.sign {
        HpSign::Positive => PsdClass::Psd,
        HpSign::Negative => PsdClass::NotPsd,
        HpSign::ZeroBand => PsdClass::Boundary,
    };
    Ok(PsdVerdict { class, lambda_min_estimate: hp.value_estimate, tolerance_used: hp.threshold, precision: Precision::Extended })
}
