//! Extended-precision referee for signs binary64 cannot settle.
//!
//! Matrices are regenerated from the family formulas at the requested
//! precision (rational `x_i` and decimal `ε` stay exact, `π` is computed to
//! full precision), so a verdict concerns the intended matrix rather than its
//! binary64 rounding. Signs come from inertia counts of shifted pivoted LDLᵀ
//! factorizations; no extended-precision eigensolver is needed.
//!
//! A sign is certified only when the value clears `10^-(digits-10)` times the
//! problem scale, i.e. `1e-40 · scale` at the default 50 digits.

use std::cmp::Ordering;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign, Word};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{FamilyKind, FamilySpec, Param};
use crate::matrix::{Alpha, SymMatrix};
use crate::spectra::{ldl_factor, LdlScalar, Referee};

pub const DEFAULT_DIGITS: usize = 50;
pub const MIN_DIGITS: usize = 50;
/// Decimal digits reserved between the working precision and the zero band.
const GUARD_DIGITS: usize = 10;
/// Ceiling for the automatic escalation in [`refine_root`].
const MAX_DIGITS: usize = 800;
const ESTIMATE_STEPS: usize = 20;
const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HpSign {
    Positive,
    Negative,
    ZeroBand,
}

impl HpSign {
    pub fn as_str(self) -> &'static str {
        match self {
            HpSign::Positive => "POSITIVE",
            HpSign::Negative => "NEGATIVE",
            HpSign::ZeroBand => "ZERO_BAND",
        }
    }

    /// `+1`, `-1` or `0`.
    pub fn signum(self) -> i8 {
        match self {
            HpSign::Positive => 1,
            HpSign::Negative => -1,
            HpSign::ZeroBand => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HpVerdict {
    pub sign: HpSign,
    /// Rounded to binary64; for λ_min a bisection estimate good to ~1e-5 relative.
    pub value_estimate: f64,
    pub digits_used: usize,
    /// Half-width of the zero band, `10^-(digits-10) · scale`.
    pub threshold: f64,
}

/// Which quantity [`refine_root`] bisects on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootTarget {
    Determinant,
    MinEigenvalue,
}

/// An extended-precision bracket around a sign change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootBracket {
    /// Lower end, rounded down to 32 significant digits.
    pub lo: String,
    /// Upper end, rounded up to 32 significant digits.
    pub hi: String,
    pub width: f64,
    pub sign_lo: HpSign,
    pub sign_hi: HpSign,
    /// Largest precision the bisection had to escalate to.
    pub digits_used: usize,
}

impl RootBracket {
    pub fn lo_f64(&self) -> f64 {
        self.lo.parse().expect("decimal string")
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.parse().expect("decimal string")
    }
}

fn bits_for(digits: usize) -> usize {
    let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64;
    bits.div_ceil(64) * 64
}

/// Binary precision plus its constants cache; one per call keeps the referee reentrant.
struct Ctx {
    p: usize,
    digits: usize,
    cc: Consts,
}

impl Ctx {
    fn new(digits: usize) -> Result<Ctx> {
        if digits < MIN_DIGITS {
            return Err(Error::TooFewDigits(digits));
        }
        let cc = Consts::new().map_err(|_| Error::OracleUnavailable)?;
        Ok(Ctx { p: bits_for(digits), digits, cc })
    }

    fn hp(&self, v: BigFloat) -> Hp {
        Hp { v, p: self.p }
    }

    fn f64(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, self.p)
    }

    fn parse(&mut self, text: &str) -> Result<BigFloat> {
        let v = BigFloat::parse(text, Radix::Dec, self.p, RM, &mut self.cc);
        if v.is_nan() || v.is_inf() {
            return Err(Error::BadNumber(text.into()));
        }
        Ok(v)
    }

    /// Exact rational or decimal value of a parameter.
    fn param(&mut self, param: &Param) -> Result<BigFloat> {
        match param.text().split_once('/') {
            Some((num, den)) => {
                let num = self.parse(num)?;
                let den = self.parse(den)?;
                Ok(num.div(&den, self.p, RM))
            }
            None => self.parse(param.text()),
        }
    }

    fn ten_pow_neg(&mut self, e: usize) -> BigFloat {
        self.parse(&format!("1e-{e}")).expect("valid literal")
    }

    /// Certification threshold for a quantity of size `scale`.
    fn threshold(&mut self, scale: &BigFloat) -> BigFloat {
        let band = self.ten_pow_neg(self.digits - GUARD_DIGITS);
        band.mul(scale, self.p, RM)
    }

    fn power(&mut self, a: &BigFloat, alpha: &BigFloat) -> BigFloat {
        if alpha.is_zero() {
            BigFloat::from_u8(1, self.p)
        } else if a.is_zero() {
            BigFloat::from_u8(0, self.p)
        } else {
            let ln = a.ln(self.p, RM, &mut self.cc);
            ln.mul(alpha, self.p, RM).exp(self.p, RM, &mut self.cc)
        }
    }
}

/// Nearest binary64 (to within one ulp; the top two mantissa words are used).
pub(crate) fn big_to_f64(v: &BigFloat) -> f64 {
    if v.is_nan() {
        return f64::NAN;
    }
    if v.is_inf() {
        return if v.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    let Some((m, _, sign, e, _)) = v.as_raw_parts() else { return f64::NAN };
    if v.is_zero() || m.is_empty() {
        return 0.0;
    }
    let bits = Word::BITS as i32;
    let top = m[m.len() - 1] as f64;
    let next = if m.len() > 1 { m[m.len() - 2] as f64 } else { 0.0 };
    // value = 0.m × 2^e with the mantissa's leading bit set
    let mant = top + next * 2f64.powi(-bits);
    let shift = e - bits;
    let half = shift / 2;
    let mag = mant * 2f64.powi(half) * 2f64.powi(shift - half);
    if sign == Sign::Neg {
        -mag
    } else {
        mag
    }
}

#[derive(Clone)]
struct Hp {
    v: BigFloat,
    p: usize,
}

impl LdlScalar for Hp {
    fn zero_like(&self) -> Self {
        Hp { v: BigFloat::from_u8(0, self.p), p: self.p }
    }
    fn from_f64_like(&self, v: f64) -> Self {
        Hp { v: BigFloat::from_f64(v, self.p), p: self.p }
    }
    fn add(&self, rhs: &Self) -> Self {
        Hp { v: self.v.add(&rhs.v, self.p, RM), p: self.p }
    }
    fn sub(&self, rhs: &Self) -> Self {
        Hp { v: self.v.sub(&rhs.v, self.p, RM), p: self.p }
    }
    fn mul(&self, rhs: &Self) -> Self {
        Hp { v: self.v.mul(&rhs.v, self.p, RM), p: self.p }
    }
    fn div(&self, rhs: &Self) -> Self {
        Hp { v: self.v.div(&rhs.v, self.p, RM), p: self.p }
    }
    fn abs(&self) -> Self {
        Hp { v: self.v.abs(), p: self.p }
    }
    fn is_zero(&self) -> bool {
        self.v.is_zero()
    }
    fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }
    fn gt(&self, rhs: &Self) -> bool {
        self.v.partial_cmp(&rhs.v) == Some(Ordering::Greater)
    }
}

/// Symmetric matrix at extended precision.
struct HpMatrix {
    n: usize,
    a: Vec<BigFloat>,
    /// `max |a_ij|`
    scale: BigFloat,
}

impl HpMatrix {
    fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> Result<BigFloat>) -> Result<HpMatrix> {
        let mut a = vec![BigFloat::from_u8(0, 64); n * n];
        let mut scale = BigFloat::from_u8(0, 64);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j)?;
                if v.abs().partial_cmp(&scale) == Some(Ordering::Greater) {
                    scale = v.abs();
                }
                a[i * n + j] = v.clone();
                a[j * n + i] = v;
            }
        }
        Ok(HpMatrix { n, a, scale })
    }

    /// Inertia of `self + shift·I`.
    fn shifted_inertia(&self, ctx: &Ctx, shift: &BigFloat) -> (usize, usize, usize) {
        let n = self.n;
        let entries = self
            .a
            .iter()
            .enumerate()
            .map(|(idx, v)| {
                if idx / n == idx % n {
                    ctx.hp(v.add(shift, ctx.p, RM))
                } else {
                    ctx.hp(v.clone())
                }
            })
            .collect();
        let s = ldl_factor(n, entries);
        (s.positive, s.zero, s.negative)
    }

    fn determinant(&self, ctx: &Ctx) -> BigFloat {
        let entries = self.a.iter().map(|v| ctx.hp(v.clone())).collect();
        ldl_factor(self.n, entries).determinant.v
    }
}

/// Entries of the base family matrix (before powering) at extended precision.
fn family_entries(spec: &FamilySpec, ctx: &mut Ctx) -> Result<HpMatrix> {
    spec.validate()?;
    let n = spec.n;
    match spec.kind {
        FamilyKind::PolyGram | FamilyKind::PerturbedPolyGram => {
            let x = spec.x.iter().map(|p| ctx.param(p)).collect::<Result<Vec<_>>>()?;
            let (k, eps) = match (spec.kind, &spec.eps) {
                (FamilyKind::PerturbedPolyGram, Some(e)) => (spec.k.unwrap_or(0), ctx.param(e)?),
                _ => (0, BigFloat::from_u8(0, ctx.p)),
            };
            let p = ctx.p;
            let one = BigFloat::from_u8(1, p);
            HpMatrix::from_upper(n, |i, j| {
                let v = one.add(&x[i].mul(&x[j], p, RM), p, RM);
                Ok(if i == j && i >= n - k { v.add(&eps, p, RM) } else { v })
            })
        }
        FamilyKind::CosToeplitz | FamilyKind::PerturbedCosToeplitz => {
            let eps = match &spec.eps {
                Some(e) if spec.kind == FamilyKind::PerturbedCosToeplitz => ctx.param(e)?,
                _ => BigFloat::from_u8(0, ctx.p),
            };
            let p = ctx.p;
            let pi = ctx.cc.pi(p, RM);
            let nn = BigFloat::from_u64(n as u64, p);
            let mut by_offset = Vec::with_capacity(n);
            for d in 0..n {
                let c = if 2 * d == n {
                    BigFloat::from_u8(0, p)
                } else {
                    let dd = if 2 * d > n { n - d } else { d };
                    let angle = BigFloat::from_u64(dd as u64, p).mul(&pi, p, RM).div(&nn, p, RM);
                    let c = angle.cos(p, RM, &mut ctx.cc);
                    if 2 * d > n {
                        c.neg()
                    } else {
                        c
                    }
                };
                by_offset.push(c);
            }
            HpMatrix::from_upper(n, |i, j| {
                let v = by_offset[j - i].clone();
                Ok(if i == j { v.add(&eps, p, RM) } else { v })
            })
        }
        FamilyKind::File => Err(Error::UnsupportedFamily("FILE")),
    }
}

fn power_matrix(spec: &FamilySpec, use_abs: bool, alpha: &BigFloat, ctx: &mut Ctx) -> Result<HpMatrix> {
    let base = family_entries(spec, ctx)?;
    let n = base.n;
    HpMatrix::from_upper(n, |i, j| {
        let a = &base.a[i * n + j];
        if a.is_negative() && !a.is_zero() && !use_abs {
            let value = big_to_f64(a);
            return Err(Error::NegativeEntry { i, j, value });
        }
        Ok(ctx.power(&a.abs(), alpha))
    })
}

fn promoted(m: &SymMatrix, ctx: &Ctx) -> HpMatrix {
    let n = m.order();
    let a: Vec<BigFloat> = m.as_slice().iter().map(|&v| ctx.f64(v)).collect();
    HpMatrix { n, a, scale: ctx.f64(m.max_abs_entry()) }
}

/// Sign and estimate of λ_min from shifted inertia counts.
fn min_eigenvalue_verdict(m: &HpMatrix, ctx: &mut Ctx) -> HpVerdict {
    let t = ctx.threshold(&m.scale);
    let threshold = big_to_f64(&t);
    let p = ctx.p;
    // Gershgorin: |λ| ≤ n·max|a_ij|
    let radius = BigFloat::from_u64(m.n as u64, p).mul(&m.scale, p, RM).add(&t, p, RM);

    let below = |ctx: &Ctx, s: &BigFloat| m.shifted_inertia(ctx, s).2 > 0;
    let (sign, pred): (HpSign, Box<dyn Fn(&Ctx, &BigFloat) -> bool>) = if below(ctx, &t) {
        // λ_min < -s  ⇔  M + sI has a negative eigenvalue
        (HpSign::Negative, Box::new(move |ctx, s| m.shifted_inertia(ctx, s).2 > 0))
    } else {
        let above = |ctx: &Ctx, s: &BigFloat| {
            let (_, z, neg) = m.shifted_inertia(ctx, &s.neg());
            z == 0 && neg == 0
        };
        if above(ctx, &t) {
            (HpSign::Positive, Box::new(above))
        } else {
            return HpVerdict { sign: HpSign::ZeroBand, value_estimate: 0.0, digits_used: ctx.digits, threshold };
        }
    };

    // geometric bisection on |λ_min| ∈ (t, radius)
    let (mut lo, mut hi) = (t, radius);
    for _ in 0..ESTIMATE_STEPS {
        let mid = lo.mul(&hi, p, RM).sqrt(p, RM);
        if pred(ctx, &mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let magnitude = lo.mul(&hi, p, RM).sqrt(p, RM);
    let mag = big_to_f64(&magnitude);
    let value_estimate = if sign == HpSign::Negative { -mag } else { mag };
    HpVerdict { sign, value_estimate, digits_used: ctx.digits, threshold }
}

fn det_verdict(m: &HpMatrix, ctx: &mut Ctx) -> HpVerdict {
    let det = m.determinant(ctx);
    let scale_n = m.scale.powi(m.n, ctx.p, RM);
    let t = ctx.threshold(&scale_n);
    let sign = if det.abs().partial_cmp(&t) != Some(Ordering::Greater) {
        HpSign::ZeroBand
    } else if det.is_negative() {
        HpSign::Negative
    } else {
        HpSign::Positive
    };
    HpVerdict { sign, value_estimate: big_to_f64(&det), digits_used: ctx.digits, threshold: big_to_f64(&t) }
}

/// λ_min of the family's power `A^∘α` (or `|A|^∘α`), rebuilt at `digits`.
pub fn hp_min_eigenvalue(spec: &FamilySpec, use_abs: bool, alpha: Alpha, digits: usize) -> Result<HpVerdict> {
    let mut ctx = Ctx::new(digits)?;
    let a = ctx.f64(alpha.value());
    let m = power_matrix(spec, use_abs, &a, &mut ctx)?;
    Ok(min_eigenvalue_verdict(&m, &mut ctx))
}

/// Determinant of the family's power, rebuilt at `digits`.
pub fn hp_det(spec: &FamilySpec, use_abs: bool, alpha: Alpha, digits: usize) -> Result<HpVerdict> {
    let mut ctx = Ctx::new(digits)?;
    let a = ctx.f64(alpha.value());
    let m = power_matrix(spec, use_abs, &a, &mut ctx)?;
    Ok(det_verdict(&m, &mut ctx))
}

/// λ_min of a binary64 matrix taken at face value.
pub fn hp_min_eigenvalue_of(m: &SymMatrix, digits: usize) -> Result<HpVerdict> {
    let mut ctx = Ctx::new(digits)?;
    let hm = promoted(m, &ctx);
    Ok(min_eigenvalue_verdict(&hm, &mut ctx))
}

/// Determinant of a binary64 matrix taken at face value.
pub fn hp_det_of(m: &SymMatrix, digits: usize) -> Result<HpVerdict> {
    let mut ctx = Ctx::new(digits)?;
    let hm = promoted(m, &ctx);
    Ok(det_verdict(&hm, &mut ctx))
}

fn sign_at(spec: &FamilySpec, use_abs: bool, alpha: &BigFloat, target: RootTarget, digits: usize) -> Result<HpSign> {
    let mut ctx = Ctx::new(digits)?;
    // alpha may carry more bits than this context; keep them all
    let mut ctx_alpha = alpha.clone();
    if ctx_alpha.precision().unwrap_or(0) > ctx.p {
        ctx.p = ctx_alpha.precision().unwrap_or(ctx.p).div_ceil(64) * 64;
    } else {
        ctx_alpha.set_precision(ctx.p, RM).ok();
    }
    let m = power_matrix(spec, use_abs, &ctx_alpha, &mut ctx)?;
    Ok(match target {
        RootTarget::Determinant => det_verdict(&m, &mut ctx).sign,
        RootTarget::MinEigenvalue => sign_of_min_eigenvalue(&m, &mut ctx),
    })
}

fn sign_of_min_eigenvalue(m: &HpMatrix, ctx: &mut Ctx) -> HpSign {
    let t = ctx.threshold(&m.scale);
    if m.shifted_inertia(ctx, &t).2 > 0 {
        return HpSign::Negative;
    }
    let (_, z, neg) = m.shifted_inertia(ctx, &t.neg());
    if z == 0 && neg == 0 {
        HpSign::Positive
    } else {
        HpSign::ZeroBand
    }
}

/// Bisects a certified sign change of the determinant (or λ_min) on
/// `[lo, hi]` down to a bracket of width at most `1e-30`.
///
/// Midpoints that land in the zero band are re-evaluated with doubled
/// precision, up to 800 digits.
pub fn refine_root(
    spec: &FamilySpec,
    use_abs: bool,
    lo: f64,
    hi: f64,
    digits: usize,
    target: RootTarget,
) -> Result<RootBracket> {
    const WIDTH: f64 = 1e-30;
    let ctx = Ctx::new(digits)?;
    // enough bits to resolve 1e-30 steps next to O(10) exponents
    let p = ctx.p.max(256);
    let mut a = BigFloat::from_f64(lo, p);
    let mut b = BigFloat::from_f64(hi, p);
    let sa = sign_at(spec, use_abs, &a, target, digits)?;
    let sb = sign_at(spec, use_abs, &b, target, digits)?;
    if sa == HpSign::ZeroBand || sb == HpSign::ZeroBand || sa == sb {
        return Err(Error::SameSign { lo: format!("{lo} ({})", sa.as_str()), hi: format!("{hi} ({})", sb.as_str()) });
    }
    let two = BigFloat::from_u8(2, p);
    let target_width = BigFloat::from_f64(WIDTH, p);
    let mut used = digits;
    let mut cur = digits;
    loop {
        let width = b.sub(&a, p, RM);
        if width.partial_cmp(&target_width) != Some(Ordering::Greater) {
            break;
        }
        let mid = a.add(&b, p, RM).div(&two, p, RM);
        let mut s = sign_at(spec, use_abs, &mid, target, cur)?;
        while s == HpSign::ZeroBand && cur < MAX_DIGITS {
            cur = (cur * 2).min(MAX_DIGITS);
            used = used.max(cur);
            s = sign_at(spec, use_abs, &mid, target, cur)?;
        }
        if s == HpSign::ZeroBand {
            break;
        }
        if s == sa {
            a = mid;
        } else {
            b = mid;
        }
    }
    let mut ctx = Ctx::new(digits)?;
    let width = b.sub(&a, p, RM);
    Ok(RootBracket {
        lo: decimal_string(&a, 32, false, &mut ctx.cc),
        hi: decimal_string(&b, 32, true, &mut ctx.cc),
        width: big_to_f64(&width),
        sign_lo: sa,
        sign_hi: sb,
        digits_used: used,
    })
}

/// `v` rounded to `sig` significant decimal digits, toward +∞ when `up`,
/// toward -∞ otherwise, in positional notation.
fn decimal_string(v: &BigFloat, sig: usize, up: bool, cc: &mut Consts) -> String {
    if v.is_zero() {
        return "0".into();
    }
    let raw = v.format(Radix::Dec, RM, cc).expect("finite value formats");
    let (neg, body) = raw.strip_prefix('-').map_or((false, raw.as_str()), |b| (true, b));
    let (mantissa, exp) = body.split_once('e').unwrap_or((body, "0"));
    let exp: i64 = exp.parse().expect("exponent");
    let mut digits: Vec<u8> = mantissa.bytes().filter(u8::is_ascii_digit).map(|c| c - b'0').collect();
    // drop leading zeros, adjusting the exponent
    let lead = digits.iter().take_while(|d| **d == 0).count();
    digits.drain(..lead);
    let mut exp = exp - lead as i64;
    if digits.is_empty() {
        return "0".into();
    }
    let dropped_nonzero = digits.iter().skip(sig).any(|d| *d != 0);
    digits.truncate(sig);
    // magnitude rounds away from zero when the direction agrees with the sign
    if dropped_nonzero && (up != neg) {
        let mut i = digits.len();
        loop {
            if i == 0 {
                digits.insert(0, 1);
                digits.pop();
                exp += 1;
                break;
            }
            i -= 1;
            if digits[i] == 9 {
                digits[i] = 0;
            } else {
                digits[i] += 1;
                break;
            }
        }
    }
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    let text: String = digits.iter().map(|d| char::from(b'0' + d)).collect();
    if exp >= 0 {
        let int_len = exp as usize + 1;
        if text.len() <= int_len {
            s.push_str(&text);
            s.extend(std::iter::repeat_n('0', int_len - text.len()));
        } else {
            s.push_str(&text[..int_len]);
            s.push('.');
            s.push_str(&text[int_len..]);
        }
    } else {
        s.push_str("0.");
        s.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        s.push_str(&text);
    }
    s
}

/// Referee for a point `(family, α)`; entries rebuilt from the family formula.
pub struct FamilyPoint<'a> {
    pub spec: &'a FamilySpec,
    pub use_abs: bool,
    pub alpha: Alpha,
    pub digits: usize,
}

impl Referee for FamilyPoint<'_> {
    fn min_eigenvalue(&self) -> Result<HpVerdict> {
        hp_min_eigenvalue(self.spec, self.use_abs, self.alpha, self.digits)
    }
}

/// Referee for a matrix that only exists in binary64.
pub struct PromotedMatrix<'a> {
    matrix: &'a SymMatrix,
    digits: usize,
}

impl<'a> PromotedMatrix<'a> {
    pub fn new(matrix: &'a SymMatrix, digits: usize) -> Self {
        PromotedMatrix { matrix, digits }
    }
}

impl Referee for PromotedMatrix<'_> {
    fn min_eigenvalue(&self) -> Result<HpVerdict> {
        hp_min_eigenvalue_of(self.matrix, self.digits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::default_x;

    fn a(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    fn a4() -> FamilySpec {
        FamilySpec::poly_gram(default_x(4))
    }

    fn a41() -> FamilySpec {
        FamilySpec::perturbed_poly_gram(default_x(4), 1, Param::parse("1e-7").unwrap())
    }

    #[test]
    fn baseline_touches_zero_at_integers() {
        for alpha in [0.0, 1.0, 2.0] {
            let v = hp_min_eigenvalue(&a4(), false, a(alpha), 50).unwrap();
            assert_eq!(v.sign, HpSign::ZeroBand, "alpha {alpha}");
            assert!((v.threshold - 1e-40 * 1.25f64.powf(alpha)).abs() < 1e-45);
        }
        let v = hp_min_eigenvalue(&a4(), false, a(1.5), 50).unwrap();
        assert_eq!(v.sign, HpSign::Negative);
        // λ_min(A_4^∘1.5) ≈ -2.80e-8 (independent 60-digit eigensolve)
        assert!((v.value_estimate + 2.80e-8).abs() < 0.01e-8, "{}", v.value_estimate);
        assert_eq!(hp_det(&a4(), false, a(2.0), 50).unwrap().sign, HpSign::ZeroBand);
    }

    #[test]
    fn single_trailing_bump_keeps_alpha_one_singular() {
        // A_4 has rank 2, a rank-one bump makes rank 3: still singular at α = 1
        assert_eq!(hp_min_eigenvalue(&a41(), false, a(1.0), 50).unwrap().sign, HpSign::ZeroBand);
        assert_eq!(hp_det(&a41(), false, a(1.0), 50).unwrap().sign, HpSign::ZeroBand);
        assert_eq!(hp_min_eigenvalue(&a41(), false, a(1.1), 50).unwrap().sign, HpSign::Positive);
        assert_eq!(hp_det(&a41(), false, a(1.1), 50).unwrap().sign, HpSign::Positive);
        assert_eq!(hp_det(&a41(), false, a(1.5), 50).unwrap().sign, HpSign::Negative);
    }

    #[test]
    fn file_family_is_unsupported() {
        let dir = std::env::temp_dir().join(format!("hadapow-oracle-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("m.txt");
        SymMatrix::identity(2).unwrap().write_file(&path).unwrap();
        let spec = FamilySpec::file(&path).unwrap();
        assert!(matches!(hp_min_eigenvalue(&spec, true, a(1.0), 50), Err(Error::UnsupportedFamily(_))));
        assert!(matches!(hp_det(&spec, true, a(1.0), 50), Err(Error::UnsupportedFamily(_))));
    }

    #[test]
    fn digits_floor_is_enforced() {
        assert!(matches!(hp_det(&a4(), false, a(1.0), 30), Err(Error::TooFewDigits(30))));
    }

    #[test]
    fn negative_entries_need_abs() {
        let c = FamilySpec::cos_toeplitz(4);
        assert!(matches!(hp_det(&c, false, a(1.0), 50), Err(Error::NegativeEntry { .. })));
        // |C_4| at α = 1 has the exact zero at offset 2
        let v = hp_min_eigenvalue(&c, true, a(1.0), 50).unwrap();
        assert_eq!(v.sign, HpSign::Negative);
    }

    #[test]
    fn cosine_baseline_zero_at_even_powers() {
        let c6 = FamilySpec::cos_toeplitz(6);
        assert_eq!(hp_min_eigenvalue(&c6, true, a(2.0), 50).unwrap().sign, HpSign::ZeroBand);
        assert_eq!(hp_min_eigenvalue(&c6, true, a(3.0), 50).unwrap().sign, HpSign::Negative);
    }

    #[test]
    fn promoted_matrix_referee() {
        let v = hp_min_eigenvalue_of(&SymMatrix::ones(3).unwrap(), 50).unwrap();
        assert_eq!(v.sign, HpSign::ZeroBand);
        let m = SymMatrix::new(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let v = hp_min_eigenvalue_of(&m, 50).unwrap();
        assert_eq!(v.sign, HpSign::Positive);
        assert!((v.value_estimate - 1.0).abs() < 1e-4);
        assert_eq!(hp_det_of(&m, 50).unwrap().value_estimate, 3.0);
    }

    #[test]
    fn binary64_conversion() {
        for v in [1.0, -1.0, 0.5, 3.0, 1e-300, -7.25e12, std::f64::consts::PI, 1.0 / 3.0, f64::MIN_POSITIVE] {
            assert_eq!(big_to_f64(&BigFloat::from_f64(v, 256)), v);
        }
        assert_eq!(big_to_f64(&BigFloat::from_u8(0, 128)), 0.0);
        let mut cc = Consts::new().unwrap();
        let third = BigFloat::parse("1e-7", Radix::Dec, 256, RM, &mut cc);
        assert_eq!(big_to_f64(&third), 1e-7);
    }

    #[test]
    fn decimal_rounding_directions() {
        let mut cc = Consts::new().unwrap();
        let v = BigFloat::parse("1.23456789", Radix::Dec, 256, RM, &mut cc);
        assert_eq!(decimal_string(&v, 4, false, &mut cc), "1.234");
        assert_eq!(decimal_string(&v, 4, true, &mut cc), "1.235");
        let v = BigFloat::parse("-0.0099999", Radix::Dec, 256, RM, &mut cc);
        assert_eq!(decimal_string(&v, 3, false, &mut cc), "-0.0100");
        assert_eq!(decimal_string(&v, 3, true, &mut cc), "-0.00999");
        let v = BigFloat::parse("123", Radix::Dec, 256, RM, &mut cc);
        assert_eq!(decimal_string(&v, 5, true, &mut cc), "123");
    }
}
