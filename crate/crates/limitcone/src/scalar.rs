//! Arbitrary-precision real scalars.
//!
//! Every length, trace, coordinate and angle in this crate is carried by a
//! [`Scalar`]: an arbitrary-precision binary float together with the mantissa
//! width it was computed at. Binary operations produce a result at the larger
//! of the two operand precisions.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use thiserror::Error;

/// Smallest supported mantissa width in bits.
pub const MIN_PRECISION: usize = 64;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("precision {0} is below the supported minimum {MIN_PRECISION}")]
    PrecisionTooLow(usize),
    #[error("comparison tolerance is below the noise floor 2^(8-{precision})")]
    ToleranceTooSmall { precision: usize },
}

/// An arbitrary-precision real number with an explicit mantissa width.
#[derive(Clone)]
pub struct Scalar {
    v: BigFloat,
    prec: usize,
}

impl Scalar {
    fn wrap(v: BigFloat, prec: usize) -> Self {
        debug_assert!(prec >= MIN_PRECISION);
        assert!(!v.is_nan() && !v.is_inf(), "scalar operation produced a non-finite value");
        Scalar { v, prec }
    }

    pub fn from_u64(n: u64, prec: usize) -> Self {
        assert!(prec >= MIN_PRECISION, "precision {prec} too low");
        Scalar::wrap(BigFloat::from_u64(n, prec), prec)
    }

    pub fn from_i64(n: i64, prec: usize) -> Self {
        assert!(prec >= MIN_PRECISION, "precision {prec} too low");
        Scalar::wrap(BigFloat::from_i64(n, prec), prec)
    }

    /// Exact conversion; `f` must be finite.
    pub fn from_f64(f: f64, prec: usize) -> Self {
        assert!(prec >= MIN_PRECISION, "precision {prec} too low");
        assert!(f.is_finite());
        Scalar::wrap(BigFloat::from_f64(f, prec), prec)
    }

    /// Parses a decimal literal (optionally with exponent, e.g. `1e-4`)
    /// directly at the target precision, without a binary64 round-trip.
    pub fn from_decimal(s: &str, prec: usize) -> Result<Self, ScalarError> {
        if prec < MIN_PRECISION {
            return Err(ScalarError::PrecisionTooLow(prec));
        }
        let v = with_consts(|cc| BigFloat::parse(s, Radix::Dec, prec, RM, cc));
        if v.is_nan() || v.is_inf() {
            return Err(ScalarError::PrecisionTooLow(prec)); // unreachable for valid input
        }
        Ok(Scalar::wrap(v, prec))
    }

    pub fn zero(prec: usize) -> Self {
        Scalar::from_u64(0, prec)
    }

    pub fn one(prec: usize) -> Self {
        Scalar::from_u64(1, prec)
    }

    /// Exactly `2^e` at the given precision.
    pub fn two_pow(e: i64, prec: usize) -> Self {
        let mut v = BigFloat::from_u64(1, prec);
        let cur = v.exponent().expect("finite");
        v.set_exponent(cur + i32::try_from(e).expect("exponent fits i32"));
        Scalar::wrap(v, prec)
    }

    pub fn pi(prec: usize) -> Self {
        let v = with_consts(|cc| cc.pi(prec, RM));
        Scalar::wrap(BigFloat::from(v), prec)
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    /// Re-rounds to a new mantissa width (widening is exact).
    pub fn with_precision(&self, prec: usize) -> Self {
        assert!(prec >= MIN_PRECISION, "precision {prec} too low");
        let mut v = self.v.clone();
        v.set_precision(prec, RM).expect("set precision");
        Scalar::wrap(v, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.v.is_positive() && !self.v.is_zero()
    }

    /// Binary exponent: the value lies in `[2^(e-1), 2^e)` up to sign; 0 for zero.
    pub fn exponent(&self) -> i64 {
        if self.v.is_zero() {
            0
        } else {
            self.v.exponent().expect("finite") as i64
        }
    }

    fn op_prec(&self, rhs: &Scalar) -> usize {
        self.prec.max(rhs.prec)
    }

    pub fn abs(&self) -> Self {
        Scalar::wrap(self.v.abs(), self.prec)
    }

    pub fn sqrt(&self) -> Self {
        Scalar::wrap(self.v.sqrt(self.prec, RM), self.prec)
    }

    pub fn exp(&self) -> Self {
        Scalar::wrap(with_consts(|cc| self.v.exp(self.prec, RM, cc)), self.prec)
    }

    pub fn ln(&self) -> Self {
        Scalar::wrap(with_consts(|cc| self.v.ln(self.prec, RM, cc)), self.prec)
    }

    pub fn cosh(&self) -> Self {
        Scalar::wrap(with_consts(|cc| self.v.cosh(self.prec, RM, cc)), self.prec)
    }

    pub fn sinh(&self) -> Self {
        Scalar::wrap(with_consts(|cc| self.v.sinh(self.prec, RM, cc)), self.prec)
    }

    pub fn tanh(&self) -> Self {
        Scalar::wrap(with_consts(|cc| self.v.tanh(self.prec, RM, cc)), self.prec)
    }

    /// Inverse hyperbolic cosine; caller guarantees `self >= 1`.
    pub fn acosh(&self) -> Self {
        Scalar::wrap(with_consts(|cc| self.v.acosh(self.prec, RM, cc)), self.prec)
    }

    pub fn asinh(&self) -> Self {
        Scalar::wrap(with_consts(|cc| self.v.asinh(self.prec, RM, cc)), self.prec)
    }

    pub fn sin(&self) -> Self {
        Scalar::wrap(with_consts(|cc| self.v.sin(self.prec, RM, cc)), self.prec)
    }

    pub fn cos(&self) -> Self {
        Scalar::wrap(with_consts(|cc| self.v.cos(self.prec, RM, cc)), self.prec)
    }

    /// Inverse cosine; caller guarantees `|self| <= 1`.
    pub fn acos(&self) -> Self {
        Scalar::wrap(with_consts(|cc| self.v.acos(self.prec, RM, cc)), self.prec)
    }

    pub fn atan(&self) -> Self {
        Scalar::wrap(with_consts(|cc| self.v.atan(self.prec, RM, cc)), self.prec)
    }

    /// Four-quadrant arctangent of `self / x`.
    pub fn atan2(&self, x: &Scalar) -> Self {
        let p = self.op_prec(x);
        let pi = Scalar::pi(p);
        if x.is_positive() {
            (self / x).atan()
        } else if x.is_negative() {
            let base = (self / x).atan();
            if self.is_negative() {
                &base - &pi
            } else {
                &base + &pi
            }
        } else if self.is_positive() {
            &pi / &Scalar::from_u64(2, p)
        } else if self.is_negative() {
            -&(&pi / &Scalar::from_u64(2, p))
        } else {
            Scalar::zero(p)
        }
    }

    /// Raises to a real power; caller guarantees `self > 0`.
    pub fn pow(&self, e: &Scalar) -> Self {
        let p = self.op_prec(e);
        Scalar::wrap(with_consts(|cc| self.v.pow(&e.v, p, RM, cc)), p)
    }

    pub fn powi(&self, n: usize) -> Self {
        Scalar::wrap(self.v.powi(n, self.prec, RM), self.prec)
    }

    pub fn min(&self, rhs: &Scalar) -> Self {
        if self <= rhs {
            self.clone()
        } else {
            rhs.clone()
        }
    }

    pub fn max(&self, rhs: &Scalar) -> Self {
        if self >= rhs {
            self.clone()
        } else {
            rhs.clone()
        }
    }

    /// Absolute-difference comparison at tolerance `tol`. Rejects tolerances
    /// below the noise floor `2^(8-precision)` of the less precise operand.
    pub fn approx_eq(&self, rhs: &Scalar, tol: &Scalar) -> Result<bool, ScalarError> {
        let precision = self.prec.min(rhs.prec);
        let floor = Scalar::two_pow(8 - precision as i64, precision);
        if tol < &floor {
            return Err(ScalarError::ToleranceTooSmall { precision });
        }
        Ok(&(self - rhs).abs() <= tol)
    }

    /// Nearest `f64`; saturates on overflow. For diagnostics and rendering only.
    pub fn to_f64(&self) -> f64 {
        if self.v.is_zero() {
            return 0.0;
        }
        let (words, _len, sign, exp, _) = self.v.as_raw_parts().expect("finite");
        let mut mant = 0.0f64;
        // words are little-endian; the top word carries the leading bit
        for (i, w) in words.iter().rev().take(2).enumerate() {
            mant += (*w as f64) / 2f64.powi(64 * (i as i32 + 1));
        }
        let m = mant * 2f64.powi(exp);
        if sign == Sign::Neg {
            -m
        } else {
            m
        }
    }

    /// Deduplication key: the value rounded to `frac_bits` binary fractional
    /// positions, exposed as (sign, exponent, trimmed mantissa words).
    pub fn dedup_key(&self, frac_bits: usize) -> (i8, i64, Vec<u64>) {
        let r = self.v.round(frac_bits, RM);
        if r.is_zero() {
            return (0, 0, Vec::new());
        }
        let (words, _len, sign, exp, _) = r.as_raw_parts().expect("finite");
        let mut m: Vec<u64> = words.to_vec();
        while m.first() == Some(&0) {
            m.remove(0);
        }
        (if sign == Sign::Neg { -1 } else { 1 }, exp as i64, m)
    }

    /// Full-precision decimal representation (deterministic).
    pub fn to_decimal(&self) -> String {
        with_consts(|cc| self.v.format(Radix::Dec, RM, cc)).expect("format")
    }

    /// Decimal representation truncated to at most `digits` significant digits.
    pub fn to_decimal_sig(&self, digits: usize) -> String {
        let full = self.to_decimal();
        truncate_decimal(&full, digits)
    }
}

/// Truncates the mantissa of a decimal string like `-1.2345e+10` to `digits`
/// significant digits, keeping the exponent part intact.
fn truncate_decimal(s: &str, digits: usize) -> String {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, ""),
    };
    let mut out = String::with_capacity(mant.len());
    let mut sig = 0usize;
    let mut seen_nonzero = false;
    for ch in mant.chars() {
        if ch.is_ascii_digit() {
            if ch != '0' {
                seen_nonzero = true;
            }
            if seen_nonzero {
                if sig >= digits {
                    break;
                }
                sig += 1;
            }
        }
        out.push(ch);
    }
    // drop a trailing dot
    if out.ends_with('.') {
        out.pop();
    }
    out.push_str(exp);
    out
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({} @{})", self.to_decimal_sig(12), self.prec)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.v.cmp(&other.v) == Some(0)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|s| s.cmp(&0))
    }
}

macro_rules! impl_binop {
    ($trait:ident, $fn:ident, $bf:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $fn(self, rhs: &Scalar) -> Scalar {
                let p = self.op_prec(rhs);
                Scalar::wrap(self.v.$bf(&rhs.v, p, RM), p)
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $fn(self, rhs: Scalar) -> Scalar {
                (&self).$fn(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $fn(self, rhs: &Scalar) -> Scalar {
                (&self).$fn(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $fn(self, rhs: Scalar) -> Scalar {
                self.$fn(&rhs)
            }
        }
    };
}

impl_binop!(Add, add, add);
impl_binop!(Sub, sub, sub);
impl_binop!(Mul, mul, mul);
impl_binop!(Div, div, div);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        let mut v = self.v.clone();
        v.inv_sign();
        Scalar::wrap(v, self.prec)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}
