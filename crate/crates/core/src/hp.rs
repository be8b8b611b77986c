//! High-precision scalars.
//!
//! Reals are MPFR floats ([`rug::Float`]); [`ComplexHp`] wraps an MPC complex
//! with a single precision shared by both parts. Binary operations on mixed
//! precisions produce a result at the smaller precision.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use rug::float::Round;
use rug::{Complex, Float};

/// log2(10).
pub const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Complex number with an explicit working precision in bits.
#[derive(Clone, PartialEq)]
pub struct ComplexHp(Complex);

impl ComplexHp {
    pub fn new(re: &Float, im: &Float) -> Self {
        let prec = re.prec().min(im.prec());
        ComplexHp(Complex::with_val(prec, (re, im)))
    }

    pub fn from_f64(re: f64, im: f64, precision_bits: u32) -> Self {
        ComplexHp(Complex::with_val(precision_bits, (re, im)))
    }

    pub fn from_c64(z: Complex64, precision_bits: u32) -> Self {
        Self::from_f64(z.re, z.im, precision_bits)
    }

    /// Wraps `z`, coercing both parts to the smaller of their precisions.
    pub fn from_complex(z: Complex) -> Self {
        let (pr, pi) = z.prec();
        if pr == pi {
            ComplexHp(z)
        } else {
            ComplexHp(Complex::with_val(pr.min(pi), z))
        }
    }

    pub fn precision_bits(&self) -> u32 {
        self.0.prec().0
    }

    pub fn re(&self) -> &Float {
        self.0.real()
    }

    pub fn im(&self) -> &Float {
        self.0.imag()
    }

    pub fn as_complex(&self) -> &Complex {
        &self.0
    }

    pub fn into_complex(self) -> Complex {
        self.0
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.0.real().to_f64(), self.0.imag().to_f64())
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.precision_bits(), self.0.abs_ref())
    }

    pub fn conj(&self) -> Self {
        ComplexHp(Complex::with_val(self.precision_bits(), self.0.conj_ref()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.real().is_finite() && self.0.imag().is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.0.real().is_zero() && self.0.imag().is_zero()
    }

    /// Same value re-rounded to `precision_bits`.
    pub fn with_precision(&self, precision_bits: u32) -> Self {
        ComplexHp(Complex::with_val(precision_bits, &self.0))
    }
}

impl fmt::Debug for ComplexHp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexHp({} + {}i; {} bits)", self.0.real(), self.0.imag(), self.precision_bits())
    }
}

impl fmt::Display for ComplexHp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = digits_for_bits(self.precision_bits());
        write!(
            f,
            "{} {}",
            self.0.real().to_string_radix(10, Some(digits)),
            self.0.imag().to_string_radix(10, Some(digits))
        )
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&ComplexHp> for &ComplexHp {
            type Output = ComplexHp;
            fn $method(self, rhs: &ComplexHp) -> ComplexHp {
                let prec = self.precision_bits().min(rhs.precision_bits());
                ComplexHp(Complex::with_val(prec, (&self.0).$method(&rhs.0)))
            }
        }
        impl $tr<ComplexHp> for ComplexHp {
            type Output = ComplexHp;
            fn $method(self, rhs: ComplexHp) -> ComplexHp {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for ComplexHp {
    type Output = ComplexHp;
    fn neg(self) -> ComplexHp {
        ComplexHp(-self.0)
    }
}

/// Mantissa bits implied by `digits` significant decimal digits.
pub fn bits_for_digits(digits: usize) -> u32 {
    (digits as f64 * LOG2_10).floor() as u32
}

/// Significant decimal digits needed to represent `bits` mantissa bits.
pub fn digits_for_bits(bits: u32) -> usize {
    (bits as f64 / LOG2_10).ceil() as usize
}

/// Error from [`parse_decimal`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed decimal '{0}'")]
pub struct DecimalError(pub String);

/// A parsed positional decimal literal.
#[derive(Debug, Clone)]
pub struct Decimal {
    pub value: Float,
    /// Significant digits, counting trailing zeros after the decimal point.
    pub significant_digits: usize,
}

/// Parses an unsigned (or `+`-prefixed) positional decimal such as
/// `14.134725141734693790`. The value is rounded to `precision_bits`.
pub fn parse_decimal(text: &str, precision_bits: u32) -> Result<Decimal, DecimalError> {
    let err = || DecimalError(text.to_string());
    let body = text.strip_prefix('+').unwrap_or(text);
    if body.is_empty() {
        return Err(err());
    }
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let all_digits: String = format!("{int_part}{frac_part}");
    let significant_digits = all_digits.trim_start_matches('0').len();
    let parsed = Float::parse(body).map_err(|_| err())?;
    Ok(Decimal {
        value: Float::with_val(precision_bits.max(2), parsed),
        significant_digits,
    })
}

/// [`parse_decimal`] with an optional leading `-`.
pub fn parse_signed_decimal(text: &str, precision_bits: u32) -> Result<Decimal, DecimalError> {
    match text.strip_prefix('-') {
        Some(rest) if !rest.starts_with('+') => {
            let mut d = parse_decimal(rest, precision_bits).map_err(|_| DecimalError(text.to_string()))?;
            d.value = -d.value;
            Ok(d)
        }
        _ => parse_decimal(text, precision_bits),
    }
}

/// Formats `x` in positional notation with `digits` significant digits.
pub fn format_decimal(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let (neg, mantissa, exp) = x.to_sign_string_exp_round(10, Some(digits.max(1)), Round::Nearest);
    let exp = exp.unwrap_or(0);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if exp <= 0 {
        out.push_str("0.");
        for _ in 0..(-exp) {
            out.push('0');
        }
        out.push_str(&mantissa);
    } else {
        let e = exp as usize;
        if e >= mantissa.len() {
            out.push_str(&mantissa);
            for _ in mantissa.len()..e {
                out.push('0');
            }
        } else {
            out.push_str(&mantissa[..e]);
            out.push('.');
            out.push_str(&mantissa[e..]);
        }
    }
    out
}

/// π at the given precision.
pub fn pi(precision_bits: u32) -> Float {
    Float::with_val(precision_bits, rug::float::Constant::Pi)
}
