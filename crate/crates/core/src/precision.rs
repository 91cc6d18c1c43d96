//! Floating-point formats and emulated reduced-precision arithmetic.
//!
//! Every kernel of the solver runs in one of four formats. `fp64` and `fp32`
//! map onto the native types; `fp16` and `bf16` are emulated: each scalar
//! operation is evaluated in `f64` and the result is rounded to the target
//! format with round-to-nearest-even. Because `f64` carries more than
//! `2p + 2` significand bits for both half formats, this yields the correctly
//! rounded result for `+ - * /` and `sqrt`.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use crate::error::Error;

/// A floating-point format, ordered by the width of its significand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FloatFormat {
    Bf16,
    Fp16,
    Fp32,
    Fp64,
}

impl FloatFormat {
    pub const ALL: [FloatFormat; 4] = [Self::Bf16, Self::Fp16, Self::Fp32, Self::Fp64];

    pub fn name(self) -> &'static str {
        match self {
            Self::Bf16 => "bf16",
            Self::Fp16 => "fp16",
            Self::Fp32 => "fp32",
            Self::Fp64 => "fp64",
        }
    }

    /// Explicitly stored fraction bits.
    pub fn mantissa_bits(self) -> u32 {
        match self {
            Self::Bf16 => 7,
            Self::Fp16 => 10,
            Self::Fp32 => 23,
            Self::Fp64 => 52,
        }
    }

    pub fn exponent_bits(self) -> u32 {
        match self {
            Self::Bf16 => 8,
            Self::Fp16 => 5,
            Self::Fp32 => 8,
            Self::Fp64 => 11,
        }
    }

    /// Largest unbiased exponent of a finite value.
    pub fn max_exponent(self) -> i32 {
        (1 << (self.exponent_bits() - 1)) - 1
    }

    /// Smallest unbiased exponent of a normal value.
    pub fn min_exponent(self) -> i32 {
        1 - self.max_exponent()
    }

    /// `2^-mantissa_bits`.
    pub fn epsilon(self) -> f64 {
        pow2(-(self.mantissa_bits() as i32))
    }

    /// Largest finite magnitude, `(2 - 2^-m) * 2^emax`.
    pub fn max_finite(self) -> f64 {
        (2.0 - self.epsilon()) * pow2(self.max_exponent())
    }

    /// Smallest positive subnormal, `2^(emin - m)`.
    pub fn min_positive_subnormal(self) -> f64 {
        pow2(self.min_exponent() - self.mantissa_bits() as i32)
    }

    pub fn is_representable(self, x: f64) -> bool {
        let r = round_to_format(x, self);
        r.to_bits() == x.to_bits() || (x.is_nan() && r.is_nan())
    }
}

impl fmt::Display for FloatFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FloatFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bf16" => Ok(Self::Bf16),
            "fp16" => Ok(Self::Fp16),
            "fp32" => Ok(Self::Fp32),
            "fp64" => Ok(Self::Fp64),
            other => Err(Error::Config(format!("unknown float format `{other}`"))),
        }
    }
}

pub fn format_epsilon(fmt: FloatFormat) -> f64 {
    fmt.epsilon()
}

/// Exact `2^e` for exponents inside the normal `f64` range.
#[inline]
fn pow2(e: i32) -> f64 {
    debug_assert!((-1022..=1023).contains(&e));
    f64::from_bits(((e + 1023) as u64) << 52)
}

const SIGN_MASK: u64 = 1 << 63;
const FRAC_MASK: u64 = (1 << 52) - 1;

/// Rounds `x` to a binary format with `mantissa_bits` fraction bits and the
/// given exponent range. Subnormals are kept, overflow goes to infinity.
#[inline]
fn round_to_bits(x: f64, mantissa_bits: u32, min_exp: i32, max_exp: i32) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let bits = x.to_bits();
    let sign = bits & SIGN_MASK;
    let abs = bits & !SIGN_MASK;
    if abs == 0 {
        return x;
    }
    let biased = (abs >> 52) as i32;
    // f64 subnormals lie far below the subnormal range of every emulated format
    if biased == 0 {
        return f64::from_bits(sign);
    }
    let exp = biased - 1023;
    if exp >= min_exp {
        // normal result: round the f64 bit pattern directly, carries ripple
        // into the exponent
        let drop = 52 - mantissa_bits;
        let mask = (1u64 << drop) - 1;
        let rounded = (abs + (mask >> 1) + ((abs >> drop) & 1)) & !mask;
        if (rounded >> 52) as i32 - 1023 > max_exp {
            return f64::from_bits(sign | f64::INFINITY.to_bits());
        }
        return f64::from_bits(sign | rounded);
    }
    let significand = (abs & FRAC_MASK) | (1 << 52);
    let drop = 52 - mantissa_bits as i32 + (min_exp - exp).max(0);
    if drop >= 54 {
        return f64::from_bits(sign);
    }
    let drop = drop as u32;
    let half = 1u64 << (drop - 1);
    let rem = significand & ((1u64 << drop) - 1);
    let mut kept = significand >> drop;
    if rem > half || (rem == half && kept & 1 == 1) {
        kept += 1;
    }
    // kept * 2^(exp - 52 + drop); both factors exact in f64
    let magnitude = kept as f64 * pow2(exp - 52 + drop as i32);
    let max_finite = (2.0 - pow2(-(mantissa_bits as i32))) * pow2(max_exp);
    let magnitude = if magnitude > max_finite {
        f64::INFINITY
    } else {
        magnitude
    };
    if sign != 0 {
        -magnitude
    } else {
        magnitude
    }
}

/// Rounds an `f64` value to `fmt` with round-to-nearest-even.
#[inline]
pub fn round_to_format(x: f64, fmt: FloatFormat) -> f64 {
    match fmt {
        FloatFormat::Fp64 => x,
        FloatFormat::Fp32 => x as f32 as f64,
        FloatFormat::Fp16 => round_to_bits(x, 10, -14, 15),
        FloatFormat::Bf16 => round_to_bits(x, 7, -126, 127),
    }
}

/// Rounds an `f32` to a format with at most 10 fraction bits; normal
/// results take a bit-pattern fast path.
#[inline]
fn round_f32_to_bits(x: f32, mantissa_bits: u32, min_exp: i32, max_exp: i32) -> f32 {
    let bits = x.to_bits();
    let abs = bits & 0x7fff_ffff;
    let biased = (abs >> 23) as i32;
    if abs == 0 || biased == 0xff {
        return x;
    }
    if biased - 127 >= min_exp {
        let drop = 23 - mantissa_bits;
        let mask = (1u32 << drop) - 1;
        let rounded = (abs + (mask >> 1) + ((abs >> drop) & 1)) & !mask;
        let sign = bits & 0x8000_0000;
        if (rounded >> 23) as i32 - 127 > max_exp {
            return f32::from_bits(sign | 0x7f80_0000);
        }
        return f32::from_bits(sign | rounded);
    }
    round_to_bits(x as f64, mantissa_bits, min_exp, max_exp) as f32
}

/// Half-format rounding of an `f32` value; identity for wider formats.
#[inline]
pub fn round_f32_to_format(x: f32, fmt: FloatFormat) -> f32 {
    match fmt {
        FloatFormat::Fp16 => round_f32_to_bits(x, 10, -14, 15),
        FloatFormat::Bf16 => round_f32_to_bits(x, 7, -126, 127),
        _ => x,
    }
}

/// Generic bit-level rounding, exposed so the `fp32` fast path can be checked
/// against it.
pub fn round_to_format_generic(x: f64, fmt: FloatFormat) -> f64 {
    if fmt == FloatFormat::Fp64 {
        return x;
    }
    round_to_bits(x, fmt.mantissa_bits(), fmt.min_exponent(), fmt.max_exponent())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// One scalar operation "computed in `fmt`": exact-enough evaluation in
/// `f64`, then a single rounding.
pub fn reduced_arith(op: ArithOp, a: f64, b: f64, fmt: FloatFormat) -> f64 {
    let wide = match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a / b,
    };
    round_to_format(wide, fmt)
}

/// The four kernel precisions of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionConfig {
    pub storage: FloatFormat,
    pub predictor: FloatFormat,
    pub picard: FloatFormat,
    pub corrector: FloatFormat,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        Self::uniform(FloatFormat::Fp64)
    }
}

impl PrecisionConfig {
    pub fn uniform(fmt: FloatFormat) -> Self {
        Self {
            storage: fmt,
            predictor: fmt,
            picard: fmt,
            corrector: fmt,
        }
    }

    /// Distinct formats used by the compute kernels and storage.
    pub fn formats(&self) -> Vec<FloatFormat> {
        let mut out = vec![self.storage, self.predictor, self.picard, self.corrector];
        out.sort();
        out.dedup();
        out
    }

    /// Narrowest format taking part in a run of a linear or nonlinear system.
    pub fn narrowest(&self, uses_picard: bool) -> FloatFormat {
        let mut fmt = self.storage.min(self.predictor).min(self.corrector);
        if uses_picard {
            fmt = fmt.min(self.picard);
        }
        fmt
    }
}

impl fmt::Display for PrecisionConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "storage={} predictor={} picard={} corrector={}",
            self.storage, self.predictor, self.picard, self.corrector
        )
    }
}

/// Scalar type a kernel computes in.
pub trait Real:
    Copy
    + Send
    + Sync
    + fmt::Debug
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Sum
    + 'static
{
    const FORMAT: FloatFormat;

    /// Rounds an `f64` into this format.
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;

    #[inline]
    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    #[inline]
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    #[inline]
    fn half() -> Self {
        Self::from_f64(0.5)
    }
    #[inline]
    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }
    /// NaN-propagating maximum.
    #[inline]
    fn max_of(self, other: Self) -> Self {
        if self.is_nan() || other.is_nan() {
            return Self::from_f64(f64::NAN);
        }
        if other > self {
            other
        } else {
            self
        }
    }
    #[inline]
    fn is_finite(self) -> bool {
        self.to_f64().is_finite()
    }
    #[inline]
    fn is_nan(self) -> bool {
        self.to_f64().is_nan()
    }
    #[inline]
    fn cast<U: Real>(self) -> U {
        U::from_f64(self.to_f64())
    }
}

impl Real for f64 {
    const FORMAT: FloatFormat = FloatFormat::Fp64;
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

impl Real for f32 {
    const FORMAT: FloatFormat = FloatFormat::Fp32;
    #[inline]
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
    #[inline]
    fn sqrt(self) -> Self {
        f32::sqrt(self)
    }
}

macro_rules! emulated_real {
    ($(#[$meta:meta])* $name:ident, $fmt:expr) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Default, PartialEq, PartialOrd)]
        pub struct $name(f32);

        impl $name {
            #[inline]
            fn wrap(x: f64) -> Self {
                $name(round_to_format(x, $fmt) as f32)
            }

            #[inline]
            fn wrap32(x: f32) -> Self {
                $name(round_f32_to_format(x, $fmt))
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({})", stringify!($name), self.0)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(&self.0, f)
            }
        }

        impl Add for $name {
            type Output = Self;
            #[inline]
            fn add(self, rhs: Self) -> Self {
                Self::wrap32(self.0 + rhs.0)
            }
        }
        impl Sub for $name {
            type Output = Self;
            #[inline]
            fn sub(self, rhs: Self) -> Self {
                Self::wrap32(self.0 - rhs.0)
            }
        }
        impl Mul for $name {
            type Output = Self;
            #[inline]
            fn mul(self, rhs: Self) -> Self {
                Self::wrap32(self.0 * rhs.0)
            }
        }
        impl Div for $name {
            type Output = Self;
            #[inline]
            fn div(self, rhs: Self) -> Self {
                Self::wrap32(self.0 / rhs.0)
            }
        }
        impl Neg for $name {
            type Output = Self;
            #[inline]
            fn neg(self) -> Self {
                $name(-self.0)
            }
        }
        impl AddAssign for $name {
            #[inline]
            fn add_assign(&mut self, rhs: Self) {
                *self = *self + rhs;
            }
        }
        impl SubAssign for $name {
            #[inline]
            fn sub_assign(&mut self, rhs: Self) {
                *self = *self - rhs;
            }
        }
        impl MulAssign for $name {
            #[inline]
            fn mul_assign(&mut self, rhs: Self) {
                *self = *self * rhs;
            }
        }
        impl Sum for $name {
            fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
                iter.fold($name(0.0), |acc, x| acc + x)
            }
        }

        impl Real for $name {
            const FORMAT: FloatFormat = $fmt;
            #[inline]
            fn from_f64(x: f64) -> Self {
                Self::wrap(x)
            }
            #[inline]
            fn to_f64(self) -> f64 {
                self.0 as f64
            }
            #[inline]
            fn sqrt(self) -> Self {
                Self::wrap32(self.0.sqrt())
            }
        }
    };
}

emulated_real!(
    /// IEEE binary16 emulated on `f32` arithmetic. `f32` carries at least
    /// `2p + 2` significand bits, so rounding its result once more gives the
    /// correctly rounded half-precision value.
    F16,
    FloatFormat::Fp16
);
emulated_real!(
    /// bfloat16 emulated on `f32` arithmetic, rounded after every operation.
    BF16,
    FloatFormat::Bf16
);

/// Total order helper for sorting values that are known to be finite.
pub fn cmp_finite(a: &f64, b: &f64) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}
