use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};
use twofloat::TwoFloat;

/// Scalar type the solver is generic over.
///
/// `f64` is the default; [`Ext`] provides the software extended-precision
/// mode needed when the boundary systems of high Fourier modes become too
/// ill-conditioned for double precision.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + core::fmt::Debug + Send + Sync + 'static
{
    /// Whether the type carries more precision than IEEE double.
    /// Drives the hard-error policy for ill-conditioned boundary systems.
    const EXTENDED: bool;

    /// Conversion from f64 (named to avoid clashing with `FromPrimitive`).
    fn of_f64(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 representable in scalar type")
    }

    /// Conversion to f64 (named to avoid clashing with `ToPrimitive`).
    fn as_f64(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).expect("scalar convertible to f64")
    }

    fn of_usize(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize representable in scalar type")
    }
}

impl Scalar for f32 {
    const EXTENDED: bool = false;
}

impl Scalar for f64 {
    const EXTENDED: bool = false;
}

/// Extended-precision scalar: double-double arithmetic (≈32 significant
/// digits) wrapping [`twofloat::TwoFloat`].
///
/// The wrapper exists because the underlying crate's `TwoFloat / TwoFloat`
/// (and `f64 / TwoFloat`) compute the reciprocal residual as a plain
/// multiply-then-subtract instead of a fused multiply-add, which discards the
/// product rounding error and caps division accuracy at ordinary double
/// precision. [`Ext`]'s division divides by the high word (the accurate
/// `TwoFloat / f64` path) and then applies one double-double residual
/// correction, restoring full ~1e-32 relative accuracy.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct Ext(pub TwoFloat);

impl Ext {
    #[inline]
    pub fn hi(self) -> f64 {
        self.0.hi()
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.0.lo()
    }
}

impl From<f64> for Ext {
    #[inline]
    fn from(x: f64) -> Self {
        Ext(dd(x))
    }
}

#[inline]
fn dd(x: f64) -> TwoFloat {
    <TwoFloat as From<f64>>::from(x)
}

/// Full-precision double-double division.
///
/// `a / b.hi()` is accurate (the underlying Algorithm 15 path); a single
/// residual step `q += (a - q*b) / b.hi()` then removes the O(u) error from
/// ignoring `b.lo()`, leaving a relative error of O(u²).
#[inline]
fn div_dd(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q0 = a / b.hi();
    let r = a - q0 * b;
    q0 + r.hi() / b.hi()
}

impl core::ops::Add for Ext {
    type Output = Ext;
    #[inline]
    fn add(self, rhs: Ext) -> Ext {
        Ext(self.0 + rhs.0)
    }
}

impl core::ops::Sub for Ext {
    type Output = Ext;
    #[inline]
    fn sub(self, rhs: Ext) -> Ext {
        Ext(self.0 - rhs.0)
    }
}

impl core::ops::Mul for Ext {
    type Output = Ext;
    #[inline]
    fn mul(self, rhs: Ext) -> Ext {
        Ext(self.0 * rhs.0)
    }
}

impl core::ops::Div for Ext {
    type Output = Ext;
    #[inline]
    fn div(self, rhs: Ext) -> Ext {
        Ext(div_dd(self.0, rhs.0))
    }
}

impl core::ops::Rem for Ext {
    type Output = Ext;
    #[inline]
    fn rem(self, rhs: Ext) -> Ext {
        self - (self / rhs).trunc() * rhs
    }
}

impl core::ops::Neg for Ext {
    type Output = Ext;
    #[inline]
    fn neg(self) -> Ext {
        Ext(-self.0)
    }
}

impl Zero for Ext {
    #[inline]
    fn zero() -> Self {
        Ext(dd(0.0))
    }
    #[inline]
    fn is_zero(&self) -> bool {
        self.0 == dd(0.0)
    }
}

impl One for Ext {
    #[inline]
    fn one() -> Self {
        Ext(dd(1.0))
    }
}

impl Num for Ext {
    type FromStrRadixErr = <f64 as Num>::FromStrRadixErr;
    fn from_str_radix(str: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(str, radix).map(|x| Ext(dd(x)))
    }
}

impl ToPrimitive for Ext {
    fn to_i64(&self) -> Option<i64> {
        self.0.to_i64()
    }
    fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
    fn to_f64(&self) -> Option<f64> {
        self.0.to_f64()
    }
}

impl FromPrimitive for Ext {
    fn from_i64(n: i64) -> Option<Self> {
        <TwoFloat as FromPrimitive>::from_i64(n).map(Ext)
    }
    fn from_u64(n: u64) -> Option<Self> {
        <TwoFloat as FromPrimitive>::from_u64(n).map(Ext)
    }
    // the underlying crate leaves `from_f64` at the num-traits default, which
    // round-trips through `to_i64` and truncates fractional values; convert
    // directly instead (every f64 is exactly representable)
    fn from_f64(n: f64) -> Option<Self> {
        Some(Ext(dd(n)))
    }
    fn from_f32(n: f32) -> Option<Self> {
        Some(Ext(dd(n as f64)))
    }
}

impl NumCast for Ext {
    fn from<T: ToPrimitive>(n: T) -> Option<Self> {
        <TwoFloat as NumCast>::from(n).map(Ext)
    }
}

macro_rules! ext_delegate_nullary {
    ($($f:ident),* $(,)?) => {
        $(#[inline] fn $f() -> Self { Ext(TwoFloat::$f()) })*
    };
}

macro_rules! ext_delegate_unary {
    ($($f:ident),* $(,)?) => {
        $(#[inline] fn $f(self) -> Self { Ext(self.0.$f()) })*
    };
}

macro_rules! ext_delegate_pred {
    ($($f:ident),* $(,)?) => {
        $(#[inline] fn $f(self) -> bool { self.0.$f() })*
    };
}

impl Float for Ext {
    ext_delegate_nullary!(
        nan,
        infinity,
        neg_infinity,
        neg_zero,
        min_value,
        min_positive_value,
        max_value,
    );
    ext_delegate_pred!(is_nan, is_infinite, is_finite, is_normal, is_sign_positive, is_sign_negative);
    ext_delegate_unary!(
        floor, ceil, round, trunc, fract, abs, signum, sqrt, exp, exp2, log10, cbrt,
        sin, cos, asin, acos, atan, exp_m1, ln_1p, sinh, cosh, tanh, asinh, acosh, atanh,
    );

    /// Full-precision natural logarithm.  The underlying crate's `ln` is only
    /// accurate to ~1e-20, which is not enough when the result feeds
    /// ill-conditioned boundary solves.  Reduce by an exact power of two and
    /// sum the atanh series in (m−1)/(m+1), which needs only the corrected
    /// ring operations.
    fn ln(self) -> Self {
        let x = self.hi();
        if !(x > 0.0) || x.is_infinite() {
            return Ext(self.0.ln()); // domain edges: delegate
        }
        // self = m · 2^e with m ∈ [1/√2, √2)
        let e = (x.ln() / core::f64::consts::LN_2).round();
        let m = self * Ext(dd((2.0f64).powi(-(e as i32))));
        let one = Self::one();
        let u = (m - one) / (m + one);
        let u2 = u * u;
        let mut term = u;
        let mut sum = u;
        let mut n = 1u32;
        // |u| ≤ 0.1716, so the series gains ≥ 1.5 digits per term
        while n < 99 {
            term = term * u2;
            n += 2;
            let add = term / Ext(dd(n as f64));
            sum = sum + add;
            if add.hi().abs() <= 1e-35 * sum.hi().abs() {
                break;
            }
        }
        sum * Ext(dd(2.0)) + Ext(dd(e)) * Self::LN_2()
    }

    #[inline]
    fn log2(self) -> Self {
        self.ln() / Self::LN_2()
    }

    #[inline]
    fn classify(self) -> core::num::FpCategory {
        self.0.classify()
    }

    #[inline]
    fn mul_add(self, a: Self, b: Self) -> Self {
        Ext(self.0.mul_add(a.0, b.0))
    }

    #[inline]
    fn recip(self) -> Self {
        Self::one() / self
    }

    #[inline]
    fn powi(self, n: i32) -> Self {
        if n < 0 {
            self.powi(n.wrapping_neg()).recip()
        } else {
            Ext(self.0.powi(n))
        }
    }

    #[inline]
    fn powf(self, n: Self) -> Self {
        Ext(self.0.powf(n.0))
    }

    #[inline]
    fn log(self, base: Self) -> Self {
        self.ln() / base.ln()
    }

    #[inline]
    fn max(self, other: Self) -> Self {
        Ext(self.0.max(other.0))
    }

    #[inline]
    fn min(self, other: Self) -> Self {
        Ext(self.0.min(other.0))
    }

    #[inline]
    fn abs_sub(self, other: Self) -> Self {
        (self - other).max(Self::zero())
    }

    #[inline]
    fn hypot(self, other: Self) -> Self {
        Ext(self.0.hypot(other.0))
    }

    #[inline]
    fn tan(self) -> Self {
        // the underlying tan divides internally; rebuild it from sin/cos
        self.sin() / self.cos()
    }

    #[inline]
    fn atan2(self, other: Self) -> Self {
        Ext(self.0.atan2(other.0))
    }

    #[inline]
    fn sin_cos(self) -> (Self, Self) {
        let (s, c) = self.0.sin_cos();
        (Ext(s), Ext(c))
    }

    #[inline]
    fn integer_decode(self) -> (u64, i16, i8) {
        self.0.integer_decode()
    }
}

macro_rules! ext_delegate_const {
    ($($f:ident),* $(,)?) => {
        $(#[inline] fn $f() -> Self { Ext(TwoFloat::$f()) })*
    };
}

impl FloatConst for Ext {
    ext_delegate_const!(
        E,
        FRAC_1_PI,
        FRAC_1_SQRT_2,
        FRAC_2_PI,
        FRAC_2_SQRT_PI,
        FRAC_PI_2,
        FRAC_PI_3,
        FRAC_PI_4,
        FRAC_PI_6,
        FRAC_PI_8,
        LN_10,
        LN_2,
        LOG10_E,
        LOG2_E,
        PI,
        SQRT_2,
    );
}

impl Scalar for Ext {
    const EXTENDED: bool = true;
}

/// Error-free transformation: `a + b` as rounded sum plus exact remainder.
#[inline]
pub fn two_sum<S: Scalar>(a: S, b: S) -> (S, S) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Error-free transformation: `a * b` as rounded product plus exact remainder
/// (requires a fused multiply-add, which all our scalar types provide).
#[inline]
pub fn two_prod<S: Scalar>(a: S, b: S) -> (S, S) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

/// Compensated Horner evaluation of `sum coeffs[i] * x^i`.
///
/// Runs the classic error-free-transformation variant: alongside the Horner
/// recursion it accumulates the exact rounding residue and folds it back in at
/// the end, giving results as if computed in roughly twice the working
/// precision.
pub fn compensated_horner<S: Scalar>(coeffs: &[S], x: S) -> S {
    let mut iter = coeffs.iter().rev();
    let mut r = match iter.next() {
        Some(&c) => c,
        None => return S::zero(),
    };
    let mut e = S::zero();
    for &c in iter {
        let (p, pe) = two_prod(r, x);
        let (s, se) = two_sum(p, c);
        r = s;
        e = e.mul_add(x, pe + se);
    }
    r + e
}
