//! Scalar abstraction shared by the double-precision and multiprecision paths.
//!
//! Solvers that must resolve quantities far below `f64::EPSILON` (edge
//! scaling of the left tail, gap probabilities at large `z`) are written once
//! against [`Real`] and instantiated either with `f64` or with [`Mp`], an
//! MPFR float whose bit width is a const parameter. Keeping the width in the
//! type means literals can be created without a context and values can cross
//! rayon worker threads freely.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::{Float, Rational};

pub trait Real:
    Clone
    + Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    /// Decimal digits carried by the representation.
    const DIGITS: u32;

    fn from_f64(x: f64) -> Self;
    fn from_ratio(q: &Rational) -> Self;
    fn to_f64(&self) -> f64;

    fn sqrt(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn cos(&self) -> Self;
    fn acosh(&self) -> Self;
    fn abs(&self) -> Self;
    fn pi() -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn from_usize(n: usize) -> Self {
        Self::from_f64(n as f64)
    }
    /// Relative spacing of representable numbers near one.
    fn epsilon() -> Self {
        Self::from_f64(10f64.powi(-(Self::DIGITS as i32)))
    }
    fn is_finite(&self) -> bool {
        self.to_f64().is_finite() || self.to_f64() == 0.0
    }
    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Real for f64 {
    const DIGITS: u32 = 16;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_ratio(q: &Rational) -> Self {
        q.to_f64()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn acosh(&self) -> Self {
        f64::acosh(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

/// MPFR float with `BITS` bits of mantissa.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct Mp<const BITS: u32>(pub Float);

impl<const BITS: u32> Mp<BITS> {
    fn wrap(f: Float) -> Self {
        Mp(f)
    }
}

macro_rules! mp_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl<const BITS: u32> $tr for Mp<BITS> {
            type Output = Self;
            fn $m(mut self, rhs: Self) -> Self {
                self.0.$am(&rhs.0);
                self
            }
        }
        impl<const BITS: u32> $atr for Mp<BITS> {
            fn $am(&mut self, rhs: Self) {
                self.0.$am(&rhs.0);
            }
        }
    };
}

mp_binop!(Add, add, AddAssign, add_assign);
mp_binop!(Sub, sub, SubAssign, sub_assign);
mp_binop!(Mul, mul, MulAssign, mul_assign);
mp_binop!(Div, div, DivAssign, div_assign);

impl<const BITS: u32> Neg for Mp<BITS> {
    type Output = Self;
    fn neg(self) -> Self {
        Mp(-self.0)
    }
}

impl<const BITS: u32> Real for Mp<BITS> {
    // floor(BITS * log10(2)), minus a guard digit
    const DIGITS: u32 = (BITS as u64 * 30103 / 100000) as u32 - 1;

    fn from_f64(x: f64) -> Self {
        Self::wrap(Float::with_val(BITS, x))
    }
    fn from_ratio(q: &Rational) -> Self {
        Self::wrap(Float::with_val(BITS, q))
    }
    fn from_usize(n: usize) -> Self {
        Self::wrap(Float::with_val(BITS, n))
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn sqrt(&self) -> Self {
        Self::wrap(self.0.clone().sqrt())
    }
    fn ln(&self) -> Self {
        Self::wrap(self.0.clone().ln())
    }
    fn exp(&self) -> Self {
        Self::wrap(self.0.clone().exp())
    }
    fn cos(&self) -> Self {
        Self::wrap(self.0.clone().cos())
    }
    fn acosh(&self) -> Self {
        Self::wrap(self.0.clone().acosh())
    }
    fn abs(&self) -> Self {
        Self::wrap(self.0.clone().abs())
    }
    fn pi() -> Self {
        Self::wrap(Float::with_val(BITS, Constant::Pi))
    }
    fn epsilon() -> Self {
        Self::wrap(Float::with_val(BITS, 1u32) >> (BITS - 1))
    }
    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
}

/// ~36 significant digits.
pub type Mp128 = Mp<128>;
/// ~66 significant digits.
pub type Mp224 = Mp<224>;
/// ~104 significant digits.
pub type Mp352 = Mp<352>;

/// Largest decimal precision any instantiation supports.
pub const MAX_DIGITS: u32 = <Mp352 as Real>::DIGITS;

/// Arithmetic tier picked for a requested decimal precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tier {
    Double,
    Bits128,
    Bits224,
    Bits352,
}

impl Tier {
    /// `None` when `digits` exceeds [`MAX_DIGITS`].
    pub fn for_digits(digits: u32) -> Option<Tier> {
        if digits <= <f64 as Real>::DIGITS {
            Some(Tier::Double)
        } else if digits <= <Mp128 as Real>::DIGITS {
            Some(Tier::Bits128)
        } else if digits <= <Mp224 as Real>::DIGITS {
            Some(Tier::Bits224)
        } else if digits <= MAX_DIGITS {
            Some(Tier::Bits352)
        } else {
            None
        }
    }
}

/// Runs a generic computation with the scalar type chosen by [`Tier`].
///
/// `$f` is a path to a generic function taking the remaining arguments.
#[macro_export]
macro_rules! dispatch_tier {
    ($tier:expr, $f:ident ( $($arg:expr),* $(,)? )) => {
        match $tier {
            $crate::real::Tier::Double => $f::<f64>($($arg),*),
            $crate::real::Tier::Bits128 => $f::<$crate::real::Mp128>($($arg),*),
            $crate::real::Tier::Bits224 => $f::<$crate::real::Mp224>($($arg),*),
            $crate::real::Tier::Bits352 => $f::<$crate::real::Mp352>($($arg),*),
        }
    };
}

/// Horner evaluation of a coefficient slice (index = power).
pub fn horner<R: Real>(coeffs: &[R], x: &R) -> R {
    let mut acc = R::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x.clone() + c.clone();
    }
    acc
}
