//! Closed intervals with outward-rounded endpoints.
//!
//! Endpoint arithmetic is generic over [`Bound`]: floats detect inexact sums
//! and products with error-free transformations and then round outward,
//! rationals are exact. Either way the true value of an operation on members
//! of the operands lies in the result.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Float, Num, Signed, ToPrimitive};

use crate::scalar::f64_to_rational;

/// Interval endpoint type.
pub trait Bound: Clone + PartialOrd + Num + Neg<Output = Self> + Debug {
    /// A value `<= x`, covering any rounding error in the computation of `x`.
    fn round_down(self) -> Self;
    /// A value `>= x`, covering any rounding error in the computation of `x`.
    fn round_up(self) -> Self;
    fn from_rational_down(q: &BigRational) -> Self;
    fn from_rational_up(q: &BigRational) -> Self;
    /// Exact rational value of the endpoint.
    fn to_rational(&self) -> BigRational;
    /// Approximate value, used only for heuristics such as pivot choice.
    fn approx(&self) -> f64;

    fn add_down(a: Self, b: Self) -> Self {
        (a + b).round_down()
    }
    fn add_up(a: Self, b: Self) -> Self {
        (a + b).round_up()
    }
    fn mul_down(a: Self, b: Self) -> Self {
        (a * b).round_down()
    }
    fn mul_up(a: Self, b: Self) -> Self {
        (a * b).round_up()
    }
    fn sub_down(a: Self, b: Self) -> Self {
        Self::add_down(a, -b)
    }
    fn sub_up(a: Self, b: Self) -> Self {
        Self::add_up(a, -b)
    }
}

/// Round `r` towards the requested side given the error `exact - r`, if known.
fn directed<F: Float>(r: F, err: Option<F>, up: bool) -> F {
    if !r.is_finite() {
        return if up { F::infinity() } else { F::neg_infinity() };
    }
    match err {
        Some(e) if e.is_zero() => r,
        Some(e) if (e > F::zero()) != up => r,
        _ if up => widen_up(r),
        _ => widen_down(r),
    }
}

fn two_sum<F: Float>(a: F, b: F) -> (F, Option<F>) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err.is_finite().then_some(err))
}

fn two_prod<F: Float>(a: F, b: F) -> (F, Option<F>) {
    let p = a * b;
    // Below this the fused residual may itself be rounded.
    let tiny = F::min_positive_value() / F::epsilon() / F::epsilon();
    let err = a.mul_add(b, -p);
    let exact = p.is_zero() && (a.is_zero() || b.is_zero());
    if exact {
        return (p, Some(F::zero()));
    }
    (p, (p.abs() > tiny && err.is_finite()).then_some(err))
}

fn widen_down<F: Float>(x: F) -> F {
    if !x.is_finite() {
        return x;
    }
    x - (x.abs() * F::epsilon() + F::min_positive_value())
}

fn widen_up<F: Float>(x: F) -> F {
    if !x.is_finite() {
        return x;
    }
    x + (x.abs() * F::epsilon() + F::min_positive_value())
}

macro_rules! float_bound {
    ($t:ty) => {
        impl Bound for $t {
            fn round_down(self) -> Self {
                widen_down(self)
            }
            fn round_up(self) -> Self {
                widen_up(self)
            }
            fn from_rational_down(q: &BigRational) -> Self {
                let mut c = q.to_f64().unwrap_or(f64::NEG_INFINITY) as $t;
                while c.is_finite() && f64_to_rational(c as f64) > *q {
                    c = widen_down(c);
                }
                c
            }
            fn from_rational_up(q: &BigRational) -> Self {
                let mut c = q.to_f64().unwrap_or(f64::INFINITY) as $t;
                while c.is_finite() && f64_to_rational(c as f64) < *q {
                    c = widen_up(c);
                }
                c
            }
            fn to_rational(&self) -> BigRational {
                f64_to_rational(*self as f64)
            }
            fn approx(&self) -> f64 {
                *self as f64
            }
            fn add_down(a: Self, b: Self) -> Self {
                let (s, e) = two_sum(a, b);
                directed(s, e, false)
            }
            fn add_up(a: Self, b: Self) -> Self {
                let (s, e) = two_sum(a, b);
                directed(s, e, true)
            }
            fn mul_down(a: Self, b: Self) -> Self {
                let (p, e) = two_prod(a, b);
                directed(p, e, false)
            }
            fn mul_up(a: Self, b: Self) -> Self {
                let (p, e) = two_prod(a, b);
                directed(p, e, true)
            }
        }
    };
}

float_bound!(f64);
float_bound!(f32);

impl Bound for BigRational {
    fn round_down(self) -> Self {
        self
    }
    fn round_up(self) -> Self {
        self
    }
    fn from_rational_down(q: &BigRational) -> Self {
        q.clone()
    }
    fn from_rational_up(q: &BigRational) -> Self {
        q.clone()
    }
    fn to_rational(&self) -> BigRational {
        self.clone()
    }
    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

fn min2<T: PartialOrd>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

fn max2<T: PartialOrd>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

impl<T: Bound> Interval<T> {
    pub fn new(lo: T, hi: T) -> Self {
        debug_assert!(lo <= hi, "inverted interval {lo:?} > {hi:?}");
        Interval { lo, hi }
    }

    pub fn point(x: T) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    /// Smallest representable enclosure of a rational.
    pub fn from_rational(q: &BigRational) -> Self {
        Interval {
            lo: T::from_rational_down(q),
            hi: T::from_rational_up(q),
        }
    }

    pub fn from_rationals(lo: &BigRational, hi: &BigRational) -> Self {
        Interval {
            lo: T::from_rational_down(lo),
            hi: T::from_rational_up(hi),
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= T::zero() && self.hi >= T::zero()
    }

    pub fn contains(&self, x: &T) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    /// `self` lies in the open interior of `other`.
    pub fn strictly_inside(&self, other: &Self) -> bool {
        self.lo > other.lo && self.hi < other.hi
    }

    pub fn subset_of(&self, other: &Self) -> bool {
        self.lo >= other.lo && self.hi <= other.hi
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = max2(self.lo.clone(), other.lo.clone());
        let hi = min2(self.hi.clone(), other.hi.clone());
        (lo <= hi).then(|| Interval { lo, hi })
    }

    pub fn hull(&self, other: &Self) -> Self {
        Interval {
            lo: min2(self.lo.clone(), other.lo.clone()),
            hi: max2(self.hi.clone(), other.hi.clone()),
        }
    }

    pub fn width(&self) -> T {
        T::sub_up(self.hi.clone(), self.lo.clone())
    }

    /// A point of the interval near its centre.
    pub fn midpoint(&self) -> T {
        let two = T::one() + T::one();
        let m = self.lo.clone() + (self.hi.clone() - self.lo.clone()) / two;
        min2(max2(m, self.lo.clone()), self.hi.clone())
    }

    /// Upper bound of `|x|` over the interval.
    pub fn mag(&self) -> T {
        max2(-self.lo.clone(), self.hi.clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::point(c.clone()) * self.clone()
    }
}

impl<T: Bound> Add for Interval<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Interval {
            lo: T::add_down(self.lo, rhs.lo),
            hi: T::add_up(self.hi, rhs.hi),
        }
    }
}

impl<T: Bound> Sub for Interval<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Interval {
            lo: T::sub_down(self.lo, rhs.hi),
            hi: T::sub_up(self.hi, rhs.lo),
        }
    }
}

impl<T: Bound> Neg for Interval<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl<T: Bound> Mul for Interval<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let pairs = [
            (self.lo.clone(), rhs.lo.clone()),
            (self.lo.clone(), rhs.hi.clone()),
            (self.hi.clone(), rhs.lo.clone()),
            (self.hi, rhs.hi),
        ];
        let lo = pairs
            .iter()
            .map(|(a, b)| T::mul_down(a.clone(), b.clone()))
            .reduce(min2)
            .expect("four products");
        let hi = pairs
            .into_iter()
            .map(|(a, b)| T::mul_up(a, b))
            .reduce(max2)
            .expect("four products");
        Interval { lo, hi }
    }
}

/// Sign of a rational interval when it excludes zero.
pub fn strict_sign(iv: &Interval<BigRational>) -> Option<i8> {
    if iv.lo.is_positive() {
        Some(1)
    } else if iv.hi.is_negative() {
        Some(-1)
    } else {
        None
    }
}
