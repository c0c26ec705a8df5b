//! Dense bivariate polynomials and polynomial self-maps of the unit square.

use num_rational::BigRational;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::interval::{Bound, Interval};
use crate::scalar::{parse_rational, Scalar};
use crate::Rational;

/// `sum c[i][j] x^i y^j`. Rows index the power of `x`, columns the power of `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly2<T> {
    coeffs: Vec<Vec<T>>,
}

impl<T: Scalar> Poly2<T> {
    pub fn new(mut coeffs: Vec<Vec<T>>) -> Self {
        for row in coeffs.iter_mut() {
            while row.last().is_some_and(Zero::is_zero) {
                row.pop();
            }
        }
        while coeffs.last().is_some_and(Vec::is_empty) {
            coeffs.pop();
        }
        Poly2 { coeffs }
    }

    pub fn zero() -> Self {
        Poly2 { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![vec![c]])
    }

    pub fn x() -> Self {
        Self::new(vec![vec![], vec![T::one()]])
    }

    pub fn y() -> Self {
        Self::new(vec![vec![T::zero(), T::one()]])
    }

    pub fn coeffs(&self) -> &[Vec<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> T {
        self.coeffs
            .get(i)
            .and_then(|r| r.get(j))
            .cloned()
            .unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1 && self.coeffs.first().is_none_or(|r| r.len() <= 1)
    }

    /// Largest `i + j` with a nonzero coefficient; 0 for the zero polynomial.
    pub fn total_degree(&self) -> usize {
        self.terms().map(|(i, j, _)| i + j).max().unwrap_or(0)
    }

    /// Nonzero terms `(i, j, c)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.coeffs
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, c)| (i, j, c)))
            .filter(|(_, _, c)| !c.is_zero())
    }

    pub fn eval(&self, x: &T, y: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, row| {
            let inner = row
                .iter()
                .rev()
                .fold(T::zero(), |a, c| a * y.clone() + c.clone());
            acc * x.clone() + inner
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        let rows = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..rows)
            .map(|i| {
                let cols = self
                    .coeffs
                    .get(i)
                    .map_or(0, Vec::len)
                    .max(other.coeffs.get(i).map_or(0, Vec::len));
                (0..cols)
                    .map(|j| self.coeff(i, j) + other.coeff(i, j))
                    .collect()
            })
            .collect();
        Self::new(coeffs)
    }

    pub fn neg(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|r| r.iter().map(|c| -c.clone()).collect())
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let rows = self.coeffs.len() + other.coeffs.len() - 1;
        let cols = self.coeffs.iter().map(Vec::len).max().unwrap_or(0)
            + other.coeffs.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = vec![vec![T::zero(); cols]; rows];
        for (i, j, a) in self.terms() {
            for (k, l, b) in other.terms() {
                out[i + k][j + l] = out[i + k][j + l].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|r| r.iter().map(|a| a.clone() * c.clone()).collect())
                .collect(),
        )
    }

    pub fn d_dx(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, row)| row.iter().map(|c| c.clone() * small::<T>(i)).collect())
                .collect(),
        )
    }

    pub fn d_dy(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .skip(1)
                        .map(|(j, c)| c.clone() * small::<T>(j))
                        .collect()
                })
                .collect(),
        )
    }
}

fn small<T: Scalar>(n: usize) -> T {
    (0..n).fold(T::zero(), |acc, _| acc + T::one())
}

impl Poly2<Rational> {
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::new(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&c| BigRational::from_integer(c.into()))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn from_strs(rows: &[Vec<String>]) -> Result<Self> {
        rows.iter()
            .map(|r| {
                r.iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.coeffs
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect())
            .collect()
    }

    /// Outward-rounded coefficients for repeated interval evaluation.
    pub fn enclose<B: Bound>(&self) -> IntervalPoly2<B> {
        IntervalPoly2 {
            coeffs: self
                .coeffs
                .iter()
                .map(|r| r.iter().map(Interval::from_rational).collect())
                .collect(),
        }
    }
}

/// Bivariate polynomial with interval coefficients, evaluated by nested Horner.
#[derive(Clone, Debug)]
pub struct IntervalPoly2<B> {
    coeffs: Vec<Vec<Interval<B>>>,
}

impl<B: Bound> IntervalPoly2<B> {
    pub fn eval(&self, x: &Interval<B>, y: &Interval<B>) -> Interval<B> {
        let zero = Interval::point(B::zero());
        self.coeffs.iter().rev().fold(zero.clone(), |acc, row| {
            let inner = row
                .iter()
                .rev()
                .fold(zero.clone(), |a, c| a * y.clone() + c.clone());
            acc * x.clone() + inner
        })
    }
}

impl Serialize for Poly2<Rational> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Poly2<Rational> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(deserializer)?;
        Poly2::from_strs(&rows).map_err(D::Error::custom)
    }
}

/// Coordinate direction of the square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "1")]
    X,
    #[serde(rename = "2")]
    Y,
}

impl Axis {
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Axis::X),
            2 => Ok(Axis::Y),
            _ => Err(Error::InvalidArgument(format!(
                "axis must be 1 or 2, got {i}"
            ))),
        }
    }
}

/// A polynomial map `(x, y) -> (p1(x, y), p2(x, y))` on `Q = [0, 1]^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialMap2D {
    pub p1: Poly2<Rational>,
    pub p2: Poly2<Rational>,
}

impl PolynomialMap2D {
    pub fn new(p1: Poly2<Rational>, p2: Poly2<Rational>) -> Self {
        PolynomialMap2D { p1, p2 }
    }

    pub fn component(&self, axis: Axis) -> &Poly2<Rational> {
        match axis {
            Axis::X => &self.p1,
            Axis::Y => &self.p2,
        }
    }

    /// `p_axis - id_axis`, whose zero set is the curve `C_axis`.
    pub fn displacement(&self, axis: Axis) -> Poly2<Rational> {
        match axis {
            Axis::X => self.p1.sub(&Poly2::x()),
            Axis::Y => self.p2.sub(&Poly2::y()),
        }
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> (Rational, Rational) {
        (self.p1.eval(x, y), self.p2.eval(x, y))
    }
}
