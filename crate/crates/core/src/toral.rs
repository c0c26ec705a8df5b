//! Periodic point census of linear toral endomorphisms `x -> A x mod 1`.
//!
//! For a 2x2 integer matrix `A` the number of solutions of `A^n x = x` on the
//! torus is `|det(A^n - I)|` whenever that determinant is nonzero; Möbius
//! inversion over the divisors of `n` gives the points of exact period `n`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::homology::HomologyMatrix;
use crate::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixCount {
    Count(BigInt),
    /// `det(A^n - I) = 0`: the fixed set of `A^n` is a positive-dimensional subgroup.
    Degenerate,
}

impl FixCount {
    pub fn count(&self) -> Option<&BigInt> {
        match self {
            FixCount::Count(c) => Some(c),
            FixCount::Degenerate => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToralPeriodReport {
    pub matrix: HomologyMatrix,
    pub max_period: u64,
    /// Entry `n - 1` is `|det(A^n - I)|`, `None` when degenerate.
    #[serde(serialize_with = "serialize_counts")]
    pub fix_counts: Vec<Option<BigInt>>,
    /// Entry `n - 1` is the number of points of exact period `n`, `None` when
    /// some divisor level is degenerate.
    #[serde(serialize_with = "serialize_counts")]
    pub exact_period_counts: Vec<Option<BigInt>>,
    pub realized_periods: BTreeSet<u64>,
    pub degenerate_levels: BTreeSet<u64>,
}

fn serialize_counts<S: Serializer>(
    v: &[Option<BigInt>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let strs: Vec<Option<String>> = v
        .iter()
        .map(|c| c.as_ref().map(ToString::to_string))
        .collect();
    strs.serialize(s)
}

fn require_2x2(a: &HomologyMatrix) -> Result<()> {
    if a.dim() != 2 {
        return Err(Error::NotTwoByTwo(a.dim()));
    }
    Ok(())
}

fn fix_from_power(power: &IntMatrix) -> FixCount {
    let det = (power - &IntMatrix::identity(2)).determinant();
    if det.is_zero() {
        FixCount::Degenerate
    } else {
        FixCount::Count(det.abs())
    }
}

/// `|det(A^n - I)|`, or [`FixCount::Degenerate`].
pub fn fixed_point_count(a: &HomologyMatrix, n: u64) -> Result<FixCount> {
    require_2x2(a)?;
    if n == 0 {
        return Err(Error::ZeroIterate);
    }
    Ok(fix_from_power(a.power(n).matrix()))
}

/// Möbius function by trial division.
pub fn mobius(mut n: u64) -> i8 {
    assert!(n > 0, "mobius(0) is undefined");
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Number of points of exact period `n`: `sum_{d | n} mu(n/d) Fix(d)`.
pub fn exact_period_count(a: &HomologyMatrix, n: u64) -> Result<BigInt> {
    require_2x2(a)?;
    if n == 0 {
        return Err(Error::ZeroIterate);
    }
    let mut total = BigInt::zero();
    for d in divisors(n) {
        let mu = mobius(n / d);
        let fix = fixed_point_count(a, d)?;
        let c = fix.count().ok_or(Error::DegenerateLevel(d))?;
        if mu != 0 {
            total += c * BigInt::from(mu);
        }
    }
    Ok(total)
}

/// Census for all periods `1..=max_period`; degeneracy is reported in-band.
pub fn periods_up_to(a: &HomologyMatrix, max_period: u64) -> Result<ToralPeriodReport> {
    require_2x2(a)?;
    if max_period == 0 {
        return Err(Error::ZeroIterate);
    }
    let mut fix_counts = Vec::with_capacity(max_period as usize);
    let mut power = IntMatrix::identity(2);
    for _ in 0..max_period {
        power = &power * a.matrix();
        fix_counts.push(fix_from_power(&power).count().cloned());
    }
    let degenerate_levels: BTreeSet<u64> = (1..=max_period)
        .filter(|&n| fix_counts[n as usize - 1].is_none())
        .collect();
    let exact_period_counts: Vec<Option<BigInt>> = (1..=max_period)
        .map(|n| {
            let mut total = BigInt::zero();
            for d in divisors(n) {
                let c = fix_counts[d as usize - 1].as_ref()?;
                let mu = mobius(n / d);
                if mu != 0 {
                    total += c * BigInt::from(mu);
                }
            }
            Some(total)
        })
        .collect();
    let realized_periods = (1..=max_period)
        .filter(|&n| {
            exact_period_counts[n as usize - 1]
                .as_ref()
                .is_some_and(|c| c.is_positive())
        })
        .collect();
    Ok(ToralPeriodReport {
        matrix: a.clone(),
        max_period,
        fix_counts,
        exact_period_counts,
        realized_periods,
        degenerate_levels,
    })
}
