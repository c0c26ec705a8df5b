//! Exact counts of polynomial roots inside, on and outside the unit circle.
//!
//! Pipeline per squarefree factor `f`:
//! 1. strip a root at zero (counted inside);
//! 2. split `f = s * q` with `s = gcd(f, reciprocal(f))` holding every
//!    unit-circle root and every reciprocal pair `(l, 1/l)`;
//! 3. count circle roots of `s` through the substitution `z = x + 1/x` and a
//!    Sturm count on `(-2, 2)`, the remaining roots of `s` splitting evenly;
//! 4. count roots of `q` in the open disk by a Cayley transform to the left
//!    half-plane and a Routh table over exact rationals.

use std::ops::{Add, Mul, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::RationalPoly;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct UnitCircleCount {
    #[serde(rename = "inside")]
    pub n_in: usize,
    #[serde(rename = "on")]
    pub n_on: usize,
    #[serde(rename = "outside")]
    pub n_out: usize,
}

impl UnitCircleCount {
    pub fn new(n_in: usize, n_on: usize, n_out: usize) -> Self {
        UnitCircleCount { n_in, n_on, n_out }
    }

    pub fn total(&self) -> usize {
        self.n_in + self.n_on + self.n_out
    }

    fn scaled(self, k: usize) -> Self {
        UnitCircleCount::new(self.n_in * k, self.n_on * k, self.n_out * k)
    }
}

impl Add for UnitCircleCount {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        UnitCircleCount::new(
            self.n_in + rhs.n_in,
            self.n_on + rhs.n_on,
            self.n_out + rhs.n_out,
        )
    }
}

/// Result of [`self_inversive_split`]: `f = x^[zero_root] * s * q`.
#[derive(Clone, Debug, PartialEq)]
pub struct SelfInversiveSplit {
    pub zero_root: bool,
    pub s: RationalPoly,
    pub q: RationalPoly,
}

/// Root counts relative to the unit circle, with multiplicity.
pub fn unit_circle_counts(p: &RationalPoly) -> Result<UnitCircleCount> {
    match p.degree() {
        None => return Err(Error::ZeroPolynomial),
        Some(0) => return Err(Error::ConstantPolynomial),
        _ => {}
    }
    let mut total = UnitCircleCount::default();
    for (f, mult) in p.squarefree_decomposition()?.factors {
        total = total + squarefree_counts(&f)?.scaled(mult);
    }
    debug_assert_eq!(total.total(), p.degree().unwrap_or(0));
    Ok(total)
}

fn squarefree_counts(f: &RationalPoly) -> Result<UnitCircleCount> {
    let split = self_inversive_split(f)?;
    let mut counts = UnitCircleCount::default();
    if split.zero_root {
        counts.n_in += 1;
    }
    let deg_s = split.s.degree().unwrap_or(0);
    let on = on_circle_count(&split.s)?;
    let paired = (deg_s - on) / 2;
    counts.n_on += on;
    counts.n_in += paired;
    counts.n_out += paired;
    if !split.q.is_constant() {
        let deg_q = split.q.degree().unwrap_or(0);
        let inside = inside_disk_count(&split.q)?;
        counts.n_in += inside;
        counts.n_out += deg_q - inside;
    }
    Ok(counts)
}

/// Split a squarefree polynomial into its self-inversive part and cofactor.
pub fn self_inversive_split(f: &RationalPoly) -> Result<SelfInversiveSplit> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut f = f.monic();
    let zero_root = f.coeff(0).is_zero();
    if zero_root {
        f = f.exact_div(&RationalPoly::x()).expect("x divides f");
        if f.coeff(0).is_zero() {
            return Err(Error::InvalidArgument("input is not squarefree".into()));
        }
    }
    let s = f.gcd(&f.reciprocal())?;
    let q = f.exact_div(&s).expect("gcd divides f");
    Ok(SelfInversiveSplit { zero_root, s, q })
}

fn is_self_inversive(s: &RationalPoly) -> bool {
    !s.coeff(0).is_zero() && s.reciprocal().monic() == s.monic()
}

/// Number of roots of modulus one of a squarefree self-inversive polynomial.
pub fn on_circle_count(s: &RationalPoly) -> Result<usize> {
    if s.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if s.is_constant() {
        return Ok(0);
    }
    if !is_self_inversive(s) {
        return Err(Error::NotSelfInversive);
    }
    let mut rest = s.monic();
    let mut count = 0;
    for root in [1i64, -1] {
        let lin = RationalPoly::linear_root(BigRational::from_integer(root.into()));
        if let Some(q) = rest.exact_div(&lin) {
            rest = q;
            count += 1;
        }
    }
    if rest.is_constant() {
        return Ok(count);
    }
    let deg = rest.degree().unwrap_or(0);
    if !deg.is_multiple_of(2) || rest.coeff(0) != *rest.leading().expect("nonzero") {
        // A self-inversive polynomial without roots at +-1 is palindromic of even degree.
        return Err(Error::NotSelfInversive);
    }
    let u = joukowski_reduce(&rest);
    let two = BigRational::from_integer(2.into());
    Ok(count + 2 * u.sturm_count(&-two.clone(), &two)?)
}

/// For palindromic `r` of degree `2m`, the degree-`m` polynomial `u` with
/// `r(x) = x^m u(x + 1/x)`.
pub fn joukowski_reduce(r: &RationalPoly) -> RationalPoly {
    let m = r.degree().unwrap_or(0) / 2;
    // v_k(z) expresses x^k + x^-k; v_0 is taken as 1 so that the middle
    // coefficient is counted once.
    let z = RationalPoly::x();
    let two = RationalPoly::constant(BigRational::from_integer(2.into()));
    let mut u = RationalPoly::constant(r.coeff(m));
    let (mut prev, mut cur) = (two, z.clone());
    for k in 1..=m {
        u = &u + &cur.scale(&r.coeff(m + k));
        let next = &(&z * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    u
}

/// Number of roots of modulus strictly below one of a squarefree polynomial
/// without unit-circle roots.
pub fn inside_disk_count(q: &RationalPoly) -> Result<usize> {
    let n = match q.degree() {
        None => return Err(Error::ZeroPolynomial),
        Some(n) => n,
    };
    if n == 0 {
        return Ok(0);
    }
    let mut q = q.clone();
    let mut zeros = 0;
    while q.coeff(0).is_zero() {
        q = q.exact_div(&RationalPoly::x()).expect("x divides q");
        zeros += 1;
    }
    let n = q.degree().unwrap_or(0);
    if n == 0 {
        return Ok(zeros);
    }
    let w = cayley_transform(&q);
    if w.degree() != Some(n) {
        return Err(Error::CircleRootLeaked);
    }
    let table = routh_count(&w)?;
    if table.used_auxiliary {
        // A zero row comes from roots symmetric about the origin in w, i.e.
        // reciprocal pairs or circle roots in z. Only the former is sound here.
        let s = q.gcd(&q.reciprocal())?;
        if on_circle_count(&s)? > 0 {
            return Err(Error::CircleRootLeaked);
        }
    }
    Ok(zeros + n - table.right_half_plane)
}

/// `(1 - w)^n q((1 + w) / (1 - w))`: maps roots in the open unit disk to the
/// open left half-plane.
pub fn cayley_transform(q: &RationalPoly) -> RationalPoly {
    let n = q.degree().unwrap_or(0);
    let plus = RationalPoly::from_ints(&[1, 1]);
    let minus = RationalPoly::from_ints(&[1, -1]);
    let mut out = RationalPoly::zero();
    for (k, a) in q.coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let term = &plus.pow(k as u32) * &minus.pow((n - k) as u32);
        out = &out + &term.scale(a);
    }
    out
}

/// Outcome of a Routh tabulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RouthOutcome {
    /// Sign changes in the first column: roots with positive real part when
    /// no roots lie on the imaginary axis.
    pub right_half_plane: usize,
    /// True when a zero row forced the auxiliary-polynomial substitution.
    pub used_auxiliary: bool,
    /// True when a zero leading element was replaced by an infinitesimal.
    pub used_epsilon: bool,
}

/// Routh table over `Q(eps)`. Zero leading elements become `eps -> 0+`; zero
/// rows are replaced by the derivative of the auxiliary polynomial.
pub fn routh_count(p: &RationalPoly) -> Result<RouthOutcome> {
    let n = p.degree().ok_or(Error::ZeroPolynomial)?;
    let width = n / 2 + 1;
    let coeff = |k: isize| -> RatFn {
        if k < 0 {
            RatFn::zero()
        } else {
            RatFn::constant(p.coeff(k as usize))
        }
    };
    let mut rows: Vec<Vec<RatFn>> = Vec::with_capacity(n + 1);
    rows.push(
        (0..width)
            .map(|j| coeff(n as isize - 2 * j as isize))
            .collect(),
    );
    if n >= 1 {
        rows.push(
            (0..width)
                .map(|j| coeff(n as isize - 1 - 2 * j as isize))
                .collect(),
        );
    }
    let mut used_auxiliary = false;
    let mut used_epsilon = false;
    let mut i = 1;
    while i <= n {
        if rows[i].iter().all(RatFn::is_zero) {
            // Auxiliary polynomial from the previous row has degree n - i + 1.
            used_auxiliary = true;
            let d = (n - i + 1) as i64;
            let prev = rows[i - 1].clone();
            rows[i] = (0..width)
                .map(|j| {
                    let factor = d - 2 * j as i64;
                    if factor <= 0 {
                        RatFn::zero()
                    } else {
                        prev[j].scale(&BigRational::from_integer(factor.into()))
                    }
                })
                .collect();
            if rows[i].iter().all(RatFn::is_zero) {
                return Err(Error::DegenerateRouth("auxiliary derivative vanished"));
            }
        }
        if rows[i][0].is_zero() {
            used_epsilon = true;
            rows[i][0] = RatFn::epsilon();
        }
        if i == n {
            break;
        }
        let (a, b) = (&rows[i - 1], &rows[i]);
        let next: Vec<RatFn> = (0..width)
            .map(|j| {
                let hi_a = a.get(j + 1).cloned().unwrap_or_else(RatFn::zero);
                let hi_b = b.get(j + 1).cloned().unwrap_or_else(RatFn::zero);
                (b[0].clone() * hi_a - a[0].clone() * hi_b).div(&b[0])
            })
            .collect();
        rows.push(next);
        i += 1;
    }
    let signs: Vec<i8> = rows.iter().map(|r| r[0].sign_at_zero_plus()).collect();
    if signs.contains(&0) {
        return Err(Error::DegenerateRouth("zero in first column"));
    }
    let right_half_plane = signs.windows(2).filter(|w| w[0] != w[1]).count();
    Ok(RouthOutcome {
        right_half_plane,
        used_auxiliary,
        used_epsilon,
    })
}

/// Rational function in the infinitesimal `eps`.
#[derive(Clone, Debug, PartialEq)]
struct RatFn {
    num: RationalPoly,
    den: RationalPoly,
}

impl RatFn {
    fn zero() -> Self {
        RatFn {
            num: RationalPoly::zero(),
            den: RationalPoly::one(),
        }
    }

    fn constant(c: BigRational) -> Self {
        RatFn {
            num: RationalPoly::constant(c),
            den: RationalPoly::one(),
        }
    }

    fn epsilon() -> Self {
        RatFn {
            num: RationalPoly::x(),
            den: RationalPoly::one(),
        }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn scale(&self, c: &BigRational) -> Self {
        RatFn {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
        .reduced()
    }

    fn reduced(self) -> Self {
        if self.num.is_zero() {
            return Self::zero();
        }
        if self.den.is_constant() {
            let c = BigRational::one() / self.den.coeff(0);
            return RatFn {
                num: self.num.scale(&c),
                den: RationalPoly::one(),
            };
        }
        let g = self.num.gcd(&self.den).expect("nonzero");
        let num = self.num.exact_div(&g).expect("divides");
        let den = self.den.exact_div(&g).expect("divides");
        let lc = den.leading().cloned().expect("nonzero");
        let inv = BigRational::one() / lc;
        RatFn {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    fn div(self, rhs: &Self) -> Self {
        RatFn {
            num: &self.num * &rhs.den,
            den: &self.den * &rhs.num,
        }
        .reduced()
    }

    /// Sign of the limit as `eps -> 0+`.
    fn sign_at_zero_plus(&self) -> i8 {
        fn low_sign(p: &RationalPoly) -> i8 {
            match p.coeffs().iter().find(|c| !c.is_zero()) {
                Some(c) if c.is_positive() => 1,
                Some(_) => -1,
                None => 0,
            }
        }
        low_sign(&self.num) * low_sign(&self.den)
    }
}

impl Sub for RatFn {
    type Output = RatFn;
    fn sub(self, rhs: RatFn) -> RatFn {
        RatFn {
            num: &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        }
        .reduced()
    }
}

impl Mul for RatFn {
    type Output = RatFn;
    fn mul(self, rhs: RatFn) -> RatFn {
        RatFn {
            num: &self.num * &rhs.num,
            den: &self.den * &rhs.den,
        }
        .reduced()
    }
}
