//! Independent numerical oracles and random generators shared by the
//! integration and acceptance tests.

#![allow(dead_code)]

use mper_core::{IntMatrix, Integer, RationalPoly};
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Root approximation with an inclusion radius.
#[derive(Clone, Copy, Debug)]
pub struct RootDisk {
    pub z: Complex64,
    pub r: f64,
}

fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64, f64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    let mut mag = 0.0;
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
        mag = mag * z.norm() + a.abs();
    }
    (p, dp, mag)
}

/// Aberth–Ehrlich iteration followed by inclusion radii
/// `n |p(z_k)| / (|a_n| prod_{j != k} |z_k - z_j|)`; the union of the disks
/// holds every root and each connected component holds as many roots as disks.
pub fn aberth(coeffs: &[f64]) -> Vec<RootDisk> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n];
    let bound = 1.0
        + coeffs[..n]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(0.0, f64::max);
    let r0 = (coeffs[0] / lead)
        .abs()
        .powf(1.0 / n as f64)
        .clamp(1e-3, bound);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r0, std::f64::consts::TAU * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (p, dp, _) = horner(coeffs, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[k] -= w;
                moved = moved.max(w.norm() / (1.0 + z[k].norm()));
            }
        }
        if moved < 1e-16 {
            break;
        }
    }
    let gamma = 4.0 * (n as f64 + 1.0) * f64::EPSILON;
    (0..n)
        .map(|k| {
            let (p, _, mag) = horner(coeffs, z[k]);
            let prod: f64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).norm())
                .product();
            let r = n as f64 * (p.norm() + gamma * mag) / (lead.abs() * prod);
            RootDisk {
                z: z[k],
                r: r.max(1e-13 * (1.0 + z[k].norm())),
            }
        })
        .collect()
}

/// Connected components of overlapping disks.
pub fn disk_clusters(disks: &[RootDisk]) -> Vec<Vec<RootDisk>> {
    let mut label: Vec<usize> = (0..disks.len()).collect();
    let find = |label: &mut Vec<usize>, mut i: usize| {
        while label[i] != i {
            i = label[i];
        }
        i
    };
    for i in 0..disks.len() {
        for j in i + 1..disks.len() {
            if (disks[i].z - disks[j].z).norm() <= disks[i].r + disks[j].r {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<RootDisk>> = Default::default();
    for i in 0..disks.len() {
        let root = find(&mut label, i);
        groups.entry(root).or_default().push(disks[i]);
    }
    groups.into_values().collect()
}

/// `(inside, straddling, outside)` counts; roots at zero are stripped exactly first.
pub fn numeric_circle_counts(p: &RationalPoly) -> (usize, usize, usize) {
    let ints = p.primitive_integer();
    let zeros = ints.iter().take_while(|c| c.is_zero()).count();
    let c: Vec<f64> = ints[zeros..].iter().map(|c| c.to_f64().unwrap()).collect();
    let (mut inside, mut straddle, mut outside) = (zeros, 0, 0);
    for cluster in disk_clusters(&aberth(&c)) {
        let m = cluster.len();
        if cluster.iter().all(|d| d.z.norm() + d.r < 1.0) {
            inside += m;
        } else if cluster.iter().all(|d| d.z.norm() - d.r > 1.0) {
            outside += m;
        } else {
            straddle += m;
        }
    }
    (inside, straddle, outside)
}

/// Distinct real roots in the open interval `(lo, hi)` for a squarefree input,
/// or `None` when some disk is not isolated from the real axis or the endpoints.
pub fn numeric_real_roots(p: &RationalPoly, lo: f64, hi: f64) -> Option<usize> {
    let c: Vec<f64> = p
        .primitive_integer()
        .iter()
        .map(|c| c.to_f64().unwrap())
        .collect();
    let mut count = 0;
    for cluster in disk_clusters(&aberth(&c)) {
        if cluster.len() != 1 {
            return None;
        }
        let d = cluster[0];
        let conj_overlap = d.z.im.abs() <= d.r;
        if !conj_overlap {
            continue;
        }
        // A lone disk meeting its mirror image holds a real root.
        if d.z.re + d.r < hi && d.z.re - d.r > lo {
            count += 1;
        } else if !(d.z.re - d.r > hi || d.z.re + d.r < lo) {
            return None;
        }
    }
    Some(count)
}

pub fn random_int_poly<R: Rng>(rng: &mut R, max_degree: usize, coeff: i64) -> RationalPoly {
    loop {
        let deg = rng.gen_range(1..=max_degree);
        let mut c: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-coeff..=coeff)).collect();
        if c[deg] == 0 {
            c[deg] = if rng.gen_bool(0.5) { 1 } else { -1 };
        }
        let p = RationalPoly::from_ints(&c);
        if !p.is_constant() {
            return p;
        }
    }
}

/// Product of integer factors whose unit-circle roots are known: cyclotomic
/// pieces, reciprocal pairs `(a x - b)(b x - a)` and an optional root at zero.
/// Returns the polynomial and its `(inside, on, outside)` counts.
pub fn random_self_inversive<R: Rng>(rng: &mut R) -> (RationalPoly, (usize, usize, usize)) {
    let circle: [&[i64]; 5] = [&[1, 1], &[-1, 1], &[1, 0, 1], &[1, 1, 1], &[1, -1, 1]];
    let mut p = RationalPoly::from_ints(&[1]);
    let (mut inside, mut on, mut outside) = (0, 0, 0);
    let factors = rng.gen_range(1..=3);
    for _ in 0..factors {
        let f = circle[rng.gen_range(0..circle.len())];
        on += f.len() - 1;
        p = p * RationalPoly::from_ints(f);
    }
    for _ in 0..rng.gen_range(0..=2) {
        let a = rng.gen_range(1..=4i64);
        let b = a + rng.gen_range(1..=3i64);
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        // roots sign*b/a (outside) and sign*a/b (inside)
        p = p * RationalPoly::from_ints(&[-sign * b, a]) * RationalPoly::from_ints(&[-sign * a, b]);
        inside += 1;
        outside += 1;
    }
    (p, (inside, on, outside))
}

/// Products of elementary operations with multipliers in `[-3, 3]`, and the inverse.
pub fn random_unimodular<R: Rng>(rng: &mut R, dim: usize, ops: usize) -> (IntMatrix, IntMatrix) {
    let mut s = IntMatrix::identity(dim);
    let mut s_inv = IntMatrix::identity(dim);
    for _ in 0..ops {
        let i = rng.gen_range(0..dim);
        let mut j = rng.gen_range(0..dim - 1);
        if j >= i {
            j += 1;
        }
        let k = rng.gen_range(-3..=3i64);
        // S <- E S with E = I + k e_i e_j^T; S^{-1} <- S^{-1} E^{-1}
        s.add_row_multiple(i, j, &Integer::from(k));
        s_inv.add_col_multiple(j, i, &Integer::from(-k));
    }
    (s, s_inv)
}

fn rat(n: i64, d: i64) -> mper_core::Rational {
    mper_core::Rational::new(n.into(), d.into())
}

/// Integer bivariate polynomial of total degree at most `deg`.
pub fn random_poly2<R: Rng>(rng: &mut R, deg: usize, coeff: i64) -> mper_core::RationalPoly2 {
    let rows: Vec<Vec<mper_core::Rational>> = (0..=deg)
        .map(|i| {
            (0..=deg - i)
                .map(|_| rat(rng.gen_range(-coeff..=coeff), 1))
                .collect()
        })
        .collect();
    mper_core::RationalPoly2::new(rows)
}

/// A random map of degree at most 3 meant to map the square into
/// `[1/16, 15/16]^2`. Half the draws are rescaled random polynomials, the
/// other half coupled cubic folds `1/2 + a u - 4a u^3 + c u v` (`u`, `v`
/// centred coordinates) that often carry three or more fixed points. Callers
/// still check the interior precondition, the construction is not a proof.
pub fn random_interior_map<R: Rng>(rng: &mut R) -> mper_core::PolynomialMap2D {
    if rng.gen_bool(0.5) {
        let x = mper_core::RationalPoly2::new(vec![vec![rat(-1, 2)], vec![rat(1, 1)]]);
        let y = mper_core::RationalPoly2::new(vec![vec![rat(-1, 2), rat(1, 1)]]);
        let fold = |u: &mper_core::RationalPoly2, v: &mper_core::RationalPoly2, rng: &mut R| {
            let a = rat(rng.gen_range(60..=210), 100);
            let c = rat(rng.gen_range(-8..=8), 100);
            let u3 = u.mul(u).mul(u);
            u.scale(&a)
                .sub(&u3.scale(&(a.clone() * rat(4, 1))))
                .add(&u.mul(v).scale(&c))
                .add(&mper_core::RationalPoly2::constant(rat(1, 2)))
        };
        let p1 = fold(&x, &y, rng);
        let p2 = fold(&y, &x, rng);
        return mper_core::PolynomialMap2D::new(p1, p2);
    }
    let deg = rng.gen_range(1..=3);
    let comp = |rng: &mut R| {
        let q = random_poly2(rng, deg, 9);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..=32 {
            for j in 0..=32 {
                let v = q.eval(&rat(i, 32), &rat(j, 32)).to_f64().unwrap();
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        let half = ((hi - lo) / 2.0 * 1.1).max(1e-3);
        let center = (hi + lo) / 2.0;
        let scale = rat((7.0 / 16.0 / half * 4096.0).round() as i64, 4096);
        let shift = rat(1, 2) - rat((center * 4096.0).round() as i64, 4096) * &scale;
        q.scale(&scale)
            .add(&mper_core::RationalPoly2::constant(shift))
    };
    let p1 = comp(rng);
    let p2 = comp(rng);
    mper_core::PolynomialMap2D::new(p1, p2)
}
