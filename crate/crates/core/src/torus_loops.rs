//! Signed intersection numbers of piecewise-linear loops on the flat torus
//! `R^2 / Z^2`, computed exactly over the rationals.
//!
//! Each edge is lifted by its shortest displacement, with components reduced
//! into `(-1/2, 1/2]`; the sign of a transversal crossing is the sign of
//! `det(edge of sigma, edge of tau)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, rational_to_f64};
use crate::Rational;

pub type Point = (Rational, Rational);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlLoop {
    vertices: Vec<Point>,
    deltas: Vec<Point>,
}

fn frac(q: &Rational) -> Rational {
    q - q.floor()
}

/// Representative of `q mod 1` in `(-1/2, 1/2]`.
fn centered(q: &Rational) -> Rational {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let f = frac(q);
    if f > half {
        f - BigRational::one()
    } else {
        f
    }
}

impl PlLoop {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let vertices: Vec<Point> = vertices.iter().map(|(x, y)| (frac(x), frac(y))).collect();
        let n = vertices.len();
        if n < 2 {
            return Err(Error::InvalidLoop("needs at least two vertices".into()));
        }
        let deltas: Vec<Point> = (0..n)
            .map(|i| {
                let (a, b) = (&vertices[i], &vertices[(i + 1) % n]);
                (centered(&(&b.0 - &a.0)), centered(&(&b.1 - &a.1)))
            })
            .collect();
        if deltas.iter().any(|(dx, dy)| dx.is_zero() && dy.is_zero()) {
            return Err(Error::InvalidLoop("zero-length edge".into()));
        }
        Ok(PlLoop { vertices, deltas })
    }

    pub fn from_strs(vertices: &[[String; 2]]) -> Result<Self> {
        let pts = vertices
            .iter()
            .map(|[x, y]| Ok((parse_rational(x)?, parse_rational(y)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(pts)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Homology class `(m, n)`: total lifted displacement.
    pub fn homology_class(&self) -> (BigInt, BigInt) {
        let (sx, sy) = self.deltas.iter().fold(
            (Rational::zero(), Rational::zero()),
            |(sx, sy), (dx, dy)| (sx + dx, sy + dy),
        );
        (sx.to_integer(), sy.to_integer())
    }

    pub fn translated(&self, dx: &Rational, dy: &Rational) -> Result<Self> {
        Self::new(
            self.vertices
                .iter()
                .map(|(x, y)| (x + dx, y + dy))
                .collect(),
        )
    }

    /// Straight loop of class `(m, n)` through `base`, split into
    /// `2 max(|m|, |n|) + 1` equal edges.
    pub fn straight(m: i64, n: i64, base: Point) -> Result<Self> {
        if m == 0 && n == 0 {
            return Err(Error::InvalidLoop(
                "class (0, 0) has no straight representative".into(),
            ));
        }
        let steps = 2 * m.abs().max(n.abs()) + 1;
        let step = (
            BigRational::new(m.into(), steps.into()),
            BigRational::new(n.into(), steps.into()),
        );
        let vertices = (0..steps)
            .map(|k| {
                let k = BigRational::from_integer(k.into());
                (&base.0 + &step.0 * &k, &base.1 + &step.1 * &k)
            })
            .collect();
        Self::new(vertices)
    }
}

/// Horizontal loop `a` at height 1/3 and vertical loop `b` at abscissa 1/3.
pub fn basis_loops() -> (PlLoop, PlLoop) {
    let third = BigRational::new(1.into(), 3.into());
    let half = BigRational::new(1.into(), 2.into());
    let zero = Rational::zero();
    let a = PlLoop::new(vec![
        (zero.clone(), third.clone()),
        (half.clone(), third.clone()),
    ])
    .expect("valid");
    let b = PlLoop::new(vec![(third.clone(), zero), (third, half)]).expect("valid");
    (a, b)
}

fn cross(a: &Point, b: &Point) -> Rational {
    &a.0 * &b.1 - &a.1 * &b.0
}

fn dot(a: &Point, b: &Point) -> Rational {
    &a.0 * &b.0 + &a.1 * &b.1
}

/// Crossing sign of edge `p + [0,1] d1` against the translate of `q + [0,1] d2` by `k`.
fn edge_pair(p: &Point, d1: &Point, q: &Point, d2: &Point, k: (i64, i64)) -> Result<i64> {
    let zero = Rational::zero();
    let one = Rational::one();
    let det = cross(d1, d2);
    let r = (
        &q.0 + BigRational::from_integer(k.0.into()) - &p.0,
        &q.1 + BigRational::from_integer(k.1.into()) - &p.1,
    );
    if det.is_zero() {
        if !cross(&r, d1).is_zero() {
            return Ok(0);
        }
        // Collinear: any overlap of parameter ranges is degenerate.
        let len2 = dot(d1, d1);
        let t0 = dot(&r, d1) / &len2;
        let t1 = dot(&(&r.0 + &d2.0, &r.1 + &d2.1), d1) / &len2;
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        if hi >= zero && lo <= one {
            return Err(Error::DegenerateConfiguration);
        }
        return Ok(0);
    }
    // p + a d1 = q + k + b d2
    let a = cross(&r, d2) / &det;
    let b = cross(&r, d1) / &det;
    if a < zero || a > one || b < zero || b > one {
        return Ok(0);
    }
    if a == zero || a == one || b == zero || b == one {
        return Err(Error::DegenerateConfiguration);
    }
    Ok(if det.is_positive() { 1 } else { -1 })
}

/// Float endpoints of an edge.
fn edge_f64(p: &Point, d: &Point) -> [f64; 4] {
    let (x0, y0) = (rational_to_f64(&p.0), rational_to_f64(&p.1));
    [
        x0,
        y0,
        x0 + rational_to_f64(&d.0),
        y0 + rational_to_f64(&d.1),
    ]
}

/// True when float evaluation already shows the segments are disjoint,
/// with a margin far above rounding error.
fn clearly_apart(s: [f64; 4], t: [f64; 4]) -> bool {
    const EPS: f64 = 1e-9;
    let orient =
        |e: [f64; 4], x: f64, y: f64| (e[2] - e[0]) * (y - e[1]) - (e[3] - e[1]) * (x - e[0]);
    let separates = |e: [f64; 4], f: [f64; 4]| {
        let (a, b) = (orient(e, f[0], f[1]), orient(e, f[2], f[3]));
        (a > EPS && b > EPS) || (a < -EPS && b < -EPS)
    };
    s[0].min(s[2]) > t[0].max(t[2]) + EPS
        || t[0].min(t[2]) > s[0].max(s[2]) + EPS
        || s[1].min(s[3]) > t[1].max(t[3]) + EPS
        || t[1].min(t[3]) > s[1].max(s[3]) + EPS
        || separates(s, t)
        || separates(t, s)
}

/// Sum of crossing signs between two loops in general position.
pub fn signed_intersection_number(sigma: &PlLoop, tau: &PlLoop) -> Result<i64> {
    let edges = |l: &PlLoop| -> Vec<[f64; 4]> {
        l.vertices
            .iter()
            .zip(&l.deltas)
            .map(|(p, d)| edge_f64(p, d))
            .collect()
    };
    let (se, te) = (edges(sigma), edges(tau));
    let mut total = 0;
    for (i, (p, d1)) in sigma.vertices.iter().zip(&sigma.deltas).enumerate() {
        for (j, (q, d2)) in tau.vertices.iter().zip(&tau.deltas).enumerate() {
            for kx in -1i64..=1 {
                for ky in -1i64..=1 {
                    let (fx, fy) = (kx as f64, ky as f64);
                    let t = te[j];
                    if clearly_apart(se[i], [t[0] + fx, t[1] + fy, t[2] + fx, t[3] + fy]) {
                        continue;
                    }
                    total += edge_pair(p, d1, q, d2, (kx, ky))?;
                }
            }
        }
    }
    Ok(total)
}

/// Homological intersection form `m n' - n m'` on classes.
pub fn algebraic_intersection(a: (i64, i64), b: (i64, i64)) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NamedLoop {
    pub name: String,
    pub vertices: Vec<[String; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LoopsFile {
    pub loops: Vec<NamedLoop>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionReport {
    pub names: Vec<String>,
    /// `matrix[i][j] = <loop_i, loop_j>`; diagonal entries are `null`.
    pub matrix: Vec<Vec<Option<i64>>>,
}

/// Pairwise intersection numbers of all named loops.
pub fn intersect_all(file: &LoopsFile) -> Result<IntersectionReport> {
    let loops = file
        .loops
        .iter()
        .map(|l| PlLoop::from_strs(&l.vertices))
        .collect::<Result<Vec<_>>>()?;
    let mut matrix = vec![vec![None; loops.len()]; loops.len()];
    for i in 0..loops.len() {
        for j in 0..loops.len() {
            if i != j {
                matrix[i][j] = Some(signed_intersection_number(&loops[i], &loops[j])?);
            }
        }
    }
    Ok(IntersectionReport {
        names: file.loops.iter().map(|l| l.name.clone()).collect(),
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn basis_identity() {
        let (a, b) = basis_loops();
        assert_eq!(a.homology_class(), (BigInt::one(), BigInt::zero()));
        assert_eq!(signed_intersection_number(&a, &b).unwrap(), 1);
        assert_eq!(signed_intersection_number(&b, &a).unwrap(), -1);
        let a2 = a.translated(&Rational::zero(), &q(1, 3)).unwrap();
        assert_eq!(signed_intersection_number(&a, &a2).unwrap(), 0);
    }

    #[test]
    fn doubled_loop_counts_twice() {
        let (a, b) = basis_loops();
        let mut v = a.vertices().to_vec();
        v.extend(a.vertices().iter().cloned());
        let a_twice = PlLoop::new(v).unwrap();
        assert_eq!(signed_intersection_number(&a_twice, &b).unwrap(), 2);
    }

    #[test]
    fn rejects_degenerate_input() {
        let (a, _) = basis_loops();
        assert_eq!(
            signed_intersection_number(&a, &a),
            Err(Error::DegenerateConfiguration)
        );
        let z = Rational::zero();
        assert!(PlLoop::new(vec![(z.clone(), z.clone())]).is_err());
        assert!(PlLoop::new(vec![(z.clone(), z.clone()), (z.clone(), z.clone())]).is_err());
        // Vertex of one loop lying on an edge of the other.
        let b_through_vertex = PlLoop::new(vec![(q(1, 2), q(0, 1)), (q(1, 2), q(1, 2))]).unwrap();
        assert_eq!(
            signed_intersection_number(&a, &b_through_vertex),
            Err(Error::DegenerateConfiguration)
        );
    }

    #[test]
    fn straight_loops_follow_the_intersection_form() {
        let s = PlLoop::straight(2, 1, (q(1, 7), q(2, 11))).unwrap();
        let t = PlLoop::straight(-1, 3, (q(3, 13), q(5, 19))).unwrap();
        assert_eq!(s.homology_class(), (BigInt::from(2), BigInt::from(1)));
        assert_eq!(
            signed_intersection_number(&s, &t).unwrap(),
            algebraic_intersection((2, 1), (-1, 3))
        );
    }

    #[test]
    fn json_file_roundtrip() {
        let file: LoopsFile = serde_json::from_str(
            r#"{"loops": [{"name": "a", "vertices": [["0","1/3"],["1/2","1/3"]]},
                          {"name": "b", "vertices": [["1/3","0"],["1/3","1/2"]]}]}"#,
        )
        .unwrap();
        let report = intersect_all(&file).unwrap();
        assert_eq!(
            report.matrix,
            vec![vec![None, Some(1)], vec![Some(-1), None]]
        );
    }
}
