//! The first-homology action of a surface map as an even-dimensional integer
//! matrix, together with its Jordan-structure data.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::{IntMatrix, RationalPoly};

/// Square integer matrix of even dimension `2g`, `g >= 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HomologyMatrix(IntMatrix);

/// Nontrivial invariant factors `d_1 | d_2 | ... | d_k` of `xI - M`, monic.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantFactors {
    pub factors: Vec<RationalPoly>,
}

/// All eigenvalues that are roots of `factor` share the listed Jordan block sizes.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenBlocks {
    pub factor: RationalPoly,
    pub block_sizes: Vec<usize>,
}

impl HomologyMatrix {
    pub fn new(m: IntMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if m.rows() == 0 || !m.rows().is_multiple_of(2) {
            return Err(Error::OddDimension(m.rows()));
        }
        Ok(HomologyMatrix(m))
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        Self::new(Matrix::from_rows(rows)?)
    }

    /// Parse the text format: rows separated by `;`, entries by `,`.
    pub fn parse(text: &str) -> Result<Self> {
        let rows = text
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|e| {
                        BigInt::from_str(e.trim())
                            .map_err(|_| Error::Parse(format!("bad integer entry {e:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let m = Matrix::from_rows(rows)
            .map_err(|_| Error::Parse("rows have different lengths".into()))?;
        Self::new(m)
    }

    /// Parse the JSON alternative: an array of arrays of integer strings.
    pub fn from_json_rows(rows: &[Vec<String>]) -> Result<Self> {
        let text = rows
            .iter()
            .map(|r| r.join(","))
            .collect::<Vec<_>>()
            .join(";");
        Self::parse(&text)
    }

    /// Companion matrix `[[0, -d], [1, t]]` of `x^2 - t x + d`.
    pub fn companion_2x2(trace: i64, det: i64) -> Self {
        Self::from_i64_rows(&[&[0, -det], &[1, trace]]).expect("2x2 is valid")
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn genus(&self) -> usize {
        self.dim() / 2
    }

    /// Monic `det(xI - M)` with integer coefficients.
    pub fn char_poly(&self) -> RationalPoly {
        RationalPoly::new(
            self.0
                .char_poly()
                .into_coeffs()
                .into_iter()
                .map(BigRational::from_integer)
                .collect(),
        )
    }

    pub fn power(&self, n: u64) -> Self {
        HomologyMatrix(self.0.pow(n))
    }

    pub fn determinant(&self) -> BigInt {
        self.0.determinant()
    }

    pub fn trace(&self) -> BigInt {
        self.0.trace()
    }

    /// Conjugate `S M S^-1` given `S` and its inverse.
    pub fn conjugate(&self, s: &IntMatrix, s_inv: &IntMatrix) -> Self {
        HomologyMatrix(&(s * &self.0) * s_inv)
    }

    /// Invariant factors via the Smith normal form of `xI - M` over `Q[x]`.
    pub fn invariant_factors(&self) -> InvariantFactors {
        let n = self.dim();
        let mut a: Vec<Vec<RationalPoly>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let entry = -RationalPoly::constant(BigRational::from_integer(
                            self.0[(i, j)].clone(),
                        ));
                        if i == j {
                            &entry + &RationalPoly::x()
                        } else {
                            entry
                        }
                    })
                    .collect()
            })
            .collect();
        let mut diagonal = Vec::with_capacity(n);
        for k in 0..n {
            smith_step(&mut a, k);
            diagonal.push(a[k][k].monic());
        }
        let factors = diagonal.into_iter().filter(|d| !d.is_constant()).collect();
        InvariantFactors { factors }
    }

    /// Monic squarefree polynomial whose roots are exactly the eigenvalues with
    /// a Jordan block of size at least two; the constant 1 when there are none.
    pub fn repeated_block_locus(&self) -> RationalPoly {
        let product = self
            .invariant_factors()
            .factors
            .iter()
            .map(|d| d.gcd(&d.derivative()).expect("d is nonzero"))
            .fold(RationalPoly::one(), |acc, g| &acc * &g);
        if product.is_constant() {
            return RationalPoly::one();
        }
        product.squarefree_part().expect("nonzero")
    }
}

/// Bring the minimal-degree pivot of the trailing block to `(k, k)` and clear
/// its row and column, ensuring it divides every remaining entry.
fn smith_step(a: &mut [Vec<RationalPoly>], k: usize) {
    let n = a.len();
    loop {
        let pivot = (k..n)
            .flat_map(|i| (k..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by_key(|&(i, j)| a[i][j].degree());
        let Some((pi, pj)) = pivot else {
            return;
        };
        a.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        let lc = a[k][k].leading().cloned().expect("nonzero pivot");
        let inv = BigRational::one() / lc;
        for v in a[k].iter_mut() {
            *v = v.scale(&inv);
        }

        let mut dirty = false;
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let (q, r) = a[i][k].div_rem(&a[k][k]).expect("nonzero pivot");
            for j in k..n {
                let v = &a[i][j] - &(&q * &a[k][j]);
                a[i][j] = v;
            }
            dirty |= !r.is_zero();
        }
        for j in k + 1..n {
            if a[k][j].is_zero() {
                continue;
            }
            let (q, r) = a[k][j].div_rem(&a[k][k]).expect("nonzero pivot");
            for row in a.iter_mut().skip(k) {
                let v = &row[j] - &(&q * &row[k]);
                row[j] = v;
            }
            dirty |= !r.is_zero();
        }
        if dirty {
            continue;
        }
        let offender = (k + 1..n).find(|&i| (k + 1..n).any(|j| !a[k][k].divides(&a[i][j])));
        match offender {
            Some(i) => {
                for j in k..n {
                    let v = &a[k][j] + &a[i][j];
                    a[k][j] = v;
                }
            }
            None => return,
        }
    }
}

impl InvariantFactors {
    pub fn product(&self) -> RationalPoly {
        self.factors
            .iter()
            .fold(RationalPoly::one(), |acc, f| &acc * f)
    }

    /// Group eigenvalues into a coprime basis of squarefree factors; all roots
    /// of one basis element have the same Jordan block sizes.
    pub fn block_structure(&self) -> Vec<EigenBlocks> {
        let mut basis: Vec<RationalPoly> = Vec::new();
        for d in &self.factors {
            for (f, _) in d.squarefree_decomposition().expect("nonzero").factors {
                basis.push(f);
            }
        }
        let basis = coprime_basis(basis);
        basis
            .into_iter()
            .map(|h| {
                let mut sizes: Vec<usize> = self
                    .factors
                    .iter()
                    .map(|d| multiplicity(&h, d))
                    .filter(|&m| m > 0)
                    .collect();
                sizes.sort_unstable();
                EigenBlocks {
                    factor: h,
                    block_sizes: sizes,
                }
            })
            .collect()
    }
}

fn coprime_basis(mut list: Vec<RationalPoly>) -> Vec<RationalPoly> {
    list.retain(|p| !p.is_constant());
    'outer: loop {
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                let g = list[i].gcd(&list[j]).expect("nonzero");
                if g.is_constant() {
                    continue;
                }
                let b = list.swap_remove(j);
                let a = list.swap_remove(i);
                for p in [
                    a.exact_div(&g).expect("divides"),
                    b.exact_div(&g).expect("divides"),
                    g,
                ] {
                    if !p.is_constant() {
                        list.push(p.monic());
                    }
                }
                continue 'outer;
            }
        }
        break;
    }
    list.sort_by_key(|p| (p.degree(), p.to_strings()));
    list
}

fn multiplicity(h: &RationalPoly, d: &RationalPoly) -> usize {
    let mut count = 0;
    let mut rest = d.clone();
    while let Some(q) = rest.exact_div(h) {
        rest = q;
        count += 1;
    }
    count
}

impl fmt::Display for HomologyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for HomologyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HomologyMatrix[{}]", self.0)
    }
}

impl FromStr for HomologyMatrix {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Serialize for HomologyMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hm(rows: &[&[i64]]) -> HomologyMatrix {
        HomologyMatrix::from_i64_rows(rows).unwrap()
    }

    fn p(c: &[i64]) -> RationalPoly {
        RationalPoly::from_ints(c)
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            HomologyMatrix::parse("1,2,3;4,5,6"),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            HomologyMatrix::parse("1"),
            Err(Error::OddDimension(1))
        ));
        assert!(matches!(
            HomologyMatrix::parse("1,2;3"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            HomologyMatrix::parse("1,x;3,4"),
            Err(Error::Parse(_))
        ));
        assert_eq!(
            HomologyMatrix::parse(" 2, 1 ; 1,1 ").unwrap(),
            hm(&[&[2, 1], &[1, 1]])
        );
    }

    #[test]
    fn char_poly_examples() {
        assert_eq!(hm(&[&[2, 1], &[1, 1]]).char_poly(), p(&[1, -3, 1]));
        assert_eq!(hm(&[&[1, 0], &[0, 1]]).char_poly(), p(&[1, -2, 1]));
        assert_eq!(hm(&[&[0, 1], &[-1, 0]]).char_poly(), p(&[1, 0, 1]));
        assert_eq!(
            HomologyMatrix::companion_2x2(3, 1).char_poly(),
            p(&[1, -3, 1])
        );
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(hm(&[&[2, 1], &[1, 1]]).determinant(), BigInt::from(1));
        assert_eq!(hm(&[&[3, 0], &[0, -2]]).determinant(), BigInt::from(-6));
    }

    #[test]
    fn invariant_factor_examples() {
        assert_eq!(
            hm(&[&[1, 0], &[0, 1]]).invariant_factors().factors,
            vec![p(&[-1, 1]), p(&[-1, 1])]
        );
        assert_eq!(
            hm(&[&[1, 1], &[0, 1]]).invariant_factors().factors,
            vec![p(&[1, -2, 1])]
        );
        assert_eq!(
            hm(&[&[2, 1], &[1, 1]]).invariant_factors().factors,
            vec![p(&[1, -3, 1])]
        );
    }

    #[test]
    fn repeated_block_locus_examples() {
        assert_eq!(hm(&[&[1, 1], &[0, 1]]).repeated_block_locus(), p(&[-1, 1]));
        assert_eq!(hm(&[&[1, 0], &[0, 1]]).repeated_block_locus(), p(&[1]));
        let m = hm(&[&[2, 1, 0, 0], &[0, 2, 0, 0], &[0, 0, 3, 1], &[0, 0, 0, 3]]);
        assert_eq!(m.repeated_block_locus(), p(&[6, -5, 1]));
    }

    #[test]
    fn block_structure_of_mixed_jordan_form() {
        // Blocks: lambda=2 sizes {2,1}, lambda=3 size {1}.
        let m = hm(&[&[2, 1, 0, 0], &[0, 2, 0, 0], &[0, 0, 2, 0], &[0, 0, 0, 3]]);
        let inv = m.invariant_factors();
        assert_eq!(
            inv.factors,
            vec![p(&[-2, 1]), &p(&[4, -4, 1]) * &p(&[-3, 1])]
        );
        let blocks = inv.block_structure();
        assert_eq!(
            blocks,
            vec![
                EigenBlocks {
                    factor: p(&[-2, 1]),
                    block_sizes: vec![1, 2]
                },
                EigenBlocks {
                    factor: p(&[-3, 1]),
                    block_sizes: vec![1]
                },
            ]
        );
    }
}
