//! The pair criterion on the Jordan diagonal of the first-homology action,
//! the trace/determinant rule for the torus, and Lefschetz numbers of iterates.
//!
//! A pair of consecutive diagonal entries `(d_{2i-1}, d_{2i})` qualifies when it
//! is *expansive* (both moduli above one) or *hyperbolic* (one modulus below
//! one, the other above). A qualifying pair implies infinitely many minimal
//! periods for the homotopy class; when no pair qualifies the criterion is
//! silent, it never certifies finiteness.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Pow};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::homology::HomologyMatrix;
use crate::unit_circle::{unit_circle_counts, UnitCircleCount};
use crate::RationalPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Semantics {
    /// Some ordering of the eigenvalues yields a qualifying pair; decided from
    /// root counts alone.
    #[serde(rename = "spectral")]
    Spectral,
    /// Some ordering of whole Jordan blocks places a qualifying pair at
    /// positions `(2i-1, 2i)`.
    #[serde(rename = "strict")]
    StrictPairing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Satisfied,
    NotSatisfied,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Satisfied => "satisfied",
            Status::NotSatisfied => "not_satisfied",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    ExpansivePair,
    HyperbolicPair,
    RepeatedExpansiveBlock,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralClassification {
    pub char_poly: RationalPoly,
    pub counts: UnitCircleCount,
    /// Some eigenvalue outside the unit circle has a Jordan block of size >= 2.
    pub repeated_outside: bool,
    pub genus: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionVerdict {
    pub status: Status,
    pub witness: Witness,
    pub semantics: Semantics,
    pub classification: SpectralClassification,
}

impl CriterionVerdict {
    pub fn is_satisfied(&self) -> bool {
        self.status == Status::Satisfied
    }
}

/// Verdict of the torus trace/determinant rule, with the pair criterion for
/// the companion matrix attached so disagreements stay visible.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusCorollaryVerdict {
    pub status: Status,
    pub theorem1: CriterionVerdict,
}

impl TorusCorollaryVerdict {
    pub fn diverges(&self) -> bool {
        self.status != self.theorem1.status
    }
}

/// The excluded trace/determinant pairs besides the line `-t + d + 1 = 0`.
pub const TORUS_EXCEPTIONS: [(i64, i64); 6] = [(0, 0), (-1, 0), (-2, 1), (0, 1), (-1, 1), (1, 1)];

pub fn classify_spectrum(m: &HomologyMatrix) -> SpectralClassification {
    let char_poly = m.char_poly();
    let counts = unit_circle_counts(&char_poly).expect("degree >= 2");
    let locus = m.repeated_block_locus();
    let repeated_outside =
        !locus.is_constant() && unit_circle_counts(&locus).expect("nonconstant").n_out >= 1;
    SpectralClassification {
        char_poly,
        counts,
        repeated_outside,
        genus: m.genus(),
    }
}

pub fn theorem1_criterion(m: &HomologyMatrix, semantics: Semantics) -> CriterionVerdict {
    let classification = classify_spectrum(m);
    let witness = match semantics {
        Semantics::Spectral => spectral_witness(&classification),
        Semantics::StrictPairing => strict_witness(m, &classification),
    };
    let status = if witness == Witness::None {
        Status::NotSatisfied
    } else {
        Status::Satisfied
    };
    CriterionVerdict {
        status,
        witness,
        semantics,
        classification,
    }
}

fn spectral_witness(c: &SpectralClassification) -> Witness {
    let UnitCircleCount { n_in, n_out, .. } = c.counts;
    if n_out >= 2 {
        if c.repeated_outside {
            Witness::RepeatedExpansiveBlock
        } else {
            Witness::ExpansivePair
        }
    } else if n_out >= 1 && n_in >= 1 {
        Witness::HyperbolicPair
    } else {
        Witness::None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Modulus {
    Inside,
    On,
    Outside,
}

const SAME_BLOCK_EXPANSIVE: u8 = 1;
const CROSS_BLOCK_EXPANSIVE: u8 = 2;
const HYPERBOLIC: u8 = 4;

fn strict_witness(m: &HomologyMatrix, c: &SpectralClassification) -> Witness {
    // Block types (modulus class, size) with multiplicities.
    let mut types: HashMap<(Modulus, usize), usize> = HashMap::new();
    for eb in m.invariant_factors().block_structure() {
        let counts = unit_circle_counts(&eb.factor).expect("nonconstant basis element");
        for (class, n) in [
            (Modulus::Inside, counts.n_in),
            (Modulus::On, counts.n_on),
            (Modulus::Outside, counts.n_out),
        ] {
            for &size in &eb.block_sizes {
                *types.entry((class, size)).or_default() += n;
            }
        }
    }
    types.retain(|_, n| *n > 0);
    let mut kinds: Vec<(Modulus, usize)> = types.keys().copied().collect();
    kinds.sort();
    let remaining: Vec<usize> = kinds.iter().map(|k| types[k]).collect();
    let mut memo = HashMap::new();
    let found = pairing_search(&kinds, remaining, None, &mut memo);
    if found & SAME_BLOCK_EXPANSIVE != 0 && c.repeated_outside {
        Witness::RepeatedExpansiveBlock
    } else if found & (SAME_BLOCK_EXPANSIVE | CROSS_BLOCK_EXPANSIVE) != 0 {
        Witness::ExpansivePair
    } else if found & HYPERBOLIC != 0 {
        Witness::HyperbolicPair
    } else {
        Witness::None
    }
}

/// Union, over all orderings of the remaining blocks, of the kinds of
/// qualifying aligned pairs. `pending` is the modulus class of an entry
/// waiting for its partner at an even position.
fn pairing_search(
    kinds: &[(Modulus, usize)],
    remaining: Vec<usize>,
    pending: Option<Modulus>,
    memo: &mut HashMap<(Vec<usize>, Option<Modulus>), u8>,
) -> u8 {
    if let Some(&v) = memo.get(&(remaining.clone(), pending)) {
        return v;
    }
    let mut found = 0u8;
    for (idx, &(class, size)) in kinds.iter().enumerate() {
        if remaining[idx] == 0 {
            continue;
        }
        let mut here = 0u8;
        let mut rest = size;
        if let Some(prev) = pending {
            here |= cross_pair(prev, class);
            rest -= 1;
        }
        if rest >= 2 && class == Modulus::Outside {
            here |= SAME_BLOCK_EXPANSIVE;
        }
        let next_pending = (rest % 2 == 1).then_some(class);
        let mut next = remaining.clone();
        next[idx] -= 1;
        found |= here | pairing_search(kinds, next, next_pending, memo);
    }
    memo.insert((remaining, pending), found);
    found
}

fn cross_pair(a: Modulus, b: Modulus) -> u8 {
    match (a, b) {
        (Modulus::Outside, Modulus::Outside) => CROSS_BLOCK_EXPANSIVE,
        (Modulus::Outside, Modulus::Inside) | (Modulus::Inside, Modulus::Outside) => HYPERBOLIC,
        _ => 0,
    }
}

/// The torus rule: satisfied unless `(t, d)` lies on `-t + d + 1 = 0` or in
/// [`TORUS_EXCEPTIONS`].
pub fn torus_corollary(trace: i64, det: i64) -> TorusCorollaryVerdict {
    let excluded = -trace + det + 1 == 0 || TORUS_EXCEPTIONS.contains(&(trace, det));
    let status = if excluded {
        Status::NotSatisfied
    } else {
        Status::Satisfied
    };
    let theorem1 = theorem1_criterion(
        &HomologyMatrix::companion_2x2(trace, det),
        Semantics::Spectral,
    );
    TorusCorollaryVerdict { status, theorem1 }
}

/// `L(f^n) = 1 - tr(M^n) + degree^n` for a surface map of the given degree.
pub fn lefschetz_iterate(m: &HomologyMatrix, degree: &BigInt, n: u32) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::ZeroIterate);
    }
    Ok(BigInt::one() - m.power(n as u64).trace() + Pow::pow(degree, n))
}

/// Serializable verdict in the documented JSON layout.
#[derive(Clone, Debug, Serialize)]
pub struct VerdictReport {
    pub matrix: String,
    pub genus: usize,
    pub char_poly: RationalPoly,
    pub counts: UnitCircleCount,
    pub repeated_outside: bool,
    pub semantics: Semantics,
    pub status: Status,
    pub witness: Witness,
}

impl VerdictReport {
    pub fn new(m: &HomologyMatrix, v: &CriterionVerdict) -> Self {
        VerdictReport {
            matrix: m.to_string(),
            genus: v.classification.genus,
            char_poly: v.classification.char_poly.clone(),
            counts: v.classification.counts,
            repeated_outside: v.classification.repeated_outside,
            semantics: v.semantics,
            status: v.status,
            witness: v.witness,
        }
    }
}
