//! Differential scan of the torus rule against the pair criterion and the
//! toral periodic-point census over a trace/determinant window.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::criterion::{torus_corollary, Status};
use crate::error::{Error, Result};
use crate::homology::HomologyMatrix;
use crate::toral::periods_up_to;
use crate::unit_circle::UnitCircleCount;

/// Largest number of cells a single scan may cover.
pub const MAX_SCAN_CELLS: u64 = 1_000_000;

pub const CSV_HEADER: &str = "t,d,corollary,theorem1,n_in,n_on,n_out,oracle_primes,divergence";

/// Primes realized by the census, or a degenerate marker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OraclePrimes {
    Realized(Vec<u64>),
    /// Some prime in the window has a degenerate fixed-point level.
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRow {
    pub trace: i64,
    pub det: i64,
    pub corollary_status: Status,
    pub theorem1_status: Status,
    pub counts: UnitCircleCount,
    pub oracle_primes_realized: Option<OraclePrimes>,
    pub divergence_flag: bool,
}

impl ScanRow {
    pub fn compute(
        trace: i64,
        det: i64,
        oracle_primes: Option<&RangeInclusive<u64>>,
    ) -> Result<Self> {
        let v = torus_corollary(trace, det);
        let oracle = oracle_primes
            .map(|w| realized_primes(trace, det, w))
            .transpose()?;
        Ok(ScanRow {
            trace,
            det,
            corollary_status: v.status,
            theorem1_status: v.theorem1.status,
            counts: v.theorem1.classification.counts,
            oracle_primes_realized: oracle,
            divergence_flag: v.diverges(),
        })
    }

    pub fn to_csv_line(&self) -> String {
        let oracle = match &self.oracle_primes_realized {
            None => String::new(),
            Some(OraclePrimes::Degenerate) => "degenerate".to_string(),
            Some(OraclePrimes::Realized(ps)) => {
                ps.iter().map(u64::to_string).collect::<Vec<_>>().join("|")
            }
        };
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.trace,
            self.det,
            self.corollary_status,
            self.theorem1_status,
            self.counts.n_in,
            self.counts.n_on,
            self.counts.n_out,
            oracle,
            self.divergence_flag
        )
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

/// Primes `p` in the window with points of exact period `p` under the companion map.
pub fn realized_primes(trace: i64, det: i64, window: &RangeInclusive<u64>) -> Result<OraclePrimes> {
    let primes: Vec<u64> = window.clone().filter(|&p| is_prime(p)).collect();
    let Some(&top) = primes.last() else {
        return Ok(OraclePrimes::Realized(Vec::new()));
    };
    let report = periods_up_to(&HomologyMatrix::companion_2x2(trace, det), top)?;
    if primes
        .iter()
        .any(|&p| report.exact_period_counts[p as usize - 1].is_none())
    {
        return Ok(OraclePrimes::Degenerate);
    }
    Ok(OraclePrimes::Realized(
        primes
            .into_iter()
            .filter(|p| report.realized_periods.contains(p))
            .collect(),
    ))
}

/// Rows in lexicographic `(t, d)` order.
pub fn scan(
    traces: RangeInclusive<i64>,
    dets: RangeInclusive<i64>,
    oracle_primes: Option<RangeInclusive<u64>>,
) -> Result<Vec<ScanRow>> {
    let span = |r: &RangeInclusive<i64>| (r.end() - r.start() + 1).max(0) as u64;
    let cells = span(&traces).saturating_mul(span(&dets));
    if cells > MAX_SCAN_CELLS {
        return Err(Error::InvalidArgument(format!(
            "scan of {cells} cells exceeds {MAX_SCAN_CELLS}"
        )));
    }
    let grid: Vec<(i64, i64)> = traces
        .flat_map(|t| dets.clone().map(move |d| (t, d)))
        .collect();
    grid.par_iter()
        .map(|&(t, d)| ScanRow::compute(t, d, oracle_primes.as_ref()))
        .collect()
}

pub fn to_csv(rows: &[ScanRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 48);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.to_csv_line());
    }
    out
}
