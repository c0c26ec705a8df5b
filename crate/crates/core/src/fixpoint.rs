//! Certified fixed-point localisation for polynomial maps of the unit square.
//!
//! The zero sets of the displacements `p1 - x` and `p2 - y` are covered by
//! quadtree boxes on the dyadic grid; a box is discarded only when an
//! outward-rounded interval evaluation excludes zero. Fixed-point squares are
//! grid cells met by both covers, refined by nested halving. Counting uses the
//! Krawczyk operator to isolate each fixed point in its own enclosure.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::bivariate::{Axis, IntervalPoly2, Poly2, PolynomialMap2D};
use crate::error::{Error, Result};
use crate::interval::{Bound, Interval};
use crate::poly::Poly;
use crate::scalar::{dyadic, f64_to_rational};
use crate::Rational;

/// Deepest quadtree level supported; cell coordinates stay exact in `f64`.
pub const MAX_LEVEL: u32 = 48;
/// Default depth for zero covers and counting.
pub const DEFAULT_MAX_DEPTH: u32 = 24;
/// Default grid level of fixed-point squares (`delta = 2^-6`).
pub const DEFAULT_DELTA_LEVEL: u32 = 6;
/// Finest admissible grid level of fixed-point squares.
pub const MIN_DELTA_LEVEL: u32 = 20;
/// Images must stay this far inside the square for counting.
pub const COUNT_MARGIN_LOG2: u32 = 5;

const LOCAL_COVER_DEPTH: u32 = 2;
const REFINE_NODE_BUDGET: usize = 20_000;
const COUNT_NODE_BUDGET: usize = 400_000;
const RANGE_CHECK_DEPTH: u32 = 6;
const ARC_MAX_DEPTH: u32 = 64;

/// `k / 2^m` in lowest terms, e.g. `"3/2^4"`; zero prints as `"0/2^0"`.
pub fn dyadic_string(q: &Rational) -> String {
    let denom = q.denom();
    if let Some(m) = log2_exact(denom) {
        format!("{}/2^{}", q.numer(), m)
    } else {
        q.to_string()
    }
}

/// `m` with `n = 2^m`, if `n` is a power of two.
fn log2_exact(n: &BigInt) -> Option<u64> {
    let m = n.trailing_zeros()?;
    (n.is_positive() && n.bits() == m + 1).then_some(m)
}

fn dyadic_u64(k: u64, level: u32) -> Rational {
    BigRational::new(BigInt::from(k), BigInt::one() << level)
}

/// Cell `[ix, ix+1] x [iy, iy+1]` scaled by `2^-level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridCell {
    pub level: u32,
    pub ix: u64,
    pub iy: u64,
}

impl GridCell {
    pub const ROOT: GridCell = GridCell {
        level: 0,
        ix: 0,
        iy: 0,
    };

    pub fn new(level: u32, ix: u64, iy: u64) -> Result<Self> {
        if level > MAX_LEVEL || ix >> level != 0 || iy >> level != 0 {
            return Err(Error::InvalidArgument(format!(
                "cell ({ix}, {iy}) outside level {level} grid"
            )));
        }
        Ok(GridCell { level, ix, iy })
    }

    pub fn x_lo(&self) -> Rational {
        dyadic_u64(self.ix, self.level)
    }

    pub fn x_hi(&self) -> Rational {
        dyadic_u64(self.ix + 1, self.level)
    }

    pub fn y_lo(&self) -> Rational {
        dyadic_u64(self.iy, self.level)
    }

    pub fn y_hi(&self) -> Rational {
        dyadic_u64(self.iy + 1, self.level)
    }

    pub fn width(&self) -> Rational {
        dyadic(1, self.level)
    }

    pub fn center(&self) -> (Rational, Rational) {
        (
            dyadic_u64(2 * self.ix + 1, self.level + 1),
            dyadic_u64(2 * self.iy + 1, self.level + 1),
        )
    }

    /// Children in grid order: bottom-left, bottom-right, top-left, top-right.
    pub fn children(&self) -> [GridCell; 4] {
        let (l, x, y) = (self.level + 1, 2 * self.ix, 2 * self.iy);
        [
            GridCell {
                level: l,
                ix: x,
                iy: y,
            },
            GridCell {
                level: l,
                ix: x + 1,
                iy: y,
            },
            GridCell {
                level: l,
                ix: x,
                iy: y + 1,
            },
            GridCell {
                level: l,
                ix: x + 1,
                iy: y + 1,
            },
        ]
    }

    pub fn parent(&self) -> Option<GridCell> {
        (self.level > 0).then(|| GridCell {
            level: self.level - 1,
            ix: self.ix / 2,
            iy: self.iy / 2,
        })
    }

    pub fn contains(&self, other: &GridCell) -> bool {
        other.level >= self.level
            && other.ix >> (other.level - self.level) == self.ix
            && other.iy >> (other.level - self.level) == self.iy
    }

    /// Closed-cell membership of a point.
    pub fn contains_point(&self, x: &Rational, y: &Rational) -> bool {
        &self.x_lo() <= x && x <= &self.x_hi() && &self.y_lo() <= y && y <= &self.y_hi()
    }

    /// Coordinates `(x0, x1, y0, y1)` on the grid of `level >= self.level`.
    fn span_at(&self, level: u32) -> (u64, u64, u64, u64) {
        let s = level - self.level;
        (
            self.ix << s,
            (self.ix + 1) << s,
            self.iy << s,
            (self.iy + 1) << s,
        )
    }

    fn descendants_at(&self, level: u32) -> impl Iterator<Item = GridCell> {
        let (x0, x1, y0, y1) = self.span_at(level);
        (y0..y1).flat_map(move |iy| (x0..x1).map(move |ix| GridCell { level, ix, iy }))
    }

    pub fn intervals<B: Bound>(&self) -> (Interval<B>, Interval<B>) {
        (
            Interval::from_rationals(&self.x_lo(), &self.x_hi()),
            Interval::from_rationals(&self.y_lo(), &self.y_hi()),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoxStatus {
    MayContainZero,
    ExcludedZero,
}

/// A quadtree box of a zero cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CertifiedBox {
    pub cell: GridCell,
    pub status: BoxStatus,
}

impl CertifiedBox {
    pub fn may_contain_zero(&self) -> bool {
        self.status == BoxStatus::MayContainZero
    }
}

impl Serialize for CertifiedBox {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            x_lo: String,
            x_hi: String,
            y_lo: String,
            y_hi: String,
            status: BoxStatus,
        }
        let c = &self.cell;
        Repr {
            x_lo: dyadic_string(&c.x_lo()),
            x_hi: dyadic_string(&c.x_hi()),
            y_lo: dyadic_string(&c.y_lo()),
            y_hi: dyadic_string(&c.y_hi()),
            status: self.status,
        }
        .serialize(serializer)
    }
}

/// Certified box cover of the zero set of one displacement.
#[derive(Clone, Debug, Serialize)]
pub struct ZeroCover {
    pub axis: Axis,
    pub max_depth: u32,
    /// The displacement vanishes identically; the cover is the whole square.
    pub degenerate: bool,
    pub boxes: Vec<CertifiedBox>,
}

impl ZeroCover {
    pub fn zero_boxes(&self) -> impl Iterator<Item = &CertifiedBox> {
        self.boxes.iter().filter(|b| b.may_contain_zero())
    }

    /// Total area of the `MayContainZero` boxes.
    pub fn zero_area(&self) -> Rational {
        self.zero_boxes().fold(Rational::zero(), |acc, b| {
            acc + b.cell.width() * b.cell.width()
        })
    }
}

/// Enclosure of a polynomial over boxes: natural Horner form intersected with
/// the mean-value form.
#[derive(Clone, Debug)]
pub struct Enclosed<B> {
    f: IntervalPoly2<B>,
    fx: IntervalPoly2<B>,
    fy: IntervalPoly2<B>,
}

impl<B: Bound> Enclosed<B> {
    pub fn new(p: &Poly2<Rational>) -> Self {
        Enclosed {
            f: p.enclose(),
            fx: p.d_dx().enclose(),
            fy: p.d_dy().enclose(),
        }
    }

    pub fn range(&self, x: &Interval<B>, y: &Interval<B>) -> Interval<B> {
        let natural = self.f.eval(x, y);
        let cx = Interval::point(x.midpoint());
        let cy = Interval::point(y.midpoint());
        let mean_value = self.f.eval(&cx, &cy)
            + self.fx.eval(x, y) * (x.clone() - cx)
            + self.fy.eval(x, y) * (y.clone() - cy);
        natural.intersect(&mean_value).unwrap_or(natural)
    }

    pub fn gradient(&self, x: &Interval<B>, y: &Interval<B>) -> (Interval<B>, Interval<B>) {
        (self.fx.eval(x, y), self.fy.eval(x, y))
    }

    pub fn at(&self, x: &Interval<B>, y: &Interval<B>) -> Interval<B> {
        self.f.eval(x, y)
    }
}

fn cover_rec<B: Bound>(
    ev: &Enclosed<B>,
    cell: GridCell,
    max_depth: u32,
    out: &mut Vec<CertifiedBox>,
) {
    let (x, y) = cell.intervals::<B>();
    if !ev.range(&x, &y).contains_zero() {
        out.push(CertifiedBox {
            cell,
            status: BoxStatus::ExcludedZero,
        });
    } else if cell.level >= max_depth {
        out.push(CertifiedBox {
            cell,
            status: BoxStatus::MayContainZero,
        });
    } else {
        for child in cell.children() {
            cover_rec(ev, child, max_depth, out);
        }
    }
}

/// Quadtree cover of the zero set of `p_axis - id_axis` on `Q`.
pub fn displacement_zero_boxes(
    map: &PolynomialMap2D,
    axis: Axis,
    max_depth: u32,
) -> Result<ZeroCover> {
    displacement_zero_boxes_with::<f64>(map, axis, max_depth)
}

/// [`displacement_zero_boxes`] with a chosen interval endpoint type.
pub fn displacement_zero_boxes_with<B: Bound + Send + Sync>(
    map: &PolynomialMap2D,
    axis: Axis,
    max_depth: u32,
) -> Result<ZeroCover> {
    if max_depth > MAX_LEVEL {
        return Err(Error::InvalidArgument(format!(
            "max_depth {max_depth} exceeds {MAX_LEVEL}"
        )));
    }
    let disp = map.displacement(axis);
    if disp.is_zero() {
        return Ok(ZeroCover {
            axis,
            max_depth,
            degenerate: true,
            boxes: vec![CertifiedBox {
                cell: GridCell::ROOT,
                status: BoxStatus::MayContainZero,
            }],
        });
    }
    let ev = Enclosed::<B>::new(&disp);
    // Fan out over a fixed top level; rayon keeps the result in grid order.
    let split = max_depth.min(3);
    let mut top = Vec::new();
    let mut boxes = Vec::new();
    collect_top(&ev, GridCell::ROOT, split, &mut top, &mut boxes);
    let parts: Vec<Vec<CertifiedBox>> = top
        .par_iter()
        .map(|&cell| {
            let mut out = Vec::new();
            cover_rec(&ev, cell, max_depth, &mut out);
            out
        })
        .collect();
    boxes.extend(parts.into_iter().flatten());
    boxes.sort_by_key(|b| morton_key(&b.cell));
    Ok(ZeroCover {
        axis,
        max_depth,
        degenerate: false,
        boxes,
    })
}

fn collect_top<B: Bound>(
    ev: &Enclosed<B>,
    cell: GridCell,
    split: u32,
    top: &mut Vec<GridCell>,
    excluded: &mut Vec<CertifiedBox>,
) {
    if cell.level == split {
        top.push(cell);
        return;
    }
    let (x, y) = cell.intervals::<B>();
    if !ev.range(&x, &y).contains_zero() {
        excluded.push(CertifiedBox {
            cell,
            status: BoxStatus::ExcludedZero,
        });
        return;
    }
    for child in cell.children() {
        collect_top(ev, child, split, top, excluded);
    }
}

/// Quadtree (depth-first) order.
fn morton_key(cell: &GridCell) -> (u128, u32) {
    let (x0, _, y0, _) = cell.span_at(MAX_LEVEL);
    let mut key = 0u128;
    for bit in (0..MAX_LEVEL).rev() {
        key = (key << 2) | (((y0 >> bit) & 1) << 1 | ((x0 >> bit) & 1)) as u128;
    }
    (key, cell.level)
}

/// A connected component of a zero cover with its contacts with the faces of `Q`.
#[derive(Clone, Debug, Serialize)]
pub struct CurveComponent {
    pub boxes: Vec<CertifiedBox>,
    pub touches_left: bool,
    pub touches_right: bool,
    pub touches_bottom: bool,
    pub touches_top: bool,
}

impl CurveComponent {
    pub fn meets_opposite_faces(&self) -> bool {
        (self.touches_left && self.touches_right) || (self.touches_bottom && self.touches_top)
    }
}

struct DisjointSets(Vec<usize>);

impl DisjointSets {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Connected components of the `MayContainZero` boxes, adjacency being a
/// shared edge of positive length.
pub fn curve_components(boxes: &[CertifiedBox]) -> Vec<CurveComponent> {
    let cells: Vec<GridCell> = boxes
        .iter()
        .filter(|b| b.may_contain_zero())
        .map(|b| b.cell)
        .collect();
    if cells.is_empty() {
        return Vec::new();
    }
    let level = cells.iter().map(|c| c.level).max().unwrap_or(0);
    let spans: Vec<_> = cells.iter().map(|c| c.span_at(level)).collect();
    let mut by_x0: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut by_y0: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, s) in spans.iter().enumerate() {
        by_x0.entry(s.0).or_default().push(i);
        by_y0.entry(s.2).or_default().push(i);
    }
    let mut sets = DisjointSets((0..cells.len()).collect());
    for (i, &(_, x1, _, y1)) in spans.iter().enumerate() {
        let (y0, x0) = (spans[i].2, spans[i].0);
        for &j in by_x0.get(&x1).into_iter().flatten() {
            if spans[j].2.max(y0) < spans[j].3.min(y1) {
                sets.union(i, j);
            }
        }
        for &j in by_y0.get(&y1).into_iter().flatten() {
            if spans[j].0.max(x0) < spans[j].1.min(x1) {
                sets.union(i, j);
            }
        }
    }
    let full = 1u64 << level;
    let mut groups: Vec<(usize, CurveComponent)> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for (i, cell) in cells.iter().enumerate() {
        let root = sets.find(i);
        let k = *slot.entry(root).or_insert_with(|| {
            groups.push((
                root,
                CurveComponent {
                    boxes: Vec::new(),
                    touches_left: false,
                    touches_right: false,
                    touches_bottom: false,
                    touches_top: false,
                },
            ));
            groups.len() - 1
        });
        let (x0, x1, y0, y1) = spans[i];
        let comp = &mut groups[k].1;
        comp.boxes.push(CertifiedBox {
            cell: *cell,
            status: BoxStatus::MayContainZero,
        });
        comp.touches_left |= x0 == 0;
        comp.touches_right |= x1 == full;
        comp.touches_bottom |= y0 == 0;
        comp.touches_top |= y1 == full;
    }
    groups.into_iter().map(|(_, c)| c).collect()
}

/// A `delta x delta` grid square met by both displacement zero covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FixedPointSquare {
    pub grid_index: (u64, u64),
    /// `delta = 2^-level`.
    pub level: u32,
    pub meets_zero_set_1: bool,
    pub meets_zero_set_2: bool,
}

impl FixedPointSquare {
    pub fn new(grid_index: (u64, u64), level: u32) -> Result<Self> {
        GridCell::new(level, grid_index.0, grid_index.1)?;
        Ok(FixedPointSquare {
            grid_index,
            level,
            meets_zero_set_1: true,
            meets_zero_set_2: true,
        })
    }

    pub fn cell(&self) -> GridCell {
        GridCell {
            level: self.level,
            ix: self.grid_index.0,
            iy: self.grid_index.1,
        }
    }

    pub fn delta(&self) -> Rational {
        dyadic(1, self.level)
    }
}

impl Serialize for FixedPointSquare {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            grid_index: (u64, u64),
            delta: String,
            x_lo: String,
            x_hi: String,
            y_lo: String,
            y_hi: String,
            meets_zero_set_1: bool,
            meets_zero_set_2: bool,
        }
        let c = self.cell();
        Repr {
            grid_index: self.grid_index,
            delta: dyadic_string(&self.delta()),
            x_lo: dyadic_string(&c.x_lo()),
            x_hi: dyadic_string(&c.x_hi()),
            y_lo: dyadic_string(&c.y_lo()),
            y_hi: dyadic_string(&c.y_hi()),
            meets_zero_set_1: self.meets_zero_set_1,
            meets_zero_set_2: self.meets_zero_set_2,
        }
        .serialize(serializer)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointSquares {
    #[serde(serialize_with = "ser_dyadic")]
    pub delta: Rational,
    /// Some displacement vanishes identically.
    pub degenerate: bool,
    pub squares: Vec<FixedPointSquare>,
}

fn ser_dyadic<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&dyadic_string(q))
}

/// `log2(1/delta)` for a grid step `delta = 2^-m`, `0 <= m <= 20`.
pub fn delta_level(delta: &Rational) -> Result<u32> {
    let bad = || {
        Error::InvalidArgument(format!(
            "delta {delta} is not 2^-m with 0 <= m <= {MIN_DELTA_LEVEL}"
        ))
    };
    match log2_exact(delta.denom()) {
        Some(m) if delta.numer().is_one() && m <= MIN_DELTA_LEVEL as u64 => Ok(m as u32),
        _ => Err(bad()),
    }
}

/// Grid squares of side `delta` meeting both certified zero covers.
pub fn fixed_point_squares(map: &PolynomialMap2D, delta: &Rational) -> Result<FixedPointSquares> {
    let level = delta_level(delta)?;
    let c1 = displacement_zero_boxes(map, Axis::X, level)?;
    let c2 = displacement_zero_boxes(map, Axis::Y, level)?;
    let expand = |c: &ZeroCover| -> BTreeSet<(u64, u64)> {
        c.zero_boxes()
            .flat_map(|b| b.cell.descendants_at(level))
            .map(|g| (g.ix, g.iy))
            .collect()
    };
    let (s1, s2) = (expand(&c1), expand(&c2));
    let squares = s1
        .intersection(&s2)
        .map(|&grid_index| FixedPointSquare {
            grid_index,
            level,
            meets_zero_set_1: true,
            meets_zero_set_2: true,
        })
        .collect();
    Ok(FixedPointSquares {
        delta: delta.clone(),
        degenerate: c1.degenerate || c2.degenerate,
        squares,
    })
}

/// Exact `max(|p1(x,y) - x|, |p2(x,y) - y|)`.
pub fn residual(map: &PolynomialMap2D, x: &Rational, y: &Rational) -> Rational {
    let (u, v) = map.eval(x, y);
    let (a, b) = ((u - x).abs(), (v - y).abs());
    if a > b {
        a
    } else {
        b
    }
}

/// Result of nested-square refinement.
#[derive(Clone, Debug, Serialize)]
pub struct Refinement {
    #[serde(serialize_with = "ser_point")]
    pub point: (Rational, Rational),
    #[serde(serialize_with = "ser_rational")]
    pub residual: Rational,
    /// Nested squares from the start square to the final one.
    #[serde(skip)]
    pub trail: Vec<GridCell>,
}

fn ser_rational<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

fn ser_point<S: Serializer>(
    p: &(Rational, Rational),
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    (dyadic_string(&p.0), dyadic_string(&p.1)).serialize(s)
}

struct MapEval<B> {
    disp: [Enclosed<B>; 2],
}

impl<B: Bound> MapEval<B> {
    fn new(map: &PolynomialMap2D) -> Self {
        MapEval {
            disp: [
                Enclosed::new(&map.displacement(Axis::X)),
                Enclosed::new(&map.displacement(Axis::Y)),
            ],
        }
    }

    fn excludes(&self, x: &Interval<B>, y: &Interval<B>) -> bool {
        self.disp.iter().any(|d| !d.range(x, y).contains_zero())
    }
}

/// Whether a local cover of depth `extra` inside `cell` keeps a box for axis `a`.
fn meets_locally<B: Bound>(ev: &Enclosed<B>, cell: GridCell, extra: u32) -> bool {
    let (x, y) = cell.intervals::<B>();
    if !ev.range(&x, &y).contains_zero() {
        return false;
    }
    extra == 0
        || cell
            .children()
            .into_iter()
            .any(|c| meets_locally(ev, c, extra - 1))
}

/// Descend nested squares from `start` until the centre residual is at most `tol`.
pub fn refine_fixed_point(
    map: &PolynomialMap2D,
    start: &FixedPointSquare,
    tol: &Rational,
) -> Result<Refinement> {
    refine_fixed_point_with::<f64>(map, start, tol)
}

/// [`refine_fixed_point`] with a chosen interval endpoint type.
pub fn refine_fixed_point_with<B: Bound>(
    map: &PolynomialMap2D,
    start: &FixedPointSquare,
    tol: &Rational,
) -> Result<Refinement> {
    if !(start.meets_zero_set_1 && start.meets_zero_set_2) {
        return Err(Error::InvalidArgument(
            "start square must meet both zero sets".into(),
        ));
    }
    if !tol.is_positive() {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let ev = MapEval::<B>::new(map);
    let score = |c: &GridCell| {
        let (x, y) = c.center();
        residual(map, &x, &y)
    };
    // Depth-first search; each frame holds untried siblings, best first.
    let mut path = vec![start.cell()];
    let mut frames: Vec<Vec<GridCell>> = Vec::new();
    let mut visited = 0usize;
    loop {
        let cell = *path.last().expect("nonempty path");
        let r = score(&cell);
        if &r <= tol {
            return Ok(Refinement {
                point: cell.center(),
                residual: r,
                trail: path,
            });
        }
        if cell.level >= MAX_LEVEL {
            return Err(Error::RefinementDepthExceeded(MAX_LEVEL));
        }
        visited += 1;
        if visited > REFINE_NODE_BUDGET {
            return Err(Error::RefinementDepthExceeded(cell.level));
        }
        let mut kids: Vec<(Rational, GridCell)> = cell
            .children()
            .into_iter()
            .filter(|c| {
                ev.disp
                    .iter()
                    .all(|d| meets_locally(d, *c, LOCAL_COVER_DEPTH))
            })
            .map(|c| (score(&c), c))
            .collect();
        kids.sort_by(|a, b| b.0.cmp(&a.0));
        let mut kids: Vec<GridCell> = kids.into_iter().map(|(_, c)| c).collect();
        // Backtrack while the current frame is exhausted.
        loop {
            if let Some(next) = kids.pop() {
                frames.push(kids);
                path.push(next);
                break;
            }
            path.pop();
            match frames.pop() {
                Some(rest) if !path.is_empty() => kids = rest,
                _ => return Err(Error::RefinementLostZero),
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Certification {
    Complete,
    Incomplete,
}

/// A box holding exactly one fixed point.
#[derive(Clone, Debug, PartialEq)]
pub struct Enclosure {
    pub x: (Rational, Rational),
    pub y: (Rational, Rational),
}

impl Enclosure {
    fn from_intervals<B: Bound>(x: &Interval<B>, y: &Interval<B>) -> Self {
        Enclosure {
            x: (x.lo.to_rational(), x.hi.to_rational()),
            y: (y.lo.to_rational(), y.hi.to_rational()),
        }
    }

    pub fn contains_point(&self, x: &Rational, y: &Rational) -> bool {
        &self.x.0 <= x && x <= &self.x.1 && &self.y.0 <= y && y <= &self.y.1
    }

    fn meets(&self, other: &Enclosure) -> bool {
        self.x.0 <= other.x.1
            && other.x.0 <= self.x.1
            && self.y.0 <= other.y.1
            && other.y.0 <= self.y.1
    }

    fn inside(&self, other: &Enclosure) -> bool {
        self.x.0 >= other.x.0
            && self.x.1 <= other.x.1
            && self.y.0 >= other.y.0
            && self.y.1 <= other.y.1
    }
}

impl Serialize for Enclosure {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            x_lo: String,
            x_hi: String,
            y_lo: String,
            y_hi: String,
        }
        Repr {
            x_lo: dyadic_string(&self.x.0),
            x_hi: dyadic_string(&self.x.1),
            y_lo: dyadic_string(&self.y.0),
            y_hi: dyadic_string(&self.y.1),
        }
        .serialize(serializer)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointCount {
    pub count: usize,
    pub status: Certification,
    pub enclosures: Vec<Enclosure>,
    /// Boxes left undecided at the depth limit.
    pub unresolved: usize,
}

enum Krawczyk<B> {
    Empty,
    Unique(Interval<B>, Interval<B>),
    Unknown,
}

fn mid_f64<B: Bound>(iv: &Interval<B>) -> f64 {
    0.5 * (iv.lo.approx() + iv.hi.approx())
}

fn point_of<B: Bound>(v: f64) -> Interval<B> {
    Interval::from_rational(&f64_to_rational(v))
}

fn krawczyk<B: Bound>(ev: &MapEval<B>, x: &Interval<B>, y: &Interval<B>) -> Krawczyk<B> {
    let cx = Interval::point(x.midpoint());
    let cy = Interval::point(y.midpoint());
    let f1 = ev.disp[0].at(&cx, &cy);
    let f2 = ev.disp[1].at(&cx, &cy);
    let (j00, j01) = ev.disp[0].gradient(x, y);
    let (j10, j11) = ev.disp[1].gradient(x, y);
    let m = [
        [mid_f64(&j00), mid_f64(&j01)],
        [mid_f64(&j10), mid_f64(&j11)],
    ];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if !det.is_finite() || det.abs() < 1e-300 {
        return Krawczyk::Unknown;
    }
    let inv = [
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ];
    if inv.iter().flatten().any(|v| !v.is_finite()) {
        return Krawczyk::Unknown;
    }
    let y_ = inv.map(|row| row.map(point_of::<B>));
    let one = Interval::point(B::one());
    let dx = x.clone() - cx.clone();
    let dy = y.clone() - cy.clone();
    let c00 = one.clone() - y_[0][0].clone() * j00.clone() - y_[0][1].clone() * j10.clone();
    let c01 = -(y_[0][0].clone() * j01.clone()) - y_[0][1].clone() * j11.clone();
    let c10 = -(y_[1][0].clone() * j00) - y_[1][1].clone() * j10;
    let c11 = one - y_[1][0].clone() * j01 - y_[1][1].clone() * j11;
    let kx = cx - (y_[0][0].clone() * f1.clone() + y_[0][1].clone() * f2.clone())
        + c00 * dx.clone()
        + c01 * dy.clone();
    let ky = cy - (y_[1][0].clone() * f1 + y_[1][1].clone() * f2) + c10 * dx + c11 * dy;
    match (kx.intersect(x), ky.intersect(y)) {
        (None, _) | (_, None) => Krawczyk::Empty,
        _ if kx.strictly_inside(x) && ky.strictly_inside(y) => Krawczyk::Unique(kx, ky),
        _ => Krawczyk::Unknown,
    }
}

/// Shrink a certified box by iterating the Krawczyk operator.
fn tighten<B: Bound>(
    ev: &MapEval<B>,
    mut x: Interval<B>,
    mut y: Interval<B>,
    tol: f64,
) -> (Interval<B>, Interval<B>) {
    for _ in 0..100 {
        if x.width().approx() <= tol && y.width().approx() <= tol {
            break;
        }
        match krawczyk(ev, &x, &y) {
            Krawczyk::Unique(kx, ky) => {
                let nx = kx.intersect(&x).unwrap_or(kx);
                let ny = ky.intersect(&y).unwrap_or(ky);
                if nx == x && ny == y {
                    break;
                }
                x = nx;
                y = ny;
            }
            _ => break,
        }
    }
    (x, y)
}

/// Whether every value of `e` over the box lies in `[lo, hi]`, by adaptive subdivision.
fn range_within<B: Bound>(e: &Enclosed<B>, cell: GridCell, lo: &B, hi: &B, depth: u32) -> bool {
    let (x, y) = cell.intervals::<B>();
    let r = e.range(&x, &y);
    if &r.lo >= lo && &r.hi <= hi {
        return true;
    }
    if depth == 0 || &r.hi < lo || &r.lo > hi {
        return false;
    }
    cell.children()
        .into_iter()
        .all(|c| range_within(e, c, lo, hi, depth - 1))
}

/// Whether both components map `Q` into `[1/32, 31/32]`.
pub fn is_conservative_interior(map: &PolynomialMap2D) -> bool {
    let lo = f64_to_rational(1.0 / (1u64 << COUNT_MARGIN_LOG2) as f64);
    let hi = Rational::one() - &lo;
    [&map.p1, &map.p2].into_iter().all(|p| {
        let e = Enclosed::<f64>::new(p);
        range_within(
            &e,
            GridCell::ROOT,
            &lo.to_f64().unwrap(),
            &hi.to_f64().unwrap(),
            RANGE_CHECK_DEPTH,
        )
    })
}

/// Count fixed points of a conservative-interior map by Krawczyk isolation.
pub fn certified_fixed_point_count(
    map: &PolynomialMap2D,
    tol: &Rational,
) -> Result<FixedPointCount> {
    certified_fixed_point_count_with::<f64>(map, tol, DEFAULT_MAX_DEPTH)
}

/// [`certified_fixed_point_count`] with a chosen endpoint type and depth limit.
pub fn certified_fixed_point_count_with<B: Bound>(
    map: &PolynomialMap2D,
    tol: &Rational,
    max_depth: u32,
) -> Result<FixedPointCount> {
    if !is_conservative_interior(map) {
        return Err(Error::NotConservativeInterior);
    }
    if max_depth > MAX_LEVEL {
        return Err(Error::InvalidArgument(format!(
            "max_depth {max_depth} exceeds {MAX_LEVEL}"
        )));
    }
    let tol_f = tol.to_f64().unwrap_or(0.0).max(0.0);
    let ev = MapEval::<B>::new(map);
    // (enclosure, region in which its fixed point is the only one)
    let mut found: Vec<(Enclosure, Enclosure)> = Vec::new();
    let mut unresolved = 0usize;
    let mut ambiguous = false;
    let mut stack = vec![GridCell::ROOT];
    let mut visited = 0usize;
    while let Some(cell) = stack.pop() {
        visited += 1;
        if visited > COUNT_NODE_BUDGET {
            unresolved += stack.len() + 1;
            break;
        }
        let (x, y) = cell.intervals::<B>();
        let own = Enclosure::from_intervals(&x, &y);
        if found.iter().any(|(_, region)| own.inside(region)) || ev.excludes(&x, &y) {
            continue;
        }
        let mut certified = None;
        match krawczyk(&ev, &x, &y) {
            Krawczyk::Empty => continue,
            Krawczyk::Unique(kx, ky) => certified = Some((kx, ky, x.clone(), y.clone())),
            Krawczyk::Unknown if cell.level >= 2 => {
                // A fixed point on a cell edge never lands strictly inside; widen by a quarter.
                let quarter = x.width() / (B::one() + B::one() + B::one() + B::one());
                let wx = Interval::new(
                    B::sub_down(x.lo.clone(), quarter.clone()),
                    B::add_up(x.hi.clone(), quarter.clone()),
                );
                let wy = Interval::new(
                    B::sub_down(y.lo.clone(), quarter.clone()),
                    B::add_up(y.hi.clone(), quarter),
                );
                if let Krawczyk::Unique(kx, ky) = krawczyk(&ev, &wx, &wy) {
                    certified = Some((kx, ky, wx, wy));
                }
            }
            Krawczyk::Unknown => {}
        }
        match certified {
            Some((kx, ky, rx, ry)) => {
                let (ex, ey) = tighten(&ev, kx, ky, tol_f);
                found.push((
                    Enclosure::from_intervals(&ex, &ey),
                    Enclosure::from_intervals(&rx, &ry),
                ));
            }
            None if cell.level < max_depth => {
                stack.extend(cell.children().into_iter().rev());
            }
            None => unresolved += 1,
        }
    }
    // Deduplicate: overlapping enclosures name the same point when one lies in
    // the other's uniqueness region.
    let mut kept: Vec<(Enclosure, Enclosure)> = Vec::new();
    'outer: for (e, region) in found {
        for (ke, kr) in kept.iter_mut() {
            if e.meets(ke) {
                if e.inside(kr) || ke.inside(&region) {
                    if e.inside(ke) {
                        *ke = e.clone();
                    }
                    continue 'outer;
                }
                ambiguous = true;
            }
        }
        kept.push((e, region));
    }
    let status = if unresolved == 0 && !ambiguous {
        Certification::Complete
    } else {
        Certification::Incomplete
    };
    let mut enclosures: Vec<Enclosure> = kept.into_iter().map(|(e, _)| e).collect();
    enclosures.sort_by(|a, b| (&a.x.0, &a.y.0).cmp(&(&b.x.0, &b.y.0)));
    Ok(FixedPointCount {
        count: enclosures.len(),
        status,
        enclosures,
        unresolved,
    })
}

fn poly_interval(p: &Poly<Rational>, t: &Interval<Rational>) -> Interval<Rational> {
    p.coeffs()
        .iter()
        .rev()
        .fold(Interval::point(Rational::zero()), |acc, c| {
            acc * t.clone() + Interval::point(c.clone())
        })
}

/// Pull back a bivariate polynomial to the rational parametrisation of the circle
/// `(a + r(1-t^2)/(1+t^2), b + 2rt/(1+t^2))`, cleared of denominators.
pub fn circle_pullback(
    curve: &Poly2<Rational>,
    center: &(Rational, Rational),
    radius: &Rational,
) -> Poly<Rational> {
    let d = curve.total_degree();
    let one_plus = Poly::new(vec![Rational::one(), Rational::zero(), Rational::one()]);
    let xs = Poly::new(vec![
        &center.0 + radius,
        Rational::zero(),
        &center.0 - radius,
    ]);
    let ys = Poly::new(vec![
        center.1.clone(),
        radius * Rational::from_integer(2.into()),
        center.1.clone(),
    ]);
    curve.terms().fold(Poly::zero(), |acc, (i, j, c)| {
        let term = xs.pow(i as u32) * ys.pow(j as u32) * one_plus.pow((d - i - j) as u32);
        acc + term.scale(c)
    })
}

/// Count sign-changing roots of `g` in `(lo, hi]` by interval subdivision.
fn count_arc_roots(g: &Poly<Rational>, lo: &Rational, hi: &Rational) -> Result<usize> {
    let dg = g.derivative();
    let mut stack = vec![(lo.clone(), hi.clone(), 0u32)];
    let mut count = 0;
    while let Some((l, u, depth)) = stack.pop() {
        let t = Interval::new(l.clone(), u.clone());
        if !poly_interval(g, &t).contains_zero() {
            continue;
        }
        if !poly_interval(&dg, &t).contains_zero() {
            let (gl, gu) = (g.eval(&l), g.eval(&u));
            if !gl.is_zero() && (gl.signum() * gu.signum()) <= Rational::zero() {
                count += 1;
            }
            continue;
        }
        if depth >= ARC_MAX_DEPTH {
            return Err(Error::RadiusNotGeneric);
        }
        let m = (&l + &u) / Rational::from_integer(2.into());
        stack.push((m.clone(), u, depth + 1));
        stack.push((l, m, depth + 1));
    }
    Ok(count)
}

/// Number of transversal crossings of the curve's zero set with the circle of
/// `radius` around `center`, which must lie on the curve.
pub fn half_branch_count(
    curve: &Poly2<Rational>,
    center: &(Rational, Rational),
    radius: &Rational,
) -> Result<usize> {
    if !radius.is_positive() {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    if curve.is_zero() || !curve.eval(&center.0, &center.1).is_zero() {
        return Err(Error::NotOnCurve);
    }
    let g = circle_pullback(curve, center, radius);
    if g.is_zero() {
        return Err(Error::RadiusNotGeneric);
    }
    // t in [-1, 1) covers the arc x >= a; s = 1/t in (-1, 1] covers the rest, s = 0 being t = infinity.
    let deg = 2 * curve.total_degree();
    let mut h = g.coeffs().to_vec();
    h.resize(deg + 1, Rational::zero());
    h.reverse();
    let h = Poly::new(h);
    let one = Rational::one();
    let minus_one = -Rational::one();
    let mut total = count_arc_roots(&g, &minus_one, &one)?;
    // Shift the half-open window of g from (-1, 1] to [-1, 1).
    let at_end = |p: &Poly<Rational>, t: &Rational| -> Result<bool> {
        if !p.eval(t).is_zero() {
            return Ok(false);
        }
        if p.derivative().eval(t).is_zero() {
            return Err(Error::RadiusNotGeneric);
        }
        Ok(true)
    };
    if at_end(&g, &one)? {
        total -= 1;
    }
    if at_end(&g, &minus_one)? {
        total += 1;
    }
    total += count_arc_roots(&h, &minus_one, &one)?;
    Ok(total)
}

/// Outcome of the direction probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DirectionClass {
    Conservative,
    ExpansiveProbePassed,
    Unverified,
}

/// Vertices `(u, v)` of the 32 probe curves; `u` runs along the probed axis.
pub fn probe_curves() -> Vec<Vec<(Rational, Rational)>> {
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let mut curves = Vec::with_capacity(32);
    for k in 0..8 {
        let c = q(2 * k + 1, 16);
        let c_bar = Rational::one() - &c;
        curves.push(vec![(q(0, 1), c.clone()), (q(1, 1), c.clone())]);
        curves.push(vec![(q(0, 1), q(k, 7)), (q(1, 1), q(7 - k, 7))]);
        curves.push(vec![
            (q(0, 1), c.clone()),
            (q(1, 2), c_bar.clone()),
            (q(1, 1), c.clone()),
        ]);
        curves.push(vec![
            (q(0, 1), c.clone()),
            (q(1, 3), c.clone()),
            (q(2, 3), c_bar.clone()),
            (q(1, 1), c_bar),
        ]);
    }
    curves
}

const PROBE_SAMPLES: i64 = 32;

/// Conservative, probe-passed expansive, or undecided in direction `axis`.
pub fn direction_class(map: &PolynomialMap2D, axis: Axis) -> DirectionClass {
    let p = map.component(axis);
    let e = Enclosed::<f64>::new(p);
    if range_within(&e, GridCell::ROOT, &0.0, &1.0, RANGE_CHECK_DEPTH) {
        return DirectionClass::Conservative;
    }
    let (zero, one) = (Rational::zero(), Rational::one());
    let passes = probe_curves().iter().all(|curve| {
        let (mut low, mut high) = (false, false);
        for w in curve.windows(2) {
            for s in 0..=PROBE_SAMPLES {
                let lambda = BigRational::new(s.into(), PROBE_SAMPLES.into());
                let u = &w[0].0 + (&w[1].0 - &w[0].0) * &lambda;
                let v = &w[0].1 + (&w[1].1 - &w[0].1) * &lambda;
                let val = match axis {
                    Axis::X => p.eval(&u, &v),
                    Axis::Y => p.eval(&v, &u),
                };
                low |= val <= zero;
                high |= val >= one;
            }
        }
        low && high
    });
    if passes {
        DirectionClass::ExpansiveProbePassed
    } else {
        DirectionClass::Unverified
    }
}
