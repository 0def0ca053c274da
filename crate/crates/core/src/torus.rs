//! Exact piecewise-constant functions on the circle `T = [0, 1)`.
//!
//! Every function in the crate (multiplicities, filters, matrix sections) is a
//! [`PiecewiseFn`]: a [`Partition`] of the circle into half-open cells with
//! rational endpoints, and one value per cell. The value at a breakpoint is the
//! value of the cell starting there (right limit).
//!
//! Most operations build their output the same way: collect every point where
//! the result can jump, then evaluate at cell midpoints. Midpoints are interior
//! to every input cell involved, so the result is exact.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{GmraError, Result};
use crate::matrix::Matrix;
use crate::scalar::{Exact, Scalar};

pub type Rational = BigRational;

/// `n/d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || GmraError::Parse(format!("not a rational: {s:?}"));
    let strip = |t: &str| t.strip_prefix('+').unwrap_or(t).to_string();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = strip(n).parse().map_err(|_| bad())?;
            let d: BigInt = strip(d).parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(strip(s).parse().map_err(|_| bad())?)),
    }
}

/// Formats as `"p/q"`, or `"p"` for integers.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `x − ⌊x⌋`.
pub fn reduce_mod_1(x: &Rational) -> TorusPoint {
    TorusPoint(x - x.floor())
}

/// A point of the circle, stored as its representative in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TorusPoint(Rational);

impl TorusPoint {
    pub fn new(x: &Rational) -> Self {
        reduce_mod_1(x)
    }

    pub fn zero() -> Self {
        TorusPoint(Rational::zero())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_inner(self) -> Rational {
        self.0
    }

    /// Representative in `[−1/2, 1/2)`.
    pub fn centered(&self) -> Rational {
        if self.0 >= rat(1, 2) {
            &self.0 - Rational::one()
        } else {
            self.0.clone()
        }
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

/// Choice of real representative for points of the circle.
///
/// The preimages of `x` under `y ↦ Ny mod 1` are `(x̂ + l)/N` for
/// `l = 0, …, N−1`; which preimage receives which `l` depends on the lift `x̂`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Representative {
    /// `x̂ ∈ [−1/2, 1/2)`.
    #[default]
    Centered,
    /// `x̂ ∈ [0, 1)`.
    Unit,
}

impl Representative {
    pub fn lift(self, x: &TorusPoint) -> Rational {
        match self {
            Representative::Centered => x.centered(),
            Representative::Unit => x.value().clone(),
        }
    }

    /// Points where the lift jumps, besides 0.
    pub fn seams(self) -> Vec<Rational> {
        match self {
            Representative::Centered => vec![rat(1, 2)],
            Representative::Unit => Vec::new(),
        }
    }

    /// The preimage `(x̂ + l)/N mod 1`.
    pub fn preimage(self, x: &TorusPoint, l: u32, n: u32) -> TorusPoint {
        reduce_mod_1(&((self.lift(x) + int(l as i64)) / int(n as i64)))
    }

    /// For `y` on the circle, the pair `(Ny mod 1, l)` with `y` equal to the
    /// `l`-th preimage of `Ny mod 1`.
    pub fn branch_of(self, y: &TorusPoint, n: u32) -> (TorusPoint, u32) {
        let scaled = y.value() * int(n as i64);
        let x = reduce_mod_1(&scaled);
        let shift = (scaled - self.lift(&x)).to_integer();
        let l = shift.mod_floor(&BigInt::from(n));
        let l: u32 = l.try_into().expect("branch index fits in u32");
        (x, l)
    }
}

/// A half-open cell `[start, end)` of the circle, `end ≤ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellSpan {
    pub start: Rational,
    pub end: Rational,
}

impl CellSpan {
    pub fn midpoint(&self) -> Rational {
        (&self.start + &self.end) / int(2)
    }

    pub fn width(&self) -> Rational {
        &self.end - &self.start
    }
}

impl fmt::Display for CellSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {})",
            format_rational(&self.start),
            format_rational(&self.end)
        )
    }
}

impl Serialize for CellSpan {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [format_rational(&self.start), format_rational(&self.end)].serialize(s)
    }
}

/// Strictly increasing breakpoints in `[0, 1)`, starting at 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    points: Vec<TorusPoint>,
}

impl Partition {
    /// Validates an explicit breakpoint list.
    pub fn new(breakpoints: Vec<Rational>) -> Result<Self> {
        if breakpoints.first().is_none_or(|b| !b.is_zero()) {
            return Err(GmraError::InvalidPartition(
                "breakpoints must start at 0".into(),
            ));
        }
        if breakpoints.iter().any(|b| b.is_negative() || *b >= Rational::one()) {
            return Err(GmraError::InvalidPartition(
                "breakpoints must lie in [0, 1)".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GmraError::InvalidPartition(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Partition {
            points: breakpoints.into_iter().map(TorusPoint).collect(),
        })
    }

    /// Reduces each point mod 1, sorts, dedups and adds 0.
    pub fn from_points<'a, I: IntoIterator<Item = &'a Rational>>(points: I) -> Self {
        let mut pts: Vec<TorusPoint> = points.into_iter().map(reduce_mod_1).collect();
        pts.push(TorusPoint::zero());
        pts.sort();
        pts.dedup();
        Partition { points: pts }
    }

    pub fn trivial() -> Self {
        Partition {
            points: vec![TorusPoint::zero()],
        }
    }

    /// Number of cells.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = &Rational> + '_ {
        self.points.iter().map(|p| p.value())
    }

    pub fn cell(&self, k: usize) -> CellSpan {
        let end = self
            .points
            .get(k + 1)
            .map(|p| p.value().clone())
            .unwrap_or_else(Rational::one);
        CellSpan {
            start: self.points[k].value().clone(),
            end,
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = CellSpan> + '_ {
        (0..self.len()).map(move |k| self.cell(k))
    }

    /// Index of the cell containing `x`.
    pub fn locate(&self, x: &TorusPoint) -> usize {
        self.points.partition_point(|p| p <= x) - 1
    }

    /// Sorted union of breakpoints.
    pub fn refine(&self, other: &Partition) -> Partition {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.points.len() || j < other.points.len() {
            let next = match (self.points.get(i), other.points.get(j)) {
                (Some(a), Some(b)) => match a.cmp(b) {
                    Ordering::Less => {
                        i += 1;
                        a
                    }
                    Ordering::Greater => {
                        j += 1;
                        b
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        a
                    }
                },
                (Some(a), None) => {
                    i += 1;
                    a
                }
                (None, Some(b)) => {
                    j += 1;
                    b
                }
                (None, None) => unreachable!(),
            };
            out.push(next.clone());
        }
        Partition { points: out }
    }

    pub fn refine_points<'a, I: IntoIterator<Item = &'a Rational>>(&self, points: I) -> Partition {
        self.refine(&Partition::from_points(points))
    }

    /// `{(b + l)/N : b a breakpoint, 0 ≤ l < N}`: the breakpoints of `f∘Π_N`.
    pub fn dilation_preimage(&self, n: u32) -> Partition {
        let n_r = int(n as i64);
        let mut pts = Vec::with_capacity(self.len() * n as usize);
        for l in 0..n {
            for b in &self.points {
                pts.push(TorusPoint((b.value() + int(l as i64)) / &n_r));
            }
        }
        pts.sort();
        Partition { points: pts }
    }

    /// `{N b mod 1}`: where `x ↦ f((x̂+l)/N)` can jump.
    pub fn dilation_image(&self, n: u32) -> Partition {
        let n_r = int(n as i64);
        let scaled: Vec<Rational> = self.breakpoints().map(|b| b * &n_r).collect();
        Partition::from_points(scaled.iter())
    }

    /// True when every cell of `self` lies in a single cell of `coarse`.
    pub fn is_refinement_of(&self, coarse: &Partition) -> bool {
        coarse.points.iter().all(|p| self.points.binary_search(p).is_ok())
    }
}

/// A piecewise-constant function on the circle.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseFn<V> {
    partition: Partition,
    values: Vec<V>,
}

impl<V: Clone> PiecewiseFn<V> {
    pub fn new(partition: Partition, values: Vec<V>) -> Result<Self> {
        if values.len() != partition.len() {
            return Err(GmraError::LengthMismatch {
                expected: partition.len(),
                got: values.len(),
            });
        }
        Ok(PiecewiseFn { partition, values })
    }

    pub fn constant(v: V) -> Self {
        PiecewiseFn {
            partition: Partition::trivial(),
            values: vec![v],
        }
    }

    /// Builds a function on `partition` whose value on each cell is `f(midpoint)`.
    pub fn tabulate<F: FnMut(&Rational) -> V>(partition: Partition, mut f: F) -> Self {
        let values = partition.cells().map(|c| f(&c.midpoint())).collect();
        PiecewiseFn { partition, values }
    }

    /// Fallible [`PiecewiseFn::tabulate`]; the closure also receives the cell.
    pub fn try_tabulate<F>(partition: Partition, mut f: F) -> Result<Self>
    where
        F: FnMut(&CellSpan, &Rational) -> Result<V>,
    {
        let values = partition
            .cells()
            .map(|c| f(&c, &c.midpoint()))
            .collect::<Result<Vec<_>>>()?;
        Ok(PiecewiseFn { partition, values })
    }

    /// Function equal to `value` on the given intervals and `default` elsewhere.
    ///
    /// Endpoints may be any rationals (for instance in `[−1/2, 1/2)`); each
    /// interval `[a, b)` is read mod 1 and must have length at most 1. Later
    /// intervals win on overlaps.
    pub fn from_intervals(intervals: &[(Rational, Rational, V)], default: V) -> Result<Self> {
        for (a, b, _) in intervals {
            if b < a || (b - a) > Rational::one() {
                return Err(GmraError::InvalidArgument(format!(
                    "interval [{}, {}) is not a sub-arc of the circle",
                    format_rational(a),
                    format_rational(b)
                )));
            }
        }
        let partition =
            Partition::from_points(intervals.iter().flat_map(|(a, b, _)| [a, b]));
        Ok(Self::tabulate(partition, |m| {
            let mut v = default.clone();
            for (a, b, val) in intervals {
                if arc_contains(a, b, m) {
                    v = val.clone();
                }
            }
            v
        }))
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn cells(&self) -> impl Iterator<Item = (CellSpan, &V)> + '_ {
        self.partition.cells().zip(self.values.iter())
    }

    pub fn eval(&self, x: &TorusPoint) -> &V {
        &self.values[self.partition.locate(x)]
    }

    /// Evaluates at an arbitrary rational, reducing it mod 1 first.
    pub fn at(&self, x: &Rational) -> &V {
        self.eval(&reduce_mod_1(x))
    }

    pub fn map<W: Clone, F: FnMut(&V) -> W>(&self, f: F) -> PiecewiseFn<W> {
        PiecewiseFn {
            partition: self.partition.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    /// Cell-wise `op` on the common refinement.
    pub fn zip_map<W: Clone, U: Clone, F>(&self, other: &PiecewiseFn<W>, mut op: F) -> PiecewiseFn<U>
    where
        F: FnMut(&V, &W) -> U,
    {
        let partition = self.partition.refine(&other.partition);
        PiecewiseFn::tabulate(partition, |m| {
            let x = TorusPoint(m.clone());
            op(self.eval(&x), other.eval(&x))
        })
    }

    /// `x ↦ f(Nx mod 1)`.
    pub fn pullback_dilate(&self, n: u32) -> PiecewiseFn<V> {
        let n_r = int(n as i64);
        let partition = self.partition.dilation_preimage(n);
        PiecewiseFn::tabulate(partition, |m| self.at(&(m * &n_r)).clone())
    }

    /// `x ↦ f(x + t mod 1)`.
    pub fn translate(&self, t: &Rational) -> PiecewiseFn<V> {
        let shifted: Vec<Rational> = self.partition.breakpoints().map(|b| b - t).collect();
        let partition = Partition::from_points(shifted.iter());
        PiecewiseFn::tabulate(partition, |m| self.at(&(m + t)).clone())
    }

    /// `x ↦ f((x̂ + l)/N)`, the composition with the `l`-th inverse branch of `Π_N`.
    pub fn branch(&self, n: u32, l: u32, rep: Representative) -> PiecewiseFn<V> {
        let partition = self
            .partition
            .dilation_image(n)
            .refine_points(rep.seams().iter());
        PiecewiseFn::tabulate(partition, |m| {
            self.eval(&rep.preimage(&TorusPoint(m.clone()), l, n)).clone()
        })
    }

    /// Re-expresses the function on a finer partition.
    pub fn refine_to(&self, partition: &Partition) -> PiecewiseFn<V> {
        PiecewiseFn::tabulate(partition.clone(), |m| self.at(m).clone())
    }
}

impl<V: Clone + PartialEq> PiecewiseFn<V> {
    /// Merges adjacent cells with equal values (the cell at 0 is kept).
    pub fn simplify(&self) -> PiecewiseFn<V> {
        let mut points = Vec::new();
        let mut values: Vec<V> = Vec::new();
        for (p, v) in self.partition.points.iter().zip(&self.values) {
            if values.last() != Some(v) {
                points.push(p.clone());
                values.push(v.clone());
            }
        }
        PiecewiseFn {
            partition: Partition { points },
            values,
        }
    }

    /// Equality as functions (ignores redundant breakpoints).
    pub fn same_function(&self, other: &PiecewiseFn<V>) -> bool {
        self.zip_map(other, |a, b| a == b).values.iter().all(|&e| e)
    }
}

/// True when `m` lies in the arc `[a, b)` read mod 1.
fn arc_contains(a: &Rational, b: &Rational, m: &Rational) -> bool {
    if b - a >= Rational::one() {
        return true;
    }
    let start = reduce_mod_1(a).into_inner();
    let offset = reduce_mod_1(&(m - &start)).into_inner();
    offset < b - a
}

/// A finite union of half-open arcs, stored as an indicator function.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSet(PiecewiseFn<bool>);

impl IntervalSet {
    pub fn from_indicator(f: PiecewiseFn<bool>) -> Self {
        IntervalSet(f.simplify())
    }

    pub fn full() -> Self {
        IntervalSet(PiecewiseFn::constant(true))
    }

    pub fn empty() -> Self {
        IntervalSet(PiecewiseFn::constant(false))
    }

    /// Union of the arcs `[a, b)` (endpoints read mod 1).
    pub fn from_intervals(intervals: &[(Rational, Rational)]) -> Result<Self> {
        let tagged: Vec<_> = intervals
            .iter()
            .map(|(a, b)| (a.clone(), b.clone(), true))
            .collect();
        Ok(IntervalSet::from_indicator(PiecewiseFn::from_intervals(
            &tagged, false,
        )?))
    }

    pub fn indicator(&self) -> &PiecewiseFn<bool> {
        &self.0
    }

    pub fn contains(&self, x: &TorusPoint) -> bool {
        *self.0.eval(x)
    }

    pub fn is_empty(&self) -> bool {
        self.0.values.iter().all(|v| !v)
    }

    pub fn measure(&self) -> Rational {
        self.0
            .cells()
            .filter(|(_, &v)| v)
            .map(|(c, _)| c.width())
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Maximal arcs in `[0, 1)` (an arc through 0 is reported as two pieces).
    pub fn intervals(&self) -> Vec<CellSpan> {
        self.0
            .cells()
            .filter(|(_, &v)| v)
            .map(|(c, _)| c)
            .collect()
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::from_indicator(self.0.zip_map(&other.0, |a, b| *a && *b))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::from_indicator(self.0.zip_map(&other.0, |a, b| *a || *b))
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.0
            .zip_map(&other.0, |a, b| !*a || *b)
            .values
            .iter()
            .all(|&v| v)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.intervals().iter().map(|c| c.to_string()).collect();
        if parts.is_empty() {
            f.write_str("∅")
        } else {
            f.write_str(&parts.join(" ∪ "))
        }
    }
}

/// Values that can be stored in a serialized [`PiecewiseFn`].
pub trait CellValue: Sized {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

impl CellValue for u32 {
    fn to_json(&self) -> Value {
        json!(self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        v.as_u64()
            .and_then(|x| u32::try_from(x).ok())
            .ok_or_else(|| GmraError::Parse(format!("expected a nonnegative integer, got {v}")))
    }
}

impl CellValue for bool {
    fn to_json(&self) -> Value {
        json!(self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        v.as_bool()
            .ok_or_else(|| GmraError::Parse(format!("expected a boolean, got {v}")))
    }
}

impl CellValue for Complex64 {
    fn to_json(&self) -> Value {
        Scalar::to_json(self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        <Complex64 as Scalar>::from_json(v)
    }
}

impl CellValue for Exact {
    fn to_json(&self) -> Value {
        Scalar::to_json(self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        <Exact as Scalar>::from_json(v)
    }
}

impl<T: CellValue> CellValue for Vec<T> {
    fn to_json(&self) -> Value {
        Value::Array(self.iter().map(CellValue::to_json).collect())
    }
    fn from_json(v: &Value) -> Result<Self> {
        v.as_array()
            .ok_or_else(|| GmraError::Parse(format!("expected an array, got {v}")))?
            .iter()
            .map(T::from_json)
            .collect()
    }
}

impl<S: Scalar> CellValue for Matrix<S> {
    fn to_json(&self) -> Value {
        Value::Array(
            (0..self.rows())
                .map(|i| Value::Array((0..self.cols()).map(|j| self[(i, j)].to_json()).collect()))
                .collect(),
        )
    }
    fn from_json(v: &Value) -> Result<Self> {
        let rows = v
            .as_array()
            .ok_or_else(|| GmraError::Parse(format!("expected matrix rows, got {v}")))?;
        let parsed = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| GmraError::Parse(format!("expected a matrix row, got {r}")))?
                    .iter()
                    .map(S::from_json)
                    .collect::<Result<Vec<S>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(parsed)
    }
}

impl<V: CellValue + Clone> PiecewiseFn<V> {
    pub fn to_json(&self) -> Value {
        json!({
            "breakpoints": self.partition.breakpoints().map(format_rational).collect::<Vec<_>>(),
            "values": self.values.iter().map(CellValue::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bps = v
            .get("breakpoints")
            .and_then(Value::as_array)
            .ok_or_else(|| GmraError::Parse("missing \"breakpoints\" array".into()))?
            .iter()
            .map(|b| {
                b.as_str()
                    .ok_or_else(|| GmraError::Parse(format!("breakpoints are strings, got {b}")))
                    .and_then(parse_rational)
            })
            .collect::<Result<Vec<_>>>()?;
        let values = v
            .get("values")
            .and_then(Value::as_array)
            .ok_or_else(|| GmraError::Parse("missing \"values\" array".into()))?
            .iter()
            .map(V::from_json)
            .collect::<Result<Vec<_>>>()?;
        PiecewiseFn::new(Partition::new(bps)?, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(points: &[(i64, i64)]) -> Partition {
        Partition::new(points.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap()
    }

    fn half_indicator() -> PiecewiseFn<bool> {
        PiecewiseFn::new(part(&[(0, 1), (1, 2)]), vec![true, false]).unwrap()
    }

    #[test]
    fn reduce_mod_1_examples() {
        assert_eq!(reduce_mod_1(&rat(9, 7)).value(), &rat(2, 7));
        assert_eq!(reduce_mod_1(&rat(-1, 7)).value(), &rat(6, 7));
        assert_eq!(reduce_mod_1(&int(0)).value(), &int(0));
        assert_eq!(reduce_mod_1(&int(-3)).value(), &int(0));
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![]).is_err());
        assert!(Partition::new(vec![rat(1, 2)]).is_err());
        assert!(Partition::new(vec![int(0), rat(1, 2), rat(1, 3)]).is_err());
        assert!(Partition::new(vec![int(0), int(1)]).is_err());
        assert!(Partition::new(vec![int(0), rat(1, 2), rat(1, 2)]).is_err());
    }

    #[test]
    fn common_refinement_examples() {
        let trivial = Partition::trivial();
        assert_eq!(trivial.refine(&trivial), trivial);
        let p = part(&[(0, 1), (1, 2)]);
        let q = part(&[(0, 1), (1, 3), (2, 3)]);
        assert_eq!(p.refine(&q), part(&[(0, 1), (1, 3), (1, 2), (2, 3)]));
    }

    #[test]
    fn value_count_must_match() {
        assert!(PiecewiseFn::new(part(&[(0, 1), (1, 2)]), vec![1u32]).is_err());
    }

    #[test]
    fn eval_uses_right_limit() {
        let f = half_indicator();
        assert!(*f.eval(&TorusPoint::zero()));
        assert!(!*f.at(&rat(1, 2)));
        assert!(!*f.at(&rat(-1, 2)));
        assert!(*f.at(&rat(5, 4)));
    }

    #[test]
    fn pullback_of_constant_is_constant() {
        let f = PiecewiseFn::constant(7u32);
        let g = f.pullback_dilate(3);
        assert!(g.values().iter().all(|&v| v == 7));
        assert_eq!(g.simplify(), f);
    }

    #[test]
    fn pullback_of_half_indicator() {
        let g = half_indicator().pullback_dilate(2);
        assert_eq!(
            g.partition(),
            &part(&[(0, 1), (1, 4), (1, 2), (3, 4)])
        );
        assert_eq!(g.values(), &[true, false, true, false]);
    }

    #[test]
    fn translate_examples() {
        let f = half_indicator();
        assert!(f.translate(&int(0)).same_function(&f));
        let g = f.translate(&rat(1, 2));
        assert!(!*g.at(&rat(1, 4)));
        assert!(*g.at(&rat(3, 4)));
        assert!(g.translate(&rat(1, 2)).same_function(&f));
    }

    #[test]
    fn zip_map_examples() {
        let f = PiecewiseFn::new(part(&[(0, 1), (1, 3)]), vec![2u32, 5]).unwrap();
        let zero = PiecewiseFn::constant(0u32);
        assert!(f.zip_map(&zero, |a, b| a + b).same_function(&f));

        let a = IntervalSet::from_intervals(&[(rat(0, 1), rat(1, 2))]).unwrap();
        let b = IntervalSet::from_intervals(&[(rat(1, 4), rat(3, 4))]).unwrap();
        let prod = a.indicator().zip_map(b.indicator(), |x, y| *x && *y);
        let expected = IntervalSet::from_intervals(&[(rat(1, 4), rat(1, 2))]).unwrap();
        assert_eq!(IntervalSet::from_indicator(prod), expected);
    }

    #[test]
    fn from_intervals_wraps_negative_endpoints() {
        let s = IntervalSet::from_intervals(&[(rat(-1, 7), rat(1, 7))]).unwrap();
        assert!(s.contains(&TorusPoint::zero()));
        assert!(s.contains(&TorusPoint::new(&rat(6, 7))));
        assert!(!s.contains(&TorusPoint::new(&rat(1, 7))));
        assert_eq!(s.measure(), rat(2, 7));
    }

    #[test]
    fn branch_matches_definition() {
        let f = PiecewiseFn::new(part(&[(0, 1), (1, 5), (3, 5)]), vec![1u32, 2, 3]).unwrap();
        for rep in [Representative::Centered, Representative::Unit] {
            for l in 0..3 {
                let g = f.branch(3, l, rep);
                for k in 0..60 {
                    let x = TorusPoint::new(&rat(k, 60));
                    let direct = f.eval(&rep.preimage(&x, l, 3));
                    assert_eq!(g.eval(&x), direct);
                }
            }
        }
    }

    #[test]
    fn branch_of_inverts_preimage() {
        for rep in [Representative::Centered, Representative::Unit] {
            for k in 0..30 {
                let x = TorusPoint::new(&rat(k, 30));
                for l in 0..3 {
                    let y = rep.preimage(&x, l, 3);
                    assert_eq!(rep.branch_of(&y, 3), (x.clone(), l));
                }
            }
        }
    }

    #[test]
    fn rational_parse_format() {
        assert_eq!(parse_rational("3/14").unwrap(), rat(3, 14));
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("2").unwrap(), int(2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&rat(6, 14)), "3/7");
        assert_eq!(format_rational(&int(0)), "0");
    }

    #[test]
    fn json_round_trip_integer_values() {
        let f = PiecewiseFn::new(part(&[(0, 1), (1, 7), (3, 14)]), vec![2u32, 1, 0]).unwrap();
        let back = PiecewiseFn::<u32>::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn constant_near_helpers() {
        let s = IntervalSet::from_intervals(&[(rat(1, 4), rat(1, 2))]).unwrap();
        assert_eq!(s.intervals(), vec![CellSpan { start: rat(1, 4), end: rat(1, 2) }]);
        assert!(s.is_subset(&IntervalSet::full()));
        assert!(!IntervalSet::full().is_subset(&s));
        assert!(IntervalSet::empty().is_empty());
    }
}
