//! Classical (`μ ≡ 1`) filter systems, scaling functions, wavelets and frame
//! diagnostics in the frequency domain.
//!
//! Conventions: `D̂f(x) = N^{−1/2} f(x/N)`, `T̂f(x) = e^{−2πix} f(x)`, and
//! `⟨f, g⟩ = ∫ f ḡ`. Trigonometric filters are `m(x) = Σ_v a_v e^{−2πivx}`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{GmraError, Result};
use crate::matrix::Matrix;
use crate::msystem::{DimensionProfile, MSystem};
use crate::multiplicity::{check_constant_near, MultiplicityFunction};
use crate::scalar::{Exact, Scalar};
use crate::torus::{
    format_rational, int, parse_rational, rat, reduce_mod_1, CellValue, Partition, PiecewiseFn,
    Rational, TorusPoint,
};

/// `Σ_v a_v e^{−2πivx}` with finitely many nonzero `a_v`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolynomial {
    coefficients: BTreeMap<i64, Complex64>,
}

impl TrigPolynomial {
    pub fn new<I: IntoIterator<Item = (i64, Complex64)>>(coefficients: I) -> Self {
        let mut map = BTreeMap::new();
        for (v, a) in coefficients {
            *map.entry(v).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        map.retain(|_, a| *a != Complex64::new(0.0, 0.0));
        TrigPolynomial { coefficients: map }
    }

    pub fn coefficients(&self) -> &BTreeMap<i64, Complex64> {
        &self.coefficients
    }

    /// Evaluates at `x` reduced mod 1, so large arguments keep full precision.
    pub fn eval(&self, x: &Rational) -> Complex64 {
        let t = reduce_mod_1(x).value().to_f64().unwrap_or(f64::NAN);
        self.eval_f64(t)
    }

    pub fn eval_f64(&self, x: f64) -> Complex64 {
        self.coefficients
            .iter()
            .map(|(&v, a)| a * Complex64::from_polar(1.0, -2.0 * PI * (v as f64) * x))
            .sum()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.coefficients
                .iter()
                .map(|(v, a)| json!([v, [a.re, a.im]]))
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let entries = v
            .as_array()
            .ok_or_else(|| GmraError::Parse("coefficients must be an array".into()))?;
        let parsed = entries
            .iter()
            .map(|e| {
                let pair = e
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .ok_or_else(|| GmraError::Parse(format!("expected [v, [re, im]], got {e}")))?;
                let freq = pair[0]
                    .as_i64()
                    .ok_or_else(|| GmraError::Parse(format!("bad frequency {}", pair[0])))?;
                Ok((freq, <Complex64 as Scalar>::from_json(&pair[1])?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TrigPolynomial::new(parsed))
    }
}

/// A classical filter: a trigonometric polynomial or an exact piecewise
/// constant function.
#[derive(Clone, Debug, PartialEq)]
pub enum ClassicalFilter {
    Trig(TrigPolynomial),
    Piecewise(PiecewiseFn<Exact>),
}

impl ClassicalFilter {
    pub fn eval_c64(&self, x: &Rational) -> Complex64 {
        match self {
            ClassicalFilter::Trig(p) => p.eval(x),
            ClassicalFilter::Piecewise(f) => f.at(x).to_c64(),
        }
    }

    pub fn as_piecewise(&self) -> Option<&PiecewiseFn<Exact>> {
        match self {
            ClassicalFilter::Piecewise(f) => Some(f),
            ClassicalFilter::Trig(_) => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            ClassicalFilter::Trig(p) => json!({"trig": p.to_json()}),
            ClassicalFilter::Piecewise(f) => json!({"piecewise": f.to_json()}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        if let Some(t) = v.get("trig") {
            Ok(ClassicalFilter::Trig(TrigPolynomial::from_json(t)?))
        } else if let Some(p) = v.get("piecewise") {
            Ok(ClassicalFilter::Piecewise(PiecewiseFn::from_json(p)?))
        } else {
            Err(GmraError::Parse(
                "a classical filter is {\"trig\": …} or {\"piecewise\": …}".into(),
            ))
        }
    }
}

/// The filters `m_0, …, m_{N−1}` of a classical m-system.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalMSystem {
    n: u32,
    filters: Vec<ClassicalFilter>,
}

/// One condition's verdict.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub condition: String,
    pub pass: bool,
    pub exact: bool,
    pub residual: f64,
    pub detail: Option<String>,
}

impl Verdict {
    fn new(condition: &str, pass: bool, exact: bool, residual: f64, detail: Option<String>) -> Self {
        Verdict {
            condition: condition.into(),
            pass,
            exact,
            residual,
            detail,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LowPassReport {
    pub pass: bool,
    pub value_at_zero: Verdict,
    pub power_sum: Verdict,
    pub regularity: Verdict,
    pub cohen: Verdict,
}

impl LowPassReport {
    /// Conditions (i), (ii) and (iv): value at 0, power sum, Cohen.
    pub fn pass_without_regularity(&self) -> bool {
        self.value_at_zero.pass && self.power_sum.pass && self.cohen.pass
    }
}

#[derive(Clone, Debug)]
pub struct LowPassOptions {
    /// Trigonometric filters are sampled at `k/2^grid_log2`.
    pub grid_log2: u32,
    pub tolerance: f64,
    /// Interval on which `m_0` must not vanish; `[−1/(2N), 1/(2N)]` by default.
    pub cohen_interval: Option<(Rational, Rational)>,
    /// Neighborhood of 0 for the constancy check of piecewise filters.
    pub radius: Option<Rational>,
}

impl Default for LowPassOptions {
    fn default() -> Self {
        LowPassOptions {
            grid_log2: 12,
            tolerance: 1e-12,
            cohen_interval: None,
            radius: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HighPassReport {
    pub pass: bool,
    pub exact: bool,
    pub worst_residual: f64,
    pub worst_point: Option<String>,
    pub points_checked: usize,
}

/// Breakpoints of `x ↦ f(x + l/N)` over all `l`.
fn shifted_partition(f: &PiecewiseFn<Exact>, n: u32) -> Partition {
    let pts: Vec<Rational> = (0..n)
        .flat_map(|l| {
            let shift = rat(l as i64, n as i64);
            f.partition()
                .breakpoints()
                .map(move |b| b - &shift)
                .collect::<Vec<_>>()
        })
        .collect();
    Partition::from_points(pts.iter())
}

fn grid_points(log2: u32) -> impl Iterator<Item = Rational> {
    let denom = 1i64 << log2;
    (0..denom).map(move |k| rat(k, denom))
}

/// Checks the low-pass conditions for `m_0` and dilation `N`:
/// (i) `m_0(0) = √N`, (ii) `Σ_l |m_0(x + l/N)|² = N`, (iii) regularity at 0
/// (automatic for trigonometric polynomials, constancy near 0 for piecewise
/// filters), (iv) Cohen's condition as `m_0 ≠ 0` almost everywhere on a
/// closed interval around 0.
pub fn check_classical_lowpass(m0: &ClassicalFilter, n: u32, opts: &LowPassOptions) -> LowPassReport {
    let tol = opts.tolerance;
    let (a, b) = opts.cohen_interval.clone().unwrap_or_else(|| {
        let h = rat(1, 2 * n as i64);
        (-h.clone(), h)
    });
    let (value_at_zero, power_sum, regularity, cohen) = match m0 {
        ClassicalFilter::Piecewise(f) => {
            let v0 = f.at(&int(0));
            let target = Exact::sqrt_int(n as u64);
            let value_at_zero = Verdict::new(
                "m0(0) = sqrt(N)",
                *v0 == target,
                true,
                v0.distance(&target),
                None,
            );
            let partition = shifted_partition(f, n);
            let mut worst = 0.0f64;
            let mut failure = None;
            for cell in partition.cells() {
                let mid = cell.midpoint();
                let sum = (0..n).fold(Exact::zero(), |acc, l| {
                    acc + f.at(&(&mid + rat(l as i64, n as i64))).norm_sqr()
                });
                let residual = sum.distance(&Exact::from_int(n as i64));
                worst = worst.max(residual);
                if sum != Exact::from_int(n as i64) && failure.is_none() {
                    failure = Some(format!("power sum is {sum} on {cell}"));
                }
            }
            let power_sum = Verdict::new("sum_l |m0(x+l/N)|^2 = N", failure.is_none(), true, worst, failure);
            let constancy = check_constant_near(f, &[TorusPoint::zero()], opts.radius.as_ref());
            let regularity = match constancy {
                Ok(r) => Verdict::new(
                    "constant near 0",
                    r.pass,
                    true,
                    0.0,
                    r.points.first().map(|p| format!("radius {}", p.radius)),
                ),
                Err(e) => Verdict::new("constant near 0", false, true, 0.0, Some(e.to_string())),
            };
            let cohen = piecewise_nonvanishing(f, &a, &b);
            (value_at_zero, power_sum, regularity, cohen)
        }
        ClassicalFilter::Trig(p) => {
            let v0 = p.eval_f64(0.0);
            let target = (n as f64).sqrt();
            let r0 = (v0 - target).norm();
            let value_at_zero = Verdict::new("m0(0) = sqrt(N)", r0 <= tol, false, r0, None);
            let mut worst = 0.0f64;
            for x in grid_points(opts.grid_log2) {
                let sum: f64 = (0..n)
                    .map(|l| p.eval(&(&x + rat(l as i64, n as i64))).norm_sqr())
                    .sum();
                worst = worst.max((sum - n as f64).abs());
            }
            let power_sum = Verdict::new("sum_l |m0(x+l/N)|^2 = N", worst <= tol, false, worst, None);
            let regularity = Verdict::new(
                "Lipschitz at 0",
                true,
                true,
                0.0,
                Some("trigonometric polynomials are smooth".into()),
            );
            let steps = 1i64 << opts.grid_log2;
            let width = &b - &a;
            let min = (0..=steps)
                .map(|k| p.eval(&(&a + &width * rat(k, steps))).norm())
                .fold(f64::INFINITY, f64::min);
            let cohen = Verdict::new(
                "m0 nonzero near 0",
                min > tol,
                false,
                min,
                Some(format!(
                    "min |m0| on [{}, {}]",
                    format_rational(&a),
                    format_rational(&b)
                )),
            );
            (value_at_zero, power_sum, regularity, cohen)
        }
    };
    LowPassReport {
        pass: value_at_zero.pass && power_sum.pass && regularity.pass && cohen.pass,
        value_at_zero,
        power_sum,
        regularity,
        cohen,
    }
}

/// `f ≠ 0` on every cell that meets `[a, b]` in positive length.
fn piecewise_nonvanishing(f: &PiecewiseFn<Exact>, a: &Rational, b: &Rational) -> Verdict {
    let pieces = if b - a >= Rational::one() {
        vec![(Rational::zero(), Rational::one())]
    } else {
        let (s, e) = (reduce_mod_1(a).into_inner(), reduce_mod_1(b).into_inner());
        if s < e || (s == e && a == b) {
            vec![(s, e)]
        } else {
            vec![(s, Rational::one()), (Rational::zero(), e)]
        }
    };
    let hit = f
        .cells()
        .find(|(cell, v)| {
            v.is_zero() && pieces.iter().any(|(s, e)| cell.start < *e && cell.end > *s)
        })
        .map(|(cell, _)| format!("m0 vanishes on {cell}"));
    Verdict::new("m0 nonzero near 0", hit.is_none(), true, 0.0, hit)
}

impl ClassicalMSystem {
    pub fn new(n: u32, filters: Vec<ClassicalFilter>) -> Result<Self> {
        if n < 2 {
            return Err(GmraError::InvalidDilation(n));
        }
        if filters.len() != n as usize {
            return Err(GmraError::Shape(format!(
                "dilation {n} needs {n} filters, got {}",
                filters.len()
            )));
        }
        Ok(ClassicalMSystem { n, filters })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn filters(&self) -> &[ClassicalFilter] {
        &self.filters
    }

    pub fn low_pass(&self) -> &ClassicalFilter {
        &self.filters[0]
    }

    fn all_piecewise(&self) -> Option<Vec<&PiecewiseFn<Exact>>> {
        self.filters.iter().map(ClassicalFilter::as_piecewise).collect()
    }

    /// `ℳ(x) = (m_i(x + l/N)/√N)_{i,l}` in floating point.
    pub fn polyphase_matrix(&self, x: &Rational) -> Matrix<Complex64> {
        let fs: Vec<_> = self
            .filters
            .iter()
            .map(|f| move |y: &Rational| f.eval_c64(y))
            .collect();
        crate::loopgroup::classical::polyphase_matrix(&fs, self.n, x)
    }

    /// Unitarity of `ℳ(x)`: exactly on every cell when all filters are
    /// piecewise, otherwise on the grid `k/2^grid_log2` within `tolerance`.
    pub fn check_highpass(&self, grid_log2: u32, tolerance: f64) -> HighPassReport {
        let mut worst = 0.0f64;
        let mut worst_point = None;
        let mut pass = true;
        let mut points = 0;
        if let Some(pw) = self.all_piecewise() {
            let partition = pw
                .iter()
                .fold(Partition::trivial(), |acc, f| acc.refine(&shifted_partition(f, self.n)));
            for cell in partition.cells() {
                let mid = cell.midpoint();
                let fs: Vec<_> = pw.iter().map(|f| move |y: &Rational| f.at(y).clone()).collect();
                let k: Matrix<Exact> = crate::loopgroup::classical::polyphase_matrix(&fs, self.n, &mid);
                let residual = k.unitarity_residual();
                points += 1;
                if residual > worst || (!k.is_unitary(0.0) && pass) {
                    worst = worst.max(residual);
                    worst_point = Some(cell.to_string());
                }
                if !k.is_unitary(0.0) {
                    pass = false;
                }
            }
            return HighPassReport {
                pass,
                exact: true,
                worst_residual: worst,
                worst_point,
                points_checked: points,
            };
        }
        for x in grid_points(grid_log2) {
            let residual = self.polyphase_matrix(&x).unitarity_residual();
            points += 1;
            if residual > worst {
                worst = residual;
                worst_point = Some(format_rational(&x));
            }
        }
        HighPassReport {
            pass: worst <= tolerance,
            exact: false,
            worst_residual: worst,
            worst_point,
            points_checked: points,
        }
    }

    fn profile(&self) -> DimensionProfile {
        DimensionProfile::new(MultiplicityFunction::constant(1, self.n).expect("N ≥ 2"))
            .expect("μ ≡ 1 is consistent")
    }

    /// The `μ ≡ 1` M-system with `M_{i+1} = m_i`, when every filter is piecewise.
    pub fn to_msystem_exact(&self) -> Option<MSystem<Exact>> {
        let pw = self.all_piecewise()?;
        let components = pw.into_iter().map(|f| vec![f.clone()]).collect();
        MSystem::from_components_unchecked(self.profile(), components).ok()
    }

    /// The `μ ≡ 1` M-system in floating point. Piecewise filters are converted
    /// as they are; trigonometric ones are sampled at the left endpoints of
    /// `2^cells_log2` equal cells.
    pub fn to_msystem_sampled(&self, cells_log2: u32) -> MSystem<Complex64> {
        let cells = 1i64 << cells_log2;
        let grid = Partition::new((0..cells).map(|k| rat(k, cells)).collect()).expect("increasing");
        let components = self
            .filters
            .iter()
            .map(|f| {
                vec![match f {
                    ClassicalFilter::Piecewise(p) => p.map(Scalar::to_c64),
                    ClassicalFilter::Trig(t) => {
                        let values = grid.breakpoints().map(|b| t.eval(b)).collect();
                        PiecewiseFn::new(grid.clone(), values).expect("sized")
                    }
                }]
            })
            .collect();
        MSystem::from_components_unchecked(self.profile(), components).expect("shape")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "N": self.n,
            "filters": self.filters.iter().map(ClassicalFilter::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let n = v
            .get("N")
            .and_then(Value::as_u64)
            .ok_or_else(|| GmraError::Parse("missing dilation \"N\"".into()))? as u32;
        let filters = v
            .get("filters")
            .and_then(Value::as_array)
            .ok_or_else(|| GmraError::Parse("missing \"filters\" array".into()))?
            .iter()
            .map(ClassicalFilter::from_json)
            .collect::<Result<Vec<_>>>()?;
        ClassicalMSystem::new(n, filters)
    }
}

/// The Haar system: `m_0(x) = (1 + e^{−2πix})/√2`, `m_1(x) = (1 − e^{−2πix})/√2`.
pub fn haar() -> ClassicalMSystem {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64| Complex64::new(re, 0.0);
    let m0 = TrigPolynomial::new([(0, c(s)), (1, c(s))]);
    let m1 = TrigPolynomial::new([(0, c(s)), (1, c(-s))]);
    ClassicalMSystem::new(2, vec![ClassicalFilter::Trig(m0), ClassicalFilter::Trig(m1)]).expect("two filters")
}

/// The Shannon system: `m_0 = √2·χ_[−1/4, 1/4)`, `m_1 = √2·χ_[1/4, 3/4)`.
pub fn shannon() -> ClassicalMSystem {
    let s = Exact::sqrt_int(2);
    let z = Exact::zero();
    let m0 = PiecewiseFn::from_intervals(&[(rat(-1, 4), rat(1, 4), s.clone())], z.clone())
        .expect("valid")
        .simplify();
    let m1 = PiecewiseFn::from_intervals(&[(rat(1, 4), rat(3, 4), s)], z)
        .expect("valid")
        .simplify();
    ClassicalMSystem::new(2, vec![ClassicalFilter::Piecewise(m0), ClassicalFilter::Piecewise(m1)])
        .expect("two filters")
}

/// Uniform grid `start + k·step`, `k = 0..len`, on the real line.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyGrid {
    pub start: Rational,
    pub step: Rational,
    pub len: usize,
}

impl FrequencyGrid {
    /// `[−half_width, half_width]` with both endpoints.
    pub fn symmetric(half_width: &Rational, step: &Rational) -> Result<Self> {
        if !step.is_positive() || !half_width.is_positive() {
            return Err(GmraError::InvalidArgument(
                "grid step and extent must be positive".into(),
            ));
        }
        let count = (half_width * int(2) / step).floor().to_integer();
        let len = count
            .to_usize()
            .ok_or_else(|| GmraError::InvalidArgument("grid too large".into()))?
            + 1;
        Ok(FrequencyGrid {
            start: -half_width.clone(),
            step: step.clone(),
            len,
        })
    }

    pub fn point(&self, k: usize) -> Rational {
        &self.start + &self.step * int(k as i64)
    }

    pub fn points(&self) -> impl Iterator<Item = Rational> + '_ {
        (0..self.len).map(move |k| self.point(k))
    }

    /// The grid scaled by `factor`.
    pub fn dilate(&self, factor: u32) -> FrequencyGrid {
        let f = int(factor as i64);
        FrequencyGrid {
            start: &self.start * &f,
            step: &self.step * f,
            len: self.len,
        }
    }
}

/// Samples of a function of frequency on a [`FrequencyGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyGridFn<S> {
    pub grid: FrequencyGrid,
    pub values: Vec<S>,
}

impl<S: Scalar> FrequencyGridFn<S> {
    /// Trapezoid rule for `∫ |f|²`.
    pub fn norm_sqr(&self) -> f64 {
        let h = self.grid.step.to_f64().unwrap_or(f64::NAN);
        let n = self.values.len();
        let sq: Vec<f64> = self.values.iter().map(|v| v.to_c64().norm_sqr()).collect();
        let inner: f64 = sq.iter().sum();
        let ends = if n > 0 { (sq[0] + sq[n - 1]) / 2.0 } else { 0.0 };
        h * (inner - ends)
    }

    pub fn max_distance(&self, other: &FrequencyGridFn<S>) -> f64 {
        if self.grid != other.grid {
            return f64::INFINITY;
        }
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }

    pub fn to_c64(&self) -> FrequencyGridFn<Complex64> {
        FrequencyGridFn {
            grid: self.grid.clone(),
            values: self.values.iter().map(Scalar::to_c64).collect(),
        }
    }

    /// `x,re,im` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,re,im\n");
        for (x, v) in self.grid.points().zip(&self.values) {
            let z = v.to_c64();
            let _ = writeln!(out, "{},{},{}", x.to_f64().unwrap_or(f64::NAN), z.re, z.im);
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "start": format_rational(&self.grid.start),
            "step": format_rational(&self.grid.step),
            "values": self.values.iter().map(Scalar::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |k: &str| {
            v.get(k)
                .and_then(Value::as_str)
                .ok_or_else(|| GmraError::Parse(format!("missing \"{k}\"")))
                .and_then(parse_rational)
        };
        let values = v
            .get("values")
            .and_then(Value::as_array)
            .ok_or_else(|| GmraError::Parse("missing \"values\"".into()))?
            .iter()
            .map(S::from_json)
            .collect::<Result<Vec<S>>>()?;
        Ok(FrequencyGridFn {
            grid: FrequencyGrid {
                start: field("start")?,
                step: field("step")?,
                len: values.len(),
            },
            values,
        })
    }
}

/// `Φ_J(x) = Π_{i=1}^{J} m_0(x/N^i)/√N` at every grid point.
///
/// Factors are multiplied in order `i = 1, 2, …`, so
/// `Φ_{J+1}(x) = Φ_J(x)·m_0(x/N^{J+1})/√N` holds bit for bit.
pub fn scaling_function<S, F>(m0: F, n: u32, depth: u32, grid: &FrequencyGrid) -> Result<FrequencyGridFn<S>>
where
    S: Scalar,
    F: Fn(&Rational) -> S,
{
    if depth == 0 {
        return Err(GmraError::InvalidArgument("depth must be at least 1".into()));
    }
    let inv = S::inv_sqrt_int(n as u64);
    let n_r = int(n as i64);
    let values = grid
        .points()
        .map(|x| {
            let mut y = x;
            let mut acc = S::one();
            for _ in 0..depth {
                // bounded filters keep a zero product at zero
                if acc.is_zero() {
                    break;
                }
                y /= &n_r;
                acc = acc * (m0(&y) * inv.clone());
            }
            acc
        })
        .collect();
    Ok(FrequencyGridFn {
        grid: grid.clone(),
        values,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TelescopingReport {
    pub depth: u32,
    pub exact: bool,
    pub max_residual: f64,
    pub points: usize,
}

/// Compares `Φ_{J+1}` with `Φ_J(x)·m_0(x/N^{J+1})/√N` at every grid point;
/// `exact` means equality (bit for bit in floating point).
pub fn telescoping_check<S, F>(m0: F, n: u32, depth: u32, grid: &FrequencyGrid) -> Result<TelescopingReport>
where
    S: Scalar,
    F: Fn(&Rational) -> S,
{
    let phi = scaling_function(&m0, n, depth, grid)?;
    let next = scaling_function(&m0, n, depth + 1, grid)?;
    let inv = S::inv_sqrt_int(n as u64);
    let scale = power(n, depth as i32 + 1);
    let mut exact = true;
    let mut max_residual = 0.0f64;
    for ((x, p), q) in grid.points().zip(&phi.values).zip(&next.values) {
        let predicted = p.clone() * (m0(&(x / &scale)) * inv.clone());
        exact &= predicted == *q;
        max_residual = max_residual.max(predicted.distance(q));
    }
    Ok(TelescopingReport {
        depth,
        exact,
        max_residual,
        points: grid.len,
    })
}

/// `Ψ_k = D̂(m_k Φ)`: `Ψ_k(Nξ) = N^{−1/2} m_k(ξ) Φ(ξ)` for `ξ` on the grid of
/// `Φ`, so the wavelets live on the grid dilated by `N`.
pub fn wavelet_family<S, F>(high_pass: &[F], n: u32, phi: &FrequencyGridFn<S>) -> Vec<FrequencyGridFn<S>>
where
    S: Scalar,
    F: Fn(&Rational) -> S,
{
    let inv = S::inv_sqrt_int(n as u64);
    let grid = phi.grid.dilate(n);
    high_pass
        .iter()
        .map(|m| FrequencyGridFn {
            grid: grid.clone(),
            values: phi
                .grid
                .points()
                .zip(&phi.values)
                .map(|(xi, p)| inv.clone() * m(&xi) * p.clone())
                .collect(),
        })
        .collect()
}

/// A step function on the line: disjoint pieces `[a, b)` with complex
/// amplitudes, sorted by start.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    pieces: Vec<(Rational, Rational, Complex64)>,
}

impl StepFunction {
    pub fn new(mut pieces: Vec<(Rational, Rational, Complex64)>) -> Result<Self> {
        pieces.retain(|(a, b, v)| a < b && *v != Complex64::new(0.0, 0.0));
        pieces.sort_by(|x, y| x.0.cmp(&y.0));
        if pieces.windows(2).any(|w| w[0].1 > w[1].0) {
            return Err(GmraError::InvalidArgument("pieces overlap".into()));
        }
        Ok(StepFunction { pieces })
    }

    pub fn zero() -> Self {
        StepFunction { pieces: Vec::new() }
    }

    pub fn pieces(&self) -> &[(Rational, Rational, Complex64)] {
        &self.pieces
    }

    /// `∫ |f|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.pieces
            .iter()
            .map(|(a, b, v)| (b - a).to_f64().unwrap_or(f64::NAN) * v.norm_sqr())
            .sum()
    }

    /// Reads grid samples as the step function equal to sample `k` on
    /// `[x_k, x_k + step)`; equal neighbors are merged.
    pub fn from_grid(f: &FrequencyGridFn<Complex64>) -> Self {
        let mut pieces: Vec<(Rational, Rational, Complex64)> = Vec::new();
        for (k, v) in f.values.iter().enumerate() {
            let a = f.grid.point(k);
            let b = &a + &f.grid.step;
            match pieces.last_mut() {
                Some(last) if last.2 == *v && last.1 == a => last.1 = b,
                _ => pieces.push((a, b, *v)),
            }
        }
        StepFunction::new(pieces).expect("grid cells are disjoint")
    }
}

/// A frequency-domain wavelet that is the indicator of a finite union of
/// half-open intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorWavelet {
    intervals: Vec<(Rational, Rational)>,
}

impl IndicatorWavelet {
    pub fn new(mut intervals: Vec<(Rational, Rational)>) -> Result<Self> {
        intervals.sort();
        if intervals.iter().any(|(a, b)| a >= b) || intervals.windows(2).any(|w| w[0].1 > w[1].0) {
            return Err(GmraError::InvalidArgument(
                "intervals must be nonempty and disjoint".into(),
            ));
        }
        Ok(IndicatorWavelet { intervals })
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn measure(&self) -> Rational {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.intervals.iter().any(|(a, b)| a <= x && x < b)
    }

    pub fn to_step(&self) -> StepFunction {
        StepFunction::new(
            self.intervals
                .iter()
                .map(|(a, b)| (a.clone(), b.clone(), Complex64::new(1.0, 0.0)))
                .collect(),
        )
        .expect("disjoint")
    }

    /// Samples on a grid (value at each grid point).
    pub fn sample(&self, grid: &FrequencyGrid) -> FrequencyGridFn<Complex64> {
        FrequencyGridFn {
            grid: grid.clone(),
            values: grid
                .points()
                .map(|x| Complex64::new(if self.contains(&x) { 1.0 } else { 0.0 }, 0.0))
                .collect(),
        }
    }
}

/// The Journé wavelet `χ` of `[−16/7, −2) ∪ [−1/2, −2/7) ∪ [2/7, 1/2) ∪ [2, 16/7)`.
pub fn journe_wavelet() -> IndicatorWavelet {
    IndicatorWavelet::new(vec![
        (rat(-16, 7), int(-2)),
        (rat(-1, 2), rat(-2, 7)),
        (rat(2, 7), rat(1, 2)),
        (int(2), rat(16, 7)),
    ])
    .expect("disjoint")
}

/// The Shannon wavelet `χ` of `[−1, −1/2) ∪ [1/2, 1)`.
pub fn shannon_wavelet() -> IndicatorWavelet {
    IndicatorWavelet::new(vec![(int(-1), rat(-1, 2)), (rat(1, 2), int(1))]).expect("disjoint")
}

/// Inclusive truncation ranges for the dilation and translation indices.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FrameRanges {
    pub j_min: i32,
    pub j_max: i32,
    pub v_min: i64,
    pub v_max: i64,
}

impl FrameRanges {
    pub fn symmetric(jmax: i32, vmax: i64) -> Self {
        FrameRanges {
            j_min: -jmax,
            j_max: jmax,
            v_min: -vmax,
            v_max: vmax,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FrameReport {
    pub sum: f64,
    pub target: f64,
    pub ratio: f64,
    pub terms: usize,
    pub ranges: FrameRanges,
}

/// `∫_A^B e^{2πi·t·x} dx` for rationals `A < B` and `t`.
fn exp_integral(a: &Rational, b: &Rational, t: &Rational) -> Complex64 {
    let width = (b - a).to_f64().unwrap_or(f64::NAN);
    if t.is_zero() {
        return Complex64::new(width, 0.0);
    }
    // e^{2πi t (A+B)/2} · sin(π t (B−A)) / (π t)
    let phase = reduce_mod_1(&(t * (a + b) / int(2))).into_inner();
    let u = (t * (b - a)).to_f64().unwrap_or(f64::NAN);
    let amplitude = width * sinc(PI * u);
    Complex64::from_polar(amplitude, 2.0 * PI * phase.to_f64().unwrap_or(f64::NAN))
}

fn sinc(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        z.sin() / z
    }
}

/// `N^j` as a rational, for any integer `j`.
fn power(n: u32, j: i32) -> Rational {
    let p = Rational::from_integer(num_bigint::BigInt::from(n).pow(j.unsigned_abs()));
    if j >= 0 {
        p
    } else {
        p.recip()
    }
}

/// `⟨f, D̂^j T̂^v ψ⟩`, integrated exactly piece by piece.
pub fn frame_coefficient(f: &StepFunction, psi: &StepFunction, n: u32, j: i32, v: i64) -> Complex64 {
    let scale = power(n, j);
    let t = int(v) / &scale;
    let mut acc = Complex64::new(0.0, 0.0);
    let scaled: Vec<(Rational, Rational, Complex64)> = psi
        .pieces
        .iter()
        .map(|(a, b, c)| (a * &scale, b * &scale, *c))
        .collect();
    let (mut i, mut k) = (0, 0);
    while i < f.pieces.len() && k < scaled.len() {
        let (fa, fb, fv) = &f.pieces[i];
        let (pa, pb, pv) = &scaled[k];
        let lo = if fa > pa { fa } else { pa };
        let hi = if fb < pb { fb } else { pb };
        if lo < hi {
            acc += fv * pv.conj() * exp_integral(lo, hi, &t);
        }
        if fb <= pb {
            i += 1;
        } else {
            k += 1;
        }
    }
    acc * (n as f64).powf(-(j as f64) / 2.0)
}

/// `Σ_{j, v, k} |⟨f, D̂^j T̂^v Ψ_k⟩|²` over the given ranges, with target `‖f‖²`.
pub fn frame_sum(f: &StepFunction, wavelets: &[StepFunction], n: u32, ranges: FrameRanges) -> Result<FrameReport> {
    if ranges.j_min > ranges.j_max || ranges.v_min > ranges.v_max {
        return Err(GmraError::InvalidArgument("empty truncation range".into()));
    }
    if n < 2 {
        return Err(GmraError::InvalidDilation(n));
    }
    let mut sum = 0.0;
    let mut terms = 0;
    for j in ranges.j_min..=ranges.j_max {
        for psi in wavelets {
            let row: Vec<f64> = (ranges.v_min..=ranges.v_max)
                .map(|v| frame_coefficient(f, psi, n, j, v).norm_sqr())
                .collect();
            terms += row.len();
            sum += pairwise_sum(&row);
        }
    }
    let target = f.norm_sqr();
    Ok(FrameReport {
        sum,
        target,
        ratio: if target > 0.0 { sum / target } else { f64::NAN },
        terms,
        ranges,
    })
}

/// [`frame_sum`] for grid-sampled inputs: each sample is held constant on its
/// grid cell and the products are integrated exactly cell by cell.
pub fn frame_sum_grid(
    f: &FrequencyGridFn<Complex64>,
    wavelets: &[FrequencyGridFn<Complex64>],
    n: u32,
    ranges: FrameRanges,
) -> Result<FrameReport> {
    let steps: Vec<StepFunction> = wavelets.iter().map(StepFunction::from_grid).collect();
    frame_sum(&StepFunction::from_grid(f), &steps, n, ranges)
}

/// Summation in a fixed binary tree, independent of any parallel split.
fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        len => {
            let (a, b) = xs.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

impl CellValue for FrequencyGridFn<Complex64> {
    fn to_json(&self) -> Value {
        FrequencyGridFn::to_json(self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        FrequencyGridFn::from_json(v)
    }
}
