//! Multiplicity functions, their conjugates, level sets and the dimension
//! bookkeeping that indexes filter banks and loop elements.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{GmraError, Result};
use crate::torus::{
    format_rational, int, rat, reduce_mod_1, CellSpan, IntervalSet, PiecewiseFn,
    Rational, TorusPoint,
};

/// An integer-valued multiplicity `μ` together with the dilation `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicityFunction {
    mu: PiecewiseFn<u32>,
    n: u32,
    c: u32,
}

/// The conjugate multiplicity `μ̃(x) = Σ_l μ((x+l)/N) − μ(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugateMultiplicity {
    mu_tilde: PiecewiseFn<u32>,
    d: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyViolation {
    pub cell: CellSpan,
    pub mu: u32,
    pub preimage_sum: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyReport {
    pub pass: bool,
    pub cells_checked: usize,
    pub first_violation: Option<ConsistencyViolation>,
}

/// `S_i = {μ ≥ i}` for `i = 1..=c` and `S̃_k = {μ̃ ≥ k}` for `k = 1..=d`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSets {
    pub s: Vec<IntervalSet>,
    pub s_tilde: Vec<IntervalSet>,
}

impl LevelSets {
    /// `S_i`, 1-based.
    pub fn level(&self, i: usize) -> &IntervalSet {
        &self.s[i - 1]
    }

    /// `S̃_k`, 1-based.
    pub fn conjugate_level(&self, k: usize) -> &IntervalSet {
        &self.s_tilde[k - 1]
    }
}

/// `T_j = {μ(Nx)+μ̃(Nx) = j}`, `T_{i,j} = S_i ∩ T_j`, `Z_j = {μ+μ̃ = j}`.
#[derive(Clone, Debug)]
pub struct IndexPartitions {
    /// Indexed by `j = 0..=c+d`.
    pub t: Vec<IntervalSet>,
    /// `t_ij[i-1][j]` for `i = 1..=c`, `j = 0..=c+d`.
    pub t_ij: Vec<Vec<IntervalSet>>,
    /// Indexed by `j = 0..=c+d`.
    pub z: Vec<IntervalSet>,
}

impl MultiplicityFunction {
    pub fn new(mu: PiecewiseFn<u32>, n: u32) -> Result<Self> {
        if n < 2 {
            return Err(GmraError::InvalidDilation(n));
        }
        let mu = mu.simplify();
        let c = mu.values().iter().copied().max().unwrap_or(0);
        if c == 0 {
            return Err(GmraError::ZeroMultiplicity);
        }
        Ok(MultiplicityFunction { mu, n, c })
    }

    /// `μ ≡ value`.
    pub fn constant(value: u32, n: u32) -> Result<Self> {
        Self::new(PiecewiseFn::constant(value), n)
    }

    pub fn mu(&self) -> &PiecewiseFn<u32> {
        &self.mu
    }

    pub fn dilation(&self) -> u32 {
        self.n
    }

    /// Essential supremum of `μ`.
    pub fn c(&self) -> u32 {
        self.c
    }

    pub fn value(&self, x: &TorusPoint) -> u32 {
        *self.mu.eval(x)
    }

    /// `x ↦ Σ_{l<N} μ((x+l)/N)`.
    pub fn preimage_sum(&self) -> PiecewiseFn<u32> {
        let n_r = int(self.n as i64);
        let partition = self.mu.partition().dilation_image(self.n);
        PiecewiseFn::tabulate(partition, |m| {
            (0..self.n)
                .map(|l| *self.mu.at(&((m + int(l as i64)) / &n_r)))
                .sum()
        })
    }

    /// `μ(x) ≤ Σ_l μ((x+l)/N)` on every cell of the common refinement.
    pub fn check_consistency(&self) -> ConsistencyReport {
        let joint = self.mu.zip_map(&self.preimage_sum(), |&m, &s| (m, s));
        let first_violation = joint
            .cells()
            .find(|(_, (m, s))| m > s)
            .map(|(cell, &(mu, preimage_sum))| ConsistencyViolation {
                cell,
                mu,
                preimage_sum,
            });
        ConsistencyReport {
            pass: first_violation.is_none(),
            cells_checked: joint.partition().len(),
            first_violation,
        }
    }

    pub fn conjugate(&self) -> Result<ConjugateMultiplicity> {
        let diff = self
            .preimage_sum()
            .zip_map(&self.mu, |&s, &m| s as i64 - m as i64);
        if let Some((cell, &value)) = diff.cells().find(|(_, &v)| v < 0) {
            return Err(GmraError::NegativeConjugate { cell, value });
        }
        let mu_tilde = diff.map(|&v| v as u32).simplify();
        let d = mu_tilde.values().iter().copied().max().unwrap_or(0);
        Ok(ConjugateMultiplicity { mu_tilde, d })
    }

    pub fn level_sets(&self, cm: &ConjugateMultiplicity) -> LevelSets {
        let levels = |f: &PiecewiseFn<u32>, top: u32| -> Vec<IntervalSet> {
            (1..=top)
                .map(|i| IntervalSet::from_indicator(f.map(|&v| v >= i)))
                .collect()
        };
        LevelSets {
            s: levels(&self.mu, self.c),
            s_tilde: levels(&cm.mu_tilde, cm.d),
        }
    }

    /// `x ↦ μ(x) + μ̃(x)`, the dimension of the loop group fiber over `x`.
    pub fn fiber_dimension(&self, cm: &ConjugateMultiplicity) -> PiecewiseFn<u32> {
        self.mu.zip_map(&cm.mu_tilde, |a, b| a + b).simplify()
    }

    /// `x ↦ μ(Nx) + μ̃(Nx)`, the dimension of the filter bundle fiber over `x`.
    pub fn bundle_dimension(&self, cm: &ConjugateMultiplicity) -> PiecewiseFn<u32> {
        self.fiber_dimension(cm).pullback_dilate(self.n).simplify()
    }

    pub fn index_partitions(&self, cm: &ConjugateMultiplicity) -> IndexPartitions {
        let top = self.c + cm.d;
        let bundle = self.bundle_dimension(cm);
        let fiber = self.fiber_dimension(cm);
        let level = |f: &PiecewiseFn<u32>, j: u32| IntervalSet::from_indicator(f.map(|&v| v == j));
        let t: Vec<IntervalSet> = (0..=top).map(|j| level(&bundle, j)).collect();
        let z = (0..=top).map(|j| level(&fiber, j)).collect();
        let sets = self.level_sets(cm);
        let t_ij = sets
            .s
            .iter()
            .map(|s_i| t.iter().map(|t_j| s_i.intersection(t_j)).collect())
            .collect();
        IndexPartitions { t, t_ij, z }
    }
}

impl ConjugateMultiplicity {
    pub fn mu_tilde(&self) -> &PiecewiseFn<u32> {
        &self.mu_tilde
    }

    /// Essential supremum of `μ̃`: the number of high-pass filters.
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn value(&self, x: &TorusPoint) -> u32 {
        *self.mu_tilde.eval(x)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PointConstancy {
    pub point: String,
    pub radius: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstancyReport {
    pub pass: bool,
    pub points: Vec<PointConstancy>,
}

/// Default neighborhood radius around `p`: half the smaller of the two cells
/// meeting at `p` when `p` is a breakpoint, otherwise half the distance from
/// `p` to the boundary of its cell.
pub fn default_radius<V>(f: &PiecewiseFn<V>, p: &TorusPoint) -> Rational
where
    V: Clone,
{
    let partition = f.partition();
    let k = partition.locate(p);
    let cell = partition.cell(k);
    let x = p.value();
    let reach = if cell.start == *x {
        let prev = (k + partition.len() - 1) % partition.len();
        cell.width().min(partition.cell(prev).width())
    } else {
        (x - &cell.start).min(&cell.end - x)
    };
    reach / int(2)
}

/// Whether `f` is constant on `(p − r, p + r)` mod 1 for each point `p`.
///
/// Without an explicit radius, [`default_radius`] is used per point.
pub fn check_constant_near<V>(
    f: &PiecewiseFn<V>,
    points: &[TorusPoint],
    radius: Option<&Rational>,
) -> Result<ConstancyReport>
where
    V: Clone + PartialEq,
{
    if let Some(r) = radius {
        if *r <= Rational::zero() {
            return Err(GmraError::InvalidArgument("radius must be positive".into()));
        }
    }
    let verdicts: Vec<PointConstancy> = points
        .iter()
        .map(|p| {
            let r = radius.cloned().unwrap_or_else(|| default_radius(f, p));
            let pass = values_near(f, p, &r).windows(2).all(|w| w[0] == w[1]);
            PointConstancy {
                point: p.to_string(),
                radius: format_rational(&r),
                pass,
            }
        })
        .collect();
    Ok(ConstancyReport {
        pass: verdicts.iter().all(|v| v.pass),
        points: verdicts,
    })
}

/// Values of all cells meeting the open arc `(p − r, p + r)`.
fn values_near<'a, V: Clone>(f: &'a PiecewiseFn<V>, p: &TorusPoint, r: &Rational) -> Vec<&'a V> {
    if *r >= rat(1, 2) {
        return f.values().iter().collect();
    }
    let lo = p.value() - r;
    let hi = p.value() + r;
    // split the arc into pieces inside [0, 1)
    let mut arcs = Vec::new();
    if lo < Rational::zero() {
        arcs.push((lo + Rational::one(), Rational::one()));
        arcs.push((Rational::zero(), hi));
    } else if hi > Rational::one() {
        arcs.push((lo, Rational::one()));
        arcs.push((Rational::zero(), hi - Rational::one()));
    } else {
        arcs.push((lo, hi));
    }
    f.cells()
        .filter(|(cell, _)| arcs.iter().any(|(a, b)| cell.start < *b && cell.end > *a))
        .map(|(_, v)| v)
        .collect()
}

/// Points `l/N`, `0 ≤ l < N`.
pub fn lattice_points(n: u32) -> Vec<TorusPoint> {
    (0..n)
        .map(|l| reduce_mod_1(&rat(l as i64, n as i64)))
        .collect()
}
