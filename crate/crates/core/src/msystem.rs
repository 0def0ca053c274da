//! Generalized filter banks, M-systems and the unitary matrix field they
//! generate.
//!
//! An M-system over a multiplicity `μ` is a family `M_1, …, M_{c+d}` of
//! functions on the disjoint union `S_1 ⊔ … ⊔ S_c`. Component `a` restricted
//! to the copy of `S_{j}` is stored as `components[a][j-1]`, a
//! [`PiecewiseFn`] that vanishes off `S_j`. The first `c` components are the
//! low-pass filters `h_{a,j}`, the remaining `d` are the high-pass filters
//! `g_{k,j}`.
//!
//! For `x ∈ T`, the preimages of `x` under `Π_N(y) = Ny mod 1` are the pairs
//! `(l, j)` with `r_{(l,j)}(x) = (x̂+l)/N ∈ S_j`, listed lexicographically.
//! The matrix
//!
//! ```text
//! K(x)[a][λ(l,j)] = M_a(r_{(l,j)}(x)) / √N
//! ```
//!
//! with rows restricted to the components that are not forced to vanish, is
//! square of size `μ(x) + μ̃(x)` and unitary exactly when the family satisfies
//! the generalized conjugate mirror filter relations.

use serde::Serialize;

use crate::error::{GmraError, Result};
use crate::matrix::Matrix;
use crate::multiplicity::{
    check_constant_near, ConjugateMultiplicity, MultiplicityFunction,
};
use crate::scalar::Scalar;
use crate::torus::{
    int, CellSpan, Partition, PiecewiseFn, Rational, Representative, TorusPoint,
};

/// Default tolerance for floating point unitarity and orthogonality checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// A multiplicity function with its conjugate: everything that fixes the
/// dimensions of filter banks and loop group fibers.
#[derive(Clone, Debug, PartialEq)]
pub struct DimensionProfile {
    mf: MultiplicityFunction,
    cm: ConjugateMultiplicity,
}

/// A preimage `r_{(l,j)}(x)`: branch `l`, level `j` (1-based, as in `S_j`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Preimage {
    pub l: u32,
    pub j: u32,
    #[serde(skip)]
    pub point: TorusPoint,
}

/// The preimages of one point in lexicographic order; position in the list is
/// the column index `λ_x(l, j) − 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PreimageIndex {
    pub x: TorusPoint,
    pub pairs: Vec<Preimage>,
}

impl PreimageIndex {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// 0-based column of the pair `(l, j)`.
    pub fn position(&self, l: u32, j: u32) -> Option<usize> {
        self.pairs.iter().position(|p| p.l == l && p.j == j)
    }
}

impl DimensionProfile {
    pub fn new(mf: MultiplicityFunction) -> Result<Self> {
        let cm = mf.conjugate()?;
        Ok(DimensionProfile { mf, cm })
    }

    pub fn multiplicity(&self) -> &MultiplicityFunction {
        &self.mf
    }

    pub fn conjugate(&self) -> &ConjugateMultiplicity {
        &self.cm
    }

    pub fn n(&self) -> u32 {
        self.mf.dilation()
    }

    pub fn c(&self) -> usize {
        self.mf.c() as usize
    }

    pub fn d(&self) -> usize {
        self.cm.d() as usize
    }

    /// Number of M-system components, `c + d`.
    pub fn width(&self) -> usize {
        self.c() + self.d()
    }

    pub fn mu(&self, x: &TorusPoint) -> usize {
        self.mf.value(x) as usize
    }

    pub fn mu_tilde(&self, x: &TorusPoint) -> usize {
        self.cm.value(x) as usize
    }

    /// `μ(x) + μ̃(x)`.
    pub fn fiber_dim(&self, x: &TorusPoint) -> usize {
        self.mu(x) + self.mu_tilde(x)
    }

    /// Component indices (0-based) that may be nonzero on points `y` with
    /// `Ny ≡ x`: `h_1..h_{μ(x)}` followed by `g_1..g_{μ̃(x)}`.
    pub fn active_rows(&self, x: &TorusPoint) -> Vec<usize> {
        let c = self.c();
        (0..self.mu(x))
            .chain((0..self.mu_tilde(x)).map(|k| c + k))
            .collect()
    }

    pub fn preimage_list(&self, x: &TorusPoint, rep: Representative) -> PreimageIndex {
        preimage_list(&self.mf, x, rep)
    }

    /// Breakpoints where `μ`, `μ̃` or the preimage memberships can change.
    pub fn base_partition(&self, rep: Representative) -> Partition {
        self.mf
            .mu()
            .partition()
            .refine(self.cm.mu_tilde().partition())
            .refine(&self.mf.mu().partition().dilation_image(self.n()))
            .refine_points(rep.seams().iter())
    }

    /// `1/√N`.
    fn inv_sqrt_n<S: Scalar>(&self) -> S {
        S::inv_sqrt_int(self.n() as u64)
    }
}

/// The pairs `(l, j)`, `0 ≤ l < N`, `1 ≤ j ≤ μ((x̂+l)/N)`, in lexicographic order.
pub fn preimage_list(
    mf: &MultiplicityFunction,
    x: &TorusPoint,
    rep: Representative,
) -> PreimageIndex {
    let n = mf.dilation();
    let mut pairs = Vec::new();
    for l in 0..n {
        let y = rep.preimage(x, l, n);
        for j in 1..=mf.value(&y) {
            pairs.push(Preimage {
                l,
                j,
                point: y.clone(),
            });
        }
    }
    PreimageIndex {
        x: x.clone(),
        pairs,
    }
}

/// Verdict for one relation, with the worst residual seen.
#[derive(Clone, Debug, Serialize)]
pub struct EquationVerdict {
    pub equation: String,
    pub pass: bool,
    pub exact: bool,
    pub worst_residual: f64,
    pub worst_cell: Option<CellSpan>,
    pub detail: Option<String>,
}

impl EquationVerdict {
    fn new(equation: &str, exact: bool) -> Self {
        EquationVerdict {
            equation: equation.to_string(),
            pass: true,
            exact,
            worst_residual: 0.0,
            worst_cell: None,
            detail: None,
        }
    }

    /// Records one comparison; the first failing cell is kept as the witness.
    fn record<S: Scalar>(&mut self, got: &S, expected: &S, tol: f64, cell: &CellSpan, what: impl FnOnce() -> String) {
        let residual = got.distance(expected);
        let ok = got.agrees(expected, tol);
        if residual > self.worst_residual {
            self.worst_residual = residual;
            if self.pass {
                self.worst_cell = Some(cell.clone());
            }
        }
        if !ok && self.pass {
            self.pass = false;
            self.worst_cell = Some(cell.clone());
            self.detail = Some(what());
        }
    }

    fn fail(&mut self, cell: Option<CellSpan>, detail: String) {
        if self.pass {
            self.pass = false;
            self.worst_cell = cell;
            self.detail = Some(detail);
        }
    }

    fn into_error(self) -> GmraError {
        GmraError::InvalidBank {
            equation: self.equation,
            cell: self.worst_cell.unwrap_or(CellSpan {
                start: int(0),
                end: int(1),
            }),
            residual: self.worst_residual,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityReport {
    pub pass: bool,
    pub support: EquationVerdict,
    pub ortho1: EquationVerdict,
    pub ortho2: EquationVerdict,
    pub ortho3: EquationVerdict,
    pub low_pass: EquationVerdict,
}

impl OrthogonalityReport {
    /// Support and the three orthogonality relations (not the low-pass condition).
    pub fn relations_hold(&self) -> bool {
        self.support.pass && self.ortho1.pass && self.ortho2.pass && self.ortho3.pass
    }

    pub fn verdicts(&self) -> [&EquationVerdict; 5] {
        [
            &self.support,
            &self.ortho1,
            &self.ortho2,
            &self.ortho3,
            &self.low_pass,
        ]
    }
}

/// Generalized low-pass filters `h_{i,j}` (`c × c`) and high-pass filters
/// `g_{k,j}` (`d × c`); `h[i][j]` and `g[k][j]` are supported on `S_{j+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedFilterBank<S> {
    profile: DimensionProfile,
    h: Vec<Vec<PiecewiseFn<S>>>,
    g: Vec<Vec<PiecewiseFn<S>>>,
}

impl<S: Scalar> GeneralizedFilterBank<S> {
    pub fn new(
        profile: DimensionProfile,
        h: Vec<Vec<PiecewiseFn<S>>>,
        g: Vec<Vec<PiecewiseFn<S>>>,
    ) -> Result<Self> {
        let (c, d) = (profile.c(), profile.d());
        if h.len() != c || h.iter().any(|row| row.len() != c) {
            return Err(GmraError::Shape(format!("expected {c}x{c} low-pass filters")));
        }
        if g.len() != d || g.iter().any(|row| row.len() != c) {
            return Err(GmraError::Shape(format!("expected {d}x{c} high-pass filters")));
        }
        Ok(GeneralizedFilterBank { profile, h, g })
    }

    pub fn profile(&self) -> &DimensionProfile {
        &self.profile
    }

    /// `h_{i+1, j+1}`.
    pub fn h(&self, i: usize, j: usize) -> &PiecewiseFn<S> {
        &self.h[i][j]
    }

    /// `g_{k+1, j+1}`.
    pub fn g(&self, k: usize, j: usize) -> &PiecewiseFn<S> {
        &self.g[k][j]
    }

    fn filters(&self) -> impl Iterator<Item = &PiecewiseFn<S>> + '_ {
        self.h.iter().chain(self.g.iter()).flatten()
    }

    /// Checks supports, the three orthogonality relations and the low-pass
    /// normalization, cell by cell. Exact scalars are compared exactly;
    /// floating point ones within `tol`.
    pub fn verify_orthogonality(&self, tol: f64) -> OrthogonalityReport {
        let p = &self.profile;
        let (n, c, d) = (p.n(), p.c(), p.d());
        let exact = S::EXACT;
        let mut support = EquationVerdict::new("support", exact);
        let mut ortho1 = EquationVerdict::new("ortho1", exact);
        let mut ortho2 = EquationVerdict::new("ortho2", exact);
        let mut ortho3 = EquationVerdict::new("ortho3", exact);

        // support: h_{i,j}, g_{k,j} vanish off S_j
        for (idx, f) in self.filters().enumerate() {
            let j = idx % c;
            let label = if idx < c * c {
                format!("h_{{{},{}}}", idx / c + 1, j + 1)
            } else {
                format!("g_{{{},{}}}", (idx - c * c) / c + 1, j + 1)
            };
            let joint = f.zip_map(p.multiplicity().mu(), |v, &m| (v.clone(), m as usize));
            for (cell, (v, m)) in joint.cells() {
                if *m <= j {
                    support.record(v, &S::zero(), tol, &cell, || {
                        format!("{label} is nonzero off S_{}", j + 1)
                    });
                }
            }
        }

        let filter_partition = self
            .filters()
            .fold(Partition::trivial(), |acc, f| acc.refine(f.partition()));
        let partition = p
            .base_partition(Representative::Unit)
            .refine(&filter_partition.dilation_image(n));
        let n_r = int(n as i64);
        let target = S::from_int(n as i64);
        for cell in partition.cells() {
            let x = TorusPoint::new(&cell.midpoint());
            let ys: Vec<Rational> = (0..n)
                .map(|l| (x.value() + int(l as i64)) / &n_r)
                .collect();
            let sample = |f: &PiecewiseFn<S>| -> Vec<S> { ys.iter().map(|y| f.at(y).clone()).collect() };
            let hv: Vec<Vec<Vec<S>>> = self.h.iter().map(|row| row.iter().map(sample).collect()).collect();
            let gv: Vec<Vec<Vec<S>>> = self.g.iter().map(|row| row.iter().map(sample).collect()).collect();
            let inner = |a: &[Vec<S>], b: &[Vec<S>]| -> S {
                let mut acc = S::zero();
                for (fa, fb) in a.iter().zip(b) {
                    for (u, v) in fa.iter().zip(fb) {
                        acc = acc + u.clone() * v.conj();
                    }
                }
                acc
            };
            let mu = p.mu(&x);
            let mu_tilde = p.mu_tilde(&x);
            for i in 0..c {
                for k in 0..c {
                    let expected = if i == k && i < mu { target.clone() } else { S::zero() };
                    ortho1.record(&inner(&hv[i], &hv[k]), &expected, tol, &cell, || {
                        format!("Σ h_{} h̄_{} ≠ {}", i + 1, k + 1, if i == k && i < mu { "N" } else { "0" })
                    });
                }
            }
            for k in 0..d {
                for k2 in 0..d {
                    let expected = if k == k2 && k < mu_tilde { target.clone() } else { S::zero() };
                    ortho2.record(&inner(&gv[k], &gv[k2]), &expected, tol, &cell, || {
                        format!("Σ g_{} ḡ_{} ≠ {}", k + 1, k2 + 1, if k == k2 && k < mu_tilde { "N" } else { "0" })
                    });
                }
            }
            for i in 0..c {
                for k in 0..d {
                    ortho3.record(&inner(&hv[i], &gv[k]), &S::zero(), tol, &cell, || {
                        format!("Σ h_{} ḡ_{} ≠ 0", i + 1, k + 1)
                    });
                }
            }
        }

        let low_pass = self.low_pass_verdict(tol);
        let mut report = OrthogonalityReport {
            pass: false,
            support,
            ortho1,
            ortho2,
            ortho3,
            low_pass,
        };
        report.pass = report.verdicts().iter().all(|v| v.pass);
        report
    }

    /// `h_{1,1}(0) = √N`, `h_{i,j}(0) = 0` otherwise, `g_{k,1}(0) = 0`, and
    /// every filter constant on a neighborhood of 0.
    fn low_pass_verdict(&self, tol: f64) -> EquationVerdict {
        let mut v = EquationVerdict::new("low-pass", S::EXACT);
        let zero = TorusPoint::zero();
        let at_zero = CellSpan {
            start: int(0),
            end: int(0),
        };
        let sqrt_n = S::sqrt_int(self.profile.n() as u64);
        for (i, row) in self.h.iter().enumerate() {
            for (j, f) in row.iter().enumerate() {
                let expected = if i == 0 && j == 0 { sqrt_n.clone() } else { S::zero() };
                v.record(f.eval(&zero), &expected, tol, &at_zero, || {
                    format!("h_{{{},{}}}(0) ≠ {}", i + 1, j + 1, if i == 0 && j == 0 { "√N" } else { "0" })
                });
            }
        }
        for (k, row) in self.g.iter().enumerate() {
            v.record(row[0].eval(&zero), &S::zero(), tol, &at_zero, || {
                format!("g_{{{},1}}(0) ≠ 0", k + 1)
            });
        }
        for f in self.filters() {
            let report = check_constant_near(f, std::slice::from_ref(&zero), None).expect("default radius");
            if !report.pass {
                v.fail(Some(at_zero.clone()), "a filter is not constant near 0".into());
                break;
            }
        }
        v
    }

    /// `M_a = (h_{a,1}, …, h_{a,c})` for `a ≤ c`, `M_{c+k} = (g_{k,1}, …, g_{k,c})`.
    ///
    /// Rejects banks that fail the support or orthogonality relations.
    pub fn flatten(&self, tol: f64) -> Result<MSystem<S>> {
        let report = self.verify_orthogonality(tol);
        for v in [report.support, report.ortho1, report.ortho2, report.ortho3] {
            if !v.pass {
                return Err(v.into_error());
            }
        }
        Ok(self.flatten_unchecked())
    }

    pub fn flatten_unchecked(&self) -> MSystem<S> {
        MSystem {
            profile: self.profile.clone(),
            components: self.h.iter().chain(self.g.iter()).cloned().collect(),
        }
    }
}

/// Per-cell column-orthonormality verdict.
#[derive(Clone, Debug, Serialize)]
pub struct ColumnReport {
    pub pass: bool,
    pub columns: EquationVerdict,
}

/// A flattened filter family `M_1, …, M_{c+d}` on `S_1 ⊔ … ⊔ S_c`.
#[derive(Clone, Debug, PartialEq)]
pub struct MSystem<S> {
    profile: DimensionProfile,
    components: Vec<Vec<PiecewiseFn<S>>>,
}

/// The unitary matrix field `x ↦ K(x)` generated by an M-system.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryField<S> {
    pub profile: DimensionProfile,
    pub representative: Representative,
    pub field: PiecewiseFn<Matrix<S>>,
}

impl<S: Scalar> UnitaryField<S> {
    pub fn matrix_at(&self, x: &TorusPoint) -> &Matrix<S> {
        self.field.eval(x)
    }
}

impl<S: Scalar> MSystem<S> {
    /// Builds an M-system without checking any relation.
    pub fn from_components_unchecked(
        profile: DimensionProfile,
        components: Vec<Vec<PiecewiseFn<S>>>,
    ) -> Result<Self> {
        let (w, c) = (profile.width(), profile.c());
        if components.len() != w || components.iter().any(|row| row.len() != c) {
            return Err(GmraError::Shape(format!(
                "expected {w} components on {c} copies"
            )));
        }
        Ok(MSystem {
            profile,
            components,
        })
    }

    /// Builds an M-system and checks that its columns are orthonormal.
    pub fn from_components(
        profile: DimensionProfile,
        components: Vec<Vec<PiecewiseFn<S>>>,
        tol: f64,
    ) -> Result<Self> {
        let m = Self::from_components_unchecked(profile, components)?;
        m.validate(tol)?;
        Ok(m)
    }

    pub fn profile(&self) -> &DimensionProfile {
        &self.profile
    }

    /// `components()[a][j]` is `M_{a+1}` on the copy of `S_{j+1}`.
    pub fn components(&self) -> &[Vec<PiecewiseFn<S>>] {
        &self.components
    }

    /// `M_{a+1}` at `y` in the copy of `S_{j+1}`; zero off `S_{j+1}`.
    pub fn value(&self, a: usize, j: usize, y: &TorusPoint) -> S {
        if self.profile.mu(y) <= j {
            S::zero()
        } else {
            self.components[a][j].eval(y).clone()
        }
    }

    /// The filter bank this M-system flattens.
    pub fn to_bank(&self) -> GeneralizedFilterBank<S> {
        let c = self.profile.c();
        GeneralizedFilterBank {
            profile: self.profile.clone(),
            h: self.components[..c].to_vec(),
            g: self.components[c..].to_vec(),
        }
    }

    /// Common refinement of all component partitions.
    pub fn component_partition(&self) -> Partition {
        self.components
            .iter()
            .flatten()
            .fold(Partition::trivial(), |acc, f| acc.refine(f.partition()))
    }

    /// Partition of `T` on which the generated matrix field is constant.
    pub fn assembly_partition(&self, rep: Representative) -> Partition {
        self.profile
            .base_partition(rep)
            .refine(&self.component_partition().dilation_image(self.profile.n()))
    }

    /// The matrix `K(x)` and, if some component that should vanish at a
    /// preimage of `x` does not, the offending component index.
    pub fn matrix_at(&self, x: &TorusPoint, rep: Representative) -> (Matrix<S>, Option<usize>) {
        let p = &self.profile;
        let rows = p.active_rows(x);
        let pre = p.preimage_list(x, rep);
        let scale: S = p.inv_sqrt_n();
        let mut k = Matrix::zeros(rows.len(), pre.len());
        let mut forced = None;
        for (col, pr) in pre.pairs.iter().enumerate() {
            let j = pr.j as usize - 1;
            for a in 0..p.width() {
                let v = self.components[a][j].eval(&pr.point);
                match rows.iter().position(|&r| r == a) {
                    Some(row) => k[(row, col)] = scale.clone() * v.clone(),
                    None => {
                        if !v.is_zero() && forced.is_none() {
                            forced = Some(a);
                        }
                    }
                }
            }
        }
        (k, forced)
    }

    /// The matrix field `K(x)[a][λ_x(l,j)] = M_a(r_{(l,j)}(x))/√N`.
    ///
    /// Fails when a cell's matrix is not unitary, or when a component that
    /// must vanish (`h_i` with `i > μ(Ny)`, `g_k` with `k > μ̃(Ny)`) does not.
    pub fn assemble_unitary(&self, rep: Representative, tol: f64) -> Result<UnitaryField<S>> {
        let field = PiecewiseFn::try_tabulate(self.assembly_partition(rep), |cell, mid| {
            let x = TorusPoint::new(mid);
            let (k, forced) = self.matrix_at(&x, rep);
            if let Some(a) = forced {
                return Err(GmraError::InvalidMSystem {
                    reason: format!("component M_{} must vanish", a + 1),
                    cell: cell.clone(),
                });
            }
            if !k.is_unitary(tol) {
                return Err(GmraError::NotUnitary {
                    cell: cell.clone(),
                    residual: k.unitarity_residual(),
                });
            }
            Ok(k)
        })?;
        Ok(UnitaryField {
            profile: self.profile.clone(),
            representative: rep,
            field: field.simplify(),
        })
    }

    /// Reads an M-system off a matrix field: the inverse of
    /// [`MSystem::assemble_unitary`].
    pub fn from_unitary_field(field: &UnitaryField<S>) -> Result<Self> {
        let p = &field.profile;
        let rep = field.representative;
        let n = p.n();
        let (c, w) = (p.c(), p.width());
        let x_partition = field.field.partition().refine(&p.base_partition(rep));
        let y_partition = x_partition.dilation_preimage(n);
        let sqrt_n = S::sqrt_int(n as u64);
        // values[a][j][cell]
        let mut values = vec![vec![Vec::with_capacity(y_partition.len()); c]; w];
        for cell in y_partition.cells() {
            let y = TorusPoint::new(&cell.midpoint());
            let (x, l) = rep.branch_of(&y, n);
            let k = field.field.eval(&x);
            let rows = p.active_rows(&x);
            let pre = p.preimage_list(&x, rep);
            if k.rows() != rows.len() || k.cols() != pre.len() {
                return Err(GmraError::Shape(format!(
                    "matrix on {cell} is {}x{}, fiber dimension is {}",
                    k.rows(),
                    k.cols(),
                    pre.len()
                )));
            }
            let mu_y = p.mu(&y);
            for j in 0..c {
                let col = if j < mu_y { pre.position(l, j as u32 + 1) } else { None };
                for (a, slot) in values.iter_mut().enumerate() {
                    let v = match (col, rows.iter().position(|&r| r == a)) {
                        (Some(col), Some(row)) => sqrt_n.clone() * k[(row, col)].clone(),
                        _ => S::zero(),
                    };
                    slot[j].push(v);
                }
            }
        }
        let components = values
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|vals| {
                        PiecewiseFn::new(y_partition.clone(), vals).map(|f| f.simplify())
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_components_unchecked(p.clone(), components)
    }

    /// `Σ_a (1/N) M_a(r_{(l,j)}(x)) M̄_a(r_{(l',j')}(x)) = δ_{jj'} δ_{ll'}` over
    /// all `c + d` components, for every pair of preimages of every cell.
    pub fn verify_column_orthogonality(&self, tol: f64) -> ColumnReport {
        let p = &self.profile;
        let rep = Representative::Unit;
        let mut verdict = EquationVerdict::new("columns", S::EXACT);
        let inv_n = S::from_rational(&Rational::new(1.into(), (p.n() as i64).into()));
        for cell in self.assembly_partition(rep).cells() {
            let x = TorusPoint::new(&cell.midpoint());
            let pre = p.preimage_list(&x, rep);
            let cols: Vec<Vec<S>> = pre
                .pairs
                .iter()
                .map(|pr| {
                    (0..p.width())
                        .map(|a| self.components[a][pr.j as usize - 1].eval(&pr.point).clone())
                        .collect()
                })
                .collect();
            for (u, cu) in cols.iter().enumerate() {
                for (v, cv) in cols.iter().enumerate() {
                    let sum = cu
                        .iter()
                        .zip(cv)
                        .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.conj());
                    let got = inv_n.clone() * sum;
                    let expected = if u == v { S::one() } else { S::zero() };
                    verdict.record(&got, &expected, tol, &cell, || {
                        let (a, b) = (&pre.pairs[u], &pre.pairs[v]);
                        format!(
                            "column ({},{}) against ({},{})",
                            a.l, a.j, b.l, b.j
                        )
                    });
                }
            }
        }
        ColumnReport {
            pass: verdict.pass,
            columns: verdict,
        }
    }

    /// Support zeros, forced zeros and column orthonormality.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let report = self.to_bank().verify_orthogonality(tol);
        if !report.support.pass {
            return Err(report.support.into_error());
        }
        let columns = self.verify_column_orthogonality(tol);
        if !columns.pass {
            return Err(columns.columns.into_error());
        }
        self.assemble_unitary(Representative::Unit, tol).map(|_| ())
    }

    /// Largest pointwise distance between corresponding components.
    pub fn max_residual(&self, other: &MSystem<S>) -> f64 {
        if self.profile != other.profile {
            return f64::INFINITY;
        }
        self.components
            .iter()
            .flatten()
            .zip(other.components.iter().flatten())
            .map(|(f, g)| {
                f.zip_map(g, |a, b| a.distance(b))
                    .values()
                    .iter()
                    .copied()
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Exact equality as functions for exact scalars, `max_residual ≤ tol` otherwise.
    pub fn agrees(&self, other: &MSystem<S>, tol: f64) -> bool {
        if S::EXACT {
            self.profile == other.profile
                && self
                    .components
                    .iter()
                    .flatten()
                    .zip(other.components.iter().flatten())
                    .all(|(f, g)| f.same_function(g))
        } else {
            self.max_residual(other) <= tol
        }
    }
}
