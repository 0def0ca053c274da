//! The loop group of a multiplicity function and its action on M-systems.
//!
//! A loop element is a piecewise-constant section `x ↦ K(x)` with `K(x)` a
//! unitary of size `μ(x) + μ̃(x)`, equal to the identity at (and near) 0. It
//! acts on an M-system by
//!
//! ```text
//! (K·M)(y) = K(Ny mod 1) · (M_{a}(y))_{a active at Ny}
//! ```
//!
//! where the active components at `x` are `h_1..h_{μ(x)}, g_1..g_{μ̃(x)}`.
//! The action is free and transitive: [`connecting_element`] finds the unique
//! element carrying one M-system to another.

use serde::Serialize;

use crate::error::{GmraError, Result};
use crate::matrix::Matrix;
use crate::msystem::{DimensionProfile, MSystem};
use crate::multiplicity::check_constant_near;
use crate::scalar::Scalar;
use crate::torus::{
    CellSpan, Partition, PiecewiseFn, Rational, Representative, TorusPoint,
};

/// A section of the unitary group bundle over the circle.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopElement<S> {
    profile: DimensionProfile,
    section: PiecewiseFn<Matrix<S>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopReport {
    pub pass: bool,
    pub dimensions: bool,
    pub unitary: bool,
    pub worst_residual: f64,
    pub worst_cell: Option<CellSpan>,
    pub identity_at_zero: bool,
    pub constant_near_zero: bool,
    pub radius: Option<String>,
    pub reasons: Vec<String>,
}

fn check_profiles(a: &DimensionProfile, b: &DimensionProfile) -> Result<()> {
    if a != b {
        return Err(GmraError::ProfileMismatch(
            "operands are built over different multiplicity functions".into(),
        ));
    }
    Ok(())
}

impl<S: Scalar> LoopElement<S> {
    /// Checks that every cell carries a square matrix of size `μ(x)+μ̃(x)`.
    /// Unitarity and the normalization at 0 are checked by [`LoopElement::verify`].
    pub fn new(profile: DimensionProfile, section: PiecewiseFn<Matrix<S>>) -> Result<Self> {
        let dims = profile
            .multiplicity()
            .fiber_dimension(profile.conjugate());
        let joint = section.zip_map(&dims, |k, &d| (k.rows(), k.cols(), d as usize));
        if let Some((cell, (r, c, d))) = joint.cells().find(|(_, (r, c, d))| r != d || c != d) {
            return Err(GmraError::Shape(format!(
                "matrix on {cell} is {r}x{c}, fiber dimension is {d}"
            )));
        }
        Ok(LoopElement { profile, section })
    }

    pub fn identity(profile: &DimensionProfile) -> Self {
        let dims = profile
            .multiplicity()
            .fiber_dimension(profile.conjugate());
        LoopElement {
            profile: profile.clone(),
            section: dims.map(|&d| Matrix::identity(d as usize)),
        }
    }

    pub fn profile(&self) -> &DimensionProfile {
        &self.profile
    }

    pub fn section(&self) -> &PiecewiseFn<Matrix<S>> {
        &self.section
    }

    pub fn matrix_at(&self, x: &TorusPoint) -> &Matrix<S> {
        self.section.eval(x)
    }

    /// Pointwise product `x ↦ K1(x) K2(x)`.
    pub fn compose(&self, other: &LoopElement<S>) -> Result<LoopElement<S>> {
        check_profiles(&self.profile, &other.profile)?;
        let section = self
            .section
            .zip_map(&other.section, |a, b| a.matmul(b).expect("equal fiber dimensions"));
        Ok(LoopElement {
            profile: self.profile.clone(),
            section: section.simplify(),
        })
    }

    /// Pointwise adjoint.
    pub fn inverse(&self) -> LoopElement<S> {
        LoopElement {
            profile: self.profile.clone(),
            section: self.section.map(Matrix::adjoint),
        }
    }

    /// Largest entry-wise distance between the two sections.
    pub fn max_distance(&self, other: &LoopElement<S>) -> f64 {
        if self.profile != other.profile {
            return f64::INFINITY;
        }
        self.section
            .zip_map(&other.section, |a, b| a.max_distance(b))
            .values()
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    /// Distance to the identity section.
    pub fn distance_to_identity(&self) -> f64 {
        self.max_distance(&LoopElement::identity(&self.profile))
    }

    /// Exact equality as sections for exact scalars, `max_distance ≤ tol` otherwise.
    pub fn agrees(&self, other: &LoopElement<S>, tol: f64) -> bool {
        if S::EXACT {
            self.profile == other.profile && self.section.same_function(&other.section)
        } else {
            self.max_distance(other) <= tol
        }
    }

    /// `(K·M)(y) = K(Ny)·M(y)` on the active components.
    ///
    /// The action preserves the M-system relations; use [`LoopElement::act_checked`]
    /// to validate the input first.
    pub fn act(&self, m: &MSystem<S>) -> Result<MSystem<S>> {
        check_profiles(&self.profile, m.profile())?;
        let p = &self.profile;
        let n = p.n();
        let (c, w) = (p.c(), p.width());
        let dims = p.multiplicity().fiber_dimension(p.conjugate());
        let partition = m
            .component_partition()
            .refine(p.multiplicity().mu().partition())
            .refine(&self.section.partition().refine(dims.partition()).dilation_preimage(n));
        let mut values: Vec<Vec<Vec<S>>> = vec![vec![Vec::with_capacity(partition.len()); c]; w];
        let n_r = Rational::from_integer((n as i64).into());
        for cell in partition.cells() {
            let mid = cell.midpoint();
            let y = TorusPoint::new(&mid);
            let x = TorusPoint::new(&(&mid * &n_r));
            let k = self.section.eval(&x);
            let rows = p.active_rows(&x);
            let mu_y = p.mu(&y);
            for j in 0..c {
                let mut out = vec![S::zero(); w];
                if j < mu_y {
                    let v: Vec<S> = rows.iter().map(|&a| m.value(a, j, &y)).collect();
                    for (r, val) in k.apply(&v)?.into_iter().enumerate() {
                        out[rows[r]] = val;
                    }
                }
                for (a, val) in out.into_iter().enumerate() {
                    values[a][j].push(val);
                }
            }
        }
        let components = values
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|vals| PiecewiseFn::new(partition.clone(), vals).map(|f| f.simplify()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        MSystem::from_components_unchecked(p.clone(), components)
    }

    /// [`LoopElement::act`] after validating `m`.
    pub fn act_checked(&self, m: &MSystem<S>, tol: f64) -> Result<MSystem<S>> {
        m.validate(tol)?;
        self.act(m)
    }

    /// Unitarity, dimensions, `K(0) = Id` and constancy near 0.
    ///
    /// Without a radius, constancy is checked on half the cell adjacent to 0.
    pub fn verify(&self, tol: f64, radius: Option<&Rational>) -> LoopReport {
        let mut reasons = Vec::new();
        let dims = self
            .profile
            .multiplicity()
            .fiber_dimension(self.profile.conjugate());
        let joint = self.section.zip_map(&dims, |k, &d| (k.clone(), d as usize));
        let mut dimensions = true;
        let mut unitary = true;
        let mut worst_residual: f64 = 0.0;
        let mut worst_cell = None;
        for (cell, (k, d)) in joint.cells() {
            if k.rows() != *d || k.cols() != *d {
                if dimensions {
                    reasons.push(format!(
                        "matrix on {cell} is {}x{}, fiber dimension is {d}",
                        k.rows(),
                        k.cols()
                    ));
                }
                dimensions = false;
                continue;
            }
            let residual = k.unitarity_residual();
            let ok = k.is_unitary(tol);
            if residual > worst_residual || (!ok && unitary) {
                worst_residual = worst_residual.max(residual);
                if unitary {
                    worst_cell = Some(cell.clone());
                }
            }
            if !ok && unitary {
                unitary = false;
                worst_cell = Some(cell.clone());
                reasons.push(format!("matrix on {cell} is not unitary (residual {residual:e})"));
            }
        }
        let zero = TorusPoint::zero();
        let identity_at_zero = self.section.eval(&zero).is_identity(tol);
        if !identity_at_zero {
            reasons.push("K(0) is not the identity".into());
        }
        let constancy = check_constant_near(&self.section, &[zero], radius)
            .map_err(|e| reasons.push(e.to_string()))
            .ok();
        let constant_near_zero = constancy.as_ref().is_some_and(|r| r.pass);
        if constancy.is_some() && !constant_near_zero {
            reasons.push("section is not constant near 0".into());
        }
        LoopReport {
            pass: dimensions && unitary && identity_at_zero && constant_near_zero,
            dimensions,
            unitary,
            worst_residual,
            worst_cell,
            identity_at_zero,
            constant_near_zero,
            radius: constancy.and_then(|r| r.points.first().map(|p| p.radius.clone())),
            reasons,
        }
    }
}

/// The element `K` with `K·M = M̃`:
///
/// ```text
/// K_{i,i'}(x) = (1/N) Σ_{(l,j)} M̄_{i'}(r_{(l,j)}(x)) M̃_i(r_{(l,j)}(x)),
/// ```
///
/// that is `K(x) = Ũ(x) U(x)*` for the matrix fields `U`, `Ũ` of `M`, `M̃`.
/// Fails if either system has a non-unitary cell (beyond `tol`) or a nonzero
/// forced zero.
pub fn connecting_element<S: Scalar>(
    m: &MSystem<S>,
    target: &MSystem<S>,
    tol: f64,
) -> Result<LoopElement<S>> {
    check_profiles(m.profile(), target.profile())?;
    let rep = Representative::Centered;
    let partition: Partition = m
        .assembly_partition(rep)
        .refine(&target.assembly_partition(rep));
    let section = PiecewiseFn::try_tabulate(partition, |cell, mid| {
        let x = TorusPoint::new(mid);
        let mut pair = Vec::with_capacity(2);
        for sys in [m, target] {
            let (u, forced) = sys.matrix_at(&x, rep);
            if let Some(a) = forced {
                return Err(GmraError::InvalidMSystem {
                    reason: format!("component M_{} must vanish", a + 1),
                    cell: cell.clone(),
                });
            }
            if !u.is_unitary(tol) {
                return Err(GmraError::NotUnitary {
                    cell: cell.clone(),
                    residual: u.unitarity_residual(),
                });
            }
            pair.push(u);
        }
        pair[1].matmul(&pair[0].adjoint())
    })?;
    LoopElement::new(m.profile().clone(), section.simplify())
}

/// Formulas for `μ ≡ 1`, written directly in terms of filter functions
/// `m_0, …, m_{N−1}` evaluated at rationals.
pub mod classical {
    use super::*;
    use crate::torus::int;

    /// `ℳ(x) = (m_i(x + l/N)/√N)_{i,l}`.
    pub fn polyphase_matrix<S, F>(filters: &[F], n: u32, x: &Rational) -> Matrix<S>
    where
        S: Scalar,
        F: Fn(&Rational) -> S,
    {
        let scale = S::inv_sqrt_int(n as u64);
        let mut k = Matrix::zeros(filters.len(), n as usize);
        for (i, m) in filters.iter().enumerate() {
            for l in 0..n {
                let y = x + Rational::new((l as i64).into(), (n as i64).into());
                k[(i, l as usize)] = scale.clone() * m(&y);
            }
        }
        k
    }

    /// `[K·m]_i(x) = Σ_j K(Nx)_{i,j} m_j(x)`.
    pub fn act<S, K, F>(k: K, filters: &[F], n: u32, x: &Rational) -> Vec<S>
    where
        S: Scalar,
        K: Fn(&Rational) -> Matrix<S>,
        F: Fn(&Rational) -> S,
    {
        let kx = k(&(x * int(n as i64)));
        let v: Vec<S> = filters.iter().map(|m| m(x)).collect();
        kx.apply(&v).expect("N x N matrix")
    }

    /// `k_{i,j}(x) = (1/N) Σ_l m̃_i((x+l)/N) m̄_j((x+l)/N)`.
    pub fn connecting<S, F, G>(from: &[F], to: &[G], n: u32, x: &Rational) -> Matrix<S>
    where
        S: Scalar,
        F: Fn(&Rational) -> S,
        G: Fn(&Rational) -> S,
    {
        let inv_n = S::from_rational(&Rational::new(1.into(), (n as i64).into()));
        let ys: Vec<Rational> = (0..n)
            .map(|l| (x + int(l as i64)) / int(n as i64))
            .collect();
        let mut k = Matrix::zeros(to.len(), from.len());
        for (i, mt) in to.iter().enumerate() {
            for (j, m) in from.iter().enumerate() {
                let sum = ys
                    .iter()
                    .fold(S::zero(), |acc, y| acc + mt(y) * m(y).conj());
                k[(i, j)] = inv_n.clone() * sum;
            }
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{journe_msystem, journe_multiplicity};
    use crate::random::{random_loop_element, random_msystem};
    use crate::scalar::Exact;
    use crate::torus::rat;

    fn journe_profile() -> DimensionProfile {
        DimensionProfile::new(journe_multiplicity()).unwrap()
    }

    /// The swap on `P_4`, identity elsewhere.
    fn journe_swap() -> LoopElement<Exact> {
        let p = journe_profile();
        let dims = p.multiplicity().fiber_dimension(p.conjugate());
        let p4 = |x: &Rational| *x >= rat(3, 7) && *x < rat(4, 7);
        let section = dims
            .refine_to(&dims.partition().refine_points([rat(3, 7), rat(4, 7)].iter()))
            .partition()
            .clone();
        let section = PiecewiseFn::tabulate(section, |m| {
            if p4(m) {
                Matrix::permutation(&[1, 0])
            } else {
                Matrix::identity(*dims.at(m) as usize)
            }
        });
        LoopElement::new(p, section).unwrap()
    }

    #[test]
    fn identity_acts_trivially() {
        let m = journe_msystem();
        let id = LoopElement::identity(m.profile());
        assert!(id.act(&m).unwrap().agrees(&m, 0.0));
        assert!(id.verify(0.0, None).pass);
    }

    #[test]
    fn swap_is_self_inverse() {
        let k = journe_swap();
        assert!(k.verify(0.0, None).pass);
        assert!(k.inverse().agrees(&k, 0.0));
        assert!(k.compose(&k).unwrap().agrees(&LoopElement::identity(k.profile()), 0.0));
    }

    #[test]
    fn exact_round_trip_through_a_known_element() {
        let m = journe_msystem();
        let k = journe_swap();
        let target = k.act(&m).unwrap();
        target.validate(0.0).unwrap();
        assert!(!target.agrees(&m, 0.0));
        let back = connecting_element(&m, &target, 0.0).unwrap();
        assert!(back.agrees(&k, 0.0));
        assert!(back.act(&m).unwrap().agrees(&target, 0.0));
    }

    #[test]
    fn connecting_a_system_to_itself_gives_identity() {
        let m = journe_msystem();
        let k = connecting_element(&m, &m, 0.0).unwrap();
        assert!(k.agrees(&LoopElement::identity(m.profile()), 0.0));
    }

    #[test]
    fn random_elements_form_a_group() {
        let p = journe_profile();
        let a = random_loop_element(&p, 1);
        let b = random_loop_element(&p, 2);
        let ab = a.compose(&b).unwrap();
        assert!(ab.verify(1e-12, None).pass);
        assert!(a.compose(&a.inverse()).unwrap().distance_to_identity() <= 1e-14);
    }

    #[test]
    fn action_on_random_system() {
        let p = journe_profile();
        let m = random_msystem(&p, 4);
        let k = random_loop_element(&p, 9);
        let km = k.act(&m).unwrap();
        km.validate(1e-12).unwrap();
        let back = connecting_element(&m, &km, 1e-12).unwrap();
        assert!(back.max_distance(&k) <= 1e-12);
    }

    #[test]
    fn verify_flags_bad_sections() {
        let p = journe_profile();
        let dims = p.multiplicity().fiber_dimension(p.conjugate());
        let scaled = dims.map(|&d| Matrix::<Exact>::identity(d as usize).map(|z| z.clone() * Exact::from_int(2)));
        let report = LoopElement::new(p.clone(), scaled).unwrap().verify(0.0, None);
        assert!(!report.unitary && !report.identity_at_zero && !report.pass);

        let swap_at_zero = dims.map(|&d| {
            if d == 3 {
                Matrix::<Exact>::permutation(&[0, 2, 1])
            } else {
                Matrix::identity(d as usize)
            }
        });
        let report = LoopElement::new(p, swap_at_zero).unwrap().verify(0.0, None);
        assert!(report.unitary);
        assert!(!report.identity_at_zero);
        assert!(!report.pass);
    }

    #[test]
    fn wrong_dimensions_are_rejected() {
        let p = journe_profile();
        let section = PiecewiseFn::constant(Matrix::<Exact>::identity(2));
        assert!(LoopElement::new(p, section).is_err());
    }

    #[test]
    fn classical_connecting_matches_gram_product() {
        use num_complex::Complex64;
        fn haar(sign: f64) -> impl Fn(&Rational) -> Complex64 {
            move |x| {
                let t = -2.0 * std::f64::consts::PI * num_traits::ToPrimitive::to_f64(x).unwrap();
                (Complex64::new(1.0, 0.0) + sign * Complex64::from_polar(1.0, t))
                    / std::f64::consts::SQRT_2
            }
        }
        let fs: Vec<Box<dyn Fn(&Rational) -> Complex64>> = vec![Box::new(haar(1.0)), Box::new(haar(-1.0))];
        for k in 0..16 {
            let x = rat(k, 16);
            let id = classical::connecting(&fs, &fs, 2, &x);
            assert!(id.is_identity(1e-14));
            let m = classical::polyphase_matrix(&fs, 2, &x);
            assert!(m.is_unitary(1e-14));
        }
    }
}
