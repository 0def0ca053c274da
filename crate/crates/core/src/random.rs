//! Seeded random multiplicity functions, unitaries, M-systems and loop
//! elements.
//!
//! Every generator takes an explicit `u64` seed and uses ChaCha8, so output is
//! reproducible across platforms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{GmraError, Result};
use crate::loopgroup::LoopElement;
use crate::matrix::Matrix;
use crate::msystem::{DimensionProfile, GeneralizedFilterBank, MSystem, UnitaryField};
use crate::multiplicity::MultiplicityFunction;
use crate::scalar::Scalar;
use crate::torus::{int, rat, Partition, PiecewiseFn, Rational, Representative, TorusPoint};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A Haar-distributed unitary: Gram–Schmidt on the columns of a complex
/// Gaussian matrix. Normalizing each column makes the diagonal of the implied
/// `R` factor positive, which is the phase convention that yields Haar measure.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix<Complex64> {
    loop {
        let mut cols: Vec<Vec<Complex64>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex64::new(re, im)
                    })
                    .collect()
            })
            .collect();
        if orthonormalize(&mut cols) {
            let mut m = Matrix::zeros(dim, dim);
            for (j, col) in cols.iter().enumerate() {
                for (i, z) in col.iter().enumerate() {
                    m[(i, j)] = *z;
                }
            }
            return m;
        }
    }
}

/// Modified Gram–Schmidt with one reorthogonalization pass; false on
/// (numerical) rank deficiency.
fn orthonormalize(cols: &mut [Vec<Complex64>]) -> bool {
    for j in 0..cols.len() {
        for _pass in 0..2 {
            for k in 0..j {
                let proj: Complex64 = cols[k]
                    .iter()
                    .zip(&cols[j])
                    .map(|(q, v)| q.conj() * v)
                    .sum();
                let (done, rest) = cols.split_at_mut(j);
                for (v, q) in rest[0].iter_mut().zip(&done[k]) {
                    *v -= proj * q;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return false;
        }
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    true
}

/// The permutation used as the matrix field near 0.
///
/// Row `h_1` takes the column of the preimage `(0, 1)`. The high-pass rows
/// take the remaining columns `(0, j)` first, and the other low-pass rows take
/// the columns with `l ≥ 1`. The resulting filters satisfy
/// `h_{1,1}(0) = √N`, `g_{k,1}(0) = 0`, and `h_{i,j}(0) = 0` otherwise whenever
/// `μ̃(0) ≥ μ(0) − 1`. Returns `perm` with `K[row][perm[row]] = 1`.
pub fn reference_permutation(profile: &DimensionProfile) -> Vec<usize> {
    let zero = TorusPoint::zero();
    let pre = profile.preimage_list(&zero, Representative::Centered);
    let mu0 = profile.mu(&zero);
    let mu_tilde0 = profile.mu_tilde(&zero);
    if mu0 == 0 {
        return (0..pre.len()).collect();
    }
    let zero_cols: Vec<usize> = (1..mu0).collect();
    let other_cols: Vec<usize> = (mu0..pre.len()).collect();
    let g_take = mu_tilde0.min(zero_cols.len());
    let g_cols: Vec<usize> = zero_cols[..g_take]
        .iter()
        .chain(&other_cols[..mu_tilde0 - g_take])
        .copied()
        .collect();
    let h_cols: Vec<usize> = other_cols[mu_tilde0 - g_take..]
        .iter()
        .chain(&zero_cols[g_take..])
        .copied()
        .collect();
    std::iter::once(0).chain(h_cols).chain(g_cols).collect()
}

/// Half the distance from 0 to the nearest breakpoint of `partition`.
fn zero_margin(partition: &Partition) -> Rational {
    let first = partition.cell(0).width();
    let last = partition.cell(partition.len() - 1).width();
    first.min(last) / int(2)
}

/// Partition for random fields: `base` plus breakpoints at `±δ` around 0 and a
/// few random dyadic points.
fn random_partition<R: Rng + ?Sized>(base: &Partition, rng: &mut R) -> Partition {
    let delta = zero_margin(base);
    let extra: Vec<Rational> = (0..rng.random_range(0..3))
        .map(|_| rat(rng.random_range(1..64), 64))
        .collect();
    base.refine_points([delta.clone(), -delta].iter())
        .refine_points(extra.iter())
}

fn near_zero(cell_start: &Rational, cell_end: &Rational) -> bool {
    use num_traits::{One, Zero};
    cell_start.is_zero() || cell_end.is_one()
}

/// A unitary matrix field with a Haar-random unitary on every cell away from
/// 0 and the [`reference_permutation`] on the cells touching 0.
pub fn random_unitary_field(profile: &DimensionProfile, seed: u64) -> UnitaryField<Complex64> {
    let mut rng = rng_from_seed(seed);
    let rep = Representative::Centered;
    let partition = random_partition(&profile.base_partition(rep), &mut rng);
    let reference = Matrix::permutation(&reference_permutation(profile));
    let field = PiecewiseFn::tabulate(partition.clone(), |m| {
        let x = TorusPoint::new(m);
        let k = partition.locate(&x);
        let cell = partition.cell(k);
        if near_zero(&cell.start, &cell.end) {
            reference.clone()
        } else {
            haar_unitary(profile.fiber_dim(&x), &mut rng)
        }
    });
    UnitaryField {
        profile: profile.clone(),
        representative: rep,
        field,
    }
}

/// The M-system read off [`random_unitary_field`].
pub fn random_msystem(profile: &DimensionProfile, seed: u64) -> MSystem<Complex64> {
    MSystem::from_unitary_field(&random_unitary_field(profile, seed))
        .expect("random field matches the profile")
}

/// A random filter bank: a Haar-random unitary per cell, read off through the
/// preimage indexing.
pub fn generate_random_bank(
    profile: &DimensionProfile,
    seed: u64,
) -> GeneralizedFilterBank<Complex64> {
    random_msystem(profile, seed).to_bank()
}

/// A random loop element: Haar-random unitaries on random cells, the identity
/// on the cells touching 0.
pub fn random_loop_element(profile: &DimensionProfile, seed: u64) -> LoopElement<Complex64> {
    let mut rng = rng_from_seed(seed);
    let mf = profile.multiplicity();
    let dims = mf.fiber_dimension(profile.conjugate());
    let partition = random_partition(dims.partition(), &mut rng);
    let section = PiecewiseFn::tabulate(partition.clone(), |m| {
        let x = TorusPoint::new(m);
        let cell = partition.cell(partition.locate(&x));
        let dim = *dims.eval(&x) as usize;
        if near_zero(&cell.start, &cell.end) {
            Matrix::identity(dim)
        } else {
            haar_unitary(dim, &mut rng)
        }
    });
    LoopElement::new(profile.clone(), section).expect("dimensions follow the profile")
}

/// Options for [`random_multiplicity`].
#[derive(Clone, Debug)]
pub struct MultiplicityOptions {
    pub n: u32,
    pub max_value: u32,
    pub max_cells: usize,
}

/// A random multiplicity function with at most `max_cells` cells and values at
/// most `max_value`, rejection-sampled until it
///
/// - satisfies the consistency inequality,
/// - is constant near every `l/N`,
/// - has `μ(0) ≥ 1` and `μ̃(0) ≥ μ(0) − 1`, so the low-pass normalization is attainable.
pub fn random_multiplicity(opts: &MultiplicityOptions, seed: u64) -> Result<MultiplicityFunction> {
    if opts.max_value == 0 || opts.max_cells == 0 {
        return Err(GmraError::InvalidArgument(
            "max_value and max_cells must be positive".into(),
        ));
    }
    let mut rng = rng_from_seed(seed);
    let n = opts.n;
    for _ in 0..10_000 {
        let denom = rng.random_range(5..=36i64);
        let cells = rng.random_range(1..=opts.max_cells);
        let mut points: Vec<Rational> = (0..cells - 1)
            .map(|_| rat(rng.random_range(1..denom), denom))
            .filter(|p| !(p * int(n as i64)).is_integer())
            .collect();
        points.sort();
        points.dedup();
        let mut values: Vec<u32> = (0..=points.len())
            .map(|_| rng.random_range(0..=opts.max_value))
            .collect();
        // the arc through 0 is one cell split at the breakpoint 0
        let first = values[0];
        *values.last_mut().expect("nonempty") = first;
        if first == 0 {
            continue;
        }
        let partition = Partition::from_points(points.iter());
        let Ok(mu) = PiecewiseFn::new(partition, values) else {
            continue;
        };
        let Ok(mf) = MultiplicityFunction::new(mu, n) else {
            continue;
        };
        let Ok(cm) = mf.conjugate() else {
            continue;
        };
        let zero = TorusPoint::zero();
        if (cm.value(&zero) as i64) < mf.value(&zero) as i64 - 1 {
            continue;
        }
        return Ok(mf);
    }
    Err(GmraError::InvalidArgument(
        "no valid multiplicity function found for these options".into(),
    ))
}

/// Converts an exact system to floating point.
pub fn to_float<S: Scalar>(m: &MSystem<S>) -> MSystem<Complex64> {
    let components = m
        .components()
        .iter()
        .map(|row| row.iter().map(|f| f.map(Scalar::to_c64)).collect())
        .collect();
    MSystem::from_components_unchecked(m.profile().clone(), components).expect("same shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::journe_multiplicity;
    use crate::multiplicity::{check_constant_near, lattice_points};

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = rng_from_seed(7);
        for dim in 0..6 {
            let u = haar_unitary(dim, &mut rng);
            assert!(u.unitarity_residual() < 1e-14, "dim {dim}");
        }
    }

    #[test]
    fn journe_reference_block_is_the_printed_permutation() {
        let p = DimensionProfile::new(journe_multiplicity()).unwrap();
        assert_eq!(reference_permutation(&p), vec![0, 2, 1]);
        let classical = DimensionProfile::new(MultiplicityFunction::constant(1, 3).unwrap()).unwrap();
        assert_eq!(reference_permutation(&classical), vec![0, 1, 2]);
    }

    #[test]
    fn random_bank_is_valid_and_low_pass() {
        let p = DimensionProfile::new(journe_multiplicity()).unwrap();
        for seed in 0..5 {
            let bank = generate_random_bank(&p, seed);
            let report = bank.verify_orthogonality(1e-12);
            assert!(report.pass, "seed {seed}: {report:?}");
            let field = bank
                .flatten(1e-12)
                .unwrap()
                .assemble_unitary(Representative::Centered, 1e-12)
                .unwrap();
            assert!(field.field.values().iter().all(|k| k.unitarity_residual() <= 1e-12));
        }
    }

    #[test]
    fn same_seed_same_bank() {
        let p = DimensionProfile::new(journe_multiplicity()).unwrap();
        assert_eq!(generate_random_bank(&p, 11), generate_random_bank(&p, 11));
        assert_ne!(generate_random_bank(&p, 11), generate_random_bank(&p, 12));
    }

    #[test]
    fn classical_random_system() {
        let p = DimensionProfile::new(MultiplicityFunction::constant(1, 2).unwrap()).unwrap();
        let m = random_msystem(&p, 3);
        assert_eq!(m.components().len(), 2);
        m.validate(1e-12).unwrap();
    }

    #[test]
    fn random_multiplicities_meet_their_contract() {
        for seed in 0..40 {
            let n = 2 + (seed % 2) as u32;
            let opts = MultiplicityOptions {
                n,
                max_value: 3,
                max_cells: 12,
            };
            let mf = random_multiplicity(&opts, seed).unwrap();
            assert!(mf.check_consistency().pass);
            assert!(mf.c() <= 3);
            assert!(mf.mu().partition().len() <= 12);
            assert!(check_constant_near(mf.mu(), &lattice_points(n), None).unwrap().pass);
        }
    }

    #[test]
    fn random_loop_element_is_identity_near_zero() {
        let p = DimensionProfile::new(journe_multiplicity()).unwrap();
        let k = random_loop_element(&p, 5);
        let report = k.verify(1e-12, None);
        assert!(report.pass, "{report:?}");
    }
}
