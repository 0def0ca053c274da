//! Built-in examples: the Journé multiplicity function and filter bank, and
//! the classical Haar and Shannon systems.
//!
//! Intervals are written on `[−1/2, 1/2)` and reduced mod 1.

use crate::matrix::Matrix;
use crate::msystem::{DimensionProfile, GeneralizedFilterBank, MSystem};
use crate::multiplicity::MultiplicityFunction;
use crate::scalar::{Exact, Scalar};
use crate::torus::{rat, PiecewiseFn, Rational};

pub use crate::wavelet::{haar, journe_wavelet, shannon};

type Arcs = [((i64, i64), (i64, i64))];

fn arcs<V: Clone + PartialEq>(shape: &Arcs, value: V, default: V) -> PiecewiseFn<V> {
    let intervals: Vec<(Rational, Rational, V)> = shape
        .iter()
        .map(|&((a, b), (c, d))| (rat(a, b), rat(c, d), value.clone()))
        .collect();
    PiecewiseFn::from_intervals(&intervals, default)
        .expect("fixture intervals are valid")
        .simplify()
}

/// `μ = 2` on `[−1/7, 1/7)`, `1` on `±[1/7, 2/7)`, `0` on `±[2/7, 3/7)`,
/// `1` on `±[3/7, 1/2)`, with `N = 2`.
pub fn journe_multiplicity() -> MultiplicityFunction {
    let intervals = [
        (rat(-1, 2), rat(-3, 7), 1u32),
        (rat(-3, 7), rat(-2, 7), 0),
        (rat(-2, 7), rat(-1, 7), 1),
        (rat(-1, 7), rat(1, 7), 2),
        (rat(1, 7), rat(2, 7), 1),
        (rat(2, 7), rat(3, 7), 0),
        (rat(3, 7), rat(1, 2), 1),
    ];
    let mu = PiecewiseFn::from_intervals(&intervals, 0).expect("valid intervals");
    MultiplicityFunction::new(mu, 2).expect("valid multiplicity")
}

/// The Journé filters, `√2` times the indicators
///
/// ```text
/// h_{1,1}: [−2/7, −1/4) ∪ [−1/7, 1/7) ∪ [1/4, 2/7)
/// h_{2,1}: [−1/2, −3/7) ∪ [3/7, 1/2)
/// g_{1,1}: [−1/4, −1/7) ∪ [1/7, 1/4)
/// g_{1,2}: [−1/7, 1/7)
/// ```
///
/// and `h_{1,2} = h_{2,2} = 0`.
pub fn journe_bank() -> GeneralizedFilterBank<Exact> {
    let s = Exact::sqrt_int(2);
    let z = Exact::zero();
    let filter = |shape: &Arcs| arcs(shape, s.clone(), z.clone());
    let h11 = filter(&[((-2, 7), (-1, 4)), ((-1, 7), (1, 7)), ((1, 4), (2, 7))]);
    let h21 = filter(&[((-1, 2), (-3, 7)), ((3, 7), (1, 2))]);
    let g11 = filter(&[((-1, 4), (-1, 7)), ((1, 7), (1, 4))]);
    let g12 = filter(&[((-1, 7), (1, 7))]);
    let zero = PiecewiseFn::constant(z.clone());
    let profile = DimensionProfile::new(journe_multiplicity()).expect("consistent");
    GeneralizedFilterBank::new(
        profile,
        vec![vec![h11, zero.clone()], vec![h21, zero]],
        vec![vec![g11, g12]],
    )
    .expect("shapes match")
}

pub fn journe_msystem() -> MSystem<Exact> {
    journe_bank().flatten(0.0).expect("the Journé bank is valid")
}

/// The regions `P_1, …, P_4`, as arcs on `[−1/2, 1/2)`.
pub fn journe_regions() -> [Vec<(Rational, Rational)>; 4] {
    let sym = |a: (i64, i64), b: (i64, i64)| {
        vec![
            (rat(-b.0, b.1), rat(-a.0, a.1)),
            (rat(a.0, a.1), rat(b.0, b.1)),
        ]
    };
    [
        vec![(rat(-1, 7), rat(1, 7))],
        sym((1, 7), (2, 7)),
        sym((2, 7), (3, 7)),
        sym((3, 7), (1, 2)),
    ]
}

/// The matrices of the Journé cross-section on `P_1, …, P_4`.
pub fn journe_expected_matrices() -> [Matrix<Exact>; 4] {
    [
        Matrix::permutation(&[0, 2, 1]),
        Matrix::identity(2),
        Matrix::identity(1),
        Matrix::permutation(&[1, 0]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{Representative, TorusPoint};

    #[test]
    fn journe_fixture_is_a_valid_msystem() {
        let m = journe_msystem();
        m.validate(0.0).unwrap();
        assert!(journe_bank().verify_orthogonality(0.0).pass);
    }

    #[test]
    fn journe_matrices_match_regions() {
        let field = journe_msystem()
            .assemble_unitary(Representative::Centered, 0.0)
            .unwrap();
        for (region, expected) in journe_regions().iter().zip(journe_expected_matrices()) {
            for (a, b) in region {
                let k = field.matrix_at(&TorusPoint::new(a));
                assert_eq!(k, &expected, "at {a}");
                let mid = (a + b) / rat(2, 1);
                assert_eq!(field.matrix_at(&TorusPoint::new(&mid)), &expected);
            }
        }
    }
}
