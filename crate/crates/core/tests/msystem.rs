use gmra::fixtures::{journe_bank, journe_msystem, journe_multiplicity};
use gmra::random::{random_msystem, random_multiplicity, to_float, MultiplicityOptions};
use gmra::wavelet::haar;
use gmra::{
    rat, Complex64, DimensionProfile, Exact, MSystem, MultiplicityFunction, PiecewiseFn,
    Rational, Representative, Scalar, TorusPoint,
};

#[test]
fn journe_flattens_to_three_components() {
    let m = journe_msystem();
    let bank = journe_bank();
    assert_eq!(m.components().len(), 3);
    assert_eq!(m.components()[0][0], *bank.h(0, 0));
    assert!(m.components()[0][1].values().iter().all(Scalar::is_zero));
    assert_eq!(m.components()[1][0], *bank.h(1, 0));
    assert_eq!(m.components()[2][0], *bank.g(0, 0));
    assert_eq!(m.components()[2][1], *bank.g(0, 1));
}

#[test]
fn haar_embeds_as_a_classical_bank() {
    let sampled = haar().to_msystem_sampled(13);
    let report = sampled.to_bank().verify_orthogonality(1e-12);
    assert!(report.relations_hold(), "{report:?}");
    // a sampled trigonometric filter is not locally constant at 0, so only the
    // constancy part of the generalized low-pass verdict can fail
    assert!(report.low_pass.detail.as_deref().is_some_and(|d| d.contains("constant")));
    assert!(sampled.verify_column_orthogonality(1e-12).pass);
    let x = TorusPoint::new(&rat(5, 4096));
    let pre = sampled.profile().preimage_list(&x, Representative::Centered);
    assert_eq!(pre.len(), 2);
}

#[test]
fn perturbing_a_filter_breaks_column_orthogonality() {
    let m = to_float(&journe_msystem());
    assert!(m.verify_column_orthogonality(1e-12).pass);
    let mut comps: Vec<Vec<PiecewiseFn<Complex64>>> = m.components().to_vec();
    comps[2][0] = comps[2][0].map(|z| if z.norm() > 0.0 { *z + 1e-3 } else { *z });
    let bad = MSystem::from_components_unchecked(m.profile().clone(), comps).unwrap();
    let report = bad.verify_column_orthogonality(1e-12);
    assert!(!report.pass);
    let r = report.columns.worst_residual;
    assert!(r > 1e-4 && r < 1e-2, "residual {r:e}");
    assert!(report.columns.worst_cell.is_some());
}

/// `μ(x)` of the Journé example, written directly on `[−1/2, 1/2)`.
fn journe_mu_oracle(x: &Rational) -> u32 {
    let c = TorusPoint::new(x).centered();
    let a = if c < Rational::from_integer(0.into()) { -c } else { c };
    if a < rat(1, 7) {
        2
    } else if a < rat(2, 7) {
        1
    } else if a < rat(3, 7) {
        0
    } else {
        1
    }
}

#[test]
fn preimage_counts_match_the_oracle() {
    let p = DimensionProfile::new(journe_multiplicity()).unwrap();
    for k in 0..224 {
        let x = rat(2 * k + 1, 448);
        let expected: u32 = (0..2).map(|l| journe_mu_oracle(&((TorusPoint::new(&x).centered() + rat(l, 1)) / rat(2, 1)))).sum();
        let pre = p.preimage_list(&TorusPoint::new(&x), Representative::Centered);
        assert_eq!(pre.len() as u32, expected, "x = {x}");
        assert_eq!(p.fiber_dim(&TorusPoint::new(&x)) as u32, expected);
    }
}

#[test]
fn random_systems_validate_across_multiplicities() {
    for seed in 0..10 {
        let opts = MultiplicityOptions {
            n: 3,
            max_value: 3,
            max_cells: 12,
        };
        let mf = random_multiplicity(&opts, seed).unwrap();
        let p = DimensionProfile::new(mf).unwrap();
        let m = random_msystem(&p, seed);
        m.validate(1e-12).unwrap();
        let round = MSystem::from_unitary_field(&m.assemble_unitary(Representative::Centered, 1e-12).unwrap()).unwrap();
        assert!(round.max_residual(&m) <= 1e-15);
    }
}

#[test]
fn classical_matrix_is_the_polyphase_matrix() {
    let m: MSystem<Exact> = gmra::wavelet::shannon().to_msystem_exact().unwrap();
    for k in 0..32 {
        let x = rat(2 * k + 1, 64);
        let (got, _) = m.matrix_at(&TorusPoint::new(&x), Representative::Centered);
        let filters: Vec<_> = gmra::wavelet::shannon()
            .filters()
            .iter()
            .map(|f| f.as_piecewise().unwrap().clone())
            .collect();
        let evals: Vec<_> = filters.iter().map(|f| move |y: &Rational| f.at(y).clone()).collect();
        let lifted = TorusPoint::new(&x).centered();
        // the centered lift gives the classical matrix evaluated at x̂/N
        let expected = gmra::loopgroup::classical::polyphase_matrix(&evals, 2, &(lifted / rat(2, 1)));
        assert_eq!(got, expected, "x = {x}");
    }
}

#[test]
fn constant_multiplicity_has_constant_dimension() {
    for n in 2..5 {
        let p = DimensionProfile::new(MultiplicityFunction::constant(1, n).unwrap()).unwrap();
        assert_eq!(p.c(), 1);
        assert_eq!(p.d(), n as usize - 1);
        assert_eq!(p.fiber_dim(&TorusPoint::new(&rat(1, 3))), n as usize);
    }
}
