use gmra::fixtures::{journe_bank, journe_msystem};
use gmra::loopgroup::connecting_element;
use gmra::random::{random_loop_element, random_msystem, random_multiplicity, MultiplicityOptions};
use gmra::{
    rat, Complex64, DimensionProfile, Exact, LoopElement, MSystem, Matrix, MultiplicityFunction,
    PiecewiseFn, Representative, Scalar,
};

fn journe_profile() -> DimensionProfile {
    journe_bank().profile().clone()
}

#[test]
fn compose_with_identity_and_inverse() {
    let p = journe_profile();
    for seed in 0..5 {
        let k = random_loop_element(&p, seed);
        let id = LoopElement::identity(&p);
        assert!(k.compose(&id).unwrap().max_distance(&k) <= 1e-15);
        assert!(k.compose(&k.inverse()).unwrap().distance_to_identity() <= 1e-14);
        assert!(k.inverse().compose(&k).unwrap().distance_to_identity() <= 1e-14);
    }
}

#[test]
fn products_of_random_sections_stay_unitary() {
    let p = journe_profile();
    let k = random_loop_element(&p, 1)
        .compose(&random_loop_element(&p, 2))
        .unwrap();
    let worst = k
        .section()
        .values()
        .iter()
        .map(Matrix::unitarity_residual)
        .fold(0.0, f64::max);
    assert!(worst <= 1e-12);
    assert!(k.verify(1e-12, None).pass);
}

#[test]
fn identity_inverts_to_itself() {
    let p = journe_profile();
    let id = LoopElement::<Exact>::identity(&p);
    assert_eq!(id.inverse(), id);
}

#[test]
fn action_preserves_validity_over_random_multiplicities() {
    for seed in 0..50u64 {
        let opts = MultiplicityOptions {
            n: 2 + (seed % 2) as u32,
            max_value: 3,
            max_cells: 12,
        };
        let p = DimensionProfile::new(random_multiplicity(&opts, seed).unwrap()).unwrap();
        let m = random_msystem(&p, seed + 1000);
        let k = random_loop_element(&p, seed + 2000);
        let acted = k.act(&m).unwrap();
        let field = acted.assemble_unitary(Representative::Centered, 1e-12).unwrap();
        let worst = field
            .field
            .values()
            .iter()
            .map(Matrix::unitarity_residual)
            .fold(0.0, f64::max);
        assert!(worst <= 1e-12, "seed {seed}: {worst:e}");
    }
}

#[test]
fn identity_acts_exactly_on_journe() {
    let m = journe_msystem();
    let id = LoopElement::identity(m.profile());
    assert_eq!(id.act(&m).unwrap(), m);
}

/// Swaps the two columns of the P4 block away from 0 and leaves every other
/// fiber alone.
fn p4_swap() -> LoopElement<Exact> {
    let p = journe_profile();
    let dims = p.multiplicity().fiber_dimension(p.conjugate());
    let swap = Matrix::permutation(&[1, 0]);
    let section = PiecewiseFn::tabulate(dims.partition().clone(), |mid| {
        let x = gmra::TorusPoint::new(mid);
        let dim = *dims.eval(&x) as usize;
        let centered = x.centered();
        let in_p4 = centered >= rat(3, 7) || centered < rat(-3, 7);
        if in_p4 {
            swap.clone()
        } else {
            Matrix::identity(dim)
        }
    });
    LoopElement::new(p, section).unwrap()
}

#[test]
fn journe_swap_round_trip_is_exact() {
    let m = journe_msystem();
    let k = p4_swap();
    assert!(k.verify(0.0, None).pass);
    assert_eq!(k.inverse(), k);
    let target = k.act(&m).unwrap();
    assert_ne!(target, m);
    let recovered = connecting_element(&m, &target, 0.0).unwrap();
    assert!(recovered.agrees(&k, 0.0));
    assert_eq!(recovered.act(&m).unwrap(), target);
}

#[test]
fn self_connection_is_identity() {
    let m = journe_msystem();
    let k = connecting_element(&m, &m, 0.0).unwrap();
    assert_eq!(k.distance_to_identity(), 0.0);
    let p = DimensionProfile::new(MultiplicityFunction::constant(2, 3).unwrap()).unwrap();
    let r: MSystem<Complex64> = random_msystem(&p, 77);
    assert!(connecting_element(&r, &r, 1e-12).unwrap().distance_to_identity() <= 1e-13);
}

#[test]
fn connecting_rejects_mismatched_profiles() {
    let a = random_msystem(&journe_profile(), 1);
    let p = DimensionProfile::new(MultiplicityFunction::constant(1, 2).unwrap()).unwrap();
    let b = random_msystem(&p, 1);
    assert!(connecting_element(&a, &b, 1e-12).is_err());
}

#[test]
fn non_unitary_section_is_flagged() {
    let p = journe_profile();
    let k = random_loop_element(&p, 3);
    let bad = k.section().map(|m| m.map(|z| *z * Complex64::from_int(2)));
    let report = LoopElement::new(p, bad).unwrap().verify(1e-12, None);
    assert!(!report.pass && !report.unitary);
    assert!(report.worst_residual > 1.0);
}
