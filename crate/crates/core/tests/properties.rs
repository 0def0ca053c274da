use gmra::document::Document;
use gmra::loopgroup::connecting_element;
use gmra::random::{random_loop_element, random_msystem, random_multiplicity, MultiplicityOptions};
use gmra::torus::reduce_mod_1;
use gmra::{rat, Complex64, DimensionProfile, MSystem, Partition, Rational, Representative, TorusPoint};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-500i64..500, 1i64..60).prop_map(|(p, q)| rat(p, q))
}

fn profile(n: u32, seed: u64) -> DimensionProfile {
    let opts = MultiplicityOptions {
        n,
        max_value: 3,
        max_cells: 12,
    };
    DimensionProfile::new(random_multiplicity(&opts, seed).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reduction_lands_in_the_unit_interval(x in rational()) {
        let t = reduce_mod_1(&x);
        prop_assert!(*t.value() >= rat(0, 1) && *t.value() < rat(1, 1));
        prop_assert!((&x - t.value()).is_integer());
    }

    #[test]
    fn refinement_contains_both_partitions(a in prop::collection::vec(rational(), 0..6), b in prop::collection::vec(rational(), 0..6)) {
        let p = Partition::from_points(a.iter());
        let q = Partition::from_points(b.iter());
        let r = p.refine(&q);
        prop_assert!(r.is_refinement_of(&p));
        prop_assert!(r.is_refinement_of(&q));
    }

    #[test]
    fn conjugate_identity_holds_cellwise(seed in 0u64..10_000, n in 2u32..4) {
        let p = profile(n, seed);
        let mf = p.multiplicity();
        let sum = mf.preimage_sum();
        let lhs = mf.mu().zip_map(p.conjugate().mu_tilde(), |a, b| a + b);
        prop_assert!(lhs.same_function(&sum));
        let levels = mf.level_sets(p.conjugate());
        let measure: Rational = levels.s.iter().map(|s| s.measure()).sum();
        let integral: Rational = mf.mu().cells().map(|(c, v)| c.width() * rat(*v as i64, 1)).sum();
        prop_assert_eq!(measure, integral);
    }

    #[test]
    fn assembly_round_trips(seed in 0u64..10_000, n in 2u32..4) {
        let p = profile(n, seed);
        let m = random_msystem(&p, seed);
        let field = m.assemble_unitary(Representative::Centered, 1e-12).unwrap();
        for (cell, k) in field.field.cells() {
            let x = TorusPoint::new(&cell.midpoint());
            prop_assert_eq!(k.rows(), p.fiber_dim(&x));
        }
        let back = MSystem::from_unitary_field(&field).unwrap();
        prop_assert!(back.max_residual(&m) <= 1e-15);
        prop_assert!(m.verify_column_orthogonality(1e-12).pass);
    }

    #[test]
    fn free_and_transitive(seed in 0u64..10_000) {
        let p = profile(2, seed);
        let m = random_msystem(&p, 2 * seed);
        let target = random_msystem(&p, 2 * seed + 1);
        let k = connecting_element(&m, &target, 1e-12).unwrap();
        prop_assert!(k.act(&m).unwrap().max_residual(&target) <= 1e-12);
        let g = random_loop_element(&p, seed);
        let moved = g.act(&m).unwrap();
        prop_assert!(connecting_element(&m, &moved, 1e-12).unwrap().max_distance(&g) <= 1e-12);
    }

    #[test]
    fn documents_round_trip(seed in 0u64..10_000) {
        let p = profile(3, seed);
        let m = random_msystem(&p, seed);
        let doc = Document::parse(&Document::msystem(&m).to_pretty()).unwrap();
        prop_assert_eq!(doc.to_msystem::<Complex64>().unwrap(), m);
    }

    #[test]
    fn pullback_evaluates_at_the_dilated_point(seed in 0u64..10_000, x in rational()) {
        let p = profile(2, seed);
        let mu = p.multiplicity().mu();
        let pulled = mu.pullback_dilate(2);
        prop_assert_eq!(pulled.at(&x), mu.at(&(&x * rat(2, 1))));
    }
}

#[test]
fn identity_section_has_identity_blocks() {
    let p = profile(3, 5);
    let id = gmra::LoopElement::<Complex64>::identity(&p);
    assert!(id.section().values().iter().all(|k| k.is_identity(0.0)));
}
