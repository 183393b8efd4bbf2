//! Randomized cross-module invariants. Strategies draw a seed and dimensions;
//! the generators in `ctxobs_core::generate` turn the seed into operators,
//! projections and contexts so failures reproduce exactly.

use proptest::prelude::*;

use ctxobs_core::context;
use ctxobs_core::generate;
use ctxobs_core::linalg::{eigh, subspace_intersection, subspace_sum, HermitianOperator, ToleranceConfig};
use ctxobs_core::plattice::{self, Projection};
use ctxobs_core::presheaf::{self, AspectMode, ContextFamily};
use ctxobs_core::restrict;
use ctxobs_core::spectral;
use ctxobs_core::states;

fn cfg() -> ToleranceConfig {
    ToleranceConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigh_reconstructs_and_resolves_the_identity(seed in any::<u64>(), dim in 2usize..=8) {
        let cfg = cfg();
        let mut rng = generate::rng(seed);
        let a = generate::random_hermitian(dim, &mut rng);
        let pairs = eigh(&a, &cfg).unwrap();

        let mut rebuilt = HermitianOperator::zero(dim);
        let mut resolution = HermitianOperator::zero(dim);
        for pair in &pairs {
            rebuilt = rebuilt.add(&pair.projection.matrix().scale(pair.value));
            resolution = resolution.add(pair.projection.matrix());
        }
        prop_assert!(rebuilt.matrix().max_norm_diff(a.matrix()) <= 1e-8);
        prop_assert!(resolution.matrix().max_norm_diff(HermitianOperator::identity(dim).matrix()) <= 1e-9);
        for (i, x) in pairs.iter().enumerate() {
            for (j, y) in pairs.iter().enumerate() {
                let prod = x.projection.matrix().matrix().matmul(y.projection.matrix().matrix());
                let expected = if i == j { x.projection.matrix().matrix().clone() } else { ctxobs_core::linalg::ComplexMatrix::zeros(dim) };
                prop_assert!(prod.max_norm_diff(&expected) <= 1e-8);
            }
        }
    }

    #[test]
    fn subspace_ranks_obey_the_modular_law(seed in any::<u64>(), dim in 2usize..=6) {
        let cfg = cfg();
        let mut rng = generate::rng(seed);
        let u = generate::random_projection(dim, &mut rng, &cfg);
        let v = generate::random_projection(dim, &mut rng, &cfg);
        let meet = subspace_intersection(u.range(), v.range(), &cfg).unwrap();
        let sum = subspace_sum(u.range(), v.range(), &cfg).unwrap();
        prop_assert_eq!(meet.rank() + sum.rank(), u.rank() + v.rank());
    }

    #[test]
    fn spectral_lattice_laws(seed in any::<u64>(), dim in 2usize..=4) {
        let cfg = cfg();
        let mut rng = generate::rng(seed);
        let a = generate::random_hermitian(dim, &mut rng);
        let b = generate::random_hermitian(dim, &mut rng);
        let c = generate::random_hermitian(dim, &mut rng);

        // Idempotence and commutativity.
        let aa = spectral::spectral_join(&[a.clone(), a.clone()], &cfg).unwrap();
        prop_assert!(aa.approx_eq(&a, 1e-8));
        let ab = spectral::spectral_join(&[a.clone(), b.clone()], &cfg).unwrap();
        let ba = spectral::spectral_join(&[b.clone(), a.clone()], &cfg).unwrap();
        prop_assert!(ab.approx_eq(&ba, 1e-8));

        // Associativity: nested pairwise joins equal the flat join.
        let nested = spectral::spectral_join(&[ab, c.clone()], &cfg).unwrap();
        let flat = spectral::spectral_join(&[a.clone(), b.clone(), c.clone()], &cfg).unwrap();
        prop_assert!(nested.approx_eq(&flat, 1e-8));

        let m_ab = spectral::spectral_meet(&[a.clone(), b.clone()], &cfg).unwrap();
        let m_nested = spectral::spectral_meet(&[m_ab, c.clone()], &cfg).unwrap();
        let m_flat = spectral::spectral_meet(&[a.clone(), b, c], &cfg).unwrap();
        prop_assert!(m_nested.approx_eq(&m_flat, 1e-8));

        // The results bound every input in the spectral order.
        prop_assert!(spectral::spectral_leq(&a, &flat, &cfg).unwrap());
        prop_assert!(spectral::spectral_leq(&m_flat, &a, &cfg).unwrap());
    }

    #[test]
    fn core_support_monotone_laws(seed in any::<u64>(), dim in 2usize..=5) {
        let cfg = cfg();
        let mut rng = generate::rng(seed);
        let m = generate::random_context(dim, &mut rng, &cfg);
        let projs: Vec<Projection> =
            (0..3).map(|_| generate::random_projection(dim, &mut rng, &cfg)).collect();

        let meet_all = plattice::meet_all(dim, &projs, &cfg).unwrap();
        let join_all = plattice::join_all(dim, &projs, &cfg).unwrap();

        // Core commutes with meets, support with joins.
        let core_of_meet = restrict::core_projection(&m, &meet_all, &cfg).unwrap();
        let cores: Vec<Projection> = projs
            .iter()
            .map(|p| restrict::core_projection(&m, p, &cfg).unwrap())
            .collect();
        let meet_of_cores = plattice::meet_all(dim, &cores, &cfg).unwrap();
        prop_assert!(core_of_meet.approx_eq(&meet_of_cores, &cfg));

        let support_of_join = restrict::support_projection(&m, &join_all, &cfg).unwrap();
        let supports: Vec<Projection> = projs
            .iter()
            .map(|p| restrict::support_projection(&m, p, &cfg).unwrap())
            .collect();
        let join_of_supports = plattice::join_all(dim, &supports, &cfg).unwrap();
        prop_assert!(support_of_join.approx_eq(&join_of_supports, &cfg));

        // The two inequalities.
        let core_of_join = restrict::core_projection(&m, &join_all, &cfg).unwrap();
        let join_of_cores = plattice::join_all(dim, &cores, &cfg).unwrap();
        prop_assert!(plattice::leq(&join_of_cores, &core_of_join, &cfg).unwrap());

        let support_of_meet = restrict::support_projection(&m, &meet_all, &cfg).unwrap();
        let meet_of_supports = plattice::meet_all(dim, &supports, &cfg).unwrap();
        prop_assert!(plattice::leq(&support_of_meet, &meet_of_supports, &cfg).unwrap());
    }

    #[test]
    fn canonical_sections_glue_and_unglue(seed in any::<u64>()) {
        let cfg = cfg();
        let mut rng = generate::rng(seed);
        let contexts = vec![
            context::AbelianContext::trivial(3),
            generate::random_context(3, &mut rng, &cfg),
            generate::random_context(3, &mut rng, &cfg),
        ];
        let family = ContextFamily::new(3, contexts, &cfg).unwrap();
        let a = generate::random_hermitian(3, &mut rng);
        let section =
            presheaf::section_from_operator(&a, family.clone(), AspectMode::Upper, &cfg).unwrap();
        prop_assert!(presheaf::validate_section(&section, AspectMode::Upper, &cfg).unwrap().ok);

        // Gluing succeeds (the commuting-sup law holds inside every context)
        // and ungluing reproduces the section.
        let table = presheaf::glue_section(&section, &cfg).unwrap();
        let rebuilt = presheaf::unglue(family, &table, &cfg).unwrap();
        for (x, y) in rebuilt.values().iter().zip(section.values()) {
            prop_assert!(x.approx_eq(y, 1e-8));
        }
    }

    #[test]
    fn state_restriction_is_surjective_on_chains(seed in any::<u64>()) {
        let cfg = cfg();
        let mut rng = generate::rng(seed);
        let u = generate::random_unitary(4, &mut rng);
        let fine = generate::context_from_unitary(4, &u, &[vec![0], vec![1], vec![2], vec![3]], &cfg);
        let coarse = generate::context_from_unitary(4, &u, &[vec![0, 2], vec![1, 3]], &cfg);

        let raw: Vec<f64> = (0..2).map(|_| rand::Rng::gen_range(&mut rng, 0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let target = states::ContextState::new(coarse.clone(), weights, &cfg).unwrap();

        let lifted = states::lift_state(&target, &fine, &cfg).unwrap();
        let back = states::restrict_state(&lifted, &coarse, &cfg).unwrap();
        for (x, y) in back.weights().iter().zip(target.weights()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }
}
