use std::sync::Arc;

use proptest::prelude::*;

use opspace::bioperators::{strong_amplify, weak_amplify, Bioperator};
use opspace::matrix_core::{delta_conjugate, diamond, diamond_square_factor, vec_norm, CMatrix, DiamondContext};
use opspace::optimize::Budget;
use opspace::quantum_space::{
    cb_norm_estimate, check_ruan_ri, corner_embed, module_action, AmplifiedElement, CbOptions, LinearMap,
    OperatorSpace,
};
use opspace::random::{gaussian_matrix, gaussian_vector, seeded_rng, Rng64};
use opspace::tensor_products::{
    chain_brackets, haagerup_bracket, merge_effros, merge_rigged, BracketOptions, EffrosTerm, RiggedTerm,
    TensorPair, TensorRepresentation,
};

fn space(rng: &mut Rng64, dim: usize) -> Arc<OperatorSpace> {
    Arc::new(OperatorSpace::random_generic(rng, dim, 2, 2).unwrap())
}

fn pair(rng: &mut Rng64) -> TensorPair {
    let e = space(rng, 2);
    let f = space(rng, 3);
    TensorPair::new(e, f).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn diamond_is_multiplicative_and_isometric(seed in any::<u64>(), m in 1usize..=4) {
        let mut rng = seeded_rng(seed);
        let ctx = DiamondContext::new(m).unwrap();
        let [a, b, c, d] = [0; 4].map(|_| gaussian_matrix(&mut rng, m, m));
        let lhs = &diamond(&a, &b, &ctx).unwrap() * &diamond(&c, &d, &ctx).unwrap();
        let rhs = diamond(&(&a * &c), &(&b * &d), &ctx).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * lhs.max_abs().max(1.0));
        let ab = diamond(&a, &b, &ctx).unwrap();
        prop_assert!(close(ab.op_norm(), a.op_norm() * b.op_norm(), 1e-12));
        let swapped = delta_conjugate(&ab, &ctx).unwrap();
        prop_assert!(swapped.max_abs_diff(&diamond(&b, &a, &ctx).unwrap()) <= 1e-13 * ab.max_abs());
    }

    #[test]
    fn ruan_first_axiom(seed in any::<u64>(), m in 1usize..=3) {
        let mut rng = seeded_rng(seed);
        let s = space(&mut rng, 3);
        let u = AmplifiedElement::random(&mut rng, s, m).unwrap();
        let (a, b) = (gaussian_matrix(&mut rng, m, m), gaussian_matrix(&mut rng, m, m));
        prop_assert!(check_ruan_ri(&a, &u, &b).unwrap().holds);
    }

    #[test]
    fn corner_embedding_keeps_the_norm(seed in any::<u64>(), m in 1usize..=3, extra in 0usize..=3) {
        let mut rng = seeded_rng(seed);
        let s = space(&mut rng, 2);
        let u = AmplifiedElement::random(&mut rng, s, m).unwrap();
        prop_assert!(close(corner_embed(&u, m + extra).unwrap().norm(), u.norm(), 1e-12));
    }

    #[test]
    fn canonical_tensor_is_contractive(seed in any::<u64>(), m in 1usize..=2) {
        let mut rng = seeded_rng(seed);
        let p = pair(&mut rng);
        let t = Bioperator::canonical_tensor(p.e().clone(), p.f().clone()).unwrap();
        let u = AmplifiedElement::random(&mut rng, p.e().clone(), m).unwrap();
        let v = AmplifiedElement::random(&mut rng, p.f().clone(), m).unwrap();
        let bound = u.norm() * v.norm();
        prop_assert!(strong_amplify(&t, &u, &v).unwrap().norm() <= bound * (1.0 + 1e-12));
        let ctx = DiamondContext::new(m).unwrap();
        prop_assert!(weak_amplify(&t, &u, &v, &ctx).unwrap().norm() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn effros_product_is_balanced(seed in any::<u64>(), m in 1usize..=3) {
        let mut rng = seeded_rng(seed);
        let p = pair(&mut rng);
        let u = AmplifiedElement::random(&mut rng, p.e().clone(), m).unwrap();
        let v = AmplifiedElement::random(&mut rng, p.f().clone(), m).unwrap();
        let a = gaussian_matrix(&mut rng, m, m);
        let id = CMatrix::identity(m);
        let lhs = p.effros(&module_action(&id, &u, &a).unwrap(), &v).unwrap();
        let rhs = p.effros(&u, &module_action(&a, &v, &id).unwrap()).unwrap();
        let scale = lhs.coeffs().iter().map(CMatrix::max_abs).fold(1.0, f64::max);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * scale);
    }

    #[test]
    fn merged_effros_reconstructs_and_never_grows(seed in any::<u64>(), count in 1usize..=4, m in 1usize..=2) {
        let mut rng = seeded_rng(seed);
        let p = pair(&mut rng);
        let terms: Vec<EffrosTerm> = (0..count)
            .map(|_| {
                let u = AmplifiedElement::random(&mut rng, p.e().clone(), m).unwrap();
                let v = AmplifiedElement::random(&mut rng, p.f().clone(), m).unwrap();
                EffrosTerm::new(u, v).unwrap()
            })
            .collect();
        let list = TensorRepresentation::EffrosList(terms.clone());
        let target = list.assemble(&p).unwrap();
        let merged = TensorRepresentation::SingleEffros(merge_effros(&terms).unwrap());
        prop_assert!(merged.reconstructs(&p, &target));
        prop_assert!(merged.bound() <= list.bound() * (1.0 + 1e-12));
    }

    #[test]
    fn merged_rigged_reconstructs_and_never_grows(seed in any::<u64>(), count in 1usize..=3, m in 1usize..=2, big in 1usize..=3) {
        let mut rng = seeded_rng(seed);
        let p = pair(&mut rng);
        let terms: Vec<RiggedTerm> = (0..count)
            .map(|_| {
                let a = gaussian_matrix(&mut rng, big, m * m);
                let u = AmplifiedElement::random(&mut rng, p.e().clone(), m).unwrap();
                let v = AmplifiedElement::random(&mut rng, p.f().clone(), m).unwrap();
                let b = gaussian_matrix(&mut rng, m * m, big);
                RiggedTerm::new(a, u, v, b).unwrap()
            })
            .collect();
        let list = TensorRepresentation::RiggedList(terms.clone());
        let target = list.assemble(&p).unwrap();
        let merged = TensorRepresentation::SingleRigged(merge_rigged(&terms).unwrap());
        prop_assert!(merged.reconstructs(&p, &target));
        prop_assert!(merged.bound() <= list.bound() * (1.0 + 1e-12));
    }

    #[test]
    fn diamond_square_factor_reconstructs(seed in any::<u64>(), m in 2usize..=3, rank in 1usize..=9) {
        let mut rng = seeded_rng(seed);
        let ctx = DiamondContext::new(m).unwrap();
        let n = m * m;
        let r = rank.min(n);
        let a = &gaussian_matrix(&mut rng, n, r) * &gaussian_matrix(&mut rng, r, n);
        let fac = diamond_square_factor(&a, &ctx).unwrap();
        let err = (&a - &fac.reconstruct(&ctx).unwrap()).op_norm();
        prop_assert!(err <= 1e-8 * a.op_norm());
    }

    #[test]
    fn column_to_row_estimates_never_exceed_root_level(seed in any::<u64>(), n in 1usize..=4) {
        let hc = Arc::new(OperatorSpace::column(n).unwrap());
        let hr = Arc::new(OperatorSpace::row(n).unwrap());
        let phi = LinearMap::formal_identity(hc, hr).unwrap();
        let opts = CbOptions { budget: Budget { restarts: 2, iterations: 20 }, seed, ..Default::default() };
        let est = cb_norm_estimate(&phi, n, &opts).unwrap();
        prop_assert!(est.value <= (n as f64).sqrt() + 1e-9);
    }

    #[test]
    fn representation_json_round_trips(seed in any::<u64>(), m in 1usize..=2) {
        let mut rng = seeded_rng(seed);
        let p = pair(&mut rng);
        let u = AmplifiedElement::random(&mut rng, p.e().clone(), m).unwrap();
        let v = AmplifiedElement::random(&mut rng, p.f().clone(), m).unwrap();
        let rep = TensorRepresentation::SingleEffros(EffrosTerm::new(u, v).unwrap());
        let back: TensorRepresentation = serde_json::from_str(&serde_json::to_string(&rep).unwrap()).unwrap();
        prop_assert_eq!(back, rep);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn norm_chain_is_ordered(seed in any::<u64>(), m in 1usize..=2) {
        let mut rng = seeded_rng(seed);
        let p = pair(&mut rng);
        let u = AmplifiedElement::random(&mut rng, p.e().clone(), m).unwrap();
        let v = AmplifiedElement::random(&mut rng, p.f().clone(), m).unwrap();
        let rep = TensorRepresentation::EffrosList(vec![EffrosTerm::new(u, v).unwrap()]);
        let target = rep.assemble(&p).unwrap();
        let opts = BracketOptions { budget: Budget { restarts: 1, iterations: 30 }, seed, parallel: false, gauge: true };
        let chain = chain_brackets(&p, &target, &[rep], &opts).unwrap();
        prop_assert!(chain.spatial <= chain.haagerup.upper + 1e-9);
        prop_assert!(chain.haagerup.lower <= chain.haagerup.upper);
        prop_assert!(chain.haagerup.upper <= chain.fournamed.upper + 1e-9);
    }

    #[test]
    fn elementary_column_conjugate_row_tensor_is_a_cross_norm(seed in any::<u64>(), h in 1usize..=4) {
        let mut rng = seeded_rng(seed);
        let hc = Arc::new(OperatorSpace::column(h).unwrap());
        let hr_bar = Arc::new(OperatorSpace::conjugate_row(h).unwrap());
        let p = TensorPair::new(hc, hr_bar).unwrap();
        let (x, y) = (gaussian_vector(&mut rng, h), gaussian_vector(&mut rng, h));
        let u = AmplifiedElement::from_scalars(p.e().clone(), &x).unwrap();
        let v = AmplifiedElement::from_scalars(p.f().clone(), &y).unwrap();
        let rep = TensorRepresentation::SingleEffros(EffrosTerm::new(u, v).unwrap());
        let target = rep.assemble(&p).unwrap();
        let b = haagerup_bracket(&p, &target, &[rep], &BracketOptions::default()).unwrap();
        let want = vec_norm(&x) * vec_norm(&y);
        prop_assert!(b.is_resolved());
        prop_assert!(close(b.upper, want, 1e-10) && close(b.lower, want, 1e-6));
    }
}
