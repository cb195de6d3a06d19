//! Randomized invariants across modules.

use banachlab::basis::{profile, FiniteBasicSequence};
use banachlab::optkit::OptBudget;
use banachlab::select::delta_schedule;
use banachlab::separation::symmetric_separation;
use banachlab::vecspace::tsirelson_norm;
use banachlab::{Evaluator, SpaceSpec, SparseVec};
use proptest::prelude::*;

fn dense(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-8i32..=8, dim).prop_map(|v| v.into_iter().map(|x| x as f64 / 2.0).collect())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn sparse_roundtrip(d in dense(7)) {
        let v = SparseVec::from_dense(&d);
        prop_assert_eq!(v.to_dense(7), d.clone());
        prop_assert!(v.iter().all(|(_, x)| *x != 0.0));
        prop_assert_eq!(v.add(&v.neg()), SparseVec::zero());
    }

    #[test]
    fn exact_and_float_paths_agree(d in dense(6)) {
        let ev = Evaluator::default();
        let v = SparseVec::from_dense(&d);
        for space in [SpaceSpec::l1(), SpaceSpec::linf(), SpaceSpec::tsirelson(), SpaceSpec::tsirelson_dual()] {
            let exact = ev.norm_exact(&space, &v.to_rational()).unwrap().unwrap();
            let float = ev.norm(&space, &v).unwrap();
            prop_assert!((banachlab::Scalar::to_f64(&exact) - float).abs() <= 1e-12 * float.max(1.0));
        }
    }

    #[test]
    fn tsirelson_is_shift_monotone(d in dense(5)) {
        // Moving a vector right only enlarges the admissible families.
        let v = SparseVec::from_dense(&d);
        let shifted = SparseVec::from_pairs(v.iter().map(|(i, x)| (i + 1, *x))).unwrap();
        prop_assert!(tsirelson_norm(&shifted.to_rational()).unwrap() >= tsirelson_norm(&v.to_rational()).unwrap());
    }

    #[test]
    fn schedule_product_below_target(eps in 1e-6f64..=1.0, len in 1usize..60) {
        prop_assert!(delta_schedule(eps, len).unwrap().product() < 1.0 + eps);
    }

    #[test]
    fn unconditional_profiles_are_one(m in 2usize..6, p in 1.0f64..6.0) {
        let seq = FiniteBasicSequence::new(SpaceSpec::lp(p), (1..=m).map(SparseVec::unit).collect()).unwrap();
        let prof = profile(&seq, &OptBudget::default()).unwrap();
        prop_assert!(prof.proj_norms.iter().chain(&prof.tail_norms).all(|x| (x - 1.0).abs() < 1e-9));
    }

    #[test]
    fn separation_bounded_by_pairs(a in dense(4), b in dense(4), c in dense(4)) {
        let vs: Vec<SparseVec> = [a, b, c].iter().map(|d| SparseVec::from_dense(d)).collect();
        prop_assume!(vs.iter().all(|v| !v.is_zero()));
        let cert = symmetric_separation(&SpaceSpec::l2(), &vs, false).unwrap();
        prop_assert!(cert.pairs.iter().all(|p| cert.separation <= p.2));
        prop_assert_eq!(cert.pairs.len(), 3);
    }
}
