//! Mazur steps, schedules and the nested selection.

use banachlab::basis::{profile, FiniteBasicSequence};
use banachlab::optkit::OptBudget;
use banachlab::select::{
    asymptotic_monotone_select, delta_schedule, diagonal_profile, geometric_epsilons, mazur_margin, mazur_step,
    pelczynski_select, SelectConfig, SequenceSource,
};
use banachlab::{Error, Evaluator, Functional, SpaceSpec, SparseVec};

fn shifted_source(len: usize) -> SequenceSource {
    // x_N = e₁ + e_{N+1}
    let vectors = (1..=len).map(|n| SparseVec::from_pairs([(1, 1.0), (n + 1, 1.0)]).unwrap()).collect();
    SequenceSource::List { space: SpaceSpec::l2(), vectors, bounds: (1.0, 2.0) }
}

#[test]
fn schedule_product_stays_below_target() {
    for k in 1..=100 {
        let eps = k as f64 / 100.0;
        let s = delta_schedule(eps, 40).unwrap();
        assert!(s.product() < 1.0 + eps);
        assert!(s.product() <= (1.0 + eps).sqrt() * (1.0 + 1e-15));
        assert!(s.deltas.windows(2).all(|w| w[1] < w[0]));
    }
    let s = delta_schedule(0.21, 3).unwrap();
    assert!((s.deltas[0] - (1.21f64.powf(0.25) - 1.0)).abs() < 1e-15);
    assert!(delta_schedule(f64::NAN, 3).is_err());
}

#[test]
fn orthogonal_candidate_is_accepted_at_once() {
    let step = mazur_step(&SpaceSpec::l2(), &[SparseVec::unit(1)], &SequenceSource::OrthonormalL2, 5, 0.1, &SelectConfig::default()).unwrap();
    assert_eq!(step.index, 5);
    assert_eq!(step.margin.value, 1.0);
    assert!(step.margin.certified);
}

#[test]
fn skew_candidate_margin_matches_closed_form() {
    // min over t of ‖e₁ + t(e₁ + e₂)‖ = min √((1+t)² + t²) = 1/√2 at t = −1/2.
    let oracle = (0..=40000).map(|k| -2.0 + k as f64 * 1e-4).map(|t: f64| ((1.0 + t).powi(2) + t * t).sqrt()).fold(f64::INFINITY, f64::min);
    let step = mazur_step(&SpaceSpec::l2(), &[SparseVec::unit(1)], &shifted_source(20), 1, 0.5, &SelectConfig::default()).unwrap();
    assert_eq!(step.index, 1);
    assert!((step.margin.value - 0.5f64.sqrt()).abs() < 1e-12);
    assert!((step.margin.value - oracle).abs() < 1e-7);
    assert!(step.margin.value >= 1.0 / 1.5);
}

#[test]
fn zero_delta_exhausts_non_orthogonal_source() {
    let cfg = SelectConfig { max_scan: 30, ..SelectConfig::default() };
    let err = mazur_step(&SpaceSpec::l2(), &[SparseVec::unit(1)], &shifted_source(40), 1, 0.0, &cfg).unwrap_err();
    match err {
        Error::NotFound { scanned, best_margin } => {
            assert_eq!(scanned, 30);
            assert!(best_margin < 1.0);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn heuristic_margin_in_l1_is_an_upper_estimate() {
    // In ℓ1 with E = {e₁ + e₂} and x = e₁: ‖(e₁+e₂)/2 + t e₁‖ ≥ 1/2 at t = −1/2.
    let ev = Evaluator::default();
    let m = mazur_margin(&ev, &SpaceSpec::l1(), &[SparseVec::from_dense(&[1.0, 1.0])], &SparseVec::unit(1), &OptBudget::default()).unwrap();
    assert!(!m.certified);
    assert!(m.value >= 0.5 - 1e-12 && m.value < 0.5 + 1e-6, "{m:?}");
}

#[test]
fn pelczynski_rows() {
    let cfg = SelectConfig::default();
    let row = pelczynski_select(&SequenceSource::LpBasis { p: 3.0 }, 0.2, 6, &cfg).unwrap();
    assert_eq!(row.indices, (1..=6).collect::<Vec<_>>());
    assert!(row.margins.iter().all(|m| *m == 1.0));
    let row = pelczynski_select(&SequenceSource::OrthonormalL2, 0.2, 5, &cfg).unwrap();
    assert_eq!(row.indices, (1..=5).collect::<Vec<_>>());

    let eps = 0.3;
    let src = SequenceSource::PerturbedL2;
    let row = pelczynski_select(&src, eps, 6, &cfg).unwrap();
    assert!(row.indices.windows(2).all(|w| w[0] < w[1]));
    let seq = FiniteBasicSequence::new(src.space(), row.indices.iter().map(|&n| src.vector(n).unwrap()).collect()).unwrap();
    let p = profile(&seq, &OptBudget::default()).unwrap();
    assert!(p.certified && p.basis_constant <= (1.0 + eps) * (1.0 + 1e-9), "{p:?}");

    assert!(pelczynski_select(&src, 1.0, 4, &cfg).is_err());
    assert!(pelczynski_select(&src, 0.5, 1, &cfg).is_err());
}

#[test]
fn orthonormal_selection_is_the_identity() {
    let eps: Vec<f64> = (1..=5).map(|k| 1.0 / k as f64).collect();
    let cfg = SelectConfig::default();
    let trace = asymptotic_monotone_select(&SequenceSource::OrthonormalL2, &eps, 5, &cfg, None).unwrap();
    assert_eq!(trace.diagonal, vec![1, 2, 3, 4, 5]);
    let p = diagonal_profile(&SequenceSource::OrthonormalL2, &trace, &cfg.budget).unwrap().unwrap();
    assert!(p.proj_norms.iter().all(|x| *x <= 1.0 + 1e-12));
}

#[test]
fn single_stage_has_vacuous_profile() {
    let cfg = SelectConfig::default();
    let trace = asymptotic_monotone_select(&SequenceSource::PerturbedL2, &[0.5], 1, &cfg, None).unwrap();
    assert_eq!(trace.rows.len(), 1);
    assert!(diagonal_profile(&SequenceSource::PerturbedL2, &trace, &cfg.budget).unwrap().is_none());
}

#[test]
fn trace_is_deterministic_and_serializes() {
    let cfg = SelectConfig::default();
    let eps = geometric_epsilons(0.5, 4).unwrap();
    let a = asymptotic_monotone_select(&SequenceSource::PerturbedL2, &eps, 4, &cfg, None).unwrap();
    let b = asymptotic_monotone_select(&SequenceSource::PerturbedL2, &eps, 4, &cfg, None).unwrap();
    assert_eq!(a, b);
    let json = serde_json::to_value(&a).unwrap();
    for key in ["rows", "diagonal", "margins", "epsilons"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn weak_null_witness_reports_coordinate_decay() {
    let cfg = SelectConfig::default();
    let eps = geometric_epsilons(0.5, 3).unwrap();
    let fam = [Functional::coordinate(1)];
    let trace = asymptotic_monotone_select(&SequenceSource::PerturbedL2, &eps, 3, &cfg, Some(&fam)).unwrap();
    let w = trace.weak_null_witness.unwrap();
    for (k, n) in trace.diagonal.iter().enumerate() {
        let expected = if *n == 1 { 2.0 } else { 1.0 / *n as f64 };
        assert!((w[k] - expected).abs() < 1e-15);
    }
}

#[test]
fn input_validation() {
    let cfg = SelectConfig::default();
    assert!(asymptotic_monotone_select(&SequenceSource::OrthonormalL2, &[0.5, 0.5], 2, &cfg, None).is_err());
    assert!(asymptotic_monotone_select(&SequenceSource::OrthonormalL2, &[0.5], 2, &cfg, None).is_err());
    assert!(geometric_epsilons(1.0, 3).is_err());
    assert_eq!(SequenceSource::named("lp-basis:1.5").unwrap(), SequenceSource::LpBasis { p: 1.5 });
    assert!(SequenceSource::named("lp-basis:0.5").is_err());
    assert!(SequenceSource::named("nope").is_err());
}
