//! Exit-gate checks. Each test prints one `criterion N: PASS|FAIL` line.
//! Tests share a lock so the runtime limits are measured without
//! interference from each other.

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use banachlab::basis::{profile, FiniteBasicSequence};
use banachlab::optkit::OptBudget;
use banachlab::renorm::{default_norming_family, james_ic_norm, premise_check, random_vector};
use banachlab::scalar::{rational_from_f64, Rational};
use banachlab::select::{asymptotic_monotone_select, diagonal_profile, geometric_epsilons, SelectConfig, SequenceSource};
use banachlab::separation::{kottman_lower_bound, symmetric_separation, symmetric_separation_with, verify_separated};
use banachlab::vecspace::{tsirelson_norm, NormConfig};
use banachlab::{Evaluator, Functional, RenormSpec, SpaceSpec, SparseVec};
use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

static SERIAL: Mutex<()> = Mutex::new(());

fn report(n: usize, what: &str, checks: &[(&str, bool)], elapsed: Duration, limit: Duration) {
    let timely = elapsed <= limit;
    let ok = timely && checks.iter().all(|(_, c)| *c);
    let failed: Vec<&str> = checks.iter().filter(|(_, c)| !c).map(|(n, _)| *n).collect();
    println!(
        "criterion {n}: {} ({what}; {:.2}s of {}s{}{})",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs(),
        if timely { "" } else { "; over time" },
        if failed.is_empty() { String::new() } else { format!("; failed: {}", failed.join(", ")) },
    );
    assert!(ok, "criterion {n} failed");
}

fn units(r: std::ops::RangeInclusive<usize>) -> Vec<SparseVec> {
    r.map(SparseVec::unit).collect()
}

fn l1_exact(v: &SparseVec<Rational>) -> Rational {
    v.iter().fold(Rational::zero(), |a, (_, x)| a + x.abs())
}

#[test]
fn criterion_1_max_biorthogonal_identities() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let eps = 0.1;
    let dim = 10;
    let base = SpaceSpec::l1();
    let fs: Vec<Functional> = (1..=dim).map(Functional::coordinate).collect();
    let space = SpaceSpec::renormed(base.clone(), RenormSpec::MaxBiortho { epsilon: eps, functionals: fs.clone() });
    let ev = Evaluator::default();

    // Premise on seeded rationals: the library check plus a direct rational oracle.
    let report_ = premise_check(&base, eps, &fs, 1000, 2024, dim).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let bound = rational_from_f64(1.0 + eps);
    let mut oracle_ok = true;
    for _ in 0..1000 {
        let y = SparseVec::from_pairs(
            (1..=dim).map(|i| (i, Rational::new(rng.gen_range(-30i64..=30).into(), rng.gen_range(1i64..=9).into()))),
        )
        .unwrap();
        let mut abs: Vec<Rational> = y.iter().map(|(_, x)| x.abs()).collect();
        abs.sort();
        abs.reverse();
        let top2 = abs.iter().take(2).fold(Rational::zero(), |a, x| a + x);
        oracle_ok &= top2 <= bound.clone() * l1_exact(&y);
    }

    let one = Rational::one();
    let two = Rational::from_integer(2.into());
    let mut unit_ok = true;
    let mut pair_ok = true;
    for i in 1..=dim {
        let xi = SparseVec::<Rational>::unit(i);
        unit_ok &= ev.norm_exact(&space, &xi).unwrap() == Some(one.clone());
        for j in (i + 1)..=dim {
            let xj = SparseVec::<Rational>::unit(j);
            for s in [xi.add(&xj), xi.sub(&xj)] {
                pair_ok &= ev.norm_exact(&space, &s).unwrap().unwrap() >= two;
            }
        }
    }
    let cert = symmetric_separation(&space, &units(1..=dim), true).unwrap();
    let verified = cert.certified && verify_separated(&cert, 2.0, 0.0).unwrap();
    report(
        1,
        "max-biorthogonal norm on l1 dim 10, eps 0.1, exact",
        &[
            ("premise (library)", report_.holds && report_.exact),
            ("premise (oracle)", oracle_ok),
            ("|x_i| = 1", unit_ok),
            ("|x_i ± x_j| >= 2", pair_ok),
            ("verify_separated(2, 0)", verified),
        ],
        t.elapsed(),
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_2_james_infimal_convolution() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let dim = 12;
    let weights: Vec<f64> = (0..dim).map(|i| 1.0 + 0.1 * i as f64 / (dim - 1) as f64).collect();
    let base = SpaceSpec::renormed(SpaceSpec::l1(), RenormSpec::Diagonal { weights: weights.clone() });
    let blocks = units(1..=dim);
    let spec = RenormSpec::JamesIc { blocks: blocks.clone(), support_budget: dim };
    let budget = OptBudget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(12);

    // Declared sandwich ‖a‖₁ ≤ ‖Ta‖ ≤ 1.1‖a‖₁ holds for the diagonal weights.
    let sandwich_declared = weights.iter().all(|w| (1.0..=1.1).contains(w));

    let mut iso_ok = true;
    let mut iso_certified = true;
    let mut iso_worst = 0.0f64;
    for _ in 0..100 {
        let a: Vec<f64> = (0..dim).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(-2.0..2.0) }).collect();
        let ta = a.iter().zip(&blocks).fold(SparseVec::zero(), |acc, (c, b)| acc.axpy(c, b));
        let r = james_ic_norm(&base, &spec, &ta, &budget).unwrap();
        let l1: f64 = a.iter().map(|x| x.abs()).sum();
        iso_worst = iso_worst.max((r.value - l1).abs());
        iso_ok &= (r.value - l1).abs() <= 1e-6;
        iso_certified &= r.certified;
    }

    let ev = Evaluator::default();
    let mut sandwich_ok = true;
    for _ in 0..100 {
        let y = random_vector(&mut rng, dim);
        let n = ev.norm(&base, &y).unwrap();
        let j = james_ic_norm(&base, &spec, &y, &budget).unwrap().value;
        sandwich_ok &= n / 1.1 <= j + 1e-12 && j <= n + 1e-12;
    }

    let space = SpaceSpec::renormed(base.clone(), spec.clone());
    let seq = FiniteBasicSequence::new(space, blocks).unwrap();
    let prof = profile(&seq, &OptBudget::default().with_restarts(1).with_iters(12)).unwrap();
    let all_one = prof.proj_norms.iter().chain(&prof.tail_norms).all(|x| (x - 1.0).abs() <= 1e-7);
    report(
        2,
        &format!("James norm over weighted l1 dim 12; isometry worst error {iso_worst:.1e}"),
        &[
            ("declared sandwich", sandwich_declared),
            ("isometry on T-images", iso_ok),
            ("isometry on exact path", iso_certified),
            ("sandwich", sandwich_ok),
            ("profile identically 1", all_one && prof.bimonotone),
        ],
        t.elapsed(),
        Duration::from_secs(60),
    );
}

/// `‖Pₖ‖ = 1/sin θ` with `θ` the smallest principal angle between the head
/// and tail spans, via orthonormal bases and singular values.
fn principal_angle_projection_norm(vectors: &[SparseVec], k: usize, dim: usize) -> f64 {
    let cols = |vs: &[SparseVec]| DMatrix::from_fn(dim, vs.len(), |r, c| vs[c].get(r + 1));
    let qh = cols(&vectors[..k]).qr().q();
    let qt = cols(&vectors[k..]).qr().q();
    let cos = (qh.transpose() * qt).singular_values().max().min(1.0);
    1.0 / (1.0 - cos * cos).sqrt()
}

#[test]
fn criterion_3_asymptotically_monotone_selection() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let source = SequenceSource::PerturbedL2;
    let stages = 6;
    let eps = geometric_epsilons(0.5, stages).unwrap();
    let cfg = SelectConfig::default();
    let trace = asymptotic_monotone_select(&source, &eps, stages, &cfg, None).unwrap();
    let prof = diagonal_profile(&source, &trace, &cfg.budget).unwrap().unwrap();

    let diag_vecs: Vec<SparseVec> = trace.diagonal.iter().map(|&n| source.vector(n).unwrap()).collect();
    let dim = *trace.diagonal.last().unwrap();
    let oracle_ok = (1..stages).all(|k| {
        (principal_angle_projection_norm(&diag_vecs, k, dim) - prof.proj_norms[k - 1]).abs() < 1e-9
    });
    let bound_ok = (1..stages).all(|k| prof.proj_norms[k - 1] <= (1.0 + eps[k - 1]) * (1.0 + 1e-6));
    let nonincreasing = prof.proj_norms.windows(2).all(|w| w[1] <= w[0] + 1e-3);
    let toward_one = prof.proj_norms.last().map_or(false, |p| *p - 1.0 <= eps[stages - 2]);
    let prefix = (1..trace.rows.len()).all(|j| trace.rows[j][..j] == trace.rows[j - 1][..j]);
    let increasing = trace.diagonal.windows(2).all(|w| w[0] < w[1]);
    report(
        3,
        &format!("perturbed-l2, eps_k = 2^-k, 6 stages; diagonal {:?}; ‖P_k‖ {:?}", trace.diagonal, prof.proj_norms),
        &[
            ("profile certified", prof.certified),
            ("principal-angle oracle", oracle_ok),
            ("‖P_k‖ <= (1+eps_k)(1+1e-6)", bound_ok),
            ("non-increasing", nonincreasing),
            ("approaches 1", toward_one),
            ("prefix stability", prefix),
            ("diagonal increasing", increasing),
        ],
        t.elapsed(),
        Duration::from_secs(120),
    );
}

/// Exhaustive Tsirelson norm over admissible families of arbitrary subsets.
fn brute_t(coords: &[(usize, f64)], mask: u32, memo: &mut HashMap<u32, f64>) -> f64 {
    if mask == 0 {
        return 0.0;
    }
    if let Some(&v) = memo.get(&mask) {
        return v;
    }
    let members: Vec<usize> = (0..coords.len()).filter(|b| mask >> b & 1 == 1).collect();
    let mut best = members.iter().map(|&b| coords[b].1.abs()).fold(0.0, f64::max);
    // Assign each member a label 0 (dropped) or a group number, groups in order.
    let n = members.len();
    let total = (n + 1).pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let mut groups: Vec<u32> = Vec::new();
        let mut last = 0;
        let mut ok = true;
        for &m in &members {
            let l = c % (n + 1);
            c /= n + 1;
            if l == 0 {
                continue;
            }
            if l == last {
                *groups.last_mut().unwrap() |= 1 << m;
            } else if l == last + 1 {
                groups.push(1 << m);
                last = l;
            } else {
                ok = false;
                break;
            }
        }
        if !ok || groups.is_empty() || (groups.len() == 1 && groups[0] == mask) {
            continue;
        }
        if groups.len() <= coords[groups[0].trailing_zeros() as usize].0 {
            let s: f64 = groups.iter().map(|&g| brute_t(coords, g, memo)).sum();
            best = best.max(0.5 * s);
        }
    }
    memo.insert(mask, best);
    best
}

#[test]
fn criterion_4_tstar_separation_witness() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let ev = Evaluator::new(NormConfig { tsirelson_cap: 8, ..NormConfig::default() });
    let vectors = units(2..=8);
    let cert = symmetric_separation_with(&ev, &SpaceSpec::tsirelson_dual(), &vectors, true).unwrap();
    let exact_two = cert.separation_exact.as_deref() == Some("2");
    // Oracle: ‖eᵢ ± eⱼ‖_T = 1 by exhaustive enumeration, so the functional
    // eᵢ* ± eⱼ* has T*-norm at least 2; it is at most 2 by the ℓ1 bound.
    let mut oracle_ok = true;
    for i in 2..=8usize {
        for j in (i + 1)..=8 {
            for s in [1.0, -1.0] {
                let coords = [(i, 1.0), (j, s)];
                let bf = brute_t(&coords, 0b11, &mut HashMap::new());
                let dp = tsirelson_norm(&SparseVec::from_pairs(coords).unwrap()).unwrap();
                oracle_ok &= bf == 1.0 && dp == 1.0;
            }
        }
    }
    report(
        4,
        "T* on {e2..e8}, support cap 8, rational path",
        &[
            ("certified", cert.certified),
            ("separation exactly 2", exact_two),
            ("verify_separated(2, 0)", verify_separated(&cert, 2.0, 0.0).unwrap()),
            ("brute-force T oracle", oracle_ok),
        ],
        t.elapsed(),
        Duration::from_secs(60),
    );
}

/// Direct evaluation of the quadratic renorm on ℓ1.
fn quad_norm(x: &SparseVec, delta: f64, fam: &[Functional]) -> f64 {
    let l1: f64 = x.iter().map(|(_, a)| a.abs()).sum();
    let q: f64 = fam.iter().enumerate().map(|(n, f)| 0.5f64.powi(n as i32 + 1) * f.apply(x).powi(2)).sum();
    (l1 * l1 + delta * q).sqrt()
}

#[test]
fn criterion_5_strictly_convex_renorm() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let (dim, eps, delta) = (8, 0.2, 0.05);
    let base = SpaceSpec::l1();
    let fam = default_norming_family(&base, dim, 32, 0).unwrap();
    let spec = RenormSpec::StrictConvex { delta, epsilon: eps, functionals: fam.clone() };
    let space = SpaceSpec::renormed(base.clone(), spec);
    let ev = Evaluator::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    let mut sandwich_ok = true;
    let mut oracle_ok = true;
    for _ in 0..1000 {
        let x = random_vector(&mut rng, dim);
        let n = ev.norm(&base, &x).unwrap();
        let r = ev.norm(&space, &x).unwrap();
        sandwich_ok &= r >= n - 1e-9 && r <= (1.0 + delta).sqrt() * n + 1e-9;
        oracle_ok &= (r - quad_norm(&x, delta, &fam)).abs() <= 1e-12 * r.max(1.0);
    }

    let unit = |x: SparseVec| {
        let n = ev.norm(&space, &x).unwrap();
        x.scale(&(1.0 / n))
    };
    let mut pairs_ok = true;
    let mut tested = 0;
    let mut worst = 0.0f64;
    while tested < 1000 {
        // Every other pair is a perturbed signed basis pair.
        let (x, y) = if tested % 2 == 0 {
            (unit(random_vector(&mut rng, dim)), unit(random_vector(&mut rng, dim)))
        } else {
            let i = rng.gen_range(1..=dim);
            let j = (i % dim) + 1;
            let noise = |rng: &mut ChaCha8Rng| SparseVec::from_dense(&(0..dim).map(|_| 1e-3 * rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>());
            (unit(SparseVec::unit(i).add(&noise(&mut rng))), unit(SparseVec::unit(j).scale(&-1.0).add(&noise(&mut rng))))
        };
        let (d, s) = (x.sub(&y), x.add(&y));
        let separated = fam.iter().any(|f| f.apply(&d) != 0.0) && fam.iter().any(|f| f.apply(&s) != 0.0);
        if x == y || x == y.neg() || !separated {
            continue;
        }
        tested += 1;
        let m = ev.norm(&space, &d).unwrap().min(ev.norm(&space, &s).unwrap());
        worst = worst.max(m);
        pairs_ok &= m < 2.0 - 1e-9;
    }

    // The ℓ1 basis set of criterion 1, renormalized under the renorm on dim 10.
    let fam10 = default_norming_family(&base, 10, 32, 0).unwrap();
    let space10 = SpaceSpec::renormed(base.clone(), RenormSpec::StrictConvex { delta, epsilon: eps, functionals: fam10 });
    let basis: Vec<SparseVec> = units(1..=10)
        .into_iter()
        .map(|e| {
            let n = ev.norm(&space10, &e).unwrap();
            e.scale(&(1.0 / n))
        })
        .collect();
    let cert = symmetric_separation(&space10, &basis, true).unwrap();
    let raw_max = cert.pairs.iter().map(|p| p.2).fold(0.0, f64::max);
    let basis_fails = !verify_separated(&cert, 2.0, 0.0).unwrap() && raw_max < 2.0 - 1e-9;
    report(
        5,
        &format!("quadratic renorm of l1 dim 8, eps 0.2, delta 0.05; worst pair {worst:.9}"),
        &[
            ("sandwich", sandwich_ok),
            ("direct-formula oracle", oracle_ok),
            ("pairs below 2", pairs_ok),
            ("basis certificate fails at 2", basis_fails),
        ],
        t.elapsed(),
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_6_kottman_floor() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let budget = OptBudget::default();
    let p = kottman_lower_bound(&SpaceSpec::lp(1.5), 4, 8, &budget).unwrap();
    let floor = 2f64.powf(1.0 / 1.5) - 1e-6;
    let l1 = kottman_lower_bound(&SpaceSpec::l1(), 4, 4, &budget).unwrap();
    report(
        6,
        &format!("lp(1.5) dim 8 k 4 found {:.9}; l1 dim 4 k 4 found {:?}", p.separation, l1.separation_exact),
        &[
            ("lp(1.5) floor", p.separation >= floor && p.unit_residual < 1e-12),
            ("l1 reaches 2", l1.separation >= 2.0 - 1e-9),
            ("l1 exactly 2 on rational path", l1.certified && l1.separation_exact.as_deref() == Some("2")),
        ],
        t.elapsed(),
        Duration::from_secs(60),
    );
}

fn runner(seed: u64) -> TestRunner {
    TestRunner::new(Config { cases: 1000, rng_seed: RngSeed::Fixed(seed), failure_persistence: None, ..Config::default() })
}

fn vec_strategy(dim: usize) -> impl Strategy<Value = SparseVec> {
    proptest::collection::vec(-12i32..=12, dim).prop_map(|v| SparseVec::from_dense(&v.iter().map(|x| *x as f64 / 4.0).collect::<Vec<_>>()))
}

fn property_spaces() -> Vec<SpaceSpec> {
    let fam: Vec<Functional> = (1..=6).map(Functional::coordinate).collect();
    vec![
        SpaceSpec::l1(),
        SpaceSpec::l2(),
        SpaceSpec::linf(),
        SpaceSpec::lp(1.5),
        SpaceSpec::lp(3.0),
        SpaceSpec::C0,
        SpaceSpec::tsirelson(),
        SpaceSpec::tsirelson_dual(),
        SpaceSpec::renormed(SpaceSpec::l1(), RenormSpec::MaxBiortho { epsilon: 0.3, functionals: fam.clone() }),
        SpaceSpec::renormed(SpaceSpec::l2(), RenormSpec::Diagonal { weights: vec![1.0, 2.0, 0.5, 3.0] }),
        SpaceSpec::renormed(SpaceSpec::l1(), RenormSpec::StrictConvex { delta: 0.05, epsilon: 0.2, functionals: fam }),
    ]
}

fn suite_norm_axioms(ev: &Evaluator) -> bool {
    let spaces = property_spaces();
    let n = spaces.len();
    runner(1)
        .run(&(0..n, vec_strategy(6), vec_strategy(6), -3.0f64..3.0), |(s, u, v, a)| {
            let sp = &spaces[s];
            let nu = ev.norm(sp, &u).unwrap();
            let nv = ev.norm(sp, &v).unwrap();
            let nuv = ev.norm(sp, &u.add(&v)).unwrap();
            let nau = ev.norm(sp, &u.scale(&a)).unwrap();
            prop_assert!((nau - a.abs() * nu).abs() <= 1e-12 * nu.max(1.0) * a.abs().max(1.0), "homogeneity {nau} vs {}", a.abs() * nu);
            prop_assert!(nuv <= nu + nv + 1e-12 * (nu + nv).max(1.0), "triangle");
            prop_assert_eq!(nu == 0.0, u.is_zero());
            Ok(())
        })
        .map_err(|e| eprintln!("property failure: {e}"))
        .is_ok()
}

fn suite_duality(ev: &Evaluator) -> bool {
    let spaces: Vec<SpaceSpec> = property_spaces().into_iter().filter(|s| !matches!(s, SpaceSpec::Renormed { renorm, .. } if matches!(**renorm, RenormSpec::StrictConvex { .. }))).collect();
    let n = spaces.len();
    runner(2)
        .run(&(0..n, vec_strategy(6), vec_strategy(6)), |(s, f, x)| {
            let sp = &spaces[s];
            let fnorm = ev.dual_norm(sp, &Functional(f.clone())).unwrap();
            let xnorm = ev.norm(sp, &x).unwrap();
            let pairing = f.dot(&x);
            prop_assert!(pairing.abs() <= fnorm * xnorm + 1e-9 * (fnorm * xnorm).max(1.0));
            if let Some((val, arg)) = ev.dual_norm_poly::<f64>(sp, &f).unwrap() {
                if !f.is_zero() {
                    prop_assert!((ev.norm(sp, &arg).unwrap() - 1.0).abs() < 1e-9);
                    prop_assert!((f.dot(&arg) - val).abs() < 1e-9 * val.max(1.0));
                }
            }
            Ok(())
        })
        .map_err(|e| eprintln!("property failure: {e}"))
        .is_ok()
}

fn suite_tsirelson() -> bool {
    runner(3)
        .run(&(vec_strategy(9), proptest::collection::vec(any::<bool>(), 9), proptest::collection::vec(0.0f64..=1.0, 9)), |(x, signs, shrink)| {
            let xr = x.to_rational();
            let t = tsirelson_norm(&xr).unwrap();
            let sup = xr.iter().fold(Rational::zero(), |a, (_, v)| a.max(v.abs()));
            prop_assert!(sup <= t && t <= l1_exact(&xr));
            let flipped = x.iter().fold(SparseVec::zero(), |mut acc, (i, v)| {
                acc.set(i, if signs[i - 1] { -*v } else { *v });
                acc
            });
            prop_assert_eq!(tsirelson_norm(&flipped.to_rational()).unwrap(), t.clone());
            let smaller = x.iter().fold(SparseVec::zero(), |mut acc, (i, v)| {
                acc.set(i, v * (shrink[i - 1] * 4.0).round() / 4.0);
                acc
            });
            prop_assert!(tsirelson_norm(&smaller.to_rational()).unwrap() <= t);
            Ok(())
        })
        .map_err(|e| eprintln!("property failure: {e}"))
        .is_ok()
}

fn suite_profile() -> bool {
    let spaces = [SpaceSpec::l1(), SpaceSpec::l2(), SpaceSpec::linf(), SpaceSpec::renormed(SpaceSpec::l2(), RenormSpec::Diagonal { weights: vec![1.0, 2.0, 3.0] }), SpaceSpec::lp(1.5)];
    let budget = OptBudget::default().with_restarts(1).with_iters(10);
    runner(4)
        .run(&(0..spaces.len(), proptest::collection::vec(vec_strategy(4), 2..=3)), |(s, vectors)| {
            let Ok(seq) = FiniteBasicSequence::new(spaces[s].clone(), vectors) else {
                return Ok(());
            };
            let p = profile(&seq, &budget).unwrap();
            prop_assert!(p.proj_norms.iter().chain(&p.tail_norms).all(|x| *x >= 1.0 - 1e-12), "{:?}", p);
            Ok(())
        })
        .map_err(|e| eprintln!("property failure: {e}"))
        .is_ok()
}

fn suite_prefix_stability() -> bool {
    let cfg = SelectConfig::default();
    runner(5)
        .run(&(0.1f64..1.0, 0.4f64..0.7, 2usize..=4), |(c, r, stages)| {
            let vectors: Vec<SparseVec> = (1..=400).map(|n| SparseVec::unit(n + 1).axpy(&(c / n as f64), &SparseVec::unit(1))).collect();
            let source = SequenceSource::List { space: SpaceSpec::l2(), vectors, bounds: (1.0, 1.5) };
            let eps = geometric_epsilons(r, stages).unwrap();
            let trace = asymptotic_monotone_select(&source, &eps, stages, &cfg, None).map_err(|e| TestCaseError::fail(e.to_string()))?;
            for j in 1..trace.rows.len() {
                prop_assert_eq!(&trace.rows[j][..j], &trace.rows[j - 1][..j]);
            }
            prop_assert!(trace.diagonal.windows(2).all(|w| w[0] < w[1]));
            Ok(())
        })
        .map_err(|e| eprintln!("property failure: {e}"))
        .is_ok()
}

fn suite_lipschitz_transfer(ev: &Evaluator) -> bool {
    let bases = [SpaceSpec::l1(), SpaceSpec::l2(), SpaceSpec::linf()];
    runner(6)
        .run(
            &(0..bases.len(), proptest::collection::vec(vec_strategy(4), 3), proptest::collection::vec(0.5f64..2.0, 4)),
            |(b, raw, weights)| {
                let base = &bases[b];
                if raw.iter().any(SparseVec::is_zero) {
                    return Ok(());
                }
                let xs: Vec<SparseVec> = raw.iter().map(|v| v.scale(&(1.0 / ev.norm(base, v).unwrap()))).collect();
                let a = weights.iter().copied().fold(1.0, f64::min);
                let bb = weights.iter().copied().fold(1.0, f64::max);
                let renormed = SpaceSpec::renormed(base.clone(), RenormSpec::Diagonal { weights });
                let raw_min = |c: &banachlab::separation::SeparationCertificate| c.pairs.iter().map(|p| p.2).fold(f64::INFINITY, f64::min);
                let s = raw_min(&symmetric_separation_with(ev, base, &xs, false).unwrap());
                let same = symmetric_separation_with(ev, &renormed, &xs, false).unwrap();
                let s_same = raw_min(&same);
                prop_assert!(s_same >= a * s - 1e-12 && s_same <= bb * s + 1e-12);
                let ys: Vec<SparseVec> = xs.iter().map(|v| v.scale(&(1.0 / ev.norm(&renormed, v).unwrap()))).collect();
                let s_new = raw_min(&symmetric_separation_with(ev, &renormed, &ys, false).unwrap());
                prop_assert!(s_new >= (a / bb) * s - 2.0 * same.unit_residual - 1e-12);
                Ok(())
            },
        )
        .map_err(|e| eprintln!("property failure: {e}"))
        .is_ok()
}

#[test]
fn criterion_7_property_suites() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let ev = Evaluator::default();
    let suites = [
        ("norm axioms", suite_norm_axioms(&ev)),
        ("duality inequality", suite_duality(&ev)),
        ("T sandwich/unconditionality", suite_tsirelson()),
        ("profile >= 1", suite_profile()),
        ("trace prefix-stability", suite_prefix_stability()),
        ("renorm Lipschitz transfer", suite_lipschitz_transfer(&ev)),
    ];
    report(7, "six seeded property suites, 1000 cases each", &suites, t.elapsed(), Duration::from_secs(3600));
}
