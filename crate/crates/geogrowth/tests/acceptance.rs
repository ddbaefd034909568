//! End-to-end acceptance suite. Each test covers one criterion and prints a
//! single pass line; tolerances are pinned in the constants below.

mod common;

use std::collections::BTreeSet;

use common::{brute_force, swap_language_member};
use geogrowth::automaton::{infer_with_escalation, validate};
use geogrowth::engine::{bfs_census, quotient_compare, CensusOptions};
use geogrowth::genset::{main_theorem_genset, GenSet};
use geogrowth::group::{
    builtin, heisenberg_abelianization, lattice_rank, va_epimorphism, GroupElement,
    VirtuallyAbelianGroup,
};
use geogrowth::growth::{
    classify, lemma52_bound_check, linear_recurrence, ClassifyParams, GrowthSequence, Verdict,
};
use geogrowth::hull::{containment_g2, containment_z2, exponential_witness_g2, exponential_witness_z2};
use num::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RANDOM_SET_SEED: u64 = 0x5EED_2026;
const RANDOM_SET_COUNT: usize = 20;
const STABILITY_WINDOW: usize = 5;

fn opts() -> CensusOptions {
    CensusOptions::default()
}

fn pass(criterion: usize, name: &str) {
    println!("criterion {criterion} ({name}): PASS");
}

fn sym(
    group: &VirtuallyAbelianGroup,
    base: Vec<(&str, GroupElement)>,
) -> GenSet<VirtuallyAbelianGroup> {
    GenSet::symmetric_closure(
        group,
        base.into_iter().map(|(l, e)| (l.to_string(), e)).collect(),
    )
    .unwrap()
}

fn t(v: Vec<i64>) -> GroupElement {
    GroupElement::translation(v)
}

fn flip(v: Vec<i64>) -> GroupElement {
    GroupElement::new(v, 1)
}

/// Per-length geodesic count 2n+2 for the direct product of a line with a
/// two-element group, all 2 <= n <= 40.
#[test]
fn criterion_1_exact_formula_line_times_c2() {
    let g = builtin::z_cross_c2();
    let x = sym(&g, vec![("t", t(vec![1])), ("a", flip(vec![0]))]);
    let census = bfs_census(&g, &x, 40, &opts()).unwrap();
    let sigma = census.sigma_big_gamma();
    for n in 2..=40usize {
        let expected = BigUint::from(2 * n as u64 + 2);
        assert_eq!(sigma[n], expected, "FAIL: sigma({n}) = {} != 2n+2", sigma[n]);
    }
    pass(1, "per-length count 2n+2, n in [2,40]");
}

/// Per-length count 2n^2-2n for the swap extension, plus exact agreement of
/// the geodesic set with the known closed-form language up to length 7.
#[test]
fn criterion_2_exact_formula_swap_extension() {
    let g = builtin::g1();
    let x = sym(&g, vec![("a", t(vec![1, 0])), ("t", flip(vec![0, 0]))]);
    let census = bfs_census(&g, &x, 40, &opts()).unwrap();
    let sigma = census.sigma_big_gamma();
    for n in 5..=40usize {
        let expected = BigUint::from(2 * n as u64 * n as u64 - 2 * n as u64);
        assert_eq!(sigma[n], expected, "FAIL: sigma({n}) = {} != 2n^2-2n", sigma[n]);
    }

    let a = x.index_of("a").unwrap();
    let a_inv = x.index_of("a^-1").unwrap();
    let tt = x.index_of("t").unwrap();
    let radius = 7;
    let oracle = brute_force(&g, &x, radius);
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for len in 0..=radius {
        let geodesics: std::collections::HashSet<&Vec<usize>> =
            oracle.geodesic_words[len].iter().collect();
        for w in &layer {
            assert_eq!(
                geodesics.contains(w),
                swap_language_member(w, a, a_inv, tt),
                "FAIL: language mismatch at {:?}",
                oracle.word_labels(w)
            );
        }
        if len < radius {
            layer = layer
                .iter()
                .flat_map(|w| {
                    (0..3).map(move |i| {
                        let mut w2 = w.clone();
                        w2.push(i);
                        w2
                    })
                })
                .collect();
        }
    }
    pass(2, "per-length count 2n^2-2n, n in [5,40], and language equality to length 7");
}

/// Doubling the line's generator: 2^n geodesics to the n-th power of the
/// generator, and an exponential classifier verdict with rate near 2.
#[test]
fn criterion_3_doubled_line() {
    let g = builtin::z();
    let x = sym(&g, vec![("t", t(vec![1]))]).double();
    let census = bfs_census(&g, &x, 25, &opts()).unwrap();
    for n in 0..=20i64 {
        let p = census.geodesic_count_to(&g, &t(vec![n])).unwrap();
        assert_eq!(*p, BigUint::from(2u32).pow(n as u32), "FAIL: p(t^{n}) != 2^{n}");
    }
    let seq = GrowthSequence::cumulative_from_biguint(&census.big_gamma());
    let result = classify(&seq, &ClassifyParams::default()).unwrap();
    match result.verdict {
        Verdict::Exponential { estimate, .. } => {
            assert!(
                (1.9..=2.1).contains(&estimate),
                "FAIL: rate estimate {estimate} outside [1.9, 2.1]"
            );
        }
        other => panic!("FAIL: expected exponential verdict, got {other:?}"),
    }
    pass(3, "doubled generator: p(t^n) = 2^n for n <= 20, exponential with rate ~2");
}

/// Hull witness and exhaustive containment over pseudo-random symmetric
/// generating sets of the rank-2 lattice.
#[test]
fn criterion_4_plane_hull_property_suite() {
    let g = builtin::z2();
    let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SET_SEED);
    let mut tested = 0usize;
    while tested < RANDOM_SET_COUNT {
        let rand_vec = |rng: &mut ChaCha8Rng| loop {
            let v = vec![rng.gen_range(-3i64..=3), rng.gen_range(-3i64..=3)];
            if v.iter().any(|&c| c != 0) {
                return v;
            }
        };
        let v1 = rand_vec(&mut rng);
        let v2 = rand_vec(&mut rng);
        if lattice_rank(&[v1.clone(), v2.clone()], 2) != 2 {
            continue;
        }
        let set = match GenSet::symmetric_closure(
            &g,
            vec![("a".to_string(), t(v1.clone())), ("b".to_string(), t(v2.clone()))],
        ) {
            Ok(s) => s,
            Err(_) => continue,
        };
        for n in 1..=5 {
            let report = exponential_witness_z2(&g, &set, n, &opts()).unwrap();
            assert!(
                report.pass,
                "FAIL: witness for letters {v1:?},{v2:?} at n={n}: {}",
                report.render()
            );
        }
        let ball = bfs_census(&g, &set, 8, &opts()).unwrap();
        assert!(
            containment_z2(&g, &set, &ball).unwrap(),
            "FAIL: containment for letters {v1:?},{v2:?}"
        );
        tested += 1;
    }
    pass(4, "20 random plane gensets: witness d=2n with C(2n,n) geodesics, containment to radius 8");
}

/// Short-set construction, hull witness and containment for generating sets
/// of the flip extension of the plane.
#[test]
fn criterion_5_flip_extension_suite() {
    let g = builtin::g2();
    let sets: Vec<(&str, GenSet<VirtuallyAbelianGroup>)> = vec![
        ("abt", sym(&g, vec![("a", t(vec![1, 0])), ("b", t(vec![0, 1])), ("t", flip(vec![0, 0]))])),
        ("act", sym(&g, vec![("a", t(vec![1, 0])), ("c", t(vec![1, 1])), ("t", flip(vec![0, 0]))])),
        ("abu", sym(&g, vec![("a", t(vec![1, 0])), ("b", t(vec![0, 1])), ("u", flip(vec![1, 0]))])),
        ("dbt", sym(&g, vec![("d", t(vec![2, 1])), ("b", t(vec![0, 1])), ("t", flip(vec![0, 0]))])),
        (
            "abct",
            sym(
                &g,
                vec![
                    ("a", t(vec![1, 0])),
                    ("b", t(vec![0, 1])),
                    ("c", t(vec![1, 1])),
                    ("t", flip(vec![0, 0])),
                ],
            ),
        ),
    ];
    for (name, set) in &sets {
        for n in 1..=4 {
            let report = exponential_witness_g2(&g, set, n, &opts()).unwrap();
            assert!(report.pass, "FAIL: witness for {name} at n={n}: {}", report.render());
        }
        let ball = bfs_census(&g, set, 8, &opts()).unwrap();
        assert!(containment_g2(&g, set, &ball).unwrap(), "FAIL: containment for {name}");
    }
    pass(5, "5 flip-extension gensets: witness d=4n with C(2n,n) geodesics, containment to radius 8");
}

/// Geodesic growth dominates word growth, and epimorphisms do not increase
/// geodesic growth.
#[test]
fn criterion_6_growth_inequalities() {
    // Γ >= γ on every built-in, n <= 20
    let va_cases: Vec<(&str, VirtuallyAbelianGroup, GenSet<VirtuallyAbelianGroup>)> = {
        let z = builtin::z();
        let z2 = builtin::z2();
        let zc2 = builtin::z_cross_c2();
        let g1 = builtin::g1();
        let g2 = builtin::g2();
        let dinf = builtin::dinf();
        vec![
            ("Z", z.clone(), sym(&z, vec![("t", t(vec![1]))])),
            ("Z2", z2.clone(), sym(&z2, vec![("a", t(vec![1, 0])), ("b", t(vec![0, 1]))])),
            ("ZxC2", zc2.clone(), sym(&zc2, vec![("t", t(vec![1])), ("a", flip(vec![0]))])),
            ("G1", g1.clone(), sym(&g1, vec![("a", t(vec![1, 0])), ("t", flip(vec![0, 0]))])),
            (
                "G2",
                g2.clone(),
                sym(&g2, vec![("a", t(vec![1, 0])), ("b", t(vec![0, 1])), ("t", flip(vec![0, 0]))]),
            ),
            ("Dinf", dinf.clone(), sym(&dinf, vec![("t", t(vec![1])), ("s", flip(vec![0]))])),
        ]
    };
    for (name, group, set) in &va_cases {
        let census = bfs_census(group, set, 20, &opts()).unwrap();
        let big_gamma = census.big_gamma();
        let gamma = census.gamma();
        for n in 0..=20usize {
            assert!(
                big_gamma[n] >= BigUint::from(gamma[n]),
                "FAIL: Gamma < gamma for {name} at n={n}"
            );
        }
    }
    let h = builtin::heisenberg();
    let hx = GenSet::symmetric_closure(
        &h,
        vec![("x".to_string(), [1, 0, 0]), ("y".to_string(), [0, 1, 0])],
    )
    .unwrap();
    let census = bfs_census(&h, &hx, 20, &opts()).unwrap();
    let big_gamma = census.big_gamma();
    let gamma = census.gamma();
    for n in 0..=20usize {
        assert!(big_gamma[n] >= BigUint::from(gamma[n]), "FAIL: Gamma < gamma for Heisenberg at n={n}");
    }

    // quotient comparisons, n <= 10
    let z2 = builtin::z2();
    let phi = heisenberg_abelianization(&h, &z2).unwrap();
    let report = quotient_compare(&phi, &hx, 10, &opts()).unwrap();
    assert!(report.holds, "FAIL: Heisenberg -> Z2 quotient inequality at {:?}", report.first_violation);

    let z = builtin::z();
    let phi2 = va_epimorphism(&z2, &z, vec![vec![1, 0]], vec![0]).unwrap();
    let set = sym(&z2, vec![("a", t(vec![1, 0])), ("c", t(vec![1, 1]))]);
    let report2 = quotient_compare(&phi2, &set, 10, &opts()).unwrap();
    assert!(report2.holds, "FAIL: Z2 -> Z quotient inequality at {:?}", report2.first_violation);

    pass(6, "Gamma >= gamma on all built-ins to n=20; quotient inequalities to n=10");
}

/// Dominating-generator construction at desk scale: bounded and stable
/// non-dominant letter use, counting bound, and a polynomial verdict.
#[test]
fn criterion_7_main_theorem_desk_scale() {
    let cases: Vec<(&str, VirtuallyAbelianGroup, GroupElement)> = vec![
        ("G1", builtin::g1(), t(vec![1, 0])),
        ("Dinf", builtin::dinf(), t(vec![1])),
    ];
    for (name, group, x) in &cases {
        for n_power in 4u32..=8 {
            let set = main_theorem_genset(group, x, n_power, &[x.clone()]).unwrap();
            let dominant = set.dominant_indices();
            let tracked: BTreeSet<usize> = set.non_dominant_indices().into_iter().collect();
            let s_letters: BTreeSet<usize> = (0..set.len())
                .filter(|&i| set.labels()[i].starts_with('s'))
                .collect();
            let mut options = opts();
            options.tracked = Some(tracked.clone());
            options.pure_sub = Some(s_letters.clone());
            let census = bfs_census(group, &set, 28, &options).unwrap();

            // pure-subalphabet geodesics stop at a finite, radius-stable length
            let pure20 = census.pure_subalphabet_max_geodesic_length(&s_letters, 20).unwrap();
            let pure28 = census.pure_subalphabet_max_geodesic_length(&s_letters, 28).unwrap();
            assert_eq!(pure20, pure28, "FAIL: pure max unstable for {name} N={n_power}");
            assert!(pure28 < 20, "FAIL: pure max {pure28} not clearly finite for {name} N={n_power}");

            // non-dominant letter use is constant on the tail
            let stats = census.letter_stats(&tracked).unwrap();
            let tail = &stats[stats.len() - STABILITY_WINDOW..];
            assert!(
                tail.iter().all(|&v| v == tail[0]),
                "FAIL: letter stats tail {tail:?} not constant for {name} N={n_power}"
            );
            let k = tail[0] as usize;

            let bound = lemma52_bound_check(&census, &dominant, STABILITY_WINDOW).unwrap();
            assert!(
                bound.pass,
                "FAIL: counting bound violated for {name} N={n_power} at {:?}",
                bound.first_failure
            );

            // the growth sequences here are quasi-polynomial with period
            // ~N_POWER, so the verdict needs a longer census and higher
            // recurrence order than the defaults
            let long = bfs_census(group, &set, 60, &opts()).unwrap();
            let seq = GrowthSequence::cumulative_from_biguint(&long.big_gamma());
            let params = ClassifyParams {
                max_order: 24,
                degree_cap: 16,
                ..ClassifyParams::default()
            };
            let result = classify(&seq, &params).unwrap();
            match result.verdict {
                Verdict::Polynomial { degree } => {
                    assert!(
                        degree <= k + 1,
                        "FAIL: degree {degree} > k+1 = {} for {name} N={n_power}",
                        k + 1
                    );
                }
                other => panic!("FAIL: expected polynomial for {name} N={n_power}, got {other:?}"),
            }
        }
    }
    pass(7, "dominating-generator sets: stable letter stats, counting bound, polynomial verdict");
}

/// Virtually cyclic groups at desk scale: exact automata, low-order linear
/// recurrences with exact holdout prediction, and verdict agreement.
#[test]
fn criterion_8_virtually_cyclic_desk_scale() {
    let z = builtin::z();
    let zc2 = builtin::z_cross_c2();
    let dinf = builtin::dinf();
    let cases: Vec<(&str, &VirtuallyAbelianGroup, GenSet<VirtuallyAbelianGroup>)> = vec![
        ("Z/t", &z, sym(&z, vec![("t", t(vec![1]))])),
        ("ZxC2/ta", &zc2, sym(&zc2, vec![("t", t(vec![1])), ("a", flip(vec![0]))])),
        ("ZxC2/tc", &zc2, sym(&zc2, vec![("t", t(vec![1])), ("c", flip(vec![1]))])),
        ("Dinf/ts", &dinf, sym(&dinf, vec![("t", t(vec![1])), ("s", flip(vec![0]))])),
    ];
    for (name, group, set) in &cases {
        let train = bfs_census(*group, set, 12, &opts()).unwrap();
        let dfa = infer_with_escalation(*group, &train, 4).unwrap();
        let check = bfs_census(*group, set, 30, &opts()).unwrap();
        let report = validate(&dfa, &check);
        assert!(report.pass, "FAIL: automaton for {name} diverges at {:?}", report.first_divergence);

        let engine_seq = GrowthSequence::cumulative_from_biguint(&check.big_gamma());
        let rec = linear_recurrence(&engine_seq.values, 8, 10).unwrap();
        assert!(rec.is_some(), "FAIL: no order <= 8 recurrence for {name}");

        let auto_counts = dfa.count_per_length(40);
        let mut cumulative = Vec::new();
        let mut acc = BigUint::from(0u32);
        for c in &auto_counts {
            acc += c;
            cumulative.push(acc.clone());
        }
        let auto_seq = GrowthSequence::cumulative_from_biguint(&cumulative);
        let params = ClassifyParams::default();
        let engine_verdict = classify(&engine_seq, &params).unwrap().verdict;
        let auto_verdict = classify(&auto_seq, &params).unwrap().verdict;
        let agree = match (&engine_verdict, &auto_verdict) {
            (Verdict::Polynomial { degree: a }, Verdict::Polynomial { degree: b }) => a == b,
            (Verdict::Exponential { .. }, Verdict::Exponential { .. }) => true,
            (a, b) => a == b,
        };
        assert!(agree, "FAIL: verdicts disagree for {name}: {engine_verdict:?} vs {auto_verdict:?}");
    }
    pass(8, "virtually cyclic: automata validate to n=30, recurrences predict holdout, verdicts agree");
}

/// The integer Heisenberg group with two generators is exponential, with a
/// sound rate lower bound well above 1 on the tail window.
#[test]
fn criterion_9_heisenberg_exponential() {
    let h = builtin::heisenberg();
    let set = GenSet::symmetric_closure(
        &h,
        vec![("x".to_string(), [1, 0, 0]), ("y".to_string(), [0, 1, 0])],
    )
    .unwrap();
    let start = std::time::Instant::now();
    let census = bfs_census(&h, &set, 14, &opts()).unwrap();
    let seq = GrowthSequence::cumulative_from_biguint(&census.big_gamma());
    // window of 7 terms covers n in [8, 14]
    let params = ClassifyParams { window: 7, ..ClassifyParams::default() };
    let result = classify(&seq, &params).unwrap();
    match result.verdict {
        Verdict::Exponential { lower_bound, .. } => {
            assert!(lower_bound >= 1.3, "FAIL: lower bound {lower_bound} < 1.3");
        }
        other => panic!("FAIL: expected exponential verdict, got {other:?}"),
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "FAIL: took {elapsed:?}, budget 60 s");
    pass(9, "Heisenberg: exponential with sound rate lower bound >= 1.3 on n in [8,14]");
}
