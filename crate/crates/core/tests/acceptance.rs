//! Acceptance suite: every numbered criterion below runs at its stated
//! tolerance and prints one `criterion NN ...: PASS/FAIL` line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use permfree::asympt::{
    counterexample_sequence, cycle_probability_trend, multiples_closed_form, slope_fit,
};
use permfree::cyclecount::egf_crosscheck;
use permfree::numeric::rational_to_f64;
use permfree::words::{enumerate_words, haar_moment};
use permfree::{
    ColoredGraph, CountTable, CycleSet, Engine, Model, Partition, Sampler, Signature, Word,
};

fn report(number: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {number:02} ({name}): {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {number:02} ({name}) failed: {detail}");
}

fn set(text: &str) -> CycleSet {
    CycleSet::parse(text).unwrap()
}

fn word(text: &str) -> Word {
    Word::parse(text).unwrap()
}

fn model(sets: &[&str]) -> Model {
    Model::from_sets(sets.iter().map(|t| set(t)).collect()).unwrap()
}

/// Test-local enumeration of all of S_N with an independent cycle-type
/// classifier, used as the counting oracle.
fn oracle_count(set: &CycleSet, n: usize) -> u64 {
    fn cycles_ok(perm: &[usize], set: &CycleSet) -> bool {
        let mut seen = vec![false; perm.len()];
        for start in 0..perm.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut cur = start;
            loop {
                seen[cur] = true;
                len += 1;
                cur = perm[cur];
                if cur == start {
                    break;
                }
            }
            if !set.contains(len) {
                return false;
            }
        }
        true
    }
    fn generate(prefix: &mut Vec<usize>, used: &mut Vec<bool>, set: &CycleSet, hits: &mut u64) {
        let n = used.len();
        if prefix.len() == n {
            if cycles_ok(prefix, set) {
                *hits += 1;
            }
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                generate(prefix, used, set, hits);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    if n == 0 {
        return 1;
    }
    let mut hits = 0;
    generate(&mut Vec::new(), &mut vec![false; n], set, &mut hits);
    hits
}

const CRITERION_SETS: [&str; 11] = [
    "all",
    "finite:1",
    "finite:2",
    "finite:3",
    "finite:1,2",
    "finite:1,3",
    "finite:2,4",
    "cofinite:1",
    "cofinite:1,2",
    "multiples:2",
    "multiples:3",
];

#[test]
fn criterion_01_counting_oracle() {
    let mut pass = true;
    let mut detail = String::new();
    for text in CRITERION_SETS {
        let s = set(text);
        let table = CountTable::build(&s, 7);
        for n in 0..=7usize {
            let expected = oracle_count(&s, n);
            let got = table.a(n).unwrap().to_u64().unwrap();
            if got != expected {
                pass = false;
                detail = format!("{text} at N = {n}: recurrence {got}, oracle {expected}");
            }
        }
    }
    report(1, "counting oracle, N <= 7", pass, &detail);
}

#[test]
fn criterion_02_egf_identity() {
    let mut pass = true;
    let mut detail = String::new();
    for text in [
        "finite:1",
        "finite:2",
        "finite:3",
        "finite:1,2",
        "finite:1,3",
        "finite:2,4",
        "all",
    ] {
        let table = CountTable::build(&set(text), 20);
        if !egf_crosscheck(&table) {
            pass = false;
            detail = format!("egf mismatch for {text}");
        }
    }
    // unrestricted coefficients are exactly those of 1/(1-z)
    let all = CountTable::build(&CycleSet::All, 20);
    for n in 0..=20usize {
        if all.t(n).unwrap() != BigRational::one() {
            pass = false;
            detail = format!("t_{n} != 1 for the unrestricted set");
        }
    }
    report(2, "EGF identity to N = 20", pass, &detail);
}

#[test]
fn criterion_03_strong_congruence_count_equals_haar_moment() {
    let grids: [(usize, &[&str]); 2] = [
        (1, &["1", "2", "3", "inf"]),
        (2, &["2,3", "2,2", "inf,inf", "2,inf"]),
    ];
    let mut pass = true;
    let mut detail = String::new();
    let mut checked = 0u64;
    for (s, orders) in grids {
        for order_text in orders {
            let signature = Signature::parse(order_text).unwrap();
            for w in enumerate_words(s, 6) {
                if w.is_empty() {
                    continue;
                }
                let gamma = ColoredGraph::word_graph(&w).unwrap();
                let count = gamma.chi1_strong_congruence_count(&signature, 14).unwrap();
                let phi = haar_moment(&w, &signature).unwrap() as usize;
                checked += 1;
                if count != phi {
                    pass = false;
                    detail = format!("word {w}, orders {order_text}: count {count}, phi {phi}");
                }
            }
        }
    }
    report(
        3,
        "unit-chi strong congruence count = limiting moment",
        pass,
        &format!("({checked} words checked) {detail}"),
    );
}

#[test]
fn criterion_04_figure_fidelity() {
    let w = word("g3* g1* g2 g2* g1 g4 g2* g1*");
    let gamma = ColoredGraph::word_graph(&w).unwrap();
    let partition = Partition::parse("{1,2,6|3,5,8|4,7}", gamma.vertices()).unwrap();
    let quotient = gamma.quotient(&partition).unwrap();
    let mut shape: Vec<(usize, usize, bool)> = quotient
        .paths()
        .unwrap()
        .iter()
        .map(|p| (p.color, p.length, p.is_loop))
        .collect();
    shape.sort_unstable();
    let expected = vec![(1, 2, true), (2, 1, false), (3, 1, true), (4, 1, false)];
    let chi = quotient.loop_characteristic().unwrap();
    let pass = shape == expected && chi == 0;
    report(
        4,
        "figure quotient paths and loop-characteristic",
        pass,
        &format!("paths {shape:?}, chi {chi}"),
    );
}

#[test]
fn criterion_05_trace_formula_oracle() {
    let set_texts = ["all", "finite:1,2", "finite:2", "cofinite:1"];
    let mut pass = true;
    let mut detail = String::new();
    let mut checked = 0u64;
    for s in 1..=2usize {
        // all s-tuples of cycle sets
        let mut combos: Vec<Vec<&str>> = vec![Vec::new()];
        for _ in 0..s {
            combos = combos
                .iter()
                .flat_map(|c| {
                    set_texts.iter().map(move |t| {
                        let mut c = c.clone();
                        c.push(t);
                        c
                    })
                })
                .collect();
        }
        let singles: Vec<Word> = enumerate_words(s, 4).filter(|w| !w.is_empty()).collect();
        let pairs: Vec<(Word, Word)> = {
            let mut out = Vec::new();
            for (i, w1) in singles.iter().enumerate() {
                for w2 in &singles[i..] {
                    if w1.len() + w2.len() <= 5 {
                        out.push((w1.clone(), w2.clone()));
                    }
                }
            }
            out
        };
        for combo in combos {
            let engine = Engine::new(model(&combo), 5);
            for n in 2..=5u64 {
                if !engine.is_feasible(n).unwrap() {
                    continue;
                }
                for w in &singles {
                    let exact = engine.exact_expected_trace(std::slice::from_ref(w), n).unwrap();
                    let brute = engine.brute_expected_trace(std::slice::from_ref(w), n).unwrap();
                    checked += 1;
                    if exact != brute {
                        pass = false;
                        detail =
                            format!("single {w}, sets {combo:?}, N = {n}: {exact} vs {brute}");
                    }
                }
                for (w1, w2) in &pairs {
                    let words = [w1.clone(), w2.clone()];
                    let exact = engine.exact_expected_trace(&words, n).unwrap();
                    let brute = engine.brute_expected_trace(&words, n).unwrap();
                    checked += 1;
                    if exact != brute {
                        pass = false;
                        detail = format!(
                            "pair ({w1}; {w2}), sets {combo:?}, N = {n}: {exact} vs {brute}"
                        );
                    }
                }
            }
        }
    }
    report(
        5,
        "congruence sum equals brute-force average",
        pass,
        &format!("({checked} configurations) {detail}"),
    );
}

#[test]
fn criterion_06_limit_law_envelope() {
    let engine = Engine::new(model(&["all", "all"]), 200);
    let verdict = engine.freeness_verdict(3, &[50, 100, 200], 2.0).unwrap();
    let max = verdict
        .max_deviation
        .iter()
        .map(|(n, d)| format!("N={n}: {d:.5}"))
        .collect::<Vec<_>>()
        .join(", ");
    report(
        6,
        "|E tr U_w - phi| <= 2/N for words up to length 3",
        verdict.pass,
        &max,
    );
}

#[test]
fn criterion_07_decay_rates() {
    let grid: Vec<u64> = (1..=10).map(|i| 40 * i).collect();
    let commutator = word("g1 g2 g1* g2*");
    let mut pass = true;
    let mut details = Vec::new();

    for sets in [["finite:2", "all"], ["all", "all"]] {
        let engine = Engine::new(model(&sets), 400);
        let points: Vec<(f64, f64)> = grid
            .iter()
            .skip(grid.len() / 2)
            .map(|&n| {
                let v = engine
                    .exact_expected_trace(&[commutator.clone()], n)
                    .unwrap();
                (n as f64, rational_to_f64(&v.abs()))
            })
            .filter(|&(_, v)| v > 0.0)
            .collect();
        let slope = slope_fit(&points).unwrap();
        details.push(format!("commutator slope {sets:?}: {slope:.3}"));
        if slope > -0.9 {
            pass = false;
        }
    }

    let engine = Engine::new(model(&["all"]), 400);
    let scan = engine.covariance_scan(&word("g1"), &word("g1"), &grid).unwrap();
    let points: Vec<(f64, f64)> = scan
        .iter()
        .skip(scan.len() / 2)
        .map(|(n, v)| (*n as f64, rational_to_f64(&v.abs())))
        .filter(|&(_, v)| v > 0.0)
        .collect();
    let cov_slope = slope_fit(&points).unwrap();
    details.push(format!("self-covariance slope: {cov_slope:.3}"));
    if cov_slope > -1.05 {
        pass = false;
    }

    report(7, "decay-rate slopes", pass, &details.join("; "));
}

#[test]
fn criterion_08_cycle_probability_diagnostics() {
    let mut pass = true;
    let mut details = Vec::new();

    // A = {1,3}: ratio p_N(1) * N^(2/3) in [0.8, 1.2] at N = 2000,
    // and closer to 1 there than at N = 200
    let table = CountTable::build(&set("finite:1,3"), 2000);
    let grid: Vec<u64> = (1..=10).map(|i| 200 * i).collect();
    let rep = cycle_probability_trend(&table, 1, &grid, None).unwrap();
    let first = rep.ratio[0];
    let last = *rep.ratio.last().unwrap();
    details.push(format!("finite:1,3 ratio 200 -> {first:.4}, 2000 -> {last:.4}"));
    if !(0.8..=1.2).contains(&last) || (last - 1.0).abs() >= (first - 1.0).abs() {
        pass = false;
    }

    // unrestricted: ratio is exactly one
    let all = CountTable::build(&CycleSet::All, 100);
    let rep = cycle_probability_trend(&all, 2, &[25, 50, 75, 100], None).unwrap();
    if rep.ratio.iter().any(|&r| r != 1.0) {
        pass = false;
        details.push(format!("unrestricted ratios {:?}", rep.ratio));
    }

    // derangements: |N p_N(2) - 1| < 1e-6 at N = 50
    let derangements = CountTable::build(&set("cofinite:1"), 50);
    let rep = cycle_probability_trend(&derangements, 2, &[10, 20, 30, 40, 50], None).unwrap();
    let err = (rep.ratio.last().unwrap() - 1.0).abs();
    details.push(format!("derangement error at 50: {err:.2e}"));
    if err >= 1e-6 {
        pass = false;
    }

    report(8, "cycle-probability power law", pass, &details.join("; "));
}

#[test]
fn criterion_09_limiting_densities() {
    let derangements = CountTable::build(&set("cofinite:1"), 20);
    let err1 = (rational_to_f64(&derangements.t(20).unwrap()) - (-1.0f64).exp()).abs();

    let no_short = CountTable::build(&set("cofinite:1,2"), 100);
    let err2 = (rational_to_f64(&no_short.t(100).unwrap()) - (-1.5f64).exp()).abs();

    let pass = err1 < 1e-15 && err2 < 1e-6;
    report(
        9,
        "limiting densities",
        pass,
        &format!("|t_20 - e^-1| = {err1:.2e}, |t_100 - e^-1.5| = {err2:.2e}"),
    );
}

#[test]
fn criterion_10_multiples_and_counterexample() {
    let mut pass = true;
    let mut details = Vec::new();
    for d in [1u64, 2, 3, 5] {
        if !multiples_closed_form(d, 50).unwrap() {
            pass = false;
            details.push(format!("closed form failed for D = {d}"));
        }
    }
    let report_seq = counterexample_sequence(2, 10_000).unwrap();
    let stages = report_seq.stages.len();
    let products: Vec<f64> = report_seq.stages.iter().map(|s| s.product).collect();
    details.push(format!("counterexample stages: {stages}, products {products:?}"));
    if stages < 2 || report_seq.stages.iter().any(|s| s.product <= 2.0) || report_seq.hit_cap {
        pass = false;
    }
    report(
        10,
        "multiples closed form and anomalous sequence",
        pass,
        &details.join("; "),
    );
}

#[test]
fn criterion_11_sampler_and_monte_carlo() {
    let mut pass = true;
    let mut details = Vec::new();

    // chi-square uniformity over the 10 involutions of S_4
    let involutions = set("finite:1,2");
    let table = CountTable::build(&involutions, 4);
    let outcomes = permfree::cyclecount::enumerate_restricted(&involutions, 4);
    assert_eq!(outcomes.len(), 10);
    let index: std::collections::HashMap<Vec<u32>, usize> = outcomes
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();
    let sampler = Sampler::new(&table, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let draws = 100_000u64;
    let mut counts = vec![0u64; outcomes.len()];
    for _ in 0..draws {
        counts[index[&sampler.sample(&mut rng).map]] += 1;
    }
    let expected = draws as f64 / outcomes.len() as f64;
    let chi_square: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    // chi-square critical value, 9 degrees of freedom, significance 1e-3
    details.push(format!("chi-square = {chi_square:.2} (critical 27.877)"));
    if chi_square >= 27.877 {
        pass = false;
    }

    // MC within 5 standard errors of exact in >= 99% of 30 seeded runs
    struct Config {
        engine: Engine,
        words: Vec<Word>,
        n: u64,
    }
    let configs = [
        Config {
            engine: Engine::new(model(&["all"]), 50),
            words: vec![word("g1")],
            n: 50,
        },
        Config {
            engine: Engine::new(model(&["finite:1,2"]), 20),
            words: vec![word("g1")],
            n: 20,
        },
        Config {
            engine: Engine::new(model(&["all", "all"]), 30),
            words: vec![word("g1 g2 g1* g2*")],
            n: 30,
        },
    ];
    let seeds: Vec<u64> = (0..30).collect();
    let required = (0.99f64 * seeds.len() as f64).ceil() as usize;
    for (i, config) in configs.iter().enumerate() {
        let exact = rational_to_f64(
            &config
                .engine
                .exact_expected_trace(&config.words, config.n)
                .unwrap(),
        );
        let mut hits = 0usize;
        for &seed in &seeds {
            let mc = config
                .engine
                .mc_expected_trace(&config.words, config.n, 10_000, seed)
                .unwrap();
            if (mc.estimate - exact).abs() <= 5.0 * mc.stderr {
                hits += 1;
            }
        }
        details.push(format!("config {i}: {hits}/{} within 5 sigma", seeds.len()));
        if hits < required {
            pass = false;
        }
    }

    report(11, "sampler uniformity and MC calibration", pass, &details.join("; "));
}
