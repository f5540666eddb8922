//! The acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wlab::adversary::{bounded_guess_backward, constant_backward, probe, secret_prefix_tree, ProbeOutcome, Tree};
use wlab::formula::{is_exists_free, is_gamma1, matrix, ramsey_pairs};
use wlab::functionals::{consistency_check, evaluate, random_functional};
use wlab::problems::{counted_run, path_problem, trivial_problem, Encoded, Problem, WordSpace};
use wlab::ramsey::{
    classical_one_use_rt24, encoded_solver, generalized_one_use, maximum_solver, parity_continuation, ramsey_oracle,
    ramsey_problem, rt24_via_two_rt22, Coloring, OneUseError,
};
use wlab::reductions::{application_count, seq_use2, verify, Reduction, VerifyParams};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn every_coloring(vertices: usize, k: u32) -> impl Iterator<Item = Coloring> {
    let space = WordSpace::new(vertices * (vertices - 1) / 2, u64::from(k));
    space.iter().map(move |w| Coloring::new(2, vertices, k, w.into_vec()).unwrap())
}

fn gamma1_classification() -> Outcome {
    let mut all = true;
    for k in [2, 4] {
        for problem_form in [false, true] {
            let f = ramsey_pairs(k, problem_form);
            all &= is_gamma1(&f) && is_exists_free(matrix(&f));
        }
    }
    outcome(all, "RT(2,2) and RT(2,4), prenex and problem form")
}

fn finite_ramsey_oracle() -> Outcome {
    let six = ramsey_oracle(6, 2, 3, 1).unwrap();
    let five = ramsey_oracle(5, 2, 3, 1).unwrap();
    // No triple of the counterexample gets a single color.
    let counterexample_ok = five.first_counterexample.as_ref().is_some_and(|c| {
        (0..5).all(|a| {
            (a + 1..5).all(|b| (b + 1..5).all(|d| !(c.pair(a, b) == c.pair(a, d) && c.pair(a, b) == c.pair(b, d))))
        })
    });
    outcome(
        six.colorings == 1 << 15 && six.without_homogeneous == 0 && five.colorings == 1 << 10 && counterexample_ok,
        format!(
            "6 vertices: {} of {} without a triple; 5 vertices: {} of {} without, counterexample {:?}",
            six.without_homogeneous,
            six.colorings,
            five.without_homogeneous,
            five.colorings,
            five.first_counterexample.map(|c| c.table().to_vec())
        ),
    )
}

fn two_step_pipeline() -> Outcome {
    let mut runs = 0u64;
    let mut bad = 0u64;
    for f in every_coloring(5, 4) {
        let solver = maximum_solver();
        let run = counted_run(&solver, |s| rt24_via_two_rt22(&f, s, 2));
        runs += 1;
        let ok = application_count(&run) == 2
            && run
                .value
                .as_ref()
                .is_ok_and(|t| t.output.len() >= 2 && f.is_homogeneous(&t.output.vertices, t.output.color));
        bad += u64::from(!ok);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut large_bad = 0u64;
    for _ in 0..1000 {
        let f = Coloring::random(2, 40, 4, &mut rng).unwrap();
        let solver = maximum_solver();
        let run = counted_run(&solver, |s| rt24_via_two_rt22(&f, s, 3));
        let ok = application_count(&run) == 2
            && run
                .value
                .as_ref()
                .is_ok_and(|t| t.output.len() >= 3 && f.is_homogeneous(&t.output.vertices, t.output.color));
        large_bad += u64::from(!ok);
    }
    outcome(
        runs == 1 << 20 && bad == 0 && large_bad == 0,
        format!("{runs} exhaustive runs with {bad} failures; 1000 random 40-vertex runs with {large_bad} failures"),
    )
}

fn one_use_discipline() -> Outcome {
    let mut bad = 0u64;
    let mut contradictions = 0u64;
    let mut check = |f: &Coloring| {
        let solver = maximum_solver();
        let run = counted_run(&solver, |s| classical_one_use_rt24(f, s, 2, 2));
        if matches!(run.value, Err(OneUseError::AdviceContradiction { .. })) {
            contradictions += 1;
        }
        let ok = run.is_one_typical_use()
            && run
                .value
                .as_ref()
                .is_ok_and(|o| o.output.len() >= 2 && f.is_homogeneous(&o.output.vertices, o.output.color));
        bad += u64::from(!ok);
    };
    let mut exhaustive = 0u64;
    for f in every_coloring(4, 4) {
        check(&f);
        exhaustive += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..100_000 {
        check(&Coloring::random(2, 7, 4, &mut rng).unwrap());
    }
    outcome(
        exhaustive == 4096 && bad == 0 && contradictions == 0,
        format!(
            "{exhaustive} exhaustive and 100000 random runs; {bad} failures, {contradictions} advice contradictions"
        ),
    )
}

fn cross_implementation() -> Outcome {
    let mut mismatches = 0u64;
    for f in every_coloring(4, 4) {
        let classical = classical_one_use_rt24(&f, &maximum_solver(), 2, 2).map(|o| o.output);
        let general = generalized_one_use(&f, &maximum_solver(), 2, 2).map(|o| o.output);
        mismatches += u64::from(classical.is_err() || classical != general);
    }
    outcome(mismatches == 0, format!("{mismatches} of 4096 colorings disagree"))
}

fn verifier_soundness() -> Outcome {
    let p: Arc<dyn Problem> = Arc::new(trivial_problem(WordSpace::new(3, 3), WordSpace::new(2, 3)));
    let identity = verify(&Reduction::identity(p), &VerifyParams::default()).unwrap();

    let depth = 4;
    let tree = Tree::zeros_spine(depth);
    let path: Arc<dyn Problem> = Arc::new(path_problem(tree, depth, 2).unwrap());
    let broken = Reduction::new(
        Arc::clone(&path),
        Arc::clone(&path),
        wlab::functionals::TrackedFunctional::identity(),
        constant_backward(&[1, 0, 0, 0], depth),
    )
    .unwrap();
    let report = verify(&broken, &VerifyParams::default()).unwrap();
    let reverified = report.backward_failures.first().is_some_and(|fail| {
        let out = evaluate(&broken.backward, &[&fail.instance, &fail.solution], 1000).map(|e| e.output);
        path.is_solution(&fail.instance, &fail.solution)
            && out.as_ref().ok() == fail.output.as_ref()
            && out.is_ok_and(|o| !path.is_solution(&fail.instance, &o))
    });
    outcome(
        identity.passed && identity.checked == 27 && !report.passed && reverified,
        format!(
            "identity checked {} instances; constant backward map has {} backward failures",
            identity.checked,
            report.backward_failures.len()
        ),
    )
}

fn continuity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut consistent = 0;
    for _ in 0..100 {
        let len = 16;
        let f = random_functional(&mut rng, 1, len, 3, 4);
        let u = Encoded((0..len).map(|_| rng.gen_range(0..5)).collect());
        let first = evaluate(&f, &[&u], 1 << 20).unwrap();
        let mut v: Vec<u64> = (0..len).map(|_| rng.gen_range(0..5)).collect();
        for p in first.use_record.positions(0) {
            v[p] = u[p];
        }
        consistent += usize::from(consistency_check(&f, &[&u], &[&Encoded(v)], 1 << 20) == Ok(true));
    }
    outcome(consistent == 100, format!("{consistent} of 100 functionals consistent"))
}

fn adversary_probe() -> Outcome {
    let depth = 32;
    let psi = bounded_guess_backward(4, depth);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut witnesses, mut reverified) = (0u32, 0u32);
    let trials = 10_000;
    for _ in 0..trials {
        let secret: Vec<u8> = (0..8).map(|_| rng.gen_range(0..2)).collect();
        let tree = secret_prefix_tree(&secret, depth);
        let u0: Vec<u64> = secret.iter().map(|&b| u64::from(b)).collect();
        if let Ok(ProbeOutcome::Witness(w)) = probe(&psi, &tree, &u0, depth, 10_000) {
            witnesses += 1;
            let mut u = u0.clone();
            u.resize(depth + 1, 0);
            reverified += u32::from(w.reverify(&psi, &tree, &u, depth, 10_000) && w.use_k.is_some_and(|k| k < 4));
        }
    }
    let rate = f64::from(witnesses) / f64::from(trials);
    outcome(
        rate >= 0.90 && reverified == witnesses,
        format!("{witnesses} witnesses in {trials} trials ({:.2}%), {reverified} re-verified", rate * 100.0),
    )
}

fn application_counting() -> Outcome {
    let base: Arc<dyn Problem> = Arc::new(ramsey_problem(2, 2, 6, 2).unwrap());
    let seq = seq_use2(base, parity_continuation(), WordSpace::new(0, 1), 1_000_000);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut seq_ok, mut one_ok) = (0, 0);
    let runs = 200;
    for _ in 0..runs {
        let f = Coloring::random(2, 6, 4, &mut rng).unwrap();
        let g1 = Coloring::from_fn(2, 6, 2, |s| u64::from(f.pair(s[0], s[1]) > 1)).unwrap();
        let instance = Encoded::pair(&g1.to_encoded(), &f.to_encoded());
        let solver = encoded_solver(2, 2, 2);
        let run = counted_run(&solver, |s| seq.solve(&instance, s));
        seq_ok += usize::from(application_count(&run) == 2 && run.value.is_ok_and(|y| seq.is_solution(&instance, &y)));

        let solver = maximum_solver();
        let run = counted_run(&solver, |s| classical_one_use_rt24(&f, s, 2, 2));
        one_ok += usize::from(application_count(&run) == 1 && run.value.is_ok());
    }
    outcome(
        seq_ok == runs && one_ok == runs,
        format!("{seq_ok} of {runs} sequential runs counted 2, {one_ok} of {runs} one-use runs counted 1"),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 9] = [
        ("Gamma1 classification of RT(2,k)", gamma1_classification, Some(Duration::from_secs(1))),
        ("finite Ramsey oracle", finite_ramsey_oracle, Some(Duration::from_secs(10))),
        ("two-step pipeline", two_step_pipeline, Some(Duration::from_secs(300))),
        ("one-use discipline", one_use_discipline, Some(Duration::from_secs(300))),
        ("cross-implementation agreement", cross_implementation, None),
        ("reduction verifier soundness", verifier_soundness, None),
        ("continuity and use", continuity, None),
        ("adversary probe", adversary_probe, Some(Duration::from_secs(60))),
        ("application counting", application_counting, None),
    ];
    let mut failures = 0;
    for (i, (name, run, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed < l);
        let passed = result.passed && in_time;
        failures += usize::from(!passed);
        let limit = limit.map_or(String::new(), |l| format!(" (limit {l:?})"));
        println!(
            "criterion {}: {} {name}: {} in {elapsed:.2?}{limit}",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
