use std::fs;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use wlab::adversary::{
    bounded_guess_backward, case_two_backward, constant_backward, probe as run_probe, secret_prefix_tree, ProbeOutcome,
    Tree,
};
use wlab::formula::{self, is_exists_free, is_gamma1, matrix, Formula};
use wlab::functionals::TrackedFunctional;
use wlab::problems::{counted_run, path_problem, trivial_problem, CountedSolver, Problem, WordSpace};
use wlab::ramsey::{
    classical_one_use_rt24, find_homogeneous, generalized_one_use, least_solver, max_homogeneous, maximum_solver,
    ramsey_oracle, rt24_two_step_reduction, rt24_via_two_rt22, Coloring, HomSet,
};
use wlab::reductions::{application_count, verify as run_verify, Mode, Reduction, VerifyParams};

use crate::{
    ColoringSource, Finished, OracleArgs, PipelineArgs, ProbeArgs, PsiName, ReductionName, SolveArgs, SolverName,
    UsageError, VerifyArgs,
};

fn read_formula(path: &Path) -> Result<Formula, UsageError> {
    let text = fs::read_to_string(path).map_err(|e| UsageError::flag("--file", format!("{}: {e}", path.display())))?;
    formula::parse(text.trim()).map_err(|e| UsageError::flag("--file", format!("{}: {e}", path.display())))
}

// Command name, echoed parameters and seed, followed by `fields`.
fn report(command: &str, params: Value, seed: Option<u64>, fields: Value) -> Value {
    let mut out = Map::new();
    out.insert("command".into(), json!(command));
    out.insert("params".into(), params);
    out.insert("seed".into(), json!(seed));
    if let Value::Object(rest) = fields {
        out.extend(rest);
    }
    Value::Object(out)
}

fn to_value(v: impl serde::Serialize) -> Value {
    serde_json::to_value(v).expect("reports are plain JSON")
}

pub fn classify(path: &Path) -> Result<Finished, UsageError> {
    let f = read_formula(path)?;
    let (ef, g1) = (is_exists_free(matrix(&f)), is_gamma1(&f));
    Ok(Finished {
        name: "formula-classify",
        report: json!({ "exists_free_matrix": ef, "gamma1": g1 }),
        failed: false,
        summary: format!("gamma1: {g1}, exists-free matrix: {ef}"),
    })
}

pub fn problem_shape(path: &Path) -> Result<Finished, UsageError> {
    let f = read_formula(path)?;
    Ok(match formula::problem_shape(&f) {
        Ok(s) => Finished {
            name: "formula-problem-shape",
            report: json!({
                "instance_var": s.instance_var,
                "instance_sort": s.instance_sort.to_string(),
                "instance_pred": s.instance_pred.to_string(),
                "solution_var": s.solution_var,
                "solution_sort": s.solution_sort.to_string(),
                "solution_pred": s.solution_pred.to_string(),
            }),
            failed: false,
            summary: format!("instance {}, solution {}", s.instance_var, s.solution_var),
        },
        Err(e) => Finished {
            name: "formula-problem-shape",
            report: json!({ "error": { "path": e.path, "expected": e.expected, "found": e.found } }),
            failed: true,
            summary: e.to_string(),
        },
    })
}

fn build_reduction(a: &VerifyArgs) -> Result<Reduction, UsageError> {
    let path_reduction = |backward: fn(Tree, usize) -> TrackedFunctional| -> Result<Reduction, UsageError> {
        let tree = Tree::zeros_spine(a.depth);
        let p: Arc<dyn Problem> =
            Arc::new(path_problem(tree.clone(), a.depth, 2).map_err(|e| UsageError::flag("--D", e))?);
        Reduction::new(Arc::clone(&p), p, TrackedFunctional::identity(), backward(tree, a.depth))
            .map_err(|e| UsageError(e.to_string()))
    };
    match a.reduction {
        ReductionName::IdentityTrivial => {
            Ok(Reduction::identity(Arc::new(trivial_problem(WordSpace::new(3, 3), WordSpace::new(2, 3)))))
        }
        ReductionName::Rt24TwoStep => {
            rt24_two_step_reduction(a.vertices, a.m, a.budget).map_err(|e| UsageError::flag("--N", e))
        }
        ReductionName::PathConstant => path_reduction(|_, d| constant_backward(&vec![1; d], d)),
        ReductionName::PathCaseTwo => path_reduction(case_two_backward),
    }
}

pub fn verify(a: &VerifyArgs) -> Result<Finished, UsageError> {
    if a.budget == 0 {
        return Err(UsageError::flag("--budget", "must be positive"));
    }
    let r = build_reduction(a)?;
    let mode = match a.samples {
        Some(samples) => Mode::Sampled { samples, seed: a.seed },
        None => Mode::Exhaustive,
    };
    let result = run_verify(&r, &VerifyParams { mode, budget: a.budget, jobs: a.jobs })
        .map_err(|e| UsageError::flag("--jobs", e))?;
    let params = json!({
        "reduction": to_value(a.reduction_name()),
        "N": a.vertices,
        "m": a.m,
        "D": a.depth,
        "samples": a.samples,
        "budget": a.budget,
        "jobs": a.jobs,
    });
    let summary = format!(
        "{} -> {}: {} instances, {} forward and {} backward failures",
        result.source,
        result.target,
        result.checked,
        result.forward_failures.len(),
        result.backward_failures.len()
    );
    Ok(Finished {
        name: "reduce-verify",
        failed: !result.passed,
        report: report("reduce verify", params, Some(a.seed), json!({ "report": to_value(&result) })),
        summary,
    })
}

impl VerifyArgs {
    fn reduction_name(&self) -> &'static str {
        match self.reduction {
            ReductionName::IdentityTrivial => "identity-trivial",
            ReductionName::Rt24TwoStep => "rt24-two-step",
            ReductionName::PathConstant => "path-constant",
            ReductionName::PathCaseTwo => "path-case-two",
        }
    }
}

fn load_coloring(src: &ColoringSource, default_k: u32) -> Result<(Coloring, Value), UsageError> {
    match &src.input {
        Some(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| UsageError::flag("--in", format!("{}: {e}", path.display())))?;
            let c: Coloring = serde_json::from_str(&text)
                .map_err(|e| UsageError::flag("--in", format!("{}: {e}", path.display())))?;
            Ok((c, json!({ "in": path.display().to_string() })))
        }
        None => {
            let k = src.k.unwrap_or(default_k);
            let mut rng = ChaCha8Rng::seed_from_u64(src.seed);
            let c = Coloring::random(src.n, src.vertices, k, &mut rng).map_err(|e| UsageError::flag("--N", e))?;
            Ok((c, json!({ "in": null, "n": src.n, "N": src.vertices, "k": k })))
        }
    }
}

fn with(mut params: Value, extra: Value) -> Value {
    if let (Value::Object(p), Value::Object(e)) = (&mut params, extra) {
        p.extend(e);
    }
    params
}

pub fn solve(a: &SolveArgs) -> Result<Finished, UsageError> {
    let (c, params) = load_coloring(&a.source, 2)?;
    let params = with(params, json!({ "m": a.m }));
    let found: Option<HomSet> = match a.m {
        Some(m) => find_homogeneous(&c, m),
        None => Some(max_homogeneous(&c)),
    };
    let summary = match &found {
        Some(h) => format!("homogeneous set of {} vertices in color {}", h.len(), h.color),
        None => format!("no homogeneous set of {} vertices", a.m.unwrap_or_default()),
    };
    Ok(Finished {
        name: "ramsey-solve",
        failed: found.is_none(),
        report: report("ramsey solve", params, Some(a.source.seed), json!({ "solution": found })),
        summary,
    })
}

fn solver(a: &PipelineArgs) -> CountedSolver<Coloring, HomSet> {
    match a.solver {
        SolverName::Max => maximum_solver(),
        SolverName::Least => least_solver(a.m),
    }
}

fn pipeline_params(a: &PipelineArgs, loaded: Value, advice: bool) -> Value {
    let solver = match a.solver {
        SolverName::Max => "max",
        SolverName::Least => "least",
    };
    let extra = if advice {
        json!({ "m": a.m, "s_advice": a.s_advice, "solver": solver })
    } else {
        json!({ "m": a.m, "solver": solver })
    };
    with(loaded, extra)
}

struct PipelineRun<'a> {
    name: &'static str,
    command: &'static str,
    params: Value,
    seed: u64,
    f: &'a Coloring,
    m: usize,
    applications: u64,
}

// Shared tail of the pipeline commands: the result fields or the error,
// the application count and an independent homogeneity check.
fn pipeline_report<T: serde::Serialize, E: std::fmt::Display>(
    run: PipelineRun<'_>,
    value: Result<T, E>,
    output: impl Fn(&T) -> &HomSet,
) -> Finished {
    let PipelineRun { name, command, params, seed, f, m, applications } = run;
    let (fields, failed, summary) = match value {
        Ok(v) => {
            let out = output(&v);
            let verified = out.len() >= m && f.is_homogeneous(&out.vertices, out.color);
            let summary = format!(
                "{} vertices in color {} after {applications} solver application(s), verified: {verified}",
                out.len(),
                out.color
            );
            let mut fields = to_value(&v);
            fields["verified"] = json!(verified);
            (fields, !verified, summary)
        }
        Err(e) => (json!({ "error": e.to_string() }), true, format!("failed: {e}")),
    };
    let fields = with(fields, json!({ "applications": applications }));
    Finished { name, report: report(command, params, Some(seed), fields), failed, summary }
}

pub fn two_step(a: &PipelineArgs) -> Result<Finished, UsageError> {
    let (f, loaded) = load_coloring(&a.source, 4)?;
    let s = solver(a);
    let run = counted_run(&s, |s| rt24_via_two_rt22(&f, s, a.m));
    let context = PipelineRun {
        name: "ramsey-two-step",
        command: "ramsey two-step",
        params: pipeline_params(a, loaded, false),
        seed: a.source.seed,
        f: &f,
        m: a.m,
        applications: application_count(&run),
    };
    Ok(pipeline_report(context, run.value, |t| &t.output))
}

pub fn one_use(a: &PipelineArgs) -> Result<Finished, UsageError> {
    let (f, loaded) = load_coloring(&a.source, 4)?;
    let s = solver(a);
    let run = counted_run(&s, |s| classical_one_use_rt24(&f, s, a.s_advice, a.m));
    let context = PipelineRun {
        name: "ramsey-one-use",
        command: "ramsey one-use",
        params: pipeline_params(a, loaded, true),
        seed: a.source.seed,
        f: &f,
        m: a.m,
        applications: application_count(&run),
    };
    Ok(pipeline_report(context, run.value, |o| &o.output))
}

pub fn general(a: &PipelineArgs) -> Result<Finished, UsageError> {
    let (f, loaded) = load_coloring(&a.source, 4)?;
    let s = solver(a);
    let run = counted_run(&s, |s| generalized_one_use(&f, s, a.s_advice, a.m));
    let context = PipelineRun {
        name: "ramsey-general",
        command: "ramsey general",
        params: pipeline_params(a, loaded, true),
        seed: a.source.seed,
        f: &f,
        m: a.m,
        applications: application_count(&run),
    };
    Ok(pipeline_report(context, run.value, |o| &o.output))
}

fn parse_secret(text: &str) -> Result<Vec<u8>, UsageError> {
    text.chars()
        .map(|ch| match ch {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(UsageError::flag("--secret", format!("`{other}` is not a bit"))),
        })
        .collect()
}

pub fn probe(a: &ProbeArgs) -> Result<Finished, UsageError> {
    let secret = match &a.secret {
        Some(text) => parse_secret(text)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            (0..a.bits).map(|_| rng.gen_range(0..2)).collect()
        }
    };
    if secret.len() > a.depth {
        return Err(UsageError::flag("--secret", format!("{} bits exceed the depth {}", secret.len(), a.depth)));
    }
    if a.budget == 0 {
        return Err(UsageError::flag("--budget", "must be positive"));
    }
    let tree = secret_prefix_tree(&secret, a.depth);
    let (psi, psi_name) = match a.psi {
        PsiName::Guess => (bounded_guess_backward(a.k, a.depth), "guess"),
        PsiName::Constant => (constant_backward(&vec![0; a.depth], a.depth), "constant"),
        PsiName::CaseTwo => (case_two_backward(tree.clone(), a.depth), "case-two"),
    };
    let u0: Vec<u64> = secret.iter().map(|&b| u64::from(b)).collect();
    let outcome = run_probe(&psi, &tree, &u0, a.depth, a.budget).map_err(|e| UsageError(e.to_string()))?;
    let mut padded = u0.clone();
    padded.resize(a.depth + 1, 0);
    let (failed, reverified, summary) = match &outcome {
        ProbeOutcome::Witness(w) => {
            let ok = w.reverify(&psi, &tree, &padded, a.depth, a.budget);
            (true, Some(ok), format!("counterexample at depth {}, re-verified: {ok}", w.failure_depth))
        }
        ProbeOutcome::Survived { note, .. } => (false, None, format!("survived: {note}")),
    };
    let bits: String = secret.iter().map(|b| char::from(b'0' + b)).collect();
    let params = json!({
        "secret": a.secret,
        "bits": a.bits,
        "D": a.depth,
        "k": a.k,
        "psi": psi_name,
        "budget": a.budget,
    });
    let fields = json!({ "secret": bits, "probe": to_value(&outcome), "reverified": reverified });
    Ok(Finished {
        name: "adversary-probe",
        report: report("adversary probe", params, Some(a.seed), fields),
        failed,
        summary,
    })
}

pub fn oracle(a: &OracleArgs) -> Result<Finished, UsageError> {
    if a.vertices < 2 {
        return Err(UsageError::flag("--N", "at least two vertices are needed"));
    }
    let r = ramsey_oracle(a.vertices, a.k, a.m, a.jobs).map_err(|e| UsageError::flag("--N", e))?;
    let params = json!({ "N": a.vertices, "k": a.k, "m": a.m, "jobs": a.jobs });
    let summary =
        format!("{} of {} colorings have no homogeneous set of {} vertices", r.without_homogeneous, r.colorings, a.m);
    Ok(Finished {
        name: "enumerate-ramsey-oracle",
        failed: r.without_homogeneous > 0,
        report: report("enumerate ramsey-oracle", params, None, to_value(&r)),
        summary,
    })
}
