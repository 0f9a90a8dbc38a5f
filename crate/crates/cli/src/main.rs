use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use prc_core::catalog::{self, TwoSummandParams, PLACEHOLDERS};
use prc_core::chains::{
    check_corollary_lambda, check_theorem, two_summand_condition, Analysis, ConditionReport,
    TwoSummandReport,
};
use prc_core::curvature::{ricci, scalar_curvature, scalar_gradient};
use prc_core::form::DiagonalForm;
use prc_core::io::{read_model, to_canonical_json};
use prc_core::iteration::ricci_iterate;
use prc_core::model::{validate, ModelInput, SpaceModel, ValidationReport, Verdict, CASIMIR_TOLERANCE};
use prc_core::solver::{solve_prescribed_ricci, SolveOptions, SolveReport, SolveStatus};
use prc_core::IndexSet;

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;

/// Prescribed Ricci curvature on compact homogeneous spaces.
///
/// MODEL is a JSON model file or a catalog alias: `g2u2`, `flag3:d1,d2,d3`
/// or `twosum:d1,d2,zeta1,zeta2,t111,t122,t222`.
#[derive(Parser)]
#[command(name = "prc", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Read every number exactly (decimals become the rationals they denote).
    #[arg(long, global = true)]
    rational: bool,
    /// Casimir tolerance for float models; residual tolerance for solve and iterate.
    #[arg(long, global = true, value_name = "FLOAT")]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model and derive missing Casimir or Killing values.
    Validate { model: String },
    /// List the subalgebras of g containing h, as index sets.
    Subalgebras { model: String },
    /// List the simple chains and their η values.
    Chains { model: String },
    /// Print η for every simple chain.
    Eta { model: String },
    /// Evaluate the sufficient condition for a prescribed tensor T.
    Check {
        model: String,
        /// Coefficients z_1,…,z_s of T.
        #[arg(long = "T", value_name = "Z")]
        t: String,
        /// Use the λ₋/λ₊ variant of the condition.
        #[arg(long)]
        corollary: bool,
    },
    /// Ricci tensor and scalar curvature of a diagonal metric.
    Ricci {
        model: String,
        /// Metric coefficients x_1,…,x_s.
        #[arg(long, value_name = "X")]
        x: String,
    },
    /// Solve Ric g = cT by maximizing S on M_T.
    Solve {
        model: String,
        #[arg(long = "T", value_name = "Z")]
        t: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        starts: usize,
    },
    /// Run the Ricci iteration Ric g_{i+1} = g_i.
    Iterate {
        model: String,
        /// Starting metric ḡ_1.
        #[arg(long, value_name = "X")]
        start: String,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a generated model file.
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// Three-summand flag manifold with dimensions d1, d2, d3.
    Flag3 { d1: u32, d2: u32, d3: u32 },
    /// Two-summand space: d1,d2,zeta1,zeta2,t111,t122,t222 (commas or spaces).
    Twosum {
        #[arg(required = true, num_args = 1..=7, allow_hyphen_values = true)]
        params: Vec<String>,
    },
    /// G₂/U(2).
    G2u2,
    /// List catalog entries.
    List,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    match &cli.command {
        Command::Validate { model } => cmd_validate(g, model),
        Command::Subalgebras { model } => cmd_subalgebras(g, model),
        Command::Chains { model } => cmd_chains(g, model, false),
        Command::Eta { model } => cmd_chains(g, model, true),
        Command::Check { model, t, corollary } => cmd_check(g, model, t, *corollary),
        Command::Ricci { model, x } => cmd_ricci(g, model, x),
        Command::Solve {
            model,
            t,
            seed,
            starts,
        } => cmd_solve(g, model, t, *seed, *starts),
        Command::Iterate {
            model,
            start,
            steps,
            seed,
        } => cmd_iterate(g, model, start, *steps, *seed),
        Command::Catalog(c) => cmd_catalog(g, c),
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn load_input(g: &Global, name: &str) -> Result<ModelInput, Failure> {
    if let Some(generated) = catalog::resolve(name, g.rational) {
        return generated.map(|m| m.to_input()).map_err(Failure::input);
    }
    read_model(&PathBuf::from(name), g.rational).map_err(Failure::input)
}

fn load_report(g: &Global, name: &str) -> Result<ValidationReport, Failure> {
    let input = load_input(g, name)?;
    Ok(validate(input, g.tol.unwrap_or(CASIMIR_TOLERANCE)))
}

fn load_analysis(g: &Global, name: &str) -> Result<Analysis, Failure> {
    let model = load_report(g, name)?.into_result().map_err(Failure::input)?;
    Analysis::new(model).map_err(Failure::input)
}

fn parse_form(g: &Global, list: &str, model: &SpaceModel) -> Result<DiagonalForm, Failure> {
    DiagonalForm::parse(list, g.rational)
        .and_then(|f| f.expect_len(model.s()))
        .map_err(Failure::input)
}

fn solve_options(g: &Global, seed: u64) -> SolveOptions {
    let mut opts = SolveOptions {
        seed,
        ..SolveOptions::default()
    };
    if let Some(tol) = g.tol {
        opts.residual_tolerance = tol;
    }
    opts
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Satisfied => "satisfied".into(),
        Verdict::Unknown => "unknown (summands not asserted pairwise inequivalent)".into(),
        Verdict::Violated {
            subalgebra,
            summand,
        } => format!("violated: summand {summand} commutes with subalgebra {subalgebra}"),
    }
}

fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

fn cmd_validate(g: &Global, name: &str) -> Outcome {
    let report = load_report(g, name)?;
    let analysis = report.model.clone().map(Analysis::new).transpose().map_err(Failure::input)?;
    let violations: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
    if g.json {
        let mut out = json!({
            "valid": report.is_valid(),
            "arithmetic": report.arithmetic,
            "derived": report.derived,
            "violations": violations,
        });
        if let Some(r) = &report.max_casimir_residual {
            out["max_casimir_residual"] = json!(r);
        }
        if let Some(a) = &analysis {
            let m = a.model();
            out["name"] = json!(m.name());
            out["s"] = json!(m.s());
            out["dims"] = json!(m.dims());
            out["casimir"] = json!(m.casimir());
            out["killing"] = json!(m.killing());
            out["hypothesis"] = json!(a.hypothesis().verdict());
            out["solvable_for_every_t"] = json!(a.solvable_for_every_t());
        }
        print_json(&out);
    } else if let Some(a) = &analysis {
        let m = a.model();
        println!("valid: {m}, {:?} arithmetic", report.arithmetic);
        println!("casimir: {}", join(m.casimir()));
        println!("killing: {}", join(m.killing()));
        if let Some(d) = report.derived {
            println!("derived: {d:?}");
        }
        println!("hypothesis: {}", verdict_text(&a.hypothesis().verdict()));
        if a.solvable_for_every_t() {
            println!("every positive T admits a solution");
        }
    } else {
        println!("invalid model:");
        for v in &violations {
            println!("  {v}");
        }
    }
    Ok(if report.is_valid() { EXIT_PASS } else { EXIT_INPUT })
}

fn cmd_subalgebras(g: &Global, name: &str) -> Outcome {
    let a = load_analysis(g, name)?;
    let m = a.model();
    if g.json {
        let members: Vec<Value> = a
            .lattice()
            .members()
            .iter()
            .map(|j| json!({"set": j, "dim": m.dim_of(*j)}))
            .collect();
        print_json(&json!({
            "subalgebras": members,
            "hypothesis": a.hypothesis().verdict(),
            "solvable_for_every_t": a.solvable_for_every_t(),
        }));
    } else {
        for j in a.lattice().members() {
            println!("{j}  dim {}", m.dim_of(*j));
        }
        println!("hypothesis: {}", verdict_text(&a.hypothesis().verdict()));
    }
    Ok(EXIT_PASS)
}

fn cmd_chains(g: &Global, name: &str, eta_only: bool) -> Outcome {
    let a = load_analysis(g, name)?;
    let full = a.model().full_set();
    let chains = a.chains().map_err(Failure::input)?;
    if g.json {
        let list: Vec<Value> = chains
            .iter()
            .map(|c| {
                if eta_only {
                    let mut v = json!({"kprime": c.kprime, "eta": c.eta.value});
                    if c.k != full {
                        v["k"] = json!(c.k);
                    }
                    v
                } else {
                    json!({
                        "k": c.k,
                        "kprime": c.kprime,
                        "l": c.l(),
                        "eta": c.eta.value,
                        "eta_numerator": c.eta.numerator,
                        "eta_denominator": c.eta.denominator,
                        "omega": c.eta.omega,
                    })
                }
            })
            .collect();
        print_json(&json!({ "chains": list }));
    } else if chains.is_empty() {
        println!("no simple chains: h is maximal in g");
    } else {
        for c in chains {
            if eta_only {
                println!("eta({}, {}) = {}", c.k, c.kprime, c.eta.value);
            } else {
                println!(
                    "k = {}  k' = {}  l = {}  eta = {}  ({} / {}, omega = {})",
                    c.k,
                    c.kprime,
                    c.l(),
                    c.eta.value,
                    c.eta.numerator,
                    c.eta.denominator,
                    c.eta.omega
                );
            }
        }
    }
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct CheckOutput {
    #[serde(flatten)]
    report: ConditionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    two_summand: Option<TwoSummandReport>,
}

fn print_condition(report: &ConditionReport) {
    for c in &report.chains {
        println!(
            "chain ({}, {}): {} > {}  margin {:.6e}  {}",
            c.k,
            c.kprime,
            c.ratio,
            c.threshold,
            c.margin.to_f64(),
            if c.pass { "pass" } else { "FAIL" }
        );
    }
    if report.chains.is_empty() {
        println!("no simple chains: condition holds vacuously");
    }
    match report.first_failure {
        None => println!("pass"),
        Some(i) => {
            let c = &report.chains[i];
            println!("fail at chain ({}, {})", c.k, c.kprime);
        }
    }
    println!("conclusion: {:?}", report.conclusion);
    if report.caveat {
        println!("caveat: hypothesis requirement 1 unconfirmed");
    }
}

fn cmd_check(g: &Global, name: &str, t: &str, corollary: bool) -> Outcome {
    let a = load_analysis(g, name)?;
    let t = parse_form(g, t, a.model())?;
    let report = if corollary {
        check_corollary_lambda(&a, &t)
    } else {
        check_theorem(&a, &t)
    }
    .map_err(Failure::input)?;
    let two_summand = if a.model().s() == 2 {
        two_summand_condition(&a, &t).ok()
    } else {
        None
    };
    let code = if report.pass { EXIT_PASS } else { EXIT_FAIL };
    if g.json {
        print_json(&CheckOutput {
            report,
            two_summand,
        });
    } else {
        print_condition(&report);
        if let Some(ts) = two_summand {
            if let (Some(ratio), Some(threshold)) = (&ts.ratio, &ts.threshold) {
                println!(
                    "two summands: z{}/z_other = {} against d·eta = {}: {}",
                    ts.subalgebra.unwrap_or(0),
                    ratio,
                    threshold,
                    if ts.pass { "solvable" } else { "not solvable" }
                );
            }
        }
    }
    Ok(code)
}

fn cmd_ricci(g: &Global, name: &str, x: &str) -> Outcome {
    let a = load_analysis(g, name)?;
    let m = a.model();
    let x = parse_form(g, x, m)?.to_f64();
    let r = ricci(m, &x).map_err(Failure::input)?;
    let s = scalar_curvature(m, m.full_set(), &x).map_err(Failure::input)?;
    let grad = scalar_gradient(m, &x).map_err(Failure::input)?;
    if g.json {
        print_json(&json!({"x": x, "ricci": r, "scalar_curvature": s, "gradient": grad}));
    } else {
        println!("ricci: {}", join(&r));
        println!("scalar curvature: {s}");
        println!("gradient: {}", join(&grad));
    }
    Ok(EXIT_PASS)
}

fn print_solve(report: &SolveReport) {
    println!("status: {:?}", report.status);
    println!("x: {}", join(&report.x));
    println!("c: {}", report.c);
    println!("S: {}", report.s_value);
    println!("residual: {:.3e}", report.residual);
    println!(
        "starts: {} ({} agreeing), iterations: {}, {:?}",
        report.starts_used, report.starts_agreeing, report.iterations, report.termination
    );
    if !report.collapsed.is_empty() {
        println!(
            "collapsed directions: {} (metric escapes to infinity along these summands)",
            IndexSet::from_indices(report.collapsed.iter().map(|i| i - 1))
        );
    }
    for alt in &report.alternatives {
        println!("alternative solution: {}", join(alt));
    }
    if let Some(t) = &report.theorem {
        println!(
            "sufficient condition: {}",
            if t.pass { "holds" } else { "fails" }
        );
    }
}

fn cmd_solve(g: &Global, name: &str, t: &str, seed: u64, starts: usize) -> Outcome {
    let a = load_analysis(g, name)?;
    let t = parse_form(g, t, a.model())?;
    let opts = SolveOptions {
        starts,
        ..solve_options(g, seed)
    };
    let report = solve_prescribed_ricci(&a, &t, &opts).map_err(Failure::input)?;
    if g.json {
        print_json(&report);
    } else {
        print_solve(&report);
    }
    Ok(if report.status == SolveStatus::Solved {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}

fn cmd_iterate(g: &Global, name: &str, start: &str, steps: usize, seed: u64) -> Outcome {
    let a = load_analysis(g, name)?;
    let start = parse_form(g, start, a.model())?;
    let trace = ricci_iterate(&a, &start, steps, &solve_options(g, seed)).map_err(Failure::input)?;
    if g.json {
        print!("{}", trace.to_json_lines());
    } else {
        for s in &trace.steps {
            println!(
                "step {:>3}  c = {:.10e}  residual = {:.2e}  change = {:.2e}  {:?}  theorem {:?}",
                s.step, s.c, s.residual, s.change, s.status, s.theorem
            );
        }
        println!(
            "{} of {} steps completed",
            trace.steps.iter().filter(|s| s.status == SolveStatus::Solved).count(),
            trace.requested
        );
    }
    Ok(if trace.completed { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_catalog(g: &Global, c: &CatalogCommand) -> Outcome {
    let model = match c {
        CatalogCommand::Flag3 { d1, d2, d3 } => catalog::flag3(*d1, *d2, *d3),
        CatalogCommand::Twosum { params } => {
            TwoSummandParams::parse(&params.join(","), g.rational).and_then(|p| catalog::two_summand(&p))
        }
        CatalogCommand::G2u2 => Ok(catalog::g2u2()),
        CatalogCommand::List => {
            if g.json {
                let placeholders: Vec<Value> = PLACEHOLDERS
                    .iter()
                    .map(|p| json!({"name": p.name, "note": p.note}))
                    .collect();
                print_json(&json!({
                    "generators": ["g2u2", "flag3:d1,d2,d3", "twosum:d1,d2,zeta1,zeta2,t111,t122,t222"],
                    "placeholders": placeholders,
                }));
            } else {
                println!("g2u2");
                println!("flag3:d1,d2,d3");
                println!("twosum:d1,d2,zeta1,zeta2,t111,t122,t222");
                for p in PLACEHOLDERS {
                    println!("{} (placeholder: {}; supply constants in a model file)", p.name, p.note);
                }
            }
            return Ok(EXIT_PASS);
        }
    }
    .map_err(Failure::input)?;
    print!("{}", to_canonical_json(&model.to_input()));
    Ok(EXIT_PASS)
}
