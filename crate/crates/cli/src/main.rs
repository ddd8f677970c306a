//! Command-line front end for the planners, the validator and the fixtures.
//!
//! Every command that plans or validates prints one summary line on stdout:
//! `status=<ok|infeasible|invalid> length=<total> aux=<auxiliary> phases=<k>`.
//! Exit codes: 0 on success, 2 when the instance is infeasible, violates the
//! separation requirements or the plan fails validation, 1 on malformed input.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mrmp::eps_planner::{check_constraints, choose_epsilon, plan_eps, EpsilonGoal, PlannerConfig};
use mrmp::exodus::plan_exodus;
use mrmp::fixtures::{gen_fixture, FixtureSpec, RandomSpec};
use mrmp::render::render_svg;
use mrmp::validator::{measure_separation, plan_total_length, validate_plan, MotionPlan};
use mrmp::{Error, Instance};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mrmp",
    version,
    about = "Motion planning for unit-disk robots in polygonal workspaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan an instance and write the plan as JSON.
    Plan(PlanArgs),
    /// Validate a plan against its instance.
    Validate(ValidateArgs),
    /// Report measured separations and the requirements for an overlap value.
    Check(CheckArgs),
    /// Write a named or random fixture instance.
    Gen(GenArgs),
    /// Draw an instance, and optionally a plan, as SVG.
    Render(RenderArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Eps,
    Exodus,
}

#[derive(Clone, Copy, ValueEnum)]
enum Auto {
    MinOmega,
    MinRho,
    Monotone,
}

impl From<Auto> for EpsilonGoal {
    fn from(a: Auto) -> Self {
        match a {
            Auto::MinOmega => EpsilonGoal::MinOmega,
            Auto::MinRho => EpsilonGoal::MinRho,
            Auto::Monotone => EpsilonGoal::Monotone,
        }
    }
}

#[derive(Args)]
#[group(multiple = false)]
struct EpsilonArgs {
    /// Overlap value in [0, 1).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Pick the overlap value for a goal.
    #[arg(long, value_enum)]
    auto: Option<Auto>,
}

impl EpsilonArgs {
    fn value(&self) -> Option<f64> {
        self.epsilon
            .or_else(|| self.auto.map(|a| choose_epsilon(a.into()).epsilon))
    }
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    #[command(flatten)]
    eps: EpsilonArgs,
    /// Instance JSON.
    #[arg(long = "in")]
    input: PathBuf,
    /// Plan JSON to write.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Accepted for symmetry with `gen`; planning is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    plan: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Without a value, all three canonical overlap values are checked and
    /// the instance passes if any of them is met.
    #[command(flatten)]
    eps: EpsilonArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureName {
    Hourglass,
    Strip,
    MonotoneLb,
    WeaklyMonotoneLb,
    Random,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    fixture: FixtureName,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Gap parameter of the hourglass and strip constructions.
    #[arg(long, default_value_t = 0.05)]
    eps_fig: f64,
    /// Perturbation of the lower-bound constructions.
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 4)]
    m: usize,
    #[arg(long, default_value_t = 4.0)]
    rho: f64,
    #[arg(long, default_value_t = 3.0)]
    omega: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    teeth: usize,
    #[arg(long)]
    deep_teeth: bool,
    #[arg(long)]
    holes: bool,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    plan: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    /// Infeasible or constraint-violating instance, or an invalid plan.
    Rejected,
    Malformed(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Malformed(e)
    }
}

type Outcome = Result<(), Failure>;

fn summary(status: &str, length: f64, aux: f64, phases: usize) {
    println!("status={status} length={length:.9} aux={aux:.9} phases={phases}");
}

/// Errors caused by the instance itself rather than by its encoding.
fn is_rejection(e: &Error) -> bool {
    !matches!(
        e,
        Error::InvalidWorkspace(_) | Error::MalformedPlan(_) | Error::GenerationFailed(_)
    )
}

fn load_instance(path: &Path) -> anyhow::Result<Instance> {
    Instance::load(path).with_context(|| format!("reading instance {}", path.display()))
}

fn write_or_print(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_plan(a: &PlanArgs) -> Outcome {
    let inst = load_instance(&a.input)?;
    let planned = match a.algo {
        Algo::Eps => {
            let eps = a
                .eps
                .value()
                .ok_or_else(|| anyhow!("--algo eps needs --epsilon or --auto"))?;
            println!("epsilon={eps:.9}");
            plan_eps(&inst, &PlannerConfig::new(eps)).map(|p| p.plan)
        }
        Algo::Exodus => plan_exodus(&inst, inst.labeled).map(|p| p.plan),
    };
    let plan = match planned {
        Ok(p) => p,
        Err(e) if is_rejection(&e) => {
            eprintln!("{e}");
            summary("infeasible", 0.0, 0.0, 0);
            return Err(Failure::Rejected);
        }
        Err(e) => return Err(Failure::Malformed(e.into())),
    };
    if let Some(out) = &a.out {
        std::fs::write(out, plan.to_json())
            .with_context(|| format!("writing {}", out.display()))?;
    }
    report(&inst, &plan, a.tol)
}

fn report(inst: &Instance, plan: &MotionPlan, tol: f64) -> Outcome {
    let r = validate_plan(inst, plan, tol).map_err(|e| Failure::Malformed(e.into()))?;
    let len = plan_total_length(plan);
    eprintln!(
        "min robot distance {:.9}, min obstacle clearance {:.9}",
        r.min_robot_robot, r.min_robot_obstacle
    );
    for m in &r.messages {
        eprintln!("{m}");
    }
    summary(
        if r.ok { "ok" } else { "invalid" },
        len.total,
        len.auxiliary,
        plan.phases.len(),
    );
    if r.ok {
        Ok(())
    } else {
        Err(Failure::Rejected)
    }
}

fn run_validate(a: &ValidateArgs) -> Outcome {
    let inst = load_instance(&a.input)?;
    let text = std::fs::read_to_string(&a.plan)
        .with_context(|| format!("reading plan {}", a.plan.display()))?;
    let plan = MotionPlan::from_json(&text)
        .with_context(|| format!("parsing plan {}", a.plan.display()))?;
    report(&inst, &plan, a.tol)
}

fn run_check(a: &CheckArgs) -> Outcome {
    let inst = load_instance(&a.input)?;
    let sep = measure_separation(&inst);
    println!("rho={:.9} omega={:.9}", sep.rho(), sep.omega);
    let values: Vec<f64> = match a.eps.value() {
        Some(e) => vec![e],
        None => [
            EpsilonGoal::Monotone,
            EpsilonGoal::MinOmega,
            EpsilonGoal::MinRho,
        ]
        .map(|g| choose_epsilon(g).epsilon)
        .to_vec(),
    };
    let mut any = false;
    for eps in values {
        let r = check_constraints(&inst, eps);
        let failed: Vec<String> = r.failures().iter().map(|c| format!("C{}", c.id)).collect();
        println!(
            "epsilon={eps:.9} satisfied={} failed=[{}]",
            r.satisfied(),
            failed.join(",")
        );
        any |= r.satisfied();
    }
    if any {
        Ok(())
    } else {
        Err(Failure::Rejected)
    }
}

fn run_gen(a: &GenArgs) -> Outcome {
    let spec = match a.fixture {
        FixtureName::Hourglass => FixtureSpec::Hourglass { eps_fig: a.eps_fig },
        FixtureName::Strip => FixtureSpec::Strip { eps_fig: a.eps_fig },
        FixtureName::MonotoneLb => FixtureSpec::MonotoneLb { delta: a.delta },
        FixtureName::WeaklyMonotoneLb => FixtureSpec::WeaklyMonotoneLb { delta: a.delta },
        FixtureName::Random => FixtureSpec::Random(RandomSpec {
            m: a.m,
            rho: a.rho,
            omega: a.omega,
            seed: a.seed,
            holes: a.holes,
            teeth: a.teeth,
            deep_teeth: a.deep_teeth,
        }),
    };
    let inst = gen_fixture(&spec).map_err(anyhow::Error::from)?;
    write_or_print(a.out.as_deref(), &inst.to_json())?;
    Ok(())
}

fn run_render(a: &RenderArgs) -> Outcome {
    let inst = load_instance(&a.input)?;
    let plan = match &a.plan {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading plan {}", p.display()))?;
            Some(
                MotionPlan::from_json(&text)
                    .with_context(|| format!("parsing plan {}", p.display()))?,
            )
        }
        None => None,
    };
    write_or_print(a.out.as_deref(), &render_svg(&inst, plan.as_ref()))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // usage errors are malformed input, not rejections
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match &cli.command {
        Command::Plan(a) => run_plan(a),
        Command::Validate(a) => run_validate(a),
        Command::Check(a) => run_check(a),
        Command::Gen(a) => run_gen(a),
        Command::Render(a) => run_render(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rejected) => ExitCode::from(2),
        Err(Failure::Malformed(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
