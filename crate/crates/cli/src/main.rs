//! Command-line front end for the operator-algebra workbench.
//!
//! Scenarios come from bundled fixtures (by name) or from JSON files.  The
//! human-readable run log goes to stderr; machine reports go to stdout with
//! `--json`/`--pretty` or into a file with `--out`.  Exit codes: 0 on
//! success, 2 when `--check` is set and a law check fails, 3 when a scenario
//! is understood but cannot be processed (wrong kind, failed precondition),
//! 4 when the input cannot be parsed at all.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use workbench_core::constraint::{reduce_constraints, ConstraintSystem};
use workbench_core::hilbert::from_crossed_product;
use workbench_core::scenario::{
    build_algebra, build_constrained, build_crossed, build_direct, builtin_fixtures, load_fixture,
    parse_scenario, run_scenario, Scenario, ScenarioKind,
};
use workbench_core::superselect::{run_pipeline, ConstrainedSystem};
use workbench_core::toy::build_toy_model;
use workbench_core::{CoreError, ToleranceContext};

const EXIT_LAW: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_SCHEMA: u8 = 4;

#[derive(Parser)]
#[command(
    name = "workbench",
    version,
    about = "Finite-dimensional operator-algebra workbench",
    long_about = "Runs Dirac-style constraint reductions, gauge-sector \
decompositions and their compatibility checks on concrete matrix algebras."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the bundled example scenarios
    Fixtures(FixturesArgs),
    /// Run every law check that applies to a scenario
    Verify(RunArgs),
    /// Reduce a constrained algebra: kernel, observables, reduced algebra
    TProcedure(RunArgs),
    /// Decompose a gauge system into charge sectors and test minimality
    Superselect(RunArgs),
    /// Constraint reduction of a gauge system with sector-survival analysis
    Pipeline(RunArgs),
    /// Build the lattice gauge toy model and check its laws
    ToyModel(RunArgs),
}

#[derive(Args)]
struct FixturesArgs {
    /// Print one fixture's JSON body instead of the list
    #[arg(long, value_name = "NAME")]
    dump: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    /// Bundled fixture name or path to a scenario JSON file
    input: String,

    /// Residual bound for measured law checks (also the equality tolerance)
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,

    /// Seed for the Dirac-state sampling probe of `t-procedure`
    #[arg(long, default_value_t = 7)]
    seed: u64,

    /// Print the JSON report on stdout
    #[arg(long)]
    json: bool,

    /// Pretty-print the JSON report (implies --json)
    #[arg(long)]
    pretty: bool,

    /// Write the JSON report to a file
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Exit with status 2 when any check fails
    #[arg(long)]
    check: bool,
}

enum CliError {
    Core(CoreError),
    Kind {
        want: ScenarioKind,
        got: ScenarioKind,
    },
    Io(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Kind { want, got } => {
                write!(f, "scenario kind is {got:?}, this command needs {want:?}")
            }
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(CoreError::Schema(_)) | CliError::Io(_) => EXIT_SCHEMA,
            _ => EXIT_PRECONDITION,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version arrive here too; they are not failures.
            let code = if e.use_stderr() { EXIT_SCHEMA } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.cmd {
        Cmd::Fixtures(args) => cmd_fixtures(&args),
        Cmd::Verify(args) => execute(&args, None),
        Cmd::TProcedure(args) => execute(&args, Some(ScenarioKind::TProcedure)),
        Cmd::Superselect(args) => execute(&args, Some(ScenarioKind::HilbertSystem)),
        Cmd::Pipeline(args) => execute(&args, Some(ScenarioKind::Constrained)),
        Cmd::ToyModel(args) => execute(&args, Some(ScenarioKind::ToyGauge)),
    }
}

fn cmd_fixtures(args: &FixturesArgs) -> Result<ExitCode, CliError> {
    if let Some(name) = &args.dump {
        for (n, body) in builtin_fixtures() {
            if n == name {
                print!("{body}");
                return Ok(ExitCode::SUCCESS);
            }
        }
        return Err(CliError::Io(format!("unknown fixture '{name}'")));
    }
    for (name, body) in builtin_fixtures() {
        let sc = parse_scenario(body)?;
        println!("{name:<22} {}", kind_name(sc.kind));
    }
    Ok(ExitCode::SUCCESS)
}

fn kind_name(kind: ScenarioKind) -> &'static str {
    match kind {
        ScenarioKind::TProcedure => "t-procedure",
        ScenarioKind::HilbertSystem => "hilbert-system",
        ScenarioKind::Constrained => "constrained",
        ScenarioKind::ToyGauge => "toy-gauge",
    }
}

fn load_input(input: &str) -> Result<Scenario, CliError> {
    let path = Path::new(input);
    if path.exists() {
        let body = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        return Ok(parse_scenario(&body)?);
    }
    if input.ends_with(".json") || input.contains(std::path::MAIN_SEPARATOR) {
        return Err(CliError::Io(format!("no such file: {input}")));
    }
    Ok(load_fixture(input)?)
}

fn execute(args: &RunArgs, want: Option<ScenarioKind>) -> Result<ExitCode, CliError> {
    let sc = load_input(&args.input)?;
    if let Some(want) = want {
        if sc.kind != want {
            return Err(CliError::Kind { want, got: sc.kind });
        }
    }
    let ctx = ToleranceContext::new(args.tol.min(1e-9), args.tol).map_err(CliError::Core)?;
    describe(&sc, args, want, &ctx)?;

    let report = run_scenario(&sc, args.tol, &ctx)?;
    eprint!("{}", report.human_summary());

    let json = report.to_json(args.pretty);
    if args.json || args.pretty {
        println!("{json}");
    }
    if let Some(path) = &args.out {
        fs::write(path, format!("{json}\n"))
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    if args.check && !report.all_pass() {
        return Ok(ExitCode::from(EXIT_LAW));
    }
    Ok(ExitCode::SUCCESS)
}

/// Structural summary for the kind-specific commands, printed before the
/// check results.  `verify` prints checks only.
fn describe(
    sc: &Scenario,
    args: &RunArgs,
    want: Option<ScenarioKind>,
    ctx: &ToleranceContext,
) -> Result<(), CliError> {
    match want {
        Some(ScenarioKind::TProcedure) => describe_reduction(sc, args, ctx),
        Some(ScenarioKind::HilbertSystem) => describe_sectors(sc, ctx),
        Some(ScenarioKind::Constrained) => describe_pipeline(sc, ctx),
        Some(ScenarioKind::ToyGauge) => describe_toy(sc, ctx),
        None => Ok(()),
    }
}

fn describe_reduction(
    sc: &Scenario,
    args: &RunArgs,
    ctx: &ToleranceContext,
) -> Result<(), CliError> {
    let field = build_algebra(sc.field.as_ref().expect("validated"), ctx)?;
    let system = ConstraintSystem::new(field, sc.constraints.clone().unwrap_or_default(), ctx)?;
    let red = reduce_constraints(&system, ctx)?;
    eprintln!(
        "field dim {} on C^{}, {} constraints",
        red.system.field.dim(),
        red.system.field.ambient_dim(),
        red.system.constraints.len()
    );
    eprintln!(
        "left kernel dim {}, kernel algebra dim {}, support rank {}",
        red.left_kernel.dim(),
        red.kernel_algebra.dim(),
        red.support.rank
    );
    eprintln!(
        "first class: {}; observables dim {}, reduced dim {}",
        red.first_class,
        red.observables.dim(),
        red.reduced.dim()
    );
    if red.first_class {
        let family = red.dirac_states()?;
        let states = family.sample(args.seed, 5)?;
        let worst = family.max_constraint_expectation(&states, &red.system.constraints);
        eprintln!(
            "dirac probe (seed {}): 5 states, max |w(c)| = {worst:.3e}",
            args.seed
        );
    }
    Ok(())
}

fn describe_sectors(sc: &Scenario, ctx: &ToleranceContext) -> Result<(), CliError> {
    let hs = if let Some(cspec) = &sc.crossed {
        let cp = build_crossed(cspec, ctx)?;
        from_crossed_product(&cp, ctx)?
    } else {
        build_direct(sc.direct.as_ref().expect("validated"), ctx)?
    };
    eprintln!(
        "gauge group order {}, field dim {} on C^{}, observables dim {}",
        hs.gauge.group.order(),
        hs.field.dim(),
        hs.field.ambient_dim(),
        hs.fixed.dim()
    );
    for s in &hs.sectors {
        eprintln!(
            "sector {}: dim {}, implementer {}",
            s.character.label(),
            s.subspace.dim(),
            if s.implementer.is_some() {
                "found"
            } else {
                "missing"
            }
        );
    }
    Ok(())
}

fn describe_pipeline(sc: &Scenario, ctx: &ToleranceContext) -> Result<(), CliError> {
    let (_, hs, constraints) = build_constrained(sc, ctx)?;
    let cs = ConstrainedSystem::new(hs, constraints, ctx)?;
    let out = run_pipeline(&cs, ctx)?;
    eprintln!(
        "field dim {} on C^{}, {} constraints, support rank {}",
        out.constrained.system.field.dim(),
        out.constrained.system.field.ambient_dim(),
        out.constrained.constraints.len(),
        out.field_reduction.support.rank
    );
    for s in &out.survivals {
        eprintln!(
            "sector {}: {}",
            s.character.label(),
            if s.direct { "survives" } else { "dies" }
        );
    }
    eprintln!(
        "trivially acting subgroup order {}",
        out.kernel_elements.len()
    );
    if let Some(ind) = &out.induced {
        eprintln!(
            "induced system: group order {}, field dim {} on C^{}",
            ind.system.gauge.group.order(),
            ind.system.field.dim(),
            ind.system.field.ambient_dim()
        );
    }
    Ok(())
}

fn describe_toy(sc: &Scenario, ctx: &ToleranceContext) -> Result<(), CliError> {
    let model = build_toy_model(sc.toy.as_ref().expect("validated"), ctx)?;
    eprintln!(
        "matter algebra dim {} on C^{}",
        model.matter.dim(),
        model.matter.ambient_dim()
    );
    eprintln!(
        "gauge layer dim {} on C^{}",
        model.gauge_product.algebra.dim(),
        model.gauge_product.algebra.ambient_dim()
    );
    eprintln!(
        "field layer dim {} on C^{}",
        model.field_product.algebra.dim(),
        model.field_product.algebra.ambient_dim()
    );
    eprintln!(
        "{} gauge laws, {} charge sectors",
        model.constraints.len(),
        model.system.sectors.len()
    );
    Ok(())
}
