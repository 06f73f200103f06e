use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use groupfair::budgets::{self, BudgetTable, KGroupBudget};
use groupfair::fairness::{democratic_report_per_group, parse_criteria, Criterion};
use groupfair::format::{self, parse_allocation, parse_instance, parse_rational};
use groupfair::oracles::{self, GeneratorSpec};
use groupfair::protocols::{self, render, RunResult};
use groupfair::{Error, Instance};

#[derive(Parser)]
#[command(
    name = "groupfair",
    version,
    about = "Democratic fair allocation of indivisible goods among groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an allocation protocol on an instance file.
    Run(RunArgs),
    /// Judge an allocation file against a criterion.
    Check(CheckArgs),
    /// Exhaustively search all allocations for the best democratic fraction.
    Brute(BruteArgs),
    /// Print budget, weight or bound tables.
    Table(TableArgs),
    /// Write a generated adversarial instance.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Protocol {
    Rwav2,
    Cwav2,
    Rwav2Enhanced,
    Rwavk,
    Line2,
    Linek,
    Identical,
    BestK,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    protocol: Protocol,
    #[arg(long)]
    instance: PathBuf,
    /// One criterion for every group, or a comma-separated list with one per group.
    #[arg(long)]
    criterion: Option<String>,
    /// Group that picks first, 1-based.
    #[arg(long, default_value_t = 1)]
    first_group: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the human-readable trace to standard output.
    #[arg(long)]
    trace: bool,
    /// Replace additive agents by binary agents over their C best goods.
    #[arg(long, value_name = "C")]
    binarize: Option<usize>,
    /// Parameter c of the enhanced and k-group voting protocols.
    #[arg(long)]
    c: Option<usize>,
    /// Comma-separated good labels overriding the line order.
    #[arg(long)]
    order: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    allocation: PathBuf,
    #[arg(long)]
    criterion: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BruteArgs {
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    instance: Option<PathBuf>,
    /// Generator spec such as `all-subsets:r=2,s=1,k=2,m=3`.
    #[arg(long)]
    spec: Option<String>,
    /// Defaults to the criterion a generated family was built against.
    #[arg(long)]
    criterion: Option<String>,
    /// Only decide whether some allocation reaches this fraction.
    #[arg(long)]
    h: Option<String>,
    #[arg(long, default_value_t = oracles::DEFAULT_CAP)]
    cap: u128,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    #[value(name = "B")]
    Budget,
    #[value(name = "w")]
    Weight,
    #[value(name = "C")]
    Coin,
    #[value(name = "Bk")]
    KBudget,
    #[value(name = "maxh")]
    MaxH,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, value_enum)]
    which: Which,
    #[arg(long, default_value_t = 10)]
    rmax: i64,
    #[arg(long, default_value_t = 6)]
    smax: i64,
    /// Number of groups for `Bk` and `maxh`.
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Print exact fractions instead of three decimals.
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    spec: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Invalid(String),
    Cap(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_cap() {
            Failure::Cap(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> std::result::Result<Instance, Failure> {
    Ok(parse_instance(&read(path)?)?)
}

fn emit(doc: &Value, out: Option<&Path>) -> Outcome {
    let text = serde_json::to_string_pretty(doc).expect("json values serialize") + "\n";
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn criteria_or(arg: Option<&str>, fallback: Criterion) -> std::result::Result<Vec<Criterion>, Failure> {
    match arg {
        Some(list) => Ok(parse_criteria(list)?),
        None => Ok(vec![fallback]),
    }
}

fn required_criteria(arg: Option<&str>, protocol: &str) -> std::result::Result<Vec<Criterion>, Failure> {
    let list = arg.ok_or_else(|| Failure::Invalid(format!("--criterion is required for {protocol}")))?;
    Ok(parse_criteria(list)?)
}

fn run(args: RunArgs) -> Outcome {
    let mut instance = load_instance(&args.instance)?;
    if let Some(c) = args.binarize {
        if c == 0 {
            return Err(Failure::Invalid("--binarize needs C >= 1".into()));
        }
        instance = instance.binarize(c);
    }
    if let Some(order) = &args.order {
        let labels: Vec<&str> = order.split(',').map(str::trim).collect();
        instance = instance.with_order_labels(&labels)?;
    }
    if args.first_group == 0 || args.first_group > instance.k() {
        return Err(Failure::Invalid(format!(
            "--first-group must lie in 1..={}",
            instance.k()
        )));
    }
    let criterion = args.criterion.as_deref();
    let result: RunResult = match args.protocol {
        Protocol::Rwav2 => protocols::rwav2(&instance, &required_criteria(criterion, "rwav2")?, args.first_group - 1)?,
        Protocol::Cwav2 => protocols::cwav2(&instance, &required_criteria(criterion, "cwav2")?, args.seed)?,
        Protocol::Rwav2Enhanced => protocols::rwav2_enhanced(&instance, args.c.unwrap_or(2))?,
        Protocol::Rwavk => protocols::rwavk(&instance, args.c.unwrap_or(instance.k()))?,
        Protocol::Line2 => protocols::line2(&instance)?,
        Protocol::Linek => protocols::linek(&instance)?,
        Protocol::Identical => protocols::identical_local_search(&instance)?,
        Protocol::BestK => protocols::best_k_protocol(&instance)?,
    };
    if args.trace {
        print!("{}", render::render_result(&instance, &result));
    }
    let doc = format::run_to_json(&instance, &result, true);
    match (args.trace, args.out.as_deref()) {
        (true, None) => Ok(()),
        (_, out) => emit(&doc, out),
    }
}

fn check(args: CheckArgs) -> Outcome {
    let instance = load_instance(&args.instance)?;
    let alloc = parse_allocation(&read(&args.allocation)?, &instance)?;
    let criteria = parse_criteria(&args.criterion)?;
    let report = democratic_report_per_group(&instance, &alloc, &criteria)?;
    let mut doc = format::allocation_to_json(&instance, &alloc, Some(&report));
    doc["criteria"] = serde_json::json!(criteria.iter().map(ToString::to_string).collect::<Vec<_>>());
    emit(&doc, args.out.as_deref())
}

fn brute(args: BruteArgs) -> Outcome {
    let (instance, criteria, spec) = match (&args.instance, &args.spec) {
        (Some(path), _) => {
            let instance = load_instance(path)?;
            (
                instance,
                required_criteria(args.criterion.as_deref(), "an instance file")?,
                None,
            )
        }
        (None, Some(text)) => {
            let spec: GeneratorSpec = text.parse()?;
            let instance = oracles::generate(&spec)?;
            let criteria = criteria_or(args.criterion.as_deref(), oracles::natural_criterion(&spec)?)?;
            (instance, criteria, Some(spec))
        }
        (None, None) => return Err(Failure::Invalid("give --instance or --spec".into())),
    };
    let mut doc = match &args.h {
        Some(h) => {
            let h = parse_rational(h)?;
            let res = oracles::exists_h_with_cap(&instance, &criteria, &h, args.cap)?;
            format::exists_to_json(&instance, &criteria, &h, &res)
        }
        None => {
            let res = oracles::max_h_with_cap(&instance, &criteria, args.cap)?;
            format::oracle_to_json(&instance, &criteria, &res)
        }
    };
    if let Some(spec) = spec {
        doc["spec"] = serde_json::json!(spec.to_string());
        doc["claimed_bound"] = serde_json::json!(oracles::claimed_bound(&spec).to_string());
    }
    emit(&doc, args.out.as_deref())
}

fn table(args: TableArgs) -> Outcome {
    if args.rmax < 0 || args.smax < 0 {
        return Err(Failure::Invalid("--rmax and --smax must be non-negative".into()));
    }
    let exact_table = BudgetTable::new(args.rmax.max(budgets::DEFAULT_R_MAX));
    let k_budget = KGroupBudget::new(args.k)?;
    let s_max = match args.which {
        Which::KBudget => args.smax.min(1),
        _ => args.smax,
    };
    let cell = |r: i64, s: i64| -> std::result::Result<String, Failure> {
        let exact = match args.which {
            Which::Budget => exact_table.budget(r, s)?.to_rational(),
            Which::Weight => exact_table.weight(r, s)?.to_rational(),
            Which::Coin => exact_table.coin_budget(r, s)?.to_rational(),
            Which::MaxH => budgets::max_h_bound(r as u32, s as u32, args.k),
            Which::KBudget => return Ok(format!("{:.3}", k_budget.budget(r, s)?)),
        };
        Ok(if args.exact {
            exact.to_string()
        } else {
            budgets::round_rational(&exact, 3)
        })
    };
    let mut rows = vec![std::iter::once("r\\s".to_string())
        .chain((0..=s_max).map(|s| s.to_string()))
        .collect::<Vec<_>>()];
    for r in 0..=args.rmax {
        let mut row = vec![r.to_string()];
        for s in 0..=s_max {
            row.push(cell(r, s)?);
        }
        rows.push(row);
    }
    let width = rows.iter().flatten().map(String::len).max().unwrap_or(1);
    for row in rows {
        let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        println!("{}", line.join(" "));
    }
    Ok(())
}

fn gen(args: GenArgs) -> Outcome {
    let spec: GeneratorSpec = args.spec.parse()?;
    let instance = oracles::generate(&spec)?;
    emit(&format::instance_to_json(&instance), args.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => run(a),
        Command::Check(a) => check(a),
        Command::Brute(a) => brute(a),
        Command::Table(a) => table(a),
        Command::Gen(a) => gen(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
