use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fracpia::checks;
use fracpia::exact_refs::{identify, Example};
use fracpia::oracle::{abm_solve, OracleError};
use fracpia::pia::{solve, PiaError};
use fracpia::problem::{load_problem, ProblemError};
use fracpia::report::{
    build_report, figure_file_name, figure_orders, figure_series, oracle_report, benchmark_tables, parse_grid,
    render, EmitOptions, Format, GridReport, Precision, Reference, ReportError, ORACLE_REFERENCE_STEPS,
};
use fracpia::Exponent;

#[derive(Parser)]
#[command(name = "fracpia", version, about = "Perturbation-iteration solver for Caputo fractional ODE systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate a problem file and tabulate the iterates on a grid
    Solve {
        file: PathBuf,
        /// Overrides the iteration count from the file
        #[arg(long)]
        iterations: Option<usize>,
        /// start:stop:count
        #[arg(long, default_value = "0:1:11")]
        grid: String,
        #[arg(long, value_enum, default_value_t = RefKind::None)]
        reference: RefKind,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        #[arg(long)]
        full_precision: bool,
    },
    /// Reproduce the four benchmark tables
    Tables {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        example: Option<u8>,
        /// Directory for table1.csv … table4.csv (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit plot series of the final iterate against a reference
    Figures {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        example: Option<u8>,
        /// Two orders, e.g. 7/10,9/10
        #[arg(long)]
        alphas: Option<String>,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Defaults to the iteration count of the benchmark tables
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate a problem file with the Adams–Bashforth–Moulton scheme
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        #[arg(long)]
        full_precision: bool,
    },
    /// Run the built-in identity, gamma and closed-form checks
    Check,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RefKind {
    Exact,
    Oracle,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Tsv,
}

enum Failure {
    Input(String),
    Numeric(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Numeric(m) | Failure::Io(m) => m,
        }
    }
}

impl From<ProblemError> for Failure {
    fn from(e: ProblemError) -> Self {
        match e {
            ProblemError::Io { .. } => Failure::Io(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<PiaError> for Failure {
    fn from(e: PiaError) -> Self {
        match e {
            PiaError::Algebra { .. } => Failure::Numeric(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Divergence { .. } | OracleError::NotConverged { .. } => Failure::Numeric(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Pia(e) => e.into(),
            ReportError::Oracle(e) => e.into(),
            ReportError::Algebra(e) => Failure::Numeric(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve {
            file,
            iterations,
            grid,
            reference,
            out,
            format,
            full_precision,
        } => run_solve(&file, iterations, &grid, reference, out.as_deref(), options(format, full_precision)),
        Command::Tables { example, out } => run_tables(example, out.as_deref()),
        Command::Figures {
            example,
            alphas,
            points,
            iterations,
            out,
        } => run_figures(example, alphas.as_deref(), points, iterations, out.as_deref()),
        Command::Oracle {
            file,
            t_end,
            steps,
            out,
            format,
            full_precision,
        } => run_oracle(&file, t_end, steps, out.as_deref(), options(format, full_precision)),
        Command::Check => run_check(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("fracpia: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn options(format: FormatArg, full_precision: bool) -> EmitOptions {
    EmitOptions {
        format: match format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Tsv => Format::Tsv,
        },
        precision: if full_precision {
            Precision::Full
        } else {
            Precision::default()
        },
    }
}

fn write_out(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))
}

/// Writes named documents into `dir`, or to stdout under `# name` headings.
fn write_many(docs: &[(String, String)], dir: Option<&Path>) -> Result<(), Failure> {
    match dir {
        Some(dir) => {
            create_dir(dir)?;
            for (name, text) in docs {
                write_out(text, Some(&dir.join(name)))?;
            }
        }
        None => {
            for (i, (name, text)) in docs.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                println!("# {name}");
                print!("{text}");
            }
        }
    }
    Ok(())
}

fn run_solve(
    file: &Path,
    iterations: Option<usize>,
    grid: &str,
    reference: RefKind,
    out: Option<&Path>,
    opts: EmitOptions,
) -> Result<(), Failure> {
    let (sys, mut cfg) = load_problem(file)?;
    if let Some(n) = iterations {
        cfg.iterations = n;
    }
    let grid = parse_grid(grid).map_err(|e| Failure::Input(e.to_string()))?;
    let sol = solve(&sys, &cfg)?;
    let columns: Vec<usize> = (1..=sol.iterations()).collect();
    let report: GridReport = match reference {
        RefKind::None => build_report(&sol, &grid, &columns, &Reference::None),
        RefKind::Exact => {
            let exact = identify(&sys)
                .and_then(|case| case.exact)
                .ok_or_else(|| Failure::Input("no exact solution is known for this system".into()))?;
            let f = move |t: f64| exact(t).to_vec();
            build_report(&sol, &grid, &columns, &Reference::Exact(&f))
        }
        RefKind::Oracle => {
            let t_end = grid.iter().copied().fold(0.0, f64::max);
            let t_end = if t_end > 0.0 { t_end } else { 1.0 };
            let oracle = abm_solve(&sys, t_end, ORACLE_REFERENCE_STEPS)?;
            build_report(&sol, &grid, &columns, &Reference::Oracle(&oracle))
        }
    }
    .map_err(|e| Failure::Numeric(e.to_string()))?;
    write_out(&render(&report, opts), out)
}

fn examples(selected: Option<u8>) -> Vec<Example> {
    match selected.and_then(Example::from_number) {
        Some(e) => vec![e],
        None => vec![Example::One, Example::Two],
    }
}

fn run_tables(example: Option<u8>, out: Option<&Path>) -> Result<(), Failure> {
    let mut docs = Vec::new();
    for ex in examples(example) {
        for table in benchmark_tables(ex)? {
            docs.push((table.file_name(), table.render()));
        }
    }
    write_many(&docs, out)
}

fn parse_alphas(text: &str) -> Result<[Exponent; 2], Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [a, b] = parts[..] else {
        return Err(Failure::Input(format!("--alphas expects two orders, got `{text}`")));
    };
    let parse = |s: &str| {
        let e: Exponent = s.parse().map_err(|e| Failure::Input(format!("order `{s}`: {e}")))?;
        if e.is_zero() || e > Exponent::ONE {
            return Err(Failure::Input(format!("order {e} is outside (0, 1]")));
        }
        Ok(e)
    };
    Ok([parse(a)?, parse(b)?])
}

fn run_figures(
    example: Option<u8>,
    alphas: Option<&str>,
    points: usize,
    iterations: Option<usize>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let chosen = alphas.map(parse_alphas).transpose()?;
    let mut docs = Vec::new();
    for ex in examples(example) {
        let sets = match chosen {
            Some(orders) => vec![orders],
            None => figure_orders(ex).to_vec(),
        };
        for orders in sets {
            let report = figure_series(ex, orders, points, iterations)?;
            docs.push((figure_file_name(ex, orders), render(&report, EmitOptions::default())));
        }
    }
    write_many(&docs, out)
}

fn run_oracle(file: &Path, t_end: f64, steps: usize, out: Option<&Path>, opts: EmitOptions) -> Result<(), Failure> {
    let (sys, _) = load_problem(file)?;
    let sol = abm_solve(&sys, t_end, steps)?;
    write_out(&render(&oracle_report(&sol), opts), out)
}

fn run_check() -> Result<(), Failure> {
    let outcomes = checks::run_all();
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed == 0 {
        println!("all {} checks passed", outcomes.len());
        Ok(())
    } else {
        Err(Failure::Numeric(format!("{failed} of {} checks failed", outcomes.len())))
    }
}
