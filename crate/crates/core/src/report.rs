//! Grid evaluation of iterates, error columns, and CSV/TSV output.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::exact_refs::{Example, ReferenceCase};
use crate::exponent::Exponent;
use crate::fracpoly::AlgebraError;
use crate::oracle::{abm_solve, GridSolution, OracleError};
use crate::pia::{solve, PiaConfig, PiaError, PiaSolution};

/// ABM steps used when the oracle stands in as reference on a report grid.
pub const ORACLE_REFERENCE_STEPS: usize = 2000;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Pia(#[from] PiaError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("bad grid `{spec}`: {reason}")]
pub struct GridError {
    pub spec: String,
    pub reason: &'static str,
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn uniform_grid(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let m = (count - 1) as f64;
            (0..count)
                .map(|i| {
                    let i = i as f64;
                    (start * (m - i) + stop * i) / m
                })
                .collect()
        }
    }
}

/// Parses `start:stop:count`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, GridError> {
    let err = |reason| GridError {
        spec: spec.to_string(),
        reason,
    };
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(err("expected start:stop:count"));
    };
    let start: f64 = a.trim().parse().map_err(|_| err("start is not a number"))?;
    let stop: f64 = b.trim().parse().map_err(|_| err("stop is not a number"))?;
    let count: usize = n.trim().parse().map_err(|_| err("count is not a non-negative integer"))?;
    if !start.is_finite() || !stop.is_finite() {
        return Err(err("bounds must be finite"));
    }
    if start < 0.0 {
        return Err(err("start must be >= 0"));
    }
    if stop < start {
        return Err(err("stop must be >= start"));
    }
    Ok(uniform_grid(start, stop, count))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Iterate(usize),
    Reference,
    AbsError,
    State,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    /// zero-based state index
    pub state: usize,
    pub kind: ColumnKind,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridReport {
    pub t_grid: Vec<f64>,
    pub columns: Vec<Column>,
}

impl GridReport {
    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// Columns of one state, with reference and error columns renamed to
    /// their bare labels (the per-component table layout).
    pub fn component(&self, state: usize) -> GridReport {
        let columns = self
            .columns
            .iter()
            .filter(|c| c.state == state)
            .map(|c| {
                let mut c = c.clone();
                if let Some((_, rest)) = c.name.split_once('_') {
                    if matches!(c.kind, ColumnKind::Reference | ColumnKind::AbsError) {
                        c.name = rest.to_string();
                    }
                }
                c
            })
            .collect();
        GridReport {
            t_grid: self.t_grid.clone(),
            columns,
        }
    }
}

pub enum Reference<'a> {
    None,
    Exact(&'a dyn Fn(f64) -> Vec<f64>),
    Oracle(&'a GridSolution),
}

impl Reference<'_> {
    fn label(&self) -> Option<&'static str> {
        match self {
            Reference::None => None,
            Reference::Exact(_) => Some("exact"),
            Reference::Oracle(_) => Some("oracle"),
        }
    }

    fn values(&self, t: f64, k: usize) -> f64 {
        match self {
            Reference::None => f64::NAN,
            Reference::Exact(f) => f(t)[k],
            Reference::Oracle(sol) => sol.value_at(t, k).unwrap_or(f64::NAN),
        }
    }
}

/// Iterate columns `u{k}_{n}` for each requested `n`, then (with a reference)
/// `u{k}_{exact|oracle}` and `u{k}_abs_error`, the latter measured against
/// the last iterate of the solution.
pub fn build_report(
    sol: &PiaSolution,
    grid: &[f64],
    iterations: &[usize],
    reference: &Reference<'_>,
) -> Result<GridReport, AlgebraError> {
    let k_count = sol.row(0).len();
    let last = sol.iterations();
    let mut columns = Vec::new();
    for k in 0..k_count {
        for &n in iterations {
            let values = grid.iter().map(|&t| sol.eval(n, k, t)).collect::<Result<_, _>>()?;
            columns.push(Column {
                name: format!("u{}_{}", k + 1, n),
                state: k,
                kind: ColumnKind::Iterate(n),
                values,
            });
        }
        if let Some(label) = reference.label() {
            let refs: Vec<f64> = grid.iter().map(|&t| reference.values(t, k)).collect();
            let errs = grid
                .iter()
                .zip(&refs)
                .map(|(&t, r)| Ok((sol.eval(last, k, t)? - r).abs()))
                .collect::<Result<_, AlgebraError>>()?;
            columns.push(Column {
                name: format!("u{}_{}", k + 1, label),
                state: k,
                kind: ColumnKind::Reference,
                values: refs,
            });
            columns.push(Column {
                name: format!("u{}_abs_error", k + 1),
                state: k,
                kind: ColumnKind::AbsError,
                values: errs,
            });
        }
    }
    Ok(GridReport {
        t_grid: grid.to_vec(),
        columns,
    })
}

/// Oracle states as columns `u1 … uK` on the oracle's own grid.
pub fn oracle_report(sol: &GridSolution) -> GridReport {
    let columns = (0..sol.k())
        .map(|k| Column {
            name: format!("u{}", k + 1),
            state: k,
            kind: ColumnKind::State,
            values: sol.values.iter().map(|row| row[k]).collect(),
        })
        .collect();
    GridReport {
        t_grid: sol.t_grid.clone(),
        columns,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Tsv,
}

impl Format {
    fn separator(self) -> char {
        match self {
            Format::Csv => ',',
            Format::Tsv => '\t',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rounding {
    #[default]
    HalfEven,
    /// Cut after six decimals, as the benchmark tables do. Digits are taken
    /// from a nine-decimal rendering so that values sitting on a six-decimal
    /// grid point are not cut down by floating-point noise.
    Truncate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Decimals6(Rounding),
    Full,
}

impl Default for Precision {
    fn default() -> Self {
        Precision::Decimals6(Rounding::HalfEven)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EmitOptions {
    pub format: Format,
    pub precision: Precision,
}

/// Six fractional digits.
pub fn fixed6(v: f64, rounding: Rounding) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = match rounding {
        Rounding::HalfEven => format!("{v:.6}"),
        Rounding::Truncate => {
            let mut s = format!("{v:.9}");
            s.truncate(s.len() - 3);
            s
        }
    };
    if s.bytes().all(|b| matches!(b, b'-' | b'0' | b'.')) {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn format_cell(v: f64, kind: ColumnKind, precision: Precision) -> String {
    match (precision, kind) {
        (Precision::Full, _) => v.to_string(),
        (Precision::Decimals6(_), ColumnKind::AbsError) => format!("{v:.5e}"),
        (Precision::Decimals6(r), _) => fixed6(v, r),
    }
}

/// Header row then one row per grid point.
pub fn render(report: &GridReport, opts: EmitOptions) -> String {
    let sep = opts.format.separator();
    let mut out = String::from("t");
    for c in &report.columns {
        out.push(sep);
        out.push_str(&c.name);
    }
    out.push('\n');
    for (i, t) in report.t_grid.iter().enumerate() {
        let _ = write!(out, "{t:?}");
        for c in &report.columns {
            out.push(sep);
            out.push_str(&format_cell(c.values[i], c.kind, opts.precision));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Error)]
#[error("{}: {source}", path.display())]
pub struct EmitError {
    pub path: PathBuf,
    pub source: io::Error,
}

pub fn emit(report: &GridReport, opts: EmitOptions, path: &Path) -> Result<(), EmitError> {
    fs::write(path, render(report, opts)).map_err(|source| EmitError {
        path: path.to_path_buf(),
        source,
    })
}

/// One of the four benchmark tables: one example, one state component.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkTable {
    pub number: u8,
    pub example: Example,
    pub report: GridReport,
}

impl BenchmarkTable {
    pub fn file_name(&self) -> String {
        format!("table{}.csv", self.number)
    }

    pub fn render(&self) -> String {
        render(
            &self.report,
            EmitOptions {
                format: Format::Csv,
                precision: Precision::Decimals6(Rounding::Truncate),
            },
        )
    }
}

/// `t = 0, 0.1, …, 1`
pub fn table_grid() -> Vec<f64> {
    uniform_grid(0.0, 1.0, 11)
}

/// Tables for one example at unit orders (two tables, one per component).
pub fn benchmark_tables(example: Example) -> Result<Vec<BenchmarkTable>, ReportError> {
    let case = ReferenceCase::new(example, [Exponent::ONE; 2]);
    let n = example.table_iterations();
    let sol = solve(&case.system, &PiaConfig::with_iterations(n))?;
    let exact = case.exact.expect("unit orders have an exact solution");
    let exact = move |t: f64| exact(t).to_vec();
    let iterations: Vec<usize> = (1..=n).collect();
    let full = build_report(&sol, &table_grid(), &iterations, &Reference::Exact(&exact))?;
    let first = 2 * example.number() - 1;
    Ok((0..2)
        .map(|k| BenchmarkTable {
            number: first + k as u8,
            example,
            report: full.component(k),
        })
        .collect())
}

/// Orders plotted for each example: unit orders and one fractional pair.
pub fn figure_orders(example: Example) -> [[Exponent; 2]; 2] {
    let r = |n, d| Exponent::new(n, d).expect("valid literal");
    match example {
        Example::One => [[Exponent::ONE; 2], [r(7, 10), r(9, 10)]],
        Example::Two => [[Exponent::ONE; 2], [r(1, 2), r(4, 5)]],
    }
}

pub fn figure_file_name(example: Example, orders: [Exponent; 2]) -> String {
    let o = |e: Exponent| e.to_string().replace('/', "-");
    format!("example{}_{}_{}.csv", example.number(), o(orders[0]), o(orders[1]))
}

/// Plot series on `[0, 1]`: the final iterate of each state next to a
/// reference (exact solution at unit orders, the ABM oracle otherwise).
pub fn figure_series(
    example: Example,
    orders: [Exponent; 2],
    points: usize,
    iterations: Option<usize>,
) -> Result<GridReport, ReportError> {
    let case = ReferenceCase::new(example, orders);
    let n = iterations.unwrap_or(example.table_iterations());
    let sol = solve(&case.system, &PiaConfig::with_iterations(n))?;
    let grid = uniform_grid(0.0, 1.0, points);
    let report = match case.exact {
        Some(exact) => {
            let exact = move |t: f64| exact(t).to_vec();
            build_report(&sol, &grid, &[n], &Reference::Exact(&exact))?
        }
        None => {
            let oracle = abm_solve(&case.system, 1.0, ORACLE_REFERENCE_STEPS)?;
            build_report(&sol, &grid, &[n], &Reference::Oracle(&oracle))?
        }
    };
    Ok(report)
}
