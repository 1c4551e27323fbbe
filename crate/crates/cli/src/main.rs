use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use graded_posets::asymptotics::{ratio_report, AsymptoticReport};
use graded_posets::exchange::{parse_poset, to_dot};
use graded_posets::genfun::{
    count_table, f_series, quark_family_count, semiorder_gf, strong_by_height_gf, strong_gf, strong_indecomposable_gf,
    weak_gf, weak_total_gf, CountKind, CountTable, Method, QuarkFamilyFlags,
};
use graded_posets::oracle::{brute_counts, enumerate_bipartite, oracle_table, MAX_BIPARTITE_EDGES, MAX_POSET_N};
use graded_posets::structure::{decompose_ordinal, trim, word_of, LegalityMode};
use graded_posets::{BType, Bounds, RankedPoset, TruncatedSeries};
use serde::Serialize;
use thiserror::Error;

mod render;

#[derive(Parser, Debug)]
#[command(name = "graded-posets", version, about = "Exact counts of graded (3+1)-avoiding posets")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Strong,
    Weak,
    Semiorder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Which {
    Strong,
    StrongByHeight,
    Weak,
    WeakByHeight,
    Semiorder,
    Indecomposable,
    Psi,
    FOo,
    FOx,
    FXo,
    FXx,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Counts from the generating functions.
    Count {
        #[arg(value_enum)]
        family: Family,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        /// Refine by height (strong and weak only).
        #[arg(long)]
        by_height: bool,
    },
    /// Compares exhaustive enumeration with the generating functions.
    Verify {
        #[arg(long, default_value_t = 6)]
        max_n: usize,
    },
    /// Compares brute-force bipartite counts with the closed formula.
    Quarks {
        #[arg(long, default_value_t = 4)]
        max_m: usize,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// Dumps the coefficients of a series.
    Series {
        #[arg(value_enum)]
        which: Which,
        #[arg(long, default_value_t = 8)]
        order: usize,
    },
    /// Ratio diagnostics for the asymptotic growth.
    Asymptotics {
        #[arg(long, default_value_t = 16)]
        max_n: usize,
        #[arg(long, default_value_t = 12)]
        terms: usize,
    },
    /// Describes a poset read from an exchange file (`-` for stdin).
    Classify {
        input: PathBuf,
        /// Also print the Hasse diagram in DOT.
        #[arg(long)]
        dot: bool,
    },
}

/// Failures, by exit status.
#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Mismatch(_) => 1,
            Failure::Input(_) => 2,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

const MAX_ORDER: usize = 40;

fn check_order(n: usize) -> Result<(), Failure> {
    if n > MAX_ORDER {
        return Err(Failure::Input(format!("order {n} exceeds the supported maximum {MAX_ORDER}")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(&cli.command, cli.format, &mut out);
    let _ = io::stdout().write_all(out.as_bytes());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}

fn run(command: &Command, format: Format, out: &mut String) -> Result<(), Failure> {
    match *command {
        Command::Count { family, max_n, by_height } => count(family, max_n, by_height, format, out),
        Command::Verify { max_n } => verify(max_n, format, out),
        Command::Quarks { max_m, max_n } => quarks(max_m, max_n, format, out),
        Command::Series { which, order } => series(which, order, format, out),
        Command::Asymptotics { max_n, terms } => asymptotics(max_n, terms, format, out),
        Command::Classify { ref input, dot } => classify(input, dot, format, out),
    }
}

fn kind_of(family: Family, by_height: bool) -> Result<CountKind, Failure> {
    Ok(match (family, by_height) {
        (Family::Strong, false) => CountKind::Strong,
        (Family::Strong, true) => CountKind::StrongByHeight,
        (Family::Weak, false) => CountKind::Weak,
        (Family::Weak, true) => CountKind::WeakByHeight,
        (Family::Semiorder, false) => CountKind::Semiorder,
        (Family::Semiorder, true) => return Err(Failure::Input("semiorder counts are not refined by height".into())),
    })
}

fn json<T: Serialize>(v: &T, out: &mut String) {
    out.push_str(&serde_json::to_string_pretty(v).expect("plain data serializes"));
    out.push('\n');
}

fn count(family: Family, max_n: usize, by_height: bool, format: Format, out: &mut String) -> Result<(), Failure> {
    check_order(max_n)?;
    let kind = kind_of(family, by_height)?;
    let table = count_table(kind, max_n).map_err(input)?;
    match format {
        Format::Json => json(&table, out),
        Format::Csv => render::count_csv(&table, out),
        Format::Table => render::count_table(&table, max_n, out),
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyReport {
    max_n: usize,
    cells_checked: usize,
    mismatches: Vec<String>,
    criterion_disagreements: u64,
}

fn verify(max_n: usize, format: Format, out: &mut String) -> Result<(), Failure> {
    if max_n > MAX_POSET_N {
        return Err(Failure::Input(format!("verify supports --max-n up to {MAX_POSET_N}")));
    }
    let reports = (0..=max_n).map(brute_counts).collect::<Result<Vec<_>, _>>().map_err(input)?;
    let mut report = VerifyReport {
        max_n,
        cells_checked: 0,
        mismatches: Vec::new(),
        criterion_disagreements: reports.iter().map(|r| r.criterion_disagreements).sum(),
    };
    let kinds = [CountKind::Strong, CountKind::Weak, CountKind::StrongByHeight, CountKind::WeakByHeight, CountKind::Semiorder];
    let mut lines = Vec::new();
    for kind in kinds {
        let exact = count_table(kind, max_n).map_err(input)?;
        let brute = oracle_table(kind, &reports).table;
        let cells = cell_diff(&exact, &brute);
        report.cells_checked += cells.0;
        lines.push((kind, cells.0, cells.1.len()));
        report.mismatches.extend(cells.1);
    }
    match format {
        Format::Json => json(&report, out),
        Format::Csv => {
            out.push_str("kind,cells,mismatches\n");
            for (k, c, m) in &lines {
                out.push_str(&format!("{k},{c},{m}\n"));
            }
        }
        Format::Table => {
            for (k, c, m) in &lines {
                out.push_str(&format!("{:<18} {c:>4} cells  {m} mismatches\n", k.to_string()));
            }
            out.push_str(&format!("avoidance criteria disagreements: {}\n", report.criterion_disagreements));
        }
    }
    if let Some(first) = report.mismatches.first() {
        return Err(Failure::Mismatch(format!("first mismatch: {first}")));
    }
    if report.criterion_disagreements > 0 {
        return Err(Failure::Mismatch("avoidance criteria disagree on some poset".into()));
    }
    Ok(())
}

/// Every cell of either table, with a description of each disagreement.
fn cell_diff(exact: &CountTable, brute: &CountTable) -> (usize, Vec<String>) {
    let mut keys: Vec<(usize, Option<usize>)> = exact.counts.iter().chain(&brute.counts).map(|r| (r.n, r.k)).collect();
    keys.sort();
    keys.dedup();
    let mut bad = Vec::new();
    for &(n, k) in &keys {
        let a = exact.get(n, k).cloned().unwrap_or_default();
        let b = brute.get(n, k).cloned().unwrap_or_default();
        if a != b {
            let cell = k.map_or(format!("n={n}"), |k| format!("n={n} k={k}"));
            bad.push(format!("{} {cell}: generating function {a}, enumeration {b}", exact.kind));
        }
    }
    (keys.len(), bad)
}

const FAMILIES: [(&str, QuarkFamilyFlags); 2] = [("all", QuarkFamilyFlags::ALL), ("middle", QuarkFamilyFlags::MIDDLE)];

fn quarks(max_m: usize, max_n: usize, format: Format, out: &mut String) -> Result<(), Failure> {
    if max_m * max_n > MAX_BIPARTITE_EDGES {
        return Err(Failure::Input(format!("--max-m × --max-n must be at most {MAX_BIPARTITE_EDGES}")));
    }
    let mut families: Vec<(String, QuarkFamilyFlags)> = FAMILIES.iter().map(|(n, f)| (n.to_string(), *f)).collect();
    families.extend(BType::ALL.iter().map(|&b| (format!("type {b}"), QuarkFamilyFlags::of_type(b))));
    families.extend(QuarkFamilyFlags::every().into_iter().map(|f| (render::flags_name(&f), f)));
    let mut rows = Vec::new();
    let mut first_bad = None;
    for (name, flags) in &families {
        for m in 1..=max_m {
            for n in 1..=max_n {
                let brute = enumerate_bipartite(m, n, *flags).map_err(input)?;
                let formula = quark_family_count(m, n, *flags);
                let ok = formula == brute.into();
                if !ok && first_bad.is_none() {
                    first_bad = Some(format!("{name} m={m} n={n}: formula {formula}, enumeration {brute}"));
                }
                rows.push(render::QuarkRow { family: name.clone(), m, n, brute, formula: formula.to_string(), ok });
            }
        }
    }
    render::quark_rows(&rows, format == Format::Json, format == Format::Csv, out);
    match first_bad {
        Some(cell) => Err(Failure::Mismatch(format!("first mismatch: {cell}"))),
        None => Ok(()),
    }
}

fn series(which: Which, order: usize, format: Format, out: &mut String) -> Result<(), Failure> {
    check_order(order)?;
    let s: TruncatedSeries = match which {
        Which::Strong => strong_gf(order, Method::Pipeline).map_err(input)?,
        Which::StrongByHeight => strong_by_height_gf(order).map_err(input)?,
        Which::Weak => weak_total_gf(order, Method::Pipeline).map_err(input)?,
        Which::WeakByHeight => weak_gf(order, Method::Pipeline).map_err(input)?,
        Which::Semiorder => semiorder_gf(order),
        Which::Indecomposable => strong_indecomposable_gf(Bounds::xz(order)).map_err(input)?,
        Which::Psi => TruncatedSeries::psi(Bounds::x_only(order)),
        Which::FOo => f_series(BType::OO, Bounds::x_only(order)),
        Which::FOx => f_series(BType::OX, Bounds::x_only(order)),
        Which::FXo => f_series(BType::XO, Bounds::x_only(order)),
        Which::FXx => f_series(BType::XX, Bounds::x_only(order)),
    };
    let terms = s.dump();
    match format {
        Format::Json => json(&terms, out),
        Format::Csv => {
            out.push_str("i,j,k,numerator,denominator\n");
            for t in &terms {
                out.push_str(&format!("{},{},{},{},{}\n", t.i, t.j, t.k, t.numerator, t.denominator));
            }
        }
        Format::Table => {
            for t in &terms {
                out.push_str(&format!("x^{} z^{} t^{}  {}/{}\n", t.i, t.j, t.k, t.numerator, t.denominator));
            }
        }
    }
    Ok(())
}

fn asymptotics(max_n: usize, terms: usize, format: Format, out: &mut String) -> Result<(), Failure> {
    check_order(max_n)?;
    let report: AsymptoticReport = ratio_report(max_n, terms).map_err(input)?;
    match format {
        Format::Json => json(&report, out),
        Format::Csv => out.push_str(&report.to_csv()),
        Format::Table => render::asymptotic_table(&report, out),
    }
    Ok(())
}

#[derive(Serialize)]
struct Classification {
    n: usize,
    weakly_graded: bool,
    strongly_graded: bool,
    height: Option<usize>,
    contains_3plus1: bool,
    witness: Option<[usize; 4]>,
    contains_2plus2: bool,
    vigilant: Option<bool>,
    summands: Vec<String>,
    dot: Option<String>,
}

fn classify(path: &PathBuf, dot: bool, format: Format, out: &mut String) -> Result<(), Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(input)?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
    };
    let p = parse_poset(&text).map_err(input)?;
    let ranked = RankedPoset::from_poset(p.clone());
    let witness = p.find_3plus1().map(|(a, b, c, d)| [a + 1, b + 1, c + 1, d + 1]);
    let mut summands = Vec::new();
    if let Some(r) = ranked.as_ref().filter(|r| r.is_vigilant()) {
        let t = trim(r).map_err(input)?;
        let parts = decompose_ordinal(&t);
        let count = parts.len();
        for (i, part) in parts.iter().enumerate() {
            let desc = if part.height() < 2 {
                "placeholder".to_string()
            } else {
                match word_of(part) {
                    Ok(w) => {
                        let legal = graded_posets::structure::is_legal(&w, LegalityMode::for_summand(i, count));
                        format!("word {w} ({})", if legal { "legal" } else { "illegal" })
                    }
                    Err(e) => format!("no quark decomposition: {e}"),
                }
            };
            summands.push(format!("height {} with {} labeled vertices: {desc}", part.height(), part.labeled_count()));
        }
    }
    let c = Classification {
        n: p.len(),
        weakly_graded: ranked.is_some(),
        strongly_graded: ranked.as_ref().is_some_and(|r| r.is_strongly_graded()),
        height: ranked.as_ref().map(|r| r.height()),
        contains_3plus1: witness.is_some(),
        witness,
        contains_2plus2: p.contains_2plus2(),
        vigilant: ranked.as_ref().map(|r| r.is_vigilant()),
        summands,
        dot: dot.then(|| to_dot(&p)),
    };
    match format {
        Format::Json => json(&c, out),
        Format::Csv => {
            out.push_str("n,weakly_graded,strongly_graded,height,contains_3plus1,contains_2plus2,vigilant\n");
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                c.n,
                c.weakly_graded,
                c.strongly_graded,
                c.height.map_or(String::new(), |h| h.to_string()),
                c.contains_3plus1,
                c.contains_2plus2,
                c.vigilant.map_or(String::new(), |v| v.to_string()),
            ));
        }
        Format::Table => render::classification(&c, out),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use graded_posets::genfun::CountRow;

    #[test]
    fn family_flags_map_to_kinds() {
        assert_eq!(kind_of(Family::Weak, true).unwrap(), CountKind::WeakByHeight);
        assert_eq!(kind_of(Family::Strong, false).unwrap(), CountKind::Strong);
        assert!(matches!(kind_of(Family::Semiorder, true), Err(Failure::Input(_))));
    }

    #[test]
    fn cell_diff_names_the_offending_cell() {
        let row = |n, c: i64| CountRow { n, k: None, count: c.into() };
        let a = CountTable { kind: CountKind::Strong, counts: vec![row(0, 1), row(1, 1)] };
        let b = CountTable { kind: CountKind::Strong, counts: vec![row(0, 1), row(1, 2), row(2, 3)] };
        let (cells, bad) = cell_diff(&a, &b);
        assert_eq!(cells, 3);
        assert_eq!(bad[0], "strong n=1: generating function 1, enumeration 2");
        assert_eq!(bad.len(), 2);
    }

    #[test]
    fn count_rejects_huge_orders() {
        let mut out = String::new();
        assert!(matches!(count(Family::Strong, 1000, false, Format::Table, &mut out), Err(Failure::Input(_))));
    }
}
