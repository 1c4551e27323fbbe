use graded_posets::asymptotics::AsymptoticReport;
use graded_posets::genfun::{Constraint, CountTable, QuarkFamilyFlags};
use serde::Serialize;

use crate::Classification;

pub fn count_csv(table: &CountTable, out: &mut String) {
    let by_height = table.kind.by_height();
    out.push_str(if by_height { "n,k,count\n" } else { "n,count\n" });
    for r in &table.counts {
        match r.k {
            Some(k) => out.push_str(&format!("{},{k},{}\n", r.n, r.count)),
            None => out.push_str(&format!("{},{}\n", r.n, r.count)),
        }
    }
}

/// One line per `n`; by-height tables get one column per height.
pub fn count_table(table: &CountTable, max_n: usize, out: &mut String) {
    if !table.kind.by_height() {
        out.push_str(&format!("{:>3}  {}\n", "n", table.kind));
        for r in &table.counts {
            out.push_str(&format!("{:>3}  {}\n", r.n, r.count));
        }
        return;
    }
    let cells: Vec<Vec<String>> = (0..=max_n)
        .map(|n| (0..=max_n).map(|k| table.get(n, Some(k)).map_or(String::new(), |c| c.to_string())).collect())
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1).max(max_n.to_string().len());
    out.push_str(&format!("{}\n", table.kind));
    out.push_str(&format!("{:>3} |", "n\\k"));
    for k in 0..=max_n {
        out.push_str(&format!(" {k:>width$}"));
    }
    out.push('\n');
    for (n, row) in cells.iter().enumerate() {
        out.push_str(&format!("{n:>3} |"));
        for c in row {
            out.push_str(&format!(" {c:>width$}"));
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
    }
}

pub fn flags_name(f: &QuarkFamilyFlags) -> String {
    let c = |c: Constraint| match c {
        Constraint::Required => "+",
        Constraint::Forbidden => "-",
        Constraint::Free => "*",
    };
    format!(
        "flags bottom-all{} top-all{} bottom-iso{} top-iso{}",
        c(f.bottom_all_seeing),
        c(f.top_all_seeing),
        c(f.bottom_isolated),
        c(f.top_isolated)
    )
}

#[derive(Serialize)]
pub struct QuarkRow {
    pub family: String,
    pub m: usize,
    pub n: usize,
    pub brute: u64,
    pub formula: String,
    pub ok: bool,
}

pub fn quark_rows(rows: &[QuarkRow], json: bool, csv: bool, out: &mut String) {
    if json {
        crate::json(&rows, out);
    } else if csv {
        out.push_str("family,m,n,enumeration,formula,agree\n");
        for r in rows {
            out.push_str(&format!("{},{},{},{},{},{}\n", r.family, r.m, r.n, r.brute, r.formula, r.ok));
        }
    } else {
        let bad = rows.iter().filter(|r| !r.ok).count();
        let families = rows.iter().map(|r| &r.family).collect::<std::collections::BTreeSet<_>>().len();
        for r in rows.iter().filter(|r| !r.family.starts_with("flags")) {
            out.push_str(&format!("{:<12} {}x{}  {:>8}  {}\n", r.family, r.m, r.n, r.brute, if r.ok { "ok" } else { "MISMATCH" }));
        }
        out.push_str(&format!("{} families, {} cells, {bad} mismatches\n", families, rows.len()));
    }
}

pub fn asymptotic_table(report: &AsymptoticReport, out: &mut String) {
    let t = &report.theta;
    out.push_str(&format!("C1 = {}\nC2 = {}\n", t.c1.round_to(30), t.c2.round_to(30)));
    out.push_str(&format!("tail bound = 2^-{} ({} terms)\n", t.terms * t.terms - 1, t.terms));
    out.push_str(&format!("{:>3}  {:>12}  {:>12}  {:>12}\n", "n", "psi ratio", "strong", "weak"));
    for r in &report.rows {
        out.push_str(&format!(
            "{:>3}  {:>12}  {:>12}  {:>12}\n",
            r.n,
            r.ratio_psi.round_to(8),
            r.ratio_strong.round_to(8),
            r.ratio_weak.round_to(8)
        ));
    }
}

pub fn classification(c: &Classification, out: &mut String) {
    let graded = match (c.weakly_graded, c.strongly_graded) {
        (_, true) => "strongly graded",
        (true, false) => "weakly graded",
        _ => "not graded",
    };
    let pattern = if c.contains_3plus1 { "contains 3+1" } else { "avoids 3+1" };
    out.push_str(&format!("{graded}; {pattern}\n"));
    out.push_str(&format!("vertices: {}\n", c.n));
    if let Some(h) = c.height {
        out.push_str(&format!("height: {h}\n"));
    }
    if let Some([a, b, d, w]) = c.witness {
        out.push_str(&format!("3+1 witness: {a} < {b} < {d}, {w} incomparable\n"));
    }
    out.push_str(&format!("2+2: {}\n", if c.contains_2plus2 { "contains" } else { "avoids" }));
    if let Some(v) = c.vigilant {
        out.push_str(&format!("vigilant: {}\n", if v { "yes" } else { "no" }));
    }
    for (i, s) in c.summands.iter().enumerate() {
        out.push_str(&format!("summand {}: {s}\n", i + 1));
    }
    if let Some(dot) = &c.dot {
        out.push_str(dot);
    }
}
