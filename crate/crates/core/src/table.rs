//! Regeneration of the published parameter tables for both constructions,
//! with every published cell compared against recomputation.

use serde::Serialize;

use crate::analysis::{ratio_report, AnalysisReport, Tier};
use crate::constructions::Construction;
use crate::error::{Error, Result};
use crate::tower::TowerParams;

/// One published row: tower parameters and the cells as printed.
#[derive(Clone, Copy, Debug)]
pub struct PublishedRow {
    pub p: u32,
    pub t: u32,
    pub s: u32,
    pub n: &'static str,
    pub k: &'static str,
    pub imax: &'static str,
    pub welch: &'static str,
    pub ratio: &'static str,
}

const fn row(
    (p, t, s): (u32, u32, u32),
    n: &'static str,
    k: &'static str,
    imax: &'static str,
    welch: &'static str,
    ratio: &'static str,
) -> PublishedRow {
    PublishedRow { p, t, s, n, k, imax, welch, ratio }
}

/// Published rows for Construction I (N = q-1).
pub const ROWS_I: [PublishedRow; 9] = [
    row((3, 2, 2), "80", "36", "0.1667", "0.1244", "1.3399"),
    row((19, 1, 2), "360", "171", "0.0683", "0.0555", "1.2310"),
    row((179, 1, 2), "32040", "15931", "0.006", "0.0056", "1.0748"),
    row((3, 5, 2), "59048", "29403", "0.0044", "0.0041", "1.0642"),
    row((3, 7, 2), "4782968", "2390391", "0.00046724", "0.00045746", "1.0214"),
    row((5, 3, 2), "244140625", "121101500", "6.5028e-05", "6.541e-05", "1.0080"),
    row((7, 3, 4), "1.19158e+20", "9.5511e+19", "7.2670e-11", "7.2459e-11", "1.0029"),
    row((5, 4, 4), "2.3283e+22", "1.1623e+22", "6.5746e-12", "6.5641e-12", "1.0016"),
    row((19, 5, 2), "6.1311e+12", "3.0655e+12", "4.0412e-07", "4.0386e-07", "1.0006"),
];

/// Published rows for Construction II (N = q²).
pub const ROWS_II: [PublishedRow; 9] = [
    row((3, 2, 2), "6561", "2952", "0.0152", "0.0137", "1.1166"),
    row((19, 1, 2), "130321", "61902", "0.0031", "0.0029", "1.0539"),
    row((5, 2, 3), "244140625", "11719500", "6.9329e-05", "6.6609e-05", "1.0408"),
    row((3, 3, 2), "531441", "256230", "0.0015", "0.0014", "1.0377"),
    row((5, 3, 2), "244140625", "121101500", "6.5028e-05", "6.410e-05", "1.0080"),
    row((3, 5, 2), "3.4868e+09", "1.7362e+09", "1.7075e-05", "1.7005e-05", "1.0041"),
    row((7, 3, 4), "1.9158e+20", "9.5511e+19", "7.2670e-11", "7.2459e-11", "1.0029"),
    row((3, 6, 2), "2.8243e+11", "1.4102e+11", "1.8868e-06", "1.8843e-06", "1.0014"),
    row((13, 3, 2), "2.3298e+13", "1.1644e+13", "2.0736e-07", "2.0727e-07", "1.0005"),
];

pub fn published_rows(construction: Construction) -> &'static [PublishedRow] {
    match construction {
        Construction::I => &ROWS_I,
        Construction::II => &ROWS_II,
    }
}

/// One compared cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub column: &'static str,
    pub published: String,
    pub recomputed: String,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    /// 1-based position in the published table.
    pub row: usize,
    pub r: String,
    pub q: String,
    pub tier: Tier,
    pub cells: Vec<Cell>,
    pub report: AnalysisReport,
}

impl TableRow {
    pub fn mismatches(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| !c.matches)
    }
}

/// Half a unit in the last printed digit of a published number, or `None`
/// when the string is not a number.
fn printed_resolution(s: &str) -> Option<f64> {
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (s, 0),
    };
    let decimals = mantissa.split_once('.').map_or(0, |(_, f)| f.len()) as i32;
    Some(0.5 * 10f64.powi(exp - decimals))
}

/// Whether `value` rounds to the published string at its printed precision.
pub fn agrees(published: &str, value: f64) -> bool {
    match (published.parse::<f64>(), printed_resolution(published)) {
        (Ok(x), Some(half)) => (value - x).abs() <= half * (1.0 + 1e-9) + x.abs() * 1e-15,
        _ => false,
    }
}

/// Fixed point with `precision` places, or scientific with a signed
/// two-digit exponent once the magnitude drops below 1e-4.
pub fn format_real(x: f64, precision: usize) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        let s = format!("{x:.precision$e}");
        let (m, e) = s.split_once('e').expect("scientific format");
        let e: i32 = e.parse().expect("exponent");
        format!("{m}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
    } else {
        format!("{x:.precision$}")
    }
}

/// Exact below 1e9, scientific with a two-digit exponent above.
pub fn format_count(n: u128, precision: usize) -> String {
    if n < 1_000_000_000 {
        return n.to_string();
    }
    let s = format!("{:.precision$e}", n as f64);
    let (m, e) = s.split_once('e').expect("scientific format");
    format!("{m}e+{:02}", e.parse::<i32>().expect("exponent"))
}

fn power_label(p: u32, e: u32) -> String {
    if e == 1 {
        p.to_string()
    } else {
        format!("{p}^{e}")
    }
}

fn count_cell(column: &'static str, published: &str, value: u128, precision: usize) -> Cell {
    let recomputed = format_count(value, precision);
    let matches = if published.contains(['e', 'E']) {
        agrees(published, value as f64)
    } else {
        published.parse::<u128>() == Ok(value)
    };
    Cell {
        column,
        published: published.to_string(),
        recomputed,
        matches,
    }
}

fn real_cell(column: &'static str, published: &str, value: f64, precision: usize) -> Cell {
    Cell {
        column,
        published: published.to_string(),
        recomputed: format_real(value, precision),
        matches: agrees(published, value),
    }
}

/// Recomputes the selected rows (1-based; all when empty). Rows whose q²
/// exceeds `budget` are formula-only.
pub fn regenerate(
    construction: Construction,
    rows: &[usize],
    budget: u64,
    precision: usize,
) -> Result<Vec<TableRow>> {
    let published = published_rows(construction);
    let selected: Vec<usize> = if rows.is_empty() {
        (1..=published.len()).collect()
    } else {
        rows.to_vec()
    };
    selected
        .into_iter()
        .map(|i| {
            let row = published.get(i.wrapping_sub(1)).ok_or_else(|| {
                Error::Precondition(format!("row {i} out of range 1..={}", published.len()))
            })?;
            let params = TowerParams::new(row.p, row.t, row.s)?;
            let report = ratio_report(construction, &params, budget)?;
            let cells = vec![
                count_cell("N", row.n, report.n, precision),
                count_cell("K", row.k, report.k, precision),
                real_cell("I_max", row.imax, report.imax_bound, precision),
                real_cell("I_W", row.welch, report.welch, precision),
                real_cell("ratio", row.ratio, report.ratio_bound_over_welch, precision),
            ];
            Ok(TableRow {
                row: i,
                r: power_label(row.p, row.t),
                q: power_label(row.p, row.t * row.s),
                tier: report.tier,
                cells,
                report,
            })
        })
        .collect()
}

/// Plain-text rendering, one line per row, with mismatching cells marked
/// `*` and explained underneath.
pub fn render_text(construction: Construction, rows: &[TableRow], precision: usize) -> String {
    let mut out = format!(
        "construction {construction}\n{:>4} {:>6} {:>8} {:>12} {:>12} {:>12} {:>12} {:>12} {:>10}\n",
        "row", "r", "q", "N", "K", "I_max", "I_W", "ratio", "tier"
    );
    for row in rows {
        let mark = |c: &Cell| format!("{}{}", c.recomputed, if c.matches { "" } else { "*" });
        let tier = match row.tier {
            Tier::Exhaustive => "exhaustive",
            Tier::Formula => "formula",
        };
        out.push_str(&format!(
            "{:>4} {:>6} {:>8} {:>12} {:>12} {:>12} {:>12} {:>12} {:>10}\n",
            row.row,
            row.r,
            row.q,
            mark(&row.cells[0]),
            mark(&row.cells[1]),
            mark(&row.cells[2]),
            mark(&row.cells[3]),
            mark(&row.cells[4]),
            tier
        ));
        if let Some(e) = row.report.imax_empirical {
            out.push_str(&format!("     empirical I_max {}\n", format_real(e, precision)));
        }
        for c in row.mismatches() {
            out.push_str(&format!(
                "     * {}: published {}, recomputed {}\n",
                c.column, c.published, c.recomputed
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        assert_eq!(format_real(0.015244, 4), "0.0152");
        assert_eq!(format_real(6.50281e-5, 4), "6.5028e-05");
        assert_eq!(format_real(1.0, 4), "1.0000");
        assert_eq!(format_count(6561, 4), "6561");
        assert_eq!(format_count(3_486_784_401, 4), "3.4868e+09");
    }

    #[test]
    fn agreement_uses_printed_precision() {
        assert!(agrees("0.0152", 0.015244));
        assert!(!agrees("0.0152", 0.01526));
        assert!(agrees("0.006", 0.00604));
        assert!(agrees("6.5028e-05", 6.50281e-5));
        assert!(!agrees("11719500", 117195000.0));
        assert!(!agrees("abc", 1.0));
    }

    #[test]
    fn first_rows_match() {
        for c in [Construction::I, Construction::II] {
            let rows = regenerate(c, &[1, 2], 1 << 26, 4).unwrap();
            for r in &rows {
                assert_eq!(r.tier, Tier::Exhaustive);
                assert_eq!(r.mismatches().count(), 0, "{c} row {}: {:?}", r.row, r.cells);
            }
        }
    }

    #[test]
    fn known_inconsistencies_are_flagged() {
        let rows = regenerate(Construction::II, &[3], 1 << 26, 4).unwrap();
        let bad: Vec<_> = rows[0].mismatches().map(|c| c.column).collect();
        assert!(bad.contains(&"K"));
        let rows = regenerate(Construction::I, &[6], 1 << 26, 4).unwrap();
        let bad: Vec<_> = rows[0].mismatches().map(|c| c.column).collect();
        assert!(bad.contains(&"N"));
        assert_eq!(rows[0].tier, Tier::Formula);
    }

    #[test]
    fn row_out_of_range() {
        assert!(regenerate(Construction::I, &[10], 1 << 26, 4).is_err());
        assert!(regenerate(Construction::I, &[0], 1 << 26, 4).is_err());
    }
}
