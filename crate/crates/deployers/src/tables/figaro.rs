//! Parser and emitter for the inter-country IO "CSV matrix" layout.
//!
//! The first row and the first column carry `CC_Sss` labels (two-character
//! country code, underscore, sector or category code); the body is plain
//! decimal. Columns are the using side, rows the supplying side:
//!
//! - `CC_<sector>` rows/columns: intermediate flows between country-sectors.
//! - `CC_<category>` columns after the sector block: final demand of country
//!   `CC` (categories `P3_S14`/`P3_S15` count as household demand, `P3_S13`
//!   as government, everything else folds into GFCF).
//! - `W2_*` rows: value added and taxes per using column (`W2_D1`
//!   compensation of employees, `W2_B2A3G` gross operating surplus, `W2_B1G`
//!   total value added for sources that do not split it, `W2_D21X31` taxes
//!   less subsidies on products).

use super::TableError;
use serde::{Deserialize, Serialize};

pub const ROW_LABOR: &str = "W2_D1";
pub const ROW_SURPLUS: &str = "W2_B2A3G";
pub const ROW_VA_TOTAL: &str = "W2_B1G";
pub const ROW_TAXES: &str = "W2_D21X31";

/// Canonical final-demand categories after folding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FdCategory {
    Household,
    Government,
    Gfcf,
}

pub fn canonical_fd_category(label: &str) -> FdCategory {
    match label {
        "P3_S14" | "P3_S15" => FdCategory::Household,
        "P3_S13" => FdCategory::Government,
        _ => FdCategory::Gfcf,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ColHeader {
    /// Intermediate use by (country index, sector index).
    Sector(usize, usize),
    /// Final demand of country index, original category label.
    FinalDemand(usize, String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RowHeader {
    Sector(usize, usize),
    /// A `W2_*` value-added / tax row, by original label.
    Special(String),
}

/// Inter-country industry-by-industry flow table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcioTable {
    pub countries: Vec<String>,
    pub sectors: Vec<String>,
    pub col_headers: Vec<ColHeader>,
    pub row_headers: Vec<RowHeader>,
    /// Row-major body, `row_headers.len() x col_headers.len()`.
    pub body: Vec<f64>,
    /// Corner label of the header row, preserved for round trips.
    pub corner: String,
}

#[derive(Debug, Clone)]
pub struct IcioParse {
    pub table: IcioTable,
    pub warnings: Vec<String>,
}

fn check_label(label: &str) -> Result<(&str, &str), TableError> {
    let bytes = label.as_bytes();
    if bytes.len() < 4
        || bytes[2] != b'_'
        || !bytes[..2].iter().all(|b| b.is_ascii_uppercase() || b.is_ascii_digit())
    {
        return Err(TableError::BadLabel(label.to_string()));
    }
    Ok((&label[..2], &label[3..]))
}

impl IcioTable {
    pub fn n_countries(&self) -> usize {
        self.countries.len()
    }

    pub fn n_sectors(&self) -> usize {
        self.sectors.len()
    }

    pub fn country_index(&self, code: &str) -> Option<usize> {
        self.countries.iter().position(|c| c == code)
    }

    fn cols(&self) -> usize {
        self.col_headers.len()
    }

    pub fn cell(&self, row: usize, col: usize) -> f64 {
        self.body[row * self.cols() + col]
    }

    fn sector_col(&self, country: usize, sector: usize) -> usize {
        self.col_headers
            .iter()
            .position(|h| matches!(h, ColHeader::Sector(c, s) if *c == country && *s == sector))
            .expect("sector column")
    }

    fn sector_row(&self, country: usize, sector: usize) -> usize {
        self.row_headers
            .iter()
            .position(|h| matches!(h, RowHeader::Sector(c, s) if *c == country && *s == sector))
            .expect("sector row")
    }

    fn special_row(&self, label: &str) -> Option<usize> {
        self.row_headers
            .iter()
            .position(|h| matches!(h, RowHeader::Special(l) if l == label))
    }

    /// Intermediate flow from (origin country, origin sector) to
    /// (destination country, destination sector).
    pub fn z(&self, co: usize, so: usize, cd: usize, sd: usize) -> f64 {
        self.cell(self.sector_row(co, so), self.sector_col(cd, sd))
    }

    /// Final demand of destination country `cd` (canonical category) supplied
    /// by (origin country, origin sector).
    pub fn fd(&self, co: usize, so: usize, cd: usize, cat: FdCategory) -> f64 {
        let row = self.sector_row(co, so);
        self.col_headers
            .iter()
            .enumerate()
            .filter(|(_, h)| {
                matches!(h, ColHeader::FinalDemand(c, label)
                    if *c == cd && canonical_fd_category(label) == cat)
            })
            .map(|(i, _)| self.cell(row, i))
            .sum()
    }

    fn special_at_sector(&self, label: &str, cd: usize, sd: usize) -> Option<f64> {
        self.special_row(label).map(|r| self.cell(r, self.sector_col(cd, sd)))
    }

    /// Compensation of employees for a using column, if the source splits VA.
    pub fn labor(&self, cd: usize, sd: usize) -> Option<f64> {
        self.special_at_sector(ROW_LABOR, cd, sd)
    }

    pub fn surplus(&self, cd: usize, sd: usize) -> Option<f64> {
        self.special_at_sector(ROW_SURPLUS, cd, sd)
    }

    pub fn va_total(&self, cd: usize, sd: usize) -> Option<f64> {
        self.special_at_sector(ROW_VA_TOTAL, cd, sd)
    }

    pub fn product_taxes(&self, cd: usize, sd: usize) -> f64 {
        self.special_at_sector(ROW_TAXES, cd, sd).unwrap_or(0.0)
    }

    /// Taxes on products paid directly by a final-demand category.
    pub fn fd_taxes(&self, cd: usize, cat: FdCategory) -> f64 {
        let Some(row) = self.special_row(ROW_TAXES) else { return 0.0 };
        self.col_headers
            .iter()
            .enumerate()
            .filter(|(_, h)| {
                matches!(h, ColHeader::FinalDemand(c, label)
                    if *c == cd && canonical_fd_category(label) == cat)
            })
            .map(|(i, _)| self.cell(row, i))
            .sum()
    }

    /// Gross output of (country, sector): everything its row supplies.
    pub fn output(&self, c: usize, s: usize) -> f64 {
        let row = self.sector_row(c, s);
        (0..self.cols()).map(|col| self.cell(row, col)).sum()
    }

    /// Total inputs of (country, sector): its column, including VA and taxes.
    pub fn inputs(&self, c: usize, s: usize) -> f64 {
        let col = self.sector_col(c, s);
        (0..self.row_headers.len()).map(|r| self.cell(r, col)).sum()
    }

    pub fn validate(&self, balance_tol: f64) -> Result<(), TableError> {
        for c in 0..self.n_countries() {
            for s in 0..self.n_sectors() {
                let out = self.output(c, s);
                let inp = self.inputs(c, s);
                let denom = out.abs().max(inp.abs());
                if denom == 0.0 {
                    continue;
                }
                let rel = (out - inp).abs() / denom;
                if rel > balance_tol {
                    return Err(TableError::SumMismatch {
                        account: format!("{}_{}", self.countries[c], self.sectors[s]),
                        rel_err: rel,
                        tol: balance_tol,
                        row_sum: out,
                        col_sum: inp,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Parse an inter-country IO table in CSV matrix format.
pub fn parse_figaro_csv(text: &str, balance_tol: f64) -> Result<IcioParse, TableError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header_line =
        lines.next().ok_or_else(|| TableError::MalformedHeader("empty document".into()))?;
    let header: Vec<&str> = header_line.split(',').map(|c| c.trim()).collect();
    if header.len() < 2 {
        return Err(TableError::MalformedHeader("header row has no data columns".into()));
    }
    let corner = header[0].to_string();

    // Discover countries and sectors from the column labels.
    let mut countries: Vec<String> = Vec::new();
    let mut sectors: Vec<String> = Vec::new();
    let mut per_country_sectors: Vec<Vec<String>> = Vec::new();
    let mut raw_cols: Vec<(String, String)> = Vec::new(); // (country, rest)
    for label in &header[1..] {
        let (cc, rest) = check_label(label)?;
        if cc == "W2" {
            return Err(TableError::BadLabel(format!("{} (W2 is only valid for rows)", label)));
        }
        raw_cols.push((cc.to_string(), rest.to_string()));
        if !countries.iter().any(|c| c == cc) {
            countries.push(cc.to_string());
            per_country_sectors.push(Vec::new());
        }
    }
    // The sector list is the column sequence of the first country up to its
    // first final-demand column. Final-demand columns are those whose code is
    // not in the sector list; for the first country we split on the Eurostat
    // category codes.
    let is_fd_code = |code: &str| {
        code == "P3_S14"
            || code == "P3_S15"
            || code == "P3_S13"
            || code == "P51G"
            || code == "P5M"
            || code.starts_with("P5")
            || code.starts_with("P3_")
    };
    for (cc, rest) in &raw_cols {
        if cc == &countries[0] && !is_fd_code(rest) {
            sectors.push(rest.clone());
        }
    }
    if sectors.is_empty() {
        return Err(TableError::MalformedHeader("no sector columns found".into()));
    }

    let mut col_headers = Vec::with_capacity(raw_cols.len());
    for (cc, rest) in &raw_cols {
        let ci = countries.iter().position(|c| c == cc).unwrap();
        if let Some(si) = sectors.iter().position(|s| s == rest) {
            per_country_sectors[ci].push(rest.clone());
            col_headers.push(ColHeader::Sector(ci, si));
        } else {
            col_headers.push(ColHeader::FinalDemand(ci, rest.clone()));
        }
    }
    for (ci, secs) in per_country_sectors.iter().enumerate() {
        if secs != &sectors {
            return Err(TableError::Invalid(format!(
                "country {} has sector columns {:?}, expected the common list of {} sectors",
                countries[ci],
                secs.len(),
                sectors.len()
            )));
        }
    }

    let n_cols = col_headers.len();
    let mut row_headers = Vec::new();
    let mut body: Vec<f64> = Vec::new();
    for line in lines {
        let cells: Vec<&str> = line.split(',').map(|c| c.trim()).collect();
        let label = cells[0];
        let (cc, rest) = check_label(label)?;
        if cells.len() != n_cols + 1 {
            return Err(TableError::RaggedRow {
                row: label.into(),
                expected: n_cols,
                found: cells.len() - 1,
            });
        }
        let header = if cc == "W2" {
            RowHeader::Special(label.to_string())
        } else {
            let ci = countries
                .iter()
                .position(|c| c == cc)
                .ok_or_else(|| TableError::UnknownCountry(cc.to_string()))?;
            let si = sectors
                .iter()
                .position(|s| s == rest)
                .ok_or_else(|| TableError::BadLabel(label.to_string()))?;
            RowHeader::Sector(ci, si)
        };
        for (i, cell) in cells[1..].iter().enumerate() {
            let v = if cell.is_empty() {
                0.0
            } else {
                cell.parse::<f64>().map_err(|_| TableError::BadNumber {
                    row: label.into(),
                    col: header_label(&col_headers[i], &countries, &sectors),
                    text: cell.to_string(),
                })?
            };
            body.push(v);
        }
        row_headers.push(header);
    }

    // Every (country, sector) column needs a matching row.
    for c in 0..countries.len() {
        for s in 0..sectors.len() {
            if !row_headers.iter().any(|h| matches!(h, RowHeader::Sector(rc, rs) if *rc == c && *rs == s)) {
                return Err(TableError::Invalid(format!(
                    "missing row for {}_{}",
                    countries[c], sectors[s]
                )));
            }
        }
    }

    let table = IcioTable { countries, sectors, col_headers, row_headers, body, corner };
    table.validate(balance_tol)?;

    let mut warnings = Vec::new();
    if table.special_row(ROW_LABOR).is_none() && table.special_row(ROW_VA_TOTAL).is_none() {
        warnings.push("no value-added rows (W2_D1/W2_B2A3G or W2_B1G) present".into());
    }
    Ok(IcioParse { table, warnings })
}

fn header_label(h: &ColHeader, countries: &[String], sectors: &[String]) -> String {
    match h {
        ColHeader::Sector(c, s) => format!("{}_{}", countries[*c], sectors[*s]),
        ColHeader::FinalDemand(c, label) => format!("{}_{}", countries[*c], label),
    }
}

/// Emit the table in CSV matrix format; parses back cell-for-cell.
pub fn emit_figaro_csv(table: &IcioTable) -> String {
    let mut out = String::new();
    out.push_str(&table.corner);
    for h in &table.col_headers {
        out.push(',');
        out.push_str(&header_label(h, &table.countries, &table.sectors));
    }
    out.push('\n');
    for (r, h) in table.row_headers.iter().enumerate() {
        match h {
            RowHeader::Sector(c, s) => {
                out.push_str(&format!("{}_{}", table.countries[*c], table.sectors[*s]))
            }
            RowHeader::Special(label) => out.push_str(label),
        }
        for c in 0..table.cols() {
            out.push(',');
            out.push_str(&super::fmt_cell(table.cell(r, c)));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::DEFAULT_BALANCE_TOL;

    /// Degenerate one-country, one-sector table: no intermediate use, final
    /// demand equals output, value added carries the whole column.
    const TINY: &str = "\
rowLabels,AA_S1,AA_P3_S14
AA_S1,0,10
W2_B1G,10,0
";

    #[test]
    fn parses_degenerate_table() {
        let parsed = parse_figaro_csv(TINY, DEFAULT_BALANCE_TOL).unwrap();
        let t = &parsed.table;
        assert_eq!(t.countries, vec!["AA"]);
        assert_eq!(t.sectors, vec!["S1"]);
        assert_eq!(t.output(0, 0), 10.0);
        assert_eq!(t.inputs(0, 0), 10.0);
        assert_eq!(t.fd(0, 0, 0, FdCategory::Household), 10.0);
        assert_eq!(t.va_total(0, 0), Some(10.0));
    }

    #[test]
    fn round_trip_is_cell_exact() {
        let parsed = parse_figaro_csv(TINY, DEFAULT_BALANCE_TOL).unwrap();
        let emitted = emit_figaro_csv(&parsed.table);
        assert_eq!(emitted, TINY);
        let reparsed = parse_figaro_csv(&emitted, DEFAULT_BALANCE_TOL).unwrap();
        assert_eq!(parsed.table, reparsed.table);
    }

    #[test]
    fn rejects_bad_labels_and_ragged_rows() {
        let bad_label = "rowLabels,AAA_S1\nAAA_S1,0\n";
        assert!(matches!(
            parse_figaro_csv(bad_label, DEFAULT_BALANCE_TOL),
            Err(TableError::BadLabel(_))
        ));
        let ragged = "rowLabels,AA_S1,AA_P3_S14\nAA_S1,0\nW2_B1G,0,0\n";
        assert!(matches!(
            parse_figaro_csv(ragged, DEFAULT_BALANCE_TOL),
            Err(TableError::RaggedRow { .. })
        ));
        let bad_number = "rowLabels,AA_S1,AA_P3_S14\nAA_S1,0,x10\nW2_B1G,10,0\n";
        match parse_figaro_csv(bad_number, DEFAULT_BALANCE_TOL) {
            Err(TableError::BadNumber { row, col, .. }) => {
                assert_eq!(row, "AA_S1");
                assert_eq!(col, "AA_P3_S14");
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
