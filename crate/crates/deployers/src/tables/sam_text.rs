//! Parser and emitter for the SAM text layout.
//!
//! The grammar (documented in `docs/formats.md`) is:
//!
//! ```text
//! SAM_table { <name>
//! <region>  Year: <y>  Population: <p>  Active: <a>  [InitUnemp: <u>]  [extras...]  [Units: <s>]
//!           <code 1>  <code 2>  ...  <code n>  rowSUM
//! <code 1>  v11  v12  ...  v1n  <rowsum 1>
//! ...
//! <code n>  vn1  ...      vnn  <rowsum n>
//! colSUM    c1   c2   ...  cn
//! ```
//!
//! Cells are separated by a tab or a semicolon (auto-detected). Values use a
//! decimal point; thousands separators are rejected. Rows receive, columns pay.

use super::{fmt_cell, AccountId, SamTable, TableError};

/// Result of a successful parse, with non-fatal diagnostics.
#[derive(Debug, Clone)]
pub struct SamParse {
    pub table: SamTable,
    pub warnings: Vec<String>,
    /// Worst relative difference between a printed rowSUM/colSUM figure and
    /// the recomputed value.
    pub max_declared_rel_err: f64,
}

fn parse_number(text: &str, row: &str, col: &str) -> Result<f64, TableError> {
    let t = text.trim();
    if t.contains(',') {
        return Err(TableError::BadNumber { row: row.into(), col: col.into(), text: text.into() });
    }
    t.parse::<f64>()
        .map_err(|_| TableError::BadNumber { row: row.into(), col: col.into(), text: text.into() })
}

/// Parse a SAM text document.
pub fn parse_sam(text: &str, balance_tol: f64) -> Result<SamParse, TableError> {
    let delimiter = if text.contains('\t') { '\t' } else { ';' };
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());

    let header = lines.next().ok_or_else(|| TableError::MalformedHeader("empty document".into()))?;
    let header = header.trim();
    if !header.starts_with("SAM_table") {
        return Err(TableError::MalformedHeader(format!(
            "expected `SAM_table {{ <name>`, found {:?}",
            header
        )));
    }
    let name = header["SAM_table".len()..]
        .trim()
        .trim_matches(|c| c == '{' || c == '}' || c == '(' || c == ')')
        .trim()
        .to_string();
    if name.is_empty() {
        return Err(TableError::MalformedHeader("missing table name".into()));
    }

    // Metadata lines run until the account header row (first cell empty).
    let mut region = String::new();
    let mut year = None;
    let mut population = 0u64;
    let mut active_population = 0u64;
    let mut init_unemp = 0.0f64;
    let mut unit_scale = 1.0f64;
    let mut extra = Vec::new();
    let mut account_header: Option<Vec<String>> = None;
    for line in lines.by_ref() {
        let cells: Vec<&str> = line.split(delimiter).map(|c| c.trim()).collect();
        if cells[0].is_empty() && cells.iter().any(|c| !c.is_empty()) {
            account_header = Some(cells.into_iter().filter(|c| !c.is_empty()).map(String::from).collect());
            break;
        }
        for cell in cells.into_iter().filter(|c| !c.is_empty()) {
            if let Some((key, value)) = cell.split_once(':') {
                let (key, value) = (key.trim(), value.trim());
                match key {
                    "Year" => year = value.parse().ok(),
                    "Population" => {
                        population = value.parse().map_err(|_| {
                            TableError::MalformedHeader(format!("bad Population {:?}", value))
                        })?
                    }
                    "Active" => {
                        active_population = value.parse().map_err(|_| {
                            TableError::MalformedHeader(format!("bad Active {:?}", value))
                        })?
                    }
                    "InitUnemp" => {
                        init_unemp = value.parse().map_err(|_| {
                            TableError::MalformedHeader(format!("bad InitUnemp {:?}", value))
                        })?
                    }
                    "Units" => {
                        unit_scale = value.parse().map_err(|_| {
                            TableError::MalformedHeader(format!("bad Units {:?}", value))
                        })?
                    }
                    _ => extra.push((key.to_string(), value.to_string())),
                }
            } else if region.is_empty() {
                region = cell.to_string();
            } else {
                extra.push((String::new(), cell.to_string()));
            }
        }
    }
    let mut codes = account_header
        .ok_or_else(|| TableError::MalformedHeader("missing account header row".into()))?;
    let has_rowsum_col = codes.last().map(|c| c == "rowSUM").unwrap_or(false);
    if has_rowsum_col {
        codes.pop();
    }
    let n = codes.len();
    if n == 0 {
        return Err(TableError::MalformedHeader("account header row has no codes".into()));
    }
    let accounts: Vec<AccountId> =
        codes.iter().map(|c| AccountId::new(c)).collect::<Result<_, _>>()?;

    let mut flows = vec![0.0f64; n * n];
    let mut declared_row_sums = if has_rowsum_col { Some(vec![0.0f64; n]) } else { None };
    let mut declared_col_sums: Option<Vec<f64>> = None;
    let mut row_idx = 0usize;
    for line in lines {
        let cells: Vec<&str> = line.split(delimiter).map(|c| c.trim()).collect();
        let label = cells[0];
        if label == "colSUM" {
            let mut sums = Vec::with_capacity(n);
            for (c, cell) in cells[1..].iter().take(n).enumerate() {
                sums.push(parse_number(cell, "colSUM", &codes[c])?);
            }
            if sums.len() != n {
                return Err(TableError::RaggedRow {
                    row: "colSUM".into(),
                    expected: n,
                    found: sums.len(),
                });
            }
            declared_col_sums = Some(sums);
            continue;
        }
        if row_idx >= n {
            return Err(TableError::NonSquare(format!(
                "extra data row {:?} beyond {} accounts",
                label, n
            )));
        }
        if label != codes[row_idx] {
            return Err(TableError::NonSquare(format!(
                "row {} is labeled {:?}, expected {:?}",
                row_idx + 1,
                label,
                codes[row_idx]
            )));
        }
        let expected = 1 + n + usize::from(has_rowsum_col);
        // A trailing non-numeric repeat of the row label is tolerated.
        let mut data: Vec<&str> = cells.into_iter().collect();
        while data.len() > expected
            && data.last().map(|c| c.is_empty() || c.parse::<f64>().is_err()).unwrap_or(false)
        {
            data.pop();
        }
        if data.len() != expected {
            return Err(TableError::RaggedRow {
                row: label.into(),
                expected: expected - 1,
                found: data.len() - 1,
            });
        }
        for c in 0..n {
            flows[row_idx * n + c] = parse_number(data[1 + c], label, &codes[c])?;
        }
        if let Some(sums) = declared_row_sums.as_mut() {
            sums[row_idx] = parse_number(data[1 + n], label, "rowSUM")?;
        }
        row_idx += 1;
    }
    if row_idx != n {
        return Err(TableError::NonSquare(format!("{} accounts but {} data rows", n, row_idx)));
    }

    let table = SamTable {
        name,
        region,
        year,
        population,
        active_population,
        init_unemployment_pct: init_unemp,
        unit_scale,
        accounts,
        flows,
        declared_row_sums,
        declared_col_sums,
        extra_metadata: extra,
        delimiter,
    };
    table.validate(balance_tol)?;

    // Compare printed sums against recomputed ones: warn within tolerance,
    // reject beyond it.
    let mut warnings = Vec::new();
    let mut max_rel = 0.0f64;
    let mut worst: Option<(String, f64, f64, f64)> = None;
    let mut check = |what: &str, idx: usize, declared: f64, computed: f64| {
        let denom = declared.abs().max(computed.abs());
        if denom == 0.0 {
            return;
        }
        let rel = (declared - computed).abs() / denom;
        if rel > 0.0 {
            if rel > max_rel {
                max_rel = rel;
                worst = Some((
                    format!("{} {}", what, table.accounts[idx].code),
                    rel,
                    declared,
                    computed,
                ));
            }
            if rel > 1e-12 {
                warnings.push(format!(
                    "{} of {} prints {} but recomputes to {} (rel err {:.3e})",
                    what,
                    table.accounts[idx].code,
                    fmt_cell(declared),
                    fmt_cell(computed),
                    rel
                ));
            }
        }
    };
    if let Some(sums) = &table.declared_row_sums {
        for (i, &s) in sums.iter().enumerate() {
            check("rowSUM", i, s, table.row_sum(i));
        }
    }
    if let Some(sums) = &table.declared_col_sums {
        for (i, &s) in sums.iter().enumerate() {
            check("colSUM", i, s, table.col_sum(i));
        }
    }
    if max_rel > balance_tol {
        let (account, rel_err, row_sum, col_sum) = worst.unwrap();
        return Err(TableError::SumMismatch {
            account,
            rel_err,
            tol: balance_tol,
            row_sum,
            col_sum,
        });
    }

    Ok(SamParse { table, warnings, max_declared_rel_err: max_rel })
}

/// Emit a table in the canonical SAM text layout. Parsing the output yields
/// the same table cell-for-cell.
pub fn emit_sam(table: &SamTable) -> String {
    let d = table.delimiter;
    let n = table.n();
    let mut out = String::new();
    out.push_str(&format!("SAM_table {{ {}\n", table.name));

    let mut meta: Vec<String> = Vec::new();
    if !table.region.is_empty() {
        meta.push(table.region.clone());
    }
    if let Some(y) = table.year {
        meta.push(format!("Year: {}", y));
    }
    if table.population > 0 {
        meta.push(format!("Population: {}", table.population));
    }
    if table.active_population > 0 {
        meta.push(format!("Active: {}", table.active_population));
    }
    if table.init_unemployment_pct != 0.0 {
        meta.push(format!("InitUnemp: {}", fmt_cell(table.init_unemployment_pct)));
    }
    for (k, v) in &table.extra_metadata {
        if k.is_empty() {
            meta.push(v.clone());
        } else {
            meta.push(format!("{}: {}", k, v));
        }
    }
    if table.unit_scale != 1.0 {
        meta.push(format!("Units: {}", fmt_cell(table.unit_scale)));
    }
    if !meta.is_empty() {
        out.push_str(&meta.join(&d.to_string()));
        out.push('\n');
    }

    for a in &table.accounts {
        out.push(d);
        out.push_str(&a.code);
    }
    if table.declared_row_sums.is_some() {
        out.push(d);
        out.push_str("rowSUM");
    }
    out.push('\n');

    for r in 0..n {
        out.push_str(&table.accounts[r].code);
        for c in 0..n {
            out.push(d);
            out.push_str(&fmt_cell(table.flow(r, c)));
        }
        if let Some(sums) = &table.declared_row_sums {
            out.push(d);
            out.push_str(&fmt_cell(sums[r]));
        }
        out.push('\n');
    }

    let col_sums: Vec<f64> = match &table.declared_col_sums {
        Some(s) => s.clone(),
        None => (0..n).map(|c| table.col_sum(c)).collect(),
    };
    out.push_str("colSUM");
    for s in col_sums {
        out.push(d);
        out.push_str(&fmt_cell(s));
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::DEFAULT_BALANCE_TOL;

    /// Smallest balanced SAM: one producer sells 10 to households; households
    /// receive 10 as wages routed through the producer column.
    const TOY: &str = "SAM_table { TOY\nNOWHERE\tYear: 2020\n\tP01_Goods\tH02_Households\nP01_Goods\t0\t10\nH02_Households\t10\t0\ncolSUM\t10\t10\n";

    #[test]
    fn parses_toy_two_account_table() {
        let parsed = parse_sam(TOY, DEFAULT_BALANCE_TOL).unwrap();
        let t = &parsed.table;
        assert_eq!(t.n(), 2);
        assert_eq!(t.name, "TOY");
        assert_eq!(t.region, "NOWHERE");
        assert_eq!(t.year, Some(2020));
        for i in 0..2 {
            assert_eq!(t.row_sum(i), 10.0);
            assert_eq!(t.col_sum(i), 10.0);
        }
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn round_trip_is_lossless() {
        let parsed = parse_sam(TOY, DEFAULT_BALANCE_TOL).unwrap();
        let emitted = emit_sam(&parsed.table);
        let reparsed = parse_sam(&emitted, DEFAULT_BALANCE_TOL).unwrap();
        assert_eq!(parsed.table, reparsed.table);
    }

    #[test]
    fn rejects_malformed_header() {
        assert!(matches!(parse_sam("", DEFAULT_BALANCE_TOL), Err(TableError::MalformedHeader(_))));
        assert!(matches!(
            parse_sam("not a sam\n", DEFAULT_BALANCE_TOL),
            Err(TableError::MalformedHeader(_))
        ));
    }

    #[test]
    fn rejects_non_square_body() {
        let text = "SAM_table { BAD\n\tP01_A\tH02_B\nP01_A\t0\t10\ncolSUM\t10\t10\n";
        assert!(matches!(parse_sam(text, DEFAULT_BALANCE_TOL), Err(TableError::NonSquare(_))));
    }

    #[test]
    fn rejects_imbalance_beyond_tolerance() {
        let text = "SAM_table { BAD\n\tP01_A\tH02_B\nP01_A\t0\t10\nH02_B\t5\t0\ncolSUM\t5\t10\n";
        let err = parse_sam(text, DEFAULT_BALANCE_TOL).unwrap_err();
        match err {
            TableError::SumMismatch { account, rel_err, .. } => {
                assert_eq!(account, "P01_A");
                assert!(rel_err > 0.4);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_thousands_separators() {
        let text = "SAM_table { BAD\n\tP01_A\tH02_B\nP01_A\t0\t1,000\nH02_B\t1,000\t0\ncolSUM\t1000\t1000\n";
        assert!(matches!(parse_sam(text, DEFAULT_BALANCE_TOL), Err(TableError::BadNumber { .. })));
    }

    #[test]
    fn rejects_unknown_kind_prefix() {
        let text = "SAM_table { BAD\n\tQ01_A\tH02_B\nQ01_A\t0\t10\nH02_B\t10\t0\ncolSUM\t10\t10\n";
        assert!(matches!(parse_sam(text, DEFAULT_BALANCE_TOL), Err(TableError::UnknownKind(_))));
    }

    #[test]
    fn rejects_negative_producer_flow() {
        let text = "SAM_table { BAD\n\tP01_A\tH02_B\nP01_A\t0\t-10\nH02_B\t-10\t0\ncolSUM\t-10\t-10\n";
        assert!(matches!(parse_sam(text, DEFAULT_BALANCE_TOL), Err(TableError::NegativeFlow { .. })));
    }
}
