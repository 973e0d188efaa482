//! Deterministic synthetic inter-country tables for desk runs and tests.

use super::figaro::{ColHeader, IcioTable, RowHeader, ROW_LABOR, ROW_SURPLUS, ROW_TAXES};

/// Build a balanced synthetic inter-country IO table with the given country
/// and sector codes. Flows are small integers, every (country, sector) is
/// exactly balanced, and all bilateral blocks are nonzero, so the table
/// exercises extraction, aggregation and trade coupling end to end.
pub fn synthetic_icio(countries: &[&str], sectors: &[&str]) -> IcioTable {
    let nc = countries.len();
    let ns = sectors.len();
    let idx = |c: usize, s: usize| c * ns + s;
    let n = nc * ns;

    // Intermediate flows: a deterministic small-integer pattern.
    let mut z = vec![0.0f64; n * n];
    for co in 0..nc {
        for so in 0..ns {
            for cd in 0..nc {
                for sd in 0..ns {
                    let v = 1 + (co * 7 + so * 3 + cd * 5 + sd * 2) % 9;
                    // Domestic flows carry more weight than cross-border ones.
                    let v = if co == cd { (v * 10) as f64 } else { v as f64 };
                    z[idx(co, so) * n + idx(cd, sd)] = v;
                }
            }
        }
    }
    let zrow: Vec<f64> = (0..n).map(|r| z[r * n..(r + 1) * n].iter().sum()).collect();
    let zcol: Vec<f64> = (0..n).map(|c| (0..n).map(|r| z[r * n + c]).sum()).collect();

    // Value added sized so every final-demand cell stays nonnegative.
    let labor: Vec<f64> = (0..n).map(|i| zrow[i].max(1.0) * 2.0).collect();
    let surplus: Vec<f64> = (0..n).map(|i| zrow[i].max(1.0) * 2.0).collect();
    let taxes: Vec<f64> = (0..n).map(|_| 1.0).collect();
    let output: Vec<f64> = (0..n).map(|i| zcol[i] + labor[i] + surplus[i] + taxes[i]).collect();

    // Final demand per origin row: total output minus intermediate sales,
    // split across destination countries (home-biased) and categories.
    let fd_cats = ["P3_S14", "P3_S13", "P51G"];
    let mut fd = vec![0.0f64; n * nc * 3];
    for o in 0..n {
        let total = output[o] - zrow[o];
        assert!(total >= 0.0);
        let total = total as i64;
        let home = o / ns;
        let per_foreign = total / (2 * nc as i64).max(1);
        let mut left = total;
        for cd in 0..nc {
            let amount = if cd == home { 0 } else { per_foreign };
            left -= amount;
            split_categories(&mut fd, o, cd, nc, amount);
        }
        split_categories(&mut fd, o, home, nc, left);
    }

    let mut col_headers = Vec::new();
    for c in 0..nc {
        for s in 0..ns {
            let _ = (c, s);
            col_headers.push(ColHeader::Sector(c, s));
        }
    }
    for c in 0..nc {
        for cat in fd_cats {
            col_headers.push(ColHeader::FinalDemand(c, cat.to_string()));
        }
    }
    let n_cols = col_headers.len();
    let mut row_headers = Vec::new();
    let mut body = Vec::with_capacity((n + 3) * n_cols);
    for o in 0..n {
        row_headers.push(RowHeader::Sector(o / ns, o % ns));
        for d in 0..n {
            body.push(z[o * n + d]);
        }
        for cd in 0..nc {
            for cat in 0..3 {
                body.push(fd[(o * nc + cd) * 3 + cat]);
            }
        }
    }
    for (label, values) in
        [(ROW_LABOR, &labor), (ROW_SURPLUS, &surplus), (ROW_TAXES, &taxes)]
    {
        row_headers.push(RowHeader::Special(label.to_string()));
        for d in 0..n {
            body.push(values[d]);
        }
        for _ in 0..nc * 3 {
            body.push(0.0);
        }
    }

    IcioTable {
        countries: countries.iter().map(|c| c.to_string()).collect(),
        sectors: sectors.iter().map(|s| s.to_string()).collect(),
        col_headers,
        row_headers,
        body,
        corner: "rowLabels".to_string(),
    }
}

fn split_categories(fd: &mut [f64], o: usize, cd: usize, nc: usize, amount: i64) {
    let hh = amount * 6 / 10;
    let gov = amount * 2 / 10;
    let gfcf = amount - hh - gov;
    let base = (o * nc + cd) * 3;
    fd[base] += hh as f64;
    fd[base + 1] += gov as f64;
    fd[base + 2] += gfcf as f64;
}
