//! Table-layer oracles: the six-sector reference document, extraction
//! aggregation identities, scaling arithmetic, and round trips.

use deployers::agents::allocate_budget;
use deployers::tables::{
    emit_figaro_csv, emit_sam, extract_country_sam, parse_figaro_csv, parse_sam, scale_to_agents,
    synthetic_icio, AccountKind, CountrySamSpec, LaborShareRule, ScaleOptions, TableError,
    TradeMode, DEFAULT_BALANCE_TOL,
};

fn mcaesp08_text() -> String {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/mcaesp08.sam");
    std::fs::read_to_string(path).expect("reference SAM fixture")
}

#[test]
fn mcaesp08_parses_to_sixteen_balanced_accounts() {
    let parsed = parse_sam(&mcaesp08_text(), DEFAULT_BALANCE_TOL).unwrap();
    let t = &parsed.table;
    assert_eq!(t.n(), 16);
    assert_eq!(t.name, "MCAESP08");
    assert_eq!(t.region, "SPAIN");
    assert_eq!(t.year, Some(2008));
    assert_eq!(t.population, 4_000_000);
    assert_eq!(t.active_population, 2_000_000);
    assert_eq!(t.unit_scale, 100_000.0);

    // Agriculture receives 24972 from the industry column and its column
    // sums to the printed 48021.
    let p01 = t.account_index("P01_AgroPesc").unwrap();
    let p03 = t.account_index("P03_Indust").unwrap();
    assert_eq!(t.flow(p01, p03), 24_972.0);
    assert_eq!(t.col_sum(p01), 48_021.0);

    // Independent column summation of the energy column entries.
    let p02 = t.account_index("P02_EnerPetro").unwrap();
    let mut energy_inputs = 0.0;
    for r in 0..t.n() {
        energy_inputs += t.flow(r, p02);
    }
    assert_eq!(energy_inputs, 117_166.0);

    // Body row sums equal column sums exactly for every account.
    for i in 0..t.n() {
        assert_eq!(t.row_sum(i), t.col_sum(i), "account {}", t.accounts[i].code);
    }

    // The printed P05 rowSUM carries a transposed digit: warned, not fatal.
    assert!((parsed.max_declared_rel_err - 90.0 / 1_020_327.0).abs() < 1e-9);
    assert!(parsed.warnings.iter().any(|w| w.contains("P05_ServVenta")));
}

#[test]
fn mcaesp08_round_trip_is_byte_exact() {
    let text = mcaesp08_text();
    let parsed = parse_sam(&text, DEFAULT_BALANCE_TOL).unwrap();
    assert_eq!(emit_sam(&parsed.table), text);
}

#[test]
fn mcaesp08_scaling_examples() {
    let table = parse_sam(&mcaesp08_text(), DEFAULT_BALANCE_TOL).unwrap().table;
    let targets =
        scale_to_agents(&table, &ScaleOptions { n_active: 2000, min_viable: 200 }).unwrap();
    // f = 2000 / 2,000,000.
    assert_eq!(targets.factor, 0.001);

    // Input coefficient of industry inputs into the agriculture column.
    let p01 = table.account_index("P01_AgroPesc").unwrap();
    let p03 = table.account_index("P03_Indust").unwrap();
    assert!((targets.coeff(p03, p01) - 8616.0 / 48021.0).abs() < 1e-12);
    assert!((targets.coeff(p03, p01) - 0.17942).abs() < 1e-5);

    // Identity scaling leaves targets at the table's own level.
    let identity = scale_to_agents(
        &table,
        &ScaleOptions { n_active: 2_000_000, min_viable: 200 },
    )
    .unwrap();
    assert_eq!(identity.factor, 1.0);
    assert_eq!(identity.annual(p03, p01), 8616.0 * table.unit_scale * 100.0);

    // Homogeneity of degree one: doubling agents doubles every target.
    let double =
        scale_to_agents(&table, &ScaleOptions { n_active: 4000, min_viable: 200 }).unwrap();
    for i in 0..targets.annual_cents.len() {
        assert_eq!(double.annual_cents[i], 2.0 * targets.annual_cents[i]);
    }

    // Producer column coefficients sum to one once value added and taxes are
    // included.
    for c in table.indices_of_kind(AccountKind::Producer) {
        let total: f64 = (0..table.n()).map(|r| targets.coeff(r, c)).sum();
        assert!((total - 1.0).abs() < 1e-9, "column {}", table.accounts[c].code);
    }
}

#[test]
fn household_goods_shares_match_column_proportions() {
    let table = parse_sam(&mcaesp08_text(), DEFAULT_BALANCE_TOL).unwrap().table;
    let h16 = table.account_index("H16_Households").unwrap();
    let producers = table.indices_of_kind(AccountKind::Producer);
    let goods_total: f64 = producers.iter().map(|&r| table.flow(r, h16)).sum();
    assert_eq!(goods_total, 589_885.0);

    // With uniform prices the logit allocation reproduces the SAM shares:
    // services take 438851 / 589885 of goods spending.
    let shares: Vec<f64> = producers.iter().map(|&r| table.flow(r, h16) / goods_total).collect();
    let rel_prices = vec![1.0; shares.len()];
    let budget = 10_000_000;
    let parts = allocate_budget(budget, &shares, &rel_prices, 1.0).unwrap();
    let p05 = producers
        .iter()
        .position(|&r| table.accounts[r].code == "P05_ServVenta")
        .unwrap();
    let share = parts[p05] as f64 / budget as f64;
    assert!((share - 438_851.0 / 589_885.0).abs() < 1e-6);
    assert!((share - 0.744).abs() < 1e-3);
}

#[test]
fn zero_column_with_flows_is_rejected() {
    // A producer column with entries that cancel to a zero sum cannot yield
    // input coefficients.
    use deployers::tables::{AccountId, SamTable};
    let accounts = vec![
        AccountId::new("P01_A").unwrap(),
        AccountId::new("T02_TaxProducts").unwrap(),
        AccountId::new("T03_TaxProducts").unwrap(),
    ];
    let mut flows = vec![0.0; 9];
    flows[1 * 3 + 0] = 10.0; // T02 taxes the producer column
    flows[2 * 3 + 0] = -10.0; // T03 subsidizes it back
    let table = SamTable {
        name: "BAD".into(),
        region: String::new(),
        year: None,
        population: 0,
        active_population: 1000,
        init_unemployment_pct: 0.0,
        unit_scale: 1.0,
        accounts,
        flows,
        declared_row_sums: None,
        declared_col_sums: None,
        extra_metadata: Vec::new(),
        delimiter: '\t',
    };
    let err =
        scale_to_agents(&table, &ScaleOptions { n_active: 1000, min_viable: 200 }).unwrap_err();
    assert!(matches!(err, TableError::ZeroColumn(_)));
}

#[test]
fn synthetic_icio_round_trips_cell_exact() {
    let icio = synthetic_icio(&["ES", "PT"], &["S1", "S2"]);
    let text = emit_figaro_csv(&icio);
    let parsed = parse_figaro_csv(&text, DEFAULT_BALANCE_TOL).unwrap();
    assert_eq!(parsed.table, icio);
    assert_eq!(emit_figaro_csv(&parsed.table), text);
}

#[test]
fn full_figaro_scale_parses() {
    // 46 countries x 64 sectors: 2944 sector rows plus final-demand columns.
    let countries: Vec<String> = (0..46).map(|i| format!("C{}", (b'A' + (i / 26)) as char))
        .zip(0..46)
        .map(|(_, i)| format!("{}{}", (b'A' + (i / 26) as u8) as char, (b'A' + (i % 26) as u8) as char))
        .collect();
    let country_refs: Vec<&str> = countries.iter().map(|s| s.as_str()).collect();
    let sectors: Vec<String> = (1..=64).map(|i| format!("S{:02}", i)).collect();
    let sector_refs: Vec<&str> = sectors.iter().map(|s| s.as_str()).collect();
    let icio = synthetic_icio(&country_refs, &sector_refs);
    let text = emit_figaro_csv(&icio);
    let parsed = parse_figaro_csv(&text, DEFAULT_BALANCE_TOL).unwrap().table;
    assert_eq!(parsed.countries.len(), 46);
    assert_eq!(parsed.sectors.len(), 64);
    let sector_rows = parsed
        .row_headers
        .iter()
        .filter(|h| matches!(h, deployers::tables::RowHeader::Sector(..)))
        .count();
    assert_eq!(sector_rows, 46 * 64);
}

#[test]
fn aggregated_extraction_equals_summed_disaggregated() {
    let icio = synthetic_icio(&["ES", "PT", "FR"], &["S1", "S2", "S3"]);
    let agg = extract_country_sam(
        &icio,
        &CountrySamSpec::new("ES").with_partner("PT", TradeMode::Aggregated),
        &LaborShareRule::default(),
    )
    .unwrap();
    let dis = extract_country_sam(
        &icio,
        &CountrySamSpec::new("ES").with_partner("PT", TradeMode::Disaggregated),
        &LaborShareRule::default(),
    )
    .unwrap();

    let xa = agg.account_index("X05_PT").unwrap();
    let dis_rows: Vec<usize> = dis
        .accounts
        .iter()
        .enumerate()
        .filter(|(_, a)| a.code.contains("_PT_"))
        .map(|(i, _)| i)
        .collect();
    assert_eq!(dis_rows.len(), 3);

    // The aggregated import row equals the column-wise sum of the
    // disaggregated import rows, exactly; same for the export column.
    for col in 0..4 {
        let summed: f64 = dis_rows.iter().map(|&r| dis.flow(r, col)).sum();
        assert_eq!(agg.flow(xa, col), summed, "import col {col}");
    }
    for row in 0..4 {
        let summed: f64 = dis_rows.iter().map(|&c| dis.flow(row, c)).sum();
        assert_eq!(agg.flow(row, xa), summed, "export row {row}");
    }
    // Totals agree too (transfer balancing cells included).
    let agg_row: f64 = (0..agg.n()).map(|c| agg.flow(xa, c)).sum();
    let dis_total: f64 =
        dis_rows.iter().map(|&r| (0..dis.n()).map(|c| dis.flow(r, c)).sum::<f64>()).sum();
    assert_eq!(agg_row, dis_total);
}

#[test]
fn zero_partner_extraction_folds_everything_into_residual() {
    let icio = synthetic_icio(&["ES", "PT", "FR"], &["S1", "S2"]);
    let sam = extract_country_sam(&icio, &CountrySamSpec::new("ES"), &LaborShareRule::default())
        .unwrap();
    // Accounts: 2 producers, GFCF, RoW, L, K, T, G, H.
    assert_eq!(sam.n(), 9);
    let row_acct = sam.account_index("X04_RoW").unwrap();

    // RoW import-row entries equal the quantized sum of all foreign blocks.
    let es = icio.country_index("ES").unwrap();
    for sd in 0..2 {
        let mut expected = 0i64;
        for co in [icio.country_index("PT").unwrap(), icio.country_index("FR").unwrap()] {
            for so in 0..2 {
                expected += (icio.z(co, so, es, sd) * 100.0).round() as i64;
            }
        }
        assert_eq!(sam.flow(row_acct, sd), expected as f64);
    }
    sam.validate(DEFAULT_BALANCE_TOL).unwrap();
}

#[test]
fn disaggregated_partner_shapes_accounts() {
    let icio = synthetic_icio(&["FR", "ES", "DE"], &["S1", "S2"]);
    let sam = extract_country_sam(
        &icio,
        &CountrySamSpec::new("FR").with_partner("ES", TradeMode::Disaggregated),
        &LaborShareRule::default(),
    )
    .unwrap();
    // 2 domestic producers + GFCF + 2 ES accounts + RoW + 5 institutional.
    assert_eq!(sam.n(), 11);
    assert!(sam.account_index("X04_ES_S1").is_some());
    assert!(sam.account_index("X05_ES_S2").is_some());
    let x = sam.account_index("X04_ES_S1").unwrap();
    assert_eq!(sam.accounts[x].kind, AccountKind::ExternalSector);
    // Imports from ES sector S1 into FR production sit on that row.
    let fr = icio.country_index("FR").unwrap();
    let es = icio.country_index("ES").unwrap();
    assert_eq!(sam.flow(x, 0), (icio.z(es, 0, fr, 0) * 100.0).round());
}

#[test]
fn unknown_partner_is_rejected() {
    let icio = synthetic_icio(&["ES", "PT"], &["S1"]);
    let err = extract_country_sam(
        &icio,
        &CountrySamSpec::new("ES").with_partner("XX", TradeMode::Aggregated),
        &LaborShareRule::default(),
    )
    .unwrap_err();
    assert!(matches!(err, TableError::UnknownCountry(_)));
}

#[test]
fn split_value_added_cases() {
    use deployers::tables::split_value_added;
    let rule = LaborShareRule::default();
    assert_eq!(split_value_added(100.0, &rule, "S1").unwrap(), (50.0, 50.0));
    assert_eq!(split_value_added(0.0, &rule, "S1").unwrap(), (0.0, 0.0));
    let lopsided = LaborShareRule { default_share: 0.3, per_sector: vec![("S2".into(), 0.9)] };
    let (l, k) = split_value_added(10.0, &lopsided, "S2").unwrap();
    assert_eq!(l + k, 10.0);
    assert!((l - 9.0).abs() < 1e-12);
    let bad = LaborShareRule { default_share: 1.5, per_sector: vec![] };
    assert!(matches!(
        split_value_added(10.0, &bad, "S1"),
        Err(TableError::BadLaborShare { .. })
    ));
}
