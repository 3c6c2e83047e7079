use adcmodel::dataset::{dominates, parse_corpus, ColumnMapping};
use adcmodel::{pareto_filter, scale_to_node, AdcRecord, Corpus, NodeScaling};
use proptest::prelude::*;

fn rec(id: &str, energy: f64, area: f64, thr: f64, enob: f64) -> AdcRecord {
    AdcRecord {
        id: id.into(),
        tech_nm: 65.0,
        enob,
        throughput_sps: thr,
        energy_pj: energy,
        area_um2: Some(area),
    }
}

/// Pairwise strict domination, written out axis by axis.
fn brute_force_front(records: &[AdcRecord]) -> Vec<String> {
    let beats = |a: &AdcRecord, b: &AdcRecord| {
        let (ea, aa) = (a.energy_pj, a.area_um2.unwrap());
        let (eb, ab) = (b.energy_pj, b.area_um2.unwrap());
        let no_worse =
            ea <= eb && aa <= ab && a.throughput_sps >= b.throughput_sps && a.enob >= b.enob;
        let better = ea < eb || aa < ab || a.throughput_sps > b.throughput_sps || a.enob > b.enob;
        no_worse && better
    };
    records
        .iter()
        .filter(|r| !records.iter().any(|o| beats(o, r)))
        .map(|r| r.id.clone())
        .collect()
}

#[test]
fn known_four_point_front() {
    // Same throughput and ENOB; trade energy against area. p0..p3 form the
    // front, d* sit strictly behind one of them.
    let records = vec![
        rec("p0", 1.0, 8.0, 1e8, 8.0),
        rec("d0", 1.5, 9.0, 1e8, 8.0),
        rec("p1", 2.0, 4.0, 1e8, 8.0),
        rec("d1", 2.5, 4.0, 1e8, 8.0),
        rec("p2", 4.0, 2.0, 1e8, 8.0),
        rec("d2", 4.0, 2.0, 5e7, 8.0),
        rec("p3", 8.0, 1.0, 1e8, 8.0),
        rec("d3", 8.0, 1.0, 1e8, 7.0),
        rec("d4", 9.0, 9.0, 1e7, 6.0),
        rec("d5", 3.0, 5.0, 1e8, 8.0),
    ];
    let expected = brute_force_front(&records);
    assert_eq!(expected, vec!["p0", "p1", "p2", "p3"]);
    let kept = pareto_filter(&Corpus::from_records(records).unwrap(), 1.0).unwrap();
    let ids: Vec<_> = kept.iter().map(|r| r.id.clone()).collect();
    assert_eq!(ids, expected);
}

prop_compose! {
    fn record(i: usize)(
        tech in prop::sample::select(vec![16.0, 28.0, 40.0, 65.0, 130.0]),
        enob in 1.0f64..16.0,
        log_thr in 3.0f64..11.0,
        log_e in -2.0f64..3.0,
        log_a in prop::option::of(2.0f64..6.0),
    ) -> AdcRecord {
        AdcRecord {
            id: format!("r{i}"),
            tech_nm: tech,
            enob,
            throughput_sps: 10f64.powf(log_thr),
            energy_pj: 10f64.powf(log_e),
            area_um2: log_a.map(|a| 10f64.powf(a)),
        }
    }
}

fn corpus_strategy() -> impl Strategy<Value = Corpus> {
    (1usize..40).prop_flat_map(|n| {
        (0..n)
            .map(record)
            .collect::<Vec<_>>()
            .prop_map(|rs| Corpus::from_records(rs).unwrap())
    })
}

proptest! {
    #[test]
    fn scaling_round_trip(r in record(0), target in 3.0f64..500.0, pe in 0.0f64..2.0, pa in 0.0f64..2.0) {
        let s = NodeScaling { energy_exponent: pe, area_exponent: pa };
        let back = scale_to_node(&scale_to_node(&r, target, s).unwrap(), r.tech_nm, s).unwrap();
        prop_assert_eq!(back.tech_nm, r.tech_nm);
        prop_assert!((back.energy_pj / r.energy_pj - 1.0).abs() < 1e-12);
        if let (Some(a), Some(b)) = (back.area_um2, r.area_um2) {
            prop_assert!((a / b - 1.0).abs() < 1e-12);
        }
        prop_assert_eq!(back.enob, r.enob);
        prop_assert_eq!(back.throughput_sps, r.throughput_sps);
    }

    #[test]
    fn pareto_idempotent_and_non_empty(c in corpus_strategy(), slack in 1.0f64..3.0) {
        let once = pareto_filter(&c, slack).unwrap();
        prop_assert!(!once.is_empty());
        prop_assert_eq!(pareto_filter(&once, slack).unwrap(), once.clone());
        // Survivors really are undominated within the full corpus.
        for r in once.iter() {
            prop_assert!(!c.iter().any(|o| dominates(o, r, slack)));
        }
    }

    #[test]
    fn rows_are_kept_or_diagnosed(
        rows in prop::collection::vec((0usize..4, -2.0f64..20.0, -1.0f64..3.0), 1..40)
    ) {
        let mut text = String::from("id,tech_nm,enob,throughput_sps,energy_pj,area_um2\n");
        for (i, (dup, enob, log_e)) in rows.iter().enumerate() {
            let id = if *dup == 0 && i > 0 { "r0".to_string() } else { format!("r{i}") };
            let energy = if *log_e < 0.0 { -1.0 } else { 10f64.powf(*log_e) };
            text.push_str(&format!("{id},65,{enob},1e8,{energy},\n"));
        }
        match parse_corpus(&text, "p", &ColumnMapping::default()) {
            Ok(report) => {
                prop_assert_eq!(report.corpus.len() + report.diagnostics.len(), rows.len());
                for r in report.corpus.iter() {
                    prop_assert!(r.check().is_ok());
                }
            }
            Err(adcmodel::Error::EmptyCorpus(_)) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}
