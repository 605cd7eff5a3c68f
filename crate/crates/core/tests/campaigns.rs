use skewcomm::classifier::CaseLabel;
use skewcomm::harness::{
    check_instance, emit_report, enumerate_instances, render_report, run_campaign, CampaignConfig,
    EvalOptions, InstanceFile, RecordState, Report, ReportFormat,
};

#[test]
fn restricted_instance_counts() {
    for (ring, expected) in [("Z4", 1), ("Z8", 3), ("Z5", 1)] {
        let inst = enumerate_instances(&CampaignConfig::restricted(&["C2"], &[ring])).unwrap();
        assert_eq!(inst.len(), expected, "C2 over {ring}");
    }
    let z5 = enumerate_instances(&CampaignConfig::restricted(&["C2"], &["Z5"])).unwrap();
    let ring = z5[0].ctx.ring();
    assert_eq!(z5[0].ctx.sigma(1), ring.neg_one());
}

#[test]
fn quaternion_campaign() {
    let report = run_campaign(&CampaignConfig::restricted(&["Q8"], &["Z4", "Z4xZ4"])).unwrap();
    assert!(report.passed());
    let has = |case: CaseLabel, classic: bool, via_classic: bool| {
        report.records.iter().any(|r| {
            r.oracle.as_ref().is_some_and(|o| o.anticommutative)
                && r.classic == classic
                && if via_classic {
                    r.classic_criterion.as_ref().is_some_and(|c| c.case == case)
                } else {
                    r.general.as_ref().is_some_and(|g| g.case == case)
                }
        })
    };
    assert!(has(CaseLabel::ClassicSlc, true, true));
    assert!(has(CaseLabel::CommutatorShift, false, false));
}

#[test]
fn fail_fast_truncates_deterministically() {
    let cfg = CampaignConfig {
        fail_fast: true,
        ..CampaignConfig::restricted(&["C2", "C4"], &["Z8xZ3"])
    };
    let a = run_campaign(&cfg).unwrap();
    let b = run_campaign(&CampaignConfig {
        parallel_workers: 1,
        ..cfg.clone()
    })
    .unwrap();
    assert_eq!(a, b);
    let last = a.records.last().unwrap();
    assert!(last.is_failure());
    assert_eq!(a.records.iter().filter(|r| r.is_failure()).count(), 1);
}

#[test]
fn reports_round_trip_and_are_stable() {
    let cfg = CampaignConfig::restricted(&["C4", "D4"], &["Z4", "Z8"]);
    let report = run_campaign(&cfg).unwrap();
    let json = render_report(&report, ReportFormat::Json).unwrap();
    let back: Report = serde_json::from_slice(&json).unwrap();
    assert_eq!(back, report);
    let again = run_campaign(&CampaignConfig {
        parallel_workers: 3,
        ..cfg
    })
    .unwrap();
    assert_eq!(render_report(&again, ReportFormat::Json).unwrap(), json);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    emit_report(&report, ReportFormat::Csv, &path).unwrap();
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), report.records.len() + 1);
    assert!(csv.starts_with("position,instance_id,group,"));
}

#[test]
fn single_record_report() {
    let report = run_campaign(&CampaignConfig::restricted(&["C2"], &["Z4"])).unwrap();
    let csv = render_report(&report, ReportFormat::Csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 2);
    let r = &report.records[0];
    assert_eq!(r.state, RecordState::Ok);
    assert!(!r.oracle.as_ref().unwrap().anticommutative);
}

#[test]
fn instance_file_round_trip() {
    let inst = enumerate_instances(&CampaignConfig::restricted(&["C2"], &["Z8"])).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("instance.json");
    let file = InstanceFile::from_context(&inst[0].ctx);
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    let rec = check_instance(&path, &EvalOptions::default()).unwrap();
    assert_eq!(rec.instance_id, inst[0].instance_id);
    assert_eq!(rec.sigma_digest.len(), 16);

    std::fs::write(
        &path,
        r#"{"group": {"name": "C2"}, "involution": {"perm": [0, 1]}, "ring": "Z8", "sigma": [[1], [3]]}"#,
    )
    .unwrap();
    let rec = check_instance(&path, &EvalOptions::default()).unwrap();
    assert!(rec.oracle.unwrap().anticommutative);
    assert_eq!(rec.general.unwrap().case, CaseLabel::AbelianIdentity);
}
