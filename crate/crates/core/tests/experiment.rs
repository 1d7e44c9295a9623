use bergman_core::experiment::commands::{oneweight_norm, proj_apply, TestFunction};
use bergman_core::experiment::{
    exit_code, list_catalog, resolve_measure, run_and_write, run_suite, write_csv,
    ExperimentConfig, EXIT_BUDGET, EXIT_CONFIG, EXIT_UNRESOLVED, SUITES,
};
use bergman_core::operators::OperatorKind;
use bergman_core::Error;

fn config(suite: &str) -> ExperimentConfig {
    ExperimentConfig {
        suite: suite.into(),
        timestamp: false,
        ..Default::default()
    }
}

#[test]
fn toml_round_trip_and_rejection() {
    let cfg = ExperimentConfig::from_toml(
        "suite = \"maximal\"\nseed = 3\ndepth = 5\nweight = { kind = \"power\", eta = 0.25 }\n",
    )
    .unwrap();
    assert_eq!(cfg.suite, "maximal");
    assert_eq!((cfg.seed, cfg.depth, cfg.p), (3, Some(5), 2.0));
    let text = toml::to_string(&cfg).unwrap();
    assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);

    assert!(matches!(ExperimentConfig::from_toml("colour = 1"), Err(Error::Config(_))));
    assert!(matches!(ExperimentConfig::from_toml("seed = \"x\""), Err(Error::Config(_))));
}

#[test]
fn validation_errors_map_to_exit_codes() {
    let check = |cfg: ExperimentConfig| exit_code(&cfg.validate().unwrap_err());
    assert_eq!(check(config("no-such-suite")), EXIT_CONFIG);
    assert_eq!(check(ExperimentConfig { p: 1.0, ..config("czd") }), EXIT_CONFIG);
    assert_eq!(check(ExperimentConfig { depth: Some(13), ..config("czd") }), EXIT_CONFIG);
    assert_eq!(check(ExperimentConfig { gamma: 0.5, ..config("czd") }), EXIT_CONFIG);
    assert_eq!(check(ExperimentConfig { nu: "nowhere".into(), ..config("czd") }), EXIT_UNRESOLVED);

    let huge = ExperimentConfig { depth: Some(12), j0: 30, ..config("oneweight") };
    let err = oneweight_norm(&huge, 0.5).unwrap_err();
    assert_eq!(exit_code(&err), EXIT_BUDGET);
}

#[test]
fn measure_references() {
    let leb = resolve_measure("lebesgue").unwrap();
    assert!((leb.moment(1.0) - 0.5).abs() < 1e-12);
    let std1 = resolve_measure("standard:1").unwrap();
    assert!((std1.tail(0.5) - 5.0 / 12.0).abs() < 1e-9);
    let mix = resolve_measure("lebesgue + atom:0.5@2").unwrap();
    assert!((mix.moment(0.0) - 3.0).abs() < 1e-12);
    assert!(resolve_measure("from-nu:lebesgue").is_ok());
    for bad in ["", "atom:x", "standard:-1", "lebesgue+standard:1", "unknown"] {
        assert!(matches!(resolve_measure(bad), Err(Error::UnresolvedReference(_))), "{bad}");
    }
}

#[test]
fn test_function_syntax() {
    assert_eq!("one".parse::<TestFunction>().unwrap(), TestFunction::One);
    assert_eq!("z^3".parse::<TestFunction>().unwrap(), TestFunction::Monomial(3));
    assert_eq!("spike:7".parse::<TestFunction>().unwrap(), TestFunction::Spike(7));
    assert_eq!("random:2".parse::<TestFunction>().unwrap(), TestFunction::Random(2));
    assert!("z^x".parse::<TestFunction>().is_err());
}

#[test]
fn catalog_lists_everything() {
    let cat = list_catalog();
    for word in ["lebesgue", "example-1", "power(eta)"] {
        assert!(cat.contains(word), "{word}");
    }
    for s in SUITES {
        assert!(cat.contains(s), "{s}");
    }
}

#[test]
fn identities_suite_writes_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        out: dir.path().to_path_buf(),
        svg: true,
        ..config("kernel-identities")
    };
    let (report, path) = run_and_write(&cfg).unwrap();
    assert!(report.rows.len() >= 3);
    assert!(report.passed());
    let first = std::fs::read(&path).unwrap();
    run_and_write(&cfg).unwrap();
    assert_eq!(first, std::fs::read(&path).unwrap());
    assert!(dir.path().join("kernel-identities.svg").exists());
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("suite,case,quantity,depth,value,bound,relation,pass,runtime_ms\n"));
    assert!(!text.contains(",-0.0"));

    let stamped = write_csv(&report, true).unwrap();
    assert!(stamped.starts_with("# generated at unix time"));
}

#[test]
fn projection_commands_report_rows() {
    let cfg = ExperimentConfig { depth: Some(5), ..config("kernel-identities") };
    let r = proj_apply(&cfg, OperatorKind::Bergman, TestFunction::Monomial(2)).unwrap();
    assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    assert_eq!(r.suite, "proj-apply");
    let r = oneweight_norm(&cfg, 0.5).unwrap();
    assert!(r.rows.iter().any(|row| row.quantity == "B characteristic"), "{:?}", r.rows);
}

#[test]
fn suite_runs_are_seed_deterministic() {
    let a = run_suite(&ExperimentConfig { seed: 11, ..config("czd") }).unwrap();
    let b = run_suite(&ExperimentConfig { seed: 11, ..config("czd") }).unwrap();
    let strip = |r: &bergman_core::experiment::SuiteReport| {
        r.rows.iter().map(|x| (x.case.clone(), x.value.to_bits())).collect::<Vec<_>>()
    };
    assert_eq!(strip(&a), strip(&b));
}
