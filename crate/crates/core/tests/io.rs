use std::io::Cursor;
use std::path::PathBuf;

use chns::io::{
    emit_config, parse_config, read_snapshot, timeseries_text, write_snapshot, write_timeseries, RunConfig, Snapshot,
    TimeSeriesRecord, TIMESERIES_HEADER,
};
use chns::scenarios::{init_accuracy_test, Scenario};
use chns::scheme::Stepper;
use chns::{BcSpec, Error, Grid, Order};

fn stepped_state() -> chns::SimState {
    let g = Grid::new(8, 8, 1.0, 1.0, BcSpec::PERIODIC).unwrap();
    let mut st = init_accuracy_test(&Grid::new(8, 8, 6.0, 6.0, BcSpec::PERIODIC).unwrap()).unwrap();
    st.grid = g;
    let p = Scenario::by_name("accuracy_test").unwrap().params;
    let scheme = chns::SchemeConfig::new(Order::Second, 1e-3, &p).unwrap();
    let (next, _) = Stepper::new(&st.grid, p, scheme).unwrap().advance(&st).unwrap();
    next
}

#[test]
fn snapshot_round_trip_is_bit_exact() {
    let st = stepped_state();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.snap");
    write_snapshot(&path, &st).unwrap();
    let snap = read_snapshot(&path).unwrap();
    assert_eq!(snap, Snapshot::of_state(&st));
    assert_eq!((snap.nx, snap.ny, snap.step), (8, 8, 1));
    assert_eq!(snap.time.to_bits(), st.time.to_bits());
    for (name, want) in [("phi", &st.phi.data), ("mu", &st.mu.data), ("p", &st.p.data), ("u", &st.vel.u), ("v", &st.vel.v)] {
        let got = snap.field(name).unwrap();
        assert!(got.iter().zip(want.iter()).all(|(a, b)| a.to_bits() == b.to_bits()), "{name}");
    }
    assert!(snap.field("w").is_none());
}

#[test]
fn truncated_or_foreign_snapshots_are_rejected() {
    let bytes = Snapshot::of_state(&stepped_state()).to_bytes();
    let cut = &bytes[..bytes.len() - 3];
    assert!(matches!(Snapshot::from_reader(Cursor::new(cut)), Err(Error::Format(_))));
    assert!(matches!(Snapshot::from_reader(Cursor::new(b"hello\nend\n")), Err(Error::Format(_))));
    assert!(matches!(Snapshot::from_reader(Cursor::new(b"chns-snapshot 1\n")), Err(Error::Format(_))));
}

#[test]
fn empty_time_series_is_the_header() {
    assert_eq!(timeseries_text(&[]), format!("{TIMESERIES_HEADER}\n"));
    assert_eq!(TIMESERIES_HEADER.split(',').count(), 16);
}

#[test]
fn time_series_values_read_back_exactly() {
    let rec = TimeSeriesRecord {
        step: 12,
        time: 0.1 + 0.2,
        original_energy: -1.0 / 3.0,
        modified_energy: 500.000_000_000_000_1,
        volume: std::f64::consts::PI,
        sav: [1.0, 1.0 - 1e-12, 1.0 + f64::EPSILON, 0.75, 1e-300],
        y_c: None,
        v_c: Some(-2.5e-7),
        iters_ch: 3,
        iters_momentum: 40,
        iters_poisson: 0,
        wall_time: 0.125,
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ts.csv");
    write_timeseries(&path, &[rec.clone(), rec.clone()]).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], TIMESERIES_HEADER);
    let cols: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cols.len(), 16);
    assert_eq!(cols[0], "12");
    assert_eq!(cols[1].parse::<f64>().unwrap().to_bits(), rec.time.to_bits());
    assert_eq!(cols[2].parse::<f64>().unwrap().to_bits(), rec.original_energy.to_bits());
    assert_eq!(cols[3].parse::<f64>().unwrap().to_bits(), rec.modified_energy.to_bits());
    for k in 0..5 {
        assert_eq!(cols[5 + k].parse::<f64>().unwrap().to_bits(), rec.sav[k].to_bits());
    }
    assert_eq!(cols[10], "");
    assert_eq!(cols[11].parse::<f64>().unwrap(), -2.5e-7);
    assert_eq!(&cols[12..15], ["3", "40", "0"]);
}

#[test]
fn io_errors_name_the_path() {
    let path = PathBuf::from("/nonexistent-dir/inner/ts.csv");
    match write_timeseries(&path, &[]) {
        Err(e @ Error::Io { .. }) => assert!(e.to_string().contains("/nonexistent-dir/inner/ts.csv")),
        other => panic!("{other:?}"),
    }
    match read_snapshot(&PathBuf::from("/nonexistent-dir/x.snap")) {
        Err(e @ Error::Io { .. }) => assert!(e.to_string().contains("x.snap")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn config_overrides_and_defaults() {
    let text = r#"
scenario = "bubble_case1"

[overrides]
dt = 2e-4
order = 1
alpha = 1.0
grid = [32, 64]
t_end = 0.5
cadence = 7
tol_momentum = 1e-8
out = "somewhere"
"#;
    let cfg = parse_config(text).unwrap();
    let r = cfg.resolve().unwrap();
    assert_eq!(r.scheme.dt, 2e-4);
    assert_eq!(r.scheme.order, Order::First);
    assert_eq!(r.scenario.params.alpha, 1.0);
    assert_eq!((r.scenario.grid.nx, r.scenario.grid.ny), (32, 64));
    assert_eq!(r.scenario.n_steps(), 2500);
    assert_eq!(r.scenario.cadence, 7);
    assert_eq!(r.scheme.tol.momentum, 1e-8);
    assert_eq!(r.out, PathBuf::from("somewhere"));
    assert_eq!(parse_config(&emit_config(&cfg).unwrap()).unwrap(), cfg);

    let plain = RunConfig::for_scenario("rayleigh_taylor").resolve().unwrap();
    assert_eq!(plain.out, PathBuf::from("out/rayleigh_taylor"));
    assert_eq!(plain.scenario, Scenario::by_name("rayleigh_taylor").unwrap());
}

#[test]
fn bad_configs_are_rejected() {
    for text in [
        "scenario = \"nope\"",
        "scenario = \"accuracy_test\"\nextra = 1",
        "scenario = \"accuracy_test\"\n[overrides]\norder = 3",
        "scenario = \"accuracy_test\"\n[overrides]\ndt = 0.0",
        "scenario = \"accuracy_test\"\n[overrides]\nalpha = -1.0",
        "scenario = \"accuracy_test\"\n[overrides]\ngrid = [0, 8]",
        "scenario = \"accuracy_test\"\n[overrides]\ncadence = 0",
        "scenario = \"accuracy_test\"\n[overrides]\ncolour = \"red\"",
        "[overrides]\ndt = 1e-3",
    ] {
        assert!(parse_config(text).is_err(), "{text}");
    }
}
