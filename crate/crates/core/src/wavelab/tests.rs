use super::*;

fn square() -> ProfileSpec {
    ProfileSpec::Square {
        first: 0.3,
        second: -0.3,
    }
}

fn short(mut cfg: ExperimentConfig) -> ExperimentConfig {
    cfg.times = TimeSweep::geometric(0.5, 40.0, 16);
    cfg
}

#[test]
fn fit_recovers_exact_power_law() {
    let ts: Vec<f64> = (0..12).map(|i| 2f64.powi(i)).collect();
    let vs: Vec<f64> = ts.iter().map(|t| 3.0 / t).collect();
    let fit = fit_rate(&ts, &vs).unwrap();
    assert!((fit.exponent + 1.0).abs() < 1e-10);
    assert!((fit.constant - 3.0).abs() < 1e-10);
    assert!(fit.max_residual < 1e-10);
    assert!(!fit.floored);
}

#[test]
fn fit_of_constant_is_flat() {
    let ts: Vec<f64> = (1..=10).map(|i| 1.7 * i as f64 * i as f64).collect();
    let fit = fit_rate(&ts, &[0.25; 10]).unwrap();
    assert!(fit.exponent.abs() < 1e-12);
    assert!((fit.constant - 0.25).abs() < 1e-12);
}

#[test]
fn fit_rejects_short_span_and_few_samples() {
    let ts: Vec<f64> = (0..10).map(|i| 1.0 + 0.5 * i as f64).collect();
    assert!(fit_rate(&ts, &[1.0; 10]).is_err());
    let ts = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0];
    assert!(fit_rate(&ts, &[1.0; 7]).is_err());
    assert!(fit_rate(&[1.0, 10.0], &[1.0]).is_err());
}

#[test]
fn fit_floors_zeros_and_flags_them() {
    let ts: Vec<f64> = (0..9).map(|i| 2f64.powi(i)).collect();
    let mut vs = vec![1.0; 9];
    vs[4] = 0.0;
    let fit = fit_rate(&ts, &vs).unwrap();
    assert!(fit.floored);
    assert!(fit.exponent.is_finite());
}

#[test]
fn last_decade_spans_a_decade() {
    let ts = [1.0, 3.0, 9.0, 27.0, 81.0];
    assert_eq!(last_decade_start(&ts), Some(1));
    assert_eq!(last_decade_start(&[5.0, 6.0]), None);
    assert_eq!(last_decade_start(&[]), None);
}

#[test]
fn sweep_endpoints_are_exact() {
    let ts = TimeSweep::default().samples().unwrap();
    assert_eq!(ts.len(), 48);
    assert_eq!(ts[0], 0.25);
    assert_eq!(ts[47], 256.0);
    assert!(ts.windows(2).all(|w| w[1] > w[0]));
    let lin = TimeSweep {
        spacing: Spacing::Linear,
        ..TimeSweep::geometric(1.0, 3.0, 5)
    };
    assert_eq!(lin.samples().unwrap(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
}

#[test]
fn sweep_rejects_bad_samples() {
    assert!(TimeSweep::explicit(&[1.0, 1.0]).samples().is_err());
    assert!(TimeSweep::explicit(&[0.0, 1.0]).samples().is_err());
    assert!(TimeSweep::geometric(2.0, 1.0, 8).samples().is_err());
    assert!(TimeSweep::geometric(1.0, 2.0, 1).samples().is_err());
}

#[test]
fn config_parses_documented_schema() {
    let text = r#"
flux = "burgers"
period = 1.0
ul = 1.0
ur = -1.0
delta = 1e-3
solver = "both"
output = "runs"

[profile]
kind = "pieces"
pieces = [
  { width = 0.5, value = 0.3 },
  { width = 0.5, left = -0.3, right = -0.3 },
]

[times]
values = [1.0, 5.0, 10.0]
"#;
    let cfg = ExperimentConfig::from_toml_str(text).unwrap();
    assert_eq!(cfg.solver, Solver::Both);
    assert_eq!(cfg.ul, Some(1.0));
    assert_eq!(cfg.samples().unwrap(), vec![1.0, 5.0, 10.0]);
    let w = cfg.profile().unwrap();
    assert!(w.mean().abs() < 1e-15);
    let back = ExperimentConfig::from_toml_str(&cfg.to_toml().unwrap()).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn config_defaults_and_errors() {
    let cfg = ExperimentConfig::from_toml_str("ubar = 0.5\n[profile]\nkind = \"zero\"\n").unwrap();
    assert_eq!(cfg.flux, "burgers");
    assert_eq!(cfg.delta, 1e-3);
    assert_eq!(cfg.solver, Solver::Oracle);
    assert_eq!(cfg.periodic_mean().unwrap(), 0.5);
    assert!(cfg.riemann_ic().is_err());
    for bad in [
        "delta = 0.0\n[profile]\nkind = \"zero\"\n",
        "flux = \"cubic\"\n[profile]\nkind = \"zero\"\n",
        "[profile]\nkind = \"zero\"\n[times]\nvalues = [2.0, 1.0]\n",
        "[profile]\nkind = \"pieces\"\npieces = [{ width = 0.5, value = 0.5 }]\n",
        "[profile]\nkind = \"spiral\"\n",
    ] {
        assert!(matches!(ExperimentConfig::from_toml_str(bad), Err(crate::Error::Config(_))), "{bad}");
    }
    assert!("fast".parse::<Solver>().is_err());
    assert_eq!("fronttrack".parse::<Solver>().unwrap(), Solver::Fronttrack);
    assert_eq!("svg".parse::<Format>().unwrap(), Format::Svg);
    assert!("png".parse::<Format>().is_err());
}

#[test]
fn csv_without_series_is_header_only() {
    let cfg = ExperimentConfig::riemann(1.0, -1.0, ProfileSpec::Zero);
    let report = DecayReport::new("empty", &cfg, vec![1.0, 2.0]);
    assert_eq!(to_csv(&report).unwrap(), "t\n");
}

#[test]
fn csv_leaves_undefined_cells_empty() {
    let cfg = ExperimentConfig::riemann(1.0, -1.0, ProfileSpec::Zero);
    let mut report = DecayReport::new("partial", &cfg, vec![1.0, 2.0]);
    report.series.push(Series::partial("a", vec![Some(0.5), None]));
    assert_eq!(to_csv(&report).unwrap(), "t,a\n1,0.5\n2,\n");
}

#[test]
fn trend_check_flags_growth() {
    let cfg = ExperimentConfig::riemann(1.0, -1.0, ProfileSpec::Zero);
    let ts: Vec<f64> = (0..30).map(|i| 1.2f64.powi(i)).collect();
    let mut report = DecayReport::new("trend", &cfg, ts.clone());
    report.series.push(Series::new("decay", ts.iter().map(|t| 2.0 / t).collect()));
    report.series.push(Series::new("slow", ts.iter().map(|t| t.powf(-0.5)).collect()));
    report.bounded_after("decay", 0.0, 0.0);
    report.bounded_after("slow", 0.0, 0.0);
    assert!(report.check("decay_t_bounded").unwrap().passed);
    assert!(!report.check("slow_t_bounded").unwrap().passed);
    let c = report.constants.iter().find(|c| c.0 == "decay").unwrap().1;
    assert!((c - 2.0).abs() < 1e-12);
}

#[test]
fn shock_report_has_stated_columns() {
    let report = run_shock_stability(&short(ExperimentConfig::riemann(1.0, -1.0, square()))).unwrap();
    let csv = to_csv(&report).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,X_err,sup_left,sup_right,glue_mismatch,offset_pred");
    assert_eq!(csv.lines().count(), 17);
    assert!(report.all_passed(), "{:?}", report.checks);
    assert!(report.extra.iter().any(|e| e.name == "X_err_coincidence"));
}

#[test]
fn json_round_trip_is_exact() {
    let mut cfg = short(ExperimentConfig::periodic(0.0, ProfileSpec::TwoConstant { m1: 1.0, m2: 1.0 }));
    cfg.times = TimeSweep::geometric(0.3, 30.0, 12);
    let report = run_periodic_decay(&cfg).unwrap();
    let back = read_json(&to_json(&report).unwrap()).unwrap();
    assert_eq!(back, report);
}

#[test]
fn experiments_are_deterministic() {
    let cfg = short(ExperimentConfig::riemann(1.0, -1.0, square()));
    let a = run_shock_stability(&cfg).unwrap();
    let b = run_shock_stability(&cfg).unwrap();
    assert_eq!(to_csv(&a).unwrap(), to_csv(&b).unwrap());
    assert_eq!(to_json(&a).unwrap(), to_json(&b).unwrap());
}

#[test]
fn zero_perturbation_shock_is_exact() {
    let report = run_shock_stability(&short(ExperimentConfig::riemann(1.0, -1.0, ProfileSpec::Zero))).unwrap();
    assert_eq!(report.detected_t, Some(0.0));
    for s in &report.series {
        assert!(s.values.iter().all(|v| v.unwrap().abs() < 1e-12), "{}", s.name);
    }
    assert!(report.all_passed());
}

#[test]
fn zero_perturbation_rarefaction_is_exact() {
    let report = run_rarefaction(&short(ExperimentConfig::riemann(-1.0, 1.0, ProfileSpec::Zero))).unwrap();
    let sup = report.series("sup_rarefaction").unwrap();
    assert!(sup.values.iter().all(|v| v.unwrap() < 1e-12));
    assert!(report.all_passed(), "{:?}", report.checks);
}

#[test]
fn zero_perturbation_periodic_is_exact() {
    let report = run_periodic_decay(&short(ExperimentConfig::periodic(0.5, ProfileSpec::Zero))).unwrap();
    for name in ["sup_dev", "inf_dev"] {
        assert!(report.series(name).unwrap().values.iter().all(|v| v.unwrap().abs() < 1e-12));
    }
    assert!(report.check("asymptote_5pct").is_none());
}

#[test]
fn wrong_wave_type_is_rejected() {
    assert!(run_shock_stability(&short(ExperimentConfig::riemann(-1.0, 1.0, square()))).is_err());
    assert!(run_rarefaction(&short(ExperimentConfig::riemann(1.0, -1.0, square()))).is_err());
    assert!(run_shock_stability(&short(ExperimentConfig::periodic(0.0, square()))).is_err());
}

#[test]
fn oracle_refuses_other_fluxes() {
    let mut cfg = short(ExperimentConfig::riemann(1.0, -1.0, square()));
    cfg.flux = "exp".into();
    assert!(matches!(run_shock_stability(&cfg), Err(crate::Error::Config(_))));
}

#[test]
fn two_constant_sup_is_attained() {
    let mut cfg = ExperimentConfig::periodic(0.0, ProfileSpec::TwoConstant { m1: 1.0, m2: 1.0 });
    cfg.times = TimeSweep::explicit(&[0.5, 2.0, 8.0, 32.0]);
    let report = run_periodic_decay(&cfg).unwrap();
    assert_eq!(report.detected_t, Some(1.0));
    let sup = report.series("sup_dev").unwrap();
    for (t, v) in report.times.iter().zip(&sup.values).skip(1) {
        assert!((v.unwrap() - 0.5 / t).abs() < 1e-8, "t = {t}");
    }
}

#[test]
fn svg_has_fit_and_guide() {
    let report = run_shock_stability(&short(ExperimentConfig::riemann(1.0, -1.0, ProfileSpec::Pieces {
        pieces: vec![
            PieceSpec::Constant { width: 0.3, value: 0.4 },
            PieceSpec::Constant { width: 0.7, value: -0.4 * 3.0 / 7.0 },
        ],
    })))
    .unwrap();
    let svg = to_svg(&report);
    assert!(svg.starts_with("<svg"));
    assert!(svg.trim_end().ends_with("</svg>"));
    if report.fit.is_some() {
        assert!(svg.contains("fit slope"));
        assert!(svg.contains("slope -1"));
    }
}

#[test]
fn emit_writes_each_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short(ExperimentConfig::periodic(0.0, ProfileSpec::TwoConstant { m1: 1.0, m2: 1.0 }));
    let report = run_periodic_decay(&cfg).unwrap();
    for f in Format::ALL {
        let path = emit(&report, f, dir.path()).unwrap();
        assert_eq!(path, dir.path().join(format!("periodic.{}", f.extension())));
        assert!(std::fs::metadata(&path).unwrap().len() > 0);
    }
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    assert!(matches!(emit(&report, Format::Csv, &blocker.join("sub")), Err(crate::Error::Io(_))));
}
