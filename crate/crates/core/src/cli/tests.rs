use super::*;

fn os(args: &[&str]) -> Vec<OsString> {
    args.iter().map(OsString::from).collect()
}

#[test]
fn config_fills_missing_flags_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "threads = 2\n[bounds.alpha]\nn = 100\nk = 3\n[gen.layered]\nm = 9\n").unwrap();
    let args = os(&["pcsf", "--config", cfg.to_str().unwrap(), "bounds", "alpha", "--k", "5"]);
    let out = expand_config(args).unwrap();
    let cli = Cli::try_parse_from(out).unwrap();
    assert_eq!(cli.threads, Some(2));
    match cli.command {
        Command::Bounds(BoundsCommand::Alpha(a)) => assert_eq!((a.n, a.k), (100, 5)),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn config_errors_are_reported() {
    let args = os(&["pcsf", "--config", "/nonexistent/run.toml", "bounds", "alpha"]);
    assert!(matches!(expand_config(args), Err(Error::Io { .. })));
    let unchanged = os(&["pcsf", "bounds", "alpha", "--n", "4"]);
    assert_eq!(expand_config(unchanged.clone()).unwrap(), unchanged);
}

#[test]
fn plot_rows_and_empty_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    export_plot_data(&[], &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "n,k,l,bound,alpha_star,beta_star,ratio\n");
    let row = PlotRow { n: Some(4), k: Some(1), l: Some(3), bound: Some("5/8".into()), ..PlotRow::default() };
    export_plot_data(&[row], &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "n,k,l,bound,alpha_star,beta_star,ratio\n4,1,3,5/8,,,\n");
}

#[test]
fn small_parsers() {
    assert_eq!(recorded_factor("# factor 9/4\nforest 1\n"), Some(crate::rational::rat(9, 4)));
    assert_eq!(recorded_factor("forest 1\n"), None);
    assert_eq!(parse_range("3..7").unwrap(), 3..7);
    assert!(parse_range("3-7").is_err());
}

#[test]
fn bounds_report_has_exact_and_decimal_values() {
    let cli = Cli::try_parse_from(["pcsf", "bounds", "alpha", "--n", "4", "--k", "1"]).unwrap();
    let v = run(&cli).unwrap();
    assert_eq!(v["bound"], "5/8");
    assert_eq!(v["bound_decimal"], 0.625);
    assert_eq!(v["limit"], "9/4");
    let cli = Cli::try_parse_from(["pcsf", "bounds", "alpha", "--n", "100", "--k", "0", "--k-max", "20"]).unwrap();
    let v = run(&cli).unwrap();
    assert_eq!(v["curve"].as_array().unwrap().len(), 21);
    assert_eq!(v["monotone"], true);
}

#[test]
fn out_of_range_values_are_rejected_before_dispatch() {
    assert!(Cli::try_parse_from(["pcsf", "bounds", "alpha", "--n", "0"]).is_err());
    assert!(Cli::try_parse_from(["pcsf", "round", "--instance", "a", "--point", "b", "--theta", "x"]).is_err());
}
