use bregspec::datagen::{sample_bandlimited_truth, sample_gaussian_ensemble};
use bregspec::harness::{run_experiment, ExperimentConfig, ExperimentReport};
use bregspec::io::*;
use bregspec::numerics::C64;

#[test]
fn binary_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ens = sample_gaussian_ensemble(12, 8, 1).unwrap();
    save_ensemble(&ens, dir.path().join("a.bin")).unwrap();
    assert_eq!(load_ensemble(dir.path().join("a.bin")).unwrap(), ens);

    let y = vec![0.5, 1.25, 3.0, 1e-300];
    save_real_vector(&y, dir.path().join("y.bin")).unwrap();
    assert_eq!(load_real_vector(dir.path().join("y.bin")).unwrap(), y);

    let x = sample_bandlimited_truth(8, 2, 3).unwrap();
    save_complex_vector(x.as_slice(), dir.path().join("x.bin")).unwrap();
    assert_eq!(load_complex_vector(dir.path().join("x.bin")).unwrap(), x.as_slice());
}

#[test]
fn corrupted_files_are_rejected() {
    let ens = sample_gaussian_ensemble(3, 2, 1).unwrap();
    let bytes = encode_ensemble(&ens);
    assert!(matches!(decode_ensemble(&bytes[..bytes.len() - 1]), Err(FormatError::Truncated { .. })));
    let mut extra = bytes.clone();
    extra.push(0);
    assert!(matches!(decode_ensemble(&extra), Err(FormatError::TrailingData { .. })));
    let mut magic = bytes.clone();
    magic[0] = b'X';
    assert!(matches!(decode_ensemble(&magic), Err(FormatError::BadMagic { .. })));
    assert_eq!(decode_complex_vector(&encode_real_vector(&[1.0])).unwrap(), vec![C64::new(1.0, 0.0)]);
    assert!(decode_real_vector(&encode_complex_vector(&[C64::new(1.0, 0.0)])).is_err());
}

#[test]
fn text_intensities_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("y.csv");
    std::fs::write(&path, "1.5, 2\n3e-1\n").unwrap();
    assert_eq!(load_real_vector(&path).unwrap(), vec![1.5, 2.0, 0.3]);
}

#[test]
fn config_files_parse_and_reserialize() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.conf");
    std::fs::write(
        &path,
        "# sweep\nn = 32\nalphas = 2, 4.5\nmethods = ll, is_opt:rep=sphere, truncated:kappa=2\nbands = 2,4\nnoise = poisson:50\nparallelism = 2\n",
    )
    .unwrap();
    let cfg = parse_config(&path).unwrap();
    assert_eq!(cfg.n, 32);
    assert_eq!(cfg.alphas, vec![2.0, 4.5]);
    assert_eq!(cfg.methods.len(), 3);
    assert_eq!(parse_config_str(&serialize_config(&cfg)).unwrap(), cfg);
    assert!(matches!(
        parse_config_str("n = 8\nalphas = 2\nmethods = ll\nbogus = 1"),
        Err(ConfigError::UnknownKey { .. })
    ));
    assert!(matches!(parse_config_str("alphas = 2\nmethods = ll"), Err(ConfigError::MissingRequired("n"))));
}

fn sample_report() -> ExperimentReport {
    let mut cfg = ExperimentConfig::new(8, vec![3.0], vec!["ll".parse().unwrap(), "classical".parse().unwrap()]);
    cfg.truths = 1;
    cfg.trials = 2;
    cfg.parallelism = 1;
    run_experiment(&cfg).unwrap()
}

#[test]
fn json_report_has_plotting_schema() {
    let report = sample_report();
    let text = report_to_json(&report).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["version", "config", "rows", "band_averages"] {
        assert!(value.get(key).is_some(), "{key}");
    }
    for row in value["rows"].as_array().unwrap() {
        for key in CSV_COLUMNS {
            assert!(row.get(key).is_some(), "{key}");
        }
    }
    let back: ExperimentReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
}

#[test]
fn csv_report_round_trips_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let report = sample_report();
    let path = dir.path().join("out.csv");
    write_report(&report, &path, ReportFormat::from_path(&path)).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
    for (line, row) in lines.zip(&report.rows) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0], row.method);
        assert_eq!(fields[3].parse::<f64>().unwrap(), row.mean_rho.unwrap());
        assert_eq!(fields[4].parse::<f64>().unwrap(), row.std_rho.unwrap());
    }
}
