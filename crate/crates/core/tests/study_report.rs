use std::f64::consts::TAU;
use std::io::Write;

use ibfem::config::{load_config, parse_config, BoundarySpec};
use ibfem::report::{to_csv, to_markdown, CSV_HEADER};
use ibfem::study::run_study;

#[test]
fn csv_round_trips_through_a_parser() {
    let cfg = parse_config("levels = [10, 20]\nreference = \"analytic\"").unwrap();
    let res = run_study(&cfg).unwrap();
    let text = to_csv(&res);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header.join(","), CSV_HEADER);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2 * cfg.r_list.len());
    for (k, row) in rows.iter().enumerate() {
        let level = &res.reports[k / 2].rows[k % 2];
        let r: f64 = row[0].parse().unwrap();
        assert_eq!(r, res.reports[k / 2].r);
        let e: f64 = row[2].parse().unwrap();
        assert!((e - level.errors[0]).abs() <= 1e-6 * e);
        if k % 2 == 0 {
            assert!(row[5].is_empty() && row[7].is_empty());
        } else {
            let rho: f64 = row[6].parse().unwrap();
            assert!((rho - level.rates.unwrap()[1]).abs() < 1e-4);
        }
    }
    let md = to_markdown(&res);
    assert!(md.contains(" --- |"));
    assert_eq!(md.lines().filter(|l| l.starts_with("| 0.")).count(), 2 * cfg.r_list.len());
}

#[test]
fn body_force_only_study() {
    let cfg = parse_config("boundary = \"none\"\nlevels = [10, 20, 40]\nreference = \"analytic\"").unwrap();
    let res = run_study(&cfg).unwrap();
    for rep in &res.reports {
        for row in &rep.rows {
            assert!(row.errors[2] < 1e-9, "pressure error {}", row.errors[2]);
            assert!(row.errors[1] < 1e-9);
        }
    }
}

#[test]
fn sampled_boundary_file() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# theta X1 X2 F1 F2").unwrap();
    let m = 24;
    for i in 0..=m {
        let t = TAU * i as f64 / m as f64;
        writeln!(file, "{t} {} {} {} {}", 0.5 * t.cos(), 0.5 * t.sin(), -t.cos(), -t.sin()).unwrap();
    }
    let mut cfg_file = tempfile::NamedTempFile::new().unwrap();
    writeln!(cfg_file, "boundary = \"file:{}\"\nlevels = [10, 20]\nreference = \"fine:40\"", file.path().display()).unwrap();
    let cfg = load_config(cfg_file.path()).unwrap();
    assert!(matches!(cfg.boundary, BoundarySpec::File(_)));
    let res = run_study(&cfg).unwrap();
    assert_eq!(res.levels[0].markers, m + 1);
    assert!(res.reports[0].rows[1].rates.is_some());
}

#[test]
fn parallel_levels_match_sequential() {
    let seq = parse_config("levels = [10, 20]\nreference = \"fine:40\"").unwrap();
    let mut par = seq.clone();
    par.parallel_levels = true;
    assert_eq!(to_csv(&run_study(&seq).unwrap()), to_csv(&run_study(&par).unwrap()));
}
