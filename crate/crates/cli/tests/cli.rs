use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lowstar_cli::{cmd_bench, BenchArgs, BuildParams};
use lowstar_core::{Algo, BoundaryMatrix, Ensemble, PmsOptions, PointCloud};

const T7: &str = "7\n4 1 1 2\n5 1 1 3\n6 1 2 3\n7 2 4 5 6\n";
const S8: &str = "8\n5 1 1 2\n6 1 1 3\n7 1 2 4\n8 1 3 4\n";

fn lowstar(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lowstar"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn sample_writes_one_line_per_point_and_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let o = lowstar(dir.path(), &["sample", "gaussian3d", "15", "1", "pc.csv"]);
    assert!(o.status.success());
    let a = fs::read_to_string(dir.path().join("pc.csv")).unwrap();
    assert_eq!(a.lines().count(), 15);
    assert!(a.lines().all(|l| l.split(',').count() == 3));
    lowstar(dir.path(), &["sample", "gaussian3d", "15", "1", "pc2.csv"]);
    assert_eq!(fs::read_to_string(dir.path().join("pc2.csv")).unwrap(), a);
    let cloud = PointCloud::read_csv(a.as_bytes()).unwrap();
    let mut again = Vec::new();
    cloud.write_csv(&mut again).unwrap();
    assert_eq!(String::from_utf8(again).unwrap(), a);
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(lowstar(dir.path(), &["sample", "gaussian3d", "0", "1", "x.csv"]).status.code(), Some(1));
    assert_eq!(lowstar(dir.path(), &["sample", "torus", "3", "1", "x.csv"]).status.code(), Some(1));
    assert_eq!(lowstar(dir.path(), &["reduce", "missing.txt"]).status.code(), Some(1));
    assert_eq!(lowstar(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn build_far_pair_and_unit_triangle() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("far.csv"), "0,0\n10,0\n").unwrap();
    let o = lowstar(dir.path(), &["build", "far.csv", "far.txt", "--r-max", "1", "--divisions", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "m=2 nnz=0");

    let h = 3f64.sqrt() / 2.0;
    fs::write(dir.path().join("tri.csv"), format!("0,0\n1,0\n0.5,{h}\n")).unwrap();
    let o = lowstar(
        dir.path(),
        &["build", "tri.csv", "tri.txt", "--r-max", "1", "--divisions", "1", "--max-dim", "2"],
    );
    assert_eq!(stdout(&o).trim(), "m=7 nnz=9");
    assert_eq!(fs::read_to_string(dir.path().join("tri.txt")).unwrap(), T7);
}

#[test]
fn reduce_filled_triangle() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t7.txt"), T7).unwrap();
    let o = lowstar(dir.path(), &["reduce", "t7.txt", "--trace", "pms.csv", "--barcode", "pms.bar"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = fs::read_to_string(dir.path().join("pms.csv")).unwrap();
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1], "0,pms,0,0,0,0,0,0,1,3,1");
    let bar = fs::read_to_string(dir.path().join("pms.bar")).unwrap();
    assert_eq!(bar, "2 4 0\n3 5 0\n6 7 1\n1 inf 0\n");

    for algo in ["std", "twist"] {
        let out = format!("{algo}.bar");
        let o = lowstar(dir.path(), &["reduce", "t7.txt", "--algo", algo, "--barcode", &out]);
        assert!(o.status.success());
        assert_eq!(fs::read_to_string(dir.path().join(&out)).unwrap(), bar);
    }
}

#[test]
fn reduce_with_filtration_scales() {
    let dir = tempfile::tempdir().unwrap();
    let h = 3f64.sqrt() / 2.0;
    fs::write(dir.path().join("tri.csv"), format!("0,0\n1,0\n0.5,{h}\n")).unwrap();
    lowstar(
        dir.path(),
        &["build", "tri.csv", "m.txt", "--r-max", "1", "--divisions", "2", "--max-dim", "2", "--filtration-out", "f.txt"],
    );
    let o = lowstar(dir.path(), &["reduce", "m.txt", "--filtration", "f.txt", "--barcode", "b.txt"]);
    assert!(o.status.success());
    assert_eq!(
        fs::read_to_string(dir.path().join("b.txt")).unwrap(),
        "0 0.5 0\n0 0.5 0\n0.5 0.5 1\n0 inf 0\n"
    );
}

#[test]
fn max_iter_gives_partial_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s8.txt"), S8).unwrap();
    let o = lowstar(dir.path(), &["reduce", "s8.txt", "--max-iter", "1", "--trace", "t.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("converged=false"));
    let trace = fs::read_to_string(dir.path().join("t.csv")).unwrap();
    let last = trace.lines().last().unwrap();
    assert!(last.starts_with("1,pms,1,"), "{last}");

    let o = lowstar(dir.path(), &["reduce", "s8.txt"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("iterations=3 col_adds=3"));
}

#[test]
fn malformed_matrix_names_the_column() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.txt"), "3\n2 1 3\n").unwrap();
    let o = lowstar(dir.path(), &["reduce", "bad.txt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("column 2"));
}

#[test]
fn matrix_file_round_trip() {
    let m = BoundaryMatrix::read_text(T7.as_bytes()).unwrap();
    let mut buf = Vec::new();
    m.write_text(&mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), T7);
}

#[test]
fn tiny_bench_reaches_every_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let args = BenchArgs {
        ensemble: Ensemble::Gaussian3d,
        n: 4,
        seeds: vec![1],
        jitter: 0.05,
        build: BuildParams::default(),
        pms: PmsOptions::default(),
        out_dir: dir.path().to_path_buf(),
    };
    let summary = cmd_bench(&args).unwrap();
    let s = &summary[0];
    for algo in Algo::ALL {
        let r = s.run(algo);
        assert!(r.converged);
        assert_eq!(r.m, 15);
        for t in [
            r.iter_rel_err_1pct,
            r.iter_certified_50pct,
            r.iter_certified_99pct,
            r.iter_precision_95pct,
            r.iter_precision_exact,
        ] {
            assert!(t.is_some_and(|i| i <= r.m), "{algo}: {r:?}");
        }
    }
    let files: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(files.len(), 5);
    let jsonl = fs::read_to_string(dir.path().join("summary.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 3);
    assert!(fs::read_to_string(dir.path().join("summary.txt")).unwrap().contains("pms/twist"));
}

#[test]
fn bench_writes_three_traces_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let o = lowstar(
        dir.path(),
        &["bench", "figure8", "--n", "6", "--seeds", "3", "--r-max", "0.5", "--max-dim", "2", "--out", "b"],
    );
    assert!(o.status.success());
    let traces = fs::read_dir(dir.path().join("b"))
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "csv"))
        .count();
    assert_eq!(traces, 9);
    assert!(stdout(&o).contains("pms/std"));
}
