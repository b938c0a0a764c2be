use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qcol_kernel::dimacs::{parse_graph, parse_modulator, write_graph, write_modulator};
use qcol_kernel::{validate_instance, Graph};
use tempfile::TempDir;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcol-kernel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn gen(dir: &TempDir, name: &str, extra: &[&str]) -> PathBuf {
    let out = dir.path().join(name);
    let mut args = vec!["gen", "--output", p(&out)];
    args.extend_from_slice(extra);
    let o = bin(&args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    out
}

fn stat(text: &str, key: &str) -> u64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(' ')?.parse().ok())
        .unwrap_or_else(|| panic!("missing {key} in {text}"))
}

fn read_graph(path: &Path) -> Graph {
    parse_graph(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gen_is_deterministic_and_valid() {
    let dir = TempDir::new().unwrap();
    let spec = [
        "--n", "14", "--k", "5", "--p-xx", "0.5", "--p-xr", "0.5", "--m-frac", "0.6", "--seed", "7",
    ];
    let a = gen(&dir, "a.col", &spec);
    let b = gen(&dir, "b.col", &spec);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(
        fs::read(dir.path().join("a.col.mod")).unwrap(),
        fs::read(dir.path().join("b.col.mod")).unwrap()
    );
    let g = read_graph(&a);
    let x = parse_modulator(
        &fs::read_to_string(dir.path().join("a.col.mod")).unwrap(),
        g.n(),
    )
    .unwrap();
    assert_eq!(x, vec![0, 1, 2, 3, 4]);
    assert!(validate_instance(&g, &x).is_ok());
}

#[test]
fn gen_perfect_matching() {
    let dir = TempDir::new().unwrap();
    let out = gen(&dir, "m.col", &["--n", "10", "--k", "0", "--m-frac", "1"]);
    let g = read_graph(&out);
    assert_eq!(g.edge_count(), 5);
    assert!((0..10).all(|v| g.degree(v) == 1));
    assert_eq!(
        fs::read_to_string(dir.path().join("m.col.mod"))
            .unwrap()
            .trim(),
        ""
    );
}

#[test]
fn gen_rejects_bad_spec() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bad.col");
    assert_eq!(
        bin(&["gen", "--n", "3", "--k", "5", "--output", p(&out)])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bin(&[
            "gen",
            "--n",
            "5",
            "--k",
            "1",
            "--p-xx",
            "2",
            "--output",
            p(&out)
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn kernelize_reports_stats_and_verifies() {
    let dir = TempDir::new().unwrap();
    let input = gen(
        &dir,
        "g.col",
        &["--n", "14", "--k", "5", "--seed", "1", "--m-frac", "0.6"],
    );
    let kernel = dir.path().join("k.col");
    let kmod = dir.path().join("k.mod");
    let o = bin(&[
        "kernelize",
        "--input",
        p(&input),
        "--q",
        "3",
        "--output",
        p(&kernel),
        "--kernel-modulator",
        p(&kmod),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let s = stdout(&o);
    let (b1, b2) = (stat(&s, "p1_basis"), stat(&s, "p2_basis"));
    assert!(b1 <= stat(&s, "p1_total") && b2 <= stat(&s, "p2_total"));
    let k = 5;
    assert!(stat(&s, "kernel_vertices") <= k + b1 + 2 * b2);

    let kg = read_graph(&kernel);
    assert_eq!(kg.n() as u64, stat(&s, "kernel_vertices"));
    assert_eq!(kg.edge_count() as u64, stat(&s, "kernel_edges"));
    let kx = parse_modulator(&fs::read_to_string(&kmod).unwrap(), kg.n()).unwrap();
    assert_eq!(kx.len(), 5);
    assert!(validate_instance(&kg, &kx).is_ok());

    let v = bin(&[
        "verify",
        "--original",
        p(&input),
        "--kernel",
        p(&kernel),
        "--q",
        "3",
    ]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains("agree yes"));
}

#[test]
fn kernelize_vandermonde_over_gf5() {
    let dir = TempDir::new().unwrap();
    let input = gen(&dir, "g.col", &["--n", "12", "--k", "4", "--seed", "3"]);
    let kernel = dir.path().join("k.col");
    let o = bin(&[
        "kernelize",
        "--input",
        p(&input),
        "--q",
        "4",
        "--field",
        "5",
        "--palette",
        "vandermonde",
        "--output",
        p(&kernel),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v = bin(&[
        "verify",
        "--original",
        p(&input),
        "--kernel",
        p(&kernel),
        "--q",
        "4",
    ]);
    assert_eq!(v.status.code(), Some(0));
}

#[test]
fn kernelize_without_outside_vertices_keeps_graph() {
    let dir = TempDir::new().unwrap();
    let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
    let input = dir.path().join("c4.col");
    fs::write(&input, write_graph(&g, &[])).unwrap();
    fs::write(
        dir.path().join("c4.col.mod"),
        write_modulator(&[0, 1, 2, 3]),
    )
    .unwrap();
    let kernel = dir.path().join("k.col");
    let o = bin(&[
        "kernelize",
        "--input",
        p(&input),
        "--q",
        "3",
        "--output",
        p(&kernel),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read_graph(&kernel), g);
}

#[test]
fn kernelize_auto_modulator() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("g.col");
    // A star on 6 vertices plus a disjoint edge: the center is the modulator.
    let g = Graph::from_edges(7, &[(0, 1), (0, 2), (0, 3), (0, 4), (5, 6)]).unwrap();
    fs::write(&input, write_graph(&g, &[])).unwrap();
    let kernel = dir.path().join("k.col");
    let missing = bin(&[
        "kernelize",
        "--input",
        p(&input),
        "--q",
        "3",
        "--output",
        p(&kernel),
    ]);
    assert_eq!(missing.status.code(), Some(2));
    let o = bin(&[
        "kernelize",
        "--input",
        p(&input),
        "--q",
        "3",
        "--output",
        p(&kernel),
        "--auto-modulator",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = fs::read_to_string(&kernel).unwrap();
    assert!(text.contains("k=1"), "{text}");
}

#[test]
fn kernelize_error_codes() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("p.col");
    fs::write(
        &input,
        write_graph(&Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap(), &[]),
    )
    .unwrap();
    fs::write(dir.path().join("p.col.mod"), "").unwrap();
    let out = dir.path().join("k.col");
    let o = bin(&[
        "kernelize",
        "--input",
        p(&input),
        "--q",
        "3",
        "--output",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("neighbors outside the modulator"));

    let garbage = dir.path().join("bad.col");
    fs::write(&garbage, "p edge 2 1\ne 1 3\n").unwrap();
    let o = bin(&[
        "kernelize",
        "--input",
        p(&garbage),
        "--modulator",
        p(&dir.path().join("p.col.mod")),
        "--q",
        "3",
        "--output",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));

    let o = bin(&[
        "kernelize",
        "--input",
        p(&input),
        "--q",
        "2",
        "--output",
        p(&out),
        "--modulator",
        p(&dir.path().join("p.col.mod")),
    ]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn verify_detects_disagreement_and_size_limit() {
    let dir = TempDir::new().unwrap();
    let k4 = dir.path().join("k4.col");
    fs::write(&k4, write_graph(&Graph::complete(4), &[])).unwrap();
    let mut broken = Graph::complete(4);
    broken.remove_edge(0, 1);
    let k4e = dir.path().join("k4e.col");
    fs::write(&k4e, write_graph(&broken, &[])).unwrap();

    let same = bin(&[
        "verify",
        "--original",
        p(&k4),
        "--kernel",
        p(&k4),
        "--q",
        "3",
    ]);
    assert_eq!(same.status.code(), Some(0));
    assert!(stdout(&same).contains("original not-colorable"));

    let o = bin(&[
        "verify",
        "--original",
        p(&k4),
        "--kernel",
        p(&k4e),
        "--q",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("agree no"));

    let o = bin(&[
        "verify",
        "--original",
        p(&k4),
        "--kernel",
        p(&k4),
        "--q",
        "3",
        "--max-vertices",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn palette_exit_codes() {
    let o = bin(&["palette", "--q", "4", "--field", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("1 1 1 1"), "{s}");
    assert!(!s.contains("fail"), "{s}");

    let o = bin(&["palette", "--q", "3", "--field", "2"]);
    assert_eq!(o.status.code(), Some(6));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no q-palette exists"));

    assert_eq!(
        bin(&[
            "palette",
            "--q",
            "3",
            "--field",
            "3",
            "--variant",
            "vandermonde"
        ])
        .status
        .code(),
        Some(0)
    );
    assert_eq!(
        bin(&[
            "palette",
            "--q",
            "4",
            "--field",
            "3",
            "--variant",
            "vandermonde"
        ])
        .status
        .code(),
        Some(6)
    );
    assert_eq!(
        bin(&["palette", "--q", "4", "--field", "4"]).status.code(),
        Some(2)
    );
}

#[test]
fn selftest_deterministic_checks_only() {
    let a = bin(&["selftest", "--trials", "0", "--seed", "4"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert!(!stdout(&a).contains("FAIL"));
    let b = bin(&["selftest", "--trials", "0", "--seed", "4"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn selftest_small_random_run() {
    let o = bin(&["selftest", "--q", "3", "--trials", "10", "--seed", "9"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("kernel trials q=3"));
}

#[test]
fn unknown_arguments_are_parse_errors() {
    assert_eq!(bin(&["kernelize", "--bogus"]).status.code(), Some(2));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}
