use std::path::Path;
use std::process::{Command, Output};

use rankmetric::{read_delta_embedding, read_homomorphism, read_matrix, read_pair, write_homomorphism, write_matrix};
use rankmetric_core::embeddings::Homomorphism;
use rankmetric_core::{Field, Matrix};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankmetric"))
        .args(args)
        .env_remove("RANKMETRIC_MAX_DIM")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gens_reports_exact_relations() {
    let o = run(&["gens", "--n", "3", "--q", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("defect 0/3 0/3 0/3\n"));
    let blocks: String = text.lines().take(8).map(|l| format!("{l}\n")).collect();
    let (a, b) = read_pair(&blocks).unwrap();
    assert_eq!(a.rows(), 3);
    let unit = rankmetric_core::matrix::relations_hold(&a, &b, 3).unwrap();
    assert_eq!(unit, Matrix::identity(a.field(), 3));
}

#[test]
fn ramsey_bound_line() {
    let o = run(&["ramsey-bound", "--a", "1", "--b", "1", "--q", "2", "--eps", "1/2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("k=1 bound≈636.1 c=637\n"), "{text}");
    assert!(text.contains("bound 256*ln(12) = 636.136102\n"), "{text}");
}

#[test]
fn repair_of_an_exact_pair_moves_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let pair = dir.path().join("pair.txt");
    let psi = dir.path().join("psi.txt");
    let o = run(&["gens", "--n", "2", "--q", "2", "--copies", "6", "--out", path_str(&pair)]);
    assert!(o.status.success());
    let o = run(&["repair", "--n", "2", "--in", path_str(&pair), "--out", path_str(&psi)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("d_x 0/12 d_y 0/12\n"));
    let emb = read_delta_embedding(&std::fs::read_to_string(&psi).unwrap()).unwrap();
    let (x, y) = read_pair(&std::fs::read_to_string(&pair).unwrap()).unwrap();
    assert_eq!(emb.generator_images(), (x, y));
}

#[test]
fn written_matrices_reread_identically() {
    let dir = tempfile::tempdir().unwrap();
    let f = Field::builtin(9).unwrap();
    let x = Matrix::from_rows(&f, &[vec![0, 8], vec![4, 1]]).unwrap();
    let src = dir.path().join("x.txt");
    let dst = dir.path().join("y.txt");
    std::fs::write(&src, write_matrix(&x)).unwrap();
    let o = run(&["iota", "--to", "6", "--in", path_str(&src), "--out", path_str(&dst)]);
    assert!(o.status.success());
    let written = std::fs::read_to_string(&dst).unwrap();
    let y = read_matrix(&written).unwrap();
    assert_eq!(write_matrix(&y), written);
    assert_eq!(y, rankmetric_core::embeddings::iota(6, 2, &x).unwrap());

    let rank = run(&["rank", "--in", path_str(&dst)]);
    assert_eq!(stdout(&rank), "rank 6\nnormalized 6/6\n");
}

#[test]
fn amalgamate_and_conjugator() {
    let dir = tempfile::tempdir().unwrap();
    let f = Field::builtin(2).unwrap();
    let u = Matrix::from_rows(&f, &[vec![1, 1, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 1], vec![1, 0, 0, 1]]).unwrap();
    let phi0 = Homomorphism::iota(&f, 4, 2).unwrap().conjugated(&u).unwrap();
    let phi1 = Homomorphism::iota(&f, 6, 2).unwrap();
    let (p0, p1, out) = (dir.path().join("p0"), dir.path().join("p1"), dir.path().join("out"));
    std::fs::write(&p0, write_homomorphism(&phi0)).unwrap();
    std::fs::write(&p1, write_homomorphism(&phi1)).unwrap();
    let o = run(&["amalgamate", "--phi0", path_str(&p0), "--phi1", path_str(&p1), "--out", path_str(&out)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "c 24\ncommutes true\n");
    let written = std::fs::read_to_string(&out).unwrap();
    assert!(written.starts_with("HOM 4 24\n"));

    let iota4 = dir.path().join("i4");
    std::fs::write(&iota4, write_homomorphism(&Homomorphism::iota(&f, 4, 2).unwrap())).unwrap();
    let o = run(&["conjugator", "--phi0", path_str(&iota4), "--phi1", path_str(&p0), "--out", path_str(&out)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "conjugates true\n");
    let v = read_matrix(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(Homomorphism::iota(&f, 4, 2).unwrap().conjugated(&v).unwrap(), phi0);
    assert!(read_homomorphism(&written).is_err());
}

#[test]
fn extend_matches_formula() {
    let dir = tempfile::tempdir().unwrap();
    let f = Field::builtin(2).unwrap();
    let phi = rankmetric_core::embeddings::DeltaEmbedding::standard(&f, 2, 5, 2).unwrap();
    let p = dir.path().join("phi");
    std::fs::write(&p, rankmetric::write_delta_embedding(&phi)).unwrap();
    let o = run(&["extend", "--phi", path_str(&p), "--tower", "factorial", "--k", "2", "--delta-prime", "1/4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("dims 2 -> 5 -> 24\n"), "{text}");
    assert!(text.contains("commute_error 1/3\nmeasured 1/3\n"), "{text}");
    assert!(text.contains("within true\n"));
}

#[test]
fn backforth_certificate_verifies() {
    let o = run(&["backforth", "--q", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("x_dims [1, 1, 2, 6, 24, 120]\n"));
    assert!(text.ends_with("within_bounds true\nverified true\n"), "{text}");
}

#[test]
fn reports_are_deterministic() {
    let args = [
        "ramsey-search", "--a", "1", "--b", "2", "--c", "4", "--q", "2", "--eps", "0/1", "--coloring", "distance",
        "--strategy", "random", "--seed", "7", "--trials", "20",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "2 1 1\n1\nextra\n").unwrap();
    let o = run(&["rank", "--in", path_str(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FormatError"));

    let o = run(&["copies", "--a", "3", "--b", "4", "--q", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NotDivisor"));

    let o = run(&["ramsey-bound", "--a", "1", "--b", "1", "--q", "2", "--eps", "0.5"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["rank", "--in", "x", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["gens", "--n", "300", "--q", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("TooLarge"));

    let o = run(&["copies", "--a", "2", "--b", "6", "--q", "2", "--method", "brute"]);
    assert_eq!(o.status.code(), Some(3));

    let zero = dir.path().join("zero.txt");
    std::fs::write(&zero, "2 4 4\n0 0 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 0\n2 4 4\n0 0 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 0\n").unwrap();
    let o = run(&["repair", "--n", "2", "--in", path_str(&zero)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NotRepairable"));
}

#[test]
fn max_dim_is_configurable() {
    let o = Command::new(env!("CARGO_BIN_EXE_rankmetric"))
        .args(["gens", "--n", "4", "--q", "2", "--copies", "4"])
        .env("RANKMETRIC_MAX_DIM", "8")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_rankmetric"))
        .args(["backforth", "--q", "2"])
        .env("RANKMETRIC_MAX_DIM", "64")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("TowerPrefixTooShort"));
}
