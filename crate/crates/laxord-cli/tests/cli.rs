use std::path::PathBuf;
use std::process::{Command, Output};

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests")
}

fn laxord(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_laxord")).current_dir(dir()).args(args).output().expect("spawn laxord")
}

fn stdout(args: &[&str]) -> String {
    let out = laxord(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn golden(args: &[&str], file: &str) {
    let want = std::fs::read_to_string(dir().join("golden").join(file)).unwrap();
    let first = stdout(args);
    assert_eq!(first, want, "{file}");
    assert_eq!(stdout(args), first, "{file}: second run differs");
}

#[test]
fn enumerate_goldens() {
    golden(&["enumerate", "--dfa", "data/a1.dfa", "--max-words", "5"], "enumerate_a1_5.txt");
    golden(&["enumerate", "--dfa", "data/a4.dfa", "--max-words", "40"], "enumerate_a4_40.txt");
}

#[test]
fn bench_golden() {
    golden(&["bench", "--dfa", "data/a1.dfa", "--max-words", "20"], "bench_a1_20.csv");
}

#[test]
fn slender_golden() {
    golden(&["slender", "--regex", "c+a(bb)*(c+d+cd)", "--threads", "--enumerate", "0", "--max-words", "10"], "slender_threads.txt");
    assert_eq!(stdout(&["slender", "--dfa", "data/astarbstar.dfa"]), "slender=false\n");
}

#[test]
fn partition_writes_parts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = stdout(&["partition", "--dfa", "data/a5.dfa", "--out-dir", tmp.path().to_str().unwrap()]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("t=2"));
    let parts: Vec<&str> = lines.collect();
    assert_eq!(parts.len(), 2);
    for p in parts {
        let text = std::fs::read_to_string(p).unwrap();
        assert!(text.starts_with("alphabet:"), "{p}");
    }
}

#[test]
fn enumerate_verifies_and_round_robin() {
    let out = laxord(&["enumerate", "--dfa", "data/a1.dfa", "--max-words", "200", "--verify"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("verified part 0: 200 words"));
    let rr = stdout(&["enumerate", "--dfa", "data/a5.dfa", "--round-robin", "--max-words", "6"]);
    let tags: Vec<&str> = rr.lines().map(|l| l.split(' ').next().unwrap()).collect();
    assert_eq!(tags.len(), 12);
    assert_eq!(&tags[..4], ["0", "1", "0", "1"]);
}

#[test]
fn check_scripts() {
    assert_eq!(stdout(&["check", "--dfa", "data/a1.dfa", "--scripts", "data/a1.scripts", "--bound", "1"]), "clean outputs=3 max_script=1\n");
    let dup = laxord(&["check", "--dfa", "data/a5.dfa", "--scripts", "data/dup.scripts", "--bound", "3"]);
    assert_eq!(dup.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&dup.stderr).contains("Repeated"));
}

#[test]
fn check_order() {
    let yes = stdout(&["check-order", "--words", "data/aplusb.words", "--t", "2", "--d", "1"]);
    assert_eq!(yes, "orderable=true\n");
    let no = stdout(&["check-order", "--words", "data/split.words", "--t", "1", "--d", "3", "--metric", "lev"]);
    assert_eq!(no, "orderable=false\n");
}

#[test]
fn exit_codes() {
    let broken = laxord(&["partition", "--dfa", "data/broken.dfa"]);
    assert_eq!(broken.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&broken.stderr).starts_with("error: "));
    assert_eq!(laxord(&["enumerate"]).status.code(), Some(2));
    assert_eq!(laxord(&["enumerate", "--dfa", "data/a1.dfa", "--part", "3"]).status.code(), Some(1));
    assert_eq!(laxord(&["enumerate", "--regex", "ab+b"]).status.code(), Some(0));
}
