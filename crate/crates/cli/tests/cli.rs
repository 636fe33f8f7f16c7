//! The `bearlion` binary end to end.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bearlion_cli::container::key_file_len;
use bearlion_core::rng::seeded;
use bearlion_core::SchemeKind;
use rand::RngCore;
use tempfile::TempDir;

fn bearlion(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bearlion")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Files {
    dir: TempDir,
}

impl Files {
    fn new() -> Self {
        Files {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn random(&self, name: &str, len: usize, seed: u64) -> PathBuf {
        let mut data = vec![0u8; len];
        seeded(seed).fill_bytes(&mut data);
        let path = self.path(name);
        std::fs::write(&path, data).unwrap();
        path
    }
}

#[test]
fn roundtrip_every_scheme_and_size() {
    let f = Files::new();
    for scheme in SchemeKind::ALL {
        let key = f.random("key", key_file_len(scheme), scheme.id() as u64);
        for size in [65, 1024, 1 << 20] {
            let pt = f.random("pt", size, size as u64);
            let (ct, back) = (f.path("ct"), f.path("back"));
            let enc = bearlion(&["encrypt", "--scheme", scheme.name(), "--key", p(&key), "--in", p(&pt), "--out", p(&ct)]);
            assert_eq!(code(&enc), 0, "{}", String::from_utf8_lossy(&enc.stderr));
            let dec = bearlion(&["decrypt", "--key", p(&key), "--in", p(&ct), "--out", p(&back)]);
            assert_eq!(code(&dec), 0, "{}", String::from_utf8_lossy(&dec.stderr));
            let ct_bytes = std::fs::read(&ct).unwrap();
            assert_eq!(ct_bytes.len(), size + 10);
            assert_eq!(&ct_bytes[..10], &[b'L', b'B', b'L', b'K', 1, scheme.id(), 0, 0, 1, 0]);
            assert_ne!(&ct_bytes[10..], &std::fs::read(&pt).unwrap()[..]);
            assert_eq!(std::fs::read(&back).unwrap(), std::fs::read(&pt).unwrap());
        }
    }
}

#[test]
fn encrypt_refuses_short_messages_and_bad_keys() {
    let f = Files::new();
    let key = f.random("key", key_file_len(SchemeKind::Lion), 1);
    let short = f.random("short", 64, 2);
    let out = bearlion(&["encrypt", "--scheme", "LION", "--key", p(&key), "--in", p(&short), "--out", p(&f.path("ct"))]);
    assert_eq!(code(&out), 4);
    let pt = f.random("pt", 100, 3);
    let out = bearlion(&["encrypt", "--scheme", "BEAR", "--key", p(&key), "--in", p(&pt), "--out", p(&f.path("ct"))]);
    assert_eq!(code(&out), 4);
    let out = bearlion(&["encrypt", "--scheme", "NOPE", "--key", p(&key), "--in", p(&pt), "--out", p(&f.path("ct"))]);
    assert_eq!(code(&out), 2);
    let out = bearlion(&["encrypt", "--scheme", "LION", "--key", p(&f.path("missing")), "--in", p(&pt), "--out", p(&f.path("ct"))]);
    assert_eq!(code(&out), 1);
}

#[test]
fn decrypt_rejects_malformed_files() {
    let f = Files::new();
    let key = f.random("key", key_file_len(SchemeKind::Lion), 1);
    let truncated = f.path("trunc");
    std::fs::write(&truncated, b"LBLK\x01\x02\x00").unwrap();
    let out = bearlion(&["decrypt", "--key", p(&key), "--in", p(&truncated), "--out", p(&f.path("o"))]);
    assert_eq!(code(&out), 3);
    let garbage = f.random("garbage", 200, 4);
    let out = bearlion(&["decrypt", "--key", p(&key), "--in", p(&garbage), "--out", p(&f.path("o"))]);
    assert_eq!(code(&out), 3);

    let pt = f.random("pt", 100, 5);
    let ct = f.path("ct");
    assert_eq!(code(&bearlion(&["encrypt", "--scheme", "LION", "--key", p(&key), "--in", p(&pt), "--out", p(&ct)])), 0);
    let out = bearlion(&["decrypt", "--scheme", "LION2", "--key", p(&key), "--in", p(&ct), "--out", p(&f.path("o"))]);
    assert_ne!(code(&out), 0);
}

#[test]
fn reduce_refuses_oversized_key_spaces_before_running() {
    let out = bearlion(&["reduce", "--l", "20", "--k", "20"]);
    assert_eq!(code(&out), 4);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cap"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn reduce_with_no_trials_writes_only_the_header() {
    let f = Files::new();
    let report = f.path("r.tsv");
    let out = bearlion(&["reduce", "--trials", "0", "--out", p(&report)]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&report).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("# theorem"));
}

#[test]
fn reduce_reports_are_byte_identical() {
    let f = Files::new();
    let run = |name: &str| {
        let path = f.path(name);
        let out = bearlion(&["reduce", "--theorem", "R-LION-S,R-LNS-H", "--trials", "20", "--mode", "first-consistent", "--seed", "5", "--out", p(&path)]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        (std::fs::read(&path).unwrap(), out.stdout)
    };
    let (a, sa) = run("a");
    let (b, sb) = run("b");
    assert_eq!(a, b);
    assert_eq!(sa, sb);
    let records = bearlion_core::reductions::harness::parse_report(&String::from_utf8(a).unwrap()).unwrap();
    assert_eq!(records.len(), 2 * 3 * 20);
    assert!(records.iter().all(|r| r.pairs_valid && r.reduction_keys == 0));
}

#[test]
fn reduce_reads_a_config_file() {
    let f = Files::new();
    let report = f.path("r.tsv");
    let cfg = f.path("exp.toml");
    std::fs::write(&cfg, "theorems = [\"R-BEAR-H\"]\nn = [2]\ntrials = 5\nseed = 9\n").unwrap();
    let out = bearlion(&["reduce", "--config", p(&cfg), "--trials", "3", "--out", p(&report)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "R-BEAR-H\tall-consistent\tn=2\tpass_rate=1.00\t(3/3)\n");
    std::fs::write(&cfg, "colour = \"red\"\n").unwrap();
    assert_eq!(code(&bearlion(&["reduce", "--config", p(&cfg)])), 3);
}

#[test]
fn analyze_subcommands() {
    let out = bearlion(&["analyze", "good-pairing", "--stream", "stub", "--hash", "stub", "--l", "4", "--r", "8"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("\tfraction=0.0625\t"));
    let out = bearlion(&["analyze", "image", "--l", "4", "--r", "8", "--stream", "toy"]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("image\tl=4\tr=8\tsize="));
    let out = bearlion(&["analyze", "surjectivity", "--l", "4", "--k", "5", "--hash", "stub"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("fraction=0"));
    assert_eq!(code(&bearlion(&["analyze", "entropy"])), 2);
    assert_eq!(code(&bearlion(&["frobnicate"])), 2);
}
