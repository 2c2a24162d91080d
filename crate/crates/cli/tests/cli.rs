use std::path::Path;
use std::process::{Command, Output};

fn morphkit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morphkit"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = morphkit(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

fn small_config(dir: &Path) -> &'static str {
    std::fs::write(dir.join("small.cfg"), "cardinalities=4,4,4\nvocab_size=8\nmax_len=9\n").unwrap();
    "small.cfg"
}

#[test]
fn gen_writes_the_full_meaning_space() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "--lang", "perfect_concat", "--preset", "default", "--seed", "1", "-o", "pc.tsv"]);
    let text = read(dir.path().join("pc.tsv"));
    assert_eq!(text.lines().count(), 4097);
    assert_eq!(read(dir.path().join("pc.cfg")), "cardinalities=16,16,16\nvocab_size=8\nmax_len=9\nweights=0.3333333333333333,0.3333333333333333,0.3333333333333333\n");
    let manifest: serde_json::Value = serde_json::from_str(&read(dir.path().join("manifest.json"))).unwrap();
    assert_eq!(manifest["command"], "gen");
    assert_eq!(manifest["preset"], "default");
    assert_eq!(manifest["seeds"], serde_json::json!([1]));
    assert!(manifest["timestamp"].as_u64().unwrap() > 0);
}

#[test]
fn gen_mutation_and_unknown_kinds() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["--preset", "inflection", "gen", "--lang", "mutation:k=3", "-o", "m.tsv"]);
    let text = read(dir.path().join("m.tsv"));
    assert_eq!(text.lines().count(), 253);
    assert!(text.lines().skip(1).all(|l| l.split('\t').nth(1).unwrap().split(',').count() == 9));

    let out = morphkit(dir.path(), &["gen", "--lang", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown language kind"));
}

#[test]
fn analyze_is_reproducible_and_writes_curves() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    ok(dir.path(), &["--config", cfg, "--seed", "2", "gen", "--lang", "fusion", "-o", "f.tsv"]);
    let table = ok(dir.path(), &["--out-dir", "a", "analyze", "f.tsv", "--curve", "8..40:8", "--svg"]);
    assert!(table.contains("f_topsim_delta"));
    let first = read(dir.path().join("a/f.metrics.tsv"));
    for metric in ["topsim", "bosdis_char", "posdis", "haslen", "bpelen96", "bpelenmax", "bosdis_ratio_bpe96", "best_fusion_pair", "articulation_violation_rate"] {
        assert!(first.lines().any(|l| l.starts_with(&format!("{metric}\t"))), "{metric}");
    }
    let curve = read(dir.path().join("a/f.curve.csv"));
    let rows: Vec<&str> = curve.lines().collect();
    assert_eq!(rows[0], "vocab_size,bpelen");
    assert_eq!(rows[1], "8,9");
    assert_eq!(rows.len(), 7);
    assert!(rows[6].starts_with("max,"));
    assert!(read(dir.path().join("a/f.curve.svg")).starts_with("<svg"));

    ok(dir.path(), &["--out-dir", "a", "analyze", "f.tsv"]);
    assert_eq!(read(dir.path().join("a/f.metrics.tsv")), first);
}

#[test]
fn analyze_missing_file_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = morphkit(dir.path(), &["analyze", "absent.tsv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.tsv"));
    assert!(!dir.path().join("manifest.json").exists());
}

#[test]
fn segment_outputs_reconstruct_messages() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    ok(dir.path(), &["--config", cfg, "gen", "--lang", "nonconcat", "-o", "n.tsv"]);
    for method in ["has", "bpe", "bpemax"] {
        ok(dir.path(), &["--bpe-vocab", "30", "segment", "n.tsv", "--method", method, "-o", "s.tsv", "--merges", "merges.tsv"]);
        for line in read(dir.path().join("s.tsv")).lines().skip(1) {
            let cols: Vec<&str> = line.split('\t').collect();
            let len = cols[1].split(',').count();
            let cuts: Vec<usize> = cols[2].split(',').filter(|c| !c.is_empty()).map(|c| c.parse().unwrap()).collect();
            assert!(cuts.windows(2).all(|w| w[0] < w[1]));
            assert!(cuts.iter().all(|&c| c > 0 && c < len));
        }
    }
    let bad = morphkit(dir.path(), &["segment", "n.tsv", "--method", "nope"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn natural_sample_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["--seed", "4", "--out-dir", "a", "natural", "sample", "--count", "3"]);
    ok(dir.path(), &["--seed", "4", "--out-dir", "b", "natural", "sample", "--count", "3"]);
    for name in ["sublanguage_000.tsv", "sublanguage_002.tsv", "alphabet.tsv", "sublanguages.cfg"] {
        assert_eq!(read(dir.path().join("a").join(name)), read(dir.path().join("b").join(name)));
    }
    assert!(!dir.path().join("a/sublanguage_003.tsv").exists());
    assert_eq!(read(dir.path().join("a/sublanguage_000.tsv")).lines().count(), 253);

    std::fs::write(dir.path().join("thin.csv"), "lexeme,tense,person,form\nx,p,1,a\n").unwrap();
    let out = morphkit(dir.path(), &["natural", "sample", "--table", "thin.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("coverage"));
}

#[test]
fn batch_aggregates_and_compares_conditions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let args = ["--config", cfg, "--out-dir", "b", "batch", "--lang", "pc=perfect_concat", "--lang", "random", "--seeds", "0..3"];
    ok(dir.path(), &args);
    let agg = read(dir.path().join("b/aggregate.tsv"));
    assert!(agg.starts_with("group\tmetric\tn\tmean\tsd\npc\tn_pairs\t3\t64\t"));
    assert!(agg.lines().any(|l| l.starts_with("random\ttopsim\t3\t")));
    let welch = read(dir.path().join("b/welch.tsv"));
    assert!(welch.lines().any(|l| l.starts_with("topsim\tpc\trandom\t")));
    let first = read(dir.path().join("b/pc_s1.metrics.tsv"));
    ok(dir.path(), &args);
    assert_eq!(read(dir.path().join("b/pc_s1.metrics.tsv")), first);

    ok(dir.path(), &["--config", cfg, "--out-dir", "one", "batch", "--lang", "perfect_concat", "--seeds", "5"]);
    let single = read(dir.path().join("one/aggregate.tsv"));
    assert!(single.lines().nth(1).unwrap().ends_with('\t'));
    assert_eq!(read(dir.path().join("one/welch.tsv")).lines().count(), 1);

    let files: Vec<String> = (0..3).flat_map(|s| [format!("b/pc_s{s}.metrics.tsv"), format!("b/random_s{s}.metrics.tsv")]).collect();
    let mut report_args = vec!["--out-dir", "r", "report"];
    report_args.extend(files.iter().map(String::as_str));
    ok(dir.path(), &report_args);
    let report = read(dir.path().join("r/aggregate.tsv"));
    assert!(report.lines().any(|l| l.starts_with("pc\ttopsim\t3\t")));
    let manifest: serde_json::Value = serde_json::from_str(&read(dir.path().join("r/manifest.json"))).unwrap();
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 6);
}
