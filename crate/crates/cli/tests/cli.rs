use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use fpsynth::biostats::{EmpiricalDist, KsResult};
use fpsynth::imgcore::{save_image, GrayImage};
use fpsynth::matcher::ScoreSet;
use fpsynth_cli::commands::*;
use fpsynth_cli::{Manifest, RunConfig};
use regex::Regex;
use tempfile::tempdir;

fn synth(dir: &Path, count: usize, first_seed: u64) -> Manifest {
    let args = SynthArgs { count, impressions: 2, first_seed, class: None, out: dir.to_path_buf() };
    cmd_synth(&RunConfig::default(), &args).unwrap()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fpsynth"))
}

fn files(dir: &Path, ext: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    v.sort();
    v
}

#[test]
fn synth_writes_prints_and_is_reproducible() {
    let (a, b) = (tempdir().unwrap(), tempdir().unwrap());
    let m = synth(a.path(), 2, 5);
    assert_eq!(m.len(), 4);
    assert_eq!(m.identity_count(), 2);
    assert_eq!(m.identities(), ["5", "5", "6", "6"]);
    synth(b.path(), 2, 5);
    let (fa, fb) = (files(a.path(), "png"), files(b.path(), "png"));
    assert_eq!(fa.len(), 4);
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
    }
    let reloaded = Manifest::load(&a.path().join("manifest.tsv")).unwrap();
    assert_eq!(reloaded.entries, m.entries);
}

#[test]
fn ingest_identity_rules() {
    let dir = tempdir().unwrap();
    let imgs = dir.path().join("imgs");
    fs::create_dir(&imgs).unwrap();
    let blank = GrayImage::new(64, 64, 200);
    for k in 0..10 {
        save_image(&blank, &imgs.join(format!("p{k}.png"))).unwrap();
    }
    let m = cmd_ingest(&imgs, &IdentityRule::PerFile, &dir.path().join("all.tsv")).unwrap();
    assert_eq!((m.len(), m.identity_count()), (10, 10));
    let loaded = Manifest::load(&dir.path().join("all.tsv")).unwrap();
    assert_eq!(loaded.entries[0].path, PathBuf::from("imgs/p0.png"));

    let pair = dir.path().join("pair");
    fs::create_dir(&pair).unwrap();
    save_image(&blank, &pair.join("s1_i0.png")).unwrap();
    save_image(&blank, &pair.join("s1_i1.png")).unwrap();
    let rule = IdentityRule::FromFilename(Regex::new(r"s(\d+)").unwrap());
    let m = cmd_ingest(&pair, &rule, &pair.join("manifest.tsv")).unwrap();
    assert_eq!((m.len(), m.identity_count()), (2, 1));
    assert_eq!(m.entries[0].identity_id, "1");

    let nomatch = IdentityRule::FromFilename(Regex::new(r"x(\d+)").unwrap());
    assert!(cmd_ingest(&pair, &nomatch, &pair.join("m2.tsv")).is_err());
    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    assert!(cmd_ingest(&empty, &IdentityRule::PerFile, &dir.path().join("e.tsv")).is_err());
}

#[test]
fn identical_datasets_give_identical_distributions() {
    let dir = tempdir().unwrap();
    let m = synth(dir.path(), 5, 40);
    let t = extract_all(&RunConfig::default(), &m).unwrap();
    // every non-mated partner and every cross pair, so (a) and (b) cover the same comparisons
    let cfg = RunConfig::default();
    let out = dir.path().join("eval");
    let r = cmd_eval_uniqueness(&cfg, &m, &t, &m, &t, &out, 2).unwrap();
    assert_eq!(r.bona.n, 10 * 8);
    assert_eq!(r.cross.n, r.bona.n);
    assert_eq!(r.ks.d, 0.0);
    assert_eq!(r.ks.p, 1.0);
    assert!(r.warnings.iter().any(|w| w.starts_with("FAR below resolution")), "{:?}", r.warnings);

    // the report is a function of the persisted score files alone
    let read = |name: &str| ScoreSet::read(&out.join(name)).unwrap();
    let again = evaluate(&cfg, &read("a_bona.fpsc"), &read("b_cross.fpsc"), &read("c_syn.fpsc")).unwrap();
    assert_eq!(again, r);
    let fm = EmpiricalDist::new(read("b_cross.fpsc").scores()).count_ge(r.threshold);
    assert_eq!(fm, r.cross.false_matches);

    let summary = fs::read_to_string(out.join("summary.md")).unwrap();
    assert!(summary.contains("(b) synthetic vs bonafide"));
    let mut rdr = csv::Reader::from_path(out.join("summary.csv")).unwrap();
    let kv: Vec<(String, String)> = rdr.records().map(|r| r.unwrap()).map(|r| (r[0].into(), r[1].into())).collect();
    assert!(kv.contains(&("threshold".into(), r.threshold.to_string())));
    assert!(kv.contains(&("ks_d".into(), "0".into())));

    let mut hist = csv::Reader::from_path(out.join("a_bona_hist.csv")).unwrap();
    let total: usize = hist.records().map(|r| r.unwrap()[1].parse::<usize>().unwrap()).sum();
    assert_eq!(total, r.bona.n);
    let mut cdf = csv::Reader::from_path(out.join("c_syn_cdf.csv")).unwrap();
    let last: f64 = cdf.records().last().unwrap().unwrap()[1].parse().unwrap();
    assert_eq!(last, 1.0);
}

#[test]
fn fresh_synthetic_seeds_do_not_inflate_false_matches() {
    let dir = tempdir().unwrap();
    let (bd, sd) = (dir.path().join("bona"), dir.path().join("syn"));
    let (bm, sm) = (synth(&bd, 30, 300), synth(&sd, 30, 400));
    let mut cfg = RunConfig::default();
    cfg.eval.target_far = 0.01;
    let (bt, st) = (extract_all(&cfg, &bm).unwrap(), extract_all(&cfg, &sm).unwrap());
    let r = cmd_eval_uniqueness(&cfg, &bm, &bt, &sm, &st, &dir.path().join("eval"), 2).unwrap();
    assert_eq!((r.bona.n, r.cross.n), (60 * 58, 60 * 60));
    // expected count under the bonafide rate, plus three Poisson standard deviations
    let scaled = r.bona.false_matches as f64 * r.cross.n as f64 / r.bona.n as f64;
    assert!(
        r.cross.false_matches as f64 <= scaled + 3.0 * scaled.sqrt(),
        "{} false matches vs {scaled:.1} expected",
        r.cross.false_matches
    );
    let KsResult { n, m, .. } = r.ks;
    assert_eq!((n, m), (r.cross.n, r.bona.n));
}

#[test]
fn metrics_tables_side_by_side() {
    let dir = tempdir().unwrap();
    let (ad, bd) = (dir.path().join("a"), dir.path().join("b"));
    let datasets = vec![
        Dataset { label: "first".into(), manifest: synth(&ad, 2, 11) },
        Dataset { label: "second".into(), manifest: synth(&bd, 2, 21) },
    ];
    let cfg = RunConfig::default();
    let out = dir.path().join("plain");
    let outs = cmd_metrics(&cfg, &datasets, None, &out).unwrap();
    assert_eq!(outs.len(), 2);
    let md = fs::read_to_string(out.join("table1.md")).unwrap();
    let header = md.lines().find(|l| l.starts_with("| Metric")).unwrap();
    assert!(header.contains("first mean") && header.contains("second mean"));
    assert_eq!(header.matches('|').count(), 1 + 1 + 2 * 4);
    assert!(md.contains("NFIQ2 row omitted"));
    assert!(!md.contains("| NFIQ2"));
    let rows = md.lines().filter(|l| l.starts_with("| ") && !l.starts_with("| Metric")).count();
    assert_eq!(rows, 9);
    assert!(!out.join("first_nfiq2_hist.csv").exists());

    let mut prints = csv::Reader::from_path(out.join("first_prints.csv")).unwrap();
    let recs: Vec<_> = prints.records().map(|r| r.unwrap()).collect();
    assert_eq!(recs.len(), 4);
    let area: f64 = recs[0][11].parse().unwrap();
    assert_eq!(area, outs[0].prints[0].area_kpx2);

    let scores = dir.path().join("nfiq2.csv");
    fs::write(&scores, "print_id,nfiq2\ns11_i0,40\ns11_i1,55\ns12_i0,61\ns12_i1,47\ns21_i0,30\n").unwrap();
    let out = dir.path().join("scored");
    cmd_metrics(&cfg, &datasets, Some(&scores), &out).unwrap();
    let md = fs::read_to_string(out.join("table1.md")).unwrap();
    assert!(md.lines().any(|l| l.starts_with("| NFIQ2")));
    let mut hist = csv::Reader::from_path(out.join("first_nfiq2_hist.csv")).unwrap();
    let n: usize = hist.records().map(|r| r.unwrap()[1].parse::<usize>().unwrap()).sum();
    assert_eq!(n, 4);
    let mut long = csv::Reader::from_path(out.join("table1.csv")).unwrap();
    let second_nfiq2 = long.records().map(|r| r.unwrap()).find(|r| &r[0] == "second" && &r[1] == "nfiq2").unwrap();
    assert_eq!((&second_nfiq2[2], &second_nfiq2[3]), ("1", "4"));
}

#[test]
fn fid_between_feature_files() {
    let dir = tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let wide = dir.path().join("wide.csv");
    fs::write(&a, "f\n0\n2\n").unwrap();
    fs::write(&b, "3\n5\n7\n").unwrap();
    fs::write(&wide, "1,2\n3,4\n5,7\n").unwrap();
    assert_eq!(cmd_fid(&a, &a).unwrap().distance, 0.0);
    // N(1, 2) vs N(5, 4): (mu_a - mu_b)^2 + (sigma_a - sigma_b)^2
    let want = 16.0 + (2f64.sqrt() - 2.0).powi(2);
    assert!((cmd_fid(&a, &b).unwrap().distance_squared - want).abs() < 1e-9);
    assert!(cmd_fid(&a, &wide).is_err());
}

#[test]
fn binary_exit_codes() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "matcher.t_theta_deg = 11.25\n").unwrap();
    let out = dir.path().join("prints");
    let st = bin()
        .args(["--config", cfg.to_str().unwrap(), "--seed", "70", "synth", "--count", "1", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    assert!(out.join("s70_i1.png").is_file());

    let a = dir.path().join("a.csv");
    fs::write(&a, "1\n2\n4\n").unwrap();
    let run = bin().args(["fid"]).arg(&a).arg(&a).output().unwrap();
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "0");

    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "matcher.tolerance = 3\n").unwrap();
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code();
    assert_eq!(code(&["--config", bad.to_str().unwrap(), "fid", "x", "y"]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));
    assert_eq!(code(&["synth", "--count", "0", "--out", out.to_str().unwrap()]), Some(2));
    assert_eq!(code(&["extract", "--manifest", "/nonexistent/m.tsv", "--out", "/tmp/x"]), Some(1));
    let wide = dir.path().join("w.csv");
    fs::write(&wide, "1,2\n3,4\n5,7\n").unwrap();
    assert_eq!(code(&["fid", a.to_str().unwrap(), wide.to_str().unwrap()]), Some(2));
}
