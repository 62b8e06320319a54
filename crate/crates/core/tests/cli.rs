use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use skelsig::cli::{write_clip_file, write_descriptor};
use skelsig::skeleton::synthetic::{generate, SyntheticConfig};

fn skelsig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skelsig")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const EXTRACT: &str = r#"
[features]
sampled_frames = 3
triple_level = 2
joint_time_level = 3

[features.blocks]
temporal_spatial = false

[augment]
flip = true
noisy_copies = 1
"#;

const TRAIN: &str = "max_epochs = 30\ndropconnect_p = 0.5\nseed = 2\n";

/// Writes a small synthetic dataset: descriptor, clips, manifest and configs.
fn dataset(dir: &Path) {
    let data = generate(&SyntheticConfig { train_per_class: 6, test_per_class: 3, seed: 5, ..SyntheticConfig::default() }).unwrap();
    write_descriptor(&dir.join("skeleton.desc"), &data.descriptor).unwrap();
    fs::create_dir_all(dir.join("clips")).unwrap();
    let mut manifest = String::from("# clip,label,split,actors\n");
    for (split, clips) in [("train", &data.train), ("test", &data.test)] {
        for clip in clips {
            let name = format!("clips/{}.csv", clip.id);
            write_clip_file(&dir.join(&name), clip).unwrap();
            let label = &data.descriptor.class_names[clip.label.unwrap()];
            manifest.push_str(&format!("{name},{label},{split},1\n"));
        }
    }
    fs::write(dir.join("manifest.csv"), manifest).unwrap();
    fs::write(dir.join("extract.toml"), EXTRACT).unwrap();
    fs::write(dir.join("train.toml"), TRAIN).unwrap();
}

#[test]
fn sig_compute_prints_segment_signature() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("seg.csv");
    fs::write(&path, "0,0\n3,4\n").unwrap();
    let out = skelsig(&["sig", "compute", p(&path), "--level", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "1\t1\t3\n1\t2\t4\n2\t1,1\t4.5\n2\t1,2\t6\n2\t2,1\t6\n2\t2,2\t8\n");
}

#[test]
fn sig_compute_transforms() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.csv");
    fs::write(&path, "1\n3\n2\n").unwrap();
    let out = skelsig(&["sig", "compute", p(&path), "--level", "1", "--lead-lag", "2", "--add-time"]);
    assert_eq!(out.status.code(), Some(0));
    // Lead-lag path (1,0) (3,1) (2,3), then time 0, 0.5, 1.
    assert_eq!(stdout(&out), "1\t1\t1\n1\t2\t3\n1\t3\t1\n");
    let wide = dir.path().join("wide.csv");
    fs::write(&wide, "1,2\n3,4\n").unwrap();
    assert_eq!(skelsig(&["sig", "compute", p(&wide), "--level", "1", "--lead-lag", "2"]).status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "0,0\n1,x\n").unwrap();
    let out = skelsig(&["sig", "compute", p(&bad), "--level", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let ragged = dir.path().join("ragged.csv");
    fs::write(&ragged, "0,0\n1\n").unwrap();
    assert_eq!(skelsig(&["sig", "compute", p(&ragged), "--level", "2"]).status.code(), Some(2));
    let missing = dir.path().join("missing.csv");
    assert_eq!(skelsig(&["sig", "compute", p(&missing), "--level", "2"]).status.code(), Some(1));
    let good = dir.path().join("good.csv");
    fs::write(&good, "0,0\n1,1\n").unwrap();
    assert_eq!(skelsig(&["sig", "compute", p(&good), "--level", "0"]).status.code(), Some(1));
    assert_eq!(skelsig(&["bench", "--dim", "2", "--level", "2", "--points", "5", "--repeats", "0"]).status.code(), Some(1));
    assert_eq!(skelsig(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(skelsig(&["--help"]).status.code(), Some(0));
    let garbage = dir.path().join("model.signet");
    fs::write(&garbage, b"NOTAMODEL").unwrap();
    let feats = dir.path().join("x.sigfeat");
    fs::write(&feats, b"SIGFEAT1").unwrap();
    let labels = dir.path().join("x.labels");
    fs::write(&labels, "0\n").unwrap();
    let out = skelsig(&["eval", "--model", p(&garbage), "--features", p(&feats), "--labels", p(&labels)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_reports_coefficient_count() {
    let out = skelsig(&["bench", "--dim", "2", "--level", "2", "--points", "10", "--repeats", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("coefficients: 6\n"));
}

#[test]
fn extract_train_eval_predict() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    dataset(d);
    let (manifest, desc, extract) = (d.join("manifest.csv"), d.join("skeleton.desc"), d.join("extract.toml"));
    let run_extract = |out: &Path| {
        skelsig(&["features", "extract", "--manifest", p(&manifest), "--descriptor", p(&desc), "--config", p(&extract), "--out", p(out)])
    };
    let first = run_extract(&d.join("f1"));
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let text = stdout(&first);
    assert!(text.contains("train rows: 72\n"), "{text}");
    assert!(text.contains("test rows: 12\n"));
    assert!(text.contains("D_SP: 630\n"));
    assert!(text.contains("D_TS: 0\n"));
    // Rerunning gives byte-identical files.
    assert_eq!(run_extract(&d.join("f2")).status.code(), Some(0));
    for name in ["train.sigfeat", "test.sigfeat", "scaler.sigfeat", "train.labels"] {
        assert_eq!(fs::read(d.join("f1").join(name)).unwrap(), fs::read(d.join("f2").join(name)).unwrap(), "{name}");
    }

    let f = d.join("f1");
    let (model, history) = (d.join("model.signet"), d.join("history.txt"));
    let out = skelsig(&[
        "train", "--features", p(&f.join("train.sigfeat")), "--labels", p(&f.join("train.labels")),
        "--config", p(&d.join("train.toml")), "--model", p(&model), "--history", p(&history),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(&history).unwrap().lines().count(), 31);

    let out = skelsig(&[
        "eval", "--model", p(&model), "--features", p(&f.join("test.sigfeat")), "--labels", p(&f.join("test.labels")),
        "--descriptor", p(&desc),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout(&out);
    // The printed accuracy is the confusion-matrix diagonal over the total.
    let first_line = report.lines().next().unwrap();
    let (value, counts) = first_line.trim_start_matches("accuracy: ").split_once(' ').unwrap();
    let (hits, total) = counts.trim_matches(|c| c == '(' || c == ')').split_once('/').unwrap();
    let diag: usize = report
        .lines()
        .skip_while(|l| !l.starts_with("confusion"))
        .skip(1)
        .enumerate()
        .map(|(c, l)| l.split('\t').nth(c + 1).unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(diag.to_string(), hits);
    assert_eq!(value.parse::<f64>().unwrap(), diag as f64 / total.parse::<f64>().unwrap());

    let clip = d.join("clips/test-2-0.csv");
    let out = skelsig(&[
        "predict", "--clip", p(&clip), "--descriptor", p(&desc), "--model", p(&model),
        "--scaler", p(&f.join("scaler.sigfeat")), "--extract-config", p(&extract),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let line = stdout(&out);
    let (name, prob) = line.trim().split_once('\t').unwrap();
    assert!(["wave", "arm_circles", "squat", "walk"].contains(&name));
    assert!((0.0..=1.0).contains(&prob.parse::<f64>().unwrap()));
}

#[test]
fn malformed_inputs_are_format_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    dataset(d);
    let desc = d.join("skeleton.desc");
    let unsorted = d.join("clips/unsorted.csv");
    fs::write(&unsorted, "0,0,1,0.1,0.2\n0,0,0,0.3,0.4\n").unwrap();
    let out = skelsig(&["predict", "--clip", p(&unsorted), "--descriptor", p(&desc), "--model", "m", "--scaler", "s"]);
    assert_eq!(out.status.code(), Some(2));
    let manifest = d.join("bad_manifest.csv");
    fs::write(&manifest, "clips/train-0-0.csv,dance,train,1\n").unwrap();
    let out = skelsig(&["features", "extract", "--manifest", p(&manifest), "--descriptor", p(&desc), "--out", p(&d.join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dance"));
    let bad_desc = d.join("bad.desc");
    fs::write(&bad_desc, "joints = 3\ndims = 2\nmirror = 1,1,0\nclasses = a\n").unwrap();
    let out = skelsig(&["features", "extract", "--manifest", p(&d.join("manifest.csv")), "--descriptor", p(&bad_desc), "--out", p(&d.join("o"))]);
    assert_eq!(out.status.code(), Some(2));
}
