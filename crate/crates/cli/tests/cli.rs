use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use topcap_core::signal::{write_textgrid, write_wav_pcm16};
use topcap_core::PhoneInterval;

fn topcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_topcap")).args(args).output().expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

fn ok(args: &[&str]) {
    let output = topcap(args);
    assert_eq!(code(&output), 0, "{args:?}: {}", String::from_utf8_lossy(&output.stderr));
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn lines(file: PathBuf) -> Vec<String> {
    fs::read_to_string(&file).unwrap_or_else(|e| panic!("{}: {e}", file.display())).lines().map(String::from).collect()
}

fn write_series(file: &Path, samples: impl Iterator<Item = f64>) {
    let mut text = String::from("value\n");
    for x in samples {
        text.push_str(&format!("{x}\n"));
    }
    fs::write(file, text).unwrap();
}

#[test]
fn synth_writes_variations() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path());
    ok(&["--out", out, "synth", "--kind", "frequency", "--c", "4"]);
    assert_eq!(lines(dir.path().join("frequency-c4.csv")).len(), 2201);
    ok(&["--out", out, "synth", "--kind", "amplitude", "--c", "1"]);
    assert_eq!(lines(dir.path().join("amplitude-c1.csv"))[1], "0.25");
    assert!(dir.path().join("synth.manifest.json").is_file());
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path());
    assert_eq!(code(&topcap(&["--out", out, "synth", "--kind", "frequency", "--c", "5"])), 1);
    assert_eq!(code(&topcap(&["--out", out, "synth", "--kind", "sawtooth", "--c", "1"])), 1);
    assert_eq!(code(&topcap(&["--out", out, "frobnicate"])), 1);
    assert_eq!(code(&topcap(&["--out", out, "sweep", "--record", "x.csv", "--skips", "0"])), 1);
    assert_eq!(code(&topcap(&["--out", out, "ingest", "--wav", "a.wav"])), 1);
    assert_eq!(code(&topcap(&["--help"])), 0);
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path());
    assert_eq!(code(&topcap(&["--out", out, "ph", "--cloud", "/no/such/cloud.csv"])), 2);
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "value\n1\nnot-a-number\n").unwrap();
    assert_eq!(code(&topcap(&["--out", out, "embed", "--series", path(&bad)])), 2);
    let config = dir.path().join("config.json");
    fs::write(&config, r#"{"embedding": {"dims": 3}}"#).unwrap();
    assert_eq!(code(&topcap(&["--out", out, "--config", path(&config), "synth", "--kind", "frequency", "--c", "1"])), 2);
}

fn speech_fixture(dir: &Path) -> (PathBuf, PathBuf) {
    let rate = 16000;
    let samples: Vec<i16> = (0..rate)
        .map(|n| {
            let t = n as f64 / rate as f64;
            let v = if (0.1..0.3).contains(&t) {
                0.5 * (std::f64::consts::TAU * 120.0 * t).sin()
            } else if (0.4..0.6).contains(&t) {
                0.3 * (((n * 7919) % 1000) as f64 / 500.0 - 1.0)
            } else {
                0.0
            };
            (v * 32767.0) as i16
        })
        .collect();
    let wav = dir.join("speaker.wav");
    fs::write(&wav, write_wav_pcm16(&samples, rate as u32)).unwrap();
    let interval = |label: &str, start_s: f64, end_s: f64| PhoneInterval { label: label.into(), start_s, end_s, tier: "phones".into() };
    let grid = dir.join("speaker.TextGrid");
    let intervals = [interval("m", 0.1, 0.3), interval("s", 0.4, 0.6), interval("d", 0.7, 0.8)];
    fs::write(&grid, write_textgrid(&intervals, 1.0)).unwrap();
    (wav, grid)
}

#[test]
fn ingest_labels_segments_and_skips_unlisted_phones() {
    let dir = tempfile::tempdir().unwrap();
    let (wav, grid) = speech_fixture(dir.path());
    let out = dir.path().join("out");
    ok(&["--out", path(&out), "ingest", "--wav", path(&wav), "--textgrid", path(&grid)]);
    let records = lines(out.join("records.csv"));
    assert_eq!(records.len(), 3);
    assert!(records[1].contains(",voiced,") && records[2].contains(",voiceless,"), "{records:?}");
    assert_eq!(lines(out.join("segments/speaker-00000.csv")).len(), 3201);
    let index = lines(out.join("ingest_index.csv"));
    assert!(index.iter().any(|l| l.starts_with("speaker,d,") && l.contains(",skipped,")), "{index:?}");

    let by_dir = dir.path().join("by-dir");
    ok(&["--out", path(&by_dir), "ingest", "--dir", path(dir.path())]);
    assert_eq!(fs::read(by_dir.join("records.csv")).unwrap(), fs::read(out.join("records.csv")).unwrap());

    fs::remove_file(&grid).unwrap();
    assert_eq!(code(&topcap(&["--out", path(&out), "ingest", "--wav", path(&wav), "--textgrid", path(&grid)])), 2);
}

#[test]
fn pipeline_reports_every_record() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    fs::create_dir(&data).unwrap();
    let cosine = |len: usize, period: f64| (0..len).map(move |n| (std::f64::consts::TAU * n as f64 / period).cos());
    write_series(&data.join("long.csv"), cosine(1500, 90.0));
    // 520 samples, period 80: tau 5, window 496, five points
    write_series(&data.join("few.csv"), cosine(520, 80.0));
    // loud part of 400 samples only
    write_series(&data.join("short.csv"), cosine(400, 50.0).chain(std::iter::repeat_n(0.0, 600)));
    write_series(&data.join("silent.csv"), std::iter::repeat_n(0.01, 800));
    fs::write(
        data.join("records.csv"),
        "record_id,label,file,sample_rate\nlong,voiced,long.csv,0\nfew,voiced,few.csv,0\nshort,voiceless,short.csv,0\nsilent,voiceless,silent.csv,0\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    ok(&["--out", path(&out), "pipeline", "--input", path(&data)]);
    let index = lines(out.join("pipeline_index.csv"));
    assert_eq!(index.len(), 5);
    let status = |id: &str| index.iter().find(|l| l.starts_with(&format!("{id},"))).unwrap().clone();
    assert!(status("long").contains(",ok,"));
    assert!(status("few").contains("too-few-points (5 < 40)"), "{}", status("few"));
    assert!(status("short").contains("too-short"), "{}", status("short"));
    assert!(status("silent").contains("no-signal"), "{}", status("silent"));
    let features = lines(out.join("features.csv"));
    assert_eq!(features.len(), 2);
    assert!(features[1].starts_with("long,voiced,"));
    assert!(out.join("diagrams/long.json").is_file());

    let single = dir.path().join("single");
    assert_eq!(code(&topcap(&["--out", path(&single), "pipeline", "--input", path(&data.join("long.csv"))])), 1);
    ok(&["--out", path(&single), "pipeline", "--input", path(&data.join("long.csv")), "--label", "voiced"]);
    assert_eq!(lines(single.join("features.csv"))[1], features[1]);
}

#[test]
fn pipeline_reads_audio_directory_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let audio = dir.path().join("audio");
    fs::create_dir(&audio).unwrap();
    speech_fixture(&audio);
    let config = dir.path().join("config.json");
    fs::write(&config, format!(r#"{{"corpus": {{"audio_dir": {:?}}}, "embedding": {{"d": 20}}}}"#, path(&audio))).unwrap();
    let out = dir.path().join("out");
    ok(&["--out", path(&out), "--config", path(&config), "pipeline"]);
    let index = lines(out.join("pipeline_index.csv"));
    assert_eq!(index.len(), 3, "{index:?}");
    assert!(index[1].starts_with("speaker-00000,voiced,ok"), "{index:?}");
}

#[test]
fn train_eval_on_separable_features() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("record_id,label,birth,lifetime\n");
    for i in 0..30 {
        text.push_str(&format!("v{i:02},voiced,{},{}\n", 0.5 + 0.01 * i as f64, 3.0 + 0.05 * i as f64));
        text.push_str(&format!("u{i:02},voiceless,{},{}\n", 2.0 + 0.02 * i as f64, 0.2 + 0.01 * i as f64));
    }
    let features = dir.path().join("features.csv");
    fs::write(&features, text).unwrap();
    let out = dir.path().join("out");
    ok(&["--out", path(&out), "--seed", "3", "train-eval", "--features", path(&features)]);
    assert_eq!(lines(out.join("summary.csv")), ["model,accuracy,auc", "knn,1,1", "logistic,1,1", "gaussian_nb,1,1", "linear_svm,1,1"]);
    let roc = lines(out.join("roc_knn.csv"));
    assert_eq!(roc.first().unwrap(), "fpr,tpr");
    assert_eq!(roc[1], "0,0");
    assert_eq!(roc.last().unwrap(), "1,1");
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("eval_report.json")).unwrap()).unwrap();
    assert_eq!(report[0]["fold_accuracies"].as_array().unwrap().len(), 5);
    assert_eq!(report[0]["n_test"], 18);

    let only = dir.path().join("only");
    ok(&["--out", path(&only), "train-eval", "--features", path(&features), "--model", "knn,logistic"]);
    assert_eq!(lines(only.join("summary.csv")).len(), 3);
    assert_eq!(code(&topcap(&["--out", path(&only), "train-eval", "--features", path(&features), "--model", "tree"])), 1);
}

#[test]
fn sweep_marks_infeasible_windows_empty() {
    let dir = tempfile::tempdir().unwrap();
    let record = dir.path().join("cos.csv");
    write_series(&record, (0..600).map(|n| (std::f64::consts::TAU * n as f64 / 50.0).cos()));
    let out = dir.path().join("out");
    ok(&["--out", path(&out), "sweep", "--record", path(&record), "--dims", "3", "--delays", "10,300", "--skips", "2"]);
    let rows = lines(out.join("sweep.csv"));
    assert_eq!(rows[0], "d,delay,skip,T,rule,points,max_persistence");
    assert!(rows[1].starts_with("3,10,2,,explicit,290,"), "{rows:?}");
    assert_eq!(rows[2], "3,300,2,,explicit,0,empty");
    ok(&["--out", path(&out), "sweep", "--record", path(&record), "--dims", "4", "--skips", "1..2"]);
    let rows = lines(out.join("sweep.csv"));
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("4,75,1,50,ratio,"), "{rows:?}");
}

#[test]
fn ph_and_plot_on_unit_square() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = dir.path().join("square.csv");
    fs::write(&cloud, "x0,x1\n0,0\n1,0\n1,1\n0,1\n").unwrap();
    let out = dir.path().join("out");
    ok(&["--out", path(&out), "ph", "--cloud", path(&cloud)]);
    let d1: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("square.dim1.json")).unwrap()).unwrap();
    assert_eq!(d1["dim"], 1);
    let point = d1["points"][0].as_array().unwrap();
    assert_eq!(point[0].as_f64().unwrap(), 1.0);
    assert!((point[1].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(lines(out.join("square.diagram.csv")), ["dim,birth,death", "0,0,1", "0,0,1", "0,0,1", "0,0,inf", &format!("1,1,{}", point[1])]);

    ok(&["--out", path(&out), "plot", "--diagram", path(&out.join("square.dim0.json"))]);
    let svg = fs::read_to_string(out.join("square.dim0.svg")).unwrap();
    assert_eq!(svg.matches("<circle").count(), 3);
    assert_eq!(svg.matches("<polygon").count(), 1);
}

#[test]
fn embed_writes_cloud_sidecar_and_pca() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("wave.csv");
    write_series(&series, (0..1000).map(|n| (std::f64::consts::TAU * n as f64 / 40.0).sin()));
    let out = dir.path().join("out");
    ok(&["--out", path(&out), "embed", "--series", path(&series), "--d", "10", "--skip", "3", "--pca"]);
    let params: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("wave.params.json")).unwrap()).unwrap();
    assert_eq!(params, serde_json::json!({"d": 10, "tau": 24, "skip": 3, "T": 40, "rule": "ratio"}));
    let cloud = lines(out.join("wave.cloud.csv"));
    assert_eq!(cloud.len(), 1 + (1000 - 9 * 24 - 1) / 3 + 1);
    assert_eq!(lines(out.join("wave.pca.csv"))[0], "x,y,z");
    let ratios: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("wave.pca.json")).unwrap()).unwrap();
    let r: Vec<f64> = ratios["explained_ratio"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(r[0] + r[1] > 0.99, "{r:?}");
}

#[test]
fn rerun_reproduces_outputs_and_jobs_do_not_matter() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    ok(&["--out", path(&corpus), "--seed", "11", "corpus", "--voiced", "10", "--voiceless", "10"]);
    let first = dir.path().join("first");
    ok(&["--out", path(&first), "--seed", "11", "--jobs", "1", "pipeline", "--input", path(&corpus), "--evaluate"]);
    let second = dir.path().join("second");
    ok(&["--out", path(&second), "--jobs", "3", "rerun", "--manifest", path(&first.join("pipeline.manifest.json"))]);
    for name in ["features.csv", "pipeline_index.csv", "eval_report.json", "summary.csv", "pipeline.manifest.json"] {
        assert_eq!(fs::read(first.join(name)).unwrap(), fs::read(second.join(name)).unwrap(), "{name}");
    }
    let third = dir.path().join("third");
    ok(&["--out", path(&third), "--seed", "11", "--jobs", "2", "pipeline", "--input", path(&corpus), "--evaluate"]);
    assert_eq!(fs::read(first.join("features.csv")).unwrap(), fs::read(third.join("features.csv")).unwrap());
}
