//! Behavioral tests driving the compiled binary.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fractal-analog"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn run_err(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(!out.status.success(), "command {args:?} unexpectedly passed");
    out
}

fn write(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

fn data_lines(text: &str) -> Vec<String> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.to_string())
        .collect()
}

#[test]
fn encode_decode_roundtrip_noiseless() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    write(
        &cfg,
        "depth = 12\nplanes_per_level = 2\nstages = 4\nblock_length = 6\ncode = golay23\n",
    );
    let src = dir.path().join("src.txt");
    let samples: Vec<f64> = (0..12).map(|i| (i as f64 - 6.0) / 4.0).collect();
    write(
        &src,
        &samples.iter().map(|s| format!("{s}\n")).collect::<String>(),
    );
    let enc = dir.path().join("enc.txt");
    let dec = dir.path().join("dec.txt");
    run_ok(&[
        "encode",
        src.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        enc.to_str().unwrap(),
    ]);
    run_ok(&[
        "decode",
        enc.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dec.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&dec).unwrap();
    let estimates: Vec<f64> = data_lines(&text)
        .iter()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(estimates.len(), samples.len());
    let bound = 2.0 * 3.0f64.sqrt() / 256.0; // 2 sqrt(3) 2^-(B*I)
    for (s, e) in samples.iter().zip(&estimates) {
        assert!((s - e).abs() <= bound, "{s} vs {e}");
    }
}

#[test]
fn empty_input_gives_empty_output() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("empty.txt");
    write(&src, "");
    let out = run_ok(&["encode", src.to_str().unwrap()]);
    assert!(data_lines(&out).is_empty());
    // Header is still present.
    assert!(out.starts_with("# fractal-analog"));
    let out = run_ok(&["decode", src.to_str().unwrap()]);
    assert!(data_lines(&out).is_empty());
}

#[test]
fn encode_range_error_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("bad.txt");
    write(&src, "0.5\n# fine\n9.0\n");
    let out = run_err(&["encode", src.to_str().unwrap()]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "stderr: {err}");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn decode_rejects_partial_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    write(&cfg, "depth = 8\nblock_length = 4\n");
    let ch = dir.path().join("ch.txt");
    write(&ch, "0.1\n0.2\n0.3\n");
    let out = run_err(&[
        "decode",
        ch.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("blocks"));
}

#[test]
fn unknown_config_key_rejected_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    write(&cfg, "w = 0.75\nnot_a_key = 3\n");
    let out = run_err(&["sweep", "--config", cfg.to_str().unwrap()]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("not_a_key"), "{err}");
}

#[test]
fn header_records_version_seed_and_hash() {
    let out = run_ok(&["capacity", "--seed", "77"]);
    let first = out.lines().next().unwrap();
    assert!(first.contains(env!("CARGO_PKG_VERSION")));
    assert!(first.contains("seed=77"));
    assert!(first.contains("config_hash="));
    // Flag overrides any config default.
    assert!(out.lines().any(|l| l == "# seed = 77"));
}

#[test]
fn capacity_column_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cap.conf");
    write(&cfg, "channel = gu\nsnr_db_min = -6\nsnr_db_max = 12\nsnr_db_step = 2\n");
    let out = run_ok(&["capacity", "--config", cfg.to_str().unwrap()]);
    let caps: Vec<f64> = data_lines(&out)
        .iter()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(caps.len() >= 9);
    // Higher SNR means smaller sigma, so capacity rises along the grid.
    for w in caps.windows(2) {
        assert!(w[1] >= w[0] - 1e-9, "{caps:?}");
    }
    assert!(caps.iter().all(|&c| (0.0..=1.0).contains(&c)));
}

#[test]
fn bounds_curve_family_and_slope() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("b.conf");
    write(
        &cfg,
        "code = golay23\nplanes_per_level = 2\nstages = 50\nsnr_db_min = 30\nsnr_db_max = 80\nsnr_db_step = 2\nstaircase_gamma = 2\n",
    );
    let out = run_ok(&["bounds", "--config", cfg.to_str().unwrap()]);
    let rows = data_lines(&out);
    let labels: std::collections::BTreeSet<String> = rows
        .iter()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().to_string())
        .collect();
    assert!(labels.iter().any(|l| l.starts_with("union_bound[n=23")));
    assert!(labels.iter().any(|l| l.starts_with("shannon[N=3.8333")));
    assert!(labels.iter().any(|l| l.starts_with("shannon[N=2")));
    assert!(labels.iter().any(|l| l.starts_with("shannon_uniform[")));
    assert!(labels.iter().any(|l| l.starts_with("staircase[")));
    // Fig.-9-style shape: the union bound falls at roughly -2 dB/dB.
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .skip(1)
        .filter(|l| l.contains("union_bound"))
        .map(|l| {
            let mut it = l.split(',');
            (
                it.next().unwrap().parse().unwrap(),
                it.next().unwrap().parse().unwrap(),
            )
        })
        .collect();
    let slope = fractal_analog::sim::slope_fit(&pts, (40.0, 70.0)).unwrap();
    assert!((-2.2..=-1.8).contains(&slope), "slope = {slope}");
}

#[test]
fn mismatched_decode_config_completes() {
    // Encode with B = 2, decode with B = 1: same block geometry for the
    // uncoded component, garbage output, clean exit.
    let dir = tempfile::tempdir().unwrap();
    let enc_cfg = dir.path().join("enc.conf");
    write(&enc_cfg, "depth = 16\nplanes_per_level = 2\nblock_length = 6\n");
    let dec_cfg = dir.path().join("dec.conf");
    write(&dec_cfg, "depth = 16\nplanes_per_level = 1\nblock_length = 12\n");
    let src = dir.path().join("s.txt");
    write(&src, &(0..6).map(|i| format!("{}\n", i as f64 / 8.0)).collect::<String>());
    let enc = dir.path().join("e.txt");
    run_ok(&[
        "encode",
        src.to_str().unwrap(),
        "--config",
        enc_cfg.to_str().unwrap(),
        "--out",
        enc.to_str().unwrap(),
    ]);
    let out = run_ok(&["decode", enc.to_str().unwrap(), "--config", dec_cfg.to_str().unwrap()]);
    let values: Vec<f64> = data_lines(&out).iter().map(|l| l.parse().unwrap()).collect();
    assert_eq!(values.len(), 12);
    assert!(values.iter().all(|v| v.is_finite()));
}

#[test]
fn sweep_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.conf");
    write(
        &cfg,
        "depth = 8\nstages = 2\nblock_length = 8\ntrials = 50\nsnr_grid_db = 5, 10\nseed = 3\n",
    );
    let a = run_ok(&["sweep", "--config", cfg.to_str().unwrap()]);
    let b = run_ok(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(a, b);
    // Changing the seed changes the data.
    let c = run_ok(&["sweep", "--config", cfg.to_str().unwrap(), "--seed", "4"]);
    assert_ne!(a, c);
}

#[test]
fn stretch_emits_both_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("st.conf");
    write(&cfg, "stretch_sweep_points = 64\nstretch_mc_points = 2000\nstretch_deltas = 0, 0.0625\n");
    let sweep = dir.path().join("sw.csv");
    let dj = dir.path().join("dj.csv");
    run_ok(&[
        "stretch",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        sweep.to_str().unwrap(),
        "--dj-out",
        dj.to_str().unwrap(),
    ]);
    let sweep_rows = data_lines(&std::fs::read_to_string(&sweep).unwrap());
    assert_eq!(sweep_rows.len(), 65); // header row + 64 grid points
    assert!(sweep_rows[0].starts_with("x1,y1"));
    let dj_rows = data_lines(&std::fs::read_to_string(&dj).unwrap());
    assert_eq!(dj_rows.len(), 3);
    // Delta = 0 gives exactly zero stretch.
    let zero: Vec<&str> = dj_rows[1].split(',').collect();
    assert_eq!(zero[0], "0");
    assert_eq!(zero[1], "0");
}

#[test]
fn level_error_curve_export() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("pe.conf");
    write(&cfg, "channel = level-error\nsnr_db_min = 0\nsnr_db_max = 20\nsnr_db_step = 5\n");
    let out = run_ok(&["capacity", "--config", cfg.to_str().unwrap()]);
    let rows = data_lines(&out);
    assert!(rows[0].starts_with("snr_db,sigma,p_error"));
    let ps: Vec<f64> = rows
        .iter()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ps.len(), 5);
    // Error probability falls with SNR and stays inside (0, 1/2).
    for w in ps.windows(2) {
        assert!(w[1] < w[0]);
    }
    assert!(ps.iter().all(|&p| p > 0.0 && p < 0.5));
}

#[test]
fn user_supplied_generator_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let gen = dir.path().join("simplex.txt");
    write(&gen, "1 0 1 0 1 0 1\n0 1 0 0 1 1 1\n0 0 1 1 1 1 0\n");
    let cfg = dir.path().join("run.conf");
    write(
        &cfg,
        &format!(
            "depth = 6\nplanes_per_level = 1\nstages = 4\nblock_length = 3\ncode = file:{}\n",
            gen.display()
        ),
    );
    let src = dir.path().join("src.txt");
    write(&src, "0.25\n-0.5\n1.5\n");
    let enc = dir.path().join("enc.txt");
    run_ok(&[
        "encode",
        src.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        enc.to_str().unwrap(),
    ]);
    // Three info bits per level expand to seven channel uses.
    let symbols = data_lines(&std::fs::read_to_string(&enc).unwrap());
    assert_eq!(symbols.len(), 7);
    let dec = run_ok(&["decode", enc.to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    let estimates: Vec<f64> = data_lines(&dec).iter().map(|l| l.parse().unwrap()).collect();
    let bound = 2.0 * 3.0f64.sqrt() / 16.0;
    for (s, e) in [0.25, -0.5, 1.5].iter().zip(&estimates) {
        assert!((s - e).abs() <= bound, "{s} vs {e}");
    }
}

#[test]
fn threads_flag_accepted() {
    let out = run_ok(&["capacity", "--threads", "2"]);
    assert!(out.contains("capacity_bits"));
    let err = run_err(&["capacity", "--threads", "0"]);
    assert!(String::from_utf8_lossy(&err.stderr).contains("threads"));
}
