//! The six subcommands. Every output starts with a header recording the tool
//! version, the hash of the fully-resolved configuration and the master
//! seed, followed by the resolved `key = value` lines; reruns with identical
//! inputs are byte-identical.

use std::path::Path;

use fractal_analog::bitplane::{denormalize, SQRT_3};
use fractal_analog::bounds::{distortion_curve, shannon_curve, BoundCurve};
use fractal_analog::channel::{
    binary_input_capacity, level_error_prob, AwgnChannel, GaussUniform, Noise,
};
use fractal_analog::code::{registry_lookup, RegistryEntry};
use fractal_analog::scdec::{staircase_points, AnalogCode};
use fractal_analog::sim::{run_sweep, CodeSpec, SimConfig};

use crate::config::Settings;
use crate::CliError;

fn write_out(target: Option<&Path>, content: &str) -> Result<(), CliError> {
    match target {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::new(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn header(settings: &Settings, seed: u64) -> String {
    let (lines, hash) = settings.echo();
    let mut out = format!(
        "# fractal-analog {} seed={seed} config_hash={hash:016x}\n",
        env!("CARGO_PKG_VERSION")
    );
    for line in lines {
        out.push_str("# ");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Input file format: one real per line; blank lines and `#` comments skipped.
fn read_reals(path: &Path) -> Result<Vec<(f64, usize)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value = line.parse::<f64>().map_err(|_| {
            CliError::new(format!(
                "{} line {}: {line:?} is not a real number",
                path.display(),
                idx + 1
            ))
        })?;
        out.push((value, idx + 1));
    }
    Ok(out)
}

fn code_spec(settings: &mut Settings, seed: u64) -> Result<CodeSpec, CliError> {
    let name = settings.get_str("code", "uncoded");
    if name == "ra" {
        let repeat = settings.get_usize("repeat", 2)?;
        let grouping = settings.get_usize("grouping", 1)?;
        let iterations = settings.get_usize("iterations", 20)?;
        let interleaver_seed = settings.get_u64("interleaver_seed", seed)?;
        Ok(CodeSpec::Ra {
            repeat,
            grouping,
            iterations,
            interleaver_seed,
        })
    } else {
        Ok(CodeSpec::Registry(name))
    }
}

/// Resolve the pipeline parameters shared by encode and decode and build the
/// analog code.
fn pipeline_code(settings: &mut Settings, seed: u64) -> Result<(AnalogCode, usize), CliError> {
    let w = settings.get_f64("w", 0.75)?;
    let depth = settings.get_usize("depth", 32)?;
    let planes_per_level = settings.get_usize("planes_per_level", 1)?;
    if planes_per_level == 0 || !depth.is_multiple_of(planes_per_level) {
        return Err(CliError::new(format!(
            "planes_per_level {planes_per_level} must divide depth {depth}"
        )));
    }
    let levels = depth / planes_per_level;
    let stages = settings.get_usize("stages", levels)?;
    let block_len = settings.get_usize("block_length", 1)?;
    let code = code_spec(settings, seed)?;
    if let Some(declared) = settings
        .contains("info_length")
        .then(|| settings.get_usize("info_length", 0))
        .transpose()?
    {
        if declared != block_len * planes_per_level {
            return Err(CliError::new(format!(
                "info_length {declared} does not match block_length * planes_per_level = {}",
                block_len * planes_per_level
            )));
        }
    }
    let cfg = SimConfig {
        w,
        depth,
        planes_per_level,
        stages,
        block_len,
        code,
        snr_grid_db: vec![0.0],
        trials: 1,
        seed,
        genie: false,
    };
    Ok((cfg.build_code()?, stages))
}

pub fn encode(
    settings: &mut Settings,
    input: &Path,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let seed = settings.get_u64("seed", 0)?;
    let (code, _) = pipeline_code(settings, seed)?;
    let samples = read_reals(input)?;
    for &(s, line) in &samples {
        if !(-SQRT_3..SQRT_3).contains(&s) {
            return Err(CliError::new(format!(
                "{} line {line}: sample {s} outside [-sqrt(3), sqrt(3))",
                input.display()
            )));
        }
    }
    if samples.len() % code.block_len() != 0 {
        return Err(CliError::new(format!(
            "{} samples do not fill blocks of {}",
            samples.len(),
            code.block_len()
        )));
    }
    let mut body = String::new();
    for block in samples.chunks(code.block_len()) {
        let values: Vec<f64> = block.iter().map(|&(s, _)| s).collect();
        let encoded = code.encode(&values)?;
        for y in encoded.symbols {
            body.push_str(&format!("{y}\n"));
        }
    }
    write_out(out, &format!("{}{body}", header(settings, seed)))
}

pub fn decode(
    settings: &mut Settings,
    input: &Path,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let seed = settings.get_u64("seed", 0)?;
    let (code, stages) = pipeline_code(settings, seed)?;
    // Noise level assumed by the soft demapper; absent means noiseless.
    let sigma = if settings.contains("decode_snr_db") {
        let db = settings.get_f64("decode_snr_db", 0.0)?;
        10.0f64.powf(-db / 20.0)
    } else {
        0.0
    };
    let received = read_reals(input)?;
    if received.len() % code.coded_len() != 0 {
        return Err(CliError::new(format!(
            "{} symbols do not fill channel blocks of {}",
            received.len(),
            code.coded_len()
        )));
    }
    let mut body = String::new();
    for block in received.chunks(code.coded_len()) {
        let values: Vec<f64> = block.iter().map(|&(r, _)| r).collect();
        let decoded = code.sc_decode(&values, sigma, stages, None)?;
        for s in decoded.estimates {
            body.push_str(&format!("{s}\n"));
        }
    }
    write_out(out, &format!("{}{body}", header(settings, seed)))
}

pub fn sweep(settings: &mut Settings, out: Option<&Path>) -> Result<(), CliError> {
    let seed = settings.get_u64("seed", 0)?;
    let w = settings.get_f64("w", 0.75)?;
    let depth = settings.get_usize("depth", 32)?;
    let planes_per_level = settings.get_usize("planes_per_level", 1)?;
    let stages = settings.get_usize("stages", 3)?;
    let block_len = settings.get_usize("block_length", 12)?;
    let trials = settings.get_usize("trials", 1000)?;
    let genie = settings.get_bool("genie", false)?;
    let code = code_spec(settings, seed)?;
    let snr_grid_db = settings.snr_grid_db((0.0, 21.0, 3.0))?;
    let cfg = SimConfig {
        w,
        depth,
        planes_per_level,
        stages,
        block_len,
        code,
        snr_grid_db,
        trials,
        seed,
        genie,
    };
    let result = run_sweep(&cfg)?;
    let mut body = String::from("snr_db,mse_mean,mse_stderr,trials");
    for i in 1..=stages {
        body.push_str(&format!(",level_ber_{i}"));
    }
    body.push_str(",stage_failures\n");
    for p in &result.points {
        body.push_str(&format!(
            "{},{},{},{}",
            p.snr_db, p.mse_mean, p.mse_stderr, p.trials
        ));
        for ber in &p.level_ber {
            body.push_str(&format!(",{ber}"));
        }
        body.push_str(&format!(",{}\n", p.stage_failures));
    }
    write_out(out, &format!("{}{body}", header(settings, seed)))
}

fn push_curve(body: &mut String, curve: &BoundCurve) {
    for &(db, d) in &curve.points {
        body.push_str(&format!("{db},{d},{}\n", curve.label));
    }
}

pub fn bounds(settings: &mut Settings, out: Option<&Path>) -> Result<(), CliError> {
    let seed = settings.get_u64("seed", 0)?;
    let name = settings.get_str("code", "golay23");
    let params = registry_lookup(&name)?.params();
    let planes_per_level = settings.get_usize("planes_per_level", 2)?;
    let levels = settings.get_usize("stages", 50)?;
    let grid = settings.snr_grid_db((0.0, 100.0, 1.0))?;

    let mut body = String::from("snr_db,distortion,label\n");
    push_curve(
        &mut body,
        &distortion_curve(&grid, planes_per_level, levels, &params)?,
    );
    let n_code = planes_per_level as f64 / params.rate();
    let n_ideal = planes_per_level as f64;
    for (n, uniform) in [(n_code, false), (n_code, true), (n_ideal, false), (n_ideal, true)] {
        push_curve(&mut body, &shannon_curve(&grid, n, uniform)?);
    }
    if settings.contains("staircase_gamma") {
        let gamma = settings.get_f64("staircase_gamma", 1.0)?;
        let k_max = settings.get_usize("staircase_k_max", 10)?;
        let w = settings.get_f64("w", 0.75)?;
        for (snr, d) in staircase_points(gamma, w, planes_per_level, k_max)? {
            body.push_str(&format!(
                "{},{d},staircase[w={w},B={planes_per_level}]\n",
                10.0 * snr.log10()
            ));
        }
    }
    write_out(out, &format!("{}{body}", header(settings, seed)))
}

pub fn capacity(settings: &mut Settings, out: Option<&Path>) -> Result<(), CliError> {
    let seed = settings.get_u64("seed", 0)?;
    let channel = settings.get_str("channel", "gu");
    let amplitude = settings.get_f64("amplitude", SQRT_3 / 2.0)?;
    let grid = settings.snr_grid_db((-10.0, 20.0, 1.0))?;
    let mut body = String::new();
    match channel.as_str() {
        "gu" => {
            body.push_str("snr_db,sigma,capacity_bits,label\n");
            let halfwidth = settings.get_f64("gu_halfwidth", SQRT_3 / 2.0)?;
            for &db in &grid {
                let sigma = 10.0f64.powf(-db / 20.0);
                let c = binary_input_capacity(
                    &Noise::GaussUniform(GaussUniform::new(halfwidth, sigma)?),
                    amplitude,
                )?;
                body.push_str(&format!("{db},{sigma},{c},gu[a={halfwidth}]\n"));
            }
        }
        "awgn" => {
            body.push_str("snr_db,sigma,capacity_bits,label\n");
            for &db in &grid {
                let sigma = 10.0f64.powf(-db / 20.0);
                let c =
                    binary_input_capacity(&Noise::Awgn(AwgnChannel::from_sigma(sigma)?), amplitude)?;
                body.push_str(&format!("{db},{sigma},{c},awgn\n"));
            }
        }
        // Raw per-level hard-decision error probability curve.
        "level-error" => {
            body.push_str("snr_db,sigma,p_error,label\n");
            for &db in &grid {
                let sigma = 10.0f64.powf(-db / 20.0);
                let p = level_error_prob(amplitude, sigma)?;
                body.push_str(&format!("{db},{sigma},{p},level_error[a={amplitude}]\n"));
            }
        }
        other => {
            return Err(CliError::new(format!(
                "channel {other:?} is not one of gu, awgn, level-error"
            )))
        }
    }
    write_out(out, &format!("{}{body}", header(settings, seed)))
}

/// The seven-coordinate codeword map of the [7,3,4] component code as x_1
/// sweeps, plus Monte Carlo stretch-factor estimates.
pub fn stretch(
    settings: &mut Settings,
    out: Option<&Path>,
    dj_out: Option<&Path>,
) -> Result<(), CliError> {
    let seed = settings.get_u64("seed", 0)?;
    let x2 = settings.get_f64("x2", 0.7095)?;
    let x3 = settings.get_f64("x3", 0.4289)?;
    let depth = settings.get_usize("stretch_depth", 3)?;
    let sweep_points = settings.get_usize("stretch_sweep_points", 4096)?;
    let mc_points = settings.get_usize("stretch_mc_points", 100_000)?;
    let default_deltas: Vec<f64> = (4..=12).map(|e| 2.0f64.powi(-e)).collect();
    let deltas = settings.get_f64_list("stretch_deltas", &default_deltas)?;
    for &x in &[x2, x3] {
        if !(0.0..1.0).contains(&x) {
            return Err(CliError::new(format!("coordinate {x} outside [0, 1)")));
        }
    }

    let dual = registry_lookup("dual-hamming7")?;
    let RegistryEntry::Full(code) = dual else {
        unreachable!("dual Hamming is a full registry code");
    };
    let analog = AnalogCode::new(
        0.75,
        depth,
        1,
        3,
        fractal_analog::scdec::uniform_coders(
            fractal_analog::scdec::LevelCoder::HardMl(code),
            depth,
        ),
    )?;
    let encode_x1 = |x1: f64| -> Result<Vec<f64>, CliError> {
        let samples = [denormalize(x1), denormalize(x2), denormalize(x3)];
        Ok(analog.encode(&samples)?.symbols)
    };

    // Part (a): the codeword coordinates along the x_1 sweep.
    let mut body = String::from("x1,y1,y2,y3,y4,y5,y6,y7\n");
    for i in 0..sweep_points {
        let x1 = (i as f64 + 0.5) / sweep_points as f64;
        let y = encode_x1(x1)?;
        body.push_str(&x1.to_string());
        for v in y {
            body.push_str(&format!(",{v}"));
        }
        body.push('\n');
    }
    let head = header(settings, seed);
    write_out(out, &format!("{head}{body}"))?;

    // Part (b): mean squared codeword change under a perturbation of s_1 by
    // delta (source units), over a uniform x_1 grid. `d_mean` averages over
    // the whole grid; `d_given_change` conditions on the map actually
    // changing, which is the quantity that stays bounded away from zero.
    let mut dj = String::from("delta,d_mean,d_given_change,change_fraction\n");
    let base: Vec<Vec<f64>> = (0..mc_points)
        .map(|i| encode_x1((i as f64 + 0.5) / mc_points as f64))
        .collect::<Result<Vec<_>, _>>()?;
    for &delta in &deltas {
        if delta < 0.0 {
            return Err(CliError::new(format!("delta {delta} must be nonnegative")));
        }
        let dx = delta / (2.0 * SQRT_3);
        let mut count = 0usize;
        let mut changed = 0usize;
        let mut total = 0.0;
        for (i, base_symbols) in base.iter().enumerate() {
            let x1 = (i as f64 + 0.5) / mc_points as f64;
            if x1 + dx >= 1.0 {
                continue;
            }
            let shifted = encode_x1(x1 + dx)?;
            let jump: f64 = base_symbols
                .iter()
                .zip(&shifted)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            count += 1;
            total += jump;
            if jump > 0.0 {
                changed += 1;
            }
        }
        let d_mean = total / count.max(1) as f64;
        let d_cond = if changed > 0 { total / changed as f64 } else { 0.0 };
        let frac = changed as f64 / count.max(1) as f64;
        dj.push_str(&format!("{delta},{d_mean},{d_cond},{frac}\n"));
    }
    write_out(dj_out, &format!("{head}{dj}"))
}
