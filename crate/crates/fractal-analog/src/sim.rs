//! Reproducible Monte Carlo distortion sweeps.
//!
//! Every trial owns an RNG stream keyed by (master seed, point index, trial
//! index), consumed in a fixed order: source samples first, channel noise
//! second. Trials are therefore independent of execution order; the parallel
//! and sequential paths produce bit-identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::channel::awgn_transmit;
use crate::code::ra::RaCode;
use crate::code::{registry_lookup, RegistryEntry};
use crate::numerics::ls_slope;
use crate::rng::SeededStream;
use crate::scdec::{AnalogCode, LevelCoder};
use crate::{Error, Result};

/// Component code selection for a sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum CodeSpec {
    /// A registry name (`golay23`, `dual-hamming7`, `uncoded`, `file:<path>`).
    Registry(String),
    /// A repeat-accumulate code; each level gets its own interleaver derived
    /// from `interleaver_seed` and the level index.
    Ra {
        repeat: usize,
        grouping: usize,
        iterations: usize,
        interleaver_seed: u64,
    },
}

/// Full description of one distortion-vs-SNR sweep.
#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Map weight; 3/4 gives the uniform marginal and closed-form level noise.
    pub w: f64,
    /// Retained bit planes M.
    pub depth: usize,
    /// Planes per level B.
    pub planes_per_level: usize,
    /// Decoded stages I.
    pub stages: usize,
    /// Source samples per block k.
    pub block_len: usize,
    pub code: CodeSpec,
    /// Strictly increasing SNR grid in dB.
    pub snr_grid_db: Vec<f64>,
    /// Trials per grid point.
    pub trials: usize,
    pub seed: u64,
    /// Feed true coded bits to the subtraction path.
    pub genie: bool,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trial count must be at least 1".into()));
        }
        if self.snr_grid_db.is_empty() {
            return Err(Error::Config("SNR grid is empty".into()));
        }
        if self.snr_grid_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("SNR grid must be strictly increasing".into()));
        }
        Ok(())
    }

    /// Assemble the analog code this sweep exercises.
    pub fn build_code(&self) -> Result<AnalogCode> {
        if self.planes_per_level == 0 || !self.depth.is_multiple_of(self.planes_per_level) {
            return Err(Error::Config(format!(
                "planes per level {} must divide depth {}",
                self.planes_per_level, self.depth
            )));
        }
        let levels = self.depth / self.planes_per_level;
        if self.stages > levels {
            return Err(Error::Config(format!(
                "stage count {} exceeds the {levels} encoded levels",
                self.stages
            )));
        }
        let info_len = self.block_len * self.planes_per_level;
        let coders: Vec<LevelCoder> = match &self.code {
            CodeSpec::Registry(name) => match registry_lookup(name)? {
                RegistryEntry::Full(code) => {
                    vec![LevelCoder::HardMl(code); levels]
                }
                RegistryEntry::ParamsOnly(p) => {
                    return Err(Error::Capability(format!(
                        "code [{},{},{}] offers bound curves only, not decoding",
                        p.n, p.k, p.d
                    )))
                }
            },
            CodeSpec::Ra {
                repeat,
                grouping,
                iterations,
                interleaver_seed,
            } => (0..levels)
                .map(|level| {
                    // Documented per-level seed derivation: one master
                    // interleaver seed, mixed with the level index.
                    let level_seed = interleaver_seed
                        ^ (level as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
                    Ok(LevelCoder::Spa(RaCode::new(
                        *repeat,
                        *grouping,
                        info_len,
                        level_seed,
                        *iterations,
                    )?))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        AnalogCode::new(
            self.w,
            self.depth,
            self.planes_per_level,
            self.block_len,
            coders,
        )
    }
}

/// Outcome of a single trial; merging these is commutative and associative.
#[derive(Debug, Clone, Default)]
struct TrialOutcome {
    mse: f64,
    level_bit_errors: Vec<u64>,
    stage_failures: u64,
}

/// Aggregated statistics at one SNR point.
#[derive(Debug, Clone)]
pub struct PointResult {
    pub snr_db: f64,
    pub mse_mean: f64,
    /// Sample standard deviation of per-trial MSE over sqrt(trials).
    pub mse_stderr: f64,
    pub trials: usize,
    /// Per decoded level: wrong info bits / total info bits.
    pub level_ber: Vec<f64>,
    pub stage_failures: u64,
}

/// A completed sweep.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub points: Vec<PointResult>,
}

fn run_trial(code: &AnalogCode, cfg: &SimConfig, point: usize, trial: usize) -> TrialOutcome {
    let mut stream = SeededStream::new(cfg.seed, point as u64, trial as u64);
    let samples: Vec<f64> = (0..code.block_len())
        .map(|_| stream.source_sample())
        .collect();
    let block = code.encode(&samples).expect("validated configuration");
    let sigma = 10.0f64.powf(-cfg.snr_grid_db[point] / 20.0);
    let received = awgn_transmit(&block.symbols, sigma, &mut stream).expect("sigma >= 0");
    let genie = cfg.genie.then_some(&block);
    let out = code
        .sc_decode(&received, sigma, cfg.stages, genie)
        .expect("validated configuration");
    let mse = samples
        .iter()
        .zip(&out.estimates)
        .map(|(s, e)| (s - e) * (s - e))
        .sum::<f64>()
        / samples.len() as f64;
    let mut level_bit_errors = vec![0u64; cfg.stages];
    for (stage, decoded) in out.level_info.iter().enumerate() {
        level_bit_errors[stage] = decoded
            .iter()
            .zip(&block.level_info[stage])
            .filter(|(a, b)| a != b)
            .count() as u64;
    }
    TrialOutcome {
        mse,
        level_bit_errors,
        stage_failures: out.stage_failures as u64,
    }
}

fn reduce_point(cfg: &SimConfig, point: usize, outcomes: Vec<TrialOutcome>) -> PointResult {
    let n = outcomes.len() as f64;
    let mean = outcomes.iter().map(|o| o.mse).sum::<f64>() / n;
    let var = outcomes.iter().map(|o| (o.mse - mean) * (o.mse - mean)).sum::<f64>()
        / (n - 1.0).max(1.0);
    let level_bits = (cfg.block_len * cfg.planes_per_level * cfg.trials) as f64;
    let mut level_ber = vec![0.0; cfg.stages];
    for (stage, ber) in level_ber.iter_mut().enumerate() {
        let errs: u64 = outcomes
            .iter()
            .map(|o| o.level_bit_errors.get(stage).copied().unwrap_or(0))
            .sum();
        *ber = errs as f64 / level_bits;
    }
    PointResult {
        snr_db: cfg.snr_grid_db[point],
        mse_mean: mean,
        mse_stderr: (var / n).sqrt(),
        trials: outcomes.len(),
        level_ber,
        stage_failures: outcomes.iter().map(|o| o.stage_failures).sum(),
    }
}

fn sweep_with(cfg: &SimConfig, parallel: bool) -> Result<SweepResult> {
    cfg.validate()?;
    let code = cfg.build_code()?;
    let mut points = Vec::with_capacity(cfg.snr_grid_db.len());
    for point in 0..cfg.snr_grid_db.len() {
        // Ordered collection keeps the reduction independent of scheduling.
        let outcomes: Vec<TrialOutcome> = if parallel {
            #[cfg(feature = "parallel")]
            {
                (0..cfg.trials)
                    .into_par_iter()
                    .map(|trial| run_trial(&code, cfg, point, trial))
                    .collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..cfg.trials)
                    .map(|trial| run_trial(&code, cfg, point, trial))
                    .collect()
            }
        } else {
            (0..cfg.trials)
                .map(|trial| run_trial(&code, cfg, point, trial))
                .collect()
        };
        points.push(reduce_point(cfg, point, outcomes));
    }
    Ok(SweepResult { points })
}

/// Run the sweep, using the rayon pool when the `parallel` feature is on.
pub fn run_sweep(cfg: &SimConfig) -> Result<SweepResult> {
    sweep_with(cfg, true)
}

/// Always-sequential variant; bit-identical to [`run_sweep`].
pub fn run_sweep_serial(cfg: &SimConfig) -> Result<SweepResult> {
    sweep_with(cfg, false)
}

/// Least-squares slope of 10 log10(distortion) against SNR(dB) over a dB
/// window, in dB/dB.
pub fn slope_fit(points: &[(f64, f64)], window: (f64, f64)) -> Result<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|(db, _)| (window.0..=window.1).contains(db))
        .map(|&(db, d)| (db, 10.0 * d.log10()))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::Domain(format!(
            "slope window [{}, {}] holds {} points, need at least 3",
            window.0,
            window.1,
            xs.len()
        )));
    }
    ls_slope(&xs, &ys)
}

/// Convenience accessor pairing the grid with measured MSE.
pub fn mse_points(result: &SweepResult) -> Vec<(f64, f64)> {
    result
        .points
        .iter()
        .map(|p| (p.snr_db, p.mse_mean))
        .collect()
}
