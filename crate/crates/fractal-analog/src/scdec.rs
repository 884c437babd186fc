//! The full analog code and its multistage successive-cancellation decoder.
//!
//! Encoding: bit planes -> level streams -> per-level component encoding ->
//! weighted superposition. Decoding peels one level per stage: form decisions
//! for the top remaining level from the residual, re-encode, subtract the
//! level's contribution and rescale by 1/beta. After `stages` levels the
//! recovered planes reconstruct the source with the conditional-mean tail,
//! which puts the noiseless floor exactly at 4^(-B*stages).

use crate::bitplane::{self, BitPlaneMatrix, LevelStream, MAX_DEPTH};
use crate::channel::GaussUniform;
use crate::code::ra::{level_channel_llr, RaCode};
use crate::code::LinearCode;
use crate::map::{self, WeightProfile};
use crate::{Error, Result};

/// Component coder protecting one level stream.
#[derive(Debug, Clone)]
pub enum LevelCoder {
    /// Block code applied codeword by codeword; decoded by exhaustive
    /// hard-decision ML on residual signs.
    HardMl(LinearCode),
    /// Repeat-accumulate code over the whole level; decoded by the
    /// sum-product algorithm on Gauss-Uniform channel LLRs.
    Spa(RaCode),
}

impl LevelCoder {
    fn coded_len(&self, info_len: usize) -> Result<usize> {
        match self {
            LevelCoder::HardMl(code) => {
                if !info_len.is_multiple_of(code.k()) {
                    return Err(Error::Config(format!(
                        "level stream length {info_len} is not a multiple of the code dimension {}",
                        code.k()
                    )));
                }
                Ok(info_len / code.k() * code.n())
            }
            LevelCoder::Spa(code) => {
                if code.info_len() != info_len {
                    return Err(Error::Config(format!(
                        "RA info length {} does not match the level stream length {info_len}",
                        code.info_len()
                    )));
                }
                Ok(code.coded_len())
            }
        }
    }

    fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        match self {
            LevelCoder::HardMl(code) => {
                let mut out = Vec::with_capacity(info.len() / code.k() * code.n());
                for chunk in info.chunks(code.k()) {
                    out.extend(code.encode(chunk)?);
                }
                Ok(out)
            }
            LevelCoder::Spa(code) => code.encode(info),
        }
    }

    fn decode_from_residual(
        &self,
        residual: &[f64],
        amplitude: f64,
        noise: &GaussUniform,
    ) -> Result<Vec<u8>> {
        match self {
            LevelCoder::HardMl(code) => {
                let mut info = Vec::with_capacity(residual.len() / code.n() * code.k());
                for chunk in residual.chunks(code.n()) {
                    let mut word = 0u64;
                    for (pos, &r) in chunk.iter().enumerate() {
                        if r > 0.0 {
                            word |= 1 << pos;
                        }
                    }
                    let idx = code.hard_ml_decode_mask(word);
                    info.extend(crate::code::index_to_info(idx, code.k()));
                }
                Ok(info)
            }
            LevelCoder::Spa(code) => {
                let llrs: Vec<f64> = residual
                    .iter()
                    .map(|&r| level_channel_llr(r, amplitude, noise))
                    .collect();
                code.decode(&llrs, code.iterations())
            }
        }
    }
}

/// A complete analog code: weight profile, level structure, and one
/// component coder per encoded level.
#[derive(Debug, Clone)]
pub struct AnalogCode {
    profile: WeightProfile,
    planes_per_level: usize,
    block_len: usize,
    coders: Vec<LevelCoder>,
    coded_len: usize,
}

/// Everything the encoder produced for one block; the coded level bits feed
/// the genie-aided subtraction path and the info bits feed error accounting.
#[derive(Debug, Clone)]
pub struct EncodedBlock {
    /// Channel symbols, one per use.
    pub symbols: Vec<f64>,
    /// Per-level information bits (the regrouped plane bits).
    pub level_info: Vec<Vec<u8>>,
    /// Per-level coded bits entering the superposition.
    pub level_coded: Vec<Vec<u8>>,
}

/// Decoder output for one block.
#[derive(Debug, Clone)]
pub struct ScDecodeOutput {
    /// Source estimates, one per block sample.
    pub estimates: Vec<f64>,
    /// Decoded information bits per stage (empty entries after a failure).
    pub level_info: Vec<Vec<u8>>,
    /// Stages whose decode failed or whose residual left its sanity bound.
    pub stage_failures: u32,
}

impl AnalogCode {
    /// Assemble a code: `levels = depth / planes_per_level` component coders,
    /// each protecting a stream of `block_len * planes_per_level` bits.
    pub fn new(
        w: f64,
        depth: usize,
        planes_per_level: usize,
        block_len: usize,
        coders: Vec<LevelCoder>,
    ) -> Result<Self> {
        if planes_per_level == 0 || !depth.is_multiple_of(planes_per_level) {
            return Err(Error::Config(format!(
                "planes per level {planes_per_level} must divide the depth {depth}"
            )));
        }
        if depth > MAX_DEPTH {
            return Err(Error::Config(format!(
                "depth {depth} exceeds the supported maximum {MAX_DEPTH}"
            )));
        }
        if block_len == 0 {
            return Err(Error::Config("block length must be positive".into()));
        }
        let levels = depth / planes_per_level;
        if coders.len() != levels {
            return Err(Error::Config(format!(
                "expected {levels} component coders, got {}",
                coders.len()
            )));
        }
        let info_len = block_len * planes_per_level;
        let coded_len = coders[0].coded_len(info_len)?;
        for coder in &coders {
            if coder.coded_len(info_len)? != coded_len {
                return Err(Error::Config(
                    "all levels must produce one common coded length".into(),
                ));
            }
        }
        if coders.iter().any(|c| matches!(c, LevelCoder::Spa(_))) && (w - 0.75).abs() > 1e-12 {
            return Err(Error::Config(
                "sum-product level decoding needs w = 3/4 (closed-form level noise)".into(),
            ));
        }
        let profile = WeightProfile::new(w, levels)?;
        Ok(Self {
            profile,
            planes_per_level,
            block_len,
            coders,
            coded_len,
        })
    }

    pub fn profile(&self) -> &WeightProfile {
        &self.profile
    }

    /// Encoded levels M/B.
    pub fn levels(&self) -> usize {
        self.profile.depth()
    }

    /// Retained planes M.
    pub fn depth(&self) -> usize {
        self.levels() * self.planes_per_level
    }

    pub fn planes_per_level(&self) -> usize {
        self.planes_per_level
    }

    /// Source samples per block k.
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Channel uses per block.
    pub fn coded_len(&self) -> usize {
        self.coded_len
    }

    /// Bandwidth expansion factor N = channel uses per source sample.
    pub fn bandwidth_expansion(&self) -> f64 {
        self.coded_len as f64 / self.block_len as f64
    }

    /// Encode one block of source samples into channel symbols.
    pub fn encode(&self, samples: &[f64]) -> Result<EncodedBlock> {
        if samples.len() != self.block_len {
            return Err(Error::Shape(format!(
                "block has {} samples, configured length is {}",
                samples.len(),
                self.block_len
            )));
        }
        let planes = BitPlaneMatrix::from_samples(samples, self.depth())?;
        let streams = bitplane::regroup_levels(&planes, self.planes_per_level)?;
        let mut level_info = Vec::with_capacity(self.levels());
        let mut level_coded = Vec::with_capacity(self.levels());
        for (stream, coder) in streams.iter().zip(&self.coders) {
            let coded = coder.encode(&stream.bits)?;
            level_info.push(stream.bits.clone());
            level_coded.push(coded);
        }
        let symbols = map::map_symbols(&level_coded, &self.profile)?;
        Ok(EncodedBlock {
            symbols,
            level_info,
            level_coded,
        })
    }

    /// Successive-cancellation decoding of `stages` levels.
    ///
    /// When `genie` carries the transmitted block, the true coded bits feed
    /// the subtraction path (decisions are still recorded), isolating
    /// per-stage behavior from error propagation.
    pub fn sc_decode(
        &self,
        received: &[f64],
        sigma: f64,
        stages: usize,
        genie: Option<&EncodedBlock>,
    ) -> Result<ScDecodeOutput> {
        if received.len() != self.coded_len {
            return Err(Error::Shape(format!(
                "received block has {} symbols, expected {}",
                received.len(),
                self.coded_len
            )));
        }
        if stages == 0 || stages > self.levels() {
            return Err(Error::Config(format!(
                "stage count {stages} outside 1..={}",
                self.levels()
            )));
        }
        let amplitude = self.profile.w().sqrt();
        let beta = self.profile.beta();
        // Half-width of the lower-level self-noise in the normalized stage
        // view; exact for the infinite tail, slightly conservative for the
        // deepest stages of a truncated profile.
        let self_noise = amplitude * beta / (1.0 - beta);
        let guard = map::support_half_width(self.profile.w())?;

        let mut residual = received.to_vec();
        let mut effective_sigma = sigma;
        let mut level_info: Vec<Vec<u8>> = Vec::with_capacity(stages);
        let mut stage_failures = 0u32;

        for stage in 0..stages {
            let noise = GaussUniform::new(self_noise, effective_sigma)?;
            let decoded = match self.coders[stage].decode_from_residual(
                &residual,
                amplitude,
                &noise,
            ) {
                Ok(bits) => bits,
                Err(_) => {
                    // Component failure: stop peeling, reconstruct from the
                    // stages recovered so far.
                    stage_failures += stages as u32 - stage as u32;
                    break;
                }
            };
            let subtract = match genie {
                Some(truth) => truth.level_coded[stage].clone(),
                None => self.coders[stage].encode(&decoded)?,
            };
            level_info.push(decoded);
            for (r, &bit) in residual.iter_mut().zip(&subtract) {
                *r = (*r - (2.0 * bit as f64 - 1.0) * amplitude) / beta;
            }
            effective_sigma /= beta;
            let bound = guard + 12.0 * effective_sigma;
            if residual.iter().any(|r| r.abs() > bound) {
                stage_failures += 1;
            }
        }

        let streams: Vec<LevelStream> = level_info
            .iter()
            .enumerate()
            .map(|(i, bits)| LevelStream {
                level: i + 1,
                bits: bits.clone(),
                planes_per_level: self.planes_per_level,
            })
            .collect();
        let planes = bitplane::ungroup_levels(&streams, self.block_len)?;
        let estimates = if planes.depth() == 0 {
            // Nothing decoded: the conditional mean of the source is 0.
            vec![0.0; self.block_len]
        } else {
            planes.reconstruct_conditional_mean()
        };
        Ok(ScDecodeOutput {
            estimates,
            level_info,
            stage_failures,
        })
    }
}

/// The achievable staircase: for stage counts k = 1..=k_max, distortion
/// (1-w)^(kB) at SNR gamma / (1-w)^(k-1).
pub fn staircase_points(
    gamma: f64,
    w: f64,
    planes_per_level: usize,
    k_max: usize,
) -> Result<Vec<(f64, f64)>> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("base SNR {gamma} must be positive")));
    }
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::Domain(format!("map weight {w} outside (0, 1)")));
    }
    if planes_per_level == 0 || k_max == 0 {
        return Err(Error::Domain("B and k_max must be positive".into()));
    }
    Ok((1..=k_max)
        .map(|k| {
            let snr = gamma / (1.0 - w).powi(k as i32 - 1);
            let distortion = (1.0 - w).powi((k * planes_per_level) as i32);
            (snr, distortion)
        })
        .collect())
}

/// Uniform per-level coder list for codes that reuse one component code.
pub fn uniform_coders(coder: LevelCoder, levels: usize) -> Vec<LevelCoder> {
    vec![coder; levels]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitplane::SQRT_3;
    use crate::channel::awgn_transmit;
    use crate::numerics::{ks_critical, ks_statistic};
    use crate::rng::SeededStream;

    fn uncoded_code(depth: usize, b: usize, k: usize) -> AnalogCode {
        let levels = depth / b;
        AnalogCode::new(
            0.75,
            depth,
            b,
            k,
            uniform_coders(LevelCoder::HardMl(LinearCode::uncoded()), levels),
        )
        .unwrap()
    }

    #[test]
    fn noiseless_roundtrip_hits_truncation_floor() {
        let mut rng = SeededStream::new(3, 0, 0);
        for &(b, stages) in &[(1usize, 1usize), (1, 5), (2, 3), (3, 2)] {
            let code = uncoded_code(24, b, 50);
            let samples: Vec<f64> = (0..50).map(|_| rng.source_sample()).collect();
            let block = code.encode(&samples).unwrap();
            let out = code.sc_decode(&block.symbols, 0.0, stages, None).unwrap();
            assert_eq!(out.stage_failures, 0);
            let bound = 2.0 * SQRT_3 / (1u64 << (b * stages)) as f64;
            for (s, e) in samples.iter().zip(&out.estimates) {
                assert!((s - e).abs() <= bound, "B={b} I={stages}");
            }
        }
    }

    #[test]
    fn noiseless_golay_roundtrip() {
        let code = AnalogCode::new(
            0.75,
            32,
            2,
            6,
            uniform_coders(LevelCoder::HardMl(LinearCode::golay23()), 16),
        )
        .unwrap();
        assert_eq!(code.coded_len(), 23);
        assert!((code.bandwidth_expansion() - 46.0 / 12.0).abs() < 1e-12);
        let mut rng = SeededStream::new(5, 0, 0);
        let samples: Vec<f64> = (0..6).map(|_| rng.source_sample()).collect();
        let block = code.encode(&samples).unwrap();
        let out = code.sc_decode(&block.symbols, 0.0, 5, None).unwrap();
        let bound = 2.0 * SQRT_3 / (1u64 << 10) as f64;
        for (s, e) in samples.iter().zip(&out.estimates) {
            assert!((s - e).abs() <= bound);
        }
        // Decoded level bits match the transmitted ones exactly.
        for stage in 0..5 {
            assert_eq!(out.level_info[stage], block.level_info[stage]);
        }
    }

    #[test]
    fn unit_power_output() {
        let code = uncoded_code(32, 1, 2000);
        let mut rng = SeededStream::new(6, 0, 0);
        let samples: Vec<f64> = (0..2000).map(|_| rng.source_sample()).collect();
        let block = code.encode(&samples).unwrap();
        let power: f64 =
            block.symbols.iter().map(|y| y * y).sum::<f64>() / block.symbols.len() as f64;
        // Uncoded B = 1 symbols reproduce the source, so the empirical power
        // tracks the source power.
        let source_power: f64 = samples.iter().map(|s| s * s).sum::<f64>() / samples.len() as f64;
        assert!((power - source_power).abs() < 1e-6);
    }

    #[test]
    fn genie_stage_noise_is_gauss_uniform() {
        // With true bits fed to the subtraction, the residual around the
        // stage-j signal must follow GU(sqrt(3)/2, (sigma 2^(j-1))^2).
        let k = 20_000;
        let sigma = 0.18;
        let code = uncoded_code(32, 1, k);
        let mut rng = SeededStream::new(9, 0, 0);
        let samples: Vec<f64> = (0..k).map(|_| rng.source_sample()).collect();
        let block = code.encode(&samples).unwrap();
        let received = awgn_transmit(&block.symbols, sigma, &mut rng).unwrap();
        let beta = 0.5f64;
        let amplitude = SQRT_3 / 2.0;
        let mut residual = received;
        for stage in 0..3 {
            let eff_sigma = sigma / beta.powi(stage as i32);
            let gu = GaussUniform::new(amplitude, eff_sigma).unwrap();
            let mut noise_samples: Vec<f64> = residual
                .iter()
                .zip(&block.level_coded[stage])
                .map(|(&r, &bit)| r - (2.0 * bit as f64 - 1.0) * amplitude)
                .collect();
            let d = ks_statistic(&mut noise_samples, |z| gu.cdf(z));
            let crit = ks_critical(k, 0.01);
            assert!(d < crit, "stage {stage}: KS {d} >= {crit}");
            // Subtract the true bits and rescale for the next stage.
            for (r, &bit) in residual.iter_mut().zip(&block.level_coded[stage]) {
                *r = (*r - (2.0 * bit as f64 - 1.0) * amplitude) / beta;
            }
        }
    }

    #[test]
    fn single_stage_golay_block_errors_match_binomial_tail() {
        // One stage, B = 1, Golay component: the level sees iid bit errors at
        // p = level_error_prob(sqrt(3)/2, sigma), so block errors follow the
        // radius-3 binomial tail exactly.
        let sigma = 0.35;
        let trials = 30_000;
        let code = AnalogCode::new(
            0.75,
            32,
            1,
            12,
            uniform_coders(LevelCoder::HardMl(LinearCode::golay23()), 32),
        )
        .unwrap();
        let p = crate::channel::level_error_prob(SQRT_3 / 2.0, sigma).unwrap();
        let predicted = crate::code::block_error_tail(&LinearCode::golay23().params(), p).unwrap();
        let mut block_errors = 0u32;
        for trial in 0..trials {
            let mut rng = SeededStream::new(41, 0, trial as u64);
            let samples: Vec<f64> = (0..12).map(|_| rng.source_sample()).collect();
            let block = code.encode(&samples).unwrap();
            let received = awgn_transmit(&block.symbols, sigma, &mut rng).unwrap();
            let out = code.sc_decode(&received, sigma, 1, None).unwrap();
            if out.level_info[0] != block.level_info[0] {
                block_errors += 1;
            }
        }
        let measured = block_errors as f64 / trials as f64;
        let se = (predicted * (1.0 - predicted) / trials as f64).sqrt();
        assert!(
            (measured - predicted).abs() < 3.0 * se,
            "measured {measured}, predicted {predicted}, se {se}"
        );
    }

    #[test]
    fn mse_monotone_in_stages() {
        let sigma = 0.05;
        let code = uncoded_code(32, 1, 400);
        let mut rng = SeededStream::new(11, 0, 0);
        let samples: Vec<f64> = (0..400).map(|_| rng.source_sample()).collect();
        let block = code.encode(&samples).unwrap();
        let received = awgn_transmit(&block.symbols, sigma, &mut rng).unwrap();
        let mut last = f64::INFINITY;
        for stages in 1..=6 {
            let out = code.sc_decode(&received, sigma, stages, None).unwrap();
            let mse: f64 = samples
                .iter()
                .zip(&out.estimates)
                .map(|(s, e)| (s - e) * (s - e))
                .sum::<f64>()
                / samples.len() as f64;
            assert!(mse <= last + 1e-12, "stages {stages}: {mse} > {last}");
            last = mse;
        }
    }

    #[test]
    fn stage_error_containment() {
        // If the first decoding error happens at stage j, all shallower
        // planes are correct and the per-sample squared error is bounded by
        // the power of the remaining levels: 12 * 4^(-(j-1)B).
        let sigma = 0.22;
        let b = 1;
        let code = uncoded_code(32, b, 64);
        for trial in 0..300u64 {
            let mut rng = SeededStream::new(51, 2, trial);
            let samples: Vec<f64> = (0..64).map(|_| rng.source_sample()).collect();
            let block = code.encode(&samples).unwrap();
            let received = awgn_transmit(&block.symbols, sigma, &mut rng).unwrap();
            let out = code.sc_decode(&received, sigma, 6, None).unwrap();
            let first_bad_stage = (0..6)
                .find(|&s| out.level_info[s] != block.level_info[s])
                .map(|s| s + 1)
                .unwrap_or(7);
            let bound = 12.0 * 4.0f64.powi(-(((first_bad_stage - 1) * b) as i32));
            for (s, e) in samples.iter().zip(&out.estimates) {
                let sq = (s - e) * (s - e);
                assert!(
                    sq <= bound,
                    "trial {trial}: stage {first_bad_stage} error, sq {sq} > {bound}"
                );
            }
        }
    }

    #[test]
    fn staircase_values_and_slope() {
        let pts = staircase_points(1.0, 0.75, 2, 8).unwrap();
        assert!((pts[0].0 - 1.0).abs() < 1e-15);
        assert!((pts[0].1 - 1.0 / 16.0).abs() < 1e-15);
        for w in pts.windows(2) {
            // SNR x4 while distortion shrinks by 4^B.
            assert!((w[1].0 / w[0].0 - 4.0).abs() < 1e-12);
            assert!((w[0].1 / w[1].1 - 16.0).abs() < 1e-9);
            let slope = (w[1].1.log10() - w[0].1.log10()) / (w[1].0.log10() - w[0].0.log10());
            assert!((slope + 2.0).abs() < 1e-12);
        }
        assert!(staircase_points(0.0, 0.75, 2, 8).is_err());
    }

    #[test]
    fn config_validation() {
        // 12 does not divide k * B = 10.
        assert!(AnalogCode::new(
            0.75,
            4,
            2,
            5,
            uniform_coders(LevelCoder::HardMl(LinearCode::golay23()), 2),
        )
        .is_err());
        // SPA needs w = 3/4.
        let ra = RaCode::new(2, 1, 10, 0, 20).unwrap();
        assert!(AnalogCode::new(0.5, 2, 1, 10, uniform_coders(LevelCoder::Spa(ra), 2)).is_err());
        // Wrong number of coders.
        assert!(AnalogCode::new(
            0.75,
            4,
            1,
            5,
            uniform_coders(LevelCoder::HardMl(LinearCode::uncoded()), 3),
        )
        .is_err());
    }
}
