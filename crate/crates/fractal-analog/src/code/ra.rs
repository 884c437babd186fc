//! Generalized repeat-accumulate codes and their sum-product decoder.
//!
//! Encoding: repeat each info bit q times, interleave, XOR groups of `a`
//! consecutive bits, and run the result through the accumulator
//! y_m = y_{m-1} XOR u_m (y_0 = 0). The rate is a/q and only the accumulator
//! states are transmitted.
//!
//! Decoding: iterative message passing in the log-likelihood domain with an
//! exact forward-backward sweep over the accumulator chain. One iteration is
//! a variable-to-check flood, the check update, the forward-backward sweep
//! and the check-to-variable return. The iteration count is fixed; there is
//! no early exit, so repeated runs are reproducible.

use crate::channel::GaussUniform;
use crate::rng::SeededStream;
use crate::{Error, Result};

/// Messages are clipped to this magnitude; the sign carries the decision.
pub const LLR_CLIP: f64 = 50.0;

/// Configuration and interleaver of one repeat-accumulate code.
#[derive(Debug, Clone)]
pub struct RaCode {
    repeat: usize,
    grouping: usize,
    info_len: usize,
    interleaver: Vec<usize>,
    iterations: usize,
}

impl RaCode {
    /// Build a code with a seeded uniform random interleaver (Fisher-Yates).
    pub fn new(
        repeat: usize,
        grouping: usize,
        info_len: usize,
        interleaver_seed: u64,
        iterations: usize,
    ) -> Result<Self> {
        let edges = Self::check_dims(repeat, grouping, info_len)?;
        let mut perm: Vec<usize> = (0..edges).collect();
        let mut stream = SeededStream::new(interleaver_seed, u64::from_le_bytes(*b"interlvr"), 0);
        for i in (1..edges).rev() {
            perm.swap(i, stream.index(i + 1));
        }
        Self::with_interleaver(repeat, grouping, info_len, perm, iterations)
    }

    /// Build a code with an explicit interleaver (must be a permutation of
    /// 0..k*q).
    pub fn with_interleaver(
        repeat: usize,
        grouping: usize,
        info_len: usize,
        interleaver: Vec<usize>,
        iterations: usize,
    ) -> Result<Self> {
        let edges = Self::check_dims(repeat, grouping, info_len)?;
        if interleaver.len() != edges {
            return Err(Error::Config(format!(
                "interleaver length {} does not match k*q = {edges}",
                interleaver.len()
            )));
        }
        let mut seen = vec![false; edges];
        for &p in &interleaver {
            if p >= edges || seen[p] {
                return Err(Error::Config("interleaver is not a bijection".into()));
            }
            seen[p] = true;
        }
        Ok(Self {
            repeat,
            grouping,
            info_len,
            interleaver,
            iterations,
        })
    }

    fn check_dims(repeat: usize, grouping: usize, info_len: usize) -> Result<usize> {
        if repeat < 2 {
            return Err(Error::Config(format!("repeat factor {repeat} must be >= 2")));
        }
        if grouping == 0 || grouping > repeat {
            return Err(Error::Config(format!(
                "grouping factor {grouping} must lie in 1..=repeat ({repeat})"
            )));
        }
        if info_len == 0 {
            return Err(Error::Config("info length must be positive".into()));
        }
        let edges = info_len * repeat;
        if !edges.is_multiple_of(grouping) {
            return Err(Error::Config(format!(
                "grouping factor {grouping} must divide k*q = {edges}"
            )));
        }
        Ok(edges)
    }

    pub fn repeat(&self) -> usize {
        self.repeat
    }

    pub fn grouping(&self) -> usize {
        self.grouping
    }

    pub fn info_len(&self) -> usize {
        self.info_len
    }

    /// Transmitted block length k*q/a.
    pub fn coded_len(&self) -> usize {
        self.info_len * self.repeat / self.grouping
    }

    pub fn rate(&self) -> f64 {
        self.grouping as f64 / self.repeat as f64
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Encode one information block into accumulator states.
    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.info_len {
            return Err(Error::Shape(format!(
                "info length {} does not match k = {}",
                info.len(),
                self.info_len
            )));
        }
        let mut acc = 0u8;
        let mut out = Vec::with_capacity(self.coded_len());
        for m in 0..self.coded_len() {
            let mut u = 0u8;
            for slot in m * self.grouping..(m + 1) * self.grouping {
                // Repetition is bit-major: edge e carries info bit e / q.
                u ^= info[self.interleaver[slot] / self.repeat];
            }
            acc ^= u;
            out.push(acc);
        }
        Ok(out)
    }

    /// Sum-product decoding of channel LLRs (positive favors bit 1) into
    /// hard information-bit decisions. An LLR of exactly zero decides 0.
    pub fn decode(&self, channel_llrs: &[f64], iterations: usize) -> Result<Vec<u8>> {
        let l = self.coded_len();
        if channel_llrs.len() != l {
            return Err(Error::Shape(format!(
                "LLR length {} does not match coded length {l}",
                channel_llrs.len()
            )));
        }
        // Internal messages use ln P(0)/P(1), which makes the check update a
        // plain boxplus; flip on entry and exit.
        let lambda: Vec<f64> = channel_llrs.iter().map(|&v| clip(-v)).collect();
        let edges = self.info_len * self.repeat;
        let a = self.grouping;
        let mut v2c = vec![0.0f64; edges];
        let mut c2v = vec![0.0f64; edges];
        let mut posterior = vec![0.0f64; self.info_len];
        let mut alpha = vec![0.0f64; l];
        let mut beta = vec![0.0f64; l];
        let mut mu = vec![0.0f64; l];

        for _ in 0..iterations {
            // Variable-to-check: extrinsic repetition messages.
            for (e, msg) in v2c.iter_mut().enumerate() {
                let bit = self.interleaver[e] / self.repeat;
                *msg = clip(posterior[bit] - c2v[e]);
            }
            // Check update: combined message each group offers the chain.
            for m in 0..l {
                let group = &v2c[m * a..(m + 1) * a];
                let mut acc = group[0];
                for &v in &group[1..] {
                    acc = boxplus(acc, v);
                }
                mu[m] = acc;
            }
            // Forward-backward over the accumulator. y_0's check has the
            // known zero boundary, so its chain message is mu alone.
            alpha[0] = lambda[0] + mu[0];
            for m in 1..l {
                alpha[m] = clip(lambda[m] + boxplus(alpha[m - 1], mu[m]));
            }
            beta[l - 1] = lambda[l - 1];
            for m in (0..l - 1).rev() {
                beta[m] = clip(lambda[m] + boxplus(beta[m + 1], mu[m + 1]));
            }
            // Check-to-variable return plus the info-bit totals.
            posterior.iter_mut().for_each(|p| *p = 0.0);
            for m in 0..l {
                let ext = if m == 0 {
                    beta[0]
                } else {
                    boxplus(alpha[m - 1], beta[m])
                };
                let group = m * a..(m + 1) * a;
                for e in group.clone() {
                    let mut msg = ext;
                    for (other, &v) in group.clone().zip(&v2c[group.clone()]) {
                        if other != e {
                            msg = boxplus(msg, v);
                        }
                    }
                    c2v[e] = clip(msg);
                    posterior[self.interleaver[e] / self.repeat] += c2v[e];
                }
            }
        }
        // Internal convention: negative total favors bit 1; exact zero
        // (including the zero-iteration baseline) decides 0.
        Ok(posterior.iter().map(|&p| u8::from(p < 0.0)).collect())
    }
}

fn clip(v: f64) -> f64 {
    v.clamp(-LLR_CLIP, LLR_CLIP)
}

/// Exact check-node combiner for ln P(0)/P(1) messages:
/// L(a xor b) = ln((1 + e^(La+Lb)) / (e^La + e^Lb)), written with the exact
/// Jacobian logarithm max*(x, y) = max + ln(1 + exp(-|x-y|)).
fn boxplus(x: f64, y: f64) -> f64 {
    max_star(0.0, x + y) - max_star(x, y)
}

fn max_star(x: f64, y: f64) -> f64 {
    x.max(y) + (-(x - y).abs()).exp().ln_1p()
}

/// Channel LLR (positive favors bit 1) of an observation `r` for a binary
/// symbol at +/-`amplitude` under Gauss-Uniform noise:
/// ln(pdf(r - amplitude) / pdf(r + amplitude)), clipped.
pub fn level_channel_llr(r: f64, amplitude: f64, noise: &GaussUniform) -> f64 {
    if noise.sigma == 0.0 {
        return if r > 0.0 {
            LLR_CLIP
        } else if r < 0.0 {
            -LLR_CLIP
        } else {
            0.0
        };
    }
    let p1 = noise.pdf(r - amplitude);
    let p0 = noise.pdf(r + amplitude);
    if p1 > 0.0 && p0 > 0.0 {
        clip((p1 / p0).ln())
    } else if p1 == p0 {
        0.0
    } else if p0 == 0.0 {
        LLR_CLIP
    } else {
        -LLR_CLIP
    }
}
