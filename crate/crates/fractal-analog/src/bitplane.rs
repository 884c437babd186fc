//! Bit-plane decomposition of the uniform source and level regrouping.
//!
//! A source sample s in [-sqrt(3), sqrt(3)) is normalized to x in [0, 1),
//! expanded into its first `M` binary digits, and the digits of a block are
//! regrouped into per-level streams of `B` planes each: level `i` holds
//! planes (i-1)B+1 ..= iB, ordered by time first and plane second.

use crate::{Error, Result};

pub const SQRT_3: f64 = 1.7320508075688772;

/// Largest supported truncation depth; digits are extracted exactly from the
/// f64 mantissa, which carries 53 bits.
pub const MAX_DEPTH: usize = 53;

const SCALE_53: f64 = 9007199254740992.0; // 2^53

/// Map a source sample from [-sqrt(3), sqrt(3)) to [0, 1).
pub fn normalize_source(s: f64) -> Result<f64> {
    if !(-SQRT_3..SQRT_3).contains(&s) {
        return Err(Error::Domain(format!(
            "source sample {s} outside [-sqrt(3), sqrt(3))"
        )));
    }
    Ok(((s + SQRT_3) / (2.0 * SQRT_3)).clamp(0.0, 1.0 - f64::EPSILON))
}

/// Inverse of [`normalize_source`].
pub fn denormalize(x: f64) -> f64 {
    2.0 * SQRT_3 * x - SQRT_3
}

/// First `depth` binary digits of x in [0, 1), greedy (floor) extraction.
///
/// Digits come out most significant first; ties at dyadic boundaries resolve
/// downward because the extraction truncates.
pub fn expand_bits(x: f64, depth: usize) -> Result<Vec<u8>> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!("{x} outside [0, 1)")));
    }
    if depth == 0 || depth > MAX_DEPTH {
        return Err(Error::Domain(format!(
            "depth {depth} outside 1..={MAX_DEPTH}"
        )));
    }
    // x * 2^53 is exact (power-of-two scaling), so the integer part carries
    // the true greedy digits.
    let u = (x * SCALE_53) as u64;
    Ok((1..=depth).map(|l| ((u >> (53 - l)) & 1) as u8).collect())
}

/// Value of a digit prefix: sum of b_l 2^-l.
pub fn bits_to_fraction(bits: &[u8]) -> f64 {
    let mut u: u64 = 0;
    for &b in bits {
        u = (u << 1) | b as u64;
    }
    u as f64 / (1u64 << bits.len()) as f64
}

/// Bit planes of a block: entry (plane, t) is the plane-th digit of x_t.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitPlaneMatrix {
    bits: Vec<u8>, // plane-major: bits[(plane-1) * len + t]
    depth: usize,
    len: usize,
}

impl BitPlaneMatrix {
    /// Decompose a block of source samples into `depth` bit planes.
    pub fn from_samples(samples: &[f64], depth: usize) -> Result<Self> {
        let mut bits = vec![0u8; depth * samples.len()];
        for (t, &s) in samples.iter().enumerate() {
            let digits = expand_bits(normalize_source(s)?, depth)?;
            for (l, &b) in digits.iter().enumerate() {
                bits[l * samples.len() + t] = b;
            }
        }
        Ok(Self {
            bits,
            depth,
            len: samples.len(),
        })
    }

    pub fn from_bits(bits: Vec<u8>, depth: usize, len: usize) -> Result<Self> {
        if bits.len() != depth * len {
            return Err(Error::Shape(format!(
                "expected {} bits for depth {depth} x len {len}, got {}",
                depth * len,
                bits.len()
            )));
        }
        Ok(Self { bits, depth, len })
    }

    /// Number of retained planes M.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Block length k.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Digit of sample `t` at 1-based plane `plane`.
    pub fn bit(&self, plane: usize, t: usize) -> u8 {
        self.bits[(plane - 1) * self.len + t]
    }

    /// One plane as a slice across time.
    pub fn plane(&self, plane: usize) -> &[u8] {
        &self.bits[(plane - 1) * self.len..plane * self.len]
    }

    /// Column of digits for sample `t`, most significant plane first.
    pub fn column(&self, t: usize) -> Vec<u8> {
        (1..=self.depth).map(|l| self.bit(l, t)).collect()
    }

    /// Reconstruction with the truncated tail set to zero:
    /// s_t = 2 sqrt(3) sum_l b_lt 2^-l - sqrt(3).
    pub fn reconstruct(&self) -> Vec<f64> {
        self.reconstruct_with_tail(0.0)
    }

    /// Reconstruction with the undecoded tail replaced by its conditional
    /// mean (the midpoint of the remaining cell); this makes the noiseless
    /// residual variance exactly 4^-depth.
    pub fn reconstruct_conditional_mean(&self) -> Vec<f64> {
        self.reconstruct_with_tail(0.5 / (1u64 << self.depth) as f64)
    }

    fn reconstruct_with_tail(&self, tail: f64) -> Vec<f64> {
        (0..self.len)
            .map(|t| {
                let mut u: u64 = 0;
                for l in 1..=self.depth {
                    u = (u << 1) | self.bit(l, t) as u64;
                }
                denormalize(u as f64 / (1u64 << self.depth) as f64 + tail)
            })
            .collect()
    }
}

/// One level stream: planes (i-1)B+1 ..= iB gathered time-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelStream {
    /// 1-based level index.
    pub level: usize,
    /// k * B bits, time ascending, plane ascending within each time instant.
    pub bits: Vec<u8>,
    /// Planes per level B.
    pub planes_per_level: usize,
}

/// Regroup bit planes into level streams of `planes_per_level` planes each.
pub fn regroup_levels(planes: &BitPlaneMatrix, planes_per_level: usize) -> Result<Vec<LevelStream>> {
    let b = planes_per_level;
    if b == 0 || !planes.depth().is_multiple_of(b) {
        return Err(Error::Config(format!(
            "planes per level {b} must divide the retained depth {}",
            planes.depth()
        )));
    }
    let levels = planes.depth() / b;
    let mut out = Vec::with_capacity(levels);
    for i in 1..=levels {
        let mut bits = Vec::with_capacity(planes.len() * b);
        for t in 0..planes.len() {
            for m in 1..=b {
                bits.push(planes.bit((i - 1) * b + m, t));
            }
        }
        out.push(LevelStream {
            level: i,
            bits,
            planes_per_level: b,
        });
    }
    Ok(out)
}

/// Inverse of [`regroup_levels`]; accepts any prefix of the level list and
/// produces a matrix covering exactly those planes.
pub fn ungroup_levels(levels: &[LevelStream], len: usize) -> Result<BitPlaneMatrix> {
    if levels.is_empty() {
        return BitPlaneMatrix::from_bits(Vec::new(), 0, len);
    }
    let b = levels[0].planes_per_level;
    let depth = levels.len() * b;
    let mut bits = vec![0u8; depth * len];
    for (idx, stream) in levels.iter().enumerate() {
        if stream.level != idx + 1 || stream.planes_per_level != b {
            return Err(Error::Shape(
                "level streams must be a contiguous prefix with a common B".into(),
            ));
        }
        if stream.bits.len() != len * b {
            return Err(Error::Shape(format!(
                "level {} has {} bits, expected {}",
                stream.level,
                stream.bits.len(),
                len * b
            )));
        }
        for t in 0..len {
            for m in 0..b {
                bits[(idx * b + m) * len + t] = stream.bits[t * b + m];
            }
        }
    }
    BitPlaneMatrix::from_bits(bits, depth, len)
}
