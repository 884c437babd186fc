//! Binary component codes: linear block codes with hard-decision ML
//! decoding, the information-bit union bound, and repeat-accumulate codes.

pub mod ra;

use crate::numerics::binomial_pmf;
use crate::{Error, Result};

/// Parameters [n, k, d] of a binary linear block code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
}

impl CodeParams {
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// Bounded-distance correction radius t = floor((d-1)/2).
    pub fn radius(&self) -> usize {
        (self.d - 1) / 2
    }
}

/// A binary linear block code given by its generator matrix.
///
/// Codeword positions are the bits of a u64, position j in bit j, so block
/// lengths up to 64 are supported; longer codes participate in the analytic
/// bounds only (see [`RegistryEntry::ParamsOnly`]).
#[derive(Debug, Clone)]
pub struct LinearCode {
    params: CodeParams,
    rows: Vec<u64>,
    systematic: bool,
    codebook: Option<Vec<u64>>,
}

/// Exhaustive-search guard: ML decoding enumerates all 2^k codewords.
pub const MAX_ML_DIMENSION: usize = 20;

impl LinearCode {
    /// Build a code from generator rows (each a 0/1 vector of length n).
    ///
    /// The rows must be linearly independent; the minimum distance is found
    /// by codeword enumeration, so the dimension is capped at
    /// [`MAX_ML_DIMENSION`].
    pub fn from_rows(rows_bits: &[Vec<u8>]) -> Result<Self> {
        let k = rows_bits.len();
        if k == 0 {
            return Err(Error::Config("generator matrix has no rows".into()));
        }
        let n = rows_bits[0].len();
        if n == 0 || n > 64 {
            return Err(Error::Capability(format!(
                "block length {n} outside supported range 1..=64"
            )));
        }
        if k > n {
            return Err(Error::Config(format!("dimension {k} exceeds length {n}")));
        }
        if rows_bits.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("generator rows differ in length".into()));
        }
        let rows: Vec<u64> = rows_bits
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .fold(0u64, |acc, (j, &b)| acc | ((b as u64 & 1) << j))
            })
            .collect();
        if gf2_rank(&rows) != k {
            return Err(Error::Config(
                "generator matrix does not have full rank over GF(2)".into(),
            ));
        }
        if k > MAX_ML_DIMENSION {
            return Err(Error::Capability(format!(
                "dimension {k} exceeds the enumeration guard 2^{MAX_ML_DIMENSION}"
            )));
        }
        let mut codebook = vec![0u64; 1 << k];
        for (info, slot) in codebook.iter_mut().enumerate() {
            let mut cw = 0u64;
            for (j, row) in rows.iter().enumerate() {
                if (info >> (k - 1 - j)) & 1 == 1 {
                    cw ^= row;
                }
            }
            *slot = cw;
        }
        let d = codebook
            .iter()
            .skip(1)
            .map(|cw| cw.count_ones() as usize)
            .min()
            .unwrap_or(n);
        let systematic = (0..k).all(|j| {
            let col: u64 = rows
                .iter()
                .enumerate()
                .fold(0, |acc, (i, r)| acc | (((r >> j) & 1) << i));
            col == 1u64 << j
        });
        Ok(Self {
            params: CodeParams { n, k, d },
            rows,
            systematic,
            codebook: Some(codebook),
        })
    }

    /// The perfect binary Golay code [23, 12, 7] in systematic form.
    pub fn golay23() -> Self {
        // Generator polynomial x^11 + x^10 + x^6 + x^5 + x^4 + x^2 + 1;
        // the cyclic generator rows are reduced to [I | P].
        let g: [u8; 12] = [1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 1, 1];
        let mut rows: Vec<Vec<u8>> = (0..12)
            .map(|i| {
                let mut r = vec![0u8; 23];
                r[i..i + 12].copy_from_slice(&g);
                r
            })
            .collect();
        gf2_row_reduce(&mut rows);
        let code = Self::from_rows(&rows).expect("Golay generator is full rank");
        debug_assert_eq!(code.params, CodeParams { n: 23, k: 12, d: 7 });
        code
    }

    /// The [7, 3, 4] dual Hamming (simplex) code with its textbook generator.
    pub fn dual_hamming7() -> Self {
        let rows = vec![
            vec![1, 0, 1, 0, 1, 0, 1],
            vec![0, 1, 0, 0, 1, 1, 1],
            vec![0, 0, 1, 1, 1, 1, 0],
        ];
        let code = Self::from_rows(&rows).expect("dual Hamming generator is full rank");
        debug_assert_eq!(code.params, CodeParams { n: 7, k: 3, d: 4 });
        code
    }

    /// The trivial rate-1 code; levels pass through unprotected.
    pub fn uncoded() -> Self {
        Self::from_rows(&[vec![1]]).expect("trivial code")
    }

    /// Load a generator matrix from plain text: one row per line, entries 0
    /// or 1, whitespace separated. Blank lines and `#` comments are skipped.
    pub fn from_generator_text(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut row = Vec::new();
            for tok in line.split_whitespace() {
                match tok {
                    "0" => row.push(0),
                    "1" => row.push(1),
                    _ => {
                        return Err(Error::Config(format!(
                            "generator file line {}: entry {tok:?} is not 0 or 1",
                            lineno + 1
                        )))
                    }
                }
            }
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    /// Load a generator matrix from a file; see [`Self::from_generator_text`].
    pub fn from_generator_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_generator_text(&text)
    }

    pub fn params(&self) -> CodeParams {
        self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    pub fn d(&self) -> usize {
        self.params.d
    }

    pub fn is_systematic(&self) -> bool {
        self.systematic
    }

    /// Generator rows as 0/1 vectors.
    pub fn generator_rows(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|&r| mask_to_bits(r, self.params.n))
            .collect()
    }

    /// Encode one information block.
    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.params.k {
            return Err(Error::Shape(format!(
                "info length {} does not match dimension {}",
                info.len(),
                self.params.k
            )));
        }
        let cw = self.encode_index(info_to_index(info));
        Ok(mask_to_bits(cw, self.params.n))
    }

    /// Codeword mask for an info index (info bits MSB-first in the index).
    pub fn encode_index(&self, info: usize) -> u64 {
        self.codebook.as_ref().expect("codebook built on construction")[info]
    }

    /// Hard-decision ML decode: the info bits of a codeword at minimum
    /// Hamming distance from `word`, ties broken toward the
    /// lexicographically smallest info pattern.
    pub fn hard_ml_decode(&self, word: &[u8]) -> Result<Vec<u8>> {
        if word.len() != self.params.n {
            return Err(Error::Shape(format!(
                "word length {} does not match block length {}",
                word.len(),
                self.params.n
            )));
        }
        let idx = self.hard_ml_decode_mask(bits_to_mask(word));
        Ok(index_to_info(idx, self.params.k))
    }

    /// Mask-level ML decode used by the hot simulation path.
    pub fn hard_ml_decode_mask(&self, word: u64) -> usize {
        let book = self.codebook.as_ref().expect("codebook built on construction");
        let mut best = 0usize;
        let mut best_dist = u32::MAX;
        for (info, &cw) in book.iter().enumerate() {
            let dist = (cw ^ word).count_ones();
            if dist < best_dist {
                best_dist = dist;
                best = info;
            }
        }
        best
    }

    /// Minimum distance re-derived by exhaustive enumeration.
    pub fn min_distance_enumerated(&self) -> usize {
        self.codebook
            .as_ref()
            .expect("codebook built on construction")
            .iter()
            .skip(1)
            .map(|cw| cw.count_ones() as usize)
            .min()
            .unwrap_or(self.params.n)
    }
}

/// Pack a 0/1 slice into a u64 mask, position j in bit j.
pub fn bits_to_mask(bits: &[u8]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (j, &b)| acc | ((b as u64 & 1) << j))
}

/// Unpack a mask into `n` 0/1 entries.
pub fn mask_to_bits(mask: u64, n: usize) -> Vec<u8> {
    (0..n).map(|j| ((mask >> j) & 1) as u8).collect()
}

/// Info pattern to its lexicographic index (first bit most significant).
pub fn info_to_index(info: &[u8]) -> usize {
    info.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
}

/// Inverse of [`info_to_index`].
pub fn index_to_info(index: usize, k: usize) -> Vec<u8> {
    (0..k).map(|j| ((index >> (k - 1 - j)) & 1) as u8).collect()
}

fn gf2_rank(rows: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &row in rows {
        let mut r = row;
        for &b in &basis {
            r = r.min(r ^ b);
        }
        if r != 0 {
            basis.push(r);
        }
    }
    basis.len()
}

fn gf2_row_reduce(rows: &mut [Vec<u8>]) {
    let k = rows.len();
    let n = rows[0].len();
    let mut pivot_row = 0;
    for col in 0..n {
        if pivot_row == k {
            break;
        }
        if let Some(r) = (pivot_row..k).find(|&r| rows[r][col] == 1) {
            rows.swap(pivot_row, r);
            let pivot = rows[pivot_row].clone();
            for (other, row) in rows.iter_mut().enumerate() {
                if other != pivot_row && row[col] == 1 {
                    for (dst, src) in row.iter_mut().zip(&pivot) {
                        *dst ^= src;
                    }
                }
            }
            pivot_row += 1;
        }
    }
}

/// A named entry of the built-in code registry.
#[derive(Debug, Clone)]
pub enum RegistryEntry {
    /// A fully usable code with generator matrix and decoder.
    Full(LinearCode),
    /// Parameters only; participates in bound curves, offers no decoding.
    ParamsOnly(CodeParams),
}

impl RegistryEntry {
    pub fn params(&self) -> CodeParams {
        match self {
            RegistryEntry::Full(c) => c.params(),
            RegistryEntry::ParamsOnly(p) => *p,
        }
    }
}

/// Look up a component code by registry name.
///
/// Names: `golay23`, `dual-hamming7`, `uncoded`, `code72-36-16`, or
/// `file:<path>` for a user-supplied generator matrix.
pub fn registry_lookup(name: &str) -> Result<RegistryEntry> {
    match name {
        "golay23" => Ok(RegistryEntry::Full(LinearCode::golay23())),
        "dual-hamming7" => Ok(RegistryEntry::Full(LinearCode::dual_hamming7())),
        "uncoded" => Ok(RegistryEntry::Full(LinearCode::uncoded())),
        // Bound-curve entry from the standard tables; exhaustive ML at
        // k = 36 is infeasible so no generator is stored.
        "code72-36-16" => Ok(RegistryEntry::ParamsOnly(CodeParams {
            n: 72,
            k: 36,
            d: 16,
        })),
        other => {
            if let Some(path) = other.strip_prefix("file:") {
                Ok(RegistryEntry::Full(LinearCode::from_generator_file(
                    std::path::Path::new(path),
                )?))
            } else {
                Err(Error::Config(format!(
                    "unknown code {other:?}; expected golay23, dual-hamming7, uncoded, code72-36-16 or file:<path>"
                )))
            }
        }
    }
}

/// Union bound on the information-bit error probability of hard-decision ML
/// decoding over a BSC with crossover probability `p`:
/// sum over m = t+1 ..= n of (m/n) C(n,m) p^m (1-p)^(n-m).
///
/// For even minimum distance the sum starts at t+1 with t = floor((d-1)/2),
/// the bounded-distance convention.
pub fn union_bound_pe(params: &CodeParams, p: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::Domain(format!("crossover {p} outside [0, 1/2]")));
    }
    let t = params.radius();
    let n = params.n;
    let total: f64 = (t + 1..=n)
        .map(|m| m as f64 / n as f64 * binomial_pmf(n, m, p))
        .sum();
    Ok(total.clamp(0.0, 1.0))
}

/// Probability that more than t channel errors land in a block: the exact
/// block error rate of a bounded-distance decoder on a perfect code.
pub fn block_error_tail(params: &CodeParams, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("crossover {p} outside [0, 1]")));
    }
    let t = params.radius();
    Ok((t + 1..=params.n).map(|m| binomial_pmf(params.n, m, p)).sum())
}
