//! The weighted superposition map from binary columns to real symbols.
//!
//! A column of level bits (b_1, ..., b_M) maps to
//! y = sum_i (2 b_i - 1) w_i with w_i = sqrt(w) (1-w)^((i-1)/2).
//! For w = 3/4 the weights are sqrt(3)/2^i and y over the digits of x
//! reproduces the source value 2 sqrt(3) x - sqrt(3) exactly.

use crate::{Error, Result};

/// Weight profile of the superposition map for a given w and depth.
#[derive(Debug, Clone)]
pub struct WeightProfile {
    w: f64,
    alpha: f64,
    beta: f64,
    weights: Vec<f64>,
}

impl WeightProfile {
    /// Build the profile; w must lie strictly inside (0, 1).
    pub fn new(w: f64, depth: usize) -> Result<Self> {
        if !(w > 0.0 && w < 1.0) {
            return Err(Error::Domain(format!("map weight {w} outside (0, 1)")));
        }
        if depth == 0 {
            return Err(Error::Domain("profile depth must be at least 1".into()));
        }
        // Closed form in the log domain; repeated multiplication drifts for
        // depths up to 64.
        let ln_w = w.ln();
        let ln_1mw = (-w).ln_1p();
        let weights = (1..=depth)
            .map(|i| (0.5 * ln_w + 0.5 * (i - 1) as f64 * ln_1mw).exp())
            .collect();
        Ok(Self {
            w,
            alpha: (w / (1.0 - w)).sqrt(),
            beta: (1.0 - w).sqrt(),
            weights,
        })
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    /// alpha = sqrt(w / (1-w)).
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// beta = sqrt(1-w); each decoding stage rescales the residual by 1/beta.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn depth(&self) -> usize {
        self.weights.len()
    }

    /// Per-level weights w_i, i = 1..=depth.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, level: usize) -> f64 {
        self.weights[level - 1]
    }

    /// Transmitted power sum_{i<=depth} w_i^2 = 1 - (1-w)^depth.
    pub fn truncated_power(&self) -> f64 {
        1.0 - (1.0 - self.w).powi(self.depth() as i32)
    }

    /// Power left in the truncated tail, (1-w)^depth.
    pub fn truncation_deficit(&self) -> f64 {
        (1.0 - self.w).powi(self.depth() as i32)
    }
}

/// Half-width of the map's support interval, sqrt(w) / (1 - sqrt(1-w)).
pub fn support_half_width(w: f64) -> Result<f64> {
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::Domain(format!("map weight {w} outside (0, 1)")));
    }
    Ok(w.sqrt() / (1.0 - (1.0 - w).sqrt()))
}

/// Support interval of the map, symmetric about the origin.
pub fn support_interval(w: f64) -> Result<(f64, f64)> {
    let h = support_half_width(w)?;
    Ok((-h, h))
}

/// Map one column of bits (level 1 first) to a real symbol.
pub fn map_column(column: &[u8], profile: &WeightProfile) -> Result<f64> {
    if column.len() != profile.depth() {
        return Err(Error::Shape(format!(
            "column depth {} does not match profile depth {}",
            column.len(),
            profile.depth()
        )));
    }
    Ok(column
        .iter()
        .zip(profile.weights())
        .map(|(&b, &w)| (2.0 * b as f64 - 1.0) * w)
        .sum())
}

/// Map a sequence of per-time columns to channel symbols.
///
/// `columns` is level-major: `columns[i]` is the bit stream of level i+1 and
/// all levels must share one length.
pub fn map_symbols(columns: &[Vec<u8>], profile: &WeightProfile) -> Result<Vec<f64>> {
    if columns.len() != profile.depth() {
        return Err(Error::Shape(format!(
            "{} levels do not match profile depth {}",
            columns.len(),
            profile.depth()
        )));
    }
    let n = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::Shape("level streams must share one length".into()));
    }
    let mut out = vec![0.0; n];
    for (level, bits) in columns.iter().enumerate() {
        let w = profile.weights()[level];
        for (y, &b) in out.iter_mut().zip(bits) {
            *y += (2.0 * b as f64 - 1.0) * w;
        }
    }
    Ok(out)
}
