//! Analytic distortion curves: the rate-distortion lower bound and the
//! union-bound distortion chain for hard-decision ML component decoding.

use crate::bitplane::SQRT_3;
use crate::channel::level_error_prob;
use crate::code::{union_bound_pe, CodeParams};
use crate::{Error, Result};

const TWO_PI_E: f64 = 2.0 * std::f64::consts::PI * std::f64::consts::E;

/// Rate-distortion lower bound D >= (1/(2 pi e)) (1 + snr)^-N at bandwidth
/// expansion N, with the differential entropy of the source taken as zero.
pub fn shannon_lower_bound(snr: f64, n: f64) -> Result<f64> {
    if !(snr >= 0.0) {
        return Err(Error::Domain(format!("SNR {snr} must be nonnegative")));
    }
    if !(n > 0.0) {
        return Err(Error::Domain(format!("bandwidth expansion {n} must be positive")));
    }
    Ok((1.0 + snr).powf(-n) / TWO_PI_E)
}

/// Variant with the unit-power uniform source's actual differential entropy
/// log2(2 sqrt 3): D >= (6/(pi e)) (1 + snr)^-N. The constant-0-entropy form
/// above matches a unit-length interval, not [-sqrt 3, sqrt 3); both are
/// exposed so curves can be labeled distinctly.
pub fn shannon_lower_bound_uniform(snr: f64, n: f64) -> Result<f64> {
    let base = shannon_lower_bound(snr, n)?;
    Ok(base * (2.0 * SQRT_3) * (2.0 * SQRT_3))
}

/// Level amplitude a_i = sqrt(3) / 2^i of the w = 3/4 geometry.
pub fn level_amplitude(level: usize) -> f64 {
    SQRT_3 / (1u64 << level) as f64
}

/// Information-bit error bound of level `i` at noise std `sigma`: the union
/// bound evaluated at the level's hard-decision crossover probability.
pub fn level_error_bound(level: usize, sigma: f64, code: &CodeParams) -> Result<f64> {
    if level == 0 {
        return Err(Error::Domain("levels are 1-based".into()));
    }
    let p = level_error_prob(level_amplitude(level), sigma)?;
    union_bound_pe(code, p)
}

/// Mean-squared distortion charged to level `i`:
/// D(i, sigma) = 2 (4^B - 1) 4^(-B i) P_e(i, sigma).
///
/// The factor 2 per errored plane is kept as-is for curve reproduction even
/// though a hard bit flip changes the reconstruction by twice the plane
/// amplitude (squared: factor 4); the Monte Carlo harness measures the true
/// factor.
pub fn level_distortion(
    level: usize,
    sigma: f64,
    planes_per_level: usize,
    code: &CodeParams,
) -> Result<f64> {
    if planes_per_level == 0 {
        return Err(Error::Domain("planes per level must be positive".into()));
    }
    let b = planes_per_level as i32;
    let pe = level_error_bound(level, sigma, code)?;
    Ok(2.0 * (4.0f64.powi(b) - 1.0) * 4.0f64.powi(-b * level as i32) * pe)
}

/// Distortion bound for a decoder limited to the first `levels` levels:
/// D_I(sigma) = 4^(-B I) + sum_i D(i, sigma). The first term is the power of
/// the undecoded planes; the bound tends to it as sigma -> 0.
pub fn truncated_distortion(
    sigma: f64,
    planes_per_level: usize,
    levels: usize,
    code: &CodeParams,
) -> Result<f64> {
    if levels == 0 {
        return Err(Error::Domain("level count must be positive".into()));
    }
    let floor = 4.0f64.powi(-((planes_per_level * levels) as i32));
    let mut total = floor;
    for i in 1..=levels {
        total += level_distortion(i, sigma, planes_per_level, code)?;
    }
    Ok(total)
}

/// A labeled curve over an SNR grid, ready for CSV export.
#[derive(Debug, Clone)]
pub struct BoundCurve {
    pub label: String,
    /// (snr_db, distortion) points; the grid is strictly increasing.
    pub points: Vec<(f64, f64)>,
}

impl BoundCurve {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Result<Self> {
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Config("curve grid must be strictly increasing".into()));
        }
        if points.iter().any(|&(_, d)| !(d > 0.0)) {
            return Err(Error::Config("curve distortions must be positive".into()));
        }
        Ok(Self {
            label: label.into(),
            points,
        })
    }
}

/// D_I over a dB grid.
pub fn distortion_curve(
    snr_grid_db: &[f64],
    planes_per_level: usize,
    levels: usize,
    code: &CodeParams,
) -> Result<BoundCurve> {
    let points = snr_grid_db
        .iter()
        .map(|&db| {
            let sigma = 10.0f64.powf(-db / 20.0);
            truncated_distortion(sigma, planes_per_level, levels, code).map(|d| (db, d))
        })
        .collect::<Result<Vec<_>>>()?;
    BoundCurve::new(
        format!(
            "union_bound[n={},k={},d={},B={planes_per_level},I={levels}]",
            code.n, code.k, code.d
        ),
        points,
    )
}

/// Shannon bound over a dB grid; `uniform_entropy` selects the corrected
/// constant.
pub fn shannon_curve(snr_grid_db: &[f64], n: f64, uniform_entropy: bool) -> Result<BoundCurve> {
    let points = snr_grid_db
        .iter()
        .map(|&db| {
            let snr = 10.0f64.powf(db / 10.0);
            let d = if uniform_entropy {
                shannon_lower_bound_uniform(snr, n)?
            } else {
                shannon_lower_bound(snr, n)?
            };
            Ok((db, d))
        })
        .collect::<Result<Vec<_>>>()?;
    let label = if uniform_entropy {
        format!("shannon_uniform[N={n:.4}]")
    } else {
        format!("shannon[N={n:.4}]")
    };
    BoundCurve::new(label, points)
}
