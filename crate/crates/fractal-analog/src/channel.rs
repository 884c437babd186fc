//! AWGN and Gauss-Uniform noise models, level error probabilities and
//! binary-input capacity by quadrature.
//!
//! The Gauss-Uniform density GU(a, sigma^2) is the convolution of a uniform
//! density on [-a, a) with a zero-mean Gaussian of variance sigma^2; it is
//! the noise a coded level sees when the lower levels act as self-noise and
//! the map weight is 3/4.

use crate::numerics::{adaptive_quad_split, erf, erfc, normal_pdf};
use crate::rng::SeededStream;
use crate::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const SQRT_2PI: f64 = 2.5066282746310002;

/// Discrete-time AWGN channel with noise variance sigma^2.
#[derive(Debug, Clone, Copy)]
pub struct AwgnChannel {
    sigma: f64,
}

impl AwgnChannel {
    pub fn from_sigma(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Domain(format!("noise std {sigma} must be positive")));
        }
        Ok(Self { sigma })
    }

    pub fn from_snr(snr: f64) -> Result<Self> {
        if !(snr > 0.0) {
            return Err(Error::Domain(format!("SNR {snr} must be positive")));
        }
        Self::from_sigma((1.0 / snr).sqrt())
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma * self.sigma
    }

    /// Signal-to-noise power ratio 1/sigma^2 for unit input power.
    pub fn snr(&self) -> f64 {
        1.0 / self.sigma2()
    }
}

/// Gauss-Uniform noise: uniform on [-a, a) plus N(0, sigma^2).
#[derive(Debug, Clone, Copy)]
pub struct GaussUniform {
    pub a: f64,
    pub sigma: f64,
}

impl GaussUniform {
    pub fn new(a: f64, sigma: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::Domain(format!("uniform half-width {a} must be positive")));
        }
        if !(sigma >= 0.0) {
            return Err(Error::Domain(format!("noise std {sigma} must be nonnegative")));
        }
        Ok(Self { a, sigma })
    }

    /// Density at z.
    pub fn pdf(&self, z: f64) -> f64 {
        gu_pdf(z, self.a, self.sigma)
    }

    /// Cumulative distribution at z.
    pub fn cdf(&self, z: f64) -> f64 {
        gu_cdf(z, self.a, self.sigma)
    }

    /// Essentially-full support half-width (Gaussian tail below 1e-30 outside).
    pub fn support_radius(&self) -> f64 {
        self.a + 12.0 * self.sigma
    }
}

/// Gauss-Uniform density
/// (1/(4a)) [erf((z+a)/(sigma sqrt 2)) - erf((z-a)/(sigma sqrt 2))].
pub fn gu_pdf(z: f64, a: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        // Degenerate case: the uniform density itself.
        return if (-a..a).contains(&z) { 1.0 / (2.0 * a) } else { 0.0 };
    }
    let c = sigma * SQRT_2;
    (erf((z + a) / c) - erf((z - a) / c)) / (4.0 * a)
}

/// Gauss-Uniform cumulative distribution, closed form.
pub fn gu_cdf(z: f64, a: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return ((z + a) / (2.0 * a)).clamp(0.0, 1.0);
    }
    // Antiderivative of erf: v erf(v) + exp(-v^2)/sqrt(pi).
    let c = sigma * SQRT_2;
    let v_hi = (z + a) / c;
    let v_lo = (z - a) / c;
    let anti = |v: f64| v * erf(v) + (-v * v).exp() / std::f64::consts::PI.sqrt();
    (c / (4.0 * a) * (anti(v_hi) - anti(v_lo)) + 0.5).clamp(0.0, 1.0)
}

/// Add white Gaussian noise of standard deviation `sigma` to a sequence.
pub fn awgn_transmit(y: &[f64], sigma: f64, stream: &mut SeededStream) -> Result<Vec<f64>> {
    if !(sigma >= 0.0) {
        return Err(Error::Domain(format!("noise std {sigma} must be nonnegative")));
    }
    if sigma == 0.0 {
        return Ok(y.to_vec());
    }
    Ok(y.iter().map(|&v| v + sigma * stream.gaussian()).collect())
}

/// Probability that a binary symbol at +/-a under GU(a, sigma^2) noise is
/// hard-decided wrong:
/// sigma (1 - exp(-2 a^2 / sigma^2)) / (2 a sqrt(2 pi)) + erfc(sqrt(2) a / sigma) / 2.
///
/// Depends on the ratio a/sigma only; tends to 0 as sigma -> 0 and to 1/2 as
/// sigma -> infinity.
pub fn level_error_prob(a: f64, sigma: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("amplitude {a} must be positive")));
    }
    if !(sigma >= 0.0) {
        return Err(Error::Domain(format!("noise std {sigma} must be nonnegative")));
    }
    if sigma == 0.0 {
        return Ok(0.0);
    }
    let r = a / sigma;
    let first = (1.0 - (-2.0 * r * r).exp()) / (2.0 * r * SQRT_2PI);
    Ok(first + 0.5 * erfc(SQRT_2 * r))
}

/// SNR seen by the top-level binary symbol when the lower levels act as
/// self-noise: w gamma / (1 + (1-w) gamma). Saturates at w/(1-w).
pub fn effective_snr(gamma: f64, w: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::Domain(format!("SNR {gamma} must be nonnegative")));
    }
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::Domain(format!("map weight {w} outside (0, 1)")));
    }
    Ok(w * gamma / (1.0 + (1.0 - w) * gamma))
}

/// The additive noise models supported by the capacity computation.
#[derive(Debug, Clone, Copy)]
pub enum Noise {
    Awgn(AwgnChannel),
    GaussUniform(GaussUniform),
}

impl Noise {
    fn pdf(&self, z: f64) -> f64 {
        match self {
            Noise::Awgn(ch) => normal_pdf(z, ch.sigma()),
            Noise::GaussUniform(gu) => gu.pdf(z),
        }
    }

    fn support_radius(&self) -> f64 {
        match self {
            Noise::Awgn(ch) => 12.0 * ch.sigma(),
            Noise::GaussUniform(gu) => gu.support_radius(),
        }
    }

    fn kinks(&self) -> Vec<f64> {
        match self {
            Noise::Awgn(_) => Vec::new(),
            Noise::GaussUniform(gu) => vec![-gu.a, gu.a],
        }
    }

    /// Differential entropy in bits.
    fn entropy_bits(&self, tol: f64) -> Result<f64> {
        match self {
            Noise::Awgn(ch) => {
                Ok(0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * ch.sigma2()).log2())
            }
            Noise::GaussUniform(gu) => {
                let r = gu.support_radius();
                let nats = adaptive_quad_split(
                    &|z| neg_plogp(gu.pdf(z)),
                    -r,
                    r,
                    &self.kinks(),
                    tol,
                )?;
                Ok(nats / std::f64::consts::LN_2)
            }
        }
    }
}

fn neg_plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

/// Mutual information I(X;Y) in bits for equiprobable X in {-A, +A} over an
/// additive noise channel: h(Y) - h(noise), both by adaptive quadrature.
pub fn binary_input_capacity(noise: &Noise, amplitude: f64) -> Result<f64> {
    if !(amplitude > 0.0) {
        return Err(Error::Domain(format!("amplitude {amplitude} must be positive")));
    }
    let tol = 1e-9;
    let r = amplitude + noise.support_radius();
    let mut splits: Vec<f64> = Vec::new();
    for s in noise.kinks() {
        splits.push(s - amplitude);
        splits.push(s + amplitude);
    }
    splits.push(-amplitude);
    splits.push(amplitude);
    let h_y_nats = adaptive_quad_split(
        &|y| {
            let p = 0.5 * (noise.pdf(y - amplitude) + noise.pdf(y + amplitude));
            neg_plogp(p)
        },
        -r,
        r,
        &splits,
        tol,
    )?;
    let capacity = h_y_nats / std::f64::consts::LN_2 - noise.entropy_bits(tol)?;
    Ok(capacity.clamp(0.0, 1.0))
}

/// Solve for the noise std at which the GU(a, sigma^2) binary-input channel
/// with symbols at +/-amplitude reaches `target_rate` bits per use.
///
/// Bisection on sigma to an absolute tolerance of 1e-6; capacity is monotone
/// decreasing in sigma.
pub fn solve_sigma_for_capacity(a: f64, amplitude: f64, target_rate: f64) -> Result<f64> {
    if !(0.0 < target_rate && target_rate < 1.0) {
        return Err(Error::Domain(format!(
            "target rate {target_rate} outside (0, 1)"
        )));
    }
    let cap = |sigma: f64| -> Result<f64> {
        binary_input_capacity(
            &Noise::GaussUniform(GaussUniform::new(a, sigma)?),
            amplitude,
        )
    };
    let mut lo = 1e-4;
    let mut hi = 1.0;
    while cap(hi)? > target_rate {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Numerical("capacity bisection bracket not found".into()));
        }
    }
    if cap(lo)? < target_rate {
        return Err(Error::Numerical(
            "capacity below target even at vanishing noise".into(),
        ));
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if cap(mid)? > target_rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
