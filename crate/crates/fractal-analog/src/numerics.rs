//! Special functions, adaptive quadrature and small statistics helpers.

use crate::{Error, Result};

/// Error function, accurate to better than 1e-12 relative.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function with correct relative accuracy in the tail.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Standard normal density.
pub fn normal_pdf(z: f64, sigma: f64) -> f64 {
    let u = z / sigma;
    (-0.5 * u * u).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

/// Gaussian upper tail probability Q(x) = P(N(0,1) > x).
pub fn q_func(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Adaptive Simpson quadrature to an absolute tolerance.
///
/// Returns `Error::Numerical` when the recursion depth limit is hit before
/// the local error estimate meets the budget; the failure is never silent.
pub fn adaptive_quad<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("quadrature tolerance {tol} must be positive")));
    }
    if lo == hi {
        return Ok(0.0);
    }
    let (flo, fmid, fhi) = (f(lo), f(0.5 * (lo + hi)), f(hi));
    let whole = simpson(lo, hi, flo, fmid, fhi);
    simpson_refine(f, lo, hi, flo, fmid, fhi, whole, tol, 60)
}

/// Adaptive quadrature over an interval split at interior breakpoints.
///
/// Breakpoints let the integrand's kinks (e.g. the edges of a uniform
/// density) land on panel boundaries, where Simpson refinement is cheap.
pub fn adaptive_quad_split<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    splits: &[f64],
    tol: f64,
) -> Result<f64> {
    let mut pts: Vec<f64> = splits
        .iter()
        .copied()
        .filter(|&s| s > lo && s < hi)
        .collect();
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let per_panel = tol / (pts.len() - 1) as f64;
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += adaptive_quad(f, w[0], w[1], per_panel)?;
    }
    Ok(total)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol {
        return Ok(left + right + err / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numerical(format!(
            "quadrature failed to converge on [{a}, {b}]: local error {:.3e} > {:.3e}",
            err.abs(),
            15.0 * tol
        )));
    }
    let half = 0.5 * tol;
    Ok(simpson_refine(f, a, m, fa, flm, fm, left, half, depth - 1)?
        + simpson_refine(f, m, b, fm, frm, fb, right, half, depth - 1)?)
}

/// ln(n!) table-backed for the binomial coefficients used by the bounds.
pub fn ln_factorial(n: usize) -> f64 {
    thread_local! {
        static TABLE: Vec<f64> = {
            let mut t = vec![0.0; 257];
            for i in 2..t.len() {
                t[i] = t[i - 1] + (i as f64).ln();
            }
            t
        };
    }
    if n < 257 {
        TABLE.with(|t| t[n])
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

/// ln C(n, m).
pub fn ln_binomial(n: usize, m: usize) -> f64 {
    assert!(m <= n);
    ln_factorial(n) - ln_factorial(m) - ln_factorial(n - m)
}

/// Binomial pmf C(n,m) p^m (1-p)^(n-m), computed in the log domain.
pub fn binomial_pmf(n: usize, m: usize, p: f64) -> f64 {
    if p == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if m == n { 1.0 } else { 0.0 };
    }
    (ln_binomial(n, m) + m as f64 * p.ln() + (n - m) as f64 * (-p).ln_1p()).exp()
}

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let c = cdf(x);
        d = d.max((c - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - c).abs());
    }
    d
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic one-sample KS critical value at significance `alpha`.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    ((-0.5 * (alpha / 2.0).ln()) / n as f64).sqrt()
}

/// Asymptotic two-sample KS critical value at significance `alpha`.
pub fn ks_critical_two_sample(na: usize, nb: usize, alpha: f64) -> f64 {
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    c * ((na + nb) as f64 / (na as f64 * nb as f64)).sqrt()
}

/// Least-squares slope of y against x.
pub fn ls_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!(
            "slope fit needs matching lengths, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::Domain(format!(
            "slope fit needs at least 3 points, got {}",
            x.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values to 20 digits.
    #[allow(clippy::excessive_precision)]
    const ERF_TABLE: [(f64, f64, f64); 10] = [
        (0.1, 0.1124629160182848984, 0.8875370839817151016),
        (0.5, 0.52049987781304653768, 0.47950012218695346232),
        (1.0, 0.84270079294971486934, 0.15729920705028513066),
        (1.5, 0.96610514647531072707, 0.033894853524689272933),
        (2.0, 0.99532226501895273416, 0.0046777349810472658379),
        (3.0, 0.99997790950300141456, 0.000022090496998585441373),
        (5.0, 0.99999999999846254021, 1.5374597944280348502e-12),
        (8.0, 1.0, 1.122429717298292708e-29),
        (12.0, 1.0, 1.3562611692059042128e-64),
        (20.0, 1.0, 5.3958656116079009289e-176),
    ];

    #[test]
    fn erf_reference_values() {
        for &(x, e, ec) in ERF_TABLE.iter() {
            assert!(
                ((erf(x) - e) / e).abs() < 1e-12,
                "erf({x}) = {} want {e}",
                erf(x)
            );
            assert!(
                ((erfc(x) - ec) / ec).abs() < 1e-12,
                "erfc({x}) = {} want {ec}",
                erfc(x)
            );
        }
        assert_eq!(erf(0.0), 0.0);
        assert_eq!(erfc(0.0), 1.0);
    }

    #[test]
    fn erf_identities() {
        let mut x = -6.0;
        while x <= 6.0 {
            assert!((erf(x) + erfc(x) - 1.0).abs() < 1e-14, "x = {x}");
            assert!((erf(x) + erf(-x)).abs() < 1e-15, "odd symmetry at {x}");
            x += 0.25;
        }
    }

    #[test]
    fn quadrature_normal_density() {
        let v = adaptive_quad(&|z| normal_pdf(z, 1.0), -8.0, 8.0, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "integral = {v}");
    }

    #[test]
    fn quadrature_split_invariance() {
        // Splitting at an arbitrary interior point moves the answer by at
        // most twice the tolerance.
        let f = |x: f64| (x * x).sin() + 1.0 / (1.0 + x * x);
        let tol = 1e-10;
        let whole = adaptive_quad(&f, 0.0, 5.0, tol).unwrap();
        let split = adaptive_quad(&f, 0.0, 1.37, tol).unwrap()
            + adaptive_quad(&f, 1.37, 5.0, tol).unwrap();
        assert!((whole - split).abs() < 2.0 * tol);
    }

    #[test]
    fn quadrature_rejects_bad_tolerance() {
        assert!(adaptive_quad(&|x| x, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn binomial_helpers() {
        assert!((ln_binomial(23, 4).exp() - 8855.0).abs() < 1e-8);
        let total: f64 = (0..=23).map(|m| binomial_pmf(23, m, 0.3)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(binomial_pmf(10, 0, 0.0), 1.0);
        assert_eq!(binomial_pmf(10, 3, 0.0), 0.0);
    }

    #[test]
    fn ks_uniform_sanity() {
        // Deterministic low-discrepancy points against the uniform CDF.
        let n = 4096;
        let mut xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&mut xs, |x| x.clamp(0.0, 1.0));
        assert!(d < ks_critical(n, 0.01));
    }

    #[test]
    fn slope_of_exact_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 2.0 * v).collect();
        assert!((ls_slope(&x, &y).unwrap() + 2.0).abs() < 1e-12);
        assert!(ls_slope(&x[..2], &y[..2]).is_err());
    }
}
