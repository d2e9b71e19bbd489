//! Statistical checks used to compare simulators: chi-square goodness of fit
//! and homogeneity with bin pooling, a one-sample Kolmogorov–Smirnov test
//! against an exponential law, and log-log slope fitting.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Minimum expected count per pooled bin.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    /// Degrees of freedom (chi-square) or sample size (KS).
    pub df: usize,
    pub p_value: f64,
}

pub fn chi_square_sf(statistic: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    dist.sf(statistic).clamp(0.0, 1.0)
}

/// Pearson goodness of fit of `observed` against category probabilities.
/// Adjacent categories are pooled until each bin expects at least
/// [`MIN_EXPECTED`] hits; a short tail is folded into the last bin.
pub fn goodness_of_fit(observed: &[u64], probabilities: &[f64]) -> TestResult {
    assert_eq!(observed.len(), probabilities.len());
    let n: u64 = observed.iter().sum();
    let norm: f64 = probabilities.iter().sum();
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&obs, &p) in observed.iter().zip(probabilities) {
        o += obs as f64;
        e += n as f64 * p / norm;
        if e >= MIN_EXPECTED {
            bins.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => bins.push((o, e)),
        }
    }
    let statistic: f64 = bins.iter().map(|(o, e)| if *e > 0.0 { (o - e).powi(2) / e } else { 0.0 }).sum();
    let df = bins.len().saturating_sub(1);
    TestResult { statistic, df, p_value: chi_square_sf(statistic, df) }
}

/// Chi-square test that two samples of a discrete variable come from the
/// same distribution. Inputs are histograms indexed by value; adjacent
/// values are pooled until every cell's expected count reaches
/// [`MIN_EXPECTED`].
pub fn homogeneity(first: &[u64], second: &[u64]) -> TestResult {
    let len = first.len().max(second.len());
    let at = |h: &[u64], i: usize| h.get(i).copied().unwrap_or(0) as f64;
    let (r1, r2): (f64, f64) = (first.iter().sum::<u64>() as f64, second.iter().sum::<u64>() as f64);
    let total = r1 + r2;
    if r1 == 0.0 || r2 == 0.0 {
        return TestResult { statistic: 0.0, df: 0, p_value: 1.0 };
    }
    let min_row = r1.min(r2);
    let mut columns: Vec<(f64, f64)> = Vec::new();
    let (mut a, mut b) = (0.0, 0.0);
    for i in 0..len {
        a += at(first, i);
        b += at(second, i);
        if (a + b) * min_row / total >= MIN_EXPECTED {
            columns.push((a, b));
            a = 0.0;
            b = 0.0;
        }
    }
    if a + b > 0.0 {
        match columns.last_mut() {
            Some(last) => {
                last.0 += a;
                last.1 += b;
            }
            None => columns.push((a, b)),
        }
    }
    let mut statistic = 0.0;
    for (a, b) in &columns {
        let col = a + b;
        let (e1, e2) = (col * r1 / total, col * r2 / total);
        statistic += (a - e1).powi(2) / e1 + (b - e2).powi(2) / e2;
    }
    let df = columns.len().saturating_sub(1);
    TestResult { statistic, df, p_value: chi_square_sf(statistic, df) }
}

/// Asymptotic Kolmogorov survival function `Q(λ) = 2 Σ (-1)^{k-1} e^{-2k²λ²}`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    let mut previous_term = 0.0;
    for k in 1..=100 {
        let term = sign * 2.0 * (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += term;
        if term.abs() <= 1e-10 * previous_term || term.abs() <= 1e-16 * sum.abs() {
            return sum.clamp(0.0, 1.0);
        }
        sign = -sign;
        previous_term = term.abs();
    }
    1.0
}

/// One-sample KS test of `samples` against Exponential(`rate`).
pub fn ks_exponential(samples: &[f64], rate: f64) -> TestResult {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let cdf = 1.0 - (-rate * x).exp();
        d = d.max((i + 1) as f64 / n - cdf).max(cdf - i as f64 / n);
    }
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    TestResult { statistic: d, df: xs.len(), p_value: kolmogorov_sf(lambda) }
}

/// Least-squares slope of `ln y` against `ln x`. `None` with fewer than two
/// distinct `x` or any nonpositive coordinate.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx.is_nan() || sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean.
pub fn standard_error(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0);
    (var / xs.len() as f64).sqrt()
}
