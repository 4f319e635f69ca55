#![allow(dead_code)]

use ktfloor::special::normal_cdf;

/// Trapezoid rule with `steps` equal panels over `[a, b]`.
pub fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> f64 {
    let h = (b - a) / steps as f64;
    let inner: f64 = (1..steps).map(|k| f(a + k as f64 * h)).sum();
    h * (0.5 * f(a) + inner + 0.5 * f(b))
}

/// Kolmogorov–Smirnov distance between `samples` and `N(0, sigma²)`.
pub fn ks_distance_normal(samples: &[f64], sigma: f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = normal_cdf(x / sigma);
            let lo = cdf - i as f64 / n;
            let hi = (i + 1) as f64 / n - cdf;
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}

/// Critical KS distance at the 1% level for large samples.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// Sample autocorrelation at `lag`, about the known zero mean.
pub fn autocorrelation(xs: &[f64], lag: usize) -> f64 {
    let var: f64 = xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
    let cov: f64 =
        xs.iter().zip(&xs[lag..]).map(|(a, b)| a * b).sum::<f64>() / (xs.len() - lag) as f64;
    cov / var
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Log-spaced grid from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| lo * (hi / lo).powf(i as f64 / (points - 1) as f64))
        .collect()
}
