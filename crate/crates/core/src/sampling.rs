//! Grids and sampled extrema.

use crate::error::Result;

/// Safety margin added to sampled suprema used as bounds.
pub const SUP_INFLATION: f64 = 1e-9;
pub const DEFAULT_SUP_SAMPLES: usize = 4096;

/// `n >= 2` equally spaced points including both ends.
pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let step = (hi - lo) / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    g[n - 1] = hi;
    g
}

/// Sampled maximum of `f` on `[lo, hi]` refined by golden-section search
/// around the best sample. Returns `(argmax, max)`.
pub fn maximize<F>(mut f: F, lo: f64, hi: f64, samples: usize) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let g = grid(lo, hi, samples);
    let mut best = (g[0], f(g[0])?);
    let mut best_i = 0;
    for (i, &t) in g.iter().enumerate().skip(1) {
        let v = f(t)?;
        if v > best.1 || best.1.is_nan() {
            best = (t, v);
            best_i = i;
        }
    }
    let a = g[best_i.saturating_sub(1)];
    let b = g[(best_i + 1).min(g.len() - 1)];
    let refined = golden_max(&mut f, a, b, 60)?;
    if refined.1 > best.1 {
        best = refined;
    }
    Ok(best)
}

pub fn minimize<F>(mut f: F, lo: f64, hi: f64, samples: usize) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (x, v) = maximize(|t| f(t).map(|v| -v), lo, hi, samples)?;
    Ok((x, -v))
}

fn golden_max<F>(f: &mut F, mut a: f64, mut b: f64, iters: usize) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..iters {
        if (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc > fd { (c, fc) } else { (d, fd) })
}

/// Sample points for "for all u ≥ N" checks: `N·1.25^i`, `i = 0..=40`.
pub fn u_ladder(n: f64) -> Vec<f64> {
    (0..=40).map(|i| n * 1.25f64.powi(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_ends() {
        let g = grid(0.0, 1.0, 5);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn refines_interior_peak() {
        let (x, v) = maximize(|t| Ok(-(t - 0.123456789).powi(2)), 0.0, 1.0, 17).unwrap();
        assert!((x - 0.123456789).abs() < 1e-7);
        assert!(v <= 0.0 && v > -1e-14);
        let (x, v) = minimize(|t| Ok(t.sin()), 0.0, 6.0, 64).unwrap();
        assert!((x - 1.5 * std::f64::consts::PI).abs() < 1e-6);
        assert!((v + 1.0).abs() < 1e-12);
    }

    #[test]
    fn endpoint_maximum() {
        let (x, v) = maximize(Ok, 0.0, 2.0, 8).unwrap();
        assert_eq!((x, v), (2.0, 2.0));
    }
}
