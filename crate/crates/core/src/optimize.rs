//! One-dimensional minimization: uniform grid scan followed by golden-section
//! refinement of the best bracket.

/// `1/φ`, the golden-section interval reduction factor.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
}

/// Golden-section search on `[lo, hi]` until the bracket is narrower than
/// `xtol`. `f` is assumed unimodal on the bracket.
pub fn golden_section<F>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Minimum
where
    F: Fn(f64) -> f64,
{
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while (hi - lo).abs() > xtol {
        // Ties keep the left point.
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    if fc <= fd {
        Minimum { x: c, value: fc }
    } else {
        Minimum { x: d, value: fd }
    }
}

/// Scans `points` evenly spaced abscissae over `[lo, hi]` (inclusive), then
/// refines around the lowest one. Non-finite values are treated as +∞; ties
/// resolve to the smallest abscissa. Returns `None` if every grid value is
/// non-finite.
pub fn grid_then_golden<F>(f: F, lo: f64, hi: f64, points: usize, xtol: f64) -> Option<Minimum>
where
    F: Fn(f64) -> f64 + Sync,
{
    use rayon::prelude::*;

    assert!(points >= 3 && hi > lo);
    let step = (hi - lo) / (points - 1) as f64;
    let values: Vec<f64> = (0..points)
        .into_par_iter()
        .map(|k| f(lo + step * k as f64))
        .collect();

    let mut best: Option<(usize, f64)> = None;
    for (k, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            continue;
        }
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((k, v));
        }
    }
    let (k, grid_value) = best?;

    let a = lo + step * k.saturating_sub(1) as f64;
    let b = (lo + step * (k + 1) as f64).min(hi);
    let guarded = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let refined = golden_section(guarded, a, b, xtol);
    if refined.value <= grid_value {
        Some(refined)
    } else {
        Some(Minimum {
            x: lo + step * k as f64,
            value: grid_value,
        })
    }
}
