//! Fringe metrics for detector distributions.

use crate::ensemble::HistogramSpec;
use crate::error::{Error, Result};

/// A local maximum or minimum of the smoothed profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    /// Centre of the extremum; the midpoint for a flat run of bins.
    pub bin_center: f64,
    pub height: f64,
    pub prominence: f64,
    pub first_bin: usize,
    pub last_bin: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremaReport {
    pub maxima: Vec<Extremum>,
    pub minima: Vec<Extremum>,
    pub smoothing_window: usize,
}

fn check_window(len: usize, window: usize) -> Result<()> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::invalid(
            "smoothing window must be odd and at least 1",
        ));
    }
    if len < window {
        return Err(Error::WindowTooLarge { len, window });
    }
    Ok(())
}

/// Centred moving average, truncated at the ends. Each window is summed
/// from both ends inward so that reversing the input reverses the output
/// bit for bit.
pub fn smooth(values: &[f64], window: usize) -> Result<Vec<f64>> {
    check_window(values.len(), window)?;
    let half = window / 2;
    let n = values.len();
    Ok((0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            let w = &values[lo..=hi];
            let len = w.len();
            let mut sum = 0.0;
            for j in 0..len / 2 {
                sum += w[j] + w[len - 1 - j];
            }
            if len % 2 == 1 {
                sum += w[len / 2];
            }
            sum / len as f64
        })
        .collect())
}

/// Flat runs `[l, r]` strictly higher than both neighbours.
fn peak_runs(f: &[f64]) -> Vec<(usize, usize)> {
    let n = f.len();
    let mut runs = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if f[i] > f[i - 1] {
            let mut r = i;
            while r + 1 < n && f[r + 1] == f[i] {
                r += 1;
            }
            if r + 1 < n && f[r + 1] < f[i] {
                runs.push((i, r));
            }
            i = r + 1;
        } else {
            i += 1;
        }
    }
    runs
}

/// Topographic prominence of the run `[l, r]` in `f`.
fn prominence(f: &[f64], l: usize, r: usize) -> f64 {
    let v = f[l];
    let mut left = v;
    for &x in f[..l].iter().rev() {
        if x > v {
            break;
        }
        left = left.min(x);
    }
    let mut right = v;
    for &x in &f[r + 1..] {
        if x > v {
            break;
        }
        right = right.min(x);
    }
    v - left.max(right)
}

#[derive(Clone, Copy)]
struct Candidate {
    is_max: bool,
    ext: Extremum,
}

/// Finds prominent extrema of a normalized distribution; see
/// [`find_extrema_at`]. Bin centres come from `spec`.
pub fn find_extrema(
    freqs: &[f64],
    spec: &HistogramSpec,
    n_detected: u64,
    window: usize,
    k_sigma: f64,
) -> Result<ExtremaReport> {
    if freqs.len() != spec.bin_count() {
        return Err(Error::LengthMismatch(freqs.len(), spec.bin_count()));
    }
    let centers: Vec<f64> = (0..freqs.len()).map(|k| spec.bin_center(k)).collect();
    find_extrema_at(freqs, &centers, n_detected, window, k_sigma)
}

/// Smooths `freqs` with a centred moving average of width `window` and
/// reports interior local maxima and minima whose prominence exceeds the
/// Poisson floor `k_sigma · √c̄ / n_detected`, where `c̄` is the smoothed
/// count at the extremum (at least one count).
///
/// After filtering, runs of same-kind neighbours are collapsed to their
/// most extreme member so maxima and minima alternate.
pub fn find_extrema_at(
    freqs: &[f64],
    centers: &[f64],
    n_detected: u64,
    window: usize,
    k_sigma: f64,
) -> Result<ExtremaReport> {
    if freqs.len() != centers.len() {
        return Err(Error::LengthMismatch(freqs.len(), centers.len()));
    }
    if !(k_sigma > 0.0) {
        return Err(Error::invalid("k_sigma must be positive"));
    }
    if n_detected == 0 {
        return Err(Error::EmptyHistogram);
    }
    if freqs.iter().any(|f| !f.is_finite()) {
        return Err(Error::NonFinite("frequencies"));
    }
    let smoothed = smooth(freqs, window)?;
    let negated: Vec<f64> = smoothed.iter().map(|v| -v).collect();
    let n = n_detected as f64;

    let mut candidates = Vec::new();
    for (is_max, profile) in [(true, &smoothed), (false, &negated)] {
        for (l, r) in peak_runs(profile) {
            let prom = prominence(profile, l, r);
            let height = smoothed[l];
            let floor = k_sigma * (height * n).max(1.0).sqrt() / n;
            if prom > floor {
                candidates.push(Candidate {
                    is_max,
                    ext: Extremum {
                        bin_center: 0.5 * (centers[l] + centers[r]),
                        height,
                        prominence: prom,
                        first_bin: l,
                        last_bin: r,
                    },
                });
            }
        }
    }
    candidates.sort_by_key(|c| c.ext.first_bin);

    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    for run in candidates.chunk_by(|a, b| a.is_max == b.is_max) {
        let is_max = run[0].is_max;
        let best = run
            .iter()
            .copied()
            .reduce(|a, b| {
                let better = if is_max {
                    b.ext.height > a.ext.height
                } else {
                    b.ext.height < a.ext.height
                };
                if better || (b.ext.height == a.ext.height && b.ext.prominence > a.ext.prominence) {
                    b
                } else {
                    a
                }
            })
            .expect("non-empty run");
        if is_max {
            maxima.push(best.ext);
        } else {
            minima.push(best.ext);
        }
    }

    Ok(ExtremaReport {
        maxima,
        minima,
        smoothing_window: window,
    })
}

/// Total-variation distance `½ Σ |f1 - f2|` between two sub-normalized
/// distributions.
pub fn total_variation(f1: &[f64], f2: &[f64]) -> Result<f64> {
    if f1.len() != f2.len() {
        return Err(Error::LengthMismatch(f1.len(), f2.len()));
    }
    for f in [f1, f2] {
        if f.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid(
                "frequencies must be finite and non-negative",
            ));
        }
        if f.iter().sum::<f64>() > 1.0 + 1e-9 {
            return Err(Error::invalid("frequencies must sum to at most 1"));
        }
    }
    Ok(0.5 * f1.iter().zip(f2).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// `Σ |f̃ᵢ₊₁ - f̃ᵢ| / (max f̃ - min f̃)` over the smoothed profile; 0 for a
/// flat profile (up to rounding). Monotone profiles score 1, fringes push it higher.
pub fn oscillation_index(freqs: &[f64], window: usize) -> Result<f64> {
    if freqs.iter().any(|f| !f.is_finite()) {
        return Err(Error::NonFinite("frequencies"));
    }
    let s = smooth(freqs, window)?;
    let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = s.iter().copied().fold(f64::INFINITY, f64::min);
    // Rounding in the moving average can ripple an exactly flat input.
    if max - min <= 8.0 * f64::EPSILON * max.abs().max(min.abs()) {
        return Ok(0.0);
    }
    let travel: f64 = s.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    Ok(travel / (max - min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn centers(n: usize) -> Vec<f64> {
        (0..n).map(|k| k as f64).collect()
    }

    fn triangle(n: usize, apex: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..n)
            .map(|i| (apex as f64 + 1.0 - (i as f64 - apex as f64).abs()).max(0.0))
            .collect();
        let total: f64 = raw.iter().sum();
        raw.iter().map(|v| v / total).collect()
    }

    #[test]
    fn single_triangle_peak() {
        let f = triangle(41, 20);
        let rep = find_extrema_at(&f, &centers(41), 100_000, 5, 5.0).unwrap();
        assert_eq!(rep.maxima.len(), 1);
        assert_eq!(rep.maxima[0].bin_center, 20.0);
        assert!(rep.minima.is_empty());
    }

    #[test]
    fn two_peaks_have_a_minimum_between() {
        let mut f: Vec<f64> = (0..60)
            .map(|i| {
                let x = i as f64;
                (-(x - 15.0).powi(2) / 8.0).exp() + (-(x - 45.0).powi(2) / 8.0).exp()
            })
            .collect();
        let s: f64 = f.iter().sum();
        f.iter_mut().for_each(|v| *v /= s);
        let rep = find_extrema_at(&f, &centers(60), 1_000_000, 3, 5.0).unwrap();
        assert_eq!(rep.maxima.len(), 2);
        assert_eq!(rep.minima.len(), 1);
        assert!((rep.minima[0].bin_center - 30.0).abs() < 1.0);
    }

    #[test]
    fn noise_floor_suppresses_small_bumps() {
        // Bumps of 1e-4 on a level of 1/50: invisible at 100 samples,
        // significant at 10⁹.
        let f: Vec<f64> = (0..50)
            .map(|i| 0.02 + if i % 10 == 5 { 1e-4 } else { 0.0 })
            .collect();
        let few = find_extrema_at(&f, &centers(50), 100, 1, 5.0).unwrap();
        assert!(few.maxima.is_empty());
        let many = find_extrema_at(&f, &centers(50), 1_000_000_000, 1, 5.0).unwrap();
        assert_eq!(many.maxima.len(), 5);
    }

    #[test]
    fn plateau_reports_midpoint() {
        let f = [0.0, 0.1, 0.3, 0.3, 0.3, 0.1, 0.0];
        let rep = find_extrema_at(&f, &centers(7), 1_000_000, 1, 1.0).unwrap();
        assert_eq!(rep.maxima.len(), 1);
        assert_eq!(rep.maxima[0].bin_center, 3.0);
        assert_eq!((rep.maxima[0].first_bin, rep.maxima[0].last_bin), (2, 4));
    }

    #[test]
    fn window_errors() {
        let f = [0.5, 0.5];
        assert_eq!(
            find_extrema_at(&f, &centers(2), 10, 5, 1.0),
            Err(Error::WindowTooLarge { len: 2, window: 5 })
        );
        assert!(find_extrema_at(&f, &centers(2), 10, 2, 1.0).is_err());
        assert!(oscillation_index(&f, 4).is_err());
        assert!(find_extrema_at(&f, &centers(2), 10, 1, 0.0).is_err());
    }

    #[test]
    fn total_variation_cases() {
        let f = [0.25, 0.5, 0.25];
        assert_eq!(total_variation(&f, &f).unwrap(), 0.0);
        assert_eq!(total_variation(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(
            total_variation(&[1.0], &[0.5, 0.5]),
            Err(Error::LengthMismatch(1, 2))
        );
        assert!(total_variation(&[0.9, 0.9], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn oscillation_index_cases() {
        let monotone: Vec<f64> = (0..20).map(|i| i as f64 * 0.01).collect();
        assert!((oscillation_index(&monotone, 5).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(oscillation_index(&[0.1; 10], 3).unwrap(), 0.0);
        let zigzag: Vec<f64> = (0..20)
            .map(|i| if i % 2 == 0 { 0.0 } else { 0.1 })
            .collect();
        assert!(oscillation_index(&zigzag, 1).unwrap() > 10.0);
    }

    #[test]
    fn symmetric_input_gives_symmetric_extrema() {
        let half: Vec<f64> = (0..30)
            .map(|i| ((i as f64) * 0.7).sin().abs() + 0.1 * i as f64)
            .collect();
        let mut f = half.clone();
        f.extend(half.iter().rev());
        let s: f64 = f.iter().sum();
        f.iter_mut().for_each(|v| *v /= s);
        let c: Vec<f64> = (0..60).map(|k| k as f64 - 29.5).collect();
        let rep = find_extrema_at(&f, &c, 1_000_000, 3, 2.0).unwrap();
        let mut pos: Vec<f64> = rep.maxima.iter().map(|e| e.bin_center).collect();
        let mut neg: Vec<f64> = pos.iter().map(|p| -p).collect();
        pos.sort_by(f64::total_cmp);
        neg.sort_by(f64::total_cmp);
        assert_eq!(pos, neg);
        assert!(!pos.is_empty());
    }

    fn distribution(len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0..1.0f64, len).prop_map(|v| {
            let s: f64 = v.iter().sum::<f64>() + 1e-12;
            v.iter().map(|x| x / s).collect()
        })
    }

    proptest! {
        #[test]
        fn reversal_mirrors_extrema(f in distribution(40), n in 100u64..1_000_000, w in prop::sample::select(vec![1usize, 3, 5])) {
            let c: Vec<f64> = (0..40).map(|k| k as f64 - 19.5).collect();
            let rev: Vec<f64> = f.iter().rev().copied().collect();
            let a = find_extrema_at(&f, &c, n, w, 2.0).unwrap();
            let b = find_extrema_at(&rev, &c, n, w, 2.0).unwrap();
            let mirrored = |v: &[Extremum]| {
                let mut p: Vec<(f64, f64)> = v.iter().map(|e| (-e.bin_center, e.height)).collect();
                p.sort_by(|x, y| x.0.total_cmp(&y.0));
                p
            };
            let plain = |v: &[Extremum]| v.iter().map(|e| (e.bin_center, e.height)).collect::<Vec<_>>();
            prop_assert_eq!(mirrored(&a.maxima), plain(&b.maxima));
            prop_assert_eq!(mirrored(&a.minima), plain(&b.minima));
        }

        #[test]
        fn extrema_alternate(f in distribution(50), w in prop::sample::select(vec![1usize, 3, 5])) {
            let c: Vec<f64> = (0..50).map(|k| k as f64).collect();
            let rep = find_extrema_at(&f, &c, 10_000, w, 1.0).unwrap();
            let mut all: Vec<(usize, bool)> = rep.maxima.iter().map(|e| (e.first_bin, true))
                .chain(rep.minima.iter().map(|e| (e.first_bin, false))).collect();
            all.sort();
            prop_assert!(all.windows(2).all(|p| p[0].1 != p[1].1));
        }

        #[test]
        fn total_variation_is_a_metric(a in distribution(16), b in distribution(16), c in distribution(16)) {
            let ab = total_variation(&a, &b).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
            prop_assert_eq!(ab, total_variation(&b, &a).unwrap());
            prop_assert!(total_variation(&a, &a).unwrap() == 0.0);
            let ac = total_variation(&a, &c).unwrap();
            let cb = total_variation(&c, &b).unwrap();
            prop_assert!(ab <= ac + cb + 1e-12);
        }

        #[test]
        fn oscillation_index_affine_invariant(f in distribution(30), scale in 0.1..10.0f64, shift in -1.0..1.0f64, w in prop::sample::select(vec![1usize, 3, 5])) {
            let g: Vec<f64> = f.iter().map(|v| scale * v + shift).collect();
            let a = oscillation_index(&f, w).unwrap();
            let b = oscillation_index(&g, w).unwrap();
            prop_assert!((a - b).abs() <= 1e-6 * a.max(1.0), "{} vs {}", a, b);
        }
    }
}
