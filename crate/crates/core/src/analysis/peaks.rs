/// Smoothing and height conventions for [`count_peaks`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakConfig {
    /// Moving-average width as a fraction of the number of sites.
    pub width_fraction: f64,
    pub min_width: usize,
    /// Peaks lower than this fraction of the smoothed maximum are ignored.
    pub rel_height: f64,
    /// Minimum prominence as a fraction of the smoothed maximum. Filters
    /// sampling noise riding on an otherwise smooth profile.
    pub rel_prominence: f64,
}

impl Default for PeakConfig {
    fn default() -> Self {
        Self {
            width_fraction: 0.05,
            min_width: 3,
            rel_height: 0.2,
            rel_prominence: 0.05,
        }
    }
}

impl PeakConfig {
    pub fn width(&self, n: usize) -> usize {
        ((self.width_fraction * n as f64).round() as usize).max(self.min_width)
    }
}

/// Centred moving average over `width / 2` sites on each side, truncated
/// at the ends.
pub fn smooth(values: &[f64], width: usize) -> Vec<f64> {
    let n = values.len();
    let half = width / 2;
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in values {
        prefix.push(prefix.last().unwrap() + v);
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            (prefix[hi + 1] - prefix[lo]) / (hi + 1 - lo) as f64
        })
        .collect()
}

/// Topographic prominence of the maximum at `i`: its height above the
/// higher of the two minima separating it from taller ground (or the ends).
fn prominence(s: &[f64], i: usize) -> f64 {
    let peak = s[i];
    let mut left_min = peak;
    for &v in s[..i].iter().rev() {
        if v > peak {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = peak;
    for &v in &s[i + 1..] {
        if v > peak {
            break;
        }
        right_min = right_min.min(v);
    }
    peak - left_min.max(right_min)
}

/// Number of interior local maxima of the smoothed profile that rise strictly
/// above both neighbours (a flat top counts once), reach `rel_height × max`
/// and have prominence at least `rel_prominence × max`.
pub fn count_peaks(values: &[f64], cfg: &PeakConfig) -> usize {
    let n = values.len();
    if n < 3 {
        return 0;
    }
    let s = smooth(values, cfg.width(n));
    let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) {
        return 0;
    }
    let height = cfg.rel_height * max;
    let floor = cfg.rel_prominence * max;
    let mut peaks = 0;
    let mut i = 1;
    while i < n - 1 {
        if s[i] > s[i - 1] {
            let mut j = i;
            while j + 1 < n && s[j + 1] == s[i] {
                j += 1;
            }
            if j + 1 < n
                && s[j + 1] < s[i]
                && s[i] >= height
                && prominence(&s, i) >= floor
            {
                peaks += 1;
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}
