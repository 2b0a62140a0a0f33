//! Descriptive statistics shared by preparation, reporting and explanation.

use alloc::vec::Vec;

use crate::math;

/// Type-7 quantile (linear interpolation between order statistics at
/// position `1 + (n - 1) p`) of an ascending slice.
///
/// Returns `None` for an empty slice.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = math::floor(h) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    Some(sorted[lo] + frac * (sorted[hi] - sorted[lo]))
}

pub fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn quantile(values: &[f64], p: f64) -> Option<f64> {
    quantile_sorted(&sorted_copy(values), p)
}

pub fn median(values: &[f64]) -> Option<f64> {
    quantile(values, 0.5)
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Sample standard deviation (n - 1 denominator); `None` below two values.
pub fn sample_sd(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let m = mean(values)?;
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    Some(math::sqrt(ss / (values.len() - 1) as f64))
}

/// Population standard deviation.
pub fn population_sd(values: &[f64]) -> Option<f64> {
    let m = mean(values)?;
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    Some(math::sqrt(ss / values.len() as f64))
}

/// Pearson correlation over the rows where both inputs are present.
/// Returns 0 when either side is constant on those rows.
pub fn pearson_pairwise(a: &[f64], a_missing: &[bool], b: &[f64], b_missing: &[bool]) -> f64 {
    let mut n = 0.0;
    let (mut sa, mut sb) = (0.0, 0.0);
    for i in 0..a.len() {
        if !a_missing[i] && !b_missing[i] {
            n += 1.0;
            sa += a[i];
            sb += b[i];
        }
    }
    if n < 2.0 {
        return 0.0;
    }
    let (ma, mb) = (sa / n, sb / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for i in 0..a.len() {
        if !a_missing[i] && !b_missing[i] {
            let (da, db) = (a[i] - ma, b[i] - mb);
            sab += da * db;
            saa += da * da;
            sbb += db * db;
        }
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return 0.0;
    }
    sab / math::sqrt(saa * sbb)
}

pub fn count_distinct(values: &[f64]) -> usize {
    let s = sorted_copy(values);
    let mut n = 0;
    for (i, v) in s.iter().enumerate() {
        if i == 0 || *v != s[i - 1] {
            n += 1;
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type7_quantiles() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert!((quantile(&v, 0.05).unwrap() - 5.95).abs() < 1e-12);
        assert!((quantile(&v, 0.95).unwrap() - 95.05).abs() < 1e-12);
        assert_eq!(median(&[1.0, 2.0, 100.0]), Some(2.0));
        assert_eq!(quantile(&[], 0.5), None);
    }

    #[test]
    fn sd_and_mean() {
        assert_eq!(mean(&[1.0, 2.0, 3.0]), Some(2.0));
        assert_eq!(sample_sd(&[1.0, 2.0, 3.0]), Some(1.0));
        assert_eq!(sample_sd(&[1.0]), None);
    }

    #[test]
    fn pearson_handles_missing_and_constants() {
        let a = [1.0, 2.0, 3.0, 100.0];
        let b = [2.0, 4.0, 6.0, -5.0];
        let r = pearson_pairwise(&a, &[false; 4], &b, &[false, false, false, true]);
        assert!((r - 1.0).abs() < 1e-12);
        assert_eq!(pearson_pairwise(&a, &[false; 4], &[1.0; 4], &[false; 4]), 0.0);
    }
}
