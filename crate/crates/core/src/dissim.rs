//! Coarse-graining flow and inter-scale dissimilarity.
//!
//! The scale-`k` array `b^k` has the length of the input and is constant on
//! consecutive blocks of `Λ^k` entries, each equal to the block mean. Overlaps
//! are `O_{m,n} = (1/L) b^m · b^n` and the partial dissimilarity between
//! adjacent scales is `D_k = |O_{k+1,k} - (O_{k,k} + O_{k+1,k+1}) / 2|`.
//!
//! Profiles are evaluated on the compressed block-mean vectors, which gives
//! the same overlaps as the expanded arrays at a fraction of the memory.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::sampler::BitstringArray;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoarseGrainConfig {
    /// Filter width Λ.
    pub lambda: usize,
    /// Number of scale pairs; `None` means `⌊log_Λ L⌋`.
    pub k_max: Option<usize>,
    /// Add the finest pair `D_0` to the total.
    pub include_k0_in_total: bool,
    /// Drop trailing entries that do not fill a block instead of failing.
    pub allow_truncation: bool,
}

impl Default for CoarseGrainConfig {
    fn default() -> Self {
        CoarseGrainConfig { lambda: 2, k_max: None, include_k0_in_total: false, allow_truncation: true }
    }
}

impl CoarseGrainConfig {
    pub fn with_lambda(lambda: usize) -> Self {
        CoarseGrainConfig { lambda, ..Self::default() }
    }

    /// First scale pair included in the total.
    pub fn total_from(&self) -> usize {
        if self.include_k0_in_total {
            0
        } else {
            1
        }
    }

    fn resolve_k_max(&self, len: usize) -> Result<usize> {
        if self.lambda < 2 {
            return Err(Error::invalid(format!("filter width {} must be at least 2", self.lambda)));
        }
        if len < self.lambda * self.lambda {
            return Err(Error::invalid(format!(
                "array of length {len} is shorter than Λ² = {}",
                self.lambda * self.lambda
            )));
        }
        let auto = floor_log(len, self.lambda);
        match self.k_max {
            None => Ok(auto),
            Some(0) => Err(Error::invalid("k_max must be at least 1")),
            Some(k) if k > auto => Err(Error::invalid(format!(
                "k_max = {k} exceeds ⌊log_{} {len}⌋ = {auto}",
                self.lambda
            ))),
            Some(k) => Ok(k),
        }
    }
}

/// `⌊log_base n⌋` in integer arithmetic.
pub fn floor_log(n: usize, base: usize) -> usize {
    let mut k = 0;
    let mut p = base;
    while p <= n {
        k += 1;
        match p.checked_mul(base) {
            Some(next) => p = next,
            None => break,
        }
    }
    k
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissimilarityProfile {
    /// `D_k` for `k = 0 .. k_max - 1`; entry `k` compares scales `k` and `k+1`.
    pub partial: Vec<f64>,
    pub total: f64,
    pub lambda: usize,
    /// Input length before any truncation.
    pub len: usize,
    pub basis_tag: String,
    pub include_k0_in_total: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl DissimilarityProfile {
    pub fn k_max(&self) -> usize {
        self.partial.len()
    }

    /// CSV rows `basis,k,D_k` followed by `basis,total,D`.
    pub fn to_csv(&self, with_header: bool) -> String {
        let mut out = String::new();
        if with_header {
            out.push_str("basis,k,D_k\n");
        }
        for (k, d) in self.partial.iter().enumerate() {
            let _ = writeln!(out, "{},{k},{d:.12e}", self.basis_tag);
        }
        let _ = writeln!(out, "{},total,{:.12e}", self.basis_tag, self.total);
        out
    }
}

fn block_size(lambda: usize, k: usize) -> Result<usize> {
    if lambda < 2 {
        return Err(Error::invalid(format!("filter width {lambda} must be at least 2")));
    }
    if k < 1 {
        return Err(Error::invalid("coarse-graining step k must be at least 1"));
    }
    u32::try_from(k)
        .ok()
        .and_then(|k| lambda.checked_pow(k))
        .ok_or_else(|| Error::invalid(format!("Λ^k overflows for Λ={lambda}, k={k}")))
}

/// Replace each block of `Λ^k` consecutive entries by its mean.
///
/// Given the scale `k-1` array this yields scale `k`; applying it to an array
/// already constant on those blocks returns the array unchanged.
pub fn coarse_grain_step(array: &[f64], lambda: usize, k: usize) -> Result<Vec<f64>> {
    let block = block_size(lambda, k)?;
    if array.len() % block != 0 || array.is_empty() {
        return Err(Error::Indivisible { len: array.len(), block });
    }
    let mut out = Vec::with_capacity(array.len());
    for chunk in array.chunks_exact(block) {
        // A constant block is its own mean; summing would round it.
        let mean = if chunk.iter().all(|&x| x == chunk[0]) { chunk[0] } else { chunk.iter().sum::<f64>() / block as f64 };
        out.extend(std::iter::repeat_n(mean, block));
    }
    Ok(out)
}

/// `(1/L) a · b`.
pub fn overlap(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(Error::invalid("overlap of empty arrays"));
    }
    Ok(a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / a.len() as f64)
}

/// `|O_{k+1,k} - (O_{k,k} + O_{k+1,k+1}) / 2|` for a scale-`k` array and its
/// coarse-graining.
pub fn partial_dissimilarity(array_k: &[f64], array_k1: &[f64]) -> Result<f64> {
    let cross = overlap(array_k1, array_k)?;
    let fine = overlap(array_k, array_k)?;
    let coarse = overlap(array_k1, array_k1)?;
    let d = (cross - 0.5 * (fine + coarse)).abs();
    debug_assert!(
        (d - 0.5 * (fine - coarse)).abs() <= 1e-9 * fine.abs().max(1.0),
        "averaging identity violated: {d} vs {}",
        0.5 * (fine - coarse)
    );
    Ok(d)
}

/// Overlaps of adjacent scales computed on compressed block means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleOverlaps {
    pub fine: f64,
    pub cross: f64,
    pub coarse: f64,
}

impl ScaleOverlaps {
    pub fn dissimilarity(&self) -> f64 {
        (self.cross - 0.5 * (self.fine + self.coarse)).abs()
    }
}

/// Walk the coarse-graining flow and return the overlaps of every adjacent
/// scale pair `k = 0 .. k_max-1`, with any truncation notices.
pub fn scale_overlaps(values: &[f64], cfg: &CoarseGrainConfig) -> Result<(Vec<ScaleOverlaps>, Vec<String>)> {
    let k_max = cfg.resolve_k_max(values.len())?;
    let lambda = cfg.lambda;
    let mut warnings = Vec::new();
    let mut means = values.to_vec();
    // Width of one compressed entry in original samples.
    let mut width = 1usize;
    let mut out = Vec::with_capacity(k_max);
    for k in 0..k_max {
        let rem = means.len() % lambda;
        if rem != 0 {
            if !cfg.allow_truncation {
                return Err(Error::Indivisible { len: means.len() * width, block: width * lambda });
            }
            means.truncate(means.len() - rem);
            warnings.push(format!(
                "step {}: dropped trailing {} entries; L is now {}",
                k + 1,
                rem * width,
                means.len() * width
            ));
        }
        let coarse: Vec<f64> = means
            .chunks_exact(lambda)
            .map(|c| c.iter().sum::<f64>() / lambda as f64)
            .collect();
        // Every compressed entry stands for `width` equal samples, so the
        // 1/L normalization reduces to a mean over compressed entries.
        let n = means.len() as f64;
        let fine = means.iter().map(|x| x * x).sum::<f64>() / n;
        let cross = means
            .chunks_exact(lambda)
            .zip(&coarse)
            .map(|(c, m)| c.iter().map(|x| x * m).sum::<f64>())
            .sum::<f64>()
            / n;
        let coarse_sq = coarse.iter().map(|x| x * x).sum::<f64>() / coarse.len() as f64;
        let o = ScaleOverlaps { fine, cross, coarse: coarse_sq };
        debug_assert!(
            (o.dissimilarity() - 0.5 * (fine - coarse_sq)).abs() <= 1e-9 * fine.abs().max(1.0),
            "averaging identity violated at k={k}"
        );
        out.push(o);
        means = coarse;
        width *= lambda;
    }
    Ok((out, warnings))
}

/// Profile of a raw value array.
pub fn profile_of_values(values: &[f64], cfg: &CoarseGrainConfig, basis_tag: &str) -> Result<DissimilarityProfile> {
    let (overlaps, warnings) = scale_overlaps(values, cfg)?;
    let partial: Vec<f64> = overlaps.iter().map(ScaleOverlaps::dissimilarity).collect();
    let total = partial.iter().skip(cfg.total_from()).sum();
    Ok(DissimilarityProfile {
        partial,
        total,
        lambda: cfg.lambda,
        len: values.len(),
        basis_tag: basis_tag.to_string(),
        include_k0_in_total: cfg.include_k0_in_total,
        seed: None,
        warnings,
    })
}

/// Profile of a measurement record.
pub fn dissimilarity_profile(array: &BitstringArray, cfg: &CoarseGrainConfig) -> Result<DissimilarityProfile> {
    let mut p = profile_of_values(&array.to_f64(), cfg, &array.basis_tag)?;
    p.seed = array.seed;
    Ok(p)
}

/// Central-limit model of an iid input with the given mean and variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IidModel {
    pub mean: f64,
    pub variance: f64,
}

impl IidModel {
    /// Symmetric ±1 bits.
    pub const SYMMETRIC_BITS: IidModel = IidModel { mean: 0.0, variance: 1.0 };

    /// Expected `O_{k,k} = μ² + σ²/Λ^k`.
    pub fn overlap(&self, lambda: usize, k: usize) -> f64 {
        self.mean * self.mean + self.variance / (lambda as f64).powi(k as i32)
    }

    /// Expected `D_k = σ²/(2Λ^k) (1 - 1/Λ)`; the mean cancels.
    pub fn partial(&self, lambda: usize, k: usize) -> f64 {
        0.5 * (self.overlap(lambda, k) - self.overlap(lambda, k + 1))
    }

    /// Sum of `partial` over `k_from .. k_to`.
    pub fn total(&self, lambda: usize, k_from: usize, k_to: usize) -> f64 {
        (k_from..k_to).map(|k| self.partial(lambda, k)).sum()
    }
}

/// `σ²/(2Λ^k) (1 - 1/Λ)`; for ±1 bits this is `½(1 - 1/Λ) Λ^-k`.
pub fn analytic_random_profile(lambda: usize, variance: f64, mean: f64, k: usize) -> f64 {
    IidModel { mean, variance }.partial(lambda, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    #[test]
    fn coarse_grain_examples() {
        let a = [-1.0, -1.0, 1.0, 1.0];
        assert_eq!(coarse_grain_step(&a, 2, 1).unwrap(), a.to_vec());
        assert_eq!(coarse_grain_step(&[1.0, -1.0, 1.0, -1.0], 2, 1).unwrap(), vec![0.0; 4]);
        let b1 = coarse_grain_step(&[1.0, 1.0, -1.0, 1.0], 2, 1).unwrap();
        assert_eq!(coarse_grain_step(&b1, 2, 2).unwrap(), vec![0.5; 4]);
        assert!(coarse_grain_step(&a, 2, 0).is_err());
        assert!(coarse_grain_step(&a, 1, 1).is_err());
        assert!(matches!(coarse_grain_step(&[1.0; 6], 2, 2), Err(Error::Indivisible { .. })));
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(overlap(&[1.0; 8], &[1.0; 8]).unwrap(), 1.0);
        assert_eq!(overlap(&[1.0, -1.0, 1.0, -1.0], &[0.0; 4]).unwrap(), 0.0);
        assert_eq!(overlap(&[1.0, 1.0, -1.0, -1.0], &[1.0, 0.0, 0.0, -1.0]).unwrap(), 0.5);
        assert!(overlap(&[1.0], &[1.0, 2.0]).is_err());
        assert!(overlap(&[], &[]).is_err());
    }

    #[test]
    fn partial_examples() {
        let c = [1.0; 8];
        assert_eq!(partial_dissimilarity(&c, &coarse_grain_step(&c, 2, 1).unwrap()).unwrap(), 0.0);
        let a = [1.0, -1.0, 1.0, -1.0];
        assert_eq!(partial_dissimilarity(&a, &[0.0; 4]).unwrap(), 0.5);
        assert!(partial_dissimilarity(&a, &[0.0; 3]).is_err());
    }

    #[test]
    fn compressed_profile_matches_expanded_arrays() {
        let vals: Vec<f64> = (0..256).map(|i| if (i * 37 + i / 5) % 7 < 3 { 1.0 } else { -1.0 }).collect();
        for lambda in [2, 4] {
            let p = profile_of_values(&vals, &CoarseGrainConfig::with_lambda(lambda), "t").unwrap();
            let mut cur = vals.clone();
            for (k, &d) in p.partial.iter().enumerate() {
                let next = coarse_grain_step(&cur, lambda, k + 1).unwrap();
                let want = partial_dissimilarity(&cur, &next).unwrap();
                assert!((d - want).abs() < EPS, "Λ={lambda} k={k}");
                cur = next;
            }
        }
    }

    #[test]
    fn analytic_examples() {
        assert!((analytic_random_profile(2, 1.0, 0.0, 0) - 0.25).abs() < EPS);
        assert!((analytic_random_profile(2, 1.0, 0.0, 3) - 0.03125).abs() < EPS);
        assert!((analytic_random_profile(4, 0.25, 0.5, 1) - 0.0234375).abs() < EPS);
    }

    #[test]
    fn k_max_and_total_convention() {
        let vals: Vec<f64> = (0..64).map(|i| if i % 3 == 0 { 1.0 } else { -1.0 }).collect();
        let p = profile_of_values(&vals, &CoarseGrainConfig::default(), "z").unwrap();
        assert_eq!(p.k_max(), 6);
        let tail: f64 = p.partial[1..].iter().sum();
        assert!((p.total - tail).abs() < EPS);
        let cfg = CoarseGrainConfig { include_k0_in_total: true, ..Default::default() };
        let p0 = profile_of_values(&vals, &cfg, "z").unwrap();
        assert!((p0.total - p.partial.iter().sum::<f64>()).abs() < EPS);
        assert_eq!(floor_log(64, 4), 3);
        assert_eq!(floor_log(63, 4), 2);
    }

    #[test]
    fn remainder_policy() {
        let vals = vec![1.0; 24];
        let p = profile_of_values(&vals, &CoarseGrainConfig::default(), "z").unwrap();
        assert_eq!(p.k_max(), 4);
        assert!(!p.warnings.is_empty());
        let strict = CoarseGrainConfig { allow_truncation: false, ..Default::default() };
        assert!(matches!(profile_of_values(&vals, &strict, "z"), Err(Error::Indivisible { .. })));
        assert!(profile_of_values(&[1.0; 3], &CoarseGrainConfig::default(), "z").is_err());
    }

    #[test]
    fn csv_has_summary_row() {
        let p = profile_of_values(&[1.0, -1.0, 1.0, -1.0], &CoarseGrainConfig::default(), "z").unwrap();
        let csv = p.to_csv(true);
        assert!(csv.starts_with("basis,k,D_k\n"));
        assert!(csv.lines().last().unwrap().starts_with("z,total,"));
    }
}
