//! Security and fidelity metrics: channel entropy, PSNR, the four
//! block-feature sketch attacks (DCM, NCC, EAC, PLZ), and a correlation-based
//! leak score that quantifies how much plaintext structure an attack map
//! still reveals.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use thiserror::Error;

use crate::jpeg::{category_of, CoefficientPlane, PixelImage};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("dimension mismatch: {a:?} vs {b:?}")]
    DimensionMismatch { a: (usize, usize, usize), b: (usize, usize, usize) },
    #[error("attack map grids differ: {a:?} vs {b:?}")]
    GridMismatch { a: (usize, usize), b: (usize, usize) },
}

/// Which block feature an attack map visualizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackKind {
    /// DC category mapping.
    Dcm,
    /// Nonzero AC coefficient count.
    Ncc,
    /// AC energy (log-scaled).
    Eac,
    /// Position of the last nonzero AC coefficient.
    Plz,
}

/// Block-resolution grayscale rendering of one attack's feature values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackMap {
    pub kind: AttackKind,
    pub blocks_w: usize,
    pub blocks_h: usize,
    pub intensities: Vec<u8>,
}

impl AttackMap {
    pub fn grid(&self) -> (usize, usize) {
        (self.blocks_w, self.blocks_h)
    }

    /// Renders as an 8-bit grayscale image, nearest-neighbor upscaled.
    pub fn to_image(&self, scale: usize) -> PixelImage {
        assert!(scale >= 1);
        let w = self.blocks_w * scale;
        let h = self.blocks_h * scale;
        let mut samples = vec![0u8; w * h];
        for y in 0..h {
            for x in 0..w {
                samples[y * w + x] = self.intensities[(y / scale) * self.blocks_w + x / scale];
            }
        }
        PixelImage::new(w, h, 1, samples)
    }
}

/// Shannon entropy in bits of an 8-bit channel, from its 256-bin histogram.
pub fn channel_entropy(samples: &[u8]) -> f64 {
    assert!(!samples.is_empty());
    let mut histogram = [0u64; 256];
    for &s in samples {
        histogram[s as usize] += 1;
    }
    let n = samples.len() as f64;
    histogram
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// PSNR with the all-samples-identical case kept distinguishable from
/// merely-high fidelity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PsnrResult {
    Identical,
    Db(f64),
}

impl PsnrResult {
    /// Collapses to a plain dB value, +inf for identical inputs.
    pub fn db(self) -> f64 {
        match self {
            PsnrResult::Identical => f64::INFINITY,
            PsnrResult::Db(v) => v,
        }
    }
}

/// Peak signal-to-noise ratio over all samples of all channels.
pub fn psnr(a: &PixelImage, b: &PixelImage) -> Result<PsnrResult, AnalysisError> {
    if (a.width, a.height, a.channels) != (b.width, b.height, b.channels) {
        return Err(AnalysisError::DimensionMismatch {
            a: (a.width, a.height, a.channels),
            b: (b.width, b.height, b.channels),
        });
    }
    let sse: u64 = a
        .samples
        .iter()
        .zip(&b.samples)
        .map(|(&x, &y)| {
            let d = i64::from(x) - i64::from(y);
            (d * d) as u64
        })
        .sum();
    if sse == 0 {
        return Ok(PsnrResult::Identical);
    }
    let mse = sse as f64 / a.samples.len() as f64;
    Ok(PsnrResult::Db(10.0 * (255.0 * 255.0 / mse).log10()))
}

fn block_feature_map<F>(plane: &CoefficientPlane, kind: AttackKind, feature: F) -> AttackMap
where
    F: Fn(&[i32; 64]) -> u8 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    let intensities = plane.blocks().par_iter().map(feature).collect();
    #[cfg(not(feature = "parallel"))]
    let intensities = plane.blocks().iter().map(feature).collect();
    AttackMap { kind, blocks_w: plane.blocks_w, blocks_h: plane.blocks_h, intensities }
}

/// DC category mapping: each block's intensity is the magnitude category of
/// its DC value, scaled onto [0, 255] by 255/11.
pub fn attack_dcm(plane: &CoefficientPlane) -> AttackMap {
    block_feature_map(plane, AttackKind::Dcm, |b| {
        (category_of(b[0]) as f64 * 255.0 / 11.0).round() as u8
    })
}

/// Nonzero-AC count, scaled by 255/63.
pub fn attack_ncc(plane: &CoefficientPlane) -> AttackMap {
    block_feature_map(plane, AttackKind::Ncc, |b| {
        let count = b[1..].iter().filter(|&&v| v != 0).count();
        (count as f64 * 255.0 / 63.0).round() as u8
    })
}

/// AC energy, log-scaled against the image-wide maximum (AC energy spans
/// orders of magnitude; linear scaling blacks out most blocks).
pub fn attack_eac(plane: &CoefficientPlane) -> AttackMap {
    let energies: Vec<u64> = plane
        .blocks()
        .iter()
        .map(|b| b[1..].iter().map(|&v| (i64::from(v) * i64::from(v)) as u64).sum())
        .collect();
    let e_max = energies.iter().copied().max().unwrap_or(0);
    let scale = if e_max == 0 { 0.0 } else { 255.0 / (1.0 + e_max as f64).ln() };
    let intensities = energies
        .iter()
        .map(|&e| ((1.0 + e as f64).ln() * scale).round() as u8)
        .collect();
    AttackMap {
        kind: AttackKind::Eac,
        blocks_w: plane.blocks_w,
        blocks_h: plane.blocks_h,
        intensities,
    }
}

/// Position of the last nonzero AC coefficient (zigzag index, 0 if none),
/// scaled by 255/63.
pub fn attack_plz(plane: &CoefficientPlane) -> AttackMap {
    block_feature_map(plane, AttackKind::Plz, |b| {
        let last = (1..64).rev().find(|&q| b[q] != 0).unwrap_or(0);
        (last as f64 * 255.0 / 63.0).round() as u8
    })
}

/// Pearson correlation between two attack maps' intensity grids; 0 when
/// either grid is constant. Values near zero mean the ciphertext map keeps
/// none of the plaintext's spatial feature layout.
pub fn leak_score(a: &AttackMap, b: &AttackMap) -> Result<f64, AnalysisError> {
    if a.grid() != b.grid() {
        return Err(AnalysisError::GridMismatch { a: a.grid(), b: b.grid() });
    }
    let n = a.intensities.len() as f64;
    let mean_a = a.intensities.iter().map(|&v| f64::from(v)).sum::<f64>() / n;
    let mean_b = b.intensities.iter().map(|&v| f64::from(v)).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (&x, &y) in a.intensities.iter().zip(&b.intensities) {
        let dx = f64::from(x) - mean_a;
        let dy = f64::from(y) - mean_b;
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return Ok(0.0);
    }
    Ok(cov / (var_a.sqrt() * var_b.sqrt()))
}
