//! Stand-in for the sharing platform's processing path: the size guard,
//! spatial clamping, and a same-layout JPEG recompression at the platform's
//! measured quality factor.

use std::fmt;

use thiserror::Error;

use crate::cipher::CiphertextImage;
use crate::jpeg::{
    category_of, compress_pixels, decode_jpeg, decompress_pixels, encode_jpeg, CodecError,
    Component,
};

#[derive(Debug, Error)]
pub enum OsnError {
    #[error("{width}x{height} upload is not below the {max_dim}x{max_dim} no-resize bound")]
    Unsupported { width: usize, height: usize, max_dim: usize },
    #[error("uploads differ in geometry: {a:?} vs {b:?}")]
    DimensionMismatch { a: (usize, usize), b: (usize, usize) },
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// What the platform does to uploads: recompression quality, fixed 4:2:2
/// sampling, and the edge length at and above which it would resize instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlatformPolicy {
    pub recompress_qf: u8,
    pub max_dim: usize,
}

impl Default for PlatformPolicy {
    fn default() -> Self {
        Self { recompress_qf: 71, max_dim: 2048 }
    }
}

/// Simulates one pass through the platform: reject oversized uploads, decode
/// to pixels (clamping on the way), and re-encode at the policy quality.
pub fn platform_process(
    upload: &CiphertextImage,
    policy: &PlatformPolicy,
) -> Result<CiphertextImage, OsnError> {
    let data = decode_jpeg(&upload.bytes)?;
    if data.width >= policy.max_dim || data.height >= policy.max_dim {
        return Err(OsnError::Unsupported {
            width: data.width,
            height: data.height,
            max_dim: policy.max_dim,
        });
    }
    let pixels = decompress_pixels(&data);
    let recompressed = compress_pixels(&pixels, policy.recompress_qf)?;
    let bytes = encode_jpeg(&recompressed)?;
    Ok(CiphertextImage {
        bytes,
        quality: policy.recompress_qf,
        width: data.width,
        height: data.height,
        grayscale: data.is_gray(),
    })
}

/// Per-component coefficient survival across one processing pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSurvival {
    pub component: Component,
    pub total: usize,
    pub identical: usize,
    pub category_changes: usize,
    pub zero_flips: usize,
}

impl ComponentSurvival {
    pub fn identical_fraction(&self) -> f64 {
        self.identical as f64 / self.total as f64
    }
}

/// How much of the coefficient domain survived a processing pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurvivalReport {
    pub components: Vec<ComponentSurvival>,
}

impl SurvivalReport {
    /// Identical fraction across all components together.
    pub fn identical_fraction(&self) -> f64 {
        let total: usize = self.components.iter().map(|c| c.total).sum();
        let identical: usize = self.components.iter().map(|c| c.identical).sum();
        identical as f64 / total as f64
    }

    /// Machine-readable key=value lines.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        for c in &self.components {
            let name = component_name(c.component);
            out.push_str(&format!(
                "survival.{name}.total={}\nsurvival.{name}.identical={}\nsurvival.{name}.identical_fraction={:.6}\nsurvival.{name}.category_changes={}\nsurvival.{name}.zero_flips={}\n",
                c.total, c.identical, c.identical_fraction(), c.category_changes, c.zero_flips
            ));
        }
        out.push_str(&format!("survival.overall.identical_fraction={:.6}\n", self.identical_fraction()));
        out
    }
}

fn component_name(c: Component) -> &'static str {
    match c {
        Component::Luma => "y",
        Component::Cb => "cb",
        Component::Cr => "cr",
    }
}

impl fmt::Display for SurvivalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.components {
            writeln!(
                f,
                "{}: {}/{} coefficients identical ({:.2}%), {} category changes, {} zero flips",
                component_name(c.component),
                c.identical,
                c.total,
                100.0 * c.identical_fraction(),
                c.category_changes,
                c.zero_flips
            )?;
        }
        write!(f, "overall: {:.2}% identical", 100.0 * self.identical_fraction())
    }
}

/// Compares the coefficient planes of two files of the same geometry.
pub fn survival_report(
    before: &CiphertextImage,
    after: &CiphertextImage,
) -> Result<SurvivalReport, OsnError> {
    let a = decode_jpeg(&before.bytes)?;
    let b = decode_jpeg(&after.bytes)?;
    if (a.width, a.height) != (b.width, b.height) || a.planes.len() != b.planes.len() {
        return Err(OsnError::DimensionMismatch {
            a: (a.width, a.height),
            b: (b.width, b.height),
        });
    }
    let components = a
        .planes
        .iter()
        .zip(&b.planes)
        .map(|(pa, pb)| {
            let mut identical = 0usize;
            let mut category_changes = 0usize;
            let mut zero_flips = 0usize;
            let mut total = 0usize;
            for (ba, bb) in pa.blocks().iter().zip(pb.blocks()) {
                for (&ca, &cb) in ba.iter().zip(bb) {
                    total += 1;
                    if ca == cb {
                        identical += 1;
                        continue;
                    }
                    if category_of(ca) != category_of(cb) {
                        category_changes += 1;
                    }
                    if (ca == 0) != (cb == 0) {
                        zero_flips += 1;
                    }
                }
            }
            ComponentSurvival {
                component: pa.component,
                total,
                identical,
                category_changes,
                zero_flips,
            }
        })
        .collect();
    Ok(SurvivalReport { components })
}
