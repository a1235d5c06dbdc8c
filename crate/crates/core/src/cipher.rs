//! The encryption scheme proper: keyed permutation of whole 8x8 coefficient
//! blocks driven by the logistic map, XOR of nonzero AC coefficients against
//! 11-bit keystream units driven by the Henon map, spatial overflow repair,
//! and the end-to-end image pipelines.
//!
//! The AC XOR preserves each coefficient's leading magnitude bit, so the JPEG
//! category (and with it every Huffman run length) survives encryption; the
//! unit's first bit flips the sign instead. Applying the same keystream twice
//! is the identity, which is exactly how decryption works.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use thiserror::Error;

use crate::chaos::{
    make_ecus, ChaosError, EcuStream, EncryptionKey, HenonGen, LogisticGen, ECUS_PER_GROUP,
    ECU_BITS,
};
use crate::jpeg::{
    self, compress_pixels, decode_jpeg, encode_jpeg, reconstruct_planes, CodecError,
    CoefficientPlane, Component, PixelImage, RealPlane, SamplePlane, YCbCrPlanes,
};

/// Images at or beyond this edge length get resized by the platform, which
/// the scheme does not survive; both ends refuse them.
pub const MAX_DIMENSION: usize = 2048;

/// The quality factor the platform recompresses to; encrypting at the same
/// factor makes that recompression nearly idempotent.
pub const PIPELINE_QF: u8 = 71;

#[derive(Debug, Error)]
pub enum CipherError {
    #[error("image {width}x{height} is not below {MAX_DIMENSION}x{MAX_DIMENSION}")]
    ImageTooLarge { width: usize, height: usize },
    #[error("permutation plan for {plan:?} does not match plane grid {plane:?}")]
    GridMismatch { plan: (usize, usize), plane: (usize, usize) },
    #[error("alpha {0} outside (0, 1)")]
    AlphaOutOfRange(f64),
    #[error("ECU stream exhausted: block {block} of {groups} groups")]
    EcuExhausted { block: usize, groups: usize },
    #[error(transparent)]
    Chaos(#[from] ChaosError),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// Keyed permutation schedule for one component grid: one permutation per
/// block row, then one permutation over all blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPermutationPlan {
    pub blocks_w: usize,
    pub blocks_h: usize,
    row_perms: Vec<Vec<usize>>,
    global_perm: Vec<usize>,
}

impl BlockPermutationPlan {
    pub fn row_perms(&self) -> &[Vec<usize>] {
        &self.row_perms
    }

    pub fn global_perm(&self) -> &[usize] {
        &self.global_perm
    }
}

/// Builds one grid's plan from a continuing logistic stream: `blocks_h` row
/// permutations over `blocks_w` positions, then one permutation over the
/// whole grid, consumed in that order.
pub fn plan_from_stream(
    gen: &mut LogisticGen,
    blocks_w: usize,
    blocks_h: usize,
) -> Result<BlockPermutationPlan, ChaosError> {
    let mut row_perms = Vec::with_capacity(blocks_h);
    for _ in 0..blocks_h {
        let mut seq = gen.take_sequence(blocks_w)?;
        row_perms.push(crate::chaos::derive_permutation(&mut seq, blocks_w)?);
    }
    let total = blocks_w * blocks_h;
    let mut seq = gen.take_sequence(total)?;
    let global_perm = crate::chaos::derive_permutation(&mut seq, total)?;
    Ok(BlockPermutationPlan { blocks_w, blocks_h, row_perms, global_perm })
}

/// Builds the plan for a single grid from a fresh stream keyed by `key`.
pub fn plan_permutations(
    key: &EncryptionKey,
    blocks_w: usize,
    blocks_h: usize,
) -> Result<BlockPermutationPlan, CipherError> {
    let mut gen = LogisticGen::new(&key.logistic)?;
    Ok(plan_from_stream(&mut gen, blocks_w, blocks_h)?)
}

fn check_plan(plan: &BlockPermutationPlan, plane: &CoefficientPlane) -> Result<(), CipherError> {
    if (plan.blocks_w, plan.blocks_h) != plane.grid() {
        return Err(CipherError::GridMismatch {
            plan: (plan.blocks_w, plan.blocks_h),
            plane: plane.grid(),
        });
    }
    Ok(())
}

/// Moves whole blocks: within each row by that row's permutation, then across
/// the full grid by the global permutation. Coefficient values are untouched.
pub fn encrypt_dc_blocks(
    plane: &CoefficientPlane,
    plan: &BlockPermutationPlan,
) -> Result<CoefficientPlane, CipherError> {
    check_plan(plan, plane)?;
    let (bw, bh) = plane.grid();
    let mut mid = Vec::with_capacity(bw * bh);
    for r in 0..bh {
        let row = &plane.blocks()[r * bw..(r + 1) * bw];
        let perm = &plan.row_perms[r];
        mid.extend((0..bw).map(|i| row[perm[i]]));
    }
    let blocks = (0..bw * bh).map(|i| mid[plan.global_perm[i]]).collect();
    Ok(CoefficientPlane::new(bw, bh, plane.component, blocks))
}

/// Exact inverse of [`encrypt_dc_blocks`]: undo the global permutation, then
/// each row's.
pub fn decrypt_dc_blocks(
    plane: &CoefficientPlane,
    plan: &BlockPermutationPlan,
) -> Result<CoefficientPlane, CipherError> {
    check_plan(plan, plane)?;
    let (bw, bh) = plane.grid();
    let mut mid = vec![[0i32; 64]; bw * bh];
    for i in 0..bw * bh {
        mid[plan.global_perm[i]] = *plane.block(i);
    }
    let mut blocks = vec![[0i32; 64]; bw * bh];
    for r in 0..bh {
        let perm = &plan.row_perms[r];
        for i in 0..bw {
            blocks[r * bw + perm[i]] = mid[r * bw + i];
        }
    }
    Ok(CoefficientPlane::new(bw, bh, plane.component, blocks))
}

/// XORs one nonzero coefficient with its keystream unit: the first unit bit
/// flips the sign, bits 2..=l flip the magnitude bits below the leading one.
/// Self-inverse, category-preserving, never maps nonzero to zero.
pub fn xor_coefficient(value: i32, ecu: crate::chaos::Ecu) -> i32 {
    debug_assert!(value != 0);
    let mag = value.unsigned_abs();
    let l = 32 - mag.leading_zeros();
    debug_assert!(l as usize <= ECU_BITS - 1, "AC coefficient {value} too wide");
    let new_mag = mag ^ ecu.magnitude_mask(l);
    let negative = (value < 0) ^ (ecu.sign_bit() == 1);
    if negative {
        -(new_mag as i32)
    } else {
        new_mag as i32
    }
}

fn encrypt_ac_block(block: &mut [i32; 64], group: &[u16; ECUS_PER_GROUP]) {
    for q in 1..64 {
        if block[q] != 0 {
            block[q] = xor_coefficient(block[q], crate::chaos::Ecu::from_raw(group[q - 1]));
        }
    }
}

/// Applies the keystream to every nonzero AC coefficient of the plane. Block
/// `p` (raster order) uses ECU group `p`; zigzag position `q` uses unit `q`.
/// DC coefficients and zeros pass through unchanged. Involution.
pub fn encrypt_ac(
    plane: &CoefficientPlane,
    ecus: &EcuStream,
) -> Result<CoefficientPlane, CipherError> {
    if ecus.group_count() < plane.block_count() {
        return Err(CipherError::EcuExhausted {
            block: plane.block_count(),
            groups: ecus.group_count(),
        });
    }
    let mut out = plane.clone();
    #[cfg(feature = "parallel")]
    out.blocks_mut()
        .par_iter_mut()
        .enumerate()
        .for_each(|(p, block)| encrypt_ac_block(block, ecus.group(p).unwrap()));
    #[cfg(not(feature = "parallel"))]
    out.blocks_mut()
        .iter_mut()
        .enumerate()
        .for_each(|(p, block)| encrypt_ac_block(block, ecus.group(p).unwrap()));
    Ok(out)
}

/// Indices of blocks whose DC value falls outside [-1024, 1016].
pub fn check_dc_range(plane: &CoefficientPlane) -> Vec<usize> {
    plane
        .blocks()
        .iter()
        .enumerate()
        .filter(|(_, b)| !(-1024..=1016).contains(&b[0]))
        .map(|(i, _)| i)
        .collect()
}

/// Clamps unclamped reconstruction values into [0, 255]: negatives to 0,
/// overshoots to 255, everything else rounded to the nearest integer.
pub fn clamp_spatial(real: &RealPlane) -> SamplePlane {
    let data = real
        .data
        .iter()
        .map(|&v| {
            if v < 0.0 {
                0
            } else if v > 255.0 {
                255
            } else {
                v.round() as u8
            }
        })
        .collect();
    SamplePlane::new(real.width, real.height, data)
}

/// The comparison baseline for overflow repair: shrink every AC coefficient
/// of the listed blocks by `alpha` (round half away from zero), leaving DC
/// untouched. Small nonzero coefficients collapse to zero, which is the
/// information loss the clamp-based repair avoids.
pub fn alpha_scale_blocks(
    plane: &CoefficientPlane,
    alpha: f64,
    overflow_blocks: &[usize],
) -> Result<CoefficientPlane, CipherError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CipherError::AlphaOutOfRange(alpha));
    }
    let mut out = plane.clone();
    for &b in overflow_blocks {
        let block = &mut out.blocks_mut()[b];
        for v in block.iter_mut().skip(1) {
            *v = (alpha * f64::from(*v)).round() as i32;
        }
    }
    Ok(out)
}

/// A format-compliant encrypted JPEG plus the metadata a receiver needs to
/// know out of band.
#[derive(Debug, Clone, PartialEq)]
pub struct CiphertextImage {
    pub bytes: Vec<u8>,
    pub quality: u8,
    pub width: usize,
    pub height: usize,
    pub grayscale: bool,
}

impl CiphertextImage {
    /// Wraps raw JPEG bytes, probing them for dimensions and color layout.
    pub fn from_jpeg_bytes(bytes: Vec<u8>, quality: u8) -> Result<Self, CodecError> {
        let data = decode_jpeg(&bytes)?;
        Ok(Self {
            quality,
            width: data.width,
            height: data.height,
            grayscale: data.is_gray(),
            bytes,
        })
    }
}

/// Per-plane keystream material, always derived in plane order from the two
/// continuing streams so encryption and decryption consume identically.
fn keystreams_for(
    key: &EncryptionKey,
    grids: &[(usize, usize)],
) -> Result<Vec<(BlockPermutationPlan, EcuStream)>, CipherError> {
    let mut logistic = LogisticGen::new(&key.logistic)?;
    let mut henon = HenonGen::new(&key.henon)?;
    let mut out = Vec::with_capacity(grids.len());
    for &(bw, bh) in grids {
        let plan = plan_from_stream(&mut logistic, bw, bh)?;
        let bits = henon.take_bits(bw * bh * ECUS_PER_GROUP * ECU_BITS)?;
        out.push((plan, make_ecus(&bits)));
    }
    Ok(out)
}

fn guard_dimensions(width: usize, height: usize) -> Result<(), CipherError> {
    if width >= MAX_DIMENSION || height >= MAX_DIMENSION {
        return Err(CipherError::ImageTooLarge { width, height });
    }
    Ok(())
}

/// Encrypts an image into a standard JPEG: transform at quality 71, permute
/// whole blocks then XOR the AC coefficients of every component, repair
/// spatial overflow by decode-clamp-re-encode at the same quality, and
/// entropy-code the result.
pub fn encrypt_image(
    img: &PixelImage,
    key: &EncryptionKey,
) -> Result<CiphertextImage, CipherError> {
    guard_dimensions(img.width, img.height)?;
    let mut data = compress_pixels(img, PIPELINE_QF)?;

    let grids: Vec<_> = data.planes.iter().map(|p| p.grid()).collect();
    let streams = keystreams_for(key, &grids)?;
    for (plane, (plan, ecus)) in data.planes.iter_mut().zip(&streams) {
        *plane = encrypt_dc_blocks(plane, plan)?;
        *plane = encrypt_ac(plane, ecus)?;
    }

    // Overflow repair: the encrypted coefficients may reconstruct outside
    // [0, 255]; clamp per component at native resolution and requantize with
    // the same tables so the shipped file holds only in-range pixels.
    let reals = reconstruct_planes(&data);
    for (plane, real) in data.planes.iter_mut().zip(&reals) {
        let clamped = clamp_spatial(real);
        let qt = match plane.component {
            Component::Luma => &data.luma_qt,
            _ => data.chroma_qt.as_ref().unwrap(),
        };
        *plane = jpeg::forward_plane(&clamped, qt, plane.component);
    }

    // Stabilization: pre-apply the platform's own decode/re-encode transform
    // once, so the uploaded file is already a near-fixpoint of same-quality
    // recompression and the receiver decrypts the recompressed copy to within
    // a fraction of a dB of the direct decrypt.
    let pixels = jpeg::decompress_pixels(&data);
    let data = compress_pixels(&pixels, PIPELINE_QF)?;

    for plane in &data.planes {
        debug_assert!(check_dc_range(plane).is_empty());
    }

    let bytes = encode_jpeg(&data)?;
    Ok(CiphertextImage {
        bytes,
        quality: PIPELINE_QF,
        width: img.width,
        height: img.height,
        grayscale: img.is_gray(),
    })
}

/// Decrypts a ciphertext (possibly recompressed once at the same quality):
/// per component, undo the AC XOR first, then the block permutation, then
/// reconstruct pixels.
pub fn decrypt_image(ct: &CiphertextImage, key: &EncryptionKey) -> Result<PixelImage, CipherError> {
    let mut data = decode_jpeg(&ct.bytes)?;
    let grids: Vec<_> = data.planes.iter().map(|p| p.grid()).collect();
    let streams = keystreams_for(key, &grids)?;
    for (plane, (plan, ecus)) in data.planes.iter_mut().zip(&streams) {
        *plane = encrypt_ac(plane, ecus)?; // involution
        *plane = decrypt_dc_blocks(plane, plan)?;
    }

    let reals = reconstruct_planes(&data);
    if data.is_gray() {
        let plane = clamp_spatial(&reals[0]).cropped(data.width, data.height);
        return Ok(PixelImage::new(data.width, data.height, 1, plane.data));
    }
    let cw = YCbCrPlanes::chroma_width(data.width);
    let planes = YCbCrPlanes {
        y: clamp_spatial(&reals[0]).cropped(data.width, data.height),
        cb: clamp_spatial(&reals[1]).cropped(cw, data.height),
        cr: clamp_spatial(&reals[2]).cropped(cw, data.height),
    };
    Ok(jpeg::ycbcr_to_rgb(&planes))
}
