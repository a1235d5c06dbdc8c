//! 8x8 orthonormal DCT with quality-scaled quantization.
//!
//! `forward_block` level-shifts by -128, transforms, divides by the
//! quantizer with round-half-away-from-zero, and emits zigzag order.
//! `inverse_block` undoes all of that but returns unclamped reals so callers
//! can observe out-of-range reconstructions.

use std::sync::OnceLock;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::quant::QuantTable;
use super::zigzag::{from_zigzag, to_zigzag};
use super::{CoefficientPlane, Component, RealPlane, SamplePlane};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// cos((2i + 1) * u * PI / 16) for sample i, frequency u.
fn cos_table() -> &'static [[f64; 8]; 8] {
    static TABLE: OnceLock<[[f64; 8]; 8]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [[0f64; 8]; 8];
        for (i, row) in t.iter_mut().enumerate() {
            for (u, v) in row.iter_mut().enumerate() {
                *v = ((2 * i + 1) as f64 * u as f64 * std::f64::consts::PI / 16.0).cos();
            }
        }
        t
    })
}

fn norm(u: usize) -> f64 {
    if u == 0 {
        FRAC_1_SQRT_2
    } else {
        1.0
    }
}

/// Forward 2-D DCT, raster in, raster out, orthonormal JPEG scaling
/// (a flat block of value v transforms to DC = 8*v).
pub fn fdct_8x8(spatial: &[f64; 64]) -> [f64; 64] {
    let cos = cos_table();
    // Rows first.
    let mut rows = [0f64; 64];
    for y in 0..8 {
        for u in 0..8 {
            let mut acc = 0.0;
            for x in 0..8 {
                acc += spatial[y * 8 + x] * cos[x][u];
            }
            rows[y * 8 + u] = acc;
        }
    }
    // Then columns, applying both normalizations.
    let mut out = [0f64; 64];
    for v in 0..8 {
        for u in 0..8 {
            let mut acc = 0.0;
            for y in 0..8 {
                acc += rows[y * 8 + u] * cos[y][v];
            }
            out[v * 8 + u] = 0.25 * norm(u) * norm(v) * acc;
        }
    }
    out
}

/// Inverse 2-D DCT, raster in, raster out.
pub fn idct_8x8(freq: &[f64; 64]) -> [f64; 64] {
    let cos = cos_table();
    // Columns first.
    let mut cols = [0f64; 64];
    for u in 0..8 {
        for y in 0..8 {
            let mut acc = 0.0;
            for v in 0..8 {
                acc += norm(v) * freq[v * 8 + u] * cos[y][v];
            }
            cols[y * 8 + u] = acc;
        }
    }
    let mut out = [0f64; 64];
    for y in 0..8 {
        for x in 0..8 {
            let mut acc = 0.0;
            for u in 0..8 {
                acc += norm(u) * cols[y * 8 + u] * cos[x][u];
            }
            out[y * 8 + x] = 0.25 * acc;
        }
    }
    out
}

fn quantize(v: f64, q: u16) -> i32 {
    // Round half away from zero, matching common codec behavior.
    (v / f64::from(q)).round() as i32
}

/// Level shift, transform, quantize, zigzag: 64 pixels to 64 coefficients.
pub fn forward_block(pixels: &[u8; 64], qt: &QuantTable) -> [i32; 64] {
    let mut shifted = [0f64; 64];
    for (s, &p) in shifted.iter_mut().zip(pixels) {
        *s = f64::from(p) - 128.0;
    }
    let freq = fdct_8x8(&shifted);
    let zz = to_zigzag(&freq);
    let mut out = [0i32; 64];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = quantize(zz[i], qt.at(i));
    }
    out
}

/// Dequantize, inverse transform, unshift. Returns raster-order reals with
/// no clamping.
pub fn inverse_block(coefs: &[i32; 64], qt: &QuantTable) -> [f64; 64] {
    let mut deq = [0f64; 64];
    for (i, slot) in deq.iter_mut().enumerate() {
        *slot = f64::from(coefs[i]) * f64::from(qt.at(i));
    }
    let freq = from_zigzag(&deq);
    let mut out = idct_8x8(&freq);
    for v in &mut out {
        *v += 128.0;
    }
    out
}

fn gather_block(plane: &SamplePlane, bx: usize, by: usize) -> [u8; 64] {
    let mut block = [0u8; 64];
    for y in 0..8 {
        let row = (by * 8 + y) * plane.width + bx * 8;
        block[y * 8..y * 8 + 8].copy_from_slice(&plane.data[row..row + 8]);
    }
    block
}

#[cfg(not(feature = "parallel"))]
fn forward_blocks_seq(plane: &SamplePlane, qt: &QuantTable, bw: usize, bh: usize) -> Vec<[i32; 64]> {
    (0..bw * bh)
        .map(|i| forward_block(&gather_block(plane, i % bw, i / bw), qt))
        .collect()
}

#[cfg(feature = "parallel")]
fn forward_blocks_par(plane: &SamplePlane, qt: &QuantTable, bw: usize, bh: usize) -> Vec<[i32; 64]> {
    (0..bw * bh)
        .into_par_iter()
        .map(|i| forward_block(&gather_block(plane, i % bw, i / bw), qt))
        .collect()
}

/// Transforms a whole component plane (dimensions must be multiples of 8)
/// into its quantized coefficient grid.
pub fn forward_plane(plane: &SamplePlane, qt: &QuantTable, component: Component) -> CoefficientPlane {
    assert!(plane.width % 8 == 0 && plane.height % 8 == 0, "plane must be block-aligned");
    let bw = plane.width / 8;
    let bh = plane.height / 8;
    #[cfg(feature = "parallel")]
    let blocks = forward_blocks_par(plane, qt, bw, bh);
    #[cfg(not(feature = "parallel"))]
    let blocks = forward_blocks_seq(plane, qt, bw, bh);
    CoefficientPlane::new(bw, bh, component, blocks)
}

#[cfg(not(feature = "parallel"))]
fn inverse_blocks_seq(plane: &CoefficientPlane, qt: &QuantTable) -> Vec<[f64; 64]> {
    plane.blocks().iter().map(|b| inverse_block(b, qt)).collect()
}

#[cfg(feature = "parallel")]
fn inverse_blocks_par(plane: &CoefficientPlane, qt: &QuantTable) -> Vec<[f64; 64]> {
    plane.blocks().par_iter().map(|b| inverse_block(b, qt)).collect()
}

/// Reconstructs a component plane as unclamped reals.
pub fn inverse_plane(plane: &CoefficientPlane, qt: &QuantTable) -> RealPlane {
    #[cfg(feature = "parallel")]
    let spatial = inverse_blocks_par(plane, qt);
    #[cfg(not(feature = "parallel"))]
    let spatial = inverse_blocks_seq(plane, qt);

    let w = plane.blocks_w * 8;
    let h = plane.blocks_h * 8;
    let mut data = vec![0f64; w * h];
    for (i, block) in spatial.iter().enumerate() {
        let bx = i % plane.blocks_w;
        let by = i / plane.blocks_w;
        for y in 0..8 {
            let row = (by * 8 + y) * w + bx * 8;
            data[row..row + 8].copy_from_slice(&block[y * 8..y * 8 + 8]);
        }
    }
    RealPlane::new(w, h, data)
}
