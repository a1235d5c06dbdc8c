//! JFIF BT.601 full-range color conversion with 4:2:2 chroma sampling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::{CodecError, PixelImage, SamplePlane};

/// Full-resolution luma with horizontally half-resolution chroma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YCbCrPlanes {
    pub y: SamplePlane,
    pub cb: SamplePlane,
    pub cr: SamplePlane,
}

impl YCbCrPlanes {
    pub fn chroma_width(luma_width: usize) -> usize {
        luma_width.div_ceil(2)
    }
}

fn clamp_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

fn ycc_of_rgb(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    let y = 0.299 * r + 0.587 * g + 0.114 * b;
    let cb = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b;
    let cr = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b;
    (y, cb, cr)
}

fn rgb_of_ycc(y: f64, cb: f64, cr: f64) -> (f64, f64, f64) {
    let r = y + 1.402 * (cr - 128.0);
    let g = y - 0.344136 * (cb - 128.0) - 0.714136 * (cr - 128.0);
    let b = y + 1.772 * (cb - 128.0);
    (r, g, b)
}

fn convert_row(rgb_row: &[u8], width: usize, y_row: &mut [u8], cb_row: &mut [u8], cr_row: &mut [u8]) {
    let cw = YCbCrPlanes::chroma_width(width);
    // Chroma is averaged over each pixel pair before the single rounding.
    for cx in 0..cw {
        let x0 = cx * 2;
        let x1 = (x0 + 1).min(width - 1);
        let mut cb_acc = 0.0;
        let mut cr_acc = 0.0;
        for &x in &[x0, x1] {
            let p = &rgb_row[x * 3..x * 3 + 3];
            let (y, cb, cr) = ycc_of_rgb(f64::from(p[0]), f64::from(p[1]), f64::from(p[2]));
            y_row[x] = clamp_u8(y);
            cb_acc += cb;
            cr_acc += cr;
        }
        cb_row[cx] = clamp_u8(cb_acc / 2.0);
        cr_row[cx] = clamp_u8(cr_acc / 2.0);
    }
}

/// Converts an RGB image to Y at full resolution and Cb/Cr at half horizontal
/// resolution (pairwise mean, single rounding).
pub fn rgb_to_ycbcr(img: &PixelImage) -> Result<YCbCrPlanes, CodecError> {
    if img.channels != 3 {
        return Err(CodecError::ChannelMismatch { expected: 3, got: img.channels });
    }
    let (w, h) = (img.width, img.height);
    let cw = YCbCrPlanes::chroma_width(w);

    let mut y = vec![0u8; w * h];
    let mut cb = vec![0u8; cw * h];
    let mut cr = vec![0u8; cw * h];

    #[cfg(feature = "parallel")]
    img.samples
        .par_chunks_exact(w * 3)
        .zip(y.par_chunks_exact_mut(w))
        .zip(cb.par_chunks_exact_mut(cw))
        .zip(cr.par_chunks_exact_mut(cw))
        .for_each(|(((rgb, yr), cbr), crr)| convert_row(rgb, w, yr, cbr, crr));
    #[cfg(not(feature = "parallel"))]
    img.samples
        .chunks_exact(w * 3)
        .zip(y.chunks_exact_mut(w))
        .zip(cb.chunks_exact_mut(cw))
        .zip(cr.chunks_exact_mut(cw))
        .for_each(|(((rgb, yr), cbr), crr)| convert_row(rgb, w, yr, cbr, crr));

    Ok(YCbCrPlanes {
        y: SamplePlane::new(w, h, y),
        cb: SamplePlane::new(cw, h, cb),
        cr: SamplePlane::new(cw, h, cr),
    })
}

/// Converts planes back to interleaved RGB, upsampling chroma by replication.
pub fn ycbcr_to_rgb(planes: &YCbCrPlanes) -> PixelImage {
    let (w, h) = (planes.y.width, planes.y.height);
    assert_eq!(planes.cb.width, YCbCrPlanes::chroma_width(w));
    assert_eq!(planes.cr.width, YCbCrPlanes::chroma_width(w));
    assert!(planes.cb.height == h && planes.cr.height == h);

    let mut rgb = vec![0u8; w * h * 3];
    let fill_row = |(y_idx, out_row): (usize, &mut [u8])| {
        for x in 0..w {
            let yv = f64::from(planes.y.at(x, y_idx));
            let cb = f64::from(planes.cb.at(x / 2, y_idx));
            let cr = f64::from(planes.cr.at(x / 2, y_idx));
            let (r, g, b) = rgb_of_ycc(yv, cb, cr);
            out_row[x * 3] = clamp_u8(r);
            out_row[x * 3 + 1] = clamp_u8(g);
            out_row[x * 3 + 2] = clamp_u8(b);
        }
    };
    #[cfg(feature = "parallel")]
    rgb.par_chunks_exact_mut(w * 3).enumerate().for_each(|(i, row)| fill_row((i, row)));
    #[cfg(not(feature = "parallel"))]
    rgb.chunks_exact_mut(w * 3).enumerate().for_each(|(i, row)| fill_row((i, row)));

    PixelImage::new(w, h, 3, rgb)
}
