//! Minimal baseline JPEG machinery exposing the quantized coefficient domain.
//!
//! Covers exactly what the cipher needs: BT.601 color conversion with 4:2:2
//! chroma sampling, 8x8 orthonormal DCT, quality-factor-scaled Annex K
//! quantization, zigzag ordering, and a baseline sequential JFIF
//! encoder/decoder with the Annex K typical Huffman tables.

mod codec;
mod color;
mod dct;
mod huffman;
mod quant;
mod zigzag;

pub use codec::{
    compress_pixels, decode_jpeg, decompress_pixels, encode_jpeg, reconstruct_planes, JpegData,
};
pub use color::{rgb_to_ycbcr, ycbcr_to_rgb, YCbCrPlanes};
pub use dct::{forward_block, forward_plane, inverse_block, inverse_plane};
pub use huffman::category as category_of;
pub use quant::{annex_k_chroma, annex_k_luma, quant_table_for_qf, QuantTable};
pub use zigzag::{from_zigzag, to_zigzag, RASTER_TO_ZIGZAG, ZIGZAG_TO_RASTER};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("quality factor {0} outside 1..=100")]
    QualityOutOfRange(u8),
    #[error("malformed JPEG at byte {offset}: {reason}")]
    MalformedBitstream { offset: usize, reason: String },
    #[error("component {component:?} grid {got:?} does not match expected {expected:?}")]
    GridMismatch {
        component: Component,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("DC coefficient {value} in block {block} outside [-1024, 1016]")]
    DcOutOfRange { block: usize, value: i32 },
    #[error("AC coefficient {value} at block {block} index {index} exceeds category 10")]
    CoefficientOutOfRange { block: usize, index: usize, value: i32 },
    #[error("image has {got} channels, expected {expected}")]
    ChannelMismatch { expected: usize, got: usize },
}

/// Color component identity of a coefficient or sample plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Luma,
    Cb,
    Cr,
}

/// 8-bit image, grayscale or interleaved RGB, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelImage {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub samples: Vec<u8>,
}

impl PixelImage {
    pub fn new(width: usize, height: usize, channels: usize, samples: Vec<u8>) -> Self {
        assert!(channels == 1 || channels == 3);
        assert_eq!(samples.len(), width * height * channels);
        Self { width, height, channels, samples }
    }

    pub fn is_gray(&self) -> bool {
        self.channels == 1
    }
}

/// Single-component 8-bit sample grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplePlane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl SamplePlane {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Self {
        assert_eq!(data.len(), width * height);
        Self { width, height, data }
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self { width, height, data: vec![value; width * height] }
    }

    pub fn at(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    /// Replicate-pads the right and bottom edges out to `(w, h)`.
    pub fn padded(&self, w: usize, h: usize) -> SamplePlane {
        assert!(w >= self.width && h >= self.height);
        if w == self.width && h == self.height {
            return self.clone();
        }
        let mut data = Vec::with_capacity(w * h);
        for y in 0..h {
            let sy = y.min(self.height - 1);
            let row = &self.data[sy * self.width..(sy + 1) * self.width];
            data.extend_from_slice(row);
            data.resize((y + 1) * w, row[self.width - 1]);
        }
        SamplePlane { width: w, height: h, data }
    }

    /// Top-left crop.
    pub fn cropped(&self, w: usize, h: usize) -> SamplePlane {
        assert!(w <= self.width && h <= self.height);
        if w == self.width && h == self.height {
            return self.clone();
        }
        let mut data = Vec::with_capacity(w * h);
        for y in 0..h {
            data.extend_from_slice(&self.data[y * self.width..y * self.width + w]);
        }
        SamplePlane { width: w, height: h, data }
    }
}

/// Single-component real-valued grid; holds unclamped reconstructions so
/// overflow analysis can observe out-of-range values.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPlane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl RealPlane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height);
        Self { width, height, data }
    }
}

/// Grid of 8x8 quantized-DCT blocks for one component. Each block stores its
/// 64 coefficients in zigzag order: index 0 is DC, 1..=63 are AC.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientPlane {
    pub blocks_w: usize,
    pub blocks_h: usize,
    pub component: Component,
    blocks: Vec<[i32; 64]>,
}

impl CoefficientPlane {
    pub fn new(
        blocks_w: usize,
        blocks_h: usize,
        component: Component,
        blocks: Vec<[i32; 64]>,
    ) -> Self {
        assert_eq!(blocks.len(), blocks_w * blocks_h);
        Self { blocks_w, blocks_h, component, blocks }
    }

    pub fn zeroed(blocks_w: usize, blocks_h: usize, component: Component) -> Self {
        Self::new(blocks_w, blocks_h, component, vec![[0; 64]; blocks_w * blocks_h])
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[[i32; 64]] {
        &self.blocks
    }

    pub fn blocks_mut(&mut self) -> &mut [[i32; 64]] {
        &mut self.blocks
    }

    pub fn block(&self, index: usize) -> &[i32; 64] {
        &self.blocks[index]
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.blocks_w, self.blocks_h)
    }
}
