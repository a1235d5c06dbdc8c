//! Quantization tables: Annex K bases scaled by the IJG quality-factor rule.

use super::zigzag::to_zigzag;
use super::CodecError;

/// 64-entry quantizer, stored in zigzag order to match coefficient layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantTable {
    entries: [u16; 64],
}

impl QuantTable {
    /// Builds from zigzag-order entries; every entry must be in 1..=255.
    pub fn from_zigzag(entries: [u16; 64]) -> Self {
        assert!(entries.iter().all(|&q| (1..=255).contains(&q)));
        Self { entries }
    }

    pub fn from_raster(raster: &[u16; 64]) -> Self {
        Self::from_zigzag(to_zigzag(raster))
    }

    /// Entry at a zigzag position.
    pub fn at(&self, zigzag_index: usize) -> u16 {
        self.entries[zigzag_index]
    }

    pub fn entries(&self) -> &[u16; 64] {
        &self.entries
    }
}

/// Annex K table K.1 (luminance), raster order.
const ANNEX_K_LUMA: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, //
    12, 12, 14, 19, 26, 58, 60, 55, //
    14, 13, 16, 24, 40, 57, 69, 56, //
    14, 17, 22, 29, 51, 87, 80, 62, //
    18, 22, 37, 56, 68, 109, 103, 77, //
    24, 35, 55, 64, 81, 104, 113, 92, //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
];

/// Annex K table K.2 (chrominance), raster order.
const ANNEX_K_CHROMA: [u16; 64] = [
    17, 18, 24, 47, 99, 99, 99, 99, //
    18, 21, 26, 66, 99, 99, 99, 99, //
    24, 26, 56, 99, 99, 99, 99, 99, //
    47, 66, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99,
];

pub fn annex_k_luma() -> QuantTable {
    QuantTable::from_raster(&ANNEX_K_LUMA)
}

pub fn annex_k_chroma() -> QuantTable {
    QuantTable::from_raster(&ANNEX_K_CHROMA)
}

/// Scales a base table to a quality factor with the IJG convention:
/// `scale = 5000/qf` below 50, `200 - 2*qf` otherwise, each entry
/// `clamp(floor((base*scale + 50) / 100), 1, 255)`.
pub fn quant_table_for_qf(base: &QuantTable, qf: u8) -> Result<QuantTable, CodecError> {
    if !(1..=100).contains(&qf) {
        return Err(CodecError::QualityOutOfRange(qf));
    }
    let scale: u32 = if qf < 50 { 5000 / u32::from(qf) } else { 200 - 2 * u32::from(qf) };
    let mut entries = [0u16; 64];
    for (out, &b) in entries.iter_mut().zip(base.entries()) {
        *out = ((u32::from(b) * scale + 50) / 100).clamp(1, 255) as u16;
    }
    Ok(QuantTable::from_zigzag(entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qf_50_is_the_identity_point() {
        let base = annex_k_luma();
        assert_eq!(quant_table_for_qf(&base, 50).unwrap(), base);
    }

    #[test]
    fn qf_100_floors_to_all_ones() {
        let t = quant_table_for_qf(&annex_k_luma(), 100).unwrap();
        assert!(t.entries().iter().all(|&q| q == 1));
    }

    #[test]
    fn qf_out_of_range_rejected() {
        assert!(matches!(
            quant_table_for_qf(&annex_k_luma(), 0),
            Err(CodecError::QualityOutOfRange(0))
        ));
        assert!(matches!(
            quant_table_for_qf(&annex_k_luma(), 101),
            Err(CodecError::QualityOutOfRange(101))
        ));
    }

    #[test]
    fn qf_71_matches_reference_scaling() {
        // Expected tables computed independently with the IJG integer formula.
        const LUMA_71: [u16; 64] = [
            9, 6, 6, 9, 14, 23, 30, 35, //
            7, 7, 8, 11, 15, 34, 35, 32, //
            8, 8, 9, 14, 23, 33, 40, 32, //
            8, 10, 13, 17, 30, 50, 46, 36, //
            10, 13, 21, 32, 39, 63, 60, 45, //
            14, 20, 32, 37, 47, 60, 66, 53, //
            28, 37, 45, 50, 60, 70, 70, 59, //
            42, 53, 55, 57, 65, 58, 60, 57,
        ];
        const CHROMA_71: [u16; 64] = [
            10, 10, 14, 27, 57, 57, 57, 57, //
            10, 12, 15, 38, 57, 57, 57, 57, //
            14, 15, 32, 57, 57, 57, 57, 57, //
            27, 38, 57, 57, 57, 57, 57, 57, //
            57, 57, 57, 57, 57, 57, 57, 57, //
            57, 57, 57, 57, 57, 57, 57, 57, //
            57, 57, 57, 57, 57, 57, 57, 57, //
            57, 57, 57, 57, 57, 57, 57, 57,
        ];
        let luma = quant_table_for_qf(&annex_k_luma(), 71).unwrap();
        assert_eq!(luma, QuantTable::from_raster(&LUMA_71));
        // Spot value from the formula: floor((16*58 + 50)/100) = 9.
        assert_eq!(luma.at(0), 9);
        let chroma = quant_table_for_qf(&annex_k_chroma(), 71).unwrap();
        assert_eq!(chroma, QuantTable::from_raster(&CHROMA_71));
    }
}
