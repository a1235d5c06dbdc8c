//! Baseline sequential JFIF container: segment writing, marker parsing, and
//! the interleaved-MCU scan, plus the pixel-level compress/decompress paths.
//!
//! Color images use 4:2:2 sampling (Y 2x1, Cb/Cr 1x1). Component grids are
//! MCU-padded, so the luma grid width is always even for color; the true
//! image dimensions live in SOF0 and cropping happens at pixel level.

use super::color::{rgb_to_ycbcr, ycbcr_to_rgb, YCbCrPlanes};
use super::dct::{forward_plane, inverse_plane};
use super::huffman::{
    decode_block, encode_block, BitReader, BitWriter, HuffDecoder, HuffEncoder, AC_CHROMA_BITS,
    AC_CHROMA_VALS, AC_LUMA_BITS, AC_LUMA_VALS, DC_CHROMA_BITS, DC_CHROMA_VALS, DC_LUMA_BITS,
    DC_LUMA_VALS,
};
use super::quant::{annex_k_chroma, annex_k_luma, quant_table_for_qf, QuantTable};
use super::{CodecError, CoefficientPlane, Component, PixelImage, RealPlane, SamplePlane};

/// Coefficient-domain view of one JPEG image: true dimensions, quantizers,
/// and one MCU-padded coefficient plane per component.
#[derive(Debug, Clone, PartialEq)]
pub struct JpegData {
    pub width: usize,
    pub height: usize,
    pub luma_qt: QuantTable,
    pub chroma_qt: Option<QuantTable>,
    pub planes: Vec<CoefficientPlane>,
}

impl JpegData {
    pub fn is_gray(&self) -> bool {
        self.planes.len() == 1
    }
}

/// Component block grids implied by the image dimensions: for color,
/// ((luma_w, luma_h), (chroma_w, chroma_h)); luma width is even.
pub fn color_grids(width: usize, height: usize) -> ((usize, usize), (usize, usize)) {
    let mcus_w = width.div_ceil(16);
    let mcus_h = height.div_ceil(8);
    ((2 * mcus_w, mcus_h), (mcus_w, mcus_h))
}

pub fn gray_grid(width: usize, height: usize) -> (usize, usize) {
    (width.div_ceil(8), height.div_ceil(8))
}

fn expect_grid(plane: &CoefficientPlane, expected: (usize, usize)) -> Result<(), CodecError> {
    if plane.grid() != expected {
        return Err(CodecError::GridMismatch {
            component: plane.component,
            expected,
            got: plane.grid(),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Pixel-side pipeline
// ---------------------------------------------------------------------------

/// Blocks, transforms, and quantizes an image at the given quality factor.
pub fn compress_pixels(img: &PixelImage, qf: u8) -> Result<JpegData, CodecError> {
    let luma_qt = quant_table_for_qf(&annex_k_luma(), qf)?;
    if img.is_gray() {
        let (bw, bh) = gray_grid(img.width, img.height);
        let plane = SamplePlane::new(img.width, img.height, img.samples.clone())
            .padded(bw * 8, bh * 8);
        let coefs = forward_plane(&plane, &luma_qt, Component::Luma);
        return Ok(JpegData {
            width: img.width,
            height: img.height,
            luma_qt,
            chroma_qt: None,
            planes: vec![coefs],
        });
    }

    let chroma_qt = quant_table_for_qf(&annex_k_chroma(), qf)?;
    let planes = rgb_to_ycbcr(img)?;
    let ((yw, yh), (cw, ch)) = color_grids(img.width, img.height);
    let y = planes.y.padded(yw * 8, yh * 8);
    let cb = planes.cb.padded(cw * 8, ch * 8);
    let cr = planes.cr.padded(cw * 8, ch * 8);
    Ok(JpegData {
        width: img.width,
        height: img.height,
        luma_qt: luma_qt.clone(),
        chroma_qt: Some(chroma_qt.clone()),
        planes: vec![
            forward_plane(&y, &luma_qt, Component::Luma),
            forward_plane(&cb, &chroma_qt, Component::Cb),
            forward_plane(&cr, &chroma_qt, Component::Cr),
        ],
    })
}

/// Dequantizes and inverse-transforms every component, keeping the padded
/// dimensions and the unclamped real values.
pub fn reconstruct_planes(data: &JpegData) -> Vec<RealPlane> {
    data.planes
        .iter()
        .map(|p| {
            let qt = match p.component {
                Component::Luma => &data.luma_qt,
                _ => data.chroma_qt.as_ref().expect("chroma plane without chroma table"),
            };
            inverse_plane(p, qt)
        })
        .collect()
}

fn clamp_plane(real: &RealPlane) -> SamplePlane {
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

/// Full reconstruction to pixels: inverse transform, clamp, crop the padding,
/// upsample chroma, and convert to RGB (or pass gray through).
pub fn decompress_pixels(data: &JpegData) -> PixelImage {
    let reals = reconstruct_planes(data);
    if data.is_gray() {
        let plane = clamp_plane(&reals[0]).cropped(data.width, data.height);
        return PixelImage::new(data.width, data.height, 1, plane.data);
    }
    let cw = YCbCrPlanes::chroma_width(data.width);
    let planes = YCbCrPlanes {
        y: clamp_plane(&reals[0]).cropped(data.width, data.height),
        cb: clamp_plane(&reals[1]).cropped(cw, data.height),
        cr: clamp_plane(&reals[2]).cropped(cw, data.height),
    };
    ycbcr_to_rgb(&planes)
}

// ---------------------------------------------------------------------------
// Segment writing
// ---------------------------------------------------------------------------

fn put_u16(out: &mut Vec<u8>, v: u16) {
    out.extend_from_slice(&v.to_be_bytes());
}

fn put_marker(out: &mut Vec<u8>, marker: u8) {
    out.push(0xFF);
    out.push(marker);
}

fn put_segment(out: &mut Vec<u8>, marker: u8, payload: &[u8]) {
    put_marker(out, marker);
    put_u16(out, (payload.len() + 2) as u16);
    out.extend_from_slice(payload);
}

fn app0_jfif() -> Vec<u8> {
    let mut p = Vec::with_capacity(14);
    p.extend_from_slice(b"JFIF\0");
    p.extend_from_slice(&[0x01, 0x01]); // version 1.01
    p.push(0x00); // no density units
    p.extend_from_slice(&[0x00, 0x01, 0x00, 0x01]); // 1:1 aspect
    p.extend_from_slice(&[0x00, 0x00]); // no thumbnail
    p
}

fn dqt_payload(id: u8, qt: &QuantTable) -> Vec<u8> {
    let mut p = Vec::with_capacity(65);
    p.push(id); // 8-bit precision, table id
    for &q in qt.entries() {
        p.push(q as u8);
    }
    p
}

fn dht_payload(class: u8, id: u8, bits: &[u8; 16], vals: &[u8]) -> Vec<u8> {
    let mut p = Vec::with_capacity(17 + vals.len());
    p.push((class << 4) | id);
    p.extend_from_slice(bits);
    p.extend_from_slice(vals);
    p
}

/// Serializes the coefficient planes as a baseline sequential JFIF file with
/// the Annex K typical Huffman tables. Validates grids and the DC range.
pub fn encode_jpeg(data: &JpegData) -> Result<Vec<u8>, CodecError> {
    let gray = data.is_gray();
    if gray {
        expect_grid(&data.planes[0], gray_grid(data.width, data.height))?;
    } else {
        assert_eq!(data.planes.len(), 3, "expected Y, Cb, Cr planes");
        let (luma, chroma) = color_grids(data.width, data.height);
        expect_grid(&data.planes[0], luma)?;
        expect_grid(&data.planes[1], chroma)?;
        expect_grid(&data.planes[2], chroma)?;
        assert!(data.chroma_qt.is_some(), "color image requires a chroma table");
    }

    let mut out = Vec::new();
    put_marker(&mut out, 0xD8); // SOI
    put_segment(&mut out, 0xE0, &app0_jfif());
    put_segment(&mut out, 0xDB, &dqt_payload(0, &data.luma_qt));
    if let Some(chroma_qt) = &data.chroma_qt {
        put_segment(&mut out, 0xDB, &dqt_payload(1, chroma_qt));
    }

    // SOF0
    let mut sof = Vec::new();
    sof.push(8); // precision
    put_u16(&mut sof, data.height as u16);
    put_u16(&mut sof, data.width as u16);
    if gray {
        sof.push(1);
        sof.extend_from_slice(&[1, 0x11, 0]);
    } else {
        sof.push(3);
        sof.extend_from_slice(&[1, 0x21, 0]); // Y: 2x1, luma table
        sof.extend_from_slice(&[2, 0x11, 1]); // Cb
        sof.extend_from_slice(&[3, 0x11, 1]); // Cr
    }
    put_segment(&mut out, 0xC0, &sof);

    put_segment(&mut out, 0xC4, &dht_payload(0, 0, &DC_LUMA_BITS, &DC_LUMA_VALS));
    put_segment(&mut out, 0xC4, &dht_payload(1, 0, &AC_LUMA_BITS, &AC_LUMA_VALS));
    if !gray {
        put_segment(&mut out, 0xC4, &dht_payload(0, 1, &DC_CHROMA_BITS, &DC_CHROMA_VALS));
        put_segment(&mut out, 0xC4, &dht_payload(1, 1, &AC_CHROMA_BITS, &AC_CHROMA_VALS));
    }

    // SOS
    let mut sos = Vec::new();
    if gray {
        sos.push(1);
        sos.extend_from_slice(&[1, 0x00]);
    } else {
        sos.push(3);
        sos.extend_from_slice(&[1, 0x00, 2, 0x11, 3, 0x11]);
    }
    sos.extend_from_slice(&[0, 63, 0]); // full spectral selection, no approximation
    put_segment(&mut out, 0xDA, &sos);

    out.extend_from_slice(&encode_scan(data)?);
    put_marker(&mut out, 0xD9); // EOI
    Ok(out)
}

fn encode_scan(data: &JpegData) -> Result<Vec<u8>, CodecError> {
    let dc_luma = HuffEncoder::build(&DC_LUMA_BITS, &DC_LUMA_VALS);
    let ac_luma = HuffEncoder::build(&AC_LUMA_BITS, &AC_LUMA_VALS);
    let mut writer = BitWriter::new();

    if data.is_gray() {
        let plane = &data.planes[0];
        let mut pred = 0i32;
        for (i, block) in plane.blocks().iter().enumerate() {
            encode_block(&mut writer, block, &mut pred, &dc_luma, &ac_luma, i)?;
        }
        return Ok(writer.finish());
    }

    let dc_chroma = HuffEncoder::build(&DC_CHROMA_BITS, &DC_CHROMA_VALS);
    let ac_chroma = HuffEncoder::build(&AC_CHROMA_BITS, &AC_CHROMA_VALS);
    let (y, cb, cr) = (&data.planes[0], &data.planes[1], &data.planes[2]);
    let (mcus_w, mcus_h) = cb.grid();
    let mut preds = [0i32; 3];
    for my in 0..mcus_h {
        for mx in 0..mcus_w {
            for dx in 0..2 {
                let idx = my * y.blocks_w + mx * 2 + dx;
                encode_block(&mut writer, y.block(idx), &mut preds[0], &dc_luma, &ac_luma, idx)?;
            }
            let idx = my * mcus_w + mx;
            encode_block(&mut writer, cb.block(idx), &mut preds[1], &dc_chroma, &ac_chroma, idx)?;
            encode_block(&mut writer, cr.block(idx), &mut preds[2], &dc_chroma, &ac_chroma, idx)?;
        }
    }
    Ok(writer.finish())
}

// ---------------------------------------------------------------------------
// Decoding
// ---------------------------------------------------------------------------

fn malformed(offset: usize, reason: impl Into<String>) -> CodecError {
    CodecError::MalformedBitstream { offset, reason: reason.into() }
}

struct SofComponent {
    id: u8,
    h: u8,
    v: u8,
    qt_id: u8,
}

/// Parses a baseline sequential JFIF stream produced by [`encode_jpeg`] (or
/// an equivalent single-scan, non-restart baseline file) back into planes.
pub fn decode_jpeg(bytes: &[u8]) -> Result<JpegData, CodecError> {
    if bytes.len() < 2 || bytes[0] != 0xFF || bytes[1] != 0xD8 {
        return Err(malformed(0, "missing SOI marker"));
    }
    let mut pos = 2usize;
    let mut qtables: [Option<QuantTable>; 4] = [None, None, None, None];
    let mut dc_tables: [Option<HuffDecoder>; 4] = Default::default();
    let mut ac_tables: [Option<HuffDecoder>; 4] = Default::default();
    let mut frame: Option<(usize, usize, Vec<SofComponent>)> = None;

    loop {
        if pos + 2 > bytes.len() {
            return Err(malformed(pos, "truncated before marker"));
        }
        if bytes[pos] != 0xFF {
            return Err(malformed(pos, format!("expected marker, found {:#04x}", bytes[pos])));
        }
        let marker = bytes[pos + 1];
        pos += 2;
        match marker {
            0xD9 => return Err(malformed(pos - 2, "EOI before SOS")),
            0x01 | 0xD0..=0xD7 => continue, // standalone markers
            _ => {}
        }
        if pos + 2 > bytes.len() {
            return Err(malformed(pos, "truncated segment length"));
        }
        let len = usize::from(u16::from_be_bytes([bytes[pos], bytes[pos + 1]]));
        if len < 2 || pos + len > bytes.len() {
            return Err(malformed(pos, "segment length out of bounds"));
        }
        let payload = &bytes[pos + 2..pos + len];
        let payload_offset = pos + 2;
        pos += len;

        match marker {
            0xDB => parse_dqt(payload, payload_offset, &mut qtables)?,
            0xC4 => parse_dht(payload, payload_offset, &mut dc_tables, &mut ac_tables)?,
            0xC0 => frame = Some(parse_sof0(payload, payload_offset)?),
            0xC1..=0xCF => {
                return Err(malformed(
                    pos - len - 2,
                    format!("unsupported frame type 0xFF{marker:02X}; only baseline SOF0"),
                ))
            }
            0xDD => return Err(malformed(pos - len - 2, "restart intervals not supported")),
            0xDA => {
                let (width, height, comps) =
                    frame.ok_or_else(|| malformed(pos - len - 2, "SOS before SOF0"))?;
                return decode_scan(
                    bytes,
                    pos,
                    payload,
                    payload_offset,
                    width,
                    height,
                    &comps,
                    &qtables,
                    &dc_tables,
                    &ac_tables,
                );
            }
            _ => {} // APPn, COM, and anything else: skipped
        }
    }
}

fn parse_dqt(
    payload: &[u8],
    offset: usize,
    tables: &mut [Option<QuantTable>; 4],
) -> Result<(), CodecError> {
    let mut p = 0usize;
    while p < payload.len() {
        let pq_tq = payload[p];
        let (pq, tq) = (pq_tq >> 4, (pq_tq & 0x0F) as usize);
        if pq != 0 {
            return Err(malformed(offset + p, "16-bit quantizers not supported"));
        }
        if tq > 3 {
            return Err(malformed(offset + p, "quantization table id out of range"));
        }
        if p + 65 > payload.len() {
            return Err(malformed(offset + p, "truncated DQT"));
        }
        let mut entries = [0u16; 64];
        for (i, slot) in entries.iter_mut().enumerate() {
            let q = payload[p + 1 + i];
            if q == 0 {
                return Err(malformed(offset + p + 1 + i, "zero quantizer entry"));
            }
            *slot = u16::from(q);
        }
        tables[tq] = Some(QuantTable::from_zigzag(entries));
        p += 65;
    }
    Ok(())
}

fn parse_dht(
    payload: &[u8],
    offset: usize,
    dc: &mut [Option<HuffDecoder>; 4],
    ac: &mut [Option<HuffDecoder>; 4],
) -> Result<(), CodecError> {
    let mut p = 0usize;
    while p < payload.len() {
        let tc_th = payload[p];
        let (class, id) = (tc_th >> 4, (tc_th & 0x0F) as usize);
        if class > 1 || id > 3 {
            return Err(malformed(offset + p, "huffman table class/id out of range"));
        }
        if p + 17 > payload.len() {
            return Err(malformed(offset + p, "truncated DHT"));
        }
        let mut bits = [0u8; 16];
        bits.copy_from_slice(&payload[p + 1..p + 17]);
        let count: usize = bits.iter().map(|&b| usize::from(b)).sum();
        if p + 17 + count > payload.len() {
            return Err(malformed(offset + p, "DHT values truncated"));
        }
        let vals = &payload[p + 17..p + 17 + count];
        let table = HuffDecoder::build(&bits, vals);
        if class == 0 {
            dc[id] = Some(table);
        } else {
            ac[id] = Some(table);
        }
        p += 17 + count;
    }
    Ok(())
}

fn parse_sof0(
    payload: &[u8],
    offset: usize,
) -> Result<(usize, usize, Vec<SofComponent>), CodecError> {
    if payload.len() < 6 {
        return Err(malformed(offset, "truncated SOF0"));
    }
    if payload[0] != 8 {
        return Err(malformed(offset, "only 8-bit precision supported"));
    }
    let height = usize::from(u16::from_be_bytes([payload[1], payload[2]]));
    let width = usize::from(u16::from_be_bytes([payload[3], payload[4]]));
    if width == 0 || height == 0 {
        return Err(malformed(offset + 1, "zero frame dimension"));
    }
    let ncomp = usize::from(payload[5]);
    if payload.len() != 6 + 3 * ncomp {
        return Err(malformed(offset + 5, "SOF0 length mismatch"));
    }
    let mut comps = Vec::with_capacity(ncomp);
    for c in 0..ncomp {
        let b = &payload[6 + 3 * c..9 + 3 * c];
        comps.push(SofComponent { id: b[0], h: b[1] >> 4, v: b[1] & 0x0F, qt_id: b[2] });
    }
    match ncomp {
        1 => {
            if comps[0].h != 1 || comps[0].v != 1 {
                return Err(malformed(offset + 6, "grayscale must be 1x1 sampled"));
            }
        }
        3 => {
            let s: Vec<(u8, u8)> = comps.iter().map(|c| (c.h, c.v)).collect();
            if s != [(2, 1), (1, 1), (1, 1)] {
                return Err(malformed(offset + 6, "only 4:2:2 sampling (2x1, 1x1, 1x1) supported"));
            }
        }
        _ => return Err(malformed(offset + 5, "only 1 or 3 components supported")),
    }
    Ok((width, height, comps))
}

#[allow(clippy::too_many_arguments)]
fn decode_scan(
    bytes: &[u8],
    scan_start: usize,
    sos_payload: &[u8],
    sos_offset: usize,
    width: usize,
    height: usize,
    comps: &[SofComponent],
    qtables: &[Option<QuantTable>; 4],
    dc_tables: &[Option<HuffDecoder>; 4],
    ac_tables: &[Option<HuffDecoder>; 4],
) -> Result<JpegData, CodecError> {
    if sos_payload.is_empty() || usize::from(sos_payload[0]) != comps.len() {
        return Err(malformed(sos_offset, "SOS component count mismatch"));
    }
    let ncomp = comps.len();
    if sos_payload.len() != 1 + 2 * ncomp + 3 {
        return Err(malformed(sos_offset, "SOS length mismatch"));
    }
    // Per-component entropy table selectors, in SOF order.
    let mut selectors = Vec::with_capacity(ncomp);
    for comp in comps {
        let entry = sos_payload[1..1 + 2 * ncomp]
            .chunks_exact(2)
            .find(|e| e[0] == comp.id)
            .ok_or_else(|| malformed(sos_offset, format!("component {} missing in SOS", comp.id)))?;
        selectors.push(((entry[1] >> 4) as usize, (entry[1] & 0x0F) as usize));
    }
    let spectral = &sos_payload[1 + 2 * ncomp..];
    if spectral != [0, 63, 0] {
        return Err(malformed(sos_offset, "progressive scan parameters not supported"));
    }

    let luma_qt = qtables[comps[0].qt_id as usize]
        .clone()
        .ok_or_else(|| malformed(sos_offset, "luma quantization table undefined"))?;

    let mut reader = BitReader::new(&bytes[scan_start..], scan_start);

    let data = if ncomp == 1 {
        let (bw, bh) = gray_grid(width, height);
        let mut plane = CoefficientPlane::zeroed(bw, bh, Component::Luma);
        let (dc, ac) = decoder_pair(&selectors[0], dc_tables, ac_tables, sos_offset)?;
        let mut pred = 0i32;
        for i in 0..bw * bh {
            decode_block(&mut reader, &mut plane.blocks_mut()[i], &mut pred, dc, ac)?;
        }
        JpegData { width, height, luma_qt, chroma_qt: None, planes: vec![plane] }
    } else {
        let chroma_qt = qtables[comps[1].qt_id as usize]
            .clone()
            .ok_or_else(|| malformed(sos_offset, "chroma quantization table undefined"))?;
        let ((yw, yh), (cw, ch)) = color_grids(width, height);
        let mut y = CoefficientPlane::zeroed(yw, yh, Component::Luma);
        let mut cb = CoefficientPlane::zeroed(cw, ch, Component::Cb);
        let mut cr = CoefficientPlane::zeroed(cw, ch, Component::Cr);
        let mut preds = [0i32; 3];
        let (y_dc, y_ac) = decoder_pair(&selectors[0], dc_tables, ac_tables, sos_offset)?;
        let (cb_dc, cb_ac) = decoder_pair(&selectors[1], dc_tables, ac_tables, sos_offset)?;
        let (cr_dc, cr_ac) = decoder_pair(&selectors[2], dc_tables, ac_tables, sos_offset)?;
        for my in 0..ch {
            for mx in 0..cw {
                for dx in 0..2 {
                    let idx = my * yw + mx * 2 + dx;
                    decode_block(&mut reader, &mut y.blocks_mut()[idx], &mut preds[0], y_dc, y_ac)?;
                }
                let idx = my * cw + mx;
                decode_block(&mut reader, &mut cb.blocks_mut()[idx], &mut preds[1], cb_dc, cb_ac)?;
                decode_block(&mut reader, &mut cr.blocks_mut()[idx], &mut preds[2], cr_dc, cr_ac)?;
            }
        }
        JpegData { width, height, luma_qt, chroma_qt: Some(chroma_qt), planes: vec![y, cb, cr] }
    };

    // The scan must be followed immediately by EOI.
    let tail = scan_start + reader.consumed();
    if bytes.get(tail..tail + 2) != Some(&[0xFF, 0xD9][..]) {
        return Err(malformed(tail, "missing EOI after scan"));
    }
    Ok(data)
}

fn decoder_pair<'a>(
    selector: &(usize, usize),
    dc_tables: &'a [Option<HuffDecoder>; 4],
    ac_tables: &'a [Option<HuffDecoder>; 4],
    offset: usize,
) -> Result<(&'a HuffDecoder, &'a HuffDecoder), CodecError> {
    let dc = dc_tables[selector.0]
        .as_ref()
        .ok_or_else(|| malformed(offset, format!("DC table {} undefined", selector.0)))?;
    let ac = ac_tables[selector.1]
        .as_ref()
        .ok_or_else(|| malformed(offset, format!("AC table {} undefined", selector.1)))?;
    Ok((dc, ac))
}
