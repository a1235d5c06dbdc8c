//! Annex K typical Huffman tables, bit-level IO with byte stuffing, and
//! block entropy coding.

use super::CodecError;

/// DC luminance table K.3 (bits, values).
pub const DC_LUMA_BITS: [u8; 16] = [0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0];
pub const DC_LUMA_VALS: [u8; 12] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];

/// DC chrominance table K.4.
pub const DC_CHROMA_BITS: [u8; 16] = [0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0];
pub const DC_CHROMA_VALS: [u8; 12] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];

/// AC luminance table K.5.
pub const AC_LUMA_BITS: [u8; 16] = [0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7d];
pub const AC_LUMA_VALS: [u8; 162] = [
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61,
    0x07, 0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xA1, 0x08, 0x23, 0x42, 0xB1, 0xC1, 0x15, 0x52,
    0xD1, 0xF0, 0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0A, 0x16, 0x17, 0x18, 0x19, 0x1A, 0x25,
    0x26, 0x27, 0x28, 0x29, 0x2A, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A, 0x43, 0x44, 0x45,
    0x46, 0x47, 0x48, 0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5A, 0x63, 0x64,
    0x65, 0x66, 0x67, 0x68, 0x69, 0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7A, 0x83,
    0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99,
    0x9A, 0xA2, 0xA3, 0xA4, 0xA5, 0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6,
    0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5, 0xC6, 0xC7, 0xC8, 0xC9, 0xCA, 0xD2, 0xD3,
    0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE1, 0xE2, 0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8,
    0xE9, 0xEA, 0xF1, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8, 0xF9, 0xFA,
];

/// AC chrominance table K.6.
pub const AC_CHROMA_BITS: [u8; 16] = [0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 0x77];
pub const AC_CHROMA_VALS: [u8; 162] = [
    0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41, 0x51, 0x07, 0x61,
    0x71, 0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91, 0xA1, 0xB1, 0xC1, 0x09, 0x23, 0x33,
    0x52, 0xF0, 0x15, 0x62, 0x72, 0xD1, 0x0A, 0x16, 0x24, 0x34, 0xE1, 0x25, 0xF1, 0x17, 0x18,
    0x19, 0x1A, 0x26, 0x27, 0x28, 0x29, 0x2A, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A, 0x43, 0x44,
    0x45, 0x46, 0x47, 0x48, 0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5A, 0x63,
    0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7A,
    0x82, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97,
    0x98, 0x99, 0x9A, 0xA2, 0xA3, 0xA4, 0xA5, 0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4,
    0xB5, 0xB6, 0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5, 0xC6, 0xC7, 0xC8, 0xC9, 0xCA,
    0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE2, 0xE3, 0xE4, 0xE5, 0xE6, 0xE7,
    0xE8, 0xE9, 0xEA, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8, 0xF9, 0xFA,
];

/// Encode-side table: code and length per symbol value.
#[derive(Debug, Clone)]
pub struct HuffEncoder {
    code: [u16; 256],
    size: [u8; 256],
}

impl HuffEncoder {
    pub fn build(bits: &[u8; 16], vals: &[u8]) -> Self {
        let mut enc = Self { code: [0; 256], size: [0; 256] };
        let mut code = 0u16;
        let mut k = 0usize;
        for (i, &count) in bits.iter().enumerate() {
            for _ in 0..count {
                let sym = vals[k] as usize;
                enc.code[sym] = code;
                enc.size[sym] = (i + 1) as u8;
                code += 1;
                k += 1;
            }
            code <<= 1;
        }
        enc
    }

    fn lookup(&self, symbol: u8) -> (u16, u8) {
        let size = self.size[symbol as usize];
        debug_assert!(size > 0, "symbol {symbol:#x} has no code");
        (self.code[symbol as usize], size)
    }
}

/// Decode-side table using the canonical mincode/maxcode walk.
#[derive(Debug, Clone)]
pub struct HuffDecoder {
    mincode: [i32; 17],
    maxcode: [i32; 17],
    valptr: [usize; 17],
    vals: Vec<u8>,
}

impl HuffDecoder {
    pub fn build(bits: &[u8; 16], vals: &[u8]) -> Self {
        let mut dec = Self {
            mincode: [0; 17],
            maxcode: [-1; 17],
            valptr: [0; 17],
            vals: vals.to_vec(),
        };
        let mut code = 0i32;
        let mut k = 0usize;
        for l in 1..=16usize {
            let count = bits[l - 1] as i32;
            if count > 0 {
                dec.valptr[l] = k;
                dec.mincode[l] = code;
                code += count;
                dec.maxcode[l] = code - 1;
                k += count as usize;
            }
            code <<= 1;
        }
        dec
    }

    fn decode(&self, reader: &mut BitReader) -> Result<u8, CodecError> {
        let mut code = 0i32;
        for l in 1..=16usize {
            code = (code << 1) | reader.next_bit()? as i32;
            if code <= self.maxcode[l] && self.maxcode[l] >= 0 && code >= self.mincode[l] {
                return Ok(self.vals[self.valptr[l] + (code - self.mincode[l]) as usize]);
            }
        }
        Err(CodecError::MalformedBitstream {
            offset: reader.offset(),
            reason: "no Huffman code matched within 16 bits".into(),
        })
    }
}

/// MSB-first bit sink with 0xFF byte stuffing.
pub struct BitWriter {
    out: Vec<u8>,
    acc: u32,
    nbits: u32,
}

impl BitWriter {
    pub fn new() -> Self {
        Self { out: Vec::new(), acc: 0, nbits: 0 }
    }

    pub fn put(&mut self, bits: u32, n: u32) {
        debug_assert!(n <= 24 && (n == 32 || bits < (1 << n)));
        self.acc = (self.acc << n) | bits;
        self.nbits += n;
        while self.nbits >= 8 {
            let byte = (self.acc >> (self.nbits - 8)) as u8;
            self.out.push(byte);
            if byte == 0xFF {
                self.out.push(0x00);
            }
            self.nbits -= 8;
            self.acc &= (1 << self.nbits) - 1;
        }
    }

    fn put_code(&mut self, table: &HuffEncoder, symbol: u8) {
        let (code, size) = table.lookup(symbol);
        self.put(u32::from(code), u32::from(size));
    }

    /// Pads the final partial byte with 1 bits and returns the stream.
    pub fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            let pad = 8 - self.nbits;
            self.put((1 << pad) - 1, pad);
        }
        self.out
    }
}

/// MSB-first bit source that unstuffs 0xFF 0x00 and refuses markers inside
/// the scan.
pub struct BitReader<'a> {
    bytes: &'a [u8],
    base: usize,
    pos: usize,
    acc: u8,
    nbits: u32,
}

impl<'a> BitReader<'a> {
    /// `base` is the absolute offset of `bytes` for diagnostics.
    pub fn new(bytes: &'a [u8], base: usize) -> Self {
        Self { bytes, base, pos: 0, acc: 0, nbits: 0 }
    }

    pub fn offset(&self) -> usize {
        self.base + self.pos
    }

    /// Bytes consumed so far, rounded up to whole bytes.
    pub fn consumed(&self) -> usize {
        self.pos
    }

    fn next_bit(&mut self) -> Result<u32, CodecError> {
        if self.nbits == 0 {
            let b = *self.bytes.get(self.pos).ok_or_else(|| CodecError::MalformedBitstream {
                offset: self.offset(),
                reason: "entropy data truncated".into(),
            })?;
            self.pos += 1;
            if b == 0xFF {
                match self.bytes.get(self.pos) {
                    Some(0x00) => self.pos += 1,
                    Some(m) => {
                        return Err(CodecError::MalformedBitstream {
                            offset: self.offset(),
                            reason: format!("marker 0xFF{m:02X} inside entropy data"),
                        })
                    }
                    None => {
                        return Err(CodecError::MalformedBitstream {
                            offset: self.offset(),
                            reason: "entropy data truncated after 0xFF".into(),
                        })
                    }
                }
            }
            self.acc = b;
            self.nbits = 8;
        }
        self.nbits -= 1;
        Ok(u32::from((self.acc >> self.nbits) & 1))
    }

    fn receive(&mut self, n: u32) -> Result<u32, CodecError> {
        let mut v = 0u32;
        for _ in 0..n {
            v = (v << 1) | self.next_bit()?;
        }
        Ok(v)
    }
}

/// JPEG magnitude category: the bit length of |v| (0 for v = 0).
pub fn category(v: i32) -> u32 {
    32 - v.unsigned_abs().leading_zeros()
}

/// Low-order magnitude bits as entropy-coded: negative values are stored as
/// `v - 1` in `cat` bits.
fn magnitude_bits(v: i32, cat: u32) -> u32 {
    if v < 0 {
        (v - 1) as u32 & ((1 << cat) - 1)
    } else {
        v as u32
    }
}

/// Inverse of `magnitude_bits`.
fn extend(bits: u32, cat: u32) -> i32 {
    if cat == 0 {
        0
    } else if bits < (1 << (cat - 1)) {
        bits as i32 - (1 << cat) + 1
    } else {
        bits as i32
    }
}

/// Entropy-codes one block in zigzag order; `pred` is the running DC
/// predictor for the component.
pub fn encode_block(
    writer: &mut BitWriter,
    block: &[i32; 64],
    pred: &mut i32,
    dc: &HuffEncoder,
    ac: &HuffEncoder,
    block_index: usize,
) -> Result<(), CodecError> {
    let dc_value = block[0];
    if !(-1024..=1016).contains(&dc_value) {
        return Err(CodecError::DcOutOfRange { block: block_index, value: dc_value });
    }
    let diff = dc_value - *pred;
    *pred = dc_value;
    let cat = category(diff);
    writer.put_code(dc, cat as u8);
    if cat > 0 {
        writer.put(magnitude_bits(diff, cat), cat);
    }

    let mut run = 0u32;
    for (i, &v) in block.iter().enumerate().skip(1) {
        if v == 0 {
            run += 1;
            continue;
        }
        while run > 15 {
            writer.put_code(ac, 0xF0); // ZRL
            run -= 16;
        }
        let cat = category(v);
        if cat > 10 {
            return Err(CodecError::CoefficientOutOfRange {
                block: block_index,
                index: i,
                value: v,
            });
        }
        writer.put_code(ac, ((run as u8) << 4) | cat as u8);
        writer.put(magnitude_bits(v, cat), cat);
        run = 0;
    }
    if run > 0 {
        writer.put_code(ac, 0x00); // EOB
    }
    Ok(())
}

/// Decodes one block into zigzag order.
pub fn decode_block(
    reader: &mut BitReader,
    block: &mut [i32; 64],
    pred: &mut i32,
    dc: &HuffDecoder,
    ac: &HuffDecoder,
) -> Result<(), CodecError> {
    let cat = u32::from(dc.decode(reader)?);
    if cat > 11 {
        return Err(CodecError::MalformedBitstream {
            offset: reader.offset(),
            reason: format!("DC category {cat} out of range"),
        });
    }
    let diff = extend(reader.receive(cat)?, cat);
    *pred += diff;
    block[0] = *pred;

    let mut i = 1usize;
    while i < 64 {
        let symbol = ac.decode(reader)?;
        let run = (symbol >> 4) as usize;
        let cat = u32::from(symbol & 0x0F);
        if cat == 0 {
            if run == 15 {
                i += 16; // ZRL
                continue;
            }
            break; // EOB
        }
        i += run;
        if i >= 64 {
            return Err(CodecError::MalformedBitstream {
                offset: reader.offset(),
                reason: format!("AC run overflows block at index {i}"),
            });
        }
        block[i] = extend(reader.receive(cat)?, cat);
        i += 1;
    }
    Ok(())
}
