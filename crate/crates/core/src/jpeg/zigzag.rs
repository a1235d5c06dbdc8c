//! Zigzag scan order for 8x8 blocks.

/// Raster index of each zigzag position (the JPEG natural order).
pub const ZIGZAG_TO_RASTER: [usize; 64] = [
    0, 1, 8, 16, 9, 2, 3, 10, //
    17, 24, 32, 25, 18, 11, 4, 5, //
    12, 19, 26, 33, 40, 48, 41, 34, //
    27, 20, 13, 6, 7, 14, 21, 28, //
    35, 42, 49, 56, 57, 50, 43, 36, //
    29, 22, 15, 23, 30, 37, 44, 51, //
    58, 59, 52, 45, 38, 31, 39, 46, //
    53, 60, 61, 54, 47, 55, 62, 63,
];

/// Zigzag position of each raster index.
pub const RASTER_TO_ZIGZAG: [usize; 64] = {
    let mut inv = [0usize; 64];
    let mut z = 0;
    while z < 64 {
        inv[ZIGZAG_TO_RASTER[z]] = z;
        z += 1;
    }
    inv
};

/// Reorders a raster-order block into zigzag order.
pub fn to_zigzag<T: Copy + Default>(raster: &[T; 64]) -> [T; 64] {
    let mut out = [T::default(); 64];
    for (z, slot) in out.iter_mut().enumerate() {
        *slot = raster[ZIGZAG_TO_RASTER[z]];
    }
    out
}

/// Reorders a zigzag-order block back to raster order.
pub fn from_zigzag<T: Copy + Default>(zigzag: &[T; 64]) -> [T; 64] {
    let mut out = [T::default(); 64];
    for (z, &v) in zigzag.iter().enumerate() {
        out[ZIGZAG_TO_RASTER[z]] = v;
    }
    out
}
