//! Format-compliant JPEG-domain image encryption.
//!
//! The toolkit encrypts images inside the quantized-DCT domain of a baseline
//! JPEG so that the result is still a standards-conformant file any viewer
//! can open, survives one same-quality recompression pass by a photo-sharing
//! platform, and decrypts back to the image with only codec-level loss.
//!
//! Pieces:
//! - [`chaos`]: logistic/Henon keystreams, permutation and ECU derivation
//! - [`jpeg`]: color conversion, 4:2:2 sampling, DCT, quantization, and a
//!   baseline JFIF encoder/decoder exposing the coefficient domain
//! - [`cipher`]: keyed block permutation plus AC-coefficient XOR, with
//!   overflow repair, and the full image encrypt/decrypt pipelines
//! - [`analysis`]: entropy, PSNR, and the DCM/NCC/EAC/PLZ sketch attacks
//! - [`osn`]: the sharing-platform recompression simulator
//! - [`pnm`]: PPM/PGM readers and writers for the plaintext side
//!
//! The `parallel` feature (on by default) runs the per-block inner loops on
//! rayon; without it every code path falls back to sequential loops with
//! identical output.

pub mod analysis;
pub mod chaos;
pub mod cipher;
pub mod jpeg;
pub mod osn;
pub mod pnm;

pub use chaos::EncryptionKey;
pub use cipher::{decrypt_image, encrypt_image, CiphertextImage};
