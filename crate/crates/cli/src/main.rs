//! Batch front end: key generation, encrypt, decrypt, channel analysis,
//! attack-map rendering, and the platform recompression simulator.
//!
//! Exit codes: 0 success, 1 usage error, 2 input/format error, 3 policy
//! rejection (e.g. oversized image). Output files are written to a temp file
//! in the destination directory and renamed into place on success.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use jpegcloak::analysis::{
    attack_dcm, attack_eac, attack_ncc, attack_plz, channel_entropy, psnr, PsnrResult,
};
use jpegcloak::chaos::EncryptionKey;
use jpegcloak::cipher::{decrypt_image, encrypt_image, CipherError, CiphertextImage};
use jpegcloak::jpeg::{decode_jpeg, decompress_pixels, inverse_plane, JpegData, PixelImage};
use jpegcloak::osn::{platform_process, survival_report, OsnError, PlatformPolicy};
use jpegcloak::pnm::{read_pnm, write_pnm};

#[derive(Parser)]
#[command(name = "jpegcloak", version, about = "JPEG-domain image encryption for photo sharing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key file with parameters drawn inside the chaotic ranges.
    Keygen {
        /// Destination key file.
        #[arg(long)]
        out: PathBuf,
        /// Seed for deterministic generation.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Encrypt a PPM/PGM image into a standard JPEG.
    Encrypt {
        /// Input image (binary PPM or PGM).
        #[arg(long = "in")]
        input: PathBuf,
        /// Key file from `keygen`.
        #[arg(long)]
        key: PathBuf,
        /// Destination JPEG.
        #[arg(long)]
        out: PathBuf,
    },
    /// Decrypt a ciphertext JPEG back to a PPM/PGM image.
    Decrypt {
        /// Ciphertext JPEG.
        #[arg(long = "in")]
        input: PathBuf,
        /// Key file used at encryption.
        #[arg(long)]
        key: PathBuf,
        /// Destination image (P6 for color, P5 for grayscale).
        #[arg(long)]
        out: PathBuf,
    },
    /// Print per-channel entropy of image A and PSNR between A and B.
    Analyze {
        /// Image A (PPM, PGM, or JPEG).
        #[arg(long)]
        a: PathBuf,
        /// Image B, compared against A.
        #[arg(long)]
        b: PathBuf,
    },
    /// Render an edge-detection attack map of a JPEG as a PGM image.
    Attack {
        /// Input JPEG.
        #[arg(long = "in")]
        input: PathBuf,
        /// Which block feature to map.
        #[arg(long)]
        kind: AttackKindArg,
        /// Destination PGM (block resolution upscaled 8x).
        #[arg(long)]
        out: PathBuf,
        /// Component to attack.
        #[arg(long, default_value = "y")]
        component: ComponentArg,
    },
    /// Run the platform recompression simulator and print a survival report.
    Simulate {
        /// Uploaded JPEG.
        #[arg(long = "in")]
        input: PathBuf,
        /// Destination for the recompressed JPEG.
        #[arg(long)]
        out: PathBuf,
        /// Recompression quality factor.
        #[arg(long, default_value_t = 71)]
        qf: u8,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AttackKindArg {
    Dcm,
    Ncc,
    Eac,
    Plz,
}

#[derive(Clone, Copy, ValueEnum)]
enum ComponentArg {
    Y,
    Cb,
    Cr,
}

enum CliError {
    Input(String),
    Policy(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Policy(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Policy(m) => write!(f, "{m}"),
        }
    }
}

fn input_err(context: impl fmt::Display, err: impl fmt::Display) -> CliError {
    CliError::Input(format!("{context}: {err}"))
}

impl From<CipherError> for CliError {
    fn from(e: CipherError) -> Self {
        match e {
            CipherError::ImageTooLarge { .. } => CliError::Policy(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<OsnError> for CliError {
    fn from(e: OsnError) -> Self {
        match e {
            OsnError::Unsupported { .. } => CliError::Policy(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Keygen { out, seed } => keygen(&out, seed),
        Command::Encrypt { input, key, out } => encrypt(&input, &key, &out),
        Command::Decrypt { input, key, out } => decrypt(&input, &key, &out),
        Command::Analyze { a, b } => analyze(&a, &b),
        Command::Attack { input, kind, out, component } => attack(&input, kind, &out, component),
        Command::Simulate { input, out, qf } => simulate(&input, &out, qf),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| input_err(path.display(), e))
}

/// Writes via a temp file in the destination directory, renaming on success,
/// so no partial output ever lands at the target path.
fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| input_err(path.display(), e))?;
    std::io::Write::write_all(&mut tmp, bytes).map_err(|e| input_err(path.display(), e))?;
    tmp.persist(path).map_err(|e| input_err(path.display(), e))?;
    Ok(())
}

fn load_key(path: &Path) -> Result<EncryptionKey, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| input_err(path.display(), e))?;
    EncryptionKey::from_key_file(&text).map_err(|e| input_err(path.display(), e))
}

fn keygen(out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let mut rng = match seed {
        Some(s) => ChaCha8Rng::seed_from_u64(s),
        None => ChaCha8Rng::from_entropy(),
    };
    // Rejection-sample until the orbit probes accept all five components.
    for _ in 0..100_000 {
        let candidate = EncryptionKey::from_components(
            rng.gen_range(3.6..4.0),
            rng.gen_range(0.0..1.0),
            rng.gen_range(1.05..1.8),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-0.3..0.3),
        );
        if let Ok(key) = candidate {
            return write_file(out, key.to_key_file().as_bytes());
        }
    }
    Err(CliError::Input("key sampling failed to converge".into()))
}

fn encrypt(input: &Path, key: &Path, out: &Path) -> Result<(), CliError> {
    let img = read_pnm(&read_file(input)?).map_err(|e| input_err(input.display(), e))?;
    let key = load_key(key)?;
    let ct = encrypt_image(&img, &key)?;
    write_file(out, &ct.bytes)
}

fn decrypt(input: &Path, key: &Path, out: &Path) -> Result<(), CliError> {
    let bytes = read_file(input)?;
    let key = load_key(key)?;
    let ct = CiphertextImage::from_jpeg_bytes(bytes, 71)
        .map_err(|e| input_err(input.display(), e))?;
    let img = decrypt_image(&ct, &key)?;
    write_file(out, &write_pnm(&img))
}

enum LoadedImage {
    Pnm(PixelImage),
    Jpeg(Box<JpegData>),
}

impl LoadedImage {
    fn pixels(&self) -> PixelImage {
        match self {
            LoadedImage::Pnm(img) => img.clone(),
            LoadedImage::Jpeg(data) => decompress_pixels(data),
        }
    }
}

fn load_image(path: &Path) -> Result<LoadedImage, CliError> {
    let bytes = read_file(path)?;
    if bytes.starts_with(&[0xFF, 0xD8]) {
        let data = decode_jpeg(&bytes).map_err(|e| input_err(path.display(), e))?;
        Ok(LoadedImage::Jpeg(Box::new(data)))
    } else {
        let img = read_pnm(&bytes).map_err(|e| input_err(path.display(), e))?;
        Ok(LoadedImage::Pnm(img))
    }
}

fn analyze(a: &Path, b: &Path) -> Result<(), CliError> {
    let loaded = load_image(a)?;
    match &loaded {
        LoadedImage::Jpeg(data) => {
            // Component entropies at native (subsampled) resolution.
            let labels = ["y", "cb", "cr"];
            for (i, plane) in data.planes.iter().enumerate() {
                let qt = if i == 0 { &data.luma_qt } else { data.chroma_qt.as_ref().unwrap() };
                let samples = jpegcloak::cipher::clamp_spatial(&inverse_plane(plane, qt));
                println!("entropy.{}={:.4}", labels[i], channel_entropy(&samples.data));
            }
        }
        LoadedImage::Pnm(img) if img.channels == 3 => {
            for (c, label) in ["r", "g", "b"].iter().enumerate() {
                let channel: Vec<u8> =
                    img.samples.iter().skip(c).step_by(3).copied().collect();
                println!("entropy.{label}={:.4}", channel_entropy(&channel));
            }
        }
        LoadedImage::Pnm(img) => {
            println!("entropy.gray={:.4}", channel_entropy(&img.samples));
        }
    }

    let pixels_a = loaded.pixels();
    let pixels_b = load_image(b)?.pixels();
    match psnr(&pixels_a, &pixels_b).map_err(|e| input_err("psnr", e))? {
        PsnrResult::Identical => println!("psnr=identical"),
        PsnrResult::Db(db) => println!("psnr.db={db:.4}"),
    }
    Ok(())
}

fn attack(
    input: &Path,
    kind: AttackKindArg,
    out: &Path,
    component: ComponentArg,
) -> Result<(), CliError> {
    let bytes = read_file(input)?;
    let data = decode_jpeg(&bytes).map_err(|e| input_err(input.display(), e))?;
    let index = match component {
        ComponentArg::Y => 0,
        ComponentArg::Cb => 1,
        ComponentArg::Cr => 2,
    };
    let plane = data.planes.get(index).ok_or_else(|| {
        CliError::Input(format!("{}: image has no such component", input.display()))
    })?;
    let map = match kind {
        AttackKindArg::Dcm => attack_dcm(plane),
        AttackKindArg::Ncc => attack_ncc(plane),
        AttackKindArg::Eac => attack_eac(plane),
        AttackKindArg::Plz => attack_plz(plane),
    };
    write_file(out, &write_pnm(&map.to_image(8)))
}

fn simulate(input: &Path, out: &Path, qf: u8) -> Result<(), CliError> {
    let bytes = read_file(input)?;
    let upload = CiphertextImage::from_jpeg_bytes(bytes, qf)
        .map_err(|e| input_err(input.display(), e))?;
    let policy = PlatformPolicy { recompress_qf: qf, ..PlatformPolicy::default() };
    let processed = platform_process(&upload, &policy)?;
    let report = survival_report(&upload, &processed)?;
    write_file(out, &processed.bytes)?;
    println!("{report}");
    print!("{}", report.to_key_values());
    Ok(())
}
