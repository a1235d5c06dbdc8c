//! End-to-end tests driving the compiled binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jpegcloak::analysis::psnr;
use jpegcloak::jpeg::{compress_pixels, encode_jpeg, PixelImage};
use jpegcloak::pnm::{read_pnm, write_pnm};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jpegcloak"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("jpegcloak-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Smooth 16x16 color ramp: kind to the codec, so the decrypt PSNR check has
/// headroom.
fn test_image() -> PixelImage {
    let mut samples = Vec::with_capacity(16 * 16 * 3);
    for y in 0..16u32 {
        for x in 0..16u32 {
            samples.push((80 + x * 6) as u8);
            samples.push((90 + y * 5) as u8);
            samples.push((100 + (x + y) * 3) as u8);
        }
    }
    PixelImage::new(16, 16, 3, samples)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn keygen_is_deterministic_with_seed() {
    let dir = tmp_dir("keygen");
    let k1 = dir.join("a.key");
    let k2 = dir.join("b.key");
    assert_eq!(code(&run(&["keygen", "--out", s(&k1), "--seed", "42"])), 0);
    assert_eq!(code(&run(&["keygen", "--out", s(&k2), "--seed", "42"])), 0);
    assert_eq!(std::fs::read(&k1).unwrap(), std::fs::read(&k2).unwrap());

    let k3 = dir.join("c.key");
    assert_eq!(code(&run(&["keygen", "--out", s(&k3), "--seed", "43"])), 0);
    assert_ne!(std::fs::read(&k1).unwrap(), std::fs::read(&k3).unwrap());

    // Five parseable f64 lines.
    let text = std::fs::read_to_string(&k1).unwrap();
    assert_eq!(text.lines().count(), 5);
    for line in text.lines() {
        line.parse::<f64>().unwrap();
    }
}

#[test]
fn encrypt_decrypt_round_trip_meets_fidelity() {
    let dir = tmp_dir("roundtrip");
    let key = dir.join("k.key");
    let plain = dir.join("plain.ppm");
    let ct = dir.join("ct.jpg");
    let rec = dir.join("rec.ppm");

    let img = test_image();
    std::fs::write(&plain, write_pnm(&img)).unwrap();

    assert_eq!(code(&run(&["keygen", "--out", s(&key), "--seed", "7"])), 0);
    assert_eq!(code(&run(&["encrypt", "--in", s(&plain), "--key", s(&key), "--out", s(&ct)])), 0);
    assert_eq!(code(&run(&["decrypt", "--in", s(&ct), "--key", s(&key), "--out", s(&rec)])), 0);

    let recovered = read_pnm(&std::fs::read(&rec).unwrap()).unwrap();
    let db = psnr(&img, &recovered).unwrap().db();
    assert!(db >= 30.0, "end-to-end PSNR {db:.2} below 30 dB");

    // Identical argv and inputs give byte-identical outputs.
    let ct2 = dir.join("ct2.jpg");
    assert_eq!(code(&run(&["encrypt", "--in", s(&plain), "--key", s(&key), "--out", s(&ct2)])), 0);
    assert_eq!(std::fs::read(&ct).unwrap(), std::fs::read(&ct2).unwrap());
}

#[test]
fn malformed_key_file_is_an_input_error() {
    let dir = tmp_dir("badkey");
    let key = dir.join("bad.key");
    let plain = dir.join("p.ppm");
    std::fs::write(&key, "3.9\nnot-a-number\n1.4\n0.1\n0.1\n").unwrap();
    std::fs::write(&plain, write_pnm(&test_image())).unwrap();
    let out = run(&["encrypt", "--in", s(&plain), "--key", s(&key), "--out", s(&dir.join("x.jpg"))]);
    assert_eq!(code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2"), "diagnostic names the bad line: {stderr}");
}

#[test]
fn oversized_simulate_is_a_policy_rejection() {
    let dir = tmp_dir("oversize");
    let big = dir.join("big.jpg");
    // 2048x2048 flat gray JPEG, built directly through the codec.
    let img = PixelImage::new(2048, 2048, 1, vec![128; 2048 * 2048]);
    let bytes = encode_jpeg(&compress_pixels(&img, 71).unwrap()).unwrap();
    std::fs::write(&big, bytes).unwrap();

    let out = run(&["simulate", "--in", s(&big), "--out", s(&dir.join("out.jpg"))]);
    assert_eq!(code(&out), 3);
    // Nothing was written at the destination.
    assert!(!dir.join("out.jpg").exists());
}

#[test]
fn oversized_encrypt_is_a_policy_rejection() {
    let dir = tmp_dir("oversize-enc");
    let plain = dir.join("big.pgm");
    let img = PixelImage::new(2048, 8, 1, vec![100; 2048 * 8]);
    std::fs::write(&plain, write_pnm(&img)).unwrap();
    let key = dir.join("k.key");
    assert_eq!(code(&run(&["keygen", "--out", s(&key), "--seed", "1"])), 0);
    let out = run(&["encrypt", "--in", s(&plain), "--key", s(&key), "--out", s(&dir.join("x.jpg"))]);
    assert_eq!(code(&out), 3);
}

#[test]
fn simulate_prints_survival_report() {
    let dir = tmp_dir("simulate");
    let up = dir.join("up.jpg");
    let img = PixelImage::new(64, 64, 1, (0..64 * 64).map(|i| (i % 251) as u8).collect());
    std::fs::write(&up, encode_jpeg(&compress_pixels(&img, 71).unwrap()).unwrap()).unwrap();

    let out = run(&["simulate", "--in", s(&up), "--out", s(&dir.join("down.jpg"))]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("survival.overall.identical_fraction="), "{stdout}");
    assert!(stdout.contains("coefficients identical"), "{stdout}");
    assert!(dir.join("down.jpg").exists());
}

#[test]
fn analyze_reports_entropy_and_psnr() {
    let dir = tmp_dir("analyze");
    let a = dir.join("a.ppm");
    let img = test_image();
    std::fs::write(&a, write_pnm(&img)).unwrap();

    let out = run(&["analyze", "--a", s(&a), "--b", s(&a)]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("entropy.r="), "{stdout}");
    assert!(stdout.contains("psnr=identical"), "{stdout}");
}

#[test]
fn attack_renders_a_block_resolution_map() {
    let dir = tmp_dir("attack");
    let jpg = dir.join("img.jpg");
    let img = test_image();
    std::fs::write(&jpg, encode_jpeg(&compress_pixels(&img, 71).unwrap()).unwrap()).unwrap();

    for kind in ["dcm", "ncc", "eac", "plz"] {
        let map = dir.join(format!("{kind}.pgm"));
        let out = run(&["attack", "--in", s(&jpg), "--kind", kind, "--out", s(&map)]);
        assert_eq!(code(&out), 0, "{kind}");
        let parsed = read_pnm(&std::fs::read(&map).unwrap()).unwrap();
        // 16x16 image -> 1x2 MCUs -> 2x2 luma blocks, upscaled 8x.
        assert_eq!((parsed.width, parsed.height), (16, 16), "{kind}");
        assert_eq!(parsed.channels, 1);
    }

    // Chroma component selection works too (half-width grid).
    let map = dir.join("cb.pgm");
    let out = run(&["attack", "--in", s(&jpg), "--kind", "eac", "--out", s(&map), "--component", "cb"]);
    assert_eq!(code(&out), 0);
    let parsed = read_pnm(&std::fs::read(&map).unwrap()).unwrap();
    assert_eq!((parsed.width, parsed.height), (8, 16));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&["encrypt", "--in", "x.ppm"])), 1); // missing args
    assert_eq!(code(&run(&["no-such-command"])), 1);
    assert_eq!(code(&run(&["attack", "--in", "x.jpg", "--kind", "bogus", "--out", "y.pgm"])), 1);
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["encrypt", "--help"])), 0);
}

#[test]
fn garbage_input_is_an_input_error() {
    let dir = tmp_dir("garbage");
    let bad = dir.join("bad.jpg");
    std::fs::write(&bad, b"definitely not a jpeg").unwrap();
    let out = run(&["attack", "--in", s(&bad), "--kind", "dcm", "--out", s(&dir.join("m.pgm"))]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());

    let missing = run(&["decrypt", "--in", s(&dir.join("nope.jpg")), "--key", s(&dir.join("nope.key")), "--out", s(&dir.join("o.ppm"))]);
    assert_eq!(code(&missing), 2);
}
