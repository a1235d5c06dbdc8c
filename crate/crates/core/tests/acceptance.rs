//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them all).
//!
//! Quality thresholds were pinned from a recorded oracle run over the three
//! bundled 512x512 photos (`testdata/`); `cat.ppm` is the reference image
//! whose statistics match the classic test image the published figures were
//! measured on. Rationale for each number lives next to its assertion.

use std::sync::OnceLock;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use jpegcloak::analysis::{
    attack_dcm, attack_eac, attack_ncc, attack_plz, channel_entropy, leak_score, psnr, AttackMap,
};
use jpegcloak::chaos::{
    make_ecus, EncryptionKey, HenonGen, LogisticGen, ECUS_PER_GROUP, ECU_BITS,
};
use jpegcloak::cipher::{
    self, alpha_scale_blocks, check_dc_range, clamp_spatial, decrypt_dc_blocks, encrypt_ac,
    encrypt_dc_blocks, plan_from_stream, CiphertextImage,
};
use jpegcloak::jpeg::{
    compress_pixels, decode_jpeg, decompress_pixels, encode_jpeg, inverse_plane, CoefficientPlane,
    Component, JpegData, PixelImage,
};
use jpegcloak::osn::{platform_process, survival_report, PlatformPolicy};
use jpegcloak::pnm::read_pnm;

/// The reference image first; the entropy gate binds to it.
const IMAGES: [&str; 3] = ["cat", "portrait", "cup"];

fn fixed_key() -> EncryptionKey {
    EncryptionKey::from_components(3.912345, 0.456789, 1.399123, 0.1234, 0.2101).unwrap()
}

struct Fixture {
    name: &'static str,
    img: PixelImage,
    plain71: JpegData,
    ct: CiphertextImage,
    ct_data: JpegData,
}

fn fixtures() -> &'static [Fixture] {
    static CELL: OnceLock<Vec<Fixture>> = OnceLock::new();
    CELL.get_or_init(|| {
        IMAGES
            .iter()
            .map(|&name| {
                let path = format!("{}/../../testdata/{name}.ppm", env!("CARGO_MANIFEST_DIR"));
                let img = read_pnm(&std::fs::read(&path).unwrap()).unwrap();
                let plain71 = compress_pixels(&img, 71).unwrap();
                let ct = cipher::encrypt_image(&img, &fixed_key()).unwrap();
                let ct_data = decode_jpeg(&ct.bytes).unwrap();
                Fixture { name, img, plain71, ct, ct_data }
            })
            .collect()
    })
}

fn criterion(name: &str, f: impl FnOnce() -> Result<String, String>) {
    match f() {
        Ok(detail) => println!("[PASS] {name}: {detail}"),
        Err(why) => {
            println!("[FAIL] {name}: {why}");
            panic!("criterion {name} failed: {why}");
        }
    }
}

fn random_plane(rng: &mut StdRng, bw: usize, bh: usize, component: Component) -> CoefficientPlane {
    let blocks = (0..bw * bh)
        .map(|_| {
            let mut b = [0i32; 64];
            b[0] = rng.gen_range(-1024..=1016);
            // Sparse AC with the occasional dense block, all within category 10.
            let nonzero = if rng.gen_bool(0.1) { 40 } else { rng.gen_range(0..12) };
            for _ in 0..nonzero {
                let q = rng.gen_range(1..64);
                let mag = rng.gen_range(1..=1023);
                b[q] = if rng.gen_bool(0.5) { mag } else { -mag };
            }
            b
        })
        .collect();
    CoefficientPlane::new(bw, bh, component, blocks)
}

fn random_key(rng: &mut StdRng) -> EncryptionKey {
    loop {
        let candidate = EncryptionKey::from_components(
            rng.gen_range(3.61..3.99),
            rng.gen_range(0.01..0.99),
            rng.gen_range(1.07..1.40),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.2..0.2),
        );
        if let Ok(key) = candidate {
            return key;
        }
    }
}

#[test]
fn round_trip_exactness() {
    criterion("round-trip exactness (200 planes, grids to 16x16)", || {
        let start = std::time::Instant::now();
        let mut rng = StdRng::seed_from_u64(0xACCE97);
        for i in 0..200 {
            let bw = rng.gen_range(1..=16);
            let bh = rng.gen_range(1..=16);
            let plane = random_plane(&mut rng, bw, bh, Component::Luma);
            let key = random_key(&mut rng);

            let mut lgen = LogisticGen::new(&key.logistic).map_err(|e| e.to_string())?;
            let plan = plan_from_stream(&mut lgen, bw, bh).map_err(|e| e.to_string())?;
            let permuted = encrypt_dc_blocks(&plane, &plan).map_err(|e| e.to_string())?;
            let restored = decrypt_dc_blocks(&permuted, &plan).map_err(|e| e.to_string())?;
            if restored != plane {
                return Err(format!("case {i}: DC permutation round trip differs"));
            }

            let mut hgen = HenonGen::new(&key.henon).map_err(|e| e.to_string())?;
            let bits = hgen
                .take_bits(bw * bh * ECUS_PER_GROUP * ECU_BITS)
                .map_err(|e| e.to_string())?;
            let ecus = make_ecus(&bits);
            let once = encrypt_ac(&plane, &ecus).map_err(|e| e.to_string())?;
            let twice = encrypt_ac(&once, &ecus).map_err(|e| e.to_string())?;
            if twice != plane {
                return Err(format!("case {i}: AC XOR is not an involution"));
            }
        }
        let elapsed = start.elapsed();
        if elapsed.as_secs() >= 10 {
            return Err(format!("took {elapsed:?}, budget is 10 s"));
        }
        Ok(format!("200 cases exact in {elapsed:?}"))
    });
}

#[test]
fn codec_conformance() {
    criterion("codec conformance (bit-exact + external decoder)", || {
        let mut rng = StdRng::seed_from_u64(0xC0DEC);
        for i in 0..100 {
            let data = if i % 4 == 0 {
                // Color image: grids follow the 4:2:2 MCU layout.
                let w = rng.gen_range(1..=96);
                let h = rng.gen_range(1..=64);
                let ((yw, yh), (cw, ch)) = grids_for(w, h);
                JpegData {
                    width: w,
                    height: h,
                    luma_qt: jpegcloak::jpeg::quant_table_for_qf(
                        &jpegcloak::jpeg::annex_k_luma(),
                        rng.gen_range(1..=100),
                    )
                    .unwrap(),
                    chroma_qt: Some(jpegcloak::jpeg::annex_k_chroma()),
                    planes: vec![
                        random_plane(&mut rng, yw, yh, Component::Luma),
                        random_plane(&mut rng, cw, ch, Component::Cb),
                        random_plane(&mut rng, cw, ch, Component::Cr),
                    ],
                }
            } else {
                let bw = rng.gen_range(1..=12);
                let bh = rng.gen_range(1..=12);
                JpegData {
                    width: bw * 8,
                    height: bh * 8,
                    luma_qt: jpegcloak::jpeg::annex_k_luma(),
                    chroma_qt: None,
                    planes: vec![random_plane(&mut rng, bw, bh, Component::Luma)],
                }
            };
            let bytes = encode_jpeg(&data).map_err(|e| format!("case {i}: encode: {e}"))?;
            let decoded = decode_jpeg(&bytes).map_err(|e| format!("case {i}: decode: {e}"))?;
            if decoded != data {
                return Err(format!("case {i}: round trip not bit-exact"));
            }
            image::load_from_memory(&bytes)
                .map_err(|e| format!("case {i}: external decoder rejected the file: {e}"))?;
        }
        // The real ciphertexts must satisfy the external decoder too.
        for f in fixtures() {
            image::load_from_memory(&f.ct.bytes)
                .map_err(|e| format!("{}: external decoder rejected ciphertext: {e}", f.name))?;
        }
        Ok("100 random planes bit-exact; external decoder accepted every file".into())
    })
}

fn grids_for(w: usize, h: usize) -> ((usize, usize), (usize, usize)) {
    let mcus_w = w.div_ceil(16);
    let mcus_h = h.div_ceil(8);
    ((2 * mcus_w, mcus_h), (mcus_w, mcus_h))
}

/// Decoded ciphertext component samples (padded grid, native resolution).
fn ciphertext_channel(data: &JpegData, index: usize) -> Vec<u8> {
    let qt = if index == 0 { &data.luma_qt } else { data.chroma_qt.as_ref().unwrap() };
    clamp_spatial(&inverse_plane(&data.planes[index], qt)).data
}

#[test]
fn entropy_claim() {
    criterion("entropy claim (reference image, ciphertext luma >= 6.8)", || {
        let reference = &fixtures()[0];
        let y = channel_entropy(&ciphertext_channel(&reference.ct_data, 0));
        let cb = channel_entropy(&ciphertext_channel(&reference.ct_data, 1));
        let cr = channel_entropy(&ciphertext_channel(&reference.ct_data, 2));
        // Soft check: published chroma entropies for the reference image were
        // 5.30 / 5.23 under the authors' keys; ours are reported alongside.
        let mut detail = format!(
            "{}: Y={y:.4} (gate 6.8), Cb={cb:.4}, Cr={cr:.4} (reported; published 5.30/5.23)",
            reference.name
        );
        for f in &fixtures()[1..] {
            let e = channel_entropy(&ciphertext_channel(&f.ct_data, 0));
            detail.push_str(&format!("; {} Y={e:.4}", f.name));
        }
        if y < 6.8 {
            return Err(format!("reference ciphertext luma entropy {y:.4} < 6.8"));
        }
        Ok(detail)
    })
}

#[test]
fn psnr_claim() {
    criterion("psnr claim (plain vs rendered ciphertext in [13, 18] dB)", || {
        let mut detail = String::new();
        for f in fixtures() {
            let rendered = decompress_pixels(&f.ct_data);
            let db = psnr(&f.img, &rendered).map_err(|e| e.to_string())?.db();
            detail.push_str(&format!("{}={db:.2} ", f.name));
            if !(13.0..=18.0).contains(&db) {
                return Err(format!("{}: PSNR {db:.2} outside [13, 18]", f.name));
            }
        }
        Ok(detail.trim_end().into())
    })
}

fn y_attack_pair(f: &Fixture, attack: fn(&CoefficientPlane) -> AttackMap) -> (AttackMap, AttackMap) {
    (attack(&f.plain71.planes[0]), attack(&f.ct_data.planes[0]))
}

#[test]
fn plz_resistance() {
    criterion("plz resistance (full scheme |leak| <= 0.1; AC-only ablation exact)", || {
        let mut detail = String::new();
        for f in fixtures() {
            let (plain, cipher) = y_attack_pair(f, attack_plz);
            let score = leak_score(&plain, &cipher).map_err(|e| e.to_string())?;
            detail.push_str(&format!("{}={score:+.4} ", f.name));
            if score.abs() > 0.1 {
                return Err(format!("{}: PLZ leak {score:+.4} exceeds 0.1", f.name));
            }

            // Ablation: AC XOR alone never moves the last nonzero position,
            // so its PLZ map equals the plaintext's exactly.
            let mut hgen = HenonGen::new(&fixed_key().henon).map_err(|e| e.to_string())?;
            let y = &f.plain71.planes[0];
            let bits = hgen
                .take_bits(y.block_count() * ECUS_PER_GROUP * ECU_BITS)
                .map_err(|e| e.to_string())?;
            let ac_only = encrypt_ac(y, &make_ecus(&bits)).map_err(|e| e.to_string())?;
            if attack_plz(&ac_only).intensities != plain.intensities {
                return Err(format!("{}: AC-only PLZ map differs from plaintext", f.name));
            }
        }
        Ok(format!("{detail}; AC-only ablation maps identical"))
    })
}

#[test]
fn dcm_ncc_eac_resistance() {
    criterion("dcm/ncc/eac resistance (|leak| <= 0.1)", || {
        let mut detail = String::new();
        for f in fixtures() {
            for (attack, label) in [
                (attack_dcm as fn(&CoefficientPlane) -> AttackMap, "dcm"),
                (attack_ncc, "ncc"),
                (attack_eac, "eac"),
            ] {
                let (plain, cipher) = y_attack_pair(f, attack);
                let score = leak_score(&plain, &cipher).map_err(|e| e.to_string())?;
                if score.abs() > 0.1 {
                    return Err(format!("{}: {label} leak {score:+.4} exceeds 0.1", f.name));
                }
                detail.push_str(&format!("{}.{label}={score:+.3} ", f.name));
            }
        }
        Ok(detail.trim_end().into())
    })
}

#[test]
fn recompression_survivability() {
    criterion("recompression survivability (delta <= 1 dB, coefficients stable)", || {
        let mut detail = String::new();
        for f in fixtures() {
            let direct = psnr(&f.img, &cipher::decrypt_image(&f.ct, &fixed_key()).unwrap())
                .unwrap()
                .db();
            // Oracle run measured 36.6-38.0 dB direct decrypt; pinned at the
            // run's minimum minus 1 dB.
            if direct < 35.5 {
                return Err(format!("{}: direct decrypt {direct:.2} dB below pin 35.5", f.name));
            }
            let processed =
                platform_process(&f.ct, &PlatformPolicy::default()).map_err(|e| e.to_string())?;
            let after = psnr(&f.img, &cipher::decrypt_image(&processed, &fixed_key()).unwrap())
                .unwrap()
                .db();
            let delta = (direct - after).abs();
            if delta > 1.0 {
                return Err(format!("{}: recompression delta {delta:.3} dB exceeds 1", f.name));
            }
            let report = survival_report(&f.ct, &processed).map_err(|e| e.to_string())?;
            // Oracle run measured >= 0.9992 identical coefficients; the stated
            // requirement is < 10% change, pinned tighter at 1%.
            let frac = report.identical_fraction();
            if frac < 0.99 {
                return Err(format!("{}: only {frac:.4} of coefficients survive", f.name));
            }
            detail.push_str(&format!(
                "{}: direct={direct:.2} after={after:.2} delta={delta:.3} survive={frac:.4}; ",
                f.name
            ));
        }
        Ok(detail.trim_end_matches("; ").into())
    })
}

#[test]
fn key_sensitivity() {
    criterion("key sensitivity (1e-10 perturbation per component)", || {
        let f = &fixtures()[0];
        let key = fixed_key();
        let direct = psnr(&f.img, &cipher::decrypt_image(&f.ct, &key).unwrap()).unwrap().db();

        let k = &key;
        let cases: [(&str, EncryptionKey, f64); 5] = [
            // The logistic components rekey the whole block layout, driving
            // the result to ciphertext-level noise; the oracle run measured
            // 14.2-14.9 dB (the scrambling floor for these photos' contrast),
            // pinned at 16.
            ("mu", EncryptionKey::from_components(k.logistic.mu + 1e-10, k.logistic.x0, k.henon.a, k.henon.x0, k.henon.y0).unwrap(), 16.0),
            ("logistic_x0", EncryptionKey::from_components(k.logistic.mu, k.logistic.x0 + 1e-10, k.henon.a, k.henon.x0, k.henon.y0).unwrap(), 16.0),
            // The Henon components rekey only the AC layer; block means stay,
            // so the floor is higher: measured 22.7-23.1 dB, pinned at 26.
            ("henon_a", EncryptionKey::from_components(k.logistic.mu, k.logistic.x0, k.henon.a + 1e-10, k.henon.x0, k.henon.y0).unwrap(), 26.0),
            ("henon_x0", EncryptionKey::from_components(k.logistic.mu, k.logistic.x0, k.henon.a, k.henon.x0 + 1e-10, k.henon.y0).unwrap(), 26.0),
            ("henon_y0", EncryptionKey::from_components(k.logistic.mu, k.logistic.x0, k.henon.a, k.henon.x0, k.henon.y0 + 1e-10).unwrap(), 26.0),
        ];
        let mut detail = format!("direct={direct:.2}");
        for (label, wrong_key, cap) in cases {
            let wrong = psnr(&f.img, &cipher::decrypt_image(&f.ct, &wrong_key).unwrap())
                .unwrap()
                .db();
            detail.push_str(&format!(" {label}={wrong:.2}"));
            if wrong > cap {
                return Err(format!("{label}: wrong-key PSNR {wrong:.2} above pin {cap}"));
            }
            // However the noise floors fall, a wrong key must stay far below
            // a correct decrypt.
            if wrong > direct - 10.0 {
                return Err(format!(
                    "{label}: wrong-key PSNR {wrong:.2} within 10 dB of correct {direct:.2}"
                ));
            }
        }
        Ok(detail)
    })
}

#[test]
fn dc_safety() {
    criterion("dc safety (no range violations across the corpus)", || {
        let mut planes_checked = 0usize;
        for f in fixtures() {
            for plane in f.ct_data.planes.iter().chain(f.plain71.planes.iter()) {
                let violations = check_dc_range(plane);
                if !violations.is_empty() {
                    return Err(format!(
                        "{}: {} DC violations, first at block {}",
                        f.name,
                        violations.len(),
                        violations[0]
                    ));
                }
                planes_checked += 1;
            }
        }
        // Random codec-conformance planes are range-checked at encode time;
        // a violation there fails encode_jpeg outright.
        let mut rng = StdRng::seed_from_u64(7);
        let plane = random_plane(&mut rng, 8, 8, Component::Luma);
        if !check_dc_range(&plane).is_empty() {
            return Err("random generator produced out-of-range DC".into());
        }
        Ok(format!("{planes_checked} pipeline planes clean"))
    })
}

#[test]
fn alpha_scaling_comparison() {
    criterion("alpha-scaling information-loss comparison (reference image)", || {
        let f = &fixtures()[0];
        let key = fixed_key();

        // Rebuild the encrypted-but-unrepaired planes.
        let mut data = f.plain71.clone();
        let mut lgen = LogisticGen::new(&key.logistic).map_err(|e| e.to_string())?;
        let mut hgen = HenonGen::new(&key.henon).map_err(|e| e.to_string())?;
        for plane in data.planes.iter_mut() {
            let (bw, bh) = plane.grid();
            let plan = plan_from_stream(&mut lgen, bw, bh).map_err(|e| e.to_string())?;
            let bits = hgen
                .take_bits(bw * bh * ECUS_PER_GROUP * ECU_BITS)
                .map_err(|e| e.to_string())?;
            *plane = encrypt_dc_blocks(plane, &plan).map_err(|e| e.to_string())?;
            *plane = encrypt_ac(plane, &make_ecus(&bits)).map_err(|e| e.to_string())?;
        }

        let reals = jpegcloak::jpeg::reconstruct_planes(&data);
        let mut alpha_zeroed = 0usize;
        let mut repair_changed = 0usize;
        let mut overflow_total = 0usize;
        for (plane, real) in data.planes.iter().zip(&reals) {
            let (bw, bh) = plane.grid();
            let mut overflow = Vec::new();
            for by in 0..bh {
                'blocks: for bx in 0..bw {
                    for y in 0..8 {
                        for x in 0..8 {
                            let v = real.data[(by * 8 + y) * real.width + bx * 8 + x];
                            if !(0.0..=255.0).contains(&v) {
                                overflow.push(by * bw + bx);
                                continue 'blocks;
                            }
                        }
                    }
                }
            }
            overflow_total += overflow.len();

            let alpha = alpha_scale_blocks(plane, 0.4, &overflow).map_err(|e| e.to_string())?;
            let qt = match plane.component {
                Component::Luma => &data.luma_qt,
                _ => data.chroma_qt.as_ref().unwrap(),
            };
            let repaired = jpegcloak::jpeg::forward_plane(&clamp_spatial(real), qt, plane.component);
            for &b in &overflow {
                for q in 1..64 {
                    if plane.block(b)[q] != 0 && alpha.block(b)[q] == 0 {
                        alpha_zeroed += 1;
                    }
                    if plane.block(b)[q] != repaired.block(b)[q] {
                        repair_changed += 1;
                    }
                }
            }
        }
        let report = format!(
            "{}: overflow_blocks={overflow_total}, alpha(0.4) zeroed {alpha_zeroed} nonzero AC, \
             clamp repair changed {repair_changed} AC in the same blocks",
            f.name
        );
        println!("{report}");
        if alpha_zeroed <= repair_changed {
            return Err(format!(
                "alpha route zeroed {alpha_zeroed}, not strictly more than repair's {repair_changed}"
            ));
        }
        Ok(report)
    })
}
