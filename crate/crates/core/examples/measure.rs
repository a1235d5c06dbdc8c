//! Prints the measured quantities the acceptance thresholds are pinned to:
//! ciphertext entropies, plaintext-vs-ciphertext PSNR, attack-map leak
//! scores, recompression survival, decrypt fidelity, and key sensitivity.
//!
//! Run with: cargo run -p jpegcloak --release --example measure

use jpegcloak::analysis::{
    attack_dcm, attack_eac, attack_ncc, attack_plz, channel_entropy, leak_score, psnr,
};
use jpegcloak::chaos::EncryptionKey;
use jpegcloak::cipher::{self, alpha_scale_blocks, clamp_spatial, encrypt_ac, CiphertextImage};
use jpegcloak::jpeg::{compress_pixels, decode_jpeg, reconstruct_planes};
use jpegcloak::osn::{platform_process, survival_report, PlatformPolicy};
use jpegcloak::pnm::read_pnm;

fn main() {
    let key = EncryptionKey::from_components(3.912345, 0.456789, 1.399123, 0.1234, 0.2101).unwrap();
    let images = ["portrait", "cup", "cat"];
    for name in images {
        let path = format!("{}/../../testdata/{name}.ppm", env!("CARGO_MANIFEST_DIR"));
        let img = read_pnm(&std::fs::read(&path).unwrap()).unwrap();
        println!("== {name} {}x{}", img.width, img.height);

        let ct = cipher::encrypt_image(&img, &key).unwrap();
        let ct_data = decode_jpeg(&ct.bytes).unwrap();

        // Entropy of the decoded ciphertext component planes.
        let names = ["y", "cb", "cr"];
        for (plane, comp) in ct_data.planes.iter().zip(names) {
            let real = jpegcloak::jpeg::inverse_plane(
                plane,
                if comp == "y" { &ct_data.luma_qt } else { ct_data.chroma_qt.as_ref().unwrap() },
            );
            let samples = clamp_spatial(&real);
            println!("  entropy.{comp} = {:.4}", channel_entropy(&samples.data));
        }

        // PSNR original vs rendered ciphertext.
        let rendered = jpegcloak::jpeg::decompress_pixels(&ct_data);
        println!("  psnr.plain_vs_ct = {:.2}", psnr(&img, &rendered).unwrap().db());

        // Attack leak scores: plain qf-71 planes vs decoded ciphertext planes.
        let plain = compress_pixels(&img, 71).unwrap();
        for (attack, label) in [
            (attack_dcm as fn(&_) -> _, "dcm"),
            (attack_ncc, "ncc"),
            (attack_eac, "eac"),
            (attack_plz, "plz"),
        ] {
            let score =
                leak_score(&attack(&plain.planes[0]), &attack(&ct_data.planes[0])).unwrap();
            println!("  leak.{label} = {:+.4}", score);
        }

        // Decrypt fidelity with and without recompression.
        let rec = cipher::decrypt_image(&ct, &key).unwrap();
        let psnr_direct = psnr(&img, &rec).unwrap().db();
        println!("  psnr.decrypt = {:.2}", psnr_direct);

        let processed = platform_process(&ct, &PlatformPolicy::default()).unwrap();
        let report = survival_report(&ct, &processed).unwrap();
        println!("  survival.identical_fraction = {:.4}", report.identical_fraction());
        for c in &report.components {
            println!(
                "    {:?}: identical={:.4} cat_changes={} zero_flips={}",
                c.component,
                c.identical_fraction(),
                c.category_changes,
                c.zero_flips
            );
        }
        let rec2 = cipher::decrypt_image(&processed, &key).unwrap();
        let psnr_recompressed = psnr(&img, &rec2).unwrap().db();
        println!(
            "  psnr.decrypt_after_platform = {:.2} (delta {:.3})",
            psnr_recompressed,
            (psnr_direct - psnr_recompressed).abs()
        );

        // Key sensitivity: each component perturbed by 1e-10.
        let k = &key;
        let perturbed = [
            ("mu", EncryptionKey::from_components(k.logistic.mu + 1e-10, k.logistic.x0, k.henon.a, k.henon.x0, k.henon.y0)),
            ("lx0", EncryptionKey::from_components(k.logistic.mu, k.logistic.x0 + 1e-10, k.henon.a, k.henon.x0, k.henon.y0)),
            ("a", EncryptionKey::from_components(k.logistic.mu, k.logistic.x0, k.henon.a + 1e-10, k.henon.x0, k.henon.y0)),
            ("hx0", EncryptionKey::from_components(k.logistic.mu, k.logistic.x0, k.henon.a, k.henon.x0 + 1e-10, k.henon.y0)),
            ("hy0", EncryptionKey::from_components(k.logistic.mu, k.logistic.x0, k.henon.a, k.henon.x0, k.henon.y0 + 1e-10)),
        ];
        for (label, wrong_key) in perturbed {
            let wrong = cipher::decrypt_image(&ct, &wrong_key.unwrap()).unwrap();
            println!("  psnr.wrong_key.{label} = {:.2}", psnr(&img, &wrong).unwrap().db());
        }

        // Alpha-scaling comparison: count AC coefficients zeroed by the
        // alpha route on overflow blocks vs coefficients changed by repair.
        alpha_comparison(&img, &key);
    }

    // Flat-image sanity for the trivial cases.
    let flat = jpegcloak::jpeg::PixelImage::new(8, 8, 1, vec![128; 64]);
    let ct = cipher::encrypt_image(&flat, &key).unwrap();
    println!("== flat 8x8: ciphertext {} bytes, decodes: {}", ct.bytes.len(), decode_jpeg(&ct.bytes).is_ok());
    let _ = CiphertextImage::from_jpeg_bytes(ct.bytes.clone(), 71).unwrap();
}

fn alpha_comparison(img: &jpegcloak::jpeg::PixelImage, key: &EncryptionKey) {
    use jpegcloak::cipher::{encrypt_dc_blocks, plan_from_stream};
    use jpegcloak::chaos::{make_ecus, HenonGen, LogisticGen, ECUS_PER_GROUP, ECU_BITS};

    let mut data = compress_pixels(img, 71).unwrap();
    let mut lgen = LogisticGen::new(&key.logistic).unwrap();
    let mut hgen = HenonGen::new(&key.henon).unwrap();
    for plane in data.planes.iter_mut() {
        let (bw, bh) = plane.grid();
        let plan = plan_from_stream(&mut lgen, bw, bh).unwrap();
        let bits = hgen.take_bits(bw * bh * ECUS_PER_GROUP * ECU_BITS).unwrap();
        *plane = encrypt_dc_blocks(plane, &plan).unwrap();
        *plane = encrypt_ac(plane, &make_ecus(&bits)).unwrap();
    }

    // Find blocks whose unclamped reconstruction overflows [0, 255].
    let reals = reconstruct_planes(&data);
    let mut total_overflow_blocks = 0usize;
    let mut alpha_zeroed = 0usize;
    let mut repair_changed = 0usize;
    for (plane, real) in data.planes.iter().zip(&reals) {
        let (bw, bh) = plane.grid();
        let mut overflow = Vec::new();
        for by in 0..bh {
            for bx in 0..bw {
                'scan: for y in 0..8 {
                    for x in 0..8 {
                        let v = real.data[(by * 8 + y) * real.width + bx * 8 + x];
                        if !(0.0..=255.0).contains(&v) {
                            overflow.push(by * bw + bx);
                            break 'scan;
                        }
                    }
                }
            }
        }
        total_overflow_blocks += overflow.len();

        let alpha = alpha_scale_blocks(plane, 0.4, &overflow).unwrap();
        for &b in &overflow {
            for q in 1..64 {
                if plane.block(b)[q] != 0 && alpha.block(b)[q] == 0 {
                    alpha_zeroed += 1;
                }
            }
        }

        let qt = match plane.component {
            jpegcloak::jpeg::Component::Luma => &data.luma_qt,
            _ => data.chroma_qt.as_ref().unwrap(),
        };
        // Repair changes attributed to the same overflow blocks, AC only.
        let repaired = jpegcloak::jpeg::forward_plane(&clamp_spatial(real), qt, plane.component);
        for &b in &overflow {
            repair_changed += plane.block(b)[1..]
                .iter()
                .zip(&repaired.block(b)[1..])
                .filter(|(x, y)| x != y)
                .count();
        }
    }
    println!(
        "  alpha_cmp: overflow_blocks={total_overflow_blocks} alpha_zeroed={alpha_zeroed} repair_changed={repair_changed}"
    );
}
