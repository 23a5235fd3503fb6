use std::path::Path;

use imgviz::raster::*;
use imgviz::Error;
use proptest::prelude::*;

fn save(path: &Path, bytes: &[u8], w: u32, h: u32, color: image::ExtendedColorType) {
    image::save_buffer(path, bytes, w, h, color).unwrap();
}

/// Packs codes LSB-first at a fixed bit width.
fn pack_codes(codes: &[u16], width: u32) -> Vec<u8> {
    let mut out = Vec::new();
    let (mut acc, mut bits) = (0u32, 0u32);
    for &c in codes {
        acc |= u32::from(c) << bits;
        bits += width;
        while bits >= 8 {
            out.push((acc & 0xff) as u8);
            acc >>= 8;
            bits -= 8;
        }
    }
    if bits > 0 {
        out.push(acc as u8);
    }
    out
}

/// A GIF written byte by byte: 256-entry gray palette and uncompressed LZW
/// (a clear code, one literal per pixel, an end code, all 9 bits wide).
fn hand_written_gif(w: u16, h: u16, frames: &[Vec<u8>]) -> Vec<u8> {
    let mut g = b"GIF89a".to_vec();
    g.extend(w.to_le_bytes());
    g.extend(h.to_le_bytes());
    g.extend([0xF7, 0, 0]);
    for v in 0..=255u8 {
        g.extend([v, v, v]);
    }
    for px in frames {
        g.extend([0x21, 0xF9, 4, 0, 10, 0, 0, 0]);
        g.push(0x2C);
        g.extend([0, 0, 0, 0]);
        g.extend(w.to_le_bytes());
        g.extend(h.to_le_bytes());
        g.push(0);
        g.push(8);
        let mut codes = vec![256u16];
        codes.extend(px.iter().map(|&p| u16::from(p)));
        codes.push(257);
        let data = pack_codes(&codes, 9);
        for chunk in data.chunks(255) {
            g.push(chunk.len() as u8);
            g.extend(chunk);
        }
        g.push(0);
    }
    g.push(0x3B);
    g
}

#[test]
fn reads_hand_written_gif_frames() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("two.gif");
    let f0 = vec![0, 85, 170, 255];
    let f1 = vec![255, 255, 0, 0];
    std::fs::write(&p, hand_written_gif(2, 2, &[f0.clone(), f1.clone()])).unwrap();
    let t = load_target(&p, TargetMode::Continuous).unwrap();
    assert_eq!(t.frames().len(), 2);
    assert_eq!(t.height(), 2);
    assert_eq!(t.frames()[0].rows(), vec![vec![0.0, 85.0 / 255.0], vec![170.0 / 255.0, 1.0]]);
    assert_eq!(quantize_8bit(&t.frames()[1]).unwrap(), f1);
    let b = load_target(&p, TargetMode::Binary);
    assert!(matches!(b, Err(Error::NotBinary { index: 1, value: 85 })));
}

#[test]
fn png_color_types() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    save(&d.join("l.png"), &[0, 128, 255, 7], 2, 2, image::ExtendedColorType::L8);
    save(&d.join("la.png"), &[10, 255, 20, 0], 2, 1, image::ExtendedColorType::La8);
    save(&d.join("rgb.png"), &[255, 0, 0, 0, 255, 0], 2, 1, image::ExtendedColorType::Rgb8);
    save(&d.join("rgba.png"), &[0, 0, 255, 9], 1, 1, image::ExtendedColorType::Rgba8);
    save(&d.join("l16.png"), &[0, 0, 255, 255], 2, 1, image::ExtendedColorType::L16);

    let l = load_target(d.join("l.png"), TargetMode::Discrete8).unwrap();
    assert_eq!(quantize_8bit(l.matrix()).unwrap(), vec![0, 128, 255, 7]);
    let la = load_target(d.join("la.png"), TargetMode::Continuous).unwrap();
    assert_eq!(quantize_8bit(la.matrix()).unwrap(), vec![10, 20]);
    let rgb = load_target(d.join("rgb.png"), TargetMode::Continuous).unwrap();
    assert_eq!(quantize_8bit(rgb.matrix()).unwrap(), vec![76, 150]);
    let rgba = load_target(d.join("rgba.png"), TargetMode::Continuous).unwrap();
    assert_eq!(quantize_8bit(rgba.matrix()).unwrap(), vec![29]);
    assert!(matches!(
        load_target(d.join("l16.png"), TargetMode::Continuous),
        Err(Error::UnsupportedFormat { .. })
    ));
}

#[test]
fn load_failures() {
    let dir = tempfile::tempdir().unwrap();
    let missing = load_target(dir.path().join("none.png"), TargetMode::Continuous).unwrap_err();
    assert!(missing.is_io());
    let junk = dir.path().join("junk.png");
    std::fs::write(&junk, b"definitely not an image").unwrap();
    assert!(load_target(&junk, TargetMode::Continuous).is_err());
}

#[test]
fn binary_targets_accept_only_extremes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("b.png");
    save(&p, &[0, 255, 255, 0], 2, 2, image::ExtendedColorType::L8);
    let t = load_target(&p, TargetMode::Binary).unwrap();
    assert_eq!(t.mode(), TargetMode::Binary);
    assert_eq!(t.matrix().values(), &[0.0, 1.0, 1.0, 0.0]);
}

#[test]
fn png_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("out.png");
    let m = PixelMatrix::from_rows(&[vec![0.0, 0.5], vec![1.0, 0.25]]).unwrap();
    write_gray_png(&m, &p).unwrap();
    let back = load_target(&p, TargetMode::Continuous).unwrap();
    assert_eq!(quantize_8bit(back.matrix()).unwrap(), vec![0, 128, 255, 64]);
}

#[test]
fn layout_examples() {
    let m = vector_to_matrix(&[1.0, 0.0, 0.5, 0.25], 2, 2).unwrap();
    assert_eq!(m.rows(), vec![vec![1.0, 0.5], vec![0.0, 0.25]]);
    let wide = vector_to_matrix(&[0.1, 0.2, 0.3], 1, 3).unwrap();
    assert_eq!(wide.rows(), vec![vec![0.1, 0.2, 0.3]]);
    let tall = vector_to_matrix(&[0.1, 0.2, 0.3], 3, 1).unwrap();
    assert_eq!(tall.rows(), vec![vec![0.1], vec![0.2], vec![0.3]]);
    assert!(matches!(vector_to_matrix(&[0.1; 5], 2, 2), Err(Error::DimensionMismatch { .. })));
    assert!(vector_to_matrix(&[1.5, 0.0], 1, 2).is_err());
}

#[test]
fn quantization_rounds_half_up() {
    assert_eq!(quantize_value(0.5).unwrap(), 128);
    assert_eq!(quantize_value(0.0).unwrap(), 0);
    assert_eq!(quantize_value(1.0).unwrap(), 255);
    assert!(quantize_value(1.0001).is_err());
    assert!(quantize_value(f64::NAN).is_err());
}

#[test]
fn target_shape_checks() {
    let a = PixelMatrix::filled(2, 2, 0.0).unwrap();
    let b = PixelMatrix::filled(2, 3, 0.0).unwrap();
    assert!(TargetImage::new(TargetMode::Continuous, vec![a.clone(), b]).is_err());
    assert!(TargetImage::new(TargetMode::Continuous, vec![]).is_err());
    let half = PixelMatrix::filled(2, 2, 0.5).unwrap();
    assert!(TargetImage::single(TargetMode::Binary, half).is_err());
    assert!(TargetImage::single(TargetMode::Binary, a).is_ok());
}

proptest! {
    #[test]
    fn layout_round_trip(h in 1usize..12, w in 1usize..12, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let s: Vec<f64> = (0..h * w).map(|_| rng.gen()).collect();
        let m = vector_to_matrix(&s, h, w).unwrap();
        for j in 0..w {
            for i in 0..h {
                prop_assert_eq!(m.get(i, j), s[j * h + i]);
            }
        }
        prop_assert_eq!(matrix_to_vector(&m), s);
    }

    #[test]
    fn luma_stays_in_channel_hull(r in any::<u8>(), g in any::<u8>(), b in any::<u8>()) {
        let y = luma(r, g, b);
        prop_assert!(y >= r.min(g).min(b) && y <= r.max(g).max(b));
    }
}
