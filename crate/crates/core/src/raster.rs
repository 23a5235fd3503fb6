//! Grayscale pixel grids, target loading and the vector/matrix layout shared
//! by every mapping scheme.
//!
//! Pixel byte `k` always corresponds to the normalized intensity `k / 255`.
//! Decision vectors are laid out column-major: pixel `(i, j)` of an `h x w`
//! image holds component `j * h + i` (zero-based).

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use image::codecs::gif::GifDecoder;
use image::{AnimationDecoder, DynamicImage, ImageFormat, ImageReader};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// An `h x w` grid of grayscale intensities in `[0, 1]`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelMatrix {
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl PixelMatrix {
    /// Builds a matrix from row-major values, rejecting anything outside `[0, 1]`.
    pub fn from_row_major(height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidParameter {
                name: "dimensions",
                reason: format!("{height}x{width} image has no pixels"),
            });
        }
        check_len(height * width, values.len())?;
        check_unit_range(&values)?;
        Ok(Self {
            height,
            width,
            values,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        for row in rows {
            check_len(width, row.len())?;
        }
        Self::from_row_major(height, width, rows.concat())
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Result<Self> {
        Self::from_row_major(height, width, vec![value; height * width])
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    /// Row-major view of the intensities.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.width).map(<[f64]>::to_vec).collect()
    }

    pub fn same_shape(&self, other: &PixelMatrix) -> bool {
        self.height == other.height && self.width == other.width
    }
}

pub(crate) fn check_unit_range(values: &[f64]) -> Result<()> {
    check_range(values, 0.0, 1.0)
}

pub(crate) fn check_range(values: &[f64], lower: f64, upper: f64) -> Result<()> {
    match values
        .iter()
        .position(|v| !(lower..=upper).contains(v))
    {
        None => Ok(()),
        Some(index) => Err(Error::OutOfRange {
            index,
            value: values[index],
            lower,
            upper,
        }),
    }
}

/// How the intensities of a target image are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetMode {
    Continuous,
    Discrete8,
    Binary,
}

impl std::str::FromStr for TargetMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "continuous" => Ok(TargetMode::Continuous),
            "discrete8" | "discrete" => Ok(TargetMode::Discrete8),
            "binary" => Ok(TargetMode::Binary),
            other => Err(Error::config(
                "target.mode",
                format!("unknown mode `{other}` (expected continuous, discrete8 or binary)"),
            )),
        }
    }
}

/// A target image: one frame for static problems, several for dynamic ones.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetImage {
    mode: TargetMode,
    frames: Vec<PixelMatrix>,
}

impl TargetImage {
    pub fn new(mode: TargetMode, frames: Vec<PixelMatrix>) -> Result<Self> {
        let first = frames.first().ok_or(Error::Empty("target frames"))?;
        for frame in &frames {
            if !frame.same_shape(first) {
                return Err(Error::DimensionMismatch {
                    expected: first.len(),
                    found: frame.len(),
                });
            }
            match mode {
                TargetMode::Continuous => {}
                TargetMode::Discrete8 => {
                    if let Some(index) = frame
                        .values()
                        .iter()
                        .position(|v| (v * 255.0 - (v * 255.0).round()).abs() > 1e-9)
                    {
                        return Err(Error::IncompatibleTarget(format!(
                            "pixel {index} is not a multiple of 1/255"
                        )));
                    }
                }
                TargetMode::Binary => {
                    if let Some(index) = frame.values().iter().position(|&v| v != 0.0 && v != 1.0) {
                        let value = (frame.values()[index] * 255.0).round() as u8;
                        return Err(Error::NotBinary { index, value });
                    }
                }
            }
        }
        Ok(Self { mode, frames })
    }

    pub fn single(mode: TargetMode, frame: PixelMatrix) -> Result<Self> {
        Self::new(mode, vec![frame])
    }

    pub fn mode(&self) -> TargetMode {
        self.mode
    }

    /// The first (or only) frame.
    pub fn matrix(&self) -> &PixelMatrix {
        &self.frames[0]
    }

    pub fn frames(&self) -> &[PixelMatrix] {
        &self.frames
    }

    pub fn height(&self) -> usize {
        self.frames[0].height()
    }

    pub fn width(&self) -> usize {
        self.frames[0].width()
    }

    pub fn dimension(&self) -> usize {
        self.frames[0].len()
    }
}

/// Loads a PNG or GIF target. Every frame of a GIF becomes one frame of the
/// target; color pixels are reduced with Rec. 601 luma weights.
pub fn load_target(path: impl AsRef<Path>, mode: TargetMode) -> Result<TargetImage> {
    let path = path.as_ref();
    let reader = ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?;

    let frames = match reader.format() {
        Some(ImageFormat::Gif) => load_gif_frames(path)?,
        Some(ImageFormat::Png) => {
            let image = reader.decode().map_err(|e| Error::Decode {
                path: path.into(),
                reason: e.to_string(),
            })?;
            vec![gray_bytes(path, image)?]
        }
        other => {
            return Err(Error::UnsupportedFormat {
                path: path.into(),
                reason: format!("expected PNG or GIF, found {other:?}"),
            })
        }
    };

    let mut matrices = Vec::with_capacity(frames.len());
    for (height, width, bytes) in frames {
        if mode == TargetMode::Binary {
            if let Some(index) = bytes.iter().position(|&b| b != 0 && b != 255) {
                return Err(Error::NotBinary {
                    index,
                    value: bytes[index],
                });
            }
        }
        let values = bytes.iter().map(|&b| f64::from(b) / 255.0).collect();
        matrices.push(PixelMatrix::from_row_major(height as usize, width as usize, values)?);
    }
    TargetImage::new(mode, matrices)
}

type GrayFrame = (u32, u32, Vec<u8>);

fn gray_bytes(path: &Path, image: DynamicImage) -> Result<GrayFrame> {
    let (w, h) = (image.width(), image.height());
    let bytes = match image {
        DynamicImage::ImageLuma8(buf) => buf.into_raw(),
        DynamicImage::ImageLumaA8(buf) => buf.pixels().map(|p| p.0[0]).collect(),
        DynamicImage::ImageRgb8(buf) => buf.pixels().map(|p| luma(p.0[0], p.0[1], p.0[2])).collect(),
        DynamicImage::ImageRgba8(buf) => buf.pixels().map(|p| luma(p.0[0], p.0[1], p.0[2])).collect(),
        other => {
            return Err(Error::UnsupportedFormat {
                path: path.into(),
                reason: format!("unsupported bit depth or color type {:?}", other.color()),
            })
        }
    };
    Ok((h, w, bytes))
}

fn load_gif_frames(path: &Path) -> Result<Vec<GrayFrame>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let decode_err = |e: image::ImageError| Error::Decode {
        path: path.into(),
        reason: e.to_string(),
    };
    let decoder = GifDecoder::new(BufReader::new(file)).map_err(decode_err)?;
    let frames = decoder.into_frames().collect_frames().map_err(decode_err)?;
    Ok(frames
        .into_iter()
        .map(|frame| {
            let buf = frame.into_buffer();
            let (w, h) = buf.dimensions();
            let bytes = buf.pixels().map(|p| luma(p.0[0], p.0[1], p.0[2])).collect();
            (h, w, bytes)
        })
        .collect())
}

/// Rec. 601 luma, rounded half up. Gray pixels pass through unchanged.
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    if r == g && g == b {
        return r;
    }
    let y = 0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b);
    (y + 0.5).floor().min(255.0) as u8
}

/// Reshapes a decision vector into an `h x w` image: `A[i][j] = s[j*h + i]`.
pub fn vector_to_matrix(s: &[f64], height: usize, width: usize) -> Result<PixelMatrix> {
    check_len(height * width, s.len())?;
    let mut values = vec![0.0; s.len()];
    for j in 0..width {
        for i in 0..height {
            values[i * width + j] = s[j * height + i];
        }
    }
    PixelMatrix::from_row_major(height, width, values)
}

/// Column-major flattening of a matrix; the inverse of [`vector_to_matrix`].
pub fn matrix_to_vector(a: &PixelMatrix) -> Vec<f64> {
    column_major(a.values(), a.height(), a.width())
}

/// Reorders a row-major buffer into column-major order.
pub(crate) fn column_major<T: Copy>(row_major: &[T], height: usize, width: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(row_major.len());
    for j in 0..width {
        for i in 0..height {
            out.push(row_major[i * width + j]);
        }
    }
    out
}

/// Reorders a column-major buffer into row-major order.
pub(crate) fn row_major<T: Copy>(column_major: &[T], height: usize, width: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(column_major.len());
    for i in 0..height {
        for j in 0..width {
            out.push(column_major[j * height + i]);
        }
    }
    out
}

/// Rounds a unit intensity to a byte, ties going up.
pub fn quantize_value(v: f64) -> Result<u8> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::OutOfRange {
            index: 0,
            value: v,
            lower: 0.0,
            upper: 1.0,
        });
    }
    Ok((v * 255.0 + 0.5).floor() as u8)
}

/// Row-major 8-bit quantization of a matrix. Values outside `[0, 1]` are rejected.
pub fn quantize_8bit(a: &PixelMatrix) -> Result<Vec<u8>> {
    a.values()
        .iter()
        .enumerate()
        .map(|(index, &v)| {
            quantize_value(v).map_err(|_| Error::OutOfRange {
                index,
                value: v,
                lower: 0.0,
                upper: 1.0,
            })
        })
        .collect()
}

/// An 8-bit RGB image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbRaster {
    pub height: usize,
    pub width: usize,
    pub pixels: Vec<[u8; 3]>,
}

impl RgbRaster {
    pub fn new(height: usize, width: usize, fill: [u8; 3]) -> Self {
        Self {
            height,
            width,
            pixels: vec![fill; height * width],
        }
    }

    pub fn from_gray(a: &PixelMatrix) -> Result<Self> {
        let bytes = quantize_8bit(a)?;
        Ok(Self {
            height: a.height(),
            width: a.width(),
            pixels: bytes.into_iter().map(|b| [b, b, b]).collect(),
        })
    }

    pub fn get(&self, row: usize, col: usize) -> [u8; 3] {
        self.pixels[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, color: [u8; 3]) {
        self.pixels[row * self.width + col] = color;
    }
}

pub fn write_gray_png(a: &PixelMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = quantize_8bit(a)?;
    image::save_buffer_with_format(
        path,
        &bytes,
        a.width() as u32,
        a.height() as u32,
        image::ExtendedColorType::L8,
        ImageFormat::Png,
    )
    .map_err(|e| encode_err(path, e))
}

pub fn write_rgb_png(img: &RgbRaster, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes: Vec<u8> = img.pixels.iter().flatten().copied().collect();
    image::save_buffer_with_format(
        path,
        &bytes,
        img.width as u32,
        img.height as u32,
        image::ExtendedColorType::Rgb8,
        ImageFormat::Png,
    )
    .map_err(|e| encode_err(path, e))
}

pub(crate) fn encode_err(path: &Path, e: image::ImageError) -> Error {
    match e {
        image::ImageError::IoError(source) => Error::io(path, source),
        other => Error::Encode {
            path: path.into(),
            reason: other.to_string(),
        },
    }
}
