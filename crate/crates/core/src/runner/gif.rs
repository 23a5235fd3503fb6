//! Animated grayscale GIF timelines.

use std::borrow::Cow;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use gif::{Encoder, Frame, Repeat};

use crate::error::{Error, Result};
use crate::raster::{load_target, quantize_8bit, PixelMatrix, TargetMode};

fn gray_palette() -> Vec<u8> {
    (0..=255u8).flat_map(|v| [v, v, v]).collect()
}

/// Writes `frames` as a looping GIF with a constant delay (centiseconds).
/// Gray levels map to palette indices one-to-one, so 8-bit frames survive
/// a round trip exactly.
pub fn write_gif(frames: &[PixelMatrix], delay: u16, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let first = frames.first().ok_or(Error::Empty("gif frames"))?;
    for f in frames {
        if !f.same_shape(first) {
            return Err(Error::DimensionMismatch {
                expected: first.len(),
                found: f.len(),
            });
        }
    }
    let (w, h) = (first.width(), first.height());
    let (w16, h16) = match (u16::try_from(w), u16::try_from(h)) {
        (Ok(w), Ok(h)) => (w, h),
        _ => {
            return Err(Error::Encode {
                path: path.into(),
                reason: format!("{w}x{h} exceeds the GIF size limit"),
            })
        }
    };
    let encode_err = |e: gif::EncodingError| match e {
        gif::EncodingError::Io(e) => Error::io(path, e),
        other => Error::Encode {
            path: path.into(),
            reason: other.to_string(),
        },
    };
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut encoder = Encoder::new(BufWriter::new(file), w16, h16, &gray_palette()).map_err(encode_err)?;
    encoder.set_repeat(Repeat::Infinite).map_err(encode_err)?;
    for f in frames {
        let indices = quantize_8bit(f)?;
        let frame = Frame {
            width: w16,
            height: h16,
            delay,
            buffer: Cow::Owned(indices),
            ..Frame::default()
        };
        encoder.write_frame(&frame).map_err(encode_err)?;
    }
    let mut writer = encoder.into_inner().map_err(encode_err)?;
    std::io::Write::flush(&mut writer).map_err(|e| Error::io(path, e))
}

/// Assembles PNG files, in order, into a GIF.
pub fn write_gif_from_pngs<P: AsRef<Path>>(pngs: &[P], delay: u16, path: impl AsRef<Path>) -> Result<()> {
    let frames = pngs
        .iter()
        .map(|p| load_target(p, TargetMode::Continuous).map(|t| t.matrix().clone()))
        .collect::<Result<Vec<_>>>()?;
    write_gif(&frames, delay, path)
}
