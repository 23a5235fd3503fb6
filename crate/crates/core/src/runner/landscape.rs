//! Two-pixel fitness landscapes.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::{MetricContext, MetricId};
use crate::raster::{check_unit_range, write_rgb_png, RgbRaster};

/// Raw metric values over a square grid of two-pixel candidates.
/// `values[r][c]` holds the metric at `x1 = c / (n - 1)`, `x2 = r / (n - 1)`.
/// Cells where the metric is undefined hold NaN; exact PSNR matches hold +inf.
#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeGrid {
    pub metric: MetricId,
    pub target: (f64, f64),
    pub resolution: usize,
    pub values: Vec<Vec<f64>>,
}

impl LandscapeGrid {
    pub fn coordinate(&self, index: usize) -> f64 {
        index as f64 / (self.resolution - 1) as f64
    }

    /// Cell `(row, col)` holding the smallest finite value, first in row-major order.
    pub fn argmin(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for (r, row) in self.values.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if v.is_finite() && best.is_none_or(|(_, _, b)| v < b) {
                    best = Some((r, c, v));
                }
            }
        }
        best.map(|(r, c, _)| (r, c))
    }

    /// Long-format CSV with columns `x1,x2,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x1,x2,value\n");
        for (r, row) in self.values.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let _ = writeln!(s, "{},{},{}", self.coordinate(c), self.coordinate(r), v);
            }
        }
        s
    }

    /// Heat image with `x2` increasing upward: white at the lowest finite
    /// value, red at the highest, gray where undefined.
    pub fn render(&self) -> RgbRaster {
        let finite = self.values.iter().flatten().copied().filter(|v| v.is_finite());
        let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        let n = self.resolution;
        let mut img = RgbRaster::new(n, n, [128, 128, 128]);
        for (r, row) in self.values.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                let color = if v.is_finite() {
                    let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
                    let g = (255.0 * (1.0 - t) + 0.5).floor() as u8;
                    [255, g, g]
                } else if v == f64::INFINITY {
                    [255, 0, 0]
                } else if v == f64::NEG_INFINITY {
                    [255, 255, 255]
                } else {
                    [128, 128, 128]
                };
                img.set(n - 1 - r, c, color);
            }
        }
        img
    }

    /// Writes `<stem>.csv` and `<stem>.png` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>, stem: &str) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let csv = dir.join(format!("{stem}.csv"));
        std::fs::write(&csv, self.to_csv()).map_err(|e| Error::io(&csv, e))?;
        write_rgb_png(&self.render(), dir.join(format!("{stem}.png")))
    }
}

pub fn landscape_grid(metric: MetricId, target: (f64, f64), resolution: usize) -> Result<LandscapeGrid> {
    if resolution < 2 {
        return Err(Error::InvalidParameter {
            name: "resolution",
            reason: format!("{resolution} is below 2"),
        });
    }
    let t = [target.0, target.1];
    check_unit_range(&t)?;
    let ctx = MetricContext::default();
    let step = |i: usize| i as f64 / (resolution - 1) as f64;
    let values = (0..resolution)
        .map(|r| {
            (0..resolution)
                .map(|c| match metric.raw(&[step(c), step(r)], &t, &ctx) {
                    Ok(v) => v,
                    Err(Error::IdenticalImages) => f64::INFINITY,
                    Err(_) => f64::NAN,
                })
                .collect()
        })
        .collect();
    Ok(LandscapeGrid {
        metric,
        target: (target.0, target.1),
        resolution,
        values,
    })
}
