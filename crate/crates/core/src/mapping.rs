//! Solution-to-image mapping functions and companion renderings.

use crate::error::{check_len, Error, Result};
use crate::raster::{check_unit_range, row_major, vector_to_matrix, PixelMatrix, RgbRaster};

/// Direct encoding: each decision variable is the intensity of its pixel.
pub fn direct_map(s: &[f64], height: usize, width: usize) -> Result<PixelMatrix> {
    check_len(height * width, s.len())?;
    check_unit_range(s)?;
    vector_to_matrix(s, height, width)
}

/// Reference data for the known-optimum linear error mapping. All vectors are
/// in decision-vector (column-major) order.
#[derive(Debug, Clone, PartialEq)]
pub struct KnownOptimumMap {
    target: PixelMatrix,
    target_vector: Vec<f64>,
    optimum: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl KnownOptimumMap {
    /// Requires `lower < optimum < upper` componentwise; an optimum on a bound
    /// would make one branch of the mapping divide by zero.
    pub fn new(target: PixelMatrix, optimum: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let d = target.len();
        check_len(d, optimum.len())?;
        check_len(d, lower.len())?;
        check_len(d, upper.len())?;
        for k in 0..d {
            if !(lower[k] < optimum[k] && optimum[k] < upper[k]) {
                return Err(Error::InvalidParameter {
                    name: "optimum",
                    reason: format!(
                        "component {k}: optimum {} must lie strictly inside ({}, {})",
                        optimum[k], lower[k], upper[k]
                    ),
                });
            }
        }
        let target_vector = crate::raster::matrix_to_vector(&target);
        Ok(Self {
            target,
            target_vector,
            optimum,
            lower,
            upper,
        })
    }

    pub fn target(&self) -> &PixelMatrix {
        &self.target
    }

    pub fn optimum(&self) -> &[f64] {
        &self.optimum
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Largest possible absolute error per dimension.
    pub fn max_error(&self) -> Vec<f64> {
        (0..self.optimum.len())
            .map(|k| (self.upper[k] - self.optimum[k]).max(self.optimum[k] - self.lower[k]))
            .collect()
    }
}

/// Linear error mapping against a known optimum. Errors above the optimum
/// lighten the target pixel towards white (reached at the upper bound),
/// errors below darken it towards black (reached at the lower bound).
pub fn linear_error_map(s: &[f64], map: &KnownOptimumMap) -> Result<PixelMatrix> {
    check_len(map.optimum.len(), s.len())?;
    let mut out = Vec::with_capacity(s.len());
    for k in 0..s.len() {
        let (l, u, o, t) = (map.lower[k], map.upper[k], map.optimum[k], map.target_vector[k]);
        if !(l..=u).contains(&s[k]) {
            return Err(Error::OutOfRange {
                index: k,
                value: s[k],
                lower: l,
                upper: u,
            });
        }
        let e = s[k] - o;
        let v = if s[k] == u {
            1.0
        } else if e > 0.0 {
            t + e / (u - o) * (1.0 - t)
        } else if e < 0.0 {
            t + e / (o - l) * t
        } else {
            t
        };
        out.push(v.clamp(0.0, 1.0));
    }
    vector_to_matrix(&out, map.target.height(), map.target.width())
}

/// White-to-red ramp for error heatmaps. `max_error` holds the largest
/// possible error per dimension (or a single value for every dimension).
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapPalette {
    max_error: Vec<f64>,
}

impl HeatmapPalette {
    pub fn uniform(max_error: f64) -> Self {
        Self {
            max_error: vec![max_error],
        }
    }

    pub fn per_dimension(max_error: Vec<f64>) -> Self {
        Self { max_error }
    }

    fn max_for(&self, k: usize) -> f64 {
        if self.max_error.len() == 1 {
            self.max_error[0]
        } else {
            self.max_error[k]
        }
    }

    /// Color for an absolute error in dimension `k`.
    pub fn color(&self, k: usize, abs_error: f64) -> [u8; 3] {
        let max = self.max_for(k);
        let r = if max > 0.0 { (abs_error / max).clamp(0.0, 1.0) } else { 0.0 };
        let g = (255.0 * (1.0 - r) + 0.5).floor() as u8;
        [255, g, g]
    }
}

/// Per-pixel error image: white where `s` matches `t`, deepening red with the
/// magnitude of the error. Inputs are decision vectors (column-major).
pub fn error_heatmap(
    s: &[f64],
    t: &[f64],
    palette: &HeatmapPalette,
    height: usize,
    width: usize,
) -> Result<RgbRaster> {
    check_len(t.len(), s.len())?;
    check_len(height * width, s.len())?;
    if palette.max_error.len() != 1 {
        check_len(s.len(), palette.max_error.len())?;
    }
    let colors: Vec<[u8; 3]> = s
        .iter()
        .zip(t)
        .enumerate()
        .map(|(k, (a, b))| palette.color(k, (a - b).abs()))
        .collect();
    Ok(RgbRaster {
        height,
        width,
        pixels: row_major(&colors, height, width),
    })
}

pub const BORDER_WIDTH: usize = 2;

/// Border color for a violation amount: green when feasible, red at or
/// beyond `v_max`, linear in between.
pub fn violation_color(violation_sum: f64, v_max: f64) -> [u8; 3] {
    let t = if v_max > 0.0 {
        (violation_sum / v_max).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let r = (255.0 * t + 0.5).floor() as u8;
    let g = (255.0 * (1.0 - t) + 0.5).floor() as u8;
    [r, g, 0]
}

/// Surrounds `img` with a two-pixel border colored by the total violation.
pub fn render_violation_border(img: &RgbRaster, violation_sum: f64, v_max: f64) -> RgbRaster {
    let color = violation_color(violation_sum, v_max);
    let mut out = RgbRaster::new(img.height + 2 * BORDER_WIDTH, img.width + 2 * BORDER_WIDTH, color);
    for i in 0..img.height {
        for j in 0..img.width {
            out.set(i + BORDER_WIDTH, j + BORDER_WIDTH, img.get(i, j));
        }
    }
    out
}

/// Grayscale rendering of a constrained solution: feasible components show
/// their intensity, components above the feasible range are tinted red and
/// components below it blue, in proportion to the violation.
pub fn constrained_pixels(
    s: &[f64],
    feasible_lower: &[f64],
    feasible_upper: &[f64],
    search_lower: &[f64],
    search_upper: &[f64],
    height: usize,
    width: usize,
) -> Result<RgbRaster> {
    check_len(height * width, s.len())?;
    let colors: Vec<[u8; 3]> = (0..s.len())
        .map(|k| {
            let (fl, fu) = (feasible_lower[k], feasible_upper[k]);
            let x = s[k];
            if x > fu {
                let span = (search_upper[k] - fu).max(f64::MIN_POSITIVE);
                let a = ((x - fu) / span).clamp(0.0, 1.0);
                let c = (255.0 * (1.0 - a) + 0.5).floor() as u8;
                [255, c, c]
            } else if x < fl {
                let span = (fl - search_lower[k]).max(f64::MIN_POSITIVE);
                let a = ((fl - x) / span).clamp(0.0, 1.0);
                let c = (255.0 * (1.0 - a) + 0.5).floor() as u8;
                [c, c, 255]
            } else {
                let v = ((x - fl) / (fu - fl)).clamp(0.0, 1.0);
                let b = (255.0 * v + 0.5).floor() as u8;
                [b, b, b]
            }
        })
        .collect();
    Ok(RgbRaster {
        height,
        width,
        pixels: row_major(&colors, height, width),
    })
}
