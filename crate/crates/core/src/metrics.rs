//! Image comparison metrics used as fitness functions.
//!
//! All metrics operate on flattened pixel buffers of equal length; the global
//! statistics involved do not depend on the 2D arrangement. Minimization
//! orientation is applied separately by [`MetricId::orient`].

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Sum of absolute differences.
pub fn sae(a: &[f64], b: &[f64]) -> Result<f64> {
    check_len(a.len(), b.len())?;
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum())
}

/// Mean of squared differences.
pub fn mse(a: &[f64], b: &[f64]) -> Result<f64> {
    check_len(a.len(), b.len())?;
    if a.is_empty() {
        return Err(Error::Empty("image"));
    }
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(sum / a.len() as f64)
}

/// Peak signal-to-noise ratio for a pixel range `range` (1 for continuous
/// images, 255 for 8-bit ones). Identical images have no finite PSNR.
pub fn psnr(a: &[f64], b: &[f64], range: f64) -> Result<f64> {
    let err = mse(a, b)?;
    if err == 0.0 {
        return Err(Error::IdenticalImages);
    }
    Ok(10.0 * (range * range / err).log10())
}

/// Pearson correlation over all pixels.
pub fn pcc(a: &[f64], b: &[f64]) -> Result<f64> {
    check_len(a.len(), b.len())?;
    if a.is_empty() {
        return Err(Error::Empty("image"));
    }
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let (mut cov, mut var_a, mut var_b) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - mean_a, y - mean_b);
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    let denom = (var_a * var_b).sqrt();
    if denom == 0.0 {
        return Err(Error::ConstantImage);
    }
    Ok(cov / denom)
}

/// Stabilizing constants for SSIM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsimConstants {
    pub k1: f64,
    pub k2: f64,
    /// Dynamic range of the pixel values.
    pub range: f64,
}

impl SsimConstants {
    pub fn with_range(range: f64) -> Self {
        Self {
            k1: 0.01,
            k2: 0.03,
            range,
        }
    }

    pub fn c1(&self) -> f64 {
        (self.k1 * self.range).powi(2)
    }

    pub fn c2(&self) -> f64 {
        (self.k2 * self.range).powi(2)
    }

    pub fn c3(&self) -> f64 {
        self.c2() / 2.0
    }
}

impl Default for SsimConstants {
    fn default() -> Self {
        Self::with_range(1.0)
    }
}

/// Structural similarity evaluated over the whole image as one window, with
/// unit exponents and `c3 = c2 / 2`. Standard deviations and covariance use
/// population statistics.
pub fn ssim(a: &[f64], b: &[f64], consts: &SsimConstants) -> Result<f64> {
    check_len(a.len(), b.len())?;
    if a.is_empty() {
        return Err(Error::Empty("image"));
    }
    let n = a.len() as f64;
    let mu_a = a.iter().sum::<f64>() / n;
    let mu_b = b.iter().sum::<f64>() / n;
    let (mut var_a, mut var_b, mut cov) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - mu_a, y - mu_b);
        var_a += dx * dx;
        var_b += dy * dy;
        cov += dx * dy;
    }
    var_a /= n;
    var_b /= n;
    cov /= n;
    let (c1, c2) = (consts.c1(), consts.c2());
    let num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
    let den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
    Ok(num / den)
}

/// Split point of the partially-separable objective: the SAE region is
/// `[0, split)` and the SSIM region `[split, len)`.
pub fn partial_split(len: usize, p: f64) -> usize {
    ((p * len as f64).floor() as usize).min(len)
}

/// SAE over the leading `floor(p*D)` components plus `|1/SSIM|` over the rest.
/// `p = 1` is pure SAE and `p = 0` pure `|1/SSIM|`.
pub fn partial_fitness(x: &[f64], t: &[f64], p: f64, consts: &SsimConstants) -> Result<f64> {
    check_len(x.len(), t.len())?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter {
            name: "p",
            reason: format!("{p} is outside [0, 1]"),
        });
    }
    let k = partial_split(x.len(), p);
    let separable = sae(&x[..k], &t[..k])?;
    if k == x.len() {
        return Ok(separable);
    }
    let s = ssim(&x[k..], &t[k..], consts)?;
    if s == 0.0 {
        return Err(Error::ZeroSsim);
    }
    Ok(separable + (1.0 / s).abs())
}

/// Identifies a fitness metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricId {
    Sae,
    Mse,
    Psnr,
    Pcc,
    Ssim,
    /// Partially-separable composite carrying the separability level `p`.
    Partial(f64),
}

impl MetricId {
    pub fn new_partial(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(MetricId::Partial(p))
        } else {
            Err(Error::InvalidParameter {
                name: "p",
                reason: format!("{p} is outside [0, 1]"),
            })
        }
    }

    /// True when larger raw values mean more similar images.
    pub fn is_maximized(&self) -> bool {
        matches!(self, MetricId::Psnr | MetricId::Pcc | MetricId::Ssim)
    }

    /// Maps a raw metric value to minimization orientation.
    pub fn orient(&self, raw: f64) -> f64 {
        if self.is_maximized() {
            -raw
        } else {
            raw
        }
    }

    /// Raw (un-oriented) metric value.
    pub fn raw(&self, a: &[f64], b: &[f64], ctx: &MetricContext) -> Result<f64> {
        match *self {
            MetricId::Sae => sae(a, b),
            MetricId::Mse => mse(a, b),
            MetricId::Psnr => psnr(a, b, ctx.psnr_range),
            MetricId::Pcc => pcc(a, b),
            MetricId::Ssim => ssim(a, b, &ctx.ssim),
            MetricId::Partial(p) => partial_fitness(a, b, p, &ctx.ssim),
        }
    }

    /// Metric value in minimization orientation. Exact PSNR matches are
    /// assigned [`psnr_floor`] instead of an infinity.
    pub fn fitness(&self, a: &[f64], b: &[f64], ctx: &MetricContext) -> Result<f64> {
        match self.raw(a, b, ctx) {
            Ok(v) => Ok(self.orient(v)),
            Err(Error::IdenticalImages) => Ok(psnr_floor(ctx.psnr_range, a.len())),
            Err(e) => Err(e),
        }
    }

    pub fn name(&self) -> String {
        match self {
            MetricId::Sae => "sae".into(),
            MetricId::Mse => "mse".into(),
            MetricId::Psnr => "psnr".into(),
            MetricId::Pcc => "pcc".into(),
            MetricId::Ssim => "ssim".into(),
            MetricId::Partial(p) => format!("partial({p})"),
        }
    }
}

impl std::str::FromStr for MetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "sae" => Ok(MetricId::Sae),
            "mse" => Ok(MetricId::Mse),
            "psnr" => Ok(MetricId::Psnr),
            "pcc" => Ok(MetricId::Pcc),
            "ssim" => Ok(MetricId::Ssim),
            _ => {
                let p = s
                    .strip_prefix("partial(")
                    .and_then(|r| r.strip_suffix(')'))
                    .or_else(|| s.strip_prefix("partial:"))
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| Error::config("metric", format!("unknown metric `{s}`")))?;
                MetricId::new_partial(p)
            }
        }
    }
}

/// Returns the metric function in minimization orientation.
pub fn to_minimization(metric: MetricId, ctx: MetricContext) -> impl Fn(&[f64], &[f64]) -> Result<f64> {
    move |a, b| metric.fitness(a, b, &ctx)
}

/// Range parameters shared by the metrics of one problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricContext {
    pub psnr_range: f64,
    pub ssim: SsimConstants,
}

impl MetricContext {
    /// Context for pixel values on `[0, range]`.
    pub fn for_range(range: f64) -> Self {
        Self {
            psnr_range: range,
            ssim: SsimConstants::with_range(range),
        }
    }
}

impl Default for MetricContext {
    fn default() -> Self {
        Self::for_range(1.0)
    }
}

/// Fitness assigned to an exact replica under negated PSNR: 60 dB below the
/// best finite value achievable with a single-pixel unit error.
pub fn psnr_floor(range: f64, pixels: usize) -> f64 {
    -(10.0 * (range * range * pixels as f64).log10()) - 60.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sae_and_mse_hand_values() {
        assert_eq!(sae(&[0.0, 1.0], &[1.0, 0.0]).unwrap(), 2.0);
        assert_eq!(mse(&[0.0, 1.0], &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(sae(&[0.3, 0.4], &[0.3, 0.4]).unwrap(), 0.0);
        assert!(matches!(sae(&[0.0], &[0.0, 1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(mse(&[0.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn psnr_values() {
        // mse = 0.01
        let a = [0.1, 0.1];
        let b = [0.0, 0.2];
        assert!((psnr(&a, &b, 1.0).unwrap() - 20.0).abs() < 1e-12);
        assert_eq!(psnr(&[0.0, 1.0], &[1.0, 0.0], 1.0).unwrap(), 0.0);
        assert!(matches!(psnr(&a, &a, 1.0), Err(Error::IdenticalImages)));
    }

    #[test]
    fn pcc_extremes() {
        let b = [0.1, 0.5, 0.2, 0.9];
        assert!((pcc(&b, &b).unwrap() - 1.0).abs() < 1e-12);
        let a: Vec<f64> = b.iter().map(|v| 2.0 - v).collect();
        assert!((pcc(&a, &b).unwrap() + 1.0).abs() < 1e-12);
        assert!(matches!(pcc(&[0.3, 0.3], &b[..2]), Err(Error::ConstantImage)));
    }

    #[test]
    fn pcc_two_pixel_sign() {
        let target = [0.25, 0.75];
        assert!((pcc(&[0.1, 0.2], &target).unwrap() - 1.0).abs() < 1e-12);
        assert!((pcc(&[0.9, 0.2], &target).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn ssim_constants_and_extremes() {
        let c = SsimConstants::default();
        assert!((c.c1() - 1e-4).abs() < 1e-18);
        assert!((c.c2() - 9e-4).abs() < 1e-18);
        assert!((c.c3() - 4.5e-4).abs() < 1e-18);
        let zeros = [0.0; 6];
        let ones = [1.0; 6];
        let v = ssim(&zeros, &ones, &c).unwrap();
        assert!((v - 0.0001 / 1.0001).abs() < 1e-12);
        let a = [0.2, 0.4, 0.9, 0.1];
        assert!((ssim(&a, &a, &c).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_endpoints() {
        let c = SsimConstants::default();
        let x = [0.1, 0.5, 0.7, 0.2];
        let t = [0.3, 0.4, 0.9, 0.0];
        assert_eq!(partial_fitness(&x, &t, 1.0, &c).unwrap(), sae(&x, &t).unwrap());
        assert!((partial_fitness(&t, &t, 0.0, &c).unwrap() - 1.0).abs() < 1e-12);
        assert!(partial_fitness(&x, &t, 1.5, &c).is_err());
    }

    #[test]
    fn partial_half_split_is_disjoint() {
        let c = SsimConstants::default();
        let x: Vec<f64> = (0..900).map(|k| (k % 17) as f64 / 17.0).collect();
        let t: Vec<f64> = (0..900).map(|k| (k % 13) as f64 / 13.0).collect();
        assert_eq!(partial_split(900, 0.5), 450);
        let expected = sae(&x[..450], &t[..450]).unwrap() + 1.0 / ssim(&x[450..], &t[450..], &c).unwrap().abs();
        assert!((partial_fitness(&x, &t, 0.5, &c).unwrap() - expected).abs() < 1e-9);
        assert_eq!(partial_split(5, 0.5), 2);
    }

    #[test]
    fn orientation() {
        assert_eq!(MetricId::Sae.orient(5.0), 5.0);
        assert_eq!(MetricId::Pcc.orient(1.0), -1.0);
        assert_eq!(MetricId::Ssim.orient(0.3), -0.3);
        assert_eq!(MetricId::Partial(0.5).orient(2.0), 2.0);
        let f = to_minimization(MetricId::Psnr, MetricContext::default());
        let a = [0.1, 0.1];
        assert_eq!(f(&a, &a).unwrap(), psnr_floor(1.0, 2));
        assert!((f(&a, &[0.0, 0.2]).unwrap() + 20.0).abs() < 1e-12);
    }

    #[test]
    fn metric_parsing() {
        assert_eq!("SSIM".parse::<MetricId>().unwrap(), MetricId::Ssim);
        assert_eq!("partial(0.5)".parse::<MetricId>().unwrap(), MetricId::Partial(0.5));
        assert!("partial(1.5)".parse::<MetricId>().is_err());
        assert!("hamming".parse::<MetricId>().is_err());
    }
}
