//! Analytic benchmark functions with known optima, used with the linear
//! error mapping.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinate of the Styblinski-Tang reference optimum.
pub const STYBLINSKI_TANG_OPTIMUM: f64 = -2.90354;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Benchmark {
    Qing,
    Rastrigin,
    Rosenbrock,
    Salomon,
    Spherical,
    StyblinskiTang,
    Wavy,
}

impl Benchmark {
    pub const ALL: [Benchmark; 7] = [
        Benchmark::Qing,
        Benchmark::Rastrigin,
        Benchmark::Rosenbrock,
        Benchmark::Salomon,
        Benchmark::Spherical,
        Benchmark::StyblinskiTang,
        Benchmark::Wavy,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Benchmark::Qing => "qing",
            Benchmark::Rastrigin => "rastrigin",
            Benchmark::Rosenbrock => "rosenbrock",
            Benchmark::Salomon => "salomon",
            Benchmark::Spherical => "spherical",
            Benchmark::StyblinskiTang => "styblinski-tang",
            Benchmark::Wavy => "wavy",
        }
    }

    /// Per-dimension search domain `[lower, upper]`.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Benchmark::Qing => (-500.0, 500.0),
            Benchmark::Rastrigin => (-5.12, 5.12),
            Benchmark::Rosenbrock => (-30.0, 30.0),
            Benchmark::Salomon => (-100.0, 100.0),
            Benchmark::Spherical => (-5.12, 5.12),
            Benchmark::StyblinskiTang => (-5.0, 5.0),
            Benchmark::Wavy => (-PI, PI),
        }
    }

    /// Reference optimum replicated to `d` dimensions. For Qing this is the
    /// tabulated origin, not the analytic minimizer `±sqrt(k+1)`.
    pub fn reference_optimum(&self, d: usize) -> Vec<f64> {
        let v = match self {
            Benchmark::Rosenbrock => 1.0,
            Benchmark::StyblinskiTang => STYBLINSKI_TANG_OPTIMUM,
            _ => 0.0,
        };
        vec![v; d]
    }

    /// Function value without a domain check.
    pub fn value(&self, x: &[f64]) -> f64 {
        let d = x.len() as f64;
        match self {
            Benchmark::Spherical => x.iter().map(|v| v * v).sum(),
            Benchmark::Rastrigin => {
                10.0 * d
                    + x.iter()
                        .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
                        .sum::<f64>()
            }
            Benchmark::Rosenbrock => x
                .windows(2)
                .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
                .sum(),
            Benchmark::Salomon => {
                let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                1.0 - (2.0 * PI * norm).cos() + 0.1 * norm
            }
            Benchmark::StyblinskiTang => {
                0.5 * x
                    .iter()
                    .map(|v| v.powi(4) - 16.0 * v * v + 5.0 * v)
                    .sum::<f64>()
            }
            Benchmark::Qing => x
                .iter()
                .enumerate()
                .map(|(k, v)| (v * v - (k + 1) as f64).powi(2))
                .sum(),
            Benchmark::Wavy => {
                if x.is_empty() {
                    return 0.0;
                }
                1.0 - x
                    .iter()
                    .map(|v| (10.0 * v).cos() * (-v * v / 2.0).exp())
                    .sum::<f64>()
                    / d
            }
        }
    }

    /// Evaluates `x`, rejecting points outside the domain.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let (lower, upper) = self.domain();
        crate::raster::check_range(x, lower, upper)?;
        Ok(self.value(x))
    }
}

impl std::fmt::Display for Benchmark {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        match key.as_str() {
            "qing" => Ok(Benchmark::Qing),
            "rastrigin" => Ok(Benchmark::Rastrigin),
            "rosenbrock" => Ok(Benchmark::Rosenbrock),
            "salomon" => Ok(Benchmark::Salomon),
            "spherical" | "sphere" => Ok(Benchmark::Spherical),
            "styblinskitang" => Ok(Benchmark::StyblinskiTang),
            "wavy" => Ok(Benchmark::Wavy),
            _ => Err(Error::config("scheme.benchmark", format!("unknown benchmark `{s}`"))),
        }
    }
}

/// Checked evaluation by name.
pub fn eval_benchmark(name: Benchmark, x: &[f64]) -> Result<f64> {
    name.evaluate(x)
}

pub fn reference_optimum(name: Benchmark, d: usize) -> Vec<f64> {
    name.reference_optimum(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spherical_anchors() {
        let twos = vec![2.0; 65536];
        assert_eq!(Benchmark::Spherical.evaluate(&twos).unwrap(), 262144.0);
        assert_eq!(Benchmark::Spherical.evaluate(&vec![0.0; 65536]).unwrap(), 0.0);
    }

    #[test]
    fn rosenbrock_at_ones() {
        assert_eq!(Benchmark::Rosenbrock.evaluate(&[1.0; 10]).unwrap(), 0.0);
    }

    #[test]
    fn optima_from_table() {
        assert_eq!(Benchmark::Rastrigin.reference_optimum(900), vec![0.0; 900]);
        assert_eq!(Benchmark::Rosenbrock.reference_optimum(4), vec![1.0; 4]);
        assert_eq!(Benchmark::StyblinskiTang.reference_optimum(2), vec![-2.90354; 2]);
    }

    #[test]
    fn out_of_domain_rejected() {
        assert!(Benchmark::Rastrigin.evaluate(&[5.2]).is_err());
        assert!(Benchmark::Wavy.evaluate(&[PI]).is_ok());
    }

    #[test]
    fn names_round_trip() {
        for b in Benchmark::ALL {
            assert_eq!(b.name().parse::<Benchmark>().unwrap(), b);
        }
        assert_eq!("Styblinski-Tang".parse::<Benchmark>().unwrap(), Benchmark::StyblinskiTang);
    }
}
