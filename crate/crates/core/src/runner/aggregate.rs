//! Multi-seed suites and their aggregation.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{ConfigIssue, Error, Result};
use crate::raster::{load_target, write_gray_png, PixelMatrix};
use crate::schemes::{average_image, build_problem, ProblemOptions, ProblemSpec};

use super::config::RunConfig;
use super::experiment::{run_experiment, Manifest};

/// Gap in pixels between montage tiles.
pub const MONTAGE_GAP: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSummary {
    pub iterations: Vec<usize>,
    pub files: Vec<PathBuf>,
    pub summary_csv: PathBuf,
}

/// Horizontal strip of equally sized images separated by white gaps.
pub fn montage(images: &[PixelMatrix]) -> Result<PixelMatrix> {
    let first = images.first().ok_or(Error::Empty("montage images"))?;
    let (h, w) = (first.height(), first.width());
    let total = images.len() * w + (images.len() - 1) * MONTAGE_GAP;
    let mut values = vec![1.0; h * total];
    for (k, img) in images.iter().enumerate() {
        if !img.same_shape(first) {
            return Err(Error::DimensionMismatch {
                expected: first.len(),
                found: img.len(),
            });
        }
        let offset = k * (w + MONTAGE_GAP);
        for i in 0..h {
            for j in 0..w {
                values[i * total + offset + j] = img.get(i, j);
            }
        }
    }
    PixelMatrix::from_row_major(h, total, values)
}

fn problem_for(config: &RunConfig) -> Result<ProblemSpec> {
    let target = load_target(&config.target, config.target_mode())?;
    build_problem(
        config.scheme,
        &target,
        config.metric,
        ProblemOptions {
            psnr_range: config.psnr_range,
            encoding: config.encoding(),
        },
    )
}

/// For each sample iteration writes a montage of the per-run best images
/// and their per-pixel average, plus `summary.csv` with every run's best
/// fitness. `samples = None` uses the iterations recorded by all runs.
pub fn aggregate_runs(manifests: &[Manifest], samples: Option<&[usize]>, out: &Path) -> Result<AggregateSummary> {
    let first = manifests.first().ok_or(Error::Empty("manifests"))?;
    let reference = first.config.with_seed(0);
    let mut issues = Vec::new();
    for m in manifests {
        if m.config.with_seed(0) != reference {
            issues.push(ConfigIssue::new(
                "config",
                format!("run with seed {} differs from the first run beyond its seed", m.seed),
            ));
        }
    }
    if !issues.is_empty() {
        return Err(Error::Config(issues));
    }

    let iterations: Vec<usize> = match samples {
        Some(s) => s.to_vec(),
        None => first
            .frames
            .iter()
            .map(|f| f.iteration)
            .filter(|&it| manifests.iter().all(|m| m.frame(it).is_some()))
            .collect(),
    };
    let problem = problem_for(&first.config)?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;

    let mut files = Vec::new();
    let mut csv = String::from("seed,iteration,best_fitness\n");
    for &it in &iterations {
        let mut images = Vec::with_capacity(manifests.len());
        let mut pixels = Vec::with_capacity(manifests.len());
        for m in manifests {
            let frame = m
                .frame(it)
                .ok_or_else(|| Error::config("samples", format!("iteration {it} missing from run with seed {}", m.seed)))?;
            let px = problem.pixels(&frame.solution)?;
            images.push(crate::raster::vector_to_matrix(&px, problem.height(), problem.width())?);
            pixels.push(px);
            let _ = writeln!(csv, "{},{},{}", m.seed, it, frame.best_fitness[0]);
        }
        let strip = out.join(format!("montage_{it:06}.png"));
        write_gray_png(&montage(&images)?, &strip)?;
        let avg = out.join(format!("average_{it:06}.png"));
        write_gray_png(&average_image(&pixels, problem.height(), problem.width())?, &avg)?;
        files.push(strip);
        files.push(avg);
    }
    let summary_csv = out.join("summary.csv");
    std::fs::write(&summary_csv, csv).map_err(|e| Error::io(&summary_csv, e))?;
    Ok(AggregateSummary {
        iterations,
        files,
        summary_csv,
    })
}

/// Runs one experiment per seed, concurrently, each in `seed_<n>` under the
/// configured output directory, then aggregates them into `aggregate`.
pub fn run_suite(config: &RunConfig, seeds: &[u64]) -> Result<(Vec<Manifest>, AggregateSummary)> {
    if seeds.is_empty() {
        return Err(Error::Empty("seeds"));
    }
    let root = config.output_dir();
    let configs: Vec<RunConfig> = seeds
        .iter()
        .map(|&s| {
            let mut c = config.with_seed(s);
            c.output = root.join(format!("seed_{s}"));
            c
        })
        .collect();
    let results: Vec<Result<Manifest>> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs.iter().map(|c| scope.spawn(move || run_experiment(c))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|p| std::panic::resume_unwind(p)))
            .collect()
    });
    let manifests = results.into_iter().collect::<Result<Vec<_>>>()?;
    // per-seed output directories differ by construction; compare the rest
    let normalized: Vec<Manifest> = manifests
        .iter()
        .map(|m| {
            let mut m = m.clone();
            m.config.output = config.output.clone();
            m
        })
        .collect();
    let summary = aggregate_runs(&normalized, None, &root.join("aggregate"))?;
    Ok((manifests, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn montage_layout() {
        let a = PixelMatrix::filled(2, 2, 0.0).unwrap();
        let m = montage(&[a.clone(), a]).unwrap();
        assert_eq!(m.width(), 4 + MONTAGE_GAP);
        assert_eq!(m.get(0, 2), 1.0);
        assert_eq!(m.get(1, 5), 0.0);
    }
}
