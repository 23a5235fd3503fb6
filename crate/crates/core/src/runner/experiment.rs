//! Single seeded experiments: logging, frame emission and the manifest.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mapping::{constrained_pixels, render_violation_border};
use crate::raster::{load_target, write_gray_png, write_rgb_png, PixelMatrix};
use crate::schemes::{build_problem, ProblemOptions, ProblemSpec};

use super::config::RunConfig;
use super::gif::write_gif;
use super::session::{BestSnapshot, Engine, EngineSettings, RunRecord, Session};

pub const LOG_FILE: &str = "log.csv";
pub const TIMELINE_FILE: &str = "timeline.gif";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Images written for one sampled iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameEntry {
    pub iteration: usize,
    pub env_index: usize,
    pub best_fitness: Vec<f64>,
    pub violation_sum: f64,
    pub files: Vec<String>,
    pub solution: Vec<f64>,
    pub solution_2: Option<Vec<f64>>,
    /// Multi-objective runs: size of the first front.
    pub front_size: Option<usize>,
}

/// Summary of a run, written last. `complete` is false when the run aborted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: RunConfig,
    pub seed: u64,
    pub height: usize,
    pub width: usize,
    pub iterations: usize,
    pub population: usize,
    pub budget: usize,
    pub evaluations: usize,
    pub reevaluations: usize,
    pub log: String,
    pub timeline: Option<String>,
    pub frames: Vec<FrameEntry>,
    pub best: Option<BestSnapshot>,
    pub duration_seconds: f64,
    pub complete: bool,
    pub error: Option<String>,
}

impl Manifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Decode {
            path: path.into(),
            reason: e.to_string(),
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Encode {
            path: path.into(),
            reason: e.to_string(),
        })?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn frame(&self, iteration: usize) -> Option<&FrameEntry> {
        self.frames.iter().find(|f| f.iteration == iteration)
    }
}

/// Default sampling: 1, 2, 5, 10, 20, 50, ... below `iterations`, plus the
/// final iteration.
pub fn default_frames(iterations: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut decade = 1usize;
    'outer: loop {
        for m in [1, 2, 5] {
            let it = m * decade;
            if it >= iterations {
                break 'outer;
            }
            out.push(it);
        }
        decade = match decade.checked_mul(10) {
            Some(d) => d,
            None => break,
        };
    }
    out.push(iterations - 1);
    out.dedup();
    out
}

/// Sorted, deduplicated emission iterations for a run.
pub fn frame_schedule(requested: Option<&[usize]>, iterations: usize) -> Vec<usize> {
    let mut frames = match requested {
        Some(list) => list.iter().copied().filter(|&i| i < iterations).collect(),
        None => default_frames(iterations),
    };
    frames.push(iterations - 1);
    frames.sort_unstable();
    frames.dedup();
    frames
}

/// Loads the target, builds the problem and runs it.
pub fn run_experiment(config: &RunConfig) -> Result<Manifest> {
    config.validate()?;
    let target = load_target(&config.target, config.target_mode())?;
    let problem = build_problem(
        config.scheme,
        &target,
        config.metric,
        ProblemOptions {
            psnr_range: config.psnr_range,
            encoding: config.encoding(),
        },
    )?;
    let mut echo = config.clone();
    if let Ok(abs) = std::fs::canonicalize(&config.target) {
        echo.target = abs;
    }
    run_problem(&echo, &problem, &config.output_dir())
}

/// Runs `problem` with the optimizer settings of `config`, writing every
/// artifact into `out`. On failure a manifest marked incomplete is still
/// written when possible.
pub fn run_problem(config: &RunConfig, problem: &ProblemSpec, out: &Path) -> Result<Manifest> {
    let started = Instant::now();
    let iterations = config.iteration_count(problem.dimension());
    if iterations == 0 {
        return Err(Error::config("optimizer.budget", "leaves no iterations"));
    }
    let mut manifest = Manifest {
        config: config.clone(),
        seed: config.seed,
        height: problem.height(),
        width: problem.width(),
        iterations,
        population: config.population,
        budget: iterations * config.population,
        evaluations: 0,
        reevaluations: 0,
        log: LOG_FILE.into(),
        timeline: None,
        frames: Vec::new(),
        best: None,
        duration_seconds: 0.0,
        complete: false,
        error: None,
    };
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let result = execute(config, problem, out, iterations, &mut manifest);
    manifest.duration_seconds = started.elapsed().as_secs_f64();
    match result {
        Ok(()) => {
            manifest.complete = true;
            manifest.save(out.join(MANIFEST_FILE))?;
            Ok(manifest)
        }
        Err(e) => {
            manifest.error = Some(e.to_string());
            let _ = manifest.save(out.join(MANIFEST_FILE));
            Err(e)
        }
    }
}

fn execute(config: &RunConfig, problem: &ProblemSpec, out: &Path, iterations: usize, manifest: &mut Manifest) -> Result<()> {
    let frames = frame_schedule(config.frames.as_deref(), iterations);
    let log_path = out.join(LOG_FILE);
    let file = File::create(&log_path).map_err(|e| Error::io(&log_path, e))?;
    let mut log = BufWriter::new(file);
    let io = |e| Error::io(&log_path, e);
    writeln!(log, "{}", RunRecord::csv_header(problem.is_multi_objective())).map_err(io)?;

    let settings = EngineSettings::from(config);
    let mut session = Session::start(problem, &settings, iterations, config.seed)?;
    let mut timeline = Vec::with_capacity(frames.len());
    let mut next_frame = frames.iter().copied().peekable();
    loop {
        let record = session.last_record().clone();
        writeln!(log, "{}", record.csv_row()).map_err(io)?;
        if next_frame.peek() == Some(&record.iteration) {
            next_frame.next();
            let best = session.engine().best();
            let (files, image) = emit_frame(problem, &best, record.env_index, record.iteration, out)?;
            timeline.push(image);
            manifest.frames.push(FrameEntry {
                iteration: record.iteration,
                env_index: record.env_index,
                best_fitness: best.fitness.clone(),
                violation_sum: best.violation,
                files,
                solution: best.solution,
                solution_2: best.solution_2,
                front_size: front_size(session.engine()),
            });
        }
        if session.is_finished() {
            break;
        }
        session.advance()?;
    }
    log.flush().map_err(io)?;

    manifest.evaluations = session.evaluations();
    manifest.reevaluations = session.reevaluations();
    manifest.best = Some(session.engine().best());
    write_gif(&timeline, config.gif_delay, out.join(TIMELINE_FILE))?;
    manifest.timeline = Some(TIMELINE_FILE.into());
    Ok(())
}

fn front_size(engine: &Engine) -> Option<usize> {
    match engine {
        Engine::Gde3(pop) => Some(pop.front_size()),
        _ => None,
    }
}

/// Writes the mapped best image, its heatmap, and depending on the scheme
/// the violation border or the second extreme. Returns the file names and
/// the grayscale image used for the timeline.
pub fn emit_frame(
    problem: &ProblemSpec,
    best: &BestSnapshot,
    env: usize,
    iteration: usize,
    dir: &Path,
) -> Result<(Vec<String>, PixelMatrix)> {
    let mut files = Vec::new();
    let mut save_gray = |name: String, img: &PixelMatrix| -> Result<()> {
        write_gray_png(img, dir.join(&name))?;
        files.push(name);
        Ok(())
    };
    let image = problem.render(&best.solution)?;
    save_gray(format!("best_{iteration:06}.png"), &image)?;
    if let Some(second) = &best.solution_2 {
        save_gray(format!("best2_{iteration:06}.png"), &problem.render(second)?)?;
    }
    let heat = format!("heatmap_{iteration:06}.png");
    write_rgb_png(&problem.heatmap(&best.solution, env)?, dir.join(&heat))?;
    files.push(heat);
    if problem.is_constrained() {
        let (f, s) = (&problem.feasible, &problem.search);
        let pixels = constrained_pixels(
            &best.solution,
            &f.lower,
            &f.upper,
            &s.lower,
            &s.upper,
            problem.height(),
            problem.width(),
        )?;
        let bordered = render_violation_border(&pixels, best.violation, problem.violation_saturation());
        let name = format!("border_{iteration:06}.png");
        write_rgb_png(&bordered, dir.join(&name))?;
        files.push(name);
    }
    Ok((files, image))
}

/// Re-renders every frame stored in a manifest into `out`.
pub fn inspect(manifest_path: impl AsRef<Path>, out: Option<&Path>) -> Result<Vec<PathBuf>> {
    let manifest_path = manifest_path.as_ref();
    let manifest = Manifest::load(manifest_path)?;
    let config = &manifest.config;
    let target = load_target(&config.target, config.target_mode())?;
    let problem = build_problem(
        config.scheme,
        &target,
        config.metric,
        ProblemOptions {
            psnr_range: config.psnr_range,
            encoding: config.encoding(),
        },
    )?;
    let dir = match out {
        Some(d) => d.to_path_buf(),
        None => manifest_path.parent().unwrap_or_else(|| Path::new(".")).join("inspect"),
    };
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut written = Vec::new();
    for frame in &manifest.frames {
        let best = BestSnapshot {
            solution: frame.solution.clone(),
            fitness: frame.best_fitness.clone(),
            violation: frame.violation_sum,
            solution_2: frame.solution_2.clone(),
        };
        let (files, _) = emit_frame(&problem, &best, frame.env_index, frame.iteration, &dir)?;
        written.extend(files.into_iter().map(|f| dir.join(f)));
    }
    Ok(written)
}
