//! C ABI for imgviz.
//!
//! Every function returns an [`ImgvizStatus`]. On failure a message is kept
//! per thread and can be read with [`imgviz_last_error_message`]. Handles
//! returned through out-pointers are owned by the caller and released with
//! the matching `_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use imgviz::benchmarks::Benchmark;
use imgviz::metrics::{partial_fitness, MetricContext, MetricId, SsimConstants};
use imgviz::optimizers::adapters::{rpi_decode, rpi_encode};
use imgviz::optimizers::{crowding_distance, dominates};
use imgviz::raster::vector_to_matrix;
use imgviz::runner::{landscape_grid, run_experiment, Manifest, RunConfig};
use imgviz::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImgvizStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    OutOfRange = 4,
    /// The metric is undefined for the inputs (identical or constant images).
    Undefined = 5,
    Config = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImgvizMetric {
    Sae = 0,
    Mse = 1,
    Psnr = 2,
    Pcc = 3,
    Ssim = 4,
}

impl From<ImgvizMetric> for MetricId {
    fn from(m: ImgvizMetric) -> Self {
        match m {
            ImgvizMetric::Sae => MetricId::Sae,
            ImgvizMetric::Mse => MetricId::Mse,
            ImgvizMetric::Psnr => MetricId::Psnr,
            ImgvizMetric::Pcc => MetricId::Pcc,
            ImgvizMetric::Ssim => MetricId::Ssim,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImgvizBenchmark {
    Qing = 0,
    Rastrigin = 1,
    Rosenbrock = 2,
    Salomon = 3,
    Spherical = 4,
    StyblinskiTang = 5,
    Wavy = 6,
}

impl From<ImgvizBenchmark> for Benchmark {
    fn from(b: ImgvizBenchmark) -> Self {
        match b {
            ImgvizBenchmark::Qing => Benchmark::Qing,
            ImgvizBenchmark::Rastrigin => Benchmark::Rastrigin,
            ImgvizBenchmark::Rosenbrock => Benchmark::Rosenbrock,
            ImgvizBenchmark::Salomon => Benchmark::Salomon,
            ImgvizBenchmark::Spherical => Benchmark::Spherical,
            ImgvizBenchmark::StyblinskiTang => Benchmark::StyblinskiTang,
            ImgvizBenchmark::Wavy => Benchmark::Wavy,
        }
    }
}

/// Opaque run configuration.
pub struct ImgvizConfig {
    inner: RunConfig,
}

/// Opaque record of a finished run.
pub struct ImgvizRun {
    manifest: Manifest,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ImgvizStatus {
    match e {
        Error::DimensionMismatch { .. } => ImgvizStatus::DimensionMismatch,
        Error::OutOfRange { .. } => ImgvizStatus::OutOfRange,
        Error::IdenticalImages | Error::ConstantImage | Error::ZeroSsim => ImgvizStatus::Undefined,
        Error::Config(_) => ImgvizStatus::Config,
        e if e.is_io() => ImgvizStatus::Io,
        _ => ImgvizStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ImgvizStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ImgvizStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            ImgvizStatus::Panic
        }
    }
}

struct Fail(ImgvizStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(name: &str) -> Fail {
    Fail(ImgvizStatus::NullPointer, format!("{name} is null"))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, name: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn c_str(p: *const c_char, name: &str) -> Result<String, Fail> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Fail(ImgvizStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

/// Message describing the last failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn imgviz_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Raw metric value between two images of `len` pixels in `[0, range]`.
#[no_mangle]
pub unsafe extern "C" fn imgviz_metric(
    metric: ImgvizMetric,
    a: *const f64,
    b: *const f64,
    len: usize,
    range: f64,
    result: *mut f64,
) -> ImgvizStatus {
    guard(|| {
        let (a, b) = (slice(a, len, "a")?, slice(b, len, "b")?);
        let r = out(result, "result")?;
        *r = MetricId::from(metric).raw(a, b, &MetricContext::for_range(range))?;
        Ok(())
    })
}

/// Metric value in minimization orientation (similarity metrics negated).
#[no_mangle]
pub unsafe extern "C" fn imgviz_metric_fitness(
    metric: ImgvizMetric,
    a: *const f64,
    b: *const f64,
    len: usize,
    range: f64,
    result: *mut f64,
) -> ImgvizStatus {
    guard(|| {
        let (a, b) = (slice(a, len, "a")?, slice(b, len, "b")?);
        let r = out(result, "result")?;
        *r = MetricId::from(metric).fitness(a, b, &MetricContext::for_range(range))?;
        Ok(())
    })
}

/// Partially-separable fitness with separability level `p` on unit-range images.
#[no_mangle]
pub unsafe extern "C" fn imgviz_partial_fitness(
    x: *const f64,
    t: *const f64,
    len: usize,
    p: f64,
    result: *mut f64,
) -> ImgvizStatus {
    guard(|| {
        let (x, t) = (slice(x, len, "x")?, slice(t, len, "t")?);
        let r = out(result, "result")?;
        MetricId::new_partial(p)?;
        *r = partial_fitness(x, t, p, &SsimConstants::default())?;
        Ok(())
    })
}

/// Lays a column-major vector out as a row-major `height × width` image.
#[no_mangle]
pub unsafe extern "C" fn imgviz_vector_to_matrix(
    s: *const f64,
    len: usize,
    height: usize,
    width: usize,
    row_major: *mut f64,
) -> ImgvizStatus {
    guard(|| {
        let s = slice(s, len, "s")?;
        let m = vector_to_matrix(s, height, width)?;
        slice_mut(row_major, len, "row_major")?.copy_from_slice(m.values());
        Ok(())
    })
}

/// Benchmark value at `x`; fails when `x` leaves the function's domain.
#[no_mangle]
pub unsafe extern "C" fn imgviz_benchmark_eval(
    benchmark: ImgvizBenchmark,
    x: *const f64,
    len: usize,
    result: *mut f64,
) -> ImgvizStatus {
    guard(|| {
        let x = slice(x, len, "x")?;
        let r = out(result, "result")?;
        *r = Benchmark::from(benchmark).evaluate(x)?;
        Ok(())
    })
}

/// Writes the reference optimum of dimension `len` into `optimum`.
#[no_mangle]
pub unsafe extern "C" fn imgviz_benchmark_optimum(
    benchmark: ImgvizBenchmark,
    len: usize,
    optimum: *mut f64,
) -> ImgvizStatus {
    guard(|| {
        let dst = slice_mut(optimum, len, "optimum")?;
        dst.copy_from_slice(&Benchmark::from(benchmark).reference_optimum(len));
        Ok(())
    })
}

/// Search domain `[lower, upper]` of a benchmark.
#[no_mangle]
pub unsafe extern "C" fn imgviz_benchmark_domain(
    benchmark: ImgvizBenchmark,
    lower: *mut f64,
    upper: *mut f64,
) -> ImgvizStatus {
    guard(|| {
        let (lo, hi) = Benchmark::from(benchmark).domain();
        *out(lower, "lower")? = lo;
        *out(upper, "upper")? = hi;
        Ok(())
    })
}

/// Relative position encoding of a permutation.
#[no_mangle]
pub unsafe extern "C" fn imgviz_rpi_encode(perm: *const u32, len: usize, encoded: *mut f64) -> ImgvizStatus {
    guard(|| {
        let v = rpi_encode(slice(perm, len, "perm")?)?;
        slice_mut(encoded, len, "encoded")?.copy_from_slice(&v);
        Ok(())
    })
}

/// Rank-matching decode of `x` over the multiset `base`.
#[no_mangle]
pub unsafe extern "C" fn imgviz_rpi_decode(
    x: *const f64,
    base: *const u32,
    len: usize,
    decoded: *mut u32,
) -> ImgvizStatus {
    guard(|| {
        let v = rpi_decode(slice(x, len, "x")?, slice(base, len, "base")?)?;
        slice_mut(decoded, len, "decoded")?.copy_from_slice(&v);
        Ok(())
    })
}

/// Whether objective vector `a` dominates `b` (minimization).
#[no_mangle]
pub unsafe extern "C" fn imgviz_dominates(
    a: *const f64,
    b: *const f64,
    objectives: usize,
    result: *mut bool,
) -> ImgvizStatus {
    guard(|| {
        let d = dominates(slice(a, objectives, "a")?, slice(b, objectives, "b")?)?;
        *out(result, "result")? = d;
        Ok(())
    })
}

/// Crowding distances of `count` points stored row-major with `objectives`
/// values each. Boundary points receive +infinity.
#[no_mangle]
pub unsafe extern "C" fn imgviz_crowding_distance(
    points: *const f64,
    count: usize,
    objectives: usize,
    distances: *mut f64,
) -> ImgvizStatus {
    guard(|| {
        let flat = slice(points, count * objectives, "points")?;
        let front: Vec<Vec<f64>> = flat.chunks(objectives.max(1)).map(<[f64]>::to_vec).collect();
        let cd = crowding_distance(&front)?;
        slice_mut(distances, count, "distances")?.copy_from_slice(&cd);
        Ok(())
    })
}

/// Raw metric over a `resolution × resolution` grid of two-pixel candidates
/// against the target `(t1, t2)`. Cell `(r, c)` lands at `grid[r * resolution + c]`.
#[no_mangle]
pub unsafe extern "C" fn imgviz_landscape(
    metric: ImgvizMetric,
    t1: f64,
    t2: f64,
    resolution: usize,
    grid: *mut f64,
) -> ImgvizStatus {
    guard(|| {
        let g = landscape_grid(metric.into(), (t1, t2), resolution)?;
        let dst = slice_mut(grid, resolution * resolution, "grid")?;
        for (d, v) in dst.iter_mut().zip(g.values.iter().flatten()) {
            *d = *v;
        }
        Ok(())
    })
}

/// Loads a configuration file.
#[no_mangle]
pub unsafe extern "C" fn imgviz_config_load(path: *const c_char, config: *mut *mut ImgvizConfig) -> ImgvizStatus {
    guard(|| {
        let slot = out(config, "config")?;
        let cfg = RunConfig::load(c_str(path, "path")?)?;
        *slot = Box::into_raw(Box::new(ImgvizConfig { inner: cfg }));
        Ok(())
    })
}

/// Parses configuration text; relative target paths resolve against
/// `base_dir` when it is not null.
#[no_mangle]
pub unsafe extern "C" fn imgviz_config_parse(
    text: *const c_char,
    base_dir: *const c_char,
    config: *mut *mut ImgvizConfig,
) -> ImgvizStatus {
    guard(|| {
        let slot = out(config, "config")?;
        let text = c_str(text, "text")?;
        let base = if base_dir.is_null() {
            None
        } else {
            Some(PathBuf::from(c_str(base_dir, "base_dir")?))
        };
        let cfg = RunConfig::parse(&text, base.as_deref())?;
        *slot = Box::into_raw(Box::new(ImgvizConfig { inner: cfg }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn imgviz_config_set_seed(config: *mut ImgvizConfig, seed: u64) -> ImgvizStatus {
    guard(|| {
        out(config, "config")?.inner.seed = seed;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn imgviz_config_set_output(config: *mut ImgvizConfig, dir: *const c_char) -> ImgvizStatus {
    guard(|| {
        let dir = c_str(dir, "dir")?;
        out(config, "config")?.inner.output = PathBuf::from(dir);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn imgviz_config_free(config: *mut ImgvizConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the configured experiment, writing its artifacts to disk.
#[no_mangle]
pub unsafe extern "C" fn imgviz_run(config: *const ImgvizConfig, run: *mut *mut ImgvizRun) -> ImgvizStatus {
    guard(|| {
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        let slot = out(run, "run")?;
        let manifest = run_experiment(&cfg.inner)?;
        *slot = Box::into_raw(Box::new(ImgvizRun { manifest }));
        Ok(())
    })
}

unsafe fn run_ref<'a>(run: *const ImgvizRun) -> Result<&'a ImgvizRun, Fail> {
    run.as_ref().ok_or_else(|| null("run"))
}

#[no_mangle]
pub unsafe extern "C" fn imgviz_run_iterations(run: *const ImgvizRun, iterations: *mut usize) -> ImgvizStatus {
    guard(|| {
        *out(iterations, "iterations")? = run_ref(run)?.manifest.iterations;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn imgviz_run_evaluations(run: *const ImgvizRun, evaluations: *mut usize) -> ImgvizStatus {
    guard(|| {
        *out(evaluations, "evaluations")? = run_ref(run)?.manifest.evaluations;
        Ok(())
    })
}

/// Final best fitness; objective `index` selects the objective of
/// multi-objective runs (0 otherwise).
#[no_mangle]
pub unsafe extern "C" fn imgviz_run_best_fitness(run: *const ImgvizRun, index: usize, fitness: *mut f64) -> ImgvizStatus {
    guard(|| {
        let best = run_ref(run)?.manifest.best.as_ref().ok_or_else(|| null("best"))?;
        let v = best.fitness.get(index).ok_or_else(|| {
            Fail(ImgvizStatus::InvalidArgument, format!("objective {index} does not exist"))
        })?;
        *out(fitness, "fitness")? = *v;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn imgviz_run_solution_len(run: *const ImgvizRun, len: *mut usize) -> ImgvizStatus {
    guard(|| {
        let best = run_ref(run)?.manifest.best.as_ref().ok_or_else(|| null("best"))?;
        *out(len, "len")? = best.solution.len();
        Ok(())
    })
}

/// Copies the final best solution into `buffer`, which must hold exactly
/// the solution length.
#[no_mangle]
pub unsafe extern "C" fn imgviz_run_copy_solution(run: *const ImgvizRun, buffer: *mut f64, len: usize) -> ImgvizStatus {
    guard(|| {
        let best = run_ref(run)?.manifest.best.as_ref().ok_or_else(|| null("best"))?;
        if len != best.solution.len() {
            return Err(Error::DimensionMismatch {
                expected: best.solution.len(),
                found: len,
            }
            .into());
        }
        slice_mut(buffer, len, "buffer")?.copy_from_slice(&best.solution);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn imgviz_run_free(run: *mut ImgvizRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}
