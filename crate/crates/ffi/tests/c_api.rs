use std::ffi::{CStr, CString};
use std::ptr;

use imgviz_ffi::*;

fn last_error() -> String {
    let p = imgviz_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn metric_values_and_errors() {
    let a = [0.0, 1.0, 0.5, 0.25];
    let b = [1.0, 0.0, 0.5, 0.75];
    let mut v = 0.0;
    unsafe {
        assert_eq!(imgviz_metric(ImgvizMetric::Sae, a.as_ptr(), b.as_ptr(), 4, 1.0, &mut v), ImgvizStatus::Ok);
        assert_eq!(v, 2.5);
        assert_eq!(imgviz_metric(ImgvizMetric::Mse, a.as_ptr(), b.as_ptr(), 4, 1.0, &mut v), ImgvizStatus::Ok);
        assert_eq!(v, 2.25 / 4.0);
        assert_eq!(imgviz_metric(ImgvizMetric::Ssim, a.as_ptr(), a.as_ptr(), 4, 1.0, &mut v), ImgvizStatus::Ok);
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(
            imgviz_metric_fitness(ImgvizMetric::Ssim, a.as_ptr(), a.as_ptr(), 4, 1.0, &mut v),
            ImgvizStatus::Ok
        );
        assert!((v + 1.0).abs() < 1e-12);
        assert_eq!(
            imgviz_metric(ImgvizMetric::Psnr, a.as_ptr(), a.as_ptr(), 4, 1.0, &mut v),
            ImgvizStatus::Undefined
        );
        let flat = [0.3; 4];
        assert_eq!(
            imgviz_metric(ImgvizMetric::Pcc, flat.as_ptr(), b.as_ptr(), 4, 1.0, &mut v),
            ImgvizStatus::Undefined
        );
        assert_eq!(
            imgviz_metric(ImgvizMetric::Sae, ptr::null(), b.as_ptr(), 4, 1.0, &mut v),
            ImgvizStatus::NullPointer
        );
        assert!(last_error().contains('a'));
        assert_eq!(
            imgviz_metric(ImgvizMetric::Sae, a.as_ptr(), b.as_ptr(), 4, 1.0, ptr::null_mut()),
            ImgvizStatus::NullPointer
        );
    }
}

#[test]
fn partial_fitness_bounds() {
    let x = [0.1, 0.2, 0.3, 0.4];
    let t = [0.1, 0.2, 0.3, 0.9];
    let mut v = 0.0;
    unsafe {
        assert_eq!(imgviz_partial_fitness(x.as_ptr(), t.as_ptr(), 4, 1.0, &mut v), ImgvizStatus::Ok);
        assert!((v - 0.5).abs() < 1e-12);
        assert_eq!(
            imgviz_partial_fitness(x.as_ptr(), t.as_ptr(), 4, 1.5, &mut v),
            ImgvizStatus::InvalidArgument
        );
    }
}

#[test]
fn layout_conversion() {
    let s = [1.0, 0.0, 0.5, 0.25, 0.75, 0.125];
    let mut m = [0.0; 6];
    unsafe {
        assert_eq!(imgviz_vector_to_matrix(s.as_ptr(), 6, 2, 3, m.as_mut_ptr()), ImgvizStatus::Ok);
        assert_eq!(m, [1.0, 0.5, 0.75, 0.0, 0.25, 0.125]);
        assert_eq!(
            imgviz_vector_to_matrix(s.as_ptr(), 6, 4, 2, m.as_mut_ptr()),
            ImgvizStatus::DimensionMismatch
        );
    }
}

#[test]
fn benchmarks() {
    let x = vec![2.0; 65536];
    let mut v = 0.0;
    let (mut lo, mut hi) = (0.0, 0.0);
    let mut opt = [9.0; 3];
    unsafe {
        assert_eq!(imgviz_benchmark_eval(ImgvizBenchmark::Spherical, x.as_ptr(), x.len(), &mut v), ImgvizStatus::Ok);
        assert_eq!(v, 262144.0);
        let far = [100.0];
        assert_eq!(
            imgviz_benchmark_eval(ImgvizBenchmark::Spherical, far.as_ptr(), 1, &mut v),
            ImgvizStatus::OutOfRange
        );
        assert_eq!(imgviz_benchmark_domain(ImgvizBenchmark::Rastrigin, &mut lo, &mut hi), ImgvizStatus::Ok);
        assert_eq!((lo, hi), (-5.12, 5.12));
        assert_eq!(imgviz_benchmark_optimum(ImgvizBenchmark::Rosenbrock, 3, opt.as_mut_ptr()), ImgvizStatus::Ok);
        assert_eq!(opt, [1.0; 3]);
    }
}

#[test]
fn rpi_round_trip() {
    let perm = [150u32, 10, 250, 40, 190];
    let mut enc = [0.0; 5];
    let mut dec = [0u32; 5];
    unsafe {
        assert_eq!(imgviz_rpi_encode(perm.as_ptr(), 5, enc.as_mut_ptr()), ImgvizStatus::Ok);
        assert_eq!(enc[2], 1.0);
        assert_eq!(imgviz_rpi_decode(enc.as_ptr(), perm.as_ptr(), 5, dec.as_mut_ptr()), ImgvizStatus::Ok);
    }
    assert_eq!(dec, perm);
}

#[test]
fn dominance_and_crowding() {
    let mut d = true;
    let mut cd = [0.0; 3];
    let pts = [0.0, 2.0, 1.0, 1.0, 2.0, 0.0];
    unsafe {
        assert_eq!(imgviz_dominates([1.0, 1.0].as_ptr(), [1.0, 1.0].as_ptr(), 2, &mut d), ImgvizStatus::Ok);
        assert!(!d);
        assert_eq!(imgviz_dominates([0.0, 1.0].as_ptr(), [1.0, 1.0].as_ptr(), 2, &mut d), ImgvizStatus::Ok);
        assert!(d);
        assert_eq!(imgviz_crowding_distance(pts.as_ptr(), 3, 2, cd.as_mut_ptr()), ImgvizStatus::Ok);
    }
    assert!(cd[0].is_infinite() && cd[2].is_infinite());
    assert_eq!(cd[1], 4.0);
}

#[test]
fn landscape_grid() {
    let mut g = vec![0.0; 9];
    unsafe {
        assert_eq!(imgviz_landscape(ImgvizMetric::Sae, 0.5, 1.0, 3, g.as_mut_ptr()), ImgvizStatus::Ok);
        assert_eq!(g[2 * 3 + 1], 0.0);
        assert_eq!(imgviz_landscape(ImgvizMetric::Sae, 0.5, 1.0, 1, g.as_mut_ptr()), ImgvizStatus::InvalidArgument);
    }
}

fn write_target(dir: &std::path::Path) {
    let px: Vec<u8> = (0..16).map(|k| (k * 16) as u8).collect();
    image::save_buffer(dir.join("t.png"), &px, 4, 4, image::ExtendedColorType::L8).unwrap();
}

#[test]
fn config_and_run_handles() {
    let dir = tempfile::tempdir().unwrap();
    write_target(dir.path());
    let text = CString::new(
        "[scheme]\nkind = continuous\n[target]\npath = t.png\n[optimizer]\nkind = de\npopulation = 8\niterations = 20\n[output]\ndir = out\n",
    )
    .unwrap();
    let base = CString::new(dir.path().to_str().unwrap()).unwrap();
    let out_dir = CString::new(dir.path().join("out").to_str().unwrap()).unwrap();
    let mut cfg: *mut ImgvizConfig = ptr::null_mut();
    let mut run: *mut ImgvizRun = ptr::null_mut();
    unsafe {
        assert_eq!(imgviz_config_parse(text.as_ptr(), base.as_ptr(), &mut cfg), ImgvizStatus::Ok);
        assert_eq!(imgviz_config_set_seed(cfg, 5), ImgvizStatus::Ok);
        assert_eq!(imgviz_config_set_output(cfg, out_dir.as_ptr()), ImgvizStatus::Ok);
        assert_eq!(imgviz_run(cfg, &mut run), ImgvizStatus::Ok);
        let (mut iters, mut evals, mut len) = (0usize, 0usize, 0usize);
        assert_eq!(imgviz_run_iterations(run, &mut iters), ImgvizStatus::Ok);
        assert_eq!(imgviz_run_evaluations(run, &mut evals), ImgvizStatus::Ok);
        assert_eq!((iters, evals), (20, 160));
        assert_eq!(imgviz_run_solution_len(run, &mut len), ImgvizStatus::Ok);
        assert_eq!(len, 16);
        let mut sol = vec![0.0; len];
        assert_eq!(imgviz_run_copy_solution(run, sol.as_mut_ptr(), len), ImgvizStatus::Ok);
        assert!(sol.iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(
            imgviz_run_copy_solution(run, sol.as_mut_ptr(), len - 1),
            ImgvizStatus::DimensionMismatch
        );
        let mut f = 0.0;
        assert_eq!(imgviz_run_best_fitness(run, 0, &mut f), ImgvizStatus::Ok);
        assert!(f >= 0.0);
        assert_eq!(imgviz_run_best_fitness(run, 1, &mut f), ImgvizStatus::InvalidArgument);
        imgviz_run_free(run);
        imgviz_config_free(cfg);
    }
    assert!(dir.path().join("out/manifest.json").exists());
}

#[test]
fn config_errors_are_reported() {
    let bad = CString::new("[scheme]\nkind = nonsense\n").unwrap();
    let missing = CString::new("/definitely/not/here.conf").unwrap();
    let mut cfg: *mut ImgvizConfig = ptr::null_mut();
    unsafe {
        assert_eq!(imgviz_config_parse(bad.as_ptr(), ptr::null(), &mut cfg), ImgvizStatus::Config);
        assert!(last_error().contains("scheme.kind"));
        assert_eq!(imgviz_config_load(missing.as_ptr(), &mut cfg), ImgvizStatus::Io);
        assert!(cfg.is_null());
        imgviz_config_free(ptr::null_mut());
        imgviz_run_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header = include_str!("../include/imgviz.h");
    for name in [
        "imgviz_last_error_message",
        "imgviz_metric",
        "imgviz_metric_fitness",
        "imgviz_partial_fitness",
        "imgviz_vector_to_matrix",
        "imgviz_benchmark_eval",
        "imgviz_benchmark_optimum",
        "imgviz_benchmark_domain",
        "imgviz_rpi_encode",
        "imgviz_rpi_decode",
        "imgviz_dominates",
        "imgviz_crowding_distance",
        "imgviz_landscape",
        "imgviz_config_load",
        "imgviz_config_parse",
        "imgviz_config_set_seed",
        "imgviz_config_set_output",
        "imgviz_config_free",
        "imgviz_run",
        "imgviz_run_iterations",
        "imgviz_run_evaluations",
        "imgviz_run_best_fitness",
        "imgviz_run_solution_len",
        "imgviz_run_copy_solution",
        "imgviz_run_free",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("typedef struct ImgvizRun ImgvizRun;"));
}
