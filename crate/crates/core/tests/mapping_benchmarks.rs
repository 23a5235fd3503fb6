use imgviz::benchmarks::*;
use imgviz::mapping::*;
use imgviz::raster::{quantize_8bit, PixelMatrix, RgbRaster};
use proptest::prelude::*;

fn gradient(h: usize, w: usize) -> PixelMatrix {
    let values = (0..h * w).map(|k| ((k * 37) % 256) as f64 / 255.0).collect();
    PixelMatrix::from_row_major(h, w, values).unwrap()
}

fn map_for(b: Benchmark, target: PixelMatrix) -> KnownOptimumMap {
    let d = target.len();
    let (lo, hi) = b.domain();
    KnownOptimumMap::new(target, b.reference_optimum(d), vec![lo; d], vec![hi; d]).unwrap()
}

#[test]
fn boundary_laws_for_every_benchmark() {
    for b in Benchmark::ALL {
        let map = map_for(b, gradient(30, 30));
        let (lo, hi) = b.domain();
        let white = linear_error_map(&vec![hi; 900], &map).unwrap();
        assert!(white.values().iter().all(|&v| v == 1.0), "{b}");
        let black = linear_error_map(&vec![lo; 900], &map).unwrap();
        assert!(black.values().iter().all(|&v| v == 0.0), "{b}");
        let exact = linear_error_map(&b.reference_optimum(900), &map).unwrap();
        assert_eq!(&exact, map.target(), "{b}");
    }
}

#[test]
fn half_way_errors() {
    let target = PixelMatrix::from_rows(&[vec![0.5]]).unwrap();
    let map = KnownOptimumMap::new(target, vec![0.0], vec![-4.0], vec![4.0]).unwrap();
    assert_eq!(linear_error_map(&[2.0], &map).unwrap().values(), &[0.75]);
    assert_eq!(linear_error_map(&[-2.0], &map).unwrap().values(), &[0.25]);
    assert!(linear_error_map(&[5.0], &map).is_err());
}

#[test]
fn optimum_on_bound_is_rejected() {
    let t = PixelMatrix::filled(1, 2, 0.5).unwrap();
    assert!(KnownOptimumMap::new(t.clone(), vec![0.0, 1.0], vec![0.0, 0.0], vec![2.0, 2.0]).is_err());
    assert!(KnownOptimumMap::new(t, vec![1.0], vec![0.0], vec![2.0]).is_err());
}

#[test]
fn direct_map_checks_range() {
    assert!(direct_map(&[0.2, 1.2], 1, 2).is_err());
    assert_eq!(direct_map(&[0.2, 0.4], 2, 1).unwrap().rows(), vec![vec![0.2], vec![0.4]]);
}

#[test]
fn heatmap_colors() {
    let p = HeatmapPalette::uniform(1.0);
    assert_eq!(p.color(0, 0.0), [255, 255, 255]);
    assert_eq!(p.color(0, 1.0), [255, 0, 0]);
    assert_eq!(p.color(0, 0.5), [255, 128, 128]);
    assert_eq!(p.color(0, 3.0), [255, 0, 0]);
    let img = error_heatmap(&[0.0, 1.0], &[0.0, 0.0], &p, 2, 1).unwrap();
    assert_eq!(img.get(0, 0), [255, 255, 255]);
    assert_eq!(img.get(1, 0), [255, 0, 0]);
    let per = HeatmapPalette::per_dimension(vec![2.0, 4.0]);
    assert_eq!(per.color(1, 2.0), [255, 128, 128]);
}

#[test]
fn violation_border() {
    assert_eq!(violation_color(0.0, 10.0), [0, 255, 0]);
    assert_eq!(violation_color(10.0, 10.0), [255, 0, 0]);
    assert_eq!(violation_color(50.0, 10.0), [255, 0, 0]);
    assert_eq!(violation_color(5.0, 10.0), [128, 128, 0]);
    let inner = RgbRaster::new(3, 2, [1, 2, 3]);
    let framed = render_violation_border(&inner, 0.0, 1.0);
    assert_eq!((framed.height, framed.width), (3 + 2 * BORDER_WIDTH, 2 + 2 * BORDER_WIDTH));
    assert_eq!(framed.get(0, 0), [0, 255, 0]);
    assert_eq!(framed.get(1, 1), [0, 255, 0]);
    assert_eq!(framed.get(BORDER_WIDTH, BORDER_WIDTH), [1, 2, 3]);
}

#[test]
fn constrained_tints() {
    let img = constrained_pixels(&[0.5, 2.0, -1.0, 1.0], &[0.0; 4], &[1.0; 4], &[-1.0; 4], &[2.0; 4], 2, 2).unwrap();
    assert_eq!(img.get(0, 0), [128, 128, 128]);
    assert_eq!(img.get(1, 0), [255, 0, 0]);
    assert_eq!(img.get(0, 1), [0, 0, 255]);
    assert_eq!(img.get(1, 1), [255, 255, 255]);
}

#[test]
fn spherical_anchors_and_target_reproduction() {
    let d = 65536;
    assert_eq!(Benchmark::Spherical.evaluate(&vec![2.0; d]).unwrap(), 262144.0);
    assert_eq!(Benchmark::Spherical.evaluate(&vec![-2.0; d]).unwrap(), 262144.0);
    assert_eq!(Benchmark::Spherical.evaluate(&vec![0.0; d]).unwrap(), 0.0);
    let target = gradient(256, 256);
    let map = map_for(Benchmark::Spherical, target.clone());
    let img = linear_error_map(&vec![0.0; d], &map).unwrap();
    assert_eq!(quantize_8bit(&img).unwrap(), quantize_8bit(&target).unwrap());
}

#[test]
fn optima_are_minimal_values() {
    assert_eq!(Benchmark::Rastrigin.value(&[0.0; 10]), 0.0);
    assert_eq!(Benchmark::Rosenbrock.value(&[1.0; 10]), 0.0);
    assert_eq!(Benchmark::Salomon.value(&[0.0; 10]), 0.0);
    assert_eq!(Benchmark::Wavy.value(&[0.0; 10]), 0.0);
    assert!(Benchmark::Qing.value(&[1.0, 2f64.sqrt()]) < 1e-20);
    assert!(Benchmark::Qing.value(&[0.0, 0.0]) > 0.0);
}

/// Golden-section search on one Styblinski-Tang component.
#[test]
fn styblinski_tang_reference_is_the_one_dimensional_minimizer() {
    let g = |x: f64| 0.5 * (x.powi(4) - 16.0 * x * x + 5.0 * x);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (-5.0, 0.0);
    for _ in 0..200 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if g(c) < g(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let x = (a + b) / 2.0;
    assert!((x - STYBLINSKI_TANG_OPTIMUM).abs() < 1e-4);
    assert!((g(x) + 39.16617).abs() < 1e-3);
    let v = Benchmark::StyblinskiTang.value(&[STYBLINSKI_TANG_OPTIMUM; 4]);
    assert!((v / 4.0 + 39.16617).abs() < 1e-3);
}

#[test]
fn domain_checks() {
    assert!(Benchmark::Rastrigin.evaluate(&[5.2]).is_err());
    assert!(eval_benchmark(Benchmark::Wavy, &[3.0, -3.0]).is_ok());
    assert!(eval_benchmark(Benchmark::Wavy, &[3.2]).is_err());
    assert_eq!("Styblinski-Tang".parse::<Benchmark>().unwrap(), Benchmark::StyblinskiTang);
    assert_eq!("sphere".parse::<Benchmark>().unwrap(), Benchmark::Spherical);
    assert!("ackley".parse::<Benchmark>().is_err());
    assert_eq!(reference_optimum(Benchmark::Rosenbrock, 2), vec![1.0, 1.0]);
}

fn point(b: Benchmark, d: usize) -> impl Strategy<Value = Vec<f64>> {
    let (lo, hi) = b.domain();
    prop::collection::vec(lo..=hi, d)
}

proptest! {
    #[test]
    fn additive_separability(x in point(Benchmark::Wavy, 6)) {
        for b in [Benchmark::Spherical, Benchmark::Rastrigin, Benchmark::StyblinskiTang, Benchmark::Wavy] {
            let zero = b.value(&[0.0; 6]);
            let sum: f64 = (0..6)
                .map(|k| {
                    let mut e = vec![0.0; 6];
                    e[k] = x[k];
                    b.value(&e)
                })
                .sum();
            let whole = b.value(&x);
            prop_assert!((whole - (sum - 5.0 * zero)).abs() < 1e-9 * whole.abs().max(1.0));
        }
    }

    #[test]
    fn linear_map_is_monotone(t in 0.0..=1.0f64, a in -5.12..=5.12f64, b in -5.12..=5.12f64) {
        let target = PixelMatrix::from_rows(&[vec![t]]).unwrap();
        let map = map_for(Benchmark::Rastrigin, target);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let pl = linear_error_map(&[lo], &map).unwrap().values()[0];
        let ph = linear_error_map(&[hi], &map).unwrap().values()[0];
        prop_assert!(pl <= ph);
        prop_assert!((0.0..=1.0).contains(&pl));
    }

    #[test]
    fn mapped_values_stay_in_unit_range(x in point(Benchmark::Salomon, 9)) {
        let map = map_for(Benchmark::Salomon, gradient(3, 3));
        let img = linear_error_map(&x, &map).unwrap();
        prop_assert!(img.values().iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
