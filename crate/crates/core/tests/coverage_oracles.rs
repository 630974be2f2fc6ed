use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wallsense_core::channel::{db_to_linear, ssnr_full, ssnr_simplified};
use wallsense_core::coverage::export::{
    field_csv_string, read_field_csv_values, write_field_pgm, PgmRange,
};
use wallsense_core::coverage::*;
use wallsense_core::geometry::{path_set, Point};
use wallsense_core::placement::{analyze, analyze_on};
use wallsense_core::scenario::{ModelMode, Scenario};

/// Standalone single-point evaluation straight from the channel module.
fn standalone_db(s: &Scenario, p: Point) -> f64 {
    if p.distance(s.placement.tx) < s.exclusion_radius_m
        || p.distance(s.placement.rx) < s.exclusion_radius_m
    {
        return f64::NAN;
    }
    let ps = path_set(&s.placement, p, &s.room).unwrap();
    let lin = match s.model {
        ModelMode::Simplified => {
            ssnr_simplified(&ps, s.rf.alpha1(), s.rf.alpha2(), s.rf.wavelength_m).unwrap()
        }
        ModelMode::Full => ssnr_full(&s.rf, &ps).unwrap().linear,
    };
    10.0 * (s.scale_factor * lin).log10()
}

fn same_bits(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
}

#[test]
fn field_cells_match_standalone_evaluation() {
    for model in [ModelMode::Simplified, ModelMode::Full] {
        let mut s = Scenario::canonical();
        s.model = model;
        let field = evaluate_field(&s, &s.grid);
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        for _ in 0..100 {
            let i = rng.random_range(0..field.values.len());
            let expected = standalone_db(&s, s.grid.center_of(i));
            assert!(
                same_bits(field.values[i], expected),
                "cell {i}: {} vs {expected}",
                field.values[i]
            );
        }
    }
}

#[test]
fn zero_reflection_field_is_direct_only() {
    let s = Scenario::canonical().without_wall();
    let grid = s.grid.with_resolution(0.1);
    let field = evaluate_field(&s, &grid);
    for (i, &v) in field.values.iter().enumerate() {
        let c = grid.center_of(i);
        let (r_t, r_r) = (c.distance(s.placement.tx), c.distance(s.placement.rx));
        if r_t < 0.1 || r_r < 0.1 {
            assert!(v.is_nan());
            continue;
        }
        let expected = 10.0 * (9.0 / (r_t * r_r).powi(2)).log10();
        assert!((v - expected).abs() < 1e-9, "{v} vs {expected}");
    }
}

#[test]
fn canonical_mask_matches_pointwise_threshold() {
    let s = Scenario::canonical();
    let field = evaluate_field(&s, &s.grid);
    let mask = threshold_mask(&field, 2.0);
    for i in 0..field.values.len() {
        let v = standalone_db(&s, s.grid.center_of(i));
        assert_eq!(mask.cells[i], v >= 2.0, "cell {i}");
    }
}

/// Along a line parallel to the wall the wall echo's extra path length
/// sweeps through many wavelengths, so the field oscillates while the
/// direct-only field has a single dip.
#[test]
fn wall_produces_interference_fringes() {
    let s = Scenario::canonical();
    let count_extrema = |sc: &Scenario| {
        let vals: Vec<f64> = (0..1000)
            .map(|k| ssnr_db_at(sc, Point::new(1.0, 0.5 + k as f64 * 0.005)))
            .collect();
        vals.windows(3)
            .filter(|w| (w[1] - w[0]) * (w[2] - w[1]) < 0.0)
            .count()
    };
    assert!(count_extrema(&s) >= 20);
    assert!(count_extrema(&s.without_wall()) <= 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn raising_threshold_never_adds_cells(a in -20.0..30.0f64, b in -20.0..30.0f64) {
        let s = Scenario::canonical();
        let field = evaluate_field(&s, &s.grid.with_resolution(0.2));
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (ml, mh) = (threshold_mask(&field, lo), threshold_mask(&field, hi));
        for (l, h) in ml.cells.iter().zip(&mh.cells) {
            prop_assert!(!*h || *l);
        }
    }
}

#[test]
fn threshold_extremes() {
    let s = Scenario::canonical();
    let field = evaluate_field(&s, &s.grid.with_resolution(0.2));
    let all = threshold_mask(&field, f64::NEG_INFINITY);
    assert_eq!(
        all.count(),
        field.values.iter().filter(|v| !v.is_nan()).count()
    );
    let (_, max) = field.finite_range().unwrap();
    assert_eq!(threshold_mask(&field, max + 1.0).count(), 0);
}

#[test]
fn disk_perimeter_close_to_circumference() {
    for (r, res) in [(1.0, 0.05), (1.0, 0.025), (2.5, 0.1)] {
        let grid = GridSpec::new(Point::new(-3.0, -3.0), 6.0, 6.0, res);
        let mask = Mask::from_fn(&grid, |c, row| grid.center(c, row).norm() <= r);
        let contours = extract_boundary(&mask, &grid);
        assert_eq!(contours.len(), 1);
        let ratio = contours[0].perimeter() / (2.0 * PI * r);
        assert!((ratio - 1.0).abs() < 0.10, "r {r} res {res}: ratio {ratio}");
        assert!(contours[0].signed_area() > 0.0);
    }
}

#[test]
fn no_wall_boundary_is_cassini_oval() {
    let s = Scenario::canonical().without_wall();
    let (_, report) = analyze(&s);
    let k = s.placement.separation() / db_to_linear(s.threshold_db).sqrt();
    let near_device = |p: Point| {
        p.distance(s.placement.tx) < s.exclusion_radius_m + 2.0 * s.grid.resolution
            || p.distance(s.placement.rx) < s.exclusion_radius_m + 2.0 * s.grid.resolution
    };
    let mut checked = 0;
    for c in report
        .raw_contours
        .iter()
        .filter(|c| !c.points.iter().all(|&p| near_device(p)))
    {
        for &p in &c.points {
            let (r_t, r_r) = (p.distance(s.placement.tx), p.distance(s.placement.rx));
            let grad = (p - s.placement.tx) * (r_r / r_t) + (p - s.placement.rx) * (r_t / r_r);
            let tol = 2.0 * s.grid.resolution * grad.norm();
            assert!((r_t * r_r - k).abs() <= tol, "{p:?}: {} vs {k}", r_t * r_r);
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn areas_converge_under_refinement() {
    let s = Scenario::canonical();
    let (_, coarse) = analyze_on(&s, &s.grid);
    let (_, fine) = analyze_on(&s, &s.grid.with_resolution(s.grid.resolution / 2.0));
    let rel = |a: f64, b: f64| (a - b).abs() / b;
    assert!(rel(coarse.indoor_area, fine.indoor_area) < 0.03);
    assert!(rel(coarse.covered_area, fine.covered_area) < 0.03);
    let (lc, lf) = (coarse.leakage.area().unwrap(), fine.leakage.area().unwrap());
    assert!(rel(lc, lf) < 0.03, "{lc} vs {lf}");
}

#[test]
fn report_invariants_on_canonical() {
    let s = Scenario::canonical();
    let (_, r) = analyze(&s);
    let leak = r.leakage.area().unwrap();
    assert!(r.indoor_area >= 0.0 && leak >= 0.0);
    assert!(r.indoor_area + leak <= r.covered_area + 1e-12);
    assert!(r.component_count >= 1);
    assert_eq!(r.contours.len(), r.raw_contours.len());
}

#[test]
fn small_separation_no_wall_is_one_oval() {
    let s = Scenario::canonical()
        .without_wall()
        .with_wall_distance(2.5)
        .with_txrx_distance(1.0);
    let (_, r) = analyze(&s);
    assert_eq!(r.component_count, 1);
}

#[test]
fn large_separation_no_wall_splits() {
    let s = Scenario::canonical()
        .without_wall()
        .with_wall_distance(1.0)
        .with_txrx_distance(5.0);
    let (_, r) = analyze(&s);
    assert!(r.component_count >= 2);
}

#[test]
fn exports_preserve_values() {
    let s = Scenario::canonical();
    let field = evaluate_field(&s, &s.grid.with_resolution(0.25));
    let back = read_field_csv_values(&field_csv_string(&field)).unwrap();
    assert_eq!(back.len(), field.values.len());
    for (a, b) in field.values.iter().zip(&back) {
        assert!(same_bits(*a, *b));
    }

    let range = PgmRange::for_field(&field);
    let mut pgm = Vec::new();
    write_field_pgm(&field, range, &mut pgm).unwrap();
    let header = format!("P5\n{} {}\n65535\n", field.grid.cols(), field.grid.rows());
    assert!(pgm.starts_with(header.as_bytes()));
    let body = &pgm[header.len()..];
    assert_eq!(body.len(), field.values.len() * 2);
    let step = (range.max_db - range.min_db) / 65534.0;
    for (col, row) in [(0, 0), (10, 5), (20, 30), (47, 31), (3, 17)] {
        let image_row = field.grid.rows() - 1 - row;
        let at = 2 * (image_row * field.grid.cols() + col);
        let level = u16::from_be_bytes([body[at], body[at + 1]]);
        let v = field.get(col, row);
        match range.db(level) {
            None => assert!(v.is_nan()),
            Some(db) => assert!((db - v.clamp(range.min_db, range.max_db)).abs() <= step),
        }
    }
}
