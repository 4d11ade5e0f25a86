use std::sync::OnceLock;

use coble::chords::third_point;
use coble::exterior::Trivector;
use coble::field::PrimeField;
use coble::pfaffloci::{coble_cubic, on_abelian, rank_at, ProjPoint};
use coble::scanner::{
    curve_points, enumerate_a, enumerate_a_reference, hyperplane_section, rank_census, LineCubic, ScanError,
    ScanReport,
};
use coble::session::{generate, Generated};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture() -> &'static (Generated, ScanReport) {
    static F: OnceLock<(Generated, ScanReport)> = OnceLock::new();
    F.get_or_init(|| {
        let g = generate(7, 0).unwrap();
        let scan = enumerate_a(&g.field, &g.omega).unwrap();
        (g, scan)
    })
}

#[test]
fn surface_count_is_in_the_weil_window() {
    let (g, scan) = fixture();
    let q = 7.0f64;
    let n = scan.count as f64;
    assert!((n / (q * q) - 1.0).abs() <= 10.0 / q.sqrt(), "{n}");
    assert_eq!(scan.count, scan.points.len());
    assert!(scan.points.windows(2).all(|w| w[0] < w[1]));
    assert!(scan.points.iter().all(|p| rank_at(&g.field, &g.omega, p.coords()) == 4));
}

#[test]
fn scans_do_not_depend_on_the_worker_count() {
    let (g, scan) = fixture();
    for threads in [1, 3] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let again = pool.install(|| enumerate_a(&g.field, &g.omega).unwrap());
        assert!(again.same_result(scan));
    }
}

#[test]
fn prefilter_never_drops_a_point() {
    let f = PrimeField::new(5).unwrap();
    let mut nonempty = 0;
    for seed in 0..3 {
        let w = Trivector::random(&f, 9, &mut ChaCha8Rng::seed_from_u64(seed));
        let fast = enumerate_a(&f, &w).unwrap();
        let slow = enumerate_a_reference(&f, &w).unwrap();
        assert_eq!(fast.points, slow);
        nonempty += usize::from(!slow.is_empty());
    }
    assert!(nonempty > 0);
}

#[test]
fn finite_differences_match_direct_evaluation() {
    let f = PrimeField::new(13).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    while checked < 100_000 {
        let g: [u32; 4] = std::array::from_fn(|_| rng.gen_range(0..13));
        let vals = LineCubic::line_values_from(&f, g);
        for (t, &v) in vals.iter().enumerate() {
            let t = t as u32;
            let direct = f.add(f.add(g[0], f.mul(g[1], t)), f.add(f.mul(g[2], f.mul(t, t)), f.mul(g[3], f.mul(t, f.mul(t, t)))));
            assert_eq!(v, direct);
        }
        checked += vals.len();
    }
}

#[test]
fn curves_through_surface_points() {
    let (g, scan) = fixture();
    let (f, w) = (&g.field, &g.omega);
    let q = 7.0f64;
    for p in scan.points.iter().take(20) {
        let c = curve_points(f, w, p.coords()).unwrap();
        assert!(c.points.contains(p));
        assert!(c.points.iter().all(|x| on_abelian(f, w, x.coords())));
        assert!((c.count as f64 - (q + 1.0)).abs() <= 4.0 * q.sqrt(), "{}", c.count);
    }
}

#[test]
fn section_by_a_chord_vector_is_three_curves() {
    let (g, scan) = fixture();
    let (f, w) = (&g.field, &g.omega);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let on_curve = |c: &ProjPoint, x: &ProjPoint| w.double_contract(f, c.coords(), x.coords()).unwrap().iter().all(|&v| v == 0);
    let mut done = 0;
    for i in 0..scan.points.len() {
        for j in i + 1..scan.points.len() {
            let (p, qq) = (&scan.points[i], &scan.points[j]);
            let v = w.double_contract(f, p.coords(), qq.coords()).unwrap();
            if v.iter().all(|&c| c == 0) {
                continue;
            }
            let t = third_point(f, w, p.coords(), qq.coords(), &mut rng).unwrap();
            let section = hyperplane_section(f, &scan.points, &v).unwrap();
            for x in &section.points {
                assert!(on_curve(&t.p, x) || on_curve(&t.q, x) || on_curve(&t.r, x));
            }
            for c in [&t.p, &t.q, &t.r] {
                let curve = curve_points(f, w, c.coords()).unwrap();
                assert!(curve.points.iter().all(|x| section.points.contains(x)));
            }
            done += 1;
            if done == 10 {
                return;
            }
        }
    }
    panic!("only {done} chords");
}

#[test]
fn census_matches_the_surface() {
    let (g, scan) = fixture();
    let cubic = coble_cubic(&g.field, &g.omega).unwrap();
    let census = rank_census(&g.field, &g.omega, &cubic.form).unwrap();
    assert_eq!(census.counts[0], 0);
    assert_eq!(census.counts[1], 0);
    assert_eq!(census.counts[2] as usize, scan.count);
    assert_eq!(census.total(), (7u64.pow(9) - 1) / 6);
    // a cubic hypersurface has about q⁷ points
    let r6 = census.counts[3] as f64;
    assert!((r6 / 7f64.powi(7) - 1.0).abs() < 0.5, "{r6}");
}

#[test]
fn large_fields_are_refused() {
    let f = PrimeField::new(17).unwrap();
    let w = Trivector::random(&f, 9, &mut ChaCha8Rng::seed_from_u64(0));
    assert!(matches!(enumerate_a(&f, &w), Err(ScanError::FieldTooLarge { q: 17, limit: 13 })));
    let big = PrimeField::new(37).unwrap();
    let w = Trivector::random(&big, 9, &mut ChaCha8Rng::seed_from_u64(0));
    assert!(matches!(curve_points(&big, &w, &[1, 0, 0, 0, 0, 0, 0, 0, 0]), Err(ScanError::FieldTooLarge { .. })));
}

#[test]
fn report_json_keys() {
    let (_, scan) = fixture();
    let v = serde_json::to_value(scan).unwrap();
    for key in ["q", "predicate", "count", "points", "millis"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["points"][0].as_array().unwrap().len(), 9);
}
