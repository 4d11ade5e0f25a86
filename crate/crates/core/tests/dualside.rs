use std::sync::{Mutex, OnceLock};

use coble::chords::{GroupContext, PointPool};
use coble::dualside::{
    calibrate, classify_point, hilb3_points, multiplicity, sextic_interpolate, sigma_image, smooth_cubic_points, t_flag,
    triple_cover_enumerate, x_flag, z_flag, Calibration, CoverPair, DualError, FlagModel, Stratum,
};
use coble::exterior::{Subspace, Trivector};
use coble::field::PrimeField;
use coble::pfaffloci::{coble_cubic, p4_of, HomogeneousForm, ProjPoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn setup(q: u32, seed: u64) -> (PrimeField, Trivector, ChaCha8Rng, GroupContext) {
    let f = PrimeField::new(q).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = Trivector::random(&f, 9, &mut rng);
    let pool = PointPool::grow(&f, &w, 150, &mut rng).unwrap();
    let g = GroupContext::new(&f, &w, pool, seed + 100).unwrap();
    (f, w, rng, g)
}

/// Chord triples (P, Q, R) with all three contractions nonzero.
fn strict_triples(f: &PrimeField, w: &Trivector, g: &mut GroupContext, n: usize) -> Vec<[ProjPoint; 3]> {
    let mut out = Vec::new();
    while out.len() < n {
        let (p, q) = (g.sample(), g.sample());
        if p == q {
            continue;
        }
        let Ok(r) = g.third(&p, &q) else { continue };
        let nz = |a: &ProjPoint, b: &ProjPoint| sigma_image(f, w, a.coords(), b.coords()).is_ok();
        if r != p && r != q && nz(&p, &q) && nz(&p, &r) && nz(&q, &r) {
            out.push([p, q, r]);
        }
    }
    out
}

fn gradient_vanishes(grad: &[HomogeneousForm], x: &[u32]) -> bool {
    grad.iter().all(|g| g.eval(x) == 0)
}

#[test]
fn sigma_image_is_shared_by_the_triple() {
    let (f, w, _, mut g) = setup(11, 1);
    for [p, q, r] in strict_triples(&f, &w, &mut g, 40) {
        let s = sigma_image(&f, &w, p.coords(), q.coords()).unwrap();
        assert_eq!(s, sigma_image(&f, &w, q.coords(), p.coords()).unwrap());
        assert_eq!(s, sigma_image(&f, &w, p.coords(), r.coords()).unwrap());
        assert_eq!(s, sigma_image(&f, &w, q.coords(), r.coords()).unwrap());
    }
    let p = g.sample();
    assert_eq!(sigma_image(&f, &w, p.coords(), p.coords()), Err(DualError::ZeroContraction));
}

#[test]
fn sigma_images_span_v9() {
    let (f, w, _, mut g) = setup(11, 1);
    let mut imgs = Vec::new();
    while imgs.len() < 200 {
        let (p, q) = (g.sample(), g.sample());
        if let Ok(s) = sigma_image(&f, &w, p.coords(), q.coords()) {
            imgs.push(s.into_coords());
        }
    }
    assert_eq!(Subspace::span(f, 9, &imgs).dim(), 9);
}

#[test]
fn t_flags_certify_on_random_chords() {
    let (f, w, mut rng, mut g) = setup(11, 1);
    let (mut ok, mut tried) = (0, 0);
    while tried < 100 {
        let (p, q) = (g.sample(), g.sample());
        if p == q || sigma_image(&f, &w, p.coords(), q.coords()).is_err() {
            continue;
        }
        tried += 1;
        match t_flag(&f, &w, p.coords(), q.coords(), &mut rng) {
            Ok(t) => {
                assert_eq!(t.model, FlagModel::T);
                assert_eq!(t.flag.dims(), vec![1, 5, 7]);
                assert!(t.verify_membership(&f, &w).unwrap());
                ok += 1;
            }
            Err(DualError::MembershipFailed(_)) => panic!("membership failed"),
            Err(_) => {}
        }
    }
    assert!(ok >= 95, "certified {ok}/100");
}

#[test]
fn z_and_x_flags_certify_on_random_triples() {
    let (f, w, mut rng, mut g) = setup(11, 2);
    let triples = strict_triples(&f, &w, &mut g, 100);
    let mut ok = 0;
    for [p, q, r] in &triples {
        let (p, q, r) = (p.coords(), q.coords(), r.coords());
        let Ok(z) = z_flag(&f, &w, p, q, r, &mut rng) else { continue };
        assert_eq!(z.flag.dims(), vec![1, 3, 6]);
        let ts = [
            t_flag(&f, &w, p, q, &mut rng).unwrap(),
            t_flag(&f, &w, p, r, &mut rng).unwrap(),
            t_flag(&f, &w, q, r, &mut rng).unwrap(),
        ];
        assert!(ts.iter().all(|t| t.member(1) == z.member(1)));
        let xs = [
            x_flag(&f, &w, p, q, r, &mut rng).unwrap(),
            x_flag(&f, &w, p, r, q, &mut rng).unwrap(),
            x_flag(&f, &w, q, r, p, &mut rng).unwrap(),
        ];
        for x in &xs {
            assert_eq!(x.flag.dims(), vec![1, 3, 5, 6, 7]);
            assert_eq!(x.member(6), z.member(6));
        }
        assert!(xs[0] != xs[1] && xs[0] != xs[2] && xs[1] != xs[2]);
        ok += 1;
    }
    assert!(ok >= 95, "certified {ok}/100");
}

#[test]
fn triple_cover_has_three_sheets_matching_the_t_flags() {
    let (f, w, mut rng, mut g) = setup(11, 3);
    let triples = strict_triples(&f, &w, &mut g, 50);
    let mut three = 0;
    for [p, q, r] in &triples {
        let (p, q, r) = (p.coords(), q.coords(), r.coords());
        let z = z_flag(&f, &w, p, q, r, &mut rng).unwrap();
        let mut cover = triple_cover_enumerate(&f, &w, &z).unwrap();
        if cover.len() != 3 {
            continue;
        }
        three += 1;
        let mut from_t: Vec<CoverPair> = [(p, q), (p, r), (q, r)]
            .iter()
            .map(|(a, b)| {
                let t = t_flag(&f, &w, a, b, &mut rng).unwrap();
                CoverPair {
                    v5: t.member(5).clone(),
                    v7: t.member(7).clone(),
                }
            })
            .collect();
        let key = |c: &CoverPair| (c.v5.basis().to_vec(), c.v7.basis().to_vec());
        cover.sort_by_key(key);
        from_t.sort_by_key(key);
        assert_eq!(cover, from_t);
    }
    assert!(three >= 48, "three sheets on {three}/50");
}

#[test]
fn z_flag_recovers_its_three_points() {
    let (f, w, mut rng, mut g) = setup(11, 4);
    for [p, q, r] in strict_triples(&f, &w, &mut g, 30) {
        let z = z_flag(&f, &w, p.coords(), q.coords(), r.coords(), &mut rng).unwrap();
        let mut expect = vec![p, q, r];
        expect.sort();
        assert_eq!(hilb3_points(&f, &w, &z).unwrap(), expect);
    }
}

/// ω = e₀∧σ + y₄ with y₄ on e₁..e₈ and σ a random 2-form on e₁..e₈: the
/// hyperplanes v₁*, v₂*+v₃*, v₂*−v₃* form a chord triple over [e₀].
#[test]
fn z_flag_on_the_embedded_y4_example() {
    let f = PrimeField::new(11).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let y4 = [[4, 5, 6], [1, 4, 7], [2, 5, 7], [2, 6, 8], [3, 5, 8], [3, 6, 7]];
    let cov = |c: &[(usize, u32)]| {
        let mut v = vec![0u32; 9];
        for &(i, x) in c {
            v[i] = x;
        }
        v
    };
    let p = cov(&[(1, 1)]);
    let q = cov(&[(2, 1), (3, 1)]);
    let r = cov(&[(2, 1), (3, f.neg(1))]);
    // σ general: every pairwise contraction, a multiple of e₀, is nonzero
    let w = loop {
        let mut entries: Vec<([usize; 3], u32)> = y4.iter().map(|&t| (t, 1)).collect();
        for i in 1..9 {
            for j in i + 1..9 {
                entries.push(([0, i, j], f.random(&mut rng)));
            }
        }
        let w = Trivector::from_entries(&f, 9, &entries).unwrap();
        let pairs = [(&p, &q), (&p, &r), (&q, &r)];
        if pairs.iter().all(|(a, b)| sigma_image(&f, &w, a, b).is_ok()) {
            break w;
        }
    };
    for (a, b) in [(&p, &q), (&p, &r), (&q, &r)] {
        assert_eq!(sigma_image(&f, &w, a, b).unwrap().coords(), cov(&[(0, 1)]).as_slice());
    }
    let z = z_flag(&f, &w, &p, &q, &r, &mut rng).unwrap();
    assert_eq!(z.member(1), &Subspace::coordinate(f, 9, &[0]));
    assert_eq!(z.member(6), &Subspace::coordinate(f, 9, &[0, 4, 5, 6, 7, 8]));
    let mut expect: Vec<ProjPoint> = [p, q, r].iter().map(|v| ProjPoint::new(&f, v).unwrap()).collect();
    expect.sort();
    assert_eq!(hilb3_points(&f, &w, &z).unwrap(), expect);
}

struct Sextic {
    f: PrimeField,
    w: Trivector,
    c3: HomogeneousForm,
    c6: HomogeneousForm,
    ctx: Mutex<GroupContext>,
    cal: Calibration,
}

fn sextic() -> &'static Sextic {
    static S: OnceLock<Sextic> = OnceLock::new();
    S.get_or_init(|| {
        let (f, w, _, mut ctx) = setup(23, 1);
        let c3 = coble_cubic(&f, &w).unwrap().form;
        let c6 = sextic_interpolate(&f, &w, 1).unwrap();
        let cal = calibrate(&c6, &mut ctx, 20, 6).unwrap();
        Sextic {
            f,
            w,
            c3,
            c6,
            ctx: Mutex::new(ctx),
            cal,
        }
    })
}

#[test]
fn sextic_vanishes_on_the_dual_of_the_cubic() {
    let s = sextic();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let grad3 = s.c3.gradient();
    let grad6 = s.c6.gradient();
    let pts = smooth_cubic_points(&s.f, &s.c3, 500, &mut rng);
    assert_eq!(pts.len(), 500);
    let mut smooth = 0;
    for x in &pts {
        let y: Vec<u32> = grad3.iter().map(|g| g.eval(x.coords())).collect();
        assert_eq!(s.c6.eval(&y), 0);
        if !gradient_vanishes(&grad6, &y) {
            smooth += 1;
        }
    }
    // the dual map is birational, so its image is generically smooth
    assert!(smooth >= 450, "smooth {smooth}/500");
}

#[test]
fn sextic_is_singular_along_the_contraction_strata() {
    let s = sextic();
    let grad6 = s.c6.gradient();
    let mut ctx = s.ctx.lock().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut chords = 0;
    while chords < 100 {
        let (p, q) = (ctx.sample(), ctx.sample());
        if let Ok(x) = sigma_image(&s.f, &s.w, p.coords(), q.coords()) {
            assert!(gradient_vanishes(&grad6, x.coords()));
            chords += 1;
        }
    }
    for _ in 0..50 {
        let p = ctx.sample();
        let p4 = p4_of(&s.f, &s.w, p.coords()).unwrap();
        let mut x = vec![0u32; 9];
        for b in p4.basis() {
            s.f.axpy(s.f.random(&mut rng), b, &mut x);
        }
        assert!(gradient_vanishes(&grad6, &x));
    }
}

#[test]
fn tangent_images_are_deeper_than_chord_images() {
    let s = sextic();
    let grad6 = s.c6.gradient();
    let mut ctx = s.ctx.lock().unwrap();
    let mut seen = 0;
    for _ in 0..60 {
        let p = ctx.sample();
        if let Ok(x) = coble::dualside::dy6_image(&mut ctx, &p) {
            assert!(gradient_vanishes(&grad6, x.coords()));
            seen += 1;
        }
    }
    assert!(seen >= 50);
    assert!(s.cal.dy6.at_least(&s.cal.dy4) && s.cal.dy6 != s.cal.dy4);
    assert!(s.cal.dy4.at_least(&s.cal.dy3));
    assert!(s.cal.dy4.multiplicity >= 2);
}

#[test]
fn classification_follows_the_strata() {
    let s = sextic();
    let f = s.f;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let off = (0..300)
        .filter(|_| {
            let x = f.random_vector(9, &mut rng);
            classify_point(&s.c6, &x, &s.cal, &mut rng).stratum == Stratum::OffSextic
        })
        .count();
    let expect = 300.0 * (1.0 - 1.0 / 23.0);
    assert!((off as f64 - expect).abs() < 4.0 * (300.0f64 / 23.0).sqrt(), "off {off}");

    let grad3 = s.c3.gradient();
    let smooth = smooth_cubic_points(&f, &s.c3, 100, &mut rng)
        .iter()
        .filter(|x| {
            let y: Vec<u32> = grad3.iter().map(|g| g.eval(x.coords())).collect();
            classify_point(&s.c6, &y, &s.cal, &mut rng).stratum == Stratum::SexticSmooth
        })
        .count();
    assert!(smooth >= 90, "smooth {smooth}/100");

    let mut ctx = s.ctx.lock().unwrap();
    let mut n = 0;
    while n < 50 {
        let (p, q) = (ctx.sample(), ctx.sample());
        if let Ok(x) = sigma_image(&f, &s.w, p.coords(), q.coords()) {
            let l = classify_point(&s.c6, x.coords(), &s.cal, &mut rng);
            assert!(matches!(l.stratum, Stratum::DY4 | Stratum::DY6 | Stratum::DY8), "{l:?}");
            n += 1;
        }
    }
}

#[test]
fn labels_are_monotone_in_the_evidence() {
    let s = sextic();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let grad3 = s.c3.gradient();
    let mut ctx = s.ctx.lock().unwrap();
    let mut labelled = Vec::new();
    for x in smooth_cubic_points(&s.f, &s.c3, 20, &mut rng) {
        let y: Vec<u32> = grad3.iter().map(|g| g.eval(x.coords())).collect();
        labelled.push(classify_point(&s.c6, &y, &s.cal, &mut rng));
    }
    for _ in 0..20 {
        let (p, q) = (ctx.sample(), ctx.sample());
        if let Ok(x) = sigma_image(&s.f, &s.w, p.coords(), q.coords()) {
            labelled.push(classify_point(&s.c6, x.coords(), &s.cal, &mut rng));
        }
        if let Ok(x) = coble::dualside::dy6_image(&mut ctx, &p) {
            labelled.push(classify_point(&s.c6, x.coords(), &s.cal, &mut rng));
        }
    }
    let rank = |st: Stratum| match st {
        Stratum::Undetermined => None,
        other => Some(other),
    };
    for a in &labelled {
        for b in &labelled {
            if let (Some(sa), Some(sb)) = (rank(a.stratum), rank(b.stratum)) {
                if a.evidence.at_least(&b.evidence) {
                    assert!(sa >= sb, "{a:?} vs {b:?}");
                }
            }
        }
    }
}

#[test]
fn multiplicity_of_simple_forms() {
    let f = PrimeField::new(23).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    // x0^2 x1 + x2^3 in three variables
    let x = |i| HomogeneousForm::variable(f, 3, i);
    let g = x(0).mul(&x(0)).mul(&x(1)).add(&x(2).mul(&x(2)).mul(&x(2)));
    assert_eq!(multiplicity(&g, &[1, 1, 1], 4, &mut rng), 0);
    assert_eq!(multiplicity(&g, &[1, 0, 0], 4, &mut rng), 1);
    assert_eq!(multiplicity(&g, &[0, 1, 0], 4, &mut rng), 2);
}
