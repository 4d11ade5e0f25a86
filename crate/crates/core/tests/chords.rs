use coble::chords::{
    third_point, third_point_oracle, third_point_zero_contraction, zero_contraction_candidates, ChordError,
    GroupContext, PointPool,
};
use coble::exterior::Trivector;
use coble::field::PrimeField;
use coble::pfaffloci::{rank_at, ProjPoint};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn setup(q: u32, seed: u64) -> (PrimeField, Trivector, ChaCha8Rng) {
    let f = PrimeField::new(q).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = Trivector::random(&f, 9, &mut rng);
    (f, w, rng)
}

fn zero_contraction(f: &PrimeField, w: &Trivector, a: &ProjPoint, b: &ProjPoint) -> bool {
    w.double_contract(f, a.coords(), b.coords()).unwrap().iter().all(|&c| c == 0)
}

/// Random pairs of distinct pool points with nonzero contraction.
fn chords(f: &PrimeField, w: &Trivector, pts: &[ProjPoint], n: usize, rng: &mut ChaCha8Rng) -> Vec<(ProjPoint, ProjPoint)> {
    let mut out = Vec::new();
    while out.len() < n {
        let a = pts.choose(rng).unwrap();
        let b = pts.choose(rng).unwrap();
        if a != b && !zero_contraction(f, w, a, b) {
            out.push((a.clone(), b.clone()));
        }
    }
    out
}

#[test]
fn third_point_of_a_point_with_itself_fails() {
    let (f, w, mut rng) = setup(11, 1);
    let pool = PointPool::grow(&f, &w, 20, &mut rng).unwrap();
    let p = &pool.points()[0];
    assert!(third_point(&f, &w, p.coords(), p.coords(), &mut rng).is_err());
}

#[test]
fn constructive_triples_share_the_contraction_line() {
    let (f, w, mut rng) = setup(11, 1);
    let pool = PointPool::grow(&f, &w, 150, &mut rng).unwrap();
    let pairs = chords(&f, &w, pool.points(), 200, &mut rng);
    let mut ok = 0;
    for (a, b) in &pairs {
        if let Ok(t) = third_point(&f, &w, a.coords(), b.coords(), &mut rng) {
            assert!(t.verify(&f, &w));
            assert!(rank_at(&f, &w, t.r.coords()) <= 4);
            if t.strict {
                let cs = t.contractions(&f, &w);
                assert!(cs.iter().all(|c| f.same_line(c, t.v1.coords())));
            }
            ok += 1;
        }
    }
    assert!(ok >= 190, "constructive success {ok}/200");
}

#[test]
fn chords_are_symmetric() {
    let (f, w, mut rng) = setup(11, 1);
    let pool = PointPool::grow(&f, &w, 150, &mut rng).unwrap();
    let mut g = GroupContext::new(&f, &w, pool.clone(), 5).unwrap();
    for _ in 0..60 {
        let (a, b) = (g.sample(), g.sample());
        if a == b {
            continue;
        }
        let r = g.third(&a, &b).unwrap();
        assert_eq!(g.third(&b, &a).unwrap(), r);
        if r != a && r != b {
            assert_eq!(g.third(&a, &r).unwrap(), b);
            assert_eq!(g.third(&b, &r).unwrap(), a);
        }
    }
}

#[test]
fn oracle_agrees_with_constructive_third_point() {
    let (f, w, mut rng) = setup(7, 3);
    let pool = PointPool::full_scan(&f, &w).unwrap();
    let pairs = chords(&f, &w, pool.points(), 100, &mut rng);
    let (mut unique, mut compared) = (0, 0);
    for (a, b) in &pairs {
        let o = third_point_oracle(&f, &w, a.coords(), b.coords(), &mut rng);
        if let Ok(o) = &o {
            unique += 1;
            assert!(o.verify(&f, &w));
            if let Ok(c) = third_point(&f, &w, a.coords(), b.coords(), &mut rng) {
                assert_eq!(c.r, o.r);
                compared += 1;
            }
        }
    }
    assert!(unique >= 95, "oracle unique on {unique}/100");
    assert!(compared >= 90);
}

#[test]
fn oracle_refuses_large_fields() {
    let (f, w, mut rng) = setup(37, 0);
    let p = vec![1u32; 9];
    assert_eq!(
        third_point_oracle(&f, &w, &p, &p, &mut rng).unwrap_err(),
        ChordError::FieldTooLarge(37)
    );
}

/// At q=7 every third point can be found by brute force: R is the pool point
/// X with third(X, P) = Q through a nondegenerate chord.
#[test]
fn zero_contraction_solver_matches_search() {
    let (f, w, mut rng) = setup(7, 3);
    let pool = PointPool::full_scan(&f, &w).unwrap();
    let pts = pool.points();
    let mut checked = 0;
    for a in pts {
        for b in pts {
            if a >= b || !zero_contraction(&f, &w, a, b) {
                continue;
            }
            let truth: Vec<&ProjPoint> = pts
                .iter()
                .filter(|x| *x != a && *x != b && !zero_contraction(&f, &w, x, a))
                .filter(|x| third_point(&f, &w, x.coords(), a.coords(), &mut rng).is_ok_and(|t| t.r == *b))
                .collect();
            let cands = zero_contraction_candidates(&f, &w, a.coords(), b.coords()).unwrap();
            if truth.len() == 1 {
                assert_eq!(cands.len(), 1);
                assert_eq!(cands[0].r, *truth[0]);
                assert!(cands[0].verify(&f, &w));
                checked += 1;
            }
        }
    }
    assert!(checked > 50, "checked {checked}");
}

#[test]
fn zero_contraction_solver_rejects_ordinary_chords() {
    let (f, w, mut rng) = setup(7, 3);
    let pool = PointPool::full_scan(&f, &w).unwrap();
    let (a, b) = chords(&f, &w, pool.points(), 1, &mut rng).pop().unwrap();
    assert!(third_point_zero_contraction(&f, &w, a.coords(), b.coords()).is_err());
}

#[test]
fn group_laws_hold_on_the_full_surface() {
    let (f, w, _) = setup(7, 3);
    let pool = PointPool::full_scan(&f, &w).unwrap();
    let n = pool.len() as i64;
    let mut g = GroupContext::new(&f, &w, pool, 11).unwrap();
    let e = g.identity.clone();
    assert_eq!(e, g.pool().points()[0]);
    for _ in 0..40 {
        let (x, y, z) = (g.sample(), g.sample(), g.sample());
        assert_eq!(g.add(&x, &e).unwrap(), x);
        let xy = g.add(&x, &y).unwrap();
        assert_eq!(xy, g.add(&y, &x).unwrap());
        let yz = g.add(&y, &z).unwrap();
        assert_eq!(g.add(&xy, &z).unwrap(), g.add(&x, &yz).unwrap());
        let nx = g.neg(&x).unwrap();
        assert_eq!(g.add(&x, &nx).unwrap(), e);
        assert_eq!(g.double(&x).unwrap(), g.double_via_aux(&x).unwrap());
    }
    for _ in 0..10 {
        let x = g.sample();
        assert_eq!(g.scalar_mul(n, &x).unwrap(), e);
        assert_eq!(g.scalar_mul(1, &x).unwrap(), x);
        assert_eq!(g.scalar_mul(0, &x).unwrap(), e);
        let m = g.scalar_mul(-1, &x).unwrap();
        assert_eq!(m, g.neg(&x).unwrap());
    }
    assert_eq!(g.stats.failed, 0);
}

#[test]
fn chord_constant_is_the_sum_over_every_triple() {
    let (f, w, mut rng) = setup(11, 1);
    let pool = PointPool::grow(&f, &w, 150, &mut rng).unwrap();
    let mut g = GroupContext::new(&f, &w, pool.clone(), 2).unwrap();
    let k = g.chord_constant.clone();
    for _ in 0..40 {
        let (a, b) = (g.sample(), g.sample());
        if a == b {
            continue;
        }
        let r = g.third(&a, &b).unwrap();
        assert_eq!(g.sum3(&a, &b, &r).unwrap(), k);
    }
    // a different identity moves the constant but not the triples
    let e2 = pool.points()[1].clone();
    let mut h = GroupContext::with_identity(&f, &w, pool, e2, 3).unwrap();
    assert_ne!(h.chord_constant, k);
    for _ in 0..20 {
        let (a, b) = (g.sample(), g.sample());
        if a != b {
            assert_eq!(g.third(&a, &b).unwrap(), h.third(&a, &b).unwrap());
        }
    }
}
