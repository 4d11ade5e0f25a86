use coble::dualside::cover_pairs;
use coble::exterior::{Subspace, Trivector};
use coble::field::PrimeField;
use coble::orbits8::{
    classify8, fingerprint, normal_form, transport, transport_matrix, y3_flags, y4_resolution_flag,
    y4_three_flags, y4_triple_flags, y6_flag, FingerprintDb, KempfRow, OrbitError, OrbitLabel, Trivector8,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn f(q: u32) -> PrimeField {
    PrimeField::new(q).unwrap()
}

fn sorted(mut v: Vec<(Subspace, Subspace)>) -> Vec<(Subspace, Subspace)> {
    v.sort_by_key(|(a, b)| (a.basis().to_vec(), b.basis().to_vec()));
    v
}

#[test]
fn normal_forms_are_the_printed_tensors() {
    let f = f(7);
    let y4 = normal_form(&f, OrbitLabel::Y4).unwrap();
    let nz: Vec<_> = y4.y.nonzero_entries().collect();
    assert_eq!(nz.len(), 6);
    assert!(nz.iter().all(|&(_, v)| v == 1));
    assert_eq!(y4.label, Some(OrbitLabel::Y4));
    // y₆ is y₄ without v₃₆₇
    let y6 = normal_form(&f, OrbitLabel::Y6).unwrap().y;
    let v367 = Trivector::from_entries(&f, 8, &[([2, 5, 6], 1)]).unwrap();
    assert_eq!(y6.add(&f, &v367), y4.y);
    assert!(matches!(normal_form(&f, OrbitLabel::Generic), Err(OrbitError::UnknownLabel(_))));
    assert!(matches!("y5".parse::<OrbitLabel>(), Err(OrbitError::UnknownLabel(_))));
}

#[test]
fn printed_flags_certify() {
    let f = f(7);
    let y3 = normal_form(&f, OrbitLabel::Y3).unwrap().y;
    for flag in y3_flags(&f) {
        assert!(KempfRow::Y3.contains(&y3, &flag).unwrap());
    }
    let y4 = normal_form(&f, OrbitLabel::Y4).unwrap().y;
    assert!(KempfRow::Y4Resolution.contains(&y4, &y4_resolution_flag(&f)).unwrap());
    for flag in y4_triple_flags(&f) {
        assert!(KempfRow::Y4Triple.contains(&y4, &flag).unwrap());
    }
    let y6 = normal_form(&f, OrbitLabel::Y6).unwrap().y;
    assert!(KempfRow::Y6.contains(&y6, &y6_flag(&f)).unwrap());
    // Y₆ ⊂ Y₄ ⊂ Y₃, so the inclusions only go one way
    assert!(KempfRow::Y4Triple.contains(&y6, &y4_triple_flags(&f)[0]).unwrap());
    assert!(!KempfRow::Y4Triple.contains(&y3, &y4_triple_flags(&f)[0]).unwrap());
    assert!(!KempfRow::Y6.contains(&y4, &y6_flag(&f)).unwrap());
}

#[test]
fn kempf_rows_reject_wrong_dimensions() {
    let f = f(7);
    let y = normal_form(&f, OrbitLabel::Y3).unwrap().y;
    assert!(KempfRow::Y3.contains(&y, &y4_resolution_flag(&f)).is_err());
}

#[test]
fn transport_preserves_fingerprints_and_flags() {
    let f = f(5);
    let zero = Trivector8::new(Trivector::zero(8)).unwrap();
    assert!(transport(&f, &zero, 3).y.is_zero());
    let y3 = normal_form(&f, OrbitLabel::Y3).unwrap();
    let base = fingerprint(&f, &y3.y).unwrap();
    for seed in 0..10 {
        let t = transport(&f, &y3, seed);
        assert_eq!(t.label, Some(OrbitLabel::Y3));
        assert_eq!(fingerprint(&f, &t.y).unwrap(), base);
        let g = transport_matrix(&f, seed);
        for flag in y3_flags(&f) {
            let moved: Vec<Subspace> = flag.iter().map(|s| s.image(&g)).collect();
            assert!(KempfRow::Y3.contains(&t.y, &moved).unwrap());
        }
    }
}

#[test]
fn fingerprint_basics() {
    let f = f(5);
    let total = (5u64.pow(8) - 1) / 4;
    let zero = fingerprint(&f, &Trivector::zero(8)).unwrap();
    assert_eq!(zero.counts, [total, 0, 0, 0, 0]);
    let v123 = Trivector::from_entries(&f, 8, &[([0, 1, 2], 1)]).unwrap();
    let fp = fingerprint(&f, &v123).unwrap();
    assert_eq!(fp.total(), total);
    assert_eq!(fp.counts[2..], [0, 0, 0]);
    assert!(fp.counts[1] > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    assert_eq!(fingerprint(&f, &Trivector::random(&f, 8, &mut rng)).unwrap().total(), total);
    assert_eq!(
        fingerprint(&PrimeField::new(13).unwrap(), &v123),
        Err(OrbitError::FieldTooLarge(13))
    );
}

#[test]
fn database_separates_and_classifies() {
    let f = f(5);
    let db = FingerprintDb::build(&f).unwrap();
    assert!(db.separates(5));
    let json = serde_json::to_string(&db).unwrap();
    assert_eq!(serde_json::from_str::<FingerprintDb>(&json).unwrap(), db);
    for label in [OrbitLabel::Y3, OrbitLabel::Y4, OrbitLabel::Y6] {
        let y = normal_form(&f, label).unwrap();
        assert_eq!(classify8(&db, &f, &y.y).unwrap(), label);
        for seed in 0..50 {
            let t = transport(&f, &y, 1000 * label as u64 + seed);
            assert_eq!(classify8(&db, &f, &t.y).unwrap(), label);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let generic = (0..10)
        .filter(|_| classify8(&db, &f, &Trivector::random(&f, 8, &mut rng)).unwrap() == OrbitLabel::Generic)
        .count();
    assert!(generic >= 8, "generic {generic}/10");
    // a decomposable tensor is none of the known orbits
    let v123 = Trivector::from_entries(&f, 8, &[([0, 1, 2], 1)]).unwrap();
    assert_eq!(classify8(&db, &f, &v123).unwrap(), OrbitLabel::Unknown);
}

#[test]
fn y4_has_exactly_the_three_printed_flags() {
    let f = f(11);
    let y = normal_form(&f, OrbitLabel::Y4).unwrap().y;
    let [v2, v5] = <[Subspace; 2]>::try_from(y4_resolution_flag(&f)).unwrap();
    let expect: Vec<(Subspace, Subspace)> =
        sorted(y4_triple_flags(&f).into_iter().map(|m| (m[0].clone(), m[1].clone())).collect());
    let found = sorted(y4_three_flags(&f, &y, &v2, &v5).unwrap());
    assert_eq!(found, expect);
    for (u4, u6) in &found {
        assert!(KempfRow::Y4Triple.contains(&y, &[u4.clone(), u6.clone()]).unwrap());
        assert!(KempfRow::Y4Nested.contains(&y, &[v2.clone(), u4.clone(), v5.clone(), u6.clone()]).unwrap());
    }
    // the same pairs from the Z-flag cover enumeration with V₁ = 0
    let pairs = cover_pairs(&f, &y, &Subspace::zero(f, 8), &v2, &v5).unwrap();
    let via_cover = sorted(pairs.into_iter().map(|c| (c.v5, c.v7)).collect());
    assert_eq!(via_cover, expect);
    // a flag that does not carry y is rejected
    let (w2, w5) = (Subspace::coordinate(f, 8, &[0, 1]), Subspace::coordinate(f, 8, &[0, 1, 2, 3, 4]));
    assert_eq!(y4_three_flags(&f, &y, &w2, &w5), Err(OrbitError::MembershipFailed));
}

#[test]
fn y4_flags_follow_transport() {
    let f = f(11);
    let y4 = normal_form(&f, OrbitLabel::Y4).unwrap();
    let base = y4_triple_flags(&f);
    let mut three = 0;
    for seed in 0..40 {
        let g = transport_matrix(&f, seed);
        let t = transport(&f, &y4, seed);
        let r: Vec<Subspace> = y4_resolution_flag(&f).iter().map(|s| s.image(&g)).collect();
        let found = y4_three_flags(&f, &t.y, &r[0], &r[1]).unwrap();
        if found.len() == 3 {
            three += 1;
            let moved = sorted(base.iter().map(|m| (m[0].image(&g), m[1].image(&g))).collect());
            assert_eq!(sorted(found), moved);
        }
    }
    assert!(three >= 38, "three flags on {three}/40");
}
