use coble::field::{FieldError, Matrix, PrimeField};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn f(q: u32) -> PrimeField {
    PrimeField::new(q).unwrap()
}

#[test]
fn inverses_of_small_residues() {
    assert_eq!(f(7).inv(3), Ok(5));
    assert_eq!(f(7).inv(1), Ok(1));
    assert_eq!(f(23).inv(2), Ok(12));
    assert_eq!(f(7).inv(0), Err(FieldError::ZeroInverse));
}

#[test]
fn moduli_outside_the_range_are_refused() {
    for q in [0, 1, 2, 3, 4, 9, 15, 1 << 31] {
        assert!(PrimeField::new(q).is_err(), "{q}");
    }
    assert!(PrimeField::new(5).is_ok());
    assert!(PrimeField::new(2_147_483_647).is_ok());
}

#[test]
fn rank_of_simple_matrices() {
    let z = Matrix::zeros(f(7), 4, 4);
    assert_eq!(z.rank(), 0);
    assert_eq!(Matrix::identity(f(7), 5).rank(), 5);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut m = Matrix::random(f(11), 9, 9, &mut rng);
    for j in 0..9 {
        m.set(4, j, m.get(2, j));
    }
    assert!(m.rank() <= 8);
}

#[test]
fn kernels_of_identity_and_zero() {
    assert!(Matrix::identity(f(7), 3).kernel_basis().is_empty());
    let k = Matrix::zeros(f(7), 3, 3).kernel_basis();
    assert_eq!(k.len(), 3);
    assert_eq!(Matrix::from_rows(f(7), 3, &k), Matrix::identity(f(7), 3));
}

#[test]
fn random_kernels_are_annihilated() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let (r, c) = (rng.gen_range(1..12), rng.gen_range(1..12));
        let m = Matrix::random(f(13), r, c, &mut rng);
        for k in m.kernel_basis() {
            assert!(m.mul_vec(&k).iter().all(|&x| x == 0));
        }
    }
}

#[test]
fn solve_with_identity_returns_the_right_hand_side() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let b = Matrix::random(f(7), 6, 3, &mut rng);
    let s = Matrix::identity(f(7), 6).solve(&b).unwrap();
    assert_eq!(s.particular, b);
    assert!(s.kernel.is_empty());
}

#[test]
fn singular_solve_reports_the_kernel() {
    let fld = f(11);
    let m = Matrix::from_rows(fld, 3, &[[1u32, 2, 3], [2, 4, 6], [0, 1, 1]]);
    let b = Matrix::from_rows(fld, 1, &[[5u32], [10], [2]]);
    let s = m.solve(&b).unwrap();
    assert_eq!(s.kernel.len(), 1);
    assert_eq!(m.mul(&s.particular).unwrap(), b);
    let off = Matrix::from_rows(fld, 1, &[[5u32], [1], [2]]);
    assert_eq!(m.solve(&off).unwrap_err(), FieldError::Inconsistent);
}

/// The size of the sextic interpolation system.
#[test]
fn large_random_system_is_solved_exactly() {
    let fld = f(23);
    let n = 3003;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let m = Matrix::random(fld, n, n, &mut rng);
    let b = Matrix::random(fld, n, 1, &mut rng);
    let s = m.solve(&b).unwrap();
    assert!(s.kernel.is_empty());
    assert_eq!(m.mul(&s.particular).unwrap(), b);
}

#[test]
fn elimination_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = Matrix::random(f(31), 30, 40, &mut rng);
    assert_eq!(m.rref(), m.clone().rref());
    assert_eq!(m.echelon(), m.echelon());
}

fn matrix_strategy() -> impl Strategy<Value = Matrix> {
    (prop::sample::select(vec![5u32, 7, 11, 13, 23, 101]), 1usize..50, 1usize..50, any::<u64>()).prop_map(
        |(q, r, c, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // low-rank products now and then
            if seed % 3 == 0 {
                let k = (seed as usize / 3) % r.min(c) + 1;
                let a = Matrix::random(f(q), r, k, &mut rng);
                let b = Matrix::random(f(q), k, c, &mut rng);
                a.mul(&b).unwrap()
            } else {
                Matrix::random(f(q), r, c, &mut rng)
            }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn inverse_is_multiplicative(q in prop::sample::select(vec![5u32, 7, 23, 65_537, 2_147_483_647]), a in 1u64.., b in 1u64..) {
        let fld = f(q);
        let (a, b) = ((a % (q as u64 - 1) + 1) as u32, (b % (q as u64 - 1) + 1) as u32);
        let ab = fld.mul(a, b);
        prop_assert_eq!(fld.inv(ab).unwrap(), fld.mul(fld.inv(a).unwrap(), fld.inv(b).unwrap()));
        prop_assert_eq!(fld.mul(a, fld.inv(a).unwrap()), 1);
    }

    #[test]
    fn rank_is_transpose_invariant(m in matrix_strategy()) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn kernel_dimension_plus_rank_is_the_column_count(m in matrix_strategy()) {
        let k = m.kernel_basis();
        prop_assert_eq!(k.len() + m.rank(), m.cols());
        for v in &k {
            prop_assert!(m.mul_vec(v).iter().all(|&x| x == 0));
        }
    }
}
