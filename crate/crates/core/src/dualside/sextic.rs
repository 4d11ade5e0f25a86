use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{dy6_image, sigma_image, DualError};
use crate::chords::GroupContext;
use crate::exterior::Trivector;
use crate::field::{Matrix, PrimeField};
use crate::pfaffloci::{coble_cubic, p4_of, HomogeneousForm, MonomialTable, ProjPoint};

/// Primes tried in turn when the interpolation kernel is not a line.
pub const SEXTIC_LADDER: [u32; 3] = [23, 31, 41];
/// Dual points sampled per interpolation; the sextic has 3003 coefficients.
pub const SEXTIC_MIN_POINTS: usize = 3500;

const LINES_PER_POINT: usize = 40;

/// Distinct smooth points of the hypersurface F = 0, found on random lines by
/// trying every parameter value and the point at infinity.
pub fn smooth_cubic_points<R: Rng + ?Sized>(
    f: &PrimeField,
    form: &HomogeneousForm,
    count: usize,
    rng: &mut R,
) -> Vec<ProjPoint> {
    let n = form.nvars();
    let grad = form.gradient();
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    let smooth = |x: &[u32]| form.eval(x) == 0 && grad.iter().any(|g| g.eval(x) != 0);
    for _ in 0..count * LINES_PER_POINT {
        if out.len() >= count {
            break;
        }
        let a = f.random_vector(n, rng);
        let b = f.random_vector(n, rng);
        let mut on_line: Vec<Vec<u32>> = (0..f.modulus())
            .map(|t| {
                let mut x = a.clone();
                f.axpy(t, &b, &mut x);
                x
            })
            .collect();
        on_line.push(b);
        for x in on_line {
            if out.len() < count && smooth(&x) {
                if let Some(p) = ProjPoint::new(f, &x) {
                    if seen.insert(p.clone()) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// The sextic through the gradient images grad C₃(x) of smooth cubic points.
pub fn sextic_interpolate(f: &PrimeField, omega: &Trivector, seed: u64) -> Result<HomogeneousForm, DualError> {
    if f.modulus() < SEXTIC_LADDER[0] {
        return Err(DualError::FieldTooSmall(f.modulus()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c3 = coble_cubic(f, omega)?.form;
    let pts = smooth_cubic_points(f, &c3, SEXTIC_MIN_POINTS, &mut rng);
    if pts.len() < SEXTIC_MIN_POINTS {
        return Err(DualError::TooFewPoints(pts.len()));
    }
    let grad = c3.gradient();
    let table = MonomialTable::get(omega.dim(), 6);
    let rows: Vec<Vec<u32>> = pts
        .iter()
        .map(|x| {
            let y: Vec<u32> = grad.iter().map(|g| g.eval(x.coords())).collect();
            table.values(f, &y)
        })
        .collect();
    let ker = Matrix::from_rows(*f, table.len(), &rows).kernel_basis();
    if ker.len() != 1 {
        return Err(DualError::KernelNotOneDim(ker.len()));
    }
    let form = HomogeneousForm::from_coeffs(*f, omega.dim(), 6, ker.into_iter().next().expect("one vector"))
        .expect("coefficient count matches the table");
    Ok(form.normalized())
}

/// Order of vanishing of F at x: the smallest t-adic valuation of F(x + t·y)
/// over `trials` random directions y. Lines inside F = 0 count as deg F + 1.
pub fn multiplicity<R: Rng + ?Sized>(form: &HomogeneousForm, x: &[u32], trials: usize, rng: &mut R) -> u32 {
    let f = form.field();
    let d = form.degree();
    if form.eval(x) != 0 {
        return 0;
    }
    assert!((f.modulus() as usize) > d, "field too small to separate the parameter values");
    let vand = Matrix::from_rows(
        f,
        d + 1,
        &(0..=d as u32).map(|t| (0..=d).map(|k| f.pow(t, k as u64)).collect::<Vec<u32>>()).collect::<Vec<_>>(),
    );
    let vinv = vand.inverse().expect("distinct nodes");
    let mut best = d as u32 + 1;
    for _ in 0..trials.max(1) {
        let y = f.random_vector(x.len(), rng);
        let vals: Vec<u32> = (0..=d as u32)
            .map(|t| {
                let mut z = x.to_vec();
                f.axpy(t, &y, &mut z);
                form.eval(&z)
            })
            .collect();
        let coeffs = vinv.mul_vec(&vals);
        let v = coeffs.iter().position(|&c| c != 0).unwrap_or(d + 1) as u32;
        best = best.min(v);
    }
    best
}

/// Rank of the matrix of second derivatives of F at x.
pub fn hessian_rank(form: &HomogeneousForm, x: &[u32]) -> usize {
    let f = form.field();
    let n = form.nvars();
    if form.degree() < 2 {
        return 0;
    }
    let rows: Vec<Vec<u32>> = form
        .gradient()
        .iter()
        .map(|d| d.gradient().iter().map(|h| h.eval(x)).collect())
        .collect();
    Matrix::from_rows(f, n, &rows).rank()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stratum {
    OffSextic,
    SexticSmooth,
    DY3,
    DY4,
    DY6,
    DY8,
    Undetermined,
}

/// Local evidence at a point: order of vanishing and, for singular points,
/// the rank of the tangent-cone quadric. Deeper means higher multiplicity,
/// then lower Hessian rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Profile {
    pub multiplicity: u32,
    pub hessian_rank: usize,
}

impl Profile {
    pub fn measure<R: Rng + ?Sized>(form: &HomogeneousForm, x: &[u32], trials: usize, rng: &mut R) -> Self {
        let multiplicity = multiplicity(form, x, trials, rng);
        let hessian_rank = if multiplicity >= 2 { hessian_rank(form, x) } else { form.nvars() };
        Profile {
            multiplicity,
            hessian_rank,
        }
    }

    fn key(&self) -> (u32, std::cmp::Reverse<usize>) {
        (self.multiplicity, std::cmp::Reverse(self.hessian_rank))
    }

    pub fn at_least(&self, other: &Profile) -> bool {
        self.key() >= other.key()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumLabel {
    pub stratum: Stratum,
    pub evidence: Profile,
}

/// The shallowest profile of C₆ observed on constructed points of each stratum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Calibration {
    pub dy3: Profile,
    pub dy4: Profile,
    pub dy6: Profile,
    /// Only known when a D_{Y₈} witness was available.
    pub dy8: Option<Profile>,
    pub trials: usize,
}

/// Calibration from `samples` witnesses per stratum: points of the P³'s
/// P(P₄(p)), contraction lines of chords, and images of tangent triples.
pub fn calibrate(
    c6: &HomogeneousForm,
    ctx: &mut GroupContext,
    samples: usize,
    trials: usize,
) -> Result<Calibration, DualError> {
    let f = ctx.field();
    let omega = ctx.omega().clone();
    let mut rng = ctx.substream(0xd1a1);
    let mut levels: [Option<Profile>; 3] = [None; 3];
    let mut got = [0usize; 3];
    let mut note = |k: usize, p: Profile, got: &mut [usize; 3]| {
        got[k] += 1;
        levels[k] = Some(match levels[k] {
            Some(old) if p.at_least(&old) => old,
            _ => p,
        });
    };
    for _ in 0..samples * 8 {
        if got.iter().all(|&g| g >= samples) {
            break;
        }
        let p = ctx.sample();
        let q = ctx.sample();
        if got[0] < samples {
            let p4 = p4_of(&f, &omega, p.coords())?;
            let mut x = vec![0u32; omega.dim()];
            for b in p4.basis() {
                f.axpy(f.random(&mut rng), b, &mut x);
            }
            if x.iter().any(|&c| c != 0) {
                note(0, Profile::measure(c6, &x, trials, &mut rng), &mut got);
            }
        }
        if got[1] < samples && p != q {
            if let Ok(s) = sigma_image(&f, &omega, p.coords(), q.coords()) {
                note(1, Profile::measure(c6, s.coords(), trials, &mut rng), &mut got);
            }
        }
        if got[2] < samples {
            if let Ok(s) = dy6_image(ctx, &p) {
                note(2, Profile::measure(c6, s.coords(), trials, &mut rng), &mut got);
            }
        }
    }
    match levels {
        [Some(dy3), Some(dy4), Some(dy6)] => Ok(Calibration {
            dy3,
            dy4,
            dy6,
            dy8: None,
            trials,
        }),
        _ => Err(DualError::TooFewPoints(*got.iter().min().expect("three strata"))),
    }
}

/// Label from the profile of C₆ at x. A stratum is only reported when its
/// calibrated profile is strictly deeper than that of the stratum containing
/// it; otherwise the coarser label stands.
pub fn classify_point<R: Rng + ?Sized>(c6: &HomogeneousForm, x: &[u32], cal: &Calibration, rng: &mut R) -> StratumLabel {
    let evidence = Profile::measure(c6, x, cal.trials, rng);
    let stratum = match evidence.multiplicity {
        0 => Stratum::OffSextic,
        1 => Stratum::SexticSmooth,
        _ => {
            let levels = [
                (Stratum::DY3, Some(cal.dy3)),
                (Stratum::DY4, Some(cal.dy4)),
                (Stratum::DY6, Some(cal.dy6)),
                (Stratum::DY8, cal.dy8),
            ];
            let mut label = Stratum::Undetermined;
            let mut floor: Option<Profile> = None;
            for (s, level) in levels {
                let Some(level) = level else { break };
                if floor.is_some_and(|fl| fl.at_least(&level)) {
                    continue;
                }
                if !evidence.at_least(&level) {
                    break;
                }
                label = s;
                floor = Some(level);
            }
            label
        }
    };
    StratumLabel { stratum, evidence }
}
