use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{third_point, third_point_oracle, zero_contraction_candidates, ChordError};
use crate::exterior::Trivector;
use crate::field::PrimeField;
use crate::pfaffloci::ProjPoint;
use crate::scanner::{curve_points, enumerate_a, random_section_point, CURVE_SCAN_MAX_Q};

/// Known points of A(F_q), sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointPool {
    points: Vec<ProjPoint>,
    /// true when the pool is all of A(F_q)
    pub complete: bool,
}

impl PointPool {
    pub fn from_points(points: impl IntoIterator<Item = ProjPoint>, complete: bool) -> Self {
        let set: BTreeSet<ProjPoint> = points.into_iter().collect();
        PointPool {
            points: set.into_iter().collect(),
            complete,
        }
    }

    /// Every point of A by a full scan (small q only).
    pub fn full_scan(f: &PrimeField, omega: &Trivector) -> Result<Self, ChordError> {
        Ok(Self::from_points(enumerate_a(f, omega)?.points, true))
    }

    /// Finds a first point by scanning random P⁶'s, then spreads along the
    /// curves C_P and along chords until `target` points are known or no new
    /// points appear.
    pub fn grow<R: Rng + ?Sized>(f: &PrimeField, omega: &Trivector, target: usize, rng: &mut R) -> Result<Self, ChordError> {
        let start = random_section_point(f, omega, 7, 64, rng).ok_or(ChordError::PoolTooSmall(0))?;
        let mut known: BTreeSet<ProjPoint> = BTreeSet::new();
        known.insert(start.clone());
        let mut queue = vec![start];
        let mut scanned = BTreeSet::new();
        while known.len() < target {
            let Some(p) = queue.pop() else { break };
            if !scanned.insert(p.clone()) || f.modulus() > CURVE_SCAN_MAX_Q {
                continue;
            }
            for x in curve_points(f, omega, p.coords())?.points {
                if known.insert(x.clone()) {
                    queue.push(x);
                }
            }
        }
        // chords between known points
        let mut stale = 0;
        while known.len() < target && known.len() >= 2 && stale < 64 {
            let pts: Vec<ProjPoint> = known.iter().cloned().collect();
            let a = pts.choose(rng).unwrap();
            let b = pts.choose(rng).unwrap();
            if a == b {
                continue;
            }
            match third_point(f, omega, a.coords(), b.coords(), rng) {
                Ok(t) if known.insert(t.r.clone()) => stale = 0,
                _ => stale += 1,
            }
        }
        Ok(Self::from_points(known, false))
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> &ProjPoint {
        self.points.choose(rng).expect("nonempty pool")
    }
}

/// How chords were resolved, for reporting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ChordStats {
    pub constructive: u64,
    pub oracle: u64,
    pub zero_contraction: u64,
    pub composite: u64,
    pub failed: u64,
}

/// Over F_7 roughly a quarter of random chords are degenerate, so composites
/// need more than a handful of auxiliary draws.
const MAX_AUX_DRAWS: usize = 32;

/// The group structure on A with identity E: P ⊞ Q = third(E, third(P, Q)).
/// With x*y := third(x, y) = O − x − y in any group with origin O, the chord
/// constant P ⊞ Q ⊞ R equals the tangent point K = E*E.
pub struct GroupContext {
    field: PrimeField,
    omega: Trivector,
    pub identity: ProjPoint,
    pub chord_constant: ProjPoint,
    pub seed: u64,
    pool: PointPool,
    rng: ChaCha8Rng,
    pub stats: ChordStats,
}

impl GroupContext {
    /// Identity is the smallest pool point.
    pub fn new(f: &PrimeField, omega: &Trivector, pool: PointPool, seed: u64) -> Result<Self, ChordError> {
        let identity = pool.points().first().cloned().ok_or(ChordError::PoolTooSmall(0))?;
        Self::with_identity(f, omega, pool, identity, seed)
    }

    pub fn with_identity(
        f: &PrimeField,
        omega: &Trivector,
        pool: PointPool,
        identity: ProjPoint,
        seed: u64,
    ) -> Result<Self, ChordError> {
        if pool.len() < 3 {
            return Err(ChordError::PoolTooSmall(pool.len()));
        }
        let mut ctx = GroupContext {
            field: *f,
            omega: omega.clone(),
            chord_constant: identity.clone(),
            identity,
            seed,
            pool,
            rng: ChaCha8Rng::seed_from_u64(seed),
            stats: ChordStats::default(),
        };
        let e = ctx.identity.clone();
        ctx.chord_constant = ctx.tangent(&e)?;
        Ok(ctx)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }
    pub fn omega(&self) -> &Trivector {
        &self.omega
    }
    pub fn pool(&self) -> &PointPool {
        &self.pool
    }

    /// A random pool point.
    pub fn sample(&mut self) -> ProjPoint {
        self.pool.random(&mut self.rng).clone()
    }

    /// Independent generator derived from the context seed.
    pub fn substream(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }

    fn aux_avoiding(&mut self, avoid: &[&ProjPoint]) -> ProjPoint {
        loop {
            let t = self.sample();
            if !avoid.contains(&&t) {
                return t;
            }
        }
    }

    /// Chord by the constructive algorithm, falling back to the P³ oracle.
    fn chord_direct(&mut self, x: &ProjPoint, y: &ProjPoint) -> Result<ProjPoint, ChordError> {
        let f = self.field;
        if self.omega.double_contract(&f, x.coords(), y.coords())?.iter().all(|&c| c == 0) {
            self.stats.zero_contraction += 1;
            let found = zero_contraction_candidates(&f, &self.omega, x.coords(), y.coords())?;
            if found.len() == 1 {
                return Ok(found[0].r.clone());
            }
            let mut cands: Vec<ProjPoint> = found.into_iter().map(|t| t.r).collect();
            cands.push(x.clone());
            cands.push(y.clone());
            return self.pick_third(x, y, &cands);
        }
        match third_point(&f, &self.omega, x.coords(), y.coords(), &mut self.rng) {
            Ok(t) => {
                self.stats.constructive += 1;
                return Ok(t.r);
            }
            Err(e) if f.modulus() > CURVE_SCAN_MAX_Q => return Err(e),
            Err(_) => {}
        }
        let t = third_point_oracle(&f, &self.omega, x.coords(), y.coords(), &mut self.rng)?;
        self.stats.oracle += 1;
        Ok(t.r)
    }

    /// Constructive chord, refusing zero contractions so it never recurses.
    fn chord_plain(&mut self, x: &ProjPoint, y: &ProjPoint) -> Result<ProjPoint, ChordError> {
        let f = self.field;
        let t = third_point(&f, &self.omega, x.coords(), y.coords(), &mut self.rng)?;
        self.stats.constructive += 1;
        Ok(t.r)
    }

    /// Among candidates for x*y keep the z with z*T = x + y − T, the right side
    /// computed as third(third(x,T₁), third(y, third(T,T₁))).
    fn pick_third(&mut self, x: &ProjPoint, y: &ProjPoint, cands: &[ProjPoint]) -> Result<ProjPoint, ChordError> {
        let mut last = ChordError::NotUnique(cands.len());
        for _ in 0..MAX_AUX_DRAWS {
            let t = self.aux_avoiding(&[x, y]);
            let t1 = self.aux_avoiding(&[x, y, &t]);
            let attempt = (|| {
                let a = self.chord_plain(&t, &t1)?;
                let b = self.chord_plain(y, &a)?;
                let c = self.chord_plain(x, &t1)?;
                let d = self.chord_plain(&c, &b)?;
                let mut keep = Vec::new();
                // only the true third point can match, so a failed chord just drops z
                for z in cands {
                    if self.chord_plain(z, &t).is_ok_and(|w| w == d) {
                        keep.push(z.clone());
                    }
                }
                match keep.len() {
                    1 => Ok(keep.pop().unwrap()),
                    k => Err(ChordError::NotUnique(k)),
                }
            })();
            match attempt {
                Ok(r) => return Ok(r),
                Err(e) => last = e,
            }
        }
        Err(last)
    }

    /// x*y = third(T, third(third(x,T₁), third(y, third(T,T₁)))) for auxiliary T, T₁.
    fn chord_composite(&mut self, x: &ProjPoint, y: &ProjPoint) -> Result<ProjPoint, ChordError> {
        let mut last = ChordError::DegenerateChord("no auxiliary draw".into());
        for _ in 0..MAX_AUX_DRAWS {
            let t = self.aux_avoiding(&[x, y]);
            let t1 = self.aux_avoiding(&[x, y, &t]);
            let attempt = (|| {
                let a = self.chord_any(&t, &t1)?;
                let b = self.chord_any(y, &a)?;
                let c = self.chord_any(x, &t1)?;
                let d = self.chord_any(&c, &b)?;
                self.chord_any(&t, &d)
            })();
            match attempt {
                Ok(r) => {
                    self.stats.composite += 1;
                    return Ok(r);
                }
                Err(e) => last = e,
            }
        }
        self.stats.failed += 1;
        Err(last)
    }

    /// Direct chord when x ≠ y, tangent composite when x = y; no nested fallback.
    fn chord_any(&mut self, x: &ProjPoint, y: &ProjPoint) -> Result<ProjPoint, ChordError> {
        if x == y {
            self.tangent_once(x)
        } else {
            self.chord_direct(x, y)
        }
    }

    /// Tangent point x*x = third(third(third(x,T₁), third(x,T₂)), third(T₁,T₂)).
    fn tangent_once(&mut self, x: &ProjPoint) -> Result<ProjPoint, ChordError> {
        let t1 = self.aux_avoiding(&[x]);
        let t2 = self.aux_avoiding(&[x, &t1]);
        let a = self.chord_direct(x, &t1)?;
        let b = self.chord_direct(x, &t2)?;
        let c = if a == b { self.tangent_once(&a)? } else { self.chord_direct(&a, &b)? };
        let d = self.chord_direct(&t1, &t2)?;
        if c == d {
            self.tangent_once(&c)
        } else {
            self.chord_direct(&c, &d)
        }
    }

    pub fn tangent(&mut self, x: &ProjPoint) -> Result<ProjPoint, ChordError> {
        let mut last = ChordError::DegenerateChord("no auxiliary draw".into());
        for _ in 0..MAX_AUX_DRAWS {
            match self.tangent_once(x) {
                Ok(r) => return Ok(r),
                Err(e) => last = e,
            }
        }
        self.stats.failed += 1;
        Err(last)
    }

    /// The third point of the chord through x and y (tangent point when x = y).
    pub fn third(&mut self, x: &ProjPoint, y: &ProjPoint) -> Result<ProjPoint, ChordError> {
        if x == y {
            return self.tangent(x);
        }
        match self.chord_direct(x, y) {
            Ok(r) => Ok(r),
            Err(_) => self.chord_composite(x, y),
        }
    }

    pub fn add(&mut self, x: &ProjPoint, y: &ProjPoint) -> Result<ProjPoint, ChordError> {
        let e = self.identity.clone();
        if *x == e {
            return Ok(y.clone());
        }
        if *y == e {
            return Ok(x.clone());
        }
        if x == y {
            return self.double(x);
        }
        let r = self.third(x, y)?;
        self.third(&e, &r)
    }

    /// ⊟x = third(K, x) with K the chord constant.
    pub fn neg(&mut self, x: &ProjPoint) -> Result<ProjPoint, ChordError> {
        let k = self.chord_constant.clone();
        self.third(&k, x)
    }

    /// x ⊞ x as the chord through E and the tangent point of x.
    pub fn double(&mut self, x: &ProjPoint) -> Result<ProjPoint, ChordError> {
        let e = self.identity.clone();
        let t = self.tangent(x)?;
        self.third(&e, &t)
    }

    /// x ⊞ x as ((x ⊞ T) ⊞ x) ⊞ (⊟T) for an auxiliary T, avoiding tangents at x.
    pub fn double_via_aux(&mut self, x: &ProjPoint) -> Result<ProjPoint, ChordError> {
        let e = self.identity.clone();
        let mut last = ChordError::DegenerateChord("no auxiliary draw".into());
        for _ in 0..MAX_AUX_DRAWS {
            let t = self.aux_avoiding(&[x, &e]);
            let attempt = (|| {
                let xt = self.add(x, &t)?;
                if xt == *x {
                    return Err(ChordError::DegenerateChord("auxiliary collapsed".into()));
                }
                let s = self.add(&xt, x)?;
                let nt = self.neg(&t)?;
                self.add(&s, &nt)
            })();
            match attempt {
                Ok(r) => return Ok(r),
                Err(e) => last = e,
            }
        }
        Err(last)
    }

    /// n ⊙ x by double-and-add; negative n goes through ⊟.
    pub fn scalar_mul(&mut self, n: i64, x: &ProjPoint) -> Result<ProjPoint, ChordError> {
        let base = if n < 0 { self.neg(x)? } else { x.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = self.identity.clone();
        let mut pow = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &pow)?;
            }
            k >>= 1;
            if k > 0 {
                pow = self.double(&pow)?;
            }
        }
        Ok(acc)
    }

    /// x ⊞ y ⊞ z, which equals the chord constant on every chord triple.
    pub fn sum3(&mut self, x: &ProjPoint, y: &ProjPoint, z: &ProjPoint) -> Result<ProjPoint, ChordError> {
        let s = self.add(x, y)?;
        self.add(&s, z)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}
