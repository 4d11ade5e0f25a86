//! Geometry on P(V₉): the sextic C₆ dual to the Coble cubic, the contraction
//! map into its singular locus, and flags certifying points of Z, T and X.

mod flags;
mod sextic;

pub use flags::{
    cover_pairs, hilb3_points, model_spaces, t_flag, triple_cover_enumerate, x_flag, z_flag, CoverPair, FlagModel, ModelFlag,
};
pub use sextic::{
    calibrate, classify_point, hessian_rank, multiplicity, sextic_interpolate, smooth_cubic_points, Calibration, Profile,
    Stratum, StratumLabel, SEXTIC_LADDER, SEXTIC_MIN_POINTS,
};

use thiserror::Error;

use crate::chords::{ChordError, GroupContext};
use crate::exterior::{ExteriorError, Trivector};
use crate::field::PrimeField;
use crate::pfaffloci::{LociError, ProjPoint};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DualError {
    #[error("contraction ω(P,Q,·) vanishes")]
    ZeroContraction,
    #[error("ω is not in the {0:?} wedge-space sum")]
    MembershipFailed(FlagModel),
    #[error("intersection of the U₅ spaces has dimension {0}, expected 3")]
    BadIntersection(usize),
    #[error("flag members are not nested")]
    NotNested,
    #[error("interpolation kernel has dimension {0}, expected 1")]
    KernelNotOneDim(usize),
    #[error("q = {0} is too small for sextic interpolation")]
    FieldTooSmall(u32),
    #[error("only {0} smooth cubic points found")]
    TooFewPoints(usize),
    #[error(transparent)]
    Chord(#[from] ChordError),
    #[error(transparent)]
    Loci(#[from] LociError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
}

/// [ω(P,Q,·)] as a point of P(V₉).
pub fn sigma_image(f: &PrimeField, omega: &Trivector, p: &[u32], q: &[u32]) -> Result<ProjPoint, DualError> {
    let v = omega.double_contract(f, p, q)?;
    ProjPoint::new(f, &v).ok_or(DualError::ZeroContraction)
}

/// σ(P, P*P) where P*P is the tangent point, i.e. the degenerate triple (P,P,R).
pub fn dy6_image(ctx: &mut GroupContext, p: &ProjPoint) -> Result<ProjPoint, DualError> {
    let r = ctx.tangent(p)?;
    if &r == p {
        return Err(ChordError::DegenerateChord("P is its own tangent point".into()).into());
    }
    let f = ctx.field();
    sigma_image(&f, ctx.omega(), p.coords(), r.coords()).map_err(|e| match e {
        DualError::ZeroContraction => ChordError::DegenerateChord("zero contraction with the tangent point".into()).into(),
        e => e,
    })
}
