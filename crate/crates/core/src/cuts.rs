//! Finite pseudo-Cauchy prefixes and dominant degree along them.
//!
//! A cut approximation is a finite strictly-pseudocauchy prefix: points
//! whose successive differences have strictly increasing valuations. All
//! "eventual" statements about transfinite sequences become statements about
//! the stabilized tail of the prefix, and every quantity that depends on
//! stabilization carries an explicit flag instead of pretending the window
//! is conclusive.

use crate::coarsen::CoarseContext;
use crate::diffpoly::DiffPoly;
use crate::error::{Error, Result};
use crate::ordgroup::GroupVector;
use crate::residue::ResidueField;
use crate::series::Series;

/// A validated pseudo-Cauchy prefix `a_0, ..., a_m` with its strictly
/// increasing difference valuations `g_0 < ... < g_{m-1}`.
#[derive(Clone, PartialEq, Debug)]
pub struct CutApprox<F: ResidueField> {
    points: Vec<Series<F>>,
    gammas: Vec<GroupVector>,
}

impl<F: ResidueField> CutApprox<F> {
    /// Validate a point list: at least three points, nonzero differences with
    /// certified valuations, strictly increasing.
    pub fn validate(f: &F, points: Vec<Series<F>>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::PreconditionViolated(
                "a cut approximation needs at least three points".into(),
            ));
        }
        let mut gammas = Vec::with_capacity(points.len() - 1);
        for i in 0..points.len() - 1 {
            let diff = points[i + 1].sub(f, &points[i]);
            let gamma = match diff.valuation() {
                Ok(v) => v,
                Err(Error::ZeroHasNoValuation) => {
                    return Err(Error::NotPseudoCauchy(format!(
                        "consecutive points {} and {} coincide",
                        i,
                        i + 1
                    )))
                }
                Err(e) => return Err(e),
            };
            if let Some(prev) = gammas.last() {
                if gamma <= *prev {
                    return Err(Error::NotPseudoCauchy(format!(
                        "difference valuations are not strictly increasing at index {}",
                        i
                    )));
                }
            }
            gammas.push(gamma);
        }
        Ok(CutApprox { points, gammas })
    }

    pub fn points(&self) -> &[Series<F>] {
        &self.points
    }

    pub fn gammas(&self) -> &[GroupVector] {
        &self.gammas
    }

    pub fn rank(&self) -> usize {
        self.points[0].rank()
    }

    /// Pointwise shift; difference valuations are unchanged.
    pub fn shift(&self, f: &F, y: &Series<F>) -> CutApprox<F> {
        CutApprox {
            points: self.points.iter().map(|p| p.add(f, y)).collect(),
            gammas: self.gammas.clone(),
        }
    }

    /// Pointwise scale by a known-nonzero series. A monomial shifts the
    /// difference valuations by its exponent; anything else is revalidated
    /// from scratch.
    pub fn scale(&self, f: &F, g: &Series<F>) -> Result<CutApprox<F>> {
        if g.is_exact_zero() {
            return Err(Error::ZeroConjugate);
        }
        if !g.is_known_nonzero() {
            return Err(Error::InsufficientPrecision(
                "cannot scale a cut by a series with no certified term".into(),
            ));
        }
        let points: Vec<Series<F>> = self.points.iter().map(|p| p.mul(f, g)).collect();
        let exact_monomial = g.terms().len() == 1 && g.frontier().is_infinite();
        if exact_monomial {
            let shift = g.valuation().expect("known nonzero");
            Ok(CutApprox {
                points,
                gammas: self.gammas.iter().map(|gm| gm.add(&shift)).collect(),
            })
        } else {
            CutApprox::validate(f, points)
        }
    }
}

/// Dominant degrees along a cut: `d_i = ddeg_{>= g_i} P_{+a_i}`.
///
/// `stabilized` records whether the tail of the window is constant; only then
/// is the final value a meaningful approximant of the dominant degree in the
/// cut.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CutDdeg {
    pub values: Vec<usize>,
    pub stabilized: bool,
}

impl CutDdeg {
    /// The last window value, the desk-scale approximant.
    pub fn approx(&self) -> usize {
        *self.values.last().expect("window is nonempty")
    }
}

pub fn ddeg_along_cut<F: ResidueField>(
    f: &F,
    p: &DiffPoly<F>,
    cut: &CutApprox<F>,
) -> Result<CutDdeg> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut values = Vec::with_capacity(cut.gammas().len());
    for (point, gamma) in cut.points().iter().zip(cut.gammas()) {
        values.push(p.add_conj(f, point).ddeg_geq(f, gamma)?);
    }
    let stabilized = values.len() >= 2 && values[values.len() - 1] == values[values.len() - 2];
    Ok(CutDdeg { values, stabilized })
}

/// Position of a cut relative to a convex subgroup.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DeltaClass {
    /// Every pairwise increment exceeds the subgroup.
    Fluent,
    /// Every pairwise increment lies in the subgroup.
    Jammed,
    /// The finite window is inconclusive.
    Mixed,
}

pub fn classify_delta<F: ResidueField>(cut: &CutApprox<F>, ctx: &CoarseContext) -> DeltaClass {
    let gammas = cut.gammas();
    let mut all_fluent = true;
    let mut all_jammed = true;
    for i in 0..gammas.len() {
        for j in i + 1..gammas.len() {
            let diff = gammas[j].sub(&gammas[i]);
            if ctx.level().exceeds(&diff) {
                all_jammed = false;
            } else if ctx.level().contains(&diff) {
                all_fluent = false;
            } else {
                all_fluent = false;
                all_jammed = false;
            }
        }
    }
    if all_fluent {
        DeltaClass::Fluent
    } else if all_jammed {
        DeltaClass::Jammed
    } else {
        DeltaClass::Mixed
    }
}

/// One violating pair of the growth diagnostic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GrowthViolation {
    pub i: usize,
    pub j: usize,
    pub increment: GroupVector,
    pub residual: GroupVector,
}

/// Outcome of the homogeneous growth diagnostic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GrowthReport {
    pub degree: usize,
    pub pass: bool,
    pub violation: Option<GrowthViolation>,
}

/// For homogeneous `P` of degree `e >= 1`, check on every pair `i < j` that
/// `v(P(t^g Y))` grows like `e * (g_j - g_i)` up to a residual in a strictly
/// finer archimedean class.
pub fn growth_diagnostic<F: ResidueField>(
    f: &F,
    p: &DiffPoly<F>,
    cut: &CutApprox<F>,
) -> Result<GrowthReport> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let degree = p.degree().expect("nonzero polynomial");
    let homogeneous = p
        .monomials()
        .keys()
        .all(|m| m.degree() == degree);
    if !homogeneous || degree == 0 {
        return Err(Error::PreconditionViolated(
            "growth diagnostic needs a homogeneous polynomial of degree >= 1".into(),
        ));
    }
    let profile: Vec<GroupVector> = cut
        .gammas()
        .iter()
        .map(|g| p.v_p_gamma(f, g))
        .collect::<Result<_>>()?;
    let e = num_bigint::BigInt::from(degree as u64);
    for i in 0..profile.len() {
        for j in i + 1..profile.len() {
            let increment = cut.gammas()[j].sub(&cut.gammas()[i]);
            let residual = profile[j]
                .sub(&profile[i])
                .sub(&increment.scale(&e));
            let ok = match (residual.arch_class(), increment.arch_class()) {
                (None, _) => true,
                (Some(cr), Some(ci)) => cr > ci,
                (Some(_), None) => false,
            };
            if !ok {
                return Ok(GrowthReport {
                    degree,
                    pass: false,
                    violation: Some(GrowthViolation {
                        i,
                        j,
                        increment,
                        residual,
                    }),
                });
            }
        }
    }
    Ok(GrowthReport {
        degree,
        pass: true,
        violation: None,
    })
}
