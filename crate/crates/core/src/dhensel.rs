//! Root refinement for differential polynomials in Hensel position.
//!
//! Given `P` with `v(P_0) > 0` and `v(P_1) = 0`, the solver accumulates
//! monomial corrections `z t^g`: at each step it picks `g > 0` so that the
//! conjugated linear part meets the valuation of the constant part, reads a
//! linear equation off the dominant part, solves it in the residue field,
//! and conjugates additively. The constant part's valuation strictly
//! increases per step; the loop stops beyond the target, at an exact root,
//! or at an explicit failure. No global completeness is claimed: every way
//! the iteration can get stuck is a reported status, not a fallback guess.

use crate::diffpoly::{DiffMonomial, DiffPoly};
use crate::error::{Error, Result};
use crate::ordgroup::GroupVector;
use crate::residue::ResidueField;
use crate::series::{
    asymptotic_sample_check, few_constants_sample_check, AsymptoticCheck, DerivationSpec,
    FewConstantsCheck, Frontier, SampleOptions, Series,
};

/// Why a solve stopped short of a certified root.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FailReason {
    /// The dominant part of the conjugated polynomial has degree above one,
    /// so no residue-linear correction applies.
    DominantDegreeAbove1,
    /// The residue field produced no witness for the linear equation.
    ResidueSolverFailed,
    /// No exponent in the search box matches the required valuation.
    NoValuationMatch,
    /// A correction failed to raise the constant part's valuation.
    NonContraction,
}

/// Terminal state of a solve.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SolveStatus {
    /// Residual certified beyond the target (or exactly zero).
    Solved,
    /// Budgets or precision ran out before the target.
    FrontierExhausted,
    Failed(FailReason),
}

/// Valuation of the residual `P(y)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Residual {
    ExactZero,
    Valuation(GroupVector),
    /// Only a lower bound is certified.
    BeyondFrontier(GroupVector),
}

/// One accepted correction step.
#[derive(Clone, PartialEq, Debug)]
pub struct SolveStep<F: ResidueField> {
    /// Chosen exponent of the correction monomial.
    pub gamma: GroupVector,
    /// Constant coefficient of the residue equation (before normalization).
    pub c0: F::Elem,
    /// Normalized linear coefficients `a_i` of `1 + sum a_i z^(i) = 0`.
    pub linear: Vec<F::Elem>,
    /// The residue solution.
    pub z: F::Elem,
    /// Valuation of the constant part after the step.
    pub new_v0: Residual,
}

/// Full account of a solve: the accumulated root approximation, the
/// independently re-evaluated residual, and the step trace.
#[derive(Clone, PartialEq, Debug)]
pub struct SolverReport<F: ResidueField> {
    pub status: SolveStatus,
    pub y: Series<F>,
    pub residual: Residual,
    pub steps: Vec<SolveStep<F>>,
}

/// Solver budgets.
#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub target: GroupVector,
    pub max_steps: usize,
    pub search_radius: i64,
}

impl SolveOptions {
    pub fn new(target: GroupVector) -> Self {
        SolveOptions {
            target,
            max_steps: 32,
            search_radius: 8,
        }
    }
}

/// Outcome of the premise check for the Hensel position.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PremiseReport {
    pub holds: bool,
    pub v_p0: Option<GroupVector>,
    pub v_p1: Option<GroupVector>,
    /// Offending part when the premise fails.
    pub reason: Option<String>,
}

/// Check `P` is over the valuation ring with `v(P_0) > 0` and `v(P_1) = 0`.
pub fn dh_premise<F: ResidueField>(f: &F, p: &DiffPoly<F>) -> Result<PremiseReport> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    for coef in p.monomials().values() {
        match coef.valuation() {
            Ok(v) => {
                if v.is_negative() {
                    return Ok(PremiseReport {
                        holds: false,
                        v_p0: None,
                        v_p1: None,
                        reason: Some(format!(
                            "a coefficient has negative valuation {}",
                            v
                        )),
                    });
                }
            }
            Err(Error::InsufficientPrecision(_)) => {
                // O(t^fr) certifies ring membership exactly when fr >= 0.
                let fr = coef.frontier().as_finite().expect("finite frontier");
                if fr.is_negative() {
                    return Err(Error::InsufficientPrecision(
                        "cannot certify a coefficient inside the valuation ring".into(),
                    ));
                }
            }
            Err(e) => return Err(e),
        }
    }
    let p0 = p.hom_part(0);
    let v_p0 = if p0.is_zero() {
        None
    } else {
        Some(p0.v_poly(f)?)
    };
    let p1 = p.hom_part(1);
    let v_p1 = if p1.is_zero() {
        None
    } else {
        Some(p1.v_poly(f)?)
    };
    if let Some(v0) = &v_p0 {
        if !v0.is_positive() {
            return Ok(PremiseReport {
                holds: false,
                v_p0: v_p0.clone(),
                v_p1,
                reason: Some(format!("constant part has valuation {}", v0)),
            });
        }
    }
    match &v_p1 {
        Some(v1) if v1.is_zero() => Ok(PremiseReport {
            holds: true,
            v_p0,
            v_p1,
            reason: None,
        }),
        Some(v1) => Ok(PremiseReport {
            holds: false,
            v_p0,
            v_p1: Some(v1.clone()),
            reason: Some(format!("linear part has valuation {}", v1)),
        }),
        None => Ok(PremiseReport {
            holds: false,
            v_p0,
            v_p1: None,
            reason: Some("linear part is zero".into()),
        }),
    }
}

/// Iteratively refine a root of `P` in the maximal ideal until the residual
/// valuation exceeds `target`.
///
/// Errors signal violated preconditions; everything that can go wrong during
/// the iteration itself lands in the report status.
pub fn dh_solve<F: ResidueField>(
    f: &F,
    p: &DiffPoly<F>,
    opts: &SolveOptions,
) -> Result<SolverReport<F>> {
    let premise = dh_premise(f, p)?;
    if !premise.holds {
        return Err(Error::PreconditionViolated(format!(
            "not in Hensel position: {}",
            premise.reason.unwrap_or_default()
        )));
    }
    assert_eq!(opts.target.rank(), p.rank(), "target rank mismatch");
    for coef in p.monomials().values() {
        if let Frontier::Finite(fr) = coef.frontier() {
            if *fr <= opts.target {
                return Err(Error::PreconditionViolated(format!(
                    "coefficient frontier {} does not exceed the target {}",
                    fr, opts.target
                )));
            }
        }
    }

    let rank = p.rank();
    let mut q = p.clone();
    let mut y = Series::zero(rank);
    let mut steps: Vec<SolveStep<F>> = Vec::new();
    let mut status = None;

    while status.is_none() {
        let q0 = q.hom_part(0);
        if q0.is_zero() {
            status = Some(SolveStatus::Solved);
            break;
        }
        let beta = match q0.v_poly(f) {
            Ok(b) => b,
            Err(Error::InsufficientPrecision(_)) => {
                status = Some(SolveStatus::FrontierExhausted);
                break;
            }
            Err(e) => return Err(e),
        };
        if beta > opts.target {
            status = Some(SolveStatus::Solved);
            break;
        }
        if steps.len() >= opts.max_steps {
            status = Some(SolveStatus::FrontierExhausted);
            break;
        }

        let q1 = q.hom_part(1);
        if q1.is_zero() {
            status = Some(SolveStatus::Failed(FailReason::ResidueSolverFailed));
            break;
        }
        let gamma = match search_gamma(f, &q1, &beta, opts.search_radius)? {
            Some(g) => g,
            None => {
                status = Some(SolveStatus::Failed(FailReason::NoValuationMatch));
                break;
            }
        };

        let g = Series::monomial(f, gamma.clone(), f.one());
        let conj = q.mul_conj(f, &g)?;
        let dominant = conj.dominant(f)?;
        if dominant.ddeg > 1 {
            status = Some(SolveStatus::Failed(FailReason::DominantDegreeAbove1));
            break;
        }
        let c0 = dominant
            .dpart
            .coef(&DiffMonomial::one())
            .cloned()
            .unwrap_or_else(|| f.zero());
        if f.is_zero(&c0) {
            // The constant part lost the dominant level, so the linear
            // equation has no inhomogeneous term to cancel.
            status = Some(SolveStatus::Failed(FailReason::ResidueSolverFailed));
            break;
        }
        let top = dominant
            .dpart
            .monomials()
            .keys()
            .filter_map(|m| m.order())
            .max();
        let mut linear: Vec<F::Elem> = Vec::new();
        if let Some(top) = top {
            for i in 0..=top {
                let ci = dominant
                    .dpart
                    .coef(&DiffMonomial::var(i))
                    .cloned()
                    .unwrap_or_else(|| f.zero());
                linear.push(f.div(&ci, &c0)?);
            }
        }
        while linear.last().is_some_and(|a| f.is_zero(a)) {
            linear.pop();
        }
        if linear.is_empty() {
            status = Some(SolveStatus::Failed(FailReason::ResidueSolverFailed));
            break;
        }
        let z = match f.lin_solve(&linear) {
            Ok(z) => z,
            Err(Error::Unsolvable) => {
                status = Some(SolveStatus::Failed(FailReason::ResidueSolverFailed));
                break;
            }
            Err(e) => return Err(e),
        };

        let correction = Series::monomial(f, gamma.clone(), z.clone());
        q = q.add_conj(f, &correction);
        y = y.add(f, &correction);

        let new_q0 = q.hom_part(0);
        let new_v0 = if new_q0.is_zero() {
            Residual::ExactZero
        } else {
            match new_q0.v_poly(f) {
                Ok(v) => Residual::Valuation(v),
                Err(Error::InsufficientPrecision(_)) => {
                    // Certified only beyond what the remaining frontiers
                    // carry; the next loop turn records the exhaustion.
                    Residual::BeyondFrontier(coarsest_frontier(f, &new_q0))
                }
                Err(e) => return Err(e),
            }
        };
        if let Residual::Valuation(v) = &new_v0 {
            if *v <= beta {
                status = Some(SolveStatus::Failed(FailReason::NonContraction));
            }
        }
        steps.push(SolveStep {
            gamma,
            c0,
            linear,
            z,
            new_v0,
        });
    }

    // Independent re-evaluation fixes the reported residual.
    let evaluated = p.eval(f, &y);
    let residual = if evaluated.is_exact_zero() {
        Residual::ExactZero
    } else {
        match evaluated.valuation() {
            Ok(v) => Residual::Valuation(v),
            Err(_) => {
                let fr = evaluated
                    .frontier()
                    .as_finite()
                    .expect("not exact zero")
                    .clone();
                Residual::BeyondFrontier(fr)
            }
        }
    };
    let status = status.expect("loop sets a status");
    if status == SolveStatus::Solved {
        debug_assert!(match &residual {
            Residual::ExactZero => true,
            Residual::Valuation(v) => *v > opts.target,
            Residual::BeyondFrontier(fr) => *fr > opts.target,
        });
    }
    Ok(SolverReport {
        status,
        y,
        residual,
        steps,
    })
}

/// The finite frontier below which a polynomial with uncertified valuation
/// is still exact.
fn coarsest_frontier<F: ResidueField>(_f: &F, p: &DiffPoly<F>) -> GroupVector {
    p.valuation_lower_bound()
        .as_finite()
        .expect("uncertified valuation implies a finite bound")
        .clone()
}

/// Find `g > 0` near the seed `beta - v(Q_1)` with `v(Q_1(t^g Y)) = beta`.
/// The box walk is deterministic: candidates ordered by L1 distance from the
/// seed, ties lexicographic.
fn search_gamma<F: ResidueField>(
    f: &F,
    q1: &DiffPoly<F>,
    beta: &GroupVector,
    radius: i64,
) -> Result<Option<GroupVector>> {
    let seed = beta.sub(&q1.v_poly(f)?);
    let rank = seed.rank();
    let mut offsets: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..rank {
        let mut next = Vec::new();
        for prefix in &offsets {
            for d in -radius..=radius {
                let mut v = prefix.clone();
                v.push(d);
                next.push(v);
            }
        }
        offsets = next;
    }
    offsets.sort_by_key(|v| {
        (
            v.iter().map(|d| d.unsigned_abs()).sum::<u64>(),
            v.clone(),
        )
    });
    for offset in offsets {
        let gamma = seed.add(&GroupVector::from_i64(&offset));
        if !gamma.is_positive() {
            continue;
        }
        if q1.v_p_gamma(f, &gamma)? == *beta {
            return Ok(Some(gamma));
        }
    }
    Ok(None)
}

/// Report for the sampled asymptotic-plus-constants diagnostic.
#[derive(Clone, Debug)]
pub struct AsymptoticWitnessReport<F: ResidueField> {
    pub pass: bool,
    pub asymptotic: AsymptoticCheck<F>,
    /// Run only when the asymptotic samples pass.
    pub few_constants: Option<FewConstantsCheck<F>>,
}

/// Sampled check that the field is asymptotic and, when those samples pass,
/// that no sampled constant escapes the valuation ring.
pub fn asymptotic_witness<F: ResidueField>(
    f: &F,
    spec: &DerivationSpec<F>,
    opts: SampleOptions,
) -> AsymptoticWitnessReport<F> {
    let asymptotic = asymptotic_sample_check(f, spec, opts);
    if !asymptotic.pass {
        return AsymptoticWitnessReport {
            pass: false,
            asymptotic,
            few_constants: None,
        };
    }
    let constants = few_constants_sample_check(
        f,
        spec,
        SampleOptions {
            samples: opts.samples,
            seed: opts.seed.wrapping_add(1),
        },
    );
    AsymptoticWitnessReport {
        pass: constants.pass,
        asymptotic,
        few_constants: Some(constants),
    }
}
