//! Coarsening by a convex subgroup and specialization to it.
//!
//! Coarsening composes the valuation with the quotient map `Z^n -> Z^k`
//! (head coordinates); specialization keeps the terms whose exponents lie in
//! the subgroup and re-indexes them by the tail coordinates. Both are
//! re-interpretations of the same series type at a different rank, not a
//! separate tower type.
//!
//! The derivation descends to the specialization only when the head part of
//! the monomial shift is nonnegative. With a negative head, terms invisible
//! to the specialization can differentiate into visible ones, so no induced
//! derivation exists as a function of the specialized value; such contexts
//! are refused rather than silently patched.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::diffpoly::DiffPoly;
use crate::ordgroup::{ConvexLevel, GroupVector};
use crate::residue::ResidueField;
use crate::series::{DerivationSpec, Frontier, Series};

/// A proper nontrivial convex subgroup, fixing the coarsening data.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CoarseContext {
    level: ConvexLevel,
}

impl CoarseContext {
    pub fn new(level: ConvexLevel) -> Result<Self> {
        if !level.is_proper_nontrivial() {
            return Err(Error::InvalidLevel(format!(
                "coarsening requires 0 < k < n, got k = {} at rank {}",
                level.k(),
                level.rank()
            )));
        }
        Ok(CoarseContext { level })
    }

    pub fn level(&self) -> ConvexLevel {
        self.level
    }

    pub fn rank(&self) -> usize {
        self.level.rank()
    }

    /// Rank of the coarse value group.
    pub fn quotient_rank(&self) -> usize {
        self.level.quotient_rank()
    }

    /// Rank of the specialization's value group.
    pub fn residual_rank(&self) -> usize {
        self.level.residual_rank()
    }

    /// The coarse valuation: project the valuation to the quotient.
    pub fn coarse_valuation<F: ResidueField>(&self, a: &Series<F>) -> Result<GroupVector> {
        Ok(self.level.project(&a.valuation()?))
    }

    /// Image of `a` in the specialization, a series of rank `n - k`.
    ///
    /// Requires certified membership in the coarse valuation ring. The output
    /// frontier follows the input's: a frontier whose head is positive hides
    /// only terms that specialize to zero, so the image is exact; a frontier
    /// with zero head projects to the tail; anything else leaves membership
    /// uncertified.
    pub fn specialize_series<F: ResidueField>(&self, f: &F, a: &Series<F>) -> Result<Series<F>> {
        assert_eq!(a.rank(), self.rank(), "series rank mismatch");
        let out_rank = self.residual_rank();
        if a.is_exact_zero() {
            return Ok(Series::zero(out_rank));
        }
        if a.is_known_nonzero() {
            let head = self.level.project(&a.valuation()?);
            if head.is_negative() {
                return Err(Error::NotInDotO);
            }
        } else {
            let fr = a.frontier().as_finite().expect("not exact zero");
            if self.level.project(fr).is_negative() {
                return Err(Error::InsufficientPrecision(
                    "membership in the coarse valuation ring is not certified".into(),
                ));
            }
        }
        let frontier = match a.frontier() {
            Frontier::Infinite => Frontier::Infinite,
            Frontier::Finite(fr) => {
                let head = self.level.project(fr);
                if head.is_positive() {
                    Frontier::Infinite
                } else {
                    Frontier::Finite(self.level.tail(fr))
                }
            }
        };
        let terms: Vec<(GroupVector, F::Elem)> = a
            .terms()
            .iter()
            .filter(|(exp, _)| self.level.contains(exp))
            .map(|(exp, c)| (self.level.tail(exp), c.clone()))
            .collect();
        Ok(Series::from_terms(f, out_rank, terms, frontier))
    }

    /// The derivation induced on the specialization, when one exists.
    pub fn specialize_derivation<F: ResidueField>(
        &self,
        f: &F,
        spec: &DerivationSpec<F>,
    ) -> Result<DerivationSpec<F>> {
        assert_eq!(spec.rank(), self.rank(), "derivation rank mismatch");
        let head = self.level.project(spec.rho());
        if head.is_negative() {
            return Err(Error::CoarseDerivationUndefined);
        }
        if head.is_positive() {
            // Every weight image lands strictly inside the coarse maximal
            // ideal, so only the coefficient derivation survives.
            let zero_weights = vec![f.zero(); self.residual_rank()];
            return DerivationSpec::new(
                GroupVector::zero(self.residual_rank()),
                zero_weights,
                spec.coef_derivation(),
            );
        }
        DerivationSpec::new(
            self.level.tail(spec.rho()),
            spec.weights()[self.level.k()..].to_vec(),
            spec.coef_derivation(),
        )
    }

    /// Coefficientwise specialization of a polynomial in the coarse valuation
    /// ring; fails when no coefficient survives.
    pub fn specialize_poly<F: ResidueField>(
        &self,
        f: &F,
        p: &DiffPoly<F>,
    ) -> Result<DiffPoly<F>> {
        let spec_dot = self.specialize_derivation(f, p.derivation())?;
        let mut monomials = Vec::new();
        for (mon, coef) in p.monomials() {
            let image = self.specialize_series(f, coef)?;
            if !image.is_exact_zero() {
                monomials.push((mon.clone(), image));
            }
        }
        if monomials.is_empty() {
            return Err(Error::AllCoefficientsVanish);
        }
        Ok(DiffPoly::from_monomials(spec_dot, monomials))
    }

    /// Dominant degree with respect to the coarse valuation, at and beyond a
    /// coarse exponent: conjugate by a lift of `gamma_dot`, read off the
    /// coefficients whose coarse valuation attains the minimum, and take the
    /// top degree among them. Any coefficient attaining the coarse minimum
    /// has a nonzero image in the specialization, so no residue computation
    /// is needed for the degree.
    pub fn ddeg_coarse<F: ResidueField>(
        &self,
        f: &F,
        p: &DiffPoly<F>,
        gamma_dot: &GroupVector,
    ) -> Result<usize> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        assert_eq!(
            gamma_dot.rank(),
            self.quotient_rank(),
            "coarse exponent rank mismatch"
        );
        let lift = self
            .level
            .embed_head(gamma_dot);
        let g = Series::monomial(f, lift, f.one());
        let conj = p.mul_conj(f, &g)?;

        let mut min: Option<GroupVector> = None;
        let mut degrees: BTreeMap<GroupVector, usize> = BTreeMap::new();
        let mut unknown: Vec<GroupVector> = Vec::new();
        for (mon, coef) in conj.monomials() {
            match coef.valuation() {
                Ok(v) => {
                    let head = self.level.project(&v);
                    if min.as_ref().is_none_or(|m| head < *m) {
                        min = Some(head.clone());
                    }
                    let entry = degrees.entry(head).or_insert(0);
                    *entry = (*entry).max(mon.degree());
                }
                Err(Error::InsufficientPrecision(_)) => {
                    let fr = coef
                        .frontier()
                        .as_finite()
                        .expect("uncertified coefficient has a finite frontier")
                        .clone();
                    unknown.push(self.level.project(&fr));
                }
                Err(e) => return Err(e),
            }
        }
        let min = min.ok_or_else(|| {
            Error::InsufficientPrecision("no coefficient has a certified valuation".into())
        })?;
        for head in unknown {
            if head <= min {
                return Err(Error::InsufficientPrecision(
                    "a coefficient is unknown at the coarse minimum".into(),
                ));
            }
        }
        Ok(degrees[&min])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::Rationals;
    use crate::series::CoefDerivation;

    const Q: Rationals = Rationals;

    fn gv(coords: &[i64]) -> GroupVector {
        GroupVector::from_i64(coords)
    }

    fn ctx() -> CoarseContext {
        CoarseContext::new(ConvexLevel::new(1, 2).unwrap()).unwrap()
    }

    /// rho = (0,-1), d((a,b)) = a: small, non-monotone, head of rho zero.
    fn spec_z2() -> DerivationSpec<Rationals> {
        DerivationSpec::new(
            gv(&[0, -1]),
            vec![Q.one(), Q.zero()],
            CoefDerivation::Trivial,
        )
        .unwrap()
    }

    fn mono(exp: &[i64]) -> Series<Rationals> {
        Series::monomial(&Q, gv(exp), Q.one())
    }

    #[test]
    fn coarse_valuation_examples() {
        let c = ctx();
        let a = mono(&[0, -2]).add(&Q, &mono(&[1, 5]));
        assert_eq!(c.coarse_valuation(&a).unwrap(), gv(&[0]));
        assert_eq!(c.coarse_valuation(&mono(&[2, -9])).unwrap(), gv(&[2]));
        assert_eq!(c.coarse_valuation(&mono(&[-1, 3])).unwrap(), gv(&[-1]));
    }

    #[test]
    fn specialize_series_examples() {
        let c = ctx();
        // t^(0,-2) + t^(1,5) drops the second term.
        let a = mono(&[0, -2]).add(&Q, &mono(&[1, 5]));
        assert_eq!(c.specialize_series(&Q, &a).unwrap(), mono(&[-2]));
        // A term strictly inside the coarse maximal ideal specializes to zero.
        assert!(c
            .specialize_series(&Q, &mono(&[1, 5]))
            .unwrap()
            .is_exact_zero());
        // 3 + t^(0,1) keeps its shape.
        let a = Series::int(&Q, 2, 3).add(&Q, &mono(&[0, 1]));
        let expected = Series::int(&Q, 1, 3).add(&Q, &mono(&[1]));
        assert_eq!(c.specialize_series(&Q, &a).unwrap(), expected);
        // Negative coarse valuation is rejected.
        assert_eq!(
            c.specialize_series(&Q, &mono(&[-1, 3])),
            Err(Error::NotInDotO)
        );
    }

    #[test]
    fn specialized_frontier_rules() {
        let c = ctx();
        // Frontier with positive head: the image is exact.
        let a = mono(&[0, 2]).truncate(&Q, &Frontier::Finite(gv(&[1, 0])));
        let image = c.specialize_series(&Q, &a).unwrap();
        assert_eq!(image.frontier(), &Frontier::Infinite);
        // Frontier with zero head projects to the tail.
        let a = mono(&[0, 2]).truncate(&Q, &Frontier::Finite(gv(&[0, 7])));
        let image = c.specialize_series(&Q, &a).unwrap();
        assert_eq!(image.frontier(), &Frontier::Finite(gv(&[7])));
        // Unknown series whose frontier cannot certify membership.
        let a = Series::unknown(2, gv(&[-1, 0]));
        assert!(matches!(
            c.specialize_series(&Q, &a),
            Err(Error::InsufficientPrecision(_))
        ));
    }

    #[test]
    fn specialize_poly_examples() {
        let c = ctx();
        let spec = spec_z2();
        // P = Y^2 + t^(0,1) Y + t^(1,0) -> Y^2 + uY.
        let p = DiffPoly::variable(&Q, spec.clone(), 0)
            .pow(&Q, 2)
            .add(
                &Q,
                &DiffPoly::variable(&Q, spec.clone(), 0).scale_series(&Q, &mono(&[0, 1])),
            )
            .add(&Q, &DiffPoly::constant(spec.clone(), mono(&[1, 0])));
        let image = c.specialize_poly(&Q, &p).unwrap();
        let spec_dot = c.specialize_derivation(&Q, &spec).unwrap();
        let expected = DiffPoly::variable(&Q, spec_dot.clone(), 0)
            .pow(&Q, 2)
            .add(
                &Q,
                &DiffPoly::variable(&Q, spec_dot, 0)
                    .scale_series(&Q, &Series::monomial(&Q, gv(&[1]), Q.one())),
            );
        assert_eq!(image, expected);

        // All coefficients inside the coarse maximal ideal.
        let p = DiffPoly::variable(&Q, spec.clone(), 0).scale_series(&Q, &mono(&[1, 0]));
        assert_eq!(c.specialize_poly(&Q, &p), Err(Error::AllCoefficientsVanish));
    }

    #[test]
    fn induced_derivation_cases() {
        let c = ctx();
        // Head of rho zero: tail shift and tail weights survive.
        let spec = spec_z2();
        let induced = c.specialize_derivation(&Q, &spec).unwrap();
        assert_eq!(induced.rho(), &gv(&[-1]));
        assert!(Q.is_zero(&induced.weights()[0]));

        // Head of rho positive: the weight action dies downstairs.
        let spec = DerivationSpec::new(
            gv(&[1, 2]),
            vec![Q.one(), Q.one()],
            CoefDerivation::Trivial,
        )
        .unwrap();
        let induced = c.specialize_derivation(&Q, &spec).unwrap();
        assert_eq!(induced.rho(), &gv(&[0]));
        assert!(Q.is_zero(&induced.weights()[0]));

        // Head of rho negative: no induced derivation.
        let spec = DerivationSpec::new(
            gv(&[-1, 2]),
            vec![Q.zero(), Q.one()],
            CoefDerivation::Trivial,
        )
        .unwrap();
        assert_eq!(
            c.specialize_derivation(&Q, &spec),
            Err(Error::CoarseDerivationUndefined)
        );
    }

    #[test]
    fn ddeg_coarse_examples() {
        let c = ctx();
        let spec = spec_z2();
        // P = Y^2 + t^(0,1) Y + t^(1,0) at coarse exponent (0): the Y and Y^2
        // coefficients are coarse units, so the coarse dominant degree is 2.
        let p = DiffPoly::variable(&Q, spec.clone(), 0)
            .pow(&Q, 2)
            .add(
                &Q,
                &DiffPoly::variable(&Q, spec.clone(), 0).scale_series(&Q, &mono(&[0, 1])),
            )
            .add(&Q, &DiffPoly::constant(spec.clone(), mono(&[1, 0])));
        assert_eq!(c.ddeg_coarse(&Q, &p, &gv(&[0])).unwrap(), 2);

        // P = t^(1,0) + Y at coarse exponent (1): both conjugated
        // coefficients sit at coarse valuation (1).
        let p = DiffPoly::constant(spec.clone(), mono(&[1, 0]))
            .add(&Q, &DiffPoly::variable(&Q, spec, 0));
        assert!(c.ddeg_coarse(&Q, &p, &gv(&[1])).unwrap() >= 1);
    }
}
