//! Stable JSON schemas for series, derivations, polynomials, and cuts.
//!
//! Every loader validates the module invariants (ranks, nonzero
//! coefficients, distinct exponents) before handing out a value, and every
//! emitted object re-parses to an equal value.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::cuts::CutApprox;
use crate::diffpoly::{DiffMonomial, DiffPoly};
use crate::error::{Error, Result};
use crate::ordgroup::GroupVector;
use crate::residue::ResidueField;
use crate::series::{CoefDerivation, DerivationSpec, Frontier, Series};

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(untagged)]
pub enum FrontierDto {
    Finite(Vec<i64>),
    Symbol(String),
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TermDto {
    pub exp: Vec<i64>,
    pub coef: String,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SeriesDto {
    pub terms: Vec<TermDto>,
    pub frontier: FrontierDto,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(rename_all = "camelCase")]
pub struct DerivationDto {
    pub rho: Vec<i64>,
    pub weights: Vec<String>,
    pub coef_derivation: String,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct PolyMonomialDto {
    pub exps: Vec<u32>,
    pub coef: SeriesDto,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct PolyDto {
    pub order: usize,
    pub monomials: Vec<PolyMonomialDto>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CutDto {
    pub points: Vec<SeriesDto>,
}

pub fn group_vector_to_vec(g: &GroupVector) -> Result<Vec<i64>> {
    g.coords()
        .iter()
        .map(|c| {
            c.to_i64()
                .ok_or_else(|| Error::Parse(format!("exponent {} exceeds the i64 range", c)))
        })
        .collect()
}

pub fn group_vector_from_vec(v: &[i64], expect_rank: usize) -> Result<GroupVector> {
    if v.len() != expect_rank {
        return Err(Error::Parse(format!(
            "expected a rank {} exponent, got {:?}",
            expect_rank, v
        )));
    }
    Ok(GroupVector::from_i64(v))
}

pub fn series_to_dto<F: ResidueField>(f: &F, s: &Series<F>) -> Result<SeriesDto> {
    let terms = s
        .terms()
        .iter()
        .map(|(exp, coef)| {
            Ok(TermDto {
                exp: group_vector_to_vec(exp)?,
                coef: f.render_elem(coef),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let frontier = match s.frontier() {
        Frontier::Infinite => FrontierDto::Symbol("inf".into()),
        Frontier::Finite(g) => FrontierDto::Finite(group_vector_to_vec(g)?),
    };
    Ok(SeriesDto { terms, frontier })
}

pub fn series_from_dto<F: ResidueField>(
    f: &F,
    rank: usize,
    dto: &SeriesDto,
) -> Result<Series<F>> {
    let frontier = match &dto.frontier {
        FrontierDto::Symbol(s) if s == "inf" => Frontier::Infinite,
        FrontierDto::Symbol(s) => {
            return Err(Error::Parse(format!(
                "unknown frontier symbol {:?}; expected \"inf\"",
                s
            )))
        }
        FrontierDto::Finite(v) => Frontier::Finite(group_vector_from_vec(v, rank)?),
    };
    let mut seen = std::collections::BTreeSet::new();
    let mut terms = Vec::with_capacity(dto.terms.len());
    for term in &dto.terms {
        let exp = group_vector_from_vec(&term.exp, rank)?;
        if !seen.insert(exp.clone()) {
            return Err(Error::Parse(format!(
                "duplicate exponent {:?} in series",
                term.exp
            )));
        }
        let coef = f.parse_elem(&term.coef)?;
        if f.is_zero(&coef) {
            return Err(Error::Parse(format!(
                "zero coefficient stored at exponent {:?}",
                term.exp
            )));
        }
        if !frontier.allows(&exp) {
            return Err(Error::Parse(format!(
                "exponent {:?} is not below the frontier",
                term.exp
            )));
        }
        terms.push((exp, coef));
    }
    Ok(Series::from_terms(f, rank, terms, frontier))
}

pub fn derivation_to_dto<F: ResidueField>(
    f: &F,
    spec: &DerivationSpec<F>,
) -> Result<DerivationDto> {
    Ok(DerivationDto {
        rho: group_vector_to_vec(spec.rho())?,
        weights: spec.weights().iter().map(|w| f.render_elem(w)).collect(),
        coef_derivation: match spec.coef_derivation() {
            CoefDerivation::Trivial => "trivial".into(),
            CoefDerivation::Field => "field".into(),
        },
    })
}

pub fn derivation_from_dto<F: ResidueField>(
    f: &F,
    rank: usize,
    dto: &DerivationDto,
) -> Result<DerivationSpec<F>> {
    let rho = group_vector_from_vec(&dto.rho, rank)?;
    let weights = dto
        .weights
        .iter()
        .map(|w| f.parse_elem(w))
        .collect::<Result<Vec<_>>>()?;
    let coef_derivation = match dto.coef_derivation.as_str() {
        "trivial" => CoefDerivation::Trivial,
        "field" => CoefDerivation::Field,
        other => {
            return Err(Error::Parse(format!(
                "unknown coefficient derivation {:?}; expected \"trivial\" or \"field\"",
                other
            )))
        }
    };
    DerivationSpec::new(rho, weights, coef_derivation)
        .map_err(|e| Error::Parse(format!("invalid derivation: {}", e)))
}

pub fn poly_to_dto<F: ResidueField>(f: &F, p: &DiffPoly<F>) -> Result<PolyDto> {
    let monomials = p
        .monomials()
        .iter()
        .map(|(m, c)| {
            Ok(PolyMonomialDto {
                exps: m.exps().to_vec(),
                coef: series_to_dto(f, c)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PolyDto {
        order: p.order().unwrap_or(0),
        monomials,
    })
}

pub fn poly_from_dto<F: ResidueField>(
    f: &F,
    spec: &DerivationSpec<F>,
    dto: &PolyDto,
) -> Result<DiffPoly<F>> {
    let mut seen = std::collections::BTreeSet::new();
    let mut monomials = Vec::with_capacity(dto.monomials.len());
    for entry in &dto.monomials {
        if entry.exps.len() > dto.order + 1 {
            return Err(Error::Parse(format!(
                "monomial {:?} exceeds the declared order {}",
                entry.exps, dto.order
            )));
        }
        let mon = DiffMonomial::new(entry.exps.clone());
        if !seen.insert(mon.clone()) {
            return Err(Error::Parse(format!(
                "duplicate monomial {:?} in polynomial",
                entry.exps
            )));
        }
        let coef = series_from_dto(f, spec.rank(), &entry.coef)?;
        if coef.is_exact_zero() {
            return Err(Error::Parse(format!(
                "zero coefficient stored at monomial {:?}",
                entry.exps
            )));
        }
        monomials.push((mon, coef));
    }
    Ok(DiffPoly::from_monomials(spec.clone(), monomials))
}

pub fn cut_to_dto<F: ResidueField>(f: &F, cut: &CutApprox<F>) -> Result<CutDto> {
    Ok(CutDto {
        points: cut
            .points()
            .iter()
            .map(|p| series_to_dto(f, p))
            .collect::<Result<Vec<_>>>()?,
    })
}

/// Parse and validate a cut; the difference valuations are always recomputed,
/// never trusted from input.
pub fn cut_from_dto<F: ResidueField>(f: &F, rank: usize, dto: &CutDto) -> Result<CutApprox<F>> {
    let points = dto
        .points
        .iter()
        .map(|p| series_from_dto(f, rank, p))
        .collect::<Result<Vec<_>>>()?;
    CutApprox::validate(f, points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{standard_rank2, GenConfig, InstanceGen};

    #[test]
    fn series_round_trip_via_json_text() {
        let (f, spec) = standard_rank2();
        let mut gen = InstanceGen::new(&f, spec, GenConfig::default());
        for _ in 0..50 {
            let s = gen.series();
            let dto = series_to_dto(&f, &s).unwrap();
            let text = serde_json::to_string(&dto).unwrap();
            let back: SeriesDto = serde_json::from_str(&text).unwrap();
            assert_eq!(series_from_dto(&f, 2, &back).unwrap(), s);
        }
    }

    #[test]
    fn poly_round_trip_via_json_text() {
        let (f, spec) = standard_rank2();
        let mut gen = InstanceGen::new(&f, spec.clone(), GenConfig::default());
        for _ in 0..50 {
            let p = gen.poly();
            let dto = poly_to_dto(&f, &p).unwrap();
            let text = serde_json::to_string(&dto).unwrap();
            let back: PolyDto = serde_json::from_str(&text).unwrap();
            assert_eq!(poly_from_dto(&f, &spec, &back).unwrap(), p);
        }
    }

    #[test]
    fn schema_matches_documented_shape() {
        let (f, _spec) = standard_rank2();
        let s = Series::monomial(
            &f,
            GroupVector::from_i64(&[0, 1]),
            f.parse_elem("3/2").unwrap(),
        )
        .truncate(&f, &Frontier::Finite(GroupVector::from_i64(&[2, 0])));
        let dto = series_to_dto(&f, &s).unwrap();
        assert_eq!(
            serde_json::to_string(&dto).unwrap(),
            r#"{"terms":[{"exp":[0,1],"coef":"3/2"}],"frontier":[2,0]}"#
        );
        let exact = Series::one(&f, 2);
        let dto = series_to_dto(&f, &exact).unwrap();
        assert_eq!(
            serde_json::to_string(&dto).unwrap(),
            r#"{"terms":[{"exp":[0,0],"coef":"1"}],"frontier":"inf"}"#
        );
    }

    #[test]
    fn loaders_reject_invariant_violations() {
        let (f, spec) = standard_rank2();
        let bad: SeriesDto = serde_json::from_str(
            r#"{"terms":[{"exp":[0,1],"coef":"0"}],"frontier":"inf"}"#,
        )
        .unwrap();
        assert!(matches!(
            series_from_dto(&f, 2, &bad),
            Err(Error::Parse(_))
        ));
        let bad: SeriesDto = serde_json::from_str(
            r#"{"terms":[{"exp":[0,1],"coef":"1"},{"exp":[0,1],"coef":"2"}],"frontier":"inf"}"#,
        )
        .unwrap();
        assert!(matches!(
            series_from_dto(&f, 2, &bad),
            Err(Error::Parse(_))
        ));
        let bad: SeriesDto = serde_json::from_str(
            r#"{"terms":[{"exp":[3,0],"coef":"1"}],"frontier":[2,0]}"#,
        )
        .unwrap();
        assert!(matches!(
            series_from_dto(&f, 2, &bad),
            Err(Error::Parse(_))
        ));
        let bad: PolyDto = serde_json::from_str(
            r#"{"order":0,"monomials":[{"exps":[0,1],"coef":{"terms":[],"frontier":"inf"}}]}"#,
        )
        .unwrap();
        assert!(matches!(
            poly_from_dto(&f, &spec, &bad),
            Err(Error::Parse(_))
        ));
    }
}
