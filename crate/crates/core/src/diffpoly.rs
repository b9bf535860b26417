//! Differential polynomials over the series field.
//!
//! A polynomial is a sparse map from monomials in `Y, Y', ..., Y^(r)` to
//! series coefficients and carries its derivation context, so conjugation and
//! evaluation never mix incompatible derivations. Coefficients that are
//! exactly zero are never stored; coefficients with no certified term are
//! kept, and precision-sensitive operations refuse to answer when such a
//! coefficient could change the result.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ordgroup::GroupVector;
use crate::residue::ResidueField;
use crate::series::{DerivationSpec, Series};

/// A power product of the variables `Y, Y', Y'', ...`, exponents trimmed.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct DiffMonomial(Vec<u32>);

impl DiffMonomial {
    pub fn new(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        DiffMonomial(exps)
    }

    /// The constant monomial `1`.
    pub fn one() -> Self {
        DiffMonomial(Vec::new())
    }

    /// The single variable `Y^(i)`.
    pub fn var(i: usize) -> Self {
        let mut exps = vec![0; i + 1];
        exps[i] = 1;
        DiffMonomial(exps)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn exp_of(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    /// Highest derivative index occurring; `None` for the constant monomial.
    pub fn order(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    pub fn mul(&self, other: &DiffMonomial) -> DiffMonomial {
        let n = self.0.len().max(other.0.len());
        DiffMonomial::new((0..n).map(|i| self.exp_of(i) + other.exp_of(i)).collect())
    }
}

/// A differential polynomial with series coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct DiffPoly<F: ResidueField> {
    derivation: DerivationSpec<F>,
    monomials: BTreeMap<DiffMonomial, Series<F>>,
}

/// Dominant data of a nonzero polynomial: the monomial `t^v(P)`, the residue
/// image of its scaled coefficients, and the degree of that image.
#[derive(Clone, PartialEq, Debug)]
pub struct DominantData<F: ResidueField> {
    pub dmonomial: Series<F>,
    pub dpart: ResiduePoly<F>,
    pub ddeg: usize,
}

impl<F: ResidueField> DiffPoly<F> {
    pub fn zero(derivation: DerivationSpec<F>) -> Self {
        DiffPoly {
            derivation,
            monomials: BTreeMap::new(),
        }
    }

    pub fn constant(derivation: DerivationSpec<F>, coef: Series<F>) -> Self {
        let mut p = DiffPoly::zero(derivation);
        p.insert(DiffMonomial::one(), coef);
        p
    }

    /// The variable `Y^(i)`.
    pub fn variable(f: &F, derivation: DerivationSpec<F>, i: usize) -> Self {
        let rank = derivation.rank();
        let mut p = DiffPoly::zero(derivation);
        p.insert(DiffMonomial::var(i), Series::one(f, rank));
        p
    }

    pub fn from_monomials<I>(derivation: DerivationSpec<F>, monomials: I) -> Self
    where
        I: IntoIterator<Item = (DiffMonomial, Series<F>)>,
    {
        let mut p = DiffPoly::zero(derivation);
        for (m, c) in monomials {
            p.insert(m, c);
        }
        p
    }

    fn insert(&mut self, mon: DiffMonomial, coef: Series<F>) {
        assert_eq!(
            coef.rank(),
            self.derivation.rank(),
            "coefficient rank mismatch"
        );
        if coef.is_exact_zero() {
            return;
        }
        self.monomials.insert(mon, coef);
    }

    fn insert_add(&mut self, f: &F, mon: DiffMonomial, coef: Series<F>) {
        if coef.is_exact_zero() {
            return;
        }
        match self.monomials.remove(&mon) {
            None => {
                self.insert(mon, coef);
            }
            Some(old) => {
                let merged = old.add(f, &coef);
                self.insert(mon, merged);
            }
        }
    }

    pub fn derivation(&self) -> &DerivationSpec<F> {
        &self.derivation
    }

    pub fn rank(&self) -> usize {
        self.derivation.rank()
    }

    pub fn monomials(&self) -> &BTreeMap<DiffMonomial, Series<F>> {
        &self.monomials
    }

    pub fn coef(&self, mon: &DiffMonomial) -> Option<&Series<F>> {
        self.monomials.get(mon)
    }

    /// Known to be the zero polynomial (no stored coefficients at all).
    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Highest derivative index actually occurring.
    pub fn order(&self) -> Option<usize> {
        self.monomials.keys().filter_map(|m| m.order()).max()
    }

    pub fn degree(&self) -> Option<usize> {
        self.monomials.keys().map(|m| m.degree()).max()
    }

    pub fn add(&self, f: &F, other: &DiffPoly<F>) -> DiffPoly<F> {
        assert_eq!(self.derivation, other.derivation, "derivation mismatch");
        let mut out = self.clone();
        for (m, c) in &other.monomials {
            out.insert_add(f, m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self, f: &F) -> DiffPoly<F> {
        DiffPoly {
            derivation: self.derivation.clone(),
            monomials: self
                .monomials
                .iter()
                .map(|(m, c)| (m.clone(), c.neg(f)))
                .collect(),
        }
    }

    pub fn sub(&self, f: &F, other: &DiffPoly<F>) -> DiffPoly<F> {
        self.add(f, &other.neg(f))
    }

    pub fn mul(&self, f: &F, other: &DiffPoly<F>) -> DiffPoly<F> {
        assert_eq!(self.derivation, other.derivation, "derivation mismatch");
        let mut out = DiffPoly::zero(self.derivation.clone());
        for (ma, ca) in &self.monomials {
            for (mb, cb) in &other.monomials {
                out.insert_add(f, ma.mul(mb), ca.mul(f, cb));
            }
        }
        out
    }

    pub fn scale_series(&self, f: &F, s: &Series<F>) -> DiffPoly<F> {
        let mut out = DiffPoly::zero(self.derivation.clone());
        for (m, c) in &self.monomials {
            out.insert_add(f, m.clone(), c.mul(f, s));
        }
        out
    }

    pub fn pow(&self, f: &F, e: u32) -> DiffPoly<F> {
        let mut acc = DiffPoly::constant(
            self.derivation.clone(),
            Series::one(f, self.rank()),
        );
        for _ in 0..e {
            acc = acc.mul(f, self);
        }
        acc
    }

    /// Evaluate at a series. The frontier of the result records exactly how
    /// far the output is certified given the input precision.
    pub fn eval(&self, f: &F, a: &Series<F>) -> Series<F> {
        let rank = self.rank();
        let r = self.order().unwrap_or(0);
        let derivs = derivative_tower(f, &self.derivation, a, r);
        let mut acc = Series::zero(rank);
        for (mon, coef) in &self.monomials {
            let mut term = coef.clone();
            for (i, &e) in mon.exps().iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(f, &derivs[i]);
                }
            }
            acc = acc.add(f, &term);
        }
        acc
    }

    /// Replace each variable `Y^(i)` by `images[i]` and expand.
    fn substitute(&self, f: &F, images: &[DiffPoly<F>]) -> DiffPoly<F> {
        let mut acc = DiffPoly::zero(self.derivation.clone());
        for (mon, coef) in &self.monomials {
            let mut term = DiffPoly::constant(self.derivation.clone(), coef.clone());
            for (i, &e) in mon.exps().iter().enumerate() {
                if e > 0 {
                    term = term.mul(f, &images[i].pow(f, e));
                }
            }
            acc = acc.add(f, &term);
        }
        acc
    }

    /// Additive conjugate `P(a + Y)`.
    pub fn add_conj(&self, f: &F, a: &Series<F>) -> DiffPoly<F> {
        let r = self.order().unwrap_or(0);
        let derivs = derivative_tower(f, &self.derivation, a, r);
        let images: Vec<DiffPoly<F>> = (0..=r)
            .map(|i| {
                DiffPoly::variable(f, self.derivation.clone(), i).add(
                    f,
                    &DiffPoly::constant(self.derivation.clone(), derivs[i].clone()),
                )
            })
            .collect();
        self.substitute(f, &images)
    }

    /// Multiplicative conjugate `P(aY)`, expanding `(aY)^(i)` by the Leibniz
    /// rule. Requires `a` known nonzero.
    pub fn mul_conj(&self, f: &F, a: &Series<F>) -> Result<DiffPoly<F>> {
        if a.is_exact_zero() {
            return Err(Error::ZeroConjugate);
        }
        if !a.is_known_nonzero() {
            return Err(Error::InsufficientPrecision(
                "cannot conjugate by a series with no certified term".into(),
            ));
        }
        let r = self.order().unwrap_or(0);
        let derivs = derivative_tower(f, &self.derivation, a, r);
        let images: Vec<DiffPoly<F>> = (0..=r)
            .map(|i| {
                // (aY)^(i) = sum_j C(i,j) a^(i-j) Y^(j)
                let mut image = DiffPoly::zero(self.derivation.clone());
                for j in 0..=i {
                    let coef = derivs[i - j].mul_int(f, &binomial(i, j));
                    image.insert_add(f, DiffMonomial::var(j), coef);
                }
                image
            })
            .collect();
        Ok(self.substitute(f, &images))
    }

    /// The homogeneous part of degree `d`.
    pub fn hom_part(&self, d: usize) -> DiffPoly<F> {
        DiffPoly {
            derivation: self.derivation.clone(),
            monomials: self
                .monomials
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The complexity triple `(order, degree in the top derivative, total
    /// degree)`; a nonzero constant polynomial reports `(0, 0, 0)`.
    pub fn complexity(&self) -> Result<(usize, usize, usize)> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        match self.order() {
            None => Ok((0, 0, 0)),
            Some(r) => {
                let s = self
                    .monomials
                    .keys()
                    .map(|m| m.exp_of(r) as usize)
                    .max()
                    .unwrap_or(0);
                let t = self.degree().unwrap_or(0);
                Ok((r, s, t))
            }
        }
    }

    /// Minimum valuation over the coefficients.
    ///
    /// A coefficient with no certified term blocks the computation only when
    /// its frontier fails to clear the certified minimum: at or above the
    /// minimum the unknown tail cannot move it.
    pub fn v_poly(&self, _f: &F) -> Result<GroupVector> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut min: Option<GroupVector> = None;
        let mut unknown: Vec<GroupVector> = Vec::new();
        for coef in self.monomials.values() {
            match coef.valuation() {
                Ok(v) => {
                    if min.as_ref().is_none_or(|m| v < *m) {
                        min = Some(v);
                    }
                }
                Err(Error::InsufficientPrecision(_)) => {
                    let fr = coef
                        .frontier()
                        .as_finite()
                        .expect("uncertified coefficient has a finite frontier")
                        .clone();
                    unknown.push(fr);
                }
                Err(e) => return Err(e),
            }
        }
        let min = min.ok_or_else(|| {
            Error::InsufficientPrecision("no coefficient has a certified valuation".into())
        })?;
        for fr in unknown {
            if fr < min {
                return Err(Error::InsufficientPrecision(format!(
                    "a coefficient is unknown below {} at the candidate minimum {}",
                    fr, min
                )));
            }
        }
        Ok(min)
    }

    /// Best certified lower bound on `v_poly`, as a frontier.
    pub fn valuation_lower_bound(&self) -> crate::series::Frontier {
        let mut acc = crate::series::Frontier::Infinite;
        for coef in self.monomials.values() {
            acc = crate::series::Frontier::min(&acc, &coef.valuation_lower_bound());
        }
        acc
    }

    /// Dominant monomial, dominant part, and dominant degree.
    pub fn dominant(&self, f: &F) -> Result<DominantData<F>> {
        let beta = self.v_poly(f)?;
        let mut dpart = BTreeMap::new();
        for (mon, coef) in &self.monomials {
            let res = coef.coef_at(f, &beta)?;
            if !f.is_zero(&res) {
                dpart.insert(mon.clone(), res);
            }
        }
        let dpart = ResiduePoly { monomials: dpart };
        let ddeg = dpart.degree().expect("dominant part is nonzero");
        Ok(DominantData {
            dmonomial: Series::monomial(f, beta, f.one()),
            dpart,
            ddeg,
        })
    }

    /// Plain dominant degree.
    pub fn ddeg(&self, f: &F) -> Result<usize> {
        Ok(self.dominant(f)?.ddeg)
    }

    /// Dominant degree at and beyond `gamma`: the dominant degree of
    /// `P(t^gamma Y)`, which equals the maximum over all conjugates by
    /// elements of valuation at least `gamma`.
    pub fn ddeg_geq(&self, f: &F, gamma: &GroupVector) -> Result<usize> {
        let g = Series::monomial(f, gamma.clone(), f.one());
        self.mul_conj(f, &g)?.ddeg(f)
    }

    /// `v(P(t^gamma Y))`, the coefficient growth profile used by the cut
    /// diagnostics.
    pub fn v_p_gamma(&self, f: &F, gamma: &GroupVector) -> Result<GroupVector> {
        let g = Series::monomial(f, gamma.clone(), f.one());
        self.mul_conj(f, &g)?.v_poly(f)
    }
}

/// `[a, a', ..., a^(r)]` under the given derivation.
pub fn derivative_tower<F: ResidueField>(
    f: &F,
    spec: &DerivationSpec<F>,
    a: &Series<F>,
    r: usize,
) -> Vec<Series<F>> {
    let mut out = Vec::with_capacity(r + 1);
    out.push(a.clone());
    for i in 0..r {
        let next = out[i].derive(f, spec);
        out.push(next);
    }
    out
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from((n - i) as u64) / BigInt::from((i + 1) as u64);
    }
    acc
}

/// A differential polynomial over the residue field.
#[derive(Clone, PartialEq, Debug)]
pub struct ResiduePoly<F: ResidueField> {
    monomials: BTreeMap<DiffMonomial, F::Elem>,
}

impl<F: ResidueField> ResiduePoly<F> {
    pub fn new<I>(f: &F, monomials: I) -> Self
    where
        I: IntoIterator<Item = (DiffMonomial, F::Elem)>,
    {
        ResiduePoly {
            monomials: monomials
                .into_iter()
                .filter(|(_, c)| !f.is_zero(c))
                .collect(),
        }
    }

    pub fn monomials(&self) -> &BTreeMap<DiffMonomial, F::Elem> {
        &self.monomials
    }

    pub fn coef(&self, mon: &DiffMonomial) -> Option<&F::Elem> {
        self.monomials.get(mon)
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.monomials.keys().map(|m| m.degree()).max()
    }

    pub fn mul(&self, f: &F, other: &ResiduePoly<F>) -> ResiduePoly<F> {
        let mut out: BTreeMap<DiffMonomial, F::Elem> = BTreeMap::new();
        for (ma, ca) in &self.monomials {
            for (mb, cb) in &other.monomials {
                let m = ma.mul(mb);
                let prod = f.mul(ca, cb);
                match out.remove(&m) {
                    None => {
                        out.insert(m, prod);
                    }
                    Some(old) => {
                        out.insert(m, f.add(&old, &prod));
                    }
                }
            }
        }
        out.retain(|_, c| !f.is_zero(c));
        ResiduePoly { monomials: out }
    }

    pub fn scale(&self, f: &F, c: &F::Elem) -> ResiduePoly<F> {
        if f.is_zero(c) {
            return ResiduePoly {
                monomials: BTreeMap::new(),
            };
        }
        ResiduePoly {
            monomials: self
                .monomials
                .iter()
                .map(|(m, a)| (m.clone(), f.mul(a, c)))
                .collect(),
        }
    }

    /// When `self = c * other` for a nonzero scalar `c`, return that scalar.
    pub fn scalar_ratio(&self, f: &F, other: &ResiduePoly<F>) -> Option<F::Elem> {
        if self.is_zero() || other.is_zero() {
            return None;
        }
        if self.monomials.len() != other.monomials.len() {
            return None;
        }
        let mut ratio: Option<F::Elem> = None;
        for (m, a) in &self.monomials {
            let b = other.monomials.get(m)?;
            let r = f.div(a, b).ok()?;
            match &ratio {
                None => ratio = Some(r),
                Some(prev) if *prev == r => {}
                Some(_) => return None,
            }
        }
        ratio
    }
}
