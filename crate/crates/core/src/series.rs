//! Truncated Hahn series over a residue field.
//!
//! A series is a finite map from exponents in `Z^n` to nonzero coefficients,
//! together with a *frontier*: an exponent bound below which the series is
//! exact. Arithmetic propagates frontiers conservatively, so a result never
//! claims more precision than its inputs carry. The frontier `Infinite` marks
//! an exact series.
//!
//! The derivation family is `c*t^g -> c'*t^g + c*d(g)*t^(g+rho)` for an
//! additive weight map `d(g) = sum g_i w_i` into the residue field, a uniform
//! monomial shift `rho`, and a choice of coefficient derivation. This family
//! is closed under the Leibniz rule, supports an exact decision of smallness
//! and monotonicity (both reduce to finitely many lexicographic feasibility
//! patterns), and contains non-monotone small derivations when `rho` has a
//! negative trailing part.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ordgroup::GroupVector;
use crate::residue::ResidueField;

/// Exponent bound below which a series is exact.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Frontier {
    Finite(GroupVector),
    Infinite,
}

impl Frontier {
    pub fn min(a: &Frontier, b: &Frontier) -> Frontier {
        match (a, b) {
            (Frontier::Infinite, _) => b.clone(),
            (_, Frontier::Infinite) => a.clone(),
            (Frontier::Finite(x), Frontier::Finite(y)) => {
                if x <= y {
                    a.clone()
                } else {
                    b.clone()
                }
            }
        }
    }

    /// Shift by a group element; `Infinite` absorbs.
    pub fn add_vec(&self, g: &GroupVector) -> Frontier {
        match self {
            Frontier::Infinite => Frontier::Infinite,
            Frontier::Finite(x) => Frontier::Finite(x.add(g)),
        }
    }

    /// Sum of two frontiers; `Infinite` absorbs.
    pub fn plus(a: &Frontier, b: &Frontier) -> Frontier {
        match (a, b) {
            (Frontier::Finite(x), Frontier::Finite(y)) => Frontier::Finite(x.add(y)),
            _ => Frontier::Infinite,
        }
    }

    /// Whether an exponent lies strictly below the frontier.
    pub fn allows(&self, exp: &GroupVector) -> bool {
        match self {
            Frontier::Infinite => true,
            Frontier::Finite(x) => exp < x,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Frontier::Infinite)
    }

    pub fn as_finite(&self) -> Option<&GroupVector> {
        match self {
            Frontier::Finite(x) => Some(x),
            Frontier::Infinite => None,
        }
    }
}

/// A truncated Hahn series with exponents in `Z^rank`.
#[derive(Clone, PartialEq, Debug)]
pub struct Series<F: ResidueField> {
    rank: usize,
    terms: BTreeMap<GroupVector, F::Elem>,
    frontier: Frontier,
}

impl<F: ResidueField> Series<F> {
    /// The exact zero series.
    pub fn zero(rank: usize) -> Self {
        Series {
            rank,
            terms: BTreeMap::new(),
            frontier: Frontier::Infinite,
        }
    }

    /// An unknown series `O(t^frontier)`: no certified terms at all.
    pub fn unknown(rank: usize, frontier: GroupVector) -> Self {
        assert_eq!(rank, frontier.rank(), "frontier rank mismatch");
        Series {
            rank,
            terms: BTreeMap::new(),
            frontier: Frontier::Finite(frontier),
        }
    }

    /// The exact monomial `c * t^exp`; zero coefficient gives the zero series.
    pub fn monomial(f: &F, exp: GroupVector, coef: F::Elem) -> Self {
        let rank = exp.rank();
        let mut terms = BTreeMap::new();
        if !f.is_zero(&coef) {
            terms.insert(exp, coef);
        }
        Series {
            rank,
            terms,
            frontier: Frontier::Infinite,
        }
    }

    pub fn constant(f: &F, rank: usize, coef: F::Elem) -> Self {
        Series::monomial(f, GroupVector::zero(rank), coef)
    }

    pub fn one(f: &F, rank: usize) -> Self {
        Series::constant(f, rank, f.one())
    }

    pub fn int(f: &F, rank: usize, n: i64) -> Self {
        Series::constant(f, rank, f.from_i64(n))
    }

    /// Build from explicit terms; duplicates merge, zeros drop, terms at or
    /// beyond the frontier drop.
    pub fn from_terms<I>(f: &F, rank: usize, terms: I, frontier: Frontier) -> Self
    where
        I: IntoIterator<Item = (GroupVector, F::Elem)>,
    {
        let mut map: BTreeMap<GroupVector, F::Elem> = BTreeMap::new();
        for (exp, coef) in terms {
            assert_eq!(exp.rank(), rank, "exponent rank mismatch");
            match map.entry(exp) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(coef);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let merged = f.add(e.get(), &coef);
                    *e.get_mut() = merged;
                }
            }
        }
        let mut s = Series {
            rank,
            terms: map,
            frontier,
        };
        s.cleanup(f);
        s
    }

    fn cleanup(&mut self, f: &F) {
        let frontier = self.frontier.clone();
        self.terms
            .retain(|exp, coef| !f.is_zero(coef) && frontier.allows(exp));
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> &BTreeMap<GroupVector, F::Elem> {
        &self.terms
    }

    pub fn frontier(&self) -> &Frontier {
        &self.frontier
    }

    /// Exactly zero (no terms, infinite frontier).
    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.frontier.is_infinite()
    }

    /// Has at least one certified term.
    pub fn is_known_nonzero(&self) -> bool {
        !self.terms.is_empty()
    }

    /// Least exponent with a nonzero coefficient.
    ///
    /// A nonempty term list always certifies the valuation, because every
    /// stored exponent lies strictly below the frontier.
    pub fn valuation(&self) -> Result<GroupVector> {
        match self.terms.keys().next() {
            Some(exp) => Ok(exp.clone()),
            None => {
                if self.frontier.is_infinite() {
                    Err(Error::ZeroHasNoValuation)
                } else {
                    Err(Error::InsufficientPrecision(
                        "series has no certified term below its frontier".into(),
                    ))
                }
            }
        }
    }

    /// Best certified lower bound on the valuation, as a frontier.
    pub fn valuation_lower_bound(&self) -> Frontier {
        match self.terms.keys().next() {
            Some(exp) => Frontier::Finite(exp.clone()),
            None => self.frontier.clone(),
        }
    }

    pub fn leading_coef(&self) -> Option<&F::Elem> {
        self.terms.values().next()
    }

    /// Coefficient at `exp`, certified; errors when the frontier hides it.
    pub fn coef_at(&self, f: &F, exp: &GroupVector) -> Result<F::Elem> {
        if !self.frontier.allows(exp) {
            return Err(Error::InsufficientPrecision(format!(
                "coefficient at {} lies beyond the frontier",
                exp
            )));
        }
        Ok(self.terms.get(exp).cloned().unwrap_or_else(|| f.zero()))
    }

    pub fn add(&self, f: &F, other: &Series<F>) -> Series<F> {
        assert_eq!(self.rank, other.rank, "series rank mismatch");
        let frontier = Frontier::min(&self.frontier, &other.frontier);
        let mut terms = self.terms.clone();
        for (exp, coef) in &other.terms {
            match terms.entry(exp.clone()) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(coef.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let merged = f.add(e.get(), coef);
                    *e.get_mut() = merged;
                }
            }
        }
        let mut s = Series {
            rank: self.rank,
            terms,
            frontier,
        };
        s.cleanup(f);
        s
    }

    pub fn neg(&self, f: &F) -> Series<F> {
        Series {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), f.neg(c)))
                .collect(),
            frontier: self.frontier.clone(),
        }
    }

    pub fn sub(&self, f: &F, other: &Series<F>) -> Series<F> {
        self.add(f, &other.neg(f))
    }

    /// Product. The output frontier is
    /// `min(frontier(a) + v(b), frontier(b) + v(a))`, with the frontier
    /// standing in for the valuation of a series with no certified terms.
    pub fn mul(&self, f: &F, other: &Series<F>) -> Series<F> {
        assert_eq!(self.rank, other.rank, "series rank mismatch");
        let f1 = Frontier::plus(&self.frontier, &other.valuation_lower_bound());
        let f2 = Frontier::plus(&other.frontier, &self.valuation_lower_bound());
        let frontier = Frontier::min(&f1, &f2);
        let mut terms: BTreeMap<GroupVector, F::Elem> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp = ea.add(eb);
                if !frontier.allows(&exp) {
                    continue;
                }
                let prod = f.mul(ca, cb);
                match terms.entry(exp) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(prod);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let merged = f.add(e.get(), &prod);
                        *e.get_mut() = merged;
                    }
                }
            }
        }
        let mut s = Series {
            rank: self.rank,
            terms,
            frontier,
        };
        s.cleanup(f);
        s
    }

    /// Multiply every coefficient by a residue-field constant.
    pub fn scale_coef(&self, f: &F, c: &F::Elem) -> Series<F> {
        if f.is_zero(c) {
            return Series::zero(self.rank);
        }
        Series {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|(e, a)| (e.clone(), f.mul(a, c)))
                .collect(),
            frontier: self.frontier.clone(),
        }
    }

    pub fn mul_int(&self, f: &F, n: &BigInt) -> Series<F> {
        self.scale_coef(f, &f.from_bigint(n))
    }

    /// Intersect the frontier with `bound`, dropping newly hidden terms.
    pub fn truncate(&self, f: &F, bound: &Frontier) -> Series<F> {
        let mut s = Series {
            rank: self.rank,
            terms: self.terms.clone(),
            frontier: Frontier::min(&self.frontier, bound),
        };
        s.cleanup(f);
        s
    }

    /// Multiplicative inverse by geometric expansion, exact below the
    /// requested frontier (capped by what the input's own frontier supports).
    ///
    /// A request that would need infinitely many terms — the remainder sits in
    /// a strictly finer archimedean class than the target — is refused rather
    /// than silently capped.
    pub fn inv(&self, f: &F, want: &Frontier) -> Result<Series<F>> {
        if self.terms.is_empty() {
            return Err(if self.frontier.is_infinite() {
                Error::DivisionByZero
            } else {
                Error::InsufficientPrecision(
                    "cannot invert a series with no certified leading term".into(),
                )
            });
        }
        let beta = self.valuation().expect("nonempty terms");
        let lead = self.leading_coef().expect("nonempty terms").clone();
        let lead_inv = f.inv(&lead)?;
        let unit_inv = Series::monomial(f, beta.neg(), lead_inv);

        // m = lead^{-1} t^{-beta} a - 1 has positive valuation.
        let m = self.mul(f, &unit_inv).sub(f, &Series::one(f, self.rank));
        let natural = self
            .frontier
            .add_vec(&beta.scale(&BigInt::from(-2)));
        let out = Frontier::min(want, &natural);

        let out_vec = match &out {
            Frontier::Infinite => {
                return if m.is_exact_zero() {
                    Ok(unit_inv)
                } else {
                    Err(Error::InsufficientPrecision(
                        "an exact inverse exists only for monomials".into(),
                    ))
                };
            }
            Frontier::Finite(v) => v.clone(),
        };
        let bound = out_vec.add(&beta);

        if m.is_exact_zero() {
            return Ok(unit_inv.truncate(f, &out));
        }

        if let Some(mu) = m.terms.keys().next() {
            debug_assert!(mu.is_positive(), "remainder must have positive valuation");
            if bound.is_positive() && mu.arch_class() > bound.arch_class() {
                return Err(Error::InsufficientPrecision(format!(
                    "inverse has unboundedly many terms below {}",
                    out_vec
                )));
            }
        }

        let geom_bound = Frontier::Finite(bound.clone());
        let neg_m = m.neg(f).truncate(f, &geom_bound);
        let mut acc: Series<F> = Series::zero(self.rank);
        let mut power = Series::one(f, self.rank);
        let mut k: u64 = 0;
        loop {
            let reached = match m.terms.keys().next() {
                Some(mu) => mu.scale(&BigInt::from(k)) >= bound,
                // No certified term in m: only the k = 0 term is certain.
                None => k >= 1,
            };
            if reached {
                break;
            }
            acc = acc.add(f, &power);
            power = power.mul(f, &neg_m).truncate(f, &geom_bound);
            k += 1;
            assert!(k < 1_000_000, "runaway geometric expansion");
        }
        let mut result = acc.mul(f, &unit_inv).truncate(f, &out);
        // The discarded tail is O(out) by the loop bound, so exactness below
        // `out` holds even when the partial sums carried larger frontiers.
        result.frontier = out;
        result.cleanup(f);
        Ok(result)
    }

    /// Apply the derivation termwise:
    /// `c t^g -> c' t^g + c d(g) t^(g+rho)`.
    pub fn derive(&self, f: &F, spec: &DerivationSpec<F>) -> Series<F> {
        assert_eq!(self.rank, spec.rank(), "derivation rank mismatch");
        let frontier = Frontier::min(&self.frontier, &self.frontier.add_vec(spec.rho()));
        let mut out: Series<F> = Series {
            rank: self.rank,
            terms: BTreeMap::new(),
            frontier,
        };
        for (exp, coef) in &self.terms {
            let dc = spec.coef_derive(f, coef);
            if !f.is_zero(&dc) {
                insert_add(f, &mut out.terms, exp.clone(), dc);
            }
            let w = spec.weight_action(f, exp);
            if !f.is_zero(&w) {
                insert_add(f, &mut out.terms, exp.add(spec.rho()), f.mul(coef, &w));
            }
        }
        out.cleanup(f);
        out
    }

    /// Image in the residue field: the coefficient at exponent zero.
    pub fn residue(&self, f: &F) -> Result<F::Elem> {
        if self.is_exact_zero() {
            return Ok(f.zero());
        }
        match self.terms.keys().next() {
            Some(v) => {
                if v.is_negative() {
                    return Err(Error::NotInValuationRing);
                }
                self.coef_at(f, &GroupVector::zero(self.rank))
            }
            None => {
                // O(t^frontier): in the valuation ring only if the frontier
                // certifies positive valuation.
                let fr = self.frontier.as_finite().expect("not exact zero");
                if fr.is_positive() || fr.is_zero() {
                    if fr.is_zero() {
                        Err(Error::InsufficientPrecision(
                            "residue unknown at frontier zero".into(),
                        ))
                    } else {
                        Ok(f.zero())
                    }
                } else {
                    Err(Error::InsufficientPrecision(
                        "membership in the valuation ring is not certified".into(),
                    ))
                }
            }
        }
    }

    /// All coefficients below `bound` agree.
    pub fn equals_below(&self, f: &F, other: &Series<F>, bound: &Frontier) -> bool {
        let keys: std::collections::BTreeSet<&GroupVector> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .filter(|e| bound.allows(e))
            .collect();
        keys.into_iter().all(|e| {
            match (self.terms.get(e), other.terms.get(e)) {
                (Some(a), Some(b)) => a == b,
                (Some(a), None) => f.is_zero(a),
                (None, Some(b)) => f.is_zero(b),
                (None, None) => true,
            }
        })
    }
}

fn insert_add<F: ResidueField>(
    f: &F,
    map: &mut BTreeMap<GroupVector, F::Elem>,
    exp: GroupVector,
    coef: F::Elem,
) {
    match map.entry(exp) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(coef);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let merged = f.add(e.get(), &coef);
            *e.get_mut() = merged;
        }
    }
}

/// Which derivation acts on the coefficients.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CoefDerivation {
    /// Coefficients are constants.
    Trivial,
    /// The residue field's native derivation.
    Field,
}

/// The derivation `c t^g -> c' t^g + c d(g) t^(g+rho)` with
/// `d(g) = sum g_i w_i`.
#[derive(Clone, PartialEq, Debug)]
pub struct DerivationSpec<F: ResidueField> {
    rho: GroupVector,
    weights: Vec<F::Elem>,
    coef_derivation: CoefDerivation,
}

/// Outcome of an exact field-level check, with a violating monomial exponent
/// when the check fails.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FieldCheck {
    pub pass: bool,
    pub witness_exponent: Option<GroupVector>,
}

impl<F: ResidueField> DerivationSpec<F> {
    pub fn new(
        rho: GroupVector,
        weights: Vec<F::Elem>,
        coef_derivation: CoefDerivation,
    ) -> Result<Self> {
        if rho.rank() != weights.len() {
            return Err(Error::RankMismatch(rho.rank(), weights.len()));
        }
        Ok(DerivationSpec {
            rho,
            weights,
            coef_derivation,
        })
    }

    pub fn rank(&self) -> usize {
        self.rho.rank()
    }

    pub fn rho(&self) -> &GroupVector {
        &self.rho
    }

    pub fn weights(&self) -> &[F::Elem] {
        &self.weights
    }

    pub fn coef_derivation(&self) -> CoefDerivation {
        self.coef_derivation
    }

    /// `d(g) = sum g_i w_i`, an additive map into the residue field.
    pub fn weight_action(&self, f: &F, g: &GroupVector) -> F::Elem {
        let mut acc = f.zero();
        for (gi, wi) in g.coords().iter().zip(&self.weights) {
            if gi.is_zero() || f.is_zero(wi) {
                continue;
            }
            acc = f.add(&acc, &f.mul(&f.from_bigint(gi), wi));
        }
        acc
    }

    pub fn coef_derive(&self, f: &F, c: &F::Elem) -> F::Elem {
        match self.coef_derivation {
            CoefDerivation::Trivial => f.zero(),
            CoefDerivation::Field => f.derive(c),
        }
    }

    /// Exact decision of smallness: the derivation maps the maximal ideal
    /// into itself iff no exponent `g > 0` with `d(g) != 0` has
    /// `g + rho <= 0`. The search enumerates the finitely many lexicographic
    /// sign patterns of candidate violations.
    pub fn small_check(&self, f: &F) -> FieldCheck {
        match self.small_violation(f) {
            Some(g) => FieldCheck {
                pass: false,
                witness_exponent: Some(g),
            },
            None => FieldCheck {
                pass: true,
                witness_exponent: None,
            },
        }
    }

    /// Exact decision of monotonicity (`v(a') >= v(a)` on the maximal ideal):
    /// fails exactly when some weight is nonzero and `rho < 0`.
    pub fn monotone_check(&self, f: &F) -> FieldCheck {
        let weighted = (0..self.weights.len()).find(|&i| !f.is_zero(&self.weights[i]));
        match weighted {
            Some(i) if self.rho.is_negative() => FieldCheck {
                pass: false,
                witness_exponent: Some(GroupVector::unit(self.rank(), i)),
            },
            _ => FieldCheck {
                pass: true,
                witness_exponent: None,
            },
        }
    }

    /// Search for `g > 0` with `d(g) != 0` and `g <= -rho`.
    fn small_violation(&self, f: &F) -> Option<GroupVector> {
        let n = self.rank();
        let sigma = self.rho.neg();
        // g = sigma exactly.
        if sigma.is_positive() && !f.is_zero(&self.weight_action(f, &sigma)) {
            return Some(sigma);
        }
        // g has first nonzero coordinate j; g first differs from sigma at i
        // with g_i < sigma_i.
        for j in 0..n {
            for i in 0..n {
                if let Some(g) = self.pattern_witness(f, j, i, &sigma) {
                    return Some(g);
                }
            }
        }
        None
    }

    /// Feasibility of one `(j, i)` pattern plus a nonzero-`d` point inside it.
    ///
    /// Constraints: `g_k = 0` for `k < j`, `g_j >= 1`, `g_k = sigma_k` for
    /// `k < i`, `g_i <= sigma_i - 1`, remaining coordinates free. The base
    /// point sits at the constraint boundary; if `d` vanishes there, any
    /// adjustable coordinate with a nonzero weight yields a nonzero value,
    /// and if none exists `d` is constant on the pattern.
    #[allow(clippy::needless_range_loop)] // k is compared against both pattern indices
    fn pattern_witness(&self, f: &F, j: usize, i: usize, sigma: &GroupVector) -> Option<GroupVector> {
        let n = self.rank();
        let one = BigInt::one();
        let two = &one + &one;
        let mut base: Vec<BigInt> = vec![BigInt::zero(); n];
        // (coordinate, allowed perturbation)
        let mut adjustable: Vec<(usize, BigInt)> = Vec::new();
        for k in 0..n {
            let s_k = &sigma.coords()[k];
            match (k.cmp(&j), k.cmp(&i)) {
                (Ordering::Less, Ordering::Less) => {
                    // g_k = 0 and g_k = sigma_k.
                    if !s_k.is_zero() {
                        return None;
                    }
                }
                (Ordering::Less, Ordering::Equal) => {
                    // g_k = 0 and g_k <= sigma_k - 1.
                    if s_k < &one {
                        return None;
                    }
                }
                (Ordering::Less, Ordering::Greater) => {
                    // g_k = 0 only.
                }
                (Ordering::Equal, Ordering::Less) => {
                    // g_j >= 1 and g_j = sigma_j.
                    if s_k < &one {
                        return None;
                    }
                    base[k] = s_k.clone();
                }
                (Ordering::Equal, Ordering::Equal) => {
                    // 1 <= g_j <= sigma_j - 1.
                    if s_k < &two {
                        return None;
                    }
                    base[k] = one.clone();
                    if s_k > &two {
                        adjustable.push((k, one.clone()));
                    }
                }
                (Ordering::Equal, Ordering::Greater) => {
                    base[k] = one.clone();
                    adjustable.push((k, one.clone()));
                }
                (Ordering::Greater, Ordering::Less) => {
                    base[k] = s_k.clone();
                }
                (Ordering::Greater, Ordering::Equal) => {
                    base[k] = s_k - &one;
                    adjustable.push((k, -one.clone()));
                }
                (Ordering::Greater, Ordering::Greater) => {
                    adjustable.push((k, one.clone()));
                }
            }
        }
        let candidate = GroupVector::new(base);
        debug_assert!(candidate.is_positive());
        debug_assert!(candidate <= *sigma);
        if !f.is_zero(&self.weight_action(f, &candidate)) {
            return Some(candidate);
        }
        for (k, step) in adjustable {
            if f.is_zero(&self.weights[k]) {
                continue;
            }
            let mut coords = candidate.coords().to_vec();
            coords[k] += step;
            let g = GroupVector::new(coords);
            debug_assert!(!f.is_zero(&self.weight_action(f, &g)));
            return Some(g);
        }
        None
    }
}

/// Dominance relations between nonzero series.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum DomRel {
    /// `a` is dominated: `v(a) >= v(b)`.
    PrecEq,
    /// Strict: `v(a) > v(b)`.
    Prec,
    /// Same valuation.
    Asymp,
    /// Asymptotically equal: `v(a - b) > v(b)`.
    Sim,
}

/// All dominance relations that hold between `a` and `b`.
pub fn dominance<F: ResidueField>(
    f: &F,
    a: &Series<F>,
    b: &Series<F>,
) -> Result<std::collections::BTreeSet<DomRel>> {
    let va = a.valuation()?;
    let vb = b.valuation()?;
    let mut out = std::collections::BTreeSet::new();
    if va >= vb {
        out.insert(DomRel::PrecEq);
    }
    if va > vb {
        out.insert(DomRel::Prec);
    }
    if va == vb {
        out.insert(DomRel::Asymp);
    }
    let diff = a.sub(f, b);
    let sim = if diff.is_exact_zero() {
        true
    } else {
        match diff.valuation_lower_bound() {
            Frontier::Infinite => true,
            Frontier::Finite(lb) => {
                if diff.is_known_nonzero() {
                    lb > vb
                } else if lb > vb {
                    true
                } else {
                    return Err(Error::InsufficientPrecision(
                        "cannot decide asymptotic equality at this precision".into(),
                    ));
                }
            }
        }
    };
    if sim {
        out.insert(DomRel::Sim);
    }
    Ok(out)
}

/// Options for the sampled diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct SampleOptions {
    pub samples: usize,
    pub seed: u64,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            samples: 200,
            seed: 42,
        }
    }
}

/// Outcome of the sampled asymptotic diagnostic.
#[derive(Clone, Debug)]
pub struct AsymptoticCheck<F: ResidueField> {
    pub pass: bool,
    pub checked: usize,
    pub witness: Option<(Series<F>, Series<F>)>,
}

/// Outcome of the sampled few-constants diagnostic.
#[derive(Clone, Debug)]
pub struct FewConstantsCheck<F: ResidueField> {
    pub pass: bool,
    pub constants_seen: usize,
    pub witness: Option<Series<F>>,
}

/// Sampled check of `v(f) > v(g) iff v(f') > v(g')` on nonzero elements of
/// the maximal ideal. Valuations of vanishing derivatives count as infinite.
pub fn asymptotic_sample_check<F: ResidueField>(
    f: &F,
    spec: &DerivationSpec<F>,
    opts: SampleOptions,
) -> AsymptoticCheck<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let rank = spec.rank();
    let mut checked = 0;
    for _ in 0..opts.samples {
        let a = sample_maximal_ideal(f, rank, &mut rng);
        let b = sample_maximal_ideal(f, rank, &mut rng);
        checked += 1;
        let lhs = a.valuation().unwrap() > b.valuation().unwrap();
        let da = a.derive(f, spec);
        let db = b.derive(f, spec);
        let rhs = match (da.valuation(), db.valuation()) {
            (Ok(x), Ok(y)) => x > y,
            (Err(_), Ok(_)) => true,   // v(a') infinite
            (_, Err(_)) => false,      // v(b') infinite
        };
        if lhs != rhs {
            return AsymptoticCheck {
                pass: false,
                checked,
                witness: Some((a, b)),
            };
        }
    }
    AsymptoticCheck {
        pass: true,
        checked,
        witness: None,
    }
}

/// Sampled check that constants stay in the valuation ring. Samples are
/// biased toward constant-coefficient series so that genuine constants show
/// up; elements with nonvanishing derivative are skipped.
pub fn few_constants_sample_check<F: ResidueField>(
    f: &F,
    spec: &DerivationSpec<F>,
    opts: SampleOptions,
) -> FewConstantsCheck<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let rank = spec.rank();
    let mut constants_seen = 0;
    for _ in 0..opts.samples {
        let a = sample_general(f, rank, &mut rng, true);
        if a.is_exact_zero() || !a.derive(f, spec).is_exact_zero() {
            continue;
        }
        constants_seen += 1;
        if a.valuation().map(|v| v.is_negative()).unwrap_or(false) {
            return FewConstantsCheck {
                pass: false,
                constants_seen,
                witness: Some(a),
            };
        }
    }
    FewConstantsCheck {
        pass: true,
        constants_seen,
        witness: None,
    }
}

fn sample_maximal_ideal<F: ResidueField>(
    f: &F,
    rank: usize,
    rng: &mut ChaCha8Rng,
) -> Series<F> {
    loop {
        let s = sample_general(f, rank, rng, false);
        if s.is_known_nonzero() && s.valuation().unwrap().is_positive() {
            return s;
        }
    }
}

fn sample_general<F: ResidueField>(
    f: &F,
    rank: usize,
    rng: &mut ChaCha8Rng,
    allow_negative: bool,
) -> Series<F> {
    let n_terms = rng.gen_range(1..=3);
    let constant_coefs = rng.gen_bool(0.5);
    let mut terms = Vec::new();
    for _ in 0..n_terms {
        let exp = GroupVector::new(
            (0..rank)
                .map(|_| {
                    let lo = if allow_negative { -3 } else { 1 };
                    BigInt::from(rng.gen_range(lo..=3i64))
                })
                .collect(),
        );
        let coef = if constant_coefs {
            f.from_i64(rng.gen_range(-4..=4))
        } else {
            let mut draw = || rng.gen_range(-4..=4i64);
            f.sample_elem(&mut draw)
        };
        terms.push((exp, coef));
    }
    Series::from_terms(f, rank, terms, Frontier::Infinite)
}
