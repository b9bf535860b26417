//! Residue differential fields.
//!
//! A residue field is presented as a descriptor object whose elements are an
//! associated type, in the style of ring-descriptor libraries: operations take
//! the field by reference. Two concrete instances are provided, the rationals
//! with the zero derivation and rational functions `Q(x)` with `d/dx`.
//!
//! Neither instance is fully linearly surjective; [`ResidueField::lin_solve`]
//! reports `Unsolvable` when its instance-specific search finds no witness,
//! which callers must read as "no witness found", never "no solution exists".

mod qpoly;
mod rationals;
mod ratfunc;

pub use qpoly::QPoly;
pub use rationals::Rationals;
pub use ratfunc::{RatFunc, RatFuncElem};

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};

/// A differential field of characteristic zero used as coefficient domain.
#[allow(clippy::wrong_self_convention)] // field descriptors construct their own elements
pub trait ResidueField: Clone + PartialEq + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; errors with `DivisionByZero` on zero.
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    /// The native derivation of the field.
    fn derive(&self, a: &Self::Elem) -> Self::Elem;
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_bigint(&BigInt::from(n))
    }

    /// Solve `1 + a_0 y + a_1 y' + ... + a_r y^(r) = 0` exactly, or report
    /// `Unsolvable` when the instance-specific search exhausts its class.
    /// Implementations re-verify any candidate by substitution before
    /// returning it.
    fn lin_solve(&self, coeffs: &[Self::Elem]) -> Result<Self::Elem>;

    fn parse_elem(&self, s: &str) -> Result<Self::Elem>;
    fn render_elem(&self, a: &Self::Elem) -> String;

    fn name(&self) -> &'static str;

    /// Build a pseudo-random element from a supply of small integers; used by
    /// the seeded generators. May return zero.
    fn sample_elem(&self, draw: &mut dyn FnMut() -> i64) -> Self::Elem;
}

/// Shared substitution check for `lin_solve` implementations.
pub(crate) fn lin_solve_verify<F: ResidueField>(f: &F, coeffs: &[F::Elem], y: &F::Elem) -> bool {
    let mut acc = f.one();
    let mut deriv = y.clone();
    for a in coeffs {
        acc = f.add(&acc, &f.mul(a, &deriv));
        deriv = f.derive(&deriv);
    }
    f.is_zero(&acc)
}

pub(crate) fn check_lin_solve_pre<F: ResidueField>(f: &F, coeffs: &[F::Elem]) -> Result<()> {
    match coeffs.last() {
        None => Err(Error::PreconditionViolated(
            "lin_solve requires at least one coefficient".into(),
        )),
        Some(a) if f.is_zero(a) => Err(Error::PreconditionViolated(
            "lin_solve requires the trailing coefficient to be nonzero".into(),
        )),
        Some(_) => Ok(()),
    }
}
