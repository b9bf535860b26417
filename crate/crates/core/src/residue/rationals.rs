//! The rationals with the zero derivation.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{check_lin_solve_pre, lin_solve_verify, ResidueField};
use crate::error::{Error, Result};

/// `Q` with the zero derivation. Elements serialize as `"5/6"` or `"3"`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Rationals;

impl ResidueField for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn inv(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(BigRational::one() / a)
    }

    fn derive(&self, _a: &BigRational) -> BigRational {
        BigRational::zero()
    }

    fn from_bigint(&self, n: &BigInt) -> BigRational {
        BigRational::from(n.clone())
    }

    /// With the zero derivation the equation collapses to `1 + a_0 y = 0`,
    /// solvable exactly when `a_0 != 0`.
    fn lin_solve(&self, coeffs: &[BigRational]) -> Result<BigRational> {
        check_lin_solve_pre(self, coeffs)?;
        let a0 = &coeffs[0];
        if a0.is_zero() {
            return Err(Error::Unsolvable);
        }
        let y = -BigRational::one() / a0;
        debug_assert!(lin_solve_verify(self, coeffs, &y));
        Ok(y)
    }

    fn parse_elem(&self, s: &str) -> Result<BigRational> {
        BigRational::from_str(s.trim())
            .map_err(|e| Error::Parse(format!("invalid rational {:?}: {}", s, e)))
    }

    fn render_elem(&self, a: &BigRational) -> String {
        a.to_string()
    }

    fn name(&self) -> &'static str {
        "rationals"
    }

    fn sample_elem(&self, draw: &mut dyn FnMut() -> i64) -> BigRational {
        let num = draw();
        let den = draw().rem_euclid(3) + 1;
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}
