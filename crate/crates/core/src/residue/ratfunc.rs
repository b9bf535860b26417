//! Rational functions `Q(x)` with the derivation `d/dx`.
//!
//! Elements are kept reduced with a monic denominator, so the representation
//! is canonical and equality is structural.
//!
//! `lin_solve` runs the method of undetermined coefficients over a finite
//! class of candidate denominators. Any rational solution has its poles among
//! the poles of the coefficients and the zeros of the trailing coefficient:
//! at any other point the highest-derivative term would contribute an
//! uncancellable pole. The candidate denominators are therefore powers of the
//! square-free part of that product, and `Unsolvable` certifies the absence
//! of a solution whose denominator divides such a power within the degree
//! bound.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::qpoly::QPoly;
use super::{check_lin_solve_pre, lin_solve_verify, ResidueField};
use crate::error::{Error, Result};

/// A reduced fraction of polynomials with monic denominator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatFuncElem {
    num: QPoly,
    den: QPoly,
}

impl RatFuncElem {
    /// Build and canonicalize; `den` must be nonzero.
    pub fn new(num: QPoly, den: QPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() || num.is_zero() {
            if num.is_zero() {
                (QPoly::zero(), QPoly::one())
            } else {
                (num, den)
            }
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let lead = den.leading().expect("nonzero denominator").clone();
        let inv = BigRational::one() / lead;
        Ok(RatFuncElem {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    pub fn from_poly(p: QPoly) -> Self {
        RatFuncElem {
            num: p,
            den: QPoly::one(),
        }
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }
}

/// `Q(x)` with derivation `d/dx`; `(x)' = 1`.
///
/// `bound` caps numerator and denominator degrees searched by `lin_solve`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RatFunc {
    pub bound: usize,
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc { bound: 16 }
    }
}

impl ResidueField for RatFunc {
    type Elem = RatFuncElem;

    fn zero(&self) -> RatFuncElem {
        RatFuncElem::from_poly(QPoly::zero())
    }

    fn one(&self) -> RatFuncElem {
        RatFuncElem::from_poly(QPoly::one())
    }

    fn is_zero(&self, a: &RatFuncElem) -> bool {
        a.num.is_zero()
    }

    fn add(&self, a: &RatFuncElem, b: &RatFuncElem) -> RatFuncElem {
        let num = a.num.mul(&b.den).add(&b.num.mul(&a.den));
        let den = a.den.mul(&b.den);
        RatFuncElem::new(num, den).expect("nonzero denominator")
    }

    fn neg(&self, a: &RatFuncElem) -> RatFuncElem {
        RatFuncElem {
            num: a.num.neg(),
            den: a.den.clone(),
        }
    }

    fn mul(&self, a: &RatFuncElem, b: &RatFuncElem) -> RatFuncElem {
        RatFuncElem::new(a.num.mul(&b.num), a.den.mul(&b.den)).expect("nonzero denominator")
    }

    fn inv(&self, a: &RatFuncElem) -> Result<RatFuncElem> {
        if a.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RatFuncElem::new(a.den.clone(), a.num.clone())
    }

    fn derive(&self, a: &RatFuncElem) -> RatFuncElem {
        // (n/d)' = (n'd - nd') / d^2
        let num = a.num.derivative().mul(&a.den).sub(&a.num.mul(&a.den.derivative()));
        let den = a.den.mul(&a.den);
        RatFuncElem::new(num, den).expect("nonzero denominator")
    }

    fn from_bigint(&self, n: &BigInt) -> RatFuncElem {
        RatFuncElem::from_poly(QPoly::constant(BigRational::from(n.clone())))
    }

    fn lin_solve(&self, coeffs: &[RatFuncElem]) -> Result<RatFuncElem> {
        check_lin_solve_pre(self, coeffs)?;
        let r = coeffs.len() - 1;

        // With every derivative coefficient zero the equation is algebraic.
        if coeffs[1..].iter().all(|a| self.is_zero(a)) {
            if self.is_zero(&coeffs[0]) {
                return Err(Error::Unsolvable);
            }
            let y = self.neg(&self.inv(&coeffs[0])?);
            debug_assert!(lin_solve_verify(self, coeffs, &y));
            return Ok(y);
        }

        // Poles of a solution lie among poles of the coefficients and zeros
        // of the trailing coefficient.
        let mut base = coeffs[r].num.clone();
        for a in coeffs {
            base = base.mul(&a.den);
        }
        let factor = base.squarefree_part();

        let mut den = QPoly::one();
        let max_mult = r + 2;
        for _ in 0..=max_mult {
            if den.degree().unwrap_or(0) > 2 * self.bound {
                break;
            }
            if let Some(y) = self.solve_with_denominator(coeffs, &den) {
                debug_assert!(lin_solve_verify(self, coeffs, &y));
                return Ok(y);
            }
            if factor.is_one() {
                break;
            }
            den = den.mul(&factor);
        }
        Err(Error::Unsolvable)
    }

    fn parse_elem(&self, s: &str) -> Result<RatFuncElem> {
        parse::parse(self, s)
    }

    fn render_elem(&self, a: &RatFuncElem) -> String {
        if a.is_poly() {
            a.num.render()
        } else {
            format!("({})/({})", a.num.render(), a.den.render())
        }
    }

    fn name(&self) -> &'static str {
        "ratfunc"
    }

    fn sample_elem(&self, draw: &mut dyn FnMut() -> i64) -> RatFuncElem {
        fn small_poly(draw: &mut dyn FnMut() -> i64, deg: usize) -> QPoly {
            QPoly::new(
                (0..=deg)
                    .map(|_| BigRational::from(BigInt::from(draw())))
                    .collect(),
            )
        }
        let num_deg = draw().rem_euclid(3) as usize;
        let num = small_poly(draw, num_deg);
        let den_deg = draw().rem_euclid(2) as usize;
        let mut den = small_poly(draw, den_deg);
        if den.is_zero() {
            den = QPoly::one();
        }
        RatFuncElem::new(num, den).expect("nonzero denominator")
    }
}

impl RatFunc {
    /// Undetermined coefficients for `y = N/den`, `deg N <= bound + deg den`.
    /// Returns a verified solution or `None` when the linear system is
    /// inconsistent for this denominator.
    fn solve_with_denominator(
        &self,
        coeffs: &[RatFuncElem],
        den: &QPoly,
    ) -> Option<RatFuncElem> {
        let num_deg = self.bound + den.degree().unwrap_or(0);
        let n_unknowns = num_deg + 1;

        // column_j = sum_i a_i * (x^j / den)^(i), a fixed rational function.
        let mut columns: Vec<RatFuncElem> = Vec::with_capacity(n_unknowns);
        for j in 0..n_unknowns {
            let basis = RatFuncElem::new(QPoly::monomial(BigRational::one(), j), den.clone())
                .expect("nonzero denominator");
            let mut acc = self.zero();
            let mut deriv = basis;
            for a in coeffs {
                acc = self.add(&acc, &self.mul(a, &deriv));
                deriv = self.derive(&deriv);
            }
            columns.push(acc);
        }

        // Clear denominators: M + sum_j u_j * (column_j * M) = 0.
        let mut common = QPoly::one();
        for c in &columns {
            let g = common.gcd(&c.den);
            common = common.mul(&c.den.div_rem(&g).0);
        }
        let col_polys: Vec<QPoly> = columns
            .iter()
            .map(|c| {
                let (q, r) = common.div_rem(&c.den);
                debug_assert!(r.is_zero());
                c.num.mul(&q)
            })
            .collect();

        let n_rows = col_polys
            .iter()
            .map(|p| p.coeffs().len())
            .chain([common.coeffs().len()])
            .max()
            .unwrap_or(1);
        let mut matrix: Vec<Vec<BigRational>> = (0..n_rows)
            .map(|k| col_polys.iter().map(|p| p.coeff(k)).collect())
            .collect();
        let mut rhs: Vec<BigRational> = (0..n_rows).map(|k| -common.coeff(k)).collect();

        let solution = solve_linear(&mut matrix, &mut rhs)?;
        let numerator = QPoly::new(solution);
        let y = RatFuncElem::new(numerator, den.clone()).expect("nonzero denominator");
        if lin_solve_verify(self, coeffs, &y) {
            Some(y)
        } else {
            None
        }
    }
}

/// Gaussian elimination over the rationals. Finds one solution of `A u = b`
/// (free unknowns set to zero) or `None` when the system is inconsistent.
#[allow(clippy::needless_range_loop)] // in-place pivoting reads and writes disjoint rows
fn solve_linear(
    matrix: &mut [Vec<BigRational>],
    rhs: &mut [BigRational],
) -> Option<Vec<BigRational>> {
    let n_rows = matrix.len();
    let n_cols = if n_rows == 0 { 0 } else { matrix[0].len() };
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..n_cols {
        let Some(p) = (row..n_rows).find(|&r| !matrix[r][col].is_zero()) else {
            continue;
        };
        matrix.swap(row, p);
        rhs.swap(row, p);
        let pivot = matrix[row][col].clone();
        for c in col..n_cols {
            matrix[row][c] = &matrix[row][c] / &pivot;
        }
        rhs[row] = &rhs[row] / &pivot;
        for r in 0..n_rows {
            if r != row && !matrix[r][col].is_zero() {
                let factor = matrix[r][col].clone();
                for c in col..n_cols {
                    let delta = &factor * &matrix[row][c];
                    matrix[r][c] = &matrix[r][c] - &delta;
                }
                let delta = &factor * &rhs[row];
                rhs[r] = &rhs[r] - &delta;
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == n_rows {
            break;
        }
    }
    // Inconsistent when a zero row has nonzero right-hand side.
    for r in row..n_rows {
        if !rhs[r].is_zero() {
            return None;
        }
    }
    let mut solution = vec![BigRational::zero(); n_cols];
    for (i, &col) in pivot_cols.iter().enumerate() {
        solution[col] = rhs[i].clone();
    }
    Some(solution)
}

mod parse {
    //! Expression parser for element strings like `(x^2+1)/(x-2)`.

    use super::*;

    pub fn parse(field: &RatFunc, input: &str) -> Result<RatFuncElem> {
        let mut p = Parser {
            field,
            chars: input.trim().as_bytes(),
            pos: 0,
            input,
        };
        let value = p.expr()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(Error::Parse(format!(
                "unexpected trailing input at byte {} in {:?}",
                p.pos, input
            )));
        }
        Ok(value)
    }

    struct Parser<'a> {
        field: &'a RatFunc,
        chars: &'a [u8],
        pos: usize,
        input: &'a str,
    }

    impl<'a> Parser<'a> {
        fn skip_ws(&mut self) {
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
        }

        fn peek(&mut self) -> Option<u8> {
            self.skip_ws();
            self.chars.get(self.pos).copied()
        }

        fn bump(&mut self) -> Option<u8> {
            let c = self.peek();
            if c.is_some() {
                self.pos += 1;
            }
            c
        }

        fn expr(&mut self) -> Result<RatFuncElem> {
            let mut acc = self.term()?;
            while let Some(c) = self.peek() {
                match c {
                    b'+' => {
                        self.bump();
                        let rhs = self.term()?;
                        acc = self.field.add(&acc, &rhs);
                    }
                    b'-' => {
                        self.bump();
                        let rhs = self.term()?;
                        acc = self.field.sub(&acc, &rhs);
                    }
                    _ => break,
                }
            }
            Ok(acc)
        }

        fn term(&mut self) -> Result<RatFuncElem> {
            let mut acc = self.factor()?;
            while let Some(c) = self.peek() {
                match c {
                    b'*' => {
                        self.bump();
                        let rhs = self.factor()?;
                        acc = self.field.mul(&acc, &rhs);
                    }
                    b'/' => {
                        self.bump();
                        let rhs = self.factor()?;
                        acc = self.field.div(&acc, &rhs)?;
                    }
                    _ => break,
                }
            }
            Ok(acc)
        }

        fn factor(&mut self) -> Result<RatFuncElem> {
            if self.peek() == Some(b'-') {
                self.bump();
                let inner = self.factor()?;
                return Ok(self.field.neg(&inner));
            }
            let base = self.atom()?;
            if self.peek() == Some(b'^') {
                self.bump();
                let e = self.uint()?;
                let num = base.num().pow(e);
                let den = base.den().pow(e);
                return RatFuncElem::new(num, den);
            }
            Ok(base)
        }

        fn atom(&mut self) -> Result<RatFuncElem> {
            match self.peek() {
                Some(b'(') => {
                    self.bump();
                    let inner = self.expr()?;
                    if self.bump() != Some(b')') {
                        return Err(Error::Parse(format!(
                            "missing closing parenthesis in {:?}",
                            self.input
                        )));
                    }
                    Ok(inner)
                }
                Some(b'x') => {
                    self.bump();
                    Ok(RatFuncElem::from_poly(QPoly::x()))
                }
                Some(c) if c.is_ascii_digit() => {
                    let n = self.uint()?;
                    Ok(self.field.from_i64(n as i64))
                }
                other => Err(Error::Parse(format!(
                    "unexpected token {:?} in {:?}",
                    other.map(|c| c as char),
                    self.input
                ))),
            }
        }

        fn uint(&mut self) -> Result<usize> {
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(Error::Parse(format!(
                    "expected integer at byte {} in {:?}",
                    start, self.input
                )));
            }
            self.input[start..self.pos]
                .parse()
                .map_err(|e| Error::Parse(format!("integer overflow: {}", e)))
        }
    }
}
