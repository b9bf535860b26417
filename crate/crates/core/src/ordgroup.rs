//! Finite-rank ordered abelian groups.
//!
//! The value group is fixed to `Z^n` under lexicographic order (most
//! significant coordinate first). All `n + 1` convex subgroups are coordinate
//! masks `D_k = { g : first k coordinates zero }`, which makes quotients and
//! archimedean classes exactly computable.
//!
//! Coordinates are arbitrary-precision integers so that iterated conjugation
//! never overflows.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// An element of `Z^n` with the lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupVector {
    coords: Vec<BigInt>,
}

impl GroupVector {
    pub fn new(coords: Vec<BigInt>) -> Self {
        GroupVector { coords }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        GroupVector {
            coords: coords.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    pub fn zero(rank: usize) -> Self {
        GroupVector {
            coords: vec![BigInt::zero(); rank],
        }
    }

    /// The basis vector with 1 at `idx`.
    pub fn unit(rank: usize, idx: usize) -> Self {
        let mut coords = vec![BigInt::zero(); rank];
        coords[idx] = BigInt::from(1);
        GroupVector { coords }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Lexicographic comparison, leftmost coordinate most significant.
    pub fn cmp_lex(&self, other: &GroupVector) -> Result<Ordering> {
        if self.rank() != other.rank() {
            return Err(Error::RankMismatch(self.rank(), other.rank()));
        }
        Ok(self.coords.cmp(&other.coords))
    }

    /// Index of the first nonzero coordinate; `None` for the zero element.
    ///
    /// Two elements are archimedean-equivalent exactly when their classes
    /// agree, and `x` is `o(y)` exactly when `arch_class(x) > arch_class(y)`
    /// (with `None`, the class of 0, above every index).
    pub fn arch_class(&self) -> Option<usize> {
        self.coords.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &GroupVector) -> GroupVector {
        assert_eq!(self.rank(), other.rank(), "group vector rank mismatch");
        GroupVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &GroupVector) -> GroupVector {
        assert_eq!(self.rank(), other.rank(), "group vector rank mismatch");
        GroupVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> GroupVector {
        GroupVector {
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, n: &BigInt) -> GroupVector {
        GroupVector {
            coords: self.coords.iter().map(|a| a * n).collect(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self.arch_class() {
            Some(i) => self.coords[i].is_positive(),
            None => false,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self.arch_class() {
            Some(i) => self.coords[i].is_negative(),
            None => false,
        }
    }
}

impl Ord for GroupVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_lex(other).expect("group vector rank mismatch")
    }
}

impl PartialOrd for GroupVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for GroupVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for GroupVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The convex subgroup `D_k = { g in Z^n : first k coordinates zero }`.
///
/// `D_0` is the whole group, `D_n` is trivial, and the chain
/// `D_0 > D_1 > ... > D_n` exhausts the convex subgroups of `Z^n` lex.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ConvexLevel {
    k: usize,
    rank: usize,
}

impl ConvexLevel {
    pub fn new(k: usize, rank: usize) -> Result<Self> {
        if k > rank {
            return Err(Error::InvalidLevel(format!(
                "level {} exceeds rank {}",
                k, rank
            )));
        }
        Ok(ConvexLevel { k, rank })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Rank of the quotient group `Z^n / D_k`.
    pub fn quotient_rank(&self) -> usize {
        self.k
    }

    /// Rank of `D_k` itself.
    pub fn residual_rank(&self) -> usize {
        self.rank - self.k
    }

    /// Proper and nontrivial: `{0} != D_k != Z^n`.
    pub fn is_proper_nontrivial(&self) -> bool {
        self.k > 0 && self.k < self.rank
    }

    /// Membership `g in D_k`.
    pub fn contains(&self, g: &GroupVector) -> bool {
        assert_eq!(g.rank(), self.rank, "group vector rank mismatch");
        g.coords()[..self.k].iter().all(|c| c.is_zero())
    }

    /// Whether `g` exceeds the whole subgroup: `g > d` for every `d in D_k`.
    pub fn exceeds(&self, g: &GroupVector) -> bool {
        self.project(g).is_positive()
    }

    /// The quotient map `g -> g + D_k`, realized as the first `k` coordinates.
    pub fn project(&self, g: &GroupVector) -> GroupVector {
        assert_eq!(g.rank(), self.rank, "group vector rank mismatch");
        GroupVector::new(g.coords()[..self.k].to_vec())
    }

    /// The last `n - k` coordinates of `g`; the position of `g` inside `D_k`
    /// when `g` is a member.
    pub fn tail(&self, g: &GroupVector) -> GroupVector {
        assert_eq!(g.rank(), self.rank, "group vector rank mismatch");
        GroupVector::new(g.coords()[self.k..].to_vec())
    }

    /// Embed a rank `n - k` vector as `(0, ..., 0, d)`.
    pub fn embed_tail(&self, d: &GroupVector) -> GroupVector {
        assert_eq!(d.rank(), self.residual_rank(), "tail rank mismatch");
        let mut coords = vec![BigInt::zero(); self.k];
        coords.extend_from_slice(d.coords());
        GroupVector::new(coords)
    }

    /// Lift a rank `k` quotient element to `(h, 0, ..., 0)`.
    pub fn embed_head(&self, h: &GroupVector) -> GroupVector {
        assert_eq!(h.rank(), self.quotient_rank(), "head rank mismatch");
        let mut coords = h.coords().to_vec();
        coords.resize(self.rank, BigInt::zero());
        GroupVector::new(coords)
    }
}

/// The full chain `D_0 > D_1 > ... > D_n` of convex subgroups.
pub fn convex_subgroups(rank: usize) -> Vec<ConvexLevel> {
    (0..=rank)
        .map(|k| ConvexLevel::new(k, rank).expect("k <= rank"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gv(coords: &[i64]) -> GroupVector {
        GroupVector::from_i64(coords)
    }

    #[test]
    fn lex_compare_examples() {
        assert_eq!(gv(&[1, -5]).cmp_lex(&gv(&[0, 9])).unwrap(), Ordering::Greater);
        assert_eq!(gv(&[0, 0]).cmp_lex(&gv(&[0, 0])).unwrap(), Ordering::Equal);
        assert_eq!(gv(&[0, 3]).cmp_lex(&gv(&[0, 7])).unwrap(), Ordering::Less);
    }

    #[test]
    fn lex_compare_rank_mismatch() {
        assert_eq!(
            gv(&[1]).cmp_lex(&gv(&[0, 9])),
            Err(Error::RankMismatch(1, 2))
        );
    }

    #[test]
    fn arch_class_examples() {
        assert_eq!(gv(&[0, 3]).arch_class(), Some(1));
        assert_eq!(gv(&[2, 0]).arch_class(), Some(0));
        assert_eq!(gv(&[0, 0]).arch_class(), None);
    }

    #[test]
    fn convex_chain_lengths() {
        assert_eq!(convex_subgroups(1).len(), 2);
        assert_eq!(convex_subgroups(2).len(), 3);
        assert_eq!(convex_subgroups(3).len(), 4);
    }

    #[test]
    fn chain_is_strictly_nested() {
        let chain = convex_subgroups(2);
        // D_1 contains (0, b) but not (1, 0).
        assert!(chain[1].contains(&gv(&[0, -7])));
        assert!(!chain[1].contains(&gv(&[1, 0])));
        // D_2 is trivial.
        assert!(chain[2].contains(&gv(&[0, 0])));
        assert!(!chain[2].contains(&gv(&[0, 1])));
        // D_0 is everything.
        assert!(chain[0].contains(&gv(&[9, -3])));
    }

    #[test]
    fn quotient_project_examples() {
        let d1 = ConvexLevel::new(1, 2).unwrap();
        assert_eq!(d1.project(&gv(&[3, 7])), gv(&[3]));
        assert_eq!(d1.project(&gv(&[0, 7])), gv(&[0]));
        let d0 = ConvexLevel::new(0, 2).unwrap();
        assert_eq!(d0.project(&gv(&[5, 1])), gv(&[]));
    }

    #[test]
    fn arch_class_matches_convex_membership() {
        // arch_class(a) = j  iff  a in D_j \ D_{j+1}, for nonzero a.
        let chain = convex_subgroups(3);
        for coords in [[0, 2, -1], [4, 0, 0], [0, 0, 5]] {
            let a = gv(&coords);
            let j = a.arch_class().unwrap();
            assert!(chain[j].contains(&a));
            assert!(!chain[j + 1].contains(&a));
        }
    }

    #[test]
    fn exceeds_is_quotient_positivity() {
        let d1 = ConvexLevel::new(1, 2).unwrap();
        assert!(d1.exceeds(&gv(&[1, -100])));
        assert!(!d1.exceeds(&gv(&[0, 100])));
        assert!(!d1.exceeds(&gv(&[-1, 5])));
    }
}
