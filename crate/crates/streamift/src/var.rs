//! Tagged indeterminates and variable orders.
//!
//! Five kinds of variables appear across the pipeline: the distinguished
//! series variable `x`, the unknowns `y_i`, the initial-value indeterminates
//! `y0_i`, the primed indeterminates `y'_i`, and the inverse-denominator
//! variable `w`. The derived `Ord` gives the fixed canonical order
//! `x < y1 < .. < yn < y01 < .. < y0n < y'1 < .. < y'n < w`, which drives
//! monomial storage and printing.

use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum VarId {
    X,
    /// Unknown `y_i`, index 1-based.
    Y(u32),
    /// Initial-value indeterminate `y0_i`, index 1-based.
    Y0(u32),
    /// Primed indeterminate `y'_i`, index 1-based.
    YPrime(u32),
    W,
}

impl VarId {
    pub fn index(&self) -> Option<u32> {
        match self {
            VarId::Y(i) | VarId::Y0(i) | VarId::YPrime(i) => Some(*i),
            _ => None,
        }
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, VarId::Y(_))
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarId::X => write!(f, "x"),
            VarId::Y(i) => write!(f, "y{i}"),
            VarId::Y0(i) => write!(f, "y0{i}"),
            VarId::YPrime(i) => write!(f, "y{i}'"),
            VarId::W => write!(f, "w"),
        }
    }
}

/// A total order on the unknowns `y_1..y_n`, with `x` always least.
///
/// Differentiation splits each monomial on its least variable under this
/// order. The choice is semantically immaterial (solution streams do not
/// depend on it) but changes the derived polynomials syntactically.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VarOrder {
    /// `rank[i-1]` is the position of `y_i` in the order (0-based).
    rank: Vec<u32>,
}

impl VarOrder {
    /// Declaration order `y1 < y2 < .. < yn`.
    pub fn identity(n: usize) -> Self {
        VarOrder {
            rank: (0..n as u32).collect(),
        }
    }

    /// Order given as a permutation of the indices `1..=n`, least first.
    /// Returns `None` if `perm` is not a permutation of `1..=n`.
    pub fn from_permutation(perm: &[u32]) -> Option<Self> {
        let n = perm.len();
        let mut rank = vec![u32::MAX; n];
        for (pos, &i) in perm.iter().enumerate() {
            if i == 0 || i as usize > n || rank[i as usize - 1] != u32::MAX {
                return None;
            }
            rank[i as usize - 1] = pos as u32;
        }
        Some(VarOrder { rank })
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    /// Sort key for the variables admissible in a differentiation input:
    /// `x` first, then the unknowns by their rank.
    pub fn key(&self, v: VarId) -> (u8, u32) {
        match v {
            VarId::X => (0, 0),
            VarId::Y(i) => {
                let r = self
                    .rank
                    .get(i as usize - 1)
                    .copied()
                    .unwrap_or_else(|| panic!("unknown y{i} outside this order (n = {})", self.len()));
                (1, r)
            }
            other => panic!("variable {other} has no differentiation rank"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_is_fixed() {
        let mut vars = vec![
            VarId::W,
            VarId::YPrime(1),
            VarId::Y0(2),
            VarId::Y(3),
            VarId::X,
            VarId::Y(1),
        ];
        vars.sort();
        assert_eq!(
            vars,
            vec![
                VarId::X,
                VarId::Y(1),
                VarId::Y(3),
                VarId::Y0(2),
                VarId::YPrime(1),
                VarId::W,
            ]
        );
    }

    #[test]
    fn permutations() {
        let ord = VarOrder::from_permutation(&[2, 3, 1]).unwrap();
        assert!(ord.key(VarId::Y(2)) < ord.key(VarId::Y(3)));
        assert!(ord.key(VarId::Y(3)) < ord.key(VarId::Y(1)));
        assert!(ord.key(VarId::X) < ord.key(VarId::Y(2)));
        assert!(VarOrder::from_permutation(&[1, 1]).is_none());
        assert!(VarOrder::from_permutation(&[0, 1]).is_none());
        assert_eq!(VarOrder::identity(3), VarOrder::from_permutation(&[1, 2, 3]).unwrap());
    }
}
