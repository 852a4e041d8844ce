//! Integer vectors of `Z^d`: edge and cycle indices, Fourier keys.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A vector of the lattice `Z^d`.
///
/// Ordering is lexicographic by component, which gives every map keyed by
/// `IndexVector` a deterministic iteration order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexVector(pub Vec<i64>);

impl IndexVector {
    pub fn zero(dimension: usize) -> Self {
        IndexVector(vec![0; dimension])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        IndexVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn add_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    pub fn sub_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a -= b;
        }
    }

    pub fn negated(&self) -> Self {
        IndexVector(self.0.iter().map(|&c| -c).collect())
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .map(|&c| (c as f64) * (c as f64))
            .sum::<f64>()
            .sqrt()
    }

    /// Largest absolute component.
    pub fn inf_norm(&self) -> i64 {
        self.0.iter().map(|&c| c.abs()).max().unwrap_or(0)
    }

    /// Inner product `⟨m, k⟩` with a real vector.
    pub fn dot(&self, k: &[f64]) -> f64 {
        debug_assert_eq!(self.dim(), k.len());
        self.0.iter().zip(k).map(|(&m, &kj)| m as f64 * kj).sum()
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for IndexVector {
    fn from(v: Vec<i64>) -> Self {
        IndexVector(v)
    }
}

impl From<&[i64]> for IndexVector {
    fn from(v: &[i64]) -> Self {
        IndexVector(v.to_vec())
    }
}

impl fmt::Debug for IndexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for IndexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_lexicographic() {
        let a = IndexVector(vec![-1, 2]);
        let b = IndexVector(vec![0, -5]);
        let c = IndexVector(vec![0, 0]);
        assert!(a < b && b < c);
    }

    #[test]
    fn norms() {
        let m = IndexVector(vec![3, -4]);
        assert_eq!(m.norm(), 5.0);
        assert_eq!(m.inf_norm(), 4);
        assert!(m.negated().add(&m).is_zero());
    }
}
