//! Finite multisets of points in `C^n` with tolerance-controlled
//! deduplication and Hausdorff distances in the max norm.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Finite multiset of points in `C^n`. Representatives are pairwise more than
/// `dedup_tol` apart in the max norm; merging keeps the first-seen point and
/// accumulates multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPointSet {
    points: Vec<Vec<Complex64>>,
    multiplicities: Vec<usize>,
    dedup_tol: f64,
}

/// Max-norm distance between two points of `C^n`.
pub fn max_norm_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

impl SpectrumPointSet {
    /// Deduplicates `points` (each carrying multiplicity one) in order.
    pub fn from_points<I>(points: I, dedup_tol: f64) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<Complex64>>,
    {
        Self::from_weighted(points.into_iter().map(|p| (p, 1)), dedup_tol)
    }

    /// Deduplicates weighted points in order, summing multiplicities.
    pub fn from_weighted<I>(points: I, dedup_tol: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<Complex64>, usize)>,
    {
        if dedup_tol < 0.0 || !dedup_tol.is_finite() {
            return Err(Error::Domain(format!(
                "dedup tolerance must be finite and nonnegative, got {dedup_tol}"
            )));
        }
        let mut set = Self {
            points: Vec::new(),
            multiplicities: Vec::new(),
            dedup_tol,
        };
        for (p, w) in points {
            if let Some(first) = set.points.first() {
                if first.len() != p.len() {
                    return Err(Error::Dimension(format!(
                        "point dimension {} differs from {}",
                        p.len(),
                        first.len()
                    )));
                }
            }
            set.insert(p, w);
        }
        Ok(set)
    }

    pub fn empty(dedup_tol: f64) -> Self {
        Self {
            points: Vec::new(),
            multiplicities: Vec::new(),
            dedup_tol,
        }
    }

    fn insert(&mut self, p: Vec<Complex64>, w: usize) {
        for (i, q) in self.points.iter().enumerate() {
            if max_norm_distance(q, &p) <= self.dedup_tol {
                self.multiplicities[i] += w;
                return;
            }
        }
        self.points.push(p);
        self.multiplicities.push(w);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Ambient dimension, when the set is nonempty.
    pub fn ambient_dim(&self) -> Option<usize> {
        self.points.first().map(|p| p.len())
    }

    pub fn dedup_tol(&self) -> f64 {
        self.dedup_tol
    }

    pub fn points(&self) -> &[Vec<Complex64>] {
        &self.points
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[Complex64], usize)> {
        self.points
            .iter()
            .map(|p| p.as_slice())
            .zip(self.multiplicities.iter().copied())
    }

    pub fn total_multiplicity(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn contains(&self, p: &[Complex64], tol: f64) -> bool {
        self.points.iter().any(|q| max_norm_distance(q, p) <= tol)
    }

    /// Union with multiplicity merging; `self`'s points come first.
    pub fn union(&self, other: &Self) -> Result<Self> {
        Self::from_weighted(
            self.iter()
                .chain(other.iter())
                .map(|(p, w)| (p.to_vec(), w)),
            self.dedup_tol,
        )
    }

    /// `sup_{p in self} inf_{q in other} d(p, q)`; 0 when `self` is empty,
    /// infinite when only `other` is.
    pub fn directed_hausdorff(&self, other: &Self) -> f64 {
        self.points
            .iter()
            .map(|p| {
                other
                    .points
                    .iter()
                    .map(|q| max_norm_distance(p, q))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    pub fn hausdorff(&self, other: &Self) -> f64 {
        self.directed_hausdorff(other)
            .max(other.directed_hausdorff(self))
    }

    /// Every point of `self` lies within `tol` of a point of `other`.
    pub fn is_subset_of(&self, other: &Self, tol: f64) -> bool {
        self.directed_hausdorff(other) <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn merges_nearby_points() {
        let set = SpectrumPointSet::from_points(
            vec![
                vec![c(1.0, 0.0)],
                vec![c(1.0 + 1e-9, 0.0)],
                vec![c(2.0, 0.0)],
            ],
            1e-7,
        )
        .unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.multiplicities(), &[2, 1]);
        // first-seen representative kept
        assert_eq!(set.points()[0][0], c(1.0, 0.0));
    }

    #[test]
    fn hausdorff_of_shifted_sets() {
        let a = SpectrumPointSet::from_points(vec![vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]], 0.0)
            .unwrap();
        let b = SpectrumPointSet::from_points(vec![vec![c(0.0, 0.5)], vec![c(1.0, 0.0)]], 0.0)
            .unwrap();
        assert!((a.hausdorff(&b) - 0.5).abs() < 1e-15);
        assert!(a.is_subset_of(&b, 0.5));
        assert!(!a.is_subset_of(&b, 0.4));
    }

    #[test]
    fn rejects_mixed_dimensions() {
        let r = SpectrumPointSet::from_points(
            vec![vec![c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]],
            0.0,
        );
        assert!(r.is_err());
    }

    proptest! {
        /// Dedup keeps representatives pairwise separated and preserves the
        /// total multiplicity.
        #[test]
        fn dedup_invariants(values in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..40)) {
            let tol = 0.25;
            let pts: Vec<Vec<Complex64>> = values.iter().map(|&(re, im)| vec![c(re, im)]).collect();
            let count = pts.len();
            let set = SpectrumPointSet::from_points(pts, tol).unwrap();
            prop_assert_eq!(set.total_multiplicity(), count);
            for i in 0..set.len() {
                for j in 0..i {
                    prop_assert!(max_norm_distance(&set.points()[i], &set.points()[j]) > tol);
                }
            }
        }

        /// Union is a superset of both operands up to the dedup tolerance.
        #[test]
        fn union_contains_operands(
            a in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..12),
            b in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..12),
        ) {
            let tol = 1e-7;
            let sa = SpectrumPointSet::from_points(a.iter().map(|&(re, im)| vec![c(re, im)]), tol).unwrap();
            let sb = SpectrumPointSet::from_points(b.iter().map(|&(re, im)| vec![c(re, im)]), tol).unwrap();
            let u = sa.union(&sb).unwrap();
            prop_assert!(sa.is_subset_of(&u, tol));
            prop_assert!(sb.is_subset_of(&u, tol));
        }
    }
}
