//! Finitely atomic positive measures on `R_+^n`: exact convolution
//! arithmetic with tolerance-controlled atom merging, and the Poisson
//! truncation-order computation used by subordination.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on atom counts during convolution.
pub const ATOM_CAP: usize = 1_000_000;

/// Weighted atom on `R_+^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub location: Vec<f64>,
    pub weight: f64,
}

/// Finitely many positively weighted atoms on `R_+^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    dim: usize,
    atoms: Vec<Atom>,
}

impl DiscreteMeasure {
    /// Validates weights (strictly positive, finite) and locations
    /// (componentwise nonnegative, finite, shared dimension).
    pub fn new(atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let dim = atoms
            .first()
            .map(|(loc, _)| loc.len())
            .ok_or_else(|| Error::Dimension("empty measure needs an explicit dimension".into()))?;
        let mut out = Vec::with_capacity(atoms.len());
        for (location, weight) in atoms {
            if location.len() != dim {
                return Err(Error::Dimension(format!(
                    "atom dimension {} differs from {dim}",
                    location.len()
                )));
            }
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(Error::Validation(format!(
                    "atom weight must be strictly positive and finite, got {weight}"
                )));
            }
            if location.iter().any(|&x| x < 0.0 || !x.is_finite()) {
                return Err(Error::Validation(format!(
                    "atom location must lie in R_+^n, got {location:?}"
                )));
            }
            out.push(Atom { location, weight });
        }
        Ok(Self { dim, atoms: out })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            atoms: Vec::new(),
        }
    }

    /// Unit point mass at `location`.
    pub fn dirac(location: Vec<f64>) -> Self {
        let dim = location.len();
        Self {
            dim,
            atoms: vec![Atom {
                location,
                weight: 1.0,
            }],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// True when some atom sits at the origin (within `tol` in max norm).
    pub fn has_atom_near_zero(&self, tol: f64) -> bool {
        self.atoms
            .iter()
            .any(|a| a.location.iter().all(|&x| x.abs() <= tol))
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::Domain(format!(
                "scaling factor must be positive and finite, got {factor}"
            )));
        }
        Ok(Self {
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    location: a.location.clone(),
                    weight: a.weight * factor,
                })
                .collect(),
        })
    }

    pub fn shifted(&self, offset: &[f64]) -> Result<Self> {
        if offset.len() != self.dim {
            return Err(Error::Dimension(format!(
                "offset dimension {} differs from {}",
                offset.len(),
                self.dim
            )));
        }
        Ok(Self {
            dim: self.dim,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    location: a
                        .location
                        .iter()
                        .zip(offset)
                        .map(|(x, o)| x + o)
                        .collect(),
                    weight: a.weight,
                })
                .collect(),
        })
    }

    /// Merges atoms within `tol` (max norm), keeping the lexicographically
    /// first location as representative and summing weights.
    pub fn merged(&self, tol: f64) -> Self {
        let mut sorted = self.atoms.clone();
        sorted.sort_by(|a, b| {
            a.location
                .iter()
                .zip(&b.location)
                .find_map(|(x, y)| {
                    let o = x.total_cmp(y);
                    (o != std::cmp::Ordering::Equal).then_some(o)
                })
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut kept: Vec<Atom> = Vec::with_capacity(sorted.len());
        'outer: for atom in sorted {
            // only representatives with first coordinate within tol can merge
            for rep in kept.iter_mut().rev() {
                if atom.location[0] - rep.location[0] > tol {
                    break;
                }
                let close = rep
                    .location
                    .iter()
                    .zip(&atom.location)
                    .all(|(x, y)| (x - y).abs() <= tol);
                if close {
                    rep.weight += atom.weight;
                    continue 'outer;
                }
            }
            kept.push(atom);
        }
        Self {
            dim: self.dim,
            atoms: kept,
        }
    }

    /// Convolution: all pairwise location sums with weight products, merged
    /// at `tol`. Errors when the atom count would exceed [`ATOM_CAP`].
    pub fn convolve(&self, other: &Self, tol: f64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!(
                "convolution of measures on R^{} and R^{}",
                self.dim, other.dim
            )));
        }
        if self.len().saturating_mul(other.len()) > ATOM_CAP {
            return Err(Error::NonConvergence(format!(
                "convolution would produce {} atoms (cap {ATOM_CAP})",
                self.len() * other.len()
            )));
        }
        let mut atoms = Vec::with_capacity(self.len() * other.len());
        for a in &self.atoms {
            for b in &other.atoms {
                atoms.push(Atom {
                    location: a
                        .location
                        .iter()
                        .zip(&b.location)
                        .map(|(x, y)| x + y)
                        .collect(),
                    weight: a.weight * b.weight,
                });
            }
        }
        let merged = Self {
            dim: self.dim,
            atoms,
        }
        .merged(tol);
        if merged.len() > ATOM_CAP {
            return Err(Error::NonConvergence(format!(
                "convolution produced {} atoms (cap {ATOM_CAP})",
                merged.len()
            )));
        }
        Ok(merged)
    }

    /// `sum_k w_k e^{s . u_k}`, the Laplace transform evaluated at `-s`.
    pub fn exp_integral(&self, s: &[Complex64]) -> Result<Complex64> {
        if s.len() != self.dim {
            return Err(Error::Dimension(format!(
                "argument dimension {} differs from {}",
                s.len(),
                self.dim
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for a in &self.atoms {
            let dot: Complex64 = s
                .iter()
                .zip(&a.location)
                .map(|(z, &u)| z * u)
                .sum();
            acc += dot.exp() * a.weight;
        }
        Ok(acc)
    }
}

/// Minimal truncation order `M` with Poisson tail
/// `sum_{m > M} e^{-rate} rate^m / m! < eta`.
///
/// The tail is accumulated from the smallest terms upward, so the result
/// matches direct summation.
pub fn poisson_truncation_order(rate: f64, eta: f64) -> Result<usize> {
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(Error::Domain(format!(
            "Poisson rate must be nonnegative and finite, got {rate}"
        )));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::Domain(format!(
            "tail tolerance must be strictly positive, got {eta}"
        )));
    }
    if rate == 0.0 {
        return Ok(0);
    }
    let m_max = (rate + 20.0 * rate.sqrt() + 80.0).ceil() as usize;
    // terms e^{-rate} rate^m / m!
    let mut terms = Vec::with_capacity(m_max + 1);
    let mut term = (-rate).exp();
    terms.push(term);
    for m in 1..=m_max {
        term *= rate / m as f64;
        terms.push(term);
    }
    // tails[m] = sum_{k > m} terms[k], summed small-to-large
    let mut tails = vec![0.0f64; m_max + 1];
    let mut acc = 0.0;
    for m in (0..m_max).rev() {
        acc += terms[m + 1];
        tails[m] = acc;
    }
    for (m, &tail) in tails.iter().enumerate() {
        if tail < eta {
            return Ok(m);
        }
    }
    Err(Error::NonConvergence(format!(
        "Poisson tail stayed above {eta:.3e} up to order {m_max}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_weight() {
        assert!(DiscreteMeasure::new(vec![(vec![1.0], -1.0)]).is_err());
    }

    #[test]
    fn rejects_negative_location() {
        assert!(DiscreteMeasure::new(vec![(vec![-0.5], 1.0)]).is_err());
    }

    #[test]
    fn merge_keeps_lexicographically_first_and_total_mass() {
        let m = DiscreteMeasure::new(vec![
            (vec![1.0 + 5e-8, 0.0], 2.0),
            (vec![1.0, 0.0], 1.0),
            (vec![3.0, 1.0], 0.5),
        ])
        .unwrap();
        let merged = m.merged(1e-7);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged.atoms()[0].location, vec![1.0, 0.0]);
        assert!((merged.atoms()[0].weight - 3.0).abs() < 1e-15);
        assert!((merged.total_mass() - m.total_mass()).abs() < 1e-15);
    }

    #[test]
    fn convolution_of_diracs_adds_locations() {
        let a = DiscreteMeasure::dirac(vec![1.0, 2.0]);
        let b = DiscreteMeasure::dirac(vec![0.5, 0.25]);
        let ab = a.convolve(&b, 1e-7).unwrap();
        assert_eq!(ab.len(), 1);
        assert_eq!(ab.atoms()[0].location, vec![1.5, 2.25]);
        assert!((ab.atoms()[0].weight - 1.0).abs() < 1e-15);
    }

    #[test]
    fn poisson_order_for_unit_rate() {
        // brute-force oracle pins M = 14 at eta = 1e-12
        assert_eq!(poisson_truncation_order(1.0, 1e-12).unwrap(), 14);
        assert_eq!(poisson_truncation_order(0.0, 1e-12).unwrap(), 0);
    }

    #[test]
    fn poisson_order_is_minimal() {
        let rate = 2.5;
        let eta = 1e-10;
        let m = poisson_truncation_order(rate, eta).unwrap();
        let tail = |order: usize| -> f64 {
            let mut term = (-rate).exp();
            let mut acc = 0.0;
            for k in 1..=(order + 200) {
                term *= rate / k as f64;
                if k > order {
                    acc += term;
                }
            }
            acc
        };
        assert!(tail(m) < eta);
        assert!(m == 0 || tail(m - 1) >= eta);
    }

    #[test]
    fn convolution_mass_is_product_of_masses() {
        let a = DiscreteMeasure::new(vec![(vec![0.3], 0.7), (vec![1.1], 1.3)]).unwrap();
        let b = DiscreteMeasure::new(vec![(vec![0.9], 0.4), (vec![0.2], 2.0)]).unwrap();
        let ab = a.convolve(&b, 1e-7).unwrap();
        assert!((ab.total_mass() - a.total_mass() * b.total_mass()).abs() < 1e-12);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn atoms() -> impl Strategy<Value = Vec<(Vec<f64>, f64)>> {
            prop::collection::vec(
                ((0.0f64..4.0, 0.0f64..4.0), 0.01f64..2.0)
                    .prop_map(|((x, y), w)| (vec![x, y], w)),
                1..12,
            )
        }

        proptest! {
            #[test]
            fn convolution_preserves_product_mass(a in atoms(), b in atoms()) {
                let ma = DiscreteMeasure::new(a).unwrap();
                let mb = DiscreteMeasure::new(b).unwrap();
                let ab = ma.convolve(&mb, 1e-7).unwrap();
                let expected = ma.total_mass() * mb.total_mass();
                prop_assert!((ab.total_mass() - expected).abs() <= 1e-9 * expected.max(1.0));
            }

            #[test]
            fn merge_preserves_mass_and_separates_atoms(a in atoms()) {
                let m = DiscreteMeasure::new(a).unwrap();
                let tol = 0.5;
                let merged = m.merged(tol);
                prop_assert!((merged.total_mass() - m.total_mass()).abs() <= 1e-9);
                // representative locations are pairwise separated in max norm
                for (i, x) in merged.atoms().iter().enumerate() {
                    for y in merged.atoms().iter().skip(i + 1) {
                        let dist = x
                            .location
                            .iter()
                            .zip(&y.location)
                            .map(|(p, q)| (p - q).abs())
                            .fold(0.0f64, f64::max);
                        prop_assert!(dist > tol);
                    }
                }
            }
        }
    }
}
