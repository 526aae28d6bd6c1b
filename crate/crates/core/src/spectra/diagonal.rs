//! Discrete diagonal models: multiplier functions on a weighted finite index
//! set, their joint essential range, and the induced diagonal tuple.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, CommutingTuple, SpectrumPointSet, ToleranceConfig};

/// Finite model of an n-tuple of real multiplication operators: `n` functions
/// given as `N`-vectors over a strictly positively weighted index set.
#[derive(Debug, Clone)]
pub struct DiagonalModel {
    /// `values[j][k]` is `a_j(k)`, for `j < n`, `k < N`.
    values: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl DiagonalModel {
    pub fn new(values: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let first = values
            .first()
            .ok_or_else(|| Error::Dimension("model needs at least one function".into()))?;
        let count = first.len();
        if count == 0 {
            return Err(Error::Dimension("model needs at least one index".into()));
        }
        if values.iter().any(|v| v.len() != count) {
            return Err(Error::Dimension(
                "all functions must share the index count".into(),
            ));
        }
        if weights.len() != count {
            return Err(Error::Dimension(format!(
                "{} weights for {count} indices",
                weights.len()
            )));
        }
        if values.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Validation("function values must be finite".into()));
        }
        if weights.iter().any(|&w| w <= 0.0 || !w.is_finite()) {
            return Err(Error::Validation(
                "weights must be strictly positive and finite".into(),
            ));
        }
        Ok(Self { values, weights })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn index_count(&self) -> usize {
        self.weights.len()
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Diagonal tuple `A_j = diag(a_j(k))` realizing the model.
    pub fn to_tuple(&self, cfg: &ToleranceConfig) -> Result<CommutingTuple> {
        let mats = self
            .values
            .iter()
            .map(|v| {
                ComplexMatrix::diagonal(
                    &v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        CommutingTuple::new(mats, cfg)
    }
}

/// Joint essential range of the model: for a finite index set with strictly
/// positive weights this is exactly the set of attained value tuples
/// `(a_1(k), ..., a_n(k))`, deduplicated at `dedup_tol`.
pub fn essential_range(model: &DiagonalModel, dedup_tol: f64) -> Result<SpectrumPointSet> {
    let points = (0..model.index_count()).map(|k| {
        model
            .values
            .iter()
            .map(|v| Complex64::new(v[k], 0.0))
            .collect::<Vec<Complex64>>()
    });
    SpectrumPointSet::from_points(points, dedup_tol)
}
