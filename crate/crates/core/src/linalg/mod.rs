//! Complex dense-matrix substrate: commuting tuples, semigroup evaluation,
//! the joint-eigenvalue oracle, and tolerance-controlled rank decisions.

mod matrix;
mod pointset;

pub use matrix::{
    eigenvalues, expm, numerical_rank_raw, orthonormal_nullspace, pinv_solve, smallest_singular,
    sort_complex, unvec, vec_of, ComplexMatrix,
};
pub use pointset::{max_norm_distance, SpectrumPointSet};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Tolerances steering every rank, dedup and feasibility decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Relative commutation tolerance.
    pub tau_comm: f64,
    /// Relative singular-value cutoff.
    pub tau_rank: f64,
    /// Absolute dedup distance for spectrum points.
    pub tau_dedup: f64,
    /// Feasibility residual bound for commutant solves.
    pub tau_feas: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            tau_comm: 1e-10,
            tau_rank: 1e-10,
            tau_dedup: 1e-7,
            tau_feas: 1e-7,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tau_comm", self.tau_comm),
            ("tau_rank", self.tau_rank),
            ("tau_dedup", self.tau_dedup),
            ("tau_feas", self.tau_feas),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!(
                    "{name} must be strictly positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Tuple of pairwise commuting square complex matrices sharing one dimension.
#[derive(Debug, Clone)]
pub struct CommutingTuple {
    matrices: Vec<ComplexMatrix>,
}

/// Largest pairwise commutator norm `max_{j<k} ‖A_j A_k − A_k A_j‖_F`.
///
/// Zero exactly when the family commutes. Errors when the family is empty or
/// the dimensions differ.
pub fn commutation_residual(matrices: &[ComplexMatrix]) -> Result<f64> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::Dimension("empty matrix family".to_string()))?;
    let d = first.dim();
    if let Some(bad) = matrices.iter().find(|m| m.dim() != d) {
        return Err(Error::Dimension(format!(
            "matrices must share one dimension: found {} and {}",
            d,
            bad.dim()
        )));
    }
    let mut worst = 0.0f64;
    for j in 0..matrices.len() {
        for k in (j + 1)..matrices.len() {
            let a = matrices[j].raw();
            let b = matrices[k].raw();
            worst = worst.max((a * b - b * a).norm());
        }
    }
    Ok(worst)
}

impl CommutingTuple {
    /// Validates shared dimensions and the relative commutation bound
    /// `residual <= tau_comm * max_j ‖A_j‖_F^2`.
    pub fn new(matrices: Vec<ComplexMatrix>, cfg: &ToleranceConfig) -> Result<Self> {
        let residual = commutation_residual(&matrices)?;
        let scale = matrices
            .iter()
            .map(|m| m.frobenius_norm())
            .fold(0.0f64, f64::max);
        if residual > cfg.tau_comm * scale * scale {
            return Err(Error::Validation(format!(
                "commutation residual exceeded: {residual:.3e} > {:.3e}",
                cfg.tau_comm * scale * scale
            )));
        }
        Ok(Self { matrices })
    }

    pub fn n(&self) -> usize {
        self.matrices.len()
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn matrix(&self, j: usize) -> &ComplexMatrix {
        &self.matrices[j]
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    pub fn commutation_residual(&self) -> f64 {
        commutation_residual(&self.matrices).expect("validated at construction")
    }

    /// `max_j ‖A_j‖_F`, floored at 1 so thresholds stay meaningful for tiny
    /// tuples.
    pub fn threshold_scale(&self) -> f64 {
        self.matrices
            .iter()
            .map(|m| m.frobenius_norm())
            .fold(1.0f64, f64::max)
    }

    /// Entrywise-conjugate-transpose tuple; commutes whenever `self` does.
    pub fn adjoint(&self) -> Self {
        Self {
            matrices: self.matrices.iter().map(|m| m.adjoint()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            matrices: self.matrices.iter().map(|m| m.transpose()).collect(),
        }
    }

    /// True when every member is exactly diagonal.
    pub fn is_exactly_diagonal(&self) -> bool {
        self.matrices.iter().all(|m| m.is_exactly_diagonal())
    }

    /// Largest Hermitian deviation over the members.
    pub fn hermitian_deviation(&self) -> f64 {
        self.matrices
            .iter()
            .map(|m| m.hermitian_deviation())
            .fold(0.0, f64::max)
    }

    /// Similarity transform `P^{-1} A_j P` applied memberwise.
    pub fn conjugate_by(&self, p: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<Self> {
        if p.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "conjugator dimension {} does not match tuple dimension {}",
                p.dim(),
                self.dim()
            )));
        }
        let p_inv = p
            .raw()
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Validation("conjugator is singular".to_string()))?;
        let mats = self
            .matrices
            .iter()
            .map(|m| ComplexMatrix::new(&p_inv * m.raw() * p.raw()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(mats, cfg)
    }
}

/// Unitary `Q` simultaneously triangularizing the family, found by Schur
/// decomposition of random real combinations with up to five redraws.
///
/// Returns `Q` and the transformed (upper-triangular) family.
pub(crate) fn simultaneous_triangularization(
    matrices: &[DMatrix<Complex64>],
    tau_comm: f64,
    mut rng: impl Rng,
) -> Result<(DMatrix<Complex64>, Vec<DMatrix<Complex64>>)> {
    let d = matrices[0].nrows();
    let scale = matrices
        .iter()
        .map(|m| m.norm())
        .fold(1.0f64, f64::max);
    let mut last_residual = f64::INFINITY;
    for _attempt in 0..5 {
        let mut combo = DMatrix::<Complex64>::zeros(d, d);
        for m in matrices {
            let r: f64 = rng.random_range(-1.0..1.0);
            combo += m * Complex64::new(r, 0.0);
        }
        let (q, _t) = combo.schur().unpack();
        let transformed: Vec<DMatrix<Complex64>> =
            matrices.iter().map(|m| q.adjoint() * m * &q).collect();
        let residual = transformed
            .iter()
            .map(|t| {
                let mut r = 0.0f64;
                for i in 0..d {
                    for j in 0..i {
                        r = r.max(t[(i, j)].norm());
                    }
                }
                r
            })
            .fold(0.0, f64::max);
        if residual <= tau_comm * scale {
            return Ok((q, transformed));
        }
        last_residual = last_residual.min(residual);
    }
    Err(Error::NonConvergence(format!(
        "simultaneous triangularization failed after 5 draws (best residual {last_residual:.3e})"
    )))
}

/// Joint eigenvalues of the tuple: the diagonal n-tuples of a simultaneous
/// unitary triangularization, deduplicated with multiplicities.
///
/// This is the finite-dimensional oracle against which the spectrum
/// computations are cross-validated.
pub fn joint_eigenvalues(
    tuple: &CommutingTuple,
    cfg: &ToleranceConfig,
    seed: u64,
) -> Result<SpectrumPointSet> {
    let raw: Vec<DMatrix<Complex64>> =
        tuple.matrices().iter().map(|m| m.raw().clone()).collect();
    let rng = stream_rng(seed, Stream::Triangularize, 0);
    let (_q, transformed) = simultaneous_triangularization(&raw, cfg.tau_comm, rng)?;
    let d = tuple.dim();
    let points = (0..d).map(|i| {
        transformed
            .iter()
            .map(|t| t[(i, i)])
            .collect::<Vec<Complex64>>()
    });
    SpectrumPointSet::from_points(points, cfg.tau_dedup)
}

/// Counts singular values above `tau_rank * sigma_max`.
pub fn numerical_rank(m: &ComplexMatrix, cfg: &ToleranceConfig) -> usize {
    numerical_rank_raw(m.raw(), cfg.tau_rank)
}

/// Semigroup value `T(u) = exp(u_1 A_1) ... exp(u_n A_n)` for `u >= 0`.
pub fn semigroup_value(tuple: &CommutingTuple, u: &[f64]) -> Result<ComplexMatrix> {
    if u.len() != tuple.n() {
        return Err(Error::Dimension(format!(
            "parameter has {} components, tuple has {}",
            u.len(),
            tuple.n()
        )));
    }
    if let Some(bad) = u.iter().find(|&&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::Domain(format!(
            "semigroup parameter must be componentwise nonnegative, got {bad}"
        )));
    }
    let d = tuple.dim();
    let mut value = DMatrix::<Complex64>::identity(d, d);
    for (uj, a) in u.iter().zip(tuple.matrices()) {
        value *= expm(&(a.raw() * Complex64::new(*uj, 0.0)));
    }
    ComplexMatrix::new(value)
}

/// Cartesian product of the per-matrix eigenvalue lists, deduplicated.
///
/// Contains every joint spectrum of the tuple, so spectrum computations may
/// scan only this finite set.
pub fn candidate_points(tuple: &CommutingTuple, cfg: &ToleranceConfig) -> Result<SpectrumPointSet> {
    let mut per_matrix: Vec<Vec<Complex64>> = Vec::with_capacity(tuple.n());
    for m in tuple.matrices() {
        let evs = if m.is_exactly_diagonal() {
            let mut evs: Vec<Complex64> = (0..m.dim()).map(|i| m.raw()[(i, i)]).collect();
            sort_complex(&mut evs);
            evs
        } else {
            eigenvalues(m.raw())?
        };
        // per-axis dedup keeps the product small
        let deduped = SpectrumPointSet::from_points(evs.into_iter().map(|z| vec![z]), cfg.tau_dedup)?;
        per_matrix.push(deduped.points().iter().map(|p| p[0]).collect());
    }
    let mut product: Vec<Vec<Complex64>> = vec![Vec::new()];
    for axis in &per_matrix {
        let mut next = Vec::with_capacity(product.len() * axis.len());
        for stem in &product {
            for &z in axis {
                let mut p = stem.clone();
                p.push(z);
                next.push(p);
            }
        }
        product = next;
    }
    SpectrumPointSet::from_points(product, cfg.tau_dedup)
}
