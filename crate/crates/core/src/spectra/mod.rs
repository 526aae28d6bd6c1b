//! Point, approximate, residual and joint spectra of a commuting tuple, the
//! commutant and bicommutant spectra, the Shilov spectrum with its character
//! cross-check, the Hermitian witness operator, and the essential-range
//! diagonal model.

mod commutant;
mod diagonal;

pub use commutant::{
    bicommutant_basis, bicommutant_scan, bicommutant_spectrum, commutant_basis, commutant_scan,
    commutant_spectrum, commutant_spectrum_membership, shilov_spectrum, shilov_with_diagnostics,
    CommutantBasis, CommutantScan, ShilovComputation,
};
pub use diagonal::{essential_range, DiagonalModel};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    candidate_points, eigenvalues, smallest_singular, ComplexMatrix, CommutingTuple,
    SpectrumPointSet, ToleranceConfig,
};

/// Outcome of a single membership query.
///
/// `witness_value` is the scalar that decided the verdict and `threshold` the
/// cutoff it was compared against. For the approximate/point/Taylor spectra
/// membership holds when the value is at most the threshold; for the
/// commutant and bicommutant spectra the residual of the feasibility solve
/// decides, and membership holds when it exceeds the threshold.
#[derive(Debug, Clone)]
pub struct MembershipVerdict {
    pub member: bool,
    pub witness_value: f64,
    pub threshold: f64,
    pub witness: Option<Witness>,
    /// Set when the deciding value lies within a decade of the threshold.
    pub marginal: bool,
}

/// Certificate attached to a verdict.
#[derive(Debug, Clone)]
pub enum Witness {
    /// Unit vector in `C^d` (approximating eigenvector).
    UnitVector(Vec<Complex64>),
    /// Coefficients over a commutant basis.
    Coefficients(Vec<Complex64>),
}

/// Vertical stack of `lambda_j I - A_j`.
pub(crate) fn shifted_stack(tuple: &CommutingTuple, lambda: &[Complex64]) -> DMatrix<Complex64> {
    let d = tuple.dim();
    let n = tuple.n();
    let mut stack = DMatrix::<Complex64>::zeros(n * d, d);
    for (j, a) in tuple.matrices().iter().enumerate() {
        let mut block = -a.raw().clone();
        for i in 0..d {
            block[(i, i)] += lambda[j];
        }
        stack.view_mut((j * d, 0), (d, d)).copy_from(&block);
    }
    stack
}

pub(crate) fn membership_threshold(tuple: &CommutingTuple, cfg: &ToleranceConfig) -> f64 {
    tuple.n() as f64 * cfg.tau_rank * tuple.threshold_scale()
}

/// Approximate-spectrum membership, decided by the smallest singular value
/// of the stacked `lambda_j I - A_j`. In finite dimension the approximate
/// spectrum equals the point spectrum, so the witness is an eigenvector
/// whenever membership holds.
pub fn approximate_membership(
    tuple: &CommutingTuple,
    lambda: &[Complex64],
    cfg: &ToleranceConfig,
) -> Result<MembershipVerdict> {
    if lambda.len() != tuple.n() {
        return Err(Error::Dimension(format!(
            "point has {} coordinates, tuple has {}",
            lambda.len(),
            tuple.n()
        )));
    }
    let stack = shifted_stack(tuple, lambda);
    let (sigma_min, vector) = smallest_singular(&stack)?;
    let threshold = membership_threshold(tuple, cfg);
    let member = sigma_min <= threshold;
    Ok(MembershipVerdict {
        member,
        witness_value: sigma_min,
        threshold,
        witness: Some(Witness::UnitVector(vector.iter().cloned().collect())),
        marginal: sigma_min > threshold && sigma_min <= 10.0 * threshold,
    })
}

fn scan_candidates<F>(
    tuple: &CommutingTuple,
    cfg: &ToleranceConfig,
    mut is_member: F,
) -> Result<SpectrumPointSet>
where
    F: FnMut(&[Complex64]) -> Result<bool>,
{
    let candidates = candidate_points(tuple, cfg)?;
    let mut members = Vec::new();
    for (p, _) in candidates.iter() {
        if is_member(p)? {
            members.push(p.to_vec());
        }
    }
    SpectrumPointSet::from_points(members, cfg.tau_dedup)
}

/// Joint approximate spectrum as a point set (scan of the candidate set).
pub fn approximate_spectrum(
    tuple: &CommutingTuple,
    cfg: &ToleranceConfig,
) -> Result<SpectrumPointSet> {
    scan_candidates(tuple, cfg, |p| {
        Ok(approximate_membership(tuple, p, cfg)?.member)
    })
}

/// Joint point spectrum: points with a common eigenvector. Coincides with
/// the approximate spectrum in finite dimension and is computed by the same
/// stacked smallest-singular-value test.
pub fn point_spectrum(tuple: &CommutingTuple, cfg: &ToleranceConfig) -> Result<SpectrumPointSet> {
    approximate_spectrum(tuple, cfg)
}

/// Joint residual spectrum: `lambda` such that some nonzero `y` annihilates
/// every `(lambda_j I - A_j) x`, i.e. `conj(lambda)` is a joint eigenvalue
/// of the adjoint tuple.
pub fn residual_spectrum(
    tuple: &CommutingTuple,
    cfg: &ToleranceConfig,
) -> Result<SpectrumPointSet> {
    let adjoint = tuple.adjoint();
    scan_candidates(tuple, cfg, |p| {
        let conj: Vec<Complex64> = p.iter().map(|z| z.conj()).collect();
        Ok(approximate_membership(&adjoint, &conj, cfg)?.member)
    })
}

/// `sigma_J = sigma_a` union `sigma_R`.
pub fn joint_spectrum_j(
    tuple: &CommutingTuple,
    cfg: &ToleranceConfig,
) -> Result<SpectrumPointSet> {
    approximate_spectrum(tuple, cfg)?.union(&residual_spectrum(tuple, cfg)?)
}

/// Witness operator `S = sum_j (lambda_j I - A_j)^2` for a Hermitian tuple
/// and real `lambda`, plus the verdict whether `0` lies in its spectrum
/// (equivalently whether `lambda` belongs to the approximate spectrum).
pub fn hermitian_witness(
    tuple: &CommutingTuple,
    lambda: &[f64],
    cfg: &ToleranceConfig,
) -> Result<(ComplexMatrix, bool)> {
    if lambda.len() != tuple.n() {
        return Err(Error::Dimension(format!(
            "point has {} coordinates, tuple has {}",
            lambda.len(),
            tuple.n()
        )));
    }
    if tuple.hermitian_deviation() > 1e-10 {
        return Err(Error::Validation(format!(
            "hermitian_witness requires Hermitian matrices (deviation {:.3e})",
            tuple.hermitian_deviation()
        )));
    }
    if lambda.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("lambda must be finite and real".into()));
    }
    let d = tuple.dim();
    let mut s = DMatrix::<Complex64>::zeros(d, d);
    for (lj, a) in lambda.iter().zip(tuple.matrices()) {
        let mut shifted = -a.raw().clone();
        for i in 0..d {
            shifted[(i, i)] += Complex64::new(*lj, 0.0);
        }
        s += &shifted * &shifted;
    }
    let witness = ComplexMatrix::new(s)?;
    let min_eig = eigenvalues(witness.raw())?
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min);
    let zero_in_spectrum = min_eig <= cfg.tau_rank * witness.frobenius_norm();
    Ok((witness, zero_in_spectrum))
}
