//! Commutant and bicommutant bases via stacked Sylvester nullspaces, the
//! feasibility-based commutant spectra, and the Shilov spectrum with its
//! character-construction cross-check.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    candidate_points, orthonormal_nullspace, pinv_solve, unvec, vec_of, ComplexMatrix,
    CommutingTuple, SpectrumPointSet, ToleranceConfig,
};
use crate::rng::{stream_rng, Stream};
use crate::spectra::{MembershipVerdict, Witness};

/// Frobenius-orthonormal basis of `{B : B A_j = A_j B for all j}`.
#[derive(Debug, Clone)]
pub struct CommutantBasis {
    generators: Vec<ComplexMatrix>,
    dim: usize,
}

impl CommutantBasis {
    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Base-space dimension `d` (each generator is `d x d`).
    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Orthonormal basis of the joint nullspace of the Sylvester maps
/// `B -> B A_j - A_j B`, from the stacked `d^2 x d^2` linearizations.
pub fn commutant_basis(family: &[ComplexMatrix], cfg: &ToleranceConfig) -> Result<CommutantBasis> {
    let first = family
        .first()
        .ok_or_else(|| Error::Dimension("empty matrix family".to_string()))?;
    let d = first.dim();
    if let Some(bad) = family.iter().find(|m| m.dim() != d) {
        return Err(Error::Dimension(format!(
            "family must share one dimension: found {} and {}",
            d,
            bad.dim()
        )));
    }
    let d2 = d * d;
    let id = DMatrix::<Complex64>::identity(d, d);
    let mut stack = DMatrix::<Complex64>::zeros(family.len() * d2, d2);
    for (j, a) in family.iter().enumerate() {
        // vec(B A - A B) = (A^T (x) I - I (x) A) vec(B)
        let sylvester = a.raw().transpose().kronecker(&id) - id.kronecker(a.raw());
        stack.view_mut((j * d2, 0), (d2, d2)).copy_from(&sylvester);
    }
    let generators = orthonormal_nullspace(&stack, cfg.tau_rank)
        .into_iter()
        .map(|v| ComplexMatrix::new(unvec(&v, d)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CommutantBasis { generators, dim: d })
}

/// Commutant of the commutant.
pub fn bicommutant_basis(
    family: &[ComplexMatrix],
    cfg: &ToleranceConfig,
) -> Result<CommutantBasis> {
    let commutant = commutant_basis(family, cfg)?;
    commutant_basis(commutant.generators(), cfg)
}

/// Feasibility data for candidate scans: vectorized basis elements and their
/// products with the tuple members, so each candidate costs one assembly and
/// one least-squares solve.
struct FeasibilityData {
    /// `vec(G_b)` per generator.
    gen_vecs: Vec<DVector<Complex64>>,
    /// `vec(A_j G_b)` indexed `[j][b]`.
    prod_vecs: Vec<Vec<DVector<Complex64>>>,
    rhs: DVector<Complex64>,
}

impl FeasibilityData {
    fn new(tuple: &CommutingTuple, basis: &CommutantBasis) -> Self {
        let d = tuple.dim();
        let gen_vecs: Vec<DVector<Complex64>> =
            basis.generators().iter().map(|g| vec_of(g.raw())).collect();
        let prod_vecs: Vec<Vec<DVector<Complex64>>> = tuple
            .matrices()
            .iter()
            .map(|a| {
                basis
                    .generators()
                    .iter()
                    .map(|g| vec_of(&(a.raw() * g.raw())))
                    .collect()
            })
            .collect();
        let rhs = vec_of(&DMatrix::<Complex64>::identity(d, d));
        Self {
            gen_vecs,
            prod_vecs,
            rhs,
        }
    }

    /// Least-squares residual of `sum_j (lambda_j I - A_j) B_j = I` over the
    /// basis span, relative to `‖I‖_F`.
    fn solve(
        &self,
        lambda: &[Complex64],
        tau_rank: f64,
        d: usize,
    ) -> Result<(DVector<Complex64>, f64)> {
        let k = self.gen_vecs.len();
        let n = lambda.len();
        let d2 = d * d;
        let mut m = DMatrix::<Complex64>::zeros(d2, n * k);
        for (j, lj) in lambda.iter().enumerate() {
            for b in 0..k {
                let col = &self.gen_vecs[b] * *lj - &self.prod_vecs[j][b];
                m.view_mut((0, j * k + b), (d2, 1)).copy_from(&col);
            }
        }
        let (coeffs, residual) = pinv_solve(&m, &self.rhs, tau_rank)?;
        Ok((coeffs, residual / (d as f64).sqrt()))
    }
}

/// Commutant-spectrum membership: `lambda` is a member exactly when
/// `sum_j (lambda_j I - A_j) B_j = I` has no solution with `B_j` in the span
/// of `basis`, i.e. when the least-squares residual exceeds `tau_feas`.
///
/// With the bicommutant basis this decides bicommutant-spectrum membership.
pub fn commutant_spectrum_membership(
    tuple: &CommutingTuple,
    lambda: &[Complex64],
    basis: &CommutantBasis,
    cfg: &ToleranceConfig,
) -> Result<MembershipVerdict> {
    if basis.dim() != tuple.dim() {
        return Err(Error::Dimension(format!(
            "basis dimension {} does not match tuple dimension {}",
            basis.dim(),
            tuple.dim()
        )));
    }
    if lambda.len() != tuple.n() {
        return Err(Error::Dimension(format!(
            "point has {} coordinates, tuple has {}",
            lambda.len(),
            tuple.n()
        )));
    }
    let data = FeasibilityData::new(tuple, basis);
    let (coeffs, residual) = data.solve(lambda, cfg.tau_rank, tuple.dim())?;
    Ok(verdict_from_residual(residual, coeffs, cfg))
}

fn verdict_from_residual(
    residual: f64,
    coeffs: DVector<Complex64>,
    cfg: &ToleranceConfig,
) -> MembershipVerdict {
    MembershipVerdict {
        member: residual > cfg.tau_feas,
        witness_value: residual,
        threshold: cfg.tau_feas,
        witness: Some(Witness::Coefficients(coeffs.iter().cloned().collect())),
        marginal: residual > cfg.tau_feas && residual <= 10.0 * cfg.tau_feas,
    }
}

/// Scan outcome: the spectrum plus any candidates whose deciding residual
/// fell within a decade of the feasibility threshold. The classification
/// stays hard; the marginal list is an audit trail for reports.
#[derive(Debug, Clone)]
pub struct CommutantScan {
    pub spectrum: SpectrumPointSet,
    pub marginal: Vec<(Vec<Complex64>, f64)>,
}

fn scan_with_basis(
    tuple: &CommutingTuple,
    basis: &CommutantBasis,
    cfg: &ToleranceConfig,
) -> Result<CommutantScan> {
    use rayon::prelude::*;
    let data = FeasibilityData::new(tuple, basis);
    let candidates = candidate_points(tuple, cfg)?;
    // candidate order is preserved through the parallel map, so results are
    // independent of the thread count
    let residuals: Vec<f64> = candidates
        .points()
        .par_iter()
        .map(|p| {
            data.solve(p, cfg.tau_rank, tuple.dim())
                .map(|(_, residual)| residual)
        })
        .collect::<Result<Vec<_>>>()?;
    let members = candidates
        .points()
        .iter()
        .zip(&residuals)
        .filter(|&(_, residual)| *residual > cfg.tau_feas)
        .map(|(p, _)| p.to_vec());
    let spectrum = SpectrumPointSet::from_points(members, cfg.tau_dedup)?;
    let marginal = candidates
        .points()
        .iter()
        .zip(&residuals)
        .filter(|&(_, r)| *r > cfg.tau_feas && *r <= 10.0 * cfg.tau_feas)
        .map(|(p, &r)| (p.to_vec(), r))
        .collect();
    Ok(CommutantScan { spectrum, marginal })
}

/// Commutant spectrum over the candidate set.
pub fn commutant_spectrum(
    tuple: &CommutingTuple,
    cfg: &ToleranceConfig,
) -> Result<SpectrumPointSet> {
    Ok(commutant_scan(tuple, cfg)?.spectrum)
}

/// Commutant scan with the marginal-residual audit trail.
pub fn commutant_scan(tuple: &CommutingTuple, cfg: &ToleranceConfig) -> Result<CommutantScan> {
    let basis = commutant_basis(tuple.matrices(), cfg)?;
    scan_with_basis(tuple, &basis, cfg)
}

/// Bicommutant spectrum over the candidate set.
pub fn bicommutant_spectrum(
    tuple: &CommutingTuple,
    cfg: &ToleranceConfig,
) -> Result<SpectrumPointSet> {
    Ok(bicommutant_scan(tuple, cfg)?.spectrum)
}

/// Bicommutant scan with the marginal-residual audit trail.
pub fn bicommutant_scan(tuple: &CommutingTuple, cfg: &ToleranceConfig) -> Result<CommutantScan> {
    let basis = bicommutant_basis(tuple.matrices(), cfg)?;
    scan_with_basis(tuple, &basis, cfg)
}

/// Shilov spectrum together with the character-construction cross-check and
/// the Hausdorff gap between the two routes.
#[derive(Debug, Clone)]
pub struct ShilovComputation {
    /// The spectrum: bicommutant membership over the candidate set (for
    /// bounded tuples the Shilov spectrum equals the bicommutant spectrum).
    pub spectrum: SpectrumPointSet,
    /// Diagonal readings `(phi_i(A_1), ..., phi_i(A_n))` after a
    /// simultaneous triangularization of the bicommutant algebra.
    pub character_points: SpectrumPointSet,
    /// `hausdorff(spectrum, character_points)`; recorded, not asserted, so a
    /// genuine gap between the two routes shows up in reports.
    pub character_gap: f64,
}

/// Computes the Shilov spectrum both ways.
///
/// Exactly diagonal tuples take a closed-form path: the bicommutant algebra
/// is the algebra of class functions of the joint diagonal values, whose
/// characters are the coordinate evaluations, so both routes reduce to
/// deduplicating the diagonal n-tuples. This keeps large diagonal models
/// (d up to a few hundred) exact and cheap. Everything else goes through the
/// dense Sylvester-SVD bicommutant.
pub fn shilov_with_diagnostics(
    tuple: &CommutingTuple,
    cfg: &ToleranceConfig,
    seed: u64,
) -> Result<ShilovComputation> {
    if tuple.is_exactly_diagonal() {
        let d = tuple.dim();
        let points = (0..d).map(|i| {
            tuple
                .matrices()
                .iter()
                .map(|a| a.raw()[(i, i)])
                .collect::<Vec<Complex64>>()
        });
        let spectrum = SpectrumPointSet::from_points(points, cfg.tau_dedup)?;
        return Ok(ShilovComputation {
            character_points: spectrum.clone(),
            character_gap: 0.0,
            spectrum,
        });
    }

    let basis = bicommutant_basis(tuple.matrices(), cfg)?;
    let spectrum = scan_with_basis(tuple, &basis, cfg)?.spectrum;

    // Character construction: triangularize the bicommutant algebra (its
    // generators together with the tuple members, which it contains) and
    // read the tuple diagonals per position.
    let mut algebra: Vec<DMatrix<Complex64>> = basis
        .generators()
        .iter()
        .map(|g| g.raw().clone())
        .collect();
    for a in tuple.matrices() {
        algebra.push(a.raw().clone());
    }
    let rng = stream_rng(seed, Stream::ShilovCharacter, 0);
    let (_q, transformed) =
        crate::linalg::simultaneous_triangularization(&algebra, cfg.tau_comm, rng)?;
    let k = basis.len();
    let d = tuple.dim();
    let character_points = SpectrumPointSet::from_points(
        (0..d).map(|i| {
            (0..tuple.n())
                .map(|j| transformed[k + j][(i, i)])
                .collect::<Vec<Complex64>>()
        }),
        cfg.tau_dedup,
    )?;
    let character_gap = spectrum.hausdorff(&character_points);
    Ok(ShilovComputation {
        spectrum,
        character_points,
        character_gap,
    })
}

/// Shilov joint spectrum (see [`shilov_with_diagnostics`]).
pub fn shilov_spectrum(
    tuple: &CommutingTuple,
    cfg: &ToleranceConfig,
    seed: u64,
) -> Result<SpectrumPointSet> {
    Ok(shilov_with_diagnostics(tuple, cfg, seed)?.spectrum)
}
