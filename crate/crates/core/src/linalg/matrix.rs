//! Validated dense complex matrices and the small numeric kernel
//! (eigenvalues, numerical rank, least squares) shared by all modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Square complex matrix with finite entries and dimension at least one.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Wraps a square matrix, rejecting empty or non-finite data.
    pub fn new(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.nrows() != inner.ncols() {
            return Err(Error::Dimension(format!(
                "expected a nonempty square matrix, got {}x{}",
                inner.nrows(),
                inner.ncols()
            )));
        }
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation(
                "matrix entries must be finite".to_string(),
            ));
        }
        Ok(Self { inner })
    }

    /// Builds from a row-major slice of length `dim * dim`.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "row-major data of length {} does not fill a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn diagonal(values: &[Complex64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Dimension("empty diagonal".to_string()));
        }
        let d = values.len();
        let mut m = DMatrix::zeros(d, d);
        for (k, v) in values.iter().enumerate() {
            m[(k, k)] = *v;
        }
        Self::new(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn raw(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn into_raw(self) -> DMatrix<Complex64> {
        self.inner
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.norm()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            inner: self.inner.transpose(),
        }
    }

    /// Relative Hermitian deviation `‖A − Aᴴ‖_F / max(1, ‖A‖_F)`.
    pub fn hermitian_deviation(&self) -> f64 {
        (&self.inner - self.inner.adjoint()).norm() / self.frobenius_norm().max(1.0)
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_exactly_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| {
            (0..d).all(|j| i == j || self.inner[(i, j)] == Complex64::new(0.0, 0.0))
        })
    }
}

/// Eigenvalues via the complex Schur form, sorted by (re, im) so repeated
/// computations agree bitwise.
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let schur = m.clone().schur();
    let ev = schur.eigenvalues().ok_or_else(|| {
        Error::NonConvergence("Schur iteration failed to produce eigenvalues".to_string())
    })?;
    let mut out: Vec<Complex64> = ev.iter().cloned().collect();
    sort_complex(&mut out);
    Ok(out)
}

pub fn sort_complex(values: &mut [Complex64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Number of singular values exceeding `tau_rank * sigma_max`; zero matrices
/// have rank zero.
pub fn numerical_rank_raw(m: &DMatrix<Complex64>, tau_rank: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let sigma_max = sv.iter().cloned().fold(0.0f64, f64::max);
    if sigma_max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tau_rank * sigma_max).count()
}

/// Smallest singular value together with a right singular vector attaining it.
///
/// Requires `nrows >= ncols`: a wide matrix has null directions the thin SVD
/// does not enumerate.
pub fn smallest_singular(m: &DMatrix<Complex64>) -> Result<(f64, DVector<Complex64>)> {
    if m.ncols() > m.nrows() {
        return Err(Error::Dimension(format!(
            "smallest_singular expects a tall matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd
        .v_t
        .as_ref()
        .ok_or_else(|| Error::NonConvergence("SVD did not return singular vectors".to_string()))?;
    let (mut idx, mut min) = (0usize, f64::INFINITY);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s < min {
            min = s;
            idx = i;
        }
    }
    // Rows of v_t are the conjugated right singular vectors.
    let v = v_t.row(idx).transpose().map(|z| z.conj());
    Ok((min, v))
}

/// Least-squares solve of `M c = b` over the column span of `M`, by pivoted
/// modified Gram–Schmidt with reorthogonalization. Columns whose projected
/// norm falls below `tau * max_column_norm` are dropped (their coefficients
/// are zero). Returns the coefficients and the distance of `b` to the
/// column span.
///
/// The orthogonalization is done explicitly because the verdict thresholds
/// sit far below the accuracy the library SVD guarantees for singular
/// vectors of rank-deficient complex matrices.
pub fn pinv_solve(
    m: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
    tau: f64,
) -> Result<(DVector<Complex64>, f64)> {
    let cols = m.ncols();
    if b.len() != m.nrows() {
        return Err(Error::Dimension(format!(
            "rhs has {} rows, matrix has {}",
            b.len(),
            m.nrows()
        )));
    }
    let mut work: Vec<DVector<Complex64>> = (0..cols).map(|j| m.column(j).into_owned()).collect();
    let max_norm = work.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    let cutoff = tau * max_norm;

    let mut q: Vec<DVector<Complex64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    // r[(i, j)] with i indexing q and j the original column
    let mut r = DMatrix::<Complex64>::zeros(cols.min(m.nrows()), cols);
    let mut active: Vec<usize> = (0..cols).collect();
    while !active.is_empty() && q.len() < r.nrows() {
        // largest remaining column; smallest index on ties
        let best = active
            .iter()
            .copied()
            .max_by(|&a, &bj| {
                work[a]
                    .norm()
                    .total_cmp(&work[bj].norm())
                    .then(bj.cmp(&a))
            })
            .expect("active is nonempty");
        // a second orthogonalization pass against the accepted directions
        // keeps Q orthonormal even when the kept columns are ill-conditioned
        let mut w = work[best].clone();
        for (i, qi) in q.iter().enumerate() {
            let coeff: Complex64 = qi.dotc(&w);
            w -= qi * coeff;
            r[(i, best)] += coeff;
        }
        let best_norm = w.norm();
        if best_norm <= cutoff || best_norm == 0.0 {
            break;
        }
        let qk = &w / Complex64::new(best_norm, 0.0);
        r[(q.len(), best)] = Complex64::new(best_norm, 0.0);
        active.retain(|&j| j != best);
        for &j in &active {
            let coeff: Complex64 = qk.dotc(&work[j]);
            work[j] -= &qk * coeff;
            r[(q.len(), j)] += coeff;
        }
        q.push(qk);
        pivots.push(best);
    }

    // project b, with one reorthogonalization pass for accuracy
    let mut residual_vec = b.clone();
    let mut qb = DVector::<Complex64>::zeros(q.len());
    for _ in 0..2 {
        for (i, qi) in q.iter().enumerate() {
            let coeff: Complex64 = qi.dotc(&residual_vec);
            qb[i] += coeff;
            residual_vec -= qi * coeff;
        }
    }
    let residual = residual_vec.norm();

    // back-substitute R c = Q^H b over the pivot columns
    let mut c = DVector::<Complex64>::zeros(cols);
    for i in (0..q.len()).rev() {
        let mut acc = qb[i];
        for t in (i + 1)..q.len() {
            acc -= r[(i, pivots[t])] * c[pivots[t]];
        }
        let rii = r[(i, pivots[i])];
        if rii.norm() > 0.0 {
            c[pivots[i]] = acc / rii;
        }
    }
    Ok((c, residual))
}

/// Orthonormal basis of `{v : K v = 0}` with the rank decision at
/// `tau * max_row_norm`.
///
/// Built as the orthogonal complement of the row space: pivoted
/// reorthogonalized Gram–Schmidt on the conjugated rows, then a pivoted
/// extension of that basis by coordinate vectors. Both passes keep the
/// result orthonormal to roundoff regardless of conditioning.
pub fn orthonormal_nullspace(k: &DMatrix<Complex64>, tau: f64) -> Vec<DVector<Complex64>> {
    let dim = k.ncols();
    let kh = k.adjoint();
    let mut work: Vec<DVector<Complex64>> = (0..kh.ncols()).map(|j| kh.column(j).into_owned()).collect();
    let max_norm = work.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    let cutoff = tau * max_norm;

    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    let mut active: Vec<usize> = (0..work.len()).collect();
    while !active.is_empty() && basis.len() < dim {
        let best = active
            .iter()
            .copied()
            .max_by(|&a, &b| work[a].norm().total_cmp(&work[b].norm()).then(b.cmp(&a)))
            .expect("active is nonempty");
        let mut w = work[best].clone();
        for q in &basis {
            let coeff: Complex64 = q.dotc(&w);
            w -= q * coeff;
        }
        let norm = w.norm();
        if norm <= cutoff || norm == 0.0 {
            break;
        }
        let qk = &w / Complex64::new(norm, 0.0);
        active.retain(|&j| j != best);
        for &j in &active {
            let coeff: Complex64 = qk.dotc(&work[j]);
            work[j] -= &qk * coeff;
        }
        basis.push(qk);
    }
    let rank = basis.len();

    // extend to a full orthonormal basis by the best coordinate directions;
    // everything added past the row space spans the nullspace
    let mut residuals: Vec<DVector<Complex64>> = (0..dim)
        .map(|j| {
            let mut e = DVector::<Complex64>::zeros(dim);
            e[j] = Complex64::new(1.0, 0.0);
            for q in &basis {
                let coeff: Complex64 = q.dotc(&e);
                e -= q * coeff;
            }
            e
        })
        .collect();
    let mut null = Vec::with_capacity(dim - rank);
    let mut active: Vec<usize> = (0..dim).collect();
    while basis.len() < dim {
        let best = active
            .iter()
            .copied()
            .max_by(|&a, &b| {
                residuals[a]
                    .norm()
                    .total_cmp(&residuals[b].norm())
                    .then(b.cmp(&a))
            })
            .expect("the coordinate vectors span the space");
        let mut w = residuals[best].clone();
        for q in &basis {
            let coeff: Complex64 = q.dotc(&w);
            w -= q * coeff;
        }
        let norm = w.norm();
        debug_assert!(norm > 0.0);
        let qk = &w / Complex64::new(norm, 0.0);
        active.retain(|&j| j != best);
        for &j in &active {
            let coeff: Complex64 = qk.dotc(&residuals[j]);
            residuals[j] -= &qk * coeff;
        }
        basis.push(qk.clone());
        null.push(qk);
    }
    null
}

/// Matrix exponential (Padé scaling and squaring).
pub fn expm(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    m.exp()
}

/// Column-major vectorization.
pub fn vec_of(m: &DMatrix<Complex64>) -> DVector<Complex64> {
    DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vec_of`] for a `d x d` matrix.
pub fn unvec(v: &DVector<Complex64>, d: usize) -> DMatrix<Complex64> {
    DMatrix::from_column_slice(d, d, v.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_non_square() {
        let m = DMatrix::from_row_slice(1, 2, &[c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(ComplexMatrix::new(m).is_err());
    }

    #[test]
    fn rejects_nan() {
        let m = DMatrix::from_row_slice(1, 1, &[c(f64::NAN, 0.0)]);
        assert!(ComplexMatrix::new(m).is_err());
    }

    #[test]
    fn rank_examples() {
        let tau = 1e-10;
        assert_eq!(numerical_rank_raw(&DMatrix::identity(3, 3), tau), 3);
        assert_eq!(numerical_rank_raw(&DMatrix::zeros(3, 3), tau), 0);
        // singular values {2, 0}
        let ones = DMatrix::from_element(2, 2, c(1.0, 0.0));
        assert_eq!(numerical_rank_raw(&ones, tau), 1);
    }

    #[test]
    fn smallest_singular_vector_annihilates() {
        let ones = DMatrix::from_element(2, 2, c(1.0, 0.0));
        let (s, v) = smallest_singular(&ones).unwrap();
        assert!(s.abs() < 1e-14);
        assert!((&ones * &v).norm() < 1e-14);
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pinv_solves_consistent_system() {
        let m = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(4.0, 0.0)]);
        let b = DVector::from_column_slice(&[c(2.0, 0.0), c(8.0, 0.0)]);
        let (x, r) = pinv_solve(&m, &b, 1e-12).unwrap();
        assert!(r < 1e-12);
        assert!((x[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((x[1] - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn expm_jordan_block() {
        // exp([[-1,1],[0,-1]]) = e^{-1} [[1,1],[0,1]]
        let j = DMatrix::from_row_slice(2, 2, &[c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let e = expm(&j);
        let s = (-1.0f64).exp();
        let expected =
            DMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        assert!((&e - &expected).norm() < 1e-14);
    }

    #[test]
    fn vec_unvec_roundtrip() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 2.0), c(3.0, -1.0), c(0.5, 0.0), c(0.0, 4.0)]);
        assert_eq!(unvec(&vec_of(&m), 2), m);
    }
}
