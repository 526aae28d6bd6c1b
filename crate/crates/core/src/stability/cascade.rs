//! Two-parameter cascade Cauchy problem: the initial data of the
//! `t_1`-problem is itself the solution of a one-parameter problem, so the
//! solution is `u(t_1, t_2) = T_1(t_1) T_2(t_2) v_0` on a rectangular grid,
//! with an exponential decay fit over the in-cone nodes.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{expm, CommutingTuple, ToleranceConfig};
use crate::stability::{fit_line, Cone};

/// Rectangular evaluation lattice on `[0, t1_max] x [0, t2_max]`.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub len1: usize,
    pub len2: usize,
    pub t1_max: f64,
    pub t2_max: f64,
}

impl GridSpec {
    pub fn new(len1: usize, len2: usize, t1_max: f64, t2_max: f64) -> Result<Self> {
        if len1 < 2 || len2 < 2 || len1 > 10_000 || len2 > 10_000 {
            return Err(Error::Dimension(format!(
                "cascade grid axes must have between 2 and 10000 nodes, got {len1}x{len2}"
            )));
        }
        if !(t1_max > 0.0 && t2_max > 0.0 && t1_max.is_finite() && t2_max.is_finite()) {
            return Err(Error::Domain("grid extents must be positive".into()));
        }
        Ok(Self {
            len1,
            len2,
            t1_max,
            t2_max,
        })
    }
}

/// Cascade solution values and the fitted cone decay certificate.
#[derive(Debug, Clone)]
pub struct CascadeSolution {
    pub t1: Vec<f64>,
    pub t2: Vec<f64>,
    /// `values[i][j] = u(t1[i], t2[j])`.
    pub values: Vec<Vec<DVector<Complex64>>>,
    pub norms: Vec<Vec<f64>>,
    pub in_cone: Vec<Vec<bool>>,
    /// Fitted `(M_K, omega_K)` with `‖u(v)‖ <= M_K e^{omega_K |v|_inf} ‖v0‖`
    /// over the in-cone nodes.
    pub fitted_m: f64,
    pub fitted_omega: f64,
}

/// Solves the cascade on the grid. Requires a two-parameter tuple.
pub fn cascade_solve(
    tuple: &CommutingTuple,
    v0: &[Complex64],
    grid: &GridSpec,
    cone: &Cone,
    _cfg: &ToleranceConfig,
) -> Result<CascadeSolution> {
    if tuple.n() != 2 {
        return Err(Error::Dimension(format!(
            "the cascade problem is two-parameter, tuple has n = {}",
            tuple.n()
        )));
    }
    if cone.n() != 2 {
        return Err(Error::Dimension("cascade cone must be 2-dimensional".into()));
    }
    let d = tuple.dim();
    if v0.len() != d {
        return Err(Error::Dimension(format!(
            "initial vector has {} components, the space has {d}",
            v0.len()
        )));
    }
    let v0 = DVector::from_column_slice(v0);
    let v0_norm = v0.norm();

    let t1: Vec<f64> = (0..grid.len1)
        .map(|i| grid.t1_max * i as f64 / (grid.len1 - 1) as f64)
        .collect();
    let t2: Vec<f64> = (0..grid.len2)
        .map(|j| grid.t2_max * j as f64 / (grid.len2 - 1) as f64)
        .collect();

    // inner solutions v(t2) = T_2(t2) v0, then the outer flow applied to them
    let inner: Vec<DVector<Complex64>> = t2
        .iter()
        .map(|&s| expm(&(tuple.matrix(1).raw() * Complex64::new(s, 0.0))) * &v0)
        .collect();
    let mut values = Vec::with_capacity(grid.len1);
    let mut norms = Vec::with_capacity(grid.len1);
    let mut in_cone = Vec::with_capacity(grid.len1);
    for &s in &t1 {
        let outer = expm(&(tuple.matrix(0).raw() * Complex64::new(s, 0.0)));
        let row: Vec<DVector<Complex64>> = inner.iter().map(|w| &outer * w).collect();
        norms.push(row.iter().map(|u| u.norm()).collect::<Vec<f64>>());
        let mut cone_row = Vec::with_capacity(grid.len2);
        for &r in &t2 {
            cone_row.push(cone.contains_2d(&[s, r])?);
        }
        in_cone.push(cone_row);
        values.push(row);
    }

    // decay fit over the far half of the in-cone nodes, against |v|_inf
    let reach = grid.t1_max.max(grid.t2_max);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, &a) in t1.iter().enumerate() {
        for (j, &b) in t2.iter().enumerate() {
            let linf = a.max(b);
            if in_cone[i][j] && linf >= 0.5 * reach && norms[i][j] > 1e-290 {
                xs.push(linf);
                ys.push((norms[i][j] / v0_norm.max(f64::MIN_POSITIVE)).ln());
            }
        }
    }
    let (fitted_m, fitted_omega) = if xs.len() < 2 || v0_norm == 0.0 {
        (0.0, 0.0)
    } else {
        let (_, omega) = fit_line(&xs, &ys);
        let mut m = 0.0f64;
        for (i, &a) in t1.iter().enumerate() {
            for (j, &b) in t2.iter().enumerate() {
                if in_cone[i][j] {
                    let linf = a.max(b);
                    m = m.max(norms[i][j] / v0_norm * (-omega * linf).exp());
                }
            }
        }
        (m, omega)
    };

    Ok(CascadeSolution {
        t1,
        t2,
        values,
        norms,
        in_cone,
        fitted_m,
        fitted_omega,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::semigroup_value;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn f1_diagonal_cone_rate() {
        let grid = GridSpec::new(20, 20, 5.0, 5.0).unwrap();
        let cone = Cone::new(vec![vec![1.0, 1.0]], 2).unwrap();
        let sol = cascade_solve(&fixtures::f1(), &[c(1.0), c(1.0)], &grid, &cone, &cfg()).unwrap();
        // components e^{-4t}, e^{-6t} on the diagonal: rate -4 dominates
        assert!(
            sol.fitted_omega <= -4.0 + 0.1,
            "fitted omega {}",
            sol.fitted_omega
        );
        assert!(sol.fitted_m.is_finite() && sol.fitted_m > 0.0);
    }

    #[test]
    fn zero_initial_data_stays_zero() {
        let grid = GridSpec::new(4, 4, 1.0, 1.0).unwrap();
        let cone = Cone::new(vec![vec![1.0, 1.0]], 2).unwrap();
        let sol = cascade_solve(&fixtures::f1(), &[c(0.0), c(0.0)], &grid, &cone, &cfg()).unwrap();
        for row in &sol.norms {
            for &v in row {
                assert_eq!(v, 0.0);
            }
        }
        assert_eq!(sol.fitted_m, 0.0);
        assert_eq!(sol.fitted_omega, 0.0);
    }

    #[test]
    fn f5_rate_near_minus_one() {
        let grid = GridSpec::new(20, 20, 8.0, 8.0).unwrap();
        let cone = Cone::new(vec![vec![1.0, 1.0]], 2).unwrap();
        let v0: Vec<Complex64> = (0..5).map(|_| c(1.0)).collect();
        let sol = cascade_solve(&fixtures::f5(), &v0, &grid, &cone, &cfg()).unwrap();
        assert!(
            (sol.fitted_omega + 1.0).abs() < 0.05,
            "fitted omega {}",
            sol.fitted_omega
        );
    }

    #[test]
    fn boundary_row_solves_inner_problem() {
        let grid = GridSpec::new(5, 7, 2.0, 3.0).unwrap();
        let cone = Cone::new(vec![vec![1.0, 1.0]], 2).unwrap();
        let f1 = fixtures::f1();
        let v0 = [c(1.0), c(-0.5)];
        let sol = cascade_solve(&f1, &v0, &grid, &cone, &cfg()).unwrap();
        for (j, &s) in sol.t2.iter().enumerate() {
            let inner = expm(&(f1.matrix(1).raw() * Complex64::new(s, 0.0)))
                * DVector::from_column_slice(&v0);
            assert!((&sol.values[0][j] - &inner).norm() < 1e-10);
        }
    }

    #[test]
    fn matches_semigroup_value_on_grid() {
        let grid = GridSpec::new(6, 6, 2.0, 2.0).unwrap();
        let cone = Cone::new(vec![vec![1.0, 1.0]], 2).unwrap();
        let f1 = fixtures::f1();
        let v0 = [c(0.3), c(0.7)];
        let sol = cascade_solve(&f1, &v0, &grid, &cone, &cfg()).unwrap();
        for (i, &a) in sol.t1.iter().enumerate() {
            for (j, &b) in sol.t2.iter().enumerate() {
                let direct = semigroup_value(&f1, &[a, b]).unwrap().raw().clone()
                    * DVector::from_column_slice(&v0);
                assert!((&sol.values[i][j] - &direct).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_wrong_arity() {
        let grid = GridSpec::new(4, 4, 1.0, 1.0).unwrap();
        let cone = Cone::new(vec![vec![1.0, 1.0]], 2).unwrap();
        let a = crate::linalg::ComplexMatrix::diagonal(&[c(-1.0)]).unwrap();
        let t = CommutingTuple::new(vec![a], &cfg()).unwrap();
        assert!(matches!(
            cascade_solve(&t, &[c(1.0)], &grid, &cone, &cfg()),
            Err(Error::Dimension(_))
        ));
    }
}
