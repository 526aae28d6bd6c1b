//! Strong-stability conditions: imaginary-axis spectrum of the ray
//! generators, residual spectrum of the compressed tuple, and empirical
//! decay along rays and cone sequences.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    joint_eigenvalues, semigroup_value, ComplexMatrix, CommutingTuple, ToleranceConfig,
};
use crate::spectra::residual_spectrum;
use crate::stability::{bounded_semigroup_check, sample_cone_points, Cone};

/// Per-ray condition data.
#[derive(Debug, Clone)]
pub struct RayStrongReport {
    pub direction: Vec<f64>,
    /// Points of `u . sigma(A)` lying on the imaginary axis (within 1e-9).
    pub spectrum_on_axis: Vec<Complex64>,
    /// Points of `sigma_R(u . A)` on the imaginary axis.
    pub residual_on_axis: Vec<Complex64>,
    /// The sufficient conditions hold on this ray: countability of the axis
    /// spectrum is automatic for a finite set, so the deciding condition is
    /// that the residual spectrum avoids the imaginary axis.
    pub hypotheses_hold: bool,
    /// Every basis orbit `‖T(t u) e_i‖` decayed over the horizon.
    pub basis_decay: bool,
}

/// Report of the strong-stability analysis on a cone.
#[derive(Debug, Clone)]
pub struct StrongStabilityReport {
    pub rays: Vec<RayStrongReport>,
    pub hypotheses_hold: bool,
    pub ray_decay_all: bool,
    /// Decay along sampled in-cone sequences with growing norm (the
    /// ray-to-cone transfer).
    pub cone_sequence_decay: bool,
}

/// Checks the strong-stability sufficient conditions ray by ray and verifies
/// decay empirically on basis vectors and sampled cone sequences.
pub fn strong_stability_conditions(
    tuple: &CommutingTuple,
    cone: &Cone,
    t_max: f64,
    cfg: &ToleranceConfig,
    seed: u64,
) -> Result<StrongStabilityReport> {
    if cone.n() != tuple.n() {
        return Err(Error::Dimension(format!(
            "cone lives in R^{}, tuple has {} parameters",
            cone.n(),
            tuple.n()
        )));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::Domain(format!("horizon must be positive, got {t_max}")));
    }
    bounded_semigroup_check(tuple, cfg)?;

    let d = tuple.dim();
    let joint = joint_eigenvalues(tuple, cfg, seed)?;
    let axis_tol = 1e-9;
    let mut rays = Vec::new();
    for u in cone.sample_directions(seed) {
        // u . sigma(A); finite, hence countable
        let compressed: Vec<Complex64> = joint
            .points()
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&u)
                    .map(|(z, &uj)| z * uj)
                    .sum::<Complex64>()
            })
            .collect();
        let spectrum_on_axis: Vec<Complex64> = compressed
            .iter()
            .filter(|z| z.re.abs() <= axis_tol)
            .cloned()
            .collect();

        // sigma_R of the single generator sum_j u_j A_j
        let mut g = tuple.matrix(0).raw() * Complex64::new(u[0], 0.0);
        for (uj, a) in u.iter().zip(tuple.matrices()).skip(1) {
            g += a.raw() * Complex64::new(*uj, 0.0);
        }
        let generator = CommutingTuple::new(vec![ComplexMatrix::new(g)?], cfg)?;
        let residual = residual_spectrum(&generator, cfg)?;
        let residual_on_axis: Vec<Complex64> = residual
            .points()
            .iter()
            .map(|p| p[0])
            .filter(|z| z.re.abs() <= axis_tol)
            .collect();

        let hypotheses_hold = residual_on_axis.is_empty();

        let tu: Vec<f64> = u.iter().map(|x| x * t_max).collect();
        let far = semigroup_value(tuple, &tu)?;
        let basis_decay = (0..d).all(|i| far.raw().column(i).norm() <= 1e-6);

        rays.push(RayStrongReport {
            direction: u,
            spectrum_on_axis,
            residual_on_axis,
            hypotheses_hold,
            basis_decay,
        });
    }

    let hypotheses_hold = rays.iter().all(|r| r.hypotheses_hold);
    let ray_decay_all = rays.iter().all(|r| r.basis_decay);

    // ray-to-cone transfer: decay along arbitrary sampled in-cone sequences
    let mut cone_sequence_decay = true;
    for v in sample_cone_points(cone, t_max, 24, seed) {
        let tv = semigroup_value(tuple, &v)?;
        for i in 0..d {
            if tv.raw().column(i).norm() > 1e-3 {
                cone_sequence_decay = false;
            }
        }
    }

    Ok(StrongStabilityReport {
        rays,
        hypotheses_hold,
        ray_decay_all,
        cone_sequence_decay,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn f1_hypotheses_hold_and_decay() {
        let cone = Cone::new(vec![vec![1.0, 1.0], vec![2.0, 1.0]], 4).unwrap();
        let report =
            strong_stability_conditions(&fixtures::f1(), &cone, 60.0, &cfg(), 0).unwrap();
        assert!(report.hypotheses_hold);
        assert!(report.ray_decay_all);
        assert!(report.cone_sequence_decay);
    }

    #[test]
    fn unbounded_f3_is_refused() {
        let cone = Cone::new(vec![vec![1.0, 1.0]], 2).unwrap();
        let err = strong_stability_conditions(&fixtures::f3(), &cone, 10.0, &cfg(), 0);
        assert!(matches!(err, Err(Error::Validation(_))));
    }

    #[test]
    fn imaginary_eigenvalue_defeats_hypotheses() {
        // diag(i, -1): the point i stays on the axis along every ray
        let a = ComplexMatrix::diagonal(&[c(0.0, 1.0), c(-1.0, 0.0)]).unwrap();
        let t = CommutingTuple::new(vec![a], &cfg()).unwrap();
        let cone = Cone::new(vec![vec![1.0]], 2).unwrap();
        let report = strong_stability_conditions(&t, &cone, 60.0, &cfg(), 0).unwrap();
        assert!(!report.hypotheses_hold);
        assert!(!report.ray_decay_all);
        assert!(!report.rays[0].spectrum_on_axis.is_empty());
        assert!(!report.rays[0].residual_on_axis.is_empty());
    }
}
