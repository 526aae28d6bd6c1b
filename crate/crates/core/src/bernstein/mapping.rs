//! Spectral-mapping verification: compares the spectrum of `psi(A)` with the
//! images of the joint spectra under `psi`, and checks the exponential law
//! `sigma(T(u)) = e^{u . sigma(A)}` for single-exponential functions.

use num_complex::Complex64;

use crate::bernstein::{evaluate_psi, psi_at_minus_infinity, psi_of_tuple, BernsteinFunction};
use crate::error::Result;
use crate::linalg::{
    eigenvalues, joint_eigenvalues, semigroup_value, CommutingTuple, SpectrumPointSet,
    ToleranceConfig,
};
use crate::spectra::{bicommutant_spectrum, shilov_spectrum};

/// Check of `sigma(T(u)) = e^{u . sigma(A)}` (bounded case: without the
/// origin adjoined).
#[derive(Debug, Clone)]
pub struct ExponentialLawCheck {
    pub u: Vec<f64>,
    pub semigroup_eigenvalues: Vec<Complex64>,
    pub mapped_joint_spectrum: Vec<Complex64>,
    pub hausdorff: f64,
    pub holds: bool,
}

/// Spectral-mapping data for one `(psi, tuple)` pair.
#[derive(Debug, Clone)]
pub struct SpectralMappingReport {
    /// Eigenvalues of the matrix `psi(A)`.
    pub psi_eigenvalues: Vec<Complex64>,
    /// `psi(sigma''(A))`.
    pub image_of_bicommutant: SpectrumPointSet,
    /// `psi(sigma_Shilov(A))`.
    pub image_of_shilov: SpectrumPointSet,
    /// `psi(joint eigenvalues)`.
    pub image_of_joint: SpectrumPointSet,
    /// Directed distance of `psi(sigma''(A))` into `eig(psi(A))`.
    pub inclusion_hausdorff: f64,
    /// The spectral inclusion `psi(sigma''(A)) in sigma(psi(A))`.
    pub inclusion_holds: bool,
    /// Distance between `eig(psi(A))` and `psi(joint eigenvalues)`.
    pub eig_vs_joint_hausdorff: f64,
    /// The matrix-scale equality `eig(psi(A)) = psi(joint eigenvalues)`.
    pub eig_equals_image_of_joint: bool,
    /// Present when `psi` is a unit-weight single exponential.
    pub exponential_law: Option<ExponentialLawCheck>,
    /// `psi(-inf)`; recorded together with its distance to the spectrum,
    /// not asserted (the limit value need not be spectral for matrices).
    pub psi_at_minus_infinity: f64,
    pub min_distance_to_limit_value: f64,
}

fn image_set(
    psi: &BernsteinFunction,
    points: &SpectrumPointSet,
    dedup_tol: f64,
) -> Result<SpectrumPointSet> {
    let mapped = points
        .points()
        .iter()
        .map(|p| Ok(vec![evaluate_psi(psi, p)?]))
        .collect::<Result<Vec<_>>>()?;
    SpectrumPointSet::from_points(mapped, dedup_tol)
}

/// Builds the spectral-mapping report. The tuple must generate a bounded
/// semigroup (joint spectra in the closed left half-space), since `psi` is
/// only defined there.
pub fn spectral_mapping_report(
    psi: &BernsteinFunction,
    tuple: &CommutingTuple,
    cfg: &ToleranceConfig,
    seed: u64,
) -> Result<SpectralMappingReport> {
    let tol = 1e-7;
    let psi_matrix = psi_of_tuple(psi, tuple)?;
    let psi_eigenvalues = eigenvalues(psi_matrix.raw())?;
    let eig_set = SpectrumPointSet::from_points(
        psi_eigenvalues.iter().map(|&z| vec![z]),
        cfg.tau_dedup,
    )?;

    let bicommutant = bicommutant_spectrum(tuple, cfg)?;
    let shilov = shilov_spectrum(tuple, cfg, seed)?;
    let joint = joint_eigenvalues(tuple, cfg, seed)?;

    let image_of_bicommutant = image_set(psi, &bicommutant, cfg.tau_dedup)?;
    let image_of_shilov = image_set(psi, &shilov, cfg.tau_dedup)?;
    let image_of_joint = image_set(psi, &joint, cfg.tau_dedup)?;

    let inclusion_hausdorff = image_of_bicommutant.directed_hausdorff(&eig_set);
    let eig_vs_joint_hausdorff = eig_set.hausdorff(&image_of_joint);

    // exponential law for psi(s) = e^{u.s} - 1: then psi(A) = T(u) - I and
    // sigma(T(u)) must equal e^{u . sigma(A)}
    let exponential_law = match (psi.c0(), psi.mu().atoms()) {
        (0.0, [atom])
            if (atom.weight - 1.0).abs() < 1e-15 && psi.c1().iter().all(|&x| x == 0.0) =>
        {
            let u = atom.location.clone();
            let tu = semigroup_value(tuple, &u)?;
            let semigroup_eigenvalues = eigenvalues(tu.raw())?;
            let mut mapped: Vec<Complex64> = joint
                .points()
                .iter()
                .map(|p| {
                    p.iter()
                        .zip(&u)
                        .map(|(z, &uj)| z * uj)
                        .sum::<Complex64>()
                        .exp()
                })
                .collect();
            crate::linalg::sort_complex(&mut mapped);
            let sg = SpectrumPointSet::from_points(
                semigroup_eigenvalues.iter().map(|&z| vec![z]),
                cfg.tau_dedup,
            )?;
            let mp = SpectrumPointSet::from_points(mapped.iter().map(|&z| vec![z]), cfg.tau_dedup)?;
            let hausdorff = sg.hausdorff(&mp);
            Some(ExponentialLawCheck {
                u,
                semigroup_eigenvalues,
                mapped_joint_spectrum: mapped,
                holds: hausdorff <= tol,
                hausdorff,
            })
        }
        _ => None,
    };

    let limit = psi_at_minus_infinity(psi);
    let min_distance_to_limit_value = if limit.is_finite() {
        psi_eigenvalues
            .iter()
            .map(|z| (z - Complex64::new(limit, 0.0)).norm())
            .fold(f64::INFINITY, f64::min)
    } else {
        f64::INFINITY
    };

    Ok(SpectralMappingReport {
        psi_eigenvalues,
        image_of_bicommutant,
        image_of_shilov,
        image_of_joint,
        inclusion_holds: inclusion_hausdorff <= tol,
        inclusion_hausdorff,
        eig_vs_joint_hausdorff,
        eig_equals_image_of_joint: eig_vs_joint_hausdorff <= tol,
        exponential_law,
        psi_at_minus_infinity: limit,
        min_distance_to_limit_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::DiscreteMeasure;
    use crate::fixtures;
    use crate::linalg::ComplexMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn drift_on_f1_gives_sums() {
        let psi = BernsteinFunction::drift(vec![1.0, 1.0]).unwrap();
        let report = spectral_mapping_report(&psi, &fixtures::f1(), &cfg(), 0).unwrap();
        assert!(report.inclusion_holds);
        assert!(report.eig_equals_image_of_joint);
        // eig(psi(A)) = {-4, -6}
        assert!((report.psi_eigenvalues[0] - c(-6.0, 0.0)).norm() < 1e-12);
        assert!((report.psi_eigenvalues[1] - c(-4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn exponential_law_on_f1() {
        let psi = BernsteinFunction::single_atom(vec![1.0, 1.0], 1.0).unwrap();
        let report = spectral_mapping_report(&psi, &fixtures::f1(), &cfg(), 0).unwrap();
        let law = report.exponential_law.expect("single exponential");
        assert!(law.holds, "hausdorff {}", law.hausdorff);
        // sigma(T(1,1)) = {e^{-4}, e^{-6}}
        assert!(law
            .semigroup_eigenvalues
            .iter()
            .any(|z| (z - c((-4.0f64).exp(), 0.0)).norm() < 1e-12));
        assert!(law
            .semigroup_eigenvalues
            .iter()
            .any(|z| (z - c((-6.0f64).exp(), 0.0)).norm() < 1e-12));
    }

    #[test]
    fn example_limit_value_not_spectral_for_matrices() {
        // psi(s) = e^s - 1 applied to the first block of the Jordan pair:
        // eig = {e^{-1} - 1} stays away from psi(-inf) = -1
        let j = fixtures::f2().matrix(0).clone();
        let t = crate::linalg::CommutingTuple::new(vec![j], &cfg()).unwrap();
        let psi = BernsteinFunction::single_atom(vec![1.0], 1.0).unwrap();
        let report = spectral_mapping_report(&psi, &t, &cfg(), 0).unwrap();
        assert_eq!(report.psi_at_minus_infinity, -1.0);
        assert!((report.psi_eigenvalues[0] - c((-1.0f64).exp() - 1.0, 0.0)).norm() < 1e-9);
        assert!(report.min_distance_to_limit_value > 1e-3);
    }

    #[test]
    fn general_function_on_stable_random_tuple() {
        let opts = fixtures::F4Options::new(2, 4).stable(0.1);
        let tuple = fixtures::f4(17, 3, &opts).unwrap();
        let psi = BernsteinFunction::new(
            -0.25,
            vec![0.5, 0.1],
            DiscreteMeasure::new(vec![(vec![0.7, 0.2], 0.6), (vec![0.1, 1.1], 0.3)]).unwrap(),
        )
        .unwrap();
        let report = spectral_mapping_report(&psi, &tuple, &cfg(), 0).unwrap();
        assert!(report.inclusion_holds, "gap {}", report.inclusion_hausdorff);
        assert!(
            report.eig_equals_image_of_joint,
            "gap {}",
            report.eig_vs_joint_hausdorff
        );
    }

    #[test]
    fn projections_of_shilov_match_member_spectra() {
        let tol = cfg();
        for tuple in [fixtures::f1(), fixtures::f2(), fixtures::f3(), fixtures::f5()] {
            let shilov = shilov_spectrum(&tuple, &tol, 0).unwrap();
            for j in 0..tuple.n() {
                let projected = SpectrumPointSet::from_points(
                    shilov.points().iter().map(|p| vec![p[j]]),
                    tol.tau_dedup,
                )
                .unwrap();
                let evs = eigenvalues(tuple.matrix(j).raw()).unwrap();
                let member = SpectrumPointSet::from_points(
                    evs.iter().map(|&z| vec![z]),
                    tol.tau_dedup,
                )
                .unwrap();
                assert!(projected.hausdorff(&member) < 1e-7);
            }
        }
    }

    #[test]
    fn report_on_hermitian_diagonal_single_matrix() {
        let a = ComplexMatrix::diagonal(&[c(0.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let t = crate::linalg::CommutingTuple::new(vec![a], &cfg()).unwrap();
        let psi = BernsteinFunction::single_atom(vec![2.0], 1.0).unwrap();
        let report = spectral_mapping_report(&psi, &t, &cfg(), 0).unwrap();
        // psi(0) = 0 sits in the spectrum of psi(A)
        assert!(report
            .psi_eigenvalues
            .iter()
            .any(|z| z.norm() < 1e-12));
        assert!(report.inclusion_holds);
    }
}
