//! Conversions from report structs to deterministic JSON values. Object
//! keys come out sorted (serde_json's default map), so artifacts are stable
//! byte for byte.

use jspec_core::bernstein::{SpectralMappingReport, ValidationReport};
use jspec_core::koszul::ExactnessAudit;
use jspec_core::linalg::SpectrumPointSet;
use jspec_core::spectra::ShilovComputation;
use jspec_core::stability::{RolewiczReport, StabilityReport, StrongStabilityReport};
use num_complex::Complex64;
use serde_json::{json, Value};

pub fn complex(z: &Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn point(p: &[Complex64]) -> Value {
    Value::Array(p.iter().map(complex).collect())
}

pub fn complex_list(zs: &[Complex64]) -> Value {
    Value::Array(zs.iter().map(complex).collect())
}

pub fn point_set(set: &SpectrumPointSet) -> Value {
    json!({
        "points": set.points().iter().map(|p| point(p)).collect::<Vec<_>>(),
        "multiplicities": set.multiplicities(),
    })
}

/// Extended-real value: finite numbers stay numeric, infinities become a
/// tagged object so the JSON remains parseable.
pub fn extended_real(x: f64) -> Value {
    if x.is_finite() {
        json!({ "finite": true, "value": x })
    } else {
        json!({ "finite": false, "sign": if x > 0.0 { 1 } else { -1 } })
    }
}

pub fn validation_report(report: &ValidationReport) -> Value {
    json!({
        "passed": report.passed,
        "checks": report
            .checks
            .iter()
            .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
            .collect::<Vec<_>>(),
    })
}

pub fn exactness_audit(lambda: &[Complex64], member: bool, audit: &ExactnessAudit) -> Value {
    json!({
        "lambda": point(lambda),
        "space_dims": audit.space_dims,
        "ranks": audit.ranks,
        "kernel_dims": audit.kernel_dims,
        "exact_at": audit.exact_at,
        "exact": audit.exact,
        "rank_margin": audit.margin,
        "member": member,
    })
}

pub fn marginal_audit(scan: &jspec_core::spectra::CommutantScan) -> Value {
    json!({
        "marginal_candidates": scan
            .marginal
            .iter()
            .map(|(p, r)| json!({ "lambda": point(p), "residual": r }))
            .collect::<Vec<_>>(),
    })
}

pub fn shilov(sh: &ShilovComputation) -> Value {
    json!({
        "spectrum": point_set(&sh.spectrum),
        "character_points": point_set(&sh.character_points),
        "character_gap": sh.character_gap,
    })
}

pub fn spectral_mapping(report: &SpectralMappingReport) -> Value {
    json!({
        "psi_eigenvalues": complex_list(&report.psi_eigenvalues),
        "image_of_bicommutant": point_set(&report.image_of_bicommutant),
        "image_of_shilov": point_set(&report.image_of_shilov),
        "image_of_joint": point_set(&report.image_of_joint),
        "inclusion_holds": report.inclusion_holds,
        "inclusion_hausdorff": report.inclusion_hausdorff,
        "eig_equals_image_of_joint": report.eig_equals_image_of_joint,
        "eig_vs_joint_hausdorff": report.eig_vs_joint_hausdorff,
        "exponential_law": report.exponential_law.as_ref().map(|law| json!({
            "u": law.u,
            "semigroup_eigenvalues": complex_list(&law.semigroup_eigenvalues),
            "mapped_joint_spectrum": complex_list(&law.mapped_joint_spectrum),
            "hausdorff": law.hausdorff,
            "holds": law.holds,
        })),
        "psi_at_minus_infinity": extended_real(report.psi_at_minus_infinity),
        "min_distance_to_limit_value": extended_real(report.min_distance_to_limit_value),
    })
}

pub fn stability(report: &StabilityReport, strong: &StrongStabilityReport) -> Value {
    let v = &report.verdicts;
    let verdicts = json!({
        "radius_all": v.radius_all,
        "radius_some": v.radius_some,
        "negative_shilov_bound": v.negative_shilov_bound,
        "ray_uniform_all": v.ray_uniform_all,
        "ray_uniform_some": v.ray_uniform_some,
        "cone_uniform_all": v.cone_uniform_all,
        "cone_uniform_some": v.cone_uniform_some,
        "cone_uniform_exponential": v.cone_uniform_exponential,
        "strong_exponential": v.strong_exponential,
        "exponential_norm_bound": v.exponential_norm_bound,
    });
    json!({
        "s_bound": report.s_bound,
        "radii": report
            .radii
            .iter()
            .map(|(u, r)| json!({ "direction": u, "radius": r }))
            .collect::<Vec<_>>(),
        "fitted_rates": report
            .fitted_rates
            .iter()
            .map(|f| json!({
                "direction": f.direction,
                "rate": f.rate,
                "intercept": f.intercept,
                "initial_norm": f.initial_norm,
                "final_norm": f.final_norm,
            }))
            .collect::<Vec<_>>(),
        "verdicts": verdicts,
        "exponential_bound": { "m": report.exponential_bound.0, "omega": report.exponential_bound.1 },
        "epsilon_certificate": report.epsilon_certificate(),
        "consistent": report.consistent(),
        "counterexample": report.counterexample,
        "strong_stability": {
            "hypotheses_hold": strong.hypotheses_hold,
            "ray_decay_all": strong.ray_decay_all,
            "cone_sequence_decay": strong.cone_sequence_decay,
            "rays": strong
                .rays
                .iter()
                .map(|r| json!({
                    "direction": r.direction,
                    "spectrum_on_axis": complex_list(&r.spectrum_on_axis),
                    "residual_on_axis": complex_list(&r.residual_on_axis),
                    "hypotheses_hold": r.hypotheses_hold,
                    "basis_decay": r.basis_decay,
                }))
                .collect::<Vec<_>>(),
        },
    })
}

pub fn rolewicz(report: &RolewiczReport) -> Value {
    json!({
        "all_finite": report.all_finite,
        "stability_verdicts_all_true": report.stability_verdicts_all_true,
        "per_vector": report
            .per_vector
            .iter()
            .enumerate()
            .map(|(i, v)| json!({
                "vector_index": i,
                "finite": v.finite,
                "estimate": v.estimate,
                "tail_bound": extended_real(v.tail_bound),
                "rays": v
                    .rays
                    .iter()
                    .map(|r| json!({
                        "direction": r.direction,
                        "estimate": r.estimate,
                        "tail_bound": extended_real(r.tail_bound),
                        "finite": r.finite,
                        "fitted_rate": r.fitted_rate,
                        "diagnostic": r.diagnostic,
                    }))
                    .collect::<Vec<_>>(),
            }))
            .collect::<Vec<_>>(),
    })
}
