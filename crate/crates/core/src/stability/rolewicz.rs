//! Rolewicz-type integral criterion: factorized quadrature of
//! `integral over K of phi(‖T(v) x‖) dv` as ray average times radial
//! integral, with an analytic tail bound from the fitted decay rate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{semigroup_value, CommutingTuple, ToleranceConfig};
use crate::stability::{
    bounded_semigroup_check, fit_line, geometric_grid, stability_report, Cone,
};

/// Monotone comparison functions offered by the criterion.
#[derive(Debug, Clone, Copy)]
pub enum PhiFunction {
    /// `phi(t) = t^p`, `p >= 1`.
    Power { p: f64 },
}

impl PhiFunction {
    pub fn validate(&self) -> Result<()> {
        match self {
            PhiFunction::Power { p } => {
                if !(*p >= 1.0 && p.is_finite()) {
                    return Err(Error::Domain(format!(
                        "power exponent must satisfy p >= 1, got {p}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            PhiFunction::Power { p } => t.powf(*p),
        }
    }

    fn exponent(&self) -> f64 {
        match self {
            PhiFunction::Power { p } => *p,
        }
    }
}

/// Quadrature controls for the radial integrals.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Nodes of the geometric radial grid per span.
    pub radial_nodes: usize,
    /// Initial radial span.
    pub radial_span: f64,
    /// Hard cap on the radial extent.
    pub radial_max: f64,
    /// Target for `tail_bound / estimate`.
    pub tail_ratio_target: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            radial_nodes: 96,
            radial_span: 20.0,
            radial_max: 2000.0,
            tail_ratio_target: 1e-6,
        }
    }
}

/// Radial integral along one ray.
#[derive(Debug, Clone)]
pub struct RayIntegral {
    pub direction: Vec<f64>,
    pub estimate: f64,
    pub tail_bound: f64,
    pub finite: bool,
    pub fitted_rate: f64,
    pub diagnostic: Option<String>,
}

/// Verdict and estimates for one vector.
#[derive(Debug, Clone)]
pub struct RolewiczVectorReport {
    pub finite: bool,
    /// Ray-averaged radial integral (the factorized cone integral up to the
    /// normalized surface measure).
    pub estimate: f64,
    pub tail_bound: f64,
    pub rays: Vec<RayIntegral>,
}

#[derive(Debug, Clone)]
pub struct RolewiczReport {
    pub per_vector: Vec<RolewiczVectorReport>,
    pub all_finite: bool,
    /// Cross-check of the criterion: when every integral is finite, the
    /// stability battery must come out all true.
    pub stability_verdicts_all_true: Option<bool>,
}

fn radial_integral(
    tuple: &CommutingTuple,
    direction: &[f64],
    x: &[Complex64],
    phi: &PhiFunction,
    quad: &QuadratureConfig,
) -> Result<RayIntegral> {
    let x_vec = nalgebra::DVector::from_column_slice(x);
    let norm_at = |s: f64| -> Result<f64> {
        let v: Vec<f64> = direction.iter().map(|u| u * s).collect();
        Ok((semigroup_value(tuple, &v)?.raw() * &x_vec).norm())
    };

    let mut span = quad.radial_span;
    let mut last = None;
    while span <= quad.radial_max {
        let grid = geometric_grid(span, quad.radial_nodes);
        let mut values = Vec::with_capacity(grid.len());
        for &s in &grid {
            values.push(norm_at(s)?);
        }
        // decay rate of ‖T(su)x‖ from the trailing half
        let positive: Vec<(f64, f64)> = grid
            .iter()
            .zip(&values)
            .filter(|(_, &v)| v > 1e-290)
            .map(|(&s, &v)| (s, v.ln()))
            .collect();
        let tail_samples: Vec<(f64, f64)> = positive
            .iter()
            .skip(positive.len() / 2)
            .cloned()
            .collect();
        let xs: Vec<f64> = tail_samples.iter().map(|(s, _)| *s).collect();
        let ys: Vec<f64> = tail_samples.iter().map(|(_, v)| *v).collect();
        let (intercept, rate) = fit_line(&xs, &ys);

        // trapezoid on [0, span], extending the first node down to 0
        let mut estimate = phi.eval(values[0]) * grid[0];
        for i in 1..grid.len() {
            estimate +=
                0.5 * (phi.eval(values[i - 1]) + phi.eval(values[i])) * (grid[i] - grid[i - 1]);
        }

        if rate < -1e-8 {
            // analytic tail of the fitted envelope C e^{rate s}
            let p = phi.exponent();
            let envelope = (intercept + rate * span).exp().max(values[values.len() - 1]);
            let tail = phi.eval(envelope * 2.0) / (p * rate.abs());
            if tail <= quad.tail_ratio_target * estimate.max(f64::MIN_POSITIVE) {
                return Ok(RayIntegral {
                    direction: direction.to_vec(),
                    estimate,
                    tail_bound: tail,
                    finite: true,
                    fitted_rate: rate,
                    diagnostic: None,
                });
            }
            last = Some((estimate, tail, rate));
        } else {
            last = Some((estimate, f64::INFINITY, rate));
        }
        span *= 2.0;
    }
    let (estimate, tail, rate) = last.unwrap_or((0.0, f64::INFINITY, 0.0));
    Ok(RayIntegral {
        direction: direction.to_vec(),
        estimate,
        tail_bound: tail,
        finite: false,
        fitted_rate: rate,
        diagnostic: Some(format!(
            "no decay detected up to radius {} (fitted rate {rate:.3e})",
            quad.radial_max
        )),
    })
}

/// Estimates `integral over K of phi(‖T(v) x‖) dv` for each probe vector by
/// factorized quadrature over sampled rays times a geometric radial grid,
/// and reports finite/divergent verdicts.
pub fn rolewicz_check(
    tuple: &CommutingTuple,
    cone: &Cone,
    phi: &PhiFunction,
    probes: &[Vec<Complex64>],
    quad: &QuadratureConfig,
    cfg: &ToleranceConfig,
    seed: u64,
) -> Result<RolewiczReport> {
    phi.validate()?;
    if cone.n() != tuple.n() {
        return Err(Error::Dimension(format!(
            "cone lives in R^{}, tuple has {} parameters",
            cone.n(),
            tuple.n()
        )));
    }
    bounded_semigroup_check(tuple, cfg)?;
    let d = tuple.dim();
    // the criterion quantifies over unit vectors; normalize and reject zero
    let mut unit_probes = Vec::with_capacity(probes.len());
    for x in probes {
        if x.len() != d {
            return Err(Error::Dimension(format!(
                "probe vector has {} components, the space has {d}",
                x.len()
            )));
        }
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain("probe vectors must be nonzero".into()));
        }
        unit_probes.push(x.iter().map(|z| z / norm).collect::<Vec<_>>());
    }
    let directions = cone.sample_directions(seed);
    let mut per_vector = Vec::with_capacity(unit_probes.len());
    for x in &unit_probes {
        let mut rays = Vec::with_capacity(directions.len());
        for dir in &directions {
            rays.push(radial_integral(tuple, dir, x, phi, quad)?);
        }
        let finite = rays.iter().all(|r| r.finite);
        let estimate = rays.iter().map(|r| r.estimate).sum::<f64>() / rays.len() as f64;
        let tail_bound = if finite {
            rays.iter().map(|r| r.tail_bound).sum::<f64>() / rays.len() as f64
        } else {
            f64::INFINITY
        };
        per_vector.push(RolewiczVectorReport {
            finite,
            estimate,
            tail_bound,
            rays,
        });
    }
    let all_finite = per_vector.iter().all(|v| v.finite);
    let stability_verdicts_all_true = if all_finite {
        let report = stability_report(tuple, cone, quad.radial_span.max(20.0), cfg, seed)?;
        Some(report.verdicts.all_true())
    } else {
        None
    };
    Ok(RolewiczReport {
        per_vector,
        all_finite,
        stability_verdicts_all_true,
    })
}

/// Standard basis probes `e_1, ..., e_d`.
pub fn basis_probes(d: usize) -> Vec<Vec<Complex64>> {
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect()
}
