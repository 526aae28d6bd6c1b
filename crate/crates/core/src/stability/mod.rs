//! Multiparameter-semigroup stability on cones: the Shilov spectral bound,
//! the spectral-radius log law, the ten-way equivalence battery, the
//! Rolewicz integral criterion, strong-stability conditions, and the cascade
//! Cauchy simulator.

mod cascade;
mod rolewicz;
mod strong;

pub use cascade::{cascade_solve, CascadeSolution, GridSpec};
pub use rolewicz::{
    basis_probes, rolewicz_check, PhiFunction, QuadratureConfig, RayIntegral, RolewiczReport,
    RolewiczVectorReport,
};
pub use strong::{strong_stability_conditions, RayStrongReport, StrongStabilityReport};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    eigenvalues, joint_eigenvalues, numerical_rank_raw, semigroup_value, CommutingTuple,
    ToleranceConfig,
};
use crate::rng::{stream_rng, Stream};
use crate::spectra::shilov_spectrum;

/// Closed cone in `(0, inf)^n + {0}` spanned by strictly positive unit rays.
#[derive(Debug, Clone)]
pub struct Cone {
    rays: Vec<Vec<f64>>,
    sample_count: usize,
}

impl Cone {
    /// Normalizes the rays to unit Euclidean length; every component must be
    /// strictly positive (rays touching the boundary of the orthant are
    /// rejected).
    pub fn new(rays: Vec<Vec<f64>>, sample_count: usize) -> Result<Self> {
        let first = rays
            .first()
            .ok_or_else(|| Error::Dimension("cone needs at least one ray".into()))?;
        let n = first.len();
        if n == 0 {
            return Err(Error::Dimension("rays must have positive dimension".into()));
        }
        if sample_count == 0 || sample_count > 100_000 {
            return Err(Error::Validation(format!(
                "sample_count must be between 1 and 100000, got {sample_count}"
            )));
        }
        let mut unit = Vec::with_capacity(rays.len());
        for ray in &rays {
            if ray.len() != n {
                return Err(Error::Dimension(format!(
                    "ray dimension {} differs from {n}",
                    ray.len()
                )));
            }
            if ray.iter().any(|&x| x <= 0.0 || !x.is_finite()) {
                return Err(Error::Validation(format!(
                    "cone ray touches the boundary of the positive orthant: {ray:?}"
                )));
            }
            let norm = ray.iter().map(|x| x * x).sum::<f64>().sqrt();
            unit.push(ray.iter().map(|x| x / norm).collect());
        }
        Ok(Self {
            rays: unit,
            sample_count,
        })
    }

    pub fn n(&self) -> usize {
        self.rays[0].len()
    }

    pub fn rays(&self) -> &[Vec<f64>] {
        &self.rays
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    /// Unit directions on the cone: the generating rays first, then
    /// Dirichlet-weighted convex combinations up to `sample_count`.
    pub fn sample_directions(&self, seed: u64) -> Vec<Vec<f64>> {
        let mut dirs = self.rays.clone();
        let mut rng = stream_rng(seed, Stream::ConeSampling, 0);
        while dirs.len() < self.sample_count.max(self.rays.len()) {
            let weights: Vec<f64> = (0..self.rays.len())
                .map(|_| -(1.0 - rng.random::<f64>()).ln())
                .collect();
            let total: f64 = weights.iter().sum();
            if total <= 0.0 {
                continue;
            }
            let mut v = vec![0.0; self.n()];
            for (w, ray) in weights.iter().zip(&self.rays) {
                for (vi, ri) in v.iter_mut().zip(ray) {
                    *vi += w / total * ri;
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            dirs.push(v.into_iter().map(|x| x / norm).collect());
        }
        dirs
    }

    /// Membership test for two-dimensional cones, by polar angle.
    pub(crate) fn contains_2d(&self, v: &[f64]) -> Result<bool> {
        if self.n() != 2 {
            return Err(Error::Dimension(
                "angular membership test requires a 2-dimensional cone".into(),
            ));
        }
        if v.len() != 2 {
            return Err(Error::Dimension("point must be 2-dimensional".into()));
        }
        if v[0] == 0.0 && v[1] == 0.0 {
            return Ok(true);
        }
        if v[0] < 0.0 || v[1] < 0.0 {
            return Ok(false);
        }
        let angle = v[1].atan2(v[0]);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for ray in &self.rays {
            let a = ray[1].atan2(ray[0]);
            lo = lo.min(a);
            hi = hi.max(a);
        }
        Ok(angle >= lo - 1e-12 && angle <= hi + 1e-12)
    }
}

/// Shilov spectral bound `s(A) = max over the Shilov spectrum of sum_j Re
/// lambda_j`.
pub fn shilov_spectral_bound(
    tuple: &CommutingTuple,
    cfg: &ToleranceConfig,
    seed: u64,
) -> Result<f64> {
    let spectrum = shilov_spectrum(tuple, cfg, seed)?;
    Ok(spectrum
        .points()
        .iter()
        .map(|p| p.iter().map(|z| z.re).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Spectral radius of `T(u)` together with the log law
/// `log r(T(u)) = max over the joint spectrum of u . Re lambda`, which is
/// checked to `1e-8 (1 + |u|)` and reported.
#[derive(Debug, Clone, Serialize)]
pub struct RadiusCheck {
    pub radius: f64,
    pub log_law_residual: f64,
    pub log_law_bound: f64,
}

pub fn spectral_radius_at(
    tuple: &CommutingTuple,
    u: &[f64],
    cfg: &ToleranceConfig,
    seed: u64,
) -> Result<RadiusCheck> {
    let value = semigroup_value(tuple, u)?;
    let radius = eigenvalues(value.raw())?
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    let spectrum = joint_eigenvalues(tuple, cfg, seed)?;
    let law = spectrum
        .points()
        .iter()
        .map(|p| p.iter().zip(u).map(|(z, &uj)| uj * z.re).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let u_norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let bound = 1e-8 * (1.0 + u_norm);
    let residual = (radius.ln() - law).abs();
    if residual > bound {
        return Err(Error::NonConvergence(format!(
            "spectral-radius log law violated: |log r - max u.Re lambda| = {residual:.3e} > {bound:.3e}"
        )));
    }
    Ok(RadiusCheck {
        radius,
        log_law_residual: residual,
        log_law_bound: bound,
    })
}

/// Least-squares line fit `y ~ intercept + slope x`.
pub(crate) fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    debug_assert_eq!(xs.len(), ys.len());
    let k = xs.len() as f64;
    if xs.len() < 2 {
        return (ys.first().copied().unwrap_or(0.0), 0.0);
    }
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return (my, 0.0);
    }
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

pub(crate) fn operator_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0f64, f64::max)
}

/// Geometric grid of `count` nodes spanning `[t_max/1000, t_max]`.
pub(crate) fn geometric_grid(t_max: f64, count: usize) -> Vec<f64> {
    let t_min = t_max * 1e-3;
    let ratio = (t_max / t_min).powf(1.0 / (count - 1) as f64);
    (0..count).map(|i| t_min * ratio.powi(i as i32)).collect()
}

/// Rejects tuples that do not generate a bounded semigroup: members must
/// have spectrum in the closed left half-plane with semisimple
/// imaginary-axis eigenvalues.
pub fn bounded_semigroup_check(tuple: &CommutingTuple, cfg: &ToleranceConfig) -> Result<()> {
    let scale = tuple.threshold_scale();
    for (j, a) in tuple.matrices().iter().enumerate() {
        let evs = eigenvalues(a.raw())?;
        for &ev in &evs {
            if ev.re > 1e-9 * scale {
                return Err(Error::Validation(format!(
                    "bounded-semigroup precondition failed: A_{} has eigenvalue {ev} with positive real part",
                    j + 1
                )));
            }
            if ev.re.abs() <= 1e-9 * scale {
                // defective imaginary-axis eigenvalues give polynomial growth
                let algebraic = evs
                    .iter()
                    .filter(|&&other| (other - ev).norm() <= cfg.tau_dedup)
                    .count();
                let mut shifted = a.raw().clone();
                for i in 0..tuple.dim() {
                    shifted[(i, i)] -= ev;
                }
                let geometric = tuple.dim() - numerical_rank_raw(&shifted, cfg.tau_rank);
                if geometric < algebraic {
                    return Err(Error::Validation(format!(
                        "bounded-semigroup precondition failed: A_{} has a defective imaginary-axis eigenvalue {ev}",
                        j + 1
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Decay data of one ray: norms of `T(tau g)` on a geometric grid, where `g`
/// is the direction rescaled to unit max-coordinate, and the log-linear fit
/// over the trailing half of the grid.
#[derive(Debug, Clone, Serialize)]
pub struct RayDecayFit {
    /// Unit (Euclidean) direction on the cone.
    pub direction: Vec<f64>,
    /// Fitted decay rate per unit of the max-normalized ray parameter.
    pub rate: f64,
    pub intercept: f64,
    pub initial_norm: f64,
    pub final_norm: f64,
    /// `(tau, ‖T(tau g)‖)` samples.
    pub samples: Vec<(f64, f64)>,
}

impl RayDecayFit {
    /// Empirical uniform stability on the ray.
    pub fn decays(&self) -> bool {
        let vanished = self.final_norm <= 1e-3 * self.initial_norm.max(1.0);
        vanished && (self.rate < 0.0 || self.final_norm == 0.0)
    }
}

/// Verdicts of the ten equivalent stability statements.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StabilityVerdicts {
    /// (1) `r(T(u)) < 1` for every sampled interior `u`.
    pub radius_all: bool,
    /// (2) `r(T(u)) < 1` for some sampled `u`.
    pub radius_some: bool,
    /// (3) `s(A) < 0`.
    pub negative_shilov_bound: bool,
    /// (4) uniform stability on every sampled ray.
    pub ray_uniform_all: bool,
    /// (5) uniform stability on some sampled ray.
    pub ray_uniform_some: bool,
    /// (6) uniform stability on the cone.
    pub cone_uniform_all: bool,
    /// (7) uniform stability on some cone (witnessed by this one).
    pub cone_uniform_some: bool,
    /// (8) uniform exponential stability on the cone.
    pub cone_uniform_exponential: bool,
    /// (9) strong exponential stability on the cone.
    pub strong_exponential: bool,
    /// (10) `‖T(u)‖ <= M_K e^{omega_K |u|}` with fitted `omega_K < 0`.
    pub exponential_norm_bound: bool,
}

impl StabilityVerdicts {
    pub fn as_array(&self) -> [bool; 10] {
        [
            self.radius_all,
            self.radius_some,
            self.negative_shilov_bound,
            self.ray_uniform_all,
            self.ray_uniform_some,
            self.cone_uniform_all,
            self.cone_uniform_some,
            self.cone_uniform_exponential,
            self.strong_exponential,
            self.exponential_norm_bound,
        ]
    }

    pub fn all_true(&self) -> bool {
        self.as_array().iter().all(|&v| v)
    }

    pub fn all_equal(&self) -> bool {
        let a = self.as_array();
        a.iter().all(|&v| v == a[0])
    }
}

/// Full stability report for a tuple on a cone.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub s_bound: f64,
    /// `(direction, r(T(direction)))` per sampled unit direction.
    pub radii: Vec<(Vec<f64>, f64)>,
    pub fitted_rates: Vec<RayDecayFit>,
    pub verdicts: StabilityVerdicts,
    /// Fitted exponential-bound certificate `(M_K, omega)` against the
    /// Euclidean length `|v|`.
    pub exponential_bound: (f64, f64),
    /// None when the ten verdicts agree; otherwise a numeric dump of the
    /// disagreeing checks.
    pub counterexample: Option<String>,
}

impl StabilityReport {
    pub fn consistent(&self) -> bool {
        self.counterexample.is_none()
    }

    /// Conservative uniform-exponential certificate: half the fitted decay
    /// rate, or zero when no decay was certified.
    pub fn epsilon_certificate(&self) -> f64 {
        if self.exponential_bound.1 < 0.0 {
            self.exponential_bound.1.abs() / 2.0
        } else {
            0.0
        }
    }
}

/// Evaluates the ten-way stability battery on the sampled cone directions
/// with horizon `t_max`.
pub fn stability_report(
    tuple: &CommutingTuple,
    cone: &Cone,
    t_max: f64,
    cfg: &ToleranceConfig,
    seed: u64,
) -> Result<StabilityReport> {
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

    let directions = cone.sample_directions(seed);
    let s_bound = shilov_spectral_bound(tuple, cfg, seed)?;

    // (1)/(2): spectral radii on the sampled directions
    let mut radii = Vec::with_capacity(directions.len());
    for u in &directions {
        let check = spectral_radius_at(tuple, u, cfg, seed)?;
        radii.push((u.clone(), check.radius));
    }
    let radius_all = radii.iter().all(|(_, r)| *r < 1.0);
    let radius_some = radii.iter().any(|(_, r)| *r < 1.0);

    // (4)-(10): decay along rays, parameterized by the max-normalized
    // generator so closed-form diagonal rates come out on the nose
    let grid = geometric_grid(t_max, 64);
    let mut fits = Vec::with_capacity(directions.len());
    for u in &directions {
        let max_coord = u.iter().cloned().fold(0.0f64, f64::max);
        let g: Vec<f64> = u.iter().map(|x| x / max_coord).collect();
        let mut samples = Vec::with_capacity(grid.len());
        for &tau in &grid {
            let v: Vec<f64> = g.iter().map(|x| x * tau).collect();
            let norm = operator_norm(semigroup_value(tuple, &v)?.raw());
            samples.push((tau, norm));
        }
        // fit over the trailing half of the positive samples, so full
        // underflow at the far end cannot empty the window
        let positive: Vec<(f64, f64)> = samples
            .iter()
            .filter(|(_, nrm)| *nrm > 1e-290)
            .cloned()
            .collect();
        let tail: Vec<(f64, f64)> = positive
            .iter()
            .skip(positive.len() / 2)
            .cloned()
            .collect();
        let xs: Vec<f64> = tail.iter().map(|(t, _)| *t).collect();
        let ys: Vec<f64> = tail.iter().map(|(_, nrm)| nrm.ln()).collect();
        let (intercept, rate) = fit_line(&xs, &ys);
        fits.push(RayDecayFit {
            direction: u.clone(),
            rate,
            intercept,
            initial_norm: samples.first().map(|&(_, v)| v).unwrap_or(0.0),
            final_norm: samples.last().map(|&(_, v)| v).unwrap_or(0.0),
            samples,
        });
    }
    let ray_uniform_all = fits.iter().all(|f| f.decays());
    let ray_uniform_some = fits.iter().any(|f| f.decays());
    // uniform over the cone: the worst final norm over the sampled rays
    let worst_final = fits.iter().map(|f| f.final_norm).fold(0.0f64, f64::max);
    let worst_initial = fits
        .iter()
        .map(|f| f.initial_norm)
        .fold(1.0f64, f64::max);
    let cone_uniform_all = ray_uniform_all && worst_final <= 1e-3 * worst_initial;
    let cone_uniform_some = cone_uniform_all;

    // exponential certificate against Euclidean length: tau |g| = |v|
    let omega_euclid = fits
        .iter()
        .map(|f| {
            let g_norm = {
                let max_coord = f.direction.iter().cloned().fold(0.0f64, f64::max);
                f.direction.iter().map(|x| (x / max_coord).powi(2)).sum::<f64>().sqrt()
            };
            f.rate / g_norm
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let mut m_k = 0.0f64;
    for f in &fits {
        let max_coord = f.direction.iter().cloned().fold(0.0f64, f64::max);
        let g_norm = f
            .direction
            .iter()
            .map(|x| (x / max_coord).powi(2))
            .sum::<f64>()
            .sqrt();
        for &(tau, norm) in &f.samples {
            // log space: the compensating exponential overflows on its own
            if norm > 1e-290 {
                m_k = m_k.max((norm.ln() - omega_euclid * tau * g_norm).exp());
            }
        }
    }
    let cone_uniform_exponential = omega_euclid < 0.0 && m_k.is_finite();
    let exponential_norm_bound = cone_uniform_exponential;

    // (9) strong exponential stability, probed on basis vectors
    let d = tuple.dim();
    let mut strong_exponential = true;
    'rays: for u in &directions {
        let max_coord = u.iter().cloned().fold(0.0f64, f64::max);
        let v: Vec<f64> = u.iter().map(|x| x / max_coord * t_max).collect();
        let tv = semigroup_value(tuple, &v)?;
        for i in 0..d {
            let col_norm = tv.raw().column(i).norm();
            if col_norm > 1e-3 {
                strong_exponential = false;
                break 'rays;
            }
        }
    }

    let verdicts = StabilityVerdicts {
        radius_all,
        radius_some,
        negative_shilov_bound: s_bound < 0.0,
        ray_uniform_all,
        ray_uniform_some,
        cone_uniform_all,
        cone_uniform_some,
        cone_uniform_exponential,
        strong_exponential,
        exponential_norm_bound,
    };
    let counterexample = if verdicts.all_equal() {
        None
    } else {
        Some(format!(
            "verdicts disagree: {:?}; s(A) = {s_bound:.6e}, radii = {:?}, rates = {:?}",
            verdicts.as_array(),
            radii.iter().map(|(_, r)| *r).collect::<Vec<_>>(),
            fits.iter().map(|f| f.rate).collect::<Vec<_>>()
        ))
    };

    Ok(StabilityReport {
        s_bound,
        radii,
        fitted_rates: fits,
        verdicts,
        exponential_bound: (m_k, omega_euclid),
        counterexample,
    })
}

/// Samples `count` points of the cone (directions scaled by `t_max`-bounded
/// radii), for sequence-decay checks.
pub fn sample_cone_points(
    cone: &Cone,
    t_max: f64,
    count: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    let dirs = cone.sample_directions(seed);
    let mut rng = stream_rng(seed, Stream::ConeSampling, 1);
    (0..count)
        .map(|_| {
            let dir = &dirs[rng.random_range(0..dirs.len())];
            let t: f64 = rng.random_range(0.5 * t_max..t_max);
            dir.iter().map(|x| x * t).collect()
        })
        .collect()
}
