//! The multivariate Bernstein class with validation, the operator calculus
//! `psi(A)`, subordination measures via compound-Poisson truncation,
//! subordinated semigroup values, and spectral-mapping reports.

mod mapping;
mod measure;

pub use mapping::{spectral_mapping_report, ExponentialLawCheck, SpectralMappingReport};
pub use measure::{poisson_truncation_order, Atom, DiscreteMeasure, ATOM_CAP};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{semigroup_value, ComplexMatrix, CommutingTuple, ToleranceConfig};

/// Raw Bernstein-function data as it appears on the wire; may violate the
/// class constraints. [`validate`] reports on it, [`BernsteinFunction::new`]
/// enforces it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BernsteinData {
    pub c0: f64,
    pub c1: Vec<f64>,
    #[serde(default)]
    pub mu: Vec<BernsteinAtom>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BernsteinAtom {
    pub u: Vec<f64>,
    pub w: f64,
}

/// Bernstein function of `n` variables in integral-representation form
/// `psi(s) = c0 + c1 . s + sum_k w_k (e^{s . u_k} - 1)` with `c0 <= 0`,
/// `c1 >= 0` componentwise and strictly positive weights on nonzero atoms.
#[derive(Debug, Clone)]
pub struct BernsteinFunction {
    c0: f64,
    c1: Vec<f64>,
    mu: DiscreteMeasure,
}

impl BernsteinFunction {
    pub fn new(c0: f64, c1: Vec<f64>, mu: DiscreteMeasure) -> Result<Self> {
        if c0 > 0.0 || !c0.is_finite() {
            return Err(Error::Validation(format!(
                "c0 must be nonpositive and finite, got {c0}"
            )));
        }
        if c1.is_empty() {
            return Err(Error::Dimension("c1 must have at least one component".into()));
        }
        if let Some(bad) = c1.iter().find(|&&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::Validation(format!(
                "c1 must be componentwise nonnegative, got {bad}"
            )));
        }
        if mu.dim() != c1.len() {
            return Err(Error::Dimension(format!(
                "measure lives on R^{}, c1 on R^{}",
                mu.dim(),
                c1.len()
            )));
        }
        if mu.has_atom_near_zero(0.0) {
            return Err(Error::Validation(
                "the representing measure must not charge the origin".into(),
            ));
        }
        Ok(Self { c0, c1, mu })
    }

    /// Drift-free single-atom function `psi(s) = w (e^{s . u} - 1)`.
    pub fn single_atom(u: Vec<f64>, w: f64) -> Result<Self> {
        let n = u.len();
        Self::new(0.0, vec![0.0; n], DiscreteMeasure::new(vec![(u, w)])?)
    }

    /// Pure drift `psi(s) = c1 . s`.
    pub fn drift(c1: Vec<f64>) -> Result<Self> {
        let n = c1.len();
        Self::new(0.0, c1, DiscreteMeasure::empty(n))
    }

    pub fn from_data(data: &BernsteinData) -> Result<Self> {
        let mu = if data.mu.is_empty() {
            DiscreteMeasure::empty(data.c1.len())
        } else {
            DiscreteMeasure::new(data.mu.iter().map(|a| (a.u.clone(), a.w)).collect())?
        };
        Self::new(data.c0, data.c1.clone(), mu)
    }

    pub fn to_data(&self) -> BernsteinData {
        BernsteinData {
            c0: self.c0,
            c1: self.c1.clone(),
            mu: self
                .mu
                .atoms()
                .iter()
                .map(|a| BernsteinAtom {
                    u: a.location.clone(),
                    w: a.weight,
                })
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.c1.len()
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn c1(&self) -> &[f64] {
        &self.c1
    }

    pub fn mu(&self) -> &DiscreteMeasure {
        &self.mu
    }

    pub fn has_drift(&self) -> bool {
        self.c1.iter().any(|&x| x > 0.0)
    }
}

fn raw_evaluate(c0: f64, c1: &[f64], mu: &[(Vec<f64>, f64)], s: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(c0, 0.0);
    for (cj, sj) in c1.iter().zip(s) {
        acc += sj * *cj;
    }
    for (u, w) in mu {
        let dot: Complex64 = s.iter().zip(u).map(|(z, &x)| z * x).sum();
        acc += (dot.exp() - 1.0) * *w;
    }
    acc
}

/// Evaluates `psi` on the closed left half-space `Re s <= 0` (the
/// representation extends continuously to the boundary).
pub fn evaluate_psi(psi: &BernsteinFunction, s: &[Complex64]) -> Result<Complex64> {
    if s.len() != psi.n() {
        return Err(Error::Dimension(format!(
            "argument has {} components, function has {}",
            s.len(),
            psi.n()
        )));
    }
    if let Some(bad) = s.iter().find(|z| z.re > 0.0 || !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Domain(format!(
            "psi is defined for Re s <= 0, got {bad}"
        )));
    }
    let mu: Vec<(Vec<f64>, f64)> = psi
        .mu
        .atoms()
        .iter()
        .map(|a| (a.location.clone(), a.weight))
        .collect();
    Ok(raw_evaluate(psi.c0, &psi.c1, &mu, s))
}

/// `psi(A) = c0 I + sum_j c1^j A_j + sum_k w_k (T(u_k) - I)`.
pub fn psi_of_tuple(psi: &BernsteinFunction, tuple: &CommutingTuple) -> Result<ComplexMatrix> {
    if psi.n() != tuple.n() {
        return Err(Error::Dimension(format!(
            "function of {} variables applied to a {}-tuple",
            psi.n(),
            tuple.n()
        )));
    }
    let d = tuple.dim();
    let id = DMatrix::<Complex64>::identity(d, d);
    let mut acc = &id * Complex64::new(psi.c0, 0.0);
    for (cj, a) in psi.c1.iter().zip(tuple.matrices()) {
        acc += a.raw() * Complex64::new(*cj, 0.0);
    }
    for atom in psi.mu.atoms() {
        let t = semigroup_value(tuple, &atom.location)?;
        acc += (t.raw() - &id) * Complex64::new(atom.weight, 0.0);
    }
    ComplexMatrix::new(acc)
}

/// Limit of `psi(s)` as every component goes to `-inf`: `-inf` when a drift
/// is present, otherwise `c0` minus the total mass of the measure.
pub fn psi_at_minus_infinity(psi: &BernsteinFunction) -> f64 {
    if psi.has_drift() {
        f64::NEG_INFINITY
    } else {
        psi.c0 - psi.mu.total_mass()
    }
}

/// Subordination measure `nu_t` via the compound-Poisson expansion
/// `e^{t(c0 - W)} sum_{m<=M} (t^m/m!) mu^{*m}`, all atoms shifted by `t c1`,
/// with `M` the minimal order keeping the Poisson tail below `eta`.
pub fn subordinate_measure(
    psi: &BernsteinFunction,
    t: f64,
    eta: f64,
    cfg: &ToleranceConfig,
) -> Result<DiscreteMeasure> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!(
            "subordination time must be nonnegative, got {t}"
        )));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::Domain(format!(
            "tail tolerance must be strictly positive, got {eta}"
        )));
    }
    let n = psi.n();
    let mass = psi.mu.total_mass();
    let order = poisson_truncation_order(t * mass, eta)?;
    let prefactor = (t * (psi.c0 - mass)).exp();
    let drift: Vec<f64> = psi.c1.iter().map(|&x| t * x).collect();

    let mut atoms: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut conv = DiscreteMeasure::dirac(vec![0.0; n]);
    let mut coeff = 1.0f64; // t^m / m!
    for m in 0..=order {
        if m > 0 {
            conv = conv.convolve(&psi.mu, cfg.tau_dedup)?;
            coeff *= t / m as f64;
        }
        for atom in conv.atoms() {
            let location: Vec<f64> = atom.location.iter().zip(&drift).map(|(x, o)| x + o).collect();
            atoms.push((location, prefactor * coeff * atom.weight));
        }
    }
    Ok(DiscreteMeasure::new(atoms)?.merged(cfg.tau_dedup))
}

/// Subordinated semigroup value `g_t(A) = integral of T(u) d nu_t(u)`,
/// equal to `exp(t psi(A))` up to the truncation error.
pub fn subordinate_semigroup_value(
    psi: &BernsteinFunction,
    tuple: &CommutingTuple,
    t: f64,
    eta: f64,
    cfg: &ToleranceConfig,
) -> Result<ComplexMatrix> {
    if psi.n() != tuple.n() {
        return Err(Error::Dimension(format!(
            "function of {} variables applied to a {}-tuple",
            psi.n(),
            tuple.n()
        )));
    }
    let nu = subordinate_measure(psi, t, eta, cfg)?;
    let d = tuple.dim();
    let mut acc = DMatrix::<Complex64>::zeros(d, d);
    for atom in nu.atoms() {
        let tv = semigroup_value(tuple, &atom.location)?;
        acc += tv.raw() * Complex64::new(atom.weight, 0.0);
    }
    ComplexMatrix::new(acc)
}

/// Probe lattice for the absolute-monotonicity redundancy checks: per-axis
/// values `steps` points from `start` to `end`, all strictly negative.
#[derive(Debug, Clone, Copy)]
pub struct ProbeGrid {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Default for ProbeGrid {
    fn default() -> Self {
        Self {
            start: -3.0,
            end: -0.4,
            steps: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.passed &= passed;
        self.checks.push(ValidationCheck {
            name: name.to_string(),
            passed,
            detail,
        });
    }
}

/// Validates raw Bernstein data: structural constraints plus sampled
/// nonpositivity and absolute-monotonicity probes on the grid. The
/// structural form already implies class membership; the probes guard
/// against constructor misuse.
pub fn validate(data: &BernsteinData, grid: &ProbeGrid) -> ValidationReport {
    let mut report = ValidationReport {
        passed: true,
        checks: Vec::new(),
    };
    let n = data.c1.len();

    report.push(
        "c0_nonpositive",
        data.c0 <= 0.0 && data.c0.is_finite(),
        format!("c0 = {}", data.c0),
    );
    let c1_ok = !data.c1.is_empty()
        && data.c1.iter().all(|&x| x >= 0.0 && x.is_finite());
    report.push("c1_nonnegative", c1_ok, format!("c1 = {:?}", data.c1));
    let weights_ok = data.mu.iter().all(|a| a.w > 0.0 && a.w.is_finite());
    report.push(
        "weights_positive",
        weights_ok,
        format!("{} atoms", data.mu.len()),
    );
    let locations_ok = data.mu.iter().all(|a| {
        a.u.len() == n
            && a.u.iter().all(|&x| x >= 0.0 && x.is_finite())
            && a.u.iter().any(|&x| x > 0.0)
    });
    report.push(
        "locations_in_positive_orthant_nonzero",
        locations_ok,
        String::new(),
    );

    if !(report.passed && n > 0) {
        // probes need structurally sane data
        return report;
    }

    let mu: Vec<(Vec<f64>, f64)> = data.mu.iter().map(|a| (a.u.clone(), a.w)).collect();
    let eval = |s: &[f64]| -> f64 {
        let sc: Vec<Complex64> = s.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        raw_evaluate(data.c0, &data.c1, &mu, &sc).re
    };
    let scale = 1.0
        + data.c0.abs()
        + data.c1.iter().sum::<f64>()
        + data.mu.iter().map(|a| a.w).sum::<f64>();
    let tol = 1e-10 * scale;

    // axis lattice, capped so high-dimensional grids stay small
    let steps = grid.steps.clamp(2, 6);
    let axis: Vec<f64> = (0..steps)
        .map(|i| grid.start + (grid.end - grid.start) * i as f64 / (steps - 1) as f64)
        .collect();
    if axis.iter().any(|&x| x >= 0.0) {
        report.push("grid_in_domain", false, "probe grid must be negative".into());
        return report;
    }
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for stem in &points {
            for &x in &axis {
                let mut p = stem.clone();
                p.push(x);
                next.push(p);
            }
        }
        points = next;
        if points.len() > 4096 {
            points.truncate(4096);
        }
    }

    let h = 0.05;
    let mut worst_nonpos = f64::NEG_INFINITY;
    let mut worst_monotone = f64::INFINITY;
    for p in &points {
        worst_nonpos = worst_nonpos.max(eval(p));
        for j in 0..n {
            for k in 0..n {
                // iterated forward differences of the j-th first partial
                // along axis k, orders 0..=3; all must be nonnegative
                let partial = |s: &[f64]| -> f64 {
                    let mut sp = s.to_vec();
                    sp[j] += h;
                    (eval(&sp) - eval(s)) / h
                };
                let mut values = [0.0f64; 4];
                for (step, v) in values.iter_mut().enumerate() {
                    let mut sp = p.clone();
                    sp[k] += h * step as f64;
                    *v = partial(&sp);
                }
                let d1 = [values[1] - values[0], values[2] - values[1], values[3] - values[2]];
                let d2 = [d1[1] - d1[0], d1[2] - d1[1]];
                let d3 = d2[1] - d2[0];
                for v in values.iter().chain(d1.iter()).chain(d2.iter()).chain([&d3]) {
                    worst_monotone = worst_monotone.min(*v);
                }
            }
        }
    }
    report.push(
        "sampled_nonpositivity",
        worst_nonpos <= tol,
        format!("max psi over grid = {worst_nonpos:.3e}"),
    );
    report.push(
        "sampled_absolute_monotonicity",
        worst_monotone >= -tol,
        format!("min probe difference = {worst_monotone:.3e}"),
    );
    report
}
