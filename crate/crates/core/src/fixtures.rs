//! Deterministic test fixtures shared by the suites and the CLI examples.
//!
//! F1 diagonal pair, F2 Jordan pair, F3 Hermitian pair, F4 seeded random
//! commuting tuples (polynomials of one random matrix, optionally
//! conjugated), F5 a five-point discretized multiplication pair whose joint
//! spectrum sits on the line `l1 + l2 = -1`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::bernstein::{BernsteinFunction, DiscreteMeasure};
use crate::error::Result;
use crate::linalg::{ComplexMatrix, CommutingTuple, ToleranceConfig};
use crate::rng::{stream_rng, Stream};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn tuple(mats: Vec<ComplexMatrix>) -> CommutingTuple {
    CommutingTuple::new(mats, &ToleranceConfig::default()).expect("fixture tuple commutes")
}

/// `(diag(-1,-2), diag(-3,-4))`.
pub fn f1() -> CommutingTuple {
    tuple(vec![
        ComplexMatrix::diagonal(&[c(-1.0, 0.0), c(-2.0, 0.0)]).unwrap(),
        ComplexMatrix::diagonal(&[c(-3.0, 0.0), c(-4.0, 0.0)]).unwrap(),
    ])
}

/// `(J, J^2)` with `J` the 2x2 Jordan block at -1.
pub fn f2() -> CommutingTuple {
    let j = ComplexMatrix::from_rows(2, &[c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
        .unwrap();
    let j2 = ComplexMatrix::new(j.raw() * j.raw()).unwrap();
    tuple(vec![j, j2])
}

/// `(sigma_x, 2 sigma_x + I)`, a Hermitian pair with shared eigenvectors.
pub fn f3() -> CommutingTuple {
    let sx =
        ComplexMatrix::from_rows(2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    let second = ComplexMatrix::new(sx.raw() * c(2.0, 0.0) + DMatrix::identity(2, 2)).unwrap();
    tuple(vec![sx, second])
}

/// Discretized two-parameter multiplication pair: grid `s_k = k/4`,
/// `A_1 = diag(-s_k)`, `A_2 = diag(s_k - 1)`.
pub fn f5() -> CommutingTuple {
    let s: Vec<f64> = (0..5).map(|k| k as f64 / 4.0).collect();
    tuple(vec![
        ComplexMatrix::diagonal(&s.iter().map(|&v| c(-v, 0.0)).collect::<Vec<_>>()).unwrap(),
        ComplexMatrix::diagonal(&s.iter().map(|&v| c(v - 1.0, 0.0)).collect::<Vec<_>>()).unwrap(),
    ])
}

/// Knobs for the seeded random commuting tuples.
#[derive(Debug, Clone, Copy)]
pub struct F4Options {
    pub n: usize,
    pub dim: usize,
    /// Hermitian members (Hermitian base matrix, real polynomial
    /// coefficients, unitary conjugation).
    pub hermitian: bool,
    /// Apply a mild similarity (or unitary, in the Hermitian case) transform.
    pub conjugate: bool,
    /// Shift each member so its spectrum satisfies `Re <= -margin`.
    pub stable_margin: Option<f64>,
}

impl F4Options {
    pub fn new(n: usize, dim: usize) -> Self {
        Self {
            n,
            dim,
            hermitian: false,
            conjugate: true,
            stable_margin: None,
        }
    }

    pub fn hermitian(mut self, yes: bool) -> Self {
        self.hermitian = yes;
        self
    }

    pub fn conjugate(mut self, yes: bool) -> Self {
        self.conjugate = yes;
        self
    }

    pub fn stable(mut self, margin: f64) -> Self {
        self.stable_margin = Some(margin);
        self
    }
}

fn random_matrix(d: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    DMatrix::from_fn(d, d, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Seeded random commuting tuple `(p_1(M), ..., p_n(M))` for a random base
/// matrix `M` and random polynomials of degree at most 3.
pub fn f4(seed: u64, index: u64, opts: &F4Options) -> Result<CommutingTuple> {
    let mut rng = stream_rng(seed, Stream::FixtureTuple, index);
    let d = opts.dim;
    let mut base = random_matrix(d, &mut rng);
    if opts.hermitian {
        base = (&base + base.adjoint()) * c(0.5, 0.0);
    }
    // normalize so polynomial powers stay O(1)
    base /= c(base.norm().max(1e-12), 0.0);

    let mut powers = vec![DMatrix::<Complex64>::identity(d, d)];
    for k in 1..=3 {
        let next = &powers[k - 1] * &base;
        powers.push(next);
    }

    let mut mats = Vec::with_capacity(opts.n);
    for _ in 0..opts.n {
        let mut a = DMatrix::<Complex64>::zeros(d, d);
        for p in &powers {
            let coeff = if opts.hermitian {
                c(rng.random_range(-1.0..1.0), 0.0)
            } else {
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            };
            a += p * coeff;
        }
        mats.push(a);
    }

    if let Some(margin) = opts.stable_margin {
        for a in &mut mats {
            let max_re = crate::linalg::eigenvalues(a)?
                .iter()
                .map(|z| z.re)
                .fold(f64::NEG_INFINITY, f64::max);
            let shift = max_re + margin;
            for i in 0..d {
                a[(i, i)] -= c(shift, 0.0);
            }
        }
    }

    if opts.conjugate {
        if opts.hermitian {
            let q = random_matrix(d, &mut rng).qr().q();
            for a in mats.iter_mut() {
                *a = q.adjoint() * &*a * &q;
            }
        } else {
            let g = random_matrix(d, &mut rng);
            let p = DMatrix::<Complex64>::identity(d, d) + &g * c(0.3 / g.norm().max(1e-12), 0.0);
            let p_inv = p.clone().try_inverse().expect("mild perturbation of I");
            for a in mats.iter_mut() {
                *a = &p_inv * &*a * &p;
            }
        }
    }

    let wrapped = mats
        .into_iter()
        .map(ComplexMatrix::new)
        .collect::<Result<Vec<_>>>()?;
    CommutingTuple::new(wrapped, &ToleranceConfig::default())
}

/// Seeded random Bernstein function of `n` variables with a handful of atoms.
///
/// `max_location` caps the atom coordinates, which bounds how far the
/// subordination machinery evaluates the semigroup.
pub fn seeded_bernstein(seed: u64, index: u64, n: usize, max_location: f64) -> BernsteinFunction {
    let mut rng = stream_rng(seed, Stream::FixturePsi, index);
    let c0 = -rng.random_range(0.0..1.0);
    let c1: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..0.5)).collect();
    let atom_count = rng.random_range(1..=3);
    let atoms: Vec<(Vec<f64>, f64)> = (0..atom_count)
        .map(|_| {
            let loc: Vec<f64> = (0..n)
                .map(|_| rng.random_range(0.05 * max_location..max_location))
                .collect();
            (loc, rng.random_range(0.1..1.0))
        })
        .collect();
    let mu = DiscreteMeasure::new(atoms).expect("positive weights, nonnegative locations");
    BernsteinFunction::new(c0, c1, mu).expect("structurally valid by construction")
}
