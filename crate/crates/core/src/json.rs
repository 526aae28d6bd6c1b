//! Wire formats: tuple, spectrum and cone JSON schemas with conversions to
//! the validated domain types. Complex scalars travel as `[re, im]` pairs;
//! matrices are flat row-major arrays.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, CommutingTuple, SpectrumPointSet, ToleranceConfig};
use crate::stability::Cone;

/// `{"n":int,"d":int,"matrices":[[[re,im],...],...]}`, each matrix a flat
/// row-major list of `d*d` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TupleJson {
    pub n: usize,
    pub d: usize,
    pub matrices: Vec<Vec<[f64; 2]>>,
}

impl TupleJson {
    pub fn from_tuple(tuple: &CommutingTuple) -> Self {
        let d = tuple.dim();
        let matrices = tuple
            .matrices()
            .iter()
            .map(|m| {
                let mut flat = Vec::with_capacity(d * d);
                for i in 0..d {
                    for j in 0..d {
                        let z = m.raw()[(i, j)];
                        flat.push([z.re, z.im]);
                    }
                }
                flat
            })
            .collect();
        Self {
            n: tuple.n(),
            d,
            matrices,
        }
    }

    pub fn to_tuple(&self, cfg: &ToleranceConfig) -> Result<CommutingTuple> {
        if self.d > 512 || self.n > 16 {
            return Err(Error::Validation(format!(
                "input of n = {}, d = {} exceeds the dense desk-scale design (n <= 16, d <= 512)",
                self.n, self.d
            )));
        }
        if self.matrices.len() != self.n {
            return Err(Error::Validation(format!(
                "header says n = {}, found {} matrices",
                self.n,
                self.matrices.len()
            )));
        }
        let mut mats = Vec::with_capacity(self.n);
        for flat in &self.matrices {
            if flat.len() != self.d * self.d {
                return Err(Error::Validation(format!(
                    "header says d = {}, matrix has {} entries",
                    self.d,
                    flat.len()
                )));
            }
            let entries: Vec<Complex64> = flat
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect();
            mats.push(ComplexMatrix::from_rows(self.d, &entries)?);
        }
        CommutingTuple::new(mats, cfg)
    }
}

/// Names of the computable spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumKind {
    #[serde(rename = "point")]
    Point,
    #[serde(rename = "sigma_a")]
    Approximate,
    #[serde(rename = "sigma_R")]
    Residual,
    #[serde(rename = "sigma_J")]
    Joint,
    #[serde(rename = "sigma_prime")]
    Commutant,
    #[serde(rename = "sigma_biprime")]
    Bicommutant,
    #[serde(rename = "shilov")]
    Shilov,
    #[serde(rename = "taylor")]
    Taylor,
}

impl SpectrumKind {
    pub const ALL: [SpectrumKind; 8] = [
        SpectrumKind::Point,
        SpectrumKind::Approximate,
        SpectrumKind::Residual,
        SpectrumKind::Joint,
        SpectrumKind::Commutant,
        SpectrumKind::Bicommutant,
        SpectrumKind::Shilov,
        SpectrumKind::Taylor,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SpectrumKind::Point => "point",
            SpectrumKind::Approximate => "sigma_a",
            SpectrumKind::Residual => "sigma_R",
            SpectrumKind::Joint => "sigma_J",
            SpectrumKind::Commutant => "sigma_prime",
            SpectrumKind::Bicommutant => "sigma_biprime",
            SpectrumKind::Shilov => "shilov",
            SpectrumKind::Taylor => "taylor",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .find(|k| k.as_str() == s)
            .copied()
            .ok_or_else(|| Error::Validation(format!("unknown spectrum kind '{s}'")))
    }
}

/// `{"kind":...,"points":[[[re,im],...],...],"multiplicities":[...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumJson {
    pub kind: SpectrumKind,
    pub points: Vec<Vec<[f64; 2]>>,
    pub multiplicities: Vec<usize>,
}

impl SpectrumJson {
    pub fn from_set(kind: SpectrumKind, set: &SpectrumPointSet) -> Self {
        Self {
            kind,
            points: set
                .points()
                .iter()
                .map(|p| p.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
            multiplicities: set.multiplicities().to_vec(),
        }
    }

    pub fn to_set(&self, dedup_tol: f64) -> Result<SpectrumPointSet> {
        if self.points.len() != self.multiplicities.len() {
            return Err(Error::Validation(
                "points and multiplicities differ in length".into(),
            ));
        }
        SpectrumPointSet::from_weighted(
            self.points
                .iter()
                .zip(&self.multiplicities)
                .map(|(p, &m)| {
                    (
                        p.iter()
                            .map(|&[re, im]| Complex64::new(re, im))
                            .collect::<Vec<_>>(),
                        m,
                    )
                }),
            dedup_tol,
        )
    }
}

/// `{"n":int,"rays":[[...],...],"sample_count":int}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeJson {
    pub n: usize,
    pub rays: Vec<Vec<f64>>,
    pub sample_count: usize,
}

impl ConeJson {
    pub fn from_cone(cone: &Cone) -> Self {
        Self {
            n: cone.n(),
            rays: cone.rays().to_vec(),
            sample_count: cone.sample_count(),
        }
    }

    pub fn to_cone(&self) -> Result<Cone> {
        if self.rays.iter().any(|r| r.len() != self.n) {
            return Err(Error::Validation(format!(
                "header says n = {}, found a ray of different dimension",
                self.n
            )));
        }
        Cone::new(self.rays.clone(), self.sample_count)
    }
}
