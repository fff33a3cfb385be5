use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::density::{hermitian_eigenvalues, FockDensityMatrix, SectorLayout};
use crate::error::{Error, Result};

/// Joint photon-number distribution on `[0, cutoff]^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointNumberDistribution {
    pub cutoff: usize,
    /// Row-major, `P(n1, n2)` at `n1 * (cutoff + 1) + n2`.
    pub probs: Vec<f64>,
    /// Probability outside the window.
    pub tail_mass: f64,
}

impl JointNumberDistribution {
    pub fn new(cutoff: usize, probs: Vec<f64>) -> Result<Self> {
        let d = cutoff + 1;
        if probs.len() != d * d {
            return Err(Error::Config(format!(
                "expected {} probabilities for cutoff {cutoff}, got {}",
                d * d,
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= -1e-12) || !p.is_finite()) {
            return Err(Error::Domain(format!("invalid probability {p}")));
        }
        let probs: Vec<f64> = probs.into_iter().map(|p| p.max(0.0)).collect();
        let tail_mass = (1.0 - probs.iter().sum::<f64>()).max(0.0);
        Ok(Self {
            cutoff,
            probs,
            tail_mass,
        })
    }

    pub fn point_mass(n1: usize, n2: usize) -> Self {
        let cutoff = n1.max(n2);
        let d = cutoff + 1;
        let mut probs = vec![0.0; d * d];
        probs[n1 * d + n2] = 1.0;
        Self {
            cutoff,
            probs,
            tail_mass: 0.0,
        }
    }

    pub fn from_density(rho: &FockDensityMatrix) -> Self {
        let n = rho.cutoff();
        let probs = (0..=n)
            .flat_map(|i| (0..=n).map(move |j| (i, j)))
            .map(|(i, j)| rho.population(i, j).max(0.0))
            .collect();
        Self {
            cutoff: n,
            probs,
            tail_mass: rho.tail_mass(),
        }
    }

    pub fn get(&self, n1: usize, n2: usize) -> f64 {
        if n1 > self.cutoff || n2 > self.cutoff {
            return 0.0;
        }
        self.probs[n1 * (self.cutoff + 1) + n2]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Distribution after each particle is independently kept with
    /// probability `eta`.
    pub fn thinned(&self, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::Domain(format!("efficiency must lie in (0, 1], got {eta}")));
        }
        let d = self.cutoff + 1;
        // b[(n, k)] = C(n, k) eta^k (1 - eta)^(n - k)
        let mut b = DMatrix::<f64>::zeros(d, d);
        b[(0, 0)] = 1.0;
        for n in 1..d {
            for k in 0..=n {
                let stay = if k <= n - 1 { b[(n - 1, k)] * (1.0 - eta) } else { 0.0 };
                let kept = if k > 0 { b[(n - 1, k - 1)] * eta } else { 0.0 };
                b[(n, k)] = stay + kept;
            }
        }
        let p = DMatrix::from_row_slice(d, d, &self.probs);
        let out = b.transpose() * p * &b;
        let probs = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| out[(i, j)])
            .collect();
        Ok(Self {
            cutoff: self.cutoff,
            probs,
            tail_mass: self.tail_mass,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumberMoments {
    pub n1: f64,
    pub n2: f64,
    pub g2_12: f64,
    pub g4_12: f64,
    pub g2_1: f64,
    pub g2_2: f64,
}

/// Normalised factorial moments of a joint distribution (renormalised to
/// the probability inside the window).
pub fn number_moments(dist: &JointNumberDistribution) -> Result<NumberMoments> {
    let mut sums = [0.0f64; 6];
    for i in 0..=dist.cutoff {
        let fi = i as f64;
        for j in 0..=dist.cutoff {
            let p = dist.get(i, j);
            if p == 0.0 {
                continue;
            }
            let fj = j as f64;
            sums[0] += p;
            sums[1] += p * fi;
            sums[2] += p * fj;
            sums[3] += p * fi * fj;
            sums[4] += p * fi * (fi - 1.0) * fj * (fj - 1.0);
            sums[5] += p * fi * (fi - 1.0);
        }
    }
    let mut second2 = 0.0;
    for i in 0..=dist.cutoff {
        for j in 2..=dist.cutoff {
            let fj = j as f64;
            second2 += dist.get(i, j) * fj * (fj - 1.0);
        }
    }
    let z = sums[0];
    if !(z > 0.0) {
        return Err(Error::Domain("empty distribution".into()));
    }
    let n1 = sums[1] / z;
    let n2 = sums[2] / z;
    if !(n1 > 0.0 && n2 > 0.0) {
        return Err(Error::Domain(format!(
            "mean populations must be positive, got {n1}, {n2}"
        )));
    }
    Ok(NumberMoments {
        n1,
        n2,
        g2_12: sums[3] / z / (n1 * n2),
        g4_12: sums[4] / z / (n1 * n1 * n2 * n2),
        g2_1: sums[5] / z / (n1 * n1),
        g2_2: second2 / z / (n2 * n2),
    })
}

/// Second-order field moments read off a density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldMoments {
    pub n1: f64,
    pub n2: f64,
    /// `<a1 a2>`
    pub pair: Complex64,
    /// `<a1 a2^dag>`
    pub coherence: Complex64,
    pub a1_sq: Complex64,
    pub a2_sq: Complex64,
}

/// `Tr(rho A) / Tr(rho)` for the field operators, with
/// `Tr(rho A) = sum rho_xy <y|A|x>`.
pub fn field_moments(rho: &FockDensityMatrix) -> FieldMoments {
    let n = rho.cutoff();
    let zero = Complex64::new(0.0, 0.0);
    let (mut n1, mut n2) = (0.0, 0.0);
    let (mut pair, mut coh, mut s1, mut s2) = (zero, zero, zero, zero);
    for i in 0..=n {
        for j in 0..=n {
            let p = rho.population(i, j);
            n1 += p * i as f64;
            n2 += p * j as f64;
            let (fi, fj) = ((i + 1) as f64, (j + 1) as f64);
            // a1 a2 |i+1, j+1> = sqrt((i+1)(j+1)) |i, j>
            pair += rho.get((i + 1, j + 1), (i, j)) * (fi * fj).sqrt();
            // a1 a2^dag |i+1, j> = sqrt((i+1)(j+1)) |i, j+1>
            coh += rho.get((i + 1, j), (i, j + 1)) * (fi * fj).sqrt();
            let f2i = ((i + 1) * (i + 2)) as f64;
            let f2j = ((j + 1) * (j + 2)) as f64;
            s1 += rho.get((i + 2, j), (i, j)) * f2i.sqrt();
            s2 += rho.get((i, j + 2), (i, j)) * f2j.sqrt();
        }
    }
    let tr = rho.trace();
    let z = Complex64::new(1.0 / tr, 0.0);
    FieldMoments {
        n1: n1 / tr,
        n2: n2 / tr,
        pair: pair * z,
        coherence: coh * z,
        a1_sq: s1 * z,
        a2_sq: s2 * z,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PptSpectrum {
    pub min_eigenvalue: f64,
    /// Sum of the magnitudes of all negative eigenvalues.
    pub negativity_sum: f64,
    pub trace: f64,
}

impl PptSpectrum {
    /// `log2 ||rho^PT||_1` of the renormalised state.
    pub fn log_negativity(&self) -> f64 {
        ((self.trace + 2.0 * self.negativity_sum) / self.trace).log2()
    }

    /// Smallest symplectic eigenvalue of the partial transpose implied by the
    /// negativity, valid for Gaussian states; one when there is none.
    pub fn lambda_minus(&self) -> f64 {
        self.trace / (self.trace + 2.0 * self.negativity_sum)
    }
}

/// Negative eigenvalues down to this size are rounding noise.
pub const EIGENVALUE_FLOOR: f64 = 1e-10;

pub(crate) fn floor_eigenvalue(x: f64) -> f64 {
    if x < 0.0 && x >= -EIGENVALUE_FLOOR {
        0.0
    } else {
        x
    }
}

/// Spectrum of the partial transpose on mode 2,
/// `rho^PT_{(i,l),(k,j)} = rho_{(i,j),(k,l)}`.
pub fn ppt_negativity(rho: &FockDensityMatrix) -> PptSpectrum {
    let layout = SectorLayout::new(rho.cutoff(), rho.symmetry().partial_transpose());
    let per_block: Vec<(f64, f64)> = layout
        .bases
        .par_iter()
        .filter(|b| !b.is_empty())
        .map(|basis| {
            let m = DMatrix::from_fn(basis.len(), basis.len(), |a, b| {
                let (i, l) = basis[a];
                let (k, j) = basis[b];
                rho.get((i, j), (k, l))
            });
            let ev: Vec<f64> = hermitian_eigenvalues(&m).into_iter().map(floor_eigenvalue).collect();
            let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
            let neg: f64 = ev.iter().filter(|&&x| x < 0.0).map(|x| -x).sum();
            (min, neg)
        })
        .collect();
    PptSpectrum {
        min_eigenvalue: per_block.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
        negativity_sum: per_block.iter().map(|p| p.1).sum(),
        trace: rho.trace(),
    }
}
