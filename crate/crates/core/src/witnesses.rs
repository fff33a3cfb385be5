//! Witnesses that need only two-body correlations, the polynomial behind
//! them, and the classification maps over parameter planes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlations::{g4_from_theta, invert_beta, DEGENERATE_G2};
use crate::error::{Error, Result};
use crate::gaussian::{classify, log_negativity, symplectic_spectrum, StateClass, ThermalTwoModeState};

fn populations(n1: f64, n2: f64) -> Result<f64> {
    if !(n1 > 0.0 && n2 > 0.0) || !n1.is_finite() || !n2.is_finite() {
        return Err(Error::Domain(format!(
            "populations must be positive, got n1 = {n1}, n2 = {n2}"
        )));
    }
    Ok(n1 * n2)
}

/// `|m_pair^2 - m_coh^2| / (n1 n2)`
pub fn delta(state: &ThermalTwoModeState) -> Result<f64> {
    let n = populations(state.n1, state.n2)?;
    Ok((state.m_pair.powi(2) - state.m_coh.powi(2)).abs() / n)
}

/// The polynomial whose sign decides entanglement: negative exactly when the
/// smallest symplectic eigenvalue of the partial transpose is below one.
pub fn p_minus(n1: f64, n2: f64, g2: f64, delta: f64) -> f64 {
    let n = n1 * n2;
    16.0 * n
        * ((1.0 + n1) * (1.0 + n2) * (2.0 - g2)
            + (0.5 - n) * (g2 - 1.0)
            + delta * (n * delta - 0.5))
}

/// Cauchy-Schwarz limits on the field moments of a physical state.
pub fn cauchy_schwarz_bounds(state: &ThermalTwoModeState) -> bool {
    let n = state.n1 * state.n2;
    let within = |m: f64, bound: f64| m * m <= bound * (1.0 + CS_REL_TOL) + f64::MIN_POSITIVE;
    within(state.m_pair, n + state.n1.min(state.n2)) && within(state.m_coh, n)
}

/// Relative slack on the Cauchy-Schwarz bounds, so that pure states sitting
/// on the boundary pass after rounding.
const CS_REL_TOL: f64 = 1e-12;

/// Above this value of `g2_12` every thermal state is entangled.
pub fn g2_entanglement_threshold(n1: f64, n2: f64) -> Result<f64> {
    let n = populations(n1, n2)?;
    Ok(if n < 0.5 {
        2.0 + (0.5 - n) / (2.0 * n + n1 + n2 + 0.5)
    } else {
        2.0
    })
}

/// At or below this value of `g2_12` every thermal state is separable.
pub fn g2_separability_threshold(n1: f64, n2: f64) -> Result<f64> {
    let n = populations(n1, n2)?;
    Ok(if n <= 0.25 {
        2.0
    } else {
        2.0 - (1.0 - 4.0 * n).powi(2) / (8.0 * n * (1.0 + 2.0 * n1) * (1.0 + 2.0 * n2))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Entangled,
    Separable,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessVerdict {
    pub verdict: Verdict,
    pub g2_e: f64,
    pub g2_s: f64,
    pub measured_g2: f64,
}

pub fn witness_classify(n1: f64, n2: f64, g2: f64) -> Result<WitnessVerdict> {
    let g2_e = g2_entanglement_threshold(n1, n2)?;
    let g2_s = g2_separability_threshold(n1, n2)?;
    let verdict = if g2 > g2_e {
        Verdict::Entangled
    } else if g2 <= g2_s {
        Verdict::Separable
    } else {
        Verdict::Indeterminate
    };
    Ok(WitnessVerdict {
        verdict,
        g2_e,
        g2_s,
        measured_g2: g2,
    })
}

/// `g2_12 / sqrt(g2_1 g2_2)`; above one the classical Cauchy-Schwarz
/// inequality for particle numbers is violated.
pub fn cs_ratio(g2_12: f64, g2_1: f64, g2_2: f64) -> Result<f64> {
    if !(g2_1 > 0.0 && g2_2 > 0.0) {
        return Err(Error::Domain(format!(
            "single-mode g2 must be positive, got {g2_1}, {g2_2}"
        )));
    }
    Ok(g2_12 / (g2_1 * g2_2).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, points: usize) -> Self {
        Self { min, max, points }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.points == 0 {
            return Err(Error::Config(format!("{name} axis has no points")));
        }
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::Config(format!("{name} axis bounds must be finite")));
        }
        if self.max < self.min || (self.points > 1 && self.max == self.min) {
            return Err(Error::Config(format!(
                "{name} axis range [{}, {}] is empty or inverted",
                self.min, self.max
            )));
        }
        Ok(())
    }

    /// Evenly spaced values, both ends included.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FixedParameter {
    /// Equal populations `n1 = n2 = n`; cells are `(x, y) = (g2, theta)`.
    Population(f64),
    /// Cells are `(x, y) = (n, g2)` with `n1 = n2 = n`.
    Theta(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub fixed: FixedParameter,
    pub x: Axis,
    pub y: Axis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionCell {
    pub x: f64,
    pub y: f64,
    pub lambda_minus: Option<f64>,
    pub log_negativity: Option<f64>,
    pub class: StateClass,
}

/// Evaluate the full criterion at equal populations `n` for given
/// `(g2, theta)`.
pub fn evaluate_cell(n: f64, g2: f64, theta: f64) -> RegionCell {
    let unphysical = RegionCell {
        x: f64::NAN,
        y: f64::NAN,
        lambda_minus: None,
        log_negativity: None,
        class: StateClass::Unphysical,
    };
    if !(n > 0.0) || g2 < 1.0 {
        return unphysical;
    }
    let state = if g2 - 1.0 <= DEGENERATE_G2 {
        ThermalTwoModeState::thermal_product(n, n)
    } else {
        match invert_beta(n, n, g2, g4_from_theta(g2, theta)) {
            Ok(b) => b.state(n, n),
            Err(_) => return unphysical,
        }
    };
    let class = match classify(&state) {
        Ok(c) => c,
        Err(_) => return unphysical,
    };
    let lambda = symplectic_spectrum(&state).ok().map(|s| s.lambda_minus);
    let (lambda_minus, ln) = match class {
        StateClass::Unphysical => (lambda, None),
        _ => (lambda, lambda.and_then(|l| log_negativity(l).ok())),
    };
    RegionCell {
        lambda_minus,
        log_negativity: ln,
        class,
        ..unphysical
    }
}

/// Cells in row-major order: index `iy * nx + ix`.
pub fn region_grid(spec: &GridSpec) -> Result<Vec<RegionCell>> {
    spec.x.validate("x")?;
    spec.y.validate("y")?;
    match spec.fixed {
        FixedParameter::Population(n) if !(n > 0.0 && n.is_finite()) => {
            return Err(Error::Config(format!("fixed population must be positive, got {n}")))
        }
        FixedParameter::Theta(t) if !t.is_finite() => {
            return Err(Error::Config(format!("fixed theta must be finite, got {t}")))
        }
        _ => {}
    }
    let xs = spec.x.values();
    let ys = spec.y.values();
    let nx = xs.len();
    let cells = (0..nx * ys.len())
        .into_par_iter()
        .map(|idx| {
            let (x, y) = (xs[idx % nx], ys[idx / nx]);
            let cell = match spec.fixed {
                FixedParameter::Population(n) => evaluate_cell(n, x, y),
                FixedParameter::Theta(t) => evaluate_cell(x, y, t),
            };
            RegionCell { x, y, ..cell }
        })
        .collect();
    Ok(cells)
}
