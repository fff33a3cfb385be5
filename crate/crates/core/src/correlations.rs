//! Number correlations of thermal two-mode Gaussian states and the inverse
//! problem: recovering the field moments from `g2_12` and `g4_12`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{
    classify_spectrum, inverse_loss, log_negativity, symplectic_spectrum, StateClass,
    SymplecticSpectrum, ThermalTwoModeState,
};

/// Default noise tolerance on `theta` for exact (analytic) inputs.
pub const THETA_TOL: f64 = 1e-9;

/// Below this excess `g2 - 1` the two modes are treated as uncorrelated.
pub const DEGENERATE_G2: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationObservables {
    pub n1: f64,
    pub n2: f64,
    pub g2_12: f64,
    pub g4_12: f64,
    pub g2_1: f64,
    pub g2_2: f64,
    /// Undefined when `g2_12 <= 1`.
    pub theta: Option<f64>,
    /// Undefined when a single-mode `g2` vanishes.
    pub cs_ratio: Option<f64>,
}

impl CorrelationObservables {
    /// Observables of an in-hypothesis state; single modes are exactly thermal.
    pub fn from_state(state: &ThermalTwoModeState) -> Result<Self> {
        let g2 = g2_from_state(state)?;
        let g4 = g4_from_state(state)?;
        let theta = theta_from_g(g2, g4).ok();
        Ok(Self {
            n1: state.n1,
            n2: state.n2,
            g2_12: g2,
            g4_12: g4,
            g2_1: 2.0,
            g2_2: 2.0,
            theta,
            cs_ratio: Some(g2 / 2.0),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaPair {
    pub beta_plus: f64,
    pub beta_minus: f64,
}

impl BetaPair {
    /// State with `|<a1 a2>| = beta_plus`, the assignment singled out when the
    /// state is entangled.
    pub fn state(&self, n1: f64, n2: f64) -> ThermalTwoModeState {
        ThermalTwoModeState {
            n1,
            n2,
            m_pair: self.beta_plus,
            m_coh: self.beta_minus,
        }
    }
}

/// What to do with `g2 <= 1`, where `theta` is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DegenerateMode {
    /// Report `beta = 0` (no field correlations).
    #[default]
    Lenient,
    /// Raise [`Error::Degenerate`].
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionOptions {
    pub theta_tolerance: f64,
    pub degenerate: DegenerateMode,
}

impl Default for InversionOptions {
    fn default() -> Self {
        Self {
            theta_tolerance: THETA_TOL,
            degenerate: DegenerateMode::Strict,
        }
    }
}

fn product_population(n1: f64, n2: f64) -> Result<f64> {
    let n = n1 * n2;
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Domain(format!(
            "populations must be positive, got n1 = {n1}, n2 = {n2}"
        )));
    }
    Ok(n)
}

/// `g2_12 = 1 + (|<a1 a2>|^2 + |<a1 a2^dag>|^2) / (n1 n2)`
pub fn g2_from_state(state: &ThermalTwoModeState) -> Result<f64> {
    let n = product_population(state.n1, state.n2)?;
    Ok(1.0 + (state.m_pair.powi(2) + state.m_coh.powi(2)) / n)
}

/// Normalised four-body cross correlation `<:n1^2 n2^2:> / (n1^2 n2^2)`.
pub fn g4_from_state(state: &ThermalTwoModeState) -> Result<f64> {
    let n = product_population(state.n1, state.n2)?;
    let x = (state.m_pair.powi(2) + state.m_coh.powi(2)) / n;
    let cross = state.m_pair.powi(2) * state.m_coh.powi(2) / (n * n);
    Ok(4.0 * (1.0 + x * x + 4.0 * x + 2.0 * cross))
}

/// `theta = [g4 + 12 - 16 g2 - 4 (g2 - 1)^2] / [2 (g2 - 1)^2]`
pub fn theta_from_g(g2: f64, g4: f64) -> Result<f64> {
    let x = g2 - 1.0;
    if !(x > DEGENERATE_G2) {
        return Err(Error::Degenerate(format!(
            "g2 = {g2} leaves no cross-correlation to invert"
        )));
    }
    // g4 + 12 - 16 g2 - 4 x^2 rewritten around x to limit cancellation
    let num = (g4 - 4.0) - 16.0 * x - 4.0 * x * x;
    Ok(num / (2.0 * x * x))
}

/// Smallest change of `theta` that `g2` and `g4` stored as doubles can
/// express: one ulp of `g4` moves `theta` by about `eps g4 / (2 x^2)`.
pub fn theta_resolution(g2: f64, g4: f64) -> f64 {
    let x = g2 - 1.0;
    16.0 * f64::EPSILON * g4.abs() / (2.0 * x * x)
}

/// The `g4` that yields a given `theta` at fixed `g2`.
pub fn g4_from_theta(g2: f64, theta: f64) -> f64 {
    let x = g2 - 1.0;
    4.0 + 16.0 * x + 4.0 * x * x + 2.0 * theta * x * x
}

/// Recover the two field-moment magnitudes from the number correlations,
/// with the default strict options.
pub fn invert_beta(n1: f64, n2: f64, g2: f64, g4: f64) -> Result<BetaPair> {
    invert_beta_with(n1, n2, g2, g4, &InversionOptions::default())
}

pub fn invert_beta_with(
    n1: f64,
    n2: f64,
    g2: f64,
    g4: f64,
    opts: &InversionOptions,
) -> Result<BetaPair> {
    let n = product_population(n1, n2)?;
    let theta = match theta_from_g(g2, g4) {
        Ok(t) => t,
        Err(e) => {
            return match opts.degenerate {
                DegenerateMode::Lenient => Ok(BetaPair {
                    beta_plus: 0.0,
                    beta_minus: 0.0,
                }),
                DegenerateMode::Strict => Err(e),
            }
        }
    };
    let tau = opts.theta_tolerance + theta_resolution(g2, g4);
    if !(theta >= -tau && theta <= 1.0 + tau) {
        return Err(Error::ThetaRange {
            theta,
            tolerance: tau,
        });
    }
    let theta = theta.clamp(0.0, 1.0);
    let s = (1.0 - theta).sqrt();
    let scale = n * (g2 - 1.0) / 2.0;
    let plus = scale * (1.0 + s);
    // 1 - s = theta / (1 + s) keeps the small root accurate
    let minus = scale * theta / (1.0 + s);
    Ok(BetaPair {
        beta_plus: plus.sqrt(),
        beta_minus: minus.sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub observables: CorrelationObservables,
    pub beta: BetaPair,
    /// Missing only when the reconstructed moments do not even form a
    /// positive matrix and the closed form breaks down.
    pub spectrum: Option<SymplecticSpectrum>,
    pub class: StateClass,
    /// `None` for unphysical moments.
    pub log_negativity: Option<f64>,
    pub identified_pair_moment: Option<f64>,
    pub identified_coherence: Option<f64>,
    pub eta_used: f64,
}

/// Full criterion from measured populations and normalised correlations.
/// Populations are corrected for the detection efficiency, the normalised
/// correlations are left alone since loss does not change them.
pub fn criterion_from_counts(n1: f64, n2: f64, g2: f64, g4: f64, eta: f64) -> Result<EntanglementReport> {
    criterion_with(n1, n2, g2, g4, eta, &InversionOptions::default())
}

pub fn criterion_with(
    n1: f64,
    n2: f64,
    g2: f64,
    g4: f64,
    eta: f64,
    opts: &InversionOptions,
) -> Result<EntanglementReport> {
    let measured = ThermalTwoModeState::new(n1, n2, 0.0, 0.0)?;
    let corrected = inverse_loss(&measured, eta)?;
    let beta = invert_beta_with(corrected.n1, corrected.n2, g2, g4, opts)?;
    let state = beta.state(corrected.n1, corrected.n2);
    let observables = CorrelationObservables {
        n1: corrected.n1,
        n2: corrected.n2,
        g2_12: g2,
        g4_12: g4,
        g2_1: 2.0,
        g2_2: 2.0,
        theta: theta_from_g(g2, g4).ok(),
        cs_ratio: Some(g2 / 2.0),
    };
    Ok(assess(observables, beta, state, eta))
}

/// Classify a reconstructed state. Both role assignments share `lambda_minus`
/// so the report always uses `m_pair = beta_plus`.
pub(crate) fn assess(
    observables: CorrelationObservables,
    beta: BetaPair,
    state: ThermalTwoModeState,
    eta: f64,
) -> EntanglementReport {
    let spectrum = symplectic_spectrum(&state).ok();
    let class = match (&spectrum, state.is_positive_definite()) {
        (Some(spec), true) => classify_spectrum(spec),
        _ => StateClass::Unphysical,
    };
    let ln = match class {
        StateClass::Unphysical => None,
        _ => spectrum.and_then(|s| log_negativity(s.lambda_minus).ok()),
    };
    let entangled = class == StateClass::Entangled;
    EntanglementReport {
        observables,
        beta,
        spectrum,
        class,
        log_negativity: ln,
        identified_pair_moment: entangled.then_some(beta.beta_plus),
        identified_coherence: entangled.then_some(beta.beta_minus),
        eta_used: eta,
    }
}
