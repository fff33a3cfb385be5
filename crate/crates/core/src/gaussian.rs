//! Covariance-matrix picture of two-mode Gaussian states whose single modes
//! are thermal.
//!
//! States are described by four magnitudes: the populations `n1`, `n2`, the
//! pairing moment `|<a1 a2>|` and the coherence `|<a1 a2^dag>|`. The symplectic
//! spectrum of the covariance matrix, and of its partial transpose, depends
//! only on these magnitudes, so everything except [`build_covariance`] works
//! on them directly.
//!
//! Conventions: the covariance matrix is written in the operator basis
//! `(a1, a1^dag, a2, a2^dag)` with `sigma_ij = <r_i r_j^dag + r_j^dag r_i>`, so
//! the vacuum is the identity and a state is bona fide when its symplectic
//! eigenvalues are at least one.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used on every `>= 1` comparison of symplectic eigenvalues.
pub const CLASS_EPS: f64 = 1e-9;

/// Relative tolerance below which a negative discriminant is clamped to zero.
pub const DISCRIMINANT_TOL: f64 = 1e-9;

/// The four-parameter family of thermal two-mode Gaussian states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalTwoModeState {
    pub n1: f64,
    pub n2: f64,
    /// `|<a1 a2>|`
    pub m_pair: f64,
    /// `|<a1 a2^dag>|`
    pub m_coh: f64,
}

impl ThermalTwoModeState {
    pub fn new(n1: f64, n2: f64, m_pair: f64, m_coh: f64) -> Result<Self> {
        let state = Self {
            n1,
            n2,
            m_pair,
            m_coh,
        };
        state.validate()?;
        Ok(state)
    }

    /// Two-mode squeezed vacuum with population `n` in each mode.
    pub fn tmsv(n: f64) -> Self {
        Self {
            n1: n,
            n2: n,
            m_pair: (n * (n + 1.0)).sqrt(),
            m_coh: 0.0,
        }
    }

    pub fn thermal_product(n1: f64, n2: f64) -> Self {
        Self {
            n1,
            n2,
            m_pair: 0.0,
            m_coh: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("n1", self.n1),
            ("n2", self.n2),
            ("m_pair", self.m_pair),
            ("m_coh", self.m_coh),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Domain(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Same state with the roles of pairing and coherence exchanged. This is
    /// what the partial transpose on mode 2 does to the parameters.
    pub fn swapped_roles(&self) -> Self {
        Self {
            m_pair: self.m_coh,
            m_coh: self.m_pair,
            ..*self
        }
    }

    pub fn swapped_modes(&self) -> Self {
        Self {
            n1: self.n2,
            n2: self.n1,
            ..*self
        }
    }

    fn diag_blocks(&self) -> (f64, f64) {
        (2.0 * self.n1 + 1.0, 2.0 * self.n2 + 1.0)
    }

    /// Determinant of the covariance matrix in terms of the larger and smaller
    /// of the two field-moment magnitudes.
    pub fn det_sigma(&self) -> f64 {
        // factored form of 16(hi - lo)^2 + (ab)^2 - 8(hi + lo)ab
        let (a, b) = self.diag_blocks();
        let ab = a * b;
        (ab - 4.0 * (self.m_pair + self.m_coh).powi(2))
            * (ab - 4.0 * (self.m_pair - self.m_coh).powi(2))
    }

    /// `Gamma^2 - 4 det sigma`, written so that it vanishes exactly for
    /// symmetric pure states.
    fn discriminant(&self, pair: f64, coh: f64) -> f64 {
        let (a, b) = self.diag_blocks();
        (a * a - b * b).powi(2) + 16.0 * coh * coh * (a + b).powi(2)
            - 16.0 * pair * pair * (a - b).powi(2)
    }

    /// `det C` for the correlation block, `4(|<a1 a2^dag>|^2 - |<a1 a2>|^2)`.
    pub fn det_c(&self) -> f64 {
        4.0 * (self.m_coh * self.m_coh - self.m_pair * self.m_pair)
    }

    /// Whether the covariance matrix is positive definite. The singular values
    /// of `C` are `2(m_pair + m_coh)` and `2|m_pair - m_coh|` whatever the
    /// phases, so the Schur complement test reduces to a scalar inequality.
    pub fn is_positive_definite(&self) -> bool {
        let (a, b) = self.diag_blocks();
        a * b - 4.0 * (self.m_pair + self.m_coh).powi(2) > 0.0
    }
}

/// 4x4 complex Hermitian covariance matrix in the `(a1, a1^dag, a2, a2^dag)`
/// basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    pub entries: Matrix4<Complex64>,
}

/// Build the covariance matrix with `<a1 a2> = m_pair e^{i phase_pair}` and
/// `<a1 a2^dag> = m_coh e^{i phase_coh}`.
pub fn build_covariance(
    state: &ThermalTwoModeState,
    phase_pair: f64,
    phase_coh: f64,
) -> CovarianceMatrix {
    let (a, b) = state.diag_blocks();
    let pair = Complex64::from_polar(state.m_pair, phase_pair);
    let coh = Complex64::from_polar(state.m_coh, phase_coh);
    let two = Complex64::new(2.0, 0.0);
    let mut m = Matrix4::<Complex64>::zeros();
    m[(0, 0)] = Complex64::new(a, 0.0);
    m[(1, 1)] = Complex64::new(a, 0.0);
    m[(2, 2)] = Complex64::new(b, 0.0);
    m[(3, 3)] = Complex64::new(b, 0.0);
    // C block
    m[(0, 2)] = two * coh;
    m[(0, 3)] = two * pair;
    m[(1, 2)] = two * pair.conj();
    m[(1, 3)] = two * coh.conj();
    for i in 0..2 {
        for j in 2..4 {
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    CovarianceMatrix { entries: m }
}

impl CovarianceMatrix {
    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self.entries - self.entries.adjoint()).camax() <= tol
    }

    /// Partial transpose on mode 2: `B -> s_x B s_x`, `C -> C s_x`.
    pub fn partial_transpose(&self) -> Self {
        let mut p = Matrix4::<Complex64>::identity();
        p[(2, 2)] = Complex64::new(0.0, 0.0);
        p[(3, 3)] = Complex64::new(0.0, 0.0);
        p[(2, 3)] = Complex64::new(1.0, 0.0);
        p[(3, 2)] = Complex64::new(1.0, 0.0);
        Self {
            entries: p * self.entries * p,
        }
    }

    /// Real symmetric covariance of the quadratures `(x1, p1, x2, p2)` with
    /// `x = (a + a^dag)/sqrt 2`, `p = -i (a - a^dag)/sqrt 2`.
    pub fn to_quadrature(&self) -> Result<Matrix4<f64>> {
        let t = quadrature_transform();
        let q = t * self.entries * t.adjoint();
        let imag = q.map(|z| z.im).amax();
        let scale = q.map(|z| z.re).amax().max(1.0);
        if imag > 1e-10 * scale {
            return Err(Error::Numerical(format!(
                "quadrature covariance has imaginary part {imag:e}"
            )));
        }
        let re = q.map(|z| z.re);
        Ok((re + re.transpose()) * 0.5)
    }

    /// Inverse of [`CovarianceMatrix::to_quadrature`].
    pub fn from_quadrature(q: &Matrix4<f64>) -> Self {
        let t = quadrature_transform();
        let qc = q.map(|x| Complex64::new(x, 0.0));
        Self {
            entries: t.adjoint() * qc * t,
        }
    }
}

/// Unitary mapping `(a1, a1^dag, a2, a2^dag)` to `(x1, p1, x2, p2)`.
pub fn quadrature_transform() -> Matrix4<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut t = Matrix4::<Complex64>::zeros();
    for k in 0..2 {
        let o = 2 * k;
        t[(o, o)] = Complex64::new(s, 0.0);
        t[(o, o + 1)] = Complex64::new(s, 0.0);
        t[(o + 1, o)] = Complex64::new(0.0, -s);
        t[(o + 1, o + 1)] = Complex64::new(0.0, s);
    }
    t
}

/// Symplectic form for quadratures ordered `(x1, p1, x2, p2)`.
pub fn symplectic_form() -> Matrix4<f64> {
    let mut w = Matrix4::<f64>::zeros();
    w[(0, 1)] = 1.0;
    w[(1, 0)] = -1.0;
    w[(2, 3)] = 1.0;
    w[(3, 2)] = -1.0;
    w
}

/// Symplectic spectra of a state and of its partial transpose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymplecticSpectrum {
    pub nu_minus: f64,
    pub nu_plus: f64,
    pub nu_tilde_minus: f64,
    pub nu_tilde_plus: f64,
    /// `min(nu_minus, nu_tilde_minus)`
    pub lambda_minus: f64,
    /// `max(nu_minus, nu_tilde_minus)`; below one for both role assignments
    /// means no physical state has these moments.
    pub lambda_prime_minus: f64,
    pub det_sigma: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    #[serde(rename = "Delta_prime")]
    pub delta_prime: f64,
    #[serde(rename = "Gamma")]
    pub gamma: f64,
    #[serde(rename = "Gamma_tilde")]
    pub gamma_tilde: f64,
    /// Set when a squared eigenvalue came out negative (clamped to zero).
    pub complex_branch: bool,
}

/// Roots of `x^2 - trace x + det = 0` as `(nu_minus, nu_plus, clamped)`.
fn symplectic_pair(trace: f64, det: f64, mut disc: f64) -> Result<(f64, f64, bool)> {
    if disc < 0.0 {
        if disc < -DISCRIMINANT_TOL * (trace * trace).max(1.0) {
            return Err(Error::Discriminant { value: disc });
        }
        disc = 0.0;
    }
    let root = disc.sqrt();
    let plus_sq = 0.5 * (trace + root);
    // stable form for the small root when the large one is well away from zero
    let minus_sq = if plus_sq > 0.0 && trace > 0.0 {
        det / plus_sq
    } else {
        0.5 * (trace - root)
    };
    let clamped = minus_sq < 0.0 || plus_sq < 0.0;
    Ok((minus_sq.max(0.0).sqrt(), plus_sq.max(0.0).sqrt(), clamped))
}

/// Closed-form symplectic spectra of the state and its partial transpose.
pub fn symplectic_spectrum(state: &ThermalTwoModeState) -> Result<SymplecticSpectrum> {
    state.validate()?;
    let (a, b) = state.diag_blocks();
    let det_a = a * a;
    let det_b = b * b;
    let det_c = state.det_c();
    let det_sigma = state.det_sigma();
    let gamma = det_a + det_b + 2.0 * det_c;
    let gamma_tilde = det_a + det_b - 2.0 * det_c;
    let delta = det_a + det_b + 2.0 * det_c.abs();
    let delta_prime = det_a + det_b - 2.0 * det_c.abs();

    let (nu_minus, nu_plus, c1) = symplectic_pair(gamma, det_sigma, state.discriminant(state.m_pair, state.m_coh))?;
    let (nu_tilde_minus, nu_tilde_plus, c2) = symplectic_pair(gamma_tilde, det_sigma, state.discriminant(state.m_coh, state.m_pair))?;

    Ok(SymplecticSpectrum {
        nu_minus,
        nu_plus,
        nu_tilde_minus,
        nu_tilde_plus,
        lambda_minus: nu_minus.min(nu_tilde_minus),
        lambda_prime_minus: nu_minus.max(nu_tilde_minus),
        det_sigma,
        delta,
        delta_prime,
        gamma,
        gamma_tilde,
        complex_branch: c1 || c2,
    })
}

/// Logarithmic negativity `max(-log2 lambda_minus, 0)`.
pub fn log_negativity(lambda_minus: f64) -> Result<f64> {
    if !(lambda_minus > 0.0) || !lambda_minus.is_finite() {
        return Err(Error::Domain(format!(
            "logarithmic negativity needs lambda_minus > 0, got {lambda_minus}"
        )));
    }
    Ok((-lambda_minus.log2()).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StateClass {
    Separable,
    Entangled,
    Unphysical,
}

impl std::fmt::Display for StateClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StateClass::Separable => "Separable",
            StateClass::Entangled => "Entangled",
            StateClass::Unphysical => "Unphysical",
        };
        f.write_str(s)
    }
}

/// Whether this particular assignment of `(m_pair, m_coh)` is a physical
/// covariance matrix.
pub fn is_bona_fide(state: &ThermalTwoModeState) -> Result<bool> {
    if !state.is_positive_definite() {
        return Ok(false);
    }
    let spec = symplectic_spectrum(state)?;
    Ok(!spec.complex_branch && spec.nu_minus >= 1.0 - CLASS_EPS)
}

/// Classify the magnitudes `(m_pair, m_coh)` taken as an unordered pair: the
/// state is unphysical only when neither role assignment is bona fide.
pub fn classify(state: &ThermalTwoModeState) -> Result<StateClass> {
    state.validate()?;
    // positivity does not depend on the role assignment
    if !state.is_positive_definite() {
        return Ok(StateClass::Unphysical);
    }
    let spec = symplectic_spectrum(state)?;
    Ok(classify_spectrum(&spec))
}

pub(crate) fn classify_spectrum(spec: &SymplecticSpectrum) -> StateClass {
    if spec.lambda_minus >= 1.0 - CLASS_EPS {
        StateClass::Separable
    } else if spec.lambda_prime_minus >= 1.0 - CLASS_EPS {
        StateClass::Entangled
    } else {
        StateClass::Unphysical
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(format!("efficiency must lie in (0, 1], got {eta}")));
    }
    Ok(())
}

/// Pure-loss channel of transmission `eta` applied to both modes.
pub fn apply_loss(state: &ThermalTwoModeState, eta: f64) -> Result<ThermalTwoModeState> {
    check_eta(eta)?;
    Ok(ThermalTwoModeState {
        n1: state.n1 * eta,
        n2: state.n2 * eta,
        m_pair: state.m_pair * eta,
        m_coh: state.m_coh * eta,
    })
}

/// Undo a pure-loss channel: recovers the state before detection.
pub fn inverse_loss(measured: &ThermalTwoModeState, eta: f64) -> Result<ThermalTwoModeState> {
    check_eta(eta)?;
    Ok(ThermalTwoModeState {
        n1: measured.n1 / eta,
        n2: measured.n2 / eta,
        m_pair: measured.m_pair / eta,
        m_coh: measured.m_coh / eta,
    })
}

/// Symplectic eigenvalues obtained by diagonalising the explicit matrix
/// rather than from the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplicitSpectrum {
    pub nu: [f64; 2],
    pub nu_tilde: [f64; 2],
}

impl ExplicitSpectrum {
    pub fn lambda_minus(&self) -> f64 {
        self.nu[0].min(self.nu_tilde[0])
    }
}

/// Symplectic eigenvalues of a real positive-definite quadrature covariance,
/// sorted ascending. Uses `sigma = L L^T` so that `L^T (i Omega) L` is
/// Hermitian with eigenvalues `+-nu`.
pub fn quadrature_symplectic_eigenvalues(q: &Matrix4<f64>) -> Result<[f64; 2]> {
    let chol = q
        .cholesky()
        .ok_or_else(|| Error::NotBonaFide("covariance is not positive definite".into()))?;
    let l = chol.l().map(|x| Complex64::new(x, 0.0));
    let iw = symplectic_form().map(|x| Complex64::new(0.0, x));
    let h = l.transpose() * iw * l;
    let h = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let ev: Vector4<f64> = h.symmetric_eigenvalues();
    let mut pos: Vec<f64> = ev.iter().copied().filter(|&x| x > 0.0).collect();
    if pos.len() != 2 {
        return Err(Error::Numerical(format!(
            "expected two positive eigenvalues of L^T iW L, got {ev:?}"
        )));
    }
    pos.sort_by(f64::total_cmp);
    Ok([pos[0], pos[1]])
}

/// Symplectic spectra of an explicit covariance matrix and of its partial
/// transpose, computed in the quadrature basis.
pub fn explicit_spectrum(cov: &CovarianceMatrix) -> Result<ExplicitSpectrum> {
    let q = cov.to_quadrature()?;
    let nu = quadrature_symplectic_eigenvalues(&q)?;
    // partial transpose: p2 -> -p2
    let mut qt = q;
    for k in 0..4 {
        qt[(3, k)] = -qt[(3, k)];
        qt[(k, 3)] = -qt[(k, 3)];
    }
    let nu_tilde = quadrature_symplectic_eigenvalues(&qt)?;
    Ok(ExplicitSpectrum { nu, nu_tilde })
}
