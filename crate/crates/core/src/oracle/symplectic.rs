//! Williamson normal form and Bloch-Messiah decomposition of two-mode
//! symplectic matrices.
//!
//! Real matrices act on quadratures `(x1, p1, x2, p2)`. A Gaussian unitary
//! `U` is described by `S` through `U^dag r U = S r`, so a state with
//! covariance `sigma` is mapped to `S sigma S^T`.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{quadrature_transform, symplectic_form, CovarianceMatrix};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Symplectic eigenvalues below `1 - NOT_BONA_FIDE_TOL` are rejected.
pub const NOT_BONA_FIDE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Williamson {
    /// `nu[k]` is the symplectic eigenvalue carried by mode `k` of the normal
    /// form, so the thermal input of mode `k` has occupation `(nu[k] - 1) / 2`.
    pub nu: [f64; 2],
    pub s: Matrix4<f64>,
}

fn real_sym_power(m: &Matrix4<f64>, p: f64) -> Result<Matrix4<f64>> {
    let eig = SymmetricEigen::new(*m);
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::NotBonaFide(format!(
            "covariance is not positive definite (eigenvalues {:?})",
            eig.eigenvalues.as_slice()
        )));
    }
    let d = Matrix4::from_diagonal(&eig.eigenvalues.map(|l| l.powf(p)));
    Ok(eig.eigenvectors * d * eig.eigenvectors.transpose())
}

fn is_normal_form(q: &Matrix4<f64>) -> bool {
    let mut off = *q;
    for k in 0..4 {
        off[(k, k)] = 0.0;
    }
    off.amax() == 0.0 && q[(0, 0)] == q[(1, 1)] && q[(2, 2)] == q[(3, 3)]
}

/// Williamson decomposition `sigma = S diag(nu1, nu1, nu2, nu2) S^T`.
///
/// For a general input the eigenvalues come out sorted, `nu[0] <= nu[1]`; an
/// input that is already in normal form is returned with `S = I`.
pub fn williamson(cov: &CovarianceMatrix) -> Result<Williamson> {
    if !cov.is_hermitian(1e-10 * cov.entries.camax().max(1.0)) {
        return Err(Error::Numerical("covariance matrix is not Hermitian".into()));
    }
    let q = cov.to_quadrature()?;
    williamson_quadrature(&q)
}

pub fn williamson_quadrature(q: &Matrix4<f64>) -> Result<Williamson> {
    if is_normal_form(q) {
        let nu = [q[(0, 0)], q[(2, 2)]];
        check_nu(nu)?;
        return Ok(Williamson {
            nu,
            s: Matrix4::identity(),
        });
    }
    let root = real_sym_power(q, 0.5)?;
    let inv_root = real_sym_power(q, -0.5)?;
    let omega = symplectic_form();
    let k = inv_root * omega * inv_root;
    let ik = k.map(|x| Complex64::new(0.0, x));
    let eig = SymmetricEigen::new(ik);

    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let (i0, i1) = (order[0], order[1]);
    let mu = [eig.eigenvalues[i0], eig.eigenvalues[i1]];
    if !(mu[1] > 0.0) {
        return Err(Error::Numerical(format!("symplectic spectrum not resolved: {mu:?}")));
    }
    let nu = [1.0 / mu[0], 1.0 / mu[1]];
    check_nu(nu)?;

    let mut o = Matrix4::<f64>::zeros();
    for (mode, &idx) in [i0, i1].iter().enumerate() {
        let v = eig.eigenvectors.column(idx);
        let s2 = std::f64::consts::SQRT_2;
        for r in 0..4 {
            o[(r, 2 * mode)] = s2 * v[r].im;
            o[(r, 2 * mode + 1)] = s2 * v[r].re;
        }
    }
    let inv_sqrt_d = Matrix4::from_diagonal(&nalgebra::Vector4::new(
        nu[0].powf(-0.5),
        nu[0].powf(-0.5),
        nu[1].powf(-0.5),
        nu[1].powf(-0.5),
    ));
    let s = root * o * inv_sqrt_d;

    let scale = s.amax().powi(2).max(1.0);
    let sympl = (s * omega * s.transpose() - omega).amax();
    if sympl > 1e-10 * scale {
        return Err(Error::Numerical(format!(
            "Williamson matrix violates the symplectic form by {sympl:e}"
        )));
    }
    let d = Matrix4::from_diagonal(&nalgebra::Vector4::new(nu[0], nu[0], nu[1], nu[1]));
    let recon = (s * d * s.transpose() - q).amax();
    if recon > 1e-8 * q.amax().max(1.0) {
        return Err(Error::Numerical(format!(
            "Williamson reconstruction residual {recon:e}"
        )));
    }
    Ok(Williamson { nu, s })
}

fn check_nu(nu: [f64; 2]) -> Result<()> {
    if nu.iter().any(|&v| v < 1.0 - NOT_BONA_FIDE_TOL) {
        return Err(Error::NotBonaFide(format!(
            "symplectic eigenvalues {nu:?} fall below one"
        )));
    }
    Ok(())
}

/// Two-mode passive transformation `a -> U a` with
/// `U = diag(e^{i alpha1}, e^{i alpha2}) R(theta) diag(e^{i beta}, 1)` and
/// `R(theta) = [[cos, -sin], [sin, cos]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassiveStage {
    pub theta: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
}

impl PassiveStage {
    pub const IDENTITY: Self = Self {
        theta: 0.0,
        alpha1: 0.0,
        alpha2: 0.0,
        beta: 0.0,
    };

    pub fn unitary(&self) -> Matrix2<Complex64> {
        let (s, c) = self.theta.sin_cos();
        let e = |x: f64| Complex64::from_polar(1.0, x);
        Matrix2::new(
            e(self.alpha1 + self.beta) * c,
            -e(self.alpha1) * s,
            e(self.alpha2 + self.beta) * s,
            e(self.alpha2) * c,
        )
    }

    /// Euler angles of a 2x2 unitary.
    pub fn from_unitary(u: &Matrix2<Complex64>) -> Result<Self> {
        let resid = (u * u.adjoint() - Matrix2::identity()).camax();
        if resid > 1e-8 {
            return Err(Error::Numerical(format!("passive stage is not unitary ({resid:e})")));
        }
        let theta = u[(0, 1)].norm().atan2(u[(0, 0)].norm());
        let stage = if u[(0, 1)].norm() < 1e-12 {
            Self {
                theta,
                alpha1: 0.0,
                alpha2: u[(1, 1)].arg(),
                beta: u[(0, 0)].arg(),
            }
        } else if u[(0, 0)].norm() < 1e-12 {
            let alpha1 = (-u[(0, 1)]).arg();
            Self {
                theta,
                alpha1,
                alpha2: 0.0,
                beta: u[(1, 0)].arg(),
            }
        } else {
            let alpha1 = (-u[(0, 1)]).arg();
            Self {
                theta,
                alpha1,
                alpha2: u[(1, 1)].arg(),
                beta: u[(0, 0)].arg() - alpha1,
            }
        };
        let err = (stage.unitary() - u).camax();
        if err > 1e-8 {
            return Err(Error::Numerical(format!(
                "passive stage reconstruction residual {err:e}"
            )));
        }
        Ok(stage)
    }
}

/// Passive, squeeze, passive: `S = S(stage2) S(squeeze) S(stage1)`; stage 1
/// acts on the state first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochMessiah {
    pub stage1: PassiveStage,
    /// Single-mode squeezing `a -> cosh r a + sinh r a^dag`.
    pub squeezing: [f64; 2],
    pub stage2: PassiveStage,
}

/// Thermal inputs followed by a Bloch-Messiah circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianCircuit {
    pub thermal: [f64; 2],
    pub stage1: PassiveStage,
    pub squeezing: [f64; 2],
    pub stage2: PassiveStage,
}

/// `(alpha, beta)` blocks of `a -> alpha a + beta a^dag` as a quadrature
/// symplectic matrix.
fn symplectic_from_blocks(alpha: &Matrix2<Complex64>, beta: &Matrix2<Complex64>) -> Matrix4<f64> {
    let mut sc = Matrix4::<Complex64>::zeros();
    for i in 0..2 {
        for j in 0..2 {
            sc[(2 * i, 2 * j)] = alpha[(i, j)];
            sc[(2 * i, 2 * j + 1)] = beta[(i, j)];
            sc[(2 * i + 1, 2 * j)] = beta[(i, j)].conj();
            sc[(2 * i + 1, 2 * j + 1)] = alpha[(i, j)].conj();
        }
    }
    let t = quadrature_transform();
    (t * sc * t.adjoint()).map(|z| z.re)
}

fn blocks_from_symplectic(s: &Matrix4<f64>) -> (Matrix2<Complex64>, Matrix2<Complex64>) {
    let t = quadrature_transform();
    let sc = t.adjoint() * s.map(|x| Complex64::new(x, 0.0)) * t;
    let alpha = Matrix2::new(sc[(0, 0)], sc[(0, 2)], sc[(2, 0)], sc[(2, 2)]);
    let beta = Matrix2::new(sc[(0, 1)], sc[(0, 3)], sc[(2, 1)], sc[(2, 3)]);
    (alpha, beta)
}

impl BlochMessiah {
    pub fn blocks(&self) -> (Matrix2<Complex64>, Matrix2<Complex64>) {
        let w = self.stage2.unitary();
        let v = self.stage1.unitary();
        let ch = Matrix2::from_diagonal(&Vector2::new(
            Complex64::new(self.squeezing[0].cosh(), 0.0),
            Complex64::new(self.squeezing[1].cosh(), 0.0),
        ));
        let sh = Matrix2::from_diagonal(&Vector2::new(
            Complex64::new(self.squeezing[0].sinh(), 0.0),
            Complex64::new(self.squeezing[1].sinh(), 0.0),
        ));
        (w * ch * v, w * sh * v.map(|z| z.conj()))
    }

    pub fn symplectic(&self) -> Matrix4<f64> {
        let (a, b) = self.blocks();
        symplectic_from_blocks(&a, &b)
    }
}

impl GaussianCircuit {
    pub fn new(w: &Williamson, bm: &BlochMessiah) -> Self {
        Self {
            thermal: [
                ((w.nu[0] - 1.0) / 2.0).max(0.0),
                ((w.nu[1] - 1.0) / 2.0).max(0.0),
            ],
            stage1: bm.stage1,
            squeezing: bm.squeezing,
            stage2: bm.stage2,
        }
    }

    pub fn bloch_messiah(&self) -> BlochMessiah {
        BlochMessiah {
            stage1: self.stage1,
            squeezing: self.squeezing,
            stage2: self.stage2,
        }
    }

    /// Quadrature covariance produced by the circuit.
    pub fn covariance(&self) -> Matrix4<f64> {
        let s = self.bloch_messiah().symplectic();
        let nu = self.thermal.map(|n| 2.0 * n + 1.0);
        let d = Matrix4::from_diagonal(&nalgebra::Vector4::new(nu[0], nu[0], nu[1], nu[1]));
        s * d * s.transpose()
    }
}

fn cdot(a: &Vector2<Complex64>, b: &Vector2<Complex64>) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// Takagi factorisation `m = Q diag(s) Q^T` of a complex symmetric 2x2 matrix,
/// singular values in descending order.
pub fn takagi(m: &Matrix2<Complex64>) -> Result<(Matrix2<Complex64>, [f64; 2])> {
    let x = m.map(|z| z.re);
    let y = m.map(|z| z.im);
    let mut r = Matrix4::<f64>::zeros();
    for i in 0..2 {
        for j in 0..2 {
            r[(i, j)] = 0.5 * (x[(i, j)] + x[(j, i)]);
            r[(i, j + 2)] = 0.5 * (y[(i, j)] + y[(j, i)]);
            r[(i + 2, j)] = 0.5 * (y[(i, j)] + y[(j, i)]);
            r[(i + 2, j + 2)] = -0.5 * (x[(i, j)] + x[(j, i)]);
        }
    }
    let eig = SymmetricEigen::new(r);
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let floor = 1e-13 * m.camax().max(1.0);
    let mut cols: Vec<Vector2<Complex64>> = Vec::new();
    let mut sv = [0.0; 2];
    for &idx in order.iter().take(2) {
        let s = eig.eigenvalues[idx];
        if s <= floor {
            break;
        }
        let e = eig.eigenvectors.column(idx);
        let mut q = Vector2::new(Complex64::new(e[0], e[2]), Complex64::new(e[1], e[3]));
        for c in &cols {
            q -= c * cdot(c, &q);
        }
        let norm = cdot(&q, &q).re.sqrt();
        sv[cols.len()] = s;
        cols.push(q / Complex64::new(norm, 0.0));
    }
    // complete the null space
    for e in [Vector2::new(ONE, ZERO), Vector2::new(ZERO, ONE)] {
        if cols.len() == 2 {
            break;
        }
        let mut q = e;
        for c in &cols {
            q -= c * cdot(c, &q);
        }
        let norm = cdot(&q, &q).re.sqrt();
        if norm > 1e-6 {
            cols.push(q / Complex64::new(norm, 0.0));
        }
    }
    let q = Matrix2::from_columns(&[cols[0], cols[1]]);
    let d = Matrix2::from_diagonal(&Vector2::new(
        Complex64::new(sv[0], 0.0),
        Complex64::new(sv[1], 0.0),
    ));
    let resid = (q * d * q.transpose() - m).camax();
    if resid > 1e-10 * m.camax().max(1.0) {
        return Err(Error::Numerical(format!("Takagi residual {resid:e}")));
    }
    Ok((q, sv))
}

/// Decompose a symplectic matrix into passive, squeeze, passive stages.
pub fn bloch_messiah(s: &Matrix4<f64>) -> Result<BlochMessiah> {
    let omega = symplectic_form();
    let scale = s.amax().max(1.0);
    let sympl = (s * omega * s.transpose() - omega).amax();
    if sympl > 1e-8 * scale * scale {
        return Err(Error::Numerical(format!(
            "input is not symplectic (residual {sympl:e})"
        )));
    }
    let (alpha, beta) = blocks_from_symplectic(s);
    let alpha_inv = alpha
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular passive block".into()))?;
    let m = alpha_inv * beta;
    let m = (m + m.transpose()) * Complex64::new(0.5, 0.0);
    let (q, tanh) = takagi(&m)?;
    if tanh.iter().any(|&t| t >= 1.0) {
        return Err(Error::Numerical(format!("squeezing out of range: tanh r = {tanh:?}")));
    }
    let r = tanh.map(f64::atanh);
    let v = q.adjoint();
    let inv_ch = Matrix2::from_diagonal(&Vector2::new(
        Complex64::new(1.0 / r[0].cosh(), 0.0),
        Complex64::new(1.0 / r[1].cosh(), 0.0),
    ));
    let w = alpha * q * inv_ch;
    let bm = BlochMessiah {
        stage1: PassiveStage::from_unitary(&v)?,
        squeezing: r,
        stage2: PassiveStage::from_unitary(&w)?,
    };
    let resid = (bm.symplectic() - s).amax();
    if resid > 1e-8 * scale {
        return Err(Error::Numerical(format!(
            "Bloch-Messiah reconstruction residual {resid:e}"
        )));
    }
    Ok(bm)
}

/// Williamson followed by Bloch-Messiah: a circuit that prepares the state.
pub fn circuit_for(cov: &CovarianceMatrix) -> Result<GaussianCircuit> {
    let w = williamson(cov)?;
    let bm = bloch_messiah(&w.s)?;
    let circuit = GaussianCircuit::new(&w, &bm);
    let target = cov.to_quadrature()?;
    let resid = (circuit.covariance() - target).amax();
    if resid > 1e-8 * target.amax().max(1.0) {
        return Err(Error::Numerical(format!("circuit covariance residual {resid:e}")));
    }
    Ok(circuit)
}

/// Two-mode squeezer `a1 -> cosh r a1 + sinh r a2^dag`.
pub fn two_mode_squeezer(r: f64) -> Matrix4<f64> {
    let c = Complex64::new(r.cosh(), 0.0);
    let s = Complex64::new(r.sinh(), 0.0);
    let alpha = Matrix2::new(c, ZERO, ZERO, c);
    let beta = Matrix2::new(ZERO, s, s, ZERO);
    symplectic_from_blocks(&alpha, &beta)
}

/// Passive stage as a quadrature symplectic matrix.
pub fn passive_symplectic(u: &Matrix2<Complex64>) -> Matrix4<f64> {
    symplectic_from_blocks(u, &Matrix2::zeros())
}
