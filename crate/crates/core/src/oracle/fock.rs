//! Matrix elements of passive two-mode unitaries and single-mode squeezers in
//! the Fock basis.
//!
//! All generators involved are real antisymmetric tridiagonal matrices, so
//! they are exponentiated exactly through the spectrum of a related real
//! symmetric matrix.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::symplectic::PassiveStage;

/// `exp(G)` for `G[k][k+1] = g[k]`, `G[k+1][k] = -g[k]`, restricted to the
/// leading `rows x cols` corner.
///
/// With `D = diag(i^k)`, `D^dag (iG) D` is real symmetric with off-diagonal
/// `-g`, so `exp(G) = D W e^{-i L} W^T D^dag`.
pub fn expm_antisymmetric_tridiagonal(g: &[f64], rows: usize, cols: usize) -> DMatrix<f64> {
    let dim = g.len() + 1;
    assert!(rows <= dim && cols <= dim);
    if g.iter().all(|&x| x == 0.0) {
        return DMatrix::from_fn(rows, cols, |i, j| if i == j { 1.0 } else { 0.0 });
    }
    let h = DMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            -g[i]
        } else if i == j + 1 {
            -g[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(h);
    let w = &eig.eigenvectors;
    let cos = DVector::from_iterator(dim, eig.eigenvalues.iter().map(|l| l.cos()));
    let sin = DVector::from_iterator(dim, eig.eigenvalues.iter().map(|l| l.sin()));
    let wr = w.rows(0, rows);
    let wc = w.rows(0, cols);
    let c = (wr.clone_owned() * DMatrix::from_diagonal(&cos)) * wc.transpose();
    let s = (wr.clone_owned() * DMatrix::from_diagonal(&sin)) * wc.transpose();
    DMatrix::from_fn(rows, cols, |j, k| match (j as i64 - k as i64).rem_euclid(4) {
        0 => c[(j, k)],
        1 => s[(j, k)],
        2 => -c[(j, k)],
        _ => -s[(j, k)],
    })
}

/// `<m|S(r)|k>` for `S(r) = exp(r/2 (a^dag^2 - a^2))`, which maps
/// `a -> cosh r a + sinh r a^dag`. The generator is exponentiated in a space
/// of `big` levels; `big` must leave enough margin above `rows` and `cols`
/// for the truncation not to reach the requested corner.
pub fn squeezer_matrix(r: f64, rows: usize, cols: usize, big: usize) -> DMatrix<f64> {
    let mut out = DMatrix::<f64>::zeros(rows, cols);
    if r == 0.0 {
        for k in 0..rows.min(cols) {
            out[(k, k)] = 1.0;
        }
        return out;
    }
    let big = big.max(rows).max(cols);
    for parity in 0..2 {
        let levels: Vec<usize> = (parity..big).step_by(2).collect();
        if levels.is_empty() {
            continue;
        }
        let g: Vec<f64> = levels[..levels.len() - 1]
            .iter()
            .map(|&m| -0.5 * r * (((m + 1) * (m + 2)) as f64).sqrt())
            .collect();
        let nr = (parity..rows).step_by(2).count();
        let nc = (parity..cols).step_by(2).count();
        let e = expm_antisymmetric_tridiagonal(&g, nr, nc);
        for a in 0..nr {
            for b in 0..nc {
                out[(parity + 2 * a, parity + 2 * b)] = e[(a, b)];
            }
        }
    }
    out
}

/// Levels needed above the requested corner so that a squeezer of strength
/// `r` is represented to about `1e-18`.
pub fn squeezer_margin(r: f64) -> usize {
    if r < 1e-14 {
        return 0;
    }
    let t = r.tanh();
    if t <= 0.0 {
        return 0;
    }
    (2.0 * (1e-18f64).ln() / t.ln()).ceil() as usize + 20
}

/// `exp(t (a2^dag a1 - a1^dag a2))` in the sector of `total` quanta, basis
/// `|k, total - k>` indexed by `k`. It realises `a -> R(t) a`.
pub fn rotation_sector(t: f64, total: usize) -> DMatrix<f64> {
    let g: Vec<f64> = (0..total)
        .map(|k| t * (((k + 1) * (total - k)) as f64).sqrt())
        .collect();
    expm_antisymmetric_tridiagonal(&g, total + 1, total + 1)
}

/// Fock representation of a passive stage on the sector of `total` quanta.
pub fn passive_sector(stage: &PassiveStage, total: usize) -> DMatrix<Complex64> {
    let r = rotation_sector(stage.theta, total);
    DMatrix::from_fn(total + 1, total + 1, |k, kp| {
        let phase = stage.alpha1 * k as f64 + stage.alpha2 * (total - k) as f64 + stage.beta * kp as f64;
        Complex64::from_polar(r[(k, kp)], phase)
    })
}

/// Passive stage on every sector up to `max_total` quanta.
pub fn passive_sectors(stage: &PassiveStage, max_total: usize) -> Vec<DMatrix<Complex64>> {
    (0..=max_total).map(|t| passive_sector(stage, t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn squeezed_vacuum_amplitudes() {
        let r = 0.7;
        let s = squeezer_matrix(r, 30, 1, 30 + squeezer_margin(r));
        let t = r.tanh();
        for m in 0..15 {
            let expected = t.powi(m as i32) * factorial(2 * m).sqrt()
                / (2f64.powi(m as i32) * factorial(m))
                / r.cosh().sqrt();
            assert!((s[(2 * m, 0)] - expected).abs() < 1e-13, "m = {m}");
            assert!(s[(2 * m + 1, 0)].abs() < 1e-15);
        }
    }

    #[test]
    fn squeezer_is_orthogonal_on_low_levels() {
        let r = 0.5;
        let s = squeezer_matrix(r, 12, 12, 200);
        // columns of a unitary restricted to low rows are not normalised, but
        // <k|S^T S|k'> over enough rows is
        let full = squeezer_matrix(r, 200, 12, 200 + squeezer_margin(r));
        let g = full.transpose() * &full;
        assert!((g - DMatrix::identity(12, 12)).amax() < 1e-12);
        assert_eq!(s.nrows(), 12);
    }

    #[test]
    fn rotation_on_single_photon() {
        let t = 0.4;
        let r = rotation_sector(t, 1);
        // |1,0> -> cos |1,0> + sin |0,1>
        assert!((r[(1, 1)] - t.cos()).abs() < 1e-15);
        assert!((r[(0, 1)] - t.sin()).abs() < 1e-15);
    }

    #[test]
    fn rotation_hong_ou_mandel() {
        // balanced splitter on |1,1>: no coincidences
        let r = rotation_sector(std::f64::consts::FRAC_PI_4, 2);
        assert!(r[(1, 1)].abs() < 1e-15);
        assert!((r[(0, 1)].abs() - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn passive_sector_matches_mode_unitary() {
        let stage = PassiveStage {
            theta: 0.9,
            alpha1: 0.3,
            alpha2: -1.1,
            beta: 0.7,
        };
        let u = stage.unitary();
        let f = passive_sector(&stage, 1);
        // U|1,0> = U11 |1,0> + U21 |0,1>
        assert!((f[(1, 1)] - u[(0, 0)]).norm() < 1e-14);
        assert!((f[(0, 1)] - u[(1, 0)]).norm() < 1e-14);
        assert!((f[(1, 0)] - u[(0, 1)]).norm() < 1e-14);
        assert!((f[(0, 0)] - u[(1, 1)]).norm() < 1e-14);
        let f5 = passive_sector(&stage, 5);
        assert!((f5.adjoint() * &f5 - DMatrix::identity(6, 6)).camax() < 1e-13);
    }
}
