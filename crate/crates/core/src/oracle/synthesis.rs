use nalgebra::DMatrix;
use num_complex::Complex64;

use super::density::{FockDensityMatrix, SectorLayout, SectorSymmetry};
use super::fock::{passive_sectors, squeezer_margin, squeezer_matrix};
use super::symplectic::{circuit_for, GaussianCircuit};
use crate::error::{Error, Result};
use crate::gaussian::{build_covariance, is_bona_fide, ThermalTwoModeState};
use crate::witnesses::cauchy_schwarz_bounds;

/// Largest cutoff picked automatically.
pub const AUTO_CUTOFF_CAP: usize = 30;
/// Largest cutoff accepted at all.
pub const MAX_CUTOFF: usize = 128;
pub const DEFAULT_TAIL_BOUND: f64 = 1e-10;

/// Rounding slack allowed on top of the requested tail bound.
const TAIL_SLACK: f64 = 1e-12;
/// Thermal inputs processed per accumulation pass.
const CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisOptions {
    /// `None` selects the smallest cutoff meeting `tail_bound`, at most
    /// [`AUTO_CUTOFF_CAP`].
    pub cutoff: Option<usize>,
    pub tail_bound: f64,
    pub phase_pair: f64,
    pub phase_coh: f64,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self {
            cutoff: None,
            tail_bound: DEFAULT_TAIL_BOUND,
            phase_pair: 0.0,
            phase_coh: 0.0,
        }
    }
}

impl SynthesisOptions {
    pub fn with_cutoff(cutoff: usize) -> Self {
        Self {
            cutoff: Some(cutoff),
            ..Self::default()
        }
    }
}

fn ratio(n: f64) -> f64 {
    n / (1.0 + n)
}

/// Upper bound on `P(n1 > N) + P(n2 > N)` for thermal marginals.
pub fn thermal_tail(n1: f64, n2: f64, cutoff: usize) -> f64 {
    let e = (cutoff + 1) as i32;
    ratio(n1).powi(e) + ratio(n2).powi(e)
}

/// Smallest cutoff whose thermal tail is below `bound`, capped.
pub fn auto_cutoff(n1: f64, n2: f64, bound: f64) -> usize {
    (0..=AUTO_CUTOFF_CAP)
        .find(|&n| thermal_tail(n1, n2, n) < bound)
        .unwrap_or(AUTO_CUTOFF_CAP)
}

/// Smallest cutoff at which the thermal tail of `k^order`, normalised by
/// `min(n1, n2)^order`, is below `tolerance`. Normalised moments of small
/// populations need far more levels than the bare tail mass suggests.
pub fn moment_cutoff(n1: f64, n2: f64, order: u32, tolerance: f64) -> usize {
    let norm = n1.min(n2).powi(order as i32);
    let err = |n: usize| -> f64 {
        let k = (n + 1) as f64;
        [n1, n2]
            .iter()
            .map(|&m| k.powi(order as i32) * ratio(m).powi(n as i32 + 1) / (1.0 - ratio(m)))
            .sum::<f64>()
            / norm
    };
    (0..=MAX_CUTOFF).find(|&n| err(n) < tolerance).unwrap_or(MAX_CUTOFF)
}

/// Symmetry that the target state is guaranteed to have.
pub fn symmetry_for(target: &ThermalTwoModeState) -> SectorSymmetry {
    if target.m_coh == 0.0 {
        SectorSymmetry::Difference
    } else if target.m_pair == 0.0 {
        SectorSymmetry::Total
    } else {
        SectorSymmetry::Parity
    }
}

/// Thermal input pairs `(k1, k2, weight)` by decreasing weight, dropping at
/// most `drop` of the total mass.
fn thermal_inputs(nbar: [f64; 2], drop: f64) -> Vec<(usize, usize, f64)> {
    let x = nbar.map(ratio);
    let kmax = x.map(|x| {
        if x == 0.0 {
            0
        } else {
            ((drop * 1e-3).ln() / x.ln()).ceil().max(0.0) as usize
        }
    });
    let outside: f64 = (0..2).map(|m| x[m].powi(kmax[m] as i32 + 1)).sum();
    let mut pairs = Vec::with_capacity((kmax[0] + 1) * (kmax[1] + 1));
    for k1 in 0..=kmax[0] {
        let p1 = (1.0 - x[0]) * x[0].powi(k1 as i32);
        for k2 in 0..=kmax[1] {
            let p2 = (1.0 - x[1]) * x[1].powi(k2 as i32);
            pairs.push((k1, k2, p1 * p2));
        }
    }
    pairs.sort_by(|a, b| b.2.total_cmp(&a.2));
    let mut suffix = outside;
    let mut keep = pairs.len();
    while keep > 1 && suffix + pairs[keep - 1].2 <= drop {
        suffix += pairs[keep - 1].2;
        keep -= 1;
    }
    pairs.truncate(keep);
    pairs
}

/// Density matrix of a thermal two-mode Gaussian state in a truncated Fock
/// space, built by running its preparation circuit on every component of
/// the thermal input.
pub fn synthesize_state(
    target: &ThermalTwoModeState,
    opts: &SynthesisOptions,
) -> Result<FockDensityMatrix> {
    target.validate()?;
    if !is_bona_fide(target)? {
        let why = if cauchy_schwarz_bounds(target) {
            "symplectic eigenvalue below one".to_string()
        } else {
            format!(
                "Cauchy-Schwarz bound violated (m_pair^2 <= n1 n2 + min(n1, n2), m_coh^2 <= n1 n2): {target:?}"
            )
        };
        return Err(Error::NotBonaFide(why));
    }
    if !(opts.tail_bound > 0.0) {
        return Err(Error::Config("tail bound must be positive".into()));
    }
    let cutoff = match opts.cutoff {
        Some(n) if n > MAX_CUTOFF => {
            return Err(Error::Config(format!("cutoff {n} exceeds the maximum {MAX_CUTOFF}")))
        }
        Some(n) => n,
        None => auto_cutoff(target.n1, target.n2, opts.tail_bound),
    };
    let cov = build_covariance(target, opts.phase_pair, opts.phase_coh);
    let circuit = circuit_for(&cov)?;
    let layout = SectorLayout::new(cutoff, symmetry_for(target));
    let blocks = run_circuit(&circuit, &layout, opts.tail_bound);
    let rho = FockDensityMatrix::from_blocks(layout, blocks);
    if rho.tail_mass() > opts.tail_bound + TAIL_SLACK {
        return Err(Error::CutoffTooSmall {
            cutoff,
            tail_mass: rho.tail_mass(),
            bound: opts.tail_bound,
        });
    }
    Ok(rho)
}

fn run_circuit(
    circuit: &GaussianCircuit,
    layout: &SectorLayout,
    tail_bound: f64,
) -> Vec<DMatrix<Complex64>> {
    let n = layout.cutoff;
    let top = 2 * n;
    let drop = (0.01 * tail_bound).max(1e-17);
    let inputs = thermal_inputs(circuit.thermal, drop);
    let t_in = inputs.iter().map(|&(a, b, _)| a + b).max().unwrap_or(0);

    let v = passive_sectors(&circuit.stage1, t_in);
    let w = passive_sectors(&circuit.stage2, top);
    let sq: Vec<DMatrix<f64>> = circuit
        .squeezing
        .iter()
        .map(|&r| squeezer_matrix(r, top + 1, t_in + 1, top + t_in + 1 + squeezer_margin(r)))
        .collect();

    let dims: Vec<usize> = layout.bases.iter().map(Vec::len).collect();
    let mut acc_re: Vec<DMatrix<f64>> = dims.iter().map(|&d| DMatrix::zeros(d, d)).collect();
    let mut acc_im: Vec<DMatrix<f64>> = acc_re.clone();

    for chunk in inputs.chunks(CHUNK) {
        let cols = chunk.len();
        let mut re: Vec<DMatrix<f64>> = dims.iter().map(|&d| DMatrix::zeros(d, cols)).collect();
        let mut im: Vec<DMatrix<f64>> = re.clone();
        let mut psi2 = vec![Complex64::new(0.0, 0.0); top + 1];
        for (col, &(k1, k2, weight)) in chunk.iter().enumerate() {
            let amp = weight.sqrt();
            let t0 = k1 + k2;
            let psi1: Vec<Complex64> = (0..=t0).map(|k| v[t0][(k, k1)]).collect();
            for total in (t0 % 2..=top).step_by(2) {
                for (i, slot) in psi2.iter_mut().enumerate().take(total + 1) {
                    let l = total - i;
                    let mut z = Complex64::new(0.0, 0.0);
                    for (k, &p) in psi1.iter().enumerate() {
                        if (i + k) % 2 != 0 {
                            continue;
                        }
                        z += p * (sq[0][(i, k)] * sq[1][(l, t0 - k)]);
                    }
                    *slot = z;
                }
                let u = &w[total];
                let lo = total.saturating_sub(n);
                let hi = total.min(n);
                for i in lo..=hi {
                    let mut z = Complex64::new(0.0, 0.0);
                    for (kp, &p) in psi2.iter().enumerate().take(total + 1) {
                        z += u[(i, kp)] * p;
                    }
                    z *= amp;
                    let (s, pos) = layout.locate(i, total - i);
                    re[s][(pos, col)] = z.re;
                    im[s][(pos, col)] = z.im;
                }
            }
        }
        for s in 0..dims.len() {
            if dims[s] == 0 {
                continue;
            }
            let (r, i) = (&re[s], &im[s]);
            acc_re[s] += r * r.transpose() + i * i.transpose();
            acc_im[s] += i * r.transpose() - r * i.transpose();
        }
    }
    acc_re
        .into_iter()
        .zip(acc_im)
        .map(|(r, i)| {
            let m = DMatrix::from_fn(r.nrows(), r.ncols(), |a, b| Complex64::new(r[(a, b)], i[(a, b)]));
            (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
        })
        .collect()
}
