#![allow(dead_code)]

use fcsent::gaussian::is_bona_fide;
use fcsent::ThermalTwoModeState;
use proptest::prelude::*;

/// Magnitudes drawn inside the Cauchy-Schwarz box, kept when bona fide.
pub fn physical_state(max_n: f64) -> impl Strategy<Value = ThermalTwoModeState> {
    (0.01..max_n, 0.01..max_n, 0.0..1.0f64, 0.0..1.0f64)
        .prop_map(|(n1, n2, u, v)| {
            let n = n1 * n2;
            ThermalTwoModeState {
                n1,
                n2,
                m_pair: u * (n + n1.min(n2)).sqrt(),
                m_coh: v * n.sqrt(),
            }
        })
        .prop_filter("bona fide", |s| is_bona_fide(s).unwrap_or(false))
}

/// Any non-negative magnitudes, physical or not.
pub fn any_state(max: f64) -> impl Strategy<Value = ThermalTwoModeState> {
    (0.0..max, 0.0..max, 0.0..max, 0.0..max).prop_map(|(n1, n2, m_pair, m_coh)| ThermalTwoModeState {
        n1,
        n2,
        m_pair,
        m_coh,
    })
}

/// First-order error of the inversion caused only by `g2` and `g4` being
/// rounded to doubles, as `(bound on |beta_plus - hi|, bound on |beta_minus - lo|)`.
pub fn inversion_rounding_bound(n1: f64, n2: f64, g2: f64, g4: f64) -> (f64, f64) {
    let x = g2 - 1.0;
    let n = n1 * n2;
    let dtheta = fcsent::correlations::theta_resolution(g2, g4) + 4.0 * f64::EPSILON;
    let theta = fcsent::correlations::theta_from_g(g2, g4).unwrap_or(0.0).clamp(0.0, 1.0);
    let s = (1.0 - theta).sqrt();
    let ds = if s > 0.0 { (dtheta / (2.0 * s)).min(dtheta.sqrt()) } else { dtheta.sqrt() };
    // beta^2 = n x (1 +/- s) / 2
    let d_sq = n * x * ds / 2.0 + 4.0 * f64::EPSILON * n * x;
    let plus = (n * x * (1.0 + s) / 2.0).sqrt();
    (d_sq / plus.max(f64::MIN_POSITIVE), d_sq.sqrt())
}
