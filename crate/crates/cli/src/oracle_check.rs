use fcsent::correlations::{g2_from_state, g4_from_state};
use fcsent::gaussian::{is_bona_fide, symplectic_spectrum};
use fcsent::oracle::{
    field_moments, moment_cutoff, number_moments, ppt_negativity, thermal_tail, synthesize_state,
    JointNumberDistribution, SynthesisOptions, MAX_CUTOFF,
};
use fcsent::ThermalTwoModeState;
use rayon::prelude::*;

const PRUNE_BOUND: f64 = 1e-15;
const POPULATION_RANGE: (f64, f64) = (0.1, 1.0);
/// Pair and coherence moments as fractions of their Cauchy-Schwarz bounds.
const CORRELATIONS: [(f64, f64); 3] = [(0.6, 0.0), (0.0, 0.6), (0.5, 0.3)];

#[derive(Debug, Clone)]
pub struct CaseResult {
    pub state: ThermalTwoModeState,
    pub cutoff: usize,
    pub tail_mass: f64,
    /// `(wick, ppt)` deviations, or why synthesis failed.
    pub outcome: Result<(f64, f64), String>,
}

#[derive(Debug, Clone)]
pub struct Summary {
    pub cases: Vec<CaseResult>,
    pub tolerance: f64,
}

pub fn grid(resolution: usize) -> Vec<ThermalTwoModeState> {
    let (lo, hi) = POPULATION_RANGE;
    let pops: Vec<f64> = if resolution == 1 {
        vec![hi]
    } else {
        (0..resolution)
            .map(|i| lo + (hi - lo) * i as f64 / (resolution - 1) as f64)
            .collect()
    };
    let mut out = Vec::new();
    for &n1 in &pops {
        for &n2 in &pops {
            for (u, v) in CORRELATIONS {
                let n = n1 * n2;
                let s = ThermalTwoModeState {
                    n1,
                    n2,
                    m_pair: u * (n + n1.min(n2)).sqrt(),
                    m_coh: v * n.sqrt(),
                };
                if is_bona_fide(&s).unwrap_or(false) {
                    out.push(s);
                }
            }
        }
    }
    out
}

fn synthesis_options(s: &ThermalTwoModeState, cutoff: Option<usize>, tolerance: f64) -> SynthesisOptions {
    // the bound also sets how finely thermal inputs are pruned
    let (cutoff, tail_bound) = match cutoff {
        Some(c) => (c, (2.0 * thermal_tail(s.n1, s.n2, c)).max(PRUNE_BOUND)),
        None => {
            let tail = (0..=MAX_CUTOFF)
                .find(|&n| thermal_tail(s.n1, s.n2, n) < PRUNE_BOUND)
                .unwrap_or(MAX_CUTOFF);
            (tail.max(moment_cutoff(s.n1, s.n2, 4, tolerance)), PRUNE_BOUND)
        }
    };
    SynthesisOptions {
        tail_bound,
        ..SynthesisOptions::with_cutoff(cutoff)
    }
}

fn check(s: &ThermalTwoModeState, cutoff: Option<usize>, tolerance: f64) -> CaseResult {
    let opts = synthesis_options(s, cutoff, tolerance);
    let mut result = CaseResult {
        state: *s,
        cutoff: opts.cutoff.unwrap_or(0),
        tail_mass: thermal_tail(s.n1, s.n2, opts.cutoff.unwrap_or(0)),
        outcome: Err(String::new()),
    };
    let rho = match synthesize_state(s, &opts) {
        Ok(rho) => rho,
        Err(e) => {
            result.outcome = Err(e.to_string());
            return result;
        }
    };
    result.tail_mass = rho.tail_mass();
    result.outcome = (|| {
        let f = field_moments(&rho);
        let wick_state = ThermalTwoModeState {
            n1: f.n1,
            n2: f.n2,
            m_pair: f.pair.norm(),
            m_coh: f.coherence.norm(),
        };
        let m = number_moments(&JointNumberDistribution::from_density(&rho)).map_err(|e| e.to_string())?;
        let g2 = g2_from_state(&wick_state).map_err(|e| e.to_string())?;
        let g4 = g4_from_state(&wick_state).map_err(|e| e.to_string())?;
        let wick = [
            (m.g2_12 - g2).abs(),
            (m.g4_12 - g4).abs(),
            (m.g2_1 - 2.0).abs(),
            (m.g2_2 - 2.0).abs(),
            (f.n1 - s.n1).abs(),
            (f.n2 - s.n2).abs(),
            (f.pair.norm() - s.m_pair).abs(),
            (f.coherence.norm() - s.m_coh).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let lam = symplectic_spectrum(s).map_err(|e| e.to_string())?.lambda_minus.min(1.0);
        let ppt = (ppt_negativity(&rho).lambda_minus() - lam).abs();
        Ok((wick, ppt))
    })();
    result
}

pub fn run(resolution: usize, cutoff: Option<usize>, tolerance: f64) -> Summary {
    let cases = grid(resolution)
        .par_iter()
        .map(|s| check(s, cutoff, tolerance))
        .collect();
    Summary { cases, tolerance }
}

impl CaseResult {
    pub fn violation(&self, tolerance: f64) -> Option<String> {
        let s = &self.state;
        let head = format!(
            "n1={} n2={} m_pair={:.6} m_coh={:.6} cutoff={} tail_mass={:.3e}",
            s.n1, s.n2, s.m_pair, s.m_coh, self.cutoff, self.tail_mass
        );
        let head = if self.tail_mass > tolerance {
            format!("{head} (tail mass above tolerance)")
        } else {
            head
        };
        match &self.outcome {
            Err(e) => Some(format!("{head}: {e}")),
            Ok((w, _)) if !(*w <= tolerance) => Some(format!("{head}: Wick deviation {w:.3e}")),
            Ok((_, p)) if !(*p <= tolerance) => Some(format!("{head}: PPT deviation {p:.3e}")),
            Ok(_) => None,
        }
    }
}

impl Summary {
    pub fn violations(&self) -> Vec<String> {
        self.cases.iter().filter_map(|c| c.violation(self.tolerance)).collect()
    }

    pub fn listing(&self) -> String {
        let mut out = format!(
            "{:>8} {:>8} {:>10} {:>10} {:>6} {:>10} {:>10} {:>10}\n",
            "n1", "n2", "m_pair", "m_coh", "cutoff", "tail", "wick", "ppt"
        );
        for c in &self.cases {
            let s = &c.state;
            let (w, p) = match &c.outcome {
                Ok((w, p)) => (format!("{w:.3e}"), format!("{p:.3e}")),
                Err(_) => ("failed".into(), "failed".into()),
            };
            out += &format!(
                "{:>8.4} {:>8.4} {:>10.6} {:>10.6} {:>6} {:>10.3e} {:>10} {:>10}\n",
                s.n1, s.n2, s.m_pair, s.m_coh, c.cutoff, c.tail_mass, w, p
            );
        }
        out
    }

    pub fn table(&self) -> String {
        let ok: Vec<(f64, f64)> = self.cases.iter().filter_map(|c| c.outcome.clone().ok()).collect();
        let failed_synth = self.cases.len() - ok.len();
        let row = |name: &str, devs: Vec<f64>| {
            let bad = devs.iter().filter(|d| !(**d <= self.tolerance)).count() + failed_synth;
            let max = devs.iter().cloned().fold(0.0, f64::max);
            format!(
                "{name:<6} {:>6} {:>12.3e} {:>12.3e} {:>10}\n",
                self.cases.len(),
                max,
                self.tolerance,
                bad
            )
        };
        let mut out = format!("{:<6} {:>6} {:>12} {:>12} {:>10}\n", "check", "states", "max_dev", "tolerance", "violations");
        out += &row("wick", ok.iter().map(|x| x.0).collect());
        out += &row("ppt", ok.iter().map(|x| x.1).collect());
        let max_tail = self.cases.iter().map(|c| c.tail_mass).fold(0.0, f64::max);
        let max_cut = self.cases.iter().map(|c| c.cutoff).max().unwrap_or(0);
        out += &format!("max cutoff {max_cut}, max tail mass {max_tail:.3e}\n");
        out
    }
}
