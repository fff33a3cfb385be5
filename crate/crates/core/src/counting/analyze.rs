use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::CountDataset;
use super::estimate::{
    moments_and_replicates, thermal_check_from, EstimateWithCI, MomentEstimates, ThermalCheck,
    DEFAULT_BOOTSTRAP_SEED, DEFAULT_REPLICATES,
};
use crate::correlations::{
    criterion_with, invert_beta_with, DegenerateMode, EntanglementReport, InversionOptions, THETA_TOL,
};
use crate::error::{Error, Result};
use crate::gaussian::{log_negativity, StateClass, CLASS_EPS};
use crate::witnesses::{cs_ratio, witness_classify, WitnessVerdict};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub eta: f64,
    /// Carry on, with a warning, when single-mode statistics are not thermal.
    pub override_thermal: bool,
    pub replicates: usize,
    pub seed: u64,
    /// Allowed distance of each single-mode `g2` from 2, in bootstrap sigma.
    pub thermal_sigma: f64,
}

impl AnalysisOptions {
    pub fn new(eta: f64) -> Self {
        Self {
            eta,
            override_thermal: false,
            replicates: DEFAULT_REPLICATES,
            seed: DEFAULT_BOOTSTRAP_SEED,
            thermal_sigma: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub report: EntanglementReport,
    pub moments: MomentEstimates,
    pub thermal: ThermalCheck,
    /// Two-body verdict on the efficiency-corrected populations.
    pub witness: WitnessVerdict,
    /// Noise tolerance applied to `theta`.
    pub theta_tolerance: f64,
    pub lambda_minus: Option<EstimateWithCI>,
    pub log_negativity: Option<EstimateWithCI>,
    /// The `lambda_minus` interval contains 1.
    pub border_straddled: bool,
    pub warnings: Vec<String>,
}

pub fn analyze(data: &CountDataset, eta: f64) -> Result<AnalysisReport> {
    analyze_with(data, &AnalysisOptions::new(eta))
}

pub fn analyze_with(data: &CountDataset, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    let (moments, replicates) = moments_and_replicates(data, opts.replicates, opts.seed)?;
    let mut warnings = Vec::new();

    let thermal = thermal_check_from(&moments, opts.thermal_sigma);
    if !thermal.passed {
        let msg = format!(
            "single-mode statistics are not thermal: g2_1 = {:.5} +/- {:.2e}, g2_2 = {:.5} +/- {:.2e} (tolerance {} sigma)",
            moments.g2_1.point,
            moments.g2_1.std_error,
            moments.g2_2.point,
            moments.g2_2.std_error,
            opts.thermal_sigma
        );
        if !opts.override_thermal {
            return Err(Error::Hypothesis(msg));
        }
        warnings.push(format!("hypothesis override: {msg}"));
    }

    let tau = moments
        .theta
        .map_or(THETA_TOL, |t| (3.0 * t.std_error).max(THETA_TOL));
    let inversion = InversionOptions {
        theta_tolerance: tau,
        degenerate: DegenerateMode::Lenient,
    };
    let p = moments.points();
    let mut theta_out_of_range = false;
    let mut report = match criterion_with(p.n1, p.n2, p.g2_12, p.g4_12, opts.eta, &inversion) {
        Ok(r) => r,
        Err(Error::ThetaRange { theta, .. }) => {
            theta_out_of_range = true;
            warnings.push(format!(
                "theta = {theta:.6} lies outside [0, 1] by more than 3 bootstrap sigma ({tau:.3e}); moments are inconsistent with a thermal two-mode Gaussian state"
            ));
            unphysical_report(p.n1, p.n2, p.g2_12, p.g4_12, opts.eta)?
        }
        Err(e) => return Err(e),
    };
    report.observables.g2_1 = p.g2_1;
    report.observables.g2_2 = p.g2_2;
    report.observables.cs_ratio = cs_ratio(p.g2_12, p.g2_1, p.g2_2).ok();

    let witness = witness_classify(report.observables.n1, report.observables.n2, p.g2_12)?;

    // lambda_minus and lambda'_minus of every replicate, physical or not
    let reps: Vec<Option<(f64, f64)>> = replicates
        .par_iter()
        .map(|s| {
            let m = s.moments().ok()?;
            let r = criterion_with(m.n1, m.n2, m.g2_12, m.g4_12, opts.eta, &inversion).ok()?;
            let spec = r.spectrum?;
            (spec.lambda_minus > 0.0).then_some((spec.lambda_minus, spec.lambda_prime_minus))
        })
        .collect();
    let lam: Vec<f64> = reps.iter().flatten().map(|x| x.0).collect();
    let lam_prime: Vec<f64> = reps.iter().flatten().map(|x| x.1).collect();
    let skipped = reps.len() - lam.len();
    if skipped > 0 {
        warnings.push(format!(
            "{skipped} of {} bootstrap replicates could not be inverted and were left out of the intervals",
            reps.len()
        ));
    }

    if report.class == StateClass::Unphysical && !theta_out_of_range {
        if let Some(spec) = report.spectrum {
            let prime = EstimateWithCI::from_replicates(spec.lambda_prime_minus, &lam_prime);
            if spec.lambda_minus > 0.0 && prime.ci_high >= 1.0 - CLASS_EPS {
                warnings.push(format!(
                    "moments lie outside the physical region (lambda'_minus = {:.6}) by less than the sampling noise; classified from lambda_minus",
                    spec.lambda_prime_minus
                ));
                report.class = if spec.lambda_minus >= 1.0 - CLASS_EPS {
                    StateClass::Separable
                } else {
                    StateClass::Entangled
                };
                report.log_negativity = log_negativity(spec.lambda_minus).ok();
                let entangled = report.class == StateClass::Entangled;
                report.identified_pair_moment = entangled.then_some(report.beta.beta_plus);
                report.identified_coherence = entangled.then_some(report.beta.beta_minus);
            }
        }
    }

    let (lambda_minus, log_negativity) = if report.class == StateClass::Unphysical {
        (None, None)
    } else {
        let ln: Vec<f64> = lam.iter().filter_map(|&l| log_negativity(l).ok()).collect();
        (
            report
                .spectrum
                .map(|s| EstimateWithCI::from_replicates(s.lambda_minus, &lam)),
            report
                .log_negativity
                .map(|l| EstimateWithCI::from_replicates(l, &ln)),
        )
    };
    if witness_contradicts(witness.verdict, report.class) {
        warnings.push(format!(
            "two-body witness says {:?} but the full criterion says {}",
            witness.verdict, report.class
        ));
    }

    let border_straddled = lambda_minus.is_some_and(|l| l.contains(1.0));
    if border_straddled {
        warnings.push("the lambda_minus interval contains 1; the verdict is not resolved by the data".into());
    }

    Ok(AnalysisReport {
        report,
        moments,
        thermal,
        witness,
        theta_tolerance: tau,
        lambda_minus,
        log_negativity,
        border_straddled,
        warnings,
    })
}

fn unphysical_report(n1: f64, n2: f64, g2: f64, g4: f64, eta: f64) -> Result<EntanglementReport> {
    let loose = InversionOptions {
        theta_tolerance: f64::INFINITY,
        degenerate: DegenerateMode::Lenient,
    };
    let mut r = criterion_with(n1, n2, g2, g4, eta, &loose)?;
    r.class = StateClass::Unphysical;
    r.spectrum = None;
    r.log_negativity = None;
    r.identified_pair_moment = None;
    r.identified_coherence = None;
    // beta from theta clamped into [0, 1]
    r.beta = invert_beta_with(r.observables.n1, r.observables.n2, g2, g4, &loose)?;
    Ok(r)
}

fn witness_contradicts(w: crate::witnesses::Verdict, class: StateClass) -> bool {
    use crate::witnesses::Verdict;
    matches!(
        (w, class),
        (Verdict::Entangled, StateClass::Separable) | (Verdict::Separable, StateClass::Entangled)
    )
}
