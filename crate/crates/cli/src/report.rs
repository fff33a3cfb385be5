use fcsent::correlations::{BetaPair, CorrelationObservables};
use fcsent::counting::{AnalysisReport, EstimateWithCI, MomentEstimates, ThermalCheck};
use fcsent::witnesses::WitnessVerdict;
use fcsent::{StateClass, SymplecticSpectrum};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub data: String,
    pub eta: f64,
    pub override_thermal: bool,
    pub seed: u64,
    pub bootstrap: usize,
    pub shots: usize,
}

/// JSON document written by `analyze`. Field order is the key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub inputs: Inputs,
    /// Efficiency-corrected populations with the measured correlations.
    pub observables: CorrelationObservables,
    pub moments: MomentEstimates,
    pub theta_tolerance: f64,
    pub beta: BetaPair,
    pub spectrum: Option<SymplecticSpectrum>,
    pub class: StateClass,
    pub log_negativity: Option<f64>,
    pub lambda_minus_ci: Option<EstimateWithCI>,
    pub log_negativity_ci: Option<EstimateWithCI>,
    pub border_straddled: bool,
    pub identified_pair_moment: Option<f64>,
    pub identified_coherence: Option<f64>,
    pub witness: WitnessVerdict,
    pub thermal: ThermalCheck,
    pub warnings: Vec<String>,
}

impl ReportDocument {
    pub fn new(inputs: Inputs, a: AnalysisReport) -> Self {
        let r = a.report;
        Self {
            schema_version: SCHEMA_VERSION.into(),
            inputs,
            observables: r.observables,
            moments: a.moments,
            theta_tolerance: a.theta_tolerance,
            beta: r.beta,
            spectrum: r.spectrum,
            class: r.class,
            log_negativity: r.log_negativity,
            lambda_minus_ci: a.lambda_minus,
            log_negativity_ci: a.log_negativity,
            border_straddled: a.border_straddled,
            identified_pair_moment: r.identified_pair_moment,
            identified_coherence: r.identified_coherence,
            witness: a.witness,
            thermal: a.thermal,
            warnings: a.warnings,
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}
