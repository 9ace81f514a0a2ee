//! JSON config file. Field names follow the library types; flags win over the file.

use std::path::Path;

use serde::Deserialize;
use tongue_core::scan::ScanGrid;
use tongue_core::svg::SvgStyle;
use tongue_core::verify::VerifyPlan;
use tongue_core::{ForcingProfile, IntegratorConfig};

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub mu: Option<f64>,
    pub k: Option<i64>,
    pub z: Option<f64>,
    pub a_min: Option<f64>,
    pub a_max: Option<f64>,
    pub a_steps: Option<usize>,
    pub b_min: Option<f64>,
    pub b_max: Option<f64>,
    pub b_steps: Option<usize>,
    pub k_range: Option<(i64, i64)>,
    pub tol_a: Option<f64>,
    pub workers: Option<usize>,
    pub format: Option<String>,
    pub periods: Option<usize>,
    pub forcing: Option<ForcingProfile>,
    pub integrator: Option<IntegratorConfig>,
    pub grid: Option<ScanGrid>,
    pub plan: Option<VerifyPlan>,
    pub style: Option<SvgStyle>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }
}
