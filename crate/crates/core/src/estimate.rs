use serde::{Deserialize, Serialize};

/// Integration bookkeeping attached to an estimate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Number of integrand evaluations (grid nodes or quadrature points).
    pub node_count: usize,
    /// Discount range covered by the grid.
    pub d_range: Option<[f64; 2]>,
    /// Concentration range covered by the grid.
    pub alpha_range: Option<[f64; 2]>,
    /// Share of posterior weight captured by the grid, relative to a grid twice as wide.
    pub mass_captured: Option<f64>,
    /// True when the curvature at the mode was not usable and the semi-infinite rule was used.
    pub fallback_grid: bool,
    pub warnings: Vec<String>,
}

/// Entropy point estimate in nats with optional posterior spread.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub mean: f64,
    /// Posterior standard deviation; `None` for point estimators.
    pub std: Option<f64>,
    pub map_d: Option<f64>,
    pub map_alpha: Option<f64>,
    pub log_evidence_at_map: Option<f64>,
    pub diagnostics: Diagnostics,
}

impl EntropyEstimate {
    pub fn point(mean: f64) -> Self {
        EntropyEstimate {
            mean,
            std: None,
            map_d: None,
            map_alpha: None,
            log_evidence_at_map: None,
            diagnostics: Diagnostics::default(),
        }
    }

    /// `mean ± k·std`, or a degenerate interval when no std is available.
    pub fn interval(&self, k: f64) -> (f64, f64) {
        let s = self.std.unwrap_or(0.0);
        (self.mean - k * s, self.mean + k * s)
    }
}
