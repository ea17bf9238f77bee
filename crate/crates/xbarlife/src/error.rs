use thiserror::Error;

/// Errors produced by the crossbar, endurance, workload and mapping layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration value or inconsistent parameter set.
    #[error("configuration error: {0}")]
    Config(String),

    /// Matrix or vector dimensions do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The iterative solver ran out of its iteration budget.
    #[error(
        "solver did not converge: relative residual {achieved:.3e} after {iterations} \
         iterations (tolerance {tolerance:.3e})"
    )]
    Solver {
        achieved: f64,
        iterations: usize,
        tolerance: f64,
    },

    /// A physical quantity left its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A workload record failed validation; names the offending synapse.
    #[error("workload validation failed for synapse {synapse_id}: {reason}")]
    Workload { synapse_id: u64, reason: String },

    /// More synapses than crossbar cells.
    #[error("crossbar capacity exceeded: {synapses} synapses for {capacity} cells")]
    Capacity { synapses: usize, capacity: usize },

    /// A placement refers to cells or synapses that do not exist.
    #[error("placement inconsistent: {0}")]
    Placement(String),

    /// The requested metric is undefined for the given input.
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid config file: {0}")]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
