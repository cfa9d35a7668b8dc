use thiserror::Error;

/// Scatterer whose echo would fall outside the recorded fast-time window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowViolation {
    pub scatterer: usize,
    pub pulse: usize,
    pub delay_s: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {message} (condition estimate {condition:.3e})")]
    Numerical { message: String, condition: f64 },

    #[error("{} scatterer(s) outside the fast-time window, first: scatterer {} at pulse {} (delay {:.9e} s)",
        .0.len(), .0[0].scatterer, .0[0].pulse, .0[0].delay_s)]
    OutsideWindow(Vec<WindowViolation>),

    #[error("range track leaves the raster at pulse {pulse} (bin {bin:.2})")]
    TrackOutside { pulse: usize, bin: f64 },

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("metric error: {0}")]
    Metric(String),

    #[error("config {line}:{column}: `{key}`: {message}")]
    Config {
        line: usize,
        column: usize,
        key: String,
        message: String,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
