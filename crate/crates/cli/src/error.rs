use std::fmt;

/// Exit codes of the `veccause` binary.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    /// Unreadable or inconsistent input, bad flags or config.
    pub const INPUT: i32 = 2;
    pub const INSUFFICIENT_SAMPLES: i32 = 3;
    /// Degenerate data or a failed numeric kernel.
    pub const NUMERIC: i32 = 4;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: exit::INPUT,
            message: message.into(),
        }
    }

    pub fn samples(message: impl Into<String>) -> Self {
        Self {
            code: exit::INSUFFICIENT_SAMPLES,
            message: message.into(),
        }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self {
            code: exit::NUMERIC,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: exit::IO,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Exit code for a statistics failure: sample shortages get their own code.
pub fn from_stats(err: &veccause::stats::StatsError) -> CliError {
    use veccause::stats::StatsError;
    match err {
        StatsError::InsufficientSamples { .. } => CliError::samples(err.to_string()),
        StatsError::InvalidInput(_) => CliError::input(err.to_string()),
        StatsError::Degenerate(_) => CliError::numeric(err.to_string()),
    }
}

pub fn from_algorithm(err: &veccause::algorithms::AlgorithmError) -> CliError {
    use veccause::algorithms::AlgorithmError;
    use veccause::citest::CiError;
    match err {
        AlgorithmError::InvalidAlpha(_) => CliError::input(err.to_string()),
        AlgorithmError::Test { source, .. } => match source {
            CiError::Stats { source: s, .. } | CiError::Data(s) => {
                let mut e = from_stats(s);
                e.message = err.to_string();
                e
            }
            CiError::InvalidQuery { .. } | CiError::Setup(_) | CiError::Graph(_) => {
                CliError::input(err.to_string())
            }
        },
    }
}
