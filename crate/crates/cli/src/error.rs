use std::fmt;

pub const EXIT_CALIBRATION: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Calibration(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Calibration(_) => EXIT_CALIBRATION,
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Calibration(m) => write!(f, "calibration failed: {m}"),
            CliError::Data(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<privhalf::Error> for CliError {
    fn from(e: privhalf::Error) -> Self {
        match e {
            privhalf::Error::CalibrationInfeasible { .. } | privhalf::Error::NonMonotoneAccountant { .. } => {
                CliError::Calibration(e.to_string())
            }
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
