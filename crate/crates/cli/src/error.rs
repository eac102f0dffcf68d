use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for configuration and output-directory problems, 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<gravloc::Error> for CliError {
    fn from(e: gravloc::Error) -> Self {
        use gravloc::Error as E;
        match e {
            E::Config(_) | E::Domain(_) | E::Parse { .. } => CliError::Config(e.to_string()),
            E::Numerical(_) | E::Data(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io { path: "csv output".into(), source: std::io::Error::other(e.to_string()) }
    }
}
