use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] repeaterlab_core::Error),

    #[error("{0}")]
    Config(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("cannot read config: {0}")]
    ConfigParse(#[from] toml::de::Error),

    #[error("cannot write config: {0}")]
    ConfigWrite(#[from] toml::ser::Error),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Infeasible(_) => 2,
            AppError::Core(repeaterlab_core::Error::LoopOpen { .. })
            | AppError::Core(repeaterlab_core::Error::Unreachable { .. }) => 2,
            _ => 1,
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
