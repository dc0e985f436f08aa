use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0} check(s) failed")]
    Assertion(usize),

    #[error(transparent)]
    Core(#[from] christoffel::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assertion(_) => 1,
            CliError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Assertion(2).exit_code(), 1);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        let numerical = christoffel::Error::NonConvergence { achieved: 1e-3, target: 1e-10 };
        assert!(numerical.is_numerical());
        assert_eq!(CliError::from(numerical).exit_code(), 3);
        assert_eq!(CliError::from(christoffel::Error::InvalidParameter("n".into())).exit_code(), 2);
    }
}
