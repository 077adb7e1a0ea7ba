use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("line {line}: {reason}")]
    ParseError { line: usize, reason: String },
    #[error("non-uniform grid along {axis}: coordinate {value} is off the lattice")]
    NonUniformGrid { axis: &'static str, value: f64 },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Model(#[from] ouwedge::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 1 usage, 2 data, 3 numeric failure.
    pub fn exit_code(&self) -> u8 {
        use ouwedge::Error as E;
        match self {
            CliError::Usage(_) => 1,
            CliError::ParseError { .. } | CliError::NonUniformGrid { .. } | CliError::Io { .. } => 2,
            CliError::Model(e) => match e {
                E::DuplicateSites(..) | E::TooFewPoints { .. } | E::NoPairs { .. } => 2,
                E::InvalidCumulants { .. }
                | E::DegenerateVariogram { .. }
                | E::OptimizerNoBracket { .. }
                | E::SingularCorrelation => 3,
                _ => 1,
            },
        }
    }
}

/// Short machine-readable code for a model error, used in experiment rows.
pub fn reason_code(e: &ouwedge::Error) -> &'static str {
    use ouwedge::Error as E;
    match e {
        E::InvalidParams(_) => "invalid_params",
        E::InvalidGrid(_) => "invalid_grid",
        E::InvalidSeed(_) => "invalid_seed",
        E::InvalidCumulants { .. } => "invalid_cumulants",
        E::OddTruncation { .. } => "odd_truncation",
        E::GridMismatch { .. } => "grid_mismatch",
        E::EvenExtent { .. } => "even_extent",
        E::LengthMismatch { .. } => "length_mismatch",
        E::NonIntegerTruncation { .. } => "non_integer_truncation",
        E::UnsupportedShape { .. } => "unsupported_shape",
        E::NoPairs { .. } => "no_pairs",
        E::TooFewPoints { .. } => "too_few_points",
        E::DegenerateVariogram { .. } => "degenerate_variogram",
        E::OptimizerNoBracket { .. } => "optimizer_no_bracket",
        E::DuplicateSites(..) => "duplicate_sites",
        E::SingularCorrelation => "singular_correlation",
        E::NotGaussian => "not_gaussian",
    }
}
