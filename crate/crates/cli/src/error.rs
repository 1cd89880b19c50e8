use std::fmt;

/// Pipeline failure, one variant per exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Missing(String),
    HashMismatch(String),
    ResourceCap(String),
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Missing(_) => 3,
            Self::HashMismatch(_) => 4,
            Self::ResourceCap(_) => 5,
            Self::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(m) => write!(f, "configuration error: {m}"),
            Self::Missing(m) => write!(f, "missing input: {m}"),
            Self::HashMismatch(m) => write!(f, "{m}"),
            Self::ResourceCap(m) => write!(f, "{m}"),
            Self::Other(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<mpi3d::Error> for CliError {
    fn from(e: mpi3d::Error) -> Self {
        use mpi3d::Error as E;
        let msg = e.to_string();
        match e {
            E::Config(_) | E::Parse { .. } | E::Domain(_) | E::Unsupported(_) => Self::Config(msg),
            E::HashMismatch { .. } => Self::HashMismatch(msg),
            E::ResourceCap(_) => Self::ResourceCap(msg),
            E::Io(io) if io.kind() == std::io::ErrorKind::NotFound => Self::Missing(msg),
            E::Io(_) => Self::Other(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::NotFound {
            Self::Missing(e.to_string())
        } else {
            Self::Other(e.to_string())
        }
    }
}
