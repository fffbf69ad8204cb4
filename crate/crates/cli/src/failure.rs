use std::fmt;

/// Command failure, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Exit 2.
    Usage(String),
    /// Exit 3: unreadable or malformed input.
    Format(String),
    /// Exit 4.
    Adapter(String),
    /// Exit 1.
    Other(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Format(_) => 3,
            Failure::Adapter(_) => 4,
            Failure::Other(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Format(m) | Failure::Adapter(m) | Failure::Other(m) => {
                f.write_str(m)
            }
        }
    }
}

impl From<clickbench::Error> for Failure {
    fn from(e: clickbench::Error) -> Self {
        use clickbench::Error as E;
        match e {
            E::Format { .. } | E::Io { .. } => Failure::Format(e.to_string()),
            E::Adapter(_) => Failure::Adapter(e.to_string()),
            E::InvalidParameter(_) => Failure::Usage(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

/// Failures writing outputs.
pub fn output(path: &std::path::Path, e: impl fmt::Display) -> Failure {
    Failure::Other(format!("{}: {e}", path.display()))
}
