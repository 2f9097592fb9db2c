use std::path::Path;

use phaseforest::Error;

pub const INTERNAL: u8 = 1;
pub const USAGE: u8 = 2;
pub const INPUT: u8 = 3;
pub const IO: u8 = 4;
pub const NO_SOLUTION: u8 = 5;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: USAGE, message: message.into() }
    }

    pub fn no_solution(message: impl Into<String>) -> Self {
        Failure { code: NO_SOLUTION, message: message.into() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Failure { code: IO, message: format!("{}: {e}", path.display()) }
    }

    pub fn input(path: &Path, message: impl std::fmt::Display) -> Self {
        Failure { code: INPUT, message: format!("{}: {message}", path.display()) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) => USAGE,
            Error::Parse { .. } | Error::UnsupportedVersion(_) | Error::Validation(_) => INPUT,
            Error::Io { .. } => IO,
            Error::Lp(_) | Error::Internal(_) => INTERNAL,
        };
        Failure { code, message: e.to_string() }
    }
}
