use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{at}: syntax error: {message}")]
    Syntax { at: Location, message: String },
    #[error("{at}: unsafe clause: variable {variable} does not occur in a positive body literal")]
    Unsafe { at: Location, variable: String },
    #[error("{at}: anonymous variable `_` is not allowed in a clause head")]
    AnonymousInHead { at: Location },
}

impl ParseError {
    pub fn syntax(at: Location, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            at,
            message: message.into(),
        }
    }

    pub fn location(&self) -> Location {
        match self {
            ParseError::Syntax { at, .. }
            | ParseError::Unsafe { at, .. }
            | ParseError::AnonymousInHead { at } => *at,
        }
    }
}
