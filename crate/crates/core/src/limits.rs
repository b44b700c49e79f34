//! Resource caps shared by every enumeration in the crate.

use thiserror::Error;

/// Default ceiling on the number of canonical representatives any single
/// enumeration may visit.
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

/// Environment variable that overrides [`DEFAULT_ENUM_CAP`].
pub const ENUM_CAP_ENV: &str = "LSEXT_ENUM_CAP";

/// A requested enumeration is larger than the configured cap.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{what} needs {required} items, above the enumeration cap {cap} (set {ENUM_CAP_ENV} to raise it)")]
pub struct LimitError {
    pub what: &'static str,
    pub required: u128,
    pub cap: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub enum_cap: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enum_cap: DEFAULT_ENUM_CAP,
        }
    }
}

impl Limits {
    pub fn new(enum_cap: u64) -> Self {
        Limits { enum_cap }
    }

    /// Reads `LSEXT_ENUM_CAP`, falling back to the default when it is unset.
    /// A value that does not parse as a positive integer is reported as an
    /// error string so the CLI can surface it.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var(ENUM_CAP_ENV) {
            Ok(raw) => match raw.trim().parse::<u64>() {
                Ok(cap) if cap > 0 => Ok(Limits::new(cap)),
                _ => Err(format!("{ENUM_CAP_ENV}={raw:?} is not a positive integer")),
            },
            Err(_) => Ok(Limits::default()),
        }
    }

    pub fn check(&self, what: &'static str, required: u128) -> Result<(), LimitError> {
        if required > self.enum_cap as u128 {
            Err(LimitError {
                what,
                required,
                cap: self.enum_cap,
            })
        } else {
            Ok(())
        }
    }
}
