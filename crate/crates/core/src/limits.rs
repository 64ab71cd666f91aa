//! Size caps and solver budgets shared by every construction.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_TOTAL_BITS: u32 = 20;
pub const DEFAULT_MAX_EXPLICIT_VERTICES: usize = 1 << 20;
pub const DEFAULT_MAX_LP_VERTICES: usize = 1 << 12;
pub const DEFAULT_MAX_COLORING_VERTICES: usize = 1 << 10;

/// Environment variable overriding [`DEFAULT_MAX_TOTAL_BITS`].
pub const MAX_BITS_ENV: &str = "CONFDUAL_MAX_BITS";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Cap on the total number of bits of a confusion graph.
    pub max_total_bits: u32,
    /// Cap on vertices of any explicitly materialized undirected graph.
    pub max_explicit_vertices: usize,
    /// Cap on vertices for the fractional-chromatic LP.
    pub max_lp_vertices: usize,
    /// Cap on vertices for exact chromatic number search.
    pub max_coloring_vertices: usize,
    /// Wall-clock budget for each exact solve.
    pub timeout: Option<Duration>,
    /// Worker threads; 1 is the reproducible reference mode.
    pub threads: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_total_bits: DEFAULT_MAX_TOTAL_BITS,
            max_explicit_vertices: DEFAULT_MAX_EXPLICIT_VERTICES,
            max_lp_vertices: DEFAULT_MAX_LP_VERTICES,
            max_coloring_vertices: DEFAULT_MAX_COLORING_VERTICES,
            timeout: None,
            threads: 1,
        }
    }
}

impl Limits {
    /// Defaults, with the bit cap taken from `CONFDUAL_MAX_BITS` when set.
    pub fn from_env() -> Result<Self> {
        let mut limits = Limits::default();
        if let Ok(value) = std::env::var(MAX_BITS_ENV) {
            limits.max_total_bits = value
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("{MAX_BITS_ENV}={value:?} is not an integer")))?;
        }
        Ok(limits)
    }

    pub fn budget(&self) -> Budget {
        Budget {
            deadline: self.timeout.map(|t| Instant::now() + t),
        }
    }

    pub(crate) fn check_bits(&self, total_bits: u32) -> Result<()> {
        if total_bits > self.max_total_bits || total_bits >= 63 {
            return Err(Error::cap(
                "total bits",
                self.max_total_bits as u64,
                total_bits as u64,
            ));
        }
        Ok(())
    }

    pub(crate) fn check_explicit(&self, vertices: u64) -> Result<()> {
        if vertices > self.max_explicit_vertices as u64 {
            return Err(Error::cap(
                "explicit vertex count",
                self.max_explicit_vertices as u64,
                vertices,
            ));
        }
        Ok(())
    }
}

/// A deadline checked cooperatively by long-running searches.
#[derive(Clone, Copy, Debug, Default)]
pub struct Budget {
    deadline: Option<Instant>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget { deadline: None }
    }

    pub fn expired(&self) -> bool {
        matches!(self.deadline, Some(d) if Instant::now() >= d)
    }

    pub(crate) fn check(&self, what: &'static str) -> Result<()> {
        if self.expired() {
            Err(Error::Incomplete(what))
        } else {
            Ok(())
        }
    }
}
