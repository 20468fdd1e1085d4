use serde::Serialize;

use crate::error::{Error, Result};

/// Default memory ceiling for scratch tables: 2 GiB.
pub const DEFAULT_MEMORY_BYTES: u64 = 2 << 30;

/// Default ceiling on map evaluations for exhaustive scans: 2^32.
pub const DEFAULT_MAX_STEPS: u64 = 1 << 32;

/// Resource limits checked before any large allocation or exhaustive scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub memory_bytes: u64,
    pub max_steps: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            memory_bytes: DEFAULT_MEMORY_BYTES,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

impl Budget {
    pub fn with_memory(mut self, bytes: u64) -> Self {
        self.memory_bytes = bytes;
        self
    }

    pub fn with_steps(mut self, steps: u64) -> Self {
        self.max_steps = steps;
        self
    }

    pub(crate) fn check_memory(&self, what: &'static str, needed: u64) -> Result<()> {
        if needed > self.memory_bytes {
            return Err(Error::OverBudget {
                what,
                needed,
                limit: self.memory_bytes,
            });
        }
        Ok(())
    }

    pub(crate) fn check_steps(&self, what: &'static str, needed: u64) -> Result<()> {
        if needed > self.max_steps {
            return Err(Error::OverBudget {
                what,
                needed,
                limit: self.max_steps,
            });
        }
        Ok(())
    }
}
