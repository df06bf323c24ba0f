use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};

/// Hard ceiling for a single sieve.
pub const SIEVE_HARD_LIMIT: usize = 100_000_000;

const DEFAULT_SIEVE_LIMIT: usize = 10_000_000;

/// Sieve cap for the shared table: `ZM_SIEVE_LIMIT` if set, else 10^7.
pub fn sieve_limit() -> usize {
    std::env::var("ZM_SIEVE_LIMIT")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map(|v| v.min(SIEVE_HARD_LIMIT))
        .unwrap_or(DEFAULT_SIEVE_LIMIT)
}

/// `d(1..=n)`; index 0 of the result holds `d(1)`.
pub fn divisor_sieve(n: usize) -> Result<Vec<u32>> {
    if n == 0 {
        return Err(Error::Range("divisor sieve needs N >= 1".into()));
    }
    if n > SIEVE_HARD_LIMIT {
        return Err(Error::Capacity {
            needed: n,
            limit: SIEVE_HARD_LIMIT,
        });
    }
    let mut d = vec![0u32; n];
    for m in 1..=n {
        let mut k = m;
        while k <= n {
            d[k - 1] += 1;
            k += m;
        }
    }
    Ok(d)
}

/// Immutable shared divisor-count table.
#[derive(Debug)]
pub struct DivisorTable {
    counts: Vec<u32>,
}

impl DivisorTable {
    /// Largest `n` covered.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `d(n)` for `1 <= n <= len()`.
    #[inline]
    pub fn d(&self, n: usize) -> u32 {
        self.counts[n - 1]
    }
}

static SHARED: RwLock<Option<Arc<DivisorTable>>> = RwLock::new(None);

/// Shared table covering at least `1..=n`, grown on demand up to
/// [`sieve_limit`].
pub fn divisor_table(n: usize) -> Result<Arc<DivisorTable>> {
    let limit = sieve_limit();
    if n > limit {
        return Err(Error::Capacity { needed: n, limit });
    }
    if let Some(t) = SHARED.read().expect("sieve lock").as_ref() {
        if t.len() >= n {
            return Ok(Arc::clone(t));
        }
    }
    let mut guard = SHARED.write().expect("sieve lock");
    if let Some(t) = guard.as_ref() {
        if t.len() >= n {
            return Ok(Arc::clone(t));
        }
    }
    let current = guard.as_ref().map_or(0, |t| t.len());
    let size = n.max(2 * current).max(1 << 14).min(limit);
    let table = Arc::new(DivisorTable {
        counts: divisor_sieve(size)?,
    });
    *guard = Some(Arc::clone(&table));
    Ok(table)
}
