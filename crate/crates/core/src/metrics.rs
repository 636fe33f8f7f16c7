//! Per-thread work counters.
//!
//! Primitive evaluations and key-space enumeration steps bump thread-local
//! counters. [`measure`] reports the work done by a closure on the calling
//! thread, which is how reductions separate their own cost from the cost of
//! the oracle they query.

use std::cell::Cell;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Cost {
    pub stream_evals: u64,
    pub hash_evals: u64,
    pub keys_enumerated: u64,
}

impl Cost {
    pub fn primitive_evals(&self) -> u64 {
        self.stream_evals + self.hash_evals
    }

    fn since(self, earlier: Cost) -> Cost {
        Cost {
            stream_evals: self.stream_evals - earlier.stream_evals,
            hash_evals: self.hash_evals - earlier.hash_evals,
            keys_enumerated: self.keys_enumerated - earlier.keys_enumerated,
        }
    }
}

impl std::ops::Add for Cost {
    type Output = Cost;

    fn add(self, o: Cost) -> Cost {
        Cost {
            stream_evals: self.stream_evals + o.stream_evals,
            hash_evals: self.hash_evals + o.hash_evals,
            keys_enumerated: self.keys_enumerated + o.keys_enumerated,
        }
    }
}

impl std::ops::AddAssign for Cost {
    fn add_assign(&mut self, o: Cost) {
        *self = *self + o;
    }
}

thread_local! {
    static COUNTERS: Cell<Cost> = const { Cell::new(Cost { stream_evals: 0, hash_evals: 0, keys_enumerated: 0 }) };
}

#[inline]
fn bump(f: impl FnOnce(&mut Cost)) {
    COUNTERS.with(|c| {
        let mut v = c.get();
        f(&mut v);
        c.set(v);
    });
}

#[inline]
pub(crate) fn count_stream_eval() {
    bump(|c| c.stream_evals += 1);
}

#[inline]
pub(crate) fn count_hash_eval() {
    bump(|c| c.hash_evals += 1);
}

#[inline]
pub(crate) fn count_keys_enumerated(n: u64) {
    bump(|c| c.keys_enumerated += n);
}

/// Snapshot of this thread's counters.
pub fn snapshot() -> Cost {
    COUNTERS.with(Cell::get)
}

/// Runs `f` and returns its result with the work it performed on this thread.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, Cost) {
    let before = snapshot();
    let out = f();
    (out, snapshot().since(before))
}
