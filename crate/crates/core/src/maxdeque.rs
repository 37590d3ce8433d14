//! Count-compressed monotonic deque tracking the extremum of a sliding window.
//!
//! Entries run strictly from strongest (front) to weakest (back); under Max
//! polarity that means strictly decreasing values. A value entering the window
//! evicts every strictly weaker entry at the back, because those can never be
//! the window extremum again while the newcomer is alive. Equal values merge
//! into one entry with a repeat count, so duplicate-heavy streams stay small.
//! A value leaving the window in FIFO order touches the deque only when it is
//! the current front.

use crate::error::{Error, Result};
use crate::value::Scalar;
use std::cmp::Ordering;
use std::collections::VecDeque;

/// Which extremum the deque tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Max,
    Min,
}

impl Polarity {
    /// True when `a` may sit strictly closer to the front than `b`.
    pub(crate) fn dominates<T: Scalar>(self, a: &T, b: &T) -> bool {
        match self {
            Polarity::Max => a.total_cmp(b) == Ordering::Greater,
            Polarity::Min => a.total_cmp(b) == Ordering::Less,
        }
    }
}

/// One remembered value with the number of live window rows carrying it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DequeEntry<T> {
    pub value: T,
    pub count: u64,
}

#[derive(Debug, Clone)]
pub struct MonotonicDeque<T> {
    entries: VecDeque<DequeEntry<T>>,
    polarity: Polarity,
}

impl<T: Scalar> MonotonicDeque<T> {
    pub fn new(polarity: Polarity) -> MonotonicDeque<T> {
        MonotonicDeque {
            entries: VecDeque::new(),
            polarity,
        }
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    /// Remembered entries, strongest first.
    pub fn entries(&self) -> impl Iterator<Item = &DequeEntry<T>> {
        self.entries.iter()
    }

    /// Number of distinct remembered entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Live window rows still represented, i.e. the sum of entry counts.
    pub fn total_count(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }

    pub fn front(&self) -> Option<&DequeEntry<T>> {
        self.entries.front()
    }

    pub fn back(&self) -> Option<&DequeEntry<T>> {
        self.entries.back()
    }

    /// A value enters the window: evict strictly weaker tail entries, then
    /// merge with an equal back entry or append.
    pub fn enter(&mut self, v: T) -> Result<()> {
        self.enter_merged(v, 1)
    }

    /// `enter` carrying a pre-merged repeat count; the spill layer uses this
    /// to fold counts recovered from truncated pages.
    pub fn enter_merged(&mut self, v: T, count: u64) -> Result<()> {
        if !v.is_finite_scalar() {
            return Err(Error::NonFiniteValue(v.to_f64_lossy()));
        }
        debug_assert!(count >= 1);
        while let Some(back) = self.entries.back() {
            if self.polarity.dominates(&v, &back.value) {
                self.entries.pop_back();
            } else {
                break;
            }
        }
        match self.entries.back_mut() {
            Some(back) if back.value.total_cmp(&v) == Ordering::Equal => back.count += count,
            _ => self.entries.push_back(DequeEntry { value: v, count }),
        }
        Ok(())
    }

    /// A value leaves the window in FIFO order. Only a front match changes
    /// anything; weaker values were already evicted when something stronger
    /// entered.
    pub fn leave(&mut self, v: T) -> Result<()> {
        let front = self.entries.front_mut().ok_or(Error::EmptyDeque)?;
        if front.value.total_cmp(&v) == Ordering::Equal {
            front.count -= 1;
            if front.count == 0 {
                self.entries.pop_front();
            }
        }
        Ok(())
    }

    /// Current window extremum: the front value.
    pub fn current_extremum(&self) -> Option<T> {
        self.entries.front().map(|e| e.value)
    }

    /// Pops the strongest entry; the spill layer packs these into pages.
    pub(crate) fn pop_front_entry(&mut self) -> Option<DequeEntry<T>> {
        self.entries.pop_front()
    }

    pub(crate) fn clear(&mut self) {
        self.entries.clear();
    }

    /// Panics if entries are not strictly ordered or a count dropped to zero.
    /// Debugging aid for tests.
    pub fn assert_valid(&self) {
        for pair in self.entries.iter().zip(self.entries.iter().skip(1)) {
            assert!(
                self.polarity.dominates(&pair.0.value, &pair.1.value),
                "entries out of order: {:?} then {:?}",
                pair.0,
                pair.1
            );
        }
        assert!(self.entries.iter().all(|e| e.count >= 1));
    }
}
