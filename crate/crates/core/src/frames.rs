//! Frame clauses: bounds, validation, window classes, and the mapping from a
//! clause to concrete row intervals.
//!
//! Row intervals are inclusive and 0-based. In row mode offsets count rows; in
//! range mode offsets are value deltas applied to a sort key, and the interval
//! covers every row whose key falls inside the shifted bounds.

use crate::error::{Error, Result};
use crate::value::Scalar;

/// One endpoint of a frame clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    UnboundedPreceding,
    Preceding(u64),
    CurrentRow,
    Following(u64),
    UnboundedFollowing,
}

impl Boundary {
    pub fn is_bounded(self) -> bool {
        !matches!(
            self,
            Boundary::UnboundedPreceding | Boundary::UnboundedFollowing
        )
    }

    /// Signed offset relative to the current row; `None` for unbounded ends.
    fn delta(self) -> Option<i128> {
        match self {
            Boundary::UnboundedPreceding | Boundary::UnboundedFollowing => None,
            Boundary::Preceding(k) => Some(-(k as i128)),
            Boundary::CurrentRow => Some(0),
            Boundary::Following(k) => Some(k as i128),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameMode {
    Rows,
    Range,
}

/// A validated frame clause.
///
/// Construction normalizes zero offsets in row mode (`PRECEDING 0` and
/// `FOLLOWING 0` become `CURRENT ROW`) and rejects clauses whose start lies
/// after their end.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSpec {
    pub mode: FrameMode,
    pub start: Boundary,
    pub end: Boundary,
    /// Sort column reference; required in range mode.
    pub order_key: Option<String>,
}

impl FrameSpec {
    pub fn new(
        mode: FrameMode,
        start: Boundary,
        end: Boundary,
        order_key: Option<String>,
    ) -> Result<FrameSpec> {
        if matches!(start, Boundary::UnboundedFollowing) {
            return Err(Error::InvalidFrame(
                "frame start cannot be UNBOUNDED FOLLOWING".into(),
            ));
        }
        if matches!(end, Boundary::UnboundedPreceding) {
            return Err(Error::InvalidFrame(
                "frame end cannot be UNBOUNDED PRECEDING".into(),
            ));
        }
        if let (Some(lo), Some(hi)) = (start.delta(), end.delta()) {
            if lo > hi {
                return Err(Error::InvalidFrame(
                    "frame start must not lie after frame end".into(),
                ));
            }
        }
        if mode == FrameMode::Range && order_key.is_none() {
            return Err(Error::InvalidFrame("range frames require ORDER BY".into()));
        }
        let normalize = |b: Boundary| match (mode, b) {
            (FrameMode::Rows, Boundary::Preceding(0))
            | (FrameMode::Rows, Boundary::Following(0)) => Boundary::CurrentRow,
            (_, b) => b,
        };
        Ok(FrameSpec {
            mode,
            start: normalize(start),
            end: normalize(end),
            order_key,
        })
    }

    /// Largest number of rows the frame can cover, when it is bounded.
    ///
    /// Row-mode moving frames have a fixed width; range-mode and unbounded
    /// frames can cover the whole table, so they report `None`.
    pub fn max_width(&self) -> Option<u64> {
        if self.mode == FrameMode::Range {
            return None;
        }
        match (self.start.delta(), self.end.delta()) {
            (Some(lo), Some(hi)) => Some((hi - lo + 1) as u64),
            _ => None,
        }
    }
}

/// Shape of the frame as the current row advances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowClass {
    /// Start pinned at the first row, end moves.
    Cumulative,
    /// Whole table for every row.
    Unbounded,
    /// Both ends move.
    Moving,
    /// Start moves, end pinned at the last row.
    ReversedCumulative,
}

pub fn classify(spec: &FrameSpec) -> WindowClass {
    match (spec.start.is_bounded(), spec.end.is_bounded()) {
        (false, false) => WindowClass::Unbounded,
        (false, true) => WindowClass::Cumulative,
        (true, false) => WindowClass::ReversedCumulative,
        (true, true) => WindowClass::Moving,
    }
}

/// Inclusive row interval a frame resolves to for one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameInterval {
    pub start_row: usize,
    pub end_row: usize,
    pub empty: bool,
}

impl FrameInterval {
    pub const EMPTY: FrameInterval = FrameInterval {
        start_row: 0,
        end_row: 0,
        empty: true,
    };

    fn span(start_row: usize, end_row: usize) -> FrameInterval {
        FrameInterval {
            start_row,
            end_row,
            empty: false,
        }
    }

    pub fn len(&self) -> usize {
        if self.empty {
            0
        } else {
            self.end_row - self.start_row + 1
        }
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn contains(&self, row: usize) -> bool {
        !self.empty && self.start_row <= row && row <= self.end_row
    }
}

/// Resolves a row-mode frame for `row` in a table of `len` rows.
///
/// Offsets are clamped to the table; the frame is empty when it lies entirely
/// before the first or after the last row.
pub fn rows_bounds(spec: &FrameSpec, row: usize, len: usize) -> FrameInterval {
    debug_assert_eq!(spec.mode, FrameMode::Rows);
    debug_assert!(row < len || len == 0);
    if len == 0 {
        return FrameInterval::EMPTY;
    }
    let i = row as i128;
    let last = (len - 1) as i128;
    let lo = match spec.start.delta() {
        None => 0,
        Some(d) => i + d,
    };
    let hi = match spec.end.delta() {
        None => last,
        Some(d) => i + d,
    };
    if hi < 0 || lo > last || lo > hi {
        return FrameInterval::EMPTY;
    }
    FrameInterval::span(lo.max(0) as usize, hi.min(last) as usize)
}

/// Resolves a range-mode frame for `row` against non-decreasing sort keys.
///
/// The interval covers the maximal run of rows whose key lies within the
/// frame's value bounds around `keys[row]`. For the usual
/// `x PRECEDING .. y FOLLOWING` shapes it always contains `row`.
pub fn range_bounds<T: Scalar>(spec: &FrameSpec, keys: &[T], row: usize) -> FrameInterval {
    debug_assert_eq!(spec.mode, FrameMode::Range);
    debug_assert!(row < keys.len());
    if keys.is_empty() {
        return FrameInterval::EMPTY;
    }
    let anchor = keys[row];
    let lo = match spec.start.delta() {
        None => 0,
        Some(d) => partition_ge(keys, anchor, d),
    };
    let hi = match spec.end.delta() {
        None => keys.len() - 1,
        Some(d) => {
            let first_above = partition_gt(keys, anchor, d);
            if first_above == 0 {
                return FrameInterval::EMPTY;
            }
            first_above - 1
        }
    };
    if lo > hi {
        return FrameInterval::EMPTY;
    }
    FrameInterval::span(lo, hi)
}

/// Index of the first key satisfying `key >= anchor + d`, computed exactly.
fn partition_ge<T: Scalar>(keys: &[T], anchor: T, d: i128) -> usize {
    keys.partition_point(|k| !ge_shifted(*k, anchor, d))
}

/// Index of the first key satisfying `key > anchor + d`, computed exactly.
fn partition_gt<T: Scalar>(keys: &[T], anchor: T, d: i128) -> usize {
    keys.partition_point(|k| !gt_shifted(*k, anchor, d))
}

fn ge_shifted<T: Scalar>(key: T, anchor: T, d: i128) -> bool {
    shifted_cmp(key, anchor, d) >= std::cmp::Ordering::Equal
}

fn gt_shifted<T: Scalar>(key: T, anchor: T, d: i128) -> bool {
    shifted_cmp(key, anchor, d) == std::cmp::Ordering::Greater
}

/// Compares `key` with `anchor + d` without overflow.
fn shifted_cmp<T: Scalar>(key: T, anchor: T, d: i128) -> std::cmp::Ordering {
    let key_v = key.into_value();
    let anchor_v = anchor.into_value();
    match (key_v, anchor_v) {
        (crate::value::Value::Int(k), crate::value::Value::Int(a)) => {
            (k as i128).cmp(&(a as i128 + d))
        }
        _ => key
            .to_f64_lossy()
            .total_cmp(&(anchor.to_f64_lossy() + d as f64)),
    }
}
