//! Query planning and single-pass evaluation.
//!
//! Every strategy walks the rows once with two monotone pointers, feeding
//! values in as the frame's end advances and retracting them as its start
//! advances. What differs is the state in the middle:
//!
//! * [`Strategy::IncrementalUpdate`] keeps an [`AggState`] and retracts in
//!   O(1); it serves every removable kind over any frame shape.
//! * [`Strategy::RunningExtremum`] serves MIN/MAX when one frame side is
//!   unbounded, scanning forward (or backward for a moving start) with a
//!   plain running extremum.
//! * [`Strategy::InMemoryDeque`] serves MIN/MAX over moving frames narrow
//!   enough to remember entirely in memory.
//! * [`Strategy::SpilledDeque`] is the same deque with a disk-backed prefix,
//!   for moving frames wider than the budget; value-bounded frames have no
//!   width cap at all, so they always take this path.
//! * [`Strategy::BruteForce`] recomputes each frame from scratch. It exists
//!   as the reference the others are checked against, not as a planner
//!   choice.
//!
//! Value-bounded frames sort by the key column first (stable, so ties keep
//! input order) and scatter results back to input order afterward.

use crate::aggregators::{AggState, AggregateKind};
use crate::error::{Error, Result};
use crate::frames::{
    classify, range_bounds, rows_bounds, FrameInterval, FrameMode, FrameSpec, WindowClass,
};
use crate::maxdeque::{MonotonicDeque, Polarity};
use crate::spill::{IoStats, SpillConfig, SpilledDeque};
use crate::value::{Column, Scalar, Value};

/// Engine-wide tuning; the spill budget doubles as the in-memory deque cap.
#[derive(Debug, Clone, Default)]
pub struct EngineConfig {
    pub spill: SpillConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    IncrementalUpdate,
    RunningExtremum,
    InMemoryDeque,
    SpilledDeque,
    BruteForce,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::IncrementalUpdate => "incremental-update",
            Strategy::RunningExtremum => "running-extremum",
            Strategy::InMemoryDeque => "in-memory-deque",
            Strategy::SpilledDeque => "spilled-deque",
            Strategy::BruteForce => "brute-force",
        }
    }

    pub fn from_name(name: &str) -> Option<Strategy> {
        match name {
            "incremental-update" => Some(Strategy::IncrementalUpdate),
            "running-extremum" => Some(Strategy::RunningExtremum),
            "in-memory-deque" => Some(Strategy::InMemoryDeque),
            "spilled-deque" => Some(Strategy::SpilledDeque),
            "brute-force" => Some(Strategy::BruteForce),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QueryPlan {
    pub kind: AggregateKind,
    pub frame: FrameSpec,
    pub class: WindowClass,
    pub strategy: Strategy,
}

impl QueryPlan {
    /// Same plan with the strategy overridden; used to pit strategies against
    /// each other on identical inputs.
    pub fn with_strategy(mut self, strategy: Strategy) -> QueryPlan {
        self.strategy = strategy;
        self
    }
}

/// Picks the cheapest strategy that answers the query.
pub fn plan(kind: AggregateKind, frame: &FrameSpec, config: &EngineConfig) -> QueryPlan {
    let class = classify(frame);
    let strategy = if kind.supports_removal() {
        Strategy::IncrementalUpdate
    } else {
        match class {
            WindowClass::Cumulative | WindowClass::Unbounded | WindowClass::ReversedCumulative => {
                Strategy::RunningExtremum
            }
            WindowClass::Moving => match frame.max_width() {
                Some(w) if w <= config.spill.memory_budget as u64 => Strategy::InMemoryDeque,
                _ => Strategy::SpilledDeque,
            },
        }
    };
    QueryPlan {
        kind,
        frame: frame.clone(),
        class,
        strategy,
    }
}

/// Work and I/O performed by one evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalStats {
    pub rows: usize,
    pub add_ops: u64,
    pub remove_ops: u64,
    pub io: IoStats,
    pub hot_tail_peak: usize,
    pub pages_live_peak: u64,
}

#[derive(Debug, Clone)]
pub struct EvalOutput {
    /// One result per input row, in input order; `None` renders as NULL.
    pub values: Vec<Option<Value>>,
    pub stats: EvalStats,
}

pub fn evaluate(
    plan: &QueryPlan,
    config: &EngineConfig,
    data: &Column,
    keys: Option<&Column>,
) -> Result<EvalOutput> {
    match plan.frame.mode {
        FrameMode::Rows => match data {
            Column::Int(d) => eval_rows(plan, config, d),
            Column::Float(d) => eval_rows(plan, config, d),
        },
        FrameMode::Range => {
            let keys = keys.ok_or_else(|| {
                Error::InvalidFrame("value-bounded frames need a key column".into())
            })?;
            if keys.len() != data.len() {
                return Err(Error::InvalidFrame(format!(
                    "key column has {} rows but data column has {}",
                    keys.len(),
                    data.len()
                )));
            }
            match (data, keys) {
                (Column::Int(d), Column::Int(k)) => eval_range(plan, config, d, k),
                (Column::Int(d), Column::Float(k)) => eval_range(plan, config, d, k),
                (Column::Float(d), Column::Int(k)) => eval_range(plan, config, d, k),
                (Column::Float(d), Column::Float(k)) => eval_range(plan, config, d, k),
            }
        }
    }
}

/// Per-frame recomputation of the same query; the correctness oracle.
pub fn evaluate_brute_force(
    kind: AggregateKind,
    frame: &FrameSpec,
    data: &Column,
    keys: Option<&Column>,
) -> Result<Vec<Option<Value>>> {
    let plan = QueryPlan {
        kind,
        class: classify(frame),
        frame: frame.clone(),
        strategy: Strategy::BruteForce,
    };
    Ok(evaluate(&plan, &EngineConfig::default(), data, keys)?.values)
}

fn eval_rows<T: Scalar>(plan: &QueryPlan, config: &EngineConfig, data: &[T]) -> Result<EvalOutput> {
    let n = data.len();
    let bounds = |i: usize| rows_bounds(&plan.frame, i, n);
    let (values, stats) = run_strategy(plan, config, data, &bounds)?;
    Ok(EvalOutput { values, stats })
}

fn eval_range<T: Scalar, K: Scalar>(
    plan: &QueryPlan,
    config: &EngineConfig,
    data: &[T],
    keys: &[K],
) -> Result<EvalOutput> {
    for k in keys {
        if !k.is_finite_scalar() {
            return Err(Error::NonFiniteValue(k.to_f64_lossy()));
        }
    }
    let mut perm: Vec<usize> = (0..data.len()).collect();
    perm.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
    let sorted_keys: Vec<K> = perm.iter().map(|&j| keys[j]).collect();
    let sorted_data: Vec<T> = perm.iter().map(|&j| data[j]).collect();
    let bounds = |i: usize| range_bounds(&plan.frame, &sorted_keys, i);
    let (sorted_values, stats) = run_strategy(plan, config, &sorted_data, &bounds)?;
    let mut values = vec![None; data.len()];
    for (j, v) in sorted_values.into_iter().enumerate() {
        values[perm[j]] = v;
    }
    Ok(EvalOutput { values, stats })
}

fn run_strategy<T: Scalar>(
    plan: &QueryPlan,
    config: &EngineConfig,
    data: &[T],
    bounds: &dyn Fn(usize) -> FrameInterval,
) -> Result<(Vec<Option<Value>>, EvalStats)> {
    let mut stats = EvalStats {
        rows: data.len(),
        ..EvalStats::default()
    };
    let values = match plan.strategy {
        Strategy::IncrementalUpdate => {
            let (v, adds, removes) = run_incremental(plan.kind, data, bounds)?;
            stats.add_ops = adds;
            stats.remove_ops = removes;
            v
        }
        Strategy::RunningExtremum => {
            let (v, adds) = run_running_extremum(plan.kind, plan.class, data, bounds)?;
            stats.add_ops = adds;
            v
        }
        Strategy::InMemoryDeque => {
            let (v, adds, removes, peak) = run_deque(plan.kind, data, bounds)?;
            stats.add_ops = adds;
            stats.remove_ops = removes;
            stats.hot_tail_peak = peak;
            v
        }
        Strategy::SpilledDeque => {
            let (v, adds, removes, io, hot_peak, pages_peak) =
                run_spilled(plan.kind, data, bounds, &config.spill)?;
            stats.add_ops = adds;
            stats.remove_ops = removes;
            stats.io = io;
            stats.hot_tail_peak = hot_peak;
            stats.pages_live_peak = pages_peak;
            v
        }
        Strategy::BruteForce => {
            let (v, adds) = run_brute(plan.kind, data, bounds)?;
            stats.add_ops = adds;
            v
        }
    };
    Ok((values, stats))
}

fn polarity_for(kind: AggregateKind) -> Result<Polarity> {
    match kind {
        AggregateKind::Max => Ok(Polarity::Max),
        AggregateKind::Min => Ok(Polarity::Min),
        _ => Err(Error::UnsupportedStrategy(format!(
            "{} is not an extremum aggregate",
            kind.sql_name()
        ))),
    }
}

/// One accumulator swept across the rows. Each row is added once and removed
/// at most once over the whole pass. Empty frames emit NULL and leave the
/// pointers where they are; the end pointer always advances before the start
/// pointer so removals only touch rows already added.
fn run_incremental<T: Scalar>(
    kind: AggregateKind,
    data: &[T],
    bounds: &dyn Fn(usize) -> FrameInterval,
) -> Result<(Vec<Option<Value>>, u64, u64)> {
    if !kind.supports_removal() {
        return Err(Error::UnsupportedStrategy(format!(
            "{} cannot retract values",
            kind.sql_name()
        )));
    }
    let n = data.len();
    let mut state = AggState::new(kind);
    let mut out = vec![None; n];
    let (mut adds, mut removes) = (0u64, 0u64);
    let (mut cur_lo, mut cur_hi) = (0usize, 0usize);
    for (i, slot) in out.iter_mut().enumerate() {
        let iv = bounds(i);
        if iv.empty {
            continue;
        }
        let (lo, hi) = (iv.start_row, iv.end_row + 1);
        debug_assert!(cur_lo <= lo && cur_hi <= hi, "frame endpoints regressed");
        while cur_hi < hi {
            state.add(data[cur_hi].into_value())?;
            cur_hi += 1;
            adds += 1;
        }
        while cur_lo < lo {
            state.remove(data[cur_lo].into_value())?;
            cur_lo += 1;
            removes += 1;
        }
        *slot = state.result();
    }
    Ok((out, adds, removes))
}

/// Running extremum for frames pinned at one end: a forward scan when the
/// start is pinned, a backward scan when the end is.
fn run_running_extremum<T: Scalar>(
    kind: AggregateKind,
    class: WindowClass,
    data: &[T],
    bounds: &dyn Fn(usize) -> FrameInterval,
) -> Result<(Vec<Option<Value>>, u64)> {
    let polarity = polarity_for(kind)?;
    let n = data.len();
    let mut out = vec![None; n];
    let mut adds = 0u64;
    let mut ext: Option<T> = None;
    let mut consume = |ext: &mut Option<T>, v: T| -> Result<()> {
        if !v.is_finite_scalar() {
            return Err(Error::NonFiniteValue(v.to_f64_lossy()));
        }
        *ext = Some(match *ext {
            Some(e) if !polarity.dominates(&v, &e) => e,
            _ => v,
        });
        adds += 1;
        Ok(())
    };
    match class {
        WindowClass::Cumulative | WindowClass::Unbounded => {
            let mut hi = 0usize;
            for (i, slot) in out.iter_mut().enumerate() {
                let iv = bounds(i);
                if iv.empty {
                    continue;
                }
                debug_assert_eq!(iv.start_row, 0, "start is pinned at the first row");
                while hi <= iv.end_row {
                    consume(&mut ext, data[hi])?;
                    hi += 1;
                }
                *slot = ext.map(Scalar::into_value);
            }
        }
        WindowClass::ReversedCumulative => {
            let mut lo = n;
            for i in (0..n).rev() {
                let iv = bounds(i);
                if iv.empty {
                    continue;
                }
                debug_assert_eq!(iv.end_row, n - 1, "end is pinned at the last row");
                while lo > iv.start_row {
                    lo -= 1;
                    consume(&mut ext, data[lo])?;
                }
                out[i] = ext.map(Scalar::into_value);
            }
        }
        WindowClass::Moving => {
            return Err(Error::UnsupportedStrategy(
                "running extremum needs a frame pinned at one end".into(),
            ))
        }
    }
    Ok((out, adds))
}

fn run_deque<T: Scalar>(
    kind: AggregateKind,
    data: &[T],
    bounds: &dyn Fn(usize) -> FrameInterval,
) -> Result<(Vec<Option<Value>>, u64, u64, usize)> {
    let polarity = polarity_for(kind)?;
    let n = data.len();
    let mut dq: MonotonicDeque<T> = MonotonicDeque::new(polarity);
    let mut out = vec![None; n];
    let (mut adds, mut removes) = (0u64, 0u64);
    let mut peak = 0usize;
    let (mut cur_lo, mut cur_hi) = (0usize, 0usize);
    for (i, slot) in out.iter_mut().enumerate() {
        let iv = bounds(i);
        if iv.empty {
            continue;
        }
        let (lo, hi) = (iv.start_row, iv.end_row + 1);
        while cur_hi < hi {
            dq.enter(data[cur_hi])?;
            cur_hi += 1;
            adds += 1;
            peak = peak.max(dq.len());
        }
        while cur_lo < lo {
            dq.leave(data[cur_lo])?;
            cur_lo += 1;
            removes += 1;
        }
        *slot = dq.current_extremum().map(Scalar::into_value);
    }
    Ok((out, adds, removes, peak))
}

#[allow(clippy::type_complexity)]
fn run_spilled<T: Scalar>(
    kind: AggregateKind,
    data: &[T],
    bounds: &dyn Fn(usize) -> FrameInterval,
    spill: &SpillConfig,
) -> Result<(Vec<Option<Value>>, u64, u64, IoStats, usize, u64)> {
    let polarity = polarity_for(kind)?;
    let n = data.len();
    let mut dq: SpilledDeque<T> = SpilledDeque::new(polarity, spill)?;
    let mut out = vec![None; n];
    let (mut adds, mut removes) = (0u64, 0u64);
    let (mut cur_lo, mut cur_hi) = (0usize, 0usize);
    for (i, slot) in out.iter_mut().enumerate() {
        let iv = bounds(i);
        if iv.empty {
            continue;
        }
        let (lo, hi) = (iv.start_row, iv.end_row + 1);
        while cur_hi < hi {
            dq.enter(data[cur_hi])?;
            cur_hi += 1;
            adds += 1;
        }
        while cur_lo < lo {
            dq.leave(data[cur_lo])?;
            cur_lo += 1;
            removes += 1;
        }
        *slot = dq.current_extremum().map(Scalar::into_value);
    }
    let io = dq.read_io_stats();
    Ok((
        out,
        adds,
        removes,
        io,
        dq.hot_tail_peak(),
        dq.pages_live_peak(),
    ))
}

fn run_brute<T: Scalar>(
    kind: AggregateKind,
    data: &[T],
    bounds: &dyn Fn(usize) -> FrameInterval,
) -> Result<(Vec<Option<Value>>, u64)> {
    let n = data.len();
    let mut out = vec![None; n];
    let mut adds = 0u64;
    for (i, slot) in out.iter_mut().enumerate() {
        let iv = bounds(i);
        if iv.empty {
            continue;
        }
        let mut state = AggState::new(kind);
        for v in &data[iv.start_row..=iv.end_row] {
            state.add(v.into_value())?;
            adds += 1;
        }
        *slot = state.result();
    }
    Ok((out, adds))
}
