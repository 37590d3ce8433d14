//! Aggregate state with O(1) `add` and, for removable kinds, O(1) `remove`.
//!
//! State is the classic (count, sum, sum of squares, extremum) tuple; variance
//! and stddev derive from it at result time. MIN and MAX accept adds only:
//! once the extremum leaves the window there is nothing cheap to fall back on,
//! which is exactly why the deque machinery exists.

use crate::error::{Error, Result};
use crate::value::Value;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AggregateKind {
    Count,
    CountIf,
    Sum,
    Avg,
    Min,
    Max,
    VarPop,
    VarSamp,
    StddevPop,
    StddevSamp,
}

impl AggregateKind {
    pub const ALL: [AggregateKind; 10] = [
        AggregateKind::Count,
        AggregateKind::CountIf,
        AggregateKind::Sum,
        AggregateKind::Avg,
        AggregateKind::Min,
        AggregateKind::Max,
        AggregateKind::VarPop,
        AggregateKind::VarSamp,
        AggregateKind::StddevPop,
        AggregateKind::StddevSamp,
    ];

    /// Every kind except MIN and MAX can retract a value in O(1).
    pub fn supports_removal(self) -> bool {
        !matches!(self, AggregateKind::Min | AggregateKind::Max)
    }

    pub fn sql_name(self) -> &'static str {
        match self {
            AggregateKind::Count => "COUNT",
            AggregateKind::CountIf => "COUNTIF",
            AggregateKind::Sum => "SUM",
            AggregateKind::Avg => "AVG",
            AggregateKind::Min => "MIN",
            AggregateKind::Max => "MAX",
            AggregateKind::VarPop => "VAR_POP",
            AggregateKind::VarSamp => "VAR_SAMP",
            AggregateKind::StddevPop => "STDDEV_POP",
            AggregateKind::StddevSamp => "STDDEV_SAMP",
        }
    }

    fn needs_sum(self) -> bool {
        matches!(
            self,
            AggregateKind::Sum
                | AggregateKind::Avg
                | AggregateKind::VarPop
                | AggregateKind::VarSamp
                | AggregateKind::StddevPop
                | AggregateKind::StddevSamp
        )
    }

    fn needs_sum_sq(self) -> bool {
        matches!(
            self,
            AggregateKind::VarPop
                | AggregateKind::VarSamp
                | AggregateKind::StddevPop
                | AggregateKind::StddevSamp
        )
    }
}

/// Row filter for `CountIf`, applied at both add and remove time.
pub type Predicate = Arc<dyn Fn(Value) -> bool + Send + Sync>;

/// SQL-ish truthiness: a row matches when its value is nonzero.
pub fn nonzero_predicate() -> Predicate {
    Arc::new(|v: Value| match v {
        Value::Int(x) => x != 0,
        Value::Float(x) => x != 0.0,
    })
}

/// Incrementally maintained aggregate over the rows currently in a window.
///
/// Integer inputs accumulate exactly in 128-bit registers; accumulation only
/// falls back to floats once a float value is added. Overflow of the 128-bit
/// registers is an error, never a wraparound.
#[derive(Clone)]
pub struct AggState {
    kind: AggregateKind,
    /// Rows in the window; for `CountIf`, matching rows only.
    n: u64,
    int_sum: i128,
    int_sum_sq: i128,
    float_sum: f64,
    float_sum_sq: f64,
    /// Set once any float value is added; result typing keys off it.
    float_seen: bool,
    extremum: Option<Value>,
    predicate: Option<Predicate>,
}

impl std::fmt::Debug for AggState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AggState")
            .field("kind", &self.kind)
            .field("n", &self.n)
            .field("sum", &self.sum_f64())
            .finish()
    }
}

impl AggState {
    /// Fresh empty state; `CountIf` gets the nonzero predicate.
    pub fn new(kind: AggregateKind) -> AggState {
        let predicate = match kind {
            AggregateKind::CountIf => Some(nonzero_predicate()),
            _ => None,
        };
        AggState {
            kind,
            n: 0,
            int_sum: 0,
            int_sum_sq: 0,
            float_sum: 0.0,
            float_sum_sq: 0.0,
            float_seen: false,
            extremum: None,
            predicate,
        }
    }

    /// `CountIf` state with a caller-chosen row filter.
    pub fn count_if(predicate: Predicate) -> AggState {
        let mut state = AggState::new(AggregateKind::CountIf);
        state.predicate = Some(predicate);
        state
    }

    pub fn kind(&self) -> AggregateKind {
        self.kind
    }

    /// Rows currently folded in (matching rows for `CountIf`).
    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn add(&mut self, v: Value) -> Result<()> {
        if !v.is_finite() {
            return Err(Error::NonFiniteValue(v.as_f64()));
        }
        match self.kind {
            AggregateKind::Count => self.n += 1,
            AggregateKind::CountIf => {
                if self.matches(v) {
                    self.n += 1;
                }
            }
            AggregateKind::Min | AggregateKind::Max => {
                self.n += 1;
                self.fold_extremum(v);
            }
            _ => {
                self.accumulate(v, 1)?;
                self.n += 1;
            }
        }
        Ok(())
    }

    /// Retracts a previously added value.
    pub fn remove(&mut self, v: Value) -> Result<()> {
        if !self.kind.supports_removal() {
            return Err(Error::RemovalUnsupported(self.kind.sql_name()));
        }
        if !v.is_finite() {
            return Err(Error::NonFiniteValue(v.as_f64()));
        }
        match self.kind {
            AggregateKind::Count => {
                if self.n == 0 {
                    return Err(Error::EmptyState);
                }
                self.n -= 1;
            }
            AggregateKind::CountIf => {
                if self.matches(v) {
                    if self.n == 0 {
                        return Err(Error::EmptyState);
                    }
                    self.n -= 1;
                }
            }
            _ => {
                if self.n == 0 {
                    return Err(Error::EmptyState);
                }
                self.accumulate(v, -1)?;
                self.n -= 1;
            }
        }
        Ok(())
    }

    /// Aggregate over the current window, or `None` where SQL yields NULL.
    pub fn result(&self) -> Option<Value> {
        match self.kind {
            AggregateKind::Count | AggregateKind::CountIf => Some(Value::Int(self.n as i64)),
            _ if self.n == 0 => None,
            AggregateKind::Sum => Some(self.sum_value()),
            AggregateKind::Avg => Some(Value::Float(self.sum_f64() / self.n as f64)),
            AggregateKind::Min | AggregateKind::Max => self.extremum,
            AggregateKind::VarPop => Some(Value::Float(self.var_pop())),
            AggregateKind::StddevPop => Some(Value::Float(self.var_pop().sqrt())),
            AggregateKind::VarSamp => self.var_samp().map(Value::Float),
            AggregateKind::StddevSamp => self.var_samp().map(|v| Value::Float(v.sqrt())),
        }
    }

    fn matches(&self, v: Value) -> bool {
        self.predicate.as_ref().map(|p| p(v)).unwrap_or(true)
    }

    fn fold_extremum(&mut self, v: Value) {
        let keep_new = match (self.kind, self.extremum) {
            (_, None) => true,
            (AggregateKind::Max, Some(cur)) => v.numeric_cmp(cur).is_gt(),
            (AggregateKind::Min, Some(cur)) => v.numeric_cmp(cur).is_lt(),
            _ => unreachable!("extremum folding is min/max only"),
        };
        if keep_new {
            self.extremum = Some(v);
        }
    }

    fn accumulate(&mut self, v: Value, sign: i128) -> Result<()> {
        match v {
            Value::Int(x) if self.kind.needs_sum() => {
                let x = x as i128;
                // Stage both registers before committing either, so an
                // overflow error leaves the state untouched.
                let sum = self
                    .int_sum
                    .checked_add(sign * x)
                    .ok_or(Error::NumericOverflow)?;
                let sum_sq = if self.kind.needs_sum_sq() {
                    let sq = x.checked_mul(x).ok_or(Error::NumericOverflow)?;
                    self.int_sum_sq
                        .checked_add(sign * sq)
                        .ok_or(Error::NumericOverflow)?
                } else {
                    self.int_sum_sq
                };
                self.int_sum = sum;
                self.int_sum_sq = sum_sq;
            }
            Value::Float(x) if self.kind.needs_sum() => {
                self.float_seen = true;
                self.float_sum += sign as f64 * x;
                if self.kind.needs_sum_sq() {
                    self.float_sum_sq += sign as f64 * x * x;
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn sum_f64(&self) -> f64 {
        self.int_sum as f64 + self.float_sum
    }

    fn sum_sq_f64(&self) -> f64 {
        self.int_sum_sq as f64 + self.float_sum_sq
    }

    fn sum_value(&self) -> Value {
        if self.float_seen {
            return Value::Float(self.sum_f64());
        }
        match i64::try_from(self.int_sum) {
            Ok(v) => Value::Int(v),
            Err(_) => Value::Float(self.int_sum as f64),
        }
    }

    /// Population variance, clamped at zero against float cancellation.
    fn var_pop(&self) -> f64 {
        let n = self.n as f64;
        let mean = self.sum_f64() / n;
        (self.sum_sq_f64() / n - mean * mean).max(0.0)
    }

    /// Sample variance; `None` for fewer than two rows.
    fn var_samp(&self) -> Option<f64> {
        if self.n < 2 {
            return None;
        }
        let n = self.n as f64;
        let sum = self.sum_f64();
        let num = self.sum_sq_f64() - sum * sum / n;
        Some((num / (n - 1.0)).max(0.0))
    }
}
