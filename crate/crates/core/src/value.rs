//! Scalar cell values and typed columns.
//!
//! A column is uniformly integer or uniformly float; the engine never mixes
//! types inside one column. `Scalar` is the element interface shared by the
//! deque and spill machinery: a total order over finite values plus a fixed
//! 8-byte little-endian encoding for page files.

use std::cmp::Ordering;
use std::fmt;

/// One finite numeric cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
}

impl Value {
    pub fn as_f64(self) -> f64 {
        match self {
            Value::Int(v) => v as f64,
            Value::Float(v) => v,
        }
    }

    pub fn is_finite(self) -> bool {
        match self {
            Value::Int(_) => true,
            Value::Float(v) => v.is_finite(),
        }
    }

    /// Numeric order; integers compare exactly against each other.
    pub fn numeric_cmp(self, other: Value) -> Ordering {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a.cmp(&b),
            (a, b) => a.as_f64().total_cmp(&b.as_f64()),
        }
    }

    /// Equality that distinguishes float bit patterns; used where outputs must
    /// match a reference bit for bit.
    pub fn bits_eq(self, other: Value) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Float(a), Value::Float(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{}", format_float(*v)),
        }
    }
}

/// A uniformly typed sequence of cells.
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Int(Vec<i64>),
    Float(Vec<f64>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Int(v) => v.len(),
            Column::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value(&self, i: usize) -> Value {
        match self {
            Column::Int(v) => Value::Int(v[i]),
            Column::Float(v) => Value::Float(v[i]),
        }
    }
}

/// Element type for the extremum deque and its spilled form.
pub trait Scalar: Copy + PartialEq + fmt::Debug + Send + Sync + 'static {
    /// Total order; callers guarantee finiteness, so this is the numeric order.
    fn total_cmp(&self, other: &Self) -> Ordering;
    fn is_finite_scalar(&self) -> bool;
    fn to_le_bytes8(self) -> [u8; 8];
    fn from_le_bytes8(bytes: [u8; 8]) -> Self;
    fn into_value(self) -> Value;
    /// Lossy float view, used only for error reporting.
    fn to_f64_lossy(self) -> f64;
}

impl Scalar for i64 {
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn is_finite_scalar(&self) -> bool {
        true
    }

    fn to_le_bytes8(self) -> [u8; 8] {
        self.to_le_bytes()
    }

    fn from_le_bytes8(bytes: [u8; 8]) -> Self {
        i64::from_le_bytes(bytes)
    }

    fn into_value(self) -> Value {
        Value::Int(self)
    }

    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn total_cmp(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }

    fn is_finite_scalar(&self) -> bool {
        self.is_finite()
    }

    fn to_le_bytes8(self) -> [u8; 8] {
        self.to_bits().to_le_bytes()
    }

    fn from_le_bytes8(bytes: [u8; 8]) -> Self {
        f64::from_bits(u64::from_le_bytes(bytes))
    }

    fn into_value(self) -> Value {
        Value::Float(self)
    }

    fn to_f64_lossy(self) -> f64 {
        self
    }
}

/// Renders a float with at most 12 significant digits and no trailing
/// fractional zeros. Values whose magnitude needs more than 18 integer digits
/// fall back to scientific notation.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    // 12 significant digits via exponential form, then reflow to plain decimal.
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponential form");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-6..=17).contains(&exp) {
        let trimmed = trim_mantissa(mantissa);
        return format!("{trimmed}e{exp}");
    }
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 12);
    let point = exp + 1; // digits before the decimal point
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        for _ in 0..-point {
            out.push('0');
        }
        out.push_str(&digits);
    } else if (point as usize) >= digits.len() {
        out.push_str(&digits);
        for _ in 0..(point as usize - digits.len()) {
            out.push('0');
        }
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    if out.contains('.') {
        let trimmed = out.trim_end_matches('0').trim_end_matches('.');
        trimmed.to_string()
    } else {
        out
    }
}

fn trim_mantissa(m: &str) -> String {
    if m.contains('.') {
        m.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        m.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_trims_trailing_zeros() {
        assert_eq!(format_float(80.0), "80");
        assert_eq!(format_float(82.25), "82.25");
        assert_eq!(format_float(-82.25), "-82.25");
        assert_eq!(format_float(0.0), "0");
    }

    #[test]
    fn format_keeps_twelve_significant_digits() {
        assert_eq!(format_float(242.0 / 3.0), "80.6666666667");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_float(123456789012345.0), "123456789012000");
    }

    #[test]
    fn format_small_magnitudes_stay_plain() {
        assert_eq!(format_float(1e-5), "0.00001");
        assert_eq!(format_float(-2.5e-4), "-0.00025");
    }

    #[test]
    fn format_extreme_magnitudes_use_exponent() {
        assert_eq!(format_float(1e30), "1e30");
        assert_eq!(format_float(2.5e-9), "2.5e-9");
    }

    #[test]
    fn value_display_matches_column_type() {
        assert_eq!(Value::Int(7).to_string(), "7");
        assert_eq!(Value::Float(7.5).to_string(), "7.5");
        assert_eq!(Value::Float(7.0).to_string(), "7");
    }

    #[test]
    fn scalar_roundtrips_through_bytes() {
        for v in [i64::MIN, -1, 0, 1, i64::MAX] {
            assert_eq!(i64::from_le_bytes8(v.to_le_bytes8()), v);
        }
        for v in [-1.5f64, 0.0, 3.25, f64::MIN_POSITIVE] {
            assert_eq!(f64::from_le_bytes8(v.to_le_bytes8()).to_bits(), v.to_bits());
        }
    }

    #[test]
    fn numeric_cmp_is_exact_for_large_ints() {
        let a = Value::Int(i64::MAX);
        let b = Value::Int(i64::MAX - 1);
        assert_eq!(a.numeric_cmp(b), Ordering::Greater);
    }
}
