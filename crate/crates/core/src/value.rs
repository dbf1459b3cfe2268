//! Digit values, wire ranges and radix conversion.
//!
//! Every wire in a netlist carries a single small integer whose maximum is
//! fixed at construction: 1 for a binary wire, 2 for a ternary carry and 3
//! for a quaternary digit. Digit vectors are stored least-significant first so
//! that column `i` of a reduction tree is simply index `i`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest value any wire may carry.
pub const MAX_WIRE_VALUE: u8 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("wire range maximum must be in 1..=3, got {0}")]
    InvalidRange(u8),
    #[error("digit {value} exceeds range maximum {max}")]
    DigitOutOfRange { value: u8, max: u8 },
    #[error("unsupported radix {0} (expected 2 or 4)")]
    UnsupportedRadix(u32),
    #[error("{value} does not fit in {width} digits of radix {radix}")]
    Overflow { value: u64, radix: u32, width: usize },
    #[error("compressor takes 1 to 3 inputs, got {0}")]
    TooManyInputs(usize),
}

/// Maximum value a wire can carry.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct ValueRange(u8);

impl ValueRange {
    pub const BINARY: ValueRange = ValueRange(1);
    pub const TERNARY: ValueRange = ValueRange(2);
    pub const QUATERNARY: ValueRange = ValueRange(3);

    pub fn new(max_value: u8) -> Result<Self, ValueError> {
        if (1..=MAX_WIRE_VALUE).contains(&max_value) {
            Ok(ValueRange(max_value))
        } else {
            Err(ValueError::InvalidRange(max_value))
        }
    }

    #[inline]
    pub fn max_value(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn contains(self, value: u8) -> bool {
        value <= self.0
    }

    /// Range of a single digit in the given radix.
    pub fn for_radix(radix: Radix) -> Self {
        match radix {
            Radix::Binary => ValueRange::BINARY,
            Radix::Quaternary => ValueRange::QUATERNARY,
        }
    }
}

impl fmt::Debug for ValueRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ValueRange({})", self.0)
    }
}

impl fmt::Display for ValueRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<u8> for ValueRange {
    type Error = ValueError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        ValueRange::new(value)
    }
}

impl From<ValueRange> for u8 {
    fn from(r: ValueRange) -> u8 {
        r.0
    }
}

/// Radix of an operand or of a compression tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Radix {
    Binary,
    Quaternary,
}

impl Radix {
    pub fn new(radix: u32) -> Result<Self, ValueError> {
        match radix {
            2 => Ok(Radix::Binary),
            4 => Ok(Radix::Quaternary),
            other => Err(ValueError::UnsupportedRadix(other)),
        }
    }

    #[inline]
    pub fn base(self) -> u32 {
        match self {
            Radix::Binary => 2,
            Radix::Quaternary => 4,
        }
    }

    #[inline]
    pub fn digit_max(self) -> u8 {
        (self.base() - 1) as u8
    }

    /// `radix^width`, or `None` when it does not fit in a `u64`.
    pub fn capacity(self, width: usize) -> Option<u64> {
        let width = u32::try_from(width).ok()?;
        u64::from(self.base()).checked_pow(width)
    }
}

impl TryFrom<u32> for Radix {
    type Error = ValueError;

    fn try_from(value: u32) -> Result<Self, Self::Error> {
        Radix::new(value)
    }
}

impl From<Radix> for u32 {
    fn from(r: Radix) -> u32 {
        r.base()
    }
}

impl fmt::Display for Radix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base())
    }
}

/// A value together with the range of the wire carrying it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigitValue {
    value: u8,
    range: ValueRange,
}

impl DigitValue {
    pub fn new(value: u8, range: ValueRange) -> Result<Self, ValueError> {
        if range.contains(value) {
            Ok(DigitValue { value, range })
        } else {
            Err(ValueError::DigitOutOfRange {
                value,
                max: range.max_value(),
            })
        }
    }

    #[inline]
    pub fn value(self) -> u8 {
        self.value
    }

    #[inline]
    pub fn range(self) -> ValueRange {
        self.range
    }
}

/// Fixed-width positional number, least-significant digit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitVector {
    digits: Vec<u8>,
    radix: Radix,
}

impl DigitVector {
    pub fn new(digits: Vec<u8>, radix: Radix) -> Result<Self, ValueError> {
        let max = radix.digit_max();
        if let Some(&bad) = digits.iter().find(|&&d| d > max) {
            return Err(ValueError::DigitOutOfRange { value: bad, max });
        }
        Ok(DigitVector { digits, radix })
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn radix(&self) -> Radix {
        self.radix
    }

    pub fn width(&self) -> usize {
        self.digits.len()
    }

    pub fn into_digits(self) -> Vec<u8> {
        self.digits
    }
}

/// Splits `n` into exactly `width` digits of the given radix.
pub fn to_digits(n: u64, radix: u32, width: usize) -> Result<DigitVector, ValueError> {
    let radix = Radix::new(radix)?;
    let mut digits = vec![0u8; width];
    write_digits(n, radix, &mut digits)?;
    Ok(DigitVector { digits, radix })
}

/// Allocation-free variant of [`to_digits`] used on the verification hot path.
pub fn write_digits(n: u64, radix: Radix, out: &mut [u8]) -> Result<(), ValueError> {
    let fits = radix.capacity(out.len()).map_or(true, |cap| n < cap);
    if !fits {
        return Err(ValueError::Overflow {
            value: n,
            radix: radix.base(),
            width: out.len(),
        });
    }
    let base = u64::from(radix.base());
    let mut rest = n;
    for d in out.iter_mut() {
        *d = (rest % base) as u8;
        rest /= base;
    }
    Ok(())
}

pub fn from_digits(v: &DigitVector) -> u64 {
    digits_value(v.digits(), v.radix())
}

/// `Σ digits[i]·radix^i`. Digits may exceed `radix - 1`; the result is the
/// plain weighted sum.
pub fn digits_value(digits: &[u8], radix: Radix) -> u64 {
    let base = u64::from(radix.base());
    digits
        .iter()
        .rev()
        .fold(0u64, |acc, &d| acc * base + u64::from(d))
}

/// Output ranges of a column compressor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SumRanges {
    pub sum: ValueRange,
    /// `None` when the inputs can never produce a carry.
    pub carry: Option<ValueRange>,
}

/// Sum and carry ranges of a compressor adding `inputs` in the given radix.
pub fn range_of_sum(inputs: &[ValueRange], radix: Radix) -> Result<SumRanges, ValueError> {
    if inputs.is_empty() || inputs.len() > 3 {
        return Err(ValueError::TooManyInputs(inputs.len()));
    }
    let total: u32 = inputs.iter().map(|r| u32::from(r.max_value())).sum();
    let base = radix.base();
    let sum = ValueRange(total.min(base - 1) as u8);
    let carry = total / base;
    let carry = if carry == 0 {
        None
    } else {
        Some(ValueRange::new(carry as u8)?)
    };
    Ok(SumRanges { sum, carry })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn to_digits_examples() {
        assert_eq!(to_digits(0, 4, 4).unwrap().digits(), &[0, 0, 0, 0]);
        assert_eq!(to_digits(255, 4, 4).unwrap().digits(), &[3, 3, 3, 3]);
        assert_eq!(to_digits(11, 2, 4).unwrap().digits(), &[1, 1, 0, 1]);
    }

    #[test]
    fn to_digits_errors() {
        assert_eq!(
            to_digits(256, 4, 4),
            Err(ValueError::Overflow {
                value: 256,
                radix: 4,
                width: 4
            })
        );
        assert_eq!(to_digits(1, 3, 4), Err(ValueError::UnsupportedRadix(3)));
        assert!(to_digits(1, 2, 0).is_err());
        assert_eq!(to_digits(0, 2, 0).unwrap().width(), 0);
    }

    #[test]
    fn from_digits_examples() {
        let v = |d: Vec<u8>| DigitVector::new(d, Radix::Quaternary).unwrap();
        assert_eq!(from_digits(&v(vec![0, 0])), 0);
        assert_eq!(from_digits(&v(vec![3, 3, 3, 3])), 255);
        assert_eq!(from_digits(&v(vec![1, 2])), 9);
    }

    #[test]
    fn digit_vector_rejects_large_digit() {
        assert!(DigitVector::new(vec![0, 2], Radix::Binary).is_err());
        assert!(DigitValue::new(3, ValueRange::TERNARY).is_err());
        assert_eq!(DigitValue::new(2, ValueRange::TERNARY).unwrap().value(), 2);
    }

    #[test]
    fn range_bounds() {
        assert!(ValueRange::new(0).is_err());
        assert!(ValueRange::new(4).is_err());
        assert_eq!(ValueRange::new(2).unwrap(), ValueRange::TERNARY);
    }

    #[test]
    fn range_of_sum_examples() {
        let q = ValueRange::QUATERNARY;
        let t = ValueRange::TERNARY;
        let b = ValueRange::BINARY;
        let r = range_of_sum(&[q, q, t], Radix::Quaternary).unwrap();
        assert_eq!((r.sum, r.carry), (q, Some(t)));
        let r = range_of_sum(&[q, q, b], Radix::Quaternary).unwrap();
        assert_eq!((r.sum, r.carry), (q, Some(b)));
        let r = range_of_sum(&[b, b], Radix::Binary).unwrap();
        assert_eq!((r.sum, r.carry), (b, Some(b)));
        // two binary wires never carry in radix 4
        let r = range_of_sum(&[b, b], Radix::Quaternary).unwrap();
        assert_eq!((r.sum, r.carry), (t, None));
        assert_eq!(
            range_of_sum(&[q, q, q, q], Radix::Quaternary),
            Err(ValueError::TooManyInputs(4))
        );
    }

    proptest! {
        #[test]
        fn round_trip(radix in prop::sample::select(vec![2u32, 4]), width in 0usize..12, seed: u64) {
            let cap = u64::from(radix).pow(width as u32);
            let n = seed % cap;
            let v = to_digits(n, radix, width).unwrap();
            prop_assert_eq!(v.width(), width);
            prop_assert_eq!(from_digits(&v), n);
        }

        #[test]
        fn carry_is_floor_of_total(ranges in prop::collection::vec(1u8..=3, 1..=3), quaternary: bool) {
            let radix = if quaternary { Radix::Quaternary } else { Radix::Binary };
            let rs: Vec<_> = ranges.iter().map(|&m| ValueRange::new(m).unwrap()).collect();
            if radix == Radix::Binary && ranges.iter().any(|&m| m > 1) {
                return Ok(());
            }
            let total: u32 = ranges.iter().map(|&m| u32::from(m)).sum();
            let out = range_of_sum(&rs, radix).unwrap();
            let carry = out.carry.map_or(0, |c| u32::from(c.max_value()));
            prop_assert_eq!(carry, total / radix.base());
            prop_assert_eq!(u32::from(out.sum.max_value()), total.min(radix.base() - 1));
        }
    }
}
