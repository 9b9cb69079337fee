//! Binary situations and ternary conditions.
//!
//! Both are packed into a `u64`. Position 0 is the leftmost symbol and lives in
//! the most significant used bit, so a situation's integer value equals its
//! big-endian reading. A condition is a pair of masks: `care` has a bit set for
//! every non-`#` position and `value` holds the required bit at those positions.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_WIDTH: usize = 64;

fn width_mask(width: usize) -> u64 {
    if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

fn check_width(width: usize) -> Result<()> {
    if width == 0 || width > MAX_WIDTH {
        return Err(Error::UnsupportedWidth(width));
    }
    Ok(())
}

/// A fixed-width binary input string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Situation {
    bits: u64,
    width: u8,
}

impl Situation {
    pub fn new(bits: u64, width: usize) -> Result<Self> {
        check_width(width)?;
        if bits & !width_mask(width) != 0 {
            return Err(Error::EncodingOverflow { value: bits as usize, bits: width });
        }
        Ok(Situation { bits, width: width as u8 })
    }

    /// Packs unsigned fields big-endian, each into the given number of bits.
    pub fn from_fields(fields: &[(usize, usize)]) -> Result<Self> {
        let mut bits = 0u64;
        let mut width = 0usize;
        for &(value, field_bits) in fields {
            if field_bits < 64 && value >> field_bits != 0 {
                return Err(Error::EncodingOverflow { value, bits: field_bits });
            }
            bits = (bits << field_bits) | value as u64;
            width += field_bits;
        }
        Situation::new(bits, width)
    }

    /// Splits the situation back into big-endian fields of the given widths.
    pub fn to_fields(&self, widths: &[usize]) -> Vec<usize> {
        let mut shift = self.width();
        widths
            .iter()
            .map(|&w| {
                shift -= w;
                ((self.bits >> shift) & width_mask(w)) as usize
            })
            .collect()
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    /// Symbol at position `i`, counted from the left.
    pub fn bit(&self, i: usize) -> bool {
        (self.bits >> (self.width() - 1 - i)) & 1 == 1
    }
}

impl fmt::Display for Situation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Situation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = 0u64;
        let mut width = 0usize;
        for ch in s.chars().filter(|c| !c.is_whitespace()) {
            let bit = match ch {
                '0' => 0,
                '1' => 1,
                other => return Err(Error::InvalidSymbol(other)),
            };
            width += 1;
            if width > MAX_WIDTH {
                return Err(Error::UnsupportedWidth(width));
            }
            bits = (bits << 1) | bit;
        }
        Situation::new(bits, width)
    }
}

/// A ternary condition over `{0, 1, #}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Condition {
    care: u64,
    value: u64,
    width: u8,
}

impl Condition {
    /// The condition that matches exactly `s`.
    pub fn specific(s: &Situation) -> Self {
        Condition { care: width_mask(s.width()), value: s.bits, width: s.width }
    }

    pub fn all_wildcards(width: usize) -> Result<Self> {
        check_width(width)?;
        Ok(Condition { care: 0, value: 0, width: width as u8 })
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn care_mask(&self) -> u64 {
        self.care
    }

    pub fn value_mask(&self) -> u64 {
        self.value
    }

    /// Symbol at position `i`: `Some(bit)` or `None` for `#`.
    pub fn symbol(&self, i: usize) -> Option<bool> {
        let shift = self.width() - 1 - i;
        if (self.care >> shift) & 1 == 1 {
            Some((self.value >> shift) & 1 == 1)
        } else {
            None
        }
    }

    pub(crate) fn set_symbol(&mut self, i: usize, symbol: Option<bool>) {
        let bit = 1u64 << (self.width() - 1 - i);
        match symbol {
            None => {
                self.care &= !bit;
                self.value &= !bit;
            }
            Some(b) => {
                self.care |= bit;
                if b {
                    self.value |= bit;
                } else {
                    self.value &= !bit;
                }
            }
        }
    }

    pub fn wildcard_count(&self) -> usize {
        self.width() - self.care.count_ones() as usize
    }

    pub fn matches(&self, s: &Situation) -> Result<bool> {
        if self.width != s.width {
            return Err(Error::WidthMismatch { expected: self.width(), actual: s.width() });
        }
        Ok(self.matches_unchecked(s))
    }

    #[inline]
    pub(crate) fn matches_unchecked(&self, s: &Situation) -> bool {
        s.bits & self.care == self.value
    }

    /// Strict generality: more wildcards than `other`, and every specified
    /// symbol of `self` agrees with `other`.
    pub fn is_more_general(&self, other: &Condition) -> Result<bool> {
        if self.width != other.width {
            return Err(Error::WidthMismatch { expected: self.width(), actual: other.width() });
        }
        Ok(self.is_more_general_unchecked(other))
    }

    pub(crate) fn is_more_general_unchecked(&self, other: &Condition) -> bool {
        self.care.count_ones() < other.care.count_ones()
            && self.care & other.care == self.care
            && other.value & self.care == self.value
    }

    /// A condition matching `s` where each position is `#` with probability
    /// `p_hash`.
    pub fn cover<R: Rng + ?Sized>(s: &Situation, p_hash: f64, rng: &mut R) -> Self {
        let mut c = Condition::specific(s);
        for i in 0..s.width() {
            if rng.gen_bool(p_hash.clamp(0.0, 1.0)) {
                c.set_symbol(i, None);
            }
        }
        c
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width() {
            f.write_str(match self.symbol(i) {
                Some(true) => "1",
                Some(false) => "0",
                None => "#",
            })?;
        }
        Ok(())
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols: Vec<Option<bool>> = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|ch| match ch {
                '0' => Ok(Some(false)),
                '1' => Ok(Some(true)),
                '#' => Ok(None),
                other => Err(Error::InvalidSymbol(other)),
            })
            .collect::<Result<_>>()?;
        let mut c = Condition::all_wildcards(symbols.len())?;
        for (i, sym) in symbols.into_iter().enumerate() {
            c.set_symbol(i, sym);
        }
        Ok(c)
    }
}

pub fn matches(c: &Condition, s: &Situation) -> Result<bool> {
    c.matches(s)
}

pub fn is_more_general(general: &Condition, specific: &Condition) -> Result<bool> {
    general.is_more_general(specific)
}

pub fn covering_condition<R: Rng + ?Sized>(s: &Situation, p_hash: f64, rng: &mut R) -> Condition {
    Condition::cover(s, p_hash, rng)
}
