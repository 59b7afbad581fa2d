//! Ternary codewords packed two bits per symbol.
//!
//! Coordinate 0 occupies the most significant lane, so comparing the packed
//! integers of two words of equal length is the same as comparing their symbol
//! sequences lexicographically, and the same as comparing their base-3
//! encodings. Coordinate reads are a shift and a mask.

use std::fmt;

use crate::error::{Result, TrifError};

/// Longest supported word. `3^20 < 2^32`, so every encoding fits a `u32`.
pub const MAX_LENGTH: usize = 20;

/// Low bit of every 2-bit lane.
const LOW_LANES: u64 = 0x5555_5555_5555_5555;

/// Powers of three up to `3^MAX_LENGTH`.
pub const POW3: [u64; MAX_LENGTH + 1] = {
    let mut table = [1u64; MAX_LENGTH + 1];
    let mut i = 1;
    while i <= MAX_LENGTH {
        table[i] = table[i - 1] * 3;
        i += 1;
    }
    table
};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Codeword {
    lanes: u64,
    len: u8,
}

/// Lane mask with a 1 in the low bit of each lane where the words differ.
#[inline(always)]
pub(crate) fn differ_mask(a: u64, b: u64) -> u64 {
    let x = a ^ b;
    (x | (x >> 1)) & LOW_LANES
}

/// Packed triple test without length or distinctness checks.
#[inline(always)]
pub(crate) fn lanes_trifferent(a: u64, b: u64, c: u64) -> bool {
    differ_mask(a, b) & differ_mask(a, c) & differ_mask(b, c) != 0
}

pub(crate) fn check_length(n: usize) -> Result<()> {
    if n == 0 || n > MAX_LENGTH {
        return Err(TrifError::InvalidLength {
            got: n,
            max: MAX_LENGTH,
        });
    }
    Ok(())
}

impl Codeword {
    pub fn from_digits(digits: &[u8]) -> Result<Self> {
        check_length(digits.len())?;
        let mut lanes = 0u64;
        for &d in digits {
            if d > 2 {
                return Err(TrifError::InvalidSymbol(d));
            }
            lanes = (lanes << 2) | u64::from(d);
        }
        Ok(Codeword {
            lanes,
            len: digits.len() as u8,
        })
    }

    /// Inverse of [`Codeword::encode`]: the first coordinate is the most
    /// significant base-3 digit.
    pub fn decode(n: usize, value: u64) -> Result<Self> {
        check_length(n)?;
        if value >= POW3[n] {
            return Err(TrifError::ValueOutOfRange { value, length: n });
        }
        Ok(Self::decode_unchecked(n, value))
    }

    pub(crate) fn decode_unchecked(n: usize, mut value: u64) -> Self {
        let mut lanes = 0u64;
        for i in 0..n {
            lanes |= (value % 3) << (2 * i);
            value /= 3;
        }
        Codeword {
            lanes,
            len: n as u8,
        }
    }

    pub(crate) fn from_lanes(n: usize, lanes: u64) -> Self {
        Codeword {
            lanes,
            len: n as u8,
        }
    }

    pub fn encode(&self) -> u32 {
        let mut v = 0u64;
        for i in 0..self.len() {
            v = v * 3 + u64::from(self.digit(i));
        }
        v as u32
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn digit(&self, i: usize) -> u8 {
        debug_assert!(i < self.len());
        ((self.lanes >> (2 * (self.len() - 1 - i))) & 3) as u8
    }

    pub fn digits(&self) -> Vec<u8> {
        (0..self.len()).map(|i| self.digit(i)).collect()
    }

    #[inline]
    pub(crate) fn lanes(&self) -> u64 {
        self.lanes
    }

    /// The word with coordinate `i` deleted.
    pub(crate) fn delete_coordinate(&self, i: usize) -> Self {
        let n = self.len();
        let low_bits = 2 * (n - 1 - i);
        let low = self.lanes & ((1u64 << low_bits) - 1);
        let high = self.lanes >> (low_bits + 2);
        Codeword {
            lanes: (high << low_bits) | low,
            len: (n - 1) as u8,
        }
    }

    /// The word with `symbol` appended as a new last coordinate.
    pub(crate) fn append(&self, symbol: u8) -> Self {
        Codeword {
            lanes: (self.lanes << 2) | u64::from(symbol),
            len: self.len + 1,
        }
    }
}

impl fmt::Debug for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Codeword(")?;
        for i in 0..self.len() {
            write!(f, "{}", self.digit(i))?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            write!(f, "{}", self.digit(i))?;
        }
        Ok(())
    }
}

/// True iff some coordinate carries all three symbols among `x`, `y`, `z`.
pub fn triple_trifferent(x: &Codeword, y: &Codeword, z: &Codeword) -> Result<bool> {
    for w in [y, z] {
        if w.len() != x.len() {
            return Err(TrifError::LengthMismatch {
                expected: x.len(),
                got: w.len(),
            });
        }
    }
    if x == y || x == z || y == z {
        return Err(TrifError::NotDistinct);
    }
    Ok(lanes_trifferent(x.lanes, y.lanes, z.lanes))
}

pub fn hamming_distance(x: &Codeword, y: &Codeword) -> Result<usize> {
    if x.len() != y.len() {
        return Err(TrifError::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(differ_mask(x.lanes, y.lanes).count_ones() as usize)
}

#[inline]
pub(crate) fn lanes_distance(a: u64, b: u64) -> u32 {
    differ_mask(a, b).count_ones()
}
