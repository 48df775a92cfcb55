//! Exact integer arithmetic around the golden ratio: integer square roots,
//! Beatty-sequence floors, Fibonacci numbers and Zeckendorf words.
//!
//! Nothing here touches floating point; every comparison against the golden
//! ratio reduces to a sign test on integers.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest index accepted by [`fib`]; `F_90` is the last value comfortably
/// inside 64 bits.
pub const MAX_FIB_INDEX: u32 = 90;

/// Exclusive upper bound for [`floor_phi`] arguments.
pub const PHI_ARG_LIMIT: u64 = 1 << 62;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{what} argument {value} is out of range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        value: u64,
        limit: u64,
    },
    #[error("denominator must be positive")]
    ZeroDenominator,
    #[error("Fibonacci word {0:?} has two adjacent ones")]
    AdjacentOnes(String),
    #[error("invalid Fibonacci word {0:?}")]
    InvalidWord(String),
}

/// Integer square root: the largest `r` with `r * r <= x`.
pub fn isqrt(x: u128) -> u128 {
    if x < 2 {
        return x;
    }
    // Initial guess from the bit length is always >= sqrt(x).
    let bits = 128 - x.leading_zeros();
    let mut r: u128 = 1 << bits.div_ceil(2);
    loop {
        let next = (r + x / r) / 2;
        if next >= r {
            break;
        }
        r = next;
    }
    while r * r > x {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= x) {
        r += 1;
    }
    debug_assert!(r * r <= x);
    r
}

/// `floor(Φ·n)`, computed as `floor((n + isqrt(5 n²)) / 2)`.
pub fn floor_phi(n: u64) -> Result<u64, ArithError> {
    if n >= PHI_ARG_LIMIT {
        return Err(ArithError::OutOfRange {
            what: "floor_phi",
            value: n,
            limit: PHI_ARG_LIMIT,
        });
    }
    let n = n as u128;
    Ok(((n + isqrt(5 * n * n)) / 2) as u64)
}

/// `ceil(Φ·n)`. Φn is irrational for n ≥ 1, so this is `floor_phi(n) + 1`.
pub fn ceil_phi(n: u64) -> Result<u64, ArithError> {
    Ok(if n == 0 { 0 } else { floor_phi(n)? + 1 })
}

/// Which side of Φ a ratio falls on. Equality is impossible for integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiSide {
    Below,
    Above,
}

/// Compares `b / a` with Φ via the sign of `b² − ab − a²`.
pub fn compare_ratio_phi(a: u64, b: u64) -> Result<PhiSide, ArithError> {
    if a == 0 {
        return Err(ArithError::ZeroDenominator);
    }
    let (a, b) = (a as i128, b as i128);
    let disc = b * b - a * b - a * a;
    debug_assert_ne!(disc, 0);
    Ok(if disc < 0 {
        PhiSide::Below
    } else {
        PhiSide::Above
    })
}

/// `F_n` with `F_0 = 0`, `F_1 = 1`.
pub fn fib(n: u32) -> Result<u64, ArithError> {
    if n > MAX_FIB_INDEX {
        return Err(ArithError::OutOfRange {
            what: "fib",
            value: n as u64,
            limit: MAX_FIB_INDEX as u64,
        });
    }
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    Ok(a)
}

/// `u_n = F_{n+1} − 1`.
pub fn u_seq(n: u32) -> Result<u64, ArithError> {
    Ok(fib(n + 1)? - 1)
}

fn fib_table() -> &'static [u64] {
    static TABLE: std::sync::OnceLock<Vec<u64>> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| (0..=MAX_FIB_INDEX).map(|i| fib(i).unwrap()).collect())
}

/// If `(a, b)` in lowest terms is `(F_j, F_{j+1})` for some `j ≥ 1`,
/// returns that `j`. Used for the exact Fibonacci-ratio tests.
pub fn consecutive_fib_index(a: u64, b: u64) -> Option<u32> {
    if a == 0 || b == 0 {
        return None;
    }
    let g = gcd(a, b);
    let (a, b) = (a / g, b / g);
    let t = fib_table();
    (1..MAX_FIB_INDEX as usize)
        .find(|&j| t[j] == a && t[j + 1] == b)
        .map(|j| j as u32)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A Zeckendorf word `x_k … x_2`.
///
/// Bit `i` of the mask is the coefficient of `F_{i+2}`; the empty word
/// encodes 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct FibWord(u128);

impl FibWord {
    pub const EMPTY: FibWord = FibWord(0);

    /// Builds a word from a raw mask, rejecting adjacent ones.
    pub fn from_mask(mask: u128) -> Result<Self, ArithError> {
        if mask & (mask >> 1) != 0 {
            return Err(ArithError::AdjacentOnes(format!("{:b}", mask)));
        }
        if mask >> (MAX_FIB_INDEX - 1) != 0 {
            return Err(ArithError::InvalidWord(format!("{:b}", mask)));
        }
        Ok(FibWord(mask))
    }

    pub fn mask(self) -> u128 {
        self.0
    }

    pub fn len(self) -> u32 {
        128 - self.0.leading_zeros()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Number of trailing `0` digits (zero for the empty word).
    pub fn trailing_zeros(self) -> u32 {
        if self.0 == 0 {
            0
        } else {
            self.0.trailing_zeros()
        }
    }

    /// True for `(10)^n`, n ≥ 0 (including the empty word).
    pub fn is_ten_power(self) -> bool {
        let n = self.len() / 2;
        self.len().is_multiple_of(2) && self.0 == ten_power_mask(n)
    }

    /// True for `(10)^n 1`, n ≥ 0.
    pub fn is_ten_power_one(self) -> bool {
        let len = self.len();
        len % 2 == 1 && self.0 == (ten_power_mask(len / 2) << 1) | 1
    }

    /// Appends one digit at the low end.
    pub fn shifted(self, digit: bool) -> Result<FibWord, ArithError> {
        FibWord::from_mask((self.0 << 1) | digit as u128)
    }

    /// Removes the lowest digit.
    pub fn unshifted(self) -> FibWord {
        FibWord(self.0 >> 1)
    }
}

fn ten_power_mask(blocks: u32) -> u128 {
    (0..blocks).fold(0, |m, _| (m << 2) | 0b10)
}

impl fmt::Display for FibWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return Ok(());
        }
        write!(f, "{:b}", self.0)
    }
}

impl FromStr for FibWord {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(FibWord::EMPTY);
        }
        if s.starts_with('0') || s.len() >= MAX_FIB_INDEX as usize {
            return Err(ArithError::InvalidWord(s.to_string()));
        }
        let mask =
            u128::from_str_radix(s, 2).map_err(|_| ArithError::InvalidWord(s.to_string()))?;
        FibWord::from_mask(mask)
    }
}

/// Greedy Zeckendorf decomposition of `n`, for `n < F_91`.
pub fn zeckendorf(mut n: u64) -> Result<FibWord, ArithError> {
    let t = fib_table();
    let limit = t[MAX_FIB_INDEX as usize] + t[MAX_FIB_INDEX as usize - 1];
    if n >= limit {
        return Err(ArithError::OutOfRange {
            what: "zeckendorf",
            value: n,
            limit,
        });
    }
    let mut mask = 0u128;
    // F_2 .. F_90 cover every u64 below F_91.
    for i in (2..=MAX_FIB_INDEX as usize).rev() {
        if t[i] <= n {
            n -= t[i];
            mask |= 1 << (i - 2);
        }
    }
    debug_assert_eq!(n, 0);
    Ok(FibWord(mask))
}

/// Inverse of [`zeckendorf`].
pub fn zeckendorf_decode(word: FibWord) -> u64 {
    let t = fib_table();
    (0..word.len() as usize)
        .filter(|&i| word.0 >> i & 1 == 1)
        .map(|i| t[i + 2])
        .sum()
}

/// A Wythoff pair `(⌊Φn⌋, ⌊Φn⌋ + n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WythoffPair {
    pub a: u64,
    pub b: u64,
}

impl WythoffPair {
    pub fn nth(n: u64) -> Result<Self, ArithError> {
        let a = floor_phi(n)?;
        Ok(WythoffPair { a, b: a + n })
    }
}

/// Whether the unordered pair `{x, y}` is a Wythoff pair.
pub fn is_wythoff_pair(x: u64, y: u64) -> Result<bool, ArithError> {
    let (a, b) = (x.min(y), x.max(y));
    Ok(floor_phi(b - a)? == a)
}
