//! Sequence parameters and subsequence queries.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;

/// The Horadam quadruple (a, b, p, q) defining W_0 = a, W_1 = b,
/// W_n = p*W_{n-1} + q*W_{n-2}.
///
/// Construction is total: convergence conditions (and even p >= 1) are the
/// business of `validate`, so bad parameter sets can be probed and rejected
/// with diagnostics instead of being unrepresentable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SequenceParams {
    pub a: i64,
    pub b: i64,
    pub p: i64,
    pub q: i64,
}

impl SequenceParams {
    pub fn new(a: i64, b: i64, p: i64, q: i64) -> Self {
        SequenceParams { a, b, p, q }
    }
}

impl fmt::Display for SequenceParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W(a={},b={},p={},q={})", self.a, self.b, self.p, self.q)
    }
}

/// Classical presets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Fibonacci,
    Lucas,
    Pell,
}

impl Preset {
    pub fn params(self) -> SequenceParams {
        match self {
            Preset::Fibonacci => SequenceParams::new(0, 1, 1, 1),
            Preset::Lucas => SequenceParams::new(2, 1, 1, 1),
            Preset::Pell => SequenceParams::new(0, 1, 2, 1),
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "fibonacci" => Ok(Preset::Fibonacci),
            "lucas" => Ok(Preset::Lucas),
            "pell" => Ok(Preset::Pell),
            other => Err(Error::InvalidQuery(format!("unknown preset `{other}`"))),
        }
    }
}

/// Selector for the subsequence tail: sums s_k / W_{m*k+l}^d over k >= n,
/// with s_k = 1 or (-1)^k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SubseqQuery {
    pub m: u32,
    pub l: i64,
    pub d: u32,
    pub n: u64,
    pub alternating: bool,
}

impl SubseqQuery {
    /// Requires m >= 1, d >= 1, n >= 1 and l >= 1-m, which together force
    /// every summed index m*k+l >= 1.
    pub fn new(m: u32, l: i64, d: u32, n: u64, alternating: bool) -> Result<Self, Error> {
        if m < 1 {
            return Err(Error::InvalidQuery("stride m must be >= 1".into()));
        }
        if d < 1 {
            return Err(Error::InvalidQuery("power d must be >= 1".into()));
        }
        if n < 1 {
            return Err(Error::InvalidQuery("start index n must be >= 1".into()));
        }
        if l < 1 - m as i64 {
            return Err(Error::InvalidQuery(format!(
                "offset l={l} below 1-m={}",
                1 - m as i64
            )));
        }
        Ok(SubseqQuery { m, l, d, n, alternating })
    }

    /// Same query with a different tail start.
    pub fn with_start(mut self, n: u64) -> Self {
        self.n = n;
        self
    }

    /// Absolute sequence index m*k + l.
    pub fn index(&self, k: u64) -> i64 {
        self.m as i64 * k as i64 + self.l
    }
}

impl fmt::Display for SubseqQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "m={},l={},d={},n={},{}",
            self.m,
            self.l,
            self.d,
            self.n,
            if self.alternating { "alternating" } else { "plain" }
        )
    }
}
