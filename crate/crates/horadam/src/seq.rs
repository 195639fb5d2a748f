//! Exact integer evaluation of Horadam sequence terms.
//!
//! Terms are big integers computed by a linear scan of the recurrence; no
//! floating point is involved anywhere in this module.

use num_bigint::BigInt;

use crate::error::Error;
use crate::params::{SequenceParams, SubseqQuery};

/// W_n, exactly.
pub fn term(params: &SequenceParams, n: u64) -> BigInt {
    let mut prev = BigInt::from(params.a);
    if n == 0 {
        return prev;
    }
    let mut cur = BigInt::from(params.b);
    let p = BigInt::from(params.p);
    let q = BigInt::from(params.q);
    for _ in 1..n {
        let next = &p * &cur + &q * &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// [W_start, ..., W_{start+count-1}] in one pass.
pub fn term_block(params: &SequenceParams, start: u64, count: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let mut prev = BigInt::from(params.a);
    let mut cur = BigInt::from(params.b);
    if start == 0 {
        out.push(prev.clone());
    }
    let p = BigInt::from(params.p);
    let q = BigInt::from(params.q);
    let mut idx: u64 = 1;
    while out.len() < count {
        if idx >= start {
            out.push(cur.clone());
        }
        let next = &p * &cur + &q * &prev;
        prev = cur;
        cur = next;
        idx += 1;
    }
    out
}

/// W_{m*k+l} for a query position k >= query.n.
pub fn subsequence_term(
    params: &SequenceParams,
    query: &SubseqQuery,
    k: u64,
) -> Result<BigInt, Error> {
    if k < query.n {
        return Err(Error::IndexOutOfRange(format!(
            "k={k} below tail start n={}",
            query.n
        )));
    }
    let idx = query.index(k);
    if idx < 0 {
        return Err(Error::IndexOutOfRange(format!(
            "absolute index m*k+l = {idx} is negative"
        )));
    }
    Ok(term(params, idx as u64))
}

/// Iterator-style cursor producing W_{m*k+l}, W_{m*(k+1)+l}, ... by stepping
/// the recurrence m times per advance. Requires m*k+l >= 1 at the start.
pub struct SubsequenceCursor {
    p: BigInt,
    q: BigInt,
    prev: BigInt,
    cur: BigInt,
    stride: u32,
}

impl SubsequenceCursor {
    pub fn new(params: &SequenceParams, query: &SubseqQuery, k0: u64) -> Result<Self, Error> {
        let idx = query.index(k0);
        if idx < 1 {
            return Err(Error::IndexOutOfRange(format!(
                "cursor start index m*k+l = {idx} must be >= 1"
            )));
        }
        let idx = idx as u64;
        let block = term_block(params, idx - 1, 2);
        Ok(SubsequenceCursor {
            p: BigInt::from(params.p),
            q: BigInt::from(params.q),
            prev: block[0].clone(),
            cur: block[1].clone(),
            stride: query.m,
        })
    }

    /// The term at the cursor's current position.
    pub fn current(&self) -> &BigInt {
        &self.cur
    }

    /// Advances by one query position (m sequence steps).
    pub fn advance(&mut self) {
        for _ in 0..self.stride {
            let next = &self.p * &self.cur + &self.q * &self.prev;
            self.prev = std::mem::replace(&mut self.cur, next);
        }
    }
}
