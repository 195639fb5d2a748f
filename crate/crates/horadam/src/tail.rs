//! High-precision evaluation of reciprocal-sum tails
//! T(n) = sum_{k>=n} s_k / W_{mk+l}^d with a rigorous truncation bound.
//!
//! Terms are always reciprocals of exact integers; the only approximations
//! are the working-precision rounding and the cut tail, both quantified.
//!
//! The truncation bound: once eps_K = |c2/c1| * |beta/alpha|^{m(K+1)+l} drops
//! below 1/4 (the dominance condition, delta = 2*eps < 1/2), the Binet form
//! pins every later term between geometric envelopes:
//!   |W_N| in |c1| * alpha^N * [1 - eps, 1 + eps]   for N >= m(K+1)+l,
//! so with g = alpha^(-dm),
//!   sum_{k>K} |t_k| <= |t_{K+1}| * ((1+eps)/(1-eps))^d / (1 - g) =: R(K).

use num_bigint::BigInt;
use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::binet::{build_context, BinetContext};
use crate::error::Error;
use crate::params::{SequenceParams, SubseqQuery};
use crate::real::{decimal_digits_for, Real, GUARD_BITS};
use crate::seq::SubsequenceCursor;

/// Default cap on the number of exactly-summed terms.
pub const DEFAULT_TERM_CAP: u64 = 1_000_000;

/// Default epsilon tied to the working precision: 2^(-P/2).
pub fn default_epsilon(precision_bits: u32) -> Real {
    Real::pow2(-(precision_bits as i64) / 2, precision_bits)
}

/// A tail value together with a proven truncation bound.
#[derive(Clone, Debug)]
pub struct TailValue {
    pub value: Real,
    pub truncation_bound: Real,
    pub terms_used: u64,
    pub precision_bits: u32,
}

impl Serialize for TailValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let digits = decimal_digits_for(self.precision_bits);
        let mut st = s.serialize_struct("TailValue", 4)?;
        st.serialize_field("value", &self.value.to_decimal_string(digits))?;
        st.serialize_field(
            "truncation_bound",
            &self.truncation_bound.to_decimal_string(digits),
        )?;
        st.serialize_field("terms_used", &self.terms_used)?;
        st.serialize_field("precision_bits", &self.precision_bits)?;
        st.end()
    }
}

/// Geometric-envelope machinery shared by `tail_sum` and `truncation_bound`.
struct BoundState {
    /// |c2/c1| * (|beta|/alpha)^(m*k+l) for the current lookahead k.
    eps: Real,
    /// (|beta|/alpha)^m, the per-step decay of `eps`.
    step: Real,
    /// alpha^(-d*m).
    g: Real,
    /// 1/4 threshold.
    quarter: Real,
    d: u32,
    wp: u32,
}

impl BoundState {
    fn new(ctx: &BinetContext, query: &SubseqQuery, k_look: u64, wp: u32) -> Self {
        let ratio = ctx.beta.abs().div(&ctx.alpha, wp);
        let c_ratio = if ctx.c2.is_zero() {
            Real::zero(wp)
        } else {
            ctx.c2.abs().div(&ctx.c1.abs(), wp)
        };
        let idx = query.index(k_look);
        debug_assert!(idx >= 1);
        let eps = c_ratio.mul(&ratio.powi(idx as u64, wp), wp);
        let step = ratio.powi(query.m as u64, wp);
        let g = ctx
            .alpha
            .powi(query.d as u64 * query.m as u64, wp)
            .recip(wp);
        BoundState {
            eps,
            step,
            g,
            quarter: Real::pow2(-2, wp),
            d: query.d,
            wp,
        }
    }

    fn dominance_holds(&self) -> bool {
        self.eps.lt(&self.quarter)
    }

    /// R with the next term's magnitude; caller must have checked dominance.
    fn remainder_bound(&self, t_next_abs: &Real) -> Real {
        let wp = self.wp;
        let one = Real::one(wp);
        let env = one
            .add(&self.eps, wp)
            .div(&one.sub(&self.eps, wp), wp)
            .powi(self.d as u64, wp);
        t_next_abs.mul(&env, wp).div(&one.sub(&self.g, wp), wp)
    }

    fn advance(&mut self) {
        self.eps = self.eps.mul(&self.step, self.wp);
    }
}

/// Sums the tail exactly until the geometric remainder bound drops to
/// `epsilon`, with the default term cap.
pub fn tail_sum(
    params: &SequenceParams,
    query: &SubseqQuery,
    epsilon: &Real,
    precision_bits: u32,
) -> Result<TailValue, Error> {
    let tails = tail_sum_batch(params, query, query.n, epsilon, precision_bits, DEFAULT_TERM_CAP)?;
    Ok(tails.into_iter().next().expect("batch returns n..=n_to"))
}

pub fn tail_sum_with_cap(
    params: &SequenceParams,
    query: &SubseqQuery,
    epsilon: &Real,
    precision_bits: u32,
    cap: u64,
) -> Result<TailValue, Error> {
    let tails = tail_sum_batch(params, query, query.n, epsilon, precision_bits, cap)?;
    Ok(tails.into_iter().next().expect("batch returns n..=n_to"))
}

/// Computes T(n) for every n in query.n ..= n_to in a single pass sharing one
/// truncation point, returned in ascending n. The terms are accumulated from
/// the smallest up, so no cancellation is introduced.
pub fn tail_sum_batch(
    params: &SequenceParams,
    query: &SubseqQuery,
    n_to: u64,
    epsilon: &Real,
    precision_bits: u32,
    cap: u64,
) -> Result<Vec<TailValue>, Error> {
    if !epsilon.is_positive() {
        return Err(Error::DomainViolation("epsilon must be > 0".into()));
    }
    if n_to < query.n {
        return Err(Error::InvalidQuery(format!(
            "n_to={n_to} below tail start n={}",
            query.n
        )));
    }
    let p = precision_bits;
    let wp = p + GUARD_BITS;
    let ctx = build_context(params, wp)?;
    let n = query.n;
    // Accept only bounds a hair below epsilon so the final rounding to P
    // cannot push the stored bound above the requested epsilon.
    let eps_gate = epsilon.sub(&epsilon.mul(&Real::pow2(-12, wp), wp), wp);

    let mut cursor = SubsequenceCursor::new(params, query, n)?;
    let mut state = BoundState::new(&ctx, query, n + 1, wp);

    // terms[j] = s_{n+j} / W_{m(n+j)+l}^d
    let mut terms: Vec<Real> = Vec::new();
    let bound: Real;
    let mut k = n;
    loop {
        let w = cursor.current().clone();
        if w.is_zero() {
            let idx = query.index(k);
            return Err(Error::ZeroTerm { index: idx as u64 });
        }
        let wd: BigInt = w.pow(query.d);
        let mut t = Real::from_bigint(&wd, wp).recip(wp);
        if query.alternating && k % 2 == 1 {
            t = t.neg();
        }
        terms.push(t);
        if terms.len() as u64 > cap {
            return Err(Error::TermCapExceeded { cap });
        }
        cursor.advance();
        // lookahead term magnitude for the geometric bound
        if k >= n_to && state.dominance_holds() {
            let w_next = cursor.current();
            if w_next.is_zero() {
                let idx = query.index(k + 1);
                return Err(Error::ZeroTerm { index: idx as u64 });
            }
            let t_next = Real::from_bigint(&w_next.pow(query.d), wp)
                .recip(wp)
                .abs();
            let r = state.remainder_bound(&t_next);
            if r.le(&eps_gate) {
                bound = r;
                break;
            }
        }
        state.advance();
        k += 1;
    }
    // Backward accumulation, emitting the partial sums at each row boundary.
    let mut out: Vec<TailValue> = Vec::with_capacity((n_to - n + 1) as usize);
    let mut acc = Real::zero(wp);
    let k_last = n + terms.len() as u64 - 1;
    for j in (0..terms.len()).rev() {
        acc = acc.add(&terms[j], wp);
        let row_n = n + j as u64;
        if row_n <= n_to {
            out.push(TailValue {
                value: acc.with_precision(p),
                truncation_bound: bound.with_precision(p),
                terms_used: k_last - row_n + 1,
                precision_bits: p,
            });
        }
    }
    out.reverse();
    Ok(out)
}

/// 1/T with the first-order propagated error bound b/(|v|-b)^2.
/// Requires |value| > 2 * truncation_bound.
pub fn inverse_tail(tail: &TailValue) -> Result<(Real, Real), Error> {
    let p = tail.precision_bits;
    let wp = p + GUARD_BITS;
    let v = tail.value.abs();
    let b = &tail.truncation_bound;
    let two_b = b.add(b, wp);
    if !v.gt(&two_b) {
        return Err(Error::BoundTooLarge);
    }
    let inv = tail.value.recip(p);
    let denom = v.sub(b, wp);
    let err = b.div(&denom.mul(&denom, wp), wp).with_precision(p);
    Ok((inv, err))
}

/// Standalone geometric remainder bound R(K) for the tail cut after index K.
/// Rejects K for which the dominance condition does not yet hold.
pub fn truncation_bound(
    ctx: &BinetContext,
    query: &SubseqQuery,
    k_cut: u64,
) -> Result<Real, Error> {
    if k_cut < query.n {
        return Err(Error::IndexOutOfRange(format!(
            "K={k_cut} below tail start n={}",
            query.n
        )));
    }
    let p = ctx.precision_bits;
    let wp = p + GUARD_BITS;
    let state = BoundState::new(ctx, query, k_cut + 1, wp);
    if !state.dominance_holds() {
        return Err(Error::DominanceNotReached { k: k_cut });
    }
    let w_next = crate::seq::subsequence_term(&ctx.params, query, k_cut + 1)?;
    if w_next.is_zero() {
        let idx = query.index(k_cut + 1);
        return Err(Error::ZeroTerm { index: idx as u64 });
    }
    let t_next = Real::from_bigint(&w_next.pow(query.d), wp).recip(wp).abs();
    Ok(state.remainder_bound(&t_next).with_precision(p))
}
