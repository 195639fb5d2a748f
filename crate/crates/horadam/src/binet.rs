//! High-precision Binet data: the characteristic roots and coefficients of
//! W_n = c1*alpha^n - c2*beta^n.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::error::Error;
use crate::params::SequenceParams;
use crate::real::{decimal_digits_for, Real, GUARD_BITS};
use crate::seq::term;
use crate::validate::validate;

/// Minimum accepted working precision in bits.
pub const MIN_PRECISION_BITS: u32 = 64;

/// alpha, beta = (p +- sqrt(p^2+4q))/2 and c1, c2 = (b - a*beta|alpha)/(alpha-beta),
/// all rounded to `precision_bits`. Only constructible from parameters that
/// pass validation, so alpha > 1 and |beta| < 1 hold.
#[derive(Clone, Debug)]
pub struct BinetContext {
    pub params: SequenceParams,
    pub precision_bits: u32,
    pub alpha: Real,
    pub beta: Real,
    pub c1: Real,
    pub c2: Real,
    /// alpha - beta = sqrt(p^2+4q), kept because the specialization constants
    /// use it directly.
    pub sqrt_disc: Real,
}

/// Validates `params` and computes the Binet data. The square root and the
/// divisions run at internal precision P+32 and are rounded once to P.
pub fn build_context(params: &SequenceParams, precision_bits: u32) -> Result<BinetContext, Error> {
    if precision_bits < MIN_PRECISION_BITS {
        return Err(Error::PrecisionTooLow {
            requested: precision_bits,
            min: MIN_PRECISION_BITS,
        });
    }
    let report = validate(params);
    if !report.ok {
        return Err(Error::Validation(report));
    }
    let p = precision_bits;
    let wp = p + GUARD_BITS;
    let disc = BigInt::from(params.p) * params.p + BigInt::from(4) * params.q;
    let sqrt_disc = Real::from_bigint(&disc, wp).sqrt(wp);
    let two = Real::from_i64(2, wp);
    let pr = Real::from_i64(params.p, wp);
    let ar = Real::from_i64(params.a, wp);
    let br = Real::from_i64(params.b, wp);
    let alpha = pr.add(&sqrt_disc, wp).div(&two, wp);
    let beta = pr.sub(&sqrt_disc, wp).div(&two, wp);
    let c1 = br.sub(&ar.mul(&beta, wp), wp).div(&sqrt_disc, wp);
    let c2 = br.sub(&ar.mul(&alpha, wp), wp).div(&sqrt_disc, wp);
    Ok(BinetContext {
        params: *params,
        precision_bits,
        alpha: alpha.with_precision(p),
        beta: beta.with_precision(p),
        c1: c1.with_precision(p),
        c2: c2.with_precision(p),
        sqrt_disc: sqrt_disc.with_precision(p),
    })
}

/// c1*alpha^n - c2*beta^n at the context precision.
pub fn binet_eval(ctx: &BinetContext, n: u64) -> Real {
    let p = ctx.precision_bits;
    let wp = p + GUARD_BITS;
    let an = ctx.alpha.powi(n, wp);
    let bn = ctx.beta.powi(n, wp);
    ctx.c1
        .mul(&an, wp)
        .sub(&ctx.c2.mul(&bn, wp), wp)
        .with_precision(p)
}

/// |binet_eval(n) - W_n| / |W_n|; rejects W_n = 0.
pub fn binet_residual(
    ctx: &BinetContext,
    params: &SequenceParams,
    n: u64,
) -> Result<Real, Error> {
    let exact = term(params, n);
    if exact.is_zero() {
        return Err(Error::ZeroTerm { index: n });
    }
    let p = ctx.precision_bits;
    let wp = p + GUARD_BITS;
    let exact_r = Real::from_bigint(&exact, wp);
    let approx = binet_eval(ctx, n);
    Ok(approx
        .sub(&exact_r, wp)
        .abs()
        .div(&exact_r.abs(), wp)
        .with_precision(p))
}

impl Serialize for BinetContext {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let digits = decimal_digits_for(self.precision_bits);
        let tag = |r: &Real| TaggedReal {
            dec: r.to_decimal_string(digits),
            precision_bits: self.precision_bits,
        };
        let mut st = s.serialize_struct("BinetContext", 7)?;
        st.serialize_field("params", &self.params)?;
        st.serialize_field("precision_bits", &self.precision_bits)?;
        st.serialize_field("alpha", &tag(&self.alpha))?;
        st.serialize_field("beta", &tag(&self.beta))?;
        st.serialize_field("c1", &tag(&self.c1))?;
        st.serialize_field("c2", &tag(&self.c2))?;
        st.serialize_field("sqrt_disc", &tag(&self.sqrt_disc))?;
        st.end()
    }
}

#[derive(Serialize)]
struct TaggedReal {
    dec: String,
    precision_bits: u32,
}
