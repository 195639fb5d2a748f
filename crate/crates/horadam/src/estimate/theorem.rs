//! General series-expansion estimators for arbitrary power d.
//!
//! Both families share one shape, differing by a sign s (+1 plain,
//! -1 alternating): the main term is W_{mn+l}^d - s*W_{m(n-1)+l}^d, the
//! geometric factors are (alpha^{md} - s) and (alpha^{m(d+i)} - s*beta^{mi}),
//! and the alternating estimate carries an overall (-1)^n.

use num_bigint::BigInt;

use crate::binet::BinetContext;
use crate::error::Error;
use crate::params::SubseqQuery;
use crate::real::{Real, GUARD_BITS};
use crate::seq::term;

use super::{binomial, Correction, EstimateBreakdown};

/// Estimate of (sum_{k>=n} 1/W_{mk+l}^d)^{-1} up to O(beta^{d(mn+l)}).
pub fn theorem_estimate_plain(
    ctx: &BinetContext,
    query: &SubseqQuery,
    n: u64,
) -> Result<EstimateBreakdown, Error> {
    if query.alternating {
        return Err(Error::WrongFamily(
            "plain estimator called with an alternating query",
        ));
    }
    theorem_estimate(ctx, query, n, 1)
}

/// Estimate of (sum_{k>=n} (-1)^k/W_{mk+l}^d)^{-1} up to O(beta^{d(mn+l)}).
pub fn theorem_estimate_alternating(
    ctx: &BinetContext,
    query: &SubseqQuery,
    n: u64,
) -> Result<EstimateBreakdown, Error> {
    if !query.alternating {
        return Err(Error::WrongFamily(
            "alternating estimator called with a plain query",
        ));
    }
    theorem_estimate(ctx, query, n, -1)
}

pub(super) fn indices(query: &SubseqQuery, n: u64) -> Result<(u64, u64), Error> {
    if n < 1 {
        return Err(Error::IndexOutOfRange("estimate needs n >= 1".into()));
    }
    let n1 = query.index(n);
    let n0 = query.index(n - 1);
    if n0 < 0 {
        return Err(Error::IndexOutOfRange(format!(
            "m(n-1)+l = {n0} is negative"
        )));
    }
    Ok((n1 as u64, n0 as u64))
}

/// Exact main term (W_{mn+l}^d -+ W_{m(n-1)+l}^d), with the alternating sign
/// (-1)^n already applied; returned as (lifted real, sign of (-1)^n).
pub(super) fn exact_main(
    ctx: &BinetContext,
    query: &SubseqQuery,
    n: u64,
    s: i8,
    p: u32,
) -> Result<(Real, i8), Error> {
    let (n1, n0) = indices(query, n)?;
    let w1 = term(&ctx.params, n1).pow(query.d);
    let w0 = term(&ctx.params, n0).pow(query.d);
    let main_int: BigInt = if s == 1 { w1 - w0 } else { w1 + w0 };
    let sign_n: i8 = if s == -1 && n % 2 == 1 { -1 } else { 1 };
    let main = Real::from_bigint(&main_int, p);
    Ok((if sign_n == -1 { main.neg() } else { main }, sign_n))
}

fn theorem_estimate(
    ctx: &BinetContext,
    query: &SubseqQuery,
    n: u64,
    s: i8,
) -> Result<EstimateBreakdown, Error> {
    let p = ctx.precision_bits;
    let wp = p + GUARD_BITS;
    let d = query.d as u64;
    let (n1, n0) = indices(query, n)?;
    let (main, sign_n) = exact_main(ctx, query, n, s, p)?;
    let s_real = Real::from_i64(s as i64, wp);

    // power tables up to exponent d
    let pows = |base: &Real| -> Vec<Real> {
        let mut v = Vec::with_capacity(d as usize + 1);
        v.push(Real::one(wp));
        for i in 1..=d as usize {
            let next = v[i - 1].mul(base, wp);
            v.push(next);
        }
        v
    };
    let a1 = pows(&ctx.alpha.powi(n1, wp));
    let b1 = pows(&ctx.beta.powi(n1, wp));
    let a0 = pows(&ctx.alpha.powi(n0, wp));
    let b0 = pows(&ctx.beta.powi(n0, wp));
    let c1p = pows(&ctx.c1);
    let c2n = pows(&ctx.c2.neg());

    // cross = -sum_{i=1..d} C(d,i) c1^{d-i} (-c2)^i (A1^{d-i}B1^i - s*A0^{d-i}B0^i)
    let mut cross = Real::zero(wp);
    for i in 1..=d {
        let coeff = binomial(d, i, wp)
            .mul(&c1p[(d - i) as usize], wp)
            .mul(&c2n[i as usize], wp);
        let x1 = a1[(d - i) as usize].mul(&b1[i as usize], wp);
        let x0 = a0[(d - i) as usize].mul(&b0[i as usize], wp);
        let diff = x1.sub(&s_real.mul(&x0, wp), wp);
        cross = cross.sub(&coeff.mul(&diff, wp), wp);
    }

    // series correction: empty for d = 1
    let series = if d >= 2 {
        let am = ctx.alpha.powi(query.m as u64, wp);
        let bm = ctx.beta.powi(query.m as u64, wp);
        let amd = am.powi(d, wp);
        let factor = amd.sub(&s_real, wp); // alpha^{md} - s
        let am_p = pows(&am);
        let bm_p = pows(&bm);
        let c2p = pows(&ctx.c2);
        let mut inner = Real::zero(wp);
        for i in 1..=d - 1 {
            let iu = i as usize;
            let num = c2p[iu]
                .mul(&b1[iu], wp)
                .mul(&am_p[iu], wp)
                .mul(&factor, wp);
            let den_geom = amd.mul(&am_p[iu], wp).sub(&s_real.mul(&bm_p[iu], wp), wp);
            let den = c1p[iu].mul(&a1[iu], wp).mul(&den_geom, wp);
            let coeff = binomial(d - 1 + i, d - 1, wp);
            inner = inner.add(&coeff.mul(&num.div(&den, wp), wp), wp);
        }
        let prefactor = c1p[d as usize]
            .mul(&a1[d as usize], wp)
            .mul(&factor, wp)
            .div(&amd, wp);
        // sum_{j=1..d-1} (-1)^j inner^j
        let mut acc = Real::zero(wp);
        let mut pow_j = Real::one(wp);
        for j in 1..=d - 1 {
            pow_j = pow_j.mul(&inner, wp);
            if j % 2 == 1 {
                acc = acc.sub(&pow_j, wp);
            } else {
                acc = acc.add(&pow_j, wp);
            }
        }
        Some(prefactor.mul(&acc, wp))
    } else {
        None
    };

    let apply_sign = |x: Real| if sign_n == -1 { x.neg() } else { x };
    let cross = apply_sign(cross).with_precision(p);
    let mut corrections = vec![Correction { name: "binet_cross_terms", value: cross.clone() }];
    let mut total = main.add(&cross, p);
    if let Some(sc) = series {
        let sc = apply_sign(sc).with_precision(p);
        total = total.add(&sc, p);
        corrections.push(Correction { name: "series_correction", value: sc });
    }
    let dropped_scale = ctx.beta.abs().powi(d * n1, p);
    Ok(EstimateBreakdown {
        main,
        corrections,
        total,
        dropped_scale,
        variant: "general".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binet::build_context;
    use crate::params::Preset;

    fn fib_ctx(p: u32) -> BinetContext {
        build_context(&Preset::Fibonacci.params(), p).unwrap()
    }

    #[test]
    fn d1_plain_has_no_series_correction() {
        let ctx = fib_ctx(256);
        let q = SubseqQuery::new(1, 0, 1, 1, false).unwrap();
        let b = theorem_estimate_plain(&ctx, &q, 12).unwrap();
        assert_eq!(b.corrections.len(), 1);
        assert_eq!(b.corrections[0].name, "binet_cross_terms");
        assert_eq!(b.main, Real::from_i64(55, 256));
        // frozen oracle: 55 + c2*(beta^12 - beta^11) = 55.0036361232474...
        let expect = Real::from_decimal_str("55.0036361232474132658328361254", 256).unwrap();
        assert!(b.total.sub(&expect, 256).abs().le(&Real::pow2(-80, 64)));
    }

    #[test]
    fn alternating_sign_and_main() {
        let ctx = fib_ctx(256);
        let q = SubseqQuery::new(1, 0, 1, 1, true).unwrap();
        let b10 = theorem_estimate_alternating(&ctx, &q, 10).unwrap();
        assert!(b10.total.is_positive());
        assert_eq!(b10.main, Real::from_i64(89, 256));
        let b11 = theorem_estimate_alternating(&ctx, &q, 11).unwrap();
        assert!(b11.total.is_negative());
        // d=1 collapse for the alternating family too
        assert_eq!(b11.corrections.len(), 1);
    }

    #[test]
    fn alternating_sign_structure() {
        // whenever |main| > sum of |corrections|, sign(total) = (-1)^n
        for preset in [Preset::Fibonacci, Preset::Lucas, Preset::Pell] {
            let ctx = build_context(&preset.params(), 192).unwrap();
            for d in 1..=4u32 {
                let q = SubseqQuery::new(2, -1, d, 1, true).unwrap();
                for n in 4..=12u64 {
                    let b = theorem_estimate_alternating(&ctx, &q, n).unwrap();
                    let mut corr_sum = Real::zero(192);
                    for c in &b.corrections {
                        corr_sum = corr_sum.add(&c.value.abs(), 192);
                    }
                    if b.main.abs().gt(&corr_sum) {
                        assert_eq!(b.total.is_positive(), n % 2 == 0, "{preset:?} d={d} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn family_mismatch_rejected() {
        let ctx = fib_ctx(128);
        let q_alt = SubseqQuery::new(1, 0, 1, 1, true).unwrap();
        let q_plain = SubseqQuery::new(1, 0, 1, 1, false).unwrap();
        assert!(theorem_estimate_plain(&ctx, &q_alt, 5).is_err());
        assert!(theorem_estimate_alternating(&ctx, &q_plain, 5).is_err());
    }

    #[test]
    fn negative_previous_index_rejected() {
        let ctx = fib_ctx(128);
        let q = SubseqQuery::new(3, -2, 1, 1, false).unwrap();
        // n = 1: m(n-1)+l = -2
        assert!(theorem_estimate_plain(&ctx, &q, 1).is_err());
        assert!(theorem_estimate_plain(&ctx, &q, 2).is_ok());
    }

    #[test]
    fn total_is_main_plus_corrections() {
        let ctx = fib_ctx(192);
        for d in 1..=5u32 {
            for alt in [false, true] {
                let q = SubseqQuery::new(2, 1, d, 1, alt).unwrap();
                let b = if alt {
                    theorem_estimate_alternating(&ctx, &q, 7).unwrap()
                } else {
                    theorem_estimate_plain(&ctx, &q, 7).unwrap()
                };
                let mut sum = b.main.clone();
                for c in &b.corrections {
                    sum = sum.add(&c.value, 192);
                }
                let tol = Real::pow2(-(192i64 - 16), 64).mul(&b.total.abs(), 192);
                assert!(b.total.sub(&sum, 192).abs().le(&tol));
            }
        }
    }

    #[test]
    fn approaches_inverse_tail() {
        // theorem total converges to the measured inverse tail (d=2)
        let ctx = fib_ctx(256);
        let q = SubseqQuery::new(1, 0, 2, 1, false).unwrap();
        let eps = Real::from_decimal_str("1e-40", 256).unwrap();
        let mut prev: Option<Real> = None;
        for n in [8u64, 12, 16] {
            let t = crate::tail::tail_sum(
                &ctx.params,
                &q.with_start(n),
                &eps,
                256,
            )
            .unwrap();
            let (inv, _) = crate::tail::inverse_tail(&t).unwrap();
            let b = theorem_estimate_plain(&ctx, &q, n).unwrap();
            let err = inv.sub(&b.total, 256).abs();
            if let Some(pe) = prev.take() {
                assert!(err.lt(&pe));
            }
            prev = Some(err);
        }
        // terminal error is at the beta^(2n) dropped-order scale
        assert!(prev.unwrap().le(&Real::from_decimal_str("1e-5", 128).unwrap()));
    }
}
