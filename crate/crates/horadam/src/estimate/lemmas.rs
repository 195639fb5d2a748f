//! Truncated reciprocal expansions: the scalar forms 1/(1+x) and 1/(1-x)^d,
//! and the Binet-based expansion of 1/W_{mk+l}^d.

use crate::binet::BinetContext;
use crate::error::Error;
use crate::params::SubseqQuery;
use crate::real::{Real, GUARD_BITS};
use crate::seq::subsequence_term;

use super::binomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpansionKind {
    /// 1/(1+x) = 1 + sum_{i=1}^{d-1} (-1)^i x^i + O(x^d)
    InvOnePlus,
    /// 1/(1-x)^d = 1 + sum_{i=1}^{d-1} C(d-1+i, d-1) x^i + O(x^d)
    InvOneMinusPowD,
}

/// Returns (truncated value, |exact - value|) at the precision of `x`.
pub fn reciprocal_expansion(
    x: &Real,
    d: u32,
    kind: ExpansionKind,
    precision_bits: u32,
) -> Result<(Real, Real), Error> {
    let p = precision_bits;
    let wp = p + GUARD_BITS;
    if !x.abs().lt(&Real::one(wp)) {
        return Err(Error::DomainViolation("expansion needs |x| < 1".into()));
    }
    if d < 1 {
        return Err(Error::DomainViolation("expansion needs d >= 1".into()));
    }
    let one = Real::one(wp);
    let mut value = one.clone();
    let mut xp = one.clone();
    for i in 1..=(d as u64 - 1) {
        xp = xp.mul(x, wp);
        match kind {
            ExpansionKind::InvOnePlus => {
                if i % 2 == 1 {
                    value = value.sub(&xp, wp);
                } else {
                    value = value.add(&xp, wp);
                }
            }
            ExpansionKind::InvOneMinusPowD => {
                let c = binomial(d as u64 - 1 + i, d as u64 - 1, wp);
                value = value.add(&c.mul(&xp, wp), wp);
            }
        }
    }
    let exact = match kind {
        ExpansionKind::InvOnePlus => one.add(x, wp).recip(wp),
        ExpansionKind::InvOneMinusPowD => one.sub(x, wp).powi(d as u64, wp).recip(wp),
    };
    let remainder = exact.sub(&value, wp).abs();
    Ok((value.with_precision(p), remainder.with_precision(p)))
}

/// Expansion of 1/W_{mk+l}^d through order d-1 in (c2/c1)(beta/alpha)^{mk+l}:
/// returns (approx, error_scale) with error_scale = |beta|^{dN} / alpha^{2dN}.
pub fn binet_reciprocal_expansion(
    ctx: &BinetContext,
    query: &SubseqQuery,
    k: u64,
) -> Result<(Real, Real), Error> {
    let w = subsequence_term(&ctx.params, query, k)?;
    if num_traits::Zero::is_zero(&w) {
        let idx = query.index(k);
        return Err(Error::ZeroTerm { index: idx as u64 });
    }
    let p = ctx.precision_bits;
    let wp = p + GUARD_BITS;
    let d = query.d as u64;
    let n_idx = query.index(k) as u64;
    let alpha_n = ctx.alpha.powi(n_idx, wp);
    let beta_n = ctx.beta.powi(n_idx, wp);
    let ratio = ctx.c2.div(&ctx.c1, wp); // (c2/c1)
    let mut sum = alpha_n.powi(d, wp).recip(wp);
    let mut ratio_i = Real::one(wp);
    let mut beta_i = Real::one(wp);
    for i in 1..=d.saturating_sub(1) {
        ratio_i = ratio_i.mul(&ratio, wp);
        beta_i = beta_i.mul(&beta_n, wp);
        let c = binomial(d - 1 + i, d - 1, wp);
        let den = alpha_n.powi(d + i, wp);
        sum = sum.add(&c.mul(&ratio_i, wp).mul(&beta_i.div(&den, wp), wp), wp);
    }
    let approx = sum.div(&ctx.c1.powi(d, wp), wp);
    let scale = ctx
        .beta
        .abs()
        .powi(d * n_idx, wp)
        .div(&ctx.alpha.powi(2 * d * n_idx, wp), wp);
    Ok((approx.with_precision(p), scale.with_precision(p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binet::build_context;
    use crate::params::Preset;

    fn dec(s: &str, p: u32) -> Real {
        Real::from_decimal_str(s, p).unwrap()
    }

    #[test]
    fn zero_input_is_exact() {
        for kind in [ExpansionKind::InvOnePlus, ExpansionKind::InvOneMinusPowD] {
            for d in 1..=5 {
                let (v, r) = reciprocal_expansion(&Real::zero(128), d, kind, 128).unwrap();
                assert_eq!(v, Real::one(128));
                assert!(r.is_zero());
            }
        }
    }

    #[test]
    fn hand_computed_values() {
        // x = 0.5, d = 2, 1/(1-x)^d: value = 1 + 2*0.5 = 2, exact = 4
        let (v, r) =
            reciprocal_expansion(&dec("0.5", 128), 2, ExpansionKind::InvOneMinusPowD, 128)
                .unwrap();
        assert_eq!(v, Real::from_i64(2, 128));
        assert_eq!(r, Real::from_i64(2, 128));

        // x = 0.1, d = 3, 1/(1+x): value = 0.91, remainder ~ 9.0909e-4
        let (v, r) =
            reciprocal_expansion(&dec("0.1", 192), 3, ExpansionKind::InvOnePlus, 192).unwrap();
        assert!(v.sub(&dec("0.91", 192), 192).abs().le(&Real::pow2(-160, 64)));
        let expect = dec("0.000909090909090909090909", 192);
        assert!(r.sub(&expect, 192).abs().le(&dec("1e-15", 64)));
        // bounded by C*|x|^3 with C = 1.2
        assert!(r.le(&dec("0.0012", 64)));
    }

    #[test]
    fn domain_rejected() {
        assert!(reciprocal_expansion(&Real::one(64), 2, ExpansionKind::InvOnePlus, 64).is_err());
        assert!(
            reciprocal_expansion(&dec("-1.5", 64), 2, ExpansionKind::InvOnePlus, 64).is_err()
        );
    }

    #[test]
    fn explicit_pointwise_remainder_bound() {
        // remainder <= d*2^(d+2)/(1-|x|)^(d+1) * |x|^d on |x| <= 0.9
        for d in 1..=6u32 {
            for j in 0..=18 {
                let x = dec(&format!("{}", (j as f64 - 9.0) / 10.0), 192);
                for kind in [ExpansionKind::InvOnePlus, ExpansionKind::InvOneMinusPowD] {
                    let (_, r) = reciprocal_expansion(&x, d, kind, 192).unwrap();
                    let ax = x.abs();
                    let one = Real::one(192);
                    let c = Real::from_i64(d as i64, 192)
                        .mul(&Real::pow2(d as i64 + 2, 192), 192)
                        .div(&one.sub(&ax, 192).powi(d as u64 + 1, 192), 192);
                    let bound = c.mul(&ax.powi(d as u64, 192), 192);
                    assert!(
                        r.le(&bound),
                        "d={d} x={} kind={kind:?}: {r} > {bound}",
                        x.to_decimal_string(3)
                    );
                }
            }
        }
    }

    #[test]
    fn binet_reciprocal_close_to_exact() {
        let ctx = build_context(&Preset::Fibonacci.params(), 192).unwrap();
        let q = SubseqQuery::new(1, 0, 1, 1, false).unwrap();
        let (approx, _) = binet_reciprocal_expansion(&ctx, &q, 15).unwrap();
        // 1/F_15 = 1/610
        let exact = Real::from_i64(610, 192).recip(192);
        let diff = approx.sub(&exact, 192).abs();
        assert!(diff.le(&dec("1e-6", 64)), "diff={diff}");
        // d = 1: approx = 1/(c1*alpha^(mk+l))
        let direct = ctx.c1.mul(&ctx.alpha.powi(15, 192), 192).recip(192);
        assert!(approx.sub(&direct, 192).abs().le(&dec("1e-40", 64)));
    }

    #[test]
    fn error_ordering_on_grid() {
        // |approx - 1/W^d| <= K_d * error_scale for k in [5,40], d in 1..=4,
        // where K_d = 2*C(2d-1,d-1)*|c2|^d/|c1|^(2d) is twice the leading
        // coefficient of the first dropped order (the scale itself carries no
        // constants, so a flat allowance cannot work across d).
        let ctx = build_context(&Preset::Fibonacci.params(), 256).unwrap();
        for d in 1..=4u32 {
            let q = SubseqQuery::new(1, 0, d, 1, false).unwrap();
            let kd = Real::from_i64(2, 256)
                .mul(&super::binomial(2 * d as u64 - 1, d as u64 - 1, 256), 256)
                .mul(&ctx.c2.abs().powi(d as u64, 256), 256)
                .div(&ctx.c1.abs().powi(2 * d as u64, 256), 256);
            for k in 5..=40u64 {
                let (approx, scale) = binet_reciprocal_expansion(&ctx, &q, k).unwrap();
                let w = crate::seq::subsequence_term(&ctx.params, &q, k).unwrap();
                let exact = Real::from_bigint(&w.pow(d), 256).recip(256);
                let err = approx.sub(&exact, 256).abs();
                let allowance = kd.mul(&scale, 256);
                assert!(err.le(&allowance), "d={d} k={k}: {err} > {allowance}");
            }
        }
    }
}
