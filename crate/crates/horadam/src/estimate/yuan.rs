//! Specialization constants for W(0,1,A,B) with |B| = 1, where B denotes the
//! root product alpha*beta = -q, and the estimate forms built from them.
//!
//! These are evaluated exactly as displayed, independently of the
//! named-constant estimators, so cross-checking the two paths is meaningful.

use num_bigint::BigInt;

use crate::binet::BinetContext;
use crate::error::Error;
use crate::real::{Real, GUARD_BITS};
use crate::seq::term;

/// The four specialization constants for a given stride m.
#[derive(Clone, Debug)]
pub struct YuanConstants {
    pub c_m: Real,
    pub q_m: Real,
    pub u_m: Real,
    pub v_m: Real,
}

fn b_of(ctx: &BinetContext) -> Result<i64, Error> {
    let p = ctx.params;
    if p.a != 0 || p.b != 1 || p.q.abs() != 1 {
        return Err(Error::SpecializationRequired(format!(
            "specialization constants need a=0, b=1, |q|=1; got {}",
            p
        )));
    }
    Ok(-p.q) // B = alpha*beta
}

/// B^e for B = +-1.
fn b_pow(b: i64, e: u64) -> i64 {
    if b == 1 || e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn yuan_constants(ctx: &BinetContext, m: u32) -> Result<YuanConstants, Error> {
    if m < 1 {
        return Err(Error::InvalidQuery("stride m must be >= 1".into()));
    }
    let b = b_of(ctx)?;
    let p = ctx.precision_bits;
    let wp = p + GUARD_BITS;
    let m = m as u64;
    let alpha = &ctx.alpha;
    let beta = &ctx.beta;
    let sd2 = ctx.sqrt_disc.mul(&ctx.sqrt_disc, wp);
    let one = Real::one(wp);
    let two = Real::from_i64(2, wp);
    let bm = Real::from_i64(b_pow(b, m), wp);
    let wm = Real::from_bigint(&term(&ctx.params, m), wp);
    let wm2 = wm.mul(&wm, wp);

    let a2m = alpha.powi(2 * m, wp);
    let a4m = alpha.powi(4 * m, wp);
    let a5m = alpha.powi(5 * m, wp);
    let a6m = alpha.powi(6 * m, wp);
    let a8m = alpha.powi(8 * m, wp);
    let b5m = beta.powi(5 * m, wp);
    let b6m = beta.powi(6 * m, wp);

    // C_m = 2(1-B^m)/(a-b)^2 - 2(a^{2m}-1)^2 / ((a-b)^2 (a^{4m}-B^m))
    let t1 = two.mul(&one.sub(&bm, wp), wp).div(&sd2, wp);
    let sq = a2m.sub(&one, wp).powi(2, wp);
    let t2 = two
        .mul(&sq, wp)
        .div(&sd2.mul(&a4m.sub(&bm, wp), wp), wp);
    let c_m = t1.sub(&t2, wp);

    // Q_m = W_m^2 / ((1-(Ba)^{5m})(1-(Bb)^{5m})); (B x)^{5m} = B^m * x^{5m}
    let b5 = Real::from_i64(b_pow(b, 5 * m), wp);
    let q_den = one
        .sub(&b5.mul(&a5m, wp), wp)
        .mul(&one.sub(&b5.mul(&b5m, wp), wp), wp);
    let q_m = wm2.div(&q_den, wp);

    // U_m = W_m^2 / ((1-B^m a^{6m})(1-B^m b^{6m}))
    let u_den = one
        .sub(&bm.mul(&a6m, wp), wp)
        .mul(&one.sub(&bm.mul(&b6m, wp), wp), wp);
    let u_m = wm2.div(&u_den, wp);

    // V_m = (a^{4m}-1)^2/(a-b)^4 * (16(a^{4m}-1)/(a^{6m}-B^m)^2 - 10/(a^{8m}-1))
    let a4m1 = a4m.sub(&one, wp);
    let lead = a4m1.powi(2, wp).div(&sd2.mul(&sd2, wp), wp);
    let v1 = Real::from_i64(16, wp)
        .mul(&a4m1, wp)
        .div(&a6m.sub(&bm, wp).powi(2, wp), wp);
    let v2 = Real::from_i64(10, wp).div(&a8m.sub(&one, wp), wp);
    let v_m = lead.mul(&v1.sub(&v2, wp), wp);

    Ok(YuanConstants {
        c_m: c_m.with_precision(p),
        q_m: q_m.with_precision(p),
        u_m: u_m.with_precision(p),
        v_m: v_m.with_precision(p),
    })
}

/// The specialization estimate for (sum 1/W_{mk}^d)^{-1}, d in 1..=4:
/// exact W powers plus the displayed constant terms.
pub fn yuan_estimate(ctx: &BinetContext, m: u32, d: u32, n: u64) -> Result<Real, Error> {
    let b = b_of(ctx)?;
    if !(1..=4).contains(&d) {
        return Err(Error::UnsupportedDegree { d });
    }
    let need = match d {
        3 => 3,
        _ => 1,
    };
    if n < need {
        return Err(Error::IndexOutOfRange(format!(
            "specialization estimate for d={d} needs n >= {need}"
        )));
    }
    let p = ctx.precision_bits;
    let wp = p + GUARD_BITS;
    let m64 = m as u64;
    let w = |e: u64| -> BigInt { term(&ctx.params, e) };
    let wn = w(m64 * n);
    let wn1 = w(m64 * (n - 1));
    let main: BigInt = wn.pow(d) - wn1.pow(d);
    let main = Real::from_bigint(&main, wp);
    let bmn = Real::from_i64(b_pow(b, m64 * n), wp);
    let consts = yuan_constants(ctx, m)?;

    let total = match d {
        1 => main,
        2 => main.add(&bmn.mul(&consts.c_m, wp), wp),
        3 => {
            let gap: BigInt = w(m64 * (n + 2)) - w(m64 * (n - 3));
            let corr = Real::from_i64(3, wp)
                .mul(&bmn, wp)
                .mul(&consts.q_m, wp)
                .mul(&Real::from_bigint(&gap, wp), wp);
            main.add(&corr, wp)
        }
        4 => {
            let w1 = Real::from_bigint(&w(m64 * (n + 1)).pow(2), wp);
            let w2 = Real::from_bigint(&w(m64 * (n - 2)).pow(2), wp);
            let bm = Real::from_i64(b_pow(b, m64), wp);
            let corr = Real::from_i64(4, wp)
                .mul(&bmn, wp)
                .mul(&consts.u_m, wp)
                .mul(&w1.sub(&bm.mul(&w2, wp), wp), wp);
            main.add(&corr, wp).add(&consts.v_m, wp)
        }
        _ => unreachable!(),
    };
    Ok(total.with_precision(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binet::build_context;
    use crate::params::{Preset, SequenceParams};

    #[test]
    fn rejects_outside_specialization() {
        let ctx = build_context(&SequenceParams::new(1, 1, 1, 1), 128).unwrap();
        assert!(matches!(
            yuan_constants(&ctx, 1),
            Err(Error::SpecializationRequired(_))
        ));
        let ctx2 = build_context(&SequenceParams::new(0, 1, 3, 2), 128).unwrap();
        assert!(yuan_constants(&ctx2, 1).is_err());
    }

    #[test]
    fn fibonacci_c1_is_two_thirds() {
        // for A=1, B=-1: C_1 = 2/3, and B^n*C_1 alternates like the known
        // quadratic correction
        let ctx = build_context(&Preset::Fibonacci.params(), 256).unwrap();
        let c = yuan_constants(&ctx, 1).unwrap();
        let two_thirds = Real::from_i64(2, 256).div(&Real::from_i64(3, 256), 256);
        let diff = c.c_m.sub(&two_thirds, 256).abs();
        assert!(diff.le(&Real::pow2(-224, 64)), "C_1 = {}", c.c_m);
    }

    #[test]
    fn fibonacci_v1_matches_quartic_constant() {
        // V_1 = 2*sqrt(5)/75
        let p = 256;
        let ctx = build_context(&Preset::Fibonacci.params(), p).unwrap();
        let c = yuan_constants(&ctx, 1).unwrap();
        let expect = Real::from_i64(2, p)
            .mul(&Real::from_i64(5, p).sqrt(p), p)
            .div(&Real::from_i64(75, p), p);
        let diff = c.v_m.sub(&expect, p).abs();
        assert!(diff.le(&Real::pow2(-224, 64)), "V_1 = {}", c.v_m);
    }

    #[test]
    fn constants_finite_for_both_signs_of_b() {
        // q = -1 (B = +1) requires p >= 3
        let ctx = build_context(&SequenceParams::new(0, 1, 3, -1), 192).unwrap();
        for m in 1..=3u32 {
            let c = yuan_constants(&ctx, m).unwrap();
            for v in [&c.c_m, &c.q_m, &c.u_m, &c.v_m] {
                assert!(!v.to_decimal_default().is_empty());
            }
            // B = 1 kills the first term of C_m
            let first = Real::zero(192);
            let _ = first;
        }
    }

    #[test]
    fn estimate_needs_enough_start_index() {
        let ctx = build_context(&Preset::Fibonacci.params(), 128).unwrap();
        assert!(yuan_estimate(&ctx, 1, 3, 2).is_err());
        assert!(yuan_estimate(&ctx, 1, 3, 3).is_ok());
        assert!(yuan_estimate(&ctx, 1, 1, 1).is_ok());
    }

    #[test]
    fn d1_equals_term_difference() {
        let ctx = build_context(&Preset::Pell.params(), 128).unwrap();
        let e = yuan_estimate(&ctx, 2, 1, 5).unwrap();
        let w10 = term(&ctx.params, 10);
        let w8 = term(&ctx.params, 8);
        assert_eq!(e, Real::from_bigint(&(w10 - w8), 128));
    }
}
