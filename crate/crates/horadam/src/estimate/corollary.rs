//! Named-constant estimators for d = 1..4.
//!
//! Each constant splits into a cross part coming from the binomial expansion
//! of W^d (computed as a difference of two sign-aware powers, so q = 0 and
//! negative bases cost nothing) and a series part coming from the geometric
//! resummation. The two families again share one shape through the sign s.
//!
//! Correction names: plain B (d=2), C,D (d=3), E,F,G (d=4); alternating
//! H (d=2), I,J (d=3), L,M,N (d=4).

use crate::binet::BinetContext;
use crate::error::Error;
use crate::params::SubseqQuery;
use crate::real::{Real, GUARD_BITS};

use super::theorem::{exact_main, indices};
use super::{signed_pow, C1SqForm, CForm, Correction, EstimateBreakdown, PrintedOr, VariantSet};

pub fn corollary_estimate_plain(
    ctx: &BinetContext,
    query: &SubseqQuery,
    n: u64,
    variants: &VariantSet,
) -> Result<EstimateBreakdown, Error> {
    if query.alternating {
        return Err(Error::WrongFamily(
            "plain estimator called with an alternating query",
        ));
    }
    corollary_estimate(ctx, query, n, 1, variants)
}

pub fn corollary_estimate_alternating(
    ctx: &BinetContext,
    query: &SubseqQuery,
    n: u64,
    variants: &VariantSet,
) -> Result<EstimateBreakdown, Error> {
    if !query.alternating {
        return Err(Error::WrongFamily(
            "alternating estimator called with a plain query",
        ));
    }
    corollary_estimate(ctx, query, n, -1, variants)
}

struct Ambient {
    s: Real,
    /// alpha^{m*i} for i = 0..=7
    am: Vec<Real>,
    /// beta^{m*i} for i = 0..=3
    bm: Vec<Real>,
    /// alpha^{dm} - s
    factor: Real,
    n1: u64,
    n0: u64,
    wp: u32,
}

impl Ambient {
    /// alpha^{jm} - s*beta^{im}
    fn geom(&self, j: usize, i: usize) -> Real {
        self.am[j].sub(&self.s.mul(&self.bm[i], self.wp), self.wp)
    }

    /// factor^e = (alpha^{dm} - s)^e
    fn factor_pow(&self, e: u64) -> Real {
        self.factor.powi(e, self.wp)
    }

    /// base^{N1} - s*base^{N0}, sign-aware powers.
    fn cross_pair(&self, base: &Real) -> Real {
        let p1 = signed_pow(base, self.n1, self.wp);
        let p0 = signed_pow(base, self.n0, self.wp);
        p1.sub(&self.s.mul(&p0, self.wp), self.wp)
    }
}

fn corollary_estimate(
    ctx: &BinetContext,
    query: &SubseqQuery,
    n: u64,
    s: i8,
    variants: &VariantSet,
) -> Result<EstimateBreakdown, Error> {
    let d = query.d;
    if !(1..=4).contains(&d) {
        return Err(Error::UnsupportedDegree { d });
    }
    let p = ctx.precision_bits;
    let wp = p + GUARD_BITS;
    let (n1, n0) = indices(query, n)?;
    let (main, sign_n) = exact_main(ctx, query, n, s, p)?;

    let am1 = ctx.alpha.powi(query.m as u64, wp);
    let bm1 = ctx.beta.powi(query.m as u64, wp);
    let mut am = vec![Real::one(wp)];
    for _ in 1..=7 {
        let next = am.last().unwrap().mul(&am1, wp);
        am.push(next);
    }
    let mut bm = vec![Real::one(wp)];
    for _ in 1..=3 {
        let next = bm.last().unwrap().mul(&bm1, wp);
        bm.push(next);
    }
    let amb = Ambient {
        s: Real::from_i64(s as i64, wp),
        am,
        bm,
        factor: ctx.alpha.powi(d as u64 * query.m as u64, wp)
            .sub(&Real::from_i64(s as i64, wp), wp),
        n1,
        n0,
        wp,
    };

    let c1 = &ctx.c1;
    let c2 = &ctx.c2;
    let neg_q = Real::from_i64(-ctx.params.q, wp);
    let alpha = &ctx.alpha;
    let beta = &ctx.beta;

    let mut corrections: Vec<Correction> = Vec::new();
    let mut push = |name: &'static str, value: Real| {
        let value = if sign_n == -1 { value.neg() } else { value };
        corrections.push(Correction { name, value: value.with_precision(p) });
    };

    match d {
        1 => {}
        2 => {
            // 2*c1*c2*[ (b^N1 - s*b^N0) - b^N1 * (a^{2m}-s)^2/(a^m(a^{3m}-s*b^m)) ]
            // with b = alpha*beta = -q; the printed alternating variant has
            // (-q)^{+m}, i.e. b^{N1+m} in place of b^{N0}.
            let coeff = Real::from_i64(2, wp).mul(&c1.mul(c2, wp), wp);
            let cross = if s == -1 && variants.h_form == PrintedOr::Printed {
                let p1 = signed_pow(&neg_q, n1, wp);
                let pm = signed_pow(&neg_q, n1 + query.m as u64, wp);
                p1.add(&pm, wp)
            } else {
                amb.cross_pair(&neg_q)
            };
            let frac = amb
                .factor_pow(2)
                .div(&amb.am[1].mul(&amb.geom(3, 1), wp), wp);
            let series = signed_pow(&neg_q, n1, wp).mul(&frac, wp);
            let name = if s == 1 { "B" } else { "H" };
            push(name, coeff.mul(&cross.sub(&series, wp), wp));
        }
        3 => {
            // first order: 3*c1^2*c2, base alpha^2*beta = -alpha*q
            let base1 = alpha.mul(&neg_q, wp);
            let coeff1 = Real::from_i64(3, wp)
                .mul(&c1.mul(c1, wp), wp)
                .mul(c2, wp);
            let denom_c = match (s, variants.c_form) {
                (1, CForm::Proof) => amb.am[1].mul(&amb.geom(4, 1).powi(2, wp), wp),
                _ => amb.am[2].mul(&amb.geom(4, 1), wp),
            };
            let series1 = signed_pow(&base1, n1, wp)
                .mul(&amb.factor_pow(2), wp)
                .div(&denom_c, wp);
            push(
                if s == 1 { "C" } else { "I" },
                coeff1.mul(&amb.cross_pair(&base1).sub(&series1, wp), wp),
            );

            // second order: 3*c1*c2^2, base alpha*beta^2 = -beta*q
            let base2 = beta.mul(&neg_q, wp);
            let coeff2 = Real::from_i64(3, wp)
                .mul(c1, wp)
                .mul(&c2.mul(c2, wp), wp);
            let dj_form = if s == 1 { variants.d_form } else { variants.j_form };
            let beta_exp = match dj_form {
                PrintedOr::Expansion => 2, // alpha^{5m} - s*beta^{2m}
                PrintedOr::Printed => 1,   // printed: alpha^{5m} - s*beta^{m}
            };
            let frac_a = Real::from_i64(2, wp)
                .mul(&amb.factor_pow(2), wp)
                .div(&amb.am[1].mul(&amb.geom(5, beta_exp), wp), wp);
            let frac_b = Real::from_i64(3, wp)
                .mul(&amb.factor_pow(3), wp)
                .div(&amb.am[1].mul(&amb.geom(4, 1).powi(2, wp), wp), wp);
            let series2 = signed_pow(&base2, n1, wp).mul(&frac_b.sub(&frac_a, wp), wp);
            push(
                if s == 1 { "D" } else { "J" },
                coeff2.mul(
                    &amb.cross_pair(&base2).neg().add(&series2, wp),
                    wp,
                ),
            );
        }
        4 => {
            // first order: 4*c1^3*c2, base alpha^3*beta = -alpha^2*q
            let base1 = alpha.mul(alpha, wp).mul(&neg_q, wp);
            let coeff1 = Real::from_i64(4, wp)
                .mul(&c1.powi(3, wp), wp)
                .mul(c2, wp);
            let series1 = signed_pow(&base1, n1, wp)
                .mul(&amb.factor_pow(2), wp)
                .div(&amb.am[3].mul(&amb.geom(5, 1), wp), wp);
            push(
                if s == 1 { "E" } else { "L" },
                coeff1.mul(&amb.cross_pair(&base1).sub(&series1, wp), wp),
            );

            // second order: c1^2*c2^2, base alpha^2*beta^2 = q^2
            let base2 = neg_q.mul(&neg_q, wp);
            let coeff2 = c1.mul(c1, wp).mul(&c2.mul(c2, wp), wp);
            let cross2 = Real::from_i64(-6, wp).mul(&amb.cross_pair(&base2), wp);
            let frac_a = Real::from_i64(10, wp)
                .mul(&amb.factor_pow(2), wp)
                .div(&amb.am[2].mul(&amb.geom(6, 2), wp), wp);
            let frac_b = Real::from_i64(16, wp)
                .mul(&amb.factor_pow(3), wp)
                .div(&amb.am[2].mul(&amb.geom(5, 1).powi(2, wp), wp), wp);
            let series2 = signed_pow(&base2, n1, wp).mul(&frac_b.sub(&frac_a, wp), wp);
            push(
                if s == 1 { "F" } else { "M" },
                coeff2.mul(&cross2.add(&series2, wp), wp),
            );

            // third order: 4*c1*c2^3, base alpha*beta^3 = -beta^2*q
            let base3 = beta.mul(beta, wp).mul(&neg_q, wp);
            let coeff3 = Real::from_i64(4, wp)
                .mul(c1, wp)
                .mul(&c2.powi(3, wp), wp);
            let frac_a = Real::from_i64(5, wp)
                .mul(&amb.factor_pow(2), wp)
                .div(&amb.am[1].mul(&amb.geom(7, 3), wp), wp);
            let frac_b = Real::from_i64(16, wp)
                .mul(&amb.factor_pow(4), wp)
                .div(&amb.am[1].mul(&amb.geom(5, 1).powi(3, wp), wp), wp);
            let gn_form = if s == 1 { variants.g_form } else { variants.n_form };
            let mut den_c = amb.am[1]
                .mul(&amb.geom(5, 1), wp)
                .mul(&amb.geom(6, 2), wp);
            if gn_form == C1SqForm::WithC1Sq {
                den_c = den_c.mul(&c1.mul(c1, wp), wp);
            }
            let frac_c = Real::from_i64(20, wp)
                .mul(&amb.factor_pow(3), wp)
                .div(&den_c, wp);
            let series3 = signed_pow(&base3, n1, wp)
                .mul(&frac_c.sub(&frac_a, wp).sub(&frac_b, wp), wp);
            push(
                if s == 1 { "G" } else { "N" },
                coeff3.mul(&amb.cross_pair(&base3).add(&series3, wp), wp),
            );
        }
        _ => unreachable!(),
    }

    let mut total = main.clone();
    for c in &corrections {
        total = total.add(&c.value, p);
    }
    let dropped_scale = ctx.beta.abs().powi(d as u64 * n1, p);
    Ok(EstimateBreakdown {
        main,
        corrections,
        total,
        dropped_scale,
        variant: variants.describe(d, s == -1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binet::build_context;
    use crate::params::{Preset, SequenceParams};
    use crate::real::Real;

    fn fib_ctx(p: u32) -> BinetContext {
        build_context(&Preset::Fibonacci.params(), p).unwrap()
    }

    fn two_thirds(p: u32) -> Real {
        Real::from_i64(2, p).div(&Real::from_i64(3, p), p)
    }

    #[test]
    fn d1_exact_and_no_corrections() {
        let ctx = fib_ctx(256);
        let q = SubseqQuery::new(1, 0, 1, 1, false).unwrap();
        let b = corollary_estimate_plain(&ctx, &q, 12, &VariantSet::default()).unwrap();
        assert!(b.corrections.is_empty());
        assert_eq!(b.total, Real::from_i64(55, 256));
        assert_eq!(b.variant, "-");
    }

    #[test]
    fn fibonacci_d2_constant_is_two_thirds() {
        let p = 256;
        let ctx = fib_ctx(p);
        let q = SubseqQuery::new(1, 0, 2, 1, false).unwrap();
        let tol = Real::pow2(-224, 64);
        for n in [9u64, 10, 15, 16] {
            let b = corollary_estimate_plain(&ctx, &q, n, &VariantSet::default()).unwrap();
            assert_eq!(b.corrections.len(), 1);
            assert_eq!(b.corrections[0].name, "B");
            let expect = if n % 2 == 0 {
                two_thirds(p)
            } else {
                two_thirds(p).neg()
            };
            let diff = b.corrections[0].value.sub(&expect, p).abs();
            assert!(diff.le(&tol), "n={n} diff={diff}");
        }
    }

    #[test]
    fn fibonacci_m3_d2_constant_is_four_ninths() {
        let p = 256;
        let ctx = fib_ctx(p);
        let q = SubseqQuery::new(3, 0, 2, 1, false).unwrap();
        let four_ninths = Real::from_i64(4, p).div(&Real::from_i64(9, p), p);
        let tol = Real::pow2(-224, 64);
        for n in [8u64, 9] {
            let b = corollary_estimate_plain(&ctx, &q, n, &VariantSet::default()).unwrap();
            let expect = if n % 2 == 0 { four_ninths.clone() } else { four_ninths.neg() };
            let diff = b.corrections[0].value.sub(&expect, p).abs();
            assert!(diff.le(&tol), "n={n} diff={diff}");
        }
    }

    #[test]
    fn alternating_d1_and_h_constant() {
        let p = 256;
        let ctx = fib_ctx(p);
        let q1 = SubseqQuery::new(1, 0, 1, 1, true).unwrap();
        let b = corollary_estimate_alternating(&ctx, &q1, 10, &VariantSet::default()).unwrap();
        assert_eq!(b.total, Real::from_i64(89, p));
        assert!(b.corrections.is_empty());

        // H for Fibonacci m=1 reduces to -(2/sqrt5)(-1)^n
        let q2 = SubseqQuery::new(1, 0, 2, 1, true).unwrap();
        let b2 = corollary_estimate_alternating(&ctx, &q2, 10, &VariantSet::default()).unwrap();
        assert_eq!(b2.corrections[0].name, "H");
        let expect = Real::from_i64(2, p)
            .div(&Real::from_i64(5, p).sqrt(p), p)
            .neg();
        let diff = b2.corrections[0].value.sub(&expect, p).abs();
        assert!(diff.le(&Real::pow2(-224, 64)), "diff={diff}");
    }

    #[test]
    fn variant_switches_change_only_their_constant() {
        let ctx = build_context(&SequenceParams::new(0, 1, 3, 2), 192).unwrap();
        let q3 = SubseqQuery::new(1, 0, 3, 1, false).unwrap();
        let default = corollary_estimate_plain(&ctx, &q3, 8, &VariantSet::default()).unwrap();
        let proof_c = corollary_estimate_plain(
            &ctx,
            &q3,
            8,
            &VariantSet::from_tag("proof_C").unwrap(),
        )
        .unwrap();
        assert_ne!(default.corrections[0].value, proof_c.corrections[0].value);
        assert_eq!(default.corrections[1].value, proof_c.corrections[1].value);
        assert_eq!(default.variant, "statement_C,expansion_D");
        assert_eq!(proof_c.variant, "proof_C,expansion_D");

        let paper_d = corollary_estimate_plain(
            &ctx,
            &q3,
            8,
            &VariantSet::from_tag("printed_D").unwrap(),
        )
        .unwrap();
        assert_eq!(default.corrections[0].value, paper_d.corrections[0].value);
        assert_ne!(default.corrections[1].value, paper_d.corrections[1].value);
    }

    #[test]
    fn degree_out_of_range_rejected() {
        let ctx = fib_ctx(128);
        let q = SubseqQuery::new(1, 0, 5, 1, false).unwrap();
        assert!(matches!(
            corollary_estimate_plain(&ctx, &q, 8, &VariantSet::default()),
            Err(Error::UnsupportedDegree { d: 5 })
        ));
    }

    #[test]
    fn matches_theorem_estimate_at_growing_n() {
        // |theorem - corollary| must shrink with n for every d and family
        let ctx = build_context(&SequenceParams::new(1, 2, 2, 1), 256).unwrap();
        for d in 1..=4u32 {
            for alt in [false, true] {
                let q = SubseqQuery::new(2, -1, d, 1, alt).unwrap();
                let mut prev: Option<Real> = None;
                for n in [8u64, 11, 14] {
                    let (t, c) = if alt {
                        (
                            super::super::theorem_estimate_alternating(&ctx, &q, n).unwrap(),
                            corollary_estimate_alternating(&ctx, &q, n, &VariantSet::default())
                                .unwrap(),
                        )
                    } else {
                        (
                            super::super::theorem_estimate_plain(&ctx, &q, n).unwrap(),
                            corollary_estimate_plain(&ctx, &q, n, &VariantSet::default())
                                .unwrap(),
                        )
                    };
                    let diff = t.total.sub(&c.total, 256).abs();
                    if let Some(pd) = prev.take() {
                        assert!(diff.lt(&pd), "d={d} alt={alt} n={n}");
                    }
                    prev = Some(diff);
                }
            }
        }
    }

    #[test]
    fn main_term_reproducible_from_exact_integers() {
        let ctx = build_context(&SequenceParams::new(1, 2, 2, 1), 192).unwrap();
        for (d, alt, n) in [(2u32, false, 9u64), (3, true, 8), (4, false, 7)] {
            let q = SubseqQuery::new(2, -1, d, 1, alt).unwrap();
            let b = if alt {
                corollary_estimate_alternating(&ctx, &q, n, &VariantSet::default()).unwrap()
            } else {
                corollary_estimate_plain(&ctx, &q, n, &VariantSet::default()).unwrap()
            };
            let w1 = crate::seq::term(&ctx.params, q.index(n) as u64).pow(d);
            let w0 = crate::seq::term(&ctx.params, q.index(n - 1) as u64).pow(d);
            let expected = if alt {
                let v = Real::from_bigint(&(w1 + w0), 192);
                if n % 2 == 1 { v.neg() } else { v }
            } else {
                Real::from_bigint(&(w1 - w0), 192)
            };
            // bit-for-bit: equality of values and identical decimal rendering
            assert_eq!(b.main, expected);
            assert_eq!(b.main.to_decimal_default(), expected.to_decimal_default());
        }
    }

    #[test]
    fn q_zero_constants_vanish() {
        // geometric sequence: every named constant is 0, estimate is exact
        let ctx = build_context(&SequenceParams::new(1, 3, 3, 0), 192).unwrap();
        for d in 2..=4u32 {
            let q = SubseqQuery::new(1, 0, d, 1, false).unwrap();
            let b = corollary_estimate_plain(&ctx, &q, 6, &VariantSet::default()).unwrap();
            for c in &b.corrections {
                assert!(c.value.is_zero(), "d={d} {}", c.name);
            }
        }
    }
}
