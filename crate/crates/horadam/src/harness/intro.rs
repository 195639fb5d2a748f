//! Cross-checks of the published special-case estimates, evaluated by an
//! independent code path: exact sequence terms plus the displayed constants,
//! computed here from the quadratic formula. This module deliberately does
//! not import the `estimate` module.

use serde::Serialize;

use crate::error::Error;
use crate::params::{Preset, SequenceParams, SubseqQuery};
use crate::real::{Real, GUARD_BITS};
use crate::seq::term;

use super::experiment::measured_rows;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntroCase {
    LeeD1,
    LeeD1Ml,
    LeeD2M1,
    LeeD2M3,
    MarquesD2Even,
    MarquesD2Odd,
    HwangD4,
    YuanD1,
    YuanD2,
    YuanD3,
    YuanD4,
}

pub const INTRO_CASES: &[(&str, IntroCase)] = &[
    ("lee_d1", IntroCase::LeeD1),
    ("lee_d1_ml", IntroCase::LeeD1Ml),
    ("lee_d2_m1", IntroCase::LeeD2M1),
    ("lee_d2_m3", IntroCase::LeeD2M3),
    ("marques_d2_even", IntroCase::MarquesD2Even),
    ("marques_d2_odd", IntroCase::MarquesD2Odd),
    ("hwang_d4", IntroCase::HwangD4),
    ("yuan_d1", IntroCase::YuanD1),
    ("yuan_d2", IntroCase::YuanD2),
    ("yuan_d3", IntroCase::YuanD3),
    ("yuan_d4", IntroCase::YuanD4),
];

impl std::str::FromStr for IntroCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        INTRO_CASES
            .iter()
            .find(|(name, _)| *name == s)
            .map(|(_, c)| *c)
            .ok_or_else(|| Error::UnknownCase(s.to_string()))
    }
}

impl IntroCase {
    pub fn name(self) -> &'static str {
        INTRO_CASES
            .iter()
            .find(|(_, c)| *c == self)
            .map(|(n, _)| *n)
            .expect("case registered")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheckRow {
    pub n: u64,
    pub inverse_tail: Real,
    pub intro_estimate: Real,
    pub abs_diff: Real,
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheckReport {
    pub case_id: String,
    pub params: SequenceParams,
    pub query: SubseqQuery,
    pub rows: Vec<CrossCheckRow>,
    pub decreasing: bool,
    pub terminal_abs_diff: Real,
}

struct Roots {
    alpha: Real,
    beta: Real,
    sqrt_disc: Real,
}

fn roots(params: &SequenceParams, wp: u32) -> Roots {
    let disc = Real::from_i64(params.p * params.p + 4 * params.q, wp);
    let sd = disc.sqrt(wp);
    let two = Real::from_i64(2, wp);
    let pr = Real::from_i64(params.p, wp);
    Roots {
        alpha: pr.add(&sd, wp).div(&two, wp),
        beta: pr.sub(&sd, wp).div(&two, wp),
        sqrt_disc: sd,
    }
}

fn parity_sign(n: u64, wp: u32) -> Real {
    if n.is_multiple_of(2) {
        Real::one(wp)
    } else {
        Real::one(wp).neg()
    }
}

/// Evaluates the displayed estimate formula for each n and compares it with
/// the measured inverse tail, asserting decrease toward zero.
pub fn cross_check_intro(
    case: IntroCase,
    n_from: u64,
    n_to: u64,
    precision_bits: u32,
) -> Result<CrossCheckReport, Error> {
    if n_to < n_from + 3 {
        return Err(Error::InvalidQuery(format!(
            "need n_to >= n_from + 3, got [{n_from}, {n_to}]"
        )));
    }
    let p = precision_bits;
    let fib = Preset::Fibonacci.params();
    let lucas = Preset::Lucas.params();
    let pell = Preset::Pell.params();

    let (params, query): (SequenceParams, SubseqQuery) = match case {
        IntroCase::LeeD1 | IntroCase::LeeD2M1 | IntroCase::HwangD4 => {
            let d = match case {
                IntroCase::LeeD1 => 1,
                IntroCase::LeeD2M1 => 2,
                _ => 4,
            };
            (fib, SubseqQuery::new(1, 0, d, n_from, false)?)
        }
        IntroCase::LeeD1Ml => (fib, SubseqQuery::new(3, -2, 1, n_from, false)?),
        IntroCase::LeeD2M3 => (fib, SubseqQuery::new(3, 0, 2, n_from, false)?),
        IntroCase::MarquesD2Even => (fib, SubseqQuery::new(2, 0, 2, n_from, false)?),
        IntroCase::MarquesD2Odd => (fib, SubseqQuery::new(5, 0, 2, n_from, false)?),
        IntroCase::YuanD1 | IntroCase::YuanD2 | IntroCase::YuanD3 | IntroCase::YuanD4 => {
            let d = match case {
                IntroCase::YuanD1 => 1,
                IntroCase::YuanD2 => 2,
                IntroCase::YuanD3 => 3,
                _ => 4,
            };
            (pell, SubseqQuery::new(1, 0, d, n_from, false)?)
        }
    };
    if matches!(case, IntroCase::YuanD3) && n_from < 3 {
        return Err(Error::IndexOutOfRange("this case needs n_from >= 3".into()));
    }
    if matches!(case, IntroCase::LeeD1) && n_from < 2 {
        return Err(Error::IndexOutOfRange("this case needs n_from >= 2".into()));
    }

    // Pell-specialization constants, recomputed locally; B = alpha*beta = -1.
    let estimate = |n: u64, wp: u32| -> Real {
        let rt = roots(&params, wp);
        let one = Real::one(wp);
        let two = Real::from_i64(2, wp);
        let f = |e: u64| Real::from_bigint(&term(&fib, e), wp);
        let lu = |e: u64| Real::from_bigint(&term(&lucas, e), wp);
        match case {
            IntroCase::LeeD1 => f(n - 2),
            IntroCase::LeeD1Ml => f(3 * n - 2).sub(&f(3 * n - 5), wp),
            IntroCase::LeeD2M1 => {
                let main = f(n).mul(&f(n), wp).sub(&f(n - 1).mul(&f(n - 1), wp), wp);
                let c = two.div(&Real::from_i64(3, wp), wp).mul(&parity_sign(n, wp), wp);
                main.add(&c, wp)
            }
            IntroCase::LeeD2M3 => {
                let main = f(3 * n)
                    .mul(&f(3 * n), wp)
                    .sub(&f(3 * n - 3).mul(&f(3 * n - 3), wp), wp);
                let c = Real::from_i64(4, wp)
                    .div(&Real::from_i64(9, wp), wp)
                    .mul(&parity_sign(n, wp), wp);
                main.add(&c, wp)
            }
            IntroCase::MarquesD2Even => {
                // even stride: constant -2*sqrt5*(L_{2m}-2)/(25*F_{2m}), m = 2
                let main = f(2 * n)
                    .mul(&f(2 * n), wp)
                    .sub(&f(2 * n - 2).mul(&f(2 * n - 2), wp), wp);
                let s5 = Real::from_i64(5, wp).sqrt(wp);
                let c = two
                    .mul(&s5, wp)
                    .mul(&lu(4).sub(&two, wp), wp)
                    .div(&Real::from_i64(25, wp).mul(&f(4), wp), wp);
                main.sub(&c, wp)
            }
            IntroCase::MarquesD2Odd => {
                // odd stride: constant (-1)^n * 2*(L_{2m}+2)/(5*L_{2m}), m = 5
                let main = f(5 * n)
                    .mul(&f(5 * n), wp)
                    .sub(&f(5 * n - 5).mul(&f(5 * n - 5), wp), wp);
                let c = two
                    .mul(&lu(10).add(&two, wp), wp)
                    .div(&Real::from_i64(5, wp).mul(&lu(10), wp), wp);
                main.add(&c.mul(&parity_sign(n, wp), wp), wp)
            }
            IntroCase::HwangD4 => {
                let f4 = |e: u64| f(e).powi(4, wp);
                let main = f4(n).sub(&f4(n - 1), wp);
                let mid = two
                    .div(&Real::from_i64(5, wp), wp)
                    .mul(&parity_sign(n, wp), wp)
                    .mul(&f(2 * n - 1), wp);
                let s5 = Real::from_i64(5, wp).sqrt(wp);
                let tail_c = two.mul(&s5, wp).div(&Real::from_i64(75, wp), wp);
                main.add(&mid, wp).add(&tail_c, wp)
            }
            IntroCase::YuanD1 | IntroCase::YuanD2 | IntroCase::YuanD3 | IntroCase::YuanD4 => {
                let w = |e: u64| Real::from_bigint(&term(&params, e), wp);
                let alpha = &rt.alpha;
                let beta = &rt.beta;
                let sd2 = rt.sqrt_disc.mul(&rt.sqrt_disc, wp);
                let bsign = parity_sign(n, wp); // B^n with B = -1
                match case {
                    IntroCase::YuanD1 => w(n).sub(&w(n - 1), wp),
                    IntroCase::YuanD2 => {
                        // C_1 = 2(1-B)/(a-b)^2 - 2(a^2-1)^2/((a-b)^2 (a^4-B))
                        let a2 = alpha.mul(alpha, wp);
                        let a4 = a2.mul(&a2, wp);
                        let t1 = two.mul(&two, wp).div(&sd2, wp); // B = -1
                        let t2 = two
                            .mul(&a2.sub(&one, wp).powi(2, wp), wp)
                            .div(&sd2.mul(&a4.add(&one, wp), wp), wp);
                        let c1c = t1.sub(&t2, wp);
                        let main = w(n).mul(&w(n), wp).sub(&w(n - 1).mul(&w(n - 1), wp), wp);
                        main.add(&bsign.mul(&c1c, wp), wp)
                    }
                    IntroCase::YuanD3 => {
                        // Q_1 = W_1^2/((1-(Ba)^5)(1-(Bb)^5)), B = -1
                        let a5 = alpha.powi(5, wp);
                        let b5 = beta.powi(5, wp);
                        let q1 = one
                            .div(&one.add(&a5, wp).mul(&one.add(&b5, wp), wp), wp);
                        let main = w(n).powi(3, wp).sub(&w(n - 1).powi(3, wp), wp);
                        let gap = w(n + 2).sub(&w(n - 3), wp);
                        main.add(
                            &Real::from_i64(3, wp)
                                .mul(&bsign, wp)
                                .mul(&q1, wp)
                                .mul(&gap, wp),
                            wp,
                        )
                    }
                    _ => {
                        // U_1 = W_1^2/((1-B a^6)(1-B b^6)); V_1 as displayed
                        let a4 = alpha.powi(4, wp);
                        let a6 = alpha.powi(6, wp);
                        let a8 = alpha.powi(8, wp);
                        let b6 = beta.powi(6, wp);
                        let u1 = one
                            .div(&one.add(&a6, wp).mul(&one.add(&b6, wp), wp), wp);
                        let a4m1 = a4.sub(&one, wp);
                        let v1 = a4m1
                            .powi(2, wp)
                            .div(&sd2.mul(&sd2, wp), wp)
                            .mul(
                                &Real::from_i64(16, wp)
                                    .mul(&a4m1, wp)
                                    .div(&a6.add(&one, wp).powi(2, wp), wp)
                                    .sub(
                                        &Real::from_i64(10, wp)
                                            .div(&a8.sub(&one, wp), wp),
                                        wp,
                                    ),
                                wp,
                            );
                        let main = w(n).powi(4, wp).sub(&w(n - 1).powi(4, wp), wp);
                        // 4 B^n U_1 (W_{n+1}^2 - B W_{n-2}^2), B = -1
                        let gap = w(n + 1)
                            .powi(2, wp)
                            .add(&w(n - 2).powi(2, wp), wp);
                        main.add(
                            &Real::from_i64(4, wp)
                                .mul(&bsign, wp)
                                .mul(&u1, wp)
                                .mul(&gap, wp),
                            wp,
                        )
                        .add(&v1, wp)
                    }
                }
            }
        }
    };

    let estimate_fn = |pm: u32| -> Result<Vec<Real>, Error> {
        Ok((n_from..=n_to)
            .map(|n| estimate(n, pm + GUARD_BITS).with_precision(pm))
            .collect())
    };
    let estimates = estimate_fn(p)?;
    let base_eps = Real::from_decimal_str("1e-30", p).expect("constant");
    let measured = measured_rows(&params, &query, n_to, &estimate_fn, &base_eps, p)?;

    let mut rows = Vec::with_capacity(estimates.len());
    for (j, m) in measured.into_iter().enumerate() {
        rows.push(CrossCheckRow {
            n: m.n,
            inverse_tail: m.inv,
            intro_estimate: estimates[j].clone(),
            abs_diff: m.abs_error,
            flags: m.flags,
        });
    }
    let floor_scale = Real::pow2(-(p as i64) + 40, p);
    let decreasing = rows.windows(2).all(|w| {
        let floor = w[1].intro_estimate.abs().mul(&floor_scale, p);
        w[1].abs_diff.lt(&w[0].abs_diff) || w[1].abs_diff.le(&floor)
    });
    let terminal_abs_diff = rows.last().expect("nonempty").abs_diff.clone();
    Ok(CrossCheckReport {
        case_id: case.name().to_string(),
        params,
        query,
        rows,
        decreasing,
        terminal_abs_diff,
    })
}
