//! Exact validation of the hypotheses the estimation formulas need.
//!
//! Every check runs in integer arithmetic only, so verdicts never depend on
//! working precision. The key equivalences, with D = p^2+4q and
//! L = p^2+2q-2:
//!
//! * |beta| < 1  <=>  L < p*sqrt(D)  <=>  L < 0  or  L^2 < p^2*D
//! * alpha > 1   <=>  p >= 2  or  (p = 1 and q >= 1)
//! * c1 = 0      <=>  2b-ap = -a*sqrt(D), which for a != 0 needs
//!   sign(2b-ap) = -sign(a) and (2b-ap)^2 = a^2*D; for a = 0 it means b = 0.
//!
//! Squaring is always guarded by a sign test so the equivalences are exact.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::params::SequenceParams;

pub const CHECK_P_GE_1: &str = "p_ge_1";
pub const CHECK_DISCRIMINANT: &str = "discriminant";
pub const CHECK_BETA_MODULUS: &str = "beta_modulus_lt_1";
pub const CHECK_ALPHA_GT_1: &str = "alpha_gt_1";
pub const CHECK_C1_NONZERO: &str = "c1_nonzero";

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub diagnostic: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub checks: Vec<Check>,
    pub failed_first: Option<String>,
}

impl ValidationReport {
    fn push(&mut self, name: &'static str, passed: bool, diagnostic: String) {
        if !passed && self.failed_first.is_none() {
            self.failed_first = Some(name.to_string());
        }
        self.ok &= passed;
        self.checks.push(Check { name, passed, diagnostic });
    }
}

/// Runs the full check set in order: p >= 1, discriminant > 0,
/// |beta| < 1, alpha > 1, c1 != 0.
pub fn validate(params: &SequenceParams) -> ValidationReport {
    let mut report = ValidationReport { ok: true, checks: Vec::new(), failed_first: None };
    let a = BigInt::from(params.a);
    let b = BigInt::from(params.b);
    let p = BigInt::from(params.p);
    let q = BigInt::from(params.q);

    let p_ok = params.p >= 1;
    report.push(CHECK_P_GE_1, p_ok, format!("p = {}", params.p));

    let disc: BigInt = &p * &p + 4 * &q;
    let disc_ok = disc.is_positive();
    report.push(
        CHECK_DISCRIMINANT,
        disc_ok,
        format!("p^2+4q = {disc}"),
    );

    if !disc_ok || !p_ok {
        let na = "not evaluable: real roots require p >= 1 and p^2+4q > 0".to_string();
        report.push(CHECK_BETA_MODULUS, false, na.clone());
        report.push(CHECK_ALPHA_GT_1, false, na.clone());
        report.push(CHECK_C1_NONZERO, false, na);
        return report;
    }

    // |beta| < 1  <=>  p^2+2q-2 < p*sqrt(p^2+4q)
    let lhs: BigInt = &p * &p + 2 * &q - 2;
    let beta_ok = if lhs.is_negative() {
        true
    } else {
        &lhs * &lhs < &p * &p * &disc
    };
    report.push(
        CHECK_BETA_MODULUS,
        beta_ok,
        format!("p^2+2q-2 = {lhs} vs p*sqrt(p^2+4q) = sqrt({})", &p * &p * &disc),
    );

    let alpha_ok = params.p >= 2 || (params.p == 1 && params.q >= 1);
    report.push(CHECK_ALPHA_GT_1, alpha_ok, format!("p = {}, q = {}", params.p, params.q));

    let c1_zero = if params.a == 0 {
        params.b == 0
    } else {
        let t: BigInt = 2 * &b - &a * &p; // c1 = 0 <=> t = -a*sqrt(D)
        let sign_match = t.is_negative() == a.is_positive() && !t.is_zero();
        sign_match && &t * &t == &a * &a * &disc
    };
    report.push(
        CHECK_C1_NONZERO,
        !c1_zero,
        format!("2b-ap = {}", 2 * &b - &a * &p),
    );

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Preset;
    use crate::real::Real;

    #[test]
    fn fibonacci_ok() {
        let r = validate(&Preset::Fibonacci.params());
        assert!(r.ok);
        assert!(r.failed_first.is_none());
        assert_eq!(r.checks.len(), 5);
        assert!(r.checks.iter().all(|c| c.passed));
    }

    #[test]
    fn beta_boundary_rejected() {
        // (0,1,1,2): beta = -1 exactly, 3 < 3 is false
        let r = validate(&SequenceParams::new(0, 1, 1, 2));
        assert!(!r.ok);
        assert_eq!(r.failed_first.as_deref(), Some(CHECK_BETA_MODULUS));
    }

    #[test]
    fn complex_roots_rejected() {
        let r = validate(&SequenceParams::new(0, 1, 1, -1));
        assert!(!r.ok);
        assert_eq!(r.failed_first.as_deref(), Some(CHECK_DISCRIMINANT));
    }

    #[test]
    fn alpha_not_gt_one_rejected() {
        // (0,1,1,0): beta = 0 passes, alpha = 1 fails
        let r = validate(&SequenceParams::new(0, 1, 1, 0));
        assert!(!r.ok);
        assert_eq!(r.failed_first.as_deref(), Some(CHECK_ALPHA_GT_1));
    }

    #[test]
    fn c1_zero_on_perfect_square_disc() {
        // (p,q) = (3,0): beta = 0, alpha = 3, c1 = b/3
        let r = validate(&SequenceParams::new(2, 0, 3, 0));
        assert!(!r.ok);
        assert_eq!(r.failed_first.as_deref(), Some(CHECK_C1_NONZERO));
        let r = validate(&SequenceParams::new(2, 1, 3, 0));
        assert!(r.ok);
        // (0,0,..) is degenerate
        let r = validate(&SequenceParams::new(0, 0, 1, 1));
        assert_eq!(r.failed_first.as_deref(), Some(CHECK_C1_NONZERO));
    }

    /// The exact beta_modulus verdict must agree with a 256-bit numeric
    /// computation of |beta| on the whole small-parameter grid, excluding
    /// exact-boundary cases.
    #[test]
    fn beta_verdict_matches_numeric_grid() {
        let p256 = 256;
        let one = Real::one(p256);
        let tol = Real::pow2(-200, p256);
        for p in 1i64..=6 {
            for q in -9i64..=9 {
                let params = SequenceParams::new(0, 1, p, q);
                let disc = p * p + 4 * q;
                if disc <= 0 {
                    continue;
                }
                let sqrt_d = Real::from_i64(disc, p256).sqrt(p256);
                let beta = Real::from_i64(p, p256)
                    .sub(&sqrt_d, p256)
                    .div(&Real::from_i64(2, p256), p256);
                let dist = beta.abs().sub(&one, p256).abs();
                if dist.lt(&tol) {
                    continue; // exact boundary
                }
                let numeric = beta.abs().lt(&one);
                let exact = validate(&params)
                    .checks
                    .iter()
                    .find(|c| c.name == CHECK_BETA_MODULUS)
                    .unwrap()
                    .passed;
                assert_eq!(exact, numeric, "p={p} q={q}");
            }
        }
    }
}
