//! Specialization checks: on W(0,1,A,B) parameters the named-constant
//! estimates and the specialization-form estimates must converge to each
//! other and to the measured inverse tail.

use serde::Serialize;

use crate::binet::build_context;
use crate::error::Error;
use crate::estimate::{corollary_estimate_plain, yuan_constants, yuan_estimate, VariantSet};
use crate::params::{SequenceParams, SubseqQuery};
use crate::real::Real;

use super::experiment::measured_rows;

#[derive(Clone, Debug, Serialize)]
pub struct RemarkRow {
    pub n: u64,
    pub corollary_total: Real,
    pub yuan_total: Real,
    pub inverse_tail: Real,
    pub mutual_diff: Real,
    pub corollary_abs_error: Real,
    pub yuan_abs_error: Real,
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RemarkReport {
    pub params: SequenceParams,
    pub m: u32,
    pub d: u32,
    pub rows: Vec<RemarkRow>,
    pub mutual_decreasing: bool,
    pub corollary_converged: bool,
    pub yuan_converged: bool,
}

/// Compares the named-constant estimate against the specialization form for
/// a = 0, b = 1, |q| = 1, l = 0 parameters.
pub fn remark_specialization_check(
    params: &SequenceParams,
    m: u32,
    d: u32,
    n_from: u64,
    n_to: u64,
    precision_bits: u32,
) -> Result<RemarkReport, Error> {
    if n_to < n_from + 3 {
        return Err(Error::InvalidQuery(format!(
            "need n_to >= n_from + 3, got [{n_from}, {n_to}]"
        )));
    }
    let p = precision_bits;
    // reject non-specialization parameters early
    build_context(params, p).and_then(|cx| yuan_constants(&cx, m).map(|_| ()))?;
    let query = SubseqQuery::new(m, 0, d, n_from, false)?;
    let variants = VariantSet::default();

    let cor_fn = |pm: u32| -> Result<Vec<Real>, Error> {
        let cx = build_context(params, pm)?;
        (n_from..=n_to)
            .map(|n| Ok(corollary_estimate_plain(&cx, &query, n, &variants)?.total))
            .collect()
    };
    let yuan_fn = |pm: u32| -> Result<Vec<Real>, Error> {
        let cx = build_context(params, pm)?;
        (n_from..=n_to).map(|n| yuan_estimate(&cx, m, d, n)).collect()
    };
    let cor = cor_fn(p)?;
    let yuan = yuan_fn(p)?;
    let base_eps = Real::from_decimal_str("1e-30", p).expect("constant");
    let mc = measured_rows(params, &query, n_to, &cor_fn, &base_eps, p)?;
    let my = measured_rows(params, &query, n_to, &yuan_fn, &base_eps, p)?;

    let floor_scale = Real::pow2(-(p as i64) + 40, p);
    let mut rows = Vec::with_capacity(cor.len());
    for (j, (rc, ry)) in mc.iter().zip(my.iter()).enumerate() {
        let mutual_diff = cor[j].sub(&yuan[j], p).abs();
        let mut flags = rc.flags.clone();
        flags.extend(ry.flags.iter().cloned());
        flags.dedup();
        rows.push(RemarkRow {
            n: rc.n,
            corollary_total: cor[j].clone(),
            yuan_total: yuan[j].clone(),
            inverse_tail: rc.inv.clone(),
            mutual_diff,
            corollary_abs_error: rc.abs_error.clone(),
            yuan_abs_error: ry.abs_error.clone(),
            flags,
        });
    }

    let at_floor = |value: &Real, scale: &Real| value.le(&scale.abs().mul(&floor_scale, p));
    let mutual_decreasing = rows
        .windows(2)
        .all(|w| w[1].mutual_diff.lt(&w[0].mutual_diff) || at_floor(&w[1].mutual_diff, &w[1].corollary_total));
    let converged = |errs: Vec<&Real>, totals: Vec<&Real>| -> bool {
        let k = errs.len();
        let mut mono = true;
        for i in k - 3..k {
            mono &= errs[i].lt(errs[i - 1]) || at_floor(errs[i], totals[i]);
        }
        let thousandth = Real::from_decimal_str("1e-3", p).expect("constant");
        let decay = at_floor(errs[k - 1], totals[k - 1])
            || errs[k - 1].lt(&errs[0].mul(&thousandth, p));
        mono && decay
    };
    let corollary_converged = converged(
        rows.iter().map(|r| &r.corollary_abs_error).collect(),
        rows.iter().map(|r| &r.corollary_total).collect(),
    );
    let yuan_converged = converged(
        rows.iter().map(|r| &r.yuan_abs_error).collect(),
        rows.iter().map(|r| &r.yuan_total).collect(),
    );

    Ok(RemarkReport {
        params: *params,
        m,
        d,
        rows,
        mutual_decreasing,
        corollary_converged,
        yuan_converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Preset;

    #[test]
    fn rejects_outside_specialization() {
        let bad = SequenceParams::new(1, 1, 1, 1);
        assert!(remark_specialization_check(&bad, 1, 2, 6, 14, 256).is_err());
    }

    #[test]
    fn fibonacci_d1_identical_totals() {
        // the error decays like beta^n, so the 1e-3 decay rule needs ~15+ steps
        let fib = Preset::Fibonacci.params();
        let r = remark_specialization_check(&fib, 1, 1, 6, 26, 256).unwrap();
        for row in &r.rows {
            // both are W_{mn} - W_{m(n-1)}: bit-identical at P
            assert_eq!(row.corollary_total, row.yuan_total);
        }
        assert!(r.mutual_decreasing);
        assert!(r.corollary_converged && r.yuan_converged);
    }

    #[test]
    fn fibonacci_d3_mutual_difference_shrinks() {
        let fib = Preset::Fibonacci.params();
        let r = remark_specialization_check(&fib, 1, 3, 6, 26, 256).unwrap();
        assert!(r.mutual_decreasing, "{:?}", r.rows.iter().map(|x| x.mutual_diff.to_decimal_string(5)).collect::<Vec<_>>());
        // below 1e-3 already at n=14 (row index 8 of [6,26])
        assert!(r.rows[8].mutual_diff.le(&Real::from_decimal_str("1e-3", 64).unwrap()));
        let last = r.rows.last().unwrap();
        assert!(last.mutual_diff.le(&Real::from_decimal_str("1e-5", 64).unwrap()));
        assert!(r.corollary_converged && r.yuan_converged);
    }

    #[test]
    fn pell_m2_d4_both_converge() {
        let pell = Preset::Pell.params();
        let r = remark_specialization_check(&pell, 2, 4, 6, 14, 256).unwrap();
        assert!(r.mutual_decreasing);
        assert!(r.corollary_converged && r.yuan_converged);
    }
}
