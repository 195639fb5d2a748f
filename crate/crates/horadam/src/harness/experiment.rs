//! Convergence experiments: error sequences of an estimator against the
//! measured inverse tail, with tail accuracy escalated until the tail bound
//! stops swamping the error being measured.

use serde::Serialize;

use crate::binet::build_context;
use crate::error::Error;
use crate::estimate::{
    corollary_estimate_alternating, corollary_estimate_plain, theorem_estimate_alternating,
    theorem_estimate_plain, VariantSet,
};
use crate::params::{SequenceParams, SubseqQuery};
use crate::real::{Real, GUARD_BITS};
use crate::tail::{inverse_tail, tail_sum_batch, DEFAULT_TERM_CAP};

pub const FLAG_BOUND_SWAMPS: &str = "tail_bound_swamps_error";
pub const FLAG_NOISE_FLOOR: &str = "at_noise_floor";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Theorem,
    Corollary,
}

impl std::str::FromStr for EstimatorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "theorem" => Ok(EstimatorKind::Theorem),
            "corollary" => Ok(EstimatorKind::Corollary),
            other => Err(Error::InvalidQuery(format!("unknown estimator `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub n_from: u64,
    pub n_to: u64,
    pub precision_bits: u32,
    pub epsilon: Real,
    pub estimator: EstimatorKind,
    pub variants: VariantSet,
}

impl ExperimentConfig {
    /// Harness defaults: n in [6,16], P = 256 bits, epsilon = 1e-30.
    pub fn defaults(estimator: EstimatorKind) -> Self {
        ExperimentConfig {
            n_from: 6,
            n_to: 16,
            precision_bits: 256,
            epsilon: Real::from_decimal_str("1e-30", 256).expect("constant"),
            estimator,
            variants: VariantSet::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentRow {
    pub n: u64,
    pub inverse_tail: Real,
    pub inverse_error_bound: Real,
    pub estimate_total: Real,
    pub error: Real,
    pub abs_error: Real,
    pub ratio: Option<Real>,
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub params: SequenceParams,
    pub query: SubseqQuery,
    pub estimator: EstimatorKind,
    pub variant: String,
    pub precision_bits: u32,
    pub epsilon: Real,
    pub rows: Vec<ExperimentRow>,
}

/// Evaluates the configured estimator's total at each n, at precision `p`.
pub fn estimate_totals_at(
    params: &SequenceParams,
    query: &SubseqQuery,
    cfg: &ExperimentConfig,
    p: u32,
) -> Result<(Vec<Real>, String), Error> {
    let ctx = build_context(params, p)?;
    let mut out = Vec::with_capacity((cfg.n_to - cfg.n_from + 1) as usize);
    let mut variant = String::from("general");
    for n in cfg.n_from..=cfg.n_to {
        let b = match (cfg.estimator, query.alternating) {
            (EstimatorKind::Theorem, false) => theorem_estimate_plain(&ctx, query, n)?,
            (EstimatorKind::Theorem, true) => theorem_estimate_alternating(&ctx, query, n)?,
            (EstimatorKind::Corollary, false) => {
                corollary_estimate_plain(&ctx, query, n, &cfg.variants)?
            }
            (EstimatorKind::Corollary, true) => {
                corollary_estimate_alternating(&ctx, query, n, &cfg.variants)?
            }
        };
        variant = b.variant.clone();
        out.push(b.total);
    }
    Ok((out, variant))
}

pub(crate) struct MeasuredRow {
    pub n: u64,
    pub inv: Real,
    pub bound: Real,
    pub error: Real,
    pub abs_error: Real,
    pub flags: Vec<String>,
}

/// Working precision and tail epsilon required to resolve errors around the
/// dropped-order scale |beta|^(d(mn+l)) against estimates of magnitude
/// ~ alpha^(d(mn+l)). Predicted from cheap logarithms, with generous margin;
/// a retry loop backstops coefficient surprises.
pub(crate) struct MeasurementTarget {
    pub precision: u32,
    pub epsilon: Real,
}

pub(crate) fn measurement_target(
    params: &SequenceParams,
    query: &SubseqQuery,
    n_to: u64,
    base_eps: &Real,
    base_p: u32,
) -> Result<MeasurementTarget, Error> {
    let probe = build_context(params, 96)?;
    let la = probe.alpha.ln_f64();
    let lc1 = probe.c1.abs().ln_f64();
    let d = query.d as f64;
    let idx_to = query.index(n_to) as f64;
    // ln of the estimate magnitude ~ T^{-1}(n_to)
    let ln_est = d * (lc1 + idx_to * la);
    // ln of the smallest error scale to resolve; beta = 0 or c2 = 0 make the
    // estimate exact, so target the rounding floor of 2x base precision
    let exact_family = probe.beta.is_zero() || probe.c2.is_zero();
    let ln_err = if exact_family {
        ln_est - 2.0 * base_p as f64 * std::f64::consts::LN_2
    } else {
        let lb = probe.beta.abs().ln_f64();
        d * idx_to * lb - 20.0
    };
    // epsilon: bound/(T^2) must sit two orders below the error
    let ln_t_to = -ln_est;
    let ln_eps = ln_err + 2.0 * ln_t_to - 10.0 * std::f64::consts::LN_10;
    let log2_eps = (ln_eps / std::f64::consts::LN_2).floor();
    let epsilon_pred = Real::pow2(log2_eps as i64, 128);
    let epsilon = if epsilon_pred.lt(base_eps) { epsilon_pred } else { base_eps.clone() };
    // precision: resolve err against est, plus headroom
    let bits_needed = ((ln_est - ln_err) / std::f64::consts::LN_2).ceil() as i64 + 96;
    let precision = base_p.max(bits_needed.clamp(64, 1 << 20) as u32);
    Ok(MeasurementTarget { precision, epsilon })
}

/// Measures |T(n)^-1 - estimate(n)| for each n. Tail accuracy and working
/// precision are targeted from the predicted error scale, then escalated up
/// to two more times if the propagated tail bound still swamps the measured
/// error. Rows that remain unresolved keep the flag.
pub(crate) fn measured_rows(
    params: &SequenceParams,
    query: &SubseqQuery,
    n_to: u64,
    estimate_fn: &dyn Fn(u32) -> Result<Vec<Real>, Error>,
    base_eps: &Real,
    base_p: u32,
) -> Result<Vec<MeasuredRow>, Error> {
    let n_from = query.n;
    let count = (n_to - n_from + 1) as usize;
    let target = measurement_target(params, query, n_to, base_eps, base_p)?;

    let mut rows: Vec<Option<MeasuredRow>> = (0..count).map(|_| None).collect();
    let mut p = target.precision;
    let mut eps = target.epsilon;
    for attempt in 0..3 {
        if attempt > 0 {
            eps = eps.mul(&Real::pow2(-100, 128), 128);
            p += 256;
        }
        if rows.iter().all(|r| r.is_some()) {
            break;
        }
        let wp = p + GUARD_BITS;
        let hundred = Real::from_i64(100, wp);
        // caller-visible resolution: true errors certified below this count
        // as exact agreement at the working precision
        let floor_scale = Real::pow2(-(base_p as i64) + 40, wp);
        let batch = tail_sum_batch(params, query, n_to, &eps, p, DEFAULT_TERM_CAP)?;
        let estimates = estimate_fn(p)?;
        assert_eq!(estimates.len(), count);
        for (j, tail) in batch.iter().enumerate() {
            if rows[j].is_some() {
                continue;
            }
            let n = n_from + j as u64;
            let est = &estimates[j];
            let (inv, bound) = match inverse_tail(tail) {
                Ok(v) => v,
                Err(Error::BoundTooLarge) => continue, // retry deeper
                Err(e) => return Err(e),
            };
            let error = inv.sub(est, wp);
            let abs_error = error.abs();
            let floor = est.abs().mul(&floor_scale, wp);
            let swamped = bound.mul(&hundred, wp).ge(&abs_error);
            let mut flags = Vec::new();
            let resolved = if !swamped {
                true
            } else if abs_error.add(&bound, wp).le(&floor) {
                // true error certified below the caller-visible floor
                flags.push(FLAG_NOISE_FLOOR.to_string());
                true
            } else if attempt == 2 {
                flags.push(FLAG_BOUND_SWAMPS.to_string());
                true
            } else {
                false
            };
            if resolved {
                rows[j] = Some(MeasuredRow {
                    n,
                    inv: inv.with_precision(base_p),
                    bound: bound.with_precision(base_p),
                    error: error.with_precision(base_p),
                    abs_error: abs_error.with_precision(base_p),
                    flags,
                });
            }
        }
    }
    // Rows where inverse_tail never succeeded even at the deepest attempt.
    for (j, slot) in rows.iter_mut().enumerate() {
        if slot.is_none() {
            let n = n_from + j as u64;
            *slot = Some(MeasuredRow {
                n,
                inv: Real::zero(base_p),
                bound: Real::zero(base_p),
                error: Real::zero(base_p),
                abs_error: Real::zero(base_p),
                flags: vec![FLAG_BOUND_SWAMPS.to_string()],
            });
        }
    }
    Ok(rows.into_iter().map(|r| r.expect("filled")).collect())
}

/// Runs the experiment: one row per n with the estimator's total, the
/// measured inverse tail, and their difference.
pub fn convergence_experiment(
    params: &SequenceParams,
    query: &SubseqQuery,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport, Error> {
    if cfg.n_to < cfg.n_from + 3 {
        return Err(Error::InvalidQuery(format!(
            "need n_to >= n_from + 3, got [{}, {}]",
            cfg.n_from, cfg.n_to
        )));
    }
    if cfg.estimator == EstimatorKind::Corollary && query.d > 4 {
        return Err(Error::UnsupportedDegree { d: query.d });
    }
    let query = query.with_start(cfg.n_from);
    let (estimates, variant) = estimate_totals_at(params, &query, cfg, cfg.precision_bits)?;
    let estimate_fn = |p: u32| Ok(estimate_totals_at(params, &query, cfg, p)?.0);
    let measured = measured_rows(
        params,
        &query,
        cfg.n_to,
        &estimate_fn,
        &cfg.epsilon,
        cfg.precision_bits,
    )?;
    let p = cfg.precision_bits;
    let mut rows: Vec<ExperimentRow> = Vec::with_capacity(measured.len());
    for (j, m) in measured.into_iter().enumerate() {
        let ratio = if j > 0 {
            let prev: &ExperimentRow = &rows[j - 1];
            if prev.abs_error.is_positive() && prev.flags.is_empty() && m.flags.is_empty() {
                Some(m.abs_error.div(&prev.abs_error, p))
            } else {
                None
            }
        } else {
            None
        };
        rows.push(ExperimentRow {
            n: m.n,
            inverse_tail: m.inv,
            inverse_error_bound: m.bound,
            estimate_total: estimates[j].clone(),
            error: m.error,
            abs_error: m.abs_error,
            ratio,
            flags: m.flags,
        });
    }
    Ok(ExperimentReport {
        params: *params,
        query,
        estimator: cfg.estimator,
        variant,
        precision_bits: cfg.precision_bits,
        epsilon: cfg.epsilon.clone(),
        rows,
    })
}

/// Convergence verdict per the harness criterion: the last three transitions
/// must decrease and the terminal error must be below 1e-3 of the initial
/// one. Rows at the rounding-noise floor count as converged.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceAssessment {
    pub converged: bool,
    pub monotone_last3: bool,
    pub decay_ok: bool,
    pub exact_agreement: bool,
    pub certified: bool,
    pub initial_abs_error: Real,
    pub terminal_abs_error: Real,
}

pub fn assess_convergence(rows: &[ExperimentRow], precision_bits: u32) -> ConvergenceAssessment {
    let p = precision_bits;
    let floor_scale = Real::pow2(-(p as i64) + 40, p);
    let at_floor = |r: &ExperimentRow| -> bool {
        r.flags.iter().any(|f| f == FLAG_NOISE_FLOOR)
            || r.abs_error
                .le(&r.estimate_total.abs().mul(&floor_scale, p))
    };
    let swamped = |r: &ExperimentRow| r.flags.iter().any(|f| f == FLAG_BOUND_SWAMPS);
    let certified = !rows.iter().any(swamped);
    let exact_agreement = rows.iter().all(|r| at_floor(r) && !swamped(r));

    let k = rows.len();
    let mut monotone_last3 = k >= 4;
    if k >= 4 {
        for i in k - 3..k {
            let prev = &rows[i - 1];
            let cur = &rows[i];
            let ok = at_floor(cur) || cur.abs_error.lt(&prev.abs_error);
            monotone_last3 &= ok;
        }
    }
    let first = &rows[0];
    let last = &rows[k - 1];
    let thousandth = Real::from_decimal_str("1e-3", p).expect("constant");
    let decay_ok = at_floor(last)
        || last
            .abs_error
            .lt(&first.abs_error.mul(&thousandth, p));
    let converged = certified && monotone_last3 && decay_ok;
    ConvergenceAssessment {
        converged,
        monotone_last3,
        decay_ok,
        exact_agreement,
        certified,
        initial_abs_error: first.abs_error.clone(),
        terminal_abs_error: last.abs_error.clone(),
    }
}

/// Runs the experiment on the configured window, extending n_to in steps of
/// 10 (up to `max_n_to`) until the convergence criterion is decidable. The
/// error decay per step is |beta|^(m d)-geometric, so slow cells (|beta|
/// near 1) genuinely need the longer window.
pub fn run_until_converged(
    params: &SequenceParams,
    query: &SubseqQuery,
    cfg: &ExperimentConfig,
    max_n_to: u64,
) -> Result<(ExperimentReport, ConvergenceAssessment), Error> {
    let mut cfg = cfg.clone();
    loop {
        let report = convergence_experiment(params, query, &cfg)?;
        let assessment = assess_convergence(&report.rows, cfg.precision_bits);
        if assessment.converged || cfg.n_to + 10 > max_n_to {
            return Ok((report, assessment));
        }
        cfg.n_to += 10;
    }
}

/// Least-squares decay fit on (n, ln abs_error).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecayFit {
    pub fitted_rho: f64,
    pub expected_rho_hint: f64,
    pub r_squared: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub enum DecayOutcome {
    Fit(DecayFit),
    /// All rows sit at the rounding floor; the fit is undefined.
    ExactAgreement,
}

/// Informational decay-rate hint: the exponent of the dominant dropped term.
pub fn expected_decay_hint(
    params: &SequenceParams,
    query: &SubseqQuery,
    estimator: EstimatorKind,
) -> Result<f64, Error> {
    let ctx = build_context(params, 192)?;
    let lb = ctx.beta.abs().ln_f64();
    let la = ctx.alpha.ln_f64();
    let m = query.m as f64;
    let d = query.d as f64;
    Ok(match estimator {
        EstimatorKind::Theorem => m * d * lb,
        EstimatorKind::Corollary => match query.d {
            1 => m * lb,
            2 => 2.0 * m * lb,
            3 => (3.0 * m * lb).max(m * (4.0 * lb - la)),
            _ => (d * m * lb).max(m * ((d + 1.0) * lb - la)),
        },
    })
}

pub fn decay_rate(rows: &[ExperimentRow], expected_rho_hint: f64) -> Result<DecayOutcome, Error> {
    // exclude flagged rows and rows whose error is precision noise
    let usable: Vec<&ExperimentRow> = rows
        .iter()
        .filter(|r| {
            let p = r.estimate_total.prec();
            let floor = r
                .estimate_total
                .abs()
                .mul(&Real::pow2(-(p as i64) + 40, p), p);
            r.flags.is_empty() && r.abs_error.gt(&floor)
        })
        .collect();
    if usable.is_empty() && rows.iter().all(|r| !r.flags.iter().any(|f| f == FLAG_BOUND_SWAMPS)) {
        return Ok(DecayOutcome::ExactAgreement);
    }
    if usable.len() < 4 {
        return Err(Error::TooFewRows { have: usable.len(), need: 4 });
    }
    let xs: Vec<f64> = usable.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = usable.iter().map(|r| r.abs_error.ln_f64()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::TooFewRows { have: 1, need: 4 });
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 0.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(DecayOutcome::Fit(DecayFit {
        fitted_rho: slope,
        expected_rho_hint,
        r_squared,
    }))
}
