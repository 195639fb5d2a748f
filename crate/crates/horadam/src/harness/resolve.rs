//! Empirical resolution of the ambiguous published constants: run the
//! convergence experiment once per candidate form and keep the one whose
//! error actually vanishes.

use serde::Serialize;

use crate::error::Error;
use crate::estimate::VariantSet;
use crate::params::{SequenceParams, SubseqQuery};
use crate::real::Real;

use super::experiment::{
    assess_convergence, convergence_experiment, EstimatorKind, ExperimentConfig,
};

#[derive(Clone, Debug, Serialize)]
pub struct VariantEvidence {
    pub tag: String,
    pub converged: bool,
    pub monotone_last3: bool,
    pub initial_abs_error: Real,
    pub terminal_abs_error: Real,
    pub n_to_used: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VariantResolution {
    pub chosen: String,
    pub evidence: Vec<VariantEvidence>,
}

/// Runs one experiment per candidate tag and chooses the variant whose error
/// decreases monotonically and attains the smallest terminal error. Errors
/// out with the full evidence table if no candidate converges.
pub fn resolve_variant(
    params: &SequenceParams,
    query: &SubseqQuery,
    candidates: &[String],
    n_from: u64,
    n_to: u64,
    precision_bits: u32,
) -> Result<VariantResolution, Error> {
    if candidates.len() < 2 {
        return Err(Error::NothingToResolve);
    }
    for tag in candidates {
        let (d, alt) = VariantSet::tag_applies_to(tag)?;
        if d != query.d || alt != query.alternating {
            return Err(Error::InvalidQuery(format!(
                "variant `{tag}` does not apply to d={}, alternating={}",
                query.d, query.alternating
            )));
        }
    }

    // All candidates are judged on the same window; extend it together when
    // none has converged yet (slow-decay parameter sets).
    let mut window_to = n_to;
    let max_window = n_to + 20;
    loop {
        let mut evidence = Vec::with_capacity(candidates.len());
        let mut best: Option<(usize, Real)> = None;
        for (i, tag) in candidates.iter().enumerate() {
            let cfg = ExperimentConfig {
                n_from,
                n_to: window_to,
                precision_bits,
                epsilon: Real::from_decimal_str("1e-30", precision_bits).expect("constant"),
                estimator: EstimatorKind::Corollary,
                variants: VariantSet::from_tag(tag)?,
            };
            let report = convergence_experiment(params, query, &cfg)?;
            let a = assess_convergence(&report.rows, precision_bits);
            if a.converged {
                let better = match &best {
                    None => true,
                    Some((_, t)) => a.terminal_abs_error.lt(t),
                };
                if better {
                    best = Some((i, a.terminal_abs_error.clone()));
                }
            }
            evidence.push(VariantEvidence {
                tag: tag.clone(),
                converged: a.converged,
                monotone_last3: a.monotone_last3,
                initial_abs_error: a.initial_abs_error,
                terminal_abs_error: a.terminal_abs_error,
                n_to_used: window_to,
            });
        }
        if let Some((i, _)) = best {
            return Ok(VariantResolution { chosen: candidates[i].clone(), evidence });
        }
        if window_to + 10 > max_window {
            let table = serde_json::to_string(&evidence).unwrap_or_default();
            return Err(Error::NoConvergentVariant(table));
        }
        window_to += 10;
    }
}
