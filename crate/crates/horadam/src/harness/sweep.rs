//! Grid sweeps: theorem-vs-corollary agreement and convergence to the
//! measured inverse tail over the full validated parameter grid.

use rayon::prelude::*;
use serde::Serialize;

use crate::estimate::VariantSet;
use crate::params::{SequenceParams, SubseqQuery};
use crate::real::Real;
use crate::validate::validate;

use super::experiment::{
    assess_convergence, convergence_experiment, ConvergenceAssessment, EstimatorKind,
    ExperimentConfig,
};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepCell {
    pub params: SequenceParams,
    pub m: u32,
    pub l: i64,
    pub d: u32,
    pub alternating: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepCellResult {
    pub cell: SweepCell,
    pub n_to_used: u64,
    pub theorem: ConvergenceAssessment,
    pub corollary: ConvergenceAssessment,
    pub diff_monotone_last3: bool,
    pub ok: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub n_from: u64,
    pub n_to: u64,
    /// Window extension cap for slow-decay cells (|beta| close to 1).
    pub max_n_to: u64,
    pub precision_bits: u32,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { n_from: 6, n_to: 16, max_n_to: 66, precision_bits: 256 }
    }
}

/// The standard grid: p in [1,4], every q passing validation, seeds
/// |a|,|b| <= 2 with c1 != 0, m in {1,2,3}, l in {1-m, 0, 1}, d in 1..=4,
/// both families.
pub fn standard_grid() -> Vec<SweepCell> {
    let mut cells = Vec::new();
    for p in 1i64..=4 {
        for q in -9i64..=9 {
            for a in -2i64..=2 {
                for b in -2i64..=2 {
                    let params = SequenceParams::new(a, b, p, q);
                    if !validate(&params).ok {
                        continue;
                    }
                    for m in 1u32..=3 {
                        let mut ls = vec![1 - m as i64, 0, 1];
                        ls.dedup();
                        for l in ls {
                            for d in 1u32..=4 {
                                for alternating in [false, true] {
                                    cells.push(SweepCell {
                                        params,
                                        m,
                                        l,
                                        d,
                                        alternating,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    cells
}

/// Evaluates one cell: runs both estimators on a shared window, extending it
/// until the convergence criterion is decidable, and checks that the
/// theorem-corollary gap shrinks over the last three rows.
pub fn run_cell(cell: &SweepCell, cfg: &SweepConfig) -> SweepCellResult {
    let p = cfg.precision_bits;
    let query = match SubseqQuery::new(cell.m, cell.l, cell.d, cfg.n_from, cell.alternating) {
        Ok(q) => q,
        Err(e) => return failed_cell(cell, cfg.n_from, e.to_string()),
    };
    let mut n_to = cfg.n_to;
    loop {
        let mk_cfg = |estimator| ExperimentConfig {
            n_from: cfg.n_from,
            n_to,
            precision_bits: p,
            epsilon: Real::from_decimal_str("1e-30", p).expect("constant"),
            estimator,
            variants: VariantSet::default(),
        };
        let thm_report = match convergence_experiment(&cell.params, &query, &mk_cfg(EstimatorKind::Theorem)) {
            Ok(r) => r,
            Err(e) => return failed_cell(cell, n_to, e.to_string()),
        };
        let cor_report = match convergence_experiment(&cell.params, &query, &mk_cfg(EstimatorKind::Corollary)) {
            Ok(r) => r,
            Err(e) => return failed_cell(cell, n_to, e.to_string()),
        };
        let thm = assess_convergence(&thm_report.rows, p);
        let cor = assess_convergence(&cor_report.rows, p);

        // |theorem - corollary| over the last three transitions, tail-free
        let floor_scale = Real::pow2(-(p as i64) + 40, p);
        let k = thm_report.rows.len();
        let diff_at = |i: usize| -> Real {
            thm_report.rows[i]
                .estimate_total
                .sub(&cor_report.rows[i].estimate_total, p)
                .abs()
        };
        let mut diff_monotone = true;
        for i in k - 3..k {
            let cur = diff_at(i);
            let prev = diff_at(i - 1);
            let floor = thm_report.rows[i]
                .estimate_total
                .abs()
                .mul(&floor_scale, p);
            diff_monotone &= cur.lt(&prev) || cur.le(&floor);
        }

        let ok = thm.converged && cor.converged && diff_monotone;
        if ok || n_to + 10 > cfg.max_n_to {
            return SweepCellResult {
                cell: *cell,
                n_to_used: n_to,
                theorem: thm,
                corollary: cor,
                diff_monotone_last3: diff_monotone,
                ok,
                note: None,
            };
        }
        n_to += 10;
    }
}

fn failed_cell(cell: &SweepCell, n_to: u64, note: String) -> SweepCellResult {
    let zero = ConvergenceAssessment {
        converged: false,
        monotone_last3: false,
        decay_ok: false,
        exact_agreement: false,
        certified: false,
        initial_abs_error: Real::zero(64),
        terminal_abs_error: Real::zero(64),
    };
    SweepCellResult {
        cell: *cell,
        n_to_used: n_to,
        theorem: zero.clone(),
        corollary: zero,
        diff_monotone_last3: false,
        ok: false,
        note: Some(note),
    }
}

/// Runs cells in parallel, preserving the input order.
pub fn run_sweep(cells: &[SweepCell], cfg: &SweepConfig) -> Vec<SweepCellResult> {
    cells.par_iter().map(|c| run_cell(c, cfg)).collect()
}

/// Summary CSV, one line per cell.
pub fn sweep_csv(results: &[SweepCellResult]) -> String {
    let mut out = String::from(
        "a,b,p,q,m,l,d,alternating,n_to_used,theorem_converged,corollary_converged,diff_monotone_last3,ok,terminal_abs_error,note\n",
    );
    for r in results {
        let c = &r.cell;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            c.params.a,
            c.params.b,
            c.params.p,
            c.params.q,
            c.m,
            c.l,
            c.d,
            c.alternating,
            r.n_to_used,
            r.theorem.converged,
            r.corollary.converged,
            r.diff_monotone_last3,
            r.ok,
            r.corollary.terminal_abs_error.to_decimal_default(),
            r.note.as_deref().unwrap_or(""),
        ));
    }
    out
}

/// Validity filter used by `standard_grid`; exposed for tests.
pub fn valid_pq_pairs() -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for p in 1i64..=4 {
        for q in -9i64..=9 {
            if validate(&SequenceParams::new(0, 1, p, q)).ok {
                out.push((p, q));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let pq = valid_pq_pairs();
        assert_eq!(
            pq,
            vec![
                (1, 1),
                (2, 0),
                (2, 1),
                (2, 2),
                (3, -1),
                (3, 0),
                (3, 1),
                (3, 2),
                (3, 3),
                (4, -2),
                (4, -1),
                (4, 0),
                (4, 1),
                (4, 2),
                (4, 3),
                (4, 4)
            ]
        );
        let cells = standard_grid();
        // m=1 contributes 2 distinct l values, m=2 and m=3 three each
        assert!(cells.len() > 20_000, "got {}", cells.len());
        // no cell with c1 = 0 slipped through
        assert!(cells
            .iter()
            .all(|c| validate(&c.params).ok));
    }

    #[test]
    fn single_cell_runs() {
        let cell = SweepCell {
            params: SequenceParams::new(0, 1, 1, 1),
            m: 1,
            l: 0,
            d: 2,
            alternating: false,
        };
        let r = run_cell(&cell, &SweepConfig::default());
        assert!(r.ok, "{r:?}");
        assert_eq!(r.n_to_used, 16);
    }

    #[test]
    fn slow_cell_extends_window() {
        // (4,4): |beta| = 0.828, d=1 decay over 10 steps is only 0.15
        let cell = SweepCell {
            params: SequenceParams::new(0, 1, 4, 4),
            m: 1,
            l: 0,
            d: 1,
            alternating: false,
        };
        let r = run_cell(&cell, &SweepConfig::default());
        assert!(r.ok, "{r:?}");
        assert!(r.n_to_used > 16, "needed window extension, used {}", r.n_to_used);
    }
}
