//! Report serialization: CSV rows and the JSON form with metadata.

use super::experiment::ExperimentReport;
use crate::real::decimal_digits_for;

/// CSV with the columns n, inverse_tail, inverse_error_bound,
/// estimate_total, error, ratio, flags. Reals carry the digit count implied
/// by the report precision, so output is byte-stable.
pub fn experiment_csv(report: &ExperimentReport) -> String {
    let digits = decimal_digits_for(report.precision_bits);
    let mut out =
        String::from("n,inverse_tail,inverse_error_bound,estimate_total,error,ratio,flags\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            r.inverse_tail.to_decimal_string(digits),
            r.inverse_error_bound.to_decimal_string(digits),
            r.estimate_total.to_decimal_string(digits),
            r.error.to_decimal_string(digits),
            r.ratio
                .as_ref()
                .map(|x| x.to_decimal_string(digits))
                .unwrap_or_default(),
            r.flags.join(";"),
        ));
    }
    out
}

/// JSON with rows plus metadata (params, query, estimator, variant,
/// precision, epsilon).
pub fn experiment_json(report: &ExperimentReport) -> String {
    serde_json::to_string_pretty(report).expect("report serialization")
}
