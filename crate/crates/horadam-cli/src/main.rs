//! Command-line front end: validation, term generation, tail computation,
//! estimation, convergence experiments, cross-checks, variant resolution,
//! and grid sweeps.
//!
//! Exit codes: 0 success, 1 validation failure or library error, 2 usage
//! error, 3 convergence-check failure.

use std::io::Write;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use horadam::binet::build_context;
use horadam::estimate::{
    corollary_estimate_alternating, corollary_estimate_plain, theorem_estimate_alternating,
    theorem_estimate_plain, EstimateBreakdown, VariantSet,
};
use horadam::harness::{
    assess_convergence, convergence_experiment, cross_check_intro, decay_rate,
    expected_decay_hint, experiment_csv, experiment_json, remark_specialization_check,
    resolve_variant, run_sweep, standard_grid, sweep_csv, EstimatorKind,
    ExperimentConfig, IntroCase, SweepConfig,
};
use horadam::real::decimal_digits_for;
use horadam::seq::term_block;
use horadam::tail::{default_epsilon, inverse_tail, tail_sum};
use horadam::validate::validate;
use horadam::{Preset, Real, SequenceParams, SubseqQuery};

#[derive(Parser)]
#[command(
    name = "horadam",
    version,
    about = "Reciprocal-sum tails of Horadam subsequences and their asymptotic estimates"
)]
struct Cli {
    /// Working precision in bits
    #[arg(long, global = true, env = "HORADAM_PRECISION_BITS", default_value_t = 256)]
    precision: u32,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Output path (defaults to standard output)
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct ParamArgs {
    /// Named sequence: fibonacci, lucas, or pell
    #[arg(long, conflicts_with_all = ["a", "b", "p", "q"])]
    preset: Option<String>,
    #[arg(short, allow_hyphen_values = true)]
    a: Option<i64>,
    #[arg(short, allow_hyphen_values = true)]
    b: Option<i64>,
    #[arg(short, allow_hyphen_values = true)]
    p: Option<i64>,
    #[arg(short, allow_hyphen_values = true)]
    q: Option<i64>,
}

impl ParamArgs {
    fn resolve(&self) -> Result<SequenceParams, RunError> {
        match (&self.preset, self.a, self.b, self.p, self.q) {
            (Some(name), None, None, None, None) => Preset::from_str(name)
                .map(Preset::params)
                .map_err(|e| RunError::Usage(e.to_string())),
            (None, Some(a), Some(b), Some(p), Some(q)) => Ok(SequenceParams::new(a, b, p, q)),
            _ => Err(RunError::Usage(
                "specify either --preset or all of -a -b -p -q".to_string(),
            )),
        }
    }
}

#[derive(Args)]
struct QueryArgs {
    /// Subsequence stride m >= 1
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Subsequence offset l >= 1-m
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    l: i64,
    /// Reciprocal power d >= 1
    #[arg(long, default_value_t = 1)]
    d: u32,
    /// Alternating signs (-1)^k
    #[arg(long, default_value_t = false)]
    alternating: bool,
}

impl QueryArgs {
    fn query(&self, n: u64) -> Result<SubseqQuery, RunError> {
        SubseqQuery::new(self.m, self.l, self.d, n, self.alternating)
            .map_err(|e| RunError::Usage(e.to_string()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the estimation hypotheses for a parameter set
    Validate(ParamArgs),
    /// Print a block of exact sequence terms
    Terms {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 0)]
        start: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Sum a reciprocal tail with a rigorous truncation bound
    Tail {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        query: QueryArgs,
        /// Tail start index
        #[arg(long, default_value_t = 10)]
        n: u64,
        /// Truncation target (decimal, e.g. 1e-30); default 2^-(P/2)
        #[arg(long)]
        eps: Option<String>,
    },
    /// Evaluate an asymptotic estimate with its correction breakdown
    Estimate {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, default_value_t = 10)]
        n: u64,
        #[arg(long, default_value = "corollary")]
        estimator: String,
        /// Variant tag override (e.g. proof_C, printed_D, with_c1sq_G)
        #[arg(long)]
        variant: Option<String>,
    },
    /// Run a convergence experiment over a range of tail starts
    Converge {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, default_value_t = 6)]
        n_from: u64,
        #[arg(long, default_value_t = 16)]
        n_to: u64,
        #[arg(long, default_value = "corollary")]
        estimator: String,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        variant: Option<String>,
    },
    /// Cross-check a published special case, or the specialization forms
    Crosscheck {
        /// Published case id (e.g. lee_d1, hwang_d4, yuan_d3)
        #[arg(long, conflicts_with = "remark")]
        case: Option<String>,
        /// Compare named-constant and specialization estimates instead
        #[arg(long, default_value_t = false)]
        remark: bool,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long, default_value_t = 6)]
        n_from: u64,
        #[arg(long, default_value_t = 16)]
        n_to: u64,
    },
    /// Resolve ambiguous published constants by convergence evidence
    Resolve {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        query: QueryArgs,
        /// Comma-separated candidate tags, e.g. statement_C,proof_C
        #[arg(long)]
        candidates: String,
        #[arg(long, default_value_t = 6)]
        n_from: u64,
        #[arg(long, default_value_t = 16)]
        n_to: u64,
    },
    /// Run convergence experiments over the standard parameter grid
    Sweep {
        /// Evaluate every k-th grid cell
        #[arg(long, default_value_t = 1)]
        step: usize,
        #[arg(long, default_value_t = 6)]
        n_from: u64,
        #[arg(long, default_value_t = 16)]
        n_to: u64,
    },
}

enum RunError {
    Usage(String),
    Library(horadam::Error),
}

impl From<horadam::Error> for RunError {
    fn from(e: horadam::Error) -> Self {
        RunError::Library(e)
    }
}

const EXIT_OK: u8 = 0;
const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

fn emit(cli: &Cli, text: String) -> Result<(), RunError> {
    match &cli.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| RunError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| {
                    if text.ends_with('\n') {
                        Ok(())
                    } else {
                        out.write_all(b"\n")
                    }
                })
                .map_err(|e| RunError::Usage(format!("cannot write output: {e}")))
        }
    }
}

fn parse_eps(eps: &Option<String>, precision: u32) -> Result<Real, RunError> {
    match eps {
        Some(s) => {
            Real::from_decimal_str(s, precision).map_err(|e| RunError::Usage(e.to_string()))
        }
        None => Ok(default_epsilon(precision)),
    }
}

fn variants_from(tag: &Option<String>) -> Result<VariantSet, RunError> {
    match tag {
        Some(t) => VariantSet::from_tag(t).map_err(RunError::from),
        None => Ok(VariantSet::default()),
    }
}

fn breakdown_csv(b: &EstimateBreakdown, digits: usize) -> String {
    let mut s = String::from("field,value\n");
    s.push_str(&format!("main,{}\n", b.main.to_decimal_string(digits)));
    for c in &b.corrections {
        s.push_str(&format!("{},{}\n", c.name, c.value.to_decimal_string(digits)));
    }
    s.push_str(&format!("total,{}\n", b.total.to_decimal_string(digits)));
    s.push_str(&format!(
        "dropped_scale,{}\n",
        b.dropped_scale.to_decimal_string(digits)
    ));
    s.push_str(&format!("variant,{}\n", b.variant));
    s
}

fn run(cli: &Cli) -> Result<u8, RunError> {
    let precision = cli.precision;
    match &cli.command {
        Command::Validate(params) => {
            let params = params.resolve()?;
            let report = validate(&params);
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&report).expect("report json"),
                Format::Csv => {
                    let mut s = String::from("check,passed,diagnostic\n");
                    for c in &report.checks {
                        s.push_str(&format!("{},{},{}\n", c.name, c.passed, c.diagnostic));
                    }
                    s
                }
            };
            emit(cli, text)?;
            Ok(if report.ok { EXIT_OK } else { EXIT_FAILED })
        }

        Command::Terms { params, start, count } => {
            let params = params.resolve()?;
            let terms = term_block(&params, *start, *count);
            let text = match cli.format {
                Format::Json => {
                    let strings: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
                    serde_json::to_string_pretty(&serde_json::json!({
                        "params": params,
                        "start": start,
                        "terms": strings,
                    }))
                    .expect("terms json")
                }
                Format::Csv => {
                    let mut s = String::from("n,term\n");
                    for (j, t) in terms.iter().enumerate() {
                        s.push_str(&format!("{},{t}\n", start + j as u64));
                    }
                    s
                }
            };
            emit(cli, text)?;
            Ok(EXIT_OK)
        }

        Command::Tail { params, query, n, eps } => {
            let params = params.resolve()?;
            let query = query.query(*n)?;
            let eps = parse_eps(eps, precision)?;
            let tail = tail_sum(&params, &query, &eps, precision)?;
            let (inv, inv_err) = inverse_tail(&tail)?;
            let digits = decimal_digits_for(precision);
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                    "params": params,
                    "query": query,
                    "tail": tail,
                    "inverse": inv.to_decimal_string(digits),
                    "inverse_error_bound": inv_err.to_decimal_string(digits),
                }))
                .expect("tail json"),
                Format::Csv => format!(
                    "field,value\nvalue,{}\ntruncation_bound,{}\nterms_used,{}\ninverse,{}\ninverse_error_bound,{}\n",
                    tail.value.to_decimal_string(digits),
                    tail.truncation_bound.to_decimal_string(digits),
                    tail.terms_used,
                    inv.to_decimal_string(digits),
                    inv_err.to_decimal_string(digits),
                ),
            };
            emit(cli, text)?;
            Ok(EXIT_OK)
        }

        Command::Estimate { params, query, n, estimator, variant } => {
            let params = params.resolve()?;
            let query = query.query(*n)?;
            let estimator =
                EstimatorKind::from_str(estimator).map_err(|e| RunError::Usage(e.to_string()))?;
            let variants = variants_from(variant)?;
            let ctx = build_context(&params, precision)?;
            let b = match (estimator, query.alternating) {
                (EstimatorKind::Theorem, false) => theorem_estimate_plain(&ctx, &query, *n)?,
                (EstimatorKind::Theorem, true) => {
                    theorem_estimate_alternating(&ctx, &query, *n)?
                }
                (EstimatorKind::Corollary, false) => {
                    corollary_estimate_plain(&ctx, &query, *n, &variants)?
                }
                (EstimatorKind::Corollary, true) => {
                    corollary_estimate_alternating(&ctx, &query, *n, &variants)?
                }
            };
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                    "params": params,
                    "query": query,
                    "n": n,
                    "estimator": estimator,
                    "breakdown": b,
                }))
                .expect("estimate json"),
                Format::Csv => breakdown_csv(&b, decimal_digits_for(precision)),
            };
            emit(cli, text)?;
            Ok(EXIT_OK)
        }

        Command::Converge { params, query, n_from, n_to, estimator, eps, variant } => {
            let params = params.resolve()?;
            let query = query.query(*n_from)?;
            let estimator =
                EstimatorKind::from_str(estimator).map_err(|e| RunError::Usage(e.to_string()))?;
            let cfg = ExperimentConfig {
                n_from: *n_from,
                n_to: *n_to,
                precision_bits: precision,
                epsilon: match eps {
                    Some(_) => parse_eps(eps, precision)?,
                    None => Real::from_decimal_str("1e-30", precision).expect("constant"),
                },
                estimator,
                variants: variants_from(variant)?,
            };
            let report = convergence_experiment(&params, &query, &cfg)?;
            let assessment = assess_convergence(&report.rows, precision);
            let hint = expected_decay_hint(&params, &query, estimator)?;
            let decay = decay_rate(&report.rows, hint).ok();
            let text = match cli.format {
                Format::Csv => experiment_csv(&report),
                Format::Json => {
                    let mut v: serde_json::Value =
                        serde_json::from_str(&experiment_json(&report)).expect("report value");
                    v["assessment"] = serde_json::to_value(&assessment).expect("assessment");
                    if let Some(d) = &decay {
                        v["decay"] = serde_json::to_value(d).expect("decay");
                    }
                    serde_json::to_string_pretty(&v).expect("converge json")
                }
            };
            emit(cli, text)?;
            Ok(if assessment.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
        }

        Command::Crosscheck { case, remark, params, m, d, n_from, n_to } => {
            if *remark {
                let params = params.resolve()?;
                let report =
                    remark_specialization_check(&params, *m, *d, *n_from, *n_to, precision)?;
                let ok = report.mutual_decreasing
                    && report.corollary_converged
                    && report.yuan_converged;
                let text = match cli.format {
                    Format::Json => serde_json::to_string_pretty(&report).expect("remark json"),
                    Format::Csv => {
                        let digits = decimal_digits_for(precision);
                        let mut s = String::from(
                            "n,corollary_total,yuan_total,inverse_tail,mutual_diff,flags\n",
                        );
                        for r in &report.rows {
                            s.push_str(&format!(
                                "{},{},{},{},{},{}\n",
                                r.n,
                                r.corollary_total.to_decimal_string(digits),
                                r.yuan_total.to_decimal_string(digits),
                                r.inverse_tail.to_decimal_string(digits),
                                r.mutual_diff.to_decimal_string(digits),
                                r.flags.join(";"),
                            ));
                        }
                        s
                    }
                };
                emit(cli, text)?;
                return Ok(if ok { EXIT_OK } else { EXIT_NOT_CONVERGED });
            }
            let case_name = case
                .as_deref()
                .ok_or_else(|| RunError::Usage("give --case or --remark".to_string()))?;
            let case =
                IntroCase::from_str(case_name).map_err(|e| RunError::Usage(e.to_string()))?;
            let report = cross_check_intro(case, *n_from, *n_to, precision)?;
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&report).expect("crosscheck json"),
                Format::Csv => {
                    let digits = decimal_digits_for(precision);
                    let mut s = String::from("n,inverse_tail,intro_estimate,abs_diff,flags\n");
                    for r in &report.rows {
                        s.push_str(&format!(
                            "{},{},{},{},{}\n",
                            r.n,
                            r.inverse_tail.to_decimal_string(digits),
                            r.intro_estimate.to_decimal_string(digits),
                            r.abs_diff.to_decimal_string(digits),
                            r.flags.join(";"),
                        ));
                    }
                    s
                }
            };
            emit(cli, text)?;
            Ok(if report.decreasing { EXIT_OK } else { EXIT_NOT_CONVERGED })
        }

        Command::Resolve { params, query, candidates, n_from, n_to } => {
            let params = params.resolve()?;
            let query = query.query(*n_from)?;
            let tags: Vec<String> = candidates.split(',').map(|s| s.trim().to_string()).collect();
            for t in &tags {
                VariantSet::tag_applies_to(t).map_err(|e| RunError::Usage(e.to_string()))?;
            }
            match resolve_variant(&params, &query, &tags, *n_from, *n_to, precision) {
                Ok(resolution) => {
                    let text = match cli.format {
                        Format::Json => {
                            serde_json::to_string_pretty(&resolution).expect("resolve json")
                        }
                        Format::Csv => {
                            let mut s = String::from(
                                "tag,converged,monotone_last3,initial_abs_error,terminal_abs_error,chosen\n",
                            );
                            for e in &resolution.evidence {
                                s.push_str(&format!(
                                    "{},{},{},{},{},{}\n",
                                    e.tag,
                                    e.converged,
                                    e.monotone_last3,
                                    e.initial_abs_error.to_decimal_default(),
                                    e.terminal_abs_error.to_decimal_default(),
                                    e.tag == resolution.chosen,
                                ));
                            }
                            s
                        }
                    };
                    emit(cli, text)?;
                    Ok(EXIT_OK)
                }
                Err(e @ horadam::Error::NoConvergentVariant(_)) => {
                    emit_error(cli, &e.to_string());
                    Ok(EXIT_NOT_CONVERGED)
                }
                Err(e) => Err(e.into()),
            }
        }

        Command::Sweep { step, n_from, n_to } => {
            if *step == 0 {
                return Err(RunError::Usage("--step must be >= 1".to_string()));
            }
            let cells: Vec<_> = standard_grid().into_iter().step_by(*step).collect();
            let cfg = SweepConfig {
                n_from: *n_from,
                n_to: *n_to,
                max_n_to: n_to + 50,
                precision_bits: precision,
            };
            let results = run_sweep(&cells, &cfg);
            let all_ok = results.iter().all(|r| r.ok);
            let text = match cli.format {
                Format::Csv => sweep_csv(&results),
                Format::Json => serde_json::to_string_pretty(&results).expect("sweep json"),
            };
            emit(cli, text)?;
            Ok(if all_ok { EXIT_OK } else { EXIT_NOT_CONVERGED })
        }
    }
}

fn emit_error(cli: &Cli, message: &str) {
    match cli.format {
        Format::Json => {
            let line = serde_json::to_string(&serde_json::json!({ "error": message }))
                .expect("error json");
            println!("{line}");
        }
        Format::Csv => eprintln!("error: {message}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(RunError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(RunError::Library(e)) => {
            emit_error(&cli, &e.to_string());
            ExitCode::from(EXIT_FAILED)
        }
    }
}
