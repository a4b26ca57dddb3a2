use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use sin2jp::engine::{
    find_repetition, run_classical_jp, run_sin2, EngineError, JpOptions, Limits, DEFAULT_MAX_STEPS,
    DEFAULT_REPORT_DIGITS,
};
use sin2jp::field::CubicPolynomial;
use sin2jp::matrix::IntMatrix3;
use sin2jp::numeric::NumericLiteral;
use sin2jp::periodicity::certify;
use sin2jp::states::{state_from_matrix, state_from_polynomials, CubicState, RootChoice, StateError};

use crate::exit;
use crate::report::{
    int_value, parse_matrix_value, step_csv, InputJson, Sin2Report, StepJson, STEP_CSV_HEADER,
};
use crate::survey::{instances, run_survey, Outcome, CSV_HEADER, MAX_ENTRY};

#[derive(Parser, Debug)]
#[command(name = "sin2jp", version, about = "sin²-Jacobi–Perron continued fractions for totally-real cubic vectors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the sin² algorithm on the eigenvectors of a matrix or on (q₁(θ), q₂(θ), 1).
    Sin2 {
        /// Rows separated by ';', entries by ',', e.g. "0,0,1;1,-15,-9;-9,136,66".
        #[arg(long, conflicts_with = "poly")]
        matrix: Option<String>,
        /// Cubic coefficients, highest degree first, e.g. "1,0,-4,1".
        #[arg(long, requires_all = ["q1", "q2"])]
        poly: Option<String>,
        /// Quadratic coefficients, highest degree first.
        #[arg(long)]
        q1: Option<String>,
        #[arg(long)]
        q2: Option<String>,
        /// Root index (0-2, ascending) carrying ξ; defaults to the largest.
        #[arg(long)]
        root: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        #[arg(long, default_value_t = DEFAULT_REPORT_DIGITS)]
        report_digits: u32,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Classical Jacobi–Perron on certified enclosures.
    Jp {
        /// Three comma-separated literals: integers, decimals, p/q, sqrt(n), cbrt(n).
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Starting working precision in bits (doubled on demand).
        #[arg(long, env = "SIN2JP_PRECISION_BITS", default_value_t = 256)]
        precision_bits: u64,
        /// Largest precision tried before giving up.
        #[arg(long, default_value_t = 1 << 16)]
        max_precision_bits: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Re-check the certificate of a stored sin2 JSON report.
    Verify { report: PathBuf },
    /// Run random instances in parallel and write a CSV summary.
    Survey {
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Main-stage step budget per instance.
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        budget: usize,
        #[arg(long, default_value_t = MAX_ENTRY)]
        max_entry: i64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Sin2 {
            matrix,
            poly,
            q1,
            q2,
            root,
            max_steps,
            report_digits,
            output,
            format,
        } => {
            let input = match (matrix, poly) {
                (Some(m), _) => Ok(InputJson::Matrix { matrix: m.clone() }),
                (None, Some(p)) => Ok(InputJson::Polynomial {
                    poly: p.clone(),
                    q1: q1.clone().unwrap_or_default(),
                    q2: q2.clone().unwrap_or_default(),
                }),
                (None, None) => Err(Failure::invalid("one of --matrix or --poly is required")),
            };
            let limits = Limits {
                max_steps: *max_steps,
                report_digits: *report_digits,
                ..Limits::default()
            };
            input.and_then(|input| cmd_sin2(&input, *root, &limits, output.as_deref(), *format))
        }
        Command::Jp {
            vector,
            steps,
            precision_bits,
            max_precision_bits,
            output,
            format,
        } => cmd_jp(vector, *steps, *precision_bits, *max_precision_bits, output.as_deref(), *format),
        Command::Verify { report } => cmd_verify(report),
        Command::Survey {
            count,
            seed,
            budget,
            max_entry,
            output,
        } => cmd_survey(*count, *seed, *budget, *max_entry, output.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: exit::INVALID_INPUT,
            message: message.into(),
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::invalid(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_ints(s: &str) -> Option<Vec<BigInt>> {
    s.split(',').map(|t| t.trim().parse().ok()).collect()
}

fn parse_quadratic(s: &str) -> Option<[BigRational; 3]> {
    let mut desc: Vec<BigRational> = s
        .split(',')
        .map(|t| match t.trim().parse::<NumericLiteral>() {
            Ok(NumericLiteral::Rational(q)) => Some(q),
            _ => None,
        })
        .collect::<Option<_>>()?;
    if desc.is_empty() || desc.len() > 3 {
        return None;
    }
    desc.reverse();
    desc.resize(3, BigRational::zero());
    Some([desc[0].clone(), desc[1].clone(), desc[2].clone()])
}

/// The input state and the matrix its certificate is checked against.
fn build_input(input: &InputJson, root: Option<usize>) -> Result<(CubicState, IntMatrix3), Failure> {
    let choice = root.map_or(RootChoice::Largest, RootChoice::Index);
    let state_err = |e: StateError| Failure::invalid(e.to_string());
    match input {
        InputJson::Matrix { matrix } => {
            let a: IntMatrix3 = matrix.parse().map_err(|e: sin2jp::matrix::ParseMatrixError| Failure::invalid(e.to_string()))?;
            let s = state_from_matrix(&a, choice).map_err(state_err)?;
            if a.det() == -BigInt::one() {
                eprintln!("warning: det(A) = -1");
            }
            Ok((s, a))
        }
        InputJson::Polynomial { poly, q1, q2 } => {
            let c = parse_ints(poly)
                .filter(|c| c.len() == 4)
                .ok_or_else(|| Failure::invalid(format!("bad cubic {poly:?}")))?;
            let p = CubicPolynomial::new([c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()])
                .map_err(|e| Failure::invalid(e.to_string()))?;
            let q1 = parse_quadratic(q1).ok_or_else(|| Failure::invalid(format!("bad quadratic {q1:?}")))?;
            let q2 = parse_quadratic(q2).ok_or_else(|| Failure::invalid(format!("bad quadratic {q2:?}")))?;
            let s = state_from_polynomials(&p, &q1, &q2, choice).map_err(state_err)?;
            let a = s.eigen_matrix();
            Ok((s, a))
        }
    }
}

fn cmd_sin2(input: &InputJson, root: Option<usize>, limits: &Limits, output: Option<&Path>, format: Format) -> Result<i32, Failure> {
    let (origin, a) = build_input(input, root)?;
    let digits = limits.report_digits;
    let (report, code) = match run_sin2(&origin, &a, limits) {
        Ok(run) => (Sin2Report::new("periodic", input.clone(), &a, &run, digits), exit::OK),
        Err(EngineError::BudgetExceeded { run, .. }) => {
            (Sin2Report::new("budget_exceeded", input.clone(), &a, &run, digits), exit::BUDGET_EXCEEDED)
        }
        Err(EngineError::CertificateFailed { failure, run }) => {
            let mut r = Sin2Report::new("certificate_failed", input.clone(), &a, &run, digits);
            r.failed_check = Some(failure.check.to_string());
            (r, exit::CERTIFICATE_FAILED)
        }
        Err(EngineError::Stage2Budget(n)) => {
            return Err(Failure {
                code: exit::BUDGET_EXCEEDED,
                message: format!("no separating basis after {n} blocks"),
            })
        }
        Err(e) => return Err(Failure::invalid(e.to_string())),
    };
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Csv => {
            let mut out = String::from(STEP_CSV_HEADER);
            out.push('\n');
            for s in &report.steps {
                out.push_str(&step_csv(s));
                out.push('\n');
            }
            out
        }
        Format::Text => sin2_text(&report),
    };
    emit(output, &text)?;
    Ok(code)
}

fn sin2_text(r: &Sin2Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "field: {} (discriminant {}), root {}", r.field_polynomial, r.discriminant, r.root);
    for s in &r.steps {
        let m = parse_matrix_value(&s.matrix).map(|m| m.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{:>6} {:<6} {:<18} {:<28} {}", s.step, s.stage, s.kind, m, s.sin2_approx);
    }
    match &r.period {
        Some(p) => {
            let _ = writeln!(out, "preperiod {} period {}", p.preperiod_len, p.period_len);
            let m = parse_matrix_value(&p.certificate).map(|m| m.to_string()).unwrap_or_default();
            let _ = writeln!(out, "certificate {m}");
        }
        None => {
            let _ = writeln!(out, "status {}", r.status);
        }
    }
    out
}

fn cmd_jp(vector: &str, steps: usize, bits: u64, max_bits: u64, output: Option<&Path>, format: Format) -> Result<i32, Failure> {
    if bits < 64 {
        return Err(Failure::invalid("precision must be at least 64 bits"));
    }
    let lits: Vec<NumericLiteral> = vector
        .split(',')
        .map(|s| s.parse().map_err(|e: sin2jp::numeric::ParseLiteralError| Failure::invalid(e.to_string())))
        .collect::<Result<_, _>>()?;
    let v: [NumericLiteral; 3] = lits
        .try_into()
        .map_err(|_| Failure::invalid("expected three coordinates"))?;
    let opts = JpOptions {
        initial_bits: bits,
        max_bits: max_bits.max(bits),
    };
    let run = match run_classical_jp(&v, steps, &opts) {
        Ok(run) => run,
        Err(e @ EngineError::PrecisionExhausted { .. }) => {
            return Err(Failure {
                code: exit::BUDGET_EXCEEDED,
                message: e.to_string(),
            })
        }
        Err(e) => return Err(Failure::invalid(e.to_string())),
    };
    let repetition = find_repetition(&run);
    let text = match format {
        Format::Json => {
            let pairs: Vec<_> = run.pairs.iter().map(|(a, b)| serde_json::json!([int_value(a), int_value(b)])).collect();
            let value = serde_json::json!({
                "vector": v.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
                "steps": run.pairs.len(),
                "precision_bits": run.bits,
                "terminated": run.terminated,
                "pairs": pairs,
                "repetition": repetition.map(|(i, j)| serde_json::json!({ "first": i, "second": j, "certified": false })),
            });
            serde_json::to_string_pretty(&value).expect("json") + "\n"
        }
        Format::Csv => {
            let mut out = String::from("step,a,b\n");
            for (i, (a, b)) in run.pairs.iter().enumerate() {
                let _ = writeln!(out, "{},{a},{b}", i + 1);
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for (a, b) in &run.pairs {
                let _ = writeln!(out, "({a}, {b})");
            }
            if run.terminated {
                let _ = writeln!(out, "terminated: y = 0");
            }
            match repetition {
                Some((i, j)) => {
                    let _ = writeln!(out, "possible repetition of states {i} and {j} (not certified)");
                }
                None => {
                    let _ = writeln!(out, "no repetition among {} states", run.states.len());
                }
            }
            let _ = writeln!(out, "precision {} bits", run.bits);
            out
        }
    };
    emit(output, &text)?;
    Ok(exit::OK)
}

fn cmd_verify(path: &Path) -> Result<i32, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    let report: Sin2Report = serde_json::from_str(&text).map_err(|e| Failure::invalid(format!("malformed report: {e}")))?;
    let (origin, _) = build_input(&report.input, Some(report.root))?;
    let a = parse_matrix_value(&report.a).ok_or_else(|| Failure::invalid("malformed matrix a"))?;
    let Some(period) = &report.period else {
        eprintln!("report has no period ({})", report.status);
        return Ok(exit::BUDGET_EXCEEDED);
    };
    let matrices = |steps: &[&StepJson]| -> Result<Vec<IntMatrix3>, Failure> {
        steps
            .iter()
            .map(|s| parse_matrix_value(&s.matrix).ok_or_else(|| Failure::invalid(format!("malformed matrix at step {}", s.step))))
            .collect()
    };
    let stage: Vec<&StepJson> = report.steps.iter().filter(|s| s.stage != "main").collect();
    let main: Vec<&StepJson> = report.steps.iter().filter(|s| s.stage == "main").collect();
    let (pre, len) = (period.preperiod_len, period.period_len);
    if main.len() < pre + len {
        return Err(Failure::invalid("report has fewer steps than its period claims"));
    }
    let mut prefix = matrices(&stage)?;
    prefix.extend(matrices(&main[..pre])?);
    let cycle = matrices(&main[pre..pre + len])?;
    match certify(&a, &origin, &prefix, &cycle, pre) {
        Ok(r) => {
            println!("certified: preperiod {} period {}", r.preperiod_len, r.period_len);
            Ok(exit::OK)
        }
        Err(f) => {
            eprintln!("CertificateFailed({})", f.check);
            Ok(exit::CERTIFICATE_FAILED)
        }
    }
}

fn cmd_survey(count: usize, seed: u64, budget: usize, max_entry: i64, output: Option<&Path>) -> Result<i32, Failure> {
    if max_entry < 1 {
        return Err(Failure::invalid("max entry must be positive"));
    }
    let matrices = instances(count, seed, max_entry);
    let limits = Limits {
        max_steps: budget,
        ..Limits::default()
    };
    let rows = run_survey(&matrices, &limits);
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &rows {
        out.push_str(&r.csv());
        out.push('\n');
    }
    emit(output, &out)?;
    let failed = rows.iter().any(|r| matches!(r.outcome, Outcome::CertificateFailed(_)));
    Ok(if failed { exit::CERTIFICATE_FAILED } else { exit::OK })
}
