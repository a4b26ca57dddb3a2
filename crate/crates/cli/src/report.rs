//! JSON and CSV forms of runs.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use sin2jp::engine::{Sin2Run, StepKind, StepRecord};
use sin2jp::matrix::IntMatrix3;
use sin2jp::periodicity::PeriodReport;
use sin2jp::transforms::JPTransform;

const EXACT_F64: i64 = 1 << 53;

/// Integers below 2^53 in magnitude become JSON numbers, larger ones strings.
pub fn int_value(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) if v.abs() < EXACT_F64 => Value::from(v),
        _ => Value::from(n.to_string()),
    }
}

pub fn parse_int_value(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

pub fn matrix_value(m: &IntMatrix3) -> Value {
    Value::Array(
        m.rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(int_value).collect()))
            .collect(),
    )
}

pub fn parse_matrix_value(v: &Value) -> Option<IntMatrix3> {
    let rows = v.as_array()?;
    if rows.len() != 3 {
        return None;
    }
    let mut m = IntMatrix3::identity();
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array()?;
        if row.len() != 3 {
            return None;
        }
        for (j, e) in row.iter().enumerate() {
            m.set(i, j, parse_int_value(e)?);
        }
    }
    Some(m)
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct StepJson {
    pub step: usize,
    pub stage: String,
    pub kind: String,
    pub params: Value,
    pub matrix: Value,
    pub sin2_approx: String,
    pub state_key_hash: String,
}

fn params(kind: &StepKind) -> Value {
    match kind {
        StepKind::SignedPermutation => serde_json::json!({}),
        StepKind::Separating { quotients } => {
            serde_json::json!({ "quotients": quotients.iter().map(int_value).collect::<Vec<_>>() })
        }
        StepKind::Sort { order } => serde_json::json!({ "order": order }),
        StepKind::Phi { choice, order } => match choice {
            JPTransform::V { alpha, beta, gamma } => {
                serde_json::json!({ "alpha": alpha, "beta": beta, "gamma": gamma, "order": order })
            }
            _ => serde_json::json!({ "order": order }),
        },
    }
}

impl From<&StepRecord> for StepJson {
    fn from(r: &StepRecord) -> Self {
        StepJson {
            step: r.index,
            stage: r.stage.to_string(),
            kind: r.kind.name().to_string(),
            params: params(&r.kind),
            matrix: matrix_value(&r.matrix),
            sin2_approx: r.sin2_approx.clone(),
            state_key_hash: r.state_key.short_hash(),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ChecksJson {
    pub commutes_with_a: bool,
    pub m1_unimodular: bool,
    pub charpoly_irreducible: bool,
    pub not_scalar: bool,
    pub state_key_recurrence: bool,
    pub determinism: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct PeriodJson {
    pub preperiod_len: usize,
    pub period_len: usize,
    pub m1: Value,
    pub m2: Value,
    pub certificate: Value,
    pub checks: ChecksJson,
}

impl PeriodJson {
    pub fn new(p: &PeriodReport, determinism: bool) -> Self {
        PeriodJson {
            preperiod_len: p.preperiod_len,
            period_len: p.period_len,
            m1: matrix_value(&p.m1),
            m2: matrix_value(&p.m2),
            certificate: matrix_value(&p.certificate),
            checks: ChecksJson {
                commutes_with_a: p.checks.commutes_with_a,
                m1_unimodular: p.checks.m1_unimodular,
                charpoly_irreducible: p.checks.charpoly_irreducible,
                not_scalar: p.checks.not_scalar,
                state_key_recurrence: p.checks.state_key_recurrence,
                determinism,
            },
        }
    }
}

/// How the input state was given; enough to rebuild it.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum InputJson {
    Matrix { matrix: String },
    Polynomial { poly: String, q1: String, q2: String },
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Sin2Report {
    pub status: String,
    pub input: InputJson,
    pub root: usize,
    pub field_polynomial: String,
    pub discriminant: String,
    /// Matrix the certificate is checked against.
    pub a: Value,
    pub report_digits: u32,
    pub steps: Vec<StepJson>,
    pub descents: usize,
    pub period: Option<PeriodJson>,
    pub failed_check: Option<String>,
}

impl Sin2Report {
    pub fn new(status: &str, input: InputJson, a: &IntMatrix3, run: &Sin2Run, digits: u32) -> Self {
        let field = run.origin.field();
        Sin2Report {
            status: status.to_string(),
            input,
            root: run.origin.xi_root(),
            field_polynomial: field.polynomial().to_string(),
            discriminant: field.discriminant().to_string(),
            a: matrix_value(a),
            report_digits: digits,
            steps: run.records.iter().map(StepJson::from).collect(),
            descents: run.descents(),
            period: run
                .period
                .as_ref()
                .map(|p| PeriodJson::new(p, run.determinism.unwrap_or(false))),
            failed_check: None,
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_row(fields: &[String]) -> String {
    fields.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(",")
}

pub const STEP_CSV_HEADER: &str = "step,stage,kind,params,matrix,sin2_approx,state_key_hash";

pub fn step_csv(s: &StepJson) -> String {
    let matrix = parse_matrix_value(&s.matrix).map(|m| m.to_string()).unwrap_or_default();
    csv_row(&[
        s.step.to_string(),
        s.stage.clone(),
        s.kind.clone(),
        s.params.to_string(),
        matrix,
        s.sin2_approx.clone(),
        s.state_key_hash.clone(),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_entries_become_strings() {
        let small = BigInt::from(EXACT_F64 - 1);
        let big = BigInt::from(EXACT_F64);
        assert!(int_value(&small).is_number());
        assert_eq!(int_value(&big), Value::from("9007199254740992"));
        assert_eq!(int_value(&-&big), Value::from("-9007199254740992"));
        assert_eq!(parse_int_value(&int_value(&big)), Some(big));
    }

    #[test]
    fn matrix_round_trip() {
        let m: IntMatrix3 = "0,0,1;1,-15,-9;-9,136,66".parse().unwrap();
        assert_eq!(parse_matrix_value(&matrix_value(&m)), Some(m));
        assert_eq!(parse_matrix_value(&serde_json::json!([[1, 2], [3]])), None);
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_row(&["a".into(), "1,2".into(), "say \"x\"".into()]), "a,\"1,2\",\"say \"\"x\"\"\"");
    }
}
