//! JSON and CSV result documents.
//!
//! Probabilities and other reals are rounded to 12 significant digits and then
//! printed in shortest round-trip form, so output is byte-stable across runs
//! and platforms. JSON documents follow `schema/result.v1.json`.

use serde_json::{json, Map, Value};

use crate::execute::{has_efficiency, outcome_labels, Evaluation, Sampled, Tuning};
use crate::request::{Protocol, ProtocolParams};

pub const SCHEMA_VERSION: u32 = 1;

pub const PENROSE_NOTE: &str = "penrose: the bomb's trigger mirror replaces an interferometer mirror; \
the mathematics is identical to ev, where the mine blocks one arm of a tuned interferometer";

const EFFICIENCY_COLUMNS: [&str; 3] = ["efficiency", "single_shot_efficiency", "rounds_expected"];

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// JSON number for `x` after rounding; non-finite values become `null`.
pub fn number(x: f64) -> Value {
    serde_json::Number::from_f64(round12(x)).map_or(Value::Null, Value::Number)
}

fn csv_number(x: f64) -> String {
    number(x).to_string()
}

fn csv_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_u64() || n.is_i64() => n.to_string(),
        Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), csv_number),
        other => other.to_string(),
    }
}

fn header(kind: &str, protocol: Option<Protocol>) -> Map<String, Value> {
    let mut doc = Map::new();
    doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
    doc.insert("command".into(), json!(kind));
    if let Some(p) = protocol {
        doc.insert("protocol".into(), json!(p.name()));
    }
    doc
}

fn params_object(params: &ProtocolParams) -> Value {
    Value::Object(
        params
            .echo()
            .into_iter()
            .map(|(k, v)| {
                let v = match v {
                    Value::Number(n) if !n.is_u64() => number(n.as_f64().unwrap_or(f64::NAN)),
                    other => other,
                };
                (k.to_owned(), v)
            })
            .collect(),
    )
}

fn distribution_object(protocol: Protocol, eval: &Evaluation) -> Value {
    Value::Object(
        outcome_labels(protocol)
            .iter()
            .map(|l| (l.to_string(), number(eval.distribution.prob(l))))
            .collect(),
    )
}

fn insert_metrics(doc: &mut Map<String, Value>, protocol: Protocol, eval: &Evaluation) {
    doc.insert("distribution".into(), distribution_object(protocol, eval));
    if let Some(x) = eval.efficiency {
        doc.insert("efficiency".into(), number(x));
    }
    if let Some(x) = eval.single_shot_efficiency {
        doc.insert("single_shot_efficiency".into(), number(x));
    }
    if let Some(x) = eval.rounds_expected {
        doc.insert("rounds_expected".into(), number(x));
    }
    if let Some(post) = eval.post_system_state_on_chi_perp {
        let v = match post {
            Some(ifm_core::SystemState::Psi) => json!("psi"),
            Some(ifm_core::SystemState::PsiPerp) => json!("psi_perp"),
            None => Value::Null,
        };
        doc.insert("post_system_state_on_chi_perp".into(), v);
    }
}

fn finish(doc: Map<String, Value>) -> String {
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json");
    s.push('\n');
    s
}

fn metric_cells(protocol: Protocol, eval: &Evaluation) -> Vec<String> {
    let mut cells: Vec<String> = outcome_labels(protocol)
        .iter()
        .map(|l| csv_number(eval.distribution.prob(l)))
        .collect();
    if has_efficiency(protocol) {
        for x in [eval.efficiency, eval.single_shot_efficiency, eval.rounds_expected] {
            cells.push(x.map_or_else(String::new, csv_number));
        }
    }
    cells
}

fn metric_header(protocol: Protocol) -> Vec<&'static str> {
    let mut cols = outcome_labels(protocol).to_vec();
    if has_efficiency(protocol) {
        cols.extend(EFFICIENCY_COLUMNS);
    }
    cols
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn exact_json(protocol: Protocol, params: &ProtocolParams, eval: &Evaluation) -> String {
    let mut doc = header("run", Some(protocol));
    doc.insert("mode".into(), json!("exact"));
    doc.insert("params".into(), params_object(params));
    insert_metrics(&mut doc, protocol, eval);
    if protocol == Protocol::Penrose {
        doc.insert("note".into(), json!(PENROSE_NOTE));
    }
    finish(doc)
}

pub fn exact_csv(protocol: Protocol, eval: &Evaluation) -> String {
    csv(&metric_header(protocol), &[metric_cells(protocol, eval)])
}

pub fn sample_json(command: &str, protocol: Protocol, params: &ProtocolParams, s: &Sampled) -> String {
    let mut doc = header(command, Some(protocol));
    doc.insert("mode".into(), json!("sample"));
    doc.insert("params".into(), params_object(params));
    doc.insert("master_seed".into(), json!(s.ledger.master_seed));
    doc.insert("trials".into(), json!(s.ledger.trials));
    let labels = outcome_labels(protocol);
    doc.insert(
        "counts".into(),
        Value::Object(
            labels
                .iter()
                .map(|l| (l.to_string(), json!(s.ledger.count(l))))
                .collect(),
        ),
    );
    doc.insert(
        "frequencies".into(),
        Value::Object(
            labels
                .iter()
                .map(|l| (l.to_string(), number(s.ledger.frequency(l))))
                .collect(),
        ),
    );
    insert_metrics(&mut doc, protocol, &s.exact);
    doc.insert(
        "chi_square".into(),
        json!({
            "statistic": number(s.chi_square.statistic),
            "dof": s.chi_square.dof,
            "critical_value": number(s.chi_square.critical_value),
            "pass": s.chi_square.pass,
        }),
    );
    doc.insert("four_sigma_violations".into(), json!(s.four_sigma_violations));
    if protocol == Protocol::Penrose {
        doc.insert("note".into(), json!(PENROSE_NOTE));
    }
    finish(doc)
}

pub fn sample_csv(protocol: Protocol, s: &Sampled) -> String {
    let rows: Vec<Vec<String>> = outcome_labels(protocol)
        .iter()
        .map(|l| {
            vec![
                l.to_string(),
                s.ledger.count(l).to_string(),
                csv_number(s.ledger.frequency(l)),
                csv_number(s.exact.distribution.prob(l)),
            ]
        })
        .collect();
    csv(&["outcome", "count", "frequency", "probability"], &rows)
}

/// One evaluated grid point.
pub struct SweepRow {
    pub value: Value,
    pub eval: Evaluation,
}

pub fn sweep_json(protocol: Protocol, param: &str, fixed: &ProtocolParams, rows: &[SweepRow]) -> String {
    let mut doc = header("sweep", Some(protocol));
    doc.insert("param".into(), json!(param));
    let mut fixed_params = params_object(fixed);
    if let Value::Object(m) = &mut fixed_params {
        m.shift_remove(param);
    }
    doc.insert("fixed".into(), fixed_params);
    let rows: Vec<Value> = rows
        .iter()
        .map(|row| {
            let mut m = Map::new();
            m.insert("value".into(), row.value.clone());
            insert_metrics(&mut m, protocol, &row.eval);
            Value::Object(m)
        })
        .collect();
    doc.insert("rows".into(), Value::Array(rows));
    if protocol == Protocol::Penrose {
        doc.insert("note".into(), json!(PENROSE_NOTE));
    }
    finish(doc)
}

pub fn sweep_csv(protocol: Protocol, param: &str, rows: &[SweepRow]) -> String {
    let mut cols = vec![param];
    cols.extend(metric_header(protocol));
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            let mut cells = vec![csv_value(&row.value)];
            cells.extend(metric_cells(protocol, &row.eval));
            cells
        })
        .collect();
    csv(&cols, &body)
}

pub fn tune_json(t: &Tuning) -> String {
    let mut doc = header("tune", None);
    doc.insert("T1".into(), number(t.t1));
    doc.insert("T2".into(), number(t.t2));
    doc.insert("dark_port_leak".into(), number(t.dark_port_leak));
    finish(doc)
}

pub fn tune_csv(t: &Tuning) -> String {
    csv(
        &["T1", "T2", "dark_port_leak"],
        &[vec![csv_number(t.t1), csv_number(t.t2), csv_number(t.dark_port_leak)]],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(round12(0.25000000000000006), 0.25);
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round12(0.9 / 1.9), 0.473684210526);
        assert_eq!(round12(0.0), 0.0);
        assert_eq!(number(1.0 / 3.0).to_string(), "0.333333333333");
        assert_eq!(number(f64::INFINITY), Value::Null);
        assert_eq!(csv_number(3.0814879110195774e-33), "3.08148791102e-33");
    }
}
