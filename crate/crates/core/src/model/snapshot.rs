//! Value snapshots: CSV rows `entity,variable,initial,final`.
//!
//! A header row starting with `entity` is optional, `#` lines are comments,
//! and rows for one entity need not be contiguous. Entities keep the order
//! of their first appearance.

use crate::characteristic::ValuePair;
use crate::error::{AttribError, Result};

use super::format::ModelSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct ValueSnapshot {
    pub entity: String,
    /// `(variable, initial, final)` in file order.
    pub values: Vec<(String, f64, f64)>,
}

impl ValueSnapshot {
    pub fn new(entity: impl Into<String>) -> Self {
        ValueSnapshot {
            entity: entity.into(),
            values: Vec::new(),
        }
    }

    pub fn with(mut self, var: &str, initial: f64, fin: f64) -> Self {
        self.values.push((var.to_string(), initial, fin));
        self
    }

    /// Orders the values by the model's variables; every variable must appear exactly once.
    pub fn to_value_pair(&self, model: &ModelSpec) -> Result<ValuePair> {
        let n = model.names().len();
        let mut r = vec![f64::NAN; n];
        let mut s = vec![f64::NAN; n];
        let mut seen = vec![false; n];
        for (var, a, b) in &self.values {
            let i = model.index_of(var).ok_or_else(|| {
                AttribError::Input(format!("entity `{}`: unknown variable `{var}`", self.entity))
            })?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(AttribError::Input(format!(
                    "entity `{}`: variable `{var}` appears more than once",
                    self.entity
                )));
            }
            r[i] = *a;
            s[i] = *b;
        }
        if let Some(i) = seen.iter().position(|&x| !x) {
            return Err(AttribError::Input(format!(
                "entity `{}`: no values for variable `{}`",
                self.entity,
                model.names()[i]
            )));
        }
        ValuePair::new(r, s).map_err(|e| AttribError::Input(format!("entity `{}`: {e}", self.entity)))
    }

    pub fn to_csv(snaps: &[ValueSnapshot]) -> String {
        let mut out = String::from("entity,variable,initial,final\n");
        for snap in snaps {
            for (v, a, b) in &snap.values {
                out.push_str(&format!("{},{v},{a},{b}\n", snap.entity));
            }
        }
        out
    }
}

pub fn parse_snapshots(text: &str) -> Result<Vec<ValueSnapshot>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out: Vec<ValueSnapshot> = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| AttribError::Input(format!("snapshot csv: {e}")))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(k + 1);
        let err = |msg: String| AttribError::Parse { line, msg };
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        if rec.len() != 4 {
            return Err(err(format!("expected 4 fields, got {}", rec.len())));
        }
        if k == 0 && rec[0].eq_ignore_ascii_case("entity") {
            continue;
        }
        let num = |s: &str| -> Result<f64> {
            let v: f64 = s.parse().map_err(|_| err(format!("`{s}` is not a number")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(err(format!("`{s}` is not finite")))
            }
        };
        let (a, b) = (num(&rec[2])?, num(&rec[3])?);
        let entity = &rec[0];
        let pos = match out.iter().position(|s| s.entity == entity) {
            Some(p) => p,
            None => {
                out.push(ValueSnapshot::new(entity));
                out.len() - 1
            }
        };
        out[pos].values.push((rec[1].to_string(), a, b));
    }
    if out.is_empty() {
        return Err(AttribError::Input("snapshot file has no rows".into()));
    }
    Ok(out)
}
