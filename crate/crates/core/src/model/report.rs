//! Attribution reports over named models.

use std::fmt::{self, Write as _};

use serde::Serialize;
use serde_json::json;

use super::format::ModelSpec;
use super::presets::mix_effects_model;
use super::snapshot::ValueSnapshot;
use crate::error::{AttribError, Result};
use crate::method::{
    AttributionMethod, AumannShapleyNumeric, ExactAss, Naive, RandomOrder, ShapleyShubikBrute, ValueVariantExample,
};
use crate::oracle::PermutationWeights;
use crate::quadrature::QuadratureConfig;

/// Residual formatting used in every report: 12 significant digits.
pub fn format_residual(x: f64) -> String {
    format!("{x:.11e}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub variable: String,
    pub segment: Option<String>,
    pub initial: f64,
    #[serde(rename = "final")]
    pub final_value: f64,
    pub attribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentRow {
    pub segment: String,
    pub attribution: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub entity: String,
    pub method: String,
    pub rows: Vec<ReportRow>,
    pub segments: Vec<SegmentRow>,
    pub total_change: f64,
    pub attributed: f64,
    pub residual: f64,
    pub converged: bool,
}

impl Report {
    pub fn attribution(&self, variable: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.variable == variable).map(|r| r.attribution)
    }

    pub fn segment(&self, label: &str) -> Option<f64> {
        self.segments.iter().find(|s| s.segment == label).map(|s| s.attribution)
    }

    /// Aligned human-readable table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "entity: {}    method: {}", self.entity, self.method);
        let wv = self.rows.iter().map(|r| r.variable.len()).max().unwrap_or(0).max(8);
        let ws = self
            .rows
            .iter()
            .filter_map(|r| r.segment.as_ref().map(|s| s.len()))
            .max()
            .unwrap_or(0)
            .max(7);
        let seg_col = !self.segments.is_empty();
        let _ = write!(out, "{:<wv$}", "variable");
        if seg_col {
            let _ = write!(out, "  {:<ws$}", "segment");
        }
        let _ = writeln!(out, "  {:>16}  {:>16}  {:>20}", "initial", "final", "attribution");
        for r in &self.rows {
            let _ = write!(out, "{:<wv$}", r.variable);
            if seg_col {
                let _ = write!(out, "  {:<ws$}", r.segment.as_deref().unwrap_or("-"));
            }
            let _ = writeln!(
                out,
                "  {:>16}  {:>16}  {:>20.12}",
                r.initial, r.final_value, r.attribution
            );
        }
        if seg_col {
            let _ = writeln!(out, "segment totals:");
            for s in &self.segments {
                let _ = writeln!(out, "  {:<ws$}  {:>20.12}", s.segment, s.attribution);
            }
        }
        let _ = writeln!(out, "total change f(s)-f(r): {:.12}", self.total_change);
        let _ = writeln!(out, "sum of attributions:    {:.12}", self.attributed);
        let _ = writeln!(out, "completeness residual:  {}", format_residual(self.residual));
        if !self.converged {
            let _ = writeln!(out, "warning: numerical integration did not converge");
        }
        out
    }

    /// One JSON object per line: a record per variable, per segment, then a summary.
    pub fn to_machine(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let mut v = serde_json::to_value(r).expect("plain data");
            v["record"] = json!("variable");
            v["entity"] = json!(self.entity);
            v["method"] = json!(self.method);
            out.push_str(&v.to_string());
            out.push('\n');
        }
        for s in &self.segments {
            let mut v = serde_json::to_value(s).expect("plain data");
            v["record"] = json!("segment");
            v["entity"] = json!(self.entity);
            v["method"] = json!(self.method);
            out.push_str(&v.to_string());
            out.push('\n');
        }
        let summary = json!({
            "record": "summary",
            "entity": self.entity,
            "method": self.method,
            "total_change": self.total_change,
            "attributed": self.attributed,
            "residual": format_residual(self.residual),
            "converged": self.converged,
        });
        out.push_str(&summary.to_string());
        out.push('\n');
        out
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parses a weights file for `random-order`: each line is `<weight> <var> <var> ...`,
/// listing every model variable once in the order they move.
pub fn parse_order_weights(text: &str, model: &ModelSpec) -> Result<PermutationWeights> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| AttribError::Parse { line: idx + 1, msg };
        let mut fields = line.split_whitespace();
        let w_str = fields.next().unwrap_or("");
        let w: f64 = w_str.parse().map_err(|_| err(format!("`{w_str}` is not a weight")))?;
        let order = fields
            .map(|name| {
                model
                    .index_of(name)
                    .ok_or_else(|| err(format!("unknown variable `{name}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        pairs.push((order, w));
    }
    PermutationWeights::new(model.names().len(), pairs)
}

/// Builds a method from its command-line id.
///
/// Ids: `ass`, `ss-brute`, `as-numeric`, `naive`, `value-variant` and
/// `random-order:<weights-file>`.
pub fn method_from_id(id: &str, model: &ModelSpec, q: QuadratureConfig) -> Result<Box<dyn AttributionMethod>> {
    Ok(match id {
        "ass" => Box::new(ExactAss::default()),
        "ss-brute" => Box::new(ShapleyShubikBrute),
        "as-numeric" => Box::new(AumannShapleyNumeric { quadrature: q }),
        "naive" => Box::new(Naive),
        "value-variant" => Box::new(ValueVariantExample),
        _ => match id.strip_prefix("random-order:") {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| AttribError::Io(format!("{path}: {e}")))?;
                Box::new(RandomOrder {
                    weights: parse_order_weights(&text, model)?,
                })
            }
            None => return Err(AttribError::UnknownMethod(id.to_string())),
        },
    })
}

/// Runs `method` on one entity and aggregates per segment.
pub fn run_report(model: &ModelSpec, snap: &ValueSnapshot, method: &dyn AttributionMethod) -> Result<Report> {
    let vp = snap.to_value_pair(model)?;
    let f = model.function();
    for t in f.separable_terms() {
        for x in [vp.r()[t.var], vp.s()[t.var]] {
            t.kind.evaluate(x).map_err(|e| {
                AttribError::Domain(format!(
                    "entity `{}`, variable `{}` = {x}: {e}",
                    snap.entity,
                    model.names()[t.var]
                ))
            })?;
        }
    }
    let res = method.attribute(f, &vp).map_err(|e| name_variables(e, model, &snap.entity))?;
    let total_change = f.evaluate(vp.s())? - f.evaluate(vp.r())?;
    let rows: Vec<ReportRow> = model
        .names()
        .iter()
        .enumerate()
        .map(|(i, name)| ReportRow {
            variable: name.clone(),
            segment: model.segment_of(i).map(str::to_string),
            initial: vp.r()[i],
            final_value: vp.s()[i],
            attribution: res.z[i],
        })
        .collect();
    let segments = model
        .segments()
        .iter()
        .map(|(label, members)| SegmentRow {
            segment: label.clone(),
            attribution: members.iter().map(|&m| res.z[m]).sum(),
        })
        .collect();
    let attributed = res.total();
    Ok(Report {
        entity: snap.entity.clone(),
        method: res.method,
        rows,
        segments,
        total_change,
        attributed,
        residual: attributed - total_change,
        converged: res.converged,
    })
}

fn name_variables(e: AttribError, model: &ModelSpec, entity: &str) -> AttribError {
    let name = |i: usize| model.names().get(i).cloned().unwrap_or_else(|| format!("#{i}"));
    match e {
        AttribError::IndexOutOfRange { index, .. } => {
            AttribError::Input(format!("entity `{entity}`: variable `{}` out of range", name(index)))
        }
        AttribError::Domain(msg) => AttribError::Domain(format!("entity `{entity}`: {msg}")),
        AttribError::NonFinite(msg) => AttribError::NonFinite(format!("entity `{entity}`: {msg}")),
        other => other,
    }
}

/// Per-segment versus aggregate-first attribution of a CPC change.
#[derive(Debug, Clone, PartialEq)]
pub struct MixEffectsReport {
    /// Per-segment report on `cpc_search * clicks_search + cpc_content * clicks_content`.
    pub segmented: Report,
    /// `(segment, CPC attribution)`.
    pub segment_cpc: Vec<(String, f64)>,
    pub aggregated_cpc: f64,
    pub overall_cpc: (f64, f64),
    pub total_clicks: (f64, f64),
    /// Report on `cpc_overall * clicks_total`.
    pub aggregate_first: Report,
    pub aggregate_first_cpc: f64,
}

pub const MIX_SEARCH_CPC: (f64, f64) = (1.0, 2.0);
pub const MIX_SEARCH_CLICKS: (f64, f64) = (100.0, 100.0);
pub const MIX_CONTENT_CPC: (f64, f64) = (0.01, 0.02);
pub const MIX_CONTENT_CLICKS: (f64, f64) = (100.0, 10000.0);

pub fn mix_effects_demo() -> MixEffectsReport {
    let model = mix_effects_model();
    let snap = ValueSnapshot::new("mix")
        .with("cpc_search", MIX_SEARCH_CPC.0, MIX_SEARCH_CPC.1)
        .with("clicks_search", MIX_SEARCH_CLICKS.0, MIX_SEARCH_CLICKS.1)
        .with("cpc_content", MIX_CONTENT_CPC.0, MIX_CONTENT_CPC.1)
        .with("clicks_content", MIX_CONTENT_CLICKS.0, MIX_CONTENT_CLICKS.1);
    let ass = ExactAss::default();
    let segmented = run_report(&model, &snap, &ass).expect("static data");
    let segment_cpc = vec![
        ("search".to_string(), segmented.attribution("cpc_search").unwrap()),
        ("content".to_string(), segmented.attribution("cpc_content").unwrap()),
    ];
    let aggregated_cpc = segment_cpc.iter().map(|(_, v)| v).sum();

    let spend = |i: usize| {
        let pick = |p: (f64, f64)| if i == 0 { p.0 } else { p.1 };
        pick(MIX_SEARCH_CPC) * pick(MIX_SEARCH_CLICKS) + pick(MIX_CONTENT_CPC) * pick(MIX_CONTENT_CLICKS)
    };
    let clicks = (
        MIX_SEARCH_CLICKS.0 + MIX_CONTENT_CLICKS.0,
        MIX_SEARCH_CLICKS.1 + MIX_CONTENT_CLICKS.1,
    );
    let overall_cpc = (spend(0) / clicks.0, spend(1) / clicks.1);
    let agg_model = ModelSpec::parse("variables: cpc_overall clicks_total\nterm: 1 cpc_overall clicks_total\n")
        .expect("static model");
    let agg_snap = ValueSnapshot::new("mix-aggregate")
        .with("cpc_overall", overall_cpc.0, overall_cpc.1)
        .with("clicks_total", clicks.0, clicks.1);
    let aggregate_first = run_report(&agg_model, &agg_snap, &ass).expect("static data");
    let aggregate_first_cpc = aggregate_first.attribution("cpc_overall").unwrap();
    MixEffectsReport {
        segmented,
        segment_cpc,
        aggregated_cpc,
        overall_cpc,
        total_clicks: clicks,
        aggregate_first,
        aggregate_first_cpc,
    }
}

impl MixEffectsReport {
    pub fn signs_differ(&self) -> bool {
        self.aggregated_cpc.signum() != self.aggregate_first_cpc.signum()
    }

    pub fn conclusion(&self) -> &'static str {
        if self.signs_differ() {
            "aggregating the attributions is more meaningful than attributing with aggregates"
        } else {
            "per-segment and aggregate-first CPC attributions agree in sign"
        }
    }
}

impl fmt::Display for MixEffectsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "                 search CPC  search clicks  content CPC  content clicks  overall CPC")?;
        writeln!(
            f,
            "initial  {:>17}  {:>13}  {:>11}  {:>14}  {:>11.6}",
            MIX_SEARCH_CPC.0, MIX_SEARCH_CLICKS.0, MIX_CONTENT_CPC.0, MIX_CONTENT_CLICKS.0, self.overall_cpc.0
        )?;
        writeln!(
            f,
            "final    {:>17}  {:>13}  {:>11}  {:>14}  {:>11.6}",
            MIX_SEARCH_CPC.1, MIX_SEARCH_CLICKS.1, MIX_CONTENT_CPC.1, MIX_CONTENT_CLICKS.1, self.overall_cpc.1
        )?;
        writeln!(f)?;
        writeln!(f, "(a) attribute per segment, then aggregate:")?;
        for (label, v) in &self.segment_cpc {
            writeln!(f, "    {label:<8} CPC  {v:+.6}")?;
        }
        writeln!(f, "    total    CPC  {:+.6}", self.aggregated_cpc)?;
        writeln!(f, "(b) aggregate first, then attribute:")?;
        writeln!(f, "    overall  CPC  {:+.6}", self.aggregate_first_cpc)?;
        writeln!(f)?;
        writeln!(f, "{}", self.conclusion())
    }
}
