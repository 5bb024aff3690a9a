//! Line-oriented model-spec format.
//!
//! ```text
//! # procurement cost
//! variables: a p c
//! term: 1 a p c              # coefficient, then the variables of the monomial
//! term: -2.5                 # constant term
//! sep: a log 1 1 0           # coeff * ln(scale * x + shift)
//! sep: p exp 1 0.5 0         # coeff * exp(scale * x + shift)
//! sep: c poly 0 1 3          # a0 + a1 x + a2 x^2
//! sep: c affine 2 1          # slope * x + intercept
//! sep: c power 1 1 2 -1      # coeff * (scale * x + shift)^exponent
//! segment: supply a p        # optional; each variable in at most one segment
//! ```
//!
//! Keys are `variables`, `term`, `sep` and `segment`; `#` starts a comment.
//! Numbers are decimal doubles. [`ModelSpec::to_text`] writes shortest
//! round-trip representations, so parse and print are exact inverses.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::characteristic::{CharacteristicFunction, SeparableKind};
use crate::error::{AttribError, Result};

/// A characteristic function with named variables and optional segments.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    names: Vec<String>,
    function: CharacteristicFunction,
    segments: Vec<(String, Vec<usize>)>,
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

impl ModelSpec {
    pub fn new(
        names: Vec<String>,
        function: CharacteristicFunction,
        segments: Vec<(String, Vec<usize>)>,
    ) -> Result<Self> {
        if names.len() != function.n() {
            return Err(AttribError::DimensionMismatch {
                expected: function.n(),
                found: names.len(),
            });
        }
        let mut seen = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if !is_identifier(name) {
                return Err(AttribError::Input(format!("invalid variable name `{name}`")));
            }
            if seen.insert(name.as_str(), i).is_some() {
                return Err(AttribError::Input(format!("duplicate variable `{name}`")));
            }
        }
        let mut owner = vec![None::<&str>; names.len()];
        for (label, members) in &segments {
            for &m in members {
                if m >= names.len() {
                    return Err(AttribError::IndexOutOfRange { index: m, n: names.len() });
                }
                if let Some(prev) = owner[m].replace(label) {
                    return Err(AttribError::Input(format!(
                        "variable `{}` is in segments `{prev}` and `{label}`",
                        names[m]
                    )));
                }
            }
        }
        Ok(ModelSpec {
            names,
            function,
            segments,
        })
    }

    /// Unsegmented model.
    pub fn from_function(names: Vec<String>, function: CharacteristicFunction) -> Result<Self> {
        ModelSpec::new(names, function, Vec::new())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn function(&self) -> &CharacteristicFunction {
        &self.function
    }

    pub fn segments(&self) -> &[(String, Vec<usize>)] {
        &self.segments
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn segment_of(&self, i: usize) -> Option<&str> {
        self.segments
            .iter()
            .find(|(_, m)| m.contains(&i))
            .map(|(l, _)| l.as_str())
    }

    pub fn with_segments(self, segments: Vec<(String, Vec<usize>)>) -> Result<Self> {
        ModelSpec::new(self.names, self.function, segments)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut terms: Vec<(usize, f64, Vec<String>)> = Vec::new();
        let mut seps: Vec<(usize, String, SeparableKind)> = Vec::new();
        let mut segs: Vec<(usize, String, Vec<String>)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |msg: String| AttribError::Parse { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| err(format!("expected `key: value`, got `{line}`")))?;
            let fields: Vec<&str> = rest.split_whitespace().collect();
            match key.trim() {
                "variables" => names.extend(fields.iter().map(|s| s.to_string())),
                "term" => {
                    let (c, vars) = fields
                        .split_first()
                        .ok_or_else(|| err("term needs a coefficient".into()))?;
                    let c = parse_num(c).map_err(err)?;
                    terms.push((line_no, c, vars.iter().map(|s| s.to_string()).collect()));
                }
                "sep" => {
                    if fields.len() < 2 {
                        return Err(err("sep needs a variable and a kind".into()));
                    }
                    let nums = fields[2..]
                        .iter()
                        .map(|s| parse_num(s))
                        .collect::<std::result::Result<Vec<f64>, String>>()
                        .map_err(err)?;
                    let kind = separable_from_fields(fields[1], &nums).map_err(err)?;
                    seps.push((line_no, fields[0].to_string(), kind));
                }
                "segment" => {
                    let (label, vars) = fields
                        .split_first()
                        .ok_or_else(|| err("segment needs a label".into()))?;
                    segs.push((line_no, label.to_string(), vars.iter().map(|s| s.to_string()).collect()));
                }
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        let lookup: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let resolve = |line: usize, name: &str| {
            lookup.get(name).copied().ok_or_else(|| AttribError::Parse {
                line,
                msg: format!("undeclared variable `{name}`"),
            })
        };
        let mut f = CharacteristicFunction::zero(names.len());
        for (line, c, vars) in &terms {
            let idx = vars.iter().map(|v| resolve(*line, v)).collect::<Result<Vec<_>>>()?;
            f.add_monomial(idx, *c).map_err(|e| AttribError::Parse {
                line: *line,
                msg: e.to_string(),
            })?;
        }
        for (line, var, kind) in seps {
            let i = resolve(line, &var)?;
            f.add_separable(i, kind).map_err(|e| AttribError::Parse {
                line,
                msg: e.to_string(),
            })?;
        }
        let segments = segs
            .iter()
            .map(|(line, label, vars)| {
                let idx = vars.iter().map(|v| resolve(*line, v)).collect::<Result<Vec<_>>>()?;
                Ok((label.clone(), idx))
            })
            .collect::<Result<Vec<_>>>()?;
        ModelSpec::new(names, f, segments)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "variables: {}", self.names.join(" "));
        for (subset, c) in self.function.multilinear_part().terms() {
            let _ = write!(out, "term: {c}");
            for &i in subset {
                let _ = write!(out, " {}", self.names[i]);
            }
            out.push('\n');
        }
        for t in self.function.separable_terms() {
            let _ = write!(out, "sep: {} {}", self.names[t.var], t.kind.name());
            for v in separable_fields(&t.kind) {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        for (label, members) in &self.segments {
            let _ = write!(out, "segment: {label}");
            for &m in members {
                let _ = write!(out, " {}", self.names[m]);
            }
            out.push('\n');
        }
        out
    }
}

fn parse_num(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(v)
}

fn separable_from_fields(kind: &str, nums: &[f64]) -> std::result::Result<SeparableKind, String> {
    let want = |k: usize| {
        if nums.len() == k {
            Ok(())
        } else {
            Err(format!("`{kind}` takes {k} numbers, got {}", nums.len()))
        }
    };
    Ok(match kind {
        "poly" => SeparableKind::Polynomial { coeffs: nums.to_vec() },
        "affine" => {
            want(2)?;
            SeparableKind::Affine {
                slope: nums[0],
                intercept: nums[1],
            }
        }
        "log" => {
            want(3)?;
            SeparableKind::Log {
                coeff: nums[0],
                scale: nums[1],
                shift: nums[2],
            }
        }
        "exp" => {
            want(3)?;
            SeparableKind::Exp {
                coeff: nums[0],
                scale: nums[1],
                shift: nums[2],
            }
        }
        "power" => {
            want(4)?;
            if nums[3].fract() != 0.0 || nums[3].abs() > i32::MAX as f64 {
                return Err(format!("power exponent {} is not an integer", nums[3]));
            }
            SeparableKind::Power {
                coeff: nums[0],
                scale: nums[1],
                shift: nums[2],
                exponent: nums[3] as i32,
            }
        }
        other => return Err(format!("unknown separable kind `{other}`")),
    })
}

fn separable_fields(kind: &SeparableKind) -> Vec<f64> {
    match *kind {
        SeparableKind::Polynomial { ref coeffs } => coeffs.clone(),
        SeparableKind::Affine { slope, intercept } => vec![slope, intercept],
        SeparableKind::Log { coeff, scale, shift } | SeparableKind::Exp { coeff, scale, shift } => {
            vec![coeff, scale, shift]
        }
        SeparableKind::Power {
            coeff,
            scale,
            shift,
            exponent,
        } => vec![coeff, scale, shift, exponent as f64],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# sample
variables: a p c
term: 1 a p c
term: -2.5
sep: a log 1 1 0
sep: c power 1 1 2 -1
segment: supply a p
";

    #[test]
    fn parses_sample() {
        let m = ModelSpec::parse(SAMPLE).unwrap();
        assert_eq!(m.names(), ["a", "p", "c"]);
        let f = m.function();
        assert_eq!(f.multilinear_part().coefficient(&[0, 1, 2]), 1.0);
        assert_eq!(f.multilinear_part().coefficient(&[]), -2.5);
        assert_eq!(f.separable_terms().len(), 2);
        assert_eq!(m.segment_of(1), Some("supply"));
        assert_eq!(m.segment_of(2), None);
        assert_eq!(ModelSpec::parse(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn reports_line_numbers() {
        let bad = "variables: a b\nterm: 1 a q\n";
        match ModelSpec::parse(bad) {
            Err(AttribError::Parse { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains('q'));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            ModelSpec::parse("variables: a\nterm: x a\n"),
            Err(AttribError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            ModelSpec::parse("variables: a\nsep: a log 1\n"),
            Err(AttribError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            ModelSpec::parse("variables: a\nterm: 1 a a\n"),
            Err(AttribError::Parse { line: 2, .. })
        ));
        assert!(ModelSpec::parse("variables: a a\n").is_err());
        assert!(ModelSpec::parse("variables: a b\nsegment: s a\nsegment: t a\n").is_err());
        assert!(ModelSpec::parse("bogus line\n").is_err());
    }
}
