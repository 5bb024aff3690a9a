//! Built-in application models.

use super::dag::DagModel;
use super::format::ModelSpec;
use super::snapshot::ValueSnapshot;
use crate::characteristic::CharacteristicFunction;
use crate::error::{AttribError, Result};

pub const DEFAULT_SPEND_POSITIONS: usize = 4;

fn build(names: Vec<String>, terms: Vec<(Vec<usize>, f64)>, segments: Vec<(String, Vec<usize>)>) -> Result<ModelSpec> {
    let f = CharacteristicFunction::multilinear(names.len(), terms)?;
    ModelSpec::new(names, f, segments)
}

fn need_positive(what: &str, k: usize) -> Result<()> {
    if k == 0 {
        Err(AttribError::InvalidArgument(format!("{what} must be at least 1")))
    } else {
        Ok(())
    }
}

/// Cost `a * p * c`: amount, unit price, currency rate.
pub fn procurement() -> ModelSpec {
    build(
        vec!["a".into(), "p".into(), "c".into()],
        vec![(vec![0, 1, 2], 1.0)],
        Vec::new(),
    )
    .expect("static model")
}

/// The `a: 4 -> 5, p: 1 -> 12, c: 1 -> 1.5` snapshot for [`procurement`].
pub fn procurement_snapshot() -> ValueSnapshot {
    ValueSnapshot::new("procurement")
        .with("a", 4.0, 5.0)
        .with("p", 1.0, 12.0)
        .with("c", 1.0, 1.5)
}

/// Advertiser spend `q * b * sum_i p_i * ctr_i * cpc_i` over `positions` ad slots.
///
/// `q` is query volume, `b` the bid-eligibility rate, and for slot `i`, `p_i`
/// the probability of being shown there, `ctr_i` its click-through rate and
/// `cpc_i` its cost per click. Each slot is its own segment.
pub fn spend(positions: usize) -> Result<ModelSpec> {
    need_positive("positions", positions)?;
    let mut names = vec!["q".to_string(), "b".to_string()];
    let mut terms = Vec::new();
    let mut segments = Vec::new();
    for i in 1..=positions {
        let base = names.len();
        names.extend([format!("p{i}"), format!("ctr{i}"), format!("cpc{i}")]);
        terms.push((vec![0, 1, base, base + 1, base + 2], 1.0));
        segments.push((format!("pos{i}"), vec![base, base + 1, base + 2]));
    }
    build(names, terms, segments)
}

/// Portfolio return `sum_i w_i * r_i`, variables `w1 r1 w2 r2 ...`, one segment per asset.
pub fn portfolio(assets: usize) -> Result<ModelSpec> {
    need_positive("assets", assets)?;
    let mut names = Vec::with_capacity(2 * assets);
    let mut terms = Vec::with_capacity(assets);
    let mut segments = Vec::with_capacity(assets);
    for i in 1..=assets {
        let w = names.len();
        names.extend([format!("w{i}"), format!("r{i}")]);
        terms.push((vec![w, w + 1], 1.0));
        segments.push((format!("asset{i}"), vec![w, w + 1]));
    }
    build(names, terms, segments)
}

/// Points `sum_i n_i * m_i * a_i * p_i / 100`: games, minutes-share, attempts, percentage.
///
/// The percentage stays in 0-100 units; the 1/100 lives in the coefficient.
pub fn basketball(players: usize) -> Result<ModelSpec> {
    need_positive("players", players)?;
    let mut names = Vec::with_capacity(4 * players);
    let mut terms = Vec::with_capacity(players);
    let mut segments = Vec::with_capacity(players);
    for i in 1..=players {
        let b = names.len();
        names.extend([format!("n{i}"), format!("m{i}"), format!("a{i}"), format!("p{i}")]);
        terms.push((vec![b, b + 1, b + 2, b + 3], 0.01));
        segments.push((format!("player{i}"), vec![b, b + 1, b + 2, b + 3]));
    }
    build(names, terms, segments)
}

/// Two-segment spend `cpc_search * clicks_search + cpc_content * clicks_content`.
pub fn mix_effects_model() -> ModelSpec {
    build(
        vec![
            "cpc_search".into(),
            "clicks_search".into(),
            "cpc_content".into(),
            "clicks_content".into(),
        ],
        vec![(vec![0, 1], 1.0), (vec![2, 3], 1.0)],
        vec![("search".into(), vec![0, 1]), ("content".into(), vec![2, 3])],
    )
    .expect("static model")
}

/// A small storefront funnel used in the docs.
pub const WEBSITE_DAG: &str = "\
nodes: home search product cart checkout
sink: checkout
start: home s_home
start: search s_search
edge: home search p_hs
edge: home product p_hp
edge: search product p_sp
edge: product cart p_pc
edge: cart checkout p_cc
";

pub fn website_dag() -> DagModel {
    DagModel::parse(WEBSITE_DAG).expect("static model")
}

/// Looks up a preset by name: `procurement`, `spend`, `portfolio`, `basketball`, `mix-effects`, `website`.
///
/// `size` sets the number of positions, assets or players where relevant.
pub fn preset(name: &str, size: Option<usize>) -> Result<ModelSpec> {
    match name {
        "procurement" => Ok(procurement()),
        "spend" => spend(size.unwrap_or(DEFAULT_SPEND_POSITIONS)),
        "portfolio" => portfolio(size.unwrap_or(1)),
        "basketball" => basketball(size.unwrap_or(1)),
        "mix-effects" => Ok(mix_effects_model()),
        "website" => website_dag().compile(),
        other => Err(AttribError::InvalidArgument(format!("unknown preset `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let s = spend(DEFAULT_SPEND_POSITIONS).unwrap();
        assert_eq!(s.names().len(), 2 + 3 * DEFAULT_SPEND_POSITIONS);
        assert!(s.function().multilinear_part().terms().all(|(t, _)| t.len() == 5));
        let b = basketball(3).unwrap();
        assert!(b.function().multilinear_part().terms().all(|(t, c)| t.len() == 4 && c == 0.01));
        assert_eq!(portfolio(5).unwrap().segments().len(), 5);
        assert_eq!(website_dag().compile().unwrap().function().multilinear_part().len(), 3);
        assert!(preset("nope", None).is_err());
        assert!(spend(0).is_err());
    }
}
