//! JSON instance files.
//!
//! ```json
//! { "n": 2, "model": "linear",
//!   "segments": [ { "theta": 1.0, "a": [1, 1], "B": [[2, -1], [-1, 2]] } ] }
//! ```
//!
//! `"model": "mnl"` segments carry `"b": [...]` instead of `"B"`. A `"bundle"`
//! model adds either `"bundles"` (0/1 incidence rows) or `"max_bundle_size"`,
//! and each segment may be linear or MNL over the bundle index set.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BundleMarket, BundleSpace, DemandModel, LinearModel, MarketInstance, MnlSegmentModel, Segment};
use crate::error::{PricingError, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Linear,
    Mnl,
    Bundle,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    n: usize,
    model: ModelKind,
    segments: Vec<RawSegment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bundles: Option<Vec<Vec<u8>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_bundle_size: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSegment {
    theta: f64,
    a: Vec<f64>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    b_matrix: Option<Vec<Vec<f64>>>,
    #[serde(rename = "b", default, skip_serializing_if = "Option::is_none")]
    b_vector: Option<Vec<f64>>,
}

/// Contents of an instance file.
#[derive(Debug, Clone, PartialEq)]
pub enum MarketFile {
    Plain(MarketInstance),
    Bundle(BundleMarket),
}

impl MarketFile {
    pub fn market(&self) -> &MarketInstance {
        match self {
            MarketFile::Plain(m) => m,
            MarketFile::Bundle(b) => b.market(),
        }
    }

    pub fn bundle(&self) -> Option<&BundleMarket> {
        match self {
            MarketFile::Bundle(b) => Some(b),
            MarketFile::Plain(_) => None,
        }
    }
}

impl From<MarketInstance> for MarketFile {
    fn from(m: MarketInstance) -> Self {
        MarketFile::Plain(m)
    }
}

impl From<BundleMarket> for MarketFile {
    fn from(m: BundleMarket) -> Self {
        MarketFile::Bundle(m)
    }
}

pub fn read_market(path: impl AsRef<Path>) -> Result<MarketFile> {
    let text = std::fs::read_to_string(path)?;
    parse_market(&text)
}

pub fn write_market(path: impl AsRef<Path>, file: &MarketFile) -> Result<()> {
    std::fs::write(path, to_json(file))?;
    Ok(())
}

pub fn parse_market(text: &str) -> Result<MarketFile> {
    let raw: RawInstance = serde_json::from_str(text).map_err(|e| PricingError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    from_raw(raw)
}

fn from_raw(raw: RawInstance) -> Result<MarketFile> {
    if raw.n == 0 {
        return Err(PricingError::field("n", "must be at least 1"));
    }
    let mut segments = Vec::with_capacity(raw.segments.len());
    for (j, s) in raw.segments.into_iter().enumerate() {
        let model = segment_model(raw.model, s.a, s.b_matrix, s.b_vector)
            .map_err(|e| prefix(e, &format!("segments[{j}]")))?;
        if model.dim() != raw.n {
            return Err(PricingError::field(
                format!("segments[{j}].a"),
                format!("length {} does not match n = {}", model.dim(), raw.n),
            ));
        }
        segments.push(Segment { theta: s.theta, model });
    }
    let market = MarketInstance::with_labels(segments, raw.labels)?;
    match raw.model {
        ModelKind::Linear | ModelKind::Mnl => {
            if raw.bundles.is_some() || raw.max_bundle_size.is_some() {
                return Err(PricingError::field("bundles", "only allowed with model \"bundle\""));
            }
            Ok(MarketFile::Plain(market))
        }
        ModelKind::Bundle => {
            let space = match (raw.bundles, raw.max_bundle_size) {
                (Some(rows), None) => {
                    let mut items = Vec::with_capacity(rows.len());
                    for (k, row) in rows.into_iter().enumerate() {
                        if let Some(bad) = row.iter().position(|&v| v > 1) {
                            return Err(PricingError::field(
                                format!("bundles[{k}][{bad}]"),
                                "incidence entries must be 0 or 1",
                            ));
                        }
                        items.push(row.into_iter().map(|v| v == 1).collect());
                    }
                    BundleSpace::subsets(items)?
                }
                (None, Some(max_size)) => BundleSpace::Sizes { max_size },
                _ => {
                    return Err(PricingError::field(
                        "bundles",
                        "bundle model needs exactly one of \"bundles\" or \"max_bundle_size\"",
                    ))
                }
            };
            Ok(MarketFile::Bundle(BundleMarket::new(space, market)?))
        }
    }
}

fn segment_model(
    kind: ModelKind,
    a: Vec<f64>,
    b_matrix: Option<Vec<Vec<f64>>>,
    b_vector: Option<Vec<f64>>,
) -> Result<DemandModel> {
    match (kind, b_matrix, b_vector) {
        (ModelKind::Linear | ModelKind::Bundle, Some(rows), None) => {
            let b = Matrix::from_rows(&rows).map_err(|e| PricingError::field("B", e.to_string()))?;
            Ok(LinearModel::new(a, b)?.into())
        }
        (ModelKind::Mnl | ModelKind::Bundle, None, Some(b)) => Ok(MnlSegmentModel::new(a, b)?.into()),
        (ModelKind::Linear, _, _) => Err(PricingError::field("B", "linear segments need \"B\" (and no \"b\")")),
        (ModelKind::Mnl, _, _) => Err(PricingError::field("b", "mnl segments need \"b\" (and no \"B\")")),
        (ModelKind::Bundle, _, _) => Err(PricingError::field("B", "bundle segments need exactly one of \"B\" or \"b\"")),
    }
}

fn prefix(err: PricingError, at: &str) -> PricingError {
    match err {
        PricingError::Field { field, message } => PricingError::field(format!("{at}.{field}"), message),
        other => PricingError::field(at, other.to_string()),
    }
}

pub fn to_json(file: &MarketFile) -> String {
    let market = file.market();
    let segments: Vec<RawSegment> = market
        .segments()
        .iter()
        .map(|s| match &s.model {
            DemandModel::Linear(m) => RawSegment {
                theta: s.theta,
                a: m.a().to_vec(),
                b_matrix: Some(m.b().rows()),
                b_vector: None,
            },
            DemandModel::Mnl(m) => RawSegment {
                theta: s.theta,
                a: m.a().to_vec(),
                b_matrix: None,
                b_vector: Some(m.b().to_vec()),
            },
        })
        .collect();
    let (model, bundles, max_bundle_size) = match file {
        MarketFile::Plain(m) => {
            let kind = if m.is_mnl() { ModelKind::Mnl } else { ModelKind::Linear };
            (kind, None, None)
        }
        MarketFile::Bundle(b) => match b.space() {
            BundleSpace::Subsets { items, .. } => {
                let rows = items
                    .iter()
                    .map(|x| x.iter().map(|&v| u8::from(v)).collect())
                    .collect();
                (ModelKind::Bundle, Some(rows), None)
            }
            BundleSpace::Sizes { max_size } => (ModelKind::Bundle, None, Some(*max_size)),
        },
    };
    let raw = RawInstance {
        n: market.n(),
        model,
        segments,
        labels: market.labels().map(<[String]>::to_vec),
        bundles,
        max_bundle_size,
    };
    serde_json::to_string_pretty(&raw).expect("instance serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINEAR: &str = r#"{
        "n": 2, "model": "linear",
        "segments": [
            { "theta": 0.5, "a": [1, 1], "B": [[2, -1], [-1, 2]] },
            { "theta": 0.5, "a": [1, 2], "B": [[1, 0], [0, 1]] }
        ]
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let f = parse_market(LINEAR).unwrap();
        assert_eq!(f.market().m(), 2);
        let again = parse_market(&to_json(&f)).unwrap();
        assert_eq!(f, again);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = LINEAR.replace("[[2, -1], [-1, 2]]", "[[2, 1.5], [1, 2]]");
        let err = parse_market(&bad).unwrap_err().to_string();
        assert!(err.contains("segments[0].B"), "{err}");

        let bad = LINEAR.replace("\"theta\": 0.5, \"a\": [1, 2]", "\"theta\": 0.4, \"a\": [1, 2]");
        let err = parse_market(&bad).unwrap_err().to_string();
        assert!(err.contains("theta"), "{err}");

        let bad = LINEAR.replace("\"a\": [1, 2]", "\"a\": [1, -2]");
        let err = parse_market(&bad).unwrap_err().to_string();
        assert!(err.contains("segments[1].a[1]"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_market("{\n \"n\": 2,\n \"model\": \"linear\"\n \"segments\": []}") {
            Err(PricingError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_market(r#"{"n":1,"model":"linear","segments":[],"extra":1}"#).unwrap_err();
        assert!(err.to_string().contains("extra"));
    }

    #[test]
    fn bundle_files() {
        let text = r#"{ "n": 3, "model": "bundle", "bundles": [[1,0],[0,1],[1,1]],
            "segments": [ { "theta": 1, "a": [0, 0, 0], "b": [1, 1, 1] } ] }"#;
        let f = parse_market(text).unwrap();
        assert_eq!(f.bundle().unwrap().space().size(2), 2);
        assert_eq!(parse_market(&to_json(&f)).unwrap(), f);

        let missing = text.replace(r#""bundles": [[1,0],[0,1],[1,1]],"#, "");
        assert!(parse_market(&missing).is_err());
    }
}
