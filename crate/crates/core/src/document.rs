//! The JSON input document and its conversion into configurations, pairs and fibrations.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cone::Fibration;
use crate::discrepancy::{Model, Pair};
use crate::error::{Error, Result};
use crate::lattice::{Configuration, Curve, Divisor, IncidencePoint};
use crate::mmp::RayPolicy;
use crate::rational::{int, Rat};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub schema: u32,
    pub configuration: ConfigurationBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fibration: Option<FibrationBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<OptionsBlock>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigurationBlock {
    pub curves: Vec<CurveEntry>,
    pub matrix: Vec<Vec<i64>>,
    #[serde(default)]
    pub points: Vec<PointEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_structure: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical_self_int: Option<i64>,
}

impl ConfigurationBlock {
    pub fn from_configuration(config: &Configuration) -> Self {
        ConfigurationBlock {
            curves: config
                .curves()
                .iter()
                .map(|c| CurveEntry {
                    id: c.id.clone(),
                    self_int: c.self_int,
                    canon_int: c.canon_int,
                })
                .collect(),
            matrix: config.matrix().to_vec(),
            points: config
                .points()
                .iter()
                .map(|p| PointEntry {
                    id: p.id.clone(),
                    curves: p.curves.map(|c| config.curve(c).id.clone()),
                    residue_degree: p.residue_degree,
                })
                .collect(),
            chi_structure: config.chi_structure(),
            canonical_self_int: config.canonical_self_int(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveEntry {
    pub id: String,
    pub self_int: i64,
    pub canon_int: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointEntry {
    pub id: String,
    pub curves: [String; 2],
    #[serde(default = "one_i64")]
    pub residue_degree: i64,
}

fn one_i64() -> i64 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    #[serde(default)]
    pub contracted: Vec<String>,
    pub q_factorial: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairBlock {
    #[serde(default)]
    pub boundary: BTreeMap<String, Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibrationBlock {
    pub target_dim: u8,
    #[serde(default)]
    pub base_points: Vec<String>,
    /// Curve id to base point id; curves not listed are horizontal.
    #[serde(default)]
    pub vertical: BTreeMap<String, String>,
    #[serde(default)]
    pub fiber_classes: BTreeMap<String, BTreeMap<String, i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RayPolicySpec {
    /// `"lowest-index"`.
    Named(String),
    /// Preferred curve ids, tried in order.
    Curves(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Human,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray_policy: Option<RayPolicySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

/// Parses a document, reporting the field path and line of the first problem.
pub fn parse_input(text: &str) -> Result<InputDocument> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: InputDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse {
            path,
            message: format!("{inner}"),
        }
    })?;
    if doc.schema != SCHEMA_VERSION {
        return Err(Error::Parse {
            path: "schema".into(),
            message: format!("unsupported schema version {} (expected {SCHEMA_VERSION})", doc.schema),
        });
    }
    Ok(doc)
}

/// Canonical text: pretty-printed JSON, keys in declaration or sorted order, trailing newline.
pub fn to_canonical_json(doc: &InputDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}

/// Everything a command needs, resolved from ids to indices.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: Configuration,
    pub pair: Pair,
    pub fibration: Fibration,
    pub ray_policy: RayPolicy,
}

impl InputDocument {
    /// The configuration with shapes and ids resolved but invariants unchecked.
    pub fn configuration(&self) -> Result<Configuration> {
        let block = &self.configuration;
        let mut index = BTreeMap::new();
        for (i, c) in block.curves.iter().enumerate() {
            index.entry(c.id.as_str()).or_insert(i);
        }
        let curves = block
            .curves
            .iter()
            .map(|c| Curve::new(c.id.clone(), c.self_int, c.canon_int))
            .collect();
        let points = block
            .points
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let look = |j: usize| {
                    index.get(p.curves[j].as_str()).copied().ok_or_else(|| Error::Parse {
                        path: format!("configuration.points[{k}].curves[{j}]"),
                        message: format!("unknown curve id {:?}", p.curves[j]),
                    })
                };
                Ok(IncidencePoint::new(p.id.clone(), look(0)?, look(1)?, p.residue_degree))
            })
            .collect::<Result<Vec<_>>>()?;
        let config = Configuration::from_parts(curves, block.matrix.clone(), points)
            .map_err(|e| Error::Parse {
                path: "configuration.matrix".into(),
                message: e.to_string(),
            })?;
        Ok(config
            .with_chi_structure(block.chi_structure)
            .with_canonical_self_int(block.canonical_self_int))
    }

    /// Validates the configuration and builds model, pair, fibration and options.
    pub fn resolve(&self) -> Result<Resolved> {
        let config = self.configuration()?;
        config.ensure_valid()?;
        let curve = |id: &str, path: String| {
            config.curve_index(id).ok_or_else(|| Error::Parse {
                path,
                message: format!("unknown curve id {id:?}"),
            })
        };

        let (contracted, q_factorial) = match &self.model {
            None => (BTreeSet::new(), true),
            Some(m) => {
                let set = m
                    .contracted
                    .iter()
                    .enumerate()
                    .map(|(k, id)| curve(id, format!("model.contracted[{k}]")))
                    .collect::<Result<BTreeSet<_>>>()?;
                (set, m.q_factorial)
            }
        };
        let model = Model::new(config.clone(), contracted, q_factorial)?;

        let mut boundary = Divisor::zero();
        if let Some(p) = &self.pair {
            for (id, q) in &p.boundary {
                let i = curve(id, format!("pair.boundary.{id}"))?;
                boundary.set(i, q.0.clone());
            }
        }
        let pair = Pair::new(model, boundary)?;

        let fibration = match &self.fibration {
            None => Fibration::over_point(&config),
            Some(f) => {
                let base = |id: &str, path: String| {
                    f.base_points.iter().position(|b| b == id).ok_or_else(|| Error::Parse {
                        path,
                        message: format!("unknown base point {id:?}"),
                    })
                };
                let mut vertical = BTreeMap::new();
                for (c, s) in &f.vertical {
                    let path = format!("fibration.vertical.{c}");
                    vertical.insert(curve(c, path.clone())?, base(s, path)?);
                }
                let mut classes = BTreeMap::new();
                for (s, terms) in &f.fiber_classes {
                    let si = base(s, format!("fibration.fiber_classes.{s}"))?;
                    let mut d = Divisor::zero();
                    for (c, k) in terms {
                        d.set(curve(c, format!("fibration.fiber_classes.{s}.{c}"))?, int(*k));
                    }
                    classes.insert(si, d);
                }
                Fibration::new(&config, f.target_dim, f.base_points.clone(), vertical, classes)?
            }
        };

        let ray_policy = match self.options.as_ref().and_then(|o| o.ray_policy.as_ref()) {
            None => RayPolicy::LowestIndex,
            Some(RayPolicySpec::Named(name)) if name == "lowest-index" => RayPolicy::LowestIndex,
            Some(RayPolicySpec::Named(name)) => {
                return Err(Error::Parse {
                    path: "options.ray_policy".into(),
                    message: format!("unknown ray policy {name:?}; use \"lowest-index\" or a list of curve ids"),
                })
            }
            Some(RayPolicySpec::Curves(ids)) => RayPolicy::Prefer(
                ids.iter()
                    .enumerate()
                    .map(|(k, id)| curve(id, format!("options.ray_policy[{k}]")))
                    .collect::<Result<_>>()?,
            ),
        };

        Ok(Resolved {
            config,
            pair,
            fibration,
            ray_policy,
        })
    }

    pub fn format(&self) -> OutputFormat {
        self.options
            .as_ref()
            .and_then(|o| o.format)
            .unwrap_or(OutputFormat::Human)
    }
}
