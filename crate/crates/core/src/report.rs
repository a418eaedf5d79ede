//! Self-describing result documents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, TreeNode};

pub const FORMAT_VERSION: u32 = 1;

/// `{"cost", "tree", "stats", "config", "format_version"}`; `cost` is always
/// the sum of sibling costs over `tree`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    /// JSON has no infinity; an infinite cost is written as `null`.
    #[serde(with = "nullable_cost")]
    pub cost: f64,
    pub tree: TreeNode,
    pub stats: serde_json::Value,
    pub config: serde_json::Value,
    pub format_version: u32,
}

impl Report {
    pub fn new(cost: f64, tree: &Hierarchy, stats: serde_json::Value, config: serde_json::Value) -> Self {
        Report {
            cost,
            tree: tree.to_tree_node(),
            stats,
            config,
            format_version: FORMAT_VERSION,
        }
    }

    pub fn hierarchy(&self) -> Result<Hierarchy> {
        Hierarchy::from_tree_node(&self.tree)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Report = serde_json::from_str(text).map_err(|e| Error::parse("result file", e.to_string()))?;
        if r.format_version != FORMAT_VERSION {
            return Err(Error::parse(
                "result file",
                format!("unsupported format_version {}", r.format_version),
            ));
        }
        Ok(r)
    }
}

mod nullable_cost {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(cost: &f64, s: S) -> Result<S::Ok, S::Error> {
        if cost.is_finite() {
            s.serialize_f64(*cost)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}
