//! Relationship registry and completion settings as versioned JSON.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "relationships": [
//!     {
//!       "name": "RELATIVE-OF",
//!       "transitive": true,
//!       "completion": {
//!         "decay": {"kind": "exponential", "base": 0.5},
//!         "aggregation": "sum",
//!         "threshold": 0.0078125,
//!         "max_hops": 7
//!       }
//!     }
//!   ]
//! }
//! ```

use serde::{Deserialize, Serialize};

use crate::engine::{Aggregation, CyclePolicy, DecayFunction, RelationshipConfig};
use crate::error::{Error, Result};
use crate::graph::RelationshipType;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompletionSettings {
    pub decay: DecayFunction,
    pub aggregation: Aggregation,
    pub threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_hops: Option<usize>,
    #[serde(default)]
    pub cycle_policy: CyclePolicy,
}

impl CompletionSettings {
    pub fn into_config(self, rel: impl Into<String>) -> Result<RelationshipConfig> {
        let max_hops = self
            .max_hops
            .unwrap_or_else(|| RelationshipConfig::default_max_hops(&self.decay, self.aggregation, self.threshold));
        let cfg = RelationshipConfig {
            rel: rel.into(),
            decay: self.decay,
            aggregation: self.aggregation,
            threshold: self.threshold,
            max_hops,
            cycle_policy: self.cycle_policy,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl From<&RelationshipConfig> for CompletionSettings {
    fn from(cfg: &RelationshipConfig) -> Self {
        CompletionSettings {
            decay: cfg.decay.clone(),
            aggregation: cfg.aggregation,
            threshold: cfg.threshold,
            max_hops: Some(cfg.max_hops),
            cycle_policy: cfg.cycle_policy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationshipEntry {
    pub name: String,
    pub transitive: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completion: Option<CompletionSettings>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: u32,
    pub relationships: Vec<RelationshipEntry>,
}

impl ConfigFile {
    pub fn new(registry: &[RelationshipType], configs: &[RelationshipConfig]) -> Self {
        ConfigFile {
            schema_version: CONFIG_SCHEMA_VERSION,
            relationships: registry
                .iter()
                .map(|r| RelationshipEntry {
                    name: r.name.clone(),
                    transitive: r.transitive,
                    completion: configs.iter().find(|c| c.rel == r.name).map(CompletionSettings::from),
                })
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if file.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {CONFIG_SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn registry(&self) -> Vec<RelationshipType> {
        self.relationships
            .iter()
            .map(|r| RelationshipType::new(r.name.clone(), r.transitive))
            .collect()
    }

    /// Validated completion configs, one per relationship with a
    /// `completion` block. Such relationships must be transitive.
    pub fn completion_configs(&self) -> Result<Vec<RelationshipConfig>> {
        let mut out = Vec::new();
        for entry in &self.relationships {
            if let Some(settings) = &entry.completion {
                if !entry.transitive {
                    return Err(Error::Config(format!(
                        "relationship `{}` has completion settings but is not transitive",
                        entry.name
                    )));
                }
                out.push(settings.clone().into_config(entry.name.clone())?);
            }
        }
        Ok(out)
    }
}

/// Parses one relationship's completion settings object.
pub fn parse_relationship_config(rel: &str, json: &str) -> Result<RelationshipConfig> {
    let settings: CompletionSettings = serde_json::from_str(json).map_err(|e| Error::Config(e.to_string()))?;
    settings.into_config(rel)
}
