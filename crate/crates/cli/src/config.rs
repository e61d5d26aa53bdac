use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use qdstack::designer::DesignProblem;
use qdstack::pulse::{TwoLevelPulse, VeeSpec};
use qdstack::{MaterialParams, StackDesign};
use serde::Deserialize;

use crate::UsageError;

/// One JSON document; every section is optional and unknown keys are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Extra or overriding materials, looked up by name before the built-ins.
    #[serde(default)]
    pub materials: BTreeMap<String, MaterialParams>,
    pub stack: Option<StackDesign>,
    #[serde(default)]
    pub pulses: Vec<PulseSpec>,
    #[serde(default)]
    pub sequence: Vec<String>,
    pub design: Option<DesignProblem>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PulseSpec {
    TwoLevel(TwoLevelPulse),
    Vee(VeeSpec),
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| UsageError(format!("invalid config {}: {}", path.display(), e.0)))
    }

    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| UsageError(e.to_string()))?;
        for (name, m) in &cfg.materials {
            m.validate().map_err(|e| UsageError(format!("material `{name}`: {e}")))?;
        }
        if let Some(s) = &cfg.stack {
            s.validate().map_err(|e| UsageError(format!("stack: {e}")))?;
        }
        if let Some(d) = &cfg.design {
            d.validate().map_err(|e| UsageError(format!("design: {e}")))?;
        }
        Ok(cfg)
    }

    pub fn material(&self, name: &str) -> Result<MaterialParams, UsageError> {
        if let Some(m) = self.materials.get(name) {
            return Ok(m.clone());
        }
        MaterialParams::builtin(name).ok_or_else(|| {
            UsageError(format!("unknown material `{name}` (built-in: inas, gaas, algaas035)"))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse(r#"{"stak": null}"#).is_err());
        assert!(RunConfig::parse(r#"{"design": {"n_dots": 3, "field_tesla": 10, "tsw_ps": 10, "d_min_nm": 1, "d_max_nm": 12, "bogus": 1}}"#).is_err());
    }

    #[test]
    fn empty_and_partial_configs() {
        let c = RunConfig::parse("{}").unwrap();
        assert!(c.stack.is_none() && c.sequence.is_empty());
        let c = RunConfig::parse(r#"{"sequence": ["C1", "RT"], "pulses": [{"kind": "two-level", "rabi_mev": 0.2, "detuning_mev": 0.0, "duration_ps": 10}]}"#).unwrap();
        assert_eq!(c.sequence.len(), 2);
        assert!(matches!(c.pulses[0], PulseSpec::TwoLevel(_)));
    }

    #[test]
    fn material_lookup() {
        let c = RunConfig::parse("{}").unwrap();
        assert_eq!(c.material("InAs").unwrap().name, "InAs");
        assert!(c.material("unobtainium").is_err());
    }
}
