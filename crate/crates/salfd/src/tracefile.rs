//! Demonstration trace and pipeline config files.

use std::path::Path;

use salfd_core::{Catalog, DemonstrationTrace, NoiseConfig, PipelineConfig};
use serde::{Deserialize, Serialize};

use crate::planfile::{PlacementDoc, PlanFileError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceDoc {
    pub events: Vec<PlacementDoc>,
    #[serde(default)]
    pub sensor: NoiseConfig,
    #[serde(default = "default_frames_per_state")]
    pub frames_per_state: usize,
    #[serde(default = "default_occlusion_frames")]
    pub occlusion_frames_per_event: usize,
}

fn default_frames_per_state() -> usize {
    3
}

fn default_occlusion_frames() -> usize {
    2
}

impl TraceDoc {
    pub fn from_trace(trace: &DemonstrationTrace, catalog: &Catalog) -> Result<Self, salfd_core::Error> {
        Ok(TraceDoc {
            events: trace.events.iter().map(|b| PlacementDoc::from_placement(b, catalog)).collect::<Result<_, _>>()?,
            sensor: trace.sensor,
            frames_per_state: trace.frames_per_state,
            occlusion_frames_per_event: trace.occlusion_frames_per_event,
        })
    }

    pub fn to_trace(&self, catalog: &Catalog) -> Result<DemonstrationTrace, PlanFileError> {
        let events =
            self.events.iter().enumerate().map(|(i, p)| p.to_placement(catalog, i + 1)).collect::<Result<_, _>>()?;
        Ok(DemonstrationTrace {
            events,
            sensor: self.sensor,
            frames_per_state: self.frames_per_state,
            occlusion_frames_per_event: self.occlusion_frames_per_event,
        })
    }
}

pub fn parse_trace(text: &str, catalog: &Catalog) -> anyhow::Result<DemonstrationTrace> {
    let doc: TraceDoc = serde_json::from_str(text)?;
    Ok(doc.to_trace(catalog)?)
}

pub fn read_trace(path: &Path, catalog: &Catalog) -> anyhow::Result<DemonstrationTrace> {
    parse_trace(&std::fs::read_to_string(path)?, catalog)
}

pub fn trace_to_string(trace: &DemonstrationTrace, catalog: &Catalog) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(&TraceDoc::from_trace(trace, catalog)?)?;
    s.push('\n');
    Ok(s)
}

/// Missing keys take their defaults.
pub fn read_config(path: &Path) -> anyhow::Result<PipelineConfig> {
    let cfg: PipelineConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    cfg.validate()?;
    Ok(cfg)
}
