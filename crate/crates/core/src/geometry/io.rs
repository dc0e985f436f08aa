use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BoundaryLoop, Curve, Domain, GeometryConfig, Orientation};
use crate::error::{Error, Result};

/// Serialized form of a domain.
///
/// ```toml
/// name = "half-disc"
///
/// [[loops]]
/// orientation = "outer"
///
/// [[loops.curves]]
/// kind = "circular-arc"
/// center = [0.0, 0.0]
/// radius = 1.0
/// start_angle = 0.0
/// sweep = 3.141592653589793
///
/// [[loops.curves]]
/// kind = "segment"
/// start = [-1.0, 0.0]
/// end = [1.0, 0.0]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arm_length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_angle: Option<f64>,
    pub loops: Vec<LoopSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopSpec {
    pub orientation: Orientation,
    pub curves: Vec<Curve>,
}

impl DomainFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads TOML, or JSON when the extension is `.json`.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json(&text),
            _ => Self::from_toml(&text),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_domain(domain: &Domain, name: Option<String>) -> Self {
        DomainFile {
            name,
            arm_length: domain.config().arm_length,
            tol_angle: None,
            loops: domain
                .loops()
                .iter()
                .map(|l| LoopSpec { orientation: l.orientation, curves: l.curves.clone() })
                .collect(),
        }
    }

    pub fn build(&self) -> Result<Domain> {
        let mut config = GeometryConfig { arm_length: self.arm_length, ..Default::default() };
        if let Some(t) = self.tol_angle {
            config.tol_angle = t;
        }
        let loops = self
            .loops
            .iter()
            .map(|l| BoundaryLoop { orientation: l.orientation, curves: l.curves.clone() })
            .collect();
        Domain::with_config(loops, config)
    }
}

impl Domain {
    pub fn from_file(path: &Path) -> Result<Domain> {
        DomainFile::read(path)?.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::gallery;

    #[test]
    fn toml_roundtrip() {
        for d in [gallery::square(), gallery::drop(), gallery::blob(), gallery::lens(0.7).unwrap()] {
            let f = DomainFile::from_domain(&d, Some("x".into()));
            let text = f.to_toml().unwrap();
            let back = DomainFile::from_toml(&text).unwrap();
            assert_eq!(back, f);
            let rebuilt = back.build().unwrap();
            assert_eq!(rebuilt.corners().len(), d.corners().len());
        }
    }

    #[test]
    fn malformed_input_reports_location() {
        let err = DomainFile::from_toml("[[loops]]\norientation = \"sideways\"\ncurves = []\n").unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        let err = DomainFile::from_toml("[[loops]]\norientation = \"outer\"\n[[loops.curves]]\nkind = \"spline\"\n")
            .unwrap_err();
        assert!(err.to_string().contains("spline") || err.to_string().contains("kind"));
    }

    #[test]
    fn json_is_accepted() {
        let j = r#"{"loops":[{"orientation":"outer","curves":[
            {"kind":"circular-arc","center":[0,0],"radius":1,"start_angle":0,"sweep":6.283185307179586}]}]}"#;
        let d = DomainFile::from_json(j).unwrap().build().unwrap();
        assert!(d.corners().is_empty());
    }
}
