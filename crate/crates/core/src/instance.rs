//! Problem instances and their JSON form.

use crate::error::{Error, Result};
use crate::free_space::Workspace;
use crate::geometry::Point;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub workspace: Workspace,
    pub starts: Vec<Point>,
    pub targets: Vec<Point>,
    #[serde(default)]
    pub labeled: bool,
}

impl Instance {
    pub fn new(
        workspace: Workspace,
        starts: Vec<Point>,
        targets: Vec<Point>,
        labeled: bool,
    ) -> Self {
        Instance {
            workspace,
            starts,
            targets,
            labeled,
        }
    }

    /// Number of robots.
    pub fn m(&self) -> usize {
        self.starts.len()
    }

    pub fn check_shape(&self) -> Result<()> {
        if self.starts.len() != self.targets.len() {
            return Err(Error::InfeasibleInstance(format!(
                "{} starts but {} targets",
                self.starts.len(),
                self.targets.len()
            )));
        }
        if self
            .starts
            .iter()
            .chain(&self.targets)
            .any(|p| !p.is_finite())
        {
            return Err(Error::InfeasibleInstance("non-finite position".into()));
        }
        Ok(())
    }

    /// All starts followed by all targets.
    pub fn positions(&self) -> Vec<Point> {
        self.starts.iter().chain(&self.targets).copied().collect()
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instances always serialize")
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }
}
