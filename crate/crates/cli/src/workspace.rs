//! Loading and validating input files, with a record of where each
//! artifact came from.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;

use epat_core::atlas::{AtlasFile, FiniteGroupAction, GroupActionFile, GroupoidAtlas};
use epat_core::complexes::{ComplexFile, Relation, RelationFile, SimplicialComplex};
use epat_core::frames::{Frame, FrameFile, Valuation, ValuationFile};
use epat_core::paths::{curve_from_file, framing_from_file, Curve, Framing, WindowedFile};
use epat_core::sgs::{GlobalStateSpace, Run, RunFile, SgsFile};
use epat_core::Label;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub kind: &'static str,
    pub path: PathBuf,
    pub format: &'static str,
}

/// Artifacts loaded during one command, keyed by path.
#[derive(Debug, Default)]
pub struct Workspace {
    loaded: BTreeMap<String, Provenance>,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn provenance(&self) -> Vec<&Provenance> {
        self.loaded.values().collect()
    }

    fn read<T: DeserializeOwned>(&mut self, path: &Path, kind: &'static str) -> Result<T> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let value = serde_json::from_str(&text)
            .with_context(|| format!("{} is not a valid {kind} file", path.display()))?;
        self.loaded.insert(
            path.display().to_string(),
            Provenance {
                kind,
                path: path.to_path_buf(),
                format: "json",
            },
        );
        Ok(value)
    }

    fn invalid(path: &Path, kind: &str) -> String {
        format!("invalid {kind} in {}", path.display())
    }

    pub fn frame(&mut self, path: &Path) -> Result<Frame> {
        let file: FrameFile = self.read(path, "frame")?;
        let (frame, warnings) = Frame::from_file(&file).with_context(|| Self::invalid(path, "frame"))?;
        for w in warnings {
            log::warn!("{}: relation of agent {} was closed to an equivalence", path.display(), w.agent);
        }
        Ok(frame)
    }

    pub fn valuation(&mut self, path: &Path, frame: &Frame) -> Result<Valuation> {
        let file: ValuationFile = self.read(path, "valuation")?;
        Valuation::new(frame, &file).with_context(|| Self::invalid(path, "valuation"))
    }

    pub fn sgs(&mut self, path: &Path) -> Result<GlobalStateSpace> {
        let file: SgsFile = self.read(path, "global state space")?;
        GlobalStateSpace::from_file(&file).with_context(|| Self::invalid(path, "global state space"))
    }

    pub fn run(&mut self, path: &Path, g: &GlobalStateSpace) -> Result<Run> {
        let file: RunFile = self.read(path, "run")?;
        Run::new(g, &file).with_context(|| Self::invalid(path, "run"))
    }

    pub fn atlas(&mut self, path: &Path) -> Result<GroupoidAtlas> {
        let file: AtlasFile = self.read(path, "atlas")?;
        GroupoidAtlas::from_file(&file).with_context(|| Self::invalid(path, "atlas"))
    }

    pub fn group(&mut self, path: &Path) -> Result<FiniteGroupAction> {
        let file: GroupActionFile = self.read(path, "group action")?;
        FiniteGroupAction::from_file(&file).with_context(|| Self::invalid(path, "group action"))
    }

    pub fn point_map(&mut self, path: &Path) -> Result<BTreeMap<Label, Label>> {
        let pairs: Vec<(Label, Label)> = self.read(path, "map")?;
        let mut map = BTreeMap::new();
        for (a, b) in pairs {
            if let Some(old) = map.insert(a.clone(), b.clone()) {
                if old != b {
                    anyhow::bail!("{}: {a} is mapped to both {old} and {b}", path.display());
                }
            }
        }
        Ok(map)
    }

    pub fn curve(&mut self, path: &Path, atlas: &GroupoidAtlas) -> Result<Curve> {
        let file: WindowedFile = self.read(path, "curve")?;
        curve_from_file(atlas, &file).with_context(|| Self::invalid(path, "curve"))
    }

    pub fn framing(&mut self, path: &Path, atlas: &GroupoidAtlas) -> Result<Framing> {
        let file: WindowedFile = self.read(path, "framing")?;
        framing_from_file(atlas, &file).with_context(|| Self::invalid(path, "framing"))
    }

    pub fn relation(&mut self, path: &Path) -> Result<Relation> {
        let file: RelationFile = self.read(path, "relation")?;
        Relation::from_file(&file).with_context(|| Self::invalid(path, "relation"))
    }

    pub fn complex(&mut self, path: &Path) -> Result<SimplicialComplex> {
        let file: ComplexFile = self.read(path, "complex")?;
        Ok(SimplicialComplex::from_file(&file))
    }
}
