//! Kripke equivalence frames, valuations and frame maps, plus the
//! translations between frames and global state spaces.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::Label;
use crate::partition::{Partition, PartitionError};
use crate::sgs::GlobalStateSpace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("a frame needs at least one agent")]
    NoAgents,
    #[error("a frame needs at least one world")]
    NoWorlds,
    #[error("world {0} is listed twice")]
    DuplicateWorld(Label),
    #[error("{declared} agents declared but {found} relations given")]
    AgentCountMismatch { declared: usize, found: usize },
    #[error("give either \"partitions\" or \"relations\", not both")]
    AmbiguousRelations,
    #[error("neither \"partitions\" nor \"relations\" given")]
    MissingRelations,
    #[error("agent {agent}: unknown world {world}")]
    UnknownWorldInBlock { agent: usize, world: Label },
    #[error("agent {agent}: world {world} lies in listed blocks {first} and {second} (0-based)")]
    OverlappingBlocks {
        agent: usize,
        world: Label,
        first: usize,
        second: usize,
    },
    #[error("agent {agent}: world {world} is in no block")]
    UncoveredWorld { agent: usize, world: Label },
    #[error("agent {agent}: block {block} is empty")]
    EmptyBlock { agent: usize, block: usize },
    #[error("unknown world {0}")]
    UnknownWorld(Label),
    #[error("agent {agent} out of range 1..={agents}")]
    AgentOutOfRange { agent: usize, agents: usize },
    #[error("frames have {source_agents} and {target_agents} agents")]
    AgentMismatch {
        source_agents: usize,
        target_agents: usize,
    },
    #[error("map is not defined on world {0}")]
    NotTotal(Label),
}

/// On-disk frame description. Exactly one of `partitions` (blocks per
/// agent) or `relations` (pairs per agent, closed on load) is present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameFile {
    pub worlds: Vec<Label>,
    pub agents: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partitions: Option<Vec<Vec<Vec<Label>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relations: Option<Vec<Vec<(Label, Label)>>>,
}

/// Emitted when pair-set input had to be closed transitively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureWarning {
    pub agent: usize,
}

/// A finite Kripke equivalence frame. Agent `i` (1-based) is stored as
/// `partitions[i - 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    worlds: Vec<Label>,
    index: BTreeMap<Label, usize>,
    partitions: Vec<Partition>,
}

impl Frame {
    /// Validates raw frame data, returning the first violated invariant.
    pub fn from_file(file: &FrameFile) -> Result<(Frame, Vec<ClosureWarning>), FrameError> {
        if file.agents == 0 {
            return Err(FrameError::NoAgents);
        }
        if file.worlds.is_empty() {
            return Err(FrameError::NoWorlds);
        }
        let index = index_labels(&file.worlds).map_err(FrameError::DuplicateWorld)?;
        let lookup = |agent: usize, w: &Label| {
            index
                .get(w)
                .copied()
                .ok_or_else(|| FrameError::UnknownWorldInBlock {
                    agent,
                    world: w.clone(),
                })
        };
        let n = file.worlds.len();
        let mut warnings = Vec::new();
        let partitions = match (&file.partitions, &file.relations) {
            (Some(_), Some(_)) => return Err(FrameError::AmbiguousRelations),
            (None, None) => return Err(FrameError::MissingRelations),
            (Some(parts), None) => {
                check_count(file.agents, parts.len())?;
                let mut out = Vec::with_capacity(parts.len());
                for (a, blocks) in parts.iter().enumerate() {
                    let agent = a + 1;
                    let blocks = blocks
                        .iter()
                        .map(|b| b.iter().map(|w| lookup(agent, w)).collect())
                        .collect::<Result<Vec<Vec<usize>>, _>>()?;
                    let p = Partition::from_blocks(n, &blocks)
                        .map_err(|e| partition_error(agent, e, &file.worlds))?;
                    out.push(p);
                }
                out
            }
            (None, Some(rels)) => {
                check_count(file.agents, rels.len())?;
                let mut out = Vec::with_capacity(rels.len());
                for (a, pairs) in rels.iter().enumerate() {
                    let agent = a + 1;
                    let pairs = pairs
                        .iter()
                        .map(|(x, y)| Ok((lookup(agent, x)?, lookup(agent, y)?)))
                        .collect::<Result<Vec<_>, FrameError>>()?;
                    let (p, added) = Partition::from_pairs(n, &pairs)
                        .map_err(|e| partition_error(agent, e, &file.worlds))?;
                    if added {
                        log::warn!("agent {agent}: relation was not transitive; closure added pairs");
                        warnings.push(ClosureWarning { agent });
                    }
                    out.push(p);
                }
                out
            }
        };
        Ok((
            Frame {
                worlds: file.worlds.clone(),
                index,
                partitions,
            },
            warnings,
        ))
    }

    /// Builds a frame from already-valid parts. Panics if the partitions do
    /// not cover exactly `worlds`, which is an internal bug.
    pub fn from_partitions(worlds: Vec<Label>, partitions: Vec<Partition>) -> Result<Frame, FrameError> {
        if partitions.is_empty() {
            return Err(FrameError::NoAgents);
        }
        if worlds.is_empty() {
            return Err(FrameError::NoWorlds);
        }
        let index = index_labels(&worlds).map_err(FrameError::DuplicateWorld)?;
        for p in &partitions {
            assert_eq!(p.len(), worlds.len(), "partition size differs from world count");
        }
        Ok(Frame {
            worlds,
            index,
            partitions,
        })
    }

    pub fn to_file(&self) -> FrameFile {
        FrameFile {
            worlds: self.worlds.clone(),
            agents: self.agents(),
            partitions: Some(
                self.partitions
                    .iter()
                    .map(|p| {
                        p.blocks()
                            .iter()
                            .map(|b| b.iter().map(|&w| self.worlds[w].clone()).collect())
                            .collect()
                    })
                    .collect(),
            ),
            relations: None,
        }
    }

    pub fn agents(&self) -> usize {
        self.partitions.len()
    }

    pub fn worlds(&self) -> &[Label] {
        &self.worlds
    }

    pub fn num_worlds(&self) -> usize {
        self.worlds.len()
    }

    pub fn world(&self, w: usize) -> &Label {
        &self.worlds[w]
    }

    pub fn world_index(&self, w: &Label) -> Result<usize, FrameError> {
        self.index
            .get(w)
            .copied()
            .ok_or_else(|| FrameError::UnknownWorld(w.clone()))
    }

    /// All partitions, agent 1 first.
    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    /// The partition of agent `agent` (1-based).
    pub fn partition(&self, agent: usize) -> Result<&Partition, FrameError> {
        self.check_agent(agent)?;
        Ok(&self.partitions[agent - 1])
    }

    pub fn check_agent(&self, agent: usize) -> Result<(), FrameError> {
        if agent == 0 || agent > self.agents() {
            Err(FrameError::AgentOutOfRange {
                agent,
                agents: self.agents(),
            })
        } else {
            Ok(())
        }
    }

    /// `w ~_agent w'`.
    pub fn related(&self, agent: usize, w: &Label, w2: &Label) -> Result<bool, FrameError> {
        let p = self.partition(agent)?;
        Ok(p.same_block(self.world_index(w)?, self.world_index(w2)?))
    }

    /// The relation `~_α`, the intersection of `~_i` over `i ∈ group`.
    pub fn group_partition(&self, group: &BTreeSet<usize>) -> Result<Partition, FrameError> {
        let mut agents = group.iter();
        let first = match agents.next() {
            Some(&a) => self.partition(a)?.clone(),
            None => return Err(FrameError::AgentOutOfRange { agent: 0, agents: self.agents() }),
        };
        agents.try_fold(first, |acc, &a| Ok(acc.meet(self.partition(a)?)))
    }

    /// Intersection of all agents' relations.
    pub fn full_meet(&self) -> Partition {
        let mut it = self.partitions.iter();
        let first = it.next().expect("frame has an agent").clone();
        it.fold(first, |acc, p| acc.meet(p))
    }

    /// Graphviz rendering: one node per world, one colored edge set per
    /// agent. Each block is drawn as a chain through its sorted members.
    pub fn to_dot(&self) -> String {
        const COLORS: [&str; 8] = [
            "red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan",
        ];
        let mut out = String::from("graph frame {\n");
        for w in &self.worlds {
            let _ = writeln!(out, "  \"{w}\";");
        }
        for (a, p) in self.partitions.iter().enumerate() {
            let color = COLORS[a % COLORS.len()];
            for block in p.blocks() {
                for pair in block.windows(2) {
                    let _ = writeln!(
                        out,
                        "  \"{}\" -- \"{}\" [color={color}, label=\"{}\"];",
                        self.worlds[pair[0]],
                        self.worlds[pair[1]],
                        a + 1
                    );
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn check_count(declared: usize, found: usize) -> Result<(), FrameError> {
    if declared != found {
        Err(FrameError::AgentCountMismatch { declared, found })
    } else {
        Ok(())
    }
}

fn partition_error(agent: usize, e: PartitionError, worlds: &[Label]) -> FrameError {
    match e {
        PartitionError::Overlap {
            element,
            first,
            second,
        } => FrameError::OverlappingBlocks {
            agent,
            world: worlds[element].clone(),
            first,
            second,
        },
        PartitionError::Uncovered { element } => FrameError::UncoveredWorld {
            agent,
            world: worlds[element].clone(),
        },
        PartitionError::EmptyBlock { block } => FrameError::EmptyBlock { agent, block },
        PartitionError::OutOfRange { element, .. } => {
            unreachable!("world index {element} produced by lookup is in range")
        }
    }
}

pub(crate) fn index_labels(labels: &[Label]) -> Result<BTreeMap<Label, usize>, Label> {
    let mut index = BTreeMap::new();
    for (k, l) in labels.iter().enumerate() {
        if index.insert(l.clone(), k).is_some() {
            return Err(l.clone());
        }
    }
    Ok(index)
}

/// Validates raw frame data. Closure warnings are logged.
pub fn validate_frame(file: &FrameFile) -> Result<Frame, FrameError> {
    Frame::from_file(file).map(|(f, _)| f)
}

/// A subset of a frame's worlds, by world index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WorldSet {
    members: Vec<bool>,
}

impl WorldSet {
    pub fn empty(n: usize) -> Self {
        WorldSet {
            members: vec![false; n],
        }
    }

    pub fn full(n: usize) -> Self {
        WorldSet {
            members: vec![true; n],
        }
    }

    pub fn from_mask(members: Vec<bool>) -> Self {
        WorldSet { members }
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for w in indices {
            s.members[w] = true;
        }
        s
    }

    pub fn contains(&self, w: usize) -> bool {
        self.members[w]
    }

    pub fn insert(&mut self, w: usize) {
        self.members[w] = true;
    }

    pub fn universe_len(&self) -> usize {
        self.members.len()
    }

    pub fn count(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(w, &b)| b.then_some(w))
    }

    pub fn is_subset(&self, other: &WorldSet) -> bool {
        self.members
            .iter()
            .zip(&other.members)
            .all(|(&a, &b)| !a || b)
    }

    pub fn complement(&self) -> WorldSet {
        WorldSet {
            members: self.members.iter().map(|b| !b).collect(),
        }
    }

    pub fn intersection(&self, other: &WorldSet) -> WorldSet {
        WorldSet {
            members: self
                .members
                .iter()
                .zip(&other.members)
                .map(|(&a, &b)| a && b)
                .collect(),
        }
    }

    pub fn union(&self, other: &WorldSet) -> WorldSet {
        WorldSet {
            members: self
                .members
                .iter()
                .zip(&other.members)
                .map(|(&a, &b)| a || b)
                .collect(),
        }
    }

    /// Worlds whose block (in `p`) meets `self`.
    pub fn saturate(&self, p: &Partition) -> WorldSet {
        let mut out = WorldSet::empty(self.members.len());
        for block in p.blocks() {
            if block.iter().any(|&w| self.members[w]) {
                for &w in block {
                    out.members[w] = true;
                }
            }
        }
        out
    }

    pub fn labels(&self, frame: &Frame) -> Vec<Label> {
        self.iter().map(|w| frame.world(w).clone()).collect()
    }
}

/// Valuation file: variable name to the worlds where it holds.
pub type ValuationFile = BTreeMap<String, Vec<Label>>;

/// A valuation checked against a frame. Variables not listed are false
/// everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    sets: BTreeMap<String, WorldSet>,
    worlds: usize,
}

impl Valuation {
    pub fn new(frame: &Frame, file: &ValuationFile) -> Result<Self, FrameError> {
        let mut sets = BTreeMap::new();
        for (var, ws) in file {
            let idx = ws
                .iter()
                .map(|w| frame.world_index(w))
                .collect::<Result<Vec<_>, _>>()?;
            sets.insert(var.clone(), WorldSet::from_indices(frame.num_worlds(), idx));
        }
        Ok(Valuation {
            sets,
            worlds: frame.num_worlds(),
        })
    }

    pub fn from_sets(worlds: usize, sets: BTreeMap<String, WorldSet>) -> Self {
        debug_assert!(sets.values().all(|s| s.universe_len() == worlds));
        Valuation { sets, worlds }
    }

    /// Truth set of `var`; empty when unassigned.
    pub fn truth_set(&self, var: &str) -> WorldSet {
        self.sets
            .get(var)
            .cloned()
            .unwrap_or_else(|| WorldSet::empty(self.worlds))
    }

    pub fn sets(&self) -> &BTreeMap<String, WorldSet> {
        &self.sets
    }

    pub fn to_file(&self, frame: &Frame) -> ValuationFile {
        self.sets
            .iter()
            .map(|(v, s)| (v.clone(), s.labels(frame)))
            .collect()
    }
}

/// A total function between the world sets of two frames.
#[derive(Debug, Clone)]
pub struct FrameMap<'a> {
    source: &'a Frame,
    target: &'a Frame,
    image: Vec<usize>,
}

impl<'a> FrameMap<'a> {
    pub fn new(
        source: &'a Frame,
        target: &'a Frame,
        map: &BTreeMap<Label, Label>,
    ) -> Result<Self, FrameError> {
        for k in map.keys() {
            source.world_index(k)?;
        }
        let image = source
            .worlds()
            .iter()
            .map(|w| {
                let v = map.get(w).ok_or_else(|| FrameError::NotTotal(w.clone()))?;
                target.world_index(v)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FrameMap {
            source,
            target,
            image,
        })
    }

    /// `image[w]` is the target world index of source world `w`.
    pub fn from_indices(source: &'a Frame, target: &'a Frame, image: Vec<usize>) -> Self {
        assert_eq!(image.len(), source.num_worlds());
        assert!(image.iter().all(|&v| v < target.num_worlds()));
        FrameMap {
            source,
            target,
            image,
        }
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    fn check_agents(&self) -> Result<(), FrameError> {
        if self.source.agents() != self.target.agents() {
            Err(FrameError::AgentMismatch {
                source_agents: self.source.agents(),
                target_agents: self.target.agents(),
            })
        } else {
            Ok(())
        }
    }

    /// Forward condition: `w ~_i w'` implies `f(w) ~'_i f(w')`.
    pub fn is_weak_morphism(&self) -> Result<bool, FrameError> {
        self.check_agents()?;
        Ok(self.forward_holds())
    }

    fn forward_holds(&self) -> bool {
        self.source
            .partitions()
            .iter()
            .zip(self.target.partitions())
            .all(|(src, dst)| {
                src.blocks().iter().all(|block| {
                    let b = dst.block_of(self.image[block[0]]);
                    block.iter().all(|&w| dst.block_of(self.image[w]) == b)
                })
            })
    }

    /// Back condition: every `v' ~'_i f(u)` is `f(v)` for some `v ~_i u`.
    fn back_holds(&self) -> bool {
        self.source
            .partitions()
            .iter()
            .zip(self.target.partitions())
            .all(|(src, dst)| {
                src.blocks().iter().all(|block| {
                    let hit: BTreeSet<usize> = block.iter().map(|&w| self.image[w]).collect();
                    block.iter().all(|&u| {
                        dst.block(dst.block_of(self.image[u]))
                            .iter()
                            .all(|v| hit.contains(v))
                    })
                })
            })
    }

    /// Bounded (p-)morphism: both the forward and the back condition.
    pub fn is_bounded_morphism(&self) -> Result<bool, FrameError> {
        self.check_agents()?;
        Ok(self.forward_holds() && self.back_holds())
    }
}

/// `ℱ`: worlds are the feasible global states, `s ~_i t` iff `s_i = t_i`.
/// World `k` of the result is state `k` of `sgs`.
pub fn sgs_to_frame(sgs: &GlobalStateSpace) -> Frame {
    let worlds: Vec<Label> = (0..sgs.num_states()).map(|s| sgs.state_label(s)).collect();
    let partitions = (0..sgs.agents())
        .map(|i| {
            let keys: Vec<usize> = sgs.states().iter().map(|s| s[i]).collect();
            Partition::from_keys(&keys)
        })
        .collect();
    Frame::from_partitions(worlds, partitions).expect("valid global state space yields a frame")
}

/// Result of `𝒢`: the global state space of a frame together with the
/// diagonal `Δ`.
#[derive(Debug, Clone)]
pub struct Diagonal {
    pub sgs: GlobalStateSpace,
    /// `map[w]` is the state index of `Δ(w)`.
    pub map: Vec<usize>,
}

impl Diagonal {
    pub fn is_injective(&self) -> bool {
        self.map.iter().collect::<BTreeSet<_>>().len() == self.map.len()
    }
}

/// `𝒢`: local states of agent `i` are the `~_i` classes, feasible states
/// the image of `Δ(w) = ([w]_1, …, [w]_n)`.
pub fn frame_to_sgs(frame: &Frame) -> Diagonal {
    let locals: Vec<Vec<Label>> = frame
        .partitions()
        .iter()
        .map(|p| {
            p.blocks()
                .iter()
                .map(|b| Label::tuple(b.iter().map(|&w| frame.world(w).clone())))
                .collect()
        })
        .collect();
    let tuples: Vec<Vec<usize>> = (0..frame.num_worlds())
        .map(|w| frame.partitions().iter().map(|p| p.block_of(w)).collect())
        .collect();
    let sgs = GlobalStateSpace::from_indices(locals, tuples.clone())
        .expect("diagonal image is a valid global state space");
    let map = tuples
        .iter()
        .map(|t| sgs.state_of_indices(t).expect("tuple is a state"))
        .collect();
    Diagonal { sgs, map }
}
