//! Global state spaces of interpreted systems: feasibility, reachability
//! and hypercube intervals.
//!
//! The environment component is a singleton and is left out of tuples, so
//! a global state is an `n`-tuple of local states, one per agent.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::Label;
use crate::partition::Partition;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SgsError {
    #[error("a global state space needs at least one agent")]
    NoAgents,
    #[error("agent {agent} has no local states")]
    EmptyLocals { agent: usize },
    #[error("agent {agent}: local state {label} listed twice")]
    DuplicateLocal { agent: usize, label: Label },
    #[error("the set of global states is empty")]
    NoStates,
    #[error("state {state} has {found} components, expected {expected}")]
    Arity {
        state: Label,
        found: usize,
        expected: usize,
    },
    #[error("state {state}: {label} is not a local state of agent {agent}")]
    UnknownLocal {
        state: Label,
        agent: usize,
        label: Label,
    },
    #[error("state {0} listed twice")]
    DuplicateState(Label),
    #[error("{0} is not a feasible global state")]
    UnknownState(Label),
    #[error("a run needs at least one state")]
    EmptyRun,
}

/// On-disk form: `{"locals": [[...], ...], "states": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SgsFile {
    pub locals: Vec<Vec<Label>>,
    pub states: Vec<Vec<Label>>,
}

/// Run file: an array of global states.
pub type RunFile = Vec<Vec<Label>>;

/// A set `S` of feasible global states inside `L_1 × … × L_n`.
///
/// States are stored as tuples of local-state indices, sorted
/// lexicographically; state `k` is the `k`-th tuple in that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalStateSpace {
    locals: Vec<Vec<Label>>,
    local_index: Vec<BTreeMap<Label, usize>>,
    states: Vec<Vec<usize>>,
    state_index: BTreeMap<Vec<usize>, usize>,
    // buckets[i][l]: states whose i-th component is local state l
    buckets: Vec<Vec<Vec<usize>>>,
}

impl GlobalStateSpace {
    /// Validates labelled input. Duplicate states are rejected.
    pub fn new(locals: Vec<Vec<Label>>, states: Vec<Vec<Label>>) -> Result<Self, SgsError> {
        let local_index = index_locals(&locals)?;
        let mut tuples = Vec::with_capacity(states.len());
        let mut seen = BTreeSet::new();
        for s in &states {
            let name = Label::tuple(s.iter().cloned());
            if s.len() != locals.len() {
                return Err(SgsError::Arity {
                    state: name,
                    found: s.len(),
                    expected: locals.len(),
                });
            }
            let t = s
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    local_index[i]
                        .get(l)
                        .copied()
                        .ok_or_else(|| SgsError::UnknownLocal {
                            state: name.clone(),
                            agent: i + 1,
                            label: l.clone(),
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if !seen.insert(t.clone()) {
                return Err(SgsError::DuplicateState(name));
            }
            tuples.push(t);
        }
        Self::build(locals, local_index, tuples)
    }

    pub fn from_file(file: &SgsFile) -> Result<Self, SgsError> {
        Self::new(file.locals.clone(), file.states.clone())
    }

    /// Builds from index tuples; repeated tuples are merged.
    pub fn from_indices(locals: Vec<Vec<Label>>, states: Vec<Vec<usize>>) -> Result<Self, SgsError> {
        let local_index = index_locals(&locals)?;
        for s in &states {
            if s.len() != locals.len() {
                return Err(SgsError::Arity {
                    state: Label::tuple(s.iter().map(|&k| Label::Int(k as i64))),
                    found: s.len(),
                    expected: locals.len(),
                });
            }
            for (i, &k) in s.iter().enumerate() {
                if k >= locals[i].len() {
                    return Err(SgsError::UnknownLocal {
                        state: Label::tuple(s.iter().map(|&k| Label::Int(k as i64))),
                        agent: i + 1,
                        label: Label::Int(k as i64),
                    });
                }
            }
        }
        Self::build(locals, local_index, states)
    }

    fn build(
        locals: Vec<Vec<Label>>,
        local_index: Vec<BTreeMap<Label, usize>>,
        states: Vec<Vec<usize>>,
    ) -> Result<Self, SgsError> {
        let states: Vec<Vec<usize>> = states
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if states.is_empty() {
            return Err(SgsError::NoStates);
        }
        let state_index = states
            .iter()
            .enumerate()
            .map(|(k, s)| (s.clone(), k))
            .collect();
        let mut buckets: Vec<Vec<Vec<usize>>> =
            locals.iter().map(|l| vec![Vec::new(); l.len()]).collect();
        for (k, s) in states.iter().enumerate() {
            for (i, &l) in s.iter().enumerate() {
                buckets[i][l].push(k);
            }
        }
        Ok(GlobalStateSpace {
            locals,
            local_index,
            states,
            state_index,
            buckets,
        })
    }

    pub fn to_file(&self) -> SgsFile {
        SgsFile {
            locals: self.locals.clone(),
            states: (0..self.num_states()).map(|s| self.state_labels(s)).collect(),
        }
    }

    pub fn agents(&self) -> usize {
        self.locals.len()
    }

    pub fn locals(&self) -> &[Vec<Label>] {
        &self.locals
    }

    /// Index tuples of all feasible states, in canonical order.
    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, s: usize) -> &[usize] {
        &self.states[s]
    }

    pub fn state_labels(&self, s: usize) -> Vec<Label> {
        self.tuple_labels(&self.states[s])
    }

    pub fn tuple_labels(&self, t: &[usize]) -> Vec<Label> {
        t.iter()
            .enumerate()
            .map(|(i, &l)| self.locals[i][l].clone())
            .collect()
    }

    /// The state as a single tuple label, e.g. `(x1,y2)`.
    pub fn state_label(&self, s: usize) -> Label {
        Label::Tuple(self.state_labels(s))
    }

    pub fn state_of_indices(&self, t: &[usize]) -> Option<usize> {
        self.state_index.get(t).copied()
    }

    /// Looks up a feasible state by its component labels.
    pub fn find_state(&self, labels: &[Label]) -> Result<usize, SgsError> {
        let missing = || SgsError::UnknownState(Label::tuple(labels.iter().cloned()));
        if labels.len() != self.agents() {
            return Err(missing());
        }
        let t = labels
            .iter()
            .enumerate()
            .map(|(i, l)| self.local_index[i].get(l).copied())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(missing)?;
        self.state_of_indices(&t).ok_or_else(missing)
    }

    /// `S = L_1 × … × L_n`.
    pub fn is_hypercube(&self) -> bool {
        let product = self
            .locals
            .iter()
            .try_fold(1usize, |acc, l| acc.checked_mul(l.len()));
        product == Some(self.states.len())
    }

    /// Agents (1-based) whose local state agrees in `s` and `t`; empty
    /// when `s → t` does not hold.
    pub fn step(&self, s: usize, t: usize) -> BTreeSet<usize> {
        self.states[s]
            .iter()
            .zip(&self.states[t])
            .enumerate()
            .filter_map(|(i, (a, b))| (a == b).then_some(i + 1))
            .collect()
    }

    /// States `t ≠ s` with `s → t`, ascending.
    pub fn neighbors(&self, s: usize) -> Vec<usize> {
        let mut out = BTreeSet::new();
        for (i, &l) in self.states[s].iter().enumerate() {
            out.extend(self.buckets[i][l].iter().copied().filter(|&t| t != s));
        }
        out.into_iter().collect()
    }

    /// A shortest `→*` path from `s` to `t`, or `None`.
    ///
    /// Among shortest paths, each step keeps as many components as possible
    /// and changes the lowest positions first, so on a hypercube the
    /// two-step path goes through `(t_1, s_2, …, s_n)`.
    pub fn reachable(&self, s: usize, t: usize) -> Option<Vec<usize>> {
        let dist = self.distances_from(t);
        dist[s]?;
        let mut path = vec![s];
        let mut cur = s;
        while cur != t {
            let d = dist[cur].expect("on a shortest path");
            let next = self
                .neighbors(cur)
                .into_iter()
                .filter(|&y| dist[y] == Some(d - 1))
                .min_by_key(|&y| {
                    let changed: Vec<usize> = self.states[cur]
                        .iter()
                        .zip(&self.states[y])
                        .enumerate()
                        .filter_map(|(i, (a, b))| (a != b).then_some(i))
                        .collect();
                    (changed.len(), changed, self.states[y].clone())
                })
                .expect("a predecessor exists on a shortest path");
            path.push(next);
            cur = next;
        }
        Some(path)
    }

    fn distances_from(&self, root: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_states()];
        dist[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap();
            for y in self.neighbors(x) {
                if dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Connected components of the `→` graph, as a partition of state
    /// indices.
    pub fn components(&self) -> Partition {
        let pairs: Vec<(usize, usize)> = self
            .buckets
            .iter()
            .flatten()
            .flat_map(|bucket| bucket.windows(2).map(|w| (w[0], w[1])))
            .collect();
        Partition::from_pairs(self.num_states(), &pairs)
            .expect("bucket entries are state indices")
            .0
    }

    /// `HC(s, t)`: every tuple taking each component from `s` or `t`.
    pub fn hypercube_interval(&self, s: usize, t: usize) -> HypercubeInterval {
        let (a, b) = (&self.states[s], &self.states[t]);
        let differing: Vec<usize> = (0..self.agents()).filter(|&i| a[i] != b[i]).collect();
        let mut tuples = BTreeSet::new();
        for mask in 0u64..(1u64 << differing.len()) {
            let mut x = a.clone();
            for (bit, &i) in differing.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    x[i] = b[i];
                }
            }
            tuples.insert(x);
        }
        let tuples: Vec<Vec<usize>> = tuples.into_iter().collect();
        let missing = tuples
            .iter()
            .filter(|x| !self.state_index.contains_key(*x))
            .cloned()
            .collect();
        HypercubeInterval { tuples, missing }
    }

    /// Every adjacent pair of the run is `→*`-connected.
    pub fn is_feasible_run(&self, run: &Run) -> bool {
        let comps = self.components();
        run.states
            .windows(2)
            .all(|w| comps.same_block(w[0], w[1]))
    }
}

fn index_locals(locals: &[Vec<Label>]) -> Result<Vec<BTreeMap<Label, usize>>, SgsError> {
    if locals.is_empty() {
        return Err(SgsError::NoAgents);
    }
    locals
        .iter()
        .enumerate()
        .map(|(i, ls)| {
            if ls.is_empty() {
                return Err(SgsError::EmptyLocals { agent: i + 1 });
            }
            crate::frames::index_labels(ls).map_err(|label| SgsError::DuplicateLocal {
                agent: i + 1,
                label,
            })
        })
        .collect()
}

/// The tuples of `HC(s, t)` (index form, sorted) and those not in `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypercubeInterval {
    pub tuples: Vec<Vec<usize>>,
    pub missing: Vec<Vec<usize>>,
}

impl HypercubeInterval {
    pub fn contained(&self) -> bool {
        self.missing.is_empty()
    }
}

/// A finite run: a non-empty sequence of feasible states, with no
/// constraint between neighbours.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    states: Vec<usize>,
}

impl Run {
    pub fn new(sgs: &GlobalStateSpace, states: &[Vec<Label>]) -> Result<Self, SgsError> {
        let states = states
            .iter()
            .map(|s| sgs.find_state(s))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_indices(sgs, states)
    }

    pub fn from_indices(sgs: &GlobalStateSpace, states: Vec<usize>) -> Result<Self, SgsError> {
        if states.is_empty() {
            return Err(SgsError::EmptyRun);
        }
        assert!(states.iter().all(|&s| s < sgs.num_states()), "state index out of range");
        Ok(Run { states })
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn to_file(&self, sgs: &GlobalStateSpace) -> RunFile {
        self.states.iter().map(|&s| sgs.state_labels(s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{s5_example, square};

    fn st(g: &GlobalStateSpace, a: &str, b: &str) -> usize {
        g.find_state(&[Label::from(a), Label::from(b)]).unwrap()
    }

    #[test]
    fn validation_errors() {
        let l = |s: &str| Label::from(s);
        assert_eq!(GlobalStateSpace::new(vec![], vec![]), Err(SgsError::NoAgents));
        assert_eq!(
            GlobalStateSpace::new(vec![vec![]], vec![]),
            Err(SgsError::EmptyLocals { agent: 1 })
        );
        assert_eq!(
            GlobalStateSpace::new(vec![vec![l("a")]], vec![]),
            Err(SgsError::NoStates)
        );
        assert!(matches!(
            GlobalStateSpace::new(vec![vec![l("a")]], vec![vec![l("b")]]),
            Err(SgsError::UnknownLocal { agent: 1, .. })
        ));
        assert!(matches!(
            GlobalStateSpace::new(vec![vec![l("a")]], vec![vec![l("a"), l("a")]]),
            Err(SgsError::Arity { found: 2, expected: 1, .. })
        ));
        assert!(matches!(
            GlobalStateSpace::new(vec![vec![l("a")]], vec![vec![l("a")], vec![l("a")]]),
            Err(SgsError::DuplicateState(_))
        ));
    }

    #[test]
    fn hypercube_detection() {
        assert!(square().is_hypercube());
        assert!(!s5_example().is_hypercube());
        let one = GlobalStateSpace::new(
            vec![vec![Label::from("a"), Label::from("b")]],
            vec![vec![Label::from("a")], vec![Label::from("b")]],
        )
        .unwrap();
        assert!(one.is_hypercube());
    }

    #[test]
    fn step_examples() {
        let g = s5_example();
        assert_eq!(g.step(st(&g, "x1", "y1"), st(&g, "x1", "y2")), BTreeSet::from([1]));
        assert!(g.step(st(&g, "x1", "y1"), st(&g, "x2", "y3")).is_empty());
        let s = st(&g, "x2", "y4");
        assert_eq!(g.step(s, s), BTreeSet::from([1, 2]));
    }

    #[test]
    fn reach_changes_lowest_component_first() {
        let g = square();
        let path = g.reachable(st(&g, "a0", "b0"), st(&g, "a1", "b1")).unwrap();
        let labels: Vec<String> = path.iter().map(|&s| g.state_label(s).to_string()).collect();
        assert_eq!(labels, vec!["(a0,b0)", "(a1,b0)", "(a1,b1)"]);
        let s = st(&g, "a1", "b0");
        assert_eq!(g.reachable(s, s), Some(vec![s]));
    }

    #[test]
    fn reach_fails_across_components() {
        let g = s5_example();
        assert_eq!(g.reachable(st(&g, "x1", "y1"), st(&g, "x2", "y3")), None);
    }

    #[test]
    fn component_examples() {
        let g = s5_example();
        let c = g.components();
        assert_eq!(c.num_blocks(), 2);
        let names: Vec<Vec<String>> = c
            .blocks()
            .iter()
            .map(|b| b.iter().map(|&s| g.state_label(s).to_string()).collect())
            .collect();
        assert_eq!(
            names,
            vec![
                vec!["(x1,y1)", "(x1,y2)"],
                vec!["(x2,y3)", "(x2,y4)", "(x2,y5)"]
            ]
        );
        assert_eq!(square().components().num_blocks(), 1);
        let k = 4;
        let locals = vec![(0..k).map(Label::Int).collect::<Vec<_>>()];
        let states = (0..k).map(|x| vec![Label::Int(x)]).collect();
        let one = GlobalStateSpace::new(locals, states).unwrap();
        assert_eq!(one.components().num_blocks(), k as usize);
    }

    #[test]
    fn hypercube_interval_examples() {
        let g = square();
        let hc = g.hypercube_interval(st(&g, "a0", "b0"), st(&g, "a1", "b1"));
        assert_eq!(hc.tuples.len(), 4);
        assert!(hc.contained());
        let s = st(&g, "a0", "b1");
        assert_eq!(g.hypercube_interval(s, s).tuples, vec![g.state(s).to_vec()]);

        let g = s5_example();
        let hc = g.hypercube_interval(st(&g, "x1", "y1"), st(&g, "x2", "y3"));
        assert_eq!(hc.tuples.len(), 4);
        assert!(!hc.contained());
        let missing: Vec<Vec<Label>> = hc.missing.iter().map(|t| g.tuple_labels(t)).collect();
        assert!(missing.contains(&vec![Label::from("x1"), Label::from("y3")]));
    }

    #[test]
    fn feasible_runs() {
        let g = s5_example();
        let l = |a: &str, b: &str| vec![Label::from(a), Label::from(b)];
        let run = Run::new(&g, &[l("x1", "y1"), l("x1", "y2")]).unwrap();
        assert!(g.is_feasible_run(&run));
        let run = Run::new(&g, &[l("x1", "y1"), l("x2", "y3")]).unwrap();
        assert!(!g.is_feasible_run(&run));
        let run = Run::new(&g, &[l("x2", "y5")]).unwrap();
        assert!(g.is_feasible_run(&run));
        assert_eq!(Run::new(&g, &[]), Err(SgsError::EmptyRun));
        assert!(matches!(
            Run::new(&g, &[l("x1", "y3")]),
            Err(SgsError::UnknownState(_))
        ));
    }
}
