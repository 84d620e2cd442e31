//! Curves, framings and the path-object atlas.
//!
//! A curve is a weak morphism from the line into an atlas. Only
//! eventually-constant curves are representable: a [`Windowed`] sequence
//! stores the values on `N⁻..=N⁺` and is constant outside. Framings use the
//! same encoding with coordinate indices as values.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atlas::{atlas_subdivided, subdivided_coord_agents, AtlasError, CoordSpec, GroupoidAtlas};
use crate::frames::Frame;
use crate::label::Label;
use crate::sgs::{GlobalStateSpace, Run, SgsError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("a sequence needs at least one value")]
    Empty,
    #[error("unknown point {0}")]
    UnknownPoint(Label),
    #[error("unknown coordinate {0}")]
    UnknownCoordinate(Label),
    #[error("value index {0} is outside the atlas")]
    OutOfRange(usize),
    #[error("curve is not constant left of 0: f({index}) differs from f(0)")]
    NotLeftStabilized { index: i64 },
    #[error("HC(s^({k}), s^({next})) is not contained in S: {missing:?} is missing", next = k + 1)]
    HypercubeViolation { k: usize, missing: Vec<Label> },
    #[error("a single agent cannot move between distinct states (s^({k}) to s^({next}))", next = k + 1)]
    SingleAgentStep { k: usize },
    #[error("cap must be positive")]
    ZeroCap,
    #[error("empty window: need a <= b, got {a}..{b}")]
    EmptyWindow { a: i64, b: i64 },
    #[error("the framing does not frame the {which} curve: {failure}")]
    NotFramed {
        which: &'static str,
        failure: FramingFailure,
    },
    #[error("the curve has no framing")]
    NoFraming,
    #[error(transparent)]
    Atlas(#[from] AtlasError),
    #[error(transparent)]
    Sgs(#[from] SgsError),
}

/// On-disk curve or framing: values on `window_start..`, constant beyond
/// both ends.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowedFile {
    pub window_start: i64,
    pub values: Vec<Label>,
}

/// An eventually-constant map `ℤ → {0..k}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Windowed {
    start: i64,
    values: Vec<usize>,
}

/// A curve: values are point indices.
pub type Curve = Windowed;
/// A framing: values are coordinate indices.
pub type Framing = Windowed;

impl Windowed {
    pub fn new(start: i64, values: Vec<usize>) -> Result<Self, PathError> {
        if values.is_empty() {
            return Err(PathError::Empty);
        }
        Ok(Windowed { start, values })
    }

    pub fn constant(start: i64, value: usize) -> Self {
        Windowed {
            start,
            values: vec![value],
        }
    }

    /// `N⁻`.
    pub fn lo(&self) -> i64 {
        self.start
    }

    /// `N⁺`.
    pub fn hi(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn at(&self, n: i64) -> usize {
        let k = (n - self.start).clamp(0, self.values.len() as i64 - 1);
        self.values[k as usize]
    }

    /// Same map with the shortest window: repeated tail values dropped.
    pub fn normalized(&self) -> Self {
        let mut values = self.values.clone();
        while values.len() > 1 && values[values.len() - 1] == values[values.len() - 2] {
            values.pop();
        }
        let lead = values.windows(2).take_while(|w| w[0] == w[1]).count();
        Windowed {
            start: self.start + lead as i64,
            values: values.split_off(lead),
        }
    }

    /// Equal as maps on `ℤ`.
    pub fn same_map(&self, other: &Windowed) -> bool {
        self.normalized() == other.normalized()
    }

    fn file(&self, names: impl Fn(usize) -> Label) -> WindowedFile {
        WindowedFile {
            window_start: self.start,
            values: self.values.iter().map(|&v| names(v)).collect(),
        }
    }
}

/// Range of `m` whose steps `m → m+1` can differ for either sequence.
fn step_range(a: &Windowed, b: &Windowed) -> std::ops::RangeInclusive<i64> {
    a.lo().min(b.lo()) - 1..=a.hi().max(b.hi())
}

pub fn curve_from_file(atlas: &GroupoidAtlas, file: &WindowedFile) -> Result<Curve, PathError> {
    let values = file
        .values
        .iter()
        .map(|p| {
            atlas
                .point_index(p)
                .ok_or_else(|| PathError::UnknownPoint(p.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Windowed::new(file.window_start, values)
}

pub fn curve_to_file(atlas: &GroupoidAtlas, c: &Curve) -> WindowedFile {
    c.file(|v| atlas.point(v).clone())
}

pub fn framing_from_file(atlas: &GroupoidAtlas, file: &WindowedFile) -> Result<Framing, PathError> {
    let values = file
        .values
        .iter()
        .map(|id| {
            atlas
                .coord_index(id)
                .ok_or_else(|| PathError::UnknownCoordinate(id.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Windowed::new(file.window_start, values)
}

pub fn framing_to_file(atlas: &GroupoidAtlas, b: &Framing) -> WindowedFile {
    b.file(|v| atlas.coord(v).id().clone())
}

fn check_points(atlas: &GroupoidAtlas, c: &Curve) -> Result<(), PathError> {
    match c.values.iter().find(|&&v| v >= atlas.num_points()) {
        Some(&v) => Err(PathError::OutOfRange(v)),
        None => Ok(()),
    }
}

/// Every step `{f(n), f(n+1)}` lies in one orbit of some coordinate.
pub fn is_curve(atlas: &GroupoidAtlas, c: &Curve) -> Result<bool, PathError> {
    check_points(atlas, c)?;
    Ok(c.values
        .windows(2)
        .all(|w| w[0] == w[1] || atlas.adjacent(w[0], w[1])))
}

/// Stabilization data of a represented curve; every such curve is a free
/// path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub n_minus: i64,
    pub n_plus: i64,
    pub left: Label,
    pub right: Label,
}

/// Tightest `N⁻ ≤ N⁺` and the end values.
pub fn classify(atlas: &GroupoidAtlas, c: &Curve) -> Classification {
    let n = c.normalized();
    Classification {
        n_minus: n.lo(),
        n_plus: n.hi(),
        left: atlas.point(n.at(n.lo())).clone(),
        right: atlas.point(n.at(n.hi())).clone(),
    }
}

/// Left tail equals `a0`.
pub fn is_based_at(c: &Curve, a0: usize) -> bool {
    c.values[0] == a0
}

/// Run `f(1), …, f(N⁺)` of a curve in the atlas of the frame of `g`
/// (point `k` is state `k`), at least `f(1)`.
pub fn run_from_curve(g: &GlobalStateSpace, c: &Curve) -> Result<Run, PathError> {
    if let Some(&v) = c.values.iter().find(|&&v| v >= g.num_states()) {
        return Err(PathError::OutOfRange(v));
    }
    let zero = c.at(0);
    if let Some(index) = (c.lo() - 1..0).find(|&n| c.at(n) != zero) {
        return Err(PathError::NotLeftStabilized { index });
    }
    let states = (1..=c.hi().max(1)).map(|n| c.at(n)).collect();
    Ok(Run::from_indices(g, states)?)
}

/// Curve through the run with `f(2k) = s^(k)`, constant `s^(1)` below 2,
/// and midpoint `(t_1, s_2, …, s_n)` at `2k+1` where `s = s^(k)`,
/// `t = s^(k+1)`.
pub fn run_to_curve(g: &GlobalStateSpace, r: &Run) -> Result<Curve, PathError> {
    let states = r.states();
    let mut values = vec![states[0]];
    for (k, w) in states.windows(2).enumerate() {
        let (s, t) = (w[0], w[1]);
        let k = k + 1;
        let hc = g.hypercube_interval(s, t);
        if let Some(missing) = hc.missing.first() {
            return Err(PathError::HypercubeViolation {
                k,
                missing: g.tuple_labels(missing),
            });
        }
        if g.agents() == 1 && s != t {
            return Err(PathError::SingleAgentStep { k });
        }
        let mut mid = g.state(s).to_vec();
        mid[0] = g.state(t)[0];
        let mid = g.state_of_indices(&mid).expect("midpoint lies in HC(s, t)");
        values.push(mid);
        values.push(t);
    }
    Ok(Windowed { start: 2, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FramingFailure {
    #[error("condition (i) fails at m = {m}: f(m) is outside the patch of beta(m)")]
    NotInPatch { m: i64 },
    #[error("condition (ii) fails at m = {m}: no coordinate above beta(m) and beta(m+1) joins f(m) to f(m+1)")]
    NoWitness { m: i64 },
}

/// Witness `b` for the step `m → m+1` of a framing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub m: i64,
    pub b: usize,
}

/// Checks both framing conditions; on success returns, for every step
/// that can matter, the first coordinate `b ≥ β(m), β(m+1)` carrying it.
pub fn framing_witnesses(
    atlas: &GroupoidAtlas,
    beta: &Framing,
    f: &Curve,
) -> Result<Vec<Witness>, FramingFailure> {
    let range = step_range(beta, f);
    for m in *range.start()..=*range.end() + 1 {
        if !atlas.coord(beta.at(m)).in_patch(f.at(m)) {
            return Err(FramingFailure::NotInPatch { m });
        }
    }
    range
        .map(|m| {
            step_witness(atlas, beta.at(m), beta.at(m + 1), f.at(m), f.at(m + 1))
                .map(|b| Witness { m, b })
                .ok_or(FramingFailure::NoWitness { m })
        })
        .collect()
}

fn step_witness(atlas: &GroupoidAtlas, a: usize, a2: usize, x: usize, y: usize) -> Option<usize> {
    (0..atlas.coords().len())
        .find(|&b| atlas.leq(a, b) && atlas.leq(a2, b) && atlas.coord(b).same_orbit(x, y))
}

pub fn is_framing(atlas: &GroupoidAtlas, beta: &Framing, f: &Curve) -> bool {
    framing_witnesses(atlas, beta, f).is_ok()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration<T> {
    pub items: Vec<T>,
    pub truncated: bool,
}

/// All framings of `f` on `f`'s window, in lexicographic order of their
/// coordinate sequences, at most `cap` of them.
pub fn enumerate_framings(
    atlas: &GroupoidAtlas,
    f: &Curve,
    cap: usize,
) -> Result<Enumeration<Framing>, PathError> {
    if cap == 0 {
        return Err(PathError::ZeroCap);
    }
    check_points(atlas, f)?;
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(f.values.len());
    let truncated = framing_dfs(atlas, f, cap, &mut prefix, &mut out);
    Ok(Enumeration {
        items: out
            .into_iter()
            .map(|values| Windowed {
                start: f.start,
                values,
            })
            .collect(),
        truncated,
    })
}

// Returns true once a framing beyond the cap is seen.
fn framing_dfs(
    atlas: &GroupoidAtlas,
    f: &Curve,
    cap: usize,
    prefix: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) -> bool {
    let k = prefix.len();
    if k == f.values.len() {
        if out.len() == cap {
            return true;
        }
        out.push(prefix.clone());
        return false;
    }
    let x = f.values[k];
    for a in 0..atlas.coords().len() {
        if !atlas.coord(a).in_patch(x) {
            continue;
        }
        if k > 0 && step_witness(atlas, prefix[k - 1], a, f.values[k - 1], x).is_none() {
            continue;
        }
        prefix.push(a);
        let stop = framing_dfs(atlas, f, cap, prefix, out);
        prefix.pop();
        if stop {
            return true;
        }
    }
    false
}

/// Ladder equivalence: `f(m) ~_{β(m)} f′(m)` for every `m`.
pub fn curves_equivalent_under(
    atlas: &GroupoidAtlas,
    beta: &Framing,
    f: &Curve,
    f2: &Curve,
) -> Result<bool, PathError> {
    framing_witnesses(atlas, beta, f).map_err(|failure| PathError::NotFramed {
        which: "first",
        failure,
    })?;
    framing_witnesses(atlas, beta, f2).map_err(|failure| PathError::NotFramed {
        which: "second",
        failure,
    })?;
    let lo = beta.lo().min(f.lo()).min(f2.lo());
    let hi = beta.hi().max(f.hi()).max(f2.hi());
    Ok((lo..=hi).all(|m| atlas.coord(beta.at(m)).same_orbit(f.at(m), f2.at(m))))
}

/// All curves with window exactly `a..=b`, lexicographic, at most `cap`.
pub fn enumerate_curves(
    atlas: &GroupoidAtlas,
    a: i64,
    b: i64,
    cap: usize,
) -> Result<Enumeration<Curve>, PathError> {
    if cap == 0 {
        return Err(PathError::ZeroCap);
    }
    if a > b {
        return Err(PathError::EmptyWindow { a, b });
    }
    let len = (b - a + 1) as usize;
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut prefix = Vec::with_capacity(len);
    let truncated = curve_dfs(atlas, len, cap, &mut prefix, &mut out);
    Ok(Enumeration {
        items: out
            .into_iter()
            .map(|values| Windowed { start: a, values })
            .collect(),
        truncated,
    })
}

fn curve_dfs(
    atlas: &GroupoidAtlas,
    len: usize,
    cap: usize,
    prefix: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) -> bool {
    if prefix.len() == len {
        if out.len() == cap {
            return true;
        }
        out.push(prefix.clone());
        return false;
    }
    for x in 0..atlas.num_points() {
        if let Some(&prev) = prefix.last() {
            if prev != x && !atlas.adjacent(prev, x) {
                continue;
            }
        }
        prefix.push(x);
        let stop = curve_dfs(atlas, len, cap, prefix, out);
        prefix.pop();
        if stop {
            return true;
        }
    }
    false
}

/// Finite restriction of the path-object atlas to one window.
#[derive(Debug, Clone)]
pub struct PathObject {
    pub atlas: GroupoidAtlas,
    /// Point `k` of `atlas` is `curves[k]`.
    pub curves: Vec<Curve>,
    /// Coordinate `k` of `atlas` is `framings[k]`.
    pub framings: Vec<Framing>,
    pub truncated: bool,
}

/// Points are the curves on `a..=b`, coordinates the framings of those
/// curves on the same window, patches the curves each framing frames,
/// orbits the ladder classes, and `β ≤ β′` pointwise. Point and
/// coordinate labels are tuples of the underlying labels.
pub fn path_object(
    atlas: &GroupoidAtlas,
    a: i64,
    b: i64,
    cap: usize,
) -> Result<PathObject, PathError> {
    let curves = enumerate_curves(atlas, a, b, cap)?;
    let mut truncated = curves.truncated;
    let mut framings: BTreeSet<Framing> = BTreeSet::new();
    'outer: for f in &curves.items {
        let e = enumerate_framings(atlas, f, cap)?;
        truncated |= e.truncated;
        for beta in e.items {
            if framings.len() == cap && !framings.contains(&beta) {
                truncated = true;
                break 'outer;
            }
            framings.insert(beta);
        }
    }
    if truncated {
        log::warn!("path object enumeration hit the cap of {cap}; result is truncated");
    }
    let framings: Vec<Framing> = framings.into_iter().collect();
    let window: Vec<i64> = (a..=b).collect();
    let coords = framings
        .iter()
        .map(|beta| {
            let mut classes: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
            for (k, f) in curves.items.iter().enumerate() {
                if !is_framing(atlas, beta, f) {
                    continue;
                }
                let key = window
                    .iter()
                    .map(|&m| atlas.coord(beta.at(m)).orbit_of(f.at(m)).expect("framed"))
                    .collect();
                classes.entry(key).or_default().push(k);
            }
            let patch = classes.values().flatten().copied().collect();
            CoordSpec {
                id: Label::tuple(beta.values.iter().map(|&c| atlas.coord(c).id().clone())),
                patch,
                orbits: classes.into_values().collect(),
            }
        })
        .collect();
    let mut leq = Vec::new();
    for (i, p) in framings.iter().enumerate() {
        for (j, q) in framings.iter().enumerate() {
            if i != j && window.iter().all(|&m| atlas.leq(p.at(m), q.at(m))) {
                leq.push((i, j));
            }
        }
    }
    let points = curves
        .items
        .iter()
        .map(|f| Label::tuple(f.values.iter().map(|&x| atlas.point(x).clone())))
        .collect();
    let result = GroupoidAtlas::new(points, coords, leq)?;
    Ok(PathObject {
        atlas: result,
        curves: curves.items,
        framings,
        truncated,
    })
}

/// Idle agents of a curve in the subdivided atlas of a frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdleReport {
    /// Agents in no ⊆-minimal step witness.
    pub minimal: BTreeSet<usize>,
    /// Agents in no `β(m)` at a step position, over all enumerated framings.
    pub all_framings: BTreeSet<usize>,
    pub framings_truncated: bool,
}

/// Steps are positions `m` with `f(m) ≠ f(m+1)`. The ⊆-minimal agent
/// sets `b` with `f(m) ~_b f(m+1)` are the singletons `{i}` with
/// `f(m) ~_i f(m+1)`, so the minimal answer collects those agents.
pub fn idle_agents(frame: &Frame, f: &Curve, cap: usize) -> Result<IdleReport, PathError> {
    let atlas = atlas_subdivided(frame)?;
    let steps: Vec<i64> = (f.lo()..f.hi()).filter(|&m| f.at(m) != f.at(m + 1)).collect();
    let all: BTreeSet<usize> = (1..=frame.agents()).collect();
    let framings = enumerate_framings(&atlas, f, cap)?;
    if framings.items.is_empty() {
        return Err(PathError::NoFraming);
    }
    let mut busy_minimal = BTreeSet::new();
    for &m in &steps {
        for (i, p) in frame.partitions().iter().enumerate() {
            if p.same_block(f.at(m), f.at(m + 1)) {
                busy_minimal.insert(i + 1);
            }
        }
    }
    let mut busy_all = BTreeSet::new();
    for beta in &framings.items {
        for &m in &steps {
            busy_all.extend(subdivided_coord_agents(beta.at(m)));
        }
    }
    Ok(IdleReport {
        minimal: all.difference(&busy_minimal).copied().collect(),
        all_framings: all.difference(&busy_all).copied().collect(),
        framings_truncated: framings.truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::atlas_from_frame;
    use crate::fixtures::{f2, hypercube, one_world, s5_example, square};
    use crate::frames::sgs_to_frame;
    use proptest::prelude::*;

    fn w(atlas: &GroupoidAtlas, name: &str) -> usize {
        atlas.point_index(&Label::from(name)).unwrap()
    }

    fn curve(atlas: &GroupoidAtlas, start: i64, names: &[&str]) -> Curve {
        Windowed::new(start, names.iter().map(|n| w(atlas, n)).collect()).unwrap()
    }

    fn set(atlas: &GroupoidAtlas, agents: &[i64]) -> usize {
        atlas
            .coord_index(&Label::tuple(agents.iter().map(|&a| Label::Int(a))))
            .unwrap()
    }

    #[test]
    fn windowed_semantics() {
        let c = Windowed::new(0, vec![4, 4, 5, 5]).unwrap();
        assert_eq!(c.at(-10), 4);
        assert_eq!(c.at(2), 5);
        assert_eq!(c.at(99), 5);
        let n = c.normalized();
        assert_eq!((n.lo(), n.hi()), (1, 2));
        assert!(n.same_map(&c));
        assert_eq!(Windowed::new(3, vec![7, 7]).unwrap().normalized(), Windowed::constant(3, 7));
        assert_eq!(Windowed::new(0, vec![]), Err(PathError::Empty));
    }

    #[test]
    fn is_curve_examples() {
        let a = atlas_from_frame(&f2());
        assert!(is_curve(&a, &curve(&a, 0, &["w2"])).unwrap());
        assert!(is_curve(&a, &curve(&a, 0, &["w0", "w0", "w1", "w1"])).unwrap());
        assert!(!is_curve(&a, &curve(&a, 0, &["w0", "w3"])).unwrap());
        let bad = Windowed::new(0, vec![9]).unwrap();
        assert_eq!(is_curve(&a, &bad), Err(PathError::OutOfRange(9)));
    }

    #[test]
    fn classify_examples() {
        let a = atlas_from_frame(&f2());
        let c = classify(&a, &curve(&a, 0, &["w0", "w0"]));
        assert_eq!(c.n_minus, c.n_plus);
        assert_eq!(c.left, Label::from("w0"));
        let step = curve(&a, 0, &["w0", "w0", "w1", "w1"]);
        let c = classify(&a, &step);
        assert_eq!((c.n_minus, c.n_plus), (1, 2));
        assert_eq!((c.left, c.right), (Label::from("w0"), Label::from("w1")));
        assert!(is_based_at(&step, w(&a, "w0")));
        assert!(!is_based_at(&step, w(&a, "w1")));
    }

    #[test]
    fn run_from_curve_examples() {
        let g = square();
        let a = atlas_from_frame(&sgs_to_frame(&g));
        let s0 = 0;
        let s1 = 1;
        let run = run_from_curve(&g, &Windowed::new(0, vec![s0, s0, s0, s0]).unwrap()).unwrap();
        assert_eq!(run.states(), &[s0, s0, s0]);
        let step = Windowed::new(0, vec![s0, s0, s1, s1]).unwrap();
        assert!(is_curve(&a, &step).unwrap());
        assert_eq!(run_from_curve(&g, &step).unwrap().states(), &[s0, s1, s1]);
        let step = Windowed::new(1, vec![s0, s1]).unwrap();
        assert_eq!(run_from_curve(&g, &step).unwrap().states(), &[s0, s1]);
        let bad = Windowed::new(-2, vec![s1, s0, s0]).unwrap();
        assert_eq!(run_from_curve(&g, &bad), Err(PathError::NotLeftStabilized { index: -3 }));
    }

    #[test]
    fn run_to_curve_square() {
        let g = square();
        let l = |s: &str| Label::from(s);
        let run = Run::new(&g, &[vec![l("a0"), l("b0")], vec![l("a1"), l("b1")]]).unwrap();
        let c = run_to_curve(&g, &run).unwrap();
        let at = |n| g.state_labels(c.at(n));
        assert_eq!(at(2), vec![l("a0"), l("b0")]);
        assert_eq!(at(3), vec![l("a1"), l("b0")]);
        assert_eq!(at(4), vec![l("a1"), l("b1")]);
        assert_eq!(at(-5), at(2));
        assert_eq!(at(50), at(4));
        let a = atlas_from_frame(&sgs_to_frame(&g));
        assert!(is_curve(&a, &c).unwrap());

        let constant = Run::from_indices(&g, vec![3, 3, 3]).unwrap();
        let c = run_to_curve(&g, &constant).unwrap();
        assert_eq!(c.normalized().values(), &[3]);
    }

    #[test]
    fn run_to_curve_errors() {
        let g = s5_example();
        let l = |s: &str| Label::from(s);
        let run = Run::new(&g, &[vec![l("x1"), l("y1")], vec![l("x2"), l("y3")]]).unwrap();
        match run_to_curve(&g, &run) {
            Err(PathError::HypercubeViolation { k, missing }) => {
                assert_eq!(k, 1);
                assert!(missing == vec![l("x1"), l("y3")] || missing == vec![l("x2"), l("y1")]);
            }
            other => panic!("unexpected {other:?}"),
        }
        let line = hypercube(&[&["p", "q"]]);
        let run = Run::from_indices(&line, vec![0, 1]).unwrap();
        assert_eq!(run_to_curve(&line, &run), Err(PathError::SingleAgentStep { k: 1 }));
        let stay = Run::from_indices(&line, vec![0, 0]).unwrap();
        assert!(run_to_curve(&line, &stay).is_ok());
    }

    #[test]
    fn framing_examples() {
        let a = atlas_subdivided(&f2()).unwrap();
        let step = curve(&a, 0, &["w0", "w1"]);
        let one = set(&a, &[1]);
        let two = set(&a, &[2]);
        let both = set(&a, &[1, 2]);
        let c = |v| Windowed::constant(0, v);
        assert!(is_framing(&a, &c(one), &step));
        assert!(!is_framing(&a, &c(two), &step));
        let ws = framing_witnesses(&a, &c(both), &step).unwrap();
        assert!(ws.iter().any(|x| x.m == 0 && x.b == one));
        assert_eq!(
            framing_witnesses(&a, &c(two), &step),
            Err(FramingFailure::NoWitness { m: 0 })
        );
    }

    #[test]
    fn discrete_order_forces_constant_class() {
        // on the unsubdivided atlas a framing cannot change coordinate
        let a = atlas_from_frame(&f2());
        let c = curve(&a, 0, &["w0", "w1", "w3"]);
        assert!(is_curve(&a, &c).unwrap());
        assert!(enumerate_framings(&a, &c, 100).unwrap().items.is_empty());
    }

    #[test]
    fn enumerate_framings_examples() {
        let a = atlas_subdivided(&f2()).unwrap();
        let constant = curve(&a, 0, &["w0"]);
        let e = enumerate_framings(&a, &constant, 100).unwrap();
        assert_eq!(e.items.len(), 3);
        assert!(!e.truncated);
        let step = curve(&a, 0, &["w0", "w1"]);
        let e = enumerate_framings(&a, &step, 100).unwrap();
        let one = set(&a, &[1]);
        let two = set(&a, &[2]);
        let both = set(&a, &[1, 2]);
        let got: Vec<&[usize]> = e.items.iter().map(|b| b.values()).collect();
        assert_eq!(got, vec![&[one, one][..], &[one, both], &[both, one], &[both, both]]);
        assert!(!got.iter().any(|v| v.contains(&two)));
        let e = enumerate_framings(&a, &step, 1).unwrap();
        assert_eq!(e.items.len(), 1);
        assert!(e.truncated);
        assert_eq!(enumerate_framings(&a, &step, 0), Err(PathError::ZeroCap));
    }

    #[test]
    fn ladder_examples() {
        let a = atlas_subdivided(&f2()).unwrap();
        let f = curve(&a, 0, &["w0"]);
        let f2_ = curve(&a, 0, &["w1"]);
        let one = Windowed::constant(0, set(&a, &[1]));
        let both = Windowed::constant(0, set(&a, &[1, 2]));
        assert!(curves_equivalent_under(&a, &one, &f, &f2_).unwrap());
        assert!(!curves_equivalent_under(&a, &both, &f, &f2_).unwrap());
        assert!(curves_equivalent_under(&a, &both, &f, &f).unwrap());
        let two = Windowed::constant(0, set(&a, &[2]));
        let step = curve(&a, 0, &["w0", "w1"]);
        assert!(matches!(
            curves_equivalent_under(&a, &two, &step, &f),
            Err(PathError::NotFramed { which: "first", .. })
        ));
    }

    #[test]
    fn path_object_small_cases() {
        let a = atlas_subdivided(&one_world()).unwrap();
        let p = path_object(&a, 0, 3, 10_000).unwrap();
        assert_eq!(p.curves.len(), 1);
        assert!(p.atlas.coords().iter().all(|c| c.patch().len() == 1));

        let a = atlas_subdivided(&f2()).unwrap();
        let p = path_object(&a, 0, 1, 10_000).unwrap();
        assert_eq!(p.curves.len(), 12);
        assert_eq!(p.framings.len(), 7);
        assert!(!p.truncated);
        p.atlas.check_axioms().unwrap();
        crate::atlas::validate_atlas(&p.atlas.to_file()).unwrap();
    }

    #[test]
    fn path_object_points_are_exactly_the_curves() {
        let a = atlas_subdivided(&f2()).unwrap();
        let p = path_object(&a, 0, 2, 10_000).unwrap();
        let n = a.num_points();
        let mut brute = Vec::new();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let c = Windowed::new(0, vec![x, y, z]).unwrap();
                    if is_curve(&a, &c).unwrap() {
                        brute.push(c);
                    }
                }
            }
        }
        assert_eq!(p.curves, brute);
    }

    #[test]
    fn path_object_truncation_still_valid() {
        let a = atlas_subdivided(&f2()).unwrap();
        let p = path_object(&a, 0, 2, 5).unwrap();
        assert!(p.truncated);
        assert!(p.curves.len() <= 5 && p.framings.len() <= 5);
        p.atlas.check_axioms().unwrap();
    }

    #[test]
    fn idle_examples() {
        let frame = f2();
        let a = atlas_subdivided(&frame).unwrap();
        let r = idle_agents(&frame, &curve(&a, 0, &["w0", "w0"]), 1000).unwrap();
        assert_eq!(r.minimal, BTreeSet::from([1, 2]));
        assert_eq!(r.all_framings, BTreeSet::from([1, 2]));
        let r = idle_agents(&frame, &curve(&a, 0, &["w0", "w1"]), 1000).unwrap();
        assert_eq!(r.minimal, BTreeSet::from([2]));
        assert!(r.all_framings.is_empty());
        let r = idle_agents(&frame, &curve(&a, 0, &["w0", "w1", "w3"]), 1000).unwrap();
        assert!(r.minimal.is_empty());
    }

    #[test]
    fn five_agent_step() {
        let names: Vec<Vec<String>> = (1..=5).map(|i| vec![format!("s{i}"), format!("s{i}'")]).collect();
        let refs: Vec<Vec<&str>> = names.iter().map(|v| v.iter().map(String::as_str).collect()).collect();
        let slices: Vec<&[&str]> = refs.iter().map(Vec::as_slice).collect();
        let g = hypercube(&slices);
        let s = g.state_of_indices(&[0, 0, 0, 0, 0]).unwrap();
        let t = g.state_of_indices(&[0, 0, 0, 1, 1]).unwrap();
        assert_eq!(g.step(s, t), BTreeSet::from([1, 2, 3]));
    }

    fn f2_curves(len: usize) -> impl Strategy<Value = Curve> {
        let a = atlas_subdivided(&f2()).unwrap();
        let all = enumerate_curves(&a, 0, len as i64 - 1, 10_000).unwrap().items;
        proptest::sample::select(all)
    }

    proptest! {
        #[test]
        fn framing_monotone_under_supersets(f in f2_curves(3), bits in proptest::collection::vec(0usize..4, 3)) {
            let a = atlas_subdivided(&f2()).unwrap();
            for beta in enumerate_framings(&a, &f, 1000).unwrap().items {
                // coordinate k is mask k+1; widen by or-ing extra agents in
                let wider: Vec<usize> = beta.values().iter().zip(&bits)
                    .map(|(&k, &extra)| ((k + 1) | extra) - 1).collect();
                let wider = Windowed::new(beta.lo(), wider).unwrap();
                prop_assert!(is_framing(&a, &wider, &f));
            }
        }

        #[test]
        fn ladder_is_an_equivalence(f in f2_curves(2), g in f2_curves(2), h in f2_curves(2)) {
            let a = atlas_subdivided(&f2()).unwrap();
            for beta in enumerate_framings(&a, &f, 1000).unwrap().items {
                let eq = |x: &Curve, y: &Curve| curves_equivalent_under(&a, &beta, x, y).unwrap();
                prop_assert!(eq(&f, &f));
                if is_framing(&a, &beta, &g) {
                    prop_assert_eq!(eq(&f, &g), eq(&g, &f));
                    if is_framing(&a, &beta, &h) && eq(&f, &g) && eq(&g, &h) {
                        prop_assert!(eq(&f, &h));
                    }
                }
            }
        }

        #[test]
        fn hypercube_runs_round_trip(sizes in proptest::collection::vec(1usize..4, 2..4),
                                     picks in proptest::collection::vec(any::<prop::sample::Index>(), 1..6)) {
            let locals: Vec<Vec<Label>> = sizes.iter()
                .map(|&k| (0..k as i64).map(Label::Int).collect()).collect();
            let g = GlobalStateSpace::from_indices(locals, crate::fixtures::product(&sizes)).unwrap();
            let states: Vec<usize> = picks.iter().map(|i| i.index(g.num_states())).collect();
            let run = Run::from_indices(&g, states.clone()).unwrap();
            let c = run_to_curve(&g, &run).unwrap();
            let a = atlas_from_frame(&sgs_to_frame(&g));
            prop_assert!(is_curve(&a, &c).unwrap());
            for (k, &s) in states.iter().enumerate() {
                prop_assert_eq!(c.at(2 * (k as i64 + 1)), s);
            }
            let back = run_from_curve(&g, &c).unwrap();
            let evens: Vec<usize> = (1..=states.len()).map(|k| back.states()[2 * k - 1]).collect();
            prop_assert_eq!(evens, states);
        }
    }
}
