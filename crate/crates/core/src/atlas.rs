//! Groupoid atlases in orbit-partition form.
//!
//! Each local groupoid is an equivalence relation on its patch, so it is
//! stored as the partition of the patch into orbits (connected
//! components). The structure maps between local groupoids for `α ≤ β`
//! are implicit: they exist exactly when axiom (ii) below holds.
//!
//! Axioms checked for every `α ≤ β`:
//! 1. `X_α ∩ X_β` is a union of `α`-orbits;
//! 2. every `α`-orbit inside `X_α ∩ X_β` lies in a single `β`-orbit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frames::{index_labels, Frame};
use crate::label::Label;
use crate::partition::Partition;

/// Largest agent count accepted by [`atlas_subdivided`].
pub const MAX_SUBDIVIDED_AGENTS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtlasError {
    #[error("point {0} listed twice")]
    DuplicatePoint(Label),
    #[error("coordinate {0} listed twice")]
    DuplicateCoordinate(Label),
    #[error("coordinate {coord}: unknown point {point}")]
    UnknownPoint { coord: Label, point: Label },
    #[error("unknown coordinate {0}")]
    UnknownCoordinate(Label),
    #[error("coordinate {coord}: point {point} repeated in patch")]
    DuplicatePatchPoint { coord: Label, point: Label },
    #[error("coordinate {coord}: orbit point {point} is outside the patch")]
    OrbitOutsidePatch { coord: Label, point: Label },
    #[error("coordinate {coord}: point {point} lies in two orbits")]
    OrbitOverlap { coord: Label, point: Label },
    #[error("coordinate {coord}: patch point {point} is in no orbit")]
    PatchNotCovered { coord: Label, point: Label },
    #[error("coordinate {coord}: empty orbit")]
    EmptyOrbit { coord: Label },
    #[error("axiom (i) fails for {alpha} <= {beta}: orbit {orbit:?} is split by the patch of {beta}")]
    SplitOrbit {
        alpha: Label,
        beta: Label,
        orbit: Vec<Label>,
    },
    #[error("axiom (ii) fails for {alpha} <= {beta}: orbit {orbit:?} meets several {beta}-orbits")]
    UnrefinedOrbit {
        alpha: Label,
        beta: Label,
        orbit: Vec<Label>,
    },
    #[error("{agents} agents give too many coordinates (limit {max})")]
    TooManyAgents { agents: usize, max: usize },
    #[error("empty window: need a < b, got {a}..{b}")]
    EmptyWindow { a: i64, b: i64 },
    #[error("map is not defined on point {0}")]
    NotTotal(Label),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordFile {
    pub id: Label,
    pub patch: Vec<Label>,
    pub orbits: Vec<Vec<Label>>,
}

/// On-disk atlas: reflexive pairs of `leq` are implied.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtlasFile {
    pub points: Vec<Label>,
    pub coords: Vec<CoordFile>,
    #[serde(default)]
    pub leq: Vec<(Label, Label)>,
}

/// One local groupoid: its patch and the orbits partitioning it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coordinate {
    id: Label,
    patch: Vec<usize>,
    orbits: Vec<Vec<usize>>,
    orbit_of: Vec<Option<usize>>,
}

impl Coordinate {
    pub fn id(&self) -> &Label {
        &self.id
    }

    /// Patch point indices, ascending.
    pub fn patch(&self) -> &[usize] {
        &self.patch
    }

    /// Orbits, each ascending, ordered by smallest point.
    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn orbit_of(&self, x: usize) -> Option<usize> {
        self.orbit_of[x]
    }

    pub fn in_patch(&self, x: usize) -> bool {
        self.orbit_of[x].is_some()
    }

    /// Both points in the patch and in one orbit.
    pub fn same_orbit(&self, x: usize, y: usize) -> bool {
        matches!((self.orbit_of[x], self.orbit_of[y]), (Some(a), Some(b)) if a == b)
    }
}

/// Coordinate data before validation: id, patch, orbits (point indices).
#[derive(Debug, Clone)]
pub struct CoordSpec {
    pub id: Label,
    pub patch: Vec<usize>,
    pub orbits: Vec<Vec<usize>>,
}

impl CoordSpec {
    /// A coordinate covering every point, with the blocks of `p` as orbits.
    pub fn total(id: Label, p: &Partition) -> Self {
        CoordSpec {
            id,
            patch: (0..p.len()).collect(),
            orbits: p.blocks().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupoidAtlas {
    points: Vec<Label>,
    point_index: BTreeMap<Label, usize>,
    coords: Vec<Coordinate>,
    coord_index: BTreeMap<Label, usize>,
    // non-reflexive pairs α ≤ β
    leq: BTreeSet<(usize, usize)>,
}

impl GroupoidAtlas {
    /// Checks structure and both axioms.
    pub fn new(
        points: Vec<Label>,
        coords: Vec<CoordSpec>,
        leq: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, AtlasError> {
        let point_index = index_labels(&points).map_err(AtlasError::DuplicatePoint)?;
        let coord_ids: Vec<Label> = coords.iter().map(|c| c.id.clone()).collect();
        let coord_index = index_labels(&coord_ids).map_err(AtlasError::DuplicateCoordinate)?;
        let n = points.len();
        let built = coords
            .into_iter()
            .map(|c| build_coord(c, &points))
            .collect::<Result<Vec<_>, _>>()?;
        let leq = leq.into_iter().filter(|(a, b)| a != b).collect();
        let atlas = GroupoidAtlas {
            points,
            point_index,
            coords: built,
            coord_index,
            leq,
        };
        debug_assert!(atlas.coords.iter().all(|c| c.orbit_of.len() == n));
        atlas.check_axioms()?;
        Ok(atlas)
    }

    pub fn from_file(file: &AtlasFile) -> Result<Self, AtlasError> {
        let point_index = index_labels(&file.points).map_err(AtlasError::DuplicatePoint)?;
        let lookup = |coord: &Label, p: &Label| {
            point_index
                .get(p)
                .copied()
                .ok_or_else(|| AtlasError::UnknownPoint {
                    coord: coord.clone(),
                    point: p.clone(),
                })
        };
        let mut coords = Vec::with_capacity(file.coords.len());
        for c in &file.coords {
            let patch = c
                .patch
                .iter()
                .map(|p| lookup(&c.id, p))
                .collect::<Result<Vec<_>, _>>()?;
            let orbits = c
                .orbits
                .iter()
                .map(|o| o.iter().map(|p| lookup(&c.id, p)).collect())
                .collect::<Result<Vec<Vec<usize>>, _>>()?;
            coords.push(CoordSpec {
                id: c.id.clone(),
                patch,
                orbits,
            });
        }
        let coord_ids: BTreeMap<&Label, usize> =
            file.coords.iter().enumerate().map(|(k, c)| (&c.id, k)).collect();
        let find = |id: &Label| {
            coord_ids
                .get(id)
                .copied()
                .ok_or_else(|| AtlasError::UnknownCoordinate(id.clone()))
        };
        let leq = file
            .leq
            .iter()
            .map(|(a, b)| Ok((find(a)?, find(b)?)))
            .collect::<Result<Vec<_>, AtlasError>>()?;
        Self::new(file.points.clone(), coords, leq)
    }

    pub fn to_file(&self) -> AtlasFile {
        let names = |xs: &[usize]| xs.iter().map(|&x| self.points[x].clone()).collect();
        AtlasFile {
            points: self.points.clone(),
            coords: self
                .coords
                .iter()
                .map(|c| CoordFile {
                    id: c.id.clone(),
                    patch: names(&c.patch),
                    orbits: c.orbits.iter().map(|o| names(o)).collect(),
                })
                .collect(),
            leq: self
                .leq
                .iter()
                .map(|&(a, b)| (self.coords[a].id.clone(), self.coords[b].id.clone()))
                .collect(),
        }
    }

    /// Re-checks axioms (i) and (ii) over every `α ≤ β`.
    pub fn check_axioms(&self) -> Result<(), AtlasError> {
        for &(a, b) in &self.leq {
            let (alpha, beta) = (&self.coords[a], &self.coords[b]);
            for orbit in &alpha.orbits {
                let inside = orbit.iter().filter(|&&x| beta.in_patch(x)).count();
                if inside == 0 {
                    continue;
                }
                if inside < orbit.len() {
                    return Err(AtlasError::SplitOrbit {
                        alpha: alpha.id.clone(),
                        beta: beta.id.clone(),
                        orbit: self.labels(orbit),
                    });
                }
                let target = beta.orbit_of[orbit[0]];
                if orbit.iter().any(|&x| beta.orbit_of[x] != target) {
                    return Err(AtlasError::UnrefinedOrbit {
                        alpha: alpha.id.clone(),
                        beta: beta.id.clone(),
                        orbit: self.labels(orbit),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn labels(&self, xs: &[usize]) -> Vec<Label> {
        xs.iter().map(|&x| self.points[x].clone()).collect()
    }

    pub fn points(&self) -> &[Label] {
        &self.points
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn point(&self, x: usize) -> &Label {
        &self.points[x]
    }

    pub fn point_index(&self, p: &Label) -> Option<usize> {
        self.point_index.get(p).copied()
    }

    pub fn coords(&self) -> &[Coordinate] {
        &self.coords
    }

    pub fn coord(&self, c: usize) -> &Coordinate {
        &self.coords[c]
    }

    pub fn coord_index(&self, id: &Label) -> Option<usize> {
        self.coord_index.get(id).copied()
    }

    /// `α ≤ β`, reflexive.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        a == b || self.leq.contains(&(a, b))
    }

    /// Non-reflexive `≤` pairs.
    pub fn leq_pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.leq
    }

    /// Some coordinate has `x` and `y` in one orbit.
    pub fn adjacent(&self, x: usize, y: usize) -> bool {
        self.coords.iter().any(|c| c.same_orbit(x, y))
    }

    /// Graphviz rendering with one cluster per coordinate; orbits are
    /// drawn as chains.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph atlas {\n");
        for p in &self.points {
            let _ = writeln!(out, "  \"{p}\";");
        }
        for (k, c) in self.coords.iter().enumerate() {
            let _ = writeln!(out, "  subgraph \"cluster_{k}\" {{");
            let _ = writeln!(out, "    label=\"{}\";", c.id);
            for orbit in &c.orbits {
                for pair in orbit.windows(2) {
                    let _ = writeln!(
                        out,
                        "    \"{}\" -- \"{}\";",
                        self.points[pair[0]], self.points[pair[1]]
                    );
                }
            }
            out.push_str("  }\n");
        }
        for &(a, b) in &self.leq {
            let _ = writeln!(out, "  // {} <= {}", self.coords[a].id, self.coords[b].id);
        }
        out.push_str("}\n");
        out
    }
}

fn build_coord(spec: CoordSpec, points: &[Label]) -> Result<Coordinate, AtlasError> {
    let n = points.len();
    let id = spec.id;
    let mut in_patch = vec![false; n];
    for &x in &spec.patch {
        if in_patch[x] {
            return Err(AtlasError::DuplicatePatchPoint {
                coord: id,
                point: points[x].clone(),
            });
        }
        in_patch[x] = true;
    }
    let mut orbit_of: Vec<Option<usize>> = vec![None; n];
    let mut orbits: Vec<Vec<usize>> = Vec::with_capacity(spec.orbits.len());
    for orbit in spec.orbits {
        if orbit.is_empty() {
            return Err(AtlasError::EmptyOrbit { coord: id });
        }
        let mut orbit = orbit;
        orbit.sort_unstable();
        for &x in &orbit {
            if !in_patch[x] {
                return Err(AtlasError::OrbitOutsidePatch {
                    coord: id,
                    point: points[x].clone(),
                });
            }
            if orbit_of[x].is_some() {
                return Err(AtlasError::OrbitOverlap {
                    coord: id,
                    point: points[x].clone(),
                });
            }
            orbit_of[x] = Some(orbits.len());
        }
        orbits.push(orbit);
    }
    if let Some(x) = (0..n).find(|&x| in_patch[x] && orbit_of[x].is_none()) {
        return Err(AtlasError::PatchNotCovered {
            coord: id,
            point: points[x].clone(),
        });
    }
    // canonical orbit order: by smallest point
    orbits.sort_unstable_by_key(|o| o[0]);
    for (k, o) in orbits.iter().enumerate() {
        for &x in o {
            orbit_of[x] = Some(k);
        }
    }
    let mut patch = spec.patch;
    patch.sort_unstable();
    Ok(Coordinate {
        id,
        patch,
        orbits,
        orbit_of,
    })
}

/// Validates raw atlas data against the structure rules and both axioms.
pub fn validate_atlas(file: &AtlasFile) -> Result<GroupoidAtlas, AtlasError> {
    GroupoidAtlas::from_file(file)
}

/// One coordinate per agent (id = agent number), discrete order, every
/// patch the whole world set.
pub fn atlas_from_frame(frame: &Frame) -> GroupoidAtlas {
    let coords = frame
        .partitions()
        .iter()
        .enumerate()
        .map(|(a, p)| CoordSpec::total(Label::Int(a as i64 + 1), p))
        .collect();
    GroupoidAtlas::new(frame.worlds().to_vec(), coords, std::iter::empty())
        .expect("discrete order makes the axioms hold")
}

/// Agents (1-based) of the coordinate with bitmask `mask` in the
/// subdivided atlas.
pub fn agents_of_mask(mask: usize) -> BTreeSet<usize> {
    (0..usize::BITS as usize)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| i + 1)
        .collect()
}

/// Coordinate `k` of [`atlas_subdivided`] is the agent set with bitmask
/// `k + 1`.
pub fn subdivided_coord_agents(k: usize) -> BTreeSet<usize> {
    agents_of_mask(k + 1)
}

/// Coordinates are the non-empty agent sets `α` ordered by reverse
/// inclusion; the `α`-orbits are the classes of `⋂_{i∈α} ~_i`.
pub fn atlas_subdivided(frame: &Frame) -> Result<GroupoidAtlas, AtlasError> {
    let n = frame.agents();
    if n > MAX_SUBDIVIDED_AGENTS {
        return Err(AtlasError::TooManyAgents {
            agents: n,
            max: MAX_SUBDIVIDED_AGENTS,
        });
    }
    let masks: Vec<usize> = (1..1usize << n).collect();
    let mut partitions: Vec<Partition> = Vec::with_capacity(masks.len());
    for &mask in &masks {
        // meet with the partition of the set minus its lowest agent
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let p = if rest == 0 {
            frame.partitions()[low].clone()
        } else {
            partitions[rest - 1].meet(&frame.partitions()[low])
        };
        partitions.push(p);
    }
    let coords = masks
        .iter()
        .zip(&partitions)
        .map(|(&mask, p)| {
            let id = Label::tuple(agents_of_mask(mask).into_iter().map(|a| Label::Int(a as i64)));
            CoordSpec::total(id, p)
        })
        .collect();
    let leq = masks.iter().flat_map(|&a| {
        masks
            .iter()
            .filter(move |&&b| a & b == b)
            .map(move |&b| (a - 1, b - 1))
    });
    GroupoidAtlas::new(frame.worlds().to_vec(), coords, leq)
}

/// Label of the bottom coordinate of [`line_window`].
pub fn minus_infinity() -> Label {
    Label::from("-inf")
}

/// The line restricted to `a..=b`: one coordinate `n` for each unit step
/// `{n, n+1}` (a single orbit) and a coordinate `-inf` below all of them,
/// covering every point with singleton orbits.
pub fn line_window(a: i64, b: i64) -> Result<GroupoidAtlas, AtlasError> {
    if a >= b {
        return Err(AtlasError::EmptyWindow { a, b });
    }
    let points: Vec<Label> = (a..=b).map(Label::Int).collect();
    let len = points.len();
    let mut coords: Vec<CoordSpec> = (0..len - 1)
        .map(|k| CoordSpec {
            id: Label::Int(a + k as i64),
            patch: vec![k, k + 1],
            orbits: vec![vec![k, k + 1]],
        })
        .collect();
    coords.push(CoordSpec::total(minus_infinity(), &Partition::discrete(len)));
    let bottom = len - 1;
    GroupoidAtlas::new(points, coords, (0..len - 1).map(|k| (bottom, k)))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("element {0} listed twice")]
    DuplicateElement(Label),
    #[error("the group has no elements")]
    Empty,
    #[error("Cayley table must be {0}x{0}")]
    TableShape(usize),
    #[error("unknown element {0}")]
    UnknownElement(Label),
    #[error("no two-sided identity")]
    NoIdentity,
    #[error("{0} has no inverse")]
    NoInverse(Label),
    #[error("({0}{1}){2} != {0}({1}{2})")]
    NotAssociative(Label, Label, Label),
    #[error("subgroup {0} listed twice")]
    DuplicateSubgroup(Label),
    #[error("unknown subgroup {0}")]
    UnknownSubgroup(Label),
    #[error("{id} is not a subgroup: {reason}")]
    NotSubgroup { id: Label, reason: String },
    #[error("{small} is not contained in {large}")]
    NotIncluded { small: Label, large: Label },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupFile {
    pub id: Label,
    pub elements: Vec<Label>,
}

/// On-disk group data: `table[a][b]` is the product `a·b` of the `a`-th
/// and `b`-th listed elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupActionFile {
    pub elements: Vec<Label>,
    pub table: Vec<Vec<Label>>,
    pub subgroups: Vec<SubgroupFile>,
    #[serde(default)]
    pub inclusions: Vec<(Label, Label)>,
}

/// A finite group with a family of subgroups acting by left
/// multiplication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupAction {
    elements: Vec<Label>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    subgroups: Vec<(Label, Vec<usize>)>,
    inclusions: Vec<(usize, usize)>,
}

impl FiniteGroupAction {
    pub fn from_file(file: &GroupActionFile) -> Result<Self, GroupError> {
        let n = file.elements.len();
        if n == 0 {
            return Err(GroupError::Empty);
        }
        let index = index_labels(&file.elements).map_err(GroupError::DuplicateElement)?;
        let find = |l: &Label| {
            index
                .get(l)
                .copied()
                .ok_or_else(|| GroupError::UnknownElement(l.clone()))
        };
        if file.table.len() != n || file.table.iter().any(|r| r.len() != n) {
            return Err(GroupError::TableShape(n));
        }
        let table = file
            .table
            .iter()
            .map(|r| r.iter().map(find).collect())
            .collect::<Result<Vec<Vec<usize>>, _>>()?;
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or(GroupError::NoIdentity)?;
        let inverse = (0..n)
            .map(|x| {
                (0..n)
                    .find(|&y| table[x][y] == identity && table[y][x] == identity)
                    .ok_or_else(|| GroupError::NoInverse(file.elements[x].clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(GroupError::NotAssociative(
                            file.elements[a].clone(),
                            file.elements[b].clone(),
                            file.elements[c].clone(),
                        ));
                    }
                }
            }
        }
        let ids: Vec<Label> = file.subgroups.iter().map(|s| s.id.clone()).collect();
        let sub_index = index_labels(&ids).map_err(GroupError::DuplicateSubgroup)?;
        let mut subgroups = Vec::with_capacity(file.subgroups.len());
        for s in &file.subgroups {
            let members: BTreeSet<usize> =
                s.elements.iter().map(find).collect::<Result<_, _>>()?;
            let not_sub = |reason: &str| GroupError::NotSubgroup {
                id: s.id.clone(),
                reason: reason.to_string(),
            };
            if members.is_empty() {
                return Err(not_sub("empty"));
            }
            if !members.contains(&identity) {
                return Err(not_sub("missing the identity"));
            }
            for &a in &members {
                if !members.contains(&inverse[a]) {
                    return Err(not_sub("not closed under inverses"));
                }
                for &b in &members {
                    if !members.contains(&table[a][b]) {
                        return Err(not_sub("not closed under products"));
                    }
                }
            }
            subgroups.push((s.id.clone(), members.into_iter().collect::<Vec<_>>()));
        }
        let mut inclusions = Vec::with_capacity(file.inclusions.len());
        for (small, large) in &file.inclusions {
            let s = *sub_index
                .get(small)
                .ok_or_else(|| GroupError::UnknownSubgroup(small.clone()))?;
            let l = *sub_index
                .get(large)
                .ok_or_else(|| GroupError::UnknownSubgroup(large.clone()))?;
            let big: BTreeSet<usize> = subgroups[l].1.iter().copied().collect();
            if !subgroups[s].1.iter().all(|x| big.contains(x)) {
                return Err(GroupError::NotIncluded {
                    small: small.clone(),
                    large: large.clone(),
                });
            }
            inclusions.push((s, l));
        }
        Ok(FiniteGroupAction {
            elements: file.elements.clone(),
            table,
            identity,
            inverse,
            subgroups,
            inclusions,
        })
    }

    pub fn elements(&self) -> &[Label] {
        &self.elements
    }

    pub fn multiply(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn subgroups(&self) -> &[(Label, Vec<usize>)] {
        &self.subgroups
    }

    /// Orbits of `H` acting on the left: the right cosets `H·g`.
    pub fn orbit_partition(&self, subgroup: usize) -> Partition {
        let h = &self.subgroups[subgroup].1;
        let keys: Vec<usize> = (0..self.elements.len())
            .map(|g| h.iter().map(|&x| self.table[x][g]).min().expect("non-empty"))
            .collect();
        Partition::from_keys(&keys)
    }
}

/// Single-domain atlas of a group action: one coordinate per subgroup,
/// orbits the right cosets, `≤` the declared inclusions.
pub fn atlas_from_group_action(action: &FiniteGroupAction) -> Result<GroupoidAtlas, AtlasError> {
    let coords = action
        .subgroups
        .iter()
        .enumerate()
        .map(|(k, (id, _))| CoordSpec::total(id.clone(), &action.orbit_partition(k)))
        .collect();
    GroupoidAtlas::new(action.elements.clone(), coords, action.inclusions.iter().copied())
}

/// A coordinate orbit whose image is not a local frame of the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalFrameViolation {
    pub coord: Label,
    pub orbit: Vec<Label>,
}

/// Resolves a label map into a total point function `src → dst`.
pub fn point_map(
    src: &GroupoidAtlas,
    dst: &GroupoidAtlas,
    map: &BTreeMap<Label, Label>,
) -> Result<Vec<usize>, AtlasError> {
    src.points()
        .iter()
        .map(|p| {
            let q = map.get(p).ok_or_else(|| AtlasError::NotTotal(p.clone()))?;
            dst.point_index(q).ok_or_else(|| AtlasError::UnknownPoint {
                coord: Label::from("map"),
                point: q.clone(),
            })
        })
        .collect()
}

/// First source orbit whose image lies in no single orbit of any target
/// coordinate, if any. A set is a local frame iff it sits inside one
/// orbit, so checking whole orbits suffices.
pub fn weak_morphism_violation(
    src: &GroupoidAtlas,
    dst: &GroupoidAtlas,
    f: &[usize],
) -> Option<LocalFrameViolation> {
    assert_eq!(f.len(), src.num_points(), "point map is not total");
    for c in src.coords() {
        for orbit in c.orbits() {
            let image: BTreeSet<usize> = orbit.iter().map(|&x| f[x]).collect();
            let first = *image.iter().next().expect("orbits are non-empty");
            let ok = dst
                .coords()
                .iter()
                .any(|d| image.iter().all(|&y| d.same_orbit(first, y)));
            if !ok {
                return Some(LocalFrameViolation {
                    coord: c.id().clone(),
                    orbit: src.labels(orbit),
                });
            }
        }
    }
    None
}

/// `f` preserves local frames.
pub fn is_weak_atlas_morphism(src: &GroupoidAtlas, dst: &GroupoidAtlas, f: &[usize]) -> bool {
    weak_morphism_violation(src, dst, f).is_none()
}
