//! Dowker's nerve and Vietoris complexes of a relation, and exact rational
//! homology.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frames::{index_labels, Frame};
use crate::label::Label;
use crate::{BettiVector, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("element {0} of X listed twice")]
    DuplicateX(Label),
    #[error("element {0} of Y listed twice")]
    DuplicateY(Label),
    #[error("pair ({0}, _) names an element not in X")]
    UnknownX(Label),
    #[error("pair (_, {0}) names an element not in Y")]
    UnknownY(Label),
    #[error("complex has more than {max} faces")]
    FaceBudget { max: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationFile {
    pub x: Vec<Label>,
    pub y: Vec<Label>,
    pub pairs: Vec<(Label, Label)>,
}

/// `R ⊆ X × Y` with pairs as index pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    x: Vec<Label>,
    y: Vec<Label>,
    pairs: BTreeSet<(usize, usize)>,
}

impl Relation {
    pub fn new(
        x: Vec<Label>,
        y: Vec<Label>,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, ComplexError> {
        index_labels(&x).map_err(ComplexError::DuplicateX)?;
        index_labels(&y).map_err(ComplexError::DuplicateY)?;
        let pairs: BTreeSet<(usize, usize)> = pairs.into_iter().collect();
        assert!(
            pairs.iter().all(|&(a, b)| a < x.len() && b < y.len()),
            "pair index out of range"
        );
        Ok(Relation { x, y, pairs })
    }

    pub fn from_file(file: &RelationFile) -> Result<Self, ComplexError> {
        let xi = index_labels(&file.x).map_err(ComplexError::DuplicateX)?;
        let yi = index_labels(&file.y).map_err(ComplexError::DuplicateY)?;
        let pairs = file
            .pairs
            .iter()
            .map(|(a, b)| {
                let a = *xi.get(a).ok_or_else(|| ComplexError::UnknownX(a.clone()))?;
                let b = *yi.get(b).ok_or_else(|| ComplexError::UnknownY(b.clone()))?;
                Ok((a, b))
            })
            .collect::<Result<BTreeSet<_>, ComplexError>>()?;
        Ok(Relation {
            x: file.x.clone(),
            y: file.y.clone(),
            pairs,
        })
    }

    pub fn to_file(&self) -> RelationFile {
        RelationFile {
            x: self.x.clone(),
            y: self.y.clone(),
            pairs: self
                .pairs
                .iter()
                .map(|&(a, b)| (self.x[a].clone(), self.y[b].clone()))
                .collect(),
        }
    }

    pub fn x(&self) -> &[Label] {
        &self.x
    }

    pub fn y(&self) -> &[Label] {
        &self.y
    }

    pub fn pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.pairs
    }

    pub fn transpose(&self) -> Relation {
        Relation {
            x: self.y.clone(),
            y: self.x.clone(),
            pairs: self.pairs.iter().map(|&(a, b)| (b, a)).collect(),
        }
    }
}

/// `X` = worlds, `Y` = the blocks of every agent's partition, labelled
/// `(agent, (members…))`, and `x R y` iff `x ∈ y`.
pub fn relation_from_frame(frame: &Frame) -> Relation {
    let mut y = Vec::new();
    let mut pairs = Vec::new();
    for (a, p) in frame.partitions().iter().enumerate() {
        for block in p.blocks() {
            let members = Label::tuple(block.iter().map(|&w| frame.world(w).clone()));
            for &w in block {
                pairs.push((w, y.len()));
            }
            y.push(Label::tuple([Label::Int(a as i64 + 1), members]));
        }
    }
    Relation::new(frame.worlds().to_vec(), y, pairs).expect("blocks of distinct agents are tagged")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexFile {
    pub maximal_faces: Vec<Vec<Label>>,
}

/// A finite simplicial complex given by its maximal faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertices: Vec<Label>,
    // sorted vertex indices, pairwise non-contained, sorted
    maximal: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    /// Faces may be given in any order and need not be maximal; empty faces
    /// are ignored. Vertex indices refer to `vertices`.
    pub fn new(vertices: Vec<Label>, faces: impl IntoIterator<Item = Vec<usize>>) -> Self {
        let mut faces: Vec<Vec<usize>> = faces
            .into_iter()
            .map(|mut f| {
                f.sort_unstable();
                f.dedup();
                f
            })
            .filter(|f| !f.is_empty())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        // larger faces first so containment only needs to look back
        faces.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        let mut maximal: Vec<Vec<usize>> = Vec::new();
        for f in faces {
            if !maximal.iter().any(|m| is_subset(&f, m)) {
                maximal.push(f);
            }
        }
        maximal.sort();
        SimplicialComplex { vertices, maximal }
    }

    /// Vertex set is the union of the faces, in first-seen order.
    pub fn from_file(file: &ComplexFile) -> Self {
        let mut vertices: Vec<Label> = Vec::new();
        let mut seen = std::collections::BTreeMap::new();
        let faces: Vec<Vec<usize>> = file
            .maximal_faces
            .iter()
            .map(|f| {
                f.iter()
                    .map(|v| {
                        *seen.entry(v.clone()).or_insert_with(|| {
                            vertices.push(v.clone());
                            vertices.len() - 1
                        })
                    })
                    .collect()
            })
            .collect();
        Self::new(vertices, faces)
    }

    pub fn to_file(&self) -> ComplexFile {
        ComplexFile {
            maximal_faces: self
                .maximal
                .iter()
                .map(|f| f.iter().map(|&v| self.vertices[v].clone()).collect())
                .collect(),
        }
    }

    pub fn vertices(&self) -> &[Label] {
        &self.vertices
    }

    pub fn maximal_faces(&self) -> &[Vec<usize>] {
        &self.maximal
    }

    /// Highest face dimension; `None` for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        self.maximal.iter().map(|f| f.len() - 1).max()
    }

    /// Same complex up to vertex labels: equal sets of labelled maximal
    /// faces.
    pub fn same_faces(&self, other: &SimplicialComplex) -> bool {
        let labelled = |k: &SimplicialComplex| -> BTreeSet<BTreeSet<Label>> {
            k.maximal
                .iter()
                .map(|f| f.iter().map(|&v| k.vertices[v].clone()).collect())
                .collect()
        };
        labelled(self) == labelled(other)
    }

    /// All faces grouped by dimension, each group sorted.
    pub fn faces(&self, max_faces: usize) -> Result<Vec<Vec<Vec<usize>>>, ComplexError> {
        let budget = ComplexError::FaceBudget { max: max_faces };
        let Some(dim) = self.dimension() else {
            return Ok(Vec::new());
        };
        if dim + 1 >= usize::BITS as usize || (1usize << (dim + 1)) - 1 > max_faces {
            return Err(budget);
        }
        let mut by_dim: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); dim + 1];
        let mut total = 0usize;
        for f in &self.maximal {
            for mask in 1usize..1 << f.len() {
                let face: Vec<usize> = (0..f.len()).filter(|i| mask >> i & 1 == 1).map(|i| f[i]).collect();
                if by_dim[face.len() - 1].insert(face) {
                    total += 1;
                    if total > max_faces {
                        return Err(budget);
                    }
                }
            }
        }
        Ok(by_dim.into_iter().map(|s| s.into_iter().collect()).collect())
    }

    /// Graphviz rendering of the 1-skeleton; 2-faces appear as comments.
    pub fn to_dot(&self, max_faces: usize) -> Result<String, ComplexError> {
        let faces = self.faces(max_faces)?;
        let name = |v: usize| self.vertices[v].to_string();
        let mut out = String::from("graph complex {\n");
        if let Some(vs) = faces.first() {
            for v in vs {
                let _ = writeln!(out, "  \"{}\";", name(v[0]));
            }
        }
        if let Some(es) = faces.get(1) {
            for e in es {
                let _ = writeln!(out, "  \"{}\" -- \"{}\";", name(e[0]), name(e[1]));
            }
        }
        if let Some(ts) = faces.get(2) {
            for t in ts {
                let _ = writeln!(out, "  // face {} {} {}", name(t[0]), name(t[1]), name(t[2]));
            }
        }
        out.push_str("}\n");
        Ok(out)
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    let mut it = b.iter();
    a.iter().all(|x| it.by_ref().any(|y| y == x))
}

/// Simplices are sets of `Y` elements with a common witness in `X`.
/// Elements of `Y` related to nothing are not vertices.
pub fn nerve(r: &Relation) -> SimplicialComplex {
    let used: BTreeSet<usize> = r.pairs.iter().map(|&(_, b)| b).collect();
    let renumber: std::collections::BTreeMap<usize, usize> =
        used.iter().enumerate().map(|(k, &b)| (b, k)).collect();
    let vertices = used.iter().map(|&b| r.y[b].clone()).collect();
    let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); r.x.len()];
    for &(a, b) in &r.pairs {
        fibers[a].push(renumber[&b]);
    }
    SimplicialComplex::new(vertices, fibers)
}

/// Simplices are sets of `X` elements with a common witness in `Y`.
pub fn vietoris(r: &Relation) -> SimplicialComplex {
    nerve(&r.transpose())
}

/// Homology summary of a complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Homology {
    pub betti: BettiVector,
    pub euler: i64,
    /// Connected components of the 1-skeleton.
    pub components: usize,
    pub face_counts: Vec<usize>,
}

/// Rational Betti numbers `b_k = c_k − rank ∂_k − rank ∂_{k+1}`.
pub fn betti(k: &SimplicialComplex, max_faces: usize) -> Result<Homology, ComplexError> {
    let faces = k.faces(max_faces)?;
    let counts: Vec<usize> = faces.iter().map(Vec::len).collect();
    // ranks[d] = rank of ∂_d : C_d → C_{d-1}; ∂_0 = 0
    let mut ranks = vec![0usize; faces.len() + 1];
    for d in 1..faces.len() {
        ranks[d] = boundary_matrix(&faces[d - 1], &faces[d]).rank_exact();
    }
    let betti = (0..faces.len())
        .map(|d| counts[d] - ranks[d] - ranks[d + 1])
        .collect();
    let euler = counts
        .iter()
        .enumerate()
        .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum();
    let components = match faces.first() {
        None => 0,
        Some(vs) => {
            let mut uf = UnionFind::<usize>::new(k.vertices().len());
            for e in faces.get(1).into_iter().flatten() {
                uf.union(e[0], e[1]);
            }
            vs.iter().map(|v| uf.find(v[0])).collect::<BTreeSet<_>>().len()
        }
    };
    Ok(Homology {
        betti,
        euler,
        components,
        face_counts: counts,
    })
}

/// `∂_d` with one row per `d`-face and one column per `(d−1)`-face;
/// deleting the `i`-th vertex carries sign `(−1)^i`.
pub fn boundary_matrix(lower: &[Vec<usize>], upper: &[Vec<usize>]) -> IntMatrix {
    let mut m = IntMatrix::new(lower.len());
    for f in upper {
        let row = (0..f.len()).map(|i| {
            let mut g = f.clone();
            g.remove(i);
            let col = lower.binary_search(&g).expect("faces are downward closed");
            (col, if i % 2 == 0 { 1 } else { -1 })
        });
        m.push_row(row);
    }
    m
}

fn trimmed(b: &[usize]) -> &[usize] {
    let end = b.iter().rposition(|&x| x != 0).map_or(0, |p| p + 1);
    &b[..end]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DowkerReport {
    pub nerve: Homology,
    pub vietoris: Homology,
    /// Betti vectors agree after trailing zeros are dropped.
    pub equal: bool,
}

pub fn dowker_check(r: &Relation, max_faces: usize) -> Result<DowkerReport, ComplexError> {
    let n = betti(&nerve(r), max_faces)?;
    let v = betti(&vietoris(r), max_faces)?;
    let equal = trimmed(&n.betti) == trimmed(&v.betti);
    if !equal {
        log::error!("Betti numbers differ: nerve {:?}, Vietoris {:?}", n.betti, v.betti);
    }
    Ok(DowkerReport {
        nerve: n,
        vietoris: v,
        equal,
    })
}
