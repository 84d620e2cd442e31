//! Small named frames and state spaces used throughout the docs, tests and
//! the `demo` command.

use crate::frames::Frame;
use crate::label::Label;
use crate::partition::Partition;
use crate::sgs::GlobalStateSpace;

/// Worlds `1..=6`; agent 1 relates worlds congruent mod 2, agent 2 mod 3.
pub fn f6() -> Frame {
    let worlds: Vec<Label> = (1..=6).map(Label::Int).collect();
    let mod2 = Partition::from_keys(&(1..=6).map(|w| w % 2).collect::<Vec<_>>());
    let mod3 = Partition::from_keys(&(1..=6).map(|w| w % 3).collect::<Vec<_>>());
    Frame::from_partitions(worlds, vec![mod2, mod3]).expect("valid frame")
}

/// The 2×2 hypercube frame on `w0..w3`: agent 1 blocks `{w0,w1},{w2,w3}`,
/// agent 2 blocks `{w0,w2},{w1,w3}`.
pub fn f2() -> Frame {
    let worlds: Vec<Label> = (0..4).map(|k| Label::Str(format!("w{k}"))).collect();
    let a1 = Partition::from_keys(&[0, 0, 1, 1]);
    let a2 = Partition::from_keys(&[0, 1, 0, 1]);
    Frame::from_partitions(worlds, vec![a1, a2]).expect("valid frame")
}

/// A single world `w` with one agent.
pub fn one_world() -> Frame {
    one_world_agents(1)
}

/// A single world `w` with `agents` agents.
pub fn one_world_agents(agents: usize) -> Frame {
    Frame::from_partitions(vec![Label::from("w")], vec![Partition::discrete(1); agents])
        .expect("valid frame")
}

/// The sensor example: `L_1 = {x1,x2}`, `L_2 = {y1..y5}`, five feasible
/// states.
pub fn s5_example() -> GlobalStateSpace {
    let l = |s: &str| Label::from(s);
    GlobalStateSpace::new(
        vec![
            vec![l("x1"), l("x2")],
            vec![l("y1"), l("y2"), l("y3"), l("y4"), l("y5")],
        ],
        vec![
            vec![l("x1"), l("y1")],
            vec![l("x1"), l("y2")],
            vec![l("x2"), l("y3")],
            vec![l("x2"), l("y4")],
            vec![l("x2"), l("y5")],
        ],
    )
    .expect("valid global state space")
}

/// The full product `{a0,a1} × {b0,b1}`.
pub fn square() -> GlobalStateSpace {
    hypercube(&[&["a0", "a1"], &["b0", "b1"]])
}

/// The full product of the given local state sets.
pub fn hypercube(locals: &[&[&str]]) -> GlobalStateSpace {
    let locals: Vec<Vec<Label>> = locals
        .iter()
        .map(|ls| ls.iter().map(|&s| Label::from(s)).collect())
        .collect();
    let sizes: Vec<usize> = locals.iter().map(Vec::len).collect();
    GlobalStateSpace::from_indices(locals, product(&sizes)).expect("valid hypercube")
}

/// All index tuples of `0..sizes[0] × … × 0..sizes[n-1]`, lexicographic.
pub fn product(sizes: &[usize]) -> Vec<Vec<usize>> {
    sizes.iter().fold(vec![Vec::new()], |acc, &k| {
        acc.into_iter()
            .flat_map(|prefix| {
                (0..k).map(move |x| {
                    let mut t = prefix.clone();
                    t.push(x);
                    t
                })
            })
            .collect()
    })
}
