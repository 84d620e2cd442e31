use std::collections::BTreeMap;
use std::io::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use epat_core::atlas::{
    atlas_from_frame, atlas_from_group_action, atlas_subdivided, line_window, point_map,
    weak_morphism_violation, AtlasError, GroupoidAtlas,
};
use epat_core::complexes::{betti, dowker_check, nerve, relation_from_frame, vietoris, ComplexError, Homology};
use epat_core::fixtures;
use epat_core::frames::{frame_to_sgs, sgs_to_frame, Frame, Valuation};
use epat_core::logic::{parse, satisfying_set, valid_on, ValidityBudget, Verdict};
use epat_core::paths::{
    classify, curve_to_file, curves_equivalent_under, enumerate_framings, framing_to_file, idle_agents,
    is_based_at, is_curve, path_object, run_to_curve, PathError,
};
use epat_core::sgs::GlobalStateSpace;
use epat_core::{Label, DEFAULT_CAP, DEFAULT_MAX_FACES};

use crate::workspace::Workspace;
use crate::{AtlasCmd, AtlasSource, ComplexCmd, FrameCmd, LogicCmd, PathsCmd, SgsCmd};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

#[derive(Debug)]
pub struct Report {
    pub outcome: Outcome,
    pub text: String,
    pub json: Value,
}

impl Report {
    fn pass(text: impl Into<String>, json: Value) -> Self {
        Report {
            outcome: Outcome::Pass,
            text: text.into(),
            json,
        }
    }

    fn check(ok: bool, text: impl Into<String>, json: Value) -> Self {
        Report {
            outcome: if ok { Outcome::Pass } else { Outcome::Fail },
            text: text.into(),
            json,
        }
    }

    /// A converted artifact: printed as its file format in both modes.
    fn artifact<T: Serialize>(value: &T) -> Result<Self> {
        let json = serde_json::to_value(value)?;
        Ok(Report::pass(serde_json::to_string_pretty(&json)?, json))
    }

    pub fn print(&self, as_json: bool, ws: &Workspace) {
        if as_json {
            let mut out = self.json.clone();
            if let Value::Object(map) = &mut out {
                map.insert("ok".into(), Value::Bool(self.outcome == Outcome::Pass));
                map.insert("inputs".into(), serde_json::to_value(ws.provenance()).expect("serializable"));
            }
            emit(&serde_json::to_string_pretty(&out).expect("serializable"));
        } else {
            emit(self.text.trim_end());
        }
    }
}

// A closed pipe (e.g. `| head`) is not an error worth reporting.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

/// Caps after applying flags, then the budget default, then built-ins.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub cap: usize,
    pub max_faces: usize,
}

impl Budget {
    pub fn resolve(cap: Option<usize>, max_faces: Option<usize>, budget: Option<usize>) -> Self {
        Budget {
            cap: cap.or(budget).unwrap_or(DEFAULT_CAP),
            max_faces: max_faces.or(budget).unwrap_or(DEFAULT_MAX_FACES),
        }
    }
}

/// Prefix for error diagnostics, separating budget overruns from bad input.
pub fn error_kind(e: &anyhow::Error) -> &'static str {
    let budget = e.chain().any(|c| {
        matches!(c.downcast_ref::<ComplexError>(), Some(ComplexError::FaceBudget { .. }))
            || matches!(c.downcast_ref::<AtlasError>(), Some(AtlasError::TooManyAgents { .. }))
            || matches!(c.downcast_ref::<PathError>(), Some(PathError::ZeroCap))
    });
    if budget {
        "budget exceeded"
    } else {
        "input error"
    }
}

/// A label given on the command line: JSON if it looks like JSON,
/// otherwise an integer or bare string.
pub fn parse_label(token: &str) -> Result<Label> {
    let t = token.trim();
    if t.starts_with('[') || t.starts_with('"') {
        serde_json::from_str(t).with_context(|| format!("cannot parse label {t}"))
    } else {
        Ok(Label::from_token(t))
    }
}

fn parse_state(g: &GlobalStateSpace, token: &str) -> Result<usize> {
    let t = token.trim();
    let labels: Vec<Label> = if t.starts_with('[') {
        serde_json::from_str(t).with_context(|| format!("cannot parse state {t}"))?
    } else {
        t.split(',').map(Label::from_token).collect()
    };
    g.find_state(&labels)
        .with_context(|| format!("{t} is not a feasible state"))
}

fn fmt_labels(ls: &[Label]) -> String {
    ls.iter().map(Label::to_string).collect::<Vec<_>>().join(", ")
}

fn fmt_betti(b: &[usize]) -> String {
    format!("({})", b.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
}

pub fn frame(ws: &mut Workspace, cmd: FrameCmd) -> Result<Report> {
    match cmd {
        FrameCmd::Check { file } => {
            let f = ws.frame(&file)?;
            Ok(Report::pass(
                format!("valid frame: {} worlds, {} agents", f.num_worlds(), f.agents()),
                json!({"worlds": f.num_worlds(), "agents": f.agents(), "frame": f.to_file()}),
            ))
        }
        FrameCmd::ToSgs { file } => {
            let f = ws.frame(&file)?;
            let d = frame_to_sgs(&f);
            let diagonal: Vec<(Label, Label)> = d
                .map
                .iter()
                .enumerate()
                .map(|(w, &s)| (f.world(w).clone(), d.sgs.state_label(s)))
                .collect();
            Report::artifact(&json!({
                "sgs": d.sgs.to_file(),
                "diagonal": diagonal,
                "injective": d.is_injective(),
            }))
        }
        FrameCmd::Dot { file } => {
            let f = ws.frame(&file)?;
            let dot = f.to_dot();
            Ok(Report::pass(dot.clone(), json!({"dot": dot})))
        }
    }
}

pub fn sgs(ws: &mut Workspace, cmd: SgsCmd) -> Result<Report> {
    match cmd {
        SgsCmd::Check { file } => {
            let g = ws.sgs(&file)?;
            Ok(Report::pass(
                format!(
                    "valid global state space: {} agents, {} states, hypercube: {}",
                    g.agents(),
                    g.num_states(),
                    if g.is_hypercube() { "yes" } else { "no" }
                ),
                json!({"agents": g.agents(), "states": g.num_states(), "hypercube": g.is_hypercube(), "sgs": g.to_file()}),
            ))
        }
        SgsCmd::ToFrame { file } => Report::artifact(&sgs_to_frame(&ws.sgs(&file)?).to_file()),
        SgsCmd::Reach { file, from, to } => {
            let g = ws.sgs(&file)?;
            let (s, t) = (parse_state(&g, &from)?, parse_state(&g, &to)?);
            match g.reachable(s, t) {
                Some(path) => {
                    let labels: Vec<Label> = path.iter().map(|&x| g.state_label(x)).collect();
                    Ok(Report::pass(
                        format!("reachable in {} steps: {}", path.len() - 1, labels.iter().map(Label::to_string).collect::<Vec<_>>().join(" -> ")),
                        json!({"reachable": true, "path": labels}),
                    ))
                }
                None => Ok(Report::check(false, "unreachable", json!({"reachable": false}))),
            }
        }
        SgsCmd::Components { file } => {
            let g = ws.sgs(&file)?;
            let comps: Vec<Vec<Label>> = g
                .components()
                .blocks()
                .iter()
                .map(|b| b.iter().map(|&s| g.state_label(s)).collect())
                .collect();
            let text = comps
                .iter()
                .enumerate()
                .map(|(k, c)| format!("component {}: {}", k + 1, fmt_labels(c)))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Report::pass(text, json!({"components": comps})))
        }
        SgsCmd::Hc { file, s, t } => {
            let g = ws.sgs(&file)?;
            let hc = g.hypercube_interval(parse_state(&g, &s)?, parse_state(&g, &t)?);
            let tuples: Vec<Vec<Label>> = hc.tuples.iter().map(|x| g.tuple_labels(x)).collect();
            let missing: Vec<Vec<Label>> = hc.missing.iter().map(|x| g.tuple_labels(x)).collect();
            let mut text = format!("HC has {} tuples", tuples.len());
            if missing.is_empty() {
                text.push_str(", all feasible");
            } else {
                for m in &missing {
                    text.push_str(&format!("\nmissing: ({})", fmt_labels(m)));
                }
            }
            Ok(Report::check(
                hc.contained(),
                text,
                json!({"tuples": tuples, "missing": missing, "contained": hc.contained()}),
            ))
        }
        SgsCmd::Feasible { file, run } => {
            let g = ws.sgs(&file)?;
            let r = ws.run(&run, &g)?;
            let ok = g.is_feasible_run(&r);
            Ok(Report::check(
                ok,
                if ok { "feasible run" } else { "infeasible run" },
                json!({"feasible": ok}),
            ))
        }
    }
}

pub fn logic(ws: &mut Workspace, cmd: LogicCmd, budget: &Budget) -> Result<Report> {
    match cmd {
        LogicCmd::Eval {
            frame,
            valuation,
            world,
            formula,
        } => {
            let f = ws.frame(&frame)?;
            let v = match valuation {
                Some(p) => ws.valuation(&p, &f)?,
                None => Valuation::from_sets(f.num_worlds(), BTreeMap::new()),
            };
            let phi = parse(&formula)?;
            let sat = satisfying_set(&f, &v, &phi)?;
            match world {
                Some(w) => {
                    let w = parse_label(&w)?;
                    let holds = sat.contains(f.world_index(&w)?);
                    Ok(Report::pass(holds.to_string(), json!({"world": w, "holds": holds})))
                }
                None => {
                    let worlds = sat.labels(&f);
                    Ok(Report::pass(
                        format!("{{{}}}", fmt_labels(&worlds)),
                        json!({"satisfying": worlds}),
                    ))
                }
            }
        }
        LogicCmd::Valid {
            frame,
            formula,
            samples,
            seed,
        } => {
            let f = ws.frame(&frame)?;
            let phi = parse(&formula)?;
            let verdict = valid_on(
                &f,
                &phi,
                ValidityBudget {
                    exhaustive_limit: budget.cap as u64,
                    samples,
                    seed,
                },
            )?;
            Ok(match verdict {
                Verdict::ProvenValid => Report::pass("valid", json!({"verdict": "valid"})),
                Verdict::SampledNoCounterexample { samples } => Report::pass(
                    format!("no counterexample in {samples} sampled valuations (not a proof)"),
                    json!({"verdict": "sampled", "samples": samples}),
                ),
                Verdict::Counterexample { world, valuation } => {
                    let vals = valuation
                        .iter()
                        .map(|(p, ws)| format!("{p} = {{{}}}", fmt_labels(ws)))
                        .collect::<Vec<_>>()
                        .join(", ");
                    Report::check(
                        false,
                        format!("counterexample at world {world} with {vals}"),
                        json!({"verdict": "counterexample", "world": world, "valuation": valuation}),
                    )
                }
            })
        }
    }
}

fn atlas_summary(a: &GroupoidAtlas) -> String {
    format!(
        "valid atlas: {} points, {} coordinates, {} order pairs",
        a.num_points(),
        a.coords().len(),
        a.leq_pairs().len()
    )
}

pub fn atlas(ws: &mut Workspace, cmd: AtlasCmd) -> Result<Report> {
    match cmd {
        AtlasCmd::Check { file, dot } => {
            let a = ws.atlas(&file)?;
            if dot {
                let d = a.to_dot();
                return Ok(Report::pass(d.clone(), json!({"dot": d})));
            }
            Ok(Report::pass(atlas_summary(&a), json!({"atlas": a.to_file()})))
        }
        AtlasCmd::FromFrame { file } => Report::artifact(&atlas_from_frame(&ws.frame(&file)?).to_file()),
        AtlasCmd::Subdivide { file } => Report::artifact(&atlas_subdivided(&ws.frame(&file)?)?.to_file()),
        AtlasCmd::Line { from, to } => Report::artifact(&line_window(from, to)?.to_file()),
        AtlasCmd::FromGroup { file } => {
            Report::artifact(&atlas_from_group_action(&ws.group(&file)?)?.to_file())
        }
        AtlasCmd::Weakmap { source, target, map } => {
            let src = ws.atlas(&source)?;
            let dst = ws.atlas(&target)?;
            let m = ws.point_map(&map)?;
            let f = point_map(&src, &dst, &m)?;
            Ok(match weak_morphism_violation(&src, &dst, &f) {
                None => Report::pass("weak morphism", json!({"weak_morphism": true})),
                Some(v) => Report::check(
                    false,
                    format!(
                        "not a weak morphism: the image of orbit {{{}}} of coordinate {} is not a local frame",
                        fmt_labels(&v.orbit),
                        v.coord
                    ),
                    json!({"weak_morphism": false, "coordinate": v.coord, "orbit": v.orbit}),
                ),
            })
        }
    }
}

fn load_atlas(ws: &mut Workspace, source: &AtlasSource) -> Result<GroupoidAtlas> {
    match (&source.atlas, &source.frame) {
        (Some(a), None) => {
            if source.subdivided {
                bail!("--subdivided applies to --frame only");
            }
            ws.atlas(a)
        }
        (None, Some(f)) => {
            let frame = ws.frame(f)?;
            Ok(if source.subdivided {
                atlas_subdivided(&frame)?
            } else {
                atlas_from_frame(&frame)
            })
        }
        _ => Err(anyhow!("give exactly one of --atlas and --frame")),
    }
}

fn parse_window(w: &str) -> Result<(i64, i64)> {
    let (a, b) = w
        .split_once(':')
        .ok_or_else(|| anyhow!("window must look like a:b, got {w}"))?;
    let a = a.trim().parse().with_context(|| format!("bad window start in {w}"))?;
    let b = b.trim().parse().with_context(|| format!("bad window end in {w}"))?;
    Ok((a, b))
}

fn fmt_homology(name: &str, h: &Homology) -> String {
    format!(
        "{name}: betti {} euler {} components {} faces {:?}",
        fmt_betti(&h.betti),
        h.euler,
        h.components,
        h.face_counts
    )
}

pub fn paths(ws: &mut Workspace, cmd: PathsCmd, budget: &Budget) -> Result<Report> {
    match cmd {
        PathsCmd::CheckCurve {
            curve,
            source,
            based_at,
        } => {
            let a = load_atlas(ws, &source)?;
            let c = ws.curve(&curve, &a)?;
            if !is_curve(&a, &c)? {
                return Ok(Report::check(false, "not a curve", json!({"curve": false})));
            }
            let cl = classify(&a, &c);
            let mut text = format!(
                "free path: N- = {}, N+ = {}, from {} to {}",
                cl.n_minus, cl.n_plus, cl.left, cl.right
            );
            let mut out = json!({"curve": true, "classification": cl});
            if let Some(p) = based_at {
                let p = parse_label(&p)?;
                let idx = a.point_index(&p).ok_or_else(|| anyhow!("unknown point {p}"))?;
                let based = is_based_at(&c, idx);
                text.push_str(&format!("\nbased at {p}: {}", if based { "yes" } else { "no" }));
                out["based"] = json!(based);
            }
            Ok(Report::pass(text, out))
        }
        PathsCmd::Run2curve { sgs, run } => {
            let g = ws.sgs(&sgs)?;
            let r = ws.run(&run, &g)?;
            let a = atlas_from_frame(&sgs_to_frame(&g));
            match run_to_curve(&g, &r) {
                Ok(c) => Report::artifact(&curve_to_file(&a, &c)),
                Err(e @ (PathError::HypercubeViolation { .. } | PathError::SingleAgentStep { .. })) => {
                    Ok(Report::check(false, e.to_string(), json!({"error": e.to_string()})))
                }
                Err(e) => Err(e.into()),
            }
        }
        PathsCmd::Framings { curve, source } => {
            let a = load_atlas(ws, &source)?;
            let c = ws.curve(&curve, &a)?;
            let e = enumerate_framings(&a, &c, budget.cap)?;
            let files: Vec<_> = e.items.iter().map(|b| framing_to_file(&a, b)).collect();
            let mut text = format!("{} framings{}", files.len(), if e.truncated { " (truncated)" } else { "" });
            for f in &files {
                text.push_str(&format!("\n{}: [{}]", f.window_start, fmt_labels(&f.values)));
            }
            Ok(Report::pass(text, json!({"framings": files, "truncated": e.truncated})))
        }
        PathsCmd::Equiv {
            first,
            second,
            framing,
            source,
        } => {
            let a = load_atlas(ws, &source)?;
            let f = ws.curve(&first, &a)?;
            let g = ws.curve(&second, &a)?;
            let b = ws.framing(&framing, &a)?;
            let eq = curves_equivalent_under(&a, &b, &f, &g)?;
            Ok(Report::check(
                eq,
                if eq { "equivalent" } else { "not equivalent" },
                json!({"equivalent": eq}),
            ))
        }
        PathsCmd::Pathobject { source, window } => {
            let a = load_atlas(ws, &source)?;
            let (lo, hi) = parse_window(&window)?;
            let p = path_object(&a, lo, hi, budget.cap)?;
            let orbits: usize = p.atlas.coords().iter().map(|c| c.orbits().len()).sum();
            let text = format!(
                "{} curves, {} framings, {} ladder classes, {} order pairs{}; both axioms hold",
                p.curves.len(),
                p.framings.len(),
                orbits,
                p.atlas.leq_pairs().len(),
                if p.truncated { " (truncated)" } else { "" }
            );
            Ok(Report::pass(
                text,
                json!({"atlas": p.atlas.to_file(), "truncated": p.truncated}),
            ))
        }
        PathsCmd::Idle { curve, frame } => {
            let f = ws.frame(&frame)?;
            let a = atlas_subdivided(&f)?;
            let c = ws.curve(&curve, &a)?;
            let r = idle_agents(&f, &c, budget.cap)?;
            let set = |s: &std::collections::BTreeSet<usize>| {
                format!("{{{}}}", s.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
            };
            Ok(Report::pass(
                format!(
                    "idle (minimal witnesses): {}\nidle (all framings): {}",
                    set(&r.minimal),
                    set(&r.all_framings)
                ),
                serde_json::to_value(&r)?,
            ))
        }
    }
}

pub fn complex(ws: &mut Workspace, cmd: ComplexCmd, budget: &Budget) -> Result<Report> {
    match cmd {
        ComplexCmd::Nerve { file } => Report::artifact(&nerve(&ws.relation(&file)?).to_file()),
        ComplexCmd::Vietoris { file } => Report::artifact(&vietoris(&ws.relation(&file)?).to_file()),
        ComplexCmd::Betti { file } => {
            let h = betti(&ws.complex(&file)?, budget.max_faces)?;
            Ok(Report::pass(fmt_homology("complex", &h), serde_json::to_value(&h)?))
        }
        ComplexCmd::Dowker { file } => {
            let d = dowker_check(&ws.relation(&file)?, budget.max_faces)?;
            let verdict = if d.equal { "equal" } else { "FAILURE: Betti numbers differ" };
            Ok(Report::check(
                d.equal,
                format!(
                    "{}\n{}\n{verdict}",
                    fmt_homology("nerve", &d.nerve),
                    fmt_homology("vietoris", &d.vietoris)
                ),
                serde_json::to_value(&d)?,
            ))
        }
        ComplexCmd::Dot { file } => {
            let d = ws.complex(&file)?.to_dot(budget.max_faces)?;
            Ok(Report::pass(d.clone(), json!({"dot": d})))
        }
    }
}

pub fn demo_appendix(budget: &Budget) -> Result<Report> {
    let f: Frame = fixtures::f6();
    let r = relation_from_frame(&f);
    let d = dowker_check(&r, budget.max_faces)?;
    let k = nerve(&r);
    let l = vietoris(&r);
    let faces = |c: &epat_core::complexes::SimplicialComplex| {
        c.to_file()
            .maximal_faces
            .iter()
            .map(|x| format!("{{{}}}", fmt_labels(x)))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let ok = d.equal && d.nerve.betti == [1, 2] && d.vietoris.betti == [1, 2, 0];
    let text = format!(
        "frame: worlds 1..6, agent 1 = residues mod 2, agent 2 = residues mod 3\n\
         relation: |X| = {}, |Y| = {}, |R| = {}\n\
         nerve maximal faces: {}\n\
         vietoris maximal faces: {}\n\
         nerve betti: {}\n\
         vietoris betti: {}\n\
         {}",
        r.x().len(),
        r.y().len(),
        r.pairs().len(),
        faces(&k),
        faces(&l),
        fmt_betti(&d.nerve.betti),
        fmt_betti(&d.vietoris.betti),
        if d.equal { "equal after trimming" } else { "FAILURE: Betti numbers differ" }
    );
    Ok(Report::check(
        ok,
        text,
        json!({
            "relation": r.to_file(),
            "nerve": k.to_file(),
            "vietoris": l.to_file(),
            "dowker": d,
        }),
    ))
}
