//! `epat`: command-line access to frames, global state spaces, modal
//! formulas, groupoid atlases, curves and Dowker complexes.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod workspace;

use commands::{Budget, Outcome};
use workspace::Workspace;

#[derive(Parser, Debug)]
#[command(name = "epat", version, about = "Epistemic frames, atlases, paths and complexes")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Cap on enumerated items (curves, framings, valuations).
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Cap on the number of faces of a complex.
    #[arg(long, global = true)]
    max_faces: Option<usize>,
    /// Default for both caps when they are not given.
    #[arg(long, global = true, env = "EPAT_BUDGET", hide_env_values = true)]
    budget: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kripke equivalence frames.
    #[command(subcommand)]
    Frame(FrameCmd),
    /// Global state spaces.
    #[command(subcommand)]
    Sgs(SgsCmd),
    /// Modal formulas over frames.
    #[command(subcommand)]
    Logic(LogicCmd),
    /// Groupoid atlases.
    #[command(subcommand)]
    Atlas(AtlasCmd),
    /// Curves, framings and path objects.
    #[command(subcommand)]
    Paths(PathsCmd),
    /// Nerve and Vietoris complexes, Betti numbers.
    #[command(subcommand)]
    Complex(ComplexCmd),
    /// Built-in worked examples.
    #[command(subcommand)]
    Demo(DemoCmd),
}

#[derive(Subcommand, Debug)]
pub enum FrameCmd {
    /// Validate a frame file.
    Check { file: PathBuf },
    /// Global state space of the frame and the diagonal map.
    ToSgs { file: PathBuf },
    /// Graphviz drawing, one edge colour per agent.
    Dot { file: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum SgsCmd {
    /// Validate a global state space file.
    Check { file: PathBuf },
    /// Frame whose worlds are the feasible states.
    ToFrame { file: PathBuf },
    /// Shortest path between two states.
    Reach {
        file: PathBuf,
        /// State as comma-separated local states or a JSON array.
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
    },
    /// Reachability classes.
    Components { file: PathBuf },
    /// Hypercube interval between two states.
    Hc {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Whether each step of a run stays within one reachability class.
    Feasible {
        file: PathBuf,
        #[arg(long)]
        run: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum LogicCmd {
    /// Evaluate a formula at a world, or list the worlds satisfying it.
    Eval {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        valuation: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        world: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        formula: String,
    },
    /// Validity on a frame over all (or sampled) valuations.
    Valid {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        formula: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum AtlasCmd {
    /// Validate an atlas file against both axioms.
    Check {
        file: PathBuf,
        /// Print a Graphviz drawing instead of the summary.
        #[arg(long)]
        dot: bool,
    },
    /// One coordinate per agent.
    FromFrame { file: PathBuf },
    /// One coordinate per non-empty set of agents.
    Subdivide { file: PathBuf },
    /// The line restricted to a window.
    Line {
        #[arg(long, allow_hyphen_values = true)]
        from: i64,
        #[arg(long, allow_hyphen_values = true)]
        to: i64,
    },
    /// Atlas of a finite group acting on itself through subgroups.
    FromGroup { file: PathBuf },
    /// Whether a point map preserves local frames.
    Weakmap {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        /// JSON list of [source, target] point pairs.
        #[arg(long)]
        map: PathBuf,
    },
}

/// Where the target atlas of a curve comes from.
#[derive(Args, Debug, Clone)]
pub struct AtlasSource {
    /// Atlas file.
    #[arg(long)]
    pub atlas: Option<PathBuf>,
    /// Frame file; its atlas is used.
    #[arg(long)]
    pub frame: Option<PathBuf>,
    /// With --frame, use the subdivided atlas.
    #[arg(long)]
    pub subdivided: bool,
}

#[derive(Subcommand, Debug)]
pub enum PathsCmd {
    /// Check the curve condition and report stabilization bounds.
    CheckCurve {
        curve: PathBuf,
        #[command(flatten)]
        source: AtlasSource,
        /// Also report whether the curve is based at this point.
        #[arg(long, allow_hyphen_values = true)]
        based_at: Option<String>,
    },
    /// Curve through a run of a global state space.
    Run2curve {
        #[arg(long)]
        sgs: PathBuf,
        #[arg(long)]
        run: PathBuf,
    },
    /// All framings of a curve on its window.
    Framings {
        curve: PathBuf,
        #[command(flatten)]
        source: AtlasSource,
    },
    /// Ladder equivalence of two curves under a framing.
    Equiv {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        framing: PathBuf,
        #[command(flatten)]
        source: AtlasSource,
    },
    /// Path-object atlas restricted to a window.
    Pathobject {
        #[command(flatten)]
        source: AtlasSource,
        /// Window as `a:b`.
        #[arg(long, default_value = "0:1", allow_hyphen_values = true)]
        window: String,
    },
    /// Agents idle during a curve in the subdivided atlas of a frame.
    Idle {
        curve: PathBuf,
        #[arg(long)]
        frame: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum ComplexCmd {
    /// Nerve of a relation.
    Nerve { file: PathBuf },
    /// Vietoris complex of a relation.
    Vietoris { file: PathBuf },
    /// Betti numbers of a complex file.
    Betti { file: PathBuf },
    /// Compare the homology of the two complexes of a relation.
    Dowker { file: PathBuf },
    /// Graphviz drawing of the 1-skeleton of a complex file.
    Dot { file: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum DemoCmd {
    /// The six-world, two-agent example end to end.
    Appendix,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let budget = Budget::resolve(cli.cap, cli.max_faces, cli.budget);
    let mut ws = Workspace::new();
    let result = match cli.command {
        Command::Frame(c) => commands::frame(&mut ws, c),
        Command::Sgs(c) => commands::sgs(&mut ws, c),
        Command::Logic(c) => commands::logic(&mut ws, c, &budget),
        Command::Atlas(c) => commands::atlas(&mut ws, c),
        Command::Paths(c) => commands::paths(&mut ws, c, &budget),
        Command::Complex(c) => commands::complex(&mut ws, c, &budget),
        Command::Demo(DemoCmd::Appendix) => commands::demo_appendix(&budget),
    };
    match result {
        Ok(report) => {
            report.print(cli.json, &ws);
            match report.outcome {
                Outcome::Pass => ExitCode::SUCCESS,
                Outcome::Fail => ExitCode::from(1),
            }
        }
        Err(e) => {
            eprintln!("{}: {e:#}", commands::error_kind(&e));
            ExitCode::from(2)
        }
    }
}
