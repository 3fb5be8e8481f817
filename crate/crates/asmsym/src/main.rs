use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;

use asmsym::commands::{self, AtlasArgs};
use asmsym::config::{Format, RunConfig};
use asmsym::error::{Error, EXIT_INVALID, EXIT_OK, EXIT_TRUNCATED};
use asmsym::output::Output;
use asmsym::schema::{load_configuration, load_graph, parse_pairs};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "asmsym", version, about = "Symmetry and assembly-pathway tools for sphere assemblies")]
struct Cli {
    /// JSON run settings (format, output, threads, caps); flags override it.
    #[arg(long, global = true)]
    settings: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, env = "ASMSYM_THREADS", global = true)]
    threads: Option<NonZeroUsize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assembly tree counts and pathway censuses.
    #[command(subcommand)]
    Trees(TreesCmd),
    /// Subgroup lattices.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Configurations: symmetry groups and active constraint graphs.
    #[command(subcommand)]
    Assembly(AssemblyCmd),
    /// Stratification atlas and assembly paths.
    #[command(subcommand)]
    Atlas(AtlasCmd),
    /// Convex Cayley parameters.
    #[command(subcommand)]
    Cayley(CayleyCmd),
    /// Shorthand for `trees pathways`.
    Pathways(PathwaysArgs),
}

#[derive(Subcommand)]
enum TreesCmd {
    /// Fixed-tree counts t_1..t_N per subgroup class.
    Count {
        #[arg(long)]
        group: String,
        #[arg(short = 'N', long = "order")]
        order: usize,
    },
    /// Every tree on the given number of leaves.
    Enumerate {
        #[arg(long)]
        leaves: usize,
    },
    /// Pathway counts N(m).
    Pathways(PathwaysArgs),
}

#[derive(Args)]
struct PathwaysArgs {
    #[arg(long)]
    group: String,
    #[arg(long, default_value_t = 1)]
    orbits: usize,
}

#[derive(Subcommand)]
enum GroupCmd {
    Subgroups {
        #[arg(long)]
        group: String,
    },
    /// Möbius values μ(H, G) per class.
    Mobius {
        #[arg(long)]
        group: String,
    },
}

#[derive(Subcommand)]
enum AssemblyCmd {
    /// Weak automorphism group.
    Waut {
        #[arg(long)]
        config: PathBuf,
    },
    /// Strict congruence groups and the orbit up to congruence.
    Congruence {
        #[arg(long)]
        config: PathBuf,
    },
    /// Active constraint graph with rigidity and dimension.
    Acg {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct AtlasOpts {
    /// Configuration file giving the system and a template placement.
    #[arg(long, alias = "system")]
    config: PathBuf,
    /// Edge-count range, e.g. `0..12`.
    #[arg(long, default_value = "0..")]
    edges: String,
    #[arg(long, default_value_t = 0)]
    min_degree: usize,
    #[arg(long)]
    rigid: bool,
    #[arg(long)]
    connected: bool,
    /// Keep graphs with dependent edges.
    #[arg(long)]
    all_graphs: bool,
    /// Hasse covers over every node, ignoring realizability.
    #[arg(long = "abstract")]
    abstract_lattice: bool,
    /// Search for a realization of every node.
    #[arg(long)]
    realize: bool,
    /// Also write the atlas as DOT here.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct Endpoints {
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
    /// Longest chain (nodes) or zigzag (steps).
    #[arg(long)]
    max_len: Option<NonZeroUsize>,
}

#[derive(Subcommand)]
enum AtlasCmd {
    Build(AtlasOpts),
    Paths {
        #[command(flatten)]
        atlas: AtlasOpts,
        #[command(flatten)]
        ends: Endpoints,
    },
    CoarsePaths {
        #[command(flatten)]
        atlas: AtlasOpts,
        #[command(flatten)]
        ends: Endpoints,
    },
    Forest {
        #[command(flatten)]
        atlas: AtlasOpts,
        #[command(flatten)]
        ends: Endpoints,
    },
    Zigzag {
        #[command(flatten)]
        atlas: AtlasOpts,
        #[command(flatten)]
        ends: Endpoints,
    },
}

#[derive(Subcommand)]
enum CayleyCmd {
    Check {
        #[arg(long)]
        graph: PathBuf,
        /// Parameters as `0-2,1-3`.
        #[arg(long, default_value = "")]
        nonedges: String,
    },
    Polytope {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "")]
        nonedges: String,
    },
    Flatten {
        #[arg(long)]
        graph: PathBuf,
    },
}

fn parse_range(text: &str) -> Result<(usize, Option<usize>), Error> {
    let bad = || Error::Usage(format!("edge range `{text}` should look like 0..12"));
    let (lo, hi) = match text.split_once("..") {
        Some((lo, hi)) => (lo, hi.strip_prefix('=').unwrap_or(hi)),
        None => (text, text),
    };
    let lo = if lo.trim().is_empty() { 0 } else { lo.trim().parse().map_err(|_| bad())? };
    let hi = if hi.trim().is_empty() { None } else { Some(hi.trim().parse().map_err(|_| bad())?) };
    Ok((lo, hi))
}

fn atlas_args(o: &AtlasOpts) -> Result<AtlasArgs, Error> {
    let (min_edges, max_edges) = parse_range(&o.edges)?;
    Ok(AtlasArgs {
        min_edges,
        max_edges,
        min_degree: o.min_degree,
        rigid: o.rigid,
        connected: o.connected,
        all_graphs: o.all_graphs,
        abstract_lattice: o.abstract_lattice,
        realize: o.realize,
    })
}

fn run(cli: Cli, settings: &mut RunConfig) -> Result<Output, Error> {
    let caps = settings.caps.clone();
    let with_len = |caps: &asmsym::config::Caps, ends: &Endpoints, zigzag: bool| {
        let mut c = caps.clone();
        if let Some(n) = ends.max_len {
            if zigzag {
                c.zigzag_length = n;
            } else {
                c.chain_length = n;
            }
        }
        c
    };
    match cli.command {
        Command::Trees(TreesCmd::Count { group, order }) => commands::trees_count(&group, order),
        Command::Trees(TreesCmd::Enumerate { leaves }) => commands::trees_enumerate(leaves, &caps),
        Command::Trees(TreesCmd::Pathways(a)) | Command::Pathways(a) => commands::trees_pathways(&a.group, a.orbits),
        Command::Group(GroupCmd::Subgroups { group }) => commands::group_subgroups(&group),
        Command::Group(GroupCmd::Mobius { group }) => commands::group_mobius(&group),
        Command::Assembly(AssemblyCmd::Waut { config }) => commands::assembly_waut(&load_configuration(&config)?, &caps),
        Command::Assembly(AssemblyCmd::Congruence { config }) => {
            commands::assembly_congruence(&load_configuration(&config)?, &caps)
        }
        Command::Assembly(AssemblyCmd::Acg { config }) => commands::assembly_acg(&load_configuration(&config)?, &caps),
        Command::Atlas(AtlasCmd::Build(o)) => {
            let out = commands::atlas_build(&load_configuration(&o.config)?, &atlas_args(&o)?, &caps)?;
            if let Some(path) = &o.dot {
                std::fs::write(path, out.dot.as_deref().unwrap_or_default()).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
            }
            Ok(out)
        }
        Command::Atlas(AtlasCmd::Paths { atlas, ends }) => commands::atlas_paths(
            &load_configuration(&atlas.config)?,
            &atlas_args(&atlas)?,
            &with_len(&caps, &ends, false),
            &ends.from,
            &ends.to,
        ),
        Command::Atlas(AtlasCmd::CoarsePaths { atlas, ends }) => commands::atlas_coarse_paths(
            &load_configuration(&atlas.config)?,
            &atlas_args(&atlas)?,
            &with_len(&caps, &ends, false),
            &ends.from,
            &ends.to,
        ),
        Command::Atlas(AtlasCmd::Forest { atlas, ends }) => commands::atlas_forest(
            &load_configuration(&atlas.config)?,
            &atlas_args(&atlas)?,
            &with_len(&caps, &ends, false),
            &ends.from,
            &ends.to,
        ),
        Command::Atlas(AtlasCmd::Zigzag { atlas, ends }) => commands::atlas_zigzag(
            &load_configuration(&atlas.config)?,
            &atlas_args(&atlas)?,
            &with_len(&caps, &ends, true),
            &ends.from,
            &ends.to,
        ),
        Command::Cayley(CayleyCmd::Check { graph, nonedges }) => {
            commands::cayley_check(&load_graph(&graph)?, &parse_pairs(&nonedges)?)
        }
        Command::Cayley(CayleyCmd::Polytope { graph, nonedges }) => {
            commands::cayley_polytope(&load_graph(&graph)?, &parse_pairs(&nonedges)?)
        }
        Command::Cayley(CayleyCmd::Flatten { graph }) => commands::cayley_flatten(&load_graph(&graph)?),
    }
}

fn emit(out: &Output, settings: &RunConfig) -> Result<(), Error> {
    let format = settings.format.unwrap_or_default();
    match &settings.output {
        Some(path) => {
            let file = File::create(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            let mut w = BufWriter::new(file);
            out.write_to(format, &mut w)?;
            w.flush().map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })
        }
        None => out.write_to(format, &mut io::stdout().lock()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut settings = match &cli.settings {
        Some(path) => match RunConfig::load(path) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_INVALID as u8);
            }
        },
        None => RunConfig::default(),
    };
    if cli.format.is_some() {
        settings.format = cli.format;
    }
    if cli.output.is_some() {
        settings.output = cli.output.clone();
    }
    if cli.threads.is_some() {
        settings.threads = cli.threads;
    }
    if let Some(n) = settings.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n.get()).build_global().ok();
    }
    let result = run(cli, &mut settings).and_then(|out| emit(&out, &settings).map(|_| out.truncated));
    match result {
        Ok(false) => ExitCode::from(EXIT_OK as u8),
        Ok(true) => {
            eprintln!("warning: a cap was reached; output is partial");
            ExitCode::from(EXIT_TRUNCATED as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID as u8)
        }
    }
}
