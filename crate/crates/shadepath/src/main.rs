use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use shadepath::formats::{edges, graph, ratio};
use shadepath::pipeline::{self, Layer};
use shadepath::response::{route_response, ApiError, RouteParams};
use shadepath::service::{self, AppState};
use shadepath_core::{mode_filter, AdmissionTable, GeoPoint, Mode, Preference, DEFAULT_THRESHOLD};

#[derive(Parser)]
#[command(
    name = "shadepath",
    version,
    about = "Shade-aware walking and cycling routes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Threshold every indexed tile image into a shade mask.
    DeriveMasks {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        tiles_dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: u8,
        /// Also write a shaded overlay PNG per tile.
        #[arg(long)]
        debug_png: bool,
    },
    /// Compute per-edge shade ratios from an OSM extract and a mask directory.
    ComputeRatios {
        #[arg(long)]
        osm: PathBuf,
        #[arg(long)]
        masks: PathBuf,
        #[arg(long, value_enum, default_value_t = LayerArg::All)]
        mode: LayerArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = shadepath_core::ratio::DEFAULT_RATIO)]
        default_ratio: f64,
    },
    /// Join a ratio table onto one mode's road graph.
    BuildGraph {
        #[arg(long)]
        osm: PathBuf,
        #[arg(long)]
        ratios: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = shadepath_core::ratio::DEFAULT_RATIO)]
        default_ratio: f64,
    },
    /// Answer one route query and print the JSON response.
    Route(RouteArgs),
    /// Serve the HTTP API.
    Serve {
        #[arg(long)]
        walk_graph: Option<PathBuf>,
        #[arg(long)]
        bike_graph: Option<PathBuf>,
        #[arg(long, env = "SHADEPATH_BIND", default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
    },
    /// Write one mode's edge list as CSV.
    DumpEdges {
        #[arg(long)]
        osm: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RouteArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    o_lat: f64,
    #[arg(long, allow_negative_numbers = true)]
    o_lon: f64,
    #[arg(long, allow_negative_numbers = true)]
    d_lat: f64,
    #[arg(long, allow_negative_numbers = true)]
    d_lon: f64,
    /// Defaults to the graph's own mode.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, conflicts_with = "k", required_unless_present = "k")]
    alpha: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Walk,
    Bike,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Walk => Mode::Walk,
            ModeArg::Bike => Mode::Bike,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LayerArg {
    All,
    Walk,
    Bike,
}

impl From<LayerArg> for Layer {
    fn from(l: LayerArg) -> Self {
        match l {
            LayerArg::All => Layer::All,
            LayerArg::Walk => Layer::Mode(Mode::Walk),
            LayerArg::Bike => Layer::Mode(Mode::Bike),
        }
    }
}

fn route(args: RouteArgs) -> anyhow::Result<ExitCode> {
    let g = graph::read(&args.graph)?;
    let answer = (|| -> Result<String, ApiError> {
        let point = |lat, lon| GeoPoint::new(lat, lon).map_err(ApiError::from);
        let preference = match (args.alpha, args.k) {
            (Some(a), None) => Preference::Alpha(a),
            (None, Some(k)) => Preference::TopK(k),
            _ => return Err(ApiError::invalid("exactly one of alpha or k is required")),
        };
        let params = RouteParams {
            origin: point(args.o_lat, args.o_lon)?,
            destination: point(args.d_lat, args.d_lon)?,
            mode: args.mode.map_or(g.mode(), Mode::from),
            preference,
        };
        params.query().validate()?;
        Ok(route_response(&g, &params)?.to_json())
    })();
    match answer {
        Ok(json) => {
            println!("{json}");
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            println!("{}", e.to_json());
            eprintln!("shadepath: {}: {}", e.code, e.message);
            Ok(ExitCode::from(if e.status == 404 { 3 } else { 2 }))
        }
    }
}

fn serve(
    walk: Option<PathBuf>,
    bike: Option<PathBuf>,
    bind: SocketAddr,
) -> anyhow::Result<ExitCode> {
    let mut graphs = Vec::new();
    for (path, mode) in [(walk, Mode::Walk), (bike, Mode::Bike)] {
        let Some(path) = path else { continue };
        let g = graph::read(&path)?;
        if g.mode() != mode {
            bail!(
                "{} holds a {} graph, expected {mode}",
                path.display(),
                g.mode()
            );
        }
        graphs.push(g);
    }
    if graphs.is_empty() {
        bail!("at least one of --walk-graph or --bike-graph is required");
    }
    let state = Arc::new(AppState::new(graphs));
    let rt = tokio::runtime::Runtime::new().context("starting runtime")?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(bind)
            .await
            .with_context(|| format!("binding {bind}"))?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        service::serve_on(state, listener).await?;
        Ok(ExitCode::SUCCESS)
    })
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::DeriveMasks {
            index,
            tiles_dir,
            out,
            threshold,
            debug_png,
        } => {
            let s = pipeline::derive_masks(&index, &tiles_dir, &out, threshold, debug_png)?;
            println!(
                "wrote {} masks to {} (mean shade fraction {:.4})",
                s.tiles,
                out.display(),
                s.mean_shade_fraction
            );
        }
        Command::ComputeRatios {
            osm,
            masks,
            mode,
            out,
            default_ratio,
        } => {
            let net = pipeline::load_network(&osm)?;
            let table = pipeline::compute_ratios(&net, &masks, mode.into(), default_ratio)?;
            ratio::write(&out, &table)?;
            println!("wrote {} edge ratios to {}", table.len(), out.display());
        }
        Command::BuildGraph {
            osm,
            ratios,
            mode,
            out,
            default_ratio,
        } => {
            let net = pipeline::load_network(&osm)?;
            let g = pipeline::build_graph(&net, &ratios, mode.into(), default_ratio)?;
            graph::write(&out, &g)?;
            println!(
                "wrote {} graph with {} vertices and {} edges to {}",
                g.mode(),
                g.vertex_count(),
                g.edge_count(),
                out.display()
            );
        }
        Command::Route(args) => return route(args),
        Command::Serve {
            walk_graph,
            bike_graph,
            bind,
        } => return serve(walk_graph, bike_graph, bind),
        Command::DumpEdges { osm, mode, out } => {
            let net = pipeline::load_network(&osm)?;
            let g = mode_filter(&net, mode.into(), &AdmissionTable::default());
            edges::write(&out, &g.edges)?;
            println!("wrote {} edges to {}", g.edges.len(), out.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("shadepath: {e:#}");
            ExitCode::FAILURE
        }
    }
}
