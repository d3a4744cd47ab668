use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use topovox::io;
use topovox::operators::{self, OperatorSet};
use topovox::sampling::{sample_line_network, sample_surface_mesh, sample_volume_mesh};
use topovox::voxelize::voxelate_point_cloud;
use topovox::{
    Error, Frame, SamplingMode, SamplingOptions, SparseMatrix, Stencil, StencilKind, Vec3,
    VoxelCloud, VoxelComplex,
};

#[derive(Parser)]
#[command(
    name = "topovox",
    version,
    about = "Topological voxelization and discrete operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Lines,
    Surface,
    Volume,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Conservative,
    Thin,
}

impl From<Mode> for SamplingMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Conservative => SamplingMode::Conservative,
            Mode::Thin => SamplingMode::Thin,
        }
    }
}

#[derive(clap::Args)]
struct SampleArgs {
    /// OBJ file with faces (surface, volume) or line records (lines).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    kind: Kind,
    /// Voxel size: one value or three comma-separated values.
    #[arg(long, value_parser = parse_sigma)]
    sigma: Vec3,
    #[arg(long, value_enum, default_value = "conservative")]
    mode: Mode,
    /// Do not add segment endpoints to line samples.
    #[arg(long)]
    no_endpoints: bool,
}

#[derive(clap::Args)]
struct GraphArgs {
    /// face6, edge18, vertex26, or file:<path> for a stencil file.
    #[arg(long, default_value = "face6")]
    stencil: String,
    /// Also build square faces and cubic cells.
    #[arg(long)]
    cells: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an OBJ line network, surface or closed volume into points.
    Sample {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Voxelate a point CSV into a Morton-coded voxel cloud.
    Voxelate {
        #[arg(long)]
        points: PathBuf,
        #[arg(long, value_parser = parse_sigma)]
        sigma: Vec3,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the voxel complex and write its tables and incidence matrices.
    Graph {
        #[arg(long)]
        cloud: PathBuf,
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        out_prefix: String,
        /// Print a JSON summary instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Assemble operators of a stored complex and write them as MatrixMarket.
    Operators {
        #[arg(long)]
        graph_prefix: String,
        /// Comma-separated subset of G,D,L,s1,s2,s3,Omega.
        #[arg(long, value_delimiter = ',', default_value = "G,D,L,s1,s2,s3,Omega")]
        emit: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Run explicit heat diffusion on a stored complex.
    SolveHeat {
        #[arg(long)]
        graph_prefix: String,
        /// Vertex field CSV (id,value) keyed by voxel Morton code.
        #[arg(long)]
        init: PathBuf,
        #[arg(long)]
        dt: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample, voxelate, build the complex and emit all operators in one go.
    Run {
        #[command(flatten)]
        sample: SampleArgs,
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

fn parse_sigma(s: &str) -> Result<Vec3, String> {
    let values = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("invalid voxel size '{t}'"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let sigma = match values.as_slice() {
        [v] => Vec3::repeat(*v),
        [x, y, z] => Vec3::new(*x, *y, *z),
        _ => return Err("voxel size needs one or three values".into()),
    };
    if sigma.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err("voxel size must be positive".into());
    }
    Ok(sigma)
}

fn prefixed(prefix: &str, name: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}_{name}"))
}

fn stencils(args: &GraphArgs) -> topovox::Result<Vec<Stencil>> {
    let base = match args.stencil.strip_prefix("file:") {
        Some(path) => io::read_stencil(Path::new(path))?,
        None => {
            let kind = StencilKind::from_name(&args.stencil)
                .ok_or_else(|| Error::Argument(format!("unknown stencil '{}'", args.stencil)))?;
            Stencil::standard(kind)
        }
    };
    let mut all = vec![base];
    if args.cells {
        all.extend(
            [
                StencilKind::SquareYZ,
                StencilKind::SquareZX,
                StencilKind::SquareXY,
                StencilKind::Cube8,
            ]
            .map(Stencil::standard),
        );
    }
    Ok(all)
}

fn sample(args: &SampleArgs) -> topovox::Result<Vec<topovox::Point3>> {
    let obj = io::read_obj(&args.input)?;
    let options = SamplingOptions {
        mode: args.mode.into(),
        emit_endpoints: !args.no_endpoints,
    };
    let frame = Frame::default();
    let sampling = match args.kind {
        Kind::Lines => sample_line_network(&obj.line_set()?, &frame, args.sigma, &options)?,
        Kind::Surface => sample_surface_mesh(&obj.mesh()?, &frame, args.sigma, &options)?,
        Kind::Volume => sample_volume_mesh(&obj.mesh()?, &frame, args.sigma, &options)?,
    };
    Ok(sampling.points)
}

/// Row-sum and cycle-residual checks of a complex; `None` without edges.
struct Checks {
    rowsum: f64,
    omega_m: f64,
}

fn checks(x: &VoxelComplex) -> topovox::Result<Option<Checks>> {
    if x.edge_count() == 0 {
        return Ok(None);
    }
    let l = operators::laplacian(x)?;
    let rowsum = l.row_sums().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let omega_m = operators::cycle_basis(x).multiply(x.m_ev())?.max_abs();
    Ok(Some(Checks { rowsum, omega_m }))
}

fn summary(x: &VoxelComplex, checks: &Option<Checks>) -> serde_json::Value {
    let chi = x.euler_characteristic();
    json!({
        "V": chi.vertices,
        "E": chi.edges,
        "F": chi.faces,
        "C": chi.cells,
        "chi": chi.chi(),
        "checks": {
            "rowsum": checks.as_ref().map(|c| c.rowsum),
            "omegaM": checks.as_ref().map(|c| c.omega_m),
        }
    })
}

fn print_counts(x: &VoxelComplex) {
    let chi = x.euler_characteristic();
    println!(
        "|V|={} |E|={} |F|={} |C|={} chi={}",
        chi.vertices,
        chi.edges,
        chi.faces,
        chi.cells,
        chi.chi()
    );
}

fn write_graph(x: &VoxelComplex, prefix: &str) -> topovox::Result<()> {
    io::write_text(
        &prefixed(prefix, "cloud.csv"),
        &io::write_voxel_cloud(x.cloud()),
    )?;
    io::write_text(&prefixed(prefix, "edges.csv"), &io::write_edges(x))?;
    io::write_text(&prefixed(prefix, "MEV.mtx"), &io::write_matrix(x.m_ev()))?;
    if x.face_count() > 0 || x.cell_count() > 0 {
        io::write_text(&prefixed(prefix, "faces.csv"), &io::write_faces(x))?;
        io::write_text(&prefixed(prefix, "cells.csv"), &io::write_cells(x))?;
        for (name, m) in [
            ("MFV", x.m_fv()),
            ("MFE", x.m_fe()),
            ("MCV", x.m_cv()),
            ("MCF", x.m_cf()),
            ("MCE", x.m_ce()),
        ] {
            io::write_text(
                &prefixed(prefix, &format!("{name}.mtx")),
                &io::write_matrix(m),
            )?;
        }
    }
    Ok(())
}

fn read_graph(prefix: &str) -> topovox::Result<VoxelComplex> {
    let cloud: VoxelCloud = io::read_voxel_cloud(&prefixed(prefix, "cloud.csv"))?;
    let edges = io::parse_edges(&io::read_text(&prefixed(prefix, "edges.csv"))?)?;
    let optional = |name: &str| -> topovox::Result<Option<String>> {
        let path = prefixed(prefix, name);
        if path.exists() {
            io::read_text(&path).map(Some)
        } else {
            Ok(None)
        }
    };
    let faces = match optional("faces.csv")? {
        Some(text) => io::parse_faces(&text)?,
        None => Vec::new(),
    };
    let cells = match optional("cells.csv")? {
        Some(text) => io::parse_cells(&text)?,
        None => Vec::new(),
    };
    VoxelComplex::from_parts(cloud, edges, faces, cells)
}

fn covector(values: &[f64]) -> SparseMatrix {
    SparseMatrix::from_triplets(
        1,
        values.len(),
        values.iter().enumerate().map(|(j, &v)| (0, j, v)).collect(),
    )
    .expect("covector entries in range")
}

fn emit_operators(x: &VoxelComplex, prefix: &str, emit: &[String]) -> topovox::Result<()> {
    let ops = OperatorSet::assemble(x)?;
    for name in emit {
        let matrix = match name.as_str() {
            "G" => ops.g.clone(),
            "D" => ops.d.clone(),
            "L" => ops.l.clone(),
            "s1" => covector(&ops.s1),
            "s2" => covector(ops.s2.as_deref().ok_or_else(|| {
                Error::Unsupported("s2 needs faces; build the graph with --cells".into())
            })?),
            "s3" => covector(ops.s3.as_deref().ok_or_else(|| {
                Error::Unsupported("s3 needs cells; build the graph with --cells".into())
            })?),
            "Omega" => ops.omega.clone(),
            other => return Err(Error::Argument(format!("unknown operator '{other}'"))),
        };
        io::write_text(
            &prefixed(prefix, &format!("{name}.mtx")),
            &io::write_matrix(&matrix),
        )?;
    }
    Ok(())
}

fn print_checks(checks: &Option<Checks>) {
    if let Some(c) = checks {
        println!("L row-sum max |.| = {:e}", c.rowsum);
        println!("Omega*M residual = {}", c.omega_m);
    }
}

fn execute(command: Command) -> topovox::Result<()> {
    match command {
        Command::Sample { sample: args, out } => {
            let points = sample(&args)?;
            io::write_text(&out, &io::write_points(&points))?;
            println!("{} points", points.len());
        }
        Command::Voxelate { points, sigma, out } => {
            let pts = io::parse_points(&io::read_text(&points)?)?;
            let cloud = voxelate_point_cloud(&pts, &Frame::default(), sigma)?;
            io::write_text(&out, &io::write_voxel_cloud(&cloud))?;
            println!("{} voxels", cloud.len());
        }
        Command::Graph {
            cloud,
            graph,
            out_prefix,
            json,
        } => {
            let cloud = io::read_voxel_cloud(&cloud)?;
            let x = VoxelComplex::construct_with(&cloud, &stencils(&graph)?)?;
            write_graph(&x, &out_prefix)?;
            if json {
                println!("{}", summary(&x, &checks(&x)?));
            } else {
                print_counts(&x);
            }
        }
        Command::Operators {
            graph_prefix,
            emit,
            json,
        } => {
            let x = read_graph(&graph_prefix)?;
            emit_operators(&x, &graph_prefix, &emit)?;
            let c = checks(&x)?;
            if json {
                println!("{}", summary(&x, &c));
            } else {
                print_checks(&c);
            }
        }
        Command::SolveHeat {
            graph_prefix,
            init,
            dt,
            steps,
            out,
        } => {
            let x = read_graph(&graph_prefix)?;
            let ids: Vec<u64> = x.vertex_ids().keys().iter().map(|c| c.bits()).collect();
            let f0 = io::field_values(&ids, &io::parse_field(&io::read_text(&init)?)?)?;
            let f = operators::solve_heat(&x, &f0, dt, steps)?;
            io::write_text(&out, &io::write_field(&ids, &f)?)?;
            let drift = f.iter().sum::<f64>() - f0.iter().sum::<f64>();
            println!("sum(f) drift = {drift:e}");
        }
        Command::Run {
            sample: args,
            graph,
            out_dir,
            json,
        } => {
            std::fs::create_dir_all(&out_dir).map_err(|source| Error::Io {
                path: out_dir.clone(),
                source,
            })?;
            let points = sample(&args)?;
            io::write_text(&out_dir.join("points.csv"), &io::write_points(&points))?;
            let cloud = voxelate_point_cloud(&points, &Frame::default(), args.sigma)?;
            let x = VoxelComplex::construct_with(&cloud, &stencils(&graph)?)?;
            let prefix = out_dir.join("graph").to_string_lossy().into_owned();
            write_graph(&x, &prefix)?;
            let c = checks(&x)?;
            if x.edge_count() > 0 {
                let mut emit = vec!["G", "D", "L", "s1", "Omega"];
                if x.face_count() > 0 {
                    emit.push("s2");
                }
                if x.cell_count() > 0 {
                    emit.push("s3");
                }
                let emit: Vec<String> = emit.into_iter().map(String::from).collect();
                emit_operators(&x, &prefix, &emit)?;
            }
            if json {
                println!("{}", summary(&x, &c));
            } else {
                println!("{} points, {} voxels", points.len(), cloud.len());
                print_counts(&x);
                print_checks(&c);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NotClosed { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
