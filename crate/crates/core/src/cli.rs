//! The `quador` command line.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 I/O error,
//! 3 invariant failure.

use std::ffi::OsString;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::algebra::{classify_quadric, Vec3, DEFAULT_CLASSIFY_TOL};
use crate::io::{
    fmt_num, load_lattice, parse_lattice, read_points_csv, write_obj_mesh, write_obj_polylines, write_sample_csv,
    write_stl, CsvError, LoadError, Polyline, SampleRow,
};
use crate::lattice::Lattice;
use crate::solid::{auto_bounds, build_assembly, classify_point, marching_cubes, Assembly, Bounds};
use crate::verify::{verify_lattice, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "quador", version, about = "Quador lattices with quadric fillets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the invariant checks and write a JSON report.
    Verify(VerifyArgs),
    /// Polygonize the solid to STL or OBJ.
    Mesh(MeshArgs),
    /// Export the fillet tangency conics as OBJ polylines.
    Conics(ConicsArgs),
    /// Classify query points and write a CSV.
    Sample(SampleArgs),
    /// Print the quadric class of every beam and fillet.
    Classify(ClassifyArgs),
}

#[derive(Debug, Args)]
struct VerifyArgs {
    lattice: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Perturb the first fillet quadric before checking.
    #[arg(long, hide = true)]
    corrupt_fillet: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MeshFormat {
    Stl,
    Obj,
}

#[derive(Debug, Clone, Copy)]
enum BoundsArg {
    Auto,
    Fixed(Bounds),
}

fn parse_bounds(s: &str) -> Result<BoundsArg, String> {
    if s == "auto" {
        return Ok(BoundsArg::Auto);
    }
    let v = parse_list::<f64>(s, 6)?;
    let b = Bounds::new(Vec3::new(v[0], v[1], v[2]), Vec3::new(v[3], v[4], v[5]));
    if !b.is_valid() {
        return Err("bounds need min < max on every axis".into());
    }
    Ok(BoundsArg::Fixed(b))
}

fn parse_list<T: std::str::FromStr>(s: &str, n: usize) -> Result<Vec<T>, String> {
    let v: Vec<T> = s
        .split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| format!("`{p}` is not a valid number")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated values, got {}", v.len()));
    }
    Ok(v)
}

fn parse_grid(s: &str) -> Result<[usize; 3], String> {
    let v = parse_list::<usize>(s, 3)?;
    if v.contains(&0) {
        return Err("grid counts must be positive".into());
    }
    Ok([v[0], v[1], v[2]])
}

#[derive(Debug, Args)]
struct MeshArgs {
    lattice: PathBuf,
    /// Samples per axis.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(2..=1024))]
    resolution: u32,
    /// `auto` or `x0,y0,z0,x1,y1,z1`.
    #[arg(long, default_value = "auto", value_parser = parse_bounds)]
    bounds: BoundsArg,
    #[arg(long, value_enum, default_value_t = MeshFormat::Stl)]
    format: MeshFormat,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct ConicsArgs {
    lattice: PathBuf,
    #[arg(long, default_value_t = 128, value_parser = clap::value_parser!(u32).range(2..))]
    samples_per_curve: u32,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("query").required(true).multiple(false)))]
struct SampleArgs {
    lattice: PathBuf,
    /// CSV of `x,y,z` rows.
    #[arg(long, group = "query")]
    points: Option<PathBuf>,
    /// Grid counts `nx,ny,nz` over the bounds, x varying fastest.
    #[arg(long, group = "query", value_parser = parse_grid)]
    grid: Option<[usize; 3]>,
    /// Grid extent: `auto` or `x0,y0,z0,x1,y1,z1`.
    #[arg(long, default_value = "auto", value_parser = parse_bounds)]
    bounds: BoundsArg,
    /// Values within this band are reported as boundary.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    lattice: PathBuf,
}

/// A failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Mesh(a) => cmd_mesh(a),
        Command::Conics(a) => cmd_conics(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Classify(a) => cmd_classify(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::io(path, e))
}

fn load(path: &Path) -> Result<Lattice, Failure> {
    load_lattice(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn assemble(path: &Path) -> Result<(Lattice, Assembly), Failure> {
    let lattice = load(path)?;
    let assembly = build_assembly(&lattice).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    Ok((lattice, assembly))
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>) -> Result<(), Failure> {
    let file = fs::File::create(path).map_err(|e| Failure::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Failure::io(path, e))
}

fn cmd_verify(a: VerifyArgs) -> Outcome {
    let bytes = read(&a.lattice)?;
    let text = std::str::from_utf8(&bytes).map_err(|_| Failure::usage(LoadError::Utf8.to_string()))?;
    let lattice = parse_lattice(text).map_err(|e| Failure::usage(format!("{}: {e}", a.lattice.display())))?;
    let options = VerifyOptions { tol: a.tol, samples: a.samples, seed: a.seed, corrupt_fillet: a.corrupt_fillet };
    let report = verify_lattice(&lattice, &options);
    let json = report.to_json();
    match &a.report {
        Some(path) => {
            write_file(path, |w| writeln!(w, "{json}"))?;
            let s = report.summary;
            println!("pass {} fail {} warn {}", s.pass, s.fail, s.warn);
        }
        None => println!("{json}"),
    }
    for c in report.checks.iter().filter(|c| c.status == crate::verify::Status::Fail) {
        eprintln!("failed: {} ({})", c.name, c.detail);
    }
    for v in &report.validation {
        eprintln!("{v}");
    }
    Ok(report.exit_code())
}

fn resolve_bounds(arg: BoundsArg, assembly: &Assembly) -> Bounds {
    match arg {
        BoundsArg::Auto => auto_bounds(assembly, 0.1),
        BoundsArg::Fixed(b) => b,
    }
}

fn cmd_mesh(a: MeshArgs) -> Outcome {
    let (_, assembly) = assemble(&a.lattice)?;
    let bounds = resolve_bounds(a.bounds, &assembly);
    let n = a.resolution as usize;
    let mesh = marching_cubes(&assembly, bounds, [n; 3]).map_err(|e| Failure::usage(e.to_string()))?;
    write_file(&a.output, |w| match a.format {
        MeshFormat::Stl => write_stl(&mesh, w),
        MeshFormat::Obj => write_obj_mesh(&mesh, w),
    })?;
    println!("triangles: {}", mesh.triangles.len());
    Ok(EXIT_OK)
}

fn cmd_conics(a: ConicsArgs) -> Outcome {
    let (_, assembly) = assemble(&a.lattice)?;
    if assembly.fillets.is_empty() {
        return Err(Failure::usage("lattice has no fillets"));
    }
    let mut lines = Vec::new();
    for f in &assembly.fillets {
        let p = &f.patch;
        for (which, conic, beam) in [(1, &p.conic1, &p.beams.0), (2, &p.conic2, &p.beams.1)] {
            let samples = conic.sample(a.samples_per_curve as usize).map_err(|e| Failure::usage(e.to_string()))?;
            let count = samples.branches.len();
            for (i, branch) in samples.branches.into_iter().enumerate() {
                lines.push(Polyline {
                    comments: vec![
                        format!("{} conic {which} (stub {beam}) class {} branch {}/{count}", f.label(), conic.kind, i + 1),
                        format!(
                            "parameter range [{}, {}]",
                            fmt_num(samples.parameter_range.0),
                            fmt_num(samples.parameter_range.1)
                        ),
                    ],
                    points: branch,
                    closed: samples.closed,
                });
            }
        }
    }
    write_file(&a.output, |w| write_obj_polylines(&lines, w))?;
    println!("polylines: {}", lines.len());
    Ok(EXIT_OK)
}

fn grid_points(b: Bounds, [nx, ny, nz]: [usize; 3]) -> Vec<Vec3> {
    let coord = |lo: f64, hi: f64, n: usize, i: usize| {
        if n == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    };
    let mut out = Vec::with_capacity(nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                out.push(Vec3::new(
                    coord(b.min.x, b.max.x, nx, i),
                    coord(b.min.y, b.max.y, ny, j),
                    coord(b.min.z, b.max.z, nz, k),
                ));
            }
        }
    }
    out
}

fn cmd_sample(a: SampleArgs) -> Outcome {
    let (_, assembly) = assemble(&a.lattice)?;
    let points = match (&a.points, a.grid) {
        (Some(path), _) => read_points_csv(read(path)?.as_slice()).map_err(|e| match e {
            CsvError::Row { .. } => Failure::usage(format!("{}: {e}", path.display())),
            CsvError::Io(e) => Failure::io(path, e),
        })?,
        (None, Some(grid)) => grid_points(resolve_bounds(a.bounds, &assembly), grid),
        (None, None) => unreachable!("clap requires one query source"),
    };
    let rows: Vec<SampleRow> = points
        .into_iter()
        .map(|x| {
            let c = classify_point(&assembly, x, a.tol);
            SampleRow { point: x, value: c.value, state: c.state.to_string(), label: c.label.to_string() }
        })
        .collect();
    let file = fs::File::create(&a.output).map_err(|e| Failure::io(&a.output, e))?;
    write_sample_csv(&rows, BufWriter::new(file)).map_err(|e| Failure::io(&a.output, e))?;
    println!("rows: {}", rows.len());
    Ok(EXIT_OK)
}

fn cmd_classify(a: ClassifyArgs) -> Outcome {
    let (_, assembly) = assemble(&a.lattice)?;
    let vec = |v: Vec3| format!("[{}, {}, {}]", fmt_num(v.x), fmt_num(v.y), fmt_num(v.z));
    let describe = |q: &crate::algebra::Quadric| match classify_quadric(q, DEFAULT_CLASSIFY_TOL) {
        Ok(c) => {
            let mut notes = Vec::new();
            if c.kind.is_planar() {
                notes.push("degenerate (chamfer)".to_string());
            } else if c.is_circular() {
                notes.push("circular".to_string());
            }
            notes.push(format!(
                "diag {} linear {} const {} center {}",
                vec(Vec3::from_array(c.diagonal)),
                fmt_num(c.linear),
                fmt_num(c.constant),
                vec(c.translation)
            ));
            (c.kind.name().to_string(), notes.join("; "))
        }
        Err(e) => ("UNCLASSIFIED".to_string(), e.to_string()),
    };
    println!("{:<24} {:<24} notes", "surface", "class");
    for b in &assembly.beams {
        let (kind, notes) = describe(&b.quador.h);
        println!("{:<24} {:<24} {}", format!("beam {}", b.id), kind, notes);
    }
    for f in &assembly.fillets {
        let p = &f.patch;
        let (kind, notes) = describe(&p.q);
        let extent = p.extent.value().map_or("unbounded".to_string(), fmt_num);
        println!(
            "{:<24} {:<24} {}; beta {} extent {}",
            format!("fillet {}:{}+{}", p.hub, p.beams.0, p.beams.1),
            kind,
            notes,
            fmt_num(p.beta),
            extent
        );
        for (which, conic, beam) in [(1, &p.conic1, &p.beams.0), (2, &p.conic2, &p.beams.1)] {
            println!("{:<24} {:<24} tangency with stub {beam}", format!("  conic {which}"), conic.kind.name());
        }
    }
    Ok(EXIT_OK)
}
