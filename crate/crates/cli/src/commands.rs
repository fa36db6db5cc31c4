use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use regsub::bistellar::{connect_bruteforce, Budget};
use regsub::geometry::{realize_with, GeometricComplex, RealizeOptions};
use regsub::linalg::parse_rat;
use regsub::pipeline::{make_fan_regular, make_regular_triangulation, polytopality_dim2, Trace};
use regsub::regularity::{is_regular, verify_certificate, Domain, PLFunction, Regularity, RegularityCertificate};
use regsub::subdivision::{refine_until, sd_k_with_history, stellar};
use regsub::{Complex, Face, Fan, Point};

use crate::format::{DocKind, Document, ParseError};

/// Success.
pub const EXIT_OK: i32 = 0;
/// `verify-cert` rejected the certificate, or `connect-flips` found nothing.
pub const EXIT_REJECTED: i32 = 1;
/// `check-regular` found the input irregular.
pub const EXIT_IRREGULAR: i32 = 2;
/// Bad command line or malformed input file.
pub const EXIT_USAGE: i32 = 64;
/// Well-formed input violating a mathematical precondition.
pub const EXIT_DATA: i32 = 65;
/// An input file could not be read.
pub const EXIT_NO_INPUT: i32 = 66;
/// An output file could not be written.
pub const EXIT_IO: i32 = 74;

#[derive(Parser, Debug)]
#[command(name = "regsub", version, about = "Exact subdivisions and regularity certificates")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a complex and, with coordinates, its embedding.
    Validate { input: PathBuf },
    /// Print the f-vector and Euler characteristic.
    Fvector { input: PathBuf },
    /// Derived or stellar subdivision.
    Subdivide(SubdivideArgs),
    /// Derive COARSE with adapted points until it refines FINE.
    RefineUntil {
        coarse: PathBuf,
        fine: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Decide regularity: certificate (exit 0) or witness (exit 2).
    CheckRegular {
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Subdivide until regular, with a certificate and a trace.
    MakeRegular {
        input: PathBuf,
        /// Seed for the generic heights; required for triangulations.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Check a certificate against a complex: exit 0 valid, 1 invalid.
    VerifyCert {
        complex: PathBuf,
        certificate: PathBuf,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
    },
    /// Search for a bistellar move sequence between two triangulations.
    ConnectFlips {
        t0: PathBuf,
        t1: PathBuf,
        /// Maximum number of triangulations visited.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Maximum vertex count of intermediate triangulations.
        #[arg(long)]
        max_vertices: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Print 0 for a simplicial 2-sphere, or the failed check.
    Steinitz2 { input: PathBuf },
}

#[derive(Args, Debug)]
struct SubdivideArgs {
    input: PathBuf,
    /// Apply K derived subdivisions.
    #[arg(long, conflicts_with = "stellar")]
    derived: bool,
    #[arg(short, long, default_value_t = 1, requires = "derived")]
    k: usize,
    /// Stellar subdivision at a face, written `0,1,2`.
    #[arg(long, required_unless_present = "derived")]
    stellar: Option<String>,
    /// Point for the stellar subdivision, written `p/q,p/q,...`.
    #[arg(long, requires = "stellar")]
    point: Option<String>,
    /// Write the stellar history here instead of into the output.
    #[arg(long)]
    history: Option<PathBuf>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct OutArg {
    /// Output file (`-` or absent for standard output).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Triangulation,
    Fan,
}

/// A failed command: exit code and message for standard error.
struct Failure(i32, String);

impl From<regsub::Error> for Failure {
    fn from(e: regsub::Error) -> Failure {
        Failure(EXIT_DATA, e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
}

impl Io<'_> {
    fn read(&mut self, path: &Path) -> Result<Document, Failure> {
        let text = if path == Path::new("-") {
            let mut s = String::new();
            self.stdin
                .read_to_string(&mut s)
                .map_err(|e| Failure(EXIT_NO_INPUT, format!("stdin: {e}")))?;
            s
        } else {
            fs::read_to_string(path)
                .map_err(|e| Failure(EXIT_NO_INPUT, format!("{}: {e}", path.display())))?
        };
        Document::parse(&text).map_err(|e: ParseError| Failure(EXIT_USAGE, format!("{}: {e}", path.display())))
    }

    fn write(&mut self, out: &OutArg, text: &str) -> Result<(), Failure> {
        match &out.output {
            Some(p) if p != Path::new("-") => write_file(p, text),
            _ => self.print(text),
        }
    }

    fn print(&mut self, text: &str) -> Result<(), Failure> {
        self.stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure(EXIT_IO, format!("stdout: {e}")))
    }
}

fn write_file(p: &Path, text: &str) -> Result<(), Failure> {
    fs::write(p, text).map_err(|e| Failure(EXIT_IO, format!("{}: {e}", p.display())))
}

/// Parses `argv` (including the program name) and runs the command.
/// Returns the process exit code; data goes to `stdout`, diagnostics to
/// `stderr`.
pub fn run<I, T>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut io = Io { stdin, stdout };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            code
        }
    }
}

fn dispatch(cmd: Command, io: &mut Io) -> Outcome {
    match cmd {
        Command::Validate { input } => validate(io, &input),
        Command::Fvector { input } => fvector(io, &input),
        Command::Subdivide(args) => subdivide(io, args),
        Command::RefineUntil { coarse, fine, out } => refine(io, &coarse, &fine, &out),
        Command::CheckRegular { input, kind, out } => check_regular(io, &input, kind, &out),
        Command::MakeRegular {
            input,
            seed,
            kind,
            out,
        } => make_regular(io, &input, seed, kind, &out),
        Command::VerifyCert {
            complex,
            certificate,
            kind,
        } => verify(io, &complex, &certificate, kind),
        Command::ConnectFlips {
            t0,
            t1,
            budget,
            max_vertices,
            out,
        } => connect(io, &t0, &t1, budget, max_vertices, &out),
        Command::Steinitz2 { input } => steinitz(io, &input),
    }
}

fn complex_of(doc: &Document) -> Result<Complex, Failure> {
    match doc.complex() {
        Some(c) => Ok(c?),
        None => Err(Failure(EXIT_USAGE, "no `f` records".into())),
    }
}

fn geometric(doc: &Document) -> Result<GeometricComplex, Failure> {
    let c = complex_of(doc)?;
    if doc.vertices.is_empty() {
        return Err(Failure(EXIT_USAGE, "no `v` records: coordinates are required".into()));
    }
    Ok(realize_with(c, doc.vertices.clone(), RealizeOptions::default())?)
}

/// Resolved interpretation: explicit flag, then the file's `kind`, then
/// full-dimensional means triangulation and codimension one means fan.
fn kind_of(doc: &Document, g: &GeometricComplex, flag: Option<KindArg>) -> Result<DocKind, Failure> {
    if let Some(k) = flag {
        return Ok(match k {
            KindArg::Triangulation => DocKind::Triangulation,
            KindArg::Fan => DocKind::Fan,
        });
    }
    if let Some(k) = doc.kind {
        return Ok(k);
    }
    let (d, n) = (g.dim(), g.ambient_dim() as i64);
    if d == n {
        Ok(DocKind::Triangulation)
    } else if d + 1 == n {
        Ok(DocKind::Fan)
    } else {
        Err(Failure(
            EXIT_DATA,
            format!("a {d}-complex in R^{n} is neither a triangulation nor a fan"),
        ))
    }
}

fn with_domain<R>(
    g: &GeometricComplex,
    kind: DocKind,
    f: impl FnOnce(Domain) -> regsub::Result<R>,
) -> Result<R, Failure> {
    match kind {
        DocKind::Triangulation => Ok(f(Domain::triangulation(g))?),
        DocKind::Fan => {
            let fan = Fan::new(g.clone())?;
            Ok(f(Domain::fan(&fan))?)
        }
    }
}

fn validate(io: &mut Io, input: &Path) -> Outcome {
    let doc = io.read(input)?;
    let c = complex_of(&doc)?;
    let mut report = format!(
        "complex: dimension {}, {} vertices, {} facets, pure: {}\n",
        c.dim(),
        c.vertices().len(),
        c.facets().len(),
        if c.is_pure() { "yes" } else { "no" }
    );
    if !doc.vertices.is_empty() {
        let g = realize_with(
            c,
            doc.vertices.clone(),
            RealizeOptions {
                check_intersections: true,
            },
        )?;
        report.push_str(&format!(
            "embedding: valid in R^{}, volume {}\n",
            g.ambient_dim(),
            regsub::linalg::format_rat(&g.volume())
        ));
    }
    io.print(&report)?;
    Ok(EXIT_OK)
}

fn fvector(io: &mut Io, input: &Path) -> Outcome {
    let c = complex_of(&io.read(input)?)?;
    let f = c.f_vector();
    io.print(&format!("f = {f}; chi = {}\n", f.euler_characteristic()))?;
    Ok(EXIT_OK)
}

fn parse_face(s: &str) -> Result<Face, Failure> {
    let ids: Result<Vec<u32>, _> = s.split(',').map(str::parse).collect();
    let ids = ids.map_err(|_| Failure(EXIT_USAGE, format!("`{s}` is not a face like 0,1,2")))?;
    Face::new(ids).map_err(|e| Failure(EXIT_USAGE, e.to_string()))
}

fn parse_point(s: &str) -> Result<Point, Failure> {
    s.split(',')
        .map(|t| parse_rat(t).ok_or_else(|| Failure(EXIT_USAGE, format!("`{t}` is not a rational p/q"))))
        .collect()
}

fn subdivide(io: &mut Io, args: SubdivideArgs) -> Outcome {
    let doc = io.read(&args.input)?;
    let mut out = Document {
        kind: doc.kind,
        ..Document::default()
    };
    if doc.vertices.is_empty() {
        let mut c = complex_of(&doc)?;
        if args.derived {
            for _ in 0..args.k {
                let first = c.max_vertex().map_or(0, |m| m + 1);
                c = c.barycentric(first).0;
            }
            out.k = Some(args.k as u64);
        } else {
            if args.point.is_some() {
                return Err(Failure(EXIT_USAGE, "--point needs coordinates in the input".into()));
            }
            let tau = parse_face(args.stellar.as_deref().unwrap_or_default())?;
            let nu = c.max_vertex().map_or(0, |m| m + 1);
            c = c.stellar(&tau, nu)?;
        }
        out.set_complex(&c);
    } else {
        let g = geometric(&doc)?;
        let (res, hist) = if args.derived {
            out.k = Some(args.k as u64);
            sd_k_with_history(&g, args.k)
        } else {
            let tau = parse_face(args.stellar.as_deref().unwrap_or_default())?;
            let point = args.point.as_deref().map(parse_point).transpose()?;
            let (res, step) = stellar(&g, &tau, point.as_ref())?;
            let mut h = regsub::subdivision::StellarHistory::new();
            h.push(step);
            (res, h)
        };
        out.vertices = res.coords().clone();
        out.set_complex(res.complex());
        match &args.history {
            Some(p) => {
                let mut hd = Document::default();
                hd.set_history(&hist);
                write_file(p, &hd.to_string())?;
            }
            None => out.set_history(&hist),
        }
    }
    io.write(&args.out, &out.to_string())?;
    Ok(EXIT_OK)
}

fn refine(io: &mut Io, coarse: &Path, fine: &Path, out: &OutArg) -> Outcome {
    let g1 = geometric(&io.read(coarse)?)?;
    let g2 = geometric(&io.read(fine)?)?;
    let r = refine_until(&g1, &g2)?;
    let mut doc = Document {
        k: Some(r.k as u64),
        vertices: r.complex.coords().clone(),
        ..Document::default()
    };
    doc.set_complex(r.complex.complex());
    doc.set_history(&r.history);
    io.write(out, &doc.to_string())?;
    Ok(EXIT_OK)
}

fn certificate_doc(cert: &RegularityCertificate) -> Document {
    Document {
        heights: cert.heights.heights.clone(),
        margins: cert.margins.clone(),
        ..Document::default()
    }
}

fn check_regular(io: &mut Io, input: &Path, flag: Option<KindArg>, out: &OutArg) -> Outcome {
    let doc = io.read(input)?;
    let g = geometric(&doc)?;
    let kind = kind_of(&doc, &g, flag)?;
    match with_domain(&g, kind, is_regular)? {
        Regularity::Regular(cert) => {
            io.write(out, &certificate_doc(&cert).to_string())?;
            Ok(EXIT_OK)
        }
        Regularity::Irregular(w) => {
            let d = Document {
                multipliers: w.multipliers,
                ..Document::default()
            };
            io.write(out, &d.to_string())?;
            Ok(EXIT_IRREGULAR)
        }
    }
}

fn trace_epsilons(t: &Trace) -> Vec<(String, regsub::Rat)> {
    let mut v: Vec<(String, regsub::Rat)> = Vec::new();
    v.extend(t.transport_epsilons.iter().map(|e| ("transport".to_string(), e.clone())));
    v.extend(t.claim3_epsilons.iter().map(|e| ("stars".to_string(), e.clone())));
    v.push(("combine".to_string(), t.combine_epsilon.clone()));
    v
}

fn make_regular(io: &mut Io, input: &Path, seed: Option<u64>, flag: Option<KindArg>, out: &OutArg) -> Outcome {
    let doc = io.read(input)?;
    let g = geometric(&doc)?;
    let kind = kind_of(&doc, &g, flag)?;
    let mut res = Document {
        kind: Some(kind),
        ..Document::default()
    };
    let (k, complex, cert, trace) = match kind {
        DocKind::Triangulation => {
            let Some(seed) = seed else {
                return Err(Failure(EXIT_USAGE, "--seed is required for triangulations".into()));
            };
            res.seed = Some(seed);
            let o = make_regular_triangulation(&g, seed)?;
            (o.k, o.complex, o.certificate, o.trace)
        }
        DocKind::Fan => {
            let o = make_fan_regular(&g)?;
            (o.m, o.fan.into_sphere(), o.certificate, o.trace)
        }
    };
    res.k = Some(k as u64);
    res.vertices = complex.coords().clone();
    res.set_complex(complex.complex());
    res.heights = cert.heights.heights;
    res.margins = cert.margins;
    res.set_history(&trace.refine_input);
    res.epsilons = trace_epsilons(&trace);
    io.write(out, &res.to_string())?;
    Ok(EXIT_OK)
}

fn verify(io: &mut Io, complex: &Path, certificate: &Path, flag: Option<KindArg>) -> Outcome {
    let doc = io.read(complex)?;
    let g = geometric(&doc)?;
    let kind = kind_of(&doc, &g, flag)?;
    let cd = io.read(certificate)?;
    let cert = RegularityCertificate {
        heights: PLFunction::new(cd.heights),
        margins: cd.margins,
    };
    let ok = match with_domain(&g, kind, |dom| verify_certificate(dom, &cert)) {
        Ok(ok) => ok,
        Err(Failure(_, msg)) => {
            io.print(&format!("invalid: {msg}\n"))?;
            return Ok(EXIT_REJECTED);
        }
    };
    io.print(if ok { "valid\n" } else { "invalid\n" })?;
    Ok(if ok { EXIT_OK } else { EXIT_REJECTED })
}

fn connect(
    io: &mut Io,
    t0: &Path,
    t1: &Path,
    budget: usize,
    max_vertices: Option<usize>,
    out: &OutArg,
) -> Outcome {
    let a = geometric(&io.read(t0)?)?;
    let b = geometric(&io.read(t1)?)?;
    let budget = Budget {
        states: budget,
        max_vertices: max_vertices.unwrap_or(usize::MAX),
    };
    let found = connect_bruteforce(&a, &b, budget)?;
    match found.moves {
        Some(moves) => {
            let d = Document {
                moves,
                ..Document::default()
            };
            io.write(out, &d.to_string())?;
            Ok(EXIT_OK)
        }
        None => {
            io.print(&format!(
                "not found ({} triangulations visited)\n",
                found.stats.visited
            ))?;
            Ok(EXIT_REJECTED)
        }
    }
}

fn steinitz(io: &mut Io, input: &Path) -> Outcome {
    let c = complex_of(&io.read(input)?)?;
    let k = polytopality_dim2(&c)?;
    io.print(&format!("{k}\n"))?;
    Ok(EXIT_OK)
}
