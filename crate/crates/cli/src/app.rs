//! Command-line front end.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use posetahedra_core::affine::{
    cyclohedron_face_lattice, enumerate_affine_tubes, enumerate_affine_tubings, AffinePoset, AffineSystem,
};
use posetahedra_core::compact::{
    canonical_stratum_point, check_coherent, collapse, expand, ratio_counterexample_demo, t_max, tubing_of,
    CompactError, RatioTarget, TMax,
};
use posetahedra_core::geometry::{realize, realize_poset_associahedron, GeometryError, RealizeOptions};
use posetahedra_core::lattice::{associahedron_face_lattice, flag_witness};
use posetahedra_core::tubing::{enumerate_proper_tubings, enumerate_tubes, TubingTree};
use posetahedra_core::{ElemSet, FaceLattice, Poset};
use serde::Serialize;

use crate::export::{export, ExportFormat, DEFAULT_PRECISION};
use crate::formats::{
    affine_tube_ids, parse_tube_key, q_from_json, q_to_json, to_json_line, tube_ids, tubing_from_ids, tubing_ids,
    AffinePosetJson, ConfigPointJson, FormatError, PosetJson,
};
use crate::harness;

pub const MAX_BITS_VAR: &str = "POSETAHEDRA_MAX_BITS";

#[derive(Debug, Parser)]
#[command(name = "posetahedra", version, about = "Poset associahedra, affine cyclohedra and their compactifications")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Poset files.
    #[command(subcommand)]
    Poset(PosetCmd),
    /// List tubes, or maximal proper tubings.
    Tubes {
        input: String,
        /// Only tubes strictly between a singleton and the whole poset.
        #[arg(long)]
        proper: bool,
        /// List maximal proper tubings instead of tubes.
        #[arg(long)]
        max_tubings: bool,
    },
    /// Poset associahedra.
    #[command(subcommand)]
    Assoc(AssocCmd),
    /// Affine poset cyclohedra.
    #[command(subcommand)]
    Cyclo(CycloCmd),
    /// Points of the compactified configuration space.
    #[command(subcommand)]
    Compact(CompactCmd),
    /// Run the acceptance suite.
    VerifyAll {
        #[arg(long, value_enum, default_value_t = CorpusName::Desk)]
        corpus: CorpusName,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CorpusName {
    Desk,
}

#[derive(Debug, Subcommand)]
enum PosetCmd {
    /// Check a poset file and print its reduced covers.
    Validate { input: String },
}

#[derive(Debug, clap::Args)]
struct RealizeArgs {
    input: String,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ExportFormat::Json)]
    format: ExportFormat,
    /// Decimal digits for OFF output.
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: usize,
}

#[derive(Debug, Subcommand)]
enum AssocCmd {
    /// Face lattice of the poset associahedron.
    Faces {
        input: String,
        #[arg(long)]
        fvector: bool,
        #[arg(long)]
        hvector: bool,
        /// Whether the dual simplicial complex is flag.
        #[arg(long)]
        flag_check: bool,
    },
    /// Certified exact realization.
    Realize(RealizeArgs),
}

#[derive(Debug, Subcommand)]
enum CycloCmd {
    /// Face lattice of the affine poset cyclohedron.
    Faces {
        input: String,
        #[arg(long)]
        fvector: bool,
        #[arg(long)]
        hvector: bool,
    },
    /// Certified exact realization.
    Realize(RealizeArgs),
}

#[derive(Debug, clap::Args)]
struct PointArgs {
    /// Point file.
    point: String,
    /// Poset file, when the point carries no covers.
    #[arg(long)]
    poset: Option<String>,
}

#[derive(Debug, Subcommand)]
enum CompactCmd {
    /// Canonical point of the stratum of a proper tubing.
    Synthesize {
        poset: String,
        /// Tubing as a JSON list of id lists, or a file holding one.
        #[arg(long)]
        tubing: String,
    },
    /// Check that a point is coherent and report its stratum.
    Verify(PointArgs),
    /// Push a tube off its stratum by a parameter t.
    Expand {
        #[command(flatten)]
        point: PointArgs,
        /// Tube to expand, as comma-separated ids.
        #[arg(long)]
        tube: String,
        /// Enclosing tube; its parent in the stratum when absent.
        #[arg(long)]
        parent: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Collapse a tube back onto its stratum and recover t.
    Collapse {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        tube: String,
        #[arg(long)]
        parent: String,
    },
    /// Expansion bound t_max for a tube of the stratum.
    Tmax {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        tube: String,
        #[arg(long)]
        parent: Option<String>,
    },
    /// Curves with a common limit and different ratio limits on N4.
    DemoRatios {
        /// Nonnegative ratio limits, or "inf".
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        targets: Vec<String>,
    },
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad input or usage; exit code 1.
    Invalid(String),
    /// A realization disagreed with its certificate; exit code 2.
    Certification(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Certification(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Invalid(m) | CliError::Certification(m) => m,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn invalid(m: impl std::fmt::Display) -> CliError {
    CliError::Invalid(m.to_string())
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::BitLimit { .. } => CliError::Invalid(e.to_string()),
            _ => CliError::Certification(e.to_string()),
        }
    }
}

impl From<CompactError> for CliError {
    fn from(e: CompactError) -> Self {
        invalid(e)
    }
}

const POSET_HINT: &str = "expected a poset like {\"covers\": [[1, 2], [2, 3]]} (schemas/poset.schema.json)";
const AFFINE_HINT: &str = "expected an affine poset like {\"n\": 3, \"covers\": [[1, 2], [2, 3], [3, 4]]} (schemas/affine_poset.schema.json)";
const POINT_HINT: &str = "expected a point like {\"covers\": [[1, 2], [2, 3]], \"tubes\": {\"1,2\": [\"-1/2\", \"1/2\"], ...}} (schemas/config_point.schema.json)";

fn with_hint(e: FormatError, hint: &str) -> CliError {
    match e {
        FormatError::Json(_) | FormatError::Rational(_) | FormatError::Key(_) | FormatError::Shape(_) => {
            invalid(format!("{}\nhint: {}", e, hint))
        }
        _ => invalid(e),
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
}

impl Io<'_> {
    fn read(&mut self, path: &str) -> Result<String> {
        if path == "-" {
            let mut s = String::new();
            self.stdin.read_to_string(&mut s).map_err(|e| invalid(format!("reading standard input: {}", e)))?;
            Ok(s)
        } else {
            std::fs::read_to_string(path).map_err(|e| invalid(format!("reading {}: {}", path, e)))
        }
    }

    fn write(&mut self, s: &str) -> Result<()> {
        self.stdout.write_all(s.as_bytes()).map_err(|e| invalid(format!("writing output: {}", e)))
    }

    fn poset(&mut self, path: &str) -> Result<Poset> {
        let text = self.read(path)?;
        serde_json::from_str::<PosetJson>(&text)
            .map_err(FormatError::from)
            .and_then(|j| j.build())
            .map_err(|e| with_hint(e, POSET_HINT))
    }

    fn affine(&mut self, path: &str) -> Result<AffinePoset> {
        let text = self.read(path)?;
        serde_json::from_str::<AffinePosetJson>(&text)
            .map_err(FormatError::from)
            .and_then(|j| j.build())
            .map_err(|e| with_hint(e, AFFINE_HINT))
    }

    fn point(&mut self, args: &PointArgs) -> Result<(Poset, posetahedra_core::compact::ConfigPoint)> {
        let text = self.read(&args.point)?;
        let json: ConfigPointJson = serde_json::from_str(&text).map_err(|e| with_hint(e.into(), POINT_HINT))?;
        let embedded = json.poset().map_err(|e| with_hint(e, POINT_HINT))?;
        let p = match (&args.poset, embedded) {
            (Some(path), embedded) => {
                let p = self.poset(path)?;
                if embedded.is_some_and(|e| e != p) {
                    return Err(invalid("point covers differ from the given poset"));
                }
                p
            }
            (None, Some(p)) => p,
            (None, None) => return Err(invalid(format!("point has no covers; pass --poset\nhint: {}", POINT_HINT))),
        };
        let c = json.build(&p).map_err(|e| with_hint(e, POINT_HINT))?;
        Ok((p, c))
    }
}

fn realize_options() -> Result<RealizeOptions> {
    match std::env::var(MAX_BITS_VAR) {
        Ok(v) => {
            let bits = v
                .trim()
                .parse::<u64>()
                .map_err(|_| invalid(format!("{} must be a positive integer, got {:?}", MAX_BITS_VAR, v)))?;
            Ok(RealizeOptions { max_bits: Some(bits) })
        }
        Err(_) => Ok(RealizeOptions::default()),
    }
}

/// Runs the command line `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = stderr.flush();
                    0
                }
                _ => 1,
            };
        }
    };
    let mut io = Io { stdin, stdout };
    match dispatch(cli.cmd, &mut io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.code()
        }
    }
}

fn dispatch(cmd: Cmd, io: &mut Io<'_>) -> Result<i32> {
    match cmd {
        Cmd::Poset(PosetCmd::Validate { input }) => {
            let p = io.poset(&input)?;
            #[derive(Serialize)]
            struct Valid {
                valid: bool,
                elements: Vec<i64>,
                covers: Vec<(i64, i64)>,
            }
            io.write(&to_json_line(&Valid {
                valid: true,
                elements: p.ids().to_vec(),
                covers: PosetJson::of(&p).covers,
            }))?;
        }
        Cmd::Tubes { input, proper, max_tubings } => {
            let p = io.poset(&input)?;
            let out = if max_tubings {
                let mut ts = enumerate_proper_tubings(&p, true);
                ts.sort();
                to_json_line(&ts.iter().map(|t| tubing_ids(&p, t)).collect::<Vec<_>>())
            } else {
                to_json_line(&tubing_ids(&p, &enumerate_tubes(&p, proper)))
            };
            io.write(&out)?;
        }
        Cmd::Assoc(AssocCmd::Faces { input, fvector, hvector, flag_check }) => {
            let p = io.poset(&input)?;
            let l = associahedron_face_lattice(&p);
            let label = |t: &Vec<ElemSet>| tubing_ids(&p, t);
            if fvector || hvector || flag_check {
                let mut out = vector_lines(&l, fvector, hvector)?;
                if flag_check {
                    match flag_witness(&p) {
                        None => out.push_str("flag\n"),
                        Some(w) => out.push_str(&format!("not flag: {}", to_json_line(&tubing_ids(&p, &w)))),
                    }
                }
                io.write(&out)?;
            } else {
                io.write(&faces_json(&l, label)?)?;
            }
        }
        Cmd::Assoc(AssocCmd::Realize(args)) => {
            let p = io.poset(&args.input)?;
            let r = realize_poset_associahedron(&p, &realize_options()?)?;
            let re = r.realization;
            emit(io, &args, &re.primal, &re.melt_log)?;
        }
        Cmd::Cyclo(CycloCmd::Faces { input, fvector, hvector }) => {
            let a = io.affine(&input)?;
            let l = cyclohedron_face_lattice(&a);
            if fvector || hvector {
                io.write(&vector_lines(&l, fvector, hvector)?)?;
            } else {
                io.write(&faces_json(&l, |t| t.iter().map(affine_tube_ids).collect())?)?;
            }
        }
        Cmd::Cyclo(CycloCmd::Realize(args)) => {
            let a = io.affine(&args.input)?;
            if a.order() < 2 {
                return Err(invalid("affine posets of order 1 give a point; nothing to realize"));
            }
            let r = realize(&AffineSystem::new(&a), &realize_options()?)?;
            check_affine_realization(&a, &r)?;
            emit(io, &args, &r.primal, &r.melt_log)?;
        }
        Cmd::Compact(c) => compact(c, io)?,
        Cmd::VerifyAll { corpus: CorpusName::Desk } => {
            let opts = realize_options()?;
            let mut failed = 0;
            for c in harness::criteria() {
                let o = harness::run_criterion(&c, &opts);
                if !o.passed {
                    failed += 1;
                }
                let line = format!("{}\n", o.line());
                io.write(&line)?;
            }
            let n = harness::criteria().len();
            io.write(&format!("{}/{} criteria passed\n", n - failed, n))?;
            return Ok(if failed == 0 { 0 } else { 2 });
        }
    }
    Ok(0)
}

fn check_affine_realization(a: &AffinePoset, r: &posetahedra_core::geometry::Realization<posetahedra_core::affine::AffineTube>) -> Result<()> {
    let mut facets = r.facet_tubes.clone();
    facets.sort();
    let mut vertices = r.vertex_tubings.clone();
    vertices.sort();
    let mut maximal = enumerate_affine_tubings(a, true);
    maximal.sort();
    if facets != enumerate_affine_tubes(a, true) || vertices != maximal {
        return Err(CliError::Certification("realization disagrees with the tubing lattice".into()));
    }
    Ok(())
}

fn vector_lines<L: Ord + Clone>(l: &FaceLattice<L>, f: bool, h: bool) -> Result<String> {
    let join = |v: Vec<String>| v.join(" ") + "\n";
    let mut out = String::new();
    if f {
        let fv = l.f_vector().map_err(|e| CliError::Certification(e.to_string()))?;
        out.push_str(&join(fv.iter().map(|x| x.to_string()).collect()));
    }
    if h {
        let hv = l.h_vector().map_err(|e| CliError::Certification(e.to_string()))?;
        out.push_str(&join(hv.iter().map(|x| x.to_string()).collect()));
    }
    Ok(out)
}

#[derive(Serialize)]
struct FaceJson {
    tubing: Vec<Vec<i64>>,
    dim: isize,
}

#[derive(Serialize)]
struct FacesJson {
    dim: isize,
    f_vector: Vec<u64>,
    h_vector: Vec<i64>,
    faces: Vec<FaceJson>,
}

/// Nonempty faces, largest first, ties by tubing.
fn faces_json<L: Ord + Clone>(l: &FaceLattice<L>, label: impl Fn(&L) -> Vec<Vec<i64>>) -> Result<String> {
    let cert = |e: posetahedra_core::lattice::LatticeError| CliError::Certification(e.to_string());
    let mut faces: Vec<FaceJson> = l
        .labels
        .iter()
        .zip(&l.dims)
        .filter_map(|(t, &dim)| t.as_ref().map(|t| FaceJson { tubing: label(t), dim }))
        .collect();
    faces.sort_by(|a, b| b.dim.cmp(&a.dim).then_with(|| a.tubing.cmp(&b.tubing)));
    Ok(to_json_line(&FacesJson {
        dim: l.dim,
        f_vector: l.f_vector().map_err(cert)?,
        h_vector: l.h_vector().map_err(cert)?,
        faces,
    }))
}

fn emit(
    io: &mut Io<'_>,
    args: &RealizeArgs,
    poly: &posetahedra_core::geometry::RationalPolytope,
    log: &[posetahedra_core::geometry::MeltRecord],
) -> Result<()> {
    let text = export(poly, log, args.format, args.precision);
    match &args.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| invalid(format!("writing {}: {}", path.display(), e)))?;
            io.write(&format!(
                "dimension {}, {} vertices, {} facets, max {} bits\n",
                poly.dim(),
                poly.vertices.len(),
                poly.facets.len(),
                poly.max_bits()
            ))
        }
        None => io.write(&text),
    }
}

fn tube_arg(p: &Poset, key: &str) -> Result<ElemSet> {
    let ids = parse_tube_key(key).map_err(invalid)?;
    p.subset(&ids).map_err(invalid)
}

fn parent_arg(p: &Poset, c: &posetahedra_core::compact::ConfigPoint, tau: ElemSet, parent: Option<&str>) -> Result<ElemSet> {
    match parent {
        Some(k) => tube_arg(p, k),
        None => {
            let tubing = tubing_of(p, c)?;
            if !tubing.contains(&tau) {
                return Err(invalid("tube is not in the stratum tubing; pass --parent"));
            }
            TubingTree::new(p, &tubing).parent_of(tau).ok_or_else(|| invalid("tube has no parent"))
        }
    }
}

fn compact(cmd: CompactCmd, io: &mut Io<'_>) -> Result<()> {
    match cmd {
        CompactCmd::Synthesize { poset, tubing } => {
            let p = io.poset(&poset)?;
            let text = if tubing.trim_start().starts_with('[') { tubing } else { io.read(&tubing)? };
            let ids: Vec<Vec<i64>> = serde_json::from_str(&text)
                .map_err(|e| invalid(format!("{}\nhint: expected a tubing like [[1, 2], [1, 2, 3]]", e)))?;
            let t = tubing_from_ids(&p, &ids).map_err(invalid)?;
            let c = canonical_stratum_point(&p, &t)?;
            io.write(&to_json_line(&ConfigPointJson::of(&p, &c, Some(&t))))
        }
        CompactCmd::Verify(args) => {
            let (p, c) = io.point(&args)?;
            check_coherent(&p, &c).map_err(|e| match e {
                CompactError::Incoherent { inner, outer } => invalid(format!(
                    "components for {:?} and {:?} are not coherent",
                    tube_ids(&p, inner),
                    tube_ids(&p, outer)
                )),
                e => invalid(e),
            })?;
            #[derive(Serialize)]
            struct Verified {
                coherent: bool,
                tubing: Vec<Vec<i64>>,
            }
            let t = tubing_of(&p, &c)?;
            io.write(&to_json_line(&Verified {
                coherent: true,
                tubing: tubing_ids(&p, &t),
            }))
        }
        CompactCmd::Expand { point, tube, parent, t } => {
            let (p, c) = io.point(&point)?;
            let tau = tube_arg(&p, &tube)?;
            let outer = parent_arg(&p, &c, tau, parent.as_deref())?;
            let t = q_from_json(&t).map_err(invalid)?;
            let y = expand(&p, &c, tau, outer, &t)?;
            let tubing = tubing_of(&p, &y)?;
            io.write(&to_json_line(&ConfigPointJson::of(&p, &y, Some(&tubing))))
        }
        CompactCmd::Collapse { point, tube, parent } => {
            let (p, y) = io.point(&point)?;
            let tau = tube_arg(&p, &tube)?;
            let outer = tube_arg(&p, &parent)?;
            let (c, t) = collapse(&p, &y, tau, outer)?;
            let tubing = tubing_of(&p, &c)?;
            let mut json = ConfigPointJson::of(&p, &c, Some(&tubing));
            json.t = Some(q_to_json(&t));
            io.write(&to_json_line(&json))
        }
        CompactCmd::Tmax { point, tube, parent } => {
            let (p, c) = io.point(&point)?;
            let tau = tube_arg(&p, &tube)?;
            let outer = parent_arg(&p, &c, tau, parent.as_deref())?;
            let m = match t_max(&p, &c, tau, outer)? {
                TMax::Finite(m) => q_to_json(&m),
                TMax::Infinite => "inf".into(),
            };
            io.write(&to_json_line(&serde_json::json!({ "t_max": m })))
        }
        CompactCmd::DemoRatios { targets } => {
            let targets = targets
                .iter()
                .map(|s| match s.trim() {
                    "inf" | "infinity" => Ok(RatioTarget::Infinite),
                    s => q_from_json(s).map(RatioTarget::Finite).map_err(invalid),
                })
                .collect::<Result<Vec<_>>>()?;
            let demo = ratio_counterexample_demo(&targets)?;
            io.write(&to_json_line(&demo_json(&demo)))
        }
    }
}

#[derive(Serialize)]
struct SampleJson {
    k: u32,
    t: String,
    x: Vec<String>,
    ratio: String,
    distance: String,
}

#[derive(Serialize)]
struct CurveJson {
    target: String,
    samples: Vec<SampleJson>,
}

#[derive(Serialize)]
struct DemoJson {
    poset: PosetJson,
    limit: ConfigPointJson,
    curves: Vec<CurveJson>,
}

fn demo_json(d: &posetahedra_core::compact::RatioDemo) -> DemoJson {
    let p = &d.poset;
    let tubing = tubing_of(p, &d.limit).unwrap_or_default();
    DemoJson {
        poset: PosetJson::of(p),
        limit: ConfigPointJson::of(p, &d.limit, Some(&tubing)),
        curves: d
            .curves
            .iter()
            .map(|c| CurveJson {
                target: match &c.target {
                    RatioTarget::Finite(r) => q_to_json(r),
                    RatioTarget::Infinite => "inf".into(),
                },
                samples: c
                    .samples
                    .iter()
                    .map(|s| SampleJson {
                        k: s.k,
                        t: q_to_json(&s.t),
                        x: s.x.iter().map(q_to_json).collect(),
                        ratio: q_to_json(&s.ratio),
                        distance: q_to_json(&s.distance),
                    })
                    .collect(),
            })
            .collect(),
    }
}
