//! Command-line surface and JSON file formats.
//!
//! Ray indices in files and reports are 1-based: the rays of the cone are
//! `1..=k` and exceptional rays follow. Integers are JSON numbers when they
//! fit in `±(2^53 - 1)` and decimal strings otherwise; both are accepted on
//! input.
//!
//! Exit codes: `0` success, `1` a refuted prediction or a failed internal
//! check, `2` malformed input, `3` a violated precondition. Errors are
//! written to stderr as `{"error": {"kind": ..., "message": ...}}`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use jsonschema::JSONSchema;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::fans::{resolve_with_profile, Fan, FanError, ResolutionProfile};
use crate::koszul::{koszul_sweep, KoszulError, KoszulSweep};
use crate::polyhedra::{Codim, Cone, ConeError};
use crate::toric_complexes::{
    assemble_degree_complex, degree_support, experimental_ishida_cohomology, graded_cohomology, p1_higher_image,
    ComplexKind, GradedCohomologyTable, ResolvedCone, ToricError,
};
use crate::verifier::{verify, Evidence, TopDegreeCheck, VerdictReport, VerifyError};
use crate::{Int, Lattice};

#[derive(Parser, Debug)]
#[command(name = "toric-vanishing", version, about = "Higher direct images of log differentials on toric resolutions")]
struct Args {
    /// Upper bound on worker threads (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simpliciality, smoothness, multiplicity and codimension of the singular locus.
    Classify { cone: PathBuf },
    /// A smooth fan refining the cone.
    Resolve {
        cone: PathBuf,
        /// Fail unless every smooth face of the cone survives.
        #[arg(long)]
        strong: bool,
        /// Also write the fan file here.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Graded cohomology of a degree-wise complex over a box of degrees.
    Cohomology {
        cone: PathBuf,
        #[arg(long)]
        fan: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 0)]
        bound: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// A single degree as a JSON array, instead of the box.
        #[arg(long, allow_hyphen_values = true)]
        degree: Option<String>,
        /// Allow the Ishida complex on non-simplicial cones.
        #[arg(long)]
        experimental: bool,
    },
    /// Exactness check of the Koszul quotient complexes.
    KoszulSweep {
        #[arg(long = "n-max")]
        n_max: usize,
    },
    /// Evaluate the vanishing predictions.
    Verify {
        cone: PathBuf,
        #[arg(long)]
        fan: Option<PathBuf>,
        #[arg(long = "p-max")]
        p_max: usize,
        #[arg(long)]
        bound: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Ishida,
    Residue,
    Kernel,
    P1,
}

impl From<KindArg> for ComplexKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Ishida => ComplexKind::Ishida,
            KindArg::Residue => ComplexKind::Residue,
            KindArg::Kernel => ComplexKind::Kernel,
            KindArg::P1 => ComplexKind::LogDifferentialP1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

/// A failure with its exit code and a machine-readable kind.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: String,
    pub message: String,
    pub extra: Option<(String, Value)>,
}

impl CliError {
    fn malformed(kind: &str, message: impl Into<String>) -> Self {
        CliError { code: 2, kind: kind.into(), message: message.into(), extra: None }
    }

    fn precondition(kind: &str, message: impl Into<String>) -> Self {
        CliError { code: 3, kind: kind.into(), message: message.into(), extra: None }
    }

    pub fn to_json(&self) -> Value {
        let mut e = Map::new();
        e.insert("kind".into(), Value::String(self.kind.clone()));
        e.insert("message".into(), Value::String(self.message.clone()));
        if let Some((k, v)) = &self.extra {
            e.insert(k.clone(), v.clone());
        }
        json!({ "error": e })
    }
}

impl From<ConeError> for CliError {
    fn from(e: ConeError) -> Self {
        let kind = match e {
            ConeError::NotFullDimensional => return CliError::precondition("NotFullDimensional", e.to_string()),
            ConeError::InvalidRank => "InvalidRank",
            ConeError::DimensionMismatch { .. } => "DimensionMismatch",
            ConeError::ZeroRay(_) => "ZeroRay",
            ConeError::NonPrimitiveRay(_) => "NonPrimitiveRay",
            ConeError::ParallelRays(..) => "ParallelRays",
            ConeError::NotStronglyConvex => "NotStronglyConvex",
            ConeError::NotExtreme(_) => "NotExtreme",
            ConeError::VectorLength { .. } => "VectorLength",
        };
        CliError::malformed(kind, e.to_string())
    }
}

impl From<FanError> for CliError {
    fn from(e: FanError) -> Self {
        let msg = e.to_string();
        match e {
            FanError::Cone(c) => c.into(),
            FanError::Malformed(_) => CliError::malformed("MalformedFan", msg),
            FanError::InvalidFan(_) => CliError::precondition("InvalidFan", msg),
            FanError::NotARefinement(_) => CliError::precondition("NotARefinement", msg),
            FanError::RayOrderMismatch => CliError::precondition("RayOrderMismatch", msg),
            FanError::PointOutsideSupport => CliError::precondition("PointOutsideSupport", msg),
            FanError::NonPrimitivePoint => CliError::precondition("NonPrimitivePoint", msg),
            FanError::StrongnessUnachieved { fan, profile } => CliError {
                code: 3,
                kind: "StrongnessUnachieved".into(),
                message: msg,
                extra: Some(("result".into(), json!({ "fan": fan_json(&fan), "profile": profile_json(&profile) }))),
            },
        }
    }
}

impl From<ToricError> for CliError {
    fn from(e: ToricError) -> Self {
        let msg = e.to_string();
        let kind = match e {
            ToricError::Cone(c) => return c.into(),
            ToricError::Fan(f) => return f.into(),
            ToricError::Complex(_) => {
                return CliError { code: 1, kind: "ComplexError".into(), message: msg, extra: None }
            }
            ToricError::CrosscheckFailure { .. } => {
                return CliError { code: 1, kind: "CrosscheckFailure".into(), message: msg, extra: None }
            }
            ToricError::KernelBelowC { .. } => {
                return CliError { code: 1, kind: "KernelBelowC".into(), message: msg, extra: None }
            }
            ToricError::DegreeOutsideDualCone { .. } => "DegreeOutsideDualCone",
            ToricError::UnsupportedNonSimplicial { .. } => "UnsupportedNonSimplicial",
            ToricError::UnsupportedP { .. } => "UnsupportedP",
            ToricError::NoSingularLocus => "NoSingularLocus",
            ToricError::PBelowC { .. } => "PBelowC",
            ToricError::WitnessSearchExhausted { .. } => "WitnessSearchExhausted",
        };
        CliError::precondition(kind, msg)
    }
}

impl From<KoszulError> for CliError {
    fn from(e: KoszulError) -> Self {
        let msg = e.to_string();
        match e {
            KoszulError::InvalidSpec { .. } => CliError::precondition("InvalidSpec", msg),
            KoszulError::LemmaViolation { .. } => {
                CliError { code: 1, kind: "LemmaViolation".into(), message: msg, extra: None }
            }
            KoszulError::Complex(_) => CliError { code: 1, kind: "ComplexError".into(), message: msg, extra: None },
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Toric(t) => t.into(),
            VerifyError::NotSmooth => CliError::precondition("NotSmooth", e.to_string()),
        }
    }
}

const SAFE: i64 = (1 << 53) - 1;

pub fn int_json(x: &Int) -> Value {
    match x.to_i64() {
        Some(v) if v.abs() <= SAFE => Value::from(v),
        _ => Value::String(x.to_string()),
    }
}

pub fn vector_json(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int_json).collect())
}

fn indices_json(v: &[usize]) -> Value {
    Value::Array(v.iter().map(|i| Value::from(i + 1)).collect())
}

fn codim_json(c: Codim) -> Value {
    match c {
        Codim::Finite(d) => Value::from(d),
        Codim::Infinite => Value::String("infinity".into()),
    }
}

/// `"[a,b,…]"`, the key of a degree in `entries`.
fn degree_key(u: &[Int]) -> String {
    format!("[{}]", u.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn parse_int(v: &Value, what: &str) -> Result<Int, CliError> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Int::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(Int::from(u))
            } else {
                Err(CliError::malformed("ParseError", format!("{what}: {n} is not an integer")))
            }
        }
        Value::String(s) => s
            .trim()
            .parse::<Int>()
            .map_err(|_| CliError::malformed("ParseError", format!("{what}: {s:?} is not an integer"))),
        other => Err(CliError::malformed("ParseError", format!("{what}: expected an integer, got {other}"))),
    }
}

fn parse_vector(v: &Value, what: &str) -> Result<Lattice, CliError> {
    v.as_array()
        .ok_or_else(|| CliError::malformed("ParseError", format!("{what}: expected an array")))?
        .iter()
        .map(|x| parse_int(x, what))
        .collect()
}

fn field<'a>(obj: &'a Value, key: &str, file: &str) -> Result<&'a Value, CliError> {
    obj.get(key).ok_or_else(|| CliError::malformed("ParseError", format!("{file}: missing field {key:?}")))
}

fn parse_rank(obj: &Value, file: &str) -> Result<usize, CliError> {
    field(obj, "rank", file)?
        .as_u64()
        .and_then(|r| usize::try_from(r).ok())
        .ok_or_else(|| CliError::malformed("ParseError", format!("{file}: rank must be a nonnegative integer")))
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::malformed("IoError", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::malformed("ParseError", format!("{}: {e}", path.display())))
}

/// Parses `{"rank": n, "rays": [[…], …]}`, rescaling non-primitive rays.
/// Returns the cone and warnings.
pub fn parse_cone(value: &Value) -> Result<(Cone, Vec<String>), CliError> {
    let rank = parse_rank(value, "cone")?;
    let rays = field(value, "rays", "cone")?
        .as_array()
        .ok_or_else(|| CliError::malformed("ParseError", "cone: rays must be an array"))?
        .iter()
        .enumerate()
        .map(|(i, r)| parse_vector(r, &format!("ray {}", i + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    let (cone, changed) = Cone::normalized(rank, rays)?;
    let warnings = changed
        .iter()
        .map(|i| format!("ray {} was not primitive and has been replaced by {}", i + 1, degree_key(&cone.rays()[*i])))
        .collect();
    Ok((cone, warnings))
}

/// Parses `{"rank", "rays", "max_cones"}` with 1-based indices.
pub fn parse_fan(value: &Value) -> Result<Fan, CliError> {
    let rank = parse_rank(value, "fan")?;
    let rays = field(value, "rays", "fan")?
        .as_array()
        .ok_or_else(|| CliError::malformed("ParseError", "fan: rays must be an array"))?
        .iter()
        .enumerate()
        .map(|(i, r)| parse_vector(r, &format!("fan ray {}", i + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    let cones = field(value, "max_cones", "fan")?
        .as_array()
        .ok_or_else(|| CliError::malformed("ParseError", "fan: max_cones must be an array"))?
        .iter()
        .map(|c| {
            c.as_array()
                .ok_or_else(|| CliError::malformed("ParseError", "fan: each maximal cone is an index array"))?
                .iter()
                .map(|i| match i.as_u64() {
                    Some(i) if i >= 1 => Ok(i as usize - 1),
                    _ => Err(CliError::malformed("BadIndex", format!("fan: {i} is not a 1-based ray index"))),
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Fan::new(rank, rays, cones)?)
}

pub fn cone_json(cone: &Cone) -> Value {
    json!({
        "rank": cone.ambient_rank(),
        "rays": cone.rays().iter().map(|r| vector_json(r)).collect::<Vec<_>>(),
    })
}

pub fn fan_json(fan: &Fan) -> Value {
    json!({
        "rank": fan.ambient_rank(),
        "rays": fan.rays().iter().map(|r| vector_json(r)).collect::<Vec<_>>(),
        "max_cones": fan.max_cones().iter().map(|c| indices_json(c)).collect::<Vec<_>>(),
    })
}

pub fn profile_json(p: &ResolutionProfile) -> Value {
    json!({
        "smooth": p.smooth,
        "strong": p.strong,
        "codim_z": codim_json(p.codim_z),
        "exceptional_rays": indices_json(&p.exceptional_rays),
        "missing_faces": p.missing_faces.iter().map(|f| indices_json(f)).collect::<Vec<_>>(),
    })
}

fn dims_json(h: &BTreeMap<usize, usize>) -> Value {
    Value::Object(h.iter().map(|(i, d)| (i.to_string(), Value::from(*d))).collect())
}

pub fn table_json(t: &GradedCohomologyTable) -> Value {
    let entries: Map<String, Value> = t.entries.iter().map(|(u, h)| (degree_key(u), dims_json(h))).collect();
    json!({
        "kind": t.kind.name(),
        "p": t.p,
        "bound": t.bound,
        "experimental": t.experimental,
        "degree_count": t.degree_count,
        "entries": entries,
        "totals": dims_json(&t.totals),
        "degenerate_degrees": t.degenerate_degrees.iter().map(|u| vector_json(u)).collect::<Vec<_>>(),
    })
}

fn table_text(t: &GradedCohomologyTable) -> String {
    let mut s = format!("# kind={} p={} bound={} degrees={}\n", t.kind.name(), t.p, t.bound, t.degree_count);
    for (u, h) in &t.entries {
        let cols: Vec<String> = h.iter().map(|(i, d)| format!("H^{i}={d}")).collect();
        s.push_str(&format!("{}\t{}\n", degree_key(u), cols.join(" ")));
    }
    let tot: Vec<String> = t.totals.iter().map(|(i, d)| format!("H^{i}={d}")).collect();
    s.push_str(&format!("total\t{}\n", tot.join(" ")));
    s
}

pub fn sweep_json(s: &KoszulSweep) -> Value {
    json!({
        "n_max": s.n_max,
        "spec_count": s.entries.len(),
        "passed": true,
        "entries": s.entries.iter().map(|e| json!({
            "n": e.spec.n,
            "k": e.spec.k,
            "p": e.spec.p,
            "term_dims": e.term_dims,
            "bottom_dimension": e.bottom_dimension,
        })).collect::<Vec<_>>(),
    })
}

fn evidence_json(e: &Evidence) -> Value {
    let mut m = Map::new();
    if let Some((u, d)) = &e.witness {
        m.insert("witness".into(), json!({ "u": vector_json(u), "dim": d }));
    }
    if let Some(t) = e.box_total {
        m.insert("box_total".into(), Value::from(t));
    }
    if let Some(n) = &e.note {
        m.insert("note".into(), Value::String(n.clone()));
    }
    Value::Object(m)
}

pub fn report_json(r: &VerdictReport) -> Value {
    let top_degree = match &r.top_degree {
        TopDegreeCheck::Passed { total } => json!({ "status": "passed", "total": total }),
        TopDegreeCheck::Failed { total, witness } => {
            json!({ "status": "failed", "total": total, "witness": vector_json(witness) })
        }
        TopDegreeCheck::Skipped { reason } => json!({ "status": "skipped", "reason": reason }),
    };
    let experimental: Map<String, Value> = r
        .experimental
        .iter()
        .map(|(p, t)| {
            (
                p.to_string(),
                json!({
                    "totals": dims_json(&t.totals),
                    "degenerate_degrees": t.degenerate_degrees.iter().map(|u| vector_json(u)).collect::<Vec<_>>(),
                }),
            )
        })
        .collect();
    json!({
        "simplicial": r.predictions.simplicial,
        "c": codim_json(r.predictions.c),
        "rank": r.predictions.rank,
        "p_max": r.predictions.p_max,
        "bound": r.bound,
        "strong": r.strong,
        "fan": fan_json(&r.fan),
        "verdicts": r.verdicts.iter().map(|v| json!({
            "p": v.prediction.p,
            "i": v.prediction.i,
            "claim": v.prediction.claim.name(),
            "clause": v.prediction.clause,
            "status": v.status.name(),
            "evidence": evidence_json(&v.evidence),
        })).collect::<Vec<_>>(),
        "top_degree": top_degree,
        "crosschecks": r.crosschecks.iter().map(|c| json!({
            "p": c.p,
            "degree_count": c.degree_count,
            "nonzero_pairs": c.nonzero_pairs,
        })).collect::<Vec<_>>(),
        "faces_exhausted": r.faces_exhausted,
        "koszul_backing": r.koszul_backing,
        "experimental": experimental,
        "notes": r.predictions.notes.iter().chain(&r.notes).cloned().collect::<Vec<_>>(),
        "internal_failures": r.internal_failures,
        "refuted": r.refuted(),
    })
}

fn load_cone(path: &Path, warnings: &mut Vec<String>) -> Result<Cone, CliError> {
    let (cone, w) = parse_cone(&read_json(path)?)?;
    warnings.extend(w);
    Ok(cone)
}

struct Output {
    stdout: String,
    code: i32,
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn schema_text(name: &str) -> &'static str {
    match name {
        "classify" => include_str!("../../../schemas/classify.schema.json"),
        "resolve" => include_str!("../../../schemas/resolve.schema.json"),
        "fan" => include_str!("../../../schemas/fan.schema.json"),
        "cohomology" => include_str!("../../../schemas/cohomology.schema.json"),
        "degree" => include_str!("../../../schemas/degree.schema.json"),
        "koszul_sweep" => include_str!("../../../schemas/koszul_sweep.schema.json"),
        "verify" => include_str!("../../../schemas/verify.schema.json"),
        "error" => include_str!("../../../schemas/error.schema.json"),
        _ => unreachable!("unknown schema {name}"),
    }
}

/// Checks `v` against the shipped schema `name`.
fn validate(name: &str, v: &Value) -> Result<(), CliError> {
    let schema: Value = serde_json::from_str(schema_text(name)).expect("shipped schemas parse");
    let compiled = JSONSchema::compile(&schema).expect("shipped schemas compile");
    let problems: Vec<String> = match compiled.validate(v) {
        Ok(()) => return Ok(()),
        Err(errors) => errors.map(|e| format!("{}: {e}", e.instance_path)).collect(),
    };
    Err(CliError {
        code: 1,
        kind: "SchemaViolation".into(),
        message: format!("{name} output does not match its schema: {}", problems.join("; ")),
        extra: None,
    })
}

/// Pretty JSON for `v` after validating it against schema `name`.
fn emit(name: &str, v: &Value) -> Result<String, CliError> {
    validate(name, v)?;
    Ok(pretty(v))
}

fn execute(command: Command, warnings: &mut Vec<String>) -> Result<Output, CliError> {
    match command {
        Command::Classify { cone } => {
            let sigma = load_cone(&cone, warnings)?;
            let profile = sigma.classify()?;
            let faces = sigma.face_lattice()?;
            let dual = sigma.dual_cone()?;
            let v = json!({
                "cone": cone_json(&sigma),
                "simplicial": profile.simplicial,
                "smooth": profile.smooth,
                "multiplicity": profile.multiplicity.as_ref().map(int_json),
                "codim_sing": codim_json(profile.codim_sing),
                "full_dimensional": sigma.is_full_dimensional(),
                "dual_generators": dual.generators.iter().map(|g| vector_json(g)).collect::<Vec<_>>(),
                "faces": faces.faces.iter().map(|f| json!({ "rays": indices_json(&f.rays), "dim": f.dim })).collect::<Vec<_>>(),
            });
            Ok(Output { stdout: emit("classify", &v)?, code: 0 })
        }
        Command::Resolve { cone, strong, output } => {
            let sigma = load_cone(&cone, warnings)?;
            let (fan, profile) = resolve_with_profile(&sigma)?;
            if strong && !profile.strong {
                return Err(FanError::StrongnessUnachieved { fan: Box::new(fan), profile: Box::new(profile) }.into());
            }
            if let Some(path) = output {
                std::fs::write(&path, emit("fan", &fan_json(&fan))?)
                    .map_err(|e| CliError::malformed("IoError", format!("{}: {e}", path.display())))?;
            }
            let v = json!({ "fan": fan_json(&fan), "profile": profile_json(&profile) });
            Ok(Output { stdout: emit("resolve", &v)?, code: 0 })
        }
        Command::Cohomology { cone, fan, kind, p, bound, format, degree, experimental } => {
            let sigma = load_cone(&cone, warnings)?;
            let fan = parse_fan(&read_json(&fan)?)?;
            let rc = ResolvedCone::new(sigma, fan)?;
            let kind = ComplexKind::from(kind);
            if let Some(text) = degree {
                let u = parse_vector(
                    &serde_json::from_str(&text)
                        .map_err(|e| CliError::malformed("ParseError", format!("--degree: {e}")))?,
                    "--degree",
                )?;
                let support = degree_support(&rc, kind, p, &u)?;
                let complex = assemble_degree_complex(&rc, kind, p, &u)?;
                let h: BTreeMap<usize, usize> =
                    complex.cohomology_dims().into_iter().map(|(d, x)| (d as usize, x)).collect();
                let v = json!({
                    "kind": kind.name(),
                    "p": p,
                    "u": vector_json(&u),
                    "vanishing": indices_json(&support.vanishing),
                    "present": support.present.iter()
                        .map(|js| js.iter().map(|j| indices_json(j)).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                    "term_dims": complex.terms().iter().map(|t| t.dimension).collect::<Vec<_>>(),
                    "cohomology": dims_json(&h),
                });
                return Ok(Output { stdout: emit("degree", &v)?, code: 0 });
            }
            let table = match kind {
                ComplexKind::LogDifferentialP1 if p != 1 => {
                    return Err(ToricError::UnsupportedP { kind, p }.into());
                }
                ComplexKind::LogDifferentialP1 => p1_higher_image(&rc, bound)?,
                ComplexKind::Ishida if experimental => experimental_ishida_cohomology(&rc, p, bound)?,
                _ => graded_cohomology(&rc, kind, p, bound)?,
            };
            let stdout = match format {
                Format::Json => emit("cohomology", &table_json(&table))?,
                Format::Table => table_text(&table),
            };
            Ok(Output { stdout, code: 0 })
        }
        Command::KoszulSweep { n_max } => {
            let s = koszul_sweep(n_max)?;
            Ok(Output { stdout: emit("koszul_sweep", &sweep_json(&s))?, code: 0 })
        }
        Command::Verify { cone, fan, p_max, bound } => {
            let sigma = load_cone(&cone, warnings)?;
            let fan = fan.map(|f| read_json(&f).and_then(|v| parse_fan(&v))).transpose()?;
            let report = verify(&sigma, fan, p_max, bound)?;
            Ok(Output { stdout: emit("verify", &report_json(&report))?, code: report.exit_code() })
        }
    }
}

/// Runs the tool on `args` (including the program name), writing to the
/// given streams, and returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = args.threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let e = CliError::precondition("ThreadPool", e.to_string());
            let _ = writeln!(err, "{}", e.to_json());
            return e.code;
        }
    };
    let mut warnings = Vec::new();
    let result = pool.install(|| execute(args.command, &mut warnings));
    for w in &warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    match result {
        Ok(o) => {
            let _ = out.write_all(o.stdout.as_bytes());
            o.code
        }
        Err(e) => {
            let e = match validate("error", &e.to_json()) {
                Ok(()) => e,
                Err(violation) => violation,
            };
            let _ = writeln!(err, "{}", e.to_json());
            e.code
        }
    }
}

/// Entry point for the binary.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_beyond_the_safe_range_are_strings() {
        assert_eq!(int_json(&Int::from(SAFE)), json!(SAFE));
        assert_eq!(int_json(&Int::from(-SAFE - 1)), json!((-SAFE - 1).to_string()));
        let big: Int = "123456789012345678901234567890".parse().unwrap();
        assert_eq!(parse_int(&int_json(&big), "x").unwrap(), big);
        assert!(parse_int(&json!(1.5), "x").is_err());
    }

    #[test]
    fn cone_files_normalize_rays() {
        let (c, w) = parse_cone(&json!({ "rank": 2, "rays": [[2, 0], [1, "2"]] })).unwrap();
        assert_eq!(c.rays()[0], vec![Int::from(1), Int::from(0)]);
        assert_eq!(w.len(), 1);
        assert_eq!(parse_cone(&json!({ "rank": 2 })).unwrap_err().code, 2);
        let (flat, _) = parse_cone(&json!({ "rank": 2, "rays": [[1, 0]] })).unwrap();
        assert!(!flat.is_full_dimensional());
    }

    #[test]
    fn emission_is_schema_checked() {
        let e = emit("fan", &json!({ "rank": 2 })).unwrap_err();
        assert_eq!((e.code, e.kind.as_str()), (1, "SchemaViolation"));
        assert!(validate("error", &CliError::malformed("ParseError", "x").to_json()).is_ok());
    }

    #[test]
    fn fan_files_are_one_based() {
        let f =
            parse_fan(&json!({ "rank": 2, "rays": [[1, 0], [1, 2], [1, 1]], "max_cones": [[1, 3], [3, 2]] })).unwrap();
        assert_eq!(f.max_cones(), &[vec![0, 2], vec![1, 2]]);
        assert_eq!(fan_json(&f)["max_cones"], json!([[1, 3], [2, 3]]));
        let e = parse_fan(&json!({ "rank": 2, "rays": [[1, 0]], "max_cones": [[0]] })).unwrap_err();
        assert_eq!((e.code, e.kind.as_str()), (2, "BadIndex"));
    }
}
