//! Command-line front end: classification, fiber analysis, branch sampling,
//! figure-data CSVs, and the verification suite.
//!
//! Exit codes: 0 success, 2 input error, 1 verification failure.
//! All numbers in JSON are shortest round-trip representations; complex
//! values are emitted as [re, im] pairs. CSV output is UTF-8 with LF line
//! endings and a header row.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C;
use serde_json::{json, Value};

use flagtwistor::linalg::{dot, vecmat, Mat3, Vec3};
use flagtwistor::proj::{Flavor, Param, ProjVec};
use flagtwistor::surfaces::{ClassTag, SingularLocus, Surface11};
use flagtwistor::twistor::{branch_r, twistor_fiber, twistor_fibers_in, FiberSet};
use flagtwistor::{
    blowup_count_1d, c1_squared, h0_flag, h0_product, image_quadric, intersect, profile_curve,
    run_suite, sphere_normal_form, torus_profile, triple_product, Bidegree, Curve11,
    Intersection,
};

#[derive(Parser)]
#[command(
    name = "flagtwistor",
    version,
    about = "Surfaces of bidegree (1,1) in the flag manifold: classification, twistor fibers, branch loci, induced metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Residual tolerance for reported containment/fiber checks
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for any randomized sampling
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write the primary output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Additionally write a JSON rendering of the result to this path
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct MatrixArgs {
    /// JSON file with the 3x3 surface matrix (stdin when absent)
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BranchGridArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Number of sampled base points
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ProfileArgs {
    /// Sphere radius parameter (must be positive)
    #[arg(long)]
    rho: f64,
    /// Number of profile nodes (at least 16)
    #[arg(long, default_value_t = 256)]
    samples: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct TorusArgs {
    /// Real off-diagonal parameter of the one-parameter family (nonzero)
    #[arg(long)]
    a: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CurveArgs {
    /// JSON file with {"q": [...], "m": [...]} (stdin when absent)
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CountsArgs {
    #[arg(long)]
    a: i64,
    #[arg(long)]
    b: i64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    /// Scenarios per registered check
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a surface matrix: projective class, unitary form, singular locus
    Classify(MatrixArgs),
    /// List the twistor fibers contained in a surface
    Fibers(MatrixArgs),
    /// Sample the branch polynomial at seeded random base points (CSV)
    BranchGrid(BranchGridArgs),
    /// Tabulate the isometric profile curve of a projected sphere (CSV)
    Profile(ProfileArgs),
    /// Tabulate the branch-torus rotation profile of the one-parameter family (CSV)
    Torus(TorusArgs),
    /// Round-sphere data of a smooth curve: radius, motion, image quadric
    Sphere(CurveArgs),
    /// Intersect two curves of the family
    Intersect(CurveArgs),
    /// Closed-form counts for a bidegree
    Counts(CountsArgs),
    /// Run the seeded verification suite
    Verify(VerifyArgs),
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

fn input_error(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: format!("input error: {}", msg.into()),
    }
}

impl From<flagtwistor::Error> for Failure {
    fn from(e: flagtwistor::Error) -> Self {
        input_error(e.to_string())
    }
}

// ---- JSON plumbing ----

fn cjson(z: C) -> Value {
    json!([z.re, z.im])
}

fn vjson(v: &Vec3) -> Value {
    Value::Array(v.iter().map(|z| cjson(*z)).collect())
}

fn mjson(m: &Mat3) -> Value {
    Value::Array(m.iter().map(vjson).collect())
}

/// Shortest representation that re-parses to the same bits.
fn fnum(x: f64) -> String {
    match serde_json::Number::from_f64(x) {
        Some(n) => n.to_string(),
        None => format!("{x:e}"),
    }
}

fn parse_complex(v: &Value) -> Result<C, Failure> {
    if let Some(x) = v.as_f64() {
        return Ok(C::new(x, 0.0));
    }
    if let Some(arr) = v.as_array() {
        if arr.len() == 2 {
            if let (Some(re), Some(im)) = (arr[0].as_f64(), arr[1].as_f64()) {
                return Ok(C::new(re, im));
            }
        }
    }
    Err(input_error(
        "complex entries must be a number or an [re, im] pair",
    ))
}

fn parse_vec3(v: &Value) -> Result<Vec3, Failure> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 3)
        .ok_or_else(|| input_error("expected a length-3 coordinate array"))?;
    Ok([
        parse_complex(&arr[0])?,
        parse_complex(&arr[1])?,
        parse_complex(&arr[2])?,
    ])
}

fn parse_matrix(text: &str) -> Result<Mat3, Failure> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| input_error(format!("malformed JSON: {e}")))?;
    let body = match &doc {
        Value::Object(map) => map
            .get("matrix")
            .ok_or_else(|| input_error("matrix object needs a \"matrix\" field"))?,
        other => other,
    };
    let rows = body
        .as_array()
        .filter(|a| a.len() == 3)
        .ok_or_else(|| input_error("expected a 3x3 matrix"))?;
    Ok([
        parse_vec3(&rows[0])?,
        parse_vec3(&rows[1])?,
        parse_vec3(&rows[2])?,
    ])
}

fn parse_curve_value(v: &Value) -> Result<Curve11, Failure> {
    let obj = v
        .as_object()
        .ok_or_else(|| input_error("expected an object with \"q\" and \"m\""))?;
    let q = parse_vec3(
        obj.get("q")
            .ok_or_else(|| input_error("curve needs a \"q\" field"))?,
    )?;
    let m = parse_vec3(
        obj.get("m")
            .ok_or_else(|| input_error("curve needs an \"m\" field"))?,
    )?;
    let q = ProjVec::point(q)?;
    let m = ProjVec::new(m, Flavor::Line)?;
    Ok(Curve11::new(q, m)?)
}

fn read_input(path: &Option<PathBuf>) -> Result<String, Failure> {
    match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| input_error(format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| input_error(format!("cannot read stdin: {e}")))?;
            Ok(buf)
        }
    }
}

fn write_text(path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| input_error(format!("cannot write {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            match std::io::stdout().write_all(text.as_bytes()) {
                Ok(()) => Ok(()),
                // a closed pipe (e.g. | head) is not an error for us
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                Err(e) => Err(input_error(format!("cannot write stdout: {e}"))),
            }
        }
    }
}

fn emit(common: &Common, primary: &str, as_json: Option<&Value>) -> Result<(), Failure> {
    write_text(&common.out, primary)?;
    if let Some(path) = &common.json {
        let v = as_json
            .map(|v| v.to_string())
            .unwrap_or_else(|| primary.trim_end().to_string());
        write_text(&Some(path.clone()), &(v + "\n"))?;
    }
    Ok(())
}

// ---- subcommand bodies (pure: input text -> output text) ----

fn surface_from(text: &str) -> Result<Surface11, Failure> {
    Ok(Surface11::from_matrix(parse_matrix(text)?)?)
}

fn run_classify(text: &str) -> Result<Value, Failure> {
    let s = surface_from(text)?;
    let cls = s.classify();
    let lambda = match &cls.tag {
        ClassTag::A1 { lambda } => cjson(*lambda),
        _ => Value::Null,
    };
    let unitary = match s.unitary_canonical_form() {
        Ok(uf) => json!({
            "lambda": cjson(uf.lambda),
            "a": cjson(uf.a),
            "b": cjson(uf.b),
            "c": cjson(uf.c),
            "u": mjson(&uf.u),
        }),
        Err(_) => Value::Null,
    };
    let singular = match s.singular_locus() {
        SingularLocus::Smooth => json!({"kind": "smooth"}),
        SingularLocus::Point(x) => json!({
            "kind": "point",
            "p": vjson(x.p().coords()),
            "l": vjson(x.l().coords()),
        }),
        SingularLocus::Curve { curve, components } => json!({
            "kind": "curve",
            "q": vjson(curve.q().coords()),
            "m": vjson(curve.m().coords()),
            "components": components,
        }),
    };
    Ok(json!({
        "tag": cls.tag.name(),
        "lambda": lambda,
        "transform": mjson(&cls.transform),
        "unitary_form": unitary,
        "singular_locus": singular,
        "j_invariant": s.is_j_invariant(),
    }))
}

fn member_residual(s: &Surface11, p: &ProjVec, l: &ProjVec) -> f64 {
    dot(&vecmat(p.coords(), s.rep()), l.coords()).norm()
}

fn run_fibers(text: &str, tol: f64) -> Result<Value, Failure> {
    let s = surface_from(text)?;
    let fa = twistor_fibers_in(&s)?;
    let bases: Vec<ProjVec> = match &fa.set {
        FiberSet::Empty => vec![],
        FiberSet::One(q) => vec![q.clone()],
        FiberSet::Two(q1, q2) => vec![q1.clone(), q2.clone()],
        FiberSet::Circle(cl) => (0..8)
            .map(|k| cl.sample(k as f64 * std::f64::consts::FRAC_PI_4))
            .collect::<Result<_, _>>()?,
    };
    let mut residual: f64 = 0.0;
    let mut grid: Vec<Param> = (0..19)
        .map(|i| Param::from(C::new(i as f64 * 0.4 - 3.4, (i as f64 * 0.9).sin())))
        .collect();
    grid.push(Param::Infinity);
    for q in &bases {
        let fiber = twistor_fiber(q)?;
        for t in &grid {
            let x = fiber.sample(*t)?;
            residual = residual.max(member_residual(&s, x.p(), x.l()));
        }
    }
    let mut doc = serde_json::to_value(&fa).map_err(|e| input_error(e.to_string()))?;
    let obj = doc.as_object_mut().expect("fiber analysis serializes to an object");
    obj.insert(
        "containment_residual".into(),
        if bases.is_empty() {
            Value::Null
        } else {
            json!(residual)
        },
    );
    obj.insert("containment_ok".into(), json!(bases.is_empty() || residual <= tol));
    Ok(doc)
}

fn run_branch_grid(text: &str, samples: usize, seed: u64) -> Result<(String, Value), Failure> {
    use rand::SeedableRng;
    let s = surface_from(text)?;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let mut csv = String::from("q0re,q0im,q1re,q1im,q2re,q2im,Rre,Rim\n");
    let mut rows = Vec::with_capacity(samples);
    for _ in 0..samples.max(1) {
        let q = flagtwistor::proj::random_from_rng(&mut rng, Flavor::Point);
        let br = branch_r(&s, &q)?;
        let qc = q.coords();
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fnum(qc[0].re),
            fnum(qc[0].im),
            fnum(qc[1].re),
            fnum(qc[1].im),
            fnum(qc[2].re),
            fnum(qc[2].im),
            fnum(br.r.re),
            fnum(br.r.im),
        ));
        rows.push(serde_json::to_value(&br).map_err(|e| input_error(e.to_string()))?);
    }
    Ok((csv, Value::Array(rows)))
}

fn run_profile(rho: f64, samples: usize) -> Result<(String, Value), Failure> {
    let pc = profile_curve(rho, samples)?;
    let mut csv = String::from("v,f,g\n");
    for s in &pc.samples {
        csv.push_str(&format!("{},{},{}\n", fnum(s.v), fnum(s.f), fnum(s.g)));
    }
    let doc = serde_json::to_value(&pc).map_err(|e| input_error(e.to_string()))?;
    Ok((csv, doc))
}

fn run_torus(a: f64) -> Result<(String, Value), Failure> {
    let tp = torus_profile(a)?;
    let mut csv = String::from("x,s_outer,s_inner\n");
    for (x, pair) in tp.xs.iter().zip(&tp.roots) {
        let cell = |r: &Option<f64>| r.map(fnum).unwrap_or_default();
        csv.push_str(&format!("{},{},{}\n", fnum(*x), cell(&pair[0]), cell(&pair[1])));
    }
    let doc = serde_json::to_value(&tp).map_err(|e| input_error(e.to_string()))?;
    Ok((csv, doc))
}

fn run_sphere(text: &str, tol: f64) -> Result<Value, Failure> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| input_error(format!("malformed JSON: {e}")))?;
    let curve = parse_curve_value(&doc)?;
    let nf = sphere_normal_form(&curve)?;
    let iq = image_quadric(&curve)?;
    Ok(json!({
        "rho": nf.rho,
        "motion": mjson(&nf.motion),
        "quadric": mjson(iq.matrix()),
        "is_twistor_fiber": curve.is_twistor_fiber(tol),
    }))
}

fn run_intersect(text: &str) -> Result<Value, Failure> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| input_error(format!("malformed JSON: {e}")))?;
    let (first, second) = if let Some(arr) = doc.as_array() {
        if arr.len() != 2 {
            return Err(input_error("expected exactly two curves"));
        }
        (&arr[0], &arr[1])
    } else if let Some(obj) = doc.as_object() {
        (
            obj.get("first")
                .ok_or_else(|| input_error("intersect needs a \"first\" curve"))?,
            obj.get("second")
                .ok_or_else(|| input_error("intersect needs a \"second\" curve"))?,
        )
    } else {
        return Err(input_error("expected two curves as an array or object"));
    };
    let c1 = parse_curve_value(first)?;
    let c2 = parse_curve_value(second)?;
    Ok(match intersect(&c1, &c2)? {
        Intersection::Empty => json!({"kind": "empty"}),
        Intersection::OnePoint(x) => json!({
            "kind": "point",
            "p": vjson(x.p().coords()),
            "l": vjson(x.l().coords()),
        }),
        Intersection::SharedComponent => json!({"kind": "shared_component"}),
    })
}

fn run_counts(a: i64, b: i64) -> Result<Value, Failure> {
    let blowup = if a == 1 && b >= 1 {
        json!(blowup_count_1d(b)?)
    } else if b == 1 && a >= 1 {
        json!(blowup_count_1d(a)?)
    } else {
        Value::Null
    };
    Ok(json!({
        "a": a,
        "b": b,
        "sections_product": h0_product(a, b)?,
        "sections_flag": h0_flag(a, b)?,
        "triple_swap_generator": triple_product(
            Bidegree::new(a, b),
            Bidegree::new(b, a),
            Bidegree::new(1, 0),
        )?,
        "c1_squared": c1_squared(a, b)?,
        "blowup_points": blowup,
    }))
}

fn run_verify(seed: u64, samples: usize) -> (String, Value, bool) {
    let report = run_suite(seed, samples);
    let mut text = String::new();
    for ch in &report.checks {
        let status = if ch.failures == 0 { "pass" } else { "FAIL" };
        text.push_str(&format!(
            "{status}  {name}  samples={s} failures={f} worst={w}\n",
            name = ch.name,
            s = ch.samples,
            f = ch.failures,
            w = fnum(ch.worst_residual),
        ));
    }
    text.push_str(&format!(
        "{}: {} checks, {} failures (seed {seed}, samples {samples})\n",
        if report.passed { "PASS" } else { "FAIL" },
        report.checks.len(),
        report.total_failures,
    ));
    let passed = report.passed;
    let doc = serde_json::to_value(&report).expect("report serializes");
    (text, doc, passed)
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Classify(args) => {
            let doc = run_classify(&read_input(&args.input)?)?;
            emit(&args.common, &(doc.to_string() + "\n"), Some(&doc))
        }
        Command::Fibers(args) => {
            let doc = run_fibers(&read_input(&args.input)?, args.common.tol)?;
            emit(&args.common, &(doc.to_string() + "\n"), Some(&doc))
        }
        Command::BranchGrid(args) => {
            let (csv, doc) =
                run_branch_grid(&read_input(&args.input)?, args.samples, args.common.seed)?;
            emit(&args.common, &csv, Some(&doc))
        }
        Command::Profile(args) => {
            let (csv, doc) = run_profile(args.rho, args.samples)?;
            emit(&args.common, &csv, Some(&doc))
        }
        Command::Torus(args) => {
            let (csv, doc) = run_torus(args.a)?;
            emit(&args.common, &csv, Some(&doc))
        }
        Command::Sphere(args) => {
            let doc = run_sphere(&read_input(&args.input)?, args.common.tol)?;
            emit(&args.common, &(doc.to_string() + "\n"), Some(&doc))
        }
        Command::Intersect(args) => {
            let doc = run_intersect(&read_input(&args.input)?)?;
            emit(&args.common, &(doc.to_string() + "\n"), Some(&doc))
        }
        Command::Counts(args) => {
            let doc = run_counts(args.a, args.b)?;
            emit(&args.common, &(doc.to_string() + "\n"), Some(&doc))
        }
        Command::Verify(args) => {
            let (text, doc, passed) = run_verify(args.common.seed, args.samples);
            emit(&args.common, &text, Some(&doc))?;
            if !passed {
                return Err(Failure {
                    code: 1,
                    message: "verification failed".into(),
                });
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}
