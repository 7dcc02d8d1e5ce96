//! Command-line front end: `fibera <command> <file> [flags]`.
//!
//! Exit codes: 0 success, 1 a mathematical precondition failed (or a
//! verification was rejected), 2 the input could not be parsed.

pub mod json;
pub mod parse;
pub mod print;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use crate::fibre::{
    fibre_class, is_in_subalgebra, relative_decompose, substitute, verify_decomposition, verify_vanishing,
    Decomposition, FibreClass, FibrePoint, RelativeDecomposition,
};
use crate::infinity::{InfinityBasis, PolyMap};
use crate::polyform::{KForm, Polynomial};
use json::*;
use parse::{parse_form_with, parse_point, parse_problem, ParseError, ProblemFile};
use print::{format_vector, Printer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Complete-intersection test at infinity.
    Check,
    /// Milnor number of the fibre at infinity.
    Milnor,
    /// Weighted-homogeneous basis of the top cohomology at infinity.
    Basis,
    /// Class of a form on one fibre.
    Class,
    /// Decomposition of a form over C[F].
    Decompose,
    /// Membership of a polynomial in C[F].
    Subalgebra,
    /// Re-check a JSON result written with --json.
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Milnor => "milnor",
            Command::Basis => "basis",
            Command::Class => "class",
            Command::Decompose => "decompose",
            Command::Subalgebra => "subalgebra",
            Command::Verify => "verify",
        }
    }

    fn from_name(s: &str) -> Option<Command> {
        Command::value_variants().iter().copied().find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "fibera",
    version,
    about = "Cohomology of fibres of polynomial maps via the fibre at infinity"
)]
pub struct Args {
    pub command: Command,
    /// Problem file (for `verify`: a JSON result).
    pub file: PathBuf,
    /// Named form from the problem file, or a form expression.
    #[arg(long)]
    pub form: Option<String>,
    /// Named point from the problem file, or `r1,..,rq`.
    #[arg(long)]
    pub point: Option<String>,
    /// Polynomial expression (or named 0-form) for `subalgebra`.
    #[arg(long)]
    pub poly: Option<String>,
    /// With `check`: also test cohomology vanishing on forms up to this degree.
    #[arg(long = "degree-bound")]
    pub degree_bound: Option<u32>,
    /// Emit machine-readable JSON.
    #[arg(long)]
    pub json: bool,
    /// Also print witnesses in text output.
    #[arg(long)]
    pub witness: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Math(String),
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Math(e.to_string())
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Usage(format!("parse error at {e}"))
    }
}

struct Report {
    code: i32,
    text: String,
    result: Value,
    witness: Value,
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Args::try_parse_from(args) {
        Ok(a) => run(&a),
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            if code == 0 {
                Output {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Output {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            }
        }
    }
}

pub fn run(args: &Args) -> Output {
    let text = match std::fs::read_to_string(&args.file) {
        Ok(t) => t,
        Err(e) => {
            return Output {
                code: 2,
                stdout: String::new(),
                stderr: format!("cannot read {}: {e}\n", args.file.display()),
            }
        }
    };
    run_on_text(args, &text)
}

/// Runs a command on file contents already in memory.
pub fn run_on_text(args: &Args, text: &str) -> Output {
    let outcome = if args.command == Command::Verify {
        verify(text)
    } else {
        dispatch(args, text)
    };
    match outcome {
        Ok(r) => {
            let stdout = if args.json && args.command != Command::Verify {
                let doc = json!({
                    "command": args.command.name(),
                    "input_hash": r.result["input_hash"].clone(),
                    "result": strip_hash(r.result),
                    "witness": r.witness,
                });
                serde_json::to_string_pretty(&doc).unwrap() + "\n"
            } else {
                r.text
            };
            Output {
                code: r.code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(Failure::Usage(m)) => Output {
            code: 2,
            stdout: String::new(),
            stderr: m + "\n",
        },
        Err(Failure::Math(m)) => Output {
            code: 1,
            stdout: String::new(),
            stderr: m + "\n",
        },
    }
}

fn strip_hash(mut v: Value) -> Value {
    if let Some(o) = v.as_object_mut() {
        o.remove("input_hash");
    }
    v
}

struct Context {
    problem: ProblemFile,
    map: PolyMap,
    printer: Printer,
}

impl Context {
    fn new(problem: ProblemFile) -> Result<Self, Failure> {
        let map = PolyMap::new(problem.map.clone(), problem.weights.clone())?;
        let printer = Printer::new(&problem.vars, &problem.weights);
        Ok(Context { problem, map, printer })
    }

    fn base_result(&self) -> serde_json::Map<String, Value> {
        let mut m = serde_json::Map::new();
        m.insert("input_hash".into(), Value::String(input_hash(&self.problem)));
        m.insert("problem".into(), problem_to_json(&self.problem));
        m
    }

    fn form(&self, spec: Option<&str>) -> Result<KForm, Failure> {
        let spec = spec.ok_or_else(|| Failure::Usage("this command needs --form".into()))?;
        match self.problem.forms.get(spec) {
            Some(f) => Ok(f.clone()),
            None => Ok(parse_form_with(spec, &self.problem.vars, &self.problem.forms)?),
        }
    }

    fn point(&self, spec: Option<&str>) -> Result<FibrePoint, Failure> {
        let spec = spec.ok_or_else(|| Failure::Usage("this command needs --point".into()))?;
        match self.problem.points.get(spec) {
            Some(p) => Ok(p.clone()),
            None => Ok(parse_point(spec, self.map.ncomponents())?),
        }
    }
}

fn basis_json(b: &InfinityBasis) -> Value {
    json!({ "degrees": b.degrees, "forms": forms_to_json(&b.forms) })
}

fn dispatch(args: &Args, text: &str) -> Result<Report, Failure> {
    let ctx = Context::new(parse_problem(text)?)?;
    match args.command {
        Command::Check => check(&ctx, args),
        Command::Milnor => milnor(&ctx),
        Command::Basis => basis(&ctx),
        Command::Class => class(&ctx, args),
        Command::Decompose => decompose(&ctx, args),
        Command::Subalgebra => subalgebra(&ctx, args),
        Command::Verify => unreachable!(),
    }
}

fn check(ctx: &Context, args: &Args) -> Result<Report, Failure> {
    let rep = ctx.map.is_complete_intersection_at_infinity();
    let mut text = String::new();
    let verdict = if rep.is_cia {
        "complete intersection at infinity"
    } else {
        "not a complete intersection at infinity"
    };
    writeln!(text, "{verdict}").unwrap();
    writeln!(text, "dim V(I) = {}", rep.dim_fibre).unwrap();
    writeln!(text, "dim V(I+J) = {}", rep.dim_singular).unwrap();
    let mut result = ctx.base_result();
    result.insert("cia".into(), json!(rep.is_cia));
    result.insert("dim_fibre".into(), json!(rep.dim_fibre));
    result.insert("dim_singular".into(), json!(rep.dim_singular));
    let mut code = if rep.is_cia { 0 } else { 1 };
    if let (Some(bound), true) = (args.degree_bound, rep.is_cia) {
        let y = match &args.point {
            Some(_) => ctx.point(args.point.as_deref())?,
            None => FibrePoint::origin(ctx.map.ncomponents()),
        };
        let top = ctx.map.fibre_dimension() as i64;
        let mut reports = Vec::new();
        for k in (1..top).filter(|&k| rep.dim_singular < top - k) {
            let r = verify_vanishing(&ctx.map, k as usize, &y, bound)?;
            writeln!(
                text,
                "H^{k} vanishing up to degree {bound} at y = {}: {} closed forms checked, {} exact",
                format_vector(&y.0),
                r.checked,
                r.exact
            )
            .unwrap();
            if !r.all_exact() {
                code = 1;
            }
            reports.push(json!({ "k": k, "checked": r.checked, "exact": r.exact }));
        }
        if reports.is_empty() {
            writeln!(text, "no degree k > 0 satisfies the vanishing hypothesis").unwrap();
        }
        result.insert(
            "vanishing".into(),
            json!({ "point": point_to_json(&y), "degree_bound": bound, "degrees": reports }),
        );
    }
    Ok(Report {
        code,
        text,
        result: Value::Object(result),
        witness: Value::Null,
    })
}

fn milnor(ctx: &Context) -> Result<Report, Failure> {
    let mu = ctx.map.milnor_number()?;
    let staircase = ctx.map.ideal_i_plus_j().quotient_vector_basis()?;
    let names: Vec<String> = staircase
        .iter()
        .map(|m| {
            ctx.printer
                .polynomial(&Polynomial::term(m.clone(), crate::polyform::rat(1)))
        })
        .collect();
    let mut text = format!("mu = {mu}\n");
    if !names.is_empty() {
        writeln!(text, "standard monomials: {}", names.join(", ")).unwrap();
    }
    let mut result = ctx.base_result();
    result.insert("mu".into(), json!(mu));
    result.insert(
        "standard_monomials".into(),
        json!(staircase.iter().map(|m| m.exps().to_vec()).collect::<Vec<_>>()),
    );
    Ok(Report {
        code: 0,
        text,
        result: Value::Object(result),
        witness: Value::Null,
    })
}

fn basis(ctx: &Context) -> Result<Report, Failure> {
    let b = ctx.map.infinity_basis()?;
    let mut text = format!("mu = {}\n", b.mu);
    for (i, (f, d)) in b.forms.iter().zip(&b.degrees).enumerate() {
        writeln!(text, "omega_{} (degree {d}) = {}", i + 1, ctx.printer.form(f)).unwrap();
    }
    let mut result = ctx.base_result();
    result.insert("mu".into(), json!(b.mu));
    result.insert("basis".into(), basis_json(&b));
    Ok(Report {
        code: 0,
        text,
        result: Value::Object(result),
        witness: Value::Null,
    })
}

fn class(ctx: &Context, args: &Args) -> Result<Report, Failure> {
    let omega = ctx.form(args.form.as_deref())?;
    let y = ctx.point(args.point.as_deref())?;
    let b = ctx.map.infinity_basis()?;
    let c = fibre_class(&omega, &ctx.map, &y, &b)?;
    let mut text = format!("lambda = {}\n", format_vector(&c.lambda));
    if args.witness {
        writeln!(text, "Omega = {}", ctx.printer.form(&c.potential)).unwrap();
        for (i, e) in c.etas.iter().enumerate() {
            writeln!(text, "eta_{} = {}", i + 1, ctx.printer.form(e)).unwrap();
        }
    }
    let mut result = ctx.base_result();
    result.insert("form".into(), form_to_json(&omega));
    result.insert("point".into(), point_to_json(&y));
    result.insert("basis".into(), basis_json(&b));
    result.insert("lambda".into(), rationals_to_json(&c.lambda));
    let witness = json!({ "potential": form_to_json(&c.potential), "etas": forms_to_json(&c.etas) });
    Ok(Report {
        code: 0,
        text,
        result: Value::Object(result),
        witness,
    })
}

fn decompose(ctx: &Context, args: &Args) -> Result<Report, Failure> {
    let omega = ctx.form(args.form.as_deref())?;
    let b = ctx.map.infinity_basis()?;
    let d = relative_decompose(&omega, &ctx.map, &b)?;
    let target = Printer::target(ctx.map.ncomponents());
    let w = ctx.map.weights();
    let deg = omega.weighted_degree(w);
    let mut text = String::new();
    for (i, a) in d.a.iter().enumerate() {
        writeln!(text, "a_{}(t) = {}", i + 1, target.polynomial(a)).unwrap();
    }
    writeln!(text, "Omega = {}", ctx.printer.form(&d.potential)).unwrap();
    for (j, e) in d.etas.iter().enumerate() {
        writeln!(text, "eta_{} = {}", j + 1, ctx.printer.form(e)).unwrap();
    }
    writeln!(text, "wdeg(omega) = {deg}").unwrap();
    for (i, (a, di)) in d.a.iter().zip(&b.degrees).enumerate() {
        writeln!(
            text,
            "wdeg(a_{}(F)) = {}, basis degree {di}",
            i + 1,
            substitute(a, &ctx.map).weighted_degree(w)
        )
        .unwrap();
    }
    writeln!(text, "wdeg(Omega) = {}", d.potential.weighted_degree(w)).unwrap();
    for (j, (e, dj)) in d.etas.iter().zip(ctx.map.component_degrees()).enumerate() {
        writeln!(
            text,
            "wdeg(eta_{}) = {}, wdeg(f_{}) = {dj}",
            j + 1,
            e.weighted_degree(w),
            j + 1
        )
        .unwrap();
    }
    let ok = verify_decomposition(&omega, Decomposition::Relative(&d), &ctx.map, &b);
    writeln!(text, "degree bounds and identity: {}", if ok { "ok" } else { "FAILED" }).unwrap();
    let mut result = ctx.base_result();
    result.insert("form".into(), form_to_json(&omega));
    result.insert("basis".into(), basis_json(&b));
    result.insert("a".into(), Value::Array(d.a.iter().map(poly_to_json).collect()));
    let witness = json!({ "potential": form_to_json(&d.potential), "etas": forms_to_json(&d.etas) });
    Ok(Report {
        code: if ok { 0 } else { 1 },
        text,
        result: Value::Object(result),
        witness,
    })
}

fn subalgebra(ctx: &Context, args: &Args) -> Result<Report, Failure> {
    let spec = args
        .poly
        .as_deref()
        .ok_or_else(|| Failure::Usage("subalgebra needs --poly".into()))?;
    let form = ctx.form(Some(spec))?;
    let p = form
        .as_polynomial()
        .ok_or_else(|| Failure::Usage("--poly must be a polynomial".into()))?;
    let a = is_in_subalgebra(&p, &ctx.map);
    let text = match &a {
        Some(a) => format!("A(t) = {}\n", Printer::target(ctx.map.ncomponents()).polynomial(a)),
        None => "not in C[F]\n".to_string(),
    };
    let mut result = ctx.base_result();
    result.insert("poly".into(), poly_to_json(&p));
    result.insert("a".into(), a.as_ref().map_or(Value::Null, poly_to_json));
    Ok(Report {
        code: 0,
        text,
        result: Value::Object(result),
        witness: Value::Null,
    })
}

fn decode<T>(r: DecodeResult<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Usage(format!("malformed result file: {e}")))
}

fn verdict(ok: bool, what: &str) -> Report {
    let (code, text) = if ok {
        (0, format!("verified: {what}\n"))
    } else {
        (1, format!("verification failed: {what}\n"))
    };
    Report {
        code,
        text,
        result: Value::Null,
        witness: Value::Null,
    }
}

fn basis_from(result: &Value, map: &PolyMap) -> Result<InfinityBasis, Failure> {
    let forms = decode(forms_from_json(
        &result["basis"]["forms"],
        map.nvars(),
        map.fibre_dimension(),
    ))?;
    let claimed: Vec<u32> =
        decode(serde_json::from_value(result["basis"]["degrees"].clone()).map_err(|e| e.to_string()))?;
    let b = InfinityBasis::from_forms(map, forms)?;
    if b.degrees != claimed {
        return Err(Failure::Math("basis degrees do not match the forms".into()));
    }
    Ok(b)
}

fn verify(text: &str) -> Result<Report, Failure> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Failure::Usage(format!("parse error: {e}")))?;
    let command = doc["command"]
        .as_str()
        .and_then(Command::from_name)
        .ok_or_else(|| Failure::Usage("malformed result file: unknown command".into()))?;
    let result = &doc["result"];
    let problem = decode(problem_from_json(&result["problem"]))?;
    if doc["input_hash"].as_str() != Some(input_hash(&problem).as_str()) {
        return Ok(verdict(false, "input hash does not match the embedded problem"));
    }
    let ctx = Context::new(problem)?;
    let map = &ctx.map;
    let n = map.nvars();
    let k = map.fibre_dimension();
    Ok(match command {
        Command::Check => {
            let rep = map.is_complete_intersection_at_infinity();
            let ok = result["cia"] == json!(rep.is_cia)
                && result["dim_fibre"] == json!(rep.dim_fibre)
                && result["dim_singular"] == json!(rep.dim_singular);
            verdict(ok, "complete-intersection report")
        }
        Command::Milnor => verdict(result["mu"] == json!(map.milnor_number()?), "Milnor number"),
        Command::Basis => {
            let b = basis_from(result, map)?;
            verdict(result["mu"] == json!(b.mu), "basis of the cohomology at infinity")
        }
        Command::Class => {
            let b = basis_from(result, map)?;
            let omega = decode(form_from_json(&result["form"], n, k))?;
            let point = decode(point_from_json(&result["point"]))?;
            if point.len() != map.ncomponents() {
                return Ok(verdict(false, "point has the wrong length"));
            }
            let w = &doc["witness"];
            let class = FibreClass {
                lambda: decode(rationals_from_json(&result["lambda"]))?,
                potential: decode(form_from_json(&w["potential"], n, k - 1))?,
                etas: decode(forms_from_json(&w["etas"], n, k))?,
            };
            let ok = verify_decomposition(
                &omega,
                Decomposition::Fibre {
                    class: &class,
                    point: &point,
                },
                map,
                &b,
            );
            verdict(ok, "fibre class identity and degree bounds")
        }
        Command::Decompose => {
            let b = basis_from(result, map)?;
            let omega = decode(form_from_json(&result["form"], n, k))?;
            let q = map.ncomponents();
            let a = result["a"]
                .as_array()
                .ok_or_else(|| Failure::Usage("malformed result file: a".into()))?
                .iter()
                .map(|v| decode(poly_from_json(v, q)))
                .collect::<Result<Vec<_>, _>>()?;
            let w = &doc["witness"];
            let dec = RelativeDecomposition {
                a,
                potential: decode(form_from_json(&w["potential"], n, k - 1))?,
                etas: decode(forms_from_json(&w["etas"], n, k - 1))?,
            };
            verdict(
                verify_decomposition(&omega, Decomposition::Relative(&dec), map, &b),
                "relative decomposition",
            )
        }
        Command::Subalgebra => {
            let p = decode(poly_from_json(&result["poly"], n))?;
            let ok = match &result["a"] {
                Value::Null => is_in_subalgebra(&p, map).is_none(),
                v => substitute(&decode(poly_from_json(v, map.ncomponents()))?, map) == p,
            };
            verdict(ok, "subalgebra membership")
        }
        Command::Verify => return Err(Failure::Usage("cannot verify a verify result".into())),
    })
}
