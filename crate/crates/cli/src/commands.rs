use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use wstar::dsl::{eval_ast, library, parse};
use wstar::io::{element_from_json, fmt_g17, read_file, space_from_json, to_json_string};
use wstar::logic::OptConfig;
use wstar::modular::{kms_check, sigma_t, SigmaMethod};
use wstar::powers::{classify_type, tinv_scan, PowersSpec, ScanConfig};
use wstar::ultra::{i_u_check, FamilySpec, StageSequence};
use wstar::{BlockMatrix, Error, WStarSpace};

use crate::{Command, EvalArgs, Method, ModularCmd, PowersCmd, SentenceCmd, SeqCmd, SpaceCmd};

pub const SCHEMA: &str = "wstar/1";

pub const USAGE: u8 = 2;
pub const VALIDATION: u8 = 3;
pub const NUMERIC: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
    /// Report printed on stdout even though the command failed.
    pub payload: Option<String>,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into(), payload: None }
    }
}

/// Tags a library error with the flag or file it came from.
fn invalid(field: &str) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure::new(VALIDATION, format!("{field}: {e}"))
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    command: &'a str,
    #[serde(flatten)]
    result: T,
}

fn envelope<T: Serialize>(command: &str, result: T) -> String {
    to_json_string(&Envelope { schema: SCHEMA, command, result })
}

fn load_space(path: &Path, field: &str) -> Result<WStarSpace, Failure> {
    let text = read_file(path).map_err(invalid(field))?;
    space_from_json(&text).map_err(invalid(field))
}

fn load_element(path: &Path, field: &str, space: &WStarSpace) -> Result<BlockMatrix, Failure> {
    let text = read_file(path).map_err(invalid(field))?;
    let x = element_from_json(&text).map_err(invalid(field))?;
    x.check_dims(&space.dims()).map_err(invalid(field))?;
    Ok(x)
}

fn write_out(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::new(VALIDATION, format!("--out: {}: {e}", path.display())))
}

fn finite(field: &str, v: f64) -> Result<(), Failure> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Failure::new(NUMERIC, format!("{field}: computation produced {v}")))
    }
}

pub fn run(cmd: &Command) -> Result<String, Failure> {
    match cmd {
        Command::Space(SpaceCmd::Validate { file }) => space_validate(file),
        Command::Modular(ModularCmd::Sigma { space, element, t, method }) => sigma(space, element, *t, *method),
        Command::Modular(ModularCmd::Kms { space, x, y, t, tol }) => kms(space, x, y, *t, *tol),
        Command::Sentence(SentenceCmd::Eval(args)) => sentence_eval(args),
        Command::Powers(PowersCmd::Classify { lambda, eigs, inf, tmax, steps, out }) => {
            classify(*lambda, eigs.as_deref(), inf.as_deref(), *tmax, *steps, out.as_deref())
        }
        Command::Powers(PowersCmd::TinvScan { lambda, tmax, steps, out }) => scan(*lambda, *tmax, *steps, out),
        Command::Seq(SeqCmd::Decay { family, params, stages, threshold, out }) => {
            decay(family, params, *stages, *threshold, out.as_deref())
        }
    }
}

#[derive(Serialize)]
struct SpaceSummary {
    valid: bool,
    dims: Vec<usize>,
    eigenvalues: Vec<f64>,
    min_eigenvalue: f64,
}

fn space_validate(file: &Path) -> Result<String, Failure> {
    let space = load_space(file, "space file")?;
    let eigenvalues = space.eigenvalues();
    let min_eigenvalue = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(envelope("space validate", SpaceSummary { valid: true, dims: space.dims(), eigenvalues, min_eigenvalue }))
}

#[derive(Serialize)]
struct SigmaResult {
    t: f64,
    method: &'static str,
    result: BlockMatrix,
}

fn sigma(space: &Path, element: &Path, t: f64, method: Method) -> Result<String, Failure> {
    let s = load_space(space, "--space")?;
    let x = load_element(element, "--element", &s)?;
    finite("--t", t)?;
    let (m, name) = match method {
        Method::Conjugation => (SigmaMethod::Conjugation, "conjugation"),
        Method::Coefficient => (SigmaMethod::Coefficient, "coefficient"),
    };
    let result = sigma_t(&s, &x, t, m).map_err(invalid("--element"))?;
    Ok(envelope("modular sigma", SigmaResult { t, method: name, result }))
}

fn kms(space: &Path, x: &Path, y: &Path, t: f64, tol: f64) -> Result<String, Failure> {
    let s = load_space(space, "--space")?;
    let x = load_element(x, "--x", &s)?;
    let y = load_element(y, "--y", &s)?;
    finite("--t", t)?;
    if !(tol > 0.0) {
        return Err(Failure::new(VALIDATION, format!("--tol: must be positive, got {tol}")));
    }
    let report = kms_check(&s, &x, &y, t, tol).map_err(invalid("--t"))?;
    let passed = report.passed;
    let out = envelope("modular kms", report);
    if passed {
        Ok(out)
    } else {
        Err(Failure { code: NUMERIC, message: "KMS check failed at the requested tolerance".into(), payload: Some(out) })
    }
}

fn sentence_eval(a: &EvalArgs) -> Result<String, Failure> {
    let space = load_space(&a.space, "--space")?;
    let formula = match (&a.formula, &a.builtin) {
        (Some(text), _) => parse(text).map_err(|e| Failure::new(VALIDATION, format!("--formula: {e}")))?,
        (None, Some(name)) => {
            if name == "phi_t" && a.t.is_none() {
                return Err(Failure::new(USAGE, "--t: required with --builtin phi_t"));
            }
            library::builtin(name, a.t).ok_or_else(|| {
                Failure::new(VALIDATION, format!("--builtin: unknown sentence `{name}` (chi_factor, phi_t, theta)"))
            })?
        }
        (None, None) => unreachable!("clap requires one source"),
    };
    if a.budget == 0 {
        return Err(Failure::new(VALIDATION, "--budget: must be at least 1"));
    }
    let mut cfg = OptConfig { sample_budget: a.budget, seed: a.seed, ..OptConfig::default() };
    if let Some(r) = a.restarts {
        cfg.restarts = r;
    }
    if let Some(s) = a.ascent_steps {
        cfg.ascent_steps = s;
    }
    let est = eval_ast(&formula, &space, &cfg).map_err(invalid("--formula"))?;
    finite("value", est.value)?;

    #[derive(Serialize)]
    struct Out<'a> {
        formula: String,
        budget: usize,
        seed: u64,
        #[serde(flatten)]
        estimate: &'a wstar::logic::SentenceEstimate,
    }
    Ok(envelope(
        "sentence eval",
        Out { formula: formula.to_string(), budget: a.budget, seed: a.seed, estimate: &est },
    ))
}

fn parse_list(field: &str, text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::new(VALIDATION, format!("{field}: `{}` is not a number", s.trim())))
        })
        .collect()
}

fn scan_csv(rows: &[(f64, f64)]) -> String {
    let mut out = String::with_capacity(rows.len() * 40);
    out.push_str("t,modulus\n");
    for (t, m) in rows {
        let _ = writeln!(out, "{},{}", fmt_g17(*t), fmt_g17(*m));
    }
    out
}

fn classify(
    lambda: Option<f64>,
    eigs: Option<&str>,
    inf: Option<&str>,
    tmax: f64,
    steps: usize,
    out: Option<&Path>,
) -> Result<String, Failure> {
    let eigs = match (lambda, eigs, inf) {
        (Some(l), _, _) => {
            let spec = PowersSpec::Lambda { lambda: l };
            spec.validate().map_err(invalid("--lambda"))?;
            spec.eigenvalues()
        }
        (None, Some(text), _) => parse_list("--eigs", text)?,
        (None, None, Some(text)) => {
            let v = parse_list("--inf", text)?;
            if v.len() != 2 {
                return Err(Failure::new(VALIDATION, format!("--inf: expected two values, got {}", v.len())));
            }
            let spec = PowersSpec::Infinity { lambda: v[0], mu: v[1] };
            spec.validate().map_err(invalid("--inf"))?;
            spec.eigenvalues()
        }
        _ => unreachable!("clap requires one state"),
    };
    let scan = ScanConfig { t_max: tmax, steps };
    let field = if lambda.is_some() { "--lambda" } else if inf.is_some() { "--inf" } else { "--eigs" };
    let verdict = classify_type(&eigs, &scan).map_err(|e| match e {
        Error::ScanTooCoarse { .. } | Error::BadParameter(_) => Failure::new(VALIDATION, format!("--steps: {e}")),
        e => invalid(field)(e),
    })?;
    if let Some(path) = out {
        write_out(path, &scan_csv(&tinv_scan(&eigs, &scan).map_err(invalid(field))?))?;
    }
    Ok(envelope("powers classify", verdict))
}

fn scan(lambda: f64, tmax: f64, steps: usize, out: &Path) -> Result<String, Failure> {
    let spec = PowersSpec::Lambda { lambda };
    spec.validate().map_err(invalid("--lambda"))?;
    let rows = tinv_scan(&spec.eigenvalues(), &ScanConfig { t_max: tmax, steps })
        .map_err(|e| Failure::new(VALIDATION, format!("--tmax/--steps: {e}")))?;
    write_out(out, &scan_csv(&rows))?;

    #[derive(Serialize)]
    struct Summary {
        rows: usize,
        out: String,
        min_modulus: f64,
    }
    let min_modulus = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Ok(envelope("powers tinv-scan", Summary { rows: rows.len(), out: out.display().to_string(), min_modulus }))
}

fn decay(family: &str, params: &str, stages: usize, threshold: f64, out: Option<&Path>) -> Result<String, Failure> {
    let params: serde_json::Value =
        serde_json::from_str(params).map_err(|e| Failure::new(VALIDATION, format!("--params: {e}")))?;
    let spec = FamilySpec::from_name_and_params(family, &params).map_err(|e| match e {
        Error::UnknownFamily(_) => Failure::new(VALIDATION, format!("--family: {e}")),
        e => Failure::new(VALIDATION, format!("--params: {e}")),
    })?;
    let seq = StageSequence::new(spec).map_err(invalid("--params"))?;
    let verdict = i_u_check(&seq, stages, threshold).map_err(|e| match e {
        Error::BoundViolated { .. } => Failure::new(VALIDATION, format!("--params: {e}")),
        e => Failure::new(VALIDATION, format!("--stages: {e}")),
    })?;
    if let Some(v) = verdict.tail_values.iter().find(|v| !v.is_finite()) {
        return Err(Failure::new(NUMERIC, format!("sharp_norm: computation produced {v}")));
    }
    if let Some(path) = out {
        let mut csv = String::from("n,sharp_norm\n");
        for (n, v) in verdict.stages.iter().zip(&verdict.tail_values) {
            let _ = writeln!(csv, "{n},{}", fmt_g17(*v));
        }
        write_out(path, &csv)?;
    }

    #[derive(Serialize)]
    struct Out<'a> {
        family: &'a FamilySpec,
        uniform_bound: f64,
        #[serde(flatten)]
        verdict: wstar::ultra::MembershipVerdict,
    }
    Ok(envelope("seq decay", Out { family: &seq.family, uniform_bound: seq.uniform_bound, verdict }))
}
