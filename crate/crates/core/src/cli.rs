//! Batch front end.
//!
//! Exit codes: 0 on success, 1 on domain errors (invalid tower, non-integrable
//! composition, failed verification), 2 on usage errors.  Reports go to
//! stdout or `-o`, diagnostics to stderr.

use crate::a_spaces::{double_space, triple_space, verify_facemaps, Tower};
use crate::corner_spaces::{dot, BMap, Provenance, Space};
use crate::densities::{double_weights, triple_summary, triple_w_a_closed, triple_w_a_displayed, triple_weights};
use crate::index_algebra::{IndexSet, WeightVector};
use crate::model_symbols::algebra::{Coeff, Weyl};
use crate::model_symbols::{
    fully_elliptic_check, normal_family, normal_family_matrix, random_operator, resolvent_model_check, sig17, ADiffOp, BasePoint, Dims,
    GridSpec, Scalar, Tail,
};
use crate::op_calculus::{compose, ffz_closed_form, parametrix_ledger, random_class, OperatorClass};
use crate::rational::{self, int, Rational};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "acalc", version, about = "Blowup, index-set and a-calculus bookkeeping")]
pub struct Invocation {
    #[command(subcommand)]
    pub command: Command,
    /// Tower configuration (JSON).
    #[arg(short = 'c', long = "config", global = true)]
    pub config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Seed for randomized sweeps.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tower checks.
    Tower {
        #[command(subcommand)]
        action: TowerAction,
    },
    /// Build the double or triple space.
    Space {
        #[command(subcommand)]
        which: Which,
    },
    /// Face tables of the triple-space projections.
    Facemap {
        #[command(subcommand)]
        action: FacemapAction,
    },
    /// Density weights on the double and triple spaces.
    Weights,
    /// Compose two operator classes, or run a random sweep against the closed form.
    Compose {
        #[arg(short = 'P')]
        p: Option<PathBuf>,
        #[arg(short = 'Q')]
        q: Option<PathBuf>,
        /// Number of random integrable pairs to check when no classes are given.
        #[arg(long)]
        sweep: Option<usize>,
    },
    /// Index set of `Pu` for `u` with the given index set.
    Act {
        #[arg(short = 'P')]
        p: PathBuf,
        /// JSON list of `[re, im, p]` terms, or a file containing one.
        #[arg(short = 'I', long = "index")]
        index: String,
    },
    /// Remainder ledger of the parametrix construction.
    Parametrix {
        #[arg(short = 'm', long = "order", default_value = "0", allow_hyphen_values = true)]
        order: String,
    },
    /// Normal family of a model operator.
    NormalFamily {
        /// Operator spec (JSON); the model Laplacian when absent.
        #[arg(short = 'P')]
        p: Option<PathBuf>,
        /// Use a random operator of this order instead (see `--seed`).
        #[arg(long, conflicts_with = "p")]
        random: Option<u32>,
        /// Base point `(y, z)`, comma separated.
        #[arg(long)]
        point: Option<String>,
        /// Evaluate at this `μ`, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        /// Grid search for full ellipticity.
        #[arg(long)]
        certify: bool,
        #[arg(short = 'N', default_value_t = 8)]
        n: usize,
        #[arg(long, default_value = "10")]
        radius: String,
        #[arg(long, default_value = "1/2")]
        step: String,
    },
    /// Full ellipticity of `Δ − λ` for the model Laplacian.
    ResolventCheck {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(short = 'N', default_value_t = 8)]
        n: usize,
        #[arg(long, default_value = "10")]
        radius: String,
        #[arg(long, default_value = "1/2")]
        step: String,
    },
    /// Graphviz export of a space.
    ExportDot {
        #[arg(long, value_enum, default_value_t = SpaceKind::Double)]
        space: SpaceKind,
    },
}

#[derive(Debug, Subcommand)]
pub enum TowerAction {
    Validate,
}

#[derive(Debug, Subcommand)]
pub enum Which {
    Double,
    Triple,
}

#[derive(Debug, Subcommand)]
pub enum FacemapAction {
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpaceKind {
    Double,
    Triple,
}

/// How a run failed.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    /// A check ran and failed; the report is still written.
    #[error("check failed")]
    Rejected(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Domain(_) | Failure::Rejected(_) => 1,
        }
    }
}

fn domain<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Domain(e.to_string())
}

/// Parse `argv` (program name first), run, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let inv = match Invocation::try_parse_from(argv) {
        Ok(inv) => inv,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (report, code) = match execute(&inv) {
        Ok(r) => (Some(r), 0),
        Err(Failure::Rejected(r)) => {
            eprintln!("check failed");
            (Some(r), 1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            (None, e.code())
        }
    };
    if let Some(r) = report {
        if let Err(e) = emit(&inv, &r) {
            eprintln!("error: {e}");
            return 2;
        }
    }
    code
}

fn emit(inv: &Invocation, report: &str) -> std::io::Result<()> {
    match &inv.output {
        Some(p) => std::fs::write(p, report),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(report.as_bytes())?;
            out.flush()
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_tower(inv: &Invocation) -> Result<Tower, Failure> {
    let path = inv.config.as_ref().ok_or_else(|| Failure::Usage("a tower config is required (-c tower.json)".into()))?;
    Tower::from_json(&read(path)?).map_err(domain)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn no_dot(inv: &Invocation, what: &str) -> Result<(), Failure> {
    if inv.format == Format::Dot {
        return Err(Failure::Usage(format!("--format dot is only available for spaces, not for {what}")));
    }
    Ok(())
}

fn parse_q(s: &str, what: &str) -> Result<Rational, Failure> {
    rational::parse(s).map_err(|e| Failure::Usage(format!("bad {what}: {e}")))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<Rational>, Failure> {
    s.trim_matches(|c| c == '(' || c == ')').split(',').map(|t| parse_q(t.trim(), what)).collect()
}

fn execute(inv: &Invocation) -> Result<String, Failure> {
    let t = load_tower(inv)?;
    match &inv.command {
        Command::Tower { action: TowerAction::Validate } => tower_validate(inv, &t),
        Command::Space { which } => {
            let kind = match which {
                Which::Double => SpaceKind::Double,
                Which::Triple => SpaceKind::Triple,
            };
            space(inv, &t, kind)
        }
        Command::Facemap { action: FacemapAction::Verify } => facemap(inv, &t),
        Command::Weights => weights(inv, &t),
        Command::Compose { p, q, sweep } => match (p, q, sweep) {
            (Some(p), Some(q), None) => compose_cmd(inv, &t, p, q),
            (None, None, Some(n)) => compose_sweep(inv, &t, *n),
            _ => Err(Failure::Usage("compose needs either -P and -Q, or --sweep".into())),
        },
        Command::Act { p, index } => act_cmd(inv, &t, p, index),
        Command::Parametrix { order } => parametrix(inv, &t, order),
        Command::NormalFamily { p, random, point, mu, certify, n, radius, step } => {
            let d = Dims::from_tower(&t).map_err(domain)?;
            let op = match (p, random) {
                (Some(p), _) => ADiffOp::from_json(d, &read(p)?).map_err(domain)?,
                (None, Some(order)) => random_operator(d, *order, &mut rand_chacha::ChaCha8Rng::seed_from_u64(inv.seed)),
                (None, None) => ADiffOp::laplacian(d),
            };
            let grid = GridSpec { radius: parse_q(radius, "radius")?, step: parse_q(step, "step")? };
            normal_family_cmd(inv, &op, point.as_deref(), mu.as_deref(), *certify, *n, &grid)
        }
        Command::ResolventCheck { lambda, n, radius, step } => {
            let d = Dims::from_tower(&t).map_err(domain)?;
            let lambda = Scalar::parse(lambda).map_err(|e| Failure::Usage(e.to_string()))?;
            let grid = GridSpec { radius: parse_q(radius, "radius")?, step: parse_q(step, "step")? };
            resolvent(inv, d, &lambda, *n, &grid)
        }
        Command::ExportDot { space: kind } => Ok(dot::to_dot(&build_space(&t, *kind)?)),
    }
}

fn tower_validate(inv: &Invocation, t: &Tower) -> Result<String, Failure> {
    no_dot(inv, "tower validate")?;
    t.validate().map_err(domain)?;
    let join = |v: &[String]| v.join(",");
    let a: Vec<String> = t.a.iter().map(|x| x.to_string()).collect();
    let f: Vec<String> = t.f.iter().map(|x| x.to_string()).collect();
    Ok(match inv.format {
        Format::Json => pretty(&json!({ "valid": true, "tower": t, "dim": t.dim() })),
        _ => format!("valid tower: k = {}, a = ({}), b = {}, f = ({}), dim = {}\n", t.k, join(&a), t.b, join(&f), t.dim()),
    })
}

fn build_space(t: &Tower, kind: SpaceKind) -> Result<Space, Failure> {
    Ok(match kind {
        SpaceKind::Double => (*double_space(t).map_err(domain)?.space).clone(),
        SpaceKind::Triple => (*triple_space(t).map_err(domain)?.space).clone(),
    })
}

fn exponent_json(m: &BMap) -> Value {
    let cols: Vec<String> = m.codomain.face_names().into_iter().map(String::from).collect();
    let rows: serde_json::Map<String, Value> =
        m.domain.face_names().into_iter().map(|f| (f.clone(), json!(m.exponent_row(&f).unwrap_or(&[])))).collect();
    json!({ "domain": m.domain.name, "codomain": m.codomain.name, "columns": cols, "rows": rows, "b_fibration": m.is_b_fibration() })
}

fn space_json(s: &Space) -> Value {
    let faces: Vec<Value> = s
        .faces()
        .iter()
        .map(|f| {
            let kind = match f.provenance {
                Provenance::Base { .. } => "base",
                Provenance::Front { .. } => "front",
            };
            json!({ "name": f.name, "kind": kind })
        })
        .collect();
    let blowups: Vec<Value> = s
        .history()
        .iter()
        .map(|st| json!({ "center": st.center, "order": st.order, "front": s.face_name(st.ff), "codim": st.codim }))
        .collect();
    json!({ "name": s.name, "faces": faces, "blowups": blowups })
}

fn space_text(s: &Space) -> String {
    let mut out = format!("{}: {} boundary hypersurfaces\n  {}\nblowups:\n", s.name, s.face_count(), s.face_names().join(", "));
    for (i, st) in s.history().iter().enumerate() {
        out += &format!("  {}. {} (order {}) -> {}\n", i + 1, st.center, st.order, s.face_name(st.ff));
    }
    out
}

fn space(inv: &Invocation, t: &Tower, kind: SpaceKind) -> Result<String, Failure> {
    if inv.format == Format::Dot {
        return Ok(dot::to_dot(&build_space(t, kind)?));
    }
    let (s, maps): (Space, Vec<(String, BMap)>) = match kind {
        SpaceKind::Double => {
            let d = double_space(t).map_err(domain)?;
            ((*d.space).clone(), vec![("left projection".into(), d.proj_l), ("right projection".into(), d.proj_r)])
        }
        SpaceKind::Triple => {
            let tr = triple_space(t).map_err(domain)?;
            let maps = tr.projections.iter().enumerate().map(|(i, p)| (format!("pi_{}", i + 1), p.clone())).collect();
            ((*tr.space).clone(), maps)
        }
    };
    Ok(match inv.format {
        Format::Json => {
            let mut v = space_json(&s);
            v["maps"] = maps.iter().map(|(n, m)| json!({ "name": n, "exponents": exponent_json(m) })).collect();
            pretty(&v)
        }
        _ => {
            let mut out = space_text(&s);
            for (n, m) in &maps {
                out += &format!("{n} (b-fibration: {}):\n{m}", if m.is_b_fibration() { "yes" } else { "no" });
            }
            out
        }
    })
}

fn facemap(inv: &Invocation, t: &Tower) -> Result<String, Failure> {
    no_dot(inv, "facemap verify")?;
    let r = verify_facemaps(t).map_err(domain)?;
    let body = match inv.format {
        Format::Json => pretty(&json!({
            "tables": r.tables,
            "classes": r.classes,
            "faces": r.faces,
            "mismatches": r.mismatches.iter().map(|m| json!({
                "level": m.level, "projection": m.projection, "class": m.class,
                "expected": m.expected, "computed": m.computed,
            })).collect::<Vec<_>>(),
        })),
        _ => r.to_string(),
    };
    if r.mismatches.is_empty() {
        Ok(body)
    } else {
        Err(Failure::Rejected(body))
    }
}

fn weight_text(w: &WeightVector) -> String {
    w.0.iter().map(|(f, q)| format!("{f} {}", rational::Show(q))).collect::<Vec<_>>().join(", ")
}

fn summary_text(s: &[Rational; 7]) -> String {
    let r: Vec<String> = s.iter().map(|q| rational::Show(q).to_string()).collect();
    format!("({}; {})", r[..3].join(", "), r[3..].join(", "))
}

const SUMMARY_FACES: [&str; 7] = ["V_y", "G_{1,y}", "E_{1,y}", "V_z", "F_{1,z}", "G_{1,z}", "E_{1,z}"];

fn weights(inv: &Invocation, t: &Tower) -> Result<String, Failure> {
    no_dot(inv, "weights")?;
    let dw = double_weights(t).map_err(domain)?;
    let triple = if t.k == 2 {
        let tw = triple_weights(t).map_err(domain)?;
        let computed = triple_summary(&tw.w_a);
        let closed = triple_summary(&triple_w_a_closed(t));
        let displayed = triple_summary(&triple_w_a_displayed(t));
        let differ: Vec<&str> = (0..7).filter(|&i| computed[i] != displayed[i]).map(|i| SUMMARY_FACES[i]).collect();
        Some((tw, computed, closed, displayed, differ))
    } else {
        None
    };
    Ok(match inv.format {
        Format::Json => {
            let mut v = json!({ "double": dw });
            if let Some((tw, computed, closed, displayed, differ)) = &triple {
                let enc = |s: &[Rational; 7]| s.iter().map(rational::encode).collect::<Vec<_>>();
                v["triple"] = json!({
                    "w_a0": tw.w_a0, "shift": tw.shift, "w_a": tw.w_a,
                    "summary_faces": SUMMARY_FACES,
                    "w_a_computed": enc(computed),
                    "w_a_closed_form": enc(closed),
                    "w_a_displayed": enc(displayed),
                    "discrepancy": differ,
                });
            }
            pretty(&v)
        }
        _ => {
            let mut out = format!(
                "double space\n  w_a0:    {}\n  w_a:     {}\n  w_tilde: {}\n",
                weight_text(&dw.w_a0),
                weight_text(&dw.w_a),
                weight_text(&dw.w_tilde)
            );
            if let Some((tw, computed, closed, displayed, differ)) = &triple {
                out += &format!("triple space ({})\n", SUMMARY_FACES.join(", "));
                out += &format!("  W_a0:                {}\n", summary_text(&triple_summary(&tw.w_a0)));
                out += &format!("  W_a (computed):      {}\n", summary_text(computed));
                out += &format!("  W_a (closed form):   {}\n", summary_text(closed));
                out += &format!("  W_a (displayed):     {}\n", summary_text(displayed));
                if differ.is_empty() {
                    out += "  computed and displayed W_a agree\n";
                } else {
                    out += &format!("  DISCREPANCY: computed and displayed W_a differ in sign at {}\n", differ.join(", "));
                }
            }
            out
        }
    })
}

fn load_class(t: &Tower, path: &Path) -> Result<OperatorClass, Failure> {
    OperatorClass::from_json(t, &read(path)?).map_err(domain)
}

fn class_out(inv: &Invocation, c: &OperatorClass) -> String {
    match inv.format {
        Format::Json => pretty(&to_value(&c.spec())),
        _ => format!("{c}\n"),
    }
}

fn compose_cmd(inv: &Invocation, t: &Tower, p: &Path, q: &Path) -> Result<String, Failure> {
    no_dot(inv, "compose")?;
    let (p, q) = (load_class(t, p)?, load_class(t, q)?);
    Ok(class_out(inv, &compose(&p, &q).map_err(domain)?))
}

fn compose_sweep(inv: &Invocation, t: &Tower, n: usize) -> Result<String, Failure> {
    no_dot(inv, "compose")?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(inv.seed);
    let (re_max, p_max) = (int(12), 8);
    let (mut checked, mut skipped, mut bad) = (0usize, 0usize, Vec::new());
    while checked < n {
        let (p, q) = (random_class(t, &mut rng, 5, 3), random_class(t, &mut rng, 5, 3));
        let Ok(closed) = ffz_closed_form(&p, &q) else {
            skipped += 1;
            continue;
        };
        let got = compose(&p, &q).map_err(domain)?;
        if !got.at("ff_z").window_eq(&closed, &re_max, p_max) {
            bad.push(json!({ "P": p.spec(), "Q": q.spec(), "computed": got.at("ff_z"), "closed_form": closed }));
        }
        checked += 1;
    }
    let body = match inv.format {
        Format::Json => pretty(&json!({ "seed": inv.seed, "pairs": checked, "skipped_non_integrable": skipped, "mismatches": bad })),
        _ => format!("{checked} pairs ({skipped} non-integrable skipped), {} mismatches at ff_z (seed {})\n", bad.len(), inv.seed),
    };
    if bad.is_empty() {
        Ok(body)
    } else {
        Err(Failure::Rejected(body))
    }
}

fn act_cmd(inv: &Invocation, t: &Tower, p: &Path, index: &str) -> Result<String, Failure> {
    no_dot(inv, "act")?;
    let p = load_class(t, p)?;
    let text = if Path::new(index).is_file() { read(Path::new(index))? } else { index.to_string() };
    let i: IndexSet = serde_json::from_str(&text).map_err(|e| Failure::Domain(format!("bad index set: {e}")))?;
    let out = crate::op_calculus::act(&p, &i).map_err(domain)?;
    Ok(match inv.format {
        Format::Json => pretty(&to_value(&out)),
        _ => format!("{out}\n"),
    })
}

fn parametrix(inv: &Invocation, t: &Tower, order: &str) -> Result<String, Failure> {
    no_dot(inv, "parametrix")?;
    let m = parse_q(order, "order")?;
    let l = parametrix_ledger(t, &m).map_err(domain)?;
    let verified = l.verify().map_err(domain)?;
    let body = match inv.format {
        Format::Json => {
            let steps: Vec<Value> = l
                .steps
                .iter()
                .map(|s| {
                    json!({
                        "rule": s.rule.name(),
                        "description": s.description,
                        "output": s.output.spec(),
                        "checks": s.checks.iter().map(|c| json!({ "what": c.what, "holds": c.holds })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            pretty(&json!({ "order": l.order, "verified": verified, "steps": steps }))
        }
        _ => format!("parametrix ledger for order {}\n{l}{}\n", l.order, if verified { "verified" } else { "NOT verified" }),
    };
    if verified {
        Ok(body)
    } else {
        Err(Failure::Rejected(body))
    }
}

fn fibre_op_text(d: &Dims, w: &Weyl<Coeff>) -> String {
    if w.is_zero() {
        return "0".into();
    }
    let theta = d.theta_names();
    let mut names = vec!["x".to_string()];
    names.extend(theta.iter().cloned());
    w.terms
        .iter()
        .rev()
        .map(|(b, c)| {
            let mono: String = b
                .iter()
                .enumerate()
                .filter(|(_, e)| **e > 0)
                .map(|(j, e)| if *e == 1 { format!("∂{}", names[j]) } else { format!("∂{}^{e}", names[j]) })
                .collect();
            format!("[{}]{mono}", c.render(&theta))
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn normal_family_cmd(
    inv: &Invocation,
    op: &ADiffOp,
    point: Option<&str>,
    mu: Option<&str>,
    certify: bool,
    n: usize,
    grid: &GridSpec,
) -> Result<String, Failure> {
    no_dot(inv, "normal-family")?;
    let d = op.dims;
    let bp = match point {
        Some(s) => BasePoint::parse(&d, s).map_err(|e| Failure::Usage(e.to_string()))?,
        None => BasePoint::origin(&d),
    };
    let nf = normal_family(op, &bp).map_err(domain)?;
    let cov = d.covariable_names();
    let mut json_out = json!({
        "operator": op.to_spec(),
        "base_point": bp.render(),
        "family": nf.parts.iter().map(|(e, w)| json!({ "mu_exponent": e, "fibre_operator": fibre_op_text(&d, w) })).collect::<Vec<_>>(),
    });
    let mut text = format!("operator: {op}\nbase point: ({})\nnormal family:\n", bp.render().join(", "));
    for (e, w) in &nf.parts {
        let mono: String =
            e.iter().zip(&cov).filter(|(k, _)| **k > 0).map(|(k, c)| if *k == 1 { c.clone() } else { format!("{c}^{k}") }).collect();
        text += &format!("  {}: {}\n", if mono.is_empty() { "1".into() } else { mono }, fibre_op_text(&d, w));
    }
    if let Some(mu) = mu {
        let mu = parse_list(mu, "μ")?;
        let m = normal_family_matrix(op, &bp, &mu, n).map_err(domain)?;
        let s = m.min_singular_value();
        text += &format!(
            "at μ = ({}): {} modes, {}, smallest singular value {}\n",
            mu.iter().map(|q| rational::Show(q).to_string()).collect::<Vec<_>>().join(", "),
            m.modes.len(),
            if m.is_diagonal() { "diagonal" } else { "not diagonal" },
            sig17(s)
        );
        json_out["matrix"] = json!({
            "mu": mu.iter().map(rational::encode).collect::<Vec<_>>(),
            "modes": m.modes,
            "entries": m.exact.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "min_singular_value": sig17(s),
        });
    }
    if certify {
        let c = fully_elliptic_check(op, grid, n, Tail::GridOnly).map_err(domain)?;
        text += &format!(
            "{}; symbol {} ({}), min singular value {} at base point ({}), μ = ({})\n  {}\n",
            if c.fully_elliptic { "fully elliptic" } else { "not fully elliptic" },
            if c.symbol_elliptic { "elliptic" } else { "not elliptic" },
            c.symbol_check,
            sig17(c.min_singular_value),
            c.argmin.base_point.join(", "),
            c.argmin.mu.join(", "),
            c.tail
        );
        json_out["certificate"] = to_value(&c);
    }
    Ok(match inv.format {
        Format::Json => pretty(&json_out),
        _ => text,
    })
}

fn resolvent(inv: &Invocation, d: Dims, lambda: &Scalar, n: usize, grid: &GridSpec) -> Result<String, Failure> {
    no_dot(inv, "resolvent-check")?;
    let r = resolvent_model_check(d, lambda, n, grid).map_err(domain)?;
    let body = match inv.format {
        Format::Json => pretty(&to_value(&r)),
        _ => {
            let c = &r.certificate;
            let mut out = if r.passes {
                format!("fully elliptic; margin {}\n", r.margin)
            } else if r.on_spectrum_ray {
                format!("not fully elliptic: λ = {} lies on [0, ∞)\n", r.lambda)
            } else {
                format!("not fully elliptic; margin {}\n", r.margin)
            };
            if let Some(w) = &r.witness {
                let mode: Vec<String> = w.mode.iter().map(|k| k.to_string()).collect();
                out += &format!(
                    "  witness: mode k = ({}), μ = ({}){}\n",
                    mode.join(", "),
                    w.mu.join(", "),
                    if w.exact { ", exact zero eigenvalue" } else { "" }
                );
            }
            out += &format!(
                "  λ = {}, dist(λ, [0, ∞)) = {}\n  min singular value {} at μ = ({}); {} grid points, radius {}, step {}, {} modes\n  {}\n",
                r.lambda,
                sig17(r.distance),
                sig17(c.min_singular_value),
                c.argmin.mu.join(", "),
                c.grid_points,
                rational::Show(&c.grid.radius),
                rational::Show(&c.grid.step),
                c.modes,
                c.tail
            );
            out
        }
    };
    if r.passes {
        Ok(body)
    } else {
        Err(Failure::Rejected(body))
    }
}
