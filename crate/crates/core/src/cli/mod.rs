//! The `fslrt` command line: parse flags, run one computation, print JSON
//! (or CSV) and map failures to exit codes 1 (computation) and 2 (usage).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::asympt::{compare_prediction, conjecture_report, growth_series, r_range, Branch, GrowthOptions};
use crate::error::Error;
use crate::fsl::{
    dft_full, poisson_check, rt_cop, rt_fsl, tabulate_rt_fsl, tv_from_rt, ChangeOfPairSpec, FslPresentation,
    GridOptions, TabulatedInvariant,
};
use crate::geom::{solve_critical, tet_volume, PotentialSpec};
use crate::qcore::{LogComplex, Precision, RootContext};
use crate::qdilog::PhiTable;
use crate::selftest;
use crate::sixj::{sixj_direct, sixj_via_phir, SixTuple};

const USAGE: i32 = 2;
const FAILURE: i32 = 1;

#[derive(Parser, Debug)]
#[command(name = "fslrt", version, about = "Invariants of fundamental shadow links and their growth")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Odd level r ≥ 3.
    #[arg(long, global = true)]
    r: Option<i64>,
    #[arg(long, global = true, default_value = "standard")]
    precision: Precision,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "FSLRT_THREADS", default_value_t = 0)]
    threads: usize,
    /// Emit CSV instead of JSON where the result is a table.
    #[arg(long, global = true)]
    csv: bool,
    /// Write the result to a file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Lift the grid-size cap.
    #[arg(long, global = true)]
    force: bool,
    #[arg(long, global = true)]
    rmin: Option<u32>,
    #[arg(long, global = true)]
    rmax: Option<u32>,
    #[arg(long, global = true)]
    rstep: Option<u32>,
}

#[derive(Args, Debug, Clone)]
struct PresArgs {
    /// Presentation JSON; the built-in one-block example when absent.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Component ids (1-based) of the change of pair; overrides the file.
    #[arg(long = "i", value_delimiter = ',')]
    i_set: Option<Vec<usize>>,
    /// Framings q_i, in the order of --i.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    q: Option<Vec<i64>>,
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<i64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One quantum 6j-symbol.
    Sixj {
        #[arg(long, value_delimiter = ',', required = true)]
        colors: Vec<i64>,
    },
    /// Invariant of the fundamental shadow link at one coloring.
    Rt {
        #[command(flatten)]
        pres: PresArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        colors: Vec<i64>,
    },
    /// Invariant after the change of pair; colors per component, n on I.
    Cop {
        #[command(flatten)]
        pres: PresArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        colors: Vec<i64>,
    },
    /// Full table of the partial Fourier transform on I.
    Dft {
        #[command(flatten)]
        pres: PresArgs,
    },
    /// Both sides of the Parseval identity.
    Poisson {
        #[command(flatten)]
        pres: PresArgs,
    },
    /// Turaev–Viro value from the squared invariants.
    Tv {
        #[command(flatten)]
        pres: PresArgs,
        /// Rank of H₂ with Z/2 coefficients.
        #[arg(long, default_value_t = 0)]
        h2: u32,
    },
    /// Volume and edge lengths of a truncated hyperideal tetrahedron.
    Tetvol {
        #[arg(long, value_delimiter = ',', required = true)]
        theta: Vec<f64>,
    },
    /// Critical point of the potential at the given cone angles.
    Critical {
        #[command(flatten)]
        pres: PresArgs,
        /// Cone angles, one per component or a single shared value.
        #[arg(long, value_delimiter = ',', required = true)]
        theta: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        eps: Option<Vec<i8>>,
    },
    /// Growth table of (4π/r)·log RT along a color sequence.
    Growth {
        #[command(flatten)]
        pres: PresArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        theta: Vec<f64>,
        #[arg(long, default_value = "below")]
        branch: Branch,
        /// Skip the rounding correction to the target angles.
        #[arg(long)]
        raw: bool,
    },
    /// Leading-order saddle prediction against the exact invariant.
    Predict {
        #[command(flatten)]
        pres: PresArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        theta: Vec<f64>,
        #[arg(long, default_value = "below")]
        branch: Branch,
    },
    /// Fitted limit against volume and Chern–Simons invariant.
    Report {
        #[command(flatten)]
        pres: PresArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        theta: Vec<f64>,
        #[arg(long, default_value = "below")]
        branch: Branch,
    },
    /// Run the numbered invariant checks.
    Selftest {
        /// Run only these checks.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<u8>>,
    },
}

/// Either a usage problem (exit 2) or a failed computation (exit 1).
enum Failure {
    Usage(String),
    Compute(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

enum Output {
    Json(Value),
    Csv(String),
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.global.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return FAILURE;
        }
    };
    let result = pool.install(|| dispatch(&cli));
    let (out, code) = match result {
        Ok(o) => o,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            return USAGE;
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            return FAILURE;
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            return FAILURE;
        }
    };
    match emit(&cli.global, out) {
        Ok(()) => code,
        Err(e) => {
            eprintln!("error: {e}");
            FAILURE
        }
    }
}

fn emit(g: &Global, out: Output) -> std::io::Result<()> {
    let text = match out {
        Output::Json(v) => {
            let mut s = serde_json::to_string_pretty(&v).expect("serializable");
            s.push('\n');
            s
        }
        Output::Csv(s) => s,
    };
    match &g.out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn level(g: &Global) -> Result<i64, Failure> {
    let r = g.r.ok_or_else(|| Failure::Usage("--r is required".into()))?;
    if r < 3 || r % 2 == 0 {
        return Err(Failure::Usage(format!("--r must be odd and at least 3, got {r}")));
    }
    Ok(r)
}

fn context_json(ctx: Option<&RootContext>, precision: Precision) -> Value {
    match ctx {
        Some(c) => json!({ "r": c.r(), "mu_r": c.mu_r(), "precision": precision }),
        None => json!({ "r": null, "mu_r": null, "precision": precision }),
    }
}

fn with_context<T: Serialize>(ctx: Option<&RootContext>, precision: Precision, body: &T) -> Value {
    let mut v = serde_json::to_value(body).expect("serializable");
    if let Value::Object(m) = &mut v {
        m.insert("context".into(), context_json(ctx, precision));
    }
    v
}

fn log_json(v: &LogComplex) -> Value {
    let z = v.to_complex();
    json!({ "logmag": v.logmag, "phase": v.phase, "value": [z.re, z.im] })
}

fn grid(g: &Global) -> GridOptions {
    if g.force {
        GridOptions::forced()
    } else {
        GridOptions::default()
    }
}

fn load(p: &PresArgs) -> Result<(FslPresentation, Option<ChangeOfPairSpec>), Failure> {
    let (pres, file_cop) = match &p.file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(Failure::Io)?;
            FslPresentation::from_json(&text).map_err(|e| Failure::Usage(e.to_string()))?
        }
        None => (FslPresentation::tetra1(), None),
    };
    let cop = match &p.i_set {
        Some(ids) => {
            let q: BTreeMap<usize, i64> = match &p.q {
                Some(q) if q.len() != ids.len() => {
                    return Err(Failure::Usage(format!("{} framings for {} components", q.len(), ids.len())))
                }
                Some(q) => ids.iter().copied().zip(q.iter().copied()).collect(),
                None => BTreeMap::new(),
            };
            Some(ChangeOfPairSpec::from_ids(&pres, ids, &q, p.sigma.unwrap_or(0)).map_err(|e| Failure::Usage(e.to_string()))?)
        }
        None => file_cop.map(|mut c| {
            if let Some(s) = p.sigma {
                c.sigma = s;
            }
            c
        }),
    };
    Ok((pres, cop))
}

fn require_cop(cop: Option<ChangeOfPairSpec>) -> Result<ChangeOfPairSpec, Failure> {
    cop.ok_or_else(|| Failure::Usage("a change of pair is needed: pass --i or give a cop section in the file".into()))
}

fn angles(theta: &[f64], n: usize) -> Result<Vec<f64>, Failure> {
    match theta.len() {
        1 => Ok(vec![theta[0]; n]),
        k if k == n => Ok(theta.to_vec()),
        k => Err(Failure::Usage(format!("{k} cone angles for {n} components"))),
    }
}

fn levels(g: &Global) -> Result<Vec<u32>, Failure> {
    let rmin = g.rmin.unwrap_or(101);
    let rmax = g.rmax.unwrap_or(1001);
    let step = g.rstep.unwrap_or(8);
    if rmax < rmin {
        return Err(Failure::Usage(format!("--rmax {rmax} below --rmin {rmin}")));
    }
    r_range(rmin, rmax, step).map_err(|e| Failure::Usage(e.to_string()))
}

fn dispatch(cli: &Cli) -> Result<(Output, i32), Failure> {
    let Command::Selftest { only } = &cli.command else {
        return Ok((compute(cli)?, 0));
    };
    let ids: Vec<u8> = only.clone().unwrap_or_else(|| (1..=12).collect());
    if let Some(bad) = ids.iter().find(|&&i| !(1..=12).contains(&i)) {
        return Err(Failure::Usage(format!("no check numbered {bad}")));
    }
    let results: Vec<selftest::CheckResult> = ids
        .iter()
        .map(|&i| {
            let res = selftest::run_check(i);
            eprintln!("{}", res.line());
            res
        })
        .collect();
    let all = results.iter().all(|c| c.pass);
    Ok((Output::Json(json!({ "checks": results, "pass": all })), if all { 0 } else { FAILURE }))
}

fn compute(cli: &Cli) -> Result<Output, Failure> {
    let g = &cli.global;
    let prec = g.precision;
    let new_ctx = || -> Result<RootContext, Failure> { Ok(RootContext::new(level(g)?, prec)?) };
    match &cli.command {
        Command::Sixj { colors } => {
            let m: [i64; 6] = colors
                .as_slice()
                .try_into()
                .map_err(|_| Failure::Usage(format!("--colors needs 6 entries, got {}", colors.len())))?;
            let ctx = new_ctx()?;
            let six = SixTuple::new(&ctx, m)?;
            let direct = sixj_direct(&ctx, &six)?;
            let table = PhiTable::new(&ctx)?;
            let via = match sixj_via_phir(&ctx, &table, &six) {
                Ok(v) => Some(v),
                Err(Error::NotHyperideal(_)) => None,
                Err(e) => return Err(e.into()),
            };
            let mut body = log_json(&direct);
            body["colors"] = json!(m);
            body["via_phir"] = via.map_or(Value::Null, |v| log_json(&v));
            body["route_gap"] = via.map_or(Value::Null, |v| json!(direct.rel_diff(&v)));
            Ok(Output::Json(with_context(Some(&ctx), prec, &body)))
        }
        Command::Rt { pres, colors } => {
            let (p, _) = load(pres)?;
            let ctx = new_ctx()?;
            let v = rt_fsl(&ctx, &p, colors)?;
            let mut body = log_json(&v);
            body["colors"] = json!(colors);
            body["presentation"] = json!(p.name);
            Ok(Output::Json(with_context(Some(&ctx), prec, &body)))
        }
        Command::Cop { pres, colors } => {
            let (p, cop) = load(pres)?;
            let cop = require_cop(cop)?;
            if colors.len() != p.n() {
                return Err(Failure::Usage(format!("--colors needs {} entries", p.n())));
            }
            let ctx = new_ctx()?;
            let n_i: Vec<i64> = cop.i_set.iter().map(|&i| colors[i]).collect();
            let m_j: Vec<i64> = cop.j_set(p.n()).iter().map(|&j| colors[j]).collect();
            let s = rt_cop(&ctx, &p, &cop, &n_i, &m_j, grid(g))?;
            let mut body = log_json(&s.value);
            body["colors"] = json!(colors);
            body["i"] = json!(cop.i_set.iter().map(|i| i + 1).collect::<Vec<_>>());
            body["skipped"] = json!(s.skipped);
            body["points"] = json!(s.points);
            Ok(Output::Json(with_context(Some(&ctx), prec, &body)))
        }
        Command::Dft { pres } => {
            let (p, cop) = load(pres)?;
            let cop = require_cop(cop)?;
            let ctx = new_ctx()?;
            let f = tabulate_rt_fsl(&ctx, &p, grid(g))?;
            let t = dft_full(&ctx, &f, &cop.i_set)?;
            Ok(table_output(g, &ctx, prec, &t))
        }
        Command::Poisson { pres } => {
            let (p, cop) = load(pres)?;
            let cop = require_cop(cop)?;
            let ctx = new_ctx()?;
            let rep = poisson_check(&ctx, &p, &cop, grid(g))?;
            Ok(Output::Json(with_context(Some(&ctx), prec, &rep)))
        }
        Command::Tv { pres, h2 } => {
            let (p, _) = load(pres)?;
            let ctx = new_ctx()?;
            let rep = tv_from_rt(&ctx, &p, *h2, grid(g))?;
            Ok(Output::Json(with_context(Some(&ctx), prec, &rep)))
        }
        Command::Tetvol { theta } => {
            let t: [f64; 6] = theta
                .as_slice()
                .try_into()
                .map_err(|_| Failure::Usage(format!("--theta needs 6 angles, got {}", theta.len())))?;
            let v = tet_volume(&t)?;
            Ok(Output::Json(with_context(None, prec, &v)))
        }
        Command::Critical { pres, theta, eps } => {
            let (p, cop) = load(pres)?;
            let t = angles(theta, p.n())?;
            let mut spec = PotentialSpec::from_cone_angles(&p, cop.as_ref(), &t)?;
            if let Some(e) = eps {
                if e.len() != spec.i_set.len() || e.iter().any(|x| x.abs() != 1) {
                    return Err(Failure::Usage(format!("--eps needs {} signs ±1", spec.i_set.len())));
                }
                spec = spec.with_eps(e);
            }
            let res = solve_critical(&spec)?;
            Ok(Output::Json(with_context(None, prec, &res)))
        }
        Command::Growth { pres, theta, branch, raw } => {
            let (p, cop) = load(pres)?;
            let t = angles(theta, p.n())?;
            let rs = levels(g)?;
            let opts = GrowthOptions { branch: *branch, precision: prec, grid: grid(g), correct_angles: !raw };
            let table = growth_series(&p, cop.as_ref(), &t, &rs, opts)?;
            if g.csv {
                Ok(Output::Csv(table.to_csv()))
            } else {
                Ok(Output::Json(with_context(None, prec, &table)))
            }
        }
        Command::Predict { pres, theta, branch } => {
            let (p, cop) = load(pres)?;
            let cop = require_cop(cop)?;
            let t = angles(theta, p.n())?;
            let ctx = new_ctx()?;
            let colors = crate::asympt::color_sequence(&t, *branch, ctx.r())?.colors;
            let cmp = compare_prediction(&ctx, &p, &cop, &colors, None, grid(g))?;
            Ok(Output::Json(with_context(Some(&ctx), prec, &cmp)))
        }
        Command::Report { pres, theta, branch } => {
            let (p, cop) = load(pres)?;
            let t = angles(theta, p.n())?;
            let rs = levels(g)?;
            let opts = GrowthOptions { branch: *branch, precision: prec, grid: grid(g), correct_angles: true };
            let rep = conjecture_report(&p, cop.as_ref(), &t, &rs, opts)?;
            Ok(Output::Json(with_context(None, prec, &rep)))
        }
        Command::Selftest { .. } => unreachable!("handled in dispatch"),
    }
}

fn table_output(g: &Global, ctx: &RootContext, prec: Precision, t: &TabulatedInvariant) -> Output {
    let k = t.axes.len();
    let mut colors = vec![0i64; k];
    let rows: Vec<(Vec<i64>, &LogComplex)> = t
        .values
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let mut rest = idx;
            for slot in colors.iter_mut().rev() {
                *slot = 2 * (rest % t.n_colors) as i64;
                rest /= t.n_colors;
            }
            (colors.clone(), v)
        })
        .collect();
    if g.csv {
        let mut s: String = t.axes.iter().map(|a| format!("m{},", a + 1)).collect();
        s.push_str("logmag,phase,re,im\n");
        for (c, v) in rows {
            let z = v.to_complex();
            for m in c {
                s.push_str(&format!("{m},"));
            }
            s.push_str(&format!("{:.15e},{:.15e},{:.15e},{:.15e}\n", v.logmag, v.phase, z.re, z.im));
        }
        Output::Csv(s)
    } else {
        let entries: Vec<Value> = rows
            .into_iter()
            .map(|(c, v)| {
                let mut e = log_json(v);
                e["colors"] = json!(c);
                e
            })
            .collect();
        let axes: Vec<usize> = t.axes.iter().map(|a| a + 1).collect();
        Output::Json(with_context(Some(ctx), prec, &json!({ "axes": axes, "entries": entries })))
    }
}
