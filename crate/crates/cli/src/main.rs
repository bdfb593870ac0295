mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ielc_core::hilbert::{check_hilbert, hilbert_to_nd, nd_to_hilbert};
use ielc_core::kripke::{countermodel_search, forces, validate_model_with};
use ielc_core::metaprops::{disjunction_split, reflection_extract, weak_dp, PropsError};
use ielc_core::parse::{parse_context, parse_formula, parse_hilbert, parse_model, parse_term};
use ielc_core::reduce::{normalize_with, NormalizeOptions, DEFAULT_MAX_STEPS};
use ielc_core::stlc::{erase_context, stlc_check};
use ielc_core::{
    erase_formula, erase_term, infer, selftest, Context, Formula, FrameCondition, Mode, Strategy,
    Term,
};

use report::{Report, Status};

#[derive(Parser)]
#[command(name = "ielc", version, about = "Proof kernel for the intuitionistic logic of belief")]
struct Cli {
    /// Emit one JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a file and print it back in canonical form.
    Parse {
        #[arg(long, value_enum)]
        kind: Kind,
        file: PathBuf,
    },
    /// Infer the formula a term proves.
    Check {
        file: PathBuf,
        #[command(flatten)]
        ctx: CtxArg,
    },
    /// Typecheck, then reduce to normal form.
    Normalize {
        file: PathBuf,
        #[command(flatten)]
        ctx: CtxArg,
        /// Print every step.
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Default)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = StrategyArg::Lo)]
        strategy: StrategyArg,
    },
    /// Translate a formula or a term into the simply typed target.
    Erase {
        file: PathBuf,
        #[arg(long, conflicts_with = "term", required_unless_present = "term")]
        formula: bool,
        #[arg(long)]
        term: bool,
        #[command(flatten)]
        ctx: CtxArg,
    },
    /// Move between Hilbert proofs and proof terms.
    Translate {
        #[arg(long, value_name = "FILE", conflicts_with = "to_hilbert", required_unless_present = "to_hilbert")]
        to_nd: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        to_hilbert: Option<PathBuf>,
        #[command(flatten)]
        ctx: CtxArg,
    },
    /// Evaluate a formula in a Kripke model.
    Kripke {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        /// A formula file, or the formula itself.
        #[arg(long)]
        formula: String,
        #[arg(long)]
        world: Option<String>,
        #[arg(long, value_enum, default_value_t = FrameArg::Default)]
        frame: FrameArg,
    },
    /// Check a model against the frame conditions.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = FrameArg::Default)]
        frame: FrameArg,
    },
    /// Search all valid models up to a size for one refuting a formula.
    Countermodel {
        /// A formula file, or the formula itself.
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=5))]
        max_worlds: u8,
        #[arg(long, value_enum, default_value_t = FrameArg::Default)]
        frame: FrameArg,
    },
    /// Extract witnesses from closed proofs.
    Props {
        #[command(flatten)]
        which: PropsArg,
        file: PathBuf,
    },
    /// Run the randomized property suites.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
}

#[derive(Args)]
struct CtxArg {
    /// Typing context, `x:F, y:G`.
    #[arg(long, value_name = "CTX")]
    ctx: Option<String>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct PropsArg {
    /// Disjunction property.
    #[arg(long)]
    dp: bool,
    /// Reflection rule.
    #[arg(long)]
    reflect: bool,
    /// Weak disjunction property.
    #[arg(long)]
    weak_dp: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Formula,
    Term,
    Hilbert,
    Model,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Default,
    Perm,
    Eta,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    /// Leftmost-outermost.
    Lo,
    /// Rightmost-innermost.
    Ri,
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameArg {
    Default,
    PaperLiteral,
}

impl From<FrameArg> for FrameCondition {
    fn from(f: FrameArg) -> Self {
        match f {
            FrameArg::Default => FrameCondition::Default,
            FrameArg::PaperLiteral => FrameCondition::PaperLiteral,
        }
    }
}

type Step<T> = Result<T, Report>;

fn read(path: &Path) -> Step<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Report::error(format!("cannot read {}: {e}", path.display())))
}

fn syntax<T, E: std::fmt::Display>(what: &str, r: Result<T, E>) -> Step<T> {
    r.map_err(|e| Report::error(format!("{what}: {e}")))
}

fn term_file(path: &Path) -> Step<Term> {
    let src = read(path)?;
    syntax(&path.display().to_string(), parse_term(&src))
}

/// A path if one exists, otherwise the argument is taken as the formula.
fn formula_arg(arg: &str) -> Step<Formula> {
    let path = Path::new(arg);
    if path.is_file() {
        let src = read(path)?;
        syntax(arg, parse_formula(&src))
    } else {
        syntax("formula", parse_formula(arg))
    }
}

fn context(arg: &CtxArg) -> Step<Context> {
    match &arg.ctx {
        None => Ok(Context::new()),
        Some(text) => syntax("context", parse_context(text)),
    }
}

fn typed(ctx: &Context, t: &Term) -> Step<Formula> {
    infer(ctx, t).map_err(|e| Report::negative(format!("{}: {e}", e.kind())))
}

fn run(command: Command) -> Step<Report> {
    match command {
        Command::Parse { kind, file } => {
            let src = read(&file)?;
            let name = file.display().to_string();
            let printed = match kind {
                Kind::Formula => syntax(&name, parse_formula(&src))?.to_string(),
                Kind::Term => syntax(&name, parse_term(&src))?.to_string(),
                Kind::Hilbert => syntax(&name, parse_hilbert(&src))?.to_string(),
                Kind::Model => syntax(&name, parse_model(&src))?.to_string(),
            };
            Ok(Report::ok(printed.trim_end(), json!({ "printed": printed })))
        }
        Command::Check { file, ctx } => {
            let t = term_file(&file)?;
            let a = typed(&context(&ctx)?, &t)?;
            Ok(Report::ok(a.to_string(), json!({ "formula": a.to_string() })))
        }
        Command::Normalize {
            file,
            ctx,
            trace,
            max_steps,
            mode,
            strategy,
        } => {
            let t = term_file(&file)?;
            let a = typed(&context(&ctx)?, &t)?;
            let opts = NormalizeOptions {
                strategy: match strategy {
                    StrategyArg::Lo => Strategy::LeftmostOutermost,
                    StrategyArg::Ri => Strategy::RightmostInnermost,
                },
                mode: match mode {
                    ModeArg::Default => Mode::Default,
                    ModeArg::Perm => Mode::Perm,
                    ModeArg::Eta => Mode::Eta,
                },
                max_steps,
            };
            let (nf, steps) = normalize_with(&t, &opts).map_err(|e| {
                Report::error(e.to_string()).with_trace(report::trace_json(&e.trace))
            })?;
            let mut text = String::new();
            if trace {
                text.push_str(&steps.to_string());
            }
            text.push_str(&format!("{nf}\n: {a}"));
            let mut r = Report::ok(
                text,
                json!({ "normal_form": nf.to_string(), "formula": a.to_string(), "steps": steps.steps.len() }),
            );
            if trace {
                r = r.with_trace(report::trace_json(&steps));
            }
            Ok(r)
        }
        Command::Erase {
            file,
            formula,
            ctx,
            ..
        } => {
            let src = read(&file)?;
            let name = file.display().to_string();
            if formula {
                let e = erase_formula(&syntax(&name, parse_formula(&src))?);
                return Ok(Report::ok(e.to_string(), json!({ "type": e.to_string() })));
            }
            let t = syntax(&name, parse_term(&src))?;
            let ctx = context(&ctx)?;
            let a = typed(&ctx, &t)?;
            let (e, ty) = (erase_term(&t), erase_formula(&a));
            stlc_check(&erase_context(&ctx), &e, &ty)
                .map_err(|err| Report::error(format!("erased term does not typecheck: {err}")))?;
            Ok(Report::ok(
                format!("{e}\n: {ty}"),
                json!({ "term": e.to_string(), "type": ty.to_string() }),
            ))
        }
        Command::Translate { to_nd, to_hilbert, ctx } => {
            if let Some(path) = to_nd {
                let src = read(&path)?;
                let p = syntax(&path.display().to_string(), parse_hilbert(&src))?;
                check_hilbert(&p).map_err(|e| Report::negative(e.to_string()))?;
                let t = hilbert_to_nd(&p).map_err(|e| Report::negative(e.to_string()))?;
                let hyps = p.hyp_context();
                let a = typed(&hyps, &t)?;
                let ctx_text = hyps
                    .iter()
                    .map(|(n, f)| format!("{n}:{f}"))
                    .collect::<Vec<_>>()
                    .join(", ");
                let text = if ctx_text.is_empty() {
                    format!("{t}\n: {a}")
                } else {
                    format!("{t}\n: {a}\nin {ctx_text}")
                };
                return Ok(Report::ok(
                    text,
                    json!({ "term": t.to_string(), "formula": a.to_string(), "context": ctx_text }),
                ));
            }
            let path = to_hilbert.expect("clap requires one of the two");
            let t = term_file(&path)?;
            let ctx = context(&ctx)?;
            typed(&ctx, &t)?;
            let p = nd_to_hilbert(&t, &ctx).map_err(|e| Report::negative(e.to_string()))?;
            let a = check_hilbert(&p)
                .map_err(|e| Report::error(format!("translated proof does not check: {e}")))?;
            Ok(Report::ok(
                p.to_string().trim_end(),
                json!({ "proof": p.to_string(), "conclusion": a.to_string(), "lines": p.lines.len() }),
            ))
        }
        Command::Kripke {
            model,
            formula,
            world,
            frame,
        } => {
            let src = read(&model)?;
            let m = syntax(&model.display().to_string(), parse_model(&src))?;
            let f = formula_arg(&formula)?;
            let violations = validate_model_with(&m, frame.into());
            if !violations.is_empty() {
                return Err(report::invalid_model(&violations));
            }
            if let Some(w) = world {
                let holds = forces(&m, &w, &f).map_err(|e| Report::error(e.to_string()))?;
                let text = format!("{w} {} {f}", if holds { "forces" } else { "does not force" });
                let result = json!({ "world": w, "forces": holds });
                return Ok(if holds {
                    Report::ok(text, result)
                } else {
                    Report::negative_with(text, result)
                });
            }
            let forcing: Vec<String> = (0..m.len())
                .filter(|&w| m.forces_at(w, &f))
                .map(|w| m.world_name(w).to_string())
                .collect();
            let valid = forcing.len() == m.len();
            let text = format!(
                "{} in the model; forced at: {}",
                if valid { "valid" } else { "not valid" },
                if forcing.is_empty() { "none".to_string() } else { forcing.join(" ") }
            );
            let result = json!({ "valid": valid, "forced_at": forcing });
            Ok(if valid {
                Report::ok(text, result)
            } else {
                Report::negative_with(text, result)
            })
        }
        Command::Validate { file, frame } => {
            let src = read(&file)?;
            let m = syntax(&file.display().to_string(), parse_model(&src))?;
            let violations = validate_model_with(&m, frame.into());
            if violations.is_empty() {
                Ok(Report::ok("valid", json!({ "valid": true, "violations": [] })))
            } else {
                Err(report::invalid_model(&violations))
            }
        }
        Command::Countermodel {
            formula,
            max_worlds,
            frame,
        } => {
            let f = formula_arg(&formula)?;
            match countermodel_search(&f, max_worlds.into(), frame.into()) {
                Some((m, w)) => {
                    let world = m.world_name(w).to_string();
                    Ok(Report::ok(
                        format!("{m}-- refuted at {world}"),
                        json!({ "model": m.to_string(), "world": world, "worlds": m.len() }),
                    ))
                }
                None => Ok(Report::negative_with(
                    format!("no countermodel with at most {max_worlds} worlds"),
                    json!({ "model": null }),
                )),
            }
        }
        Command::Props { which, file } => {
            let t = term_file(&file)?;
            typed(&Context::new(), &t)?;
            let fail = |e: PropsError| match e {
                PropsError::Budget(_) => Report::error(e.to_string()),
                other => Report::negative(other.to_string()),
            };
            let (side, w) = if which.reflect {
                (None, reflection_extract(&t).map_err(fail)?)
            } else if which.dp {
                let (s, w) = disjunction_split(&t).map_err(fail)?;
                (Some(s), w)
            } else {
                let (s, w) = weak_dp(&t).map_err(fail)?;
                (Some(s), w)
            };
            let a = infer(&Context::new(), &w)
                .map_err(|e| Report::error(format!("witness does not re-check: {e}")))?;
            let mut text = String::new();
            if let Some(s) = side {
                text.push_str(&format!("{s}\n"));
            }
            text.push_str(&format!("{w}\n: {a}"));
            Ok(Report::ok(
                text,
                json!({ "side": side.map(|s| s.to_string()), "witness": w.to_string(), "formula": a.to_string() }),
            ))
        }
        Command::Selftest { seed, count } => {
            let reports = selftest::run_all(seed, count);
            let text = reports.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n");
            let result = json!(reports
                .iter()
                .map(|r| json!({ "suite": r.name, "passed": r.passed, "total": r.total, "failures": r.failures }))
                .collect::<Vec<_>>());
            Ok(if reports.iter().all(|r| r.ok()) {
                Report::ok(text, result)
            } else {
                Report::negative_with(text, result)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = run(cli.command).unwrap_or_else(|r| r);
    report.emit(cli.json);
    ExitCode::from(match report.status {
        Status::Ok => 0,
        Status::Error => 1,
        Status::Negative => 2,
    })
}
