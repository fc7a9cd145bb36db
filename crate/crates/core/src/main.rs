//! Command-line interface for the minionlab library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value as Json};

use minionlab::analysis::{self, GrowthProfile};
use minionlab::catalog;
use minionlab::construct;
use minionlab::error::Error;
use minionlab::homsearch::{self, HomWitness, Verdict};
use minionlab::minion::{Minion, Rep};
use minionlab::presented::pp_parse;
use minionlab::specfile;

#[derive(Parser)]
#[command(name = "minionlab", version, about = "Exact computation with finite minions")]
struct Cli {
    /// Largest arity materialized by arity-sweeping commands.
    #[arg(long, global = true, default_value_t = 4)]
    max_arity: usize,

    /// Hard cap on the number of elements materialized per arity.
    #[arg(long, global = true, default_value_t = 1 << 20)]
    element_budget: usize,

    /// Seed recorded in reports (all computations are deterministic).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Emit a plain-text report (the default).
    #[arg(long, global = true)]
    text: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Element counts, constants, and basic diagnostics of a minion.
    Info { minion: String },
    /// Decide or bound the existence of a homomorphism.
    Hom {
        source: String,
        target: String,
        /// Enumerate all homomorphisms (finitely generated sources only).
        #[arg(long)]
        enumerate: bool,
    },
    /// Compare two minions in both directions.
    Equiv { a: String, b: String },
    /// Compute the core of a minion up to the arity bound.
    Core { minion: String },
    /// Element counts of the exponential base^exponent.
    Exp { base: String, exponent: String },
    /// Subtraction: the components of the left minion not mapping to the right.
    Sub { left: String, right: String },
    /// Pairwise comparison of several minions, with a DOT digraph.
    Order {
        minions: Vec<String>,
        /// Write the DOT digraph to this file instead of the report.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Test a pp-sentence (a minor condition) against a minion.
    Pp { sentence: String, minion: String },
    /// Growth profile: element and nondegenerate-element counts per arity.
    Growth {
        minion: String,
        /// Horizon for the growth tables (defaults to --max-arity).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Run the built-in self-check suite.
    Check,
}

fn exit_code_for(e: &Error) -> ExitCode {
    match e {
        Error::Parse { .. } | Error::Invalid(_) | Error::Unsupported(_) => ExitCode::from(2),
        Error::Budget { .. } | Error::Cutoff { .. } | Error::Unknown { .. } => ExitCode::from(3),
        _ => ExitCode::from(1),
    }
}

struct Ctx {
    max_arity: usize,
    budget: usize,
    seed: u64,
    json: bool,
}

impl Ctx {
    fn load(&self, name: &str) -> Result<Minion, Error> {
        let cwd = std::env::current_dir()
            .map_err(|e| Error::Invalid(format!("cannot resolve working directory: {e}")))?;
        Ok(specfile::load_operand(name, &cwd, self.max_arity)?.with_budget(self.budget))
    }

    fn emit(&self, command: &str, body: Json, text: String) {
        use std::io::Write;
        let mut out = std::io::stdout();
        if self.json {
            let mut obj = serde_json::Map::new();
            obj.insert("schema".into(), json!(1));
            obj.insert("command".into(), json!(command));
            obj.insert("seed".into(), json!(self.seed));
            obj.insert("max_arity".into(), json!(self.max_arity));
            if let Json::Object(map) = body {
                for (k, v) in map {
                    obj.insert(k, v);
                }
            }
            let rendered =
                serde_json::to_string_pretty(&Json::Object(obj)).expect("serializable");
            let _ = writeln!(out, "{rendered}");
        } else {
            let _ = writeln!(out, "{text}");
        }
    }
}

fn display_name(m: &Minion, fallback: &str) -> String {
    m.name().unwrap_or(fallback).to_string()
}

fn counts(m: &Minion, up_to: usize) -> Result<Vec<usize>, Error> {
    (1..=up_to).map(|n| m.count(n)).collect()
}

fn witness_json(w: &HomWitness) -> Json {
    match w {
        HomWitness::Assignment(images) => json!({
            "kind": "assignment",
            "images": images.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>(),
        }),
        HomWitness::Family { bound, maps } => json!({
            "kind": "family",
            "bound": bound,
            "maps": maps,
        }),
    }
}

fn verdict_json(v: &Verdict) -> Json {
    match v {
        Verdict::Yes(w) => json!({"verdict": "yes", "witness": witness_json(w)}),
        Verdict::No { certificate } => json!({"verdict": "no", "certificate": certificate}),
        Verdict::Unknown { bound, context } => {
            json!({"verdict": "unknown", "bound": bound, "context": context})
        }
    }
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Yes(HomWitness::Assignment(_)) => "yes (exact witness)".into(),
        Verdict::Yes(HomWitness::Family { bound, .. }) => {
            format!("yes (family witness up to arity {bound})")
        }
        Verdict::No { certificate } => format!("no ({certificate})"),
        Verdict::Unknown { bound, context } => format!("unknown at bound {bound} ({context})"),
    }
}

fn run(ctx: &Ctx, cmd: &Command) -> Result<Option<ExitCode>, Error> {
    match cmd {
        Command::Info { minion } => {
            let m = ctx.load(minion)?;
            let name = display_name(&m, minion);
            let cs = counts(&m, ctx.max_arity)?;
            let consts = analysis::constants_per_arity(&m, ctx.max_arity)?;
            let ess = analysis::essential_arity(&m).ok();
            let profile = analysis::growth(&m, ctx.max_arity)?;
            // cheap representability probe at small arities only
            let witness = (1..=ctx.max_arity.min(2)).find_map(|n| {
                analysis::is_n_representable(&m, n, ctx.max_arity)
                    .ok()
                    .flatten()
            });
            let mut text = format!("minion: {name}\n");
            text += &format!("counts (arity 1..{}): {cs:?}\n", ctx.max_arity);
            text += &format!("alpha (with n=0 constants slot): {:?}\n", profile.alpha);
            text += &format!("gamma: {:?}\n", profile.gamma);
            text += &format!("constants per arity: {consts:?}\n");
            match &witness {
                Some(w) => text += &format!("representable: n={}, k={}\n", w.n, w.k),
                None => text += "representable: no witness found at n <= 2\n",
            }
            match ess {
                Some(e) => text += &format!("essential arity: {e}"),
                None => text += "essential arity: n/a (needs a finite presentation)",
            }
            ctx.emit(
                "info",
                json!({
                    "minion": name,
                    "counts": cs,
                    "alpha": profile.alpha,
                    "gamma": profile.gamma,
                    "constants": consts,
                    "essential_arity": ess,
                    "representable": witness.map(|w| json!({"n": w.n, "k": w.k})),
                }),
                text,
            );
            Ok(None)
        }
        Command::Hom { source, target, enumerate } => {
            let s = ctx.load(source)?;
            let t = ctx.load(target)?;
            let sn = display_name(&s, source);
            let tn = display_name(&t, target);
            if *enumerate {
                let all = homsearch::hom_enumerate(&s, &t)?;
                let text = format!("hom({sn}, {tn}): {} homomorphisms", all.len());
                ctx.emit(
                    "hom",
                    json!({
                        "source": sn,
                        "target": tn,
                        "count": all.len(),
                        "witnesses": all.iter().map(witness_json).collect::<Vec<_>>(),
                    }),
                    text,
                );
                Ok(None)
            } else {
                let v = homsearch::hom(&s, &t, ctx.max_arity)?;
                let code = matches!(v, Verdict::Unknown { .. }).then(|| ExitCode::from(3));
                let text = format!("hom({sn}, {tn}): {}", verdict_text(&v));
                ctx.emit(
                    "hom",
                    merge(json!({"source": sn, "target": tn}), verdict_json(&v)),
                    text,
                );
                Ok(code)
            }
        }
        Command::Equiv { a, b } => {
            let ma = ctx.load(a)?;
            let mb = ctx.load(b)?;
            let an = display_name(&ma, a);
            let bn = display_name(&mb, b);
            let (fwd, back) = homsearch::hom_equivalent(&ma, &mb, ctx.max_arity)?;
            let equivalent = fwd.is_yes() && back.is_yes();
            let unknown = matches!(fwd, Verdict::Unknown { .. })
                || matches!(back, Verdict::Unknown { .. });
            let text = format!(
                "{an} -> {bn}: {}\n{bn} -> {an}: {}\nequivalent: {}",
                verdict_text(&fwd),
                verdict_text(&back),
                if equivalent { "yes" } else if unknown { "unknown" } else { "no" },
            );
            ctx.emit(
                "equiv",
                json!({
                    "a": an,
                    "b": bn,
                    "forward": verdict_json(&fwd),
                    "backward": verdict_json(&back),
                    "equivalent": if equivalent { "yes" } else if unknown { "unknown" } else { "no" },
                }),
                text,
            );
            Ok(unknown.then(|| ExitCode::from(3)))
        }
        Command::Core { minion } => {
            let m = ctx.load(minion)?;
            let name = display_name(&m, minion);
            let res = homsearch::core(&m, ctx.max_arity)?;
            let cs = counts(&res.core, res.bound)?;
            let orig = counts(&m, res.bound)?;
            let text = format!(
                "minion: {name}\ncounts: {orig:?}\ncore counts: {cs:?}\nbound: {}\ntruncation-relative: {}",
                res.bound, res.flagged
            );
            ctx.emit(
                "core",
                json!({
                    "minion": name,
                    "counts": orig,
                    "core_counts": cs,
                    "bound": res.bound,
                    "flagged": res.flagged,
                    "retraction": res.retraction,
                }),
                text,
            );
            Ok(None)
        }
        Command::Exp { base, exponent } => {
            let b = ctx.load(base)?;
            let e = ctx.load(exponent)?;
            let bn = display_name(&b, base);
            let en = display_name(&e, exponent);
            let Rep::Presented(pm) = e.rep() else {
                return Err(Error::Unsupported(
                    "exponents must be finitely presented".into(),
                ));
            };
            let pow = Minion::exponential(&b, pm.presentation().clone()).with_budget(ctx.budget);
            let cs = counts(&pow, ctx.max_arity)?;
            let text = format!("{bn}^{en} counts (arity 1..{}): {cs:?}", ctx.max_arity);
            ctx.emit(
                "exp",
                json!({"base": bn, "exponent": en, "counts": cs}),
                text,
            );
            Ok(None)
        }
        Command::Sub { left, right } => {
            let l = ctx.load(left)?;
            let r = ctx.load(right)?;
            let ln = display_name(&l, left);
            let rn = display_name(&r, right);
            let d = construct::subtract(&l, &r, ctx.max_arity)?;
            let cs = counts(&d, ctx.max_arity)?;
            let kept = d.count(1)?;
            let total = l.count(1)?;
            let text = format!(
                "{ln} \\ {rn}: kept {kept} of {total} components\ncounts (arity 1..{}): {cs:?}",
                ctx.max_arity
            );
            ctx.emit(
                "sub",
                json!({
                    "left": ln,
                    "right": rn,
                    "components_kept": kept,
                    "components_total": total,
                    "counts": cs,
                }),
                text,
            );
            Ok(None)
        }
        Command::Order { minions, dot } => {
            if minions.len() < 2 {
                return Err(Error::Invalid("order needs at least two minions".into()));
            }
            let mut entries = Vec::new();
            for name in minions {
                let m = ctx.load(name)?;
                let dn = display_name(&m, name);
                entries.push((dn, m));
            }
            let report = homsearch::order_compare(&entries, ctx.max_arity)?;
            if let Some(path) = dot {
                std::fs::write(path, &report.dot)
                    .map_err(|e| Error::Invalid(format!("cannot write DOT file: {e}")))?;
            }
            let mut text = String::new();
            for (i, n) in report.names.iter().enumerate() {
                text += &format!("{n}: {}\n", report.matrix[i].join(" "));
            }
            if dot.is_none() {
                text += &report.dot;
            }
            let unknown = report
                .matrix
                .iter()
                .any(|row| row.iter().any(|&c| c == "unknown"));
            ctx.emit(
                "order",
                json!({
                    "names": report.names,
                    "matrix": report.matrix,
                    "dot": report.dot,
                }),
                text.trim_end().to_string(),
            );
            Ok(unknown.then(|| ExitCode::from(3)))
        }
        Command::Pp { sentence, minion } => {
            let m = ctx.load(minion)?;
            let name = display_name(&m, minion);
            // resolve a named condition, else parse as a sentence
            let resolved = catalog::named_conditions()
                .into_iter()
                .find(|(n, _)| *n == sentence.as_str())
                .map(|(_, s)| s)
                .unwrap_or_else(|| sentence.clone());
            pp_parse(&resolved)?;
            let v = homsearch::satisfies_pp(&m, &resolved)?;
            let text = format!("{name} satisfies `{resolved}`: {}", verdict_text(&v));
            ctx.emit(
                "pp",
                merge(json!({"minion": name, "sentence": resolved}), verdict_json(&v)),
                text,
            );
            Ok(matches!(v, Verdict::Unknown { .. }).then(|| ExitCode::from(3)))
        }
        Command::Growth { minion, n } => {
            let m = ctx.load(minion)?;
            let name = display_name(&m, minion);
            let horizon = n.unwrap_or(ctx.max_arity).max(1);
            let profile: GrowthProfile = analysis::growth(&m, horizon)?;
            let dich = analysis::dichotomy_probe(&m, &profile);
            let text = format!(
                "minion: {name}\nalpha: {:?}\ngamma: {:?}\nclassification: {} ({})",
                profile.alpha,
                profile.gamma,
                dich.classification,
                if dich.exact { "exact" } else { "heuristic" },
            );
            ctx.emit(
                "growth",
                json!({
                    "minion": name,
                    "alpha": profile.alpha,
                    "gamma": profile.gamma,
                    "classification": dich.classification,
                    "exact": dich.exact,
                }),
                text,
            );
            Ok(None)
        }
        Command::Check => {
            let mut rows = Vec::new();
            let mut ok = true;
            let mut check = |name: &str, pass: Result<bool, Error>| {
                let status = match pass {
                    Ok(true) => "pass",
                    Ok(false) => {
                        ok = false;
                        "FAIL"
                    }
                    Err(_) => {
                        ok = false;
                        "ERROR"
                    }
                };
                rows.push((name.to_string(), status));
            };
            check("projection-counts", (|| {
                Ok(counts(&catalog::p(), 4)? == vec![1, 2, 3, 4])
            })());
            check("terminal-counts", (|| {
                Ok(counts(&catalog::star(), 4)? == vec![1, 1, 1, 1])
            })());
            check("idempotent-binary-count", (|| {
                Ok(catalog::j(2)?.count(2)? == 4)
            })());
            check("cosieve-counts", (|| {
                let om = catalog::omega(2, ctx.budget)?;
                Ok(om.count(1)? == 2 && om.count(2)? == 3)
            })());
            check("terminal-is-top", (|| {
                Ok(homsearch::hom(&catalog::c2(), &catalog::star(), ctx.max_arity)?.is_yes())
            })());
            check("projection-is-bottom", (|| {
                Ok(homsearch::hom(&catalog::p(), &catalog::c2(), ctx.max_arity)?.is_yes())
            })());
            let mut text = String::new();
            for (name, status) in &rows {
                text += &format!("{status}  {name}\n");
            }
            text += if ok { "self-check: ok" } else { "self-check: FAILED" };
            ctx.emit(
                "check",
                json!({
                    "checks": rows
                        .iter()
                        .map(|(n, s)| json!({"name": n, "status": s}))
                        .collect::<Vec<_>>(),
                    "ok": ok,
                }),
                text,
            );
            Ok((!ok).then(|| ExitCode::from(1)))
        }
    }
}

fn merge(a: Json, b: Json) -> Json {
    let (Json::Object(mut ma), Json::Object(mb)) = (a, b) else {
        unreachable!("merge arguments are objects")
    };
    ma.extend(mb);
    Json::Object(ma)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        max_arity: cli.max_arity.max(1),
        budget: cli.element_budget,
        seed: cli.seed,
        json: cli.json && !cli.text,
    };
    match run(&ctx, &cli.command) {
        Ok(Some(code)) => code,
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
