mod germ;
mod output;
mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use linkforge::catalog;
use linkforge::certify::{
    certify_isolated_with, refute_isolated, CertifyOptions, IntervalBox, RefuteOptions,
};
use linkforge::cover::verify_cover;
use linkforge::knot::KnotOptions;
use linkforge::trace::{trace_link, TraceOptions, TracedLink};
use serde_json::json;

use output::{emit, read_json, with_schema, write_text};
use report::{knot_ok, knot_summary, run_report, trace_ok, RunConfig};

/// Exit status classes: verification failures exit 1, bad input exits 2.
pub enum Failure {
    Input(String),
    Verification(String),
}

#[derive(Parser)]
#[command(name = "linkforge", version, about = "Links of real isolated singularities and their cyclic branched covers")]
struct Cli {
    /// RNG seed shared by every randomized stage.
    #[arg(long, global = true, env = "LINKFORGE_SEED", default_value_t = 7)]
    seed: u64,
    /// Maximum number of worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GermArgs {
    /// Catalog name (see `linkforge catalog`) or a file holding `p1 ; p2`.
    germ: String,
    /// Read the file as one complex expression in z1, z2.
    #[arg(long)]
    complex: bool,
    /// Number of real variables of a file germ (inferred by default).
    #[arg(long)]
    nvars: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in germs with their expanded components.
    Catalog {
        #[arg(value_parser = ["list"])]
        action: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Parse and expand a map source.
    Parse {
        /// `p1 ; p2` in real mode, one complex expression with --complex.
        source: String,
        #[arg(long)]
        complex: bool,
        #[arg(long)]
        nvars: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Certify a rank-2 Jacobian on an annulus and search for counterexamples.
    Certify {
        #[command(flatten)]
        germ: GermArgs,
        /// Certify the suspension f + z^r instead.
        #[arg(long)]
        suspend: Option<u32>,
        #[arg(long, default_value = "0.05:0.2", value_parser = parse_annulus)]
        annulus: [f64; 2],
        #[arg(long, default_value_t = 12)]
        depth: u32,
        /// Stop refining once this fraction is certified.
        #[arg(long)]
        target: Option<f64>,
        /// Required certified fraction for exit status 0.
        #[arg(long, default_value_t = 0.999)]
        min_fraction: f64,
        /// Refuter samples; 0 disables the refuter.
        #[arg(long, default_value_t = 100_000)]
        refute_samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace the link on the sphere of radius eps.
    Trace {
        #[command(flatten)]
        germ: GermArgs,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// Largest accepted closure gap.
        #[arg(long, default_value_t = 1e-9)]
        closure_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diagram, Alexander polynomial and cover orders of a traced loop.
    Knot {
        #[arg(long)]
        link: PathBuf,
        /// Which component of the link to analyse.
        #[arg(long = "loop", default_value_t = 0)]
        component: usize,
        #[arg(short = 'r', long = "orders", value_delimiter = ',', default_value = "2,3,4,5,6")]
        orders: Vec<u32>,
        /// Projection pole `a,b,c,d` (chosen automatically by default).
        #[arg(long, value_delimiter = ',', num_args = 4)]
        pole: Option<Vec<f64>>,
        /// View direction `a,b,c` (random by default).
        #[arg(long, value_delimiter = ',', num_args = 3)]
        direction: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Check that the suspension's link covers the sphere r times.
    VerifyCover {
        #[command(flatten)]
        germ: GermArgs,
        #[arg(short = 'r', long)]
        r: u32,
        /// Traced link; traced afresh at --eps when absent.
        #[arg(long)]
        link: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every stage and write one JSON bundle.
    Report {
        #[command(flatten)]
        germ: GermArgs,
        #[arg(short = 'r', long = "orders", value_delimiter = ',', default_value = "2,3")]
        orders: Vec<u32>,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value = "0.05:0.2", value_parser = parse_annulus)]
        annulus: [f64; 2],
        #[arg(long, default_value_t = 12)]
        depth: u32,
        #[arg(long, default_value_t = 0.999)]
        min_fraction: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 100_000)]
        refute_samples: usize,
        #[arg(long, default_value_t = 1e-9)]
        closure_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Stage wall times, kept out of the bundle so it stays reproducible.
        #[arg(long)]
        timings: Option<PathBuf>,
    },
}

fn parse_annulus(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected inner:outer, got '{s}'"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("inner radius: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("outer radius: {e}"))?;
    if !(a > 0.0 && a < b && b.is_finite()) {
        return Err(format!("need 0 < inner < outer, got {a}:{b}"));
    }
    Ok([a, b])
}

fn check_orders(orders: &[u32]) -> Result<(), Failure> {
    if orders.is_empty() || orders.iter().any(|&r| r < 2) {
        return Err(Failure::Input(format!("cover orders must be >= 2, got {orders:?}")));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<(), Failure> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Failure::Input(format!("--{name} must be positive, got {v}")));
    }
    Ok(())
}

fn verdict(ok: bool, what: &str) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification(what.to_string()))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let seed = cli.seed;
    match cli.command {
        Command::Catalog { json, .. } => {
            let entries = catalog::entries();
            if json {
                let list: Vec<_> = entries
                    .iter()
                    .map(|m| {
                        json!({
                            "name": m.name(),
                            "components": m.components().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                emit(&with_schema(&json!({ "germs": list })), None)
            } else {
                let mut text = String::new();
                for m in &entries {
                    let [a, b] = m.components();
                    text.push_str(&format!("{}\n  f1 = {a}\n  f2 = {b}\n", m.name().unwrap_or("?")));
                }
                write_text(&text, None)
            }
        }
        Command::Parse {
            source,
            complex,
            nvars,
            json,
        } => {
            let m = germ::parse_source(&source, complex, nvars)?;
            if json {
                let [a, b] = m.components();
                emit(
                    &with_schema(&json!({
                        "nvars": m.nvars(),
                        "components": [a.to_string(), b.to_string()],
                        "degree": [a.total_degree(), b.total_degree()],
                    })),
                    None,
                )
            } else {
                write_text(&format!("{}\n", m.to_source()), None)
            }
        }
        Command::Certify {
            germ: g,
            suspend,
            annulus,
            depth,
            target,
            min_fraction,
            refute_samples,
            out,
        } => {
            let map = germ::suspended(germ::resolve(&g.germ, g.complex, g.nvars)?, suspend)?;
            let opts = CertifyOptions {
                max_depth: depth,
                target_fraction: target,
            };
            let rep = certify_isolated_with(&map, annulus[0], annulus[1], &opts)
                .map_err(|e| Failure::Input(format!("certify: {e}")))?;
            let witness = if refute_samples > 0 {
                let ropts = RefuteOptions {
                    samples: refute_samples,
                    seed,
                    annulus: Some(annulus),
                    ..RefuteOptions::default()
                };
                refute_isolated(&map, &IntervalBox::cube(map.nvars(), annulus[1]), &ropts)
                    .map_err(|e| Failure::Input(format!("refute: {e}")))?
            } else {
                None
            };
            let mut witnesses = rep.witnesses.clone();
            if let Some(w) = &witness {
                witnesses.push(w.point.clone());
            }
            let mut body = with_schema(&rep);
            body["witnesses"] = json!(witnesses);
            body["refute_witness"] = json!(witness);
            emit(&body, out.as_deref())?;
            let ok = !rep.refuted && witness.is_none() && rep.fraction_certified >= min_fraction;
            verdict(ok, "certify: isolation not certified")
        }
        Command::Trace {
            germ: g,
            eps,
            closure_tol,
            out,
        } => {
            check_positive("eps", eps)?;
            let map = germ::resolve(&g.germ, g.complex, g.nvars)?;
            let opts = TraceOptions {
                rng_seed: seed,
                ..TraceOptions::with_eps(eps)
            };
            let link = trace_link(&map, &opts).map_err(|e| Failure::Verification(format!("trace: {e}")))?;
            emit(&with_schema(&link), out.as_deref())?;
            verdict(trace_ok(&link, closure_tol), "trace: thresholds not met")
        }
        Command::Knot {
            link,
            component,
            orders,
            pole,
            direction,
            out,
            svg,
        } => {
            check_orders(&orders)?;
            let link: TracedLink = read_json(&link)?;
            let lp = link.loops.get(component).ok_or_else(|| {
                Failure::Input(format!("link has {} components, no component {component}", link.loops.len()))
            })?;
            let opts = KnotOptions {
                seed,
                cover_orders: orders,
                pole: pole.map(|p| [p[0], p[1], p[2], p[3]]),
                direction: direction.map(|d| [d[0], d[1], d[2]]),
                ..KnotOptions::default()
            };
            let (k, picture) =
                knot_summary(component, &lp.points, &opts).map_err(|e| Failure::Verification(format!("knot: {e}")))?;
            let mut body = with_schema(&k);
            body["germ"] = json!(link.germ);
            body["eps"] = json!(link.eps);
            body["components"] = json!(link.loops.len());
            emit(&body, out.as_deref())?;
            if let Some(p) = svg {
                write_text(&picture, Some(&p))?;
            }
            verdict(knot_ok(&k), "knot: Δ(1) ≠ ±1 or cover orders disagree")
        }
        Command::VerifyCover {
            germ: g,
            r,
            link,
            eps,
            samples,
            out,
        } => {
            check_orders(&[r])?;
            let map = germ::resolve(&g.germ, g.complex, g.nvars)?;
            let link: TracedLink = match link {
                Some(p) => read_json(&p)?,
                None => {
                    check_positive("eps", eps)?;
                    let opts = TraceOptions {
                        rng_seed: seed,
                        ..TraceOptions::with_eps(eps)
                    };
                    trace_link(&map, &opts).map_err(|e| Failure::Verification(format!("trace: {e}")))?
                }
            };
            let rep = verify_cover(&map, r, &link, samples, seed).map_err(|e| match e {
                linkforge::CoverError::Mismatch(m) => Failure::Input(format!("verify-cover: {m}")),
                other => Failure::Verification(format!("verify-cover: {other}")),
            })?;
            emit(&with_schema(&rep), out.as_deref())?;
            verdict(rep.passed, "verify-cover: thresholds not met")
        }
        Command::Report {
            germ: g,
            orders,
            eps,
            annulus,
            depth,
            min_fraction,
            samples,
            refute_samples,
            closure_tol,
            out,
            svg,
            timings,
        } => {
            check_orders(&orders)?;
            check_positive("eps", eps)?;
            check_positive("closure-tol", closure_tol)?;
            let map = germ::resolve(&g.germ, g.complex, g.nvars)?;
            let cfg = RunConfig {
                germ: g.germ.clone(),
                eps,
                orders,
                annulus,
                depth,
                min_fraction,
                samples,
                refute_samples,
                closure_tol,
                seed,
            };
            let outcome = run_report(&map, &cfg);
            emit(&with_schema(&outcome.bundle), out.as_deref())?;
            if let (Some(p), Some(text)) = (svg, &outcome.svg) {
                write_text(text, Some(&p))?;
            }
            if let Some(p) = timings {
                let t: BTreeMap<_, _> = outcome.timings_ms.iter().map(|(k, v)| (*k, *v as u64)).collect();
                emit(&with_schema(&json!({ "wall_ms": t })), Some(&p))?;
            }
            for e in &outcome.bundle.errors {
                eprintln!("{e}");
            }
            verdict(outcome.bundle.passed, "report: at least one stage failed")
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
