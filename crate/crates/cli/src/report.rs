use std::collections::BTreeMap;
use std::time::Instant;

use linkforge::certify::{
    certify_isolated_with, refute_isolated, CertifyOptions, IntervalBox, IsolationReport, RefuteOptions, Witness,
};
use linkforge::cover::{verify_cover, CoverReport};
use linkforge::knot::{analyze_loop, svg, CoverHomology, FoxOrder, KnotOptions, LaurentPoly, PDCode};
use linkforge::trace::{trace_link, TraceOptions, TracedLink};
use linkforge::PolyMap;
use serde::Serialize;

/// Largest accepted `|f|` at traced points.
pub const TRACE_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub germ: String,
    pub eps: f64,
    pub orders: Vec<u32>,
    pub annulus: [f64; 2],
    pub depth: u32,
    pub min_fraction: f64,
    pub samples: usize,
    pub refute_samples: usize,
    pub closure_tol: f64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Pass,
    Fail,
    Skipped,
}

impl Stage {
    fn from(ok: bool) -> Self {
        if ok {
            Stage::Pass
        } else {
            Stage::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KnotSummary {
    pub component: usize,
    pub crossings: usize,
    pub writhe: i64,
    pub pd: PDCode,
    pub alexander: LaurentPoly,
    pub label: String,
    pub statement: String,
    pub fox_orders: BTreeMap<u32, FoxOrder>,
    pub homology: Vec<CoverHomology>,
    pub pole: [f64; 4],
    pub direction: [f64; 3],
}

#[derive(Clone, Debug, Serialize)]
pub struct Bundle {
    pub germ: String,
    pub source: String,
    pub config: RunConfig,
    pub stages: BTreeMap<&'static str, Stage>,
    pub certify: Option<IsolationReport>,
    pub refute_witness: Option<Witness>,
    pub link: Option<TracedLink>,
    pub knots: Vec<KnotSummary>,
    pub covers: Vec<CoverReport>,
    pub label: Option<String>,
    pub fox_orders: BTreeMap<u32, FoxOrder>,
    pub errors: Vec<String>,
    pub passed: bool,
}

pub struct Outcome {
    pub bundle: Bundle,
    pub svg: Option<String>,
    pub timings_ms: BTreeMap<&'static str, u128>,
}

pub fn knot_summary(
    component: usize,
    points: &[[f64; 4]],
    opts: &KnotOptions,
) -> Result<(KnotSummary, String), String> {
    let rep = analyze_loop(points, opts).map_err(|e| e.to_string())?;
    let picture = svg::render(&rep.diagram);
    Ok((
        KnotSummary {
            component,
            crossings: rep.crossings,
            writhe: rep.writhe,
            pd: rep.diagram.pd.clone(),
            label: rep.identification.label(),
            statement: rep.identification.statement(),
            fox_orders: rep.covers.iter().map(|c| (c.r, c.order.clone())).collect(),
            homology: rep.covers.clone(),
            alexander: rep.alexander,
            pole: rep.pole,
            direction: rep.diagram.direction,
        },
        picture,
    ))
}

/// `Δ(1) = ±1` and every exact/float cover order pair agrees.
pub fn knot_ok(k: &KnotSummary) -> bool {
    k.alexander.unit_at_one() && k.homology.iter().all(|h| h.agree)
}

pub fn trace_ok(link: &TracedLink, closure_tol: f64) -> bool {
    !link.loops.is_empty()
        && link.min_singular_value > 0.0
        && link
            .loops
            .iter()
            .all(|l| l.closure_gap < closure_tol && l.residual_max < TRACE_RESIDUAL_TOL)
}

/// certify → trace → knot → suspend + verify-cover → cover orders.
pub fn run_report(map: &PolyMap, cfg: &RunConfig) -> Outcome {
    let mut stages = BTreeMap::new();
    let mut timings = BTreeMap::new();
    let mut errors = Vec::new();

    let t = Instant::now();
    let certify = match certify_isolated_with(
        map,
        cfg.annulus[0],
        cfg.annulus[1],
        &CertifyOptions {
            max_depth: cfg.depth,
            target_fraction: Some(cfg.min_fraction),
        },
    ) {
        Ok(mut rep) => {
            rep.wall_ms = None;
            stages.insert("certify", Stage::from(!rep.refuted && rep.fraction_certified >= cfg.min_fraction));
            Some(rep)
        }
        Err(e) => {
            errors.push(format!("certify: {e}"));
            stages.insert("certify", Stage::Fail);
            None
        }
    };
    timings.insert("certify", t.elapsed().as_millis());

    let t = Instant::now();
    let refute_witness = if cfg.refute_samples > 0 {
        let region = IntervalBox::cube(map.nvars(), cfg.annulus[1]);
        let opts = RefuteOptions {
            samples: cfg.refute_samples,
            seed: cfg.seed,
            annulus: Some(cfg.annulus),
            ..RefuteOptions::default()
        };
        match refute_isolated(map, &region, &opts) {
            Ok(w) => {
                stages.insert("refute", Stage::from(w.is_none()));
                w
            }
            Err(e) => {
                errors.push(format!("refute: {e}"));
                stages.insert("refute", Stage::Fail);
                None
            }
        }
    } else {
        stages.insert("refute", Stage::Skipped);
        None
    };
    timings.insert("refute", t.elapsed().as_millis());

    let t = Instant::now();
    let trace_opts = TraceOptions {
        rng_seed: cfg.seed,
        ..TraceOptions::with_eps(cfg.eps)
    };
    let link = match trace_link(map, &trace_opts) {
        Ok(l) => {
            stages.insert("trace", Stage::from(trace_ok(&l, cfg.closure_tol)));
            Some(l)
        }
        Err(e) => {
            errors.push(format!("trace: {e}"));
            stages.insert("trace", Stage::Fail);
            None
        }
    };
    timings.insert("trace", t.elapsed().as_millis());

    let t = Instant::now();
    let mut knots = Vec::new();
    let mut svg_text = None;
    if let Some(link) = &link {
        let opts = KnotOptions {
            seed: cfg.seed,
            cover_orders: cfg.orders.clone(),
            ..KnotOptions::default()
        };
        let mut ok = true;
        for (i, lp) in link.loops.iter().enumerate() {
            match knot_summary(i, &lp.points, &opts) {
                Ok((k, picture)) => {
                    ok &= knot_ok(&k);
                    if i == 0 {
                        svg_text = Some(picture);
                    }
                    knots.push(k);
                }
                Err(e) => {
                    errors.push(format!("knot: component {i}: {e}"));
                    ok = false;
                }
            }
        }
        stages.insert("knot", Stage::from(ok));
    } else {
        stages.insert("knot", Stage::Skipped);
    }
    timings.insert("knot", t.elapsed().as_millis());

    let t = Instant::now();
    let mut covers = Vec::new();
    if let Some(link) = &link {
        let mut ok = true;
        for &r in &cfg.orders {
            match verify_cover(map, r, link, cfg.samples, cfg.seed) {
                Ok(rep) => {
                    ok &= rep.passed;
                    covers.push(rep);
                }
                Err(e) => {
                    errors.push(format!("verify-cover: r = {r}: {e}"));
                    ok = false;
                }
            }
        }
        stages.insert("verify-cover", Stage::from(ok));
    } else {
        stages.insert("verify-cover", Stage::Skipped);
    }
    timings.insert("verify-cover", t.elapsed().as_millis());

    let (label, fox_orders) = match knots.as_slice() {
        [k] => (Some(k.label.clone()), k.fox_orders.clone()),
        [] => (None, BTreeMap::new()),
        many => (Some(format!("link with {} components", many.len())), BTreeMap::new()),
    };
    let passed = stages.values().all(|s| *s != Stage::Fail) && link.is_some();
    Outcome {
        bundle: Bundle {
            germ: cfg.germ.clone(),
            source: map.to_source(),
            config: cfg.clone(),
            stages,
            certify,
            refute_witness,
            link,
            knots,
            covers,
            label,
            fox_orders,
            errors,
            passed,
        },
        svg: svg_text,
        timings_ms: timings,
    }
}
