//! One function per mode. Each prints a summary line and returns whether
//! every check it ran passed.

use std::path::Path;

use anyhow::{anyhow, Context, Result};
use schmidt_core::black::{RandomBlack, TargetMode, Targeting};
use schmidt_core::diophantine::{
    badness_scan, dani_cross_check, finite_certificate, trajectory_minima, AffineSystem, BadnessEstimate,
};
use schmidt_core::fractal::{verify_absolute_decay, Verdict};
use schmidt_core::game::{
    limit_point, run_game, validate_transcript, Fixed, GameParams, Player, Recenter, Replay, Strategy, Transcript,
};
use schmidt_core::lattice::{enumerate_small_hyperplanes, FlowSchedule};
use schmidt_core::white::{
    bad_inf_verify, matrix_from_point, BadA, BadAOptions, BadAState, BadB, BadInfVerdict, Greedy,
};
use schmidt_core::{Scalar, Vector};
use serde::Serialize;
use serde_json::{json, Value};

use crate::artifact::{Header, Writer};
use crate::config::{ConfigError, Mode, Overrides, RawConfig, RunConfig, WhiteKind};

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn run(cfg: &RunConfig) -> Result<bool> {
    let w = Writer::new(&cfg.out)?;
    match cfg.mode {
        Mode::Play => play(cfg, &w),
        Mode::ScanBadness => scan(cfg, &w),
        Mode::Trajectory => trajectory(cfg, &w),
        Mode::Hyperplanes => hyperplanes(cfg, &w),
        Mode::VerifyDecay => verify_decay(cfg, &w),
        Mode::Demo => demo(cfg),
    }
}

fn system(cfg: &RunConfig) -> Result<AffineSystem> {
    let a = cfg.a.clone().ok_or_else(|| anyhow!("A is required"))?;
    let b = cfg.b.clone().unwrap_or_else(|| Vector::zeros(cfg.m));
    Ok(AffineSystem::new(a, b)?)
}

fn scan(cfg: &RunConfig, w: &Writer) -> Result<bool> {
    let s = system(cfg)?;
    let e = badness_scan(&s, cfg.scan_q);
    let path = w.json(
        "badness.json",
        &Header::new(cfg, "scan-badness"),
        vec![("system", json!({"A": s.a, "b": s.b})), ("estimate", json!(e))],
    )?;
    println!(
        "scan-badness: Q = {}, min_product = {} ({:.10}) at q = {:?}, {} windows -> {}",
        e.q_max,
        e.min_product,
        e.min_product.to_f64(),
        e.argmin_q,
        e.window_minima.len(),
        path.display()
    );
    Ok(true)
}

fn trajectory(cfg: &RunConfig, w: &Writer) -> Result<bool> {
    let s = system(cfg)?;
    let (f, l) = &cfg.trajectory;
    let r = trajectory_minima(&s, f, *l)?;
    let header = Header::new(cfg, "trajectory");
    let path = w.csv("trajectory.csv", &header, &r.to_csv())?;
    let mut ok = true;
    let mut extra = String::new();
    if let Some(q) = cfg.cross_check {
        let d = dani_cross_check(&s, f, *l, q)?;
        ok = d.pass;
        w.json("dani.json", &header, vec![("report", json!(d))])?;
        extra = format!(", cross-check with Q = {q}: {}", pass_fail(d.pass));
    }
    println!(
        "trajectory: L = {l}, u = {}, infimum {} ({:.6e}) at ell = {}, trend {:?}{extra} -> {}",
        f.u,
        r.infimum,
        r.infimum.to_f64(),
        r.infimum_ell,
        r.trend,
        path.display()
    );
    Ok(ok)
}

fn hyperplanes(cfg: &RunConfig, w: &Writer) -> Result<bool> {
    let s = system(cfg)?;
    let (f, step, bound) = &cfg.hyperplanes;
    let k = cfg.m + cfg.n;
    let bound = bound.clone().unwrap_or_else(|| Scalar::from_int(k as i64));
    let l = f.flow_lattice(*step, &s.homogeneous_lattice());
    let hs = enumerate_small_hyperplanes(&l, &bound)?;
    let list: Vec<Value> = hs
        .iter()
        .map(|h| {
            json!({
                "dual_vector": h.dual_vector,
                "covolume_sq": h.covolume_sq,
                "contains_time_space": h.dual_vector.time(cfg.m).is_zero(),
            })
        })
        .collect();
    let path = w.json(
        "hyperplanes.json",
        &Header::new(cfg, "hyperplanes"),
        vec![
            ("u", json!(f.u)),
            ("step", json!(step)),
            ("bound_sq", json!(bound)),
            ("basis", json!(l.basis())),
            ("hyperplanes", Value::Array(list)),
        ],
    )?;
    let smallest = hs.first().map(|h| format!("{:.6e}", h.covolume_sq.to_f64())).unwrap_or_else(|| "-".into());
    println!(
        "hyperplanes: step {step}, bound_sq {bound}: {} small hyperplanes, smallest |H|^2 = {smallest} -> {}",
        hs.len(),
        path.display()
    );
    Ok(true)
}

fn verify_decay(cfg: &RunConfig, w: &Writer) -> Result<bool> {
    let r = verify_absolute_decay(&cfg.support, &cfg.decay, cfg.decay_trials, cfg.decay_seed);
    let path = w.json(
        "decay.json",
        &Header::new(cfg, "verify-decay"),
        vec![("support", json!(cfg.support)), ("report", json!(r))],
    )?;
    let ok = r.verdict == Verdict::Pass;
    println!(
        "verify-decay: C = {}, eta = {:.6}, {} trials, max ratio {:.4} -> {} ({})",
        r.c,
        r.eta,
        r.trials,
        r.max_ratio,
        r.verdict,
        path.display()
    );
    if let Some(c) = &r.counterexample {
        println!(
            "  counterexample: x = {:?}, r = {:.4e}, eps = {:.4e}, measured {:.4} > allowed {:.4}",
            c.x, c.r, c.eps, c.measured, c.allowed
        );
    }
    Ok(ok)
}

fn black_player(spec: &str) -> Result<Box<dyn Strategy>> {
    if spec == "random" {
        return Ok(Box::new(RandomBlack));
    }
    if let Some(mode) = spec.strip_prefix("targeting:") {
        return Ok(Box::new(Targeting::new(mode.parse::<TargetMode>()?)));
    }
    if let Some(path) = spec.strip_prefix("replay:") {
        let t = read_transcript(Path::new(path))?;
        return Ok(Box::new(Replay::new(Player::Black, &t)));
    }
    Err(ConfigError { field: "game.black".into(), message: format!("unknown black player {spec:?}") }.into())
}

#[derive(Serialize)]
struct PlayVerdict {
    limit_center: Vector,
    #[serde(rename = "Q")]
    q_max: u64,
    min_product: Scalar,
    argmin_q: Vec<i64>,
    c0: Scalar,
    c0_source: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    ledger_holds: Option<bool>,
    pass: bool,
}

/// Post-game check at the limit point: `min_product >= c0 > 0`.
fn verdict(
    limit: &Vector,
    scan: BadnessEstimate,
    c0: Scalar,
    c0_source: &'static str,
    ledger_holds: Option<bool>,
) -> PlayVerdict {
    let pass = c0.cmp_zero().is_gt() && scan.min_product >= c0 && ledger_holds != Some(false);
    PlayVerdict {
        limit_center: limit.clone(),
        q_max: scan.q_max,
        min_product: scan.min_product,
        argmin_q: scan.argmin_q,
        c0,
        c0_source,
        ledger_holds,
        pass,
    }
}

fn ledger_holds(state: &BadAState, s: &AffineSystem) -> Result<bool> {
    let Some(to) = state.ledger.iter().map(|e| e.to).max() else {
        return Ok(true);
    };
    let f = &state.schedule;
    let traj = trajectory_minima(s, f, to.max(0) as u32)?;
    Ok(state.ledger.iter().all(|e| {
        (e.from.max(0)..=e.to).all(|st| traj.minima[st as usize].min_dist.square() >= e.bound_sq_at(f, st))
    }))
}

fn play(cfg: &RunConfig, w: &Writer) -> Result<bool> {
    let pc = cfg.play.as_ref().expect("play config");
    let params = GameParams {
        m: cfg.m,
        n: cfg.n,
        alpha: pc.alpha.clone(),
        beta: pc.beta.clone(),
        rounds: pc.rounds,
        support: cfg.support.clone(),
        decay: cfg.decay.clone(),
        start: pc.start.clone(),
    };
    params.validate().map_err(|e| ConfigError { field: "game".into(), message: e.to_string() })?;
    let mut black = black_player(&pc.black)?;
    let header = Header::new(cfg, "play");
    let cert_schedule = FlowSchedule::new(cfg.m, cfg.n, Scalar::ratio(1, 2))?;

    let (t, white_json, verdict, extra) = match pc.white {
        WhiteKind::BadA | WhiteKind::BadInf => {
            let a = cfg.a.clone().expect("validated");
            let fixed = Fixed { a: Some(a.clone()), b: None };
            let opts = BadAOptions { lookahead: pc.lookahead, case1: pc.case1, case1_bound: pc.case1_bound };
            let mut white = BadA::new(&params, a.clone(), opts)
                .map_err(|e| ConfigError { field: "game".into(), message: e.to_string() })?;
            let t = run_game(&params, &fixed, &mut white, black.as_mut(), cfg.seed)?;
            let state = white.state().clone();
            let mut v = None;
            let mut extra = None;
            if t.is_complete() {
                let (limit, _) = limit_point(&t)?;
                let sys = AffineSystem::new(a, limit.clone())?;
                let scan = badness_scan(&sys, pc.check_q);
                let (c0, src) = match &state.certificate {
                    Some(c) => (c.c0.clone(), "rational-shortcut"),
                    None => (finite_certificate(&sys, &cert_schedule, pc.check_q)?.c0, "trajectory"),
                };
                v = Some(verdict(&limit, scan, c0, src, Some(ledger_holds(&state, &sys)?)));
                if pc.white == WhiteKind::BadInf {
                    let r = bad_inf_verify(&t, pc.steps, pc.check_q)?;
                    w.json("badinf.json", &header, vec![("report", json!(r))])?;
                    extra = Some(r.verdict);
                }
            }
            (t, json!(state), v, extra)
        }
        WhiteKind::BadB => {
            let b = cfg.b.clone().expect("validated");
            let fixed = Fixed { a: None, b: Some(b.clone()) };
            let base: Box<dyn Strategy> = match pc.base.as_str() {
                "recenter" => Box::new(Recenter),
                _ => Box::new(Greedy),
            };
            let mut white = BadB::new(&params, b.clone(), base, pc.stride)
                .map_err(|e| ConfigError { field: "game".into(), message: e.to_string() })?;
            let t = run_game(&params, &fixed, &mut white, black.as_mut(), cfg.seed)?;
            let mut v = None;
            if t.is_complete() {
                let (limit, _) = limit_point(&t)?;
                let sys = AffineSystem::new(matrix_from_point(&limit, cfg.m, cfg.n), b)?;
                let scan = badness_scan(&sys, pc.check_q);
                let c0 = finite_certificate(&sys, &cert_schedule, pc.check_q)?.c0;
                v = Some(verdict(&limit, scan, c0, "trajectory", None));
            }
            (t, json!({"alpha0": white.alpha0(), "events": white.events()}), v, None)
        }
    };

    let path = w.json(
        "transcript.json",
        &header,
        vec![("transcript", serde_json::to_value(&t)?), ("white_state", white_json), ("verdict", json!(verdict))],
    )?;
    let names = format!("{} vs {}", t.players.white, t.players.black);
    if let Some(a) = &t.abort {
        println!(
            "play: {names}: VIOLATION {} by {} in round {} -> {}",
            a.violation,
            a.player,
            a.round,
            path.display()
        );
        return Ok(false);
    }
    let v = verdict.expect("complete game");
    let mut ok = v.pass;
    let mut line = format!(
        "play: {names}, {} rounds, alpha = {}, beta = {}: min_product (Q = {}) = {:.6e}, c0 = {:.6e} ({})",
        t.rounds.len(),
        params.alpha,
        params.beta,
        v.q_max,
        v.min_product.to_f64(),
        v.c0.to_f64(),
        v.c0_source
    );
    if let Some(l) = v.ledger_holds {
        line.push_str(&format!(", ledger {}", if l { "holds" } else { "VIOLATED" }));
    }
    if let Some(verdict) = extra {
        ok &= verdict != BadInfVerdict::DoesNotDiverge;
        line.push_str(&format!(", growth {verdict}"));
    }
    println!("{line} -> {} ({})", pass_fail(ok), path.display());
    Ok(ok)
}

pub fn read_transcript(path: &Path) -> Result<Transcript> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let inner = v.get("transcript").cloned().unwrap_or(v);
    serde_json::from_value(inner).with_context(|| format!("{} is not a transcript", path.display()))
}

/// Re-validates a transcript and replays both players through the referee.
pub fn replay(path: &Path) -> Result<bool> {
    let t = read_transcript(path)?;
    if let Some(a) = &t.abort {
        println!("replay: {}: recorded VIOLATION {} by {} in round {}", path.display(), a.violation, a.player, a.round);
        return Ok(false);
    }
    if let Err(e) = validate_transcript(&t) {
        println!("replay: {}: INVALID ({e})", path.display());
        return Ok(false);
    }
    let mut white = Replay::new(Player::White, &t);
    let mut black = Replay::new(Player::Black, &t);
    let again = run_game(&t.params, &t.fixed, &mut white, &mut black, t.players.seed)?;
    let same = again.rounds == t.rounds && again.abort.is_none() && again.result == t.result;
    println!(
        "replay: {}: {} rounds ({} vs {}), referee ok, re-run {}",
        path.display(),
        t.rounds.len(),
        t.players.white,
        t.players.black,
        if same { "identical" } else { "DIFFERS" }
    );
    Ok(same)
}

const DEMO: &[(&str, &str)] = &[
    ("golden-scan", include_str!("../configs/golden-scan.toml")),
    ("third-play", include_str!("../configs/third-play.toml")),
    ("cantor-decay", include_str!("../configs/cantor-decay.toml")),
];

fn demo(cfg: &RunConfig) -> Result<bool> {
    let mut ok = true;
    for (name, text) in DEMO {
        let raw = RawConfig::parse(text)?;
        let mut sub = raw.clone();
        // Keep the demo quick.
        if sub.scan.q.is_some_and(|q| q > 10_000) {
            sub.scan.q = Some(10_000);
        }
        if sub.verify_decay.trials.is_some_and(|t| t > 2000) {
            sub.verify_decay.trials = Some(2000);
        }
        let o = Overrides {
            mode: None,
            out: Some(cfg.out.join(name)),
            seed: Some(cfg.seed),
            precision: Some(cfg.precision),
        };
        let c = RunConfig::from_raw(&sub, &o)?;
        ok &= run(&c)?;
    }
    println!("demo: {}", pass_fail(ok));
    Ok(ok)
}
