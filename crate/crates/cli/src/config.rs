//! TOML run configuration and its validation into typed values.

use std::fmt;
use std::path::PathBuf;

use schmidt_core::fractal::{DecayParams, SupportSpec};
use schmidt_core::game::Ball;
use schmidt_core::lattice::{FlowSchedule, MAX_DIM};
use schmidt_core::scalar::default_precision;
use schmidt_core::white::{alpha_for, BadB};
use schmidt_core::{Matrix, Scalar, Vector};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Play,
    ScanBadness,
    Trajectory,
    Hyperplanes,
    VerifyDecay,
    Demo,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Play => "play",
            Mode::ScanBadness => "scan-badness",
            Mode::Trajectory => "trajectory",
            Mode::Hyperplanes => "hyperplanes",
            Mode::VerifyDecay => "verify-decay",
            Mode::Demo => "demo",
        })
    }
}

/// A problem with one config field.
#[derive(Debug)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(field: &str, message: impl fmt::Display) -> Result<T, ConfigError> {
    Err(ConfigError { field: field.into(), message: message.to_string() })
}

/// A scalar given as a string (`"p/q"`, decimal, named constant) or a TOML number.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ScalarIn {
    Text(String),
    Int(i64),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum MatrixIn {
    One(ScalarIn),
    Flat(Vec<ScalarIn>),
    Rows(Vec<Vec<ScalarIn>>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum VectorIn {
    One(ScalarIn),
    Many(Vec<ScalarIn>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum SupportIn {
    /// `"box"` (unit cube) or `"cantor"`.
    Named(String),
    Spec(SupportSpec),
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayIn {
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub eta: Option<f64>,
    pub r0: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameIn {
    pub alpha: Option<ScalarIn>,
    pub beta: Option<ScalarIn>,
    pub rounds: Option<usize>,
    pub start_center: Option<VectorIn>,
    pub start_radius: Option<ScalarIn>,
    pub strategy: Option<String>,
    pub black: Option<String>,
    pub lookahead: Option<usize>,
    pub case1: Option<bool>,
    pub case1_bound: Option<i64>,
    pub stride: Option<usize>,
    pub base: Option<String>,
    /// Search bound for the post-game badness check.
    #[serde(rename = "Q")]
    pub q: Option<u64>,
    /// Flow steps inspected by the badInf growth check.
    pub steps: Option<u32>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanIn {
    #[serde(rename = "Q")]
    pub q: Option<u64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryIn {
    pub u: Option<ScalarIn>,
    #[serde(rename = "L")]
    pub l: Option<u32>,
    pub cross_check: Option<bool>,
    #[serde(rename = "Q")]
    pub q: Option<u64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperplanesIn {
    pub u: Option<ScalarIn>,
    pub step: Option<i64>,
    pub bound_sq: Option<ScalarIn>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyDecayIn {
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub mode: Option<Mode>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    #[serde(rename = "A")]
    pub a: Option<MatrixIn>,
    pub b: Option<VectorIn>,
    pub precision: Option<u32>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub support: Option<SupportIn>,
    pub decay: Option<DecayIn>,
    #[serde(default)]
    pub game: GameIn,
    #[serde(default)]
    pub scan: ScanIn,
    #[serde(default)]
    pub trajectory: TrajectoryIn,
    #[serde(default)]
    pub hyperplanes: HyperplanesIn,
    #[serde(default)]
    pub verify_decay: VerifyDecayIn,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError { field: "(file)".into(), message: e.to_string() })
    }
}

/// A named irrational evaluated for this run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedConstant {
    pub field: String,
    pub name: String,
    pub precision: u32,
    /// Canonical hex float.
    pub value: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WhiteKind {
    #[serde(rename = "badA")]
    BadA,
    #[serde(rename = "badB")]
    BadB,
    #[serde(rename = "badInf")]
    BadInf,
}

#[derive(Clone, Debug)]
pub struct PlayConfig {
    pub white: WhiteKind,
    pub black: String,
    pub alpha: Scalar,
    pub beta: Scalar,
    pub rounds: usize,
    pub start: Ball,
    pub lookahead: usize,
    pub case1: bool,
    pub case1_bound: i64,
    pub stride: usize,
    pub base: String,
    pub check_q: u64,
    pub steps: u32,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub mode: Mode,
    pub m: usize,
    pub n: usize,
    pub a: Option<Matrix>,
    pub b: Option<Vector>,
    pub precision: u32,
    pub seed: u64,
    pub out: PathBuf,
    pub support: SupportSpec,
    pub decay: DecayParams,
    pub play: Option<PlayConfig>,
    pub scan_q: u64,
    pub trajectory: (FlowSchedule, u32),
    pub cross_check: Option<u64>,
    pub hyperplanes: (FlowSchedule, i64, Option<Scalar>),
    pub decay_trials: usize,
    pub decay_seed: u64,
    pub constants: Vec<NamedConstant>,
}

/// Overrides from the command line.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub precision: Option<u32>,
}

struct Parser {
    precision: u32,
    constants: Vec<NamedConstant>,
}

impl Parser {
    fn scalar(&mut self, field: &str, s: &ScalarIn) -> Result<Scalar, ConfigError> {
        let text = match s {
            ScalarIn::Int(i) => return Ok(Scalar::from_int(*i)),
            ScalarIn::Text(t) => t.trim(),
        };
        if let Some(v) = Scalar::named(text, self.precision) {
            self.constants.push(NamedConstant {
                field: field.into(),
                name: text.into(),
                precision: v.precision().unwrap_or(self.precision),
                value: v.to_canonical(),
            });
            return Ok(v);
        }
        Scalar::parse(text).or_else(|e| err(field, e))
    }

    fn rational(&mut self, field: &str, s: &ScalarIn) -> Result<Scalar, ConfigError> {
        let v = self.scalar(field, s)?;
        if !v.is_exact() {
            return err(field, "must be rational");
        }
        Ok(v)
    }

    fn vector(&mut self, field: &str, v: &VectorIn) -> Result<Vector, ConfigError> {
        match v {
            VectorIn::One(s) => Ok(Vector(vec![self.scalar(field, s)?])),
            VectorIn::Many(xs) => xs
                .iter()
                .enumerate()
                .map(|(i, s)| self.scalar(&format!("{field}[{i}]"), s))
                .collect::<Result<Vec<_>, _>>()
                .map(Vector),
        }
    }

    fn matrix(&mut self, field: &str, a: &MatrixIn, m: usize, n: usize) -> Result<Matrix, ConfigError> {
        let rows: Vec<Vec<ScalarIn>> = match a {
            MatrixIn::One(s) => vec![vec![s.clone()]],
            MatrixIn::Flat(xs) => {
                if xs.len() != m * n {
                    return err(field, format!("{} entries given, m x n = {}", xs.len(), m * n));
                }
                xs.chunks(n).map(|c| c.to_vec()).collect()
            }
            MatrixIn::Rows(rs) => rs.clone(),
        };
        if rows.len() != m || rows.iter().any(|r| r.len() != n) {
            return err(field, format!("expected {m} rows of {n} entries"));
        }
        let rows = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .map(|(j, s)| self.scalar(&format!("{field}[{i}][{j}]"), s))
                    .collect::<Result<Vec<_>, _>>()
                    .map(Vector)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Matrix::from_rows(rows).or_else(|e| err(field, e))
    }
}

fn shape_of(a: &MatrixIn) -> Option<(usize, usize)> {
    match a {
        MatrixIn::One(_) => Some((1, 1)),
        MatrixIn::Rows(r) => r.first().map(|first| (r.len(), first.len())),
        MatrixIn::Flat(_) => None,
    }
}

fn support_from(field: &str, s: &SupportIn, dim: usize) -> Result<SupportSpec, ConfigError> {
    let k = match s {
        SupportIn::Named(name) => match name.as_str() {
            "box" => SupportSpec::unit_box(dim),
            "cantor" => SupportSpec::cantor(),
            other => return err(field, format!("unknown support {other:?} (use \"box\", \"cantor\" or a table)")),
        },
        SupportIn::Spec(spec) => spec.clone(),
    };
    k.validate().or_else(|e| err(field, e))?;
    Ok(k)
}

/// Default `B_1`: the centre of the base box pulled onto K.
fn default_center(k: &SupportSpec) -> Result<Vector, ConfigError> {
    let (lo, hi) = k.base_box();
    let mid = lo.add(&hi).scale(&Scalar::ratio(1, 2));
    if k.contains(&mid) {
        return Ok(mid);
    }
    let half = hi.sub(&lo).norm_sup();
    k.point_in_ball(&mid, &half).or_else(|e| err("game.start_center", e))
}

impl RunConfig {
    pub fn from_raw(raw: &RawConfig, o: &Overrides) -> Result<Self, ConfigError> {
        let mode = o.mode.or(raw.mode).ok_or(ConfigError { field: "mode".into(), message: "missing".into() })?;
        let precision = o.precision.or(raw.precision).unwrap_or_else(default_precision);
        if !(64..=1 << 16).contains(&precision) {
            return err("precision", format!("{precision} bits is outside 64..=65536"));
        }
        schmidt_core::scalar::set_default_precision(precision);
        let mut p = Parser { precision, constants: Vec::new() };

        let inferred = raw.a.as_ref().and_then(shape_of);
        let m = raw.m.or(inferred.map(|s| s.0)).or(match &raw.b {
            Some(VectorIn::Many(v)) => Some(v.len()),
            _ => None,
        });
        let m = m.unwrap_or(1);
        let n = raw.n.or(inferred.map(|s| s.1)).unwrap_or(1);
        if m == 0 || n == 0 {
            return err("m", "m and n must be positive");
        }
        if m + n > MAX_DIM {
            return err("m", format!("m + n = {} exceeds the supported {MAX_DIM}", m + n));
        }
        let a = raw.a.as_ref().map(|a| p.matrix("A", a, m, n)).transpose()?;
        let b = raw.b.as_ref().map(|b| p.vector("b", b)).transpose()?;
        if let Some(b) = &b {
            if b.dim() != m {
                return err("b", format!("{} entries, m = {m}", b.dim()));
            }
        }

        let white = match raw.game.strategy.as_deref().unwrap_or("badA") {
            "badA" => WhiteKind::BadA,
            "badB" => WhiteKind::BadB,
            "badInf" => WhiteKind::BadInf,
            other => return err("game.strategy", format!("unknown strategy {other:?} (badA, badB, badInf)")),
        };
        let game_dim = if white == WhiteKind::BadB { m * n } else { m };
        let support_dim = if mode == Mode::Play { game_dim } else { m };
        let support = match &raw.support {
            Some(s) => support_from("support", s, support_dim)?,
            None => SupportSpec::unit_box(support_dim),
        };
        let mut decay = DecayParams::for_support(&support);
        if let Some(d) = &raw.decay {
            decay = DecayParams::new(d.c.unwrap_or(decay.c), d.eta.unwrap_or(decay.eta), d.r0.unwrap_or(decay.r0))
                .or_else(|e| err("decay", e))?;
        }

        let play = if mode == Mode::Play {
            Some(play_config(&mut p, raw, white, m, n, &support, &decay, a.as_ref(), b.as_ref())?)
        } else {
            None
        };
        let needs_a = matches!(mode, Mode::ScanBadness | Mode::Trajectory | Mode::Hyperplanes);
        if needs_a && a.is_none() {
            return err("A", format!("required by mode {mode}"));
        }

        let tu = match &raw.trajectory.u {
            Some(u) => p.rational("trajectory.u", u)?,
            None => Scalar::ratio(1, 2),
        };
        let tf = FlowSchedule::new(m, n, tu).or_else(|e| err("trajectory.u", e))?;
        let hu = match &raw.hyperplanes.u {
            Some(u) => p.rational("hyperplanes.u", u)?,
            None => Scalar::ratio(1, 2),
        };
        let hf = FlowSchedule::new(m, n, hu).or_else(|e| err("hyperplanes.u", e))?;
        let bound = raw.hyperplanes.bound_sq.as_ref().map(|s| p.scalar("hyperplanes.bound_sq", s)).transpose()?;
        if bound.as_ref().is_some_and(|b| b.cmp_zero().is_le()) {
            return err("hyperplanes.bound_sq", "must be positive");
        }
        let scan_q = raw.scan.q.unwrap_or(10_000);
        if scan_q == 0 {
            return err("scan.Q", "must be at least 1");
        }
        let seed = o.seed.or(raw.seed).unwrap_or(0);
        Ok(RunConfig {
            mode,
            m,
            n,
            a,
            b,
            precision,
            seed,
            out: o.out.clone().or(raw.out.clone()).unwrap_or_else(|| PathBuf::from("out")),
            support,
            decay,
            play,
            scan_q,
            trajectory: (tf, raw.trajectory.l.unwrap_or(40)),
            cross_check: raw.trajectory.cross_check.unwrap_or(false).then(|| raw.trajectory.q.unwrap_or(1024)),
            hyperplanes: (hf, raw.hyperplanes.step.unwrap_or(0), bound),
            decay_trials: raw.verify_decay.trials.unwrap_or(10_000).max(1),
            decay_seed: raw.verify_decay.seed.unwrap_or(seed),
            constants: p.constants,
        })
    }
}

#[allow(clippy::too_many_arguments)]
fn play_config(
    p: &mut Parser,
    raw: &RawConfig,
    white: WhiteKind,
    m: usize,
    n: usize,
    support: &SupportSpec,
    decay: &DecayParams,
    a: Option<&Matrix>,
    b: Option<&Vector>,
) -> Result<PlayConfig, ConfigError> {
    let g = &raw.game;
    match white {
        WhiteKind::BadA | WhiteKind::BadInf if a.is_none() => return err("A", "required by strategy badA/badInf"),
        WhiteKind::BadB if b.is_none() => return err("b", "required by strategy badB"),
        _ => {}
    }
    let beta = match &g.beta {
        Some(s) => p.rational("game.beta", s)?,
        None => Scalar::ratio(1, 4),
    };
    let alpha = match &g.alpha {
        Some(ScalarIn::Text(t)) if t == "auto" => None,
        Some(s) => Some(p.rational("game.alpha", s)?),
        None => None,
    };
    let alpha = alpha.unwrap_or_else(|| match white {
        // alpha0 = 1/2 inside the wrapper.
        WhiteKind::BadB => &BadB::factor(decay) * &Scalar::ratio(1, 2),
        _ => alpha_for(decay, m + n),
    });
    let start_center = match &g.start_center {
        Some(v) => p.vector("game.start_center", v)?,
        None => default_center(support)?,
    };
    let start_radius = match &g.start_radius {
        Some(s) => p.rational("game.start_radius", s)?,
        None => Scalar::one(),
    };
    let black = g.black.clone().unwrap_or_else(|| "random".into());
    check_black(&black)?;
    let base = g.base.clone().unwrap_or_else(|| "greedy".into());
    if !matches!(base.as_str(), "greedy" | "recenter") {
        return err("game.base", format!("unknown base strategy {base:?} (greedy, recenter)"));
    }
    let stride = g.stride.unwrap_or(1);
    if stride == 0 {
        return err("game.stride", "must be positive");
    }
    Ok(PlayConfig {
        white,
        black,
        alpha,
        beta,
        rounds: g.rounds.unwrap_or(10),
        start: Ball::new(start_center, start_radius),
        lookahead: g.lookahead.unwrap_or(20),
        case1: g.case1.unwrap_or(true),
        case1_bound: g.case1_bound.unwrap_or(50),
        stride,
        base,
        check_q: g.q.unwrap_or(10_000).max(1),
        steps: g.steps.unwrap_or(12),
    })
}

fn check_black(spec: &str) -> Result<(), ConfigError> {
    if spec == "random" || spec.starts_with("replay:") {
        return Ok(());
    }
    if let Some(mode) = spec.strip_prefix("targeting:") {
        return mode.parse::<schmidt_core::black::TargetMode>().map(|_| ()).or_else(|e| err("game.black", e));
    }
    err("game.black", format!("unknown black player {spec:?} (random, targeting:<mode>, replay:<path>)"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_config(text: &str) -> Result<RunConfig, ConfigError> {
        RunConfig::from_raw(&RawConfig::parse(text)?, &Overrides::default())
    }

    #[test]
    fn matrix_forms_agree() {
        let a = "mode = \"scan-badness\"\nm = 2\nn = 2\nA = [\"1/2\", \"1/3\", 0, 1]\n";
        let b = "mode = \"scan-badness\"\nA = [[\"1/2\", \"1/3\"], [0, 1]]\n";
        let (a, b) = (run_config(a).unwrap(), run_config(b).unwrap());
        assert_eq!(a.a, b.a);
        assert_eq!((b.m, b.n), (2, 2));
    }

    #[test]
    fn named_constants_are_recorded() {
        let c = run_config("mode = \"scan-badness\"\nA = \"sqrt2\"\nprecision = 96\n").unwrap();
        assert_eq!(c.constants.len(), 1);
        assert_eq!(c.constants[0].field, "A[0][0]");
        assert!(c.constants[0].precision >= 96);
        assert!(c.constants[0].value.starts_with("0x"));
    }

    #[test]
    fn play_defaults() {
        let c = run_config("mode = \"play\"\nA = \"1/3\"\n").unwrap();
        let p = c.play.unwrap();
        assert_eq!(p.white, WhiteKind::BadA);
        assert_eq!(p.beta, Scalar::ratio(1, 4));
        assert_eq!(p.rounds, 10);
        assert_eq!(p.start.center, Vector(vec![Scalar::ratio(1, 2)]));
        assert!(p.alpha.cmp_zero().is_gt() && p.alpha < Scalar::ratio(1, 2));
    }

    #[test]
    fn bad_b_needs_b_and_plays_on_matrix_space() {
        assert_eq!(run_config("mode = \"play\"\n[game]\nstrategy = \"badB\"\n").unwrap_err().field, "b");
        let c = run_config("mode = \"play\"\nm = 1\nn = 2\nb = \"1/3\"\n[game]\nstrategy = \"badB\"\n").unwrap();
        assert_eq!(c.support.dim(), 2);
    }
}
