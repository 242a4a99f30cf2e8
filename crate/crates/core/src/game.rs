//! Referee and runner for the (alpha, beta) ball game on a support K.
//!
//! Balls are closed sup-norm balls with explicit centre and radius. Round
//! `l` consists of Black's ball `B_l` (the first one is fixed by the
//! parameters) followed by White's ball `W_l`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::fractal::{DecayParams, SupportSpec};
use crate::lattice::FlowSchedule;
use crate::linalg::{Matrix, Vector};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vector,
    pub radius: Scalar,
}

impl Ball {
    pub fn new(center: Vector, radius: Scalar) -> Self {
        Ball { center, radius }
    }

    pub fn contains_point(&self, x: &Vector) -> bool {
        self.center.dist_sup(x) <= self.radius
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Black,
    White,
}

impl std::fmt::Display for Player {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Player::Black => "black",
            Player::White => "white",
        })
    }
}

/// The data a game is played about: `A` for games in `b`-space, `b` for games in `A`-space.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Fixed {
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vector>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    pub m: usize,
    pub n: usize,
    pub alpha: Scalar,
    pub beta: Scalar,
    pub rounds: usize,
    pub support: SupportSpec,
    pub decay: DecayParams,
    /// Black's first ball `B_1`.
    pub start: Ball,
}

impl GameParams {
    /// Checks ranges, dimensions, that `B_1` is centred on K and that
    /// `alpha * beta = u^n` for a rational `u`.
    pub fn validate(&self) -> Result<FlowSchedule> {
        let zero = Scalar::zero();
        let one = Scalar::one();
        for (name, v) in [("alpha", &self.alpha), ("beta", &self.beta)] {
            if !v.is_exact() || *v <= zero || *v >= one {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be a rational in (0,1)")));
            }
        }
        self.support.validate()?;
        if self.start.center.dim() != self.support.dim() {
            return Err(Error::DimensionMismatch(format!(
                "start centre has dimension {}, support has {}",
                self.start.center.dim(),
                self.support.dim()
            )));
        }
        if !self.start.radius.is_exact() || self.start.radius <= zero {
            return Err(Error::InvalidParameter("start radius must be a positive rational".into()));
        }
        if !self.support.contains(&self.start.center) {
            return Err(Error::InvalidParameter("start centre is not on the support".into()));
        }
        self.schedule()
    }

    pub fn schedule(&self) -> Result<FlowSchedule> {
        FlowSchedule::from_alpha_beta(self.m, self.n, &(&self.alpha * &self.beta))
    }

    pub fn ratio(&self, p: Player) -> &Scalar {
        match p {
            Player::Black => &self.beta,
            Player::White => &self.alpha,
        }
    }

    /// `(alpha beta)^rounds rho(B_1)`.
    pub fn limit_radius_bound(&self) -> Scalar {
        &(&self.alpha * &self.beta).pow(self.rounds as i32) * &self.start.radius
    }
}

/// Checks `next` against `prev` in the order RADIUS, NESTING, SUPPORT.
pub fn validate_move(prev: &Ball, next: &Ball, ratio: &Scalar, k: &SupportSpec) -> std::result::Result<(), Violation> {
    if next.radius != ratio * &prev.radius {
        return Err(Violation::Radius);
    }
    if next.center.dim() != prev.center.dim() || prev.center.dist_sup(&next.center) > &prev.radius - &next.radius {
        return Err(Violation::Nesting);
    }
    if !k.contains(&next.center) {
        return Err(Violation::Support);
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub black: Ball,
    pub white: Ball,
}

/// Everything a strategy sees when asked for a move.
pub struct MoveContext<'a> {
    pub params: &'a GameParams,
    pub fixed: &'a Fixed,
    /// 1-based round number.
    pub round: usize,
    /// Completed rounds.
    pub history: &'a [Round],
    /// The ball to move inside: `B_round` for White, `W_{round-1}` for Black.
    pub current: &'a Ball,
    /// Radius ratio for this move.
    pub ratio: &'a Scalar,
    pub rng: &'a mut ChaCha8Rng,
}

pub trait Strategy {
    fn name(&self) -> String;
    fn next_move(&mut self, ctx: &mut MoveContext<'_>) -> Result<Ball>;
}

/// Concentric move with the centre projected to K.
pub fn recenter(current: &Ball, ratio: &Scalar, k: &SupportSpec) -> Result<Ball> {
    let radius = ratio * &current.radius;
    let room = &current.radius - &radius;
    let center = if k.contains(&current.center) && matches!(k, SupportSpec::Box { .. }) {
        current.center.clone()
    } else {
        k.point_in_ball(&current.center, &room)?
    };
    Ok(Ball { center, radius })
}

/// Always recentres in place.
#[derive(Clone, Debug, Default)]
pub struct Recenter;

impl Strategy for Recenter {
    fn name(&self) -> String {
        "recenter".into()
    }

    fn next_move(&mut self, ctx: &mut MoveContext<'_>) -> Result<Ball> {
        recenter(ctx.current, ctx.ratio, &ctx.params.support)
    }
}

/// Replays one player's stored moves.
#[derive(Clone, Debug)]
pub struct Replay {
    player: Player,
    rounds: Vec<Round>,
}

impl Replay {
    pub fn new(player: Player, t: &Transcript) -> Self {
        Replay { player, rounds: t.rounds.clone() }
    }
}

impl Strategy for Replay {
    fn name(&self) -> String {
        format!("replay:{}", self.player)
    }

    fn next_move(&mut self, ctx: &mut MoveContext<'_>) -> Result<Ball> {
        let r = self
            .rounds
            .get(ctx.round - 1)
            .ok_or_else(|| Error::InvalidTranscript(format!("no stored move for round {}", ctx.round)))?;
        Ok(match self.player {
            Player::Black => r.black.clone(),
            Player::White => r.white.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Abort {
    pub round: usize,
    pub player: Player,
    pub violation: Violation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameResult {
    pub limit_center: Vector,
    /// `(alpha beta)^rounds rho(B_1)`.
    pub limit_radius_bound: Scalar,
    /// Radius of the last White ball; every point of the intersection is
    /// within this distance of `limit_center`.
    pub containment_radius: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Players {
    pub white: String,
    pub black: String,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub params: GameParams,
    pub fixed: Fixed,
    pub players: Players,
    pub rounds: Vec<Round>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<GameResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abort: Option<Abort>,
}

impl Transcript {
    pub fn is_complete(&self) -> bool {
        self.abort.is_none() && self.result.is_some()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// RNG for one move: the game seed with a stream per (round, player).
pub fn move_rng(seed: u64, round: usize, player: Player) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * round as u64 + matches!(player, Player::White) as u64);
    rng
}

/// Plays `params.rounds` rounds. Illegal moves end the game with an
/// [`Abort`] record; strategy errors are returned as errors.
pub fn run_game(
    params: &GameParams,
    fixed: &Fixed,
    white: &mut dyn Strategy,
    black: &mut dyn Strategy,
    seed: u64,
) -> Result<Transcript> {
    params.validate()?;
    let k = &params.support;
    let mut t = Transcript {
        params: params.clone(),
        fixed: fixed.clone(),
        players: Players { white: white.name(), black: black.name(), seed },
        rounds: Vec::with_capacity(params.rounds),
        result: None,
        abort: None,
    };
    for round in 1..=params.rounds {
        let b = if round == 1 {
            params.start.clone()
        } else {
            let prev = &t.rounds[round - 2].white;
            let mut rng = move_rng(seed, round, Player::Black);
            let mut ctx = MoveContext {
                params,
                fixed,
                round,
                history: &t.rounds,
                current: prev,
                ratio: &params.beta,
                rng: &mut rng,
            };
            let b = black.next_move(&mut ctx)?;
            if let Err(v) = validate_move(prev, &b, &params.beta, k) {
                t.abort = Some(Abort { round, player: Player::Black, violation: v });
                return Ok(t);
            }
            b
        };
        let mut rng = move_rng(seed, round, Player::White);
        let mut ctx = MoveContext {
            params,
            fixed,
            round,
            history: &t.rounds,
            current: &b,
            ratio: &params.alpha,
            rng: &mut rng,
        };
        let w = white.next_move(&mut ctx)?;
        if let Err(v) = validate_move(&b, &w, &params.alpha, k) {
            t.abort = Some(Abort { round, player: Player::White, violation: v });
            return Ok(t);
        }
        t.rounds.push(Round { black: b, white: w });
    }
    let (limit_center, containment_radius) = match t.rounds.last() {
        Some(r) => (r.white.center.clone(), r.white.radius.clone()),
        None => (params.start.center.clone(), params.start.radius.clone()),
    };
    t.result = Some(GameResult { limit_center, limit_radius_bound: params.limit_radius_bound(), containment_radius });
    Ok(t)
}

/// `(last White centre, (alpha beta)^rounds rho(B_1))`.
pub fn limit_point(t: &Transcript) -> Result<(Vector, Scalar)> {
    validate_transcript(t)?;
    let r = t.result.as_ref().expect("validated");
    Ok((r.limit_center.clone(), r.limit_radius_bound.clone()))
}

/// Re-checks every move and the recorded result.
pub fn validate_transcript(t: &Transcript) -> Result<()> {
    let p = &t.params;
    p.validate()?;
    if let Some(a) = &t.abort {
        return Err(Error::InvalidTranscript(format!("game aborted: {} {} in round {}", a.player, a.violation, a.round)));
    }
    if t.rounds.len() != p.rounds {
        return Err(Error::InvalidTranscript(format!("{} rounds recorded, {} expected", t.rounds.len(), p.rounds)));
    }
    let k = &p.support;
    for (i, r) in t.rounds.iter().enumerate() {
        let round = i + 1;
        let fail = |player: Player, v: Violation| {
            Error::InvalidTranscript(format!("round {round}: {player} move violates {v}"))
        };
        if round == 1 {
            if r.black != p.start {
                return Err(Error::InvalidTranscript("first Black ball differs from the start ball".into()));
            }
        } else {
            validate_move(&t.rounds[i - 1].white, &r.black, &p.beta, k).map_err(|v| fail(Player::Black, v))?;
        }
        validate_move(&r.black, &r.white, &p.alpha, k).map_err(|v| fail(Player::White, v))?;
    }
    let res = t.result.as_ref().ok_or_else(|| Error::InvalidTranscript("missing result".into()))?;
    let (c, rad) = match t.rounds.last() {
        Some(r) => (&r.white.center, &r.white.radius),
        None => (&p.start.center, &p.start.radius),
    };
    if &res.limit_center != c || &res.containment_radius != rad || res.limit_radius_bound != p.limit_radius_bound() {
        return Err(Error::InvalidTranscript("result does not match the recorded moves".into()));
    }
    Ok(())
}

/// Per-round radius products recomputed from the radius laws.
pub fn radius_chain(t: &Transcript) -> Vec<(Scalar, Scalar)> {
    let p = &t.params;
    let mut out = Vec::with_capacity(t.rounds.len());
    let mut rho = p.start.radius.clone();
    for _ in &t.rounds {
        let w = &p.alpha * &rho;
        out.push((rho.clone(), w.clone()));
        rho = &p.beta * &w;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        Scalar::parse(x).unwrap()
    }

    fn ball(c: &[&str], r: &str) -> Ball {
        Ball::new(Vector::parse(c).unwrap(), s(r))
    }

    fn box_params(rounds: usize) -> GameParams {
        let support = SupportSpec::unit_box(1);
        GameParams {
            m: 1,
            n: 1,
            alpha: s("1/4"),
            beta: s("1/4"),
            rounds,
            decay: DecayParams::for_support(&support),
            support,
            start: ball(&["1/2"], "1/2"),
        }
    }

    #[test]
    fn move_examples() {
        let b = SupportSpec::unit_box(1);
        let prev = ball(&["0"], "1");
        let q = s("1/4");
        let bx = SupportSpec::Box { lo: vec![s("-1")], hi: vec![s("1")] };
        assert_eq!(validate_move(&prev, &ball(&["0"], "1/4"), &q, &bx), Ok(()));
        assert_eq!(validate_move(&prev, &ball(&["9/10"], "1/4"), &q, &bx), Err(Violation::Nesting));
        assert_eq!(validate_move(&prev, &ball(&["0"], "1/3"), &q, &b), Err(Violation::Radius));
        let c = SupportSpec::cantor();
        assert_eq!(validate_move(&ball(&["1/2"], "1/2"), &ball(&["1/2"], "1/8"), &q, &c), Err(Violation::Support));
    }

    #[test]
    fn geometric_game() {
        let p = box_params(5);
        let t = run_game(&p, &Fixed::default(), &mut Recenter, &mut Recenter, 0).unwrap();
        let radii: Vec<Scalar> = t.rounds.iter().map(|r| r.white.radius.clone()).collect();
        assert_eq!(radii[0], s("1/8"));
        assert_eq!(radii[1], s("1/128"));
        let (c, bound) = limit_point(&t).unwrap();
        assert_eq!(c, Vector::parse(&["1/2"]).unwrap());
        assert_eq!(bound, &s("1/16").pow(5) * &s("1/2"));
        for (r, (rb, rw)) in t.rounds.iter().zip(radius_chain(&t)) {
            assert_eq!(r.black.radius, rb);
            assert_eq!(r.white.radius, rw);
        }
    }

    #[test]
    fn zero_rounds() {
        let p = box_params(0);
        let t = run_game(&p, &Fixed::default(), &mut Recenter, &mut Recenter, 0).unwrap();
        assert_eq!(limit_point(&t).unwrap(), (p.start.center.clone(), p.start.radius.clone()));
    }

    #[test]
    fn replay_roundtrip() {
        let p = box_params(4);
        let t = run_game(&p, &Fixed::default(), &mut Recenter, &mut Recenter, 9).unwrap();
        let json = t.to_json();
        let back = Transcript::from_json(&json).unwrap();
        assert_eq!(back, t);
        let mut w = Replay::new(Player::White, &back);
        let mut b = Replay::new(Player::Black, &back);
        let again = run_game(&back.params, &back.fixed, &mut w, &mut b, 9).unwrap();
        assert_eq!(again.rounds, t.rounds);
        assert_eq!(again.to_json().replace("replay:white", "recenter").replace("replay:black", "recenter"), json);
    }

    #[test]
    fn aborts_are_recorded() {
        struct Cheat;
        impl Strategy for Cheat {
            fn name(&self) -> String {
                "cheat".into()
            }
            fn next_move(&mut self, ctx: &mut MoveContext<'_>) -> Result<Ball> {
                Ok(ctx.current.clone())
            }
        }
        let t = run_game(&box_params(3), &Fixed::default(), &mut Cheat, &mut Recenter, 0).unwrap();
        assert_eq!(t.abort, Some(Abort { round: 1, player: Player::White, violation: Violation::Radius }));
        assert!(limit_point(&t).is_err());
    }
}
