//! Black strategies: random moves, targeting of dangerous points, replay.
//!
//! Every move has radius `beta * rho(W)` and a centre on K within
//! `rho(W)(1 - beta)` of the current centre; anything that cannot be placed
//! falls back to a concentric shrink.

use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{recenter, Ball, MoveContext, Strategy};
pub use crate::game::Replay;
use crate::lattice;
use crate::linalg::{Matrix, Vector};
use crate::scalar::Scalar;
use crate::white::{grid_index, matrix_from_point, point_from_matrix, rescaled_lattice};

/// Random target in the admissible cube, pulled onto K.
#[derive(Clone, Debug, Default)]
pub struct RandomBlack;

const RANDOM_BITS: u32 = 20;

impl Strategy for RandomBlack {
    fn name(&self) -> String {
        "random".into()
    }

    fn next_move(&mut self, ctx: &mut MoveContext<'_>) -> Result<Ball> {
        let cur = ctx.current;
        let k = &ctx.params.support;
        let radius = ctx.ratio * &cur.radius;
        let room = &cur.radius - &radius;
        let scale = 1i64 << RANDOM_BITS;
        let t = Vector(
            cur.center
                .iter()
                .map(|c| {
                    let j = ctx.rng.gen_range(-scale..=scale);
                    c + &(&room * &Scalar::ratio(j, scale))
                })
                .collect(),
        );
        let left = &room - &t.dist_sup(&cur.center);
        let y = if left.cmp_zero().is_gt() { k.point_in_ball(&t, &left).ok() } else { None };
        match y.or_else(|| k.point_in_ball(&cur.center, &room).ok()) {
            Some(y) => Ok(Ball::new(y, radius)),
            None => recenter(cur, ctx.ratio, k),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetMode {
    /// The `b` (or `A`) at which the nearest point of the rescaled lattice
    /// becomes an exact hit.
    LatticeHit,
    /// The nearest trace `<w_p, b> = j` of a currently small hyperplane.
    Coset,
}

impl FromStr for TargetMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lattice-hit" | "toward-lattice-hit" => Ok(TargetMode::LatticeHit),
            "coset" | "toward-coset" => Ok(TargetMode::Coset),
            _ => Err(Error::Parse(format!("unknown targeting mode {s:?}"))),
        }
    }
}

/// Moves as far as allowed toward a dangerous point.
#[derive(Clone, Debug)]
pub struct Targeting {
    pub mode: TargetMode,
}

impl Targeting {
    pub fn new(mode: TargetMode) -> Self {
        Targeting { mode }
    }

    /// The point this player heads for from the ball `cur`.
    pub fn target(&self, ctx: &MoveContext<'_>, cur: &Ball) -> Result<Option<Vector>> {
        let p = ctx.params;
        let (m, n) = (p.m, p.n);
        let dim = p.support.dim();
        if let (Some(a), true) = (&ctx.fixed.a, dim == m) {
            if self.mode == TargetMode::Coset {
                if let Some(t) = coset_target(ctx, a, cur)? {
                    return Ok(Some(t));
                }
            }
            let x = rescaled_lattice(a, &cur.center, &cur.radius)?;
            let v = lattice::closest_point(&x, &Vector::zeros(m + n))?;
            // v = (s (A q + p - c), t q): the hit is at b = A q + p.
            let hit = cur.center.add(&v.particle(m).scale(&cur.radius));
            return Ok(Some(hit));
        }
        if let (Some(b), true) = (&ctx.fixed.b, dim == m * n) {
            let c = matrix_from_point(&cur.center, m, n);
            let x = rescaled_lattice(&c, b, &cur.radius)?;
            let v = lattice::closest_point(&x, &Vector::zeros(m + n))?;
            let coords = x.lattice.coordinates(&v.sub(&x.shift))?;
            let q = Vector(coords[m..].iter().map(|c| Scalar::from_integer(c.round())).collect());
            let pp = Vector(coords[..m].iter().map(|c| Scalar::from_integer(c.round())).collect());
            if q.is_zero() {
                return Ok(None);
            }
            return Ok(Some(point_from_matrix(&project_rows(&c, &q, &b.sub(&pp)))));
        }
        Ok(None)
    }
}

/// Closest `A` to `c` (row by row) with `A q = rhs`.
fn project_rows(c: &Matrix, q: &Vector, rhs: &Vector) -> Matrix {
    let qq = q.norm2_sq();
    let rows = c
        .rows()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let gap = &(&rhs[i] - &r.dot(q)) / &qq;
            r.add(&q.scale(&gap))
        })
        .collect();
    Matrix::from_rows(rows).expect("same shape")
}

/// Nearest projection of the centre onto a trace `<w_p, b> = round(<w_p, c>)`
/// of a hyperplane small at the step matching White's last radius.
fn coset_target(ctx: &MoveContext<'_>, a: &Matrix, cur: &Ball) -> Result<Option<Vector>> {
    let Ok(f) = ctx.params.schedule() else { return Ok(None) };
    let Some(s) = grid_index(&f, &(&cur.radius / &ctx.params.alpha)) else { return Ok(None) };
    let m = f.m;
    let l0 = lattice::affine_lattice_of(a, &Vector::zeros(m))?.lattice;
    let ls = f.flow_lattice(s, &l0);
    let hs = lattice::enumerate_small_hyperplanes(&ls, &Scalar::from_int(f.k() as i64))?;
    let c = &cur.center;
    let best = hs
        .iter()
        .filter_map(|h| {
            let wp = f.flow_dual(-s, &h.dual_vector).particle(m);
            if wp.is_zero() {
                return None;
            }
            let x = wp.dot(c);
            let j = Scalar::from_integer(x.round());
            let t = c.add(&wp.scale(&(&(&j - &x) / &wp.norm2_sq())));
            Some((t.dist_sup(c), t))
        })
        .reduce(|a, b| if b.0 < a.0 { b } else { a });
    Ok(best.map(|(_, t)| t))
}

fn clamp_to_cube(t: &Vector, c: &Vector, r: &Scalar) -> Vector {
    Vector(t.iter().zip(c.iter()).map(|(x, y)| x.max_of(&(y - r)).min_of(&(y + r))).collect())
}

impl Strategy for Targeting {
    fn name(&self) -> String {
        match self.mode {
            TargetMode::LatticeHit => "targeting:lattice-hit".into(),
            TargetMode::Coset => "targeting:coset".into(),
        }
    }

    fn next_move(&mut self, ctx: &mut MoveContext<'_>) -> Result<Ball> {
        let cur = ctx.current;
        let k = &ctx.params.support;
        let radius = ctx.ratio * &cur.radius;
        let room = &cur.radius - &radius;
        let Some(target) = self.target(ctx, cur).ok().flatten() else {
            return recenter(cur, ctx.ratio, k);
        };
        let clamped = clamp_to_cube(&target, &cur.center, &room);
        let mut cands = Vec::new();
        if k.contains(&clamped) {
            cands.push(clamped.clone());
        } else {
            let left = &room - &clamped.dist_sup(&cur.center);
            if left.cmp_zero().is_gt() {
                cands.extend(k.point_in_ball(&clamped, &left).ok());
            }
        }
        cands.extend(k.candidates_in_ball(&cur.center, &room, 32));
        if k.contains(&cur.center) {
            cands.push(cur.center.clone());
        }
        let best = cands
            .into_iter()
            .filter(|y| y.dist_sup(&cur.center) <= room)
            .map(|y| (y.dist_sup(&target), y))
            .reduce(|a, b| if b.0 < a.0 { b } else { a });
        match best {
            Some((_, y)) => Ok(Ball::new(y, radius)),
            None => recenter(cur, ctx.ratio, k),
        }
    }
}
