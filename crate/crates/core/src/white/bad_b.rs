use serde::{Deserialize, Serialize};

use super::{dyadic_below, matrix_from_point};
use crate::diophantine::dist_to_z;
use crate::error::{Error, Result};
use crate::fractal::{avoid_hyperplanes, AffinePlane, DecayParams};
use crate::game::{recenter, validate_move, Ball, GameParams, MoveContext, Strategy};
use crate::lattice::{self, AffineLattice, Lattice};
use crate::linalg::{Matrix, Vector};
use crate::scalar::Scalar;

/// `L_A(b) Z^k` rescaled so a ball of radius `rho` in matrix space has
/// unit size: particle coordinates times `rho^(-1)`, time coordinates
/// times `rho^(m/n)`.
pub fn rescaled_lattice(a: &Matrix, b: &Vector, rho: &Scalar) -> Result<AffineLattice> {
    let (m, n) = (a.nrows(), a.ncols());
    let x = lattice::affine_lattice_of(a, b)?;
    let sp = rho.recip();
    let st = rho.pow(m as i32).exact_root(n as u32).unwrap_or_else(|| {
        let f = rho.to_float(crate::scalar::default_precision());
        Scalar::from_float((f.ln() * m as u32 / n as u32).exp())
    });
    let scale = |v: &Vector| Vector(v.iter().enumerate().map(|(i, c)| if i < m { c * &sp } else { c * &st }).collect());
    let rows = x.lattice.basis().rows().iter().map(scale).collect();
    Ok(AffineLattice { lattice: Lattice::general(Matrix::from_rows(rows)?)?, shift: scale(&x.shift) })
}

/// Integer coordinates `(p, q)` of a point of a rescaled `L_A(b) Z^k`.
fn split(x: &AffineLattice, v: &Vector, m: usize) -> Result<(Vector, Vector)> {
    let c: Vec<Scalar> = x.lattice.coordinates(&v.sub(&x.shift))?.iter().map(|c| Scalar::from_integer(c.round())).collect();
    Ok((Vector(c[..m].to_vec()), Vector(c[m..].to_vec())))
}

/// `|A q + p - b|_sup / |q|_sup`, or `None` for `q = 0`.
pub fn margin(a: &Matrix, b: &Vector, p: &Vector, q: &Vector) -> Option<Scalar> {
    if q.is_zero() {
        return None;
    }
    Some(&a.mul_vec(q).add(p).sub(b).norm_sup() / &q.norm_sup())
}

/// What the wrapper did in one acting round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadBEvent {
    pub round: usize,
    /// Centre of the base strategy's ball `B'`.
    pub base_center: Vector,
    pub p: Vector,
    pub q: Vector,
    pub avoided: bool,
    pub eps: Scalar,
    /// `|A'' q + p - b|_sup / |q|_sup` at the returned centre.
    pub margin: Option<Scalar>,
}

/// Wrapper turning a strategy for `Bad(m, n)` (ratio `alpha0`) into one
/// for `Bad^b` with ratio `alpha = alpha0 * factor`.
pub struct BadB {
    b: Vector,
    base: Box<dyn Strategy>,
    alpha0: Scalar,
    stride: usize,
    events: Vec<BadBEvent>,
    last: Option<(Vector, Vector)>,
}

impl BadB {
    /// The factor `alpha / alpha0`: a power of two at most half of `(4 (2C)^(1/eta))^(-1)`.
    pub fn factor(decay: &DecayParams) -> Scalar {
        dyadic_below(decay, 1)
    }

    /// `params.alpha` must equal `alpha0 * factor` for some `alpha0 < 1`.
    pub fn new(params: &GameParams, b: Vector, base: Box<dyn Strategy>, stride: usize) -> Result<Self> {
        params.validate()?;
        if params.support.dim() != params.m * params.n {
            return Err(Error::DimensionMismatch("the game must live in matrix space R^(mn)".into()));
        }
        if b.dim() != params.m || !b.is_exact() {
            return Err(Error::InvalidParameter("b must be a rational vector with m entries".into()));
        }
        if crate::diophantine::dist_to_z(&b.0).is_zero() {
            return Err(Error::InvalidParameter("b must not be an integer vector".into()));
        }
        if stride == 0 {
            return Err(Error::InvalidParameter("stride must be positive".into()));
        }
        let alpha0 = &params.alpha / &Self::factor(&params.decay);
        if alpha0 >= Scalar::one() {
            return Err(Error::InvalidParameter(format!(
                "alpha = {} is too large: alpha / {} must stay below 1",
                params.alpha,
                Self::factor(&params.decay)
            )));
        }
        Ok(BadB { b, base, alpha0, stride, events: Vec::new(), last: None })
    }

    pub fn alpha0(&self) -> &Scalar {
        &self.alpha0
    }

    pub fn events(&self) -> &[BadBEvent] {
        &self.events
    }

    /// The last shortest vector `(p, q)`.
    pub fn last_vector(&self) -> Option<&(Vector, Vector)> {
        self.last.as_ref()
    }
}

impl Strategy for BadB {
    fn name(&self) -> String {
        format!("badB({})", self.base.name())
    }

    fn next_move(&mut self, ctx: &mut MoveContext<'_>) -> Result<Ball> {
        let k = &ctx.params.support;
        if !(ctx.round - 1).is_multiple_of(self.stride) {
            return recenter(ctx.current, ctx.ratio, k);
        }
        let (m, n) = (ctx.params.m, ctx.params.n);
        let rho = ctx.current.radius.clone();
        let alpha = ctx.ratio.clone();
        let alpha0 = self.alpha0.clone();
        let base_ball = {
            let mut sub = MoveContext {
                params: ctx.params,
                fixed: ctx.fixed,
                round: ctx.round,
                history: ctx.history,
                current: ctx.current,
                ratio: &alpha0,
                rng: &mut *ctx.rng,
            };
            self.base.next_move(&mut sub)?
        };
        validate_move(ctx.current, &base_ball, &alpha0, k).map_err(Error::BaseStrategyViolation)?;
        let a1 = matrix_from_point(&base_ball.center, m, n);
        let r1 = &alpha0 * &rho;
        let x = rescaled_lattice(&a1, &self.b, &r1)?;
        let v = lattice::closest_point(&x, &Vector::zeros(m + n))?;
        let (p, q) = split(&x, &v, m)?;
        self.last = Some((p.clone(), q.clone()));
        let radius = &alpha * &rho;
        let eps = &(&alpha * &rho) * &Scalar::from_int(2);
        let mut event = BadBEvent {
            round: ctx.round,
            base_center: base_ball.center.clone(),
            p: p.clone(),
            q: q.clone(),
            avoided: false,
            eps: eps.clone(),
            margin: None,
        };
        if q.is_zero() {
            self.events.push(event);
            return Ok(Ball::new(base_ball.center, radius));
        }
        // {A : (Aq)_1 = b_1 - p_1} contains {A : Aq = b - p}.
        let mut normal = Vector::zeros(m * n);
        for j in 0..n {
            normal.0[j] = q[j].clone();
        }
        let plane = AffinePlane { normal, offset: &self.b[0] - &p[0], eps: eps.clone() };
        let ratio = &alpha / &alpha0;
        let y = avoid_hyperplanes(k, &ctx.params.decay, &base_ball.center, &r1, &ratio, &[plane], 1)
            .map_err(|e| Error::StrategyBreakdown(format!("round {}: {e}", ctx.round)))?;
        let a2 = matrix_from_point(&y, m, n);
        event.avoided = true;
        event.margin = margin(&a2, &self.b, &p, &q);
        self.events.push(event);
        Ok(Ball::new(y, radius))
    }
}

/// Heuristic `Bad(m, n)` player: looks at the shortest vector `(p, q)` of the
/// rescaled `L_A(0) Z^k` at the current centre and moves to the nearby
/// candidate maximising `|A q|_Z / |q|`. Not backed by any guarantee.
#[derive(Clone, Debug, Default)]
pub struct Greedy;

impl Strategy for Greedy {
    fn name(&self) -> String {
        "greedy".into()
    }

    fn next_move(&mut self, ctx: &mut MoveContext<'_>) -> Result<Ball> {
        let (m, n) = (ctx.params.m, ctx.params.n);
        let k = &ctx.params.support;
        let cur = ctx.current;
        let radius = ctx.ratio * &cur.radius;
        let room = &cur.radius - &radius;
        let a = matrix_from_point(&cur.center, m, n);
        let zero = Vector::zeros(m);
        let x = rescaled_lattice(&a, &zero, &radius)?;
        let v = lattice::shortest_vector(&x.lattice)?;
        let (_, q) = split(&x, &v, m)?;
        let cands = k.candidates_in_ball(&cur.center, &room, 16);
        let best = cands
            .into_iter()
            .filter_map(|y| {
                let a = matrix_from_point(&y, m, n);
                let score = &dist_to_z(&a.mul_vec(&q).0) / &q.norm_sup();
                (!q.is_zero()).then_some((score, y))
            })
            .reduce(|best, c| if c.0 > best.0 { c } else { best });
        match best {
            Some((_, y)) => Ok(Ball::new(y, radius)),
            None => recenter(cur, ctx.ratio, k),
        }
    }
}
