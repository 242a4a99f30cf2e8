use std::cmp::Ordering;

use rug::Integer;
use serde::{Deserialize, Serialize};

use super::{case1_detect, grid_index, required_precision, xi0_ceil};
use crate::error::{Error, Result};
use crate::fractal::{avoid_hyperplanes, AffinePlane};
use crate::game::{recenter, Ball, GameParams, MoveContext, Strategy};
use crate::lattice::{self, FlowSchedule, Hyperplane, Lattice};
use crate::linalg::{Matrix, Vector};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadAOptions {
    /// Steps looked ahead when ranking newly small hyperplanes.
    pub lookahead: usize,
    /// Try the rational shortcut before the general strategy.
    pub case1: bool,
    /// Sup-norm bound for the integer vector searched by the shortcut.
    pub case1_bound: i64,
}

impl Default for BadAOptions {
    fn default() -> Self {
        BadAOptions { lookahead: 20, case1: true, case1_bound: 50 }
    }
}

/// A hyperplane that is small at the current step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tracked {
    /// Primitive dual vector of `L_A(0) Z^k` (step-0 coordinates).
    pub dual_vector: Vector,
    /// Coefficients of `dual_vector` on the dual basis.
    pub coeffs: Vector,
    pub first_small: i64,
    pub still_small: bool,
}

/// Protection certified by one avoidance move.
///
/// For every `b` in White's ball and every step `s`, each point of
/// `g_s L_A(b) Z^k` has sup norm at least `margin / (sqrt(k) |w_s|)`, where
/// `w_s` is the flowed dual vector and `margin` a lower bound for
/// `dist(<w_p, b>, Z)` on the ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub round: usize,
    pub step: i64,
    pub from: i64,
    pub to: i64,
    pub dual_vector: Vector,
    pub margin: Scalar,
    /// Minimum of `margin^2 / (k |w_s|^2)` over `from..=to`.
    pub bound_sq: Scalar,
    pub bound: f64,
    /// `margin / (alpha |w_step|)`.
    pub delta_hat: f64,
}

impl LedgerEntry {
    /// The certified squared sup-norm bound at step `s` (valid for all `s`).
    pub fn bound_sq_at(&self, f: &FlowSchedule, s: i64) -> Scalar {
        let w = f.flow_dual(s, &self.dual_vector);
        &self.margin.square() / &(&Scalar::from_int(f.k() as i64) * &w.norm2_sq())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case1Certificate {
    pub round: usize,
    pub step: i64,
    pub dual_vector: Vector,
    /// Pyramid volume of `H ∩ L_A(0) Z^k` and the reduced `(b, 0)`.
    pub pyramid_volume: Scalar,
    pub margin: Scalar,
    /// `(margin / (sqrt(m) |a|))^m`: lower bound for `|q|^n |Aq - b|_Z^m`.
    pub c0: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadAState {
    pub schedule: FlowSchedule,
    /// `rho(B_1) = u^(n j0)`.
    pub j0: i64,
    pub step: i64,
    pub tracked: Vec<Tracked>,
    pub ledger: Vec<LedgerEntry>,
    pub case1: Option<Vector>,
    pub certificate: Option<Case1Certificate>,
    pub any_moves_win: bool,
}

/// Hyperplane-avoidance strategy for `Bad_A`.
pub struct BadA {
    a: Matrix,
    lattice0: Lattice,
    dual0: Lattice,
    opts: BadAOptions,
    last_step: i64,
    state: BadAState,
}

impl BadA {
    pub fn new(params: &GameParams, a: Matrix, opts: BadAOptions) -> Result<Self> {
        let schedule = params.validate()?;
        if a.nrows() != params.m || a.ncols() != params.n || params.support.dim() != params.m {
            return Err(Error::DimensionMismatch("A must be m x n and the game must live in R^m".into()));
        }
        let j0 = grid_index(&schedule, &params.start.radius).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "start radius {} is not a power of u^n = {}",
                params.start.radius,
                schedule.u.pow(schedule.n as i32)
            ))
        })?;
        let last_step = j0 + params.rounds as i64 - 1 + opts.lookahead as i64;
        if !a.is_exact() {
            let need = required_precision(&schedule, last_step);
            let have = a.rows().iter().flat_map(|r| r.iter()).filter_map(Scalar::precision).min().unwrap_or(u32::MAX);
            if have < need {
                return Err(Error::InvalidParameter(format!(
                    "A carries {have} bits; {need} are needed to follow the flow for {last_step} steps"
                )));
            }
        }
        let case1 = if opts.case1 && a.is_exact() { case1_detect(&a, opts.case1_bound).ok() } else { None };
        let zero = Vector::zeros(params.m);
        let lattice0 = lattice::affine_lattice_of(&a, &zero)?.lattice;
        let dual0 = lattice0.dual()?;
        Ok(BadA {
            a,
            lattice0,
            dual0,
            opts,
            last_step,
            state: BadAState {
                schedule,
                j0,
                step: j0,
                tracked: Vec::new(),
                ledger: Vec::new(),
                case1,
                certificate: None,
                any_moves_win: false,
            },
        })
    }

    pub fn state(&self) -> &BadAState {
        &self.state
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    /// Set once the rational shortcut has made its move: any later moves win.
    pub fn any_moves_win(&self) -> bool {
        self.state.any_moves_win
    }

    fn k(&self) -> usize {
        self.state.schedule.k()
    }

    fn norm_sq_at(&self, w0: &Vector, s: i64) -> Scalar {
        self.state.schedule.flow_dual(s, w0).norm2_sq()
    }

    /// Small hyperplanes at step `s` as (coefficients, step-0 dual vector).
    fn small_at(&self, s: i64) -> Result<Vec<(Vector, Vector)>> {
        let f = &self.state.schedule;
        let ls = f.flow_lattice(s, &self.lattice0);
        let hs = lattice::enumerate_small_hyperplanes(&ls, &Scalar::from_int(self.k() as i64))?;
        Ok(hs
            .into_iter()
            .map(|h| {
                let coeffs: Vec<Integer> = ls.basis().rows().iter().map(|r| r.dot(&h.dual_vector).round()).collect();
                let w0 = self.dual0.point(&coeffs);
                (Vector::from_integers(&coeffs), w0)
            })
            .collect())
    }

    fn update_tracked(&mut self, s: i64, small: &[(Vector, Vector)]) {
        let prev = std::mem::take(&mut self.state.tracked);
        self.state.tracked = small
            .iter()
            .map(|(c, w)| {
                let first = prev.iter().find(|t| &t.coeffs == c).map_or(s, |t| t.first_small);
                Tracked { dual_vector: w.clone(), coeffs: c.clone(), first_small: first, still_small: true }
            })
            .collect();
    }

    /// Consecutive steps after `s` (up to the lookahead) on which `w0` stays small.
    fn persistence(&self, w0: &Vector, s: i64) -> usize {
        let k = Scalar::from_int(self.k() as i64);
        (1..=self.opts.lookahead as i64).take_while(|t| self.norm_sq_at(w0, s + t) <= k).count()
    }

    /// Moves off the thickened traces `<w_p, b> = j` that can be nearest to
    /// `<w_p, b>` on the ball (at most `2 ceil(sqrt k) + 1`, closest first) and
    /// returns the new centre, the margin and the raw pyramid volume.
    fn avoid(&self, ctx: &MoveContext<'_>, w0: &Vector) -> Result<(Vector, Scalar, Scalar)> {
        let m = self.state.schedule.m;
        let b = ctx.current;
        let alpha = ctx.ratio;
        let wp = w0.particle(m);
        let x = wp.dot(&b.center);
        // Integers that are nearest to <w_p, b> for some b in the ball.
        let reach = &Scalar::ratio(1, 2) + &(&b.radius * &wp.norm_l1());
        let eps = &(alpha * &b.radius) * &Scalar::from_int(2);
        let mut offsets = Vec::new();
        let mut j = (&x - &reach).floor();
        let hi = (&x + &reach).ceil();
        while j <= hi {
            let off = Scalar::from_integer(j.clone());
            let gap = (&off - &x).abs();
            if gap <= reach {
                offsets.push((gap, off));
            }
            j += 1;
        }
        offsets.sort_by(|a, b| a.0.cmp_s(&b.0));
        offsets.truncate(2 * xi0_ceil(self.k()) as usize + 1);
        let planes: Vec<AffinePlane> =
            offsets.into_iter().map(|(_, off)| AffinePlane { normal: wp.clone(), offset: off, eps: eps.clone() }).collect();
        let p = ctx.params;
        let y = avoid_hyperplanes(&p.support, &p.decay, &b.center, &b.radius, alpha, &planes, xi0_ceil(self.k()))
            .map_err(|e| Error::StrategyBreakdown(format!("round {}: {e}", ctx.round)))?;
        let (hb, lambda0) = lattice::hyperplane_basis(&Hyperplane::from_dual(w0.clone()), &self.lattice0)?;
        let n = self.state.schedule.n;
        let shift = lambda0.scale(&Scalar::from_integer(wp.dot(&y).round()));
        let v = y.concat(&Vector::zeros(n)).sub(&shift);
        let vol = lattice::pyramid_volume(&hb, &v)?;
        let slack = &(alpha * &b.radius) * &wp.norm_l1();
        let margin = (&vol - &slack).max_of(&Scalar::zero());
        Ok((y, margin, vol))
    }

    fn ledger_entry(&self, round: usize, s: i64, to: i64, w0: Vector, margin: Scalar, alpha: &Scalar) -> LedgerEntry {
        let f = &self.state.schedule;
        let k = Scalar::from_int(self.k() as i64);
        let worst = (s..=to).map(|t| self.norm_sq_at(&w0, t)).reduce(|a, b| a.max_of(&b)).expect("nonempty range");
        let bound_sq = &margin.square() / &(&k * &worst);
        let ws = f.flow_dual(s, &w0).norm2_sq().to_f64().sqrt();
        LedgerEntry {
            round,
            step: s,
            from: s,
            to,
            delta_hat: margin.to_f64() / (alpha.to_f64() * ws),
            bound: bound_sq.to_f64().sqrt(),
            bound_sq,
            dual_vector: w0,
            margin,
        }
    }
}

impl Strategy for BadA {
    fn name(&self) -> String {
        "badA".into()
    }

    fn next_move(&mut self, ctx: &mut MoveContext<'_>) -> Result<Ball> {
        let s = self.state.j0 + ctx.round as i64 - 1;
        self.state.step = s;
        let small = self.small_at(s)?;
        self.update_tracked(s, &small);
        let idle = |ctx: &MoveContext<'_>| recenter(ctx.current, ctx.ratio, &ctx.params.support);

        if let Some(w0) = self.state.case1.clone() {
            let third_sq = Scalar::ratio(1, 9);
            if self.state.any_moves_win || self.norm_sq_at(&w0, s) >= third_sq {
                return idle(ctx);
            }
            let (y, margin, vol) = self.avoid(ctx, &w0)?;
            let m = self.state.schedule.m;
            let a_norm = &Scalar::from_int(m as i64) * &w0.particle(m).norm2_sq();
            let c0 = (&margin / &a_norm.sqrt()).pow(m as i32);
            let entry = self.ledger_entry(ctx.round, s, self.last_step, w0.clone(), margin.clone(), ctx.ratio);
            self.state.ledger.push(entry);
            self.state.certificate =
                Some(Case1Certificate { round: ctx.round, step: s, dual_vector: w0, pyramid_volume: vol, margin, c0 });
            self.state.any_moves_win = true;
            return Ok(Ball::new(y, ctx.ratio * &ctx.current.radius));
        }

        if ctx.round == 1 {
            return idle(ctx);
        }
        let k = Scalar::from_int(self.k() as i64);
        let m = self.state.schedule.m;
        let mut newly: Vec<(usize, Vector)> = small
            .iter()
            .filter(|(_, w)| !w.particle(m).is_zero() && self.norm_sq_at(w, s - 1) > k)
            .map(|(_, w)| (self.persistence(w, s), w.clone()))
            .collect();
        if newly.is_empty() {
            return idle(ctx);
        }
        newly.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| lex(&a.1, &b.1)));
        let (pers, w0) = newly.swap_remove(0);
        let (y, margin, _) = self.avoid(ctx, &w0)?;
        let entry = self.ledger_entry(ctx.round, s, s + pers as i64, w0, margin, ctx.ratio);
        self.state.ledger.push(entry);
        Ok(Ball::new(y, ctx.ratio * &ctx.current.radius))
    }
}

fn lex(a: &Vector, b: &Vector) -> Ordering {
    a.iter().zip(b.iter()).map(|(x, y)| x.cmp_s(y)).find(|o| *o != Ordering::Equal).unwrap_or(Ordering::Equal)
}
