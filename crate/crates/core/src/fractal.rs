//! Supports of absolutely decaying measures: boxes with Lebesgue measure and
//! attractors of iterated homotheties with their self-similar measure.
//!
//! Balls are sup-norm balls. Distances to hyperplanes are Euclidean.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::scalar::Scalar;

/// Default membership resolution.
pub fn default_resolution() -> Scalar {
    Scalar::from_rational(Rational::from((1, 1_000_000_000)))
}

/// Hard cap on cells or grid points examined by one search.
const SEARCH_BUDGET: usize = 2_000_000;

/// `y -> ratio * y + offset` with `0 < ratio < 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IfsMap {
    pub ratio: Scalar,
    pub offset: Vector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SupportSpec {
    /// `prod [lo_i, hi_i]` with Lebesgue measure.
    Box { lo: Vec<Scalar>, hi: Vec<Scalar> },
    /// Attractor of the maps with the natural self-similar measure.
    Ifs { dim: usize, maps: Vec<IfsMap> },
}

/// Image of the base box under a composition of maps: `y -> s*y + t`.
#[derive(Clone, Debug)]
struct Cell {
    s: Scalar,
    t: Vector,
    depth: usize,
}

impl SupportSpec {
    pub fn unit_box(d: usize) -> Self {
        SupportSpec::Box { lo: vec![Scalar::zero(); d], hi: vec![Scalar::one(); d] }
    }

    /// Middle-thirds Cantor set.
    pub fn cantor() -> Self {
        let third = Scalar::ratio(1, 3);
        SupportSpec::Ifs {
            dim: 1,
            maps: vec![
                IfsMap { ratio: third.clone(), offset: Vector::zeros(1) },
                IfsMap { ratio: third, offset: Vector(vec![Scalar::ratio(2, 3)]) },
            ],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SupportSpec::Box { lo, .. } => lo.len(),
            SupportSpec::Ifs { dim, .. } => *dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SupportSpec::Box { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return Err(Error::InvalidParameter("box bounds must be nonempty and of equal length".into()));
                }
                if lo.iter().zip(hi).any(|(a, b)| a >= b) {
                    return Err(Error::InvalidParameter("box needs lo < hi in every coordinate".into()));
                }
            }
            SupportSpec::Ifs { dim, maps } => {
                if *dim == 0 || maps.len() < 2 {
                    return Err(Error::InvalidParameter("an IFS needs dim >= 1 and at least two maps".into()));
                }
                for f in maps {
                    if f.offset.dim() != *dim {
                        return Err(Error::DimensionMismatch("IFS offset dimension".into()));
                    }
                    if f.ratio.cmp_zero() != std::cmp::Ordering::Greater || f.ratio >= Scalar::one() {
                        return Err(Error::InvalidParameter(format!("IFS ratio {} not in (0,1)", f.ratio)));
                    }
                }
            }
        }
        Ok(())
    }

    fn maps(&self) -> &[IfsMap] {
        match self {
            SupportSpec::Ifs { maps, .. } => maps,
            SupportSpec::Box { .. } => &[],
        }
    }

    /// Fixed point of map `i`: `o / (1 - r)`.
    fn fixed_point(&self, i: usize) -> Vector {
        let f = &self.maps()[i];
        f.offset.scale(&(&Scalar::one() - &f.ratio).recip())
    }

    /// Bounding box of the attractor (the box spanned by the fixed points,
    /// which every map sends into itself), or the box itself.
    pub fn base_box(&self) -> (Vector, Vector) {
        match self {
            SupportSpec::Box { lo, hi } => (Vector(lo.clone()), Vector(hi.clone())),
            SupportSpec::Ifs { dim, maps } => {
                let pts: Vec<Vector> = (0..maps.len()).map(|i| self.fixed_point(i)).collect();
                let lo = (0..*dim).map(|j| pts.iter().map(|p| p[j].clone()).reduce(|a, b| a.min_of(&b)).unwrap());
                let hi = (0..*dim).map(|j| pts.iter().map(|p| p[j].clone()).reduce(|a, b| a.max_of(&b)).unwrap());
                (Vector(lo.collect()), Vector(hi.collect()))
            }
        }
    }

    /// Self-similar weights `r_i^s` with `sum r_i^s = 1`.
    pub fn weights(&self) -> Vec<f64> {
        let rs: Vec<f64> = self.maps().iter().map(|f| f.ratio.to_f64()).collect();
        if rs.windows(2).all(|w| w[0] == w[1]) {
            return vec![1.0 / rs.len() as f64; rs.len()];
        }
        let s = similarity_dimension(&rs);
        rs.iter().map(|r| r.powf(s)).collect()
    }

    fn root(&self) -> Cell {
        Cell { s: Scalar::one(), t: Vector::zeros(self.dim()), depth: 0 }
    }

    fn child(&self, c: &Cell, i: usize) -> Cell {
        let f = &self.maps()[i];
        Cell { s: &c.s * &f.ratio, t: c.t.add(&f.offset.scale(&c.s)), depth: c.depth + 1 }
    }

    fn cell_box(&self, c: &Cell, base: &(Vector, Vector)) -> (Vector, Vector) {
        (base.0.scale(&c.s).add(&c.t), base.1.scale(&c.s).add(&c.t))
    }

    /// A point of K inside the cell: image of the first fixed point.
    fn anchor(&self, c: &Cell) -> Vector {
        self.fixed_point(0).scale(&c.s).add(&c.t)
    }

    fn base_diameter(&self) -> Scalar {
        let (lo, hi) = self.base_box();
        hi.sub(&lo).norm_sup()
    }

    /// Membership at the default resolution.
    pub fn contains(&self, x: &Vector) -> bool {
        self.contains_at(x, &default_resolution())
    }

    /// `x` lies in K, or for an attractor within `res` of a cell of
    /// diameter at most `res`.
    pub fn contains_at(&self, x: &Vector, res: &Scalar) -> bool {
        if x.dim() != self.dim() {
            return false;
        }
        match self {
            SupportSpec::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| a <= v && v <= b),
            SupportSpec::Ifs { maps, .. } => {
                let base = self.base_box();
                let diam = self.base_diameter();
                let mut stack = vec![self.root()];
                let mut budget = SEARCH_BUDGET;
                while let Some(c) = stack.pop() {
                    budget = match budget.checked_sub(1) {
                        Some(b) => b,
                        None => return false,
                    };
                    if box_dist(&self.cell_box(&c, &base), x) > *res {
                        continue;
                    }
                    if &c.s * &diam <= *res {
                        return true;
                    }
                    for i in (0..maps.len()).rev() {
                        stack.push(self.child(&c, i));
                    }
                }
                false
            }
        }
    }

    /// A point of K within sup distance `r` of `x`.
    ///
    /// Boxes clamp `x`. Attractors descend through cells meeting the ball
    /// until their diameter is below `r/4` and return the anchor nearest to
    /// `x` at that depth.
    pub fn point_in_ball(&self, x: &Vector, r: &Scalar) -> Result<Vector> {
        match self {
            SupportSpec::Box { lo, hi } => {
                let y = Vector(x.iter().zip(lo.iter().zip(hi)).map(|(v, (a, b))| v.max_of(a).min_of(b)).collect());
                if y.dist_sup(x) <= *r {
                    Ok(y)
                } else {
                    Err(Error::EmptyIntersection)
                }
            }
            SupportSpec::Ifs { maps, .. } => {
                let base = self.base_box();
                let diam = self.base_diameter();
                let quarter = r * &Scalar::ratio(1, 4);
                let floor = default_resolution().min_of(&quarter);
                let mut level = vec![self.root()];
                loop {
                    level.retain(|c| box_dist(&self.cell_box(c, &base), x) <= *r);
                    if level.is_empty() {
                        return Err(Error::EmptyIntersection);
                    }
                    let cell_diam = &level[0].s * &diam;
                    if cell_diam < quarter {
                        let mut best: Option<(Scalar, Vector)> = None;
                        for c in &level {
                            let a = self.anchor(c);
                            let d = a.dist_sup(x);
                            if d <= *r && best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                                best = Some((d, a));
                            }
                        }
                        if let Some((_, a)) = best {
                            return Ok(a);
                        }
                        if cell_diam < floor {
                            return Err(Error::EmptyIntersection);
                        }
                    }
                    if level.len() * maps.len() > SEARCH_BUDGET {
                        return Err(Error::EmptyIntersection);
                    }
                    level = level.iter().flat_map(|c| (0..maps.len()).map(|i| self.child(c, i))).collect();
                    // Unequal ratios give mixed diameters; keep the coarsest first.
                    level.sort_by(|a, b| b.s.cmp_s(&a.s));
                }
            }
        }
    }

    /// Up to `limit` points of K in `B(x, radius)`, coarse to fine, in a fixed order.
    pub fn candidates_in_ball(&self, x: &Vector, radius: &Scalar, limit: usize) -> Vec<Vector> {
        self.candidates(x, radius).take(limit).collect()
    }

    /// Candidate points of K in `B(x, radius)`, coarse to fine, in a fixed order.
    fn candidates(&self, x: &Vector, radius: &Scalar) -> Box<dyn Iterator<Item = Vector> + '_> {
        match self {
            SupportSpec::Box { .. } => {
                let x = x.clone();
                let radius = radius.clone();
                let d = self.dim();
                let grid = (0u32..=40).flat_map(move |j| grid_level(d, j)).take(SEARCH_BUDGET);
                Box::new(grid.filter_map(move |(j, idx)| {
                    let h = &radius * &Scalar::from_rational(Rational::from((1, Integer::from(1) << j)));
                    let y = Vector(x.iter().zip(&idx).map(|(c, i)| c + &h.mul_int(&Integer::from(*i))).collect());
                    self.contains(&y).then_some(y)
                }))
            }
            SupportSpec::Ifs { maps, .. } => {
                let base = self.base_box();
                let x = x.clone();
                let radius = radius.clone();
                let floor = default_resolution();
                let diam = self.base_diameter();
                let mut queue = VecDeque::from([self.root()]);
                let mut seen = 0usize;
                Box::new(std::iter::from_fn(move || loop {
                    let c = queue.pop_front()?;
                    seen += 1;
                    if seen > SEARCH_BUDGET {
                        return None;
                    }
                    if box_dist(&self.cell_box(&c, &base), &x) > radius {
                        continue;
                    }
                    if &c.s * &diam >= floor {
                        for i in 0..maps.len() {
                            queue.push_back(self.child(&c, i));
                        }
                    }
                    let a = self.anchor(&c);
                    if a.dist_sup(&x) <= radius {
                        return Some(a);
                    }
                }))
            }
        }
    }
}

/// Grid offsets of level `j`: integer vectors in `[-2^j, 2^j]^d`, skipping
/// those already present at level `j-1`, ordered by sup norm then lexicographically.
fn grid_level(d: usize, j: u32) -> impl Iterator<Item = (u32, Vec<i64>)> {
    let half = 1i64 << j;
    (0..=half).flat_map(move |shell| {
        let mut pts = Vec::new();
        let side = (2 * shell + 1) as usize;
        let total = side.pow(d as u32);
        for idx in 0..total {
            let mut rem = idx;
            let mut v = Vec::with_capacity(d);
            for _ in 0..d {
                v.push((rem % side) as i64 - shell);
                rem /= side;
            }
            v.reverse();
            if v.iter().map(|c| c.abs()).max().unwrap_or(0) != shell {
                continue;
            }
            if j > 0 && v.iter().all(|c| c % 2 == 0) {
                continue;
            }
            pts.push((j, v));
        }
        pts
    })
}

/// Sup distance from `x` to an axis box.
fn box_dist(b: &(Vector, Vector), x: &Vector) -> Scalar {
    let mut d = Scalar::zero();
    for ((lo, hi), v) in b.0.iter().zip(b.1.iter()).zip(x.iter()) {
        if v < lo {
            d = d.max_of(&(lo - v));
        } else if v > hi {
            d = d.max_of(&(v - hi));
        }
    }
    d
}

fn similarity_dimension(rs: &[f64]) -> f64 {
    let f = |s: f64| rs.iter().map(|r| r.powf(s)).sum::<f64>() - 1.0;
    let (mut lo, mut hi) = (0.0, 64.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Constants of the decay inequality `mu(B(x,r) ∩ L^(eps)) <= C (eps/r)^eta mu(B(x,r))`
/// for `r < r0`, plus optional Federer and fitting constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayParams {
    pub c: f64,
    pub eta: f64,
    pub r0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub federer_d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitting: Option<Fitting>,
}

/// `N_K(beta, x, r) >= M beta^{-delta}` for `r < r1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fitting {
    pub m: f64,
    pub r1: f64,
    pub delta: f64,
}

impl DecayParams {
    pub fn new(c: f64, eta: f64, r0: f64) -> Result<Self> {
        if !(c > 0.0 && eta > 0.0 && r0 > 0.0) || !(c.is_finite() && eta.is_finite() && r0.is_finite()) {
            return Err(Error::InvalidParameter(format!("decay constants must be positive (C={c}, eta={eta}, r0={r0})")));
        }
        Ok(DecayParams { c, eta, r0, federer_d: None, fitting: None })
    }

    /// Shipped constants.
    ///
    /// A box in dimension `d` gets `eta = 1` with `C = 2` for `d = 1` and
    /// `C = 2^(d + 1/2)` above (largest cube section is `sqrt 2` times a face).
    /// An attractor gets `eta` = similarity dimension and `C = 4`.
    pub fn for_support(k: &SupportSpec) -> Self {
        match k {
            SupportSpec::Box { lo, .. } => {
                let d = lo.len();
                let c = if d == 1 { 2.0 } else { 2f64.powf(d as f64 + 0.5) };
                DecayParams { c, eta: 1.0, r0: 1.0, federer_d: Some(2f64.powi(d as i32)), fitting: None }
            }
            SupportSpec::Ifs { .. } => {
                let rs: Vec<f64> = k.maps().iter().map(|f| f.ratio.to_f64()).collect();
                let s = similarity_dimension(&rs);
                DecayParams { c: 4.0, eta: s, r0: 1.0, federer_d: None, fitting: None }
            }
        }
    }

    /// `(4 (2 xi C)^(1/eta))^(-1)`, the strict upper bound for the White ratio.
    pub fn alpha_bound(&self, xi0_ceil: u32) -> f64 {
        1.0 / (4.0 * (2.0 * xi0_ceil as f64 * self.c).powf(1.0 / self.eta))
    }
}

/// `{y : <normal, y> = offset}` thickened by `eps` (Euclidean distance).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffinePlane {
    pub normal: Vector,
    pub offset: Scalar,
    pub eps: Scalar,
}

impl AffinePlane {
    /// Whether `y` is strictly farther than `eps` from the plane.
    pub fn clears(&self, y: &Vector) -> bool {
        let g = &self.normal.dot(y) - &self.offset;
        g.square() > &self.eps.square() * &self.normal.norm2_sq()
    }

    /// Euclidean distance from `y` to the plane, as a float.
    pub fn distance(&self, y: &Vector) -> f64 {
        let g = &self.normal.dot(y) - &self.offset;
        g.abs().to_f64() / self.normal.norm2_sq().to_f64().sqrt()
    }
}

/// A point of K in `B(x, r(1 - alpha))` clearing every thickened plane.
///
/// `xi0_ceil` is `ceil(sqrt k)` for the lattice dimension `k` driving the
/// plane count. Fails with [`Error::NotFound`] naming the violated
/// precondition, or if the search budget runs out.
pub fn avoid_hyperplanes(
    k: &SupportSpec,
    p: &DecayParams,
    x: &Vector,
    r: &Scalar,
    alpha: &Scalar,
    planes: &[AffinePlane],
    xi0_ceil: u32,
) -> Result<Vector> {
    let max_planes = 2 * xi0_ceil as usize + 1;
    if planes.len() > max_planes {
        return Err(Error::NotFound(format!("{} planes exceed the limit 2*ceil(xi0)+1 = {max_planes}", planes.len())));
    }
    let two_ar = &(alpha * r) * &Scalar::from_int(2);
    if let Some(pl) = planes.iter().find(|pl| pl.eps > two_ar) {
        return Err(Error::NotFound(format!("eps = {} exceeds 2*alpha*r = {two_ar}", pl.eps)));
    }
    let bound = p.alpha_bound(xi0_ceil);
    if alpha.to_f64() >= bound {
        return Err(Error::NotFound(format!("alpha = {alpha} is not below (4(2*{xi0_ceil}*C)^(1/eta))^-1 = {bound}")));
    }
    let radius = r * &(&Scalar::one() - alpha);
    k.candidates(x, &radius)
        .find(|y| planes.iter().all(|pl| pl.clears(y)))
        .ok_or_else(|| Error::NotFound("search exhausted without a point clearing every plane".into()))
}

/// Greedy lower bound on the number of disjoint balls `B(y, beta r)` with
/// `y ∈ K` inside `B(x, r)`. Starts from `x` itself.
pub fn fitting_count(k: &SupportSpec, beta: &Scalar, x: &Vector, r: &Scalar) -> usize {
    let small = beta * r;
    let reach = r - &small;
    let sep = &small * &Scalar::from_int(2);
    let mut chosen: Vec<Vector> = vec![x.clone()];
    let limit = 10_000usize;
    for y in k.candidates(x, &reach).take(limit) {
        if chosen.iter().all(|c| c.dist_sup(&y) >= sep) {
            chosen.push(y);
        }
    }
    chosen.len()
}

/// One sampled instance of the decay inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySample {
    pub x: Vec<f64>,
    pub r: f64,
    pub normal: Vec<f64>,
    pub offset: f64,
    pub eps: f64,
    /// `mu(B ∩ L^(eps)) / mu(B)`.
    pub measured: f64,
    /// `C (eps/r)^eta`.
    pub allowed: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub trials: usize,
    pub seed: u64,
    pub c: f64,
    pub eta: f64,
    /// Largest `measured / allowed` over all trials.
    pub max_ratio: f64,
    pub worst: Option<DecaySample>,
    pub counterexample: Option<DecaySample>,
    pub verdict: Verdict,
}

/// Float model of the support used by the sampler.
struct FloatK {
    dim: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    maps: Vec<(f64, Vec<f64>)>,
    weights: Vec<f64>,
    anchor: Vec<f64>,
    is_box: bool,
}

impl FloatK {
    fn new(k: &SupportSpec) -> Self {
        let (lo, hi) = k.base_box();
        let maps = k.maps().iter().map(|f| (f.ratio.to_f64(), f.offset.to_f64())).collect();
        let anchor = if k.maps().is_empty() { lo.to_f64() } else { k.fixed_point(0).to_f64() };
        FloatK {
            dim: k.dim(),
            lo: lo.to_f64(),
            hi: hi.to_f64(),
            maps,
            weights: k.weights(),
            anchor,
            is_box: matches!(k, SupportSpec::Box { .. }),
        }
    }

    fn sample_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        if self.is_box {
            return (0..self.dim).map(|j| rng.gen_range(self.lo[j]..=self.hi[j])).collect();
        }
        // Random address to depth 40, weighted by the self-similar measure.
        let mut s = 1.0;
        let mut t = vec![0.0; self.dim];
        for _ in 0..40 {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut pick = self.maps.len() - 1;
            for (i, w) in self.weights.iter().enumerate() {
                acc += w;
                if u < acc {
                    pick = i;
                    break;
                }
            }
            let (r, o) = &self.maps[pick];
            for j in 0..self.dim {
                t[j] += s * o[j];
            }
            s *= r;
        }
        (0..self.dim).map(|j| s * self.anchor[j] + t[j]).collect()
    }

    /// Measure of `{y in box(lo, hi) : |<n, y> - c| <= e}` (`e = inf` for no slab).
    fn measure(&self, ball_lo: &[f64], ball_hi: &[f64], n: &[f64], c: f64, e: f64) -> f64 {
        if self.is_box {
            let lo: Vec<f64> = (0..self.dim).map(|j| ball_lo[j].max(self.lo[j])).collect();
            let hi: Vec<f64> = (0..self.dim).map(|j| ball_hi[j].min(self.hi[j])).collect();
            if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
                return 0.0;
            }
            return box_slab_volume(&lo, &hi, n, c, e);
        }
        let mut total = 0.0;
        self.cell_measure(1.0, &vec![0.0; self.dim], 1.0, 0, ball_lo, ball_hi, n, c, e, &mut total);
        total
    }

    #[allow(clippy::too_many_arguments)]
    fn cell_measure(
        &self,
        s: f64,
        t: &[f64],
        w: f64,
        depth: usize,
        ball_lo: &[f64],
        ball_hi: &[f64],
        n: &[f64],
        c: f64,
        e: f64,
        total: &mut f64,
    ) {
        let lo: Vec<f64> = (0..self.dim).map(|j| s * self.lo[j] + t[j]).collect();
        let hi: Vec<f64> = (0..self.dim).map(|j| s * self.hi[j] + t[j]).collect();
        let inside_ball = (0..self.dim).all(|j| lo[j] >= ball_lo[j] && hi[j] <= ball_hi[j]);
        let outside_ball = (0..self.dim).any(|j| hi[j] < ball_lo[j] || lo[j] > ball_hi[j]);
        if outside_ball {
            return;
        }
        let (gmin, gmax) = linear_range(&lo, &hi, n, c);
        let inside_slab = e.is_infinite() || (gmin >= -e && gmax <= e);
        let outside_slab = !e.is_infinite() && (gmin > e || gmax < -e);
        if outside_slab {
            return;
        }
        if inside_ball && inside_slab {
            *total += w;
            return;
        }
        if depth >= 60 || w < 1e-13 {
            let a: Vec<f64> = (0..self.dim).map(|j| s * self.anchor[j] + t[j]).collect();
            let in_ball = (0..self.dim).all(|j| a[j] >= ball_lo[j] && a[j] <= ball_hi[j]);
            let g: f64 = a.iter().zip(n).map(|(x, y)| x * y).sum::<f64>() - c;
            if in_ball && (e.is_infinite() || g.abs() <= e) {
                *total += w;
            }
            return;
        }
        for (i, (r, o)) in self.maps.iter().enumerate() {
            let ct: Vec<f64> = (0..self.dim).map(|j| t[j] + s * o[j]).collect();
            self.cell_measure(s * r, &ct, w * self.weights[i], depth + 1, ball_lo, ball_hi, n, c, e, total);
        }
    }
}

/// Range of `<n, y> - c` over an axis box.
fn linear_range(lo: &[f64], hi: &[f64], n: &[f64], c: f64) -> (f64, f64) {
    let mut a = -c;
    let mut b = -c;
    for j in 0..n.len() {
        let (p, q) = (n[j] * lo[j], n[j] * hi[j]);
        a += p.min(q);
        b += p.max(q);
    }
    (a, b)
}

/// Volume of `{y in [lo, hi] : |<n, y> - c| <= e}`.
///
/// Uses `vol{<n, z> <= t} = sum_S (-1)^|S| (t - sum_{j in S} n_j w_j)_+^d / (d! prod n_j)`
/// on `[0, w]` with positive `n`, evaluated in 256-bit floats because the two
/// half-space volumes nearly cancel for thin slabs.
fn box_slab_volume(lo: &[f64], hi: &[f64], n: &[f64], c: f64, e: f64) -> f64 {
    const PREC: u32 = 256;
    let f = |x: f64| Float::with_val(PREC, x);
    let mut widths = Vec::new();
    let mut coef = Vec::new();
    let mut free = f(1.0);
    let mut shift = f(c);
    for j in 0..lo.len() {
        let w = f(hi[j]) - f(lo[j]);
        shift -= f(n[j]) * f(lo[j]);
        if n[j] == 0.0 {
            free *= &w;
            continue;
        }
        if n[j] < 0.0 {
            shift -= f(n[j]) * &w;
        }
        coef.push(f(n[j].abs()));
        widths.push(w);
    }
    if e.is_infinite() {
        return (free * widths.iter().fold(f(1.0), |a, w| a * w)).to_f64();
    }
    let d = coef.len();
    if d == 0 {
        return if shift.clone().abs() <= e { free.to_f64() } else { 0.0 };
    }
    let below = |t: Float| -> Float {
        let mut acc = f(0.0);
        for mask in 0u32..(1 << d) {
            let mut x = t.clone();
            for j in 0..d {
                if mask & (1 << j) != 0 {
                    x -= Float::with_val(PREC, &coef[j] * &widths[j]);
                }
            }
            if x > 0 {
                let term = x.pow(d as u32);
                if mask.count_ones() % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
        }
        let mut denom = f(1.0);
        for (j, cj) in coef.iter().enumerate() {
            denom *= cj;
            denom *= (j + 1) as u32;
        }
        acc / denom
    };
    let v = below(Float::with_val(PREC, &shift + e)) - below(Float::with_val(PREC, &shift - e));
    (free * v).to_f64().max(0.0)
}

/// Samples the decay inequality at random `x ∈ K`, `r < r0`, hyperplanes
/// passing near `x` (half the time through a point of K), and `eps/r` log-uniform
/// in `[1e-4, 1)`.
pub fn verify_absolute_decay(k: &SupportSpec, p: &DecayParams, trials: usize, seed: u64) -> DecayReport {
    let fk = FloatK::new(k);
    let base_diam = (0..fk.dim).map(|j| fk.hi[j] - fk.lo[j]).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio = 0.0f64;
    let mut worst = None;
    let mut counterexample = None;
    for _ in 0..trials {
        let x = fk.sample_point(&mut rng);
        let rmax = p.r0.min(base_diam);
        let r = rmax * 10f64.powf(-4.0 * rng.gen::<f64>()) * 0.999_999;
        let mut normal: Vec<f64> = (0..fk.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nn = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nn < 1e-6 {
            normal = vec![0.0; fk.dim];
            normal[0] = 1.0;
        } else {
            normal.iter_mut().for_each(|v| *v /= nn);
        }
        let through: Vec<f64> = if rng.gen_bool(0.5) {
            // A nearby point of K: jitter along a random address.
            let y = fk.sample_point(&mut rng);
            (0..fk.dim).map(|j| x[j] + (y[j] - x[j]) * r / base_diam.max(r)).collect()
        } else {
            (0..fk.dim).map(|j| x[j] + r * rng.gen_range(-1.0..1.0)).collect()
        };
        let offset: f64 = normal.iter().zip(&through).map(|(a, b)| a * b).sum();
        let eps = r * 10f64.powf(-4.0 * rng.gen::<f64>());
        let ball_lo: Vec<f64> = x.iter().map(|v| v - r).collect();
        let ball_hi: Vec<f64> = x.iter().map(|v| v + r).collect();
        let mb = fk.measure(&ball_lo, &ball_hi, &normal, 0.0, f64::INFINITY);
        if mb <= 0.0 {
            continue;
        }
        let ms = fk.measure(&ball_lo, &ball_hi, &normal, offset, eps);
        let measured = ms / mb;
        let allowed = p.c * (eps / r).powf(p.eta);
        let ratio = measured / allowed;
        let sample = DecaySample { x, r, normal, offset, eps, measured, allowed };
        if ratio > max_ratio {
            max_ratio = ratio;
            worst = Some(sample.clone());
        }
        if ratio > 1.0 + 1e-9 && counterexample.is_none() {
            counterexample = Some(sample);
        }
    }
    let verdict = if counterexample.is_some() { Verdict::Fail } else { Verdict::Pass };
    DecayReport { trials, seed, c: p.c, eta: p.eta, max_ratio, worst, counterexample, verdict }
}

/// Measures of all cells at `depth`; they sum to one.
pub fn cell_measures(k: &SupportSpec, depth: usize) -> Vec<f64> {
    let w = k.weights();
    let mut level = vec![1.0];
    for _ in 0..depth {
        level = level.iter().flat_map(|m| w.iter().map(move |x| m * x)).collect();
    }
    level
}
