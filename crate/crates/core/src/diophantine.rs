//! Badness functionals, finite-scale singularity scans and the lattice
//! trajectory checks that tie a pair `(A, b)` to the orbit of `L_A(b) Z^k`.

use std::cmp::Ordering;

use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lattice::{self, AffineLattice, FlowSchedule, Lattice};
use crate::linalg::{Matrix, Vector};
use crate::scalar::Scalar;

/// The pair `<A, b>` with `A` an `m x n` matrix and `b` in `R^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineSystem {
    pub m: usize,
    pub n: usize,
    pub a: Matrix,
    pub b: Vector,
}

impl AffineSystem {
    pub fn new(a: Matrix, b: Vector) -> Result<Self> {
        let (m, n) = (a.nrows(), a.ncols());
        if m == 0 || n == 0 {
            return Err(Error::DimensionMismatch("A must be nonempty".into()));
        }
        if b.dim() != m {
            return Err(Error::DimensionMismatch(format!("b has {} entries, expected {m}", b.dim())));
        }
        Ok(AffineSystem { m, n, a, b })
    }

    /// Homogeneous system with `b = 0`.
    pub fn homogeneous(a: Matrix) -> Result<Self> {
        let m = a.nrows();
        AffineSystem::new(a, Vector::zeros(m))
    }

    /// Scalar system `m = n = 1`.
    pub fn scalar(a: Scalar, b: Scalar) -> Self {
        AffineSystem { m: 1, n: 1, a: Matrix::from_rows(vec![Vector(vec![a])]).expect("1x1"), b: Vector(vec![b]) }
    }

    pub fn k(&self) -> usize {
        self.m + self.n
    }

    pub fn is_exact(&self) -> bool {
        self.a.is_exact() && self.b.is_exact()
    }

    /// `L_A(b) Z^k`.
    pub fn lattice(&self) -> AffineLattice {
        lattice::affine_lattice_of(&self.a, &self.b).expect("validated dimensions")
    }

    /// `L_A(0) Z^k`.
    pub fn homogeneous_lattice(&self) -> Lattice {
        self.lattice().lattice
    }

    /// Whether `b` is an integer vector.
    pub fn b_is_integral(&self) -> bool {
        dist_to_z(&self.b.0).is_zero()
    }

    /// `A q - b` for an integer vector `q`.
    pub fn residual(&self, q: &[Integer]) -> Vector {
        let mut out = self.b.neg();
        for (j, qj) in q.iter().enumerate() {
            if *qj == 0 {
                continue;
            }
            for i in 0..self.m {
                out.0[i] = &out.0[i] + &self.a.get(i, j).mul_int(qj);
            }
        }
        out
    }

    /// `|q|^n |Aq - b|_Z^m`.
    pub fn product(&self, q: &[Integer]) -> Scalar {
        let d = dist_to_z(&self.residual(q).0);
        let s = q.iter().map(|x| Integer::from(x.abs_ref())).max().unwrap_or_default();
        &Scalar::from_integer(s).pow(self.n as i32) * &d.pow(self.m as i32)
    }
}

/// Sup-norm distance from `x` to the nearest integer vector.
pub fn dist_to_z(x: &[Scalar]) -> Scalar {
    x.iter().fold(Scalar::zero(), |acc, v| acc.max_of(&v.dist_to_int()))
}

/// Minimum of the product over one dyadic window `[2^j, 2^{j+1})` of `|q|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowMin {
    pub j: u32,
    pub lo: u64,
    pub hi: u64,
    pub min_product: Scalar,
    pub argmin_q: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadnessEstimate {
    #[serde(rename = "Q")]
    pub q_max: u64,
    pub min_product: Scalar,
    pub argmin_q: Vec<i64>,
    pub window_minima: Vec<WindowMin>,
}

/// Deterministic order on candidate `q`: by sup norm, then l1 norm, then
/// reverse lexicographic (so `1` precedes `-1` and `e_1` comes first).
pub fn q_order(a: &[i64], b: &[i64]) -> Ordering {
    let sup = |q: &[i64]| q.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
    let l1 = |q: &[i64]| q.iter().map(|x| x.unsigned_abs()).sum::<u64>();
    sup(a).cmp(&sup(b)).then(l1(a).cmp(&l1(b))).then_with(|| b.cmp(a))
}

#[derive(Clone)]
struct Best {
    value: Scalar,
    q: Vec<i64>,
}

fn better(cand: &Best, cur: &Option<Best>) -> bool {
    match cur {
        None => true,
        Some(c) => match cand.value.cmp_s(&c.value) {
            Ordering::Less => true,
            Ordering::Equal => q_order(&cand.q, &c.q) == Ordering::Less,
            Ordering::Greater => false,
        },
    }
}

fn merge(into: &mut Option<Best>, from: Option<Best>) {
    if let Some(f) = from {
        if better(&f, into) {
            *into = Some(f);
        }
    }
}

fn window_of(s: u64) -> u32 {
    63 - s.leading_zeros()
}

/// Decodes index `idx` of the cube `[-r, r]^n` into a vector.
fn cube_point(mut idx: u64, r: i64, n: usize) -> Vec<i64> {
    let side = (2 * r + 1) as u64;
    let mut q = Vec::with_capacity(n);
    for _ in 0..n {
        q.push((idx % side) as i64 - r);
        idx /= side;
    }
    q
}

/// Exact minimum of `|q|^n |Aq - b|_Z^m` over `0 < |q|_sup <= Q`, plus dyadic
/// window minima.
pub fn badness_scan(s: &AffineSystem, q_max: u64) -> BadnessEstimate {
    badness_scan_with(s, q_max, Execution::default())
}

pub fn badness_scan_with(s: &AffineSystem, q_max: u64, exec: Execution) -> BadnessEstimate {
    assert!(q_max >= 1, "Q must be at least 1");
    let r = q_max as i64;
    let total = (2 * q_max + 1).pow(s.n as u32);
    let nwin = window_of(q_max) as usize + 1;
    let chunk = 4096u64;
    let chunks = total.div_ceil(chunk) as usize;
    let parts = exec.map_range(chunks, |c| {
        let mut wins: Vec<Option<Best>> = vec![None; nwin];
        let lo = c as u64 * chunk;
        let hi = (lo + chunk).min(total);
        for idx in lo..hi {
            let q = cube_point(idx, r, s.n);
            let sup = q.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
            if sup == 0 {
                continue;
            }
            let qi: Vec<Integer> = q.iter().map(|&x| Integer::from(x)).collect();
            let cand = Best { value: s.product(&qi), q };
            let w = window_of(sup) as usize;
            if better(&cand, &wins[w]) {
                wins[w] = Some(cand);
            }
        }
        wins
    });
    let mut wins: Vec<Option<Best>> = vec![None; nwin];
    for p in parts {
        for (w, b) in wins.iter_mut().zip(p) {
            merge(w, b);
        }
    }
    let mut global: Option<Best> = None;
    for w in &wins {
        merge(&mut global, w.clone());
    }
    let global = global.expect("Q >= 1 gives a candidate");
    let window_minima = wins
        .into_iter()
        .enumerate()
        .filter_map(|(j, b)| {
            b.map(|b| WindowMin {
                j: j as u32,
                lo: 1u64 << j,
                hi: ((1u64 << (j + 1)) - 1).min(q_max),
                min_product: b.value,
                argmin_q: b.q,
            })
        })
        .collect();
    BadnessEstimate { q_max, min_product: global.value, argmin_q: global.q, window_minima }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SingularVerdict {
    #[serde(rename = "SINGULAR-UP-TO-SCALE")]
    SingularUpToScale,
    #[serde(rename = "NOT-SINGULAR-UP-TO-SCALE")]
    NotSingularUpToScale,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularCell {
    pub eps: Scalar,
    #[serde(rename = "N")]
    pub n_bound: u64,
    /// Smallest `|Aq|_Z` over `0 < |q| < N`.
    pub best: Scalar,
    pub witness: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularScan {
    pub cells: Vec<SingularCell>,
    pub verdict: SingularVerdict,
}

/// For each `(eps, N)`: is there `0 < |q| < N` with `|Aq|_Z^m N^n <= eps^m`?
///
/// The verdict is singular when every `eps` has witnesses at all `N` in the
/// upper half of the grid. This is a statement about the grid only.
pub fn is_singular_scan(a: &Matrix, eps_grid: &[Scalar], n_grid: &[u64]) -> Result<SingularScan> {
    is_singular_scan_with(a, eps_grid, n_grid, Execution::default())
}

pub fn is_singular_scan_with(
    a: &Matrix,
    eps_grid: &[Scalar],
    n_grid: &[u64],
    exec: Execution,
) -> Result<SingularScan> {
    if eps_grid.is_empty() || n_grid.is_empty() {
        return Err(Error::InvalidParameter("grids must be nonempty".into()));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid[0] < 2 {
        return Err(Error::InvalidParameter("N grid must be increasing and start at 2 or more".into()));
    }
    let sys = AffineSystem::homogeneous(a.clone())?;
    let (m, n) = (sys.m, sys.n);
    let rmax = n_grid[n_grid.len() - 1] - 1;
    // Shell minima by sup norm.
    let shells: Vec<Option<Best>> = exec.map_range(rmax as usize, |i| {
        let r = i as i64 + 1;
        let mut best: Option<Best> = None;
        let total = (2 * r as u64 + 1).pow(n as u32);
        for idx in 0..total {
            let q = cube_point(idx, r, n);
            if q.iter().map(|x| x.unsigned_abs()).max() != Some(r as u64) {
                continue;
            }
            let qi: Vec<Integer> = q.iter().map(|&x| Integer::from(x)).collect();
            let cand = Best { value: dist_to_z(&sys.residual(&qi).0), q };
            if better(&cand, &best) {
                best = Some(cand);
            }
        }
        best
    });
    let mut prefix: Vec<Best> = Vec::with_capacity(shells.len());
    let mut run: Option<Best> = None;
    for s in shells {
        if let Some(s) = s {
            if run.as_ref().is_none_or(|r| s.value < r.value) {
                run = Some(s);
            }
        }
        prefix.push(run.clone().expect("shell 1 is nonempty"));
    }
    let mut cells = Vec::new();
    for eps in eps_grid {
        for &nb in n_grid {
            let best = &prefix[(nb - 2) as usize];
            let lhs = &best.value.pow(m as i32) * &Scalar::from_int(nb as i64).pow(n as i32);
            let ok = lhs <= eps.pow(m as i32);
            cells.push(SingularCell {
                eps: eps.clone(),
                n_bound: nb,
                best: best.value.clone(),
                witness: ok.then(|| best.q.clone()),
            });
        }
    }
    let upper = n_grid.len() / 2;
    let all = eps_grid.iter().enumerate().all(|(ei, _)| {
        (upper..n_grid.len()).all(|ni| cells[ei * n_grid.len() + ni].witness.is_some())
    });
    let verdict = if all { SingularVerdict::SingularUpToScale } else { SingularVerdict::NotSingularUpToScale };
    Ok(SingularScan { cells, verdict })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    ApproachingZero,
    BoundedAway,
    Diverging,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub ell: i64,
    pub t: f64,
    /// Sup distance of `g_{ell T} L_A(b) Z^k` to the origin.
    pub min_dist: Scalar,
    /// Shortest nonzero vector, reported when `b` is integral.
    pub nonzero_min: Option<Scalar>,
}

impl TrajectoryPoint {
    /// The value used for comparisons: nonzero minimum when present.
    pub fn effective(&self) -> &Scalar {
        self.nonzero_min.as_ref().unwrap_or(&self.min_dist)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryReport {
    pub schedule: FlowSchedule,
    pub minima: Vec<TrajectoryPoint>,
    pub infimum: Scalar,
    pub infimum_ell: i64,
    pub trend: Trend,
}

impl TrajectoryReport {
    /// CSV with columns `ell,t,min_dist`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ell,t,min_dist\n");
        for p in &self.minima {
            out.push_str(&format!("{},{},{}\n", p.ell, p.t, p.min_dist.to_canonical()));
        }
        out
    }
}

/// Distance to the origin of `g_{ell T} L_A(b) Z^k` for `ell = 0..=L`.
pub fn trajectory_minima(s: &AffineSystem, f: &FlowSchedule, l: u32) -> Result<TrajectoryReport> {
    trajectory_minima_with(s, f, l, Execution::default())
}

pub fn trajectory_minima_with(s: &AffineSystem, f: &FlowSchedule, l: u32, exec: Execution) -> Result<TrajectoryReport> {
    if s.k() > lattice::MAX_DIM {
        return Err(Error::DimensionTooLarge(s.k()));
    }
    if f.m != s.m || f.n != s.n {
        return Err(Error::DimensionMismatch("flow schedule does not match (m, n)".into()));
    }
    let x0 = s.lattice();
    let integral = s.b_is_integral();
    let zero = Vector::zeros(s.k());
    let pts = exec.map_range(l as usize + 1, |ell| -> Result<TrajectoryPoint> {
        let ell = ell as i64;
        let x = lattice::apply_flow(f, ell, &x0);
        let (_, d) = lattice::closest_point_with_distance(&x, &zero)?;
        let nonzero_min = if integral { Some(lattice::shortest_vector(&x.lattice)?.norm_sup()) } else { None };
        Ok(TrajectoryPoint { ell, t: f.time(ell), min_dist: d, nonzero_min })
    });
    let minima = pts.into_iter().collect::<Result<Vec<_>>>()?;
    let (mut infimum, mut infimum_ell) = (minima[0].effective().clone(), 0);
    for p in &minima {
        if *p.effective() < infimum {
            infimum = p.effective().clone();
            infimum_ell = p.ell;
        }
    }
    let trend = classify(&minima);
    Ok(TrajectoryReport { schedule: f.clone(), minima, infimum, infimum_ell, trend })
}

fn classify(pts: &[TrajectoryPoint]) -> Trend {
    let half = pts.len() / 2;
    let min_of = |s: &[TrajectoryPoint]| s.iter().map(|p| p.effective().to_f64()).fold(f64::INFINITY, f64::min);
    let first = min_of(&pts[..half.max(1)]);
    let second = min_of(&pts[half..]);
    if second < 1e-3 && second < first {
        Trend::ApproachingZero
    } else if second >= 2.0 * first && pts.last().map(|p| p.effective().to_f64()) > Some(first) {
        Trend::Diverging
    } else {
        Trend::BoundedAway
    }
}

/// Lower bound on the trajectory implied by the badness scan at one step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerCheck {
    pub ell: i64,
    /// `delta_ell^k`.
    pub traj_pow_k: Scalar,
    pub bound: Scalar,
    pub ok: bool,
}

/// Upper bound on the trajectory implied by one scanned `q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperCheck {
    pub q: Vec<i64>,
    pub ell: i64,
    pub traj_pow_k: Scalar,
    pub bound: Scalar,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DaniReport {
    pub min_product: Scalar,
    pub trajectory_infimum: Scalar,
    /// Factor `u^{-n}` applied to trajectory values in the upper direction.
    pub scale_factor: Scalar,
    pub lower: Vec<LowerCheck>,
    pub upper: Vec<UpperCheck>,
    /// `q` whose matching step lies beyond the horizon.
    pub skipped: Vec<Vec<i64>>,
    pub pass: bool,
}

/// Checks both directions of the scan/trajectory correspondence at the
/// sampled scales, comparing `k`-th powers so rational inputs stay exact.
///
/// Lower: if `u^{-m ell} <= Q` then
/// `delta_ell^k >= min(1, P_Q, (u^{-n ell} |b|_Z)^k)` (last term dropped for
/// integral `b`, where nonzero minima are used).
/// Upper: for scanned `q` with `d = |Aq - b|_Z > 0` and the first `ell` where
/// `u^{-k ell} d >= |q|`, `delta_ell^k <= u^{-nk} |q|^n d^m`; for `d = 0`,
/// `delta_L <= u^{mL} |q|`.
pub fn dani_cross_check(s: &AffineSystem, f: &FlowSchedule, l: u32, q_max: u64) -> Result<DaniReport> {
    dani_cross_check_with(s, f, l, q_max, Execution::default())
}

pub fn dani_cross_check_with(
    s: &AffineSystem,
    f: &FlowSchedule,
    l: u32,
    q_max: u64,
    exec: Execution,
) -> Result<DaniReport> {
    let scan = badness_scan_with(s, q_max, exec);
    let traj = trajectory_minima_with(s, f, l, exec)?;
    let k = s.k() as i32;
    let integral = s.b_is_integral();
    let bz = dist_to_z(&s.b.0);
    let qs = Scalar::from_int(q_max as i64);
    let mut lower = Vec::new();
    for p in &traj.minima {
        if &f.time_factor(p.ell) * &qs < Scalar::one() {
            continue;
        }
        let mut bound = Scalar::one().min_of(&scan.min_product);
        if !integral {
            bound = bound.min_of(&(&f.particle_factor(p.ell) * &bz).pow(k));
        }
        let traj_pow_k = p.effective().pow(k);
        let ok = traj_pow_k >= bound;
        lower.push(LowerCheck { ell: p.ell, traj_pow_k, bound, ok });
    }
    let mut cands: Vec<Vec<i64>> = vec![scan.argmin_q.clone()];
    for w in &scan.window_minima {
        if !cands.contains(&w.argmin_q) {
            cands.push(w.argmin_q.clone());
        }
    }
    let scale_factor = f.u.pow(-(s.n as i32));
    let mut upper = Vec::new();
    let mut skipped = Vec::new();
    for q in cands {
        let qi: Vec<Integer> = q.iter().map(|&x| Integer::from(x)).collect();
        let d = dist_to_z(&s.residual(&qi).0);
        let qn = Scalar::from_int(q.iter().map(|x| x.abs()).max().unwrap_or(0));
        if d.is_zero() {
            let p = &traj.minima[l as usize];
            let bound = &f.time_factor(l as i64) * &qn;
            let ok = *p.effective() <= bound;
            upper.push(UpperCheck { q, ell: l as i64, traj_pow_k: p.effective().pow(k), bound: bound.pow(k), ok });
            continue;
        }
        let hit = traj.minima.iter().find(|p| &f.particle_factor(p.ell) * &d >= &f.time_factor(p.ell) * &qn);
        match hit {
            Some(p) => {
                let prod = &qn.pow(s.n as i32) * &d.pow(s.m as i32);
                let bound = &scale_factor.pow(k) * &prod;
                let traj_pow_k = p.effective().pow(k);
                let ok = traj_pow_k <= bound;
                upper.push(UpperCheck { q, ell: p.ell, traj_pow_k, bound, ok });
            }
            None => skipped.push(q),
        }
    }
    let pass = lower.iter().all(|c| c.ok) && upper.iter().all(|c| c.ok);
    Ok(DaniReport {
        min_product: scan.min_product,
        trajectory_infimum: traj.infimum,
        scale_factor,
        lower,
        upper,
        skipped,
        pass,
    })
}

/// Lower bound for the badness over `0 < |q|_sup <= Q` read off the trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteCertificate {
    #[serde(rename = "Q")]
    pub q_max: u64,
    /// Steps `0..=steps` of the trajectory that were inspected.
    pub steps: u32,
    /// Smallest trajectory distance over those steps.
    pub delta: Scalar,
    /// `u^(mn) delta^k`, or zero when `certified` is false.
    pub c0: Scalar,
    /// False when the trajectory kept approaching the origin faster than
    /// the horizon grew.
    pub certified: bool,
}

/// `|q|^n |Aq - b|_Z^m >= u^(mn) delta^k` for all `0 < |q|_sup <= Q`.
///
/// For such `q` let `l` be the first step with `u^(m l) |q| < delta`. At that
/// step the time coordinates of the lattice point for `q` are below `delta`,
/// so its particle coordinates are not: `|Aq - b|_Z >= delta u^(n l)`.
/// Minimality of `l` gives `u^(m l) >= u^m delta / |q|`. The steps needed
/// run up to the first `L` with `u^(m L) Q < delta`; the horizon is extended
/// at most 64 steps past its initial value before giving up with `c0 = 0`.
pub fn finite_certificate(s: &AffineSystem, f: &FlowSchedule, q_max: u64) -> Result<FiniteCertificate> {
    let qs = Scalar::from_int(q_max as i64);
    let per_step = f.u.to_f64().ln().abs() * f.m as f64;
    let first = ((q_max as f64).ln() / per_step).ceil() as u32 + 2;
    let mut steps = first;
    loop {
        let traj = trajectory_minima(s, f, steps)?;
        let delta = traj.infimum;
        if !delta.is_zero() && &f.time_factor(steps as i64) * &qs < delta {
            let c0 = &f.u.pow((f.m * f.n) as i32) * &delta.pow(s.k() as i32);
            return Ok(FiniteCertificate { q_max, steps, delta, c0, certified: true });
        }
        if delta.is_zero() || steps >= first + 64 {
            return Ok(FiniteCertificate { q_max, steps, delta, c0: Scalar::zero(), certified: false });
        }
        steps += 4;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn third(b: Scalar) -> AffineSystem {
        AffineSystem::scalar(Scalar::ratio(1, 3), b)
    }

    #[test]
    fn dist_to_z_examples() {
        assert_eq!(dist_to_z(&[Scalar::ratio(2, 5)]), Scalar::ratio(2, 5));
        assert_eq!(dist_to_z(&[Scalar::ratio(7, 10), Scalar::ratio(6, 5)]), Scalar::ratio(3, 10));
        assert!(dist_to_z(&[Scalar::from_int(2)]).is_zero());
    }

    #[test]
    fn q_order_prefers_positive_and_first_axis() {
        assert_eq!(q_order(&[1], &[-1]), Ordering::Less);
        assert_eq!(q_order(&[1, 0], &[0, 1]), Ordering::Less);
        assert_eq!(q_order(&[2], &[-1]), Ordering::Greater);
    }

    #[test]
    fn rational_hit() {
        let e = badness_scan(&third(Scalar::zero()), 10);
        assert!(e.min_product.is_zero());
        assert_eq!(e.argmin_q, vec![3]);
    }

    #[test]
    fn affine_third_sixth() {
        let e = badness_scan(&third(Scalar::ratio(1, 6)), 1000);
        assert_eq!(e.min_product, Scalar::ratio(1, 6));
        assert_eq!(e.argmin_q, vec![1]);
        for w in &e.window_minima {
            assert!(w.min_product >= Scalar::ratio(1 << w.j, 6));
        }
    }

    #[test]
    fn scan_modes_agree() {
        let s = AffineSystem::scalar(Scalar::ratio(5, 17), Scalar::ratio(1, 7));
        let a = badness_scan_with(&s, 300, Execution::Parallel);
        let b = badness_scan_with(&s, 300, Execution::Sequential);
        assert_eq!(a, b);
    }

    #[test]
    fn singular_scans() {
        let third = Matrix::from_rows(vec![Vector::parse(&["1/3"]).unwrap()]).unwrap();
        let eps = vec![Scalar::ratio(1, 10), Scalar::ratio(1, 100)];
        let r = is_singular_scan(&third, &eps, &[10, 100, 1000]).unwrap();
        assert_eq!(r.verdict, SingularVerdict::SingularUpToScale);
        let zero = Matrix::zeros(1, 2);
        let r = is_singular_scan(&zero, &eps, &[10, 100]).unwrap();
        assert_eq!(r.verdict, SingularVerdict::SingularUpToScale);
        assert_eq!(r.cells[0].witness, Some(vec![1, 0]));
        let phi = Matrix::from_rows(vec![Vector(vec![Scalar::named("golden", 128).unwrap()])]).unwrap();
        let r = is_singular_scan(&phi, &[Scalar::ratio(1, 10)], &[1000]).unwrap();
        assert_eq!(r.verdict, SingularVerdict::NotSingularUpToScale);
    }

    #[test]
    fn trajectories() {
        let f = FlowSchedule::new(1, 1, Scalar::ratio(1, 2)).unwrap();
        let r = trajectory_minima(&third(Scalar::ratio(1, 6)), &f, 40).unwrap();
        assert!(r.minima.iter().all(|p| p.min_dist >= Scalar::ratio(1, 20)));
        assert_eq!(r.trend, Trend::Diverging);
        let r = trajectory_minima(&third(Scalar::ratio(1, 3)), &f, 40).unwrap();
        assert!(r.infimum < Scalar::ratio(1, 1000));
        let z = AffineSystem::scalar(Scalar::zero(), Scalar::zero());
        let r = trajectory_minima(&z, &f, 5).unwrap();
        assert!(r.minima.iter().all(|p| p.min_dist.is_zero()));
        assert!(r.to_csv().starts_with("ell,t,min_dist\n0,0,0\n"));
    }

    #[test]
    fn dani_rational_cases() {
        let f = FlowSchedule::new(1, 1, Scalar::ratio(1, 2)).unwrap();
        let r = dani_cross_check(&third(Scalar::ratio(1, 6)), &f, 40, 1024).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(!r.lower.is_empty() && !r.upper.is_empty());
        let r = dani_cross_check(&third(Scalar::ratio(1, 3)), &f, 40, 1024).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
