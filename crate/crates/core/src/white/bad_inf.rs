use serde::{Deserialize, Serialize};

use crate::diophantine::{badness_scan, trajectory_minima, AffineSystem, BadnessEstimate, TrajectoryReport};
use crate::error::{Error, Result};
use crate::game::{limit_point, Transcript};
use crate::lattice::{self, FlowSchedule};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BadInfVerdict {
    #[serde(rename = "DIVERGES")]
    Diverges,
    #[serde(rename = "DOES-NOT-DIVERGE")]
    DoesNotDiverge,
    #[serde(rename = "NOT-APPLICABLE")]
    NotApplicable,
}

impl std::fmt::Display for BadInfVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BadInfVerdict::Diverges => "DIVERGES",
            BadInfVerdict::DoesNotDiverge => "DOES-NOT-DIVERGE",
            BadInfVerdict::NotApplicable => "NOT-APPLICABLE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadInfReport {
    pub schedule: FlowSchedule,
    /// `min_H |g_s H|^2` over hyperplanes of `g_s L_A(0) Z^k`, for `s = 0..=steps`.
    pub covolume_sq: Vec<Scalar>,
    /// Consecutive quotients of `covolume_sq`.
    pub ratios: Vec<Scalar>,
    /// Whether every quotient from `s = 1` on equals `u^(2n)`.
    pub rate_exact: bool,
    pub trajectory: Option<TrajectoryReport>,
    pub badness: Option<BadnessEstimate>,
    pub verdict: BadInfVerdict,
}

/// Growth report for the limit point `b*` of a finished game with fixed `A`.
///
/// The minimal covolume is the Euclidean shortest vector of the flowed dual.
/// If it does not collapse (second half of the steps not below `1e-3` times
/// the first half) the verdict is NOT-APPLICABLE. Otherwise the badness
/// windows at `b*` must be nondecreasing from the middle window on, with the
/// last at least twice the one there, for DIVERGES.
pub fn bad_inf_verify(t: &Transcript, steps: u32, q_max: u64) -> Result<BadInfReport> {
    let a = t.fixed.a.clone().ok_or_else(|| Error::InvalidTranscript("transcript has no fixed A".into()))?;
    let (b, _) = limit_point(t)?;
    let f = t.params.schedule()?;
    let sys = AffineSystem::new(a, b)?;
    let l0 = sys.homogeneous_lattice();
    let covolume_sq = (0..=steps as i64)
        .map(|s| Ok(lattice::shortest_vector_l2(&f.flow_lattice(s, &l0).dual()?)?.1))
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<Scalar> = covolume_sq.windows(2).map(|w| &w[1] / &w[0]).collect();
    let rate = f.u.pow(2 * f.n as i32);
    let rate_exact = ratios.len() > 1 && ratios[1..].iter().all(|r| *r == rate);

    let half = covolume_sq.len() / 2;
    let min_f64 = |xs: &[Scalar]| xs.iter().map(Scalar::to_f64).fold(f64::INFINITY, f64::min);
    let (first, second) = (min_f64(&covolume_sq[..half.max(1)]), min_f64(&covolume_sq[half..]));
    let trajectory = Some(trajectory_minima(&sys, &f, steps)?);
    if second >= 1e-3 * first {
        return Ok(BadInfReport {
            schedule: f,
            covolume_sq,
            ratios,
            rate_exact,
            trajectory,
            badness: None,
            verdict: BadInfVerdict::NotApplicable,
        });
    }
    let scan = badness_scan(&sys, q_max);
    let verdict = if diverges(&scan) { BadInfVerdict::Diverges } else { BadInfVerdict::DoesNotDiverge };
    Ok(BadInfReport { schedule: f, covolume_sq, ratios, rate_exact, trajectory, badness: Some(scan), verdict })
}

fn diverges(scan: &BadnessEstimate) -> bool {
    let w = &scan.window_minima;
    if w.len() < 2 {
        return false;
    }
    let tail = &w[w.len().div_ceil(2) - 1..];
    let rising = tail.windows(2).all(|p| p[1].min_product >= p[0].min_product);
    let last = &tail[tail.len() - 1].min_product;
    rising && *last >= &tail[0].min_product * &Scalar::from_int(2)
}
