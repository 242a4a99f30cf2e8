mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use schmidt_core::black::{RandomBlack, TargetMode, Targeting};
use schmidt_core::diophantine::{badness_scan, finite_certificate, trajectory_minima, AffineSystem};
use schmidt_core::fractal::{avoid_hyperplanes, AffinePlane, DecayParams, SupportSpec};
use schmidt_core::game::{
    radius_chain, run_game, validate_move, validate_transcript, Ball, Fixed, GameParams, MoveContext, Strategy,
};
use schmidt_core::lattice::FlowSchedule;
use schmidt_core::white::{alpha_for, margin, matrix_from_point, BadA, BadAOptions, BadB, Greedy};
use schmidt_core::{Matrix, Result, Scalar, Vector, Violation};

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

/// Exact middle-thirds membership, following ternary digits.
fn in_cantor(x: &Scalar, depth: usize) -> bool {
    let (third, two_thirds) = (Scalar::ratio(1, 3), Scalar::ratio(2, 3));
    let mut x = x.clone();
    for _ in 0..depth {
        if x.cmp_zero().is_lt() || x > Scalar::one() {
            return false;
        }
        if x <= third {
            x = &x * &Scalar::from_int(3);
        } else if x >= two_thirds {
            x = &(&x * &Scalar::from_int(3)) - &Scalar::from_int(2);
        } else {
            return false;
        }
    }
    true
}

fn in_support(k: &SupportSpec, x: &Vector) -> bool {
    match k {
        SupportSpec::Box { lo, hi } => x.iter().zip(lo).zip(hi).all(|((c, l), h)| c >= l && c <= h),
        SupportSpec::Ifs { .. } => in_cantor(&x[0], 40),
    }
}

fn oracle(prev: &Ball, next: &Ball, ratio: &Scalar, k: &SupportSpec) -> std::result::Result<(), Violation> {
    if next.radius != ratio * &prev.radius {
        return Err(Violation::Radius);
    }
    let gap = prev.center.iter().zip(next.center.iter()).map(|(a, b)| (a - b).abs()).fold(Scalar::zero(), |a, b| a.max_of(&b));
    if gap > &prev.radius - &next.radius {
        return Err(Violation::Nesting);
    }
    if !in_support(k, &next.center) {
        return Err(Violation::Support);
    }
    Ok(())
}

fn box_params(d: usize, alpha: Scalar, beta: Scalar, rounds: usize) -> GameParams {
    let support = SupportSpec::unit_box(d);
    let decay = DecayParams::for_support(&support);
    let start = Ball::new(Vector(vec![Scalar::ratio(1, 2); d]), Scalar::ratio(1, 2));
    GameParams { m: d, n: 1, alpha, beta, rounds, support, decay, start }
}

fn cantor_params(rounds: usize) -> GameParams {
    let support = SupportSpec::cantor();
    let decay = DecayParams::for_support(&support);
    let start = Ball::new(Vector(vec![Scalar::zero()]), Scalar::one());
    GameParams { m: 1, n: 1, alpha: Scalar::ratio(1, 4), beta: Scalar::ratio(1, 4), rounds, support, decay, start }
}

fn check_transcript(t: &schmidt_core::game::Transcript) {
    assert!(t.is_complete(), "aborted: {:?}", t.abort);
    validate_transcript(t).unwrap();
    let p = &t.params;
    let mut prev = p.start.clone();
    for (i, r) in t.rounds.iter().enumerate() {
        if i > 0 {
            oracle(&prev, &r.black, &p.beta, &p.support).unwrap();
        }
        oracle(&r.black, &r.white, &p.alpha, &p.support).unwrap();
        prev = r.white.clone();
    }
    let ab = &p.alpha * &p.beta;
    assert_eq!(t.rounds.last().unwrap().white.radius, &(&ab.pow(t.rounds.len() as i32 - 1) * &p.alpha) * &p.start.radius);
    for (l, (rb, rw)) in radius_chain(t).iter().enumerate() {
        assert_eq!(*rb, &ab.pow(l as i32) * &p.start.radius);
        assert_eq!(*rw, rb * &p.alpha);
    }
}

proptest! {
    #![proptest_config(cfg(200))]

    #[test]
    fn referee_agrees_with_predicates_on_box(
        seed in any::<u64>(), d in 1usize..=2, den in prop::sample::select(vec![4i64, 8, 16]),
    ) {
        let mut r = rng(seed);
        let k = SupportSpec::unit_box(d);
        let ratio = Scalar::ratio(1, 4);
        let prev = Ball::new(Vector((0..d).map(|_| rational_in(&mut r, 0, 1, den)).collect()), Scalar::ratio(r.gen_range(1..4), 4));
        let radius = if r.gen_bool(0.8) { &ratio * &prev.radius } else { Scalar::ratio(1, den) };
        let next = Ball::new(Vector((0..d).map(|_| rational_in(&mut r, -1, 2, den)).collect()), radius);
        prop_assert_eq!(validate_move(&prev, &next, &ratio, &k), oracle(&prev, &next, &ratio, &k));
    }

    #[test]
    fn referee_agrees_with_predicates_on_cantor(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = SupportSpec::cantor();
        let ratio = Scalar::ratio(1, 3);
        let prev = Ball::new(Vector(vec![rational_in(&mut r, 0, 1, 27)]), Scalar::ratio(1, 3));
        let next = Ball::new(Vector(vec![rational_in(&mut r, 0, 1, 81)]), Scalar::ratio(1, 9));
        prop_assert_eq!(validate_move(&prev, &next, &ratio, &k), oracle(&prev, &next, &ratio, &k));
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn random_games_pass_the_referee(seed in any::<u64>(), cantor in any::<bool>(), d in 1usize..=2) {
        let p = if cantor { cantor_params(6) } else { box_params(d, Scalar::ratio(1, 4), Scalar::ratio(1, 2), 6) };
        let t = run_game(&p, &Fixed::default(), &mut RandomBlack, &mut RandomBlack, seed).unwrap();
        check_transcript(&t);
    }

    #[test]
    fn avoidance_meets_its_predicates(seed in any::<u64>(), cantor in any::<bool>(), planes in 1usize..=5) {
        let mut r = rng(seed);
        let (k, d) = if cantor { (SupportSpec::cantor(), 1) } else { (SupportSpec::unit_box(2), 2) };
        let decay = DecayParams::for_support(&k);
        let alpha = alpha_for(&decay, 4);
        let x = if cantor {
            k.point_in_ball(&Vector(vec![rational_in(&mut r, 0, 1, 1000)]), &Scalar::one()).unwrap()
        } else {
            Vector((0..d).map(|_| rational_in(&mut r, 0, 1, 1000)).collect())
        };
        let rad = Scalar::ratio(1, 1 << r.gen_range(0..8));
        let eps = &(&alpha * &rad) * &Scalar::from_int(2);
        let ps: Vec<AffinePlane> = (0..planes)
            .map(|_| {
                let normal = Vector((0..d).map(|_| Scalar::from_int(r.gen_range(1..4))).collect());
                let near = Vector((0..d).map(|i| &x[i] + &(&rad * &rational_in(&mut r, -1, 1, 64))).collect());
                AffinePlane { offset: normal.dot(&near), normal, eps: eps.clone() }
            })
            .collect();
        let y = avoid_hyperplanes(&k, &decay, &x, &rad, &alpha, &ps, 2).unwrap();
        prop_assert!(k.contains(&y));
        if cantor {
            prop_assert!(in_cantor(&y[0], 30));
        }
        prop_assert!(x.dist_sup(&y) <= &rad * &(&Scalar::one() - &alpha));
        for pl in &ps {
            let g = &pl.normal.dot(&y) - &pl.offset;
            prop_assert!(g.square() > &pl.eps.square() * &pl.normal.norm2_sq());
        }
    }

    #[test]
    fn finite_certificate_is_a_lower_bound(p in 0i64..7, q in 1i64..8, r in 0i64..9, s in 1i64..10) {
        let sys = AffineSystem::scalar(Scalar::ratio(p, q), Scalar::ratio(r, s));
        let f = FlowSchedule::new(1, 1, Scalar::ratio(1, 2)).unwrap();
        let c = finite_certificate(&sys, &f, 300).unwrap();
        let scan = badness_scan(&sys, 300);
        prop_assert!(c.c0 <= scan.min_product, "c0 {} above {}", c.c0, scan.min_product);
        if !scan.min_product.is_zero() {
            prop_assert!(c.certified && c.c0.cmp_zero().is_gt());
        }
    }

    #[test]
    fn alpha_for_sits_below_the_bound(c in 0.5f64..20.0, eta in 0.2f64..3.0, k in 2usize..=8) {
        let d = DecayParams::new(c, eta, 1.0).unwrap();
        let xi0 = schmidt_core::white::xi0_ceil(k);
        let a = alpha_for(&d, k).to_f64();
        let bound = d.alpha_bound(xi0);
        prop_assert!(a <= bound / 2.0 && a > bound / 4.0);
        prop_assert_eq!(a.log2().fract(), 0.0);
        // beta never enters: every beta making alpha * beta a flow base is accepted.
        for e in 1..4 {
            let beta = Scalar::ratio(1, 1 << e);
            let mut gp = box_params(1, alpha_for(&d, k), beta, 1);
            gp.decay = d.clone();
            prop_assert!(gp.validate().is_ok());
        }
    }
}

/// Targeting wrapped with a check that every move gets no farther from its target.
struct Monotone {
    inner: Targeting,
    checked: usize,
}

impl Strategy for Monotone {
    fn name(&self) -> String {
        self.inner.name()
    }

    fn next_move(&mut self, ctx: &mut MoveContext<'_>) -> Result<Ball> {
        let target = self.inner.target(ctx, ctx.current)?;
        let ball = self.inner.next_move(ctx)?;
        if let Some(t) = target {
            let before = ctx.current.center.dist_sup(&t);
            let after = ball.center.dist_sup(&t);
            assert!(after <= before, "round {}: {after} > {before}", ctx.round);
            self.checked += 1;
        }
        Ok(ball)
    }
}

proptest! {
    #![proptest_config(cfg(12))]

    #[test]
    fn targeting_never_moves_away(seed in any::<u64>(), coset in any::<bool>(), num in 1i64..10) {
        let mut p = box_params(1, Scalar::ratio(1, 64), Scalar::ratio(1, 4), 8);
        p.start.radius = Scalar::one();
        let a = Matrix::from_rows(vec![Vector(vec![Scalar::ratio(num, 11)])]).unwrap();
        let fixed = Fixed { a: Some(a), b: None };
        let mode = if coset { TargetMode::Coset } else { TargetMode::LatticeHit };
        let mut black = Monotone { inner: Targeting::new(mode), checked: 0 };
        let t = run_game(&p, &fixed, &mut RandomBlack, &mut black, seed).unwrap();
        check_transcript(&t);
        prop_assert!(black.checked > 0);
    }

    #[test]
    fn bad_b_margins_are_exact(seed in any::<u64>(), targeting in any::<bool>()) {
        let p = box_params(1, Scalar::ratio(1, 64), Scalar::ratio(1, 4), 10);
        let b = Vector(vec![Scalar::ratio(1, 2)]);
        let fixed = Fixed { a: None, b: Some(b.clone()) };
        let mut w = BadB::new(&p, b.clone(), Box::new(Greedy), 1).unwrap();
        let t = if targeting {
            run_game(&p, &fixed, &mut w, &mut Targeting::new(TargetMode::LatticeHit), seed).unwrap()
        } else {
            run_game(&p, &fixed, &mut w, &mut RandomBlack, seed).unwrap()
        };
        check_transcript(&t);
        for e in w.events().iter().filter(|e| e.avoided) {
            let a2 = matrix_from_point(&t.rounds[e.round - 1].white.center, 1, 1);
            let m = margin(&a2, &b, &e.p, &e.q).unwrap();
            prop_assert!(m > e.eps);
            prop_assert_eq!(Some(m), e.margin.clone());
        }
    }

    #[test]
    fn ledger_bounds_hold_for_sampled_b(seed in any::<u64>()) {
        let mut p = box_params(1, Scalar::ratio(1, 64), Scalar::ratio(1, 4), 5);
        p.start.radius = Scalar::one();
        let a = Matrix::from_rows(vec![Vector(vec![Scalar::named("golden", 1024).unwrap()])]).unwrap();
        let fixed = Fixed { a: Some(a.clone()), b: None };
        let mut w = BadA::new(&p, a.clone(), BadAOptions::default()).unwrap();
        let t = run_game(&p, &fixed, &mut w, &mut RandomBlack, seed).unwrap();
        check_transcript(&t);
        let st = w.state();
        let f = &st.schedule;
        let mut r = rng(seed);
        for e in &st.ledger {
            let ball = &t.rounds[e.round - 1].white;
            for _ in 0..10 {
                let b = &ball.center[0] + &(&ball.radius * &rational_in(&mut r, -1, 1, 1000));
                let sys = AffineSystem::scalar(a.get(0, 0).clone(), b);
                let traj = trajectory_minima(&sys, f, e.to as u32).unwrap();
                for s in e.from..=e.to {
                    let d = &traj.minima[s as usize].min_dist;
                    prop_assert!(d.square() >= e.bound_sq_at(f, s), "step {}: {} below {}", s, d, e.bound);
                }
            }
        }
    }
}
