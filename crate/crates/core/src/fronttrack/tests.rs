use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::flux::{ConvexFlux, Interval};
use crate::profile::{PeriodicProfile, PieceKind, RiemannPerturbedIC};

fn burgers_poly(delta: f64, lo: f64, hi: f64) -> FluxPolygon {
    approximate_flux(&ConvexFlux::burgers(), delta, Interval::new(lo, hi).unwrap()).unwrap()
}

#[test]
fn stationary_shock_stays() {
    let poly = burgers_poly(0.5, -1.0, 1.0);
    let s = PiecewiseConstantState::new(0.0, vec![0.25], vec![1.0, -1.0], None).unwrap();
    for t in [0.5, 3.0, 100.0] {
        let out = evolve(&s, &poly, t).unwrap();
        assert_eq!(out.breakpoints, vec![0.25]);
        assert_eq!(out.values, vec![1.0, -1.0]);
    }
}

#[test]
fn two_shocks_merge() {
    let poly = burgers_poly(0.5, -2.0, 2.0);
    let s = PiecewiseConstantState::new(0.0, vec![-1.0, 1.0], vec![2.0, 0.0, -2.0], None).unwrap();
    let before = evolve(&s, &poly, 0.5).unwrap();
    assert_eq!(before.breakpoints, vec![-0.5, 0.5]);
    let mut tr = FrontTracker::new(&s, &poly).unwrap();
    tr.advance_to(3.0).unwrap();
    assert_eq!(tr.event_count(), 1);
    let after = tr.state();
    assert_eq!(after.breakpoints, vec![0.0]);
    assert_eq!(after.values, vec![2.0, -2.0]);
}

#[test]
fn rarefaction_fronts_spread() {
    let poly = burgers_poly(0.25, -1.0, 1.0);
    let s = PiecewiseConstantState::new(0.0, vec![0.0], vec![-1.0, 1.0], None).unwrap();
    let out = evolve(&s, &poly, 2.0).unwrap();
    assert_eq!(out.breakpoints.len(), 8);
    for (k, b) in out.breakpoints.iter().enumerate() {
        assert_abs_diff_eq!(*b, 2.0 * (-0.875 + 0.25 * k as f64), epsilon = 1e-14);
    }
    assert!(evolve(&out, &poly, 1.0).is_err());
}

#[test]
fn shock_overtakes_fan() {
    // A shock from the left eats a centred fan; total mass is exact.
    let poly = burgers_poly(0.125, -1.0, 2.0);
    let s = PiecewiseConstantState::new(0.0, vec![-1.0, 0.0], vec![2.0, -1.0, 1.0], None).unwrap();
    let mass = |st: &PiecewiseConstantState, t: f64| {
        // ∫ over [-10, 10] plus boundary fluxes f(2)·t in, f(1)·t out.
        st.integral(-10.0, 10.0) - 2.0 * t + 0.5 * t
    };
    let m0 = mass(&s, 0.0);
    let mut tr = FrontTracker::new(&s, &poly).unwrap();
    for t in [0.5, 1.0, 2.0, 4.0] {
        tr.advance_to(t).unwrap();
        let st = tr.state();
        assert_abs_diff_eq!(mass(&st, t), m0, epsilon = 1e-12);
        assert!(st.total_variation() <= s.total_variation() + 1e-12);
    }
    assert!(tr.event_count() > 0);
}

#[test]
fn periodic_square_wave_conserves() {
    let poly = burgers_poly(1.0 / 64.0, -1.0, 1.0);
    let profile = PeriodicProfile::square_wave(1.0, 0.5, -0.5).unwrap();
    let s = snapped_periodic_state(&profile, 0.25, &poly).unwrap();
    let m0 = s.mean_per_period().unwrap();
    assert_eq!(m0, 0.25);
    let mut tr = FrontTracker::new(&s, &poly).unwrap();
    let mut tv = s.total_variation();
    for k in 1..=100 {
        tr.advance_to(k as f64).unwrap();
        let st = tr.state();
        assert!((st.mean_per_period().unwrap() - m0).abs() <= 1e-12, "t={k}");
        let now = st.total_variation();
        assert!(now <= tv + 1e-12);
        tv = now;
        let x = 0.3 + 0.1 * k as f64;
        assert_eq!(st.sample(x), st.sample(x + 1.0));
    }
}

#[test]
fn snapped_periodic_state_shapes() {
    let poly = burgers_poly(0.1, -1.0, 1.0);
    let s = snapped_periodic_state(&PeriodicProfile::square_wave(2.0, 0.3, -0.3).unwrap(), 0.0, &poly).unwrap();
    assert_eq!(s.breakpoints, vec![0.0, 1.0]);
    assert_abs_diff_eq!(s.values[1], 0.3, epsilon = 1e-12);
    let z = snapped_periodic_state(&PeriodicProfile::zero(1.0).unwrap(), 0.5, &poly).unwrap();
    assert!(z.breakpoints.is_empty());
    let three = PeriodicProfile::new(
        1.0,
        &[(0.25, PieceKind::Constant(0.2)), (0.5, PieceKind::Constant(-0.2)), (0.25, PieceKind::Constant(0.2))],
    )
    .unwrap();
    let s = snapped_periodic_state(&three, 0.0, &poly).unwrap();
    assert_eq!(s.breakpoints, vec![0.25, 0.75]);
}

#[test]
fn unperturbed_shock_path() {
    let poly = burgers_poly(1e-3, -1.0, 3.0);
    let ic = RiemannPerturbedIC::unperturbed(ConvexFlux::burgers(), 2.0, 0.0).unwrap();
    let times = [0.5, 1.0, 2.0, 7.0];
    let path = shock_path(&ic, &poly, &times).unwrap();
    for (t, x) in times.iter().zip(&path.positions) {
        assert_abs_diff_eq!(*x, *t, epsilon = 1e-12);
    }
    let bad = RiemannPerturbedIC::unperturbed(ConvexFlux::burgers(), -1.0, 1.0).unwrap();
    assert!(shock_path(&bad, &poly, &times).is_err());
}

#[test]
fn square_wave_shock_path() {
    let delta = 1e-3;
    let poly = burgers_poly(delta, -1.3, 1.3);
    let profile = PeriodicProfile::square_wave(1.0, 0.3, -0.3).unwrap();
    let ic = RiemannPerturbedIC::new(ConvexFlux::burgers(), 1.0, -1.0, profile).unwrap();
    let times: Vec<f64> = (1..=20).map(|n| n as f64 * 0.5).collect();
    let path = shock_path(&ic, &poly, &times).unwrap();
    for x in &path.positions {
        assert!(x.abs() <= 5.0 * delta, "{x}");
    }
    assert!(path.lipschitz() <= 1.3 + 1e-9);
}

#[test]
fn godunov_constant_and_shock() {
    let flux = ConvexFlux::burgers();
    let window = Interval::new(-0.5, 0.5).unwrap();
    let c = RiemannPerturbedIC::unperturbed(flux.clone(), 0.3, 0.3).unwrap();
    for (_, u) in godunov_reference(&c, &flux, 0.01, 0.5, 1.0, window).unwrap() {
        assert_eq!(u, 0.3);
    }
    assert!(godunov_reference(&c, &flux, 0.01, 0.9, 1.0, window).is_err());

    let ic = RiemannPerturbedIC::unperturbed(flux.clone(), 1.0, -0.5).unwrap();
    let s = ic.shock_speed();
    let t = 10.0;
    let dx = 1e-3;
    let w = Interval::new(s * t - 0.5, s * t + 0.5).unwrap();
    let cells = godunov_reference(&ic, &flux, dx, 0.5, t, w).unwrap();
    // The smeared shock crosses the midpoint value within one cell.
    let crossing = cells.iter().find(|c| c.1 < 0.25).unwrap().0;
    assert!((crossing - s * t).abs() <= dx, "{crossing} vs {}", s * t);
}

#[test]
fn exp_flux_periodic_decay_bounded() {
    let e = ConvexFlux::exp();
    let poly = approximate_flux(&e, 1e-2, Interval::new(-1.0, 1.0).unwrap()).unwrap();
    let s = snapped_periodic_state(&PeriodicProfile::square_wave(1.0, 1.0, -1.0).unwrap(), 0.0, &poly).unwrap();
    let out = evolve(&s, &poly, 5.0).unwrap();
    let sup = out.values.iter().copied().fold(f64::MIN, f64::max);
    assert!(sup < 0.2 && sup > 0.0);
    assert!(out.mean_per_period().unwrap().abs() < 1e-12);
}

fn random_periodic(rng: &mut ChaCha8Rng, poly: &FluxPolygon) -> PiecewiseConstantState {
    let n = rng.random_range(2..7);
    let mut widths: Vec<f64> = (0..n).map(|_| rng.random_range(1..8) as f64).collect();
    let total: f64 = widths.iter().sum();
    widths.iter_mut().for_each(|w| *w /= total);
    let pieces: Vec<(f64, PieceKind)> = widths
        .iter()
        .map(|&w| (w, PieceKind::Constant(rng.random_range(-48..=48) as f64 / 64.0)))
        .collect();
    let profile = PeriodicProfile::new(1.0, &pieces).unwrap();
    let (zero_mean, _) = profile.shift_to_zero_mean();
    let ubar = rng.random_range(-8..=8) as f64 / 64.0;
    snapped_periodic_state(&zero_mean, ubar, poly).unwrap()
}

#[test]
fn random_periodic_audit() {
    let poly = approximate_flux(&ConvexFlux::burgers(), 1.0 / 64.0, Interval::new(-2.0, 2.0).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let s = random_periodic(&mut rng, &poly);
        let m0 = s.mean_per_period().unwrap();
        let mut tr = FrontTracker::new(&s, &poly).unwrap();
        let mut tv = s.total_variation();
        for k in 1..=40 {
            tr.advance_to(2.5 * k as f64).unwrap();
            let st = tr.state();
            assert!((st.mean_per_period().unwrap() - m0).abs() <= 1e-12);
            assert!(st.total_variation() <= tv + 1e-12);
            tv = st.total_variation();
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn evolve_keeps_invariants(seed in any::<u64>(), t in 0.1f64..20.0) {
        let e = ConvexFlux::exp();
        let poly = approximate_flux(&e, 1.0 / 32.0, Interval::new(-2.0, 2.0).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_periodic(&mut rng, &poly);
        let out = evolve(&s, &poly, t).unwrap();
        // Output satisfies the state invariants and sits on the grid.
        let again = PiecewiseConstantState::new(out.time, out.breakpoints.clone(), out.values.clone(), out.period);
        prop_assert!(again.is_ok());
        prop_assert!(out.values.iter().all(|&v| poly.node_index(v).is_some()));
        prop_assert!((out.mean_per_period().unwrap() - s.mean_per_period().unwrap()).abs() <= 1e-12);
        prop_assert!(out.total_variation() <= s.total_variation() + 1e-12);
        let lo = s.values.iter().copied().fold(f64::MAX, f64::min);
        let hi = s.values.iter().copied().fold(f64::MIN, f64::max);
        prop_assert!(out.values.iter().all(|&v| v >= lo && v <= hi));
        let (back, delta) = PiecewiseConstantState::from_snapshot(&out.to_snapshot(poly.delta())).unwrap();
        prop_assert_eq!(back, out);
        prop_assert_eq!(delta, poly.delta());
    }
}

#[test]
fn constant_periodic_state_stays_periodic() {
    let poly = approximate_flux(&ConvexFlux::exp(), 1.0 / 32.0, Interval::new(-2.0, 2.0).unwrap()).unwrap();
    let s = PiecewiseConstantState::new(0.0, Vec::new(), vec![-1.0 / 32.0], Some(1.0)).unwrap();
    let out = evolve(&s, &poly, 3.0).unwrap();
    assert_eq!(out.period, Some(1.0));
    assert_eq!(out.values, vec![-1.0 / 32.0]);
}
