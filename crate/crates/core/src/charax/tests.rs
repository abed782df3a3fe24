use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use super::*;
use crate::flux::ConvexFlux;
use crate::fronttrack::{approximate_flux, shock_path};
use crate::profile::{PeriodicProfile, PieceKind};

fn square(first: f64) -> PeriodicProfile {
    PeriodicProfile::square_wave(1.0, first, -first).unwrap()
}

fn lopsided() -> PeriodicProfile {
    PeriodicProfile::new(
        1.0,
        &[
            (0.2, PieceKind::Constant(0.6)),
            (0.5, PieceKind::Constant(-0.36)),
            (0.3, PieceKind::Constant(0.2)),
        ],
    )
    .unwrap()
}

fn oracle(w: PeriodicProfile, ul: f64, ur: f64) -> HopfOracle {
    HopfOracle::new(RiemannPerturbedIC::new(ConvexFlux::burgers(), ul, ur, w).unwrap()).unwrap()
}

#[test]
fn backward_lines_of_simple_waves() {
    let c = ReferenceWave::new(&ConvexFlux::exp(), 0.4, 0.4).unwrap();
    for kind in [CharKind::Minimal, CharKind::Maximal] {
        let l = backward_extremal(&c, -3.0, 2.0, kind).unwrap();
        assert_abs_diff_eq!(l.slope, 0.4f64.exp() - 1.0, epsilon = 1e-15);
    }
    let r = ReferenceWave::new(&ConvexFlux::burgers(), -1.0, 1.0).unwrap();
    for kind in [CharKind::Minimal, CharKind::Maximal] {
        let l = backward_extremal(&r, 0.5, 1.0, kind).unwrap();
        assert_eq!(l.slope, 0.5);
        assert_eq!(l.foot(), 0.0);
        assert!(verify_line(&r, &l, 32).unwrap() < 1e-15);
    }
    assert!(backward_extremal(&r, 0.5, 0.0, CharKind::Minimal).is_err());
}

#[test]
fn shock_feet_bracket_origin() {
    let o = oracle(lopsided(), 1.0, -1.0);
    for t in [0.5, 2.0, 7.0] {
        let si = o.shock_interval(t).unwrap();
        let min = backward_extremal(&o, si.x_low, t, CharKind::Minimal).unwrap();
        let max = backward_extremal(&o, si.x_high, t, CharKind::Maximal).unwrap();
        assert!(min.foot() <= 1e-9 && max.foot() >= -1e-9, "t={t}");
        let m = o.minimizers(t, si.x_low).unwrap();
        assert_abs_diff_eq!(min.foot(), m.y_star_low, epsilon = 1e-12);
        assert!(verify_line(&o, &min, 64).unwrap() < 1e-8);
        assert!(verify_line(&o, &max, 64).unwrap() < 1e-8);
    }
}

#[test]
fn forward_simple_cases() {
    let c = ReferenceWave::new(&ConvexFlux::exp(), 0.3, 0.3).unwrap();
    let path = forward_characteristic(&c, 1.0, 2.0, CharKind::Minimal).unwrap();
    let speed = 0.3f64.exp() - 1.0;
    for (t, x) in path.times.iter().zip(&path.positions) {
        assert_abs_diff_eq!(*x, 1.0 + speed * t, epsilon = 1e-11);
    }
    let s = ReferenceWave::new(&ConvexFlux::burgers(), 1.0, 0.0).unwrap();
    for kind in [CharKind::Minimal, CharKind::Maximal] {
        let path = forward_characteristic(&s, 0.0, 3.0, kind).unwrap();
        for (t, x) in path.times.iter().zip(&path.positions) {
            assert_abs_diff_eq!(*x, 0.5 * t, epsilon = 1e-11);
        }
    }
    // Extremal characteristics through a centred fan follow its edges.
    let r = ReferenceWave::new(&ConvexFlux::burgers(), -0.5, 1.0).unwrap();
    let lo = forward_characteristic(&r, 0.0, 1.0, CharKind::Minimal).unwrap();
    let hi = forward_characteristic(&r, 0.0, 1.0, CharKind::Maximal).unwrap();
    assert_abs_diff_eq!(*lo.positions.last().unwrap(), -0.5, epsilon = 1e-11);
    assert_abs_diff_eq!(*hi.positions.last().unwrap(), 1.0, epsilon = 1e-11);
    assert_abs_diff_eq!(hi.at(0.5), 0.5, epsilon = 1e-11);
}

#[test]
fn forward_stays_on_divide() {
    let w = lopsided();
    let ubar = 0.25;
    let field = PeriodicField::new(PeriodicOracle::new(&w, ubar));
    let a = w.argmin_primitive();
    assert_abs_diff_eq!(a, 0.7, epsilon = 1e-12);
    for n in [-1i64, 2] {
        let x0 = a + n as f64;
        let path = forward_characteristic_through(&field, x0, ubar, 50.0, 0.01).unwrap();
        let worst = path
            .times
            .iter()
            .zip(&path.positions)
            .map(|(t, x)| (x - (x0 + ubar * t)).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 5e-3, "{worst}");
    }
}

#[test]
fn forward_matches_front_tracking_shock_path() {
    let delta = 1e-3;
    let ic = RiemannPerturbedIC::new(ConvexFlux::burgers(), 1.0, -1.0, lopsided()).unwrap();
    let o = HopfOracle::new(ic.clone()).unwrap();
    let poly = approximate_flux(&ConvexFlux::burgers(), delta, Interval::new(-1.36, 1.6).unwrap()).unwrap();
    let times: Vec<f64> = (1..=16).map(|k| 0.5 * k as f64).collect();
    let ft = shock_path(&ic, &poly, &times).unwrap();
    let fc = forward_characteristic(&o, 0.0, 8.0, CharKind::Maximal).unwrap();
    for (t, x) in times.iter().zip(&ft.positions) {
        assert!((fc.at(*t) - x).abs() <= 5.0 * delta, "t={t}: {} vs {x}", fc.at(*t));
        let si = o.shock_interval(*t).unwrap();
        if si.merged {
            assert!((si.x_low - fc.at(*t)).abs() < 1e-9, "t={t}");
        }
    }
}

#[test]
fn triangle_for_constants() {
    let f = ConvexFlux::burgers();
    let same = ReferenceWave::new(&f, 0.2, 0.2).unwrap();
    let r = triangle_residual(&same, &same, 0.3, 1.5, (CharKind::Minimal, CharKind::Maximal)).unwrap();
    assert_eq!((r.lhs_left_term, r.lhs_right_term, r.rhs), (0.0, 0.0, 0.0));

    let (c1, c2) = (0.8, -0.4);
    let e = ConvexFlux::exp();
    let u = ReferenceWave::new(&e, c2, c2).unwrap();
    let ut = ReferenceWave::new(&e, c1, c1).unwrap();
    let t = 2.0;
    let r = triangle_residual(&u, &ut, 0.0, t, (CharKind::Minimal, CharKind::Minimal)).unwrap();
    let gap = t * (e.deriv(c1).unwrap() - e.deriv(c2).unwrap());
    assert_abs_diff_eq!(r.foot - r.foot_tilde, gap, epsilon = 1e-14);
    assert_abs_diff_eq!(r.rhs, (c2 - c1) * gap, epsilon = 1e-14);
    assert!(r.residual.abs() <= 1e-6);
    assert!(r.lhs_left_term <= 0.0 && r.lhs_right_term <= 0.0);
    assert!(triangle_residual(&ut, &u, 0.0, t, (CharKind::Minimal, CharKind::Minimal)).is_err());
}

#[test]
fn triangle_for_oracle_pair() {
    let o = oracle(square(0.3), 1.0, -1.0);
    let left = PeriodicField::new(o.left_solution());
    for (x, t) in [(-0.3, 0.7), (-1.2, 3.0), (0.05, 0.4), (-2.5, 5.5)] {
        for kinds in [(CharKind::Minimal, CharKind::Maximal), (CharKind::Maximal, CharKind::Minimal)] {
            let a = backward_extremal(&o, x, t, kinds.0).unwrap().foot();
            let b = backward_extremal(&left, x, t, kinds.1).unwrap().foot();
            let r = if b <= a {
                triangle_residual(&o, &left, x, t, kinds).unwrap()
            } else {
                triangle_residual(&left, &o, x, t, (kinds.1, kinds.0)).unwrap()
            };
            assert!(r.residual.abs() <= 1e-6, "{x},{t}: {r:?}");
            assert!(r.lhs_left_term <= 1e-12 && r.lhs_right_term <= 1e-12);
        }
    }
}

#[test]
fn offset_identities() {
    // No perturbation: nothing to integrate.
    let ic = RiemannPerturbedIC::unperturbed(ConvexFlux::burgers(), 1.0, -0.5).unwrap();
    let o = HopfOracle::new(ic.clone()).unwrap();
    let (l, r) = (PeriodicField::new(o.left_solution()), PeriodicField::new(o.right_solution()));
    let x = ic.shock_speed() * 4.0;
    assert_eq!(shock_offset(&ic, &l, &r, x, 4.0, 10).unwrap(), 0.0);

    let w = lopsided();
    let ic = RiemannPerturbedIC::new(ConvexFlux::burgers(), 1.0, -1.0, w.clone()).unwrap();
    let o = HopfOracle::new(ic.clone()).unwrap();
    let (l, r) = (PeriodicField::new(o.left_solution()), PeriodicField::new(o.right_solution()));
    let zero_mean = PeriodicOracle::new(&w, 0.0);
    for t in [1.5, 2.0, 2.75, 4.0, 6.3] {
        let si = o.shock_interval(t).unwrap();
        assert!(si.merged);
        let x = si.x_low;
        let general = shock_offset(&ic, &l, &r, x, t, 12).unwrap();
        let galilean = shock_offset_galilean(&zero_mean, 1.0, -1.0, x, t).unwrap();
        assert!((general - x).abs() <= 1e-8, "t={t}: {general} vs {x}");
        assert!((galilean - x).abs() <= 1e-8, "t={t}: {galilean} vs {x}");
        if (2.0 * t).fract() == 0.0 {
            assert!(x.abs() <= 1e-8);
        }
    }
    assert!(shock_offset(&ic, &l, &r, 0.0, 6.3, 1).is_err());
}

#[test]
fn glue_after_merge() {
    let o = oracle(square(0.3), 1.0, -1.0);
    let (l, r) = (PeriodicField::new(o.left_solution()), PeriodicField::new(o.right_solution()));
    for t in [1.0, 4.0] {
        let x = o.shock_interval(t).unwrap().x_low;
        let window = Interval::new(x - 3.0, x + 3.0).unwrap();
        let m = glue_check(&o, &l, &r, x, t, window, 600, 1e-6).unwrap();
        assert!(m <= 1e-10, "t={t}: {m}");
    }
}

#[test]
fn fan_identity_for_nonnegative_primitive() {
    let o = oracle(square(0.3), -1.0, 1.0);
    let (l, r) = (PeriodicField::new(o.left_solution()), PeriodicField::new(o.right_solution()));
    let window = Interval::new(-6.0, 6.0).unwrap();
    for t in [0.5, 2.0, 5.0] {
        let m = fan_mismatch(&o, &l, &r, o.ic(), t, window, 400).unwrap();
        assert!(m <= 1e-8, "t={t}: {m}");
    }
}

#[test]
fn sandwich_for_general_rarefaction() {
    let o = oracle(lopsided(), -1.0, 1.0);
    let (l, r) = (PeriodicField::new(o.left_solution()), PeriodicField::new(o.right_solution()));
    let xl = forward_characteristic(&l, 0.0, 6.0, CharKind::Maximal).unwrap();
    let xr = forward_characteristic(&r, 0.0, 6.0, CharKind::Minimal).unwrap();
    for t in [0.5, 3.0, 6.0] {
        let rep = divide_sandwich(&o, &l, &r, o.ic(), t, xl.at(t), xr.at(t), 300).unwrap();
        assert!(rep.worst() <= 1e-9, "{rep:?}");
    }
}

#[test]
fn sandwich_with_minimizer_at_origin() {
    let o = oracle(square(0.3), -1.0, 1.0);
    assert_eq!(o.ic().perturbation().argmin_primitive(), 0.0);
    let (l, r) = (PeriodicField::new(o.left_solution()), PeriodicField::new(o.right_solution()));
    let xl = forward_characteristic_scaled(&l, 0.0, 40.0, CharKind::Maximal, 0.01, 0.01).unwrap();
    let xr = forward_characteristic_scaled(&r, 0.0, 40.0, CharKind::Minimal, 0.01, 0.01).unwrap();
    for t in [0.5, 3.0, 40.0] {
        let rep = divide_sandwich(&o, &l, &r, o.ic(), t, xl.at(t), xr.at(t), 300).unwrap();
        assert!(rep.worst() <= 1e-9, "{rep:?}");
    }
}

#[test]
fn scaled_step_tracks_fixed_step() {
    let o = oracle(lopsided(), -1.0, 1.0);
    let l = PeriodicField::new(o.left_solution());
    let fine = forward_characteristic(&l, 0.0, 8.0, CharKind::Maximal).unwrap();
    let coarse = forward_characteristic_scaled(&l, 0.0, 8.0, CharKind::Maximal, 0.01, 0.01).unwrap();
    for t in [1.0, 4.0, 8.0] {
        assert!((fine.at(t) - coarse.at(t)).abs() < 0.05, "t={t}");
    }
}

#[test]
fn reference_wave_integrals() {
    let e = ConvexFlux::exp();
    let fan = ReferenceWave::new(&e, -0.5, 0.7).unwrap();
    let t = 1.7;
    let q = crate::quad::integrate_with_breaks(
        |x| fan.value(x, t).unwrap(),
        -3.0,
        2.5,
        &[e.deriv(-0.5).unwrap() * t, e.deriv(0.7).unwrap() * t],
        QuadOptions::abs(1e-13),
    );
    assert_abs_diff_eq!(fan.integral(-3.0, 2.5, t).unwrap(), q.value, epsilon = 1e-11);
    let shock = ReferenceWave::new(&e, 0.7, -0.5).unwrap();
    let s = shock.speed();
    assert_abs_diff_eq!(shock.integral(-1.0, 1.0, 1.0).unwrap(), 0.7 * (s + 1.0) - 0.5 * (1.0 - s), epsilon = 1e-14);
}

#[test]
fn tracked_field_rewinds() {
    let f = ConvexFlux::burgers();
    let poly = approximate_flux(&f, 0.25, Interval::new(-1.0, 1.0).unwrap()).unwrap();
    let s = PiecewiseConstantState::new(0.0, vec![0.0], vec![-1.0, 1.0], None).unwrap();
    let field = TrackedField::new(s, &poly).unwrap();
    assert_eq!(field.value(0.3, 1.0).unwrap(), 0.375 - 0.125);
    assert_eq!(field.value(-5.0, 2.0).unwrap(), -1.0);
    assert_eq!(field.value(0.3, 1.0).unwrap(), 0.25);
    assert_eq!(field.jump_tolerance(), 0.125);
    assert!(field.value(0.0, -1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn extremal_feet_ordered(x in -4.0f64..4.0, t in 0.05f64..12.0, shock in any::<bool>()) {
        let (ul, ur) = if shock { (1.0, -1.0) } else { (-1.0, 1.0) };
        let o = oracle(lopsided(), ul, ur);
        let lo = backward_extremal(&o, x, t, CharKind::Minimal).unwrap();
        let hi = backward_extremal(&o, x, t, CharKind::Maximal).unwrap();
        prop_assert!(lo.foot() <= hi.foot() + 1e-12);
        let (l, r) = o.one_sided(x, t).unwrap();
        prop_assert_eq!(lo.foot() == hi.foot(), l == r);
    }

    #[test]
    fn backward_lines_respect_divides(frac in 0.001f64..0.999, t in 0.05f64..30.0, k in -3i64..3) {
        let w = lopsided();
        let ubar = -0.3;
        let field = PeriodicField::new(PeriodicOracle::new(&w, ubar));
        let a = w.argmin_primitive();
        let x = a + k as f64 + frac + ubar * t;
        for kind in [CharKind::Minimal, CharKind::Maximal] {
            let foot = backward_extremal(&field, x, t, kind).unwrap().foot();
            prop_assert!(foot >= a + k as f64 - 1e-9 && foot <= a + k as f64 + 1.0 + 1e-9, "{foot}");
        }
    }

    #[test]
    fn triangle_random_anchors(x in -3.0f64..3.0, t in 0.1f64..6.0, shock in any::<bool>()) {
        let (ul, ur) = if shock { (1.0, -1.0) } else { (-1.0, 1.0) };
        let o = oracle(square(0.3), ul, ur);
        let other = ReferenceWave::new(o.flux(), ul, ur).unwrap();
        let k = (CharKind::Maximal, CharKind::Minimal);
        let a = backward_extremal(&o, x, t, k.0).unwrap().foot();
        let b = backward_extremal(&other, x, t, k.1).unwrap().foot();
        let r = if b <= a {
            triangle_residual(&o, &other, x, t, k).unwrap()
        } else {
            triangle_residual(&other, &o, x, t, (k.1, k.0)).unwrap()
        };
        prop_assert!(r.residual.abs() <= 1e-6, "{:?}", r);
    }
}
