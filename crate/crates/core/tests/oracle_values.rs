//! Frozen reference values. The exp-flux numbers come from a 30-digit
//! mpmath evaluation of `g(v) = (1+v) ln(1+v) − v` and its root `z(t)`,
//! independent of the quadrature and bisection used here.

use periodic_shocks::flux::{normalize, ConvexFlux, GPotential};
use periodic_shocks::oracle::{PeriodicOracle, Side};
use periodic_shocks::profile::TwoConstantProfile;

const G_ONE: f64 = 0.386294361119890618834;

// (t, z(t), (f′)⁻¹(z/t), (f′)⁻¹((z−1)/t)) for f(u) = eᵘ − 1 − u, ū = 0, p = 1.
const EXP_TABLE: [(f64, f64, f64, f64); 5] = [
    (1.0, 0.54221141973774511056, 0.43321737322509091504, -0.61209928028443584549),
    (5.0, 0.50833750718302673032, 0.09682494236893393779, -0.10350945056239801391),
    (20.0, 0.50208339844449807860, 0.02479423661888953148, -0.02521097274550553966),
    (80.0, 0.50052083435059277055, 0.00623701972163859615, -0.00626306165957640841),
    (256.0, 0.50016276044771077285, 0.00195185467471621919, -0.00195439780881364653),
];

fn exp_potential() -> GPotential {
    GPotential::new(normalize(&ConvexFlux::exp(), 0.0).unwrap())
}

#[test]
fn exp_g_at_one() {
    let g = exp_potential();
    assert!((g.g_of(1.0).unwrap() - G_ONE).abs() < 1e-12);
}

#[test]
fn exp_z_and_envelope() {
    let g = exp_potential();
    let f = g.flux().flux();
    for (t, z_ref, sup_ref, inf_ref) in EXP_TABLE {
        let (z, r) = g.z_residual(1.0, t).unwrap();
        assert!((z - z_ref).abs() < 1e-10, "t = {t}: z = {z}");
        assert!(r <= 1e-12, "t = {t}: residual {r}");
        assert!((f.inv_deriv(z / t).unwrap() - sup_ref).abs() < 1e-10);
        assert!((f.inv_deriv((z - 1.0) / t).unwrap() - inf_ref).abs() < 1e-10);
    }
}

#[test]
fn burgers_z_is_half_period() {
    let g = GPotential::new(normalize(&ConvexFlux::burgers(), 0.0).unwrap());
    for t in [0.7, 3.0, 100.0] {
        assert!((g.z_of(1.0, t).unwrap() - 0.5).abs() < 1e-12);
    }
}

#[test]
fn burgers_two_constant_sawtooth() {
    let data = TwoConstantProfile::new(1.0, 1.0, 1.0, 0.0).unwrap();
    assert_eq!(data.t_p(&ConvexFlux::burgers()).unwrap(), 1.0);
    let o = PeriodicOracle::new(&data.to_profile().unwrap(), 0.0);
    for t in [2.0, 8.0, 32.0] {
        let e = o.extrema(t, 1e-13).unwrap();
        assert!((e.sup - 0.5 / t).abs() < 1e-8, "t = {t}");
        assert!((e.inf + 0.5 / t).abs() < 1e-8, "t = {t}");
        // Between the jumps the solution is the ramp x/t through the minimizer.
        let v = o.value(0.1, t, Side::Left).unwrap();
        assert!(v.abs() <= 0.5 / t + 1e-12);
    }
}
