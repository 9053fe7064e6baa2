mod common;

use std::f64::consts::PI;

use common::{Oracle, DEFAULT};
use hyperion_core::interval::{IVec, Interval};
use hyperion_core::model::{field, jacobian, vector_field, ModelParams};
use hyperion_core::scatter::FloatMap;
use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};

proptest! {
    #[test]
    fn anomaly_strictly_increases(
        e in 0u32..=5000,
        w in 0u32..=1000,
        theta in -10.0..10.0f64,
        phi in -5.0..5.0f64,
        f in -20.0..20.0f64,
        r in (0.0..3.0f64, 0.0..3.0f64, 0.0..7.0f64),
    ) {
        let params = ModelParams::new(&format!("0.{e:04}"), &format!("{}", w as f64 / 1000.0)).unwrap();
        let s = IVec([
            Interval::new(theta, theta + r.0),
            Interval::new(phi, phi + r.1),
            Interval::new(f, f + r.2),
        ]);
        prop_assert!(vector_field(&s, &params)[2].lo() > 0.0);
    }
}

#[test]
fn field_matches_the_equations() {
    let params = ModelParams::default();
    let co = params.coefficients_f64();
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..200 {
        let s = [rng.gen_range(-4.0..4.0), rng.gen_range(-2.0..3.0), rng.gen_range(-7.0..7.0)];
        let a = field(s, &co);
        let b = DEFAULT.rhs(s);
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() <= 1e-13 * (1.0 + b[i].abs()), "{s:?}: {a:?} vs {b:?}");
        }
    }
}

#[test]
fn jacobian_matches_finite_differences() {
    let co = ModelParams::default().coefficients_f64();
    let mut rng = StdRng::seed_from_u64(12);
    let h = 1e-6;
    for _ in 0..100 {
        let s = [rng.gen_range(-4.0..4.0), rng.gen_range(-2.0..3.0), rng.gen_range(-7.0..7.0)];
        let j = jacobian(s, &co);
        let scale = j.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        for c in 0..3 {
            let (mut a, mut b) = (s, s);
            a[c] += h;
            b[c] -= h;
            let (fa, fb) = (DEFAULT.rhs(a), DEFAULT.rhs(b));
            for r in 0..3 {
                let fd = (fa[r] - fb[r]) / (2.0 * h);
                assert!((fd - j[r][c]).abs() < 1e-5 * scale, "d{r}/d{c} at {s:?}: {fd} vs {}", j[r][c]);
            }
        }
    }
}

#[test]
fn flow_is_reversible_under_the_reflection() {
    let m = FloatMap::new(&ModelParams::default()).with_steps(20_000);
    let refl = |s: [f64; 3]| [PI - s[0], s[1], -s[2]];
    let mut rng = StdRng::seed_from_u64(13);
    for _ in 0..10 {
        let x = [rng.gen_range(0.0..PI), rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0)];
        let t = rng.gen_range(0.5..7.0);
        let a = m.flow(refl(x), -t);
        let b = refl(m.flow(x, t));
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() < 1e-9, "{x:?}, t = {t}: {a:?} vs {b:?}");
        }
    }
}

#[test]
fn float_map_agrees_with_the_oracle() {
    let m = FloatMap::new(&ModelParams::default()).with_steps(4000);
    let o = Oracle { e: 0.1, omega2: 0.79 };
    let p = [1.2, 1.4];
    let a = m.apply(p, false);
    let b = o.poincare(p, 4000);
    assert!((a[0] - b[0]).abs() < 1e-10 && (a[1] - b[1]).abs() < 1e-10);
}
