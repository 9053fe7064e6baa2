use std::f64::consts::PI;

use hyperion_core::interval::{IMat, IVec, Interval};
use hyperion_core::model::ModelParams;
use hyperion_core::newton::{eigen_enclosure, prove_fixed_point};
use hyperion_core::proofs::{ProofSettings, Prover};
use hyperion_core::scatter::FloatMap;
use rand::{rngs::StdRng, Rng, SeedableRng};

/// Floating-point Newton for `P(x) = x + m pi e_theta` from `x`.
fn float_newton(map: &FloatMap, mut x: [f64; 2], m: i64) -> [f64; 2] {
    for _ in 0..8 {
        let y = map.apply(x, false);
        let g = [y[0] - x[0] - m as f64 * PI, y[1] - x[1]];
        let j = map.jacobian(x, 1e-6);
        let a = [[j[0][0] - 1.0, j[0][1]], [j[1][0], j[1][1] - 1.0]];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        x[0] -= (a[1][1] * g[0] - a[0][1] * g[1]) / det;
        x[1] -= (a[0][0] * g[1] - a[1][0] * g[0]) / det;
    }
    x
}

#[test]
fn proven_points_attract_floating_point_newton() {
    let prover = Prover::new(ProofSettings::default()).unwrap();
    let map = FloatMap::new(&ModelParams::default()).with_steps(20_000);
    for p in &prover.prove_fixed_points().points {
        let proof = p.proof.as_ref().unwrap();
        assert!(proof.unique);
        let x = float_newton(&map, proof.bx.mid(), proof.theta_shift);
        let e = proof.enclosure;
        for i in 0..2 {
            assert!(e[i].inflate(1e-9).contains(x[i]), "{}: {x:?} vs {e:?}", p.name);
        }
    }
}

#[test]
fn eigenpairs_are_consistent() {
    let prover = Prover::new(ProofSettings::default()).unwrap();
    for p in &prover.prove_fixed_points().points {
        let proof = p.proof.as_ref().unwrap();
        let a = proof.derivative;
        let v = proof.eigenvectors.unwrap();
        for j in 0..2 {
            let av = a.matvec(&v.col(j));
            let lv = v.col(j) * proof.eigenvalues[j];
            assert!(av[0].intersects(lv[0]) && av[1].intersects(lv[1]), "{}: {av:?} vs {lv:?}", p.name);
        }
        let prod = proof.eigenvalues[0] * proof.eigenvalues[1];
        assert!(prod.intersects(a.det()), "{}", p.name);
    }
}

#[test]
fn eigen_enclosures_of_random_matrices() {
    let mut rng = StdRng::seed_from_u64(41);
    let mut checked = 0;
    while checked < 200 {
        let m = [[rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)], [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)]];
        let tr = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let disc = tr * tr - 4.0 * det;
        if disc < 1e-3 {
            continue;
        }
        checked += 1;
        let e = eigen_enclosure(&IMat::from_point(m));
        assert!(!e.undecided);
        let l = [(tr + disc.sqrt()) / 2.0, (tr - disc.sqrt()) / 2.0];
        for x in l {
            assert!(e.values.iter().any(|v| v.inflate(1e-12 * (1.0 + x.abs())).contains(x)), "{m:?}: {x} not in {:?}", e.values);
        }
    }
}

#[test]
fn no_fixed_point_where_there_is_none() {
    let prover = Prover::new(ProofSettings::default()).unwrap();
    let bx = IVec([Interval::new(1.5, 1.6), Interval::new(1.5, 1.52)]);
    assert!(prove_fixed_point(&bx, 1, prover.integrator()).is_err());
}
