//! Checks shared by the property tests and the acceptance run. Each returns
//! a one-line summary, or the first violation found.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use hyperion_core::hset::check_covering;
use hyperion_core::integrator::{Direction, FlowEnclosure, Integrator, Settings};
use hyperion_core::interval::{IVec, Interval};
use hyperion_core::model::ModelParams;
use hyperion_core::poincare::{d_poincare, poincare_map};
use hyperion_core::proofs::FixedPointsReport;
use rand::{rngs::StdRng, Rng, SeedableRng};

use super::linear::{fine, random_case, unit_source};
use super::{within, DEFAULT};

/// Oracle error at 20000 RK4 steps per `2 pi` is far below this.
pub const ORACLE_TOL: f64 = 1e-10;

pub fn integrator() -> Integrator {
    Integrator::new(ModelParams::default(), Settings::default())
}

/// Return time of 20 random section points.
pub fn return_time(integ: &Integrator) -> Result<String, String> {
    let quad = DEFAULT.return_time_quadrature(4096);
    if (quad - TAU).abs() >= 1e-12 {
        return Err(format!("quadrature gives {quad}"));
    }
    let mut rng = StdRng::seed_from_u64(31);
    let two_pi = Interval::two_pi();
    let mut widest: f64 = 0.0;
    for _ in 0..20 {
        let p = [rng.gen_range(0.0..PI), rng.gen_range(0.6..2.1)];
        let c = poincare_map(&IVec::from_point(p), 1, integ).map_err(|e| format!("{p:?}: {e}"))?;
        if !(c.time.lo() <= two_pi.lo() && two_pi.hi() <= c.time.hi()) {
            return Err(format!("{p:?}: return time {} misses 2 pi", c.time));
        }
        if c.time.diam() >= 1e-8 {
            return Err(format!("{p:?}: return time diameter {}", c.time.diam()));
        }
        widest = widest.max(c.time.diam());
    }
    Ok(format!("20 points, widest enclosure {widest:.1e}"))
}

/// `(center, radius)` boxes in `(theta, phi, f)`.
pub const BOXES: [([f64; 3], [f64; 3]); 6] = [
    ([FRAC_PI_2, 1.0989567, 0.0], [1e-4, 1e-4, 0.0]),
    ([FRAC_PI_2, 1.2945117, 0.0], [1e-3, 1e-3, 0.0]),
    ([FRAC_PI_2, 1.7120425, 0.0], [5e-4, 5e-4, 0.0]),
    ([0.3, 0.8, 0.0], [1e-3, 2e-3, 0.0]),
    ([2.5, 1.9, 0.4], [1e-3, 1e-3, 1e-3]),
    ([1.0, 1.5, -1.0], [2e-3, 1e-3, 1e-4]),
];

pub fn sample(rng: &mut StdRng, c: [f64; 3], r: [f64; 3]) -> [f64; 3] {
    let mut x = [0.0; 3];
    for i in 0..3 {
        x[i] = if r[i] == 0.0 { c[i] } else { c[i] + r[i] * rng.gen_range(-1.0..=1.0) };
    }
    x
}

pub fn boxed(c: [f64; 3], r: [f64; 3]) -> IVec<3> {
    IVec([0, 1, 2].map(|i| Interval::new(c[i] - r[i], c[i] + r[i])))
}

/// 50 oracle trajectories per box, checked at `t = 1` and after one return.
pub fn inclusion(integ: &Integrator) -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(21);
    let times = [1.0, TAU];
    let mut checked = 0;
    for (c, r) in BOXES {
        let start = FlowEnclosure::from_box(&boxed(c, r));
        let mut enclosures = Vec::new();
        for &t in &times {
            let e = integ
                .flow(&start, Interval::from(t), Direction::Forward)
                .map_err(|e| format!("box {c:?}: {e}"))?;
            enclosures.push(e.hull());
        }
        for _ in 0..50 {
            let x = sample(&mut rng, c, r);
            for (&t, e) in times.iter().zip(&enclosures) {
                let y = DEFAULT.flow(x, t, (20_000.0 * t / TAU).ceil() as usize);
                if !(0..3).all(|i| within(e[i].lo(), e[i].hi(), y[i], ORACLE_TOL)) {
                    return Err(format!("box {c:?}, t = {t}: {y:?} outside {e:?}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{} boxes, {checked} endpoints, 0 violations", BOXES.len()))
}

/// `DP` over a small box around 100 random points against central
/// differences of the oracle map.
pub fn derivative(integ: &Integrator) -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(33);
    let h = 1e-4;
    for _ in 0..100 {
        let p = [rng.gen_range(0.0..PI), rng.gen_range(0.6..2.1)];
        let b = IVec([Interval::new(p[0] - h, p[0] + h), Interval::new(p[1] - h, p[1] + h)]);
        let dp = d_poincare(&b, 1, integ).map_err(|e| format!("{p:?}: {e}"))?;
        for c in 0..2 {
            let (mut a, mut z) = (p, p);
            a[c] += h;
            z[c] -= h;
            let (fa, fz) = (DEFAULT.poincare(a, 20_000), DEFAULT.poincare(z, 20_000));
            for r in 0..2 {
                let fd = (fa[r] - fz[r]) / (2.0 * h);
                let d = dp[(r, c)];
                // The difference quotient is a mean of DP over the segment,
                // which lies in the box; 1e-7 covers the oracle's error.
                if !within(d.lo(), d.hi(), fd, 1e-7) {
                    return Err(format!("{p:?} d{r}/d{c}: {fd} not in {d}"));
                }
            }
        }
    }
    Ok("100 points, all difference quotients enclosed".into())
}

/// `|det DP - 1|` over the fixed-point enclosures.
pub fn area(fx: &FixedPointsReport, integ: &Integrator) -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for p in &fx.points {
        let proof = p.proof.as_ref().ok_or_else(|| format!("{}: no proof", p.name))?;
        let det = d_poincare(&proof.enclosure, proof.k, integ)
            .map_err(|e| format!("{}: {e}", p.name))?
            .det();
        let dev = (det - 1.0).mag();
        if dev >= 1e-6 {
            return Err(format!("{}: det DP = {det}", p.name));
        }
        worst = worst.max(dev);
    }
    Ok(format!("max |det DP - 1| = {worst:.1e}"))
}

/// 200 random linear cases against the exact decision.
pub fn covering_oracle() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(51);
    let m = unit_source();
    let settings = fine();
    let (mut cases, mut covering, mut resampled) = (0, 0, 0);
    while cases < 200 {
        let c = random_case(&mut rng);
        let Some(expected) = c.affine.decision(0.02, 1.0) else {
            resampled += 1;
            continue;
        };
        cases += 1;
        covering += usize::from(expected);
        let cert = check_covering(&m, &c.n, 1, &c.map, &settings);
        if cert.verified != expected {
            return Err(format!(
                "case {cases}: checker says {}, exact answer {expected}: {:?} {:?}",
                cert.verified, c.affine, cert.diagnostics
            ));
        }
    }
    // Both outcomes must be well represented for the comparison to mean
    // anything.
    if covering < 40 || cases - covering < 40 || resampled >= 200 {
        return Err(format!("unbalanced sample: {covering} of {cases} cover, {resampled} resampled"));
    }
    Ok(format!("{cases} cases ({covering} covering), 0 disagreements, {resampled} near-degenerate resampled"))
}
