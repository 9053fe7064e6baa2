//! The Poincare map on the section `S = {f = 0 mod 2 pi}`.
//!
//! Since `f' > 0` everywhere and `f` does not depend on `(theta, phi)`, the
//! k-th return is the first time the unwrapped anomaly reaches `2 pi k`.
//! The crossing time is bracketed inside one Taylor step and refined by
//! interval Newton on `g(t) = f(t) - 2 pi k`.

use serde::Serialize;

use crate::integrator::jet::{horner, taylor};
use crate::integrator::{
    C1FlowEnclosure, Direction, FlowEnclosure, IntegrationError, Integrator,
};
use crate::interval::{IMat, IVec, Interval};
use crate::model::field;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PoincareError {
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error("box could not be mapped even after {depth} bisections: {source}")]
    Subdivision {
        depth: u32,
        source: IntegrationError,
    },
}

/// Image of a set on the section.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionCrossing {
    /// Enclosure of the return time.
    pub time: Interval,
    /// `(theta, phi)` hull, `theta` unwrapped.
    pub state: IVec<2>,
    /// The full Lohner set at the crossing.
    pub set: FlowEnclosure,
    pub derivative: Option<IMat<2>>,
}

const STEP_BUDGET: usize = 100_000;

fn progress_sign(dir: Direction) -> f64 {
    match dir {
        Direction::Forward => 1.0,
        Direction::Backward => -1.0,
    }
}

/// Interval Newton for the crossing time within a step of length `h`
/// from `e`. Returns `T ⊂ [0, h]` containing the crossing time of every
/// trajectory in `e`.
fn crossing_time(
    integ: &Integrator,
    e: &FlowEnclosure,
    h: f64,
    target: Interval,
    dir: Direction,
) -> Result<Interval, IntegrationError> {
    let co = integ.coefficients(dir);
    let sg = progress_sign(dir);
    let p = integ.settings().order;
    let xbox = e.hull();
    let z = integ.rough_enclosure_with_dir(&xbox, h, dir)?;
    let jx = taylor(xbox.0, p, &co);
    let jz = taylor(z.0, p + 1, &co);
    let rem = jz.f[p + 1];
    let g = |t: Interval| (horner(&jx.f, t) + rem * t.powi(p as u32 + 1)) * sg - target;
    let dg = field(z.0, &co)[2] * sg;
    if dg.lo() <= 0.0 {
        return Err(IntegrationError::Crossing(format!(
            "anomaly rate not positive on the step: {dg}"
        )));
    }
    let mut t = Interval::new(0.0, h);
    if !(g(Interval::ZERO).hi() < 0.0 && g(Interval::point(h)).lo() > 0.0) {
        return Err(IntegrationError::Crossing("crossing not bracketed".into()));
    }
    let mut passes = 0;
    loop {
        let m = Interval::point(t.mid());
        let n = m - g(m).checked_div(dg)?;
        let next = n
            .intersect(t)
            .ok_or_else(|| IntegrationError::Crossing("Newton image disjoint".into()))?;
        passes += 1;
        let improved = next.diam() < 0.5 * t.diam();
        t = next;
        if passes >= 2 && !improved || passes >= 30 {
            break;
        }
    }
    Ok(t)
}

/// Non-rigorous time at which the center reaches `target` within `h`.
fn predicted_crossing(integ: &Integrator, x: [f64; 3], target: f64, h: f64, dir: Direction) -> Option<f64> {
    let co = integ.coefficients_f64(dir);
    let sg = progress_sign(dir);
    let j = taylor(x, integ.settings().order, &co);
    let g = |t: f64| sg * horner(&j.f, t) - target;
    if g(h) < 0.0 {
        return None;
    }
    let df = j.f.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect::<Vec<_>>();
    let mut t = h * 0.5;
    for _ in 0..50 {
        let d = sg * horner(&df, t);
        let nt = (t - g(t) / d).clamp(0.0, h);
        if (nt - t).abs() < 1e-15 {
            t = nt;
            break;
        }
        t = nt;
    }
    Some(t)
}

/// Integrates `e` (sitting on `f = 0`) until the unwrapped anomaly reaches
/// `2 pi k` (or `-2 pi k` backwards).
pub fn flow_to_section(
    integ: &Integrator,
    e: &FlowEnclosure,
    k: u32,
    dir: Direction,
) -> Result<(FlowEnclosure, Interval), IntegrationError> {
    let (set, _, t) = flow_to_section_impl(integ, e, None, k, dir)?;
    Ok((set, t))
}

pub fn flow_to_section_c1(
    integ: &Integrator,
    e: &C1FlowEnclosure,
    k: u32,
    dir: Direction,
) -> Result<(C1FlowEnclosure, Interval), IntegrationError> {
    let (set, v, t) = flow_to_section_impl(integ, &e.set, Some(e.clone()), k, dir)?;
    let mut c1 = v.expect("c1");
    c1.set = set;
    Ok((c1, t))
}

fn flow_to_section_impl(
    integ: &Integrator,
    e: &FlowEnclosure,
    c1: Option<C1FlowEnclosure>,
    k: u32,
    dir: Direction,
) -> Result<(FlowEnclosure, Option<C1FlowEnclosure>, Interval), IntegrationError> {
    let target = Interval::two_pi() * k as f64;
    let sg = progress_sign(dir);
    let t0 = e.time;
    let mut cur = e.clone();
    let mut cur_c1 = c1;
    let mut h_prev = integ.settings().h_max;
    for _ in 0..STEP_BUDGET {
        let mut h = integ.suggest_step(cur.center, dir).min(h_prev * 1.5);
        if let Some(tau) = predicted_crossing(integ, cur.center, target.mid(), h, dir) {
            let h_try = (tau * (1.0 + 1e-6) + 1e-9).min(h * 1.5);
            let last = crossing_time(integ, &cur, h_try, target, dir).and_then(|t| {
                Ok(match &cur_c1 {
                    Some(c) => {
                        let c = integ.step_c1(c, t, dir)?;
                        (c.set.clone(), Some(c))
                    }
                    None => (integ.step(&cur, t, dir)?, None),
                })
            });
            match last {
                Ok((set, c1_out)) => {
                    let time = set.time - t0;
                    debug_assert!((set.hull()[2] * sg).intersects(target));
                    return Ok((set, c1_out, time));
                }
                Err(IntegrationError::StepTooLarge { .. }) => h = h.min(tau / 2.0),
                Err(err) => return Err(err),
            }
        }
        match &mut cur_c1 {
            Some(c) => {
                let (next, used) = integ.step_c1_with_retry(c, h, dir)?;
                *c = next;
                cur = c.set.clone();
                h_prev = used;
            }
            None => {
                let (next, used) = integ.step_with_retry(&cur, h, dir)?;
                cur = next;
                h_prev = used;
            }
        }
    }
    Err(IntegrationError::Budget(STEP_BUDGET))
}

fn section_state(set: &FlowEnclosure) -> IVec<2> {
    let h = set.hull();
    IVec([h[0], h[1]])
}

/// Embeds a section box at `f = 0`.
pub fn section_set(b: &IVec<2>) -> FlowEnclosure {
    FlowEnclosure::from_box(&IVec([b[0], b[1], Interval::ZERO]))
}

/// `P^k` on a box (backward iterates for `Direction::Backward`).
pub fn poincare_map_dir(
    b: &IVec<2>,
    k: u32,
    integ: &Integrator,
    dir: Direction,
) -> Result<SectionCrossing, PoincareError> {
    let (set, time) = flow_to_section(integ, &section_set(b), k, dir)?;
    Ok(SectionCrossing {
        time,
        state: section_state(&set),
        set,
        derivative: None,
    })
}

pub fn poincare_map(b: &IVec<2>, k: u32, integ: &Integrator) -> Result<SectionCrossing, PoincareError> {
    poincare_map_dir(b, k, integ, Direction::Forward)
}

/// `P^k` of a general Lohner set lying on the section.
pub fn poincare_map_set(
    e: &FlowEnclosure,
    k: u32,
    integ: &Integrator,
) -> Result<SectionCrossing, PoincareError> {
    let (set, time) = flow_to_section(integ, e, k, Direction::Forward)?;
    Ok(SectionCrossing {
        time,
        state: section_state(&set),
        set,
        derivative: None,
    })
}

/// Projection of the flow derivative at the crossing onto the section:
/// `DP = [DPhi - F (row_f DPhi) / f']` restricted to `(theta, phi)`.
fn section_derivative(c1: &C1FlowEnclosure, integ: &Integrator, dir: Direction) -> Result<IMat<2>, IntegrationError> {
    let v = c1.dphi.hull();
    let x = c1.set.hull();
    let fx = field(x.0, &integ.coefficients(dir));
    let mut dp = IMat::<2>::zero();
    for i in 0..2 {
        for j in 0..2 {
            dp.0[i][j] = v.0[i][j] - (fx[i] * v.0[2][j]).checked_div(fx[2])?;
        }
    }
    Ok(dp)
}

/// `P^k` on a box together with `DP^k` over the box.
pub fn poincare_map_c1(b: &IVec<2>, k: u32, integ: &Integrator) -> Result<SectionCrossing, PoincareError> {
    let start = C1FlowEnclosure::new(section_set(b));
    let (c1, time) = flow_to_section_c1(integ, &start, k, Direction::Forward)?;
    let dp = section_derivative(&c1, integ, Direction::Forward)?;
    Ok(SectionCrossing {
        time,
        state: section_state(&c1.set),
        set: c1.set,
        derivative: Some(dp),
    })
}

pub fn d_poincare(b: &IVec<2>, k: u32, integ: &Integrator) -> Result<IMat<2>, PoincareError> {
    Ok(poincare_map_c1(b, k, integ)?.derivative.expect("c1"))
}

/// `P^k` on a box, bisecting along the longest side whenever a piece cannot
/// be integrated; the result is the hull over the pieces.
pub fn poincare_map_subdivided(
    b: &IVec<2>,
    k: u32,
    integ: &Integrator,
) -> Result<IVec<2>, PoincareError> {
    fn go(b: &IVec<2>, k: u32, integ: &Integrator, depth: u32, max: u32) -> Result<IVec<2>, PoincareError> {
        match poincare_map(b, k, integ) {
            Ok(c) => Ok(c.state),
            Err(PoincareError::Integration(_)) if depth < max => {
                let axis = if b[0].diam() >= b[1].diam() { 0 } else { 1 };
                let m = b[axis].mid();
                let mut lo = *b;
                let mut hi = *b;
                lo[axis] = Interval::new(b[axis].lo(), m);
                hi[axis] = Interval::new(m, b[axis].hi());
                let (l, r) = rayon::join(
                    || go(&lo, k, integ, depth + 1, max),
                    || go(&hi, k, integ, depth + 1, max),
                );
                Ok(l?.hull(&r?))
            }
            Err(PoincareError::Integration(source)) => Err(PoincareError::Subdivision { depth, source }),
            Err(e) => Err(e),
        }
    }
    go(b, k, integ, 0, integ.settings().max_subdiv_depth)
}

/// Outcome of comparing `P(R x)` with `R(P^{-1} x)`.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    pub forward_of_mirror: IVec<2>,
    pub mirror_of_backward: IVec<2>,
    pub consistent: bool,
}

/// Consistency diagnostic for the reversing symmetry `P R = R P^{-1}`,
/// comparing `theta` modulo `pi`.
pub fn symmetry_check(b: &IVec<2>, integ: &Integrator) -> Result<SymmetryReport, PoincareError> {
    let rb = crate::model::apply_r(b);
    let fwd = poincare_map(&rb, 1, integ)?.state;
    let bwd = poincare_map_dir(b, 1, integ, Direction::Backward)?.state;
    let rbwd = crate::model::apply_r(&bwd);
    let shift = ((rbwd[0].mid() - fwd[0].mid()) / std::f64::consts::PI).round();
    let moved = IVec([fwd[0] + Interval::pi() * shift, fwd[1]]);
    let consistent = moved.intersect(&rbwd).is_some();
    Ok(SymmetryReport {
        forward_of_mirror: moved,
        mirror_of_backward: rbwd,
        consistent,
    })
}
