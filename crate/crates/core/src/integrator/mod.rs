//! Rigorous Taylor integration of sets (C0) and of sets with the derivative
//! of the flow (C1), with Lohner's doubleton representation against the
//! wrapping effect.
//!
//! A set is stored as `x + C r0 + B r` with a point center `x`, point
//! matrices `C`, `B`, a fixed initial box `r0` and an accumulated error box
//! `r`. One step of size `h` maps it to `y + A (C r0 + B r) + rem`, where
//! `y` is the Taylor polynomial at `x`, `A` the Jacobian of the Taylor
//! polynomial over the hull, and `rem` the Lagrange remainder evaluated on a
//! rough enclosure of the trajectory segment.

pub mod jet;
mod settings;

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

pub use settings::Settings;

use crate::interval::linalg::point;
use crate::interval::{DomainError, IMat, IVec, Interval};
use crate::model::{field, jacobian, Coefficients, ModelParams};
use jet::{horner_mat, taylor, variational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntegrationError {
    #[error("step rejected; retry with at most {h:e}")]
    StepTooLarge { h: f64 },
    #[error("step size fell below the minimum {0:e}")]
    StepUnderflow(f64),
    #[error("enclosure is no longer finite")]
    Blowup,
    #[error("section not reached within {0} steps")]
    Budget(usize),
    #[error("crossing time could not be refined: {0}")]
    Crossing(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

type M3 = [[f64; 3]; 3];

/// Lohner doubleton `center + c_frame * r0 + basis * residual`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowEnclosure {
    pub center: [f64; 3],
    pub c_frame: M3,
    pub r0: IVec<3>,
    pub basis: M3,
    pub residual: IVec<3>,
    /// Elapsed integration time.
    pub time: Interval,
}

impl FlowEnclosure {
    pub fn from_point(x: [f64; 3]) -> Self {
        FlowEnclosure {
            center: x,
            c_frame: point::identity(),
            r0: IVec::zero(),
            basis: point::identity(),
            residual: IVec::zero(),
            time: Interval::ZERO,
        }
    }

    pub fn from_box(b: &IVec<3>) -> Self {
        let (m, r0) = b.split_mid();
        FlowEnclosure {
            center: m,
            c_frame: point::identity(),
            r0,
            basis: point::identity(),
            residual: IVec::zero(),
            time: Interval::ZERO,
        }
    }

    /// The set `center + c_frame * r0 + slack`.
    pub fn from_parallelepiped(center: [f64; 3], c_frame: M3, r0: IVec<3>, slack: IVec<3>) -> Self {
        FlowEnclosure {
            center,
            c_frame,
            r0,
            basis: point::identity(),
            residual: slack,
            time: Interval::ZERO,
        }
    }

    /// Interval hull of the represented set.
    pub fn hull(&self) -> IVec<3> {
        IVec::from_point(self.center)
            + IMat::from_point(self.c_frame).matvec(&self.r0)
            + IMat::from_point(self.basis).matvec(&self.residual)
    }
}

/// Enclosure `center + basis * residual` of a set of 3x3 matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct VarEnclosure {
    pub center: M3,
    pub basis: M3,
    pub residual: IMat<3>,
}

impl VarEnclosure {
    pub fn identity() -> Self {
        VarEnclosure {
            center: point::identity(),
            basis: point::identity(),
            residual: IMat::zero(),
        }
    }

    pub fn hull(&self) -> IMat<3> {
        IMat::from_point(self.center) + IMat::from_point(self.basis).matmul(&self.residual)
    }
}

/// A set together with an enclosure of the derivative of the flow on it.
#[derive(Debug, Clone, PartialEq)]
pub struct C1FlowEnclosure {
    pub set: FlowEnclosure,
    pub dphi: VarEnclosure,
}

impl C1FlowEnclosure {
    pub fn new(set: FlowEnclosure) -> Self {
        C1FlowEnclosure {
            set,
            dphi: VarEnclosure::identity(),
        }
    }
}

/// Integration engine: model constants, settings and work counters.
#[derive(Debug)]
pub struct Integrator {
    params: ModelParams,
    settings: Settings,
    co: Coefficients<Interval>,
    co_f: Coefficients<f64>,
    steps: AtomicU64,
}

impl Clone for Integrator {
    fn clone(&self) -> Self {
        Integrator::new(self.params.clone(), self.settings.clone())
    }
}

fn mid3(m: &IMat<3>) -> M3 {
    m.mid()
}

/// Orthonormal frame from the columns of `m`. The anomaly direction stays
/// the last basis vector so that `f` remains decoupled; the two remaining
/// columns are ordered by `|column| * weight` before Gram-Schmidt.
fn qr_frame(m: &M3, weight: [f64; 2]) -> M3 {
    let col = |j: usize| [m[0][j], m[1][j]];
    let norm = |v: [f64; 2]| v[0].hypot(v[1]);
    let w = if weight[0] == 0.0 && weight[1] == 0.0 {
        [1.0, 1.0]
    } else {
        weight
    };
    let (a, b) = if norm(col(1)) * w[1] > norm(col(0)) * w[0] {
        (col(1), col(0))
    } else {
        (col(0), col(1))
    };
    let na = norm(a);
    let q1 = if na > 0.0 { [a[0] / na, a[1] / na] } else { [1.0, 0.0] };
    let d = q1[0] * b[0] + q1[1] * b[1];
    let v = [b[0] - d * q1[0], b[1] - d * q1[1]];
    let nv = norm(v);
    let q2 = if nv > 1e-12 * norm(b).max(f64::MIN_POSITIVE) {
        [v[0] / nv, v[1] / nv]
    } else {
        [-q1[1], q1[0]]
    };
    [[q1[0], q2[0], 0.0], [q1[1], q2[1], 0.0], [0.0, 0.0, 1.0]]
}

/// Rigorous inverse of a frame produced by [`qr_frame`].
fn frame_inverse(b: &M3) -> Result<IMat<3>, DomainError> {
    let q = IMat([
        [Interval::point(b[0][0]), Interval::point(b[0][1])],
        [Interval::point(b[1][0]), Interval::point(b[1][1])],
    ])
    .inverse2x2()?;
    let mut inv = IMat::<3>::zero();
    for i in 0..2 {
        for j in 0..2 {
            inv.0[i][j] = q.0[i][j];
        }
    }
    inv.0[2][2] = Interval::point(b[2][2]).recip()?;
    Ok(inv)
}

fn check_finite3(v: &IVec<3>) -> Result<(), IntegrationError> {
    if v.0.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(IntegrationError::Blowup)
    }
}

impl Integrator {
    pub fn new(params: ModelParams, settings: Settings) -> Self {
        let co = params.coefficients();
        let co_f = params.coefficients_f64();
        Integrator {
            params,
            settings,
            co,
            co_f,
            steps: AtomicU64::new(0),
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn settings(&self) -> &Settings {
        &self.settings
    }

    /// Number of rigorous steps taken so far.
    pub fn step_count(&self) -> u64 {
        self.steps.load(Ordering::Relaxed)
    }

    pub fn coefficients(&self, dir: Direction) -> Coefficients<Interval> {
        match dir {
            Direction::Forward => self.co,
            Direction::Backward => self.co.reversed(),
        }
    }

    pub fn coefficients_f64(&self, dir: Direction) -> Coefficients<f64> {
        match dir {
            Direction::Forward => self.co_f,
            Direction::Backward => self.co_f.reversed(),
        }
    }

    pub fn taylor_coefficients(&self, s: &IVec<3>, order: usize) -> Vec<IVec<3>> {
        let j = taylor(s.0, order, &self.co);
        (0..=order).map(|k| IVec(j.coeff(k))).collect()
    }

    /// A box `Z` with `s + [0, h] F(Z) ⊆ Z`, which therefore contains every
    /// trajectory starting in `s` over `[0, h]`.
    pub fn rough_enclosure(&self, s: &IVec<3>, h: f64) -> Result<IVec<3>, IntegrationError> {
        self.rough_enclosure_with(s, h, &self.co)
    }

    pub fn rough_enclosure_with_dir(
        &self,
        s: &IVec<3>,
        h: f64,
        dir: Direction,
    ) -> Result<IVec<3>, IntegrationError> {
        self.rough_enclosure_with(s, h, &self.coefficients(dir))
    }

    fn rough_enclosure_with(
        &self,
        s: &IVec<3>,
        h: f64,
        co: &Coefficients<Interval>,
    ) -> Result<IVec<3>, IntegrationError> {
        let hh = Interval::new(0.0, h);
        let picard = |z: &IVec<3>| *s + IVec(field(z.0, co)) * hh;
        let mut z = picard(s);
        for i in 0..3 {
            z[i] = z[i].blow(2.0, 1e-13 + 1e-3 * z[i].diam());
        }
        for _ in 0..self.settings.rough_attempts {
            let y = picard(&z);
            check_finite3(&y)?;
            if y.subset(&z) {
                return Ok(y);
            }
            let mut next = z.hull(&y);
            for i in 0..3 {
                next[i] = next[i].blow(1.5, 1e-13);
            }
            z = next;
        }
        Err(IntegrationError::StepTooLarge { h: h / 2.0 })
    }

    /// Rough enclosure of the variational solution with `V(0) = I`.
    fn rough_variational(
        &self,
        z: &IVec<3>,
        h: f64,
        co: &Coefficients<Interval>,
    ) -> Result<IMat<3>, IntegrationError> {
        let hh = Interval::new(0.0, h);
        let jz = IMat(jacobian(z.0, co));
        let id = IMat::<3>::identity();
        let picard = |w: &IMat<3>| id + jz.matmul(w) * hh;
        let mut w = picard(&id);
        for i in 0..3 {
            for j in 0..3 {
                w.0[i][j] = w.0[i][j].blow(2.0, 1e-13);
            }
        }
        for _ in 0..self.settings.rough_attempts {
            let y = picard(&w);
            if y.subset(&w) {
                return Ok(y);
            }
            let mut next = w.hull(&y);
            for row in next.0.iter_mut() {
                for x in row.iter_mut() {
                    *x = x.blow(1.5, 1e-13);
                }
            }
            w = next;
        }
        Err(IntegrationError::StepTooLarge { h: h / 2.0 })
    }

    /// Step size from the decay of the Taylor coefficients at `x`.
    pub fn suggest_step(&self, x: [f64; 3], dir: Direction) -> f64 {
        let p = self.settings.order;
        let j = taylor(x, p, &self.coefficients_f64(dir));
        let mut h = self.settings.h_max;
        for k in [p - 1, p] {
            let c = j.coeff(k).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if c > 0.0 {
                h = h.min((self.settings.tol / c).powf(1.0 / k as f64));
            }
        }
        h.clamp(self.settings.h_min, self.settings.h_max)
    }

    /// One Lohner step of (possibly interval) length `h >= 0`.
    pub fn step(
        &self,
        e: &FlowEnclosure,
        h: Interval,
        dir: Direction,
    ) -> Result<FlowEnclosure, IntegrationError> {
        Ok(self.step_impl(e, None, h, dir, None)?.0)
    }

    /// Like [`Integrator::step`] but rejects the step with
    /// `StepTooLarge` (carrying a smaller proposal) when the Lagrange
    /// remainder exceeds `settings.tol`.
    pub fn step_controlled(
        &self,
        e: &FlowEnclosure,
        h: Interval,
        dir: Direction,
    ) -> Result<FlowEnclosure, IntegrationError> {
        Ok(self.step_impl(e, None, h, dir, Some(self.settings.tol))?.0)
    }

    /// One step propagating the derivative of the flow as well.
    pub fn step_c1(
        &self,
        e: &C1FlowEnclosure,
        h: Interval,
        dir: Direction,
    ) -> Result<C1FlowEnclosure, IntegrationError> {
        let (set, v) = self.step_impl(&e.set, Some(&e.dphi), h, dir, None)?;
        Ok(C1FlowEnclosure {
            set,
            dphi: v.expect("c1 step"),
        })
    }

    pub fn step_c1_controlled(
        &self,
        e: &C1FlowEnclosure,
        h: Interval,
        dir: Direction,
    ) -> Result<C1FlowEnclosure, IntegrationError> {
        let (set, v) = self.step_impl(&e.set, Some(&e.dphi), h, dir, Some(self.settings.tol))?;
        Ok(C1FlowEnclosure {
            set,
            dphi: v.expect("c1 step"),
        })
    }

    fn step_impl(
        &self,
        e: &FlowEnclosure,
        var: Option<&VarEnclosure>,
        h: Interval,
        dir: Direction,
        rem_limit: Option<f64>,
    ) -> Result<(FlowEnclosure, Option<VarEnclosure>), IntegrationError> {
        assert!(h.lo() >= 0.0, "step length must be non-negative");
        self.steps.fetch_add(1, Ordering::Relaxed);
        let co = self.coefficients(dir);
        let p = self.settings.order;
        let xbox = e.hull();
        check_finite3(&xbox)?;
        let z = self.rough_enclosure_with(&xbox, h.hi(), &co)?;

        let jc = taylor(IVec::from_point(e.center).0, p, &co);
        let y = IVec(jc.eval(h));
        let jz = taylor(z.0, p + 1, &co);
        let hp1 = h.powi(p as u32 + 1);
        let rem = IVec(jz.coeff(p + 1)) * hp1;
        if let Some(limit) = rem_limit {
            let size = (0..3).map(|i| rem[i].mag()).fold(0.0, f64::max);
            if size > limit {
                let shrink = (limit / size).powf(1.0 / (p + 1) as f64) * 0.9;
                return Err(IntegrationError::StepTooLarge { h: h.hi() * shrink.min(0.9) });
            }
        }

        let jx = taylor(xbox.0, p, &co);
        let vx = variational(&jx, IMat::<3>::identity().0, &co);
        let a = IMat(horner_mat(&vx, h));

        let yt = y + rem;
        check_finite3(&yt)?;
        let (x_new, delta) = yt.split_mid();

        let ac = a.matmul(&IMat::from_point(e.c_frame));
        let c_new = mid3(&ac);
        let ab = a.matmul(&IMat::from_point(e.basis));
        let b_new = qr_frame(&mid3(&ab), [e.residual[0].rad(), e.residual[1].rad()]);
        let b_inv = frame_inverse(&b_new)?;
        let err = (ac - IMat::from_point(c_new)).matvec(&e.r0) + delta;
        let r_new = b_inv.matmul(&ab).matvec(&e.residual) + b_inv.matvec(&err);
        check_finite3(&r_new)?;

        let set = FlowEnclosure {
            center: x_new,
            c_frame: c_new,
            r0: e.r0,
            basis: b_new,
            residual: r_new,
            time: e.time + h,
        };

        let var_new = match var {
            None => None,
            Some(v) => {
                let w = self.rough_variational(&z, h.hi(), &co)?;
                let vz = variational(&jz, w.0, &co);
                let rem_v = IMat(vz[p + 1]) * hp1;
                let a_full = a + rem_v;
                let avc = a_full.matmul(&IMat::from_point(v.center));
                let c_v = mid3(&avc);
                let avb = a_full.matmul(&IMat::from_point(v.basis));
                let wts = [0, 1].map(|i| v.residual.0[i].iter().map(|x| x.mag()).fold(0.0, f64::max));
                let b_v = qr_frame(&mid3(&avb), wts);
                let b_v_inv = frame_inverse(&b_v)?;
                let r_v = b_v_inv.matmul(&avb).matmul(&v.residual)
                    + b_v_inv.matmul(&(avc - IMat::from_point(c_v)));
                Some(VarEnclosure {
                    center: c_v,
                    basis: b_v,
                    residual: r_v,
                })
            }
        };
        Ok((set, var_new))
    }

    /// Flow a set for the given (possibly interval) duration.
    pub fn flow(
        &self,
        e: &FlowEnclosure,
        duration: Interval,
        dir: Direction,
    ) -> Result<FlowEnclosure, IntegrationError> {
        let mut cur = e.clone();
        let end = e.time + duration;
        let mut h_prev = self.settings.h_max;
        loop {
            let remaining = end - cur.time;
            if remaining.lo() < 0.0 {
                return Err(IntegrationError::Crossing("negative remaining time".into()));
            }
            let h = self.suggest_step(cur.center, dir).min(h_prev * 1.5);
            if remaining.hi() <= h {
                match self.step(&cur, remaining, dir) {
                    Err(IntegrationError::StepTooLarge { .. }) => {}
                    r => return r,
                }
                h_prev = remaining.lo() / 2.0;
                let (next, used) = self.step_with_retry(&cur, h_prev, dir)?;
                cur = next;
                h_prev = used;
                continue;
            }
            let (next, used) = self.step_with_retry(&cur, h, dir)?;
            cur = next;
            h_prev = used;
        }
    }

    /// C1 version of [`Integrator::flow`].
    pub fn flow_c1(
        &self,
        e: &C1FlowEnclosure,
        duration: Interval,
        dir: Direction,
    ) -> Result<C1FlowEnclosure, IntegrationError> {
        let mut cur = e.clone();
        let end = e.set.time + duration;
        let mut h_prev = self.settings.h_max;
        loop {
            let remaining = end - cur.set.time;
            if remaining.lo() < 0.0 {
                return Err(IntegrationError::Crossing("negative remaining time".into()));
            }
            let h = self.suggest_step(cur.set.center, dir).min(h_prev * 1.5);
            if remaining.hi() <= h {
                match self.step_c1(&cur, remaining, dir) {
                    Err(IntegrationError::StepTooLarge { .. }) => {}
                    r => return r,
                }
                let (next, used) = self.step_c1_with_retry(&cur, remaining.lo() / 2.0, dir)?;
                cur = next;
                h_prev = used;
                continue;
            }
            let (next, used) = self.step_c1_with_retry(&cur, h, dir)?;
            cur = next;
            h_prev = used;
        }
    }

    /// A remainder-controlled point step, shrinking `h` until it is
    /// accepted. Returns the enclosure and the step actually taken.
    pub fn step_with_retry(
        &self,
        e: &FlowEnclosure,
        mut h: f64,
        dir: Direction,
    ) -> Result<(FlowEnclosure, f64), IntegrationError> {
        loop {
            match self.step_controlled(e, Interval::point(h), dir) {
                Err(IntegrationError::StepTooLarge { h: proposal }) if proposal >= self.settings.h_min => {
                    h = proposal
                }
                Err(IntegrationError::StepTooLarge { .. }) => {
                    return Err(IntegrationError::StepUnderflow(self.settings.h_min))
                }
                r => return r.map(|x| (x, h)),
            }
        }
    }

    pub fn step_c1_with_retry(
        &self,
        e: &C1FlowEnclosure,
        mut h: f64,
        dir: Direction,
    ) -> Result<(C1FlowEnclosure, f64), IntegrationError> {
        loop {
            match self.step_c1_controlled(e, Interval::point(h), dir) {
                Err(IntegrationError::StepTooLarge { h: proposal }) if proposal >= self.settings.h_min => {
                    h = proposal
                }
                Err(IntegrationError::StepTooLarge { .. }) => {
                    return Err(IntegrationError::StepUnderflow(self.settings.h_min))
                }
                r => return r.map(|x| (x, h)),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integ() -> Integrator {
        Integrator::new(ModelParams::default(), Settings::default())
    }

    #[test]
    fn zero_step_keeps_the_set() {
        let i = integ();
        let b = IVec([
            Interval::new(1.0, 1.001),
            Interval::new(0.5, 0.5005),
            Interval::ZERO,
        ]);
        let e = FlowEnclosure::from_box(&b);
        let s = i.step(&e, Interval::ZERO, Direction::Forward).unwrap();
        let h = s.hull();
        for k in 0..3 {
            assert!(b[k].subset(h[k]));
            assert!(h[k].diam() - b[k].diam() < 1e-14);
        }
    }

    #[test]
    fn rough_enclosure_contains_start() {
        let i = integ();
        let s = IVec::from_point([1.0, 0.5, 0.0]);
        let z = i.rough_enclosure(&s, 0.1).unwrap();
        assert!(s.subset(&z));
        let circ = Integrator::new(ModelParams::new("0", "0.79").unwrap(), Settings::default());
        let z = circ.rough_enclosure(&s, 0.25).unwrap();
        assert!(z[2].subset(Interval::new(-1e-9, 0.25 + 1e-9)));
    }

    #[test]
    fn qr_keeps_anomaly_axis() {
        let m = [[2.0, 1.0, 0.3], [0.5, 3.0, -0.2], [0.0, 0.0, 1.1]];
        let q = qr_frame(&m, [1.0, 1.0]);
        assert_eq!(q[2], [0.0, 0.0, 1.0]);
        assert_eq!(q[0][2], 0.0);
        let dot = q[0][0] * q[0][1] + q[1][0] * q[1][1];
        assert!(dot.abs() < 1e-15);
    }
}
