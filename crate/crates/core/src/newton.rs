//! Interval Newton proofs for fixed points of `P^k` and enclosures of the
//! eigen-decomposition of `DP^k` at them.
//!
//! On the cylinder `theta mod pi` a fixed point of `P^k` is a point with
//! `P^k(x) = x + m pi e_theta` for some integer `m`; the shift is read off
//! from the image of the box midpoint.
//!
//! The fixed points studied here are symmetric: they lie on `theta = pi/2`
//! and their orbit is invariant under the reversor
//! `(theta, phi, f) -> (pi - theta, phi, -f)`. Such an orbit is pinned down
//! by a one-dimensional shooting condition at half period,
//! `theta(pi k; pi/2, phi, 0) in (pi/2) Z`, whose interval Newton enclosure
//! is far tighter than the two-dimensional one (it avoids the expansion of
//! a full return). The two-dimensional operator supplies uniqueness.

use serde::{Deserialize, Serialize};

use crate::integrator::{C1FlowEnclosure, Direction, FlowEnclosure, IntegrationError, Integrator};
use crate::interval::{DomainError, IMat, IVec, Interval};
use crate::poincare::{d_poincare, poincare_map, PoincareError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NewtonError {
    #[error("interval Jacobian of P^k - I is singular on the box; try a smaller box")]
    Singular,
    #[error("no fixed point in the box (Newton image disjoint from it)")]
    NoFixedPoint,
    #[error("Newton image not inside the box after {attempts} seed(s)")]
    Inconclusive { attempts: u32 },
    #[error(transparent)]
    Poincare(#[from] PoincareError),
    #[error(transparent)]
    Integration(#[from] IntegrationError),
}

/// Result of a single Newton operator evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NewtonStep<const N: usize> {
    /// `N(X)` lies in the interior of `X`: unique zero in `X`, inside `N(X)`.
    Unique(IVec<N>),
    /// `N(X) ∩ X = ∅`: no zero in `X`.
    Empty,
    /// Neither; carries `N(X) ∩ X`.
    Undecided(IVec<N>),
}

/// One interval Newton operator `N(X) = x̂ - Z F(x̂)` for `F = G - id`-type
/// problems in `R^N`. `jac` encloses `DF` on `X`; `scaled_residual(Z)`
/// must enclose `Z F(x̂)` (callers can exploit structure in `F(x̂)`).
pub fn newton_operator<const N: usize, E>(
    x: &IVec<N>,
    jac: &IMat<N>,
    scaled_residual: impl FnOnce(&IMat<N>) -> Result<IVec<N>, E>,
) -> Result<Result<NewtonStep<N>, DomainError>, E> {
    let z = match jac.inverse() {
        Ok(z) => z,
        Err(e) => return Ok(Err(e)),
    };
    let xm = IVec::from_point(x.mid());
    let n = xm - scaled_residual(&z)?;
    Ok(Ok(classify(x, n)))
}

fn classify<const N: usize>(x: &IVec<N>, n: IVec<N>) -> NewtonStep<N> {
    if n.subset_interior(x) {
        NewtonStep::Unique(n)
    } else {
        match n.intersect(x) {
            None => NewtonStep::Empty,
            Some(i) => NewtonStep::Undecided(i),
        }
    }
}

/// Scalar interval Newton for `g = 0` on `x`, iterated while it shrinks.
/// Returns the final enclosure and whether uniqueness was established.
pub fn newton_1d<E>(
    mut x: Interval,
    g: impl Fn(f64) -> Result<Interval, E>,
    dg: impl Fn(Interval) -> Result<Interval, E>,
) -> Result<Option<(Interval, bool)>, E> {
    let mut unique = false;
    for _ in 0..8 {
        let d = dg(x)?;
        let m = x.mid();
        let Ok(q) = g(m)?.checked_div(d) else {
            return Ok(Some((x, unique)));
        };
        let n = Interval::point(m) - q;
        if n.subset_interior(x) {
            unique = true;
        }
        let Some(next) = n.intersect(x) else {
            return Ok(None);
        };
        let shrunk = next.diam() < 0.5 * x.diam();
        x = next;
        if !shrunk {
            break;
        }
    }
    Ok(Some((x, unique)))
}

/// Eigen-decomposition of a real 2x2 interval matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenEnclosure {
    /// Unstable first when the moduli are separated.
    pub values: [Interval; 2],
    /// Unit eigenvectors as columns, first nonzero component positive.
    /// Present only when the discriminant is positive.
    pub vectors: Option<IMat<2>>,
    /// The discriminant enclosure contains zero: real and distinct
    /// eigenvalues could not be established.
    pub undecided: bool,
}

impl EigenEnclosure {
    pub fn hyperbolic(&self) -> bool {
        !self.undecided && self.values[0].mig() > 1.0 && self.values[1].mag() < 1.0
    }
}

/// Eigenvalues by the quadratic formula on `(tr A, det A)`, eigenvectors from
/// the rows of `A - lambda I`.
pub fn eigen_enclosure(a: &IMat<2>) -> EigenEnclosure {
    let tr = a.trace();
    let det = a.det();
    let disc = tr.sqr() - det * 4.0;
    if disc.lo() <= 0.0 {
        let s = match Interval::new(0.0, disc.hi().max(0.0)).sqrt() {
            Ok(s) => s,
            Err(_) => Interval::ZERO,
        };
        let l1 = (tr + s) / 2.0;
        let l2 = (tr - s) / 2.0;
        return EigenEnclosure {
            values: [l1.hull(l2), l1.hull(l2)],
            vectors: None,
            undecided: true,
        };
    }
    let s = disc.sqrt().expect("positive discriminant");
    let mut l1 = (tr + s) / 2.0;
    let mut l2 = (tr - s) / 2.0;
    // The root of larger modulus is computed without cancellation; the other
    // one follows from the product.
    if tr.lo() > 0.0 && !l1.contains_zero() {
        if let Ok(q) = det.checked_div(l1) {
            l2 = l2.intersect(q).unwrap_or(l2);
        }
    } else if tr.hi() < 0.0 && !l2.contains_zero() {
        if let Ok(q) = det.checked_div(l2) {
            l1 = l1.intersect(q).unwrap_or(l1);
        }
    }
    let values = if l2.abs().mig() > l1.abs().mag()
        || (l2.abs().mid() > l1.abs().mid() && l2.abs().mig() <= l1.abs().mag())
    {
        [l2, l1]
    } else {
        [l1, l2]
    };
    let cols = values.map(|l| eigenvector(a, l));
    EigenEnclosure {
        values,
        vectors: Some(IMat([[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]])),
        undecided: false,
    }
}

/// Unit vector in the kernel of `A - lambda I` for `lambda` in the given
/// enclosure.
fn eigenvector(a: &IMat<2>, l: Interval) -> [Interval; 2] {
    let c1 = [a[(0, 1)], l - a[(0, 0)]];
    let c2 = [l - a[(1, 1)], a[(1, 0)]];
    let score = |c: &[Interval; 2]| c[0].mig().max(c[1].mig());
    let v = if score(&c1) >= score(&c2) { c1 } else { c2 };
    // Normalize through the ratio of the components to limit dependency.
    let (big, small, big_first) = if v[0].mig() >= v[1].mig() {
        (v[0], v[1], true)
    } else {
        (v[1], v[0], false)
    };
    let Ok(t) = small.checked_div(big) else {
        let whole = Interval::new(-1.0, 1.0);
        return [whole, whole];
    };
    let n = (Interval::ONE + t.sqr()).sqrt().expect("1 + t^2 > 0");
    let unit_big = n.recip().expect("n >= 1");
    let unit_small = t.checked_div(n).expect("n >= 1");
    let sign = if big.lo() > 0.0 { 1.0 } else { -1.0 };
    let (mut x, mut y) = if big_first {
        (unit_big * sign, unit_small * sign)
    } else {
        (unit_small * sign, unit_big * sign)
    };
    // First nonzero component positive.
    let flip = if x.lo() > 0.0 {
        false
    } else if x.hi() < 0.0 {
        true
    } else {
        y.hi() < 0.0
    };
    if flip {
        x = -x;
        y = -y;
    }
    [x, y]
}

/// Fixed point certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointProof {
    #[serde(rename = "box")]
    pub bx: IVec<2>,
    pub k: u32,
    /// Multiple of `pi` by which `theta` advances: `P^k(x) = x + m pi e_theta`.
    pub theta_shift: i64,
    pub newton_image: IVec<2>,
    pub unique: bool,
    /// Final enclosure of the fixed point.
    pub enclosure: IVec<2>,
    /// `phi` of the fixed point on `theta = pi/2`, from symmetric shooting.
    pub axis_phi: Option<Interval>,
    pub eigenvalues: [Interval; 2],
    pub eigenvectors: Option<IMat<2>>,
    pub derivative: IMat<2>,
    pub hyperbolic: bool,
    pub newton_iterations: u32,
}

fn theta_shift_of(x: &IVec<2>, k: u32, integ: &Integrator) -> Result<i64, NewtonError> {
    let xm = IVec::from_point(x.mid());
    let img = poincare_map(&xm, k, integ)?;
    Ok(((img.state[0].mid() - x[0].mid()) / std::f64::consts::PI).round() as i64)
}

/// `Z (P^k(x̂) - x̂ - m pi e_theta)` evaluated on the Lohner form of the
/// image of the midpoint.
fn scaled_residual(
    x: &IVec<2>,
    k: u32,
    shift: i64,
    z: &IMat<2>,
    integ: &Integrator,
) -> Result<IVec<2>, NewtonError> {
    let xm = IVec::from_point(x.mid());
    let img = poincare_map(&xm, k, integ)?;
    let s = &img.set;
    let off = IVec([
        Interval::point(s.center[0]) - xm[0] - Interval::pi() * shift as f64,
        Interval::point(s.center[1]) - xm[1],
    ]);
    let mut out = z.matvec(&off);
    for (frame, coef) in [(&s.c_frame, &s.r0), (&s.basis, &s.residual)] {
        for j in 0..3 {
            let col = IVec([Interval::point(frame[0][j]), Interval::point(frame[1][j])]);
            out = out + z.matvec(&col) * coef[j];
        }
    }
    Ok(out)
}

fn newton_on_box(
    x: &IVec<2>,
    k: u32,
    shift: i64,
    integ: &Integrator,
) -> Result<(NewtonStep<2>, IMat<2>), NewtonError> {
    let dp = d_poincare(x, k, integ)?;
    let jac = dp - IMat::identity();
    match newton_operator(x, &jac, |z| scaled_residual(x, k, shift, z, integ))? {
        Ok(step) => Ok((step, dp)),
        Err(_) => Err(NewtonError::Singular),
    }
}

/// Existence and uniqueness of a fixed point of `P^k` (mod `pi` in theta)
/// in `bx`, followed by iterated contraction of the enclosure.
pub fn prove_fixed_point(bx: &IVec<2>, k: u32, integ: &Integrator) -> Result<FixedPointProof, NewtonError> {
    let shift = theta_shift_of(bx, k, integ)?;
    let (first, _) = newton_on_box(bx, k, shift, integ)?;
    let newton_image = match first {
        NewtonStep::Unique(n) => n,
        NewtonStep::Empty => return Err(NewtonError::NoFixedPoint),
        NewtonStep::Undecided(_) => return Err(NewtonError::Inconclusive { attempts: 1 }),
    };
    let mut enc = newton_image;
    let mut iterations = 1;
    for _ in 0..6 {
        let (step, _) = match newton_on_box(&enc, k, shift, integ) {
            Ok(s) => s,
            Err(NewtonError::Singular) => break,
            Err(e) => return Err(e),
        };
        iterations += 1;
        let next = match step {
            NewtonStep::Unique(n) | NewtonStep::Undecided(n) => n.intersect(&enc).unwrap_or(enc),
            NewtonStep::Empty => unreachable!("a fixed point was proven to lie in the box"),
        };
        let shrunk = next.max_diam() < 0.5 * enc.max_diam();
        enc = next;
        if !shrunk {
            break;
        }
    }
    let derivative = d_poincare(&enc, k, integ)?;
    let eig = eigen_enclosure(&derivative);
    Ok(FixedPointProof {
        bx: *bx,
        k,
        theta_shift: shift,
        newton_image,
        unique: true,
        enclosure: enc,
        axis_phi: None,
        eigenvalues: eig.values,
        eigenvectors: eig.vectors,
        derivative,
        hyperbolic: eig.hyperbolic(),
        newton_iterations: iterations,
    })
}

/// Enclosure of `phi` such that the orbit of `(pi/2, phi, 0)` hits
/// `theta in (pi/2) Z` at `f = pi k`, i.e. is a symmetric periodic orbit.
/// Returns `None` if Newton does not establish a zero in `phi`.
pub fn symmetric_shooting(phi: Interval, k: u32, integ: &Integrator) -> Result<Option<(Interval, i64)>, NewtonError> {
    let half = Interval::pi() * k as f64;
    let start = |p: Interval| FlowEnclosure::from_box(&IVec([Interval::half_pi(), p, Interval::ZERO]));
    let probe = integ.flow(&start(Interval::point(phi.mid())), half, Direction::Forward)?;
    let n = (probe.hull()[0].mid() / std::f64::consts::FRAC_PI_2).round() as i64;
    let target = Interval::half_pi() * n as f64;
    let g = |p: f64| -> Result<Interval, NewtonError> {
        let e = integ.flow(&start(Interval::point(p)), half, Direction::Forward)?;
        Ok(e.hull()[0] - target)
    };
    let dg = |p: Interval| -> Result<Interval, NewtonError> {
        let c1 = integ.flow_c1(&C1FlowEnclosure::new(start(p)), half, Direction::Forward)?;
        Ok(c1.dphi.hull()[(0, 1)])
    };
    match newton_1d(phi, g, dg)? {
        Some((enc, true)) => Ok(Some((enc, n))),
        _ => Ok(None),
    }
}

/// Fixed point of `P^k` near `(pi/2, phi_seed)`: a two-dimensional Newton
/// proof on a seed box of radius `radius`, inflated tenfold up to three
/// times on failure, then tightened by symmetric shooting when the
/// symmetric orbit lies in the uniqueness box.
pub fn prove_symmetric_fixed_point(
    phi_seed: f64,
    k: u32,
    radius: f64,
    integ: &Integrator,
) -> Result<FixedPointProof, NewtonError> {
    let mut r = radius;
    let mut attempts = 0;
    let mut proof = loop {
        attempts += 1;
        let bx = IVec([Interval::half_pi().inflate(r), Interval::point(phi_seed).inflate(r)]);
        match prove_fixed_point(&bx, k, integ) {
            Ok(p) => break p,
            Err(NewtonError::Inconclusive { .. } | NewtonError::Singular | NewtonError::NoFixedPoint)
                if attempts <= 3 =>
            {
                r *= 10.0
            }
            Err(NewtonError::Inconclusive { .. }) => return Err(NewtonError::Inconclusive { attempts }),
            Err(e) => return Err(e),
        }
    };
    if let Some((phi, n)) = symmetric_shooting(proof.enclosure[1], k, integ)? {
        // The symmetric orbit satisfies P^k(x) = x + (n - 1) pi e_theta.
        if n - 1 == proof.theta_shift && proof.enclosure[0].contains(std::f64::consts::FRAC_PI_2) {
            let axis = IVec([Interval::half_pi(), phi]);
            if axis.subset(&proof.bx) {
                proof.axis_phi = Some(phi);
                proof.enclosure = IVec([
                    Interval::half_pi().intersect(proof.enclosure[0]).unwrap_or(Interval::half_pi()),
                    phi.intersect(proof.enclosure[1]).unwrap_or(phi),
                ]);
            }
        }
    }
    Ok(proof)
}
