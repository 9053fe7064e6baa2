//! H-sets with one exit and one entry direction, realized as parallelograms
//! `p + A diag(b) * scale` on the section.
//!
//! The first column of `A` is the exit direction (the `x` coordinate of the
//! normalized chart), the second the entry direction (`y`). The normalized
//! chart sends the support onto `[-1, 1]^2`; the exit set is `|x| = 1`, the
//! entry set `|y| = 1`.

mod chain;
mod covering;
mod maps;
pub mod table;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::interval::{canonical_decimal, negate_decimal, IMat, IVec, Interval, ParseError};

pub use chain::{
    chain_verify, derive_backcovering_by_symmetry, ChainOptions, ChainReport, PeriodicStatement, Relation,
    SymbolicDynamics, SymmetryError,
};
pub use covering::{
    check_covering, CertDirection, CoverSettings, CoveringCertificate, RelationKind,
};
pub use maps::{HyperionMap, ImageForm, LinearMap, MapError, PlanarMap};

/// `theta = half_pis * pi/2 + offset` with an exact decimal offset, so that
/// the reflection `theta -> pi - theta` is exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaCoord {
    pub half_pis: i64,
    pub offset: String,
}

impl ThetaCoord {
    pub fn decimal(d: &str) -> Result<Self, ParseError> {
        Ok(ThetaCoord {
            half_pis: 0,
            offset: canonical_decimal(d)?,
        })
    }

    pub fn half_pi() -> Self {
        ThetaCoord {
            half_pis: 1,
            offset: "0".into(),
        }
    }

    pub fn interval(&self) -> Interval {
        let off: Interval = self.offset.parse().expect("validated decimal");
        Interval::half_pi() * self.half_pis as f64 + off
    }

    pub fn mirror(&self) -> Self {
        ThetaCoord {
            half_pis: 2 - self.half_pis,
            offset: negate_decimal(&self.offset).expect("validated decimal"),
        }
    }

    fn same(&self, o: &ThetaCoord) -> bool {
        self.half_pis == o.half_pis && canonical_decimal(&self.offset) == canonical_decimal(&o.offset)
    }
}

impl fmt::Display for ThetaCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let off = canonical_decimal(&self.offset).unwrap_or_else(|_| self.offset.clone());
        match (self.half_pis, off.as_str()) {
            (0, o) => write!(f, "{o}"),
            (n, "0") => write!(f, "{n}*pi/2"),
            (n, o) if o.starts_with('-') => write!(f, "{n}*pi/2{o}"),
            (n, o) => write!(f, "{n}*pi/2+{o}"),
        }
    }
}

/// Base point with an exact `phi` decimal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasePoint {
    pub theta: ThetaCoord,
    pub phi: String,
}

impl BasePoint {
    pub fn interval(&self) -> IVec<2> {
        IVec([self.theta.interval(), self.phi.parse().expect("validated decimal")])
    }
}

/// Point matrix whose columns are the exit and entry directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub name: Option<String>,
    pub m: [[f64; 2]; 2],
}

impl Frame {
    pub fn imat(&self) -> IMat<2> {
        IMat::from_point(self.m)
    }

    fn swapped(&self) -> Frame {
        let m = self.m;
        Frame {
            name: self.name.as_ref().map(|n| format!("{n}^T")),
            m: [[m[0][1], m[0][0]], [m[1][1], m[1][0]]],
        }
    }

    fn reflected(&self) -> Frame {
        let m = self.m;
        Frame {
            name: self.name.as_ref().map(|n| format!("R{n}")),
            m: [[-m[0][0], -m[0][1]], [m[1][0], m[1][1]]],
        }
    }
}

/// A parallelogram `center + gens v`, `v in [-1, 1]^2`, with interval data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parallelogram {
    pub center: IVec<2>,
    /// Columns are the images of the unit vectors of `v`.
    pub gens: IMat<2>,
}

impl Parallelogram {
    pub fn hull(&self) -> IVec<2> {
        self.center + self.gens.matvec(&IVec([Interval::new(-1.0, 1.0); 2]))
    }
}

/// Affine chart `z -> T (z - p) - c` onto the normalized coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chart {
    pub p: IVec<2>,
    pub t: IMat<2>,
    pub c: IVec<2>,
}

impl Chart {
    pub fn apply(&self, z: &IVec<2>) -> IVec<2> {
        self.t.matvec(&(*z - self.p)) - self.c
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HSetError {
    #[error("frame of {0} is singular")]
    SingularFrame(String),
    #[error("empty box for {0}")]
    EmptyBox(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// An h-set `p + A diag(b) * scale` with `b = [x-, x+] x [y-, y+]` given as
/// exact decimals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HSet {
    pub name: String,
    pub p: BasePoint,
    pub frame: Frame,
    pub b: [[String; 2]; 2],
    pub scale: String,
}

impl HSet {
    pub fn new(name: &str, p: BasePoint, frame: Frame, b: [[&str; 2]; 2], scale: &str) -> Result<Self, HSetError> {
        let canon = |s: &str| canonical_decimal(s);
        let h = HSet {
            name: name.to_string(),
            p: BasePoint {
                theta: ThetaCoord {
                    half_pis: p.theta.half_pis,
                    offset: canon(&p.theta.offset)?,
                },
                phi: canon(&p.phi)?,
            },
            frame,
            b: [
                [canon(b[0][0])?, canon(b[0][1])?],
                [canon(b[1][0])?, canon(b[1][1])?],
            ],
            scale: canon(scale)?,
        };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<(), HSetError> {
        if self.frame.imat().det().contains_zero() {
            return Err(HSetError::SingularFrame(self.name.clone()));
        }
        let b = self.b_interval();
        if !(b[0].lo() < b[0].hi() && b[1].lo() < b[1].hi()) {
            return Err(HSetError::EmptyBox(self.name.clone()));
        }
        Ok(())
    }

    /// The unscaled box as intervals; its bounds are exact decimals.
    pub fn b_interval(&self) -> IVec<2> {
        let side = |r: &[String; 2]| {
            let lo: Interval = r[0].parse().expect("validated decimal");
            let hi: Interval = r[1].parse().expect("validated decimal");
            Interval::new(lo.lo(), hi.hi())
        };
        IVec([side(&self.b[0]), side(&self.b[1])])
    }

    fn b_mid_rad(&self) -> (IVec<2>, IVec<2>) {
        let side = |r: &[String; 2]| {
            let lo: Interval = r[0].parse().expect("validated decimal");
            let hi: Interval = r[1].parse().expect("validated decimal");
            ((lo + hi) / 2.0, (hi - lo) / 2.0)
        };
        let (m0, r0) = side(&self.b[0]);
        let (m1, r1) = side(&self.b[1]);
        (IVec([m0, m1]), IVec([r0, r1]))
    }

    pub fn scale_interval(&self) -> Interval {
        self.scale.parse().expect("validated decimal")
    }

    /// The part of the support with normalized coordinates in `sub`.
    pub fn piece(&self, sub: &IVec<2>) -> Parallelogram {
        let (m, r) = self.b_mid_rad();
        let s = self.scale_interval();
        let a = self.frame.imat();
        let (sm, sr) = sub.split_mid();
        let mut coord = IVec::zero();
        let mut gens = IMat::zero();
        for j in 0..2 {
            coord[j] = (m[j] + r[j] * sm[j]) * s;
            let g = r[j] * sr[j].mag() * s;
            for i in 0..2 {
                gens.0[i][j] = a.0[i][j] * g;
            }
        }
        Parallelogram {
            center: self.p.interval() + a.matvec(&coord),
            gens,
        }
    }

    pub fn support(&self) -> Parallelogram {
        self.piece(&IVec([Interval::new(-1.0, 1.0); 2]))
    }

    /// The normalized chart `c_N`.
    pub fn chart(&self) -> Chart {
        let (m, r) = self.b_mid_rad();
        let s = self.scale_interval();
        let a_inv = self.frame.imat().inverse().expect("validated frame");
        let mut t = a_inv;
        let mut c = IVec::zero();
        for i in 0..2 {
            let d = r[i] * s;
            for j in 0..2 {
                t.0[i][j] = a_inv.0[i][j].checked_div(d).expect("nonempty box");
            }
            c[i] = m[i].checked_div(r[i]).expect("nonempty box");
        }
        Chart {
            p: self.p.interval(),
            t,
            c,
        }
    }

    /// `N^T`: same support, exit and entry exchanged.
    pub fn transpose(&self) -> HSet {
        HSet {
            name: format!("{}^T", self.name),
            p: self.p.clone(),
            frame: self.frame.swapped(),
            b: [self.b[1].clone(), self.b[0].clone()],
            scale: self.scale.clone(),
        }
    }

    /// Image under `R(theta, phi) = (pi - theta, phi)`.
    pub fn mirror(&self) -> HSet {
        HSet {
            name: format!("R({})", self.name),
            p: BasePoint {
                theta: self.p.theta.mirror(),
                phi: self.p.phi.clone(),
            },
            frame: self.frame.reflected(),
            b: self.b.clone(),
            scale: self.scale.clone(),
        }
    }

    /// `R(N)^T`, named so that applying it twice gives back the name.
    pub fn mirror_transpose(&self) -> HSet {
        let mut h = self.mirror().transpose();
        h.name = match self.name.strip_prefix("R(").and_then(|s| s.strip_suffix(")^T")) {
            Some(inner) => inner.to_string(),
            None => format!("R({})^T", self.name),
        };
        h.frame.name = self.frame.name.clone();
        h
    }

    /// Exact equality of h-sets as structured sets: equal base point, box
    /// and scale, with the frame equal up to the joint sign change
    /// `(A, b) -> (-A, -b)`, which describes the same parallelogram with the
    /// same exit and entry edges.
    pub fn same_hset(&self, o: &HSet) -> bool {
        if !(self.p.theta.same(&o.p.theta)
            && canonical_decimal(&self.p.phi) == canonical_decimal(&o.p.phi)
            && canonical_decimal(&self.scale) == canonical_decimal(&o.scale))
        {
            return false;
        }
        let eq_box = |x: &[[String; 2]; 2], y: &[[String; 2]; 2]| {
            (0..2).all(|i| (0..2).all(|j| canonical_decimal(&x[i][j]) == canonical_decimal(&y[i][j])))
        };
        let neg_box = |x: &[[String; 2]; 2]| -> [[String; 2]; 2] {
            let n = |s: &String| negate_decimal(s).expect("validated decimal");
            [[n(&x[0][1]), n(&x[0][0])], [n(&x[1][1]), n(&x[1][0])]]
        };
        let a = self.frame.m;
        let b = o.frame.m;
        let same = (0..2).all(|i| (0..2).all(|j| a[i][j] == b[i][j]));
        let opposite = (0..2).all(|i| (0..2).all(|j| a[i][j] == -b[i][j]));
        (same && eq_box(&self.b, &o.b)) || (opposite && eq_box(&self.b, &neg_box(&o.b)))
    }

    /// `R(N)^T = N` exactly.
    pub fn is_r_symmetric(&self) -> bool {
        self.same_hset(&self.mirror_transpose())
    }

    /// Interval enclosure of whether the supports of `self` and `o` are
    /// disjoint, by separating axes through the edge normals of both
    /// parallelograms (exact for convex polygons). `period` handles the
    /// cylinder: all lifts within one period of each other are tested.
    pub fn disjoint_from(&self, o: &HSet, period: Option<Interval>) -> bool {
        let shifts: Vec<Interval> = match period {
            None => vec![Interval::ZERO],
            Some(per) => {
                let d = (o.p.interval()[0].mid() - self.p.interval()[0].mid()) / per.mid();
                let n = d.round();
                (-1..=1).map(|i| per * (i as f64 - n)).collect()
            }
        };
        shifts.iter().all(|&sh| {
            let shift = IVec([sh, Interval::ZERO]);
            let oth = o.support();
            let oth = Parallelogram {
                center: oth.center + shift,
                gens: oth.gens,
            };
            let me = self.support();
            let mine_shifted = Parallelogram {
                center: me.center - shift,
                gens: me.gens,
            };
            separated(&self.chart(), &oth) || separated(&o.chart(), &mine_shifted)
        })
    }
}

/// The image of `q` in `chart` misses `[-1, 1]^2` in some coordinate.
fn separated(chart: &Chart, q: &Parallelogram) -> bool {
    let w = chart.apply(&q.center) + chart.t.matmul(&q.gens).matvec(&IVec([Interval::new(-1.0, 1.0); 2]));
    (0..2).any(|i| w[i].lo() > 1.0 || w[i].hi() < -1.0)
}

impl fmt::Display for HSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let frame = match &self.frame.name {
            Some(n) => n.clone(),
            None => format!("{:?}", self.frame.m),
        };
        write!(
            f,
            "{} = ({}; {}) + {} [{}, {}]x[{}, {}] * {}",
            self.name,
            self.p.theta,
            self.p.phi,
            frame,
            self.b[0][0],
            self.b[0][1],
            self.b[1][0],
            self.b[1][1],
            self.scale
        )
    }
}
