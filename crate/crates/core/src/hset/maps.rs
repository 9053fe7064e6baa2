//! Planar maps that covering checks can evaluate on parallelograms.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use crate::integrator::{FlowEnclosure, Integrator};
use crate::interval::{IMat, IVec, Interval};
use crate::poincare::poincare_map_set;

use super::{Chart, Parallelogram};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct MapError(pub String);

/// Enclosure of `f^k(c + G v)` over `v in [-1, 1]^2` as
/// `base + sum_j source_j v_j + sum_i extra_i.0 * extra_i.1`.
/// `source_j` is the (enclosed) image of the `j`-th generator; keeping it
/// separate tells the caller which source direction causes a violation.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageForm {
    pub base: IVec<2>,
    pub source: [IVec<2>; 2],
    pub extra: Vec<(IVec<2>, Interval)>,
}

impl ImageForm {
    pub fn hull(&self) -> IVec<2> {
        let unit = Interval::new(-1.0, 1.0);
        let mut h = self.base + self.source[0] * unit + self.source[1] * unit;
        for (col, c) in &self.extra {
            h = h + *col * *c;
        }
        h
    }

    /// Normalized coordinates in `chart` after subtracting `shift`, and the
    /// moduli of the contributions of the two source directions.
    pub fn in_chart(&self, chart: &Chart, shift: &IVec<2>) -> (IVec<2>, [[f64; 2]; 2]) {
        let unit = Interval::new(-1.0, 1.0);
        let mut w = chart.apply(&(self.base - *shift));
        let mut sens = [[0.0; 2]; 2];
        for (j, s) in self.source.iter().enumerate() {
            let c = chart.t.matvec(s);
            w = w + c * unit;
            for i in 0..2 {
                sens[i][j] = c[i].mag();
            }
        }
        for (col, c) in &self.extra {
            w = w + chart.t.matvec(col) * *c;
        }
        (w, sens)
    }
}

/// A map of the plane (or of the cylinder `theta mod period`) whose
/// iterates can be enclosed on parallelograms.
pub trait PlanarMap: Sync {
    fn image(&self, src: &Parallelogram, k: u32) -> Result<ImageForm, MapError>;

    /// Period of the first coordinate, if the phase space is a cylinder.
    fn theta_period(&self) -> Option<Interval> {
        None
    }

    /// Number of distinct parallelogram images computed so far.
    fn evaluations(&self) -> u64;
}

/// `z -> L z + t`, iterated.
#[derive(Debug)]
pub struct LinearMap {
    pub l: [[f64; 2]; 2],
    pub t: [f64; 2],
    evals: AtomicU64,
}

impl LinearMap {
    pub fn new(l: [[f64; 2]; 2], t: [f64; 2]) -> Self {
        LinearMap {
            l,
            t,
            evals: AtomicU64::new(0),
        }
    }
}

impl PlanarMap for LinearMap {
    fn image(&self, src: &Parallelogram, k: u32) -> Result<ImageForm, MapError> {
        self.evals.fetch_add(1, Ordering::Relaxed);
        let l = IMat::from_point(self.l);
        let t = IVec::from_point(self.t);
        let mut base = src.center;
        let mut g = src.gens;
        for _ in 0..k {
            base = l.matvec(&base) + t;
            g = l.matmul(&g);
        }
        Ok(ImageForm {
            base,
            source: [g.col(0), g.col(1)],
            extra: Vec::new(),
        })
    }

    fn evaluations(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }
}

type CacheKey = (u32, [u64; 12]);

fn key(src: &Parallelogram, k: u32) -> CacheKey {
    let mut bits = [0u64; 12];
    for i in 0..2 {
        bits[2 * i] = src.center[i].lo().to_bits();
        bits[2 * i + 1] = src.center[i].hi().to_bits();
        for j in 0..2 {
            bits[4 + 4 * i + 2 * j] = src.gens.0[i][j].lo().to_bits();
            bits[5 + 4 * i + 2 * j] = src.gens.0[i][j].hi().to_bits();
        }
    }
    (k, bits)
}

/// The Poincare map of the rotation model, with a cache of images so that
/// relations sharing a source set do not integrate it twice.
#[derive(Debug)]
pub struct HyperionMap {
    pub integ: Integrator,
    cache: Mutex<HashMap<CacheKey, Arc<ImageForm>>>,
    evals: AtomicU64,
    hits: AtomicU64,
}

impl HyperionMap {
    pub fn new(integ: Integrator) -> Self {
        HyperionMap {
            integ,
            cache: Mutex::new(HashMap::new()),
            evals: AtomicU64::new(0),
            hits: AtomicU64::new(0),
        }
    }

    pub fn cache_hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    fn compute(&self, src: &Parallelogram, k: u32) -> Result<ImageForm, MapError> {
        let (c, dc) = src.center.split_mid();
        let gm = src.gens.mid();
        let unit = Interval::new(-1.0, 1.0);
        // Rounding of the center and of the generators goes into the slack.
        let slack = dc + (src.gens - IMat::from_point(gm)).matvec(&IVec([unit, unit]));
        let c_frame = [[gm[0][0], gm[0][1], 0.0], [gm[1][0], gm[1][1], 0.0], [0.0, 0.0, 1.0]];
        let set = FlowEnclosure::from_parallelepiped(
            [c[0], c[1], 0.0],
            c_frame,
            IVec([unit, unit, Interval::ZERO]),
            IVec([slack[0], slack[1], Interval::ZERO]),
        );
        let img = poincare_map_set(&set, k, &self.integ).map_err(|e| MapError(e.to_string()))?;
        let s = &img.set;
        let col = |m: &[[f64; 3]; 3], j: usize| IVec::from_point([m[0][j], m[1][j]]);
        let mut extra = Vec::with_capacity(4);
        extra.push((col(&s.c_frame, 2), s.r0[2]));
        for j in 0..3 {
            extra.push((col(&s.basis, j), s.residual[j]));
        }
        Ok(ImageForm {
            base: IVec::from_point([s.center[0], s.center[1]]),
            source: [col(&s.c_frame, 0), col(&s.c_frame, 1)],
            extra,
        })
    }
}

impl PlanarMap for HyperionMap {
    fn image(&self, src: &Parallelogram, k: u32) -> Result<ImageForm, MapError> {
        let key = key(src, k);
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok((**hit).clone());
        }
        let img = self.compute(src, k)?;
        // Two threads may race on the same key; count it once.
        let fresh = self
            .cache
            .lock()
            .expect("cache lock")
            .insert(key, Arc::new(img.clone()))
            .is_none();
        if fresh {
            self.evals.fetch_add(1, Ordering::Relaxed);
        }
        Ok(img)
    }

    fn theta_period(&self) -> Option<Interval> {
        Some(Interval::pi())
    }

    fn evaluations(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }
}
