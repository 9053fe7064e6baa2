//! Fixed-size interval vectors and square matrices.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::{DomainError, Interval};

/// Interval vector of fixed dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IVec<const N: usize>(pub [Interval; N]);

/// Square interval matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IMat<const N: usize>(pub [[Interval; N]; N]);

impl<const N: usize> IVec<N> {
    pub fn zero() -> Self {
        IVec([Interval::ZERO; N])
    }

    pub fn from_point(x: [f64; N]) -> Self {
        IVec(x.map(Interval::point))
    }

    pub fn mid(&self) -> [f64; N] {
        self.0.map(Interval::mid)
    }

    pub fn max_diam(&self) -> f64 {
        self.0.iter().map(|x| x.diam()).fold(0.0, f64::max)
    }

    pub fn contains(&self, x: &[f64; N]) -> bool {
        self.0.iter().zip(x).all(|(i, &v)| i.contains(v))
    }

    pub fn subset(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, &b)| a.subset(b))
    }

    pub fn subset_interior(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, &b)| a.subset_interior(b))
    }

    pub fn hull(&self, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..N {
            out.0[i] = self.0[i].hull(other.0[i]);
        }
        out
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let mut out = *self;
        for i in 0..N {
            out.0[i] = self.0[i].intersect(other.0[i])?;
        }
        Some(out)
    }

    /// Subtract the midpoint: returns `(m, self - m)`.
    pub fn split_mid(&self) -> ([f64; N], Self) {
        let m = self.mid();
        let mut r = *self;
        for i in 0..N {
            r.0[i] = self.0[i] - m[i];
        }
        (m, r)
    }
}

impl<const N: usize> Default for IVec<N> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const N: usize> Index<usize> for IVec<N> {
    type Output = Interval;
    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

impl<const N: usize> IndexMut<usize> for IVec<N> {
    fn index_mut(&mut self, i: usize) -> &mut Interval {
        &mut self.0[i]
    }
}

impl<const N: usize> Add for IVec<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            self.0[i] += rhs.0[i];
        }
        self
    }
}

impl<const N: usize> Sub for IVec<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            self.0[i] -= rhs.0[i];
        }
        self
    }
}

impl<const N: usize> Neg for IVec<N> {
    type Output = Self;
    fn neg(self) -> Self {
        IVec(self.0.map(|x| -x))
    }
}

impl<const N: usize> Mul<Interval> for IVec<N> {
    type Output = Self;
    fn mul(self, s: Interval) -> Self {
        IVec(self.0.map(|x| x * s))
    }
}

impl<const N: usize> IMat<N> {
    pub fn zero() -> Self {
        IMat([[Interval::ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.0[i][i] = Interval::ONE;
        }
        m
    }

    pub fn from_point(a: [[f64; N]; N]) -> Self {
        IMat(a.map(|row| row.map(Interval::point)))
    }

    pub fn mid(&self) -> [[f64; N]; N] {
        self.0.map(|row| row.map(Interval::mid))
    }

    pub fn max_diam(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|x| x.diam())
            .fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Self {
        let mut t = *self;
        for i in 0..N {
            for j in 0..N {
                t.0[i][j] = self.0[j][i];
            }
        }
        t
    }

    pub fn col(&self, j: usize) -> IVec<N> {
        IVec(std::array::from_fn(|i| self.0[i][j]))
    }

    pub fn matvec(&self, v: &IVec<N>) -> IVec<N> {
        IVec(std::array::from_fn(|i| {
            self.0[i]
                .iter()
                .zip(&v.0)
                .map(|(&a, &b)| a * b)
                .sum()
        }))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        IMat(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..N).map(|k| self.0[i][k] * other.0[k][j]).sum())
        }))
    }

    pub fn contains(&self, a: &[[f64; N]; N]) -> bool {
        (0..N).all(|i| (0..N).all(|j| self.0[i][j].contains(a[i][j])))
    }

    pub fn subset(&self, other: &Self) -> bool {
        (0..N).all(|i| (0..N).all(|j| self.0[i][j].subset(other.0[i][j])))
    }

    pub fn intersects(&self, other: &Self) -> bool {
        (0..N).all(|i| (0..N).all(|j| self.0[i][j].intersects(other.0[i][j])))
    }

    pub fn hull(&self, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..N {
            for j in 0..N {
                out.0[i][j] = self.0[i][j].hull(other.0[i][j]);
            }
        }
        out
    }

    /// Rigorous inverse by Gauss-Jordan elimination with pivoting on the
    /// largest mignitude. Fails when a pivot encloses zero.
    pub fn inverse(&self) -> Result<Self, DomainError> {
        let mut a = *self;
        let mut inv = Self::identity();
        for c in 0..N {
            let p = (c..N)
                .max_by(|&i, &j| a.0[i][c].mig().total_cmp(&a.0[j][c].mig()))
                .expect("non-empty range");
            if a.0[p][c].contains_zero() {
                return Err(DomainError::SingularMatrix);
            }
            a.0.swap(c, p);
            inv.0.swap(c, p);
            let piv = a.0[c][c];
            for j in 0..N {
                a.0[c][j] = a.0[c][j].checked_div(piv)?;
                inv.0[c][j] = inv.0[c][j].checked_div(piv)?;
            }
            a.0[c][c] = Interval::ONE;
            for r in 0..N {
                if r == c {
                    continue;
                }
                let f = a.0[r][c];
                if f == Interval::ZERO {
                    continue;
                }
                for j in 0..N {
                    a.0[r][j] -= f * a.0[c][j];
                    inv.0[r][j] -= f * inv.0[c][j];
                }
                a.0[r][c] = Interval::ZERO;
            }
        }
        Ok(inv)
    }
}

impl IMat<2> {
    pub fn det(&self) -> Interval {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> Interval {
        self.0[0][0] + self.0[1][1]
    }

    /// Closed-form inverse; `0 ∈ det` is a domain error.
    pub fn inverse2x2(&self) -> Result<Self, DomainError> {
        let d = self.det();
        if d.contains_zero() {
            return Err(DomainError::SingularMatrix);
        }
        let m = &self.0;
        Ok(IMat([
            [m[1][1].checked_div(d)?, (-m[0][1]).checked_div(d)?],
            [(-m[1][0]).checked_div(d)?, m[0][0].checked_div(d)?],
        ]))
    }
}

impl<const N: usize> Default for IMat<N> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const N: usize> Add for IMat<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Sub for IMat<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Mul<Interval> for IMat<N> {
    type Output = Self;
    fn mul(self, s: Interval) -> Self {
        IMat(self.0.map(|row| row.map(|x| x * s)))
    }
}

impl<const N: usize> Index<(usize, usize)> for IMat<N> {
    type Output = Interval;
    fn index(&self, (i, j): (usize, usize)) -> &Interval {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for IMat<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Interval {
        &mut self.0[i][j]
    }
}

// Serde for const-generic arrays of intervals goes through Vec.
impl<const N: usize> Serialize for IVec<N> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.as_slice().serialize(s)
    }
}

impl<'de, const N: usize> Deserialize<'de> for IVec<N> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<Interval>::deserialize(d)?;
        let arr: [Interval; N] = v
            .try_into()
            .map_err(|_| serde::de::Error::custom(format!("expected {N} components")))?;
        Ok(IVec(arr))
    }
}

impl<const N: usize> Serialize for IMat<N> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Interval>> = self.0.iter().map(|r| r.to_vec()).collect();
        rows.serialize(s)
    }
}

impl<'de, const N: usize> Deserialize<'de> for IMat<N> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<Interval>>::deserialize(d)?;
        if rows.len() != N || rows.iter().any(|r| r.len() != N) {
            return Err(serde::de::Error::custom(format!("expected {N}x{N} matrix")));
        }
        Ok(IMat(std::array::from_fn(|i| std::array::from_fn(|j| rows[i][j]))))
    }
}

/// Point matrix helpers used for frames and Lohner bases.
pub mod point {
    pub fn matmul<const N: usize>(a: &[[f64; N]; N], b: &[[f64; N]; N]) -> [[f64; N]; N] {
        std::array::from_fn(|i| std::array::from_fn(|j| (0..N).map(|k| a[i][k] * b[k][j]).sum()))
    }

    pub fn matvec<const N: usize>(a: &[[f64; N]; N], v: &[f64; N]) -> [f64; N] {
        std::array::from_fn(|i| (0..N).map(|k| a[i][k] * v[k]).sum())
    }

    pub fn identity<const N: usize>() -> [[f64; N]; N] {
        std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }))
    }
}
