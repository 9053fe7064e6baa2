//! Taylor coefficients of solutions by automatic differentiation recurrences.
//!
//! For `s = sin w`, `c = cos w` with `w = sum w_k t^k` and `k >= 1`:
//! `s_k = (1/k) sum_{j=1..k} j w_j c_{k-j}` and
//! `c_k = -(1/k) sum_{j=1..k} j w_j s_{k-j}`.

use crate::model::{Coefficients, Scalar};

/// Normalized derivatives `x^{(k)}/k!` of the solution and the auxiliary
/// series they were built from.
#[derive(Debug, Clone)]
pub struct Jet<T> {
    pub theta: Vec<T>,
    pub phi: Vec<T>,
    pub f: Vec<T>,
    sin_f: Vec<T>,
    cos_f: Vec<T>,
    sin_u: Vec<T>,
    cos_u: Vec<T>,
    q: Vec<T>,
    q2: Vec<T>,
    q3: Vec<T>,
}

#[inline]
fn conv<T: Scalar>(a: &[T], b: &[T], k: usize) -> T {
    let mut s = a[0] * b[k];
    for j in 1..=k {
        s += a[j] * b[k - j];
    }
    s
}

/// `(sin w)_k, (cos w)_k` for `k >= 1` from lower-order terms.
#[inline]
fn sin_cos_step<T: Scalar>(w: &[T], s: &[T], c: &[T], k: usize) -> (T, T) {
    let mut sk = w[1] * c[k - 1];
    let mut ck = w[1] * s[k - 1];
    for j in 2..=k {
        let jw = w[j] * j as f64;
        sk += jw * c[k - j];
        ck += jw * s[k - j];
    }
    (sk / k as f64, -(ck / k as f64))
}

impl<T: Scalar> Jet<T> {
    pub fn order(&self) -> usize {
        self.theta.len() - 1
    }

    /// Coefficient vector of order `k`.
    pub fn coeff(&self, k: usize) -> [T; 3] {
        [self.theta[k], self.phi[k], self.f[k]]
    }

    /// Taylor polynomial evaluated at `h` by Horner's rule.
    pub fn eval(&self, h: T) -> [T; 3] {
        [horner(&self.theta, h), horner(&self.phi, h), horner(&self.f, h)]
    }
}

pub fn horner<T: Scalar>(c: &[T], h: T) -> T {
    let mut acc = c[c.len() - 1];
    for &a in c[..c.len() - 1].iter().rev() {
        acc = acc * h + a;
    }
    acc
}

/// Coefficients of orders `0..=order` of the solution through `x0`.
pub fn taylor<T: Scalar>(x0: [T; 3], order: usize, co: &Coefficients<T>) -> Jet<T> {
    let n = order + 1;
    let zero = T::from_f64(0.0);
    let mut j = Jet {
        theta: vec![zero; n],
        phi: vec![zero; n],
        f: vec![zero; n],
        sin_f: vec![zero; n],
        cos_f: vec![zero; n],
        sin_u: vec![zero; n],
        cos_u: vec![zero; n],
        q: vec![zero; n],
        q2: vec![zero; n],
        q3: vec![zero; n],
    };
    let mut u = vec![zero; n];
    j.theta[0] = x0[0];
    j.phi[0] = x0[1];
    j.f[0] = x0[2];
    let sg = co.sign;
    for k in 0..n {
        u[k] = (j.theta[k] - j.f[k]) * 2.0;
        if k == 0 {
            j.sin_f[0] = x0[2].sin();
            j.cos_f[0] = x0[2].cos();
            j.sin_u[0] = u[0].sin();
            j.cos_u[0] = u[0].cos();
            j.q[0] = T::from_f64(1.0) + co.e * j.cos_f[0];
        } else {
            let (s, c) = sin_cos_step(&j.f, &j.sin_f, &j.cos_f, k);
            j.sin_f[k] = s;
            j.cos_f[k] = c;
            let (s, c) = sin_cos_step(&u, &j.sin_u, &j.cos_u, k);
            j.sin_u[k] = s;
            j.cos_u[k] = c;
            j.q[k] = co.e * j.cos_f[k];
        }
        j.q2[k] = conv(&j.q, &j.q, k);
        j.q3[k] = conv(&j.q2, &j.q, k);
        if k + 1 < n {
            let p = conv(&j.q3, &j.sin_u, k);
            let d = (k + 1) as f64;
            j.theta[k + 1] = j.phi[k] * (sg / d);
            j.phi[k + 1] = -(co.kappa * p) * (sg / d);
            j.f[k + 1] = co.k * j.q2[k] * (sg / d);
        }
    }
    j
}

pub type Mat3<T> = [[T; 3]; 3];

/// Taylor coefficients of `V` solving `V' = J(x(t)) V`, `V(0) = v0`, along
/// the solution described by `jet`. Returns orders `0..=jet.order()`.
pub fn variational<T: Scalar>(jet: &Jet<T>, v0: Mat3<T>, co: &Coefficients<T>) -> Vec<Mat3<T>> {
    let n = jet.order() + 1;
    let zero = T::from_f64(0.0);
    // Jacobian entries as series:
    //   dphi'/dtheta = -2 kappa q^3 C
    //   dphi'/df     = kappa (3 e q^2 s S + 2 q^3 C)
    //   df'/df       = -2 e K q s
    let mut q3c = vec![zero; n];
    let mut ss = vec![zero; n];
    let mut q2ss = vec![zero; n];
    let mut qs = vec![zero; n];
    let mut jpt = vec![zero; n];
    let mut jpf = vec![zero; n];
    let mut jff = vec![zero; n];
    for k in 0..n.saturating_sub(1) {
        q3c[k] = conv(&jet.q3, &jet.cos_u, k);
        ss[k] = conv(&jet.sin_f, &jet.sin_u, k);
        q2ss[k] = conv(&jet.q2, &ss, k);
        qs[k] = conv(&jet.q, &jet.sin_f, k);
        jpt[k] = -(co.kappa * q3c[k]) * 2.0;
        jpf[k] = co.kappa * (co.e * q2ss[k] * 3.0 + q3c[k] * 2.0);
        jff[k] = -(co.e * co.k * qs[k]) * 2.0;
    }
    let sg = co.sign;
    let mut v = vec![[[zero; 3]; 3]; n];
    v[0] = v0;
    for k in 0..n - 1 {
        let d = sg / (k + 1) as f64;
        for col in 0..3 {
            let mut a = zero;
            let mut b = zero;
            for i in 0..=k {
                let vt = v[k - i][0][col];
                let vf = v[k - i][2][col];
                a += jpt[i] * vt + jpf[i] * vf;
                b += jff[i] * vf;
            }
            v[k + 1][0][col] = v[k][1][col] * d;
            v[k + 1][1][col] = a * d;
            v[k + 1][2][col] = b * d;
        }
    }
    v
}

/// `sum_k m_k h^k` for a list of matrix coefficients.
pub fn horner_mat<T: Scalar>(c: &[Mat3<T>], h: T) -> Mat3<T> {
    let mut acc = c[c.len() - 1];
    for m in c[..c.len() - 1].iter().rev() {
        for i in 0..3 {
            for j in 0..3 {
                acc[i][j] = acc[i][j] * h + m[i][j];
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{field, ModelParams};

    #[test]
    fn first_coefficient_is_the_field() {
        let co = ModelParams::default().coefficients_f64();
        let x = [1.0, 0.5, 0.3];
        let j = taylor(x, 5, &co);
        let v = field(x, &co);
        for i in 0..3 {
            assert!((j.coeff(1)[i] - v[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn circular_orbit_anomaly_is_linear() {
        let co = ModelParams::new("0", "0.79").unwrap().coefficients_f64();
        let j = taylor([0.4, 1.2, 0.7], 8, &co);
        assert_eq!(j.f[0], 0.7);
        assert_eq!(j.f[1], 1.0);
        assert!(j.f[2..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn variational_first_order_is_jacobian() {
        let co = ModelParams::default().coefficients_f64();
        let x = [0.9, 1.3, 2.1];
        let j = taylor(x, 4, &co);
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let v = variational(&j, id, &co);
        let jac = crate::model::jacobian(x, &co);
        for r in 0..3 {
            for c in 0..3 {
                assert!((v[1][r][c] - jac[r][c]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn variational_matches_difference_of_jets() {
        let co = ModelParams::default().coefficients_f64();
        let x = [0.9, 1.3, 0.0];
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let v = variational(&taylor(x, 10, &co), id, &co);
        let eps = 1e-6;
        for col in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[col] += eps;
            xm[col] -= eps;
            let (jp, jm) = (taylor(xp, 10, &co), taylor(xm, 10, &co));
            for k in 0..=10 {
                for row in 0..3 {
                    let fd = (jp.coeff(k)[row] - jm.coeff(k)[row]) / (2.0 * eps);
                    assert!(
                        (fd - v[k][row][col]).abs() < 1e-7 * (1.0 + fd.abs()),
                        "k={k} row={row} col={col}: {fd} vs {}",
                        v[k][row][col]
                    );
                }
            }
        }
    }
}
