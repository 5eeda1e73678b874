//! Truncated Taylor arithmetic to third order.
//!
//! A [`Jet3`] stores normalized Taylor coefficients `c[k] = f^(k)(t0) / k!`.
//! Nonlinear functions use the standard coefficient recurrences; the
//! generic one, for `y = f(a)` with known `f'`, is
//! `y_k = (1/k) * sum_{j=1..k} j * a_j * g_{k-j}` where `g = f'(a)`.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Scalar;

pub const ORDER: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3<S> {
    pub c: [S; ORDER + 1],
}

impl<S: Scalar> Jet3<S> {
    pub fn constant(v: S) -> Self {
        Self { c: [v, S::zero(), S::zero(), S::zero()] }
    }

    /// The independent variable expanded about `t0`.
    pub fn variable(t0: S) -> Self {
        Self { c: [t0, S::one(), S::zero(), S::zero()] }
    }

    pub fn value(&self) -> S {
        self.c[0]
    }

    /// Derivatives `[f, f', f'', f''']`.
    pub fn derivatives(&self) -> [S; ORDER + 1] {
        [self.c[0], self.c[1], self.c[2] * S::two(), self.c[3] * S::lit(6.0)]
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    pub fn scale(self, k: S) -> Self {
        Self { c: self.c.map(|v| v * k) }
    }

    fn compose(self, f0: S, g: Self) -> Self {
        let mut y = [f0, S::zero(), S::zero(), S::zero()];
        for k in 1..=ORDER {
            let mut acc = S::zero();
            for j in 1..=k {
                acc = acc + S::from_usize_lossy(j) * self.c[j] * g.c[k - j];
            }
            y[k] = acc / S::from_usize_lossy(k);
        }
        Self { c: y }
    }

    pub fn recip(self) -> Self {
        Self::constant(S::one()) / self
    }

    pub fn exp(self) -> Self {
        let mut e = [self.c[0].exp(), S::zero(), S::zero(), S::zero()];
        for k in 1..=ORDER {
            let mut acc = S::zero();
            for j in 1..=k {
                acc = acc + S::from_usize_lossy(j) * self.c[j] * e[k - j];
            }
            e[k] = acc / S::from_usize_lossy(k);
        }
        Self { c: e }
    }

    pub fn ln(self) -> Self {
        let a0 = self.c[0];
        let mut l = [a0.ln(), S::zero(), S::zero(), S::zero()];
        for k in 1..=ORDER {
            let mut acc = S::zero();
            for j in 1..k {
                acc = acc + S::from_usize_lossy(j) * l[j] * self.c[k - j];
            }
            l[k] = (self.c[k] - acc / S::from_usize_lossy(k)) / a0;
        }
        Self { c: l }
    }

    pub fn sin_cos(self) -> (Self, Self) {
        let (s0, c0) = self.c[0].sin_cos();
        let mut s = [s0, S::zero(), S::zero(), S::zero()];
        let mut c = [c0, S::zero(), S::zero(), S::zero()];
        for k in 1..=ORDER {
            let mut as_ = S::zero();
            let mut ac = S::zero();
            for j in 1..=k {
                let w = S::from_usize_lossy(j) * self.c[j];
                as_ = as_ + w * c[k - j];
                ac = ac + w * s[k - j];
            }
            let kk = S::from_usize_lossy(k);
            s[k] = as_ / kk;
            c[k] = -ac / kk;
        }
        (Self { c: s }, Self { c })
    }

    pub fn sin(self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(self) -> Self {
        self.sin_cos().1
    }

    pub fn tan(self) -> Self {
        let (s, c) = self.sin_cos();
        s / c
    }

    pub fn sinh_cosh(self) -> (Self, Self) {
        let a0 = self.c[0];
        let mut s = [a0.sinh(), S::zero(), S::zero(), S::zero()];
        let mut c = [a0.cosh(), S::zero(), S::zero(), S::zero()];
        for k in 1..=ORDER {
            let mut as_ = S::zero();
            let mut ac = S::zero();
            for j in 1..=k {
                let w = S::from_usize_lossy(j) * self.c[j];
                as_ = as_ + w * c[k - j];
                ac = ac + w * s[k - j];
            }
            let kk = S::from_usize_lossy(k);
            s[k] = as_ / kk;
            c[k] = ac / kk;
        }
        (Self { c: s }, Self { c })
    }

    pub fn tanh(self) -> Self {
        let (s, c) = self.sinh_cosh();
        s / c
    }

    pub fn sqrt(self) -> Self {
        let r0 = self.c[0].sqrt();
        let mut r = [r0, S::zero(), S::zero(), S::zero()];
        for k in 1..=ORDER {
            let mut acc = S::zero();
            for j in 1..k {
                acc = acc + r[j] * r[k - j];
            }
            r[k] = (self.c[k] - acc) / (S::two() * r0);
        }
        Self { c: r }
    }

    pub fn atan(self) -> Self {
        let g = (Self::constant(S::one()) + self * self).recip();
        self.compose(self.c[0].atan(), g)
    }

    /// `|a|`; `None` at a zero of `a` where it is not differentiable.
    pub fn abs(self) -> Option<Self> {
        if self.c[0] > S::zero() {
            Some(self)
        } else if self.c[0] < S::zero() {
            Some(-self)
        } else if self.c.iter().all(|v| v.is_zero()) {
            Some(self)
        } else {
            None
        }
    }

    /// Integer power by repeated squaring; exact at a zero base.
    pub fn powi(self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut base = self;
        let mut acc = Self::constant(S::one());
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Real power with a constant exponent, via `exp(p ln a)`.
    pub fn powf(self, p: S) -> Self {
        (self.ln().scale(p)).exp()
    }

    /// `max(a, 0)`, with the one-sided jet chosen by the sign of the value.
    pub fn ramp(self) -> Self {
        if self.c[0] > S::zero() {
            self
        } else {
            Self::constant(S::zero())
        }
    }

    /// `exp(-1/a^2)` continued by zero (all derivatives vanish) at `a = 0`.
    pub fn flat(self) -> Self {
        if self.c[0].is_zero() {
            Self::constant(S::zero())
        } else {
            (-(self * self).recip()).exp()
        }
    }
}

impl<S: Scalar> Add for Jet3<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c) {
            *a = *a + b;
        }
        Self { c }
    }
}

impl<S: Scalar> Sub for Jet3<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<S: Scalar> Neg for Jet3<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { c: self.c.map(|v| -v) }
    }
}

impl<S: Scalar> Mul for Jet3<S> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut c = [S::zero(); ORDER + 1];
        for (k, ck) in c.iter_mut().enumerate() {
            for j in 0..=k {
                *ck = *ck + self.c[j] * o.c[k - j];
            }
        }
        Self { c }
    }
}

impl<S: Scalar> Div for Jet3<S> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let b0 = o.c[0];
        let mut q = [S::zero(); ORDER + 1];
        for k in 0..=ORDER {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc = acc - o.c[j] * q[k - j];
            }
            q[k] = acc / b0;
        }
        Self { c: q }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: [f64; 4], b: [f64; 4], tol: f64) {
        for k in 0..4 {
            assert!((a[k] - b[k]).abs() <= tol * (1.0 + b[k].abs()), "k={k}: {a:?} vs {b:?}");
        }
    }

    #[test]
    fn sin_derivatives() {
        let t = 0.7_f64;
        let d = Jet3::variable(t).sin().derivatives();
        close(d, [t.sin(), t.cos(), -t.sin(), -t.cos()], 1e-15);
    }

    #[test]
    fn exp_of_square() {
        // f = exp(t^2): f' = 2t f, f'' = (2 + 4t^2) f, f''' = (12t + 8t^3) f
        let t = 0.3_f64;
        let x = Jet3::variable(t);
        let f = (t * t).exp();
        let d = (x * x).exp().derivatives();
        close(d, [f, 2.0 * t * f, (2.0 + 4.0 * t * t) * f, (12.0 * t + 8.0 * t.powi(3)) * f], 1e-14);
    }

    #[test]
    fn quotient_and_log() {
        let t = 1.7_f64;
        let x = Jet3::variable(t);
        let d = x.ln().derivatives();
        close(d, [t.ln(), 1.0 / t, -1.0 / (t * t), 2.0 / t.powi(3)], 1e-14);
        let r = x.recip().derivatives();
        close(r, [1.0 / t, -1.0 / (t * t), 2.0 / t.powi(3), -6.0 / t.powi(4)], 1e-14);
    }

    #[test]
    fn atan_and_sqrt() {
        let t = 0.4_f64;
        let x = Jet3::variable(t);
        let w = 1.0 + t * t;
        let d = x.atan().derivatives();
        close(d, [t.atan(), 1.0 / w, -2.0 * t / (w * w), (6.0 * t * t - 2.0) / w.powi(3)], 1e-14);
        let s = x.sqrt().derivatives();
        close(
            s,
            [t.sqrt(), 0.5 / t.sqrt(), -0.25 * t.powf(-1.5), 0.375 * t.powf(-2.5)],
            1e-14,
        );
    }

    #[test]
    fn powi_at_zero_is_exact() {
        let d = Jet3::variable(0.0_f64).powi(4).derivatives();
        assert_eq!(d, [0.0, 0.0, 0.0, 0.0]);
        let d = Jet3::variable(0.0_f64).powi(3).derivatives();
        assert_eq!(d, [0.0, 0.0, 0.0, 6.0]);
    }

    #[test]
    fn flat_vanishes_to_all_orders_at_zero() {
        assert_eq!(Jet3::variable(0.0_f64).flat().derivatives(), [0.0; 4]);
        let v = Jet3::variable(0.5_f64).flat().value();
        assert!((v - (-4.0_f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn abs_at_kink_is_rejected() {
        assert!(Jet3::variable(0.0_f64).abs().is_none());
        assert_eq!(Jet3::variable(-2.0_f64).abs().unwrap().derivatives(), [2.0, -1.0, 0.0, 0.0]);
    }
}
