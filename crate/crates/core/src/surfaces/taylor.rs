//! Truncated Taylor series arithmetic.
//!
//! `Taylor<N>` stores `f(s₀ + t) = Σ_{k<N} c_k t^k`. Every operation is exact
//! up to the truncation order, which makes repeated frame derivatives of user
//! supplied profiles reliable where finite differences are not.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Taylor<const N: usize> {
    pub coeffs: [f64; N],
}

impl<const N: usize> Taylor<N> {
    pub fn constant(value: f64) -> Self {
        let mut coeffs = [0.0; N];
        coeffs[0] = value;
        Taylor { coeffs }
    }

    /// The independent variable expanded around `at`.
    pub fn variable(at: f64) -> Self {
        let mut coeffs = [0.0; N];
        coeffs[0] = at;
        if N > 1 {
            coeffs[1] = 1.0;
        }
        Taylor { coeffs }
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative_at(&self, k: usize) -> f64 {
        self.coeffs[k] * (1..=k).map(|i| i as f64).product::<f64>()
    }

    /// Series of `f'`; the top coefficient is lost to truncation.
    pub fn derivative(&self) -> Self {
        let mut coeffs = [0.0; N];
        for k in 0..N - 1 {
            coeffs[k] = (k + 1) as f64 * self.coeffs[k + 1];
        }
        Taylor { coeffs }
    }

    /// `g(self)` given the derivatives `g^{(k)}(self(s₀))`, `k < N`.
    fn compose(&self, derivs: [f64; N]) -> Self {
        let mut delta = *self;
        delta.coeffs[0] = 0.0;
        let mut out = Taylor::constant(derivs[0]);
        let mut power = Taylor::constant(1.0);
        let mut factorial = 1.0;
        for (k, d) in derivs.iter().enumerate().skip(1) {
            power = power * delta;
            factorial *= k as f64;
            out = out + power * (d / factorial);
        }
        out
    }

    pub fn recip(&self) -> Self {
        Taylor::constant(1.0) / *self
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose(std::array::from_fn(|k| [s, c, -s, -c][k % 4]))
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose(std::array::from_fn(|k| [c, -s, -c, s][k % 4]))
    }

    pub fn sinh(&self) -> Self {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        self.compose(std::array::from_fn(|k| if k % 2 == 0 { s } else { c }))
    }

    pub fn cosh(&self) -> Self {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        self.compose(std::array::from_fn(|k| if k % 2 == 0 { c } else { s }))
    }

    pub fn exp(&self) -> Self {
        self.compose([self.value().exp(); N])
    }

    /// Real power `self^p`; the value at the expansion point must be positive
    /// unless `p` is a non-negative integer.
    pub fn powf(&self, p: f64) -> Self {
        let x = self.value();
        let mut derivs = [0.0; N];
        let mut falling = 1.0;
        for (k, d) in derivs.iter_mut().enumerate() {
            *d = falling * x.powf(p - k as f64);
            falling *= p - k as f64;
        }
        self.compose(derivs)
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    pub fn ln(&self) -> Self {
        let x = self.value();
        let mut derivs = [0.0; N];
        derivs[0] = x.ln();
        let mut coeff = 1.0;
        for (k, d) in derivs.iter_mut().enumerate().skip(1) {
            *d = coeff / x.powi(k as i32);
            coeff *= -(k as f64);
        }
        self.compose(derivs)
    }

    pub fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut out = Taylor::constant(1.0);
        for _ in 0..n {
            out = out * *self;
        }
        out
    }
}

impl<const N: usize> Add for Taylor<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Taylor { coeffs: std::array::from_fn(|k| self.coeffs[k] + rhs.coeffs[k]) }
    }
}

impl<const N: usize> Sub for Taylor<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Taylor { coeffs: std::array::from_fn(|k| self.coeffs[k] - rhs.coeffs[k]) }
    }
}

impl<const N: usize> Neg for Taylor<N> {
    type Output = Self;
    fn neg(self) -> Self {
        Taylor { coeffs: self.coeffs.map(|c| -c) }
    }
}

impl<const N: usize> Mul for Taylor<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut coeffs = [0.0; N];
        for i in 0..N {
            for j in 0..N - i {
                coeffs[i + j] += self.coeffs[i] * rhs.coeffs[j];
            }
        }
        Taylor { coeffs }
    }
}

impl<const N: usize> Div for Taylor<N> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let b0 = rhs.coeffs[0];
        let mut q = [0.0; N];
        for k in 0..N {
            let acc: f64 = (0..k).map(|j| q[j] * rhs.coeffs[k - j]).sum();
            q[k] = (self.coeffs[k] - acc) / b0;
        }
        Taylor { coeffs: q }
    }
}

impl<const N: usize> Add<f64> for Taylor<N> {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.coeffs[0] += rhs;
        self
    }
}

impl<const N: usize> Sub<f64> for Taylor<N> {
    type Output = Self;
    fn sub(mut self, rhs: f64) -> Self {
        self.coeffs[0] -= rhs;
        self
    }
}

impl<const N: usize> Mul<f64> for Taylor<N> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Taylor { coeffs: self.coeffs.map(|c| c * rhs) }
    }
}

impl<const N: usize> Div<f64> for Taylor<N> {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        Taylor { coeffs: self.coeffs.map(|c| c / rhs) }
    }
}

impl<const N: usize> Mul<Taylor<N>> for f64 {
    type Output = Taylor<N>;
    fn mul(self, rhs: Taylor<N>) -> Taylor<N> {
        rhs * self
    }
}

impl<const N: usize> Add<Taylor<N>> for f64 {
    type Output = Taylor<N>;
    fn add(self, rhs: Taylor<N>) -> Taylor<N> {
        rhs + self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type T = Taylor<8>;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + b.abs())
    }

    #[test]
    fn derivatives_of_sin_product() {
        // f = s·sin(s) at s = 0.7
        let s = T::variable(0.7);
        let f = s * s.sin();
        let (sn, cs) = 0.7f64.sin_cos();
        assert!(close(f.derivative_at(1), sn + 0.7 * cs));
        assert!(close(f.derivative_at(2), 2.0 * cs - 0.7 * sn));
        assert!(close(f.derivative_at(3), -3.0 * sn - 0.7 * cs));
    }

    #[test]
    fn quotient_and_powers() {
        let s = T::variable(1.3);
        let f = (s * s + 1.0) / s;
        // f = s + 1/s, f'''' = 24/s^5
        assert!(close(f.derivative_at(4), 24.0 / 1.3f64.powi(5)));
        let g = s.powi(-3);
        assert!(close(g.derivative_at(2), 12.0 / 1.3f64.powi(5)));
        let h = s.sqrt() * s.sqrt();
        for k in 2..8 {
            assert!(h.coeffs[k].abs() < 1e-12);
        }
    }

    #[test]
    fn transcendental_identities() {
        let s = T::variable(0.4);
        let e = s.exp().ln();
        assert!((e - s).coeffs.iter().all(|c| c.abs() < 1e-12));
        let p = s.sin() * s.sin() + s.cos() * s.cos();
        assert!(close(p.value(), 1.0) && p.coeffs[1..].iter().all(|c| c.abs() < 1e-12));
        let q = s.cosh() * s.cosh() - s.sinh() * s.sinh();
        assert!(close(q.value(), 1.0) && q.coeffs[1..].iter().all(|c| c.abs() < 1e-12));
    }
}
