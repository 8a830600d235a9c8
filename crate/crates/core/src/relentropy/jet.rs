//! Second-order forward-mode jets in the variables `(t, x, y)`.
//!
//! Test pairs are written once as ordinary arithmetic on [`Jet`]s, which
//! yields their time derivatives, gradients and Hessians exactly.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub const VARS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: f64,
    /// First derivatives in `(t, x, y)`.
    pub d: [f64; VARS],
    /// Second derivatives, symmetric.
    pub h: [[f64; VARS]; VARS],
}

impl Jet {
    pub const fn constant(v: f64) -> Self {
        Jet {
            v,
            d: [0.0; VARS],
            h: [[0.0; VARS]; VARS],
        }
    }

    /// The independent variable number `i` evaluated at `v`.
    pub fn var(i: usize, v: f64) -> Self {
        let mut j = Jet::constant(v);
        j.d[i] = 1.0;
        j
    }

    /// Applies a scalar function with value `f0` and derivatives `f1`, `f2`
    /// at `self.v`.
    #[inline]
    fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut out = Jet::constant(f0);
        for a in 0..VARS {
            out.d[a] = f1 * self.d[a];
            for b in 0..VARS {
                out.h[a][b] = f1 * self.h[a][b] + f2 * self.d[a] * self.d[b];
            }
        }
        out
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(self.v.ln(), r, -r * r)
    }

    pub fn powf(self, p: f64) -> Self {
        let v = self.v;
        self.chain(
            v.powf(p),
            p * v.powf(p - 1.0),
            p * (p - 1.0) * v.powf(p - 2.0),
        )
    }

    pub fn powi(self, n: i32) -> Self {
        let v = self.v;
        let n_f = n as f64;
        self.chain(
            v.powi(n),
            n_f * v.powi(n - 1),
            n_f * (n_f - 1.0) * v.powi(n - 2),
        )
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn scale(self, c: f64) -> Self {
        let mut out = self;
        out.v *= c;
        for a in 0..VARS {
            out.d[a] *= c;
            for b in 0..VARS {
                out.h[a][b] *= c;
            }
        }
        out
    }

    /// `∂/∂t`.
    pub fn dt(&self) -> f64 {
        self.d[0]
    }

    /// Spatial gradient `(∂x, ∂y)`.
    pub fn grad(&self) -> [f64; 2] {
        [self.d[1], self.d[2]]
    }

    /// Spatial Hessian.
    pub fn hess(&self) -> [[f64; 2]; 2] {
        [[self.h[1][1], self.h[1][2]], [self.h[2][1], self.h[2][2]]]
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, o: Jet) -> Jet {
        self.v += o.v;
        for a in 0..VARS {
            self.d[a] += o.d[a];
            for b in 0..VARS {
                self.h[a][b] += o.h[a][b];
            }
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut out = Jet::constant(self.v * o.v);
        for a in 0..VARS {
            out.d[a] = self.d[a] * o.v + self.v * o.d[a];
            for b in 0..VARS {
                out.h[a][b] = self.h[a][b] * o.v
                    + self.v * o.h[a][b]
                    + self.d[a] * o.d[b]
                    + self.d[b] * o.d[a];
            }
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, c: f64) -> Jet {
        self.v += c;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, c: f64) -> Jet {
        self.v -= c;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        self.scale(c)
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, j: Jet) -> Jet {
        j + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, j: Jet) -> Jet {
        (-j) + self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, j: Jet) -> Jet {
        j.scale(self)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, c: f64) -> Jet {
        self.scale(1.0 / c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(t: Jet, x: Jet, y: Jet) -> Jet {
        let a = (x * 2.0).sin() * (y * 3.0).cos() * (t * 0.5).exp();
        let b = (1.5 + x * y).recip() + (x + 2.0).powf(1.7) - (y + 1.0).ln() * t.powi(3);
        a / (2.0 + t.sin() * 0.5) + b
    }

    fn fv(p: [f64; 3]) -> f64 {
        f(Jet::constant(p[0]), Jet::constant(p[1]), Jet::constant(p[2])).v
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = [0.3, 0.4, 0.7];
        let j = f(Jet::var(0, p[0]), Jet::var(1, p[1]), Jet::var(2, p[2]));
        assert!((j.v - fv(p)).abs() < 1e-15);
        let e = 1e-5;
        for a in 0..3 {
            let mut pp = p;
            let mut pm = p;
            pp[a] += e;
            pm[a] -= e;
            let fd = (fv(pp) - fv(pm)) / (2.0 * e);
            assert!((j.d[a] - fd).abs() < 1e-8, "d{a}: {} vs {fd}", j.d[a]);
            for b in 0..3 {
                let e2 = 1e-4;
                let shift = |da: f64, db: f64| {
                    let mut q = p;
                    q[a] += da;
                    q[b] += db;
                    fv(q)
                };
                let fd2 = (shift(e2, e2) - shift(e2, -e2) - shift(-e2, e2) + shift(-e2, -e2))
                    / (4.0 * e2 * e2);
                assert!((j.h[a][b] - fd2).abs() < 1e-5, "h{a}{b}: {} vs {fd2}", j.h[a][b]);
            }
        }
    }
}
