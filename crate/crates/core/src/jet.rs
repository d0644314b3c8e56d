//! Derivative bookkeeping for quantities derived from curve data.
//!
//! A jet carries a value and its first few derivatives with respect to the
//! curve parameter, and propagates them through products, quotients and
//! elementary functions with the Leibniz and Faà di Bruno rules. `order` is
//! the highest derivative that is valid; operations take the minimum order
//! of their operands, and [`Jet::deriv`] turns a jet of order `n` into the
//! jet of its derivative, of order `n - 1`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::lorentz::{lcross, mdot, MVec3};

/// Highest derivative a jet can hold.
pub const MAX_ORDER: usize = 3;
const LEN: usize = MAX_ORDER + 1;
const BINOM: [[f64; LEN]; LEN] = [
    [1.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0],
    [1.0, 3.0, 3.0, 1.0],
];

/// Scalar jet: `d[i]` is the i-th derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub d: [f64; LEN],
    pub order: usize,
}

/// Vector jet in Minkowski 3-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VJet {
    pub d: [MVec3; LEN],
    pub order: usize,
}

impl Jet {
    pub fn constant(c: f64) -> Jet {
        Jet {
            d: [c, 0.0, 0.0, 0.0],
            order: MAX_ORDER,
        }
    }

    pub fn new(d: [f64; LEN], order: usize) -> Jet {
        let mut j = Jet { d, order };
        j.clear_tail();
        j
    }

    pub fn value(&self) -> f64 {
        self.d[0]
    }

    /// The `n`-th derivative, if the jet carries it.
    pub fn get(&self, n: usize) -> Result<f64> {
        if n <= self.order {
            Ok(self.d[n])
        } else {
            Err(Error::OrderUnsupported(n))
        }
    }

    /// Jet of the derivative.
    pub fn deriv(&self) -> Result<Jet> {
        if self.order == 0 {
            return Err(Error::OrderUnsupported(1));
        }
        let mut d = [0.0; LEN];
        d[..MAX_ORDER].copy_from_slice(&self.d[1..]);
        Ok(Jet::new(d, self.order - 1))
    }

    fn clear_tail(&mut self) {
        for v in self.d.iter_mut().skip(self.order + 1) {
            *v = 0.0;
        }
    }

    /// `g(self)` given `g` and its first three derivatives at `self.value()`.
    pub fn compose(&self, g: [f64; LEN]) -> Jet {
        let [_, a1, a2, a3] = self.d;
        let d = [
            g[0],
            g[1] * a1,
            g[2] * a1 * a1 + g[1] * a2,
            g[3] * a1 * a1 * a1 + 3.0 * g[2] * a1 * a2 + g[1] * a3,
        ];
        Jet::new(d, self.order)
    }

    pub fn recip(&self) -> Jet {
        let x = self.d[0];
        let r = 1.0 / x;
        self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    pub fn sqrt(&self) -> Jet {
        let x = self.d[0];
        let r = x.sqrt();
        self.compose([r, 0.5 / r, -0.25 / (r * x), 0.375 / (r * x * x)])
    }

    pub fn sinh(&self) -> Jet {
        let (s, c) = (self.d[0].sinh(), self.d[0].cosh());
        self.compose([s, c, s, c])
    }

    pub fn cosh(&self) -> Jet {
        let (s, c) = (self.d[0].sinh(), self.d[0].cosh());
        self.compose([c, s, c, s])
    }

    pub fn scale(&self, k: f64) -> Jet {
        Jet::new(self.d.map(|v| v * k), self.order)
    }

    pub fn is_finite(&self) -> bool {
        self.d[..=self.order].iter().all(|v| v.is_finite())
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut d = [0.0; LEN];
        for (i, v) in d.iter_mut().enumerate() {
            *v = self.d[i] + o.d[i];
        }
        Jet::new(d, self.order.min(o.order))
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
        let mut d = [0.0; LEN];
        for (n, v) in d.iter_mut().enumerate() {
            *v = (0..=n).map(|k| BINOM[n][k] * self.d[k] * o.d[n - k]).sum();
        }
        Jet::new(d, self.order.min(o.order))
    }
}

impl VJet {
    pub fn new(d: [MVec3; LEN], order: usize) -> VJet {
        let mut j = VJet { d, order };
        for v in j.d.iter_mut().skip(order + 1) {
            *v = MVec3::ZERO;
        }
        j
    }

    pub fn constant(v: MVec3) -> VJet {
        VJet::new([v, MVec3::ZERO, MVec3::ZERO, MVec3::ZERO], MAX_ORDER)
    }

    pub fn value(&self) -> MVec3 {
        self.d[0]
    }

    pub fn get(&self, n: usize) -> Result<MVec3> {
        if n <= self.order {
            Ok(self.d[n])
        } else {
            Err(Error::OrderUnsupported(n))
        }
    }

    pub fn deriv(&self) -> Result<VJet> {
        if self.order == 0 {
            return Err(Error::OrderUnsupported(1));
        }
        let mut d = [MVec3::ZERO; LEN];
        d[..MAX_ORDER].copy_from_slice(&self.d[1..]);
        Ok(VJet::new(d, self.order - 1))
    }

    /// Jet truncated to at most `order`.
    pub fn truncate(&self, order: usize) -> VJet {
        VJet::new(self.d, self.order.min(order))
    }

    pub fn dot(&self, o: &VJet) -> Jet {
        let mut d = [0.0; LEN];
        for (n, v) in d.iter_mut().enumerate() {
            *v = (0..=n)
                .map(|k| BINOM[n][k] * mdot(self.d[k], o.d[n - k]))
                .sum();
        }
        Jet::new(d, self.order.min(o.order))
    }

    pub fn cross(&self, o: &VJet) -> VJet {
        let mut d = [MVec3::ZERO; LEN];
        for (n, v) in d.iter_mut().enumerate() {
            for (k, b) in BINOM[n].iter().enumerate().take(n + 1) {
                *v += lcross(self.d[k], o.d[n - k]) * *b;
            }
        }
        VJet::new(d, self.order.min(o.order))
    }

    /// Product with a scalar jet.
    pub fn scale(&self, s: &Jet) -> VJet {
        let mut d = [MVec3::ZERO; LEN];
        for (n, v) in d.iter_mut().enumerate() {
            for (k, b) in BINOM[n].iter().enumerate().take(n + 1) {
                *v += self.d[n - k] * (b * s.d[k]);
            }
        }
        VJet::new(d, self.order.min(s.order))
    }

    pub fn scale_const(&self, k: f64) -> VJet {
        VJet::new(self.d.map(|v| v * k), self.order)
    }

    pub fn is_finite(&self) -> bool {
        self.d[..=self.order].iter().all(|v| v.is_finite())
    }
}

impl Add for VJet {
    type Output = VJet;
    fn add(self, o: VJet) -> VJet {
        let mut d = self.d;
        for (i, v) in d.iter_mut().enumerate() {
            *v += o.d[i];
        }
        VJet::new(d, self.order.min(o.order))
    }
}

impl Sub for VJet {
    type Output = VJet;
    fn sub(self, o: VJet) -> VJet {
        self + (-o)
    }
}

impl Neg for VJet {
    type Output = VJet;
    fn neg(self) -> VJet {
        self.scale_const(-1.0)
    }
}
