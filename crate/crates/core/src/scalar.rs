//! Complex scalars used by the boundary-integral kernels.
//!
//! The kernels are written once over [`CScalar`] and instantiated with plain
//! `Complex64` for evaluation and with [`Jet`] to obtain exact directional
//! derivatives with respect to a real shape parameter (the V-state solver's
//! Jacobian).

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait CScalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(z: Complex64) -> Self;
    fn value(self) -> Complex64;
    fn conj(self) -> Self;
    fn scale(self, k: f64) -> Self;
    /// Real part, returned as a complex number with zero imaginary part.
    fn re(self) -> Self;
    /// Modulus, returned as a complex number with zero imaginary part.
    fn abs(self) -> Self;

    fn real(x: f64) -> Self {
        Self::constant(Complex64::new(x, 0.0))
    }
}

impl CScalar for Complex64 {
    #[inline]
    fn constant(z: Complex64) -> Self {
        z
    }
    #[inline]
    fn value(self) -> Complex64 {
        self
    }
    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn scale(self, k: f64) -> Self {
        self * k
    }
    #[inline]
    fn re(self) -> Self {
        Complex64::new(self.re, 0.0)
    }
    #[inline]
    fn abs(self) -> Self {
        Complex64::new(self.norm(), 0.0)
    }
}

/// First-order forward-mode jet: a complex value together with its derivative
/// along one real parameter direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: Complex64,
    pub d: Complex64,
}

impl Jet {
    pub fn new(v: Complex64, d: Complex64) -> Self {
        Self { v, d }
    }
}

impl Add for Jet {
    type Output = Jet;
    #[inline]
    fn add(self, o: Jet) -> Jet {
        Jet::new(self.v + o.v, self.d + o.d)
    }
}

impl Sub for Jet {
    type Output = Jet;
    #[inline]
    fn sub(self, o: Jet) -> Jet {
        Jet::new(self.v - o.v, self.d - o.d)
    }
}

impl Mul for Jet {
    type Output = Jet;
    #[inline]
    fn mul(self, o: Jet) -> Jet {
        Jet::new(self.v * o.v, self.d * o.v + self.v * o.d)
    }
}

impl Div for Jet {
    type Output = Jet;
    #[inline]
    fn div(self, o: Jet) -> Jet {
        let q = self.v / o.v;
        Jet::new(q, (self.d - q * o.d) / o.v)
    }
}

impl Neg for Jet {
    type Output = Jet;
    #[inline]
    fn neg(self) -> Jet {
        Jet::new(-self.v, -self.d)
    }
}

impl CScalar for Jet {
    #[inline]
    fn constant(z: Complex64) -> Self {
        Jet::new(z, Complex64::new(0.0, 0.0))
    }
    #[inline]
    fn value(self) -> Complex64 {
        self.v
    }
    #[inline]
    fn conj(self) -> Self {
        // the parameter is real, so differentiation commutes with conjugation
        Jet::new(self.v.conj(), self.d.conj())
    }
    #[inline]
    fn scale(self, k: f64) -> Self {
        Jet::new(self.v * k, self.d * k)
    }
    #[inline]
    fn re(self) -> Self {
        Jet::new(Complex64::new(self.v.re, 0.0), Complex64::new(self.d.re, 0.0))
    }
    #[inline]
    fn abs(self) -> Self {
        let m = self.v.norm();
        let dm = (self.v.conj() * self.d).re / m;
        Jet::new(Complex64::new(m, 0.0), Complex64::new(dm, 0.0))
    }
}
