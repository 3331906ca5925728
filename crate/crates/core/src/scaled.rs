//! Complex numbers with a separate binary exponent, for products of
//! thousands of factors that would overflow or underflow an `f64`.

use std::f64::consts::LN_2;

use num_complex::Complex64;

const HI: f64 = 1.3407807929942597e154; // 2^512
const LO: f64 = 7.458340731200207e-155; // 2^-512
const FACTOR_HI: f64 = 1.157920892373162e77; // 2^256
const FACTOR_LO: f64 = 8.636168555094445e-78; // 2^-256

/// Value `mantissa · 2^exp2`, with the mantissa's larger component kept in
/// `[2^-512, 2^512]` (or exactly zero).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledComplex {
    pub mantissa: Complex64,
    pub exp2: i64,
}

/// `2^k` for `k` in the normal exponent range.
#[inline]
fn pow2(k: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&k));
    f64::from_bits(((k + 1023) as u64) << 52)
}

/// Exact `x · 2^e`, saturating to 0 or ±∞.
pub fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= pow2(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= pow2(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * pow2(e)
}

/// Binary exponent `e` with `2^e ≤ a < 2^(e+1)` for finite `a > 0`.
#[inline]
fn exponent_of(a: f64) -> i64 {
    let biased = ((a.to_bits() >> 52) & 0x7ff) as i64;
    if biased == 0 {
        a.log2().floor() as i64
    } else {
        biased - 1023
    }
}

impl ScaledComplex {
    pub const ZERO: ScaledComplex = ScaledComplex {
        mantissa: Complex64::new(0.0, 0.0),
        exp2: 0,
    };
    pub const ONE: ScaledComplex = ScaledComplex {
        mantissa: Complex64::new(1.0, 0.0),
        exp2: 0,
    };

    pub fn from_complex(z: Complex64) -> Self {
        let mut s = ScaledComplex { mantissa: z, exp2: 0 };
        s.force_normalize();
        s
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    #[inline]
    fn magnitude_bound(z: Complex64) -> f64 {
        z.re.abs().max(z.im.abs())
    }

    fn force_normalize(&mut self) {
        let a = Self::magnitude_bound(self.mantissa);
        if a == 0.0 || !a.is_finite() {
            if a == 0.0 {
                self.exp2 = 0;
            }
            return;
        }
        let e = exponent_of(a);
        self.mantissa = Complex64::new(ldexp(self.mantissa.re, -e), ldexp(self.mantissa.im, -e));
        self.exp2 += e;
    }

    #[inline]
    fn normalize(&mut self) {
        let a = Self::magnitude_bound(self.mantissa);
        if !(LO..=HI).contains(&a) && a != 0.0 {
            self.force_normalize();
        }
    }

    /// Multiplies by an ordinary complex factor.
    #[inline]
    pub fn mul_complex(&mut self, f: Complex64) {
        let a = Self::magnitude_bound(f);
        if (FACTOR_LO..=FACTOR_HI).contains(&a) {
            self.mantissa *= f;
            self.normalize();
        } else {
            self.mul_scaled(&ScaledComplex::from_complex(f));
        }
    }

    #[inline]
    pub fn mul_scaled(&mut self, other: &ScaledComplex) {
        self.mantissa *= other.mantissa;
        self.exp2 += other.exp2;
        if self.is_zero() {
            self.exp2 = 0;
        } else {
            self.normalize();
        }
    }

    /// Multiplies by `e^log_factor` without forming it.
    pub fn scale_by_exp(&mut self, log_factor: f64) {
        if self.is_zero() {
            return;
        }
        let l2 = log_factor / LN_2;
        let whole = l2.floor();
        let frac = l2 - whole;
        self.mantissa *= frac.exp2();
        self.exp2 += whole as i64;
        self.normalize();
    }

    pub fn powi(&self, k: u32) -> ScaledComplex {
        let mut out = ScaledComplex::ONE;
        for _ in 0..k {
            out.mul_scaled(self);
        }
        out
    }

    /// Natural log of the modulus; `-∞` for zero.
    #[inline]
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mantissa.norm().ln() + self.exp2 as f64 * LN_2
    }

    /// Ordinary complex value, saturating to zero or infinity.
    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(ldexp(self.mantissa.re, self.exp2), ldexp(self.mantissa.im, self.exp2))
    }

    pub fn is_finite(&self) -> bool {
        self.mantissa.re.is_finite() && self.mantissa.im.is_finite()
    }
}
