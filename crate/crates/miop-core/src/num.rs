//! Arbitrary-precision scalars and the special functions the polynomial
//! constructions are built on: the complex gamma function (Stirling series
//! with exact Bernoulli numbers, plus reflection), Pochhammer symbols, and
//! finite / infinite q-Pochhammer products with rigorous truncation.

use once_cell::sync::Lazy;
use rug::{Complex, Float, Integer, Rational};
use std::sync::Mutex;

use crate::error::{Error, Result};

/// Minimum supported working precision in bits.
pub const MIN_BITS: u32 = 64;

/// Working precision in bits of the mantissa.
///
/// Every construction routine takes an explicit `Precision`; results are
/// carried with guard bits internally and are accurate to roughly the
/// declared number of bits.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Precision {
    bits: u32,
}

impl Precision {
    /// Creates a precision of `bits` mantissa bits; at least [`MIN_BITS`].
    pub fn new(bits: u32) -> Result<Self> {
        if bits < MIN_BITS {
            return Err(Error::PrecisionTooLow {
                min: MIN_BITS,
                got: bits,
            });
        }
        Ok(Self { bits })
    }

    /// The declared number of mantissa bits.
    pub fn bits(self) -> u32 {
        self.bits
    }

    /// A precision with `extra` additional guard bits.
    pub fn with_guard(self, extra: u32) -> Self {
        Self {
            bits: self.bits + extra,
        }
    }

    /// `2^(-(bits - margin))` as a float, for tolerance thresholds.
    pub fn eps(self, margin: u32) -> Float {
        let e = -((self.bits.saturating_sub(margin)) as i32);
        Float::with_val(self.bits, 1u32) << e
    }
}

/// A real number at precision `p` from an `f64`.
pub fn float(p: Precision, v: f64) -> Float {
    Float::with_val(p.bits, v)
}

/// A complex number at precision `p` from two `f64` parts.
pub fn cplx(p: Precision, re: f64, im: f64) -> Complex {
    Complex::with_val(p.bits, (re, im))
}

/// A complex number at precision `p` holding the real value `v`.
pub fn creal(p: Precision, v: &Float) -> Complex {
    Complex::with_val(p.bits, (v, &Float::with_val(p.bits, 0)))
}

/// pi at precision `p`.
pub fn pi(p: Precision) -> Float {
    Float::with_val(p.bits, rug::float::Constant::Pi)
}

/// Complex conjugate.
pub fn conj(z: &Complex) -> Complex {
    let mut c = z.clone();
    c.conj_mut();
    c
}

/// Absolute value of a complex number as a real float.
pub fn cabs(z: &Complex) -> Float {
    z.real().clone().hypot(z.imag())
}

/// `2^e` at precision `p` for a (possibly negative) exponent.
pub fn two_pow(p: Precision, e: i64) -> Float {
    Float::with_val(p.bits, 1u32) << (e as i32)
}

/// Exact Bernoulli numbers `B_0, B_1, B_2, ...` (with `B_1 = -1/2`),
/// computed once by the defining recurrence and cached.
static BERNOULLI: Lazy<Mutex<Vec<Rational>>> =
    Lazy::new(|| Mutex::new(vec![Rational::from(1)]));

/// The exact Bernoulli number `B_n`.
pub fn bernoulli(n: usize) -> Rational {
    let mut cache = BERNOULLI.lock().unwrap();
    while cache.len() <= n {
        let m = cache.len();
        // sum_{k=0}^{m} C(m+1, k) B_k = 0  for m >= 1
        let mut acc = Rational::new();
        for (k, bk) in cache.iter().enumerate() {
            let c = Integer::from(m as u32 + 1).binomial(k as u32);
            acc += bk.clone() * c;
        }
        acc /= -Rational::from(m as u32 + 1);
        cache.push(acc);
    }
    cache[n].clone()
}

/// The complex gamma function.
///
/// Uses the Stirling asymptotic series with exact Bernoulli coefficients
/// after raising the argument, and the reflection formula for `Re z < 1/2`.
/// Returns [`Error::GammaPole`] at non-positive integers.
pub fn gamma(z: &Complex, p: Precision) -> Result<Complex> {
    gamma_wp(z, p.bits + 64)
}

fn is_nonpositive_integer(z: &Complex) -> bool {
    z.imag().is_zero() && z.real().is_integer() && *z.real() <= 0f64
}

fn gamma_wp(z: &Complex, wp: u32) -> Result<Complex> {
    if is_nonpositive_integer(z) {
        return Err(Error::GammaPole(format!("{}", z.real())));
    }
    if *z.real() < 0.5f64 {
        // Gamma(z) = pi / (sin(pi z) Gamma(1 - z))
        let wp2 = wp + 16;
        let zz = Complex::with_val(wp2, z);
        let one_minus = Complex::with_val(wp2, 1u32 - &zz);
        let g = gamma_wp(&one_minus, wp2)?;
        let pi = Float::with_val(wp2, rug::float::Constant::Pi);
        let s = Complex::with_val(wp2, &pi * &zz).sin();
        let denom = s * g;
        return Ok(Complex::with_val(wp, Complex::with_val(wp2, &pi) / denom));
    }

    let wp2 = wp + 32;
    let threshold = (0.3 * wp2 as f64).max(16.0);
    let mut zz = Complex::with_val(wp2, z);
    let mut shift = Complex::with_val(wp2, 1u32);
    while cabs(&zz) < threshold {
        shift *= &zz;
        zz += 1u32;
    }

    // ln Gamma(zz) = (zz - 1/2) ln zz - zz + ln(2 pi)/2
    //              + sum_{k>=1} B_{2k} / (2k (2k-1) zz^{2k-1})
    let ln_zz = zz.clone().ln();
    let two_pi = Float::with_val(wp2, rug::float::Constant::Pi) * 2u32;
    let mut acc = Complex::with_val(wp2, &zz - &Float::with_val(wp2, 0.5));
    acc *= &ln_zz;
    acc -= &zz;
    acc += two_pi.ln() / 2u32;

    let z2 = Complex::with_val(wp2, zz.clone().square());
    let mut zpow = zz.clone(); // zz^{2k-1}
    let cutoff = Float::with_val(wp2, 1u32) << -((wp2 as i32) - 4);
    let mut prev_mag = Float::with_val(wp2, rug::float::Special::Infinity);
    for k in 1..(wp2 as usize) {
        let b = bernoulli(2 * k);
        let denom_int = (2 * k * (2 * k - 1)) as u32;
        let coeff = Float::with_val(wp2, b) / denom_int;
        let term = Complex::with_val(wp2, &coeff / &zpow);
        let mag = cabs(&term);
        if mag > prev_mag {
            break; // asymptotic tail started growing; already below cutoff by design
        }
        acc += &term;
        if mag < cutoff {
            break;
        }
        prev_mag = mag;
        zpow *= &z2;
    }

    let g = acc.exp() / shift;
    Ok(Complex::with_val(wp, g))
}

/// The Pochhammer symbol `(a)_n = a (a+1) ... (a+n-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: &Complex, n: u32, p: Precision) -> Complex {
    let wp = p.bits + 32;
    let mut acc = Complex::with_val(wp, 1u32);
    let mut f = Complex::with_val(wp, a);
    for _ in 0..n {
        acc *= &f;
        f += 1u32;
    }
    acc
}

/// The finite q-Pochhammer symbol `(a; q)_n = prod_{k=0}^{n-1} (1 - a q^k)`.
pub fn qpochhammer(a: &Complex, q: &Float, n: u32, p: Precision) -> Complex {
    let wp = p.bits + 32;
    let mut acc = Complex::with_val(wp, 1u32);
    let mut aq = Complex::with_val(wp, a);
    for _ in 0..n {
        let term = Complex::with_val(wp, 1u32 - &aq);
        acc *= term;
        aq *= q;
    }
    acc
}

/// The infinite q-Pochhammer symbol `(a; q)_inf`, truncated where the
/// remaining factors differ from 1 by less than one unit in the last
/// guarded place. Requires `|q| < 1`.
pub fn qpochhammer_inf(a: &Complex, q: &Float, p: Precision) -> Result<Complex> {
    let wp = p.bits + 32;
    let qabs = q.clone().abs();
    if qabs >= 1f64 {
        return Err(Error::DivergentProduct(format!(
            "infinite product needs |q| < 1, got |q| = {}",
            qabs
        )));
    }
    let aabs = cabs(a);
    if aabs.is_zero() || qabs.is_zero() {
        // (0; q)_inf = 1; (a; 0)_inf = 1 - a
        let first = Complex::with_val(wp, 1u32 - a);
        return Ok(if qabs.is_zero() {
            first
        } else {
            Complex::with_val(wp, 1u32)
        });
    }
    // |a| q^K < 2^{-(wp+8)}  =>  K > (wp + 8 + log2|a|) / (-log2 q)
    let log2a = aabs.ln().to_f64() / std::f64::consts::LN_2;
    let log2q = qabs.ln().to_f64() / std::f64::consts::LN_2;
    let kf = ((wp as f64 + 8.0 + log2a) / (-log2q)).ceil();
    let k = if kf < 1.0 { 1u32 } else { kf as u32 };
    Ok(qpochhammer(a, q, k, Precision { bits: wp }))
}
