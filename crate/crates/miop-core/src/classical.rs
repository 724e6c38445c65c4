//! The two base families: Wilson (continuous variable on `(0, inf)`, gamma
//! function weight) and Askey-Wilson (trigonometric variable on `(0, pi)`,
//! q-product weight).
//!
//! Provides the potential function, sinusoidal coordinate, eigenvalues,
//! polynomial series and interpolated coefficient form, ground-state
//! weight, closed-form norms, and the forward/backward shift and
//! square-root-free difference operators acting on polynomials through
//! sampling and re-interpolation.

use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::num::{cabs, conj, creal, gamma, pi, pochhammer, qpochhammer, qpochhammer_inf, two_pow, Precision};
use crate::poly::{interpolate, RealEtaPoly};

/// The two supported orthogonal polynomial families.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// Continuous variable on `(0, inf)`; parameters `a_1..a_4`, shift `gamma = 1`.
    Wilson,
    /// Trigonometric variable on `(0, pi)`; parameters `a_1..a_4` and `0 < q < 1`,
    /// shift `gamma = log q`.
    AskeyWilson,
}

/// A family together with a concrete parameter point.
///
/// Twisted and shifted parameter sets reuse this type, so the base-range
/// inequalities are checked by [`FamilyParams::check_base_range`] rather
/// than enforced at construction.
#[derive(Clone, Debug)]
pub struct FamilyParams {
    pub family: Family,
    pub a: [Complex; 4],
    /// Base `q` for Askey-Wilson; `None` for Wilson.
    pub q: Option<Float>,
    pub prec: Precision,
}

impl FamilyParams {
    /// Wilson parameters.
    pub fn wilson(a: [Complex; 4], prec: Precision) -> Self {
        Self {
            family: Family::Wilson,
            a,
            q: None,
            prec,
        }
    }

    /// Askey-Wilson parameters.
    pub fn askey_wilson(a: [Complex; 4], q: Float, prec: Precision) -> Self {
        Self {
            family: Family::AskeyWilson,
            a,
            q: Some(q),
            prec,
        }
    }

    fn wp(&self) -> u32 {
        self.prec.bits() + 32
    }

    /// The pure-imaginary-shift magnitude: `1` for Wilson, `log q < 0` for
    /// Askey-Wilson.
    pub fn gamma_shift(&self) -> Float {
        match self.family {
            Family::Wilson => Float::with_val(self.wp(), 1),
            Family::AskeyWilson => self.q.as_ref().unwrap().clone().ln(),
        }
    }

    /// `kappa`: `1` for Wilson, `1/q` for Askey-Wilson.
    pub fn kappa(&self) -> Float {
        match self.family {
            Family::Wilson => Float::with_val(self.wp(), 1),
            Family::AskeyWilson => Float::with_val(self.wp(), self.q.as_ref().unwrap().clone().recip()),
        }
    }

    /// `kappa^(h/2)` for integer half-units `h` (exact power, no logs).
    pub fn kappa_pow_half(&self, h: i64) -> Float {
        match self.family {
            Family::Wilson => Float::with_val(self.wp(), 1),
            Family::AskeyWilson => {
                let sq = self.q.as_ref().unwrap().clone().sqrt();
                Float::with_val(self.wp(), sq.pow(-(h as i32)))
            }
        }
    }

    /// `q^(u/4)` for integer quarter-units `u` (`1` for Wilson).
    pub fn q_pow_quarter(&self, u: i64) -> Float {
        match self.family {
            Family::Wilson => Float::with_val(self.wp(), 1),
            Family::AskeyWilson => {
                let qq = self.q.as_ref().unwrap().clone().sqrt().sqrt();
                Float::with_val(self.wp(), qq.pow(u as i32))
            }
        }
    }

    /// Upper end of the physical interval: `None` means `+inf`.
    pub fn x_upper(&self) -> Option<Float> {
        match self.family {
            Family::Wilson => None,
            Family::AskeyWilson => Some(pi(self.prec)),
        }
    }

    /// `b_1 = a_1 + a_2 + a_3 + a_4`.
    pub fn b1(&self) -> Complex {
        let mut s = Complex::with_val(self.wp(), 0);
        for ai in &self.a {
            s += ai;
        }
        s
    }

    /// `b_4 = a_1 a_2 a_3 a_4`.
    pub fn b4(&self) -> Complex {
        let mut s = Complex::with_val(self.wp(), 1);
        for ai in &self.a {
            s *= ai;
        }
        s
    }

    /// Shifts the parameter point by `d/2` in lambda space per entry:
    /// Wilson adds `d_i / 2` to `a_i`, Askey-Wilson multiplies `a_i` by
    /// `q^(d_i / 2)`.
    pub fn shift_half(&self, d: [i32; 4]) -> Self {
        let wp = self.wp();
        let mut a = self.a.clone();
        match self.family {
            Family::Wilson => {
                for (ai, di) in a.iter_mut().zip(d) {
                    *ai += Float::with_val(wp, di) / 2u32;
                }
            }
            Family::AskeyWilson => {
                let sq = self.q.as_ref().unwrap().clone().sqrt();
                for (ai, di) in a.iter_mut().zip(d) {
                    *ai *= Float::with_val(wp, sq.clone().pow(di));
                }
            }
        }
        Self {
            family: self.family,
            a,
            q: self.q.clone(),
            prec: self.prec,
        }
    }

    /// The natural-shift parameter point `lambda + delta` (all entries `+1/2`).
    pub fn shifted_delta(&self) -> Self {
        self.shift_half([1, 1, 1, 1])
    }

    /// Checks the base-range constraints: the parameter multiset is closed
    /// under conjugation, `Re a_i > 0` (Wilson) or `|a_i| < 1` and
    /// `0 < q < 1` (Askey-Wilson).
    pub fn check_base_range(&self) -> Result<()> {
        let wp = self.wp();
        let tol = two_pow(self.prec, -(self.prec.bits() as i64 / 2));
        // Conjugation closure as a multiset.
        let mut used = [false; 4];
        for ai in &self.a {
            let c = conj(ai);
            let mut found = false;
            for (j, aj) in self.a.iter().enumerate() {
                if used[j] {
                    continue;
                }
                if cabs(&Complex::with_val(wp, aj - &c)) < tol {
                    used[j] = true;
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(Error::InvalidParams(
                    "parameter multiset is not closed under conjugation".into(),
                ));
            }
        }
        match self.family {
            Family::Wilson => {
                for ai in &self.a {
                    if *ai.real() <= 0f64 {
                        return Err(Error::InvalidParams(format!(
                            "Wilson requires Re a_i > 0, got {}",
                            ai
                        )));
                    }
                }
            }
            Family::AskeyWilson => {
                let q = self.q.as_ref().ok_or_else(|| {
                    Error::InvalidParams("Askey-Wilson requires q".into())
                })?;
                if !(*q > 0f64 && *q < 1f64) {
                    return Err(Error::InvalidParams(format!(
                        "Askey-Wilson requires 0 < q < 1, got {}",
                        q
                    )));
                }
                for ai in &self.a {
                    if cabs(&Complex::with_val(wp, ai)) >= 1f64 {
                        return Err(Error::InvalidParams(format!(
                            "Askey-Wilson requires |a_i| < 1, got {}",
                            ai
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The sinusoidal coordinate: `x^2` (Wilson) or `cos x` (Askey-Wilson).
    pub fn eta(&self, x: &Complex) -> Complex {
        match self.family {
            Family::Wilson => Complex::with_val(self.wp(), x.clone().square()),
            Family::AskeyWilson => Complex::with_val(self.wp(), x.clone().cos()),
        }
    }

    /// The auxiliary function `varphi`: `2x` (Wilson) or `2 sin x`
    /// (Askey-Wilson).
    pub fn varphi(&self, x: &Complex) -> Complex {
        match self.family {
            Family::Wilson => Complex::with_val(self.wp(), x * 2u32),
            Family::AskeyWilson => Complex::with_val(self.wp(), x.clone().sin() * 2u32),
        }
    }

    /// The potential function `V(x)`.
    pub fn potential(&self, x: &Complex) -> Result<Complex> {
        let wp = self.wp();
        match self.family {
            Family::Wilson => {
                let ix = Complex::with_val(wp, x * &Complex::with_val(wp, (0, 1)));
                let two_ix = Complex::with_val(wp, &ix * 2u32);
                let den = Complex::with_val(
                    wp,
                    &two_ix * &Complex::with_val(wp, &two_ix + 1u32),
                );
                if cabs(&den).is_zero() {
                    return Err(Error::Domain(format!("potential pole at x = {}", x)));
                }
                let mut num = Complex::with_val(wp, 1);
                for ai in &self.a {
                    num *= Complex::with_val(wp, ai + &ix);
                }
                Ok(num / den)
            }
            Family::AskeyWilson => {
                let q = self.q.as_ref().unwrap();
                let eix = Complex::with_val(wp, x * &Complex::with_val(wp, (0, 1))).exp();
                let e2ix = Complex::with_val(wp, eix.clone().square());
                let den = Complex::with_val(
                    wp,
                    Complex::with_val(wp, 1u32 - &e2ix)
                        * Complex::with_val(wp, 1u32 - Complex::with_val(wp, &e2ix * q)),
                );
                if cabs(&den).is_zero() {
                    return Err(Error::Domain(format!("potential pole at x = {}", x)));
                }
                let mut num = Complex::with_val(wp, 1);
                for ai in &self.a {
                    num *= Complex::with_val(wp, 1u32 - Complex::with_val(wp, ai * &eix));
                }
                Ok(num / den)
            }
        }
    }

    /// The star-conjugated potential `V*(x) = conj(V(conj x))`.
    pub fn potential_star(&self, x: &Complex) -> Result<Complex> {
        Ok(conj(&self.potential(&conj(x))?))
    }

    /// The eigenvalue `E_n` (real for conjugation-closed parameters).
    pub fn energy(&self, n: u32) -> Float {
        let wp = self.wp();
        match self.family {
            Family::Wilson => {
                let b1 = self.b1();
                let e = Complex::with_val(
                    wp,
                    Complex::with_val(wp, &b1 + &Float::with_val(wp, n as i64 - 1)) * n,
                );
                e.real().clone()
            }
            Family::AskeyWilson => {
                let q = self.q.as_ref().unwrap();
                let b4 = self.b4();
                let qn = Float::with_val(wp, q.clone().pow(-(n as i32)));
                let qn1 = Float::with_val(wp, q.clone().pow(n as i32 - 1));
                let e = Complex::with_val(
                    wp,
                    Complex::with_val(wp, 1u32 - Complex::with_val(wp, &b4 * &qn1))
                        * (qn - 1u32),
                );
                e.real().clone()
            }
        }
    }

    /// The forward factor `f_n` with `E_n = f_n b_{n-1}`.
    pub fn factor_f(&self, n: u32) -> Float {
        let wp = self.wp();
        match self.family {
            Family::Wilson => -self.energy(n),
            Family::AskeyWilson => {
                let sq = self.q.as_ref().unwrap().clone().sqrt();
                Float::with_val(wp, sq.pow(n as i32)) * self.energy(n)
            }
        }
    }

    /// The backward factor `b_{n-1}`, indexed by `n`.
    pub fn factor_b(&self, n: u32) -> Float {
        let wp = self.wp();
        match self.family {
            Family::Wilson => Float::with_val(wp, -1),
            Family::AskeyWilson => {
                let sq = self.q.as_ref().unwrap().clone().sqrt();
                Float::with_val(wp, sq.pow(-(n as i32)))
            }
        }
    }

    /// The degree-`n` polynomial eigenfunction evaluated at a complex
    /// point `x` by its terminating hypergeometric series. The series
    /// is anchored at one of the four parameters; since the polynomial
    /// is symmetric in all of them, each anchor is tried in turn so a
    /// removable vanishing denominator at one anchor is avoided.
    pub fn polynomial_value(&self, n: u32, x: &Complex) -> Result<Complex> {
        let mut last = None;
        for anchor in 0..4 {
            match self.polynomial_value_anchored(n, x, anchor) {
                Ok(v) => return Ok(v),
                Err(e) => last = Some(e),
            }
        }
        Err(last.unwrap())
    }

    fn polynomial_value_anchored(&self, n: u32, x: &Complex, anchor: usize) -> Result<Complex> {
        let wp = self.wp();
        let a: Vec<&Complex> = (0..4).map(|i| &self.a[(anchor + i) % 4]).collect();
        match self.family {
            Family::Wilson => {
                let ix = Complex::with_val(wp, x * &Complex::with_val(wp, (0, 1)));
                let b1 = self.b1();
                let (a1, a2, a3, a4) = (a[0], a[1], a[2], a[3]);
                let mut pre = Complex::with_val(wp, 1);
                for pair in [
                    Complex::with_val(wp, a1 + a2),
                    Complex::with_val(wp, a1 + a3),
                    Complex::with_val(wp, a1 + a4),
                ] {
                    pre *= pochhammer(&pair, n, self.prec);
                }
                let mut sum = Complex::with_val(wp, 0);
                let mut term = Complex::with_val(wp, 1);
                for k in 0..=n {
                    sum += &term;
                    if k == n {
                        break;
                    }
                    let kf = Float::with_val(wp, k);
                    let num = Complex::with_val(wp, &kf - &Float::with_val(wp, n))
                        * Complex::with_val(
                            wp,
                            Complex::with_val(wp, &b1 + &kf) + Float::with_val(wp, n as i64 - 1),
                        )
                        * Complex::with_val(wp, Complex::with_val(wp, a1 + &ix) + &kf)
                        * Complex::with_val(wp, Complex::with_val(wp, a1 - &ix) + &kf);
                    let den = Complex::with_val(wp, Complex::with_val(wp, a1 + a2) + &kf)
                        * Complex::with_val(wp, Complex::with_val(wp, a1 + a3) + &kf)
                        * Complex::with_val(wp, Complex::with_val(wp, a1 + a4) + &kf)
                        * Complex::with_val(wp, &kf + 1u32);
                    let den = Complex::with_val(wp, den);
                    if cabs(&den).is_zero() {
                        return Err(Error::InvalidParams(format!(
                            "series denominator vanishes at term {} of degree {}",
                            k + 1,
                            n
                        )));
                    }
                    term *= Complex::with_val(wp, num);
                    term /= den;
                }
                Ok(pre * sum)
            }
            Family::AskeyWilson => {
                let q = self.q.as_ref().unwrap();
                let eix = Complex::with_val(wp, x * &Complex::with_val(wp, (0, 1))).exp();
                let emix = Complex::with_val(wp, eix.clone().recip());
                let b4 = self.b4();
                let (a1, a2, a3, a4) = (a[0], a[1], a[2], a[3]);
                let mut pre = Complex::with_val(wp, Complex::with_val(wp, a1).pow(-(n as i32)));
                for pair in [
                    Complex::with_val(wp, a1 * a2),
                    Complex::with_val(wp, a1 * a3),
                    Complex::with_val(wp, a1 * a4),
                ] {
                    pre *= qpochhammer(&pair, q, n, self.prec);
                }
                let q_pow_minus_n = Float::with_val(wp, q.clone().pow(-(n as i32)));
                let q_pow_n1 = Float::with_val(wp, q.clone().pow(n as i32 - 1));
                let mut sum = Complex::with_val(wp, 0);
                let mut term = Complex::with_val(wp, 1);
                let mut qk = Float::with_val(wp, 1); // q^k
                for k in 0..=n {
                    sum += &term;
                    if k == n {
                        break;
                    }
                    let f1 = Complex::with_val(wp, 1u32 - Float::with_val(wp, &q_pow_minus_n * &qk));
                    let f2 = Complex::with_val(
                        wp,
                        1u32 - Complex::with_val(wp, &b4 * &Float::with_val(wp, &q_pow_n1 * &qk)),
                    );
                    let f3 = Complex::with_val(
                        wp,
                        1u32 - Complex::with_val(wp, Complex::with_val(wp, a1 * &eix) * &qk),
                    );
                    let f4 = Complex::with_val(
                        wp,
                        1u32 - Complex::with_val(wp, Complex::with_val(wp, a1 * &emix) * &qk),
                    );
                    let d1 = Complex::with_val(
                        wp,
                        1u32 - Complex::with_val(wp, Complex::with_val(wp, a1 * a2) * &qk),
                    );
                    let d2 = Complex::with_val(
                        wp,
                        1u32 - Complex::with_val(wp, Complex::with_val(wp, a1 * a3) * &qk),
                    );
                    let d3 = Complex::with_val(
                        wp,
                        1u32 - Complex::with_val(wp, Complex::with_val(wp, a1 * a4) * &qk),
                    );
                    let d4 = Complex::with_val(wp, 1u32 - Float::with_val(wp, &qk * q));
                    let den = Complex::with_val(wp, d1 * d2 * d3 * d4);
                    if cabs(&den).is_zero() {
                        return Err(Error::InvalidParams(format!(
                            "q-series denominator vanishes at term {} of degree {}",
                            k + 1,
                            n
                        )));
                    }
                    term *= Complex::with_val(wp, f1 * f2 * f3 * f4);
                    term /= den;
                    term *= q;
                    qk *= q;
                }
                Ok(pre * sum)
            }
        }
    }

    /// The closed-form leading coefficient `c_n` of the degree-`n`
    /// polynomial in the sinusoidal coordinate.
    pub fn leading_c(&self, n: u32) -> Float {
        let wp = self.wp();
        match self.family {
            Family::Wilson => {
                let b1 = self.b1();
                let base = Complex::with_val(
                    wp,
                    Complex::with_val(wp, &b1 + &Float::with_val(wp, n as i64 - 1)),
                );
                let p = pochhammer(&base, n, self.prec);
                let sign = if n % 2 == 0 { 1i32 } else { -1i32 };
                Float::with_val(wp, p.real() * sign)
            }
            Family::AskeyWilson => {
                let q = self.q.as_ref().unwrap();
                let b4 = self.b4();
                let arg = Complex::with_val(wp, &b4 * &Float::with_val(wp, q.clone().pow(n as i32 - 1)));
                let p = qpochhammer(&arg, q, n, self.prec);
                Float::with_val(wp, p.real() * &Float::with_val(wp, 1u32 << n))
            }
        }
    }

    /// Builds the degree-`n` polynomial in coefficient form by sampling
    /// the series on the real axis and interpolating in the sinusoidal
    /// coordinate.
    pub fn polynomial(&self, n: u32) -> Result<RealEtaPoly> {
        poly_from_samples(self, n as usize, |x| self.polynomial_value(n, x))
    }

    /// The squared ground-state weight `phi_0(x)^2` at a complex point.
    pub fn phi0_sq(&self, x: &Complex) -> Result<Complex> {
        let wp = self.wp();
        let i = Complex::with_val(wp, (0, 1));
        let ix = Complex::with_val(wp, x * &i);
        match self.family {
            Family::Wilson => {
                let two_ix = Complex::with_val(wp, &ix * 2u32);
                let g_num = {
                    let mut p = Complex::with_val(wp, 1);
                    for ai in &self.a {
                        p *= gamma(&Complex::with_val(wp, ai + &ix), self.prec)?;
                        p *= gamma(&Complex::with_val(wp, ai - &ix), self.prec)?;
                    }
                    p
                };
                let g_den = gamma(&two_ix, self.prec)?
                    * gamma(&Complex::with_val(wp, -two_ix.clone()), self.prec)?;
                Ok(g_num / g_den)
            }
            Family::AskeyWilson => {
                let q = self.q.as_ref().unwrap();
                let eix = ix.clone().exp();
                let emix = Complex::with_val(wp, eix.clone().recip());
                let e2ix = Complex::with_val(wp, eix.clone().square());
                let em2ix = Complex::with_val(wp, emix.clone().square());
                let mut v = qpochhammer_inf(&e2ix, q, self.prec)?
                    * qpochhammer_inf(&em2ix, q, self.prec)?;
                for ai in &self.a {
                    v /= qpochhammer_inf(&Complex::with_val(wp, ai * &eix), q, self.prec)?;
                    v /= qpochhammer_inf(&Complex::with_val(wp, ai * &emix), q, self.prec)?;
                }
                Ok(Complex::with_val(wp, v))
            }
        }
    }

    /// The ground-state weight `phi_0(x) = sqrt(phi_0(x)^2)` at a real
    /// point in the physical interval, where it is real and positive.
    pub fn phi0(&self, x: &Float) -> Result<Float> {
        let wp = self.wp();
        let v = self.phi0_sq(&creal(self.prec, x))?;
        let scale = cabs(&v);
        if !scale.is_zero() {
            let imag_ratio = Float::with_val(wp, v.imag() / &scale).abs();
            if imag_ratio > two_pow(self.prec, -(self.prec.bits() as i64 - 48)) {
                return Err(Error::Domain(format!(
                    "phi_0^2 not real at x = {} (imag ratio {:e})",
                    x,
                    imag_ratio.to_f64()
                )));
            }
        }
        if *v.real() < 0f64 {
            return Err(Error::Domain(format!("phi_0^2 negative at x = {}", x)));
        }
        Ok(v.real().clone().sqrt())
    }

    /// Analytic continuation of `phi_0` from the real axis to a complex
    /// point, stepping vertically and choosing the square-root branch
    /// continuously.
    pub fn phi0_analytic(&self, x: &Complex) -> Result<Complex> {
        let wp = self.wp();
        let x_re = x.real().clone();
        let im = x.imag().clone();
        let mut current = creal(self.prec, &self.phi0(&x_re)?);
        if im.is_zero() {
            return Ok(current);
        }
        let steps = (im.clone().abs().to_f64() / 0.08).ceil().max(1.0) as u32;
        for k in 1..=steps {
            let frac = Float::with_val(wp, k) / steps;
            let z = Complex::with_val(wp, (&x_re, &Float::with_val(wp, &im * &frac)));
            let s = self.phi0_sq(&z)?.sqrt();
            let neg = Complex::with_val(wp, -s.clone());
            let d_pos = cabs(&Complex::with_val(wp, &s - &current));
            let d_neg = cabs(&Complex::with_val(wp, &neg - &current));
            current = if d_pos <= d_neg { s } else { neg };
        }
        Ok(current)
    }

    /// The closed-form squared norm `h_n` of the `n`-th eigenfunction.
    pub fn norm_h(&self, n: u32) -> Result<Float> {
        let wp = self.wp();
        let two_pi = pi(self.prec) * 2u32;
        let v: Complex = match self.family {
            Family::Wilson => {
                let b1 = self.b1();
                let nb = Complex::with_val(wp, &b1 + &Float::with_val(wp, n as i64 - 1));
                let mut v = Complex::with_val(wp, &two_pi * &Float::with_val(wp, Float::factorial(n)));
                v *= pochhammer(&nb, n, self.prec);
                for i in 0..4 {
                    for j in (i + 1)..4 {
                        let arg = Complex::with_val(
                            wp,
                            Complex::with_val(wp, &self.a[i] + &self.a[j]) + &Float::with_val(wp, n),
                        );
                        v *= gamma(&arg, self.prec)?;
                    }
                }
                let arg = Complex::with_val(wp, &b1 + &Float::with_val(wp, 2 * n));
                v /= gamma(&arg, self.prec)?;
                v
            }
            Family::AskeyWilson => {
                let q = self.q.as_ref().unwrap();
                let b4 = self.b4();
                let mut v = Complex::with_val(wp, &two_pi + &Float::with_val(wp, 0));
                let arg1 = Complex::with_val(wp, &b4 * &Float::with_val(wp, q.clone().pow(n as i32 - 1)));
                v *= qpochhammer(&arg1, q, n, self.prec);
                let arg2 = Complex::with_val(wp, &b4 * &Float::with_val(wp, q.clone().pow(2 * n as i32)));
                v *= qpochhammer_inf(&arg2, q, self.prec)?;
                let argq = creal(self.prec, &Float::with_val(wp, q.clone().pow(n as i32 + 1)));
                v /= qpochhammer_inf(&argq, q, self.prec)?;
                for i in 0..4 {
                    for j in (i + 1)..4 {
                        let arg = Complex::with_val(
                            wp,
                            Complex::with_val(wp, &self.a[i] * &self.a[j])
                                * &Float::with_val(wp, q.clone().pow(n as i32)),
                        );
                        v /= qpochhammer_inf(&arg, q, self.prec)?;
                    }
                }
                v
            }
        };
        let scale = cabs(&v);
        if !scale.is_zero() {
            let r = Float::with_val(wp, v.imag() / &scale).abs();
            if r > two_pow(self.prec, -(self.prec.bits() as i64 - 48)) {
                return Err(Error::Domain(format!(
                    "norm h_{} not real (imag ratio {:e})",
                    n,
                    r.to_f64()
                )));
            }
        }
        Ok(v.real().clone())
    }

    /// Real sampling abscissas inside the physical interval, used for
    /// interpolation in the sinusoidal coordinate.
    pub fn sample_points(&self, count: usize) -> Vec<Float> {
        let wp = self.wp();
        match self.family {
            Family::Wilson => (0..count)
                .map(|i| Float::with_val(wp, 0.3 + 0.35 * i as f64))
                .collect(),
            Family::AskeyWilson => {
                let lo = Float::with_val(wp, 0.2);
                let span = pi(self.prec) - Float::with_val(wp, 0.4);
                (0..count)
                    .map(|i| {
                        let frac = if count > 1 {
                            i as f64 / (count as f64 - 1.0)
                        } else {
                            0.0
                        };
                        Float::with_val(wp, &lo + &Float::with_val(wp, &span * &Float::with_val(wp, frac)))
                    })
                    .collect()
            }
        }
    }

    /// Applies the forward shift operator to a polynomial at this
    /// parameter point; the result is a polynomial at `lambda + delta` of
    /// one lower degree.
    pub fn forward_shift(&self, p: &RealEtaPoly) -> Result<RealEtaPoly> {
        let wp = self.wp();
        let g = self.gamma_shift();
        let half = Complex::with_val(wp, (&Float::with_val(wp, 0), &Float::with_val(wp, &g / 2u32)));
        let i_unit = Complex::with_val(wp, (0, 1));
        let deg = p.degree().saturating_sub(1);
        poly_from_samples(self, deg, |x| {
            let xm = Complex::with_val(wp, x - &half);
            let xp = Complex::with_val(wp, x + &half);
            let num = Complex::with_val(
                wp,
                self.eval_eta_poly(p, &xm) - self.eval_eta_poly(p, &xp),
            );
            let phi = self.varphi(x);
            if cabs(&phi).is_zero() {
                return Err(Error::Domain("varphi vanishes at sample point".into()));
            }
            Ok(Complex::with_val(wp, &i_unit * &num) / phi)
        })
    }

    /// Applies the backward shift operator to a polynomial at
    /// `lambda + delta`; the result is a polynomial at this parameter
    /// point of one higher degree.
    pub fn backward_shift(&self, p: &RealEtaPoly) -> Result<RealEtaPoly> {
        let wp = self.wp();
        let g = self.gamma_shift();
        let half = Complex::with_val(wp, (&Float::with_val(wp, 0), &Float::with_val(wp, &g / 2u32)));
        let i_unit = Complex::with_val(wp, (0, 1));
        let deg = p.degree() + 1;
        poly_from_samples(self, deg, |x| {
            let xm = Complex::with_val(wp, x - &half);
            let xp = Complex::with_val(wp, x + &half);
            let v = self.potential(x)?;
            let vs = self.potential_star(x)?;
            let left = Complex::with_val(
                wp,
                v * Complex::with_val(wp, self.varphi(&xm) * self.eval_eta_poly(p, &xm)),
            );
            let right = Complex::with_val(
                wp,
                vs * Complex::with_val(wp, self.varphi(&xp) * self.eval_eta_poly(p, &xp)),
            );
            let diff = Complex::with_val(wp, left - right);
            Ok(Complex::with_val(wp, -(Complex::with_val(wp, &i_unit * &diff))))
        })
    }

    /// Applies the square-root-free difference operator to a polynomial at
    /// this parameter point (degree preserved; eigenpolynomials are
    /// reproduced times `E_n`).
    pub fn apply_htilde(&self, p: &RealEtaPoly) -> Result<RealEtaPoly> {
        let wp = self.wp();
        let g = self.gamma_shift();
        let full = Complex::with_val(wp, (&Float::with_val(wp, 0), &g));
        poly_from_samples(self, p.degree(), |x| {
            let xm = Complex::with_val(wp, x - &full);
            let xp = Complex::with_val(wp, x + &full);
            let here = self.eval_eta_poly(p, x);
            let v = self.potential(x)?;
            let vs = self.potential_star(x)?;
            let t1 = Complex::with_val(
                wp,
                v * Complex::with_val(wp, self.eval_eta_poly(p, &xm) - &here),
            );
            let t2 = Complex::with_val(
                wp,
                vs * Complex::with_val(wp, self.eval_eta_poly(p, &xp) - &here),
            );
            Ok(t1 + t2)
        })
    }

    /// Evaluates a polynomial in the sinusoidal coordinate at a complex
    /// `x`-point.
    pub fn eval_eta_poly(&self, p: &RealEtaPoly, x: &Complex) -> Complex {
        p.eval_complex(&self.eta(x))
    }
}

/// Samples a complex-valued function at real abscissas, checks the values
/// are real to working tolerance, and interpolates a polynomial of the
/// given degree in the sinusoidal coordinate (two held-out nodes).
pub fn poly_from_samples<F>(params: &FamilyParams, degree: usize, f: F) -> Result<RealEtaPoly>
where
    F: Fn(&Complex) -> Result<Complex>,
{
    let wp = params.prec.bits() + 32;
    let count = degree + 3;
    let xs = params.sample_points(count);
    let mut nodes = Vec::with_capacity(count);
    let mut max_abs = Float::with_val(wp, 0);
    let mut raw = Vec::with_capacity(count);
    for x in &xs {
        let xc = creal(params.prec, x);
        let y = f(&xc)?;
        let m = cabs(&y);
        if m > max_abs {
            max_abs = m;
        }
        let t = params.eta(&xc).real().clone();
        raw.push((t, y));
    }
    let imag_tol = Float::with_val(
        wp,
        &max_abs.clone().max(&Float::with_val(wp, 1e-300))
            * &two_pow(params.prec, -(params.prec.bits() as i64 - 40)),
    );
    for (t, y) in raw {
        if y.imag().clone().abs() > imag_tol {
            return Err(Error::Domain(format!(
                "sampled value has non-negligible imaginary part {:e} at eta = {}",
                y.imag().to_f64(),
                t
            )));
        }
        nodes.push((t, y.real().clone()));
    }
    interpolate(&nodes, degree, params.prec)
}
