//! Dense real-coefficient polynomials in the sinusoidal coordinate, built
//! by Newton divided-difference interpolation with held-out residual
//! checks, plus zero counting on real intervals (sign scan) and in complex
//! rectangles (argument-principle winding with adaptive boundary tracking).

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::num::{cabs, two_pow, Precision};

/// A polynomial with real coefficients, stored dense in ascending order.
///
/// The variable is the sinusoidal coordinate eta(x) of a family, so these
/// represent the polynomial parts of eigenfunctions and denominators.
#[derive(Clone, Debug)]
pub struct RealEtaPoly {
    coeffs: Vec<Float>,
    degenerate: bool,
}

impl RealEtaPoly {
    /// Builds from ascending coefficients; flags a degenerate leading
    /// coefficient (|leading| < 2^(-bits/2) * max |coeff|) instead of
    /// silently trimming it.
    pub fn new(coeffs: Vec<Float>, p: Precision) -> Self {
        assert!(!coeffs.is_empty(), "polynomial needs at least one coefficient");
        let scale = coeffs
            .iter()
            .fold(Float::with_val(p.bits(), 0), |m, c| m.max(&c.clone().abs()));
        let lead = coeffs.last().unwrap().clone().abs();
        let degenerate = !scale.is_zero()
            && lead < scale * two_pow(p, -((p.bits() / 2) as i64));
        Self { coeffs, degenerate }
    }

    /// The constant zero polynomial.
    pub fn zero(p: Precision) -> Self {
        Self {
            coeffs: vec![Float::with_val(p.bits(), 0)],
            degenerate: false,
        }
    }

    /// Nominal degree (length of the coefficient vector minus one).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of the `i`-th power (zero beyond the stored degree).
    pub fn coeff(&self, i: usize) -> Float {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| Float::with_val(self.coeffs[0].prec(), 0))
    }

    /// All coefficients, ascending.
    pub fn coeffs(&self) -> &[Float] {
        &self.coeffs
    }

    /// The stored leading coefficient.
    pub fn leading(&self) -> &Float {
        self.coeffs.last().unwrap()
    }

    /// Whether the leading coefficient was below the degeneracy threshold.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Largest coefficient magnitude; the natural scale for tolerances.
    pub fn max_abs_coeff(&self) -> Float {
        self.coeffs
            .iter()
            .fold(Float::with_val(self.coeffs[0].prec(), 0), |m, c| {
                m.max(&c.clone().abs())
            })
    }

    /// Horner evaluation at a complex point.
    pub fn eval_complex(&self, z: &Complex) -> Complex {
        let prec = z.prec().0.max(self.coeffs[0].prec());
        let mut acc = Complex::with_val(prec, 0);
        for c in self.coeffs.iter().rev() {
            acc *= z;
            acc += c;
        }
        acc
    }

    /// Horner evaluation at a real point.
    pub fn eval_real(&self, t: &Float) -> Float {
        let prec = t.prec().max(self.coeffs[0].prec());
        let mut acc = Float::with_val(prec, 0);
        for c in self.coeffs.iter().rev() {
            acc *= t;
            acc += c;
        }
        acc
    }

    /// Coefficient-wise maximum distance to another polynomial.
    pub fn max_coeff_distance(&self, other: &Self) -> Float {
        let prec = self.coeffs[0].prec().max(other.coeffs[0].prec());
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut m = Float::with_val(prec, 0);
        for i in 0..n {
            let d = Float::with_val(prec, self.coeff(i) - other.coeff(i)).abs();
            m = m.max(&d);
        }
        m
    }

    /// Multiplies every coefficient by a real scalar.
    pub fn scaled(&self, c: &Float) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|a| Float::with_val(a.prec(), a * c))
                .collect(),
            degenerate: self.degenerate,
        }
    }

    /// Coefficient-wise difference `self - other`.
    pub fn sub(&self, other: &Self, p: Precision) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| Float::with_val(p.bits(), self.coeff(i) - other.coeff(i)))
            .collect();
        RealEtaPoly::new(coeffs, p)
    }
}

/// Interpolates a polynomial of the given degree through real samples
/// `(t_i, y_i)`.
///
/// The first `degree + 1` nodes define the polynomial (Newton divided
/// differences, converted to monomial coefficients); every remaining node
/// is held out and must be reproduced to `2^-(bits-32)` relative to the
/// sample scale, otherwise [`Error::InterpolationFailed`] is returned.
pub fn interpolate(nodes: &[(Float, Float)], degree: usize, p: Precision) -> Result<RealEtaPoly> {
    let needed = degree + 1;
    if nodes.len() < needed {
        return Err(Error::InterpolationFailed(format!(
            "need at least {} nodes for degree {}, got {}",
            needed,
            degree,
            nodes.len()
        )));
    }
    let wp = p.bits() + 32;
    let scale = nodes.iter().fold(Float::with_val(wp, 0), |m, (_, y)| {
        m.max(&y.clone().abs())
    });

    // Distinctness guard on the fit nodes.
    for i in 0..needed {
        for j in (i + 1)..needed {
            let d = Float::with_val(wp, &nodes[i].0 - &nodes[j].0).abs();
            if d < two_pow(p, -(p.bits() as i64 / 2)) {
                return Err(Error::IllConditioned(format!(
                    "interpolation nodes {} and {} nearly coincide",
                    i, j
                )));
            }
        }
    }

    // Divided-difference table on the fit nodes.
    let ts: Vec<Float> = nodes[..needed]
        .iter()
        .map(|(t, _)| Float::with_val(wp, t))
        .collect();
    let mut dd: Vec<Float> = nodes[..needed]
        .iter()
        .map(|(_, y)| Float::with_val(wp, y))
        .collect();
    for level in 1..needed {
        for i in (level..needed).rev() {
            let num = Float::with_val(wp, &dd[i] - &dd[i - 1]);
            let den = Float::with_val(wp, &ts[i] - &ts[i - level]);
            dd[i] = num / den;
        }
    }

    // Newton form -> monomial coefficients.
    let mut coeffs = vec![Float::with_val(wp, 0); needed];
    let mut basis = vec![Float::with_val(wp, 0); needed]; // prod_{j<k} (t - t_j)
    basis[0] = Float::with_val(wp, 1);
    let mut basis_len = 1usize;
    for (k, d) in dd.iter().enumerate() {
        for i in 0..basis_len {
            coeffs[i] += Float::with_val(wp, d * &basis[i]);
        }
        if k + 1 < needed {
            // basis *= (t - t_k)
            let tk = ts[k].clone();
            let mut next = vec![Float::with_val(wp, 0); basis_len + 1];
            for i in 0..basis_len {
                next[i + 1] += &basis[i];
                next[i] -= Float::with_val(wp, &basis[i] * &tk);
            }
            basis_len += 1;
            basis = next;
        }
    }

    let poly = RealEtaPoly::new(
        coeffs
            .into_iter()
            .map(|c| Float::with_val(p.bits(), c))
            .collect(),
        p,
    );

    // Held-out residual check.
    let tol = Float::with_val(wp, &scale * &two_pow(p, -(p.bits() as i64 - 32)));
    for (t, y) in &nodes[needed..] {
        let r = Float::with_val(wp, poly.eval_real(t) - y).abs();
        if r > tol {
            return Err(Error::InterpolationFailed(format!(
                "held-out residual {:e} exceeds tolerance {:e} at t = {}",
                r.to_f64(),
                tol.to_f64(),
                t
            )));
        }
    }
    Ok(poly)
}

/// Counts sign changes of `poly` on the open interval `(a, b)`.
///
/// Orthogonal-polynomial zeros are simple, so a refining sign scan counts
/// them exactly once the grid resolves every zero; the grid is doubled
/// until the count stabilizes and cannot exceed the degree.
pub fn count_real_zeros(
    poly: &RealEtaPoly,
    a: &Float,
    b: &Float,
    p: Precision,
) -> Result<usize> {
    let wp = p.bits();
    let scale = poly.max_abs_coeff();
    if scale.is_zero() {
        return Err(Error::Degenerate("zero polynomial in zero scan".into()));
    }
    let mut n = 256usize.max(4 * poly.degree().max(1));
    let mut last: Option<usize> = None;
    let mut streak = 0usize;
    for _ in 0..10 {
        let mut count = 0usize;
        let mut prev_sign = 0i8;
        let mut ambiguous = false;
        for i in 0..=n {
            // Slightly irrational offset keeps grid points off symmetric zeros.
            let frac = (i as f64 + 0.318_309_886_183_790_7 / (n as f64)) / (n as f64 + 1.0);
            let t = Float::with_val(wp, b - a) * frac + a;
            let v = poly.eval_real(&t);
            let tiny = Float::with_val(wp, &scale * &two_pow(p, -(wp as i64 - 16)));
            if v.clone().abs() < tiny {
                ambiguous = true;
                break;
            }
            let s = if v > 0f64 { 1i8 } else { -1i8 };
            if prev_sign != 0 && s != prev_sign {
                count += 1;
            }
            prev_sign = s;
        }
        if !ambiguous {
            if last == Some(count) {
                streak += 1;
                if streak >= 2 && count <= poly.degree() {
                    return Ok(count);
                }
            } else {
                streak = 0;
            }
            last = Some(count);
        }
        n *= 2;
    }
    Err(Error::Domain(
        "real-zero count did not stabilize under grid refinement".into(),
    ))
}

/// An axis-aligned rectangle in the complex plane.
#[derive(Clone, Debug)]
pub struct Rectangle {
    pub re_min: Float,
    pub re_max: Float,
    pub im_min: Float,
    pub im_max: Float,
}

/// Counts zeros of `f` (with multiplicity) inside a rectangle by the
/// argument principle.
///
/// The boundary is traversed counterclockwise with adaptive sampling:
/// every segment is split until the phase change across it is below pi/2,
/// so the accumulated winding is unambiguous. Fails with
/// [`Error::BoundaryZero`] if `|f|` on the boundary falls below
/// `2^-(bits/2)` of the largest boundary magnitude, and with
/// [`Error::NonIntegerWinding`] if the total is not near an integer.
pub fn count_zeros_rectangle<F>(f: F, rect: &Rectangle, p: Precision) -> Result<i64>
where
    F: Fn(&Complex) -> Result<Complex>,
{
    let wp = p.bits();
    let mk = |re: &Float, im: &Float| Complex::with_val(wp, (re, im));
    let corners = [
        mk(&rect.re_min, &rect.im_min),
        mk(&rect.re_max, &rect.im_min),
        mk(&rect.re_max, &rect.im_max),
        mk(&rect.re_min, &rect.im_max),
    ];

    let pi_f = Float::with_val(wp, rug::float::Constant::Pi);
    let half_pi = Float::with_val(wp, &pi_f / 2u32);
    let mut total = Float::with_val(wp, 0);
    let mut min_mag = Float::with_val(wp, rug::float::Special::Infinity);
    let mut max_mag = Float::with_val(wp, 0);

    let eval = |z: &Complex, min_mag: &mut Float, max_mag: &mut Float| -> Result<Complex> {
        let v = f(z)?;
        let m = cabs(&v);
        if m < *min_mag {
            *min_mag = m.clone();
        }
        if m > *max_mag {
            *max_mag = m;
        }
        Ok(v)
    };

    // Phase change along one segment, subdividing until each piece turns
    // by less than pi/2.
    fn segment<F>(
        f: &F,
        eval: &dyn Fn(&Complex, &mut Float, &mut Float) -> Result<Complex>,
        z1: &Complex,
        v1: &Complex,
        z2: &Complex,
        v2: &Complex,
        half_pi: &Float,
        depth: u32,
        min_mag: &mut Float,
        max_mag: &mut Float,
    ) -> Result<Float>
    where
        F: Fn(&Complex) -> Result<Complex>,
    {
        let wp = z1.prec().0;
        let ratio = Complex::with_val(wp, v2 / v1);
        let d = ratio.imag().clone().atan2(ratio.real());
        if d.clone().abs() < *half_pi {
            return Ok(d);
        }
        if depth == 0 {
            return Err(Error::BoundaryZero(
                "phase step would not settle below pi/2; zero likely on contour".into(),
            ));
        }
        let mut zm = Complex::with_val(wp, z1 + z2);
        zm /= 2u32;
        let vm = eval(&zm, min_mag, max_mag)?;
        let a = segment(f, eval, z1, v1, &zm, &vm, half_pi, depth - 1, min_mag, max_mag)?;
        let b = segment(f, eval, &zm, &vm, z2, v2, half_pi, depth - 1, min_mag, max_mag)?;
        Ok(a + b)
    }

    for side in 0..4 {
        let z_start = &corners[side];
        let z_end = &corners[(side + 1) % 4];
        let n = 32u32;
        let mut prev_z = z_start.clone();
        let mut prev_v = eval(&prev_z, &mut min_mag, &mut max_mag)?;
        for i in 1..=n {
            let t = Float::with_val(wp, i) / n;
            let step = Complex::with_val(wp, z_end - z_start);
            let z = Complex::with_val(wp, z_start + step * &t);
            let v = eval(&z, &mut min_mag, &mut max_mag)?;
            total += segment(
                &f, &eval, &prev_z, &prev_v, &z, &v, &half_pi, 48, &mut min_mag, &mut max_mag,
            )?;
            prev_z = z;
            prev_v = v;
        }
    }

    if !max_mag.is_zero() {
        let floor = Float::with_val(wp, &max_mag * &two_pow(p, -((wp / 2) as i64)));
        if min_mag < floor {
            return Err(Error::BoundaryZero(format!(
                "minimum boundary magnitude {:e} below {:e}",
                min_mag.to_f64(),
                floor.to_f64()
            )));
        }
    }

    let winding = Float::with_val(wp, &total / &(Float::with_val(wp, &pi_f * 2u32)));
    let rounded = winding.clone().round();
    let err = Float::with_val(wp, &winding - &rounded).abs();
    if err > 0.25f64 {
        return Err(Error::NonIntegerWinding(format!(
            "winding {} not near an integer",
            winding.to_f64()
        )));
    }
    Ok(rounded.to_f64() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{cplx, float};

    fn p256() -> Precision {
        Precision::new(256).unwrap()
    }

    fn poly_from_f64(cs: &[f64], p: Precision) -> RealEtaPoly {
        RealEtaPoly::new(cs.iter().map(|c| float(p, *c)).collect(), p)
    }

    #[test]
    fn horner_matches_direct() {
        let p = p256();
        // 2 - 3t + t^3
        let poly = poly_from_f64(&[2.0, -3.0, 0.0, 1.0], p);
        let t = float(p, 1.5);
        let want = 2.0 - 3.0 * 1.5 + 1.5f64.powi(3);
        assert!((poly.eval_real(&t) - want).abs() < 1e-12);
        let z = cplx(p, 0.5, 0.25);
        let direct = {
            let z3 = z.clone() * &z * &z;
            let mut acc = cplx(p, 2.0, 0.0);
            acc -= z.clone() * 3u32;
            acc += z3;
            acc
        };
        let diff = cabs(&Complex::with_val(256, poly.eval_complex(&z) - direct));
        assert!(diff < 1e-60);
    }

    #[test]
    fn interpolation_recovers_exact_polynomial() {
        let p = p256();
        let target = poly_from_f64(&[1.0, -2.0, 0.5, 3.0, -0.25], p);
        let nodes: Vec<(Float, Float)> = (0..8)
            .map(|i| {
                let t = float(p, 0.3 + 0.37 * i as f64);
                let y = target.eval_real(&t);
                (t, y)
            })
            .collect();
        let got = interpolate(&nodes, 4, p).unwrap();
        let d = got.max_coeff_distance(&target);
        assert!(d < float(p, 1e-60), "coeff distance {}", d);
        assert!(!got.is_degenerate());
    }

    #[test]
    fn interpolation_rejects_non_polynomial_data() {
        let p = p256();
        let nodes: Vec<(Float, Float)> = (0..7)
            .map(|i| {
                let t = float(p, 0.2 + 0.4 * i as f64);
                let y = t.clone().sin();
                (t, y)
            })
            .collect();
        assert!(matches!(
            interpolate(&nodes, 3, p),
            Err(Error::InterpolationFailed(_))
        ));
    }

    #[test]
    fn interpolation_rejects_coincident_nodes() {
        let p = p256();
        let nodes = vec![
            (float(p, 1.0), float(p, 2.0)),
            (float(p, 1.0), float(p, 2.0)),
            (float(p, 3.0), float(p, 4.0)),
        ];
        assert!(matches!(
            interpolate(&nodes, 2, p),
            Err(Error::IllConditioned(_))
        ));
    }

    #[test]
    fn degenerate_leading_coefficient_flagged() {
        let p = p256();
        let mut cs = vec![float(p, 1.0), float(p, 2.0)];
        cs.push(float(p, 1e-60));
        let poly = RealEtaPoly::new(cs, p);
        assert!(poly.is_degenerate());
    }

    #[test]
    fn real_zero_count_quartic() {
        let p = p256();
        // (t^2 - 1)(t^2 - 4) = t^4 - 5 t^2 + 4: zeros 1, 2 inside (0, 3)
        let poly = poly_from_f64(&[4.0, 0.0, -5.0, 0.0, 1.0], p);
        let n = count_real_zeros(&poly, &float(p, 0.0), &float(p, 3.0), p).unwrap();
        assert_eq!(n, 2);
        let all = count_real_zeros(&poly, &float(p, -3.0), &float(p, 3.0), p).unwrap();
        assert_eq!(all, 4);
    }

    #[test]
    fn rectangle_count_polynomial_zeros() {
        let p = p256();
        let f = |z: &Complex| -> Result<Complex> {
            // zeros at 0.5 + 0.2i and -0.3 - 0.1i
            let z1 = Complex::with_val(256, z - &cplx(p, 0.5, 0.2));
            let z2 = Complex::with_val(256, z - &cplx(p, -0.3, -0.1));
            Ok(z1 * z2)
        };
        let rect = Rectangle {
            re_min: float(p, -1.0),
            re_max: float(p, 1.0),
            im_min: float(p, -1.0),
            im_max: float(p, 1.0),
        };
        assert_eq!(count_zeros_rectangle(f, &rect, p).unwrap(), 2);

        let rect_right = Rectangle {
            re_min: float(p, 0.0),
            re_max: float(p, 1.0),
            im_min: float(p, -1.0),
            im_max: float(p, 1.0),
        };
        assert_eq!(count_zeros_rectangle(f, &rect_right, p).unwrap(), 1);
    }

    #[test]
    fn rectangle_count_no_zeros() {
        let p = p256();
        let f = |z: &Complex| -> Result<Complex> {
            Ok(Complex::with_val(256, z + &cplx(p, 10.0, 0.0)))
        };
        let rect = Rectangle {
            re_min: float(p, -1.0),
            re_max: float(p, 1.0),
            im_min: float(p, -0.5),
            im_max: float(p, 0.5),
        };
        assert_eq!(count_zeros_rectangle(f, &rect, p).unwrap(), 0);
    }

    #[test]
    fn rectangle_boundary_zero_detected() {
        let p = p256();
        // Zero exactly on the right edge midpoint.
        let f = |z: &Complex| -> Result<Complex> {
            Ok(Complex::with_val(256, z - &cplx(p, 1.0, 0.0)))
        };
        let rect = Rectangle {
            re_min: float(p, -1.0),
            re_max: float(p, 1.0),
            im_min: float(p, -1.0),
            im_max: float(p, 1.0),
        };
        assert!(count_zeros_rectangle(f, &rect, p).is_err());
    }
}
