//! Verification: arbitrary-precision Gauss-Legendre quadrature under the
//! deformed weight, Gram matrices, oscillation counts, a hermiticity scan
//! over the shifted strip, and runners for the algebraic identity web.

use rug::ops::Pow;
use rug::{Complex, Float};

use crate::casoratian::{casoratian, p_value, shift_grid};
use crate::classical::{Family, FamilyParams};
use crate::error::{Error, Result};
use crate::multi::{
    b_hat, build_xi, equivalence_constant, f_hat, hat_potential, hat_potential_star, kernel_difference,
    kernel_down, kernel_up, level0_reduce, pd0_constant, MultiIndexedSystem,
};
use crate::num::{cabs, conj, creal, two_pow, Precision};
use crate::poly::{count_real_zeros, count_zeros_rectangle, RealEtaPoly, Rectangle};
use crate::virtual_states::{
    alpha, alpha_prime, twist, virtual_energy, DeletionSet, TwistType,
};

/// One verified quantity: a named comparison with its tolerance.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub target: Float,
    pub measured: Float,
    pub tolerance: Float,
    /// "abs", "rel", "count", or "flag".
    pub kind: String,
    pub pass: bool,
}

/// An ordered list of checks plus free-form metadata.
#[derive(Clone, Debug, Default)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub metadata: Vec<(String, String)>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn meta(&mut self, key: &str, value: String) {
        self.metadata.push((key.to_string(), value));
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.metadata.extend(other.metadata);
    }

    /// Records a residual that should vanish, measured relative to the
    /// natural scale of the compared quantities.
    pub fn record_rel(&mut self, name: &str, measured: Float, tolerance: Float) -> bool {
        let pass = measured.is_finite() && measured <= tolerance;
        self.checks.push(Check {
            name: name.to_string(),
            target: Float::with_val(measured.prec(), 0),
            measured,
            tolerance,
            kind: "rel".to_string(),
            pass,
        });
        pass
    }

    /// Records an absolute comparison of a measured value to a target.
    pub fn record_value(
        &mut self,
        name: &str,
        target: Float,
        measured: Float,
        tolerance: Float,
    ) -> bool {
        let diff = Float::with_val(measured.prec(), &measured - &target).abs();
        let pass = measured.is_finite() && diff <= tolerance;
        self.checks.push(Check {
            name: name.to_string(),
            target,
            measured,
            tolerance,
            kind: "abs".to_string(),
            pass,
        });
        pass
    }

    /// Records an integer count against its expected value.
    pub fn record_count(&mut self, name: &str, expected: i64, got: i64) -> bool {
        let pass = expected == got;
        self.checks.push(Check {
            name: name.to_string(),
            target: Float::with_val(64, expected),
            measured: Float::with_val(64, got),
            tolerance: Float::with_val(64, 0),
            kind: "count".to_string(),
            pass,
        });
        pass
    }

    /// Records a boolean condition.
    pub fn record_flag(&mut self, name: &str, pass: bool) -> bool {
        self.checks.push(Check {
            name: name.to_string(),
            target: Float::with_val(64, 1),
            measured: Float::with_val(64, i32::from(pass)),
            tolerance: Float::with_val(64, 0),
            kind: "flag".to_string(),
            pass,
        });
        pass
    }
}

fn rel_residual(a: &Complex, b: &Complex, wp: u32) -> Float {
    let scale = cabs(a).max(&cabs(b)).max(&Float::with_val(wp, 1));
    let d = cabs(&Complex::with_val(wp, a - b));
    Float::with_val(wp, d / scale)
}

fn rel_residual_f(a: &Float, b: &Float, wp: u32) -> Float {
    let scale = a
        .clone()
        .abs()
        .max(&b.clone().abs())
        .max(&Float::with_val(wp, 1));
    let d = Float::with_val(wp, a - b).abs();
    Float::with_val(wp, d / scale)
}

/// Identity tolerance: 2^-200 at 256 bits and above, relaxing at lower
/// working precision.
fn identity_tol(p: Precision) -> Float {
    let e = (p.bits() as i64 - 56).min(200);
    two_pow(p, -e)
}

fn iy(wp: u32, gamma: &Float, halves: i64) -> Complex {
    let mut off = Float::with_val(wp, halves);
    off *= gamma;
    off /= 2u32;
    Complex::with_val(wp, (Float::with_val(wp, 0), off))
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

fn legendre_pair(n: usize, t: &Float, wp: u32) -> (Float, Float) {
    let mut p0 = Float::with_val(wp, 1);
    let mut p1 = Float::with_val(wp, t);
    if n == 0 {
        return (p0, Float::with_val(wp, 0));
    }
    for k in 1..n {
        // (k+1) P_{k+1} = (2k+1) t P_k - k P_{k-1}
        let mut next = Float::with_val(wp, 2 * k as u32 + 1);
        next *= t;
        next *= &p1;
        next -= Float::with_val(wp, &p0 * &Float::with_val(wp, k as u32));
        next /= Float::with_val(wp, k as u32 + 1);
        p0 = p1;
        p1 = next;
    }
    // P'_n = n (t P_n - P_{n-1}) / (t^2 - 1)
    let mut num = Float::with_val(wp, t * &p1);
    num -= &p0;
    num *= Float::with_val(wp, n as u32);
    let mut den = Float::with_val(wp, t * t);
    den -= 1u32;
    (p1, num / den)
}

/// Gauss-Legendre nodes and weights on [-1, 1] at the requested
/// precision.
pub fn gauss_legendre(order: usize, p: Precision) -> Result<(Vec<Float>, Vec<Float>)> {
    if order < 2 {
        return Err(Error::InvalidParams("quadrature order must be >= 2".into()));
    }
    let wp = p.bits() + 32;
    let pi = Float::with_val(wp, rug::float::Constant::Pi);
    let stop = two_pow(p, -(p.bits() as i64 + 16));
    let mut nodes = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    for k in 0..order {
        let mut arg = Float::with_val(wp, 4 * k as u32 + 3);
        arg *= &pi;
        arg /= Float::with_val(wp, 4 * order as u32 + 2);
        let mut t = arg.cos();
        let mut dp = Float::with_val(wp, 0);
        let mut converged = false;
        for _ in 0..200 {
            let (pn, dpn) = legendre_pair(order, &t, wp);
            dp = dpn;
            if dp.is_zero() {
                break;
            }
            let step = Float::with_val(wp, &pn / &dp);
            t -= &step;
            if step.abs() < stop {
                converged = true;
                break;
            }
        }
        if !converged {
            // One polishing pass after the step size stabilises.
            let (pn, dpn) = legendre_pair(order, &t, wp);
            if dpn.is_zero() || Float::with_val(wp, &pn / &dpn).abs() > two_pow(p, -(p.bits() as i64 / 2)) {
                return Err(Error::QuadratureFailed(format!(
                    "Legendre root {} of order {} did not converge",
                    k, order
                )));
            }
            let (_, dpn) = legendre_pair(order, &t, wp);
            dp = dpn;
        }
        let mut w = Float::with_val(wp, &t * &t);
        w = Float::with_val(wp, 1u32 - w);
        w *= Float::with_val(wp, &dp * &dp);
        w = Float::with_val(wp, 2u32 / w);
        nodes.push(t);
        weights.push(w);
    }
    Ok((nodes, weights))
}

/// A composite quadrature layout over the orthogonality interval.
#[derive(Clone, Debug)]
pub struct QuadratureSpec {
    pub order: usize,
    pub panels: usize,
    pub lower: Float,
    pub upper: Float,
}

/// Chooses the integration window for a system: the infinite Wilson tail
/// is truncated where the weight envelope falls below the precision
/// floor, and the compact interval is inset from its endpoints.
pub fn default_spec(sys: &MultiIndexedSystem, degree_hint: usize) -> Result<QuadratureSpec> {
    let params = sys.params();
    let p = params.prec;
    let wp = p.bits() + 32;
    match params.family {
        Family::Wilson => {
            let floor = two_pow(p, -(p.bits() as i64 + 16));
            let exponent = 4 * (sys.ell() + degree_hint) as i64 + 18;
            let mut chosen: Option<Float> = None;
            let mut x = 40u32;
            while x <= 120 {
                let xf = Float::with_val(wp, x);
                let w = sys.psi_sq(&xf)?;
                let env = Float::with_val(wp, &w * &Float::with_val(wp, xf.clone().pow(exponent as i32)));
                if env.clone().abs() < floor {
                    chosen = Some(xf);
                    break;
                }
                x += 8;
            }
            let upper = chosen.ok_or_else(|| {
                Error::QuadratureFailed(
                    "weight envelope does not decay below the precision floor by x = 120".into(),
                )
            })?;
            let panels = (upper.to_f64() / 2.0).ceil() as usize;
            // Interior Gauss-Legendre nodes never touch x = 0, where the
            // weight has a removable 0/0.
            Ok(QuadratureSpec {
                order: 64,
                panels: panels.max(4),
                lower: Float::with_val(wp, 0),
                upper,
            })
        }
        Family::AskeyWilson => {
            // The weight vanishes at both endpoints; interior nodes
            // avoid the removable 0/0 there.
            Ok(QuadratureSpec {
                order: 64,
                panels: 8,
                lower: Float::with_val(wp, 0),
                upper: Float::with_val(wp, rug::float::Constant::Pi),
            })
        }
    }
}

/// Quadrature nodes with the deformed squared weight folded into the
/// quadrature weights.
#[derive(Clone, Debug)]
pub struct WeightTable {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

/// Tabulates the squared weight on a composite Gauss-Legendre grid.
pub fn weight_table(
    sys: &MultiIndexedSystem,
    spec: &QuadratureSpec,
    panels: usize,
) -> Result<WeightTable> {
    let p = sys.params().prec;
    let wp = p.bits() + 32;
    let (gn, gw) = gauss_legendre(spec.order, p)?;
    let mut width = Float::with_val(wp, &spec.upper - &spec.lower);
    width /= Float::with_val(wp, panels as u32);
    let half = Float::with_val(wp, &width / &Float::with_val(wp, 2));
    let mut nodes = Vec::with_capacity(panels * spec.order);
    let mut weights = Vec::with_capacity(panels * spec.order);
    for panel in 0..panels {
        let mut mid = Float::with_val(wp, panel as u32);
        mid *= &width;
        mid += &spec.lower;
        mid += &half;
        for (t, w) in gn.iter().zip(gw.iter()) {
            let mut x = Float::with_val(wp, t * &half);
            x += &mid;
            let psi2 = sys.psi_sq(&x)?;
            let mut wgt = Float::with_val(wp, w * &half);
            wgt *= psi2;
            nodes.push(x);
            weights.push(wgt);
        }
    }
    Ok(WeightTable { nodes, weights })
}

impl WeightTable {
    /// Integrates `f` against the tabulated weight.
    pub fn integrate<F>(&self, mut f: F) -> Result<Float>
    where
        F: FnMut(&Float) -> Result<Float>,
    {
        let wp = self
            .weights
            .first()
            .map(|w| w.prec())
            .unwrap_or(64);
        let mut acc = Float::with_val(wp, 0);
        for (x, w) in self.nodes.iter().zip(self.weights.iter()) {
            acc += Float::with_val(wp, f(x)? * w);
        }
        Ok(acc)
    }
}

/// Integrates `f` against the squared deformed weight, self-validated by
/// panel doubling.
pub fn integrate_weighted<F>(
    sys: &MultiIndexedSystem,
    mut f: F,
    spec: &QuadratureSpec,
) -> Result<Float>
where
    F: FnMut(&Float) -> Result<Float>,
{
    let p = sys.params().prec;
    let wp = p.bits() + 32;
    let coarse = weight_table(sys, spec, spec.panels)?;
    let fine = weight_table(sys, spec, spec.panels * 2)?;
    let a = coarse.integrate(&mut f)?;
    let b = fine.integrate(&mut f)?;
    let scale = a
        .clone()
        .abs()
        .max(&b.clone().abs())
        .max(&Float::with_val(wp, 1));
    let diff = Float::with_val(wp, &a - &b).abs();
    let tol = Float::with_val(wp, &scale * &two_pow(p, -80));
    if diff > tol {
        return Err(Error::QuadratureFailed(format!(
            "panel doubling moved the integral by {:e} at scale {:e}",
            diff.to_f64(),
            scale.to_f64()
        )));
    }
    Ok(b)
}

/// Gram matrix of the polynomials of index 0..=n_max under the squared
/// deformed weight, with the self-consistency and orthogonality checks
/// recorded in a report.
pub fn gram_matrix(
    sys: &MultiIndexedSystem,
    n_max: u32,
) -> Result<(Vec<Vec<Float>>, VerificationReport)> {
    let params = sys.params();
    let p = params.prec;
    let wp = p.bits() + 32;
    let spec = default_spec(sys, n_max as usize + 1)?;
    let coarse = weight_table(sys, &spec, spec.panels)?;
    let fine = weight_table(sys, &spec, spec.panels * 2)?;
    let polys: Vec<_> = (0..=n_max)
        .map(|n| sys.polynomial(n))
        .collect::<Result<_>>()?;
    // Polynomial values at the quadrature nodes (in the sinusoidal
    // coordinate), per table.
    let tabulate = |table: &WeightTable| -> Vec<Vec<Float>> {
        table
            .nodes
            .iter()
            .map(|x| {
                let t = params.eta(&creal(p, x)).real().clone();
                polys
                    .iter()
                    .map(|mp| mp.poly.eval_real(&t))
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    let vals_c = tabulate(&coarse);
    let vals_f = tabulate(&fine);
    let dot = |table: &WeightTable, vals: &[Vec<Float>], n: usize, m: usize| -> Float {
        let mut acc = Float::with_val(wp, 0);
        for (w, v) in table.weights.iter().zip(vals.iter()) {
            let mut term = Float::with_val(wp, &v[n] * &v[m]);
            term *= w;
            acc += term;
        }
        acc
    };
    let mut rep = VerificationReport::new();
    let ortho_tol_unit = Float::with_val(wp, Float::with_val(wp, 10).pow(-20));
    let mut g = vec![vec![Float::with_val(wp, 0); n_max as usize + 1]; n_max as usize + 1];
    for n in 0..=n_max as usize {
        for m in n..=n_max as usize {
            let a = dot(&coarse, &vals_c, n, m);
            let b = dot(&fine, &vals_f, n, m);
            let hn = &polys[n].norm;
            let hm = &polys[m].norm;
            let scale = Float::with_val(wp, hn * hm).sqrt();
            let self_diff = Float::with_val(wp, Float::with_val(wp, &a - &b).abs() / &scale);
            rep.record_rel(
                &format!("quadrature self-consistency ({},{})", n, m),
                self_diff,
                Float::with_val(wp, &ortho_tol_unit / &Float::with_val(wp, 100)),
            );
            if n == m {
                let rel = Float::with_val(wp, Float::with_val(wp, &b - hn).abs() / hn);
                rep.record_rel(
                    &format!("diagonal norm ({},{})", n, n),
                    rel,
                    ortho_tol_unit.clone(),
                );
            } else {
                let rel = Float::with_val(wp, b.clone().abs() / &scale);
                rep.record_rel(
                    &format!("off-diagonal ({},{})", n, m),
                    rel,
                    ortho_tol_unit.clone(),
                );
            }
            g[m][n] = b.clone();
            g[n][m] = b;
        }
    }
    Ok((g, rep))
}

/// Counts the zeros of the index-`n` polynomial inside the orthogonality
/// range of the sinusoidal coordinate.
pub fn oscillation_check(sys: &MultiIndexedSystem, n: u32) -> Result<usize> {
    let params = sys.params();
    let p = params.prec;
    let wp = p.bits() + 32;
    let poly = sys.polynomial(n)?.poly;
    let (lo, hi) = match params.family {
        Family::Wilson => {
            // All zeros lie below twice the largest k-th root of the
            // trailing-to-leading coefficient ratios (Fujiwara bound);
            // this keeps the scan window tight enough to resolve
            // clustered zeros.
            let lead = poly.leading().clone().abs();
            let deg = poly.degree();
            let mut bound = Float::with_val(wp, 1);
            for i in 0..deg {
                let r = Float::with_val(wp, poly.coeff(i).abs() / &lead)
                    .root((deg - i) as u32);
                if r > bound {
                    bound = r;
                }
            }
            bound *= 2u32;
            (Float::with_val(wp, 0), bound)
        }
        Family::AskeyWilson => (Float::with_val(wp, -1), Float::with_val(wp, 1)),
    };
    count_real_zeros(&poly, &lo, &hi, p)
}

/// The squared deformed weight continued to complex argument.
fn psi_sq_c(sys: &MultiIndexedSystem, z: &Complex) -> Result<Complex> {
    let wp = sys.params().prec.bits() + 32;
    let g = sys.params().gamma_shift();
    let half = iy(wp, &g, 1);
    let num = sys.shifted_params().phi0_sq(z)?;
    let d1 = sys.xi_at(&Complex::with_val(wp, z - &half));
    let d2 = sys.xi_at(&Complex::with_val(wp, z + &half));
    let den = Complex::with_val(wp, d1 * d2);
    if cabs(&den).is_zero() {
        return Err(Error::Domain(format!(
            "denominator polynomial vanishes at {}",
            z
        )));
    }
    Ok(Complex::with_val(wp, num / den))
}

/// The hermiticity boundary function built from the deformed potential,
/// the squared weight, and two real-coefficient polynomials.
fn g_boundary(
    sys: &MultiIndexedSystem,
    r1: &RealEtaPoly,
    r2: &RealEtaPoly,
    z: &Complex,
) -> Result<Complex> {
    let params = sys.params();
    let wp = params.prec.bits() + 32;
    let g = params.gamma_shift();
    let half = iy(wp, &g, 1);
    let zp = Complex::with_val(wp, z + &half);
    let zm = Complex::with_val(wp, z - &half);
    let mut v = sys.potential(&zp)?;
    v *= psi_sq_c(sys, &zp)?;
    v *= params.eval_eta_poly(r1, &zp);
    v *= params.eval_eta_poly(r2, &zm);
    Ok(v)
}

/// The star conjugate of the boundary function, built from the starred
/// potential and the weight at the lower shifted point.
fn g_boundary_star(
    sys: &MultiIndexedSystem,
    r1: &RealEtaPoly,
    r2: &RealEtaPoly,
    z: &Complex,
) -> Result<Complex> {
    let params = sys.params();
    let wp = params.prec.bits() + 32;
    let g = params.gamma_shift();
    let half = iy(wp, &g, 1);
    let zp = Complex::with_val(wp, z + &half);
    let zm = Complex::with_val(wp, z - &half);
    let mut v = sys.potential_star(&zm)?;
    v *= psi_sq_c(sys, &zm)?;
    v *= params.eval_eta_poly(r1, &zm);
    v *= params.eval_eta_poly(r2, &zp);
    Ok(v)
}

/// Hermiticity scan: argument-principle zero count of the denominator
/// polynomial over the shifted strip, pole-freedom of the deformed
/// weight's parameter point, and a boundary symmetry spot-check. The
/// final verdict flag passes only if the sufficient condition is fully
/// established.
pub fn hermiticity_scan(params: &FamilyParams, d: &DeletionSet) -> VerificationReport {
    let mut rep = VerificationReport::new();
    rep.meta("deletions", d.to_string_canonical());
    match hermiticity_scan_inner(params, d, &mut rep) {
        Ok(established) => {
            rep.meta(
                "verdict",
                if established {
                    "hermitian-sufficient".to_string()
                } else {
                    "not established".to_string()
                },
            );
            rep.record_flag("hermiticity sufficient condition", established);
        }
        Err(e) => {
            rep.meta("verdict", "not established".to_string());
            rep.meta("error", format!("{}", e));
            rep.record_flag("hermiticity sufficient condition", false);
        }
    }
    rep
}

fn hermiticity_scan_inner(
    params: &FamilyParams,
    d: &DeletionSet,
    rep: &mut VerificationReport,
) -> Result<bool> {
    let p = params.prec;
    let wp = p.bits() + 32;
    let sys = MultiIndexedSystem::new(params.clone(), d.clone())?;
    let g = params.gamma_shift();
    let mut established = true;

    // (a) Zero count of the denominator polynomial over the strip.
    let count = if d.is_empty() {
        0
    } else {
        let spec = default_spec(&sys, 5)?;
        let mut half_gamma = g.clone().abs();
        half_gamma /= 2u32;
        let inset = two_pow(p, -12);
        let rect = Rectangle {
            re_min: inset.clone(),
            re_max: Float::with_val(wp, &spec.upper - &inset),
            im_min: -half_gamma.clone(),
            im_max: half_gamma,
        };
        count_zeros_rectangle(|z| Ok(sys.xi_at(z)), &rect, p)?
    };
    established &= rep.record_count("denominator zeros in the strip", 0, count);

    // (b) Pole freedom of the deformed weight at the shifted parameters.
    let pole_free = sys.shifted_params().check_base_range().is_ok();
    established &= rep.record_flag("shifted parameters pole-free", pole_free);

    // (c) Boundary symmetry of the hermiticity function at five heights.
    let r1 = sys.polynomial(0)?.poly;
    let r2 = sys.polynomial(1)?.poly;
    let tol = identity_tol(p);
    let mut half_gamma = g.clone().abs();
    half_gamma /= 2u32;
    let x2 = match params.family {
        Family::Wilson => default_spec(&sys, 5)?.upper,
        Family::AskeyWilson => Float::with_val(wp, rug::float::Constant::Pi),
    };
    for k in 1..=5u32 {
        let mut y = Float::with_val(wp, k);
        y *= &half_gamma;
        y /= 6u32;
        let zp = Complex::with_val(wp, (&Float::with_val(wp, 0), &y));
        let zm = conj(&zp);
        let left = g_boundary(&sys, &r1, &r2, &zp)?;
        let right = g_boundary_star(&sys, &r1, &r2, &zm)?;
        let res = rel_residual(&left, &right, wp);
        established &= rep.record_rel(
            &format!("lower-edge boundary symmetry at height {}/6", k),
            res,
            tol.clone(),
        );
        match params.family {
            Family::Wilson => {
                let zf = Complex::with_val(wp, (&x2, &y));
                let tail = cabs(&g_boundary(&sys, &r1, &r2, &zf)?);
                established &= rep.record_rel(
                    &format!("upper-edge decay at height {}/6", k),
                    tail,
                    tol.clone(),
                );
            }
            Family::AskeyWilson => {
                let zp2 = Complex::with_val(wp, (&x2, &y));
                let zm2 = conj(&zp2);
                let left2 = g_boundary(&sys, &r1, &r2, &zp2)?;
                let right2 = g_boundary_star(&sys, &r1, &r2, &zm2)?;
                let res2 = rel_residual(&left2, &right2, wp);
                established &= rep.record_rel(
                    &format!("upper-edge boundary symmetry at height {}/6", k),
                    res2,
                    tol.clone(),
                );
            }
        }
    }
    Ok(established)
}

// ---------------------------------------------------------------------------
// Identity web
// ---------------------------------------------------------------------------

/// Checks the two determinant product rules for the imaginary-shift
/// Wronskian with generic analytic functions and the family's shift.
pub fn casoratian_identity_checks(p: Precision, gamma: &Float) -> Result<VerificationReport> {
    let wp = p.bits() + 32;
    let tol = identity_tol(p);
    let mut rep = VerificationReport::new();
    let f1 = |z: &Complex| -> Result<Complex> {
        let mut v = Complex::with_val(z.prec().0, z);
        v *= Complex::with_val(z.prec().0, (0.3, 0.0));
        Ok(v.exp())
    };
    let f2 = |z: &Complex| -> Result<Complex> { Ok(Complex::with_val(z.prec().0, z * z)) };
    let f3 = |z: &Complex| -> Result<Complex> {
        let zwp = z.prec().0;
        let mut v = Complex::with_val(zwp, z * z);
        v *= z;
        v -= z;
        v += 1u32;
        Ok(v)
    };
    let gfun = |z: &Complex| -> Result<Complex> {
        let zwp = z.prec().0;
        let mut e = Complex::with_val(zwp, z);
        e *= Complex::with_val(zwp, (-0.2, 0.0));
        let mut v = e.exp();
        v *= Complex::with_val(zwp, z + &Complex::with_val(zwp, 2));
        Ok(v)
    };
    let hfun = |z: &Complex| -> Result<Complex> {
        let zwp = z.prec().0;
        let den = Complex::with_val(zwp, z + &Complex::with_val(zwp, (4.0, 0.5)));
        Ok(Complex::with_val(zwp, den.recip()))
    };
    let x = Complex::with_val(wp, (0.7, 0.2));

    // Product rule: a common factor pulls out of every column.
    {
        let gf = |f: &dyn Fn(&Complex) -> Result<Complex>, z: &Complex| -> Result<Complex> {
            Ok(Complex::with_val(z.prec().0, gfun(z)? * f(z)?))
        };
        let c1 = |z: &Complex| gf(&f1, z);
        let c2 = |z: &Complex| gf(&f2, z);
        let c3 = |z: &Complex| gf(&f3, z);
        let cols: Vec<&dyn Fn(&Complex) -> Result<Complex>> = vec![&c1, &c2, &c3];
        let lhs = casoratian(&cols, &x, gamma)?;
        let base: Vec<&dyn Fn(&Complex) -> Result<Complex>> = vec![&f1, &f2, &f3];
        let mut rhs = casoratian(&base, &x, gamma)?;
        for zj in shift_grid(&x, 3, gamma) {
            rhs *= gfun(&zj)?;
        }
        rep.record_rel(
            "determinant common-factor rule",
            rel_residual(&lhs, &rhs, wp),
            tol.clone(),
        );
    }

    // Jacobi-type composition rule for augmented determinants.
    {
        let inner_g = |z: &Complex| -> Result<Complex> {
            let cols: Vec<&dyn Fn(&Complex) -> Result<Complex>> = vec![&f1, &f2, &gfun];
            casoratian(&cols, z, gamma)
        };
        let inner_h = |z: &Complex| -> Result<Complex> {
            let cols: Vec<&dyn Fn(&Complex) -> Result<Complex>> = vec![&f1, &f2, &hfun];
            casoratian(&cols, z, gamma)
        };
        let outer: Vec<&dyn Fn(&Complex) -> Result<Complex>> = vec![&inner_g, &inner_h];
        let lhs = casoratian(&outer, &x, gamma)?;
        let base: Vec<&dyn Fn(&Complex) -> Result<Complex>> = vec![&f1, &f2];
        let all: Vec<&dyn Fn(&Complex) -> Result<Complex>> = vec![&f1, &f2, &gfun, &hfun];
        let rhs = Complex::with_val(wp, casoratian(&base, &x, gamma)? * casoratian(&all, &x, gamma)?);
        rep.record_rel(
            "determinant composition rule",
            rel_residual(&lhs, &rhs, wp),
            tol,
        );
    }
    Ok(rep)
}

/// Checks the elementary relations tying the base weight, potential, and
/// parameter shift together, plus the twisted-potential factorization
/// conditions.
pub fn basic_relation_checks(params: &FamilyParams) -> Result<VerificationReport> {
    let p = params.prec;
    let wp = p.bits() + 32;
    let tol = identity_tol(p);
    let g = params.gamma_shift();
    let half = iy(wp, &g, 1);
    let full = iy(wp, &g, 2);
    let lp = params.shifted_delta();
    let mut rep = VerificationReport::new();
    let zs = [
        Complex::with_val(wp, (0.8, 0.3)),
        Complex::with_val(wp, (1.4, -0.2)),
    ];
    for (i, z) in zs.iter().enumerate() {
        // Squared weight under the unit parameter shift.
        let lhs = lp.phi0_sq(z)?;
        let zp = Complex::with_val(wp, z + &half);
        let mut rhs = params.varphi(z);
        rhs.square_mut();
        rhs *= params.potential(&zp)?;
        rhs *= params.phi0_sq(&zp)?;
        rep.record_rel(
            &format!("weight shift relation at point {}", i),
            rel_residual(&lhs, &rhs, wp),
            tol.clone(),
        );

        // Potential under the unit parameter shift.
        let lhs = lp.potential(z)?;
        let mut rhs = params.potential(&Complex::with_val(wp, z - &half))?;
        rhs *= &params.kappa_pow_half(-2);
        let num = params.varphi(&Complex::with_val(wp, z - &full));
        let den = params.varphi(z);
        rhs *= Complex::with_val(wp, num / den);
        rep.record_rel(
            &format!("potential shift relation at point {}", i),
            rel_residual(&lhs, &rhs, wp),
            tol.clone(),
        );

        // Twisted-potential factorization conditions for both twists.
        for t in [TwistType::TypeI, TwistType::TypeII] {
            let tw = twist(params, t);
            let al = alpha(params, t);
            let alp = alpha_prime(params, t);
            let zm = Complex::with_val(wp, z - &full);
            let lhs1 = Complex::with_val(wp, params.potential(z)? * params.potential_star(&zm)?);
            let mut rhs1 = Complex::with_val(wp, tw.potential(z)? * conj(&tw.potential(&conj(&zm))?));
            rhs1 *= Float::with_val(wp, &al * &al);
            rep.record_rel(
                &format!("twisted product relation ({:?}) at point {}", t, i),
                rel_residual(&lhs1, &rhs1, wp),
                tol.clone(),
            );
            let lhs2 = Complex::with_val(wp, params.potential(z)? + params.potential_star(z)?);
            let mut rhs2 =
                Complex::with_val(wp, tw.potential(z)? + conj(&tw.potential(&conj(z))?));
            rhs2 *= &al;
            rhs2 -= &alp;
            rep.record_rel(
                &format!("twisted sum relation ({:?}) at point {}", t, i),
                rel_residual(&lhs2, &rhs2, wp),
                tol.clone(),
            );
        }
    }
    Ok(rep)
}

fn poly_rel_residual(a: &RealEtaPoly, b: &RealEtaPoly, wp: u32) -> Float {
    let scale = a
        .max_abs_coeff()
        .max(&b.max_abs_coeff())
        .max(&Float::with_val(wp, 1));
    Float::with_val(wp, a.max_coeff_distance(b) / scale)
}

/// Checks the deletion-set identities for one system: degree and leading
/// laws, the lowest-member relation, the eigenvalue equation, the shift
/// ladder, the first- and second-order relations for augmented
/// denominators, and the stepwise potential chain.
pub fn system_identity_checks(params: &FamilyParams, d: &DeletionSet) -> Result<VerificationReport> {
    let p = params.prec;
    let wp = p.bits() + 32;
    let tol = identity_tol(p);
    let lead_tol = Float::with_val(wp, Float::with_val(wp, 10).pow(-30));
    let mut rep = VerificationReport::new();
    let sys = MultiIndexedSystem::new(params.clone(), d.clone())?;
    let up = MultiIndexedSystem::new(params.shifted_delta(), d.clone())?;
    let n_max = 4u32;
    let polys: Vec<_> = (0..=n_max)
        .map(|n| sys.polynomial(n))
        .collect::<Result<Vec<_>>>()?;
    let polys_up: Vec<_> = (0..=n_max)
        .map(|n| up.polynomial(n))
        .collect::<Result<Vec<_>>>()?;

    // Degree and leading-coefficient laws.
    rep.record_count("denominator degree", d.ell() as i64, sys.xi().degree() as i64);
    if !d.is_empty() {
        rep.record_rel(
            "denominator leading coefficient",
            rel_residual_f(sys.xi().leading(), &crate::multi::leading_xi(params, d), wp),
            lead_tol.clone(),
        );
    }
    for (n, mp) in polys.iter().enumerate() {
        rep.record_count(
            &format!("polynomial degree (n={})", n),
            (d.ell() + n) as i64,
            mp.poly.degree() as i64,
        );
        if !d.is_empty() {
            rep.record_rel(
                &format!("polynomial leading coefficient (n={})", n),
                rel_residual_f(
                    mp.poly.leading(),
                    &crate::multi::leading_p(params, d, n as u32),
                    wp,
                ),
                lead_tol.clone(),
            );
        }
    }

    // Lowest member versus the shifted denominator polynomial.
    let want = sys.xi_shifted().scaled(&pd0_constant(params, d));
    rep.record_rel(
        "lowest member equals shifted denominator",
        poly_rel_residual(&polys[0].poly, &want, wp),
        tol.clone(),
    );

    // Eigenvalue equation: pointwise for the (identically zero) lowest
    // image, in coefficient form above it.
    for x in params.sample_points(3) {
        let xc = creal(p, &x);
        let hv = sys.htilde_at(&polys[0].poly, &xc)?;
        let scale = polys[0].poly.max_abs_coeff().max(&Float::with_val(wp, 1));
        rep.record_rel(
            "eigen equation (n=0)",
            Float::with_val(wp, cabs(&hv) / scale),
            tol.clone(),
        );
    }
    for n in 1..=n_max as usize {
        let hp = sys.apply_htilde(&polys[n].poly)?;
        let want = polys[n].poly.scaled(&params.energy(n as u32));
        rep.record_rel(
            &format!("eigen equation (n={})", n),
            poly_rel_residual(&hp, &want, wp),
            tol.clone(),
        );
    }

    // Forward and backward shift ladder.
    for n in 1..=n_max as usize {
        let fwd = sys.forward(&polys[n].poly)?;
        let want = polys_up[n - 1].poly.scaled(&params.factor_f(n as u32));
        rep.record_rel(
            &format!("forward shift (n={})", n),
            poly_rel_residual(&fwd, &want, wp),
            tol.clone(),
        );
        let back = sys.backward(&polys_up[n - 1].poly)?;
        let want = polys[n].poly.scaled(&params.factor_b(n as u32));
        rep.record_rel(
            &format!("backward shift (n={})", n),
            poly_rel_residual(&back, &want, wp),
            tol.clone(),
        );
    }

    // First- and second-order relations for the augmented denominator,
    // for the smallest label not yet deleted in each type.
    for t in [TwistType::TypeI, TwistType::TypeII] {
        let list = match t {
            TwistType::TypeI => d.type_i(),
            TwistType::TypeII => d.type_ii(),
        };
        let mut v = 1u32;
        while list.contains(&v) {
            v += 1;
        }
        for xv in [0.9f64, 1.6] {
            let x = Complex::with_val(wp, xv);
            let (lu, ru) = kernel_up(params, d, t, v, &x)?;
            rep.record_rel(
                &format!("augmented raising relation ({:?}, v={})", t, v),
                rel_residual(&lu, &ru, wp),
                tol.clone(),
            );
            let (ld, rd) = kernel_down(params, d, t, v, &x)?;
            rep.record_rel(
                &format!("augmented lowering relation ({:?}, v={})", t, v),
                rel_residual(&ld, &rd, wp),
                tol.clone(),
            );
            let (le, re) = kernel_difference(params, d, t, v, &x)?;
            rep.record_rel(
                &format!("augmented difference equation ({:?}, v={})", t, v),
                rel_residual(&le, &re, wp),
                tol.clone(),
            );
        }
        let prod = Float::with_val(
            wp,
            f_hat(params, t, d.m() as u32, v) * b_hat(params, t, d.m() as u32, v),
        );
        let want = Float::with_val(wp, -virtual_energy(params, t, v));
        rep.record_rel(
            &format!("shift constants product ({:?}, v={})", t, v),
            rel_residual_f(&prod, &want, wp),
            tol.clone(),
        );
    }

    // Stepwise potential chain in the canonical deletion order.
    if !d.is_empty() {
        let prefix = d.labels();
        let (last_t, last_v) = *prefix.last().unwrap();
        let g = params.gamma_shift();
        let half = iy(wp, &g, 1);
        for z in [
            Complex::with_val(wp, (0.8, 0.3)),
            Complex::with_val(wp, (1.4, 0.1)),
        ] {
            let mut lhs = sys.potential(&z)?;
            lhs += sys.potential_star(&z)?;
            let mut rhs = hat_potential(params, &prefix, &Complex::with_val(wp, &z + &half))?;
            rhs += hat_potential_star(params, &prefix, &Complex::with_val(wp, &z - &half))?;
            rhs -= &virtual_energy(params, last_t, last_v);
            rep.record_rel(
                "stepwise potential chain",
                rel_residual(&lhs, &rhs, wp),
                tol.clone(),
            );
        }
    }
    Ok(rep)
}

/// Checks the equivalence of the two canonical deletion-set families for
/// block sizes up to two at the given (generic) parameter point.
pub fn equivalence_checks(params: &FamilyParams) -> Result<VerificationReport> {
    let p = params.prec;
    let wp = p.bits() + 32;
    let tol = identity_tol(p);
    let mut rep = VerificationReport::new();
    for (k, m) in [(1u32, 1u32), (2, 1), (1, 2), (2, 2)] {
        let d1 = DeletionSet::new((m..m + k).collect(), vec![])?;
        let d2 = DeletionSet::new(vec![], (k..k + m).collect())?;
        let mm = m as i32;
        let kk = k as i32;
        let p1 = params.shift_half([mm, mm, -mm, -mm]);
        let p2 = params.shift_half([-kk, -kk, kk, kk]);
        let xi1 = build_xi(&p1, &d1)?;
        let xi2 = build_xi(&p2, &d2)?;
        let a = equivalence_constant(params, k, m);
        rep.record_rel(
            &format!("deletion-set equivalence (k={}, m={})", k, m),
            poly_rel_residual(&xi1, &xi2.scaled(&a), wp),
            tol.clone(),
        );
    }
    Ok(rep)
}

/// Checks the level-0 reduction for a single deleted label of each type.
pub fn level0_checks(params: &FamilyParams) -> Result<VerificationReport> {
    let p = params.prec;
    let wp = p.bits() + 32;
    let tol = identity_tol(p);
    let mut rep = VerificationReport::new();
    for t in [TwistType::TypeI, TwistType::TypeII] {
        let d = match t {
            TwistType::TypeI => DeletionSet::with_zero_allowed(vec![0], vec![])?,
            TwistType::TypeII => DeletionSet::with_zero_allowed(vec![], vec![0])?,
        };
        for n in 0..=2u32 {
            let (shifted, reduced, cst) = level0_reduce(params, &d, t, n)?;
            for xv in [0.9f64, 1.6] {
                let x = Complex::with_val(wp, xv);
                let lhs = p_value(params, &d, n, &x)?;
                let mut rhs = p_value(&shifted, &reduced, n, &x)?;
                rhs *= &cst;
                rep.record_rel(
                    &format!("level-0 reduction ({:?}, n={})", t, n),
                    rel_residual(&lhs, &rhs, wp),
                    tol.clone(),
                );
            }
        }
    }
    Ok(rep)
}

/// A generic parameter point of the same family, used for identities
/// that degenerate at symmetric parameter choices.
fn generic_point(params: &FamilyParams) -> FamilyParams {
    let wp = params.prec.bits() + 32;
    match params.family {
        Family::Wilson => FamilyParams::wilson(
            [
                Complex::with_val(wp, 1.3),
                Complex::with_val(wp, 1.9),
                Complex::with_val(wp, 2.6),
                Complex::with_val(wp, 3.4),
            ],
            params.prec,
        ),
        Family::AskeyWilson => FamilyParams::askey_wilson(
            [
                Complex::with_val(wp, 0.04),
                Complex::with_val(wp, 0.05),
                Complex::with_val(wp, 0.06),
                Complex::with_val(wp, 0.07),
            ],
            params.q.clone().unwrap(),
            params.prec,
        ),
    }
}

/// Runs the full identity web for one system, including the
/// parameter-generic equivalence and reduction identities.
pub fn identity_suite(params: &FamilyParams, d: &DeletionSet) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new();
    rep.meta("deletions", d.to_string_canonical());
    rep.extend(casoratian_identity_checks(params.prec, &params.gamma_shift())?);
    rep.extend(basic_relation_checks(params)?);
    rep.extend(system_identity_checks(params, d)?);
    rep.extend(equivalence_checks(&generic_point(params))?);
    rep.extend(level0_checks(params)?);
    Ok(rep)
}

/// Runs the orthogonality suite: Gram matrix plus oscillation counts for
/// indices up to four.
pub fn ortho_suite(params: &FamilyParams, d: &DeletionSet) -> Result<VerificationReport> {
    let sys = MultiIndexedSystem::new(params.clone(), d.clone())?;
    let (_, mut rep) = gram_matrix(&sys, 4)?;
    rep.meta("deletions", d.to_string_canonical());
    for n in 0..=4u32 {
        let count = oscillation_check(&sys, n)?;
        rep.record_count(&format!("oscillation count (n={})", n), n as i64, count as i64);
    }
    Ok(rep)
}

/// Checks that direct determinant evaluation over full wavefunctions and
/// the polynomial construction agree, and that the deformed potential is
/// independent of the deletion order.
pub fn oracle_checks(params: &FamilyParams, d: &DeletionSet) -> Result<VerificationReport> {
    let p = params.prec;
    let wp = p.bits() + 32;
    let tol = two_pow(p, -((p.bits() as i64 - 66).min(190)));
    let mut rep = VerificationReport::new();
    let sys = MultiIndexedSystem::new(params.clone(), d.clone())?;
    let order = d.labels();
    let xs = params.sample_points(10);
    // Eigenfunction comparison up to a global determinant sign that must
    // be consistent across points and indices.
    let mut sign: Option<bool> = None;
    for n in 0..2u32 {
        let mp = sys.polynomial(n)?;
        for x in &xs {
            let lhs = sys.assemble_phi(&mp.poly, x)?;
            let rhs = crate::multi::raw_eigenfunction(params, &order, n, x)?;
            let flipped = lhs.is_sign_negative() != rhs.is_sign_negative();
            let sign_ok = match sign {
                None => {
                    sign = Some(flipped);
                    true
                }
                Some(s) => s == flipped,
            };
            rep.record_flag(&format!("determinant sign consistency (n={})", n), sign_ok);
            let rhs_signed = if sign == Some(true) { -rhs } else { rhs };
            rep.record_rel(
                &format!("eigenfunction oracle (n={})", n),
                rel_residual_f(&lhs, &rhs_signed, wp),
                tol.clone(),
            );
        }
    }
    // Potential order independence and oracle agreement at complex
    // points off the real axis.
    if d.m() >= 2 {
        let mut rev = order.clone();
        rev.reverse();
        for (i, x) in xs.iter().take(10).enumerate() {
            let z = Complex::with_val(wp, (x, &Float::with_val(wp, 0.3)));
            let a = crate::multi::raw_potential(params, &order, &z)?;
            let b = crate::multi::raw_potential(params, &rev, &z)?;
            rep.record_rel(
                &format!("potential order independence (point {})", i),
                rel_residual(&a, &b, wp),
                tol.clone(),
            );
        }
    }
    for (i, x) in xs.iter().take(3).enumerate() {
        let z = Complex::with_val(wp, (x, &Float::with_val(wp, 0.3)));
        let va = sys.potential(&z)?;
        let vb = crate::multi::raw_potential(params, &order, &z)?;
        let sa = Complex::with_val(wp, va.clone().square());
        let sb = Complex::with_val(wp, vb.clone().square());
        rep.record_rel(
            &format!("potential oracle squares (point {})", i),
            rel_residual(&sa, &sb, wp),
            tol.clone(),
        );
    }
    Ok(rep)
}

/// The denominator evaluated over the strip at a scan point; used by the
/// parameter-sweep front end.
pub fn strip_zero_counts(params: &FamilyParams, d: &DeletionSet) -> Result<(i64, usize)> {
    let p = params.prec;
    let wp = p.bits() + 32;
    let sys = MultiIndexedSystem::new(params.clone(), d.clone())?;
    let g = params.gamma_shift();
    let spec = default_spec(&sys, 5)?;
    let mut half_gamma = g.clone().abs();
    half_gamma /= 2u32;
    let inset = two_pow(p, -12);
    let rect = Rectangle {
        re_min: inset.clone(),
        re_max: Float::with_val(wp, &spec.upper - &inset),
        im_min: -half_gamma.clone(),
        im_max: half_gamma,
    };
    let strip = count_zeros_rectangle(|z| Ok(sys.xi_at(z)), &rect, p)?;
    let real_axis = match params.family {
        Family::Wilson => {
            let hi = Float::with_val(wp, spec.upper.clone().square());
            count_real_zeros(sys.xi(), &Float::with_val(wp, 0), &hi, p)?
        }
        Family::AskeyWilson => count_real_zeros(
            sys.xi(),
            &Float::with_val(wp, -1),
            &Float::with_val(wp, 1),
            p,
        )?,
    };
    Ok((strip, real_axis))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p256() -> Precision {
        Precision::new(256).unwrap()
    }

    fn c(v: f64) -> Complex {
        Complex::with_val(288, v)
    }

    fn w1111() -> FamilyParams {
        FamilyParams::wilson([c(1.0), c(1.0), c(1.0), c(1.0)], p256())
    }

    fn wbase() -> FamilyParams {
        FamilyParams::wilson([c(2.0), c(2.0), c(2.0), c(2.0)], p256())
    }

    fn awbase() -> FamilyParams {
        FamilyParams::askey_wilson(
            [c(0.05), c(0.05), c(0.05), c(0.05)],
            Float::with_val(288, 0.1),
            p256(),
        )
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (nodes, weights) = gauss_legendre(8, p256()).unwrap();
        // integral of t^k over [-1,1] = 2/(k+1) for even k, 0 for odd.
        for k in 0..10u32 {
            let mut acc = Float::with_val(288, 0);
            for (t, w) in nodes.iter().zip(weights.iter()) {
                acc += Float::with_val(288, t.clone().pow(k as i32) * w);
            }
            let want = if k % 2 == 0 {
                Float::with_val(288, 2) / Float::with_val(288, k + 1)
            } else {
                Float::with_val(288, 0)
            };
            let d = Float::with_val(288, acc - want).abs();
            assert!(d < two_pow(p256(), -200), "moment {} off by {:e}", k, d.to_f64());
        }
    }

    #[test]
    fn classical_ground_state_norm_is_pi_thirds() {
        // The simplest Wilson weight integrates to pi/3.
        let sys = MultiIndexedSystem::new(w1111(), DeletionSet::empty()).unwrap();
        let spec = default_spec(&sys, 1).unwrap();
        let v = integrate_weighted(&sys, |_| Ok(Float::with_val(288, 1)), &spec).unwrap();
        let pi = Float::with_val(288, rug::float::Constant::Pi);
        let want = pi / 3u32;
        let rel = Float::with_val(288, Float::with_val(288, &v - &want).abs() / &want);
        assert!(rel < Float::with_val(288, Float::with_val(288, 10).pow(-20)), "relative error {:e}", rel.to_f64());
    }

    #[test]
    fn classical_gram_matrix_passes() {
        let sys = MultiIndexedSystem::new(w1111(), DeletionSet::empty()).unwrap();
        let (g, rep) = gram_matrix(&sys, 2).unwrap();
        for c in &rep.checks {
            assert!(c.pass, "{}: measured {:e} tol {:e}", c.name, c.measured.to_f64(), c.tolerance.to_f64());
        }
        // Diagonal equals the closed-form norms.
        for n in 0..=2u32 {
            let h = sys.norm_closed(n).unwrap();
            let rel = Float::with_val(288, Float::with_val(288, &g[n as usize][n as usize] - &h).abs() / &h);
            assert!(rel < Float::with_val(288, Float::with_val(288, 10).pow(-20)));
        }
    }

    #[test]
    fn deformed_gram_matrix_passes() {
        for (params, d) in [
            (wbase(), DeletionSet::new(vec![1], vec![]).unwrap()),
            (awbase(), DeletionSet::new(vec![1], vec![]).unwrap()),
        ] {
            let sys = MultiIndexedSystem::new(params, d).unwrap();
            let (_, rep) = gram_matrix(&sys, 2).unwrap();
            for c in &rep.checks {
                assert!(c.pass, "{}: measured {:e} tol {:e}", c.name, c.measured.to_f64(), c.tolerance.to_f64());
            }
        }
    }

    #[test]
    fn oscillation_counts_match_index() {
        let sys = MultiIndexedSystem::new(wbase(), DeletionSet::new(vec![1], vec![]).unwrap()).unwrap();
        for n in 0..=3u32 {
            assert_eq!(oscillation_check(&sys, n).unwrap(), n as usize);
        }
        let aw = MultiIndexedSystem::new(awbase(), DeletionSet::empty()).unwrap();
        for n in 0..=3u32 {
            assert_eq!(oscillation_check(&aw, n).unwrap(), n as usize);
        }
    }

    #[test]
    fn hermiticity_scan_establishes_test_systems() {
        for (params, d) in [
            (wbase(), DeletionSet::new(vec![1], vec![]).unwrap()),
            (wbase(), DeletionSet::empty()),
            (awbase(), DeletionSet::new(vec![1], vec![]).unwrap()),
        ] {
            let rep = hermiticity_scan(&params, &d);
            assert!(
                rep.all_pass(),
                "scan failed: {:?}",
                rep.checks
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| (c.name.clone(), c.measured.to_f64()))
                    .collect::<Vec<_>>()
            );
            assert!(rep
                .metadata
                .iter()
                .any(|(k, v)| k == "verdict" && v == "hermitian-sufficient"));
        }
    }

    #[test]
    fn hermiticity_scan_rejects_invalid_parameters() {
        let p = p256();
        let bad = FamilyParams::wilson([c(0.2), c(0.2), c(0.2), c(0.2)], p);
        let rep = hermiticity_scan(&bad, &DeletionSet::new(vec![2], vec![]).unwrap());
        assert!(!rep.all_pass());
        assert!(rep
            .metadata
            .iter()
            .any(|(k, v)| k == "verdict" && v == "not established"));
    }

    #[test]
    fn identity_suite_passes_on_wilson_system() {
        let rep = identity_suite(&wbase(), &DeletionSet::new(vec![1, 2], vec![]).unwrap()).unwrap();
        for c in &rep.checks {
            assert!(c.pass, "{}: measured {:e} tol {:e}", c.name, c.measured.to_f64(), c.tolerance.to_f64());
        }
    }

    #[test]
    fn identity_suite_passes_on_askey_wilson_system() {
        let rep = identity_suite(&awbase(), &DeletionSet::new(vec![1], vec![]).unwrap()).unwrap();
        for c in &rep.checks {
            assert!(c.pass, "{}: measured {:e} tol {:e}", c.name, c.measured.to_f64(), c.tolerance.to_f64());
        }
    }

    #[test]
    fn oracle_checks_pass() {
        let rep = oracle_checks(&wbase(), &DeletionSet::new(vec![1, 2], vec![]).unwrap()).unwrap();
        for c in &rep.checks {
            assert!(c.pass, "{}: measured {:e} tol {:e}", c.name, c.measured.to_f64(), c.tolerance.to_f64());
        }
    }
}
