//! Casoratian (discrete Wronskian) machinery: shifted sample grids,
//! determinants with partial pivoting, single-row factors, the auxiliary
//! `varphi_M` products, and the pointwise determinant definitions of the
//! denominator polynomial and the multi-indexed polynomials.

use rug::ops::Pow;
use rug::{Complex, Float};

use crate::classical::{Family, FamilyParams};
use crate::error::{Error, Result};
use crate::num::{cabs, pochhammer, qpochhammer, two_pow, Precision};
use crate::virtual_states::{delta_tilde, virtual_xi_value, DeletionSet, TwistType};

/// The shifted abscissas `x_j = x + i ((n+1)/2 - j) gamma` for `j = 1..n`.
pub fn shift_grid(x: &Complex, n: usize, gamma: &Float) -> Vec<Complex> {
    let wp = x.prec().0;
    (1..=n)
        .map(|j| {
            let off = Float::with_val(wp, (n as i64 + 1) - 2 * j as i64) / 2u32;
            let shift = Complex::with_val(wp, (&Float::with_val(wp, 0), &Float::with_val(wp, &off * gamma)));
            Complex::with_val(wp, x + shift)
        })
        .collect()
}

/// `i^k` exactly.
pub fn phase_i(k: u64, wp: u32) -> Complex {
    match k % 4 {
        0 => Complex::with_val(wp, (1, 0)),
        1 => Complex::with_val(wp, (0, 1)),
        2 => Complex::with_val(wp, (-1, 0)),
        _ => Complex::with_val(wp, (0, -1)),
    }
}

/// Determinant by cofactor expansion; exponential cost, used as an
/// independent oracle for small matrices.
pub fn det_cofactor(mat: &[Vec<Complex>]) -> Complex {
    let n = mat.len();
    let wp = if n == 0 { 64 } else { mat[0][0].prec().0 };
    if n == 0 {
        return Complex::with_val(wp, 1);
    }
    if n == 1 {
        return mat[0][0].clone();
    }
    let mut acc = Complex::with_val(wp, 0);
    for k in 0..n {
        let minor: Vec<Vec<Complex>> = mat[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != k)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = Complex::with_val(wp, &mat[0][k] * &det_cofactor(&minor));
        if k % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Determinant by LU factorization with partial pivoting.
///
/// Returns the determinant together with the smallest ratio of a chosen
/// pivot to the largest initial entry magnitude, a cheap conditioning
/// indicator used to trigger precision escalation.
pub fn det_lu(mut mat: Vec<Vec<Complex>>) -> (Complex, Float) {
    let n = mat.len();
    let wp = if n == 0 { 64 } else { mat[0][0].prec().0 };
    if n == 0 {
        return (Complex::with_val(wp, 1), Float::with_val(wp, 1));
    }
    let mut scale = Float::with_val(wp, 0);
    for row in &mat {
        for v in row {
            let m = cabs(v);
            if m > scale {
                scale = m;
            }
        }
    }
    if scale.is_zero() {
        return (Complex::with_val(wp, 0), Float::with_val(wp, 0));
    }
    let mut det = Complex::with_val(wp, 1);
    let mut min_ratio = Float::with_val(wp, rug::float::Special::Infinity);
    for col in 0..n {
        // Partial pivot.
        let mut best = col;
        let mut best_mag = cabs(&mat[col][col]);
        for r in (col + 1)..n {
            let m = cabs(&mat[r][col]);
            if m > best_mag {
                best_mag = m;
                best = r;
            }
        }
        if best != col {
            mat.swap(best, col);
            det = -det;
        }
        let ratio = Float::with_val(wp, &best_mag / &scale);
        if ratio < min_ratio {
            min_ratio = ratio;
        }
        if best_mag.is_zero() {
            return (Complex::with_val(wp, 0), Float::with_val(wp, 0));
        }
        let pivot = mat[col][col].clone();
        det *= &pivot;
        for r in (col + 1)..n {
            let factor = Complex::with_val(wp, &mat[r][col] / &pivot);
            for c in col..n {
                let sub = Complex::with_val(wp, &factor * &mat[col][c]);
                mat[r][c] -= sub;
            }
        }
    }
    (det, min_ratio)
}

/// The Casoratian `W_gamma[f_1, ..., f_n](x) = i^{n(n-1)/2}
/// det(f_k(x_j))` on the shifted grid (empty product gives 1).
pub fn casoratian(
    fs: &[&dyn Fn(&Complex) -> Result<Complex>],
    x: &Complex,
    gamma: &Float,
) -> Result<Complex> {
    let n = fs.len();
    let wp = x.prec().0;
    if n == 0 {
        return Ok(Complex::with_val(wp, 1));
    }
    let grid = shift_grid(x, n, gamma);
    let mut mat = Vec::with_capacity(n);
    for xj in &grid {
        let mut row = Vec::with_capacity(n);
        for f in fs {
            row.push(f(xj)?);
        }
        mat.push(row);
    }
    let (det, _) = det_lu(mat);
    Ok(phase_i((n * (n - 1) / 2) as u64, wp) * det)
}

/// The single-row factor `r_j` of a twist type for a grid of `grid` rows,
/// expressed in the base point `x` (`1 <= j <= grid`).
pub fn r_factor(
    params: &FamilyParams,
    t: TwistType,
    j: usize,
    grid: usize,
    x: &Complex,
) -> Result<Complex> {
    let wp = params.prec.bits() + 32;
    let m = grid;
    assert!(j >= 1 && j <= m, "row index out of range");
    // alpha(lambda + (M-1) delta~)^{-(M-1)/2}
    let dt = delta_tilde(t);
    let shifted = params.shift_half([
        dt[0] * (m as i32 - 1),
        dt[1] * (m as i32 - 1),
        dt[2] * (m as i32 - 1),
        dt[3] * (m as i32 - 1),
    ]);
    let al = crate::virtual_states::alpha(&shifted, t);
    if !(al > 0f64) {
        return Err(Error::InvalidParams(format!(
            "intertwining constant alpha = {} not positive",
            al
        )));
    }
    let alpha_pow = Float::with_val(wp, al.pow(-(m as i32 - 1))).sqrt();
    // kappa^{(M-1)^2/2 - (j-1)(M-j)} in half units.
    let h = (m as i64 - 1).pow(2) - 2 * (j as i64 - 1) * (m as i64 - j as i64);
    let kap = params.kappa_pow_half(h);
    let pair: [usize; 2] = match t {
        TwistType::TypeI => [0, 1],
        TwistType::TypeII => [2, 3],
    };
    let mut v = Complex::with_val(wp, Float::with_val(wp, &alpha_pow * &kap));
    match params.family {
        Family::Wilson => {
            let ix = Complex::with_val(wp, x * &Complex::with_val(wp, (0, 1)));
            let off = Float::with_val(wp, m as i64 - 1) / 2u32;
            for k in pair {
                let base_p = Complex::with_val(wp, Complex::with_val(wp, &params.a[k] - &off) + &ix);
                let base_m = Complex::with_val(wp, Complex::with_val(wp, &params.a[k] - &off) - &ix);
                v *= pochhammer(&base_p, j as u32 - 1, params.prec);
                v *= pochhammer(&base_m, (m - j) as u32, params.prec);
            }
        }
        Family::AskeyWilson => {
            let q = params.q.as_ref().unwrap();
            let eix = Complex::with_val(wp, x * &Complex::with_val(wp, (0, 1))).exp();
            let emix = Complex::with_val(wp, eix.clone().recip());
            let qoff = params.kappa_pow_half(m as i64 - 1); // q^{-(M-1)/2}
            let front = Complex::with_val(
                wp,
                Complex::with_val(wp, eix.clone().pow(m as i32 + 1 - 2 * j as i32)),
            );
            v *= front;
            for k in pair {
                let base_p = Complex::with_val(wp, Complex::with_val(wp, &params.a[k] * &qoff) * &eix);
                let base_m = Complex::with_val(wp, Complex::with_val(wp, &params.a[k] * &qoff) * &emix);
                v *= qpochhammer(&base_p, q, j as u32 - 1, params.prec);
                v *= qpochhammer(&base_m, q, (m - j) as u32, params.prec);
            }
        }
    }
    Ok(v)
}

/// The auxiliary product `varphi_M(x)` (defining product form;
/// `varphi_0 = varphi_1 = 1`).
pub fn varphi_m(params: &FamilyParams, x: &Complex, m: usize) -> Complex {
    let wp = params.prec.bits() + 32;
    if m < 2 {
        return Complex::with_val(wp, 1);
    }
    let g = params.gamma_shift();
    let mut v = Complex::with_val(wp, params.varphi(x).pow((m / 2) as i32));
    for k in 1..=(m - 2) {
        let e = (m - k) / 2;
        if e == 0 {
            continue;
        }
        let off = Complex::with_val(
            wp,
            (&Float::with_val(wp, 0), &Float::with_val(wp, Float::with_val(wp, k) * &g / 2u32)),
        );
        let xm = Complex::with_val(wp, x - &off);
        let xp = Complex::with_val(wp, x + &off);
        let pair = Complex::with_val(wp, params.varphi(&xm) * params.varphi(&xp));
        v *= Complex::with_val(wp, pair.pow(e as i32));
    }
    v
}

/// The eta-difference closed form of `varphi_M(x)`, used as a
/// cross-check of the product form.
pub fn varphi_m_eta(params: &FamilyParams, x: &Complex, m: usize) -> Complex {
    let wp = params.prec.bits() + 32;
    if m < 2 {
        return Complex::with_val(wp, 1);
    }
    let g = params.gamma_shift();
    let grid = shift_grid(&Complex::with_val(wp, x), m, &g);
    let mut v = Complex::with_val(wp, 1);
    for j in 0..m {
        for k in (j + 1)..m {
            let num = Complex::with_val(
                wp,
                params.eta(&grid[j]) - params.eta(&grid[k]),
            );
            let off = Complex::with_val(
                wp,
                (
                    &Float::with_val(wp, 0),
                    &Float::with_val(wp, Float::with_val(wp, (k - j) as u32) * &g / 2u32),
                ),
            );
            let den = params.varphi(&off);
            v *= num / den;
        }
    }
    if params.family == Family::AskeyWilson {
        let e = (m * (m - 1) / 2) as i32;
        v *= Complex::with_val(wp, Complex::with_val(wp, (-2, 0)).pow(e));
    }
    v
}

/// One paired block of the determinant prefactors: product over
/// `j = 1..jmax` and the two parameter indices of `idx` of the row-factor
/// Pochhammers at grid size `grid`.
fn det_prefactor_pair(
    params: &FamilyParams,
    x: &Complex,
    idx: [usize; 2],
    jmax: usize,
    grid: usize,
) -> Complex {
    let wp = params.prec.bits() + 32;
    let mut v = Complex::with_val(wp, 1);
    if jmax == 0 {
        return v;
    }
    match params.family {
        Family::Wilson => {
            let ix = Complex::with_val(wp, x * &Complex::with_val(wp, (0, 1)));
            let off = Float::with_val(wp, grid as i64 - 1) / 2u32;
            for k in idx {
                for j in 1..=jmax {
                    let base_p = Complex::with_val(wp, Complex::with_val(wp, &params.a[k] - &off) + &ix);
                    let base_m = Complex::with_val(wp, Complex::with_val(wp, &params.a[k] - &off) - &ix);
                    v *= pochhammer(&base_p, j as u32, params.prec);
                    v *= pochhammer(&base_m, j as u32, params.prec);
                }
            }
        }
        Family::AskeyWilson => {
            let q = params.q.as_ref().unwrap();
            let eix = Complex::with_val(wp, x * &Complex::with_val(wp, (0, 1))).exp();
            let emix = Complex::with_val(wp, eix.clone().recip());
            let qoff = params.kappa_pow_half(grid as i64 - 1); // q^{-(grid-1)/2}
            for k in idx {
                for j in 1..=jmax {
                    v *= Complex::with_val(wp, params.a[k].clone().pow(-(j as i32)));
                    v *= params.q_pow_quarter((j * (j + 1)) as i64);
                    let base_p = Complex::with_val(wp, Complex::with_val(wp, &params.a[k] * &qoff) * &eix);
                    let base_m = Complex::with_val(wp, Complex::with_val(wp, &params.a[k] * &qoff) * &emix);
                    v *= qpochhammer(&base_p, q, j as u32, params.prec);
                    v *= qpochhammer(&base_m, q, j as u32, params.prec);
                }
            }
        }
    }
    v
}

fn with_bits(params: &FamilyParams, bits: u32) -> FamilyParams {
    let mut p = params.clone();
    p.prec = Precision::new(bits).expect("escalated precision below floor");
    p
}

/// Builds the determinant matrix shared by the denominator and
/// multi-indexed polynomials: one column per deletion label (type-I then
/// type-II, ascending), plus optionally the eigenpolynomial column of
/// degree `n`.
fn build_matrix(
    params: &FamilyParams,
    d: &DeletionSet,
    n: Option<u32>,
    x: &Complex,
) -> Result<Vec<Vec<Complex>>> {
    let wp = params.prec.bits() + 32;
    let grid_size = d.m() + usize::from(n.is_some());
    let g = params.gamma_shift();
    let grid = shift_grid(&Complex::with_val(wp, x), grid_size, &g);
    let labels = d.labels();
    let mut mat = vec![Vec::with_capacity(grid_size); grid_size];
    for (j, xj) in grid.iter().enumerate() {
        let r_i = r_factor(params, TwistType::TypeI, j + 1, grid_size, x)?;
        let r_ii = r_factor(params, TwistType::TypeII, j + 1, grid_size, x)?;
        for (t, v) in &labels {
            let xi = virtual_xi_value(params, *t, *v, xj)?;
            let r = match t {
                TwistType::TypeI => &r_ii,
                TwistType::TypeII => &r_i,
            };
            mat[j].push(Complex::with_val(wp, r * &xi));
        }
        if let Some(deg) = n {
            let p = params.polynomial_value(deg, xj)?;
            mat[j].push(Complex::with_val(wp, Complex::with_val(wp, &r_i * &r_ii) * &p));
        }
    }
    Ok(mat)
}

fn pivot_floor(params: &FamilyParams) -> Float {
    two_pow(params.prec, -(params.prec.bits() as i64 / 2))
}

/// The denominator polynomial evaluated pointwise through its
/// determinant definition. Escalates the working precision once if the
/// determinant pivots indicate cancellation.
pub fn xi_value(params: &FamilyParams, d: &DeletionSet, x: &Complex) -> Result<Complex> {
    xi_value_impl(params, d, x, true)
}

fn xi_value_impl(
    params: &FamilyParams,
    d: &DeletionSet,
    x: &Complex,
    may_escalate: bool,
) -> Result<Complex> {
    let wp = params.prec.bits() + 32;
    let m = d.m();
    if m == 0 {
        return Ok(Complex::with_val(wp, 1));
    }
    let mat = build_matrix(params, d, None, x)?;
    let (det, ratio) = det_lu(mat);
    if may_escalate && ratio < pivot_floor(params) {
        let hi = with_bits(params, params.prec.bits() * 2);
        let x_hi = Complex::with_val(hi.prec.bits() + 32, x);
        return xi_value_impl(&hi, d, &x_hi, false).map(|v| Complex::with_val(wp, v));
    }
    let a = det_prefactor_pair(params, x, [2, 3], d.m_i().saturating_sub(1), m)
        * det_prefactor_pair(params, x, [0, 1], d.m_ii().saturating_sub(1), m);
    let den = Complex::with_val(wp, varphi_m(params, x, m) * Complex::with_val(wp, a));
    if cabs(&den).is_zero() {
        return Err(Error::Domain(format!(
            "determinant normalization vanishes at x = {}",
            x
        )));
    }
    Ok(Complex::with_val(
        wp,
        phase_i((m * (m - 1) / 2) as u64, wp) * det / den,
    ))
}

/// The multi-indexed polynomial of index `n` evaluated pointwise through
/// its determinant definition.
pub fn p_value(params: &FamilyParams, d: &DeletionSet, n: u32, x: &Complex) -> Result<Complex> {
    p_value_impl(params, d, n, x, true)
}

fn p_value_impl(
    params: &FamilyParams,
    d: &DeletionSet,
    n: u32,
    x: &Complex,
    may_escalate: bool,
) -> Result<Complex> {
    let wp = params.prec.bits() + 32;
    let m = d.m();
    if m == 0 {
        return params.polynomial_value(n, x);
    }
    let mat = build_matrix(params, d, Some(n), x)?;
    let (det, ratio) = det_lu(mat);
    if may_escalate && ratio < pivot_floor(params) {
        let hi = with_bits(params, params.prec.bits() * 2);
        let x_hi = Complex::with_val(hi.prec.bits() + 32, x);
        return p_value_impl(&hi, d, n, &x_hi, false).map(|v| Complex::with_val(wp, v));
    }
    let b = det_prefactor_pair(params, x, [2, 3], d.m_i(), m + 1)
        * det_prefactor_pair(params, x, [0, 1], d.m_ii(), m + 1);
    let den = Complex::with_val(wp, varphi_m(params, x, m + 1) * Complex::with_val(wp, b));
    if cabs(&den).is_zero() {
        return Err(Error::Domain(format!(
            "determinant normalization vanishes at x = {}",
            x
        )));
    }
    Ok(Complex::with_val(
        wp,
        phase_i((m * (m + 1) / 2) as u64, wp) * det / den,
    ))
}
