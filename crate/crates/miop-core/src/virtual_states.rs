//! Parameter twists, virtual-state polynomials and energies, and
//! validation of deletion label sets.
//!
//! A virtual state of type I or II is obtained by twisting the parameter
//! point: type I reflects the first parameter pair (`a_{1,2} -> 1 - a_{1,2}`
//! in lambda space), type II the second pair. The virtual-state polynomial
//! of label `v` is the degree-`v` classical polynomial at the twisted
//! point, and its (negative) energy drives the deformed systems.

use rug::ops::Pow;
use rug::{Complex, Float};

use crate::classical::{Family, FamilyParams};
use crate::error::{Error, Result};
use crate::num::{cabs, two_pow};
use crate::poly::RealEtaPoly;

/// The two species of virtual states.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum TwistType {
    TypeI,
    TypeII,
}

impl TwistType {
    /// The other species.
    pub fn other(self) -> Self {
        match self {
            TwistType::TypeI => TwistType::TypeII,
            TwistType::TypeII => TwistType::TypeI,
        }
    }
}

/// The half-unit lambda-shift associated with a twist type: type I is
/// `(-1/2, -1/2, 1/2, 1/2)`, type II its mirror.
pub fn delta_tilde(t: TwistType) -> [i32; 4] {
    match t {
        TwistType::TypeI => [-1, -1, 1, 1],
        TwistType::TypeII => [1, 1, -1, -1],
    }
}

/// The twisted parameter point: Wilson sends the selected pair
/// `a -> 1 - a`, Askey-Wilson sends it to `q / a`.
pub fn twist(params: &FamilyParams, t: TwistType) -> FamilyParams {
    let wp = params.prec.bits() + 32;
    let idx: [usize; 2] = match t {
        TwistType::TypeI => [0, 1],
        TwistType::TypeII => [2, 3],
    };
    let mut a = params.a.clone();
    match params.family {
        Family::Wilson => {
            for i in idx {
                a[i] = Complex::with_val(wp, 1u32 - &a[i]);
            }
        }
        Family::AskeyWilson => {
            let q = params.q.as_ref().unwrap();
            for i in idx {
                a[i] = Complex::with_val(wp, q / &a[i]);
            }
        }
    }
    FamilyParams {
        family: params.family,
        a,
        q: params.q.clone(),
        prec: params.prec,
    }
}

/// Shifts the parameter point by `m_i` type-I and `m_ii` type-II half-unit
/// twist shifts (the point written `lambda^{[M_I, M_II]}`).
pub fn shifted_lambda(params: &FamilyParams, m_i: i32, m_ii: i32) -> FamilyParams {
    let d = m_ii - m_i;
    params.shift_half([d, d, -d, -d])
}

/// The multiplicative intertwining constant `alpha` for a twist type.
pub fn alpha(params: &FamilyParams, t: TwistType) -> Float {
    let wp = params.prec.bits() + 32;
    match params.family {
        Family::Wilson => Float::with_val(wp, 1),
        Family::AskeyWilson => {
            let q = params.q.as_ref().unwrap();
            let (i, j) = match t {
                TwistType::TypeI => (0, 1),
                TwistType::TypeII => (2, 3),
            };
            let prod = Complex::with_val(wp, &params.a[i] * &params.a[j]);
            Float::with_val(wp, prod.real() / q)
        }
    }
}

/// The additive intertwining constant `alpha'` for a twist type (equals
/// the virtual energy of label 0; negative in the admissible range).
pub fn alpha_prime(params: &FamilyParams, t: TwistType) -> Float {
    let wp = params.prec.bits() + 32;
    let (p1, p2): ((usize, usize), (usize, usize)) = match t {
        TwistType::TypeI => ((0, 1), (2, 3)),
        TwistType::TypeII => ((2, 3), (0, 1)),
    };
    match params.family {
        Family::Wilson => {
            let s1 = Complex::with_val(wp, &params.a[p1.0] + &params.a[p1.1]);
            let s2 = Complex::with_val(wp, &params.a[p2.0] + &params.a[p2.1]);
            let v = Complex::with_val(wp, Complex::with_val(wp, &s1 - 1u32) * &s2);
            Float::with_val(wp, -v.real().clone())
        }
        Family::AskeyWilson => {
            let q = params.q.as_ref().unwrap();
            let m1 = Complex::with_val(wp, &params.a[p1.0] * &params.a[p1.1]);
            let m2 = Complex::with_val(wp, &params.a[p2.0] * &params.a[p2.1]);
            let f1 = Float::with_val(wp, 1u32 - Float::with_val(wp, m1.real() / q));
            let f2 = Float::with_val(wp, 1u32 - m2.real());
            -(f1 * f2)
        }
    }
}

/// The virtual-state energy of label `v` for a twist type.
pub fn virtual_energy(params: &FamilyParams, t: TwistType, v: u32) -> Float {
    let wp = params.prec.bits() + 32;
    let (p1, p2): ((usize, usize), (usize, usize)) = match t {
        TwistType::TypeI => ((0, 1), (2, 3)),
        TwistType::TypeII => ((2, 3), (0, 1)),
    };
    match params.family {
        Family::Wilson => {
            let s1 = Complex::with_val(wp, &params.a[p1.0] + &params.a[p1.1]);
            let s2 = Complex::with_val(wp, &params.a[p2.0] + &params.a[p2.1]);
            let f1 = Float::with_val(wp, s1.real() - &Float::with_val(wp, v + 1));
            let f2 = Float::with_val(wp, s2.real() + &Float::with_val(wp, v));
            -(f1 * f2)
        }
        Family::AskeyWilson => {
            let q = params.q.as_ref().unwrap();
            let m1 = Complex::with_val(wp, &params.a[p1.0] * &params.a[p1.1]);
            let m2 = Complex::with_val(wp, &params.a[p2.0] * &params.a[p2.1]);
            let f1 = Float::with_val(
                wp,
                1u32 - Float::with_val(wp, m1.real() * &Float::with_val(wp, q.clone().pow(-(v as i32 + 1)))),
            );
            let f2 = Float::with_val(
                wp,
                1u32 - Float::with_val(wp, m2.real() * &Float::with_val(wp, q.clone().pow(v as i32))),
            );
            -(f1 * f2)
        }
    }
}

/// The virtual-state polynomial of label `v` evaluated at a complex point
/// (degree-`v` classical polynomial at the twisted parameters).
pub fn virtual_xi_value(
    params: &FamilyParams,
    t: TwistType,
    v: u32,
    x: &Complex,
) -> Result<Complex> {
    twist(params, t).polynomial_value(v, x)
}

/// The virtual-state polynomial of label `v` in coefficient form.
pub fn virtual_xi(params: &FamilyParams, t: TwistType, v: u32) -> Result<RealEtaPoly> {
    twist(params, t).polynomial(v)
}

/// The largest admissible virtual label for a twist type: the greatest
/// integer strictly below `lambda_pair_sum - 1` (an exact integer value
/// drops to the integer below it).
pub fn v_range_max(params: &FamilyParams, t: TwistType) -> u32 {
    let wp = params.prec.bits() + 32;
    let (i, j) = match t {
        TwistType::TypeI => (0, 1),
        TwistType::TypeII => (2, 3),
    };
    let pair_sum = match params.family {
        Family::Wilson => {
            let s = Complex::with_val(wp, &params.a[i] + &params.a[j]);
            s.real().clone()
        }
        Family::AskeyWilson => {
            let q = params.q.as_ref().unwrap();
            let m = Complex::with_val(wp, &params.a[i] * &params.a[j]);
            Float::with_val(wp, m.real().clone().ln() / q.clone().ln())
        }
    };
    let t_val = Float::with_val(wp, &pair_sum - 1u32);
    let fl = t_val.clone().floor();
    let frac = Float::with_val(wp, &t_val - &fl).abs();
    let tie = frac < two_pow(params.prec, -48) || {
        let up = Float::with_val(wp, &fl + 1u32);
        Float::with_val(wp, &t_val - &up).abs() < two_pow(params.prec, -48)
    };
    let mut m = fl.to_f64();
    if tie {
        // Exact integer: step down by one; near-integer-from-below rounds up first.
        let rounded = t_val.clone().round().to_f64();
        m = rounded - 1.0;
    }
    if m < 0.0 {
        0
    } else {
        m as u32
    }
}

/// A set of virtual-state labels to delete, kept sorted ascending within
/// each type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeletionSet {
    type_i: Vec<u32>,
    type_ii: Vec<u32>,
}

impl DeletionSet {
    /// Builds a deletion set; labels must be distinct within each type and
    /// at least 1 (label 0 states are never deleted).
    pub fn new(mut type_i: Vec<u32>, mut type_ii: Vec<u32>) -> Result<Self> {
        type_i.sort_unstable();
        type_ii.sort_unstable();
        for list in [&type_i, &type_ii] {
            for w in list.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::InvalidParams(format!(
                        "duplicate deletion label {}",
                        w[0]
                    )));
                }
            }
            if list.first().is_some_and(|&d| d == 0) {
                return Err(Error::InvalidParams(
                    "label 0 virtual states cannot be deleted".into(),
                ));
            }
        }
        Ok(Self { type_i, type_ii })
    }

    /// Builds a deletion set that may contain label 0 entries. Ordinary
    /// construction rejects label 0; the level-0 reduction identities
    /// need it on the unreduced side.
    pub fn with_zero_allowed(mut type_i: Vec<u32>, mut type_ii: Vec<u32>) -> Result<Self> {
        type_i.sort_unstable();
        type_ii.sort_unstable();
        for list in [&type_i, &type_ii] {
            for w in list.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::InvalidParams(format!(
                        "duplicate deletion label {}",
                        w[0]
                    )));
                }
            }
        }
        Ok(Self { type_i, type_ii })
    }

    /// The empty deletion set (the undeformed system).
    pub fn empty() -> Self {
        Self {
            type_i: Vec::new(),
            type_ii: Vec::new(),
        }
    }

    /// Parses the textual form `"1I,2I,1II"` (case-insensitive suffix).
    pub fn parse(s: &str) -> Result<Self> {
        let mut type_i = Vec::new();
        let mut type_ii = Vec::new();
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Self::new(type_i, type_ii);
        }
        for part in trimmed.split(',') {
            let item = part.trim();
            let upper = item.to_ascii_uppercase();
            let (digits, which) = if let Some(d) = upper.strip_suffix("II") {
                (d, TwistType::TypeII)
            } else if let Some(d) = upper.strip_suffix('I') {
                (d, TwistType::TypeI)
            } else {
                return Err(Error::InvalidParams(format!(
                    "deletion label `{}` must end in I or II",
                    item
                )));
            };
            let v: u32 = digits.trim().parse().map_err(|_| {
                Error::InvalidParams(format!("invalid deletion label `{}`", item))
            })?;
            match which {
                TwistType::TypeI => type_i.push(v),
                TwistType::TypeII => type_ii.push(v),
            }
        }
        Self::new(type_i, type_ii)
    }

    /// Type-I labels, ascending.
    pub fn type_i(&self) -> &[u32] {
        &self.type_i
    }

    /// Type-II labels, ascending.
    pub fn type_ii(&self) -> &[u32] {
        &self.type_ii
    }

    pub fn m_i(&self) -> usize {
        self.type_i.len()
    }

    pub fn m_ii(&self) -> usize {
        self.type_ii.len()
    }

    /// Total number of deletions `M`.
    pub fn m(&self) -> usize {
        self.type_i.len() + self.type_ii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m() == 0
    }

    /// The fixed column order used in every determinant: type-I labels
    /// ascending, then type-II labels ascending.
    pub fn labels(&self) -> Vec<(TwistType, u32)> {
        self.type_i
            .iter()
            .map(|&v| (TwistType::TypeI, v))
            .chain(self.type_ii.iter().map(|&v| (TwistType::TypeII, v)))
            .collect()
    }

    /// The degree `ell` of the denominator polynomial.
    pub fn ell(&self) -> usize {
        let s: u32 = self.type_i.iter().sum::<u32>() + self.type_ii.iter().sum::<u32>();
        let mi = self.m_i();
        let mii = self.m_ii();
        s as usize - mi * mi.saturating_sub(1) / 2 - mii * mii.saturating_sub(1) / 2 + mi * mii
    }

    /// Canonical text form, e.g. `"1I,2I,1II"` (empty string for no
    /// deletions).
    pub fn to_string_canonical(&self) -> String {
        let mut parts: Vec<String> = self.type_i.iter().map(|v| format!("{}I", v)).collect();
        parts.extend(self.type_ii.iter().map(|v| format!("{}II", v)));
        parts.join(",")
    }
}

/// Validates that a deletion set is admissible at a parameter point:
/// base-range constraints, labels within the allowed index range, and the
/// strengthened parameter inequalities for the deepest deleted label of
/// each type.
pub fn validate_deletion(params: &FamilyParams, d: &DeletionSet) -> Result<()> {
    params.check_base_range()?;
    let wp = params.prec.bits() + 32;
    for (t, list) in [
        (TwistType::TypeI, d.type_i()),
        (TwistType::TypeII, d.type_ii()),
    ] {
        if list.is_empty() {
            continue;
        }
        let vmax = v_range_max(params, t);
        for &v in list {
            if v > vmax {
                return Err(Error::InvalidParams(format!(
                    "deletion label {} of {:?} exceeds admissible maximum {}",
                    v, t, vmax
                )));
            }
        }
        let dmax = *list.last().unwrap();
        let bound_half = Float::with_val(wp, dmax + 1) / 2u32;
        let idx: [usize; 2] = match t {
            TwistType::TypeI => [0, 1],
            TwistType::TypeII => [2, 3],
        };
        match params.family {
            Family::Wilson => {
                for i in idx {
                    if !(*params.a[i].real() > bound_half) {
                        return Err(Error::InvalidParams(format!(
                            "Wilson deletion up to {} needs Re a_{} > {}, got {}",
                            dmax,
                            i + 1,
                            bound_half,
                            params.a[i].real()
                        )));
                    }
                }
            }
            Family::AskeyWilson => {
                let q = params.q.as_ref().unwrap();
                let qb = Float::with_val(wp, q.clone().pow(&bound_half));
                for i in idx {
                    if !(cabs(&params.a[i]) < qb) {
                        return Err(Error::InvalidParams(format!(
                            "Askey-Wilson deletion up to {} needs |a_{}| < q^{}, got {}",
                            dmax,
                            i + 1,
                            bound_half,
                            cabs(&params.a[i])
                        )));
                    }
                }
            }
        }
    }
    if params.family == Family::AskeyWilson && !d.is_empty() {
        // Pair products must be real positive for the twist constants.
        for (i, j) in [(0usize, 1usize), (2, 3)] {
            let m = Complex::with_val(wp, &params.a[i] * &params.a[j]);
            let im_ok = m.imag().clone().abs()
                < cabs(&m) * two_pow(params.prec, -(params.prec.bits() as i64 / 2));
            if !im_ok || !(*m.real() > 0f64) {
                return Err(Error::InvalidParams(format!(
                    "Askey-Wilson deletions need a_{}a_{} real and positive",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{creal, Precision};
    use rug::ops::CompleteRound;

    fn p256() -> Precision {
        Precision::new(256).unwrap()
    }

    fn wilson_2222() -> FamilyParams {
        let two = Complex::with_val(288, 2);
        FamilyParams::wilson([two.clone(), two.clone(), two.clone(), two], p256())
    }

    fn aw_system() -> FamilyParams {
        let a = Complex::with_val(288, Float::parse("0.05").unwrap().complete(288));
        FamilyParams::askey_wilson(
            [a.clone(), a.clone(), a.clone(), a],
            Float::parse("0.1").unwrap().complete(288),
            p256(),
        )
    }

    fn tol_bits(b: i64) -> Float {
        Float::with_val(64, 1u32) << (-b as i32)
    }

    #[test]
    fn twist_is_involutive() {
        for params in [wilson_2222(), aw_system()] {
            for t in [TwistType::TypeI, TwistType::TypeII] {
                let back = twist(&twist(&params, t), t);
                for (orig, new) in params.a.iter().zip(&back.a) {
                    let d = cabs(&Complex::with_val(288, orig - new));
                    assert!(d < tol_bits(200));
                }
            }
        }
    }

    #[test]
    fn virtual_energy_matches_intertwining_constants() {
        // tE_v = alpha * E_v(twisted) + alpha'
        for params in [wilson_2222(), aw_system()] {
            for t in [TwistType::TypeI, TwistType::TypeII] {
                for v in 0..=2u32 {
                    let lhs = virtual_energy(&params, t, v);
                    let tw = twist(&params, t);
                    let rhs = Float::with_val(
                        288,
                        alpha(&params, t) * tw.energy(v) + alpha_prime(&params, t),
                    );
                    let d = Float::with_val(288, &lhs - &rhs).abs();
                    assert!(
                        d < tol_bits(190),
                        "family {:?} {:?} v {}: {} vs {}",
                        params.family,
                        t,
                        v,
                        lhs,
                        rhs
                    );
                }
            }
        }
    }

    #[test]
    fn virtual_energies_negative_in_admissible_range() {
        let w = wilson_2222();
        for t in [TwistType::TypeI, TwistType::TypeII] {
            for v in 1..=2u32 {
                assert!(virtual_energy(&w, t, v) < 0f64);
            }
        }
        let aw = aw_system();
        assert!(virtual_energy(&aw, TwistType::TypeI, 1) < 0f64);
    }

    #[test]
    fn label_range_tie_rule() {
        // Wilson a = (2,2,2,2): pair sum 4, so the bound is the greatest
        // integer strictly below 3, which is 2.
        let w = wilson_2222();
        assert_eq!(v_range_max(&w, TwistType::TypeI), 2);
        assert_eq!(v_range_max(&w, TwistType::TypeII), 2);
        // Askey-Wilson a_i = 0.05, q = 0.1: lambda pair sum ~ 2.602,
        // greatest integer below 1.602 is 1.
        let aw = aw_system();
        assert_eq!(v_range_max(&aw, TwistType::TypeI), 1);
    }

    #[test]
    fn virtual_polynomials_real_and_of_correct_degree() {
        for params in [wilson_2222(), aw_system()] {
            let vmax = v_range_max(&params, TwistType::TypeI).min(2);
            for v in 1..=vmax {
                let xi = virtual_xi(&params, TwistType::TypeI, v).unwrap();
                assert_eq!(xi.degree(), v as usize);
                assert!(!xi.is_degenerate());
                // Pointwise value matches the coefficient form.
                let x = creal(params.prec, &Float::with_val(288, 0.83));
                let direct = virtual_xi_value(&params, TwistType::TypeI, v, &x).unwrap();
                let via_poly = params.eval_eta_poly(&xi, &x);
                let d = cabs(&Complex::with_val(288, direct - via_poly));
                assert!(d < tol_bits(190));
            }
        }
    }

    #[test]
    fn deletion_set_construction_and_parse() {
        let d = DeletionSet::new(vec![2, 1], vec![1]).unwrap();
        assert_eq!(d.type_i(), &[1, 2]);
        assert_eq!(d.m(), 3);
        assert_eq!(d.ell(), 1 + 2 + 1 - 1 - 0 + 2);
        assert!(DeletionSet::new(vec![1, 1], vec![]).is_err());
        assert!(DeletionSet::new(vec![0], vec![]).is_err());

        let parsed = DeletionSet::parse("1I, 2I, 1II").unwrap();
        assert_eq!(parsed, d);
        assert_eq!(parsed.to_string_canonical(), "1I,2I,1II");
        assert!(DeletionSet::parse("3X").is_err());
        assert!(DeletionSet::parse("").unwrap().is_empty());
    }

    #[test]
    fn ell_examples() {
        // Single deletion of label d gives ell = d.
        let d1 = DeletionSet::new(vec![2], vec![]).unwrap();
        assert_eq!(d1.ell(), 2);
        // {1I, 2I}: 1 + 2 - 1 = 2.
        let d2 = DeletionSet::new(vec![1, 2], vec![]).unwrap();
        assert_eq!(d2.ell(), 2);
        // {1I, 1II}: 1 + 1 + 1 = 3.
        let d3 = DeletionSet::new(vec![1], vec![1]).unwrap();
        assert_eq!(d3.ell(), 3);
    }

    #[test]
    fn validation_accepts_reference_systems() {
        let w = wilson_2222();
        for d in [
            DeletionSet::empty(),
            DeletionSet::new(vec![1], vec![]).unwrap(),
            DeletionSet::new(vec![2], vec![]).unwrap(),
            DeletionSet::new(vec![1, 2], vec![]).unwrap(),
            DeletionSet::new(vec![1], vec![1]).unwrap(),
        ] {
            validate_deletion(&w, &d).unwrap();
        }
        let aw = aw_system();
        validate_deletion(&aw, &DeletionSet::new(vec![1], vec![]).unwrap()).unwrap();
    }

    #[test]
    fn validation_rejects_out_of_range_labels() {
        let w = wilson_2222();
        // Label 3 exceeds the admissible maximum 2.
        assert!(validate_deletion(&w, &DeletionSet::new(vec![3], vec![]).unwrap()).is_err());
        let aw = aw_system();
        // Label 2 exceeds the admissible maximum 1.
        assert!(validate_deletion(&aw, &DeletionSet::new(vec![2], vec![]).unwrap()).is_err());
    }
}
