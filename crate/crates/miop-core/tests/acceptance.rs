//! Acceptance gate: end-to-end checks of normalization, eigenvalue
//! equations, degree and leading-coefficient laws, orthogonality,
//! the algebraic identity web, oscillation counts, hermiticity, and the
//! raw determinant oracles, each reported as a single pass/fail line.

use miop_core::classical::FamilyParams;
use miop_core::multi::{raw_eigenfunction, raw_potential, MultiIndexedSystem};
use miop_core::num::{two_pow, Precision};
use miop_core::verify::{
    default_spec, gram_matrix, hermiticity_scan, identity_suite, integrate_weighted,
    oscillation_check, VerificationReport,
};
use miop_core::virtual_states::DeletionSet;
use rug::ops::Pow;
use rug::{Complex, Float};

const WP: u32 = 288;

fn p256() -> Precision {
    Precision::new(256).unwrap()
}

fn c(v: f64) -> Complex {
    Complex::with_val(WP, v)
}

fn wilson_base() -> FamilyParams {
    FamilyParams::wilson([c(2.0), c(2.0), c(2.0), c(2.0)], p256())
}

fn wilson_asym() -> FamilyParams {
    FamilyParams::wilson([c(1.3), c(1.9), c(2.6), c(3.4)], p256())
}

fn aw_base() -> FamilyParams {
    FamilyParams::askey_wilson(
        [c(0.05), c(0.05), c(0.05), c(0.05)],
        Float::with_val(WP, 0.1),
        p256(),
    )
}

fn ds(i: &[u32], ii: &[u32]) -> DeletionSet {
    DeletionSet::new(i.to_vec(), ii.to_vec()).unwrap()
}

/// The full test matrix: the symmetric Wilson point with pure type-I
/// deletions, an asymmetric Wilson point for the mixed-type deletion
/// (at the symmetric point the two virtual-state polynomials coincide
/// and the mixed determinant vanishes identically), and the
/// Askey-Wilson point.
fn matrix() -> Vec<(FamilyParams, DeletionSet)> {
    vec![
        (wilson_base(), DeletionSet::empty()),
        (wilson_base(), ds(&[1], &[])),
        (wilson_base(), ds(&[2], &[])),
        (wilson_base(), ds(&[1, 2], &[])),
        (wilson_asym(), ds(&[1], &[1])),
        (aw_base(), DeletionSet::empty()),
        (aw_base(), ds(&[1], &[])),
    ]
}

fn report_all_pass(rep: &VerificationReport, what: &str) {
    let failed: Vec<_> = rep
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| {
            format!(
                "{} (measured {:e}, tolerance {:e})",
                c.name,
                c.measured.to_f64(),
                c.tolerance.to_f64()
            )
        })
        .collect();
    assert!(failed.is_empty(), "{}: failing checks: {:?}", what, failed);
}

fn pow10(e: i32) -> Float {
    Float::with_val(WP, Float::with_val(WP, 10).pow(e))
}

/// Criterion 1: the simplest Wilson ground state integrates to pi/3 and
/// the first diagonal Gram entries match the closed-form norms.
#[test]
fn criterion_1_ground_state_normalization() {
    let params = FamilyParams::wilson([c(1.0), c(1.0), c(1.0), c(1.0)], p256());
    let sys = MultiIndexedSystem::new(params, DeletionSet::empty()).unwrap();
    let spec = default_spec(&sys, 4).unwrap();
    let v = integrate_weighted(&sys, |_| Ok(Float::with_val(WP, 1)), &spec).unwrap();
    let want = Float::with_val(WP, rug::float::Constant::Pi) / 3u32;
    let rel = Float::with_val(WP, Float::with_val(WP, &v - &want).abs() / &want);
    assert!(
        rel < pow10(-20),
        "ground-state integral off by relative {:e}",
        rel.to_f64()
    );
    let (g, rep) = gram_matrix(&sys, 3).unwrap();
    report_all_pass(&rep, "simplest Wilson Gram");
    for n in 0..=3u32 {
        let h = sys.norm_closed(n).unwrap();
        let rel = Float::with_val(
            WP,
            Float::with_val(WP, &g[n as usize][n as usize] - &h).abs() / &h,
        );
        assert!(rel < pow10(-20), "diagonal {} off by relative {:e}", n, rel.to_f64());
    }
    println!("criterion 1 (ground-state normalization): pass");
}

/// Criterion 2: the difference operator reproduces the eigenvalue on
/// every polynomial of the test matrix up to index four.
#[test]
fn criterion_2_eigenvalue_equations() {
    let tol = two_pow(p256(), -200);
    for (params, d) in matrix() {
        let sys = MultiIndexedSystem::new(params.clone(), d.clone()).unwrap();
        for n in 0..=4u32 {
            let mp = sys.polynomial(n).unwrap();
            if n == 0 {
                // The image is identically zero; check pointwise.
                let scale = mp.poly.max_abs_coeff().max(&Float::with_val(WP, 1));
                for x in params.sample_points(3) {
                    let xc = Complex::with_val(WP, &x);
                    let hv = sys.htilde_at(&mp.poly, &xc).unwrap();
                    let res = Float::with_val(
                        WP,
                        Float::with_val(WP, hv.abs().real()) / &scale,
                    );
                    assert!(
                        res < tol,
                        "{} n=0 residual {:e}",
                        d.to_string_canonical(),
                        res.to_f64()
                    );
                }
            } else {
                let hp = sys.apply_htilde(&mp.poly).unwrap();
                let want = mp.poly.scaled(&params.energy(n));
                let scale = want.max_abs_coeff().max(&Float::with_val(WP, 1));
                let res = Float::with_val(WP, hp.max_coeff_distance(&want) / &scale);
                assert!(
                    res < tol,
                    "{} n={} residual {:e}",
                    d.to_string_canonical(),
                    n,
                    res.to_f64()
                );
            }
        }
    }
    println!("criterion 2 (eigenvalue equations): pass");
}

/// Criterion 3: degrees follow the deletion-set law and the leading
/// coefficients match their closed forms.
#[test]
fn criterion_3_degrees_and_leading_coefficients() {
    let tol = pow10(-30);
    for (params, d) in matrix() {
        let sys = MultiIndexedSystem::new(params.clone(), d.clone()).unwrap();
        assert_eq!(sys.xi().degree(), d.ell(), "{}", d.to_string_canonical());
        if !d.is_empty() {
            let want = miop_core::multi::leading_xi(&params, &d);
            let got = sys.xi().leading().clone();
            let rel = Float::with_val(
                WP,
                Float::with_val(WP, &got - &want).abs() / &want.clone().abs(),
            );
            assert!(rel < tol, "denominator leading {:e}", rel.to_f64());
        }
        for n in 0..=4u32 {
            let mp = sys.polynomial(n).unwrap();
            assert_eq!(mp.poly.degree(), d.ell() + n as usize);
            let want = if d.is_empty() {
                params.leading_c(n)
            } else {
                miop_core::multi::leading_p(&params, &d, n)
            };
            let rel = Float::with_val(
                WP,
                Float::with_val(WP, mp.poly.leading() - &want).abs() / &want.clone().abs(),
            );
            assert!(
                rel < tol,
                "{} n={} leading {:e}",
                d.to_string_canonical(),
                n,
                rel.to_f64()
            );
        }
    }
    println!("criterion 3 (degree and leading laws): pass");
}

/// Criterion 4: the Gram matrix of each system is diagonal with the
/// closed-form norms on the diagonal.
#[test]
fn criterion_4_orthogonality() {
    for (params, d) in matrix() {
        let sys = MultiIndexedSystem::new(params, d.clone()).unwrap();
        let (_, rep) = gram_matrix(&sys, 4).unwrap();
        report_all_pass(&rep, &format!("Gram {}", d.to_string_canonical()));
    }
    println!("criterion 4 (orthogonality): pass");
}

/// Criterion 5: the algebraic identity web (determinant rules, weight
/// and potential shift relations, twisted factorizations, lowest-member
/// relation, shift ladder, kernel relations, difference equations,
/// equivalence, and level-0 reduction).
#[test]
fn criterion_5_identity_web() {
    for (params, d) in [
        (wilson_base(), ds(&[1, 2], &[])),
        (wilson_asym(), ds(&[1], &[1])),
        (aw_base(), ds(&[1], &[])),
    ] {
        let rep = identity_suite(&params, &d).unwrap();
        report_all_pass(&rep, &format!("identity web {}", d.to_string_canonical()));
    }
    println!("criterion 5 (identity web): pass");
}

/// Criterion 6: the index-n polynomial has exactly n zeros in the
/// orthogonality range of the sinusoidal coordinate.
#[test]
fn criterion_6_oscillation() {
    for (params, d) in matrix() {
        let sys = MultiIndexedSystem::new(params, d.clone()).unwrap();
        for n in 0..=4u32 {
            let count = oscillation_check(&sys, n).unwrap();
            assert_eq!(
                count,
                n as usize,
                "{} n={}",
                d.to_string_canonical(),
                n
            );
        }
    }
    println!("criterion 6 (oscillation counts): pass");
}

/// Criterion 7: the denominator polynomial has no zeros in the shifted
/// strip for any test system, and the deformed potential is independent
/// of the deletion order.
#[test]
fn criterion_7_hermiticity() {
    for (params, d) in matrix() {
        let rep = hermiticity_scan(&params, &d);
        report_all_pass(&rep, &format!("hermiticity {}", d.to_string_canonical()));
    }
    let tol = two_pow(p256(), -190);
    for (params, d) in [(wilson_base(), ds(&[1, 2], &[])), (wilson_asym(), ds(&[1], &[1]))] {
        let order = d.labels();
        let mut rev = order.clone();
        rev.reverse();
        for x in params.sample_points(10) {
            let z = Complex::with_val(WP, (&x, &Float::with_val(WP, 0.3)));
            let a = raw_potential(&params, &order, &z).unwrap();
            let b = raw_potential(&params, &rev, &z).unwrap();
            let scale = Float::with_val(WP, a.clone().abs().real())
                .max(&Float::with_val(WP, 1));
            let diff = Complex::with_val(WP, &a - &b);
            let res = Float::with_val(WP, Float::with_val(WP, diff.abs().real()) / &scale);
            assert!(res < tol, "order independence residual {:e}", res.to_f64());
        }
    }
    println!("criterion 7 (hermiticity and order independence): pass");
}

/// Criterion 8: the polynomial construction agrees with the raw
/// determinant of full virtual-state wavefunctions at pseudo-random
/// points, up to one global determinant sign per system.
#[test]
fn criterion_8_raw_determinant_oracle() {
    let tol = two_pow(p256(), -190);
    // Small deterministic linear congruential generator for the sample
    // abscissas.
    let mut state: u64 = 0x9e3779b97f4a7c15;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 33) as f64) / ((1u64 << 31) as f64)
    };
    for (params, d) in [
        (wilson_base(), ds(&[1], &[])),
        (wilson_base(), ds(&[1, 2], &[])),
        (wilson_asym(), ds(&[1], &[1])),
        (aw_base(), ds(&[1], &[])),
    ] {
        assert!(d.m() <= 2);
        let sys = MultiIndexedSystem::new(params.clone(), d.clone()).unwrap();
        let order = d.labels();
        let (lo, hi) = match params.family {
            miop_core::classical::Family::Wilson => (0.3, 3.0),
            miop_core::classical::Family::AskeyWilson => (0.3, 2.8),
        };
        let mut sign: Option<bool> = None;
        for n in 0..2u32 {
            let mp = sys.polynomial(n).unwrap();
            for _ in 0..5 {
                let xv = lo + (hi - lo) * next();
                let x = Float::with_val(WP, xv);
                let lhs = sys.assemble_phi(&mp.poly, &x).unwrap();
                let rhs = raw_eigenfunction(&params, &order, n, &x).unwrap();
                let flipped = lhs.is_sign_negative() != rhs.is_sign_negative();
                match sign {
                    None => sign = Some(flipped),
                    Some(s) => assert_eq!(s, flipped, "inconsistent determinant sign"),
                }
                let rhs = if sign == Some(true) { -rhs } else { rhs };
                let scale = lhs.clone().abs().max(&Float::with_val(WP, 1));
                let res = Float::with_val(WP, Float::with_val(WP, &lhs - &rhs).abs() / &scale);
                assert!(
                    res < tol,
                    "{} n={} x={} residual {:e}",
                    d.to_string_canonical(),
                    n,
                    xv,
                    res.to_f64()
                );
            }
        }
    }
    println!("criterion 8 (raw determinant oracle): pass");
}
