//! Modified Bessel function of the second kind, `K_nu(z)`, for real order
//! and positive real argument.
//!
//! The order is reduced to `mu = nu - round(nu)` in `[-1/2, 1/2)`. `K_mu` and
//! `K_{mu+1}` come from Temme's series when `z < 2` and from Steed's
//! continued fraction otherwise; forward recurrence in the order (stable for
//! `K`) then reaches `nu`. `K_{-nu} = K_nu`, so only `|nu|` is used.
//!
//! Half-integer orders have the closed form
//! `K_{1/2}(z) = K_{-1/2}(z) = sqrt(pi / (2z)) e^{-z}`. Some references print
//! `sqrt(2/pi) z^{-1/2} e^{-z}` for `K_{-1/2}`; that is off by a factor of
//! `pi/2` against the integral representation
//! `K_nu(z) = int_0^inf e^{-z cosh u} cosh(nu u) du`, which is what the tests
//! of this module treat as ground truth.

use std::f64::consts::PI;

use crate::error::{domain, Result};

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 100_000;

/// Taylor coefficients of `1/Gamma(z) = sum_k C[k-1] z^k`.
const RECIP_GAMMA: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

/// `K_nu(z)`. Returns exactly 0 once `e^{-z}` underflows.
pub fn bessel_k(nu: f64, z: f64) -> Result<f64> {
    let scaled = bessel_k_scaled(nu, z)?;
    if z > 745.0 {
        return Ok(0.0);
    }
    Ok(scaled * (-z).exp())
}

/// `e^z K_nu(z)`, free of underflow for large `z`.
pub fn bessel_k_scaled(nu: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain(format!("K_nu(z) needs finite z > 0, got {z}")));
    }
    if !nu.is_finite() {
        return Err(domain("Bessel order must be finite"));
    }
    Ok(k_scaled_unchecked(nu.abs(), z))
}

pub(crate) fn k_scaled_unchecked(nu: f64, z: f64) -> f64 {
    if (nu - 0.5).abs() < 1e-15 {
        return (PI / (2.0 * z)).sqrt();
    }
    let nl = (nu + 0.5).floor();
    let mu = nu - nl;
    let (mut k0, mut k1) = if z < 2.0 {
        let (a, b) = temme_series(mu, z);
        let ez = z.exp();
        (a * ez, b * ez)
    } else {
        steed_cf2(mu, z)
    };
    let two_over_z = 2.0 / z;
    for i in 1..=(nl as usize) {
        let next = (mu + i as f64) * two_over_z * k1 + k0;
        k0 = k1;
        k1 = next;
    }
    k0
}

/// `(gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu))` for `|mu| <= 1/2`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mu2 = mu * mu;
    let mut even = 0.0;
    let mut odd = 0.0;
    // Horner on mu^2 over the even and odd index subsequences.
    for k in (0..13).rev() {
        odd = odd * mu2 + RECIP_GAMMA[2 * k];
        even = even * mu2 + RECIP_GAMMA[2 * k + 1];
    }
    let gam1 = -even;
    let gam2 = odd;
    let gampl = gam2 - mu * gam1;
    let gammi = gam2 + mu * gam1;
    (gam1, gam2, gampl, gammi)
}

fn temme_series(mu: f64, z: f64) -> (f64, f64) {
    let mu2 = mu * mu;
    let x2 = 0.5 * z;
    let pimu = PI * mu;
    let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
    let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = 0.5 * ee / gampl;
    let mut q = 0.5 / (ee * gammi);
    let mut c = 1.0;
    let dd = x2 * x2;
    let mut sum1 = p;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c *= dd / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        sum1 += c * (p - fi * ff);
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    (sum, sum1 * 2.0 / z)
}

/// Scaled `(e^z K_mu, e^z K_{mu+1})` from Steed's method.
fn steed_cf2(mu: f64, z: f64) -> (f64, f64) {
    let mu2 = mu * mu;
    let mut b = 2.0 * (1.0 + z);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu2;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let kmu = (PI / (2.0 * z)).sqrt() / s;
    let kmu1 = kmu * (mu + z + 0.5 - h) / z;
    (kmu, kmu1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn half_integer_closed_form() {
        for &z in &[1e-6, 0.3, 1.0, 2.0, 7.5, 40.0] {
            let expected = (PI / (2.0 * z)).sqrt() * (-z).exp();
            assert_relative_eq!(bessel_k(0.5, z).unwrap(), expected, max_relative = 1e-13);
            assert_relative_eq!(bessel_k(-0.5, z).unwrap(), expected, max_relative = 1e-13);
            // K_{3/2}(z) = sqrt(pi/2z) e^{-z} (1 + 1/z)
            assert_relative_eq!(
                bessel_k(1.5, z).unwrap(),
                expected * (1.0 + 1.0 / z),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn order_symmetry() {
        for &nu in &[0.2, 1.0, 2.7, 4.9] {
            for &z in &[0.01, 1.9, 2.1, 30.0] {
                assert_eq!(bessel_k(nu, z).unwrap(), bessel_k(-nu, z).unwrap());
            }
        }
    }

    #[test]
    fn reference_values() {
        assert_relative_eq!(bessel_k(0.5, 1.0).unwrap(), 0.461_068_504_447_894_6, max_relative = 1e-12);
        assert_relative_eq!(bessel_k(0.0, 2.0).unwrap(), 0.113_893_872_749_533_4, max_relative = 1e-12);
    }

    #[test]
    fn continuity_across_branch_switch() {
        for &nu in &[0.0, 0.3, 1.0, 3.2] {
            let lo = bessel_k(nu, 2.0 - 1e-12).unwrap();
            let hi = bessel_k(nu, 2.0).unwrap();
            assert_relative_eq!(lo, hi, max_relative = 1e-11);
        }
    }

    #[test]
    fn rejects_nonpositive_argument() {
        assert!(bessel_k(0.0, 0.0).is_err());
        assert!(bessel_k(1.0, -1.0).is_err());
    }

    #[test]
    fn underflow_is_exact_zero() {
        assert_eq!(bessel_k(0.0, 800.0).unwrap(), 0.0);
        assert!(bessel_k_scaled(0.0, 800.0).unwrap() > 0.0);
    }
}
