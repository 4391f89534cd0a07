use num_complex::Complex64;

use super::gamma::gamma;
use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Scaled generalized exponential integral `e^z E_ν(z)` on the principal branch,
/// where `E_ν(z) = ∫_1^∞ e^{-zu} u^{-ν} du`.
///
/// Power series (with the Γ(1-ν) z^{ν-1} term, or the logarithmic form for
/// integer ν) for `|z| < 1`; modified-Lentz continued fraction otherwise.
pub fn gen_exp_integral_scaled(nu: f64, z: Complex64) -> Result<Complex64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::InvalidArgument(format!("order must be positive, got {nu}")));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::Domain(format!(
            "E_nu(z) has a branch cut on (-inf, 0]; got z = {z}"
        )));
    }
    // the continued fraction crawls near the cut, where the series is still usable
    if z.norm() < 1.0 || (z.re < 0.0 && z.norm() < 20.0) {
        Ok(z.exp() * series(nu, z))
    } else {
        continued_fraction(nu, z)
    }
}

fn series(nu: f64, z: Complex64) -> Complex64 {
    let is_integer = nu.fract() == 0.0;
    let minus_z = -z;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0); // (-z)^k / k!
    let n_minus_1 = nu - 1.0;
    for k in 0..200 {
        let kf = k as f64;
        if k > 0 {
            power *= minus_z / kf;
        }
        if is_integer && kf == n_minus_1 {
            continue;
        }
        let term = power / (kf - n_minus_1);
        sum += term;
        if k > 2 && term.norm() <= EPS * sum.norm() {
            break;
        }
    }
    if is_integer {
        let n = nu as usize;
        let mut psi = -EULER_GAMMA;
        let mut fact = 1.0;
        for m in 1..n {
            psi += 1.0 / m as f64;
            fact *= m as f64;
        }
        minus_z.powi(n as i32 - 1) / fact * (psi - z.ln()) - sum
    } else {
        gamma(1.0 - nu) * z.powf(nu - 1.0) - sum
    }
}

fn continued_fraction(nu: f64, z: Complex64) -> Result<Complex64> {
    // e^z E_ν(z) = 1/(z+ν- 1·ν/(z+ν+2- 2(ν+1)/(z+ν+4- ...)))
    let mut b = z + nu;
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..20_000 {
        let fi = i as f64;
        let an = -fi * (nu - 1.0 + fi);
        b += 2.0;
        d = an * d + b;
        if d.norm() < TINY {
            d = Complex64::new(TINY, 0.0);
        }
        c = b + an / c;
        if c.norm() < TINY {
            c = Complex64::new(TINY, 0.0);
        }
        d = d.inv();
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < EPS {
            return Ok(h);
        }
    }
    Err(Error::AccuracyLoss(format!(
        "continued fraction for E_{nu}({z}) did not converge"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::quad::{integrate_to_infinity, QuadOptions};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// e^z E_ν(z) = z^{ν-1} ∫_0^∞ e^{-r} (z + r)^{-ν} dr, along the horizontal ray from z.
    fn ray_oracle(nu: f64, z: Complex64) -> Complex64 {
        let r = integrate_to_infinity(
            |r: f64| (-r).exp() * (z + r).powf(-nu),
            0.0,
            QuadOptions::with_tol(1e-16, 1e-14),
        )
        .unwrap();
        z.powf(nu - 1.0) * r.value
    }

    #[test]
    fn e1_at_one() {
        // E_1(1) = 0.21938393439552..., times e
        let v = gen_exp_integral_scaled(1.0, c(1.0, 0.0)).unwrap();
        assert!((v.re - 0.596_347_362_323_194).abs() < 1e-14);
        assert!(v.im.abs() < 1e-16);
        let below = gen_exp_integral_scaled(1.0, c(0.999_999, 0.0)).unwrap();
        assert!((below.re - v.re).abs() < 1e-6);
    }

    #[test]
    fn large_argument_tends_to_reciprocal() {
        for &x in &[1e3, 1e5, 1e8] {
            let v = gen_exp_integral_scaled(1.5, c(x, 0.0)).unwrap();
            assert!((v.re * x - 1.0).abs() < 2.0 / x);
        }
    }

    #[test]
    fn near_imaginary_axis_matches_ray_quadrature() {
        let z = c(0.04, 10.0);
        let v = gen_exp_integral_scaled(1.5, z).unwrap();
        let o = ray_oracle(1.5, z);
        assert!((v - o).norm() / o.norm() < 1e-10, "{v} vs {o}");
    }

    #[test]
    fn both_regimes_match_ray_quadrature() {
        for &(nu, re, im) in &[
            (1.5, 0.3, 0.2),
            (1.5, 0.004, 0.1),
            (1.5, 0.9, -0.3),
            (1.3, 2.0, 5.0),
            (2.0, 0.5, 0.5),
            (1.0, 0.2, -0.7),
            (1.7, 40.0, 300.0),
        ] {
            let z = c(re, im);
            let v = gen_exp_integral_scaled(nu, z).unwrap();
            let o = ray_oracle(nu, z);
            assert!((v - o).norm() / o.norm() < 1e-10, "nu={nu} z={z}: {v} vs {o}");
        }
    }

    #[test]
    fn branch_cut_is_rejected() {
        assert!(matches!(gen_exp_integral_scaled(1.5, c(-1.0, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(gen_exp_integral_scaled(1.5, c(0.0, 0.0)), Err(Error::Domain(_))));
        assert!(gen_exp_integral_scaled(1.5, c(-1.0, 1e-3)).is_ok());
        assert!(matches!(gen_exp_integral_scaled(0.0, c(1.0, 0.0)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn recurrence_in_the_right_half_plane() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let z = c(rng.gen_range(1e-3..5.0), rng.gen_range(-50.0..50.0));
            let nu = rng.gen_range(0.2..3.0);
            let lhs = nu * gen_exp_integral_scaled(nu + 1.0, z).unwrap();
            let rhs = 1.0 - z * gen_exp_integral_scaled(nu, z).unwrap();
            let scale = lhs.norm().max(1e-300);
            assert!((lhs - rhs).norm() / scale < 1e-12, "nu={nu} z={z}: {lhs} vs {rhs}");
        }
    }
}
