//! Mainardi function `M_α(z) = W_{-α,1-α}(-z)` and the one-sided stable density.

use std::f64::consts::PI;

use super::gamma::{ln_gamma_signed, sin_pi};
use crate::error::{Error, Result};

/// Refuse the alternating series once its largest term exceeds the sum by this factor.
pub const CANCELLATION_LIMIT: f64 = 1e12;

const MAX_TERMS: usize = 2000;

fn is_half(alpha: f64) -> bool {
    alpha == 0.5
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// `M_{1/2}(z) = e^{-z²/4}/√π`.
pub fn mainardi_half(z: f64) -> f64 {
    (-0.25 * z * z).exp() / PI.sqrt()
}

/// Mainardi function for `0 < α < 1`, `z ≥ 0`.
///
/// Sums `Σ (-z)^n / (n! Γ(1-α-αn))` except at α = 1/2, where the Gaussian closed
/// form is returned. Returns [`Error::AccuracyLoss`] when the series cancels
/// beyond [`CANCELLATION_LIMIT`].
pub fn mainardi(alpha: f64, z: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("Mainardi argument must be finite and >= 0, got {z}")));
    }
    if is_half(alpha) {
        return Ok(mainardi_half(z));
    }
    mainardi_series(alpha, z)
}

/// The raw Wright series, also for α = 1/2 (used to cross-check the closed form).
pub fn mainardi_series(alpha: f64, z: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if z == 0.0 {
        let (lg, sign) = ln_gamma_signed(1.0 - alpha);
        return Ok(sign * (-lg).exp());
    }
    let ln_z = z.ln();
    let mut sum = 0.0;
    let mut largest: f64 = 0.0;
    let mut ln_factorial = 0.0;
    let mut small_run = 0;
    let mut past_peak = false;
    let mut prev_ln_mag = f64::NEG_INFINITY;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        if n > 0 {
            ln_factorial += nf.ln();
        }
        // 1/Γ(x) = sin(πx) Γ(1-x) / π for x = 1 - α(n+1) < 1
        let x = 1.0 - alpha * (nf + 1.0);
        let (ln_mag, sign) = if x > 0.0 {
            let (lg, s) = ln_gamma_signed(x);
            (nf * ln_z - ln_factorial - lg, s)
        } else {
            let s = sin_pi(x);
            if s == 0.0 {
                continue;
            }
            let (lg, _) = ln_gamma_signed(1.0 - x);
            (nf * ln_z - ln_factorial + lg + s.abs().ln() - PI.ln(), s.signum())
        };
        let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
        let term = parity * sign * ln_mag.exp();
        if !term.is_finite() {
            return Err(Error::AccuracyLoss(format!(
                "Mainardi series overflow at alpha = {alpha}, z = {z}"
            )));
        }
        sum += term;
        largest = largest.max(term.abs());
        // terms eventually fall super-exponentially; look for a sustained tail
        let base_mag = ln_mag - s_ln_correction(x);
        if base_mag < prev_ln_mag {
            past_peak = true;
        }
        prev_ln_mag = base_mag;
        if past_peak && term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            small_run += 1;
            if small_run >= 3 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    if largest > CANCELLATION_LIMIT * sum.abs() {
        return Err(Error::AccuracyLoss(format!(
            "Mainardi series for alpha = {alpha} at z = {z}: largest term {largest:e} vs sum {sum:e}"
        )));
    }
    // residual rounding can leave a tiny negative value where M is ~0
    if sum < 0.0 && sum.abs() <= 1e-15 * largest {
        return Ok(0.0);
    }
    // M_α is nonnegative and its peak stays below max(1/Γ(1-α), 1/(1-α));
    // anything outside is rounding debris
    let (lg, _) = ln_gamma_signed(1.0 - alpha);
    let ceiling = (-lg).exp().max(1.0 / (1.0 - alpha));
    if sum < 0.0 || sum > ceiling * (1.0 + 1e-8) {
        return Err(Error::AccuracyLoss(format!(
            "Mainardi series for alpha = {alpha} at z = {z} left the range of M: sum {sum:e}"
        )));
    }
    Ok(sum)
}

// strips the oscillating |sin(πx)| factor so peak detection follows the envelope
fn s_ln_correction(x: f64) -> f64 {
    if x > 0.0 {
        0.0
    } else {
        let s = sin_pi(x).abs();
        if s > 0.0 {
            s.ln()
        } else {
            0.0
        }
    }
}

/// One-sided α-stable density with Laplace transform `e^{-s^α}`:
/// `g_α(t) = α t^{-1-α} M_α(t^{-α})`.
pub fn stable_density_g(alpha: f64, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("stable density requires t > 0, got {t}")));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    if is_half(alpha) {
        // log form keeps t -> 0 from producing inf * 0
        let ln_val = (0.5f64).ln() - 1.5 * t.ln() - 0.5 * PI.ln() - 0.25 / t;
        return Ok(ln_val.exp());
    }
    let z = t.powf(-alpha);
    let m = mainardi(alpha, z)?;
    Ok(alpha * t.powf(-1.0 - alpha) * m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::gamma;
    use crate::specfun::quad::{integrate, integrate_to_infinity, QuadOptions};

    #[test]
    fn half_closed_form_values() {
        assert!((mainardi(0.5, 0.0).unwrap() - 0.564_189_583_547_756_3).abs() < 1e-15);
        assert!((mainardi(0.5, 2.0).unwrap() - 0.207_553_748_710_297_8).abs() < 1e-15);
    }

    #[test]
    fn value_at_zero_is_reciprocal_gamma() {
        let v = mainardi(1.0 / 3.0, 0.0).unwrap();
        assert!((v - 1.0 / gamma(2.0 / 3.0)).abs() < 1e-14);
        assert!((v - 0.738_488_1).abs() < 2e-7);
    }

    #[test]
    fn series_matches_closed_form_at_half() {
        for i in 0..=50 {
            let z = 0.1 * i as f64;
            let s = mainardi_series(0.5, z).unwrap();
            let c = mainardi_half(z);
            assert!(((s - c) / c).abs() < 1e-10, "z = {z}: {s} vs {c}");
        }
    }

    #[test]
    fn debris_outside_the_range_is_refused() {
        // the raw sum here is ~1e175 with a term ratio just under the limit
        assert!(matches!(mainardi(0.7, 11.390625), Err(Error::AccuracyLoss(_))));
        assert!(mainardi(0.85, 1.0).is_ok());
    }

    #[test]
    fn guard_trips_for_large_arguments() {
        let err = mainardi(0.7, 60.0).unwrap_err();
        assert!(matches!(err, Error::AccuracyLoss(_)));
        assert!(mainardi(0.5, 60.0).is_ok());
        assert!(matches!(mainardi(1.2, 1.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(mainardi(0.3, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn m_wright_density_normalisation() {
        // ∫_0^∞ M_α(z) dz = 1 and ∫ z M_α(z) dz = 1/Γ(1+α)
        for &alpha in &[0.25, 0.4, 0.6] {
            let mut z_hi = 1.0;
            while mainardi(alpha, z_hi + 0.5).is_ok() && z_hi < 60.0 {
                z_hi += 0.5;
            }
            let opts = QuadOptions::with_tol(1e-9, 1e-9);
            let m0 = integrate(|z| mainardi(alpha, z).unwrap(), 0.0, z_hi, opts).unwrap().value;
            let m1 = integrate(|z| z * mainardi(alpha, z).unwrap(), 0.0, z_hi, opts).unwrap().value;
            assert!((m0 - 1.0).abs() < 1e-5, "alpha = {alpha}: {m0}");
            assert!((m1 - 1.0 / gamma(1.0 + alpha)).abs() < 1e-4, "alpha = {alpha}: {m1}");
        }
    }

    #[test]
    fn stable_density_half() {
        let g = stable_density_g(0.5, 1.0).unwrap();
        assert!((g - 0.219_695_644_733_861_3).abs() < 1e-15);
        assert_eq!(stable_density_g(0.5, 1e-300).unwrap(), 0.0);
        assert!(stable_density_g(0.5, 1e-3).unwrap() < 1e-100);
        assert!(matches!(stable_density_g(0.5, 0.0), Err(Error::Domain(_))));
        assert!(matches!(stable_density_g(0.5, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn stable_density_half_integrates_to_one() {
        let r = integrate_to_infinity(
            |t| if t == 0.0 { 0.0 } else { stable_density_g(0.5, t).unwrap() },
            0.0,
            QuadOptions::with_tol(1e-12, 1e-12),
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-8, "{}", r.value);
    }
}
