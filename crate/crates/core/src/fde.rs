//! Time-fractional diffusion `(∂_t + η ∂_t^α) U − D₀ ∂_x² U + σ_a U = 0` with
//! `U(x, 0) = 2δ(x)`.
//!
//! The time-domain solution is a Mainardi-function convolution; for α = 1/2 the
//! Mainardi function is Gaussian and the solution reduces to one single and one
//! nested integral over the unit square.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::gamma::gamma;
use crate::specfun::mainardi;
use crate::specfun::quad::{geometric_breaks, integrate, integrate_with_breaks, QuadOptions};
use crate::transport::TransportParams;

/// Default tolerance for the time-domain quadratures.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdeParams {
    pub eta: f64,
    pub d0: f64,
    pub sigma_a: f64,
    pub alpha: f64,
}

impl FdeParams {
    pub fn new(eta: f64, d0: f64, sigma_a: f64, alpha: f64) -> Result<Self> {
        let p = Self { eta, d0, sigma_a, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(Error::InvalidArgument(format!("eta must be finite and >= 0, got {}", self.eta)));
        }
        if !(self.d0 > 0.0) || !self.d0.is_finite() {
            return Err(Error::InvalidArgument(format!("D0 must be positive, got {}", self.d0)));
        }
        if !(self.sigma_a >= 0.0) || !self.sigma_a.is_finite() {
            return Err(Error::InvalidArgument(format!("sigma_a must be >= 0, got {}", self.sigma_a)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        Ok(())
    }

    /// `η = γ^α σ_trap`, `D₀ = v²/(3σ_s)` (isotropic scattering).
    pub fn from_transport(params: &TransportParams) -> Self {
        let w = params.waiting;
        Self {
            eta: w.gamma().powf(w.alpha()) * params.sigma_trap,
            d0: params.speed * params.speed / (3.0 * params.sigma_s),
            sigma_a: params.sigma_a,
            alpha: w.alpha(),
        }
    }

    /// `1 + η s^{α−1}`.
    fn memory(&self, s: Complex64) -> Complex64 {
        1.0 + self.eta * s.powf(self.alpha - 1.0)
    }

    /// `q(s) = s + η s^α + σ_a`.
    fn rate(&self, s: Complex64) -> Complex64 {
        s + self.eta * s.powf(self.alpha) + self.sigma_a
    }
}

fn check_s(s: Complex64) -> Result<()> {
    if s.re > 0.0 && s.re.is_finite() && s.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("Laplace variable needs Re s > 0, got {s}")))
    }
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be positive, got {t}")))
    }
}

/// Laplace–Fourier transform `V(k, s) = 2(1 + η s^{α−1}) / (s + η s^α + D₀k² + σ_a)`.
pub fn laplace_fourier_v(p: &FdeParams, k: f64, s: Complex64) -> Result<Complex64> {
    check_s(s)?;
    Ok(2.0 * p.memory(s) / (p.rate(s) + p.d0 * k * k))
}

/// Laplace transform of the density, `(1 + ηs^{α−1}) e^{−|x|√(q/D₀)} / √(D₀ q)`.
///
/// Analytic off the negative real axis, so contour inverters may call it with
/// `Re s ≤ 0`.
pub fn laplace_density(p: &FdeParams, x: f64, s: Complex64) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) || (s.im == 0.0 && s.re <= 0.0) {
        return Err(Error::Domain(format!("transform has a branch cut on (-inf, 0]; got s = {s}")));
    }
    let q = p.rate(s);
    let root = (q / p.d0).sqrt();
    Ok(p.memory(s) * (-x.abs() * root).exp() / (p.d0 * q).sqrt())
}

/// The same transform recovered from `V(k, s)` by quadrature in `k`:
/// `(1/2π) ∫ V e^{ikx} dk = (2/π)(1 + ηs^{α−1}) ∫_0^∞ cos(kx)/(D₀k² + q) dk`.
///
/// The range is cut at a whole number of periods `K ≥ max(100√(|q|/D₀), 200/|x|)`;
/// the remainder is added from its asymptotic expansion in `1/(xK)`.
pub fn laplace_density_fourier(p: &FdeParams, x: f64, s: Complex64) -> Result<Complex64> {
    check_s(s)?;
    let q = p.rate(s);
    let d0 = p.d0;
    let x = x.abs();
    let scale = (q.norm() / d0).sqrt();
    let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 100_000 };
    let integrand = |k: f64| (k * x).cos() / (d0 * k * k + q);
    let (body, tail) = if x == 0.0 {
        let kmax = 1e4 * scale.max(1.0);
        let breaks = geometric_breaks(scale, 4.0, 6);
        let breaks: Vec<f64> = breaks.into_iter().filter(|&b| b < kmax).collect();
        let body = integrate_with_breaks(integrand, 0.0, kmax, &breaks, opts)?.value;
        let tail = 1.0 / (d0 * kmax) - q / (3.0 * d0 * d0 * kmax.powi(3));
        (body, tail)
    } else {
        let period = 2.0 * PI / x;
        let needed = (100.0 * scale).max(200.0 / x);
        let periods = (needed / period).ceil().max(1.0);
        let kmax = periods * period;
        let mut breaks: Vec<f64> = (1..periods as usize).map(|i| i as f64 * period).collect();
        breaks.extend(geometric_breaks(scale, 4.0, 4).into_iter().filter(|&b| b < kmax));
        breaks.sort_by(f64::total_cmp);
        let body = integrate_with_breaks(integrand, 0.0, kmax, &breaks, opts)?.value;
        let (x2, k3) = (x * x, kmax.powi(3));
        let k5 = k3 * kmax * kmax;
        let tail = (2.0 / (x2 * k3) - 24.0 / (x2 * x2 * k5)) / d0 - q * 4.0 / (d0 * d0 * x2 * k5);
        (body, tail)
    };
    Ok(2.0 / PI * p.memory(s) * (body + tail))
}

/// Normal diffusion `e^{−x²/(4D₀t)} e^{−σ_a t} / √(πD₀t)`, total mass `2e^{−σ_a t}`.
pub fn normal_diffusion(p: &FdeParams, x: f64, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok((-x * x / (4.0 * p.d0 * t) - p.sigma_a * t).exp() / (PI * p.d0 * t).sqrt())
}

fn opts_for(tol: f64) -> QuadOptions {
    QuadOptions { abs_tol: tol, rel_tol: tol, max_intervals: 4000 }
}

// Breakpoints on (0, 1) clustered geometrically around a peak location.
fn peak_breaks(center: f64) -> Vec<f64> {
    let c = center.clamp(1e-300, 0.5);
    let mut b: Vec<f64> = geometric_breaks(c, 3.0, 8).into_iter().filter(|&v| v > 0.0 && v < 1.0).collect();
    b.push(0.5);
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// `∫_0^1 √(1−τ²)/τ² exp(−η²T(1−τ²)²/(4τ²) − x²/(4D₀T(1−τ²)) − σ_aT(1−τ²)) dτ`.
fn half_kernel(p: &FdeParams, x: f64, big_t: f64, opts: QuadOptions) -> Result<f64> {
    let a = p.eta * p.eta * big_t / 4.0;
    let b = x * x / (4.0 * p.d0 * big_t);
    let c = p.sigma_a * big_t;
    let f = |tau: f64| {
        if tau <= 0.0 || tau >= 1.0 {
            return 0.0;
        }
        let one_m = (1.0 - tau) * (1.0 + tau);
        let arg = a * one_m * one_m / (tau * tau) + b / one_m + c * one_m;
        if arg > 745.0 {
            return 0.0;
        }
        one_m.sqrt() / (tau * tau) * (-arg).exp()
    };
    let breaks = peak_breaks(a.sqrt());
    Ok(integrate_with_breaks(f, 0.0, 1.0, &breaks, opts)?.value)
}

/// `∫_0^1 (1−t₁)^{−a} g(t₁) dt₁`, split at 1/2 with `t₁ = u²` below.
fn weakly_singular<G>(mut g: G, exponent: f64, opts: QuadOptions) -> Result<f64>
where
    G: FnMut(f64) -> Result<f64>,
{
    // 1 − t₁ = r^{1/(1−a)} turns (1−t₁)^{−a} dt₁ into dr/(1−a)
    let inv = 1.0 / (1.0 - exponent);
    let mut failure: Option<Error> = None;
    let mut lower = |u: f64| {
        let t1 = u * u;
        match g(t1) {
            Ok(v) => 2.0 * u * v * (1.0 - t1).powf(-exponent),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let lo = integrate_with_breaks(&mut lower, 0.0, 0.5f64.sqrt(), &[1e-3, 1e-2, 0.1], opts)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let r_hi = 0.5f64.powf(1.0 - exponent);
    let mut upper = |r: f64| {
        let t1 = 1.0 - r.powf(inv);
        match g(t1) {
            Ok(v) => inv * v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let hi = integrate(&mut upper, 0.0, r_hi, opts)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(lo.value + hi.value)
}

/// `U_DE(x, t)` for α = 1/2:
/// `η/(π√D₀) K(t) + η²√t/(π√(πD₀)) ∫_0^1 (1−t₁)^{−1/2} K(tt₁) dt₁`.
///
/// `tol` is the absolute and relative target of the outer quadratures; inner
/// integrals run at `tol/10`.
pub fn u_de_half(p: &FdeParams, x: f64, t: f64, tol: f64) -> Result<f64> {
    check_t(t)?;
    p.validate()?;
    if p.alpha != 0.5 {
        return Err(Error::InvalidArgument(format!("u_de_half needs alpha = 1/2, got {}", p.alpha)));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if p.eta == 0.0 {
        return normal_diffusion(p, x, t);
    }
    let outer = opts_for(tol);
    let inner = opts_for(tol / 10.0);
    let first = p.eta / (PI * p.d0.sqrt()) * half_kernel(p, x, t, outer)?;
    let nested = weakly_singular(|t1| if t1 <= 0.0 { Ok(0.0) } else { half_kernel(p, x, t * t1, inner) }, 0.5, outer)?;
    let second = p.eta * p.eta * t.sqrt() / (PI * (PI * p.d0).sqrt()) * nested;
    Ok(first + second)
}

/// Relative share of the kernel that may be lost beyond the Mainardi series' reach.
pub const TRUNCATION_LIMIT: f64 = 1e-4;

/// Bound on `∫_z^∞ M_α`, from `M_α(z)` and its logarithmic slope (M_α decays
/// faster than any exponential, so `M(z)/|(ln M)'(z)|` bounds the tail).
fn mainardi_tail_bound(alpha: f64, z: f64) -> Result<f64> {
    let h = 1e-2 * z;
    let m = mainardi(alpha, z)?;
    let m_prev = mainardi(alpha, z - h)?;
    if m <= 0.0 {
        return Ok(0.0);
    }
    let slope = (m_prev.ln() - m.ln()) / h;
    if !(slope > 0.0) {
        return Ok(f64::INFINITY);
    }
    Ok(m / slope)
}

/// Largest Mainardi argument the series evaluates cleanly, scanning upward until
/// the first refusal or the first rise past the mode.
fn mainardi_reach(alpha: f64) -> f64 {
    if alpha == 0.5 {
        return f64::INFINITY;
    }
    let mut z = 1.0;
    let mut prev = f64::INFINITY;
    loop {
        let next = z * 1.01;
        match mainardi(alpha, next) {
            Ok(m) if !(next > 2.0 && m > prev) && next < 1e6 => {
                prev = m;
                z = next;
            }
            _ => return z,
        }
    }
}

/// Inner integral of the general formula after `T − y = Tτ^{1/α}`:
/// `(1/α) T^{1/2−α} ∫_0^1 √(1−τ^{1/α})/τ² M_α(ηT^{1−α}(1−τ^{1/α})/τ) e^{−x²/(4D₀y) − σ_a y} dτ`.
fn general_kernel(p: &FdeParams, x: f64, big_t: f64, reach: f64, opts: QuadOptions) -> Result<f64> {
    let alpha = p.alpha;
    let q = 1.0 / alpha;
    let c = p.eta * big_t.powf(1.0 - alpha);
    // below τ_min the Mainardi argument exceeds the series' reach and the
    // integrand is dropped; the dropped mass is bounded from the decay of M_α
    let tau_min = if reach.is_finite() { (c / reach).min(1.0) } else { 0.0 };
    let dropped = if tau_min > 0.0 {
        // y ≤ T there, so the spatial factor is at most e^{−x²/(4D₀T)}
        mainardi_tail_bound(alpha, reach)? / c * (-x * x / (4.0 * p.d0 * big_t)).exp()
    } else {
        0.0
    };
    let mut failure: Option<Error> = None;
    let mut f = |tau: f64| {
        if tau <= tau_min || tau >= 1.0 {
            return 0.0;
        }
        let one_m = -(q * tau.ln()).exp_m1();
        let y = big_t * one_m;
        let arg = x * x / (4.0 * p.d0 * y) + p.sigma_a * y;
        if arg > 745.0 {
            return 0.0;
        }
        let z = c * one_m / tau;
        match mainardi(alpha, z) {
            Ok(m) => one_m.sqrt() / (tau * tau) * m * (-arg).exp(),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let mut breaks = peak_breaks(c);
    breaks.retain(|&b| b > tau_min);
    let r = integrate_with_breaks(&mut f, tau_min, 1.0, &breaks, opts)?;
    if let Some(e) = failure {
        return Err(e);
    }
    if dropped > TRUNCATION_LIMIT * r.value.abs() && dropped > opts.abs_tol {
        return Err(Error::AccuracyLoss(format!(
            "Mainardi series for alpha = {alpha} reaches only z = {reach:.3}; dropped mass {dropped:e} vs kernel {:e}",
            r.value
        )));
    }
    Ok(q * big_t.powf(0.5 - alpha) * r.value)
}

/// `U_DE(x, t)` for any `0 < α < 1` from the Mainardi-function convolution
/// `(αη/√(πD₀)) ∫_0^t (δ(t−t') + η(t−t')^{−α}/Γ(1−α)) I(t') dt'`.
pub fn u_de_general(p: &FdeParams, x: f64, t: f64, tol: f64) -> Result<f64> {
    check_t(t)?;
    p.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if p.eta == 0.0 {
        return normal_diffusion(p, x, t);
    }
    let alpha = p.alpha;
    let reach = mainardi_reach(alpha);
    let outer = opts_for(tol);
    let inner = opts_for(tol / 10.0);
    let pre = alpha * p.eta / (PI * p.d0).sqrt();
    let first = pre * general_kernel(p, x, t, reach, outer)?;
    let nested = weakly_singular(
        |t1| if t1 <= 0.0 { Ok(0.0) } else { general_kernel(p, x, t * t1, reach, inner) },
        alpha,
        outer,
    )?;
    let second = pre * p.eta / gamma(1.0 - alpha) * t.powf(1.0 - alpha) * nested;
    Ok(first + second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilt::{invert, invert_reference, InversionConfig};
    use crate::specfun::quad::integrate_to_infinity;
    use crate::waiting::WaitingTimeModel;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scenario_a() -> FdeParams {
        let tp = TransportParams::new(1e-9, 1.0, 0.1, 1.0, WaitingTimeModel::pareto(0.5, 0.1).unwrap()).unwrap();
        FdeParams::from_transport(&tp)
    }

    #[test]
    fn derived_constants() {
        let p = scenario_a();
        assert!((p.eta - 0.031_622_8).abs() < 1e-7);
        assert!((p.d0 - 1.0 / 3.0).abs() < 1e-15);
        let tp = TransportParams::new(0.0, 1.0, 0.0, 1.0, WaitingTimeModel::pareto(0.5, 0.1).unwrap()).unwrap();
        assert_eq!(FdeParams::from_transport(&tp).eta, 0.0);
    }

    #[test]
    fn transform_limits() {
        let p = FdeParams { sigma_a: 0.0, ..scenario_a() };
        let s = c(0.3, 1.7);
        let v = laplace_fourier_v(&p, 0.0, s).unwrap();
        assert!((v - 2.0 / s).norm() < 1e-14 * v.norm());
        let free = FdeParams { eta: 0.0, ..p };
        let v = laplace_fourier_v(&free, 2.0, s).unwrap();
        assert!((v - 2.0 / (s + free.d0 * 4.0)).norm() < 1e-15);
    }

    #[test]
    fn v_from_independent_primitives() {
        let p = scenario_a();
        let s = c(1.0, 0.0);
        let v = laplace_fourier_v(&p, 1.0, s).unwrap();
        // s = 1: s^{1/2} = s^{-1/2} = 1
        let expect = 2.0 * (1.0 + p.eta) / (1.0 + p.eta + p.d0 + p.sigma_a);
        assert!((v.re - expect).abs() < 1e-14 && v.im.abs() < 1e-15);
        let s = c(0.04, 2.0);
        let sqrt_s = Complex64::from_polar(s.norm().sqrt(), 0.5 * s.arg());
        let expect = 2.0 * (1.0 + p.eta / sqrt_s) / (s + p.eta * sqrt_s + p.d0 + p.sigma_a);
        assert!((laplace_fourier_v(&p, 1.0, s).unwrap() - expect).norm() < 1e-14);
    }

    #[test]
    fn fourier_oracle_matches_closed_form() {
        let p = scenario_a();
        for &x in &[0.0, 0.5, 1.0, 5.0] {
            for &s in &[c(0.04, 0.0), c(0.04, 3.0), c(2.0, -40.0)] {
                let a = laplace_density(&p, x, s).unwrap();
                let b = laplace_density_fourier(&p, x, s).unwrap();
                // the oscillatory k-integral resolves values only down to ~1e-13 absolute
                assert!((a - b).norm() < 1e-7 * a.norm() + 1e-13, "x = {x}, s = {s}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn normal_diffusion_values() {
        let p = FdeParams::new(0.0, 1.0 / 3.0, 0.0, 0.5).unwrap();
        let v = normal_diffusion(&p, 0.0, 10.0).unwrap();
        assert!((v - 0.309_019_4).abs() < 1e-7);
        let m = integrate_to_infinity(|x| normal_diffusion(&p, x, 10.0).unwrap(), 0.0, QuadOptions::with_tol(1e-13, 1e-13))
            .unwrap()
            .value;
        assert!((2.0 * m - 2.0).abs() < 1e-10);
        let pa = FdeParams { sigma_a: 1e-9, ..p };
        let r = normal_diffusion(&pa, 1.0, 100.0).unwrap() / normal_diffusion(&p, 1.0, 100.0).unwrap();
        assert!((r - (-1e-7f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn tiny_eta_recovers_normal_diffusion() {
        let p = FdeParams::new(1e-6, 1.0 / 3.0, 0.0, 0.5).unwrap();
        let v = u_de_half(&p, 0.0, 10.0, 1e-8).unwrap();
        assert!((v - 0.309_019_4).abs() < 1e-3, "{v}");
        let zero = FdeParams { eta: 0.0, ..p };
        assert_eq!(u_de_half(&zero, 0.3, 10.0, 1e-8).unwrap(), normal_diffusion(&zero, 0.3, 10.0).unwrap());
    }

    #[test]
    fn half_solution_is_even_and_decreasing() {
        let p = scenario_a();
        assert_eq!(u_de_half(&p, 1.3, 10.0, 1e-8).unwrap(), u_de_half(&p, -1.3, 10.0, 1e-8).unwrap());
        let mut prev = f64::INFINITY;
        for i in 0..12 {
            let v = u_de_half(&p, i as f64, 10.0, 1e-8).unwrap();
            assert!(v >= -1e-8);
            assert!(v < prev, "x = {i}");
            prev = v;
        }
    }

    #[test]
    fn half_solution_matches_closed_form_transform() {
        let p = scenario_a();
        let cfg = InversionConfig::default();
        for &(x, t) in &[(1.0, 10.0), (0.5, 100.0)] {
            let u = u_de_half(&p, x, t, 1e-9).unwrap();
            let o = invert(|s| laplace_density(&p, x, s), t, &cfg).unwrap();
            assert!(((u - o) / o).abs() < 1e-5, "x = {x}, t = {t}: {u} vs {o}");
        }
    }

    #[test]
    fn general_agrees_with_half() {
        let p = scenario_a();
        for &(x, t) in &[(1.0, 10.0), (5.0, 100.0)] {
            let a = u_de_half(&p, x, t, 1e-8).unwrap();
            let b = u_de_general(&p, x, t, 1e-8).unwrap();
            assert!((a - b).abs() <= 2e-8 * a.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn general_alpha_against_transform() {
        // Talbot's contour is an inverter independent of the DE sum
        for &alpha in &[0.3, 0.7] {
            let p = FdeParams { alpha, ..scenario_a() };
            for &(x, t) in &[(1.0, 10.0), (5.0, 100.0)] {
                let u = u_de_general(&p, x, t, 1e-8).unwrap();
                let o = invert_reference(|s| laplace_density(&p, x, s), t, 48).unwrap();
                assert!(((u - o) / o).abs() < 1e-6, "alpha={alpha}: {u} vs {o}");
            }
        }
    }

    #[test]
    fn transform_continues_off_the_cut() {
        let p = scenario_a();
        assert!(laplace_density(&p, 1.0, c(-0.5, 2.0)).unwrap().is_finite());
        assert!(matches!(laplace_density(&p, 1.0, c(-0.5, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn bad_arguments() {
        let p = scenario_a();
        assert!(matches!(u_de_half(&p, 0.0, 0.0, 1e-8), Err(Error::Domain(_))));
        assert!(matches!(u_de_half(&FdeParams { alpha: 0.6, ..p }, 0.0, 1.0, 1e-8), Err(Error::InvalidArgument(_))));
        assert!(matches!(u_de_half(&p, 0.0, 1.0, 0.0), Err(Error::InvalidArgument(_))));
        assert!(FdeParams::new(0.1, 0.0, 0.0, 0.5).is_err());
        assert!(laplace_fourier_v(&p, 0.0, c(-1.0, 0.0)).is_err());
    }
}
