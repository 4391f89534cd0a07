//! Power-law waiting-time families for trapped particles.
//!
//! All three densities share the tail `w(τ) ~ αγ^α τ^{-1-α}`. Only the
//! Pareto-type family has a closed-form Laplace transform; the other two are
//! transformed numerically through [`laplace_pdf_numeric`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::gen_exp_integral_scaled;
use crate::specfun::quad::{integrate_with_breaks, QuadOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WaitingFamily {
    /// `w = (α/γ)(1+τ/γ)^{-1-α}`
    ParetoType,
    /// `w = α(γ/τ)^α / (τ(1+(γ/τ)^α)²)`
    LogLogisticType,
    /// `w = αγ^α τ^{-1-α} e^{-(γ/τ)^α}`
    FrechetType,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LaplaceMode {
    Exact,
    Asymptotic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaitingTimeModel {
    family: WaitingFamily,
    alpha: f64,
    gamma: f64,
}

impl WaitingTimeModel {
    pub fn new(family: WaitingFamily, alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "waiting-time exponent must lie in (0, 1), got {alpha}"
            )));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "waiting-time scale must be positive, got {gamma}"
            )));
        }
        Ok(Self { family, alpha, gamma })
    }

    pub fn pareto(alpha: f64, gamma: f64) -> Result<Self> {
        Self::new(WaitingFamily::ParetoType, alpha, gamma)
    }

    pub fn family(&self) -> WaitingFamily {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn pdf(&self, tau: f64) -> Result<f64> {
        check_tau(tau)?;
        let (a, g) = (self.alpha, self.gamma);
        Ok(match self.family {
            WaitingFamily::ParetoType => (a / g) * (1.0 + tau / g).powf(-1.0 - a),
            WaitingFamily::LogLogisticType => {
                if tau == 0.0 {
                    return Ok(0.0);
                }
                // α r / (τ (1+r)²) with r = (γ/τ)^α, rewritten for large r
                let r_inv = (tau / g).powf(a);
                a * r_inv / (tau * (1.0 + r_inv) * (1.0 + r_inv))
            }
            WaitingFamily::FrechetType => {
                if tau == 0.0 {
                    return Ok(0.0);
                }
                let r = (g / tau).powf(a);
                a * r / tau * (-r).exp()
            }
        })
    }

    pub fn cdf(&self, tau: f64) -> Result<f64> {
        Ok(1.0 - self.survival(tau)?)
    }

    /// `Φ(τ) = 1 − W(τ)`.
    pub fn survival(&self, tau: f64) -> Result<f64> {
        check_tau(tau)?;
        let (a, g) = (self.alpha, self.gamma);
        Ok(match self.family {
            WaitingFamily::ParetoType => (1.0 + tau / g).powf(-a),
            WaitingFamily::LogLogisticType => {
                if tau == 0.0 {
                    return Ok(1.0);
                }
                1.0 / (1.0 + (tau / g).powf(a))
            }
            WaitingFamily::FrechetType => {
                if tau == 0.0 {
                    return Ok(1.0);
                }
                -(-(g / tau).powf(a)).exp_m1()
            }
        })
    }

    /// `(Lw)(s)`: exact (Pareto-type only) via `α e^{γs} E_{1+α}(γs)`, or the
    /// small-s form `1 − (γs)^α`.
    pub fn laplace_pdf(&self, s: Complex64, mode: LaplaceMode) -> Result<Complex64> {
        check_s(s)?;
        let z = self.gamma * s;
        match mode {
            LaplaceMode::Asymptotic => Ok(1.0 - z.powf(self.alpha)),
            LaplaceMode::Exact => match self.family {
                WaitingFamily::ParetoType => {
                    Ok(self.alpha * gen_exp_integral_scaled(1.0 + self.alpha, z)?)
                }
                other => Err(Error::Unsupported(format!(
                    "no closed-form Laplace transform for {other:?}; use laplace_pdf_numeric"
                ))),
            },
        }
    }

    /// `(LΦ)(s) = (1 − (Lw)(s))/s`, Pareto-type only.
    pub fn laplace_survival(&self, s: Complex64) -> Result<Complex64> {
        let lw = self.laplace_pdf(s, LaplaceMode::Exact)?;
        Ok((1.0 - lw) / s)
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("waiting time must be >= 0, got {tau}")))
    }
}

fn check_s(s: Complex64) -> Result<()> {
    if s.re > 0.0 && s.im.is_finite() && s.re.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("Laplace variable needs Re s > 0, got {s}")))
    }
}

/// `∫_0^∞ e^{-sτ} w(τ) dτ` by adaptive quadrature, any family.
///
/// The range is cut at `T` where `e^{-Re(s) T} Φ(T)` (a bound on the neglected
/// tail) drops below `1e-13`; the Pareto tail beyond `T` is added in closed form.
pub fn laplace_pdf_numeric(model: &WaitingTimeModel, s: Complex64) -> Result<Complex64> {
    check_s(s)?;
    let g = model.gamma();
    let mut upper = 10.0 * g;
    while (-s.re * upper).exp() * model.survival(upper)? > 1e-13 {
        upper *= 2.0;
        if upper > 1e30 {
            return Err(Error::AccuracyLoss(format!("Laplace tail does not decay at s = {s}")));
        }
    }
    let mut breaks: Vec<f64> = Vec::new();
    let mut b = 1e-6 * g;
    while b < upper {
        breaks.push(b);
        b *= 4.0;
    }
    // oscillation: at least a few panels per period
    let period = if s.im != 0.0 { 2.0 * std::f64::consts::PI / s.im.abs() } else { f64::INFINITY };
    if period.is_finite() {
        let n = ((upper / period) * 2.0).min(20_000.0) as usize;
        breaks.extend((1..n).map(|k| k as f64 * period / 2.0));
    }
    let opts = QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_intervals: 200_000,
    };
    let body = integrate_with_breaks(
        |tau: f64| (-s * tau).exp() * model.pdf(tau).unwrap_or(0.0),
        0.0,
        upper,
        &breaks,
        opts,
    )?
    .value;
    let tail = match model.family() {
        // ∫_T^∞ e^{-sτ} w = e^{-sT} α e^{γs+sT}E_{1+α}(γs+sT) / (1+T/γ)^α
        WaitingFamily::ParetoType => {
            let zt = g * s + s * upper;
            let scaled = gen_exp_integral_scaled(1.0 + model.alpha(), zt)?;
            let shift = (-s * upper).exp();
            shift * model.alpha() * scaled * (1.0 + upper / g).powf(-model.alpha())
        }
        _ => Complex64::new(0.0, 0.0),
    };
    Ok(body + tail)
}
