//! Numerical inverse Laplace transforms.
//!
//! [`invert`] evaluates the cosine form of the Bromwich integral,
//! `f(t) = (2e^{σt}/(πt)) ∫_0^∞ Re F(σ + iω/t) cos ω dω`, with the
//! double-exponential substitution `ω = Mφ(y)`, `φ(y) = y/(1 − e^{−K sinh y})`,
//! and the trapezoidal rule on the shifted grid `y_j = jh + π/(2M)`, `h = π/M`.
//!
//! Two independent inverters are provided for cross-checks: a fixed Talbot
//! contour ([`invert_reference`]) for transforms analytic off the negative real
//! axis, and an Euler-accelerated Fourier series on a vertical line
//! ([`invert_euler`]) for transforms with delayed components.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InversionConfig {
    /// Bromwich abscissa, above every singularity of the transform.
    pub sigma: f64,
    /// Frequency scale.
    pub m: f64,
    /// The sum runs over `j = -J..=J`.
    pub j: u32,
    /// Steepness of the double-exponential map.
    pub k: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self { sigma: 0.04, m: 40.0, j: 40, k: 6.0 }
    }
}

impl InversionConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !ok(self.sigma) || !ok(self.m) || !ok(self.k) || self.j == 0 {
            return Err(Error::InvalidArgument(format!(
                "inversion needs sigma, M, K > 0 and J >= 1, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        PI / self.m
    }
}

/// `φ(y) = y / (1 − e^{−K sinh y})`; the removable point `y = 0` maps to `1/K`.
pub fn de_map(y: f64, k: f64) -> f64 {
    if y == 0.0 {
        return 1.0 / k;
    }
    let u = k * y.sinh();
    y / -(-u).exp_m1()
}

/// `dφ/dy = 1/d − y K cosh y / (4 sinh²(u/2))` with `u = K sinh y`, `d = 1 − e^{−u}`.
pub fn de_map_derivative(y: f64, k: f64) -> f64 {
    if y == 0.0 {
        return 0.5;
    }
    let u = k * y.sinh();
    let d = -(-u).exp_m1();
    let sh = (0.5 * u).sinh();
    let second = y * k * y.cosh() / (4.0 * sh * sh);
    let v = 1.0 / d - second;
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// One node of the double-exponential sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BromwichNode {
    pub j: i64,
    pub s: Complex64,
    /// `cos(Mφ(y_j)) φ'(y_j)`.
    pub weight: f64,
}

/// The node set for one time `t`; independent of the transform, so callers can
/// evaluate many transforms (for example many positions) on the same nodes.
#[derive(Clone, Debug)]
pub struct BromwichNodes {
    t: f64,
    scale: f64,
    nodes: Vec<BromwichNode>,
}

impl BromwichNodes {
    pub fn new(t: f64, cfg: &InversionConfig) -> Result<Self> {
        cfg.validate()?;
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("inversion time must be positive, got {t}")));
        }
        let h = cfg.step();
        let jmax = cfg.j as i64;
        let mut nodes = Vec::with_capacity(2 * cfg.j as usize + 1);
        for j in -jmax..=jmax {
            let y = j as f64 * h + 0.5 * PI / cfg.m;
            let phi = de_map(y, cfg.k);
            // Mφ = My + My/(e^u − 1) and My_j = jπ + π/2, so the cosine reduces exactly
            let u = cfg.k * y.sinh();
            let g = 1.0 / u.exp_m1();
            let tail = cfg.m * y * g;
            let parity = if j.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let cos = if tail.is_finite() { -parity * tail.sin() } else { (cfg.m * phi).cos() };
            let weight = cos * de_map_derivative(y, cfg.k);
            let s = Complex64::new(cfg.sigma, cfg.m * phi / t);
            nodes.push(BromwichNode { j, s, weight });
        }
        Ok(Self { t, scale: 2.0 * (cfg.sigma * t).exp() / t, nodes })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn nodes(&self) -> &[BromwichNode] {
        &self.nodes
    }

    /// Combines transform values taken at [`nodes`](Self::nodes), in ascending `j`.
    pub fn combine(&self, values: &[Complex64]) -> Result<f64> {
        if values.len() != self.nodes.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} transform values, got {}",
                self.nodes.len(),
                values.len()
            )));
        }
        let mut acc = 0.0;
        for (node, v) in self.nodes.iter().zip(values) {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFiniteTransform { t: self.t, j: node.j, s: node.s });
            }
            if node.weight != 0.0 {
                acc += node.weight * v.re;
            }
        }
        Ok(self.scale * acc)
    }
}

/// Double-exponential inversion of `f` at time `t`.
pub fn invert<F>(mut f: F, t: f64, cfg: &InversionConfig) -> Result<f64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let set = BromwichNodes::new(t, cfg)?;
    let mut values = Vec::with_capacity(set.nodes().len());
    for node in set.nodes() {
        let v = if node.weight == 0.0 { Complex64::new(0.0, 0.0) } else { f(node.s)? };
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFiniteTransform { t, j: node.j, s: node.s });
        }
        values.push(v);
    }
    set.combine(&values)
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("inversion time must be positive, got {t}")))
    }
}

/// Fixed Talbot inversion with `order` contour nodes.
///
/// The contour `s(θ) = rθ(cot θ + i)`, `r = 2·order/(5t)`, wraps the negative
/// real axis, so `F` must be analytic elsewhere and not grow on the left.
pub fn invert_reference<F>(mut f: F, t: f64, order: usize) -> Result<f64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    check_t(t)?;
    if order < 2 {
        return Err(Error::InvalidArgument(format!("Talbot order must be at least 2, got {order}")));
    }
    let m = order as f64;
    let r = 2.0 * m / (5.0 * t);
    let f0 = f(Complex64::new(r, 0.0))?;
    if !f0.re.is_finite() {
        return Err(Error::NonFiniteTransform { t, j: 0, s: Complex64::new(r, 0.0) });
    }
    let mut acc = 0.5 * (r * t).exp() * f0.re;
    for k in 1..order {
        let theta = k as f64 * PI / m;
        let cot = 1.0 / theta.tan();
        let s = r * theta * Complex64::new(cot, 1.0);
        let dsigma = theta + (theta * cot - 1.0) * cot;
        let v = f(s)?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFiniteTransform { t, j: k as i64, s });
        }
        acc += ((s * t).exp() * v * Complex64::new(1.0, dsigma)).re;
    }
    Ok(r / m * acc)
}

/// Parameters of the Euler-accelerated Fourier-series inverter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerConfig {
    /// Discretization parameter; the aliasing error is about `e^{-A}`.
    pub a: f64,
    /// Terms summed before averaging.
    pub terms: usize,
    /// Number of binomial averaging steps.
    pub averaging: usize,
}

impl Default for EulerConfig {
    fn default() -> Self {
        Self { a: 18.4, terms: 200, averaging: 11 }
    }
}

/// Abate–Whitt inversion on the line `Re s = A/(2t)` with Euler summation of
/// the alternating series.
pub fn invert_euler<F>(mut f: F, t: f64, cfg: &EulerConfig) -> Result<f64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    check_t(t)?;
    if cfg.terms == 0 || !(cfg.a > 0.0) {
        return Err(Error::InvalidArgument(format!("invalid Euler configuration {cfg:?}")));
    }
    let shift = cfg.a / (2.0 * t);
    let total = cfg.terms + cfg.averaging;
    let mut partial = Vec::with_capacity(total + 1);
    let mut eval = |k: usize| -> Result<f64> {
        let s = Complex64::new(shift, k as f64 * PI / t);
        let v = f(s)?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFiniteTransform { t, j: k as i64, s });
        }
        Ok(v.re)
    };
    let mut sum = 0.5 * eval(0)?;
    partial.push(sum);
    for k in 1..=total {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * eval(k)?;
        partial.push(sum);
    }
    // binomial average of the last averaging+1 partial sums
    let m = cfg.averaging;
    let mut coef = 1.0;
    let mut acc = 0.0;
    for k in 0..=m {
        acc += coef * partial[cfg.terms + k];
        coef *= (m - k) as f64 / (k + 1) as f64;
    }
    acc /= 2f64.powi(m as i32);
    Ok(cfg.a.exp().sqrt() / t * acc)
}
