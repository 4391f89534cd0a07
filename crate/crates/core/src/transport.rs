//! Laplace-domain transport with trapping by analytical discrete ordinates.
//!
//! For a fixed Laplace variable `s` the slab equation
//! `(μ_i ∂_x + σ_t(s)) v_i = (σ_s/2) Σ_j w_j (v_j + v_{-j}) + q δ(x)` is
//! separated into modes `φ(ν, μ_i) e^{-x/ν}`. The separation constants come from
//! a dense `2N × 2N` complex eigenproblem, polished on the dispersion relation.

use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};

use lru::LruCache;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::QuadratureSet;
use crate::waiting::WaitingTimeModel;

/// Default capacity of the per-solver spectrum cache.
pub const SPECTRUM_CACHE_SIZE: usize = 4096;

const TIE_TOL: f64 = 1e-12;
const DEGENERATE_TOL: f64 = 1e-12;
const NEWTON_STEPS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportParams {
    pub sigma_a: f64,
    pub sigma_s: f64,
    pub sigma_trap: f64,
    /// Particle speed in cm/min.
    pub speed: f64,
    pub waiting: WaitingTimeModel,
}

impl TransportParams {
    pub fn new(
        sigma_a: f64,
        sigma_s: f64,
        sigma_trap: f64,
        speed: f64,
        waiting: WaitingTimeModel,
    ) -> Result<Self> {
        let p = Self { sigma_a, sigma_s, sigma_trap, speed, waiting };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !finite_nonneg(self.sigma_a) || !finite_nonneg(self.sigma_trap) {
            return Err(Error::InvalidArgument(format!(
                "absorption and trapping rates must be finite and >= 0 (sigma_a = {}, sigma_trap = {})",
                self.sigma_a, self.sigma_trap
            )));
        }
        if !(self.sigma_s > 0.0) || !self.sigma_s.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "scattering rate must be positive, got {}",
                self.sigma_s
            )));
        }
        if !(self.speed > 0.0) || !self.speed.is_finite() {
            return Err(Error::InvalidArgument(format!("speed must be positive, got {}", self.speed)));
        }
        Ok(())
    }

    /// `σ_trap (LΦ)(s) + 1`, the factor carried by both the source and `s` in `σ_t`.
    pub fn trap_factor(&self, s: Complex64) -> Result<Complex64> {
        if self.sigma_trap == 0.0 {
            check_s(s)?;
            return Ok(Complex64::new(1.0, 0.0));
        }
        Ok(self.sigma_trap * self.waiting.laplace_survival(s)? + 1.0)
    }

    /// `σ_t(s) = σ_a + σ_s + (σ_trap (LΦ)(s) + 1) s`.
    pub fn sigma_t(&self, s: Complex64) -> Result<Complex64> {
        Ok(self.sigma_a + self.sigma_s + self.trap_factor(s)? * s)
    }

    /// Closed-form spatial integral of the density transform over the whole line,
    /// `2(1 + σ_trap LΦ) / (s + σ_a + σ_trap s LΦ)`.
    pub fn total_mass_transform(&self, s: Complex64) -> Result<Complex64> {
        let p = self.trap_factor(s)?;
        Ok(2.0 * p / (s + self.sigma_a + (p - 1.0) * s))
    }
}

/// Free-function form of [`TransportParams::sigma_t`].
pub fn sigma_t(params: &TransportParams, s: Complex64) -> Result<Complex64> {
    params.sigma_t(s)
}

fn check_s(s: Complex64) -> Result<()> {
    if s.re > 0.0 && s.re.is_finite() && s.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("Laplace variable needs Re s > 0, got {s}")))
    }
}

/// A discrete direction `±μ_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ordinate {
    pub index: usize,
    pub forward: bool,
}

impl Ordinate {
    pub fn plus(index: usize) -> Self {
        Self { index, forward: true }
    }

    pub fn minus(index: usize) -> Self {
        Self { index, forward: false }
    }

    pub fn flipped(self) -> Self {
        Self { forward: !self.forward, ..self }
    }

    /// The signed cosine `±μ_i`.
    pub fn mu(self, quadrature: &QuadratureSet) -> f64 {
        let m = quadrature.nodes()[self.index];
        if self.forward {
            m
        } else {
            -m
        }
    }
}

/// Separation constants and normalizations at one Laplace node.
#[derive(Clone, Debug)]
pub struct AdoSpectrum {
    s: Complex64,
    quadrature: QuadratureSet,
    sigma_t: Complex64,
    sigma_s: f64,
    source: Complex64,
    eigenvalues: Vec<Complex64>,
    normalizations: Vec<Complex64>,
    raw_eigenvalues: Vec<Complex64>,
}

impl AdoSpectrum {
    /// Spectrum for given (per unit length) cross sections; `source` multiplies
    /// the density transform.
    pub fn from_cross_sections(
        quadrature: &QuadratureSet,
        s: Complex64,
        sigma_t: Complex64,
        sigma_s: f64,
        source: Complex64,
    ) -> Result<Self> {
        let n = quadrature.order();
        let mu = quadrature.nodes();
        let w = quadrature.weights();
        let dim = 2 * n;
        let half_s = Complex64::new(0.5 * sigma_s, 0.0);
        let matrix = DMatrix::<Complex64>::from_fn(dim, dim, |r, c| {
            let row_mu = if r < n { mu[r] } else { -mu[r - n] };
            let mut v = -half_s * w[c % n];
            if r == c {
                v += sigma_t;
            }
            v / row_mu
        });
        if matrix.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NumericFailure { s, reason: "non-finite eigenproblem matrix".into() });
        }
        let schur = nalgebra::linalg::Schur::try_new(matrix, 1e-15, 10_000 * dim).ok_or_else(|| {
            Error::NumericFailure { s, reason: "eigen-solver did not converge".into() }
        })?;
        let lambdas = schur.eigenvalues().ok_or_else(|| Error::NumericFailure {
            s,
            reason: "eigen-solver returned no eigenvalues".into(),
        })?;

        let mut raw: Vec<Complex64> = Vec::with_capacity(dim);
        let mut selected: Vec<Complex64> = Vec::with_capacity(n);
        for &lambda in lambdas.iter() {
            if lambda.norm() == 0.0 || !lambda.re.is_finite() || !lambda.im.is_finite() {
                return Err(Error::NumericFailure { s, reason: format!("eigenvalue 1/nu = {lambda}") });
            }
            let nu = lambda.inv();
            raw.push(nu);
            let positive = if nu.re.abs() < TIE_TOL * nu.norm() {
                log::warn!("separation constant {nu} at s = {s} lies on the imaginary axis; classified by Im");
                nu.im > 0.0
            } else {
                nu.re > 0.0
            };
            if positive {
                selected.push(polish(quadrature, sigma_t, sigma_s, lambda).inv());
            }
        }
        if selected.len() != n {
            return Err(Error::NumericFailure {
                s,
                reason: format!("found {} separation constants with Re > 0, expected {n}", selected.len()),
            });
        }
        selected.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));

        for &nu in &selected {
            for &m in mu {
                let pole = m / sigma_t;
                if (nu - pole).norm() < DEGENERATE_TOL * pole.norm() {
                    return Err(Error::DegenerateSpectrum {
                        s,
                        reason: format!("nu = {nu} coincides with mu/sigma_t = {pole}"),
                    });
                }
            }
        }

        let mut spectrum = Self {
            s,
            quadrature: quadrature.clone(),
            sigma_t,
            sigma_s,
            source,
            eigenvalues: selected,
            normalizations: Vec::new(),
            raw_eigenvalues: raw,
        };
        let mut norms = Vec::with_capacity(n);
        for &nu in &spectrum.eigenvalues {
            let nn = spectrum.bilinear(nu, nu)?;
            if nn.norm() == 0.0 || !nn.re.is_finite() || !nn.im.is_finite() {
                return Err(Error::DegenerateSpectrum { s, reason: format!("N(nu) = {nn} at nu = {nu}") });
            }
            norms.push(nn);
        }
        spectrum.normalizations = norms;
        Ok(spectrum)
    }

    pub fn s(&self) -> Complex64 {
        self.s
    }

    pub fn quadrature(&self) -> &QuadratureSet {
        &self.quadrature
    }

    pub fn sigma_t(&self) -> Complex64 {
        self.sigma_t
    }

    pub fn sigma_s(&self) -> f64 {
        self.sigma_s
    }

    pub fn source_factor(&self) -> Complex64 {
        self.source
    }

    /// `ν_n` with `Re ν_n > 0`, sorted by decreasing real part.
    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn normalizations(&self) -> &[Complex64] {
        &self.normalizations
    }

    /// All `2N` separation constants straight from the eigen-solver, unpolished.
    pub fn raw_eigenvalues(&self) -> &[Complex64] {
        &self.raw_eigenvalues
    }

    /// `φ(ν, μ) = (σ_s ν / 2) / (σ_t ν − μ)` for a signed cosine `μ`.
    pub fn phi(&self, nu: Complex64, mu: f64) -> Result<Complex64> {
        let den = self.sigma_t * nu - mu;
        if den.norm() < 1e-14 {
            return Err(Error::DegenerateSpectrum {
                s: self.s,
                reason: format!("sigma_t nu - mu = {den} at nu = {nu}, mu = {mu}"),
            });
        }
        Ok(0.5 * self.sigma_s * nu / den)
    }

    /// `Σ_i w_i μ_i [φ(a,μ_i)φ(b,μ_i) − φ(a,−μ_i)φ(b,−μ_i)]`.
    pub fn bilinear(&self, a: Complex64, b: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, w) in self.quadrature.iter() {
            let plus = self.phi(a, m)? * self.phi(b, m)?;
            let minus = self.phi(a, -m)? * self.phi(b, -m)?;
            acc += w * m * (plus - minus);
        }
        Ok(acc)
    }

    /// `Λ(ν) = 1 − (σ_s ν/2) Σ_i w_i [1/(σ_t ν − μ_i) + 1/(σ_t ν + μ_i)]`.
    pub fn dispersion_residual(&self, nu: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, w) in self.quadrature.iter() {
            acc += w * ((self.sigma_t * nu - m).inv() + (self.sigma_t * nu + m).inv());
        }
        1.0 - 0.5 * self.sigma_s * nu * acc
    }

    /// `Σ_i w_i (φ(ν,μ_i) + φ(ν,−μ_i))`, equal to one on the spectrum.
    pub fn normalization_sum(&self, nu: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, w) in self.quadrature.iter() {
            acc += w * (self.phi(nu, m)? + self.phi(nu, -m)?);
        }
        Ok(acc)
    }

    /// Fundamental solution `G(x, μ_out; y, μ_in)` for a unit source at `y` in
    /// direction `μ_in`.
    pub fn fundamental_solution(&self, x: f64, out: Ordinate, y: f64, inp: Ordinate) -> Result<Complex64> {
        if x == y {
            return Err(Error::UndefinedAtSource(x));
        }
        // below the source the sum runs over -ν_n; φ(-ν, μ) = φ(ν, -μ) and N(-ν) = -N(ν)
        let (out, inp, d) = if x > y { (out, inp, x - y) } else { (out.flipped(), inp.flipped(), y - x) };
        let mu_out = out.mu(&self.quadrature);
        let mu_in = inp.mu(&self.quadrature);
        let w_in = self.quadrature.weights()[inp.index];
        let mut acc = Complex64::new(0.0, 0.0);
        for (&nu, &nn) in self.eigenvalues.iter().zip(&self.normalizations) {
            acc += self.phi(nu, mu_out)? * self.phi(nu, mu_in)? / nn * (-d / nu).exp();
        }
        Ok(w_in * acc)
    }

    /// Density transform `(LU)(x, s) = q Σ_n e^{-|x|/ν_n} / N(ν_n)`; even in `x`.
    pub fn density(&self, x: f64) -> Complex64 {
        let d = x.abs();
        let mut acc = Complex64::new(0.0, 0.0);
        for (&nu, &nn) in self.eigenvalues.iter().zip(&self.normalizations) {
            acc += (-d / nu).exp() / nn;
        }
        self.source * acc
    }

    /// `2 ∫_0^∞ (LU)(x, s) dx`, integrated termwise.
    pub fn integrated_density(&self) -> Complex64 {
        let sum: Complex64 = self.eigenvalues.iter().zip(&self.normalizations).map(|(&nu, &nn)| nu / nn).sum();
        2.0 * self.source * sum
    }

    /// Slowest spatial decay rate `min_n Re(1/ν_n)`.
    pub fn slowest_decay_rate(&self) -> f64 {
        self.eigenvalues.iter().map(|nu| nu.inv().re).fold(f64::INFINITY, f64::min)
    }

    /// Worst-case residuals of the spectrum's defining relations.
    pub fn diagnostics(&self) -> Result<SpectrumDiagnostics> {
        let mut d = SpectrumDiagnostics::default();
        for &nu in &self.eigenvalues {
            d.dispersion = d.dispersion.max(self.dispersion_residual(nu).norm());
            d.normalization = d.normalization.max((self.normalization_sum(nu)? - 1.0).norm());
        }
        for (m, (&a, &na)) in self.eigenvalues.iter().zip(&self.normalizations).enumerate() {
            for (&b, &nb) in self.eigenvalues.iter().zip(&self.normalizations).skip(m + 1) {
                let off = self.bilinear(a, b)?.norm() / (na.norm() * nb.norm()).sqrt();
                d.orthogonality = d.orthogonality.max(off);
            }
        }
        let raw = &self.raw_eigenvalues;
        for (i, &a) in raw.iter().enumerate() {
            let gap = raw
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &b)| (a + b).norm())
                .fold(f64::INFINITY, f64::min);
            d.pairing = d.pairing.max(gap / a.norm());
        }
        Ok(d)
    }
}

/// Largest residuals over one spectrum: `|Λ(ν_n)|`, `|Σ w(φ₊+φ₋) − 1|`,
/// off-diagonal `|B(ν_m,ν_n)|/√|N_m N_n|`, and the relative `±ν` pairing gap of
/// the unpolished eigenvalues.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SpectrumDiagnostics {
    pub dispersion: f64,
    pub normalization: f64,
    pub orthogonality: f64,
    pub pairing: f64,
}

// Newton on f(z) = 1 − σ_s σ_t Σ w_i / (σ_t² − μ_i² z), z = λ² = 1/ν².
fn polish(quadrature: &QuadratureSet, sigma_t: Complex64, sigma_s: f64, lambda: Complex64) -> Complex64 {
    let st2 = sigma_t * sigma_t;
    let c = sigma_s * sigma_t;
    let eval = |z: Complex64| {
        let mut f = Complex64::new(0.0, 0.0);
        let mut df = Complex64::new(0.0, 0.0);
        for (m, w) in quadrature.iter() {
            let d = (st2 - m * m * z).inv();
            f += w * d;
            df += w * m * m * d * d;
        }
        (1.0 - c * f, -c * df)
    };
    let mut z = lambda * lambda;
    let (mut fz, _) = eval(z);
    for _ in 0..NEWTON_STEPS {
        let (f, df) = eval(z);
        if df.norm() == 0.0 || !df.re.is_finite() || !df.im.is_finite() {
            break;
        }
        let next = z - f / df;
        let (fn_, _) = eval(next);
        if !(fn_.norm() < fz.norm()) {
            break;
        }
        let step = (next - z).norm();
        z = next;
        fz = fn_;
        if step <= 1e-16 * z.norm() {
            break;
        }
    }
    let root = z.sqrt();
    if (root - lambda).norm() <= (root + lambda).norm() {
        root
    } else {
        -root
    }
}

/// Builds the spectrum of the transport problem at `s`.
pub fn ado_spectrum(params: &TransportParams, quadrature: &QuadratureSet, s: Complex64) -> Result<AdoSpectrum> {
    check_s(s)?;
    let p = params.trap_factor(s)?;
    let sigma_t = params.sigma_a + params.sigma_s + p * s;
    let v = params.speed;
    AdoSpectrum::from_cross_sections(quadrature, s, sigma_t / v, params.sigma_s / v, p / v)
}

/// `φ(ν, μ)` on a given spectrum.
pub fn eigenfunction_phi(spectrum: &AdoSpectrum, nu: Complex64, mu: f64) -> Result<Complex64> {
    spectrum.phi(nu, mu)
}

pub fn fundamental_solution(
    spectrum: &AdoSpectrum,
    x: f64,
    out: Ordinate,
    y: f64,
    inp: Ordinate,
) -> Result<Complex64> {
    spectrum.fundamental_solution(x, out, y, inp)
}

/// Uncached density transform; see [`RteSolver`] for the cached path.
pub fn laplace_density(params: &TransportParams, quadrature: &QuadratureSet, s: Complex64, x: f64) -> Result<Complex64> {
    Ok(ado_spectrum(params, quadrature, s)?.density(x))
}

type CacheKey = (u64, u64);

/// Transport solver with a bounded per-`s` spectrum cache, safe to share
/// between threads.
pub struct RteSolver {
    params: TransportParams,
    quadrature: QuadratureSet,
    cache: Mutex<LruCache<CacheKey, Arc<AdoSpectrum>>>,
}

impl RteSolver {
    pub fn new(params: TransportParams, quadrature: QuadratureSet) -> Result<Self> {
        Self::with_capacity(params, quadrature, SPECTRUM_CACHE_SIZE)
    }

    pub fn with_capacity(params: TransportParams, quadrature: QuadratureSet, capacity: usize) -> Result<Self> {
        params.validate()?;
        let cap = NonZeroUsize::new(capacity)
            .ok_or_else(|| Error::InvalidArgument("cache capacity must be positive".into()))?;
        Ok(Self { params, quadrature, cache: Mutex::new(LruCache::new(cap)) })
    }

    pub fn params(&self) -> &TransportParams {
        &self.params
    }

    pub fn quadrature(&self) -> &QuadratureSet {
        &self.quadrature
    }

    pub fn spectrum(&self, s: Complex64) -> Result<Arc<AdoSpectrum>> {
        let key = (s.re.to_bits(), s.im.to_bits());
        if let Some(hit) = self.lock().get(&key) {
            return Ok(Arc::clone(hit));
        }
        // computed unlocked; a concurrent duplicate is identical and harmless
        let fresh = Arc::new(ado_spectrum(&self.params, &self.quadrature, s)?);
        self.lock().put(key, Arc::clone(&fresh));
        Ok(fresh)
    }

    pub fn laplace_density(&self, s: Complex64, x: f64) -> Result<Complex64> {
        Ok(self.spectrum(s)?.density(x))
    }

    pub fn cached_spectra(&self) -> usize {
        self.lock().len()
    }

    pub fn clear_cache(&self) {
        self.lock().clear();
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, LruCache<CacheKey, Arc<AdoSpectrum>>> {
        self.cache.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
    }
}
