//! Scenario definitions: built-in figure panels and TOML overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ilt::InversionConfig;
use crate::transport::TransportParams;
use crate::waiting::WaitingTimeModel;

/// Default grid: 0 to 15 cm in 0.1 cm steps.
pub const DEFAULT_GRID: XGrid = XGrid { x_min: 0.0, x_max: 15.0, count: 151 };

pub const DEFAULT_ORDINATES: usize = 30;

pub const BUILTIN_NAMES: [&str; 6] = ["fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig2c"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Solver {
    Rte,
    Fde,
    Normal,
}

impl Solver {
    pub const ALL: [Solver; 3] = [Solver::Rte, Solver::Fde, Solver::Normal];

    pub fn tag(self) -> &'static str {
        match self {
            Solver::Rte => "rte",
            Solver::Fde => "fde",
            Solver::Normal => "normal",
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rte" => Ok(Solver::Rte),
            "fde" | "de" => Ok(Solver::Fde),
            "normal" => Ok(Solver::Normal),
            other => Err(Error::Config(format!("unknown solver '{other}' (expected rte, fde or normal)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub count: usize,
}

impl XGrid {
    pub fn points(&self) -> Vec<f64> {
        let step = (self.x_max - self.x_min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.x_max } else { self.x_min + i as f64 * step })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub transport: TransportParams,
    /// Number of positive discrete ordinates.
    pub ordinates: usize,
    pub inversion: InversionConfig,
    /// Tolerance handed to the fractional-diffusion quadratures.
    pub fde_tol: f64,
    pub times: Vec<f64>,
    pub x_grid: XGrid,
    pub solvers: Vec<Solver>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.label.is_empty() || self.label.contains([',', '"', '\n', '\r']) {
            return Err(Error::Config(format!("scenario label {:?} must be non-empty without commas, quotes or newlines", self.label)));
        }
        self.transport.validate()?;
        self.inversion.validate()?;
        if self.ordinates == 0 {
            return Err(Error::Config("ordinates must be >= 1".into()));
        }
        if !(self.fde_tol > 0.0) {
            return Err(Error::Config(format!("fde_tol must be positive, got {}", self.fde_tol)));
        }
        if self.times.is_empty() || self.times.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
            return Err(Error::Config(format!("times must be a non-empty list of positive values, got {:?}", self.times)));
        }
        let g = &self.x_grid;
        if g.count < 2 || !(g.x_min < g.x_max) || !g.x_min.is_finite() || !g.x_max.is_finite() {
            return Err(Error::Config(format!("x grid needs count >= 2 and x_min < x_max, got {g:?}")));
        }
        if self.solvers.is_empty() {
            return Err(Error::Config("at least one solver is required".into()));
        }
        Ok(())
    }

    /// Hex SHA-256 over every physical and numerical parameter (not the label
    /// or the solver selection).
    pub fn fingerprint(&self) -> String {
        let tp = &self.transport;
        let w = tp.waiting;
        let mut h = Sha256::new();
        let mut put = |v: f64| h.update(v.to_bits().to_le_bytes());
        for v in [tp.sigma_a, tp.sigma_s, tp.sigma_trap, tp.speed, w.alpha(), w.gamma()] {
            put(v);
        }
        put(self.inversion.sigma);
        put(self.inversion.m);
        put(self.inversion.k);
        put(self.fde_tol);
        put(self.x_grid.x_min);
        put(self.x_grid.x_max);
        for &t in &self.times {
            put(t);
        }
        h.update(format!("{:?}", w.family()).as_bytes());
        h.update((self.inversion.j as u64).to_le_bytes());
        h.update((self.ordinates as u64).to_le_bytes());
        h.update((self.x_grid.count as u64).to_le_bytes());
        h.update((self.times.len() as u64).to_le_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Figure parameter sets: σ_a = 1e-9, σ_s = 1, unit speed, α = 1/2, N = 30,
/// σ = 0.04, M = J = 40; panels (a) σ_trap = 0.1, γ = 0.1; (b) σ_trap = 0.01;
/// (c) γ = 1. Figure 1 at t = 10 min, figure 2 at t = 100 min.
pub fn builtin(name: &str) -> Result<Scenario> {
    let (t, panel) = match name {
        "fig1a" => (10.0, 'a'),
        "fig1b" => (10.0, 'b'),
        "fig1c" => (10.0, 'c'),
        "fig2a" => (100.0, 'a'),
        "fig2b" => (100.0, 'b'),
        "fig2c" => (100.0, 'c'),
        other => {
            return Err(Error::Config(format!(
                "unknown scenario '{other}'; built-ins are {}",
                BUILTIN_NAMES.join(", ")
            )))
        }
    };
    let (sigma_trap, gamma) = match panel {
        'a' => (0.1, 0.1),
        'b' => (0.01, 0.1),
        _ => (0.1, 1.0),
    };
    let waiting = WaitingTimeModel::pareto(0.5, gamma)?;
    Ok(Scenario {
        label: name.to_string(),
        transport: TransportParams::new(1e-9, 1.0, sigma_trap, 1.0, waiting)?,
        ordinates: DEFAULT_ORDINATES,
        inversion: InversionConfig::default(),
        fde_tol: crate::fde::DEFAULT_TOL,
        times: vec![t],
        x_grid: DEFAULT_GRID,
        solvers: Solver::ALL.to_vec(),
    })
}

pub fn builtins() -> Vec<Scenario> {
    BUILTIN_NAMES.iter().map(|n| builtin(n).expect("built-in scenarios are valid")).collect()
}

/// Optional settings of one scenario section; absent keys keep the base value.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// Built-in scenario to start from (default `fig1a`).
    pub base: Option<String>,
    pub sigma_a: Option<f64>,
    pub sigma_s: Option<f64>,
    pub sigma_trap: Option<f64>,
    pub speed: Option<f64>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub ordinates: Option<usize>,
    pub sigma: Option<f64>,
    pub m: Option<f64>,
    pub j: Option<u32>,
    pub k: Option<f64>,
    pub fde_tol: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub count: Option<usize>,
    pub solvers: Option<Vec<String>>,
}

impl Overrides {
    pub fn apply(&self, sc: &mut Scenario) -> Result<()> {
        let tp = &mut sc.transport;
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut tp.sigma_a, self.sigma_a);
        set(&mut tp.sigma_s, self.sigma_s);
        set(&mut tp.sigma_trap, self.sigma_trap);
        set(&mut tp.speed, self.speed);
        set(&mut sc.inversion.sigma, self.sigma);
        set(&mut sc.inversion.m, self.m);
        set(&mut sc.inversion.k, self.k);
        set(&mut sc.fde_tol, self.fde_tol);
        set(&mut sc.x_grid.x_min, self.x_min);
        set(&mut sc.x_grid.x_max, self.x_max);
        if self.alpha.is_some() || self.gamma.is_some() {
            let w = tp.waiting;
            tp.waiting = WaitingTimeModel::new(
                w.family(),
                self.alpha.unwrap_or(w.alpha()),
                self.gamma.unwrap_or(w.gamma()),
            )?;
        }
        if let Some(n) = self.ordinates {
            sc.ordinates = n;
        }
        if let Some(j) = self.j {
            sc.inversion.j = j;
        }
        if let Some(c) = self.count {
            sc.x_grid.count = c;
        }
        if let Some(t) = &self.times {
            sc.times = t.clone();
        }
        if let Some(list) = &self.solvers {
            let mut solvers = list.iter().map(|s| s.parse()).collect::<Result<Vec<Solver>>>()?;
            solvers.sort();
            solvers.dedup();
            sc.solvers = solvers;
        }
        sc.validate()
    }
}

/// Parses a config file of `[label]` sections of `key = value` pairs.
pub fn parse_config(text: &str) -> Result<Vec<Scenario>> {
    let sections: BTreeMap<String, Overrides> =
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
    let mut out = Vec::with_capacity(sections.len());
    for (label, ov) in sections {
        let mut sc = builtin(ov.base.as_deref().unwrap_or("fig1a"))?;
        sc.label = label;
        ov.apply(&mut sc)?;
        out.push(sc);
    }
    Ok(out)
}

/// Looks `name` up in the config scenarios first, then among the built-ins.
pub fn resolve(name: &str, config: &[Scenario]) -> Result<Scenario> {
    match config.iter().find(|s| s.label == name) {
        Some(sc) => Ok(sc.clone()),
        None => builtin(name),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_follow_the_captions() {
        let b = builtin("fig1b").unwrap();
        assert_eq!(b.transport.sigma_trap, 0.01);
        assert_eq!(b.transport.waiting.gamma(), 0.1);
        assert_eq!(b.times, vec![10.0]);
        let c = builtin("fig2c").unwrap();
        assert_eq!(c.transport.waiting.gamma(), 1.0);
        assert_eq!(c.times, vec![100.0]);
        assert_eq!(c.inversion, InversionConfig::default());
        assert!(builtin("fig3a").is_err());
        assert_eq!(builtins().len(), 6);
    }

    #[test]
    fn grid_ends_exactly() {
        let p = DEFAULT_GRID.points();
        assert_eq!(p.len(), 151);
        assert_eq!(p[0], 0.0);
        assert_eq!(p[150], 15.0);
        assert!((p[10] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fingerprint_tracks_parameters_only() {
        let a = builtin("fig1a").unwrap();
        let mut renamed = a.clone();
        renamed.label = "other".into();
        renamed.solvers = vec![Solver::Normal];
        assert_eq!(a.fingerprint(), renamed.fingerprint());
        let mut tweaked = a.clone();
        tweaked.inversion.j = 41;
        assert_ne!(a.fingerprint(), tweaked.fingerprint());
        let mut tweaked = a.clone();
        tweaked.transport.sigma_a = 2e-9;
        assert_ne!(a.fingerprint(), tweaked.fingerprint());
        assert_ne!(a.fingerprint(), builtin("fig2a").unwrap().fingerprint());
    }

    #[test]
    fn config_sections_override_a_base() {
        let text = r#"
[slow]
base = "fig2b"
times = [50.0, 200.0]
count = 11
solvers = ["normal", "fde"]

[plain]
sigma_trap = 0.0
"#;
        let sc = parse_config(text).unwrap();
        assert_eq!(sc.len(), 2);
        let slow = resolve("slow", &sc).unwrap();
        assert_eq!(slow.transport.sigma_trap, 0.01);
        assert_eq!(slow.times, vec![50.0, 200.0]);
        assert_eq!(slow.x_grid.count, 11);
        assert_eq!(slow.solvers, vec![Solver::Fde, Solver::Normal]);
        assert_eq!(resolve("plain", &sc).unwrap().transport.sigma_trap, 0.0);
        assert_eq!(resolve("fig1c", &sc).unwrap().label, "fig1c");
    }

    #[test]
    fn config_errors() {
        assert!(matches!(parse_config("[x]\nbogus = 1\n"), Err(Error::Config(_))));
        assert!(parse_config("[x]\ncount = 1\n").is_err());
        assert!(parse_config("[x]\ntimes = [-1.0]\n").is_err());
        assert!(parse_config("[x]\nsolvers = [\"bem\"]\n").is_err());
        assert!(parse_config("[x]\nalpha = 1.5\n").is_err());
    }
}
