//! Profile computation for one scenario.

use rayon::prelude::*;

use super::scenario::{Scenario, Solver};
use crate::error::{Error, Result};
use crate::fde::{self, FdeParams};
use crate::ilt::BromwichNodes;
use crate::specfun::gauss_legendre;
use crate::transport::RteSolver;
use crate::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct SpatialProfile {
    pub solver: Solver,
    pub scenario: String,
    pub t: f64,
    /// `(x, u)` pairs sorted by `x`.
    pub points: Vec<(f64, f64)>,
    pub fingerprint: String,
}

impl SpatialProfile {
    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }
}

/// One profile per `(t, solver)`, times in the given order and solvers in
/// RTE, FDE, NORMAL order.
pub fn run_scenario(sc: &Scenario) -> Result<Vec<SpatialProfile>> {
    sc.validate()?;
    let xs = sc.x_grid.points();
    let fingerprint = sc.fingerprint();
    let fde_params = FdeParams::from_transport(&sc.transport);
    let rte = if sc.solvers.contains(&Solver::Rte) {
        Some(RteSolver::new(sc.transport, gauss_legendre(sc.ordinates)?)?)
    } else {
        None
    };
    let mut solvers = sc.solvers.clone();
    solvers.sort();
    solvers.dedup();
    let mut out = Vec::new();
    for &t in &sc.times {
        for &solver in &solvers {
            let values = match solver {
                Solver::Rte => rte_profile(rte.as_ref().expect("built above"), sc, t, &xs)?,
                Solver::Fde => pointwise(&xs, t, solver, |x| fde_point(&fde_params, x, t, sc.fde_tol))?,
                Solver::Normal => pointwise(&xs, t, solver, |x| fde::normal_diffusion(&fde_params, x, t))?,
            };
            out.push(SpatialProfile {
                solver,
                scenario: sc.label.clone(),
                t,
                points: xs.iter().copied().zip(values).collect(),
                fingerprint: fingerprint.clone(),
            });
        }
        if let Some(r) = &rte {
            // nodes move with t, so nothing carries over
            r.clear_cache();
        }
    }
    Ok(out)
}

fn fde_point(p: &FdeParams, x: f64, t: f64, tol: f64) -> Result<f64> {
    if p.alpha == 0.5 {
        fde::u_de_half(p, x, t, tol)
    } else {
        fde::u_de_general(p, x, t, tol)
    }
}

fn pointwise<F>(xs: &[f64], t: f64, solver: Solver, f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    xs.par_iter()
        .map(|&x| {
            let u = f(x).map_err(|e| wrap(solver, x, t, e))?;
            if u.is_finite() {
                Ok(u)
            } else {
                Err(wrap(solver, x, t, Error::Domain(format!("non-finite value {u}"))))
            }
        })
        .collect()
}

// One spectrum per Bromwich node, then a cheap sweep over x.
fn rte_profile(solver: &RteSolver, sc: &Scenario, t: f64, xs: &[f64]) -> Result<Vec<f64>> {
    let nodes = BromwichNodes::new(t, &sc.inversion)?;
    let first_x = xs.first().copied().unwrap_or(0.0);
    let spectra = nodes
        .nodes()
        .par_iter()
        .map(|n| if n.weight == 0.0 { Ok(None) } else { solver.spectrum(n.s).map(Some) })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| wrap(Solver::Rte, first_x, t, e))?;
    xs.par_iter()
        .map(|&x| {
            let values: Vec<Complex64> = spectra
                .iter()
                .map(|sp| sp.as_ref().map_or(Complex64::new(0.0, 0.0), |sp| sp.density(x)))
                .collect();
            nodes.combine(&values).map_err(|e| wrap(Solver::Rte, x, t, e))
        })
        .collect()
}

fn wrap(solver: Solver, x: f64, t: f64, e: Error) -> Error {
    Error::Profile { solver: solver.tag(), x, t, source: Box::new(e) }
}
