//! CSV and gnuplot output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::run::SpatialProfile;
use super::scenario::Solver;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "x_cm,u_rte,u_de,u_normal,t_min,scenario";
pub const COMPARE_COLUMNS: &str = "rte_minus_de,rel_rte_de,de_minus_normal";

/// Nine significant digits.
pub fn fmt_value(v: f64) -> String {
    format!("{v:.8e}")
}

struct Group<'a> {
    scenario: &'a str,
    t: f64,
    xs: Vec<f64>,
    columns: [Option<&'a SpatialProfile>; 3],
}

// (scenario, t) groups in order of first appearance.
fn group(profiles: &[SpatialProfile]) -> Result<Vec<Group<'_>>> {
    let first = profiles.first().ok_or_else(|| Error::InvalidArgument("no profiles to write".into()))?;
    let grid: Vec<f64> = first.xs().collect();
    let mut groups: Vec<Group> = Vec::new();
    for p in profiles {
        if !p.xs().eq(grid.iter().copied()) {
            return Err(Error::InvalidArgument(format!(
                "profile {}/{} at t = {} is on a different x grid",
                p.scenario, p.solver, p.t
            )));
        }
        let slot = match p.solver {
            Solver::Rte => 0,
            Solver::Fde => 1,
            Solver::Normal => 2,
        };
        let idx = match groups.iter().position(|g| g.scenario == p.scenario && g.t == p.t) {
            Some(i) => i,
            None => {
                groups.push(Group { scenario: &p.scenario, t: p.t, xs: grid.clone(), columns: [None; 3] });
                groups.len() - 1
            }
        };
        if groups[idx].columns[slot].replace(p).is_some() {
            return Err(Error::InvalidArgument(format!(
                "duplicate {} profile for {} at t = {}",
                p.solver, p.scenario, p.t
            )));
        }
    }
    Ok(groups)
}

fn render(profiles: &[SpatialProfile], with_differences: bool) -> Result<String> {
    let groups = group(profiles)?;
    let mut out = String::from(CSV_HEADER);
    if with_differences {
        out.push(',');
        out.push_str(COMPARE_COLUMNS);
    }
    out.push('\n');
    for g in &groups {
        for (i, &x) in g.xs.iter().enumerate() {
            let u: Vec<Option<f64>> = g.columns.iter().map(|c| c.map(|p| p.points[i].1)).collect();
            let cell = |v: Option<f64>| v.map(fmt_value).unwrap_or_default();
            write!(out, "{},{},{},{},{},{}", fmt_value(x), cell(u[0]), cell(u[1]), cell(u[2]), fmt_value(g.t), g.scenario)
                .expect("writing to a String");
            if with_differences {
                let diff = |a: Option<f64>, b: Option<f64>| a.zip(b).map(|(a, b)| a - b);
                let rel = diff(u[0], u[1]).zip(u[1]).map(|(d, de)| d / de);
                write!(out, ",{},{},{}", cell(diff(u[0], u[1])), cell(rel), cell(diff(u[1], u[2])))
                    .expect("writing to a String");
            }
            out.push('\n');
        }
    }
    Ok(out)
}

/// Writes the profiles as CSV, one row per `(scenario, t, x)`; a solver absent
/// from a group leaves its column empty.
pub fn emit_csv(profiles: &[SpatialProfile], path: &Path) -> Result<()> {
    let text = render(profiles, false)?;
    fs::write(path, text)?;
    Ok(())
}

/// [`emit_csv`] plus RTE−FDE, (RTE−FDE)/FDE and FDE−NORMAL columns.
pub fn emit_compare_csv(profiles: &[SpatialProfile], path: &Path) -> Result<()> {
    let text = render(profiles, true)?;
    fs::write(path, text)?;
    Ok(())
}

/// Writes a gnuplot script plotting `csv` with one panel per scenario and one
/// curve per solver and time.
pub fn emit_plot_script(profiles: &[SpatialProfile], path: &Path, csv: &Path, logy: bool) -> Result<()> {
    let groups = group(profiles)?;
    let mut scenarios: Vec<&str> = Vec::new();
    for g in &groups {
        if !scenarios.contains(&g.scenario) {
            scenarios.push(g.scenario);
        }
    }
    let csv_name = csv.to_string_lossy().replace('\'', "''");
    let mut s = String::new();
    let w = 480 * scenarios.len();
    writeln!(s, "set terminal pngcairo size {w},420").unwrap();
    writeln!(s, "set output '{}'", path.with_extension("png").to_string_lossy().replace('\'', "''")).unwrap();
    writeln!(s, "set datafile separator ','").unwrap();
    writeln!(s, "set xlabel 'x [cm]'").unwrap();
    writeln!(s, "set ylabel 'u'").unwrap();
    if logy {
        writeln!(s, "set logscale y").unwrap();
    }
    writeln!(s, "set multiplot layout 1,{}", scenarios.len()).unwrap();
    let styles = [("RTE", 2, "lines lw 2"), ("DE", 3, "lines dt 2 lw 2"), ("normal", 4, "lines dt 3 lw 2")];
    for sc in &scenarios {
        writeln!(s, "set title '{sc}'").unwrap();
        let mut curves = Vec::new();
        for g in groups.iter().filter(|g| g.scenario == *sc) {
            for (slot, (name, col, style)) in styles.iter().enumerate() {
                if g.columns[slot].is_none() {
                    continue;
                }
                let t = fmt_value(g.t);
                curves.push(format!(
                    "'{csv_name}' skip 1 using 1:((strcol(6) eq '{sc}' && strcol(5) eq '{t}') ? ${col} : NaN) with {style} title '{name}, t = {}'",
                    g.t
                ));
            }
        }
        writeln!(s, "plot {}", curves.join(", \\\n     ")).unwrap();
    }
    writeln!(s, "unset multiplot").unwrap();
    fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prof(solver: Solver, scenario: &str, t: f64, vals: &[f64]) -> SpatialProfile {
        SpatialProfile {
            solver,
            scenario: scenario.into(),
            t,
            points: vals.iter().enumerate().map(|(i, &v)| (i as f64 * 0.5, v)).collect(),
            fingerprint: String::new(),
        }
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_value(0.1234567891234), "1.23456789e-1");
        assert_eq!(fmt_value(0.0), "0.00000000e0");
    }

    #[test]
    fn missing_solvers_leave_empty_cells() {
        let ps = [prof(Solver::Fde, "a", 10.0, &[1.0, 2.0]), prof(Solver::Normal, "a", 10.0, &[3.0, 4.0])];
        let text = render(&ps, false).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "0.00000000e0,,1.00000000e0,3.00000000e0,1.00000000e1,a");
        assert_eq!(lines.len(), 3);
        assert!(!text.contains('\r'));
    }

    #[test]
    fn differences() {
        let ps = [
            prof(Solver::Rte, "a", 1.0, &[1.5]),
            prof(Solver::Fde, "a", 1.0, &[1.0]),
            prof(Solver::Normal, "a", 1.0, &[0.25]),
        ];
        let text = render(&ps, true).unwrap();
        let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(&row[6..], ["5.00000000e-1", "5.00000000e-1", "7.50000000e-1"]);
    }

    #[test]
    fn grids_and_duplicates_are_checked() {
        let mut other = prof(Solver::Fde, "a", 1.0, &[1.0]);
        other.points[0].0 = 0.1;
        assert!(render(&[prof(Solver::Rte, "a", 1.0, &[1.0]), other], false).is_err());
        let p = prof(Solver::Rte, "a", 1.0, &[1.0]);
        assert!(render(&[p.clone(), p], false).is_err());
        assert!(render(&[], false).is_err());
    }
}
