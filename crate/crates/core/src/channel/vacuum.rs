//! Magic states from the vacuum: one noisy round of square-GKP error
//! correction applied to the vacuum, followed by an ideal Clifford
//! correction and optional postselection on the syndrome.
//!
//! The measurement noise makes the input the thermal state with
//! `n̄ = tanh(Δ²/2)`.  Each syndrome cell of the correctable patch carries an
//! outcome probability and a conditional logical Bloch vector; its fidelity
//! is the best overlap with the twelve Clifford images of `|T⟩`.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{posterior_from_components, GaussianChi, SyndromeSeries, PATCH_HALF_WIDTH};
use crate::error::{Error, Result};

/// Vacuum-method settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VacuumMethodConfig {
    pub delta: f64,
    /// Cells per patch axis.
    pub grid: usize,
}

impl VacuumMethodConfig {
    pub const DEFAULT_GRID: usize = 500;

    pub fn new(delta: f64, grid: usize) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidArgument(format!("Δ must be positive, got {delta}")));
        }
        if grid < 2 {
            return Err(Error::InvalidArgument(format!("grid must be ≥ 2, got {grid}")));
        }
        Ok(Self { delta, grid })
    }
}

/// Bloch vectors of the Clifford orbit of `|T⟩ = (|0⟩ + e^{iπ/4}|1⟩)/√2`,
/// generated from `(1, 1, 0)/√2` by the Hadamard and phase maps.  The orbit
/// size is checked to be 12.
pub fn t_state_orbit() -> Result<Vec<[f64; 3]>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let key = |v: [f64; 3]| v.map(|x| (x * 1e6).round() as i64);
    let hadamard = |v: [f64; 3]| [v[2], -v[1], v[0]];
    let phase = |v: [f64; 3]| [-v[1], v[0], v[2]];
    let mut seen = BTreeSet::new();
    let mut orbit = Vec::new();
    let mut frontier = vec![[s, s, 0.0]];
    while let Some(v) = frontier.pop() {
        if seen.insert(key(v)) {
            orbit.push(v);
            frontier.push(hadamard(v));
            frontier.push(phase(v));
        }
    }
    if orbit.len() != 12 {
        return Err(Error::Numeric(format!("T-state Clifford orbit has {} elements, expected 12", orbit.len())));
    }
    Ok(orbit)
}

/// Fidelity of a (possibly mixed) Bloch vector with the best orbit element.
pub fn best_t_fidelity(bloch: [f64; 3], orbit: &[[f64; 3]]) -> f64 {
    let best = orbit
        .iter()
        .map(|t| t[0] * bloch[0] + t[1] * bloch[1] + t[2] * bloch[2])
        .fold(f64::NEG_INFINITY, f64::max);
    0.5 * (1.0 + best)
}

/// One syndrome cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SyndromeCell {
    /// Cell centre in the patch.
    pub v: (f64, f64),
    pub probability: f64,
    pub fidelity: f64,
}

/// Result at one postselection fraction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VacuumPoint {
    pub delta: f64,
    /// Requested accepted fraction; 0 stands for the single best cell.
    pub p: f64,
    pub infidelity: f64,
    pub acceptance_prob: f64,
    /// Set when the requested fraction is below the probability of the best
    /// cell, so the grid cannot resolve it.
    pub coarse_grid: bool,
}

/// All cells of one `Δ`, sorted by decreasing fidelity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VacuumAnalysis {
    pub config: VacuumMethodConfig,
    pub cells: Vec<SyndromeCell>,
    /// Total probability before renormalisation (≈ 1 for a fine grid).
    pub raw_mass: f64,
}

impl VacuumAnalysis {
    pub fn new(config: VacuumMethodConfig) -> Result<Self> {
        let orbit = t_state_orbit()?;
        let chi = GaussianChi::thermal((config.delta * config.delta / 2.0).tanh())?;
        let series = SyndromeSeries::new(&chi, None)?;
        let g = config.grid;
        let width = 2.0 * PATCH_HALF_WIDTH / g as f64;
        let area = width * width;
        let centre = |i: usize| -PATCH_HALF_WIDTH + (i as f64 + 0.5) * width;
        let mut cells = (0..g * g)
            .into_par_iter()
            .map(|k| {
                let v = (centre(k / g), centre(k % g));
                let post = posterior_from_components(series.eval(v)?, v)?;
                Ok(SyndromeCell {
                    v,
                    probability: post.density * area,
                    fidelity: best_t_fidelity(post.bloch, &orbit),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let raw_mass: f64 = cells.iter().map(|c| c.probability).sum();
        for c in &mut cells {
            c.probability /= raw_mass;
        }
        cells.sort_by(|a, b| b.fidelity.total_cmp(&a.fidelity));
        Ok(Self { config, cells, raw_mass })
    }

    /// Infidelity of the single best cell (the `p → 0` limit).
    pub fn best_infidelity(&self) -> f64 {
        1.0 - self.cells[0].fidelity
    }

    /// Probability-weighted mean infidelity over the best fraction `p` of
    /// outcomes; the cell straddling the threshold is counted fractionally.
    /// `p = 0` returns the best cell.
    pub fn at(&self, p: f64) -> Result<VacuumPoint> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("postselection fraction must lie in [0, 1], got {p}")));
        }
        let coarse_grid = p < self.cells[0].probability;
        if p == 0.0 {
            return Ok(VacuumPoint {
                delta: self.config.delta,
                p,
                infidelity: self.best_infidelity(),
                acceptance_prob: self.cells[0].probability,
                coarse_grid,
            });
        }
        let (mut mass, mut weighted) = (0.0, 0.0);
        for c in &self.cells {
            let take = c.probability.min(p - mass);
            if take <= 0.0 {
                break;
            }
            mass += take;
            weighted += take * (1.0 - c.fidelity);
        }
        Ok(VacuumPoint {
            delta: self.config.delta,
            p,
            infidelity: weighted / mass,
            acceptance_prob: mass,
            coarse_grid,
        })
    }

    /// Largest accepted fraction whose mean infidelity is at most `target`;
    /// `None` when even the best cell is worse.
    pub fn fraction_to_match(&self, target: f64) -> Option<f64> {
        if self.best_infidelity() > target {
            return None;
        }
        let (mut mass, mut weighted) = (0.0, 0.0);
        for c in &self.cells {
            let e = 1.0 - c.fidelity;
            if (weighted + c.probability * e) > target * (mass + c.probability) {
                // Solve (weighted + f·e)/(mass + f) = target for the partial
                // probability f of this cell.
                return Some(mass + (target * mass - weighted) / (e - target));
            }
            mass += c.probability;
            weighted += c.probability * e;
        }
        Some(1.0)
    }
}

/// Infidelity and acceptance probability at postselection fraction `p`.
pub fn vacuum_state_method(config: VacuumMethodConfig, p: f64) -> Result<VacuumPoint> {
    VacuumAnalysis::new(config)?.at(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_is_the_cube_edge_midpoints() {
        let orbit = t_state_orbit().unwrap();
        for v in &orbit {
            let zeros = v.iter().filter(|x| x.abs() < 1e-12).count();
            assert_eq!(zeros, 1);
            assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!((best_t_fidelity([0.0, 0.0, 1.0], &orbit) - (0.5 + 0.5 / 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn postselection_is_monotone_on_a_coarse_grid() {
        let a = VacuumAnalysis::new(VacuumMethodConfig::new(0.3, 40).unwrap()).unwrap();
        assert!((a.raw_mass - 1.0).abs() < 1e-3, "{}", a.raw_mass);
        let mut last = a.at(0.0).unwrap().infidelity;
        for k in 1..=20 {
            let r = a.at(k as f64 / 20.0).unwrap();
            assert!(r.infidelity >= last - 1e-15);
            assert!((r.acceptance_prob - k as f64 / 20.0).abs() < 1e-12);
            last = r.infidelity;
        }
        let target = a.at(0.3).unwrap().infidelity;
        let f = a.fraction_to_match(target).unwrap();
        assert!((f - 0.3).abs() < 1e-9, "{f}");
        assert!(a.at(1.5).is_err());
    }
}
