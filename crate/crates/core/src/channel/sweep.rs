//! `(n̄, λ)` parameter sweeps of the logical channel.

use rayon::prelude::*;
use serde::Serialize;

use super::logical::{t_state_fidelity_from, ChannelConfig, ChannelEngine, LogicalTarget};
use crate::error::{Error, Result};
use crate::fock::{GkpParams, Smear, TruncationPlan, DEFAULT_N_CUT};
use crate::polyalg::table::SimulationGate;

/// Inclusive grid `min, min+step, …, max` (the endpoint is kept when it is
/// reached within rounding).
pub fn stepped_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite() && step > 0.0 && max >= min) {
        return Err(Error::InvalidArgument(format!("bad grid min={min} max={max} step={step}")));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| min + step * i as f64).collect())
}

/// `count` uniformly spaced points over `[min, max]`.
pub fn uniform_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite() && max >= min && count >= 1) {
        return Err(Error::InvalidArgument(format!("bad grid min={min} max={max} count={count}")));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    Ok((0..count).map(|i| min + (max - min) * i as f64 / (count - 1) as f64).collect())
}

/// Sweep specification.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepConfig {
    pub gates: Vec<SimulationGate>,
    pub n_bar_grid: Vec<f64>,
    pub lam_grid: Vec<f64>,
    pub plan: TruncationPlan,
    pub n_cut: usize,
    /// Apply the passive-Knill readout noise (on by default).
    pub smear: bool,
}

impl SweepConfig {
    /// Desk-scale defaults: `d_init = 256`, n̄ ∈ {2, …, 12}, 16 λ in [1, 5].
    pub fn desk(gates: Vec<SimulationGate>) -> Self {
        Self {
            gates,
            n_bar_grid: stepped_grid(2.0, 12.0, 1.0).expect("static grid"),
            lam_grid: uniform_grid(1.0, 5.0, 16).expect("static grid"),
            plan: TruncationPlan { d_init: 256, expand_factor: 3 },
            n_cut: DEFAULT_N_CUT,
            smear: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.gates.is_empty() || self.n_bar_grid.is_empty() || self.lam_grid.is_empty() {
            return Err(Error::InvalidArgument("sweep grids and gate list must be nonempty".into()));
        }
        if self.lam_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("λ grid must be strictly increasing".into()));
        }
        Ok(())
    }

    fn channel(&self, gate: SimulationGate, n_bar: f64, lam: f64) -> Result<ChannelConfig> {
        let params = GkpParams::from_n_bar(n_bar, lam)?;
        let mut cfg = ChannelConfig::for_gate(gate, params, self.plan);
        cfg.n_cut = self.n_cut;
        if !self.smear {
            cfg.smear = Smear::none();
        }
        Ok(cfg)
    }
}

/// One evaluated grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub gate: SimulationGate,
    pub n_bar: f64,
    pub delta: f64,
    pub delta_db: f64,
    pub lam: f64,
    pub avg_infidelity: Option<f64>,
    /// Only for gates targeting `T`.
    pub t_state_infidelity: Option<f64>,
    /// Whether the per-(gate, n̄) optimum lies on the sampled λ range's edge.
    pub boundary_flag: bool,
    pub error: Option<String>,
}

/// Best λ for one gate and one n̄.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimalLambda {
    pub gate: SimulationGate,
    pub n_bar: f64,
    pub delta: f64,
    pub lam: f64,
    pub avg_infidelity: f64,
    pub t_state_infidelity: Option<f64>,
    /// True when the argmin is the last grid point, or the first one while
    /// that is above λ = 1 (λ = 1 itself is a symmetric point, not an edge of
    /// the physical range).
    pub boundary: bool,
}

/// Quadratic least-squares fit `λ_opt(n̄) ≈ c0 + c1·n̄ + c2·n̄²` over the
/// interior optima of one gate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaFit {
    pub gate: SimulationGate,
    pub coefficients: [f64; 3],
    pub points: usize,
}

impl LambdaFit {
    pub fn eval(&self, n_bar: f64) -> f64 {
        let [c0, c1, c2] = self.coefficients;
        c0 + n_bar * (c1 + n_bar * c2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub optima: Vec<OptimalLambda>,
    pub fits: Vec<LambdaFit>,
}

impl SweepResult {
    pub fn optima_for(&self, gate: SimulationGate) -> impl Iterator<Item = &OptimalLambda> {
        self.optima.iter().filter(move |o| o.gate == gate)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.error.is_some())
    }
}

/// Evaluates every `(gate, n̄, λ)` point in parallel; failed points are
/// recorded with their error and the sweep continues.
pub fn sweep(config: &SweepConfig) -> Result<SweepResult> {
    sweep_with(config, ChannelEngine::global())
}

/// [`sweep`] on an explicit engine.
pub fn sweep_with(config: &SweepConfig, engine: &ChannelEngine) -> Result<SweepResult> {
    config.validate()?;
    let mut points = Vec::new();
    for &gate in &config.gates {
        for &n_bar in &config.n_bar_grid {
            for &lam in &config.lam_grid {
                points.push((gate, n_bar, lam));
            }
        }
    }
    let mut rows: Vec<SweepRow> = points
        .par_iter()
        .map(|&(gate, n_bar, lam)| evaluate(config, engine, gate, n_bar, lam))
        .collect();

    let mut optima = Vec::new();
    let n_lam = config.lam_grid.len();
    for chunk in rows.chunks_mut(n_lam) {
        let best = chunk
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.avg_infidelity.map(|v| (i, v)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let Some((i, v)) = best else { continue };
        let first_above_one = config.lam_grid[0] > 1.0 + 1e-12;
        let boundary = (n_lam > 1 && i == n_lam - 1) || (i == 0 && first_above_one);
        for r in chunk.iter_mut() {
            r.boundary_flag = boundary;
        }
        let r = &chunk[i];
        optima.push(OptimalLambda {
            gate: r.gate,
            n_bar: r.n_bar,
            delta: r.delta,
            lam: r.lam,
            avg_infidelity: v,
            t_state_infidelity: r.t_state_infidelity,
            boundary,
        });
    }
    let fits = config.gates.iter().filter_map(|&g| fit_optima(g, &optima)).collect();
    Ok(SweepResult { rows, optima, fits })
}

fn evaluate(config: &SweepConfig, engine: &ChannelEngine, gate: SimulationGate, n_bar: f64, lam: f64) -> SweepRow {
    let mut row = SweepRow {
        gate,
        n_bar,
        delta: crate::fock::delta_from_n_bar(n_bar),
        delta_db: crate::fock::delta_db(crate::fock::delta_from_n_bar(n_bar)),
        lam,
        avg_infidelity: None,
        t_state_infidelity: None,
        boundary_flag: false,
        error: None,
    };
    let outcome = config.channel(gate, n_bar, lam).and_then(|cfg| {
        let response = engine.response(&cfg)?;
        let f = response.readout().average_gate_fidelity(cfg.target);
        let t = (gate.is_t_gate() && cfg.target == LogicalTarget::Phase(3))
            .then(|| 1.0 - t_state_fidelity_from(&response));
        Ok((1.0 - f, t))
    });
    match outcome {
        Ok((inf, t)) => {
            row.avg_infidelity = Some(inf);
            row.t_state_infidelity = t;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

fn fit_optima(gate: SimulationGate, optima: &[OptimalLambda]) -> Option<LambdaFit> {
    let pts: Vec<(f64, f64)> = optima
        .iter()
        .filter(|o| o.gate == gate && !o.boundary)
        .map(|o| (o.n_bar, o.lam))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let a = nalgebra::DMatrix::from_fn(pts.len(), 3, |i, j| pts[i].0.powi(j as i32));
    let b = nalgebra::DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
    let sol = a.svd(true, true).solve(&b, 1e-12).ok()?;
    Some(LambdaFit {
        gate,
        coefficients: [sol[0], sol[1], sol[2]],
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(stepped_grid(2.0, 4.0, 0.5).unwrap(), vec![2.0, 2.5, 3.0, 3.5, 4.0]);
        let g = uniform_grid(1.0, 6.5, 32).unwrap();
        assert_eq!(g.len(), 32);
        assert!((g[31] - 6.5).abs() < 1e-15 && g[0] == 1.0);
        assert!(uniform_grid(2.0, 1.0, 3).is_err());
        assert!(stepped_grid(1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn quadratic_fit_recovers_coefficients() {
        let optima: Vec<_> = (2..9)
            .map(|n| {
                let x = n as f64;
                OptimalLambda {
                    gate: SimulationGate::T3,
                    n_bar: x,
                    delta: 0.0,
                    lam: 1.0 + 0.3 * x - 0.01 * x * x,
                    avg_infidelity: 0.0,
                    t_state_infidelity: None,
                    boundary: false,
                }
            })
            .collect();
        let fit = fit_optima(SimulationGate::T3, &optima).unwrap();
        for (c, want) in fit.coefficients.iter().zip([1.0, 0.3, -0.01]) {
            assert!((c - want).abs() < 1e-10);
        }
        assert!(fit_optima(SimulationGate::TGkp, &optima).is_none());
    }

    #[test]
    fn empty_grids_rejected() {
        let mut c = SweepConfig::desk(vec![SimulationGate::T3]);
        c.lam_grid.clear();
        assert!(sweep_with(&c, &ChannelEngine::new()).is_err());
    }
}
