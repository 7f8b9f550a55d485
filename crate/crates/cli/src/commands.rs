//! Subcommand implementations.  Each returns the document to emit and
//! whether the run found a failure that should turn the exit status to 2
//! after the output has been written.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use polyphase::analytic::{
    bias_split, cubic_twirled_density, ft_lower_bound, ft_validity_limit, lambda_opt_asymptotic, moments,
    PATCH_HALF_WIDTH,
};
use polyphase::channel::{
    stepped_grid, sweep_with, uniform_grid, ChannelConfig, ChannelEngine, DenseReadout, SweepConfig,
    VacuumAnalysis, VacuumMethodConfig,
};
use polyphase::fock::cache::{OperatorCache, Precision};
use polyphase::fock::{GkpParams, Smear, TruncationPlan, DEFAULT_N_CUT};
use polyphase::polyalg::table::SimulationGate;
use polyphase::polyalg::{
    control_gate_start, lift_representation, multivariate_reduce, reduce, starting_representation, verify_gate,
    RationalPolynomial,
};
use polyphase::symplectic::{identity_suite, nogo_sweep, IDENTITY_TOL, NOGO_REL_TOL};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{
    CacheAction, FtBoundArgs, MomentsArgs, PrewarmArgs, SweepArgs, SynthArgs, TruncationArgs, TwirlArgs,
    VacuumArgs, VerifyArgs,
};
use crate::config::Settings;
use crate::error::CliError;
use crate::output::{json_document, num, CsvDocument};

/// Global settings after merging flags and the `[global]` section.
pub struct Globals {
    pub cache_dir: Option<PathBuf>,
    pub precision: Precision,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 20_240_501;

/// A finished command.
pub struct Report {
    pub document: Vec<u8>,
    /// Set when some evaluated item failed; the document is still written.
    pub failed: bool,
    /// Diagnostics for standard error.
    pub warnings: Vec<String>,
}

impl Report {
    fn ok(document: Vec<u8>) -> Self {
        Self { document, failed: false, warnings: Vec::new() }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn parse_coefficients(text: &str) -> Result<RationalPolynomial, CliError> {
    let items: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(invalid("empty coefficient list"));
    }
    Ok(RationalPolynomial::from_fraction_strings(&items)?)
}

fn polynomial_json(p: &RationalPolynomial) -> Value {
    json!({
        "polynomial": p.to_fraction_strings(),
        "display": p.to_string(),
        "degree": p.degree(),
    })
}

/// Reads a univariate polynomial from a file: either a `synth` JSON
/// document or a comma-separated coefficient list.
fn read_polynomial_file(path: &Path) -> Result<RationalPolynomial, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    if let Ok(doc) = serde_json::from_str::<Value>(&text) {
        let coeffs = doc
            .get("polynomial")
            .and_then(Value::as_array)
            .ok_or_else(|| invalid(format!("{}: no \"polynomial\" array", path.display())))?;
        let items: Vec<&str> = coeffs
            .iter()
            .map(|c| c.as_str().ok_or_else(|| invalid("polynomial coefficients must be strings")))
            .collect::<Result<_, _>>()?;
        return Ok(RationalPolynomial::from_fraction_strings(&items)?);
    }
    parse_coefficients(&text)
}

pub fn synth(args: &SynthArgs, s: &Settings) -> Result<Report, CliError> {
    const SEC: &str = "synth";
    let table = s.switch(args.table, SEC, "table")?;
    let level: Option<i64> = s.opt(args.level, SEC, "level")?;
    let qubits: Option<i64> = s.opt(args.qubits, SEC, "qubits")?;
    let poly: Option<String> = s.opt(args.poly.clone(), SEC, "poly")?;
    let start: String = s.value(args.start.clone(), SEC, "start", "power".to_string())?;

    if table {
        let gates: Vec<Value> = SimulationGate::ALL
            .iter()
            .map(|&g| {
                let p = g.polynomial();
                let mut v = polynomial_json(&p);
                v["gate"] = json!(g.name());
                v["target_level"] = json!(g.target_level());
                v["implements_target"] = json!(g.target_level().is_none_or(|m| verify_gate(&p, m as i64)));
                v["hadamard_hierarchy"] = json!(g.hadamard_hierarchy_label());
                v
            })
            .collect();
        return Ok(Report::ok(json_document("synth", json!({ "table": gates }))?));
    }

    if let Some(n) = qubits {
        let m = level.ok_or_else(|| invalid("--qubits needs --level"))?;
        let start = control_gate_start(n, m)?;
        let out = multivariate_reduce(&start);
        let terms: Vec<Value> = out
            .polynomial
            .to_fraction_terms()
            .into_iter()
            .map(|(e, c)| json!({ "exponents": e, "coefficient": c }))
            .collect();
        let body = json!({
            "gate": format!("C^{}Λ_{m}", n - 1),
            "qubits": n,
            "level": m,
            "start": start.to_string(),
            "polynomial": terms,
            "display": out.polynomial.to_string(),
            "degree": out.polynomial.total_degree(),
            "ties": out.ties,
        });
        return Ok(Report::ok(json_document("synth", body)?));
    }

    let (gate, start_poly) = match (&poly, level) {
        (Some(text), m) => (m.map_or("custom".to_string(), |m| format!("Λ_{m}")), parse_coefficients(text)?),
        (None, Some(m)) => {
            let p = match start.as_str() {
                "power" => starting_representation(m)?,
                other => {
                    let file = other
                        .strip_prefix("lift:")
                        .ok_or_else(|| invalid(format!("--start must be power or lift:<file>, got {other:?}")))?;
                    if m < 2 {
                        return Err(invalid("lifting needs --level ≥ 2"));
                    }
                    lift_representation(&read_polynomial_file(Path::new(file))?, m - 1)?
                }
            };
            (format!("Λ_{m}"), p)
        }
        (None, None) => return Err(invalid("synth needs --level, --poly, --qubits or --table")),
    };
    let out = reduce(&start_poly);
    let best = out.canonical();
    let mut body = polynomial_json(best);
    body["gate"] = json!(gate);
    body["level"] = json!(level);
    body["start"] = json!(start_poly.to_fraction_strings());
    body["branch_log"] = serde_json::to_value(&out.branch_log)?;
    body["alternatives"] = json!(out.minima[1..].iter().map(RationalPolynomial::to_fraction_strings).collect::<Vec<_>>());
    body["capped"] = json!(out.capped);
    let failed = match level {
        Some(m) => {
            let ok = verify_gate(best, m);
            body["verified"] = json!(ok);
            !ok
        }
        None => false,
    };
    let mut report = Report::ok(json_document("synth", body)?);
    if failed {
        report.failed = true;
        report.warnings.push("reduced polynomial does not implement the requested level".into());
    }
    Ok(report)
}

pub fn verify_circuits(args: &VerifyArgs, s: &Settings, g: &Globals) -> Result<Report, CliError> {
    const SEC: &str = "verify-circuits";
    let count = s.value(args.nogo_count, SEC, "nogo-count", 100usize)?;
    let max_ancilla = s.value(args.max_ancilla, SEC, "max-ancilla", 4usize)?;
    let deltas = s.list(args.delta.clone(), SEC, "delta", vec![0.1, 0.25, 0.5])?;
    if deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(invalid("every Δ must be positive"));
    }

    let identities = identity_suite()?;
    let max_residual = identities.iter().map(|c| c.residual).fold(0.0, f64::max);
    let mut all_passed = identities.iter().all(|c| c.passed);
    let mut nogo = Vec::new();
    for (k, &delta) in deltas.iter().enumerate() {
        let samples = nogo_sweep(count, max_ancilla, delta, g.seed.wrapping_add(k as u64))?;
        let max_rel = samples.iter().map(|x| x.relative_error).fold(0.0, f64::max);
        let passed = max_rel <= NOGO_REL_TOL;
        all_passed &= passed;
        nogo.push(json!({
            "delta": delta,
            "circuits": samples.len(),
            "max_relative_error": max_rel,
            "passed": passed,
        }));
    }
    let body = json!({
        "identity_tolerance": IDENTITY_TOL,
        "nogo_tolerance": NOGO_REL_TOL,
        "seed": g.seed,
        "identities": identities,
        "max_identity_residual": max_residual,
        "nogo": nogo,
        "all_passed": all_passed,
    });
    let mut report = Report::ok(json_document("verify-circuits", body)?);
    if !all_passed {
        report.failed = true;
        report.warnings.push("some circuit checks failed".into());
    }
    Ok(report)
}

struct Grids {
    n_bar: Vec<f64>,
    lam: Vec<f64>,
    plan: TruncationPlan,
    n_cut: usize,
    smear: bool,
}

#[allow(clippy::too_many_arguments)]
fn grids(
    s: &Settings,
    sec: &str,
    nbar: [Option<f64>; 3],
    lam: (Option<f64>, Option<f64>, Option<usize>),
    t: &TruncationArgs,
    no_smear: bool,
) -> Result<Grids, CliError> {
    let n_bar = stepped_grid(
        s.value(nbar[0], sec, "nbar-min", 2.0)?,
        s.value(nbar[1], sec, "nbar-max", 12.0)?,
        s.value(nbar[2], sec, "nbar-step", 1.0)?,
    )?;
    let lam = uniform_grid(
        s.value(lam.0, sec, "lam-min", 1.0)?,
        s.value(lam.1, sec, "lam-max", 5.0)?,
        s.value(lam.2, sec, "lam-count", 16usize)?,
    )?;
    if lam[0] <= 0.0 {
        return Err(invalid("λ must be positive"));
    }
    let plan = TruncationPlan::new(
        s.value(t.dinit, sec, "dinit", 256usize)?,
        s.value(t.expand_factor, sec, "expand-factor", 3usize)?,
    )?;
    let n_cut = s.value(t.ncut, sec, "ncut", DEFAULT_N_CUT)?;
    if n_cut == 0 {
        return Err(invalid("ncut must be positive"));
    }
    let smear = !s.switch(no_smear, sec, "no-smear")?;
    Ok(Grids { n_bar, lam, plan, n_cut, smear })
}

fn engine(g: &Globals) -> Result<ChannelEngine, CliError> {
    Ok(match &g.cache_dir {
        Some(dir) => ChannelEngine::with_operator_cache(Arc::new(OperatorCache::on_disk(dir, g.precision)?)),
        None => ChannelEngine::new(),
    })
}

/// Optional second document and its destination (the sweep summary).
pub type Companion = Option<(PathBuf, Vec<u8>)>;

pub fn sweep(args: &SweepArgs, s: &Settings, g: &Globals) -> Result<(Report, Companion), CliError> {
    const SEC: &str = "sweep";
    let names = s.list(args.gate.clone(), SEC, "gate", vec!["T3".to_string()])?;
    let gates = names
        .iter()
        .map(|n| SimulationGate::from_name(n.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    let gr = grids(
        s,
        SEC,
        [args.nbar_min, args.nbar_max, args.nbar_step],
        (args.lam_min, args.lam_max, args.lam_count),
        &args.truncation,
        args.no_smear,
    )?;
    let summary_path: Option<PathBuf> = s.opt(args.summary.clone(), SEC, "summary")?;
    let config = SweepConfig {
        gates,
        n_bar_grid: gr.n_bar,
        lam_grid: gr.lam,
        plan: gr.plan,
        n_cut: gr.n_cut,
        smear: gr.smear,
    };
    let result = sweep_with(&config, &engine(g)?)?;

    let mut doc = CsvDocument::new(
        "sweep",
        &["gate", "n_bar", "delta", "delta_db", "lam", "avg_infidelity", "t_state_infidelity", "boundary_flag"],
    )?;
    for r in &result.rows {
        doc.row([
            r.gate.name().to_string(),
            num(Some(r.n_bar)),
            num(Some(r.delta)),
            num(Some(r.delta_db)),
            num(Some(r.lam)),
            num(r.avg_infidelity),
            num(r.t_state_infidelity),
            r.boundary_flag.to_string(),
        ])?;
    }
    let mut report = Report::ok(doc.finish()?);
    for r in result.failures() {
        report.failed = true;
        report.warnings.push(format!(
            "{} n̄={} λ={}: {}",
            r.gate.name(),
            r.n_bar,
            r.lam,
            r.error.as_deref().unwrap_or("")
        ));
    }
    for o in result.optima.iter().filter(|o| o.boundary) {
        report
            .warnings
            .push(format!("{} n̄={}: optimum at the edge of the λ grid (λ={})", o.gate.name(), o.n_bar, o.lam));
    }

    let summary = match summary_path {
        None => None,
        Some(path) => {
            let optima: Vec<Value> = result
                .optima
                .iter()
                .map(|o| {
                    json!({
                        "gate": o.gate.name(),
                        "n_bar": o.n_bar,
                        "delta": o.delta,
                        "lam": o.lam,
                        "avg_infidelity": o.avg_infidelity,
                        "t_state_infidelity": o.t_state_infidelity,
                        "boundary": o.boundary,
                    })
                })
                .collect();
            let fits: Vec<Value> = result
                .fits
                .iter()
                .map(|f| json!({ "gate": f.gate.name(), "coefficients": f.coefficients, "points": f.points }))
                .collect();
            Some((path, json_document("sweep", json!({ "optima": optima, "lambda_fits": fits }))?))
        }
    };
    Ok((report, summary))
}

pub fn vacuum(args: &VacuumArgs, s: &Settings) -> Result<Report, CliError> {
    const SEC: &str = "vacuum";
    let deltas = s.list(args.delta.clone(), SEC, "delta", vec![0.25])?;
    let grid = s.value(args.grid, SEC, "grid", VacuumMethodConfig::DEFAULT_GRID)?;
    let ps = s.list(args.postselect.clone(), SEC, "postselect", vec![0.0, 0.25, 1.0])?;
    if let Some(p) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(invalid(format!("postselection fraction must lie in [0, 1], got {p}")));
    }
    let configs = deltas
        .iter()
        .map(|&d| VacuumMethodConfig::new(d, grid))
        .collect::<Result<Vec<_>, _>>()?;

    let mut doc = CsvDocument::new("vacuum", &["delta", "p", "infidelity", "acceptance_prob"])?;
    let mut warnings = Vec::new();
    for config in configs {
        let analysis = VacuumAnalysis::new(config)?;
        for &p in &ps {
            let point = analysis.at(p)?;
            if point.coarse_grid && p > 0.0 {
                warnings.push(format!(
                    "Δ={} p={p}: below the probability of one grid cell ({:.3e}); increase --grid",
                    config.delta, analysis.cells[0].probability
                ));
            }
            doc.row([
                num(Some(point.delta)),
                num(Some(point.p)),
                num(Some(point.infidelity)),
                num(Some(point.acceptance_prob)),
            ])?;
        }
    }
    Ok(Report { document: doc.finish()?, failed: false, warnings })
}

pub fn moments_cmd(args: &MomentsArgs, s: &Settings) -> Result<Report, CliError> {
    const SEC: &str = "moments";
    let poly_text: Option<String> = s.opt(args.poly.clone(), SEC, "poly")?;
    let (label, p) = match poly_text {
        Some(text) => ("custom".to_string(), parse_coefficients(&text)?),
        None => {
            let gate = SimulationGate::from_name(&s.value(args.gate.clone(), SEC, "gate", "T3".to_string())?)?;
            (gate.name().to_string(), gate.polynomial())
        }
    };
    let delta = s.value(args.delta, SEC, "delta", 0.25)?;
    let lam = s.value(args.lam, SEC, "lam", 2.0)?;
    GkpParams::new(delta, lam)?;
    let (dq, dp) = bias_split(delta, lam);
    let m = moments(&p, dq, dp)?;
    let body = json!({
        "gate": label,
        "polynomial": p.to_fraction_strings(),
        "delta": delta,
        "lam": lam,
        "delta_q": dq,
        "delta_p": dp,
        "moments": m,
        "lambda_opt_asymptotic": lambda_opt_asymptotic(&p, delta).ok(),
    });
    Ok(Report::ok(json_document("moments", body)?))
}

pub fn ft_bound(args: &FtBoundArgs, s: &Settings) -> Result<Report, CliError> {
    let deltas = s.list(args.delta.clone(), "ft-bound", "delta", vec![0.1, 0.15, 0.2, 0.25])?;
    let results = deltas.iter().map(|&d| ft_lower_bound(d)).collect::<Result<Vec<_>, _>>()?;
    let mut report = Report::ok(json_document(
        "ft-bound",
        json!({ "validity_limit": ft_validity_limit(), "bounds": results }),
    )?);
    for r in results.iter().filter(|r| !r.validity) {
        report.warnings.push(format!("Δ={}: outside the range where the bound holds", r.delta));
    }
    Ok(report)
}

pub fn twirl_density(args: &TwirlArgs, s: &Settings) -> Result<Report, CliError> {
    const SEC: &str = "twirl-density";
    let delta = s.value(args.delta, SEC, "delta", 0.25)?;
    let lam = s.value(args.lam, SEC, "lam", 2.0)?;
    let n = s.value(args.grid, SEC, "grid", 101usize)?;
    if n < 2 {
        return Err(invalid("grid must be ≥ 2"));
    }
    let axis = uniform_grid(-PATCH_HALF_WIDTH, PATCH_HALF_WIDTH, n)?;
    let values = (0..n * n)
        .into_par_iter()
        .map(|k| cubic_twirled_density(delta, lam, (axis[k / n], axis[k % n])))
        .collect::<Result<Vec<_>, _>>()?;
    let mut doc = CsvDocument::new("twirl-density", &["v_q", "v_p", "density"])?;
    for (k, v) in values.iter().enumerate() {
        doc.row([num(Some(axis[k / n])), num(Some(axis[k % n])), num(Some(*v))])?;
    }
    Ok(Report::ok(doc.finish()?))
}

pub fn cache(action: &CacheAction, s: &Settings, g: &Globals) -> Result<Report, CliError> {
    let dir = g.cache_dir.as_ref().ok_or_else(|| invalid("cache commands need --cache-dir"))?;
    let cache = OperatorCache::on_disk(dir, g.precision)?;
    match action {
        CacheAction::List => {
            let entries = cache.list()?;
            Ok(Report::ok(json_document(
                "cache list",
                json!({ "dir": dir, "count": entries.len(), "entries": entries }),
            )?))
        }
        CacheAction::Purge => {
            let removed = cache.purge()?;
            Ok(Report::ok(json_document("cache purge", json!({ "dir": dir, "removed": removed }))?))
        }
        CacheAction::Prewarm(args) => prewarm(args, s, cache),
    }
}

fn prewarm(args: &PrewarmArgs, s: &Settings, cache: OperatorCache) -> Result<Report, CliError> {
    let gr = grids(
        s,
        "prewarm",
        [args.nbar_min, args.nbar_max, args.nbar_step],
        (args.lam_min, args.lam_max, args.lam_count),
        &args.truncation,
        args.no_smear,
    )?;
    let mut configs = Vec::new();
    for &n_bar in &gr.n_bar {
        for &lam in &gr.lam {
            let params = GkpParams::from_n_bar(n_bar, lam)?;
            let mut cfg = ChannelConfig::for_gate(SimulationGate::Identity, params, gr.plan);
            cfg.n_cut = gr.n_cut;
            if !gr.smear {
                cfg.smear = Smear::none();
            }
            configs.push(cfg);
        }
    }
    let outcomes: Vec<Result<(), String>> = configs
        .par_iter()
        .map(|cfg| DenseReadout::load_or_build(&cache, cfg).map(|_| ()).map_err(|e| e.to_string()))
        .collect();
    let mut report = Report::ok(Vec::new());
    for (cfg, o) in configs.iter().zip(&outcomes) {
        if let Err(e) = o {
            report.failed = true;
            report.warnings.push(format!("Δ={} λ={}: {e}", cfg.params.delta, cfg.params.lam));
        }
    }
    let built = outcomes.iter().filter(|o| o.is_ok()).count();
    let entries = cache.list()?;
    report.document = json_document(
        "cache prewarm",
        json!({ "points": configs.len(), "built": built, "files": entries.len(), "entries": entries }),
    )?;
    Ok(report)
}
