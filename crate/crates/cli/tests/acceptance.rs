//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Every criterion is evaluated and reported; the process exits with status
//! 0 so that the report is always produced by `cargo test`.  Set
//! `ACCEPTANCE_STRICT=1` to turn any FAIL into a nonzero exit.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use polyphase::analytic::{
    bias_split, ft_lambda, ft_lower_bound, ft_validity_limit, leading_shear_coefficient, moments,
    quad::integrate_2d, TwirledCubicDensity,
};
use polyphase::channel::{
    stepped_grid, sweep_with, t_state_fidelity_from, uniform_grid, ChannelConfig, ChannelEngine, LogicalTarget,
    SweepConfig, VacuumAnalysis, VacuumMethodConfig,
};
use polyphase::fock::{gkp_codeword, inner, norm_sqr, FockVector, GkpParams, Smear, TruncationPlan, C64};
use polyphase::polyalg::table::SimulationGate;
use polyphase::polyalg::{
    control_gate_start, multivariate_reduce, parse_rational, reduce, starting_representation, verify_gate,
    RationalPolynomial,
};
use polyphase::symplectic::{identity_suite, nogo_sweep, IDENTITY_TOL, MORPHING_LAMBDAS, NOGO_REL_TOL};
use serde_json::Value;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn poly(items: &[&str]) -> RationalPolynomial {
    RationalPolynomial::from_fraction_strings(items).unwrap()
}

fn desk_plan() -> TruncationPlan {
    TruncationPlan::new(256, 3).unwrap()
}

// ---------------------------------------------------------------------------

fn synth_json(args: &[&str]) -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_polyphase"))
        .arg("synth")
        .args(args)
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "synth {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn minima_of(doc: &Value) -> Vec<Value> {
    std::iter::once(doc["polynomial"].clone())
        .chain(doc["alternatives"].as_array().into_iter().flatten().cloned())
        .collect()
}

fn table_polynomials() -> Outcome {
    let as_json = |p: &RationalPolynomial| serde_json::json!(p.to_fraction_strings());
    let t3 = poly(&["0", "-1/12", "1/8", "1/12"]);
    let sqrt_t = poly(&["0", "0", "1/12", "0", "-1/48"]);
    let fourth = poly(&["0", "1/60", "1/24", "-1/48", "-1/96", "1/240"]);
    let eighth = poly(&["0", "0", "17/720", "0", "-5/576", "0", "1/1440"]);
    let mut problems = Vec::new();

    let level3 = synth_json(&["--level", "3"]);
    if !minima_of(&level3).contains(&as_json(&t3)) {
        problems.push("level 3 minima lack T3".to_string());
    }
    let tgkp = synth_json(&["--poly", "0,-1/4,1/8,1/4", "--level", "3"]);
    if !minima_of(&tgkp).contains(&as_json(&t3)) {
        problems.push("T_GKP reduction lacks T3".into());
    }
    if synth_json(&["--level", "4"])["polynomial"] != as_json(&sqrt_t) {
        problems.push("level 4 ≠ √T".into());
    }
    if !minima_of(&synth_json(&["--level", "5"])).contains(&as_json(&fourth)) {
        problems.push("level 5 minima lack T^(1/4)".into());
    }
    if !minima_of(&synth_json(&["--level", "6"])).contains(&as_json(&eighth)) {
        problems.push("level 6 minima lack T^(1/8)".into());
    }

    let table = synth_json(&["--table"]);
    let row = |name: &str| {
        table["table"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["gate"] == name)
            .map(|r| r["polynomial"].clone())
            .unwrap_or(Value::Null)
    };
    let two = parse_rational("2").unwrap();
    let expected = [
        ("T3", t3.clone()),
        ("TGKP", poly(&["0", "-1/4", "1/8", "1/4"])),
        ("T4", sqrt_t.scale(&two)),
        ("sqrtT", sqrt_t.clone()),
        ("T4th", fourth.clone()),
        ("T4th-mirror", fourth.reflect()),
        ("T8th", eighth.clone()),
    ];
    for (name, p) in &expected {
        if row(name) != as_json(p) {
            problems.push(format!("table entry {name} differs"));
        }
    }
    for (name, p, m) in [("T4", sqrt_t.scale(&two), 3), ("T4th-mirror", fourth.reflect(), 5)] {
        if !verify_gate(&p, m) {
            problems.push(format!("{name} does not implement level {m}"));
        }
    }
    outcome(problems.is_empty(), if problems.is_empty() { "all table entries exact".into() } else { problems.join("; ") })
}

fn degree_theorem() -> Outcome {
    let mut problems = Vec::new();
    for m in 1..=8i64 {
        let out = reduce(&starting_representation(m).unwrap());
        for p in &out.minima {
            if p.degree() != m as usize {
                problems.push(format!("m={m}: degree {}", p.degree()));
            }
            if !verify_gate(p, m) {
                problems.push(format!("m={m}: not a representation"));
            }
            let mut fact: u64 = 1;
            for k in 1..=p.degree() {
                fact *= k as u64;
                let bound = parse_rational(&format!("1/{}", 2 * fact)).unwrap();
                let c = p.coeff(k);
                if c > bound || -c > bound {
                    problems.push(format!("m={m}: |a_{k}| exceeds 1/(2·{k}!)"));
                }
            }
        }
    }
    outcome(problems.is_empty(), if problems.is_empty() { "m = 1…8 minimal degree m, |a_k| ≤ 1/(2k!)".into() } else { problems.join("; ") })
}

fn multi_qubit() -> Outcome {
    let cs = multivariate_reduce(&control_gate_start(2, 2).unwrap()).polynomial.to_string();
    let ccz_start = control_gate_start(3, 1).unwrap();
    let ccz = multivariate_reduce(&ccz_start).polynomial;
    let cs_ok = cs == "-x1^2*x2/4 - x1*x2^2/4 - x1*x2/4";
    let ccz_ok = ccz == ccz_start;
    outcome(cs_ok && ccz_ok, format!("CS → {cs}; CCZ start minimal: {ccz_ok}"))
}

fn circuit_identities() -> Outcome {
    let checks = identity_suite().unwrap();
    let worst = checks.iter().map(|c| c.residual).fold(0.0, f64::max);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let has = |prefix: &str| checks.iter().any(|c| c.name.starts_with(prefix));
    let morphing = MORPHING_LAMBDAS
        .iter()
        .all(|l| checks.iter().any(|c| c.name == format!("morphing/lambda={l}")));
    let covered = morphing && has("biasing-update") && has("q-steane-rewrite");
    outcome(
        failed.is_empty() && worst <= IDENTITY_TOL && covered,
        format!("{} identities, max residual {worst:.2e}, coverage {covered}, failed {failed:?}", checks.len()),
    )
}

fn nogo() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (k, delta) in [0.1, 0.25, 0.5].into_iter().enumerate() {
        let samples = nogo_sweep(100, 4, delta, 1000 + k as u64).unwrap();
        count += samples.len();
        worst = samples.iter().map(|s| s.relative_error).fold(worst, f64::max);
    }
    outcome(worst <= NOGO_REL_TOL && count == 300, format!("{count} circuits, max relative error {worst:.2e}"))
}

// ---------------------------------------------------------------------------
// Codeword oracle: closed-form Mehler kernel on a position grid, projected
// onto Hermite functions.

fn mehler_codeword(bit: u8, delta: f64, lam: f64, x: f64) -> f64 {
    let t = delta * delta;
    let (e1, e2) = ((-t).exp(), (-2.0 * t).exp());
    let spacing = (lam * PI).sqrt();
    let reach = (12.0 / (delta * spacing)).ceil() as i64 + 4;
    (-reach..=reach)
        .map(|m| {
            let y = (2 * m + bit as i64) as f64 * spacing;
            let expo = ((1.0 + e2) * (x * x + y * y) - 4.0 * e1 * x * y) / (2.0 * (1.0 - e2));
            (-expo).exp()
        })
        .sum()
}

fn project_to_fock(psi: &[f64], xs: &[f64], d: usize) -> FockVector {
    let dx = xs[1] - xs[0];
    let mut out = vec![0.0; d];
    for (&x, &f) in xs.iter().zip(psi) {
        let mut h_prev = 0.0;
        let mut h = PI.powf(-0.25) * (-x * x / 2.0).exp();
        for (k, slot) in out.iter_mut().enumerate() {
            *slot += h * f * dx;
            let next = (2.0 / (k as f64 + 1.0)).sqrt() * x * h - (k as f64 / (k as f64 + 1.0)).sqrt() * h_prev;
            h_prev = h;
            h = next;
        }
    }
    out.into_iter().map(|v| C64::new(v, 0.0)).collect()
}

fn codeword_oracle() -> Outcome {
    let d = 400;
    let mut worst_fid: f64 = 1.0;
    let mut worst_odd: f64 = 0.0;
    for delta in [0.3, 0.4] {
        for lam in [1.0, 2.0] {
            let p = GkpParams::new(delta, lam).unwrap();
            let half_span = 8.0 / delta;
            let n = 1 << 14;
            let xs: Vec<f64> = (0..n).map(|i| -half_span + 2.0 * half_span * i as f64 / (n - 1) as f64).collect();
            for bit in 0..2u8 {
                let psi: Vec<f64> = xs.iter().map(|&x| mehler_codeword(bit, delta, lam, x)).collect();
                let oracle = project_to_fock(&psi, &xs, d);
                let fock = gkp_codeword(bit, &p, d, None).unwrap().vector;
                let f = inner(&oracle, &fock).norm_sqr() / (norm_sqr(&oracle) * norm_sqr(&fock));
                worst_fid = worst_fid.min(f);
                let scale = norm_sqr(&fock).sqrt();
                for k in (1..d).step_by(2) {
                    worst_odd = worst_odd.max(fock[k].norm() / scale);
                }
            }
        }
    }
    outcome(
        worst_fid > 1.0 - 1e-6 && worst_odd < 1e-12,
        format!("min fidelity 1−{:.2e}, max odd amplitude {worst_odd:.1e}", 1.0 - worst_fid),
    )
}

// ---------------------------------------------------------------------------

fn t3_config(delta: f64, lam: f64) -> ChannelConfig {
    ChannelConfig::for_gate(SimulationGate::T3, GkpParams::new(delta, lam).unwrap(), desk_plan())
}

fn quantitative_gate(engine: &ChannelEngine) -> Outcome {
    let cfg = t3_config(0.25, 2.0);
    let r = engine.response(&cfg).unwrap();
    let inf = 1.0 - r.readout().average_gate_fidelity(cfg.target);
    outcome(inf < 1.2e-2, format!("T3 Δ=0.25 λ=2 d_init=256: average infidelity {inf:.4e}"))
}

fn floor_eighth() -> f64 {
    (1.0 - (PI / 32.0).cos()) / 3.0
}

fn ordering_and_floor(engine: &ChannelEngine) -> (Outcome, Outcome) {
    use SimulationGate::*;
    let config = SweepConfig {
        gates: vec![Identity, T3, TGkp, IdentityAsEighthRootT],
        n_bar_grid: stepped_grid(2.0, 10.0, 1.0).unwrap(),
        ..SweepConfig::desk(vec![])
    };
    let result = sweep_with(&config, engine).unwrap();
    let failures = result.failures().count();

    let mut order_bad = Vec::new();
    for (a, b) in result.optima_for(T3).zip(result.optima_for(TGkp)) {
        if !(a.avg_infidelity < b.avg_infidelity) {
            order_bad.push(format!("n̄={}", a.n_bar));
        }
    }
    let id_lams: Vec<f64> = result.optima_for(Identity).map(|o| o.lam).collect();
    let id_ok = id_lams.len() == 9 && id_lams.iter().all(|&l| l == 1.0);
    let order_ok = order_bad.is_empty() && result.optima_for(T3).count() == 9 && failures == 0;
    let eight = outcome(
        order_ok && id_ok,
        format!(
            "T3 < T_GKP at optimum for {}/9 n̄ (violations {order_bad:?}); identity optimal λ {id_lams:?}; {failures} failed points",
            9 - order_bad.len()
        ),
    );

    let floor = floor_eighth();
    let gaps: Vec<(f64, f64)> = result
        .optima_for(IdentityAsEighthRootT)
        .filter(|o| o.delta < 0.24)
        .map(|o| (o.delta, o.avg_infidelity - floor))
        .collect();
    let all_gaps: Vec<f64> = result.optima_for(IdentityAsEighthRootT).map(|o| o.avg_infidelity - floor).collect();
    let approaching = all_gaps.windows(2).all(|w| w[1].abs() <= w[0].abs());
    let within = !gaps.is_empty() && gaps.iter().all(|(_, g)| g.abs() <= 1e-4);
    let shown: Vec<String> = gaps.iter().map(|(d, g)| format!("Δ={d:.4}: {g:+.2e}")).collect();
    let nine = outcome(
        within && approaching,
        format!("floor {floor:.4e}; gaps below Δ=0.24 [{}]; monotone approach {approaching}", shown.join(", ")),
    );
    (eight, nine)
}

fn vacuum_comparison(engine: &ChannelEngine) -> Outcome {
    let lams = uniform_grid(1.0, 5.0, 16).unwrap();
    let (lam, target) = lams
        .iter()
        .map(|&lam| {
            let r = engine.response(&t3_config(0.25, lam)).unwrap();
            (lam, 1.0 - r.readout().average_gate_fidelity(LogicalTarget::Phase(3)), 1.0 - t_state_fidelity_from(&r))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(lam, _, t)| (lam, t))
        .unwrap();
    let fine = VacuumAnalysis::new(VacuumMethodConfig::new(0.25, VacuumMethodConfig::DEFAULT_GRID).unwrap()).unwrap();
    let coarse = VacuumAnalysis::new(VacuumMethodConfig::new(0.25, 250).unwrap()).unwrap();
    let (f, fc) = (fine.fraction_to_match(target), coarse.fraction_to_match(target));
    let detail = format!(
        "T3 T-state infidelity {target:.4e} at λ={lam:.3}; vacuum fraction to match {} (grid 500), {} (grid 250)",
        f.map_or("none".into(), |v| format!("{:.1}%", 100.0 * v)),
        fc.map_or("none".into(), |v| format!("{:.1}%", 100.0 * v)),
    );
    outcome(f.is_some_and(|v| v < 0.2), detail)
}

fn moment_oracle() -> Outcome {
    let t3 = SimulationGate::T3.polynomial();
    let mut worst: f64 = 0.0;
    for delta in [0.25, 0.35] {
        for lam in [1.5, 2.5] {
            let d = TwirledCubicDensity::new(delta, lam).unwrap();
            let sq = (d.q_param() / (2.0 * PI)).sqrt();
            let rq = 14.0 * sq;
            let sp = (d.p_param(rq) / (2.0 * PI)).sqrt();
            let rp = 14.0 * sp + d.p_mean(rq).abs().max(d.p_mean(-rq).abs());
            let (bq, bp) = ((-rq, rq), (-rp, rp));
            let q2 = integrate_2d(|q, p| q * q * d.density(q, p), bq, bp, 1e-14, 1e-9).unwrap();
            let p2 = integrate_2d(|q, p| p * p * d.density(q, p), bq, bp, 1e-14, 1e-9).unwrap();
            let qp = integrate_2d(|q, p| q * p * d.density(q, p), bq, bp, 1e-14, 1e-9).unwrap();
            let (dq, dp) = bias_split(delta, lam);
            let m = moments(&t3, dq, dp).unwrap();
            for (closed, numeric) in [(m.e_vq2, q2), (m.e_vp2, p2), (m.e_vqvp, qp)] {
                worst = worst.max((closed - numeric).abs() / numeric.abs());
            }
        }
    }
    let ratio = leading_shear_coefficient(&SimulationGate::TGkp.polynomial()) / leading_shear_coefficient(&t3);
    let nine = ratio == parse_rational("9").unwrap();
    outcome(worst < 0.01 && nine, format!("max relative deviation {:.2e}; T_GKP/T3 shear ratio {ratio}", worst))
}

fn ft_bound(engine: &ChannelEngine) -> Outcome {
    let bounds: Vec<f64> = [0.3, 0.2, 0.1, 0.05].iter().map(|&d| ft_lower_bound(d).unwrap().f_lower_bound).collect();
    let monotone = bounds.windows(2).all(|w| w[1] >= w[0]) && bounds.iter().all(|&b| b <= 1.0);
    let limit = ft_validity_limit();
    let boundary = (limit - 0.372).abs() < 1e-3
        && ft_lower_bound(limit - 1e-6).unwrap().validity
        && !ft_lower_bound(limit + 1e-6).unwrap().validity;
    let lam = ft_lambda(0.2);
    let cfg = t3_config(0.2, lam).with_smear(Smear::none());
    let f = engine.response(&cfg).unwrap().readout().average_gate_fidelity(cfg.target);
    let bound = ft_lower_bound(0.2).unwrap().f_lower_bound;
    outcome(
        monotone && boundary && f >= bound,
        format!(
            "bounds {bounds:.4?} over Δ = 0.3, 0.2, 0.1, 0.05; validity edge Δ={limit:.4}; T3 at Δ=0.2, λ={lam:.3}: F={f:.5} ≥ {bound:.5}"
        ),
    )
}

// ---------------------------------------------------------------------------

type Row = (u32, &'static str, Duration, Duration, Outcome);

fn timed(n: u32, name: &'static str, budget_s: u64, f: impl FnOnce() -> Outcome) -> Row {
    let t0 = Instant::now();
    let o = f();
    (n, name, t0.elapsed(), Duration::from_secs(budget_s), o)
}

fn main() {
    let engine = ChannelEngine::new();
    let mut results = vec![
        timed(1, "polynomial table", 1, table_polynomials),
        timed(2, "degree theorem", 10, degree_theorem),
        timed(3, "multi-qubit synthesis", 1, multi_qubit),
        timed(4, "circuit identities", 1, circuit_identities),
        timed(5, "no-go determinant", 30, nogo),
        timed(6, "codeword oracle", 120, codeword_oracle),
        timed(7, "T3 gate fidelity", 600, || quantitative_gate(&engine)),
    ];
    let t0 = Instant::now();
    let (eight, nine) = ordering_and_floor(&engine);
    let sweep_time = t0.elapsed();
    results.push((8, "gate ordering", sweep_time, Duration::from_secs(45 * 60), eight));
    results.push((9, "trivial-benchmark floor", sweep_time, Duration::from_secs(45 * 60), nine));
    results.push(timed(10, "vacuum-state comparison", 15 * 60, || vacuum_comparison(&engine)));
    results.push(timed(11, "moment oracle", 60, moment_oracle));
    results.push(timed(12, "fault-tolerance bound", 5 * 60, || ft_bound(&engine)));

    let mut failed = 0;
    for (n, name, took, budget, o) in &results {
        let in_time = took <= budget;
        let pass = o.passed && in_time;
        failed += usize::from(!pass);
        let timing = if in_time {
            format!("{:.1}s", took.as_secs_f64())
        } else {
            format!("{:.1}s, over the {}s budget", took.as_secs_f64(), budget.as_secs())
        };
        println!("{} criterion {n:>2} ({name}): {} [{timing}]", if pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {}/{} criteria pass", results.len() - failed, results.len());
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
