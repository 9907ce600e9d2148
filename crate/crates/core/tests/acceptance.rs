//! End-to-end acceptance checks. Runs as a plain binary (no libtest harness)
//! so that every criterion prints one PASS/FAIL line; exits non-zero if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use paswipt::distdist::ground_projection_cdf;
use paswipt::energy::{avg_energy_lm_closed, avg_energy_nlm_bound, avg_energy_quadrature};
use paswipt::geometry::{diagonal_distance_slope, min_squared_distance_bruteforce};
use paswipt::montecarlo::{estimate, sample_ue_stream, DEFAULT_SAMPLES};
use paswipt::quadrature::integrate;
use paswipt::rate::{avg_rate_closed, avg_rate_quadrature};
use paswipt::stats::{ks_one_sample, ks_two_sample, one_sample_critical, two_sample_critical};
use paswipt::sweep::{
    self, affine_fit_residual, curve, dominates, max_chord_deviation, AxisGrid, Experiment, Method,
    Preset, Protocol, SweepSpec, SweepTable,
};
use paswipt::{
    Config64, Distribution64, McOptions, Metric, ModelKind, QuadratureOptions, Scenario64, Scheme,
};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const KS_ALPHA: f64 = 0.01;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn reference(pt_w: f64) -> Scenario64 {
    Config64::reference(pt_w)
        .validate()
        .expect("reference config is valid")
}

fn mc(samples: u64, seed: u64, workers: usize) -> McOptions {
    McOptions {
        samples,
        seed,
        workers,
    }
}

/// Uniform on the open interval (0, 1).
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * open_unit(rng)
}

fn listing(items: &[String]) -> String {
    if items.is_empty() {
        String::new()
    } else {
        format!(": {}", items.join("; "))
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Closed forms within 4 standard errors of 10^6-sample Monte Carlo.
fn closed_form_vs_monte_carlo() -> Outcome {
    let sc = reference(0.3);
    let opts = mc(DEFAULT_SAMPLES, 0xacce_0001, 0);
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for scheme in Scheme::ALL {
        let dep = sc.deployment(scheme);
        let lm = avg_energy_lm_closed(
            &dep,
            &sc.system,
            &sc.protocol,
            sc.harvest(ModelKind::Linear),
        )
        .map_err(|e| e.to_string())?
        .value_w;
        let rate = avg_rate_closed(&dep, &sc.system, &sc.protocol).bits_per_s_per_hz;
        for (metric, closed) in [(Metric::EnergyLinear, lm), (Metric::Rate, rate)] {
            let est = estimate(metric, scheme, &sc, &opts).map_err(|e| e.to_string())?;
            let z = est.z_score(closed).abs();
            worst = worst.max(z);
            if z > 4.0 {
                failures.push(format!("{scheme}/{metric}: |z| = {z:.2}"));
            }
        }
    }
    check(
        failures.is_empty(),
        format!(
            "6 comparisons, worst |z| = {worst:.2} (limit 4){}",
            listing(&failures)
        ),
    )
}

/// Closed forms against quadrature of the squared-distance densities.
fn closed_form_vs_quadrature() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0002);
    let opts = QuadratureOptions::default();
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for draw in 0..100 {
        let mut c = Config64::reference(uniform(&mut rng, 0.01, 1.0));
        c.height = uniform(&mut rng, 1.0, 5.0);
        c.d_x = uniform(&mut rng, 4.0, 20.0);
        c.d_y = uniform(&mut rng, 4.0, 20.0);
        let sc = c.validate().map_err(|e| e.to_string())?;
        let lm = sc.harvest(ModelKind::Linear);
        for scheme in Scheme::ALL {
            let dep = sc.deployment(scheme);
            let e_closed = avg_energy_lm_closed(&dep, &sc.system, &sc.protocol, lm)
                .map_err(|e| e.to_string())?;
            let e_quad = avg_energy_quadrature(&dep, &sc.system, &sc.protocol, lm, &opts)
                .map_err(|e| e.to_string())?;
            let r_closed = avg_rate_closed(&dep, &sc.system, &sc.protocol);
            let r_quad = avg_rate_quadrature(&dep, &sc.system, &sc.protocol, &opts)
                .map_err(|e| e.to_string())?;
            for (what, a, b) in [
                ("energy", e_closed.value_w, e_quad.value_w),
                ("rate", r_closed.bits_per_s_per_hz, r_quad.bits_per_s_per_hz),
            ] {
                let r = rel(a, b);
                worst = worst.max(r);
                if r > 1e-8 {
                    failures.push(format!("draw {draw} {scheme} {what}: {r:e}"));
                }
            }
        }
    }
    check(
        failures.is_empty(),
        format!(
            "600 comparisons, worst relative gap {worst:.1e} (limit 1e-8){}",
            listing(&failures)
        ),
    )
}

/// KS tests of the analytical laws against geometric sampling, and density
/// normalization.
fn distribution_correctness() -> Outcome {
    let n = 1_000_000usize;
    let sc = reference(0.3);
    let region = sc.region;
    let mut lines = Vec::new();
    let mut ok = true;
    let one_crit = one_sample_critical(n, KS_ALPHA);
    let two_crit = two_sample_critical(n, n, KS_ALPHA);

    let positions: Vec<_> = sample_ue_stream(&region, 0xacce_0003, n as u64).collect();
    for scheme in Scheme::ALL {
        let dep = sc.deployment(scheme);
        let dist = Distribution64::new(dep);
        let mut geometric: Vec<f64> = positions
            .iter()
            .map(|ue| dep.optimal_squared_distance(ue).map(|l| l.get()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;

        let mut ground: Vec<f64> = geometric
            .iter()
            .map(|l| (l - region.height().powi(2)).max(0.0).sqrt())
            .collect();
        let mut inverse: Vec<f64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0004 + scheme as u64);
            (0..n)
                .map(|_| dist.sample(open_unit(&mut rng)))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?
        };

        let mut geometric_copy = geometric.clone();
        let d1 = ks_one_sample(&mut geometric_copy, |l| dist.cdf(l));
        let d2 = ks_two_sample(&mut geometric, &mut inverse);
        ok &= d1 < one_crit && d2 < two_crit;
        lines.push(format!("{scheme}: D1 = {d1:.5}, D2 = {d2:.5}"));
        if scheme == Scheme::Dds {
            let d_ground = ks_one_sample(&mut ground, |s| ground_projection_cdf(&region, s));
            ok &= d_ground < one_crit;
            lines.push(format!("dds ground: D1 = {d_ground:.5}"));
        }

        // Density of l, integrated through l = h^2 + t^2.
        let (lo, hi) = dist.support();
        let mass = integrate(
            |t: f64| {
                if t > 0.0 {
                    2.0 * t * dist.pdf(lo + t * t).unwrap_or(f64::NAN)
                } else {
                    0.0
                }
            },
            0.0,
            (hi - lo).sqrt(),
            &QuadratureOptions::with_rel_tol(1e-12),
        )
        .map_err(|e| e.to_string())?
        .value;
        ok &= (mass - 1.0).abs() <= 1e-9;
        lines.push(format!("{scheme}: |mass - 1| = {:.1e}", (mass - 1.0).abs()));
    }
    check(
        ok,
        format!(
            "n = {n}; critical D1 {one_crit:.5}, D2 {two_crit:.5}; mass limit 1e-9; {}",
            lines.join(", ")
        ),
    )
}

/// Closed-form antenna placement against a dense grid along the waveguide.
fn placement_optimality() -> Outcome {
    let region = reference(0.3).region;
    let sc = reference(0.3);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_slope: f64 = 0.0;
    let mut failures = 0;
    for scheme in Scheme::ALL {
        let dep = sc.deployment(scheme);
        for ue in sample_ue_stream(&region, 0xacce_0005 + scheme as u64, 1000) {
            let closed = dep
                .optimal_squared_distance(&ue)
                .map_err(|e| e.to_string())?
                .get();
            let grid = min_squared_distance_bruteforce(&dep, &ue, 10_000).get();
            worst_excess = worst_excess.max(closed - grid);
            if closed > grid + 1e-6 {
                failures += 1;
            }
            if scheme == Scheme::Dds {
                let p = dep
                    .optimal_antenna_position(&ue)
                    .map_err(|e| e.to_string())?;
                let slope = diagonal_distance_slope(&region, p.x, &ue).abs();
                worst_slope = worst_slope.max(slope);
                if slope > 1e-9 {
                    failures += 1;
                }
            }
        }
    }
    check(
        failures == 0,
        format!(
            "3000 users, max(closed - grid) = {worst_excess:.1e} (limit 1e-6), \
             max |first-order condition| = {worst_slope:.1e} (limit 1e-9), {failures} failures"
        ),
    )
}

/// Logistic-model bound above the exact average (quadrature and Monte Carlo).
fn jensen_ordering() -> Outcome {
    // Rounding floor for comparisons at saturation, where both sides equal
    // alpha * phi up to a few ulps.
    const FLOOR: f64 = 1e-12;
    let mut lines = Vec::new();
    let mut ok = true;
    for pt in [0.05, 0.3, 1.0] {
        let sc = reference(pt);
        let nlm = sc.harvest(ModelKind::Logistic);
        for scheme in Scheme::ALL {
            let dep = sc.deployment(scheme);
            let bound = avg_energy_nlm_bound(&dep, &sc.system, &sc.protocol, nlm)
                .map_err(|e| e.to_string())?
                .value_w;
            let quad = avg_energy_quadrature(
                &dep,
                &sc.system,
                &sc.protocol,
                nlm,
                &QuadratureOptions::default(),
            )
            .map_err(|e| e.to_string())?
            .value_w;
            let est = estimate(
                Metric::EnergyLogistic,
                scheme,
                &sc,
                &mc(DEFAULT_SAMPLES, 0xacce_0006, 0),
            )
            .map_err(|e| e.to_string())?;
            let pass = bound - quad >= -FLOOR && bound >= est.mean - 4.0 * est.std_error - FLOOR;
            ok &= pass;
            if !pass {
                lines.push(format!(
                    "pt={pt} {scheme}: bound {bound:e}, quad {quad:e}, mc {:e}",
                    est.mean
                ));
            }
        }
    }
    check(
        ok,
        format!(
            "9 cases, bound >= quadrature and >= MC - 4 SE (floor 1e-12){}",
            listing(&lines)
        ),
    )
}

/// Energy versus transmit power: linear model affine, logistic model saturating.
fn energy_vs_power_shape() -> Outcome {
    let mut spec = SweepSpec::new(Experiment::EnergyVsPower, Config64::reference(0.3));
    spec.methods = vec![Method::Closed];
    spec.models = vec![ModelKind::Linear];
    let rows = sweep::run_power_sweep(&spec).map_err(|e| e.to_string())?;
    let mut worst_fit: f64 = 0.0;
    for scheme in Scheme::ALL {
        let (xs, ys): (Vec<f64>, Vec<f64>) = rows
            .iter()
            .filter(|r| r.scheme == scheme)
            .map(|r| (r.pt_w, r.value))
            .unzip();
        worst_fit = worst_fit.max(affine_fit_residual(&xs, &ys));
    }

    let sc = reference(10.0);
    let ceiling = sc.protocol.alpha() * sc.logistic_params().saturation_w();
    let mut worst_gap: f64 = 0.0;
    for scheme in Scheme::ALL {
        let dep = sc.deployment(scheme);
        let e = avg_energy_quadrature(
            &dep,
            &sc.system,
            &sc.protocol,
            sc.harvest(ModelKind::Logistic),
            &QuadratureOptions::default(),
        )
        .map_err(|e| e.to_string())?
        .value_w;
        worst_gap = worst_gap.max(rel(e, ceiling));
    }
    check(
        worst_fit < 1e-12 && worst_gap <= 0.01,
        format!(
            "LM fit residual {worst_fit:.1e} (limit 1e-12); NLM at 10 W within {:.2e} of alpha*phi (limit 1e-2)",
            worst_gap
        ),
    )
}

/// Energy-rate trade-off at 0.3 W in the 8 m x 8 m room.
fn tradeoff_shape() -> Outcome {
    let spec = SweepSpec::new(Experiment::EnergyRateRegion, Config64::reference(0.3))
        .with_preset(Preset::Fig4);
    let pts = sweep::run_tradeoff(&spec).map_err(|e| e.to_string())?;
    let mut coincide: f64 = 0.0;
    let mut ts_fit: f64 = 0.0;
    let mut ps_chord = f64::INFINITY;
    for scheme in Scheme::ALL {
        let ts = curve(&pts, Protocol::Ts, scheme, ModelKind::Linear);
        let ps = curve(&pts, Protocol::Ps, scheme, ModelKind::Linear);
        let e_scale = ts.iter().fold(0.0_f64, |m, p| m.max(p.energy_w));
        let r_scale = ts.iter().fold(0.0_f64, |m, p| m.max(p.rate_bits_s_hz));
        for (a, b) in ts.iter().zip(&ps) {
            coincide = coincide
                .max((a.energy_w - b.energy_w).abs() / e_scale)
                .max((a.rate_bits_s_hz - b.rate_bits_s_hz).abs() / r_scale);
        }

        // Time switching: energy and rate both affine in alpha.
        let ts = curve(&pts, Protocol::Ts, scheme, ModelKind::Logistic);
        let c: Vec<f64> = ts.iter().map(|p| p.control).collect();
        let e: Vec<f64> = ts.iter().map(|p| p.energy_w).collect();
        let r: Vec<f64> = ts.iter().map(|p| p.rate_bits_s_hz).collect();
        ts_fit = ts_fit
            .max(affine_fit_residual(&c, &e))
            .max(affine_fit_residual(&c, &r));

        // Power splitting: energy bends away from its chord in beta.
        let ps = curve(&pts, Protocol::Ps, scheme, ModelKind::Logistic);
        let c: Vec<f64> = ps.iter().map(|p| p.control).collect();
        let e: Vec<f64> = ps.iter().map(|p| p.energy_w).collect();
        let e_scale = e.iter().fold(0.0_f64, |m, v| m.max(*v));
        ps_chord = ps_chord.min(max_chord_deviation(&c, &e) / e_scale);
    }

    let mut dominated = true;
    for protocol in Protocol::ALL {
        for model in ModelKind::ALL {
            let dds = curve(&pts, protocol, Scheme::Dds, model);
            for other in [Scheme::Eds, Scheme::Cds] {
                dominated &= dominates(&dds, &curve(&pts, protocol, other, model));
            }
        }
    }
    check(
        coincide <= 1e-12 && ts_fit < 1e-12 && ps_chord > 0.0 && dominated,
        format!(
            "LM TS/PS gap {coincide:.1e} (limit 1e-12); NLM TS fit residual {ts_fit:.1e} (limit 1e-12); \
             NLM PS energy min chord deviation {ps_chord:.3} of max energy (> 0); DDS dominates: {dominated}"
        ),
    )
}

fn csv_bytes(table: &SweepTable) -> Result<Vec<u8>, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let paths = sweep::emit_outputs(table, dir.path(), true).map_err(|e| e.to_string())?;
    std::fs::read(&paths[0]).map_err(|e| e.to_string())
}

/// Bitwise-identical estimates across worker counts; byte-identical CSV.
fn determinism() -> Outcome {
    let sc = reference(0.3);
    let mut compared = 0;
    for scheme in Scheme::ALL {
        for metric in [Metric::EnergyLinear, Metric::EnergyLogistic, Metric::Rate] {
            let runs: Vec<_> = [1, 4, 8]
                .into_iter()
                .map(|w| estimate(metric, scheme, &sc, &mc(DEFAULT_SAMPLES, 0xacce_0008, w)))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            for r in &runs[1..] {
                if r.mean.to_bits() != runs[0].mean.to_bits()
                    || r.std_error.to_bits() != runs[0].std_error.to_bits()
                {
                    return Err(format!("{scheme}/{metric}: {:?} vs {:?}", runs[0], r));
                }
                compared += 1;
            }
        }
    }

    let mut files = 0;
    for experiment in [
        Experiment::EnergyVsPower,
        Experiment::RateVsPower,
        Experiment::EnergyRateRegion,
    ] {
        let mut spec = SweepSpec::new(experiment, Config64::reference(0.3));
        if experiment == Experiment::EnergyRateRegion {
            spec = spec.with_preset(Preset::Fig4);
        } else {
            spec.grid = AxisGrid::log(0.01, 1.0, 8);
            spec.methods.push(Method::MonteCarlo);
            spec.mc = mc(200_000, 0xacce_0009, 1);
        }
        let first = csv_bytes(&sweep::run(&spec).map_err(|e| e.to_string())?)?;
        spec.mc.workers = 8;
        let second = csv_bytes(&sweep::run(&spec).map_err(|e| e.to_string())?)?;
        if first != second {
            return Err(format!("{} CSV differs between runs", experiment.as_str()));
        }
        files += 1;
    }
    Ok(format!(
        "{compared} estimate pairs bitwise equal across 1/4/8 workers; {files} sweep CSVs byte-identical"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("closed form vs Monte Carlo", closed_form_vs_monte_carlo),
        ("closed form vs quadrature", closed_form_vs_quadrature),
        ("distribution correctness", distribution_correctness),
        ("placement optimality", placement_optimality),
        ("Jensen ordering", jensen_ordering),
        ("energy vs power shape", energy_vs_power_shape),
        ("energy-rate trade-off shape", tradeoff_shape),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
