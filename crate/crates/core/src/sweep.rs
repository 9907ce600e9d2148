//! Figure-style parameter sweeps.
//!
//! Three experiments are supported: harvested energy versus transmit power,
//! rate versus transmit power, and the energy-rate region traced by the pure
//! time-switching and pure power-splitting restrictions of the hybrid
//! protocol. Tables are written as CSV with a fixed column order, optionally
//! with a matplotlib script that renders them.
//!
//! Energy CSV: `pt_w,scheme,model,method,value_w`
//! Rate CSV:   `pt_w,scheme,method,rate_bits_s_hz`
//! Region CSV: `protocol,control,scheme,model,energy_w,rate_bits_s_hz`

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::energy::{
    avg_energy_lm_closed, avg_energy_nlm_bound, avg_energy_quadrature, EnergyError,
};
use crate::geometry::Scheme;
use crate::montecarlo::{estimate, McError, McOptions, Metric};
use crate::quadrature::QuadratureOptions;
use crate::rate::{avg_rate_closed, avg_rate_quadrature, RateError};
use crate::sysconfig::{Config, ModelKind, Scenario, ValidationErrors};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Config(#[from] ValidationErrors),
    #[error("{context}: {source}")]
    Row { context: String, source: RowFailure },
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum RowFailure {
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Rate(#[from] RateError),
    #[error(transparent)]
    MonteCarlo(#[from] McError),
    #[error(transparent)]
    Config(#[from] ValidationErrors),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    EnergyVsPower,
    RateVsPower,
    EnergyRateRegion,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::EnergyVsPower => "energy",
            Experiment::RateVsPower => "rate",
            Experiment::EnergyRateRegion => "region",
        }
    }

    fn file_stem(self) -> &'static str {
        match self {
            Experiment::EnergyVsPower => "energy_vs_power",
            Experiment::RateVsPower => "rate_vs_power",
            Experiment::EnergyRateRegion => "energy_rate_region",
        }
    }
}

impl FromStr for Experiment {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "energy" => Ok(Experiment::EnergyVsPower),
            "rate" => Ok(Experiment::RateVsPower),
            "region" => Ok(Experiment::EnergyRateRegion),
            _ => Err(SweepError::InvalidSpec(format!("unknown experiment {s:?}"))),
        }
    }
}

/// How a value in a power sweep was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Closed,
    Bound,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Bound => "bound",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "mc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "closed" => Ok(Method::Closed),
            "bound" => Ok(Method::Bound),
            "quad" | "quadrature" => Ok(Method::Quadrature),
            "mc" => Ok(Method::MonteCarlo),
            _ => Err(SweepError::InvalidSpec(format!("unknown method {s:?}"))),
        }
    }
}

/// Named scenario overrides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Square 8 m x 8 m room.
    S1,
    /// Rectangular 15 m x 8 m room.
    S2,
    /// `alpha = beta = 0.8`.
    C1,
    /// `alpha = beta = 0.6`.
    C2,
    /// Trade-off setting: 8 m x 8 m room at 0.3 W.
    Fig4,
}

impl Preset {
    pub fn apply(self, config: &mut Config<f64>) {
        match self {
            Preset::S1 => {
                config.d_x = 8.0;
                config.d_y = 8.0;
            }
            Preset::S2 => {
                config.d_x = 15.0;
                config.d_y = 8.0;
            }
            Preset::C1 => {
                config.alpha = 0.8;
                config.beta = 0.8;
            }
            Preset::C2 => {
                config.alpha = 0.6;
                config.beta = 0.6;
            }
            Preset::Fig4 => {
                config.d_x = 8.0;
                config.d_y = 8.0;
                config.transmit_power_w = 0.3;
            }
        }
    }
}

impl FromStr for Preset {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "s1" => Ok(Preset::S1),
            "s2" => Ok(Preset::S2),
            "c1" => Ok(Preset::C1),
            "c2" => Ok(Preset::C2),
            "fig4" => Ok(Preset::Fig4),
            _ => Err(SweepError::InvalidSpec(format!("unknown preset {s:?}"))),
        }
    }
}

/// Evenly spaced axis, linear or logarithmic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log: bool,
}

impl AxisGrid {
    pub fn linear(min: f64, max: f64, points: usize) -> Self {
        Self {
            min,
            max,
            points,
            log: false,
        }
    }

    pub fn log(min: f64, max: f64, points: usize) -> Self {
        Self {
            min,
            max,
            points,
            log: true,
        }
    }

    /// Default transmit-power axis: 0.01 W to 1 W, 50 log-spaced points.
    pub fn default_power() -> Self {
        Self::log(0.01, 1.0, 50)
    }

    /// Default protocol-control axis: 0 to 1 in steps of 0.01.
    pub fn default_control() -> Self {
        Self::linear(0.0, 1.0, 101)
    }

    fn check(&self) -> Result<(), SweepError> {
        let bad = |why: &str| Err(SweepError::InvalidSpec(format!("grid {why}")));
        if self.points < 2 {
            return bad("needs at least 2 points");
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return bad("bounds must be finite with min < max");
        }
        if self.log && self.min <= 0.0 {
            return bad("log spacing needs a positive minimum");
        }
        Ok(())
    }

    /// Grid values; the endpoints are exact.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == self.points - 1 {
                    return self.max;
                }
                let f = i as f64 / last;
                if self.log {
                    (self.min.ln() + f * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + f * (self.max - self.min)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub experiment: Experiment,
    pub schemes: Vec<Scheme>,
    pub models: Vec<ModelKind>,
    /// Base configuration. Power sweeps overwrite the transmit power; region
    /// sweeps overwrite `alpha` and `beta`.
    pub base: Config<f64>,
    pub grid: AxisGrid,
    pub methods: Vec<Method>,
    pub mc: McOptions,
    pub quadrature: QuadratureOptions<f64>,
}

impl SweepSpec {
    /// Spec with the experiment's default grid and methods (Monte Carlo off).
    pub fn new(experiment: Experiment, base: Config<f64>) -> Self {
        let (grid, methods) = match experiment {
            Experiment::EnergyVsPower => (
                AxisGrid::default_power(),
                vec![Method::Closed, Method::Bound, Method::Quadrature],
            ),
            Experiment::RateVsPower => (
                AxisGrid::default_power(),
                vec![Method::Closed, Method::Quadrature],
            ),
            Experiment::EnergyRateRegion => (AxisGrid::default_control(), Vec::new()),
        };
        Self {
            experiment,
            schemes: Scheme::ALL.to_vec(),
            models: ModelKind::ALL.to_vec(),
            base,
            grid,
            methods,
            mc: McOptions::default(),
            quadrature: QuadratureOptions::default(),
        }
    }

    pub fn with_preset(mut self, preset: Preset) -> Self {
        preset.apply(&mut self.base);
        self
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        self.grid.check()?;
        if self.schemes.is_empty() {
            return Err(SweepError::InvalidSpec("no schemes selected".into()));
        }
        if self.experiment != Experiment::RateVsPower && self.models.is_empty() {
            return Err(SweepError::InvalidSpec(
                "no harvesting models selected".into(),
            ));
        }
        if self.experiment == Experiment::EnergyRateRegion
            && (self.grid.min < 0.0 || self.grid.max > 1.0 || self.grid.log)
        {
            return Err(SweepError::InvalidSpec(
                "control grid must be linear within [0, 1]".into(),
            ));
        }
        self.base.validate()?;
        Ok(())
    }
}

/// One value of a power sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerRow {
    pub pt_w: f64,
    pub scheme: Scheme,
    /// `None` for rate rows.
    pub model: Option<ModelKind>,
    pub method: Method,
    pub value: f64,
}

/// Pure-protocol restriction of the hybrid protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Protocol {
    /// `beta = 1`, `alpha` swept.
    Ts,
    /// `alpha = 1`, `beta` swept.
    Ps,
}

impl Protocol {
    pub const ALL: [Protocol; 2] = [Protocol::Ts, Protocol::Ps];

    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Ts => "ts",
            Protocol::Ps => "ps",
        }
    }

    /// `(alpha, beta)` for control value `c`.
    pub fn split(self, c: f64) -> (f64, f64) {
        match self {
            Protocol::Ts => (c, 1.0),
            Protocol::Ps => (1.0, c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffPoint {
    pub protocol: Protocol,
    pub control: f64,
    pub scheme: Scheme,
    pub model: ModelKind,
    pub energy_w: f64,
    pub rate_bits_s_hz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepTable {
    Power {
        experiment: Experiment,
        rows: Vec<PowerRow>,
    },
    Region(Vec<TradeoffPoint>),
}

impl SweepTable {
    pub fn is_empty(&self) -> bool {
        match self {
            SweepTable::Power { rows, .. } => rows.is_empty(),
            SweepTable::Region(points) => points.is_empty(),
        }
    }

    pub fn experiment(&self) -> Experiment {
        match self {
            SweepTable::Power { experiment, .. } => *experiment,
            SweepTable::Region(_) => Experiment::EnergyRateRegion,
        }
    }
}

pub fn run(spec: &SweepSpec) -> Result<SweepTable, SweepError> {
    match spec.experiment {
        Experiment::EnergyRateRegion => Ok(SweepTable::Region(run_tradeoff(spec)?)),
        experiment => Ok(SweepTable::Power {
            experiment,
            rows: run_power_sweep(spec)?,
        }),
    }
}

fn row_err(pt_w: f64, scheme: Scheme, what: &str) -> impl FnOnce(RowFailure) -> SweepError + '_ {
    move |source| SweepError::Row {
        context: format!("pt_w={pt_w} scheme={scheme} {what}"),
        source,
    }
}

fn energy_value(
    sc: &Scenario<f64>,
    scheme: Scheme,
    model: ModelKind,
    method: Method,
    spec: &SweepSpec,
) -> Result<Option<f64>, RowFailure> {
    let dep = sc.deployment(scheme);
    let harvest = sc.harvest(model);
    let v = match (method, model) {
        (Method::Closed, ModelKind::Linear) => {
            avg_energy_lm_closed(&dep, &sc.system, &sc.protocol, harvest)?.value_w
        }
        (Method::Bound, ModelKind::Logistic) => {
            avg_energy_nlm_bound(&dep, &sc.system, &sc.protocol, harvest)?.value_w
        }
        (Method::Quadrature, _) => {
            avg_energy_quadrature(&dep, &sc.system, &sc.protocol, harvest, &spec.quadrature)?
                .value_w
        }
        (Method::MonteCarlo, _) => estimate(Metric::energy(model), scheme, sc, &spec.mc)?.mean,
        // No closed form for the logistic average; the bound is logistic-only.
        (Method::Closed, ModelKind::Logistic) | (Method::Bound, ModelKind::Linear) => {
            return Ok(None)
        }
    };
    Ok(Some(v))
}

fn rate_value(
    sc: &Scenario<f64>,
    scheme: Scheme,
    method: Method,
    spec: &SweepSpec,
) -> Result<Option<f64>, RowFailure> {
    let dep = sc.deployment(scheme);
    let v = match method {
        Method::Closed => avg_rate_closed(&dep, &sc.system, &sc.protocol).bits_per_s_per_hz,
        Method::Quadrature => {
            avg_rate_quadrature(&dep, &sc.system, &sc.protocol, &spec.quadrature)?.bits_per_s_per_hz
        }
        Method::MonteCarlo => estimate(Metric::Rate, scheme, sc, &spec.mc)?.mean,
        Method::Bound => return Ok(None),
    };
    Ok(Some(v))
}

/// Energy or rate versus transmit power. Rows are ordered by scheme, model,
/// method, then power.
pub fn run_power_sweep(spec: &SweepSpec) -> Result<Vec<PowerRow>, SweepError> {
    spec.validate()?;
    let powers = spec.grid.values();
    let base = spec.base.validate()?;
    let mut schemes = spec.schemes.clone();
    schemes.sort();
    schemes.dedup();
    let mut methods = spec.methods.clone();
    methods.sort();
    methods.dedup();
    let models: Vec<Option<ModelKind>> = match spec.experiment {
        Experiment::EnergyVsPower => {
            let mut m = spec.models.clone();
            m.sort();
            m.dedup();
            m.into_iter().map(Some).collect()
        }
        Experiment::RateVsPower => vec![None],
        Experiment::EnergyRateRegion => {
            return Err(SweepError::InvalidSpec(
                "region is not a power sweep".into(),
            ))
        }
    };

    let mut rows = Vec::new();
    for &scheme in &schemes {
        for &model in &models {
            for &method in &methods {
                for &pt_w in &powers {
                    let what = method.as_str();
                    let sc = base
                        .with_transmit_power(pt_w)
                        .map_err(|e| row_err(pt_w, scheme, what)(e.into()))?;
                    let value = match model {
                        Some(model) => energy_value(&sc, scheme, model, method, spec),
                        None => rate_value(&sc, scheme, method, spec),
                    }
                    .map_err(row_err(pt_w, scheme, what))?;
                    if let Some(value) = value {
                        rows.push(PowerRow {
                            pt_w,
                            scheme,
                            model,
                            method,
                            value,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// Energy-rate trade-off at fixed transmit power. The time-switching curve
/// fixes `beta = 1` and sweeps `alpha`; the power-splitting curve fixes
/// `alpha = 1` and sweeps `beta`. Logistic-model energy is the exact
/// (quadrature) average; linear-model energy and all rates are closed form.
pub fn run_tradeoff(spec: &SweepSpec) -> Result<Vec<TradeoffPoint>, SweepError> {
    spec.validate()?;
    let base = spec.base.validate()?;
    let controls = spec.grid.values();
    let mut schemes = spec.schemes.clone();
    schemes.sort();
    schemes.dedup();
    let mut models = spec.models.clone();
    models.sort();
    models.dedup();

    let mut points = Vec::new();
    for protocol in Protocol::ALL {
        for &scheme in &schemes {
            for &model in &models {
                for &control in &controls {
                    let (alpha, beta) = protocol.split(control);
                    let context = || {
                        format!(
                            "protocol={} control={control} scheme={scheme} model={model}",
                            protocol.as_str()
                        )
                    };
                    let fail = |source: RowFailure| SweepError::Row {
                        context: context(),
                        source,
                    };
                    let sc = base
                        .with_protocol(alpha, beta)
                        .map_err(|e| fail(e.into()))?;
                    let method = match model {
                        ModelKind::Linear => Method::Closed,
                        ModelKind::Logistic => Method::Quadrature,
                    };
                    let energy_w = energy_value(&sc, scheme, model, method, spec)
                        .map_err(fail)?
                        .expect("closed/quadrature energy always applies");
                    let rate_bits_s_hz =
                        avg_rate_closed(&sc.deployment(scheme), &sc.system, &sc.protocol)
                            .bits_per_s_per_hz;
                    points.push(TradeoffPoint {
                        protocol,
                        control,
                        scheme,
                        model,
                        energy_w,
                        rate_bits_s_hz,
                    });
                }
            }
        }
    }
    Ok(points)
}

/// Largest absolute residual of the least-squares line through `(xs, ys)`,
/// relative to `max |y|`.
pub fn affine_fit_residual(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let scale = ys.iter().fold(0.0_f64, |m, y| m.max(y.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    xs.iter()
        .zip(ys)
        .map(|(x, y)| (y - (my + slope * (x - mx))).abs())
        .fold(0.0, f64::max)
        / scale
}

/// Largest vertical distance of `(xs, ys)` above or below the chord joining
/// the first and last points.
pub fn max_chord_deviation(xs: &[f64], ys: &[f64]) -> f64 {
    assert!(xs.len() >= 2 && xs.len() == ys.len());
    let (x0, y0) = (xs[0], ys[0]);
    let (x1, y1) = (xs[xs.len() - 1], ys[ys.len() - 1]);
    let slope = (y1 - y0) / (x1 - x0);
    xs.iter()
        .zip(ys)
        .map(|(x, y)| (y - (y0 + slope * (x - x0))).abs())
        .fold(0.0, f64::max)
}

/// Points of one trade-off curve, in control order.
pub fn curve(
    points: &[TradeoffPoint],
    protocol: Protocol,
    scheme: Scheme,
    model: ModelKind,
) -> Vec<TradeoffPoint> {
    let mut c: Vec<_> = points
        .iter()
        .filter(|p| p.protocol == protocol && p.scheme == scheme && p.model == model)
        .copied()
        .collect();
    c.sort_by(|a, b| a.control.total_cmp(&b.control));
    c
}

/// Whether `winner` has at least the energy and at least the rate of `loser`
/// at every control value of the grid.
pub fn dominates(winner: &[TradeoffPoint], loser: &[TradeoffPoint]) -> bool {
    winner.len() == loser.len()
        && winner.iter().zip(loser).all(|(w, l)| {
            w.control == l.control
                && w.energy_w >= l.energy_w
                && w.rate_bits_s_hz >= l.rate_bits_s_hz
        })
}

fn num(x: f64) -> String {
    format!("{x}")
}

/// Writes the table as CSV.
pub fn write_csv<W: Write>(table: &SweepTable, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match table {
        SweepTable::Power {
            experiment: Experiment::EnergyVsPower,
            rows,
        } => {
            w.write_record(["pt_w", "scheme", "model", "method", "value_w"])?;
            for r in rows {
                let model = r.model.map_or("", ModelKind::as_str);
                w.write_record([
                    &num(r.pt_w),
                    r.scheme.as_str(),
                    model,
                    r.method.as_str(),
                    &num(r.value),
                ])?;
            }
        }
        SweepTable::Power { rows, .. } => {
            w.write_record(["pt_w", "scheme", "method", "rate_bits_s_hz"])?;
            for r in rows {
                w.write_record([
                    &num(r.pt_w),
                    r.scheme.as_str(),
                    r.method.as_str(),
                    &num(r.value),
                ])?;
            }
        }
        SweepTable::Region(points) => {
            w.write_record([
                "protocol",
                "control",
                "scheme",
                "model",
                "energy_w",
                "rate_bits_s_hz",
            ])?;
            for p in points {
                w.write_record([
                    p.protocol.as_str(),
                    &num(p.control),
                    p.scheme.as_str(),
                    p.model.as_str(),
                    &num(p.energy_w),
                    &num(p.rate_bits_s_hz),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn plot_script(experiment: Experiment, csv_name: &str) -> String {
    let body = match experiment {
        Experiment::EnergyVsPower => {
            "series = {}\n\
             for r in rows:\n\
             \x20   key = (r['scheme'], r['model'], r['method'])\n\
             \x20   series.setdefault(key, []).append((float(r['pt_w']), float(r['value_w'])))\n\
             fig, ax = plt.subplots()\n\
             for (scheme, model, method), pts in sorted(series.items()):\n\
             \x20   pts.sort()\n\
             \x20   style = 'o' if method == 'mc' else '-'\n\
             \x20   ax.plot([p[0] for p in pts], [p[1] * 1e3 for p in pts], style,\n\
             \x20           label=f'{scheme.upper()} {model.upper()} ({method})', markerfacecolor='none')\n\
             ax.set_xscale('log')\n\
             ax.set_xlabel('Transmit power P_t (W)')\n\
             ax.set_ylabel('Average harvested energy (mW)')\n"
        }
        Experiment::RateVsPower => {
            "series = {}\n\
             for r in rows:\n\
             \x20   key = (r['scheme'], r['method'])\n\
             \x20   series.setdefault(key, []).append((float(r['pt_w']), float(r['rate_bits_s_hz'])))\n\
             fig, ax = plt.subplots()\n\
             for (scheme, method), pts in sorted(series.items()):\n\
             \x20   pts.sort()\n\
             \x20   style = 'o' if method == 'mc' else '-'\n\
             \x20   ax.plot([p[0] for p in pts], [p[1] for p in pts], style,\n\
             \x20           label=f'{scheme.upper()} ({method})', markerfacecolor='none')\n\
             ax.set_xscale('log')\n\
             ax.set_xlabel('Transmit power P_t (W)')\n\
             ax.set_ylabel('Average achievable rate (bit/s/Hz)')\n"
        }
        Experiment::EnergyRateRegion => {
            "series = {}\n\
             for r in rows:\n\
             \x20   key = (r['scheme'], r['model'], r['protocol'])\n\
             \x20   series.setdefault(key, []).append(\n\
             \x20       (float(r['control']), float(r['energy_w']), float(r['rate_bits_s_hz'])))\n\
             fig, ax = plt.subplots()\n\
             for (scheme, model, protocol), pts in sorted(series.items()):\n\
             \x20   pts.sort()\n\
             \x20   style = '-' if protocol == 'ps' else '--'\n\
             \x20   ax.plot([p[1] * 1e3 for p in pts], [p[2] for p in pts], style,\n\
             \x20           label=f'{scheme.upper()} {model.upper()} {protocol.upper()}')\n\
             ax.set_xlabel('Average harvested energy (mW)')\n\
             ax.set_ylabel('Average achievable rate (bit/s/Hz)')\n"
        }
    };
    let stem = experiment.file_stem();
    format!(
        "#!/usr/bin/env python3\n\
         # Renders {csv_name} (same directory) to {stem}.png.\n\
         import csv\n\
         import os\n\
         import matplotlib\n\
         matplotlib.use('Agg')\n\
         import matplotlib.pyplot as plt\n\
         \n\
         here = os.path.dirname(os.path.abspath(__file__))\n\
         with open(os.path.join(here, '{csv_name}'), newline='') as f:\n\
         \x20   rows = list(csv.DictReader(f))\n\
         {body}\
         ax.grid(True, alpha=0.3)\n\
         ax.legend(fontsize='small')\n\
         fig.tight_layout()\n\
         fig.savefig(os.path.join(here, '{stem}.png'), dpi=150)\n"
    )
}

/// Writes `<stem>.csv` (and `plot_<stem>.py` when `plot` is set) into `dir`,
/// creating it if needed. Returns the written paths.
pub fn emit_outputs(
    table: &SweepTable,
    dir: &Path,
    plot: bool,
) -> Result<Vec<PathBuf>, SweepError> {
    if table.is_empty() {
        return Err(SweepError::InvalidSpec(
            "refusing to write an empty table".into(),
        ));
    }
    let io = |path: &Path| {
        let path = path.to_owned();
        move |source| SweepError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let stem = table.experiment().file_stem();
    let csv_name = format!("{stem}.csv");
    let csv_path = dir.join(&csv_name);

    let mut buf = Vec::new();
    write_csv(table, &mut buf).map_err(|e| SweepError::Io {
        path: csv_path.clone(),
        source: std::io::Error::other(e),
    })?;
    fs::write(&csv_path, buf).map_err(io(&csv_path))?;
    let mut written = vec![csv_path];

    if plot {
        let script = dir.join(format!("plot_{stem}.py"));
        fs::write(&script, plot_script(table.experiment(), &csv_name)).map_err(io(&script))?;
        written.push(script);
    }
    Ok(written)
}
