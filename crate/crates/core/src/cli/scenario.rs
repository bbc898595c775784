//! Scenario files: flat `key = value` lines, `#` comments, and one
//! `ray = x, px/p0, y, py/p0` line per ray.
//!
//! ```text
//! # quarter turn of a desk-scale dipole
//! q = 1
//! p0 = 10
//! kappa = 1
//! hbar = 0
//! s_i = 0
//! s_o = pi/2
//! mode = classical-map, lie-series, rk4
//! samples = 3
//! rk4_h = 1e-3
//! ray = 1e-3, 0, 0, 0
//! ```
//!
//! Numbers may also be written as `pi`, `k*pi` or `pi/k`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::beamcore::{curvature_from_field, DipoleConfig};
use crate::classical::{PhaseSpaceRay, DEFAULT_LIE_ORDER};
use crate::error::{Error, Result};
use crate::oracles::{DEFAULT_EXTENT_SIGMA, DEFAULT_GRID_N};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    ClassicalMap,
    LieSeries,
    Rk4,
    QuantumMap,
    QuantumSeries,
    Wavefunction,
    KickScaling,
}

impl Mode {
    pub const ALL: [Mode; 7] = [
        Mode::ClassicalMap,
        Mode::LieSeries,
        Mode::Rk4,
        Mode::QuantumMap,
        Mode::QuantumSeries,
        Mode::Wavefunction,
        Mode::KickScaling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::ClassicalMap => "classical-map",
            Mode::LieSeries => "lie-series",
            Mode::Rk4 => "rk4",
            Mode::QuantumMap => "quantum-map",
            Mode::QuantumSeries => "quantum-series",
            Mode::Wavefunction => "wavefunction",
            Mode::KickScaling => "kick-scaling",
        }
    }

    /// Label in the `source` column of the trajectory file; `None` for
    /// modes that produce no trajectory.
    pub fn source(self) -> Option<&'static str> {
        match self {
            Mode::ClassicalMap => Some("map"),
            Mode::LieSeries => Some("series"),
            Mode::Rk4 => Some("rk4"),
            Mode::QuantumMap => Some("qmap"),
            Mode::QuantumSeries => Some("qseries"),
            Mode::Wavefunction => Some("grid"),
            Mode::KickScaling => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Mode::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<_> = Mode::ALL.iter().map(|m| m.name()).collect();
            format!("unknown mode `{s}` (expected one of {})", names.join(", "))
        })
    }
}

/// Pass/fail thresholds applied by the runner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Closed-form map against another closed-form map.
    pub map: f64,
    /// Closed-form map against a Lie series.
    pub series: f64,
    pub rk4: f64,
    pub grid: f64,
    pub symplectic: f64,
    pub norm: f64,
    /// Kick-scaling slope against -2.
    pub slope: f64,
    /// Relative spread of `kick_x / (lambda0^2 / rho)` across momenta.
    pub ratio: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            map: 1e-12,
            series: 1e-12,
            rk4: 1e-8,
            grid: 1e-6,
            symplectic: 1e-12,
            norm: 1e-12,
            slope: 1e-6,
            ratio: 1e-9,
        }
    }
}

/// Settings of the wave-mechanical oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    pub n: usize,
    pub extent_sigma: f64,
    /// Split steps over the whole arc.
    pub n_steps: usize,
    pub sigma_x: f64,
    pub sigma_y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub cfg: DipoleConfig,
    pub rays: Vec<PhaseSpaceRay>,
    pub modes: Vec<Mode>,
    pub samples: usize,
    pub lie_order: usize,
    pub rk4_step: Option<f64>,
    pub grid: Option<GridParams>,
    pub p0_list: Vec<f64>,
    pub tolerances: Tolerances,
    pub out_dir: Option<PathBuf>,
}

impl Scenario {
    pub fn has_mode(&self, m: Mode) -> bool {
        self.modes.contains(&m)
    }

    /// Modes that produce trajectories, in the order listed.
    pub fn trajectory_modes(&self) -> impl Iterator<Item = Mode> + '_ {
        self.modes.iter().copied().filter(|m| m.source().is_some())
    }

    /// Arclength samples from `s_i` to `s_o` inclusive.
    pub fn sample_points(&self) -> Vec<f64> {
        let (a, b) = (self.cfg.s_i(), self.cfg.s_o());
        let n = self.samples - 1;
        (0..=n)
            .map(|k| if k == n { b } else { a + (b - a) * k as f64 / n as f64 })
            .collect()
    }
}

const KEYS: &[&str] = &[
    "q",
    "p0",
    "kappa",
    "B0",
    "qB0",
    "hbar",
    "s_i",
    "s_o",
    "mode",
    "samples",
    "ray",
    "lie_N",
    "rk4_h",
    "grid_n",
    "grid_extent_sigma",
    "n_steps",
    "sigma_x",
    "sigma_y",
    "p0_list",
    "tol_map",
    "tol_series",
    "tol_rk4",
    "tol_grid",
    "tol_symplectic",
    "tol_norm",
    "tol_slope",
    "tol_ratio",
    "out_dir",
];

struct Entry {
    line: usize,
    value: String,
}

struct RawScenario {
    single: BTreeMap<&'static str, Entry>,
    rays: Vec<Entry>,
}

fn parse_number(text: &str) -> Option<f64> {
    let t = text.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Some(v);
    }
    let pi = std::f64::consts::PI;
    if t == "pi" {
        return Some(pi);
    }
    if let Some(rest) = t.strip_prefix("pi/") {
        return rest.trim().parse::<f64>().ok().map(|d| pi / d);
    }
    if let Some(head) = t.strip_suffix("*pi") {
        return head.trim().parse::<f64>().ok().map(|k| k * pi);
    }
    if let Some(rest) = t.strip_prefix("-pi/") {
        return rest.trim().parse::<f64>().ok().map(|d| -pi / d);
    }
    None
}

impl RawScenario {
    fn read(text: &str) -> Result<Self> {
        let mut single = BTreeMap::new();
        let mut rays = Vec::new();
        let mut unknown = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::config(
                    Some(line),
                    format!("expected `key = value`, got `{content}`"),
                ));
            };
            let (key, value) = (key.trim(), value.trim().to_string());
            let Some(&known) = KEYS.iter().find(|k| **k == key) else {
                unknown.push(format!("`{key}` (line {line})"));
                continue;
            };
            if known == "ray" {
                rays.push(Entry { line, value });
            } else if let Some(prev) = single.insert(known, Entry { line, value }) {
                return Err(Error::config(
                    Some(line),
                    format!("duplicate key `{key}` (first given on line {})", prev.line),
                ));
            }
        }
        if !unknown.is_empty() {
            return Err(Error::config(None, format!("unknown keys: {}", unknown.join(", "))));
        }
        Ok(Self { single, rays })
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.single.get(key).map(|e| e.line)
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        match self.single.get(key) {
            None => Ok(None),
            Some(e) => parse_number(&e.value)
                .filter(|v| v.is_finite())
                .map(Some)
                .ok_or_else(|| Error::config(Some(e.line), format!("`{key}`: malformed number `{}`", e.value))),
        }
    }

    fn required(&self, key: &str) -> Result<f64> {
        self.number(key)?
            .ok_or_else(|| Error::config(None, format!("missing required key `{key}`")))
    }

    fn count(&self, key: &str) -> Result<Option<usize>> {
        match self.single.get(key) {
            None => Ok(None),
            Some(e) => e.value.parse::<usize>().map(Some).map_err(|_| {
                Error::config(
                    Some(e.line),
                    format!("`{key}` must be a non-negative integer, got `{}`", e.value),
                )
            }),
        }
    }

    fn positive(&self, key: &str) -> Result<Option<f64>> {
        match self.number(key)? {
            Some(v) if v <= 0.0 => Err(Error::config(self.line_of(key), format!("{key} must be positive"))),
            other => Ok(other),
        }
    }

    fn list(&self, key: &str) -> Result<Vec<f64>> {
        match self.single.get(key) {
            None => Ok(Vec::new()),
            Some(e) => split_numbers(&e.value, e.line, key),
        }
    }
}

fn split_numbers(value: &str, line: usize, key: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|t| {
            parse_number(t)
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::config(Some(line), format!("`{key}`: malformed number `{}`", t.trim())))
        })
        .collect()
}

/// Parses and validates a scenario file. Errors carry the offending line.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let raw = RawScenario::read(text)?;

    let q = raw.required("q")?;
    if q == 0.0 {
        return Err(Error::config(raw.line_of("q"), "q must be nonzero"));
    }
    let p0 = raw.required("p0")?;
    if p0 <= 0.0 {
        return Err(Error::config(raw.line_of("p0"), "p0 must be positive"));
    }
    let hbar = raw.required("hbar")?;
    if hbar < 0.0 {
        return Err(Error::config(raw.line_of("hbar"), "hbar must be non-negative"));
    }
    let s_i = raw.required("s_i")?;
    let s_o = raw.required("s_o")?;
    if s_o <= s_i {
        return Err(Error::config(raw.line_of("s_o"), "s_o must exceed s_i"));
    }

    let kappa = raw.number("kappa")?;
    if let Some(k) = kappa {
        if k <= 0.0 {
            return Err(Error::config(raw.line_of("kappa"), "kappa must be positive"));
        }
    }
    let b0 = raw.number("B0")?;
    let q_b0 = raw.number("qB0")?;
    if b0.is_some() && q_b0.is_some() {
        return Err(Error::config(
            raw.line_of("qB0"),
            "give the field as either `B0` or `qB0`, not both",
        ));
    }
    let field = b0.or(q_b0.map(|v| v / q));
    let field_line = raw.line_of("B0").or(raw.line_of("qB0"));
    let (kappa, b0) = match (kappa, field) {
        (Some(k), Some(b)) => (k, b),
        (Some(k), None) => (k, k * p0 / q),
        (None, Some(b)) => {
            let k = curvature_from_field(q, b, p0).map_err(|e| Error::config(field_line, e.to_string()))?;
            (k, b)
        }
        (None, None) => {
            return Err(Error::config(
                None,
                "missing required key `kappa` (or a field `B0`/`qB0`)",
            ))
        }
    };
    let cfg = DipoleConfig::new(q, p0, kappa, b0, hbar, s_i, s_o).map_err(|e| Error::config(None, e.to_string()))?;

    let mode_entry = raw
        .single
        .get("mode")
        .ok_or_else(|| Error::config(None, "missing required key `mode`"))?;
    let mode_line = Some(mode_entry.line);
    let mut modes = Vec::new();
    for tok in mode_entry.value.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let m: Mode = tok.parse().map_err(|e: String| Error::config(mode_line, e))?;
        if modes.contains(&m) {
            return Err(Error::config(mode_line, format!("mode `{m}` listed twice")));
        }
        modes.push(m);
    }
    if modes.is_empty() {
        return Err(Error::config(mode_line, "`mode` lists no modes"));
    }

    let needs_match = [Mode::ClassicalMap, Mode::LieSeries, Mode::QuantumMap, Mode::KickScaling];
    if let Some(m) = modes.iter().find(|m| needs_match.contains(m)) {
        if !cfg.is_matched() {
            return Err(Error::config(
                mode_line,
                format!(
                    "mode `{m}` requires a matched field q*B0 = kappa*p0 (got q*B0 = {}, kappa*p0 = {}); use quantum-series or rk4 for an unmatched magnet",
                    cfg.q_b0(),
                    kappa * p0
                ),
            ));
        }
    }

    let samples = raw.count("samples")?.unwrap_or(50);
    if samples < 2 {
        return Err(Error::config(raw.line_of("samples"), "samples must be at least 2"));
    }
    let lie_order = raw.count("lie_N")?.unwrap_or(DEFAULT_LIE_ORDER);

    let mut rays = Vec::new();
    for e in &raw.rays {
        let v = split_numbers(&e.value, e.line, "ray")?;
        if v.len() != 4 {
            return Err(Error::config(
                Some(e.line),
                format!("`ray` needs 4 components x, px/p0, y, py/p0; got {}", v.len()),
            ));
        }
        rays.push(PhaseSpaceRay::new(v[0], v[1], v[2], v[3]));
    }
    let has_trajectories = modes.iter().any(|m| m.source().is_some());
    if has_trajectories && rays.is_empty() {
        return Err(Error::config(
            None,
            "at least one `ray` line is required for trajectory modes",
        ));
    }

    let rk4_step = raw.positive("rk4_h")?;
    if modes.contains(&Mode::Rk4) && rk4_step.is_none() {
        return Err(Error::config(mode_line, "mode `rk4` requires `rk4_h`"));
    }

    let grid = if modes.contains(&Mode::Wavefunction) {
        if hbar <= 0.0 {
            return Err(Error::config(
                raw.line_of("hbar"),
                "mode `wavefunction` requires hbar > 0",
            ));
        }
        let n = raw.count("grid_n")?.unwrap_or(DEFAULT_GRID_N);
        if !n.is_power_of_two() || n < 4 {
            return Err(Error::config(
                raw.line_of("grid_n"),
                "grid_n must be a power of two >= 4",
            ));
        }
        let n_steps = raw
            .count("n_steps")?
            .ok_or_else(|| Error::config(mode_line, "mode `wavefunction` requires `n_steps`"))?;
        if n_steps == 0 {
            return Err(Error::config(raw.line_of("n_steps"), "n_steps must be at least 1"));
        }
        let sigma = |key: &str| -> Result<f64> {
            raw.positive(key)?
                .ok_or_else(|| Error::config(mode_line, format!("mode `wavefunction` requires `{key}`")))
        };
        Some(GridParams {
            n,
            extent_sigma: raw.positive("grid_extent_sigma")?.unwrap_or(DEFAULT_EXTENT_SIGMA),
            n_steps,
            sigma_x: sigma("sigma_x")?,
            sigma_y: sigma("sigma_y")?,
        })
    } else {
        None
    };

    let p0_list = raw.list("p0_list")?;
    if modes.contains(&Mode::KickScaling) {
        if p0_list.is_empty() {
            return Err(Error::config(mode_line, "mode `kick-scaling` requires `p0_list`"));
        }
        if p0_list.iter().any(|p| *p <= 0.0) {
            return Err(Error::config(
                raw.line_of("p0_list"),
                "p0_list entries must be positive",
            ));
        }
    }

    let defaults = Tolerances::default();
    let tol = |key: &str, default: f64| -> Result<f64> {
        match raw.number(key)? {
            Some(v) if v < 0.0 => Err(Error::config(raw.line_of(key), format!("{key} must be non-negative"))),
            Some(v) => Ok(v),
            None => Ok(default),
        }
    };
    let tolerances = Tolerances {
        map: tol("tol_map", defaults.map)?,
        series: tol("tol_series", defaults.series)?,
        rk4: tol("tol_rk4", defaults.rk4)?,
        grid: tol("tol_grid", defaults.grid)?,
        symplectic: tol("tol_symplectic", defaults.symplectic)?,
        norm: tol("tol_norm", defaults.norm)?,
        slope: tol("tol_slope", defaults.slope)?,
        ratio: tol("tol_ratio", defaults.ratio)?,
    };

    Ok(Scenario {
        cfg,
        rays,
        modes,
        samples,
        lie_order,
        rk4_step,
        grid,
        p0_list,
        tolerances,
        out_dir: raw.single.get("out_dir").map(|e| PathBuf::from(&e.value)),
    })
}
