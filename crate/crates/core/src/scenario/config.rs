//! Scenario configuration text.
//!
//! ```text
//! # comment            ; also a comment
//! [section]
//! key = value [unit]
//! ```
//!
//! Numbers take an optional unit suffix, with or without a space:
//! `Hz kHz MHz GHz`, `m km mm`, `s ms us`, `deg rad`, `m/s km/h`,
//! `m/s2 m/s^2`, `dB`. A bare number is read in the SI base unit (radians
//! for angles). Lists are comma separated. Ship stencils are rows of `0`/`1`
//! separated by `/`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::echo::ClutterModel;
use crate::error::{Error, Result};
use crate::waveform::Shaping;

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Chip bandwidth, Hz; the chip rate equals it.
    pub bandwidth: f64,
    pub carrier: f64,
    pub modulation: String,
    pub spreading_degree: u32,
    pub code_index: usize,
    pub codec: String,
    pub code_rate: f64,
    pub prf: f64,
    /// Synthetic aperture length along the receiver track, m.
    pub aperture_length: f64,
    pub oversample: usize,
    pub shaping: Shaping,
    pub pilot_symbols: usize,
    pub data_symbols: usize,
    /// Energy per channel bit, J.
    pub bit_energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlatformConfig {
    pub altitude: f64,
    pub speed: f64,
    /// Defaults to `speed`.
    pub ground_speed: Option<f64>,
    /// Look angle from nadir, rad.
    pub elevation: f64,
    /// Ground azimuth of the line of sight from broadside, rad.
    pub bearing: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetConfig {
    pub altitude: f64,
    pub speed: f64,
    pub acceleration: f64,
    pub reflectivity: f64,
    /// Relative to the receiver velocity, rad.
    pub heading: f64,
    pub heave_amplitude: f64,
    pub heave_period: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClutterConfig {
    pub model: ClutterModel,
    pub csr_db: f64,
    pub snr_db: f64,
    /// Each value gives one run; empty means `[snr_db]`.
    pub snr_list: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShipConfig {
    pub stencil: Vec<String>,
    pub spacing: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub output: PathBuf,
    pub parallel: bool,
    pub ebn0_list: Vec<f64>,
    pub ber_bits: usize,
    pub equalizer_taps: usize,
    pub equalizer_loading: f64,
    pub window_margin: usize,
    pub image_half_width: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub system: SystemConfig,
    pub transmitter: PlatformConfig,
    pub receiver: PlatformConfig,
    pub target: TargetConfig,
    pub clutter: ClutterConfig,
    pub ship: ShipConfig,
    pub run: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dim {
    Frequency,
    Length,
    Time,
    Angle,
    Speed,
    Accel,
    Decibel,
    Ratio,
    Count,
    Word,
    Flag,
}

const UNITS: &[(Dim, &str, f64)] = &[
    (Dim::Frequency, "Hz", 1.0),
    (Dim::Frequency, "kHz", 1e3),
    (Dim::Frequency, "MHz", 1e6),
    (Dim::Frequency, "GHz", 1e9),
    (Dim::Length, "m", 1.0),
    (Dim::Length, "km", 1e3),
    (Dim::Length, "mm", 1e-3),
    (Dim::Time, "s", 1.0),
    (Dim::Time, "ms", 1e-3),
    (Dim::Time, "us", 1e-6),
    (Dim::Angle, "rad", 1.0),
    (Dim::Angle, "deg", PI / 180.0),
    (Dim::Speed, "m/s", 1.0),
    (Dim::Speed, "km/h", 1.0 / 3.6),
    (Dim::Accel, "m/s2", 1.0),
    (Dim::Accel, "m/s^2", 1.0),
    (Dim::Decibel, "dB", 1.0),
];

fn base_unit(dim: Dim) -> &'static str {
    UNITS.iter().find(|u| u.0 == dim && u.2 == 1.0).map_or("", |u| u.1)
}

struct Key {
    name: &'static str,
    dim: Dim,
    list: bool,
    required: bool,
}

const fn key(name: &'static str, dim: Dim) -> Key {
    Key { name, dim, list: false, required: false }
}

const fn req(name: &'static str, dim: Dim) -> Key {
    Key { name, dim, list: false, required: true }
}

const fn list(name: &'static str, dim: Dim) -> Key {
    Key { name, dim, list: true, required: false }
}

const SCHEMA: &[Key] = &[
    req("system.bandwidth", Dim::Frequency),
    req("system.carrier", Dim::Frequency),
    key("system.modulation", Dim::Word),
    key("system.spreading_degree", Dim::Count),
    key("system.code_index", Dim::Count),
    key("system.codec", Dim::Word),
    key("system.code_rate", Dim::Ratio),
    req("system.prf", Dim::Frequency),
    req("system.aperture_length", Dim::Length),
    key("system.oversample", Dim::Count),
    key("system.shaping", Dim::Word),
    key("system.rolloff", Dim::Ratio),
    key("system.pilot_symbols", Dim::Count),
    key("system.data_symbols", Dim::Count),
    key("system.bit_energy", Dim::Ratio),
    req("transmitter.altitude", Dim::Length),
    req("transmitter.speed", Dim::Speed),
    key("transmitter.ground_speed", Dim::Speed),
    req("transmitter.elevation", Dim::Angle),
    req("transmitter.bearing", Dim::Angle),
    req("receiver.altitude", Dim::Length),
    req("receiver.speed", Dim::Speed),
    key("receiver.ground_speed", Dim::Speed),
    req("receiver.elevation", Dim::Angle),
    req("receiver.bearing", Dim::Angle),
    key("target.altitude", Dim::Length),
    key("target.speed", Dim::Speed),
    key("target.acceleration", Dim::Accel),
    key("target.reflectivity", Dim::Ratio),
    key("target.heading", Dim::Angle),
    key("target.heave_amplitude", Dim::Length),
    key("target.heave_period", Dim::Time),
    key("clutter.model", Dim::Word),
    key("clutter.shape", Dim::Ratio),
    key("clutter.csr", Dim::Decibel),
    key("clutter.snr", Dim::Decibel),
    list("clutter.snr_list", Dim::Decibel),
    key("ship.stencil", Dim::Word),
    key("ship.spacing", Dim::Length),
    key("run.seed", Dim::Count),
    key("run.output", Dim::Word),
    key("run.parallel", Dim::Flag),
    list("run.ebn0_list", Dim::Decibel),
    key("run.ber_bits", Dim::Count),
    key("run.equalizer_taps", Dim::Count),
    key("run.equalizer_loading", Dim::Ratio),
    key("run.window_margin", Dim::Count),
    key("run.image_half_width", Dim::Count),
];

#[derive(Debug, Clone)]
struct Entry {
    raw: String,
    line: usize,
    column: usize,
}

fn err(line: usize, column: usize, key: &str, message: impl Into<String>) -> Error {
    Error::Config { line, column, key: key.to_string(), message: message.into() }
}

fn parse_number(text: &str, dim: Dim, e: &Entry, key: &str) -> Result<f64> {
    let text = text.trim();
    // longest numeric prefix; the remainder is the unit
    let split = (1..=text.len())
        .rev()
        .filter(|&i| text.is_char_boundary(i))
        .find(|&i| text[..i].parse::<f64>().is_ok());
    let Some(i) = split else {
        return Err(err(e.line, e.column, key, format!("`{text}` is not a number")));
    };
    let value: f64 = text[..i].parse().expect("checked above");
    let unit = text[i..].trim();
    if unit.is_empty() {
        return Ok(value);
    }
    match UNITS.iter().find(|u| u.0 == dim && u.1 == unit) {
        Some(u) => Ok(value * u.2),
        None => Err(err(e.line, e.column, key, format!("unit `{unit}` does not fit this key"))),
    }
}

fn parse_count(e: &Entry, key: &str) -> Result<u64> {
    e.raw.trim().parse().map_err(|_| err(e.line, e.column, key, format!("`{}` is not a non-negative integer", e.raw.trim())))
}

/// Parses and validates scenario text.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
    let mut section = String::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let stripped = match raw_line.find(['#', ';']) {
            Some(c) => &raw_line[..c],
            None => raw_line,
        };
        let trimmed = stripped.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = stripped.len() - stripped.trim_start().len() + 1;
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(err(line, indent, trimmed, "section header lacks `]`"));
            };
            let name = name.trim();
            if !SCHEMA.iter().any(|k| k.name.split('.').next() == Some(name)) {
                return Err(err(line, indent + 1, name, "unknown section"));
            }
            section = name.to_string();
            continue;
        }
        let Some(eq) = stripped.find('=') else {
            return Err(err(line, indent, trimmed, "expected `key = value`"));
        };
        let name = stripped[..eq].trim();
        if section.is_empty() {
            return Err(err(line, indent, name, "key outside any section"));
        }
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(err(line, indent, name, "malformed key"));
        }
        let full = format!("{section}.{name}");
        if !SCHEMA.iter().any(|k| k.name == full) {
            return Err(err(line, indent, &full, "unknown key"));
        }
        let value = stripped[eq + 1..].trim();
        let column = eq + 2 + (stripped[eq + 1..].len() - stripped[eq + 1..].trim_start().len());
        if value.is_empty() {
            return Err(err(line, column, &full, "empty value"));
        }
        let spec = SCHEMA.iter().find(|k| k.name == full).expect("checked above");
        if !spec.list && value.contains(',') {
            return Err(err(line, column, &full, "expected a single value"));
        }
        if entries.contains_key(&full) {
            return Err(err(line, indent, &full, "duplicate key"));
        }
        entries.insert(full, Entry { raw: value.to_string(), line, column });
    }
    for k in SCHEMA.iter().filter(|k| k.required) {
        if !entries.contains_key(k.name) {
            return Err(err(0, 0, k.name, "required key missing"));
        }
    }
    Reader { entries }.build()
}

struct Reader {
    entries: BTreeMap<String, Entry>,
}

impl Reader {
    fn spec(name: &str) -> &'static Key {
        SCHEMA.iter().find(|k| k.name == name).expect("key in schema")
    }

    fn num(&self, name: &str, default: f64) -> Result<f64> {
        match self.entries.get(name) {
            Some(e) => parse_number(&e.raw, Self::spec(name).dim, e, name),
            None => Ok(default),
        }
    }

    fn opt_num(&self, name: &str) -> Result<Option<f64>> {
        self.entries.get(name).map(|e| parse_number(&e.raw, Self::spec(name).dim, e, name)).transpose()
    }

    fn count(&self, name: &str, default: u64) -> Result<u64> {
        self.entries.get(name).map_or(Ok(default), |e| parse_count(e, name))
    }

    fn word(&self, name: &str, default: &str) -> String {
        self.entries.get(name).map_or(default.to_string(), |e| e.raw.trim().to_string())
    }

    fn list(&self, name: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.entries.get(name) {
            Some(e) => e.raw.split(',').map(|v| parse_number(v, Self::spec(name).dim, e, name)).collect(),
            None => Ok(default.to_vec()),
        }
    }

    fn fail(&self, name: &str, message: impl Into<String>) -> Error {
        let (line, column) = self.entries.get(name).map_or((0, 0), |e| (e.line, e.column));
        err(line, column, name, message)
    }

    fn positive(&self, name: &str, v: f64) -> Result<f64> {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(self.fail(name, format!("must be positive, got {v}")))
        }
    }

    fn platform(&self, p: &str) -> Result<PlatformConfig> {
        let f = |k: &str| format!("{p}.{k}");
        let altitude = self.num(&f("altitude"), 0.0)?;
        if !(altitude >= 0.0) {
            return Err(self.fail(&f("altitude"), "must be non-negative"));
        }
        let elevation = self.num(&f("elevation"), 0.0)?;
        if !(elevation > 0.0 && elevation < PI / 2.0) {
            return Err(self.fail(&f("elevation"), "look angle must lie in (0, 90) deg"));
        }
        let ground_speed = self.opt_num(&f("ground_speed"))?;
        if let Some(g) = ground_speed {
            self.positive(&f("ground_speed"), g)?;
        }
        Ok(PlatformConfig {
            altitude: self.positive(&f("altitude"), altitude)?,
            speed: self.positive(&f("speed"), self.num(&f("speed"), 0.0)?)?,
            ground_speed,
            elevation,
            bearing: self.num(&f("bearing"), 0.0)?,
        })
    }

    fn build(&self) -> Result<ScenarioConfig> {
        let shaping = match self.word("system.shaping", "raised_cosine").as_str() {
            "rect" => Shaping::Rect,
            "raised_cosine" => {
                let rolloff = self.num("system.rolloff", 0.25)?;
                if !(0.0..=1.0).contains(&rolloff) {
                    return Err(self.fail("system.rolloff", "roll-off must lie in [0, 1]"));
                }
                Shaping::RaisedCosine { rolloff }
            }
            other => return Err(self.fail("system.shaping", format!("unknown shaping `{other}`"))),
        };
        let modulation = self.word("system.modulation", "qpsk");
        if modulation != "qpsk" {
            return Err(self.fail("system.modulation", "only qpsk is supported"));
        }
        let codec = self.word("system.codec", "repetition8");
        let code_rate = self.num("system.code_rate", 0.125)?;
        match crate::waveform::codec_by_name(&codec) {
            None => return Err(self.fail("system.codec", format!("unknown codec `{codec}`"))),
            Some(c) if (c.rate() - code_rate).abs() > 1e-12 => {
                return Err(self.fail("system.code_rate", format!("codec `{codec}` has rate {}", c.rate())));
            }
            _ => {}
        }
        let degree = self.count("system.spreading_degree", 6)?;
        if !(degree >= 4 && degree % 2 == 0 && degree <= 16) {
            return Err(self.fail("system.spreading_degree", "Kasami degree must be even, 4..=16"));
        }
        let system = SystemConfig {
            bandwidth: self.positive("system.bandwidth", self.num("system.bandwidth", 0.0)?)?,
            carrier: self.positive("system.carrier", self.num("system.carrier", 0.0)?)?,
            modulation,
            spreading_degree: degree as u32,
            code_index: self.count("system.code_index", 1)? as usize,
            codec,
            code_rate,
            prf: self.positive("system.prf", self.num("system.prf", 0.0)?)?,
            aperture_length: self.positive("system.aperture_length", self.num("system.aperture_length", 0.0)?)?,
            oversample: self.count("system.oversample", 2)? as usize,
            shaping,
            pilot_symbols: self.count("system.pilot_symbols", 2)? as usize,
            data_symbols: self.count("system.data_symbols", 32)? as usize,
            bit_energy: self.positive("system.bit_energy", self.num("system.bit_energy", 1.0)?)?,
        };
        if system.oversample == 0 {
            return Err(self.fail("system.oversample", "must be at least 1"));
        }
        let target = TargetConfig {
            altitude: self.num("target.altitude", 0.0)?,
            speed: self.num("target.speed", 0.0)?,
            acceleration: self.num("target.acceleration", 0.0)?,
            reflectivity: self.num("target.reflectivity", 1.0)?,
            heading: self.num("target.heading", 0.0)?,
            heave_amplitude: self.num("target.heave_amplitude", 0.0)?,
            heave_period: self.num("target.heave_period", 1.0)?,
        };
        if target.speed < 0.0 {
            return Err(self.fail("target.speed", "must be non-negative"));
        }
        if target.heave_amplitude != 0.0 {
            self.positive("target.heave_period", target.heave_period)?;
        }
        let model = match self.word("clutter.model", "none").as_str() {
            "none" => ClutterModel::None,
            "gaussian" => ClutterModel::Gaussian,
            "k" => ClutterModel::KDistributed { shape: self.positive("clutter.shape", self.num("clutter.shape", 2.0)?)? },
            other => return Err(self.fail("clutter.model", format!("unknown clutter model `{other}`"))),
        };
        let clutter = ClutterConfig {
            model,
            csr_db: self.num("clutter.csr", f64::NEG_INFINITY)?,
            snr_db: self.num("clutter.snr", f64::INFINITY)?,
            snr_list: self.list("clutter.snr_list", &[])?,
        };
        let stencil: Vec<String> = self
            .word("ship.stencil", "0011111100/0111111110/1111111111/0111111110/0011111100")
            .split('/')
            .map(|r| r.trim().to_string())
            .collect();
        if stencil.iter().any(|r| r.is_empty() || !r.chars().all(|c| c == '0' || c == '1')) {
            return Err(self.fail("ship.stencil", "rows must be non-empty strings of 0 and 1"));
        }
        if !stencil.iter().any(|r| r.contains('1')) {
            return Err(self.fail("ship.stencil", "stencil has no scatterer"));
        }
        let ship = ShipConfig { stencil, spacing: self.positive("ship.spacing", self.num("ship.spacing", 5.0)?)? };
        let parallel = match self.word("run.parallel", "true").as_str() {
            "true" => true,
            "false" => false,
            other => return Err(self.fail("run.parallel", format!("expected true or false, got `{other}`"))),
        };
        let taps = self.count("run.equalizer_taps", 31)? as usize;
        if taps % 2 == 0 {
            return Err(self.fail("run.equalizer_taps", "tap count must be odd"));
        }
        let run = RunConfig {
            seed: self.count("run.seed", 1)?,
            output: PathBuf::from(self.word("run.output", "out")),
            parallel,
            ebn0_list: self.list("run.ebn0_list", &[2.0, 4.0, 6.0, 8.0])?,
            ber_bits: self.count("run.ber_bits", 1_000_000)? as usize,
            equalizer_taps: taps,
            equalizer_loading: self.num("run.equalizer_loading", 1e-6)?,
            window_margin: self.count("run.window_margin", 32)? as usize,
            image_half_width: self.count("run.image_half_width", 48)? as usize,
        };
        Ok(ScenarioConfig {
            system,
            transmitter: self.platform("transmitter")?,
            receiver: self.platform("receiver")?,
            target,
            clutter,
            ship,
            run,
        })
    }
}

impl ScenarioConfig {
    /// Aperture time, s: the aperture length flown at the receiver speed.
    pub fn aperture_time(&self) -> f64 {
        self.system.aperture_length / self.receiver.speed
    }

    /// SNR values to run, dB.
    pub fn snr_values(&self) -> Vec<f64> {
        if self.clutter.snr_list.is_empty() {
            vec![self.clutter.snr_db]
        } else {
            self.clutter.snr_list.clone()
        }
    }

    /// Canonical text with every value in base SI units; parses back to an
    /// equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let n = |v: f64, d: Dim| format!("{v} {}", base_unit(d)).trim_end().to_string();
        let l = |v: &[f64], d: Dim| v.iter().map(|x| n(*x, d)).collect::<Vec<_>>().join(", ");
        let sy = &self.system;
        let _ = writeln!(s, "[system]");
        let _ = writeln!(s, "bandwidth = {}", n(sy.bandwidth, Dim::Frequency));
        let _ = writeln!(s, "carrier = {}", n(sy.carrier, Dim::Frequency));
        let _ = writeln!(s, "modulation = {}", sy.modulation);
        let _ = writeln!(s, "spreading_degree = {}", sy.spreading_degree);
        let _ = writeln!(s, "code_index = {}", sy.code_index);
        let _ = writeln!(s, "codec = {}", sy.codec);
        let _ = writeln!(s, "code_rate = {}", sy.code_rate);
        let _ = writeln!(s, "prf = {}", n(sy.prf, Dim::Frequency));
        let _ = writeln!(s, "aperture_length = {}", n(sy.aperture_length, Dim::Length));
        let _ = writeln!(s, "oversample = {}", sy.oversample);
        match sy.shaping {
            Shaping::Rect => {
                let _ = writeln!(s, "shaping = rect");
            }
            Shaping::RaisedCosine { rolloff } => {
                let _ = writeln!(s, "shaping = raised_cosine\nrolloff = {rolloff}");
            }
        }
        let _ = writeln!(s, "pilot_symbols = {}", sy.pilot_symbols);
        let _ = writeln!(s, "data_symbols = {}", sy.data_symbols);
        let _ = writeln!(s, "bit_energy = {}", sy.bit_energy);
        for (name, p) in [("transmitter", &self.transmitter), ("receiver", &self.receiver)] {
            let _ = writeln!(s, "\n[{name}]");
            let _ = writeln!(s, "altitude = {}", n(p.altitude, Dim::Length));
            let _ = writeln!(s, "speed = {}", n(p.speed, Dim::Speed));
            if let Some(g) = p.ground_speed {
                let _ = writeln!(s, "ground_speed = {}", n(g, Dim::Speed));
            }
            let _ = writeln!(s, "elevation = {}", n(p.elevation, Dim::Angle));
            let _ = writeln!(s, "bearing = {}", n(p.bearing, Dim::Angle));
        }
        let t = &self.target;
        let _ = writeln!(s, "\n[target]");
        let _ = writeln!(s, "altitude = {}", n(t.altitude, Dim::Length));
        let _ = writeln!(s, "speed = {}", n(t.speed, Dim::Speed));
        let _ = writeln!(s, "acceleration = {}", n(t.acceleration, Dim::Accel));
        let _ = writeln!(s, "reflectivity = {}", t.reflectivity);
        let _ = writeln!(s, "heading = {}", n(t.heading, Dim::Angle));
        let _ = writeln!(s, "heave_amplitude = {}", n(t.heave_amplitude, Dim::Length));
        let _ = writeln!(s, "heave_period = {}", n(t.heave_period, Dim::Time));
        let c = &self.clutter;
        let _ = writeln!(s, "\n[clutter]");
        match c.model {
            ClutterModel::None => {
                let _ = writeln!(s, "model = none");
            }
            ClutterModel::Gaussian => {
                let _ = writeln!(s, "model = gaussian");
            }
            ClutterModel::KDistributed { shape } => {
                let _ = writeln!(s, "model = k\nshape = {shape}");
            }
        }
        let _ = writeln!(s, "csr = {}", n(c.csr_db, Dim::Decibel));
        let _ = writeln!(s, "snr = {}", n(c.snr_db, Dim::Decibel));
        if !c.snr_list.is_empty() {
            let _ = writeln!(s, "snr_list = {}", l(&c.snr_list, Dim::Decibel));
        }
        let _ = writeln!(s, "\n[ship]");
        let _ = writeln!(s, "stencil = {}", self.ship.stencil.join("/"));
        let _ = writeln!(s, "spacing = {}", n(self.ship.spacing, Dim::Length));
        let r = &self.run;
        let _ = writeln!(s, "\n[run]");
        let _ = writeln!(s, "seed = {}", r.seed);
        let _ = writeln!(s, "output = {}", r.output.display());
        let _ = writeln!(s, "parallel = {}", r.parallel);
        let _ = writeln!(s, "ebn0_list = {}", l(&r.ebn0_list, Dim::Decibel));
        let _ = writeln!(s, "ber_bits = {}", r.ber_bits);
        let _ = writeln!(s, "equalizer_taps = {}", r.equalizer_taps);
        let _ = writeln!(s, "equalizer_loading = {}", r.equalizer_loading);
        let _ = writeln!(s, "window_margin = {}", r.window_margin);
        let _ = writeln!(s, "image_half_width = {}", r.image_half_width);
        s
    }
}
