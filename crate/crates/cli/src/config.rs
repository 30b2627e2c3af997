//! Run configuration: `key = value` files overlaid with command-line flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use qd_cascade::model::{DriveCase, InitialState};
use qd_cascade::presets::{Grid, ParamName};
use qd_cascade::Params;

use crate::CliError;

pub const KEYS: [&str; 14] = [
    "gamma1",
    "gamma3",
    "big_gamma2",
    "big_gamma3",
    "omega1",
    "omega3",
    "delta",
    "nbar",
    "case",
    "init",
    "tmax",
    "sample_every",
    "phi",
    "out",
];

/// Where a setting came from, for error messages.
#[derive(Debug, Clone, PartialEq)]
pub enum Origin {
    File { path: String, line: usize, text: String },
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File { path, line, text } => write!(f, "{path}:{line}: `{text}`"),
            Origin::Flag => f.write_str("command line"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    pub key: String,
    pub value: String,
    pub origin: Origin,
}

/// Parses the text of a config file. Blank lines and `#` comments are skipped.
pub fn parse_file(path: &str, text: &str) -> Result<Vec<Setting>, CliError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let origin = Origin::File { path: path.to_string(), line: k + 1, text: raw.trim().to_string() };
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("{origin}: expected `key = value`")));
        };
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::Usage(format!("{origin}: unknown key '{key}'")));
        }
        out.push(Setting { key: key.to_string(), value: value.trim().to_string(), origin });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Custom,
    OwZero,
    OwEqOu,
}

impl FromStr for Case {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "custom" => Ok(Case::Custom),
            "ow_zero" => Ok(Case::OwZero),
            "ow_eq_ou" => Ok(Case::OwEqOu),
            _ => Err(format!("unknown case '{s}' (expected custom, ow_zero or ow_eq_ou)")),
        }
    }
}

impl Case {
    pub fn drive(self) -> DriveCase<f64> {
        match self {
            Case::Custom => DriveCase::Custom,
            Case::OwZero => DriveCase::OmegaWZero,
            Case::OwEqOu => DriveCase::OmegaWEqualsOmegaU,
        }
    }
}

/// Named state, `diag:p1,p2,p3` (bare populations) or
/// `diag_super:p2,pw,pu` (populations of `|2⟩, |w⟩, |u⟩`).
pub fn parse_init(s: &str) -> Result<InitialState<f64>, String> {
    let weights = |list: &str| -> Result<[f64; 3], String> {
        let v: Vec<f64> = list
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad weight '{x}'")))
            .collect::<Result<_, _>>()?;
        v.try_into().map_err(|_| "expected three weights".to_string())
    };
    Ok(match s {
        "state_1" => InitialState::State1,
        "state_2" => InitialState::State2,
        "state_3" => InitialState::State3,
        "state_w" => InitialState::StateW,
        "state_u" => InitialState::StateU,
        "state_b" => InitialState::StateB,
        "state_d" => InitialState::StateD,
        "maximally_mixed" => InitialState::MaximallyMixed,
        _ => {
            if let Some(rest) = s.strip_prefix("diag_super:") {
                InitialState::SuperpositionDiagonal(weights(rest)?)
            } else if let Some(rest) = s.strip_prefix("diag:") {
                InitialState::BareDiagonal(weights(rest)?)
            } else {
                return Err(format!("unknown initial state '{s}'"));
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub var: ParamName,
    pub grid: Grid,
}

impl FromStr for Sweep {
    type Err = String;

    /// `VAR:START:STOP:POINTS`
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [var, start, stop, points] = parts[..] else {
            return Err(format!("sweep '{s}' must look like VAR:START:STOP:POINTS"));
        };
        let var: ParamName = var.parse().map_err(|e: qd_cascade::Error| e.to_string())?;
        let num = |x: &str| x.parse::<f64>().map_err(|_| format!("bad number '{x}' in sweep"));
        let (start, stop) = (num(start)?, num(stop)?);
        let points: usize = points.parse().map_err(|_| format!("bad point count '{points}' in sweep"))?;
        if points < 2 {
            return Err("a sweep needs at least 2 points".into());
        }
        if !(start.is_finite() && stop.is_finite()) {
            return Err("sweep bounds must be finite".into());
        }
        Ok(Sweep { var, grid: Grid { start, stop, points } })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Parameters before the drive case is applied.
    pub params: Params,
    pub case: Case,
    pub init: InitialState<f64>,
    pub tmax: f64,
    pub sample_every: f64,
    pub phi: f64,
    pub sweep: Option<Sweep>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: Params::default(),
            case: Case::Custom,
            init: InitialState::MaximallyMixed,
            tmax: 5.0,
            sample_every: 0.01,
            phi: 0.0,
            sweep: None,
            out: None,
        }
    }
}

impl RunConfig {
    /// Applies `settings` in order, so later entries (flags) win.
    pub fn from_settings(settings: &[Setting], sweep: Option<Sweep>) -> Result<Self, CliError> {
        let mut cfg = RunConfig { sweep, ..RunConfig::default() };
        let mut omega1_origin = None;
        let mut case_origin = None;
        for s in settings {
            let bad = |what: &str| CliError::Usage(format!("{}: {what}", s.origin));
            let num = || -> Result<f64, CliError> {
                match s.value.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(bad(&format!("'{}' is not a number", s.value))),
                }
            };
            let p = &mut cfg.params;
            match s.key.as_str() {
                "gamma1" => p.gamma1 = num()?,
                "gamma3" => p.gamma3 = num()?,
                "big_gamma2" => p.big_gamma2 = num()?,
                "big_gamma3" => p.big_gamma3 = num()?,
                "omega1" => {
                    p.omega1 = num()?;
                    omega1_origin = Some(s.origin.clone());
                }
                "omega3" => p.omega3 = num()?,
                "delta" => p.delta = num()?,
                "nbar" => p.nbar = num()?,
                "case" => {
                    cfg.case = s.value.parse().map_err(|e: String| bad(&e))?;
                    case_origin = Some(s.origin.clone());
                }
                "init" => cfg.init = parse_init(&s.value).map_err(|e| bad(&e))?,
                "tmax" => cfg.tmax = num()?,
                "sample_every" => cfg.sample_every = num()?,
                "phi" => cfg.phi = num()?,
                "out" => cfg.out = Some(PathBuf::from(&s.value)),
                other => return Err(bad(&format!("unknown key '{other}'"))),
            }
        }
        if cfg.case != Case::Custom {
            let derived = "omega1 is derived from omega3 by the drive case";
            if let Some(origin) = omega1_origin {
                let case_at = case_origin.map(|o| o.to_string()).unwrap_or_default();
                return Err(CliError::Usage(format!("{origin}: {derived} (case set at {case_at})")));
            }
            if cfg.sweep.is_some_and(|s| s.var == ParamName::Omega1) {
                return Err(CliError::Usage(format!("cannot sweep omega1: {derived}")));
            }
        }
        Ok(cfg)
    }

    /// Parameters at one sweep value (or the base point), drive case applied.
    pub fn params_at(&self, value: Option<f64>) -> qd_cascade::Result<Params> {
        let mut p = self.params;
        if let (Some(s), Some(v)) = (self.sweep, value) {
            s.var.set(&mut p, v);
        }
        let p = self.case.drive().apply(&p)?;
        p.validate()?;
        Ok(p)
    }
}
