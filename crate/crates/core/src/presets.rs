//! Parameter sets for each reproduced figure. This table is the single
//! source of truth used by the CLI `figure` command and by the tests.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{DriveCase, InitialState, SystemParams};

type Params = SystemParams<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    Fig3a,
    Fig4,
    Fig5,
    Fig6,
    Fig7a,
    Fig7b,
    Fig8,
    Fig9a,
    Fig9b,
    Fig10,
}

impl FigureId {
    pub const ALL: [FigureId; 10] = [
        FigureId::Fig3a,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7a,
        FigureId::Fig7b,
        FigureId::Fig8,
        FigureId::Fig9a,
        FigureId::Fig9b,
        FigureId::Fig10,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig3a => "fig3a",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7a => "fig7a",
            FigureId::Fig7b => "fig7b",
            FigureId::Fig8 => "fig8",
            FigureId::Fig9a => "fig9a",
            FigureId::Fig9b => "fig9b",
            FigureId::Fig10 => "fig10",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::InvalidParameters(format!("unknown figure '{s}'")))
    }
}

/// A model parameter that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamName {
    Gamma1,
    Gamma3,
    BigGamma2,
    BigGamma3,
    Omega1,
    Omega3,
    Delta,
    Nbar,
    /// α² at fixed γ₁ + γ₃.
    AlphaSq,
}

impl ParamName {
    pub const ALL: [ParamName; 9] = [
        ParamName::Gamma1,
        ParamName::Gamma3,
        ParamName::BigGamma2,
        ParamName::BigGamma3,
        ParamName::Omega1,
        ParamName::Omega3,
        ParamName::Delta,
        ParamName::Nbar,
        ParamName::AlphaSq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParamName::Gamma1 => "gamma1",
            ParamName::Gamma3 => "gamma3",
            ParamName::BigGamma2 => "big_gamma2",
            ParamName::BigGamma3 => "big_gamma3",
            ParamName::Omega1 => "omega1",
            ParamName::Omega3 => "omega3",
            ParamName::Delta => "delta",
            ParamName::Nbar => "nbar",
            ParamName::AlphaSq => "alpha_sq",
        }
    }

    pub fn set(self, params: &mut Params, value: f64) {
        match self {
            ParamName::Gamma1 => params.gamma1 = value,
            ParamName::Gamma3 => params.gamma3 = value,
            ParamName::BigGamma2 => params.big_gamma2 = value,
            ParamName::BigGamma3 => params.big_gamma3 = value,
            ParamName::Omega1 => params.omega1 = value,
            ParamName::Omega3 => params.omega3 = value,
            ParamName::Delta => params.delta = value,
            ParamName::Nbar => params.nbar = value,
            ParamName::AlphaSq => {
                let total = params.gamma1 + params.gamma3;
                params.gamma1 = value * total;
                params.gamma3 = (1.0 - value) * total;
            }
        }
    }
}

impl FromStr for ParamName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ParamName::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidParameters(format!("unknown parameter '{s}'")))
    }
}

/// `points` equally spaced values from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.stop
                } else {
                    self.start + step * k as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Workload {
    /// Steady states over the Cartesian product of the axes (first axis slowest).
    Steady(Vec<(ParamName, Grid)>),
    Transient { t_max: f64, sample_every: f64 },
}

/// One curve (or surface) of a figure.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetRun {
    /// Appended to the file name when a figure has several runs.
    pub tag: Option<String>,
    pub label: String,
    /// Parameters before the drive case is applied.
    pub params: Params,
    pub case: DriveCase<f64>,
    pub init: InitialState<f64>,
}

impl PresetRun {
    /// Parameters at one sweep point, with the drive case applied last.
    pub fn params_at(&self, assignments: &[(ParamName, f64)]) -> Result<Params> {
        let mut p = self.params;
        for (name, value) in assignments {
            name.set(&mut p, *value);
        }
        self.case.apply(&p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigurePreset {
    pub id: FigureId,
    pub title: &'static str,
    pub runs: Vec<PresetRun>,
    pub workload: Workload,
    pub phi: f64,
    /// Settings not fixed by the figure itself.
    pub choices: Vec<&'static str>,
}

impl FigurePreset {
    /// File name of `run` inside the output directory.
    pub fn file_name(&self, run: &PresetRun) -> String {
        match &run.tag {
            Some(tag) => format!("{}_{}.csv", self.id, tag),
            None => format!("{}.csv", self.id),
        }
    }
}

fn base(gamma1: f64, gamma3: f64, omega3: f64, delta: f64) -> Params {
    SystemParams {
        gamma1,
        gamma3,
        omega3,
        delta,
        ..SystemParams::default()
    }
}

fn radiative(mut p: Params, gamma: f64) -> Params {
    p.big_gamma2 = gamma;
    p.big_gamma3 = gamma;
    p
}

fn single(label: &str, params: Params, case: DriveCase<f64>, init: InitialState<f64>) -> Vec<PresetRun> {
    vec![PresetRun {
        tag: None,
        label: label.to_string(),
        params,
        case,
        init,
    }]
}

const NBAR_SWEEP: Grid = Grid {
    start: 0.0,
    stop: 3.0,
    points: 301,
};
const NBAR_CHOICE: &str = "nbar range [0, 3] with 301 points is a preset choice";
const TIME_CHOICE: &str = "time window [0, 5] sampled every 0.005 is a preset choice";

fn steady_nbar() -> Workload {
    Workload::Steady(vec![(ParamName::Nbar, NBAR_SWEEP)])
}

fn transient() -> Workload {
    Workload::Transient {
        t_max: 5.0,
        sample_every: 0.005,
    }
}

fn gamma_family(values: &[f64], params: Params, case: DriveCase<f64>) -> Vec<PresetRun> {
    values
        .iter()
        .map(|&g| PresetRun {
            tag: Some(format!("gamma_{g}")),
            label: format!("Gamma = {g}"),
            params: radiative(params, g),
            case,
            init: InitialState::MaximallyMixed,
        })
        .collect()
}

pub fn preset(id: FigureId) -> FigurePreset {
    let mixed = InitialState::MaximallyMixed;
    let (runs, workload, choices, title) = match id {
        FigureId::Fig3a => (
            single("Omega_w = 0", base(1.0, 10.0, 5.0, 5.0), DriveCase::OmegaWZero, mixed),
            steady_nbar(),
            vec![NBAR_CHOICE, "omega3 = 5 is a preset choice (only the ratio omega3/omega1 is fixed)"],
            "steady-state bare populations, Omega_w = 0",
        ),
        FigureId::Fig4 => (
            single("Omega_w = Omega_u", base(1.0, 10.0, 5.0, 5.0), DriveCase::OmegaWEqualsOmegaU, mixed),
            steady_nbar(),
            vec![NBAR_CHOICE],
            "steady-state bare populations and purity, Omega_w = Omega_u",
        ),
        FigureId::Fig5 => (
            single("Omega_w = 0", base(0.5, 0.5, 0.0, 5.0), DriveCase::OmegaWZeroAt(5.0), mixed),
            Workload::Steady(vec![
                (ParamName::AlphaSq, Grid { start: 0.0, stop: 1.0, points: 101 }),
                (ParamName::Nbar, Grid { start: 0.0, stop: 1.0, points: 101 }),
            ]),
            vec![
                "grid alpha_sq in [0, 1] x nbar in [0, 1], 101 x 101 points, is a preset choice",
                "gamma1 + gamma3 = 1, Omega_u = 5, delta = 5 are preset choices",
            ],
            "steady-state variance over (alpha_sq, nbar), Omega_w = 0",
        ),
        FigureId::Fig6 => (
            [0.1, 0.2, 0.5]
                .iter()
                .map(|&o3| PresetRun {
                    tag: Some(format!("omega3_{o3}")),
                    label: format!("omega3 = {o3}"),
                    params: base(5.0, 1.0, o3, 5.0),
                    case: DriveCase::OmegaWEqualsOmegaU,
                    init: mixed,
                })
                .collect(),
            steady_nbar(),
            vec![NBAR_CHOICE, "delta = 5 is a preset choice"],
            "steady-state variance, Omega_w = Omega_u",
        ),
        FigureId::Fig7a => (
            single("rho_22(0) = 1, nbar = 0", base(1.0, 1.0, 0.0, 0.0), DriveCase::OmegaWZeroAt(5.0), InitialState::State2),
            transient(),
            vec![TIME_CHOICE, "gamma1 = gamma3 = 1 and delta = 0 are preset choices"],
            "transient populations from |2>",
        ),
        FigureId::Fig7b => (
            single(
                "rho_ww(0) = 1, nbar = 0.5",
                SystemParams { nbar: 0.5, ..base(1.0, 1.0, 0.0, 0.0) },
                DriveCase::OmegaWZeroAt(5.0),
                InitialState::StateW,
            ),
            transient(),
            vec![TIME_CHOICE, "gamma1 = gamma3 = 1 and delta = 0 are preset choices"],
            "transient populations from |w>",
        ),
        FigureId::Fig8 => {
            let p = base(1.0, 1.0, 0.0, 0.0);
            let run = |tag: &str, label: &str, nbar: f64, init| PresetRun {
                tag: Some(tag.to_string()),
                label: label.to_string(),
                params: SystemParams { nbar, ..p },
                case: DriveCase::OmegaWZeroAt(5.0),
                init,
            };
            (
                vec![
                    run("init_2", "rho_22(0) = 1, nbar = 0", 0.0, InitialState::State2),
                    run("init_u", "rho_uu(0) = 1, nbar = 0", 0.0, InitialState::StateU),
                    run("init_w", "rho_ww(0) = 1, nbar = 0", 0.0, InitialState::StateW),
                    run("init_w_nbar_0.5", "rho_ww(0) = 1, nbar = 0.5", 0.5, InitialState::StateW),
                ],
                transient(),
                vec![
                    TIME_CHOICE,
                    "gamma1 = gamma3 = 1 and delta = 0 are preset choices",
                    "intensity is in units of Gamma, with Gamma small enough to leave the dynamics unchanged",
                ],
                "transient radiation intensity",
            )
        }
        FigureId::Fig9a | FigureId::Fig9b => (
            gamma_family(&[0.0, 1.0, 2.0, 5.0], base(1.0, 10.0, 5.0, 5.0), DriveCase::OmegaWZero),
            steady_nbar(),
            vec![NBAR_CHOICE, "delta = 5 is a preset choice"],
            if id == FigureId::Fig9a {
                "one-photon inversion versus nbar for several Gamma"
            } else {
                "two-photon inversion versus nbar for several Gamma"
            },
        ),
        FigureId::Fig10 => (
            gamma_family(&[0.0, 0.1, 0.2, 0.5], base(5.0, 1.0, 0.1, 5.0), DriveCase::OmegaWEqualsOmegaU),
            steady_nbar(),
            vec![NBAR_CHOICE, "delta = 5 is a preset choice"],
            "steady-state variance versus nbar for several Gamma, Omega_w = Omega_u",
        ),
    };
    FigurePreset {
        id,
        title,
        runs,
        workload,
        phi: 0.0,
        choices,
    }
}
