//! Run configuration: a strict TOML schema (unknown keys are errors) plus
//! constructors for the core objects it describes.

use serde::{Deserialize, Serialize};

use fiolab::exec::ReductionMode;
use fiolab::experiment::{FamilyMode, TestFamily};
use fiolab::fio::FioOperator;
use fiolab::phase::{DiffeoSpec, PhaseSpec, PlateauWindow, SymbolSpec};
use fiolab::spectral::{Grid, SampledFunction};
use fiolab::Error;

use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dimension: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub reduction: Reduction,
    pub grid: GridConfig,
    pub phase: PhaseConfig,
    pub symbol: SymbolConfig,
    pub experiment: ExperimentConfig,
    #[serde(default)]
    pub input: InputConfig,
    pub output: OutputConfig,
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    #[default]
    Deterministic,
    Parallel,
}

impl From<Reduction> for ReductionMode {
    fn from(r: Reduction) -> ReductionMode {
        match r {
            Reduction::Deterministic => ReductionMode::Deterministic,
            Reduction::Parallel => ReductionMode::Parallel,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub points_per_axis: usize,
    pub half_width: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseConfig {
    pub kind: PhaseKindName,
    /// Fibration rank (phi_product only).
    pub rank: Option<usize>,
    /// Diffeomorphism bump scale c (phi_product only).
    pub bump_scale: Option<f64>,
    /// Translation vector (shifted only).
    pub shift: Option<Vec<f64>>,
    /// Radial coefficient (x_linear_radial only).
    pub radial_scale: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKindName {
    Linear,
    Shifted,
    PhiProduct,
    XLinearRadial,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolConfig {
    pub order: f64,
    /// Plateau/support half-widths of the spatial window; both or neither.
    pub plateau: Option<f64>,
    pub support: Option<f64>,
    #[serde(default)]
    pub frequency_floor: bool,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p: f64,
    pub j_min: u32,
    pub j_max: u32,
    #[serde(default)]
    pub family: FamilyName,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    0.15
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    #[default]
    FixedWidth,
    ProportionalWidth,
}

impl From<FamilyName> for FamilyMode {
    fn from(f: FamilyName) -> FamilyMode {
        match f {
            FamilyName::FixedWidth => FamilyMode::FixedWidth,
            FamilyName::ProportionalWidth => FamilyMode::ProportionalWidth,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    #[serde(default)]
    pub kind: InputKind,
    #[serde(default)]
    pub center: f64,
    #[serde(default = "default_width")]
    pub width: f64,
    #[serde(default)]
    pub modulation: f64,
    /// Scale index for the family_member input.
    pub family_scale: Option<u32>,
}

fn default_width() -> f64 {
    0.5
}

impl Default for InputConfig {
    fn default() -> Self {
        InputConfig {
            kind: InputKind::Gaussian,
            center: 0.0,
            width: default_width(),
            modulation: 0.0,
            family_scale: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    #[default]
    Gaussian,
    ModulatedGaussian,
    FamilyMember,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: String,
    pub report: String,
    pub svg: Option<String>,
}

impl RunConfig {
    pub fn from_path(path: &std::path::Path) -> Result<RunConfig, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {}", path.display(), e))?;
        toml::from_str(&text).map_err(|e| format!("config parse error: {}", e))
    }

    pub fn grid(&self) -> Result<Grid, Error> {
        Grid::new(
            self.dimension,
            self.grid.points_per_axis,
            self.grid.half_width,
        )
    }

    pub fn phase(&self) -> Result<PhaseSpec, Error> {
        match self.phase.kind {
            PhaseKindName::Linear => PhaseSpec::linear(self.dimension),
            PhaseKindName::Shifted => {
                let shift = self.phase.shift.clone().ok_or_else(|| {
                    Error::InvalidParameter("shifted phase needs a shift vector".into())
                })?;
                PhaseSpec::shifted(self.dimension, &shift)
            }
            PhaseKindName::PhiProduct => {
                let rank = self.phase.rank.ok_or_else(|| {
                    Error::InvalidParameter("phi_product phase needs a rank".into())
                })?;
                let scale = self.phase.bump_scale.unwrap_or(0.1);
                PhaseSpec::phi_product(self.dimension, rank, DiffeoSpec::new(scale)?)
            }
            PhaseKindName::XLinearRadial => {
                if self.dimension != 2 {
                    return Err(Error::InvalidParameter(
                        "x_linear_radial is a d = 2 phase".into(),
                    ));
                }
                PhaseSpec::x_linear_radial(self.phase.radial_scale.unwrap_or(0.25))
            }
        }
    }

    pub fn symbol(&self) -> Result<SymbolSpec, Error> {
        let window = match (self.symbol.plateau, self.symbol.support) {
            (Some(p), Some(s)) => Some(PlateauWindow::new(p, s)?),
            (None, None) => None,
            _ => {
                return Err(Error::InvalidParameter(
                    "symbol window needs both plateau and support (or neither)".into(),
                ))
            }
        };
        SymbolSpec::new(self.symbol.order, window, self.symbol.frequency_floor)
    }

    pub fn operator(&self) -> Result<FioOperator, Error> {
        FioOperator::new(self.phase()?, self.symbol()?, self.grid()?)
    }

    pub fn family(&self) -> Result<TestFamily, Error> {
        TestFamily::new(
            self.experiment.family.into(),
            self.experiment.j_min,
            self.experiment.j_max,
        )
    }

    /// Build the configured input function on the configured grid.
    pub fn input_function(&self) -> Result<SampledFunction, Error> {
        let grid = self.grid()?;
        match self.input.kind {
            InputKind::Gaussian => {
                let c = self.input.center;
                let w = self.input.width;
                if !(w > 0.0) {
                    return Err(Error::InvalidParameter(
                        "input width must be positive".into(),
                    ));
                }
                Ok(SampledFunction::from_fn(grid, |x| {
                    let r2: f64 = x.iter().map(|t| (t - c) * (t - c)).sum();
                    Complex64::new((-PI * r2 / (w * w)).exp(), 0.0)
                }))
            }
            InputKind::ModulatedGaussian => {
                let c = self.input.center;
                let w = self.input.width;
                let eta0 = self.input.modulation;
                if !(w > 0.0) {
                    return Err(Error::InvalidParameter(
                        "input width must be positive".into(),
                    ));
                }
                Ok(SampledFunction::from_fn(grid, |x| {
                    let r2: f64 = x.iter().map(|t| (t - c) * (t - c)).sum();
                    Complex64::from_polar((-PI * r2 / (w * w)).exp(), 2.0 * PI * eta0 * x[0])
                }))
            }
            InputKind::FamilyMember => {
                let j = self.input.family_scale.ok_or_else(|| {
                    Error::InvalidParameter("family_member input needs family_scale".into())
                })?;
                self.family()?.build_input(grid, j)
            }
        }
    }
}
