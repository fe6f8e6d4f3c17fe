//! Scenario configuration: a single TOML file describing body,
//! environment channels, and an optional experiment section.
//!
//! Dimensioned fields accept either a bare number (SI base units) or a
//! string with a unit suffix (`"10 um"`, `"1 ms"`, `"720 amu"`). Unknown
//! keys are rejected; parse errors carry the TOML line and field path.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer};

use crate::channels::{ChannelSpec, Environment, GasSpectrumModel};
use crate::evolution::{GridSpec, Hamiltonian, PotentialSpec};
use crate::experiments::{GratingOptions, GratingSpec, SlitProfile};
use crate::quad::QuadratureConfig;
use crate::quantities::{BodySpec, CONSTANTS};
use crate::spectra::SpectralDensity;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dimension {
    Length,
    Time,
    Temperature,
    Mass,
    Speed,
}

impl Dimension {
    fn label(self) -> &'static str {
        match self {
            Dimension::Length => "length",
            Dimension::Time => "time",
            Dimension::Temperature => "temperature",
            Dimension::Mass => "mass",
            Dimension::Speed => "speed",
        }
    }

    /// Unit table, longest suffixes first so "mm" wins over "m".
    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Dimension::Length => &[
                ("cm", 1e-2),
                ("mm", 1e-3),
                ("um", 1e-6),
                ("µm", 1e-6),
                ("nm", 1e-9),
                ("pm", 1e-12),
                ("m", 1.0),
            ],
            Dimension::Time => {
                &[("ms", 1e-3), ("us", 1e-6), ("µs", 1e-6), ("ns", 1e-9), ("s", 1.0)]
            }
            Dimension::Temperature => &[("mK", 1e-3), ("K", 1.0)],
            Dimension::Mass => {
                &[("amu", CONSTANTS.amu), ("kg", 1.0), ("g", 1e-3), ("u", CONSTANTS.amu)]
            }
            Dimension::Speed => &[("m/s", 1.0)],
        }
    }
}

/// Parses `"0.5 nm"`, `"0.5nm"`, `"1e-25 kg"`, or a bare numeric string
/// (SI base units) into SI.
fn parse_quantity(raw: &str, dim: Dimension) -> std::result::Result<f64, String> {
    let text = raw.trim();
    if let Ok(v) = text.parse::<f64>() {
        return Ok(v);
    }
    for (unit, factor) in dim.units() {
        if let Some(prefix) = text.strip_suffix(unit) {
            if let Ok(v) = prefix.trim().parse::<f64>() {
                return Ok(v * factor);
            }
        }
    }
    Err(format!("cannot parse {raw:?} as a {} quantity (bare SI number or number + unit)", dim.label()))
}

/// Parses a CLI length argument ("10 um" or bare meters).
pub fn parse_length(raw: &str) -> Result<f64> {
    parse_quantity(raw, Dimension::Length).map_err(Error::Config)
}

/// Parses a CLI temperature argument ("1 K" or bare kelvin).
pub fn parse_temperature(raw: &str) -> Result<f64> {
    parse_quantity(raw, Dimension::Temperature).map_err(Error::Config)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawQuantity {
    Number(f64),
    Text(String),
}

fn deserialize_dim<'de, D: Deserializer<'de>>(
    deserializer: D,
    dim: Dimension,
) -> std::result::Result<f64, D::Error> {
    match RawQuantity::deserialize(deserializer)? {
        RawQuantity::Number(v) => Ok(v),
        RawQuantity::Text(s) => parse_quantity(&s, dim).map_err(D::Error::custom),
    }
}

macro_rules! quantity_newtype {
    ($name:ident, $dim:expr) => {
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name(pub f64);

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                deserialize_dim(d, $dim).map($name)
            }
        }
    };
}

quantity_newtype!(Length, Dimension::Length);
quantity_newtype!(TimeQuantity, Dimension::Time);
quantity_newtype!(Temperature, Dimension::Temperature);
quantity_newtype!(MassQuantity, Dimension::Mass);
quantity_newtype!(Speed, Dimension::Speed);

/// Top-level scenario configuration.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub body: BodyConfig,
    #[serde(default)]
    pub channel: Vec<ChannelConfig>,
    pub experiment: Option<ExperimentConfig>,
    #[serde(default)]
    pub outputs: OutputsConfig,
    /// Directory of the config file; resolves relative paths.
    #[serde(skip)]
    base_dir: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyConfig {
    pub radius: Length,
    pub mass_density: f64,
    pub temperature: Option<Temperature>,
    pub mass: Option<MassQuantity>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelConfig {
    BlackbodyAbsorption {
        temperature: Temperature,
        radius: Option<Length>,
    },
    ThermalEmission {
        /// Defaults to the body's internal temperature.
        temperature: Option<Temperature>,
        radius: Option<Length>,
    },
    Rayleigh {
        temperature: Temperature,
        radius: Option<Length>,
    },
    Gas {
        number_density: f64,
        gas_mass: MassQuantity,
        temperature: Temperature,
        radius: Option<Length>,
        #[serde(default)]
        spectrum: GasModelConfig,
    },
    Custom {
        label: Option<String>,
        rate: f64,
        /// Line spectrum at this wavevector (1/m)...
        wavevector: Option<f64>,
        /// ...or a tabulated spectrum from a two-column CSV.
        spectrum_csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GasModelConfig {
    #[default]
    Line,
    Maxwell,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub time: Option<TimeQuantity>,
    pub delta: Option<f64>,
    pub grid: Option<GridConfig>,
    pub initial: Option<InitialConfig>,
    pub potential: Option<PotentialConfig>,
    pub grating: Option<GratingConfig>,
    /// Observable sampling stride in steps (default: ~100 samples total).
    pub stride: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub extent: Length,
    pub points: usize,
    pub time_step: TimeQuantity,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub center: Length,
    pub width: Length,
    /// Mean wavevector k₀ (1/m); the mean momentum is ħk₀.
    #[serde(default)]
    pub wavevector: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    Free,
    Harmonic { omega: f64 },
    Zero,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GratingConfig {
    pub slit_width: Length,
    pub period: Length,
    pub slits: usize,
    pub flight_time: TimeQuantity,
    pub speed: Option<Speed>,
    #[serde(default)]
    pub profile: SlitProfileConfig,
    #[serde(default)]
    pub frozen_kinetic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SlitProfileConfig {
    #[default]
    Tophat,
    Point,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    pub rates_csv: Option<PathBuf>,
    pub rates_json: Option<PathBuf>,
    pub kernel_csv: Option<PathBuf>,
    pub trajectory: Option<PathBuf>,
    pub snapshot: Option<PathBuf>,
    pub pattern_csv: Option<PathBuf>,
    pub pattern_svg: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let raw = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config: ScenarioConfig = toml::from_str(&raw)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.base_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Ok(config)
    }

    pub fn parse(raw: &str) -> Result<Self> {
        toml::from_str(raw).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn body(&self) -> Result<BodySpec> {
        let mut body = BodySpec::new(self.body.radius.0, self.body.mass_density)?;
        if let Some(t) = self.body.temperature {
            body = body.with_internal_temperature(t.0)?;
        }
        if let Some(m) = self.body.mass {
            body = body.with_mass(m.0)?;
        }
        Ok(body)
    }

    /// Resolves channel entries to domain channel specs, defaulting radii
    /// and emission temperature from the body.
    pub fn environment(&self, cfg: &QuadratureConfig) -> Result<Environment> {
        let body_radius = self.body.radius.0;
        let mut channels = Vec::with_capacity(self.channel.len());
        for entry in &self.channel {
            let spec = match entry {
                ChannelConfig::BlackbodyAbsorption { temperature, radius } => {
                    ChannelSpec::BlackbodyAbsorption {
                        temperature: temperature.0,
                        radius: radius.map_or(body_radius, |r| r.0),
                    }
                }
                ChannelConfig::ThermalEmission { temperature, radius } => {
                    let t = temperature
                        .map(|t| t.0)
                        .or(self.body.temperature.map(|t| t.0))
                        .ok_or_else(|| {
                            Error::Config(
                                "thermal_emission needs a temperature (channel or body)".into(),
                            )
                        })?;
                    ChannelSpec::ThermalEmission {
                        body_temperature: t,
                        radius: radius.map_or(body_radius, |r| r.0),
                    }
                }
                ChannelConfig::Rayleigh { temperature, radius } => ChannelSpec::Rayleigh {
                    temperature: temperature.0,
                    radius: radius.map_or(body_radius, |r| r.0),
                },
                ChannelConfig::Gas { number_density, gas_mass, temperature, radius, spectrum } => {
                    ChannelSpec::Gas {
                        number_density: *number_density,
                        gas_mass: gas_mass.0,
                        temperature: temperature.0,
                        radius: radius.map_or(body_radius, |r| r.0),
                        model: match spectrum {
                            GasModelConfig::Line => GasSpectrumModel::Monochromatic,
                            GasModelConfig::Maxwell => GasSpectrumModel::MaxwellBoltzmann,
                        },
                    }
                }
                ChannelConfig::Custom { label, rate, wavevector, spectrum_csv } => {
                    let density = match (wavevector, spectrum_csv) {
                        (Some(k), None) => SpectralDensity::line(*rate, *k)?,
                        (None, Some(path)) => {
                            let full = if path.is_absolute() {
                                path.clone()
                            } else {
                                self.base_dir.join(path)
                            };
                            let file = fs::File::open(&full).map_err(|e| {
                                Error::Config(format!("cannot open {}: {e}", full.display()))
                            })?;
                            SpectralDensity::tabulated_from_csv(
                                *rate,
                                std::io::BufReader::new(file),
                                cfg,
                            )?
                        }
                        _ => {
                            return Err(Error::Config(
                                "custom channel needs exactly one of wavevector or spectrum_csv"
                                    .into(),
                            ))
                        }
                    };
                    ChannelSpec::Custom {
                        label: label.clone().unwrap_or_else(|| "custom".into()),
                        density,
                    }
                }
            };
            channels.push(spec);
        }
        Ok(Environment::new(channels))
    }

    pub fn grid(&self) -> Result<GridSpec> {
        let exp = self.experiment()?;
        let grid = exp
            .grid
            .as_ref()
            .ok_or_else(|| Error::Config("experiment.grid section required".into()))?;
        GridSpec::new(grid.extent.0, grid.points, grid.time_step.0)
    }

    pub fn initial(&self) -> Result<&InitialConfig> {
        self.experiment()?
            .initial
            .as_ref()
            .ok_or_else(|| Error::Config("experiment.initial section required".into()))
    }

    pub fn hamiltonian(&self) -> Result<Hamiltonian> {
        Ok(match &self.experiment()?.potential {
            None | Some(PotentialConfig::Free) => {
                Hamiltonian::Full { potential: PotentialSpec::Free }
            }
            Some(PotentialConfig::Harmonic { omega }) => {
                Hamiltonian::Full { potential: PotentialSpec::Harmonic { omega: *omega } }
            }
            Some(PotentialConfig::Zero) => Hamiltonian::Zero,
        })
    }

    pub fn grating(&self) -> Result<(GratingSpec, GratingOptions, f64)> {
        let exp = self.experiment()?;
        let g = exp
            .grating
            .as_ref()
            .ok_or_else(|| Error::Config("experiment.grating section required".into()))?;
        let spec = GratingSpec::new(g.slit_width.0, g.period.0, g.slits, g.flight_time.0)?;
        let options = GratingOptions {
            profile: match g.profile {
                SlitProfileConfig::Tophat => SlitProfile::TopHat,
                SlitProfileConfig::Point => SlitProfile::Point,
            },
            frozen_kinetic: g.frozen_kinetic,
        };
        Ok((spec, options, g.speed.map_or(100.0, |s| s.0)))
    }

    pub fn experiment(&self) -> Result<&ExperimentConfig> {
        self.experiment
            .as_ref()
            .ok_or_else(|| Error::Config("experiment section required".into()))
    }
}
