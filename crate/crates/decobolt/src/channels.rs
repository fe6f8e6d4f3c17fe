//! Physical decoherence channels: collision rates and spectral densities.
//!
//! Each channel produces a (𝒩, ν) pair. Photon channels carry
//! Planck-weighted spectra; the gas channel is monochromatic at the mean
//! momentum transfer by default (a Maxwell–Boltzmann tabulated model is
//! available). Channels compose additively: rates add, densities mix.

use crate::quad::QuadratureConfig;
use crate::quantities::{thermal_velocity, CONSTANTS};
use crate::spectra::{bose_integral, SpectralDensity};
use crate::{Error, Result};

/// Number of photons with Planck density entering the surface of a ball of
/// radius R per unit time: (1/4)(4πR²c)(1/π²)∫k²dk/(e^{ħck/k_BT}−1).
///
/// The closed form is (2ζ(3)/π)·R²c·(k_BT/ħc)³ with coefficient 0.76525;
/// the integral is evaluated by quadrature.
pub fn blackbody_rate(radius: f64, temperature: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_positive(radius, "radius")?;
    check_positive(temperature, "temperature")?;
    let scale = CONSTANTS.thermal_wavevector(temperature);
    Ok(radius * radius * CONSTANTS.speed_of_light / std::f64::consts::PI
        * scale.powi(3)
        * bose_integral(2, cfg)?)
}

/// Decoherence time τ = 1/𝒩 for blackbody photon exchange.
pub fn decoherence_time(radius: f64, temperature: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(1.0 / blackbody_rate(radius, temperature, cfg)?)
}

/// Rayleigh cross-section σ(k) = (10π/3)k⁴a⁶ for a sphere of radius a.
pub fn rayleigh_cross_section(wavevector: f64, radius: f64) -> f64 {
    10.0 * std::f64::consts::PI / 3.0 * wavevector.powi(4) * radius.powi(6)
}

/// Rayleigh scattering rate of thermal photons off a sphere of radius a:
/// (1/2)(10π/3 a⁶c)(1/π²)∫k⁶dk/(e^{ħck/k_BT}−1) ≃ 385.2·c·a⁶·(k_BT/ħc)⁷.
pub fn rayleigh_rate(radius: f64, temperature: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_positive(radius, "radius")?;
    check_positive(temperature, "temperature")?;
    let scale = CONSTANTS.thermal_wavevector(temperature);
    Ok(5.0 / (3.0 * std::f64::consts::PI)
        * radius.powi(6)
        * CONSTANTS.speed_of_light
        * scale.powi(7)
        * bose_integral(6, cfg)?)
}

/// Gas collision rate 𝒩 = (1/2)(4πa²v_th)n₀ = 4√(2π)·a²·n₀·√(k_BT/m).
pub fn gas_rate(radius: f64, number_density: f64, gas_mass: f64, temperature: f64) -> Result<f64> {
    check_positive(radius, "radius")?;
    check_positive(number_density, "number density")?;
    check_positive(gas_mass, "gas particle mass")?;
    check_positive(temperature, "temperature")?;
    Ok(4.0
        * (2.0 * std::f64::consts::PI).sqrt()
        * radius
        * radius
        * number_density
        * (CONSTANTS.k_boltzmann * temperature / gas_mass).sqrt())
}

/// Spectral model for the gas channel (the rate fixes only 𝒩, not ν).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GasSpectrumModel {
    /// Single line at the mean momentum transfer k = m·v_th/ħ.
    #[default]
    Monochromatic,
    /// Tabulated flux-weighted Maxwell–Boltzmann transfer spectrum,
    /// ν(k) ∝ k³·exp(−(ħk)²/(2mk_BT)).
    MaxwellBoltzmann,
}

/// One physical decoherence channel.
#[derive(Debug, Clone)]
pub enum ChannelSpec {
    /// Absorption of environmental thermal photons by a black body.
    BlackbodyAbsorption { temperature: f64, radius: f64 },
    /// Emission of thermal photons at the body's internal temperature,
    /// modeled as blackbody exchange by detailed balance.
    ThermalEmission { body_temperature: f64, radius: f64 },
    /// Rayleigh scattering of environmental thermal photons.
    Rayleigh { temperature: f64, radius: f64 },
    /// Collisions with a dilute gas.
    Gas {
        number_density: f64,
        gas_mass: f64,
        temperature: f64,
        radius: f64,
        model: GasSpectrumModel,
    },
    /// Explicit rate and spectral density.
    Custom { label: String, density: SpectralDensity },
}

impl ChannelSpec {
    pub fn kind_name(&self) -> &str {
        match self {
            ChannelSpec::BlackbodyAbsorption { .. } => "blackbody_absorption",
            ChannelSpec::ThermalEmission { .. } => "thermal_emission",
            ChannelSpec::Rayleigh { .. } => "rayleigh",
            ChannelSpec::Gas { .. } => "gas",
            ChannelSpec::Custom { label, .. } => label,
        }
    }

    /// Collision rate 𝒩 of this channel (1/s).
    pub fn rate(&self, cfg: &QuadratureConfig) -> Result<f64> {
        match self {
            ChannelSpec::BlackbodyAbsorption { temperature, radius } => {
                blackbody_rate(*radius, *temperature, cfg)
            }
            ChannelSpec::ThermalEmission { body_temperature, radius } => {
                blackbody_rate(*radius, *body_temperature, cfg)
            }
            ChannelSpec::Rayleigh { temperature, radius } => {
                rayleigh_rate(*radius, *temperature, cfg)
            }
            ChannelSpec::Gas { number_density, gas_mass, temperature, radius, .. } => {
                gas_rate(*radius, *number_density, *gas_mass, *temperature)
            }
            ChannelSpec::Custom { density, .. } => Ok(density.rate()),
        }
    }
}

/// (𝒩, ν) for a channel: the rate from the channel's rate law, the shape
/// from its momentum-transfer statistics.
pub fn channel_spectrum(spec: &ChannelSpec, cfg: &QuadratureConfig) -> Result<SpectralDensity> {
    let rate = spec.rate(cfg)?;
    match spec {
        ChannelSpec::BlackbodyAbsorption { temperature, .. } => {
            SpectralDensity::planck_k2(rate, *temperature, cfg)
        }
        ChannelSpec::ThermalEmission { body_temperature, .. } => {
            SpectralDensity::planck_k2(rate, *body_temperature, cfg)
        }
        ChannelSpec::Rayleigh { temperature, .. } => {
            SpectralDensity::planck_k6(rate, *temperature, cfg)
        }
        ChannelSpec::Gas { gas_mass, temperature, model, .. } => {
            let v_th = thermal_velocity(*gas_mass, *temperature)?;
            match model {
                GasSpectrumModel::Monochromatic => {
                    SpectralDensity::line(rate, gas_mass * v_th / CONSTANTS.hbar)
                }
                GasSpectrumModel::MaxwellBoltzmann => {
                    maxwell_boltzmann_spectrum(rate, *gas_mass, *temperature, cfg)
                }
            }
        }
        ChannelSpec::Custom { density, .. } => Ok(density.clone()),
    }
}

fn maxwell_boltzmann_spectrum(
    rate: f64,
    gas_mass: f64,
    temperature: f64,
    cfg: &QuadratureConfig,
) -> Result<SpectralDensity> {
    let sigma_k = (gas_mass * CONSTANTS.k_boltzmann * temperature).sqrt() / CONSTANTS.hbar;
    let n = 2048;
    let k_cut = 8.0 * sigma_k;
    let k: Vec<f64> = (0..n).map(|i| k_cut * i as f64 / (n - 1) as f64).collect();
    let density: Vec<f64> =
        k.iter().map(|ki| ki.powi(3) * (-0.5 * (ki / sigma_k).powi(2)).exp()).collect();
    SpectralDensity::tabulated(rate, k, density, cfg)
}

/// A set of independent decoherence channels.
#[derive(Debug, Clone, Default)]
pub struct Environment {
    pub channels: Vec<ChannelSpec>,
}

impl Environment {
    pub fn new(channels: Vec<ChannelSpec>) -> Self {
        Environment { channels }
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }
}

/// Composes independent channels: 𝒩_total = Σ𝒩ᵢ and
/// ν_total = Σ(𝒩ᵢ/𝒩_total)νᵢ.
pub fn compose(env: &Environment, cfg: &QuadratureConfig) -> Result<SpectralDensity> {
    if env.is_empty() {
        return Err(Error::Config("environment has no channels".into()));
    }
    let spectra: Vec<SpectralDensity> = env
        .channels
        .iter()
        .map(|spec| channel_spectrum(spec, cfg))
        .collect::<Result<_>>()?;
    let total: f64 = spectra.iter().map(|s| s.rate()).sum();
    if !(total > 0.0) {
        return Err(Error::Config(format!(
            "environment total collision rate must be positive, got {total}"
        )));
    }
    SpectralDensity::mixture(spectra)
}

fn check_positive(value: f64, what: &str) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::Domain(format!("{what} must be positive and finite, got {value}")));
    }
    Ok(())
}
