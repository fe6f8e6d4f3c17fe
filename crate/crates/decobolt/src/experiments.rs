//! Interference feasibility bounds, grating diffraction with visibility
//! extraction, and the two case-study scenarios (cold dust ball, hot
//! fullerene beam).

use serde::Serialize;

use crate::channels::{self, ChannelSpec, Environment, GasSpectrumModel};
use crate::evolution::{DensityMatrix, GridSpec, Hamiltonian, PotentialSpec};
use crate::kernel::{coherence_factor, coherence_length, DecoherenceKernel};
use crate::quad::QuadratureConfig;
use crate::quantities::{thermal_velocity, BodySpec, CONSTANTS};
use crate::spectra::SpectralDensity;
use crate::{Error, Result};

/// Diffraction grating geometry with the free flight behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GratingSpec {
    /// Slit opening (m).
    pub slit_width: f64,
    /// Grating period (m).
    pub period: f64,
    /// Number of slits.
    pub slits: usize,
    /// Free flight time between grating and detection (s).
    pub flight_time: f64,
}

impl GratingSpec {
    pub fn new(slit_width: f64, period: f64, slits: usize, flight_time: f64) -> Result<Self> {
        if !(slit_width > 0.0 && slit_width < period) {
            return Err(Error::Config(format!(
                "slit width must satisfy 0 < {slit_width:e} < period {period:e}"
            )));
        }
        if slits < 2 {
            return Err(Error::Config(format!("grating needs at least 2 slits, got {slits}")));
        }
        if !(flight_time > 0.0) {
            return Err(Error::Config(format!("flight time must be positive, got {flight_time}")));
        }
        Ok(GratingSpec { slit_width, period, slits, flight_time })
    }
}

/// Slit transmission profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SlitProfile {
    /// Open over the full slit width (needs Δx ≤ slit_width/8).
    #[default]
    TopHat,
    /// Ideal one-node apertures: makes the off-diagonal damping law
    /// e^{−γ(d)t} exact for a two-slit visibility ratio.
    Point,
}

#[derive(Debug, Clone, Copy)]
pub struct GratingOptions {
    pub profile: SlitProfile,
    /// Freeze H = 0 during the flight (pure dephasing, no spreading).
    pub frozen_kinetic: bool,
}

impl Default for GratingOptions {
    fn default() -> Self {
        GratingOptions { profile: SlitProfile::TopHat, frozen_kinetic: false }
    }
}

/// Far-field pattern pair with extracted visibilities.
#[derive(Debug, Clone)]
pub struct GratingPattern {
    /// Momentum axis (kg·m/s), ascending.
    pub momenta: Vec<f64>,
    /// Pattern without decoherence, normalized to sum 1.
    pub baseline: Vec<f64>,
    /// Pattern with decoherence, normalized to sum 1.
    pub decohered: Vec<f64>,
    pub visibility_baseline: f64,
    pub visibility_decohered: f64,
}

/// Interference feasibility verdict for a body at temperature T with the
/// wavelength-to-slit ratio δ.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FeasibilityReport {
    pub delta: f64,
    /// Body radius a (m).
    pub radius: f64,
    /// Geometric lower bound on the de Broglie wavelength, Λ = 2δa (m).
    pub required_wavelength: f64,
    /// Thermal-velocity upper bound Λ_max = π^{3/2}ħ/√(2Mk_BT) (m).
    pub max_wavelength: f64,
    /// Mean thermal speed of the body (m/s).
    pub thermal_velocity: f64,
    /// Largest feasible radius a_max = δ^{−2/5}(ħ²/κk_BT)^{1/5} (m).
    pub max_radius: f64,
    /// Feasible iff a ≤ a_max (boundary inclusive).
    pub feasible: bool,
}

/// Largest de Broglie wavelength reachable at thermal speed:
/// Λ_max = π^{3/2}ħ/√(2Mk_BT).
pub fn max_de_broglie(mass: f64, temperature: f64) -> Result<f64> {
    if !(mass > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {mass}")));
    }
    if !(temperature > 0.0) {
        return Err(Error::Domain(format!("temperature must be positive, got {temperature}")));
    }
    Ok(std::f64::consts::PI.powf(1.5) * CONSTANTS.hbar
        / (2.0 * mass * CONSTANTS.k_boltzmann * temperature).sqrt())
}

/// Largest body radius compatible with interference:
/// a_max = δ^{−2/5}·(ħ²/(κ·k_B·T))^{1/5}.
pub fn max_radius(delta: f64, mass_density: f64, temperature: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain(format!("delta must be in (0, 1], got {delta}")));
    }
    if !(mass_density > 0.0) {
        return Err(Error::Domain(format!("mass density must be positive, got {mass_density}")));
    }
    if !(temperature > 0.0) {
        return Err(Error::Domain(format!("temperature must be positive, got {temperature}")));
    }
    let hbar2 = CONSTANTS.hbar * CONSTANTS.hbar;
    Ok(delta.powf(-0.4) * (hbar2 / (mass_density * CONSTANTS.k_boltzmann * temperature)).powf(0.2))
}

/// Combines the geometric bound Λ = 2δa, the thermal-velocity bound on Λ,
/// and the resulting radius bound into a verdict.
pub fn feasibility(body: &BodySpec, temperature: f64, delta: f64) -> Result<FeasibilityReport> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain(format!("delta must be in (0, 1], got {delta}")));
    }
    let mass = body.mass();
    let max_wavelength = max_de_broglie(mass, temperature)?;
    let a_max = max_radius(delta, body.mass_density, temperature)?;
    Ok(FeasibilityReport {
        delta,
        radius: body.radius,
        required_wavelength: 2.0 * delta * body.radius,
        max_wavelength,
        thermal_velocity: thermal_velocity(mass, temperature)?,
        max_radius: a_max,
        feasible: body.radius <= a_max,
    })
}

/// Sends a wavepacket through a grating and extracts the far-field pattern
/// (the momentum distribution after the flight), with and without the
/// decoherence kernel.
pub fn grating_pattern(
    mass: f64,
    grating: &GratingSpec,
    kernel: &DecoherenceKernel,
    grid: GridSpec,
    incident_speed: f64,
    options: &GratingOptions,
) -> Result<GratingPattern> {
    if !(incident_speed > 0.0) {
        return Err(Error::Domain(format!("incident speed must be positive, got {incident_speed}")));
    }
    let dx = grid.spacing();
    match options.profile {
        SlitProfile::TopHat => {
            if dx > grating.slit_width / 8.0 {
                return Err(Error::Config(format!(
                    "grating unresolvable: Δx = {dx:e} exceeds slit_width/8 = {:e}",
                    grating.slit_width / 8.0
                )));
            }
        }
        SlitProfile::Point => {
            if dx > grating.period / 2.0 {
                return Err(Error::Config(format!(
                    "point slits need Δx ≤ period/2, got Δx = {dx:e}"
                )));
            }
        }
    }
    let span_needed = grating.slits as f64 * grating.period * 4.0;
    if grid.extent < span_needed {
        return Err(Error::Config(format!(
            "grid extent {:e} below {span_needed:e} (slits·period·4)",
            grid.extent
        )));
    }

    let state = masked_state(mass, grating, grid, options.profile)?;
    let hamiltonian = if options.frozen_kinetic {
        Hamiltonian::Zero
    } else {
        Hamiltonian::Full { potential: PotentialSpec::Free }
    };

    let baseline = state.evolve(None, &hamiltonian, grating.flight_time, usize::MAX)?;
    let decohered = state.evolve(Some(kernel), &hamiltonian, grating.flight_time, usize::MAX)?;
    let base_obs = baseline.final_state.observables();
    let deco_obs = decohered.final_state.observables();

    let vis_base = visibility(&base_obs.momenta, &base_obs.momentum, grating.period);
    let vis_deco = visibility(&deco_obs.momenta, &deco_obs.momentum, grating.period);
    Ok(GratingPattern {
        momenta: base_obs.momenta,
        baseline: base_obs.momentum,
        decohered: deco_obs.momentum,
        visibility_baseline: vis_base,
        visibility_decohered: vis_deco,
    })
}

/// Gaussian envelope masked by the grating transmission, renormalized.
fn masked_state(
    mass: f64,
    grating: &GratingSpec,
    grid: GridSpec,
    profile: SlitProfile,
) -> Result<DensityMatrix> {
    let n = grid.points;
    let span = (grating.slits - 1) as f64 * grating.period + grating.slit_width;
    let sigma_env = span.max(grating.period);
    let centers: Vec<f64> = (0..grating.slits)
        .map(|m| (m as f64 - (grating.slits as f64 - 1.0) / 2.0) * grating.period)
        .collect();

    let mut amplitude = vec![0.0f64; n];
    match profile {
        SlitProfile::TopHat => {
            for i in 0..n {
                let x = grid.x(i);
                if centers.iter().any(|c| (x - c).abs() <= grating.slit_width / 2.0) {
                    amplitude[i] = (-x * x / (4.0 * sigma_env * sigma_env)).exp();
                }
            }
        }
        SlitProfile::Point => {
            for c in &centers {
                let i = ((c / grid.spacing()) + n as f64 / 2.0).round() as usize;
                if i >= n {
                    return Err(Error::Config("slit node outside the grid".into()));
                }
                amplitude[i] = (-c * c / (4.0 * sigma_env * sigma_env)).exp();
            }
        }
    }
    let norm: f64 = amplitude.iter().map(|a| a * a).sum::<f64>() * grid.spacing();
    if !(norm > 0.0) {
        return Err(Error::Config("grating mask removed the whole wavepacket".into()));
    }
    let scale = norm.sqrt();
    let psi: Vec<f64> = amplitude.iter().map(|a| a / scale).collect();
    let data = ndarray::Array2::from_shape_fn((n, n), |(i, j)| {
        num_complex::Complex64::new(psi[i] * psi[j], 0.0)
    });
    DensityMatrix::from_parts(data, grid, mass)
}

/// Contrast (max−min)/(max+min) over the central three diffraction orders
/// after a 3-bin moving average.
pub fn visibility(momenta: &[f64], probabilities: &[f64], period: f64) -> f64 {
    let n = probabilities.len();
    let mut smoothed = probabilities.to_vec();
    for i in 1..n - 1 {
        smoothed[i] = (probabilities[i - 1] + probabilities[i] + probabilities[i + 1]) / 3.0;
    }
    let order_spacing = 2.0 * std::f64::consts::PI * CONSTANTS.hbar / period;
    let window = 1.5 * order_spacing;
    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    for (p, s) in momenta.iter().zip(&smoothed) {
        if p.abs() <= window {
            max = max.max(*s);
            min = min.min(*s);
        }
    }
    if !(max.is_finite() && min.is_finite()) || max + min == 0.0 {
        return 0.0;
    }
    (max - min) / (max + min)
}

/// One channel row of a scenario report.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelReport {
    pub name: String,
    /// 𝒩 (1/s).
    pub rate: f64,
    /// τ = 1/𝒩 (s); None when the rate vanishes.
    pub decoherence_time: Option<f64>,
    /// t𝒩 over the scenario's elapsed time.
    pub exposure: f64,
    /// Whether the channel contributes to the composed budget.
    pub included: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BodySummary {
    pub radius: f64,
    pub mass: f64,
    pub mass_density: f64,
    pub internal_temperature: Option<f64>,
}

/// Full scenario report: per-channel rates, the t𝒩 budget, coherence
/// metrics, feasibility, and comparison notes.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioResult {
    pub name: String,
    pub body: BodySummary,
    /// Exposure time t (s).
    pub elapsed: f64,
    pub channels: Vec<ChannelReport>,
    /// Σ𝒩ᵢ over included channels (1/s).
    pub total_rate: f64,
    /// t𝒩 budget = Σ exposures of included channels.
    pub exposure_total: f64,
    /// Γ = e^{−t𝒩}.
    pub coherence_factor: f64,
    /// λ̄ used for the coherence length (m).
    pub mean_wavelength: f64,
    pub coherence_length: Option<f64>,
    pub coherence_length_exact: Option<f64>,
    pub feasibility: FeasibilityReport,
    pub grating_period: Option<f64>,
    pub coherence_exceeds_grating: Option<bool>,
    pub notes: Vec<String>,
}

/// Cold metallic dust ball (a = 10 μm, T = 1 K, high vacuum): gas
/// collisions and Rayleigh scattering, examined over a millisecond.
pub fn run_dust_scenario(cfg: &QuadratureConfig) -> Result<ScenarioResult> {
    let radius = 1e-5;
    let temperature = 1.0;
    let number_density = 1e9;
    let gas_mass = 1e-25;
    let mass_density = 1e4;
    let elapsed = 1e-3;
    let delta = 1e-5;

    let body = BodySpec::new(radius, mass_density)?;
    let gas = ChannelSpec::Gas {
        number_density,
        gas_mass,
        temperature,
        radius,
        model: GasSpectrumModel::Monochromatic,
    };
    let rayleigh = ChannelSpec::Rayleigh { temperature, radius };
    let env = Environment::new(vec![gas, rayleigh]);

    let mut channels_report = Vec::new();
    for spec in &env.channels {
        let rate = spec.rate(cfg)?;
        channels_report.push(ChannelReport {
            name: spec.kind_name().to_string(),
            rate,
            decoherence_time: (rate > 0.0).then(|| 1.0 / rate),
            exposure: rate * elapsed,
            included: true,
        });
    }
    let gas_rate = channels_report[0].rate;
    let rayleigh_rate = channels_report[1].rate;

    let composed = channels::compose(&env, cfg)?;
    let kernel = DecoherenceKernel::build(composed)?;
    let report = kernel.coherence_report(elapsed)?;
    let feas = feasibility(&body, temperature, delta)?;

    let notes = vec![
        format!(
            "gas collisions: computed {gas_rate:.3} 1/s vs the published estimate of ~20 1/s \
             (factor ~{:.1} from rounded constants in the estimate)",
            20.0 / gas_rate
        ),
        format!(
            "Rayleigh scattering: computed {rayleigh_rate:.3} 1/s at T = 1 K vs the published \
             estimate of ~500 1/s; the a⁶T⁷ rate law reproduces ~500 1/s only near T ≈ 2.8 K, \
             so the published figure is inconsistent with its own formula at 1 K"
        ),
        format!(
            "over t = {elapsed:.0e} s the coherence factor stays at {:.4}: environmental \
             decoherence is eliminated on the millisecond scale for this body",
            report.coherence_factor
        ),
        format!(
            "interference remains infeasible: a = {radius:.1e} m far exceeds a_max = {:.2e} m; \
             the initial thermal velocity spread dominates",
            feas.max_radius
        ),
    ];

    Ok(ScenarioResult {
        name: "dust".into(),
        body: BodySummary {
            radius,
            mass: body.mass(),
            mass_density,
            internal_temperature: None,
        },
        elapsed,
        channels: channels_report,
        total_rate: kernel.saturation_rate(),
        exposure_total: kernel.saturation_rate() * elapsed,
        coherence_factor: report.coherence_factor,
        mean_wavelength: report.mean_wavelength,
        coherence_length: report.coherence_length,
        coherence_length_exact: report.coherence_length_exact,
        feasibility: feas,
        grating_period: None,
        coherence_exceeds_grating: None,
        notes,
    })
}

/// Hot C60 beam diffracting at a 100 nm grating: photon emission carries
/// the quoted per-flight budget t𝒩 = 3.5, gas collisions t𝒩 = 10⁻²;
/// absorption and Rayleigh scattering are computed and shown negligible.
pub fn run_fullerene_scenario(cfg: &QuadratureConfig) -> Result<ScenarioResult> {
    let radius = 0.5e-9;
    let env_temperature = 300.0;
    let body_temperature = 900.0;
    let mass = 720.0 * CONSTANTS.amu;
    let density_proxy = 1e4;
    let slit_width = 50e-9;
    let grating_period = 100e-9;
    let delta = 1e-5;
    // Only the per-flight budgets t𝒩 are specified; a nominal flight time
    // fixes the rate scale without affecting Γ or l_coh.
    let flight_time = 5e-3;
    let emission_budget = 3.5;
    let gas_budget = 1e-2;
    let photon_wavelength = 1e-5;

    let body = BodySpec::new(radius, density_proxy)?
        .with_mass(mass)?
        .with_internal_temperature(body_temperature)?;

    let emission_rate = emission_budget / flight_time;
    let gas_rate = gas_budget / flight_time;
    let rayleigh = channels::rayleigh_rate(radius, env_temperature, cfg)?;
    let absorption_bound = channels::blackbody_rate(radius, env_temperature, cfg)?;
    let emission_bound = channels::blackbody_rate(radius, body_temperature, cfg)?;

    let channels_report = vec![
        ChannelReport {
            name: "photon_emission".into(),
            rate: emission_rate,
            decoherence_time: Some(1.0 / emission_rate),
            exposure: emission_budget,
            included: true,
        },
        ChannelReport {
            name: "gas_collisions".into(),
            rate: gas_rate,
            decoherence_time: Some(1.0 / gas_rate),
            exposure: gas_budget,
            included: true,
        },
        ChannelReport {
            name: "rayleigh_scattering".into(),
            rate: rayleigh,
            decoherence_time: Some(1.0 / rayleigh),
            exposure: rayleigh * flight_time,
            included: true,
        },
        ChannelReport {
            name: "blackbody_absorption_bound".into(),
            rate: absorption_bound,
            decoherence_time: Some(1.0 / absorption_bound),
            exposure: absorption_bound * flight_time,
            included: false,
        },
    ];
    let exposure_total: f64 =
        channels_report.iter().filter(|c| c.included).map(|c| c.exposure).sum();
    let total_rate = exposure_total / flight_time;

    let factor = coherence_factor(total_rate, flight_time)?;
    // The quadratic-regime bound is set by the photon channel: λ̄ ≈ 10 μm.
    let l_coh = coherence_length(photon_wavelength, flight_time, emission_rate)?;
    let exceeds = l_coh > grating_period;
    let feas = feasibility(&body, body_temperature, delta)?;

    let notes = vec![
        format!(
            "photon emission dominates with a per-flight budget t𝒩 = {emission_budget}; gas \
             collisions add t𝒩 = {gas_budget} and are negligible"
        ),
        format!(
            "blackbody absorption is bounded by the perfect-absorber rate {absorption_bound:.3e} \
             1/s, suppressed relative to the same-law emission bound {emission_bound:.3e} 1/s by \
             (T_env/T_body)³ = {:.4}; following the emission-dominance argument it is neglected",
            (env_temperature / body_temperature).powi(3)
        ),
        format!(
            "Rayleigh scattering at a = 0.5 nm is {rayleigh:.3e} 1/s — many orders below the \
             photon-exchange scale because a is far below the thermal wavelength"
        ),
        format!(
            "coherence length l_coh = {l_coh:.3e} m exceeds the grating period \
             {grating_period:.1e} m and the slit width {slit_width:.1e} m: the diffraction \
             picture is not destroyed, decoherence only narrows the effective collimation"
        ),
    ];

    Ok(ScenarioResult {
        name: "fullerene".into(),
        body: BodySummary {
            radius,
            mass,
            mass_density: density_proxy,
            internal_temperature: Some(body_temperature),
        },
        elapsed: flight_time,
        channels: channels_report,
        total_rate,
        exposure_total,
        coherence_factor: factor,
        mean_wavelength: photon_wavelength,
        coherence_length: Some(l_coh),
        coherence_length_exact: Some(6.0_f64.sqrt() * l_coh),
        feasibility: feas,
        grating_period: Some(grating_period),
        coherence_exceeds_grating: Some(exceeds),
        notes,
    })
}

/// The fullerene grating demonstration: the scenario's photon kernel
/// applied to the 100 nm grating in frozen-kinetic mode.
pub fn fullerene_grating_pattern(cfg: &QuadratureConfig) -> Result<GratingPattern> {
    let scenario = run_fullerene_scenario(cfg)?;
    let photon = &scenario.channels[0];
    let k0 = 2.0 * std::f64::consts::PI / scenario.mean_wavelength;
    let kernel = DecoherenceKernel::build(SpectralDensity::line(photon.rate, k0)?)?;
    let grating = GratingSpec::new(50e-9, 100e-9, 8, scenario.elapsed)?;
    let grid = GridSpec::new(3.2e-6, 1024, scenario.elapsed)?;
    grating_pattern(
        scenario.body.mass,
        &grating,
        &kernel,
        grid,
        100.0,
        &GratingOptions { profile: SlitProfile::TopHat, frozen_kinetic: true },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantities::de_broglie_wavelength;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn max_de_broglie_equals_thermal_de_broglie() {
        // Algebraic identity: 2πħ/(M·v_th) = π^{3/2}ħ/√(2Mk_BT).
        let (mass, temperature) = (720.0 * CONSTANTS.amu, 900.0);
        let via_velocity =
            de_broglie_wavelength(mass, thermal_velocity(mass, temperature).unwrap()).unwrap();
        let direct = max_de_broglie(mass, temperature).unwrap();
        assert!(rel_err(direct, via_velocity) < 1e-12);
        assert!(rel_err(direct, 3.4066873555470731e-12) < 1e-12, "Λ_max = {direct}");
        // Quadrupling T halves Λ_max.
        assert!(rel_err(max_de_broglie(mass, 4.0 * temperature).unwrap(), direct / 2.0) < 1e-12);
    }

    #[test]
    fn max_radius_reference_and_scalings() {
        let a_max = max_radius(1e-5, 1e4, 1.0).unwrap();
        assert!(rel_err(a_max, 1.5177974113471590e-8) < 1e-10, "a_max = {a_max}");
        // T^{-1/5}: a factor of 32 in T halves the radius bound.
        assert!(rel_err(max_radius(1e-5, 1e4, 32.0).unwrap(), a_max / 2.0) < 1e-10);
        // δ^{-2/5}: δ = 1 shrinks it by 100 relative to δ = 1e-5.
        assert!(rel_err(max_radius(1.0, 1e4, 1.0).unwrap(), a_max / 100.0) < 1e-10);
        assert!(max_radius(0.0, 1e4, 1.0).is_err());
        assert!(max_radius(2.0, 1e4, 1.0).is_err());
    }

    #[test]
    fn feasibility_verdicts() {
        // Dust ball: far beyond the bound.
        let dust = BodySpec::new(1e-5, 1e4).unwrap();
        let report = feasibility(&dust, 1.0, 1e-5).unwrap();
        assert!(!report.feasible);
        assert!(report.radius / report.max_radius > 100.0);
        // Fullerene-sized body at 900 K: inside the bound.
        let c60 = BodySpec::new(0.5e-9, 1e4).unwrap();
        assert!(feasibility(&c60, 900.0, 1e-5).unwrap().feasible);
        // Boundary is inclusive.
        let a_max = max_radius(1e-5, 1e4, 1.0).unwrap();
        let edge = BodySpec::new(a_max, 1e4).unwrap();
        assert!(feasibility(&edge, 1.0, 1e-5).unwrap().feasible);
    }

    #[test]
    fn feasibility_is_monotone() {
        let delta = 1e-4;
        // Growing radius can only lose feasibility.
        let mut last_feasible = true;
        for radius in [1e-9, 5e-9, 2e-8, 1e-7, 1e-6] {
            let body = BodySpec::new(radius, 1e4).unwrap();
            let feasible = feasibility(&body, 10.0, delta).unwrap().feasible;
            assert!(!(feasible && !last_feasible), "feasibility flipped back on at a = {radius}");
            last_feasible = feasible;
        }
        // Cooling can only gain feasibility.
        let body = BodySpec::new(8e-9, 1e4).unwrap();
        let mut last = false;
        for temperature in [1000.0, 100.0, 10.0, 1.0, 0.1] {
            let feasible = feasibility(&body, temperature, delta).unwrap().feasible;
            assert!(!(last && !feasible), "feasibility lost while cooling to {temperature} K");
            last = feasible;
        }
    }

    #[test]
    fn dust_scenario_reference_numbers() {
        let result = run_dust_scenario(&cfg()).unwrap();
        assert_eq!(result.channels.len(), 2);
        assert!(rel_err(result.channels[0].rate, 11.781255288752342) < 1e-9);
        assert!(rel_err(result.channels[1].rate, 0.34975827655541424) < 1e-9);
        assert!(rel_err(result.total_rate, 12.131013565307756) < 1e-9);
        assert!(rel_err(result.coherence_factor, 0.9879422705435837) < 1e-9);
        assert!(rel_err(result.mean_wavelength, 3.5858910596446809e-10) < 1e-8);
        assert!(rel_err(result.coherence_length.unwrap(), 5.1816572080471025e-10) < 1e-8);
        assert!(!result.feasibility.feasible);
        // The rate-law discrepancy note is mandatory.
        assert!(result.notes.iter().any(|n| n.contains("2.8 K")));
        assert!(result.notes.iter().any(|n| n.contains("~20")));
    }

    #[test]
    fn fullerene_scenario_reference_numbers() {
        let result = run_fullerene_scenario(&cfg()).unwrap();
        assert!(rel_err(result.exposure_total, 3.51) < 1e-9);
        assert!(rel_err(result.coherence_factor, 0.029896914436926315) < 1e-8);
        assert!(rel_err(result.coherence_length.unwrap(), 8.5071895494482351e-7) < 1e-12);
        assert_eq!(result.coherence_exceeds_grating, Some(true));
        let rayleigh = result.channels.iter().find(|c| c.name == "rayleigh_scattering").unwrap();
        assert!(rel_err(rayleigh.rate, 1.1951896106667046e-9) < 1e-9);
        assert!(rayleigh.rate < 1e-8, "Rayleigh must be negligible");
        let absorption =
            result.channels.iter().find(|c| c.name == "blackbody_absorption_bound").unwrap();
        assert!(!absorption.included);
        assert!(result.feasibility.feasible);
    }

    #[test]
    fn scenario_budget_totals_are_consistent() {
        for result in [run_dust_scenario(&cfg()).unwrap(), run_fullerene_scenario(&cfg()).unwrap()]
        {
            let sum: f64 =
                result.channels.iter().filter(|c| c.included).map(|c| c.exposure).sum();
            assert!(rel_err(result.exposure_total, sum) < 1e-12, "{}", result.name);
        }
    }

    #[test]
    fn scenarios_are_deterministic() {
        let a = serde_json::to_string(&run_dust_scenario(&cfg()).unwrap()).unwrap();
        let b = serde_json::to_string(&run_dust_scenario(&cfg()).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grating_spec_validation() {
        assert!(GratingSpec::new(50e-9, 100e-9, 2, 1e-3).is_ok());
        assert!(GratingSpec::new(100e-9, 100e-9, 2, 1e-3).is_err());
        assert!(GratingSpec::new(50e-9, 100e-9, 1, 1e-3).is_err());
        assert!(GratingSpec::new(50e-9, 100e-9, 2, 0.0).is_err());
    }
}
