//! Physical constants and elementary derived quantities.
//!
//! Constants are CODATA 2018 values, fixed program-wide; every other
//! module takes them from [`CONSTANTS`] so that derived numbers are
//! reproducible to the last digit.

use crate::{Error, Result};

/// Fundamental constants in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant ħ (J·s).
    pub hbar: f64,
    /// Boltzmann constant k_B (J/K).
    pub k_boltzmann: f64,
    /// Speed of light in vacuum (m/s).
    pub speed_of_light: f64,
    /// Atomic mass unit (kg).
    pub amu: f64,
}

/// CODATA 2018 recommended values.
pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    k_boltzmann: 1.380_649e-23,
    speed_of_light: 2.997_924_58e8,
    amu: 1.660_539_07e-27,
};

impl PhysicalConstants {
    /// k_B·T/(ħc): the thermal photon wavevector scale (1/m) at temperature T.
    pub fn thermal_wavevector(&self, temperature: f64) -> f64 {
        self.k_boltzmann * temperature / (self.hbar * self.speed_of_light)
    }
}

/// A homogeneous spherical body.
///
/// Mass may be given explicitly (overriding the density) or derived from
/// radius and mass density as M = (4/3)πa³κ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodySpec {
    /// Radius a (m).
    pub radius: f64,
    /// Mass density κ (kg/m³).
    pub mass_density: f64,
    /// Internal temperature (K), when the body is hotter than its environment.
    pub internal_temperature: Option<f64>,
    mass_override: Option<f64>,
}

impl BodySpec {
    pub fn new(radius: f64, mass_density: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Domain(format!("body radius must be positive, got {radius}")));
        }
        if !(mass_density > 0.0) {
            return Err(Error::Domain(format!(
                "body mass density must be positive, got {mass_density}"
            )));
        }
        Ok(BodySpec { radius, mass_density, internal_temperature: None, mass_override: None })
    }

    pub fn with_internal_temperature(mut self, temperature: f64) -> Result<Self> {
        if !(temperature > 0.0) {
            return Err(Error::Domain(format!(
                "internal temperature must be positive, got {temperature}"
            )));
        }
        self.internal_temperature = Some(temperature);
        Ok(self)
    }

    /// Fix the mass explicitly; the density is kept for feasibility bounds
    /// but no longer determines the mass.
    pub fn with_mass(mut self, mass: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::Domain(format!("explicit mass must be positive, got {mass}")));
        }
        self.mass_override = Some(mass);
        Ok(self)
    }

    /// Explicit mass if given, else (4/3)πa³κ.
    pub fn mass(&self) -> f64 {
        body_mass(self)
    }
}

/// Mass of the body: explicit override, else (4/3)πa³κ.
pub fn body_mass(body: &BodySpec) -> f64 {
    match body.mass_override {
        Some(m) => m,
        None => 4.0 / 3.0 * std::f64::consts::PI * body.radius.powi(3) * body.mass_density,
    }
}

/// Mean thermal speed √(8k_BT/πm) of a particle of mass m at temperature T.
///
/// Returns 0 for T = 0.
pub fn thermal_velocity(mass: f64, temperature: f64) -> Result<f64> {
    if !(mass > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {mass}")));
    }
    if temperature < 0.0 {
        return Err(Error::Domain(format!("temperature must be nonnegative, got {temperature}")));
    }
    Ok((8.0 * CONSTANTS.k_boltzmann * temperature / (std::f64::consts::PI * mass)).sqrt())
}

/// De Broglie wavelength Λ = 2πħ/(MV).
pub fn de_broglie_wavelength(mass: f64, speed: f64) -> Result<f64> {
    if !(mass > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {mass}")));
    }
    if !(speed > 0.0) {
        return Err(Error::Domain(format!(
            "speed must be positive for a finite wavelength, got {speed}"
        )));
    }
    Ok(2.0 * std::f64::consts::PI * CONSTANTS.hbar / (mass * speed))
}

/// Mean thermal photon wavelength λ̄ = 2πħc/(k_BT).
pub fn thermal_photon_wavelength(temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::Domain(format!("temperature must be positive, got {temperature}")));
    }
    Ok(2.0 * std::f64::consts::PI / CONSTANTS.thermal_wavevector(temperature))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn constants_positive() {
        assert!(CONSTANTS.hbar > 0.0);
        assert!(CONSTANTS.k_boltzmann > 0.0);
        assert!(CONSTANTS.speed_of_light > 0.0);
        assert!(CONSTANTS.amu > 0.0);
    }

    #[test]
    fn body_mass_unit_sphere() {
        let body = BodySpec::new(1.0, 1.0).unwrap();
        assert!(rel_err(body.mass(), 4.0 / 3.0 * std::f64::consts::PI) < 1e-15);
    }

    #[test]
    fn body_mass_rejects_degenerate_radius() {
        assert!(BodySpec::new(0.0, 1.0).is_err());
        assert!(BodySpec::new(-1e-9, 1.0).is_err());
        assert!(BodySpec::new(1.0, 0.0).is_err());
    }

    #[test]
    fn body_mass_explicit_override_ignores_density() {
        // C60: 720 amu regardless of the nominal density.
        let m = 720.0 * CONSTANTS.amu;
        let body = BodySpec::new(0.5e-9, 1e4).unwrap().with_mass(m).unwrap();
        assert_eq!(body.mass(), m);
        assert!(rel_err(body.mass(), 1.1956e-24) < 1e-4);
    }

    #[test]
    fn body_mass_monotone_cubic_in_radius() {
        let m1 = BodySpec::new(1.0, 500.0).unwrap().mass();
        let m2 = BodySpec::new(2.0, 500.0).unwrap().mass();
        assert!(rel_err(m2, 8.0 * m1) < 1e-14);
    }

    #[test]
    fn thermal_velocity_reference_point() {
        // Direct evaluation of √(8 k_B T / (π m)).
        let v = thermal_velocity(1e-25, 1.0).unwrap();
        assert!(rel_err(v, 18.75) < 1e-3, "v = {v}");
        // √T scaling.
        let v4 = thermal_velocity(1e-25, 4.0).unwrap();
        assert!(rel_err(v4, 2.0 * v) < 1e-14);
        // T = 0 edge.
        assert_eq!(thermal_velocity(1e-25, 0.0).unwrap(), 0.0);
        assert!(thermal_velocity(0.0, 1.0).is_err());
        assert!(thermal_velocity(1e-25, -1.0).is_err());
    }

    #[test]
    fn de_broglie_reference_points() {
        // Unit construction: M = 2πħ, V = 1.
        let lambda = de_broglie_wavelength(2.0 * std::f64::consts::PI * CONSTANTS.hbar, 1.0).unwrap();
        assert!(rel_err(lambda, 1.0) < 1e-14);
        // Fullerene at 100 m/s.
        let lambda = de_broglie_wavelength(720.0 * CONSTANTS.amu, 100.0).unwrap();
        assert!(rel_err(lambda, 5.54e-12) < 1e-3, "lambda = {lambda}");
        // Doubling V halves the wavelength.
        let l1 = de_broglie_wavelength(1e-24, 50.0).unwrap();
        let l2 = de_broglie_wavelength(1e-24, 100.0).unwrap();
        assert!(rel_err(l1, 2.0 * l2) < 1e-14);
        assert!(de_broglie_wavelength(1e-24, 0.0).is_err());
    }

    #[test]
    fn thermal_photon_wavelength_reference_points() {
        let l3 = thermal_photon_wavelength(3.0).unwrap();
        assert!(rel_err(l3, 4.80e-3) < 1e-3, "λ̄(3 K) = {l3}");
        let l300 = thermal_photon_wavelength(300.0).unwrap();
        assert!(rel_err(l300, 4.80e-5) < 1e-3);
        // 1/T scaling.
        assert!(rel_err(l3, 2.0 * thermal_photon_wavelength(6.0).unwrap()) < 1e-14);
        assert!(thermal_photon_wavelength(0.0).is_err());
        assert!(thermal_photon_wavelength(-3.0).is_err());
    }
}
