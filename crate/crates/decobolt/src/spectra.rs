//! Collision spectral densities ν(k) and their moments.
//!
//! A spectral density is the probability density of momentum-transfer
//! magnitudes per collision, paired with the total collision rate 𝒩.
//! Built-in shapes cover the physical channels (Planck-weighted photon
//! spectra, discrete lines for monochromatic environments) plus tabulated
//! and user-supplied densities. All integrals over the built-in smooth
//! shapes are nondimensionalized (x = k/scale) and evaluated by adaptive
//! quadrature.

use std::fmt;
use std::io::BufRead;
use std::sync::Arc;

use crate::quad::{self, CompensatedSum, QuadratureConfig};
use crate::quantities::CONSTANTS;
use crate::{Error, Result};

/// Upper cutoff for nondimensional Planck integrands: the tail beyond
/// contributes below 1e-20 of the total for every x^n/(e^x - 1) with n <= 8.
const PLANCK_X_CUT: f64 = 70.0;

/// Above this many sinc half-periods the oscillatory integral is replaced
/// by its large-argument asymptote (relative error below 1e-13 there).
const MAX_SINC_CELLS: usize = 120_000;

/// 1 - sin(u)/u, stable for small u.
pub(crate) fn one_minus_sinc(u: f64) -> f64 {
    let u = u.abs();
    if u < 0.1 {
        let u2 = u * u;
        u2 / 6.0 * (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0 * (1.0 - u2 / 72.0)))
    } else {
        1.0 - u.sin() / u
    }
}

/// ∫₀^∞ xⁿ/(eˣ−1) dx by adaptive quadrature.
///
/// Equals Γ(n+1)ζ(n+1); the closed form is reserved for tests.
pub fn bose_integral(n: u32, cfg: &QuadratureConfig) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "Bose integral requires exponent n >= 2, got {n} (integral diverges at the origin)"
        )));
    }
    quad::integrate_semi_infinite(move |x| bose_weight(x, n), 0.0, cfg)
}

/// xⁿ/(eˣ−1), evaluated as 0 outside the double-precision support.
fn bose_weight(x: f64, n: u32) -> f64 {
    if x <= 0.0 || x > 750.0 {
        return 0.0;
    }
    x.powi(n as i32) / x.exp_m1()
}

/// One monochromatic collision component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    /// Momentum transfer wavevector (1/m).
    pub wavevector: f64,
    /// Normalized weight.
    pub weight: f64,
}

#[derive(Clone)]
enum Shape {
    /// ν(k) ∝ k²/(e^{k/scale}−1): Planck photon-number spectrum.
    Planck { exponent: u32, scale: f64, norm: f64 },
    /// Weighted discrete lines; weights sum to 1.
    Lines(Vec<SpectralLine>),
    /// Normalized tabulated density on a strictly increasing grid
    /// (trapezoid rule; accuracy is the grid supplier's responsibility).
    Tabulated { k: Vec<f64>, density: Vec<f64> },
    /// Arbitrary normalized density with a precomputed effective support.
    Numeric { raw: Arc<dyn Fn(f64) -> f64 + Send + Sync>, norm: f64, k_max: f64 },
    /// Convex mixture of shapes.
    Mixture(Vec<(f64, Shape)>),
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Planck { exponent, scale, .. } => {
                write!(f, "Planck {{ exponent: {exponent}, scale: {scale:e} }}")
            }
            Shape::Lines(lines) => write!(f, "Lines({lines:?})"),
            Shape::Tabulated { k, .. } => write!(f, "Tabulated {{ points: {} }}", k.len()),
            Shape::Numeric { norm, k_max, .. } => {
                write!(f, "Numeric {{ norm: {norm:e}, k_max: {k_max:e} }}")
            }
            Shape::Mixture(parts) => {
                write!(f, "Mixture(")?;
                for (w, s) in parts {
                    write!(f, "{w:.3}*{s:?}, ")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A normalized collision probability density ν(k) with total rate 𝒩.
#[derive(Debug, Clone)]
pub struct SpectralDensity {
    rate: f64,
    shape: Shape,
    cfg: QuadratureConfig,
}

impl SpectralDensity {
    /// Planck photon-number spectrum, ν(k) ∝ k²/(e^{ħck/k_BT}−1).
    pub fn planck_k2(rate: f64, temperature: f64, cfg: &QuadratureConfig) -> Result<Self> {
        Self::planck(rate, 2, temperature, cfg)
    }

    /// Rayleigh-weighted Planck spectrum, ν(k) ∝ k⁶/(e^{ħck/k_BT}−1).
    pub fn planck_k6(rate: f64, temperature: f64, cfg: &QuadratureConfig) -> Result<Self> {
        Self::planck(rate, 6, temperature, cfg)
    }

    fn planck(rate: f64, exponent: u32, temperature: f64, cfg: &QuadratureConfig) -> Result<Self> {
        check_rate(rate)?;
        if !(temperature > 0.0) {
            return Err(Error::Domain(format!(
                "Planck spectrum requires a positive temperature, got {temperature}"
            )));
        }
        let scale = CONSTANTS.thermal_wavevector(temperature);
        let norm = bose_integral(exponent, cfg)?;
        Ok(SpectralDensity { rate, shape: Shape::Planck { exponent, scale, norm }, cfg: *cfg })
    }

    /// Single line at k₀ (monochromatic environment).
    pub fn line(rate: f64, wavevector: f64) -> Result<Self> {
        Self::lines(rate, &[(wavevector, 1.0)])
    }

    /// Weighted lines; weights are normalized to sum to 1.
    pub fn lines(rate: f64, components: &[(f64, f64)]) -> Result<Self> {
        check_rate(rate)?;
        if components.is_empty() {
            return Err(Error::Config("discrete spectrum needs at least one line".into()));
        }
        let total: f64 = components.iter().map(|(_, w)| w).sum();
        if !(total > 0.0) {
            return Err(Error::Config(format!("line weights must sum to a positive value, got {total}")));
        }
        let mut lines = Vec::with_capacity(components.len());
        for &(k, w) in components {
            if !(k > 0.0) {
                return Err(Error::Config(format!("line wavevector must be positive, got {k}")));
            }
            if w < 0.0 {
                return Err(Error::Config(format!("line weight must be nonnegative, got {w}")));
            }
            lines.push(SpectralLine { wavevector: k, weight: w / total });
        }
        Ok(SpectralDensity {
            rate,
            shape: Shape::Lines(lines),
            cfg: QuadratureConfig::default(),
        })
    }

    /// Tabulated density; normalized with the trapezoid rule on the grid.
    pub fn tabulated(rate: f64, k: Vec<f64>, density: Vec<f64>, cfg: &QuadratureConfig) -> Result<Self> {
        check_rate(rate)?;
        if k.len() != density.len() {
            return Err(Error::Config(format!(
                "tabulated spectrum columns differ in length ({} vs {})",
                k.len(),
                density.len()
            )));
        }
        if k.len() < 2 {
            return Err(Error::Config("tabulated spectrum needs at least two grid points".into()));
        }
        for pair in k.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(Error::Config(format!(
                    "tabulated k grid must be strictly increasing (found {} after {})",
                    pair[1], pair[0]
                )));
            }
        }
        if k[0] < 0.0 {
            return Err(Error::Config(format!("tabulated k grid must be nonnegative, starts at {}", k[0])));
        }
        if let Some(bad) = density.iter().find(|d| !(**d >= 0.0) || !d.is_finite()) {
            return Err(Error::Config(format!("tabulated density must be finite and nonnegative, found {bad}")));
        }
        let total = trapezoid(&k, &density, |_, d| d);
        if !(total > 0.0) {
            return Err(Error::Config("tabulated density integrates to zero".into()));
        }
        let density = density.iter().map(|d| d / total).collect();
        Ok(SpectralDensity { rate, shape: Shape::Tabulated { k, density }, cfg: *cfg })
    }

    /// Reads a tabulated spectrum from two-column CSV: `k,density` with a
    /// mandatory header row. k in 1/m, density in arbitrary units.
    pub fn tabulated_from_csv<R: BufRead>(rate: f64, reader: R, cfg: &QuadratureConfig) -> Result<Self> {
        let mut k = Vec::new();
        let mut density = Vec::new();
        let mut saw_header = false;
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Config(format!("spectrum CSV read error: {e}")))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if !saw_header {
                if line.split(',').all(|field| field.trim().parse::<f64>().is_err()) {
                    saw_header = true;
                    continue;
                }
                return Err(Error::Config(format!(
                    "spectrum CSV line {}: header row required before data",
                    idx + 1
                )));
            }
            let mut fields = line.split(',');
            let (ks, ds) = match (fields.next(), fields.next(), fields.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(Error::Config(format!(
                        "spectrum CSV line {}: expected exactly two comma-separated columns",
                        idx + 1
                    )))
                }
            };
            let parse = |s: &str, what: &str| {
                s.trim().parse::<f64>().map_err(|_| {
                    Error::Config(format!("spectrum CSV line {}: invalid {what} value {s:?}", idx + 1))
                })
            };
            k.push(parse(ks, "k")?);
            density.push(parse(ds, "density")?);
        }
        if !saw_header {
            return Err(Error::Config("spectrum CSV is empty (header row required)".into()));
        }
        Self::tabulated(rate, k, density, cfg)
    }

    /// Normalizes a raw nonnegative density over [0, ∞) into a spectral
    /// density with the given total rate.
    pub fn normalize<F>(raw: F, rate: f64, cfg: &QuadratureConfig) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_rate(rate)?;
        let total = quad::integrate_semi_infinite(&raw, 0.0, cfg).map_err(|e| match e {
            Error::Quadrature { context, residual } => Error::Quadrature {
                context: format!("normalizing raw density: {context}"),
                residual,
            },
            other => other,
        })?;
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::Config(format!(
                "raw density is not normalizable (integral {total:e})"
            )));
        }
        let raw = Arc::new(raw);
        let k_max = effective_support(&|k| raw(k) / total, cfg)?;
        Ok(SpectralDensity { rate, shape: Shape::Numeric { raw, norm: total, k_max }, cfg: *cfg })
    }

    /// Convex mixture weighted by component rates; the composed total rate
    /// is the sum of component rates.
    pub fn mixture(components: Vec<SpectralDensity>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Config("mixture of zero spectral densities".into()));
        }
        if components.len() == 1 {
            return Ok(components.into_iter().next().unwrap());
        }
        let total: f64 = components.iter().map(|c| c.rate).sum();
        if !(total > 0.0) {
            return Err(Error::Config(format!(
                "mixture total rate must be positive, got {total}"
            )));
        }
        let cfg = components[0].cfg;
        let mut parts = Vec::new();
        for comp in components {
            let w = comp.rate / total;
            if w == 0.0 {
                continue;
            }
            match comp.shape {
                // Flatten nested mixtures so weights stay explicit.
                Shape::Mixture(inner) => {
                    for (wi, si) in inner {
                        parts.push((w * wi, si));
                    }
                }
                other => parts.push((w, other)),
            }
        }
        Ok(SpectralDensity { rate: total, shape: Shape::Mixture(parts), cfg })
    }

    /// Total collision rate 𝒩 (1/s).
    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn quadrature_config(&self) -> &QuadratureConfig {
        &self.cfg
    }

    /// ν(k) for shapes with a pointwise density (None when the shape
    /// contains discrete lines).
    pub fn density_at(&self, k: f64) -> Option<f64> {
        if k < 0.0 {
            return Some(0.0);
        }
        shape_density_at(&self.shape, k)
    }

    /// ∫ν(k)dk − 1, evaluated with this density's own quadrature config.
    /// Diagnostic for the normalization invariant.
    pub fn normalization_residual(&self) -> Result<f64> {
        Ok(self.integral_of(|_| 1.0)? - 1.0)
    }

    /// Mean square wavevector k̄² = ∫k²ν(k)dk (m⁻²).
    pub fn mean_square_k(&self) -> Result<f64> {
        self.integral_of(|k| k * k)
    }

    /// k̄ = √(k̄²) (m⁻¹).
    pub fn mean_k(&self) -> Result<f64> {
        Ok(self.mean_square_k()?.sqrt())
    }

    /// Mean wavelength λ̄ = 2π/k̄ (m).
    pub fn mean_wavelength(&self) -> Result<f64> {
        let k = self.mean_k()?;
        if k == 0.0 {
            return Err(Error::Domain("mean wavelength undefined for k̄ = 0".into()));
        }
        Ok(2.0 * std::f64::consts::PI / k)
    }

    /// ∫ν(k)(1 − sinc(kr))dk: the dimensionless decoherence moment in [0, 2].
    pub fn decoherence_moment(&self, r: f64) -> Result<f64> {
        if r < 0.0 {
            return Err(Error::Domain(format!("separation must be nonnegative, got {r}")));
        }
        if r == 0.0 {
            return Ok(0.0);
        }
        shape_decoherence_moment(&self.shape, r, &self.cfg)
    }

    /// ∫g(k)ν(k)dk for a smooth weight g.
    fn integral_of<G: Fn(f64) -> f64 + Copy>(&self, g: G) -> Result<f64> {
        shape_integral(&self.shape, g, &self.cfg)
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if rate < 0.0 || !rate.is_finite() {
        return Err(Error::Domain(format!("collision rate must be finite and nonnegative, got {rate}")));
    }
    Ok(())
}

fn shape_density_at(shape: &Shape, k: f64) -> Option<f64> {
    match shape {
        Shape::Planck { exponent, scale, norm } => {
            Some(bose_weight(k / scale, *exponent) / (norm * scale))
        }
        Shape::Lines(_) => None,
        Shape::Tabulated { k: grid, density } => Some(interp_linear(grid, density, k)),
        Shape::Numeric { raw, norm, .. } => Some(raw(k).max(0.0) / norm),
        Shape::Mixture(parts) => {
            let mut sum = 0.0;
            for (w, s) in parts {
                sum += w * shape_density_at(s, k)?;
            }
            Some(sum)
        }
    }
}

fn shape_integral<G: Fn(f64) -> f64 + Copy>(shape: &Shape, g: G, cfg: &QuadratureConfig) -> Result<f64> {
    match shape {
        Shape::Planck { exponent, scale, norm } => {
            let n = *exponent;
            let s = *scale;
            let value = quad::integrate_semi_infinite(move |x| g(s * x) * bose_weight(x, n), 0.0, cfg)?;
            Ok(value / norm)
        }
        Shape::Lines(lines) => {
            let mut acc = CompensatedSum::default();
            for line in lines {
                acc.add(line.weight * g(line.wavevector));
            }
            Ok(acc.value())
        }
        Shape::Tabulated { k, density } => Ok(trapezoid(k, density, |ki, d| g(ki) * d)),
        Shape::Numeric { raw, norm, .. } => {
            let raw = Arc::clone(raw);
            let n = *norm;
            quad::integrate_semi_infinite(move |k| g(k) * raw(k) / n, 0.0, cfg)
        }
        Shape::Mixture(parts) => {
            let mut acc = CompensatedSum::default();
            for (w, s) in parts {
                acc.add(w * shape_integral(s, g, cfg)?);
            }
            Ok(acc.value())
        }
    }
}

fn shape_decoherence_moment(shape: &Shape, r: f64, cfg: &QuadratureConfig) -> Result<f64> {
    match shape {
        Shape::Planck { exponent, scale, norm } => {
            let alpha = scale * r;
            let n = *exponent;
            let nrm = *norm;
            let cells = (PLANCK_X_CUT * alpha / std::f64::consts::PI).ceil();
            if cells as usize > MAX_SINC_CELLS {
                // Deep saturation: 1 - S(α) with S(α) ≃ h(0)/α², h = ν̂(x)/x at 0.
                let h0 = if n == 2 { 1.0 / nrm } else { 0.0 };
                return Ok(1.0 - h0 / (alpha * alpha));
            }
            let value = integrate_one_minus_sinc(
                |x| bose_weight(x, n) / nrm,
                alpha,
                PLANCK_X_CUT,
                cfg,
            )?;
            Ok(value)
        }
        Shape::Lines(lines) => {
            let mut acc = CompensatedSum::default();
            for line in lines {
                acc.add(line.weight * one_minus_sinc(line.wavevector * r));
            }
            Ok(acc.value())
        }
        Shape::Tabulated { k, density } => {
            Ok(trapezoid(k, density, |ki, d| d * one_minus_sinc(ki * r)))
        }
        Shape::Numeric { raw, norm, k_max } => {
            let cells = (k_max * r / std::f64::consts::PI).ceil();
            if cells as usize > MAX_SINC_CELLS {
                // Saturated to within max|ν/k|·π/r of 1.
                return Ok(1.0);
            }
            let raw = Arc::clone(raw);
            let n = *norm;
            integrate_one_minus_sinc(move |k| raw(k) / n, r, *k_max, cfg)
        }
        Shape::Mixture(parts) => {
            let mut acc = CompensatedSum::default();
            for (w, s) in parts {
                acc.add(w * shape_decoherence_moment(s, r, cfg)?);
            }
            Ok(acc.value())
        }
    }
}

/// ∫₀^{x_max} pdf(x)(1 − sinc(αx))dx, split at the sinc zeros so each cell
/// holds at most half an oscillation. The integrand is nonnegative, so the
/// cell sum carries no cancellation.
fn integrate_one_minus_sinc<F: Fn(f64) -> f64>(
    pdf: F,
    alpha: f64,
    x_max: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let f = |x: f64| pdf(x) * one_minus_sinc(alpha * x);
    let cell = std::f64::consts::PI / alpha;
    if cell >= x_max {
        return quad::integrate(f, 0.0, x_max, cfg);
    }
    let n_cells = (x_max / cell).ceil() as usize;
    let mut acc = CompensatedSum::default();
    for m in 0..n_cells {
        let a = m as f64 * cell;
        let b = ((m + 1) as f64 * cell).min(x_max);
        acc.add(quad::integrate(&f, a, b, cfg)?);
        if b >= x_max {
            break;
        }
    }
    Ok(acc.value())
}

/// Doubling search for a wavevector beyond which the normalized density's
/// tail is negligible.
fn effective_support(pdf: &dyn Fn(f64) -> f64, cfg: &QuadratureConfig) -> Result<f64> {
    let tail_cfg = QuadratureConfig { rel_tol: 1e-6, abs_tol: 1e-18, ..*cfg };
    let mut k_max: f64 = 1.0;
    for _ in 0..200 {
        let tail = quad::integrate_semi_infinite(pdf, k_max, &tail_cfg)?;
        if tail < 1e-14 {
            return Ok(k_max);
        }
        k_max *= 2.0;
    }
    Err(Error::Config("density tail does not decay within the searchable range".into()))
}

fn trapezoid<F: Fn(f64, f64) -> f64>(k: &[f64], density: &[f64], weight: F) -> f64 {
    let mut acc = CompensatedSum::default();
    for i in 1..k.len() {
        let fa = weight(k[i - 1], density[i - 1]);
        let fb = weight(k[i], density[i]);
        acc.add(0.5 * (fa + fb) * (k[i] - k[i - 1]));
    }
    acc.value()
}

fn interp_linear(grid: &[f64], values: &[f64], x: f64) -> f64 {
    if x < grid[0] || x > grid[grid.len() - 1] {
        return 0.0;
    }
    let idx = grid.partition_point(|g| *g <= x).min(grid.len() - 1).max(1);
    let (a, b) = (grid[idx - 1], grid[idx]);
    let t = (x - a) / (b - a);
    values[idx - 1] * (1.0 - t) + values[idx] * t
}

#[cfg(test)]
pub(crate) mod test_oracles {
    /// ζ(s) by direct summation with an Euler–Maclaurin tail correction.
    pub fn zeta(s: f64) -> f64 {
        let cutoff = 100_000u64;
        let mut sum = 0.0;
        for j in (1..=cutoff).rev() {
            sum += (j as f64).powf(-s);
        }
        let j = cutoff as f64;
        sum + j.powf(1.0 - s) / (s - 1.0) - 0.5 * j.powf(-s) + s / 12.0 * j.powf(-s - 1.0)
    }

    pub fn gamma_int(n: u32) -> f64 {
        (1..n).map(|j| j as f64).product()
    }
}
