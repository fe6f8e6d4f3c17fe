//! Acceptance suite: every release criterion with its tolerance pinned,
//! one pass/fail line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use decobolt::channels::{blackbody_rate, decoherence_time, gas_rate, rayleigh_rate};
use decobolt::evolution::{DensityMatrix, GridSpec, Hamiltonian, PotentialSpec};
use decobolt::experiments::{
    self, grating_pattern, max_radius, GratingOptions, GratingSpec, SlitProfile,
};
use decobolt::kernel::{coherence_factor, coherence_length, log_spaced, DecoherenceKernel};
use decobolt::quantities::CONSTANTS;
use decobolt::spectra::SpectralDensity;
use decobolt::QuadratureConfig;

const HBAR: f64 = 1.054_571_817e-34;

fn report(criterion: u32, description: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion:2} [{}] {description}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} FAILED — {description}: {detail}");
}

/// ζ(s) by direct summation with an Euler–Maclaurin tail correction.
fn zeta(s: f64) -> f64 {
    let cutoff = 100_000u64;
    let mut sum = 0.0;
    for j in (1..=cutoff).rev() {
        sum += (j as f64).powf(-s);
    }
    let j = cutoff as f64;
    sum + j.powf(1.0 - s) / (s - 1.0) - 0.5 * j.powf(-s) + s / 12.0 * j.powf(-s - 1.0)
}

fn quad() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn free() -> Hamiltonian {
    Hamiltonian::Full { potential: PotentialSpec::Free }
}

/// 1 − sin(u)/u with an independent long series below u = 0.5.
fn one_minus_sinc_oracle(u: f64) -> f64 {
    if u < 0.5 {
        let u2 = u * u;
        let u4 = u2 * u2;
        u2 / 6.0 - u4 / 120.0 + u4 * u2 / 5040.0 - u4 * u4 / 362880.0
            + u4 * u4 * u2 / 39916800.0
            - u4 * u4 * u4 / 6227020800.0
    } else {
        1.0 - u.sin() / u
    }
}

#[test]
fn criterion_01_blackbody_coefficient() {
    let start = Instant::now();
    let rate = blackbody_rate(1.0, 1.0, &quad()).unwrap();
    let scale = CONSTANTS.thermal_wavevector(1.0);
    let coefficient = rate / (CONSTANTS.speed_of_light * scale.powi(3));
    let elapsed = start.elapsed().as_secs_f64();

    let closed_form = 2.0 * zeta(3.0) / std::f64::consts::PI;
    let pass = (coefficient - 0.7653).abs() <= 1e-4
        && (coefficient - closed_form).abs() / closed_form < 1e-8
        && (coefficient - 0.8).abs() / 0.8 < 0.05
        && elapsed < 1.0;
    report(
        1,
        "blackbody coefficient N/(R^2 c (kT/hc)^3) = 0.7653 +- 1e-4 via quadrature",
        pass,
        &format!("coefficient {coefficient:.6} vs 2*zeta(3)/pi {closed_form:.6}, runtime {elapsed:.3} s"),
    );
}

#[test]
fn criterion_02_rayleigh_coefficient() {
    let start = Instant::now();
    let rate = rayleigh_rate(1e-5, 1.0, &quad()).unwrap();
    let scale = CONSTANTS.thermal_wavevector(1.0);
    let coefficient = rate / (CONSTANTS.speed_of_light * 1e-30 * scale.powi(7));
    let elapsed = start.elapsed().as_secs_f64();

    let closed_form = 5.0 / (3.0 * std::f64::consts::PI) * 720.0 * zeta(7.0);
    let pass = (coefficient - 385.2).abs() <= 0.1
        && (coefficient - closed_form).abs() / closed_form < 1e-8
        && (coefficient - 380.0).abs() / 380.0 < 0.02
        && elapsed < 1.0;
    report(
        2,
        "Rayleigh coefficient (5/3pi)*Gamma(7)*zeta(7) = 385.2 +- 0.1 via quadrature",
        pass,
        &format!("coefficient {coefficient:.4}, runtime {elapsed:.3} s"),
    );
}

#[test]
fn criterion_03_decoherence_time_law() {
    let mut worst: Option<f64> = None;
    let mut pass = true;
    for (radius, temperature) in [(1.0, 1.0), (1e-3, 3.0), (0.1, 2.0)] {
        let tau = decoherence_time(radius, temperature, &quad()).unwrap();
        let invariant = tau * radius * radius * temperature.powi(3);
        pass &= (3e-17..=8e-17).contains(&invariant);
        worst = Some(invariant);
    }
    report(
        3,
        "decoherence-time law tau*R^2*T^3 in [3e-17, 8e-17] s m^2 K^3",
        pass,
        &format!("value {:.4e} (scale-invariant across R, T)", worst.unwrap()),
    );
}

#[test]
fn criterion_04_dust_scenario_rates_and_note() {
    let gas = gas_rate(1e-5, 1e9, 1e-25, 1.0).unwrap();
    let rayleigh = rayleigh_rate(1e-5, 1.0, &quad()).unwrap();
    let scenario = experiments::run_dust_scenario(&quad()).unwrap();
    let has_note = scenario.notes.iter().any(|n| n.contains("2.8 K"))
        && scenario.notes.iter().any(|n| n.contains("~20"));
    let pass = (gas - 11.8).abs() <= 0.1
        && gas < 2.0 * 20.0
        && 20.0 < 2.0 * gas
        && (rayleigh - 0.35).abs() <= 0.01
        && has_note;
    report(
        4,
        "dust scenario: N_gas = 11.8 +- 0.1 / s, N_R(1 K) = 0.35 +- 0.01 / s, discrepancy note",
        pass,
        &format!("N_gas {gas:.4}, N_R {rayleigh:.4}, note present: {has_note}"),
    );
}

#[test]
fn criterion_05_feasibility_bound() {
    let a_max = max_radius(1e-5, 1e4, 1.0).unwrap();
    let t_ratio = max_radius(1e-5, 1e4, 32.0).unwrap() / a_max;
    let d_ratio = max_radius(1.0, 1e4, 1.0).unwrap() / a_max;
    let pass = (a_max - 1.52e-8).abs() / 1.52e-8 <= 0.01
        && a_max < 2.0 * 1e-8
        && 1e-8 < 2.0 * a_max
        && (t_ratio - 0.5).abs() < 1e-10
        && (d_ratio - 0.01).abs() < 1e-12;
    report(
        5,
        "feasibility bound a_max = 1.52e-8 m +- 1% with exact T^(-1/5), delta^(-2/5) scalings",
        pass,
        &format!("a_max {a_max:.6e}, T-scaling ratio {t_ratio:.12}, delta-scaling ratio {d_ratio:.14}"),
    );
}

#[test]
fn criterion_06_fullerene_scenario() {
    let factor = coherence_factor(3.5, 1.0).unwrap();
    let length = coherence_length(1e-5, 3.5, 1.0).unwrap();
    let scenario = experiments::run_fullerene_scenario(&quad()).unwrap();
    let exceeds = scenario.coherence_exceeds_grating == Some(true)
        && scenario.coherence_length.unwrap() > 100e-9;
    let pass = (factor - 0.0302).abs() <= 1e-4
        && (length - 0.851e-6).abs() / 0.851e-6 <= 0.01
        && exceeds;
    report(
        6,
        "fullerene: Gamma(tN=3.5) = 0.0302 +- 1e-4, l_coh = 0.851 um +- 1%, exceeds 100 nm period",
        pass,
        &format!("Gamma {factor:.6}, l_coh {length:.4e} m, report asserts l_coh > period: {exceeds}"),
    );
}

#[test]
fn criterion_07_line_kernel_oracle() {
    let start = Instant::now();
    let k0 = 7.3e5;
    let rate = 42.0;
    let kernel = DecoherenceKernel::build(SpectralDensity::line(rate, k0).unwrap()).unwrap();
    let mut worst = 0.0f64;
    for r in log_spaced(1e-3 / k0, 1e3 / k0, 200) {
        let got = kernel.gamma(r).unwrap();
        let expected = rate * one_minus_sinc_oracle(k0 * r);
        worst = worst.max((got - expected).abs() / expected.abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst < 1e-10 && elapsed < 5.0;
    report(
        7,
        "line-kernel gamma matches N(1 - sin(k0 r)/(k0 r)) to 1e-10 over six decades",
        pass,
        &format!("worst relative deviation {worst:.2e}, runtime {elapsed:.3} s"),
    );
}

#[test]
fn criterion_08_small_r_taylor_constant() {
    let families: Vec<(&str, SpectralDensity)> = vec![
        ("line", SpectralDensity::line(2.0, 4.2e6).unwrap()),
        ("planck_k2", SpectralDensity::planck_k2(2.0, 300.0, &quad()).unwrap()),
        ("planck_k6", SpectralDensity::planck_k6(2.0, 4.0, &quad()).unwrap()),
        ("maxwell_gas", {
            let spec = decobolt::channels::ChannelSpec::Gas {
                number_density: 1e9,
                gas_mass: 1e-25,
                temperature: 1.0,
                radius: 1e-5,
                model: decobolt::channels::GasSpectrumModel::MaxwellBoltzmann,
            };
            decobolt::channels::channel_spectrum(&spec, &quad()).unwrap()
        }),
    ];
    let mut worst = 0.0f64;
    let mut pass = true;
    for (name, nu) in families {
        let kernel = DecoherenceKernel::build(nu).unwrap();
        let k = kernel.mean_k();
        let r = 1e-3 / k;
        let ratio = kernel.gamma(r).unwrap() / (kernel.saturation_rate() * k * k * r * r);
        let deviation = (ratio - 1.0 / 6.0).abs();
        worst = worst.max(deviation);
        pass &= deviation < 1e-3;
        if !pass {
            report(8, "small-r law gamma/(N k^2 r^2) = 1/6 +- 1e-3", false, &format!("{name}: ratio {ratio}"));
        }
    }
    report(
        8,
        "small-r law gamma/(N k^2 r^2) = 1/6 +- 1e-3 at r = 1e-3/k for all built-in families",
        pass,
        &format!("worst |ratio - 1/6| = {worst:.2e}"),
    );
}

#[test]
fn criterion_09_evolution_invariants() {
    let start = Instant::now();
    let mass = 1.25e-31;
    let sigma = 0.02;
    let grid = GridSpec::new(1.0, 256, 1e-3).unwrap();
    let state = DensityMatrix::gaussian(grid, mass, 0.0, sigma, 0.0).unwrap();

    // Free run: Var(X) against the analytic spreading law.
    let free_run = state.evolve(None, &free(), 1.0, 1000).unwrap();
    let last = free_run.samples.last().unwrap();
    let spread = HBAR * last.time / (2.0 * mass * sigma);
    let expected_var = sigma * sigma + spread * spread;
    let var_rel = (last.var_x - expected_var).abs() / expected_var;
    let free_audit = free_run.final_state.audit();

    // Decohered run: invariants under the full generator.
    let kernel = DecoherenceKernel::build(SpectralDensity::line(1.0, 100.0).unwrap()).unwrap();
    let deco_run = state.evolve(Some(&kernel), &free(), 1.0, 1000).unwrap();
    let audit = deco_run.final_state.audit();
    let min_eig = deco_run.final_state.min_eigenvalue();
    let elapsed = start.elapsed().as_secs_f64();

    let pass = free_audit.trace_deviation < 1e-9
        && free_audit.hermiticity_residual < 1e-10
        && var_rel < 1e-6
        && audit.trace_deviation < 1e-9
        && audit.hermiticity_residual < 1e-10
        && min_eig > -1e-6
        && elapsed < 60.0;
    report(
        9,
        "evolution invariants on 256-grid, 1e3 steps (trace, hermiticity, positivity, spreading)",
        pass,
        &format!(
            "trace dev {:.2e}, herm {:.2e}, min eig {min_eig:.2e}, Var(X) rel {var_rel:.2e}, runtime {elapsed:.1} s",
            audit.trace_deviation.max(free_audit.trace_deviation),
            audit.hermiticity_residual.max(free_audit.hermiticity_residual)
        ),
    );
}

#[test]
fn criterion_10_frozen_dephasing_closed_form() {
    // Per-separation coherence decay.
    let grid = GridSpec::new(1.0, 128, 1e-3).unwrap();
    let state = DensityMatrix::gaussian(grid, 1e-30, 0.0, 0.05, 0.0).unwrap();
    let kernel = DecoherenceKernel::build(SpectralDensity::line(80.0, 60.0).unwrap()).unwrap();
    let t = 5e-3;
    let evolved = state
        .evolve(Some(&kernel), &Hamiltonian::Zero, t, usize::MAX)
        .unwrap()
        .final_state;
    let before = state.observables().coherence;
    let after = evolved.observables().coherence;
    let dx = grid.spacing();
    let mut worst = 0.0f64;
    for m in 0..grid.points {
        if before[m] < 1e-30 {
            continue;
        }
        let expected = (-kernel.gamma(m as f64 * dx).unwrap() * t).exp();
        worst = worst.max((after[m] / before[m] - expected).abs());
    }

    // Two-slit visibility ratio.
    let pattern_grid = GridSpec::new(1.6e-6, 512, 1e-3).unwrap();
    let period = pattern_grid.extent / 16.0;
    let grating = GratingSpec::new(12.5e-9, period, 2, 1e-3).unwrap();
    let slit_kernel = DecoherenceKernel::build(SpectralDensity::line(1000.0, 2e7).unwrap()).unwrap();
    let pattern = grating_pattern(
        720.0 * CONSTANTS.amu,
        &grating,
        &slit_kernel,
        pattern_grid,
        100.0,
        &GratingOptions { profile: SlitProfile::Point, frozen_kinetic: true },
    )
    .unwrap();
    let expected_ratio = (-slit_kernel.gamma(period).unwrap() * grating.flight_time).exp();
    let ratio = pattern.visibility_decohered / pattern.visibility_baseline;
    let ratio_err = (ratio - expected_ratio).abs();

    let pass = worst < 1e-8 && ratio_err < 1e-6;
    report(
        10,
        "frozen-H dephasing: C(r,t)/C(r,0) = exp(-gamma(r) t) to 1e-8; two-slit ratio to 1e-6",
        pass,
        &format!("worst coherence-profile deviation {worst:.2e}, visibility-ratio deviation {ratio_err:.2e}"),
    );
}

#[test]
fn criterion_11_momentum_diffusion() {
    let mass = 1.0;
    let k0 = 40.0;
    let rate = 1.0;
    let grid = GridSpec::new(1.0, 256, 2.5e-3).unwrap();
    let state = DensityMatrix::gaussian(grid, mass, 0.0, 0.04, 0.0).unwrap();
    let kernel = DecoherenceKernel::build(SpectralDensity::line(rate, k0).unwrap()).unwrap();
    let result = state.evolve(Some(&kernel), &free(), 0.25, 10).unwrap();

    let h = 1e-3 / k0;
    let curvature = 2.0 * kernel.gamma(h).unwrap() / (h * h);
    let expected = HBAR * HBAR * curvature;

    let points: Vec<(f64, f64)> = result
        .samples
        .iter()
        .map(|s| (s.time, s.var_p + s.mean_p * s.mean_p))
        .collect();
    let n = points.len() as f64;
    let (st, sp): (f64, f64) = points.iter().fold((0.0, 0.0), |(a, b), (t, p)| (a + t, b + p));
    let (stt, stp): (f64, f64) =
        points.iter().fold((0.0, 0.0), |(a, b), (t, p)| (a + t * t, b + t * p));
    let slope = (n * stp - st * sp) / (n * stt - st * st);
    let rel = (slope - expected).abs() / expected;
    let pass = rel < 0.05;
    report(
        11,
        "momentum diffusion d<P^2>/dt within 5% of hbar^2 gamma''(0) (finite-difference oracle)",
        pass,
        &format!("fitted slope {slope:.4e} vs {expected:.4e} (rel {rel:.3e})"),
    );
}

#[test]
fn criterion_12_momentum_shift_covariance() {
    let grid = GridSpec::new(1.0, 128, 1e-3).unwrap();
    let state = DensityMatrix::gaussian(grid, 1e-30, 0.0, 0.05, 0.0).unwrap();
    let k = 120.0;
    let shifted = state.momentum_shift(k).unwrap();
    let obs = shifted.observables();
    // e^{-ikX} rho e^{ikX} moves <P> by -hbar k.
    let shift_rel = (obs.mean_p - (-HBAR * k)).abs() / (HBAR * k);
    let before = state.observables().position;
    let worst_pos = before
        .iter()
        .zip(&obs.position)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let pass = shift_rel < 1e-8 && worst_pos < 1e-12;
    report(
        12,
        "momentum-shift covariance: <P> moves by hbar*k to 1e-8, position marginal fixed to 1e-12",
        pass,
        &format!("<P> relative error {shift_rel:.2e}, position marginal deviation {worst_pos:.2e}"),
    );
}
