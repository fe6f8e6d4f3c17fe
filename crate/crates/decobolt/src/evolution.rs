//! Position-basis density-matrix propagation on a 1-D periodic grid.
//!
//! The master equation splits into three position-diagonal or
//! momentum-diagonal pieces, so one symmetric step is
//!
//!   half kinetic → potential phase × decoherence multiplier → half kinetic
//!
//! with the kinetic half applied exactly through a double spectral
//! transform ρ̃ = FρF†. The decoherence multiplier e^{−γ(|xᵢ−xⱼ|)Δt} is
//! exactly trace-preserving (γ(0) = 0) and Hermitian; the other two pieces
//! are unitary conjugations, so the scheme preserves the state invariants
//! up to rounding and O(Δt²) Trotter error.

use std::io::{Read, Write};
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::kernel::DecoherenceKernel;
use crate::{Error, Result};

/// Probability allowed in the outer quarter of the grid before a run aborts.
pub const GUARD_BAND_LIMIT: f64 = 1e-6;

/// Uniform periodic grid with the evolution time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Physical extent L (m); coordinates span [-L/2, L/2).
    pub extent: f64,
    /// Number of points, a power of two ≥ 16.
    pub points: usize,
    /// Time step Δt (s).
    pub time_step: f64,
}

impl GridSpec {
    pub fn new(extent: f64, points: usize, time_step: f64) -> Result<Self> {
        if !(extent > 0.0) {
            return Err(Error::Config(format!("grid extent must be positive, got {extent}")));
        }
        if points < 16 || !points.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid points must be a power of two >= 16, got {points}"
            )));
        }
        if !(time_step > 0.0) {
            return Err(Error::Config(format!("time step must be positive, got {time_step}")));
        }
        Ok(GridSpec { extent, points, time_step })
    }

    pub fn spacing(&self) -> f64 {
        self.extent / self.points as f64
    }

    /// x coordinate of grid node i.
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - self.points as f64 / 2.0) * self.spacing()
    }

    /// Wavevector of FFT bin a (1/m), in FFT ordering.
    pub fn wavevector(&self, a: usize) -> f64 {
        let n = self.points;
        let f = if a < n / 2 { a as f64 } else { a as f64 - n as f64 };
        2.0 * std::f64::consts::PI * f / self.extent
    }

    /// Momentum cutoff ħπ/Δx in wavevector units.
    pub fn wavevector_cutoff(&self) -> f64 {
        std::f64::consts::PI / self.spacing()
    }

    fn is_guard_band(&self, i: usize) -> bool {
        // Outer quarter of the grid: |x| > 0.375 L.
        self.x(i).abs() > 0.375 * self.extent
    }
}

/// External potential V(x).
#[derive(Debug, Clone)]
pub enum PotentialSpec {
    Free,
    Harmonic { omega: f64 },
    Tabulated(Vec<f64>),
}

/// Hamiltonian used by the propagator. `Zero` freezes the kinetic term and
/// potential entirely, leaving pure spatial dephasing; the decoherence
/// multiplier is then the whole evolution and the off-diagonal decay law
/// e^{−γ(r)t} is exact.
#[derive(Debug, Clone)]
pub enum Hamiltonian {
    Full { potential: PotentialSpec },
    Zero,
}

/// Reduced density matrix ρ(xᵢ|xⱼ) of the center of mass on a grid.
///
/// Stored as continuum kernel values (units 1/m): Σᵢ ρ(xᵢ|xᵢ)Δx = 1.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    data: Array2<Complex64>,
    grid: GridSpec,
    mass: f64,
    time: f64,
}

/// Scalar audit of the state invariants.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct InvariantAudit {
    /// |Tr ρ − 1|.
    pub trace_deviation: f64,
    /// max|ρ − ρ†| / max|ρ|.
    pub hermiticity_residual: f64,
    /// Probability in the outer quarter of the grid.
    pub guard_band_mass: f64,
}

/// Distributions and moments extracted from a state.
#[derive(Debug, Clone)]
pub struct Observables {
    /// Position probabilities per node, normalized to sum 1.
    pub position: Vec<f64>,
    /// Momenta (kg·m/s) ascending, matching `momentum`.
    pub momenta: Vec<f64>,
    /// Momentum probabilities per bin, normalized to sum 1.
    pub momentum: Vec<f64>,
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    /// Tr ρ².
    pub purity: f64,
    /// Off-diagonal coherence profile C(m·Δx) = meanᵢ |ρ(xᵢ₊ₘ|xᵢ)|.
    pub coherence: Vec<f64>,
}

/// One sampled row of an evolution trajectory.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct TrajectorySample {
    pub time: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub purity: f64,
}

/// Trajectory of observables plus the final state.
#[derive(Debug)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub final_state: DensityMatrix,
}

impl DensityMatrix {
    /// Minimal-uncertainty Gaussian pure state ρ = |ψ⟩⟨ψ| with
    /// ψ ∝ exp(−(x−x₀)²/(4σ²) + ip₀x/ħ).
    pub fn gaussian(grid: GridSpec, mass: f64, center: f64, width: f64, momentum: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::Domain(format!("mass must be positive, got {mass}")));
        }
        let dx = grid.spacing();
        if !(width >= 4.0 * dx) {
            return Err(Error::Config(format!(
                "wavepacket width {width:e} unresolvable: need σ ≥ 4Δx = {:e}",
                4.0 * dx
            )));
        }
        let hbar = crate::quantities::CONSTANTS.hbar;
        let k0 = momentum / hbar;
        // Momentum support must sit well inside the grid cutoff.
        let needed = 4.0 * (k0.abs() + 0.5 / width);
        if needed > grid.wavevector_cutoff() {
            return Err(Error::Config(format!(
                "momentum support {needed:.3e} exceeds the grid wavevector cutoff {:.3e}",
                grid.wavevector_cutoff()
            )));
        }
        let n = grid.points;
        let mut psi: Vec<Complex64> = (0..n)
            .map(|i| {
                let x = grid.x(i);
                let envelope = (-(x - center) * (x - center) / (4.0 * width * width)).exp();
                envelope * Complex64::from_polar(1.0, k0 * x)
            })
            .collect();
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>() * dx;
        if !(norm > 0.0) {
            return Err(Error::Config("wavepacket has no support on the grid".into()));
        }
        let scale = norm.sqrt();
        psi.iter_mut().for_each(|a| *a /= scale);

        let data = Array2::from_shape_fn((n, n), |(i, j)| psi[i] * psi[j].conj());
        let state = DensityMatrix { data, grid, mass, time: 0.0 };
        let guard = state.audit().guard_band_mass;
        if guard > 1e-9 {
            return Err(Error::Config(format!(
                "wavepacket leaks {guard:.3e} probability into the guard band at construction"
            )));
        }
        Ok(state)
    }

    /// Wraps an externally assembled matrix (already trace-normalized).
    pub(crate) fn from_parts(data: Array2<Complex64>, grid: GridSpec, mass: f64) -> Result<Self> {
        if data.nrows() != grid.points || data.ncols() != grid.points {
            return Err(Error::Config(format!(
                "density matrix shape {:?} does not match the {}-point grid",
                data.dim(),
                grid.points
            )));
        }
        if !(mass > 0.0) {
            return Err(Error::Domain(format!("mass must be positive, got {mass}")));
        }
        let state = DensityMatrix { data, grid, mass, time: 0.0 };
        let trace = state.trace();
        if !(trace.is_finite() && (trace - 1.0).abs() < 1e-8) {
            return Err(Error::Config(format!("state trace {trace} is not 1")));
        }
        Ok(state)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn data(&self) -> &Array2<Complex64> {
        &self.data
    }

    /// Tr ρ = Σᵢ ρ(xᵢ|xᵢ)Δx.
    pub fn trace(&self) -> f64 {
        let dx = self.grid.spacing();
        (0..self.grid.points).map(|i| self.data[[i, i]].re).sum::<f64>() * dx
    }

    pub fn audit(&self) -> InvariantAudit {
        let n = self.grid.points;
        let dx = self.grid.spacing();
        let mut herm: f64 = 0.0;
        let mut amp: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                herm = herm.max((self.data[[i, j]] - self.data[[j, i]].conj()).norm());
                amp = amp.max(self.data[[i, j]].norm());
            }
        }
        let mut guard = 0.0;
        for i in 0..n {
            if self.grid.is_guard_band(i) {
                guard += self.data[[i, i]].re.max(0.0) * dx;
            }
        }
        InvariantAudit {
            trace_deviation: (self.trace() - 1.0).abs(),
            hermiticity_residual: if amp > 0.0 { herm / amp } else { 0.0 },
            guard_band_mass: guard,
        }
    }

    /// Smallest eigenvalue of the (dimensionless) density operator.
    /// O(N³); intended for on-demand positivity audits.
    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.grid.points;
        let dx = self.grid.spacing();
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| self.data[[i, j]] * dx);
        let eigen = nalgebra::SymmetricEigen::new(m);
        eigen.eigenvalues.iter().fold(f64::INFINITY, |acc, &v| acc.min(v))
    }

    /// Applies e^{−ikX} ρ e^{ikX}: position marginal unchanged, momentum
    /// distribution translated by −ħk.
    pub fn momentum_shift(&self, k: f64) -> Result<Self> {
        if k.abs() > self.grid.wavevector_cutoff() {
            return Err(Error::Domain(format!(
                "shift wavevector {k:e} beyond the grid momentum cutoff {:e}",
                self.grid.wavevector_cutoff()
            )));
        }
        let n = self.grid.points;
        let phases: Vec<Complex64> =
            (0..n).map(|i| Complex64::from_polar(1.0, -k * self.grid.x(i))).collect();
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[[i, j]] *= phases[i] * phases[j].conj();
            }
        }
        Ok(out)
    }

    /// One symmetric split step. Δt = 0 returns the state unchanged.
    pub fn step(
        &self,
        kernel: Option<&DecoherenceKernel>,
        hamiltonian: &Hamiltonian,
        dt: f64,
    ) -> Result<Self> {
        if dt == 0.0 {
            return Ok(self.clone());
        }
        let grid = GridSpec { time_step: dt, ..self.grid };
        let mut propagator = Propagator::new(grid, self.mass, kernel, hamiltonian)?;
        let mut state = self.clone();
        propagator.advance(&mut state)?;
        Ok(state)
    }

    /// Repeated stepping with observables sampled every `stride` steps.
    pub fn evolve(
        &self,
        kernel: Option<&DecoherenceKernel>,
        hamiltonian: &Hamiltonian,
        total_time: f64,
        stride: usize,
    ) -> Result<Trajectory> {
        let dt = self.grid.time_step;
        let steps_f = total_time / dt;
        let steps = steps_f.round();
        if !(total_time > 0.0) || (steps_f - steps).abs() > 1e-9 * steps.max(1.0) {
            return Err(Error::Config(format!(
                "total time {total_time:e} is not an integer number of steps of {dt:e}"
            )));
        }
        let steps = steps as usize;
        let stride = stride.max(1);
        let mut propagator = Propagator::new(self.grid, self.mass, kernel, hamiltonian)?;
        let mut state = self.clone();
        let mut samples = Vec::with_capacity(steps / stride + 2);
        samples.push(sample_of(&state));
        for step_idx in 1..=steps {
            propagator.advance(&mut state)?;
            if step_idx % stride == 0 || step_idx == steps {
                let audit = state.audit();
                if audit.guard_band_mass > GUARD_BAND_LIMIT {
                    return Err(Error::Numerical(format!(
                        "guard-band probability {:.3e} exceeds {GUARD_BAND_LIMIT:e} at t = {:.6e} s",
                        audit.guard_band_mass, state.time
                    )));
                }
                samples.push(sample_of(&state));
            }
        }
        Ok(Trajectory { samples, final_state: state })
    }

    /// Distributions and moments.
    pub fn observables(&self) -> Observables {
        let n = self.grid.points;
        let dx = self.grid.spacing();
        let hbar = crate::quantities::CONSTANTS.hbar;

        let raw_pos: Vec<f64> = (0..n).map(|i| self.data[[i, i]].re.max(0.0)).collect();
        let pos_total: f64 = raw_pos.iter().sum();
        let position: Vec<f64> = raw_pos.iter().map(|p| p / pos_total).collect();
        let mean_x: f64 = (0..n).map(|i| self.grid.x(i) * position[i]).sum();
        let var_x: f64 =
            (0..n).map(|i| (self.grid.x(i) - mean_x).powi(2) * position[i]).sum();

        let mut fourier = Fourier::new(n);
        let tilde = fourier.momentum_rep(&self.data);
        // Reorder FFT bins to ascending momentum.
        let order: Vec<usize> = (n / 2..n).chain(0..n / 2).collect();
        let momenta: Vec<f64> =
            order.iter().map(|&a| hbar * self.grid.wavevector(a)).collect();
        let raw_mom: Vec<f64> = order.iter().map(|&a| tilde[[a, a]].re.max(0.0)).collect();
        let mom_total: f64 = raw_mom.iter().sum();
        let momentum: Vec<f64> = raw_mom.iter().map(|p| p / mom_total).collect();
        let mean_p: f64 = momenta.iter().zip(&momentum).map(|(p, w)| p * w).sum();
        let var_p: f64 =
            momenta.iter().zip(&momentum).map(|(p, w)| (p - mean_p).powi(2) * w).sum();

        let purity: f64 =
            self.data.iter().map(|a| a.norm_sqr()).sum::<f64>() * dx * dx;

        let coherence: Vec<f64> = (0..n)
            .map(|m| {
                let count = n - m;
                (0..count).map(|i| self.data[[i + m, i]].norm()).sum::<f64>() / count as f64
            })
            .collect();

        Observables {
            position,
            momenta,
            momentum,
            mean_x,
            mean_p,
            var_x,
            var_p,
            purity,
            coherence,
        }
    }

    /// Binary snapshot: N (u64 LE), Δx (f64 LE), then row-major (re, im)
    /// pairs as little-endian 64-bit floats.
    pub fn write_snapshot<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writer.write_all(&(self.grid.points as u64).to_le_bytes())?;
        writer.write_all(&self.grid.spacing().to_le_bytes())?;
        for value in self.data.iter() {
            writer.write_all(&value.re.to_le_bytes())?;
            writer.write_all(&value.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a snapshot written by [`write_snapshot`]. Mass and time are
    /// not part of the format; the caller provides them.
    pub fn read_snapshot<R: Read>(mut reader: R, mass: f64, time_step: f64) -> Result<Self> {
        let mut u64buf = [0u8; 8];
        reader
            .read_exact(&mut u64buf)
            .map_err(|e| Error::Config(format!("snapshot truncated: {e}")))?;
        let n = u64::from_le_bytes(u64buf) as usize;
        reader
            .read_exact(&mut u64buf)
            .map_err(|e| Error::Config(format!("snapshot truncated: {e}")))?;
        let dx = f64::from_le_bytes(u64buf);
        let grid = GridSpec::new(dx * n as f64, n, time_step)?;
        let mut data = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let mut re = [0u8; 8];
                let mut im = [0u8; 8];
                reader
                    .read_exact(&mut re)
                    .and_then(|_| reader.read_exact(&mut im))
                    .map_err(|e| Error::Config(format!("snapshot truncated: {e}")))?;
                data[[i, j]] = Complex64::new(f64::from_le_bytes(re), f64::from_le_bytes(im));
            }
        }
        Ok(DensityMatrix { data, grid, mass, time: 0.0 })
    }
}

fn sample_of(state: &DensityMatrix) -> TrajectorySample {
    let obs = state.observables();
    TrajectorySample {
        time: state.time,
        mean_x: obs.mean_x,
        mean_p: obs.mean_p,
        var_x: obs.var_x,
        var_p: obs.var_p,
        purity: obs.purity,
    }
}

/// Precomputed multipliers for one time step on a fixed grid.
struct Propagator {
    grid: GridSpec,
    /// exp(−iħk²Δt/(4M)) per FFT bin: one half-kinetic factor.
    kinetic_half: Option<Vec<Complex64>>,
    /// exp(−iV(xᵢ)Δt/ħ) per node.
    potential_phase: Option<Vec<Complex64>>,
    /// exp(−γ(mΔx)Δt) per separation index m.
    decoherence: Option<Vec<f64>>,
    fourier: Fourier,
}

impl Propagator {
    fn new(
        grid: GridSpec,
        mass: f64,
        kernel: Option<&DecoherenceKernel>,
        hamiltonian: &Hamiltonian,
    ) -> Result<Self> {
        let hbar = crate::quantities::CONSTANTS.hbar;
        let n = grid.points;
        let dt = grid.time_step;

        let (kinetic_half, potential_phase) = match hamiltonian {
            Hamiltonian::Zero => (None, None),
            Hamiltonian::Full { potential } => {
                let kin: Vec<Complex64> = (0..n)
                    .map(|a| {
                        let k = grid.wavevector(a);
                        Complex64::from_polar(1.0, -hbar * k * k * dt / (4.0 * mass))
                    })
                    .collect();
                let pot = match potential {
                    PotentialSpec::Free => None,
                    PotentialSpec::Harmonic { omega } => Some(
                        (0..n)
                            .map(|i| {
                                let v = 0.5 * mass * omega * omega * grid.x(i) * grid.x(i);
                                Complex64::from_polar(1.0, -v * dt / hbar)
                            })
                            .collect(),
                    ),
                    PotentialSpec::Tabulated(values) => {
                        if values.len() != n {
                            return Err(Error::Config(format!(
                                "tabulated potential has {} values for a {n}-point grid",
                                values.len()
                            )));
                        }
                        Some(
                            values
                                .iter()
                                .map(|v| Complex64::from_polar(1.0, -v * dt / hbar))
                                .collect(),
                        )
                    }
                };
                (Some(kin), pot)
            }
        };

        let decoherence = match kernel {
            None => None,
            Some(kernel) => {
                let dx = grid.spacing();
                let factors: Vec<f64> = (0..n)
                    .map(|m| Ok((-kernel.gamma(m as f64 * dx)? * dt).exp()))
                    .collect::<Result<_>>()?;
                Some(factors)
            }
        };

        Ok(Propagator { grid, kinetic_half, potential_phase, decoherence, fourier: Fourier::new(n) })
    }

    fn advance(&mut self, state: &mut DensityMatrix) -> Result<()> {
        self.half_kinetic(state);
        self.interaction(state);
        self.half_kinetic(state);
        state.time += self.grid.time_step;
        if !state.trace().is_finite() {
            return Err(Error::Numerical(format!(
                "state became non-finite at t = {:.6e} s",
                state.time
            )));
        }
        Ok(())
    }

    fn half_kinetic(&mut self, state: &mut DensityMatrix) {
        let phases = match &self.kinetic_half {
            None => return,
            Some(p) => p,
        };
        let n = self.grid.points;
        let mut tilde = self.fourier.momentum_rep(&state.data);
        for a in 0..n {
            for b in 0..n {
                tilde[[a, b]] *= phases[a] * phases[b].conj();
            }
        }
        state.data = self.fourier.position_rep(&tilde);
    }

    fn interaction(&self, state: &mut DensityMatrix) {
        let n = self.grid.points;
        match (&self.potential_phase, &self.decoherence) {
            (None, None) => {}
            (phase, decoh) => {
                for i in 0..n {
                    for j in 0..n {
                        let mut factor = Complex64::new(1.0, 0.0);
                        if let Some(u) = phase {
                            factor *= u[i] * u[j].conj();
                        }
                        if let Some(d) = decoh {
                            factor *= d[i.abs_diff(j)];
                        }
                        state.data[[i, j]] *= factor;
                    }
                }
            }
        }
    }
}

/// Double spectral transform pair ρ ↔ FρF†.
struct Fourier {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl Fourier {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Fourier { n, fwd, inv, scratch: vec![Complex64::default(); scratch_len] }
    }

    /// ρ̃ = FρF† (unnormalized).
    fn momentum_rep(&mut self, rho: &Array2<Complex64>) -> Array2<Complex64> {
        let mut m = rho.t().as_standard_layout().into_owned();
        self.rows(&mut m, true);
        let mut m = m.t().as_standard_layout().into_owned();
        self.rows(&mut m, false);
        m
    }

    /// ρ = F†ρ̃F/N².
    fn position_rep(&mut self, tilde: &Array2<Complex64>) -> Array2<Complex64> {
        let mut m = tilde.t().as_standard_layout().into_owned();
        self.rows(&mut m, false);
        let mut m = m.t().as_standard_layout().into_owned();
        self.rows(&mut m, true);
        let scale = 1.0 / (self.n * self.n) as f64;
        m.mapv_inplace(|v| v * scale);
        m
    }

    fn rows(&mut self, m: &mut Array2<Complex64>, forward: bool) {
        let plan = if forward { &self.fwd } else { &self.inv };
        let flat = m.as_slice_mut().expect("standard layout");
        plan.process_with_scratch(flat, &mut self.scratch);
    }
}
